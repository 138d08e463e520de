//! Continuous-time limit of the cascade: the master equation
//!
//! `dρ/dt = −i[H_S, ρ] + Σ_k ℒ_k(ρ) + 2 Σ_{k before l} 𝒟_kl(ρ)`
//!
//! with local dissipators
//! `ℒ_k = γ⁺/2 (2σ₊ρσ₋ − {σ₋σ₊, ρ}) + γ⁻/2 (2σ₋ρσ₊ − {σ₊σ₋, ρ})`
//! and nonlocal terms, for spin `k` interacting before `l`,
//! `𝒟_kl = γ⁺/2 (σ₊^k[ρ, σ₋^l] + [σ₊^l, ρ]σ₋^k) + γ⁻/2 (σ₋^k[ρ, σ₊^l] + [σ₋^l, ρ]σ₊^k)`.
//!
//! Rates: `γ⁺ = g²τ P¹_R`, `γ⁻ = g²τ P⁰_R`. One collision spans time `τ`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math shadows this whenever std is linked
use num_traits::Float;

use crate::collision::{CollisionConfig, CollisionEngine, Variant};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, partial_trace_matrix, ComplexMatrix, DensityMatrix, HermitianOperator};
use crate::model::{
    embed, excited_population, ground_population, initial_state, sigma_minus, sigma_plus, system_hamiltonian,
    CoherenceSpec, SpinChainSpec, GROUND,
};
use crate::thermo::{apparent_temperature, ApparentTemperature};

/// Maximum trace drift tolerated by [`integrate`].
pub const TRACE_DRIFT_TOL: f64 = 1e-9;
/// Most negative eigenvalue tolerated by [`integrate`].
pub const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipatorRates {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

pub fn rates(spec: &SpinChainSpec, config: &CollisionConfig) -> DissipatorRates {
    let k = config.g * config.g * config.tau;
    DissipatorRates {
        gamma_plus: k * excited_population(spec.beta_bath(), spec.delta()),
        gamma_minus: k * ground_population(spec.beta_bath(), spec.delta()),
    }
}

/// Precomputed operators of the generator for one `(spec, order, rates)`.
#[derive(Debug, Clone)]
pub struct MasterEquation {
    n: usize,
    rates: DissipatorRates,
    /// `−i H_S`
    minus_i_h: ComplexMatrix,
    /// σ₊ and σ₋ per spin, indexed by spin.
    sp: Vec<ComplexMatrix>,
    sm: Vec<ComplexMatrix>,
    /// Effective non-Hermitian part `−½ Σ_k (γ⁺σ₋σ₊ + γ⁻σ₊σ₋)` folded into one matrix.
    drift: ComplexMatrix,
    /// `(k, l)` with `k` before `l` in the order.
    pairs: Vec<(usize, usize)>,
}

impl MasterEquation {
    pub fn new(spec: &SpinChainSpec, config: &CollisionConfig) -> Result<Self> {
        config.validate(spec.n())?;
        if config.variant != Variant::Cascade {
            return Err(Error::invalid("the master equation describes the cascade variant"));
        }
        Ok(Self::with_rates(spec, &config.order, rates(spec, config)))
    }

    pub fn with_rates(spec: &SpinChainSpec, order: &[usize], rates: DissipatorRates) -> Self {
        let n = spec.n();
        let sp: Vec<_> = (0..n).map(|k| embed(&sigma_plus(), k, n).expect("in range")).collect();
        let sm: Vec<_> = (0..n).map(|k| embed(&sigma_minus(), k, n).expect("in range")).collect();
        let minus_i_h = system_hamiltonian(spec).matrix().scale(crate::linalg::c(0.0, -1.0));
        let mut drift = ComplexMatrix::zeros(1 << n, 1 << n);
        for k in 0..n {
            drift += &sm[k].matmul(&sp[k]).scale_real(-0.5 * rates.gamma_plus);
            drift += &sp[k].matmul(&sm[k]).scale_real(-0.5 * rates.gamma_minus);
        }
        let mut pairs = Vec::new();
        for (i, &k) in order.iter().enumerate() {
            for &l in &order[i + 1..] {
                pairs.push((k, l));
            }
        }
        MasterEquation { n, rates, minus_i_h, sp, sm, drift, pairs }
    }

    pub fn rates(&self) -> DissipatorRates {
        self.rates
    }

    pub fn rhs(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let (gp, gm) = (self.rates.gamma_plus, self.rates.gamma_minus);
        // −i[H,ρ] and the anticommutator parts: Aρ + ρA† with A = −iH + drift
        let a = &self.minus_i_h + &self.drift;
        let mut out = &a.matmul(rho) + &rho.matmul(&a.adjoint());
        for k in 0..self.n {
            out += &self.sp[k].matmul(rho).matmul(&self.sm[k]).scale_real(gp);
            out += &self.sm[k].matmul(rho).matmul(&self.sp[k]).scale_real(gm);
        }
        for &(k, l) in &self.pairs {
            let (spk, smk, spl, sml) = (&self.sp[k], &self.sm[k], &self.sp[l], &self.sm[l]);
            let plus = &spk.matmul(&rho.commutator(sml)) + &spl.commutator(rho).matmul(smk);
            let minus = &smk.matmul(&rho.commutator(spl)) + &sml.commutator(rho).matmul(spk);
            // prefactor 2 × γ/2
            out += &plus.scale_real(gp);
            out += &minus.scale_real(gm);
        }
        out
    }
}

/// `dρ/dt` for the cascade described by `config`.
pub fn master_rhs(rho: &DensityMatrix, spec: &SpinChainSpec, config: &CollisionConfig) -> Result<ComplexMatrix> {
    Ok(MasterEquation::new(spec, config)?.rhs(rho.matrix()))
}

#[derive(Debug, Clone)]
pub struct LindbladTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

/// Fixed-step RK4 from `rho0` to `t_end`, sampling every `sample_every` steps
/// (and at `t = 0`).
pub fn integrate_with(
    eq: &MasterEquation,
    rho0: &DensityMatrix,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<LindbladTrajectory> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must be rejected too
    if !(dt > 0.0) || !(t_end >= 0.0) || sample_every == 0 {
        return Err(Error::invalid("integration needs dt > 0, t_end ≥ 0 and a positive sampling stride"));
    }
    let steps = (t_end / dt).round() as usize;
    let dims = rho0.dims().to_vec();
    let mut rho = rho0.matrix().clone();
    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    for s in 1..=steps {
        let k1 = eq.rhs(&rho);
        let k2 = eq.rhs(&(&rho + &k1.scale_real(dt / 2.0)));
        let k3 = eq.rhs(&(&rho + &k2.scale_real(dt / 2.0)));
        let k4 = eq.rhs(&(&rho + &k3.scale_real(dt)));
        let mut incr = &k1 + &k4;
        incr += &(&k2 + &k3).scale_real(2.0);
        rho += &incr.scale_real(dt / 6.0);
        rho = rho.hermitian_part();
        if s % sample_every == 0 || s == steps {
            let t = s as f64 * dt;
            let drift = (rho.trace().re - 1.0).abs();
            if drift > TRACE_DRIFT_TOL {
                return Err(Error::ToleranceBreach(format!("trace drift {drift:e} at t = {t}")));
            }
            let min = herm_eig(&HermitianOperator::new_unchecked(rho.clone())).min_eigenvalue();
            if min < -POSITIVITY_TOL {
                return Err(Error::ToleranceBreach(format!("eigenvalue {min:e} at t = {t}")));
            }
            // renormalise the roundoff-level trace drift so the sample passes state validation
            let sample = rho.scale_real(1.0 / rho.trace().re);
            states.push(DensityMatrix::with_tolerance(dims.clone(), sample, POSITIVITY_TOL)?);
            times.push(t);
        }
    }
    Ok(LindbladTrajectory { times, states })
}

/// RK4 with samples at every collision boundary `t = jτ`.
pub fn integrate(
    rho0: &DensityMatrix,
    spec: &SpinChainSpec,
    config: &CollisionConfig,
    t_end: f64,
    dt: f64,
) -> Result<LindbladTrajectory> {
    let eq = MasterEquation::new(spec, config)?;
    let per = (config.tau / dt).round().max(1.0) as usize;
    if ((per as f64) * dt - config.tau).abs() > 1e-9 * config.tau {
        return Err(Error::invalid("tau must be an integer multiple of dt"));
    }
    integrate_with(&eq, rho0, t_end, dt, per)
}

/// Heat current into spin `k` in both algebraic forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatCurrent {
    /// `δγ⁺(P⁰+𝒞) − δγ⁻(P¹+𝒞)`; always defined.
    pub population_form: f64,
    /// `δγ⁻(P⁰+𝒞)(e^{−δ/T_R} − e^{−δ/AT})`, when the apparent temperature is defined.
    pub apparent_form: Option<f64>,
}

/// `dE_k/dt` under the master equation.
pub fn heat_current(
    rho: &DensityMatrix,
    spec: &SpinChainSpec,
    config: &CollisionConfig,
    k: usize,
) -> Result<HeatCurrent> {
    let n = spec.n();
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, len: n });
    }
    let r = rates(spec, config);
    let red = partial_trace_matrix(rho.matrix(), rho.dims(), &[k])?;
    let p0 = red[(GROUND, GROUND)].re;
    let p1 = red.trace().re - p0;
    let c = crate::thermo::one_way_coherence(rho, k, &config.order)?;
    let d = spec.delta();
    let population_form = d * r.gamma_plus * (p0 + c) - d * r.gamma_minus * (p1 + c);
    let apparent_form = match apparent_temperature(p0, p1, c, d)? {
        ApparentTemperature::Defined(at) => {
            Some(d * r.gamma_minus * (p0 + c) * ((-d / spec.bath_temperature()).exp() - (-d / at).exp()))
        }
        ApparentTemperature::Infinite => {
            Some(d * r.gamma_minus * (p0 + c) * ((-d / spec.bath_temperature()).exp() - 1.0))
        }
        _ => None,
    };
    Ok(HeatCurrent { population_form, apparent_form })
}

/// Largest per-spin energy difference between the collision engine and the
/// master equation at collision boundaries `t = jτ ≤ t_end`.
pub fn collision_lindblad_discrepancy(
    spec: &SpinChainSpec,
    coh: &CoherenceSpec,
    config: &CollisionConfig,
    t_end: f64,
) -> Result<f64> {
    let collisions = (t_end / config.tau).round() as usize;
    let cfg = CollisionConfig { n_collisions: collisions.max(1), ..config.clone() };
    let rho0 = initial_state(spec, coh)?;
    let traj = CollisionEngine::new(spec, &cfg)?.run_from(&rho0)?;
    let lind = integrate(&rho0, spec, &cfg, collisions as f64 * cfg.tau, cfg.tau / 10.0)?;
    let n = spec.n();
    let mut worst: f64 = 0.0;
    for (a, b) in traj.system_states.iter().zip(&lind.states) {
        for k in 0..n {
            let ea = crate::thermo::subsystem_energy(a, spec, k)?;
            let eb = crate::thermo::subsystem_energy(b, spec, k)?;
            worst = worst.max((ea - eb).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub tau: f64,
    pub discrepancy: f64,
    pub discrepancy_half: f64,
    /// `discrepancy / discrepancy_half`; ≈ 2 for first-order convergence.
    pub ratio: f64,
}

/// Discrepancy at `τ` and at `τ/2` with `g²τ` held fixed.
pub fn convergence_study(
    spec: &SpinChainSpec,
    coh: &CoherenceSpec,
    config: &CollisionConfig,
    t_end: f64,
) -> Result<ConvergenceReport> {
    let d1 = collision_lindblad_discrepancy(spec, coh, config, t_end)?;
    let half = CollisionConfig { tau: config.tau / 2.0, g: config.g * 2f64.sqrt(), ..config.clone() };
    let d2 = collision_lindblad_discrepancy(spec, coh, &half, t_end)?;
    Ok(ConvergenceReport { tau: config.tau, discrepancy: d1, discrepancy_half: d2, ratio: d1 / d2 })
}
