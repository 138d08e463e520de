//! Thermodynamic observables, apparent temperatures and the resource-inequality
//! auditor.
//!
//! Conventions: `k_B = 1`, entropies in nats, positive heat flows from the
//! system into the bath. Free energies use the bath temperature as reference.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math shadows this whenever std is linked
use num_traits::Float;

use crate::collision::{Snapshot, TrajectoryRecord, Variant};
use crate::error::{Error, Result};
use crate::linalg::{
    herm_eig, partial_trace, von_neumann_entropy, ComplexMatrix, DensityMatrix, HermitianOperator, SUPPORT_TOL,
};
use crate::model::{
    dephase, embed, local_hamiltonian, sigma_minus, sigma_plus, system_hamiltonian, SpinChainSpec, GROUND,
};

/// Tolerance on `P⁰ + P¹ ≤ 1`.
pub const POPULATION_TOL: f64 = 1e-10;
/// Audits with `slack ≥ −AUDIT_TOL` are satisfied.
pub const AUDIT_TOL: f64 = 1e-9;

/// `E_k = tr(ρ H_k)`; `rho` may carry extra factors (e.g. the bath) after the spins.
pub fn subsystem_energy(rho: &DensityMatrix, spec: &SpinChainSpec, k: usize) -> Result<f64> {
    let total = rho.n_subsystems();
    if k >= total {
        return Err(Error::IndexOutOfRange { index: k, len: total });
    }
    let red = partial_trace(rho, &[k])?;
    Ok(local_hamiltonian(spec, 0, 1)?.expectation(red.matrix()))
}

/// Ground and excited populations `(P⁰, P¹)` of factor `k`.
pub fn populations(rho: &DensityMatrix, k: usize) -> Result<(f64, f64)> {
    let red = partial_trace(rho, &[k])?;
    let p0 = red.matrix()[(GROUND, GROUND)].re;
    Ok((p0, red.matrix().trace().re - p0))
}

/// Cumulative heat into the bath at every snapshot.
pub fn heat_to_bath(traj: &TrajectoryRecord) -> Vec<f64> {
    traj.snapshots.iter().map(|s| s.bath_energy_change).collect()
}

/// `F = tr(ρH) − T S(ρ)`.
pub fn free_energy(rho: &DensityMatrix, h: &HermitianOperator, t_ref: f64) -> f64 {
    h.expectation(rho.matrix()) - t_ref * von_neumann_entropy(rho)
}

/// `I(A:B) = S(A) + S(B) − S(AB)` with `A` = the factors in `cut`, `B` = the rest.
pub fn mutual_information(joint: &DensityMatrix, cut: &[usize]) -> Result<f64> {
    let n = joint.n_subsystems();
    if let Some(&bad) = cut.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let rest: Vec<usize> = (0..n).filter(|i| !cut.contains(i)).collect();
    if cut.is_empty() || rest.is_empty() {
        return Err(Error::invalid("mutual information needs a proper bipartition"));
    }
    let sa = von_neumann_entropy(&partial_trace(joint, cut)?);
    let sb = von_neumann_entropy(&partial_trace(joint, &rest)?);
    Ok(sa + sb - von_neumann_entropy(joint))
}

/// Relative entropy of coherence `S(D(ρ)) − S(ρ)`.
pub fn coherence_measure(rho: &DensityMatrix, h: &HermitianOperator) -> f64 {
    von_neumann_entropy(&dephase(rho, h)) - von_neumann_entropy(rho)
}

/// `⟨σ₋^p σ₊^k⟩ + ⟨σ₊^p σ₋^k⟩`.
pub fn pair_coherence(rho: &DensityMatrix, p: usize, k: usize) -> Result<f64> {
    let total = rho.n_subsystems();
    let a = embed(&sigma_minus(), p, total)?.matmul(&embed(&sigma_plus(), k, total)?);
    let op = &a + &a.adjoint();
    let v = rho.matrix().trace_product(&op);
    if v.im.abs() > 1e-10 {
        return Err(Error::ToleranceBreach(format!("pair coherence has imaginary part {:e}", v.im)));
    }
    Ok(v.re)
}

/// One-way coherence `𝒞_k`: pair coherences with every spin before `k` in `order`.
pub fn one_way_coherence(rho: &DensityMatrix, k: usize, order: &[usize]) -> Result<f64> {
    let pos = order
        .iter()
        .position(|&x| x == k)
        .ok_or_else(|| Error::invalid(format!("spin {k} is not in the interaction order")))?;
    order[..pos].iter().map(|&p| pair_coherence(rho, p, k)).sum()
}

/// Apparent temperature, or the reason it is undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ApparentTemperature {
    Defined(f64),
    /// Equal effective populations.
    Infinite,
    /// `P⁰ + 𝒞 ≤ 0`.
    GroundNonPositive,
    /// `P¹ + 𝒞 ≤ 0`.
    ExcitedNonPositive,
}

impl ApparentTemperature {
    pub fn value(&self) -> Option<f64> {
        match *self {
            ApparentTemperature::Defined(t) => Some(t),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            ApparentTemperature::Defined(_) => "ok",
            ApparentTemperature::Infinite => "infinite",
            ApparentTemperature::GroundNonPositive => "ground_nonpositive",
            ApparentTemperature::ExcitedNonPositive => "excited_nonpositive",
        }
    }
}

fn at_from_effective(ground: f64, excited: f64, delta: f64) -> ApparentTemperature {
    if ground <= 0.0 {
        return ApparentTemperature::GroundNonPositive;
    }
    if excited <= 0.0 {
        return ApparentTemperature::ExcitedNonPositive;
    }
    let l = (ground / excited).ln();
    if l == 0.0 {
        ApparentTemperature::Infinite
    } else {
        ApparentTemperature::Defined(delta / l)
    }
}

/// `AT = δ / ln[(P⁰ + 𝒞)/(P¹ + 𝒞)]`.
pub fn apparent_temperature(p0: f64, p1: f64, c: f64, delta: f64) -> Result<ApparentTemperature> {
    if p0 + p1 > 1.0 + POPULATION_TOL {
        return Err(Error::invalid(format!("populations sum to {} > 1", p0 + p1)));
    }
    Ok(at_from_effective(p0 + c, p1 + c, delta))
}

/// Apparent temperature of spin `k` of `rho` under interaction `order`.
pub fn spin_apparent_temperature(
    rho: &DensityMatrix,
    spec: &SpinChainSpec,
    k: usize,
    order: &[usize],
) -> Result<ApparentTemperature> {
    let (p0, p1) = populations(rho, k)?;
    apparent_temperature(p0, p1, one_way_coherence(rho, k, order)?, spec.delta())
}

/// Global apparent temperature with the coherence summed over all ordered pairs.
pub fn global_apparent_temperature(rho: &DensityMatrix, spec: &SpinChainSpec) -> Result<ApparentTemperature> {
    let n = spec.n();
    let (mut g, mut e, mut c) = (0.0, 0.0, 0.0);
    for k in 0..n {
        let (p0, p1) = populations(rho, k)?;
        g += p0;
        e += p1;
        for p in k + 1..n {
            c += pair_coherence(rho, p, k)?;
        }
    }
    // Σ_{l≠k} ⟨σ₋^l σ₊^k⟩ = Σ_{l<k} (⟨σ₋^l σ₊^k⟩ + ⟨σ₊^l σ₋^k⟩)
    Ok(at_from_effective(g + c, e + c, spec.delta()))
}

/// Value of `𝒞_k` at which the heat current of spin `k` changes sign.
///
/// Negative when `T_k > T_R`: heat reverses into the hotter spin for `𝒞_k` below it.
/// Positive when `T_k < T_R`: heat reverses out of the colder spin for `𝒞_k` above it.
pub fn reversal_threshold(beta_k: f64, beta_r: f64, delta: f64) -> f64 {
    let (a, b) = ((beta_k * delta).exp(), (beta_r * delta).exp());
    (a - b) / ((a + 1.0) * (b - 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityAudit {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`.
    pub slack: f64,
    pub satisfied: bool,
}

impl InequalityAudit {
    pub fn new(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let slack = lhs - rhs;
        InequalityAudit { label: label.into(), lhs, rhs, slack, satisfied: slack >= -AUDIT_TOL }
    }
}

/// `tr(Δ ln ρ)`, restricted to the support of `ρ`.
fn trace_log(delta: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64> {
    let sp = herm_eig(&HermitianOperator::new_unchecked(rho.matrix().clone()));
    let v = &sp.eigenvectors;
    let n = rho.dim();
    let mut acc = 0.0;
    for (k, &lam) in sp.eigenvalues.iter().enumerate() {
        let mut w = crate::linalg::C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                w += v[(i, k)].conj() * delta[(i, j)] * v[(j, k)];
            }
        }
        if lam <= SUPPORT_TOL {
            if w.re.abs() > SUPPORT_TOL {
                return Err(Error::SupportViolation);
            }
            continue;
        }
        acc += w.re * lam.ln();
    }
    Ok(acc)
}

fn system_part(joint: &DensityMatrix, n: usize) -> Result<DensityMatrix> {
    partial_trace(joint, &(0..n).collect::<Vec<_>>())
}

/// Audits the resource inequalities for collision `collision` (1-based).
///
/// For every cascade position `j ≥ 1` (spin `k = order[j]`):
///  - free-energy bound: `−β_R ΔF(ρ_S) ≥ I(S_k:R)`, both taken just before `k` interacts;
///  - correlation bound: `I(S_k:R)` consumed by `k`'s interaction is at least
///    `tr[(ρ''_k−ρ'_k) ln ρ'_k] + tr[(ρ''_R−ρ'_R) ln ρ'_R]`, which reduces to
///    `(β_k − β_R) ΔE_{R,k}` for Gibbs local states.
///
/// For the whole collision (either variant):
///  - global bound: `−tr[ΔD ln D] − tr[Δρ_R ln ρ_R] ≥ ΔI(S:R) + ΔC(ρ_S)` with
///    `D` the dephased system state; it reduces to `(β_R − β_S) ΔE_R` for a
///    dephased state that is Gibbs at `β_S`.
///
/// Every slack is a sum of relative entropies.
pub fn audit_resource_chain(
    traj: &TrajectoryRecord,
    spec: &SpinChainSpec,
    collision: usize,
) -> Result<Vec<InequalityAudit>> {
    let n = spec.n();
    let states = traj.collision_states(collision)?;
    if states[0].n_subsystems() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: states[0].n_subsystems() });
    }
    let h_s = system_hamiltonian(spec);
    let t_r = spec.bath_temperature();
    let beta_r = spec.beta_bath();
    let mut audits = Vec::new();

    let rho_s0 = system_part(&states[0], n)?;
    let f0 = free_energy(&rho_s0, &h_s, t_r);

    if traj.variant == Variant::Cascade {
        for j in 1..n {
            let k = traj.order[j];
            let before = &states[j];
            let after = &states[j + 1];
            let f = free_energy(&system_part(before, n)?, &h_s, t_r);
            let i_before = mutual_information(&partial_trace(before, &[k, n])?, &[0])?;
            audits.push(InequalityAudit::new(
                format!("free-energy bound: spin {} at position {}", k + 1, j + 1),
                -beta_r * (f - f0),
                i_before,
            ));

            let i_after = mutual_information(&partial_trace(after, &[k, n])?, &[0])?;
            let (k0, k1) = (partial_trace(before, &[k])?, partial_trace(after, &[k])?);
            let (r0, r1) = (partial_trace(before, &[n])?, partial_trace(after, &[n])?);
            let rhs = trace_log(&(k1.matrix() - k0.matrix()), &k0)? + trace_log(&(r1.matrix() - r0.matrix()), &r0)?;
            audits.push(InequalityAudit::new(
                format!("correlation bound: spin {} at position {}", k + 1, j + 1),
                i_before - i_after,
                rhs,
            ));
        }
    }

    let end = states.last().expect("collision has at least one step");
    let rho_s1 = system_part(end, n)?;
    let (d0, d1) = (dephase(&rho_s0, &h_s), dephase(&rho_s1, &h_s));
    let (r0, r1) = (partial_trace(&states[0], &[n])?, partial_trace(end, &[n])?);
    let lhs = -trace_log(&(d1.matrix() - d0.matrix()), &d0)? - trace_log(&(r1.matrix() - r0.matrix()), &r0)?;
    let d_i = mutual_information(end, &[n])? - mutual_information(&states[0], &[n])?;
    let d_c = coherence_measure(&rho_s1, &h_s) - coherence_measure(&rho_s0, &h_s);
    audits.push(InequalityAudit::new("global coherence bound", lhs, d_i + d_c));
    Ok(audits)
}

/// Every observable recorded per snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    pub energies: Vec<f64>,
    /// Cumulative heat into the bath.
    pub bath_energy_change: f64,
    pub free_energy: f64,
    /// `I(S:R)`; absent where no bath state exists (master equation).
    pub mutual_information: Option<f64>,
    pub coherence: f64,
    pub one_way: Vec<f64>,
    pub apparent_temperatures: Vec<ApparentTemperature>,
    pub global_apparent_temperature: ApparentTemperature,
}

/// Observables of a system state; `joint` (system ⊗ bath) supplies `I(S:R)`.
pub fn observe_state(
    rho_s: &DensityMatrix,
    joint: Option<&DensityMatrix>,
    bath_energy_change: f64,
    spec: &SpinChainSpec,
    order: &[usize],
) -> Result<ObservableSet> {
    let n = spec.n();
    let h_s = system_hamiltonian(spec);
    let energies = (0..n).map(|k| subsystem_energy(rho_s, spec, k)).collect::<Result<Vec<_>>>()?;
    let one_way = (0..n).map(|k| one_way_coherence(rho_s, k, order)).collect::<Result<Vec<_>>>()?;
    let apparent_temperatures = (0..n)
        .map(|k| {
            let (p0, p1) = populations(rho_s, k)?;
            apparent_temperature(p0, p1, one_way[k], spec.delta())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ObservableSet {
        energies,
        bath_energy_change,
        free_energy: free_energy(rho_s, &h_s, spec.bath_temperature()),
        mutual_information: joint.map(|j| mutual_information(j, &[n])).transpose()?,
        coherence: coherence_measure(rho_s, &h_s),
        one_way,
        apparent_temperatures,
        global_apparent_temperature: global_apparent_temperature(rho_s, spec)?,
    })
}

pub fn observe(snapshot: &Snapshot, spec: &SpinChainSpec, order: &[usize]) -> Result<ObservableSet> {
    observe_state(&snapshot.system_state(), Some(&snapshot.joint), snapshot.bath_energy_change, spec, order)
}

/// One cascade sub-interaction seen through the apparent-temperature lens.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatDirectionSample {
    pub step: usize,
    pub spin: usize,
    /// Apparent temperature of the spin just before it interacts.
    pub apparent_temperature: ApparentTemperature,
    /// Energy change of the spin during the sub-interaction.
    pub energy_change: f64,
}

impl HeatDirectionSample {
    /// Whether the sample is outside the `|AT − T_R| ≤ margin` band with a defined AT.
    pub fn is_decisive(&self, t_r: f64, margin: f64) -> bool {
        matches!(self.apparent_temperature, ApparentTemperature::Defined(t) if (t - t_r).abs() > margin)
    }

    /// `sign(ΔE_k) = sign(T_R − AT_k)`.
    pub fn follows_law(&self, t_r: f64) -> bool {
        match self.apparent_temperature {
            ApparentTemperature::Defined(t) => {
                let expected = t_r - t;
                (self.energy_change > 0.0 && expected > 0.0) || (self.energy_change < 0.0 && expected < 0.0)
            }
            _ => true,
        }
    }
}

/// Pre-interaction apparent temperature and energy change for every cascade step.
pub fn heat_direction_samples(traj: &TrajectoryRecord, spec: &SpinChainSpec) -> Result<Vec<HeatDirectionSample>> {
    let n = spec.n();
    let mut out = Vec::new();
    for snap in &traj.snapshots[1..] {
        let Some(k) = snap.spin else { continue };
        let pre = traj.pre_state(snap.step)?;
        let pre_s = system_part(&pre, n)?;
        out.push(HeatDirectionSample {
            step: snap.step,
            spin: k,
            apparent_temperature: spin_apparent_temperature(&pre_s, spec, k, &traj.order)?,
            energy_change: subsystem_energy(&snap.joint, spec, k)? - subsystem_energy(&pre, spec, k)?,
        });
    }
    Ok(out)
}

/// Energy change of spin 2 during its first sub-interaction, for two spins at
/// `β_k` whose coherence is tuned so that the one-way coherence `𝒞₂` equals
/// `one_way` (order 1 → 2).
pub fn second_spin_energy_change(beta_k: f64, beta_r: f64, delta: f64, g: f64, tau: f64, one_way: f64) -> Result<f64> {
    let spec = SpinChainSpec::uniform(2, delta, beta_k, beta_r)?;
    let pp = crate::model::ground_population(beta_k, delta) * crate::model::excited_population(beta_k, delta);
    // 𝒞₂ = 2λ P⁰P¹ cos α
    let term = crate::model::CoherenceTerm::real(0, 1, one_way / (2.0 * pp));
    let rho = crate::model::initial_state(&spec, &crate::model::CoherenceSpec::new(alloc::vec![term]))?;
    let cfg = crate::collision::CollisionConfig::cascade(2, g, tau, 1);
    let out = crate::collision::run_collision(&rho, &spec, &cfg)?;
    Ok(subsystem_energy(&out.snapshots[1].joint, &spec, 1)? - subsystem_energy(&out.snapshots[0].joint, &spec, 1)?)
}

/// Bisects the `𝒞₂` at which spin 2's energy change flips sign, starting from a
/// bracket of half-width `0.05` around the analytic threshold.
pub fn bracket_reversal(beta_k: f64, beta_r: f64, delta: f64, g: f64, tau: f64, tol: f64) -> Result<(f64, f64)> {
    let guess = reversal_threshold(beta_k, beta_r, delta);
    let f = |c: f64| second_spin_energy_change(beta_k, beta_r, delta, g, tau, c);
    let (mut lo, mut hi) = (guess - 0.05, guess + 0.05);
    let s_lo = f(lo)?.signum();
    if f(hi)?.signum() == s_lo {
        return Err(Error::ToleranceBreach(format!("no sign change of the heat flow in [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid)?.signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}
