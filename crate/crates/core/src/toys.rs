//! Few-level models with closed-form answers, simulated by direct matrix
//! evolution on small explicitly built blocks. They share no code path with
//! the collision engine beyond the matrix kernel.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math shadows this whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{c, re, unitary_exp, ComplexMatrix, HermitianOperator, C64};
use crate::model::{excited_population, ground_population, EXCITED, GROUND};
use crate::thermo::reversal_threshold;

#[derive(Debug, Clone, PartialEq)]
pub struct ToyResult {
    pub label: String,
    pub analytic: f64,
    pub simulated: f64,
    pub abs_error: f64,
}

impl ToyResult {
    pub fn new(label: impl Into<String>, analytic: f64, simulated: f64) -> Self {
        ToyResult { label: label.into(), analytic, simulated, abs_error: (analytic - simulated).abs() }
    }
}

fn check_strength(c: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&c) {
        return Err(Error::invalid("coherence strength must lie in [0, 1/2]"));
    }
    Ok(())
}

fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => c(0.0, -1.0),
        (1, 0) => c(0.0, 1.0),
        _ => re(0.0),
    })
}

/// A qubit at zero energy with real coherence `C`, rotated so the coherence
/// becomes population: energy gain `Cδ` (paid as work).
pub fn single_spin_rotation(strength: f64) -> Result<ToyResult> {
    check_strength(strength)?;
    let rho = ComplexMatrix::from_real_rows([[0.5, strength], [strength, 0.5]]);
    // quarter turn about y: exp(+iσ_y π/4)
    let u = unitary_exp(&HermitianOperator::new_unchecked(sigma_y()), -core::f64::consts::FRAC_PI_4);
    let out = rho.conjugate_by(&u);
    let energy = |m: &ComplexMatrix| 0.5 * (m[(EXCITED, EXCITED)].re - m[(GROUND, GROUND)].re);
    Ok(ToyResult::new("single-spin work", strength, energy(&out) - energy(&rho)))
}

/// Energies of (spin 1, spin 2) for a two-spin state in the `δ = 1` convention.
fn two_spin_energies(m: &ComplexMatrix) -> (f64, f64) {
    let (mut e1, mut e2) = (0.0, 0.0);
    for idx in 0..4 {
        let p = m[(idx, idx)].re;
        let s1 = if idx >> 1 == EXCITED { 0.5 } else { -0.5 };
        let s2 = if idx & 1 == EXCITED { 0.5 } else { -0.5 };
        e1 += p * s1;
        e2 += p * s2;
    }
    (e1, e2)
}

/// Outcome of the two-spin exchange toy.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapOutcome {
    /// Energy gained by the second spin.
    pub heat: ToyResult,
    /// Total energy change (work).
    pub work: f64,
}

/// Half-filled degenerate block `{|ge⟩, |eg⟩}` with coherence `C`, rotated by
/// a quarter turn inside the block: spin 2 gains `Cδ`, no work is done.
pub fn two_spin_swap(strength: f64) -> Result<SwapOutcome> {
    check_strength(strength)?;
    let ge = GROUND * 2 + EXCITED;
    let eg = EXCITED * 2 + GROUND;
    let mut rho = ComplexMatrix::zeros(4, 4);
    rho[(ge, ge)] = re(0.5);
    rho[(eg, eg)] = re(0.5);
    rho[(ge, eg)] = re(strength);
    rho[(eg, ge)] = re(strength);
    let mut gen = ComplexMatrix::zeros(4, 4);
    gen[(ge, eg)] = c(0.0, 1.0);
    gen[(eg, ge)] = c(0.0, -1.0);
    let u = unitary_exp(&HermitianOperator::new_unchecked(gen), core::f64::consts::FRAC_PI_4);
    let out = rho.conjugate_by(&u);
    let (a1, a2) = two_spin_energies(&rho);
    let (b1, b2) = two_spin_energies(&out);
    Ok(SwapOutcome { heat: ToyResult::new("two-spin heat", strength, b2 - a2), work: (b1 + b2) - (a1 + a2) })
}

/// Exchange coupling between levels `a` and `b` of a 3-level block.
fn block_exchange(a: usize, b: usize) -> HermitianOperator {
    let mut m = ComplexMatrix::zeros(3, 3);
    m[(a, b)] = re(1.0);
    m[(b, a)] = re(1.0);
    HermitianOperator::new_unchecked(m)
}

/// Mediated cascade in the block `(|0₁0₂1_m⟩, |0₁1₂0_m⟩, |1₁0₂0_m⟩)` with equal
/// populations 1/3 and coherence `λe^{iα}` between the last two levels. After
/// exchanging spin 1 then spin 2 with the mediator for angle `θ`, the
/// mediator-excited level gains `λ cos α sin θ sin 2θ`.
pub fn phase_efficiency(lambda: f64, alpha: f64, theta: f64) -> Result<ToyResult> {
    const P: f64 = 1.0 / 3.0;
    if !(0.0..=P).contains(&lambda) {
        return Err(Error::invalid("lambda must lie in [0, 1/3] for a positive block"));
    }
    let mut rho = ComplexMatrix::from_diagonal(&[P, P, P]);
    let coh: C64 = C64::from_polar(lambda, alpha);
    rho[(1, 2)] = coh;
    rho[(2, 1)] = coh.conj();
    let u1 = unitary_exp(&block_exchange(0, 2), theta);
    let u2 = unitary_exp(&block_exchange(0, 1), theta);
    let out = rho.conjugate_by(&u1).conjugate_by(&u2);
    let analytic = lambda * alpha.cos() * theta.sin() * (2.0 * theta).sin();
    Ok(ToyResult::new("phase-toy shift", analytic, out[(0, 0)].re - rho[(0, 0)].re))
}

/// Threshold on `2λ cos α` for reversing the flow between a spin pair at
/// `β_s` and a mediator at `β_m` (small-angle limit).
pub fn temperature_gradient_threshold(beta_s: f64, beta_m: f64, delta: f64) -> f64 {
    reversal_threshold(beta_s, beta_m, delta)
}

/// Energy change of spin 2 after the two-step mediated cascade, for spins at
/// `β_s` carrying coherence `x/2` (so `2λ cos α = x` with α = 0) and a
/// mediator at `β_m`. Works on the full 8-level space of (1, 2, m).
pub fn mediated_energy_change(beta_s: f64, beta_m: f64, delta: f64, x: f64, theta: f64) -> f64 {
    let thermal = |b: f64| {
        ComplexMatrix::from_diagonal(&{
            let mut d = [0.0; 2];
            d[EXCITED] = excited_population(b, delta);
            d[GROUND] = ground_population(b, delta);
            d
        })
    };
    let mut pair = thermal(beta_s).kron(&thermal(beta_s));
    let lambda = x / 2.0;
    // coherence between |0₁1₂⟩ = |g e⟩ and |1₁0₂⟩ = |e g⟩
    let ge = GROUND * 2 + EXCITED;
    let eg = EXCITED * 2 + GROUND;
    pair[(ge, eg)] += re(lambda);
    pair[(eg, ge)] += re(lambda);
    let rho = pair.kron(&thermal(beta_m));

    let exchange = |k: usize| -> HermitianOperator {
        // σ₊^k σ₋^m + h.c. on (1, 2, m)
        let mut m = ComplexMatrix::zeros(8, 8);
        for idx in 0..8usize {
            let lv = [(idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
            if lv[k] == GROUND && lv[2] == EXCITED {
                let mut to = lv;
                to[k] = EXCITED;
                to[2] = GROUND;
                let j = (to[0] << 2) | (to[1] << 1) | to[2];
                m[(j, idx)] = re(1.0);
                m[(idx, j)] = re(1.0);
            }
        }
        HermitianOperator::new_unchecked(m)
    };
    let u1 = unitary_exp(&exchange(0), theta);
    let u2 = unitary_exp(&exchange(1), theta);
    let mid = rho.conjugate_by(&u1);
    let out = mid.conjugate_by(&u2);
    let e2 = |m: &ComplexMatrix| -> f64 {
        (0..8usize).map(|i| m[(i, i)].re * if (i >> 1) & 1 == EXCITED { 0.5 } else { -0.5 }).sum::<f64>() * delta
    };
    e2(&out) - e2(&mid)
}

/// Bisection for the `x = 2λ cos α` at which spin 2's energy change flips sign.
pub fn scan_gradient_threshold(beta_s: f64, beta_m: f64, delta: f64, theta: f64, tol: f64) -> (f64, f64) {
    let f = |x: f64| mediated_energy_change(beta_s, beta_m, delta, x, theta);
    let guess = temperature_gradient_threshold(beta_s, beta_m, delta);
    let (mut lo, mut hi) = (guess - 0.05, guess + 0.05);
    let (flo, fhi) = (f(lo), f(hi));
    debug_assert!(flo.signum() != fhi.signum(), "bracket does not straddle the flip");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// The ten-point grids used for toy tables.
pub fn default_grid() -> Vec<f64> {
    (0..10).map(|i| i as f64 / 18.0).collect()
}
