//! Physical objects: spin Hamiltonians, thermal states, the coherent initial
//! state and its Bohr-frequency decomposition.
//!
//! Single-qubit basis: index [`EXCITED`] = |e⟩ (σ_z = +1, energy +δ/2),
//! index [`GROUND`] = |g⟩. The two-level labels |0⟩/|1⟩ used for coherence
//! terms are bound as |0⟩ ≡ |g⟩, |1⟩ ≡ |e⟩.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math shadows this whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{re, ComplexMatrix, DensityMatrix, HermitianOperator, C64};

pub const EXCITED: usize = 0;
pub const GROUND: usize = 1;

/// Frequencies closer than this (in energy units) share a mode.
pub const MODE_RESOLUTION: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SpinChainSpec {
    n: usize,
    delta: f64,
    betas: Vec<f64>,
    beta_bath: f64,
}

impl SpinChainSpec {
    pub fn new(delta: f64, betas: Vec<f64>, beta_bath: f64) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::invalid("at least one spin is required"));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::invalid("delta must be positive and finite"));
        }
        if betas.iter().chain(core::iter::once(&beta_bath)).any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::invalid("inverse temperatures must be positive and finite"));
        }
        Ok(SpinChainSpec { n: betas.len(), delta, betas, beta_bath })
    }

    /// All spins at the same inverse temperature.
    pub fn uniform(n: usize, delta: f64, beta: f64, beta_bath: f64) -> Result<Self> {
        Self::new(delta, vec![beta; n], beta_bath)
    }

    /// Builds from temperatures rather than inverse temperatures.
    pub fn from_temperatures(delta: f64, temperatures: &[f64], bath_temperature: f64) -> Result<Self> {
        if temperatures.iter().chain(core::iter::once(&bath_temperature)).any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::invalid("temperatures must be positive and finite"));
        }
        Self::new(delta, temperatures.iter().map(|t| 1.0 / t).collect(), 1.0 / bath_temperature)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn beta(&self, k: usize) -> f64 {
        self.betas[k]
    }

    pub fn beta_bath(&self) -> f64 {
        self.beta_bath
    }

    pub fn bath_temperature(&self) -> f64 {
        1.0 / self.beta_bath
    }

    pub fn temperature(&self, k: usize) -> f64 {
        1.0 / self.betas[k]
    }
}

/// One coherence injection `c_pq = λ e^{iα}` between spins `p < q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceTerm {
    pub p: usize,
    pub q: usize,
    pub lambda: f64,
    pub alpha: f64,
}

impl CoherenceTerm {
    pub fn new(p: usize, q: usize, lambda: f64, alpha: f64) -> Self {
        CoherenceTerm { p, q, lambda, alpha }
    }

    /// Real-valued `c` (α = 0 for c ≥ 0, α = π otherwise).
    pub fn real(p: usize, q: usize, c: f64) -> Self {
        let alpha = if c < 0.0 { core::f64::consts::PI } else { 0.0 };
        CoherenceTerm { p, q, lambda: c.abs(), alpha }
    }

    pub fn coefficient(&self) -> C64 {
        C64::from_polar(self.lambda, self.alpha)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoherenceSpec {
    pub terms: Vec<CoherenceTerm>,
}

impl CoherenceSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(terms: Vec<CoherenceTerm>) -> Self {
        CoherenceSpec { terms }
    }

    /// The same real `c` on every pair of an `n`-spin chain.
    pub fn all_pairs(n: usize, c: f64) -> Self {
        let mut terms = Vec::new();
        for p in 0..n {
            for q in p + 1..n {
                terms.push(CoherenceTerm::real(p, q, c));
            }
        }
        CoherenceSpec { terms }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for t in &self.terms {
            if t.q >= n {
                return Err(Error::IndexOutOfRange { index: t.q, len: n });
            }
            if t.p >= t.q {
                return Err(Error::invalid("coherence term needs p < q"));
            }
            if !(t.lambda.is_finite() && t.lambda >= 0.0) {
                return Err(Error::invalid("coherence strength must be finite and non-negative"));
            }
            if !t.alpha.is_finite() {
                return Err(Error::invalid("coherence phase must be finite"));
            }
        }
        Ok(())
    }
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, -1.0]])
}

/// σ₊ = |e⟩⟨g|.
pub fn sigma_plus() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(EXCITED, GROUND)] = re(1.0);
    m
}

/// σ₋ = |g⟩⟨e|.
pub fn sigma_minus() -> ComplexMatrix {
    sigma_plus().adjoint()
}

/// Places a single-qubit operator at factor `k` of `total` qubits.
pub fn embed(op: &ComplexMatrix, k: usize, total: usize) -> Result<ComplexMatrix> {
    if k >= total {
        return Err(Error::IndexOutOfRange { index: k, len: total });
    }
    let left = ComplexMatrix::identity(1 << k);
    let right = ComplexMatrix::identity(1 << (total - k - 1));
    Ok(left.kron(op).kron(&right))
}

/// `(δ/2) σ_z` on factor `k` of a `total`-qubit space.
pub fn local_hamiltonian(spec: &SpinChainSpec, k: usize, total: usize) -> Result<HermitianOperator> {
    let h = embed(&sigma_z().scale_real(spec.delta / 2.0), k, total)?;
    Ok(HermitianOperator::new_unchecked(h))
}

/// `H_S = Σ_k H_k` on the `n` system spins.
pub fn system_hamiltonian(spec: &SpinChainSpec) -> HermitianOperator {
    system_hamiltonian_on(spec, spec.n)
}

/// `H_S` embedded in a space of `total ≥ n` qubits (e.g. with the bath attached).
pub fn system_hamiltonian_on(spec: &SpinChainSpec, total: usize) -> HermitianOperator {
    let diag: Vec<f64> = (0..1usize << total)
        .map(|idx| {
            (0..spec.n).map(|k| if (idx >> (total - 1 - k)) & 1 == EXCITED { 0.5 } else { -0.5 }).sum::<f64>()
                * spec.delta
        })
        .collect();
    HermitianOperator::new_unchecked(ComplexMatrix::from_diagonal(&diag))
}

/// Ground-state population `P⁰ = 1/(1 + e^{−βδ})`.
pub fn ground_population(beta: f64, delta: f64) -> f64 {
    1.0 / (1.0 + (-beta * delta).exp())
}

/// Excited-state population `P¹ = e^{−βδ}/(1 + e^{−βδ})`, accurate for large βδ.
pub fn excited_population(beta: f64, delta: f64) -> f64 {
    let x = (-beta * delta).exp();
    x / (1.0 + x)
}

fn thermal_matrix(beta: f64, delta: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(EXCITED, EXCITED)] = re(excited_population(beta, delta));
    m[(GROUND, GROUND)] = re(ground_population(beta, delta));
    m
}

/// `e^{−βH}/Z` for `H = (δ/2)σ_z`.
pub fn thermal_qubit(beta: f64, delta: f64) -> DensityMatrix {
    DensityMatrix::from_parts_unchecked(vec![2], thermal_matrix(beta, delta))
}

/// `⊗_k ρ_k^th`.
pub fn thermal_product(spec: &SpinChainSpec) -> DensityMatrix {
    let mut m = thermal_matrix(spec.betas[0], spec.delta);
    for &b in &spec.betas[1..] {
        m = m.kron(&thermal_matrix(b, spec.delta));
    }
    DensityMatrix::from_parts_unchecked(vec![2; spec.n], m)
}

/// `χ_pq`: thermal factors on the other spins times `√(P_p⁰P_p¹P_q⁰P_q¹) |0_p1_q⟩⟨1_p0_q|`.
pub fn chi_pq(spec: &SpinChainSpec, p: usize, q: usize) -> Result<ComplexMatrix> {
    if q >= spec.n {
        return Err(Error::IndexOutOfRange { index: q, len: spec.n });
    }
    if p >= q {
        return Err(Error::invalid("chi_pq needs p < q"));
    }
    let factor = |k: usize| -> ComplexMatrix {
        let (b, d) = (spec.betas[k], spec.delta);
        let amp = (ground_population(b, d) * excited_population(b, d)).sqrt();
        let mut m = ComplexMatrix::zeros(2, 2);
        if k == p {
            m[(GROUND, EXCITED)] = re(amp); // |0⟩⟨1| on p
        } else if k == q {
            m[(EXCITED, GROUND)] = re(amp); // |1⟩⟨0| on q
        } else {
            return thermal_matrix(b, d);
        }
        m
    };
    let mut out = factor(0);
    for k in 1..spec.n {
        out = out.kron(&factor(k));
    }
    Ok(out)
}

/// `ρ_S⁰ = ⊗ρ_k^th + Σ (c_pq χ_pq + h.c.)`.
pub fn initial_state(spec: &SpinChainSpec, coh: &CoherenceSpec) -> Result<DensityMatrix> {
    coh.validate(spec.n)?;
    let mut m = thermal_product(spec).into_matrix();
    for t in &coh.terms {
        let term = chi_pq(spec, t.p, t.q)?.scale(t.coefficient());
        m += &term;
        m += &term.adjoint();
    }
    DensityMatrix::qubits(spec.n, m).map_err(|e| match e {
        Error::NegativeEigenvalue { eigenvalue } => Error::PositivityViolation { eigenvalue },
        other => other,
    })
}

/// Removes every off-diagonal element in the computational (energy) basis.
///
/// Degenerate blocks are dephased too, so the relative entropy of coherence
/// registers the coherence injected by [`initial_state`].
pub fn dephase(rho: &DensityMatrix, h: &HermitianOperator) -> DensityMatrix {
    assert_eq!(rho.dim(), h.dim(), "dephase: dimension mismatch");
    let m = rho.matrix();
    let d = ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| if i == j { re(m[(i, i)].re) } else { re(0.0) });
    DensityMatrix::from_parts_unchecked(rho.dims().to_vec(), d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub omega: f64,
    pub matrix: ComplexMatrix,
}

/// `ρ = Σ_ω ρ(ω)`, modes sorted by ascending ω.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDecomposition {
    pub modes: Vec<Mode>,
}

impl ModeDecomposition {
    pub fn frequencies(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.omega).collect()
    }

    pub fn mode(&self, omega: f64) -> Option<&ComplexMatrix> {
        let key = mode_key(omega);
        self.modes.iter().find(|m| mode_key(m.omega) == key).map(|m| &m.matrix)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut it = self.modes.iter();
        let mut acc = it.next().expect("at least one mode").matrix.clone();
        for m in it {
            acc += &m.matrix;
        }
        acc
    }
}

fn mode_key(omega: f64) -> i64 {
    (omega / MODE_RESOLUTION).round() as i64
}

/// Buckets element (p, q) into mode `ω = E_p − E_q` of the diagonal Hamiltonian `h`.
pub fn mode_decompose(rho: &DensityMatrix, h: &HermitianOperator) -> ModeDecomposition {
    assert_eq!(rho.dim(), h.dim(), "mode_decompose: dimension mismatch");
    let energies = h.diagonal_real();
    let d = rho.dim();
    let mut buckets: BTreeMap<i64, (f64, ComplexMatrix)> = BTreeMap::new();
    for i in 0..d {
        for j in 0..d {
            let omega = energies[i] - energies[j];
            let entry = buckets.entry(mode_key(omega)).or_insert_with(|| (omega, ComplexMatrix::zeros(d, d)));
            entry.1[(i, j)] = rho.matrix()[(i, j)];
        }
    }
    ModeDecomposition {
        modes: buckets
            .into_values()
            .map(|(omega, matrix)| Mode { omega: (omega / MODE_RESOLUTION).round() * MODE_RESOLUTION, matrix })
            .collect(),
    }
}

/// Computational-basis index of a product state given per-spin levels.
pub fn basis_index(levels: &[usize]) -> usize {
    levels.iter().fold(0, |acc, &l| acc * 2 + l)
}
