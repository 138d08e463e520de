//! Repeated-interaction dynamics.
//!
//! Each collision attaches a fresh bath qubit (factor index `n`) in its
//! thermal state, lets the system spins interact with it, then discards it.
//! In the cascade variant the spins interact one at a time in the configured
//! order; in the simultaneous variant all couplings act at once.
//!
//! One full collision spans physical time `τ`: a cascade snapshot after
//! sub-interaction `s` sits at `t = s·τ/n`, a simultaneous one at `t = c·τ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{partial_trace, unitary_exp, ComplexMatrix, DensityMatrix, HermitianOperator};
use crate::model::{
    embed, local_hamiltonian, sigma_minus, sigma_plus, system_hamiltonian_on, thermal_qubit, SpinChainSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    #[default]
    Cascade,
    Simultaneous,
}

/// Which Hamiltonian generates each interaction unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Generator {
    /// `H_k + H_R + H_{kR}`: free evolution included.
    #[default]
    Full,
    /// `H_{kR}` alone.
    InteractionOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionConfig {
    pub g: f64,
    pub tau: f64,
    /// Permutation of `0..n`; position 0 interacts first.
    pub order: Vec<usize>,
    pub variant: Variant,
    pub n_collisions: usize,
    pub generator: Generator,
}

impl CollisionConfig {
    /// Cascade in natural order with the full generator.
    pub fn cascade(n: usize, g: f64, tau: f64, n_collisions: usize) -> Self {
        CollisionConfig {
            g,
            tau,
            order: (0..n).collect(),
            variant: Variant::Cascade,
            n_collisions,
            generator: Generator::Full,
        }
    }

    pub fn with_order(mut self, order: Vec<usize>) -> Self {
        self.order = order;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_generator(mut self, generator: Generator) -> Self {
        self.generator = generator;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.g * self.tau).is_finite() || !self.g.is_finite() || !self.tau.is_finite() {
            return Err(Error::invalid("g and tau must be finite"));
        }
        if self.tau < 0.0 {
            return Err(Error::invalid("tau must be non-negative"));
        }
        if self.n_collisions == 0 {
            return Err(Error::invalid("at least one collision is required"));
        }
        let mut seen = vec![false; n];
        if self.order.len() != n {
            return Err(Error::invalid("order must list every spin exactly once"));
        }
        for &k in &self.order {
            if k >= n {
                return Err(Error::IndexOutOfRange { index: k, len: n });
            }
            if seen[k] {
                return Err(Error::invalid("order must list every spin exactly once"));
            }
            seen[k] = true;
        }
        Ok(())
    }

    /// Position of spin `k` in the interaction order.
    pub fn position(&self, k: usize) -> Option<usize> {
        self.order.iter().position(|&x| x == k)
    }

    /// Sub-interactions per collision.
    pub fn steps_per_collision(&self) -> usize {
        match self.variant {
            Variant::Cascade => self.order.len(),
            Variant::Simultaneous => 1,
        }
    }
}

/// `g(σ₊^k σ₋^R + σ₋^k σ₊^R)` on `n` spins plus the bath at index `n`.
pub fn interaction_hamiltonian(k: usize, n: usize, g: f64) -> Result<HermitianOperator> {
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, len: n });
    }
    let total = n + 1;
    let a = embed(&sigma_plus(), k, total)?.matmul(&embed(&sigma_minus(), n, total)?);
    let h = &a + &a.adjoint();
    Ok(HermitianOperator::new_unchecked(h.scale_real(g)))
}

fn bath_hamiltonian(spec: &SpinChainSpec) -> HermitianOperator {
    local_hamiltonian(spec, spec.n(), spec.n() + 1).expect("bath index is in range")
}

/// Generator of the sub-interaction of spin `k` under `config.generator`.
pub fn interaction_generator(spec: &SpinChainSpec, k: usize, config: &CollisionConfig) -> Result<HermitianOperator> {
    let n = spec.n();
    let v = interaction_hamiltonian(k, n, config.g)?;
    Ok(match config.generator {
        Generator::InteractionOnly => v,
        Generator::Full => v.add(&local_hamiltonian(spec, k, n + 1)?).add(&bath_hamiltonian(spec)),
    })
}

/// `exp(−iτ(H_k + H_R + H_{kR}))` (or `exp(−iτH_{kR})`).
pub fn interaction_unitary(spec: &SpinChainSpec, k: usize, config: &CollisionConfig) -> Result<ComplexMatrix> {
    Ok(unitary_exp(&interaction_generator(spec, k, config)?, config.tau))
}

/// `exp(−iτ(H_S + H_R + Σ_k H_{kR}))` (or `exp(−iτ Σ_k H_{kR})`).
pub fn simultaneous_unitary(spec: &SpinChainSpec, config: &CollisionConfig) -> Result<ComplexMatrix> {
    let n = spec.n();
    let mut h = interaction_hamiltonian(0, n, config.g)?;
    for k in 1..n {
        h = h.add(&interaction_hamiltonian(k, n, config.g)?);
    }
    if config.generator == Generator::Full {
        h = h.add(&system_hamiltonian_on(spec, n + 1)).add(&bath_hamiltonian(spec));
    }
    Ok(unitary_exp(&h, config.tau))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    /// Sub-interactions completed so far (0 for the initial snapshot).
    pub step: usize,
    /// 1-based collision index (0 for the initial snapshot).
    pub collision: usize,
    /// Spin that just interacted (cascade only).
    pub spin: Option<usize>,
    /// Physical time in 1/δ.
    pub time: f64,
    /// Joint state of the system and the current bath qubit.
    pub joint: DensityMatrix,
    /// Cumulative bath energy change, summed over discarded bath qubits.
    pub bath_energy_change: f64,
}

impl Snapshot {
    pub fn system_state(&self) -> DensityMatrix {
        let n = self.joint.n_subsystems() - 1;
        partial_trace(&self.joint, &(0..n).collect::<Vec<_>>()).expect("system factors are in range")
    }

    pub fn bath_state(&self) -> DensityMatrix {
        let n = self.joint.n_subsystems() - 1;
        partial_trace(&self.joint, &[n]).expect("bath factor is in range")
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub variant: Variant,
    pub order: Vec<usize>,
    pub steps_per_collision: usize,
    /// The fresh bath state attached at the start of every collision.
    pub bath: DensityMatrix,
    /// Initial snapshot followed by one per sub-interaction.
    pub snapshots: Vec<Snapshot>,
    /// System state after each refresh; entry 0 is the initial state.
    pub system_states: Vec<DensityMatrix>,
}

impl TrajectoryRecord {
    pub fn n_collisions(&self) -> usize {
        self.system_states.len() - 1
    }

    /// Joint state at the start of collision `c` (1-based): system ⊗ fresh bath.
    pub fn collision_start(&self, c: usize) -> Result<DensityMatrix> {
        if c == 0 || c > self.n_collisions() {
            return Err(Error::MissingSnapshots(alloc::format!("no collision {c}")));
        }
        Ok(self.system_states[c - 1].tensor(&self.bath))
    }

    /// Joint states of collision `c`: start, then after each sub-interaction.
    pub fn collision_states(&self, c: usize) -> Result<Vec<DensityMatrix>> {
        let mut out = vec![self.collision_start(c)?];
        let first = (c - 1) * self.steps_per_collision + 1;
        for s in first..first + self.steps_per_collision {
            let snap = self
                .snapshots
                .get(s)
                .ok_or_else(|| Error::MissingSnapshots(alloc::format!("step {s} not recorded")))?;
            out.push(snap.joint.clone());
        }
        Ok(out)
    }

    /// Joint state right before sub-interaction `step` (1-based).
    pub fn pre_state(&self, step: usize) -> Result<DensityMatrix> {
        if step == 0 || step >= self.snapshots.len() {
            return Err(Error::MissingSnapshots(alloc::format!("step {step} not recorded")));
        }
        if (step - 1).is_multiple_of(self.steps_per_collision) {
            self.collision_start(self.snapshots[step].collision)
        } else {
            Ok(self.snapshots[step - 1].joint.clone())
        }
    }

    pub fn final_system_state(&self) -> &DensityMatrix {
        self.system_states.last().expect("initial state always recorded")
    }
}

/// Precomputed unitaries for one `(spec, config)` pair.
#[derive(Debug, Clone)]
pub struct CollisionEngine {
    spec: SpinChainSpec,
    config: CollisionConfig,
    /// One unitary per order position (cascade) or a single one (simultaneous).
    unitaries: Vec<ComplexMatrix>,
    bath: DensityMatrix,
    bath_h: HermitianOperator,
}

/// Result of one collision, with steps and times counted from the collision start.
#[derive(Debug, Clone)]
pub struct CollisionOutcome {
    pub system: DensityMatrix,
    pub snapshots: Vec<Snapshot>,
    pub bath_energy_change: f64,
}

impl CollisionEngine {
    pub fn new(spec: &SpinChainSpec, config: &CollisionConfig) -> Result<Self> {
        config.validate(spec.n())?;
        let unitaries = match config.variant {
            Variant::Cascade => {
                config.order.iter().map(|&k| interaction_unitary(spec, k, config)).collect::<Result<Vec<_>>>()?
            }
            Variant::Simultaneous => vec![simultaneous_unitary(spec, config)?],
        };
        Ok(CollisionEngine {
            spec: spec.clone(),
            config: config.clone(),
            unitaries,
            bath: thermal_qubit(spec.beta_bath(), spec.delta()),
            bath_h: local_hamiltonian(spec, 0, 1)?,
        })
    }

    pub fn spec(&self) -> &SpinChainSpec {
        &self.spec
    }

    pub fn config(&self) -> &CollisionConfig {
        &self.config
    }

    pub fn bath_state(&self) -> &DensityMatrix {
        &self.bath
    }

    fn bath_energy(&self, joint: &DensityMatrix) -> f64 {
        let n = self.spec.n();
        let r = partial_trace(joint, &[n]).expect("bath factor is in range");
        self.bath_h.expectation(r.matrix())
    }

    fn collide(&self, state_s: &DensityMatrix, collision: usize, step0: usize, q0: f64) -> Result<CollisionOutcome> {
        let n = self.spec.n();
        if state_s.dims() != vec![2; n].as_slice() {
            return Err(Error::DimensionMismatch { expected: 1 << n, found: state_s.dim() });
        }
        let mut joint = state_s.tensor(&self.bath);
        let e_r0 = self.bath_energy(&joint);
        let per = self.config.steps_per_collision();
        let dt = self.config.tau / per as f64;
        let mut snapshots = Vec::with_capacity(per);
        for (pos, u) in self.unitaries.iter().enumerate() {
            joint = joint.evolve(u)?;
            let step = step0 + pos + 1;
            snapshots.push(Snapshot {
                step,
                collision,
                spin: match self.config.variant {
                    Variant::Cascade => Some(self.config.order[pos]),
                    Variant::Simultaneous => None,
                },
                time: step as f64 * dt,
                bath_energy_change: q0 + self.bath_energy(&joint) - e_r0,
                joint: joint.clone(),
            });
        }
        let system = partial_trace(&joint, &(0..n).collect::<Vec<_>>())?;
        let bath_energy_change = snapshots.last().map_or(q0, |s| s.bath_energy_change);
        Ok(CollisionOutcome { system, snapshots, bath_energy_change })
    }

    /// One collision on `state_s` with a fresh bath qubit.
    pub fn run_collision(&self, state_s: &DensityMatrix) -> Result<CollisionOutcome> {
        self.collide(state_s, 1, 0, 0.0)
    }

    /// `n_collisions` collisions starting from `state_s`.
    pub fn run_from(&self, state_s: &DensityMatrix) -> Result<TrajectoryRecord> {
        let initial_joint = state_s.tensor(&self.bath);
        let mut snapshots = vec![Snapshot {
            step: 0,
            collision: 0,
            spin: None,
            time: 0.0,
            joint: initial_joint,
            bath_energy_change: 0.0,
        }];
        let mut system_states = vec![state_s.clone()];
        let per = self.config.steps_per_collision();
        let mut q = 0.0;
        for c in 1..=self.config.n_collisions {
            let out = self.collide(system_states.last().expect("nonempty"), c, (c - 1) * per, q)?;
            q = out.bath_energy_change;
            snapshots.extend(out.snapshots);
            system_states.push(out.system);
        }
        Ok(TrajectoryRecord {
            variant: self.config.variant,
            order: self.config.order.clone(),
            steps_per_collision: per,
            bath: self.bath.clone(),
            snapshots,
            system_states,
        })
    }
}

/// Convenience: one collision without building an engine explicitly.
pub fn run_collision(
    state_s: &DensityMatrix,
    spec: &SpinChainSpec,
    config: &CollisionConfig,
) -> Result<CollisionOutcome> {
    CollisionEngine::new(spec, config)?.run_collision(state_s)
}

/// Full trajectory from the coherent initial state.
pub fn run_trajectory(
    spec: &SpinChainSpec,
    coh: &crate::model::CoherenceSpec,
    config: &CollisionConfig,
) -> Result<TrajectoryRecord> {
    let rho0 = crate::model::initial_state(spec, coh)?;
    CollisionEngine::new(spec, config)?.run_from(&rho0)
}
