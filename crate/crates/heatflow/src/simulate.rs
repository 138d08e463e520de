//! Runs a validated scenario through either engine and collects CSV rows.

use heatflow_core::collision::{CollisionConfig, CollisionEngine, TrajectoryRecord};
use heatflow_core::lindblad::{integrate, LindbladTrajectory};
use heatflow_core::model::{initial_state, system_hamiltonian, CoherenceSpec, SpinChainSpec};
use heatflow_core::thermo::{observe, observe_state, subsystem_energy};
use heatflow_core::DensityMatrix;

use crate::config::Scenario;
use crate::error::{numerical, CliError};
use crate::output::Row;

/// RK4 steps per collision for the master equation.
pub const LINDBLAD_SUBSTEPS: usize = 10;

pub fn collision_trajectory(
    spec: &SpinChainSpec,
    coh: &CoherenceSpec,
    cfg: &CollisionConfig,
) -> Result<TrajectoryRecord, CliError> {
    let rho0 = initial_state(spec, coh).map_err(|e| CliError::Validation(e.to_string()))?;
    CollisionEngine::new(spec, cfg).and_then(|e| e.run_from(&rho0)).map_err(numerical)
}

pub fn lindblad_trajectory(
    spec: &SpinChainSpec,
    coh: &CoherenceSpec,
    cfg: &CollisionConfig,
) -> Result<LindbladTrajectory, CliError> {
    let rho0 = initial_state(spec, coh).map_err(|e| CliError::Validation(e.to_string()))?;
    let t_end = cfg.n_collisions as f64 * cfg.tau;
    integrate(&rho0, spec, cfg, t_end, cfg.tau / LINDBLAD_SUBSTEPS as f64).map_err(numerical)
}

pub fn collision_rows(scenario: &Scenario, traj: &TrajectoryRecord) -> Result<Vec<Row>, CliError> {
    traj.snapshots
        .iter()
        .map(|s| {
            Ok(Row { step: s.step, time: s.time, obs: observe(s, &scenario.spec, &traj.order).map_err(numerical)? })
        })
        .collect()
}

/// One row per collision boundary; `step` counts sub-interactions as in the
/// collision CSV, and `Q_bath` is `−ΔE_S` by energy balance.
pub fn lindblad_rows(scenario: &Scenario, traj: &LindbladTrajectory) -> Result<Vec<Row>, CliError> {
    let spec = &scenario.spec;
    let h = system_hamiltonian(spec);
    let e0 = h.expectation(traj.states[0].matrix());
    let per = scenario.collision.steps_per_collision();
    traj.states
        .iter()
        .zip(&traj.times)
        .enumerate()
        .map(|(j, (rho, &t))| {
            let q = e0 - h.expectation(rho.matrix());
            let obs = observe_state(rho, None, q, spec, &scenario.collision.order).map_err(numerical)?;
            Ok(Row { step: j * per, time: t, obs })
        })
        .collect()
}

/// Net changes between the first and last recorded system states.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub energy_changes: Vec<f64>,
    pub heat_to_bath: f64,
    pub free_energy_change: f64,
    pub coherence_change: f64,
}

impl Summary {
    pub fn from_rows(rows: &[Row]) -> Self {
        let (a, b) = (&rows[0].obs, &rows[rows.len() - 1].obs);
        Summary {
            energy_changes: a.energies.iter().zip(&b.energies).map(|(x, y)| y - x).collect(),
            heat_to_bath: b.bath_energy_change - a.bath_energy_change,
            free_energy_change: b.free_energy - a.free_energy,
            coherence_change: b.coherence - a.coherence,
        }
    }

    pub fn describe(&self, label: &str) -> String {
        let de: Vec<String> =
            self.energy_changes.iter().enumerate().map(|(k, d)| format!("dE_{}={:+.6e}", k + 1, d)).collect();
        format!(
            "{label}: {} Q_bath={:+.6e} dF={:+.6e} dC={:+.6e}",
            de.join(" "),
            self.heat_to_bath,
            self.free_energy_change,
            self.coherence_change
        )
    }
}

/// Per-spin energies of a system state.
pub fn energies(rho: &DensityMatrix, spec: &SpinChainSpec) -> Result<Vec<f64>, CliError> {
    (0..spec.n()).map(|k| subsystem_energy(rho, spec, k).map_err(numerical)).collect()
}
