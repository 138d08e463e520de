mod common;

use common::entries;
use heatflow_core::collision::{run_collision, run_trajectory, CollisionConfig, Generator, TrajectoryRecord};
use heatflow_core::linalg::{partial_trace, unitary_exp};
use heatflow_core::model::{
    initial_state, local_hamiltonian, system_hamiltonian, thermal_product, CoherenceSpec, CoherenceTerm, SpinChainSpec,
};
use heatflow_core::thermo::{free_energy, populations, subsystem_energy};
use heatflow_core::{ComplexMatrix, DensityMatrix, C64};
use proptest::prelude::*;

fn fig3_spec() -> SpinChainSpec {
    SpinChainSpec::uniform(3, 1.0, 1.0, 1.0 / 0.9).unwrap()
}

fn fig3_config() -> CollisionConfig {
    CollisionConfig::cascade(3, 20.0, 0.01, 100)
}

fn energy_changes(traj: &TrajectoryRecord, spec: &SpinChainSpec) -> Vec<f64> {
    let (a, b) = (&traj.system_states[0], traj.final_system_state());
    (0..spec.n()).map(|k| subsystem_energy(b, spec, k).unwrap() - subsystem_energy(a, spec, k).unwrap()).collect()
}

fn fig3(c: f64) -> (Vec<f64>, f64) {
    let spec = fig3_spec();
    let traj = run_trajectory(&spec, &CoherenceSpec::all_pairs(3, c), &fig3_config()).unwrap();
    (energy_changes(&traj, &spec), traj.snapshots.last().unwrap().bath_energy_change)
}

#[test]
fn thermal_contact_without_coherence_cools_every_spin() {
    let (de, q) = fig3(0.0);
    assert!(de.iter().all(|&e| e < 0.0), "{de:?}");
    assert!(q > 0.0);
}

#[test]
fn negative_coherence_reverses_later_spins() {
    let (de, _) = fig3(-0.5);
    assert!(de[0] < 0.0 && de[1] > 0.0 && de[2] > 0.0, "{de:?}");
    assert!(de[2].abs() > de[1].abs());
}

#[test]
fn positive_coherence_enhances_release() {
    let (de, q) = fig3(0.5);
    let (_, q0) = fig3(0.0);
    assert!(de[1] < 0.0 && de[2] < 0.0, "{de:?}");
    assert!(q.abs() > q0.abs());
}

#[test]
fn hotter_spin_absorbs_while_colder_releases() {
    let spec = SpinChainSpec::from_temperatures(1.0, &[1.0, 1.0, 0.8], 0.9).unwrap();
    let coh = CoherenceSpec::new(vec![
        CoherenceTerm::real(0, 1, -0.5),
        CoherenceTerm::real(1, 2, 0.5),
        CoherenceTerm::real(0, 2, 0.5),
    ]);
    let traj = run_trajectory(&spec, &coh, &fig3_config()).unwrap();
    let de = energy_changes(&traj, &spec);
    assert!(de[1] > 0.0 && de[2] < 0.0, "{de:?}");
}

#[test]
fn reversing_the_order_flips_the_middle_spin() {
    let spec = fig3_spec();
    let coh = CoherenceSpec::new(vec![
        CoherenceTerm::real(0, 1, -0.5),
        CoherenceTerm::real(0, 2, -0.1),
        CoherenceTerm::real(1, 2, 0.5),
    ]);
    let forward = run_trajectory(&spec, &coh, &fig3_config()).unwrap();
    let backward = run_trajectory(&spec, &coh, &fig3_config().with_order(vec![2, 1, 0])).unwrap();
    let (f, b) = (energy_changes(&forward, &spec)[1], energy_changes(&backward, &spec)[1]);
    assert!(f * b < 0.0, "forward {f}, backward {b}");
}

#[test]
fn every_sub_interaction_conserves_local_plus_bath_energy() {
    let spec = fig3_spec();
    let traj = run_trajectory(&spec, &CoherenceSpec::all_pairs(3, -0.5), &fig3_config()).unwrap();
    for snap in &traj.snapshots[1..] {
        let k = snap.spin.unwrap();
        let pre = traj.pre_state(snap.step).unwrap();
        let e =
            |rho: &DensityMatrix| subsystem_energy(rho, &spec, k).unwrap() + subsystem_energy(rho, &spec, 3).unwrap();
        assert!((e(&snap.joint) - e(&pre)).abs() < 1e-12, "step {}", snap.step);
        assert!(snap.joint.min_eigenvalue() >= -1e-10);
        assert!((snap.joint.matrix().trace().re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn first_law_closes_at_every_snapshot() {
    let spec = fig3_spec();
    let traj = run_trajectory(&spec, &CoherenceSpec::all_pairs(3, 0.5), &fig3_config()).unwrap();
    let h = system_hamiltonian(&spec);
    let e0 = h.expectation(traj.system_states[0].matrix());
    for snap in &traj.snapshots {
        let de = h.expectation(snap.system_state().matrix()) - e0;
        assert!((de + snap.bath_energy_change).abs() < 1e-10, "step {}", snap.step);
    }
}

#[test]
fn free_energy_never_increases_across_collisions() {
    let spec = fig3_spec();
    let h = system_hamiltonian(&spec);
    for c in [0.0, -0.5, 0.5] {
        let traj = run_trajectory(&spec, &CoherenceSpec::all_pairs(3, c), &fig3_config()).unwrap();
        let f: Vec<f64> = traj.system_states.iter().map(|r| free_energy(r, &h, spec.bath_temperature())).collect();
        assert!(f.windows(2).all(|w| w[1] <= w[0] + 1e-10), "c = {c}");
    }
}

#[test]
fn zero_coupling_leaves_the_system_alone() {
    let spec = fig3_spec();
    let cfg = CollisionConfig { g: 0.0, ..fig3_config() };
    let traj = run_trajectory(&spec, &CoherenceSpec::all_pairs(3, -0.5), &cfg).unwrap();
    // each collision applies e^{−iτH_k} once per spin, i.e. e^{−iτH_S}, which
    // leaves the degenerate coherence of the initial state untouched
    let rho0 = &traj.system_states[0];
    for rho in &traj.system_states {
        assert!(rho.matrix().max_abs_diff(rho0.matrix()) < 1e-12);
    }
}

#[test]
fn first_spin_ignores_coherence() {
    let spec = fig3_spec();
    let plain = run_trajectory(&spec, &CoherenceSpec::empty(), &fig3_config()).unwrap();
    let coherent = run_trajectory(&spec, &CoherenceSpec::all_pairs(3, -0.5), &fig3_config()).unwrap();
    for (a, b) in plain.snapshots.iter().zip(&coherent.snapshots) {
        let ea = subsystem_energy(&a.joint, &spec, 0).unwrap();
        let eb = subsystem_energy(&b.joint, &spec, 0).unwrap();
        assert!((ea - eb).abs() < 1e-10, "step {}", a.step);
    }
}

#[test]
fn generators_agree_without_coherence() {
    let spec = SpinChainSpec::from_temperatures(1.0, &[1.0, 1.3, 0.7], 0.9).unwrap();
    let rho = thermal_product(&spec);
    let cfg = CollisionConfig::cascade(3, 20.0, 0.01, 5).with_order(vec![1, 2, 0]);
    let run = |g| {
        let c = cfg.clone().with_generator(g);
        heatflow_core::collision::CollisionEngine::new(&spec, &c).unwrap().run_from(&rho).unwrap()
    };
    let (full, bare) = (run(Generator::Full), run(Generator::InteractionOnly));
    for (a, b) in full.snapshots.iter().zip(&bare.snapshots) {
        for i in 0..16 {
            assert!((a.joint.matrix()[(i, i)] - b.joint.matrix()[(i, i)]).norm() < 1e-10, "step {}", a.step);
        }
    }
}

/// With free terms only on the interacting spin, spin `order[j]` is ahead in
/// phase by `(n − j)τ` after one collision; pre-rotating by that amount makes
/// the interaction-only generator reproduce the populations.
#[test]
fn generators_agree_after_free_phase_correction() {
    let spec = fig3_spec();
    let coh = CoherenceSpec::new(vec![
        CoherenceTerm::new(0, 1, 0.4, 0.3),
        CoherenceTerm::new(1, 2, 0.3, 2.0),
        CoherenceTerm::new(0, 2, 0.2, -1.1),
    ]);
    let rho = initial_state(&spec, &coh).unwrap();
    for order in [vec![0, 1, 2], vec![2, 0, 1], vec![1, 2, 0]] {
        let cfg = CollisionConfig::cascade(3, 20.0, 0.01, 1).with_order(order.clone());
        let full = run_collision(&rho, &spec, &cfg).unwrap().system;
        let mut r = ComplexMatrix::identity(8);
        for (j, &k) in order.iter().enumerate() {
            let shift = cfg.tau * (order.len() - j) as f64;
            r = unitary_exp(&local_hamiltonian(&spec, k, 3).unwrap(), shift).matmul(&r);
        }
        let rotated = rho.evolve(&r).unwrap();
        let bare =
            run_collision(&rotated, &spec, &cfg.clone().with_generator(Generator::InteractionOnly)).unwrap().system;
        for i in 0..8 {
            assert!((full.matrix()[(i, i)] - bare.matrix()[(i, i)]).norm() < 1e-10, "{order:?}");
        }
        let unrotated =
            run_collision(&rho, &spec, &cfg.clone().with_generator(Generator::InteractionOnly)).unwrap().system;
        let spread = (0..3)
            .map(|k| (populations(&full, k).unwrap().0 - populations(&unrotated, k).unwrap().0).abs())
            .fold(0.0, f64::max);
        assert!(spread > 1e-6, "phase correction should matter for {order:?}");
    }
}

/// Thermal diagonal part plus coherence between levels of different energy.
fn with_nondegenerate_coherence(xs: &[f64]) -> (DensityMatrix, DensityMatrix) {
    let spec = SpinChainSpec::from_temperatures(1.0, &[1.0, 0.8], 0.9).unwrap();
    let diag = thermal_product(&spec);
    let energies = system_hamiltonian(&spec).diagonal_real();
    let mut x = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in i + 1..4 {
            if (energies[i] - energies[j]).abs() > 1e-9 {
                let z = C64::new(xs[2 * (4 * i + j)], xs[2 * (4 * i + j) + 1]);
                x[(i, j)] = z;
                x[(j, i)] = z.conj();
            }
        }
    }
    // keep ρ positive: ‖X‖₂ ≤ ‖X‖_F ≤ 0.9 λ_min(D)
    let lmin = diag.min_eigenvalue();
    let scale = 0.9 * lmin / x.frobenius_norm().max(1e-300);
    let m = &diag.matrix().clone() + &x.scale_real(scale.min(1.0));
    (DensityMatrix::qubits(2, m).unwrap(), diag)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn nondegenerate_coherence_cannot_move_heat(xs in entries(4), tau in 0.001..0.5f64) {
        let (rho, diag) = with_nondegenerate_coherence(&xs);
        let spec = SpinChainSpec::from_temperatures(1.0, &[1.0, 0.8], 0.9).unwrap();
        let cfg = CollisionConfig::cascade(2, 20.0, tau, 1);
        let a = run_collision(&rho, &spec, &cfg).unwrap().system;
        let b = run_collision(&diag, &spec, &cfg).unwrap().system;
        for i in 0..4 {
            prop_assert!((a.matrix()[(i, i)].re - b.matrix()[(i, i)].re).abs() < 1e-10);
        }
    }

    #[test]
    fn snapshots_stay_physical(lambda in 0.0..0.5f64, alpha in 0.0..6.3f64, order_seed in 0usize..6) {
        let spec = fig3_spec();
        let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let coh = CoherenceSpec::new(vec![CoherenceTerm::new(0, 2, lambda, alpha)]);
        let cfg = CollisionConfig::cascade(3, 20.0, 0.01, 10).with_order(orders[order_seed].to_vec());
        let traj = run_trajectory(&spec, &coh, &cfg).unwrap();
        for snap in &traj.snapshots {
            prop_assert!(snap.joint.min_eigenvalue() >= -1e-10);
            let bath = partial_trace(&snap.joint, &[3]).unwrap();
            prop_assert!((bath.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }
}
