#![allow(dead_code)]

use heatflow_core::{ComplexMatrix, DensityMatrix, C64};
use proptest::prelude::*;

/// `2·d²` uniform reals in [−1, 1], enough for one complex d×d matrix.
pub fn entries(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 2 * d * d)
}

pub fn complex_from(d: usize, xs: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| C64::new(xs[2 * (i * d + j)], xs[2 * (i * d + j) + 1]))
}

pub fn hermitian_from(d: usize, xs: &[f64]) -> ComplexMatrix {
    complex_from(d, xs).hermitian_part()
}

/// `G G† / tr(G G†)`: a full-rank random state (almost surely).
pub fn density_from(n_qubits: usize, xs: &[f64]) -> DensityMatrix {
    let d = 1 << n_qubits;
    let g = complex_from(d, xs);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::qubits(n_qubits, m.scale_real(1.0 / tr).hermitian_part()).unwrap()
}
