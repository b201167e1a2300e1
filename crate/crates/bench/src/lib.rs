//! Shared fixtures for the criterion benchmarks: the planar test problem
//! and a small heat problem, sized so a single iteration is representative.

use num_complex::Complex64;
use std::f64::consts::PI;
use wcperiod_core::{
    ComplexMatrix, DiagonalGenerator, GreenKernelODE, NormKind, PeriodicitySpec,
};

pub fn planar_matrix() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![2.0, -4.0], vec![6.0, -8.0]]).unwrap()
}

pub fn planar_kernel() -> GreenKernelODE {
    let spec = PeriodicitySpec::new(PI, Complex64::new(-1.0, 0.0), NormKind::L2).unwrap();
    GreenKernelODE::new(planar_matrix(), spec).unwrap()
}

pub fn antiperiodic_spec() -> PeriodicitySpec {
    PeriodicitySpec::new(PI, Complex64::new(-1.0, 0.0), NormKind::L2).unwrap()
}

pub fn small_heat_generator() -> DiagonalGenerator {
    DiagonalGenerator::heat_dirichlet(8).unwrap()
}
