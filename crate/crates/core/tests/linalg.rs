mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use wcperiod_core::linalg::invert;
use wcperiod_core::nonlin::SplitMix64;
use wcperiod_core::{
    induced_norm, matrix_exponential, nonresonance_resolvent, spectrum, vector_norm,
    ComplexMatrix, Error, NormKind, DEFAULT_MARGIN_TOL,
};

fn random_matrix(rng: &mut SplitMix64, dim: usize, scale: f64) -> ComplexMatrix {
    let entries: Vec<Complex64> = (0..dim * dim)
        .map(|_| {
            Complex64::new(
                scale * (2.0 * rng.next_f64() - 1.0),
                scale * (2.0 * rng.next_f64() - 1.0),
            )
        })
        .collect();
    ComplexMatrix::new(dim, entries).unwrap()
}

#[test]
fn spectrum_of_planar_example() {
    let mut eig = spectrum(&planar_matrix()).unwrap();
    eig.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    assert_eq!(eig.len(), 2);
    assert!((eig[0] - re(-4.0)).norm() <= 1e-10, "got {}", eig[0]);
    assert!((eig[1] - re(-2.0)).norm() <= 1e-10, "got {}", eig[1]);
}

#[test]
fn spectrum_of_conjugated_diagonal() {
    // A = P D P^{-1} with known D; the spectrum must come back as a set.
    let p = ComplexMatrix::from_real_rows(&[
        vec![1.0, 2.0, 0.0],
        vec![0.0, 1.0, 1.0],
        vec![1.0, 0.0, 1.0],
    ])
    .unwrap();
    let lam = [
        Complex64::new(1.0, 2.0),
        Complex64::new(-0.5, 0.0),
        Complex64::new(3.0, 0.0),
    ];
    let mut d = ComplexMatrix::zeros(3);
    for (i, &l) in lam.iter().enumerate() {
        d.set(i, i, l);
    }
    let a = p.mul(&d).mul(&invert(&p).unwrap());
    let mut eig = spectrum(&a).unwrap();
    let mut expected = lam.to_vec();
    let key = |z: &Complex64| (z.re, z.im);
    eig.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    expected.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    for (got, want) in eig.iter().zip(&expected) {
        assert!((got - want).norm() <= 1e-8, "got {got}, want {want}");
    }
}

#[test]
fn exponential_closed_forms() {
    // Nilpotent block: e^{tN} = I + tN.
    let n = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
    let e = matrix_exponential(&n, 0.7).unwrap();
    assert!(max_entry_diff(&e, &[[1.0, 0.7], [0.0, 1.0]]) <= 1e-14);

    // Rotation generator: e^{tJ} is the rotation by angle t.
    let j = ComplexMatrix::from_real_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
    let t = 0.9;
    let e = matrix_exponential(&j, t).unwrap();
    let reference = [[t.cos(), -t.sin()], [t.sin(), t.cos()]];
    assert!(max_entry_diff(&e, &reference) <= 1e-14);

    // Planar example over a full window, against the eigendecomposition.
    let e = matrix_exponential(&planar_matrix(), PI).unwrap();
    assert!(max_entry_diff(&e, &planar_exponential(PI)) <= 1e-14);
}

#[test]
fn exponential_group_properties() {
    let mut rng = SplitMix64::new(0x51a3);
    for _ in 0..20 {
        let dim = 1 + (rng.next_u64() % 4) as usize;
        let a = random_matrix(&mut rng, dim, 1.0);
        let s = 0.2 + rng.next_f64();
        let t = 0.2 + rng.next_f64();
        let both = matrix_exponential(&a, s + t).unwrap();
        let split = matrix_exponential(&a, s)
            .unwrap()
            .mul(&matrix_exponential(&a, t).unwrap());
        assert!(both.sub(&split).max_abs() <= 1e-11 * both.max_abs().max(1.0));

        let inv = matrix_exponential(&a, -s).unwrap();
        let prod = matrix_exponential(&a, s).unwrap().mul(&inv);
        assert!(prod.sub(&ComplexMatrix::identity(dim)).max_abs() <= 1e-11);
    }
}

#[test]
fn induced_norms_of_known_matrix() {
    let a = ComplexMatrix::from_real_rows(&[vec![3.0, 0.0], vec![4.0, 5.0]]).unwrap();
    assert!((induced_norm(&a, NormKind::L1) - 7.0).abs() <= 1e-12);
    assert!((induced_norm(&a, NormKind::LInf) - 9.0).abs() <= 1e-12);
    // Largest singular value: A^T A has eigenvalues 45 and 5.
    assert!((induced_norm(&a, NormKind::L2) - 45f64.sqrt()).abs() <= 1e-12);
}

#[test]
fn induced_norm_duality_and_bounds() {
    let mut rng = SplitMix64::new(0xd00d);
    for _ in 0..25 {
        let dim = 1 + (rng.next_u64() % 4) as usize;
        let a = random_matrix(&mut rng, dim, 2.0);
        // ||A||_1 equals ||A^*||_inf (column sums vs row sums of moduli).
        let n1 = induced_norm(&a, NormKind::L1);
        let ninf_adj = induced_norm(&a.adjoint(), NormKind::LInf);
        assert!((n1 - ninf_adj).abs() <= 1e-12 * n1.max(1.0));
        // ||A||_2^2 <= ||A||_1 ||A||_inf.
        let n2 = induced_norm(&a, NormKind::L2);
        let ninf = induced_norm(&a, NormKind::LInf);
        assert!(n2 * n2 <= n1 * ninf * (1.0 + 1e-10));
        // Induced norms dominate the action on sampled vectors.
        for kind in [NormKind::L1, NormKind::L2, NormKind::LInf] {
            let v: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0))
                .collect();
            let nv = vector_norm(&v, kind);
            let nav = vector_norm(&a.matvec(&v), kind);
            assert!(nav <= induced_norm(&a, kind) * nv * (1.0 + 1e-10));
        }
    }
}

#[test]
fn resolvent_of_planar_example_matches_closed_form() {
    let r = nonresonance_resolvent(&planar_matrix(), PI, re(-1.0), DEFAULT_MARGIN_TOL).unwrap();
    assert!(max_entry_diff(&r, &planar_propagated_resolvent(0.0)) <= 1e-13);
}

#[test]
fn scalar_resolvents() {
    // A = [[-1]], omega = 1, c = 2: R = 1/(2 - e^{-1}).
    let a = ComplexMatrix::from_real_rows(&[vec![-1.0]]).unwrap();
    let r = nonresonance_resolvent(&a, 1.0, re(2.0), DEFAULT_MARGIN_TOL).unwrap();
    let want = 1.0 / (2.0 - (-1.0f64).exp());
    assert!((r.get(0, 0) - re(want)).norm() <= 1e-14);

    // A = [[0]], omega = 1, c = 2: R = 1/(2 - 1) = 1.
    let zero = ComplexMatrix::zeros(1);
    let r = nonresonance_resolvent(&zero, 1.0, re(2.0), DEFAULT_MARGIN_TOL).unwrap();
    assert!((r.get(0, 0) - re(1.0)).norm() <= 1e-14);
}

#[test]
fn resonance_is_detected() {
    // Zero matrix with c = 1: the multiplier e^{0} = 1 collides with c.
    let zero = ComplexMatrix::zeros(2);
    let err = nonresonance_resolvent(&zero, 1.0, re(1.0), DEFAULT_MARGIN_TOL).unwrap_err();
    assert!(matches!(err, Error::Resonance { .. }), "got {err:?}");

    // Within the margin but not exactly resonant is still rejected.
    let err =
        nonresonance_resolvent(&zero, 1.0, re(1.0 + 1e-10), DEFAULT_MARGIN_TOL).unwrap_err();
    match err {
        Error::Resonance { distance, .. } => assert!(distance <= DEFAULT_MARGIN_TOL),
        other => panic!("expected resonance, got {other:?}"),
    }

    // Rotation generator with omega = pi, c = -1: multipliers e^{+-i pi} = -1.
    let j = ComplexMatrix::from_real_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
    let err = nonresonance_resolvent(&j, PI, re(-1.0), DEFAULT_MARGIN_TOL).unwrap_err();
    assert!(matches!(err, Error::Resonance { .. }), "got {err:?}");
}

#[test]
fn commutation_identity_on_random_instances() {
    // cR = R e^{A omega} + I = e^{A omega} R + I whenever R exists.
    let mut rng = SplitMix64::new(0xc0ffee);
    let mut checked = 0usize;
    let mut attempts = 0usize;
    while checked < 100 && attempts < 400 {
        attempts += 1;
        let dim = 1 + (rng.next_u64() % 4) as usize;
        let a = random_matrix(&mut rng, dim, 1.0);
        let omega = 0.5 + 1.5 * rng.next_f64();
        let radius = 0.5 + 1.5 * rng.next_f64();
        let angle = 2.0 * PI * rng.next_f64();
        let c = Complex64::from_polar(radius, angle);
        let r = match nonresonance_resolvent(&a, omega, c, DEFAULT_MARGIN_TOL) {
            Ok(r) => r,
            Err(Error::Resonance { .. }) => continue,
            Err(other) => panic!("unexpected error {other:?}"),
        };
        let e = matrix_exponential(&a, omega).unwrap();
        let id = ComplexMatrix::identity(dim);
        let lhs = r.scale(c);
        let right = r.mul(&e).add(&id);
        let left = e.mul(&r).add(&id);
        assert!(lhs.sub(&right).max_abs() <= 1e-10 * lhs.max_abs().max(1.0));
        assert!(lhs.sub(&left).max_abs() <= 1e-10 * lhs.max_abs().max(1.0));
        checked += 1;
    }
    assert!(checked >= 100, "only {checked} nonresonant instances drawn");
}

#[test]
fn inversion_roundtrip() {
    let mut rng = SplitMix64::new(0xabcd);
    for _ in 0..30 {
        let dim = 1 + (rng.next_u64() % 4) as usize;
        let a = random_matrix(&mut rng, dim, 1.0).add(&ComplexMatrix::identity(dim).scale(re(3.0)));
        let inv = invert(&a).unwrap();
        let prod = a.mul(&inv);
        assert!(prod.sub(&ComplexMatrix::identity(dim)).max_abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vector_norm_axioms(
        v in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..6),
        w in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..6),
        s in -3.0f64..3.0,
    ) {
        let dim = v.len().min(w.len());
        let v: Vec<Complex64> = v[..dim].iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let w: Vec<Complex64> = w[..dim].iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        for kind in [NormKind::L1, NormKind::L2, NormKind::LInf] {
            let nv = vector_norm(&v, kind);
            let nw = vector_norm(&w, kind);
            let sum: Vec<Complex64> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
            prop_assert!(vector_norm(&sum, kind) <= nv + nw + 1e-12);
            let scaled: Vec<Complex64> = v.iter().map(|a| a * re(s)).collect();
            prop_assert!((vector_norm(&scaled, kind) - s.abs() * nv).abs() <= 1e-10);
        }
        // Norm ordering: linf <= l2 <= l1 <= dim * linf.
        let ninf = vector_norm(&v, NormKind::LInf);
        let n2 = vector_norm(&v, NormKind::L2);
        let n1 = vector_norm(&v, NormKind::L1);
        prop_assert!(ninf <= n2 + 1e-12);
        prop_assert!(n2 <= n1 + 1e-12);
        prop_assert!(n1 <= dim as f64 * ninf + 1e-12);
    }
}
