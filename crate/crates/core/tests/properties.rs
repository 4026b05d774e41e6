use std::fmt::Write;

use h2e_core::integrals::{eri, overlap};
use h2e_core::linalg::eigh;
use h2e_core::{
    build_ao_basis, compute_all, enumerate_determinants, parse_basis, run_fci, run_rhf, BasisSet, Molecule, ScfSettings,
};
use nalgebra::{DMatrix, Vector3};
use proptest::prelude::*;

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn shell_text() -> impl Strategy<Value = String> {
    let primitive = (1e-2f64..1e3, -2.0f64..2.0, -2.0f64..2.0);
    (
        prop_oneof![Just("S"), Just("P"), Just("SP")],
        proptest::collection::vec(primitive, 1..5),
    )
        .prop_map(|(kind, prims)| {
            let mut text = format!("{kind} {} 1.00\n", prims.len());
            for (e, c, d) in prims {
                if kind == "SP" {
                    writeln!(text, "  {e:e} {c:e} {d:e}").unwrap();
                } else {
                    writeln!(text, "  {e:e} {c:e}").unwrap();
                }
            }
            text
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basis_text_round_trip(shells in proptest::collection::vec(shell_text(), 1..4)) {
        let text = format!("H 0\nS 1 1.00\n  1.0 1.0\n{}****\n", shells.concat());
        let first = parse_basis("random", &text).unwrap();
        let second = parse_basis("random", &first.to_g94()).unwrap();
        prop_assert_eq!(first.shells_per_element, second.shells_per_element);
    }

    #[test]
    fn integrals_are_translation_invariant(
        r in 0.5f64..6.0,
        shift in proptest::array::uniform3(-10.0f64..10.0),
    ) {
        let basis = BasisSet::builtin("6-31gss").unwrap();
        let mol = Molecule::h2(r).unwrap();
        let moved = mol.translated(Vector3::from(shift));
        let a = compute_all(&build_ao_basis(&mol, &basis).unwrap(), &mol).unwrap();
        let b = compute_all(&build_ao_basis(&moved, &basis).unwrap(), &moved).unwrap();
        let diff = |x: &DMatrix<f64>, y: &DMatrix<f64>| (x - y).abs().max();
        prop_assert!(diff(&a.overlap, &b.overlap) <= 1e-12);
        prop_assert!(diff(&a.kinetic, &b.kinetic) <= 1e-12);
        prop_assert!(diff(&a.nuclear, &b.nuclear) <= 1e-12);
        let worst = a.eri.to_dense().iter().zip(b.eri.to_dense()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(worst <= 1e-12);
    }

    #[test]
    fn overlap_is_positive_definite(r in 0.3f64..30.0, basis in prop_oneof![Just("sto-3g"), Just("6-31gss")]) {
        let mol = Molecule::h2(r).unwrap();
        let ints = compute_all(&build_ao_basis(&mol, &BasisSet::builtin(basis).unwrap()).unwrap(), &mol).unwrap();
        let (values, _) = eigh(&ints.overlap);
        prop_assert!(values[0] > 0.0);
    }
}

#[test]
fn eri_long_range_limit() {
    let basis = BasisSet::builtin("sto-3g").unwrap();
    for r in [50.0, 75.0, 120.0] {
        let mol = Molecule::h2(r).unwrap();
        let ao = build_ao_basis(&mol, &basis).unwrap();
        let (a, b) = (&ao.functions[0], &ao.functions[1]);
        let aabb = eri(a, a, b, b);
        assert!((aabb - 1.0 / r).abs() < 1e-6, "R = {r}: {aabb}");
        assert!(overlap(a, b).abs() < 1e-12);
    }
}

#[test]
fn scf_orbitals_are_orthonormal_and_stationary() {
    for basis in ["sto-3g", "6-31gss"] {
        let set = BasisSet::builtin(basis).unwrap();
        for r in [0.5, 1.4, 3.0, 7.5, 12.0, 20.0] {
            let mol = Molecule::h2(r).unwrap();
            let ints = compute_all(&build_ao_basis(&mol, &set).unwrap(), &mol).unwrap();
            let scf = run_rhf(&ints, &mol, &ScfSettings::default()).unwrap();
            assert!(scf.converged, "{basis} R = {r}");
            let c = &scf.mo_coefficients;
            let ortho = c.transpose() * &ints.overlap * c - DMatrix::identity(c.ncols(), c.ncols());
            assert!(ortho.abs().max() < 1e-8);
            let fds = &scf.fock * &scf.density * &ints.overlap;
            let comm = &fds - fds.transpose();
            assert!(comm.abs().max() <= 1e-8, "{basis} R = {r}: {}", comm.abs().max());
            assert!(((&scf.density * &ints.overlap).trace() - 2.0).abs() < 1e-10);
        }
    }
}

#[test]
fn determinant_counts_are_binomial() {
    for k in 1..=12 {
        for na in 0..=k.min(3) {
            for nb in 0..=k.min(3) {
                let dets = enumerate_determinants(k, na, nb).unwrap();
                assert_eq!(dets.len(), binomial(k, na) * binomial(k, nb), "K={k} {na} {nb}");
            }
        }
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let set = BasisSet::builtin("6-31gss").unwrap();
    let mol = Molecule::h2(2.3).unwrap();
    let run = || {
        let ints = compute_all(&build_ao_basis(&mol, &set).unwrap(), &mol).unwrap();
        let scf = run_rhf(&ints, &mol, &ScfSettings::default()).unwrap();
        run_fci(&ints, &scf, &mol).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.energy.to_bits(), b.energy.to_bits());
    assert_eq!(a.coefficients, b.coefficients);
    assert_eq!(a.dump(), b.dump());
}
