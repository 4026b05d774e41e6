//! Shared fixtures for the benchmarks.

use h2e_core::{build_ao_basis, AOBasis, BasisSet, Molecule};

pub fn h2_basis(r: f64, basis: &str) -> (Molecule, AOBasis) {
    let mol = Molecule::h2(r).expect("valid bond length");
    let ao = build_ao_basis(&mol, &BasisSet::builtin(basis).expect("built-in basis")).expect("H is covered");
    (mol, ao)
}
