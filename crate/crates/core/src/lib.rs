//! Hartree–Fock and full configuration interaction for two-electron diatomics, with
//! natural-occupation entanglement entropy, correlation energies along the
//! dissociation coordinate and CHSH analysis of two-spin states.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod bell;
pub mod correlation;
pub mod error;
pub mod fci;
pub mod integrals;
pub mod linalg;
pub mod molecule;
pub mod scan;
pub mod scf;

pub use basis::{build_ao_basis, parse_basis, AOBasis, BasisFunction, BasisSet, PrimitiveGaussian, Shell};
pub use bell::{
    chsh_max_closed_form, chsh_max_grid, chsh_value, dissociation_spin_state, product_updown, singlet, ChshReport,
    MeasurementSettings, SpinObservable, TwoQubitState, UnitVector3,
};
pub use correlation::{
    correlation_energy, correlation_report, minimal_basis_corr, natural_occupations, one_particle_density,
    rescale_entropy, von_neumann_entropy, CorrelationReport, MinimalBasisInputs, NaturalOccupations, Opdm,
};
pub use error::{Error, Result};
pub use fci::{enumerate_determinants, run_fci, CIBasis, CIResult, Determinant, MoIntegrals};
pub use integrals::{compute_all, EriTensor, IntegralSet};
pub use molecule::{nuclear_repulsion, Atom, LengthUnit, Molecule};
pub use scan::{run_scan, run_single_point, CurvePoint, OutputFormat, ScanConfig, ScanOutcome};
pub use scf::{run_rhf, ScfResult, ScfSettings};
