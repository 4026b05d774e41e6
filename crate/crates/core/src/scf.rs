//! Restricted closed-shell Hartree–Fock via Roothaan iteration.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::integrals::{EriTensor, IntegralSet};
use crate::linalg::{eigh, fix_phase, max_abs};
use crate::molecule::{nuclear_repulsion, Molecule};

/// Smallest overlap eigenvalue accepted before the basis is declared linearly dependent.
pub const LINEAR_DEPENDENCE_THRESHOLD: f64 = 1e-10;

/// Orbital energies closer than this are treated as one degenerate cluster.
const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Damping kicks in after this many consecutive sign changes of ΔE.
const OSCILLATION_WINDOW: usize = 5;
const DAMPING: f64 = 0.5;
/// Level shift (Hartree) used for a second attempt when the unshifted iteration fails.
pub const FALLBACK_LEVEL_SHIFT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScfSettings {
    pub max_iterations: usize,
    pub energy_tolerance: f64,
    /// RMS of the change in density matrix elements.
    pub density_tolerance: f64,
    /// Virtual-orbital level shift in Hartree; 0 disables it.
    pub level_shift: f64,
}

impl Default for ScfSettings {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            energy_tolerance: 1e-10,
            density_tolerance: 1e-8,
            level_shift: 0.0,
        }
    }
}

impl ScfSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.energy_tolerance > 0.0) || !(self.density_tolerance > 0.0) {
            return Err(Error::Config("SCF tolerances must be positive".into()));
        }
        if !(self.level_shift >= 0.0) {
            return Err(Error::Config("level shift must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScfIteration {
    pub iteration: usize,
    pub energy: f64,
    pub delta_energy: f64,
    pub rms_density: f64,
    pub damped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScfResult {
    /// Columns are molecular orbitals in the AO basis.
    pub mo_coefficients: DMatrix<f64>,
    /// Ascending, Hartree.
    pub orbital_energies: DVector<f64>,
    /// Total energy including nuclear repulsion.
    pub energy: f64,
    pub nuclear_repulsion: f64,
    pub density: DMatrix<f64>,
    pub fock: DMatrix<f64>,
    pub n_occupied: usize,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<ScfIteration>,
}

impl ScfResult {
    /// Iteration log: `iteration energy delta_energy rms_density`.
    pub fn trace_log(&self) -> String {
        let mut out = String::from("# iter  energy  dE  rms_dD\n");
        for it in &self.trace {
            let _ = writeln!(
                out,
                "{:4} {:.12} {:.3e} {:.3e}{}",
                it.iteration,
                it.energy,
                it.delta_energy,
                it.rms_density,
                if it.damped { " damped" } else { "" }
            );
        }
        out
    }

    pub fn electronic_energy(&self) -> f64 {
        self.energy - self.nuclear_repulsion
    }
}

/// X = S^{-1/2}, so that XᵀSX = 1.
pub fn symmetric_orthogonalizer(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (values, vectors) = eigh(s);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < LINEAR_DEPENDENCE_THRESHOLD {
        return Err(Error::LinearDependence { min_eigenvalue: min });
    }
    let inv_sqrt = DMatrix::from_diagonal(&values.map(|v| 1.0 / v.sqrt()));
    Ok(&vectors * inv_sqrt * vectors.transpose())
}

/// F_μν = h_μν + Σ_λσ D_λσ [(μν|σλ) − ½(μλ|σν)]
pub fn build_fock(hcore: &DMatrix<f64>, density: &DMatrix<f64>, eri: &EriTensor) -> DMatrix<f64> {
    let n = hcore.nrows();
    let mut fock = hcore.clone();
    for mu in 0..n {
        for nu in 0..=mu {
            let mut g = 0.0;
            for lam in 0..n {
                for sig in 0..n {
                    let d = density[(lam, sig)];
                    if d == 0.0 {
                        continue;
                    }
                    g += d * (eri.get(mu, nu, sig, lam) - 0.5 * eri.get(mu, lam, sig, nu));
                }
            }
            fock[(mu, nu)] += g;
            if mu != nu {
                fock[(nu, mu)] += g;
            }
        }
    }
    fock
}

/// D = 2 C_occ C_occᵀ
pub fn density_from_coeffs(c: &DMatrix<f64>, n_occupied_pairs: usize) -> Result<DMatrix<f64>> {
    if n_occupied_pairs > c.ncols() {
        return Err(Error::Domain(format!(
            "{n_occupied_pairs} occupied orbitals requested but only {} available",
            c.ncols()
        )));
    }
    let occ = c.columns(0, n_occupied_pairs);
    Ok(2.0 * &occ * occ.transpose())
}

fn electronic_energy(density: &DMatrix<f64>, hcore: &DMatrix<f64>, fock: &DMatrix<f64>) -> f64 {
    0.5 * density.component_mul(&(hcore + fock)).sum()
}

fn inversion_matrix(map: &[(usize, f64)]) -> DMatrix<f64> {
    let n = map.len();
    let mut p = DMatrix::zeros(n, n);
    for (i, &(j, sign)) in map.iter().enumerate() {
        p[(j, i)] = sign;
    }
    p
}

/// Diagonalizes the Fock matrix in the orthogonalized basis. Within clusters of
/// degenerate orbital energies the eigenvectors are rotated onto inversion
/// eigenfunctions (gerade first), so that a degenerate pair never mixes into
/// symmetry-broken, atom-localized orbitals.
fn diagonalize(
    fock: &DMatrix<f64>,
    x: &DMatrix<f64>,
    inversion: Option<&DMatrix<f64>>,
) -> (DVector<f64>, DMatrix<f64>) {
    let f_orth = x.transpose() * fock * x;
    let (values, mut vectors) = eigh(&f_orth);
    if let Some(p) = inversion {
        let n = values.len();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && (values[end] - values[end - 1]).abs() <= DEGENERACY_THRESHOLD * values[end].abs().max(1.0)
            {
                end += 1;
            }
            if end - start > 1 {
                let block = vectors.columns(start, end - start).into_owned();
                let parity = block.transpose() * p * &block;
                // Ascending in -parity: gerade (+1) columns come first.
                let (_, rot) = eigh(&(-0.5 * (&parity + parity.transpose())));
                let rotated = &block * rot;
                for (k, col) in rotated.column_iter().enumerate() {
                    let mut col = col.into_owned();
                    fix_phase(&mut col);
                    vectors.set_column(start + k, &col);
                }
            }
            start = end;
        }
    }
    let c = x * vectors;
    (values, c)
}

pub fn run_rhf(ints: &IntegralSet, mol: &Molecule, settings: &ScfSettings) -> Result<ScfResult> {
    settings.validate()?;
    if !mol.n_electrons.is_multiple_of(2) {
        return Err(Error::Unsupported(format!(
            "restricted closed-shell HF needs an even electron count, got {}",
            mol.n_electrons
        )));
    }
    let n = ints.n_basis();
    let n_occ = mol.n_electrons / 2;
    if n_occ > n {
        return Err(Error::Domain(format!(
            "{} electrons do not fit into {n} spatial orbitals",
            mol.n_electrons
        )));
    }
    let e_nuc = nuclear_repulsion(mol)?;
    let x = symmetric_orthogonalizer(&ints.overlap)?;
    let inversion = ints.inversion.as_deref().map(inversion_matrix);
    let first = iterate(
        ints,
        &x,
        inversion.as_ref(),
        e_nuc,
        n_occ,
        settings,
        settings.level_shift,
    )?;
    if first.converged || settings.level_shift > 0.0 {
        return Ok(first);
    }
    let mut second = iterate(
        ints,
        &x,
        inversion.as_ref(),
        e_nuc,
        n_occ,
        settings,
        FALLBACK_LEVEL_SHIFT,
    )?;
    if !second.converged {
        return Ok(first);
    }
    second.iterations += first.iterations;
    Ok(second)
}

fn shifted(fock: &DMatrix<f64>, s: &DMatrix<f64>, density: &DMatrix<f64>, shift: f64) -> DMatrix<f64> {
    if shift > 0.0 {
        fock + shift * (s - 0.5 * s * density * s)
    } else {
        fock.clone()
    }
}

fn iterate(
    ints: &IntegralSet,
    x: &DMatrix<f64>,
    inversion: Option<&DMatrix<f64>>,
    e_nuc: f64,
    n_occ: usize,
    settings: &ScfSettings,
    level_shift: f64,
) -> Result<ScfResult> {
    let n = ints.n_basis();
    let hcore = ints.core_hamiltonian();
    let s = &ints.overlap;

    let (_, c_guess) = diagonalize(&hcore, x, inversion);
    let mut density = density_from_coeffs(&c_guess, n_occ)?;
    let mut previous_energy: Option<f64> = None;
    let mut trace = Vec::new();
    let mut sign_changes = 0usize;
    let mut last_delta_sign = 0.0f64;
    let mut damping_active = false;
    let mut converged = false;

    for iteration in 1..=settings.max_iterations {
        let fock = build_fock(&hcore, &density, &ints.eri);
        let energy = electronic_energy(&density, &hcore, &fock) + e_nuc;
        let (_, c) = diagonalize(&shifted(&fock, s, &density, level_shift), x, inversion);
        let mut new_density = density_from_coeffs(&c, n_occ)?;
        let delta_energy = previous_energy.map_or(f64::INFINITY, |e| energy - e);

        if delta_energy.is_finite() && delta_energy != 0.0 {
            let sign = delta_energy.signum();
            if last_delta_sign != 0.0 && sign != last_delta_sign {
                sign_changes += 1;
            } else {
                sign_changes = 0;
            }
            last_delta_sign = sign;
        }
        if sign_changes >= OSCILLATION_WINDOW {
            damping_active = true;
        }
        if damping_active {
            new_density = DAMPING * &new_density + (1.0 - DAMPING) * &density;
        }

        let change = &new_density - &density;
        let rms_density = (change.norm_squared() / (n * n) as f64).sqrt();
        trace.push(ScfIteration {
            iteration,
            energy,
            delta_energy,
            rms_density,
            damped: damping_active,
        });
        density = new_density;
        previous_energy = Some(energy);
        if delta_energy.abs() < settings.energy_tolerance && rms_density < settings.density_tolerance {
            converged = true;
            break;
        }
    }

    let fock = build_fock(&hcore, &density, &ints.eri);
    let energy = electronic_energy(&density, &hcore, &fock) + e_nuc;
    // The shifted operator keeps occupied orbitals first; the shift is removed
    // from the virtual energies afterwards.
    let (mut orbital_energies, mo_coefficients) = diagonalize(&shifted(&fock, s, &density, level_shift), x, inversion);
    for e in orbital_energies.iter_mut().skip(n_occ) {
        *e -= level_shift;
    }
    if !energy.is_finite() {
        return Err(Error::Consistency("SCF energy is not finite".into()));
    }
    Ok(ScfResult {
        mo_coefficients,
        orbital_energies,
        energy,
        nuclear_repulsion: e_nuc,
        density,
        fock,
        n_occupied: n_occ,
        iterations: trace.len(),
        converged,
        trace,
    })
}

/// max |FDS − SDF|, the stationarity residual of a closed-shell density.
pub fn commutator_residual(fock: &DMatrix<f64>, density: &DMatrix<f64>, overlap: &DMatrix<f64>) -> f64 {
    max_abs(&(fock * density * overlap - overlap * density * fock))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_ao_basis, BasisSet};
    use crate::integrals::compute_all;

    fn setup(mol: &Molecule, basis: &str) -> IntegralSet {
        let ao = build_ao_basis(mol, &BasisSet::builtin(basis).unwrap()).unwrap();
        compute_all(&ao, mol).unwrap()
    }

    fn h2(r: f64, basis: &str) -> (Molecule, IntegralSet, ScfResult) {
        let mol = Molecule::h2(r).unwrap();
        let ints = setup(&mol, basis);
        let scf = run_rhf(&ints, &mol, &ScfSettings::default()).unwrap();
        (mol, ints, scf)
    }

    #[test]
    fn near_degenerate_stretch_converges_with_shift() {
        let (_, ints, scf) = h2(12.576923076923077, "6-31gss");
        assert!(scf.converged);
        // Reference from an independent symmetry-constrained RHF.
        assert!((scf.energy + 0.7374669842926234).abs() < 1e-7, "{}", scf.energy);
        let unshifted = iterate(
            &ints,
            &symmetric_orthogonalizer(&ints.overlap).unwrap(),
            ints.inversion.as_deref().map(inversion_matrix).as_ref(),
            scf.nuclear_repulsion,
            1,
            &ScfSettings::default(),
            0.0,
        )
        .unwrap();
        assert!(!unshifted.converged);
        assert!(scf.iterations > ScfSettings::default().max_iterations);
        let c = &scf.mo_coefficients;
        let d = density_from_coeffs(c, 1).unwrap();
        assert!(max_abs(&(d - &scf.density)) < 1e-6);
        assert!(commutator_residual(&scf.fock, &scf.density, &ints.overlap) < 1e-6);
    }

    #[test]
    fn orthogonalizer_of_identity() {
        let x = symmetric_orthogonalizer(&DMatrix::identity(3, 3)).unwrap();
        assert!(max_abs(&(x - DMatrix::<f64>::identity(3, 3))) < 1e-15);
    }

    #[test]
    fn orthogonalizer_two_by_two() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.6, 0.6, 1.0]);
        let x = symmetric_orthogonalizer(&s).unwrap();
        let check = x.transpose() * &s * &x;
        assert!(max_abs(&(check - DMatrix::<f64>::identity(2, 2))) < 1e-12);
        // Eigenpairs {1 ± s}: diagonal = (1/√1.6 + 1/√0.4)/2.
        let expected = 0.5 * (1.0 / 1.6f64.sqrt() + 1.0 / 0.4f64.sqrt());
        assert!((x[(0, 0)] - expected).abs() < 1e-12);
    }

    #[test]
    fn near_singular_overlap_is_rejected() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 1.0 - 1e-12, 1.0 - 1e-12, 1.0]);
        assert!(matches!(
            symmetric_orthogonalizer(&s),
            Err(Error::LinearDependence { .. })
        ));
    }

    #[test]
    fn fock_with_zero_density_is_core_hamiltonian() {
        let mol = Molecule::h2(1.4).unwrap();
        let ints = setup(&mol, "6-31gss");
        let h = ints.core_hamiltonian();
        let f = build_fock(&h, &DMatrix::zeros(10, 10), &ints.eri);
        assert_eq!(f, h);
    }

    #[test]
    fn fock_is_symmetric_for_symmetric_density() {
        let (_, ints, scf) = h2(1.1, "6-31gss");
        let f = build_fock(&ints.core_hamiltonian(), &scf.density, &ints.eri);
        assert!(max_abs(&(&f - f.transpose())) < 1e-14);
    }

    #[test]
    fn density_edge_cases() {
        let c = DMatrix::<f64>::identity(3, 3);
        assert_eq!(density_from_coeffs(&c, 0).unwrap(), DMatrix::zeros(3, 3));
        let d = density_from_coeffs(&c, 1).unwrap();
        assert_eq!(d[(0, 0)], 2.0);
        assert_eq!(d.sum(), 2.0);
        assert!(matches!(density_from_coeffs(&c, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn odd_electron_count_is_unsupported() {
        let mol = Molecule::atom("H").unwrap();
        let ints = setup(&mol, "sto-3g");
        assert!(matches!(
            run_rhf(&ints, &mol, &ScfSettings::default()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn invalid_settings_are_rejected() {
        let mol = Molecule::h2(1.4).unwrap();
        let ints = setup(&mol, "sto-3g");
        let bad = ScfSettings {
            max_iterations: 0,
            ..ScfSettings::default()
        };
        assert!(matches!(run_rhf(&ints, &mol, &bad), Err(Error::Config(_))));
    }

    #[test]
    fn helium_single_function_closed_form() {
        let mol = Molecule::atom("He").unwrap();
        let ints = setup(&mol, "sto-3g");
        let scf = run_rhf(&ints, &mol, &ScfSettings::default()).unwrap();
        let h = ints.core_hamiltonian()[(0, 0)];
        let s = ints.overlap[(0, 0)];
        // The one normalized function is the orbital: E = 2h + (11|11).
        let expected = (2.0 * h + ints.eri.get(0, 0, 0, 0)) / 1.0;
        assert!((s - 1.0).abs() < 1e-12);
        assert!(scf.converged);
        assert!((scf.energy - expected).abs() < 1e-12);
        // Independent reference: -2.807783957539974 Hartree.
        assert!((scf.energy + 2.807783957539974).abs() < 1e-8);
    }

    /// Golden-section minimization of the single-determinant energy over the orbital
    /// rotation angle of the 2-function problem.
    fn brute_force_h2_minimal(ints: &IntegralSet, e_nuc: f64) -> f64 {
        let x = symmetric_orthogonalizer(&ints.overlap).unwrap();
        let h = ints.core_hamiltonian();
        let energy = |theta: f64| {
            let c = x.column(0) * theta.cos() + x.column(1) * theta.sin();
            let mut one = 0.0;
            let mut two = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    one += c[i] * c[j] * h[(i, j)];
                    for k in 0..2 {
                        for l in 0..2 {
                            two += c[i] * c[j] * c[k] * c[l] * ints.eri.get(i, j, k, l);
                        }
                    }
                }
            }
            2.0 * one + two + e_nuc
        };
        // Coarse scan to bracket the global minimum, then golden section.
        let n = 720;
        let step = std::f64::consts::PI / n as f64;
        let best = (0..n)
            .map(|k| k as f64 * step)
            .min_by(|a, b| energy(*a).total_cmp(&energy(*b)))
            .unwrap();
        let (mut lo, mut hi) = (best - step, best + step);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if energy(m1) < energy(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        energy(0.5 * (lo + hi))
    }

    #[test]
    fn h2_minimal_basis_matches_brute_force_minimum() {
        for r in [0.7, 1.4, 3.0, 20.0] {
            let (_, ints, scf) = h2(r, "sto-3g");
            assert!(scf.converged);
            let oracle = brute_force_h2_minimal(&ints, scf.nuclear_repulsion);
            assert!(
                (scf.energy - oracle).abs() < 1e-9,
                "R = {r}: {} vs {oracle}",
                scf.energy
            );
        }
    }

    #[test]
    fn h2_reference_energies() {
        // Reference values from an independent electronic-structure code. Its 6-31G**
        // tables carry fewer digits than ours, hence the looser tolerance there.
        let (_, _, scf) = h2(1.4, "sto-3g");
        assert!((scf.energy + 1.116714325062551).abs() < 1e-8);
        let (_, _, scf) = h2(1.4, "6-31gss");
        assert!((scf.energy + 1.1312843493005604).abs() < 1e-7);
        let (_, _, scf) = h2(20.0, "6-31gss");
        assert!((scf.energy + 0.7227039674496714).abs() < 1e-7);
    }

    #[test]
    fn converged_solution_invariants() {
        for basis in ["sto-3g", "6-31gss"] {
            for r in [0.5, 1.4, 4.0, 20.0] {
                let (_, ints, scf) = h2(r, basis);
                assert!(scf.converged, "{basis} R = {r}");
                let s = &ints.overlap;
                let c = &scf.mo_coefficients;
                let n = c.ncols();
                assert!(max_abs(&(c.transpose() * s * c - DMatrix::<f64>::identity(n, n))) < 1e-8);
                assert!(commutator_residual(&scf.fock, &scf.density, s) <= 1e-8);
                assert!(((&scf.density * s).trace() - 2.0).abs() < 1e-10);
                assert!(scf.orbital_energies.as_slice().windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn bonding_orbital_is_lowest() {
        let (_, _, scf) = h2(1.4, "sto-3g");
        let c = &scf.mo_coefficients;
        // σ_g has equal-sign AO coefficients, σ_u opposite signs.
        assert!(c[(0, 0)] * c[(1, 0)] > 0.0);
        assert!(c[(0, 1)] * c[(1, 1)] < 0.0);
        assert!(scf.orbital_energies[0] < scf.orbital_energies[1]);
    }

    #[test]
    fn stretched_h2_keeps_delocalized_orbitals() {
        let (_, _, scf) = h2(20.0, "sto-3g");
        let c = &scf.mo_coefficients;
        assert!((c[(0, 0)] - c[(1, 0)]).abs() < 1e-10);
        assert!((scf.energy + 0.5708607271546065).abs() < 1e-8);
    }

    #[test]
    fn larger_basis_lowers_energy() {
        for r in [0.5, 1.4, 6.0] {
            let (_, _, small) = h2(r, "sto-3g");
            let (_, _, large) = h2(r, "6-31gss");
            assert!(large.energy <= small.energy + 1e-10);
        }
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let mol = Molecule::h2(1.4).unwrap();
        let ints = setup(&mol, "6-31gss");
        let settings = ScfSettings {
            max_iterations: 1,
            ..ScfSettings::default()
        };
        let scf = run_rhf(&ints, &mol, &settings).unwrap();
        assert!(!scf.converged);
        assert_eq!(scf.iterations, 1);
        assert!(scf.trace_log().lines().count() == 2);
    }

    #[test]
    fn level_shift_reaches_same_solution() {
        let mol = Molecule::h2(1.4).unwrap();
        let ints = setup(&mol, "6-31gss");
        let plain = run_rhf(&ints, &mol, &ScfSettings::default()).unwrap();
        let shifted = run_rhf(
            &ints,
            &mol,
            &ScfSettings {
                level_shift: 0.5,
                ..ScfSettings::default()
            },
        )
        .unwrap();
        assert!(shifted.converged);
        assert!((plain.energy - shifted.energy).abs() < 1e-9);
    }
}
