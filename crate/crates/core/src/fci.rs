//! Full configuration interaction in the occupation-number (determinant) basis.
//!
//! Spin orbitals are laid out with all α orbitals first (bit k for spatial orbital
//! k) followed by all β orbitals (bit K + k). Fermionic phases follow this order:
//! creating or annihilating spin orbital x contributes (-1)^{number of occupied spin
//! orbitals below x}.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::integrals::{EriTensor, IntegralSet};
use crate::linalg::{eigh, fix_phase};
use crate::molecule::{nuclear_repulsion, Molecule};
use crate::scf::ScfResult;

/// Eigenvalues within this (relative) window of the lowest one are treated as one
/// degenerate ground level.
pub const GROUND_DEGENERACY_THRESHOLD: f64 = 1e-10;

const MAX_ORBITALS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Determinant {
    pub alpha: u32,
    pub beta: u32,
}

impl Determinant {
    pub fn n_alpha(&self) -> u32 {
        self.alpha.count_ones()
    }

    pub fn n_beta(&self) -> u32 {
        self.beta.count_ones()
    }

    /// Spin-summed occupation n_k ∈ {0, 1, 2} of spatial orbital k.
    pub fn occupation(&self, k: usize) -> u8 {
        ((self.alpha >> k) & 1) as u8 + ((self.beta >> k) & 1) as u8
    }

    pub(crate) fn spin_orbitals(&self, n_orbitals: usize) -> u64 {
        u64::from(self.alpha) | (u64::from(self.beta) << n_orbitals)
    }

    pub(crate) fn from_spin_orbitals(bits: u64, n_orbitals: usize) -> Self {
        let mask = (1u64 << n_orbitals) - 1;
        Self {
            alpha: (bits & mask) as u32,
            beta: ((bits >> n_orbitals) & mask) as u32,
        }
    }

    /// Occupation string over K orbitals, orbital 0 first, e.g. `1000`.
    pub fn bit_string(bits: u32, n_orbitals: usize) -> String {
        (0..n_orbitals)
            .map(|k| if (bits >> k) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

fn phase_below(bits: u64, x: usize) -> f64 {
    if (bits & ((1u64 << x) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// a_x |bits⟩
pub(crate) fn annihilate(bits: u64, x: usize) -> Option<(u64, f64)> {
    if bits & (1 << x) == 0 {
        return None;
    }
    Some((bits & !(1 << x), phase_below(bits, x)))
}

/// a†_x |bits⟩
pub(crate) fn create(bits: u64, x: usize) -> Option<(u64, f64)> {
    if bits & (1 << x) != 0 {
        return None;
    }
    Some((bits | (1 << x), phase_below(bits, x)))
}

fn set_bits(bits: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&i| (bits >> i) & 1 == 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CIBasis {
    pub determinants: Vec<Determinant>,
    pub n_orbitals: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    index: HashMap<Determinant, usize>,
}

impl CIBasis {
    pub fn len(&self) -> usize {
        self.determinants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.determinants.is_empty()
    }

    pub fn index_of(&self, det: &Determinant) -> Option<usize> {
        self.index.get(det).copied()
    }

    /// The aufbau determinant: lowest N_α and N_β orbitals occupied.
    pub fn reference(&self) -> Determinant {
        Determinant {
            alpha: ((1u64 << self.n_alpha) - 1) as u32,
            beta: ((1u64 << self.n_beta) - 1) as u32,
        }
    }
}

/// Occupation strings with `n_occ` of `n_orbitals` bits set, in lexicographic order of
/// their sorted occupied-index lists.
fn strings(n_orbitals: usize, n_occ: usize) -> Vec<u32> {
    fn recurse(start: usize, n_orbitals: usize, left: usize, acc: u32, out: &mut Vec<u32>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for k in start..=(n_orbitals - left) {
            recurse(k + 1, n_orbitals, left - 1, acc | (1 << k), out);
        }
    }
    let mut out = Vec::new();
    recurse(0, n_orbitals, n_occ, 0, &mut out);
    out
}

pub fn enumerate_determinants(n_orbitals: usize, n_alpha: usize, n_beta: usize) -> Result<CIBasis> {
    if n_orbitals > MAX_ORBITALS {
        return Err(Error::Domain(format!(
            "at most {MAX_ORBITALS} spatial orbitals are supported, got {n_orbitals}"
        )));
    }
    if n_alpha > n_orbitals || n_beta > n_orbitals {
        return Err(Error::Domain(format!(
            "cannot place {n_alpha} α and {n_beta} β electrons in {n_orbitals} orbitals"
        )));
    }
    let alphas = strings(n_orbitals, n_alpha);
    let betas = strings(n_orbitals, n_beta);
    let determinants: Vec<Determinant> = alphas
        .iter()
        .flat_map(|&alpha| betas.iter().map(move |&beta| Determinant { alpha, beta }))
        .collect();
    let index = determinants.iter().enumerate().map(|(i, d)| (*d, i)).collect();
    Ok(CIBasis {
        determinants,
        n_orbitals,
        n_alpha,
        n_beta,
        index,
    })
}

/// One- and two-electron integrals in the molecular-orbital basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MoIntegrals {
    pub one_electron: DMatrix<f64>,
    pub eri: EriTensor,
}

impl MoIntegrals {
    pub fn n_orbitals(&self) -> usize {
        self.one_electron.nrows()
    }

    /// Coulomb integral J_pq = (pp|qq).
    pub fn coulomb(&self, p: usize, q: usize) -> f64 {
        self.eri.get(p, p, q, q)
    }

    /// Exchange integral K_pq = (pq|qp).
    pub fn exchange(&self, p: usize, q: usize) -> f64 {
        self.eri.get(p, q, q, p)
    }
}

/// h_pq = CᵀhC and (pq|rs) by four successive quarter transformations.
pub fn mo_transform(ints: &IntegralSet, c: &DMatrix<f64>) -> Result<MoIntegrals> {
    let n = ints.n_basis();
    if c.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "coefficient matrix has {} rows for {n} basis functions",
            c.nrows()
        )));
    }
    let m = c.ncols();
    let one_electron = c.transpose() * ints.core_hamiltonian() * c;

    let ao = ints.eri.to_dense();
    // (μν|λσ) -> (pν|λσ) -> (pq|λσ) -> (pq|rσ) -> (pq|rs)
    let mut step1 = vec![0.0; m * n * n * n];
    for p in 0..m {
        for mu in 0..n {
            let cp = c[(mu, p)];
            if cp == 0.0 {
                continue;
            }
            for rest in 0..n * n * n {
                step1[p * n * n * n + rest] += cp * ao[mu * n * n * n + rest];
            }
        }
    }
    let mut step2 = vec![0.0; m * m * n * n];
    for p in 0..m {
        for q in 0..m {
            for nu in 0..n {
                let cq = c[(nu, q)];
                for rest in 0..n * n {
                    step2[(p * m + q) * n * n + rest] += cq * step1[(p * n + nu) * n * n + rest];
                }
            }
        }
    }
    let mut step3 = vec![0.0; m * m * m * n];
    for pq in 0..m * m {
        for r in 0..m {
            for lam in 0..n {
                let cr = c[(lam, r)];
                for sig in 0..n {
                    step3[(pq * m + r) * n + sig] += cr * step2[(pq * n + lam) * n + sig];
                }
            }
        }
    }
    let mut mo = vec![0.0; m * m * m * m];
    for pqr in 0..m * m * m {
        for s in 0..m {
            let mut sum = 0.0;
            for sig in 0..n {
                sum += c[(sig, s)] * step3[pqr * n + sig];
            }
            mo[pqr * m + s] = sum;
        }
    }
    Ok(MoIntegrals {
        one_electron,
        eri: EriTensor::from_dense(m, &mo)?,
    })
}

/// Spin-orbital integrals over the α-then-β layout.
struct SpinIntegrals<'a> {
    mo: &'a MoIntegrals,
    k: usize,
}

impl SpinIntegrals<'_> {
    fn split(&self, x: usize) -> (usize, usize) {
        (x % self.k, x / self.k)
    }

    fn one(&self, p: usize, q: usize) -> f64 {
        let (sp, sigma_p) = self.split(p);
        let (sq, sigma_q) = self.split(q);
        if sigma_p != sigma_q {
            return 0.0;
        }
        self.mo.one_electron[(sp, sq)]
    }

    /// ⟨pq|rs⟩ = (pr|qs) with spin selection.
    fn physicist(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let (sp, a) = self.split(p);
        let (sq, b) = self.split(q);
        let (sr, c) = self.split(r);
        let (ss, d) = self.split(s);
        if a != c || b != d {
            return 0.0;
        }
        self.mo.eri.get(sp, sr, sq, ss)
    }

    fn antisymmetrized(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.physicist(p, q, r, s) - self.physicist(p, q, s, r)
    }
}

/// ⟨I|H|J⟩ by the Slater–Condon rules (electronic part only).
fn matrix_element(ints: &SpinIntegrals, bra: u64, ket: u64) -> f64 {
    let diff = bra ^ ket;
    match diff.count_ones() {
        0 => {
            let occ: Vec<usize> = set_bits(ket).collect();
            let mut e = 0.0;
            for (idx, &i) in occ.iter().enumerate() {
                e += ints.one(i, i);
                for &j in &occ[..idx] {
                    e += ints.antisymmetrized(i, j, i, j);
                }
            }
            e
        }
        2 => {
            let hole = (ket & diff).trailing_zeros() as usize;
            let particle = (bra & diff).trailing_zeros() as usize;
            let (after, s1) = annihilate(ket, hole).expect("hole is occupied");
            let (_, s2) = create(after, particle).expect("particle is empty");
            let mut value = ints.one(particle, hole);
            for n in set_bits(ket & bra) {
                value += ints.antisymmetrized(particle, n, hole, n);
            }
            s1 * s2 * value
        }
        4 => {
            let mut holes = set_bits(ket & diff);
            let (m, n) = (holes.next().unwrap(), holes.next().unwrap());
            let mut particles = set_bits(bra & diff);
            let (p, q) = (particles.next().unwrap(), particles.next().unwrap());
            // a†_p a†_q a_n a_m |ket⟩ = phase |bra⟩
            let (b1, s1) = annihilate(ket, m).unwrap();
            let (b2, s2) = annihilate(b1, n).unwrap();
            let (b3, s3) = create(b2, q).unwrap();
            let (b4, s4) = create(b3, p).unwrap();
            debug_assert_eq!(b4, bra);
            s1 * s2 * s3 * s4 * ints.antisymmetrized(p, q, m, n)
        }
        _ => 0.0,
    }
}

/// Electronic Hamiltonian in the determinant basis (nuclear repulsion excluded).
pub fn build_hamiltonian(basis: &CIBasis, mo: &MoIntegrals) -> Result<DMatrix<f64>> {
    if mo.n_orbitals() != basis.n_orbitals {
        return Err(Error::DimensionMismatch(format!(
            "CI basis has {} orbitals, integrals have {}",
            basis.n_orbitals,
            mo.n_orbitals()
        )));
    }
    let k = basis.n_orbitals;
    let spin = SpinIntegrals { mo, k };
    let bits: Vec<u64> = basis.determinants.iter().map(|d| d.spin_orbitals(k)).collect();
    let n = bits.len();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = matrix_element(&spin, bits[i], bits[j]);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}

/// Lowest eigenpair; the eigenvector's largest-magnitude component is positive.
pub fn solve_ground(h: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let (values, vectors) = eigh(h);
    (values[0], vectors.column(0).into_owned())
}

/// Lowest eigenpair; when the lowest level is degenerate, the vector inside that
/// level with the largest overlap with basis state `reference` is returned.
pub fn solve_ground_with_reference(h: &DMatrix<f64>, reference: usize) -> (f64, DVector<f64>) {
    let (values, vectors) = eigh(h);
    let e0 = values[0];
    let width = GROUND_DEGENERACY_THRESHOLD * e0.abs().max(1.0);
    let level = values.iter().take_while(|&&e| e - e0 <= width).count();
    if level == 1 {
        return (e0, vectors.column(0).into_owned());
    }
    let mut v = DVector::zeros(h.nrows());
    for k in 0..level {
        let col = vectors.column(k);
        v += col * col[reference];
    }
    let norm = v.norm();
    if norm < 1e-8 {
        return (e0, vectors.column(0).into_owned());
    }
    v /= norm;
    fix_phase(&mut v);
    let energy = (v.transpose() * h * &v)[(0, 0)];
    (energy, v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CIResult {
    /// Total energy including nuclear repulsion.
    pub energy: f64,
    pub coefficients: DVector<f64>,
    pub basis: CIBasis,
    pub mo_integrals: MoIntegrals,
    pub nuclear_repulsion: f64,
    pub reference: ScfResult,
}

impl CIResult {
    pub fn reference_energy(&self) -> f64 {
        self.reference.energy
    }

    /// Coefficient of the aufbau (Hartree–Fock) determinant.
    pub fn reference_weight(&self) -> f64 {
        let idx = self.basis.index_of(&self.basis.reference()).unwrap_or(0);
        self.coefficients[idx]
    }

    pub fn coefficient_of(&self, det: &Determinant) -> Option<f64> {
        self.basis.index_of(det).map(|i| self.coefficients[i])
    }

    /// `index  alpha_bits  beta_bits  coefficient`, one line per determinant.
    pub fn dump(&self) -> String {
        let k = self.basis.n_orbitals;
        let mut out = String::new();
        for (i, (det, c)) in self.basis.determinants.iter().zip(self.coefficients.iter()).enumerate() {
            let _ = writeln!(
                out,
                "{i}  {}  {}  {:.16e}",
                Determinant::bit_string(det.alpha, k),
                Determinant::bit_string(det.beta, k),
                c
            );
        }
        out
    }
}

/// FCI in the orbitals `c` (columns, AO basis). `reference` only labels the result.
pub fn run_fci_with_orbitals(
    ints: &IntegralSet,
    mol: &Molecule,
    c: &DMatrix<f64>,
    reference: &ScfResult,
) -> Result<CIResult> {
    if !mol.n_electrons.is_multiple_of(2) {
        return Err(Error::Unsupported("FCI is set up for closed-shell references".into()));
    }
    let n_alpha = mol.n_electrons / 2;
    let mo = mo_transform(ints, c)?;
    let basis = enumerate_determinants(c.ncols(), n_alpha, n_alpha)?;
    let h = build_hamiltonian(&basis, &mo)?;
    let reference_index = basis
        .index_of(&basis.reference())
        .ok_or_else(|| Error::Consistency("reference determinant missing from CI space".into()))?;
    let (electronic, coefficients) = solve_ground_with_reference(&h, reference_index);
    let e_nuc = nuclear_repulsion(mol)?;
    Ok(CIResult {
        energy: electronic + e_nuc,
        coefficients,
        basis,
        mo_integrals: mo,
        nuclear_repulsion: e_nuc,
        reference: reference.clone(),
    })
}

pub fn run_fci(ints: &IntegralSet, scf: &ScfResult, mol: &Molecule) -> Result<CIResult> {
    if !scf.converged {
        return Err(Error::ScfNotConverged {
            iterations: scf.iterations,
            delta_energy: scf.trace.last().map_or(f64::NAN, |t| t.delta_energy),
            rms_density: scf.trace.last().map_or(f64::NAN, |t| t.rms_density),
        });
    }
    run_fci_with_orbitals(ints, mol, &scf.mo_coefficients, scf)
}
