//! Analytic integrals over contracted Cartesian Gaussians (McMurchie–Davidson) in
//! Hartree atomic units, plus a grid-based reference implementation in [`oracle`].

pub mod boys;
mod hermite;
pub mod oracle;

use std::fmt::Write as _;

use nalgebra::{DMatrix, Vector3};

use crate::basis::{AOBasis, BasisFunction};
use crate::error::{Error, Result};
use crate::molecule::Molecule;

pub use boys::{boys, ASYMPTOTIC_THRESHOLD};
use hermite::Primitive;

fn primitives(f: &BasisFunction) -> impl Iterator<Item = (f64, Primitive)> + '_ {
    f.exponents.iter().zip(&f.coefficients).map(|(&exponent, &c)| {
        (
            c,
            Primitive {
                exponent,
                center: f.center,
                powers: f.cartesian.map(usize::from),
            },
        )
    })
}

fn contract2(f: &BasisFunction, g: &BasisFunction, kernel: impl Fn(&Primitive, &Primitive) -> f64) -> f64 {
    let mut sum = 0.0;
    for (cf, pf) in primitives(f) {
        for (cg, pg) in primitives(g) {
            sum += cf * cg * kernel(&pf, &pg);
        }
    }
    sum
}

pub fn overlap(f: &BasisFunction, g: &BasisFunction) -> f64 {
    contract2(f, g, hermite::overlap)
}

/// -½⟨f|∇²|g⟩
pub fn kinetic(f: &BasisFunction, g: &BasisFunction) -> f64 {
    contract2(f, g, hermite::kinetic)
}

/// -Σ_A Z_A ⟨f|1/|r-R_A||g⟩
pub fn nuclear_attraction(f: &BasisFunction, g: &BasisFunction, mol: &Molecule) -> f64 {
    let mut sum = 0.0;
    for atom in &mol.atoms {
        if atom.nuclear_charge == 0 {
            continue;
        }
        let z = f64::from(atom.nuclear_charge);
        sum -= z * contract2(f, g, |a, b| hermite::potential(a, b, &atom.position));
    }
    sum
}

/// Attraction to a unit point charge at `center`, without the sign: ⟨f|1/|r-C||g⟩.
pub fn point_charge_potential(f: &BasisFunction, g: &BasisFunction, center: &Vector3<f64>) -> f64 {
    contract2(f, g, |a, b| hermite::potential(a, b, center))
}

/// (fg|hk) in chemists' notation.
pub fn eri(f: &BasisFunction, g: &BasisFunction, h: &BasisFunction, k: &BasisFunction) -> f64 {
    let mut sum = 0.0;
    for (cf, pf) in primitives(f) {
        for (cg, pg) in primitives(g) {
            let cfg = cf * cg;
            for (ch, ph) in primitives(h) {
                for (ck, pk) in primitives(k) {
                    sum += cfg * ch * ck * hermite::repulsion(&pf, &pg, &ph, &pk);
                }
            }
        }
    }
    sum
}

fn pair_index(i: usize, j: usize) -> usize {
    if i >= j {
        i * (i + 1) / 2 + j
    } else {
        j * (j + 1) / 2 + i
    }
}

/// Four-index tensor with 8-fold permutational symmetry, one value stored per
/// equivalence class.
#[derive(Debug, Clone, PartialEq)]
pub struct EriTensor {
    n: usize,
    data: Vec<f64>,
}

impl EriTensor {
    pub fn zeros(n: usize) -> Self {
        let pairs = n * (n + 1) / 2;
        Self {
            n,
            data: vec![0.0; pairs * (pairs + 1) / 2],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of symmetry-unique entries.
    pub fn unique_len(&self) -> usize {
        self.data.len()
    }

    fn index(i: usize, j: usize, k: usize, l: usize) -> usize {
        pair_index(pair_index(i, j), pair_index(k, l))
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[Self::index(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        self.data[Self::index(i, j, k, l)] = value;
    }

    /// Canonical index quadruples (i ≥ j, k ≥ l, ij ≥ kl), one per stored value.
    pub fn unique_indices(&self) -> Vec<[usize; 4]> {
        let n = self.n;
        let mut out = Vec::with_capacity(self.data.len());
        for i in 0..n {
            for j in 0..=i {
                for k in 0..=i {
                    let l_max = if k == i { j } else { k };
                    for l in 0..=l_max {
                        out.push([i, j, k, l]);
                    }
                }
            }
        }
        out
    }

    /// Dense n⁴ copy, row-major in (i, j, k, l).
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut dense = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        dense[((i * n + j) * n + k) * n + l] = self.get(i, j, k, l);
                    }
                }
            }
        }
        dense
    }

    /// Packs a dense n⁴ array, reading one representative per class.
    pub fn from_dense(n: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != n * n * n * n {
            return Err(Error::DimensionMismatch(format!(
                "dense ERI array has {} entries, expected {}",
                dense.len(),
                n * n * n * n
            )));
        }
        let mut t = Self::zeros(n);
        for [i, j, k, l] in t.unique_indices() {
            t.set(i, j, k, l, dense[((i * n + j) * n + k) * n + l]);
        }
        Ok(t)
    }
}

/// All one- and two-electron integrals of a basis, Hartree atomic units.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSet {
    pub overlap: DMatrix<f64>,
    pub kinetic: DMatrix<f64>,
    pub nuclear: DMatrix<f64>,
    pub eri: EriTensor,
    /// Signed AO permutation for inversion through the molecular centroid, when the
    /// molecule has that symmetry. Used to keep orbitals symmetry-pure when they are
    /// degenerate.
    pub inversion: Option<Vec<(usize, f64)>>,
}

impl IntegralSet {
    pub fn n_basis(&self) -> usize {
        self.overlap.nrows()
    }

    pub fn core_hamiltonian(&self) -> DMatrix<f64> {
        &self.kinetic + &self.nuclear
    }

    /// Text dump: one record per unique integral, `LABEL i j [k l] value`, 1-based
    /// indices, 17 significant digits.
    pub fn dump(&self) -> String {
        let n = self.n_basis();
        let mut out = String::new();
        for (label, m) in [("S", &self.overlap), ("T", &self.kinetic), ("V", &self.nuclear)] {
            for i in 0..n {
                for j in 0..=i {
                    let _ = writeln!(out, "{label} {} {} {:.16e}", i + 1, j + 1, m[(i, j)]);
                }
            }
        }
        for [i, j, k, l] in self.eri.unique_indices() {
            let _ = writeln!(
                out,
                "ERI {} {} {} {} {:.16e}",
                i + 1,
                j + 1,
                k + 1,
                l + 1,
                self.eri.get(i, j, k, l)
            );
        }
        out
    }
}

pub fn compute_all(basis: &AOBasis, mol: &Molecule) -> Result<IntegralSet> {
    let n = basis.len();
    if n == 0 {
        return Err(Error::Config("empty basis".into()));
    }
    let f = &basis.functions;
    let mut overlap_m = DMatrix::zeros(n, n);
    let mut kinetic_m = DMatrix::zeros(n, n);
    let mut nuclear_m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let s = overlap(&f[i], &f[j]);
            let t = kinetic(&f[i], &f[j]);
            let v = nuclear_attraction(&f[i], &f[j], mol);
            overlap_m[(i, j)] = s;
            overlap_m[(j, i)] = s;
            kinetic_m[(i, j)] = t;
            kinetic_m[(j, i)] = t;
            nuclear_m[(i, j)] = v;
            nuclear_m[(j, i)] = v;
        }
    }
    let mut eri_t = EriTensor::zeros(n);
    for [i, j, k, l] in eri_t.unique_indices() {
        eri_t.set(i, j, k, l, eri(&f[i], &f[j], &f[k], &f[l]));
    }
    Ok(IntegralSet {
        overlap: overlap_m,
        kinetic: kinetic_m,
        nuclear: nuclear_m,
        eri: eri_t,
        inversion: basis.inversion_map(mol),
    })
}
