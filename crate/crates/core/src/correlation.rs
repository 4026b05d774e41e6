//! One-particle density matrices, natural occupations, the occupation-number von
//! Neumann entropy and correlation energies.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fci::{annihilate, create, CIResult, Determinant};
use crate::linalg::eigh;

/// Tolerance on natural occupations leaving [0, 2].
const OCCUPATION_SLACK: f64 = 1e-8;

/// Correlation energies more negative than this signal a broken variational bound.
const VARIATIONAL_SLACK: f64 = 1e-9;

/// Spin-summed one-particle density matrix in the MO basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Opdm {
    pub gamma: DMatrix<f64>,
}

impl Opdm {
    pub fn trace(&self) -> f64 {
        self.gamma.trace()
    }
}

/// Natural-orbital occupations, descending, each in [0, 2].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaturalOccupations(pub Vec<f64>);

impl NaturalOccupations {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// γ_pq = Σ_σ ⟨Ψ|a†_{pσ} a_{qσ}|Ψ⟩
pub fn one_particle_density(ci: &CIResult) -> Opdm {
    let basis = &ci.basis;
    let k = basis.n_orbitals;
    let c = &ci.coefficients;
    let mut gamma = DMatrix::zeros(k, k);
    for (j, det) in basis.determinants.iter().enumerate() {
        let cj = c[j];
        if cj == 0.0 {
            continue;
        }
        let bits = det.spin_orbitals(k);
        for spin in 0..2 {
            for q in 0..k {
                let Some((removed, s1)) = annihilate(bits, spin * k + q) else {
                    continue;
                };
                for p in 0..k {
                    let Some((target, s2)) = create(removed, spin * k + p) else {
                        continue;
                    };
                    let det_i = Determinant::from_spin_orbitals(target, k);
                    if let Some(i) = basis.index_of(&det_i) {
                        gamma[(p, q)] += c[i] * cj * s1 * s2;
                    }
                }
            }
        }
    }
    Opdm { gamma }
}

pub fn natural_occupations(opdm: &Opdm) -> Result<NaturalOccupations> {
    let sym = 0.5 * (&opdm.gamma + opdm.gamma.transpose());
    let (values, _) = eigh(&sym);
    let mut occ: Vec<f64> = values.iter().rev().copied().collect();
    if let Some(bad) = occ
        .iter()
        .find(|&&n| !(-OCCUPATION_SLACK..=2.0 + OCCUPATION_SLACK).contains(&n))
    {
        return Err(Error::Consistency(format!("natural occupation {bad} outside [0, 2]")));
    }
    for n in &mut occ {
        *n = n.clamp(0.0, 2.0);
    }
    Ok(NaturalOccupations(occ))
}

/// Natural orbitals as columns in the MO basis, ordered like [`natural_occupations`].
pub fn natural_orbitals(opdm: &Opdm) -> DMatrix<f64> {
    let sym = 0.5 * (&opdm.gamma + opdm.gamma.transpose());
    let (_, vectors) = eigh(&sym);
    let n = vectors.ncols();
    DMatrix::from_fn(n, n, |i, j| vectors[(i, n - 1 - j)])
}

/// S = −Σ_k (n_k/2) log₂(n_k/2), in bits, with 0·log 0 = 0.
pub fn von_neumann_entropy(occ: &NaturalOccupations) -> f64 {
    occ.0
        .iter()
        .map(|&n| 0.5 * n)
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

/// E_corr = E_HF − E_FCI (non-negative for a variational FCI).
pub fn correlation_energy(e_hf: f64, e_fci: f64) -> Result<f64> {
    let e = e_hf - e_fci;
    if e < -VARIATIONAL_SLACK {
        return Err(Error::VariationalViolation(e));
    }
    Ok(e)
}

/// Orbital energies and Coulomb/exchange integrals of the two-orbital (σ_g, σ_u) model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimalBasisInputs {
    pub eps1: f64,
    pub eps2: f64,
    pub j11: f64,
    pub j22: f64,
    pub j12: f64,
    pub k12: f64,
}

impl MinimalBasisInputs {
    /// Takes orbitals 0 and 1 of the CI reference as σ_g and σ_u.
    pub fn from_ci(ci: &CIResult) -> Result<Self> {
        let mo = &ci.mo_integrals;
        if mo.n_orbitals() < 2 {
            return Err(Error::Domain(
                "the two-orbital model needs at least two orbitals".into(),
            ));
        }
        let eps = &ci.reference.orbital_energies;
        Ok(Self {
            eps1: eps[0],
            eps2: eps[1],
            j11: mo.coulomb(0, 0),
            j22: mo.coulomb(1, 1),
            j12: mo.coulomb(0, 1),
            k12: mo.exchange(0, 1),
        })
    }
}

/// Two-configuration correlation energy: returns (Δ, Δ − √(Δ² + K₁₂²)) with
/// Δ = ½(2(ε₂ − ε₁) + J₁₁ + J₂₂ − 4J₁₂ + 2K₁₂). The energy is ≤ 0.
pub fn minimal_basis_corr(inputs: &MinimalBasisInputs) -> (f64, f64) {
    let delta =
        0.5 * (2.0 * (inputs.eps2 - inputs.eps1) + inputs.j11 + inputs.j22 - 4.0 * inputs.j12 + 2.0 * inputs.k12);
    let e_corr = delta - (delta * delta + inputs.k12 * inputs.k12).sqrt();
    (delta, e_corr)
}

/// Scales entropies so that the value at the largest-R point equals the correlation
/// energy there. Input points are `(R, entropy, E_corr)`.
pub fn rescale_entropy(points: &[(f64, f64, f64)]) -> Result<Vec<f64>> {
    let reference = (0..points.len())
        .max_by(|&a, &b| points[a].0.total_cmp(&points[b].0))
        .ok_or_else(|| Error::Domain("cannot rescale an empty curve".into()))?;
    let (_, s_ref, e_ref) = points[reference];
    if !(s_ref > 0.0) {
        return Err(Error::Domain(format!(
            "entropy at the reference point must be positive, got {s_ref}"
        )));
    }
    let factor = e_ref / s_ref;
    Ok(points
        .iter()
        .enumerate()
        .map(|(i, &(_, s, _))| if i == reference { e_ref } else { s * factor })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub e_hf: f64,
    pub e_fci: f64,
    pub e_corr: f64,
    /// Bits.
    pub entropy: f64,
    pub rescaled_entropy: Option<f64>,
    pub occupations: NaturalOccupations,
}

pub fn correlation_report(ci: &CIResult) -> Result<CorrelationReport> {
    let opdm = one_particle_density(ci);
    let occupations = natural_occupations(&opdm)?;
    Ok(CorrelationReport {
        e_hf: ci.reference.energy,
        e_fci: ci.energy,
        e_corr: correlation_energy(ci.reference.energy, ci.energy)?,
        entropy: von_neumann_entropy(&occupations),
        rescaled_entropy: None,
        occupations,
    })
}
