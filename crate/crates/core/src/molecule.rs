//! Atoms, molecular geometries and the nuclear repulsion energy.
//!
//! All coordinates are stored in Bohr.

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Conversion factor from Ångström to Bohr.
pub const ANGSTROM_TO_BOHR: f64 = 1.8897261254578281;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthUnit {
    Bohr,
    Angstrom,
}

impl LengthUnit {
    pub fn to_bohr(self, value: f64) -> f64 {
        match self {
            LengthUnit::Bohr => value,
            LengthUnit::Angstrom => value * ANGSTROM_TO_BOHR,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub element: String,
    pub nuclear_charge: u32,
    pub position: Vector3<f64>,
}

impl Atom {
    pub fn new(element: &str, position: Vector3<f64>) -> Result<Self> {
        let nuclear_charge =
            atomic_number(element).ok_or_else(|| Error::Config(format!("unknown element symbol `{element}`")))?;
        Self::with_charge(element, nuclear_charge, position)
    }

    /// Builds an atom with an explicit nuclear charge. A zero charge is accepted so that
    /// ghost centers can be used in integral tests.
    pub fn with_charge(element: &str, nuclear_charge: u32, position: Vector3<f64>) -> Result<Self> {
        if !position.iter().all(|c| c.is_finite()) {
            return Err(Error::Domain(format!("non-finite position for {element}")));
        }
        Ok(Self {
            element: normalize_symbol(element),
            nuclear_charge,
            position,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    pub atoms: Vec<Atom>,
    pub n_electrons: usize,
}

impl Molecule {
    /// Neutral molecule: the electron count is the sum of nuclear charges.
    pub fn neutral(atoms: Vec<Atom>) -> Result<Self> {
        let n_electrons = atoms.iter().map(|a| a.nuclear_charge as usize).sum();
        Self::new(atoms, n_electrons)
    }

    pub fn new(atoms: Vec<Atom>, n_electrons: usize) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Config("a molecule needs at least one atom".into()));
        }
        Ok(Self { atoms, n_electrons })
    }

    /// Homonuclear diatomic along z, centered at the origin, bond length in Bohr.
    pub fn diatomic(element: &str, bond_length: f64) -> Result<Self> {
        if !(bond_length > 0.0) || !bond_length.is_finite() {
            return Err(Error::Domain(format!(
                "bond length must be positive and finite, got {bond_length}"
            )));
        }
        let half = 0.5 * bond_length;
        Self::neutral(vec![
            Atom::new(element, Vector3::new(0.0, 0.0, -half))?,
            Atom::new(element, Vector3::new(0.0, 0.0, half))?,
        ])
    }

    pub fn h2(bond_length: f64) -> Result<Self> {
        Self::diatomic("H", bond_length)
    }

    pub fn atom(element: &str) -> Result<Self> {
        Self::neutral(vec![Atom::new(element, Vector3::zeros())?])
    }

    pub fn total_charge(&self) -> u32 {
        self.atoms.iter().map(|a| a.nuclear_charge).sum()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        (self.atoms[i].position - self.atoms[j].position).norm()
    }

    /// Rigidly translated copy.
    pub fn translated(&self, shift: Vector3<f64>) -> Self {
        let mut out = self.clone();
        for atom in &mut out.atoms {
            atom.position += shift;
        }
        out
    }

    /// Returns, for every atom, the index of its image under inversion through the
    /// centroid, or `None` if the geometry is not inversion symmetric.
    pub fn inversion_partners(&self, tolerance: f64) -> Option<Vec<usize>> {
        let n = self.atoms.len() as f64;
        let center = self.atoms.iter().fold(Vector3::zeros(), |acc, a| acc + a.position) / n;
        self.atoms
            .iter()
            .map(|atom| {
                let image = 2.0 * center - atom.position;
                self.atoms.iter().position(|other| {
                    other.element == atom.element
                        && other.nuclear_charge == atom.nuclear_charge
                        && (other.position - image).norm() <= tolerance
                })
            })
            .collect()
    }
}

/// Σ_{A<B} Z_A Z_B / R_AB in Hartree.
pub fn nuclear_repulsion(mol: &Molecule) -> Result<f64> {
    let mut energy = 0.0;
    for a in 0..mol.atoms.len() {
        for b in 0..a {
            let r = mol.distance(a, b);
            if r <= 0.0 {
                return Err(Error::Domain(format!("atoms {b} and {a} coincide")));
            }
            let za = mol.atoms[a].nuclear_charge as f64;
            let zb = mol.atoms[b].nuclear_charge as f64;
            energy += za * zb / r;
        }
    }
    Ok(energy)
}

const ELEMENTS: [&str; 10] = ["H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne"];

pub fn atomic_number(symbol: &str) -> Option<u32> {
    let symbol = normalize_symbol(symbol);
    ELEMENTS.iter().position(|&e| e == symbol).map(|i| i as u32 + 1)
}

pub(crate) fn normalize_symbol(symbol: &str) -> String {
    let mut chars = symbol.trim().chars();
    match chars.next() {
        Some(first) => first.to_ascii_uppercase().to_string() + &chars.as_str().to_ascii_lowercase(),
        None => String::new(),
    }
}
