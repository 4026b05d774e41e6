//! Gaussian basis sets: Gaussian94-format parsing, contraction normalization and
//! expansion onto the atoms of a molecule.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::molecule::{normalize_symbol, Molecule};

const STO_3G: &str = include_str!("../data/basis/sto-3g.g94");
const SIX_31GSS: &str = include_str!("../data/basis/6-31gss.g94");

/// Names accepted by [`BasisSet::builtin`].
pub const BUILTIN_BASIS_NAMES: [&str; 2] = ["sto-3g", "6-31gss"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveGaussian {
    /// Bohr⁻².
    pub exponent: f64,
    /// Contraction weight, referring to a normalized primitive.
    pub coefficient: f64,
}

/// An element-free contracted shell as read from a basis file.
#[derive(Debug, Clone, PartialEq)]
pub struct Shell {
    pub angular_momentum: u8,
    pub primitives: Vec<PrimitiveGaussian>,
    /// Factor that makes the contracted function have unit self-overlap.
    pub contraction_norm: f64,
}

impl Shell {
    pub fn new(angular_momentum: u8, primitives: Vec<PrimitiveGaussian>) -> Result<Self> {
        if angular_momentum > 1 {
            return Err(Error::Unsupported(format!(
                "angular momentum {angular_momentum} (only s and p shells are supported)"
            )));
        }
        if primitives.is_empty() {
            return Err(Error::Config("shell without primitives".into()));
        }
        if let Some(p) = primitives
            .iter()
            .find(|p| !(p.exponent > 0.0) || !p.exponent.is_finite())
        {
            return Err(Error::Domain(format!("non-positive exponent {}", p.exponent)));
        }
        let contraction_norm = contraction_norm(angular_momentum, &primitives);
        Ok(Self {
            angular_momentum,
            primitives,
            contraction_norm,
        })
    }

    pub fn is_normalized(&self) -> bool {
        self.contraction_norm.is_finite() && self.contraction_norm > 0.0
    }

    /// Number of Cartesian components.
    pub fn n_functions(&self) -> usize {
        cartesian_components(self.angular_momentum).len()
    }
}

/// Normalization of a primitive Cartesian Gaussian with total angular momentum `l`,
/// valid for l ≤ 1 where every component shares the same factor.
pub fn primitive_norm(exponent: f64, l: u8) -> f64 {
    (2.0 * exponent / PI).powf(0.75) * (4.0 * exponent).powf(f64::from(l) / 2.0)
}

fn contraction_norm(l: u8, primitives: &[PrimitiveGaussian]) -> f64 {
    let power = f64::from(l) + 1.5;
    let mut self_overlap = 0.0;
    for pi in primitives {
        for pj in primitives {
            let ratio = 2.0 * (pi.exponent * pj.exponent).sqrt() / (pi.exponent + pj.exponent);
            self_overlap += pi.coefficient * pj.coefficient * ratio.powf(power);
        }
    }
    1.0 / self_overlap.sqrt()
}

/// Cartesian exponent triples of a shell, in (x, y, z) order.
pub fn cartesian_components(l: u8) -> &'static [[u8; 3]] {
    match l {
        0 => &[[0, 0, 0]],
        1 => &[[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        _ => &[],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    pub name: String,
    pub shells_per_element: BTreeMap<String, Vec<Shell>>,
}

impl BasisSet {
    /// One of the basis sets shipped with the crate.
    pub fn builtin(name: &str) -> Result<Self> {
        let text = match canonical_name(name).as_str() {
            "sto-3g" => STO_3G,
            "6-31gss" => SIX_31GSS,
            other => return Err(Error::Config(format!("unknown built-in basis `{other}`"))),
        };
        parse_basis(&canonical_name(name), text)
    }

    /// Resolves `name_or_path`: an existing file is parsed directly, otherwise
    /// `<dir>/<name>.g94` is tried when a basis directory is given, and finally the
    /// built-in sets.
    pub fn load(name_or_path: &str, basis_dir: Option<&Path>) -> Result<Self> {
        let path = Path::new(name_or_path);
        if path.is_file() {
            return Self::from_file(path);
        }
        if let Some(dir) = basis_dir {
            let candidate = dir.join(format!("{}.g94", canonical_name(name_or_path)));
            if candidate.is_file() {
                return Self::from_file(&candidate);
            }
        }
        Self::builtin(name_or_path)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        parse_basis(&name, &text)
    }

    pub fn shells(&self, element: &str) -> Option<&[Shell]> {
        self.shells_per_element
            .get(&normalize_symbol(element))
            .map(Vec::as_slice)
    }

    /// Gaussian94 text. Values are written in shortest round-trip form, so parsing the
    /// output reproduces every exponent and coefficient bit for bit.
    pub fn to_g94(&self) -> String {
        let mut out = String::new();
        for (element, shells) in &self.shells_per_element {
            let _ = writeln!(out, "{element}     0");
            for shell in shells {
                let label = if shell.angular_momentum == 0 { "S" } else { "P" };
                let _ = writeln!(out, "{label}    {}   1.00", shell.primitives.len());
                for p in &shell.primitives {
                    let _ = writeln!(out, "      {:e}       {:e}", p.exponent, p.coefficient);
                }
            }
            out.push_str("****\n");
        }
        out
    }
}

fn canonical_name(name: &str) -> String {
    let lower = name.trim().to_ascii_lowercase().replace('*', "s");
    match lower.as_str() {
        "sto3g" => "sto-3g".into(),
        "631gss" | "6-31g(d,p)" => "6-31gss".into(),
        _ => lower,
    }
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    token.replace(['D', 'd'], "E").parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("expected a number, found `{token}`"),
    })
}

/// Parses a Gaussian94-style basis document.
pub fn parse_basis(name: &str, text: &str) -> Result<BasisSet> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('!'))
        .peekable();

    let mut shells_per_element = BTreeMap::new();
    while let Some((line_no, header)) = lines.next() {
        let tokens: Vec<&str> = header.split_whitespace().collect();
        let element = match tokens.as_slice() {
            [symbol, "0"] if symbol.chars().all(|c| c.is_ascii_alphabetic()) => normalize_symbol(symbol),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected element header `<symbol> 0`, found `{header}`"),
                })
            }
        };

        let mut shells = Vec::new();
        let mut terminated = false;
        while let Some((line_no, line)) = lines.next() {
            if line.starts_with("****") {
                terminated = true;
                break;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected shell header `<type> <n_prim> <scale>`, found `{line}`"),
                });
            }
            let kind = tokens[0].to_ascii_uppercase();
            let n_prim: usize = tokens[1].parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid primitive count `{}`", tokens[1]),
            })?;
            if n_prim == 0 {
                return Err(Error::Parse {
                    line: line_no,
                    message: "shell with zero primitives".into(),
                });
            }
            let scale = parse_number(tokens[2], line_no)?;
            let columns = match kind.as_str() {
                "S" | "P" => 2,
                "SP" | "L" => 3,
                "D" | "F" | "G" | "H" | "I" => {
                    return Err(Error::Unsupported(format!(
                        "{kind} shell at line {line_no} (only s and p shells are supported)"
                    )))
                }
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("unknown shell type `{}`", tokens[0]),
                    })
                }
            };

            let mut rows = Vec::with_capacity(n_prim);
            for _ in 0..n_prim {
                let (line_no, line) = lines.next().ok_or(Error::Parse {
                    line: line_no,
                    message: "unexpected end of document inside a shell".into(),
                })?;
                let values = line
                    .split_whitespace()
                    .map(|t| parse_number(t, line_no))
                    .collect::<Result<Vec<f64>>>()?;
                if values.len() != columns {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected {columns} columns, found {}", values.len()),
                    });
                }
                if !(values[0] > 0.0) {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("exponent must be positive, found {}", values[0]),
                    });
                }
                rows.push(values);
            }

            let primitives = |column: usize| -> Vec<PrimitiveGaussian> {
                rows.iter()
                    .map(|r| PrimitiveGaussian {
                        exponent: r[0] * scale * scale,
                        coefficient: r[column],
                    })
                    .collect()
            };
            match kind.as_str() {
                "S" => shells.push(Shell::new(0, primitives(1))?),
                "P" => shells.push(Shell::new(1, primitives(1))?),
                _ => {
                    shells.push(Shell::new(0, primitives(1))?);
                    shells.push(Shell::new(1, primitives(2))?);
                }
            }
        }

        if !terminated {
            return Err(Error::Parse {
                line: line_no,
                message: format!("block for {element} is not terminated by `****`"),
            });
        }
        if !shells.iter().any(|s| s.angular_momentum == 0) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("block for {element} has no s shell"),
            });
        }
        shells_per_element.insert(element, shells);
    }

    if shells_per_element.is_empty() {
        return Err(Error::EmptyBasis);
    }
    Ok(BasisSet {
        name: name.to_string(),
        shells_per_element,
    })
}

/// One contracted Cartesian Gaussian placed on an atom.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisFunction {
    pub atom_index: usize,
    pub center: Vector3<f64>,
    pub cartesian: [u8; 3],
    /// Index of the owning shell within the [`AOBasis`].
    pub shell_index: usize,
    pub exponents: Vec<f64>,
    /// Contraction weights with primitive and contraction normalization folded in.
    pub coefficients: Vec<f64>,
}

impl BasisFunction {
    pub fn angular_momentum(&self) -> u8 {
        self.cartesian.iter().sum()
    }

    /// Value at a point, used by grid-based checks.
    pub fn value_at(&self, r: &Vector3<f64>) -> f64 {
        let d = r - self.center;
        let poly = (0..3).map(|k| d[k].powi(i32::from(self.cartesian[k]))).product::<f64>();
        let r2 = d.norm_squared();
        poly * self
            .exponents
            .iter()
            .zip(&self.coefficients)
            .map(|(a, c)| c * (-a * r2).exp())
            .sum::<f64>()
    }
}

/// Atom-centered basis functions in deterministic order: atoms in input order, shells
/// in file order, Cartesian components in (x, y, z) order.
#[derive(Debug, Clone, PartialEq)]
pub struct AOBasis {
    pub functions: Vec<BasisFunction>,
    pub n_shells: usize,
}

impl AOBasis {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Signed permutation representing inversion through the molecular centroid, if the
    /// molecule (and therefore the basis) is inversion symmetric. Entry `i` is
    /// `(image index, sign)`.
    pub fn inversion_map(&self, mol: &Molecule) -> Option<Vec<(usize, f64)>> {
        let partners = mol.inversion_partners(1e-8)?;
        self.functions
            .iter()
            .map(|f| {
                let target_atom = partners[f.atom_index];
                let image = self.functions.iter().position(|g| {
                    g.atom_index == target_atom
                        && g.cartesian == f.cartesian
                        && g.exponents == f.exponents
                        && g.coefficients == f.coefficients
                })?;
                let sign = if f.angular_momentum() % 2 == 0 { 1.0 } else { -1.0 };
                Some((image, sign))
            })
            .collect()
    }
}

pub fn build_ao_basis(mol: &Molecule, basis: &BasisSet) -> Result<AOBasis> {
    let mut functions = Vec::new();
    let mut shell_index = 0;
    for (atom_index, atom) in mol.atoms.iter().enumerate() {
        let shells = basis.shells(&atom.element).ok_or_else(|| {
            Error::Config(format!(
                "element {} is not present in basis set `{}`",
                atom.element, basis.name
            ))
        })?;
        for shell in shells {
            for &cartesian in cartesian_components(shell.angular_momentum) {
                functions.push(BasisFunction {
                    atom_index,
                    center: atom.position,
                    cartesian,
                    shell_index,
                    exponents: shell.primitives.iter().map(|p| p.exponent).collect(),
                    coefficients: shell
                        .primitives
                        .iter()
                        .map(|p| {
                            p.coefficient * primitive_norm(p.exponent, shell.angular_momentum) * shell.contraction_norm
                        })
                        .collect(),
                });
            }
            shell_index += 1;
        }
    }
    Ok(AOBasis {
        functions,
        n_shells: shell_index,
    })
}
