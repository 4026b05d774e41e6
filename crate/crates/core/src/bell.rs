//! Two-spin Bell (CHSH) analysis: spin observables, correlation functions of
//! two-qubit density matrices, the factorized and symmetrized mean values of a
//! two-electron determinant, and CHSH maximization.
//!
//! Alice measures along `a` or `d`, Bob along `b` or `c`; the CHSH combination is
//! E(a,b) − E(a,c) + E(d,b) + E(d,c) with E(u,w) = Tr[ρ (σ·u)⊗(σ·w)], the first
//! argument always acting on Alice's spin.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Complex, Matrix2, Matrix3, Matrix4, SymmetricEigen, Vector2, Vector3, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

const UNIT_TOLERANCE: f64 = 1e-12;

/// Bound obeyed by every local-realistic model.
pub const CLASSICAL_BOUND: f64 = 2.0;
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Default spacing of the coarse search grid, degrees.
pub const DEFAULT_COARSE_MESH_DEG: f64 = 12.0;
const MAX_SWEEPS_PER_STEP: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3(Vector3<f64>);

impl Serialize for UnitVector3 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.x, self.0.y, self.0.z].serialize(serializer)
    }
}

impl UnitVector3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Vector3::new(x, y, z);
        if (v.norm() - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::Domain(format!("vector ({x}, {y}, {z}) is not a unit vector")));
        }
        Ok(Self(v))
    }

    /// Normalizes any non-zero vector.
    pub fn normalized(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Domain("cannot normalize a zero vector".into()));
        }
        Ok(Self(v / n))
    }

    /// Polar angle θ from +z, azimuth φ from +x.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        Self(Vector3::new(
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ))
    }

    pub fn x() -> Self {
        Self(Vector3::x())
    }

    pub fn y() -> Self {
        Self(Vector3::y())
    }

    pub fn z() -> Self {
        Self(Vector3::z())
    }

    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn spherical_angles(&self) -> (f64, f64) {
        (self.0.z.clamp(-1.0, 1.0).acos(), self.0.y.atan2(self.0.x))
    }
}

fn pauli() -> [Matrix2<C64>; 3] {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        Matrix2::new(o, one, one, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(one, o, o, -one),
    ]
}

/// σ·v for a unit vector v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinObservable {
    pub matrix: Matrix2<C64>,
}

impl SpinObservable {
    pub fn eigenvalues(&self) -> [f64; 2] {
        let eig = SymmetricEigen::new(self.matrix);
        let mut w = [eig.eigenvalues[0], eig.eigenvalues[1]];
        w.sort_by(f64::total_cmp);
        w
    }
}

pub fn spin_observable(v: &UnitVector3) -> SpinObservable {
    let [sx, sy, sz] = pauli();
    let u = v.as_vector();
    SpinObservable {
        matrix: sx * C64::from(u.x) + sy * C64::from(u.y) + sz * C64::from(u.z),
    }
}

/// Checked variant for raw components.
pub fn spin_observable_from(x: f64, y: f64, z: f64) -> Result<SpinObservable> {
    Ok(spin_observable(&UnitVector3::new(x, y, z)?))
}

/// A normalized single-spin state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor(Vector2<C64>);

impl Spinor {
    pub fn new(up: C64, down: C64) -> Result<Self> {
        let v = Vector2::new(up, down);
        if (v.norm() - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::Domain(format!("spinor norm {} is not 1", v.norm())));
        }
        Ok(Self(v))
    }

    pub fn up() -> Self {
        Self(Vector2::new(C64::from(1.0), C64::from(0.0)))
    }

    pub fn down() -> Self {
        Self(Vector2::new(C64::from(0.0), C64::from(1.0)))
    }

    /// ⟨s|σ·v|s⟩
    pub fn expectation(&self, v: &UnitVector3) -> f64 {
        let m = spin_observable(v).matrix;
        (self.0.adjoint() * m * self.0)[(0, 0)].re
    }

    /// Bloch vector (⟨σx⟩, ⟨σy⟩, ⟨σz⟩).
    pub fn bloch(&self) -> Vector3<f64> {
        Vector3::new(
            self.expectation(&UnitVector3::x()),
            self.expectation(&UnitVector3::y()),
            self.expectation(&UnitVector3::z()),
        )
    }
}

/// E(a,b) = ⟨α|σ·a|α⟩⟨β|σ·b|β⟩, the mean value of a single determinant with one
/// electron in spin state α and the other in β.
pub fn mean_product(alpha: &Spinor, beta: &Spinor, a: &UnitVector3, b: &UnitVector3) -> f64 {
    alpha.expectation(a) * beta.expectation(b)
}

/// ½[⟨α|σ·a|α⟩⟨β|σ·b|β⟩ + ⟨α|σ·b|α⟩⟨β|σ·a|β⟩]
pub fn mean_symmetrized(alpha: &Spinor, beta: &Spinor, a: &UnitVector3, b: &UnitVector3) -> f64 {
    0.5 * (alpha.expectation(a) * beta.expectation(b) + alpha.expectation(b) * beta.expectation(a))
}

/// Checked constructors for raw spinor components.
pub fn spinor(up: (f64, f64), down: (f64, f64)) -> Result<Spinor> {
    Spinor::new(C64::new(up.0, up.1), C64::new(down.0, down.1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementSettings {
    pub a: UnitVector3,
    pub b: UnitVector3,
    pub c: UnitVector3,
    pub d: UnitVector3,
}

impl MeasurementSettings {
    /// a = ẑ, d = x̂ for Alice; b = −(ẑ+x̂)/√2, c = (ẑ−x̂)/√2 for Bob.
    pub fn textbook() -> Self {
        Self {
            a: UnitVector3::z(),
            d: UnitVector3::x(),
            b: UnitVector3(Vector3::new(-FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2)),
            c: UnitVector3(Vector3::new(-FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2)),
        }
    }
}

/// CHSH combination for an arbitrary correlation function E(Alice, Bob).
pub fn chsh_from(correlation: impl Fn(&UnitVector3, &UnitVector3) -> f64, s: &MeasurementSettings) -> f64 {
    correlation(&s.a, &s.b) - correlation(&s.a, &s.c) + correlation(&s.d, &s.b) + correlation(&s.d, &s.c)
}

/// |E(a,b) − E(a,c)| + |E(d,b) + E(d,c)|
pub fn chsh_from_abs(correlation: impl Fn(&UnitVector3, &UnitVector3) -> f64, s: &MeasurementSettings) -> f64 {
    (correlation(&s.a, &s.b) - correlation(&s.a, &s.c)).abs()
        + (correlation(&s.d, &s.b) + correlation(&s.d, &s.c)).abs()
}

/// Two-qubit density matrix in the basis |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    pub rho: Matrix4<C64>,
}

impl TwoQubitState {
    pub fn new(rho: Matrix4<C64>) -> Result<Self> {
        let state = Self { rho };
        state.validate()?;
        Ok(state)
    }

    pub fn from_pure(psi: Vector4<C64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(Error::Domain("zero state vector".into()));
        }
        let psi = psi / C64::from(norm);
        Self::new(psi * psi.adjoint())
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: Matrix4::identity() * C64::from(0.25),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let herm = (self.rho - self.rho.adjoint())
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        if herm > 1e-12 {
            return Err(Error::Domain(format!("density matrix is not Hermitian ({herm:e})")));
        }
        let trace = self.rho.trace();
        if (trace.re - 1.0).abs() > 1e-12 || trace.im.abs() > 1e-12 {
            return Err(Error::Domain(format!("density matrix trace is {trace}")));
        }
        let min = self.eigenvalues()[0];
        if min < -1e-10 {
            return Err(Error::Domain(format!("density matrix has eigenvalue {min}")));
        }
        Ok(())
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = SymmetricEigen::new(self.rho);
        let mut w = [
            eig.eigenvalues[0],
            eig.eigenvalues[1],
            eig.eigenvalues[2],
            eig.eigenvalues[3],
        ];
        w.sort_by(f64::total_cmp);
        w
    }

    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }

    /// E(u, w) = Tr[ρ (σ·u)⊗(σ·w)]
    pub fn correlation(&self, u: &UnitVector3, w: &UnitVector3) -> f64 {
        let op = spin_observable(u).matrix.kronecker(&spin_observable(w).matrix);
        (self.rho * op).trace().re
    }

    /// T_ij = Tr[ρ σ_i⊗σ_j]
    pub fn correlation_tensor(&self) -> Matrix3<f64> {
        let p = pauli();
        Matrix3::from_fn(|i, j| (self.rho * p[i].kronecker(&p[j])).trace().re)
    }

    /// Reduced state of Alice's (0) or Bob's (1) spin.
    pub fn marginal(&self, party: usize) -> Matrix2<C64> {
        Matrix2::from_fn(|i, j| {
            (0..2)
                .map(|k| {
                    if party == 0 {
                        self.rho[(2 * i + k, 2 * j + k)]
                    } else {
                        self.rho[(2 * k + i, 2 * k + j)]
                    }
                })
                .sum()
        })
    }
}

fn ket(amplitudes: [f64; 4]) -> Vector4<C64> {
    Vector4::from_fn(|i, _| C64::from(amplitudes[i]))
}

/// (|↑↓⟩ − |↓↑⟩)/√2
pub fn singlet() -> TwoQubitState {
    TwoQubitState::from_pure(ket([0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0])).expect("singlet is a valid state")
}

/// |↑↓⟩⟨↑↓|, the spin content of a closed-shell determinant with the α electron
/// assigned to Alice.
pub fn product_updown() -> TwoQubitState {
    TwoQubitState::from_pure(ket([0.0, 1.0, 0.0, 0.0])).expect("product state is valid")
}

/// Spatial part of the dissociated two-configuration state,
/// c_g σ_g(1)σ_g(2) + c_u σ_u(1)σ_u(2), over orthonormal σ_g and σ_u.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpatialFactor {
    pub c_gg: f64,
    pub c_uu: f64,
}

impl SpatialFactor {
    pub fn norm(&self) -> f64 {
        (self.c_gg * self.c_gg + self.c_uu * self.c_uu).sqrt()
    }
}

/// The dissociated H₂ wavefunction factorizes as (σ_gσ_g + σ_uσ_u)/√2 times a spin
/// singlet; returns the spin factor and the symmetric spatial factor.
pub fn dissociation_state() -> (TwoQubitState, SpatialFactor) {
    (
        singlet(),
        SpatialFactor {
            c_gg: FRAC_1_SQRT_2,
            c_uu: FRAC_1_SQRT_2,
        },
    )
}

/// Spin factor of the dissociated two-configuration state.
pub fn dissociation_spin_state() -> TwoQubitState {
    dissociation_state().0
}

pub fn chsh_value(state: &TwoQubitState, s: &MeasurementSettings) -> f64 {
    chsh_from(|u, w| state.correlation(u, w), s)
}

pub fn chsh_value_abs(state: &TwoQubitState, s: &MeasurementSettings) -> f64 {
    chsh_from_abs(|u, w| state.correlation(u, w), s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshReport {
    pub value: f64,
    pub settings: MeasurementSettings,
    pub violated: bool,
}

impl ChshReport {
    fn new(value: f64, settings: MeasurementSettings) -> Self {
        Self {
            value,
            settings,
            violated: value > CLASSICAL_BOUND + 1e-9,
        }
    }
}

/// Maximum CHSH value 2√(m₁ + m₂), m₁ ≥ m₂ the two largest eigenvalues of TᵀT.
pub fn chsh_max_closed_form(state: &TwoQubitState) -> f64 {
    let t = state.correlation_tensor();
    let mut m: Vec<f64> = SymmetricEigen::new(t.transpose() * t)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    m.sort_by(|a, b| b.total_cmp(a));
    2.0 * (m[0] + m[1]).max(0.0).sqrt()
}

/// Bob's best responses and the resulting CHSH value for Alice's directions a, d.
fn best_response(t: &Matrix3<f64>, a: &Vector3<f64>, d: &Vector3<f64>) -> (f64, Vector3<f64>, Vector3<f64>) {
    let tb = t.transpose() * (a + d);
    let tc = t.transpose() * (d - a);
    let dir = |v: Vector3<f64>| if v.norm() > 0.0 { v / v.norm() } else { Vector3::z() };
    (tb.norm() + tc.norm(), dir(tb), dir(tc))
}

fn sphere_grid(mesh: f64) -> Vec<(f64, f64)> {
    let n_theta = (PI / mesh).round().max(1.0) as usize;
    let mut points = Vec::new();
    for i in 0..=n_theta {
        let theta = PI * i as f64 / n_theta as f64;
        let n_phi = ((2.0 * PI * theta.sin()) / mesh).round().max(1.0) as usize;
        for j in 0..n_phi {
            points.push((theta, 2.0 * PI * j as f64 / n_phi as f64));
        }
    }
    points
}

/// Maximizes the CHSH value: Alice's two directions are scanned over a 12° spherical
/// mesh with Bob's directions set to their best responses, then refined by coordinate
/// descent on the four spherical angles with steps halving down to
/// `angular_resolution_deg`.
pub fn chsh_max_grid(state: &TwoQubitState, angular_resolution_deg: f64) -> Result<ChshReport> {
    if !(angular_resolution_deg > 0.0) {
        return Err(Error::Domain("angular resolution must be positive".into()));
    }
    let t = state.correlation_tensor();
    let grid: Vec<(f64, Vector3<f64>)> = sphere_grid(DEFAULT_COARSE_MESH_DEG.to_radians())
        .into_iter()
        .map(|(th, ph)| (0.0, *UnitVector3::from_spherical(th, ph).as_vector()))
        .collect();

    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (i, (_, a)) in grid.iter().enumerate() {
        for (j, (_, d)) in grid.iter().enumerate() {
            let (value, _, _) = best_response(&t, a, d);
            if value > best.0 {
                best = (value, i, j);
            }
        }
    }

    let (ta, pa) = UnitVector3(grid[best.1].1).spherical_angles();
    let (td, pd) = UnitVector3(grid[best.2].1).spherical_angles();
    let mut angles = [ta, pa, td, pd];
    let evaluate = |x: &[f64; 4]| {
        let a = UnitVector3::from_spherical(x[0], x[1]);
        let d = UnitVector3::from_spherical(x[2], x[3]);
        best_response(&t, a.as_vector(), d.as_vector()).0
    };
    let mut current = evaluate(&angles);
    let mut step = DEFAULT_COARSE_MESH_DEG.to_radians();
    let stop = angular_resolution_deg.to_radians();
    while step >= stop {
        for _ in 0..MAX_SWEEPS_PER_STEP {
            let mut improved = false;
            for k in 0..4 {
                for delta in [step, -step] {
                    let mut trial = angles;
                    trial[k] += delta;
                    let value = evaluate(&trial);
                    if value > current {
                        current = value;
                        angles = trial;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        step *= 0.5;
    }

    let a = UnitVector3::from_spherical(angles[0], angles[1]);
    let d = UnitVector3::from_spherical(angles[2], angles[3]);
    let (_, b, c) = best_response(&t, a.as_vector(), d.as_vector());
    let settings = MeasurementSettings {
        a,
        b: UnitVector3::normalized(b)?,
        c: UnitVector3::normalized(c)?,
        d,
    };
    Ok(ChshReport::new(chsh_value(state, &settings), settings))
}
