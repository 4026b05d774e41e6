//! McMurchie–Davidson kernels: Hermite expansion coefficients, Hermite Coulomb
//! integrals and the primitive one- and two-electron integrals built on them.

use std::f64::consts::PI;

use nalgebra::Vector3;

use super::boys::boys_into;

/// Hermite expansion coefficients E^{ij}_t of the 1D overlap distribution
/// (x-A)^i (x-B)^j e^{-a(x-A)²} e^{-b(x-B)²} for i ≤ i_max, j ≤ j_max.
pub(crate) struct HermiteE {
    j_dim: usize,
    t_dim: usize,
    data: Vec<f64>,
}

impl HermiteE {
    pub(crate) fn new(i_max: usize, j_max: usize, a: f64, b: f64, ax: f64, bx: f64) -> Self {
        let p = a + b;
        let q = a * b / p;
        let ab = ax - bx;
        let pa = -b * ab / p;
        let pb = a * ab / p;
        let one_over_2p = 0.5 / p;
        let j_dim = j_max + 1;
        let t_dim = i_max + j_max + 2;
        let mut e = Self {
            j_dim,
            t_dim,
            data: vec![0.0; (i_max + 1) * j_dim * t_dim],
        };
        e.set(0, 0, 0, (-q * ab * ab).exp());
        for i in 0..=i_max {
            for j in 0..=j_max {
                if i == 0 && j == 0 {
                    continue;
                }
                let (pi, pj, shift) = if i > 0 { (i - 1, j, pa) } else { (i, j - 1, pb) };
                for t in 0..=(i + j) {
                    let lower = if t > 0 { e.get(pi, pj, t - 1) } else { 0.0 };
                    let value = one_over_2p * lower + shift * e.get(pi, pj, t) + (t + 1) as f64 * e.get(pi, pj, t + 1);
                    e.set(i, j, t, value);
                }
            }
        }
        e
    }

    fn slot(&self, i: usize, j: usize, t: usize) -> usize {
        (i * self.j_dim + j) * self.t_dim + t
    }

    pub(crate) fn get(&self, i: usize, j: usize, t: usize) -> f64 {
        if t >= self.t_dim {
            return 0.0;
        }
        self.data[self.slot(i, j, t)]
    }

    fn set(&mut self, i: usize, j: usize, t: usize, value: f64) {
        let s = self.slot(i, j, t);
        self.data[s] = value;
    }
}

/// Hermite Coulomb integrals R_{tuv}(alpha, PC) for t+u+v ≤ l_max.
pub(crate) struct HermiteR {
    dim: usize,
    data: Vec<f64>,
}

impl HermiteR {
    pub(crate) fn new(l_max: usize, alpha: f64, pc: Vector3<f64>) -> Self {
        let dim = l_max + 1;
        let idx = |n: usize, t: usize, u: usize, v: usize| ((n * dim + t) * dim + u) * dim + v;
        let mut r = vec![0.0; dim * dim * dim * dim];
        let mut boys = vec![0.0; dim];
        boys_into(alpha * pc.norm_squared(), &mut boys);
        let mut factor = 1.0;
        for (n, f) in boys.iter().enumerate() {
            r[idx(n, 0, 0, 0)] = factor * f;
            factor *= -2.0 * alpha;
        }
        for total in 1..=l_max {
            for n in 0..=(l_max - total) {
                for t in 0..=total {
                    for u in 0..=(total - t) {
                        let v = total - t - u;
                        let value = if t > 0 {
                            let lower = if t > 1 {
                                (t - 1) as f64 * r[idx(n + 1, t - 2, u, v)]
                            } else {
                                0.0
                            };
                            lower + pc.x * r[idx(n + 1, t - 1, u, v)]
                        } else if u > 0 {
                            let lower = if u > 1 {
                                (u - 1) as f64 * r[idx(n + 1, t, u - 2, v)]
                            } else {
                                0.0
                            };
                            lower + pc.y * r[idx(n + 1, t, u - 1, v)]
                        } else {
                            let lower = if v > 1 {
                                (v - 1) as f64 * r[idx(n + 1, t, u, v - 2)]
                            } else {
                                0.0
                            };
                            lower + pc.z * r[idx(n + 1, t, u, v - 1)]
                        };
                        r[idx(n, t, u, v)] = value;
                    }
                }
            }
        }
        r.truncate(dim * dim * dim);
        Self { dim, data: r }
    }

    pub(crate) fn get(&self, t: usize, u: usize, v: usize) -> f64 {
        self.data[(t * self.dim + u) * self.dim + v]
    }
}

/// A primitive Cartesian Gaussian (unnormalized).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Primitive {
    pub exponent: f64,
    pub center: Vector3<f64>,
    pub powers: [usize; 3],
}

fn expansions(a: &Primitive, b: &Primitive, extra_j: usize) -> [HermiteE; 3] {
    std::array::from_fn(|k| {
        HermiteE::new(
            a.powers[k],
            b.powers[k] + extra_j,
            a.exponent,
            b.exponent,
            a.center[k],
            b.center[k],
        )
    })
}

pub(crate) fn overlap(a: &Primitive, b: &Primitive) -> f64 {
    let p = a.exponent + b.exponent;
    let e = expansions(a, b, 0);
    (0..3).map(|k| e[k].get(a.powers[k], b.powers[k], 0)).product::<f64>() * (PI / p).powf(1.5)
}

pub(crate) fn kinetic(a: &Primitive, b: &Primitive) -> f64 {
    let p = a.exponent + b.exponent;
    let beta = b.exponent;
    let e = expansions(a, b, 2);
    let s1 = (PI / p).sqrt();
    let s: [f64; 3] = std::array::from_fn(|k| e[k].get(a.powers[k], b.powers[k], 0) * s1);
    // 1D matrix element of d²/dx² acting on the ket, via exponent-shifted overlaps.
    let d: [f64; 3] = std::array::from_fn(|k| {
        let i = a.powers[k];
        let j = b.powers[k];
        let lower = if j >= 2 {
            (j * (j - 1)) as f64 * e[k].get(i, j - 2, 0)
        } else {
            0.0
        };
        (lower - 2.0 * beta * (2 * j + 1) as f64 * e[k].get(i, j, 0) + 4.0 * beta * beta * e[k].get(i, j + 2, 0)) * s1
    });
    -0.5 * (d[0] * s[1] * s[2] + s[0] * d[1] * s[2] + s[0] * s[1] * d[2])
}

/// ⟨a| 1/|r-C| |b⟩ (positive; the caller applies -Z).
pub(crate) fn potential(a: &Primitive, b: &Primitive, c: &Vector3<f64>) -> f64 {
    let p = a.exponent + b.exponent;
    let center_p = (a.exponent * a.center + b.exponent * b.center) / p;
    let e = expansions(a, b, 0);
    let l = a.powers.iter().sum::<usize>() + b.powers.iter().sum::<usize>();
    let r = HermiteR::new(l, p, center_p - c);
    let mut sum = 0.0;
    for t in 0..=(a.powers[0] + b.powers[0]) {
        let ex = e[0].get(a.powers[0], b.powers[0], t);
        for u in 0..=(a.powers[1] + b.powers[1]) {
            let ey = e[1].get(a.powers[1], b.powers[1], u);
            for v in 0..=(a.powers[2] + b.powers[2]) {
                sum += ex * ey * e[2].get(a.powers[2], b.powers[2], v) * r.get(t, u, v);
            }
        }
    }
    2.0 * PI / p * sum
}

/// (ab|cd) in chemists' notation.
pub(crate) fn repulsion(a: &Primitive, b: &Primitive, c: &Primitive, d: &Primitive) -> f64 {
    let p = a.exponent + b.exponent;
    let q = c.exponent + d.exponent;
    let center_p = (a.exponent * a.center + b.exponent * b.center) / p;
    let center_q = (c.exponent * c.center + d.exponent * d.center) / q;
    let alpha = p * q / (p + q);
    let bra = expansions(a, b, 0);
    let ket = expansions(c, d, 0);
    let bra_max: [usize; 3] = std::array::from_fn(|k| a.powers[k] + b.powers[k]);
    let ket_max: [usize; 3] = std::array::from_fn(|k| c.powers[k] + d.powers[k]);
    let l = bra_max.iter().sum::<usize>() + ket_max.iter().sum::<usize>();
    let r = HermiteR::new(l, alpha, center_p - center_q);

    let mut sum = 0.0;
    for t in 0..=bra_max[0] {
        let e1 = bra[0].get(a.powers[0], b.powers[0], t);
        for u in 0..=bra_max[1] {
            let e2 = e1 * bra[1].get(a.powers[1], b.powers[1], u);
            for v in 0..=bra_max[2] {
                let e_bra = e2 * bra[2].get(a.powers[2], b.powers[2], v);
                if e_bra == 0.0 {
                    continue;
                }
                let mut inner = 0.0;
                for tau in 0..=ket_max[0] {
                    let f1 = ket[0].get(c.powers[0], d.powers[0], tau);
                    for nu in 0..=ket_max[1] {
                        let f2 = f1 * ket[1].get(c.powers[1], d.powers[1], nu);
                        for phi in 0..=ket_max[2] {
                            let sign = if (tau + nu + phi) % 2 == 0 { 1.0 } else { -1.0 };
                            inner +=
                                sign * f2 * ket[2].get(c.powers[2], d.powers[2], phi) * r.get(t + tau, u + nu, v + phi);
                        }
                    }
                }
                sum += e_bra * inner;
            }
        }
    }
    2.0 * PI.powf(2.5) / (p * q * (p + q).sqrt()) * sum
}
