//! Maximisation of extracted work over single-qubit unitaries.
//!
//! The energy of `U_S |psi>` is a quadratic form in the four entries of `U`.
//! Its coefficients are obtained once from four applications of the full
//! Hamiltonian, after which every trial unitary costs sixteen complex products.
//! The search itself is a dense grid in `(theta, polar, azimuth)` followed by
//! coordinate-wise golden-section refinement. The refinement moves by small
//! rotations about `X`, `Y` and `Z` composed onto the current unitary, since
//! the axis-angle chart is singular at `theta = 0` and at the poles.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{inner, DenseState, LocalUnitaryParams, Mat2, SpinHamiltonian};

/// `E(U) = sum conj(U[s][b]) U[t][d] K[s][b][t][d]`.
#[derive(Debug, Clone)]
pub struct LocalEnergyForm {
    k: [[[[Complex64; 2]; 2]; 2]; 2],
    /// Energy of the unrotated state.
    pub energy: f64,
}

impl LocalEnergyForm {
    pub fn new(state: &DenseState, h: &SpinHamiltonian, site: usize) -> Result<Self> {
        if site == 0 || site > state.sites() {
            return Err(Error::SiteOutOfRange {
                site,
                sites: state.sites(),
            });
        }
        if h.sites != state.sites() {
            return Err(Error::InvalidArgument(
                "Hamiltonian and state sizes differ".into(),
            ));
        }
        let mask = 1usize << (site - 1);
        let psi = state.amplitudes();
        // phi[s][b]: the bit-b component of psi moved onto bit value s
        let mut phi: [[Vec<Complex64>; 2]; 2] = Default::default();
        for (s, row) in phi.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = (0..psi.len())
                    .map(|idx| {
                        if ((idx & mask) != 0) as usize == s {
                            psi[if b == 1 { idx | mask } else { idx & !mask }]
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect();
            }
        }
        let mut hphi: [[Vec<Complex64>; 2]; 2] = Default::default();
        for s in 0..2 {
            for b in 0..2 {
                hphi[s][b] = h.apply(&phi[s][b]);
            }
        }
        let mut k = [[[[Complex64::new(0.0, 0.0); 2]; 2]; 2]; 2];
        for s in 0..2 {
            for b in 0..2 {
                for t in 0..2 {
                    for d in 0..2 {
                        k[s][b][t][d] = inner(&phi[s][b], &hphi[t][d]);
                    }
                }
            }
        }
        let energy = h.expectation(state);
        Ok(LocalEnergyForm { k, energy })
    }

    pub fn energy_after(&self, u: &Mat2) -> f64 {
        let mut e = Complex64::new(0.0, 0.0);
        for s in 0..2 {
            for b in 0..2 {
                let left = u[s][b].conj();
                for t in 0..2 {
                    for d in 0..2 {
                        e += left * u[t][d] * self.k[s][b][t][d];
                    }
                }
            }
        }
        e.re
    }

    pub fn work(&self, u: &LocalUnitaryParams) -> f64 {
        self.energy - self.energy_after(&u.matrix())
    }

    pub(crate) fn work_at(&self, x: [f64; 3]) -> f64 {
        self.work(&LocalUnitaryParams::from_angles(x[0], x[1], x[2]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub theta: usize,
    pub polar: usize,
    pub azimuth: usize,
    /// Final golden-section bracket width.
    pub step_tol_exp: i32,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            theta: 64,
            polar: 32,
            azimuth: 64,
            step_tol_exp: -10,
        }
    }
}

impl GridSpec {
    fn point(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            2.0 * PI * i as f64 / self.theta as f64,
            PI * j as f64 / (self.polar - 1) as f64,
            2.0 * PI * k as f64 / self.azimuth as f64,
        ]
    }

    fn steps(&self) -> [f64; 3] {
        [
            2.0 * PI / self.theta as f64,
            PI / (self.polar - 1) as f64,
            2.0 * PI / self.azimuth as f64,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BruteForce {
    /// Refined maximum of the extracted work.
    pub work: f64,
    pub params: LocalUnitaryParams,
    /// Best value on the grid alone.
    pub grid_best: f64,
}

/// Maximal work extractable by a unitary on `site`, by exhaustive search.
pub fn brute_force_ergotropy(
    state: &DenseState,
    h: &SpinHamiltonian,
    site: usize,
    grid: &GridSpec,
) -> Result<BruteForce> {
    if grid.theta < 2 || grid.polar < 2 || grid.azimuth < 2 {
        return Err(Error::InvalidArgument(
            "grid needs at least 2 points per axis".into(),
        ));
    }
    let form = LocalEnergyForm::new(state, h, site)?;

    let per_theta: Vec<Vec<f64>> = (0..grid.theta)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(grid.polar * grid.azimuth);
            for j in 0..grid.polar {
                for k in 0..grid.azimuth {
                    row.push(form.work_at(grid.point(i, j, k)));
                }
            }
            row
        })
        .collect();

    // first maximum in (i, j, k) order wins ties
    let mut ranked: Vec<(f64, usize)> = per_theta
        .iter()
        .flatten()
        .copied()
        .enumerate()
        .map(|(flat, w)| (w, flat))
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let grid_best = ranked[0].0;

    let plane = grid.polar * grid.azimuth;
    let tol = 10f64.powi(grid.step_tol_exp);
    let h = grid.steps().iter().fold(0.0f64, |a, &b| a.max(b));
    let first = index_point(grid, ranked[0].1, plane);
    let mut best = (grid_best, quat_from_angles(first));
    // refine the few best grid points; distinct basins are rare for this objective
    for &(w, flat) in ranked.iter().take(4) {
        let (rw, rq) = refine(
            &form,
            quat_from_angles(index_point(grid, flat, plane)),
            w,
            h,
            tol,
        );
        if rw > best.0 {
            best = (rw, rq);
        }
    }
    Ok(BruteForce {
        work: best.0,
        params: params_from_quat(best.1),
        grid_best,
    })
}

fn index_point(grid: &GridSpec, flat: usize, plane: usize) -> [f64; 3] {
    let i = flat / plane;
    let j = (flat % plane) / grid.azimuth;
    let k = flat % grid.azimuth;
    grid.point(i, j, k)
}

/// `U = q0 1 - i (q1 X + q2 Y + q3 Z)` with `|q| = 1`.
type Quat = [f64; 4];

fn quat_from_angles(x: [f64; 3]) -> Quat {
    let p = LocalUnitaryParams::from_angles(x[0], x[1], x[2]);
    let (c, s) = ((p.theta / 2.0).cos(), (p.theta / 2.0).sin());
    [c, s * p.n[0], s * p.n[1], s * p.n[2]]
}

fn params_from_quat(q: Quat) -> LocalUnitaryParams {
    let v = (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    if v == 0.0 {
        return LocalUnitaryParams::identity();
    }
    let theta = 2.0 * v.atan2(q[0]);
    LocalUnitaryParams {
        theta: theta.rem_euclid(2.0 * PI),
        n: [q[1] / v, q[2] / v, q[3] / v],
    }
}

/// Product `U_a U_b`.
fn quat_mul(a: Quat, b: Quat) -> Quat {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + b[0] * a[1] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] + b[0] * a[2] + a[3] * b[1] - a[1] * b[3],
        a[0] * b[3] + b[0] * a[3] + a[1] * b[2] - a[2] * b[1],
    ]
}

/// `exp(-i a (d . sigma) / 2)` for a unit vector `d`.
fn quat_step(d: [f64; 3], a: f64) -> Quat {
    let (c, s) = ((a / 2.0).cos(), (a / 2.0).sin());
    [c, s * d[0], s * d[1], s * d[2]]
}

fn quat_matrix(q: Quat) -> Mat2 {
    [
        [Complex64::new(q[0], q[3]), Complex64::new(q[2], -q[1])],
        [Complex64::new(-q[2], -q[1]), Complex64::new(q[0], -q[3])],
    ]
}

/// Rotation vector `a d` with `exp(-i a (d . sigma) / 2) = U_q` up to sign.
fn quat_log(q: Quat) -> [f64; 3] {
    let q = if q[0] < 0.0 {
        [-q[0], -q[1], -q[2], -q[3]]
    } else {
        q
    };
    let v = (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    if v == 0.0 {
        return [0.0; 3];
    }
    let a = 2.0 * v.atan2(q[0]);
    [a * q[1] / v, a * q[2] / v, a * q[3] / v]
}

/// Coordinate ascent in the chart `q -> exp(-i a sigma_k / 2) q`, which has no
/// singular points, plus a line search along each cycle's net displacement.
fn refine(form: &LocalEnergyForm, mut q: Quat, mut fx: f64, h: f64, tol: f64) -> (f64, Quat) {
    let work = |q: Quat| form.energy - form.energy_after(&quat_matrix(q));
    let line = |q: Quat, d: [f64; 3], span: f64| {
        golden_max(|a| work(quat_mul(quat_step(d, a), q)), -span, span, tol)
    };
    let mut stalls = 0;
    for _cycle in 0..2000 {
        let (before, start) = (fx, q);
        for d in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
            let (a, fa) = line(q, d, h);
            if fa > fx {
                fx = fa;
                q = quat_mul(quat_step(d, a), q);
            }
        }
        let conj = [start[0], -start[1], -start[2], -start[3]];
        let v = quat_log(quat_mul(q, conj));
        let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if len > 1e-14 {
            let d = [v[0] / len, v[1] / len, v[2] / len];
            let (a, fa) = line(q, d, 3.0 * len);
            if fa > fx {
                fx = fa;
                q = quat_mul(quat_step(d, a), q);
            }
        }
        if fx - before <= 1e-16 {
            stalls += 1;
            if stalls == 2 {
                break;
            }
        } else {
            stalls = 0;
        }
    }
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    (fx, q.map(|x| x / n))
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
