//! Closed-form local ergotropy of a single site.
//!
//! For a pure state and a single-qubit subsystem `S` the maximal work extractable
//! by a unitary on `S` is a function of a real 3x3 matrix `M`:
//!
//! ```text
//! LE = Tr(|M| - M)                  if det M >= 0
//! LE = Tr(|M| - M) - 2 sigma_min(M) if det M <  0
//! ```
//!
//! For one-excitation states `M` is block diagonal, with `m_xx = m_yy`,
//! `m_xy = -m_yx` and a lone `m_zz`, so its singular values are known in closed
//! form: `sqrt(m_xx^2 + m_xy^2)` (twice) and `|m_zz|`.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CouplingTable, PureState1x};

/// Default tolerance (absolute energy) for tagging a Pauli rotation as optimal.
pub const OPTIMAL_TOL: f64 = 1e-9;

/// Nearest-neighbour correlators at one site.
///
/// `Cyy = Cxx` and `Cyx = -Cxy` in the one-excitation sector, so only the
/// independent pair is stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSet {
    /// `<X_S (X_{S-1} + X_{S+1})>`
    pub cxx: f64,
    /// `<X_S (Y_{S-1} + Y_{S+1})>`
    pub cxy: f64,
    /// `<Z_S>`
    pub mz: f64,
}

impl CorrelationSet {
    pub fn cyy(&self) -> f64 {
        self.cxx
    }

    pub fn cyx(&self) -> f64 {
        -self.cxy
    }

    /// `sqrt(Cxx^2 + Cxy^2) / |Mz|`, `+inf` when `Mz = 0`.
    pub fn g_ratio(&self) -> f64 {
        let num = self.cxx.hypot(self.cxy);
        if self.mz == 0.0 {
            f64::INFINITY
        } else {
            num / self.mz.abs()
        }
    }
}

pub fn correlations_1x(state: &PureState1x, site: usize) -> Result<CorrelationSet> {
    state.check_site(site)?;
    let s = site as isize;
    let fs = state.amp(s);
    let nb = state.amp(s - 1) + state.amp(s + 1);
    let cross = fs.conj() * nb;
    Ok(CorrelationSet {
        cxx: 2.0 * cross.re,
        // i (z - z*) = -2 Im z
        cxy: -2.0 * cross.im,
        mz: 2.0 * fs.norm_sqr() - 1.0,
    })
}

/// Which case of the determinant rule produced the ergotropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `det M >= 0`
    Psd,
    /// `det M < 0`
    Nd,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Psd => "psd",
            Branch::Nd => "nd",
        }
    }
}

/// Row/column order is `x, y, z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MMatrix3(pub Matrix3<f64>);

impl MMatrix3 {
    pub fn zeros() -> Self {
        MMatrix3(Matrix3::zeros())
    }

    /// Matrix with the one-excitation block pattern.
    pub fn block(m_xx: f64, m_xy: f64, m_zz: f64) -> Self {
        MMatrix3(Matrix3::new(
            m_xx, m_xy, 0.0, -m_xy, m_xx, 0.0, 0.0, 0.0, m_zz,
        ))
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn m_xx(&self) -> f64 {
        self.0[(0, 0)]
    }

    pub fn m_xy(&self) -> f64 {
        self.0[(0, 1)]
    }

    pub fn m_zz(&self) -> f64 {
        self.0[(2, 2)]
    }

    /// Largest of `|m_xz|, |m_yz|, |m_zx|, |m_zy|`.
    pub fn z_offblock(&self) -> f64 {
        let m = &self.0;
        [m[(0, 2)], m[(1, 2)], m[(2, 0)], m[(2, 1)]]
            .iter()
            .fold(0.0, |a, v| a.max(v.abs()))
    }

    /// True when the matrix has exactly the one-excitation block pattern.
    pub fn is_block(&self) -> bool {
        let m = &self.0;
        self.z_offblock() == 0.0 && m[(0, 0)] == m[(1, 1)] && m[(0, 1)] == -m[(1, 0)]
    }

    pub fn max_abs_diff(&self, other: &MMatrix3) -> f64 {
        (self.0 - other.0).amax()
    }
}

/// `M` of a one-excitation state at `site` for an arbitrary ring coupling.
///
/// `m_xx = -sum_j J_Sj (f_S* f_j + c.c.)`, `m_xy = -i sum_j J_Sj (f_S* f_j - c.c.)`,
/// `m_zz = Delta (1 - 2 |f_S|^2)`.
pub fn m_matrix_1x(state: &PureState1x, table: &CouplingTable, site: usize) -> Result<MMatrix3> {
    state.check_site(site)?;
    if table.sites != state.sites() {
        return Err(Error::InvalidArgument(format!(
            "table for {} sites, state has {}",
            table.sites,
            state.sites()
        )));
    }
    let f = state.amplitudes();
    let fs = f[site - 1];
    let (mut m_xx, mut m_xy) = (0.0, 0.0);
    for (idx, fj) in f.iter().enumerate() {
        let j = idx + 1;
        if j == site {
            continue;
        }
        let jsj = table.pair(site, j);
        if jsj == 0.0 {
            continue;
        }
        let z = fs.conj() * fj;
        m_xx -= 2.0 * jsj * z.re;
        m_xy += 2.0 * jsj * z.im;
    }
    let m_zz = table.delta * (1.0 - 2.0 * fs.norm_sqr());
    Ok(MMatrix3::block(m_xx, m_xy, m_zz))
}

/// Local ergotropy from `M`, with the branch that fired.
pub fn ergotropy_from_m(m: &MMatrix3) -> (f64, Branch) {
    if m.is_block() {
        let s = m.m_xx().hypot(m.m_xy());
        let (mxx, mzz) = (m.m_xx(), m.m_zz());
        let det = s * s * mzz;
        if det >= 0.0 {
            (2.0 * (s - mxx) + mzz.abs() - mzz, Branch::Psd)
        } else {
            (2.0 * (s.max(mzz.abs()) - mxx), Branch::Nd)
        }
    } else {
        ergotropy_from_m_svd(m)
    }
}

/// General route through the singular value decomposition.
pub fn ergotropy_from_m_svd(m: &MMatrix3) -> (f64, Branch) {
    let sv = m.0.singular_values();
    let base = sv.sum() - m.0.trace();
    if m.0.determinant() >= 0.0 {
        (base, Branch::Psd)
    } else {
        // 1 / ||M^-1|| is the smallest singular value
        (base - 2.0 * sv.min(), Branch::Nd)
    }
}

pub fn local_ergotropy_1x(
    state: &PureState1x,
    table: &CouplingTable,
    site: usize,
) -> Result<(f64, Branch)> {
    Ok(ergotropy_from_m(&m_matrix_1x(state, table, site)?))
}

/// Closed form for `(|l1> + e^{i phi21} |l2>) / sqrt(2)` on a
/// nearest-neighbour ring with `L > 4`.
pub fn two_current_ergotropy(
    sites: usize,
    l1: i64,
    l2: i64,
    phi21: f64,
    j: f64,
    delta: f64,
    site: usize,
) -> Result<f64> {
    if sites <= 4 {
        return Err(Error::InvalidArgument(format!(
            "closed two-current form needs L > 4, got {sites}; use local_ergotropy_1x"
        )));
    }
    if j == 0.0 {
        return Err(Error::InvalidArgument(
            "J = 0 leaves |Delta/J| undefined".into(),
        ));
    }
    if (l1 - l2).rem_euclid(sites as i64) == 0 {
        return Err(Error::InvalidState("windings coincide modulo L".into()));
    }
    if site == 0 || site > sites {
        return Err(Error::SiteOutOfRange { site, sites });
    }
    let lf = sites as f64;
    let k1 = 2.0 * PI * l1 as f64 / lf;
    let k2 = 2.0 * PI * l2 as f64 / lf;
    let (c1, c2) = (k1.cos(), k2.cos());
    let phase = (k1 - k2) * site as f64 - phi21;
    let (cp, sp) = (phase.cos(), phase.sin());

    let root = ((c1 + c2).powi(2) * (1.0 + cp).powi(2) + (c1 - c2).powi(2) * sp * sp).sqrt();
    let hop = (c1 + c2) * (1.0 + cp);
    let mz = 2.0 / lf * (1.0 + cp) - 1.0;

    let above = 4.0 / lf * (j.abs() * root + j * hop);
    let below = 2.0 * delta.abs() * mz.abs() + 4.0 * j / lf * hop;

    // Mz < 0 for L > 4, so m_zz has the sign of Delta
    if delta >= 0.0 {
        return Ok(above);
    }
    let g = 2.0 / lf * root / mz.abs();
    Ok(if (delta / j).abs() > g { below } else { above })
}

/// Homogeneous ergotropy of the current state `|ell>` on a nearest-neighbour ring.
pub fn single_current_ergotropy(sites: usize, ell: i64, j: f64, delta: f64) -> f64 {
    let lf = sites as f64;
    let c = (2.0 * PI * ell as f64 / lf).cos();
    // branch switch at (L - 2)|Delta| = 4 |J cos k|
    if delta >= 0.0 || (lf - 2.0) * delta.abs() <= 4.0 * (j * c).abs() {
        8.0 / lf * (j.abs() * c.abs() + j * c)
    } else {
        2.0 / lf * (delta.abs() * (lf - 2.0) + 4.0 * j * c)
    }
}

/// `g^(l) = 4 |cos(2 pi l / L)| / (L - 2)`.
pub fn single_current_threshold(sites: usize, ell: i64) -> f64 {
    4.0 * (2.0 * PI * ell as f64 / sites as f64).cos().abs() / (sites as f64 - 2.0)
}

/// Work extracted by `X_S` and `Z_S` on a one-excitation state.
///
/// `W_x = 2 (Delta Mz - m_xx)` and `W_z = -4 m_xx`; on a nearest-neighbour ring
/// these are `2 (J Cxx + Delta Mz)` and `4 J Cxx`.
pub fn xz_work(state: &PureState1x, table: &CouplingTable, site: usize) -> Result<(f64, f64)> {
    let m = m_matrix_1x(state, table, site)?;
    let mz = 2.0 * state.amp(site as isize).norm_sqr() - 1.0;
    Ok((2.0 * (table.delta * mz - m.m_xx()), -4.0 * m.m_xx()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiteErgotropy {
    pub site: usize,
    pub le: f64,
    pub branch: Branch,
    pub g_s: f64,
    pub wx: f64,
    pub wz: f64,
    pub delta_x: f64,
    pub delta_z: f64,
    pub convexity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgotropyProfile {
    pub sites: Vec<SiteErgotropy>,
}

impl ErgotropyProfile {
    pub fn le(&self) -> Vec<f64> {
        self.sites.iter().map(|s| s.le).collect()
    }

    pub fn max_le(&self) -> f64 {
        self.sites
            .iter()
            .map(|s| s.le)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean_le(&self) -> f64 {
        self.sites.iter().map(|s| s.le).sum::<f64>() / self.sites.len() as f64
    }

    /// Ring average of `le - W_x`.
    pub fn mean_delta_x(&self) -> f64 {
        self.sites.iter().map(|s| s.delta_x).sum::<f64>() / self.sites.len() as f64
    }

    /// Ring average of `le - W_z`.
    pub fn mean_delta_z(&self) -> f64 {
        self.sites.iter().map(|s| s.delta_z).sum::<f64>() / self.sites.len() as f64
    }

    /// 1-based site.
    pub fn at(&self, site: usize) -> &SiteErgotropy {
        &self.sites[site - 1]
    }
}

/// `g_S` generalised to any coupling: `sqrt(m_xx^2 + m_xy^2) / (|J_1| |Mz|)`.
fn g_ratio(m: &MMatrix3, mz: f64, j_ref: f64) -> f64 {
    let num = m.m_xx().hypot(m.m_xy());
    if mz == 0.0 {
        return f64::INFINITY;
    }
    if j_ref == 0.0 {
        return if num == 0.0 { 0.0 } else { f64::INFINITY };
    }
    num / (j_ref.abs() * mz.abs())
}

/// Second difference `E_{S+1} - 2 E_S + E_{S-1}` with periodic neighbours.
pub fn convexity(values: &[f64]) -> Vec<f64> {
    let l = values.len();
    (0..l)
        .map(|s| values[(s + 1) % l] - 2.0 * values[s] + values[(s + l - 1) % l])
        .collect()
}

pub fn profile(state: &PureState1x, table: &CouplingTable) -> Result<ErgotropyProfile> {
    let l = state.sites();
    let mut sites = Vec::with_capacity(l);
    for site in 1..=l {
        let m = m_matrix_1x(state, table, site)?;
        let (le, branch) = ergotropy_from_m(&m);
        let mz = 2.0 * state.amp(site as isize).norm_sqr() - 1.0;
        let wx = 2.0 * (table.delta * mz - m.m_xx());
        let wz = -4.0 * m.m_xx();
        sites.push(SiteErgotropy {
            site,
            le,
            branch,
            g_s: g_ratio(&m, mz, table.reference_hop()),
            wx,
            wz,
            delta_x: le - wx,
            delta_z: le - wz,
            convexity: 0.0,
        });
    }
    let le: Vec<f64> = sites.iter().map(|s| s.le).collect();
    for (s, c) in sites.iter_mut().zip(convexity(&le)) {
        s.convexity = c;
    }
    Ok(ErgotropyProfile { sites })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OptimalTransform {
    XOptimal,
    ZOptimal,
    ZQuasi,
    Other,
}

impl OptimalTransform {
    pub fn as_str(&self) -> &'static str {
        match self {
            OptimalTransform::XOptimal => "x_optimal",
            OptimalTransform::ZOptimal => "z_optimal",
            OptimalTransform::ZQuasi => "z_quasi",
            OptimalTransform::Other => "other",
        }
    }
}

/// Tags each site; X takes precedence when both rotations are optimal.
pub fn optimal_transform_map(profile: &ErgotropyProfile, tol: f64) -> Vec<OptimalTransform> {
    profile
        .sites
        .iter()
        .map(|s| {
            if s.delta_x <= tol {
                OptimalTransform::XOptimal
            } else if s.delta_z <= tol {
                OptimalTransform::ZOptimal
            } else if s.delta_z < s.delta_x {
                OptimalTransform::ZQuasi
            } else {
                OptimalTransform::Other
            }
        })
        .collect()
}
