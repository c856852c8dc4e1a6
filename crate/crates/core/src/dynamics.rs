//! Exact evolution in the one-excitation sector.
//!
//! The hopping block is circulant, so plane waves `e^{i k_l j} / sqrt(L)` are
//! its eigenvectors and evolution is a phase per mode. The field contributes
//! the same constant `Delta (2 - L)` to every one-excitation state and is
//! dropped from the phases.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ergotropy::{profile, ErgotropyProfile};
use crate::error::{Error, Result};
use crate::model::{
    coupling_table, superposition_state, CouplingTable, PureState1x, RingSpec, WindingSet,
};

/// Weight below which a plane-wave mode counts as absent.
const MODE_EPS: f64 = 1e-10;

/// Hopping energies `E_l`, `l = 0..L-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub sites: usize,
    pub energies: Vec<f64>,
}

impl Spectrum {
    /// `E_l = 2 sum'_k J_|k| cos(2 pi l k / L)` for `k = -floor(L/2)..=floor(L/2)`, `k != 0`.
    ///
    /// For even `L` the two terms `k = +-L/2` describe the same bond and each
    /// gets half weight.
    pub fn from_table(table: &CouplingTable) -> Self {
        let l = table.sites;
        let energies = (0..l)
            .map(|ell| {
                // the +-k terms are equal; reducing l k mod L makes E_l = E_{L-l} bit for bit
                (1..=l / 2)
                    .map(|k| {
                        let w = if 2 * k == l { 1.0 } else { 2.0 };
                        let r = (ell * k) % l;
                        let r = r.min(l - r);
                        w * 2.0 * table.hop(k) * (2.0 * PI * r as f64 / l as f64).cos()
                    })
                    .sum()
            })
            .collect();
        Spectrum { sites: l, energies }
    }

    /// Energy of winding `ell`, any integer.
    pub fn energy(&self, ell: i64) -> f64 {
        self.energies[ell.rem_euclid(self.sites as i64) as usize]
    }

    /// `2 pi / |E_l1 - E_l2|`; infinite for degenerate windings.
    pub fn beat_period(&self, l1: i64, l2: i64) -> f64 {
        2.0 * PI / (self.energy(l1) - self.energy(l2)).abs()
    }
}

/// Spectrum of a validated ring.
///
/// # Panics
/// If `spec` fails [`RingSpec::validate`].
pub fn spectrum(spec: &RingSpec) -> Spectrum {
    Spectrum::from_table(&coupling_table(spec, 0.0).expect("invalid ring spec"))
}

/// The `L x L` one-excitation hopping matrix, entries `2 J_ij`.
pub fn hopping_block(table: &CouplingTable) -> DMatrix<f64> {
    let l = table.sites;
    DMatrix::from_fn(l, l, |r, c| {
        if r == c {
            0.0
        } else {
            2.0 * table.pair(r + 1, c + 1)
        }
    })
}

fn plane_wave(sites: usize, ell: usize, site: usize) -> Complex64 {
    let k = 2.0 * PI * ell as f64 / sites as f64;
    Complex64::from_polar(1.0 / (sites as f64).sqrt(), k * site as f64)
}

#[derive(Debug, Clone)]
pub struct Propagator {
    pub spectrum: Spectrum,
    /// `basis[l][j - 1] = e^{i k_l j} / sqrt(L)`.
    basis: Vec<Vec<Complex64>>,
}

impl Propagator {
    pub fn new(table: &CouplingTable) -> Self {
        let l = table.sites;
        let basis = (0..l)
            .map(|ell| (1..=l).map(|j| plane_wave(l, ell, j)).collect())
            .collect();
        Propagator {
            spectrum: Spectrum::from_table(table),
            basis,
        }
    }

    pub fn sites(&self) -> usize {
        self.spectrum.sites
    }

    /// Plane-wave coefficients `c_l = <l|f>`.
    pub fn modes(&self, state: &PureState1x) -> Result<Vec<Complex64>> {
        if state.sites() != self.sites() {
            return Err(Error::InvalidArgument(format!(
                "propagator for {} sites, state has {}",
                self.sites(),
                state.sites()
            )));
        }
        let f = state.amplitudes();
        Ok(self
            .basis
            .iter()
            .map(|b| b.iter().zip(f).map(|(p, a)| p.conj() * a).sum())
            .collect())
    }

    fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let l = self.sites();
        let mut out = vec![Complex64::new(0.0, 0.0); l];
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, p) in out.iter_mut().zip(b) {
                *o += c * p;
            }
        }
        out
    }

    /// `e^{-i H t} f`, field phase omitted.
    pub fn evolve(&self, state: &PureState1x, t: f64) -> Result<PureState1x> {
        let coeffs: Vec<Complex64> = self
            .modes(state)?
            .iter()
            .zip(&self.spectrum.energies)
            .map(|(c, e)| c * Complex64::from_polar(1.0, -e * t))
            .collect();
        Ok(PureState1x::from_unitary_image(self.synthesize(&coeffs)))
    }

    /// `(l1, l2, phi21)` when the state is an equal-weight superposition of
    /// exactly two plane waves, `|l1> + e^{i phi21} |l2>` with `l1 < l2`.
    pub fn two_current_content(&self, state: &PureState1x) -> Result<Option<(i64, i64, f64)>> {
        let modes = self.modes(state)?;
        let present: Vec<usize> = (0..modes.len())
            .filter(|&l| modes[l].norm_sqr() > MODE_EPS)
            .collect();
        if present.len() != 2 {
            return Ok(None);
        }
        let (a, b) = (modes[present[0]], modes[present[1]]);
        if (a.norm_sqr() - b.norm_sqr()).abs() > 1e-8 {
            return Ok(None);
        }
        Ok(Some((present[0] as i64, present[1] as i64, (b / a).arg())))
    }
}

pub fn evolve_1x(state: &PureState1x, table: &CouplingTable, t: f64) -> Result<PureState1x> {
    Propagator::new(table).evolve(state, t)
}

/// `phi21 + (E_l1 - E_l2) t`.
pub fn advanced_phase(spectrum: &Spectrum, l1: i64, l2: i64, phi21: f64, t: f64) -> f64 {
    phi21 + (spectrum.energy(l1) - spectrum.energy(l2)) * t
}

/// `max_j |a_j - e^{i theta} b_j|` with the global phase `theta` aligned.
pub fn phase_aligned_distance(a: &PureState1x, b: &PureState1x) -> f64 {
    let overlap: Complex64 = b
        .amplitudes()
        .iter()
        .zip(a.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum();
    let w = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - w * y).norm())
        .fold(0.0, f64::max)
}

/// Times `0, dt, 2 dt, ...` up to `t_max` inclusive.
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "bad time grid t_max={t_max}, dt={dt}"
        )));
    }
    let n = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| i as f64 * dt).collect())
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PureState1x>,
    pub profiles: Vec<ErgotropyProfile>,
    pub table: CouplingTable,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// LE at one site along the trajectory.
    pub fn site_series(&self, site: usize) -> Vec<f64> {
        self.profiles.iter().map(|p| p.at(site).le).collect()
    }

    pub fn max_le_series(&self) -> Vec<f64> {
        self.profiles.iter().map(|p| p.max_le()).collect()
    }
}

pub fn ergotropy_trajectory(
    state0: &PureState1x,
    table: &CouplingTable,
    times: &[f64],
) -> Result<Trajectory> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    if times
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::InvalidArgument(
            "times must be strictly increasing".into(),
        ));
    }
    let prop = Propagator::new(table);
    let computed: Result<Vec<(PureState1x, ErgotropyProfile)>> = times
        .par_iter()
        .map(|&t| {
            let s = prop.evolve(state0, t)?;
            let p = profile(&s, table)?;
            Ok((s, p))
        })
        .collect();
    let (states, profiles) = computed?.into_iter().unzip();
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        profiles,
        table: table.clone(),
    })
}

/// Times in `[0, t_max]` at which a two-current profile is the initial one
/// translated by `m` sites: `(E_l1 - E_l2) t = 2 pi (l1 - l2) m / L mod 2 pi`.
pub fn shift_times(spectrum: &Spectrum, l1: i64, l2: i64, t_max: f64) -> Vec<(f64, usize)> {
    let l = spectrum.sites;
    let omega = spectrum.energy(l1) - spectrum.energy(l2);
    if omega == 0.0 {
        return vec![(0.0, 0)];
    }
    let dk = 2.0 * PI * (l1 - l2) as f64 / l as f64;
    let period = 2.0 * PI / omega.abs();
    let mut out = Vec::new();
    for m in 0..l {
        // omega t = dk m mod 2 pi
        let mut t = (dk * m as f64 / omega).rem_euclid(period);
        if period - t < 1e-12 * period {
            t = 0.0;
        }
        while t <= t_max {
            out.push((t, m));
            t += period;
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    out.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 && a.1 == b.1);
    out
}

/// `max_S |a(S) - b(S - m)|`, sites periodic.
pub fn shifted_deviation(a: &[f64], b: &[f64], m: usize) -> f64 {
    let l = a.len();
    (0..l)
        .map(|s| (a[s] - b[(s + l - m % l) % l]).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftKind {
    /// Compared with the initial profile translated by the given number of sites.
    Shift(usize),
    /// Compared with the profile of the phase-advanced two-current state.
    Analytic,
    /// Not a two-current state: smallest deviation over all translations.
    BestShift(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftSample {
    pub t: f64,
    pub drift: f64,
    pub kind: DriftKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub applicable: bool,
    pub windings: Option<(i64, i64)>,
    pub samples: Vec<DriftSample>,
}

impl DriftReport {
    pub fn max_drift(&self) -> f64 {
        self.samples.iter().map(|s| s.drift).fold(0.0, f64::max)
    }
}

/// How far the LE profile is from a rigid rotation of the initial one.
///
/// For a two-current state, a sample within `window` (in time) of a shift time
/// is compared with the translated initial profile and any other sample with
/// the profile of the phase-advanced state. Other states report the smallest
/// deviation over all translations and are marked non-applicable.
pub fn chirality_drift(traj: &Trajectory, window: f64) -> Result<DriftReport> {
    if traj.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    let prop = Propagator::new(&traj.table);
    let initial = traj.profiles[0].le();
    let l = traj.table.sites;
    let content = prop.two_current_content(&traj.states[0])?;
    let t0 = traj.times[0];

    let samples: Result<Vec<DriftSample>> = traj
        .times
        .par_iter()
        .zip(&traj.profiles)
        .map(|(&t, p)| {
            let le = p.le();
            let Some((l1, l2, phi0)) = content else {
                let (m, drift) = (0..l)
                    .map(|m| (m, shifted_deviation(&le, &initial, m)))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("nonempty ring");
                return Ok(DriftSample {
                    t,
                    drift,
                    kind: DriftKind::BestShift(m),
                });
            };
            let spec = &prop.spectrum;
            let omega = spec.energy(l1) - spec.energy(l2);
            let dk = 2.0 * PI * (l1 - l2) as f64 / l as f64;
            let nearest = (0..l)
                .map(|m| {
                    let r = (omega * (t - t0) - dk * m as f64 + PI).rem_euclid(2.0 * PI) - PI;
                    (
                        m,
                        if omega == 0.0 {
                            if r.abs() < 1e-15 {
                                0.0
                            } else {
                                f64::INFINITY
                            }
                        } else {
                            (r / omega).abs()
                        },
                    )
                })
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty ring");
            if nearest.1 <= window {
                let m = nearest.0;
                return Ok(DriftSample {
                    t,
                    drift: shifted_deviation(&le, &initial, m),
                    kind: DriftKind::Shift(m),
                });
            }
            let phi = advanced_phase(spec, l1, l2, phi0, t - t0);
            let expected = profile(
                &superposition_state(l, &WindingSet::pair(l1, l2, phi))?,
                &traj.table,
            )?;
            let drift = le
                .iter()
                .zip(expected.le())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(DriftSample {
                t,
                drift,
                kind: DriftKind::Analytic,
            })
        })
        .collect();
    Ok(DriftReport {
        applicable: content.is_some(),
        windings: content.map(|(a, b, _)| (a, b)),
        samples: samples?,
    })
}

/// Mean spacing of upward crossings of the series mean, in time units.
///
/// `None` when fewer than two crossings are found.
pub fn oscillation_period(series: &[f64], dt: f64) -> Option<f64> {
    if series.len() < 3 {
        return None;
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let spread = series.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max);
    if spread < 1e-12 {
        return None;
    }
    let mut crossings = Vec::new();
    for (i, w) in series.windows(2).enumerate() {
        let (a, b) = (w[0] - mean, w[1] - mean);
        if a < 0.0 && b >= 0.0 {
            crossings.push((i as f64 + a / (a - b)) * dt);
        }
    }
    if crossings.len() < 2 {
        return None;
    }
    Some((crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64)
}
