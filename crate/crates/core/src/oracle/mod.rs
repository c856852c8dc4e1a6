//! Brute-force reference in the full `2^L` Hilbert space.
//!
//! Nothing in here uses the closed-form results of [`crate::ergotropy`]; it
//! only builds states and Hamiltonians, rotates one qubit and measures energy.

mod hamiltonian;
mod search;
mod trace;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PureState1x;

pub use hamiltonian::{
    build_hamiltonian, inner, xy_terms, HamiltonianSplit, Mat2, Pauli, PauliSum, PauliTerm,
    SpinHamiltonian, SIGMA,
};
pub use search::{brute_force_ergotropy, BruteForce, GridSpec, LocalEnergyForm};
pub use trace::{m_matrix_direct, reduced_site_density};

/// Largest ring the oracle accepts.
pub const ORACLE_MAX_SITES: usize = 14;
/// Largest ring for which explicit matrices are built.
pub const EXPLICIT_MAX_SITES: usize = 10;

pub(crate) fn check_cap(sites: usize) -> Result<()> {
    if sites > ORACLE_MAX_SITES {
        return Err(Error::OracleCap {
            sites,
            cap: ORACLE_MAX_SITES,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    sites: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn new(sites: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_cap(sites)?;
        if amps.len() != 1 << sites {
            return Err(Error::InvalidState(format!(
                "expected {} amplitudes, got {}",
                1usize << sites,
                amps.len()
            )));
        }
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (n2 - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(n2));
        }
        Ok(DenseState { sites, amps })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies every amplitude by `e^{i phase}`.
    pub fn with_global_phase(&self, phase: f64) -> DenseState {
        let w = Complex64::from_polar(1.0, phase);
        DenseState {
            sites: self.sites,
            amps: self.amps.iter().map(|a| a * w).collect(),
        }
    }

    /// Total weight in the sector with `n` up spins.
    pub fn sector_weight(&self, n: u32) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(b, _)| b.count_ones() == n)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Applies a 2x2 unitary (bit basis) on a 1-based site.
    pub fn apply_local(&self, site: usize, u: &Mat2) -> DenseState {
        let mask = 1usize << (site - 1);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for b in 0..self.amps.len() {
            if b & mask != 0 {
                continue;
            }
            let (a0, a1) = (self.amps[b], self.amps[b | mask]);
            out[b] = u[0][0] * a0 + u[0][1] * a1;
            out[b | mask] = u[1][0] * a0 + u[1][1] * a1;
        }
        DenseState {
            sites: self.sites,
            amps: out,
        }
    }
}

/// Places a one-excitation wavefunction in the full space.
pub fn embed_1x(state: &PureState1x) -> Result<DenseState> {
    let l = state.sites();
    check_cap(l)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << l];
    for (idx, f) in state.amplitudes().iter().enumerate() {
        amps[1 << idx] = *f;
    }
    DenseState::new(l, amps)
}

/// `U = cos(theta/2) 1 - i sin(theta/2) n.sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalUnitaryParams {
    pub theta: f64,
    pub n: [f64; 3],
}

impl LocalUnitaryParams {
    pub fn new(theta: f64, n: [f64; 3]) -> Result<Self> {
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "rotation axis has norm {norm}"
            )));
        }
        Ok(LocalUnitaryParams {
            theta: theta.rem_euclid(2.0 * PI),
            n,
        })
    }

    /// Axis from polar and azimuthal angles.
    pub fn from_angles(theta: f64, polar: f64, azimuth: f64) -> Self {
        let n = [
            polar.sin() * azimuth.cos(),
            polar.sin() * azimuth.sin(),
            polar.cos(),
        ];
        LocalUnitaryParams {
            theta: theta.rem_euclid(2.0 * PI),
            n,
        }
    }

    pub fn identity() -> Self {
        LocalUnitaryParams {
            theta: 0.0,
            n: [0.0, 0.0, 1.0],
        }
    }

    /// `X` up to a global phase.
    pub fn pauli_x() -> Self {
        LocalUnitaryParams {
            theta: PI,
            n: [1.0, 0.0, 0.0],
        }
    }

    /// `Z` up to a global phase.
    pub fn pauli_z() -> Self {
        LocalUnitaryParams {
            theta: PI,
            n: [0.0, 0.0, 1.0],
        }
    }

    pub fn matrix(&self) -> Mat2 {
        let (c, s) = ((self.theta / 2.0).cos(), (self.theta / 2.0).sin());
        let mut u = [
            [Complex64::new(c, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(c, 0.0)],
        ];
        for (axis, p) in SIGMA.iter().enumerate() {
            let m = p.matrix();
            for r in 0..2 {
                for k in 0..2 {
                    u[r][k] += Complex64::new(0.0, -s * self.n[axis]) * m[r][k];
                }
            }
        }
        u
    }
}

/// `<psi|H|psi> - <U_S psi|H|U_S psi>`.
pub fn extracted_work(
    state: &DenseState,
    h: &SpinHamiltonian,
    site: usize,
    u: &LocalUnitaryParams,
) -> Result<f64> {
    if site == 0 || site > state.sites() {
        return Err(Error::SiteOutOfRange {
            site,
            sites: state.sites(),
        });
    }
    let rotated = state.apply_local(site, &u.matrix());
    Ok(h.expectation(state) - h.expectation(&rotated))
}
