//! Partial traces over one site by index arithmetic.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

use crate::ergotropy::MMatrix3;
use crate::error::{Error, Result};

use super::{
    DenseState, HamiltonianSplit, Mat2, Pauli, SpinHamiltonian, EXPLICIT_MAX_SITES, SIGMA,
};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Full index of (site bit `a`, environment index `e`).
fn compose(site: usize, a: usize, e: usize) -> usize {
    let low = e & ((1 << (site - 1)) - 1);
    let high = (e >> (site - 1)) << site;
    high | (a << (site - 1)) | low
}

/// `rho_S = Tr_E |psi><psi|` in the bit basis.
pub fn reduced_site_density(state: &DenseState, site: usize) -> Result<Mat2> {
    let l = state.sites();
    if site == 0 || site > l {
        return Err(Error::SiteOutOfRange { site, sites: l });
    }
    let psi = state.amplitudes();
    let mut rho = [[ZERO; 2]; 2];
    for e in 0..(1usize << (l - 1)) {
        for a in 0..2 {
            for b in 0..2 {
                rho[a][b] += psi[compose(site, a, e)] * psi[compose(site, b, e)].conj();
            }
        }
    }
    Ok(rho)
}

/// `Tr_S{A rho}` for `rho = |psi><psi|`.
fn env_state(psi: &[Complex64], site: usize, env_dim: usize, a_op: &Mat2) -> DMatrix<Complex64> {
    DMatrix::from_fn(env_dim, env_dim, |e, f| {
        let mut z = ZERO;
        for a in 0..2 {
            for b in 0..2 {
                let w = a_op[a][b];
                if w != ZERO {
                    z += w * psi[compose(site, b, e)] * psi[compose(site, a, f)].conj();
                }
            }
        }
        z
    })
}

/// `Tr_S{A V}` for an operator `V` on the full space.
fn env_operator(
    v: &DMatrix<Complex64>,
    site: usize,
    env_dim: usize,
    a_op: &Mat2,
) -> DMatrix<Complex64> {
    DMatrix::from_fn(env_dim, env_dim, |e, f| {
        let mut z = ZERO;
        for a in 0..2 {
            for b in 0..2 {
                let w = a_op[a][b];
                if w != ZERO {
                    z += w * v[(compose(site, b, e), compose(site, a, f))];
                }
            }
        }
        z
    })
}

/// The single-site Hamiltonian as a 2x2 matrix.
fn system_matrix(split: &HamiltonianSplit) -> Mat2 {
    let mut hs = [[ZERO; 2]; 2];
    for term in &split.system.terms {
        let mut m = Pauli::I.matrix();
        for &(_, p) in &term.ops {
            let pm = p.matrix();
            let mut next = [[ZERO; 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    next[r][c] = m[r][0] * pm[0][c] + m[r][1] * pm[1][c];
                }
            }
            m = next;
        }
        for r in 0..2 {
            for c in 0..2 {
                hs[r][c] += term.coeff * m[r][c];
            }
        }
    }
    hs
}

fn trace_prod(a: &Mat2, b: &Mat2) -> Complex64 {
    (0..2)
        .map(|r| (0..2).map(|c| a[r][c] * b[c][r]).sum::<Complex64>())
        .sum()
}

/// `M_jk = -(r_j h_k + Tr{rho_E^(j) V_E^(k)} / 2)` from explicit partial traces.
pub fn m_matrix_direct(
    state: &DenseState,
    h: &SpinHamiltonian,
    split: &HamiltonianSplit,
    site: usize,
) -> Result<MMatrix3> {
    let l = state.sites();
    if l > EXPLICIT_MAX_SITES {
        return Err(Error::OracleCap {
            sites: l,
            cap: EXPLICIT_MAX_SITES,
        });
    }
    if site == 0 || site > l {
        return Err(Error::SiteOutOfRange { site, sites: l });
    }
    if split.site != site || h.sites != l {
        return Err(Error::InvalidArgument(
            "decomposition does not match site or ring".into(),
        ));
    }
    split.validate(h)?;

    let env_dim = 1usize << (l - 1);
    let psi = state.amplitudes();
    let rho_s = reduced_site_density(state, site)?;
    let hs = system_matrix(split);
    let v = split.coupling.to_matrix(l);

    let sig: Vec<Mat2> = SIGMA.iter().map(|p| p.matrix()).collect();
    let r: Vec<f64> = sig.iter().map(|s| trace_prod(s, &rho_s).re).collect();
    let hk: Vec<f64> = sig.iter().map(|s| 0.5 * trace_prod(s, &hs).re).collect();
    let rho_e: Vec<DMatrix<Complex64>> = sig
        .iter()
        .map(|s| env_state(psi, site, env_dim, s))
        .collect();
    let v_e: Vec<DMatrix<Complex64>> = sig
        .iter()
        .map(|s| env_operator(&v, site, env_dim, s))
        .collect();

    let mut m = Matrix3::zeros();
    for j in 0..3 {
        for k in 0..3 {
            // Tr{A B} = sum_ef A[e,f] B[f,e]
            let tr: Complex64 = rho_e[j].component_mul(&v_e[k].transpose()).sum();
            m[(j, k)] = -(r[j] * hk[k] + 0.5 * tr.re);
        }
    }
    Ok(MMatrix3(m))
}
