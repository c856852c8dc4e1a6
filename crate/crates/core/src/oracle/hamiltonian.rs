//! Spin Hamiltonians as sums of Pauli strings acting on `2^L` amplitudes.
//!
//! Basis index bit `s - 1` holds site `s`; a set bit is an up spin (an
//! excitation) with `Z = +1`. Single-site matrices are written in that bit
//! basis, `[bit_out][bit_in]`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{coupling_table, CouplingTable, RingSpec};

use super::{check_cap, DenseState, EXPLICIT_MAX_SITES};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub type Mat2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Mat2 {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            // Y|down> = -i|up>, Y|up> = i|down>
            Pauli::Y => [[ZERO, I], [-I, ZERO]],
            Pauli::Z => [[-ONE, ZERO], [ZERO, ONE]],
        }
    }

    /// Image of a single bit: `(new_bit, phase)`.
    fn act(self, bit: usize) -> (usize, Complex64) {
        match (self, bit) {
            (Pauli::I, b) => (b, ONE),
            (Pauli::X, b) => (b ^ 1, ONE),
            (Pauli::Y, 0) => (1, -I),
            (Pauli::Y, _) => (0, I),
            (Pauli::Z, 0) => (0, -ONE),
            (Pauli::Z, _) => (1, ONE),
        }
    }
}

pub const SIGMA: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

/// `coeff * prod_s P_s` over 1-based sites.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub ops: Vec<(usize, Pauli)>,
}

impl PauliTerm {
    pub fn new(coeff: f64, ops: Vec<(usize, Pauli)>) -> Self {
        PauliTerm { coeff, ops }
    }

    pub fn touches(&self, site: usize) -> bool {
        self.ops.iter().any(|&(s, p)| s == site && p != Pauli::I)
    }

    pub fn is_local_to(&self, site: usize) -> bool {
        self.ops.iter().all(|&(s, p)| s == site || p == Pauli::I)
    }

    /// Image of basis index `b`.
    pub fn act(&self, b: usize) -> (usize, Complex64) {
        let mut out = b;
        let mut phase = Complex64::new(self.coeff, 0.0);
        for &(site, p) in &self.ops {
            let shift = site - 1;
            let (nb, ph) = p.act((out >> shift) & 1);
            out = (out & !(1 << shift)) | (nb << shift);
            phase *= ph;
        }
        (out, phase)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PauliSum {
    pub terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn apply_into(&self, input: &[Complex64], out: &mut [Complex64]) {
        for term in &self.terms {
            for (b, &amp) in input.iter().enumerate() {
                if amp == ZERO {
                    continue;
                }
                let (nb, ph) = term.act(b);
                out[nb] += ph * amp;
            }
        }
    }

    pub fn apply(&self, input: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; input.len()];
        self.apply_into(input, &mut out);
        out
    }

    pub fn to_matrix(&self, sites: usize) -> DMatrix<Complex64> {
        let dim = 1usize << sites;
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for term in &self.terms {
            for b in 0..dim {
                let (nb, ph) = term.act(b);
                m[(nb, b)] += ph;
            }
        }
        m
    }
}

#[derive(Debug, Clone)]
pub struct SpinHamiltonian {
    pub sites: usize,
    pub terms: PauliSum,
    explicit: Option<DMatrix<Complex64>>,
}

impl SpinHamiltonian {
    /// Keeps an explicit matrix for `sites <= 10`, applies term by term above.
    pub fn new(sites: usize, terms: PauliSum) -> Result<Self> {
        check_cap(sites)?;
        let explicit = (sites <= EXPLICIT_MAX_SITES).then(|| terms.to_matrix(sites));
        Ok(SpinHamiltonian {
            sites,
            terms,
            explicit,
        })
    }

    pub fn matrix_free(sites: usize, terms: PauliSum) -> Result<Self> {
        check_cap(sites)?;
        Ok(SpinHamiltonian {
            sites,
            terms,
            explicit: None,
        })
    }

    pub fn from_table(table: &CouplingTable) -> Result<Self> {
        Self::new(table.sites, xy_terms(table))
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    pub fn is_explicit(&self) -> bool {
        self.explicit.is_some()
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        match &self.explicit {
            Some(m) => m.clone(),
            None => self.terms.to_matrix(self.sites),
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        match &self.explicit {
            Some(m) => {
                let dim = v.len();
                let mut out = vec![ZERO; dim];
                for col in 0..dim {
                    let a = v[col];
                    if a == ZERO {
                        continue;
                    }
                    for (row, o) in out.iter_mut().enumerate() {
                        let h = m[(row, col)];
                        if h != ZERO {
                            *o += h * a;
                        }
                    }
                }
                out
            }
            None => self.terms.apply(v),
        }
    }

    pub fn expectation(&self, state: &DenseState) -> f64 {
        let hv = self.apply(state.amplitudes());
        inner(state.amplitudes(), &hv).re
    }
}

/// `<a|b>`
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `sum_{i<j} J_ij (X_i X_j + Y_i Y_j) + Delta sum_j Z_j`.
pub fn xy_terms(table: &CouplingTable) -> PauliSum {
    let l = table.sites;
    let mut terms = Vec::new();
    for i in 1..=l {
        for j in (i + 1)..=l {
            let jij = table.pair(i, j);
            if jij != 0.0 {
                terms.push(PauliTerm::new(jij, vec![(i, Pauli::X), (j, Pauli::X)]));
                terms.push(PauliTerm::new(jij, vec![(i, Pauli::Y), (j, Pauli::Y)]));
            }
        }
    }
    if table.delta != 0.0 {
        for s in 1..=l {
            terms.push(PauliTerm::new(table.delta, vec![(s, Pauli::Z)]));
        }
    }
    PauliSum { terms }
}

pub fn build_hamiltonian(spec: &RingSpec, delta: f64) -> Result<SpinHamiltonian> {
    check_cap(spec.sites)?;
    SpinHamiltonian::from_table(&coupling_table(spec, delta)?)
}

/// `H = H_S + H_E + V_SE` around one site.
#[derive(Debug, Clone)]
pub struct HamiltonianSplit {
    pub site: usize,
    pub system: PauliSum,
    pub environment: PauliSum,
    pub coupling: PauliSum,
}

impl HamiltonianSplit {
    pub fn around(h: &SpinHamiltonian, site: usize) -> Result<Self> {
        if site == 0 || site > h.sites {
            return Err(Error::SiteOutOfRange {
                site,
                sites: h.sites,
            });
        }
        let mut split = HamiltonianSplit {
            site,
            system: PauliSum::default(),
            environment: PauliSum::default(),
            coupling: PauliSum::default(),
        };
        for term in &h.terms.terms {
            let bucket = if !term.touches(site) {
                &mut split.environment
            } else if term.is_local_to(site) {
                &mut split.system
            } else {
                &mut split.coupling
            };
            bucket.terms.push(term.clone());
        }
        Ok(split)
    }

    /// Checks that the three parts sum to `h` (on a fixed set of probe
    /// vectors) and that `H_S` and `H_E` really are local.
    pub fn validate(&self, h: &SpinHamiltonian) -> Result<()> {
        let misplaced = self.system.terms.iter().any(|t| !t.is_local_to(self.site))
            || self.environment.terms.iter().any(|t| t.touches(self.site));
        if misplaced {
            return Err(Error::InconsistentDecomposition(f64::INFINITY));
        }
        let dim = h.dim();
        let mut worst = 0.0f64;
        for probe in 0..3u64 {
            // deterministic dense probe
            let v: Vec<Complex64> = (0..dim)
                .map(|b| {
                    let x = (b as f64 + 1.0) * (probe as f64 + 1.7);
                    Complex64::new((x * 0.37).sin(), (x * 0.61).cos())
                })
                .collect();
            let want = h.apply(&v);
            let mut got = self.system.apply(&v);
            self.environment.apply_into(&v, &mut got);
            self.coupling.apply_into(&v, &mut got);
            for (a, b) in want.iter().zip(&got) {
                worst = worst.max((a - b).norm());
            }
        }
        if worst > 1e-10 {
            return Err(Error::InconsistentDecomposition(worst));
        }
        Ok(())
    }
}
