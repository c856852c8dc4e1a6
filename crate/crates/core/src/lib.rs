//! Local ergotropy of single-excitation states on XY spin rings.
//!
//! The crate is organised around five pieces:
//!
//! * [`model`]: ring geometry, coupling tables, state constructors and energies.
//! * [`ergotropy`]: the closed-form local ergotropy of a single site, the
//!   correlation functions and M-matrix behind it, and the analytic two-current
//!   and single-current expressions.
//! * [`oracle`]: a brute-force reference in the full `2^L` Hilbert space.
//! * [`dynamics`]: exact single-excitation evolution and ergotropy trajectories.
//! * [`verify`]: seeded property suites that compare the closed forms with the oracle.
//!
//! Sites are numbered `1..=L` with periodic wraparound throughout.

pub mod dynamics;
pub mod ergotropy;
pub mod error;
pub mod model;
pub mod oracle;
pub mod verify;

pub use dynamics::{Propagator, Spectrum, Trajectory};
pub use ergotropy::{
    Branch, CorrelationSet, ErgotropyProfile, MMatrix3, OptimalTransform, SiteErgotropy,
};
pub use error::{Error, Result};
pub use model::{Coupling, CouplingTable, EnergyParts, PureState1x, RingSpec, WindingSet};
pub use oracle::{DenseState, LocalUnitaryParams, SpinHamiltonian};

pub use num_complex::Complex64;
