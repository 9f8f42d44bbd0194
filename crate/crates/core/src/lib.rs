//! Polarization of multiple access channels over finite Abelian groups.
//!
//! The crate models an `m`-user channel `W: G_1 x ... x G_m -> Z`, synthesizes
//! the polarized channels `W^-`, `W^+` and `W^s`, and decides whether
//! polarization preserves the symmetric capacity region. The decision uses the
//! Fourier fingerprint of the posteriors `P(X | Y, Z)` ([`compat`]); the
//! [`oracle`] module recomputes the same verdict by brute force.
//!
//! ```
//! use macpolar::{catalog, compat, tolerance::Tolerances};
//!
//! let bac = catalog::binary_adder();
//! assert!((bac.sum_capacity() - 1.5).abs() < 1e-12);
//! let region = compat::check_region(&bac, &Tolerances::default()).unwrap();
//! assert!(region.preserved());
//! ```

pub mod abelian;
pub mod catalog;
pub mod channel;
pub mod compat;
pub mod error;
pub mod io;
pub mod oracle;
pub mod polarize;
pub mod report;
pub mod spectral;
pub mod tolerance;

pub use abelian::{GroupElement, GroupSpec, IndexedGroup};
pub use channel::{Mac, TwoUserView, UserSet};
pub use error::{Error, Result};
pub use polarize::{Sign, SignSequence, SynthesisOptions};
pub use tolerance::Tolerances;
