//! Feasibility of secret-key agreement for discrete sources observed by an
//! eavesdropper, with emphasis on erasure eavesdroppers.
//!
//! Logarithms are natural throughout the library; [`info::to_bits`]
//! converts for display. The DSBE benchmark in [`dsbe`] reports bits.
//!
//! ```
//! use skagree::{dsbe::dsbe_pmf, pmf::build_erasure_source, thresholds};
//!
//! let source = build_erasure_source(dsbe_pmf(0.4)?, 0.8)?;
//! let report = thresholds::threshold_report(&source)?;
//! assert!((report.epsilon1 - 2.0 / 3.0).abs() < 1e-12);
//! assert_eq!(report.verdict, thresholds::Verdict::Positive);
//! # Ok::<(), skagree::Error>(())
//! ```

pub mod correlation;
pub mod dsbe;
mod error;
pub mod feasibility;
pub mod info;
pub mod optim;
pub mod pmf;
pub mod thresholds;

pub use error::{Error, Result};
pub use pmf::{build_erasure_source, validate_joint, Channel, Eve, JointPmf, Source};
