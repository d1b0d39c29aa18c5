//! Weighted simplicial complexes, link Laplacian spectra, and numerical
//! certificates for local spectral expansion.
//!
//! The crate builds pure n-dimensional weighted complexes, assembles the
//! coboundary calculus (d, delta, upper/lower/full Laplacians) with the
//! weight-induced inner product, and verifies a chain of spectral results
//! numerically: spectral-gap descent through links, cohomology vanishing,
//! Cheeger-type inequalities, mixing bounds (general and partite), and
//! geometric overlap at desk scale. Every check is emitted as a structured
//! pass/fail [`cert::Certificate`].

pub mod cert;
pub mod cheeger;
pub mod cochain;
pub mod complex;
pub mod error;
pub mod gen;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod mixing;
pub mod ops;
pub mod overlap;
pub mod report;
pub mod simplex;
pub mod spectra;
pub mod walks;

pub use cert::{CertStatus, Certificate, Report};
pub use complex::{ConnectivityReport, Link, SubsetFamily, WeightedComplex};
pub use error::{HdxError, Result};
pub use simplex::{OrderedSimplex, Simplex, VertexId};

/// Enumeration budget for exhaustive searches, overridable via `HDX_BUDGET`.
pub fn enumeration_budget() -> u64 {
    std::env::var("HDX_BUDGET")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(10_000_000)
}
