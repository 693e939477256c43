//! Combinatorial GIT stability of polarized curves.
//!
//! Curves are modelled by decorated dual graphs ([`CurveGraph`]), line
//! bundles by integer multidegrees ([`Multidegree`]). The crate decides
//! whether a polarized curve is GIT stable, polystable or semistable in the
//! degree ranges where this is characterized by the basic inequality, and
//! enumerates the combinatorial objects around it: balanced multidegrees,
//! blow-up models, fiber strata of the compactified Jacobian, and censuses of
//! stable and p-stable graphs.
//!
//! ```
//! use gitcurves::{decide, CurveGraph, GitStatus, PolarizedCurve};
//!
//! let graph = CurveGraph::builder()
//!     .vertex("v1", 1)
//!     .vertex("v2", 1)
//!     .node("v1", "v2")
//!     .build()?;
//! let pc = PolarizedCurve::with_degrees(graph, &[("v1", 5), ("v2", 5)])?;
//! assert_eq!(decide(&pc)?.status, GitStatus::Stable);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! The guide in `book/` walks through each concept with runnable examples.

pub mod balance;
pub mod canonical;
pub mod class;
pub mod decision;
pub mod document;
pub mod enumerate;
pub mod graph;

pub use balance::{
    basic_inequality, classify_multidegree, degree_bounds, is_balanced_on_connected, BalanceClassifier,
    BalanceError, BalanceFlavor, BalanceReport, InequalityCheck, InequalityStatus, Multidegree, PolarizedCurve,
    SubcurveTable,
};
pub use canonical::{are_isomorphic, CanonicalForm};
pub use class::{
    blow_up, classify_curve, contract_exceptional, elliptic_tails, is_p_stable, is_stable, special_point_count,
    BlowUpSelection, CurveClass, SurgeryError,
};
pub use decision::{
    decide, gap_necessary, geometric_quotient, regime, Decision, DecisionError, GitStatus, NecessaryFailure,
    NecessaryVerdict, Regime,
};
pub use document::{CurveDocument, DocumentError};
pub use enumerate::{
    census, enumerate_blowups, enumerate_multidegrees, fiber_strata, CensusKind, EnumerationError, StratumRecord,
};
pub use graph::{CurveGraph, Edge, EdgeKind, GraphError, Subcurve, ValidationReport, Vertex, Violation};

// Chapters of the guide are compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/dual-graphs.md")]
    mod dual_graphs {}
    #[doc = include_str!("../../../book/src/curve-classes.md")]
    mod curve_classes {}
    #[doc = include_str!("../../../book/src/basic-inequality.md")]
    mod basic_inequality {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/enumeration.md")]
    mod enumeration {}
    #[doc = include_str!("../../../book/src/file-format.md")]
    mod file_format {}
}
