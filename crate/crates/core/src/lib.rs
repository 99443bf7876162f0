//! Combinatorial calculus for ribbon presentations of banded unlink
//! diagrams: free-group word arithmetic, group presentations with relator
//! moves and a trivialization search, Fox-calculus invariants, diagram moves
//! with undisking certificates, and handle-count bookkeeping for the induced
//! twisted 4-manifolds and their 5-dimensional products.

pub mod acsearch;
pub mod alexander;
pub mod catalog;
pub mod diagrams;
pub mod handles;
pub mod presentations;
pub mod snf;
pub mod triangular;
pub mod undisking;
pub mod words;

pub use acsearch::{ac_search, SearchBudget, SearchOptions, SearchOutcome};
pub use alexander::{alexander_matrix, alexander_polynomial, fox_derivative, LaurentPoly};
pub use diagrams::{Band, BandPass, DiagramMove, RibbonPresentation};
pub use handles::{ClosedSphereSpec, HandleStructure, ProductBallVerdict};
pub use presentations::{AcCertificate, AcMove, GroupPresentation};
pub use triangular::{is_triangular, triangularize};
pub use undisking::{certify_undisking, trivialize_search, UndiskingCertificate};
pub use words::{Letter, Word};
