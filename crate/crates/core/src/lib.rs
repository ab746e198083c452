//! Exact Diophantine approximation, shrinking-target criteria, lattice
//! constructions and certified orbit simulation on the torus.

pub mod error;
pub mod exact;
pub mod lattice;
pub mod orbit;
pub mod best_approx;
pub mod criteria;
pub mod construct;
pub mod residue;
pub mod roots;

pub use error::{Error, Result};
pub use exact::{
    certified_dist_nearest_lattice, dist_nearest_int, dist_nearest_lattice, is_primitive,
    projective_distance, wedge, CertifiedScalar, CertifiedVector, ExactRational, LatticePoint3,
    Verdict,
};
pub use best_approx::{ApproxKind, ApproxRecord, ContinuedFraction, Witness};
pub use construct::{
    CFVectorSpec, Check, ConstructionParams, ConstructionState, ExceptionStatus, VerificationReport,
};
pub use criteria::{BracketReport, SeriesReport, TransferReport, TypeClass, TypeEvidence, WindowBound};
pub use orbit::{CensusSummary, HitRecord, LogLawStat, OrbitConfig, WindowEstimate};
