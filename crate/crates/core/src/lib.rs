//! Combinatorial model of open book decompositions: pages with a labeled
//! first-homology basis, ordered Dehn twist words, Legendrian links placed on
//! pages, and the stabilization schedules that realize a link as a sub-binding.
//!
//! All values are immutable; every operation returns a new value. Moves are
//! recorded in replayable certificates so a consumer can re-check the genus
//! and boundary ledger without trusting the producer.

pub mod approx;
pub mod digest;
pub mod legendrian;
pub mod openbook;
pub mod pushoff;
pub mod surface;

pub use approx::{ApproxError, ProvenanceEntry, SgCertificate, SgKind, Witness};
pub use legendrian::{
    LegendrianError, LinkComponent, LinkPlacement, TransverseComponent, TransverseLinkRecord,
    Violation,
};
pub use openbook::{HomologyAction, MonodromyWord, OpenBook, OpenBookError, RelabelMap, Twist};
pub use pushoff::{
    Case, Certificate, LedgerRow, PermError, PushoffError, ScheduleStep, StepKind,
};
pub use surface::{
    BasisEmbedding, BasisLabel, CurveKind, CurveRef, Feet, Sign, Surface, SurfaceError,
};
