//! Decide whether a finite interaction structure supports a nondegenerate
//! phase structure, build the phase object when it does, and produce
//! replayable obstruction witnesses when it does not.

pub mod criterion;
pub mod decomposition;
pub mod dot;
pub mod duality;
pub mod filtration;
pub mod forced;
pub mod format;
pub mod library;
pub mod phase;
pub mod report;
pub mod rigidity;
pub mod structure;
pub mod symmetry;
pub mod witness;

pub use phase::{Angle, CycloMatrix, CyclotomicField, CyclotomicScalar, PhaseError};
pub use structure::{
    DefectMode, Dynamic, ElementId, ElementSet, InteractionStructure, StructureError, ValidationReport,
};
