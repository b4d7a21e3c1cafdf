//! The implication lattice between the interchangeability concepts, its
//! automated verification, the counterexample gallery and the
//! satisfiability-preservation audit.

mod audit;
mod concept;
mod evaluate;
mod gallery;
mod lattice;
mod verify;

use thiserror::Error;

pub use audit::{audit_sat_preservation, AuditEntry, AuditReport};
pub use concept::{Concept, Plane, UnknownConcept};
pub use evaluate::{ordering_with, resolve_pair, Context};
pub use gallery::{
    evaluate_param, gallery, gallery_text, verify_gallery, Claim, GalleryInstance, GalleryReport, Param,
};
pub use lattice::{lattice, ConceptInfo, Edge, Equivalence, Incomparability, LatticeError, Rule, TaxonomyLattice};
pub use verify::{random_corpus, verify_edges, EdgeReport, SizeGuard, VerifyOptions, VerifyReport, Violation};

use crate::csp::CspError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TaxonomyError {
    #[error("instance #{index} has {vars} variables and domains up to {domain}; the limit is {max_vars} variables and domains up to {max_domain}")]
    Oversized {
        index: usize,
        vars: usize,
        domain: usize,
        max_vars: usize,
        max_domain: usize,
    },
    #[error(transparent)]
    Csp(#[from] CspError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("parameter `{param}` does not fit {concept}")]
    Parameter { concept: Concept, param: String },
    #[error("gallery instance {id}: claim `{claim}` does not hold")]
    Gallery { id: String, claim: String },
}
