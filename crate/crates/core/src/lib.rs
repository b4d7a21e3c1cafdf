pub mod csp;
pub mod detect;
pub mod io;
pub mod oracle;
pub mod rng;
pub mod search;
pub mod taxonomy;

pub use csp::{
    build_microstructure, Assignment, Constraint, CspBuilder, CspError, CspInstance, MicroStructure, Polarity, ValId,
    VarId, Variable,
};
pub use detect::Partition;
pub use oracle::{enumerate_solutions, Semantics, SolutionSet, Verdict, Witness};
