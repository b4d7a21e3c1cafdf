//! Does removing one value of a related pair keep a satisfiable instance
//! satisfiable?

use super::concept::Concept;
use super::evaluate::Context;
use super::verify::SizeGuard;
use super::TaxonomyError;
use crate::csp::{CspInstance, ValId, VarId};
use crate::oracle::enumerate_solutions;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditEntry {
    pub var: VarId,
    pub kept: ValId,
    pub removed: ValId,
    pub satisfiable_before: bool,
    pub satisfiable_after: bool,
}

impl AuditEntry {
    pub fn preserved(&self) -> bool {
        !self.satisfiable_before || self.satisfiable_after
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub concept: Concept,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn violations(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter().filter(|e| !e.preserved())
    }

    pub fn is_preserving(&self) -> bool {
        self.violations().next().is_none()
    }
}

/// For every pair of distinct values `(a, b)` related by the parameter-free
/// form of `concept` (`a` for `b` when directional), removes `b` and compares
/// satisfiability before and after.
pub fn audit_sat_preservation(
    concept: Concept,
    csp: &CspInstance,
    guard: &SizeGuard,
) -> Result<AuditReport, TaxonomyError> {
    guard.check(0, csp)?;
    let ctx = Context::new(csp);
    let before = ctx.semantics().is_satisfiable();
    let mut entries = Vec::new();
    for v in 0..csp.num_vars() {
        let d = csp.domain_size(v);
        for a in 0..d {
            for b in (0..d).filter(|&b| b != a) {
                if !ctx.holds(concept, v, a, b) {
                    continue;
                }
                let after = before && {
                    let mut keep: Vec<Vec<bool>> =
                        (0..csp.num_vars()).map(|x| vec![true; csp.domain_size(x)]).collect();
                    keep[v][b] = false;
                    !enumerate_solutions(&csp.restrict_domains(&keep), Some(1)).is_empty()
                };
                entries.push(AuditEntry {
                    var: v,
                    kept: a,
                    removed: b,
                    satisfiable_before: before,
                    satisfiable_after: after,
                });
            }
        }
    }
    Ok(AuditReport { concept, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::gallery;

    #[test]
    fn dead_support_breaks_local_relation() {
        let g = gallery()
            .into_iter()
            .find(|g| g.id == "local-relations-break-sat")
            .unwrap();
        let r = audit_sat_preservation(Concept::Nic, &g.csp, &SizeGuard::default()).unwrap();
        assert!(!r.is_preserving());
        let fi = audit_sat_preservation(Concept::Fi, &g.csp, &SizeGuard::default()).unwrap();
        assert!(fi.is_preserving());
    }

    #[test]
    fn unsat_instance_has_nothing_to_lose() {
        let csp = CspInstance::builder()
            .var("X", &["a", "b"])
            .var("Y", &["p"])
            .allow(&["X", "Y"], &[])
            .build()
            .unwrap();
        let r = audit_sat_preservation(Concept::Gnsub, &csp, &SizeGuard::default()).unwrap();
        assert!(r.is_preserving());
    }
}
