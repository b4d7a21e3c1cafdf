use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use super::{continuations, tuples_over};
use crate::csp::{Assignment, CspError, CspInstance, ValId, VarId};

/// How `nti_find` explores boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NtiSearch {
    /// `v` plus at most this many of its neighbors.
    Capped(usize),
    /// Every subset containing `v`; only for instances of at most
    /// [`NtiSearch::EXACT_LIMIT`] variables.
    Exact,
}

impl NtiSearch {
    pub const EXACT_LIMIT: usize = 8;
}

impl Default for NtiSearch {
    fn default() -> Self {
        NtiSearch::Capped(2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NtiPair {
    pub a: ValId,
    pub b: ValId,
    pub subset: BTreeSet<VarId>,
}

type Signature = Vec<BTreeSet<Vec<ValId>>>;

/// Consistent tuples over `subset` with `v = a`, grouped by the continuations
/// they admit in every constraint crossing the boundary. Keeps the first tuple
/// of each group.
fn signatures(csp: &CspInstance, v: VarId, a: ValId, subset: &BTreeSet<VarId>) -> BTreeMap<Signature, Assignment> {
    let live = csp.effective_domains();
    let crossing: Vec<usize> = (0..csp.num_constraints())
        .filter(|&c| {
            let scope = csp.constraint(c).scope();
            let inside = scope.iter().filter(|x| subset.contains(x)).count();
            inside > 0 && inside < scope.len()
        })
        .collect();
    let rest: Vec<VarId> = subset.iter().copied().filter(|&x| x != v).collect();
    let all: Vec<Vec<bool>> = (0..csp.num_vars()).map(|x| vec![true; csp.domain_size(x)]).collect();
    let mut out = BTreeMap::new();
    for w in tuples_over(csp, &all, &rest) {
        let t: Assignment = rest.iter().copied().zip(w).chain([(v, a)]).collect();
        if !csp.consistent_unchecked(&t) {
            continue;
        }
        let sig: Signature = crossing
            .iter()
            .map(|&c| continuations(csp, &live, csp.constraint(c), &t))
            .collect();
        out.entry(sig).or_insert(t);
    }
    out
}

/// Signature groups of every value of `v` over one boundary.
#[derive(Debug, Clone)]
pub struct NtiTable {
    per_value: Vec<BTreeMap<Signature, Assignment>>,
}

impl NtiTable {
    pub fn new(csp: &CspInstance, v: VarId, subset: &BTreeSet<VarId>) -> Result<Self, CspError> {
        csp.check_var(v)?;
        crate::oracle::check_boundary(csp, v, subset)?;
        Ok(NtiTable {
            per_value: (0..csp.domain_size(v)).map(|a| signatures(csp, v, a, subset)).collect(),
        })
    }

    /// Both values have consistent tuples and the same signature sets.
    pub fn holds(&self, a: ValId, b: ValId) -> bool {
        let (sa, sb) = (&self.per_value[a], &self.per_value[b]);
        !sa.is_empty() && sa.len() == sb.len() && sa.keys().eq(sb.keys())
    }

    /// One consistent tuple per signature for value `a`.
    pub fn representatives(&self, a: ValId) -> impl Iterator<Item = &Assignment> {
        self.per_value[a].values()
    }

    /// Matched tuple pairs behind a positive answer.
    pub fn mates(&self, a: ValId, b: ValId) -> Option<Vec<(Assignment, Assignment)>> {
        if !self.holds(a, b) {
            return None;
        }
        Some(
            self.per_value[a]
                .values()
                .cloned()
                .zip(self.per_value[b].values().cloned())
                .collect(),
        )
    }
}

/// Neighborhood tuple interchangeability with respect to `subset` (which must
/// contain `v`): both values have consistent tuples over `subset`, and the
/// two sides admit the same sets of outside continuations.
pub fn nti(csp: &CspInstance, v: VarId, a: ValId, b: ValId, subset: &BTreeSet<VarId>) -> Result<bool, CspError> {
    Ok(nti_mates(csp, v, a, b, subset)?.is_some())
}

/// Matched tuple pairs behind a positive answer: each consistent `v = a`
/// signature with a `v = b` tuple of the same signature.
pub fn nti_mates(
    csp: &CspInstance,
    v: VarId,
    a: ValId,
    b: ValId,
    subset: &BTreeSet<VarId>,
) -> Result<Option<Vec<(Assignment, Assignment)>>, CspError> {
    csp.check_value(v, a)?;
    csp.check_value(v, b)?;
    Ok(NtiTable::new(csp, v, subset)?.mates(a, b))
}

/// The first boundary (by size, then lexicographically) for which `a` and `b`
/// are tuple interchangeable.
pub fn nti_find(
    csp: &CspInstance,
    v: VarId,
    a: ValId,
    b: ValId,
    search: NtiSearch,
) -> Result<Option<BTreeSet<VarId>>, CspError> {
    csp.check_value(v, a)?;
    csp.check_value(v, b)?;
    let (pool, cap): (Vec<VarId>, usize) = match search {
        NtiSearch::Capped(s) => (csp.neighbors(v).into_iter().collect(), s),
        NtiSearch::Exact => {
            if csp.num_vars() > NtiSearch::EXACT_LIMIT {
                return Err(CspError::InvalidParameter(format!(
                    "exact boundary search is limited to {} variables",
                    NtiSearch::EXACT_LIMIT
                )));
            }
            ((0..csp.num_vars()).filter(|&x| x != v).collect(), csp.num_vars())
        }
    };
    for size in 0..=cap.min(pool.len()) {
        for w in pool.iter().copied().combinations(size) {
            let subset: BTreeSet<VarId> = w.into_iter().chain([v]).collect();
            if nti(csp, v, a, b, &subset)? {
                return Ok(Some(subset));
            }
        }
    }
    Ok(None)
}

/// Unordered pairs `a < b` of `v` that are tuple interchangeable, each with
/// the first boundary found.
pub fn nti_pairs(csp: &CspInstance, v: VarId, search: NtiSearch) -> Result<Vec<NtiPair>, CspError> {
    csp.check_var(v)?;
    let d = csp.domain_size(v);
    let mut out = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            if let Some(subset) = nti_find(csp, v, a, b, search)? {
                out.push(NtiPair { a, b, subset });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::ni_classes;

    fn chain() -> CspInstance {
        // a and b use different Y values, but those Y values see the same Z
        CspInstance::builder()
            .var("X", &["a", "b"])
            .var("Y", &["p", "q"])
            .var("Z", &["r", "s"])
            .allow(&["X", "Y"], &[&["a", "p"], &["b", "q"]])
            .allow(&["Y", "Z"], &[&["p", "r"], &["q", "r"]])
            .build()
            .unwrap()
    }

    #[test]
    fn ni_pair_found_at_singleton() {
        let csp = CspInstance::builder()
            .var("X", &["a", "b"])
            .var("Y", &["p"])
            .forbid(&["X", "Y"], &[])
            .build()
            .unwrap();
        assert!(ni_classes(&csp, 0).same_block(0, 1));
        let s = nti_find(&csp, 0, 0, 1, NtiSearch::default()).unwrap();
        assert_eq!(s, Some([0].into_iter().collect()));
    }

    #[test]
    fn boundary_grows_to_neighbor() {
        let csp = chain();
        assert!(!ni_classes(&csp, 0).same_block(0, 1));
        let s = nti_find(&csp, 0, 0, 1, NtiSearch::Capped(1)).unwrap();
        assert_eq!(s, Some([0, 1].into_iter().collect()));
        assert_eq!(nti_find(&csp, 0, 0, 1, NtiSearch::Capped(0)).unwrap(), None);
        let pairs = nti_pairs(&csp, 0, NtiSearch::Exact).unwrap();
        assert_eq!(pairs.len(), 1);
    }

    #[test]
    fn dead_value_is_not_nti() {
        let csp = CspInstance::builder()
            .var("X", &["a", "b"])
            .allow(&["X"], &[])
            .build()
            .unwrap();
        let s: BTreeSet<_> = [0].into_iter().collect();
        assert!(!nti(&csp, 0, 0, 1, &s).unwrap());
        assert!(nti(&csp, 0, 0, 0, &s).is_ok());
    }

    #[test]
    fn mates_pair_signatures() {
        let csp = chain();
        let s: BTreeSet<_> = [0, 1].into_iter().collect();
        let mates = nti_mates(&csp, 0, 0, 1, &s).unwrap().unwrap();
        assert_eq!(mates.len(), 1);
        assert_eq!(mates[0].0, Assignment::new().with(0, 0).with(1, 0));
        assert_eq!(mates[0].1, Assignment::new().with(0, 1).with(1, 1));
    }
}
