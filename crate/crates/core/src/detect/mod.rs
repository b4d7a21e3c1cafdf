//! Neighborhood-level (syntactic) detectors. Each relation is decided from
//! the constraints around a variable without enumerating solutions.
//!
//! The supports of `v = a` in a constraint are the projections onto the rest
//! of its scope of the satisfied tuples with `v = a`, restricted to the
//! effective domains (declared domains filtered by unary constraints). A unary
//! constraint on `v` contributes the empty tuple when it allows `a`.

mod closure;
mod dtree;
mod nti;

pub use closure::{ns_closure, NsClosure, Removal, Splitter, SplitterTable};
pub use dtree::{Annotation, DiscriminationTree, TreeNode};
pub use nti::{nti, nti_find, nti_mates, nti_pairs, NtiPair, NtiSearch, NtiTable};

use std::collections::BTreeSet;

use crate::csp::{Assignment, Constraint, CspError, CspInstance, ValId, VarId};

/// Disjoint value blocks covering a variable's domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    var: VarId,
    blocks: Vec<Vec<ValId>>,
}

impl Partition {
    /// Blocks are normalized: each sorted, ordered by smallest member.
    pub fn new(var: VarId, mut blocks: Vec<Vec<ValId>>) -> Self {
        blocks.retain(|b| !b.is_empty());
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort();
        Partition { var, blocks }
    }

    pub fn var(&self) -> VarId {
        self.var
    }

    pub fn blocks(&self) -> &[Vec<ValId>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, value: ValId) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&value))
    }

    pub fn same_block(&self, a: ValId, b: ValId) -> bool {
        match self.block_of(a) {
            Some(i) => self.blocks[i].contains(&b),
            None => false,
        }
    }

    /// Every block is a singleton.
    pub fn is_discrete(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    /// Common refinement of two partitions of the same variable.
    pub fn refine(&self, other: &Partition) -> Partition {
        let mut blocks = Vec::new();
        for b in &self.blocks {
            for o in &other.blocks {
                let common: Vec<ValId> = b.iter().copied().filter(|x| o.contains(x)).collect();
                if !common.is_empty() {
                    blocks.push(common);
                }
            }
        }
        Partition::new(self.var, blocks)
    }

    pub fn display(&self, csp: &CspInstance) -> String {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let names: Vec<&str> = b.iter().map(|&a| csp.value_name(self.var, a)).collect();
                format!("{{{}}}", names.join(","))
            })
            .collect();
        blocks.join(" ")
    }
}

/// Support sets of every value of `v` in constraint `c`, indexed by value.
/// Projections list the other scope variables in scope order.
pub(crate) fn supports(
    csp: &CspInstance,
    live: &[Vec<bool>],
    v: VarId,
    c: usize,
    probes: &mut u64,
) -> Vec<BTreeSet<Vec<ValId>>> {
    let con = csp.constraint(c);
    let pos = con.position(v).expect("constraint on v");
    let others: Vec<VarId> = con.scope().iter().copied().filter(|&x| x != v).collect();
    let candidates = tuples_over(csp, live, &others);
    let mut tuple = vec![0; con.arity()];
    (0..csp.domain_size(v))
        .map(|a| {
            let mut set = BTreeSet::new();
            for w in &candidates {
                *probes += 1;
                let mut it = w.iter();
                for (i, slot) in tuple.iter_mut().enumerate() {
                    *slot = if i == pos { a } else { *it.next().expect("arity") };
                }
                if con.allows(&tuple) {
                    set.insert(w.clone());
                }
            }
            set
        })
        .collect()
}

/// All tuples over `vars` drawn from the live values, in lexicographic order.
pub(crate) fn tuples_over(csp: &CspInstance, live: &[Vec<bool>], vars: &[VarId]) -> Vec<Vec<ValId>> {
    let mut out = vec![Vec::with_capacity(vars.len())];
    for &x in vars {
        let vals: Vec<ValId> = (0..csp.domain_size(x)).filter(|&a| live[x][a]).collect();
        out = out
            .into_iter()
            .flat_map(|t| {
                vals.iter().map(move |&a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

fn check_pair(csp: &CspInstance, v: VarId, a: ValId, b: ValId) -> Result<(), CspError> {
    csp.check_value(v, a)?;
    csp.check_value(v, b)
}

fn constraints_on(csp: &CspInstance, v: VarId) -> Vec<usize> {
    csp.constraints_on(v).collect()
}

/// Ordered pairs (a, b) such that in every listed constraint the supports of
/// `b` are contained in those of `a`.
fn containment_pairs(csp: &CspInstance, v: VarId, constraints: &[usize]) -> BTreeSet<(ValId, ValId)> {
    let live = csp.effective_domains();
    let mut probes = 0;
    let tables: Vec<_> = constraints
        .iter()
        .map(|&c| supports(csp, &live, v, c, &mut probes))
        .collect();
    let d = csp.domain_size(v);
    let mut out = BTreeSet::new();
    for a in 0..d {
        for b in 0..d {
            if tables.iter().all(|t| t[b].is_subset(&t[a])) {
                out.insert((a, b));
            }
        }
    }
    out
}

pub fn ni_tree(csp: &CspInstance, v: VarId) -> DiscriminationTree {
    DiscriminationTree::build(csp, v, &constraints_on(csp, v))
}

/// Neighborhood interchangeability classes of `v`.
pub fn ni_classes(csp: &CspInstance, v: VarId) -> Partition {
    ni_tree(csp, v).partition()
}

/// Ordered pairs (a, b) with `a` neighborhood substitutable for `b`.
pub fn nsub_pairs(csp: &CspInstance, v: VarId) -> BTreeSet<(ValId, ValId)> {
    containment_pairs(csp, v, &constraints_on(csp, v))
}

/// Constraints on `v` whose other variables all lie outside the boundary.
fn outside_constraints(csp: &CspInstance, v: VarId, subset: &BTreeSet<VarId>) -> Vec<usize> {
    csp.constraints_on(v)
        .filter(|&c| {
            csp.constraint(c)
                .scope()
                .iter()
                .all(|&x| x == v || !subset.contains(&x))
        })
        .collect()
}

/// Joint discrimination tree for `v` with respect to the boundary `subset`.
pub fn npi_tree(csp: &CspInstance, v: VarId, subset: &BTreeSet<VarId>) -> Result<DiscriminationTree, CspError> {
    crate::oracle::check_boundary(csp, v, subset)?;
    Ok(DiscriminationTree::build(csp, v, &outside_constraints(csp, v, subset)))
}

/// Neighborhood partial interchangeability classes with respect to `subset`.
pub fn npi_classes(csp: &CspInstance, v: VarId, subset: &BTreeSet<VarId>) -> Result<Partition, CspError> {
    Ok(npi_tree(csp, v, subset)?.partition())
}

fn check_ordering(csp: &CspInstance, ordering: &[VarId]) -> Result<Vec<usize>, CspError> {
    let n = csp.num_vars();
    let mut rank = vec![usize::MAX; n];
    if ordering.len() != n {
        return Err(CspError::InvalidOrdering(format!(
            "expected {n} variables, got {}",
            ordering.len()
        )));
    }
    for (i, &x) in ordering.iter().enumerate() {
        if x >= n || rank[x] != usize::MAX {
            return Err(CspError::InvalidOrdering(format!(
                "variable #{x} is unknown or repeated"
            )));
        }
        rank[x] = i;
    }
    Ok(rank)
}

/// Constraints on `v` whose other variables all precede `v`.
fn preceding_constraints(csp: &CspInstance, v: VarId, ordering: &[VarId]) -> Result<Vec<usize>, CspError> {
    let rank = check_ordering(csp, ordering)?;
    Ok(csp
        .constraints_on(v)
        .filter(|&c| csp.constraint(c).scope().iter().all(|&x| rank[x] <= rank[v]))
        .collect())
}

/// Directional interchangeability classes: same supports among the
/// constraints linking `v` to preceding variables only.
pub fn diri_classes(csp: &CspInstance, v: VarId, ordering: &[VarId]) -> Result<Partition, CspError> {
    csp.check_var(v)?;
    let cons = preceding_constraints(csp, v, ordering)?;
    Ok(DiscriminationTree::build(csp, v, &cons).partition())
}

/// Directional substitutability: (a, b) when the preceding supports of `b`
/// are contained in those of `a`.
pub fn dirsub_pairs(csp: &CspInstance, v: VarId, ordering: &[VarId]) -> Result<BTreeSet<(ValId, ValId)>, CspError> {
    csp.check_var(v)?;
    let cons = preceding_constraints(csp, v, ordering)?;
    Ok(containment_pairs(csp, v, &cons))
}

fn check_on(csp: &CspInstance, v: VarId, c: usize) -> Result<(), CspError> {
    csp.check_var(v)?;
    if c >= csp.num_constraints() || !csp.constraint(c).involves(v) {
        return Err(CspError::InvalidParameter(format!(
            "constraint #{c} does not involve `{}`",
            csp.var_name(v)
        )));
    }
    Ok(())
}

/// Interchangeability classes with respect to the single constraint `c`.
pub fn nic_classes(csp: &CspInstance, v: VarId, c: usize) -> Result<Partition, CspError> {
    check_on(csp, v, c)?;
    Ok(DiscriminationTree::build(csp, v, &[c]).partition())
}

/// Substitutability pairs with respect to the single constraint `c`.
pub fn nsubc_pairs(csp: &CspInstance, v: VarId, c: usize) -> Result<BTreeSet<(ValId, ValId)>, CspError> {
    check_on(csp, v, c)?;
    Ok(containment_pairs(csp, v, &[c]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GnsubMode {
    /// Every constraint on `v` has a support common to both values.
    #[default]
    PerConstraint,
    /// Every neighboring variable has a value supporting both values in all
    /// the constraints it shares with `v`.
    PerVariable,
}

/// Pairs sharing a support everywhere in the neighborhood. Symmetric.
pub fn gnsub_pairs(csp: &CspInstance, v: VarId, mode: GnsubMode) -> BTreeSet<(ValId, ValId)> {
    let live = csp.effective_domains();
    let cons = constraints_on(csp, v);
    let mut probes = 0;
    let tables: Vec<_> = cons.iter().map(|&c| supports(csp, &live, v, c, &mut probes)).collect();
    let d = csp.domain_size(v);
    let mut out = BTreeSet::new();
    for a in 0..d {
        for b in 0..d {
            let holds = match mode {
                GnsubMode::PerConstraint => tables.iter().all(|t| !t[a].is_disjoint(&t[b])),
                GnsubMode::PerVariable => {
                    let unary_ok = cons
                        .iter()
                        .zip(&tables)
                        .filter(|(&c, _)| csp.constraint(c).arity() == 1)
                        .all(|(_, t)| !t[a].is_empty() && !t[b].is_empty());
                    unary_ok
                        && csp.neighbors(v).into_iter().all(|y| {
                            (0..csp.domain_size(y)).filter(|&val| live[y][val]).any(|val| {
                                cons.iter().zip(&tables).all(|(&c, t)| {
                                    let con = csp.constraint(c);
                                    if !con.involves(y) {
                                        return true;
                                    }
                                    let others: Vec<VarId> = con.scope().iter().copied().filter(|&x| x != v).collect();
                                    let i = others.iter().position(|&x| x == y).expect("in scope");
                                    t[a].iter().any(|w| w[i] == val) && t[b].iter().any(|w| w[i] == val)
                                })
                            })
                        })
                }
            };
            if holds {
                out.insert((a, b));
            }
        }
    }
    out
}

/// Dynamic neighborhood interchangeability: NI of `a` and `b` once the
/// assignment set `asg` has been applied.
pub fn dynni(csp: &CspInstance, v: VarId, a: ValId, b: ValId, asg: &Assignment) -> Result<bool, CspError> {
    check_pair(csp, v, a, b)?;
    crate::oracle::check_dynamic_assignment(csp, v, asg)?;
    let reduced = csp.apply_assignment(asg)?;
    Ok(ni_classes(&reduced, v).same_block(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConLocalKind {
    /// Conditional neighborhood interchangeability.
    Interchangeable,
    /// Conditional neighborhood substitutability (`a` for `b`).
    Substitutable,
}

/// Neighborhood interchangeability / substitutability in the instance
/// conjoined with the extra constraints.
pub fn con_local(
    csp: &CspInstance,
    v: VarId,
    a: ValId,
    b: ValId,
    extra: &[Constraint],
    kind: ConLocalKind,
) -> Result<bool, CspError> {
    check_pair(csp, v, a, b)?;
    let conditioned = csp.with_constraints(extra)?;
    Ok(match kind {
        ConLocalKind::Interchangeable => ni_classes(&conditioned, v).same_block(a, b),
        ConLocalKind::Substitutable => nsub_pairs(&conditioned, v).contains(&(a, b)),
    })
}

/// Unary conditions fixing every variable other than `v` to the value given
/// by `point`.
pub fn point_condition(csp: &CspInstance, v: VarId, point: &Assignment) -> Vec<Constraint> {
    (0..csp.num_vars())
        .filter(|&x| x != v)
        .filter_map(|x| point.get(x).map(|val| Constraint::allow(vec![x], [vec![val]])))
        .collect()
}

/// Existential conditional form: some condition (non-empty unary restriction
/// of every other variable) under which the relation holds. Searches single
/// points, which is sufficient because shrinking a restriction to a point
/// preserves the relation. Returns the witnessing point.
pub fn con_local_exists(
    csp: &CspInstance,
    v: VarId,
    a: ValId,
    b: ValId,
    kind: ConLocalKind,
) -> Result<Option<Assignment>, CspError> {
    check_pair(csp, v, a, b)?;
    let live = csp.effective_domains();
    let cons = constraints_on(csp, v);
    let others: Vec<VarId> = (0..csp.num_vars()).filter(|&x| x != v).collect();
    // a point is live on a constraint when all of its other components survive
    // the unary filters
    let sat = |c: usize, val: ValId, point: &[ValId]| -> bool {
        let con = csp.constraint(c);
        let mut tuple = Vec::with_capacity(con.arity());
        for &x in con.scope() {
            if x == v {
                tuple.push(val);
            } else {
                if !live[x][point[x]] {
                    return false;
                }
                tuple.push(point[x]);
            }
        }
        con.allows(&tuple)
    };
    let all: Vec<Vec<bool>> = (0..csp.num_vars()).map(|x| vec![true; csp.domain_size(x)]).collect();
    for combo in tuples_over(csp, &all, &others) {
        let mut point = vec![0; csp.num_vars()];
        for (&x, &val) in others.iter().zip(&combo) {
            point[x] = val;
        }
        let holds = cons.iter().all(|&c| {
            let (sa, sb) = (sat(c, a, &point), sat(c, b, &point));
            match kind {
                ConLocalKind::Interchangeable => sa == sb,
                ConLocalKind::Substitutable => !sb || sa,
            }
        });
        if holds {
            return Ok(Some(others.iter().zip(&combo).map(|(&x, &val)| (x, val)).collect()));
        }
    }
    Ok(None)
}

/// Forward neighborhood interchangeability of two tuples binding exactly
/// `vars`: every constraint crossing the boundary of `vars` admits the same
/// continuations outside it.
pub fn forwni(csp: &CspInstance, vars: &BTreeSet<VarId>, u: &Assignment, u2: &Assignment) -> Result<bool, CspError> {
    csp.check_assignment(u)?;
    csp.check_assignment(u2)?;
    let bound_u: BTreeSet<VarId> = u.vars().collect();
    let bound_u2: BTreeSet<VarId> = u2.vars().collect();
    if &bound_u != vars || &bound_u2 != vars {
        return Err(CspError::InvalidParameter(
            "both tuples must bind exactly the given variables".into(),
        ));
    }
    let live = csp.effective_domains();
    for c in csp.constraints() {
        let inside = c.scope().iter().filter(|x| vars.contains(x)).count();
        if inside == 0 || inside == c.arity() {
            continue;
        }
        if continuations(csp, &live, c, u) != continuations(csp, &live, c, u2) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Projections onto the unbound part of `c`'s scope of the satisfied tuples
/// extending `t`, over live values.
pub(crate) fn continuations(
    csp: &CspInstance,
    live: &[Vec<bool>],
    c: &Constraint,
    t: &Assignment,
) -> BTreeSet<Vec<ValId>> {
    let free: Vec<VarId> = c.scope().iter().copied().filter(|&x| !t.binds(x)).collect();
    let mut out = BTreeSet::new();
    let mut tuple = Vec::with_capacity(c.arity());
    for w in tuples_over(csp, live, &free) {
        tuple.clear();
        let mut it = w.iter();
        for &x in c.scope() {
            tuple.push(match t.get(x) {
                Some(val) => val,
                None => *it.next().expect("free variable"),
            });
        }
        if c.allows(&tuple) {
            out.insert(w);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> CspInstance {
        // X in {a,b,c}: a and b see the same Y supports, c differs
        CspInstance::builder()
            .var("X", &["a", "b", "c"])
            .var("Y", &["p", "q"])
            .var("Z", &["r", "s"])
            .allow(&["X", "Y"], &[&["a", "p"], &["b", "p"], &["c", "p"], &["c", "q"]])
            .allow(&["X", "Z"], &[&["a", "r"], &["b", "r"], &["c", "s"]])
            .build()
            .unwrap()
    }

    #[test]
    fn unconstrained_is_one_block() {
        let csp = CspInstance::builder().var("X", &["a", "b", "c"]).build().unwrap();
        assert_eq!(ni_classes(&csp, 0).blocks(), &[vec![0, 1, 2]]);
    }

    #[test]
    fn ni_groups_identical_supports() {
        let csp = star();
        let p = ni_classes(&csp, 0);
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2]]);
        assert!(p.same_block(1, 0));
        assert!(!p.same_block(0, 2));
    }

    #[test]
    fn nsub_is_reflexive_and_matches_ni() {
        let csp = star();
        let pairs = nsub_pairs(&csp, 0);
        for a in 0..3 {
            assert!(pairs.contains(&(a, a)));
        }
        assert!(pairs.contains(&(0, 1)) && pairs.contains(&(1, 0)));
        assert!(!pairs.contains(&(0, 2)) && !pairs.contains(&(2, 0)));
    }

    #[test]
    fn npi_extremes() {
        let csp = star();
        let all: BTreeSet<_> = (0..3).collect();
        assert_eq!(npi_classes(&csp, 0, &all).unwrap().num_blocks(), 1);
        let just_v: BTreeSet<_> = [0].into_iter().collect();
        assert_eq!(npi_classes(&csp, 0, &just_v).unwrap(), ni_classes(&csp, 0));
        let without_v: BTreeSet<_> = [1].into_iter().collect();
        assert!(npi_classes(&csp, 0, &without_v).is_err());
    }

    #[test]
    fn diri_first_variable_is_one_block() {
        let csp = star();
        assert_eq!(diri_classes(&csp, 0, &[0, 1, 2]).unwrap().num_blocks(), 1);
        assert!(diri_classes(&csp, 0, &[0, 1]).is_err());
        assert!(diri_classes(&csp, 0, &[0, 1, 1]).is_err());
        let last = diri_classes(&csp, 0, &[1, 2, 0]).unwrap();
        assert_eq!(last, ni_classes(&csp, 0));
    }

    #[test]
    fn nic_requires_involvement() {
        let csp = star();
        assert_eq!(nic_classes(&csp, 0, 0).unwrap().blocks(), &[vec![0, 1], vec![2]]);
        assert!(nic_classes(&csp, 1, 1).is_err());
        assert!(nsubc_pairs(&csp, 0, 1).unwrap().contains(&(0, 1)));
    }

    #[test]
    fn universal_constraint_one_block() {
        let csp = CspInstance::builder()
            .var("X", &["a", "b"])
            .var("Y", &["p", "q"])
            .forbid(&["X", "Y"], &[])
            .build()
            .unwrap();
        assert_eq!(nic_classes(&csp, 0, 0).unwrap().num_blocks(), 1);
    }

    #[test]
    fn unary_constraints_split() {
        let csp = CspInstance::builder()
            .var("X", &["a", "b"])
            .allow(&["X"], &[&["a"]])
            .build()
            .unwrap();
        assert_eq!(ni_classes(&csp, 0).num_blocks(), 2);
        assert!(nsub_pairs(&csp, 0).contains(&(0, 1)));
        assert!(!nsub_pairs(&csp, 0).contains(&(1, 0)));
    }

    #[test]
    fn gnsub_shared_support() {
        let csp = star();
        let pairs = gnsub_pairs(&csp, 0, GnsubMode::PerConstraint);
        // a and c share p on Y but nothing on Z
        assert!(!pairs.contains(&(0, 2)));
        assert!(pairs.contains(&(0, 1)));
        assert_eq!(pairs, gnsub_pairs(&csp, 0, GnsubMode::PerVariable));
    }

    #[test]
    fn dynni_empty_is_ni() {
        let csp = star();
        let empty = Assignment::new();
        assert!(dynni(&csp, 0, 0, 1, &empty).unwrap());
        assert!(!dynni(&csp, 0, 0, 2, &empty).unwrap());
        // fixing Z=s kills a and b alike; c still has Y support q
        let z = Assignment::new().with(2, 1);
        assert!(!dynni(&csp, 0, 0, 2, &z).unwrap());
    }

    #[test]
    fn con_local_empty_is_unconditional() {
        let csp = star();
        assert!(con_local(&csp, 0, 0, 1, &[], ConLocalKind::Interchangeable).unwrap());
        assert!(!con_local(&csp, 0, 0, 2, &[], ConLocalKind::Interchangeable).unwrap());
        let point = con_local_exists(&csp, 0, 0, 2, ConLocalKind::Interchangeable).unwrap();
        assert!(point.is_none());
        let point = con_local_exists(&csp, 0, 2, 0, ConLocalKind::Substitutable).unwrap();
        assert!(point.is_some());
    }

    #[test]
    fn forwni_trivial_cases() {
        let csp = star();
        let u = Assignment::new().with(0, 0);
        let vars: BTreeSet<_> = [0].into_iter().collect();
        assert!(forwni(&csp, &vars, &u, &u).unwrap());
        let u2 = Assignment::new().with(0, 1);
        assert!(forwni(&csp, &vars, &u, &u2).unwrap());
        let all: BTreeSet<_> = (0..3).collect();
        let f1 = Assignment::new().with(0, 0).with(1, 0).with(2, 0);
        let f2 = Assignment::new().with(0, 2).with(1, 1).with(2, 1);
        assert!(forwni(&csp, &all, &f1, &f2).unwrap());
        assert!(forwni(&csp, &vars, &u, &f1).is_err());
    }

    #[test]
    fn partition_refine() {
        let p = Partition::new(0, vec![vec![0, 1, 2], vec![3]]);
        let q = Partition::new(0, vec![vec![0, 3], vec![1, 2]]);
        assert_eq!(p.refine(&q).blocks(), &[vec![0], vec![1, 2], vec![3]]);
    }
}
