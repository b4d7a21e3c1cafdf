//! Per-instance evaluation of every concept, with caches shared by the edge
//! checks, the gallery and the audit.
//!
//! Parameterized concepts also have a parameter-free form used wherever two
//! concepts are compared pair by pair:
//! - KI: k = n - 1, raised to the largest constraint arity (FI when that
//!   reaches n);
//! - PI, SPrI, NPI, NTI: some boundary S with v in S and 2 <= |S| <= n - 1;
//! - DirI, DirSub: some ordering where v has a predecessor and a successor;
//! - NI_C, NSub_C: some constraint on v of arity at least 2;
//! - DynNI: some consistent assignment set A with A+a and A+b consistent;
//! - FDynI, FDynSub: some assignment set, without vacuous reduced problems;
//! - ConI, ConSub, ConNI, ConNSub: some condition restricting the other
//!   variables;
//! - ForwNI: the tuples {v=a} and {v=b}, both consistent;
//! - TupSub: the tuples {v=a} and {v=b}.

use std::cell::{OnceCell, RefCell};
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use itertools::Itertools;

use super::concept::Concept;
use crate::csp::{Assignment, CspError, CspInstance, ValId, VarId};
use crate::detect::{
    self, con_local_exists, forwni, gnsub_pairs, ni_classes, nsub_pairs, ConLocalKind, GnsubMode, NtiTable, Partition,
};
use crate::oracle::{
    enumerate_solutions, partial_assignments, ConditionalKind, DynamicKind, Semantics, SolutionSet, Verdict, Witness,
};

/// Interchangeability classes and substitutability pairs over one set of
/// constraints.
type Cache<K, V> = RefCell<HashMap<K, Rc<V>>>;

struct LocalRelation {
    classes: Partition,
    pairs: BTreeSet<(ValId, ValId)>,
}

/// An instance with lazily computed solutions and caches.
pub struct Context<'a> {
    csp: &'a CspInstance,
    sem: OnceCell<Semantics<'a>>,
    live: Vec<Vec<bool>>,
    ni: Vec<Partition>,
    nsub: Vec<BTreeSet<(ValId, ValId)>>,
    gnsub: Vec<BTreeSet<(ValId, ValId)>>,
    subproblems: Cache<BTreeSet<VarId>, SolutionSet>,
    npi: Cache<(VarId, BTreeSet<VarId>), Partition>,
    nti: Cache<(VarId, BTreeSet<VarId>), NtiTable>,
    reduced_ni: Cache<Assignment, Vec<Partition>>,
    extending: Cache<Assignment, Vec<usize>>,
    directional: Cache<(VarId, Vec<VarId>), LocalRelation>,
    per_constraint: Cache<(VarId, usize), LocalRelation>,
    assignment_sets: RefCell<Option<Rc<Vec<Assignment>>>>,
}

impl<'a> Context<'a> {
    pub fn new(csp: &'a CspInstance) -> Self {
        let n = csp.num_vars();
        Context {
            csp,
            sem: OnceCell::new(),
            live: csp.effective_domains(),
            ni: (0..n).map(|v| ni_classes(csp, v)).collect(),
            nsub: (0..n).map(|v| nsub_pairs(csp, v)).collect(),
            gnsub: (0..n).map(|v| gnsub_pairs(csp, v, GnsubMode::PerConstraint)).collect(),
            subproblems: RefCell::default(),
            npi: RefCell::default(),
            nti: RefCell::default(),
            reduced_ni: RefCell::default(),
            extending: RefCell::default(),
            directional: RefCell::default(),
            per_constraint: RefCell::default(),
            assignment_sets: RefCell::default(),
        }
    }

    pub fn csp(&self) -> &'a CspInstance {
        self.csp
    }

    pub fn semantics(&self) -> &Semantics<'a> {
        self.sem.get_or_init(|| Semantics::new(self.csp))
    }

    pub fn live(&self, v: VarId, a: ValId) -> bool {
        self.live[v][a]
    }

    pub fn ni(&self, v: VarId, a: ValId, b: ValId) -> bool {
        self.ni[v].same_block(a, b)
    }

    pub fn ni_partition(&self, v: VarId) -> &Partition {
        &self.ni[v]
    }

    pub fn nsub(&self, v: VarId, a: ValId, b: ValId) -> bool {
        self.nsub[v].contains(&(a, b))
    }

    pub fn gnsub(&self, v: VarId, a: ValId, b: ValId) -> bool {
        self.gnsub[v].contains(&(a, b))
    }

    pub fn fi(&self, v: VarId, a: ValId, b: ValId) -> bool {
        self.semantics().fi_where(v, a, b, |_| true)
    }

    pub fn sub(&self, v: VarId, a: ValId, b: ValId) -> bool {
        self.semantics().sub_where(v, a, b, |_| true)
    }

    fn subproblem(&self, subset: &BTreeSet<VarId>) -> Rc<SolutionSet> {
        if let Some(s) = self.subproblems.borrow().get(subset) {
            return s.clone();
        }
        let sub = self.csp.induced_subproblem(subset).expect("valid subset");
        let sols = Rc::new(enumerate_solutions(&sub, None));
        self.subproblems.borrow_mut().insert(subset.clone(), sols.clone());
        sols
    }

    /// Full interchangeability in the subproblem induced by `subset`.
    pub fn spri(&self, v: VarId, a: ValId, b: ValId, subset: &BTreeSet<VarId>) -> bool {
        let sols = self.subproblem(subset);
        let local = subset.iter().position(|&x| x == v).expect("v in subset");
        let mut swapped = Vec::new();
        for (from, to) in [(a, b), (b, a)] {
            for s in sols.iter().filter(|s| s[local] == from) {
                swapped.clear();
                swapped.extend_from_slice(s);
                swapped[local] = to;
                if !sols.contains(&swapped) {
                    return false;
                }
            }
        }
        true
    }

    pub fn ki(&self, v: VarId, a: ValId, b: ValId, k: usize) -> bool {
        let others: Vec<VarId> = (0..self.csp.num_vars()).filter(|&x| x != v).collect();
        others.into_iter().combinations(k - 1).all(|w| {
            let subset: BTreeSet<VarId> = w.into_iter().chain([v]).collect();
            self.spri(v, a, b, &subset)
        })
    }

    pub fn pi(&self, v: VarId, a: ValId, b: ValId, subset: &BTreeSet<VarId>) -> bool {
        self.semantics().pi(v, a, b, subset).expect("valid boundary").holds
    }

    pub fn npi_partition(&self, v: VarId, subset: &BTreeSet<VarId>) -> Rc<Partition> {
        let key = (v, subset.clone());
        if let Some(p) = self.npi.borrow().get(&key) {
            return p.clone();
        }
        let p = Rc::new(detect::npi_classes(self.csp, v, subset).expect("valid boundary"));
        self.npi.borrow_mut().insert(key, p.clone());
        p
    }

    pub fn npi(&self, v: VarId, a: ValId, b: ValId, subset: &BTreeSet<VarId>) -> bool {
        self.npi_partition(v, subset).same_block(a, b)
    }

    pub fn nti_table(&self, v: VarId, subset: &BTreeSet<VarId>) -> Rc<NtiTable> {
        let key = (v, subset.clone());
        if let Some(t) = self.nti.borrow().get(&key) {
            return t.clone();
        }
        let t = Rc::new(NtiTable::new(self.csp, v, subset).expect("valid boundary"));
        self.nti.borrow_mut().insert(key, t.clone());
        t
    }

    pub fn nti(&self, v: VarId, a: ValId, b: ValId, subset: &BTreeSet<VarId>) -> bool {
        self.nti_table(v, subset).holds(a, b)
    }

    fn directional(&self, v: VarId, ordering: &[VarId]) -> Rc<LocalRelation> {
        let key = (v, ordering.to_vec());
        if let Some(r) = self.directional.borrow().get(&key) {
            return r.clone();
        }
        let r = Rc::new(LocalRelation {
            classes: detect::diri_classes(self.csp, v, ordering).expect("valid ordering"),
            pairs: detect::dirsub_pairs(self.csp, v, ordering).expect("valid ordering"),
        });
        self.directional.borrow_mut().insert(key, r.clone());
        r
    }

    pub fn diri(&self, v: VarId, a: ValId, b: ValId, ordering: &[VarId]) -> bool {
        self.directional(v, ordering).classes.same_block(a, b)
    }

    pub fn dirsub(&self, v: VarId, a: ValId, b: ValId, ordering: &[VarId]) -> bool {
        self.directional(v, ordering).pairs.contains(&(a, b))
    }

    fn per_constraint(&self, v: VarId, c: usize) -> Rc<LocalRelation> {
        if let Some(r) = self.per_constraint.borrow().get(&(v, c)) {
            return r.clone();
        }
        let r = Rc::new(LocalRelation {
            classes: detect::nic_classes(self.csp, v, c).expect("constraint on v"),
            pairs: detect::nsubc_pairs(self.csp, v, c).expect("constraint on v"),
        });
        self.per_constraint.borrow_mut().insert((v, c), r.clone());
        r
    }

    pub fn nic(&self, v: VarId, a: ValId, b: ValId, c: usize) -> bool {
        self.per_constraint(v, c).classes.same_block(a, b)
    }

    pub fn nsubc(&self, v: VarId, a: ValId, b: ValId, c: usize) -> bool {
        self.per_constraint(v, c).pairs.contains(&(a, b))
    }

    /// Constraints on `v` of arity at least 2.
    pub fn linking_constraints(&self, v: VarId) -> Vec<usize> {
        self.csp
            .constraints_on(v)
            .filter(|&c| self.csp.constraint(c).arity() > 1)
            .collect()
    }

    /// Every consistent partial assignment over all variables, the empty one
    /// first.
    pub fn all_assignment_sets(&self) -> Rc<Vec<Assignment>> {
        if let Some(s) = self.assignment_sets.borrow().as_ref() {
            return s.clone();
        }
        let vars: Vec<VarId> = (0..self.csp.num_vars()).collect();
        let sets = Rc::new(partial_assignments(self.csp, &vars));
        *self.assignment_sets.borrow_mut() = Some(sets.clone());
        sets
    }

    /// NI classes of every variable after applying `asg`.
    fn reduced_partitions(&self, asg: &Assignment) -> Rc<Vec<Partition>> {
        if let Some(p) = self.reduced_ni.borrow().get(asg) {
            return p.clone();
        }
        let reduced = self.csp.apply_assignment(asg).expect("consistent assignment set");
        let parts: Rc<Vec<Partition>> = Rc::new((0..self.csp.num_vars()).map(|x| ni_classes(&reduced, x)).collect());
        self.reduced_ni.borrow_mut().insert(asg.clone(), parts.clone());
        parts
    }

    /// Dynamic NI under `asg` (which must not bind `v`).
    pub fn dynni(&self, v: VarId, a: ValId, b: ValId, asg: &Assignment) -> bool {
        self.reduced_partitions(asg)[v].same_block(a, b)
    }

    /// Indices of the solutions extending `asg`.
    fn extending(&self, asg: &Assignment) -> Rc<Vec<usize>> {
        if let Some(s) = self.extending.borrow().get(asg) {
            return s.clone();
        }
        let sols = self.semantics().solutions().solutions();
        let idx = Rc::new(
            (0..sols.len())
                .filter(|&i| asg.agrees_with(&sols[i]))
                .collect::<Vec<_>>(),
        );
        self.extending.borrow_mut().insert(asg.clone(), idx.clone());
        idx
    }

    /// Full dynamic interchangeability / substitutability under `asg`, which
    /// must not bind `v`.
    pub fn fdyn(&self, v: VarId, a: ValId, b: ValId, asg: &Assignment, kind: DynamicKind) -> bool {
        let all = self.semantics().solutions();
        let sols = all.solutions();
        let mut swapped = Vec::new();
        let mut survives = |from: ValId, to: ValId| {
            self.extending(asg)
                .iter()
                .map(|&i| &sols[i])
                .filter(|s| s[v] == from)
                .all(|s| {
                    swapped.clear();
                    swapped.extend_from_slice(s);
                    swapped[v] = to;
                    all.contains(&swapped)
                })
        };
        match kind {
            DynamicKind::Interchangeable => survives(a, b) && survives(b, a),
            DynamicKind::Substitutable => survives(b, a),
        }
    }

    /// Boundaries of the parameter-free forms: v in S, 2 <= |S| <= n - 1, by
    /// size then lexicographically.
    pub fn proper_boundaries(&self, v: VarId) -> Vec<BTreeSet<VarId>> {
        let n = self.csp.num_vars();
        let others: Vec<VarId> = (0..n).filter(|&x| x != v).collect();
        (1..n.saturating_sub(1))
            .flat_map(|size| others.iter().copied().combinations(size))
            .map(|w| w.into_iter().chain([v]).collect())
            .collect()
    }

    /// Predecessor sets of the parameter-free directional forms, each turned
    /// into an ordering (predecessors, v, the rest).
    pub fn proper_orderings(&self, v: VarId) -> Vec<Vec<VarId>> {
        let n = self.csp.num_vars();
        let others: Vec<VarId> = (0..n).filter(|&x| x != v).collect();
        (1..n.saturating_sub(1))
            .flat_map(|size| others.iter().copied().combinations(size))
            .map(|pred| ordering_with(n, v, &pred))
            .collect()
    }

    /// The parameter-free form of `concept` on the pair, with a witness where
    /// one exists.
    pub fn canonical(&self, concept: Concept, v: VarId, a: ValId, b: ValId) -> Verdict {
        let csp = self.csp;
        let n = csp.num_vars();
        let flag = |holds: bool| if holds { Verdict::yes() } else { Verdict::no() };
        let first_boundary =
            |test: &dyn Fn(&BTreeSet<VarId>) -> bool| match self.proper_boundaries(v).into_iter().find(|s| test(s)) {
                Some(s) => Verdict::yes_with(Witness::Subset(s)),
                None => Verdict::no(),
            };
        let first_ordering =
            |test: &dyn Fn(&[VarId]) -> bool| match self.proper_orderings(v).into_iter().find(|o| test(o)) {
                Some(o) => Verdict::yes_with(Witness::Ordering(o)),
                None => Verdict::no(),
            };
        let first_constraint =
            |test: &dyn Fn(usize) -> bool| match self.linking_constraints(v).into_iter().find(|&c| test(c)) {
                Some(c) => Verdict::yes_with(Witness::Constraint(c)),
                None => Verdict::no(),
            };
        let point = |p: Option<Assignment>| match p {
            Some(p) => Verdict::yes_with(Witness::Condition(p)),
            None => Verdict::no(),
        };
        match concept {
            Concept::Fi => self.semantics().fi(v, a, b).expect("valid pair"),
            Concept::Sub => self.semantics().sub(v, a, b).expect("valid pair"),
            Concept::Ki => {
                let k = (n.saturating_sub(1)).max(csp.max_arity()).max(2);
                if k >= n {
                    self.semantics().fi(v, a, b).expect("valid pair")
                } else {
                    flag(self.ki(v, a, b, k))
                }
            }
            Concept::Ni => flag(self.ni(v, a, b)),
            Concept::Nsub => flag(self.nsub(v, a, b)),
            Concept::Gnsub => flag(self.gnsub(v, a, b)),
            Concept::Spri => first_boundary(&|s| self.spri(v, a, b, s)),
            Concept::Pi => first_boundary(&|s| self.pi(v, a, b, s)),
            Concept::Npi => first_boundary(&|s| self.npi(v, a, b, s)),
            Concept::Nti => first_boundary(&|s| self.nti(v, a, b, s)),
            Concept::Diri => first_ordering(&|o| self.diri(v, a, b, o)),
            Concept::Dirsub => first_ordering(&|o| self.dirsub(v, a, b, o)),
            Concept::Nic => first_constraint(&|c| self.nic(v, a, b, c)),
            Concept::Nsubc => first_constraint(&|c| self.nsubc(v, a, b, c)),
            Concept::Dynni => {
                let sets = self.all_assignment_sets();
                let found = sets.iter().find(|asg| {
                    !asg.binds(v)
                        && csp.is_consistent(&(*asg).clone().with(v, a)).unwrap_or(false)
                        && csp.is_consistent(&(*asg).clone().with(v, b)).unwrap_or(false)
                        && self.dynni(v, a, b, asg)
                });
                match found {
                    Some(asg) => Verdict::yes_with(Witness::AssignmentSet(asg.clone())),
                    None => Verdict::no(),
                }
            }
            Concept::Fdyni => self
                .semantics()
                .fdyn_exists(v, a, b, DynamicKind::Interchangeable)
                .expect("valid pair"),
            Concept::Fdynsub => self
                .semantics()
                .fdyn_exists(v, a, b, DynamicKind::Substitutable)
                .expect("valid pair"),
            Concept::Coni => self
                .semantics()
                .conditional_exists(v, a, b, ConditionalKind::Interchangeable)
                .expect("valid pair"),
            Concept::Consub => self
                .semantics()
                .conditional_exists(v, a, b, ConditionalKind::Substitutable)
                .expect("valid pair"),
            Concept::Conni => point(con_local_exists(csp, v, a, b, ConLocalKind::Interchangeable).expect("valid pair")),
            Concept::Connsub => point(con_local_exists(csp, v, a, b, ConLocalKind::Substitutable).expect("valid pair")),
            Concept::Forwni => {
                let ua = Assignment::new().with(v, a);
                let ub = Assignment::new().with(v, b);
                let vars = BTreeSet::from([v]);
                flag(
                    csp.is_consistent(&ua).unwrap_or(false)
                        && csp.is_consistent(&ub).unwrap_or(false)
                        && forwni(csp, &vars, &ua, &ub).expect("valid tuples"),
                )
            }
            Concept::Tupsub => self
                .semantics()
                .tupsub(&Assignment::new().with(v, a), &Assignment::new().with(v, b))
                .expect("valid tuples"),
            Concept::Ctxdepi => self.semantics().ctxdep(v, a, b).expect("valid pair"),
        }
    }

    pub fn holds(&self, concept: Concept, v: VarId, a: ValId, b: ValId) -> bool {
        self.canonical(concept, v, a, b).holds
    }
}

/// The ordering `pred`, `v`, then every remaining variable, each group in
/// declaration order.
pub fn ordering_with(n: usize, v: VarId, pred: &[VarId]) -> Vec<VarId> {
    let mut order: Vec<VarId> = pred.to_vec();
    order.sort_unstable();
    order.push(v);
    order.extend((0..n).filter(|x| *x != v && !pred.contains(x)));
    order
}

/// Checks a variable and value pair by name.
pub fn resolve_pair(csp: &CspInstance, var: &str, a: &str, b: &str) -> Result<(VarId, ValId, ValId), CspError> {
    let (v, a) = csp.lookup(var, a)?;
    let (_, b) = csp.lookup(var, b)?;
    Ok((v, a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{check_ki, check_spri};

    fn path3() -> CspInstance {
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
    fn cached_matches_oracle() {
        let csp = path3();
        let ctx = Context::new(&csp);
        for v in 0..3 {
            for a in 0..2 {
                for b in 0..2 {
                    for k in 2..=3 {
                        assert_eq!(ctx.ki(v, a, b, k), check_ki(&csp, v, a, b, k).unwrap().holds);
                    }
                    for s in ctx.proper_boundaries(v) {
                        assert_eq!(ctx.spri(v, a, b, &s), check_spri(&csp, v, a, b, &s).unwrap().holds);
                    }
                }
            }
        }
    }

    #[test]
    fn dynni_cache_matches_detector() {
        let csp = path3();
        let ctx = Context::new(&csp);
        for asg in ctx.all_assignment_sets().iter().filter(|a| !a.binds(0)) {
            assert_eq!(ctx.dynni(0, 0, 1, asg), detect::dynni(&csp, 0, 0, 1, asg).unwrap());
        }
    }

    #[test]
    fn parameter_free_families() {
        let csp = path3();
        let ctx = Context::new(&csp);
        assert_eq!(ctx.proper_boundaries(0).len(), 2);
        assert_eq!(ctx.proper_orderings(0), vec![vec![1, 0, 2], vec![2, 0, 1]]);
        // X's values are tuple interchangeable with boundary {X,Y}
        let v = ctx.canonical(Concept::Nti, 0, 0, 1);
        assert_eq!(v.witness, Some(Witness::Subset(BTreeSet::from([0, 1]))));
        assert!(ctx.holds(Concept::Pi, 0, 0, 1));
        assert!(!ctx.holds(Concept::Fi, 0, 0, 1));
    }

    #[test]
    fn two_variable_families_are_empty() {
        let csp = CspInstance::builder()
            .var("X", &["a", "b"])
            .var("Y", &["p"])
            .forbid(&["X", "Y"], &[])
            .build()
            .unwrap();
        let ctx = Context::new(&csp);
        assert!(ctx.proper_boundaries(0).is_empty());
        assert!(!ctx.holds(Concept::Pi, 0, 0, 1));
        assert!(!ctx.holds(Concept::Diri, 0, 0, 1));
        assert!(ctx.holds(Concept::Ki, 0, 0, 1));
    }
}
