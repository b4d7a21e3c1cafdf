//! Brute-force solution enumeration and the semantic (solution-level)
//! relations. Everything here is exhaustive and meant for small instances;
//! it is the ground truth the local detectors are checked against.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::csp::build_microstructure;
use crate::csp::{Assignment, Constraint, CspError, CspInstance, ValId, VarId};

/// All (or the first `limit`) solutions of an instance, in canonical order.
#[derive(Debug, Clone)]
pub struct SolutionSet {
    solutions: Vec<Vec<ValId>>,
    index: HashSet<Vec<ValId>>,
    complete: bool,
}

impl SolutionSet {
    pub fn from_solutions(solutions: Vec<Vec<ValId>>, complete: bool) -> Self {
        let index = solutions.iter().cloned().collect();
        SolutionSet {
            solutions,
            index,
            complete,
        }
    }

    pub fn solutions(&self) -> &[Vec<ValId>] {
        &self.solutions
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// False when enumeration stopped at the limit.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn contains(&self, values: &[ValId]) -> bool {
        self.index.contains(values)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<ValId>> {
        self.solutions.iter()
    }

    pub fn as_assignments(&self) -> Vec<Assignment> {
        self.solutions.iter().map(|s| Assignment::from_full(s)).collect()
    }
}

pub fn enumerate_solutions(csp: &CspInstance, limit: Option<usize>) -> SolutionSet {
    let n = csp.num_vars();
    // constraints are checked at the position of their last scope variable
    let mut check_at: Vec<Vec<&Constraint>> = vec![Vec::new(); n];
    for c in csp.constraints() {
        let last = *c.scope().iter().max().expect("non-empty scope");
        check_at[last].push(c);
    }
    let mut out = Vec::new();
    let mut complete = true;
    if n == 0 {
        if csp.constraints().is_empty() {
            out.push(Vec::new());
        }
    } else {
        let mut values = vec![0; n];
        enumerate_rec(csp, &check_at, 0, &mut values, &mut out, limit, &mut complete);
    }
    let index = out.iter().cloned().collect();
    SolutionSet {
        solutions: out,
        index,
        complete,
    }
}

fn enumerate_rec(
    csp: &CspInstance,
    check_at: &[Vec<&Constraint>],
    depth: usize,
    values: &mut Vec<ValId>,
    out: &mut Vec<Vec<ValId>>,
    limit: Option<usize>,
    complete: &mut bool,
) -> bool {
    for a in 0..csp.domain_size(depth) {
        values[depth] = a;
        if !check_at[depth].iter().all(|c| c.allows_full(values)) {
            continue;
        }
        if depth + 1 == values.len() {
            if limit.is_some_and(|l| out.len() >= l) {
                *complete = false;
                return false;
            }
            out.push(values.clone());
        } else if !enumerate_rec(csp, check_at, depth + 1, values, out, limit, complete) {
            return false;
        }
    }
    true
}

/// Supporting evidence for a verdict: the violating solution on a negative
/// universal answer, or the witness on a positive existential one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A solution that does not survive the substitution.
    Violation(Assignment),
    /// Common extension of both values (context-dependent interchangeability).
    Context(Assignment),
    /// An assignment set under which the relation holds.
    AssignmentSet(Assignment),
    /// A condition restricting every other variable to a single value.
    Condition(Assignment),
    /// A variable subset (boundary of change or induced subproblem).
    Subset(BTreeSet<VarId>),
    /// A variable ordering.
    Ordering(Vec<VarId>),
    /// A constraint index.
    Constraint(usize),
    /// A neighborhood support that separates the two values.
    Splitter { constraint: usize, support: Assignment },
    /// A consistent tuple with no matching partner.
    Tuple(Assignment),
}

impl Witness {
    pub fn describe(&self, csp: &CspInstance) -> String {
        let subset = |s: &BTreeSet<VarId>| {
            let names: Vec<&str> = s.iter().map(|&v| csp.var_name(v)).collect();
            format!("{{{}}}", names.join(","))
        };
        match self {
            Witness::Violation(s) => format!("violating solution {}", s.display(csp)),
            Witness::Context(s) => format!("common context {}", s.display(csp)),
            Witness::AssignmentSet(a) => format!("assignment set {}", a.display(csp)),
            Witness::Condition(a) => format!("condition {}", a.display(csp)),
            Witness::Subset(s) => format!("subset {}", subset(s)),
            Witness::Ordering(o) => {
                let names: Vec<&str> = o.iter().map(|&v| csp.var_name(v)).collect();
                format!("ordering {}", names.join("<"))
            }
            Witness::Constraint(c) => format!("constraint #{c}"),
            Witness::Splitter { constraint, support } => {
                format!("splitter {} on constraint #{constraint}", support.display(csp))
            }
            Witness::Tuple(t) => format!("unmatched tuple {}", t.display(csp)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn yes() -> Self {
        Verdict {
            holds: true,
            witness: None,
        }
    }

    pub fn no() -> Self {
        Verdict {
            holds: false,
            witness: None,
        }
    }

    pub fn yes_with(w: Witness) -> Self {
        Verdict {
            holds: true,
            witness: Some(w),
        }
    }

    pub fn no_with(w: Witness) -> Self {
        Verdict {
            holds: false,
            witness: Some(w),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.holds)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionalKind {
    Interchangeable,
    Substitutable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicKind {
    Interchangeable,
    Substitutable,
}

/// An instance together with its full solution set. All semantic relations
/// are answered from the cached set.
#[derive(Debug, Clone)]
pub struct Semantics<'a> {
    csp: &'a CspInstance,
    sols: SolutionSet,
}

impl<'a> Semantics<'a> {
    pub fn new(csp: &'a CspInstance) -> Self {
        Semantics {
            csp,
            sols: enumerate_solutions(csp, None),
        }
    }

    pub fn csp(&self) -> &'a CspInstance {
        self.csp
    }

    pub fn solutions(&self) -> &SolutionSet {
        &self.sols
    }

    pub fn is_satisfiable(&self) -> bool {
        !self.sols.is_empty()
    }

    fn check_pair(&self, v: VarId, a: ValId, b: ValId) -> Result<(), CspError> {
        self.csp.check_value(v, a)?;
        self.csp.check_value(v, b)
    }

    /// Whether some solution has `v = a`.
    pub fn participates(&self, v: VarId, a: ValId) -> bool {
        self.sols.iter().any(|s| s[v] == a)
    }

    /// Every solution accepted by `keep` with `v = from` stays a solution when
    /// `from` is replaced by `to`.
    fn substitution_survives<F>(&self, v: VarId, from: ValId, to: ValId, keep: F) -> Option<Vec<ValId>>
    where
        F: Fn(&[ValId]) -> bool,
    {
        let mut swapped = Vec::new();
        for s in self.sols.iter().filter(|s| s[v] == from && keep(s)) {
            swapped.clear();
            swapped.extend_from_slice(s);
            swapped[v] = to;
            if !self.sols.contains(&swapped) {
                return Some(s.clone());
            }
        }
        None
    }

    fn interchange_filtered<F>(&self, v: VarId, a: ValId, b: ValId, keep: F) -> Verdict
    where
        F: Fn(&[ValId]) -> bool,
    {
        if let Some(s) = self.substitution_survives(v, a, b, &keep) {
            return Verdict::no_with(Witness::Violation(Assignment::from_full(&s)));
        }
        if let Some(s) = self.substitution_survives(v, b, a, &keep) {
            return Verdict::no_with(Witness::Violation(Assignment::from_full(&s)));
        }
        Verdict::yes()
    }

    /// Full interchangeability among the solutions accepted by `keep`
    /// (which must not depend on `v`).
    pub fn fi_where<F>(&self, v: VarId, a: ValId, b: ValId, keep: F) -> bool
    where
        F: Fn(&[ValId]) -> bool,
    {
        self.interchange_filtered(v, a, b, keep).holds
    }

    /// Substitutability of `a` for `b` among the solutions accepted by `keep`.
    pub fn sub_where<F>(&self, v: VarId, a: ValId, b: ValId, keep: F) -> bool
    where
        F: Fn(&[ValId]) -> bool,
    {
        self.substitution_survives(v, b, a, keep).is_none()
    }

    /// Full interchangeability.
    pub fn fi(&self, v: VarId, a: ValId, b: ValId) -> Result<Verdict, CspError> {
        self.check_pair(v, a, b)?;
        Ok(self.interchange_filtered(v, a, b, |_| true))
    }

    /// `a` substitutable for `b`: solutions with `v = b` survive `b -> a`.
    pub fn sub(&self, v: VarId, a: ValId, b: ValId) -> Result<Verdict, CspError> {
        self.check_pair(v, a, b)?;
        Ok(match self.substitution_survives(v, b, a, |_| true) {
            Some(s) => Verdict::no_with(Witness::Violation(Assignment::from_full(&s))),
            None => Verdict::yes(),
        })
    }

    /// Partial interchangeability with respect to the boundary `subset` (which
    /// must contain `v`): every solution with one value is matched by a
    /// solution with the other that agrees outside `subset`.
    pub fn pi(&self, v: VarId, a: ValId, b: ValId, subset: &BTreeSet<VarId>) -> Result<Verdict, CspError> {
        self.check_pair(v, a, b)?;
        check_boundary(self.csp, v, subset)?;
        let outside: Vec<VarId> = (0..self.csp.num_vars()).filter(|x| !subset.contains(x)).collect();
        let key = |s: &[ValId]| outside.iter().map(|&x| s[x]).collect::<Vec<_>>();
        for (from, to) in [(a, b), (b, a)] {
            let targets: HashSet<Vec<ValId>> = self.sols.iter().filter(|s| s[v] == to).map(|s| key(s)).collect();
            if let Some(s) = self.sols.iter().find(|s| s[v] == from && !targets.contains(&key(s))) {
                return Ok(Verdict::no_with(Witness::Violation(Assignment::from_full(s))));
            }
        }
        Ok(Verdict::yes())
    }

    /// Subproblem interchangeability: full interchangeability in the
    /// subproblem induced by `subset` (which must contain `v`).
    pub fn spri(&self, v: VarId, a: ValId, b: ValId, subset: &BTreeSet<VarId>) -> Result<Verdict, CspError> {
        self.check_pair(v, a, b)?;
        check_boundary(self.csp, v, subset)?;
        let sub = self.csp.induced_subproblem(subset)?;
        let local_v = subset.iter().position(|&x| x == v).expect("v in subset");
        let verdict = Semantics::new(&sub).fi(local_v, a, b)?;
        Ok(lift_witness(verdict, subset))
    }

    /// k-interchangeability: full interchangeability in every subproblem
    /// induced by `v` and `k - 1` other variables.
    pub fn ki(&self, v: VarId, a: ValId, b: ValId, k: usize) -> Result<Verdict, CspError> {
        self.check_pair(v, a, b)?;
        let n = self.csp.num_vars();
        if k < 2 || k > n {
            return Err(CspError::InvalidParameter(format!("k = {k} is outside [2, {n}]")));
        }
        if k == n {
            return self.fi(v, a, b);
        }
        let others: Vec<VarId> = (0..n).filter(|&x| x != v).collect();
        for combo in itertools::Itertools::combinations(others.iter().copied(), k - 1) {
            let mut subset: BTreeSet<VarId> = combo.into_iter().collect();
            subset.insert(v);
            let verdict = self.spri(v, a, b, &subset)?;
            if !verdict.holds {
                return Ok(Verdict::no_with(Witness::Subset(subset)));
            }
        }
        Ok(Verdict::yes())
    }

    /// Full dynamic interchangeability / substitutability with respect to the
    /// assignment set `asg`: the relation in the subproblem where every
    /// assigned variable is reduced to its value. Answered by filtering the
    /// cached solutions, which is the solution set of that subproblem.
    pub fn fdyn(&self, v: VarId, a: ValId, b: ValId, asg: &Assignment, kind: DynamicKind) -> Result<Verdict, CspError> {
        self.check_pair(v, a, b)?;
        check_dynamic_assignment(self.csp, v, asg)?;
        let keep = |s: &[ValId]| asg.agrees_with(s);
        Ok(match kind {
            DynamicKind::Interchangeable => self.interchange_filtered(v, a, b, keep),
            DynamicKind::Substitutable => match self.substitution_survives(v, b, a, keep) {
                Some(s) => Verdict::no_with(Witness::Violation(Assignment::from_full(&s))),
                None => Verdict::yes(),
            },
        })
    }

    /// Context-dependent interchangeability: some assignment of all the other
    /// variables extends both `v = a` and `v = b` to solutions.
    pub fn ctxdep(&self, v: VarId, a: ValId, b: ValId) -> Result<Verdict, CspError> {
        self.check_pair(v, a, b)?;
        let mut swapped = Vec::new();
        for s in self.sols.iter().filter(|s| s[v] == a) {
            swapped.clear();
            swapped.extend_from_slice(s);
            swapped[v] = b;
            if self.sols.contains(&swapped) {
                let mut ctx = Assignment::from_full(s);
                ctx.unbind(v);
                return Ok(Verdict::yes_with(Witness::Context(ctx)));
            }
        }
        Ok(Verdict::no())
    }

    /// Tuple substitutability: every extension of `b_tuple` to a solution is
    /// also an extension of `a_tuple` (projections outside the bound set).
    pub fn tupsub(&self, a_tuple: &Assignment, b_tuple: &Assignment) -> Result<Verdict, CspError> {
        self.csp.check_assignment(a_tuple)?;
        self.csp.check_assignment(b_tuple)?;
        let bound: Vec<VarId> = a_tuple.vars().collect();
        if bound != b_tuple.vars().collect::<Vec<_>>() {
            return Err(CspError::InvalidParameter("tuples must bind the same variables".into()));
        }
        let outside: Vec<VarId> = (0..self.csp.num_vars()).filter(|x| !a_tuple.binds(*x)).collect();
        let key = |s: &[ValId]| outside.iter().map(|&x| s[x]).collect::<Vec<_>>();
        let covered: HashSet<Vec<ValId>> = self
            .sols
            .iter()
            .filter(|s| a_tuple.agrees_with(s))
            .map(|s| key(s))
            .collect();
        match self
            .sols
            .iter()
            .find(|s| b_tuple.agrees_with(s) && !covered.contains(&key(s)))
        {
            Some(s) => Ok(Verdict::no_with(Witness::Violation(Assignment::from_full(s)))),
            None => Ok(Verdict::yes()),
        }
    }

    /// Every consistent assignment set over the variables other than `v`
    /// (including the empty one), in a fixed order.
    pub fn consistent_assignment_sets(&self, v: VarId) -> Vec<Assignment> {
        let others: Vec<VarId> = (0..self.csp.num_vars()).filter(|&x| x != v).collect();
        partial_assignments(self.csp, &others)
    }

    /// Existential dynamic form: some consistent assignment set under which the
    /// relation holds and is not vacuous. For interchangeability, non-vacuous
    /// means the reduced problem has a solution with `v = a` or `v = b`; for
    /// substitutability (`a` for `b`), a solution with `v = b`.
    pub fn fdyn_exists(&self, v: VarId, a: ValId, b: ValId, kind: DynamicKind) -> Result<Verdict, CspError> {
        self.check_pair(v, a, b)?;
        // solutions whose substitution fails; the relation holds under an
        // assignment set iff none of these agrees with it
        let mut bad: Vec<&Vec<ValId>> = Vec::new();
        let directions: &[(ValId, ValId)] = match kind {
            DynamicKind::Interchangeable => &[(a, b), (b, a)],
            DynamicKind::Substitutable => &[(b, a)],
        };
        let mut swapped = Vec::new();
        for &(from, to) in directions {
            for s in self.sols.iter().filter(|s| s[v] == from) {
                swapped.clear();
                swapped.extend_from_slice(s);
                swapped[v] = to;
                if !self.sols.contains(&swapped) {
                    bad.push(s);
                }
            }
        }
        let relevant: Vec<&Vec<ValId>> = self
            .sols
            .iter()
            .filter(|s| match kind {
                DynamicKind::Interchangeable => s[v] == a || s[v] == b,
                DynamicKind::Substitutable => s[v] == b,
            })
            .collect();
        for asg in self.consistent_assignment_sets(v) {
            if relevant.iter().any(|s| asg.agrees_with(s)) && !bad.iter().any(|s| asg.agrees_with(s)) {
                return Ok(Verdict::yes_with(Witness::AssignmentSet(asg)));
            }
        }
        Ok(Verdict::no())
    }

    /// Existential conditional form over conditions that restrict every other
    /// variable to a non-empty subset of its domain. Restricting to a single
    /// point suffices (sub-restrictions preserve the relation), so the search
    /// runs over points.
    pub fn conditional_exists(&self, v: VarId, a: ValId, b: ValId, kind: ConditionalKind) -> Result<Verdict, CspError> {
        self.check_pair(v, a, b)?;
        let csp = self.csp;
        let mut found = None;
        for_each_point(csp, v, |values| {
            values[v] = a;
            let with_a = csp.is_solution(values);
            values[v] = b;
            let with_b = csp.is_solution(values);
            let ok = match kind {
                ConditionalKind::Interchangeable => with_a == with_b,
                ConditionalKind::Substitutable => !with_b || with_a,
            };
            if ok {
                let mut point = Assignment::from_full(values);
                point.unbind(v);
                found = Some(point);
            }
            ok
        });
        Ok(match found {
            Some(p) => Verdict::yes_with(Witness::Condition(p)),
            None => Verdict::no(),
        })
    }
}

fn lift_witness(verdict: Verdict, subset: &BTreeSet<VarId>) -> Verdict {
    let index: Vec<VarId> = subset.iter().copied().collect();
    let lift = |a: Assignment| a.iter().map(|(x, val)| (index[x], val)).collect::<Assignment>();
    Verdict {
        holds: verdict.holds,
        witness: verdict.witness.map(|w| match w {
            Witness::Violation(a) => Witness::Violation(lift(a)),
            Witness::Context(a) => Witness::Context(lift(a)),
            other => other,
        }),
    }
}

pub(crate) fn check_boundary(csp: &CspInstance, v: VarId, subset: &BTreeSet<VarId>) -> Result<(), CspError> {
    if !subset.contains(&v) {
        return Err(CspError::InvalidSubset(format!(
            "the boundary must contain `{}`",
            csp.var_name(v)
        )));
    }
    if let Some(&x) = subset.iter().find(|&&x| x >= csp.num_vars()) {
        return Err(CspError::InvalidSubset(format!("unknown variable #{x}")));
    }
    Ok(())
}

pub(crate) fn check_dynamic_assignment(csp: &CspInstance, v: VarId, asg: &Assignment) -> Result<(), CspError> {
    if asg.binds(v) {
        return Err(CspError::InvalidParameter(format!(
            "`{}` must not be bound by the assignment set",
            csp.var_name(v)
        )));
    }
    if !csp.is_consistent(asg)? {
        return Err(CspError::InconsistentAssignment);
    }
    Ok(())
}

/// All consistent partial assignments over `vars` (each variable either
/// unbound or bound to one of its values), the empty one first.
pub fn partial_assignments(csp: &CspInstance, vars: &[VarId]) -> Vec<Assignment> {
    let mut out = Vec::new();
    let mut current = Assignment::new();
    partial_rec(csp, vars, 0, &mut current, &mut out);
    out
}

fn partial_rec(csp: &CspInstance, vars: &[VarId], i: usize, current: &mut Assignment, out: &mut Vec<Assignment>) {
    if i == vars.len() {
        out.push(current.clone());
        return;
    }
    partial_rec(csp, vars, i + 1, current, out);
    let x = vars[i];
    for val in 0..csp.domain_size(x) {
        current.bind(x, val);
        if csp.consistent_unchecked(current) {
            partial_rec(csp, vars, i + 1, current, out);
        }
        current.unbind(x);
    }
}

/// Visits every full value vector with `v` free (its slot is scratch space)
/// until `visit` returns true.
fn for_each_point<F>(csp: &CspInstance, v: VarId, mut visit: F)
where
    F: FnMut(&mut Vec<ValId>) -> bool,
{
    let n = csp.num_vars();
    if (0..n).any(|x| x != v && csp.domain_size(x) == 0) {
        return;
    }
    let mut values = vec![0; n];
    loop {
        if visit(&mut values) {
            return;
        }
        // odometer over the other variables
        let mut x = 0;
        loop {
            if x == n {
                return;
            }
            if x == v {
                x += 1;
                continue;
            }
            values[x] += 1;
            if values[x] < csp.domain_size(x) {
                break;
            }
            values[x] = 0;
            x += 1;
        }
    }
}

pub fn check_fi(csp: &CspInstance, v: VarId, a: ValId, b: ValId) -> Result<Verdict, CspError> {
    Semantics::new(csp).fi(v, a, b)
}

pub fn check_sub(csp: &CspInstance, v: VarId, a: ValId, b: ValId) -> Result<Verdict, CspError> {
    Semantics::new(csp).sub(v, a, b)
}

pub fn check_pi(
    csp: &CspInstance,
    v: VarId,
    a: ValId,
    b: ValId,
    subset: &BTreeSet<VarId>,
) -> Result<Verdict, CspError> {
    Semantics::new(csp).pi(v, a, b, subset)
}

pub fn check_spri(
    csp: &CspInstance,
    v: VarId,
    a: ValId,
    b: ValId,
    subset: &BTreeSet<VarId>,
) -> Result<Verdict, CspError> {
    Semantics::new(csp).spri(v, a, b, subset)
}

pub fn check_ki(csp: &CspInstance, v: VarId, a: ValId, b: ValId, k: usize) -> Result<Verdict, CspError> {
    Semantics::new(csp).ki(v, a, b, k)
}

/// Conditional interchangeability / substitutability under explicit extra
/// constraints.
pub fn check_conditional(
    csp: &CspInstance,
    v: VarId,
    a: ValId,
    b: ValId,
    extra: &[Constraint],
    kind: ConditionalKind,
) -> Result<Verdict, CspError> {
    let conditioned = csp.with_constraints(extra)?;
    let sem = Semantics::new(&conditioned);
    match kind {
        ConditionalKind::Interchangeable => sem.fi(v, a, b),
        ConditionalKind::Substitutable => sem.sub(v, a, b),
    }
}

/// Dynamic forms evaluated on the reduced instance built by
/// [`CspInstance::apply_assignment`]. `v` keeps its value indices there since
/// it is unbound.
pub fn check_fdyn(
    csp: &CspInstance,
    v: VarId,
    a: ValId,
    b: ValId,
    asg: &Assignment,
    kind: DynamicKind,
) -> Result<Verdict, CspError> {
    csp.check_value(v, a)?;
    csp.check_value(v, b)?;
    check_dynamic_assignment(csp, v, asg)?;
    let reduced = csp.apply_assignment(asg)?;
    let sem = Semantics::new(&reduced);
    let verdict = match kind {
        DynamicKind::Interchangeable => sem.fi(v, a, b)?,
        DynamicKind::Substitutable => sem.sub(v, a, b)?,
    };
    // witnesses from the reduced instance use reduced indices; map back
    Ok(Verdict {
        holds: verdict.holds,
        witness: verdict.witness.map(|w| match w {
            Witness::Violation(s) => {
                Witness::Violation(s.iter().map(|(x, val)| (x, asg.get(x).unwrap_or(val))).collect())
            }
            other => other,
        }),
    })
}

pub fn check_ctxdep(csp: &CspInstance, v: VarId, a: ValId, b: ValId) -> Result<Verdict, CspError> {
    Semantics::new(csp).ctxdep(v, a, b)
}

pub fn check_tupsub(csp: &CspInstance, a_tuple: &Assignment, b_tuple: &Assignment) -> Result<Verdict, CspError> {
    Semantics::new(csp).tupsub(a_tuple, b_tuple)
}

/// Literal clique reading of context-dependent interchangeability on binary
/// instances: a clique of the modified microstructure holding `(v,a)`,
/// `(v,b)` and one node of every other variable. Nodes excluded by a unary
/// constraint are unusable.
pub fn ctxdep_by_clique(csp: &CspInstance, v: VarId, a: ValId, b: ValId) -> Result<Verdict, CspError> {
    csp.check_value(v, a)?;
    csp.check_value(v, b)?;
    let ms = build_microstructure(csp, true)?;
    let live = csp.effective_domains();
    if !live[v][a] || !live[v][b] {
        return Ok(Verdict::no());
    }
    let others: Vec<VarId> = (0..csp.num_vars()).filter(|&x| x != v).collect();
    let mut chosen = vec![ms.node_index(v, a), ms.node_index(v, b)];
    let mut picked = Assignment::new();
    fn extend(
        csp: &CspInstance,
        ms: &crate::csp::MicroStructure,
        live: &[Vec<bool>],
        others: &[VarId],
        i: usize,
        chosen: &mut Vec<usize>,
        picked: &mut Assignment,
    ) -> bool {
        if i == others.len() {
            return true;
        }
        let x = others[i];
        for val in 0..csp.domain_size(x) {
            if !live[x][val] {
                continue;
            }
            let node = ms.node_index(x, val);
            if chosen.iter().all(|&c| c == node || ms.adjacent(c, node)) {
                chosen.push(node);
                picked.bind(x, val);
                if extend(csp, ms, live, others, i + 1, chosen, picked) {
                    return true;
                }
                picked.unbind(x);
                chosen.pop();
            }
        }
        false
    }
    if extend(csp, &ms, &live, &others, 0, &mut chosen, &mut picked) {
        Ok(Verdict::yes_with(Witness::Context(picked)))
    } else {
        Ok(Verdict::no())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_bool() -> CspInstance {
        CspInstance::builder()
            .var("X", &["0", "1"])
            .var("Y", &["0", "1"])
            .allow(&["X", "Y"], &[&["0", "1"], &["1", "0"]])
            .build()
            .unwrap()
    }

    #[test]
    fn enumeration_basics() {
        let one = CspInstance::builder().var("X", &["a", "b"]).build().unwrap();
        assert_eq!(enumerate_solutions(&one, None).len(), 2);

        // hand enumeration of the four candidates
        let sols = enumerate_solutions(&two_bool(), None);
        assert_eq!(sols.solutions(), &[vec![0, 1], vec![1, 0]]);
        assert!(sols.is_complete());

        let limited = enumerate_solutions(&two_bool(), Some(1));
        assert_eq!(limited.len(), 1);
        assert!(!limited.is_complete());
    }

    #[test]
    fn empty_domain_has_no_solutions() {
        let csp = two_bool();
        let reduced = csp.restrict_domains(&[vec![false, false], vec![true, true]]);
        assert!(enumerate_solutions(&reduced, None).is_empty());
    }

    #[test]
    fn fi_identity_and_unconstrained() {
        let csp = two_bool();
        assert!(check_fi(&csp, 0, 1, 1).unwrap().holds);
        let free = CspInstance::builder().var("X", &["a", "b", "c"]).build().unwrap();
        assert!(check_fi(&free, 0, 0, 2).unwrap().holds);
        let verdict = check_fi(&csp, 0, 0, 1).unwrap();
        assert!(!verdict.holds);
        assert!(matches!(verdict.witness, Some(Witness::Violation(_))));
        assert!(check_fi(&csp, 0, 0, 5).is_err());
    }

    #[test]
    fn pi_with_all_variables_is_existence() {
        // X in {a,b,c}; c appears in no solution
        let csp = CspInstance::builder()
            .var("X", &["a", "b", "c"])
            .var("Y", &["p", "q"])
            .allow(&["X", "Y"], &[&["a", "p"], &["b", "q"]])
            .build()
            .unwrap();
        let all: BTreeSet<_> = (0..2).collect();
        assert!(check_pi(&csp, 0, 0, 1, &all).unwrap().holds);
        assert!(!check_pi(&csp, 0, 0, 2, &all).unwrap().holds);
        assert!(!check_pi(&csp, 0, 0, 1, &[0].into_iter().collect()).unwrap().holds);
        assert!(matches!(
            check_pi(&csp, 0, 0, 1, &[1].into_iter().collect()),
            Err(CspError::InvalidSubset(_))
        ));
    }

    #[test]
    fn spri_on_singleton_is_trivial() {
        let csp = two_bool();
        assert!(check_spri(&csp, 0, 0, 1, &[0].into_iter().collect()).unwrap().holds);
    }

    #[test]
    fn ki_range_and_top() {
        let csp = two_bool();
        assert!(check_ki(&csp, 0, 0, 1, 1).is_err());
        assert!(check_ki(&csp, 0, 0, 1, 3).is_err());
        assert_eq!(
            check_ki(&csp, 0, 0, 1, 2).unwrap().holds,
            check_fi(&csp, 0, 0, 1).unwrap().holds
        );
    }

    #[test]
    fn conditional_edge_cases() {
        let csp = two_bool();
        for kind in [ConditionalKind::Interchangeable, ConditionalKind::Substitutable] {
            let plain = match kind {
                ConditionalKind::Interchangeable => check_fi(&csp, 0, 0, 1).unwrap().holds,
                ConditionalKind::Substitutable => check_sub(&csp, 0, 0, 1).unwrap().holds,
            };
            assert_eq!(check_conditional(&csp, 0, 0, 1, &[], kind).unwrap().holds, plain);
            let kill = Constraint::allow(vec![1], Vec::<Vec<usize>>::new());
            assert!(check_conditional(&csp, 0, 0, 1, &[kill], kind).unwrap().holds);
        }
    }

    #[test]
    fn fdyn_edge_cases() {
        let csp = two_bool();
        let empty = Assignment::new();
        assert_eq!(
            check_fdyn(&csp, 0, 0, 1, &empty, DynamicKind::Interchangeable)
                .unwrap()
                .holds,
            check_fi(&csp, 0, 0, 1).unwrap().holds
        );
        let bound = Assignment::new().with(0, 0);
        assert!(matches!(
            check_fdyn(&csp, 0, 0, 1, &bound, DynamicKind::Interchangeable),
            Err(CspError::InvalidParameter(_))
        ));
        // Y=1 leaves only X=0: FI vacuous on the b side, but X=0 survives
        let y1 = Assignment::new().with(1, 1);
        assert!(
            !check_fdyn(&csp, 0, 0, 1, &y1, DynamicKind::Interchangeable)
                .unwrap()
                .holds
        );
        assert!(
            check_fdyn(&csp, 0, 0, 1, &y1, DynamicKind::Substitutable)
                .unwrap()
                .holds
        );
    }

    #[test]
    fn ctxdep_reflexive_cases() {
        let csp = CspInstance::builder()
            .var("X", &["a", "b"])
            .var("Y", &["p"])
            .allow(&["X", "Y"], &[&["a", "p"]])
            .build()
            .unwrap();
        assert!(check_ctxdep(&csp, 0, 0, 0).unwrap().holds);
        assert!(!check_ctxdep(&csp, 0, 1, 1).unwrap().holds);
        assert!(!ctxdep_by_clique(&csp, 0, 1, 1).unwrap().holds);
    }

    #[test]
    fn tupsub_cases() {
        let csp = two_bool();
        let a = Assignment::new().with(0, 0);
        let b = Assignment::new().with(0, 1);
        assert!(check_tupsub(&csp, &a, &a).unwrap().holds);
        assert!(!check_tupsub(&csp, &a, &b).unwrap().holds);
        // a tuple in no solution is substitutable by anything
        let dead = Assignment::new().with(0, 0).with(1, 0);
        let live = Assignment::new().with(0, 1).with(1, 0);
        assert!(check_tupsub(&csp, &live, &dead).unwrap().holds);
        assert!(check_tupsub(&csp, &a, &dead).is_err());
    }

    #[test]
    fn partial_assignments_include_empty() {
        let csp = two_bool();
        let sets = partial_assignments(&csp, &[0, 1]);
        assert_eq!(sets[0], Assignment::new());
        // 1 empty + 2 + 2 singletons + 2 consistent full
        assert_eq!(sets.len(), 7);
    }
}
