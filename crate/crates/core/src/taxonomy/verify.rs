//! Edge verification: every implication of a lattice is checked on every
//! value pair of every instance, carrying parameters over with the edge's
//! transfer rule.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;

use super::concept::Concept;
use super::evaluate::{ordering_with, Context};
use super::lattice::{Rule, TaxonomyLattice};
use super::TaxonomyError;
use crate::csp::{Assignment, Constraint, CspInstance, ValId, VarId};
use crate::detect::{con_local, forwni, ni_classes, nsub_pairs, ConLocalKind};
use crate::io::{emit, generate, ModelError, RandomModel};
use crate::oracle::DynamicKind;
use crate::rng::{self, Rng};

/// Largest instances the oracle is trusted with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeGuard {
    pub max_vars: usize,
    pub max_domain: usize,
}

impl Default for SizeGuard {
    fn default() -> Self {
        SizeGuard {
            max_vars: 6,
            max_domain: 4,
        }
    }
}

impl SizeGuard {
    pub fn check(&self, index: usize, csp: &CspInstance) -> Result<(), TaxonomyError> {
        let (vars, domain) = (csp.num_vars(), csp.max_domain_size());
        if vars > self.max_vars || domain > self.max_domain {
            return Err(TaxonomyError::Oversized {
                index,
                vars,
                domain,
                max_vars: self.max_vars,
                max_domain: self.max_domain,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub guard: SizeGuard,
    /// Seeds the sampling of orderings, assignment sets and conditions.
    pub seed: u64,
    /// Largest boundary size tried; `None` tries all of them.
    pub max_boundary: Option<usize>,
    /// All orderings are tried when there are at most this many, otherwise
    /// this many are sampled.
    pub max_orderings: usize,
    /// Same for consistent assignment sets.
    pub max_assignment_sets: usize,
    /// Random conditions per variable, on top of the empty one.
    pub conditions: usize,
    /// Ordered value pairs examined per instance; `None` examines all.
    pub pair_budget: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            guard: SizeGuard::default(),
            seed: 0,
            max_boundary: None,
            max_orderings: 120,
            max_assignment_sets: 1024,
            conditions: 4,
            pair_budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub instance: usize,
    /// The instance in the text format.
    pub text: String,
    pub var: String,
    pub a: String,
    pub b: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "instance #{}, {} = {} / {}: {}",
            self.instance, self.var, self.a, self.b, self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeReport {
    pub from: Concept,
    pub to: Concept,
    pub rule: Rule,
    pub equivalence: bool,
    /// Parameterized pair checks whose antecedent was evaluated.
    pub checks: u64,
    /// The counterexample on the earliest instance, if any.
    pub violation: Option<Violation>,
}

impl EdgeReport {
    pub fn label(&self) -> String {
        let arrow = if self.equivalence { "<->" } else { "->" };
        format!("{} {arrow} {} [{}]", self.from.name(), self.to.name(), self.rule.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub instances: usize,
    pub edges: Vec<EdgeReport>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.edges.iter().all(|e| e.violation.is_none())
    }

    pub fn violations(&self) -> impl Iterator<Item = &EdgeReport> {
        self.edges.iter().filter(|e| e.violation.is_some())
    }

    pub fn checks(&self) -> u64 {
        self.edges.iter().map(|e| e.checks).sum()
    }
}

/// Seeded random instances; instance `i` uses seed `seed + i` and cycles
/// through `tightness`.
pub fn random_corpus(
    count: usize,
    n: usize,
    d: usize,
    density: f64,
    tightness: &[f64],
    seed: u64,
) -> Result<Vec<CspInstance>, ModelError> {
    if tightness.is_empty() && count > 0 {
        return Err(ModelError("at least one tightness is needed".into()));
    }
    (0..count)
        .map(|i| {
            let t = tightness[i % tightness.len()];
            generate(&RandomModel::new(n, d, density, t, seed.wrapping_add(i as u64)))
        })
        .collect()
}

struct Item {
    from: Concept,
    to: Concept,
    rule: Rule,
    equivalence: bool,
}

/// Checks every edge and equivalence of `lattice` on every instance. The
/// report keeps, per edge, the counterexample from the earliest instance.
pub fn verify_edges(
    instances: &[CspInstance],
    lattice: &TaxonomyLattice,
    opts: &VerifyOptions,
) -> Result<VerifyReport, TaxonomyError> {
    lattice.validate()?;
    for (i, csp) in instances.iter().enumerate() {
        opts.guard.check(i, csp)?;
    }
    let items: Vec<Item> = lattice
        .edges
        .iter()
        .map(|e| Item {
            from: e.from,
            to: e.to,
            rule: e.rule,
            equivalence: false,
        })
        .chain(lattice.equivalences.iter().map(|q| Item {
            from: q.a,
            to: q.b,
            rule: q.rule,
            equivalence: true,
        }))
        .collect();
    let per_instance: Vec<Vec<(u64, Option<Violation>)>> = instances
        .par_iter()
        .enumerate()
        .map(|(i, csp)| check_instance(i, csp, &items, opts))
        .collect();
    let mut edges: Vec<EdgeReport> = items
        .iter()
        .map(|it| EdgeReport {
            from: it.from,
            to: it.to,
            rule: it.rule,
            equivalence: it.equivalence,
            checks: 0,
            violation: None,
        })
        .collect();
    for results in per_instance {
        for (edge, (checks, violation)) in edges.iter_mut().zip(results) {
            edge.checks += checks;
            if edge.violation.is_none() {
                edge.violation = violation;
            }
        }
    }
    Ok(VerifyReport {
        instances: instances.len(),
        edges,
    })
}

/// Parameters tried for one variable.
struct VarParams {
    boundaries: Vec<BTreeSet<VarId>>,
    orderings: Vec<Vec<VarId>>,
    assignments: Vec<Assignment>,
    conditions: Vec<Condition>,
}

/// Unary restrictions of the other variables, with the local relations of
/// the conditioned instance.
struct Condition {
    extra: Vec<Constraint>,
    ni: crate::detect::Partition,
    nsub: BTreeSet<(ValId, ValId)>,
}

impl Condition {
    fn new(csp: &CspInstance, v: VarId, extra: Vec<Constraint>) -> Self {
        let conditioned = csp.with_constraints(&extra).expect("unary conditions");
        Condition {
            ni: ni_classes(&conditioned, v),
            nsub: nsub_pairs(&conditioned, v),
            extra,
        }
    }

    fn keeps(&self, s: &[ValId]) -> bool {
        self.extra.iter().all(|c| c.allows_full(s))
    }
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn var_params(ctx: &Context, v: VarId, opts: &VerifyOptions, rng: &mut Rng) -> VarParams {
    let csp = ctx.csp();
    let n = csp.num_vars();
    let others: Vec<VarId> = (0..n).filter(|&x| x != v).collect();
    let cap = opts.max_boundary.unwrap_or(n).min(n);
    let boundaries = (0..cap)
        .flat_map(|size| others.iter().copied().combinations(size))
        .map(|w| w.into_iter().chain([v]).collect())
        .collect();

    let perms: u128 = (1..=n as u128).product();
    let orderings = if perms <= opts.max_orderings as u128 {
        (0..n).permutations(n).collect()
    } else {
        (0..opts.max_orderings)
            .map(|_| {
                let mut o: Vec<VarId> = (0..n).collect();
                rng::shuffle(rng, &mut o);
                o
            })
            .collect()
    };

    let all: Vec<Assignment> = ctx
        .all_assignment_sets()
        .iter()
        .filter(|a| !a.binds(v))
        .cloned()
        .collect();
    let assignments = if all.len() <= opts.max_assignment_sets {
        all
    } else {
        let mut picked = vec![all[0].clone()];
        picked.extend(
            rng::sample(rng, all.len() - 1, opts.max_assignment_sets.saturating_sub(1))
                .into_iter()
                .map(|i| all[i + 1].clone()),
        );
        picked
    };

    let mut conditions = vec![Condition::new(csp, v, Vec::new())];
    for _ in 0..opts.conditions {
        let extra = others
            .iter()
            .map(|&x| {
                let d = csp.domain_size(x);
                let mut keep: Vec<Vec<ValId>> = (0..d).filter(|_| rng::coin(rng)).map(|val| vec![val]).collect();
                if keep.is_empty() {
                    keep.push(vec![rng::below(rng, d as u64) as ValId]);
                }
                Constraint::allow(vec![x], keep)
            })
            .collect();
        conditions.push(Condition::new(csp, v, extra));
    }
    VarParams {
        boundaries,
        orderings,
        assignments,
        conditions,
    }
}

fn check_instance(
    index: usize,
    csp: &CspInstance,
    items: &[Item],
    opts: &VerifyOptions,
) -> Vec<(u64, Option<Violation>)> {
    let ctx = Context::new(csp);
    let mut rng = rng::seeded(opts.seed.wrapping_add((index as u64).wrapping_mul(GOLDEN)));
    let params: Vec<VarParams> = (0..csp.num_vars())
        .map(|v| var_params(&ctx, v, opts, &mut rng))
        .collect();
    let pairs: Vec<(VarId, ValId, ValId)> = (0..csp.num_vars())
        .flat_map(|v| (0..csp.domain_size(v)).flat_map(move |a| (0..csp.domain_size(v)).map(move |b| (v, a, b))))
        .take(opts.pair_budget.unwrap_or(usize::MAX))
        .collect();
    let mut text = None;
    items
        .iter()
        .map(|item| {
            let mut checks = 0;
            for &(v, a, b) in &pairs {
                let mut ck = Checker {
                    ctx: &ctx,
                    p: &params[v],
                    v,
                    a,
                    b,
                    checks: 0,
                };
                let failure = ck.check(item);
                checks += ck.checks;
                if let Some(detail) = failure {
                    let text = text.get_or_insert_with(|| emit(csp)).clone();
                    return (
                        checks,
                        Some(Violation {
                            instance: index,
                            text,
                            var: csp.var_name(v).to_string(),
                            a: csp.value_name(v, a).to_string(),
                            b: csp.value_name(v, b).to_string(),
                            detail,
                        }),
                    );
                }
            }
            (checks, None)
        })
        .collect()
}

struct Checker<'c, 'a> {
    ctx: &'c Context<'a>,
    p: &'c VarParams,
    v: VarId,
    a: ValId,
    b: ValId,
    checks: u64,
}

fn names(csp: &CspInstance, vars: impl IntoIterator<Item = VarId>) -> String {
    format!("{{{}}}", vars.into_iter().map(|x| csp.var_name(x)).join(", "))
}

impl Checker<'_, '_> {
    fn tick(&mut self) {
        self.checks += 1;
    }

    fn check(&mut self, item: &Item) -> Option<String> {
        if item.rule == Rule::Pairwise {
            let forward = self.pairwise(item.from, item.to);
            return if item.equivalence {
                forward.or_else(|| self.pairwise(item.to, item.from))
            } else {
                forward
            };
        }
        self.named(item.rule)
    }

    fn pairwise(&mut self, from: Concept, to: Concept) -> Option<String> {
        self.tick();
        let (ctx, v, a, b) = (self.ctx, self.v, self.a, self.b);
        let lhs = ctx.canonical(from, v, a, b);
        if !lhs.holds || ctx.holds(to, v, a, b) {
            return None;
        }
        let why = match lhs.witness {
            Some(w) => format!(" ({})", w.describe(ctx.csp())),
            None => String::new(),
        };
        Some(format!("{from} holds{why} but {to} does not"))
    }

    fn named(&mut self, rule: Rule) -> Option<String> {
        let (ctx, p, v, a, b) = (self.ctx, self.p, self.v, self.a, self.b);
        let csp = ctx.csp();
        let n = csp.num_vars();
        let show = |asg: &Assignment| asg.display(csp).to_string();
        match rule {
            Rule::NiKi => {
                if !ctx.ni(v, a, b) {
                    return None;
                }
                for k in 2..=n {
                    self.tick();
                    if !ctx.ki(v, a, b, k) {
                        return Some(format!("NI holds but {k}-interchangeability does not"));
                    }
                }
            }
            Rule::KiFi => {
                for k in csp.max_arity().max(2)..=n {
                    self.tick();
                    if ctx.ki(v, a, b, k) && !ctx.fi(v, a, b) {
                        return Some(format!("{k}-interchangeability holds but FI does not"));
                    }
                }
            }
            Rule::FiPi => {
                if !ctx.fi(v, a, b) {
                    return None;
                }
                for s in &p.boundaries {
                    self.tick();
                    if !ctx.pi(v, a, b, s) {
                        return Some(format!(
                            "FI holds but PI wrt {} does not",
                            names(csp, s.iter().copied())
                        ));
                    }
                }
            }
            Rule::FiSub => {
                self.tick();
                if ctx.fi(v, a, b) && !(ctx.sub(v, a, b) && ctx.sub(v, b, a)) {
                    return Some("FI holds but substitutability fails in one direction".into());
                }
            }
            Rule::NiNsub => {
                self.tick();
                if ctx.ni(v, a, b) && !(ctx.nsub(v, a, b) && ctx.nsub(v, b, a)) {
                    return Some("NI holds but NSub fails in one direction".into());
                }
            }
            Rule::NsubSub => {
                self.tick();
                if ctx.nsub(v, a, b) && !ctx.sub(v, a, b) {
                    return Some("NSub holds but Sub does not".into());
                }
            }
            Rule::NpiSpri => {
                for s in &p.boundaries {
                    self.tick();
                    if !ctx.npi(v, a, b, s) {
                        continue;
                    }
                    let t: BTreeSet<VarId> = (0..n).filter(|x| *x == v || !s.contains(x)).collect();
                    if !ctx.spri(v, a, b, &t) {
                        return Some(format!(
                            "NPI wrt {} holds but SPrI on {} does not",
                            names(csp, s.iter().copied()),
                            names(csp, t)
                        ));
                    }
                }
            }
            Rule::NpiDiri => {
                for s in &p.boundaries {
                    self.tick();
                    let pred: Vec<VarId> = (0..n).filter(|x| !s.contains(x)).collect();
                    let o = ordering_with(n, v, &pred);
                    if ctx.npi(v, a, b, s) != ctx.diri(v, a, b, &o) {
                        return Some(format!(
                            "NPI wrt {} disagrees with DirI for ordering {}",
                            names(csp, s.iter().copied()),
                            names(csp, o)
                        ));
                    }
                }
                for o in &p.orderings {
                    self.tick();
                    let at = o.iter().position(|&x| x == v).expect("v in ordering");
                    let s: BTreeSet<VarId> = o[at..].iter().copied().collect();
                    if ctx.diri(v, a, b, o) != ctx.npi(v, a, b, &s) {
                        return Some(format!(
                            "DirI for ordering {} disagrees with NPI wrt {}",
                            names(csp, o.iter().copied()),
                            names(csp, s)
                        ));
                    }
                }
            }
            Rule::DiriDirsub => {
                for o in &p.orderings {
                    self.tick();
                    if ctx.diri(v, a, b, o) && !(ctx.dirsub(v, a, b, o) && ctx.dirsub(v, b, a, o)) {
                        return Some(format!(
                            "DirI holds for ordering {} but DirSub does not",
                            names(csp, o.iter().copied())
                        ));
                    }
                }
            }
            Rule::NpiNic => {
                for s in &p.boundaries {
                    self.tick();
                    if !ctx.npi(v, a, b, s) {
                        continue;
                    }
                    for c in ctx.linking_constraints(v) {
                        let leaves = csp.constraint(c).scope().iter().all(|x| *x == v || !s.contains(x));
                        if leaves && !ctx.nic(v, a, b, c) {
                            return Some(format!(
                                "NPI wrt {} holds but NI_C fails on constraint #{c}",
                                names(csp, s.iter().copied())
                            ));
                        }
                    }
                }
            }
            Rule::NicNsubc => {
                for c in ctx.linking_constraints(v) {
                    self.tick();
                    if ctx.nic(v, a, b, c) && !(ctx.nsubc(v, a, b, c) && ctx.nsubc(v, b, a, c)) {
                        return Some(format!("NI_C holds on constraint #{c} but NSub_C does not"));
                    }
                }
            }
            Rule::NiDynni => {
                if !ctx.ni(v, a, b) {
                    return None;
                }
                for asg in &p.assignments {
                    self.tick();
                    if !ctx.dynni(v, a, b, asg) {
                        return Some(format!("NI holds but DynNI under {} does not", show(asg)));
                    }
                }
            }
            Rule::DynniFdyni => {
                for asg in &p.assignments {
                    self.tick();
                    if ctx.dynni(v, a, b, asg) && !ctx.fdyn(v, a, b, asg, DynamicKind::Interchangeable) {
                        return Some(format!("DynNI holds under {} but FDynI does not", show(asg)));
                    }
                }
            }
            Rule::DynniForwni => {
                for asg in &p.assignments {
                    self.tick();
                    if !ctx.dynni(v, a, b, asg) {
                        continue;
                    }
                    let vars: BTreeSet<VarId> = asg.vars().chain([v]).collect();
                    let (u, u2) = (asg.clone().with(v, a), asg.clone().with(v, b));
                    if !forwni(csp, &vars, &u, &u2).expect("tuples over vars") {
                        return Some(format!(
                            "DynNI holds under {} but {} and {} are not ForwNI",
                            show(asg),
                            show(&u),
                            show(&u2)
                        ));
                    }
                }
            }
            Rule::ConniConi | Rule::ConiConsub | Rule::ConniConnsub | Rule::ConnsubConsub => {
                let sem = ctx.semantics();
                for (i, cond) in p.conditions.iter().enumerate() {
                    self.tick();
                    let keep = |s: &[ValId]| cond.keeps(s);
                    let failed = match rule {
                        Rule::ConniConi => cond.ni.same_block(a, b) && !sem.fi_where(v, a, b, keep),
                        Rule::ConiConsub => {
                            sem.fi_where(v, a, b, keep)
                                && !(sem.sub_where(v, a, b, keep) && sem.sub_where(v, b, a, keep))
                        }
                        Rule::ConniConnsub => {
                            cond.ni.same_block(a, b) && !(cond.nsub.contains(&(a, b)) && cond.nsub.contains(&(b, a)))
                        }
                        _ => cond.nsub.contains(&(a, b)) && !sem.sub_where(v, a, b, keep),
                    };
                    if failed {
                        let (lhs, rhs) = rule.endpoints().expect("named rule");
                        return Some(format!("{lhs} holds under condition #{i} but {rhs} does not"));
                    }
                }
            }
            Rule::NiNti => {
                self.tick();
                let single = BTreeSet::from([v]);
                if ctx.ni(v, a, b) && ctx.live(v, a) && ctx.live(v, b) && !ctx.nti(v, a, b, &single) {
                    return Some("NI holds but NTI wrt the variable alone does not".into());
                }
            }
            Rule::NtiPi | Rule::NtiNpi => {
                for s in &p.boundaries {
                    self.tick();
                    if !ctx.nti(v, a, b, s) {
                        continue;
                    }
                    let ok = match rule {
                        Rule::NtiPi => ctx.pi(v, a, b, s),
                        _ => ctx.npi(v, a, b, s),
                    };
                    if !ok {
                        let (_, rhs) = rule.endpoints().expect("named rule");
                        return Some(format!(
                            "NTI wrt {} holds but {rhs} does not",
                            names(csp, s.iter().copied())
                        ));
                    }
                }
            }
            Rule::NtiForwni => {
                for s in &p.boundaries {
                    let Some(mates) = ctx.nti_table(v, s).mates(a, b) else {
                        continue;
                    };
                    for (ta, tb) in mates {
                        self.tick();
                        if !forwni(csp, s, &ta, &tb).expect("tuples over boundary") {
                            return Some(format!("NTI mates {} and {} are not ForwNI", show(&ta), show(&tb)));
                        }
                    }
                }
            }
            Rule::ForwniTupsub => {
                let sem = ctx.semantics();
                for s in &p.boundaries {
                    let table = ctx.nti_table(v, s);
                    for ta in table.representatives(a) {
                        for tb in table.representatives(b) {
                            self.tick();
                            if !forwni(csp, s, ta, tb).expect("tuples over boundary") {
                                continue;
                            }
                            let both = sem.tupsub(ta, tb).expect("valid tuples").holds
                                && sem.tupsub(tb, ta).expect("valid tuples").holds;
                            if !both {
                                return Some(format!(
                                    "{} and {} are ForwNI but not mutually tuple substitutable",
                                    show(ta),
                                    show(tb)
                                ));
                            }
                        }
                    }
                }
            }
            Rule::FdyniFdynsub => {
                for asg in &p.assignments {
                    self.tick();
                    if ctx.fdyn(v, a, b, asg, DynamicKind::Interchangeable)
                        && !(ctx.fdyn(v, a, b, asg, DynamicKind::Substitutable)
                            && ctx.fdyn(v, b, a, asg, DynamicKind::Substitutable))
                    {
                        return Some(format!("FDynI holds under {} but FDynSub does not", show(asg)));
                    }
                }
            }
            Rule::SubFdynsub | Rule::FiFdyni => {
                let (lhs, kind) = match rule {
                    Rule::SubFdynsub => (ctx.sub(v, a, b), DynamicKind::Substitutable),
                    _ => (ctx.fi(v, a, b), DynamicKind::Interchangeable),
                };
                if !lhs {
                    return None;
                }
                for asg in &p.assignments {
                    self.tick();
                    if !ctx.fdyn(v, a, b, asg, kind) {
                        let (from, to) = rule.endpoints().expect("named rule");
                        return Some(format!("{from} holds but {to} under {} does not", show(asg)));
                    }
                }
            }
            Rule::FdynsubConnsub => {
                if !csp.is_binary() {
                    return None;
                }
                let sols = ctx.semantics().solutions();
                for asg in &p.assignments {
                    let with_b: Vec<&Vec<ValId>> = sols.iter().filter(|s| s[v] == b && asg.agrees_with(s)).collect();
                    if with_b.is_empty() || !ctx.fdyn(v, a, b, asg, DynamicKind::Substitutable) {
                        continue;
                    }
                    self.tick();
                    let extra: Vec<Constraint> = (0..n)
                        .filter(|&x| x != v)
                        .map(|x| {
                            let vals: BTreeSet<ValId> = match asg.get(x) {
                                Some(val) => BTreeSet::from([val]),
                                None => with_b.iter().map(|s| s[x]).collect(),
                            };
                            Constraint::allow(vec![x], vals.into_iter().map(|val| vec![val]))
                        })
                        .collect();
                    if !con_local(csp, v, a, b, &extra, ConLocalKind::Substitutable).expect("valid pair") {
                        return Some(format!(
                            "FDynSub holds under {} but ConNSub fails under the derived condition",
                            show(asg)
                        ));
                    }
                }
            }
            Rule::CtxdepiFdyni => {
                self.tick();
                let sem = ctx.semantics();
                let lhs = sem.ctxdep(v, a, b).expect("valid pair").holds;
                let rhs = sem
                    .fdyn_exists(v, a, b, DynamicKind::Interchangeable)
                    .expect("valid pair")
                    .holds;
                if lhs != rhs {
                    return Some(format!("CtxDepI is {lhs} but FDynI is {rhs}"));
                }
            }
            Rule::FiCtxdepi => {
                self.tick();
                let sem = ctx.semantics();
                if ctx.fi(v, a, b) && sem.participates(v, a) && !sem.ctxdep(v, a, b).expect("valid pair").holds {
                    return Some("FI holds and the value is used by a solution, but CtxDepI does not hold".into());
                }
            }
            Rule::CtxdepiGnsub => {
                self.tick();
                if ctx.semantics().ctxdep(v, a, b).expect("valid pair").holds && !ctx.gnsub(v, a, b) {
                    return Some("CtxDepI holds but GNSub does not".into());
                }
            }
            Rule::GnsubConni => {
                if !csp.is_binary() || !ctx.gnsub(v, a, b) {
                    return None;
                }
                let point = shared_supports(ctx, v, a, b)?;
                self.tick();
                let extra: Vec<Constraint> = point
                    .iter()
                    .map(|(y, val)| Constraint::allow(vec![y], [vec![val]]))
                    .collect();
                if !con_local(csp, v, a, b, &extra, ConLocalKind::Interchangeable).expect("valid pair") {
                    return Some(format!(
                        "GNSub holds but ConNI fails with the neighbors fixed to {}",
                        show(&point)
                    ));
                }
            }
            Rule::Pairwise => unreachable!("handled by the caller"),
        }
        None
    }
}

/// For each neighbor of `v`, the first live value supporting both `a` and `b`
/// in every constraint it shares with `v`.
fn shared_supports(ctx: &Context, v: VarId, a: ValId, b: ValId) -> Option<Assignment> {
    let csp = ctx.csp();
    let mut point = Assignment::new();
    for y in csp.neighbors(v) {
        let shared: Vec<&Constraint> = csp
            .constraints()
            .iter()
            .filter(|c| c.involves(v) && c.involves(y) && c.arity() == 2)
            .collect();
        let val = (0..csp.domain_size(y)).filter(|&val| ctx.live(y, val)).find(|&val| {
            shared.iter().all(|c| {
                [a, b].iter().all(|&x| {
                    let t: Vec<ValId> = c.scope().iter().map(|&z| if z == v { x } else { val }).collect();
                    c.allows(&t)
                })
            })
        })?;
        point.bind(y, val);
    }
    Some(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::lattice::lattice;

    #[test]
    fn no_instances_no_violations() {
        let report = verify_edges(&[], &lattice(), &VerifyOptions::default()).unwrap();
        assert!(report.is_clean());
        assert_eq!(report.checks(), 0);
    }

    #[test]
    fn single_variable_is_clean() {
        let csp = CspInstance::builder().var("X", &["a", "b"]).build().unwrap();
        let report = verify_edges(&[csp], &lattice(), &VerifyOptions::default()).unwrap();
        assert!(report.is_clean());
    }

    #[test]
    fn small_corpus_is_clean() {
        let corpus = random_corpus(12, 4, 3, 0.5, &[0.2, 0.4, 0.6], 11).unwrap();
        let report = verify_edges(&corpus, &lattice(), &VerifyOptions::default()).unwrap();
        if let Some(e) = report.violations().next() {
            panic!("{}: {}", e.label(), e.violation.as_ref().unwrap());
        }
        assert!(report.checks() > 0);
    }

    #[test]
    fn oversized_instance_refused() {
        let corpus = random_corpus(1, 7, 2, 0.5, &[0.3], 0).unwrap();
        let err = verify_edges(&corpus, &lattice(), &VerifyOptions::default()).unwrap_err();
        assert!(matches!(err, TaxonomyError::Oversized { vars: 7, .. }));
    }

    #[test]
    fn bogus_edge_is_caught() {
        let mut bogus = lattice();
        bogus.edges.push(super::super::lattice::Edge {
            from: Concept::Nsubc,
            to: Concept::Sub,
            rule: Rule::Pairwise,
            citation: "made up".into(),
        });
        let csp = CspInstance::builder()
            .var("X", &["a", "b"])
            .var("Y", &["p"])
            .var("Z", &["r"])
            .allow(&["X", "Y"], &[&["a", "p"], &["b", "p"]])
            .allow(&["X", "Z"], &[&["a", "r"]])
            .build()
            .unwrap();
        let report = verify_edges(&[csp], &bogus, &VerifyOptions::default()).unwrap();
        let bad: Vec<_> = report.violations().collect();
        assert_eq!(bad.len(), 1);
        assert_eq!((bad[0].from, bad[0].to), (Concept::Nsubc, Concept::Sub));
        assert!(bad[0].violation.as_ref().unwrap().text.contains("var X a b"));
    }
}
