//! Small hand-built instances separating the concepts. Each one names a
//! variable and a value pair and lists claims about that pair; the claims
//! are checked against the oracle and the detectors.

use std::collections::BTreeSet;
use std::fmt;

use super::concept::Concept;
use super::evaluate::Context;
use super::TaxonomyError;
use crate::csp::{Assignment, Constraint, CspError, CspInstance, ValId, VarId};
use crate::detect::{con_local, forwni, ConLocalKind};
use crate::io::parse;
use crate::oracle::{enumerate_solutions, DynamicKind, Verdict};

/// How the parameter of a parameterized concept is fixed in a claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Param {
    /// The parameter-free form (see [`Context::canonical`]).
    Canonical,
    K(usize),
    Boundary(Vec<String>),
    Ordering(Vec<String>),
    AssignmentSet(Vec<(String, String)>),
    /// Allowed values for some of the other variables.
    Condition(Vec<(String, Vec<String>)>),
    /// Two tuples, the first substituting for the second.
    Tuples(Vec<(String, String)>, Vec<(String, String)>),
    /// Index of a constraint in the instance.
    Constraint(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim {
    pub concept: Concept,
    pub param: Param,
    /// Swaps the designated pair (for directional concepts: `b` for `a`).
    pub reversed: bool,
    pub expected: bool,
}

fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
    items.iter().map(|(x, v)| (x.to_string(), v.to_string())).collect()
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn show_pairs(items: &[(String, String)]) -> String {
    let inner: Vec<String> = items.iter().map(|(x, v)| format!("{x}={v}")).collect();
    format!("{{{}}}", inner.join(", "))
}

impl Claim {
    fn new(concept: Concept, expected: bool) -> Self {
        Claim {
            concept,
            param: Param::Canonical,
            reversed: false,
            expected,
        }
    }

    fn rev(mut self) -> Self {
        self.reversed = true;
        self
    }

    fn k(mut self, k: usize) -> Self {
        self.param = Param::K(k);
        self
    }

    fn wrt(mut self, vars: &[&str]) -> Self {
        self.param = Param::Boundary(strings(vars));
        self
    }

    fn ordering(mut self, vars: &[&str]) -> Self {
        self.param = Param::Ordering(strings(vars));
        self
    }

    fn under(mut self, asg: &[(&str, &str)]) -> Self {
        self.param = Param::AssignmentSet(pairs(asg));
        self
    }

    fn given(mut self, cond: &[(&str, &[&str])]) -> Self {
        self.param = Param::Condition(cond.iter().map(|(x, vals)| (x.to_string(), strings(vals))).collect());
        self
    }

    fn tuples(mut self, t: &[(&str, &str)], u: &[(&str, &str)]) -> Self {
        self.param = Param::Tuples(pairs(t), pairs(u));
        self
    }

    fn on(mut self, c: usize) -> Self {
        self.param = Param::Constraint(c);
        self
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Canonical => Ok(()),
            Param::K(k) => write!(f, "(k={k})"),
            Param::Boundary(s) => write!(f, "wrt {{{}}}", s.join(", ")),
            Param::Ordering(o) => write!(f, "for ordering {}", o.join(" < ")),
            Param::AssignmentSet(a) => write!(f, "under {}", show_pairs(a)),
            Param::Condition(c) => {
                let inner: Vec<String> = c
                    .iter()
                    .map(|(x, vals)| format!("{x} in {{{}}}", vals.join(", ")))
                    .collect();
                write!(f, "given {}", inner.join(", "))
            }
            Param::Tuples(t, u) => write!(f, "of {} for {}", show_pairs(t), show_pairs(u)),
            Param::Constraint(c) => write!(f, "on constraint #{c}"),
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.concept)?;
        if self.param != Param::Canonical {
            write!(f, " {}", self.param)?;
        }
        if self.reversed {
            write!(f, " (reversed)")?;
        }
        write!(f, " = {}", self.expected)
    }
}

fn lookup_var(csp: &CspInstance, name: &str) -> Result<VarId, TaxonomyError> {
    csp.var_id(name)
        .ok_or_else(|| TaxonomyError::Csp(CspError::UnknownVariable(name.to_string())))
}

fn lookup_vars(csp: &CspInstance, names: &[String]) -> Result<Vec<VarId>, TaxonomyError> {
    names.iter().map(|x| lookup_var(csp, x)).collect()
}

fn lookup_assignment(csp: &CspInstance, items: &[(String, String)]) -> Result<Assignment, TaxonomyError> {
    items.iter().map(|(x, val)| Ok(csp.lookup(x, val)?)).collect()
}

/// Evaluates `concept` on `(v, a, b)` with its parameter fixed by `param`
/// (`a` for `b` when directional). Negative semantic answers carry the
/// violating solution when the oracle provides one; canonical answers carry
/// the witness of [`Context::canonical`].
pub fn evaluate_param(
    ctx: &Context,
    concept: Concept,
    param: &Param,
    v: VarId,
    a: ValId,
    b: ValId,
) -> Result<Verdict, TaxonomyError> {
    let csp = ctx.csp();
    csp.check_value(v, a)?;
    csp.check_value(v, b)?;
    let c = concept;
    let bad = || TaxonomyError::Parameter {
        concept: c,
        param: param.to_string(),
    };
    let flag = |holds: bool| if holds { Verdict::yes() } else { Verdict::no() };
    let sem = ctx.semantics();
    Ok(match param {
        Param::Canonical => ctx.canonical(c, v, a, b),
        Param::K(k) if c == Concept::Ki && (2..=csp.num_vars()).contains(k) => {
            if ctx.ki(v, a, b, *k) {
                Verdict::yes()
            } else {
                sem.ki(v, a, b, *k)?
            }
        }
        Param::Boundary(names) => {
            let s: BTreeSet<VarId> = lookup_vars(csp, names)?.into_iter().collect();
            if !s.contains(&v) {
                return Err(bad());
            }
            match c {
                Concept::Pi if ctx.pi(v, a, b, &s) => Verdict::yes(),
                Concept::Pi => sem.pi(v, a, b, &s)?,
                Concept::Spri if ctx.spri(v, a, b, &s) => Verdict::yes(),
                Concept::Spri => sem.spri(v, a, b, &s)?,
                Concept::Npi => flag(ctx.npi(v, a, b, &s)),
                Concept::Nti => flag(ctx.nti(v, a, b, &s)),
                _ => return Err(bad()),
            }
        }
        Param::Ordering(names) => {
            let o = lookup_vars(csp, names)?;
            if o.len() != csp.num_vars() || o.iter().collect::<BTreeSet<_>>().len() != o.len() {
                return Err(bad());
            }
            match c {
                Concept::Diri => flag(ctx.diri(v, a, b, &o)),
                Concept::Dirsub => flag(ctx.dirsub(v, a, b, &o)),
                _ => return Err(bad()),
            }
        }
        Param::AssignmentSet(items) => {
            let asg = lookup_assignment(csp, items)?;
            if asg.binds(v) || !csp.is_consistent(&asg)? {
                return Err(bad());
            }
            match c {
                Concept::Dynni => flag(ctx.dynni(v, a, b, &asg)),
                Concept::Fdyni => sem.fdyn(v, a, b, &asg, DynamicKind::Interchangeable)?,
                Concept::Fdynsub => sem.fdyn(v, a, b, &asg, DynamicKind::Substitutable)?,
                _ => return Err(bad()),
            }
        }
        Param::Condition(items) => {
            let mut extra = Vec::new();
            for (x, vals) in items {
                let xi = lookup_var(csp, x)?;
                if xi == v {
                    return Err(bad());
                }
                let tuples = vals
                    .iter()
                    .map(|val| Ok(vec![csp.lookup(x, val)?.1]))
                    .collect::<Result<Vec<_>, TaxonomyError>>()?;
                extra.push(Constraint::allow(vec![xi], tuples));
            }
            let keep = |s: &[ValId]| extra.iter().all(|e| e.allows_full(s));
            match c {
                Concept::Coni => flag(sem.fi_where(v, a, b, keep)),
                Concept::Consub => flag(sem.sub_where(v, a, b, keep)),
                Concept::Conni => flag(con_local(csp, v, a, b, &extra, ConLocalKind::Interchangeable)?),
                Concept::Connsub => flag(con_local(csp, v, a, b, &extra, ConLocalKind::Substitutable)?),
                _ => return Err(bad()),
            }
        }
        Param::Tuples(t, u) => {
            let (t, u) = (lookup_assignment(csp, t)?, lookup_assignment(csp, u)?);
            match c {
                Concept::Tupsub => sem.tupsub(&t, &u)?,
                Concept::Forwni => {
                    let vars: BTreeSet<VarId> = t.vars().collect();
                    flag(forwni(csp, &vars, &t, &u)?)
                }
                _ => return Err(bad()),
            }
        }
        Param::Constraint(i) if *i < csp.num_constraints() && csp.constraint(*i).involves(v) => match c {
            Concept::Nic => flag(ctx.nic(v, a, b, *i)),
            Concept::Nsubc => flag(ctx.nsubc(v, a, b, *i)),
            _ => return Err(bad()),
        },
        _ => return Err(bad()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalleryInstance {
    pub id: &'static str,
    pub summary: &'static str,
    pub csp: CspInstance,
    pub var: String,
    pub a: String,
    pub b: String,
    pub claims: Vec<Claim>,
    /// Concepts holding on the pair for which dropping `b` makes the
    /// instance unsatisfiable.
    pub breaks_sat: Vec<Concept>,
}

impl GalleryInstance {
    pub fn pair(&self) -> Result<(VarId, ValId, ValId), TaxonomyError> {
        Ok(super::evaluate::resolve_pair(&self.csp, &self.var, &self.a, &self.b)?)
    }

    fn fail(&self, claim: impl fmt::Display) -> TaxonomyError {
        TaxonomyError::Gallery {
            id: self.id.to_string(),
            claim: claim.to_string(),
        }
    }

    /// Evaluates one claim, without comparing with the expected value.
    pub fn evaluate(&self, ctx: &Context, claim: &Claim) -> Result<bool, TaxonomyError> {
        let (v, mut a, mut b) = self.pair()?;
        if claim.reversed {
            std::mem::swap(&mut a, &mut b);
        }
        match evaluate_param(ctx, claim.concept, &claim.param, v, a, b) {
            Ok(verdict) => Ok(verdict.holds),
            Err(TaxonomyError::Parameter { .. }) => {
                Err(self.fail(format!("{claim} (parameter does not fit the concept)")))
            }
            Err(e) => Err(e),
        }
    }

    /// Checks every claim and every satisfiability witness.
    pub fn check(&self) -> Result<Vec<String>, TaxonomyError> {
        let ctx = Context::new(&self.csp);
        let mut lines = Vec::new();
        for claim in &self.claims {
            if self.evaluate(&ctx, claim)? != claim.expected {
                return Err(self.fail(claim));
            }
            lines.push(claim.to_string());
        }
        if !self.breaks_sat.is_empty() {
            let (v, a, b) = self.pair()?;
            let mut keep: Vec<Vec<bool>> = (0..self.csp.num_vars())
                .map(|x| vec![true; self.csp.domain_size(x)])
                .collect();
            keep[v][b] = false;
            let without = self.csp.restrict_domains(&keep);
            let broken = ctx.semantics().is_satisfiable() && enumerate_solutions(&without, Some(1)).is_empty();
            for &c in &self.breaks_sat {
                let claim = format!("{c} holds and dropping {} makes the instance unsatisfiable", self.b);
                if !broken || !ctx.holds(c, v, a, b) {
                    return Err(self.fail(claim));
                }
                lines.push(claim);
            }
        }
        Ok(lines)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GalleryReport {
    /// Per instance id, the claims that were checked.
    pub instances: Vec<(&'static str, Vec<String>)>,
}

impl GalleryReport {
    pub fn claims(&self) -> usize {
        self.instances.iter().map(|(_, c)| c.len()).sum()
    }
}

/// Checks the whole gallery, stopping at the first failing claim.
pub fn verify_gallery() -> Result<GalleryReport, TaxonomyError> {
    let mut instances = Vec::new();
    for g in gallery() {
        instances.push((g.id, g.check()?));
    }
    Ok(GalleryReport { instances })
}

struct Spec {
    id: &'static str,
    summary: &'static str,
    text: &'static str,
    claims: Vec<Claim>,
    breaks_sat: Vec<Concept>,
}

fn yes(c: Concept) -> Claim {
    Claim::new(c, true)
}

fn no(c: Concept) -> Claim {
    Claim::new(c, false)
}

fn specs() -> Vec<Spec> {
    use Concept::*;
    vec![
        Spec {
            id: "fi-not-3i-not-nsub",
            summary: "a and b are fully interchangeable, yet neither 3-interchangeable nor neighborhood substitutable",
            text: "var X a b\nvar Y p q s\nvar Z r\nvar W w\ncon X Y : allow (a,p) (a,q) (b,p) (b,s)\ncon Y W : allow (p,w)\n",
            claims: vec![yes(Fi), no(Ki).k(3), no(Ki), no(Nsub), no(Nsub).rev()],
            breaks_sat: vec![],
        },
        Spec {
            id: "ni",
            summary: "a and b have the same supports",
            text: "var X a b c\nvar Y p q\nvar Z r s\ncon X Y : allow (a,p) (b,p) (c,q)\ncon X Z : allow (a,r) (b,r) (c,r) (c,s)\n",
            claims: vec![yes(Ni), yes(Nsub), yes(Nsub).rev(), yes(Fi), yes(Nti).wrt(&["X"])],
            breaks_sat: vec![],
        },
        Spec {
            id: "3i-not-ni",
            summary: "a and b are 3-interchangeable but differ on a value of Y that has no support on Z",
            text: "var X a b\nvar Y p q\nvar Z r\ncon X Y : allow (a,p) (b,p) (b,q)\ncon Y Z : allow (p,r)\n",
            claims: vec![yes(Ki).k(3), no(Ni), yes(Fi)],
            breaks_sat: vec![],
        },
        Spec {
            id: "pi-not-sub-fi-ctxdepi-nti-npi",
            summary: "a and b are partially interchangeable wrt {X, Y} only",
            text: "var X a b\nvar Y p q\nvar Z r s\ncon X Y : allow (a,p) (b,q)\ncon X Z : allow (a,r) (a,s) (b,r)\ncon Y Z : allow (p,r) (q,r)\n",
            claims: vec![
                yes(Pi).wrt(&["X", "Y"]),
                no(Sub),
                no(Sub).rev(),
                no(Fi),
                no(Ctxdepi),
                no(Nti),
                no(Npi),
            ],
            breaks_sat: vec![],
        },
        Spec {
            id: "pi-not-sub-spri",
            summary: "a and b are partially interchangeable wrt {X, Y, Z} but no proper subproblem makes them interchangeable",
            text: "var X a b\nvar Y p q\nvar Z r s\nvar W t u\ncon X Y : allow (a,p) (b,q)\ncon X Z : allow (a,r) (b,s)\ncon X W : allow (a,t) (a,u) (b,t)\ncon Y W : allow (p,t) (q,t)\ncon Z W : allow (r,t) (s,t)\n",
            claims: vec![yes(Pi).wrt(&["X", "Y", "Z"]), no(Sub), no(Sub).rev(), no(Spri)],
            breaks_sat: vec![],
        },
        Spec {
            id: "spri-not-pi",
            summary: "a and b are interchangeable in the subproblem on {X, Y}, but only a extends to a solution",
            text: "var X a b\nvar Y p\nvar Z r\ncon X Y : allow (a,p) (b,p)\ncon X Z : allow (a,r)\n",
            claims: vec![yes(Spri).wrt(&["X", "Y"]), no(Pi)],
            breaks_sat: vec![],
        },
        Spec {
            id: "sub-not-nsub-not-fi",
            summary: "a can replace b in every solution although b has a support that a lacks",
            text: "var X a b\nvar Y p q s\nvar Z r\ncon X Y : allow (a,p) (a,s) (b,p) (b,q)\ncon Y Z : allow (p,r) (s,r)\n",
            claims: vec![yes(Sub), no(Nsub), no(Fi)],
            breaks_sat: vec![],
        },
        Spec {
            id: "nsub-not-ni-not-fi",
            summary: "every support of b supports a, not conversely",
            text: "var X a b\nvar Y p q\nvar Z r\ncon X Y : allow (a,p) (a,q) (b,p)\ncon Y Z : allow (p,r) (q,r)\n",
            claims: vec![yes(Nsub), no(Ni), no(Fi)],
            breaks_sat: vec![],
        },
        Spec {
            id: "spri-not-npi-not-sub",
            summary: "a and b are interchangeable in a subproblem without being locally equivalent anywhere",
            text: "var X a b\nvar Y p q\nvar Z r s\nvar W t u\ncon X Y : allow (a,p) (b,p) (b,q)\ncon X Z : allow (a,r) (b,r) (b,s)\ncon Y Z : allow (p,r)\ncon X W : allow (a,t) (b,u)\n",
            claims: vec![yes(Spri).wrt(&["X", "Y", "Z"]), no(Npi), no(Sub), no(Sub).rev()],
            breaks_sat: vec![],
        },
        Spec {
            id: "npi-not-pi-sub-fi-nti",
            summary: "a and b are neighborhood partially interchangeable wrt {X, Y}, where all of their constraints lie",
            text: "var X a b\nvar Y p q\nvar Z r s\ncon X Y : allow (a,p) (b,q)\ncon Y Z : allow (p,r) (q,s)\n",
            claims: vec![yes(Npi).wrt(&["X", "Y"]), no(Pi), no(Sub), no(Sub).rev(), no(Fi), no(Nti)],
            breaks_sat: vec![],
        },
        Spec {
            id: "nti-not-fdynsub",
            summary: "a and b use different values of Y that look the same from Z",
            text: "var X a b\nvar Y p q\nvar Z r s\ncon X Y : allow (a,p) (b,q)\ncon Y Z : allow (p,r) (q,r)\n",
            claims: vec![yes(Nti).wrt(&["X", "Y"]), no(Fdynsub), no(Fdynsub).rev(), no(Ni)],
            breaks_sat: vec![],
        },
        Spec {
            id: "ctxdepi-not-sub-fi-pi",
            summary: "a and b are interchangeable in the context {Y=p, Z=r} only",
            text: "var X a b\nvar Y p q s\nvar Z r t\ncon X Y : allow (a,p) (a,q) (b,p) (b,s)\ncon X Z : allow (a,r) (a,t) (b,r)\ncon Y Z : allow (p,r) (q,t) (s,r)\n",
            claims: vec![
                yes(Ctxdepi),
                yes(Fdyni).under(&[("Y", "p"), ("Z", "r")]),
                no(Sub),
                no(Sub).rev(),
                no(Fi),
                no(Pi),
            ],
            breaks_sat: vec![],
        },
        Spec {
            id: "gnsub-not-sub",
            summary: "a and b share the support p but each has a private one",
            text: "var X a b\nvar Y p q s\nvar Z r\ncon X Y : allow (a,p) (a,q) (b,p) (b,s)\ncon X Z : allow (a,r) (b,r)\n",
            claims: vec![yes(Gnsub), no(Sub), no(Sub).rev(), no(Nsub), no(Nsub).rev()],
            breaks_sat: vec![],
        },
        Spec {
            id: "nsub-not-conni-not-gnsub",
            summary: "b has no support at all",
            text: "var X a b\nvar Y p q\ncon X Y : allow (a,p) (a,q)\n",
            claims: vec![yes(Nsub), yes(Connsub), no(Conni), no(Gnsub), no(Coni)],
            breaks_sat: vec![],
        },
        Spec {
            id: "gnsub-not-fdyni-not-ctxdepi",
            summary: "a and b share supports on Y and on Z, but never inside the same solution",
            text: "var X a b\nvar Y p q\nvar Z r s\ncon X Y : allow (a,p) (a,q) (b,p)\ncon X Z : allow (a,r) (b,r) (b,s)\ncon Y Z : allow (p,s) (q,r)\n",
            claims: vec![yes(Gnsub), no(Fdyni), no(Ctxdepi)],
            breaks_sat: vec![],
        },
        Spec {
            id: "conni-not-gnsub",
            summary: "restricting Y to s, which supports neither value, makes a and b neighborhood interchangeable",
            text: "var X a b\nvar Y p q s\ncon X Y : allow (a,p) (b,q)\n",
            claims: vec![yes(Conni), yes(Conni).given(&[("Y", &["s"])]), no(Gnsub)],
            breaks_sat: vec![],
        },
        Spec {
            id: "coni-not-connsub",
            summary: "under Z = s neither value extends, yet b always keeps a support that a lacks",
            text: "var X a b\nvar Y p\nvar Z r s\ncon X Y : allow (b,p)\ncon X Z : allow (a,r) (a,s) (b,r)\n",
            claims: vec![yes(Coni), yes(Coni).given(&[("Y", &["p"]), ("Z", &["s"])]), no(Connsub)],
            breaks_sat: vec![],
        },
        Spec {
            id: "tupsub-not-fdynsub",
            summary: "the tuple (a, p) can replace (b, q), but no assignment set lets a replace b",
            text: "var X a b\nvar Y p q\nvar Z r\ncon X Y : allow (a,p) (b,q)\n",
            claims: vec![
                yes(Tupsub).tuples(&[("X", "a"), ("Y", "p")], &[("X", "b"), ("Y", "q")]),
                yes(Forwni).tuples(&[("X", "a"), ("Y", "p")], &[("X", "b"), ("Y", "q")]),
                no(Fdynsub),
            ],
            breaks_sat: vec![],
        },
        Spec {
            id: "fdynsub-not-tupsub",
            summary: "once Y = p, a can replace b, though not in general",
            text: "var X a b\nvar Y p q\nvar Z r\ncon X Y : allow (a,p) (b,p) (b,q)\n",
            claims: vec![yes(Fdynsub).under(&[("Y", "p")]), yes(Fdynsub), no(Tupsub)],
            breaks_sat: vec![],
        },
        Spec {
            id: "local-relations-break-sat",
            summary: "a and b agree on Y, but only b has a support on Z",
            text: "var X a b\nvar Y p\nvar Z r s\ncon X Y : allow (a,p) (b,p)\ncon X Z : allow (b,r)\n",
            claims: vec![
                yes(Nic).on(0),
                yes(Nsubc).on(0),
                yes(Npi).wrt(&["X", "Z"]),
                yes(Diri).ordering(&["Y", "X", "Z"]),
                yes(Conni).given(&[("Z", &["s"])]),
            ],
            breaks_sat: vec![Spri, Npi, Diri, Dirsub, Nic, Nsubc, Coni, Conni, Consub, Connsub],
        },
        Spec {
            id: "dynamic-relations-break-sat",
            summary: "under Z = r the two values look alike, but every solution needs Z = s and X = b",
            text: "var X a b\nvar Z r s\nvar W w\ncon X Z : allow (a,r) (b,r) (b,s)\ncon Z W : allow (s,w)\n",
            claims: vec![yes(Dynni).under(&[("Z", "r")])],
            breaks_sat: vec![Dynni, Gnsub],
        },
    ]
}

/// The gallery, parsed and ready to check. The designated pair is always
/// `X = a` / `X = b`.
pub fn gallery() -> Vec<GalleryInstance> {
    specs()
        .into_iter()
        .map(|s| GalleryInstance {
            id: s.id,
            summary: s.summary,
            csp: parse(s.text).expect("gallery instances parse"),
            var: "X".into(),
            a: "a".into(),
            b: "b".into(),
            claims: s.claims,
            breaks_sat: s.breaks_sat,
        })
        .collect()
}

/// The source text of a gallery instance.
pub fn gallery_text(id: &str) -> Option<&'static str> {
    specs().into_iter().find(|s| s.id == id).map(|s| s.text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::emit;

    #[test]
    fn every_claim_holds() {
        for g in gallery() {
            if let Err(e) = g.check() {
                panic!("{e}");
            }
        }
    }

    #[test]
    fn texts_are_canonical() {
        for g in gallery() {
            assert_eq!(emit(&g.csp), gallery_text(g.id).unwrap(), "{}", g.id);
        }
    }

    #[test]
    fn ids_are_unique() {
        let ids: BTreeSet<_> = gallery().iter().map(|g| g.id).collect();
        assert_eq!(ids.len(), gallery().len());
    }

    #[test]
    fn misfit_parameter_is_reported() {
        let mut g = gallery().remove(0);
        g.claims = vec![Claim::new(Concept::Ni, true).wrt(&["X"])];
        assert!(matches!(g.check(), Err(TaxonomyError::Gallery { .. })));
    }

    #[test]
    fn false_claim_names_instance() {
        let mut g = gallery().remove(1);
        g.claims.push(Claim::new(Concept::Ni, false));
        match g.check() {
            Err(TaxonomyError::Gallery { id, claim }) => {
                assert_eq!(id, "ni");
                assert_eq!(claim, "NI = false");
            }
            other => panic!("{other:?}"),
        }
    }
}
