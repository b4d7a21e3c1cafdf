use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::concept::{Concept, Plane};
use crate::io::quote;

/// How an implication is checked: which parameters of the antecedent are
/// carried over to the consequent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    NiKi,
    KiFi,
    FiPi,
    FiSub,
    NiNsub,
    NsubSub,
    NpiSpri,
    NpiDiri,
    DiriDirsub,
    NpiNic,
    NicNsubc,
    NiDynni,
    DynniFdyni,
    DynniForwni,
    ConniConi,
    ConiConsub,
    ConniConnsub,
    ConnsubConsub,
    NiNti,
    NtiPi,
    NtiNpi,
    NtiForwni,
    ForwniTupsub,
    FdyniFdynsub,
    SubFdynsub,
    FdynsubConnsub,
    CtxdepiFdyni,
    FiCtxdepi,
    FiFdyni,
    CtxdepiGnsub,
    GnsubConni,
    /// Compares the parameter-free forms of both concepts pair by pair.
    Pairwise,
}

macro_rules! rules {
    ($($rule:ident => $id:literal, $from:ident, $to:ident, $transfer:literal;)*) => {
        impl Rule {
            pub const NAMED: &'static [Rule] = &[$(Rule::$rule,)*];

            pub fn id(self) -> &'static str {
                match self {
                    $(Rule::$rule => $id,)*
                    Rule::Pairwise => "pairwise",
                }
            }

            /// The concept pair a named rule is written for.
            pub fn endpoints(self) -> Option<(Concept, Concept)> {
                match self {
                    $(Rule::$rule => Some((Concept::$from, Concept::$to)),)*
                    Rule::Pairwise => None,
                }
            }

            pub fn transfer(self) -> &'static str {
                match self {
                    $(Rule::$rule => $transfer,)*
                    Rule::Pairwise => "parameter-free forms compared on every ordered pair",
                }
            }
        }
    };
}

rules! {
    NiKi => "ni-ki", Ni, Ki, "every k from 2 to n";
    KiFi => "ki-fi", Ki, Fi, "every k at least the largest constraint arity";
    FiPi => "fi-pi", Fi, Pi, "every boundary containing the variable";
    FiSub => "fi-sub", Fi, Sub, "both directions";
    NiNsub => "ni-nsub", Ni, Nsub, "both directions";
    NsubSub => "nsub-sub", Nsub, Sub, "same direction";
    NpiSpri => "npi-spri", Npi, Spri, "boundary S maps to the subproblem induced by the complement of S plus the variable";
    NpiDiri => "npi-diri", Npi, Diri, "boundary S maps to an ordering with the complement of S before the variable and S after it; an ordering maps back to the variable plus its successors";
    DiriDirsub => "diri-dirsub", Diri, Dirsub, "same ordering, both directions";
    NpiNic => "npi-nic", Npi, Nic, "every constraint on the variable leaving the boundary";
    NicNsubc => "nic-nsubc", Nic, Nsubc, "same constraint, both directions";
    NiDynni => "ni-dynni", Ni, Dynni, "every consistent assignment set";
    DynniFdyni => "dynni-fdyni", Dynni, Fdyni, "same assignment set";
    DynniForwni => "dynni-forwni", Dynni, Forwni, "assignment set A maps to the tuples A+a and A+b over the assigned variables plus the variable";
    ConniConi => "conni-coni", Conni, Coni, "same condition";
    ConiConsub => "coni-consub", Coni, Consub, "same condition, both directions";
    ConniConnsub => "conni-connsub", Conni, Connsub, "same condition, both directions";
    ConnsubConsub => "connsub-consub", Connsub, Consub, "same condition, same direction";
    NiNti => "ni-nti", Ni, Nti, "boundary consisting of the variable alone, for values allowed by the unary constraints";
    NtiPi => "nti-pi", Nti, Pi, "same boundary";
    NtiNpi => "nti-npi", Nti, Npi, "same boundary";
    NtiForwni => "nti-forwni", Nti, Forwni, "matched tuples over the same boundary";
    ForwniTupsub => "forwni-tupsub", Forwni, Tupsub, "same consistent tuples, both directions";
    FdyniFdynsub => "fdyni-fdynsub", Fdyni, Fdynsub, "same assignment set, both directions";
    SubFdynsub => "sub-fdynsub", Sub, Fdynsub, "every consistent assignment set, same direction";
    FdynsubConnsub => "fdynsub-connsub", Fdynsub, Connsub, "on binary instances: condition fixing the assigned variables and keeping, elsewhere, the values used by solutions with b";
    CtxdepiFdyni => "ctxdepi-fdyni", Ctxdepi, Fdyni, "a common context is a full assignment set; an assignment set with a solution yields a context";
    FiCtxdepi => "fi-ctxdepi", Fi, Ctxdepi, "when a appears in some solution";
    FiFdyni => "fi-fdyni", Fi, Fdyni, "every consistent assignment set";
    CtxdepiGnsub => "ctxdepi-gnsub", Ctxdepi, Gnsub, "the common context supplies the shared supports";
    GnsubConni => "gnsub-conni", Gnsub, Conni, "on binary instances: condition fixing each neighbor to a value supporting both in all its constraints";
}

impl FromStr for Rule {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "pairwise" {
            return Ok(Rule::Pairwise);
        }
        Rule::NAMED
            .iter()
            .copied()
            .find(|r| r.id() == s)
            .ok_or_else(|| LatticeError::UnknownRule(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("rule `{rule}` does not belong to {from} -> {to}")]
    RuleMismatch { rule: String, from: Concept, to: Concept },
    #[error("{from} -> {to} has no citation")]
    MissingCitation { from: Concept, to: Concept },
    #[error("{a} and {b} are declared incomparable but {path}")]
    IncomparableReachable { a: Concept, b: Concept, path: String },
    #[error("cycle through {a} and {b} not covered by a declared equivalence")]
    Cycle { a: Concept, b: Concept },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: Concept,
    pub to: Concept,
    pub rule: Rule,
    pub citation: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equivalence {
    pub a: Concept,
    pub b: Concept,
    pub rule: Rule,
    pub citation: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incomparability {
    pub a: Concept,
    pub b: Concept,
    pub citation: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConceptInfo {
    pub concept: Concept,
    pub plane: Plane,
    pub sat_preserving: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxonomyLattice {
    pub concepts: Vec<ConceptInfo>,
    pub edges: Vec<Edge>,
    pub equivalences: Vec<Equivalence>,
    pub incomparabilities: Vec<Incomparability>,
}

const EDGES: &[(Concept, Concept, Rule, &str)] = {
    use Concept::*;
    &[
        (
            Ni,
            Ki,
            Rule::NiKi,
            "neighborhood interchangeability implies k-interchangeability",
        ),
        (
            Ki,
            Fi,
            Rule::KiFi,
            "k-interchangeability implies full interchangeability",
        ),
        (
            Fi,
            Pi,
            Rule::FiPi,
            "full interchangeability is partial interchangeability for any boundary",
        ),
        (Fi, Sub, Rule::FiSub, "full interchangeability implies substitutability"),
        (
            Ni,
            Nsub,
            Rule::NiNsub,
            "neighborhood interchangeability implies neighborhood substitutability",
        ),
        (
            Nsub,
            Sub,
            Rule::NsubSub,
            "neighborhood substitutability implies substitutability",
        ),
        (
            Npi,
            Spri,
            Rule::NpiSpri,
            "neighborhood partial interchangeability implies subproblem interchangeability",
        ),
        (
            Diri,
            Dirsub,
            Rule::DiriDirsub,
            "directional interchangeability implies directional substitutability",
        ),
        (
            Npi,
            Nic,
            Rule::NpiNic,
            "neighborhood partial interchangeability implies per-constraint interchangeability",
        ),
        (
            Nic,
            Nsubc,
            Rule::NicNsubc,
            "per-constraint interchangeability implies per-constraint substitutability",
        ),
        (
            Ni,
            Dynni,
            Rule::NiDynni,
            "neighborhood interchangeability survives any consistent assignment set",
        ),
        (
            Dynni,
            Fdyni,
            Rule::DynniFdyni,
            "dynamic neighborhood interchangeability implies full dynamic interchangeability",
        ),
        (
            Dynni,
            Forwni,
            Rule::DynniForwni,
            "dynamic neighborhood interchangeability implies forward neighborhood interchangeability",
        ),
        (
            Conni,
            Coni,
            Rule::ConniConi,
            "conditional neighborhood interchangeability implies conditional interchangeability",
        ),
        (
            Coni,
            Consub,
            Rule::ConiConsub,
            "conditional interchangeability implies conditional substitutability",
        ),
        (
            Conni,
            Connsub,
            Rule::ConniConnsub,
            "conditional neighborhood interchangeability implies conditional neighborhood substitutability",
        ),
        (
            Connsub,
            Consub,
            Rule::ConnsubConsub,
            "conditional neighborhood substitutability implies conditional substitutability",
        ),
        (
            Ni,
            Nti,
            Rule::NiNti,
            "neighborhood interchangeability is tuple interchangeability with a trivial boundary",
        ),
        (
            Nti,
            Pi,
            Rule::NtiPi,
            "neighborhood tuple interchangeability implies partial interchangeability",
        ),
        (
            Nti,
            Npi,
            Rule::NtiNpi,
            "neighborhood tuple interchangeability implies neighborhood partial interchangeability",
        ),
        (
            Nti,
            Forwni,
            Rule::NtiForwni,
            "matched tuples are forward neighborhood interchangeable",
        ),
        (
            Forwni,
            Tupsub,
            Rule::ForwniTupsub,
            "forward neighborhood interchangeability implies tuple substitutability",
        ),
        (
            Fdyni,
            Fdynsub,
            Rule::FdyniFdynsub,
            "full dynamic interchangeability implies full dynamic substitutability",
        ),
        (
            Sub,
            Fdynsub,
            Rule::SubFdynsub,
            "substitutability survives any consistent assignment set",
        ),
        (
            Fdynsub,
            Connsub,
            Rule::FdynsubConnsub,
            "full dynamic substitutability implies conditional neighborhood substitutability",
        ),
        (
            Fi,
            Ctxdepi,
            Rule::FiCtxdepi,
            "full interchangeability implies context-dependent interchangeability",
        ),
        (
            Fi,
            Fdyni,
            Rule::FiFdyni,
            "full interchangeability implies full dynamic interchangeability",
        ),
        (
            Ctxdepi,
            Gnsub,
            Rule::CtxdepiGnsub,
            "context-dependent interchangeability implies generalized neighborhood substitutability",
        ),
        (
            Gnsub,
            Conni,
            Rule::GnsubConni,
            "generalized neighborhood substitutability implies conditional neighborhood interchangeability",
        ),
    ]
};

const EQUIVALENCES: &[(Concept, Concept, Rule, &str)] = &[
    (
        Concept::Npi,
        Concept::Diri,
        Rule::NpiDiri,
        "neighborhood partial and directional interchangeability coincide",
    ),
    (
        Concept::Ctxdepi,
        Concept::Fdyni,
        Rule::CtxdepiFdyni,
        "context-dependent and full dynamic interchangeability coincide",
    ),
];

const INCOMPARABLE: &[(Concept, Concept, &str)] = &[
    (
        Concept::Spri,
        Concept::Pi,
        "subproblem and partial interchangeability are not comparable",
    ),
    (
        Concept::Npi,
        Concept::Pi,
        "neighborhood partial and partial interchangeability are not comparable",
    ),
    (
        Concept::Fi,
        Concept::Nsub,
        "full interchangeability and neighborhood substitutability are not comparable",
    ),
    (
        Concept::Coni,
        Concept::Connsub,
        "conditional interchangeability and conditional neighborhood substitutability are not comparable",
    ),
    (
        Concept::Tupsub,
        Concept::Fdynsub,
        "tuple substitutability and full dynamic substitutability are not comparable",
    ),
    (
        Concept::Nsub,
        Concept::Gnsub,
        "neighborhood substitutability and generalized neighborhood substitutability are not comparable",
    ),
];

/// The built-in taxonomy.
pub fn lattice() -> TaxonomyLattice {
    TaxonomyLattice {
        concepts: Concept::ALL
            .iter()
            .map(|&c| ConceptInfo {
                concept: c,
                plane: c.plane(),
                sat_preserving: c.sat_preserving(),
            })
            .collect(),
        edges: EDGES
            .iter()
            .map(|&(from, to, rule, citation)| Edge {
                from,
                to,
                rule,
                citation: citation.to_string(),
            })
            .collect(),
        equivalences: EQUIVALENCES
            .iter()
            .map(|&(a, b, rule, citation)| Equivalence {
                a,
                b,
                rule,
                citation: citation.to_string(),
            })
            .collect(),
        incomparabilities: INCOMPARABLE
            .iter()
            .map(|&(a, b, citation)| Incomparability {
                a,
                b,
                citation: citation.to_string(),
            })
            .collect(),
    }
}

impl TaxonomyLattice {
    fn successors(&self) -> BTreeMap<Concept, BTreeSet<Concept>> {
        let mut succ: BTreeMap<Concept, BTreeSet<Concept>> = BTreeMap::new();
        for e in &self.edges {
            succ.entry(e.from).or_default().insert(e.to);
        }
        for q in &self.equivalences {
            succ.entry(q.a).or_default().insert(q.b);
            succ.entry(q.b).or_default().insert(q.a);
        }
        succ
    }

    /// A shortest implication path from `a` to `b`, if any.
    pub fn path(&self, a: Concept, b: Concept) -> Option<Vec<Concept>> {
        let succ = self.successors();
        let mut prev: BTreeMap<Concept, Concept> = BTreeMap::new();
        let mut queue = std::collections::VecDeque::from([a]);
        let mut seen = BTreeSet::from([a]);
        while let Some(x) = queue.pop_front() {
            if x == b && x != a {
                break;
            }
            for &y in succ.get(&x).into_iter().flatten() {
                if y == b {
                    prev.insert(y, x);
                    let mut path = vec![b];
                    let mut at = x;
                    while at != a {
                        path.push(at);
                        at = prev[&at];
                    }
                    path.push(a);
                    path.reverse();
                    return Some(path);
                }
                if seen.insert(y) {
                    prev.insert(y, x);
                    queue.push_back(y);
                }
            }
        }
        None
    }

    pub fn implies(&self, a: Concept, b: Concept) -> bool {
        a == b || self.path(a, b).is_some()
    }

    /// Every pair (a, b), a != b, with a path from a to b.
    pub fn transitive_closure(&self) -> BTreeSet<(Concept, Concept)> {
        let mut out = BTreeSet::new();
        for &a in Concept::ALL {
            for &b in Concept::ALL {
                if a != b && self.implies(a, b) {
                    out.insert((a, b));
                }
            }
        }
        out
    }

    /// Structural checks: citations present, named rules on their own
    /// concept pair, no path between declared incomparable concepts, and no
    /// cycles other than declared equivalences.
    pub fn validate(&self) -> Result<(), LatticeError> {
        let records = self
            .edges
            .iter()
            .map(|e| (e.from, e.to, e.rule, &e.citation))
            .chain(self.equivalences.iter().map(|q| (q.a, q.b, q.rule, &q.citation)));
        for (from, to, rule, citation) in records {
            if citation.trim().is_empty() {
                return Err(LatticeError::MissingCitation { from, to });
            }
            if let Some(ends) = rule.endpoints() {
                if ends != (from, to) {
                    return Err(LatticeError::RuleMismatch {
                        rule: rule.id().to_string(),
                        from,
                        to,
                    });
                }
            }
        }
        for inc in &self.incomparabilities {
            for (x, y) in [(inc.a, inc.b), (inc.b, inc.a)] {
                if let Some(path) = self.path(x, y) {
                    let names: Vec<&str> = path.iter().map(|c| c.name()).collect();
                    return Err(LatticeError::IncomparableReachable {
                        a: inc.a,
                        b: inc.b,
                        path: names.join(" -> "),
                    });
                }
            }
        }
        let mut classes: BTreeMap<Concept, Concept> = Concept::ALL.iter().map(|&c| (c, c)).collect();
        for q in &self.equivalences {
            let (ra, rb) = (classes[&q.a], classes[&q.b]);
            for r in classes.values_mut() {
                if *r == rb {
                    *r = ra;
                }
            }
        }
        for (a, b) in self.transitive_closure() {
            if a < b && self.implies(b, a) && classes[&a] != classes[&b] {
                return Err(LatticeError::Cycle { a, b });
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for info in &self.concepts {
            let plane = match info.plane {
                Plane::Semantic => "semantic",
                Plane::Syntactic => "syntactic",
            };
            let flag = if info.sat_preserving {
                "preserving"
            } else {
                "non-preserving"
            };
            let _ = writeln!(out, "concept {} {plane} {flag}", info.concept);
        }
        for e in &self.edges {
            let _ = writeln!(out, "edge {} {} {} | {}", e.from, e.to, e.rule.id(), e.citation);
        }
        for q in &self.equivalences {
            let _ = writeln!(out, "equiv {} {} {} | {}", q.a, q.b, q.rule.id(), q.citation);
        }
        for i in &self.incomparabilities {
            let _ = writeln!(out, "incomparable {} {} | {}", i.a, i.b, i.citation);
        }
        out
    }

    /// Parses the format written by [`TaxonomyLattice::to_text`]. Lines
    /// starting with `#` are comments. Does not validate.
    pub fn from_text(text: &str) -> Result<Self, LatticeError> {
        let mut lat = TaxonomyLattice {
            concepts: Vec::new(),
            edges: Vec::new(),
            equivalences: Vec::new(),
            incomparabilities: Vec::new(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let perr = |message: String| LatticeError::Parse { line: line_no, message };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (head, citation) = match line.split_once('|') {
                Some((h, c)) => (h.trim(), c.trim().to_string()),
                None => (line, String::new()),
            };
            let tokens: Vec<&str> = head.split_whitespace().collect();
            let concept = |s: &str| s.parse::<Concept>().map_err(|e| perr(e.to_string()));
            let rule = |s: &str| s.parse::<Rule>().map_err(|e| perr(e.to_string()));
            match tokens.as_slice() {
                ["concept", name, plane, flag] => {
                    let plane = match *plane {
                        "semantic" => Plane::Semantic,
                        "syntactic" => Plane::Syntactic,
                        other => return Err(perr(format!("unknown plane `{other}`"))),
                    };
                    let sat_preserving = match *flag {
                        "preserving" => true,
                        "non-preserving" => false,
                        other => return Err(perr(format!("unknown flag `{other}`"))),
                    };
                    lat.concepts.push(ConceptInfo {
                        concept: concept(name)?,
                        plane,
                        sat_preserving,
                    });
                }
                ["edge", from, to, r] => lat.edges.push(Edge {
                    from: concept(from)?,
                    to: concept(to)?,
                    rule: rule(r)?,
                    citation,
                }),
                ["equiv", a, b, r] => lat.equivalences.push(Equivalence {
                    a: concept(a)?,
                    b: concept(b)?,
                    rule: rule(r)?,
                    citation,
                }),
                ["incomparable", a, b] => lat.incomparabilities.push(Incomparability {
                    a: concept(a)?,
                    b: concept(b)?,
                    citation,
                }),
                _ => return Err(perr(format!("cannot parse `{line}`"))),
            }
        }
        Ok(lat)
    }

    /// Graphviz rendering: semantic concepts as boxes, syntactic as ellipses,
    /// satisfiability-preserving concepts filled; equivalences double-headed,
    /// incomparabilities dotted.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph taxonomy {\n  rankdir = BT;\n");
        for (plane, name) in [(Plane::Semantic, "semantic"), (Plane::Syntactic, "syntactic")] {
            let _ = writeln!(out, "  subgraph cluster_{name} {{\n    label = \"{name}\";");
            for info in self.concepts.iter().filter(|i| i.plane == plane) {
                let shape = if plane == Plane::Semantic { "box" } else { "ellipse" };
                let style = if info.sat_preserving { ", style = filled" } else { "" };
                let _ = writeln!(out, "    {} [shape = {shape}{style}];", quote(info.concept.name()));
            }
            out.push_str("  }\n");
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  {} -> {} [label = {}];",
                quote(e.from.name()),
                quote(e.to.name()),
                quote(e.rule.id())
            );
        }
        for q in &self.equivalences {
            let _ = writeln!(
                out,
                "  {} -> {} [dir = both, style = bold];",
                quote(q.a.name()),
                quote(q.b.name())
            );
        }
        for i in &self.incomparabilities {
            let _ = writeln!(
                out,
                "  {} -> {} [dir = none, style = dotted, constraint = false];",
                quote(i.a.name()),
                quote(i.b.name())
            );
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_is_valid() {
        let lat = lattice();
        lat.validate().unwrap();
        assert_eq!(lat.concepts.len(), 24);
        assert_eq!(lat.edges.len(), 29);
        assert_eq!(lat.equivalences.len(), 2);
        assert_eq!(lat.incomparabilities.len(), 6);
    }

    #[test]
    fn closure_contains_compositions() {
        let lat = lattice();
        assert!(lat.implies(Concept::Ni, Concept::Fi));
        assert_eq!(lat.path(Concept::Ni, Concept::Fi).unwrap().len(), 3);
        assert!(lat.implies(Concept::Diri, Concept::Spri));
        assert!(lat.implies(Concept::Fdyni, Concept::Gnsub));
        assert!(!lat.implies(Concept::Fi, Concept::Nsub));
        assert!(!lat.implies(Concept::Nsub, Concept::Fi));
        assert!(!lat.implies(Concept::Spri, Concept::Pi));
        assert!(!lat.implies(Concept::Pi, Concept::Spri));
    }

    #[test]
    fn text_round_trip() {
        let lat = lattice();
        let back = TaxonomyLattice::from_text(&lat.to_text()).unwrap();
        assert_eq!(back, lat);
        assert_eq!(back.to_text(), lat.to_text());
    }

    #[test]
    fn bogus_edges_are_caught() {
        let mut lat = lattice();
        lat.edges.push(Edge {
            from: Concept::Fi,
            to: Concept::Nsub,
            rule: Rule::Pairwise,
            citation: "made up".into(),
        });
        assert!(matches!(
            lat.validate(),
            Err(LatticeError::IncomparableReachable { .. })
        ));

        let mut lat = lattice();
        lat.edges[0].rule = Rule::FiSub;
        assert!(matches!(lat.validate(), Err(LatticeError::RuleMismatch { .. })));

        let mut lat = lattice();
        lat.edges[0].citation.clear();
        assert!(matches!(lat.validate(), Err(LatticeError::MissingCitation { .. })));

        let mut lat = lattice();
        lat.edges.push(Edge {
            from: Concept::Fi,
            to: Concept::Ki,
            rule: Rule::Pairwise,
            citation: "made up".into(),
        });
        assert!(matches!(lat.validate(), Err(LatticeError::Cycle { .. })));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            TaxonomyLattice::from_text("edge FI XX pairwise | x"),
            Err(LatticeError::Parse { line: 1, .. })
        ));
        assert!(TaxonomyLattice::from_text("# c\n\nedge FI Sub nope | x").is_err());
    }

    #[test]
    fn dot_has_every_concept() {
        let dot = lattice().to_dot();
        for c in Concept::ALL {
            assert!(dot.contains(&format!("\"{}\" [shape", c.name())));
        }
    }
}
