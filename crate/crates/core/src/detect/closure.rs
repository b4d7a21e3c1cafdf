use std::collections::{BTreeMap, BTreeSet};

use super::tuples_over;
use crate::csp::{Assignment, CspInstance, ValId, VarId};

/// A neighborhood support of `a` that does not support `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitter {
    pub constraint: usize,
    pub support: Assignment,
}

/// Final splitter of every ordered pair of surviving values, keyed by
/// (variable, a, b) in original value indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitterTable {
    entries: BTreeMap<(VarId, ValId, ValId), Option<Splitter>>,
}

impl SplitterTable {
    pub fn get(&self, var: VarId, a: ValId, b: ValId) -> Option<&Splitter> {
        self.entries.get(&(var, a, b)).and_then(|s| s.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(VarId, ValId, ValId), &Option<Splitter>)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Removal {
    pub var: VarId,
    pub value: ValId,
    /// The value that made this one redundant; `None` for values excluded by
    /// a unary constraint.
    pub dominated_by: Option<ValId>,
}

#[derive(Debug, Clone)]
pub struct NsClosure {
    /// The instance over the surviving values (renumbered densely).
    pub reduced: CspInstance,
    /// Surviving values in original indices.
    pub kept: Vec<Vec<bool>>,
    pub splitters: SplitterTable,
    pub removals: Vec<Removal>,
    pub probes: u64,
}

struct Candidate {
    constraint: usize,
    others: Vec<VarId>,
    values: Vec<ValId>,
}

#[derive(Clone, Copy, Default)]
struct PairState {
    next: usize,
    found: Option<usize>,
    exhausted: bool,
}

struct Closure<'a> {
    csp: &'a CspInstance,
    live: Vec<Vec<bool>>,
    candidates: Vec<Vec<Candidate>>,
    state: Vec<Vec<Vec<PairState>>>,
    probes: u64,
}

impl Closure<'_> {
    fn candidate_live(&self, x: VarId, i: usize) -> bool {
        let cand = &self.candidates[x][i];
        cand.others.iter().zip(&cand.values).all(|(&y, &val)| self.live[y][val])
    }

    fn supports(&self, x: VarId, i: usize, a: ValId) -> bool {
        let cand = &self.candidates[x][i];
        let con = self.csp.constraint(cand.constraint);
        let mut it = cand.values.iter();
        let tuple: Vec<ValId> = con
            .scope()
            .iter()
            .map(|&y| if y == x { a } else { *it.next().expect("arity") })
            .collect();
        con.allows(&tuple)
    }

    /// Whether (a, b) still has a splitter, resuming the forward-only search
    /// when the recorded one has lost a value.
    fn ensure(&mut self, x: VarId, a: ValId, b: ValId) -> bool {
        let st = self.state[x][a][b];
        if st.exhausted {
            return false;
        }
        let start = match st.found {
            Some(i) if self.candidate_live(x, i) => return true,
            Some(i) => i + 1,
            None => st.next,
        };
        for i in start..self.candidates[x].len() {
            self.probes += 1;
            if self.candidate_live(x, i) && self.supports(x, i, a) && !self.supports(x, i, b) {
                self.state[x][a][b] = PairState {
                    next: i + 1,
                    found: Some(i),
                    exhausted: false,
                };
                return true;
            }
        }
        self.state[x][a][b] = PairState {
            next: self.candidates[x].len(),
            found: None,
            exhausted: true,
        };
        false
    }
}

/// Removes neighborhood substitutable values until none remain. When
/// `a` has no splitter against `b`, `a` is dominated and goes; when neither
/// has one against the other, the later value goes.
pub fn ns_closure(csp: &CspInstance) -> NsClosure {
    let n = csp.num_vars();
    let live = csp.effective_domains();
    let mut removals = Vec::new();
    for (x, dom) in live.iter().enumerate() {
        for (a, &alive) in dom.iter().enumerate() {
            if !alive {
                removals.push(Removal {
                    var: x,
                    value: a,
                    dominated_by: None,
                });
            }
        }
    }
    let candidates: Vec<Vec<Candidate>> = (0..n)
        .map(|x| {
            let mut list = Vec::new();
            for c in csp.constraints_on(x) {
                let others: Vec<VarId> = csp.constraint(c).scope().iter().copied().filter(|&y| y != x).collect();
                for values in tuples_over(csp, &live, &others) {
                    list.push(Candidate {
                        constraint: c,
                        others: others.clone(),
                        values,
                    });
                }
            }
            list
        })
        .collect();
    let state = (0..n)
        .map(|x| vec![vec![PairState::default(); csp.domain_size(x)]; csp.domain_size(x)])
        .collect();
    let mut cl = Closure {
        csp,
        live,
        candidates,
        state,
        probes: 0,
    };

    let mut dirty: BTreeSet<VarId> = (0..n).collect();
    while let Some(x) = dirty.pop_first() {
        loop {
            let vals: Vec<ValId> = (0..csp.domain_size(x)).filter(|&a| cl.live[x][a]).collect();
            let mut removal = None;
            'find: for &a in &vals {
                for &b in &vals {
                    if a != b && !cl.ensure(x, a, b) {
                        let mutual = !cl.ensure(x, b, a);
                        removal = Some(if mutual && b < a {
                            (a, b)
                        } else if mutual {
                            (b, a)
                        } else {
                            (a, b)
                        });
                        break 'find;
                    }
                }
            }
            let Some((gone, keeper)) = removal else { break };
            cl.live[x][gone] = false;
            removals.push(Removal {
                var: x,
                value: gone,
                dominated_by: Some(keeper),
            });
            dirty.extend(csp.neighbors(x));
        }
    }

    let mut splitters = SplitterTable::default();
    for x in 0..n {
        for a in 0..csp.domain_size(x) {
            for b in 0..csp.domain_size(x) {
                if a == b || !cl.live[x][a] || !cl.live[x][b] {
                    continue;
                }
                let entry = cl.state[x][a][b].found.map(|i| {
                    let cand = &cl.candidates[x][i];
                    Splitter {
                        constraint: cand.constraint,
                        support: cand.others.iter().copied().zip(cand.values.iter().copied()).collect(),
                    }
                });
                splitters.entries.insert((x, a, b), entry);
            }
        }
    }
    NsClosure {
        reduced: csp.restrict_domains(&cl.live),
        kept: cl.live,
        splitters,
        removals,
        probes: cl.probes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::nsub_pairs;

    #[test]
    fn unconstrained_variable_collapses() {
        let csp = CspInstance::builder().var("X", &["a", "b", "c", "d"]).build().unwrap();
        let out = ns_closure(&csp);
        assert_eq!(out.reduced.domain_size(0), 1);
        assert_eq!(out.reduced.value_name(0, 0), "a");
        assert_eq!(out.removals.len(), 3);
    }

    #[test]
    fn all_split_is_unchanged() {
        // X and Y must differ and each value has a private support
        let csp = CspInstance::builder()
            .var("X", &["0", "1"])
            .var("Y", &["0", "1"])
            .allow(&["X", "Y"], &[&["0", "1"], &["1", "0"]])
            .build()
            .unwrap();
        let out = ns_closure(&csp);
        assert!(out.removals.is_empty());
        assert_eq!(out.splitters.len(), 4);
        let s = out.splitters.get(0, 0, 1).unwrap();
        assert_eq!(s.support, Assignment::new().with(1, 1));
    }

    #[test]
    fn dominated_value_goes_first() {
        // b's supports strictly contain a's: a is removed, b kept
        let csp = CspInstance::builder()
            .var("X", &["a", "b"])
            .var("Y", &["p", "q"])
            .allow(&["X", "Y"], &[&["a", "p"], &["b", "p"], &["b", "q"]])
            .build()
            .unwrap();
        let out = ns_closure(&csp);
        assert_eq!(
            out.removals[0],
            Removal {
                var: 0,
                value: 0,
                dominated_by: Some(1)
            }
        );
        for x in 0..out.reduced.num_vars() {
            assert!(nsub_pairs(&out.reduced, x).iter().all(|(a, b)| a == b));
        }
    }

    #[test]
    fn unary_exclusions_are_logged() {
        let csp = CspInstance::builder()
            .var("X", &["a", "b"])
            .var("Y", &["p", "q"])
            .allow(&["X"], &[&["b"]])
            .allow(&["X", "Y"], &[&["a", "p"], &["b", "q"]])
            .build()
            .unwrap();
        let out = ns_closure(&csp);
        assert_eq!(out.removals[0].dominated_by, None);
        assert_eq!(out.reduced.domain_size(0), 1);
    }
}
