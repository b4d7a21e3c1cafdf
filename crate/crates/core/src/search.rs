//! Backtracking with forward checking, and the bundled variant that branches
//! on blocks of statically computed per-constraint interchangeability classes.

use std::fmt;

use crate::csp::{CspError, CspInstance, ValId, VarId};
use crate::detect::{nic_classes, Partition};
use crate::oracle::SolutionSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValueOrder {
    #[default]
    Ascending,
    Descending,
}

#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    /// Static variable order; declaration order when absent.
    pub var_order: Option<Vec<VarId>>,
    pub val_order: ValueOrder,
    /// Stop after this many solutions (plain) or bundles (bundled).
    pub limit: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Branching choices made (one per value or block tried).
    pub nodes: u64,
    /// Constraint checks made by forward checking.
    pub checks: u64,
    pub bundles: u64,
    /// Solutions represented by the emitted bundles (or solutions found).
    pub solutions: u64,
}

impl fmt::Display for SearchStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "nodes={} checks={} bundles={} solutions={}",
            self.nodes, self.checks, self.bundles, self.solutions
        )
    }
}

/// A Cartesian product of per-variable value sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionBundle {
    pub values: Vec<Vec<ValId>>,
}

impl SolutionBundle {
    pub fn size(&self) -> u64 {
        self.values.iter().map(|v| v.len() as u64).product()
    }

    /// Every solution in the bundle, in lexicographic order.
    pub fn expand(&self) -> Vec<Vec<ValId>> {
        let mut out = vec![Vec::with_capacity(self.values.len())];
        for vals in &self.values {
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

    pub fn display(&self, csp: &CspInstance) -> String {
        let parts: Vec<String> = self
            .values
            .iter()
            .enumerate()
            .map(|(x, vals)| {
                let names: Vec<&str> = vals.iter().map(|&a| csp.value_name(x, a)).collect();
                format!("{}={{{}}}", csp.var_name(x), names.join(","))
            })
            .collect();
        parts.join(" ")
    }
}

fn resolve_order(csp: &CspInstance, order: &Option<Vec<VarId>>) -> Result<Vec<VarId>, CspError> {
    let n = csp.num_vars();
    let Some(order) = order else {
        return Ok((0..n).collect());
    };
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(CspError::InvalidOrdering(format!(
            "expected {n} variables, got {}",
            order.len()
        )));
    }
    for &x in order {
        if x >= n || seen[x] {
            return Err(CspError::InvalidOrdering(format!(
                "variable #{x} is unknown or repeated"
            )));
        }
        seen[x] = true;
    }
    Ok(order.clone())
}

struct Engine<'a> {
    csp: &'a CspInstance,
    order: Vec<VarId>,
    /// Position of each variable in the order.
    rank: Vec<usize>,
    stats: SearchStats,
}

impl Engine<'_> {
    fn new<'a>(csp: &'a CspInstance, order: Vec<VarId>) -> Engine<'a> {
        let mut rank = vec![0; csp.num_vars()];
        for (i, &x) in order.iter().enumerate() {
            rank[x] = i;
        }
        Engine {
            csp,
            order,
            rank,
            stats: SearchStats::default(),
        }
    }

    /// Prunes the domains of variables left as the only unassigned one in a
    /// constraint on `x`, given representative values for assigned variables.
    /// Returns false on a wipe-out.
    fn forward_check(&mut self, depth: usize, x: VarId, values: &[ValId], domains: &mut [Vec<bool>]) -> bool {
        let assigned = |y: VarId| self.rank[y] <= depth;
        for c in self.csp.constraints_on(x) {
            let con = self.csp.constraint(c);
            let mut free = con.scope().iter().filter(|&&y| !assigned(y));
            let (Some(&y), None) = (free.next(), free.next()) else {
                continue;
            };
            let pos = con.position(y).expect("in scope");
            let mut tuple: Vec<ValId> = con.scope().iter().map(|&z| values[z]).collect();
            for b in 0..domains[y].len() {
                if !domains[y][b] {
                    continue;
                }
                tuple[pos] = b;
                self.stats.checks += 1;
                if !con.allows(&tuple) {
                    domains[y][b] = false;
                }
            }
            if !domains[y].iter().any(|&f| f) {
                return false;
            }
        }
        true
    }
}

/// Chronological backtracking with forward checking.
pub fn solve_plain(csp: &CspInstance, opts: &SearchOptions) -> Result<(SolutionSet, SearchStats), CspError> {
    let order = resolve_order(csp, &opts.var_order)?;
    let mut engine = Engine::new(csp, order);
    let mut out = Vec::new();
    let domains = csp.effective_domains();
    let mut values = vec![0; csp.num_vars()];
    let complete = if csp.num_vars() == 0 {
        out.push(Vec::new());
        true
    } else {
        plain_rec(&mut engine, opts, 0, domains, &mut values, &mut out)
    };
    engine.stats.solutions = out.len() as u64;
    Ok((SolutionSet::from_solutions(out, complete), engine.stats))
}

fn ordered_values(dom: &[bool], order: ValueOrder) -> Vec<ValId> {
    let mut vals: Vec<ValId> = (0..dom.len()).filter(|&a| dom[a]).collect();
    if order == ValueOrder::Descending {
        vals.reverse();
    }
    vals
}

fn plain_rec(
    engine: &mut Engine,
    opts: &SearchOptions,
    depth: usize,
    domains: Vec<Vec<bool>>,
    values: &mut Vec<ValId>,
    out: &mut Vec<Vec<ValId>>,
) -> bool {
    let x = engine.order[depth];
    for a in ordered_values(&domains[x], opts.val_order) {
        if opts.limit.is_some_and(|l| out.len() >= l) {
            return false;
        }
        engine.stats.nodes += 1;
        values[x] = a;
        let mut next = domains.clone();
        next[x] = (0..next[x].len()).map(|b| b == a).collect();
        if !engine.forward_check(depth, x, values, &mut next) {
            continue;
        }
        if depth + 1 == engine.order.len() {
            out.push(values.clone());
        } else if !plain_rec(engine, opts, depth + 1, next, values, out) {
            return false;
        }
    }
    true
}

/// Per (variable, constraint) interchangeability classes used for bundling.
struct StaticClasses {
    by_var: Vec<Vec<(usize, Partition)>>,
}

impl StaticClasses {
    fn new(csp: &CspInstance) -> Self {
        let by_var = (0..csp.num_vars())
            .map(|x| {
                csp.constraints_on(x)
                    .filter(|&c| csp.constraint(c).arity() > 1)
                    .map(|c| (c, nic_classes(csp, x, c).expect("constraint on x")))
                    .collect()
            })
            .collect();
        StaticClasses { by_var }
    }
}

/// Backtracking that assigns whole blocks of values at once. At each variable
/// the current domain is split by the classes of the constraints that still
/// reach an unassigned variable; forward checking uses the first value of the
/// block as representative.
pub fn solve_bundled(csp: &CspInstance, opts: &SearchOptions) -> Result<(Vec<SolutionBundle>, SearchStats), CspError> {
    let order = resolve_order(csp, &opts.var_order)?;
    let classes = StaticClasses::new(csp);
    let mut engine = Engine::new(csp, order);
    let mut out = Vec::new();
    if csp.num_vars() == 0 {
        out.push(SolutionBundle { values: Vec::new() });
    } else {
        let domains = csp.effective_domains();
        let mut values = vec![0; csp.num_vars()];
        let mut blocks = vec![Vec::new(); csp.num_vars()];
        bundled_rec(
            &mut engine,
            &classes,
            opts,
            0,
            domains,
            &mut values,
            &mut blocks,
            &mut out,
        );
    }
    engine.stats.bundles = out.len() as u64;
    engine.stats.solutions = out.iter().map(SolutionBundle::size).sum();
    Ok((out, engine.stats))
}

#[allow(clippy::too_many_arguments)]
fn bundled_rec(
    engine: &mut Engine,
    classes: &StaticClasses,
    opts: &SearchOptions,
    depth: usize,
    domains: Vec<Vec<bool>>,
    values: &mut Vec<ValId>,
    blocks: &mut Vec<Vec<ValId>>,
    out: &mut Vec<SolutionBundle>,
) -> bool {
    let x = engine.order[depth];
    let csp = engine.csp;
    let current: Vec<ValId> = ordered_values(&domains[x], opts.val_order);
    let mut split = Partition::new(x, vec![(0..csp.domain_size(x)).collect()]);
    for (c, p) in &classes.by_var[x] {
        let future = csp.constraint(*c).scope().iter().any(|&y| engine.rank[y] > depth);
        if future {
            split = split.refine(p);
        }
    }
    let mut branches: Vec<Vec<ValId>> = Vec::new();
    for &a in &current {
        let i = split.block_of(a).expect("partition covers the domain");
        match branches.iter_mut().find(|b| split.block_of(b[0]) == Some(i)) {
            Some(b) => b.push(a),
            None => branches.push(vec![a]),
        }
    }
    for block in branches {
        if opts.limit.is_some_and(|l| out.len() >= l) {
            return false;
        }
        engine.stats.nodes += 1;
        let rep = block[0];
        values[x] = rep;
        let mut next = domains.clone();
        next[x] = (0..next[x].len()).map(|b| block.contains(&b)).collect();
        if !engine.forward_check(depth, x, values, &mut next) {
            continue;
        }
        let mut sorted = block.clone();
        sorted.sort_unstable();
        blocks[x] = sorted;
        if depth + 1 == engine.order.len() {
            out.push(SolutionBundle { values: blocks.clone() });
        } else if !bundled_rec(engine, classes, opts, depth + 1, next, values, blocks, out) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_solutions;
    use std::collections::BTreeSet;

    fn sorted(s: &SolutionSet) -> BTreeSet<Vec<ValId>> {
        s.iter().cloned().collect()
    }

    #[test]
    fn unsat_has_no_solutions() {
        let csp = CspInstance::builder()
            .var("X", &["a"])
            .var("Y", &["a"])
            .allow(&["X", "Y"], &[])
            .build()
            .unwrap();
        let (sols, stats) = solve_plain(&csp, &SearchOptions::default()).unwrap();
        assert!(sols.is_empty());
        assert_eq!(stats.nodes, 1);
        let (bundles, _) = solve_bundled(&csp, &SearchOptions::default()).unwrap();
        assert!(bundles.is_empty());
    }

    #[test]
    fn universal_counts() {
        let csp = CspInstance::builder()
            .var("X", &["a", "b", "c"])
            .var("Y", &["a", "b", "c"])
            .var("Z", &["a", "b", "c"])
            .forbid(&["X", "Y"], &[])
            .build()
            .unwrap();
        let (sols, _) = solve_plain(&csp, &SearchOptions::default()).unwrap();
        assert_eq!(sols.len(), 27);
        let (bundles, stats) = solve_bundled(&csp, &SearchOptions::default()).unwrap();
        assert_eq!(bundles.len(), 1);
        assert_eq!(stats.solutions, 27);
    }

    #[test]
    fn limit_and_orders() {
        let csp = CspInstance::builder()
            .var("X", &["a", "b"])
            .var("Y", &["a", "b"])
            .allow(&["X", "Y"], &[&["a", "b"], &["b", "a"]])
            .build()
            .unwrap();
        let opts = SearchOptions {
            limit: Some(1),
            ..Default::default()
        };
        let (sols, _) = solve_plain(&csp, &opts).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(!sols.is_complete());
        let opts = SearchOptions {
            var_order: Some(vec![1, 0]),
            val_order: ValueOrder::Descending,
            limit: None,
        };
        let (sols, _) = solve_plain(&csp, &opts).unwrap();
        assert_eq!(sols.solutions()[0], vec![0, 1]);
        assert_eq!(sorted(&sols), sorted(&enumerate_solutions(&csp, None)));
        let bad = SearchOptions {
            var_order: Some(vec![0, 0]),
            ..Default::default()
        };
        assert!(solve_plain(&csp, &bad).is_err());
    }

    #[test]
    fn bundles_cover_exactly() {
        // X's a and b are interchangeable everywhere
        let csp = CspInstance::builder()
            .var("X", &["a", "b", "c"])
            .var("Y", &["p", "q"])
            .var("Z", &["r", "s"])
            .allow(&["X", "Y"], &[&["a", "p"], &["b", "p"], &["c", "q"]])
            .allow(&["Y", "Z"], &[&["p", "r"], &["q", "r"], &["q", "s"]])
            .build()
            .unwrap();
        let (bundles, bstats) = solve_bundled(&csp, &SearchOptions::default()).unwrap();
        let (plain, pstats) = solve_plain(&csp, &SearchOptions::default()).unwrap();
        let mut covered = Vec::new();
        for b in &bundles {
            covered.extend(b.expand());
        }
        let unique: BTreeSet<_> = covered.iter().cloned().collect();
        assert_eq!(unique.len(), covered.len());
        assert_eq!(unique, sorted(&plain));
        assert!(bstats.nodes <= pstats.nodes);
        assert_eq!(bundles[0].values[0], vec![0, 1]);
    }
}
