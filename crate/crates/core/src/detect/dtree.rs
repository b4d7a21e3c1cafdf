use std::collections::BTreeMap;

use super::{supports, Partition};
use crate::csp::{CspInstance, ValId, VarId};

/// One support of a value: the other scope variables with their values
/// (sorted by variable) and the constraint it comes from. The derived order
/// is the canonical (variable, value, constraint) order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Annotation {
    pub pairs: Vec<(VarId, ValId)>,
    pub constraint: usize,
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub annotation: Option<Annotation>,
    pub children: Vec<usize>,
    /// Values whose annotation path ends here.
    pub values: Vec<ValId>,
}

/// Trie of sorted support annotations; values ending at the same node have
/// identical supports over the processed constraints.
#[derive(Debug, Clone)]
pub struct DiscriminationTree {
    var: VarId,
    nodes: Vec<TreeNode>,
    probes: u64,
    steps: u64,
}

impl DiscriminationTree {
    pub fn build(csp: &CspInstance, v: VarId, constraints: &[usize]) -> Self {
        let live = csp.effective_domains();
        let mut probes = 0;
        let mut constraints = constraints.to_vec();
        constraints.sort_unstable();
        constraints.dedup();
        let d = csp.domain_size(v);
        let mut per_value: Vec<Vec<Annotation>> = vec![Vec::new(); d];
        for &c in &constraints {
            let con = csp.constraint(c);
            let others: Vec<VarId> = con.scope().iter().copied().filter(|&x| x != v).collect();
            for (a, set) in supports(csp, &live, v, c, &mut probes).into_iter().enumerate() {
                for w in set {
                    let mut pairs: Vec<(VarId, ValId)> = others.iter().copied().zip(w).collect();
                    pairs.sort_unstable();
                    per_value[a].push(Annotation { pairs, constraint: c });
                }
            }
        }
        let mut nodes = vec![TreeNode {
            annotation: None,
            children: Vec::new(),
            values: Vec::new(),
        }];
        let mut edges: BTreeMap<(usize, Annotation), usize> = BTreeMap::new();
        let mut steps = 0;
        for (a, mut path) in per_value.into_iter().enumerate() {
            path.sort();
            let mut at = 0;
            for ann in path {
                steps += 1;
                at = match edges.get(&(at, ann.clone())) {
                    Some(&next) => next,
                    None => {
                        let next = nodes.len();
                        nodes.push(TreeNode {
                            annotation: Some(ann.clone()),
                            children: Vec::new(),
                            values: Vec::new(),
                        });
                        nodes[at].children.push(next);
                        edges.insert((at, ann), next);
                        next
                    }
                };
            }
            nodes[at].values.push(a);
        }
        DiscriminationTree {
            var: v,
            nodes,
            probes,
            steps,
        }
    }

    pub fn var(&self) -> VarId {
        self.var
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Constraint checks made while collecting supports.
    pub fn probes(&self) -> u64 {
        self.probes
    }

    /// Annotations walked while inserting paths.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn partition(&self) -> Partition {
        Partition::new(
            self.var,
            self.nodes
                .iter()
                .filter(|n| !n.values.is_empty())
                .map(|n| n.values.clone())
                .collect(),
        )
    }
}
