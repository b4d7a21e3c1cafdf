#![allow(dead_code)]

use std::collections::BTreeSet;

use interchange::io::{generate, RandomModel};
use interchange::{Constraint, CspInstance, Polarity, Variable};
use proptest::prelude::*;

/// Random binary instances from the seeded generator.
pub fn binary_csp(max_n: usize, max_d: usize) -> impl Strategy<Value = CspInstance> {
    (2..=max_n.max(2), 1..=max_d, 0.0..=1.0f64, 0.0..=1.0f64, any::<u64>()).prop_map(
        |(n, d, density, tightness, seed)| generate(&RandomModel::new(n, d, density, tightness, seed)).unwrap(),
    )
}

/// Instances with mixed arities (1 to 3), both polarities, uneven domains and
/// repeated scopes.
pub fn mixed_csp(max_n: usize, max_d: usize) -> impl Strategy<Value = CspInstance> {
    (1..=max_n)
        .prop_flat_map(move |n| (Just(n), proptest::collection::vec(1..=max_d, n)))
        .prop_flat_map(|(n, sizes)| {
            let con = (
                proptest::collection::vec(0..n, 1..=3.min(n)),
                any::<bool>(),
                any::<u64>(),
            );
            (Just(sizes), proptest::collection::vec(con, 0..=4))
        })
        .prop_map(|(sizes, cons)| {
            let variables: Vec<Variable> = sizes
                .iter()
                .enumerate()
                .map(|(i, &d)| {
                    Variable::new(
                        format!("v{i}"),
                        (0..d).map(|a| format!("{}", (b'a' + a as u8) as char)).collect(),
                    )
                })
                .collect();
            let constraints = cons
                .into_iter()
                .map(|(scope, allow, bits)| {
                    let scope: Vec<usize> = scope.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
                    let tuples = all_tuples(&scope.iter().map(|&x| sizes[x]).collect::<Vec<_>>());
                    let picked: BTreeSet<Vec<usize>> = tuples
                        .into_iter()
                        .enumerate()
                        .filter(|(i, _)| bits >> (i % 64) & 1 == 1)
                        .map(|(_, t)| t)
                        .collect();
                    let polarity = if allow { Polarity::Allow } else { Polarity::Forbid };
                    Constraint::new(scope, polarity, picked)
                })
                .collect();
            CspInstance::new(variables, constraints).unwrap()
        })
}

pub fn all_tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &d in sizes {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..d).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// Every subset of `0..n` containing `v`.
pub fn subsets_with(n: usize, v: usize) -> Vec<BTreeSet<usize>> {
    (0u32..1 << n)
        .filter(|m| m >> v & 1 == 1)
        .map(|m| (0..n).filter(|&x| m >> x & 1 == 1).collect())
        .collect()
}
