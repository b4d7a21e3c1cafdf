//! The CSP data model: variables with finite symbolic domains and extensional
//! constraints given either as allow-lists or forbid-lists.
//!
//! Variables and values are addressed by index everywhere inside the crate.
//! Value `a` of variable `v` is `ValId` `a`, the position of the symbol in the
//! variable's declared domain. Names only matter at the I/O boundary.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub type VarId = usize;
pub type ValId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CspError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("value `{value}` is not in the domain of `{var}`")]
    ValueOutOfDomain { var: String, value: String },
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("duplicate value `{value}` in the domain of `{var}`")]
    DuplicateValue { var: String, value: String },
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("constraint {index}: {message}")]
    InvalidConstraint { index: usize, message: String },
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),
    #[error("assignment is inconsistent")]
    InconsistentAssignment,
    #[error("invalid variable subset: {0}")]
    InvalidSubset(String),
    #[error("constraint {index} has arity {arity}; only unary and binary constraints are supported")]
    ArityUnsupported { index: usize, arity: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    name: String,
    values: Vec<String>,
}

impl Variable {
    pub fn new<S: Into<String>>(name: S, values: Vec<String>) -> Self {
        Variable {
            name: name.into(),
            values,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn domain_size(&self) -> usize {
        self.values.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Allow,
    Forbid,
}

impl Polarity {
    pub fn keyword(self) -> &'static str {
        match self {
            Polarity::Allow => "allow",
            Polarity::Forbid => "forbid",
        }
    }
}

/// An extensional constraint. The listed tuples are value indices aligned
/// positionally with `scope`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    scope: Vec<VarId>,
    polarity: Polarity,
    tuples: BTreeSet<Vec<ValId>>,
}

impl Constraint {
    pub fn new(scope: Vec<VarId>, polarity: Polarity, tuples: BTreeSet<Vec<ValId>>) -> Self {
        Constraint {
            scope,
            polarity,
            tuples,
        }
    }

    pub fn allow<I: IntoIterator<Item = Vec<ValId>>>(scope: Vec<VarId>, tuples: I) -> Self {
        Self::new(scope, Polarity::Allow, tuples.into_iter().collect())
    }

    pub fn forbid<I: IntoIterator<Item = Vec<ValId>>>(scope: Vec<VarId>, tuples: I) -> Self {
        Self::new(scope, Polarity::Forbid, tuples.into_iter().collect())
    }

    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn tuples(&self) -> &BTreeSet<Vec<ValId>> {
        &self.tuples
    }

    pub fn arity(&self) -> usize {
        self.scope.len()
    }

    pub fn involves(&self, var: VarId) -> bool {
        self.scope.contains(&var)
    }

    pub fn position(&self, var: VarId) -> Option<usize> {
        self.scope.iter().position(|&x| x == var)
    }

    /// Whether the tuple (aligned with the scope) satisfies the constraint.
    pub fn allows(&self, tuple: &[ValId]) -> bool {
        self.tuples.contains(tuple) == (self.polarity == Polarity::Allow)
    }

    /// Whether the constraint is satisfied by a full assignment vector.
    pub fn allows_full(&self, values: &[ValId]) -> bool {
        let tuple: Vec<ValId> = self.scope.iter().map(|&v| values[v]).collect();
        self.allows(&tuple)
    }
}

/// A set of variable bindings.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(BTreeMap<VarId, ValId>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn bind(&mut self, var: VarId, value: ValId) -> Option<ValId> {
        self.0.insert(var, value)
    }

    pub fn with(mut self, var: VarId, value: ValId) -> Self {
        self.0.insert(var, value);
        self
    }

    pub fn unbind(&mut self, var: VarId) -> Option<ValId> {
        self.0.remove(&var)
    }

    pub fn get(&self, var: VarId) -> Option<ValId> {
        self.0.get(&var).copied()
    }

    pub fn binds(&self, var: VarId) -> bool {
        self.0.contains_key(&var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, ValId)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.keys().copied()
    }

    /// Whether a full value vector agrees with every binding.
    pub fn agrees_with(&self, values: &[ValId]) -> bool {
        self.0.iter().all(|(&k, &v)| values[k] == v)
    }

    pub fn from_full(values: &[ValId]) -> Self {
        values.iter().copied().enumerate().collect()
    }

    pub fn display<'a>(&'a self, csp: &'a CspInstance) -> AssignmentDisplay<'a> {
        AssignmentDisplay { asg: self, csp }
    }
}

impl FromIterator<(VarId, ValId)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (VarId, ValId)>>(iter: T) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

pub struct AssignmentDisplay<'a> {
    asg: &'a Assignment,
    csp: &'a CspInstance,
}

impl fmt::Display for AssignmentDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (var, val)) in self.asg.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}={}", self.csp.var_name(var), self.csp.value_name(var, val))?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CspInstance {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    by_name: HashMap<String, VarId>,
}

impl CspInstance {
    /// Builds a validated instance. Domains must be non-empty.
    pub fn new(variables: Vec<Variable>, constraints: Vec<Constraint>) -> Result<Self, CspError> {
        Self::build(variables, constraints, false)
    }

    fn build(variables: Vec<Variable>, constraints: Vec<Constraint>, allow_empty: bool) -> Result<Self, CspError> {
        let mut by_name = HashMap::with_capacity(variables.len());
        for (i, var) in variables.iter().enumerate() {
            if by_name.insert(var.name.clone(), i).is_some() {
                return Err(CspError::DuplicateVariable(var.name.clone()));
            }
            if var.values.is_empty() && !allow_empty {
                return Err(CspError::EmptyDomain(var.name.clone()));
            }
            let mut seen = BTreeSet::new();
            for value in &var.values {
                if !seen.insert(value) {
                    return Err(CspError::DuplicateValue {
                        var: var.name.clone(),
                        value: value.clone(),
                    });
                }
            }
        }
        for (index, c) in constraints.iter().enumerate() {
            validate_constraint(&variables, index, c)?;
        }
        Ok(CspInstance {
            variables,
            constraints,
            by_name,
        })
    }

    pub fn builder() -> CspBuilder {
        CspBuilder::default()
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, var: VarId) -> &Variable {
        &self.variables[var]
    }

    pub fn var_name(&self, var: VarId) -> &str {
        &self.variables[var].name
    }

    pub fn value_name(&self, var: VarId, value: ValId) -> &str {
        &self.variables[var].values[value]
    }

    pub fn domain_size(&self, var: VarId) -> usize {
        self.variables[var].values.len()
    }

    pub fn max_domain_size(&self) -> usize {
        self.variables.iter().map(Variable::domain_size).max().unwrap_or(0)
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint(&self, index: usize) -> &Constraint {
        &self.constraints[index]
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn max_arity(&self) -> usize {
        self.constraints.iter().map(Constraint::arity).max().unwrap_or(0)
    }

    pub fn is_binary(&self) -> bool {
        self.max_arity() <= 2
    }

    /// Indices of the constraints whose scope contains `var`, in declaration order.
    pub fn constraints_on(&self, var: VarId) -> impl Iterator<Item = usize> + '_ {
        self.constraints
            .iter()
            .enumerate()
            .filter(move |(_, c)| c.involves(var))
            .map(|(i, _)| i)
    }

    /// Variables sharing at least one constraint with `var`.
    pub fn neighbors(&self, var: VarId) -> BTreeSet<VarId> {
        self.constraints
            .iter()
            .filter(|c| c.involves(var))
            .flat_map(|c| c.scope().iter().copied())
            .filter(|&x| x != var)
            .collect()
    }

    pub fn degree(&self, var: VarId) -> usize {
        self.neighbors(var).len()
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn value_id(&self, var: VarId, name: &str) -> Option<ValId> {
        self.variables[var].values.iter().position(|v| v == name)
    }

    /// Looks up a (variable, value) pair by name.
    pub fn lookup(&self, var: &str, value: &str) -> Result<(VarId, ValId), CspError> {
        let v = self
            .var_id(var)
            .ok_or_else(|| CspError::UnknownVariable(var.to_string()))?;
        let a = self.value_id(v, value).ok_or_else(|| CspError::ValueOutOfDomain {
            var: var.to_string(),
            value: value.to_string(),
        })?;
        Ok((v, a))
    }

    pub fn check_var(&self, var: VarId) -> Result<(), CspError> {
        if var < self.num_vars() {
            Ok(())
        } else {
            Err(CspError::UnknownVariable(format!("#{var}")))
        }
    }

    pub fn check_value(&self, var: VarId, value: ValId) -> Result<(), CspError> {
        self.check_var(var)?;
        if value < self.domain_size(var) {
            Ok(())
        } else {
            Err(CspError::ValueOutOfDomain {
                var: self.var_name(var).to_string(),
                value: format!("#{value}"),
            })
        }
    }

    pub fn check_assignment(&self, asg: &Assignment) -> Result<(), CspError> {
        for (var, value) in asg.iter() {
            if var >= self.num_vars() {
                return Err(CspError::InvalidAssignment(format!("unknown variable #{var}")));
            }
            if value >= self.domain_size(var) {
                return Err(CspError::InvalidAssignment(format!(
                    "value #{value} is outside the domain of `{}`",
                    self.var_name(var)
                )));
            }
        }
        Ok(())
    }

    /// Partial-assignment consistency: every constraint whose scope is fully
    /// bound must be satisfied. Constraints with unbound variables are ignored.
    pub fn is_consistent(&self, asg: &Assignment) -> Result<bool, CspError> {
        self.check_assignment(asg)?;
        Ok(self.consistent_unchecked(asg))
    }

    pub(crate) fn consistent_unchecked(&self, asg: &Assignment) -> bool {
        let mut tuple = Vec::new();
        'outer: for c in &self.constraints {
            tuple.clear();
            for &x in c.scope() {
                match asg.get(x) {
                    Some(val) => tuple.push(val),
                    None => continue 'outer,
                }
            }
            if !c.allows(&tuple) {
                return false;
            }
        }
        true
    }

    /// Full-vector consistency; `values[v]` is the value of variable `v`.
    pub fn is_solution(&self, values: &[ValId]) -> bool {
        values.len() == self.num_vars() && self.constraints.iter().all(|c| c.allows_full(values))
    }

    /// Subproblem induced by `subset`: the variables of `subset` (kept in
    /// declaration order, renumbered densely), their domains, and exactly the
    /// constraints whose scope lies inside `subset`.
    pub fn induced_subproblem(&self, subset: &BTreeSet<VarId>) -> Result<CspInstance, CspError> {
        if let Some(&bad) = subset.iter().find(|&&v| v >= self.num_vars()) {
            return Err(CspError::InvalidSubset(format!("unknown variable #{bad}")));
        }
        let remap: HashMap<VarId, VarId> = subset.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let variables = subset.iter().map(|&v| self.variables[v].clone()).collect();
        let constraints = self
            .constraints
            .iter()
            .filter(|c| c.scope().iter().all(|x| remap.contains_key(x)))
            .map(|c| Constraint {
                scope: c.scope().iter().map(|x| remap[x]).collect(),
                polarity: c.polarity,
                tuples: c.tuples.clone(),
            })
            .collect();
        Self::build(variables, constraints, true)
    }

    /// Restricts every bound variable's domain to its bound value. The
    /// constraints are kept; tuples that mention removed values are dropped,
    /// which does not change the satisfied set over the reduced domains.
    pub fn apply_assignment(&self, asg: &Assignment) -> Result<CspInstance, CspError> {
        if !self.is_consistent(asg)? {
            return Err(CspError::InconsistentAssignment);
        }
        let keep: Vec<Vec<bool>> = (0..self.num_vars())
            .map(|v| match asg.get(v) {
                Some(val) => (0..self.domain_size(v)).map(|a| a == val).collect(),
                None => vec![true; self.domain_size(v)],
            })
            .collect();
        Ok(self.restrict_domains(&keep))
    }

    /// Reduces domains to the values flagged in `keep` (one mask per variable).
    /// Empty domains are permitted in the result.
    pub fn restrict_domains(&self, keep: &[Vec<bool>]) -> CspInstance {
        let mut maps: Vec<Vec<Option<ValId>>> = Vec::with_capacity(self.num_vars());
        let mut variables = Vec::with_capacity(self.num_vars());
        for (v, var) in self.variables.iter().enumerate() {
            let mut next = 0;
            let mut map = Vec::with_capacity(var.values.len());
            let mut values = Vec::new();
            for (a, name) in var.values.iter().enumerate() {
                if keep[v][a] {
                    map.push(Some(next));
                    values.push(name.clone());
                    next += 1;
                } else {
                    map.push(None);
                }
            }
            maps.push(map);
            variables.push(Variable::new(var.name.clone(), values));
        }
        let constraints = self
            .constraints
            .iter()
            .map(|c| {
                let tuples = c
                    .tuples
                    .iter()
                    .filter_map(|t| {
                        t.iter()
                            .zip(c.scope())
                            .map(|(&val, &x)| maps[x][val])
                            .collect::<Option<Vec<_>>>()
                    })
                    .collect();
                Constraint::new(c.scope.clone(), c.polarity, tuples)
            })
            .collect();
        CspInstance {
            variables,
            constraints,
            by_name: self.by_name.clone(),
        }
    }

    /// The instance with `extra` constraints appended (conjoined).
    pub fn with_constraints(&self, extra: &[Constraint]) -> Result<CspInstance, CspError> {
        let mut constraints = self.constraints.clone();
        constraints.extend(extra.iter().cloned());
        Self::build(self.variables.clone(), constraints, true)
    }

    /// Declared domains filtered by every unary constraint.
    pub fn effective_domains(&self) -> Vec<Vec<bool>> {
        let mut live: Vec<Vec<bool>> = self.variables.iter().map(|var| vec![true; var.values.len()]).collect();
        for c in self.constraints.iter().filter(|c| c.arity() == 1) {
            let x = c.scope[0];
            for (a, flag) in live[x].iter_mut().enumerate() {
                if !c.allows(&[a]) {
                    *flag = false;
                }
            }
        }
        live
    }
}

fn validate_constraint(variables: &[Variable], index: usize, c: &Constraint) -> Result<(), CspError> {
    let invalid = |message: String| CspError::InvalidConstraint { index, message };
    if c.scope.is_empty() {
        return Err(invalid("empty scope".into()));
    }
    let mut seen = BTreeSet::new();
    for &x in &c.scope {
        if x >= variables.len() {
            return Err(invalid(format!("unknown variable #{x}")));
        }
        if !seen.insert(x) {
            return Err(invalid(format!(
                "variable `{}` appears twice in the scope",
                variables[x].name
            )));
        }
    }
    for t in &c.tuples {
        if t.len() != c.scope.len() {
            return Err(invalid(format!(
                "tuple of length {} for a scope of arity {}",
                t.len(),
                c.scope.len()
            )));
        }
        for (&val, &x) in t.iter().zip(&c.scope) {
            if val >= variables[x].values.len() {
                return Err(invalid(format!(
                    "value #{val} is outside the domain of `{}`",
                    variables[x].name
                )));
            }
        }
    }
    Ok(())
}

/// Name-based construction, mostly for tests and the gallery.
#[derive(Debug, Default)]
pub struct CspBuilder {
    variables: Vec<Variable>,
    pending: Vec<(Vec<String>, Polarity, Vec<Vec<String>>)>,
}

impl CspBuilder {
    pub fn var(mut self, name: &str, values: &[&str]) -> Self {
        self.variables
            .push(Variable::new(name, values.iter().map(|s| s.to_string()).collect()));
        self
    }

    pub fn allow(self, scope: &[&str], tuples: &[&[&str]]) -> Self {
        self.constraint(scope, Polarity::Allow, tuples)
    }

    pub fn forbid(self, scope: &[&str], tuples: &[&[&str]]) -> Self {
        self.constraint(scope, Polarity::Forbid, tuples)
    }

    pub fn constraint(mut self, scope: &[&str], polarity: Polarity, tuples: &[&[&str]]) -> Self {
        self.pending.push((
            scope.iter().map(|s| s.to_string()).collect(),
            polarity,
            tuples
                .iter()
                .map(|t| t.iter().map(|s| s.to_string()).collect())
                .collect(),
        ));
        self
    }

    pub fn build(self) -> Result<CspInstance, CspError> {
        let shell = CspInstance::new(self.variables.clone(), Vec::new())?;
        let mut constraints = Vec::with_capacity(self.pending.len());
        for (scope_names, polarity, tuple_names) in self.pending {
            let scope = scope_names
                .iter()
                .map(|n| shell.var_id(n).ok_or_else(|| CspError::UnknownVariable(n.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            let mut tuples = BTreeSet::new();
            for names in tuple_names {
                if names.len() != scope.len() {
                    return Err(CspError::InvalidConstraint {
                        index: constraints.len(),
                        message: "tuple arity does not match scope".into(),
                    });
                }
                let t = names
                    .iter()
                    .zip(&scope)
                    .map(|(n, &x)| {
                        shell.value_id(x, n).ok_or_else(|| CspError::ValueOutOfDomain {
                            var: shell.var_name(x).to_string(),
                            value: n.clone(),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                tuples.insert(t);
            }
            constraints.push(Constraint::new(scope, polarity, tuples));
        }
        CspInstance::new(self.variables, constraints)
    }
}

/// Graph over (variable, value) nodes; an edge joins two nodes of distinct
/// variables iff every constraint on exactly those two variables allows the
/// pair. The modified form also joins every pair of values of one variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MicroStructure {
    nodes: Vec<(VarId, ValId)>,
    offsets: Vec<usize>,
    edges: BTreeSet<(usize, usize)>,
    modified: bool,
}

impl MicroStructure {
    pub fn nodes(&self) -> &[(VarId, ValId)] {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_modified(&self) -> bool {
        self.modified
    }

    pub fn node_index(&self, var: VarId, value: ValId) -> usize {
        self.offsets[var] + value
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        let key = if i < j { (i, j) } else { (j, i) };
        self.edges.contains(&key)
    }
}

pub fn build_microstructure(csp: &CspInstance, modified: bool) -> Result<MicroStructure, CspError> {
    if let Some((index, c)) = csp.constraints().iter().enumerate().find(|(_, c)| c.arity() > 2) {
        return Err(CspError::ArityUnsupported {
            index,
            arity: c.arity(),
        });
    }
    let mut nodes = Vec::new();
    let mut offsets = Vec::with_capacity(csp.num_vars());
    for v in 0..csp.num_vars() {
        offsets.push(nodes.len());
        nodes.extend((0..csp.domain_size(v)).map(|a| (v, a)));
    }
    let mut edges = BTreeSet::new();
    for x in 0..csp.num_vars() {
        for y in x + 1..csp.num_vars() {
            let between: Vec<&Constraint> = csp
                .constraints()
                .iter()
                .filter(|c| c.arity() == 2 && c.involves(x) && c.involves(y))
                .collect();
            for a in 0..csp.domain_size(x) {
                for b in 0..csp.domain_size(y) {
                    let ok = between.iter().all(|c| {
                        if c.scope()[0] == x {
                            c.allows(&[a, b])
                        } else {
                            c.allows(&[b, a])
                        }
                    });
                    if ok {
                        edges.insert((offsets[x] + a, offsets[y] + b));
                    }
                }
            }
        }
        if modified {
            let n = csp.domain_size(x);
            for a in 0..n {
                for b in a + 1..n {
                    edges.insert((offsets[x] + a, offsets[x] + b));
                }
            }
        }
    }
    Ok(MicroStructure {
        nodes,
        offsets,
        edges,
        modified,
    })
}
