//! Line-oriented text format.
//!
//! ```text
//! # comment
//! var X a b c
//! var Y a b
//! con X Y : forbid (a,a) (b,b)
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::csp::{Constraint, CspError, CspInstance, Polarity, ValId, VarId, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

const RESERVED: &[char] = &['(', ')', ',', ':', '#'];

fn check_token(line: usize, token: &str) -> Result<(), ParseError> {
    if token.contains(RESERVED) {
        Err(err(line, format!("`{token}` contains a reserved character")))
    } else {
        Ok(())
    }
}

pub fn parse(text: &str) -> Result<CspInstance, ParseError> {
    let mut variables: Vec<Variable> = Vec::new();
    let mut by_name: HashMap<String, VarId> = HashMap::new();
    let mut constraints = Vec::new();
    let mut con_lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match keyword {
            "var" => {
                let mut tokens = rest.split_whitespace();
                let name = tokens.next().ok_or_else(|| err(line_no, "missing variable name"))?;
                check_token(line_no, name)?;
                if by_name.contains_key(name) {
                    return Err(err(line_no, format!("duplicate variable `{name}`")));
                }
                let mut values = Vec::new();
                let mut seen = BTreeSet::new();
                for value in tokens {
                    check_token(line_no, value)?;
                    if !seen.insert(value) {
                        return Err(err(line_no, format!("duplicate value `{value}` in `{name}`")));
                    }
                    values.push(value.to_string());
                }
                if values.is_empty() {
                    return Err(err(line_no, format!("variable `{name}` has no values")));
                }
                by_name.insert(name.to_string(), variables.len());
                variables.push(Variable::new(name, values));
            }
            "con" => {
                let (head, body) = rest
                    .split_once(':')
                    .ok_or_else(|| err(line_no, "expected `:` after the scope"))?;
                let scope: Vec<VarId> = head
                    .split_whitespace()
                    .map(|name| {
                        by_name
                            .get(name)
                            .copied()
                            .ok_or_else(|| err(line_no, format!("unknown variable `{name}`")))
                    })
                    .collect::<Result<_, _>>()?;
                if scope.is_empty() {
                    return Err(err(line_no, "empty scope"));
                }
                if scope.iter().collect::<BTreeSet<_>>().len() != scope.len() {
                    return Err(err(line_no, "a variable appears twice in the scope"));
                }
                let body = body.trim_start();
                let (pol, tuples) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
                let polarity = match pol {
                    "allow" => Polarity::Allow,
                    "forbid" => Polarity::Forbid,
                    other => return Err(err(line_no, format!("expected `allow` or `forbid`, found `{other}`"))),
                };
                let tuples = parse_tuples(line_no, tuples, &scope, &variables)?;
                constraints.push(Constraint::new(scope, polarity, tuples));
                con_lines.push(line_no);
            }
            other => return Err(err(line_no, format!("unknown directive `{other}`"))),
        }
    }
    CspInstance::new(variables, constraints).map_err(|e| match e {
        CspError::InvalidConstraint { index, message } => err(con_lines[index], message),
        other => err(0, other.to_string()),
    })
}

fn parse_tuples(
    line: usize,
    text: &str,
    scope: &[VarId],
    variables: &[Variable],
) -> Result<BTreeSet<Vec<ValId>>, ParseError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut rest = compact.as_str();
    let mut out = BTreeSet::new();
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('(')
            .ok_or_else(|| err(line, format!("expected `(` at `{rest}`")))?;
        let (body, after) = inner.split_once(')').ok_or_else(|| err(line, "unterminated tuple"))?;
        let symbols: Vec<&str> = body.split(',').collect();
        if symbols.len() != scope.len() {
            return Err(err(
                line,
                format!(
                    "tuple ({body}) has {} values for a scope of arity {}",
                    symbols.len(),
                    scope.len()
                ),
            ));
        }
        let tuple = symbols
            .iter()
            .zip(scope)
            .map(|(sym, &x)| {
                let var = &variables[x];
                var.values()
                    .iter()
                    .position(|v| v == sym)
                    .ok_or_else(|| err(line, format!("value `{sym}` is not in the domain of `{}`", var.name())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.insert(tuple);
        rest = after;
    }
    Ok(out)
}

/// Canonical text: declaration order, single spaces, tuples sorted by value
/// index.
pub fn emit(csp: &CspInstance) -> String {
    let mut out = String::new();
    for var in csp.variables() {
        let _ = writeln!(out, "var {} {}", var.name(), var.values().join(" "));
    }
    for c in csp.constraints() {
        out.push_str(&emit_constraint(csp, c));
        out.push('\n');
    }
    out
}

pub fn emit_constraint(csp: &CspInstance, c: &Constraint) -> String {
    let names: Vec<&str> = c.scope().iter().map(|&x| csp.var_name(x)).collect();
    let mut line = format!("con {} : {}", names.join(" "), c.polarity().keyword());
    for t in c.tuples() {
        let vals: Vec<&str> = t.iter().zip(c.scope()).map(|(&a, &x)| csp.value_name(x, a)).collect();
        let _ = write!(line, " ({})", vals.join(","));
    }
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let csp = parse("var X a b").unwrap();
        assert_eq!(csp.num_vars(), 1);
        assert_eq!(csp.domain_size(0), 2);
        assert_eq!(csp.num_constraints(), 0);
    }

    #[test]
    fn whitespace_and_comments() {
        let text = "# header\nvar X a b   # trailing\n\n var Y  c d\ncon X Y :forbid ( a , c )(b,d)\n";
        let csp = parse(text).unwrap();
        assert_eq!(emit(&csp), "var X a b\nvar Y c d\ncon X Y : forbid (a,c) (b,d)\n");
    }

    #[test]
    fn empty_tuple_list() {
        let csp = parse("var X a\nvar Y b\ncon X Y : allow\n").unwrap();
        assert_eq!(emit(&csp), "var X a\nvar Y b\ncon X Y : allow\n");
        assert!(crate::oracle::enumerate_solutions(&csp, None).is_empty());
    }

    #[test]
    fn tuples_sort_by_index_not_name() {
        let csp = parse("var X z a\ncon X : allow (a) (z)\n").unwrap();
        assert_eq!(emit(&csp), "var X z a\ncon X : allow (z) (a)\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("var X a\ncon X Y : allow\n", 2, "unknown variable"),
            ("var X a\nvar Y a\ncon X Y : allow (a)\n", 3, "arity"),
            ("var X a\ncon X : allow (b)\n", 2, "not in the domain"),
            ("var X a\n\nvar X b\n", 3, "duplicate variable"),
            ("var X\n", 1, "no values"),
            ("var X a\ncon X : maybe\n", 2, "allow"),
            ("var X a\ncon X allow\n", 2, ":"),
            ("bogus\n", 1, "unknown directive"),
        ];
        for (text, line, fragment) in cases {
            let e = parse(text).unwrap_err();
            assert_eq!(e.line, line, "{text}");
            assert!(e.message.contains(fragment), "{}: {}", text, e.message);
        }
    }
}
