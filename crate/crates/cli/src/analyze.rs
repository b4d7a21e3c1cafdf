use anyhow::Result;
use interchange::taxonomy::{evaluate_param, resolve_pair, Concept, Context, Param, Plane, SizeGuard};
use interchange::{CspInstance, ValId, VarId, Verdict};

use crate::errors::{read_instance, size_guidance, usage};
use crate::report::Report;
use crate::{AnalyzeArgs, Status};

fn parse_bindings(text: &str) -> Result<Vec<(String, String)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| match item.split_once('=') {
            Some((x, v)) if !x.trim().is_empty() && !v.trim().is_empty() => {
                Ok((x.trim().to_string(), v.trim().to_string()))
            }
            _ => Err(usage(format!("expected VAR=VALUE, got `{item}`"))),
        })
        .collect()
}

fn build_param(args: &AnalyzeArgs) -> Result<Param> {
    Ok(if let Some(k) = args.k {
        Param::K(k)
    } else if let Some(s) = &args.wrt {
        Param::Boundary(s.clone())
    } else if let Some(o) = &args.ordering {
        Param::Ordering(o.clone())
    } else if let Some(a) = &args.under {
        Param::AssignmentSet(parse_bindings(a)?)
    } else if !args.given.is_empty() {
        let mut cond = Vec::new();
        for g in &args.given {
            let (x, vals) = g
                .split_once('=')
                .ok_or_else(|| usage(format!("expected VAR=V1|V2..., got `{g}`")))?;
            cond.push((
                x.trim().to_string(),
                vals.split('|').map(|v| v.trim().to_string()).collect(),
            ));
        }
        Param::Condition(cond)
    } else if let Some(t) = &args.tuple {
        Param::Tuples(parse_bindings(&t[0])?, parse_bindings(&t[1])?)
    } else if let Some(c) = args.constraint {
        Param::Constraint(c)
    } else {
        Param::Canonical
    })
}

/// Concepts whose evaluation enumerates solutions, boundaries, orderings or
/// assignment sets.
fn needs_oracle(concept: Concept, param: &Param) -> bool {
    if concept.plane() == Plane::Semantic {
        return true;
    }
    match concept {
        Concept::Ni | Concept::Nsub | Concept::Gnsub | Concept::Nic | Concept::Nsubc | Concept::Forwni => false,
        _ => *param == Param::Canonical,
    }
}

/// Whether `v` is a variable the parameter can be applied to.
fn fits(csp: &CspInstance, param: &Param, v: VarId) -> bool {
    let name = csp.var_name(v);
    match param {
        Param::Boundary(s) => s.iter().any(|x| x == name),
        Param::AssignmentSet(a) => a.iter().all(|(x, _)| x != name),
        Param::Condition(c) => c.iter().all(|(x, _)| x != name),
        Param::Constraint(i) => *i < csp.num_constraints() && csp.constraint(*i).involves(v),
        _ => true,
    }
}

fn witness_text(csp: &CspInstance, verdict: &Verdict) -> String {
    verdict.witness.as_ref().map(|w| w.describe(csp)).unwrap_or_default()
}

pub fn run(args: &AnalyzeArgs, guard: &SizeGuard) -> Result<(Report, Status)> {
    let csp = read_instance(&args.file)?;
    let concept = args.concept;
    let param = build_param(args)?;
    if needs_oracle(concept, &param) {
        guard.check(0, &csp).map_err(size_guidance)?;
    }
    let ctx = Context::new(&csp);
    let mut report = Report::default();
    let param_text = param.to_string();
    let label = if param_text.is_empty() {
        concept.to_string()
    } else {
        format!("{concept} {param_text}")
    };

    if let Param::Tuples(t, _) = &param {
        // the tuples carry everything; the pair only has to be valid
        let first = t.first().ok_or_else(|| usage("empty tuple"))?;
        let (v, a) = csp.lookup(&first.0, &first.1)?;
        let verdict = evaluate_param(&ctx, concept, &param, v, a, a)?;
        push_verdict(&mut report, &csp, &label, None, &verdict);
        return Ok((report, Status::Ok));
    }

    if let Some(p) = &args.pair {
        let (v, a, b) = resolve_pair(&csp, &p[0], &p[1], &p[2])?;
        let verdict = evaluate_param(&ctx, concept, &param, v, a, b)?;
        push_verdict(&mut report, &csp, &label, Some((v, a, b)), &verdict);
        return Ok((report, Status::Ok));
    }

    let vars: Vec<VarId> = (0..csp.num_vars()).filter(|&v| fits(&csp, &param, v)).collect();
    if vars.is_empty() {
        return Err(usage(format!("`{param_text}` does not apply to any variable")));
    }
    let mut related = 0;
    for v in vars {
        let d = csp.domain_size(v);
        let mut rel: Vec<Vec<bool>> = (0..d).map(|a| (0..d).map(|b| a == b).collect()).collect();
        let mut verdicts = Vec::new();
        #[allow(clippy::needless_range_loop)]
        for a in 0..d {
            for b in 0..d {
                if a == b || (!concept.is_directional() && b < a) {
                    continue;
                }
                let verdict = evaluate_param(&ctx, concept, &param, v, a, b)?;
                rel[a][b] = verdict.holds;
                if !concept.is_directional() {
                    rel[b][a] = verdict.holds;
                }
                if verdict.holds {
                    related += 1;
                    verdicts.push((a, b, verdict));
                }
            }
        }
        let transitive = (0..d).all(|a| (0..d).all(|b| (0..d).all(|c| !(rel[a][b] && rel[b][c]) || rel[a][c])));
        let witnessed = verdicts.iter().any(|(_, _, w)| w.witness.is_some());
        if !concept.is_directional() && transitive && !witnessed {
            push_blocks(&mut report, &csp, &label, v, &rel);
        } else {
            for (a, b, verdict) in verdicts {
                push_pair(&mut report, &csp, &label, concept, (v, a, b), &verdict);
            }
        }
    }
    let unit = if concept.is_directional() {
        "ordered pairs"
    } else {
        "pairs"
    };
    report.push(
        "summary",
        format!("{related} related {unit}"),
        vec![("concept", label), ("related", related.to_string())],
    );
    Ok((report, Status::Ok))
}

fn push_blocks(report: &mut Report, csp: &CspInstance, label: &str, v: VarId, rel: &[Vec<bool>]) {
    let mut seen = vec![false; rel.len()];
    let mut blocks = Vec::new();
    for a in 0..rel.len() {
        if seen[a] {
            continue;
        }
        let block: Vec<ValId> = (a..rel.len()).filter(|&b| rel[a][b]).collect();
        for &b in &block {
            seen[b] = true;
        }
        let names: Vec<&str> = block.iter().map(|&b| csp.value_name(v, b)).collect();
        blocks.push(format!("{{{}}}", names.join(",")));
    }
    let blocks = blocks.join(" ");
    report.push(
        "blocks",
        format!("{label} {}: {blocks}", csp.var_name(v)),
        vec![
            ("concept", label.to_string()),
            ("var", csp.var_name(v).to_string()),
            ("blocks", blocks),
        ],
    );
}

fn push_pair(
    report: &mut Report,
    csp: &CspInstance,
    label: &str,
    concept: Concept,
    (v, a, b): (VarId, ValId, ValId),
    verdict: &Verdict,
) {
    let (x, va, vb) = (csp.var_name(v), csp.value_name(v, a), csp.value_name(v, b));
    let rel = if concept.is_directional() { "for" } else { "~" };
    let witness = witness_text(csp, verdict);
    let suffix = if witness.is_empty() {
        String::new()
    } else {
        format!(" ({witness})")
    };
    report.push(
        "pair",
        format!("{label} {x}: {va} {rel} {vb}{suffix}"),
        vec![
            ("concept", label.to_string()),
            ("var", x.to_string()),
            ("a", va.to_string()),
            ("b", vb.to_string()),
            ("witness", witness),
        ],
    );
}

fn push_verdict(
    report: &mut Report,
    csp: &CspInstance,
    label: &str,
    pair: Option<(VarId, ValId, ValId)>,
    verdict: &Verdict,
) {
    let witness = witness_text(csp, verdict);
    let suffix = if witness.is_empty() {
        String::new()
    } else {
        format!(" ({witness})")
    };
    let mut fields = vec![("concept", label.to_string())];
    let head = match pair {
        Some((v, a, b)) => {
            let (x, va, vb) = (csp.var_name(v), csp.value_name(v, a), csp.value_name(v, b));
            fields.extend([("var", x.to_string()), ("a", va.to_string()), ("b", vb.to_string())]);
            format!("{label} {x} {va} {vb}")
        }
        None => label.to_string(),
    };
    fields.extend([("holds", verdict.holds.to_string()), ("witness", witness)]);
    report.push("verdict", format!("{head}: {}{suffix}", verdict.holds), fields);
}
