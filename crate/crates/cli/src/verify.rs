use std::fs;
use std::time::Instant;

use anyhow::{Context as _, Result};
use interchange::taxonomy::{
    gallery, gallery_text, lattice, random_corpus, verify_edges, verify_gallery, SizeGuard, TaxonomyError,
    TaxonomyLattice, VerifyOptions, VerifyReport,
};

use crate::errors::size_guidance;
use crate::report::Report;
use crate::{Status, VerifyArgs};

fn load_lattice(args: &VerifyArgs) -> Result<TaxonomyLattice> {
    match &args.lattice {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            TaxonomyLattice::from_text(&text).with_context(|| format!("{}", path.display()))
        }
        None => Ok(lattice()),
    }
}

pub fn run(args: &VerifyArgs, guard: &SizeGuard) -> Result<(Report, Status)> {
    let lat = load_lattice(args)?;
    let mut report = Report::default();
    if let Err(e) = lat.validate() {
        report.push("invalid", format!("FAIL lattice: {e}"), vec![("reason", e.to_string())]);
        return Ok((report, Status::Violation));
    }
    let started = Instant::now();
    let mut status = Status::Ok;

    let corpus = if args.gallery {
        match verify_gallery() {
            Ok(g) => {
                for (id, claims) in &g.instances {
                    report.push(
                        "instance",
                        format!("ok   {id} ({} claims)", claims.len()),
                        vec![("id", id.to_string()), ("claims", claims.len().to_string())],
                    );
                }
            }
            Err(TaxonomyError::Gallery { id, claim }) => {
                let text = gallery_text(&id).unwrap_or_default();
                report.push(
                    "claim-failed",
                    format!("FAIL {id}: {claim}\n{}", indent(text)),
                    vec![("id", id), ("claim", claim), ("instance", text.to_string())],
                );
                status = Status::Violation;
            }
            Err(e) => return Err(e.into()),
        }
        gallery().into_iter().map(|g| g.csp).collect()
    } else {
        let count = args.random.unwrap_or(0);
        random_corpus(count, args.vars, args.domain, args.density, &args.tightness, args.seed)?
    };

    let opts = VerifyOptions {
        guard: *guard,
        seed: args.seed,
        ..VerifyOptions::default()
    };
    let result = verify_edges(&corpus, &lat, &opts).map_err(size_guidance)?;
    push_edges(&mut report, &result);
    if !result.is_clean() {
        status = Status::Violation;
    }
    let failed = result.violations().count();
    report.push(
        "summary",
        format!(
            "{} instances, {} edges, {} checks, {} failing",
            result.instances,
            result.edges.len(),
            result.checks(),
            failed
        ),
        vec![
            ("instances", result.instances.to_string()),
            ("edges", result.edges.len().to_string()),
            ("checks", result.checks().to_string()),
            ("failing", failed.to_string()),
        ],
    );
    // timing varies between runs, so it stays out of the report
    eprintln!("verified in {:.2?}", started.elapsed());
    Ok((report, status))
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("    {l}")).collect::<Vec<_>>().join("\n")
}

fn push_edges(report: &mut Report, result: &VerifyReport) {
    for e in &result.edges {
        match &e.violation {
            None => report.push(
                "edge",
                format!("ok   {} ({} checks)", e.label(), e.checks),
                vec![
                    ("edge", e.label()),
                    ("checks", e.checks.to_string()),
                    ("status", "ok".into()),
                ],
            ),
            Some(v) => report.push(
                "edge",
                format!("FAIL {}: {v}\n{}", e.label(), indent(&v.text)),
                vec![
                    ("edge", e.label()),
                    ("checks", e.checks.to_string()),
                    ("status", "fail".into()),
                    ("instance_index", v.instance.to_string()),
                    ("var", v.var.clone()),
                    ("a", v.a.clone()),
                    ("b", v.b.clone()),
                    ("detail", v.detail.clone()),
                    ("instance", v.text.clone()),
                ],
            ),
        }
    }
}
