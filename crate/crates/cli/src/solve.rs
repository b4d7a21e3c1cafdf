use anyhow::Result;
use interchange::search::{solve_bundled, solve_plain, SearchOptions, SearchStats, ValueOrder};
use interchange::{Assignment, CspError};

use crate::errors::read_instance;
use crate::report::Report;
use crate::{SolveArgs, Status};

pub fn run(args: &SolveArgs) -> Result<(Report, Status)> {
    let csp = read_instance(&args.file)?;
    let var_order = match &args.var_order {
        Some(names) => Some(
            names
                .iter()
                .map(|x| csp.var_id(x).ok_or_else(|| CspError::UnknownVariable(x.clone())))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let opts = SearchOptions {
        var_order,
        val_order: if args.descending {
            ValueOrder::Descending
        } else {
            ValueOrder::Ascending
        },
        limit: args.limit,
    };
    let mut report = Report::default();
    let stats = if args.bundle {
        let (bundles, stats) = solve_bundled(&csp, &opts)?;
        for b in &bundles {
            let text = b.display(&csp);
            report.push(
                "bundle",
                text.clone(),
                vec![("size", b.size().to_string()), ("values", text)],
            );
        }
        report.push(
            "summary",
            format!("{} bundles, {} solutions", bundles.len(), stats.solutions),
            vec![
                ("bundles", bundles.len().to_string()),
                ("solutions", stats.solutions.to_string()),
            ],
        );
        stats
    } else {
        let (sols, stats) = solve_plain(&csp, &opts)?;
        for s in sols.iter() {
            let text = Assignment::from_full(s).display(&csp).to_string();
            report.push("solution", text.clone(), vec![("values", text)]);
        }
        report.push(
            "summary",
            format!("{} solutions", sols.len()),
            vec![("solutions", sols.len().to_string())],
        );
        stats
    };
    push_stats(&mut report, &stats);
    Ok((report, Status::Ok))
}

fn push_stats(report: &mut Report, stats: &SearchStats) {
    report.push(
        "stats",
        stats.to_string(),
        vec![
            ("nodes", stats.nodes.to_string()),
            ("checks", stats.checks.to_string()),
            ("bundles", stats.bundles.to_string()),
            ("solutions", stats.solutions.to_string()),
        ],
    );
}
