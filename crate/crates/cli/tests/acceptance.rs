//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use interchange::detect::{dynni, forwni, ni_classes, ni_tree, nic_classes, npi_classes, ns_closure, nsub_pairs, nti};
use interchange::io::{emit, generate, parse, RandomModel};
use interchange::oracle::DynamicKind;
use interchange::search::{solve_bundled, solve_plain, SearchOptions};
use interchange::taxonomy::{
    gallery, gallery_text, lattice, random_corpus, verify_edges, verify_gallery, TaxonomyLattice, VerifyOptions,
};
use interchange::{enumerate_solutions, Assignment, CspInstance, Partition, Semantics, VarId};

const CORPUS_SEED: u64 = 1;
const CORPUS_SIZE: usize = 500;
const TIGHTNESS: [f64; 3] = [0.2, 0.4, 0.6];
const TIME_LIMIT: Duration = Duration::from_secs(300);
const MIN_GALLERY: usize = 13;
const INCOMPARABILITIES: usize = 6;
/// Constant in the work bounds of criterion 7.
const C: u64 = 2;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn corpus(count: usize, seed: u64) -> Vec<CspInstance> {
    random_corpus(count, 5, 3, 0.5, &TIGHTNESS, seed).expect("valid model")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lattice_verification() -> Outcome {
    let instances = corpus(CORPUS_SIZE, CORPUS_SEED);
    let lat = lattice();
    let started = Instant::now();
    let report = verify_edges(&instances, &lat, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    if let Some(e) = report.violations().next() {
        return Err(format!("{} violated: {}", e.label(), e.violation.as_ref().unwrap()));
    }
    ensure(elapsed < TIME_LIMIT, || format!("took {elapsed:.1?}"))?;
    Ok(format!(
        "{} instances, {} edges, {} checks, 0 violations in {elapsed:.1?}",
        report.instances,
        report.edges.len(),
        report.checks()
    ))
}

fn equivalence_suites() -> Outcome {
    let full = lattice();
    let only = TaxonomyLattice {
        concepts: full.concepts.clone(),
        edges: Vec::new(),
        equivalences: full.equivalences.clone(),
        incomparabilities: Vec::new(),
    };
    let opts = VerifyOptions {
        seed: 2,
        max_boundary: Some(3),
        max_orderings: 120,
        max_assignment_sets: usize::MAX,
        ..VerifyOptions::default()
    };
    let report = verify_edges(&corpus(200, 2000), &only, &opts).map_err(|e| e.to_string())?;
    if let Some(e) = report.violations().next() {
        return Err(format!("{} disagreed: {}", e.label(), e.violation.as_ref().unwrap()));
    }
    let labels: Vec<String> = report
        .edges
        .iter()
        .map(|e| format!("{} ({} checks)", e.label(), e.checks))
        .collect();
    Ok(format!("200 instances, {}", labels.join(", ")))
}

fn gallery_integrity() -> Outcome {
    let g = gallery();
    ensure(g.len() >= MIN_GALLERY, || format!("only {} instances", g.len()))?;
    let report = verify_gallery().map_err(|e| e.to_string())?;
    let witnessed = |x, y| {
        g.iter().any(|inst| {
            inst.claims.iter().any(|p| {
                p.concept == x
                    && p.expected
                    && inst
                        .claims
                        .iter()
                        .any(|q| q.concept == y && !q.expected && q.reversed == p.reversed)
            })
        })
    };
    let incs = &lattice().incomparabilities;
    ensure(incs.len() == INCOMPARABILITIES, || {
        format!("{} incomparabilities declared", incs.len())
    })?;
    for inc in incs {
        ensure(witnessed(inc.a, inc.b), || format!("no {} without {}", inc.a, inc.b))?;
        ensure(witnessed(inc.b, inc.a), || format!("no {} without {}", inc.b, inc.a))?;
    }
    Ok(format!(
        "{} instances, {} claims verified, {} incomparabilities witnessed both ways",
        g.len(),
        report.claims(),
        incs.len()
    ))
}

fn subsets_with(n: usize, v: VarId) -> Vec<BTreeSet<VarId>> {
    (0u32..1 << n)
        .filter(|m| m & (1 << v) != 0)
        .map(|m| (0..n).filter(|x| m & (1 << x) != 0).collect())
        .collect()
}

fn tuples_over(csp: &CspInstance, vars: &[VarId]) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for &x in vars {
        out = out
            .into_iter()
            .flat_map(|t| (0..csp.domain_size(x)).map(move |a| t.clone().with(x, a)))
            .collect();
    }
    out
}

fn detector_soundness() -> Outcome {
    let mut checks = [0u64; 6];
    for (i, csp) in corpus(CORPUS_SIZE, CORPUS_SEED).iter().enumerate() {
        let fail = |what: &str| format!("instance #{i}: {what}\n{}", emit(csp));
        let sem = Semantics::new(csp);
        let n = csp.num_vars();
        for v in 0..n {
            let d = csp.domain_size(v);
            let ni = ni_classes(csp, v);
            let nsub = nsub_pairs(csp, v);
            let mut refined = Partition::new(v, vec![(0..d).collect()]);
            for c in csp.constraints_on(v) {
                refined = refined.refine(&nic_classes(csp, v, c).unwrap());
            }
            ensure(refined == ni, || fail("per-constraint classes do not refine to NI"))?;
            checks[2] += 1;
            let sets = sem.consistent_assignment_sets(v);
            let subsets = subsets_with(n, v);
            let npis: Vec<Partition> = subsets.iter().map(|s| npi_classes(csp, v, s).unwrap()).collect();
            for a in 0..d {
                for b in 0..d {
                    if ni.same_block(a, b) {
                        checks[0] += 1;
                        ensure(sem.fi(v, a, b).unwrap().holds, || fail("NI without FI"))?;
                    }
                    if nsub.contains(&(a, b)) {
                        checks[1] += 1;
                        ensure(sem.sub(v, a, b).unwrap().holds, || fail("NSub without Sub"))?;
                    }
                    for asg in &sets {
                        if dynni(csp, v, a, b, asg).unwrap() {
                            checks[3] += 1;
                            let f = sem.fdyn(v, a, b, asg, DynamicKind::Interchangeable).unwrap();
                            ensure(f.holds, || fail("DynNI without FDynI"))?;
                        }
                    }
                    for (s, npi) in subsets.iter().zip(&npis) {
                        if nti(csp, v, a, b, s).unwrap() {
                            checks[5] += 1;
                            ensure(sem.pi(v, a, b, s).unwrap().holds, || fail("NTI without PI"))?;
                            ensure(npi.same_block(a, b), || fail("NTI without NPI"))?;
                        }
                    }
                }
            }
            for s in subsets.iter().filter(|s| s.len() <= 2) {
                let vars: Vec<VarId> = s.iter().copied().collect();
                let tuples: Vec<Assignment> = tuples_over(csp, &vars)
                    .into_iter()
                    .filter(|t| csp.is_consistent(t).unwrap())
                    .collect();
                for u in &tuples {
                    for u2 in &tuples {
                        if forwni(csp, s, u, u2).unwrap() {
                            checks[4] += 1;
                            ensure(sem.tupsub(u, u2).unwrap().holds, || fail("ForwNI without TupSub"))?;
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "positives checked: NI {}, NSub {}, NI_C refinements {}, DynNI {}, ForwNI {}, NTI {}",
        checks[0], checks[1], checks[2], checks[3], checks[4], checks[5]
    ))
}

fn closure_safety() -> Outcome {
    let mut removed = 0;
    for (i, csp) in corpus(300, 3000).iter().enumerate() {
        let cl = ns_closure(csp);
        let before = !enumerate_solutions(csp, Some(1)).is_empty();
        let after = !enumerate_solutions(&cl.reduced, Some(1)).is_empty();
        ensure(before == after, || format!("instance #{i}: solvability changed"))?;
        for v in 0..cl.reduced.num_vars() {
            ensure(nsub_pairs(&cl.reduced, v).iter().all(|(a, b)| a == b), || {
                format!("instance #{i}: splitter-free pair left on variable {v}")
            })?;
        }
        removed += cl.removals.len();
    }
    Ok(format!(
        "300 instances, {removed} values removed, solvability kept, all fixpoints"
    ))
}

fn bundled_search() -> Outcome {
    let opts = SearchOptions::default();
    let (mut ratio_sum, mut with_blocks) = (0.0, 0);
    for (i, csp) in corpus(200, 4000).iter().enumerate() {
        let (bundles, bstats) = solve_bundled(csp, &opts).map_err(|e| e.to_string())?;
        let (_, pstats) = solve_plain(csp, &opts).map_err(|e| e.to_string())?;
        let mut seen = BTreeSet::new();
        for b in &bundles {
            for s in b.expand() {
                ensure(seen.insert(s), || format!("instance #{i}: bundles overlap"))?;
            }
        }
        let oracle: BTreeSet<Vec<usize>> = enumerate_solutions(csp, None).iter().cloned().collect();
        ensure(seen == oracle, || {
            format!("instance #{i}: bundles do not cover the solutions")
        })?;
        let nontrivial = (0..csp.num_vars()).any(|v| {
            csp.constraints_on(v)
                .any(|c| nic_classes(csp, v, c).unwrap().blocks().iter().any(|b| b.len() > 1))
        });
        if nontrivial {
            with_blocks += 1;
            ensure(bstats.nodes <= pstats.nodes, || {
                format!(
                    "instance #{i}: {} bundled nodes against {} plain",
                    bstats.nodes, pstats.nodes
                )
            })?;
        }
        ratio_sum += bstats.nodes as f64 / pstats.nodes.max(1) as f64;
    }
    Ok(format!(
        "200 instances exactly covered, {with_blocks} with nontrivial NI_C blocks, mean node ratio {:.3}",
        ratio_sum / 200.0
    ))
}

fn complexity_bounds() -> Outcome {
    let mut worst = (0.0f64, 0.0f64);
    let mut count = 0;
    for (n, d) in [(5, 3), (8, 4), (12, 5), (16, 6), (24, 8)] {
        for seed in 0..20 {
            let density = [0.3, 0.6, 1.0][seed as usize % 3];
            let csp = generate(&RandomModel::new(n, d, density, 0.4, 7000 + seed)).map_err(|e| e.to_string())?;
            let (nn, m) = (csp.num_vars() as u64, csp.num_constraints() as u64);
            let dd = csp.max_domain_size() as u64;
            for v in 0..csp.num_vars() {
                let t = ni_tree(&csp, v);
                let work = t.probes() + t.steps();
                let bound = C * nn * dd * dd;
                ensure(work <= bound, || format!("tree on {n}x{d}: {work} visits over {bound}"))?;
                worst.0 = worst.0.max(work as f64 / bound as f64);
            }
            let probes = ns_closure(&csp).probes;
            let bound = C * m.max(1) * dd * dd * dd;
            ensure(probes <= bound, || {
                format!("closure on {n}x{d}: {probes} probes over {bound}")
            })?;
            worst.1 = worst.1.max(probes as f64 / bound as f64);
            count += 1;
        }
    }
    Ok(format!(
        "{count} instances up to n=24 d=8, c={C}, worst tree ratio {:.3}, worst closure ratio {:.3}",
        worst.0, worst.1
    ))
}

fn determinism() -> Outcome {
    for g in gallery() {
        let text = gallery_text(g.id).unwrap();
        let back = parse(text).map_err(|e| format!("{}: {e}", g.id))?;
        ensure(emit(&back) == text, || format!("{} does not round trip", g.id))?;
    }
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/gen-n4-d3-s1.csp");
    let golden = fs::read_to_string(&golden_path).map_err(|e| e.to_string())?;
    for run in 1..=2 {
        let out = Command::new(env!("CARGO_BIN_EXE_interchange"))
            .args([
                "gen",
                "-n",
                "4",
                "-d",
                "3",
                "--density",
                "0.5",
                "--tightness",
                "0.3",
                "--seed",
                "1",
            ])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success() && out.stdout == golden.as_bytes(), || {
            format!("generator run {run} differs from the golden file")
        })?;
    }
    Ok(format!(
        "{} gallery instances byte-identical, generator matches golden file twice",
        gallery().len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("lattice verification", lattice_verification),
        ("equivalence suites", equivalence_suites),
        ("gallery integrity", gallery_integrity),
        ("detector soundness", detector_soundness),
        ("closure safety", closure_safety),
        ("bundled search", bundled_search),
        ("complexity bounds", complexity_bounds),
        ("format determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
