use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use interchange::taxonomy::{gallery, gallery_text, lattice, Concept};
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_interchange"));
    cmd.env_remove("INTERCHANGE_MAX_VARS")
        .env_remove("INTERCHANGE_MAX_DOMAIN");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn export() -> TempDir {
    let dir = TempDir::new().unwrap();
    let o = run(&["gallery", "export", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    dir
}

fn file(dir: &TempDir, id: &str) -> String {
    dir.path().join(format!("{id}.csp")).to_str().unwrap().to_string()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p: PathBuf = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn analyze_ni_prints_the_block() {
    let g = export();
    let o = run(&["analyze", &file(&g, "ni"), "--concept", "ni"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("NI X: {a,b} {c}"), "{}", stdout(&o));
}

#[test]
fn analyze_single_pair() {
    let g = export();
    let o = run(&["analyze", &file(&g, "ni"), "--concept", "fi", "--pair", "X", "a", "a"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "FI X a a: true\n");
    let o = run(&["analyze", &file(&g, "ni"), "--concept", "fi", "--pair", "X", "a", "c"]);
    assert!(
        stdout(&o).starts_with("FI X a c: false (violating solution {"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn analyze_with_parameters() {
    let g = export();
    let o = run(&[
        "analyze",
        &file(&g, "pi-not-sub-fi-ctxdepi-nti-npi"),
        "--concept",
        "pi",
        "--wrt",
        "X,Y",
        "--pair",
        "X",
        "a",
        "b",
    ]);
    assert_eq!(stdout(&o), "PI wrt {X, Y} X a b: true\n");
    let o = run(&[
        "analyze",
        &file(&g, "fdynsub-not-tupsub"),
        "--concept",
        "fdynsub",
        "--under",
        "Y=p",
        "--pair",
        "X",
        "a",
        "b",
    ]);
    assert_eq!(stdout(&o), "FDynSub under {Y=p} X a b: true\n");
    let o = run(&[
        "analyze",
        &file(&g, "tupsub-not-fdynsub"),
        "--concept",
        "tupsub",
        "--tuple",
        "X=a,Y=p",
        "X=b,Y=q",
    ]);
    assert_eq!(stdout(&o), "TupSub of {X=a, Y=p} for {X=b, Y=q}: true\n");
    let o = run(&["analyze", &file(&g, "ni"), "--concept", "ctxdepi", "--format", "lines"]);
    let first = stdout(&o).lines().next().unwrap().to_string();
    assert_eq!(
        first,
        "pair\tconcept=CtxDepI\tvar=X\ta=a\tb=b\twitness=common context {Y=p, Z=r}"
    );
}

#[test]
fn usage_errors_exit_2() {
    let g = export();
    let ni = file(&g, "ni");
    for args in [
        vec!["analyze", ni.as_str(), "--concept", "bogus"],
        vec!["analyze", ni.as_str(), "--concept", "ni", "--wrt", "X,Y"],
        vec!["analyze", ni.as_str(), "--concept", "ni", "--pair", "X", "a", "zz"],
        vec!["analyze", "/nonexistent/file.csp", "--concept", "ni"],
        vec!["gen", "-n", "3", "-d", "2", "--density", "1.5", "--tightness", "0.2"],
        vec!["verify"],
        vec!["solve"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    let bad = write(&g, "bad.csp", "var X a b\ncon X Q : allow (a)\n");
    let o = run(&["solve", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn oversized_instances_are_refused_with_guidance() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("big.csp");
    let o = run(&[
        "gen",
        "-n",
        "8",
        "-d",
        "2",
        "--density",
        "0.3",
        "--tightness",
        "0.2",
        "--seed",
        "3",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let p = path.to_str().unwrap();
    let o = run(&["analyze", p, "--concept", "fi"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("INTERCHANGE_MAX_VARS"), "{}", stderr(&o));
    let o = bin()
        .args(["analyze", p, "--concept", "fi"])
        .env("INTERCHANGE_MAX_VARS", "8")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // local detectors need no oracle
    let o = run(&["analyze", p, "--concept", "nsub"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_gallery_passes() {
    let o = run(&["verify", "--gallery"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(
        out.lines()
            .filter(|l| l.starts_with("ok   ") && l.contains("claims"))
            .count(),
        gallery().len()
    );
    assert!(out.contains(", 0 failing"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn verify_random_is_deterministic() {
    let args = [
        "verify", "--random", "12", "--seed", "7", "-n", "4", "-d", "3", "--format", "lines",
    ];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stderr(&a).starts_with("verified in "));
    let o = run(&["verify", "--random", "1", "-n", "7", "-d", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn corrupted_lattice_fails_naming_the_edge() {
    let dir = TempDir::new().unwrap();
    let mut text = lattice().to_text();
    text.push_str("edge NSub_C Sub pairwise | not a real implication\n");
    let p = write(&dir, "lattice.txt", &text);
    let o = run(&["verify", "--gallery", "--lattice", &p]);
    assert_eq!(o.status.code(), Some(1));
    let fails: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| l.starts_with("FAIL"))
        .map(String::from)
        .collect();
    assert_eq!(fails.len(), 1, "{fails:?}");
    assert!(
        fails[0].starts_with("FAIL NSub_C -> Sub [pairwise]: instance #"),
        "{}",
        fails[0]
    );

    let mut text = lattice().to_text();
    text.push_str("edge FI NSub pairwise | contradicts a declared incomparability\n");
    let p = write(&dir, "cyclic.txt", &text);
    let o = run(&["verify", "--gallery", "--lattice", &p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stdout(&o).contains("FI and NSub are declared incomparable"),
        "{}",
        stdout(&o)
    );

    let p = write(&dir, "garbage.txt", "edge FI\n");
    assert_eq!(run(&["verify", "--gallery", "--lattice", &p]).status.code(), Some(2));
}

#[test]
fn solve_prints_solutions_and_bundles() {
    let g = export();
    let o = run(&["solve", "--bundle", &file(&g, "ni")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.contains("X={a,b}")), "{out}");
    assert!(out.contains("2 bundles, 4 solutions"));

    let dir = TempDir::new().unwrap();
    let unsat = write(&dir, "unsat.csp", "var X a b\nvar Y p\ncon X Y : allow\n");
    let o = run(&["solve", &unsat]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("0 solutions\n"));

    let o = run(&["solve", "--limit", "1", &file(&g, "ni")]);
    let sols = stdout(&o).lines().filter(|l| l.starts_with('{')).count();
    assert_eq!(sols, 1);
    let o = run(&["solve", "--descending", "--var-order", "Z,Y,X", &file(&g, "ni")]);
    assert!(stdout(&o).contains("4 solutions"));
}

#[test]
fn gen_matches_the_golden_file() {
    let golden =
        fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/gen-n4-d3-s1.csp")).unwrap();
    for _ in 0..2 {
        let o = run(&[
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
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o), golden);
    }
}

#[test]
fn dot_outputs() {
    let o = run(&["dot", "--hasse"]);
    assert_eq!(o.status.code(), Some(0));
    let nodes = stdout(&o).lines().filter(|l| l.contains("[shape")).count();
    assert_eq!(nodes, Concept::ALL.len());
    assert_eq!(stdout(&run(&["--format", "lines", "dot", "--hasse"])), stdout(&o));

    let g = export();
    let o = run(&["dot", "--micro", &file(&g, "ni"), "--modified"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("graph"), "{}", stdout(&o));

    let dir = TempDir::new().unwrap();
    let ternary = write(
        &dir,
        "t.csp",
        "var X a b\nvar Y a\nvar Z a\ncon X Y Z : allow (a,a,a)\n",
    );
    let o = run(&["dot", "--micro", &ternary]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("arity"), "{}", stderr(&o));
}

#[test]
fn gallery_export_round_trips() {
    let g = export();
    for inst in gallery() {
        let text = fs::read_to_string(file(&g, inst.id)).unwrap();
        assert_eq!(text, gallery_text(inst.id).unwrap());
        let o = run(&["gallery", "show", inst.id]);
        assert_eq!(stdout(&o), text);
    }
    assert_eq!(run(&["gallery", "show", "nope"]).status.code(), Some(2));
}

#[test]
fn closure_removes_dominated_values() {
    let g = export();
    let o = run(&["closure", &file(&g, "nsub-not-ni-not-fi")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("removed X=b (substitutable by a)"), "{out}");
}
