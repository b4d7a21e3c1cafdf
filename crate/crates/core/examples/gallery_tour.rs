//! Prints every gallery instance with its verified claims, then solves one
//! of them with and without bundling.

use interchange::search::{solve_bundled, solve_plain, SearchOptions};
use interchange::taxonomy::{gallery, verify_gallery};

fn main() {
    let report = verify_gallery().expect("gallery claims hold");
    for (id, claims) in &report.instances {
        println!("{id}");
        for c in claims {
            println!("  {c}");
        }
    }
    let ni = gallery().into_iter().find(|g| g.id == "ni").expect("ni instance");
    let opts = SearchOptions::default();
    let (sols, plain) = solve_plain(&ni.csp, &opts).unwrap();
    let (bundles, bundled) = solve_bundled(&ni.csp, &opts).unwrap();
    println!("\nni: {} solutions, plain {plain}", sols.len());
    println!("ni: {} bundles, bundled {bundled}", bundles.len());
    for b in &bundles {
        println!("  {}", b.display(&ni.csp));
    }
}
