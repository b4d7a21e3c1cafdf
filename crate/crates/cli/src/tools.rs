use std::fs;
use std::path::Path;

use anyhow::{Context as _, Result};
use interchange::detect::ns_closure;
use interchange::io::{emit, generate as gen_instance, microstructure_dot, RandomModel};
use interchange::taxonomy::{gallery as builtin_gallery, gallery_text, lattice, TaxonomyLattice};

use crate::errors::{read_instance, usage};
use crate::report::{Report, RAW};
use crate::{DotArgs, GalleryAction, GenArgs, Status};

fn raw(text: String) -> Report {
    let mut r = Report::default();
    r.push(RAW, text.trim_end().to_string(), vec![]);
    r
}

fn write_or_print(path: Option<&Path>, text: String) -> Result<(Report, Status)> {
    match path {
        Some(p) => {
            fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?;
            Ok((Report::default(), Status::Ok))
        }
        None => Ok((raw(text), Status::Ok)),
    }
}

pub fn generate(args: &GenArgs) -> Result<(Report, Status)> {
    let model =
        RandomModel::new(args.vars, args.domain, args.density, args.tightness, args.seed).with_arity(args.arity);
    let csp = gen_instance(&model)?;
    let header = format!(
        "# random instance: n={} d={} density={} tightness={} arity={} seed={}\n",
        args.vars, args.domain, args.density, args.tightness, args.arity, args.seed
    );
    write_or_print(args.output.as_deref(), header + &emit(&csp))
}

pub fn dot(args: &DotArgs) -> Result<(Report, Status)> {
    if let Some(path) = &args.micro {
        let csp = read_instance(path)?;
        return Ok((raw(microstructure_dot(&csp, args.modified)?), Status::Ok));
    }
    let lat = match &args.lattice {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            TaxonomyLattice::from_text(&text)?
        }
        None => lattice(),
    };
    Ok((raw(lat.to_dot()), Status::Ok))
}

pub fn gallery(action: &GalleryAction) -> Result<(Report, Status)> {
    let mut report = Report::default();
    match action {
        GalleryAction::List => {
            for g in builtin_gallery() {
                report.push(
                    "instance",
                    format!("{:<36} {}", g.id, g.summary),
                    vec![("id", g.id.to_string()), ("summary", g.summary.to_string())],
                );
            }
        }
        GalleryAction::Show { id } => {
            let text = gallery_text(id).ok_or_else(|| usage(format!("no gallery instance `{id}`")))?;
            return Ok((raw(text.to_string()), Status::Ok));
        }
        GalleryAction::Export { dir } => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            for g in builtin_gallery() {
                let path = dir.join(format!("{}.csp", g.id));
                let text = gallery_text(g.id).expect("listed instance");
                fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
                let shown = path.display().to_string();
                report.push(
                    "exported",
                    shown.clone(),
                    vec![("id", g.id.to_string()), ("path", shown)],
                );
            }
        }
    }
    Ok((report, Status::Ok))
}

pub fn closure(path: &Path) -> Result<(Report, Status)> {
    let csp = read_instance(path)?;
    let cl = ns_closure(&csp);
    let mut report = Report::default();
    for r in &cl.removals {
        let (x, val) = (csp.var_name(r.var), csp.value_name(r.var, r.value));
        let (text, by) = match r.dominated_by {
            Some(k) => {
                let keeper = csp.value_name(r.var, k);
                (
                    format!("removed {x}={val} (substitutable by {keeper})"),
                    keeper.to_string(),
                )
            }
            None => (
                format!("removed {x}={val} (excluded by a unary constraint)"),
                String::new(),
            ),
        };
        report.push(
            "removed",
            text,
            vec![("var", x.to_string()), ("value", val.to_string()), ("dominated_by", by)],
        );
    }
    report.push(
        "summary",
        format!("{} values removed, {} splitter probes", cl.removals.len(), cl.probes),
        vec![
            ("removed", cl.removals.len().to_string()),
            ("probes", cl.probes.to_string()),
        ],
    );
    let reduced = emit(&cl.reduced);
    report.push("reduced", reduced.trim_end().to_string(), vec![("instance", reduced)]);
    Ok((report, Status::Ok))
}
