use std::fmt::Write as _;

use crate::csp::{build_microstructure, CspError, CspInstance};

pub(crate) fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering of the microstructure, one cluster per variable.
pub fn microstructure_dot(csp: &CspInstance, modified: bool) -> Result<String, CspError> {
    let ms = build_microstructure(csp, modified)?;
    let label = |i: usize| {
        let (x, a) = ms.nodes()[i];
        quote(&format!("{}={}", csp.var_name(x), csp.value_name(x, a)))
    };
    let mut out = String::from("graph microstructure {\n");
    for x in 0..csp.num_vars() {
        let _ = writeln!(out, "  subgraph cluster_{x} {{");
        let _ = writeln!(out, "    label = {};", quote(csp.var_name(x)));
        for a in 0..csp.domain_size(x) {
            let _ = writeln!(out, "    {};", label(ms.node_index(x, a)));
        }
        out.push_str("  }\n");
    }
    for &(i, j) in ms.edges() {
        let _ = writeln!(out, "  {} -- {};", label(i), label(j));
    }
    out.push_str("}\n");
    Ok(out)
}
