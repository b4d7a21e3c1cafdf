use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::Context as _;
use interchange::io::{parse, ModelError, ParseError};
use interchange::taxonomy::{LatticeError, TaxonomyError, UnknownConcept};
use interchange::{CspError, CspInstance};

/// Bad flags or inputs detected by the commands themselves.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    Usage(message.into()).into()
}

/// 2 for anything the caller can fix (flags, files, parameters, size
/// limits), 3 otherwise.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    let fixable = err.chain().any(|e| {
        e.is::<Usage>()
            || e.is::<ParseError>()
            || e.is::<CspError>()
            || e.is::<ModelError>()
            || e.is::<LatticeError>()
            || e.is::<UnknownConcept>()
            || e.is::<std::io::Error>()
            || e.downcast_ref::<TaxonomyError>()
                .is_some_and(|t| !matches!(t, TaxonomyError::Gallery { .. }))
    });
    if fixable {
        2
    } else {
        3
    }
}

pub fn read_instance(path: &Path) -> anyhow::Result<CspInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse(&text).with_context(|| format!("{}", path.display()))
}

pub fn size_guidance(err: TaxonomyError) -> anyhow::Error {
    match err {
        TaxonomyError::Oversized { .. } => anyhow::Error::new(err)
            .context("refusing to run the brute-force oracle; raise INTERCHANGE_MAX_VARS / INTERCHANGE_MAX_DOMAIN (or --max-vars / --max-domain) to allow it"),
        other => other.into(),
    }
}
