//! Command output as a list of records, printed either as readable text or as
//! one tab-separated line per record (`kind` first, then `key=value` fields).
//! In the line format, backslashes, tabs and newlines inside values are
//! escaped as `\\`, `\t` and `\n`. Records of kind `raw` (DOT, instance
//! text) are printed unchanged in both styles.

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Lines,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub kind: &'static str,
    pub fields: Vec<(&'static str, String)>,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub records: Vec<Record>,
}

fn escape(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for ch in value.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

pub const RAW: &str = "raw";

impl Report {
    pub fn push(&mut self, kind: &'static str, text: impl Into<String>, fields: Vec<(&'static str, String)>) {
        self.records.push(Record {
            kind,
            fields,
            text: text.into(),
        });
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for r in &self.records {
            match format {
                Format::Text => out.push_str(&r.text),
                Format::Lines if r.kind == RAW => out.push_str(&r.text),
                Format::Lines => {
                    out.push_str(r.kind);
                    for (k, v) in &r.fields {
                        out.push('\t');
                        out.push_str(k);
                        out.push('=');
                        out.push_str(&escape(v));
                    }
                }
            }
            if !out.ends_with('\n') {
                out.push('\n');
            }
        }
        out
    }
}
