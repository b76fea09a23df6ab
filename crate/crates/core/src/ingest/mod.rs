//! Documentation ingestion: find doc files, then split every line into code
//! information (declarations) or text information (descriptions, parameter
//! and returns tables, version tags).

mod extract;
pub mod rules;

use std::fmt;
use std::path::{Path, PathBuf};

use globset::{Glob, GlobSetBuilder};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};

pub use extract::{extract_records, Extraction, LineClass};
pub use rules::RuleSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindHint {
    Module,
    Namespace,
    Class,
    Interface,
    Enum,
    Method,
    Property,
    Unknown,
}

impl KindHint {
    pub fn parse(s: &str) -> Self {
        match s {
            "module" => KindHint::Module,
            "namespace" => KindHint::Namespace,
            "class" => KindHint::Class,
            "interface" => KindHint::Interface,
            "enum" => KindHint::Enum,
            "method" => KindHint::Method,
            "property" => KindHint::Property,
            _ => KindHint::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocFile {
    pub path: PathBuf,
    pub source_id: String,
    pub lines: Vec<String>,
    /// 0-based indices of lines that held undecodable bytes.
    pub replaced_lines: Vec<usize>,
}

impl RawDocFile {
    pub fn from_bytes(path: impl Into<PathBuf>, source_id: impl Into<String>, bytes: &[u8]) -> Self {
        let text = String::from_utf8_lossy(bytes);
        let mut lines = Vec::new();
        let mut replaced_lines = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.contains('\u{FFFD}') && std::str::from_utf8(bytes).is_err() {
                replaced_lines.push(i);
            }
            lines.push(line.to_string());
        }
        RawDocFile {
            path: path.into(),
            source_id: source_id.into(),
            lines,
            replaced_lines,
        }
    }

    pub fn from_text(source_id: &str, text: &str) -> Self {
        Self::from_bytes(source_id, source_id, text.as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeInfoRecord {
    pub source_id: String,
    pub declaration_text: String,
    pub kind_hint: KindHint,
    pub nesting_depth: usize,
    pub ordinal: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    #[serde(rename = "type")]
    pub type_text: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Returns {
    #[serde(rename = "type")]
    pub type_text: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextInfoRecord {
    pub source_id: String,
    pub attached_to: usize,
    pub description: String,
    pub parameters: Vec<Parameter>,
    pub returns: Option<Returns>,
    pub since_version: Option<String>,
    pub deprecated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub path: String,
    /// 1-based.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.path, self.line, self.message)
    }
}

/// Contents of `extracted.json`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extracted {
    pub code_info: Vec<CodeInfoRecord>,
    pub text_info: Vec<TextInfoRecord>,
}

pub fn scan_corpus(root: &Path, include_patterns: &[String]) -> Result<Vec<RawDocFile>> {
    let meta = std::fs::metadata(root).map_err(|source| Error::CorpusAccess {
        path: root.to_path_buf(),
        source,
    })?;
    if !meta.is_dir() {
        return Err(Error::CorpusAccess {
            path: root.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
        });
    }

    let mut builder = GlobSetBuilder::new();
    for pattern in include_patterns {
        let glob = Glob::new(pattern)
            .map_err(|e| Error::Config(format!("bad include pattern `{pattern}`: {e}")))?;
        builder.add(glob);
    }
    let globs = builder
        .build()
        .map_err(|e| Error::Config(format!("bad include patterns: {e}")))?;

    let mut files = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::CorpusAccess {
            path: e.path().unwrap_or(root).to_path_buf(),
            source: e
                .into_io_error()
                .unwrap_or_else(|| std::io::Error::other("directory walk failed")),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
        if !globs.is_match(rel) {
            continue;
        }
        let source_id = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        let bytes = std::fs::read(entry.path()).map_err(|source| Error::CorpusAccess {
            path: entry.path().to_path_buf(),
            source,
        })?;
        files.push(RawDocFile::from_bytes(entry.path(), source_id, &bytes));
    }

    if files.is_empty() {
        return Err(Error::EmptyCorpus {
            root: root.to_path_buf(),
            patterns: include_patterns.to_vec(),
        });
    }
    files.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(files)
}

/// Extract every file (in parallel) and merge in (path, ordinal) order.
pub fn extract_corpus(files: &[RawDocFile], rules: &RuleSet) -> Result<(Extracted, Vec<Diagnostic>)> {
    rules.validate()?;
    let per_file: Vec<Extraction> = files
        .par_iter()
        .map(|f| extract_records(f, rules))
        .collect::<Result<_>>()?;

    let mut out = Extracted::default();
    let mut diagnostics = Vec::new();
    for ex in per_file {
        out.code_info.extend(ex.code_info);
        out.text_info.extend(ex.text_info);
        diagnostics.extend(ex.diagnostics);
    }
    Ok((out, diagnostics))
}
