//! Named line patterns that drive extraction. Rule sets are data: the default
//! set ships in `rules/default.toml` and any other TOML file with the same
//! shape can replace it.

use std::collections::HashSet;
use std::path::Path;

use regex::Regex;
use serde::Deserialize;

use super::KindHint;
use crate::error::{Error, Result};

const DEFAULT_RULES: &str = include_str!("../../rules/default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetadataRole {
    Description,
    Since,
    Deprecated,
    ParamsHeader,
    ReturnsHeader,
    TableSeparator,
    TableRow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    #[default]
    Any,
    Code,
    Text,
}

#[derive(Debug, Deserialize)]
struct RuleSetFile {
    fence: String,
    #[serde(default)]
    skip_fence_langs: Vec<String>,
    open_scope: String,
    close_scope: String,
    #[serde(default)]
    declaration: Vec<DeclarationRuleFile>,
    #[serde(default)]
    metadata: Vec<MetadataRuleFile>,
    #[serde(default)]
    ignore: Vec<IgnoreRuleFile>,
    #[serde(default)]
    flag: Vec<FlagRuleFile>,
}

#[derive(Debug, Deserialize)]
struct DeclarationRuleFile {
    name: String,
    pattern: String,
    kind: Option<KindHint>,
    #[serde(default)]
    inside: Vec<KindHint>,
}

#[derive(Debug, Deserialize)]
struct MetadataRuleFile {
    name: String,
    role: MetadataRole,
    pattern: String,
}

#[derive(Debug, Deserialize)]
struct IgnoreRuleFile {
    name: String,
    pattern: String,
    #[serde(default)]
    scope: Scope,
    #[serde(default)]
    ends_block: bool,
}

#[derive(Debug, Deserialize)]
struct FlagRuleFile {
    name: String,
    pattern: String,
    message: String,
}

#[derive(Debug, Clone)]
pub struct DeclarationRule {
    pub name: String,
    pub pattern: Regex,
    /// Fixed kind; when absent the `kind` capture group decides.
    pub kind: Option<KindHint>,
    /// Only applies when the innermost open scope has one of these kinds.
    pub inside: Vec<KindHint>,
}

#[derive(Debug, Clone)]
pub struct MetadataRule {
    pub name: String,
    pub role: MetadataRole,
    pub pattern: Regex,
}

#[derive(Debug, Clone)]
pub struct IgnoreRule {
    pub name: String,
    pub pattern: Regex,
    pub scope: Scope,
    pub ends_block: bool,
}

#[derive(Debug, Clone)]
pub struct FlagRule {
    pub name: String,
    pub pattern: Regex,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct RuleSet {
    pub fence: Regex,
    pub skip_fence_langs: Vec<String>,
    pub open_scope: Regex,
    pub close_scope: Regex,
    pub declarations: Vec<DeclarationRule>,
    pub metadata: Vec<MetadataRule>,
    pub ignore: Vec<IgnoreRule>,
    pub flags: Vec<FlagRule>,
}

fn compile(rule: &str, pattern: &str) -> Result<Regex> {
    Regex::new(pattern).map_err(|e| Error::Rules(format!("rule `{rule}`: {e}")))
}

impl RuleSet {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: RuleSetFile =
            toml::from_str(text).map_err(|e| Error::Rules(format!("cannot parse rule file: {e}")))?;

        let mut names = HashSet::new();
        let mut check_name = |name: &str| -> Result<()> {
            if names.insert(name.to_string()) {
                Ok(())
            } else {
                Err(Error::Rules(format!("duplicate rule name `{name}`")))
            }
        };

        let mut declarations = Vec::with_capacity(file.declaration.len());
        for d in file.declaration {
            check_name(&d.name)?;
            let pattern = compile(&d.name, &d.pattern)?;
            if d.kind.is_none() && !pattern.capture_names().any(|n| n == Some("kind")) {
                return Err(Error::Rules(format!(
                    "declaration rule `{}` has neither a fixed kind nor a `kind` group",
                    d.name
                )));
            }
            declarations.push(DeclarationRule {
                pattern,
                name: d.name,
                kind: d.kind,
                inside: d.inside,
            });
        }
        let mut metadata = Vec::with_capacity(file.metadata.len());
        for m in file.metadata {
            check_name(&m.name)?;
            metadata.push(MetadataRule {
                pattern: compile(&m.name, &m.pattern)?,
                name: m.name,
                role: m.role,
            });
        }
        let mut ignore = Vec::with_capacity(file.ignore.len());
        for i in file.ignore {
            check_name(&i.name)?;
            ignore.push(IgnoreRule {
                pattern: compile(&i.name, &i.pattern)?,
                name: i.name,
                scope: i.scope,
                ends_block: i.ends_block,
            });
        }
        let mut flags = Vec::with_capacity(file.flag.len());
        for f in file.flag {
            check_name(&f.name)?;
            flags.push(FlagRule {
                pattern: compile(&f.name, &f.pattern)?,
                name: f.name,
                message: f.message,
            });
        }

        let rules = RuleSet {
            fence: compile("fence", &file.fence)?,
            skip_fence_langs: file.skip_fence_langs,
            open_scope: compile("open_scope", &file.open_scope)?,
            close_scope: compile("close_scope", &file.close_scope)?,
            declarations,
            metadata,
            ignore,
            flags,
        };
        rules.validate()?;
        Ok(rules)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.declarations.is_empty() {
            return Err(Error::Rules("at least one declaration pattern is required".into()));
        }
        if self.metadata.is_empty() {
            return Err(Error::Rules("at least one metadata pattern is required".into()));
        }
        Ok(())
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_RULES).expect("bundled rule set is valid")
    }
}
