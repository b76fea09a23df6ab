use super::rules::{MetadataRole, RuleSet, Scope};
use super::{CodeInfoRecord, Diagnostic, KindHint, Parameter, RawDocFile, Returns, TextInfoRecord};
use crate::error::Result;

/// How a single input line was accounted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineClass {
    /// Declaration line that produced a code record.
    Code,
    /// Metadata line that contributed to a text record.
    Text,
    /// Matched an ignore rule, or structural (fences, scope closers).
    Ignored,
    /// Flagged and reported in the diagnostics list.
    Diagnostic,
}

#[derive(Debug, Clone, Default)]
pub struct Extraction {
    pub code_info: Vec<CodeInfoRecord>,
    pub text_info: Vec<TextInfoRecord>,
    pub diagnostics: Vec<Diagnostic>,
    /// One entry per input line.
    pub line_classes: Vec<LineClass>,
}

impl Extraction {
    /// (consumed by records, flagged, ignored); sums to the file's line count.
    pub fn accounting(&self) -> (usize, usize, usize) {
        let mut consumed = 0;
        let mut flagged = 0;
        let mut ignored = 0;
        for class in &self.line_classes {
            match class {
                LineClass::Code | LineClass::Text => consumed += 1,
                LineClass::Diagnostic => flagged += 1,
                LineClass::Ignored => ignored += 1,
            }
        }
        (consumed, flagged, ignored)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Table {
    None,
    ParamsHeader,
    Params,
    ReturnsHeader,
    Returns,
}

#[derive(Debug, Default)]
struct TextBlock {
    lines: Vec<usize>,
    description: Vec<String>,
    parameters: Vec<Parameter>,
    params_malformed: bool,
    returns: Option<Returns>,
    since: Option<String>,
    deprecated: bool,
}

impl TextBlock {
    fn into_record(self, source_id: &str, attached_to: usize) -> TextInfoRecord {
        TextInfoRecord {
            source_id: source_id.to_string(),
            attached_to,
            description: self.description.join(" "),
            parameters: if self.params_malformed {
                Vec::new()
            } else {
                self.parameters
            },
            returns: self.returns,
            since_version: self.since,
            deprecated: self.deprecated,
        }
    }
}

enum Fence {
    Outside,
    Code,
    Skipped,
}

struct Extractor<'a> {
    file: &'a RawDocFile,
    rules: &'a RuleSet,
    out: Extraction,
    scopes: Vec<KindHint>,
    fence: Fence,
    fence_line: usize,
    table: Table,
    block: Option<TextBlock>,
    /// Blocks seen before the first declaration of the file.
    preamble: Vec<TextBlock>,
}

/// Split table cells on unescaped pipes, trimming each cell.
fn table_cells(line: &str) -> Vec<String> {
    let inner = line.trim();
    let inner = inner.strip_prefix('|').unwrap_or(inner);
    let inner = inner.strip_suffix('|').unwrap_or(inner);
    let mut cells = Vec::new();
    let mut cur = String::new();
    let mut chars = inner.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\\' if chars.peek() == Some(&'|') => {
                cur.push('|');
                chars.next();
            }
            '|' => cells.push(std::mem::take(&mut cur).trim().to_string()),
            _ => cur.push(c),
        }
    }
    cells.push(cur.trim().to_string());
    cells
}

fn strip_code_ticks(s: &str) -> String {
    s.trim().trim_matches('`').trim().to_string()
}

impl<'a> Extractor<'a> {
    fn new(file: &'a RawDocFile, rules: &'a RuleSet) -> Self {
        Extractor {
            file,
            rules,
            out: Extraction {
                line_classes: vec![LineClass::Ignored; file.lines.len()],
                ..Default::default()
            },
            scopes: Vec::new(),
            fence: Fence::Outside,
            fence_line: 0,
            table: Table::None,
            block: None,
            preamble: Vec::new(),
        }
    }

    fn diag(&mut self, idx: usize, message: impl Into<String>) {
        self.out.diagnostics.push(Diagnostic {
            path: self.file.source_id.clone(),
            line: idx + 1,
            message: message.into(),
        });
    }

    fn flag(&mut self, idx: usize, message: impl Into<String>) {
        self.out.line_classes[idx] = LineClass::Diagnostic;
        self.diag(idx, message);
    }

    fn block_mut(&mut self, idx: usize) -> &mut TextBlock {
        let block = self.block.get_or_insert_with(TextBlock::default);
        block.lines.push(idx);
        self.out.line_classes[idx] = LineClass::Text;
        block
    }

    fn close_block(&mut self) {
        self.table = Table::None;
        let Some(block) = self.block.take() else {
            return;
        };
        match self.out.code_info.last() {
            Some(rec) => {
                let ordinal = rec.ordinal;
                let record = block.into_record(&self.file.source_id, ordinal);
                self.out.text_info.push(record);
            }
            None => self.preamble.push(block),
        }
    }

    fn run(mut self) -> Extraction {
        for &idx in &self.file.replaced_lines {
            self.diag(idx, "undecodable bytes replaced with U+FFFD");
        }
        for idx in 0..self.file.lines.len() {
            let line = self.file.lines[idx].as_str();
            if let Some(caps) = self.rules.fence.captures(line) {
                match self.fence {
                    Fence::Outside => {
                        self.close_block();
                        let lang = caps.name("lang").map(|m| m.as_str()).unwrap_or("");
                        let skip = self.rules.skip_fence_langs.iter().any(|l| l == lang);
                        self.fence = if skip { Fence::Skipped } else { Fence::Code };
                        self.fence_line = idx;
                    }
                    _ => self.fence = Fence::Outside,
                }
                continue;
            }
            match self.fence {
                Fence::Skipped => {}
                Fence::Code => self.code_line(idx, line),
                Fence::Outside => self.text_line(idx, line),
            }
        }
        if !matches!(self.fence, Fence::Outside) {
            let at = self.fence_line;
            self.diag(at, "code block is never closed");
        }
        self.close_block();
        if !self.scopes.is_empty() && !self.file.lines.is_empty() {
            let last = self.file.lines.len() - 1;
            let open = self.scopes.len();
            self.diag(last, format!("{open} scope(s) still open at end of file"));
        }
        // Metadata with no declaration anywhere in the file documents nothing.
        for block in std::mem::take(&mut self.preamble) {
            for idx in block.lines {
                self.out.line_classes[idx] = LineClass::Ignored;
            }
        }
        self.out.diagnostics.sort_by_key(|d| d.line);
        self.out
    }

    fn code_line(&mut self, idx: usize, line: &str) {
        if self.rules.close_scope.is_match(line) {
            if self.scopes.pop().is_none() {
                self.flag(idx, "closing brace without an open scope");
            }
            return;
        }
        if self
            .rules
            .ignore
            .iter()
            .any(|r| r.scope != Scope::Text && r.pattern.is_match(line))
        {
            return;
        }
        let innermost = self.scopes.last().copied();
        for rule in &self.rules.declarations {
            if !rule.inside.is_empty() && !innermost.is_some_and(|k| rule.inside.contains(&k)) {
                continue;
            }
            let Some(caps) = rule.pattern.captures(line) else {
                continue;
            };
            let kind = rule
                .kind
                .unwrap_or_else(|| caps.name("kind").map_or(KindHint::Unknown, |m| KindHint::parse(m.as_str())));
            let ordinal = self.out.code_info.len();
            self.out.code_info.push(CodeInfoRecord {
                source_id: self.file.source_id.clone(),
                declaration_text: line.trim().to_string(),
                kind_hint: kind,
                nesting_depth: self.scopes.len(),
                ordinal,
            });
            self.out.line_classes[idx] = LineClass::Code;
            if self.rules.open_scope.is_match(line) {
                self.scopes.push(kind);
            }
            if ordinal == 0 {
                for block in std::mem::take(&mut self.preamble) {
                    let record = block.into_record(&self.file.source_id, 0);
                    self.out.text_info.push(record);
                }
            }
            return;
        }
        self.flag(idx, format!("unrecognized line in code block: `{}`", line.trim()));
    }

    fn text_line(&mut self, idx: usize, line: &str) {
        if let Some(rule) = self
            .rules
            .ignore
            .iter()
            .find(|r| r.scope != Scope::Code && r.pattern.is_match(line))
        {
            if rule.ends_block {
                self.close_block();
            } else {
                self.table = Table::None;
            }
            return;
        }
        if let Some(rule) = self.rules.flags.iter().find(|r| r.pattern.is_match(line)) {
            let message = rule.message.clone();
            self.flag(idx, message);
            return;
        }
        let Some(rule) = self.rules.metadata.iter().find(|r| r.pattern.is_match(line)) else {
            return;
        };
        let role = rule.role;
        let version = match role {
            MetadataRole::Since => rule
                .pattern
                .captures(line)
                .and_then(|c| c.name("version").map(|m| m.as_str().to_string())),
            _ => None,
        };
        match role {
            MetadataRole::Description => {
                self.table = Table::None;
                let text = line.trim().trim_start_matches('>').trim().to_string();
                self.block_mut(idx).description.push(text);
            }
            MetadataRole::Since => {
                let version = version.unwrap_or_else(|| line.trim().to_string());
                self.block_mut(idx).since = Some(version);
            }
            MetadataRole::Deprecated => self.block_mut(idx).deprecated = true,
            MetadataRole::ParamsHeader => {
                self.block_mut(idx);
                self.table = Table::ParamsHeader;
            }
            MetadataRole::ReturnsHeader => {
                self.block_mut(idx);
                self.table = Table::ReturnsHeader;
            }
            MetadataRole::TableSeparator => match self.table {
                Table::ParamsHeader => {
                    self.block_mut(idx);
                    self.table = Table::Params;
                }
                Table::ReturnsHeader => {
                    self.block_mut(idx);
                    self.table = Table::Returns;
                }
                _ => self.flag(idx, "table separator without a header"),
            },
            MetadataRole::TableRow => self.table_row(idx, line),
        }
    }

    fn table_row(&mut self, idx: usize, line: &str) {
        let cells = table_cells(line);
        match self.table {
            Table::Params | Table::ParamsHeader => {
                if cells.len() != 3 || cells[0].is_empty() {
                    self.block_mut(idx).params_malformed = true;
                    self.flag(
                        idx,
                        format!("malformed parameter row: expected 3 cells, found {}", cells.len()),
                    );
                    return;
                }
                let name = strip_code_ticks(&cells[0]);
                let block = self.block_mut(idx);
                if block.parameters.iter().any(|p| p.name == name) {
                    block.params_malformed = true;
                    self.flag(idx, format!("duplicate parameter `{name}`"));
                    return;
                }
                block.parameters.push(Parameter {
                    name,
                    type_text: strip_code_ticks(&cells[1]),
                    description: cells[2].clone(),
                });
            }
            Table::Returns | Table::ReturnsHeader => {
                if cells.len() != 2 {
                    self.flag(
                        idx,
                        format!("malformed returns row: expected 2 cells, found {}", cells.len()),
                    );
                    return;
                }
                if self.block.as_ref().is_some_and(|b| b.returns.is_some()) {
                    self.flag(idx, "more than one returns row");
                    return;
                }
                self.block_mut(idx).returns = Some(Returns {
                    type_text: strip_code_ticks(&cells[0]),
                    description: cells[1].clone(),
                });
            }
            Table::None => self.flag(idx, "table row outside a parameter or returns table"),
        }
    }
}

pub fn extract_records(file: &RawDocFile, rules: &RuleSet) -> Result<Extraction> {
    rules.validate()?;
    Ok(Extractor::new(file, rules).run())
}
