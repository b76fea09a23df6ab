//! `{placeholder}` prompt templates. `{{` and `}}` produce literal braces.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PLACEHOLDERS: [&str; 5] = ["framework", "api_entries", "question", "fine_grained_info", "constraints"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateName {
    QuestionGen,
    CodeGen,
}

impl TemplateName {
    pub fn as_str(self) -> &'static str {
        match self {
            TemplateName::QuestionGen => "question_gen",
            TemplateName::CodeGen => "code_gen",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub name: TemplateName,
    pub body: String,
}

enum Piece<'a> {
    Text(&'a str),
    Brace(char),
    Slot(&'a str),
}

fn pieces(body: &str) -> Vec<Piece<'_>> {
    let mut out = Vec::new();
    let bytes = body.as_bytes();
    let mut i = 0;
    let mut start = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'{' if bytes.get(i + 1) == Some(&b'{') => {
                out.push(Piece::Text(&body[start..i]));
                out.push(Piece::Brace('{'));
                i += 2;
                start = i;
            }
            b'}' if bytes.get(i + 1) == Some(&b'}') => {
                out.push(Piece::Text(&body[start..i]));
                out.push(Piece::Brace('}'));
                i += 2;
                start = i;
            }
            b'{' => {
                let close = body[i + 1..].find('}').map(|off| i + 1 + off);
                let name = close.map(|c| &body[i + 1..c]);
                match (close, name) {
                    (Some(c), Some(name))
                        if !name.is_empty()
                            && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') =>
                    {
                        out.push(Piece::Text(&body[start..i]));
                        out.push(Piece::Slot(name));
                        i = c + 1;
                        start = i;
                    }
                    _ => i += 1,
                }
            }
            _ => i += 1,
        }
    }
    out.push(Piece::Text(&body[start..]));
    out
}

impl PromptTemplate {
    pub fn new(name: TemplateName, body: impl Into<String>) -> Self {
        PromptTemplate {
            name,
            body: body.into(),
        }
    }

    pub fn placeholders(&self) -> Vec<&str> {
        pieces(&self.body)
            .into_iter()
            .filter_map(|p| match p {
                Piece::Slot(s) => Some(s),
                _ => None,
            })
            .collect()
    }

    pub fn render(&self, bindings: &BTreeMap<&str, String>) -> Result<String> {
        let mut out = String::with_capacity(self.body.len() * 2);
        for piece in pieces(&self.body) {
            match piece {
                Piece::Text(t) => out.push_str(t),
                Piece::Brace(c) => out.push(c),
                Piece::Slot(name) => match bindings.get(name) {
                    Some(v) => out.push_str(v),
                    None => {
                        return Err(Error::Template {
                            template: self.name.as_str().to_string(),
                            placeholder: name.to_string(),
                        })
                    }
                },
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Templates {
    pub question: PromptTemplate,
    pub code: PromptTemplate,
}

impl Default for Templates {
    fn default() -> Self {
        Templates {
            question: PromptTemplate::new(
                TemplateName::QuestionGen,
                include_str!("../../prompts/question_gen.txt"),
            ),
            code: PromptTemplate::new(TemplateName::CodeGen, include_str!("../../prompts/code_gen.txt")),
        }
    }
}

impl Templates {
    /// Read `question_gen.txt` and `code_gen.txt` from `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let read = |file: &str| {
            let path = dir.join(file);
            std::fs::read_to_string(&path).map_err(|e| Error::io(path, e))
        };
        let templates = Templates {
            question: PromptTemplate::new(TemplateName::QuestionGen, read("question_gen.txt")?),
            code: PromptTemplate::new(TemplateName::CodeGen, read("code_gen.txt")?),
        };
        for t in [&templates.question, &templates.code] {
            if let Some(bad) = t.placeholders().into_iter().find(|p| !PLACEHOLDERS.contains(p)) {
                return Err(Error::Template {
                    template: t.name.as_str().to_string(),
                    placeholder: bad.to_string(),
                });
            }
        }
        Ok(templates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bind(pairs: &[(&'static str, &str)]) -> BTreeMap<&'static str, String> {
        pairs.iter().map(|(k, v)| (*k, v.to_string())).collect()
    }

    #[test]
    fn renders_and_escapes() {
        let t = PromptTemplate::new(TemplateName::CodeGen, "fn {{ {question} }} in {framework}");
        let out = t.render(&bind(&[("question", "Q"), ("framework", "F")])).unwrap();
        assert_eq!(out, "fn { Q } in F");
    }

    #[test]
    fn unbound_placeholder_is_an_error() {
        let t = PromptTemplate::new(TemplateName::QuestionGen, "{framework} {constraints}");
        let err = t.render(&bind(&[("framework", "F")])).unwrap_err();
        assert!(matches!(err, Error::Template { ref placeholder, .. } if placeholder == "constraints"));
    }

    #[test]
    fn non_identifier_braces_pass_through() {
        let t = PromptTemplate::new(TemplateName::QuestionGen, "a {not a slot} {x");
        assert_eq!(t.render(&BTreeMap::new()).unwrap(), "a {not a slot} {x");
    }

    #[test]
    fn bundled_templates_use_known_placeholders() {
        let t = Templates::default();
        let q = t.question.placeholders();
        assert!(q.contains(&"api_entries") && q.contains(&"constraints"));
        let c = t.code.placeholders();
        assert!(c.contains(&"question") && c.contains(&"fine_grained_info"));
        for p in q.iter().chain(c.iter()) {
            assert!(PLACEHOLDERS.contains(p));
        }
    }

    #[test]
    fn load_dir_rejects_unknown_placeholder() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("question_gen.txt"), "{framework} {mystery}").unwrap();
        std::fs::write(dir.path().join("code_gen.txt"), "{question}").unwrap();
        assert!(Templates::load_dir(dir.path()).is_err());
    }
}
