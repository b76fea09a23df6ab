//! Deterministic offline generator. Output depends only on the seed, the
//! prompt and the temperature, so mock runs are reproducible.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GeneratorClient, TARGETS_PREFIX};
use crate::error::Result;
use crate::llm::content_hash;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MockMode {
    /// Varied questions and code that name every target API.
    Normal,
    /// Text that never names an API, so validation always fails.
    NoApiNames,
    /// The same answer for every prompt (dedup stress).
    Constant(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MockGenerator {
    pub seed: u64,
    pub mode: MockMode,
}

impl MockGenerator {
    pub fn new(seed: u64) -> Self {
        MockGenerator {
            seed,
            mode: MockMode::Normal,
        }
    }

    pub fn with_mode(seed: u64, mode: MockMode) -> Self {
        MockGenerator { seed, mode }
    }
}

const OPENERS: &[&str] = &[
    "How can I",
    "Write code that shows how to",
    "Implement a feature that needs to",
    "Show a way to",
    "Build a small module that must",
    "Create a helper that should",
    "Design a routine to",
    "Explain with code how to",
    "Develop a utility to",
    "Put together a page that has to",
];
const TASKS: &[&str] = &[
    "cache user preferences",
    "paginate a long list of records",
    "track download progress",
    "merge two sorted collections",
    "validate a signup form",
    "schedule a periodic sync",
    "render a filtered product grid",
    "persist session state across restarts",
    "batch outgoing network requests",
    "deduplicate incoming events",
    "compute running statistics over sensor data",
    "animate a card flip",
    "export a report as text",
    "restore a draft after a crash",
    "group contacts by initial letter",
    "throttle rapid button taps",
];
const DOMAINS: &[&str] = &[
    "weather", "fitness", "banking", "chat", "recipe", "music", "travel", "library", "parking", "clinic",
    "school", "inventory", "photo", "news", "calendar", "game",
];
const DETAILS: &[&str] = &[
    "the data arrives out of order",
    "the screen rotates mid-operation",
    "entries may contain duplicates",
    "the user can cancel at any time",
    "memory on the device is tight",
    "results must stay sorted by date",
    "some fields are optional",
    "the list can hold ten thousand items",
    "updates come from a background task",
    "input strings can be empty",
    "timestamps use milliseconds",
    "the app must work offline",
];
const VERBS: &[&str] = &[
    "build", "load", "sync", "merge", "collect", "refresh", "index", "render", "track", "store", "filter", "apply",
];
const NOUNS: &[&str] = &[
    "Cache", "Report", "Queue", "Snapshot", "Session", "Grid", "Batch", "Summary", "Ledger", "Feed", "Digest",
    "Window",
];
const TYPES: &[&str] = &["number", "string", "boolean", "Array<number>", "Array<string>", "Record<string, number>"];
const LIMITS: &[&str] = &[
    "keep at most {n} entries",
    "finish within {n} milliseconds",
    "retry up to {n} times",
    "refresh every {n} seconds",
    "show {n} items per page",
    "store no more than {n} kilobytes",
    "batch {n} updates at a time",
    "expire entries after {n} minutes",
];
const STATEMENTS: &[&str] = &[
    "const {v} = Date.now() - {n};",
    "let {v} = {n};",
    "const {v} = new Set<string>();",
    "if ({v} === undefined) {{ throw new Error('missing {w}'); }}",
    "const {v}: string[] = ['{w}', '{w}'];",
    "let {v} = {n} * {n};",
    "console.info(`{w} ${{{v}}}`);",
    "const {v} = Math.max({n}, Math.floor({n} / 2));",
    "for (let i = 0; i < {n}; i++) {{ {v} += i; }}",
    "const {v} = String('{w}').trim().toUpperCase();",
    "while ({v} < {n}) {{ {v}++; }}",
    "const {v} = [{n}, {n}, {n}].filter((x) => x > {n});",
    "const {v} = new Map<string, number>([['{w}', {n}]]);",
    "await new Promise((r) => setTimeout(r, {n}));",
];

fn targets(prompt: &str) -> Vec<String> {
    prompt
        .lines()
        .find_map(|l| l.trim().strip_prefix(TARGETS_PREFIX))
        .map(|rest| {
            rest.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        })
        .unwrap_or_default()
}

fn pick<'a>(rng: &mut ChaCha8Rng, list: &[&'a str]) -> &'a str {
    list.choose(rng).expect("non-empty list")
}

fn tag(rng: &mut ChaCha8Rng) -> String {
    format!("{:08x}", rng.random::<u32>())
}

/// Fill `{n}` (number), `{v}` (identifier) and `{w}` (word) slots.
fn fill(rng: &mut ChaCha8Rng, template: &str, var: &str) -> String {
    let mut out = String::new();
    let mut rest = template;
    while let Some(i) = rest.find('{') {
        out.push_str(&rest[..i].replace("}}", "}"));
        let slot = &rest[i..];
        if let Some(tail) = slot.strip_prefix("{{") {
            out.push('{');
            rest = tail;
        } else if let Some(tail) = slot.strip_prefix("{n}") {
            out.push_str(&rng.random_range(2..5000).to_string());
            rest = tail;
        } else if let Some(tail) = slot.strip_prefix("{v}") {
            out.push_str(var);
            rest = tail;
        } else if let Some(tail) = slot.strip_prefix("{w}") {
            out.push_str(pick(rng, DOMAINS));
            out.push_str(&tag(rng)[..4]);
            rest = tail;
        } else {
            out.push('{');
            rest = &slot[1..];
        }
    }
    out.push_str(&rest.replace("}}", "}"));
    out
}

fn question(rng: &mut ChaCha8Rng, names: &[String]) -> String {
    let apis = match names.len() {
        0 => "the platform APIs".to_string(),
        1 => names[0].clone(),
        _ => format!("{} together with {}", names[..names.len() - 1].join(", "), names[names.len() - 1]),
    };
    let template = pick(rng, LIMITS);
    let limit = fill(rng, template, "");
    format!(
        "{} use {} to {} in a {} app? Assume {} and {}; also {}. Input: {}, output: {} (ticket {}).",
        pick(rng, OPENERS),
        apis,
        pick(rng, TASKS),
        pick(rng, DOMAINS),
        pick(rng, DETAILS),
        pick(rng, DETAILS),
        limit,
        pick(rng, TYPES),
        pick(rng, TYPES),
        tag(rng),
    )
}

fn code(rng: &mut ChaCha8Rng, names: &[String]) -> String {
    let func = format!("{}{}{}", pick(rng, VERBS), pick(rng, NOUNS), &tag(rng)[..6]);
    let mut body = Vec::new();
    let mut refs = Vec::new();
    for name in names {
        let v = format!("{}{}", pick(rng, VERBS), &tag(rng)[..4]);
        body.push(format!("  const {v}: unknown = {name};"));
        refs.push(v);
    }
    let n = rng.random_range(4..=7);
    for _ in 0..n {
        let var = format!("{}_{}", pick(rng, NOUNS).to_lowercase(), &tag(rng)[..5]);
        let template = pick(rng, STATEMENTS);
        let stmt = fill(rng, template, &var);
        body.push(format!("  {stmt}"));
    }
    body.push(format!("  console.info(`{func}`, {});", refs.join(", ")));
    format!(
        "```ts\nimport {{ {} }} from '@kit.{}Kit';\n\nexport async function {func}(input: {}): Promise<{}> {{\n{}\n  return input as never;\n}}\n```",
        names.join(", "),
        pick(rng, NOUNS),
        pick(rng, TYPES),
        pick(rng, TYPES),
        body.join("\n"),
    )
}

impl GeneratorClient for MockGenerator {
    fn model_id(&self) -> String {
        format!("mock-{}", self.seed)
    }

    fn complete(&self, prompt: &str, temperature: f64, _max_tokens: u32) -> Result<String> {
        let key = content_hash(&[&self.seed.to_string(), prompt, &format!("{temperature:.3}")]);
        let seed = u64::from_str_radix(&key[..16], 16).expect("hex");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let is_code = prompt.lines().any(|l| l.trim() == "Question:");
        Ok(match &self.mode {
            MockMode::Constant(text) => text.clone(),
            MockMode::NoApiNames if is_code => "```ts\nconsole.info('hello');\n```".to_string(),
            MockMode::NoApiNames => "Write a program that prints a greeting.".to_string(),
            MockMode::Normal if is_code => code(&mut rng, &targets(prompt)),
            MockMode::Normal => question(&mut rng, &targets(prompt)),
        })
    }
}
