#![allow(dead_code)]

use std::path::{Path, PathBuf};

use kgsynth::pipeline::{GeneratorKind, PipelineConfig, ProviderKind, QuotaConfig};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Offline config over the fixture corpus writing into `out_dir`.
pub fn mock_config(out_dir: &Path, single: usize, multi: usize) -> PipelineConfig {
    PipelineConfig {
        corpus_root: fixtures().join("corpus"),
        out_dir: out_dir.to_path_buf(),
        provider: ProviderKind::Mock,
        generator: GeneratorKind::Mock,
        quotas: QuotaConfig { single, multi },
        ..Default::default()
    }
}

/// Textbook O(nm) edit distance over chars.
pub fn dp_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
