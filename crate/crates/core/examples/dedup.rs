//! Fuzzy near-duplicate removal with edit-distance similarity.

use kgsynth::postproc::{dedup, similarity, BenchmarkEntry};
use kgsynth::synth::GenMeta;
use kgsynth::{QuestionCodeTuple, SeedType};

fn tuple(question: &str, code: &str) -> QuestionCodeTuple {
    QuestionCodeTuple {
        question: question.into(),
        code: code.into(),
        api_nodes: vec!["util.ArrayList".into()],
        seed_type: SeedType::Single,
        gen_meta: GenMeta {
            model: "hand-written".into(),
            temperature: 0.0,
            question_prompt_hash: String::new(),
            code_prompt_hash: String::new(),
            bundle_index: 0,
            reuse_index: 0,
        },
    }
}

fn main() -> kgsynth::Result<()> {
    println!("similarity(kitten, sitting) = {:.3}", similarity("kitten", "sitting"));

    let tuples = vec![
        tuple("How do I sort an ArrayList of numbers?", "list.sort((a, b) => a - b);"),
        tuple("How do I sort an ArrayList of numbers ?", "list.sort((a, b) => a - b);"),
        tuple("How do I remove every element from an ArrayList?", "list.clear();"),
        tuple("Count the elements of an ArrayList.", "const n = list.length;"),
    ];
    let benchmark = vec![BenchmarkEntry {
        question: "Count the elements of an ArrayList!".into(),
        code: "const count = list.length;".into(),
    }];

    let (kept, removed, report) = dedup(tuples, &benchmark, 0.85, true)?;
    println!("kept {}, removed {}", kept.len(), removed.len());
    for p in &report.pairs {
        println!("  #{} duplicates #{} (question {:.2})", p.index_b, p.index_a, p.question_similarity);
    }
    for h in &report.benchmark_hits {
        println!("  #{} matches benchmark #{} (question {:.2})", h.index, h.benchmark_index, h.question_similarity);
    }
    Ok(())
}
