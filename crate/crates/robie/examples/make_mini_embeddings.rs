//! Regenerate `data/mini/embeddings.emb1`: one-hot concept vectors with a
//! little seeded noise, so synonyms align and everything else stays apart.
//!
//! `cargo run -p robie --example make_mini_embeddings`

use std::collections::BTreeSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robie::formats::{self, corpus::SentenceRecord, embeddings::EmbeddingBundle};
use robie_core::restore::EmbeddingMatrix;
use robie_core::seed;

const SYNONYMS: &[&[&str]] = &[
    &["regulations", "rules"],
    &["deleted", "removed"],
    &["lap", "round"],
    &["could", "can"],
    &["wrote", "written"],
    &["gave", "given"],
];

const NOISE: f32 = 0.05;

fn concept(word: &str) -> String {
    let w = word.to_lowercase();
    SYNONYMS
        .iter()
        .find(|g| g.contains(&w.as_str()))
        .map_or(w, |g| g[0].to_string())
}

pub fn mini_bundle(records: &[SentenceRecord]) -> EmbeddingBundle {
    let vocab: Vec<String> = records
        .iter()
        .flat_map(|r| r.tokens().into_iter().map(concept))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut bundle = EmbeddingBundle::new();
    for r in records {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(0, "mini-embeddings", &r.id));
        let rows: Vec<Vec<f32>> = r
            .tokens()
            .into_iter()
            .map(|w| {
                let hot = vocab.binary_search(&concept(w)).expect("word in vocabulary");
                (0..vocab.len())
                    .map(|d| f32::from(u8::from(d == hot)) + rng.gen_range(-NOISE..NOISE))
                    .collect()
            })
            .collect();
        bundle
            .insert(EmbeddingMatrix::from_rows(r.id.clone(), &rows).expect("finite rows"))
            .expect("unique ids");
    }
    bundle
}

pub fn mini_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/mini"))
}

#[allow(dead_code)]
fn main() {
    let records = formats::load_corpus(&mini_dir().join("corpus.jsonl")).expect("mini corpus");
    let bytes = mini_bundle(&records).to_bytes().expect("bundle encodes");
    let out = mini_dir().join("embeddings.emb1");
    formats::write_atomic(&out, &bytes).expect("write embeddings");
    println!("{} ({} bytes)", out.display(), bytes.len());
}
