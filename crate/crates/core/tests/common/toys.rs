//! Seeded generators for small random instances.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use robie_core::restore::{EmbeddingMatrix, Extraction, Slot};
use robie_core::{ParseNode, ParseTree, TokenSpan};

pub const TOY_LABELS: [&str; 7] = ["NP", "QP", "NX", "VP", "S", "PP", "ADJP"];

/// Unit and blended directions; cosines between them are 0, 0.6, 0.8, 0.48 or 1.
const PALETTE: [[f32; 4]; 6] = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.6, 0.8, 0.0, 0.0],
    [0.0, 0.0, 0.8, 0.6],
];

fn node<R: Rng>(rng: &mut R, l: usize, r: usize, depth: usize) -> ParseNode {
    let label = *TOY_LABELS.choose(rng).unwrap();
    if r - l == 1 {
        return if depth < 5 && rng.gen_bool(0.35) {
            ParseNode::internal(label, vec![node(rng, l, r, depth + 1)])
        } else {
            ParseNode::leaf("NN", format!("w{l}"))
        };
    }
    let parts = rng.gen_range(2..=(r - l).min(3));
    let mut cuts = rand::seq::index::sample(rng, r - l - 1, parts - 1).into_vec();
    cuts.sort_unstable();
    let mut bounds = vec![l];
    bounds.extend(cuts.into_iter().map(|c| l + c + 1));
    bounds.push(r);
    let children = bounds
        .windows(2)
        .map(|w| node(rng, w[0], w[1], depth + 1))
        .collect();
    ParseNode::internal(label, children)
}

/// A random tree over `n >= 1` tokens.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> ParseTree {
    ParseTree::new(ParseNode::internal("ROOT", vec![node(rng, 0, n, 1)]))
}

pub fn random_rows<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<f32>> {
    (0..n).map(|_| PALETTE.choose(rng).unwrap().to_vec()).collect()
}

pub struct RestoreToy {
    pub src_rows: Vec<Vec<f32>>,
    pub tgt_rows: Vec<Vec<f32>>,
    pub tree: ParseTree,
    pub arg_spans: Vec<TokenSpan>,
}

impl RestoreToy {
    pub fn generate<R: Rng>(rng: &mut R) -> Self {
        let n_src = rng.gen_range(1..=8);
        let n_tgt = rng.gen_range(1..=8);
        let want = rng.gen_range(1..=3);
        let mut arg_spans: Vec<TokenSpan> = Vec::new();
        for _ in 0..20 {
            if arg_spans.len() == want {
                break;
            }
            let l = rng.gen_range(0..n_src);
            let r = rng.gen_range(l + 1..=n_src.min(l + 3));
            let span = TokenSpan::new(l, r);
            if arg_spans.iter().all(|s| !s.overlaps(&span)) {
                arg_spans.push(span);
            }
        }
        RestoreToy {
            src_rows: random_rows(rng, n_src),
            tgt_rows: random_rows(rng, n_tgt),
            tree: random_tree(rng, n_tgt),
            arg_spans,
        }
    }

    pub fn tuple(&self) -> Extraction {
        let args = self
            .arg_spans
            .iter()
            .map(|s| Slot::new(format!("a{}", s.l), Some(*s)))
            .collect();
        Extraction::new(Slot::new("p", None), args, 1.0)
    }

    pub fn embeddings(&self) -> (EmbeddingMatrix, EmbeddingMatrix) {
        (
            EmbeddingMatrix::from_rows("src", &self.src_rows).unwrap(),
            EmbeddingMatrix::from_rows("tgt", &self.tgt_rows).unwrap(),
        )
    }
}
