//! Data-parallel variants of core routines. Results equal the sequential
//! versions exactly.

use rayon::prelude::*;
use robie_core::syndist::{sequence_distance, syntax_signature, DistanceMatrix, DistanceParams, SyndistError};
use robie_core::ParseTree;

pub fn distance_matrix(corpus: &[ParseTree], params: &DistanceParams) -> Result<DistanceMatrix, SyndistError> {
    if corpus.is_empty() {
        return Err(SyndistError::EmptyCorpus);
    }
    let signatures = corpus
        .par_iter()
        .map(|t| syntax_signature(t, params.prune_height()))
        .collect::<Result<Vec<_>, _>>()?;
    let n = signatures.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..n)
                .map(|j| sequence_distance(&signatures[i], &signatures[j], params.discount()))
                .collect()
        })
        .collect();
    let mut data = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (off, &d) in row.iter().enumerate() {
            let j = i + 1 + off;
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix::from_row_major(n, data).expect("n * n entries"))
}
