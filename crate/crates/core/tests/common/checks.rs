//! Seeded end-to-end checks shared by the per-module tests and the
//! acceptance runner. Each returns a one-line summary or a failure reason.
#![allow(dead_code)]

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robie_core::carbscore::{
    build_match_table, corpus_pr_curve, score_at_threshold, PrCurve, PrPoint, SentenceTuples,
};
use robie_core::cluster::cluster_by_distance;
use robie_core::restore::{
    complete_spans, importance_scores, mask_count, mask_indices, mask_tokens, merge_threshold_spans,
    restore_arguments, EmbeddingMatrix, Extraction, Provenance, RestoreError, RestoreOptions,
    ScoredSpan, Slot,
};
use robie_core::syndist::{sample_target_parses, sequence_distance, DistanceMatrix, ParsePairTable};
use robie_core::treebank::PHRASE_ROOTS;
use robie_core::{ParseTree, TokenSpan};

use super::oracles::{
    best_assignments, hw_oracle, inclusion_probabilities, profile_oracle, slot_candidates,
};
use super::toys::{random_tree, RestoreToy};

pub type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < limit, || format!("{what} took {elapsed:?}, limit {limit:?}"))
}

pub const PRUNED_ROWS: &str = include_str!("../fixtures/pruned_rows.tsv");

fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn hw_oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let labels: Vec<String> = (0..12).map(|i| format!("L{i}")).collect();
    let seq = |rng: &mut ChaCha8Rng| -> Vec<&str> {
        let n = rng.gen_range(2..=10);
        (0..n).map(|_| labels[rng.gen_range(0..12)].as_str()).collect()
    };
    for case in 0..1000 {
        let a = seq(&mut rng);
        let b = seq(&mut rng);
        let got = sequence_distance(&a, &b, 0.9);
        let want = hw_oracle(&a, &b, 0.9);
        ensure(got == want, || format!("case {case}: {got} != oracle {want} for {a:?} / {b:?}"))?;
        ensure(got == sequence_distance(&b, &a, 0.9), || format!("case {case}: asymmetric"))?;
        ensure((0.0..=1.0).contains(&got), || format!("case {case}: {got} outside [0, 1]"))?;
        ensure(sequence_distance(&a, &a, 0.9) == 0.0, || format!("case {case}: d(a, a) != 0"))?;
    }
    within(start.elapsed(), Duration::from_secs(5), "1000 pairs")?;
    Ok(format!("1000 pairs match the oracle in {:?}", start.elapsed()))
}

pub fn pruning_fidelity() -> Check {
    let mut rows = 0;
    for (line, row) in PRUNED_ROWS.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let (full, expected) = row
            .split_once('\t')
            .ok_or_else(|| format!("fixture line {line}: no tab"))?;
        let tree = ParseTree::parse(full).map_err(|e| format!("fixture line {line}: {e}"))?;
        let got = tree.prune(3).map_err(|e| e.to_string())?.to_string();
        ensure(got == normalize_ws(expected), || {
            format!("fixture line {line}: got {got}, want {expected}")
        })?;
        rows += 1;
    }
    ensure(rows >= 6, || format!("only {rows} rows"))?;
    Ok(format!("{rows} rows reproduced byte-for-byte"))
}

fn restore_case(toy: &RestoreToy, complete: bool) -> Result<(), String> {
    let (src, tgt) = toy.embeddings();
    let opts = RestoreOptions {
        complete,
        ..RestoreOptions::default()
    };
    let got = restore_arguments(&toy.tuple(), &src, &tgt, &toy.tree, &opts);
    let tree = complete.then_some(&toy.tree);
    let slots: Vec<Vec<(TokenSpan, f64)>> = toy
        .arg_spans
        .iter()
        .map(|&span| {
            let profile = profile_oracle(&toy.src_rows, &toy.tgt_rows, span);
            slot_candidates(&profile, 0.7, tree, &PHRASE_ROOTS)
        })
        .collect();
    if let Some(slot) = slots.iter().position(Vec::is_empty) {
        return match got {
            Err(RestoreError::NoCandidates { slot: s }) if s == slot => Ok(()),
            other => Err(format!("slot {slot} has no candidates, got {other:?}")),
        };
    }
    match (got, best_assignments(&slots)) {
        (Err(RestoreError::NoFeasibleSelection), None) => Ok(()),
        (Ok(restored), Some((total, optima))) => {
            let spans = restored.arg_spans();
            let sum: f64 = restored.args.iter().map(|a| a.score).sum();
            ensure(sum == total, || format!("total {sum} != oracle {total}"))?;
            ensure(optima.contains(&spans), || format!("{spans:?} not among {optima:?}"))?;
            for (i, a) in spans.iter().enumerate() {
                ensure(spans[..i].iter().all(|b| !a.overlaps(b)), || {
                    format!("overlapping output {spans:?}")
                })?;
            }
            Ok(())
        }
        (got, want) => Err(format!("got {got:?}, oracle {want:?}")),
    }
}

pub fn restore_oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut solved = 0;
    for case in 0..500 {
        let toy = RestoreToy::generate(&mut rng);
        for complete in [false, true] {
            restore_case(&toy, complete).map_err(|e| format!("case {case} complete={complete}: {e}"))?;
        }
        let (src, tgt) = toy.embeddings();
        if restore_arguments(&toy.tuple(), &src, &tgt, &toy.tree, &RestoreOptions::default()).is_ok() {
            solved += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(10), "500 instances")?;
    Ok(format!(
        "500 instances match the oracle ({solved} with a feasible selection) in {:?}",
        start.elapsed()
    ))
}

/// 'they gave him the name of the planet'; the first 'the' is embedded away
/// from the source's 'the'.
pub fn planet_construction() -> (Extraction, EmbeddingMatrix, EmbeddingMatrix, ParseTree) {
    let tree = ParseTree::parse(
        "(ROOT (S (NP (PRP they)) (VP (VBD gave) (NP (PRP him)) \
         (NP (NP (DT the) (NN name)) (PP (IN of) (NP (DT the) (NN planet)))))))",
    )
    .unwrap();
    let hot = |ids: &[usize]| -> Vec<Vec<f32>> {
        ids.iter()
            .map(|&h| (0..8).map(|d| if d == h { 1.0 } else { 0.0 }).collect())
            .collect()
    };
    // source: 'name of the planet'
    let src = EmbeddingMatrix::from_rows("src", &hot(&[0, 1, 2, 3])).unwrap();
    let tgt = EmbeddingMatrix::from_rows("tgt", &hot(&[4, 5, 6, 7, 0, 1, 2, 3])).unwrap();
    let tuple = Extraction::new(
        Slot::new("gave", None),
        vec![Slot::new("name of the planet", Some(TokenSpan::new(0, 4)))],
        1.0,
    );
    (tuple, src, tgt, tree)
}

pub fn tree_walk_completion() -> Check {
    let (tuple, src, tgt, tree) = planet_construction();
    let tokens = tree.tokens();
    let text = |s: TokenSpan| tokens[s.l..s.r].join(" ");
    let plain = RestoreOptions {
        complete: false,
        ..RestoreOptions::default()
    };
    let sim = restore_arguments(&tuple, &src, &tgt, &tree, &plain).map_err(|e| e.to_string())?;
    let full = restore_arguments(&tuple, &src, &tgt, &tree, &RestoreOptions::default())
        .map_err(|e| e.to_string())?;
    let (s, f) = (sim.args[0].span, full.args[0].span);
    ensure(text(s) == "name of the planet", || format!("similarity path gave {:?}", text(s)))?;
    ensure(text(f) == "the name of the planet", || format!("completed path gave {:?}", text(f)))?;
    ensure(
        full.args[0].provenance == Provenance::TreeCompleted { origin: s },
        || format!("provenance {:?}", full.args[0].provenance),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut cases = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=10);
        let tree = random_tree(&mut rng, n);
        let profile: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let runs = merge_threshold_spans(&profile, 0.5);
        let done = complete_spans(&tree, &runs, &PHRASE_ROOTS).map_err(|e| e.to_string())?;
        for d in &done {
            let origin = d.similarity_span();
            ensure(runs.iter().any(|r| r.span == origin), || format!("unknown origin {origin}"))?;
            ensure(d.span.covers(&origin), || format!("{} shrank {}", d.span, origin))?;
        }
        ensure(runs.iter().all(|r| done.iter().any(|d| d.span.covers(&r.span))), || {
            "a run was lost".to_string()
        })?;
        cases += runs.len();
    }
    Ok(format!("planet NP recovered; {cases} random runs never shrink"))
}

fn ex(pred: &str, args: &[&str], conf: f64) -> Extraction {
    Extraction::from_texts(pred.to_string(), args.iter().map(|a| a.to_string()), conf)
}

fn random_extraction(rng: &mut ChaCha8Rng) -> Extraction {
    const WORDS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
    let phrase = |rng: &mut ChaCha8Rng| {
        let n = rng.gen_range(1..=3);
        (0..n).map(|_| WORDS[rng.gen_range(0..6)]).collect::<Vec<_>>().join(" ")
    };
    let pred = phrase(rng);
    let args: Vec<String> = (0..rng.gen_range(1..=3)).map(|_| phrase(rng)).collect();
    Extraction::from_texts(pred, args, rng.gen_range(0..5) as f64 / 4.0)
}

pub fn scorer_sanity() -> Check {
    let golds = vec![
        ex("found", &["the Colonials", "Earth"], 1.0),
        ex("searched for", &["the Colonials", "a new world"], 1.0),
        ex("is", &["Earth", "a planet"], 1.0),
    ];
    let preds: Vec<Extraction> = golds
        .iter()
        .enumerate()
        .map(|(i, g)| Extraction { confidence: 0.5 + 0.1 * i as f64, ..g.clone() })
        .collect();
    let perfect = corpus_pr_curve(&[SentenceTuples { golds: golds.clone(), preds }])
        .map_err(|e| e.to_string())?;
    ensure(perfect.auc == 1.0 && perfect.optimal_f1 == 1.0 && perfect.last_f1 == 1.0, || {
        format!("perfect predictions gave {perfect:?}")
    })?;

    let curve = PrCurve::from_points(vec![
        PrPoint { threshold: 0.9, precision: 0.8, recall: 0.5 },
        PrPoint { threshold: 0.1, precision: 0.4, recall: 1.0 },
    ]);
    // trapezoids from (0, 0.8): 0.5 * 0.8 + 0.5 * (0.8 + 0.4) / 2
    ensure((curve.auc - 0.70).abs() < 1e-9, || format!("2-point AUC {}", curve.auc))?;
    // best of 0.8 / 1.3 and 0.8 / 1.4
    ensure((curve.optimal_f1 - 0.615).abs() < 1e-3, || format!("2-point OptF1 {}", curve.optimal_f1))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    for case in 0..200 {
        let g: Vec<Extraction> = (0..rng.gen_range(1..=4)).map(|_| random_extraction(&mut rng)).collect();
        let p: Vec<Extraction> = (0..rng.gen_range(0..=6)).map(|_| random_extraction(&mut rng)).collect();
        let table = build_match_table(&g, &p);
        let mut thresholds: Vec<f64> = p.iter().map(|x| x.confidence).collect();
        thresholds.sort_by(|a, b| b.total_cmp(a));
        thresholds.dedup();
        let mut last = 0.0;
        for t in thresholds {
            let (_, r) = score_at_threshold(&table, &p, t);
            ensure(r >= last, || format!("case {case}: recall fell {last} -> {r} at {t}"))?;
            last = r;
        }
        let curve = corpus_pr_curve(&[SentenceTuples { golds: g, preds: p }]).map_err(|e| e.to_string())?;
        for w in curve.points.windows(2) {
            ensure(w[1].recall >= w[0].recall, || format!("case {case}: curve recall fell"))?;
        }
    }
    Ok("perfect = 1/1/1, 2-point AUC 0.70 and OptF1 0.615, recall monotone on 200 cases".to_string())
}

fn chi_square(observed: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = observed.iter().sum();
    observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * n as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum()
}

/// Tolerances are absolute, in probability units.
pub fn sampling_distributions() -> Check {
    const DRAWS: u64 = 100_000;
    let mut table = ParsePairTable::new();
    table.insert("(S )", "(A )", 3).unwrap();
    table.insert("(S )", "(B )", 1).unwrap();
    table.insert("(T )", "(A )", 2).unwrap();
    table.insert("(T )", "(B )", 1).unwrap();
    table.insert("(T )", "(C )", 1).unwrap();

    let mut a_first = 0u64;
    let mut incl = [0u64; 3];
    let mut first = [0u64; 3];
    let target_index = |t: &str| match t {
        "(A )" => 0,
        "(B )" => 1,
        _ => 2,
    };
    for seed in 0..DRAWS {
        let one = sample_target_parses(&["(S )"], &table, 1, seed).unwrap();
        a_first += u64::from(one[0] == "(A )");
        let single = sample_target_parses(&["(T )"], &table, 1, seed).unwrap();
        first[target_index(&single[0])] += 1;
        for t in sample_target_parses(&["(T )"], &table, 2, seed).unwrap() {
            incl[target_index(&t)] += 1;
        }
    }
    let p_a = a_first as f64 / DRAWS as f64;
    ensure((p_a - 0.75).abs() <= 0.01, || format!("P(A) = {p_a}, want 0.75"))?;
    let closed = inclusion_probabilities(&[2.0, 1.0, 1.0], 2);
    for (i, &want) in closed.iter().enumerate() {
        let got = incl[i] as f64 / DRAWS as f64;
        ensure((got - want).abs() <= 0.01, || format!("inclusion {i}: {got}, want {want}"))?;
    }
    let chi2 = chi_square(&first, &[0.5, 0.25, 0.25]);
    // 2 degrees of freedom at 0.01 significance
    ensure(chi2 < 9.210, || format!("single-draw chi-square {chi2}"))?;

    let importances = [0.5, 1.0];
    let mut first = 0u64;
    for seed in 0..DRAWS {
        first += u64::from(mask_indices(&importances, 0.5, seed).unwrap() == [0]);
    }
    let got = first as f64 / DRAWS as f64;
    ensure((got - 2.0 / 3.0).abs() <= 0.01, || format!("P(mask 0) = {got}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let imp: Vec<f64> = (0..20).map(|_| rng.gen_range(0.2..2.0)).collect();
    for (label, imp) in [("uniform", vec![1.0; 20]), ("random", imp)] {
        let weights: Vec<f64> = imp.iter().map(|v| 1.0 / v).collect();
        let closed = inclusion_probabilities(&weights, mask_count(20, 0.15));
        let mut counts = [0u64; 20];
        for seed in 0..DRAWS {
            for i in mask_indices(&imp, 0.15, seed).unwrap() {
                counts[i] += 1;
            }
        }
        for (i, &want) in closed.iter().enumerate() {
            let got = counts[i] as f64 / DRAWS as f64;
            ensure((got - want).abs() <= 0.02, || {
                format!("N=20 {label} position {i}: {got}, want {want}")
            })?;
        }
    }

    for n in 0..=100usize {
        let want = (0.15 * n as f64).round() as usize;
        let got = mask_indices(&vec![1.0; n], 0.15, n as u64).unwrap().len();
        ensure(got == want, || format!("N={n}: {got} masks, want {want}"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut confined = 0;
    while confined < 200 {
        let toy = RestoreToy::generate(&mut rng);
        let (src, tgt) = toy.embeddings();
        let Ok(restored) = restore_arguments(&toy.tuple(), &src, &tgt, &toy.tree, &RestoreOptions::default())
        else {
            continue;
        };
        let imp = importance_scores(&restored.args, &restored.profiles).map_err(|e| e.to_string())?;
        let spans: Vec<TokenSpan> = restored.arg_spans();
        for i in mask_tokens(&imp, 0.5, confined as u64).map_err(|e| e.to_string())? {
            ensure(spans.iter().any(|s| s.contains(i)), || format!("mask {i} outside {spans:?}"))?;
        }
        confined += 1;
    }
    Ok(format!(
        "P(A) = {p_a:.4}, P(mask low importance) = {got:.4}, N=20 inclusion within 0.02 absolute, masks confined"
    ))
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DistanceMatrix {
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..i {
            let d = rng.gen_range(0.0..1.0);
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    DistanceMatrix::from_row_major(n, data).unwrap()
}

/// Six points: {0, 1, 2} and {3, 4, 5}, far apart.
pub fn two_blob_matrix() -> DistanceMatrix {
    let pos = [0.0, 0.1, 0.25, 5.0, 5.2, 5.3];
    let data = pos
        .iter()
        .flat_map(|a| pos.iter().map(move |b| f64::abs(a - b) / 10.0))
        .collect();
    DistanceMatrix::from_row_major(6, data).unwrap()
}

/// Cheapest partition over every choice of `k` medoids.
pub fn exhaustive_partition(m: &DistanceMatrix, k: usize) -> Vec<Vec<usize>> {
    let n = m.len();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let medoids: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let cost: f64 = (0..n)
            .map(|p| medoids.iter().map(|&q| m.get(p, q)).fold(f64::INFINITY, f64::min))
            .sum();
        if best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((cost, medoids));
        }
    }
    let medoids = best.unwrap().1;
    let mut groups = vec![Vec::new(); k];
    for p in 0..n {
        let c = (0..k)
            .min_by(|&a, &b| m.get(p, medoids[a]).total_cmp(&m.get(p, medoids[b])))
            .unwrap();
        groups[c].push(p);
    }
    groups.sort();
    groups
}

pub fn clustering() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut max_iters = 0;
    for case in 0..100 {
        let n = rng.gen_range(2..=30);
        let k = rng.gen_range(1..=n.min(6));
        let m = random_matrix(&mut rng, n);
        let c = cluster_by_distance(&m, k, 300, case).map_err(|e| e.to_string())?;
        for w in c.cost_history.windows(2) {
            ensure(w[1] <= w[0], || format!("case {case}: cost rose {} -> {}", w[0], w[1]))?;
        }
        ensure(c.iterations <= 300 && c.converged, || format!("case {case}: no convergence"))?;
        max_iters = max_iters.max(c.iterations);
    }
    let m = two_blob_matrix();
    let want = exhaustive_partition(&m, 2);
    ensure(want == vec![vec![0, 1, 2], vec![3, 4, 5]], || format!("oracle gave {want:?}"))?;
    for seed in 0..50 {
        let c = cluster_by_distance(&m, 2, 300, seed).map_err(|e| e.to_string())?;
        let mut groups: Vec<Vec<usize>> = (0..2).map(|g| c.members(g).collect()).collect();
        groups.sort();
        ensure(groups == want, || format!("seed {seed}: {groups:?}"))?;
    }
    Ok(format!(
        "cost monotone on 100 matrices (max {max_iters} iterations); two blobs recovered for 50 seeds"
    ))
}

pub fn scored(l: usize, r: usize, score: f64) -> ScoredSpan {
    ScoredSpan {
        span: TokenSpan::new(l, r),
        score,
        provenance: Provenance::Similarity,
    }
}
