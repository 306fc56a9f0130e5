//! Tab-separated text formats. Blank lines and lines starting with `#` are
//! skipped everywhere.

use std::collections::BTreeMap;

use robie_core::carbscore::SentenceTuples;
use robie_core::restore::{Extraction, LemmaTable};
use robie_core::syndist::ParsePairTable;

/// A problem on one line; `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub msg: String,
}

impl LineError {
    fn new(line: usize, msg: impl Into<String>) -> Self {
        LineError { line, msg: msg.into() }
    }
}

fn rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i + 1, l.split('\t').map(str::trim).collect()))
}

/// `source<TAB>target<TAB>count`.
pub fn parse_pair_table(text: &str) -> Result<ParsePairTable, LineError> {
    let mut table = ParsePairTable::new();
    for (line, cols) in rows(text) {
        let [src, tgt, count] = cols[..] else {
            return Err(LineError::new(line, format!("expected 3 columns, got {}", cols.len())));
        };
        let count: u64 = count
            .parse()
            .map_err(|_| LineError::new(line, format!("bad count {count:?}")))?;
        table
            .insert(src, tgt, count)
            .map_err(|e| LineError::new(line, e.to_string()))?;
    }
    Ok(table)
}

pub fn write_pair_table(table: &ParsePairTable) -> String {
    table
        .iter()
        .map(|(s, t, c)| format!("{s}\t{t}\t{c}\n"))
        .collect()
}

/// Tuples grouped by sentence, in order of first appearance.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TupleSet {
    pub sentences: Vec<String>,
    pub tuples: BTreeMap<String, Vec<Extraction>>,
}

impl TupleSet {
    pub fn push(&mut self, sentence: &str, tuple: Extraction) {
        let key = sentence.split_whitespace().collect::<Vec<_>>().join(" ");
        if !self.tuples.contains_key(&key) {
            self.sentences.push(key.clone());
        }
        self.tuples.entry(key).or_default().push(tuple);
    }

    pub fn get(&self, sentence: &str) -> &[Extraction] {
        let key = sentence.split_whitespace().collect::<Vec<_>>().join(" ");
        self.tuples.get(&key).map_or(&[], Vec::as_slice)
    }

    /// Pair each gold sentence with its predictions. Predictions for
    /// sentences without gold tuples are not scored.
    pub fn align(golds: &TupleSet, preds: &TupleSet) -> Vec<SentenceTuples> {
        golds
            .sentences
            .iter()
            .map(|s| SentenceTuples {
                golds: golds.get(s).to_vec(),
                preds: preds.get(s).to_vec(),
            })
            .collect()
    }
}

fn args_of(cols: &[&str]) -> Vec<String> {
    let mut args: Vec<String> = cols.iter().map(|a| a.to_string()).collect();
    while args.len() > 1 && args.last().is_some_and(|a| a.is_empty()) {
        args.pop();
    }
    args
}

/// `sentence<TAB>relation<TAB>arg1[<TAB>arg2 ...]`.
pub fn parse_gold(text: &str) -> Result<TupleSet, LineError> {
    let mut set = TupleSet::default();
    for (line, cols) in rows(text) {
        if cols.len() < 3 {
            return Err(LineError::new(line, "expected sentence, relation and at least one argument"));
        }
        set.push(cols[0], Extraction::from_texts(cols[1].to_string(), args_of(&cols[2..]), 1.0));
    }
    Ok(set)
}

/// `sentence<TAB>confidence<TAB>relation<TAB>arg1[<TAB>arg2 ...]`.
pub fn parse_predictions(text: &str) -> Result<TupleSet, LineError> {
    let mut set = TupleSet::default();
    for (line, cols) in rows(text) {
        if cols.len() < 4 {
            return Err(LineError::new(line, "expected sentence, confidence, relation and an argument"));
        }
        let conf: f64 = cols[1]
            .parse()
            .ok()
            .filter(|c: &f64| c.is_finite())
            .ok_or_else(|| LineError::new(line, format!("bad confidence {:?}", cols[1])))?;
        set.push(cols[0], Extraction::from_texts(cols[2].to_string(), args_of(&cols[3..]), conf));
    }
    Ok(set)
}

pub fn write_predictions(set: &TupleSet) -> String {
    let mut out = String::new();
    for s in &set.sentences {
        for t in set.get(s) {
            out.push_str(&format!("{s}\t{}\t{}", t.confidence, t.predicate.text));
            for a in &t.args {
                out.push('\t');
                out.push_str(&a.text);
            }
            out.push('\n');
        }
    }
    out
}

/// `word<TAB>lemma`.
pub fn parse_lemmas(text: &str) -> Result<LemmaTable, LineError> {
    let mut table = LemmaTable::new();
    for (line, cols) in rows(text) {
        let [word, lemma] = cols[..] else {
            return Err(LineError::new(line, "expected word and lemma"));
        };
        table.insert(word, lemma);
    }
    Ok(table)
}

/// `request line number<TAB>predicate`; numbers are 1-based.
pub fn parse_replies(text: &str) -> Result<BTreeMap<usize, String>, LineError> {
    let mut out = BTreeMap::new();
    for (line, cols) in rows(text) {
        let [n, pred] = cols[..] else {
            return Err(LineError::new(line, "expected request number and predicate"));
        };
        let n: usize = n
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| LineError::new(line, format!("bad request number {n:?}")))?;
        if out.insert(n, pred.to_string()).is_some() {
            return Err(LineError::new(line, format!("request {n} answered twice")));
        }
    }
    Ok(out)
}
