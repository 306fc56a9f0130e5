//! Penn-Treebank style constituency trees.
//!
//! A tree is parsed from the usual bracketed notation. A preterminal such as
//! `(DT the)` is a single [`ParseNode`] carrying the token; pruned trees have
//! token-less terminals written `(NP )`.
//!
//! Depth is counted in edges from the root (the root sits at depth 0), so
//! [`ParseTree::prune`] at height 3 keeps the root plus three levels below
//! it and drops every token.

use alloc::collections::VecDeque;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use thiserror::Error;

/// Labels whose subtrees are treated as continuous phrase fragments.
pub const PHRASE_ROOTS: [&str; 3] = ["NP", "QP", "NX"];

/// Half-open interval `[l, r)` over a sentence's token indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenSpan {
    pub l: usize,
    pub r: usize,
}

impl TokenSpan {
    /// Panics when `l >= r`.
    pub fn new(l: usize, r: usize) -> Self {
        assert!(l < r, "empty token span [{l}, {r})");
        TokenSpan { l, r }
    }

    pub fn try_new(l: usize, r: usize) -> Option<Self> {
        (l < r).then_some(TokenSpan { l, r })
    }

    /// Convert an inclusive `(start, end)` pair.
    pub fn from_inclusive(start: usize, end: usize) -> Option<Self> {
        Self::try_new(start, end.checked_add(1)?)
    }

    pub fn len(&self) -> usize {
        self.r - self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l >= self.r
    }

    pub fn contains(&self, index: usize) -> bool {
        self.l <= index && index < self.r
    }

    pub fn covers(&self, other: &TokenSpan) -> bool {
        self.l <= other.l && other.r <= self.r
    }

    pub fn overlaps(&self, other: &TokenSpan) -> bool {
        self.l < other.r && other.l < self.r
    }

    /// Smallest span containing both.
    pub fn hull(&self, other: &TokenSpan) -> TokenSpan {
        TokenSpan {
            l: self.l.min(other.l),
            r: self.r.max(other.r),
        }
    }

    pub fn fits(&self, len: usize) -> bool {
        self.l < self.r && self.r <= len
    }

    pub fn indices(&self) -> Range<usize> {
        self.l..self.r
    }
}

impl fmt::Display for TokenSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.l, self.r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("empty input at byte {offset}")]
    EmptyInput { offset: usize },
    #[error("unbalanced parentheses at byte {offset}")]
    UnbalancedParens { offset: usize },
    #[error("empty label at byte {offset}")]
    EmptyLabel { offset: usize },
    #[error("unexpected token at byte {offset}")]
    UnexpectedToken { offset: usize },
    #[error("trailing input at byte {offset}")]
    TrailingInput { offset: usize },
    #[error("prune height must be at least 1")]
    HeightZero,
    #[error("leaf index {index} out of range for {len} tokens")]
    LeafIndexOutOfRange { index: usize, len: usize },
}

/// One labeled node. Token-bearing nodes are always childless.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseNode {
    label: String,
    children: Vec<ParseNode>,
    token: Option<String>,
    leaf_index: Option<usize>,
}

impl ParseNode {
    pub fn internal(label: impl Into<String>, children: Vec<ParseNode>) -> Self {
        ParseNode {
            label: label.into(),
            children,
            token: None,
            leaf_index: None,
        }
    }

    /// A terminal with no token, as produced by pruning.
    pub fn terminal(label: impl Into<String>) -> Self {
        Self::internal(label, Vec::new())
    }

    /// A preterminal carrying `token`.
    pub fn leaf(label: impl Into<String>, token: impl Into<String>) -> Self {
        ParseNode {
            label: label.into(),
            children: Vec::new(),
            token: Some(token.into()),
            leaf_index: None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn children(&self) -> &[ParseNode] {
        &self.children
    }

    pub fn token(&self) -> Option<&str> {
        self.token.as_deref()
    }

    pub fn leaf_index(&self) -> Option<usize> {
        self.leaf_index
    }

    pub fn is_terminal(&self) -> bool {
        self.children.is_empty()
    }

    /// Token span below this node, if it has any tokens.
    pub fn span(&self) -> Option<TokenSpan> {
        if let Some(i) = self.leaf_index {
            return Some(TokenSpan::new(i, i + 1));
        }
        self.children
            .iter()
            .filter_map(ParseNode::span)
            .reduce(|a, b| a.hull(&b))
    }

    fn number_leaves(&mut self, next: &mut usize) {
        if self.token.is_some() {
            self.leaf_index = Some(*next);
            *next += 1;
        } else {
            self.leaf_index = None;
            for child in &mut self.children {
                child.number_leaves(next);
            }
        }
    }

    fn pruned(&self, depth: usize, height: usize) -> ParseNode {
        if depth == height {
            return ParseNode::terminal(self.label.clone());
        }
        ParseNode::internal(
            self.label.clone(),
            self.children
                .iter()
                .map(|c| c.pruned(depth + 1, height))
                .collect(),
        )
    }

    fn max_depth(&self) -> usize {
        self.children
            .iter()
            .map(|c| c.max_depth() + 1)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for ParseNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.label)?;
        if let Some(token) = &self.token {
            write!(f, " {token}")?;
        } else if self.children.is_empty() {
            f.write_str(" ")?;
        } else {
            for child in &self.children {
                write!(f, " {child}")?;
            }
        }
        f.write_str(")")
    }
}

/// A rooted, ordered, labeled tree with tokens numbered left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    root: ParseNode,
    n_tokens: usize,
}

impl ParseTree {
    /// Build a tree, (re)assigning leaf indices left to right.
    pub fn new(mut root: ParseNode) -> Self {
        let mut n = 0;
        root.number_leaves(&mut n);
        ParseTree { root, n_tokens: n }
    }

    pub fn parse(text: &str) -> Result<Self, TreeError> {
        parse_bracketed(text)
    }

    pub fn root(&self) -> &ParseNode {
        &self.root
    }

    pub fn token_count(&self) -> usize {
        self.n_tokens
    }

    pub fn tokens(&self) -> Vec<&str> {
        let mut out = Vec::with_capacity(self.n_tokens);
        let mut stack = alloc::vec![&self.root];
        while let Some(node) = stack.pop() {
            if let Some(t) = node.token() {
                out.push(t);
            }
            stack.extend(node.children.iter().rev());
        }
        out
    }

    pub fn node_count(&self) -> usize {
        let mut count = 0;
        let mut stack = alloc::vec![&self.root];
        while let Some(node) = stack.pop() {
            count += 1;
            stack.extend(node.children.iter());
        }
        count
    }

    /// Largest node depth, root = 0.
    pub fn depth(&self) -> usize {
        self.root.max_depth()
    }

    /// Keep nodes at depth `<= height`; all tokens are dropped. The input
    /// tree is left untouched.
    pub fn prune(&self, height: usize) -> Result<ParseTree, TreeError> {
        if height == 0 {
            return Err(TreeError::HeightZero);
        }
        Ok(ParseTree::new(self.root.pruned(0, height)))
    }

    /// The same tree with every token removed.
    pub fn without_tokens(&self) -> ParseTree {
        ParseTree::new(self.root.pruned(0, usize::MAX))
    }

    /// Breadth-first, left-to-right node labels.
    pub fn level_order_labels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        queue.push_back(&self.root);
        while let Some(node) = queue.pop_front() {
            out.push(node.label.as_str());
            queue.extend(node.children.iter());
        }
        out
    }

    /// Span of the smallest subtree whose root label is in `allowed_roots`
    /// and which contains token `leaf_index`.
    ///
    /// The search is a post-order walk, so the first qualifying node found
    /// is the deepest qualifying ancestor of the token.
    pub fn covering_phrase_subtree(
        &self,
        leaf_index: usize,
        allowed_roots: &[&str],
    ) -> Result<Option<TokenSpan>, TreeError> {
        if leaf_index >= self.n_tokens {
            return Err(TreeError::LeafIndexOutOfRange {
                index: leaf_index,
                len: self.n_tokens,
            });
        }
        Ok(covering(&self.root, leaf_index, allowed_roots).1)
    }
}

// Returns (span of node, first qualifying span in post-order).
fn covering(
    node: &ParseNode,
    leaf: usize,
    allowed: &[&str],
) -> (Option<TokenSpan>, Option<TokenSpan>) {
    let mut span = node.leaf_index.map(|i| TokenSpan::new(i, i + 1));
    for child in &node.children {
        let (child_span, found) = covering(child, leaf, allowed);
        if found.is_some() {
            return (None, found);
        }
        span = match (span, child_span) {
            (Some(a), Some(b)) => Some(a.hull(&b)),
            (a, b) => a.or(b),
        };
    }
    let found = span.filter(|s| s.contains(leaf) && allowed.contains(&node.label.as_str()));
    (span, found)
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl FromStr for ParseTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_bracketed(s)
    }
}

struct Frame {
    label: String,
    children: Vec<ParseNode>,
    token: Option<String>,
}

fn is_delim(b: u8) -> bool {
    b == b'(' || b == b')' || b.is_ascii_whitespace()
}

/// Parse a bracketed tree such as `(S (NP (PRP he)) (VP (VBD left)))`.
pub fn parse_bracketed(text: &str) -> Result<ParseTree, TreeError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let read_word = |pos: &mut usize| {
        let start = *pos;
        while *pos < bytes.len() && !is_delim(bytes[*pos]) {
            *pos += 1;
        }
        &text[start..*pos]
    };

    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(TreeError::EmptyInput { offset: pos });
    }
    if bytes[pos] != b'(' {
        return Err(TreeError::UnexpectedToken { offset: pos });
    }

    let mut stack: Vec<Frame> = Vec::new();
    loop {
        skip_ws(&mut pos);
        if pos == bytes.len() {
            return Err(TreeError::UnbalancedParens { offset: pos });
        }
        match bytes[pos] {
            b'(' => {
                if stack.last().is_some_and(|f| f.token.is_some()) {
                    return Err(TreeError::UnexpectedToken { offset: pos });
                }
                pos += 1;
                let label_at = pos;
                let label = read_word(&mut pos);
                if label.is_empty() {
                    return Err(TreeError::EmptyLabel { offset: label_at });
                }
                stack.push(Frame {
                    label: label.to_string(),
                    children: Vec::new(),
                    token: None,
                });
            }
            b')' => {
                let frame = stack
                    .pop()
                    .ok_or(TreeError::UnbalancedParens { offset: pos })?;
                pos += 1;
                let node = ParseNode {
                    label: frame.label,
                    children: frame.children,
                    token: frame.token,
                    leaf_index: None,
                };
                match stack.last_mut() {
                    Some(parent) => parent.children.push(node),
                    None => {
                        skip_ws(&mut pos);
                        if pos < bytes.len() {
                            return Err(TreeError::TrailingInput { offset: pos });
                        }
                        return Ok(ParseTree::new(node));
                    }
                }
            }
            _ => {
                let at = pos;
                let word = read_word(&mut pos);
                // `stack` is non-empty here: the first byte was '(' and an
                // empty stack returns above.
                let frame = stack.last_mut().expect("open frame");
                if frame.token.is_some() || !frame.children.is_empty() {
                    return Err(TreeError::UnexpectedToken { offset: at });
                }
                frame.token = Some(word.to_string());
            }
        }
    }
}
