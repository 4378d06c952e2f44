//! Decreasing sequences of ordinals and finite prefix-closed trees of them.
//!
//! A [`DecSeq`] is a strictly decreasing finite sequence of [`Ordinal`]s; a
//! [`Tree`] is a finite non-empty set of such sequences closed under initial
//! segments. Trees keep their nodes in the canonical listing (length first,
//! then lexicographically), so printed output and search order are
//! reproducible.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::ordinal::{Ordinal, OrdinalError};
use crate::orders::{cmp_lex1, cmp_lex2};

/// Default cap on `n` for [`enum_ds`]; `enum_ds(n)` has 2^n nodes.
pub const ENUM_DS_DEFAULT_CAP: u32 = 20;

/// A strictly decreasing finite sequence of ordinals.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DecSeq {
    entries: Vec<Ordinal>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("sequence {seq} is not strictly decreasing at position {pos}")]
    NotDecreasing { seq: String, pos: usize },
    #[error("bad ordinal in sequence: {0}")]
    BadOrdinal(#[from] OrdinalError),
    #[error("a tree must contain at least the empty sequence")]
    EmptyTree,
    #[error("prefix {missing} of node {node} is missing")]
    MissingPrefix { node: DecSeq, missing: DecSeq },
    #[error("graft side condition fails: {eta} does not end above first entry of {offending}")]
    GraftSideCondition { eta: DecSeq, offending: DecSeq },
    #[error("cannot graft along the empty sequence")]
    GraftEmptyEta,
    #[error("ds({n}) exceeds the cap of 2^{cap} nodes")]
    EnumCapExceeded { n: u32, cap: u32 },
    #[error("sequences do not concatenate decreasingly: {left} then {right}")]
    BadConcat { left: DecSeq, right: DecSeq },
    #[error("tree file line {line}: {source}")]
    FileLine {
        line: usize,
        #[source]
        source: Box<TreeError>,
    },
}

impl DecSeq {
    pub fn empty() -> DecSeq {
        DecSeq {
            entries: Vec::new(),
        }
    }

    /// Validates strict descent.
    pub fn new(entries: Vec<Ordinal>) -> Result<DecSeq, TreeError> {
        for i in 1..entries.len() {
            if entries[i - 1] <= entries[i] {
                return Err(TreeError::NotDecreasing {
                    seq: format_entries(&entries),
                    pos: i,
                });
            }
        }
        Ok(DecSeq { entries })
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<Ordinal>) -> DecSeq {
        debug_assert!(entries.windows(2).all(|w| w[0] > w[1]));
        DecSeq { entries }
    }

    /// Convenience constructor from natural-number labels.
    pub fn from_nats(labels: &[u64]) -> Result<DecSeq, TreeError> {
        DecSeq::new(labels.iter().map(|&n| Ordinal::nat(n)).collect())
    }

    pub fn singleton(label: Ordinal) -> DecSeq {
        DecSeq {
            entries: vec![label],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Ordinal] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> Option<&Ordinal> {
        self.entries.get(i)
    }

    pub fn last(&self) -> Option<&Ordinal> {
        self.entries.last()
    }

    /// The initial segment of length `l` (η↾l).
    pub fn prefix(&self, l: usize) -> DecSeq {
        DecSeq {
            entries: self.entries[..l.min(self.entries.len())].to_vec(),
        }
    }

    pub fn parent(&self) -> Option<DecSeq> {
        if self.is_empty() {
            None
        } else {
            Some(self.prefix(self.len() - 1))
        }
    }

    /// η ⊴ ν: initial-segment relation, allowing equality.
    pub fn is_prefix_of(&self, other: &DecSeq) -> bool {
        self.len() <= other.len() && self.entries == other.entries[..self.len()]
    }

    /// η ◁ ν: proper initial segment.
    pub fn is_proper_prefix_of(&self, other: &DecSeq) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }

    /// η⌢⟨label⟩, checking that the result still decreases.
    pub fn child(&self, label: Ordinal) -> Result<DecSeq, TreeError> {
        let mut entries = self.entries.clone();
        entries.push(label);
        DecSeq::new(entries).map_err(|_| TreeError::BadConcat {
            left: self.clone(),
            right: DecSeq::singleton(self.entries.last().cloned().unwrap_or_default()),
        })
    }

    /// η⌢ν, checking the junction.
    pub fn concat(&self, other: &DecSeq) -> Result<DecSeq, TreeError> {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        DecSeq::new(entries).map_err(|_| TreeError::BadConcat {
            left: self.clone(),
            right: other.clone(),
        })
    }

    /// Parses the sequence syntax used by tree files: `-` for the empty
    /// sequence, otherwise comma-separated ordinal literals.
    pub fn parse(input: &str) -> Result<DecSeq, TreeError> {
        let trimmed = input.trim();
        if trimmed == "-" {
            return Ok(DecSeq::empty());
        }
        let entries = trimmed
            .split(',')
            .map(Ordinal::parse)
            .collect::<Result<Vec<_>, _>>()?;
        DecSeq::new(entries)
    }
}

fn format_entries(entries: &[Ordinal]) -> String {
    if entries.is_empty() {
        "-".to_string()
    } else {
        entries
            .iter()
            .map(|o| o.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for DecSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_entries(&self.entries))
    }
}

impl fmt::Debug for DecSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `Ord` on sequences is the standard lexicographic order with a proper
/// prefix coming first, which is exactly <¹ₗₓ.
impl Ord for DecSeq {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_lex1(self, other)
    }
}

impl PartialOrd for DecSeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The meet η∩ν: longest common prefix.
pub fn seq_meet(a: &DecSeq, b: &DecSeq) -> DecSeq {
    let l = a
        .entries
        .iter()
        .zip(b.entries.iter())
        .take_while(|(x, y)| x == y)
        .count();
    a.prefix(l)
}

/// Length of the meet, without building it.
pub fn meet_len(a: &DecSeq, b: &DecSeq) -> usize {
    a.entries
        .iter()
        .zip(b.entries.iter())
        .take_while(|(x, y)| x == y)
        .count()
}

/// Canonical node order: by length, then lexicographically (for equal
/// lengths <¹ₗₓ and <²ₗₓ agree).
pub fn canonical_cmp(a: &DecSeq, b: &DecSeq) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| cmp_lex1(a, b))
}

/// A finite prefix-closed set of decreasing sequences.
#[derive(Clone, PartialEq, Eq)]
pub struct Tree {
    nodes: Vec<DecSeq>,          // canonical order; index 0 is the root
    children: Vec<Vec<usize>>,   // ascending by label
    parent: Vec<Option<usize>>,
    lex2: Vec<usize>,            // node indices sorted by <²ₗₓ
    pos: HashMap<DecSeq, usize>,
}

impl Tree {
    /// Validates the tree invariants: non-empty, contains the empty
    /// sequence, closed under initial segments. Duplicates are merged.
    pub fn new(nodes: impl IntoIterator<Item = DecSeq>) -> Result<Tree, TreeError> {
        let mut nodes: Vec<DecSeq> = nodes.into_iter().collect();
        nodes.sort_by(canonical_cmp);
        nodes.dedup();
        if nodes.is_empty() {
            return Err(TreeError::EmptyTree);
        }
        let mut pos = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            pos.insert(n.clone(), i);
        }
        let mut children = vec![Vec::new(); nodes.len()];
        let mut parent = vec![None; nodes.len()];
        for (i, n) in nodes.iter().enumerate() {
            if let Some(p) = n.parent() {
                match pos.get(&p) {
                    Some(&pi) => {
                        parent[i] = Some(pi);
                        children[pi].push(i);
                    }
                    None => {
                        return Err(TreeError::MissingPrefix {
                            node: n.clone(),
                            missing: p,
                        })
                    }
                }
            }
            // index 0 must be the root: anything else of length 0 is equal
        }
        if !nodes[0].is_empty() {
            // no length-0 node at all: the shortest node's parent was found,
            // which is impossible, so this is unreachable unless nodes[0]
            // has length >= 1 and its parent chain is missing; the loop
            // above already reported that.
            unreachable!("canonical order puts the root first");
        }
        let mut lex2: Vec<usize> = (0..nodes.len()).collect();
        lex2.sort_by(|&a, &b| cmp_lex2(&nodes[a], &nodes[b]));
        Ok(Tree {
            nodes,
            children,
            parent,
            lex2,
            pos,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a valid tree always contains the root
    }

    /// Nodes in canonical (length, then lexicographic) order.
    pub fn nodes(&self) -> &[DecSeq] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &DecSeq {
        &self.nodes[i]
    }

    pub fn contains(&self, seq: &DecSeq) -> bool {
        self.pos.contains_key(seq)
    }

    pub fn index_of(&self, seq: &DecSeq) -> Option<usize> {
        self.pos.get(seq).copied()
    }

    /// Child indices of node `i`, ascending by last label.
    pub fn children_of(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn parent_of(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    /// Node indices sorted by <²ₗₓ.
    pub fn lex2_order(&self) -> &[usize] {
        &self.lex2
    }

    /// Nodes in <²ₗₓ order.
    pub fn nodes_lex2(&self) -> impl Iterator<Item = &DecSeq> {
        self.lex2.iter().map(|&i| &self.nodes[i])
    }

    pub fn depth(&self) -> usize {
        self.nodes.last().map_or(0, |n| n.len())
    }

    /// Parses the tree file format: one sequence per line, `-` for the
    /// empty sequence, `#` starts a comment line.
    pub fn parse_text(input: &str) -> Result<Tree, TreeError> {
        let mut nodes = Vec::new();
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let seq = DecSeq::parse(line).map_err(|e| TreeError::FileLine {
                line: lineno + 1,
                source: Box::new(e),
            })?;
            nodes.push(seq);
        }
        Tree::new(nodes)
    }

    /// Serialises in the tree file format, nodes in canonical order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            out.push_str(&n.to_string());
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree{{")?;
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}

/// The graft η⌢T: every prefix of η together with η prepended to every node
/// of `t`. Requires η non-empty and its last entry above the first entry of
/// every non-empty node of `t`, so all results are decreasing.
pub fn graft(eta: &DecSeq, t: &Tree) -> Result<Tree, TreeError> {
    if eta.is_empty() {
        return Err(TreeError::GraftEmptyEta);
    }
    let bound = eta.last().unwrap();
    for node in t.nodes() {
        if let Some(first) = node.get(0) {
            if first >= bound {
                return Err(TreeError::GraftSideCondition {
                    eta: eta.clone(),
                    offending: node.clone(),
                });
            }
        }
    }
    let mut nodes = Vec::with_capacity(eta.len() + t.len());
    for l in 0..eta.len() {
        nodes.push(eta.prefix(l));
    }
    for node in t.nodes() {
        let mut entries = eta.entries().to_vec();
        entries.extend(node.entries().iter().cloned());
        nodes.push(DecSeq::from_vec_unchecked(entries));
    }
    Tree::new(nodes)
}

/// ds(n) for finite n: all strictly decreasing sequences over {0,…,n−1}.
/// 2^n nodes, by the bijection with subsets of {0,…,n−1}.
pub fn enum_ds(n: u32) -> Result<Tree, TreeError> {
    enum_ds_capped(n, ENUM_DS_DEFAULT_CAP)
}

pub fn enum_ds_capped(n: u32, cap: u32) -> Result<Tree, TreeError> {
    if n > cap {
        return Err(TreeError::EnumCapExceeded { n, cap });
    }
    let mut nodes = Vec::with_capacity(1usize << n);
    for mask in 0u64..(1u64 << n) {
        let mut entries = Vec::with_capacity(mask.count_ones() as usize);
        for bit in (0..n as u64).rev() {
            if mask & (1 << bit) != 0 {
                entries.push(Ordinal::nat(bit));
            }
        }
        nodes.push(DecSeq::from_vec_unchecked(entries));
    }
    Tree::new(nodes)
}
