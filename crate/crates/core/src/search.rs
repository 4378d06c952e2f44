//! Embedding enumeration, end-uniform copy search, exhaustive partition
//! verification, and the colouring reduction.
//!
//! An embedding of a pattern tree into a host tree preserves node length,
//! the prefix relation, and the order of sibling successors. Enumeration is
//! canonical: pattern nodes are processed in (length, <²ₗₓ) order and
//! candidate images tried in the same order, so "the first embedding" and
//! "the first counterexample" are well defined and reproducible across runs
//! and thread counts.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::orders::cmp_star;
use crate::similarity::{
    check_n_end_uniform_classes, enum_tuples, sim_code, ClassRegistry, Colouring,
    ConstraintClass, SimilarityError, Tuple,
};
use crate::tree::{canonical_cmp, DecSeq, Tree, TreeError};

/// A level-, prefix-, and sibling-order-preserving injective map between
/// trees, stored as pairs sorted by the canonical order of the domain.
#[derive(Clone, PartialEq, Eq)]
pub struct Embedding {
    pairs: Vec<(DecSeq, DecSeq)>,
}

impl Embedding {
    pub fn from_pairs(mut pairs: Vec<(DecSeq, DecSeq)>) -> Embedding {
        pairs.sort_by(|a, b| canonical_cmp(&a.0, &b.0));
        pairs.dedup();
        Embedding { pairs }
    }

    pub fn image_of(&self, node: &DecSeq) -> Option<&DecSeq> {
        self.pairs
            .binary_search_by(|(d, _)| canonical_cmp(d, node))
            .ok()
            .map(|i| &self.pairs[i].1)
    }

    pub fn pairs(&self) -> &[(DecSeq, DecSeq)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn image_nodes(&self) -> Vec<DecSeq> {
        self.pairs.iter().map(|(_, i)| i.clone()).collect()
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (d, i) in &self.pairs {
            writeln!(f, "{d} -> {i}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Embedding({} pairs)", self.pairs.len())
    }
}

/// Why a map fails to be an embedding; the first violated clause in
/// canonical node order.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbeddingViolation {
    #[error("pattern node {node} has no image")]
    NotTotal { node: DecSeq },
    #[error("image {image} of {node} is outside the host tree")]
    ImageOutside { node: DecSeq, image: DecSeq },
    #[error("level not preserved: {node} (length {}) maps to {image} (length {})", .node.len(), .image.len())]
    LevelChanged { node: DecSeq, image: DecSeq },
    #[error("prefix relation broken: {parent} maps to {parent_image}, not the parent of {child_image}")]
    PrefixBroken {
        parent: DecSeq,
        parent_image: DecSeq,
        child_image: DecSeq,
    },
    #[error("sibling order broken: images {first_image} and {second_image} of {first} and {second} are not <*-increasing")]
    SiblingOrder {
        first: DecSeq,
        second: DecSeq,
        first_image: DecSeq,
        second_image: DecSeq,
    },
    #[error("not injective: {first} and {second} share the image {image}")]
    NotInjective {
        first: DecSeq,
        second: DecSeq,
        image: DecSeq,
    },
}

/// Checks that `f` embeds `s` into `t`: total on `s`, image inside `t`,
/// levels and prefixes preserved, and for consecutive sibling successors the
/// images <*-increase (which settles the whole order).
pub fn validate_embedding(
    f: &Embedding,
    s: &Tree,
    t: &Tree,
) -> Result<(), EmbeddingViolation> {
    let mut images: HashMap<&DecSeq, &DecSeq> = HashMap::with_capacity(s.len());
    for node in s.nodes() {
        let Some(image) = f.image_of(node) else {
            return Err(EmbeddingViolation::NotTotal { node: node.clone() });
        };
        if !t.contains(image) {
            return Err(EmbeddingViolation::ImageOutside {
                node: node.clone(),
                image: image.clone(),
            });
        }
        if image.len() != node.len() {
            return Err(EmbeddingViolation::LevelChanged {
                node: node.clone(),
                image: image.clone(),
            });
        }
        if let Some(prev) = images.insert(image, node) {
            return Err(EmbeddingViolation::NotInjective {
                first: prev.clone(),
                second: node.clone(),
                image: image.clone(),
            });
        }
    }
    for (i, node) in s.nodes().iter().enumerate() {
        if let Some(pi) = s.parent_of(i) {
            let parent = s.node(pi);
            let parent_image = f.image_of(parent).unwrap();
            let image = f.image_of(node).unwrap();
            if !parent_image.is_proper_prefix_of(image) || parent_image.len() + 1 != image.len() {
                return Err(EmbeddingViolation::PrefixBroken {
                    parent: parent.clone(),
                    parent_image: parent_image.clone(),
                    child_image: image.clone(),
                });
            }
        }
    }
    for i in 0..s.len() {
        let kids = s.children_of(i);
        for w in kids.windows(2) {
            let (a, b) = (s.node(w[0]), s.node(w[1]));
            let (fa, fb) = (f.image_of(a).unwrap(), f.image_of(b).unwrap());
            if cmp_star(fa, fb) != Some(Ordering::Less) {
                return Err(EmbeddingViolation::SiblingOrder {
                    first: a.clone(),
                    second: b.clone(),
                    first_image: fa.clone(),
                    second_image: fb.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Resource limits for searches. Budgets abort loudly; there is no
/// sampling fallback.
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub max_pattern_nodes: usize,
    pub max_tree_nodes: usize,
    /// Candidate-extension steps allowed while enumerating embeddings.
    pub node_budget: u64,
    /// Total colourings allowed in exhaustive verification.
    pub colouring_budget: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_pattern_nodes: 64,
            max_tree_nodes: 4096,
            node_budget: 10_000_000,
            colouring_budget: 1 << 24,
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("pattern has {size} nodes, over the cap of {cap}")]
    PatternTooLarge { size: usize, cap: usize },
    #[error("host tree has {size} nodes, over the cap of {cap}")]
    TreeTooLarge { size: usize, cap: usize },
    #[error("node budget of {budget} steps exhausted before the search finished")]
    NodeBudgetExhausted { budget: u64 },
    #[error("{needed} colourings needed, over the budget of {budget}")]
    ColouringBudgetExceeded { needed: u128, budget: u64 },
    #[error("colouring is not end-uniform: {first} and {second} extend [{base}] into the same class with colours {first_colour} and {second_colour}")]
    NotEndUniform {
        base: Tuple,
        first: DecSeq,
        second: DecSeq,
        first_colour: u64,
        second_colour: u64,
    },
    #[error("class index {index} outside the registry universe of {universe}")]
    UnknownClassIndex { index: usize, universe: usize },
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Streams every embedding of `s` into `t` exactly once, in canonical
/// order. Budget exhaustion is reported as an explicit item, distinct from
/// the stream simply ending.
pub fn enum_embeddings<'a>(
    s: &'a Tree,
    t: &'a Tree,
    limits: &SearchLimits,
) -> Result<EmbeddingIter<'a>, SearchError> {
    if s.len() > limits.max_pattern_nodes {
        return Err(SearchError::PatternTooLarge {
            size: s.len(),
            cap: limits.max_pattern_nodes,
        });
    }
    if t.len() > limits.max_tree_nodes {
        return Err(SearchError::TreeTooLarge {
            size: t.len(),
            cap: limits.max_tree_nodes,
        });
    }
    Ok(EmbeddingIter::new(s, t, limits.node_budget))
}

pub struct EmbeddingIter<'a> {
    s: &'a Tree,
    t: &'a Tree,
    // for each pattern node index >= 1: (parent index, previous sibling index)
    plan: Vec<(usize, Option<usize>)>,
    assignment: Vec<usize>,
    cursors: Vec<usize>,
    depth: usize, // next pattern position to fill; 0 = root handled
    state: IterState,
    steps: u64,
    budget: u64,
}

enum IterState {
    Fresh,
    Running,
    Done,
}

impl<'a> EmbeddingIter<'a> {
    fn new(s: &'a Tree, t: &'a Tree, budget: u64) -> EmbeddingIter<'a> {
        let plan = (1..s.len())
            .map(|i| {
                let p = s.parent_of(i).expect("non-root has a parent");
                let prev = s.children_of(p).iter().copied().filter(|&c| c < i).max();
                (p, prev)
            })
            .collect();
        EmbeddingIter {
            s,
            t,
            plan,
            assignment: vec![0; s.len()],
            cursors: vec![0; s.len()],
            depth: 1,
            state: IterState::Fresh,
            steps: 0,
            budget,
        }
    }

    fn emit(&self) -> Embedding {
        let pairs = (0..self.s.len())
            .map(|i| (self.s.node(i).clone(), self.t.node(self.assignment[i]).clone()))
            .collect();
        Embedding::from_pairs(pairs)
    }

    // Candidates for pattern position i: children of the assigned parent
    // image whose label exceeds the previous sibling's image label. They
    // come ascending, so the cursor walks them in canonical order.
    fn candidates(&self, i: usize) -> &[usize] {
        let (parent, _) = self.plan[i - 1];
        self.t.children_of(self.assignment[parent])
    }

    fn admissible(&self, i: usize, cand: usize) -> bool {
        let (_, prev) = self.plan[i - 1];
        match prev {
            None => true,
            Some(ps) => {
                let prev_image = self.t.node(self.assignment[ps]);
                let cand_node = self.t.node(cand);
                cand_node.last().unwrap() > prev_image.last().unwrap()
            }
        }
    }
}

impl Iterator for EmbeddingIter<'_> {
    type Item = Result<Embedding, SearchError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.state {
            IterState::Done => return None,
            IterState::Fresh => {
                self.state = IterState::Running;
                // the root is forced
                if self.s.len() == 1 {
                    self.state = IterState::Done;
                    return Some(Ok(self.emit()));
                }
            }
            IterState::Running => {
                // resume by advancing the deepest position
                self.depth = self.s.len() - 1;
                self.cursors[self.depth] += 1;
            }
        }
        loop {
            if self.depth == 0 {
                self.state = IterState::Done;
                return None;
            }
            self.steps += 1;
            if self.steps > self.budget {
                self.state = IterState::Done;
                return Some(Err(SearchError::NodeBudgetExhausted {
                    budget: self.budget,
                }));
            }
            let i = self.depth;
            let cursor = self.cursors[i];
            let cands = self.candidates(i);
            match cands.get(cursor) {
                None => {
                    // exhausted: backtrack
                    self.cursors[i] = 0;
                    self.depth -= 1;
                    if self.depth >= 1 {
                        self.cursors[self.depth] += 1;
                    }
                }
                Some(&cand) => {
                    if self.admissible(i, cand) {
                        self.assignment[i] = cand;
                        if i + 1 == self.s.len() {
                            return Some(Ok(self.emit()));
                        }
                        self.depth += 1;
                    } else {
                        self.cursors[i] += 1;
                    }
                }
            }
        }
    }
}

/// A certified end-uniform copy: the embedding found, the uniformity degree
/// checked, and the constraint classes the checker examined.
#[derive(Clone, Debug)]
pub struct Witness {
    pub embedding: Embedding,
    pub uniformity_n: usize,
    pub certificate: Vec<ConstraintClass>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.embedding)?;
        writeln!(
            f,
            "end-uniform n={} classes={}",
            self.uniformity_n,
            self.certificate.len()
        )
    }
}

/// Finds the first embedding of `s` into `t` (canonical order) whose image
/// is n-end-uniform for `c` restricted to image tuples. `Ok(None)` means no
/// copy exists; budget exhaustion is an error, never a silent `None`.
pub fn find_n_end_uniform_copy(
    t: &Tree,
    s: &Tree,
    c: &Colouring,
    n: usize,
    limits: &SearchLimits,
) -> Result<Option<Witness>, SearchError> {
    for emb in enum_embeddings(s, t, limits)? {
        let emb = emb?;
        let image = Tree::new(emb.image_nodes())?;
        let (outcome, classes) = check_n_end_uniform_classes(&image, c, n)?;
        if outcome.is_uniform() {
            return Ok(Some(Witness {
                embedding: emb,
                uniformity_n: n,
                certificate: classes,
            }));
        }
    }
    Ok(None)
}

/// Report of an exhaustive partition check.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub holds: bool,
    pub counterexample: Option<Colouring>,
    /// Colourings examined in canonical order: all of them when the claim
    /// holds, otherwise the index of the counterexample plus one. This is
    /// independent of the thread count.
    pub colourings_checked: u64,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.holds {
            writeln!(f, "holds colourings={}", self.colourings_checked)
        } else {
            writeln!(f, "fails colourings={}", self.colourings_checked)?;
            match &self.counterexample {
                Some(c) => write!(f, "{c}"),
                None => Ok(()),
            }
        }
    }
}

/// Checks every total μ-colouring of the arity-sized tuples of `t` for an
/// n-end-uniform copy of `s`. Exhaustive: colourings are enumerated as
/// base-μ digit strings over the canonical tuple list, and the report
/// returns the lexicographically first failing colouring, re-verified.
pub fn verify_partition_exhaustive(
    t: &Tree,
    s: &Tree,
    mu: u64,
    arity: usize,
    n: usize,
    limits: &SearchLimits,
) -> Result<VerifyReport, SearchError> {
    assert!(mu >= 1, "mu must be positive");
    assert!(arity >= 1, "arity must be positive");
    assert!(n >= 1, "n must be positive");
    let tuples = enum_tuples(t, arity);
    let needed: u128 = (mu as u128)
        .checked_pow(tuples.len() as u32)
        .unwrap_or(u128::MAX);
    if needed > limits.colouring_budget as u128 {
        return Err(SearchError::ColouringBudgetExceeded {
            needed,
            budget: limits.colouring_budget,
        });
    }
    let total = needed as u64;
    let colouring_at = |index: u64| -> Colouring {
        let mut c = Colouring::new(mu, [arity]);
        let mut rest = index;
        // big-endian digits over the canonical tuple order
        for (j, tuple) in tuples.iter().enumerate() {
            let place = total / mu.pow(j as u32 + 1);
            let digit = (rest / place) % mu;
            rest %= place;
            c.set(tuple.clone(), digit).expect("digit below mu");
        }
        c
    };
    let fails = |index: u64| -> Result<bool, SearchError> {
        let c = colouring_at(index);
        Ok(find_n_end_uniform_copy(t, s, &c, n, limits)?.is_none())
    };
    let first_bad: Option<u64> = (0..total as usize)
        .into_par_iter()
        .with_min_len(64)
        .find_first(|&i| fails(i as u64).unwrap_or(true))
        .map(|i| i as u64);
    match first_bad {
        None => Ok(VerifyReport {
            holds: true,
            counterexample: None,
            colourings_checked: total,
        }),
        Some(i) => {
            // re-verify sequentially; this also surfaces any error hidden
            // by the parallel predicate
            let c = colouring_at(i);
            let confirmed = find_n_end_uniform_copy(t, s, &c, n, limits)?;
            debug_assert!(confirmed.is_none(), "counterexample must re-verify");
            Ok(VerifyReport {
                holds: false,
                counterexample: Some(c),
                colourings_checked: i + 1,
            })
        }
    }
}

/// The transformed colouring d: for each tuple, the partial map sending a
/// similarity-class index m to the colour every one-point extension landing
/// in class m receives. Conflicting colours for the same class mean the
/// input was not end-uniform and are an error.
pub type DTable = BTreeMap<Tuple, BTreeMap<usize, u64>>;

/// Builds d over `tp` for every tuple size `a − 1` with `a` a declared arity
/// of `c`. Well-definedness is re-verified during construction.
pub fn transform_colouring_d(
    tp: &Tree,
    c: &Colouring,
    reg: &ClassRegistry,
) -> Result<DTable, SearchError> {
    let mut table = DTable::new();
    let sizes: BTreeSet<usize> = c
        .arities()
        .iter()
        .filter(|&&a| a >= 1)
        .map(|&a| a - 1)
        .collect();
    let nodes: Vec<&DecSeq> = tp.nodes_lex2().collect();
    for &size in &sizes {
        for base in enum_tuples(tp, size) {
            let mut partial: BTreeMap<usize, (u64, DecSeq)> = BTreeMap::new();
            for &node in &nodes {
                let extended = match base.extend_with(node) {
                    Ok(e) => e,
                    Err(_) => continue, // not a <2-extension of base
                };
                let colour = c.get(&extended).ok_or_else(|| {
                    SimilarityError::MissingAssignment {
                        tuple: extended.clone(),
                    }
                })?;
                let m = reg.index_of(&sim_code(extended.items())?)?;
                match partial.get(&m) {
                    None => {
                        partial.insert(m, (colour, node.clone()));
                    }
                    Some((existing, first)) => {
                        if *existing != colour {
                            return Err(SearchError::NotEndUniform {
                                base,
                                first: first.clone(),
                                second: node.clone(),
                                first_colour: *existing,
                                second_colour: colour,
                            });
                        }
                    }
                }
            }
            table.insert(
                base,
                partial.into_iter().map(|(m, (col, _))| (m, col)).collect(),
            );
        }
    }
    Ok(table)
}

/// Injective encoding of the partial maps produced by
/// [`transform_colouring_d`]: canonical serialisation of the sorted entry
/// list, then a dense first-come numbering of the serialisations this
/// encoder has seen. Feeding tuples in canonical order makes the numbering
/// reproducible.
pub struct PairEncoder {
    universe: usize,
    table: HashMap<Vec<(usize, u64)>, u64>,
}

impl PairEncoder {
    pub fn new(universe: usize) -> PairEncoder {
        PairEncoder {
            universe,
            table: HashMap::new(),
        }
    }

    pub fn encode(&mut self, partial: &BTreeMap<usize, u64>) -> Result<u64, SearchError> {
        if let Some((&index, _)) = partial.iter().rev().next() {
            if index >= self.universe {
                return Err(SearchError::UnknownClassIndex {
                    index,
                    universe: self.universe,
                });
            }
        }
        let key: Vec<(usize, u64)> = partial.iter().map(|(&m, &c)| (m, c)).collect();
        let next = self.table.len() as u64;
        Ok(*self.table.entry(key).or_insert(next))
    }

    pub fn distinct(&self) -> u64 {
        self.table.len() as u64
    }
}

/// The composed colouring f∘d as a [`Colouring`] over `tp`, together with
/// the d-table it came from. Arities drop by one; colours are the dense
/// encoder values.
pub fn compose_reduction(
    tp: &Tree,
    c: &Colouring,
    reg: &ClassRegistry,
) -> Result<(Colouring, DTable), SearchError> {
    let d = transform_colouring_d(tp, c, reg)?;
    let mut encoder = PairEncoder::new(reg.len());
    let mut values: Vec<(Tuple, u64)> = Vec::with_capacity(d.len());
    for (tuple, partial) in &d {
        values.push((tuple.clone(), encoder.encode(partial)?));
    }
    let sizes: BTreeSet<usize> = d.keys().map(|t| t.len()).collect();
    let mut composed = Colouring::new(encoder.distinct().max(1), sizes);
    for (tuple, colour) in values {
        composed
            .set(tuple, colour)
            .expect("encoder values are dense");
    }
    Ok((composed, d))
}
