//! Rank functions on finite trees and the constructive embedding they
//! license.
//!
//! `rank_mu` is the μ-fold branching rank: a node's rank exceeds α exactly
//! when at least μ of its children have rank at least α. On a finite tree
//! this collapses to a closed form — 0 with fewer than μ children, otherwise
//! one more than the μ-th largest child rank. [`rank_fixpoint_oracle`]
//! evaluates the defining clauses literally and exists to certify that
//! closed form by test; it shares no code with `rank_mu`.

use thiserror::Error;

use crate::ordinal::Ordinal;
use crate::search::Embedding;
use crate::tree::{enum_ds, DecSeq, Tree, TreeError};

/// Cap on tree size for the fixpoint oracle.
pub const ORACLE_NODE_CAP: usize = 4096;

/// A rank, or the marker for sequences outside the tree (the −1 of the
/// usual convention).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RankValue {
    NotInTree,
    Rank(u64),
}

impl RankValue {
    pub fn rank(self) -> Option<u64> {
        match self {
            RankValue::NotInTree => None,
            RankValue::Rank(r) => Some(r),
        }
    }
}

impl std::fmt::Display for RankValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RankValue::NotInTree => write!(f, "-1"),
            RankValue::Rank(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum RankError {
    #[error("oracle cap exceeded: tree has {size} nodes, cap {cap}")]
    OracleCapExceeded { size: usize, cap: usize },
    #[error("{eta} is not in the tree")]
    NotInTree { eta: DecSeq },
    #[error("rank of {eta} under mu={mu} is {actual}, but alpha={required} was requested")]
    InsufficientRank {
        eta: DecSeq,
        mu: u64,
        actual: RankValue,
        required: u32,
    },
    #[error("construction stuck below {at}: no child of rank at least {beta} above the earlier choices (guaranteed only for alpha <= mu)")]
    ChoiceExhausted { at: DecSeq, beta: u32 },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Ranks of every node under multiplicity `mu`, indexed like `t.nodes()`.
pub fn rank_table(t: &Tree, mu: u64) -> Vec<u64> {
    assert!(mu >= 1, "multiplicity must be positive");
    let mut ranks = vec![0u64; t.len()];
    // children precede parents when walking canonical order backwards
    for i in (0..t.len()).rev() {
        let kids = t.children_of(i);
        if (kids.len() as u64) < mu {
            ranks[i] = 0;
        } else {
            let mut child_ranks: Vec<u64> = kids.iter().map(|&c| ranks[c]).collect();
            child_ranks.sort_unstable_by(|a, b| b.cmp(a));
            ranks[i] = child_ranks[(mu - 1) as usize] + 1;
        }
    }
    ranks
}

/// rk_{T,μ}(η), or `NotInTree`.
pub fn rank_mu(t: &Tree, mu: u64, eta: &DecSeq) -> RankValue {
    match t.index_of(eta) {
        None => RankValue::NotInTree,
        Some(i) => RankValue::Rank(rank_table(t, mu)[i]),
    }
}

/// The defining clauses evaluated literally: iterate the predicate
/// "rk(η) ≥ α" for α = 0, 1, …, |T| and report, per node, the largest α
/// that holds. Test oracle only; capped at [`ORACLE_NODE_CAP`] nodes.
pub fn rank_fixpoint_oracle_table(t: &Tree, mu: u64) -> Result<Vec<u64>, RankError> {
    assert!(mu >= 1, "multiplicity must be positive");
    if t.len() > ORACLE_NODE_CAP {
        return Err(RankError::OracleCapExceeded {
            size: t.len(),
            cap: ORACLE_NODE_CAP,
        });
    }
    // geq[i] == true means rk(node i) >= alpha for the current alpha
    let mut geq = vec![true; t.len()]; // alpha = 0: membership
    let mut answer = vec![0u64; t.len()];
    for alpha in 1..=(t.len() as u64) {
        let next: Vec<bool> = (0..t.len())
            .map(|i| {
                let witnesses = t.children_of(i).iter().filter(|&&c| geq[c]).count() as u64;
                witnesses >= mu
            })
            .collect();
        for (i, &holds) in next.iter().enumerate() {
            if holds {
                answer[i] = alpha;
            }
        }
        if next.iter().all(|&b| !b) {
            break;
        }
        geq = next;
    }
    Ok(answer)
}

/// Single-node view of [`rank_fixpoint_oracle_table`].
pub fn rank_fixpoint_oracle(t: &Tree, mu: u64, eta: &DecSeq) -> Result<RankValue, RankError> {
    match t.index_of(eta) {
        None if t.len() > ORACLE_NODE_CAP => Err(RankError::OracleCapExceeded {
            size: t.len(),
            cap: ORACLE_NODE_CAP,
        }),
        None => Ok(RankValue::NotInTree),
        Some(i) => Ok(RankValue::Rank(rank_fixpoint_oracle_table(t, mu)?[i])),
    }
}

/// Reduced rank: min(λ, rk_{T,μ}(η)).
pub fn reduced_rank(t: &Tree, mu: u64, lambda: u64, eta: &DecSeq) -> RankValue {
    match rank_mu(t, mu, eta) {
        RankValue::NotInTree => RankValue::NotInTree,
        RankValue::Rank(r) => RankValue::Rank(r.min(lambda)),
    }
}

/// Constructively embeds `graft(eta, ds(alpha))` into `t`, fixing every
/// prefix of `eta` pointwise. Requires rk_{t,μ}(η) ≥ α; for α ≤ μ the
/// construction is guaranteed to go through, and for larger α it is
/// attempted and reports where it gets stuck.
///
/// Children are chosen exactly as the existence proof does: for β below α,
/// γ_β is the least child label of rank at least β exceeding every earlier
/// choice, and the construction recurses below γ_β with α replaced by β.
pub fn embed_ds(t: &Tree, mu: u64, alpha: u32, eta: &DecSeq) -> Result<Embedding, RankError> {
    assert!(mu >= 1, "multiplicity must be positive");
    let Some(eta_idx) = t.index_of(eta) else {
        return Err(RankError::NotInTree { eta: eta.clone() });
    };
    let table = rank_table(t, mu);
    if table[eta_idx] < alpha as u64 {
        return Err(RankError::InsufficientRank {
            eta: eta.clone(),
            mu,
            actual: RankValue::Rank(table[eta_idx]),
            required: alpha,
        });
    }
    let mut pairs: Vec<(DecSeq, DecSeq)> = Vec::new();
    for l in 0..=eta.len() {
        let p = eta.prefix(l);
        pairs.push((p.clone(), p));
    }
    grow(t, &table, eta, eta_idx, alpha, &mut pairs)?;
    Ok(Embedding::from_pairs(pairs))
}

// Maps dom⌢ds(alpha) below the already-mapped pair (dom ↦ t.node(at)).
fn grow(
    t: &Tree,
    table: &[u64],
    dom: &DecSeq,
    at: usize,
    alpha: u32,
    pairs: &mut Vec<(DecSeq, DecSeq)>,
) -> Result<(), RankError> {
    let mut previous: Option<&Ordinal> = None;
    for beta in 0..alpha {
        let chosen = t
            .children_of(at)
            .iter()
            .copied()
            .find(|&c| {
                table[c] >= beta as u64
                    && previous.is_none_or(|g| t.node(c).last().unwrap() > g)
            })
            .ok_or_else(|| RankError::ChoiceExhausted {
                at: t.node(at).clone(),
                beta,
            })?;
        previous = Some(t.node(chosen).last().unwrap());
        let dom_child = dom
            .child(Ordinal::nat(beta as u64))
            .expect("labels below alpha fit under eta's last entry");
        pairs.push((dom_child.clone(), t.node(chosen).clone()));
        grow(t, table, &dom_child, chosen, beta, pairs)?;
    }
    Ok(())
}

/// The domain `embed_ds` promises to cover: graft(η, ds(α)), or ds(α) when
/// η is empty.
pub fn embed_domain(eta: &DecSeq, alpha: u32) -> Result<Tree, RankError> {
    let base = enum_ds(alpha)?;
    if eta.is_empty() {
        Ok(base)
    } else {
        Ok(crate::tree::graft(eta, &base)?)
    }
}
