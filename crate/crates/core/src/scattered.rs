//! Hausdorff-style terms for scattered linear orders and their explicit
//! embedding into decreasing sequences under <³.
//!
//! Terms are built from a single point by well-ordered products (`prod`,
//! forward or reversed copy order) and binary sums. A term of bound α embeds
//! order-preservingly into (ds(α), <³): a product over β prefixes each point
//! of the base with a two-entry header placed above everything the base
//! uses, ascending headers for forward copies and descending for reversed
//! ones. A sum is handled as a two-copy product over the larger of the two
//! summand bounds.

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::ordinal::{Ordinal, OrdinalError};
use crate::orders::cmp_lex3;
use crate::tree::{DecSeq, TreeError};

/// Default cap on the number of points [`materialize`] will lay out.
pub const MATERIALIZE_DEFAULT_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Fwd,
    Rev,
}

/// A scattered-order term: a point, a β-fold product of a term (forward or
/// reversed), or a sum of two terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HausdorffTerm {
    Atom,
    Prod {
        base: Box<HausdorffTerm>,
        beta: Ordinal,
        dir: Direction,
    },
    Sum(Box<HausdorffTerm>, Box<HausdorffTerm>),
}

#[derive(Debug, Error)]
pub enum TermError {
    #[error("beta must be at least 1")]
    ZeroBeta,
    #[error("term syntax error at byte {pos}: expected {expected}")]
    Syntax { pos: usize, expected: &'static str },
    #[error("bad ordinal in term: {0}")]
    BadOrdinal(#[from] OrdinalError),
    #[error("cannot materialise an infinite product (beta = {beta})")]
    InfiniteBeta { beta: Ordinal },
    #[error("materialisation exceeds the cap of {cap} points")]
    CapExceeded { cap: usize },
    #[error("position {pos} does not belong to the term")]
    BadPosition { pos: String },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A point of a term's denotation: which copy and summand it sits in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermPos {
    Point,
    InProd { base: Box<TermPos>, copy: Ordinal },
    Left(Box<TermPos>),
    Right(Box<TermPos>),
}

impl fmt::Display for TermPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermPos::Point => write!(f, "*"),
            TermPos::InProd { base, copy } => write!(f, "{base}:{copy}"),
            TermPos::Left(p) => write!(f, "L({p})"),
            TermPos::Right(p) => write!(f, "R({p})"),
        }
    }
}

impl HausdorffTerm {
    pub fn prod(base: HausdorffTerm, beta: Ordinal, dir: Direction) -> Result<Self, TermError> {
        if beta.is_zero() {
            return Err(TermError::ZeroBeta);
        }
        Ok(HausdorffTerm::Prod {
            base: Box::new(base),
            beta,
            dir,
        })
    }

    pub fn sum(left: HausdorffTerm, right: HausdorffTerm) -> Self {
        HausdorffTerm::Sum(Box::new(left), Box::new(right))
    }

    /// Parses `atom`, `prod(TERM,BETA,fwd|rev)`, `sum(TERM,TERM)`.
    pub fn parse(input: &str) -> Result<HausdorffTerm, TermError> {
        let bytes = input.as_bytes();
        let mut pos = 0usize;
        let term = parse_term(bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(TermError::Syntax {
                pos,
                expected: "end of input",
            });
        }
        Ok(term)
    }
}

impl fmt::Display for HausdorffTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HausdorffTerm::Atom => write!(f, "atom"),
            HausdorffTerm::Prod { base, beta, dir } => {
                let d = match dir {
                    Direction::Fwd => "fwd",
                    Direction::Rev => "rev",
                };
                write!(f, "prod({base},{beta},{d})")
            }
            HausdorffTerm::Sum(l, r) => write!(f, "sum({l},{r})"),
        }
    }
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn expect(bytes: &[u8], pos: &mut usize, ch: u8, what: &'static str) -> Result<(), TermError> {
    skip_ws(bytes, pos);
    if bytes.get(*pos) == Some(&ch) {
        *pos += 1;
        Ok(())
    } else {
        Err(TermError::Syntax {
            pos: *pos,
            expected: what,
        })
    }
}

fn parse_term(bytes: &[u8], pos: &mut usize) -> Result<HausdorffTerm, TermError> {
    skip_ws(bytes, pos);
    let rest = &bytes[*pos..];
    if rest.starts_with(b"atom") {
        *pos += 4;
        Ok(HausdorffTerm::Atom)
    } else if rest.starts_with(b"prod") {
        *pos += 4;
        expect(bytes, pos, b'(', "'('")?;
        let base = parse_term(bytes, pos)?;
        expect(bytes, pos, b',', "','")?;
        let beta_start = *pos;
        let beta_text = take_until(bytes, pos, b',');
        let beta = Ordinal::parse(beta_text.trim()).map_err(|e| match e {
            e @ OrdinalError::NonDecreasingExponents { .. } => TermError::BadOrdinal(e),
            _ => TermError::Syntax {
                pos: beta_start,
                expected: "an ordinal literal",
            },
        })?;
        expect(bytes, pos, b',', "','")?;
        skip_ws(bytes, pos);
        let dir = if bytes[*pos..].starts_with(b"fwd") {
            *pos += 3;
            Direction::Fwd
        } else if bytes[*pos..].starts_with(b"rev") {
            *pos += 3;
            Direction::Rev
        } else {
            return Err(TermError::Syntax {
                pos: *pos,
                expected: "'fwd' or 'rev'",
            });
        };
        expect(bytes, pos, b')', "')'")?;
        HausdorffTerm::prod(base, beta, dir)
    } else if rest.starts_with(b"sum") {
        *pos += 3;
        expect(bytes, pos, b'(', "'('")?;
        let left = parse_term(bytes, pos)?;
        expect(bytes, pos, b',', "','")?;
        let right = parse_term(bytes, pos)?;
        expect(bytes, pos, b')', "')'")?;
        Ok(HausdorffTerm::sum(left, right))
    } else {
        Err(TermError::Syntax {
            pos: *pos,
            expected: "'atom', 'prod', or 'sum'",
        })
    }
}

// reads up to (not past) the next `stop` byte at depth 0
fn take_until<'a>(bytes: &'a [u8], pos: &mut usize, stop: u8) -> &'a str {
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos] != stop {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos]).unwrap()
}

/// The bound α such that the term embeds into ds(α): 0 for a point,
/// `α_base + β·2 + 1` for a β-fold product, and for a sum the two-copy
/// product bound over the larger summand, `max + 2·2 + 1`.
pub fn alpha_bound(term: &HausdorffTerm) -> Ordinal {
    match term {
        HausdorffTerm::Atom => Ordinal::zero(),
        HausdorffTerm::Prod { base, beta, .. } => alpha_bound(base)
            .add(&beta.mul_nat(&BigUint::from(2u8)))
            .succ(),
        HausdorffTerm::Sum(l, r) => {
            let m = alpha_bound(l).max(alpha_bound(r));
            m.add(&Ordinal::nat(4)).succ()
        }
    }
}

/// The image of one point. Works for infinite β too; the copy index must
/// lie below β.
pub fn embed_point(term: &HausdorffTerm, pos: &TermPos) -> Result<DecSeq, TermError> {
    match (term, pos) {
        (HausdorffTerm::Atom, TermPos::Point) => Ok(DecSeq::empty()),
        (HausdorffTerm::Prod { base, beta, dir }, TermPos::InProd { base: bp, copy }) => {
            if copy >= beta {
                return Err(TermError::BadPosition {
                    pos: pos.to_string(),
                });
            }
            let eta = embed_point(base, bp)?;
            let alpha = alpha_bound(base);
            let header = match dir {
                // (η, γ) ↦ ⟨α+β+γ+1, α+β⟩⌢η
                Direction::Fwd => [
                    alpha.add(beta).add(copy).succ(),
                    alpha.add(beta),
                ],
                // (η, γ) ↦ ⟨α+β·2, α+β+γ⟩⌢η
                Direction::Rev => [
                    alpha.add(&beta.mul_nat(&BigUint::from(2u8))),
                    alpha.add(beta).add(copy),
                ],
            };
            let prefix = DecSeq::new(header.to_vec())?;
            prefix.concat(&eta).map_err(TermError::from)
        }
        (HausdorffTerm::Sum(l, r), TermPos::Left(p)) => {
            let eta = embed_point(l, p)?;
            sum_header(l, r, 0)?.concat(&eta).map_err(TermError::from)
        }
        (HausdorffTerm::Sum(l, r), TermPos::Right(p)) => {
            let eta = embed_point(r, p)?;
            sum_header(l, r, 1)?.concat(&eta).map_err(TermError::from)
        }
        _ => Err(TermError::BadPosition {
            pos: pos.to_string(),
        }),
    }
}

// A sum is the forward two-copy product over ds(max bound): copy 0 holds the
// left summand, copy 1 the right.
fn sum_header(
    l: &HausdorffTerm,
    r: &HausdorffTerm,
    copy: u64,
) -> Result<DecSeq, TermError> {
    let alpha = alpha_bound(l).max(alpha_bound(r));
    let two = Ordinal::nat(2);
    let first = alpha.add(&two).add(&Ordinal::nat(copy)).succ();
    let second = alpha.add(&two);
    Ok(DecSeq::new(vec![first, second])?)
}

/// A finite denotation: the points of the term laid out in order.
#[derive(Debug, Clone)]
pub struct LinearOrder {
    pub positions: Vec<TermPos>,
}

impl LinearOrder {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Lays the term out as a finite linear order. Every β must be finite and
/// the total size within the cap.
pub fn materialize(term: &HausdorffTerm, cap: usize) -> Result<LinearOrder, TermError> {
    let mut positions = Vec::new();
    lay_out(term, cap, &mut positions)?;
    Ok(LinearOrder { positions })
}

fn lay_out(
    term: &HausdorffTerm,
    cap: usize,
    out: &mut Vec<TermPos>,
) -> Result<(), TermError> {
    match term {
        HausdorffTerm::Atom => {
            if out.len() >= cap {
                return Err(TermError::CapExceeded { cap });
            }
            out.push(TermPos::Point);
            Ok(())
        }
        HausdorffTerm::Prod { base, beta, dir } => {
            let Some(n) = beta.as_u64() else {
                return Err(TermError::InfiniteBeta { beta: beta.clone() });
            };
            let copies: Vec<u64> = match dir {
                Direction::Fwd => (0..n).collect(),
                Direction::Rev => (0..n).rev().collect(),
            };
            for gamma in copies {
                let mut inner = Vec::new();
                lay_out(base, cap, &mut inner)?;
                for p in inner {
                    if out.len() >= cap {
                        return Err(TermError::CapExceeded { cap });
                    }
                    out.push(TermPos::InProd {
                        base: Box::new(p),
                        copy: Ordinal::nat(gamma),
                    });
                }
            }
            Ok(())
        }
        HausdorffTerm::Sum(l, r) => {
            let mut left = Vec::new();
            lay_out(l, cap, &mut left)?;
            for p in left {
                if out.len() >= cap {
                    return Err(TermError::CapExceeded { cap });
                }
                out.push(TermPos::Left(Box::new(p)));
            }
            let mut right = Vec::new();
            lay_out(r, cap, &mut right)?;
            for p in right {
                if out.len() >= cap {
                    return Err(TermError::CapExceeded { cap });
                }
                out.push(TermPos::Right(Box::new(p)));
            }
            Ok(())
        }
    }
}

/// The full embedding of a finite term: every point in denotation order
/// with its image.
pub fn embed_term(term: &HausdorffTerm) -> Result<Vec<(TermPos, DecSeq)>, TermError> {
    let lin = materialize(term, MATERIALIZE_DEFAULT_CAP)?;
    lin.positions
        .into_iter()
        .map(|p| {
            let image = embed_point(term, &p)?;
            Ok((p, image))
        })
        .collect()
}

/// Exact order check: every pair of positions in denotation order must map
/// to a <³-increasing pair of sequences. Not sampled.
pub fn check_order_embedding(term: &HausdorffTerm) -> Result<bool, TermError> {
    let embedded = embed_term(term)?;
    for i in 0..embedded.len() {
        for j in (i + 1)..embedded.len() {
            if cmp_lex3(&embedded[i].1, &embedded[j].1) != std::cmp::Ordering::Less {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
