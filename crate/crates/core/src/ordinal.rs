//! Ordinals below ε₀ in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `w^e1*c1 + w^e2*c2 + ... + w^ek*ck` with
//! strictly decreasing exponents (themselves ordinals) and positive
//! arbitrary-precision coefficients. The empty sum is 0. This is enough to
//! evaluate every formula the workbench needs; there is deliberately no
//! general exponentiation or subtraction.
//!
//! Naturals that fit in a machine word are stored inline, so the values
//! that dominate tree labels clone, hash, and compare without touching the
//! heap. The representations never overlap: the term form is only used for
//! values a `u64` cannot hold.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash)]
struct Term {
    exp: Ordinal,
    coeff: BigUint,
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Nat(u64),
    // Invariant: not representable as Nat — either the leading exponent is
    // positive, or this is a lone exponent-0 term with coefficient > u64.
    Cnf(Vec<Term>),
}

/// An ordinal below ε₀ in Cantor normal form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ordinal {
    repr: Repr,
}

/// Errors from parsing or assembling ordinal literals.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("empty ordinal literal")]
    EmptyLiteral,
    #[error("unexpected character {found:?} at byte {pos} (expected {expected})")]
    UnexpectedChar {
        pos: usize,
        found: char,
        expected: &'static str,
    },
    #[error("unexpected end of input (expected {expected})")]
    UnexpectedEnd { expected: &'static str },
    #[error("coefficient must be positive at byte {pos}")]
    ZeroCoefficient { pos: usize },
    #[error("zero summand at byte {pos} is only allowed as the whole literal")]
    ZeroSummand { pos: usize },
    #[error("exponents must be strictly decreasing at byte {pos}")]
    NonDecreasingExponents { pos: usize },
    #[error("trailing input at byte {pos}")]
    TrailingInput { pos: usize },
}

const ZERO: Ordinal = Ordinal { repr: Repr::Nat(0) };

impl Default for Ordinal {
    fn default() -> Self {
        ZERO
    }
}

fn normalize(terms: Vec<Term>) -> Ordinal {
    debug_assert!(terms.windows(2).all(|w| w[0].exp > w[1].exp));
    debug_assert!(terms.iter().all(|t| t.coeff != BigUint::default()));
    match terms.as_slice() {
        [] => ZERO,
        [t] if t.exp.is_zero() => match u64::try_from(&t.coeff) {
            Ok(n) => Ordinal { repr: Repr::Nat(n) },
            Err(_) => Ordinal {
                repr: Repr::Cnf(terms),
            },
        },
        _ => Ordinal {
            repr: Repr::Cnf(terms),
        },
    }
}

impl Ordinal {
    /// The ordinal 0.
    pub const fn zero() -> Ordinal {
        ZERO
    }

    /// A finite ordinal (natural number).
    pub const fn nat(n: u64) -> Ordinal {
        Ordinal { repr: Repr::Nat(n) }
    }

    pub fn from_big(n: BigUint) -> Ordinal {
        match u64::try_from(&n) {
            Ok(small) => Ordinal::nat(small),
            Err(_) => Ordinal {
                repr: Repr::Cnf(vec![Term {
                    exp: ZERO,
                    coeff: n,
                }]),
            },
        }
    }

    /// ω itself.
    pub fn omega() -> Ordinal {
        Ordinal::omega_term(Ordinal::nat(1), 1)
    }

    /// `w^exp * coeff`, a single CNF term.
    pub fn omega_term(exp: Ordinal, coeff: u64) -> Ordinal {
        assert!(coeff >= 1, "CNF coefficients must be positive");
        normalize(vec![Term {
            exp,
            coeff: BigUint::from(coeff),
        }])
    }

    /// Assembles an ordinal from `(exponent, coefficient)` pairs, which must
    /// come with strictly decreasing exponents and positive coefficients.
    pub fn from_terms(pairs: Vec<(Ordinal, BigUint)>) -> Result<Ordinal, OrdinalError> {
        for (i, (exp, coeff)) in pairs.iter().enumerate() {
            if *coeff == BigUint::default() {
                return Err(OrdinalError::ZeroCoefficient { pos: i });
            }
            if i > 0 && pairs[i - 1].0 <= *exp {
                return Err(OrdinalError::NonDecreasingExponents { pos: i });
            }
        }
        Ok(normalize(
            pairs
                .into_iter()
                .map(|(exp, coeff)| Term { exp, coeff })
                .collect(),
        ))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Nat(0))
    }

    /// Whether this is a natural number (of any size).
    pub fn is_finite(&self) -> bool {
        match &self.repr {
            Repr::Nat(_) => true,
            Repr::Cnf(terms) => terms.len() == 1 && terms[0].exp.is_zero(),
        }
    }

    /// This ordinal as a `u64`, when it is a natural that fits.
    pub fn as_u64(&self) -> Option<u64> {
        match &self.repr {
            Repr::Nat(n) => Some(*n),
            Repr::Cnf(_) => None,
        }
    }

    fn expand(&self) -> Vec<Term> {
        match &self.repr {
            Repr::Nat(0) => Vec::new(),
            Repr::Nat(n) => vec![Term {
                exp: ZERO,
                coeff: BigUint::from(*n),
            }],
            Repr::Cnf(terms) => terms.clone(),
        }
    }

    /// Ordinal sum. Addition absorbs every term of `self` strictly below the
    /// leading term of `other`: 1 + ω = ω but ω + 1 = ω+1.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        match (&self.repr, &other.repr) {
            (_, Repr::Nat(0)) => self.clone(),
            (Repr::Nat(0), _) => other.clone(),
            (Repr::Nat(a), Repr::Nat(b)) => match a.checked_add(*b) {
                Some(n) => Ordinal::nat(n),
                None => Ordinal::from_big(BigUint::from(*a) + BigUint::from(*b)),
            },
            _ => {
                let a = self.expand();
                let b = other.expand();
                let lead = &b[0];
                let mut out: Vec<Term> = a
                    .iter()
                    .take_while(|t| t.exp > lead.exp)
                    .cloned()
                    .collect();
                let mut rest = b;
                if let Some(t) = a.get(out.len()) {
                    if t.exp == rest[0].exp {
                        rest[0].coeff = &rest[0].coeff + &t.coeff;
                    }
                }
                out.extend(rest);
                normalize(out)
            }
        }
    }

    /// Product with a natural number: `a*n = a + a + ... + a` (n times).
    /// For n >= 1 this multiplies the leading coefficient and keeps the tail.
    pub fn mul_nat(&self, n: &BigUint) -> Ordinal {
        if self.is_zero() || *n == BigUint::default() {
            return ZERO;
        }
        let mut terms = self.expand();
        terms[0].coeff = &terms[0].coeff * n;
        normalize(terms)
    }

    /// Successor, `self + 1`.
    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::nat(1))
    }

    /// Parses an ordinal literal.
    ///
    /// Grammar: `literal := term ("+" term)*`,
    /// `term := natural | "w" ("^" exponent)? ("*" positive-natural)?`,
    /// `exponent := natural | "w" | "(" literal ")"`.
    /// Terms must appear with strictly decreasing exponents. A composite
    /// exponent must be parenthesised, which keeps literals unambiguous:
    /// `w^w*2` is ω^ω·2 while `w^(w*2)` is ω^(ω·2).
    pub fn parse(input: &str) -> Result<Ordinal, OrdinalError> {
        let mut p = Parser {
            bytes: input.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let ord = p.literal()?;
        p.skip_ws();
        if p.pos < p.bytes.len() {
            return Err(OrdinalError::TrailingInput { pos: p.pos });
        }
        Ok(ord)
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.repr, &other.repr) {
            (Repr::Nat(a), Repr::Nat(b)) => a.cmp(b),
            // a Cnf value is never a u64-sized natural
            (Repr::Nat(_), Repr::Cnf(_)) => Ordering::Less,
            (Repr::Cnf(_), Repr::Nat(_)) => Ordering::Greater,
            (Repr::Cnf(a), Repr::Cnf(b)) => {
                // CNF comparison: term lists compared lexicographically,
                // exponent before coefficient; a missing term loses.
                for (x, y) in a.iter().zip(b.iter()) {
                    match x.exp.cmp(&y.exp) {
                        Ordering::Equal => {}
                        ord => return ord,
                    }
                    match x.coeff.cmp(&y.coeff) {
                        Ordering::Equal => {}
                        ord => return ord,
                    }
                }
                a.len().cmp(&b.len())
            }
        }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = match &self.repr {
            Repr::Nat(n) => return write!(f, "{n}"),
            Repr::Cnf(terms) => terms,
        };
        for (i, t) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if t.exp.is_zero() {
                write!(f, "{}", t.coeff)?;
                continue;
            }
            write!(f, "w")?;
            if t.exp != Ordinal::nat(1) {
                if t.exp.is_finite() {
                    write!(f, "^{}", t.exp)?;
                } else if t.exp == Ordinal::omega() {
                    write!(f, "^w")?;
                } else {
                    write!(f, "^({})", t.exp)?;
                }
            }
            if t.coeff != BigUint::from(1u8) {
                write!(f, "*{}", t.coeff)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn literal(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut terms: Vec<(Ordinal, BigUint)> = Vec::new();
        loop {
            self.skip_ws();
            let start = self.pos;
            let (exp, coeff) = self.term()?;
            if coeff == BigUint::default() {
                // "0" is only a valid literal on its own.
                if !terms.is_empty() || self.next_is_plus() {
                    return Err(OrdinalError::ZeroSummand { pos: start });
                }
                return Ok(Ordinal::zero());
            }
            if let Some((prev_exp, _)) = terms.last() {
                if *prev_exp <= exp {
                    return Err(OrdinalError::NonDecreasingExponents { pos: start });
                }
            }
            terms.push((exp, coeff));
            self.skip_ws();
            if self.peek() == Some(b'+') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ordinal::from_terms(terms)
    }

    fn next_is_plus(&self) -> bool {
        let mut i = self.pos;
        while i < self.bytes.len() && self.bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        self.bytes.get(i) == Some(&b'+')
    }

    // Returns (exponent, coefficient); coefficient 0 encodes the literal "0".
    fn term(&mut self) -> Result<(Ordinal, BigUint), OrdinalError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.natural()?;
                Ok((Ordinal::zero(), n))
            }
            Some(b'w') => {
                self.pos += 1;
                let exp = if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.exponent()?
                } else {
                    Ordinal::nat(1)
                };
                let coeff = if self.peek() == Some(b'*') {
                    self.pos += 1;
                    let start = self.pos;
                    let n = self.natural()?;
                    if n == BigUint::default() {
                        return Err(OrdinalError::ZeroCoefficient { pos: start });
                    }
                    n
                } else {
                    BigUint::from(1u8)
                };
                Ok((exp, coeff))
            }
            Some(c) => Err(OrdinalError::UnexpectedChar {
                pos: self.pos,
                found: c as char,
                expected: "a natural number or 'w'",
            }),
            None => Err(OrdinalError::UnexpectedEnd {
                expected: "a natural number or 'w'",
            }),
        }
    }

    fn exponent(&mut self) -> Result<Ordinal, OrdinalError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::from_big(self.natural()?)),
            Some(b'w') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.literal()?;
                self.skip_ws();
                match self.peek() {
                    Some(b')') => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    Some(c) => Err(OrdinalError::UnexpectedChar {
                        pos: self.pos,
                        found: c as char,
                        expected: "')'",
                    }),
                    None => Err(OrdinalError::UnexpectedEnd { expected: "')'" }),
                }
            }
            Some(c) => Err(OrdinalError::UnexpectedChar {
                pos: self.pos,
                found: c as char,
                expected: "a natural number, 'w', or '('",
            }),
            None => Err(OrdinalError::UnexpectedEnd {
                expected: "a natural number, 'w', or '('",
            }),
        }
    }

    fn natural(&mut self) -> Result<BigUint, OrdinalError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(OrdinalError::UnexpectedEnd {
                expected: "a digit",
            });
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(digits.parse::<BigUint>().unwrap())
    }
}
