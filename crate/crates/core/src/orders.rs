//! The four order relations on decreasing sequences.
//!
//! <¹ₗₓ and <²ₗₓ are total orders that agree on the first genuine
//! lexicographic difference and disagree on how a proper prefix compares
//! (prefix smaller for <¹, prefix larger for <²); both well-order the
//! sequences. <*ₗₓ is their intersection, a partial order. <³ alternates:
//! ascending at even positions and descending at odd ones, with a prefix
//! coming first.
//!
//! Comparators never allocate; they walk entries pairwise.

use std::cmp::Ordering;

use crate::tree::DecSeq;

/// Which relation a comparison should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKind {
    Lex1,
    Lex2,
    Lex3,
    Star,
}

// Index of the first position where the sequences differ, or None if one is
// a prefix of the other.
fn first_difference(a: &DecSeq, b: &DecSeq) -> Option<(usize, Ordering)> {
    for (i, (x, y)) in a.entries().iter().zip(b.entries().iter()).enumerate() {
        match x.cmp(y) {
            Ordering::Equal => {}
            ord => return Some((i, ord)),
        }
    }
    None
}

/// a <¹ b iff they differ lexicographically at the first difference, or a is
/// a proper prefix of b.
pub fn cmp_lex1(a: &DecSeq, b: &DecSeq) -> Ordering {
    match first_difference(a, b) {
        Some((_, ord)) => ord,
        None => a.len().cmp(&b.len()),
    }
}

/// a <² b iff they differ lexicographically at the first difference, or b is
/// a proper prefix of a.
pub fn cmp_lex2(a: &DecSeq, b: &DecSeq) -> Ordering {
    match first_difference(a, b) {
        Some((_, ord)) => ord,
        None => b.len().cmp(&a.len()),
    }
}

/// a <³ b iff a is a proper prefix of b, or at the first difference ℓ the
/// entries compare ascending for even ℓ and descending for odd ℓ.
pub fn cmp_lex3(a: &DecSeq, b: &DecSeq) -> Ordering {
    match first_difference(a, b) {
        Some((l, ord)) => {
            if l % 2 == 0 {
                ord
            } else {
                ord.reverse()
            }
        }
        None => a.len().cmp(&b.len()),
    }
}

/// a ≤* b: a ≤¹ b and a ≤² b. Holds exactly when a = b or the two differ at
/// a genuine lexicographic position.
pub fn leq_star(a: &DecSeq, b: &DecSeq) -> bool {
    cmp_lex1(a, b) != Ordering::Greater && cmp_lex2(a, b) != Ordering::Greater
}

/// The partial order <*: `None` when the two are ⊴-comparable but unequal.
pub fn cmp_star(a: &DecSeq, b: &DecSeq) -> Option<Ordering> {
    match first_difference(a, b) {
        Some((_, ord)) => Some(ord),
        None => {
            if a.len() == b.len() {
                Some(Ordering::Equal)
            } else {
                None
            }
        }
    }
}

pub fn compare(kind: OrderKind, a: &DecSeq, b: &DecSeq) -> Option<Ordering> {
    match kind {
        OrderKind::Lex1 => Some(cmp_lex1(a, b)),
        OrderKind::Lex2 => Some(cmp_lex2(a, b)),
        OrderKind::Lex3 => Some(cmp_lex3(a, b)),
        OrderKind::Star => cmp_star(a, b),
    }
}

/// The <²ₗₓ-minimum of a non-empty finite set, found greedily: pick the
/// least possible entry position by position while any member still extends
/// the chosen prefix, then the prefix itself is the minimum.
pub fn min_lex2(set: &[DecSeq]) -> Option<DecSeq> {
    if set.is_empty() {
        return None;
    }
    let mut prefix: Vec<&crate::ordinal::Ordinal> = Vec::new();
    loop {
        let next = set
            .iter()
            .filter(|s| {
                s.len() > prefix.len()
                    && s.entries()[..prefix.len()]
                        .iter()
                        .zip(prefix.iter())
                        .all(|(x, &y)| x == y)
            })
            .map(|s| &s.entries()[prefix.len()])
            .min();
        match next {
            Some(label) => prefix.push(label),
            None => break,
        }
    }
    let result = DecSeq::new(prefix.into_iter().cloned().collect())
        .expect("greedy entries decrease");
    debug_assert!(set.contains(&result));
    Some(result)
}

/// The <¹ₗₓ-minimum of a non-empty finite set: with ā the <²-minimum, the
/// shortest prefix of ā that belongs to the set.
pub fn min_lex1(set: &[DecSeq]) -> Option<DecSeq> {
    let bar_a = min_lex2(set)?;
    for m in 0..=bar_a.len() {
        let candidate = bar_a.prefix(m);
        if set.contains(&candidate) {
            return Some(candidate);
        }
    }
    unreachable!("the <2-minimum itself belongs to the set")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::enum_ds;
    use proptest::prelude::*;

    fn seq(labels: &[u64]) -> DecSeq {
        DecSeq::from_nats(labels).unwrap()
    }

    #[test]
    fn lex1_examples() {
        assert_eq!(cmp_lex1(&DecSeq::empty(), &seq(&[1])), Ordering::Less);
        assert_eq!(cmp_lex1(&seq(&[0]), &seq(&[1, 0])), Ordering::Less);
        assert_eq!(cmp_lex1(&seq(&[2, 1]), &seq(&[2])), Ordering::Greater);
    }

    #[test]
    fn lex2_examples() {
        assert_eq!(cmp_lex2(&seq(&[1]), &DecSeq::empty()), Ordering::Less);
        assert_eq!(cmp_lex2(&seq(&[0]), &seq(&[1, 0])), Ordering::Less);
        assert_eq!(cmp_lex2(&seq(&[1, 0]), &seq(&[1])), Ordering::Less);
    }

    #[test]
    fn lex3_examples() {
        assert_eq!(cmp_lex3(&DecSeq::empty(), &seq(&[0])), Ordering::Less);
        assert_eq!(cmp_lex3(&seq(&[0]), &seq(&[1])), Ordering::Less);
        // difference at odd position 1 reverses
        assert_eq!(cmp_lex3(&seq(&[2, 1]), &seq(&[2, 0])), Ordering::Less);
    }

    #[test]
    fn star_examples() {
        assert!(leq_star(&seq(&[0]), &seq(&[1])));
        assert!(!leq_star(&DecSeq::empty(), &seq(&[1])));
        let a = seq(&[3, 1]);
        assert!(leq_star(&a, &a));
        assert_eq!(cmp_star(&DecSeq::empty(), &seq(&[1])), None);
    }

    #[test]
    fn min_examples() {
        let a = vec![seq(&[2, 1]), seq(&[2]), seq(&[0])];
        assert_eq!(min_lex2(&a), Some(seq(&[0])));
        let b = vec![seq(&[2, 1]), seq(&[2])];
        assert_eq!(min_lex2(&b), Some(seq(&[2, 1])));
        assert_eq!(min_lex1(&b), Some(seq(&[2])));
        assert_eq!(min_lex2(&[DecSeq::empty()]), Some(DecSeq::empty()));
        let c = vec![seq(&[0]), seq(&[1]), seq(&[1, 0])];
        assert_eq!(min_lex1(&c), Some(seq(&[0])));
        let d = vec![DecSeq::empty(), seq(&[3])];
        assert_eq!(min_lex1(&d), Some(DecSeq::empty()));
        assert_eq!(min_lex2(&[]), None);
    }

    // Independent route: sort with the comparator and take the head.
    fn sort_min(set: &[DecSeq], cmp: fn(&DecSeq, &DecSeq) -> Ordering) -> DecSeq {
        let mut v = set.to_vec();
        v.sort_by(cmp);
        v[0].clone()
    }

    #[test]
    fn greedy_minima_match_sort_on_ds4() {
        // every non-empty subset of a fixed 6-node slice, plus whole levels
        let t = enum_ds(4).unwrap();
        let nodes = t.nodes();
        let picks: Vec<DecSeq> = nodes.iter().take(8).cloned().collect();
        for mask in 1u32..(1 << picks.len()) {
            let set: Vec<DecSeq> = picks
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| s.clone())
                .collect();
            assert_eq!(min_lex2(&set).unwrap(), sort_min(&set, cmp_lex2));
            assert_eq!(min_lex1(&set).unwrap(), sort_min(&set, cmp_lex1));
        }
    }

    fn arb_seq() -> impl Strategy<Value = DecSeq> {
        prop::collection::btree_set(0u64..10, 0..5).prop_map(|labels| {
            let mut v: Vec<u64> = labels.into_iter().collect();
            v.reverse();
            seq(&v)
        })
    }

    proptest! {
        #[test]
        fn total_orders_are_total(a in arb_seq(), b in arb_seq(), c in arb_seq()) {
            for cmp in [cmp_lex1, cmp_lex2, cmp_lex3] {
                prop_assert_eq!(cmp(&a, &b), cmp(&b, &a).reverse());
                prop_assert_eq!(cmp(&a, &b) == Ordering::Equal, a == b);
                if cmp(&a, &b) != Ordering::Greater && cmp(&b, &c) != Ordering::Greater {
                    prop_assert_ne!(cmp(&a, &c), Ordering::Greater);
                }
            }
        }

        #[test]
        fn star_antisymmetric_transitive(a in arb_seq(), b in arb_seq(), c in arb_seq()) {
            if leq_star(&a, &b) && leq_star(&b, &a) {
                prop_assert_eq!(&a, &b);
            }
            if leq_star(&a, &b) && leq_star(&b, &c) {
                prop_assert!(leq_star(&a, &c));
            }
        }

        #[test]
        fn same_length_orders_agree(a in arb_seq(), b in arb_seq()) {
            if a.len() == b.len() {
                prop_assert_eq!(cmp_lex1(&a, &b), cmp_lex2(&a, &b));
                if cmp_lex1(&a, &b) == Ordering::Less {
                    // strict <1 implies strict <* for equal lengths
                    prop_assert!(leq_star(&a, &b) && a != b);
                }
            }
        }

        #[test]
        fn greedy_minima_match_sort(sets in prop::collection::vec(arb_seq(), 1..8)) {
            prop_assert_eq!(min_lex2(&sets).unwrap(), sort_min(&sets, cmp_lex2));
            prop_assert_eq!(min_lex1(&sets).unwrap(), sort_min(&sets, cmp_lex1));
        }
    }
}
