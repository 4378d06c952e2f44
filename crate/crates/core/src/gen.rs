//! Seeded random instances for property tests and experiments. Everything
//! here is deterministic in the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ordinal::Ordinal;
use crate::similarity::{enum_tuples, Colouring};
use crate::tree::{DecSeq, Tree};

/// A random tree grown by attaching children to random nodes. Labels are
/// naturals below `max_label`; a child label must sit below its parent's
/// last entry, so depth is bounded by `max_label`.
pub fn random_tree(seed: u64, max_nodes: usize, max_label: u64) -> Tree {
    assert!(max_nodes >= 1 && max_label >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes: Vec<DecSeq> = vec![DecSeq::empty()];
    let mut attempts = 0usize;
    while nodes.len() < max_nodes && attempts < max_nodes * 20 {
        attempts += 1;
        let at = rng.gen_range(0..nodes.len());
        let parent = nodes[at].clone();
        let bound = parent
            .last()
            .and_then(|o| o.as_u64())
            .unwrap_or(max_label);
        if bound == 0 {
            continue;
        }
        let label = rng.gen_range(0..bound);
        let child = parent
            .child(Ordinal::nat(label))
            .expect("label below the parent's last entry");
        if !nodes.contains(&child) {
            nodes.push(child);
        }
    }
    Tree::new(nodes).expect("grown nodes are prefix-closed")
}

/// A total random colouring of the given tuple sizes of `t`, drawn in
/// canonical tuple order so the result depends only on the seed.
pub fn random_colouring(
    t: &Tree,
    arities: &[usize],
    num_colours: u64,
    seed: u64,
) -> Colouring {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Colouring::new(num_colours, arities.iter().copied());
    for &k in arities {
        for tuple in enum_tuples(t, k) {
            let colour = rng.gen_range(0..num_colours);
            c.set(tuple, colour).expect("colour below mu");
        }
    }
    c
}

/// A random decreasing sequence with entries drawn from a small mixed pool
/// of finite and infinite ordinals.
pub fn random_seq(rng: &mut ChaCha8Rng, max_len: usize) -> DecSeq {
    let len = rng.gen_range(0..=max_len);
    let mut pool: Vec<Ordinal> = Vec::new();
    for _ in 0..(len * 3 + 3) {
        let o = match rng.gen_range(0..10u32) {
            0..=6 => Ordinal::nat(rng.gen_range(0..12)),
            7 | 8 => Ordinal::omega()
                .mul_nat(&(rng.gen_range(1..4u64)).into())
                .add(&Ordinal::nat(rng.gen_range(0..5))),
            _ => Ordinal::omega_term(Ordinal::nat(2), rng.gen_range(1..3))
                .add(&Ordinal::nat(rng.gen_range(0..5))),
        };
        pool.push(o);
    }
    pool.sort();
    pool.dedup();
    pool.reverse();
    pool.truncate(len);
    DecSeq::new(pool).expect("sorted strictly decreasing")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_tree_is_deterministic() {
        let a = random_tree(7, 40, 8);
        let b = random_tree(7, 40, 8);
        assert_eq!(a, b);
        assert!(a.len() <= 40);
        let c = random_tree(8, 40, 8);
        assert!(a != c || a.len() == 1);
    }

    #[test]
    fn random_colouring_is_total_and_deterministic() {
        let t = random_tree(3, 12, 6);
        let c1 = random_colouring(&t, &[1, 2], 3, 99);
        let c2 = random_colouring(&t, &[1, 2], 3, 99);
        assert_eq!(c1, c2);
        for k in [1usize, 2] {
            for tuple in enum_tuples(&t, k) {
                assert!(c1.get(&tuple).is_some());
            }
        }
    }

    #[test]
    fn random_seq_decreases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let s = random_seq(&mut rng, 5);
            for w in s.entries().windows(2) {
                assert!(w[0] > w[1]);
            }
        }
    }
}
