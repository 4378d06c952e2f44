//! Acceptance suite. One test per criterion; each prints a single
//! `criterion N: PASS/FAIL` line (run with `--nocapture` to see them all)
//! and enforces its stated time budget.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::{Mutex, MutexGuard, PoisonError};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use decseq::gen::{random_colouring, random_seq, random_tree};
use decseq::ordinal::Ordinal;
use decseq::orders::{cmp_lex1, cmp_lex2, cmp_lex3, min_lex1, min_lex2};
use decseq::rank::{
    embed_domain, embed_ds, rank_fixpoint_oracle, rank_fixpoint_oracle_table, rank_mu, rank_table,
    RankValue,
};
use decseq::scattered::{check_order_embedding, Direction, HausdorffTerm};
use decseq::search::{
    compose_reduction, find_n_end_uniform_copy, validate_embedding,
    verify_partition_exhaustive, PairEncoder, SearchLimits,
};
use decseq::similarity::{
    check_n_end_uniform, enum_tuples, is_similar, sim_code, ClassRegistry, Colouring, SimCode,
    Tuple,
};
use decseq::tree::{enum_ds, DecSeq, Tree};

fn seq(labels: &[u64]) -> DecSeq {
    DecSeq::from_nats(labels).unwrap()
}

// Criteria carry wall-clock budgets, so they must not compete for cores;
// this serialises them while leaving rayon free inside each one.
static EXCLUSIVE: Mutex<()> = Mutex::new(());

fn exclusive() -> MutexGuard<'static, ()> {
    EXCLUSIVE.lock().unwrap_or_else(PoisonError::into_inner)
}

fn report(criterion: u32, name: &str, ok: bool, elapsed: Duration) {
    println!(
        "criterion {criterion:2} ({name}): {} [{:.2}s]",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(ok, "criterion {criterion} ({name}) failed");
}

fn within(elapsed: Duration, budget_secs: u64) -> bool {
    elapsed <= Duration::from_secs(budget_secs)
}

// Masks of all subtrees of `t` that contain node `at`, with at most `cap`
// nodes, as bitmasks over node indices.
fn cone_masks(t: &Tree, at: usize, cap: usize) -> Vec<u64> {
    let mut acc: Vec<u64> = vec![1u64 << at];
    for &c in t.children_of(at) {
        let child = cone_masks(t, c, cap);
        let mut next = Vec::with_capacity(acc.len() * (child.len() + 1));
        for &m in &acc {
            next.push(m);
            for &cm in &child {
                let combined = m | cm;
                if (combined.count_ones() as usize) <= cap {
                    next.push(combined);
                }
            }
        }
        acc = next;
    }
    acc
}

fn tree_from_mask(t: &Tree, mask: u64) -> Tree {
    let nodes: Vec<DecSeq> = (0..t.len())
        .filter(|&i| mask & (1 << i) != 0)
        .map(|i| t.node(i).clone())
        .collect();
    Tree::new(nodes).expect("cone masks are prefix-closed")
}

#[test]
fn criterion_01_rank_law() {
    let _guard = exclusive();
    let start = Instant::now();
    let mut ok = true;
    for n in 0..=8u32 {
        let t = enum_ds(n).unwrap();
        ok &= rank_mu(&t, 1, &DecSeq::empty()) == RankValue::Rank(n as u64);
    }
    let elapsed = start.elapsed();
    report(1, "rank law", ok && within(elapsed, 1), elapsed);
}

#[test]
fn criterion_02_rank_oracle_equivalence() {
    let _guard = exclusive();
    let start = Instant::now();
    let host = enum_ds(5).unwrap();
    let masks = cone_masks(&host, 0, 12);
    let mus = [1u64, 2, 3];

    let exhaustive_ok = masks
        .par_iter()
        .with_min_len(512)
        .all(|&mask| {
            let t = tree_from_mask(&host, mask);
            mus.iter().all(|&mu| {
                rank_table(&t, mu) == rank_fixpoint_oracle_table(&t, mu).unwrap()
            })
        });

    let random_ok = (0..500u64).into_par_iter().all(|i| {
        let t = random_tree(4200 + i, 200, 16);
        mus.iter().all(|&mu| {
            rank_table(&t, mu) == rank_fixpoint_oracle_table(&t, mu).unwrap()
        })
    });

    // the per-node operations agree with the tables they come from
    let t3 = enum_ds(3).unwrap();
    let spot_ok = t3.nodes().iter().all(|node| {
        rank_mu(&t3, 2, node) == rank_fixpoint_oracle(&t3, 2, node).unwrap()
    }) && rank_mu(&t3, 1, &seq(&[9])) == RankValue::NotInTree
        && rank_fixpoint_oracle(&t3, 1, &seq(&[9])).unwrap() == RankValue::NotInTree;

    let elapsed = start.elapsed();
    let ok = exhaustive_ok && random_ok && spot_ok && masks.len() > 100_000;
    report(2, "rank oracle equivalence", ok && within(elapsed, 30), elapsed);
}

#[test]
fn criterion_03_rank_monotonicity() {
    let _guard = exclusive();
    let start = Instant::now();
    let host = enum_ds(5).unwrap();
    let masks = cone_masks(&host, 0, 12);
    let pairs = [(1u64, 2u64), (2, 3), (1, 3)];

    let exhaustive_ok = masks
        .par_iter()
        .with_min_len(512)
        .all(|&mask| {
            let t = tree_from_mask(&host, mask);
            pairs.iter().all(|&(lo, hi)| {
                let a = rank_table(&t, lo);
                let b = rank_table(&t, hi);
                a.iter().zip(b.iter()).all(|(x, y)| x >= y)
            })
        });

    let random_ok = (0..500u64).into_par_iter().all(|i| {
        let t = random_tree(4200 + i, 200, 16);
        pairs.iter().all(|&(lo, hi)| {
            let a = rank_table(&t, lo);
            let b = rank_table(&t, hi);
            a.iter().zip(b.iter()).all(|(x, y)| x >= y)
        })
    });

    let elapsed = start.elapsed();
    report(3, "rank monotonicity in mu", exhaustive_ok && random_ok, elapsed);
}

#[test]
fn criterion_04_constructive_embedding() {
    let _guard = exclusive();
    let start = Instant::now();
    let mut checked = 0u32;
    let mut ok = true;
    let mut case = 0u64;
    while checked < 200 {
        case += 1;
        let t = random_tree(7000 + case, 60, 10);
        let node_pick = (case as usize * 7) % t.len();
        let eta = t.node(node_pick).clone();
        let mu = (case % 3) + 1;
        let RankValue::Rank(r) = rank_mu(&t, mu, &eta) else {
            continue;
        };
        let alpha = r.min(mu) as u32; // alpha <= mu and alpha <= rank
        let f = match embed_ds(&t, mu, alpha, &eta) {
            Ok(f) => f,
            Err(_) => {
                ok = false;
                break;
            }
        };
        let domain = embed_domain(&eta, alpha).unwrap();
        ok &= validate_embedding(&f, &domain, &t).is_ok();
        // fixes every prefix of eta
        for l in 0..=eta.len() {
            let p = eta.prefix(l);
            ok &= f.image_of(&p) == Some(&p);
        }
        // image inside t
        ok &= f.pairs().iter().all(|(_, image)| t.contains(image));
        if !ok {
            break;
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    report(
        4,
        "constructive embedding",
        ok && checked == 200 && within(elapsed, 10),
        elapsed,
    );
}

#[test]
fn criterion_05_order_algorithms() {
    let _guard = exclusive();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(515);
    let mut ok = true;

    for _ in 0..1000 {
        let size = rng.gen_range(1..=8);
        let mut set: Vec<DecSeq> = (0..size).map(|_| random_seq(&mut rng, 5)).collect();
        set.dedup();
        let mut by_lex2 = set.clone();
        by_lex2.sort_by(cmp_lex2);
        let mut by_lex1 = set.clone();
        by_lex1.sort_by(cmp_lex1);
        ok &= min_lex2(&set).as_ref() == Some(&by_lex2[0]);
        ok &= min_lex1(&set).as_ref() == Some(&by_lex1[0]);
    }

    for _ in 0..10_000 {
        let a = random_seq(&mut rng, 5);
        let b = random_seq(&mut rng, 5);
        let c = random_seq(&mut rng, 5);
        for cmp in [cmp_lex1, cmp_lex2, cmp_lex3] {
            ok &= cmp(&a, &b) == cmp(&b, &a).reverse();
            ok &= (cmp(&a, &b) == std::cmp::Ordering::Equal) == (a == b);
            if cmp(&a, &b) != std::cmp::Ordering::Greater
                && cmp(&b, &c) != std::cmp::Ordering::Greater
            {
                ok &= cmp(&a, &c) != std::cmp::Ordering::Greater;
            }
        }
    }

    let elapsed = start.elapsed();
    report(5, "order algorithms", ok, elapsed);
}

#[test]
fn criterion_06_similarity() {
    let _guard = exclusive();
    let start = Instant::now();
    let t4 = enum_ds(4).unwrap();
    let nodes: Vec<DecSeq> = t4.nodes_lex2().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(616);
    let mut ok = true;

    // equivalence laws on seeded triples; constructed in-class triples make
    // the transitivity clause bite
    let mut classes: HashMap<SimCode, Vec<Tuple>> = HashMap::new();
    for k in 1..=2usize {
        for tuple in enum_tuples(&t4, k) {
            classes
                .entry(sim_code(tuple.items()).unwrap())
                .or_default()
                .push(tuple);
        }
    }
    let rich: Vec<&Vec<Tuple>> = classes.values().filter(|v| v.len() >= 3).collect();
    for i in 0..10_000 {
        let (u, v, w) = if i % 4 == 0 && !rich.is_empty() {
            let class = rich[rng.gen_range(0..rich.len())];
            (
                class[rng.gen_range(0..class.len())].clone(),
                class[rng.gen_range(0..class.len())].clone(),
                class[rng.gen_range(0..class.len())].clone(),
            )
        } else {
            let mut draw = || {
                let size = rng.gen_range(0..=3);
                let mut pick: BTreeSet<usize> = BTreeSet::new();
                while pick.len() < size {
                    pick.insert(rng.gen_range(0..nodes.len()));
                }
                Tuple::new(pick.iter().map(|&i| nodes[i].clone()).collect()).unwrap()
            };
            (draw(), draw(), draw())
        };
        ok &= is_similar(u.items(), u.items()).unwrap();
        ok &= is_similar(u.items(), v.items()).unwrap() == is_similar(v.items(), u.items()).unwrap();
        if is_similar(u.items(), v.items()).unwrap() && is_similar(v.items(), w.items()).unwrap() {
            ok &= is_similar(u.items(), w.items()).unwrap();
        }
    }

    // end-extension law, exhaustively over enum_ds(4): every prefix tuple,
    // every pair of one-point extensions
    let exhaustive_ok = (0..=nodes.len())
        .into_par_iter()
        .all(|k| {
            enum_tuples(&t4, k).into_iter().all(|prefix| {
                let from = match prefix.last() {
                    None => 0,
                    Some(last) => {
                        nodes
                            .iter()
                            .position(|n| n == last)
                            .unwrap()
                            + 1
                    }
                };
                let ext = &nodes[from..];
                for i in 0..ext.len() {
                    for j in (i + 1)..ext.len() {
                        let agrees = decseq::similarity::end_ext_similar(&prefix, &ext[i], &ext[j])
                            .unwrap();
                        if agrees {
                            let e1 = prefix.extend_with(&ext[i]).unwrap();
                            let e2 = prefix.extend_with(&ext[j]).unwrap();
                            if !is_similar(e1.items(), e2.items()).unwrap() {
                                return false;
                            }
                        }
                    }
                }
                true
            })
        });

    // the k = 0 reading: singletons are similar exactly when lengths agree
    let singleton_ok = nodes.iter().all(|a| {
        nodes.iter().all(|b| {
            is_similar(&[a.clone()], &[b.clone()]).unwrap() == (a.len() == b.len())
        })
    });

    let elapsed = start.elapsed();
    report(
        6,
        "similarity laws",
        ok && exhaustive_ok && singleton_ok,
        elapsed,
    );
}

#[test]
fn criterion_07_partition_micro_theorems() {
    let _guard = exclusive();
    let start = Instant::now();
    let limits = SearchLimits::default();
    let t2 = enum_ds(2).unwrap();
    let t3 = enum_ds(3).unwrap();
    let s2 = enum_ds(2).unwrap();

    let failing = verify_partition_exhaustive(&t2, &s2, 2, 1, 1, &limits).unwrap();
    let mut ok = !failing.holds;
    // the counterexample is present and itself verified
    match &failing.counterexample {
        None => ok = false,
        Some(ce) => {
            ok &= find_n_end_uniform_copy(&t2, &s2, ce, 1, &limits)
                .unwrap()
                .is_none();
            ok &= ce.get(&Tuple::singleton(seq(&[0]))) == Some(0);
            ok &= ce.get(&Tuple::singleton(seq(&[1]))) == Some(1);
        }
    }

    let holding = verify_partition_exhaustive(&t3, &s2, 2, 1, 1, &limits).unwrap();
    ok &= holding.holds && holding.colourings_checked == 256;

    let single = Tree::new(vec![DecSeq::empty()]).unwrap();
    let trivial = verify_partition_exhaustive(&t3, &single, 3, 1, 1, &limits).unwrap();
    ok &= trivial.holds;

    let elapsed = start.elapsed();
    report(
        7,
        "partition micro-theorems",
        ok && within(elapsed, 5),
        elapsed,
    );
}

#[test]
fn criterion_08_length_colouring_oracle() {
    let _guard = exclusive();
    let start = Instant::now();
    let limits = SearchLimits::default();
    let t5 = enum_ds(5).unwrap();
    let s3 = enum_ds(3).unwrap();
    let mut ok = true;
    for pattern_bits in 0u32..64 {
        let pattern: Vec<u64> = (0..6).map(|i| ((pattern_bits >> i) & 1) as u64).collect();
        let c = Colouring::singleton_by_length(&t5, 2, &pattern).unwrap();
        match find_n_end_uniform_copy(&t5, &s3, &c, 1, &limits).unwrap() {
            None => ok = false,
            Some(w) => {
                ok &= validate_embedding(&w.embedding, &s3, &t5).is_ok();
                let image = Tree::new(w.embedding.image_nodes()).unwrap();
                ok &= check_n_end_uniform(&image, &c, 1).unwrap().is_uniform();
            }
        }
        if !ok {
            break;
        }
    }
    let elapsed = start.elapsed();
    report(8, "length-colouring oracle", ok, elapsed);
}

// Criterion 9 helpers: end-uniform colourings are exactly the assignments
// constant on each (literal prefix, whole similarity code) group, so a
// family is enumerated as the product of free colour choices per group.
struct EndUniformFamily {
    arities: Vec<usize>,
    mu: u64,
    // tuple -> group id; groups are (prefix, code) classes, or (code) alone
    // for class-uniform families
    group_of: Vec<(Tuple, usize)>,
    group_count: usize,
}

impl EndUniformFamily {
    fn grouped(t: &Tree, arities: &[usize], mu: u64, by_class_only: bool) -> EndUniformFamily {
        let mut keys: HashMap<(Option<Tuple>, SimCode), usize> = HashMap::new();
        let mut group_of = Vec::new();
        for &k in arities {
            for tuple in enum_tuples(t, k) {
                let code = sim_code(tuple.items()).unwrap();
                let key = if by_class_only {
                    (None, code)
                } else {
                    (Some(tuple.take(k - 1)), code)
                };
                let next = keys.len();
                let id = *keys.entry(key).or_insert(next);
                group_of.push((tuple, id));
            }
        }
        EndUniformFamily {
            arities: arities.to_vec(),
            mu,
            group_of,
            group_count: keys.len(),
        }
    }

    fn size(&self) -> usize {
        (self.mu as usize).pow(self.group_count as u32)
    }

    fn colouring_at(&self, index: u64) -> Colouring {
        let mut c = Colouring::new(self.mu, self.arities.iter().copied());
        for (tuple, group) in &self.group_of {
            let digit = (index / self.mu.pow(*group as u32)) % self.mu;
            c.set(tuple.clone(), digit).unwrap();
        }
        c
    }
}

// One reduction-soundness instance: conflict-free transform, injective
// pair encoding, and the n -> n+1 lift over every small subtree.
fn reduction_instance_ok(
    tp: &Tree,
    c: &Colouring,
    reg: &ClassRegistry,
    subtrees: &[Tree],
) -> bool {
    // end-uniform by construction, so the transform inside the composition
    // must be conflict-free
    let Ok((composed, d)) = compose_reduction(tp, c, reg) else {
        return false;
    };
    // injectivity of the encoding on the realised d-values
    let mut encoder = PairEncoder::new(reg.len());
    let mut seen: HashMap<Vec<(usize, u64)>, u64> = HashMap::new();
    let mut codes: HashSet<u64> = HashSet::new();
    for partial in d.values() {
        let key: Vec<(usize, u64)> = partial.iter().map(|(&m, &c)| (m, c)).collect();
        let code = encoder.encode(partial).unwrap();
        match seen.get(&key) {
            None => {
                if !codes.insert(code) {
                    return false; // distinct maps collided
                }
                seen.insert(key, code);
            }
            Some(&prev) => {
                if prev != code {
                    return false; // equal maps diverged
                }
            }
        }
    }
    // the lift: if a subtree is 1-end-uniform for f∘d then it is
    // 2-end-uniform for c
    for sub in subtrees {
        let hypothesis = check_n_end_uniform(sub, &composed, 1).unwrap().is_uniform();
        if hypothesis {
            let conclusion = check_n_end_uniform(sub, c, 2).unwrap().is_uniform();
            if !conclusion {
                return false;
            }
        }
    }
    true
}

#[test]
fn criterion_09_reduction_soundness() {
    let _guard = exclusive();
    let start = Instant::now();
    let mut ok = true;

    // family A: the full end-uniform family over ds(2), both arities
    {
        let tp = enum_ds(2).unwrap();
        let reg = ClassRegistry::from_tree(&tp, 2).unwrap();
        let subtrees: Vec<Tree> = cone_masks(&tp, 0, 8)
            .into_iter()
            .map(|m| tree_from_mask(&tp, m))
            .collect();
        for mu in 1..=2u64 {
            let family = EndUniformFamily::grouped(&tp, &[1, 2], mu, false);
            ok &= (0..family.size()).into_par_iter().all(|i| {
                reduction_instance_ok(&tp, &family.colouring_at(i as u64), &reg, &subtrees)
            });
        }
    }

    // family B: every end-uniform singleton colouring of ds(3)
    let t3 = enum_ds(3).unwrap();
    let reg3 = ClassRegistry::from_tree(&t3, 3).unwrap();
    let subtrees3: Vec<Tree> = cone_masks(&t3, 0, 8)
        .into_iter()
        .map(|m| tree_from_mask(&t3, m))
        .collect();
    {
        let family = EndUniformFamily::grouped(&t3, &[1], 2, false);
        ok &= (0..family.size()).into_par_iter().all(|i| {
            reduction_instance_ok(&t3, &family.colouring_at(i as u64), &reg3, &subtrees3)
        });
    }

    // family C: ds(3), both arities, pair part constant on similarity
    // classes (an exhaustive end-uniform subfamily the full 2^27 product
    // cannot fit in the time budget; see the ledger)
    {
        let family = EndUniformFamily::grouped(&t3, &[1, 2], 2, true);
        assert_eq!(family.group_count, 18);
        ok &= (0..family.size()).into_par_iter().with_min_len(256).all(|i| {
            reduction_instance_ok(&t3, &family.colouring_at(i as u64), &reg3, &subtrees3)
        });
    }

    // family D: the full end-uniform family over a six-node subtree of
    // ds(3), where pair colours may depend on the literal prefix
    {
        let tp = Tree::new(vec![
            DecSeq::empty(),
            seq(&[0]),
            seq(&[1]),
            seq(&[2]),
            seq(&[2, 0]),
            seq(&[2, 1]),
        ])
        .unwrap();
        let reg = ClassRegistry::from_tree(&tp, 3).unwrap();
        let subtrees: Vec<Tree> = cone_masks(&tp, 0, 8)
            .into_iter()
            .map(|m| tree_from_mask(&tp, m))
            .collect();
        let family = EndUniformFamily::grouped(&tp, &[1, 2], 2, false);
        assert_eq!(family.group_count, 15);
        ok &= (0..family.size()).into_par_iter().with_min_len(64).all(|i| {
            reduction_instance_ok(&tp, &family.colouring_at(i as u64), &reg, &subtrees)
        });
    }

    let elapsed = start.elapsed();
    report(
        9,
        "reduction soundness",
        ok && within(elapsed, 60),
        elapsed,
    );
}

#[test]
fn criterion_10_scattered_embeddings() {
    let _guard = exclusive();
    let start = Instant::now();

    fn terms_of_depth(depth: u32) -> Vec<HausdorffTerm> {
        if depth == 1 {
            return vec![HausdorffTerm::Atom];
        }
        let smaller = terms_of_depth(depth - 1);
        let mut out = vec![HausdorffTerm::Atom];
        for base in &smaller {
            for beta in 1..=4u64 {
                for dir in [Direction::Fwd, Direction::Rev] {
                    out.push(
                        HausdorffTerm::prod(base.clone(), Ordinal::nat(beta), dir).unwrap(),
                    );
                }
            }
        }
        for l in &smaller {
            for r in &smaller {
                out.push(HausdorffTerm::sum(l.clone(), r.clone()));
            }
        }
        out
    }

    let terms = terms_of_depth(3);
    let count = terms.len();
    let ok = terms
        .par_iter()
        .all(|t| check_order_embedding(t).unwrap());

    let elapsed = start.elapsed();
    report(
        10,
        "scattered embeddings",
        ok && count == 181 && within(elapsed, 10),
        elapsed,
    );
}

#[test]
fn criterion_11_determinism_across_threads() {
    let _guard = exclusive();
    let start = Instant::now();

    fn run_scenarios() -> String {
        let limits = SearchLimits::default();
        let mut out = String::new();
        let t2 = enum_ds(2).unwrap();
        let t3 = enum_ds(3).unwrap();
        let t5 = enum_ds(5).unwrap();
        let s2 = enum_ds(2).unwrap();
        let s3 = enum_ds(3).unwrap();

        let r1 = verify_partition_exhaustive(&t2, &s2, 2, 1, 1, &limits).unwrap();
        out.push_str(&r1.to_string());
        let r2 = verify_partition_exhaustive(&t3, &s2, 2, 1, 1, &limits).unwrap();
        out.push_str(&r2.to_string());
        let r3 = verify_partition_exhaustive(&t2, &s2, 2, 2, 1, &limits).unwrap();
        out.push_str(&r3.to_string());

        let mut c3 = Colouring::constant(&t3, [1], 2, 0).unwrap();
        c3.set(Tuple::singleton(seq(&[1])), 1).unwrap();
        if let Some(w) = find_n_end_uniform_copy(&t3, &s2, &c3, 1, &limits).unwrap() {
            out.push_str(&w.to_string());
        }
        let by_len = Colouring::singleton_by_length(&t5, 2, &[0, 1, 1, 0, 1, 0]).unwrap();
        if let Some(w) = find_n_end_uniform_copy(&t5, &s3, &by_len, 1, &limits).unwrap() {
            out.push_str(&w.to_string());
        }
        let c = random_colouring(&t3, &[1], 2, 31415);
        out.push_str(&c.to_text());
        out
    }

    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(run_scenarios);
    let eight = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap()
        .install(run_scenarios);

    let ok = single == eight && !single.is_empty();
    let elapsed = start.elapsed();
    report(11, "determinism across threads", ok, elapsed);
}
