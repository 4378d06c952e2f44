//! Similarity classes of finite tuples and uniformity checkers.
//!
//! A finite subset of a tree is identified with the <²ₗₓ-increasing sequence
//! listing it (a [`Tuple`]). Two listings are similar when the component
//! lengths, the pairwise meet lengths, and the <²ₗₓ order pattern all agree;
//! [`SimCode`] is the canonical invariant, so similarity is exactly code
//! equality. A [`Colouring`] is a finite partial map from tuples to colours
//! below μ, with the tuple sizes it covers declared up front.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::orders::cmp_lex2;
use crate::tree::{meet_len, DecSeq, Tree, TreeError};

/// A <²ₗₓ-increasing sequence of pairwise distinct sequences.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Tuple {
    items: Vec<DecSeq>,
}

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error("tuple items must be <2-increasing: {prev} is not below {next}")]
    NotIncreasing { prev: DecSeq, next: DecSeq },
    #[error("duplicate item {item}")]
    DuplicateItem { item: DecSeq },
    #[error("colour {colour} is not below mu={mu}")]
    ColourOutOfRange { colour: u64, mu: u64 },
    #[error("no assignment for tuple [{tuple}] (colouring not total on the checked scope)")]
    MissingAssignment { tuple: Tuple },
    #[error("similarity code not in the registry universe: {code}")]
    UnknownClass { code: SimCode },
    #[error("colouring file line {line}: {message}")]
    FileLine { line: usize, message: String },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

impl Tuple {
    pub fn empty() -> Tuple {
        Tuple { items: Vec::new() }
    }

    /// Validates the <²ₗₓ-increasing listing.
    pub fn new(items: Vec<DecSeq>) -> Result<Tuple, SimilarityError> {
        for i in 1..items.len() {
            match cmp_lex2(&items[i - 1], &items[i]) {
                Ordering::Less => {}
                Ordering::Equal => {
                    return Err(SimilarityError::DuplicateItem {
                        item: items[i].clone(),
                    })
                }
                Ordering::Greater => {
                    return Err(SimilarityError::NotIncreasing {
                        prev: items[i - 1].clone(),
                        next: items[i].clone(),
                    })
                }
            }
        }
        Ok(Tuple { items })
    }

    pub fn singleton(item: DecSeq) -> Tuple {
        Tuple { items: vec![item] }
    }

    pub fn items(&self) -> &[DecSeq] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn last(&self) -> Option<&DecSeq> {
        self.items.last()
    }

    /// The first `k` items as a tuple.
    pub fn take(&self, k: usize) -> Tuple {
        Tuple {
            items: self.items[..k.min(self.items.len())].to_vec(),
        }
    }

    /// Appends a one-point <²-extension.
    pub fn extend_with(&self, item: &DecSeq) -> Result<Tuple, SimilarityError> {
        let mut items = self.items.clone();
        items.push(item.clone());
        Tuple::new(items)
    }

    /// Parses `SEQ ; SEQ ; ...` in the tree-file sequence syntax.
    pub fn parse(input: &str) -> Result<Tuple, SimilarityError> {
        let items = input
            .split(';')
            .map(|part| DecSeq::parse(part.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        Tuple::new(items)
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            write!(f, "{item}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// Canonical tuple order: shorter first, then elementwise <²ₗₓ. This is the
/// enumeration order of [`enum_tuples`] within each size.
impl Ord for Tuple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            for (a, b) in self.items.iter().zip(other.items.iter()) {
                match cmp_lex2(a, b) {
                    Ordering::Equal => {}
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Tuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical similarity invariant: length of the listing, component
/// lengths, the matrix of pairwise meet lengths (row-major), and the <²ₗₓ
/// order pattern of the listed items. Two listings are similar iff their
/// codes are equal; the derived `Ord` is the canonical registry order
/// (n, lengths, meets row-major, order pattern).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimCode {
    n: usize,
    lengths: Vec<usize>,
    meets: Vec<usize>,
    order: Vec<usize>,
}

impl SimCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// lg(item_i ∩ item_j).
    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.meets[i * self.n + j]
    }

    pub fn meets_row_major(&self) -> &[usize] {
        &self.meets
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

impl fmt::Display for SimCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[usize]> = self.meets.chunks(self.n.max(1)).collect();
        write!(
            f,
            "n={} lengths={:?} meets={:?} order={:?}",
            self.n, self.lengths, rows, self.order
        )
    }
}

impl fmt::Debug for SimCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The similarity code of a listing of pairwise distinct sequences.
pub fn sim_code(items: &[DecSeq]) -> Result<SimCode, SimilarityError> {
    let n = items.len();
    let lengths: Vec<usize> = items.iter().map(|s| s.len()).collect();
    let mut meets = vec![vec![0usize; n]; n];
    for i in 0..n {
        meets[i][i] = lengths[i];
        for j in (i + 1)..n {
            if items[i] == items[j] {
                return Err(SimilarityError::DuplicateItem {
                    item: items[i].clone(),
                });
            }
            let m = meet_len(&items[i], &items[j]);
            meets[i][j] = m;
            meets[j][i] = m;
        }
    }
    // order[i] = how many items are <2-below item i
    let order: Vec<usize> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| cmp_lex2(&items[j], &items[i]) == Ordering::Less)
                .count()
        })
        .collect();
    Ok(SimCode {
        n,
        lengths,
        meets,
        order,
    })
}

/// Whether two listings are similar (equal codes).
pub fn is_similar(u: &[DecSeq], v: &[DecSeq]) -> Result<bool, SimilarityError> {
    Ok(sim_code(u)? == sim_code(v)?)
}

/// One-point end-extension test: with a common prefix tuple, two extensions
/// r1, r2 extend it similarly exactly when their lengths agree and (unless
/// the prefix is empty) their meets with the last prefix item have equal
/// length. When this holds the two extended listings are similar.
pub fn end_ext_similar(
    prefix: &Tuple,
    r1: &DecSeq,
    r2: &DecSeq,
) -> Result<bool, SimilarityError> {
    // both extensions must yield valid tuples
    prefix.extend_with(r1)?;
    prefix.extend_with(r2)?;
    if r1.len() != r2.len() {
        return Ok(false);
    }
    match prefix.last() {
        None => Ok(true),
        Some(last) => Ok(meet_len(r1, last) == meet_len(r2, last)),
    }
}

/// A finite partial colouring with declared tuple sizes.
#[derive(Clone, PartialEq, Eq)]
pub struct Colouring {
    num_colours: u64,
    arities: BTreeSet<usize>,
    assignment: HashMap<Tuple, u64>,
}

impl Colouring {
    pub fn new(num_colours: u64, arities: impl IntoIterator<Item = usize>) -> Colouring {
        assert!(num_colours >= 1, "a colouring needs at least one colour");
        Colouring {
            num_colours,
            arities: arities.into_iter().collect(),
            assignment: HashMap::new(),
        }
    }

    pub fn num_colours(&self) -> u64 {
        self.num_colours
    }

    pub fn arities(&self) -> &BTreeSet<usize> {
        &self.arities
    }

    pub fn set(&mut self, tuple: Tuple, colour: u64) -> Result<(), SimilarityError> {
        if colour >= self.num_colours {
            return Err(SimilarityError::ColourOutOfRange {
                colour,
                mu: self.num_colours,
            });
        }
        self.arities.insert(tuple.len());
        self.assignment.insert(tuple, colour);
        Ok(())
    }

    pub fn get(&self, tuple: &Tuple) -> Option<u64> {
        self.assignment.get(tuple).copied()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    fn require(&self, tuple: &Tuple) -> Result<u64, SimilarityError> {
        self.get(tuple)
            .ok_or_else(|| SimilarityError::MissingAssignment {
                tuple: tuple.clone(),
            })
    }

    /// Constant colouring on all tuples of the given sizes from `t`.
    pub fn constant(
        t: &Tree,
        arities: impl IntoIterator<Item = usize>,
        num_colours: u64,
        colour: u64,
    ) -> Result<Colouring, SimilarityError> {
        let arities: BTreeSet<usize> = arities.into_iter().collect();
        let mut c = Colouring::new(num_colours, arities.iter().copied());
        for &k in &arities {
            for tuple in enum_tuples(t, k) {
                c.set(tuple, colour)?;
            }
        }
        Ok(c)
    }

    /// Singleton colouring that depends only on node length:
    /// `pattern[len]`, taken modulo `num_colours`.
    pub fn singleton_by_length(
        t: &Tree,
        num_colours: u64,
        pattern: &[u64],
    ) -> Result<Colouring, SimilarityError> {
        let mut c = Colouring::new(num_colours, [1]);
        for node in t.nodes() {
            let colour = pattern.get(node.len()).copied().unwrap_or(0) % num_colours;
            c.set(Tuple::singleton(node.clone()), colour)?;
        }
        Ok(c)
    }

    /// Colour every tuple by the registry index of its similarity class,
    /// modulo `num_colours`. Class-constant, hence uniform.
    pub fn by_class(
        t: &Tree,
        arities: impl IntoIterator<Item = usize>,
        num_colours: u64,
        registry: &ClassRegistry,
    ) -> Result<Colouring, SimilarityError> {
        let arities: BTreeSet<usize> = arities.into_iter().collect();
        let mut c = Colouring::new(num_colours, arities.iter().copied());
        for &k in &arities {
            for tuple in enum_tuples(t, k) {
                let idx = registry.index_of(&sim_code(tuple.items())?)?;
                c.set(tuple, idx as u64 % num_colours)?;
            }
        }
        Ok(c)
    }

    /// Parses the colouring file format: a `mu=N` header, then lines
    /// `SEQ ; SEQ ; ... -> COLOUR` with tuples listed <²-increasing.
    pub fn parse_text(input: &str) -> Result<Colouring, SimilarityError> {
        let mut mu: Option<u64> = None;
        let mut c: Option<Colouring> = None;
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("mu=") {
                if mu.is_some() {
                    return Err(SimilarityError::FileLine {
                        line: lineno + 1,
                        message: "duplicate mu= header".to_string(),
                    });
                }
                let value: u64 = rest.trim().parse().map_err(|_| SimilarityError::FileLine {
                    line: lineno + 1,
                    message: format!("bad mu value {rest:?}"),
                })?;
                if value == 0 {
                    return Err(SimilarityError::FileLine {
                        line: lineno + 1,
                        message: "mu must be positive".to_string(),
                    });
                }
                mu = Some(value);
                c = Some(Colouring::new(value, []));
                continue;
            }
            let Some(colouring) = c.as_mut() else {
                return Err(SimilarityError::FileLine {
                    line: lineno + 1,
                    message: "expected the mu=N header first".to_string(),
                });
            };
            let Some((tuple_part, colour_part)) = line.rsplit_once("->") else {
                return Err(SimilarityError::FileLine {
                    line: lineno + 1,
                    message: "expected `TUPLE -> COLOUR`".to_string(),
                });
            };
            let tuple = Tuple::parse(tuple_part.trim()).map_err(|e| SimilarityError::FileLine {
                line: lineno + 1,
                message: e.to_string(),
            })?;
            if tuple.is_empty() {
                return Err(SimilarityError::FileLine {
                    line: lineno + 1,
                    message: "empty tuples are not allowed in files".to_string(),
                });
            }
            let colour: u64 =
                colour_part
                    .trim()
                    .parse()
                    .map_err(|_| SimilarityError::FileLine {
                        line: lineno + 1,
                        message: format!("bad colour {colour_part:?}"),
                    })?;
            colouring.set(tuple, colour).map_err(|e| SimilarityError::FileLine {
                line: lineno + 1,
                message: e.to_string(),
            })?;
        }
        c.ok_or(SimilarityError::FileLine {
            line: 0,
            message: "missing mu=N header".to_string(),
        })
    }

    /// Serialises in the colouring file format, tuples in canonical order.
    pub fn to_text(&self) -> String {
        let mut out = format!("mu={}\n", self.num_colours);
        let mut entries: Vec<(&Tuple, u64)> =
            self.assignment.iter().map(|(t, &c)| (t, c)).collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        for (tuple, colour) in entries {
            out.push_str(&format!("{tuple} -> {colour}\n"));
        }
        out
    }
}

impl fmt::Display for Colouring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Debug for Colouring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Colouring(mu={}, arities={:?}, {} entries)",
            self.num_colours, self.arities, self.assignment.len()
        )
    }
}

/// All size-`k` tuples over the nodes of `t`, in canonical order
/// (combinations of the <²ₗₓ-sorted node list, lexicographically by index).
pub fn enum_tuples(t: &Tree, k: usize) -> Vec<Tuple> {
    let nodes: Vec<&DecSeq> = t.nodes_lex2().collect();
    let mut out = Vec::new();
    if k > nodes.len() {
        return out;
    }
    if k == 0 {
        out.push(Tuple::empty());
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(Tuple {
            items: idx.iter().map(|&i| nodes[i].clone()).collect(),
        });
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + nodes.len() - k {
                break;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Result of a uniformity check: either uniform, or the first conflicting
/// pair in canonical enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UniformityOutcome {
    Uniform,
    Violation(Violation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub first: Tuple,
    pub second: Tuple,
    pub first_colour: u64,
    pub second_colour: u64,
}

impl UniformityOutcome {
    pub fn is_uniform(&self) -> bool {
        matches!(self, UniformityOutcome::Uniform)
    }
}

/// A constraint class examined by a checker: the literal shared prefix, the
/// similarity code of the whole listing, and the colour the class carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintClass {
    pub prefix: Tuple,
    pub code: SimCode,
    pub colour: u64,
}

/// Is `c` constant on every similarity class realised in `t`? Checks every
/// declared arity; `c` must be total on those tuples.
pub fn check_uniform(t: &Tree, c: &Colouring) -> Result<UniformityOutcome, SimilarityError> {
    let mut seen: HashMap<SimCode, (Tuple, u64)> = HashMap::new();
    for &k in c.arities() {
        // codes of different sizes never collide, so one map across sizes
        // and per-size passes report the same first violation
        for tuple in enum_tuples(t, k) {
            let colour = c.require(&tuple)?;
            let code = sim_code(tuple.items())?;
            match seen.get(&code) {
                None => {
                    seen.insert(code, (tuple, colour));
                }
                Some((first, first_colour)) => {
                    if *first_colour != colour {
                        return Ok(UniformityOutcome::Violation(Violation {
                            first: first.clone(),
                            second: tuple,
                            first_colour: *first_colour,
                            second_colour: colour,
                        }));
                    }
                }
            }
        }
    }
    Ok(UniformityOutcome::Uniform)
}

/// n-end-uniformity: for every k, any two size-(k+n) tuples that share their
/// first k items literally and are similar as whole listings must get the
/// same colour. Checks every declared arity ≥ n.
pub fn check_n_end_uniform(
    t: &Tree,
    c: &Colouring,
    n: usize,
) -> Result<UniformityOutcome, SimilarityError> {
    Ok(check_n_end_uniform_classes(t, c, n)?.0)
}

/// Like [`check_n_end_uniform`] but also reports the constraint classes
/// examined, in canonical enumeration order.
pub fn check_n_end_uniform_classes(
    t: &Tree,
    c: &Colouring,
    n: usize,
) -> Result<(UniformityOutcome, Vec<ConstraintClass>), SimilarityError> {
    assert!(n >= 1, "end-uniformity needs n >= 1");
    let mut classes: Vec<ConstraintClass> = Vec::new();
    for &size in c.arities() {
        if size < n {
            continue;
        }
        let k = size - n;
        let tuples = enum_tuples(t, size);
        let codes = tuples
            .iter()
            .map(|tu| sim_code(tu.items()))
            .collect::<Result<Vec<_>, _>>()?;
        // group keys borrow from this size's tuple list; codes of distinct
        // sizes can never collide, so a fresh map per size is sound
        let mut seen: HashMap<(&[DecSeq], &SimCode), (usize, u64)> = HashMap::new();
        for (idx, tuple) in tuples.iter().enumerate() {
            let colour = c.require(tuple)?;
            let key = (&tuple.items()[..k], &codes[idx]);
            match seen.get(&key) {
                None => {
                    classes.push(ConstraintClass {
                        prefix: tuple.take(k),
                        code: codes[idx].clone(),
                        colour,
                    });
                    seen.insert(key, (idx, colour));
                }
                Some(&(first_idx, first_colour)) => {
                    if first_colour != colour {
                        return Ok((
                            UniformityOutcome::Violation(Violation {
                                first: tuples[first_idx].clone(),
                                second: tuple.clone(),
                                first_colour,
                                second_colour: colour,
                            }),
                            classes,
                        ));
                    }
                }
            }
        }
    }
    Ok((UniformityOutcome::Uniform, classes))
}

/// A deterministic enumeration of similarity classes: all codes realised by
/// tuples of size at most `max_size` in a tree, in the canonical code order
/// (n, lengths, meets row-major, order pattern).
#[derive(Clone)]
pub struct ClassRegistry {
    codes: Vec<SimCode>,
    index: HashMap<SimCode, usize>,
}

impl ClassRegistry {
    pub fn from_tree(t: &Tree, max_size: usize) -> Result<ClassRegistry, SimilarityError> {
        let mut set: BTreeSet<SimCode> = BTreeSet::new();
        for k in 0..=max_size {
            for tuple in enum_tuples(t, k) {
                set.insert(sim_code(tuple.items())?);
            }
        }
        Ok(ClassRegistry::from_codes(set))
    }

    pub fn from_codes(codes: impl IntoIterator<Item = SimCode>) -> ClassRegistry {
        let set: BTreeSet<SimCode> = codes.into_iter().collect();
        let codes: Vec<SimCode> = set.into_iter().collect();
        let index = codes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        ClassRegistry { codes, index }
    }

    /// The rank of a code in the canonical order.
    pub fn index_of(&self, code: &SimCode) -> Result<usize, SimilarityError> {
        self.index
            .get(code)
            .copied()
            .ok_or_else(|| SimilarityError::UnknownClass { code: code.clone() })
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[SimCode] {
        &self.codes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::enum_ds;
    use proptest::prelude::*;

    fn seq(labels: &[u64]) -> DecSeq {
        DecSeq::from_nats(labels).unwrap()
    }

    fn tuple(items: &[&[u64]]) -> Tuple {
        Tuple::new(items.iter().map(|s| seq(s)).collect()).unwrap()
    }

    #[test]
    fn sim_code_examples() {
        let code = sim_code(&[seq(&[0]), seq(&[1])]).unwrap();
        assert_eq!(code.n(), 2);
        assert_eq!(code.lengths(), &[1, 1]);
        assert_eq!(code.meets()[0][1], 0);
        assert_eq!(code.order(), &[0, 1]);

        let a = sim_code(&[seq(&[1, 0])]).unwrap();
        let b = sim_code(&[seq(&[1])]).unwrap();
        assert_ne!(a, b);

        let c = sim_code(&[seq(&[2, 0]), seq(&[2, 1])]).unwrap();
        let d = sim_code(&[seq(&[1, 0]), seq(&[2, 1])]).unwrap();
        assert_ne!(c, d); // meet lengths 1 vs 0
    }

    #[test]
    fn is_similar_examples() {
        assert!(is_similar(&[seq(&[0]), seq(&[1])], &[seq(&[1]), seq(&[2])]).unwrap());
        let u = [seq(&[2, 1]), seq(&[2])];
        assert!(is_similar(&u, &u).unwrap());
        assert!(!is_similar(&[seq(&[1, 0])], &[seq(&[1])]).unwrap());
    }

    #[test]
    fn order_pattern_detects_reversal() {
        // same lengths and meets, listed in opposite <2 order
        let u = [seq(&[0]), seq(&[1])];
        let v = [seq(&[1]), seq(&[0])];
        assert!(!is_similar(&u, &v).unwrap());
    }

    #[test]
    fn end_ext_examples() {
        let p = Tuple::new(vec![seq(&[0])]).unwrap();
        assert!(end_ext_similar(&p, &seq(&[1]), &seq(&[2])).unwrap());
        assert!(!end_ext_similar(&p, &seq(&[1]), &seq(&[2, 1])).unwrap());
        let empty = Tuple::empty();
        assert!(end_ext_similar(&empty, &seq(&[1]), &seq(&[2])).unwrap());
        // ordering precondition violated: extension below the prefix
        assert!(end_ext_similar(&tuple(&[&[2]]), &seq(&[0]), &seq(&[1])).is_err());
    }

    #[test]
    fn enum_tuples_order() {
        let t = enum_ds(2).unwrap();
        let singles = enum_tuples(&t, 1);
        let listed: Vec<String> = singles.iter().map(|t| t.to_string()).collect();
        assert_eq!(listed, vec!["0", "1,0", "1", "-"]);
        assert_eq!(enum_tuples(&t, 2).len(), 6);
        assert_eq!(enum_tuples(&t, 0), vec![Tuple::empty()]);
        assert_eq!(enum_tuples(&t, 5).len(), 0);
    }

    #[test]
    fn uniform_examples() {
        let t = enum_ds(2).unwrap();
        let constant = Colouring::constant(&t, [1], 2, 0).unwrap();
        assert!(check_uniform(&t, &constant).unwrap().is_uniform());

        let mut c = Colouring::constant(&t, [1], 2, 0).unwrap();
        c.set(Tuple::singleton(seq(&[1])), 1).unwrap();
        match check_uniform(&t, &c).unwrap() {
            UniformityOutcome::Violation(v) => {
                assert_eq!(v.first, Tuple::singleton(seq(&[0])));
                assert_eq!(v.second, Tuple::singleton(seq(&[1])));
            }
            UniformityOutcome::Uniform => panic!("expected a violation"),
        }

        let reg = ClassRegistry::from_tree(&t, 2).unwrap();
        let by_class = Colouring::by_class(&t, [1, 2], 4, &reg).unwrap();
        assert!(check_uniform(&t, &by_class).unwrap().is_uniform());
    }

    #[test]
    fn totality_is_enforced() {
        let t = enum_ds(2).unwrap();
        let mut c = Colouring::new(2, [1]);
        c.set(Tuple::singleton(seq(&[0])), 0).unwrap();
        assert!(matches!(
            check_uniform(&t, &c),
            Err(SimilarityError::MissingAssignment { .. })
        ));
    }

    #[test]
    fn end_uniform_examples() {
        let t = enum_ds(2).unwrap();
        let by_len = Colouring::singleton_by_length(&t, 2, &[0, 1, 0]).unwrap();
        assert!(check_n_end_uniform(&t, &by_len, 1).unwrap().is_uniform());

        let mut c = Colouring::constant(&t, [1], 2, 0).unwrap();
        c.set(Tuple::singleton(seq(&[1])), 1).unwrap();
        assert!(!check_n_end_uniform(&t, &c, 1).unwrap().is_uniform());

        let constant = Colouring::constant(&t, [1, 2], 2, 1).unwrap();
        for n in 1..=3 {
            assert!(check_n_end_uniform(&t, &constant, n).unwrap().is_uniform());
        }
    }

    #[test]
    fn registry_is_deterministic_and_injective() {
        let t = enum_ds(3).unwrap();
        let reg = ClassRegistry::from_tree(&t, 2).unwrap();
        assert_eq!(reg.index_of(&reg.codes()[0].clone()).unwrap(), 0);
        let mut seen = std::collections::HashSet::new();
        for code in reg.codes() {
            assert!(seen.insert(reg.index_of(code).unwrap()));
            assert_eq!(reg.index_of(code).unwrap(), reg.index_of(code).unwrap());
        }
        let unknown = sim_code(&[seq(&[9, 8, 7, 6])]).unwrap();
        assert!(matches!(
            reg.index_of(&unknown),
            Err(SimilarityError::UnknownClass { .. })
        ));
    }

    #[test]
    fn colouring_file_roundtrip() {
        let t = enum_ds(2).unwrap();
        let mut c = Colouring::constant(&t, [1], 3, 0).unwrap();
        c.set(tuple(&[&[0], &[1]]), 2).unwrap();
        let text = c.to_text();
        let back = Colouring::parse_text(&text).unwrap();
        assert_eq!(c, back);

        assert!(Colouring::parse_text("0 -> 1\n").is_err()); // no header
        assert!(Colouring::parse_text("mu=2\n1 ; 0 -> 0\n").is_err()); // not increasing
        assert!(Colouring::parse_text("mu=2\n0 -> 5\n").is_err()); // colour too big
    }

    fn arb_tuple(t: &Tree, max_len: usize) -> impl Strategy<Value = Tuple> + use<> {
        let nodes: Vec<DecSeq> = t.nodes().to_vec();
        prop::collection::btree_set(0..nodes.len(), 0..=max_len).prop_map(move |idxs| {
            let mut items: Vec<DecSeq> = idxs.iter().map(|&i| nodes[i].clone()).collect();
            items.sort_by(cmp_lex2);
            Tuple::new(items).unwrap()
        })
    }

    proptest! {
        #[test]
        fn similarity_is_an_equivalence(
            u in arb_tuple(&enum_ds(4).unwrap(), 4),
            v in arb_tuple(&enum_ds(4).unwrap(), 4),
            w in arb_tuple(&enum_ds(4).unwrap(), 4),
        ) {
            prop_assert!(is_similar(u.items(), u.items()).unwrap());
            prop_assert_eq!(
                is_similar(u.items(), v.items()).unwrap(),
                is_similar(v.items(), u.items()).unwrap()
            );
            if is_similar(u.items(), v.items()).unwrap() && is_similar(v.items(), w.items()).unwrap() {
                prop_assert!(is_similar(u.items(), w.items()).unwrap());
            }
        }

        #[test]
        fn end_ext_implies_similar(
            prefix in arb_tuple(&enum_ds(4).unwrap(), 3),
            i in 0usize..16,
            j in 0usize..16,
        ) {
            let t = enum_ds(4).unwrap();
            let nodes: Vec<&DecSeq> = t.nodes_lex2().collect();
            let r1 = nodes[i].clone();
            let r2 = nodes[j].clone();
            let ok1 = prefix.extend_with(&r1);
            let ok2 = prefix.extend_with(&r2);
            if let (Ok(e1), Ok(e2)) = (ok1, ok2) {
                if end_ext_similar(&prefix, &r1, &r2).unwrap() {
                    prop_assert!(is_similar(e1.items(), e2.items()).unwrap());
                }
            }
        }
    }
}
