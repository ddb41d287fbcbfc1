use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::algebraic::{combo_sign, FieldElement, IntPoly};
use crate::error::PairError;
use crate::rule::{language_factors, Matrix, SubstitutionRule, Word};

/// Unordered pair of words with identical geometric length, stored with the
/// lexicographically smaller word first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BalancedPair {
    pub top: Word,
    pub bottom: Word,
}

impl BalancedPair {
    pub fn new(a: Word, b: Word) -> Self {
        if a <= b {
            BalancedPair { top: a, bottom: b }
        } else {
            BalancedPair { top: b, bottom: a }
        }
    }

    pub fn is_coincidence(&self) -> bool {
        self.top.len() == 1 && self.top == self.bottom
    }

    pub fn letter_coincidence(letter: usize) -> Self {
        BalancedPair {
            top: vec![letter],
            bottom: vec![letter],
        }
    }

    pub fn label(&self, rule: &SubstitutionRule) -> String {
        format!(
            "{}|{}",
            rule.alphabet.word_to_string(&self.top),
            rule.alphabet.word_to_string(&self.bottom)
        )
    }
}

/// Splitting context: tile lengths plus a memo for exact signs of integer
/// length combinations.
pub struct SplitCtx<'a> {
    lengths: &'a [FieldElement],
    cache: RefCell<HashMap<Vec<i64>, i32>>,
}

impl<'a> SplitCtx<'a> {
    pub fn new(lengths: &'a [FieldElement]) -> Self {
        SplitCtx {
            lengths,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn lengths(&self) -> &[FieldElement] {
        self.lengths
    }

    /// Sign of `Σ delta_i * length_i`. Lengths are strictly positive, so
    /// one-sided count vectors need no exact arithmetic.
    fn sign(&self, delta: &[i64]) -> i32 {
        if delta.iter().all(|&c| c == 0) {
            return 0;
        }
        if delta.iter().all(|&c| c >= 0) {
            return 1;
        }
        if delta.iter().all(|&c| c <= 0) {
            return -1;
        }
        if let Some(&s) = self.cache.borrow().get(delta) {
            return s;
        }
        let s = combo_sign(delta, self.lengths);
        self.cache.borrow_mut().insert(delta.to_vec(), s);
        s
    }
}

fn abelianization(w: &[usize], n: usize) -> Vec<i64> {
    let mut counts = vec![0i64; n];
    for &l in w {
        counts[l] += 1;
    }
    counts
}

/// Splits a balanced word pair into irreducible pairs at every shared
/// interior vertex (exact geometric positions). Pieces are returned left to
/// right; a fully coincident stretch decomposes into letter coincidences.
pub fn split(top: &[usize], bottom: &[usize], ctx: &SplitCtx) -> Result<Vec<BalancedPair>, PairError> {
    let n = ctx.lengths.len();
    let mut total = abelianization(top, n);
    for (t, b) in total.iter_mut().zip(abelianization(bottom, n)) {
        *t -= b;
    }
    if ctx.sign(&total) != 0 {
        return Err(PairError::UnbalancedInput);
    }
    let mut pieces = Vec::new();
    let mut delta = vec![0i64; n];
    let (mut i, mut j) = (0usize, 0usize);
    let (mut ts, mut bs) = (0usize, 0usize);
    if top.is_empty() {
        return Ok(pieces);
    }
    // Start each piece by consuming one top letter, then interleave whichever
    // row is geometrically behind until the prefix sums agree again.
    delta[top[i]] += 1;
    i += 1;
    loop {
        match ctx.sign(&delta) {
            0 => {
                pieces.push(BalancedPair::new(
                    top[ts..i].to_vec(),
                    bottom[bs..j].to_vec(),
                ));
                ts = i;
                bs = j;
                if i == top.len() && j == bottom.len() {
                    break;
                }
                if i == top.len() || j == bottom.len() {
                    return Err(PairError::UnbalancedInput);
                }
                delta[top[i]] += 1;
                i += 1;
            }
            s if s > 0 => {
                if j == bottom.len() {
                    return Err(PairError::UnbalancedInput);
                }
                delta[bottom[j]] -= 1;
                j += 1;
            }
            _ => {
                if i == top.len() {
                    return Err(PairError::UnbalancedInput);
                }
                delta[top[i]] += 1;
                i += 1;
            }
        }
    }
    Ok(pieces)
}

/// Children of an irreducible pair: inflate both rows and re-split. The
/// returned list preserves left-to-right order (a multiset of child types).
pub fn substitute_pair(
    p: &BalancedPair,
    rule: &SubstitutionRule,
    ctx: &SplitCtx,
) -> Result<Vec<BalancedPair>, PairError> {
    split(&rule.substitute(&p.top), &rule.substitute(&p.bottom), ctx)
}

/// Canonical irreducible seed pairs: split every pair of distinct legal
/// factors of bounded length with equal abelianization and keep the
/// non-coincident irreducible pieces. At the default bound 2 the candidates
/// are the transposition pairs (xy, yx); with distinct tile lengths each is
/// its own single piece, while equal tile lengths reduce it to the letter
/// discrepancy (x, y).
pub fn default_seeds(
    rule: &SubstitutionRule,
    ctx: &SplitCtx,
    seed_factor_length: usize,
) -> Result<Vec<BalancedPair>, PairError> {
    let n = rule.letter_count();
    let factors = language_factors(rule, seed_factor_length);
    let mut by_abelianization: BTreeMap<Vec<i64>, Vec<Word>> = BTreeMap::new();
    for w in &factors {
        by_abelianization
            .entry(abelianization(w, n))
            .or_default()
            .push(w.clone());
    }
    let mut seeds = Vec::new();
    for group in by_abelianization.values() {
        for (k, u) in group.iter().enumerate() {
            for v in &group[k + 1..] {
                for piece in split(u, v, ctx)? {
                    if piece.top != piece.bottom {
                        seeds.push(piece);
                    }
                }
            }
        }
    }
    seeds.sort();
    seeds.dedup();
    Ok(seeds)
}

/// The balanced-pair closure graph. Edges run parent -> child with
/// multiplicities; node order is deterministic (letter coincidences first,
/// then seeds, then children in discovery order).
#[derive(Debug, Clone)]
pub struct PairGraph {
    pub nodes: Vec<BalancedPair>,
    pub edges: Vec<BTreeMap<usize, u64>>,
    pub coincidence: Vec<bool>,
}

impl PairGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Full transition matrix including coincidence nodes:
    /// `M[i][j]` = multiplicity of child `i` under parent `j`.
    pub fn full_matrix(&self) -> Matrix {
        let n = self.len();
        let mut m = vec![vec![BigInt::zero(); n]; n];
        for (parent, children) in self.edges.iter().enumerate() {
            for (&child, &mult) in children {
                m[child][parent] += BigInt::from(mult);
            }
        }
        m
    }

    /// Exact geometric length of a node (sum of top-row tile lengths).
    pub fn node_length(&self, idx: usize, lengths: &[FieldElement]) -> FieldElement {
        let ctx = lengths[0].ctx();
        let mut acc = ctx.zero();
        for &l in &self.nodes[idx].top {
            acc = acc.add(&lengths[l]);
        }
        acc
    }
}

/// Breadth-first closure of `seeds` plus all letter coincidences under pair
/// substitution.
pub fn build_closure(
    seeds: &[BalancedPair],
    rule: &SubstitutionRule,
    ctx: &SplitCtx,
    cap: usize,
) -> Result<PairGraph, PairError> {
    let mut nodes: Vec<BalancedPair> = Vec::new();
    let mut index: HashMap<BalancedPair, usize> = HashMap::new();
    let mut intern = |p: BalancedPair, nodes: &mut Vec<BalancedPair>| -> usize {
        if let Some(&i) = index.get(&p) {
            return i;
        }
        let i = nodes.len();
        index.insert(p.clone(), i);
        nodes.push(p);
        i
    };
    for letter in 0..rule.letter_count() {
        intern(BalancedPair::letter_coincidence(letter), &mut nodes);
    }
    for seed in seeds {
        intern(seed.clone(), &mut nodes);
    }
    let mut edges: Vec<BTreeMap<usize, u64>> = Vec::new();
    let mut cursor = 0usize;
    while cursor < nodes.len() {
        if nodes.len() > cap {
            return Err(PairError::CapExceeded(nodes.len()));
        }
        let children = substitute_pair(&nodes[cursor].clone(), rule, ctx)?;
        let mut row: BTreeMap<usize, u64> = BTreeMap::new();
        for child in children {
            let id = intern(child, &mut nodes);
            *row.entry(id).or_insert(0) += 1;
        }
        edges.push(row);
        cursor += 1;
    }
    if nodes.len() > cap {
        return Err(PairError::CapExceeded(nodes.len()));
    }
    let coincidence = nodes.iter().map(|p| p.is_coincidence()).collect();
    Ok(PairGraph {
        nodes,
        edges,
        coincidence,
    })
}

/// True iff every node has a directed path to a coincidence node.
pub fn pure_point_verdict(g: &PairGraph) -> bool {
    let n = g.len();
    let mut reached = vec![false; n];
    let mut queue: Vec<usize> = (0..n).filter(|&i| g.coincidence[i]).collect();
    for &i in &queue {
        reached[i] = true;
    }
    // Reverse edges: child -> parents.
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (parent, children) in g.edges.iter().enumerate() {
        for &child in children.keys() {
            parents[child].push(parent);
        }
    }
    while let Some(v) = queue.pop() {
        for &p in &parents[v] {
            if !reached[p] {
                reached[p] = true;
                queue.push(p);
            }
        }
    }
    reached.iter().all(|&r| r)
}

/// Restriction of the pair graph to discrepancy nodes. Returns the matrix
/// (`M_dc[i][j]` = discrepancy children `i` per discrepancy parent `j`) and
/// the map from discrepancy index to original node index.
pub fn discrepancy_graph(g: &PairGraph) -> (Matrix, Vec<usize>) {
    let keep: Vec<usize> = (0..g.len()).filter(|&i| !g.coincidence[i]).collect();
    let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let d = keep.len();
    let mut m = vec![vec![BigInt::zero(); d]; d];
    for (dj, &orig_j) in keep.iter().enumerate() {
        for (&child, &mult) in &g.edges[orig_j] {
            if let Some(&di) = pos.get(&child) {
                m[di][dj] += BigInt::from(mult);
            }
        }
    }
    (m, keep)
}

/// A tile-over-tile overlap with exact relative displacement (bottom start
/// minus top start) and support length.
#[derive(Debug, Clone)]
pub struct Overlap {
    pub top_letter: usize,
    pub bottom_letter: usize,
    pub offset: FieldElement,
    pub support: FieldElement,
}

impl Overlap {
    /// Canonical orientation of the unordered overlap: smaller letter on
    /// top; for equal letters, nonnegative offset.
    fn canonical(
        top_letter: usize,
        bottom_letter: usize,
        offset: FieldElement,
        support: FieldElement,
    ) -> Overlap {
        let flip = match top_letter.cmp(&bottom_letter) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => offset.sign() < 0,
            std::cmp::Ordering::Less => false,
        };
        if flip {
            Overlap {
                top_letter: bottom_letter,
                bottom_letter: top_letter,
                offset: offset.neg(),
                support,
            }
        } else {
            Overlap {
                top_letter,
                bottom_letter,
                offset,
                support,
            }
        }
    }

    pub fn is_coincidence(&self) -> bool {
        self.top_letter == self.bottom_letter && self.offset.is_zero()
    }

    fn key(&self, min_poly: &IntPoly) -> (usize, usize, Vec<BigRational>) {
        (
            self.top_letter,
            self.bottom_letter,
            self.offset.canonical_key(min_poly),
        )
    }

    pub fn label(&self, rule: &SubstitutionRule) -> String {
        format!(
            "{}/{}@{:.6}",
            rule.alphabet.name(self.top_letter),
            rule.alphabet.name(self.bottom_letter),
            self.offset.to_f64(1e-9)
        )
    }
}

fn tile_row(w: &[usize], anchor: &FieldElement, lengths: &[FieldElement]) -> Vec<(usize, FieldElement, FieldElement)> {
    let mut out = Vec::with_capacity(w.len());
    let mut pos = anchor.clone();
    for &l in w {
        let end = pos.add(&lengths[l]);
        out.push((l, pos.clone(), end.clone()));
        pos = end;
    }
    out
}

/// Decomposes an irreducible balanced pair into its maximal one-tile-over-
/// one-tile overlap intervals, left to right.
pub fn decompose_overlaps(p: &BalancedPair, lengths: &[FieldElement]) -> Vec<Overlap> {
    let ctx = lengths[0].ctx();
    let zero = ctx.zero();
    let tops = tile_row(&p.top, &zero, lengths);
    let bottoms = tile_row(&p.bottom, &zero, lengths);
    let mut out = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    while i < tops.len() && j < bottoms.len() {
        let (tl, tstart, tend) = &tops[i];
        let (bl, bstart, bend) = &bottoms[j];
        let support = min_fe(tend, bend).sub(&max_fe(tstart, bstart));
        out.push(Overlap::canonical(
            *tl,
            *bl,
            bstart.sub(tstart),
            support,
        ));
        match tend.sub(bend).sign() {
            0 => {
                i += 1;
                j += 1;
            }
            s if s < 0 => i += 1,
            _ => j += 1,
        }
    }
    out
}

fn min_fe(a: &FieldElement, b: &FieldElement) -> FieldElement {
    if a.sub(b).sign() <= 0 {
        a.clone()
    } else {
        b.clone()
    }
}

fn max_fe(a: &FieldElement, b: &FieldElement) -> FieldElement {
    if a.sub(b).sign() >= 0 {
        a.clone()
    } else {
        b.clone()
    }
}

/// Children of an overlap under inflation: substitute both tiles, anchor the
/// bottom patch at λ times the offset, and collect every tile pair whose
/// supports intersect with interior.
pub fn inflate_overlap(
    o: &Overlap,
    rule: &SubstitutionRule,
    lengths: &[FieldElement],
) -> Vec<Overlap> {
    let ctx = lengths[0].ctx();
    let lambda = ctx.generator();
    let zero = ctx.zero();
    let tops = tile_row(rule.image(o.top_letter), &zero, lengths);
    let bottom_anchor = o.offset.mul(&lambda);
    let bottoms = tile_row(rule.image(o.bottom_letter), &bottom_anchor, lengths);
    let mut out = Vec::new();
    for (tl, tstart, tend) in &tops {
        for (bl, bstart, bend) in &bottoms {
            let support = min_fe(tend, bend).sub(&max_fe(tstart, bstart));
            if support.sign() > 0 {
                out.push(Overlap::canonical(*tl, *bl, bstart.sub(tstart), support));
            }
        }
    }
    out
}

/// Closure graph over overlap types (same conventions as PairGraph).
#[derive(Debug, Clone)]
pub struct OverlapGraph {
    pub nodes: Vec<Overlap>,
    pub edges: Vec<BTreeMap<usize, u64>>,
    pub coincidence: Vec<bool>,
}

impl OverlapGraph {
    pub fn discrepancy_matrix(&self) -> (Matrix, Vec<usize>) {
        let keep: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| !self.coincidence[i])
            .collect();
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let d = keep.len();
        let mut m = vec![vec![BigInt::zero(); d]; d];
        for (dj, &orig_j) in keep.iter().enumerate() {
            for (&child, &mult) in &self.edges[orig_j] {
                if let Some(&di) = pos.get(&child) {
                    m[di][dj] += BigInt::from(mult);
                }
            }
        }
        (m, keep)
    }
}

pub fn overlap_closure(
    seeds: &[Overlap],
    rule: &SubstitutionRule,
    lengths: &[FieldElement],
    min_poly: &IntPoly,
    cap: usize,
) -> Result<OverlapGraph, PairError> {
    let mut nodes: Vec<Overlap> = Vec::new();
    let mut index: BTreeMap<(usize, usize, Vec<BigRational>), usize> = BTreeMap::new();
    let mut intern = |o: Overlap, nodes: &mut Vec<Overlap>| -> usize {
        let key = o.key(min_poly);
        if let Some(&i) = index.get(&key) {
            return i;
        }
        let i = nodes.len();
        index.insert(key, i);
        nodes.push(o);
        i
    };
    for seed in seeds {
        intern(seed.clone(), &mut nodes);
    }
    let mut edges: Vec<BTreeMap<usize, u64>> = Vec::new();
    let mut cursor = 0usize;
    while cursor < nodes.len() {
        if nodes.len() > cap {
            return Err(PairError::CapExceeded(nodes.len()));
        }
        let children = inflate_overlap(&nodes[cursor].clone(), rule, lengths);
        let mut row: BTreeMap<usize, u64> = BTreeMap::new();
        for child in children {
            let id = intern(child, &mut nodes);
            *row.entry(id).or_insert(0) += 1;
        }
        edges.push(row);
        cursor += 1;
    }
    let coincidence = nodes.iter().map(|o| o.is_coincidence()).collect();
    Ok(OverlapGraph {
        nodes,
        edges,
        coincidence,
    })
}
