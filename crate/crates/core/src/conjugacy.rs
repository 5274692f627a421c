//! Certified conjugacy brackets.
//!
//! Separation uses a depth-`m` invariant that is a complete conjugacy
//! invariant for the automorphism group of the depth-`m` tree: elements with
//! different invariants are never conjugate. Merging uses explicit
//! conjugators, each re-verified. Counting buckets gives a lower bound on the
//! number of classes meeting a ball, counting merged classes an upper bound.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::LevelQuotient;
use crate::enumeration::Ball;
use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::perm::Perm;
use crate::words::Word;

const TRIV: u8 = 0x01;
const NODE: u8 = 0x02;
const LEAF: u8 = 0x03;

/// Canonical serialization of the depth-`m` certificate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConjInvariant {
    pub depth: usize,
    pub bytes: Arc<[u8]>,
}

impl ConjInvariant {
    pub fn is_trivial(&self) -> bool {
        self.bytes[..] == [TRIV]
    }
}

/// Conjugacy classes of the finite quotient acting on level `level`.
///
/// Conjugate elements of the group have conjugate images in every level
/// quotient, so the class id is a sound separating invariant.
pub struct QuotientClasses {
    level: usize,
    class_of: HashMap<Perm, u32>,
}

impl QuotientClasses {
    /// Enumerates the quotient by BFS and its classes by conjugation orbits.
    pub fn build(group: &Group, level: usize, max_order: usize) -> Result<QuotientClasses> {
        let q = LevelQuotient::build(group, level, max_order)?;
        let inv: Vec<Perm> = q.generators.iter().map(Perm::inverse).collect();
        let mut class_of: HashMap<Perm, u32> = HashMap::with_capacity(q.order());
        let mut next = 0u32;
        for p in &q.elements {
            if class_of.contains_key(p) {
                continue;
            }
            let mut stack = vec![p.clone()];
            class_of.insert(p.clone(), next);
            while let Some(x) = stack.pop() {
                for (g, gi) in q.generators.iter().zip(&inv) {
                    let r = gi.compose(&x).compose(g);
                    if !class_of.contains_key(&r) {
                        class_of.insert(r.clone(), next);
                        stack.push(r);
                    }
                }
            }
            next += 1;
        }
        Ok(QuotientClasses { level, class_of })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn order(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_of
            .values()
            .collect::<std::collections::HashSet<_>>()
            .len()
    }

    pub fn class_id(&self, group: &Group, x: &Element) -> Result<u32> {
        let p = group.level_action(x, self.level)?;
        self.class_of
            .get(&p)
            .copied()
            .ok_or_else(|| Error::Soundness("level action outside the quotient".into()))
    }
}

/// Element and depth.
type MemoKey = (Element, usize);

/// Memoizes invariants of shared subtrees; safe to use from many threads.
#[derive(Default)]
pub struct InvariantMemo {
    map: RwLock<HashMap<MemoKey, Arc<[u8]>>>,
}

impl InvariantMemo {
    pub fn new() -> Self {
        Self::default()
    }
}

pub fn depth_invariant(group: &Group, x: &Element, m: usize) -> Result<ConjInvariant> {
    depth_invariant_memo(group, x, m, &InvariantMemo::new())
}

pub fn depth_invariant_memo(
    group: &Group,
    x: &Element,
    m: usize,
    memo: &InvariantMemo,
) -> Result<ConjInvariant> {
    group.is_identity(x)?;
    Ok(ConjInvariant {
        depth: m,
        bytes: inv_rec(group, x, m, None, memo)?,
    })
}

/// The depth invariant with the quotient class of every visited section
/// folded in. Sound for conjugacy in the group itself (not only in the
/// automorphism group of the tree) and strictly finer than the plain one.
pub fn refined_invariant(
    group: &Group,
    x: &Element,
    m: usize,
    quotient: &QuotientClasses,
    memo: &InvariantMemo,
) -> Result<ConjInvariant> {
    group.is_identity(x)?;
    Ok(ConjInvariant {
        depth: m,
        bytes: inv_rec(group, x, m, Some(quotient), memo)?,
    })
}

/// Conjugacy type in the automorphism group of the depth-`m` tree: for every
/// cycle `(v, π(v), …)` of length `ℓ`, the type of the section of `x^ℓ` at `v`.
fn inv_rec(
    group: &Group,
    x: &Element,
    m: usize,
    quotient: Option<&QuotientClasses>,
    memo: &InvariantMemo,
) -> Result<Arc<[u8]>> {
    let class = match quotient {
        Some(q) => Some(q.class_id(group, x)?),
        None => None,
    };
    if m == 0 || (class.is_none() && x.is_identity()) {
        return Ok(match class {
            None => Arc::from(&[TRIV][..]),
            Some(c) => {
                let mut v = vec![LEAF];
                v.extend_from_slice(&c.to_le_bytes());
                Arc::from(v)
            }
        });
    }
    let cache_key = (x.clone(), m);
    if let Some(v) = memo.map.read().unwrap().get(&cache_key) {
        return Ok(v.clone());
    }
    let perm = group.root_perm(x);
    let mut entries: Vec<(u32, Arc<[u8]>)> = Vec::new();
    let mut powers: HashMap<usize, Element> = HashMap::new();
    for cycle in perm.cycles() {
        let len = cycle.len();
        let p = match powers.get(&len) {
            Some(p) => p.clone(),
            None => {
                let p = group.power(x, len)?;
                powers.insert(len, p.clone());
                p
            }
        };
        let s = group.section(&p, &[cycle[0]])?;
        entries.push((len as u32, inv_rec(group, &s, m - 1, quotient, memo)?));
    }
    let out: Arc<[u8]> =
        if class.is_none() && entries.iter().all(|(l, b)| *l == 1 && b[..] == [TRIV]) {
            Arc::from(&[TRIV][..])
        } else {
            entries.sort();
            let mut v = vec![NODE];
            if let Some(c) = class {
                v.extend_from_slice(&c.to_le_bytes());
            }
            v.extend_from_slice(&(entries.len() as u32).to_le_bytes());
            for (l, b) in &entries {
                v.extend_from_slice(&l.to_le_bytes());
                v.extend_from_slice(&(b.len() as u32).to_le_bytes());
                v.extend_from_slice(b);
            }
            Arc::from(v)
        };
    memo.map.write().unwrap().insert(cache_key, out.clone());
    Ok(out)
}

/// Conjugates `x^t` for `|t| ≤ radius`, each with its lexicographically least
/// shortest `t`, in BFS order.
pub fn conjugacy_orbit(group: &Group, x: &Element, radius: usize) -> Result<Vec<(Element, Word)>> {
    let mut labels = group.labels();
    labels.sort_unstable();
    let gens: Vec<(u8, Element, Element)> = labels
        .iter()
        .map(|&l| {
            let g = group.generator(l).unwrap().clone();
            let gi = group.invert(&g)?;
            Ok((l, g, gi))
        })
        .collect::<Result<_>>()?;
    let mut seen: HashMap<Element, usize> = HashMap::from([(x.clone(), 0)]);
    let mut out = vec![(x.clone(), Word::empty())];
    let mut start = 0;
    for _ in 0..radius {
        let end = out.len();
        for i in start..end {
            for (l, g, gi) in &gens {
                let y = group.multiply(&group.multiply(gi, &out[i].0)?, g)?;
                if !seen.contains_key(&y) {
                    let mut w = out[i].1.clone();
                    w.push(*l);
                    seen.insert(y.clone(), out.len());
                    out.push((y, w));
                }
            }
        }
        start = end;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Word),
    /// No conjugator of length at most the radius exists.
    Exhausted,
}

/// Meet in the middle: `x^t = y^s` gives `x^{t s⁻¹} = y`.
pub fn conjugator_search(
    group: &Group,
    x: &Element,
    y: &Element,
    radius: usize,
) -> Result<SearchOutcome> {
    let left = conjugacy_orbit(group, x, radius.div_ceil(2))?;
    let right = conjugacy_orbit(group, y, radius / 2)?;
    let index: HashMap<&Element, &Word> = right.iter().map(|(e, w)| (e, w)).collect();
    let mut best: Option<Word> = None;
    for (e, t) in &left {
        if let Some(s) = index.get(e) {
            let z = group
                .reduce(&t.concat(&group.inverse_word(s)?))
                .unwrap_or_else(|_| t.concat(s));
            let better = match &best {
                None => true,
                Some(b) => (z.len(), &z) < (b.len(), b),
            };
            if better {
                best = Some(z);
            }
        }
    }
    match best {
        Some(z) => {
            let ze = group.eval(&z)?;
            if group.conjugate(x, &ze)? != *y {
                return Err(Error::Soundness(format!(
                    "conjugator '{z}' failed verification"
                )));
            }
            Ok(SearchOutcome::Found(z))
        }
        None => Ok(SearchOutcome::Exhausted),
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Keeps the smaller index as root so results are order-independent.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Merge {
    pub from: Word,
    pub to: Word,
    pub conjugator: Word,
}

#[derive(Clone, Debug)]
pub struct ClassPartition {
    pub depth: usize,
    pub radius: usize,
    /// Invariant bucket id per ball member.
    pub bucket: Vec<usize>,
    /// Union-find class representative (least ball index) per member.
    pub class: Vec<usize>,
    pub merges: Vec<Merge>,
    pub lower: usize,
    pub upper: usize,
}

impl ClassPartition {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// Bracket restricted to members of geodesic length `≤ n`.
    pub fn bracket_at(&self, ball: &Ball, n: usize) -> (usize, usize) {
        let k = ball.gamma(n);
        let mut b: Vec<usize> = self.bucket[..k].to_vec();
        b.sort_unstable();
        b.dedup();
        let mut c: Vec<usize> = self.class[..k].to_vec();
        c.sort_unstable();
        c.dedup();
        (b.len(), c.len())
    }

    /// Class representatives (least ball index of each class).
    pub fn representatives(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.class.clone();
        r.sort_unstable();
        r.dedup();
        r
    }
}

/// Largest level quotient (up to level 4) with at most 2^16 elements.
pub fn default_quotient(group: &Group) -> Option<QuotientClasses> {
    (1..=4)
        .rev()
        .find_map(|level| QuotientClasses::build(group, level, 1 << 16).ok())
}

/// Buckets by invariant, merges by conjugators of length up to `radius`.
/// With a quotient, buckets use the refined invariant.
pub fn class_partition(
    group: &Group,
    ball: &Ball,
    m: usize,
    radius: usize,
    quotient: Option<&QuotientClasses>,
) -> Result<ClassPartition> {
    let memo = InvariantMemo::new();
    let invariants: Vec<Arc<[u8]>> = ball
        .elements()
        .par_iter()
        .map(|x| match quotient {
            Some(q) => refined_invariant(group, x, m, q, &memo).map(|i| i.bytes),
            None => depth_invariant_memo(group, x, m, &memo).map(|i| i.bytes),
        })
        .collect::<Result<_>>()?;
    let mut bucket_ids: HashMap<&[u8], usize> = HashMap::new();
    let bucket: Vec<usize> = invariants
        .iter()
        .map(|b| {
            let n = bucket_ids.len();
            *bucket_ids.entry(&b[..]).or_insert(n)
        })
        .collect();
    let lower = bucket_ids.len();

    let half = radius.div_ceil(2);
    let orbits: Vec<Vec<(Element, Word)>> = ball
        .elements()
        .par_iter()
        .map(|x| conjugacy_orbit(group, x, half))
        .collect::<Result<_>>()?;
    let mut uf = UnionFind::new(ball.len());
    let mut meet: HashMap<&Element, (usize, &Word)> = HashMap::new();
    let mut merges = Vec::new();
    for (i, orbit) in orbits.iter().enumerate() {
        for (e, t) in orbit {
            match meet.get(e) {
                None => {
                    meet.insert(e, (i, t));
                }
                Some(&(j, s)) => {
                    if uf.find(i) == uf.find(j) {
                        continue;
                    }
                    // x_j^s = e = x_i^t, so x_j^{s t⁻¹} = x_i
                    let z = group.reduce(&s.concat(&group.inverse_word(t)?))?;
                    let ze = group.eval(&z)?;
                    if group.conjugate(ball.element(j), &ze)? != *ball.element(i) {
                        return Err(Error::Soundness(format!(
                            "conjugator '{z}' failed verification"
                        )));
                    }
                    if bucket[i] != bucket[j] {
                        return Err(Error::Soundness(format!(
                            "'{}' and '{}' are conjugate but have different invariants",
                            ball.word(j),
                            ball.word(i)
                        )));
                    }
                    uf.union(i, j);
                    merges.push(Merge {
                        from: ball.word(j).clone(),
                        to: ball.word(i).clone(),
                        conjugator: z,
                    });
                }
            }
        }
    }
    let class: Vec<usize> = (0..ball.len()).map(|i| uf.find(i)).collect();
    let mut roots = class.clone();
    roots.sort_unstable();
    roots.dedup();
    Ok(ClassPartition {
        depth: m,
        radius: 2 * half,
        bucket,
        class,
        merges,
        lower,
        upper: roots.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjGrowthRow {
    pub n: usize,
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
}

pub fn rows_from_partition(ball: &Ball, p: &ClassPartition) -> Vec<ConjGrowthRow> {
    (0..=ball.radius())
        .map(|n| {
            let (lower, upper) = p.bracket_at(ball, n);
            ConjGrowthRow {
                n,
                lower,
                upper,
                exact: lower == upper,
            }
        })
        .collect()
}

pub fn conj_growth_table(
    group: &Group,
    ball: &Ball,
    m: usize,
    radius: usize,
    quotient: Option<&QuotientClasses>,
) -> Result<Vec<ConjGrowthRow>> {
    let p = class_partition(group, ball, m, radius, quotient)?;
    Ok(rows_from_partition(ball, &p))
}

pub fn rows_to_csv(rows: &[ConjGrowthRow]) -> String {
    let mut s = String::from("n,lower,upper,exact\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.n, r.lower, r.upper, r.exact));
    }
    s
}

/// Default invariant depth for radius-`n` balls: `⌈log₂ n⌉ + 3`.
pub fn default_depth(n: usize) -> usize {
    (n.max(1) as f64).log2().ceil() as usize + 3
}

/// `k` elements with pairwise distinct depth-`m` invariants, taken greedily in
/// ball order. Radius grows until enough are found or `max_radius` is hit.
pub fn infinite_classes_witness(
    group: &Group,
    k: usize,
    m: usize,
    max_radius: usize,
) -> Result<Vec<(Word, Element)>> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    if k == 1 {
        return Ok(vec![(Word::empty(), group.identity())]);
    }
    let memo = InvariantMemo::new();
    let mut b = crate::enumeration::ball(group, 1)?;
    loop {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for i in 1..b.len() {
            let inv = depth_invariant_memo(group, b.element(i), m, &memo)?;
            if inv.is_trivial() {
                continue;
            }
            if seen.insert(inv) {
                out.push((b.word(i).clone(), b.element(i).clone()));
                if out.len() == k {
                    return Ok(out);
                }
            }
        }
        if b.radius() >= max_radius {
            return Err(Error::Budget(format!(
                "only {} separated classes within radius {max_radius}",
                out.len()
            )));
        }
        let r = b.radius() + 1;
        b = crate::enumeration::extend_ball(group, b, r, Default::default())?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::ball;

    #[test]
    fn identity_invariant_is_trivial() {
        let g = Group::grigorchuk();
        for m in 0..6 {
            assert!(depth_invariant(&g, &g.identity(), m).unwrap().is_trivial());
        }
    }

    #[test]
    fn invariant_is_conjugation_invariant() {
        let g = Group::grigorchuk();
        let a = g.eval_str("a").unwrap();
        let ab = g.eval_str("bab").unwrap();
        for m in 0..=8 {
            assert_eq!(
                depth_invariant(&g, &a, m).unwrap(),
                depth_invariant(&g, &ab, m).unwrap()
            );
        }
        let b = g.eval_str("b").unwrap();
        assert_ne!(
            depth_invariant(&g, &a, 1).unwrap(),
            depth_invariant(&g, &b, 1).unwrap()
        );
    }

    #[test]
    fn search_examples() {
        let g = Group::grigorchuk();
        let e = |s| g.eval_str(s).unwrap();
        assert_eq!(
            conjugator_search(&g, &e("a"), &e("bab"), 1).unwrap(),
            SearchOutcome::Found(Word::from_labels("b"))
        );
        assert_eq!(
            conjugator_search(&g, &e("a"), &e("b"), 4).unwrap(),
            SearchOutcome::Exhausted
        );
        assert!(matches!(
            conjugator_search(&g, &e("b"), &e("abababa"), 3).unwrap(),
            SearchOutcome::Found(_)
        ));
    }

    #[test]
    fn small_partitions() {
        let g = Group::grigorchuk();
        let b0 = ball(&g, 0).unwrap();
        let p0 = class_partition(&g, &b0, 4, 2, None).unwrap();
        assert_eq!((p0.lower, p0.upper), (1, 1));
        let b1 = ball(&g, 1).unwrap();
        let p1 = class_partition(&g, &b1, 4, 2, None).unwrap();
        assert_eq!((p1.lower, p1.upper), (5, 5));
        assert_eq!(p1.representatives(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn witnesses() {
        let g = Group::grigorchuk();
        let one = infinite_classes_witness(&g, 1, 6, 6).unwrap();
        assert!(one[0].1.is_identity());
        let two = infinite_classes_witness(&g, 2, 6, 6).unwrap();
        let words: Vec<String> = two.iter().map(|w| w.0.to_string()).collect();
        assert_eq!(words, vec!["a", "b"]);
    }
}
