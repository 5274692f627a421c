//! Finite quotients, the branching subgroup, lifts and the constructive
//! builders for subword encoding and products of conjugates.
//!
//! Everything produced here is checked by evaluation before it is returned.

use std::collections::{HashMap, HashSet};
use std::sync::Mutex;

use serde::Serialize;

use crate::enumeration::{self, Ball, BallBudget};
use crate::error::{Error, Result};
use crate::expression::{ExprKind, Expression, Factor};
use crate::group::{Element, Group};
use crate::perm::Perm;
use crate::words::Word;

/// Default cap on the order of an enumerated level quotient.
pub const DEFAULT_MAX_ORDER: usize = 1 << 16;

/// The image of the group in the symmetric group of level `level`, with a
/// lexicographically least shortest word for every element.
pub struct LevelQuotient {
    pub level: usize,
    pub elements: Vec<Perm>,
    pub words: Vec<Word>,
    pub generators: Vec<Perm>,
    index: HashMap<Perm, u32>,
}

impl LevelQuotient {
    pub fn build(group: &Group, level: usize, max_order: usize) -> Result<LevelQuotient> {
        let mut labels = group.labels();
        labels.sort_unstable();
        let generators: Vec<Perm> = labels
            .iter()
            .map(|&l| group.level_action(group.generator(l).unwrap(), level))
            .collect::<Result<_>>()?;
        let id = Perm::identity(group.arity().pow(level as u32));
        let mut q = LevelQuotient {
            level,
            elements: vec![id.clone()],
            words: vec![Word::empty()],
            generators,
            index: HashMap::from([(id, 0)]),
        };
        let mut i = 0;
        while i < q.elements.len() {
            for (g, &l) in q.generators.iter().zip(&labels) {
                let p = q.elements[i].compose(g);
                if !q.index.contains_key(&p) {
                    if q.elements.len() >= max_order {
                        return Err(Error::Budget(format!(
                            "level-{level} quotient exceeds {max_order} elements"
                        )));
                    }
                    let mut w = q.words[i].clone();
                    w.push(l);
                    q.index.insert(p.clone(), q.elements.len() as u32);
                    q.elements.push(p);
                    q.words.push(w);
                }
            }
            i += 1;
        }
        Ok(q)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).map(|&i| i as usize)
    }

    /// Membership mask of the normal closure of `p`.
    pub fn normal_closure(&self, p: &Perm) -> Vec<bool> {
        let inv: Vec<Perm> = self.generators.iter().map(Perm::inverse).collect();
        let mut class: Vec<Perm> = vec![p.clone()];
        let mut seen: HashSet<Perm> = HashSet::from([p.clone()]);
        let mut i = 0;
        while i < class.len() {
            for (g, gi) in self.generators.iter().zip(&inv) {
                let r = gi.compose(&class[i]).compose(g);
                if seen.insert(r.clone()) {
                    class.push(r);
                }
            }
            i += 1;
        }
        let mut member = vec![false; self.order()];
        member[0] = true;
        let mut stack = vec![0usize];
        while let Some(j) = stack.pop() {
            for c in &class {
                let k = self.index[&self.elements[j].compose(c)] as usize;
                if !member[k] {
                    member[k] = true;
                    stack.push(k);
                }
            }
        }
        member
    }
}

/// `|Γ / St(m)|`.
pub fn finite_quotient_order(group: &Group, m: usize, max_order: usize) -> Result<usize> {
    Ok(LevelQuotient::build(group, m, max_order)?.order())
}

/// Index of the image of the normal closure of `word` in the level-`m` quotient.
pub fn normal_closure_index(
    group: &Group,
    word: &Word,
    m: usize,
    max_order: usize,
) -> Result<usize> {
    let q = LevelQuotient::build(group, m, max_order)?;
    let p = group.level_action(&group.eval(word)?, m)?;
    let members = q.normal_closure(&p).iter().filter(|&&b| b).count();
    Ok(q.order() / members)
}

/// A normal subgroup modelled by its image at a level where the index has
/// stopped growing.
pub struct QuotientModel {
    pub word: Word,
    /// Stabilization level `m*`: the index is the same at `m*` and `m* + 1`.
    pub level: usize,
    pub index: usize,
    /// Index at every level tried, starting from level 1.
    pub indices: Vec<usize>,
    quotient: LevelQuotient,
    members: Vec<bool>,
}

impl QuotientModel {
    pub fn build(
        group: &Group,
        word: &Word,
        max_level: usize,
        max_order: usize,
    ) -> Result<QuotientModel> {
        let x = group.eval(word)?;
        let mut indices = Vec::new();
        let mut prev: Option<(LevelQuotient, Vec<bool>)> = None;
        for m in 1..=max_level {
            let q = match LevelQuotient::build(group, m, max_order) {
                Ok(q) => q,
                Err(Error::Budget(_)) => break,
                Err(e) => return Err(e),
            };
            let members = q.normal_closure(&group.level_action(&x, m)?);
            let index = q.order() / members.iter().filter(|&&b| b).count();
            if let (Some(&last), Some((pq, pm))) = (indices.last(), prev.take()) {
                if last == index {
                    indices.push(index);
                    return Ok(QuotientModel {
                        word: word.clone(),
                        level: m - 1,
                        index,
                        indices,
                        quotient: pq,
                        members: pm,
                    });
                }
            }
            indices.push(index);
            prev = Some((q, members));
        }
        Err(Error::Unstabilized(indices.len()))
    }

    pub fn contains(&self, group: &Group, x: &Element) -> Result<bool> {
        let p = group.level_action(x, self.level)?;
        Ok(self.quotient.index_of(&p).is_some_and(|i| self.members[i]))
    }

    fn contains_perm(&self, p: &Perm) -> bool {
        self.quotient.index_of(p).is_some_and(|i| self.members[i])
    }

    /// Shortest coset representatives of the subgroup, one per right coset.
    pub fn transversal(&self) -> Vec<Word> {
        let q = &self.quotient;
        let kernel: Vec<&Perm> = (0..q.order())
            .filter(|&i| self.members[i])
            .map(|i| &q.elements[i])
            .collect();
        let mut assigned = vec![false; q.order()];
        let mut reps = Vec::new();
        for i in 0..q.order() {
            if assigned[i] {
                continue;
            }
            reps.push(q.words[i].clone());
            for k in &kernel {
                assigned[q.index[&k.compose(&q.elements[i])] as usize] = true;
            }
        }
        reps
    }
}

/// Left cosets of `H = ψ⁻¹(K × K)`, read off one level below the K model.
struct PairSubgroup {
    level: usize,
    quotient: LevelQuotient,
    coset: Vec<u32>,
    reps: Vec<Word>,
}

impl PairSubgroup {
    fn build(group: &Group, k: &QuotientModel, max_order: usize) -> Result<PairSubgroup> {
        let level = k.level + 1;
        let q = LevelQuotient::build(group, level, max_order)?;
        let d = group.arity();
        let block = d.pow(k.level as u32);
        let in_h = |p: &Perm| -> bool {
            (0..d).all(|v| {
                let sub: Option<Vec<u32>> = (0..block)
                    .map(|w| {
                        let img = p.apply(v * block + w);
                        (img / block == v).then_some((img % block) as u32)
                    })
                    .collect();
                sub.is_some_and(|s| k.contains_perm(&Perm::from_images_unchecked(s)))
            })
        };
        let h: Vec<&Perm> = q.elements.iter().filter(|p| in_h(p)).collect();
        let mut coset = vec![u32::MAX; q.order()];
        let mut reps = Vec::new();
        for i in 0..q.order() {
            if coset[i] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(q.words[i].clone());
            for x in &h {
                coset[q.index[&q.elements[i].compose(x)] as usize] = id;
            }
        }
        Ok(PairSubgroup {
            level,
            quotient: q,
            coset,
            reps,
        })
    }

    fn coset_of(&self, group: &Group, x: &Element) -> Result<usize> {
        let p = group.level_action(x, self.level)?;
        let i = self
            .quotient
            .index_of(&p)
            .ok_or_else(|| Error::Soundness("level action outside the quotient".into()))?;
        Ok(self.coset[i] as usize)
    }
}

/// Elements of the form `(u, 1)`, indexed by `u`, found by growing a ball.
struct LiftIndex {
    ball: Ball,
    found: HashMap<Element, usize>,
    scanned: usize,
}

impl LiftIndex {
    fn scan(&mut self, group: &Group) {
        for i in self.scanned..self.ball.len() {
            let x = self.ball.element(i);
            if group.root_active(x) {
                continue;
            }
            let s = group.sections(x);
            if s[1..].iter().all(Element::is_identity) {
                self.found.entry(s[0].clone()).or_insert(i);
            }
        }
        self.scanned = self.ball.len();
    }
}

/// The branching subgroup `K`, its pair subgroup `ψ⁻¹(K × K)` and lifts.
pub struct BranchingData {
    pub k: QuotientModel,
    pub k_transversal: Vec<Word>,
    pair: PairSubgroup,
    rooted: u8,
    lifts: Mutex<LiftIndex>,
    pub max_lift_radius: usize,
}

/// Conjugates in one comm_K product (the constant `S`).
pub const COMM_K_COST: usize = 4;

impl BranchingData {
    /// `K` is the normal closure of `word`, by default `(ab)^2`.
    pub fn build(group: &Group, word: &Word) -> Result<BranchingData> {
        if group.arity() != 2 {
            return Err(Error::Precondition(
                "branching data needs a binary tree".into(),
            ));
        }
        let k = QuotientModel::build(group, word, 6, DEFAULT_MAX_ORDER)?;
        let pair = PairSubgroup::build(group, &k, DEFAULT_MAX_ORDER)?;
        let rooted = group
            .labels()
            .into_iter()
            .find(|&l| {
                let g = group.generator(l).unwrap();
                group.root_active(g) && group.sections(g).iter().all(Element::is_identity)
            })
            .ok_or_else(|| Error::Precondition("no rooted generator".into()))?;
        Ok(BranchingData {
            k_transversal: k.transversal(),
            k,
            pair,
            rooted,
            lifts: Mutex::new(LiftIndex {
                ball: enumeration::ball(group, 0)?,
                found: HashMap::new(),
                scanned: 0,
            }),
            max_lift_radius: 26,
        })
    }

    pub fn grigorchuk(group: &Group) -> Result<BranchingData> {
        BranchingData::build(group, &group.parse_word("(ab)^2")?)
    }

    pub fn k_membership(&self, group: &Group, x: &Element) -> Result<bool> {
        self.k.contains(group, x)
    }

    /// Index of `ψ⁻¹(K × K)` in the group.
    pub fn pair_index(&self) -> usize {
        self.pair.reps.len()
    }

    pub fn pair_transversal(&self) -> &[Word] {
        &self.pair.reps
    }

    /// Longest minimal coset representative of `ψ⁻¹(K × K)`.
    pub fn pair_max_length(&self) -> usize {
        self.pair.reps.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn k_max_length(&self) -> usize {
        self.k_transversal.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn rooted_label(&self) -> u8 {
        self.rooted
    }

    /// A word `g` with `ψ(g) = (u, 1)`, shortest and lexicographically least.
    pub fn lift(&self, group: &Group, u: &Element) -> Result<Word> {
        if !self.k.contains(group, u)? {
            return Err(Error::LiftUnavailable("element outside K".into()));
        }
        let mut idx = self.lifts.lock().unwrap();
        loop {
            if let Some(&i) = idx.found.get(u) {
                return Ok(idx.ball.word(i).clone());
            }
            let r = idx.ball.radius();
            if r >= self.max_lift_radius {
                return Err(Error::LiftUnavailable(format!(
                    "no lift within radius {}",
                    self.max_lift_radius
                )));
            }
            let b = std::mem::replace(&mut idx.ball, enumeration::ball(group, 0)?);
            idx.ball = enumeration::extend_ball(
                group,
                b,
                (r + 2).min(self.max_lift_radius),
                BallBudget::default(),
            )?;
            idx.scan(group);
        }
    }
}

/// `acad`-style substitution: `a → aca, b → d, c → b, d → c` writes `w` on
/// the right subtree and leaves a word in `⟨a, d⟩` on the left.
fn substitute(w: &Word) -> Word {
    let mut out = Vec::with_capacity(2 * w.len());
    for &l in w.as_bytes() {
        match l {
            b'a' => out.extend_from_slice(b"aca"),
            b'b' => out.push(b'd'),
            b'c' => out.push(b'b'),
            b'd' => out.push(b'c'),
            other => out.push(other),
        }
    }
    Word::from_labels(out)
}

/// Shortest word over `{a, d}` for an element of the order-8 dihedral group
/// `⟨a, d⟩` (uses `(ad)^4 = 1`).
fn dihedral_normal_form(group: &Group, x: &Element) -> Result<Option<Word>> {
    for w in ["", "a", "d", "ad", "da", "ada", "dad", "adad"] {
        let w = Word::from_labels(w);
        if group.eval(&w)? == *x {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
pub struct RightEncoding {
    pub target: Word,
    pub word: Word,
    /// Left section as a shortest word in `⟨a, d⟩`.
    pub left: Word,
    pub right: Word,
    pub within_bound: bool,
}

fn require_grigorchuk(group: &Group) -> Result<()> {
    if group.preset().is_grigorchuk() {
        Ok(())
    } else {
        Err(Error::Precondition(
            "this construction needs the Grigorchuk preset".into(),
        ))
    }
}

pub fn encode_right(group: &Group, w1: &Word) -> Result<RightEncoding> {
    require_grigorchuk(group)?;
    let w = group.reduce(&substitute(w1))?;
    let x = group.eval(&w)?;
    if group.root_active(&x) {
        return Err(Error::Soundness(format!(
            "'{w}' does not fix the first level"
        )));
    }
    let s = group.sections(&x);
    if s[1] != group.eval(w1)? {
        return Err(Error::Soundness(format!(
            "right section of '{w}' is not '{w1}'"
        )));
    }
    let left = dihedral_normal_form(group, &s[0])?
        .ok_or_else(|| Error::Soundness(format!("left section of '{w}' is outside <a,d>")))?;
    let right = group.word_sections(&w)?.swap_remove(1);
    Ok(RightEncoding {
        target: w1.clone(),
        within_bound: w.len() <= 2 * w1.len() + 4,
        word: w,
        left,
        right,
    })
}

/// First-level stabilizer elements of a ball, indexed by their section pair.
pub struct SectionPairIndex {
    ball: Ball,
    map: HashMap<(Element, Element), usize>,
}

impl SectionPairIndex {
    pub fn build(group: &Group, radius: usize) -> Result<SectionPairIndex> {
        require_grigorchuk(group)?;
        let ball = enumeration::ball(group, radius)?;
        let mut map = HashMap::new();
        for (i, x) in ball.elements().iter().enumerate() {
            if !group.root_active(x) {
                let s = group.sections(x);
                map.entry((s[0].clone(), s[1].clone())).or_insert(i);
            }
        }
        Ok(SectionPairIndex { ball, map })
    }

    pub fn radius(&self) -> usize {
        self.ball.radius()
    }

    /// Shortest word in the index with sections `(x, y)`.
    pub fn find(&self, x: &Element, y: &Element) -> Option<&Word> {
        self.map
            .get(&(x.clone(), y.clone()))
            .map(|&i| self.ball.word(i))
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodeStatus {
    Achieved,
    /// No first-level stabilizer word within the length bound has these sections.
    UnreachableWithinBound,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairEncodeResult {
    pub status: EncodeStatus,
    pub word: Option<Word>,
    pub sections: Option<(Word, Word)>,
    pub bound: usize,
}

/// Finds `w ∈ St(1)` with sections `(w0, w1)` and `|w| ≤ 2(|w0| + |w1|)`.
pub fn encode_pair(
    group: &Group,
    w0: &Word,
    w1: &Word,
    index: Option<&SectionPairIndex>,
) -> Result<PairEncodeResult> {
    require_grigorchuk(group)?;
    let bound = 2 * (w0.len() + w1.len());
    let x0 = group.eval(w0)?;
    let x1 = group.eval(w1)?;
    let check = |w: &Word| -> Result<bool> {
        let x = group.eval(w)?;
        Ok(!group.root_active(&x) && group.sections(&x) == [x0.clone(), x1.clone()])
    };
    let s0 = substitute(w0);
    let s1 = substitute(w1);
    let candidates = [
        s1.clone(),
        Word::from_labels("a")
            .concat(&s0)
            .concat(&Word::from_labels("a"))
            .concat(&s1),
        s1.concat(&Word::from_labels("a"))
            .concat(&s0)
            .concat(&Word::from_labels("a")),
    ];
    for c in candidates {
        let c = group.reduce(&c)?;
        if c.len() <= bound && check(&c)? {
            return achieved(group, c, bound);
        }
    }
    let owned;
    let index = match index {
        Some(ix) if ix.radius() >= bound => ix,
        _ => {
            owned = SectionPairIndex::build(group, bound)?;
            &owned
        }
    };
    match index.find(&x0, &x1) {
        Some(w) if w.len() <= bound => achieved(group, w.clone(), bound),
        _ => Ok(PairEncodeResult {
            status: EncodeStatus::UnreachableWithinBound,
            word: None,
            sections: None,
            bound,
        }),
    }
}

fn achieved(group: &Group, w: Word, bound: usize) -> Result<PairEncodeResult> {
    let s = group.word_sections(&w)?;
    Ok(PairEncodeResult {
        status: EncodeStatus::Achieved,
        sections: Some((s[0].clone(), s[1].clone())),
        word: Some(w),
        bound,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverageReport {
    pub n: usize,
    pub pairs: usize,
    pub reachable: usize,
    pub unreachable: usize,
    pub unknown: usize,
    /// Cheapest encoding cost per reachable pair, histogrammed by cost.
    pub cost_histogram: Vec<(usize, usize)>,
    pub examples_unreachable: Vec<(Word, Word)>,
}

/// For all pairs `(x, y)` with `l(x) + l(y) ≤ n`, whether some element of
/// `St(1) ∩ B(2(l(x) + l(y)))` has sections `(x, y)`.
pub fn image_coverage_report(
    group: &Group,
    n: usize,
    budget: BallBudget,
) -> Result<CoverageReport> {
    require_grigorchuk(group)?;
    let targets = enumeration::ball(group, n)?;
    let search = match enumeration::ball_with_budget(group, 2 * n, budget) {
        Ok(b) => Ok(b),
        Err(Error::BallBudget { partial, .. }) => Err(*partial),
        Err(e) => return Err(e),
    };
    let (ball, complete) = match search {
        Ok(b) => (b, true),
        Err(b) => (b, false),
    };
    let mut cost: HashMap<(Element, Element), usize> = HashMap::new();
    for (i, x) in ball.elements().iter().enumerate() {
        if !group.root_active(x) {
            let s = group.sections(x);
            cost.entry((s[0].clone(), s[1].clone()))
                .or_insert(ball.length(i));
        }
    }
    let mut report = CoverageReport {
        n,
        pairs: 0,
        reachable: 0,
        unreachable: 0,
        unknown: 0,
        cost_histogram: Vec::new(),
        examples_unreachable: Vec::new(),
    };
    let mut hist: HashMap<usize, usize> = HashMap::new();
    for i in 0..targets.len() {
        for j in 0..targets.len() {
            let (li, lj) = (targets.length(i), targets.length(j));
            if li + lj > n {
                continue;
            }
            report.pairs += 1;
            let bound = 2 * (li + lj);
            match cost.get(&(targets.element(i).clone(), targets.element(j).clone())) {
                Some(&c) if c <= bound => {
                    report.reachable += 1;
                    *hist.entry(c).or_default() += 1;
                }
                _ if complete || bound <= ball.radius() => {
                    report.unreachable += 1;
                    if report.examples_unreachable.len() < 16 {
                        report
                            .examples_unreachable
                            .push((targets.word(i).clone(), targets.word(j).clone()));
                    }
                }
                _ => report.unknown += 1,
            }
        }
    }
    let mut h: Vec<(usize, usize)> = hist.into_iter().collect();
    h.sort_unstable();
    report.cost_histogram = h;
    Ok(report)
}

fn conj(base: u8, by: Word) -> Factor {
    Factor::Conjugate {
        base: Word::from_labels(vec![base]),
        by,
    }
}

/// Four conjugates of the rooted generator whose product has sections
/// `([κ₁, κ₂], 1)`: with `ψ(L₁) = (κ₁⁻¹, 1)` and `ψ(L₂) = (κ₂, 1)` it is
/// `a · a^{L₁} · a^{L₁L₂} · a^{L₂}`.
pub fn comm_k_product(
    group: &Group,
    data: &BranchingData,
    k1: &Element,
    k2: &Element,
) -> Result<Expression> {
    let l1 = data.lift(group, &group.invert(k1)?)?;
    let l2 = data.lift(group, k2)?;
    let a = data.rooted;
    let mut e = Expression::new(ExprKind::ConjugateProduct);
    e.push(conj(a, Word::empty()));
    e.push(conj(a, l1.clone()));
    e.push(conj(a, group.reduce(&l1.concat(&l2))?));
    e.push(conj(a, l2));
    let x = e.evaluate(group)?;
    let c = group.commutator(k1, k2)?;
    if group.root_active(&x) || group.sections(&x) != [c, group.identity()] {
        return Err(Error::Soundness(
            "comm_K product does not evaluate to ([k1,k2], 1)".into(),
        ));
    }
    Ok(e)
}

/// `κ · a · κ⁻¹ · a` for `ψ(κ) = (u, 1)`; its sections are `(u, u⁻¹)`.
pub fn comm_k_t_step(
    group: &Group,
    data: &BranchingData,
    u: &Element,
) -> Result<(Word, Vec<Element>)> {
    let l = data.lift(group, u)?;
    let a = Word::from_labels(vec![data.rooted]);
    let w = l.concat(&a).concat(&group.inverse_word(&l)?).concat(&a);
    let x = group.eval(&w)?;
    Ok((group.reduce(&w)?, group.sections(&x)))
}

#[derive(Clone, Debug, Serialize)]
pub struct CommGResult {
    pub expression: Expression,
    pub sigma: Word,
    pub tau: Word,
    pub conjugates: usize,
    /// `4M + 2S` with the measured transversal length `M` and `S = 4`.
    pub budget: usize,
}

/// Writes `[γ, ξ]` as a product of conjugates of generators by splitting
/// `γ = σκ`, `ξ = τλ` with `κ, λ ∈ ψ⁻¹(K × K)`:
///
/// ```text
/// [γ,ξ] = ∏ᵢ [xᵢ,ξ]^{xᵢ₊₁…xₙκ} · [κ,λ] · ∏ᵢ [κ,y_{m−i+1}]^{y_{m−i+2}…y_m λ}
/// ```
///
/// Each `[x,ρ]^ζ` is `x^ζ · x^{ρζ}`, each `[κ,y]^η` is `y^{κη} · y^η`, and
/// `[κ,λ]` is built coordinatewise from two comm_K products.
pub fn comm_g_decompose(
    group: &Group,
    data: &BranchingData,
    gamma: &Word,
    xi: &Word,
) -> Result<CommGResult> {
    if !group.all_involutions() {
        return Err(Error::Precondition("generators must be involutions".into()));
    }
    let g = group.eval(gamma)?;
    let h = group.eval(xi)?;
    let target = group.commutator(&g, &h)?;
    let m = data.pair_max_length();
    let budget = 4 * m + 2 * COMM_K_COST;
    if target.is_identity() {
        return Ok(CommGResult {
            expression: Expression::new(ExprKind::ConjugateProduct),
            sigma: Word::empty(),
            tau: Word::empty(),
            conjugates: 0,
            budget,
        });
    }
    let sigma = data.pair.reps[data.pair.coset_of(group, &g)?].clone();
    let tau = data.pair.reps[data.pair.coset_of(group, &h)?].clone();
    let kappa_w = group.reduce(&group.inverse_word(&sigma)?.concat(gamma))?;
    let lambda_w = group.reduce(&group.inverse_word(&tau)?.concat(xi))?;
    let kappa = group.eval(&kappa_w)?;
    let lambda = group.eval(&lambda_w)?;
    let mut e = Expression::new(ExprKind::ConjugateProduct);
    let xs = sigma.as_bytes();
    for i in 0..xs.len() {
        let zeta = group.reduce(&Word::from_labels(&xs[i + 1..]).concat(&kappa_w))?;
        e.push(conj(xs[i], zeta.clone()));
        e.push(conj(xs[i], group.reduce(&xi.concat(&zeta))?));
    }
    let ks = group.sections(&kappa);
    let ls = group.sections(&lambda);
    let a = Word::from_labels(vec![data.rooted]);
    for v in 0..2 {
        if group.commutator(&ks[v], &ls[v])?.is_identity() {
            continue;
        }
        let part = comm_k_product(group, data, &ks[v], &ls[v])?;
        for f in part.factors {
            match f {
                Factor::Conjugate { base, by } if v == 1 => e.push(Factor::Conjugate {
                    base,
                    by: group.reduce(&by.concat(&a))?,
                }),
                other => e.push(other),
            }
        }
    }
    let ys = tau.as_bytes();
    for i in (0..ys.len()).rev() {
        let eta = group.reduce(&Word::from_labels(&ys[i + 1..]).concat(&lambda_w))?;
        e.push(conj(ys[i], group.reduce(&kappa_w.concat(&eta))?));
        e.push(conj(ys[i], eta));
    }
    if e.evaluate(group)? != target {
        return Err(Error::Soundness(format!(
            "comm_G expression for [{gamma},{xi}] is wrong"
        )));
    }
    Ok(CommGResult {
        conjugates: e.len(),
        expression: e,
        sigma,
        tau,
        budget,
    })
}
