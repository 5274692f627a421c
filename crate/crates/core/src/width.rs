//! Bounded-width searches: products of conjugates, commutators and
//! palindromes, the conjugates-to-commutators rewriter, and an independent
//! engine for the infinite dihedral group.
//!
//! Widths are universally quantified, so a failed search is reported as
//! inconclusive and never as a refutation.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::conjugacy::conjugacy_orbit;
use crate::enumeration::{self, parity_vector};
use crate::error::{Error, Result};
use crate::expression::{ExprKind, Expression, Factor};
use crate::group::{Element, Group};
use crate::words::Word;

#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    /// Conjugator (or commutator entry) radius.
    pub radius: usize,
    pub k_max: usize,
    /// Largest pair table built in memory; beyond it searches stream.
    pub max_pairs: usize,
    pub deadline: Option<Instant>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            radius: 4,
            k_max: 4,
            max_pairs: 4_000_000,
            deadline: None,
        }
    }
}

impl SearchBudget {
    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum WidthOutcome {
    Confirmed { expression: Expression },
    Inconclusive { reason: String },
}

impl WidthOutcome {
    pub fn expression(&self) -> Option<&Expression> {
        match self {
            WidthOutcome::Confirmed { expression } => Some(expression),
            WidthOutcome::Inconclusive { .. } => None,
        }
    }

    pub fn is_confirmed(&self) -> bool {
        matches!(self, WidthOutcome::Confirmed { .. })
    }
}

/// Distinct nontrivial elements with the first witness found for each.
pub struct FactorSet {
    kind: ExprKind,
    elements: Vec<Element>,
    inverses: Vec<Element>,
    factors: Vec<Factor>,
    index: HashMap<Element, usize>,
}

impl FactorSet {
    pub fn new(kind: ExprKind) -> Self {
        FactorSet {
            kind,
            elements: Vec::new(),
            inverses: Vec::new(),
            factors: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn insert(&mut self, group: &Group, x: Element, f: Factor) -> Result<bool> {
        if x.is_identity() || self.index.contains_key(&x) {
            return Ok(false);
        }
        self.index.insert(x.clone(), self.elements.len());
        self.inverses.push(group.invert(&x)?);
        self.elements.push(x);
        self.factors.push(f);
        Ok(true)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn get(&self, x: &Element) -> Option<usize> {
        self.index.get(x).copied()
    }

    /// `{x^t : x ∈ bases, |t| ≤ radius}`.
    pub fn conjugates(group: &Group, bases: &[u8], radius: usize) -> Result<FactorSet> {
        let mut set = FactorSet::new(ExprKind::ConjugateProduct);
        for &b in bases {
            let x = group
                .generator(b)
                .ok_or_else(|| Error::Precondition(format!("'{}' is not a generator", b as char)))?
                .clone();
            for (y, t) in conjugacy_orbit(group, &x, radius)? {
                set.insert(
                    group,
                    y,
                    Factor::Conjugate {
                        base: Word::from_labels(vec![b]),
                        by: t,
                    },
                )?;
            }
        }
        Ok(set)
    }

    /// `{[x, y] : x, y ∈ B(radius)}`.
    pub fn commutators(group: &Group, radius: usize) -> Result<FactorSet> {
        let b = enumeration::ball(group, radius)?;
        let rows: Vec<Vec<Element>> = (0..b.len())
            .into_par_iter()
            .map(|i| {
                (0..b.len())
                    .map(|j| group.commutator(b.element(i), b.element(j)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut set = FactorSet::new(ExprKind::CommutatorProduct);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, c) in row.into_iter().enumerate() {
                if !set.index.contains_key(&c) {
                    set.insert(
                        group,
                        c,
                        Factor::Commutator {
                            x: b.word(i).clone(),
                            y: b.word(j).clone(),
                        },
                    )?;
                }
            }
        }
        Ok(set)
    }

    /// Palindromes `rev(t)·x·t` for generators `x` and `|t| ≤ radius`. Over
    /// involutions these are exactly the conjugates `x^t`.
    pub fn palindromes(group: &Group, radius: usize) -> Result<FactorSet> {
        require_involutions(group)?;
        let mut labels = group.labels();
        labels.sort_unstable();
        let conj = FactorSet::conjugates(group, &labels, radius)?;
        let mut set = FactorSet::new(ExprKind::PalindromeProduct);
        for (x, f) in conj.elements.into_iter().zip(conj.factors) {
            if let Factor::Conjugate { base, by } = f {
                let word = by.reversed().concat(&base).concat(&by);
                set.insert(group, x, Factor::Palindrome { word })?;
            }
        }
        Ok(set)
    }
}

fn require_involutions(group: &Group) -> Result<()> {
    if group.all_involutions() {
        Ok(())
    } else {
        Err(Error::Precondition("generators must be involutions".into()))
    }
}

/// Pairwise products `f_i f_j`, keeping the least `(i, j)` per element.
struct PairTable {
    entries: Vec<(Element, u32, u32)>,
    index: HashMap<Element, usize>,
}

impl PairTable {
    fn build(group: &Group, set: &FactorSet) -> Result<PairTable> {
        let n = set.len();
        let rows: Vec<Vec<Element>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| group.multiply(&set.elements[i], &set.elements[j]))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut t = PairTable {
            entries: Vec::new(),
            index: HashMap::new(),
        };
        for (i, row) in rows.into_iter().enumerate() {
            for (j, p) in row.into_iter().enumerate() {
                if !t.index.contains_key(&p) {
                    t.index.insert(p.clone(), t.entries.len());
                    t.entries.push((p, i as u32, j as u32));
                }
            }
        }
        Ok(t)
    }

    fn get(&self, x: &Element) -> Option<(usize, usize)> {
        self.index.get(x).map(|&k| {
            let e = &self.entries[k];
            (e.1 as usize, e.2 as usize)
        })
    }
}

/// Searches `target = f_1 ⋯ f_k` over the set for `k = 0, 1, …, k_max` and
/// returns the factor indices of the first (smallest-k) hit.
pub struct ProductSearch<'a> {
    group: &'a Group,
    set: &'a FactorSet,
    pairs: Option<PairTable>,
    budget: SearchBudget,
}

impl<'a> ProductSearch<'a> {
    pub fn new(group: &'a Group, set: &'a FactorSet, budget: SearchBudget) -> Result<Self> {
        let n = set.len();
        let pairs = if budget.k_max >= 3 && n.saturating_mul(n) <= budget.max_pairs {
            Some(PairTable::build(group, set)?)
        } else {
            None
        };
        Ok(ProductSearch {
            group,
            set,
            pairs,
            budget,
        })
    }

    pub fn pair_table_size(&self) -> Option<usize> {
        self.pairs.as_ref().map(|p| p.entries.len())
    }

    fn mul(&self, x: &Element, y: &Element) -> Element {
        // both factors come from a contracting preset that already built them
        self.group
            .multiply(x, y)
            .expect("product of known elements")
    }

    pub fn search(&self, target: &Element) -> Result<Option<Vec<usize>>> {
        let g = self.group;
        let set = self.set;
        let n = set.len();
        if target.is_identity() {
            return Ok(Some(Vec::new()));
        }
        if self.budget.k_max >= 1 {
            if let Some(i) = set.get(target) {
                return Ok(Some(vec![i]));
            }
        }
        if self.budget.k_max >= 2 {
            let hit = (0..n).into_par_iter().find_map_first(|i| {
                let y = self.mul(&set.inverses[i], target);
                set.get(&y).map(|j| vec![i, j])
            });
            if hit.is_some() {
                return Ok(hit);
            }
        }
        if self.budget.k_max >= 3 {
            if self.budget.expired() {
                return Err(Error::Budget("deadline reached".into()));
            }
            let hit = match &self.pairs {
                Some(p) => (0..n).into_par_iter().find_map_first(|k| {
                    let y = self.mul(target, &set.inverses[k]);
                    p.get(&y).map(|(i, j)| vec![i, j, k])
                }),
                None => (0..n * n).into_par_iter().find_map_first(|ij| {
                    let (i, j) = (ij / n, ij % n);
                    let y = self.mul(&set.inverses[j], &self.mul(&set.inverses[i], target));
                    set.get(&y).map(|k| vec![i, j, k])
                }),
            };
            if hit.is_some() {
                return Ok(hit);
            }
        }
        let Some(p) = &self.pairs else {
            if self.budget.k_max >= 4 {
                return Err(Error::Budget(format!(
                    "{n} factors exceed the pair-table cap for four or more factors"
                )));
            }
            return Ok(None);
        };
        if self.budget.k_max >= 4 {
            if self.budget.expired() {
                return Err(Error::Budget("deadline reached".into()));
            }
            let hit = p.entries.par_iter().find_map_first(|(x, i, j)| {
                let y = self.mul(&g.invert(x).expect("invertible"), target);
                p.get(&y).map(|(k, l)| vec![*i as usize, *j as usize, k, l])
            });
            if hit.is_some() {
                return Ok(hit);
            }
        }
        if self.budget.k_max >= 5 {
            for f in 0..n {
                if self.budget.expired() {
                    return Err(Error::Budget("deadline reached".into()));
                }
                let rest = self.mul(&set.inverses[f], target);
                let hit = p.entries.par_iter().find_map_first(|(x, i, j)| {
                    let y = self.mul(&g.invert(x).expect("invertible"), &rest);
                    p.get(&y)
                        .map(|(k, l)| vec![f, *i as usize, *j as usize, k, l])
                });
                if hit.is_some() {
                    return Ok(hit);
                }
            }
        }
        Ok(None)
    }

    /// Runs the search and turns a hit into a verified expression.
    pub fn decompose(&self, target: &Element) -> Result<WidthOutcome> {
        let found = match self.search(target) {
            Ok(f) => f,
            Err(Error::Budget(reason)) => return Ok(WidthOutcome::Inconclusive { reason }),
            Err(e) => return Err(e),
        };
        match found {
            Some(ix) => {
                let expression = Expression {
                    kind: self.set.kind,
                    factors: ix
                        .into_iter()
                        .map(|i| self.set.factors[i].clone())
                        .collect(),
                };
                if !expression.verify(self.group, target)? {
                    return Err(Error::Soundness(format!(
                        "expression {expression} failed verification"
                    )));
                }
                Ok(WidthOutcome::Confirmed { expression })
            }
            None => Ok(WidthOutcome::Inconclusive {
                reason: format!(
                    "no product of at most {} factors (radius {})",
                    self.budget.k_max, self.budget.radius
                ),
            }),
        }
    }
}

/// Product of at most `k_max` conjugates `x^t` with `x ∈ bases`, `|t| ≤ radius`.
pub fn conjugate_width(
    group: &Group,
    target: &Element,
    bases: &[u8],
    budget: SearchBudget,
) -> Result<WidthOutcome> {
    let set = FactorSet::conjugates(group, bases, budget.radius)?;
    ProductSearch::new(group, &set, budget)?.decompose(target)
}

/// Product of at most `k_max` commutators with entries in `B(radius)`.
pub fn commutator_width(
    group: &Group,
    target: &Element,
    target_word: &Word,
    budget: SearchBudget,
) -> Result<WidthOutcome> {
    if group.preset().is_grigorchuk() && parity_vector(target_word) != [0, 0, 0] {
        return Err(Error::Precondition(format!(
            "'{target_word}' has nonzero parity and is not in the derived subgroup"
        )));
    }
    let set = FactorSet::commutators(group, budget.radius)?;
    ProductSearch::new(group, &set, budget)?.decompose(target)
}

/// Fewest palindromic pieces of `w` as a word (classic partition DP).
pub fn palindromic_word_split(w: &Word) -> Vec<Word> {
    let s = w.as_bytes();
    let n = s.len();
    let mut best = vec![usize::MAX; n + 1];
    let mut cut = vec![0usize; n + 1];
    best[0] = 0;
    for end in 1..=n {
        for start in 0..end {
            let piece = &s[start..end];
            if best[start] != usize::MAX
                && piece.iter().eq(piece.iter().rev())
                && best[start] + 1 < best[end]
            {
                best[end] = best[start] + 1;
                cut[end] = start;
            }
        }
    }
    let mut out = Vec::new();
    let mut end = n;
    while end > 0 {
        out.push(Word::from_labels(&s[cut[end]..end]));
        end = cut[end];
    }
    out.reverse();
    out
}

/// Product of at most `k_max` palindromes; falls back to splitting the
/// target's own word into palindromic pieces.
pub fn palindromic_width(
    group: &Group,
    target: &Element,
    target_word: &Word,
    search: &ProductSearch<'_>,
) -> Result<WidthOutcome> {
    require_involutions(group)?;
    let k_max = search.budget.k_max;
    let out = search.decompose(target)?;
    if out.is_confirmed() {
        return Ok(out);
    }
    let pieces = palindromic_word_split(target_word);
    if pieces.len() <= k_max {
        let expression = Expression {
            kind: ExprKind::PalindromeProduct,
            factors: pieces
                .into_iter()
                .map(|word| Factor::Palindrome { word })
                .collect(),
        };
        if expression.verify(group, target)? {
            return Ok(WidthOutcome::Confirmed { expression });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct PalindromeViolation {
    pub word: Word,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PalindromeCheckReport {
    pub max_length: usize,
    pub checked: usize,
    pub violations: Vec<PalindromeViolation>,
}

/// Every palindrome `u·x·rev(u)` evaluates to `u x u⁻¹` and every even
/// palindrome `u·rev(u)` reduces to the empty word.
pub fn palindrome_conjugate_check(
    group: &Group,
    max_length: usize,
) -> Result<PalindromeCheckReport> {
    require_involutions(group)?;
    let mut labels = group.labels();
    labels.sort_unstable();
    let k = labels.len();
    let mut report = PalindromeCheckReport {
        max_length,
        checked: 0,
        violations: Vec::new(),
    };
    for len in 0..=max_length {
        let half = len / 2;
        let mut idx = vec![0usize; half];
        loop {
            let u = Word::from_labels(idx.iter().map(|&i| labels[i]).collect::<Vec<_>>());
            let middles: Vec<Option<u8>> = if len % 2 == 1 {
                labels.iter().map(|&l| Some(l)).collect()
            } else {
                vec![None]
            };
            for mid in middles {
                let mut p = u.clone();
                if let Some(x) = mid {
                    p.push(x);
                }
                let p = p.concat(&u.reversed());
                report.checked += 1;
                let ok = match mid {
                    Some(x) => {
                        let ue = group.eval(&u)?;
                        let expected = group.multiply(
                            &group.multiply(&ue, group.generator(x).unwrap())?,
                            &group.invert(&ue)?,
                        )?;
                        group.eval(&p)? == expected
                    }
                    None => group.reduce(&p)?.is_empty(),
                };
                if !ok {
                    report.violations.push(PalindromeViolation {
                        reason: if mid.is_some() {
                            "not the conjugate of its middle letter".into()
                        } else {
                            "even palindrome does not reduce to the empty word".into()
                        },
                        word: p,
                    });
                }
            }
            let mut pos = half;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < k {
                    break;
                }
                idx[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if half == 0 || pos == usize::MAX {
                break;
            }
        }
    }
    Ok(report)
}

/// `∏ x_j^{ρ_j} = (x_1⋯x_N) · ∏ [x_j^{u_j}, ρ_j^{u_j}]` with `u_j = x_{j+1}⋯x_N`.
pub fn rewrite_conjugates_to_commutators(
    group: &Group,
    e: &Expression,
) -> Result<(Word, Expression)> {
    let mut bases = Vec::new();
    let mut rhos = Vec::new();
    for f in &e.factors {
        match f {
            Factor::Conjugate { base, by } => {
                bases.push(base.clone());
                rhos.push(by.clone());
            }
            _ => {
                return Err(Error::Precondition(
                    "expected a product of conjugates".into(),
                ))
            }
        }
    }
    let mut z = Word::empty();
    for b in &bases {
        z = z.concat(b);
    }
    let mut out = Expression::new(ExprKind::CommutatorProduct);
    for j in 0..bases.len() {
        let mut u = Word::empty();
        for b in &bases[j + 1..] {
            u = u.concat(b);
        }
        let ui = group.inverse_word(&u)?;
        let x = group.reduce(&ui.concat(&bases[j]).concat(&u))?;
        let y = group.reduce(&ui.concat(&rhos[j]).concat(&u))?;
        out.push(Factor::Commutator { x, y });
    }
    let z = group.reduce(&z)?;
    let lhs = group.multiply(&group.eval(&z)?, &out.evaluate(group)?)?;
    if lhs != e.evaluate(group)? {
        return Err(Error::Soundness(
            "rewritten commutator product differs".into(),
        ));
    }
    Ok((z, out))
}

/// Words over `{r, s}` in the infinite dihedral group `⟨r, s | r², s²⟩`,
/// kept freely reduced (alternating strings).
pub mod dihedral {
    use serde::Serialize;

    pub fn reduce(w: &[u8]) -> Vec<u8> {
        let mut out: Vec<u8> = Vec::with_capacity(w.len());
        for &c in w {
            if out.last() == Some(&c) {
                out.pop();
            } else {
                out.push(c);
            }
        }
        out
    }

    pub fn mul(x: &[u8], y: &[u8]) -> Vec<u8> {
        let mut v = x.to_vec();
        v.extend_from_slice(y);
        reduce(&v)
    }

    pub fn inverse(x: &[u8]) -> Vec<u8> {
        x.iter().rev().copied().collect()
    }

    pub fn conjugate(x: u8, t: &[u8]) -> Vec<u8> {
        mul(&mul(&inverse(t), &[x]), t)
    }

    /// All elements of length at most `n`, shortest first.
    pub fn elements(n: usize) -> Vec<Vec<u8>> {
        let mut out = vec![Vec::new()];
        for len in 1..=n {
            for first in *b"rs" {
                let w: Vec<u8> = (0..len)
                    .map(|i| {
                        if i % 2 == 0 {
                            first
                        } else if first == b'r' {
                            b's'
                        } else {
                            b'r'
                        }
                    })
                    .collect();
                out.push(w);
            }
        }
        out
    }

    #[derive(Clone, Debug, Serialize)]
    pub struct Decomposition {
        pub element: String,
        /// `(base, conjugator)` pairs whose conjugates multiply to the element.
        pub factors: Vec<(char, String)>,
    }

    #[derive(Clone, Debug, Serialize)]
    pub struct Report {
        pub max_length: usize,
        pub elements: usize,
        pub max_factors: usize,
        pub failures: Vec<String>,
        pub decompositions: Vec<Decomposition>,
    }

    /// Decomposes every element of length `≤ max_length` into at most two
    /// conjugates of `r` and `s`, conjugators of length `≤ max_length`.
    pub fn width_report(max_length: usize) -> Report {
        let mut conj: Vec<(Vec<u8>, u8, Vec<u8>)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for t in elements(max_length) {
            for x in *b"rs" {
                let c = conjugate(x, &t);
                if seen.insert(c.clone()) {
                    conj.push((c, x, t.clone()));
                }
            }
        }
        let lookup: std::collections::HashMap<&[u8], usize> = conj
            .iter()
            .enumerate()
            .map(|(i, c)| (&c.0[..], i))
            .collect();
        let mut report = Report {
            max_length,
            elements: 0,
            max_factors: 0,
            failures: Vec::new(),
            decompositions: Vec::new(),
        };
        for g in elements(max_length) {
            report.elements += 1;
            let found: Option<Vec<usize>> = if g.is_empty() {
                Some(Vec::new())
            } else if let Some(&i) = lookup.get(&g[..]) {
                Some(vec![i])
            } else {
                conj.iter().enumerate().find_map(|(i, c)| {
                    let rest = mul(&inverse(&c.0), &g);
                    lookup.get(&rest[..]).map(|&j| vec![i, j])
                })
            };
            let name = String::from_utf8(g.clone()).unwrap();
            match found {
                Some(ix) => {
                    let mut prod = Vec::new();
                    for &i in &ix {
                        prod = mul(&prod, &conjugate(conj[i].1, &conj[i].2));
                    }
                    if prod != g {
                        report.failures.push(name);
                        continue;
                    }
                    report.max_factors = report.max_factors.max(ix.len());
                    report.decompositions.push(Decomposition {
                        element: name,
                        factors: ix
                            .iter()
                            .map(|&i| {
                                (
                                    conj[i].1 as char,
                                    String::from_utf8(conj[i].2.clone()).unwrap(),
                                )
                            })
                            .collect(),
                    });
                }
                None => report.failures.push(name),
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::from_labels(s)
    }

    fn budget(radius: usize, k_max: usize) -> SearchBudget {
        SearchBudget {
            radius,
            k_max,
            ..Default::default()
        }
    }

    #[test]
    fn conjugate_width_examples() {
        let g = Group::grigorchuk();
        let all = g.labels();
        let out = conjugate_width(&g, &g.eval_str("a").unwrap(), &all, budget(2, 4)).unwrap();
        assert_eq!(out.expression().unwrap().len(), 1);
        let out = conjugate_width(&g, &g.eval_str("bab").unwrap(), &all, budget(2, 4)).unwrap();
        assert_eq!(out.expression().unwrap().len(), 1);
        let out = conjugate_width(&g, &g.eval_str("[a,b]").unwrap(), &all, budget(2, 4)).unwrap();
        assert_eq!(out.expression().unwrap().len(), 2);
    }

    #[test]
    fn commutator_width_examples() {
        let g = Group::grigorchuk();
        let id = commutator_width(&g, &g.identity(), &w(""), budget(2, 2)).unwrap();
        assert_eq!(id.expression().unwrap().len(), 0);
        let ab =
            commutator_width(&g, &g.eval_str("[a,b]").unwrap(), &w("abab"), budget(2, 2)).unwrap();
        assert_eq!(ab.expression().unwrap().len(), 1);
        assert!(commutator_width(&g, &g.eval_str("a").unwrap(), &w("a"), budget(2, 2)).is_err());
    }

    #[test]
    fn palindromes() {
        let g = Group::grigorchuk();
        let set = FactorSet::palindromes(&g, 2).unwrap();
        let s = ProductSearch::new(&g, &set, budget(2, 5)).unwrap();
        let one = palindromic_width(&g, &g.eval_str("aba").unwrap(), &w("aba"), &s).unwrap();
        assert_eq!(one.expression().unwrap().len(), 1);
        let zero = palindromic_width(&g, &g.identity(), &w(""), &s).unwrap();
        assert_eq!(zero.expression().unwrap().len(), 0);
        let two = palindromic_width(&g, &g.eval_str("ab").unwrap(), &w("ab"), &s).unwrap();
        assert_eq!(two.expression().unwrap().len(), 2);
    }

    #[test]
    fn palindrome_split() {
        assert_eq!(
            palindromic_word_split(&w("abacab")),
            vec![w("a"), w("bacab")]
        );
        assert_eq!(palindromic_word_split(&w("abcd")).len(), 4);
        assert!(palindromic_word_split(&w("")).is_empty());
    }

    #[test]
    fn palindrome_lemma_small() {
        let g = Group::grigorchuk();
        let r = palindrome_conjugate_check(&g, 5).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.checked, 1 + 4 + 4 + 16 + 16 + 64);
    }

    #[test]
    fn rewriter() {
        let g = Group::grigorchuk();
        let mut e = Expression::new(ExprKind::ConjugateProduct);
        let (z, c) = rewrite_conjugates_to_commutators(&g, &e).unwrap();
        assert!(z.is_empty() && c.is_empty());
        e.push(Factor::Conjugate {
            base: w("a"),
            by: w("bac"),
        });
        let (z, c) = rewrite_conjugates_to_commutators(&g, &e).unwrap();
        assert_eq!(z, w("a"));
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn dihedral_small() {
        let r = dihedral::width_report(6);
        assert!(r.failures.is_empty());
        assert_eq!(r.max_factors, 2);
        assert_eq!(r.elements, 13);
        let rs = r.decompositions.iter().find(|d| d.element == "rs").unwrap();
        assert_eq!(rs.factors.len(), 2);
        let rr = r.decompositions.iter().find(|d| d.element == "r").unwrap();
        assert_eq!(rr.factors.len(), 1);
    }
}
