//! Balls in the Cayley graph, word growth and the `.ballv1` cache format.
//!
//! Balls are built layer by layer. Each layer is expanded in parallel, then
//! merged keeping the lexicographically least geodesic word per element, so
//! the result does not depend on the number of worker threads.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constructions::QuotientModel;
use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::perm::Perm;
use crate::words::Word;

pub const CACHE_FORMAT: &str = "ballv1";
pub const CACHE_VERSION: u32 = 1;

/// Default cap on the number of stored elements.
pub const DEFAULT_MAX_ELEMENTS: usize = 20_000_000;

#[derive(Clone)]
pub struct Ball {
    radius: usize,
    group_id: u32,
    fingerprint: String,
    elements: Vec<Element>,
    words: Vec<Word>,
    /// `layers[k]` is the index of the first element of length `k`.
    layers: Vec<usize>,
    index: HashMap<Element, u32>,
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ball")
            .field("radius", &self.radius)
            .field("size", &self.elements.len())
            .finish()
    }
}

impl Ball {
    fn singleton(group: &Group) -> Ball {
        let id = group.identity();
        Ball {
            radius: 0,
            group_id: group.id(),
            fingerprint: group.preset().fingerprint(),
            index: HashMap::from([(id.clone(), 0)]),
            elements: vec![id],
            words: vec![Word::empty()],
            layers: vec![0],
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements in order of (geodesic length, geodesic word).
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn word(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn length(&self, i: usize) -> usize {
        self.words[i].len()
    }

    pub fn index_of(&self, x: &Element) -> Option<usize> {
        self.index.get(x).map(|&i| i as usize)
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.index.contains_key(x)
    }

    /// Geodesic length and lexicographically least geodesic word.
    pub fn get(&self, x: &Element) -> Option<(usize, &Word)> {
        self.index_of(x)
            .map(|i| (self.words[i].len(), &self.words[i]))
    }

    /// Number of elements of length at most `k`.
    pub fn gamma(&self, k: usize) -> usize {
        if k >= self.radius {
            self.elements.len()
        } else {
            self.layers[k + 1]
        }
    }

    /// Index range of the elements of length exactly `k`.
    pub fn sphere(&self, k: usize) -> std::ops::Range<usize> {
        let start = self.layers[k];
        let end = if k >= self.radius {
            self.elements.len()
        } else {
            self.layers[k + 1]
        };
        start..end
    }

    /// The sub-ball of radius `k ≤ radius`.
    pub fn truncate(&self, k: usize) -> Ball {
        let k = k.min(self.radius);
        let n = self.gamma(k);
        Ball {
            radius: k,
            group_id: self.group_id,
            fingerprint: self.fingerprint.clone(),
            elements: self.elements[..n].to_vec(),
            words: self.words[..n].to_vec(),
            layers: self.layers[..=k].to_vec(),
            index: self.elements[..n].iter().cloned().zip(0u32..).collect(),
        }
    }

    fn check_group(&self, group: &Group) -> Result<()> {
        if self.group_id == group.id() {
            Ok(())
        } else {
            Err(Error::MixedPresets)
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BallBudget {
    pub max_elements: usize,
}

impl Default for BallBudget {
    fn default() -> Self {
        BallBudget {
            max_elements: DEFAULT_MAX_ELEMENTS,
        }
    }
}

pub fn ball(group: &Group, n: usize) -> Result<Ball> {
    ball_with_budget(group, n, BallBudget::default())
}

pub fn ball_with_budget(group: &Group, n: usize, budget: BallBudget) -> Result<Ball> {
    extend_ball(group, Ball::singleton(group), n, budget)
}

/// Grows `ball` to radius `n` (no-op if it is already that large).
pub fn extend_ball(group: &Group, mut ball: Ball, n: usize, budget: BallBudget) -> Result<Ball> {
    ball.check_group(group)?;
    let gens: Vec<(u8, Element)> = group
        .labels()
        .into_iter()
        .map(|l| (l, group.generator(l).unwrap().clone()))
        .collect();
    while ball.radius < n {
        let frontier = ball.sphere(ball.radius);
        let candidates: Vec<(Element, Word)> = frontier
            .into_par_iter()
            .map(|i| -> Result<Vec<(Element, Word)>> {
                let x = &ball.elements[i];
                let mut out = Vec::new();
                for (l, g) in &gens {
                    let y = group.multiply(x, g)?;
                    if !ball.index.contains_key(&y) {
                        let mut w = ball.words[i].clone();
                        w.push(*l);
                        out.push((y, w));
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let mut best: HashMap<Element, Word> = HashMap::new();
        for (y, w) in candidates {
            match best.get_mut(&y) {
                Some(cur) if *cur <= w => {}
                Some(cur) => *cur = w,
                None => {
                    best.insert(y, w);
                }
            }
        }
        if ball.elements.len() + best.len() > budget.max_elements {
            let radius = ball.radius;
            return Err(Error::BallBudget {
                last_complete_radius: radius,
                partial: Box::new(ball),
            });
        }
        let mut layer: Vec<(Word, Element)> = best.into_iter().map(|(e, w)| (w, e)).collect();
        layer.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
        ball.layers.push(ball.elements.len());
        for (w, e) in layer {
            ball.index.insert(e.clone(), ball.elements.len() as u32);
            ball.elements.push(e);
            ball.words.push(w);
        }
        ball.radius += 1;
    }
    Ok(ball)
}

pub fn geodesic_length(x: &Element, ball: &Ball) -> Result<usize> {
    ball.get(x)
        .map(|(l, _)| l)
        .ok_or(Error::NotInBall(ball.radius))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub rows: Vec<(usize, u64)>,
    /// Level used by the level-action dedup path.
    pub action_depth: usize,
}

impl GrowthTable {
    pub fn gamma(&self, n: usize) -> Option<u64> {
        self.rows.get(n).map(|r| r.1)
    }

    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|p| p[0].1 <= p[1].1)
    }

    /// Pairs `(n, m)` violating `γ(n+m) ≤ γ(n)γ(m)`.
    pub fn submultiplicativity_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for n in 0..self.rows.len() {
            for m in n..self.rows.len() - n {
                if self.rows[n + m].1 > self.rows[n].1 * self.rows[m].1 {
                    out.push((n, m));
                }
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,gamma\n");
        for (n, g) in &self.rows {
            s.push_str(&format!("{n},{g}\n"));
        }
        s
    }
}

/// Default level for the level-action dedup path: `⌈log₂ N⌉ + 2`.
pub fn default_action_depth(n: usize) -> usize {
    (n.max(1) as f64).log2().ceil() as usize + 2
}

/// Sphere-cumulative counts of distinct level-`m` actions of words of length `≤ n`.
pub fn level_action_growth(group: &Group, n: usize, m: usize) -> Result<Vec<u64>> {
    let gens: Vec<Perm> = group
        .generators()
        .iter()
        .map(|g| group.level_action(g, m))
        .collect::<Result<_>>()?;
    let id = Perm::identity(group.arity().pow(m as u32));
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    let mut out = vec![1u64];
    for _ in 0..n {
        let next: Vec<Perm> = frontier
            .par_iter()
            .flat_map_iter(|p| gens.iter().map(move |g| p.compose(g)))
            .collect();
        let mut fresh = Vec::new();
        for p in next {
            if !seen.contains(&p) {
                seen.insert(p.clone());
                fresh.push(p);
            }
        }
        frontier = fresh;
        out.push(seen.len() as u64);
    }
    Ok(out)
}

/// γ(n) for `n ≤ max_n`, cross-checked against level-action dedup at `depth`.
pub fn growth_table_at(group: &Group, max_n: usize, depth: usize) -> Result<(GrowthTable, Ball)> {
    let b = ball(group, max_n)?;
    let by_action = level_action_growth(group, max_n, depth)?;
    let mut rows = Vec::new();
    for (n, &act) in by_action.iter().enumerate() {
        let by_key = b.gamma(n) as u64;
        if by_key != act {
            return Err(Error::DedupMismatch {
                n,
                by_key,
                by_action: act,
            });
        }
        rows.push((n, by_key));
    }
    Ok((
        GrowthTable {
            rows,
            action_depth: depth,
        },
        b,
    ))
}

pub fn growth_table(group: &Group, max_n: usize) -> Result<GrowthTable> {
    growth_table_at(group, max_n, default_action_depth(max_n)).map(|t| t.0)
}

/// Exponent sums of `a`, `b+d`, `c+d` modulo 2 (Grigorchuk labels).
pub fn parity_vector(w: &Word) -> [u8; 3] {
    let c = |l| w.count(l) as u8;
    [
        c(b'a') & 1,
        (c(b'b') + c(b'd')) & 1,
        (c(b'c') + c(b'd')) & 1,
    ]
}

pub enum Filter<'a> {
    /// First-level stabilizer.
    St1,
    /// Zero parity vector; a necessary condition for the derived subgroup.
    Derived,
    K(&'a QuotientModel),
}

pub fn passes(group: &Group, filter: &Filter<'_>, x: &Element, w: &Word) -> Result<bool> {
    match filter {
        Filter::St1 => Ok(!group.root_active(x)),
        Filter::Derived => {
            if !group.preset().is_grigorchuk() {
                return Err(Error::Precondition(
                    "parity filter is defined for the Grigorchuk preset only".into(),
                ));
            }
            Ok(parity_vector(w) == [0, 0, 0])
        }
        Filter::K(model) => model.contains(group, x),
    }
}

pub fn membership_counts(group: &Group, ball: &Ball, filter: &Filter<'_>) -> Result<usize> {
    ball.check_group(group)?;
    let mut n = 0;
    for i in 0..ball.len() {
        if passes(group, filter, ball.element(i), ball.word(i))? {
            n += 1;
        }
    }
    Ok(n)
}

/// St(1) counts per radius: `rows[k] = |B(k) ∩ St(1)|`.
pub fn st1_counts(group: &Group, ball: &Ball) -> Vec<u64> {
    let mut out = Vec::with_capacity(ball.radius + 1);
    let mut acc = 0u64;
    for k in 0..=ball.radius {
        for i in ball.sphere(k) {
            if !group.root_active(ball.element(i)) {
                acc += 1;
            }
        }
        out.push(acc);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct CacheHeader {
    format: String,
    version: u32,
    preset: String,
    radius: usize,
    records: usize,
    sha256: String,
}

fn encode_records(ball: &Ball) -> Vec<u8> {
    let mut body = Vec::new();
    for (e, w) in ball.elements.iter().zip(&ball.words) {
        body.extend_from_slice(&(e.key().len() as u32).to_le_bytes());
        body.extend_from_slice(e.key());
        body.extend_from_slice(&(w.len() as u32).to_le_bytes());
        body.extend_from_slice(w.as_bytes());
    }
    body
}

pub fn save_ball(ball: &Ball, path: &Path) -> Result<()> {
    let body = encode_records(ball);
    let header = CacheHeader {
        format: CACHE_FORMAT.into(),
        version: CACHE_VERSION,
        preset: ball.fingerprint.clone(),
        radius: ball.radius,
        records: ball.len(),
        sha256: hex::encode(Sha256::digest(&body)),
    };
    let tmp = path.with_extension("ballv1.tmp");
    {
        let mut f = BufWriter::new(File::create(&tmp)?);
        serde_json::to_writer(&mut f, &header)?;
        f.write_all(b"\n")?;
        f.write_all(&body)?;
        f.flush()?;
    }
    std::fs::rename(tmp, path)?;
    Ok(())
}

fn take<'a>(body: &'a [u8], pos: &mut usize, n: usize) -> Result<&'a [u8]> {
    let s = body
        .get(*pos..*pos + n)
        .ok_or_else(|| Error::Cache("truncated record".into()))?;
    *pos += n;
    Ok(s)
}

fn take_u32(body: &[u8], pos: &mut usize) -> Result<usize> {
    let b = take(body, pos, 4)?;
    Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
}

pub fn load_ball(group: &Group, path: &Path) -> Result<Ball> {
    let mut r = BufReader::new(File::open(path)?);
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: CacheHeader = serde_json::from_str(line.trim_end())
        .map_err(|e| Error::Cache(format!("bad header: {e}")))?;
    if header.format != CACHE_FORMAT || header.version != CACHE_VERSION {
        return Err(Error::Cache(format!(
            "unsupported format {} v{}",
            header.format, header.version
        )));
    }
    if header.preset != group.preset().fingerprint() {
        return Err(Error::Cache("cache belongs to a different preset".into()));
    }
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if hex::encode(Sha256::digest(&body)) != header.sha256 {
        return Err(Error::Cache(
            "checksum mismatch (truncated or corrupted file)".into(),
        ));
    }
    let mut pos = 0;
    let mut ball = Ball::singleton(group);
    ball.elements.clear();
    ball.words.clear();
    ball.index.clear();
    ball.layers = vec![0];
    ball.radius = header.radius;
    for i in 0..header.records {
        let kl = take_u32(&body, &mut pos)?;
        let e = group.from_key(take(&body, &mut pos, kl)?)?;
        let wl = take_u32(&body, &mut pos)?;
        let w = Word::try_from(String::from_utf8_lossy(take(&body, &mut pos, wl)?).into_owned())
            .map_err(Error::Cache)?;
        let prev = ball.words.last().map_or(0, |p| p.len());
        if w.len() < prev || w.len() > header.radius || (i == 0) != w.is_empty() {
            return Err(Error::Cache("records out of order".into()));
        }
        for _ in prev..w.len() {
            ball.layers.push(i);
        }
        if group.eval(&w)? != e {
            return Err(Error::Cache(format!(
                "record {i}: word '{w}' does not match key"
            )));
        }
        if ball.index.insert(e.clone(), i as u32).is_some() {
            return Err(Error::Cache("duplicate element".into()));
        }
        ball.elements.push(e);
        ball.words.push(w);
    }
    if pos != body.len() || ball.layers.len() != header.radius + 1 {
        return Err(Error::Cache("record count mismatch".into()));
    }
    verify_closure(group, &ball)?;
    Ok(ball)
}

/// Every element of length `k < radius` has all its neighbors within length `k + 1`.
pub fn verify_closure(group: &Group, ball: &Ball) -> Result<()> {
    if ball.radius == 0 {
        return Ok(());
    }
    let gens = group.generators();
    (0..ball.gamma(ball.radius - 1))
        .into_par_iter()
        .try_for_each(|i| {
            let x = ball.element(i);
            for g in gens {
                let y = group.multiply(x, g)?;
                match ball.get(&y) {
                    Some((l, _)) if l <= ball.length(i) + 1 && l + 1 >= ball.length(i) => {}
                    _ => {
                        return Err(Error::Cache(format!(
                            "ball not closed at '{}'",
                            ball.word(i)
                        )))
                    }
                }
            }
            Ok(())
        })
}

pub fn cache_path(dir: &Path, group: &Group, n: usize) -> PathBuf {
    let fp = group.preset().fingerprint();
    dir.join(format!(
        "{}-{}-r{n}.{CACHE_FORMAT}",
        group.name(),
        &fp[..12]
    ))
}

/// Loads `ball(n)` from `dir` if cached there, otherwise computes and stores it.
pub fn ball_cached(group: &Group, n: usize, dir: Option<&Path>) -> Result<Ball> {
    let Some(dir) = dir else {
        return ball(group, n);
    };
    let path = cache_path(dir, group, n);
    if path.exists() {
        if let Ok(b) = load_ball(group, &path) {
            return Ok(b);
        }
    }
    let b = ball(group, n)?;
    std::fs::create_dir_all(dir)?;
    save_ball(&b, &path)?;
    Ok(b)
}
