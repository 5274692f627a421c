//! Tree automorphisms of a self-similar group.
//!
//! An element is `(π; g_0, …, g_{d-1})`: it acts on a vertex `x·w` by
//! `g(x·w) = π(x)·g_x(w)`. Products compose right-to-left, so
//!
//! ```text
//! root(xy)      = root(x) ∘ root(y)
//! section_v(xy) = section_{root(y)(v)}(x) · section_v(y)
//! ```
//!
//! Elements are finite trees whose leaves are nucleus states. Trees are kept
//! in a canonical form (any subtree equal to a nucleus state is collapsed to
//! its leaf), so two elements are equal exactly when their canonical keys are
//! equal.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::nucleus::{Nucleus, PairProduct};
use crate::perm::Perm;
use crate::preset::{self, GroupPreset, SectionRef};
use crate::words::{Reducer, Word};

static NEXT_GROUP_ID: AtomicU32 = AtomicU32::new(1);

const INNER: u8 = 0xFF;

/// Default bound on tree depth before a computation is declared undecided.
pub const DEFAULT_DEPTH_GUARD: usize = 64;

#[derive(Clone)]
pub struct Element(Arc<Node>);

struct Node {
    group: u32,
    hash: u64,
    key: Box<[u8]>,
    body: Body,
}

enum Body {
    Leaf(u8),
    Inner {
        perm: Box<[u8]>,
        children: Box<[Element]>,
        depth: u16,
    },
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl Element {
    fn new(group: u32, key: Box<[u8]>, body: Body) -> Element {
        Element(Arc::new(Node {
            group,
            hash: fnv1a(&key),
            key,
            body,
        }))
    }

    /// Canonical byte encoding; equal keys ⇔ equal group elements.
    pub fn key(&self) -> &[u8] {
        &self.0.key
    }

    pub fn group_id(&self) -> u32 {
        self.0.group
    }

    pub fn is_identity(&self) -> bool {
        self.0.key[..] == [0]
    }

    pub fn leaf_code(&self) -> Option<u8> {
        match self.0.body {
            Body::Leaf(c) => Some(c),
            Body::Inner { .. } => None,
        }
    }

    /// Depth of the canonical tree (0 for nucleus letters).
    pub fn depth(&self) -> usize {
        match &self.0.body {
            Body::Leaf(_) => 0,
            Body::Inner { depth, .. } => *depth as usize,
        }
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.group == other.0.group
                && self.0.hash == other.0.hash
                && self.0.key == other.0.key)
    }
}

impl Eq for Element {}

impl Hash for Element {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.0.group, &self.0.key).cmp(&(other.0.group, &other.0.key))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({})", hex::encode(self.key()))
    }
}

/// Finite-depth picture of an element: root permutations down to `depth`,
/// nucleus letters where the canonical tree ends early, `*` where it is cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Portrait {
    Leaf(String),
    Cut,
    Node {
        perm: Vec<u8>,
        children: Vec<Portrait>,
    },
}

impl fmt::Display for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Portrait::Leaf(l) => write!(f, "{l}"),
            Portrait::Cut => write!(f, "*"),
            Portrait::Node { perm, children } => {
                write!(f, "(")?;
                for p in perm {
                    write!(f, "{p}")?;
                }
                write!(f, ";")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub struct Group {
    id: u32,
    preset: GroupPreset,
    nucleus: Nucleus,
    leaves: Vec<Element>,
    leaf_labels: Vec<String>,
    patterns: HashMap<Vec<u8>, u8>,
    products: Vec<Option<Element>>,
    generators: Vec<Element>,
    letter_index: [Option<u8>; 128],
    inverse_letter: Vec<Option<u8>>,
    reducer: std::result::Result<Reducer, String>,
    depth_guard: usize,
    leaf_actions: RwLock<HashMap<(u8, usize), Arc<Perm>>>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("name", &self.preset.name)
            .field("arity", &self.preset.arity)
            .field("nucleus", &self.nucleus.len())
            .finish()
    }
}

impl Group {
    pub fn grigorchuk() -> Group {
        Group::new(preset::grigorchuk()).expect("built-in preset builds")
    }

    pub fn load(spec: &str) -> Result<Group> {
        Group::new(preset::load_preset(spec)?)
    }

    pub fn new(preset: GroupPreset) -> Result<Group> {
        Group::with_depth_guard(preset, DEFAULT_DEPTH_GUARD)
    }

    pub fn with_depth_guard(preset: GroupPreset, depth_guard: usize) -> Result<Group> {
        let id = NEXT_GROUP_ID.fetch_add(1, Ordering::Relaxed);
        let nucleus = Nucleus::build(&preset);
        let k = nucleus.len();
        let leaves: Vec<Element> = (0..k as u8)
            .map(|c| Element::new(id, vec![c].into_boxed_slice(), Body::Leaf(c)))
            .collect();
        let mut patterns = HashMap::new();
        for (c, s) in nucleus.states.iter().enumerate() {
            let mut p = s.perm.to_vec();
            p.extend_from_slice(&s.children);
            patterns.insert(p, c as u8);
        }
        let mut leaf_labels: Vec<String> = (0..k).map(|c| format!("s{c}")).collect();
        for (j, g) in preset.generators.iter().enumerate().rev() {
            let inv = nucleus.generator_inverse[j] as usize;
            if leaf_labels[inv].starts_with('s') {
                leaf_labels[inv] = format!("{}^-1", g.label);
            }
        }
        for (j, g) in preset.generators.iter().enumerate().rev() {
            leaf_labels[nucleus.generator[j] as usize] = g.label.to_string();
        }
        leaf_labels[0] = "1".into();
        let generators = nucleus
            .generator
            .iter()
            .map(|&c| leaves[c as usize].clone())
            .collect();
        let mut letter_index = [None; 128];
        for (j, g) in preset.generators.iter().enumerate() {
            letter_index[g.label as usize] = Some(j as u8);
        }
        let mut group = Group {
            id,
            preset,
            nucleus,
            leaves,
            leaf_labels,
            patterns,
            products: Vec::new(),
            generators,
            letter_index,
            inverse_letter: Vec::new(),
            reducer: Err("not built".into()),
            depth_guard,
            leaf_actions: RwLock::new(HashMap::new()),
        };
        group.products = group.unfold_leaf_products();
        group.inverse_letter = (0..group.generators.len())
            .map(|j| {
                let inv = group.leaves[group.nucleus.generator_inverse[j] as usize].clone();
                group
                    .generators
                    .iter()
                    .position(|g| *g == inv)
                    .map(|i| i as u8)
            })
            .collect();
        for (j, g) in group.preset.generators.iter().enumerate() {
            if g.involution && group.inverse_letter[j] != Some(j as u8) {
                return Err(Error::Validation {
                    generator: Some(g.label.to_string()),
                    message: "declared involution but g² ≠ 1".into(),
                });
            }
        }
        group.reducer = Reducer::build(&group);
        Ok(group)
    }

    fn unfold_leaf_products(&self) -> Vec<Option<Element>> {
        let k = self.nucleus.len();
        let mut memo: Vec<Option<Option<Element>>> = vec![None; k * k];
        let mut visiting = vec![false; k * k];
        for i in 0..k * k {
            self.unfold(i, &mut memo, &mut visiting);
        }
        memo.into_iter().map(|m| m.flatten()).collect()
    }

    fn unfold(
        &self,
        i: usize,
        memo: &mut [Option<Option<Element>>],
        visiting: &mut [bool],
    ) -> Option<Element> {
        if let Some(done) = &memo[i] {
            return done.clone();
        }
        if visiting[i] {
            // only reachable for non-contracting presets
            return None;
        }
        visiting[i] = true;
        let k = self.nucleus.len();
        let result = match &self.nucleus.products[i] {
            PairProduct::Leaf(c) => Some(self.leaves[*c as usize].clone()),
            PairProduct::Node { perm, children } => {
                let mut kids = Vec::with_capacity(children.len());
                let mut ok = true;
                for &(a, b) in children {
                    match self.unfold(a as usize * k + b as usize, memo, visiting) {
                        Some(e) => kids.push(e),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    Some(self.make_node(perm.clone(), kids))
                } else {
                    None
                }
            }
        };
        visiting[i] = false;
        memo[i] = Some(result.clone());
        result
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn preset(&self) -> &GroupPreset {
        &self.preset
    }

    pub fn name(&self) -> &str {
        &self.preset.name
    }

    pub fn arity(&self) -> usize {
        self.preset.arity
    }

    pub fn is_contracting(&self) -> bool {
        self.nucleus.contracting
    }

    pub fn nucleus_size(&self) -> usize {
        self.nucleus.len()
    }

    pub fn nucleus_label(&self, code: u8) -> &str {
        &self.leaf_labels[code as usize]
    }

    pub fn identity(&self) -> Element {
        self.leaves[0].clone()
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    /// Generator labels in declaration order.
    pub fn labels(&self) -> Vec<u8> {
        self.preset
            .generators
            .iter()
            .map(|g| g.label as u8)
            .collect()
    }

    pub fn generator(&self, label: u8) -> Option<&Element> {
        self.letter(label).map(|j| &self.generators[j])
    }

    pub(crate) fn letter(&self, label: u8) -> Option<usize> {
        self.letter_index
            .get(label as usize)
            .copied()
            .flatten()
            .map(|j| j as usize)
    }

    /// Label of the generator equal to the inverse of `label`, if any.
    pub fn inverse_label(&self, label: u8) -> Option<u8> {
        let j = self.letter(label)?;
        self.inverse_letter[j].map(|i| self.preset.generators[i as usize].label as u8)
    }

    pub fn all_involutions(&self) -> bool {
        (0..self.generators.len()).all(|j| self.inverse_letter[j] == Some(j as u8))
    }

    pub fn reducer(&self) -> Result<&Reducer> {
        self.reducer
            .as_ref()
            .map_err(|e| Error::Precondition(format!("word reduction unavailable: {e}")))
    }

    pub fn depth_guard(&self) -> usize {
        self.depth_guard
    }

    fn check(&self, x: &Element) -> Result<()> {
        if x.group_id() == self.id {
            Ok(())
        } else {
            Err(Error::MixedPresets)
        }
    }

    fn leaf_state(&self, code: u8) -> &crate::nucleus::NState {
        &self.nucleus.states[code as usize]
    }

    /// Root permutation as a byte slice (length d).
    pub fn root_perm_bytes<'a>(&'a self, x: &'a Element) -> &'a [u8] {
        match &x.0.body {
            Body::Leaf(c) => &self.leaf_state(*c).perm,
            Body::Inner { perm, .. } => perm,
        }
    }

    pub fn root_perm(&self, x: &Element) -> Perm {
        Perm::from_images_unchecked(self.root_perm_bytes(x).iter().map(|&b| b as u32).collect())
    }

    pub fn root_active(&self, x: &Element) -> bool {
        self.root_perm_bytes(x)
            .iter()
            .enumerate()
            .any(|(i, &p)| p as usize != i)
    }

    #[inline]
    fn child(&self, x: &Element, v: usize) -> Element {
        match &x.0.body {
            Body::Leaf(c) => self.leaves[self.leaf_state(*c).children[v] as usize].clone(),
            Body::Inner { children, .. } => children[v].clone(),
        }
    }

    /// Builds a canonical node, collapsing it to a nucleus letter when it is one.
    pub(crate) fn make_node(&self, perm: Box<[u8]>, children: Vec<Element>) -> Element {
        if children.iter().all(|c| matches!(c.0.body, Body::Leaf(_))) {
            let mut pat = perm.to_vec();
            pat.extend(children.iter().map(|c| c.0.key[0]));
            if let Some(&code) = self.patterns.get(&pat) {
                return self.leaves[code as usize].clone();
            }
        }
        let mut key = Vec::with_capacity(
            1 + perm.len() + children.iter().map(|c| c.key().len()).sum::<usize>(),
        );
        key.push(INNER);
        key.extend_from_slice(&perm);
        let mut depth = 0;
        for c in &children {
            key.extend_from_slice(c.key());
            depth = depth.max(c.depth() + 1);
        }
        Element::new(
            self.id,
            key.into_boxed_slice(),
            Body::Inner {
                perm,
                children: children.into_boxed_slice(),
                depth: depth as u16,
            },
        )
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check(x)?;
        self.check(y)?;
        self.mul_rec(x, y, 0)
    }

    fn mul_rec(&self, x: &Element, y: &Element, depth: usize) -> Result<Element> {
        if x.is_identity() {
            return Ok(y.clone());
        }
        if y.is_identity() {
            return Ok(x.clone());
        }
        if depth > self.depth_guard {
            return Err(Error::Undecided(self.depth_guard));
        }
        if let (Body::Leaf(a), Body::Leaf(b)) = (&x.0.body, &y.0.body) {
            let k = self.nucleus.len();
            return self.products[*a as usize * k + *b as usize]
                .clone()
                .ok_or(Error::Undecided(self.depth_guard));
        }
        let px = self.root_perm_bytes(x);
        let py = self.root_perm_bytes(y);
        let perm: Box<[u8]> = py.iter().map(|&v| px[v as usize]).collect();
        let mut children = Vec::with_capacity(py.len());
        for (v, &pv) in py.iter().enumerate() {
            children.push(self.mul_rec(
                &self.child(x, pv as usize),
                &self.child(y, v),
                depth + 1,
            )?);
        }
        Ok(self.make_node(perm, children))
    }

    pub fn invert(&self, x: &Element) -> Result<Element> {
        self.check(x)?;
        self.inv_rec(x)
    }

    fn inv_rec(&self, x: &Element) -> Result<Element> {
        match &x.0.body {
            Body::Leaf(c) => self.nucleus.inverse[*c as usize]
                .map(|i| self.leaves[i as usize].clone())
                .ok_or(Error::Undecided(self.depth_guard)),
            Body::Inner { perm, children, .. } => {
                let mut inv = vec![0u8; perm.len()];
                for (v, &p) in perm.iter().enumerate() {
                    inv[p as usize] = v as u8;
                }
                let kids = (0..perm.len())
                    .map(|v| self.inv_rec(&children[inv[v] as usize]))
                    .collect::<Result<Vec<_>>>()?;
                Ok(self.make_node(inv.into_boxed_slice(), kids))
            }
        }
    }

    /// Iterated section along a vertex path `v_1 v_2 …`.
    pub fn section(&self, x: &Element, path: &[usize]) -> Result<Element> {
        self.check(x)?;
        let mut cur = x.clone();
        for &v in path {
            if v >= self.arity() {
                return Err(Error::InvalidPath {
                    symbol: v,
                    arity: self.arity(),
                });
            }
            cur = self.child(&cur, v);
        }
        Ok(cur)
    }

    /// All level-1 sections.
    pub fn sections(&self, x: &Element) -> Vec<Element> {
        (0..self.arity()).map(|v| self.child(x, v)).collect()
    }

    pub fn is_identity(&self, x: &Element) -> Result<bool> {
        self.check(x)?;
        Ok(x.is_identity())
    }

    pub fn equals(&self, x: &Element, y: &Element) -> Result<bool> {
        self.check(x)?;
        self.check(y)?;
        Ok(x == y)
    }

    pub fn canonical_key(&self, x: &Element) -> Result<Vec<u8>> {
        self.check(x)?;
        Ok(x.key().to_vec())
    }

    /// Rebuilds an element from its canonical key, rejecting non-canonical input.
    pub fn from_key(&self, key: &[u8]) -> Result<Element> {
        let mut pos = 0;
        let e = self.parse_key(key, &mut pos)?;
        if pos != key.len() || e.key() != key {
            return Err(Error::Cache("non-canonical element key".into()));
        }
        Ok(e)
    }

    fn parse_key(&self, key: &[u8], pos: &mut usize) -> Result<Element> {
        let bad = || Error::Cache("malformed element key".into());
        let &tag = key.get(*pos).ok_or_else(bad)?;
        *pos += 1;
        if tag != INNER {
            return self.leaves.get(tag as usize).cloned().ok_or_else(bad);
        }
        let d = self.arity();
        let perm = key.get(*pos..*pos + d).ok_or_else(bad)?;
        if Perm::from_images(perm.iter().map(|&p| p as u32).collect()).is_none() {
            return Err(bad());
        }
        let perm: Box<[u8]> = perm.into();
        *pos += d;
        let mut kids = Vec::with_capacity(d);
        for _ in 0..d {
            kids.push(self.parse_key(key, pos)?);
        }
        Ok(self.make_node(perm, kids))
    }

    fn leaf_action(&self, code: u8, m: usize) -> Arc<Perm> {
        if let Some(p) = self.leaf_actions.read().unwrap().get(&(code, m)) {
            return p.clone();
        }
        let p = Arc::new(self.compute_action(&self.leaves[code as usize].clone(), m));
        self.leaf_actions
            .write()
            .unwrap()
            .insert((code, m), p.clone());
        p
    }

    fn compute_action(&self, x: &Element, m: usize) -> Perm {
        let d = self.arity();
        if m == 0 {
            return Perm::identity(1);
        }
        let block = d.pow(m as u32 - 1);
        let perm = self.root_perm_bytes(x);
        let mut images = vec![0u32; block * d];
        for (v, &pv) in perm.iter().enumerate() {
            let sub = self.action_rec(&self.child(x, v), m - 1);
            for w in 0..block {
                images[v * block + w] = (pv as usize * block + sub.apply(w)) as u32;
            }
        }
        Perm::from_images_unchecked(images)
    }

    fn action_rec(&self, x: &Element, m: usize) -> Arc<Perm> {
        match x.0.body {
            Body::Leaf(c) => self.leaf_action(c, m),
            Body::Inner { .. } => Arc::new(self.compute_action(x, m)),
        }
    }

    /// Permutation induced on the `d^m` vertices of level `m`; vertex
    /// `x_1…x_m` has index `Σ x_i d^{m-i}`.
    pub fn level_action(&self, x: &Element, m: usize) -> Result<Perm> {
        self.check(x)?;
        Ok((*self.action_rec(x, m)).clone())
    }

    pub fn portrait(&self, x: &Element, depth: usize) -> Portrait {
        match &x.0.body {
            Body::Leaf(c) => Portrait::Leaf(self.leaf_labels[*c as usize].clone()),
            Body::Inner { .. } if depth == 0 => Portrait::Cut,
            Body::Inner { perm, children, .. } => Portrait::Node {
                perm: perm.to_vec(),
                children: children
                    .iter()
                    .map(|c| self.portrait(c, depth - 1))
                    .collect(),
            },
        }
    }

    pub fn power(&self, x: &Element, n: usize) -> Result<Element> {
        let mut acc = self.identity();
        for _ in 0..n {
            acc = self.multiply(&acc, x)?;
        }
        Ok(acc)
    }

    /// `x^t = t⁻¹ x t`.
    pub fn conjugate(&self, x: &Element, t: &Element) -> Result<Element> {
        let ti = self.invert(t)?;
        self.multiply(&self.multiply(&ti, x)?, t)
    }

    /// `[x, y] = x⁻¹ y⁻¹ x y`.
    pub fn commutator(&self, x: &Element, y: &Element) -> Result<Element> {
        let xi = self.invert(x)?;
        let yi = self.invert(y)?;
        let left = self.multiply(&xi, &yi)?;
        let right = self.multiply(x, y)?;
        self.multiply(&left, &right)
    }

    pub fn eval(&self, w: &Word) -> Result<Element> {
        let mut acc = self.identity();
        for &l in w.as_bytes() {
            let j = self.letter(l).ok_or_else(|| Error::WordParse {
                word: w.to_string(),
                message: format!("'{}' is not a generator", l as char),
            })?;
            acc = self.mul_rec(&acc, &self.generators[j], 0)?;
        }
        Ok(acc)
    }

    pub fn eval_str(&self, s: &str) -> Result<Element> {
        self.eval(&self.parse_word(s)?)
    }

    /// Letter section of a generator at vertex `v`: `None` for the identity.
    pub(crate) fn generator_section_label(&self, letter: usize, v: usize) -> Result<Option<u8>> {
        let gens = &self.preset.generators;
        match gens[letter].sections[v] {
            SectionRef::Identity => Ok(None),
            SectionRef::Generator(j) => Ok(Some(gens[j].label as u8)),
            SectionRef::Inverse(j) => self.inverse_letter[j]
                .map(|i| Some(gens[i as usize].label as u8))
                .ok_or_else(|| {
                    Error::Precondition(format!(
                        "inverse of '{}' is not a generator letter",
                        gens[j].label
                    ))
                }),
        }
    }

    pub(crate) fn generator_perm(&self, letter: usize) -> &[u8] {
        &self.preset.generators[letter].perm
    }
}
