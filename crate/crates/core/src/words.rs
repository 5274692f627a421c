//! Generator words, the letter-pair rewriting system and reduced-word streams.
//!
//! A word is a string of single-letter generator labels. Reduction uses the
//! rules `xy → 1` and `xy → z` for every pair whose product was verified equal
//! to the identity or to a generator when the group was built. For Grigorchuk
//! this is `xx → 1` plus the Klein table on `{b, c, d}`, and reduced words are
//! exactly the strings `a^ε * a * … a *^δ` with `*` in `{b, c, d}`.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Group;

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    /// Wraps raw ASCII labels without checking them against a preset.
    pub fn from_labels(labels: impl Into<Vec<u8>>) -> Word {
        Word(labels.into())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, label: u8) {
        self.0.push(label);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn is_palindrome(&self) -> bool {
        self.0.iter().eq(self.0.iter().rev())
    }

    pub fn count(&self, label: u8) -> usize {
        self.0.iter().filter(|&&l| l == label).count()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // labels are validated ASCII letters
        f.write_str(std::str::from_utf8(&self.0).unwrap_or("?"))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for Word {
    type Error = String;
    fn try_from(s: String) -> std::result::Result<Word, String> {
        if s.bytes().all(|b| b.is_ascii_alphabetic()) {
            Ok(Word(s.into_bytes()))
        } else {
            Err(format!("'{s}' is not a plain word"))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rewrite {
    Cancel,
    Replace(u8),
}

/// Length-decreasing letter-pair rewriting system, checked confluent.
#[derive(Clone, Debug)]
pub struct Reducer {
    alphabet: Vec<u8>,
    table: Vec<Option<Rewrite>>,
}

impl Reducer {
    /// Derives the rules from verified products of generator pairs.
    pub(crate) fn build(group: &Group) -> std::result::Result<Reducer, String> {
        let mut alphabet = group.labels();
        alphabet.sort_unstable();
        let mut table = vec![None; 128 * 128];
        let gens = group.generators();
        for &x in &alphabet {
            for &y in &alphabet {
                let gx = group.generator(x).unwrap();
                let gy = group.generator(y).unwrap();
                let p = match group.multiply(gx, gy) {
                    Ok(p) => p,
                    Err(e) => return Err(e.to_string()),
                };
                let rule = if p.is_identity() {
                    Some(Rewrite::Cancel)
                } else {
                    alphabet
                        .iter()
                        .find(|&&z| gens[group.letter(z).unwrap()] == p)
                        .map(|&z| Rewrite::Replace(z))
                };
                table[x as usize * 128 + y as usize] = rule;
            }
        }
        let r = Reducer { alphabet, table };
        let max_len = if r.alphabet.len() > 5 { 4 } else { 6 };
        if let Some(w) = r.confluence_counterexample(max_len) {
            return Err(format!("rewriting rules are not confluent on '{w}'"));
        }
        Ok(r)
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    #[inline]
    pub fn rule(&self, x: u8, y: u8) -> Option<Rewrite> {
        self.table[(x as usize & 127) * 128 + (y as usize & 127)]
    }

    /// All rules as `(lhs, rhs)` strings.
    pub fn rules(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for &x in &self.alphabet {
            for &y in &self.alphabet {
                if let Some(r) = self.rule(x, y) {
                    let rhs = match r {
                        Rewrite::Cancel => String::new(),
                        Rewrite::Replace(z) => (z as char).to_string(),
                    };
                    out.push((format!("{}{}", x as char, y as char), rhs));
                }
            }
        }
        out
    }

    /// Stack-based rewriting; every prefix on the stack is kept reduced.
    pub fn reduce(&self, w: &Word) -> Word {
        let mut stack: Vec<u8> = Vec::with_capacity(w.len());
        for &l in w.as_bytes() {
            let mut cur = Some(l);
            while let Some(c) = cur {
                match stack.last().and_then(|&top| self.rule(top, c)) {
                    None => {
                        stack.push(c);
                        cur = None;
                    }
                    Some(Rewrite::Cancel) => {
                        stack.pop();
                        cur = None;
                    }
                    Some(Rewrite::Replace(z)) => {
                        stack.pop();
                        cur = Some(z);
                    }
                }
            }
        }
        Word(stack)
    }

    pub fn is_reduced(&self, w: &Word) -> bool {
        w.0.windows(2).all(|p| self.rule(p[0], p[1]).is_none())
    }

    fn one_step_rewrites(&self, w: &[u8]) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        for i in 0..w.len().saturating_sub(1) {
            if let Some(r) = self.rule(w[i], w[i + 1]) {
                let mut v = w[..i].to_vec();
                if let Rewrite::Replace(z) = r {
                    v.push(z);
                }
                v.extend_from_slice(&w[i + 2..]);
                out.push(v);
            }
        }
        out
    }

    /// Exhaustive joinability test: every word up to `max_len` letters must
    /// have a single irreducible descendant.
    fn confluence_counterexample(&self, max_len: usize) -> Option<Word> {
        let k = self.alphabet.len();
        for len in 2..=max_len {
            let mut idx = vec![0usize; len];
            loop {
                let w: Vec<u8> = idx.iter().map(|&i| self.alphabet[i]).collect();
                let mut seen = HashSet::new();
                let mut normal = HashSet::new();
                let mut queue = VecDeque::from([w.clone()]);
                while let Some(u) = queue.pop_front() {
                    let next = self.one_step_rewrites(&u);
                    if next.is_empty() {
                        normal.insert(u);
                    }
                    for v in next {
                        if seen.insert(v.clone()) {
                            queue.push_back(v);
                        }
                    }
                }
                if normal.len() != 1 {
                    return Some(Word(w));
                }
                if !advance(&mut idx, k) {
                    break;
                }
            }
        }
        None
    }

    /// Streams all reduced words of length `n` in lexicographic order.
    pub fn enumerate(&self, n: usize) -> ReducedWords<'_> {
        ReducedWords {
            reducer: self,
            len: n,
            stack: Vec::new(),
            word: Vec::new(),
            started: false,
            done: false,
        }
    }

    pub fn count_reduced(&self, n: usize) -> usize {
        self.enumerate(n).count()
    }
}

/// Mixed-radix increment; false once every position has wrapped.
fn advance(idx: &mut [usize], k: usize) -> bool {
    for p in (0..idx.len()).rev() {
        idx[p] += 1;
        if idx[p] < k {
            return true;
        }
        idx[p] = 0;
    }
    false
}

/// Depth-first odometer over reduced words of a fixed length.
pub struct ReducedWords<'a> {
    reducer: &'a Reducer,
    len: usize,
    stack: Vec<usize>,
    word: Vec<u8>,
    started: bool,
    done: bool,
}

impl Iterator for ReducedWords<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.len == 0 {
                self.done = true;
                return Some(Word::empty());
            }
            self.stack.push(0);
        }
        let alphabet = &self.reducer.alphabet;
        loop {
            let depth = match self.stack.len() {
                0 => {
                    self.done = true;
                    return None;
                }
                s => s - 1,
            };
            let next = self.stack[depth];
            if next >= alphabet.len() {
                self.stack.pop();
                continue;
            }
            self.stack[depth] += 1;
            let c = alphabet[next];
            if depth > 0 && self.reducer.rule(self.word[depth - 1], c).is_some() {
                continue;
            }
            self.word.truncate(depth);
            self.word.push(c);
            if depth + 1 == self.len {
                return Some(Word(self.word.clone()));
            }
            self.stack.push(0);
        }
    }
}

impl Group {
    /// Parses letters, commutators `[u,v]`, groups `(w)` and powers `^n`
    /// (negative powers need inverse letters).
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let mut p = Parser {
            group: self,
            src: s.as_bytes(),
            pos: 0,
            text: s,
        };
        let w = p.sequence()?;
        if p.pos != p.src.len() {
            return Err(p.err("unexpected character"));
        }
        Ok(w)
    }

    pub fn inverse_word(&self, w: &Word) -> Result<Word> {
        w.0.iter()
            .rev()
            .map(|&l| {
                self.inverse_label(l).ok_or_else(|| Error::WordParse {
                    word: w.to_string(),
                    message: format!("'{}' has no inverse letter", l as char),
                })
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }

    pub fn reduce(&self, w: &Word) -> Result<Word> {
        Ok(self.reducer()?.reduce(w))
    }

    /// Level-1 section words of `w`, which must fix the first level.
    pub fn word_sections(&self, w: &Word) -> Result<Vec<Word>> {
        let d = self.arity();
        let mut perm: Vec<usize> = (0..d).collect();
        let letters: Vec<usize> =
            w.0.iter()
                .map(|&l| {
                    self.letter(l).ok_or_else(|| Error::WordParse {
                        word: w.to_string(),
                        message: format!("'{}' is not a generator", l as char),
                    })
                })
                .collect::<Result<_>>()?;
        for &j in letters.iter().rev() {
            let pj = self.generator_perm(j);
            for v in perm.iter_mut() {
                *v = pj[*v] as usize;
            }
        }
        if perm.iter().enumerate().any(|(i, &v)| i != v) {
            return Err(Error::Precondition(format!(
                "'{w}' does not fix the first level"
            )));
        }
        let reducer = self.reducer().ok();
        let mut out = Vec::with_capacity(d);
        for v in 0..d {
            let mut rev = Vec::with_capacity(w.len());
            let mut p = v;
            for &j in letters.iter().rev() {
                if let Some(l) = self.generator_section_label(j, p)? {
                    rev.push(l);
                }
                p = self.generator_perm(j)[p] as usize;
            }
            rev.reverse();
            let sw = Word(rev);
            out.push(match reducer {
                Some(r) => r.reduce(&sw),
                None => sw,
            });
        }
        Ok(out)
    }
}

struct Parser<'a> {
    group: &'a Group,
    src: &'a [u8],
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> Error {
        Error::WordParse {
            word: self.text.to_string(),
            message: format!("{message} at position {}", self.pos),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn sequence(&mut self) -> Result<Word> {
        let mut out = Word::empty();
        loop {
            self.skip_ws();
            let Some(&c) = self.src.get(self.pos) else {
                break;
            };
            let atom = match c {
                b'(' => {
                    self.pos += 1;
                    let w = self.sequence()?;
                    self.expect(b')')?;
                    w
                }
                b'[' => {
                    self.pos += 1;
                    let u = self.sequence()?;
                    self.expect(b',')?;
                    let v = self.sequence()?;
                    self.expect(b']')?;
                    let ui = self.inverse(&u)?;
                    let vi = self.inverse(&v)?;
                    ui.concat(&vi).concat(&u).concat(&v)
                }
                b'1' => {
                    self.pos += 1;
                    Word::empty()
                }
                c if c.is_ascii_alphabetic() => {
                    if self.group.letter(c).is_none() {
                        return Err(self.err(&format!("'{}' is not a generator", c as char)));
                    }
                    self.pos += 1;
                    Word(vec![c])
                }
                _ => break,
            };
            let atom = self.power(atom)?;
            out = out.concat(&atom);
        }
        Ok(out)
    }

    fn power(&mut self, atom: Word) -> Result<Word> {
        self.skip_ws();
        if self.src.get(self.pos) != Some(&b'^') {
            return Ok(atom);
        }
        self.pos += 1;
        let negative = self.src.get(self.pos) == Some(&b'-');
        if negative {
            self.pos += 1;
        }
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let n: usize = self.text[start..self.pos]
            .parse()
            .map_err(|_| self.err("expected exponent"))?;
        if n > 4096 {
            return Err(self.err("exponent too large"));
        }
        let base = if negative { self.inverse(&atom)? } else { atom };
        let mut out = Word::empty();
        for _ in 0..n {
            out = out.concat(&base);
        }
        Ok(out)
    }

    fn inverse(&self, w: &Word) -> Result<Word> {
        self.group
            .inverse_word(w)
            .map_err(|_| self.err("inverse letter unavailable"))
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }
}
