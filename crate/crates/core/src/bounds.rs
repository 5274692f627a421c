//! Numeric side of the growth bounds: the exponent σ, the measured
//! stabilizer constant T, the recursion audit and envelope diagnostics.
//!
//! Nothing here fits curves. The diagnostics are pure functions of the
//! tables they are given.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::conjugacy::{class_partition, ConjGrowthRow, InvariantMemo, QuotientClasses};
use crate::constructions::{encode_pair, EncodeStatus};
use crate::enumeration::Ball;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::words::Word;

/// `σ = log d / log(dM)`.
pub fn sigma(d: usize, m: usize) -> Result<f64> {
    if d < 2 || m < 1 {
        return Err(Error::Precondition(format!(
            "sigma needs d ≥ 2 and M ≥ 1, got ({d}, {m})"
        )));
    }
    Ok((d as f64).ln() / ((d * m) as f64).ln())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundParams {
    pub d: usize,
    pub m: usize,
    pub k_idx: usize,
    /// Measured on the data supplied, not the existential constant.
    pub t: f64,
    pub q: f64,
    pub sigma: f64,
}

impl BoundParams {
    pub fn new(d: usize, m: usize, k_idx: usize, t: f64) -> Result<Self> {
        Ok(BoundParams {
            d,
            m,
            k_idx,
            t,
            q: t * k_idx as f64,
            sigma: sigma(d, m)?,
        })
    }
}

/// Smallest `T` with `γ(n) ≤ T·|B(n) ∩ St(1)|` on the rows given.
pub fn estimate_t(gamma: &[u64], st1: &[u64]) -> Result<f64> {
    if gamma.is_empty() || gamma.len() != st1.len() {
        return Err(Error::Precondition(
            "estimate_t needs aligned, nonempty rows".into(),
        ));
    }
    let mut t: f64 = 0.0;
    for (&g, &s) in gamma.iter().zip(st1) {
        if s == 0 {
            return Err(Error::Precondition("stabilizer count of zero".into()));
        }
        t = t.max(g as f64 / s as f64);
    }
    Ok(t)
}

#[derive(Clone, Debug, Serialize)]
pub struct RecursionRow {
    pub n: usize,
    pub f_n: usize,
    pub f_4n: usize,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecursionReport {
    pub t: f64,
    pub rows: Vec<RecursionRow>,
    /// `n` whose row at `n` or `4n` is missing or not exact.
    pub skipped: Vec<usize>,
}

impl RecursionReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Checks `f(4n) ≥ f(n)² / (2T)` wherever both rows are exact.
pub fn grig_recursion_audit(rows: &[ConjGrowthRow], t: f64) -> RecursionReport {
    let by_n: HashMap<usize, &ConjGrowthRow> = rows.iter().map(|r| (r.n, r)).collect();
    let mut report = RecursionReport {
        t,
        rows: Vec::new(),
        skipped: Vec::new(),
    };
    for r in rows {
        let Some(q) = by_n.get(&(4 * r.n)) else {
            continue;
        };
        if !(r.exact && q.exact) {
            report.skipped.push(r.n);
            continue;
        }
        let rhs = (r.lower * r.lower) as f64 / (2.0 * t);
        report.rows.push(RecursionRow {
            n: r.n,
            f_n: r.lower,
            f_4n: q.lower,
            rhs,
            holds: q.lower as f64 >= rhs,
        });
    }
    report
}

#[derive(Clone, Debug, Serialize)]
pub struct Assembly {
    pub left: Word,
    pub right: Word,
    pub word: Word,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssemblyReport {
    pub n: usize,
    pub classes: usize,
    pub assemblies: Vec<Assembly>,
    /// Pairs of class representatives with no preimage within the length bound.
    pub skipped: Vec<(Word, Word)>,
    /// Assemblies from different unordered pairs that share an invariant.
    pub collisions: Vec<(Word, Word)>,
    /// Swapped assemblies `(x, y)`, `(y, x)` that conjugation by the rooted
    /// generator failed to identify.
    pub swap_failures: Vec<Word>,
}

impl AssemblyReport {
    pub fn passed(&self) -> bool {
        self.collisions.is_empty() && self.swap_failures.is_empty()
    }
}

/// Builds elements of St(1) with sections ranging over pairs of conjugacy
/// class representatives of `B(n)` and checks that different unordered pairs
/// stay separated by the conjugacy invariant one level deeper.
pub fn assembly_audit(
    group: &Group,
    ball: &Ball,
    depth: usize,
    radius: usize,
    quotient: &QuotientClasses,
) -> Result<AssemblyReport> {
    if !group.preset().is_grigorchuk() {
        return Err(Error::Precondition(
            "assembly audit needs the Grigorchuk preset".into(),
        ));
    }
    let part = class_partition(group, ball, depth, radius, Some(quotient))?;
    if !part.is_exact() {
        return Err(Error::Precondition(format!(
            "class bracket for B({}) is not exact at depth {depth}, radius {radius}",
            ball.radius()
        )));
    }
    let reps = part.representatives();
    let memo = InvariantMemo::new();
    let rooted = group.generator(b'a').expect("rooted generator").clone();
    let mut report = AssemblyReport {
        n: ball.radius(),
        classes: reps.len(),
        assemblies: Vec::new(),
        skipped: Vec::new(),
        collisions: Vec::new(),
        swap_failures: Vec::new(),
    };
    let mut seen: HashMap<Vec<u8>, (usize, usize)> = HashMap::new();
    let mut ordered = BTreeSet::new();
    for (i, &x) in reps.iter().enumerate() {
        for (j, &y) in reps.iter().enumerate() {
            let (w0, w1) = (ball.word(x), ball.word(y));
            let enc = encode_pair(group, w0, w1, None)?;
            let word = match (enc.status, enc.word) {
                (EncodeStatus::Achieved, Some(w)) => w,
                _ => {
                    report.skipped.push((w0.clone(), w1.clone()));
                    continue;
                }
            };
            let g = group.eval(&word)?;
            let inv = crate::conjugacy::refined_invariant(group, &g, depth + 1, quotient, &memo)?;
            let key = (i.min(j), i.max(j));
            match seen.get(&inv.bytes[..]) {
                Some(&k) if k != key => report.collisions.push((w0.clone(), w1.clone())),
                _ => {
                    seen.insert(inv.bytes.to_vec(), key);
                }
            }
            let swapped = group.conjugate(&g, &rooted)?;
            let s = group.sections(&swapped);
            let expected = (group.eval(w1)?, group.eval(w0)?);
            if s.len() != 2 || s[0] != expected.0 || s[1] != expected.1 {
                report.swap_failures.push(word.clone());
            }
            if ordered.insert(key) {
                report.assemblies.push(Assembly {
                    left: w0.clone(),
                    right: w1.clone(),
                    word,
                });
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnvelopeInput {
    pub n: usize,
    pub gamma: f64,
    pub f_lower: f64,
    pub f_upper: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnvelopeRow {
    pub n: usize,
    pub gamma: f64,
    pub f_lower: f64,
    pub f_upper: f64,
    /// `log log f / log n`.
    pub rho: f64,
    /// `log f / n^0.5`.
    pub env05: f64,
    /// `log f / n^0.767`.
    pub env767: f64,
}

/// Per-row exponent diagnostics of the lower count; rows with `n < 2` or
/// count `< 3` are dropped since `log log` is undefined or unstable there.
pub fn envelope_compare(table: &[EnvelopeInput]) -> Vec<EnvelopeRow> {
    table
        .iter()
        .filter(|r| r.n >= 2 && r.f_lower >= 3.0)
        .map(|r| {
            let n = r.n as f64;
            let lf = r.f_lower.ln();
            EnvelopeRow {
                n: r.n,
                gamma: r.gamma,
                f_lower: r.f_lower,
                f_upper: r.f_upper,
                rho: lf.ln() / n.ln(),
                env05: lf / n.powf(0.5),
                env767: lf / n.powf(0.767),
            }
        })
        .collect()
}

pub fn envelope_csv(rows: &[EnvelopeRow]) -> String {
    let mut s = String::from("n,gamma,f_lower,f_upper,rho,env05,env767\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{:.6},{:.6},{:.6}",
            r.n, r.gamma, r.f_lower, r.f_upper, r.rho, r.env05, r.env767
        )
        .unwrap();
    }
    s
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuotientRow {
    pub n: usize,
    pub gamma_over_f_upper: f64,
    pub gamma_over_f_lower: f64,
}

/// `γ(n)/f_upper(n)` and `γ(n)/f_lower(n)` on the rows present in both tables.
pub fn quotient_table(gamma: &[(usize, u64)], f: &[ConjGrowthRow]) -> Vec<QuotientRow> {
    let by_n: HashMap<usize, &ConjGrowthRow> = f.iter().map(|r| (r.n, r)).collect();
    gamma
        .iter()
        .filter_map(|&(n, g)| {
            by_n.get(&n).map(|r| QuotientRow {
                n,
                gamma_over_f_upper: g as f64 / r.upper as f64,
                gamma_over_f_lower: g as f64 / r.lower as f64,
            })
        })
        .collect()
}

pub fn quotient_csv(rows: &[QuotientRow]) -> String {
    let mut s = String::from("n,gamma_over_f_upper,gamma_over_f_lower\n");
    for r in rows {
        writeln!(
            s,
            "{},{:.6},{:.6}",
            r.n, r.gamma_over_f_upper, r.gamma_over_f_lower
        )
        .unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_values() {
        assert!((sigma(2, 24).unwrap() - 0.179).abs() < 1e-3);
        assert!((sigma(2, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((sigma(2, 2).unwrap() - 0.5).abs() < 1e-12);
        assert!(sigma(1, 3).is_err());
        assert!(sigma(2, 0).is_err());
    }

    #[test]
    fn t_estimates() {
        assert_eq!(estimate_t(&[1], &[1]).unwrap(), 1.0);
        assert_eq!(estimate_t(&[1, 5], &[1, 4]).unwrap(), 1.25);
        assert!(estimate_t(&[], &[]).is_err());
    }

    fn row(n: usize, f: usize, exact: bool) -> ConjGrowthRow {
        ConjGrowthRow {
            n,
            lower: f,
            upper: if exact { f } else { f + 1 },
            exact,
        }
    }

    #[test]
    fn recursion_bookkeeping() {
        let rows = vec![
            row(0, 1, true),
            row(1, 5, true),
            row(2, 8, true),
            row(4, 8, true),
            row(8, 30, false),
        ];
        let r = grig_recursion_audit(&rows, 2.0);
        assert_eq!(r.rows.len(), 2);
        assert!(r.rows[0].holds && r.rows[0].n == 0);
        assert!(r.rows[1].holds && r.rows[1].f_4n == 8);
        assert_eq!(r.skipped, vec![2]);
    }

    #[test]
    fn envelopes() {
        let constant: Vec<EnvelopeInput> = (0..10)
            .map(|n| EnvelopeInput {
                n,
                gamma: 5.0,
                f_lower: 5.0,
                f_upper: 5.0,
            })
            .collect();
        let rows = envelope_compare(&constant);
        assert_eq!(rows.len(), 8);
        assert!(rows.windows(2).all(|w| w[1].rho < w[0].rho));
        let exp: Vec<EnvelopeInput> = (2..12)
            .map(|n| {
                let f = (n as f64).exp();
                EnvelopeInput {
                    n,
                    gamma: f,
                    f_lower: f,
                    f_upper: f,
                }
            })
            .collect();
        assert!(envelope_compare(&exp)
            .iter()
            .all(|r| (r.rho - 1.0).abs() < 1e-9));
    }

    #[test]
    fn quotients() {
        let q = quotient_table(&[(0, 1), (1, 5)], &[row(0, 1, true), row(1, 5, true)]);
        assert_eq!(q[0].gamma_over_f_lower, 1.0);
        assert_eq!(q[1].gamma_over_f_upper, 1.0);
    }

    #[test]
    fn assembly_small() {
        let g = Group::grigorchuk();
        let q = crate::conjugacy::default_quotient(&g).unwrap();
        let b = crate::enumeration::ball(&g, 1).unwrap();
        let r = assembly_audit(&g, &b, 4, 4, &q).unwrap();
        assert_eq!(r.classes, 5);
        assert!(r.passed(), "{r:?}");
        assert!(r
            .assemblies
            .iter()
            .any(|a| a.left.is_empty() && a.right.is_empty() && a.word.is_empty()));
        assert!(r.assemblies.len() <= 15);
        // (1, a) is not a pair of sections of any element
        assert!(r
            .skipped
            .iter()
            .any(|(x, y)| x.is_empty() && y.as_bytes() == b"a"));
        eprintln!(
            "{} assembled, {} skipped",
            r.assemblies.len(),
            r.skipped.len()
        );
    }
}
