//! Exact counts of small differences `|U_n - V_m| <= x`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::algebraic::parse_rational;
use crate::error::{Error, Result};
use crate::numeric::consts;
use crate::numeric::dyadic::{widen_down, widen_up};
use crate::numeric::{precision_cap, precision_schedule, RealInterval};
use crate::quadratic::ln_int;
use crate::recurrence::LinearRecurrence;
use crate::spectral::{analyze, rational_relation, GrowthEnvelope, SequenceAnalysis};

/// Number of times the cutoffs may double before giving up.
pub const MAX_DOUBLINGS: usize = 6;

pub(crate) fn ser_big<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_big_opt<S: Serializer>(v: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Fast,
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountResult {
    #[serde(serialize_with = "ser_big")]
    pub x: BigInt,
    #[serde(rename = "T")]
    pub t: u64,
    #[serde(rename = "S")]
    pub s: u64,
    pub n_cut: usize,
    pub m_cut: usize,
    /// Smallest `|U_n - V_m|` over enumerated pairs outside the cutoff box.
    #[serde(serialize_with = "ser_big_opt")]
    pub gap_margin: Option<BigInt>,
    pub method: Method,
}

/// A pair `(n, m)` with its difference `c = U_n - V_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hit {
    pub n: usize,
    pub m: usize,
    pub c: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollisionRecord {
    #[serde(serialize_with = "ser_big")]
    pub c: BigInt,
    pub representations: Vec<(usize, usize)>,
    pub max_n: usize,
    pub max_m: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollisionReport {
    pub records: Vec<CollisionRecord>,
    /// Largest `min n` over the records.
    pub n_emp: usize,
    /// Largest `min m` over the records.
    pub m_emp: usize,
}

impl CollisionReport {
    /// `Σ (|record| - 1)`, which equals `T - S`.
    pub fn surplus(&self) -> u64 {
        self.records.iter().map(|r| r.representations.len() as u64 - 1).sum()
    }
}

fn check_x(x: &BigInt) -> Result<()> {
    if x.is_negative() {
        return Err(Error::Precondition(format!("x must be non-negative, got {x}")));
    }
    Ok(())
}

pub(crate) fn summarize(x: &BigInt, hits: &[Hit]) -> (u64, u64) {
    let distinct: BTreeSet<&BigInt> = hits.iter().map(|h| &h.c).collect();
    debug_assert!(hits.iter().all(|h| h.c.abs() <= *x));
    (hits.len() as u64, distinct.len() as u64)
}

/// Plain double loop over `n <= n_cap`, `m <= m_cap`.
pub fn brute_force_oracle(u: &LinearRecurrence, v: &LinearRecurrence, x: &BigInt, n_cap: usize, m_cap: usize) -> Result<CountResult> {
    let hits = oracle_hits(u, v, x, n_cap, m_cap)?;
    let (t, s) = summarize(x, &hits);
    Ok(CountResult { x: x.clone(), t, s, n_cut: n_cap, m_cut: m_cap, gap_margin: None, method: Method::Oracle })
}

/// Pairs found by the double loop, in `(n, m)` order.
pub fn oracle_hits(u: &LinearRecurrence, v: &LinearRecurrence, x: &BigInt, n_cap: usize, m_cap: usize) -> Result<Vec<Hit>> {
    check_x(x)?;
    let us = u.values(n_cap);
    let vs = v.values(m_cap);
    let mut hits = vec![];
    for (n, a) in us.iter().enumerate().take(n_cap + 1) {
        for (m, b) in vs.iter().enumerate().take(m_cap + 1) {
            let c = a - b;
            if c.abs() <= *x {
                hits.push(Hit { n, m, c });
            }
        }
    }
    Ok(hits)
}

/// Growth data for cutoff computations.
struct Growth<'a> {
    seq: &'a LinearRecurrence,
    env: &'a GrowthEnvelope,
}

impl Growth<'_> {
    /// Smallest `N >= n0` with `lower·|α|^n > bound` for every `n >= N`.
    fn beyond(&self, bound: &BigInt) -> usize {
        let b = bound.abs().max(BigInt::one());
        let ln_b = if b.is_one() { 0.0 } else { ln_int(&b).hi };
        let need = (widen_up(ln_b) - widen_down(self.env.lower.ln())) / self.env.log_modulus.lo;
        let n = if need < 0.0 { 0 } else { widen_up(need).floor() as usize + 1 };
        n.max(self.env.n0)
    }

    fn max_abs(&self, upto: usize) -> BigInt {
        self.seq.values(upto).into_iter().take(upto + 1).map(|v| v.abs()).max().unwrap_or_else(BigInt::zero)
    }
}

/// Sorted `(value, index)` list supporting range queries.
struct SortedValues(Vec<(BigInt, usize)>);

impl SortedValues {
    fn new(values: &[BigInt]) -> Self {
        let mut v: Vec<(BigInt, usize)> = values.iter().cloned().zip(0..).collect();
        v.sort();
        SortedValues(v)
    }

    /// Entries with value in `[lo, hi]`.
    fn range(&self, lo: &BigInt, hi: &BigInt) -> &[(BigInt, usize)] {
        let a = self.0.partition_point(|(v, _)| v < lo);
        let b = self.0.partition_point(|(v, _)| v <= hi);
        &self.0[a..b.max(a)]
    }

    /// Smallest `|value - t|`.
    fn nearest(&self, t: &BigInt) -> Option<BigInt> {
        let i = self.0.partition_point(|(v, _)| v < t);
        let mut best: Option<BigInt> = None;
        for j in [i.checked_sub(1), Some(i)].into_iter().flatten() {
            if let Some((v, _)) = self.0.get(j) {
                let d = (v - t).abs();
                if best.as_ref().is_none_or(|b| d < *b) {
                    best = Some(d);
                }
            }
        }
        best
    }
}

/// Exact pairs together with the cutoffs and safety margin used.
#[derive(Clone, Debug)]
pub struct FastCount {
    pub hits: Vec<Hit>,
    pub n_cut: usize,
    pub m_cut: usize,
    pub gap_margin: BigInt,
}

/// Enumerates all pairs with `|U_n - V_m| <= x` inside a cutoff box and
/// certifies a safety window around it.
///
/// Every pair with `n <= 2·n_cut` or `m <= 2·m_cut` is enumerated; the box
/// `n <= n_cut, m <= m_cut` must contain all hits, otherwise the cutoffs
/// double.
pub fn fast_hits(
    u: &LinearRecurrence,
    au: &SequenceAnalysis,
    v: &LinearRecurrence,
    av: &SequenceAnalysis,
    x: &BigInt,
) -> Result<FastCount> {
    check_x(x)?;
    let gu = Growth { seq: u, env: &au.envelope };
    let gv = Growth { seq: v, env: &av.envelope };
    let n_base = gu.beyond(x);
    let m_base = gv.beyond(x);
    let mut n_cut = n_base.max(gu.beyond(&(gv.max_abs(m_base) + x))).max(1);
    let mut m_cut = m_base.max(gv.beyond(&(gu.max_abs(n_base) + x))).max(1);
    for _ in 0..=MAX_DOUBLINGS {
        let n_win = 2 * n_cut;
        let m_win = 2 * m_cut;
        let nu = n_win.max(gu.beyond(&(gv.max_abs(m_win) + x)));
        let mv = m_win.max(gv.beyond(&(gu.max_abs(n_win) + x)));
        let us = u.values(nu);
        let vs = v.values(mv);
        let sorted_v = SortedValues::new(&vs[..=mv]);
        let sorted_u = SortedValues::new(&us[..=nu]);
        let per_n: Vec<Vec<Hit>> = (0..=nu)
            .into_par_iter()
            .map(|n| {
                let a = &us[n];
                sorted_v.range(&(a - x), &(a + x)).iter().map(|(b, m)| Hit { n, m: *m, c: a - b }).collect()
            })
            .collect();
        let mut hits: Vec<Hit> = per_n.into_iter().flatten().collect();
        hits.sort_by_key(|p| (p.n, p.m));
        let outside = hits.iter().any(|h| h.n > n_cut || h.m > m_cut);
        if outside {
            n_cut *= 2;
            m_cut *= 2;
            continue;
        }
        let gap_n = (n_cut + 1..=nu).filter_map(|n| sorted_v.nearest(&us[n]));
        let gap_m = (m_cut + 1..=mv).filter_map(|m| sorted_u.nearest(&vs[m]));
        let gap_margin = gap_n.chain(gap_m).min().expect("window is nonempty");
        debug_assert!(gap_margin > *x);
        return Ok(FastCount { hits, n_cut, m_cut, gap_margin });
    }
    Err(Error::CutoffUnsafe(format!(
        "solutions keep appearing beyond the cutoff after {MAX_DOUBLINGS} doublings (n_cut = {n_cut}, m_cut = {m_cut})"
    )))
}

/// Exact `T(x)` and `S(x)`.
pub fn count_t_s(u: &LinearRecurrence, v: &LinearRecurrence, x: &BigInt) -> Result<CountResult> {
    let au = analyze(u)?;
    let av = analyze(v)?;
    count_t_s_with(u, &au, v, &av, x)
}

pub fn count_t_s_with(
    u: &LinearRecurrence,
    au: &SequenceAnalysis,
    v: &LinearRecurrence,
    av: &SequenceAnalysis,
    x: &BigInt,
) -> Result<CountResult> {
    let f = fast_hits(u, au, v, av, x)?;
    let (t, s) = summarize(x, &f.hits);
    Ok(CountResult { x: x.clone(), t, s, n_cut: f.n_cut, m_cut: f.m_cut, gap_margin: Some(f.gap_margin), method: Method::Fast })
}

/// Groups hits by their difference and keeps values with two or more
/// representations.
pub fn collisions_of(hits: &[Hit]) -> CollisionReport {
    let mut by_c: BTreeMap<&BigInt, Vec<(usize, usize)>> = BTreeMap::new();
    for h in hits {
        by_c.entry(&h.c).or_default().push((h.n, h.m));
    }
    let records: Vec<CollisionRecord> = by_c
        .into_iter()
        .filter(|(_, reps)| reps.len() >= 2)
        .map(|(c, mut reps)| {
            reps.sort();
            CollisionRecord {
                c: c.clone(),
                max_n: reps.iter().map(|r| r.0).max().unwrap_or(0),
                max_m: reps.iter().map(|r| r.1).max().unwrap_or(0),
                representations: reps,
            }
        })
        .collect();
    let n_emp = records.iter().map(|r| r.representations.iter().map(|p| p.0).min().unwrap_or(0)).max().unwrap_or(0);
    let m_emp = records.iter().map(|r| r.representations.iter().map(|p| p.1).min().unwrap_or(0)).max().unwrap_or(0);
    CollisionReport { records, n_emp, m_emp }
}

/// Values `c` with `|c| <= x` having at least two representations.
pub fn find_collisions(u: &LinearRecurrence, v: &LinearRecurrence, x: &BigInt) -> Result<CollisionReport> {
    let au = analyze(u)?;
    let av = analyze(v)?;
    Ok(collisions_of(&fast_hits(u, &au, v, &av, x)?.hits))
}

/// A real number `> 1` used as a power base.
#[derive(Clone, Debug, PartialEq)]
pub enum RealBase {
    Pi,
    E,
    Rational(BigRational),
}

impl RealBase {
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let base = match t.to_ascii_lowercase().as_str() {
            "pi" | "π" => RealBase::Pi,
            "e" => RealBase::E,
            _ => RealBase::Rational(parse_rational(t).ok_or_else(|| Error::InvalidParameters(format!("cannot parse base {t:?}")))?),
        };
        if let RealBase::Rational(r) = &base {
            if *r <= BigRational::one() {
                return Err(Error::InvalidParameters(format!("base must exceed 1, got {t}")));
            }
        }
        Ok(base)
    }

    pub fn enclosure(&self, prec: u32) -> RealInterval {
        match self {
            RealBase::Pi => consts::pi(prec),
            RealBase::E => consts::e(prec),
            RealBase::Rational(r) => RealInterval::from_rational(r, prec),
        }
    }

    fn ln(&self) -> f64 {
        match self {
            RealBase::Pi => std::f64::consts::PI.ln(),
            RealBase::E => 1.0,
            RealBase::Rational(r) => crate::quadratic::ln_rational(r).mid(),
        }
    }
}

impl std::fmt::Display for RealBase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RealBase::Pi => write!(f, "pi"),
            RealBase::E => write!(f, "e"),
            RealBase::Rational(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealCountResult {
    pub alpha: String,
    pub beta: String,
    pub x: String,
    #[serde(rename = "T")]
    pub t: u64,
    pub pairs: Vec<(u64, u64)>,
    pub n_cut: u64,
    pub m_cut: u64,
    /// Largest precision used to decide a comparison.
    pub precision: u32,
}

/// Decides `|α^n - β^m| <= x`.
struct PowerComparator<'a> {
    alpha: &'a RealBase,
    beta: &'a RealBase,
    x: &'a BigRational,
    start: u32,
    cap: u32,
    used: std::sync::atomic::AtomicU32,
}

impl PowerComparator<'_> {
    fn decide(&self, n: u64, m: u64) -> Result<bool> {
        if let (RealBase::Rational(a), RealBase::Rational(b)) = (self.alpha, self.beta) {
            let d = pow_rat(a, n) - pow_rat(b, m);
            return Ok(d.abs() <= *self.x);
        }
        for prec in precision_schedule(self.start, self.cap.max(self.start)) {
            let a = self.alpha.enclosure(prec).pow(n, prec);
            let b = self.beta.enclosure(prec).pow(m, prec);
            let d = a.sub(&b, prec).abs();
            let x = RealInterval::from_rational(self.x, prec);
            self.used.fetch_max(prec, std::sync::atomic::Ordering::Relaxed);
            if d.hi() <= x.lo() {
                return Ok(true);
            }
            if d.lo() > x.hi() {
                return Ok(false);
            }
        }
        Err(Error::PrecisionExhausted(format!("|{}^{n} - {}^{m}| not separated from x", self.alpha, self.beta)))
    }

    /// Candidate `m` with `β^m` possibly within `x` of `α^n`.
    fn candidates(&self, n: u64, ln_x: f64) -> std::ops::RangeInclusive<u64> {
        let la = self.alpha.ln();
        let lb = self.beta.ln();
        let l = n as f64 * la;
        let (lo, hi) = if l > 600.0 {
            (l / lb - 2.0, l / lb + 2.0)
        } else {
            let p = l.exp();
            let x = ln_x.exp();
            let lo = if p - x > 1e-300 { (p - x).ln() / lb } else { 0.0 };
            (lo - 1.0, (p + x).ln() / lb + 1.0)
        };
        (lo.floor().max(0.0) as u64)..=(hi.ceil().max(0.0) as u64)
    }
}

fn pow_rat(r: &BigRational, e: u64) -> BigRational {
    num_traits::pow::pow(r.clone(), e as usize)
}

/// `#{(n, m) : |α^n - β^m| <= x}` for real bases.
pub fn count_real_power_pairs(alpha: &RealBase, beta: &RealBase, x: &BigRational, start_precision: u32) -> Result<RealCountResult> {
    if x.is_negative() || x.is_zero() {
        return Err(Error::Precondition("x must be positive".into()));
    }
    if alpha == beta {
        return Err(Error::Precondition(format!("equal bases {alpha} and {beta} are multiplicatively dependent")));
    }
    if let (RealBase::Rational(a), RealBase::Rational(b)) = (alpha, beta) {
        if let Some((n, m)) = rational_relation(a, b) {
            return Err(Error::Precondition(format!("{a}^{n} = {b}^{m}: bases are multiplicatively dependent")));
        }
    }
    let cmp = PowerComparator { alpha, beta, x, start: start_precision.max(64), cap: precision_cap(), used: Default::default() };
    let la = alpha.ln();
    let lb = beta.ln();
    let ln_x = crate::quadratic::ln_rational(x).hi;
    // indices past which a single power exceeds x + 1
    let base_n = ((ln_x.max(0.0) + 1.0) / la).ceil() as u64 + 1;
    let base_m = ((ln_x.max(0.0) + 1.0) / lb).ceil() as u64 + 1;
    let mut n_cut = base_n.max((((base_m as f64 * lb).max(ln_x) + 1.0) / la).ceil() as u64);
    let mut m_cut = base_m.max((((base_n as f64 * la).max(ln_x) + 1.0) / lb).ceil() as u64);
    for _ in 0..=MAX_DOUBLINGS {
        let n_win = 2 * n_cut;
        let m_win = 2 * m_cut;
        let nu = n_win.max((((m_win as f64 * lb).max(ln_x) + 2.0) / la).ceil() as u64);
        let per_n: Vec<Result<Vec<(u64, u64)>>> = (0..=nu)
            .into_par_iter()
            .map(|n| {
                let mut out = vec![];
                for m in cmp.candidates(n, ln_x) {
                    if cmp.decide(n, m)? {
                        out.push((n, m));
                    }
                }
                Ok(out)
            })
            .collect();
        let mut pairs = vec![];
        for r in per_n {
            pairs.extend(r?);
        }
        if pairs.iter().any(|&(n, m)| n > n_cut || m > m_cut) {
            n_cut *= 2;
            m_cut *= 2;
            continue;
        }
        let precision = cmp.used.load(std::sync::atomic::Ordering::Relaxed);
        return Ok(RealCountResult {
            alpha: alpha.to_string(),
            beta: beta.to_string(),
            x: x.to_string(),
            t: pairs.len() as u64,
            pairs,
            n_cut,
            m_cut,
            precision,
        });
    }
    Err(Error::CutoffUnsafe(format!("pairs keep appearing beyond the cutoff (n_cut = {n_cut}, m_cut = {m_cut})")))
}
