//! Lower bounds for linear forms in logarithms, the quantity
//! `Λ = a(n)α^n / (b(m)β^m) - 1`, and explicit upper bounds for the indices
//! of solutions of `U_n - V_m = c`.

use std::f64::consts::{LN_2, PI};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heights::eval_exact_poly;
use crate::numeric::dyadic::{widen_down, widen_up};
use crate::numeric::{precision_cap, precision_schedule, ComplexInterval, F64Interval, START_PRECISION};
use crate::quadratic::{ln_int, QuadElem};
use crate::recurrence::LinearRecurrence;
use crate::spectral::{coprime_basis, multiplicative_independence, valuation, DominantRootCertificate, Independence, SequenceAnalysis};

/// Parameters of a linear form `γ_1^{b_1} ⋯ γ_t^{b_t} - 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatveevInput {
    pub t: usize,
    /// Degree of a number field containing every `γ_i`.
    pub d: u32,
    /// `B >= max |b_i|`.
    pub b: f64,
    /// `A_i >= max(D·h(γ_i), |log γ_i|, 0.16)`.
    pub a: Vec<f64>,
}

impl MatveevInput {
    pub fn new(t: usize, d: u32, b: f64, a: Vec<f64>) -> Result<Self> {
        let input = MatveevInput { t, d, b, a };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::InvalidParameters("t must be at least 1".into()));
        }
        if self.d == 0 {
            return Err(Error::InvalidParameters("D must be at least 1".into()));
        }
        if !(self.b >= 1.0) || !self.b.is_finite() {
            return Err(Error::InvalidParameters(format!("B must be a finite real >= 1, got {}", self.b)));
        }
        if self.a.len() != self.t {
            return Err(Error::InvalidParameters(format!("expected {} values of A, got {}", self.t, self.a.len())));
        }
        if let Some(a) = self.a.iter().find(|a| !(**a >= 0.16) || !a.is_finite()) {
            return Err(Error::InvalidParameters(format!("every A_i must be a finite real >= 0.16, got {a}")));
        }
        Ok(())
    }
}

/// `-3·30^{t+4}·(t+1)^{5.5}·D²·(1 + log D)·(1 + log tB)·A_1⋯A_t`.
pub fn matveev_lower_bound(input: &MatveevInput) -> Result<f64> {
    input.validate()?;
    let t = input.t as f64;
    let d = input.d as f64;
    let mut v = 3.0 * 30f64.powi(input.t as i32 + 4) * (t + 1.0).powf(5.5);
    v *= d * d * (1.0 + d.ln());
    v *= 1.0 + (t * input.b).ln();
    for a in &input.a {
        v *= a;
    }
    Ok(-v)
}

/// `3·30^7·4^{5.5}·D²·(1 + log D)`, the three-term constant.
pub fn three_term_constant(d: u32) -> f64 {
    let d = d as f64;
    3.0 * 30f64.powi(7) * 4f64.powf(5.5) * d * d * (1.0 + d.ln())
}

/// One evaluation of `|Λ|` at `(n, m)`.
#[derive(Clone, Debug, Serialize)]
pub struct LinearFormSample {
    pub n: u64,
    pub m: u64,
    /// Outward-rounded enclosure of `|Λ|`.
    pub lambda_abs: F64Interval,
    /// `Λ = 0` established by exact arithmetic.
    pub exact_zero: bool,
    /// The enclosure still contains zero at the precision cap.
    pub undecided: bool,
    /// Filled in by [`LinearFormContext::sample`].
    pub matveev_floor: Option<f64>,
}

impl LinearFormSample {
    /// Lower bound on `log |Λ|` when `Λ` is certified nonzero.
    pub fn log_lower(&self) -> Option<f64> {
        (!self.exact_zero && !self.undecided && self.lambda_abs.lo > 0.0).then(|| widen_down(self.lambda_abs.lo.ln()))
    }
}

/// Field degree and the root-dependent Matveev parameters of a pair of
/// dominant roots.
#[derive(Clone, Debug)]
pub struct LinearFormContext<'a> {
    u: &'a DominantRootCertificate,
    v: &'a DominantRootCertificate,
    pub field_degree: u32,
    pub a2: f64,
    pub a3: f64,
}

impl<'a> LinearFormContext<'a> {
    pub fn new(u: &'a DominantRootCertificate, v: &'a DominantRootCertificate) -> Result<Self> {
        let field_degree = field_degree(u, v);
        let a2 = root_parameter(u, field_degree)?;
        let a3 = root_parameter(v, field_degree)?;
        Ok(LinearFormContext { u, v, field_degree, a2, a3 })
    }

    /// `|Λ|` at `(n, m)`.
    pub fn lambda(&self, n: u64, m: u64) -> Result<LinearFormSample> {
        if let Some(s) = self.exact_lambda(n, m)? {
            return Ok(s);
        }
        self.interval_lambda(n, m)
    }

    /// `max(D·h(γ_1), |log γ_1|, 0.16)` for `γ_1 = a(n)/b(m)`, when both
    /// coefficients are exact.
    pub fn a1(&self, n: u64, m: u64) -> Option<f64> {
        let g = self.gamma1(n, m)?;
        if g.is_zero() {
            return None;
        }
        Some(a_parameter(&g, self.field_degree))
    }

    /// Matveev floor for `Λ` at `(n, m)` with `b = (1, n, -m)`.
    pub fn floor(&self, n: u64, m: u64, a1: f64) -> Result<f64> {
        let input = MatveevInput::new(3, self.field_degree, n.max(m).max(1) as f64, vec![a1.max(0.16), self.a2, self.a3])?;
        matveev_lower_bound(&input)
    }

    /// `|Λ|` together with its Matveev floor.
    pub fn sample(&self, n: u64, m: u64, a1: f64) -> Result<LinearFormSample> {
        let mut s = self.lambda(n, m)?;
        s.matveev_floor = Some(self.floor(n, m, a1)?);
        Ok(s)
    }

    fn gamma1(&self, n: u64, m: u64) -> Option<QuadElem> {
        let a = eval_exact_poly(self.u.exact_coefficients.as_ref()?, n)?;
        let b = eval_exact_poly(self.v.exact_coefficients.as_ref()?, m)?;
        a.div(&b)
    }

    fn exact_lambda(&self, n: u64, m: u64) -> Result<Option<LinearFormSample>> {
        let (Some(alpha), Some(beta)) = (&self.u.exact_root, &self.v.exact_root) else {
            return Ok(None);
        };
        let (Some(pa), Some(pb)) = (&self.u.exact_coefficients, &self.v.exact_coefficients) else {
            return Ok(None);
        };
        let (Some(an), Some(bm)) = (eval_exact_poly(pa, n), eval_exact_poly(pb, m)) else {
            return Ok(None);
        };
        if bm.is_zero() {
            return Err(Error::Precondition(format!("b({m}) vanishes")));
        }
        let Some(num) = an.mul(&alpha.pow(n)) else { return Ok(None) };
        let Some(den) = bm.mul(&beta.pow(m)) else { return Ok(None) };
        let Some(lam) = num.div(&den).and_then(|q| q.sub(&QuadElem::one())) else {
            return Ok(None);
        };
        if lam.is_zero() {
            return Ok(Some(sample(n, m, F64Interval::point(0.0), true, false)));
        }
        for prec in precision_schedule(START_PRECISION, precision_cap()) {
            let abs = lam.to_interval(prec).abs(prec);
            if abs.lo_f64() > 0.0 {
                return Ok(Some(sample(n, m, F64Interval::new(abs.lo_f64(), abs.hi_f64()), false, false)));
            }
        }
        Err(Error::PrecisionExhausted(format!("cannot separate nonzero Λ from 0 at ({n}, {m})")))
    }

    fn interval_lambda(&self, n: u64, m: u64) -> Result<LinearFormSample> {
        let start = self.u.precision().max(self.v.precision()).max(START_PRECISION);
        let mut last = None;
        for prec in precision_schedule(start, precision_cap().max(start)) {
            let num = leading_term(self.u, n, prec);
            let den = leading_term(self.v, m, prec);
            let Some(q) = num.div(&den, prec) else { continue };
            let abs = q.sub(&ComplexInterval::one(), prec).abs(prec);
            let enclosure = F64Interval::new(abs.lo_f64().max(0.0), abs.hi_f64());
            if abs.lo_f64() > 0.0 {
                return Ok(sample(n, m, enclosure, false, false));
            }
            last = Some(enclosure);
        }
        match last {
            Some(enclosure) => Ok(sample(n, m, enclosure, false, true)),
            None => Err(Error::PrecisionExhausted(format!("b({m})β^{m} encloses 0"))),
        }
    }
}

fn sample(n: u64, m: u64, lambda_abs: F64Interval, exact_zero: bool, undecided: bool) -> LinearFormSample {
    LinearFormSample { n, m, lambda_abs, exact_zero, undecided, matveev_floor: None }
}

fn leading_term(c: &DominantRootCertificate, n: u64, prec: u32) -> ComplexInterval {
    let coeff = c.decomposition.coefficient_at(c.index, n as usize, prec);
    coeff.mul(&c.root.pow(n, prec), prec)
}

/// `|Λ|` at `(n, m)` for the dominant parts of two sequences.
pub fn lambda_value(u: &DominantRootCertificate, v: &DominantRootCertificate, n: u64, m: u64) -> Result<LinearFormSample> {
    LinearFormContext::new(u, v)?.lambda(n, m)
}

/// Degree of a field containing both roots and their coefficients: exact
/// when both are at most quadratic, otherwise the product of degrees.
pub fn field_degree(u: &DominantRootCertificate, v: &DominantRootCertificate) -> u32 {
    match (&u.exact_root, &v.exact_root) {
        (Some(a), Some(b)) => {
            if a.is_rational() && b.is_rational() {
                1
            } else if a.common_radicand(b).is_some() {
                2
            } else {
                4
            }
        }
        _ => {
            let da = u.min_poly.len().saturating_sub(1).max(1) as u32;
            let db = v.min_poly.len().saturating_sub(1).max(1) as u32;
            da * db
        }
    }
}

/// `max(D·h(α), |log α|, 0.16)` from the certificate.
fn root_parameter(c: &DominantRootCertificate, d: u32) -> Result<f64> {
    let h = c.algebraic().log_height()?.hi;
    let ln_abs = c.log_modulus.hi.abs().max(c.log_modulus.lo.abs());
    let log = if c.root.re.is_negative() { widen_up((ln_abs * ln_abs + PI * PI).sqrt()) } else { ln_abs };
    Ok((d as f64 * h).max(log).max(0.16))
}

/// `max(D·h(γ), |log γ|, 0.16)` for a nonzero exact element.
fn a_parameter(g: &QuadElem, d: u32) -> f64 {
    let h = g.height().hi;
    let (ln_abs, negative) = log_parts(g);
    let log = if negative { widen_up((ln_abs * ln_abs + PI * PI).sqrt()) } else { ln_abs };
    (d as f64 * widen_up(h)).max(log).max(0.16)
}

/// Upper bound on `|log |γ||` and whether `γ` is a negative real or non-real.
fn log_parts(g: &QuadElem) -> (f64, bool) {
    let l = g.ln_abs();
    let ln_abs = l.hi.abs().max(l.lo.abs());
    let b = g.to_interval(START_PRECISION);
    let negative = !b.is_real() || !b.re.is_positive();
    (ln_abs, negative)
}

/// Exact description of the pairs with `a(n)α^n = b(m)β^m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZeroSet {
    Never,
    Finite { pairs: Vec<(u64, u64)> },
    Unknown { reason: String },
}

const ZERO_SET_INDEX_CAP: i64 = 20_000;

/// Solves `α^n = (b/a)·β^m` over the non-negative integers when both
/// coefficients are constants and everything lies in one quadratic field.
pub fn vanishing_pairs(u: &DominantRootCertificate, v: &DominantRootCertificate) -> ZeroSet {
    let unknown = |r: &str| ZeroSet::Unknown { reason: r.to_string() };
    let (Some(alpha), Some(beta)) = (&u.exact_root, &v.exact_root) else {
        return unknown("roots of degree above 2");
    };
    let (Some(pa), Some(pb)) = (&u.exact_coefficients, &v.exact_coefficients) else {
        return unknown("Binet coefficients not exact");
    };
    if pa.len() != 1 || pb.len() != 1 {
        return unknown("polynomial Binet coefficients");
    }
    let Some(q) = pb[0].div(&pa[0]) else {
        return unknown("coefficients in different fields");
    };
    if alpha.common_radicand(beta).is_none() || alpha.common_radicand(&q).is_none() || beta.common_radicand(&q).is_none() {
        return unknown("numbers in different quadratic fields");
    }
    let norms = [alpha.norm(), beta.norm(), q.norm()];
    let mut ints = vec![];
    for r in &norms {
        ints.push(r.numer().abs());
        ints.push(r.denom().clone());
    }
    let basis = coprime_basis(&ints);
    let mut vecs = vec![];
    for r in &norms {
        let Some(vn) = exponents(&r.numer().abs(), &basis) else { return unknown("norms do not factor over the basis") };
        let Some(vd) = exponents(r.denom(), &basis) else { return unknown("norms do not factor over the basis") };
        vecs.push(vn.iter().zip(&vd).map(|(a, b)| a - b).collect::<Vec<i64>>());
    }
    // n·va_i - m·vb_i = vq_i
    let rows: Vec<(i64, i64, i64)> = (0..basis.len()).map(|i| (vecs[0][i], vecs[1][i], vecs[2][i])).collect();
    if rows.iter().any(|&(a, b, c)| a == 0 && b == 0 && c != 0) {
        return ZeroSet::Never;
    }
    let check = |n: i64, m: i64| -> Option<bool> {
        if n < 0 || m < 0 {
            return Some(false);
        }
        if n > ZERO_SET_INDEX_CAP || m > ZERO_SET_INDEX_CAP {
            return None;
        }
        if !rows.iter().all(|&(a, b, c)| n * a - m * b == c) {
            return Some(false);
        }
        let rhs = q.mul(&beta.pow(m as u64))?;
        Some(alpha.pow(n as u64).sub(&rhs)?.is_zero())
    };
    let finish = |cands: Vec<(i64, i64)>| -> ZeroSet {
        let mut pairs = vec![];
        for (n, m) in cands {
            match check(n, m) {
                Some(true) => pairs.push((n as u64, m as u64)),
                Some(false) => {}
                None => return unknown("candidate indices too large to verify"),
            }
        }
        if pairs.is_empty() {
            ZeroSet::Never
        } else {
            ZeroSet::Finite { pairs }
        }
    };
    for (i, &(ai, bi, ci)) in rows.iter().enumerate() {
        for &(aj, bj, cj) in &rows[i + 1..] {
            let det = -ai * bj + bi * aj;
            if det == 0 {
                continue;
            }
            let n_num = -ci * bj + bi * cj;
            let m_num = ai * cj - ci * aj;
            if n_num % det != 0 || m_num % det != 0 {
                return ZeroSet::Never;
            }
            return finish(vec![(n_num / det, m_num / det)]);
        }
    }
    let Some(&(ai, bi, ci)) = rows.iter().find(|&&(a, b, _)| a != 0 || b != 0) else {
        return unknown("all norms are units");
    };
    // Combine with n·log|α| - m·log|β| = log|q|.
    let la = u.log_modulus;
    let lb = v.log_modulus;
    let lq = if q.is_one() { F64Interval::point(0.0) } else { q.ln_abs() };
    let det = -(ai as f64) * lb.mid() + (bi as f64) * la.mid();
    if det.abs() < 1e-6 {
        return unknown("norm relation parallel to the modulus relation");
    }
    let n0 = ((ci as f64) * -lb.mid() + (bi as f64) * lq.mid()) / det;
    let m0 = ((ai as f64) * lq.mid() - (ci as f64) * la.mid()) / det;
    let w = la.width().max(lb.width()).max(lq.width()) + 1e-12;
    let spread = w * (n0.abs() + m0.abs() + 1.0) / det.abs() * (1.0 + (ai.abs() + bi.abs()) as f64) + 1e-9;
    if spread > 0.25 || n0.abs() > 1e7 || m0.abs() > 1e7 {
        return unknown("candidate indices not isolated");
    }
    let range = |c: f64| ((c - spread).ceil() as i64)..=((c + spread).floor() as i64);
    let cands = range(n0).flat_map(|n| range(m0).map(move |m| (n, m))).collect();
    finish(cands)
}

fn exponents(x: &BigInt, basis: &[BigInt]) -> Option<Vec<i64>> {
    let mut rest = x.clone();
    let mut out = vec![];
    for p in basis {
        let k = valuation(&rest, p);
        rest /= p.pow(k as u32);
        out.push(k as i64);
    }
    rest.is_one().then_some(out)
}

/// `P + Q·log|c| + R·(log log|c|)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundRecord {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl BoundRecord {
    pub fn new(p: f64, q: f64, r: f64) -> Self {
        BoundRecord { p, q, r }
    }

    pub fn constant(p: f64) -> Self {
        BoundRecord { p, q: 0.0, r: 0.0 }
    }

    /// Value at `L = log|c|`.
    pub fn at_log(&self, l: f64) -> f64 {
        let ll = l.ln();
        self.p + self.q * l + self.r * ll * ll
    }

    fn max(&self, o: &Self) -> Self {
        BoundRecord { p: self.p.max(o.p), q: self.q.max(o.q), r: self.r.max(o.r) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LedgerEntry {
    pub name: String,
    pub formula: String,
    pub value: f64,
    pub step: String,
}

/// Bounds covering one region of `(n, m)`.
#[derive(Clone, Debug, Serialize)]
pub struct BranchBound {
    pub branch: String,
    pub n: BoundRecord,
    pub m: BoundRecord,
}

#[derive(Clone, Debug, Serialize)]
pub struct EffectiveBounds {
    pub n_max: BoundRecord,
    pub m_max: BoundRecord,
    /// The records are evaluated at `log max(|c|, c0)`.
    pub c0: f64,
    pub field_degree: u32,
    pub ledger: Vec<LedgerEntry>,
    pub branches: Vec<BranchBound>,
    pub zero_set: ZeroSet,
    /// False when some input was estimated rather than certified.
    pub rigorous: bool,
    pub notes: Vec<String>,
}

impl EffectiveBounds {
    fn log_c(&self, c_abs: f64) -> f64 {
        c_abs.max(self.c0).ln()
    }

    /// Upper bound on `n` over all solutions of `U_n - V_m = ±c_abs`.
    pub fn n_bound(&self, c_abs: f64) -> f64 {
        self.n_max.at_log(self.log_c(c_abs))
    }

    pub fn m_bound(&self, c_abs: f64) -> f64 {
        self.m_max.at_log(self.log_c(c_abs))
    }

    pub fn constant(&self, name: &str) -> Option<&LedgerEntry> {
        self.ledger.iter().find(|e| e.name == name)
    }
}

#[derive(Default)]
struct Ledger(Vec<LedgerEntry>);

impl Ledger {
    fn put(&mut self, name: &str, formula: &str, value: f64, step: &str) -> f64 {
        self.0.push(LedgerEntry { name: name.into(), formula: formula.into(), value, step: step.into() });
        value
    }
}

fn ln_up(x: f64) -> f64 {
    widen_up(x.ln())
}

fn ln_dn(x: f64) -> f64 {
    widen_down(x.ln())
}

fn up(x: f64) -> f64 {
    widen_up(x)
}

/// Per-sequence data entering the chain, with directed roundings.
struct Side {
    tag: &'static str,
    l_lo: f64,
    l_hi: f64,
    lower: f64,
    upper: f64,
    sigma: f64,
    prime: f64,
    rest: f64,
    floor: f64,
    n0: usize,
    small: usize,
    ln_small_max: f64,
}

impl Side {
    fn new(tag: &'static str, seq: &LinearRecurrence, a: &SequenceAnalysis) -> Result<Self> {
        let env = &a.envelope;
        let small = env.n0.max(env.coefficient_floor_from).max(3);
        let max_small = seq.values(small).into_iter().take(small).map(|v| v.abs()).max().unwrap_or_else(BigInt::zero);
        let ln_small_max = ln_int(&max_small.max(BigInt::from(2))).hi;
        if !(env.log_modulus.lo > 0.0) {
            return Err(Error::RootNotLargerThanOne(format!("log of the dominant modulus of {} is not certified positive", seq.name())));
        }
        if !(env.coefficient_floor > 0.0) {
            return Err(Error::PrecisionExhausted(format!("no positive floor on the dominant coefficient of {}", seq.name())));
        }
        Ok(Side {
            tag,
            l_lo: env.log_modulus.lo,
            l_hi: env.log_modulus.hi,
            lower: env.lower,
            upper: env.upper,
            sigma: env.sigma as f64,
            prime: env.alpha_prime,
            rest: env.a_prime,
            floor: env.coefficient_floor,
            n0: env.n0,
            small,
            ln_small_max,
        })
    }
}

struct Shared {
    c11: f64,
    c13: f64,
    c14: f64,
}

/// Largest real `m >= e` with `m·g - c·(log m)² <= k`, or `e` if none.
fn largest_solution(g: f64, c: f64, k: f64) -> Result<f64> {
    let e = std::f64::consts::E;
    let f = |m: f64| m * g - c * m.ln().powi(2);
    let df = |m: f64| g - 2.0 * c * m.ln() / m;
    let mut hi = 2.0 * e;
    while !(f(hi) > k && df(hi) > 0.0) {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::PrecisionExhausted("index bound overflows f64".into()));
        }
    }
    // f is convex on [e, ∞); locate its minimum first.
    let (mut a, mut b) = (e, hi);
    if df(e) < 0.0 {
        for _ in 0..300 {
            let mid = 0.5 * (a + b);
            if df(mid) < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
    } else {
        b = e;
    }
    let min_at = b;
    if f(min_at) > k {
        return Ok(e);
    }
    let (mut a, mut b) = (min_at, hi);
    for _ in 0..300 {
        let mid = 0.5 * (a + b);
        if f(mid) <= k {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(b * (1.0 + 1e-9) + 1.0)
}

/// Smallest `N` such that every `n >= N` satisfies `n >= e^{√(2/c)}` and
/// `k²c²(log n)^4 <= n`.
pub fn mlogm_threshold(k: f64, c: f64) -> Result<f64> {
    if !(k > 0.0 && c > 0.0) {
        return Err(Error::InvalidParameters("k and c must be positive".into()));
    }
    let n1 = up((2.0 / c).sqrt().exp());
    let kc2 = up((k * c).powi(2));
    let ok = |n: f64| kc2 * n.ln().powi(4) <= n * (1.0 - 1e-12);
    // (log n)^4 / n decreases beyond e^4.
    let base = 55.0;
    let n2 = if ok(base) {
        base
    } else {
        let mut hi = 2.0 * base;
        while !ok(hi) {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::PrecisionExhausted("threshold overflows f64".into()));
            }
        }
        let mut lo = base;
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    Ok(n1.max(n2).ceil())
}

/// Branch bounds for solutions with `|α|^n <= |β|^m`, in `(n, m)` of this
/// orientation; the bounds for `|β|^m <= |α|^n` come from swapping roles.
fn orient(u: &Side, v: &Side, sh: &Shared, second: bool, ledger: &mut Ledger) -> Result<Vec<BranchBound>> {
    let nm = |k: u32| if second { format!("C{k}'") } else { format!("C{k}") };
    let (un, vn) = (u.tag, v.tag);
    let ln3 = 3f64.ln();
    let qn = 1.0 / u.l_lo;
    let qm = 1.0 / v.l_lo;
    let mut out = vec![];

    // n below the validity range of the U-side constants.
    let s_m = (v.n0 as f64).max(up((u.ln_small_max - ln_dn(v.lower)).max(0.0) / v.l_lo));
    out.push(BranchBound {
        branch: format!("{un} index below {}", u.small),
        n: BoundRecord::constant(u.small as f64),
        m: BoundRecord::new(s_m, qm, 0.0),
    });

    let c_bound = ledger.put(
        if second { "C5" } else { "C6" },
        &format!("max(0, log 2 + max(log C2_{un}, 0) - log C1_{vn}) / log|root_{vn}|"),
        up((LN_2 + ln_up(u.upper).max(0.0) - ln_dn(v.lower)).max(0.0) / v.l_lo),
        &format!("growth comparison bounding the {vn} index by the {un} index"),
    );
    let c7 = ledger.put(&nm(7), &format!("a'_{un} / b_min_{vn}"), up(u.rest / v.floor), "remainder of U over the coefficient floor");
    let c8 = ledger.put(&nm(8), &format!("a'_{vn} / b_min_{vn}"), up(v.rest / v.floor), "remainder of V over the coefficient floor");
    let c9 = ledger.put(&nm(9), &format!("1 / b_min_{vn}"), up(1.0 / v.floor), "right-hand side over the coefficient floor");

    // Case 1: |c| >= max(α'^n, β'^m).
    let c12 = ledger.put(&nm(12), &format!("{} + {} + {}", nm(7), nm(8), nm(9)), up(c7 + c8 + c9), "linear form bound when |c| dominates");
    let p1 = up(ln_up(c12).max(0.0) + 2.0 * sh.c11 * sh.c13.ln().powi(2));
    out.push(BranchBound {
        branch: "large right-hand side".into(),
        n: BoundRecord::new(up(p1 / u.l_lo), qn, up(sh.c14 / u.l_lo)),
        m: BoundRecord::new(up(p1 / v.l_lo), qm, up(sh.c14 / v.l_lo)),
    });

    // Case 2a: |c| < α'^n and β'^m <= α'^n.
    let c15 = ledger.put(
        &nm(15),
        &format!("max({}, 0) + (log|root_{un}| + sigma_{un}) / log|root_{vn}|", if second { "C5" } else { "C6" }),
        up(c_bound + (u.l_hi + u.sigma) / v.l_lo),
        &format!("{vn} index at most a multiple of the {un} index"),
    );
    let ln_gamma = ledger.put(
        &format!("log gamma{}", if second { "'" } else { "" }),
        &format!("min(log(|root_{un}|/root'_{un}) / {}, log(|root_{vn}|/root'_{vn}))", nm(15)),
        widen_down(((u.l_lo - ln_up(u.prime)) / c15).min(v.l_lo - ln_up(v.prime))),
        "geometric decay rate of the linear form",
    );
    if !(ln_gamma > 0.0) {
        return Err(Error::PrecisionExhausted("decay rate of the linear form not certified positive".into()));
    }
    let c16 = ledger.put(
        &nm(16),
        &format!("{} + {} + {}", nm(7), nm(8), nm(9)),
        up(c7 + c8 + c9),
        "linear form bound when the remainders dominate",
    );
    let c17 = ledger.put(
        &nm(17),
        &format!("(max(log {}, 0) + 2 C11 log^2 max(1, {})) / (log gamma · log^2 3) + 2 C11 / log gamma", nm(16), nm(15)),
        up((ln_up(c16).max(0.0) + 2.0 * sh.c11 * c15.max(1.0).ln().powi(2)) / (ln_gamma * ln3 * ln3) + 2.0 * sh.c11 / ln_gamma),
        &format!("{vn} index at most a multiple of (log n)^2"),
    );
    let e = (LN_2 - ln_dn(u.lower)).max(0.0) + (LN_2 + ln_up(v.upper) - ln_dn(u.lower)).max(0.0);
    let c18 = ledger.put(
        &nm(18),
        &format!(
            "E / log^2 3 + {} (log|root_{vn}| + tau_{vn}), E = max(0, log 2 - log C1_{un}) + max(0, log 2 + log C2_{vn} - log C1_{un})",
            nm(17)
        ),
        up(e / (ln3 * ln3) + c17 * (v.l_hi + v.sigma)),
        &format!("log|c| >= n log|root_{un}| - C18 (log n)^2"),
    );
    let k = qn;
    let c = up(c18 / u.l_lo);
    let n_kc = ledger.put(
        &format!("N(k,c){}", if second { "'" } else { "" }),
        "smallest N with n >= e^{sqrt(2/c)} and k^2 c^2 (log n)^4 <= n for n >= N",
        mlogm_threshold(k, c)?,
        &format!("validity threshold for absorbing (log n)^2, k = 1/log|root_{un}|, c = C18/log|root_{un}|"),
    );
    let r_n = up(4.0 * c);
    let kk = (n_kc + k + r_n).max(1.0);
    out.push(BranchBound {
        branch: "remainder of U dominates".into(),
        n: BoundRecord::new(n_kc, qn, r_n),
        m: BoundRecord::new(up(2.0 * c17 * kk.ln().powi(2)), qm, up(2.0 * c17)),
    });

    // Case 2b: |c| < β'^m and α'^n < β'^m.
    let theta = up(ln_up(u.prime) / u.l_lo);
    if !(theta < 1.0) {
        return Err(Error::PrecisionExhausted("root' not separated from the dominant modulus".into()));
    }
    let ln_gamma2 = ledger.put(
        &format!("log gamma2{}", if second { "'" } else { "" }),
        &format!("min((1 - log root'_{un} / log|root_{un}|) log|root_{vn}|, log(|root_{vn}|/root'_{vn}))"),
        widen_down(((1.0 - theta) * v.l_lo).min(v.l_lo - ln_up(v.prime))),
        "geometric decay rate when the remainder of V dominates",
    );
    if !(ln_gamma2 > 0.0) {
        return Err(Error::PrecisionExhausted("decay rate of the linear form not certified positive".into()));
    }
    let ratio = up(v.l_hi / u.l_lo);
    let kb = up(ln_up(c16).max(0.0) + 2.0 * sh.c11 * ratio.max(1.0).ln().powi(2));
    let m2b = largest_solution(ln_gamma2, 2.0 * sh.c11, kb)?;
    ledger.put(
        &format!("M{}", if second { "'" } else { "" }),
        &format!(
            "largest m with m log gamma2 - 2 C11 log^2 m <= max(log {}, 0) + 2 C11 log^2 max(1, log|root_{vn}|/log|root_{un}|)",
            nm(16)
        ),
        m2b,
        "index bound when the remainder of V dominates",
    );
    out.push(BranchBound {
        branch: "remainder of V dominates".into(),
        n: BoundRecord::constant(up(m2b * ratio)),
        m: BoundRecord::constant(m2b),
    });
    Ok(out)
}

fn swap(b: BranchBound) -> BranchBound {
    BranchBound { branch: b.branch, n: b.m, m: b.n }
}

/// Explicit bounds `n <= n_max(|c|)`, `m <= m_max(|c|)` for every solution
/// of `U_n - V_m = c`.
pub fn effective_upper_bounds(
    seq_u: &LinearRecurrence,
    u: &SequenceAnalysis,
    seq_v: &LinearRecurrence,
    v: &SequenceAnalysis,
) -> Result<EffectiveBounds> {
    let cu = &u.certificate;
    let cv = &v.certificate;
    let mut notes = vec![];
    let mut rigorous = true;
    match multiplicative_independence(&cu.algebraic(), &cv.algebraic())? {
        Independence::Dependent { n, m } => {
            return Err(Error::Precondition(format!("dominant roots satisfy α^{n} = β^{m}")));
        }
        Independence::Unknown { reason } => {
            rigorous = false;
            notes.push(format!("multiplicative independence not certified: {reason}"));
        }
        Independence::Independent { .. } => {}
    }
    let su = Side::new("U", seq_u, u)?;
    let sv = Side::new("V", seq_v, v)?;
    let ctx = LinearFormContext::new(cu, cv)?;
    let d = ctx.field_degree;
    let mut ledger = Ledger::default();
    let ln3 = 3f64.ln();

    ledger.put("D", "degree of a field containing both roots and their coefficients", d as f64, "field degree");
    let c3d = ledger.put("C(3,D)", "3·30^7·4^5.5·D^2·(1 + log D)", up(three_term_constant(d)), "three-term Matveev constant");
    ledger.put("A2", "max(D h(root_U), |log root_U|, 0.16)", ctx.a2, "height parameter of the first root");
    ledger.put("A3", "max(D h(root_V), |log root_V|, 0.16)", ctx.a3, "height parameter of the second root");
    let (c10, c10_formula, c10_rigorous) = coefficient_constant(cu, cv, &ctx);
    if !c10_rigorous {
        rigorous = false;
        notes.push("C10 estimated from samples: Binet coefficients are not exact in degree <= 2".into());
    }
    let c10 = ledger.put(
        "C10",
        &c10_formula,
        c10,
        if c10_rigorous { "height of a(n)/b(m) against log max(n, m)" } else { "height of a(n)/b(m) against log max(n, m), empirical" },
    );
    let c11 = ledger.put(
        "C11",
        "C(3,D) · C10 · A2 · A3 · (1 + (1 + log 3) / log 3)",
        up(c3d * c10 * ctx.a2 * ctx.a3 * (1.0 + (1.0 + ln3) / ln3)),
        "log|Λ| >= -C11 log^2 max(n, m) for max(n, m) >= 3",
    );
    let c13 = ledger.put(
        "C13",
        "max(1 / log root'_U, 1 / log root'_V)",
        up((1.0 / ln_dn(su.prime)).max(1.0 / ln_dn(sv.prime))),
        "max(n, m) <= C13 log|c| when |c| dominates the remainders",
    );
    let c14 = ledger.put("C14", "2 C11", up(2.0 * c11), "coefficient of (log log|c|)^2 when |c| dominates");
    let sh = Shared { c11, c13, c14 };

    let mut branches = orient(&su, &sv, &sh, false, &mut ledger)?;
    branches.extend(orient(&sv, &su, &sh, true, &mut ledger)?.into_iter().map(swap));

    let zero_set = vanishing_pairs(cu, cv);
    match &zero_set {
        ZeroSet::Never => {}
        ZeroSet::Finite { pairs } => {
            let n = pairs.iter().map(|p| p.0).max().unwrap_or(0) as f64;
            let m = pairs.iter().map(|p| p.1).max().unwrap_or(0) as f64;
            branches.push(BranchBound { branch: "vanishing linear form".into(), n: BoundRecord::constant(n), m: BoundRecord::constant(m) });
        }
        ZeroSet::Unknown { reason } => {
            rigorous = false;
            notes.push(format!("pairs with Λ = 0 not determined: {reason}"));
        }
    }

    let c0 = (16f64).max((2.0 * su.l_hi).exp()).max((2.0 * sv.l_hi).exp()).ceil();
    ledger.put("c0", "ceil(max(16, |root_U|^2, |root_V|^2))", c0, "records are evaluated at log max(|c|, c0)");

    let mut n_max = BoundRecord::new(0.0, 1.0 / su.l_lo, 0.0);
    let mut m_max = BoundRecord::new(0.0, 1.0 / sv.l_lo, 0.0);
    for b in &branches {
        n_max = n_max.max(&b.n);
        m_max = m_max.max(&b.m);
    }
    Ok(EffectiveBounds { n_max, m_max, c0, field_degree: d, ledger: ledger.0, branches, zero_set, rigorous, notes })
}

/// `C10` with `A_1 <= C10 log max(n, m)` for `max(n, m) >= 3`; the flag is
/// false for sampled estimates.
fn coefficient_constant(u: &DominantRootCertificate, v: &DominantRootCertificate, ctx: &LinearFormContext) -> (f64, String, bool) {
    let d = ctx.field_degree as f64;
    let ln3 = 3f64.ln();
    if let (Some(pa), Some(pb)) = (&u.exact_coefficients, &v.exact_coefficients) {
        if pa.len() == 1 && pb.len() == 1 {
            let a1 = match pa[0].div(&pb[0]) {
                Some(g) => a_parameter(&g, ctx.field_degree),
                None => {
                    let (la, _) = log_parts(&pa[0]);
                    let (lb, _) = log_parts(&pb[0]);
                    (d * up(pa[0].height().hi + pb[0].height().hi)).max(up(la + lb + PI)).max(0.16)
                }
            };
            return (up(a1 / ln3), "max(D h(a/b), |log(a/b)|, 0.16) / log 3".into(), true);
        }
        if let (Some(hp), Some(hq)) = (integer_poly_size(pa), integer_poly_size(pb)) {
            let dp = (pa.len() - 1) as f64;
            let dq = (pb.len() - 1) as f64;
            let v = up(d * (dp + dq) + (d * (hp + hq) + PI + 0.16) / ln3);
            return (v, "D (deg a + deg b) + (D (H(a) + H(b)) + pi + 0.16) / log 3".into(), true);
        }
    }
    let mut best = 0.16 / ln3;
    for n in 3..=60u64 {
        for m in 3..=60u64 {
            let Ok(s) = sampled_log_quotient(u, v, n, m) else { continue };
            best = best.max((d * s + PI + 0.16) / (n.max(m) as f64).ln());
        }
    }
    (up(best), "max over 3 <= n, m <= 60 of (D |log|a(n)/b(m)|| + pi + 0.16) / log max(n, m)".into(), false)
}

fn sampled_log_quotient(u: &DominantRootCertificate, v: &DominantRootCertificate, n: u64, m: u64) -> Result<f64> {
    let prec = u.precision().max(v.precision());
    let a = u.decomposition.coefficient_at(u.index, n as usize, prec).abs(prec);
    let b = v.decomposition.coefficient_at(v.index, m as usize, prec).abs(prec);
    let q = a.div(&b, prec).ok_or(Error::DivisionByZero)?;
    let (lo, hi) = q.ln_bounds().ok_or(Error::DivisionByZero)?;
    Ok(lo.abs().max(hi.abs()))
}

/// `log max(Σ|P_i|, den)` for `p = P/den` with integer `P`, when every
/// coefficient is rational.
fn integer_poly_size(p: &[QuadElem]) -> Option<f64> {
    let rats: Vec<_> = p.iter().map(|c| c.as_rational().cloned()).collect::<Option<_>>()?;
    let den = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let sum: BigInt = rats.iter().map(|r| (r.numer() * (&den / r.denom())).abs()).sum();
    let size = sum.max(den).max(BigInt::one());
    Some(if size.is_one() { 0.0 } else { ln_int(&size).hi })
}

/// Minimum of `log|Λ| - floor` over a list of samples; negative means a
/// violation.
pub fn floor_slack(samples: &[LinearFormSample]) -> Option<f64> {
    samples
        .iter()
        .filter_map(|s| Some(s.log_lower()? - s.matveev_floor?))
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::analyze;

    fn pair(u: LinearRecurrence, v: LinearRecurrence) -> (LinearRecurrence, SequenceAnalysis, LinearRecurrence, SequenceAnalysis) {
        let au = analyze(&u).unwrap();
        let av = analyze(&v).unwrap();
        (u, au, v, av)
    }

    #[test]
    fn lower_bound_examples() {
        let v = matveev_lower_bound(&MatveevInput::new(3, 2, 100.0, vec![1.0; 3]).unwrap()).unwrap();
        assert!((v / -6.1006e15 - 1.0).abs() < 1e-4, "{v}");
        let w = matveev_lower_bound(&MatveevInput::new(1, 1, 1.0, vec![0.16]).unwrap()).unwrap();
        assert!((w / -5.279e8 - 1.0).abs() < 1e-3, "{w}");
        let doubled = matveev_lower_bound(&MatveevInput::new(3, 2, 200.0, vec![1.0; 3]).unwrap()).unwrap();
        assert!(doubled < v);
    }

    #[test]
    fn input_validation() {
        assert!(MatveevInput::new(0, 1, 1.0, vec![]).is_err());
        assert!(MatveevInput::new(1, 0, 1.0, vec![1.0]).is_err());
        assert!(MatveevInput::new(1, 1, 0.5, vec![1.0]).is_err());
        assert!(MatveevInput::new(1, 1, 1.0, vec![0.1]).is_err());
        assert!(MatveevInput::new(2, 1, 1.0, vec![1.0]).is_err());
    }

    #[test]
    fn lambda_examples() {
        let (_, fu, _, fv) = pair(LinearRecurrence::fibonacci(), LinearRecurrence::powers_of(2));
        let s = lambda_value(&fu.certificate, &fv.certificate, 10, 6).unwrap();
        assert!((s.lambda_abs.mid() - 0.1405681856).abs() < 1e-9, "{:?}", s.lambda_abs);
        assert!(s.lambda_abs.width() < 1e-12);

        let (_, pu, _, pv) = pair(LinearRecurrence::powers_of(2), LinearRecurrence::powers_of(3));
        let z = lambda_value(&pu.certificate, &pv.certificate, 0, 0).unwrap();
        assert!(z.exact_zero);
        assert_eq!(z.lambda_abs.hi, 0.0);
        let t = lambda_value(&pu.certificate, &pv.certificate, 3, 2).unwrap();
        assert!(t.lambda_abs.contains(1.0 / 9.0));
        assert!(!t.undecided);
    }

    #[test]
    fn interval_lambda_matches_exact() {
        let (_, fu, _, fv) = pair(LinearRecurrence::fibonacci(), LinearRecurrence::powers_of(2));
        let ctx = LinearFormContext::new(&fu.certificate, &fv.certificate).unwrap();
        let a = ctx.interval_lambda(10, 6).unwrap();
        let b = ctx.lambda(10, 6).unwrap();
        assert!(a.lambda_abs.lo <= b.lambda_abs.hi && b.lambda_abs.lo <= a.lambda_abs.hi);
    }

    #[test]
    fn vanishing_pairs_examples() {
        let (_, fu, _, fv) = pair(LinearRecurrence::fibonacci(), LinearRecurrence::powers_of(2));
        assert_eq!(vanishing_pairs(&fu.certificate, &fv.certificate), ZeroSet::Never);
        let (_, pu, _, pv) = pair(LinearRecurrence::powers_of(2), LinearRecurrence::powers_of(3));
        assert_eq!(vanishing_pairs(&pu.certificate, &pv.certificate), ZeroSet::Finite { pairs: vec![(0, 0)] });
    }

    #[test]
    fn fibonacci_against_powers_of_two() {
        let (su, u, sv, v) = pair(LinearRecurrence::fibonacci(), LinearRecurrence::powers_of(2));
        let b = effective_upper_bounds(&su, &u, &sv, &v).unwrap();
        assert!(b.rigorous, "{:?}", b.notes);
        assert_eq!(b.field_degree, 2);
        assert!((b.n_max.q - 2.0781).abs() < 1e-4);
        assert!((b.m_max.q - std::f64::consts::LOG2_E).abs() < 1e-4);
        assert!(b.n_bound(10.0) >= 10.0 && b.m_bound(10.0) >= 6.0);
        for k in 5..=18 {
            let name = format!("C{k}");
            assert_eq!(b.ledger.iter().filter(|e| e.name == name).count(), 1, "{name}");
        }
        for rec in [b.n_max, b.m_max] {
            assert!(rec.p.is_finite() && rec.p > 0.0 && rec.q > 0.0 && rec.r > 0.0);
        }
        let mut prev = 0.0;
        for c in [b.c0, 1e3, 1e6, 1e12, 1e30] {
            let n = b.n_bound(c);
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn dependent_roots_are_rejected() {
        let (su, u, sv, v) = pair(LinearRecurrence::powers_of(2), LinearRecurrence::powers_of(4));
        assert!(matches!(effective_upper_bounds(&su, &u, &sv, &v), Err(Error::Precondition(_))));
    }

    #[test]
    fn tribonacci_is_flagged() {
        let (su, u, sv, v) = pair(LinearRecurrence::tribonacci(), LinearRecurrence::powers_of(2));
        let b = effective_upper_bounds(&su, &u, &sv, &v).unwrap();
        assert!(!b.rigorous);
        assert!(!b.notes.is_empty());
    }

    #[test]
    fn threshold_and_solver() {
        let n = mlogm_threshold(1.0, 1.0).unwrap();
        assert!(n >= 55.0);
        assert!(n.ln().powi(4) <= n);
        let m = largest_solution(0.5, 10.0, 3.0).unwrap();
        assert!(m * 0.5 - 10.0 * m.ln().powi(2) > 3.0 - 1e-6);
    }
}
