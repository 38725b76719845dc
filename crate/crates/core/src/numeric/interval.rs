//! Outward-rounded real intervals with dyadic endpoints.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::dyadic::{widen_down, widen_up, Dyadic, Round};

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl RealInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        RealInterval { lo, hi }
    }

    pub fn point(v: Dyadic) -> Self {
        RealInterval { lo: v.clone(), hi: v }
    }

    pub fn zero() -> Self {
        Self::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self::point(Dyadic::one())
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        Self::point(Dyadic::from_int(v))
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        RealInterval { lo: Dyadic::from_rational(r, prec, Round::Down), hi: Dyadic::from_rational(r, prec, Round::Up) }
    }

    /// `mid ± rad`.
    pub fn from_mid_rad(mid: &Dyadic, rad: &Dyadic) -> Self {
        let rad = rad.abs();
        RealInterval { lo: mid - &rad, hi: mid + &rad }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mid(&self) -> Dyadic {
        (&self.lo + &self.hi).mul_pow2(-1)
    }

    /// Half-width (exact).
    pub fn rad(&self) -> Dyadic {
        (&self.hi - &self.lo).mul_pow2(-1)
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn contains(&self, v: &Dyadic) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_int(&self, v: &BigInt) -> bool {
        self.contains(&Dyadic::from_int(v.clone()))
    }

    /// The integers inside the interval, as an inclusive range `(first, last)`;
    /// empty when `first > last`.
    pub fn integer_range(&self) -> (BigInt, BigInt) {
        (self.lo.ceil(), self.hi.floor())
    }

    /// The single integer in the interval, if there is exactly one.
    pub fn unique_integer(&self) -> Option<BigInt> {
        let (a, b) = self.integer_range();
        if a == b {
            Some(a)
        } else {
            None
        }
    }

    /// Strictly below `other` everywhere.
    pub fn lt(&self, other: &RealInterval) -> bool {
        self.hi < other.lo
    }

    pub fn overlaps(&self, other: &RealInterval) -> bool {
        !(self.hi < other.lo || other.hi < self.lo)
    }

    /// `self ⊆ other`.
    /// Common part of two overlapping intervals.
    pub fn intersect(&self, other: &RealInterval) -> Option<RealInterval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(RealInterval { lo, hi })
    }

    pub fn subset_of(&self, other: &RealInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn round(&self, prec: u32) -> Self {
        RealInterval { lo: self.lo.round(prec, Round::Down), hi: self.hi.round(prec, Round::Up) }
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        RealInterval { lo: (&self.lo + &o.lo).round(prec, Round::Down), hi: (&self.hi + &o.hi).round(prec, Round::Up) }
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        RealInterval { lo: (&self.lo - &o.hi).round(prec, Round::Down), hi: (&self.hi - &o.lo).round(prec, Round::Up) }
    }

    pub fn neg(&self) -> Self {
        RealInterval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().round(prec, Round::Down);
        let hi = c.iter().max().unwrap().round(prec, Round::Up);
        RealInterval { lo, hi }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        RealInterval { lo: self.lo.mul_pow2(k), hi: self.hi.mul_pow2(k) }
    }

    pub fn sqr(&self, prec: u32) -> Self {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        let (lo, hi) = if self.contains_zero() {
            (Dyadic::zero(), a.max(b))
        } else if a < b {
            (a, b)
        } else {
            (b, a)
        };
        RealInterval { lo: lo.round(prec, Round::Down), hi: hi.round(prec, Round::Up) }
    }

    /// `None` when the divisor contains zero.
    pub fn div(&self, o: &Self, prec: u32) -> Option<Self> {
        if o.contains_zero() {
            return None;
        }
        let inv = RealInterval { lo: Dyadic::one().div(&o.hi, prec, Round::Down), hi: Dyadic::one().div(&o.lo, prec, Round::Up) };
        Some(self.mul(&inv, prec))
    }

    pub fn abs(&self) -> Self {
        if self.contains_zero() {
            RealInterval { lo: Dyadic::zero(), hi: self.lo.abs().max(self.hi.abs()) }
        } else if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Square root; negative parts of the interval are clipped to zero.
    pub fn sqrt(&self, prec: u32) -> Self {
        let lo = if self.lo.is_positive() { self.lo.sqrt(prec, Round::Down) } else { Dyadic::zero() };
        let hi = if self.hi.is_positive() { self.hi.sqrt(prec, Round::Up) } else { Dyadic::zero() };
        RealInterval { lo, hi }
    }

    pub fn pow(&self, n: u64, prec: u32) -> Self {
        let mut result = RealInterval::one();
        let mut base = self.clone();
        let mut e = n;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first { base.clone() } else { result.mul(&base, prec) };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr(prec);
            }
        }
        result
    }

    pub fn max(&self, o: &Self) -> Self {
        RealInterval { lo: self.lo.clone().max(o.lo.clone()), hi: self.hi.clone().max(o.hi.clone()) }
    }

    pub fn hull(&self, o: &Self) -> Self {
        RealInterval { lo: self.lo.clone().min(o.lo.clone()), hi: self.hi.clone().max(o.hi.clone()) }
    }

    /// Lower endpoint rounded down to f64.
    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64_down()
    }

    /// Upper endpoint rounded up to f64.
    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64_up()
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    /// Radius as an f64 upper bound.
    pub fn rad_f64(&self) -> f64 {
        self.rad().to_f64_up()
    }

    /// Certified f64 bounds on `ln(self)`; `None` unless strictly positive.
    pub fn ln_bounds(&self) -> Option<(f64, f64)> {
        if !self.is_positive() {
            return None;
        }
        Some((self.lo.ln_bounds().0, self.hi.ln_bounds().1))
    }

    /// Certified f64 bounds on `ln max(1, self)`; the interval must be
    /// non-negative.
    pub fn ln_max1_bounds(&self) -> (f64, f64) {
        let one = Dyadic::one();
        let lo = if self.lo > one { self.lo.ln_bounds().0.max(0.0) } else { 0.0 };
        let hi = if self.hi > one { self.hi.ln_bounds().1 } else { 0.0 };
        (lo, hi)
    }

    /// Decimal rendering `mid ± rad`.
    pub fn describe(&self) -> String {
        format!("{:.15e} ± {:.3e}", self.mid_f64(), self.rad_f64())
    }
}

/// A closed interval of f64 values, used for logarithmic quantities whose
/// endpoints were padded outward after a libm call.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct F64Interval {
    pub lo: f64,
    pub hi: f64,
}

impl F64Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "inverted f64 interval [{lo}, {hi}]");
        F64Interval { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        F64Interval { lo: v, hi: v }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn add(&self, o: &Self) -> Self {
        if o.lo == 0.0 && o.hi == 0.0 {
            return *self;
        }
        if self.lo == 0.0 && self.hi == 0.0 {
            return *o;
        }
        F64Interval { lo: widen_down(self.lo + o.lo), hi: widen_up(self.hi + o.hi) }
    }

    pub fn scale(&self, k: f64) -> Self {
        if self.lo == 0.0 && self.hi == 0.0 {
            return F64Interval::point(0.0);
        }
        let a = self.lo * k;
        let b = self.hi * k;
        F64Interval { lo: widen_down(a.min(b)), hi: widen_up(a.max(b)) }
    }

    pub fn subset_of(&self, o: &Self) -> bool {
        o.lo <= self.lo && self.hi <= o.hi
    }
}

impl fmt::Display for F64Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12}, {:.12}]", self.lo, self.hi)
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Exact rational from an integer.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `p/q` as a rational.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// True when the rational is an integer.
pub fn is_integral(r: &BigRational) -> bool {
    r.denom().is_one()
}

/// `|r|` as a rational.
pub fn rabs(r: &BigRational) -> BigRational {
    if r.is_negative() {
        -r.clone()
    } else {
        r.clone()
    }
}

pub fn is_zero_rat(r: &BigRational) -> bool {
    r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_encloses_exact_values() {
        let third = RealInterval::from_rational(&ratio(1, 3), 80);
        let sum = third.add(&third, 80).add(&third, 80);
        assert!(sum.contains(&Dyadic::one()));
        let prod = third.mul(&RealInterval::from_int(3), 80);
        assert!(prod.contains(&Dyadic::one()));
        let q = RealInterval::one().div(&third, 80).unwrap();
        assert!(q.contains_int(&BigInt::from(3)));
        assert!(RealInterval::one().div(&RealInterval::zero(), 80).is_none());
    }

    #[test]
    fn pow_of_point_is_exact() {
        let two = RealInterval::from_int(2);
        assert_eq!(two.pow(100, 256), RealInterval::from_int(BigInt::one() << 100usize));
        assert_eq!(two.pow(0, 256), RealInterval::one());
    }

    #[test]
    fn sqr_of_straddling_interval_starts_at_zero() {
        let iv = RealInterval::new(Dyadic::from_int(-1), Dyadic::from_int(2));
        let s = iv.sqr(64);
        assert_eq!(s.lo(), &Dyadic::zero());
        assert_eq!(s.hi(), &Dyadic::from_int(4));
    }

    #[test]
    fn unique_integer_detection() {
        let iv = RealInterval::from_mid_rad(&Dyadic::from_int(55), &Dyadic::new(1.into(), -3));
        assert_eq!(iv.unique_integer(), Some(BigInt::from(55)));
        let wide = RealInterval::from_mid_rad(&Dyadic::from_int(55), &Dyadic::one());
        assert_eq!(wide.unique_integer(), None);
    }
}
