//! Exact arithmetic in ℚ and quadratic fields ℚ(√d).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::numeric::interval::rabs;
use crate::numeric::{ComplexInterval, Dyadic, F64Interval, RealInterval};

/// `a + b√d` with `d` square-free. Rational values use `d = 1, b = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

impl QuadElem {
    pub fn rational(a: BigRational) -> Self {
        QuadElem { a, b: BigRational::zero(), d: BigInt::one() }
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        Self::rational(BigRational::from_integer(v.into()))
    }

    /// `a + b√radicand`; the radicand is reduced to its square-free part.
    pub fn new(a: BigRational, b: BigRational, radicand: BigInt) -> Self {
        let (s, d) = square_free_split(&radicand);
        if d.is_one() || b.is_zero() {
            return Self::rational(a + b * BigRational::from_integer(s));
        }
        QuadElem { a, b: b * BigRational::from_integer(s), d }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    /// Square-free radicand; 1 for rationals.
    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// Common radicand of two elements, if they share a field.
    pub fn common_radicand(&self, o: &Self) -> Option<BigInt> {
        match (self.is_rational(), o.is_rational()) {
            (true, true) => Some(BigInt::one()),
            (true, false) => Some(o.d.clone()),
            (false, true) => Some(self.d.clone()),
            (false, false) => (self.d == o.d).then(|| self.d.clone()),
        }
    }

    fn build(a: BigRational, b: BigRational, d: BigInt) -> Self {
        if b.is_zero() {
            Self::rational(a)
        } else {
            QuadElem { a, b, d }
        }
    }

    pub fn add(&self, o: &Self) -> Option<Self> {
        let d = self.common_radicand(o)?;
        Some(Self::build(&self.a + &o.a, &self.b + &o.b, d))
    }

    pub fn sub(&self, o: &Self) -> Option<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        QuadElem { a: -self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }

    pub fn mul(&self, o: &Self) -> Option<Self> {
        let d = self.common_radicand(o)?;
        let dr = BigRational::from_integer(d.clone());
        let a = &self.a * &o.a + &self.b * &o.b * &dr;
        let b = &self.a * &o.b + &self.b * &o.a;
        Some(Self::build(a, b, d))
    }

    pub fn conj(&self) -> Self {
        Self::build(self.a.clone(), -self.b.clone(), self.d.clone())
    }

    /// Field norm `a^2 - d b^2` (for rationals: `a^2`).
    pub fn norm(&self) -> BigRational {
        if self.is_rational() {
            return &self.a * &self.a;
        }
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.clone())
    }

    pub fn trace(&self) -> BigRational {
        if self.is_rational() {
            return &self.a + &self.a;
        }
        &self.a + &self.a
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.is_rational() {
            return Some(Self::rational(self.a.recip()));
        }
        let n = self.norm();
        Some(Self::build(&self.a / &n, -&self.b / &n, self.d.clone()))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        self.mul(&o.inv()?)
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut result = QuadElem::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).unwrap();
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).unwrap();
            }
        }
        result
    }

    pub fn pow_signed(&self, e: i64) -> Option<Self> {
        if e >= 0 {
            Some(self.pow(e as u64))
        } else {
            self.inv().map(|v| v.pow(e.unsigned_abs()))
        }
    }

    /// Order as a root of unity, if it is one.
    pub fn root_of_unity_order(&self) -> Option<u32> {
        if self.norm() != BigRational::one() {
            return None;
        }
        [1u32, 2, 3, 4, 6].into_iter().find(|&k| self.pow(k as u64).is_one())
    }

    /// Primitive integer minimal polynomial, lowest degree first, positive
    /// leading coefficient.
    pub fn minimal_polynomial(&self) -> Vec<BigInt> {
        if self.is_rational() {
            let (p, q) = (self.a.numer().clone(), self.a.denom().clone());
            return vec![-p, q];
        }
        // X^2 - tr X + N
        let coeffs = [self.norm(), -self.trace(), BigRational::one()];
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * &den).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        ints.into_iter().map(|c| c / &g).collect()
    }

    /// Complex enclosure (principal square root for negative radicands).
    pub fn to_interval(&self, prec: u32) -> ComplexInterval {
        let a = RealInterval::from_rational(&self.a, prec);
        if self.is_rational() {
            return ComplexInterval::real(a);
        }
        let b = RealInterval::from_rational(&self.b, prec);
        let root = RealInterval::from_int(self.d.abs()).sqrt(prec);
        let t = b.mul(&root, prec);
        if self.d.is_positive() {
            ComplexInterval::real(a.add(&t, prec))
        } else {
            ComplexInterval::new(a, t)
        }
    }

    /// Certified bounds on `ln|self|` for nonzero values.
    pub fn ln_abs(&self) -> F64Interval {
        assert!(!self.is_zero(), "ln of zero");
        if self.is_rational() {
            return ln_rational(&rabs(&self.a));
        }
        if self.d.is_negative() {
            // |z|^2 = norm
            return ln_rational(&self.norm()).scale(0.5);
        }
        // real: the larger conjugate has no cancellation
        let (big, small_is_self) = self.conjugate_split();
        let big_ln = big;
        if small_is_self {
            ln_rational(&rabs(&self.norm())).add(&F64Interval::new(-big_ln.hi, -big_ln.lo))
        } else {
            big_ln
        }
    }

    /// For real quadratic irrationals: bounds on `ln(|a| + |b|√d)` (the
    /// larger conjugate modulus) and whether `self` is the smaller one.
    fn conjugate_split(&self) -> (F64Interval, bool) {
        let prec = 128;
        let abs_a = RealInterval::from_rational(&rabs(&self.a), prec);
        let abs_b = RealInterval::from_rational(&rabs(&self.b), prec);
        let root = RealInterval::from_int(self.d.clone()).sqrt(prec);
        let big = abs_a.add(&abs_b.mul(&root, prec), prec);
        let (lo, hi) = big.ln_bounds().expect("positive");
        // self is the smaller conjugate when a and b have opposite signs
        let small = self.a.is_negative() != self.b.is_negative() && !self.a.is_zero();
        (F64Interval::new(lo, hi), small)
    }

    /// Logarithmic Weil height, exact up to f64 rounding of the logarithms.
    pub fn height(&self) -> F64Interval {
        if self.is_rational() {
            return rational_height(&self.a);
        }
        let mp = self.minimal_polynomial();
        let lead = ln_int(&mp[2]);
        let sum = if self.d.is_negative() {
            let half_ln_norm = ln_rational(&self.norm()).scale(0.5);
            let term = F64Interval::new(half_ln_norm.lo.max(0.0), half_ln_norm.hi.max(0.0));
            term.add(&term)
        } else {
            let (big, _) = self.conjugate_split();
            let ln_norm = ln_rational(&rabs(&self.norm()));
            let small = F64Interval::new(ln_norm.lo - big.hi, ln_norm.hi - big.lo);
            let pos = |v: F64Interval| F64Interval::new(v.lo.max(0.0), v.hi.max(0.0));
            pos(big).add(&pos(small))
        };
        lead.add(&sum).scale(0.5)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_interval(80).re.mid_f64()
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + ({})·√{}", self.a, self.b, self.d)
        }
    }
}

/// `n = s^2 · d` with `d` square-free (sign kept on `d`).
pub fn square_free_split(n: &BigInt) -> (BigInt, BigInt) {
    if n.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut m = n.abs();
    let mut s = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p * &p <= m || (&p * &p <= m && p < BigInt::from(1_000_000)) {
        let pp = &p * &p;
        while (&m % &pp).is_zero() {
            m /= &pp;
            s *= &p;
        }
        p += 1;
        if p > BigInt::from(1_000_000) {
            break;
        }
    }
    // the remaining cofactor may still be a perfect square
    let r = m.sqrt();
    if &r * &r == m && !m.is_one() {
        s *= &r;
        m = BigInt::one();
    }
    (s, m * sign)
}

/// Bounds on `ln n` for a positive integer.
pub fn ln_int(n: &BigInt) -> F64Interval {
    assert!(n.is_positive(), "ln of non-positive integer");
    if n.is_one() {
        return F64Interval::point(0.0);
    }
    if let Some(v) = n.to_u64().filter(|&v| v < (1u64 << 53)) {
        let l = (v as f64).ln();
        return F64Interval::new(crate::numeric::dyadic::widen_down(l), crate::numeric::dyadic::widen_up(l));
    }
    let (lo, hi) = Dyadic::from_int(n.clone()).ln_bounds();
    F64Interval::new(lo, hi)
}

/// Bounds on `ln r` for a positive rational.
pub fn ln_rational(r: &BigRational) -> F64Interval {
    let num = ln_int(r.numer());
    let den = ln_int(r.denom());
    num.add(&F64Interval::new(-den.hi, -den.lo))
}

/// `h(p/q) = ln max(|p|, |q|)` for the reduced fraction; `h(0) = 0`.
pub fn rational_height(r: &BigRational) -> F64Interval {
    if r.is_zero() {
        return F64Interval::point(0.0);
    }
    let m = r.numer().abs().max(r.denom().clone());
    if m.is_one() {
        return F64Interval::point(0.0);
    }
    ln_int(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::interval::ratio;

    fn phi() -> QuadElem {
        QuadElem::new(ratio(1, 2), ratio(1, 2), BigInt::from(5))
    }

    #[test]
    fn phi_satisfies_its_polynomial() {
        let p = phi();
        assert_eq!(p.minimal_polynomial(), vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]);
        let lhs = p.mul(&p).unwrap();
        let rhs = p.add(&QuadElem::one()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(p.norm(), ratio(-1, 1));
    }

    #[test]
    fn phi_power_closed_form() {
        // φ^10 = 55φ + 34
        let want = phi().mul(&QuadElem::from_int(55)).unwrap().add(&QuadElem::from_int(34)).unwrap();
        assert_eq!(phi().pow(10), want);
    }

    #[test]
    fn heights_of_known_values() {
        let h = phi().height();
        let want = 0.5 * ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!(h.contains(want) || (h.mid() - want).abs() < 1e-14);
        assert!((rational_height(&ratio(3, 2)).mid() - 3f64.ln()).abs() < 1e-15);
        assert_eq!(rational_height(&ratio(0, 7)).mid(), 0.0);
        assert_eq!(rational_height(&ratio(-1, 1)).mid(), 0.0);
        // 1/√5 has minimal polynomial 5X^2 - 1
        let inv_sqrt5 = QuadElem::new(ratio(0, 1), ratio(1, 5), BigInt::from(5));
        assert!((inv_sqrt5.height().mid() - 0.5 * 5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn height_is_multiplicative_in_powers() {
        let h1 = phi().height().mid();
        for n in 1..=10u64 {
            assert!((phi().pow(n).height().mid() - n as f64 * h1).abs() < 1e-12);
        }
    }

    #[test]
    fn imaginary_units() {
        let i = QuadElem::new(ratio(0, 1), ratio(1, 1), BigInt::from(-1));
        assert_eq!(i.root_of_unity_order(), Some(4));
        assert_eq!(i.height().mid(), 0.0);
        assert_eq!(QuadElem::from_int(-1).root_of_unity_order(), Some(2));
        assert_eq!(phi().root_of_unity_order(), None);
    }

    #[test]
    fn square_free_parts() {
        assert_eq!(square_free_split(&BigInt::from(20)), (BigInt::from(2), BigInt::from(5)));
        assert_eq!(square_free_split(&BigInt::from(-12)), (BigInt::from(2), BigInt::from(-3)));
        assert_eq!(square_free_split(&BigInt::from(49)), (BigInt::from(7), BigInt::from(1)));
    }

    #[test]
    fn ln_abs_of_small_conjugate() {
        // ψ = (1 - √5)/2, |ψ| = 1/φ
        let psi = phi().conj();
        let want = -((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((psi.ln_abs().mid() - want).abs() < 1e-14);
    }
}
