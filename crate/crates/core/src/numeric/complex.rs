//! Rectangular complex intervals.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::dyadic::Dyadic;
use super::interval::RealInterval;

/// `re + i·im` with both parts real intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: RealInterval,
    pub im: RealInterval,
}

impl ComplexInterval {
    pub fn new(re: RealInterval, im: RealInterval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn real(re: RealInterval) -> Self {
        ComplexInterval { re, im: RealInterval::zero() }
    }

    pub fn zero() -> Self {
        Self::real(RealInterval::zero())
    }

    pub fn one() -> Self {
        Self::real(RealInterval::one())
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        Self::real(RealInterval::from_int(v))
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        Self::real(RealInterval::from_rational(r, prec))
    }

    /// Box `[c ± r] + i[c ± r]` around a dyadic center.
    pub fn from_center(re: &Dyadic, im: &Dyadic, rad: &Dyadic) -> Self {
        ComplexInterval { re: RealInterval::from_mid_rad(re, rad), im: RealInterval::from_mid_rad(im, rad) }
    }

    /// Imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.im.is_point() && self.im.lo().is_zero()
    }

    pub fn is_point(&self) -> bool {
        self.re.is_point() && self.im.is_point()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// Certainly nonzero.
    pub fn excludes_zero(&self) -> bool {
        !self.contains_zero()
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        self.re.overlaps(&o.re) && self.im.overlaps(&o.im)
    }

    pub fn intersect(&self, o: &Self) -> Option<Self> {
        Some(ComplexInterval { re: self.re.intersect(&o.re)?, im: self.im.intersect(&o.im)? })
    }

    pub fn subset_of(&self, o: &Self) -> bool {
        self.re.subset_of(&o.re) && self.im.subset_of(&o.im)
    }

    pub fn conj(&self) -> Self {
        ComplexInterval { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn neg(&self) -> Self {
        ComplexInterval { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        ComplexInterval { re: self.re.add(&o.re, prec), im: self.im.add(&o.im, prec) }
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        ComplexInterval { re: self.re.sub(&o.re, prec), im: self.im.sub(&o.im, prec) }
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        if self.is_real() && o.is_real() {
            return Self::real(self.re.mul(&o.re, prec));
        }
        let re = self.re.mul(&o.re, prec).sub(&self.im.mul(&o.im, prec), prec);
        let im = self.re.mul(&o.im, prec).add(&self.im.mul(&o.re, prec), prec);
        ComplexInterval { re, im }
    }

    pub fn scale(&self, k: &RealInterval, prec: u32) -> Self {
        ComplexInterval { re: self.re.mul(k, prec), im: self.im.mul(k, prec) }
    }

    /// `|z|^2` as a real interval.
    pub fn norm_sqr(&self, prec: u32) -> RealInterval {
        if self.is_real() {
            return self.re.sqr(prec);
        }
        self.re.sqr(prec).add(&self.im.sqr(prec), prec)
    }

    pub fn abs(&self, prec: u32) -> RealInterval {
        if self.is_real() {
            return self.re.abs();
        }
        self.norm_sqr(prec).sqrt(prec)
    }

    /// `None` when the divisor may vanish.
    pub fn div(&self, o: &Self, prec: u32) -> Option<Self> {
        if o.is_real() {
            if o.re.contains_zero() {
                return None;
            }
            let re = self.re.div(&o.re, prec)?;
            let im = if self.is_real() { RealInterval::zero() } else { self.im.div(&o.re, prec)? };
            return Some(ComplexInterval { re, im });
        }
        let den = o.norm_sqr(prec);
        if den.contains_zero() {
            return None;
        }
        let num = self.mul(&o.conj(), prec);
        Some(ComplexInterval { re: num.re.div(&den, prec)?, im: num.im.div(&den, prec)? })
    }

    pub fn pow(&self, n: u64, prec: u32) -> Self {
        if self.is_real() {
            return Self::real(self.re.pow(n, prec));
        }
        let mut result = ComplexInterval::one();
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
                base = base.mul(&base, prec);
            }
        }
        result
    }

    /// Upper bound on the distance from the box center to any point.
    pub fn rad_f64(&self) -> f64 {
        let a = self.re.rad_f64();
        let b = self.im.rad_f64();
        (a * a + b * b).sqrt() * (1.0 + 4.0 * f64::EPSILON)
    }

    pub fn mid_f64(&self) -> (f64, f64) {
        (self.re.mid_f64(), self.im.mid_f64())
    }

    pub fn describe(&self) -> String {
        let (re, im) = self.mid_f64();
        if self.is_real() {
            format!("{re:.15e} ± {:.3e}", self.re.rad_f64())
        } else {
            let sign = if im < 0.0 { '-' } else { '+' };
            format!("{re:.15e} {sign} {:.15e}i ± {:.3e}", im.abs(), self.rad_f64())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        let i = ComplexInterval::new(RealInterval::zero(), RealInterval::one());
        let sq = i.mul(&i, 64);
        assert!(sq.re.contains_int(&BigInt::from(-1)));
        assert!(sq.im.contains_zero());
        assert!(i.pow(4, 64).re.contains_int(&BigInt::from(1)));
    }

    #[test]
    fn division_inverts_multiplication() {
        let z = ComplexInterval::new(RealInterval::from_int(3), RealInterval::from_int(4));
        let w = ComplexInterval::new(RealInterval::from_int(1), RealInterval::from_int(-2));
        let q = z.mul(&w, 128).div(&w, 128).unwrap();
        assert!(q.re.contains_int(&BigInt::from(3)));
        assert!(q.im.contains_int(&BigInt::from(4)));
        assert!(z.abs(128).contains_int(&BigInt::from(5)));
    }
}
