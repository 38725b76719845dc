//! Exact dyadic rationals `m * 2^e` with directed rounding.
//!
//! Every interval endpoint in the crate is a [`Dyadic`]. Addition,
//! subtraction and multiplication are exact; [`Dyadic::round`] trims the
//! mantissa to a bit budget in a chosen direction, which is how interval
//! operations keep their sizes bounded while staying outward-rounded.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
    Nearest,
}

/// A dyadic rational `man * 2^exp`. Normalized so that `man` is odd, or
/// `man == 0 && exp == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { man, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { man: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { man: BigInt::one(), exp: 0 }
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        Dyadic::new(v.into(), 0)
    }

    /// Exact conversion; panics on non-finite input.
    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "non-finite f64 {v}");
        if v == 0.0 {
            return Dyadic::zero();
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if exp_bits == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp_bits - 1075) };
        Dyadic::new(BigInt::from(man) * sign, exp)
    }

    fn normalize(&mut self) {
        if self.man.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.man >>= tz as usize;
            self.exp += tz as i64;
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic { man: self.man.abs(), exp: self.exp }
    }

    /// Bit length of the mantissa.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// floor(log2 |self|) for nonzero values.
    pub fn log2_floor(&self) -> i64 {
        debug_assert!(!self.is_zero());
        self.man.bits() as i64 - 1 + self.exp
    }

    /// Rounds to at most `prec` mantissa bits.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.man.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        let man = shift_round(&self.man, shift, dir);
        Dyadic::new(man, self.exp + shift as i64)
    }

    /// Multiplies by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { man: self.man.clone(), exp: self.exp + k }
    }

    /// `self / other` rounded to `prec` bits.
    pub fn div(&self, other: &Dyadic, prec: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // Scale the numerator so the integer quotient carries prec + 2 bits.
        let want = prec as i64 + 2;
        let shift = (want + other.man.bits() as i64 - self.man.bits() as i64).max(0);
        let num = &self.man << shift as usize;
        let q = div_round(&num, &other.man, dir);
        Dyadic::new(q, self.exp - other.exp - shift).round(prec, dir)
    }

    /// Square root rounded to `prec` bits; `self` must be non-negative.
    pub fn sqrt(&self, prec: u32, dir: Round) -> Self {
        assert!(!self.is_negative(), "sqrt of negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // Make the exponent even and the mantissa wide enough.
        let want = 2 * (prec as i64 + 2);
        let mut shift = (want - self.man.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let m = &self.man << shift as usize;
        let e = self.exp - shift;
        let r = m.sqrt();
        let exact = &r * &r == m;
        let r = match dir {
            Round::Up if !exact => r + 1,
            _ => r,
        };
        Dyadic::new(r, e / 2).round(prec, dir)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as usize)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Encloses a rational with `prec`-bit rounding in direction `dir`.
    pub fn from_rational(r: &BigRational, prec: u32, dir: Round) -> Self {
        let num = Dyadic::from_int(r.numer().clone());
        let den = Dyadic::from_int(r.denom().clone());
        if den.man.is_one() && den.exp == 0 {
            return num.round(prec, dir);
        }
        num.div(&den, prec, dir)
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as usize
        } else {
            self.man.div_floor(&(BigInt::one() << (-self.exp) as usize))
        }
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as usize
        } else {
            self.man.div_ceil(&(BigInt::one() << (-self.exp) as usize))
        }
    }

    /// Nearest f64 (ties handled by the underlying conversion).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits();
        let (m, e) = if bits > 64 {
            let s = bits - 64;
            ((&self.man >> s as usize), self.exp + s as i64)
        } else {
            (self.man.clone(), self.exp)
        };
        let mf = m.to_f64().unwrap_or(f64::NAN);
        scale_pow2(mf, e)
    }

    /// Largest f64 that is `<= self` (may be `-inf` on overflow).
    pub fn to_f64_down(&self) -> f64 {
        let f = self.to_f64();
        if f.is_finite() && Dyadic::from_f64(f) > *self {
            f.next_down()
        } else if f == f64::INFINITY {
            f64::MAX
        } else {
            f
        }
    }

    /// Smallest f64 that is `>= self` (may be `+inf` on overflow).
    pub fn to_f64_up(&self) -> f64 {
        let f = self.to_f64();
        if f.is_finite() && Dyadic::from_f64(f) < *self {
            f.next_up()
        } else if f == f64::NEG_INFINITY {
            f64::MIN
        } else {
            f
        }
    }

    /// Decomposes a positive value as `f * 2^k` with `f` in `[1, 2)`,
    /// returning bounds `(f_lo, f_hi)` on `f` and `k`.
    pub fn split_pow2(&self) -> (f64, f64, i64) {
        debug_assert!(self.is_positive());
        let k = self.log2_floor();
        let scaled = self.mul_pow2(-k);
        (scaled.to_f64_down(), scaled.to_f64_up(), k)
    }

    /// Certified bounds on `ln(self)` for positive values.
    pub fn ln_bounds(&self) -> (f64, f64) {
        assert!(self.is_positive(), "ln of non-positive dyadic");
        let (flo, fhi, k) = self.split_pow2();
        let kl = k as f64 * std::f64::consts::LN_2;
        let lo = widen_down(flo.ln() + kl);
        let hi = widen_up(fhi.ln() + kl);
        (lo, hi)
    }
}

/// Pads a libm result downward by a few ulps.
pub fn widen_down(v: f64) -> f64 {
    v - (v.abs() * 8.0 * f64::EPSILON + 1e-300)
}

/// Pads a libm result upward by a few ulps.
pub fn widen_up(v: f64) -> f64 {
    v + (v.abs() * 8.0 * f64::EPSILON + 1e-300)
}

fn scale_pow2(mut f: f64, mut e: i64) -> f64 {
    while e > 1000 {
        f *= 2f64.powi(1000);
        e -= 1000;
        if f.is_infinite() {
            return f;
        }
    }
    while e < -1000 {
        f *= 2f64.powi(-1000);
        e += 1000;
        if f == 0.0 {
            return f;
        }
    }
    f * 2f64.powi(e as i32)
}

fn shift_round(man: &BigInt, shift: u64, dir: Round) -> BigInt {
    let divisor = BigInt::one() << shift as usize;
    div_round(man, &divisor, dir)
}

fn div_round(num: &BigInt, den: &BigInt, dir: Round) -> BigInt {
    match dir {
        Round::Down => num.div_floor(den),
        Round::Up => num.div_ceil(den),
        Round::Nearest => {
            let (q, r) = num.div_mod_floor(den);
            if (&r << 1usize) >= den.abs() {
                q + 1
            } else {
                q
            }
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = align(self, other);
        a.cmp(&b)
    }
}

fn align(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt) {
    if a.is_zero() {
        return (BigInt::zero(), b.man.clone());
    }
    if b.is_zero() {
        return (a.man.clone(), BigInt::zero());
    }
    let e = a.exp.min(b.exp);
    (&a.man << (a.exp - e) as usize, &b.man << (b.exp - e) as usize)
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(rhs.exp);
        let (a, b) = align(self, rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { man: &self.man * &rhs.man, exp: self.exp + rhs.exp }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { man: -&self.man, exp: self.exp }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { man: -self.man, exp: self.exp }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_roundtrip_is_exact() {
        for v in [1.0, -0.5, std::f64::consts::PI, 1e-310, 1e300, 0.1] {
            assert_eq!(Dyadic::from_f64(v).to_f64(), v);
        }
    }

    #[test]
    fn directed_division_brackets_one_third() {
        let one = Dyadic::one();
        let three = Dyadic::from_int(3);
        let lo = one.div(&three, 64, Round::Down);
        let hi = one.div(&three, 64, Round::Up);
        assert!(lo < hi);
        let third = BigRational::new(1.into(), 3.into());
        assert!(lo.to_rational() < third && third < hi.to_rational());
    }

    #[test]
    fn sqrt_brackets_two() {
        let two = Dyadic::from_int(2);
        let lo = two.sqrt(100, Round::Down);
        let hi = two.sqrt(100, Round::Up);
        assert!(&lo * &lo < two);
        assert!(&hi * &hi > two);
        assert_eq!(Dyadic::from_int(16).sqrt(10, Round::Up), Dyadic::from_int(4));
    }

    #[test]
    fn floor_and_ceil() {
        let v = Dyadic::new(BigInt::from(-7), -1); // -3.5
        assert_eq!(v.floor(), BigInt::from(-4));
        assert_eq!(v.ceil(), BigInt::from(-3));
    }

    #[test]
    fn ln_bounds_contain_ln2() {
        let (lo, hi) = Dyadic::from_int(2).ln_bounds();
        assert!(lo <= std::f64::consts::LN_2 && std::f64::consts::LN_2 <= hi);
        let big = Dyadic::new(BigInt::one(), 5000);
        let (lo, hi) = big.ln_bounds();
        let want = 5000.0 * std::f64::consts::LN_2;
        assert!(lo <= want && want <= hi);
    }

    #[test]
    fn directed_f64_conversion() {
        let third = Dyadic::one().div(&Dyadic::from_int(3), 200, Round::Nearest);
        assert!(Dyadic::from_f64(third.to_f64_down()) <= third);
        assert!(Dyadic::from_f64(third.to_f64_up()) >= third);
    }
}
