//! Dense univariate polynomials over ℚ, stored lowest degree first.
//!
//! Only the exact operations the spectral analysis needs: division,
//! gcd, square-free decomposition and coprime refinement.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::complex::ComplexInterval;
use super::interval::RealInterval;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    /// Builds from coefficients, lowest degree first; trailing zeros dropped.
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints<T: Into<BigInt> + Clone>(coeffs: &[T]) -> Self {
        Poly::new(coeffs.iter().cloned().map(|c| BigRational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::from_ints(&[1])
    }

    /// `X - r`.
    pub fn linear_root(r: BigRational) -> Self {
        Poly::new(vec![-r, BigRational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn lead(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead();
        Poly::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    /// Scales to a primitive integer polynomial with positive leading
    /// coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let den = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &den).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    pub fn derivative(&self) -> Self {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division `self = q * d + r`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let dl = d.lead();
        if self.coeffs.len() < d.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); self.coeffs.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Exact quotient; `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Horner evaluation in interval arithmetic.
    pub fn eval_interval(&self, z: &ComplexInterval, prec: u32) -> ComplexInterval {
        let mut acc = ComplexInterval::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z, prec).add(&ComplexInterval::real(RealInterval::from_rational(c, prec)), prec);
        }
        acc
    }

    /// Yun's square-free decomposition: pairs `(s_i, i)` with
    /// `monic(self) = Π s_i^i`, each `s_i` square-free and pairwise coprime.
    pub fn square_free_decomposition(&self) -> Vec<(Poly, usize)> {
        let f = self.monic();
        if f.degree() == 0 {
            return vec![];
        }
        let mut out = Vec::new();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.exact_div(&a0).unwrap();
        let mut c = fp.exact_div(&a0).unwrap().sub(&b.derivative());
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&c);
            b = b.exact_div(&a).unwrap();
            c = c.exact_div(&a).unwrap().sub(&b.derivative());
            if a.degree() > 0 {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("X")?,
                _ => write!(f, "X^{i}")?,
            }
        }
        Ok(())
    }
}

/// Renders an integer polynomial given highest degree first.
pub fn format_int_poly_high_first(coeffs_high_first: &[BigInt]) -> String {
    let low_first: Vec<BigInt> = coeffs_high_first.iter().rev().cloned().collect();
    Poly::from_ints(&low_first).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_ints(c)
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (X-1)(X-2) and (X-1)(X+3)
        let a = p(&[2, -3, 1]);
        let b = p(&[-3, 2, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
    }

    #[test]
    fn yun_recovers_multiplicities() {
        // (X-2)^2 (X^2 - X - 1)
        let f = p(&[-2, 1]).pow(2).mul(&p(&[-1, -1, 1]));
        let sf = f.square_free_decomposition();
        assert_eq!(sf.len(), 2);
        assert_eq!(sf[0], (p(&[-1, -1, 1]), 1));
        assert_eq!(sf[1], (p(&[-2, 1]), 2));
    }

    #[test]
    fn primitive_integer_scaling() {
        let f = Poly::new(vec![BigRational::new((-3).into(), 2.into()), BigRational::one()]);
        assert_eq!(f.primitive_integer(), vec![BigInt::from(-3), BigInt::from(2)]);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(p(&[-1, -1, 1]).to_string(), "X^2 - X - 1");
        assert_eq!(p(&[0, 2]).to_string(), "2X");
    }
}
