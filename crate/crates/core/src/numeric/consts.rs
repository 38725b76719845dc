//! Certified enclosures of π and e at arbitrary precision.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::dyadic::Dyadic;
use super::interval::RealInterval;

/// Fixed-point enclosure: value in `[(s - err) / 2^w, (s + err) / 2^w]`.
fn fixed_to_interval(s: BigInt, err: BigInt, w: u32, prec: u32) -> RealInterval {
    let lo = Dyadic::new(&s - &err, -(w as i64));
    let hi = Dyadic::new(&s + &err, -(w as i64));
    RealInterval::new(lo, hi).round(prec)
}

/// `arctan(1/x)` scaled by `2^w`, with the accumulated error in units.
fn arctan_inv(x: u64, w: u32) -> (BigInt, BigInt) {
    let one = BigInt::one() << w as usize;
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut power = &one / BigInt::from(x); // 2^w / x^(2k+1)
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    let mut terms: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += &term;
        } else {
            sum -= &term;
        }
        power /= &x2;
        k += 1;
        terms += 1;
    }
    // each truncating division loses < 1 unit, twice per term, plus the tail
    (sum, BigInt::from(2 * terms + 2))
}

/// π enclosed at `prec` bits.
pub fn pi(prec: u32) -> RealInterval {
    let w = prec + 64;
    let (a, ea) = arctan_inv(5, w);
    let (b, eb) = arctan_inv(239, w);
    let s = BigInt::from(16) * a - BigInt::from(4) * b;
    let err = BigInt::from(16) * ea + BigInt::from(4) * eb;
    fixed_to_interval(s, err, w, prec)
}

/// e enclosed at `prec` bits.
pub fn e(prec: u32) -> RealInterval {
    let w = prec + 64;
    let one = BigInt::one() << w as usize;
    let mut term = one.clone();
    let mut sum = one;
    let mut k: u64 = 1;
    while !term.is_zero() {
        term /= BigInt::from(k);
        sum += &term;
        k += 1;
    }
    // truncation per term plus the remaining tail (bounded by the last term)
    let err = BigInt::from(k + 2);
    fixed_to_interval(sum, err, w, prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_matches_f64() {
        let p = pi(200);
        assert!(p.lo_f64() <= std::f64::consts::PI && std::f64::consts::PI <= p.hi_f64());
        assert!(p.rad_f64() < 1e-55);
    }

    #[test]
    fn e_matches_f64() {
        let v = e(200);
        assert!(v.lo_f64() <= std::f64::consts::E && std::f64::consts::E <= v.hi_f64());
        assert!(v.rad_f64() < 1e-55);
    }

    #[test]
    fn refinement_is_nested() {
        let coarse = pi(64);
        let fine = pi(512);
        assert!(fine.subset_of(&coarse));
    }
}
