//! Logarithmic heights and empirical probes of the height inequalities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebraic::AlgebraicNumber;
use crate::error::{Error, Result};
use crate::numeric::F64Interval;
use crate::quadratic::{rational_height, QuadElem};
use crate::spectral::{multiplicative_independence, Independence};

/// `h(γ) = (log a_d + Σ log max(1, |γ_i|)) / d`.
pub fn log_height(gamma: &AlgebraicNumber) -> Result<F64Interval> {
    gamma.log_height()
}

/// `h(p/q) = log max(|r|, |s|)` for the reduced fraction `r/s = p/q`.
pub fn rational_quotient_height(p: &BigRational, q: &BigRational) -> Result<f64> {
    if q.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(height_value(&QuadElem::rational(p / q)))
}

/// Best f64 value of an exact height.
pub fn height_value(q: &QuadElem) -> f64 {
    if let Some(r) = q.as_rational() {
        if r.is_zero() {
            return 0.0;
        }
        let m = r.numer().abs().max(r.denom().clone());
        if let Some(v) = m.to_u64().filter(|&v| v < (1u64 << 53)) {
            return (v as f64).ln();
        }
        return rational_height(r).mid();
    }
    q.height().mid()
}

/// Evaluates `Σ c_j X^j` at an integer.
pub fn eval_exact_poly(coeffs: &[QuadElem], x: u64) -> Option<QuadElem> {
    let xv = QuadElem::from_int(x);
    coeffs.iter().rev().try_fold(QuadElem::zero(), |acc, c| acc.mul(&xv)?.add(c))
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub n: u64,
    pub m: u64,
    pub height: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeightProbe {
    /// Empirical `min h(α^n/β^m) / max(n, m)` over the grid.
    pub c0_emp: f64,
    /// Empirical `max h(p(n)/q(m)) / log max(n, m)` over `n, m >= 2`.
    pub c_emp: Option<f64>,
    pub range_bound: u64,
    pub rows: Vec<ProbeRow>,
    pub label: &'static str,
}

/// Samples both height inequalities over `1 <= n, m <= range_bound`.
/// `coefficients` are exact Binet coefficient polynomials `(p, q)`.
pub fn height_constant_probe(
    alpha: &AlgebraicNumber,
    beta: &AlgebraicNumber,
    range_bound: u64,
    coefficients: Option<(&[QuadElem], &[QuadElem])>,
) -> Result<HeightProbe> {
    if range_bound == 0 {
        return Err(Error::InvalidParameters("range bound must be positive".into()));
    }
    if let Ok(Independence::Dependent { n, m }) = multiplicative_independence(alpha, beta) {
        return Err(Error::Precondition(format!("α^{n} = β^{m}: the numbers are multiplicatively dependent")));
    }
    let (Some(a), Some(b)) = (alpha.exact(), beta.exact()) else {
        return Err(Error::UnsupportedDegree("exact compound heights need degree <= 2".into()));
    };
    if a.common_radicand(b).is_none() {
        return Err(Error::UnsupportedDegree("numbers lie in different quadratic fields".into()));
    }
    let pairs: Vec<(u64, u64)> = (1..=range_bound).flat_map(|n| (1..=range_bound).map(move |m| (n, m))).collect();
    let rows: Vec<ProbeRow> = pairs
        .par_iter()
        .map(|&(n, m)| {
            let g = a.pow(n).div(&b.pow(m)).expect("same field");
            let height = height_value(&g);
            ProbeRow { n, m, height, ratio: height / n.max(m) as f64 }
        })
        .collect();
    let c0_emp = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let c_emp = match coefficients {
        Some((p, q)) => Some(coefficient_height_constant(p, q, range_bound)?),
        None => None,
    };
    Ok(HeightProbe { c0_emp, c_emp, range_bound, rows, label: "empirical" })
}

fn coefficient_height_constant(p: &[QuadElem], q: &[QuadElem], range_bound: u64) -> Result<f64> {
    let unsupported = || Error::UnsupportedDegree("coefficient polynomials lie in different fields".into());
    let mut best = 0.0f64;
    for n in 2..=range_bound.max(2) {
        let pn = eval_exact_poly(p, n).ok_or_else(unsupported)?;
        for m in 2..=range_bound.max(2) {
            let qm = eval_exact_poly(q, m).ok_or_else(unsupported)?;
            if qm.is_zero() {
                continue;
            }
            let v = pn.div(&qm).ok_or_else(unsupported)?;
            best = best.max(height_value(&v) / (n.max(m) as f64).ln());
        }
    }
    Ok(best)
}

/// `h` of a nonzero rational given as integers, for quick checks.
pub fn int_ratio_height(p: i64, q: i64) -> Result<f64> {
    rational_quotient_height(&BigRational::from_integer(BigInt::from(p)), &BigRational::from_integer(BigInt::from(q)))
}

/// Height of one.
pub fn height_of_one() -> f64 {
    height_value(&QuadElem::rational(BigRational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_heights() {
        assert!((int_ratio_height(6, 4).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!((int_ratio_height(5, 1).unwrap() - 5f64.ln()).abs() < 1e-15);
        assert_eq!(int_ratio_height(0, 7).unwrap(), 0.0);
        assert!(matches!(int_ratio_height(1, 0), Err(Error::DivisionByZero)));
        assert_eq!(height_of_one(), 0.0);
    }

    #[test]
    fn probe_two_three() {
        let p = height_constant_probe(&AlgebraicNumber::from_int(2), &AlgebraicNumber::from_int(3), 10, None).unwrap();
        assert_eq!(p.c0_emp, 2f64.ln());
        assert_eq!(p.rows.len(), 100);
    }

    #[test]
    fn probe_rejects_dependent_pairs() {
        let two = AlgebraicNumber::from_int(2);
        assert!(matches!(height_constant_probe(&two, &two, 5, None), Err(Error::Precondition(_))));
    }

    #[test]
    fn probe_golden_ratio_against_two() {
        let phi = AlgebraicNumber::parse("phi").unwrap();
        let two = AlgebraicNumber::from_int(2);
        let inv_sqrt5 = QuadElem::new(BigRational::zero(), BigRational::new(1.into(), 5.into()), 5.into());
        let p = height_constant_probe(&phi, &two, 5, Some((&[inv_sqrt5], &[QuadElem::one()]))).unwrap();
        assert!(p.c0_emp > 0.0);
        // h(1/√5) / log 2, attained at n = m = 2
        assert!((p.c_emp.unwrap() - 0.5 * 5f64.ln() / 2f64.ln()).abs() < 1e-12);
    }
}
