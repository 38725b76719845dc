//! Integer linear recurrence sequences with exact big-integer terms.

use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Poly;

/// `U_{n+k} = c_1 U_{n+k-1} + ... + c_k U_n` with given `U_0..U_{k-1}`.
///
/// Terms are memoized in a cache shared between clones; the cache is behind
/// a lock so concurrent `term` calls are safe.
#[derive(Clone)]
pub struct LinearRecurrence {
    name: String,
    coefficients: Vec<BigInt>,
    initial_terms: Vec<BigInt>,
    cache: Arc<RwLock<Vec<BigInt>>>,
}

impl PartialEq for LinearRecurrence {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.coefficients == other.coefficients && self.initial_terms == other.initial_terms
    }
}

impl Eq for LinearRecurrence {}

impl fmt::Debug for LinearRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearRecurrence")
            .field("name", &self.name)
            .field("coefficients", &self.coefficients)
            .field("initial_terms", &self.initial_terms)
            .finish()
    }
}

/// On-disk form of a sequence definition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceConfig {
    pub name: String,
    pub coefficients: Vec<i64>,
    pub initial_terms: Vec<i64>,
}

impl LinearRecurrence {
    pub fn new<C, I>(name: impl Into<String>, coefficients: C, initial_terms: I) -> Result<Self>
    where
        C: IntoIterator,
        C::Item: Into<BigInt>,
        I: IntoIterator,
        I::Item: Into<BigInt>,
    {
        let coefficients: Vec<BigInt> = coefficients.into_iter().map(Into::into).collect();
        let initial_terms: Vec<BigInt> = initial_terms.into_iter().map(Into::into).collect();
        if coefficients.is_empty() {
            return Err(Error::InvalidRecurrence("order must be at least 1".into()));
        }
        if coefficients.len() != initial_terms.len() {
            return Err(Error::InvalidRecurrence(format!("{} coefficients but {} initial terms", coefficients.len(), initial_terms.len())));
        }
        if coefficients.last().unwrap().is_zero() {
            return Err(Error::InvalidRecurrence("last coefficient c_k must be nonzero".into()));
        }
        let cache = Arc::new(RwLock::new(initial_terms.clone()));
        Ok(LinearRecurrence { name: name.into(), coefficients, initial_terms, cache })
    }

    pub fn fibonacci() -> Self {
        Self::new("fib", [1, 1], [0, 1]).unwrap()
    }

    pub fn lucas() -> Self {
        Self::new("lucas", [1, 1], [2, 1]).unwrap()
    }

    pub fn powers_of(base: i64) -> Self {
        Self::new(format!("pow{base}"), [base], [1]).unwrap()
    }

    pub fn tribonacci() -> Self {
        Self::new("tribonacci", [1, 1, 1], [0, 0, 1]).unwrap()
    }

    /// Built-in sequences accepted wherever a config path is expected.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "fib" => Some(Self::fibonacci()),
            "lucas" => Some(Self::lucas()),
            "pow2" => Some(Self::powers_of(2)),
            "pow3" => Some(Self::powers_of(3)),
            "tribonacci" => Some(Self::tribonacci()),
            _ => None,
        }
    }

    pub const BUILTIN_NAMES: [&'static str; 5] = ["fib", "lucas", "pow2", "pow3", "tribonacci"];

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn initial_terms(&self) -> &[BigInt] {
        &self.initial_terms
    }

    /// Exact `U_n`.
    pub fn term(&self, n: usize) -> BigInt {
        if let Some(v) = self.cache.read().unwrap().get(n) {
            return v.clone();
        }
        self.extend_cache(n);
        self.cache.read().unwrap()[n].clone()
    }

    /// `[(0, U_0), ..., (n_max, U_{n_max})]`.
    pub fn terms_up_to_index(&self, n_max: usize) -> Vec<(usize, BigInt)> {
        self.extend_cache(n_max);
        let cache = self.cache.read().unwrap();
        cache[..=n_max].iter().cloned().enumerate().collect()
    }

    /// The values `U_0..=U_{n_max}` without indices.
    pub fn values(&self, n_max: usize) -> Vec<BigInt> {
        self.extend_cache(n_max);
        self.cache.read().unwrap()[..=n_max].to_vec()
    }

    fn extend_cache(&self, n: usize) {
        let mut cache = self.cache.write().unwrap();
        let k = self.order();
        while cache.len() <= n {
            let len = cache.len();
            let next = self.coefficients.iter().enumerate().fold(BigInt::zero(), |acc, (i, c)| acc + c * &cache[len - 1 - i]);
            cache.push(next);
            debug_assert!(cache.len() > k);
        }
    }

    /// `X^k - c_1 X^{k-1} - ... - c_k`.
    pub fn characteristic_polynomial(&self) -> Poly {
        let k = self.order();
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = BigRational::one();
        for (i, c) in self.coefficients.iter().enumerate() {
            coeffs[k - 1 - i] = -BigRational::from_integer(c.clone());
        }
        Poly::new(coeffs)
    }

    /// Characteristic polynomial of the shortest recurrence the sequence
    /// satisfies, found by Berlekamp–Massey over ℚ on the first `2k` terms.
    /// It divides the characteristic polynomial; its roots are exactly those
    /// with a nonzero Binet coefficient.
    pub fn minimal_polynomial(&self) -> Poly {
        let k = self.order();
        let s: Vec<BigRational> = self.values(2 * k - 1).into_iter().map(BigRational::from_integer).collect();
        let mut c = vec![BigRational::one()];
        let mut b = vec![BigRational::one()];
        let mut l = 0usize;
        let mut m = 1usize;
        let mut bd = BigRational::one();
        for n in 0..s.len() {
            let mut d = s[n].clone();
            for i in 1..=l.min(c.len() - 1) {
                d += &c[i] * &s[n - i];
            }
            if d.is_zero() {
                m += 1;
                continue;
            }
            let coef = &d / &bd;
            let mut next = c.clone();
            if next.len() < b.len() + m {
                next.resize(b.len() + m, BigRational::zero());
            }
            for (i, bi) in b.iter().enumerate() {
                next[i + m] -= &coef * bi;
            }
            if 2 * l <= n {
                b = c;
                l = n + 1 - l;
                bd = d;
                m = 1;
            } else {
                m += 1;
            }
            c = next;
        }
        c.resize(l + 1, BigRational::zero());
        // connection polynomial 1 + c_1 x + ... + c_L x^L  ->  X^L + c_1 X^{L-1} + ... + c_L
        let g = Poly::new(c.into_iter().rev().collect());
        if g.degree() == l && (l == 0 || !g.coeff(0).is_zero()) && self.characteristic_polynomial().exact_div(&g).is_some() {
            g
        } else {
            self.characteristic_polynomial()
        }
    }

    pub fn to_config(&self) -> Result<SequenceConfig> {
        let conv = |v: &BigInt| i64::try_from(v).map_err(|_| Error::MalformedConfig(format!("{v} does not fit a 64-bit integer")));
        Ok(SequenceConfig {
            name: self.name.clone(),
            coefficients: self.coefficients.iter().map(conv).collect::<Result<_>>()?,
            initial_terms: self.initial_terms.iter().map(conv).collect::<Result<_>>()?,
        })
    }

    /// Serializes to the TOML config format.
    pub fn to_config_string(&self) -> Result<String> {
        toml::to_string(&self.to_config()?).map_err(|e| Error::MalformedConfig(e.to_string()))
    }
}

impl TryFrom<SequenceConfig> for LinearRecurrence {
    type Error = Error;
    fn try_from(cfg: SequenceConfig) -> Result<Self> {
        LinearRecurrence::new(cfg.name, cfg.coefficients, cfg.initial_terms)
    }
}

/// Parses a TOML document with exactly the fields `name`, `coefficients`
/// and `initial_terms`.
pub fn parse_sequence_config(document: &str) -> Result<LinearRecurrence> {
    let cfg: SequenceConfig = toml::from_str(document).map_err(|e| Error::MalformedConfig(e.message().to_string()))?;
    LinearRecurrence::try_from(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle_terms(coeffs: &[i64], init: &[i64], n: usize) -> Vec<BigInt> {
        let mut v: Vec<BigInt> = init.iter().map(|&x| BigInt::from(x)).collect();
        while v.len() <= n {
            let len = v.len();
            let next: BigInt = coeffs.iter().enumerate().map(|(i, &c)| BigInt::from(c) * &v[len - 1 - i]).sum();
            v.push(next);
        }
        v
    }

    #[test]
    fn term_examples() {
        assert_eq!(LinearRecurrence::fibonacci().term(10), BigInt::from(55));
        assert_eq!(LinearRecurrence::powers_of(2).term(5), BigInt::from(32));
        let n2n = LinearRecurrence::new("n2n", [4, -4], [0, 2]).unwrap();
        assert_eq!(n2n.term(4), BigInt::from(64));
        assert_eq!(oracle_terms(&[1, 1], &[0, 1], 10)[10], BigInt::from(55));
    }

    #[test]
    fn terms_up_to_index_examples() {
        let fib: Vec<(usize, BigInt)> = LinearRecurrence::fibonacci().terms_up_to_index(5);
        let want: Vec<(usize, BigInt)> = [0, 1, 1, 2, 3, 5].iter().enumerate().map(|(i, &v)| (i, BigInt::from(v))).collect();
        assert_eq!(fib, want);
        let p2 = LinearRecurrence::powers_of(2);
        assert_eq!(p2.terms_up_to_index(0), vec![(0, BigInt::from(1))]);
        assert_eq!(p2.terms_up_to_index(3).len(), 4);
        assert_eq!(p2.terms_up_to_index(3)[3].1, BigInt::from(8));
    }

    #[test]
    fn initial_terms_returned_unchanged() {
        let s = LinearRecurrence::new("odd", [3, 0, -7], [5, -2, 11]).unwrap();
        assert_eq!(s.term(0), BigInt::from(5));
        assert_eq!(s.term(1), BigInt::from(-2));
        assert_eq!(s.term(2), BigInt::from(11));
    }

    #[test]
    fn parse_examples() {
        let fib = parse_sequence_config("name = \"fib\"\ncoefficients = [1, 1]\ninitial_terms = [0, 1]\n").unwrap();
        assert_eq!(fib.term(10), BigInt::from(55));
        let bad = parse_sequence_config("name = \"bad\"\ncoefficients = [1, 0]\ninitial_terms = [0, 1]\n");
        assert!(matches!(bad, Err(Error::InvalidRecurrence(_))));
        let pow2 = parse_sequence_config("name = \"pow2\"\ncoefficients = [2]\ninitial_terms = [1]\n").unwrap();
        assert_eq!(pow2.term(5), BigInt::from(32));
    }

    #[test]
    fn parse_rejects_shape_errors() {
        let missing = parse_sequence_config("name = \"x\"\ncoefficients = [1]\n");
        assert!(matches!(missing, Err(Error::MalformedConfig(_))));
        let extra = parse_sequence_config("name = \"x\"\ncoefficients = [1]\ninitial_terms = [1]\nextra = 3\n");
        assert!(matches!(extra, Err(Error::MalformedConfig(_))));
        let mismatch = parse_sequence_config("name = \"x\"\ncoefficients = [1, 1]\ninitial_terms = [1]\n");
        assert!(matches!(mismatch, Err(Error::InvalidRecurrence(_))));
        let empty = parse_sequence_config("name = \"x\"\ncoefficients = []\ninitial_terms = []\n");
        assert!(matches!(empty, Err(Error::InvalidRecurrence(_))));
    }

    #[test]
    fn minimal_polynomial_drops_vanishing_roots() {
        // 2^n written with the recurrence U_{n+2} = 4 U_n
        let s = LinearRecurrence::new("p2", [0, 4], [1, 2]).unwrap();
        assert_eq!(s.minimal_polynomial(), Poly::from_ints(&[-2, 1]));
        // Fibonacci is already minimal
        assert_eq!(LinearRecurrence::fibonacci().minimal_polynomial(), Poly::from_ints(&[-1, -1, 1]));
        // the zero sequence
        let z = LinearRecurrence::new("zero", [1, 1], [0, 0]).unwrap();
        assert_eq!(z.minimal_polynomial().degree(), 0);
    }

    #[test]
    fn concurrent_terms_agree() {
        let fib = LinearRecurrence::fibonacci();
        let handles: Vec<_> = (0..4)
            .map(|t| {
                let f = fib.clone();
                std::thread::spawn(move || f.term(300 + t))
            })
            .collect();
        let got: Vec<BigInt> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        let want = oracle_terms(&[1, 1], &[0, 1], 303);
        for (t, v) in got.iter().enumerate() {
            assert_eq!(v, &want[300 + t]);
        }
    }
}
