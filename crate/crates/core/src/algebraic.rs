//! Algebraic numbers given by a minimal polynomial and an isolated root.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::roots::isolate;
use crate::numeric::{precision_schedule, ComplexInterval, F64Interval, Poly, RealInterval, START_PRECISION};
use crate::quadratic::{ln_int, QuadElem};

/// How irreducibility of the minimal polynomial was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Irreducibility {
    Verified,
    /// Accepted without proof (degree too large for the built-in tests).
    Asserted,
}

#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    /// Primitive integer coefficients, lowest degree first, positive lead.
    min_poly: Vec<BigInt>,
    root: ComplexInterval,
    irreducibility: Irreducibility,
    exact: Option<QuadElem>,
}

impl AlgebraicNumber {
    pub fn from_rational(r: BigRational) -> Self {
        let q = QuadElem::rational(r);
        Self::from_quadratic(q)
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_quadratic(q: QuadElem) -> Self {
        let root = q.to_interval(START_PRECISION);
        AlgebraicNumber { min_poly: q.minimal_polynomial(), root, irreducibility: Irreducibility::Verified, exact: Some(q) }
    }

    /// Builds from integer coefficients (highest degree first) and an
    /// approximation of the intended root.
    pub fn from_min_poly(coeffs_high_first: &[BigInt], approx: Complex64) -> Result<Self> {
        let low: Vec<BigInt> = coeffs_high_first.iter().rev().cloned().collect();
        let poly = Poly::from_ints(&low);
        if poly.degree() == 0 || poly.is_zero() {
            return Err(Error::InvalidParameters("minimal polynomial must have degree >= 1".into()));
        }
        let ints = poly.primitive_integer();
        let poly = Poly::from_ints(&ints);
        if poly.coeff(0).is_zero() && poly.degree() > 1 {
            return Err(Error::InvalidParameters(format!("{poly} is reducible (root 0)")));
        }
        if poly.degree() == 1 {
            let r = -poly.coeff(0) / poly.coeff(1);
            return Ok(Self::from_rational(r));
        }
        if poly.square_free_decomposition().iter().any(|(_, m)| *m > 1) {
            return Err(Error::InvalidParameters(format!("{poly} has repeated roots")));
        }
        let roots = isolate_refining(&poly)?;
        if let Some(r) = roots.iter().find(|z| z.is_point()) {
            return Err(Error::InvalidParameters(format!("{poly} is reducible (rational root {})", r.re.mid().to_rational())));
        }
        let root = nearest(&roots, approx).clone();
        if poly.degree() == 2 {
            let q = quadratic_root(&ints, &root)
                .ok_or_else(|| Error::InvalidParameters(format!("could not identify the requested root of {poly}")))?;
            return Ok(Self::from_quadratic(q));
        }
        // Without linear factors, degree 3 is irreducible.
        let irreducibility = if poly.degree() == 3 { Irreducibility::Verified } else { Irreducibility::Asserted };
        Ok(AlgebraicNumber { min_poly: ints, root, irreducibility, exact: None })
    }

    /// Wraps root data already certified elsewhere.
    pub fn from_parts(min_poly: Vec<BigInt>, root: ComplexInterval, irreducibility: Irreducibility, exact: Option<QuadElem>) -> Self {
        match exact {
            Some(q) => Self::from_quadratic(q),
            None => AlgebraicNumber { min_poly, root, irreducibility, exact: None },
        }
    }

    /// Parses `7`, `-3/2`, `phi`, `sqrt(N)`, `i`, or `poly:c_d,...,c_0@re[,im]`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || Error::InvalidParameters(format!("cannot parse algebraic number '{text}'"));
        match t {
            "phi" => return Ok(Self::from_quadratic(QuadElem::new(half(), half(), BigInt::from(5)))),
            "i" => return Ok(Self::from_quadratic(QuadElem::new(BigRational::zero(), BigRational::one(), BigInt::from(-1)))),
            _ => {}
        }
        if let Some(inner) = t.strip_prefix("sqrt(").and_then(|s| s.strip_suffix(')')) {
            let n: BigInt = inner.trim().parse().map_err(|_| bad())?;
            return Ok(Self::from_quadratic(QuadElem::new(BigRational::zero(), BigRational::one(), n)));
        }
        if let Some(rest) = t.strip_prefix("poly:") {
            let (cs, at) = rest.split_once('@').ok_or_else(bad)?;
            let coeffs: Vec<BigInt> =
                cs.split(',').map(|c| c.trim().parse::<BigInt>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
            let parts: Vec<f64> =
                at.split(',').map(|c| c.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
            let approx = match parts.as_slice() {
                [re] => Complex64::new(*re, 0.0),
                [re, im] => Complex64::new(*re, *im),
                _ => return Err(bad()),
            };
            return Self::from_min_poly(&coeffs, approx);
        }
        parse_rational(t).map(Self::from_rational).ok_or_else(bad)
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    /// Minimal polynomial, lowest degree first.
    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    pub fn root(&self) -> &ComplexInterval {
        &self.root
    }

    pub fn irreducibility(&self) -> Irreducibility {
        self.irreducibility
    }

    /// Exact representation when the number lies in ℚ or a quadratic field.
    pub fn exact(&self) -> Option<&QuadElem> {
        self.exact.as_ref()
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    pub fn min_poly_string(&self) -> String {
        Poly::from_ints(&self.min_poly).to_string()
    }

    /// All conjugates at the given precision.
    pub fn conjugates(&self, prec: u32) -> Result<Vec<ComplexInterval>> {
        let poly = Poly::from_ints(&self.min_poly);
        if let Some(q) = &self.exact {
            let mut out = vec![q.to_interval(prec)];
            if !q.is_rational() {
                out.push(q.conj().to_interval(prec));
            }
            return Ok(out);
        }
        isolate(&[poly], prec)
            .map(|mut v| v.remove(0))
            .map_err(|_| Error::PrecisionExhausted(format!("isolating conjugates of {}", self.min_poly_string())))
    }

    /// Modulus enclosure of the selected root.
    pub fn modulus(&self, prec: u32) -> RealInterval {
        match &self.exact {
            Some(q) => q.to_interval(prec).abs(prec),
            None => self.root.abs(prec),
        }
    }

    /// Certified bounds on `ln|self|`.
    pub fn ln_abs(&self) -> Result<F64Interval> {
        if let Some(q) = &self.exact {
            if q.is_zero() {
                return Err(Error::Precondition("ln of zero".into()));
            }
            return Ok(q.ln_abs());
        }
        let (lo, hi) = self.modulus(START_PRECISION).ln_bounds().ok_or_else(|| Error::Precondition("ln of zero".into()))?;
        Ok(F64Interval::new(lo, hi))
    }

    /// Approximate value.
    pub fn to_complex64(&self) -> Complex64 {
        let (re, im) = self.root.mid_f64();
        Complex64::new(re, im)
    }

    /// Logarithmic Weil height.
    pub fn log_height(&self) -> Result<F64Interval> {
        if let Some(q) = &self.exact {
            return Ok(q.height());
        }
        let lead = ln_int(self.min_poly.last().unwrap());
        let cap = crate::numeric::precision_cap();
        let mut last = None;
        for prec in precision_schedule(START_PRECISION, cap) {
            let Ok(conj) = self.conjugates(prec) else { continue };
            let mut acc = lead;
            for z in &conj {
                let (lo, hi) = z.abs(prec).ln_max1_bounds();
                acc = acc.add(&F64Interval::new(lo, hi));
            }
            let h = acc.scale(1.0 / self.degree() as f64);
            if h.width() < 1e-13 * h.hi.abs().max(1.0) {
                return Ok(h);
            }
            last = Some(h);
        }
        match last {
            Some(h) if h.width() < 1e-9 => Ok(h),
            _ => Err(Error::PrecisionExhausted(format!("height of {}", self.min_poly_string()))),
        }
    }
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Parses an integer, fraction `p/q`, or terminating decimal.
pub fn parse_rational(t: &str) -> Option<BigRational> {
    let t = t.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Ok(n) = t.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    // decimal literal, optional exponent
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches(['-', '+']);
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{ip}{fp}").parse().ok()?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

fn isolate_refining(poly: &Poly) -> Result<Vec<ComplexInterval>> {
    for prec in precision_schedule(START_PRECISION, crate::numeric::precision_cap()) {
        if let Ok(mut v) = isolate(std::slice::from_ref(poly), prec) {
            return Ok(v.remove(0));
        }
    }
    Err(Error::PrecisionExhausted(format!("isolating roots of {poly}")))
}

fn nearest(roots: &[ComplexInterval], z: Complex64) -> &ComplexInterval {
    roots
        .iter()
        .min_by(|a, b| {
            let da = dist(a, z);
            let db = dist(b, z);
            da.partial_cmp(&db).unwrap()
        })
        .unwrap()
}

fn dist(a: &ComplexInterval, z: Complex64) -> f64 {
    let (re, im) = a.mid_f64();
    (Complex64::new(re, im) - z).norm()
}

/// Identifies which root of `a X^2 + b X + c` (low-first `ints`) the box
/// encloses, as an exact quadratic element.
pub fn quadratic_root(ints: &[BigInt], root: &ComplexInterval) -> Option<QuadElem> {
    let (c, b, a) = (&ints[0], &ints[1], &ints[2]);
    let disc = b * b - BigInt::from(4) * a * c;
    let den = BigInt::from(2) * a;
    let base = BigRational::new(-b.clone(), den.clone());
    let coef = BigRational::new(BigInt::one(), den);
    let plus = QuadElem::new(base.clone(), coef.clone(), disc.clone());
    let minus = QuadElem::new(base, -coef, disc);
    [plus, minus].into_iter().find(|cand| cand.to_interval(128).overlaps(root))
}

/// `ln max(1, |v|)` style helper for integers used in reports.
pub fn int_log_size(v: &BigInt) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    v.abs().to_f64().map(f64::ln).unwrap_or_else(|| ln_int(&v.abs()).mid())
}

/// Reduced fraction check used by the parser tests.
pub fn is_reduced(r: &BigRational) -> bool {
    r.numer().gcd(r.denom()).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(AlgebraicNumber::parse("2").unwrap().degree(), 1);
        let phi = AlgebraicNumber::parse("phi").unwrap();
        assert_eq!(phi.min_poly_string(), "X^2 - X - 1");
        let p = AlgebraicNumber::parse("poly:1,-1,-1@1.6").unwrap();
        assert_eq!(p.exact(), phi.exact());
        let trib = AlgebraicNumber::parse("poly:1,-1,-1,-1@1.8").unwrap();
        assert_eq!(trib.degree(), 3);
        assert_eq!(trib.irreducibility(), Irreducibility::Verified);
        assert!((trib.to_complex64().re - 1.839286755214161).abs() < 1e-12);
        assert!(AlgebraicNumber::parse("poly:1,-3,2@1").is_err());
        assert_eq!(parse_rational("2.5"), Some(BigRational::new(5.into(), 2.into())));
        assert_eq!(parse_rational("1e3"), Some(BigRational::from_integer(1000.into())));
        assert!(is_reduced(&parse_rational("6/4").unwrap()));
    }

    #[test]
    fn heights_match_closed_forms() {
        let h2 = AlgebraicNumber::from_int(2).log_height().unwrap();
        assert!((h2.mid() - 2f64.ln()).abs() < 1e-12);
        let phi = AlgebraicNumber::parse("phi").unwrap().log_height().unwrap();
        assert!((phi.mid() - 0.5 * 1.618033988749895f64.ln()).abs() < 1e-12);
        let r = AlgebraicNumber::parse("3/2").unwrap().log_height().unwrap();
        assert!((r.mid() - 3f64.ln()).abs() < 1e-12);
        // the generic path agrees with the closed form on the tribonacci constant
        let trib = AlgebraicNumber::parse("poly:1,-1,-1,-1@1.8").unwrap();
        let h = trib.log_height().unwrap();
        assert!((h.mid() - 1.839286755214161f64.ln() / 3.0).abs() < 1e-12);
    }
}
