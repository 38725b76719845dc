//! Certified isolation of the complex roots of square-free polynomials.
//!
//! Approximations come from an f64 Aberth iteration and are polished
//! with Newton steps in dyadic arithmetic. Each approximation `z` of a
//! root of a degree-`d` polynomial `p` yields the inclusion disc
//! `|w - z| <= d |p(z)| / |p'(z)|`, which always contains a root. When the
//! enclosing boxes of all roots of all input polynomials are pairwise
//! disjoint, every box holds exactly one root. A box whose center is
//! real and which is disjoint from the others holds a real root, since
//! the root's conjugate lies in the same box.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::complex::ComplexInterval;
use super::dyadic::{Dyadic, Round};
use super::interval::RealInterval;
use super::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsolationFailure {
    /// Boxes overlap or a derivative could not be bounded away from zero.
    Unresolved,
}

/// Roots of each input polynomial, in input order.
pub fn isolate(polys: &[Poly], prec: u32) -> Result<Vec<Vec<ComplexInterval>>, IsolationFailure> {
    let mut out: Vec<Vec<ComplexInterval>> = Vec::with_capacity(polys.len());
    for p in polys {
        out.push(isolate_one(p, prec)?);
    }
    let all: Vec<&ComplexInterval> = out.iter().flatten().collect();
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            if all[i].overlaps(all[j]) {
                return Err(IsolationFailure::Unresolved);
            }
        }
    }
    Ok(out)
}

fn isolate_one(p: &Poly, prec: u32) -> Result<Vec<ComplexInterval>, IsolationFailure> {
    let d = p.degree();
    if d == 0 {
        return Ok(vec![]);
    }
    let ints = p.primitive_integer();
    let dp = Poly::from_ints(&ints).derivative();
    let ip = Poly::from_ints(&ints);
    let approx = aberth(&ints);
    let work = prec + 32;
    let mut boxes: Vec<ComplexInterval> = Vec::with_capacity(d);
    let mut pending: Vec<(Complex64, Option<ComplexInterval>)> = Vec::with_capacity(d);

    for z0 in approx {
        // Exact rational roots first.
        if let Some(r) = rational_root_near(&ip, &ints, z0) {
            let iv = RealInterval::from_rational(&r, prec);
            pending.push((z0, Some(ComplexInterval::real(iv))));
            continue;
        }
        pending.push((z0, None));
    }

    for (z0, exact) in &pending {
        if let Some(b) = exact {
            boxes.push(b.clone());
            continue;
        }
        let tol = 1e-6 * z0.norm().max(1.0);
        let mut chosen = None;
        if z0.im.abs() < tol {
            let x = newton_real(&ip, &dp, Dyadic::from_f64(z0.re), work, prec);
            if let Some(b) = inclusion_box(&ip, &dp, d, &x, &Dyadic::zero(), prec) {
                chosen = Some(b);
            }
        }
        if chosen.is_none() {
            let (re, im) = newton_complex(&ip, &dp, Dyadic::from_f64(z0.re), Dyadic::from_f64(z0.im), work, prec);
            chosen = inclusion_box(&ip, &dp, d, &re, &im, prec);
        }
        boxes.push(chosen.ok_or(IsolationFailure::Unresolved)?);
    }

    // A real snap that swallowed a conjugate pair shows up as an overlap;
    // redo those with complex centers.
    for i in 0..boxes.len() {
        let clash = (0..boxes.len()).any(|j| j != i && boxes[i].overlaps(&boxes[j]));
        if clash && boxes[i].is_real() && pending[i].1.is_none() {
            let z0 = pending[i].0;
            let (re, im) = newton_complex(&ip, &dp, Dyadic::from_f64(z0.re), Dyadic::from_f64(z0.im), work, prec);
            if let Some(b) = inclusion_box(&ip, &dp, d, &re, &im, prec) {
                boxes[i] = b;
            }
        }
    }
    Ok(boxes)
}

fn rational_root_near(p: &Poly, ints: &[BigInt], z: Complex64) -> Option<BigRational> {
    if z.im.abs() > 1e-6 * z.norm().max(1.0) || !z.re.is_finite() {
        return None;
    }
    let lead = ints.last()?.abs();
    let lead_u = lead.to_u64().filter(|&v| v <= 1_000_000)?;
    for q in 1..=lead_u {
        if lead_u % q != 0 {
            continue;
        }
        let num = (z.re * q as f64).round();
        if !num.is_finite() {
            continue;
        }
        let cand = BigRational::new(BigInt::from(num as i128), BigInt::from(q));
        if p.eval_rational(&cand).is_zero() {
            return Some(cand);
        }
    }
    None
}

/// Disc radius `d |p(z)| / |p'(z)|` turned into a box around `z`.
fn inclusion_box(p: &Poly, dp: &Poly, d: usize, re: &Dyadic, im: &Dyadic, prec: u32) -> Option<ComplexInterval> {
    let zc = ComplexInterval::new(RealInterval::point(re.clone()), RealInterval::point(im.clone()));
    let pv = p.eval_interval(&zc, prec + 64);
    let dv = dp.eval_interval(&zc, prec + 64);
    let num = pv.norm_sqr(prec + 64);
    let den = dv.norm_sqr(prec + 64);
    if !den.is_positive() {
        return None;
    }
    // r^2 <= d^2 |p|^2 / |p'|^2
    let d2 = Dyadic::from_int((d * d) as u64);
    let r2 = (&d2 * num.hi()).div(den.lo(), 64, Round::Up);
    let r = r2.sqrt(64, Round::Up);
    if im.is_zero() {
        Some(ComplexInterval::real(RealInterval::from_mid_rad(re, &r)))
    } else {
        Some(ComplexInterval::from_center(re, im, &r))
    }
}

fn eval_point(p: &Poly, re: &Dyadic, im: &Dyadic, work: u32) -> (Dyadic, Dyadic) {
    let mut ar = Dyadic::zero();
    let mut ai = Dyadic::zero();
    for c in p.coeffs().iter().rev() {
        let c = Dyadic::from_int(c.to_integer());
        let nr = &(&ar * re) - &(&ai * im);
        let ni = &(&ar * im) + &(&ai * re);
        ar = (&nr + &c).round(work, Round::Nearest);
        ai = ni.round(work, Round::Nearest);
    }
    (ar, ai)
}

fn newton_complex(p: &Poly, dp: &Poly, mut re: Dyadic, mut im: Dyadic, work: u32, prec: u32) -> (Dyadic, Dyadic) {
    for _ in 0..200 {
        let (pr, pi) = eval_point(p, &re, &im, work);
        let (dr, di) = eval_point(dp, &re, &im, work);
        let den = (&(&dr * &dr) + &(&di * &di)).round(work, Round::Nearest);
        if den.is_zero() {
            break;
        }
        let nr = &(&pr * &dr) + &(&pi * &di);
        let ni = &(&pi * &dr) - &(&pr * &di);
        let sr = nr.div(&den, work, Round::Nearest);
        let si = ni.div(&den, work, Round::Nearest);
        re = (&re - &sr).round(work, Round::Nearest);
        im = (&im - &si).round(work, Round::Nearest);
        if small_step(&sr, &si, &re, &im, prec) {
            break;
        }
    }
    (re.round(prec + 8, Round::Nearest), im.round(prec + 8, Round::Nearest))
}

fn newton_real(p: &Poly, dp: &Poly, mut x: Dyadic, work: u32, prec: u32) -> Dyadic {
    let zero = Dyadic::zero();
    for _ in 0..200 {
        let (pv, _) = eval_point(p, &x, &zero, work);
        let (dv, _) = eval_point(dp, &x, &zero, work);
        if dv.is_zero() {
            break;
        }
        let s = pv.div(&dv, work, Round::Nearest);
        x = (&x - &s).round(work, Round::Nearest);
        if small_step(&s, &zero, &x, &zero, prec) {
            break;
        }
    }
    x.round(prec + 8, Round::Nearest)
}

fn small_step(sr: &Dyadic, si: &Dyadic, re: &Dyadic, im: &Dyadic, prec: u32) -> bool {
    let step = sr.abs().max(si.abs());
    if step.is_zero() {
        return true;
    }
    let scale = re.abs().max(im.abs());
    let scale_log = if scale.is_zero() { 0 } else { scale.log2_floor() };
    step.log2_floor() < scale_log - prec as i64 - 4
}

/// Simultaneous Aberth–Ehrlich iteration in f64.
pub fn aberth(ints: &[BigInt]) -> Vec<Complex64> {
    let d = ints.len() - 1;
    let lead = ints[d].to_f64().unwrap_or(f64::MAX);
    let c: Vec<f64> = ints.iter().map(|v| v.to_f64().unwrap_or(f64::MAX) / lead).collect();
    if d == 1 {
        return vec![Complex64::new(-c[0], 0.0)];
    }
    let radius = 1.0 + c[..d].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64 + 0.4;
            Complex64::from_polar(radius * 0.9, t)
        })
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut pv = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for coef in c.iter().rev() {
            dv = dv * x + pv;
            pv = pv * x + coef;
        }
        (pv, dv)
    };
    for _ in 0..1000 {
        let mut max_step: f64 = 0.0;
        for k in 0..d {
            let (pv, dv) = eval(z[k]);
            if pv.norm() == 0.0 {
                continue;
            }
            let w = pv / dv;
            let s: Complex64 = (0..d).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = w / (1.0 - w * s);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

/// Reduces a rational's integer part for reporting.
pub fn floor_rational(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_roots() {
        let f = Poly::from_ints(&[-1, -1, 1]);
        let roots = isolate(&[f], 128).unwrap().remove(0);
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.is_real()));
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(roots.iter().any(|r| (r.re.mid_f64() - phi).abs() < 1e-15));
    }

    #[test]
    fn integer_roots_are_exact_points() {
        let f = Poly::from_ints(&[-2, 1]);
        let roots = isolate(&[f], 128).unwrap().remove(0);
        assert!(roots[0].is_point());
        assert!(roots[0].re.contains_int(&BigInt::from(2)));
    }

    #[test]
    fn rational_roots_of_non_monic() {
        let f = Poly::from_ints(&[-3, 2]);
        let roots = isolate(&[f], 128).unwrap().remove(0);
        assert!(roots[0].re.mid_f64() == 1.5);
    }

    #[test]
    fn complex_pair_of_tribonacci() {
        let f = Poly::from_ints(&[-1, -1, -1, 1]);
        let roots = isolate(&[f], 200).unwrap().remove(0);
        let real: Vec<_> = roots.iter().filter(|r| r.is_real()).collect();
        assert_eq!(real.len(), 1);
        assert!((real[0].re.mid_f64() - 1.839286755214161).abs() < 1e-14);
        assert_eq!(roots.iter().filter(|r| !r.is_real()).count(), 2);
    }

    #[test]
    fn unit_circle_roots() {
        let f = Poly::from_ints(&[1, 0, 1]);
        let roots = isolate(&[f], 128).unwrap().remove(0);
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert!(r.abs(128).contains(&Dyadic::one()));
        }
    }

    #[test]
    fn boxes_tighten_with_precision() {
        let f = Poly::from_ints(&[-1, -1, 1]);
        let lo = isolate(std::slice::from_ref(&f), 64).unwrap().remove(0);
        let hi = isolate(&[f], 512).unwrap().remove(0);
        for h in &hi {
            assert!(lo.iter().any(|l| h.subset_of(l)));
        }
    }
}
