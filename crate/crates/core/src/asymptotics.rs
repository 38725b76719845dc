//! Main term, the explicit lower-bound grid, ratio tables and randomized
//! checks of the two auxiliary inequalities.

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{brute_force_oracle, count_t_s_with, CountResult};
use crate::error::{Error, Result};
use crate::matveev::mlogm_threshold;
use crate::recurrence::LinearRecurrence;
use crate::spectral::{analyze, GrowthEnvelope, SequenceAnalysis};

/// `(log x)² / (log|α| · log|β|)`.
pub fn main_term_from_logs(log_alpha: f64, log_beta: f64, x: f64) -> f64 {
    let z = x.ln();
    z * z / (log_alpha * log_beta)
}

pub fn main_term(u: &GrowthEnvelope, v: &GrowthEnvelope, x: f64) -> f64 {
    main_term_from_logs(u.log_modulus.mid(), v.log_modulus.mid(), x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerGrid {
    pub x: f64,
    pub grid_n_max: f64,
    pub grid_m_max: f64,
    pub count: u64,
    /// Smallest `log x` for which the construction is valid.
    pub threshold_z: f64,
}

/// `max(k^{c-1} e^d, 1)` for one sequence of the grid construction.
fn grid_threshold(env: &GrowthEnvelope) -> f64 {
    let la = env.log_modulus.lo;
    let k = 1.0 / la;
    let c = env.sigma as f64 / la + 1.0;
    let d = (env.upper.ln() + std::f64::consts::LN_2) / la;
    (k.powf(c - 1.0) * d.exp()).max(1.0)
}

fn grid_extent(env: &GrowthEnvelope, z: f64) -> f64 {
    z / env.log_modulus.hi - (env.sigma as f64 / env.log_modulus.lo + 1.0) * z.ln()
}

fn x_floor(x: f64) -> BigInt {
    BigInt::from_f64(x.floor()).unwrap_or_default()
}

/// All `(n, m)` with `n <= grid_n_max`, `m <= grid_m_max`, each verified to
/// satisfy `|U_n - V_m| <= x`.
pub fn lower_bound_grid(
    u: &LinearRecurrence,
    au: &SequenceAnalysis,
    v: &LinearRecurrence,
    av: &SequenceAnalysis,
    x: f64,
) -> Result<LowerGrid> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(Error::InvalidBelowThreshold(format!("x = {x} must be a finite real above 1")));
    }
    let z = x.ln();
    let threshold_z = grid_threshold(&au.envelope).max(grid_threshold(&av.envelope));
    if z < threshold_z {
        return Err(Error::InvalidBelowThreshold(format!("log x = {z} is below the validity threshold {threshold_z}")));
    }
    let xf = x_floor(x);
    for (seq, name) in [(u, "U"), (v, "V")] {
        if BigInt::from(2) * seq.term(0).abs() > xf {
            return Err(Error::InvalidBelowThreshold(format!("x is below 2|{name}_0|")));
        }
    }
    let grid_n_max = grid_extent(&au.envelope, z);
    let grid_m_max = grid_extent(&av.envelope, z);
    if grid_n_max < 0.0 || grid_m_max < 0.0 {
        return Ok(LowerGrid { x, grid_n_max, grid_m_max, count: 0, threshold_z });
    }
    let nn = grid_n_max.floor() as usize;
    let mm = grid_m_max.floor() as usize;
    let count = (nn as u64 + 1) * (mm as u64 + 1);
    let us = u.values(nn);
    let vs = v.values(mm);
    let max_u = us.iter().take(nn + 1).map(|a| a.abs()).max().unwrap_or_default();
    let max_v = vs.iter().take(mm + 1).map(|a| a.abs()).max().unwrap_or_default();
    if max_u + max_v > xf {
        let bad = (0..=nn).into_par_iter().find_any(|&n| vs.iter().take(mm + 1).any(|b| (&us[n] - b).abs() > xf));
        if let Some(n) = bad {
            return Err(Error::Precondition(format!("grid pair with n = {n} exceeds x; envelope constants inconsistent")));
        }
    }
    Ok(LowerGrid { x, grid_n_max, grid_m_max, count, threshold_z })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub x: f64,
    #[serde(rename = "T")]
    pub t: u64,
    #[serde(rename = "S")]
    pub s: u64,
    pub main: f64,
    pub t_ratio: f64,
    pub s_ratio: f64,
    /// `None` where the grid construction is not yet valid.
    pub grid: Option<u64>,
    /// `T - S`.
    pub excess: u64,
    pub count: CountResult,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub sequence_u: String,
    pub sequence_v: String,
    pub log_alpha: f64,
    pub log_beta: f64,
    pub rows: Vec<ReportRow>,
    /// Least-squares `K1` in `|T - main| ≈ K1 · log x · log log x`.
    pub k1: Option<f64>,
    /// Least-squares `K2` in `|T - main| ≈ K2 · log x · (log log x)²`.
    pub k2: Option<f64>,
    /// `max (T - S) / log x`.
    pub k_excess: Option<f64>,
}

fn fit(rows: &[ReportRow], f: impl Fn(f64) -> f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.x > std::f64::consts::E).map(|r| (f(r.x), (r.t as f64 - r.main).abs())).collect();
    let den: f64 = pts.iter().map(|(a, _)| a * a).sum();
    (den > 0.0).then(|| pts.iter().map(|(a, y)| a * y).sum::<f64>() / den)
}

/// One row per `x`, merged in input order.
pub fn ratio_table(u: &LinearRecurrence, v: &LinearRecurrence, x_grid: &[f64], oracle: bool) -> Result<AsymptoticReport> {
    let au = analyze(u)?;
    let av = analyze(v)?;
    ratio_table_with(u, &au, v, &av, x_grid, oracle)
}

pub fn ratio_table_with(
    u: &LinearRecurrence,
    au: &SequenceAnalysis,
    v: &LinearRecurrence,
    av: &SequenceAnalysis,
    x_grid: &[f64],
    oracle: bool,
) -> Result<AsymptoticReport> {
    if let Some(x) = x_grid.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidParameters(format!("grid value {x} is not a finite non-negative real")));
    }
    let rows: Vec<Result<ReportRow>> = x_grid
        .par_iter()
        .map(|&x| {
            let xi = x_floor(x);
            let mut count = count_t_s_with(u, au, v, av, &xi)?;
            if oracle {
                count = brute_force_oracle(u, v, &xi, 3 * count.n_cut, 3 * count.m_cut)?;
            }
            let main = main_term(&au.envelope, &av.envelope, x);
            let grid = match lower_bound_grid(u, au, v, av, x) {
                Ok(g) => Some(g.count),
                Err(Error::InvalidBelowThreshold(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(ReportRow {
                x,
                t: count.t,
                s: count.s,
                main,
                t_ratio: count.t as f64 / main,
                s_ratio: count.s as f64 / main,
                grid,
                excess: count.t - count.s,
                count,
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let k1 = fit(&rows, |x| x.ln() * x.ln().ln());
    let k2 = fit(&rows, |x| x.ln() * x.ln().ln().powi(2));
    let k_excess = rows.iter().filter(|r| r.x > 1.0).map(|r| r.excess as f64 / r.x.ln()).reduce(f64::max);
    Ok(AsymptoticReport {
        sequence_u: u.name().to_string(),
        sequence_v: v.name().to_string(),
        log_alpha: au.envelope.log_modulus.mid(),
        log_beta: av.envelope.log_modulus.mid(),
        rows,
        k1,
        k2,
        k_excess,
    })
}

/// The two auxiliary inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "lemma", rename_all = "snake_case")]
pub enum AuxLemma {
    /// `n <= kz - c log z` implies `n + (c-1) log n + d <= kz`
    /// for `z >= max(k^{c-1} e^d, 1)`.
    ForLowerBound { k: f64, c: f64, d: f64 },
    /// `n <= kz + c (log n)²` implies `n <= kz + 4c (log z)²`
    /// for `n >= N(k, c)` and `z >= 2/k`.
    Mlogm { k: f64, c: f64 },
}

const SLACK: f64 = 1e-9;

impl AuxLemma {
    fn validate(&self) -> Result<()> {
        match *self {
            AuxLemma::ForLowerBound { k, c, d } => {
                if !(k > 0.0 && c > 1.0 && d.is_finite() && k.is_finite() && c.is_finite()) {
                    return Err(Error::InvalidParameters("need k > 0, c > 1 and finite d".into()));
                }
            }
            AuxLemma::Mlogm { k, c } => {
                if !(k > 0.0 && c > 0.0 && k.is_finite() && c.is_finite()) {
                    return Err(Error::InvalidParameters("need k > 0 and c > 0".into()));
                }
            }
        }
        Ok(())
    }

    /// Smallest admissible `z`.
    pub fn z_min(&self) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            AuxLemma::ForLowerBound { k, c, d } => (k.powf(c - 1.0) * d.exp()).max(1.0),
            AuxLemma::Mlogm { k, .. } => 2.0 / k,
        })
    }

    /// Checks the implication at `(n, z)`: `Ok(None)` if the hypothesis
    /// fails, otherwise whether the conclusion holds.
    pub fn check(&self, n: f64, z: f64) -> Result<Option<bool>> {
        let z_min = self.z_min()?;
        if !(z >= z_min) {
            return Err(Error::InvalidParameters(format!("z = {z} is below the admissible minimum {z_min}")));
        }
        if !(n >= 1.0) {
            return Err(Error::InvalidParameters(format!("n = {n} must be at least 1")));
        }
        match *self {
            AuxLemma::ForLowerBound { k, c, d } => {
                if n > k * z - c * z.ln() {
                    return Ok(None);
                }
                Ok(Some(n + (c - 1.0) * n.ln() + d <= k * z + SLACK * (1.0 + k * z)))
            }
            AuxLemma::Mlogm { k, c } => {
                let big_n = mlogm_threshold(k, c)?;
                if n < big_n {
                    return Err(Error::InvalidParameters(format!("n = {n} is below N(k, c) = {big_n}")));
                }
                if n > k * z + c * n.ln().powi(2) {
                    return Ok(None);
                }
                Ok(Some(n <= k * z + 4.0 * c * z.ln().powi(2) + SLACK * n))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuxReport {
    pub lemma: AuxLemma,
    pub trials: usize,
    pub passed: bool,
    pub counterexample: Option<(f64, f64)>,
}

/// Draws `trials` pairs `(n, z)` satisfying the hypothesis and checks the
/// conclusion.
pub fn auxiliary_inequality_check(lemma: AuxLemma, trials: usize, seed: u64) -> Result<AuxReport> {
    let z_min = lemma.z_min()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut attempts = 0usize;
    while done < trials {
        attempts += 1;
        if attempts > 100 * trials + 1000 {
            return Err(Error::InvalidParameters("hypothesis region too thin to sample".into()));
        }
        let (n, z) = match lemma {
            AuxLemma::ForLowerBound { k, c, .. } => {
                let z = z_min * (1.0 + rng.random::<f64>() * 1e3) + rng.random::<f64>() * 1e2;
                let hi = k * z - c * z.ln();
                if hi < 1.0 {
                    continue;
                }
                let n = if rng.random_bool(0.2) { hi } else { 1.0 + rng.random::<f64>() * (hi - 1.0) };
                (n, z)
            }
            AuxLemma::Mlogm { k, c } => {
                let big_n = mlogm_threshold(k, c)?;
                let n = big_n * (rng.random::<f64>() * 6.0).exp();
                let z_low = ((n - c * n.ln().powi(2)) / k).max(z_min);
                let z = if rng.random_bool(0.2) { z_low } else { z_low * (1.0 + rng.random::<f64>() * 10.0) };
                (n, z)
            }
        };
        match lemma.check(n, z)? {
            None => continue,
            Some(true) => done += 1,
            Some(false) => return Ok(AuxReport { lemma, trials: done, passed: false, counterexample: Some((n, z)) }),
        }
    }
    Ok(AuxReport { lemma, trials: done, passed: true, counterexample: None })
}

/// Checks `trials` draws, each with random parameters within the lemma's
/// preconditions.
pub fn fuzz_lemma(mlogm: bool, trials: usize, seed: u64) -> Result<AuxReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..trials {
        let lemma = if mlogm {
            AuxLemma::Mlogm { k: 0.05 + rng.random::<f64>() * 5.0, c: 0.05 + rng.random::<f64>() * 5.0 }
        } else {
            AuxLemma::ForLowerBound {
                k: 0.05 + rng.random::<f64>() * 5.0,
                c: 1.0 + 1e-6 + rng.random::<f64>() * 4.0,
                d: -5.0 + rng.random::<f64>() * 10.0,
            }
        };
        let r = auxiliary_inequality_check(lemma, 1, rng.random())?;
        if !r.passed {
            return Ok(AuxReport { trials, ..r });
        }
        last = Some(lemma);
    }
    Ok(AuxReport { lemma: last.unwrap_or(AuxLemma::Mlogm { k: 1.0, c: 1.0 }), trials, passed: true, counterexample: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> LinearRecurrence {
        LinearRecurrence::fibonacci()
    }

    fn pow(b: i64) -> LinearRecurrence {
        LinearRecurrence::powers_of(b)
    }

    #[test]
    fn main_term_examples() {
        assert!((main_term_from_logs(2.0, 5.0, 10f64.exp()) - 10.0).abs() < 1e-12);
        let af = analyze(&fib()).unwrap();
        let a2 = analyze(&pow(2)).unwrap();
        let v = main_term(&af.envelope, &a2.envelope, 1e6);
        assert!((v - 572.2).abs() < 0.05, "{v}");
        assert!(main_term(&af.envelope, &a2.envelope, 1.0 + 1e-9) < 1e-15);
    }

    #[test]
    fn grid_examples() {
        let (f, p2, p3) = (fib(), pow(2), pow(3));
        let (af, a2, a3) = (analyze(&f).unwrap(), analyze(&p2).unwrap(), analyze(&p3).unwrap());
        let x = 20f64.exp();
        let g = lower_bound_grid(&f, &af, &p2, &a2, x).unwrap();
        assert!((g.grid_n_max - 38.57).abs() < 0.01 && (g.grid_m_max - 25.86).abs() < 0.01);
        assert_eq!(g.count, 1014);
        let h = lower_bound_grid(&p2, &a2, &p3, &a3, x).unwrap();
        assert_eq!(h.count, 416);
        assert!(matches!(lower_bound_grid(&f, &af, &p2, &a2, 2.0), Err(Error::InvalidBelowThreshold(_))));
    }

    #[test]
    fn table_shapes() {
        let r = ratio_table(&fib(), &pow(2), &[], false).unwrap();
        assert!(r.rows.is_empty() && r.k1.is_none());
        let r = ratio_table(&fib(), &pow(2), &[1e3], false).unwrap();
        let o = ratio_table(&fib(), &pow(2), &[1e3], true).unwrap();
        assert_eq!((r.rows[0].t, r.rows[0].s), (o.rows[0].t, o.rows[0].s));
        assert_eq!(r.rows[0].grid, o.rows[0].grid);
    }

    #[test]
    fn lemma_examples() {
        let l = AuxLemma::ForLowerBound { k: 1.0, c: 2.0, d: 0.0 };
        assert_eq!(l.check(14.0, 3f64.exp()).unwrap(), Some(true));
        let high_d = AuxLemma::ForLowerBound { k: 1.0, c: 2.0, d: 5.0 };
        assert!(matches!(high_d.check(1.0, 3.0), Err(Error::InvalidParameters(_))));
        let r = auxiliary_inequality_check(AuxLemma::Mlogm { k: 1.0, c: 1.0 }, 2000, 7).unwrap();
        assert!(r.passed && r.trials == 2000);
        let r = auxiliary_inequality_check(l, 2000, 7).unwrap();
        assert!(r.passed);
    }
}
