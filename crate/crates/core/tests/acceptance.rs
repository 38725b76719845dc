//! Acceptance suite: one PASS/FAIL line per criterion.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use recdiff::algebraic::AlgebraicNumber;
use recdiff::asymptotics::{fuzz_lemma, ratio_table};
use recdiff::counting::{brute_force_oracle, count_real_power_pairs, count_t_s_with, fast_hits, RealBase};
use recdiff::heights::height_constant_probe;
use recdiff::matveev::{effective_upper_bounds, LinearFormContext};
use recdiff::spectral::{analyze, check_growth_bounds, verify_envelope, SequenceAnalysis};
use recdiff::LinearRecurrence;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn pair(u: LinearRecurrence, v: LinearRecurrence) -> (LinearRecurrence, SequenceAnalysis, LinearRecurrence, SequenceAnalysis) {
    let au = analyze(&u).expect("analysis");
    let av = analyze(&v).expect("analysis");
    (u, au, v, av)
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let xs = [0u64, 1, 10, 100, 1_000, 10_000, 1_000_000];
    let mut checked = 0;
    for (u, v) in
        [(LinearRecurrence::fibonacci(), LinearRecurrence::powers_of(2)), (LinearRecurrence::powers_of(2), LinearRecurrence::powers_of(3))]
    {
        let (u, au, v, av) = pair(u, v);
        for &x in &xs {
            let x = BigInt::from(x);
            let fast = count_t_s_with(&u, &au, &v, &av, &x).map_err(|e| e.to_string())?;
            let oracle = brute_force_oracle(&u, &v, &x, 3 * fast.n_cut, 3 * fast.m_cut).map_err(|e| e.to_string())?;
            if (fast.t, fast.s) != (oracle.t, oracle.s) {
                return Err(format!(
                    "{}/{} x={x}: fast ({}, {}) vs oracle ({}, {})",
                    u.name(),
                    v.name(),
                    fast.t,
                    fast.s,
                    oracle.t,
                    oracle.s
                ));
            }
            checked += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 10.0 {
        return Err(format!("{checked} cases agree but took {secs:.2} s"));
    }
    Ok(format!("{checked} cases agree in {secs:.2} s"))
}

fn ground_truth() -> Outcome {
    let (f, af, p2, ap2) = pair(LinearRecurrence::fibonacci(), LinearRecurrence::powers_of(2));
    let (_, _, p3, ap3) = pair(LinearRecurrence::powers_of(2), LinearRecurrence::powers_of(3));
    let ts = |u: &LinearRecurrence, au, v: &LinearRecurrence, av, x: u64| {
        count_t_s_with(u, au, v, av, &BigInt::from(x)).map(|r| (r.t, r.s)).map_err(|e| e.to_string())
    };
    let got = [
        ("fib/pow2 x=10", ts(&f, &af, &p2, &ap2, 10)?, (35, 18)),
        ("fib/pow2 x=0", ts(&f, &af, &p2, &ap2, 0)?, (4, 1)),
        ("pow2/pow3 x=2", ts(&p2, &ap2, &p3, &ap3, 2)?, (6, 4)),
    ];
    for (label, g, want) in got {
        if g != want {
            return Err(format!("{label}: got {g:?}, expected {want:?}"));
        }
    }
    let r = count_real_power_pairs(&RealBase::Pi, &RealBase::E, &BigRational::from_integer(10.into()), 200).map_err(|e| e.to_string())?;
    if r.t != 9 {
        return Err(format!("pi/e x=10: T = {}, expected 9", r.t));
    }
    Ok("T/S values and pi/e T(10)=9 match".into())
}

fn sandwich() -> Outcome {
    let start = Instant::now();
    let report = ratio_table(&LinearRecurrence::fibonacci(), &LinearRecurrence::powers_of(2), &[1e3, 1e6, 1e9, 1e12], false)
        .map_err(|e| e.to_string())?;
    for r in &report.rows {
        if let Some(g) = r.grid {
            if g > r.t {
                return Err(format!("x={}: grid {g} > T {}", r.x, r.t));
            }
        }
        if r.s > r.t {
            return Err(format!("x={}: S > T", r.x));
        }
    }
    let dev = |r: &recdiff::asymptotics::ReportRow| (r.s_ratio - 1.0).abs();
    let (first, last) = (&report.rows[0], &report.rows[report.rows.len() - 1]);
    if dev(last) >= dev(first) {
        return Err(format!("|S/main - 1| did not shrink: {} at 1e3, {} at 1e12", dev(first), dev(last)));
    }
    let k = report.k_excess.filter(|k| k.is_finite()).ok_or("no finite K")?;
    for r in &report.rows {
        if r.t as f64 > r.s as f64 + k * r.x.ln() + 1e-9 {
            return Err(format!("x={}: T exceeds S + K log x", r.x));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(format!("took {secs:.2} s"));
    }
    Ok(format!("grid <= T on all valid rows; |S/main-1| {:.4} -> {:.4}; K = {k:.4}; {secs:.2} s", dev(first), dev(last)))
}

fn matveev_consistency() -> Outcome {
    let (_, au, _, av) = pair(LinearRecurrence::fibonacci(), LinearRecurrence::powers_of(2));
    let ctx = LinearFormContext::new(&au.certificate, &av.certificate).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut certified = 0;
    let mut min_slack = f64::INFINITY;
    for _ in 0..200 {
        let n = rng.random_range(5..=60u64);
        let m = rng.random_range(5..=60u64);
        let a1 = ctx.a1(n, m).ok_or("A1 not available")?;
        let s = ctx.sample(n, m, a1).map_err(|e| e.to_string())?;
        let Some(obs) = s.log_lower() else { continue };
        certified += 1;
        let floor = s.matveev_floor.expect("floor set");
        if obs < floor {
            return Err(format!("({n}, {m}): log|Λ| >= {obs} below floor {floor}"));
        }
        min_slack = min_slack.min(obs - floor);
    }
    if certified == 0 {
        return Err("no sample certified nonzero".into());
    }
    Ok(format!("{certified}/200 certified nonzero, zero violations, min slack {min_slack:.4e}"))
}

fn n_two_to_n() -> LinearRecurrence {
    LinearRecurrence::new("n2n", [4, -4], [0, 2]).expect("valid recurrence")
}

fn spectral_certificates() -> Outcome {
    let seqs = [
        LinearRecurrence::fibonacci(),
        LinearRecurrence::lucas(),
        LinearRecurrence::powers_of(2),
        LinearRecurrence::tribonacci(),
        n_two_to_n(),
    ];
    for seq in &seqs {
        let a = analyze(seq).map_err(|e| format!("{}: {e}", seq.name()))?;
        let d = a.decomposition();
        let prec = d.precision + 64;
        for n in 0..=200 {
            let z = d.eval(n, prec);
            if !z.im.contains_zero() || z.re.unique_integer() != Some(seq.term(n)) {
                return Err(format!("{}: Binet reconstruction fails at n = {n}", seq.name()));
            }
        }
        let check = verify_envelope(seq, &a.certificate, &a.envelope, 500);
        if !check.ok() {
            return Err(format!("{}: envelope check failed: {check:?}", seq.name()));
        }
        let direct = check_growth_bounds(seq, &a.certificate, Some(a.envelope.lower), Some(a.envelope.upper), a.envelope.n0, 500);
        if !direct.ok() {
            return Err(format!("{}: growth bounds failed", seq.name()));
        }
    }
    let fib = analyze(&LinearRecurrence::fibonacci()).map_err(|e| e.to_string())?;
    let (re, im) = fib.certificate.root.mid_f64();
    if (re - 1.6180339887).abs() >= 1e-10 || im != 0.0 || (re - (1.0 + 5f64.sqrt()) / 2.0).abs() >= 1e-12 {
        return Err(format!("Fibonacci dominant root {re} + {im}i"));
    }
    Ok(format!("5 sequences reconstructed for n <= 200, envelopes exact on [n0, 500]; root {re:.12}"))
}

fn heights() -> Outcome {
    let h = |t: &str| -> Result<f64, String> {
        let a = AlgebraicNumber::parse(t).map_err(|e| e.to_string())?;
        a.log_height().map(|i| i.mid()).map_err(|e| e.to_string())
    };
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    for (t, want) in [("2", 2f64.ln()), ("phi", 0.5 * phi.ln()), ("3/2", 3f64.ln())] {
        let got = h(t)?;
        if (got - want).abs() >= 1e-12 {
            return Err(format!("h({t}) = {got}, expected {want}"));
        }
    }
    let probe = height_constant_probe(&AlgebraicNumber::from_int(2), &AlgebraicNumber::from_int(3), 10, None).map_err(|e| e.to_string())?;
    if probe.c0_emp != 2f64.ln() {
        return Err(format!("C0_emp = {}, expected log 2", probe.c0_emp));
    }
    Ok(format!("h(2), h(phi), h(3/2) within 1e-12; C0_emp = {}", probe.c0_emp))
}

fn bounds_soundness() -> Outcome {
    let (u, au, v, av) = pair(LinearRecurrence::fibonacci(), LinearRecurrence::powers_of(2));
    let bounds = effective_upper_bounds(&u, &au, &v, &av).map_err(|e| e.to_string())?;
    let hits = fast_hits(&u, &au, &v, &av, &BigInt::from(10_000)).map_err(|e| e.to_string())?.hits;
    let mut worst: f64 = 0.0;
    for h in &hits {
        let c: f64 = h.c.to_string().parse::<f64>().expect("small integer").abs();
        let (nb, mb) = (bounds.n_bound(c), bounds.m_bound(c));
        if h.n as f64 > nb || h.m as f64 > mb {
            return Err(format!("solution ({}, {}) with c = {} exceeds ({nb}, {mb})", h.n, h.m, h.c));
        }
        worst = worst.max(h.n as f64 / nb).max(h.m as f64 / mb);
    }
    Ok(format!("{} solutions within bounds, max index/bound ratio {worst:.3e}", hits.len()))
}

fn lemma_fuzz() -> Outcome {
    let mut parts = vec![];
    for (mlogm, label) in [(false, "lower-bound lemma"), (true, "mlogm lemma")] {
        let r = fuzz_lemma(mlogm, 10_000, 7).map_err(|e| e.to_string())?;
        if !r.passed || r.trials != 10_000 {
            return Err(format!("{label}: counterexample {:?}", r.counterexample));
        }
        parts.push(format!("{label} {} draws", r.trials));
    }
    Ok(format!("{}; zero failures", parts.join(", ")))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("ground-truth values", ground_truth),
        ("asymptotic sandwich", sandwich),
        ("Matveev consistency", matveev_consistency),
        ("spectral certificates", spectral_certificates),
        ("heights", heights),
        ("effective bounds soundness", bounds_soundness),
        ("auxiliary lemma fuzz", lemma_fuzz),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
