//! Certified numerics: dyadic rationals, real and complex intervals,
//! exact polynomials over ℚ and root isolation.

pub mod complex;
pub mod consts;
pub mod dyadic;
pub mod interval;
pub mod poly;
pub mod roots;

pub use complex::ComplexInterval;
pub use dyadic::{Dyadic, Round};
pub use interval::{F64Interval, RealInterval};
pub use poly::Poly;

/// Starting precision for adaptive refinement, in bits.
pub const START_PRECISION: u32 = 128;

/// Default precision cap in bits.
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

/// Precision cap, overridable through `RECDIFF_PRECISION_BITS`.
pub fn precision_cap() -> u32 {
    std::env::var("RECDIFF_PRECISION_BITS")
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|&v| v >= 64)
        .unwrap_or(DEFAULT_PRECISION_CAP)
}

/// Doubling schedule `start, 2·start, ...` up to and including `cap`.
pub fn precision_schedule(start: u32, cap: u32) -> Vec<u32> {
    let mut out = vec![];
    let mut p = start.max(64);
    while p < cap {
        out.push(p);
        p = p.saturating_mul(2);
    }
    out.push(cap.max(start.min(cap)));
    out.dedup();
    out
}
