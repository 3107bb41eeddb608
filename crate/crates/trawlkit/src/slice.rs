//! Exact slice-partition simulation of trawl processes, the truncated
//! unbounded variant with its error accounting, and the Cholesky path for
//! Gaussian seeds used as a cross-check.

use crate::convolution::{fast_convolution, SliceMatrix};
use crate::error::{Error, Result};
use crate::levy::{set_mean_var, LevySeed, Moment};
use crate::real::Real;
use crate::rng::RngStream;
use crate::trawl::{slice_areas_bounded, slice_areas_unbounded, PlanMode, SlicePlan, TrawlFunction};

/// Row truncation for the unbounded slice matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Keep all k rows: exact simulation.
    Exact,
    /// Smallest row count whose reported error variance is at most 1e-6 of
    /// the process variance.
    Auto,
    /// Keep exactly this many rows.
    Rows(usize),
}

/// Per-trawl law of the truncation errors, from the dropped slice areas.
#[derive(Debug, Clone)]
pub struct TruncationReport<T: Real> {
    pub rows_kept: usize,
    pub rows_total: usize,
    /// Error mean per trawl (area-weighted seed mean).
    pub mean: Vec<Moment<T>>,
    /// Error variance per trawl (area-weighted seed variance).
    pub var: Vec<Moment<T>>,
}

impl<T: Real> TruncationReport<T> {
    fn exact(k: usize, rows: usize) -> Self {
        TruncationReport {
            rows_kept: rows,
            rows_total: rows,
            mean: vec![Moment::Value(T::zero()); k],
            var: vec![Moment::Value(T::zero()); k],
        }
    }
}

/// Draw the slice matrix for a plan. Slices sharing an area are drawn in
/// one vectorized call per row; zero-area slices are exact zeros and do not
/// consume randomness.
fn sample_slice_matrix<T: Real>(
    plan: &SlicePlan<T>,
    seed: &LevySeed<T>,
    rows_kept: usize,
    rng: &mut RngStream,
) -> Result<SliceMatrix<T>> {
    let k = plan.k;
    let mut values = vec![vec![T::zero(); k]; plan.rows()];
    for i in 1..=rows_kept.min(plan.rows()) {
        let len = plan.row_len(i);
        let row = &mut values[i - 1];
        let first = plan.area(i, 1);
        if first > T::zero() {
            row[0] = seed.sample_one(first, rng)?;
        }
        if len >= 2 {
            match plan.mode {
                PlanMode::Bounded => {
                    let a = plan.area(i, 2);
                    if a > T::zero() {
                        let draws = seed.sample_set_law(a, len - 1, rng)?;
                        row[1..len].copy_from_slice(&draws);
                    }
                }
                PlanMode::Unbounded => {
                    // middle run shares one area; the terminal slice is
                    // unclipped and has its own
                    if len > 2 {
                        let a = plan.area(i, 2);
                        if a > T::zero() {
                            let draws = seed.sample_set_law(a, len - 2, rng)?;
                            row[1..len - 1].copy_from_slice(&draws);
                        }
                    }
                    let last = plan.area(i, len);
                    if last > T::zero() {
                        row[len - 1] = seed.sample_one(last, rng)?;
                    }
                }
            }
        }
    }
    Ok(SliceMatrix {
        mode: plan.mode,
        k,
        values,
    })
}

/// Exact simulation of a bounded-trawl process at times tau, ..., k tau.
pub fn simulate_slice_bounded<T: Real>(
    trawl: &TrawlFunction<T>,
    seed: &LevySeed<T>,
    k: usize,
    tau: T,
    rng: &mut RngStream,
) -> Result<Vec<T>> {
    let plan = slice_areas_bounded(trawl, tau, k)?;
    simulate_from_plan(&plan, seed, rng)
}

/// Simulation straight from a precomputed plan (all rows kept).
pub fn simulate_from_plan<T: Real>(
    plan: &SlicePlan<T>,
    seed: &LevySeed<T>,
    rng: &mut RngStream,
) -> Result<Vec<T>> {
    let m = sample_slice_matrix(plan, seed, plan.rows(), rng)?;
    Ok(fast_convolution(&m))
}

/// Smallest kept-row count with worst-case dropped area at most
/// `target_frac` of the total trawl area.
pub fn auto_trunc_rows<T: Real>(plan: &SlicePlan<T>, target_frac: T) -> usize {
    let total = plan.total_area();
    let target = target_frac * total;
    let k = plan.k;
    let worst = |n: usize| -> T {
        let mut w = T::zero();
        for l in 1..=k {
            let d = plan.dropped_area(n, l);
            if d > w {
                w = d;
            }
        }
        w
    };
    if worst(1) <= target {
        return 1;
    }
    let (mut lo, mut hi) = (1usize, k);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if worst(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Slice-partition simulation of an unbounded-trawl process. Without
/// truncation the simulation is exact with k(k+1)/2 slices; with rows
/// dropped, the report carries the mean and variance of the per-trawl
/// errors computed from the dropped slice areas.
pub fn simulate_slice_unbounded<T: Real>(
    trawl: &TrawlFunction<T>,
    seed: &LevySeed<T>,
    k: usize,
    tau: T,
    trunc: Truncation,
    rng: &mut RngStream,
) -> Result<(Vec<T>, TruncationReport<T>)> {
    let plan = slice_areas_unbounded(trawl, tau, k)?;
    simulate_unbounded_from_plan(&plan, seed, trunc, rng)
}

pub fn simulate_unbounded_from_plan<T: Real>(
    plan: &SlicePlan<T>,
    seed: &LevySeed<T>,
    trunc: Truncation,
    rng: &mut RngStream,
) -> Result<(Vec<T>, TruncationReport<T>)> {
    let k = plan.k;
    let rows = match trunc {
        Truncation::Exact => plan.rows(),
        Truncation::Auto => auto_trunc_rows(plan, T::of(1e-6)),
        Truncation::Rows(n) => {
            if n > plan.rows() || n == 0 {
                return Err(Error::invalid(format!(
                    "truncation rows must lie in 1..={}",
                    plan.rows()
                )));
            }
            n
        }
    };
    let m = sample_slice_matrix(plan, seed, rows, rng)?;
    let x = fast_convolution(&m);
    let report = if rows >= plan.rows() {
        TruncationReport::exact(k, plan.rows())
    } else {
        let (sm, sv) = seed.mean_var();
        let mut mean = Vec::with_capacity(k);
        let mut var = Vec::with_capacity(k);
        for l in 1..=k {
            let area = plan.dropped_area(rows, l);
            mean.push(match sm {
                Moment::Value(v) => Moment::Value(v * area),
                Moment::Undefined => Moment::Undefined,
            });
            var.push(match sv {
                Moment::Value(v) => Moment::Value(v * area),
                Moment::Undefined => Moment::Undefined,
            });
        }
        TruncationReport {
            rows_kept: rows,
            rows_total: plan.rows(),
            mean,
            var,
        }
    };
    Ok((x, report))
}

/// Exact Gaussian trawl simulation through the covariance factorization:
/// `Sigma_{lm} = variance * overlap(|l-m| tau)`, sampled as `H z + mean`
/// with `Sigma = H H^t`. Cross-validates the slice path.
pub fn simulate_gaussian_cholesky<T: Real>(
    trawl: &TrawlFunction<T>,
    k: usize,
    tau: T,
    mean: T,
    variance: T,
    rng: &mut RngStream,
) -> Result<Vec<T>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let total = trawl.total_area()?;
    let mut cov = vec![vec![T::zero(); k]; k];
    let mut overlaps = Vec::with_capacity(k);
    for d in 0..k {
        overlaps.push(trawl.overlap(T::of(d as f64) * tau)?);
    }
    for l in 0..k {
        for m in 0..k {
            let d = l.abs_diff(m);
            cov[l][m] = variance * overlaps[d];
        }
    }
    let h = cholesky_factor(cov, T::of(1e-12) * variance.max(T::of(1e-30)) * total)?;
    let mu = mean * total;
    let z: Vec<T> = {
        use rand::Rng;
        (0..k)
            .map(|_| {
                let (u1, u2): (f64, f64) = (rng.random::<f64>().max(1e-300), rng.random());
                T::of((-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos())
            })
            .collect()
    };
    let mut x = vec![mu; k];
    for l in 0..k {
        for m in 0..=l {
            x[l] += h[l][m] * z[m];
        }
    }
    Ok(x)
}

/// Lower-triangular Cholesky factor with a single jitter retry.
fn cholesky_factor<T: Real>(mut a: Vec<Vec<T>>, jitter: T) -> Result<Vec<Vec<T>>> {
    let n = a.len();
    for attempt in 0..2 {
        if attempt == 1 {
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += jitter;
            }
        }
        match try_factor(&a) {
            Some(h) => return Ok(h),
            None => continue,
        }
    }
    Err(Error::Factorization(
        "covariance is not numerically positive semidefinite".into(),
    ))
}

fn try_factor<T: Real>(a: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = a.len();
    let mut h = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for p in 0..j {
                s -= h[i][p] * h[j][p];
            }
            if i == j {
                if s < T::zero() {
                    return None;
                }
                h[i][j] = s.sqrt();
            } else if h[j][j] > T::zero() {
                h[i][j] = s / h[j][j];
            } else {
                h[i][j] = T::zero();
            }
        }
    }
    Some(h)
}
