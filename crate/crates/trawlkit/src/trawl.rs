//! Trawl functions, set areas, overlaps, autocorrelation and slice plans.
//!
//! A trawl set is the region `A = {(s,x): s <= 0, 0 < x < phi(s)}` under a
//! monotone function `phi` on `(-inf, 0]`, nondecreasing toward 0 with
//! `phi(0) > 0` and finite total area. `A_t = A + (t, 0)`.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_left_tail, QuadOpts};
use crate::real::Real;

type DynFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
enum Shape<T: Real> {
    /// `rate * exp(rate t)`; total area 1 for every rate.
    Exponential { rate: T },
    /// `scale * (1 - t)^(-exponent)` with exponent > 1; long memory.
    LongMemory { scale: T, exponent: T },
    /// `1 + t/span` on `[-span, 0]`.
    Triangle { span: T },
    /// `1` on `[-span, 0]`.
    Rectangle { span: T },
    /// Piecewise linear through `(ts[i], vals[i])`, zero left of `ts[0]`.
    Tabulated { ts: Vec<T>, vals: Vec<T> },
    /// User-supplied phi, optional antiderivative with `F' = phi`.
    Custom {
        f: DynFn<T>,
        antiderivative: Option<DynFn<T>>,
        support: Option<T>,
    },
}

/// Monotone trawl function plus cached geometry.
#[derive(Clone)]
pub struct TrawlFunction<T: Real> {
    shape: Shape<T>,
    support_bound: Option<T>,
    total: Arc<OnceLock<T>>,
}

impl<T: Real> std::fmt::Debug for TrawlFunction<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match &self.shape {
            Shape::Exponential { .. } => "exponential",
            Shape::LongMemory { .. } => "long_memory",
            Shape::Triangle { .. } => "triangle",
            Shape::Rectangle { .. } => "rectangle",
            Shape::Tabulated { .. } => "tabulated",
            Shape::Custom { .. } => "custom",
        };
        f.debug_struct("TrawlFunction")
            .field("shape", &name)
            .field("support_bound", &self.support_bound.map(|t| t.as_f64()))
            .finish()
    }
}

impl<T: Real> TrawlFunction<T> {
    fn new(shape: Shape<T>, support_bound: Option<T>) -> Self {
        TrawlFunction {
            shape,
            support_bound,
            total: Arc::new(OnceLock::new()),
        }
    }

    pub fn exponential(rate: T) -> Result<Self> {
        if !(rate > T::zero() && rate.is_finite()) {
            return Err(Error::invalid("exponential trawl requires rate > 0"));
        }
        Ok(Self::new(Shape::Exponential { rate }, None))
    }

    /// `phi(t) = scale (1-t)^(-exponent)`, exponent > 1 so the area is finite.
    pub fn long_memory(scale: T, exponent: T) -> Result<Self> {
        if !(scale > T::zero() && exponent > T::one()) {
            return Err(Error::invalid(
                "long_memory trawl requires scale > 0 and exponent > 1",
            ));
        }
        Ok(Self::new(
            Shape::LongMemory {
                scale,
                exponent,
            },
            None,
        ))
    }

    pub fn triangle(span: T) -> Result<Self> {
        if !(span > T::zero() && span.is_finite()) {
            return Err(Error::invalid("triangle trawl requires span > 0"));
        }
        Ok(Self::new(Shape::Triangle { span }, Some(-span)))
    }

    pub fn rectangle(span: T) -> Result<Self> {
        if !(span > T::zero() && span.is_finite()) {
            return Err(Error::invalid("rectangle trawl requires span > 0"));
        }
        Ok(Self::new(Shape::Rectangle { span }, Some(-span)))
    }

    /// Piecewise-linear phi through the given knots; `ts` strictly increasing
    /// and ending at 0, `vals` nonnegative and nondecreasing.
    pub fn tabulated(ts: Vec<T>, vals: Vec<T>) -> Result<Self> {
        if ts.len() != vals.len() || ts.len() < 2 {
            return Err(Error::invalid("tabulated trawl needs >= 2 knots"));
        }
        if *ts.last().unwrap() != T::zero() {
            return Err(Error::invalid("tabulated trawl must end at t = 0"));
        }
        for w in ts.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::invalid("tabulated knots must be increasing"));
            }
        }
        for w in vals.windows(2) {
            if !(w[0] <= w[1]) {
                return Err(Error::invalid(
                    "tabulated trawl must be nondecreasing toward 0",
                ));
            }
        }
        if vals.iter().any(|v| *v < T::zero()) || *vals.last().unwrap() <= T::zero() {
            return Err(Error::invalid(
                "tabulated trawl must be nonnegative with phi(0) > 0",
            ));
        }
        let support = ts[0];
        Ok(Self::new(Shape::Tabulated { ts, vals }, Some(support)))
    }

    /// Pointwise phi. Monotonicity and positivity are spot-checked on a
    /// probe grid; `support` is the optional T < 0 with phi(T) = 0.
    pub fn custom(
        f: impl Fn(T) -> T + Send + Sync + 'static,
        antiderivative: Option<DynFn<T>>,
        support: Option<T>,
    ) -> Result<Self> {
        let f: DynFn<T> = Arc::new(f);
        if !(f(T::zero()) > T::zero()) {
            return Err(Error::invalid("custom trawl requires phi(0) > 0"));
        }
        if let Some(tt) = support {
            if !(tt < T::zero()) {
                return Err(Error::invalid("support bound must be negative"));
            }
        }
        let lo = support.unwrap_or_else(|| T::of(-64.0));
        let n = 64;
        let mut prev = f(lo);
        for i in 1..=n {
            let t = lo + (T::zero() - lo) * T::of(i as f64 / n as f64);
            let v = f(t);
            if v < prev - T::of(1e-12) || v < T::zero() {
                return Err(Error::invalid(
                    "custom trawl must be nonnegative and nondecreasing toward 0",
                ));
            }
            prev = v;
        }
        Ok(Self::new(
            Shape::Custom {
                f,
                antiderivative,
                support,
            },
            support,
        ))
    }

    /// phi(t); zero above 0 and left of the support bound.
    pub fn eval(&self, t: T) -> T {
        if t > T::zero() {
            return T::zero();
        }
        if let Some(tb) = self.support_bound {
            if t <= tb {
                return T::zero();
            }
        }
        match &self.shape {
            Shape::Exponential { rate } => *rate * (*rate * t).exp(),
            Shape::LongMemory { scale, exponent } => *scale * (T::one() - t).powf(-*exponent),
            Shape::Triangle { span } => T::one() + t / *span,
            Shape::Rectangle { .. } => T::one(),
            Shape::Tabulated { ts, vals } => {
                if t <= ts[0] {
                    return T::zero();
                }
                let mut i = 0;
                while i + 1 < ts.len() && ts[i + 1] < t {
                    i += 1;
                }
                let w = (t - ts[i]) / (ts[i + 1] - ts[i]);
                vals[i] + (vals[i + 1] - vals[i]) * w
            }
            Shape::Custom { f, .. } => f(t).max(T::zero()),
        }
    }

    /// phi(0), the height of the trawl set.
    pub fn height(&self) -> T {
        self.eval(T::zero())
    }

    /// The T < 0 with phi(T) = 0, when the trawl is bounded.
    pub fn support_bound(&self) -> Option<T> {
        self.support_bound
    }

    /// Closed-form value of `int_{-inf}^{x} phi`, when available.
    fn mass_below_closed(&self, x: T) -> Option<T> {
        let x = x.min(T::zero());
        match &self.shape {
            Shape::Exponential { rate } => Some((*rate * x).exp()),
            Shape::LongMemory { scale, exponent } => {
                Some(*scale * (T::one() - x).powf(T::one() - *exponent) / (*exponent - T::one()))
            }
            Shape::Triangle { span } => {
                let s = *span;
                if x <= -s {
                    Some(T::zero())
                } else {
                    // int_{-span}^{x} (1 + t/span) dt
                    Some((x + s) + (x * x - s * s) / (T::of(2.0) * s))
                }
            }
            Shape::Rectangle { span } => Some((x + *span).max(T::zero())),
            Shape::Tabulated { ts, vals } => {
                if x <= ts[0] {
                    return Some(T::zero());
                }
                let mut acc = T::zero();
                for i in 0..ts.len() - 1 {
                    let (a, b) = (ts[i], ts[i + 1].min(x));
                    if b <= a {
                        break;
                    }
                    let va = self.eval(a.max(ts[i]));
                    let vb = self.eval(b);
                    acc += (va + vb) * (b - a) * T::of(0.5);
                    if ts[i + 1] >= x {
                        break;
                    }
                }
                Some(acc)
            }
            Shape::Custom {
                antiderivative,
                support,
                ..
            } => antiderivative.as_ref().map(|ad| {
                let lo = support.map(|s| ad(s));
                match lo {
                    Some(l) => ad(x.max(support.unwrap())) - l,
                    // F(-inf) taken as 0; callers supply antiderivatives
                    // vanishing at -inf for unbounded shapes.
                    None => ad(x),
                }
            }),
        }
    }

    /// `int_{-inf}^{x} phi`, closed form or quadrature.
    pub fn mass_below(&self, x: T) -> Result<T> {
        let x = x.min(T::zero());
        if let Some(v) = self.mass_below_closed(x) {
            return Ok(v);
        }
        let opts = QuadOpts::tol(1e-12, 1e-10);
        match self.support_bound {
            Some(tb) => {
                if x <= tb {
                    Ok(T::zero())
                } else {
                    integrate(|t| self.eval(t), tb, x, opts)
                }
            }
            None => integrate_left_tail(|t| self.eval(t), x, opts),
        }
    }

    /// `int_a^b phi` with `a` possibly -inf.
    pub fn band_integral(&self, a: T, b: T) -> Result<T> {
        if a >= b {
            return Ok(T::zero());
        }
        if a.is_finite() {
            if self.mass_below_closed(T::zero()).is_some() {
                return Ok(self.mass_below(b)? - self.mass_below(a)?);
            }
            let lo = match self.support_bound {
                Some(tb) => a.max(tb),
                None => a,
            };
            if lo >= b {
                return Ok(T::zero());
            }
            integrate(|t| self.eval(t), lo, b.min(T::zero()), QuadOpts::tol(1e-12, 1e-10))
        } else {
            self.mass_below(b)
        }
    }

    /// `Leb(A) = int_{-inf}^0 phi`, computed once.
    pub fn total_area(&self) -> Result<T> {
        if let Some(v) = self.total.get() {
            return Ok(*v);
        }
        let v = self.mass_below(T::zero())?;
        if !(v.is_finite() && v > T::zero()) {
            return Err(Error::DivergentIntegral(
                "trawl total area must be finite and positive".into(),
            ));
        }
        let _ = self.total.set(v);
        Ok(v)
    }

    /// `Leb(A ∩ A_h) = int_{-inf}^{-h} phi` for lag h >= 0.
    pub fn overlap(&self, h: T) -> Result<T> {
        if h < T::zero() {
            return Err(Error::invalid("overlap lag must be nonnegative"));
        }
        if h == T::zero() {
            return self.total_area();
        }
        self.mass_below(-h)
    }

    /// Autocorrelation rho(h) = Leb(A ∩ A_h) / Leb(A).
    pub fn autocorrelation(&self, h: T) -> Result<T> {
        if h < T::zero() {
            return Err(Error::invalid("autocorrelation lag must be nonnegative"));
        }
        if h == T::zero() {
            return Ok(T::one());
        }
        if let Some(tb) = self.support_bound {
            if h >= -tb {
                return Ok(T::zero());
            }
        }
        Ok(self.overlap(h)? / self.total_area()?)
    }

    /// Whether the point `(s, x)` lies in the translated trawl set `A_t`.
    ///
    /// Cell inclusion on a grid reduces to this test at the cell's top-left
    /// corner; ties `x = phi(s-t)` count as included there, so the strict
    /// upper comparison is `<=` on the closure used by the grid module.
    pub fn contains_point(&self, t: T, s: T, x: T) -> bool {
        s <= t && x > T::zero() && x < self.eval(s - t)
    }

    /// Truncation horizon: largest (most negative) T with tail mass
    /// `int_{-inf}^{T} phi <= frac * Leb(A)`. Identity for bounded trawls.
    pub fn horizon(&self, frac: T) -> Result<T> {
        if let Some(tb) = self.support_bound {
            return Ok(tb);
        }
        let total = self.total_area()?;
        let target = frac * total;
        let mut t = -T::one();
        while self.mass_below(t)? > target {
            t = t * T::of(2.0);
            if t < T::of(-1e12) {
                return Err(Error::DivergentIntegral(
                    "tail mass not decaying; cannot choose horizon".into(),
                ));
            }
        }
        // bisect back toward 0 for a tight horizon
        let mut lo = t;
        let mut hi = t * T::of(0.5);
        for _ in 0..80 {
            let mid = (lo + hi) * T::of(0.5);
            if self.mass_below(mid)? > target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(lo)
    }

    /// Monotone inverse: the time u <= 0 with phi(u) = y, for 0 < y <= phi(0).
    pub fn inverse(&self, y: T) -> Result<T> {
        if !(y > T::zero() && y <= self.height()) {
            return Err(Error::invalid("inverse argument outside (0, phi(0)]"));
        }
        match &self.shape {
            Shape::Exponential { rate } => Ok((y / *rate).ln() / *rate),
            Shape::LongMemory { scale, exponent } => {
                Ok(T::one() - (y / *scale).powf(-(*exponent).recip()))
            }
            Shape::Triangle { span } => Ok((y - T::one()) * *span),
            _ => {
                let mut lo = match self.support_bound {
                    Some(tb) => tb,
                    None => {
                        let mut t = -T::one();
                        while self.eval(t) > y {
                            t = t * T::of(2.0);
                            if t < T::of(-1e12) {
                                return Err(Error::DivergentIntegral(
                                    "phi does not fall below target".into(),
                                ));
                            }
                        }
                        t
                    }
                };
                let mut hi = T::zero();
                for _ in 0..200 {
                    let mid = (lo + hi) * T::of(0.5);
                    if self.eval(mid) < y {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok((lo + hi) * T::of(0.5))
            }
        }
    }
}

/// Which slice family a plan describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanMode {
    Bounded,
    Unbounded,
}

/// Precomputed slice areas for the slice-partition simulators.
///
/// Bounded mode stores the two generating columns `s_{i1}`, `s_{i2}`
/// (areas repeat from the second column on). Unbounded mode stores the
/// band integrals `a_1..a_{k-1}` and the tail `a_k`; the staircase row i is
/// `[a_i, a_i - a_{i+1}, ..., a_i - a_{i+1}, a_i]` with `k+1-i` entries.
#[derive(Debug, Clone)]
pub struct SlicePlan<T: Real> {
    pub mode: PlanMode,
    pub tau: T,
    pub k: usize,
    rows: usize,
    col1: Vec<T>,
    mid: Vec<T>,
    total: T,
    zero_eps: T,
}

impl<T: Real> SlicePlan<T> {
    /// Rows of the slice matrix: the overlap depth I (bounded) or k.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of slices in row i (1-based).
    pub fn row_len(&self, i: usize) -> usize {
        match self.mode {
            PlanMode::Bounded => self.k,
            PlanMode::Unbounded => self.k + 1 - i,
        }
    }

    pub fn total_area(&self) -> T {
        self.total
    }

    /// Area of slice (i, j), 1-based; areas below the machine-precision
    /// guard come back as exact zero.
    pub fn area(&self, i: usize, j: usize) -> T {
        debug_assert!(i >= 1 && i <= self.rows && j >= 1 && j <= self.row_len(i));
        let a = match self.mode {
            PlanMode::Bounded => {
                if j == 1 {
                    self.col1[i - 1]
                } else {
                    self.mid[i - 1]
                }
            }
            PlanMode::Unbounded => {
                if j == 1 || j == self.k + 1 - i {
                    self.col1[i - 1]
                } else {
                    self.mid[i - 1]
                }
            }
        };
        if a <= self.zero_eps {
            T::zero()
        } else {
            a
        }
    }

    /// Sum of slice areas contracted into trawl l (1-based); equals the
    /// total trawl area for every l by the partition property.
    pub fn trawl_area_sum(&self, l: usize) -> T {
        let mut acc = T::zero();
        for i in 1..=self.rows {
            let m_lo = if l >= i { l + 1 - i } else { 1 };
            let m_hi = l.min(self.row_len(i));
            for m in m_lo..=m_hi {
                acc += self.area(i, m);
            }
        }
        acc
    }

    /// Area dropped from trawl l when rows > n are discarded.
    pub fn dropped_area(&self, n: usize, l: usize) -> T {
        let mut acc = T::zero();
        for i in (n + 1)..=self.rows {
            let m_lo = if l >= i { l + 1 - i } else { 1 };
            let m_hi = l.min(self.row_len(i));
            for m in m_lo..=m_hi {
                acc += self.area(i, m);
            }
        }
        acc
    }

    /// Time strip and vertical bounds of slice (i, m): the region is
    /// `{(t, x): t_lo < t <= t_hi, lower(t) <= x < upper(t)}` with
    /// `upper(t) = phi(t - (m+i-1) tau)` and `lower(t) = phi(t - (m+i) tau)`
    /// (`lower = 0` for the unclipped terminal slices of the unbounded plan).
    pub fn region(&self, i: usize, m: usize) -> SliceRegion<T> {
        let tau = self.tau;
        let t_hi = T::of(m as f64) * tau;
        let t_lo = if m == 1 { None } else { Some(t_hi - tau) };
        let upper_shift = T::of((m + i - 1) as f64) * tau;
        let lower_shift = match self.mode {
            PlanMode::Unbounded if m + i - 1 == self.k => None,
            _ => Some(T::of((m + i) as f64) * tau),
        };
        SliceRegion {
            t_lo,
            t_hi,
            upper_shift,
            lower_shift,
        }
    }
}

/// Geometry of one slice, in absolute time coordinates.
#[derive(Debug, Clone, Copy)]
pub struct SliceRegion<T> {
    /// Strip start; `None` means the strip extends to -inf.
    pub t_lo: Option<T>,
    pub t_hi: T,
    /// Upper boundary is `phi(t - upper_shift)`.
    pub upper_shift: T,
    /// Lower boundary is `phi(t - lower_shift)`; `None` means 0.
    pub lower_shift: Option<T>,
}

/// Slice areas for a bounded trawl: `I = ceil(-T/tau)` rows,
/// `s_{i1} = int_{-i tau}^{(-i+1) tau} phi`, `s_{i2} = s_{i1} - s_{i+1,1}`.
pub fn slice_areas_bounded<T: Real>(
    trawl: &TrawlFunction<T>,
    tau: T,
    k: usize,
) -> Result<SlicePlan<T>> {
    let tb = trawl
        .support_bound()
        .ok_or_else(|| Error::Unsupported("bounded slice plan requires a support bound".into()))?;
    if !(tau > T::zero()) || k == 0 {
        return Err(Error::invalid("slice plan requires tau > 0 and k >= 1"));
    }
    let rows = (-tb / tau).as_f64().ceil().max(1.0) as usize;
    let total = trawl.total_area()?;
    let mut s1 = Vec::with_capacity(rows);
    for i in 1..=rows {
        let hi = -T::of((i - 1) as f64) * tau;
        let lo = -T::of(i as f64) * tau;
        s1.push(trawl.band_integral(lo.max(tb), hi)?);
    }
    let mut mid = Vec::with_capacity(rows);
    for i in 0..rows {
        let next = if i + 1 < rows { s1[i + 1] } else { T::zero() };
        mid.push(s1[i] - next);
    }
    build_plan(PlanMode::Bounded, tau, k, rows, s1, mid, total)
}

/// Staircase slice areas for an unbounded trawl: bands `a_1..a_{k-1}` and
/// the tail `a_k = int_{-inf}^{(-k+1) tau} phi`.
pub fn slice_areas_unbounded<T: Real>(
    trawl: &TrawlFunction<T>,
    tau: T,
    k: usize,
) -> Result<SlicePlan<T>> {
    if !(tau > T::zero()) || k == 0 {
        return Err(Error::invalid("slice plan requires tau > 0 and k >= 1"));
    }
    let total = trawl.total_area()?;
    let mut a = Vec::with_capacity(k);
    for i in 1..=k {
        if i < k {
            let hi = -T::of((i - 1) as f64) * tau;
            let lo = -T::of(i as f64) * tau;
            a.push(trawl.band_integral(lo, hi)?);
        } else {
            a.push(trawl.mass_below(-T::of((k - 1) as f64) * tau)?);
        }
    }
    let mut mid = Vec::with_capacity(k);
    for i in 0..k {
        let next = if i + 1 < k { a[i + 1] } else { T::zero() };
        mid.push(a[i] - next);
    }
    build_plan(PlanMode::Unbounded, tau, k, k, a, mid, total)
}

fn build_plan<T: Real>(
    mode: PlanMode,
    tau: T,
    k: usize,
    rows: usize,
    mut col1: Vec<T>,
    mut mid: Vec<T>,
    total: T,
) -> Result<SlicePlan<T>> {
    let tol = T::of(1e-12) * total;
    for v in col1.iter_mut().chain(mid.iter_mut()) {
        if *v < -tol {
            return Err(Error::invalid("negative slice area"));
        }
        if *v < T::zero() {
            *v = T::zero();
        }
    }
    let plan = SlicePlan {
        mode,
        tau,
        k,
        rows,
        col1,
        mid,
        total,
        zero_eps: T::of(1e-14) * total,
    };
    // area conservation at the first and last trawl
    for l in [1, k] {
        let s = plan.trawl_area_sum(l);
        let rel = ((s - total) / total).abs();
        if rel > T::of(1e-6) {
            return Err(Error::invalid(format!(
                "slice plan does not conserve area at trawl {l} (rel err {:e})",
                rel.as_f64()
            )));
        }
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp1() -> TrawlFunction<f64> {
        TrawlFunction::exponential(1.0).unwrap()
    }

    #[test]
    fn total_areas_of_unit_trawls() {
        assert!((exp1().total_area().unwrap() - 1.0).abs() < 1e-12);
        let lm = TrawlFunction::long_memory(0.5, 1.5).unwrap();
        assert!((lm.total_area().unwrap() - 1.0).abs() < 1e-12);
        let rect = TrawlFunction::rectangle(1.0).unwrap();
        assert!((rect.total_area().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn autocorrelation_matches_closed_forms() {
        let sm = exp1();
        assert!((sm.autocorrelation(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-10);
        assert_eq!(sm.autocorrelation(0.0).unwrap(), 1.0);

        let lm = TrawlFunction::long_memory(0.5, 1.5).unwrap();
        assert!((lm.autocorrelation(3.0).unwrap() - 0.5).abs() < 1e-10);

        let tri = TrawlFunction::triangle(2.0).unwrap();
        assert_eq!(tri.autocorrelation(2.0).unwrap(), 0.0);
        assert_eq!(tri.autocorrelation(5.0).unwrap(), 0.0);
    }

    #[test]
    fn autocorrelation_rejects_negative_lag() {
        assert!(exp1().autocorrelation(-0.5).is_err());
    }

    #[test]
    fn quadrature_agrees_with_closed_form() {
        // same shape, one with and one without the closed-form antiderivative
        let lm = TrawlFunction::long_memory(0.5, 1.5).unwrap();
        let pw = TrawlFunction::custom(|t: f64| 0.5 * (1.0 - t).powf(-1.5), None, None).unwrap();
        for h in [0.0, 0.7, 3.0, 10.0] {
            let a = lm.overlap(h).unwrap();
            let b = pw.overlap(h).unwrap();
            assert!(((a - b) / a).abs() < 1e-8, "h={h}: {a} vs {b}");
        }
    }

    #[test]
    fn bounded_plan_triangle_example() {
        // phi = 1 + t/2 on [-2, 0], tau = 1: I = 2, s11 = 3/4, s21 = 1/4,
        // s12 = 1/2, s22 = 1/4 (antiderivative t + t^2/4)
        let tri = TrawlFunction::triangle(2.0).unwrap();
        let plan = slice_areas_bounded(&tri, 1.0, 4).unwrap();
        assert_eq!(plan.rows(), 2);
        assert!((plan.area(1, 1) - 0.75).abs() < 1e-12);
        assert!((plan.area(2, 1) - 0.25).abs() < 1e-12);
        assert!((plan.area(1, 2) - 0.50).abs() < 1e-12);
        assert!((plan.area(2, 2) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn bounded_plan_rectangle_and_disjoint() {
        let rect = TrawlFunction::rectangle(1.0).unwrap();
        let plan = slice_areas_bounded(&rect, 0.5, 3).unwrap();
        assert_eq!(plan.rows(), 2);
        assert!((plan.area(1, 1) - 0.5).abs() < 1e-12);
        assert!((plan.area(2, 1) - 0.5).abs() < 1e-12);
        assert_eq!(plan.area(1, 2), 0.0);
        assert!((plan.area(2, 2) - 0.5).abs() < 1e-12);

        // tau >= -T: single row, one slice of the full area
        let plan = slice_areas_bounded(&rect, 1.5, 3).unwrap();
        assert_eq!(plan.rows(), 1);
        assert!((plan.area(1, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bounded_plan_conserves_area_per_trawl() {
        let tri = TrawlFunction::triangle(2.0).unwrap();
        let plan = slice_areas_bounded(&tri, 0.3, 20).unwrap();
        let total = tri.total_area().unwrap();
        for l in 1..=20 {
            let s = plan.trawl_area_sum(l);
            assert!(
                ((s - total) / total).abs() < 1e-9,
                "trawl {l}: {s} vs {total}"
            );
        }
    }

    #[test]
    fn unbounded_plan_exponential_example() {
        // phi = e^t, tau = ln 2, k = 2: a1 = 1/2, a2 = 1/2,
        // staircase [[1/2, 1/2], [1/2]]
        let tau = (2.0f64).ln();
        let plan = slice_areas_unbounded(&exp1(), tau, 2).unwrap();
        assert!((plan.area(1, 1) - 0.5).abs() < 1e-12);
        assert!((plan.area(1, 2) - 0.5).abs() < 1e-12);
        assert!((plan.area(2, 1) - 0.5).abs() < 1e-12);
        assert_eq!(plan.row_len(2), 1);
    }

    #[test]
    fn unbounded_plan_k1_and_row_sums() {
        let plan = slice_areas_unbounded(&exp1(), 0.5, 1).unwrap();
        assert!((plan.area(1, 1) - 1.0).abs() < 1e-12);

        let plan = slice_areas_unbounded(&exp1(), 0.5, 12).unwrap();
        for l in 1..=12 {
            let s = plan.trawl_area_sum(l);
            assert!((s - 1.0).abs() < 1e-9, "trawl {l}: {s}");
        }
    }

    #[test]
    fn contains_point_examples() {
        let rect = TrawlFunction::rectangle(1.0).unwrap();
        assert!(rect.contains_point(0.0, -0.5, 0.5));
        assert!(!rect.contains_point(0.0, 0.5, 0.5)); // s > t

        let steep = TrawlFunction::custom(|t: f64| (2.75 * t).exp(), None, None).unwrap();
        // e^{-2.75} ~ 0.0639 < 0.1, so (-1, 0.1) is outside A_0
        assert!(!steep.contains_point(0.0, -1.0, 0.1));
        assert!(steep.contains_point(0.0, -1.0, 0.05));
    }

    #[test]
    fn inverse_and_horizon() {
        let e = exp1();
        let y = (-1.0f64).exp();
        assert!((e.inverse(y).unwrap() + 1.0).abs() < 1e-10);
        let h = e.horizon(1e-3).unwrap();
        assert!((e.mass_below(h).unwrap() - 1e-3).abs() < 1e-6);
        let tri = TrawlFunction::triangle(2.0).unwrap();
        assert_eq!(tri.horizon(1e-3).unwrap(), -2.0);
    }

    #[test]
    fn rho_is_nonincreasing() {
        let lm = TrawlFunction::long_memory(0.5, 1.5).unwrap();
        let mut prev = 1.0;
        for i in 1..=20 {
            let r = lm.autocorrelation(0.3 * i as f64).unwrap();
            assert!(r <= prev + 1e-12 && (0.0..=1.0).contains(&r));
            prev = r;
        }
    }
}
