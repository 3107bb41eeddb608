//! Levy measures: finite measures with samplable normalized laws, and
//! infinite measures given by a density with sign-separated monotone tails.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::invert::envelope::{LogDensity, LogEnvelope};
use crate::quad::{integrate, integrate_right_tail, QuadOpts};
use crate::real::Real;
use crate::rng::RngStream;

type DynFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Normalized jump law of a finite Levy measure.
#[derive(Clone)]
pub enum JumpLaw<T: Real> {
    /// (value, probability) pairs; probabilities sum to 1.
    Atoms(Vec<(T, T)>),
    /// Quantile function u -> y of the normalized law.
    InverseCdf(DynFn<T>),
}

/// Finite Levy measure `l` with total mass `c` and precomputed compensator
/// drift `int_{-1}^{1} y l(dy)`.
#[derive(Clone)]
pub struct FiniteMeasure<T: Real> {
    mass: T,
    law: JumpLaw<T>,
    compensator: T,
}

impl<T: Real> FiniteMeasure<T> {
    pub fn new(mass: T, law: JumpLaw<T>, compensator: T) -> Result<Self> {
        if !(mass > T::zero() && mass.is_finite()) {
            return Err(Error::invalid("finite measure requires mass > 0"));
        }
        if let JumpLaw::Atoms(atoms) = &law {
            let p: T = atoms.iter().map(|a| a.1).sum();
            if (p - T::one()).abs() > T::of(1e-9) || atoms.iter().any(|a| a.1 < T::zero()) {
                return Err(Error::invalid("atom probabilities must sum to 1"));
            }
        }
        Ok(FiniteMeasure {
            mass,
            law,
            compensator,
        })
    }

    /// Build from atoms given as (value, measure mass) pairs.
    pub fn from_atoms(atoms: Vec<(T, T)>) -> Result<Self> {
        let mass: T = atoms.iter().map(|a| a.1).sum();
        if !(mass > T::zero()) || atoms.iter().any(|a| a.1 < T::zero()) {
            return Err(Error::invalid("atoms need nonnegative masses, positive total"));
        }
        let compensator = atoms
            .iter()
            .filter(|(y, _)| y.abs() <= T::one())
            .map(|(y, m)| *y * *m)
            .sum();
        let probs = atoms.iter().map(|(y, m)| (*y, *m / mass)).collect();
        FiniteMeasure::new(mass, JumpLaw::Atoms(probs), compensator)
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn compensator(&self) -> T {
        self.compensator
    }

    pub fn atoms(&self) -> Option<&[(T, T)]> {
        match &self.law {
            JumpLaw::Atoms(a) => Some(a),
            _ => None,
        }
    }

    pub fn sample_jump(&self, rng: &mut RngStream) -> T {
        match &self.law {
            JumpLaw::Atoms(atoms) => {
                let u = T::of(rng.random::<f64>());
                let mut acc = T::zero();
                for (y, p) in atoms {
                    acc += *p;
                    if u < acc {
                        return *y;
                    }
                }
                atoms.last().map(|a| a.0).unwrap_or_else(T::zero)
            }
            JumpLaw::InverseCdf(q) => q(T::of(rng.random::<f64>())),
        }
    }
}

/// One side of an infinite Levy density, in the magnitude coordinate
/// `u = |y| > 0`. Closed forms are optional; quadrature fills the gaps.
#[derive(Clone)]
pub struct SideDensity<T: Real> {
    /// Unnormalized density l'(u), u > 0.
    pub density: DynFn<T>,
    /// Upper end of the support (may be infinite).
    pub upper: T,
    /// eps -> int_eps^upper l'(u) du, when known in closed form.
    pub mass_above: Option<DynFn<T>>,
    /// (a, b) -> int_a^b u l'(u) du, when known in closed form.
    pub moment1_band: Option<Arc<dyn Fn(T, T) -> T + Send + Sync>>,
    /// eps -> int_0^eps u^2 l'(u) du, when known in closed form.
    pub moment2_below: Option<DynFn<T>>,
    /// Limit slope of log l' at +inf (for envelope tails).
    pub tail_log_slope: Option<T>,
    /// (eps, v) -> quantile of the eps-truncated normalized side law.
    pub inverse_cdf: Option<Arc<dyn Fn(T, T) -> T + Send + Sync>>,
    /// Interior inflection points of log l'.
    pub inflections: Vec<T>,
}

impl<T: Real> SideDensity<T> {
    pub fn new(density: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        SideDensity {
            density: Arc::new(density),
            upper: T::infinity(),
            mass_above: None,
            moment1_band: None,
            moment2_below: None,
            tail_log_slope: None,
            inverse_cdf: None,
            inflections: Vec::new(),
        }
    }

    fn quad_opts() -> QuadOpts {
        QuadOpts::tol(1e-10, 1e-9)
    }

    pub fn mass_above(&self, eps: T) -> Result<T> {
        if eps >= self.upper {
            return Ok(T::zero());
        }
        if let Some(f) = &self.mass_above {
            return Ok(f(eps));
        }
        let d = self.density.clone();
        if self.upper.is_infinite() {
            integrate_right_tail(move |u| d(u), eps, Self::quad_opts())
        } else {
            integrate(move |u| d(u), eps, self.upper, Self::quad_opts())
        }
    }

    pub fn moment1_band(&self, a: T, b: T) -> Result<T> {
        let b = b.min(self.upper);
        if a >= b {
            return Ok(T::zero());
        }
        if let Some(f) = &self.moment1_band {
            return Ok(f(a, b));
        }
        let d = self.density.clone();
        if b.is_infinite() {
            integrate_right_tail(move |u| u * d(u), a, Self::quad_opts())
        } else {
            integrate(move |u| u * d(u), a, b, Self::quad_opts())
        }
    }

    pub fn moment2_below(&self, eps: T) -> Result<T> {
        let eps = eps.min(self.upper);
        if eps <= T::zero() {
            return Ok(T::zero());
        }
        if let Some(f) = &self.moment2_below {
            return Ok(f(eps));
        }
        let d = self.density.clone();
        integrate(move |u| u * u * d(u), T::zero(), eps, Self::quad_opts())
    }

    /// Second moment of the whole side, possibly infinite.
    pub fn moment2_total(&self) -> Result<T> {
        let inner = self.moment2_below(T::one())?;
        let d = self.density.clone();
        let outer = if self.upper.is_infinite() {
            integrate_right_tail(move |u| u * u * d(u), T::one(), Self::quad_opts())
        } else {
            integrate(move |u| u * u * d(u), T::one(), self.upper, Self::quad_opts())
        };
        match outer {
            Ok(o) => Ok(inner + o),
            Err(_) => Ok(T::infinity()),
        }
    }

    fn build_envelope(&self, eps: T) -> Result<LogEnvelope<T>> {
        let d = self.density.clone();
        let mut logd = LogDensity::new(move |u: T| d(u).max(T::of(1e-300)).ln(), eps, self.upper)
            .with_inflections(
                self.inflections
                    .iter()
                    .copied()
                    .filter(|p| *p > eps && *p < self.upper)
                    .collect(),
            );
        if let Some(m) = self.tail_log_slope {
            logd = logd.with_tail_slope(m);
        }
        LogEnvelope::build(&logd, 8)
    }
}

/// Sampler for the eps-truncated normalized law of an infinite measure.
pub struct TruncatedJumpSampler<T: Real> {
    pos: Option<(T, SideSampler<T>)>,
    neg: Option<(T, SideSampler<T>)>,
    total: T,
}

enum SideSampler<T: Real> {
    Envelope(LogEnvelope<T>),
    Inverse { eps: T, q: Arc<dyn Fn(T, T) -> T + Send + Sync> },
}

impl<T: Real> TruncatedJumpSampler<T> {
    pub fn total_mass(&self) -> T {
        self.total
    }

    pub fn sample(&self, rng: &mut RngStream) -> T {
        let u = T::of(rng.random::<f64>()) * self.total;
        let (side, sign) = match (&self.pos, &self.neg) {
            (Some(p), Some(n)) => {
                if u < p.0 {
                    (&p.1, T::one())
                } else {
                    (&n.1, -T::one())
                }
            }
            (Some(p), None) => (&p.1, T::one()),
            (None, Some(n)) => (&n.1, -T::one()),
            (None, None) => return T::zero(),
        };
        let mag = match side {
            SideSampler::Envelope(env) => env.sample(rng),
            SideSampler::Inverse { eps, q } => q(*eps, T::of(rng.random::<f64>())),
        };
        sign * mag
    }
}

/// Infinite Levy measure specified by a density on each side of zero.
#[derive(Clone)]
pub struct DensityMeasure<T: Real> {
    pub pos: Option<SideDensity<T>>,
    pub neg: Option<SideDensity<T>>,
}

impl<T: Real> DensityMeasure<T> {
    pub fn one_sided(pos: SideDensity<T>) -> Self {
        DensityMeasure {
            pos: Some(pos),
            neg: None,
        }
    }

    pub fn symmetric(side: SideDensity<T>) -> Self {
        DensityMeasure {
            pos: Some(side.clone()),
            neg: Some(side),
        }
    }

    pub fn two_sided(pos: SideDensity<T>, neg: SideDensity<T>) -> Self {
        DensityMeasure {
            pos: Some(pos),
            neg: Some(neg),
        }
    }

    /// `l^eps(R)`, the mass outside (-eps, eps).
    pub fn mass_outside(&self, eps: T) -> Result<T> {
        let mut m = T::zero();
        if let Some(p) = &self.pos {
            m += p.mass_above(eps)?;
        }
        if let Some(n) = &self.neg {
            m += n.mass_above(eps)?;
        }
        Ok(m)
    }

    /// Compensator on the retained band: `int_{eps<|y|<1} y l(dy)`.
    pub fn compensator_eps(&self, eps: T) -> Result<T> {
        let mut c = T::zero();
        if let Some(p) = &self.pos {
            c += p.moment1_band(eps, T::one())?;
        }
        if let Some(n) = &self.neg {
            c -= n.moment1_band(eps, T::one())?;
        }
        Ok(c)
    }

    /// `int_{-eps}^{eps} y^2 l(dy)`.
    pub fn second_moment_inside(&self, eps: T) -> Result<T> {
        let mut m = T::zero();
        if let Some(p) = &self.pos {
            m += p.moment2_below(eps)?;
        }
        if let Some(n) = &self.neg {
            m += n.moment2_below(eps)?;
        }
        Ok(m)
    }

    /// Mean of the full measure beyond |y| > 1 (for moment formulas); the
    /// signed integral, or None when it diverges.
    pub fn mean_outside_unit(&self) -> Option<T> {
        let p = match &self.pos {
            Some(s) => match s.moment1_band(T::one(), T::infinity()) {
                Ok(v) if v.is_finite() => v,
                _ => return None,
            },
            None => T::zero(),
        };
        let n = match &self.neg {
            Some(s) => match s.moment1_band(T::one(), T::infinity()) {
                Ok(v) if v.is_finite() => v,
                _ => return None,
            },
            None => T::zero(),
        };
        Some(p - n)
    }

    /// Full second moment `int y^2 l(dy)`, possibly infinite.
    pub fn second_moment_total(&self) -> Result<T> {
        let mut m = T::zero();
        if let Some(p) = &self.pos {
            m += p.moment2_total()?;
        }
        if let Some(n) = &self.neg {
            m += n.moment2_total()?;
        }
        Ok(m)
    }

    /// Build the sampler of the eps-truncated normalized law.
    pub fn build_sampler(&self, eps: T) -> Result<TruncatedJumpSampler<T>> {
        if !(eps > T::zero()) {
            return Err(Error::invalid(
                "infinite Levy measures require a truncation eps > 0",
            ));
        }
        let mut total = T::zero();
        let pos = match &self.pos {
            Some(s) => {
                let m = s.mass_above(eps)?;
                total += m;
                if m > T::zero() {
                    let sampler = match &s.inverse_cdf {
                        Some(q) => SideSampler::Inverse {
                            eps,
                            q: q.clone(),
                        },
                        None => SideSampler::Envelope(s.build_envelope(eps)?),
                    };
                    Some((m, sampler))
                } else {
                    None
                }
            }
            None => None,
        };
        let neg = match &self.neg {
            Some(s) => {
                let m = s.mass_above(eps)?;
                total += m;
                if m > T::zero() {
                    let sampler = match &s.inverse_cdf {
                        Some(q) => SideSampler::Inverse {
                            eps,
                            q: q.clone(),
                        },
                        None => SideSampler::Envelope(s.build_envelope(eps)?),
                    };
                    Some((m, sampler))
                } else {
                    None
                }
            }
            None => None,
        };
        Ok(TruncatedJumpSampler { pos, neg, total })
    }

    /// Smallest power-of-two eps with truncated second moment at most
    /// `rel` times the second moment inside the unit ball.
    pub fn epsilon_for_relative_mse(&self, rel: T) -> Result<T> {
        let scale = self.second_moment_inside(T::one())?;
        if !(scale > T::zero()) {
            return Ok(T::of(0.5));
        }
        let target = rel * scale;
        let mut eps = T::of(0.5);
        for _ in 0..120 {
            if self.second_moment_inside(eps)? <= target {
                return Ok(eps);
            }
            eps = eps * T::of(0.5);
        }
        Err(Error::NoConvergence {
            iterations: 120,
            residual: eps.as_f64(),
        })
    }
}

/// A Levy measure: finite with samplable law, or infinite via a density.
#[derive(Clone)]
pub enum LevyMeasureSpec<T: Real> {
    Finite(FiniteMeasure<T>),
    InfiniteDensity(DensityMeasure<T>),
}

impl<T: Real> LevyMeasureSpec<T> {
    /// Truncation MSE per unit area: `int_{-eps}^{eps} y^2 l(dy)`.
    pub fn truncated_second_moment(&self, eps: T) -> Result<T> {
        match self {
            LevyMeasureSpec::Finite(f) => match f.atoms() {
                Some(atoms) => Ok(atoms
                    .iter()
                    .filter(|(y, _)| y.abs() < eps)
                    .map(|(y, p)| *y * *y * *p * f.mass())
                    .sum()),
                None => Err(Error::Unsupported(
                    "truncation MSE needs atoms or a density".into(),
                )),
            },
            LevyMeasureSpec::InfiniteDensity(d) => d.second_moment_inside(eps),
        }
    }
}

/// MSE of neglecting jumps below eps over a set of the given area:
/// `area * int_{-eps}^{eps} y^2 l(dy)` (closed form or quadrature).
pub fn truncation_mse<T: Real>(measure: &LevyMeasureSpec<T>, eps: T, area: T) -> Result<T> {
    if eps < T::zero() || !(area >= T::zero()) {
        return Err(Error::invalid("truncation_mse needs eps >= 0, area >= 0"));
    }
    if eps == T::zero() {
        return Ok(T::zero());
    }
    Ok(area * measure.truncated_second_moment(eps)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The Levy density 2 y^{-1} e^{-3y} on y > 0, i.e. the Gamma(2, 1/3)
    /// subordinator density.
    fn fig5_density() -> DensityMeasure<f64> {
        crate::levy::gamma_jump_density(2.0, 1.0 / 3.0)
    }

    #[test]
    fn point_mass_measure() {
        let m = FiniteMeasure::from_atoms(vec![(1.0, 5.0)]).unwrap();
        assert_eq!(m.mass(), 5.0);
        assert_eq!(m.compensator(), 5.0);
        let mut rng = RngStream::from_seed(1);
        for _ in 0..50 {
            assert_eq!(m.sample_jump(&mut rng), 1.0);
        }
    }

    #[test]
    fn truncation_mse_examples() {
        // finite measure supported outside (-eps, eps) -> 0
        let spec = LevyMeasureSpec::Finite(FiniteMeasure::from_atoms(vec![(1.0, 5.0)]).unwrap());
        assert_eq!(truncation_mse(&spec, 0.5, 2.0).unwrap(), 0.0);

        // quadrature matches the closed form for the 2 y^{-1} e^{-3y} density
        let d = fig5_density();
        let closed = LevyMeasureSpec::InfiniteDensity(d.clone());
        let mut no_closed = d;
        no_closed.pos.as_mut().unwrap().moment2_below = None;
        let open = LevyMeasureSpec::InfiniteDensity(no_closed);
        for eps in [5e-3, 0.02, 0.1] {
            let a = truncation_mse(&closed, eps, 1.0).unwrap();
            let b = truncation_mse(&open, eps, 1.0).unwrap();
            assert!((a - b).abs() < 1e-10, "eps={eps}: {a} vs {b}");
        }

        // monotone in eps
        let m1 = truncation_mse(&closed, 0.005, 1.0).unwrap();
        let m2 = truncation_mse(&closed, 0.01, 1.0).unwrap();
        assert!(m1 <= m2);
    }

    #[test]
    fn truncated_sampler_mean_matches_quadrature() {
        let d = fig5_density();
        let eps = 5e-3;
        let sampler = d.build_sampler(eps).unwrap();
        let mass = d.mass_outside(eps).unwrap();
        let m1 = d.pos.as_ref().unwrap().moment1_band(eps, f64::INFINITY).unwrap();
        let want = m1 / mass;
        let mut rng = RngStream::from_seed(9);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        let se = (var / n as f64).sqrt();
        assert!(
            (mean - want).abs() < 4.0 * se,
            "mean {mean} want {want} se {se}"
        );
    }

    #[test]
    fn symmetric_density_mean_near_zero() {
        let side = {
            let mut s = SideDensity::new(|y: f64| (-2.0 * y).exp());
            s.tail_log_slope = Some(-2.0);
            s
        };
        let d = DensityMeasure::symmetric(side);
        assert!(d.compensator_eps(0.01).unwrap().abs() < 1e-9);
        let sampler = d.build_sampler(0.01).unwrap();
        let mut rng = RngStream::from_seed(5);
        let n = 50_000;
        let mean: f64 = (0..n).map(|_| sampler.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "{mean}");
    }
}
