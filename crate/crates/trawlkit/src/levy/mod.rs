//! Levy seeds: named infinitely divisible families and raw triplets, their
//! cumulant transforms, moments, set-law samplers and the Levy-Ito split.

mod measure;

use std::sync::Arc;

use num_complex::Complex;
use rand::Rng;
use rand_distr::Distribution;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_right_tail, QuadOpts};
use crate::real::Real;
use crate::rng::RngStream;

pub use measure::{
    truncation_mse, DensityMeasure, FiniteMeasure, JumpLaw, LevyMeasureSpec, SideDensity,
    TruncatedJumpSampler,
};

/// A possibly-undefined moment. Infinite and undefined moments are explicit
/// values so downstream error-bound code can refuse loudly instead of
/// propagating NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment<T> {
    Value(T),
    Undefined,
}

impl<T: Real> Moment<T> {
    pub fn value(self) -> Option<T> {
        match self {
            Moment::Value(v) if v.is_finite() => Some(v),
            _ => None,
        }
    }

    pub fn expect_finite(self, what: &str) -> Result<T> {
        self.value()
            .ok_or_else(|| Error::UndefinedMoment(what.into()))
    }
}

/// Raw Levy-Khintchine triplet (drift, Gaussian variance, jump measure).
#[derive(Clone)]
pub struct CustomTriplet<T: Real> {
    pub drift: T,
    pub gaussian_variance: T,
    pub measure: LevyMeasureSpec<T>,
}

/// Distributional specification of the Levy seed L'.
#[derive(Clone)]
pub enum LevySeed<T: Real> {
    Poisson { rate: T },
    Skellam { rate_up: T, rate_down: T },
    Gaussian { mean: T, variance: T },
    Cauchy { scale: T },
    Gamma { shape: T, scale: T },
    InverseGaussian { delta: T, gamma: T },
    Stable { alpha: T, beta: T, scale: T, location: T },
    Custom(Box<CustomTriplet<T>>),
}

impl<T: Real> std::fmt::Debug for LevySeed<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LevySeed::Poisson { rate } => write!(f, "Poisson({:?})", rate),
            LevySeed::Skellam { rate_up, rate_down } => {
                write!(f, "Skellam({:?}, {:?})", rate_up, rate_down)
            }
            LevySeed::Gaussian { mean, variance } => {
                write!(f, "Gaussian({:?}, {:?})", mean, variance)
            }
            LevySeed::Cauchy { scale } => write!(f, "Cauchy({:?})", scale),
            LevySeed::Gamma { shape, scale } => write!(f, "Gamma({:?}, {:?})", shape, scale),
            LevySeed::InverseGaussian { delta, gamma } => {
                write!(f, "InverseGaussian({:?}, {:?})", delta, gamma)
            }
            LevySeed::Stable {
                alpha,
                beta,
                scale,
                location,
            } => write!(
                f,
                "Stable({:?}, {:?}, {:?}, {:?})",
                alpha, beta, scale, location
            ),
            LevySeed::Custom(_) => write!(f, "Custom(triplet)"),
        }
    }
}

impl<T: Real> LevySeed<T> {
    pub fn poisson(rate: T) -> Result<Self> {
        if !(rate > T::zero() && rate.is_finite()) {
            return Err(Error::invalid("Poisson rate must be > 0"));
        }
        Ok(LevySeed::Poisson { rate })
    }

    pub fn skellam(rate_up: T, rate_down: T) -> Result<Self> {
        if !(rate_up > T::zero() && rate_down > T::zero()) {
            return Err(Error::invalid("Skellam rates must be > 0"));
        }
        Ok(LevySeed::Skellam { rate_up, rate_down })
    }

    pub fn gaussian(mean: T, variance: T) -> Result<Self> {
        if !(variance >= T::zero() && mean.is_finite() && variance.is_finite()) {
            return Err(Error::invalid("Gaussian variance must be >= 0"));
        }
        Ok(LevySeed::Gaussian { mean, variance })
    }

    pub fn cauchy(scale: T) -> Result<Self> {
        if !(scale > T::zero()) {
            return Err(Error::invalid("Cauchy scale must be > 0"));
        }
        Ok(LevySeed::Cauchy { scale })
    }

    pub fn gamma(shape: T, scale: T) -> Result<Self> {
        if !(shape > T::zero() && scale > T::zero()) {
            return Err(Error::invalid("Gamma shape and scale must be > 0"));
        }
        Ok(LevySeed::Gamma { shape, scale })
    }

    pub fn inverse_gaussian(delta: T, gamma: T) -> Result<Self> {
        if !(delta > T::zero() && gamma > T::zero()) {
            return Err(Error::invalid("IG delta and gamma must be > 0"));
        }
        Ok(LevySeed::InverseGaussian { delta, gamma })
    }

    pub fn stable(alpha: T, beta: T, scale: T, location: T) -> Result<Self> {
        let ok = alpha > T::zero()
            && alpha <= T::of(2.0)
            && beta >= -T::one()
            && beta <= T::one()
            && scale > T::zero()
            && location.is_finite();
        if !ok {
            return Err(Error::invalid(
                "Stable requires alpha in (0,2], beta in [-1,1], scale > 0",
            ));
        }
        Ok(LevySeed::Stable {
            alpha,
            beta,
            scale,
            location,
        })
    }

    /// Raw triplet. For density-specified measures the Levy integrability
    /// condition `int min(1, y^2) l(dy) < inf` is checked numerically.
    pub fn custom(drift: T, gaussian_variance: T, measure: LevyMeasureSpec<T>) -> Result<Self> {
        if !(gaussian_variance >= T::zero() && drift.is_finite()) {
            return Err(Error::invalid("triplet needs a >= 0 and finite drift"));
        }
        if let LevyMeasureSpec::InfiniteDensity(d) = &measure {
            let inner = d.second_moment_inside(T::one())?;
            let outer = d.mass_outside(T::one())?;
            if !(inner.is_finite() && outer.is_finite()) {
                return Err(Error::invalid(
                    "jump density violates int min(1, y^2) l(dy) < inf",
                ));
            }
        }
        Ok(LevySeed::Custom(Box::new(CustomTriplet {
            drift,
            gaussian_variance,
            measure,
        })))
    }

    /// Cumulant transform C(theta, L') = log E exp(i theta L').
    pub fn cumulant(&self, theta: T) -> Result<Complex<T>> {
        if !theta.is_finite() {
            return Err(Error::invalid("cumulant requires finite theta"));
        }
        let i = Complex::new(T::zero(), T::one());
        Ok(match self {
            LevySeed::Poisson { rate } => {
                ((i * theta).exp() - T::one()) * *rate
            }
            LevySeed::Skellam { rate_up, rate_down } => {
                ((i * theta).exp() - T::one()) * *rate_up
                    + ((-i * theta).exp() - T::one()) * *rate_down
            }
            LevySeed::Gaussian { mean, variance } => {
                i * theta * *mean - Complex::new(theta * theta * *variance * T::of(0.5), T::zero())
            }
            LevySeed::Cauchy { scale } => Complex::new(-*scale * theta.abs(), T::zero()),
            LevySeed::Gamma { shape, scale } => {
                // -k log(1 - i theta scale)
                -(Complex::new(T::one(), -theta * *scale)).ln() * *shape
            }
            LevySeed::InverseGaussian { delta, gamma } => {
                // delta (gamma - sqrt(gamma^2 - 2 i theta))
                let root = (Complex::new(*gamma * *gamma, T::zero())
                    - i * theta * T::of(2.0))
                .sqrt();
                (Complex::new(*gamma, T::zero()) - root) * *delta
            }
            LevySeed::Stable {
                alpha,
                beta,
                scale,
                location,
            } => stable_cumulant(*alpha, *beta, *scale, *location, theta),
            LevySeed::Custom(t) => {
                let mut c = i * theta * t.drift
                    - Complex::new(
                        theta * theta * t.gaussian_variance * T::of(0.5),
                        T::zero(),
                    );
                c += jump_cumulant(&t.measure, theta)?;
                c
            }
        })
    }

    /// Mean and variance of L', with explicit markers when undefined.
    pub fn mean_var(&self) -> (Moment<T>, Moment<T>) {
        match self {
            LevySeed::Poisson { rate } => (Moment::Value(*rate), Moment::Value(*rate)),
            LevySeed::Skellam { rate_up, rate_down } => (
                Moment::Value(*rate_up - *rate_down),
                Moment::Value(*rate_up + *rate_down),
            ),
            LevySeed::Gaussian { mean, variance } => {
                (Moment::Value(*mean), Moment::Value(*variance))
            }
            LevySeed::Cauchy { .. } => (Moment::Undefined, Moment::Undefined),
            LevySeed::Gamma { shape, scale } => (
                Moment::Value(*shape * *scale),
                Moment::Value(*shape * *scale * *scale),
            ),
            LevySeed::InverseGaussian { delta, gamma } => (
                Moment::Value(*delta / *gamma),
                Moment::Value(*delta / (*gamma * *gamma * *gamma)),
            ),
            LevySeed::Stable {
                alpha,
                beta: _,
                scale,
                location,
            } => {
                if *alpha == T::of(2.0) {
                    (
                        Moment::Value(*location),
                        Moment::Value(T::of(2.0) * *scale * *scale),
                    )
                } else if *alpha > T::one() {
                    (Moment::Value(*location), Moment::Undefined)
                } else {
                    (Moment::Undefined, Moment::Undefined)
                }
            }
            // E L' = xi + int_{|y|>1} y l(dy), Var L' = a + int y^2 l(dy)
            LevySeed::Custom(t) => match &t.measure {
                LevyMeasureSpec::Finite(f) => match f.atoms() {
                    Some(atoms) => {
                        let jm: T = atoms.iter().map(|(y, p)| *y * *p).sum::<T>() * f.mass();
                        let jv: T = atoms.iter().map(|(y, p)| *y * *y * *p).sum::<T>() * f.mass();
                        (
                            Moment::Value(t.drift + jm - f.compensator()),
                            Moment::Value(t.gaussian_variance + jv),
                        )
                    }
                    None => (Moment::Undefined, Moment::Undefined),
                },
                LevyMeasureSpec::InfiniteDensity(d) => {
                    let mean = match d.mean_outside_unit() {
                        Some(mo) => Moment::Value(t.drift + mo),
                        None => Moment::Undefined,
                    };
                    let var = match d.second_moment_total() {
                        Ok(v) if v.is_finite() => Moment::Value(t.gaussian_variance + v),
                        _ => Moment::Undefined,
                    };
                    (mean, var)
                }
            },
        }
    }

    /// The Levy-Khintchine triplet split: Gaussian part (xi, a, 0) and jump
    /// part (0, 0, l). Sampling the parts independently and summing
    /// reproduces the law of the original seed.
    pub fn levy_ito_split(&self) -> Result<(LevySeed<T>, LevySeed<T>)> {
        let (drift, avar, measure): (T, T, Option<LevyMeasureSpec<T>>) = match self {
            LevySeed::Gaussian { mean, variance } => (*mean, *variance, None),
            LevySeed::Poisson { rate } => (
                *rate,
                T::zero(),
                Some(LevyMeasureSpec::Finite(FiniteMeasure::from_atoms(vec![(
                    T::one(),
                    *rate,
                )])?)),
            ),
            LevySeed::Skellam { rate_up, rate_down } => (
                *rate_up - *rate_down,
                T::zero(),
                Some(LevyMeasureSpec::Finite(FiniteMeasure::from_atoms(vec![
                    (T::one(), *rate_up),
                    (-T::one(), *rate_down),
                ])?)),
            ),
            LevySeed::Gamma { shape, scale } => {
                let drift = *shape * *scale * (T::one() - (-(*scale).recip()).exp());
                (
                    drift,
                    T::zero(),
                    Some(LevyMeasureSpec::InfiniteDensity(gamma_jump_density(
                        *shape, *scale,
                    ))),
                )
            }
            LevySeed::Cauchy { scale } => (
                T::zero(),
                T::zero(),
                Some(LevyMeasureSpec::InfiniteDensity(cauchy_jump_density(
                    *scale,
                ))),
            ),
            LevySeed::InverseGaussian { delta, gamma } => {
                let d = ig_jump_density(*delta, *gamma);
                let drift = match &d.pos {
                    Some(s) => s.moment1_band(T::zero(), T::one())?,
                    None => T::zero(),
                };
                (drift, T::zero(), Some(LevyMeasureSpec::InfiniteDensity(d)))
            }
            LevySeed::Stable { .. } => {
                return Err(Error::Unsupported(
                    "triplet of the Stable family is not implemented; \
                     split is refused rather than approximated"
                        .into(),
                ))
            }
            LevySeed::Custom(t) => (
                t.drift,
                t.gaussian_variance,
                Some(t.measure.clone()),
            ),
        };
        let gaussian = LevySeed::Gaussian {
            mean: drift,
            variance: avar,
        };
        let jump = match measure {
            Some(m) => LevySeed::custom(T::zero(), T::zero(), m)?,
            None => LevySeed::Gaussian {
                mean: T::zero(),
                variance: T::zero(),
            },
        };
        Ok((gaussian, jump))
    }

    /// The jump measure of the seed, when it has one.
    pub fn jump_measure(&self) -> Result<LevyMeasureSpec<T>> {
        match self {
            LevySeed::Custom(t) => Ok(t.measure.clone()),
            _ => {
                let (_, jump) = self.levy_ito_split()?;
                match jump {
                    LevySeed::Custom(t) => Ok(t.measure),
                    _ => Err(Error::Unsupported("seed has no jump part".into())),
                }
            }
        }
    }

    /// n iid draws with the law of L(A) for Leb(A) = area, using the
    /// family's area scaling.
    pub fn sample_set_law(
        &self,
        area: T,
        n: usize,
        rng: &mut RngStream,
    ) -> Result<Vec<T>> {
        if !(area > T::zero() && area.is_finite()) {
            return Err(Error::invalid("set law requires area > 0"));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let a = area.as_f64();
        let out: Vec<T> = match self {
            LevySeed::Poisson { rate } => {
                let d = rand_distr::Poisson::new(rate.as_f64() * a)
                    .map_err(|e| Error::invalid(format!("poisson sampler: {e}")))?;
                (0..n).map(|_| T::of(d.sample(rng))).collect()
            }
            LevySeed::Skellam { rate_up, rate_down } => {
                let up = rand_distr::Poisson::new(rate_up.as_f64() * a)
                    .map_err(|e| Error::invalid(format!("poisson sampler: {e}")))?;
                let down = rand_distr::Poisson::new(rate_down.as_f64() * a)
                    .map_err(|e| Error::invalid(format!("poisson sampler: {e}")))?;
                (0..n)
                    .map(|_| T::of(up.sample(rng) - down.sample(rng)))
                    .collect()
            }
            LevySeed::Gaussian { mean, variance } => {
                let d = rand_distr::Normal::new(mean.as_f64() * a, (variance.as_f64() * a).sqrt())
                    .map_err(|e| Error::invalid(format!("normal sampler: {e}")))?;
                (0..n).map(|_| T::of(d.sample(rng))).collect()
            }
            LevySeed::Cauchy { scale } => {
                let d = rand_distr::Cauchy::new(0.0, scale.as_f64() * a)
                    .map_err(|e| Error::invalid(format!("cauchy sampler: {e}")))?;
                (0..n).map(|_| T::of(d.sample(rng))).collect()
            }
            LevySeed::Gamma { shape, scale } => {
                let d = rand_distr::Gamma::new(shape.as_f64() * a, scale.as_f64())
                    .map_err(|e| Error::invalid(format!("gamma sampler: {e}")))?;
                (0..n).map(|_| T::of(d.sample(rng))).collect()
            }
            LevySeed::InverseGaussian { delta, gamma } => {
                let (dd, gg) = (delta.as_f64() * a, gamma.as_f64());
                let d = rand_distr::InverseGaussian::new(dd / gg, dd * dd)
                    .map_err(|e| Error::invalid(format!("inverse gaussian sampler: {e}")))?;
                (0..n).map(|_| T::of(d.sample(rng))).collect()
            }
            LevySeed::Stable {
                alpha,
                beta,
                scale,
                location,
            } => {
                let al = alpha.as_f64();
                let be = beta.as_f64();
                let c = scale.as_f64() * a.powf(1.0 / al);
                let mu = location.as_f64() * a;
                (0..n)
                    .map(|_| T::of(sample_stable(al, be, c, mu, rng)))
                    .collect()
            }
            LevySeed::Custom(t) => {
                let mut out = Vec::with_capacity(n);
                sample_custom(t, area, n, &mut out, rng)?;
                out
            }
        };
        Ok(out)
    }

    /// Single draw convenience.
    pub fn sample_one(&self, area: T, rng: &mut RngStream) -> Result<T> {
        Ok(self.sample_set_law(area, 1, rng)?[0])
    }
}

/// C(theta, L(A)) = Leb(A) C(theta, L').
pub fn set_law_cumulant<T: Real>(
    seed: &LevySeed<T>,
    area: T,
    theta: T,
) -> Result<Complex<T>> {
    if !(area > T::zero()) {
        return Err(Error::invalid("set law requires area > 0"));
    }
    Ok(seed.cumulant(theta)? * area)
}

/// Mean and variance of L(A): (area E L', area Var L').
pub fn set_mean_var<T: Real>(seed: &LevySeed<T>, area: T) -> Result<(Moment<T>, Moment<T>)> {
    if !(area > T::zero()) {
        return Err(Error::invalid("set law requires area > 0"));
    }
    let (m, v) = seed.mean_var();
    let m = match m {
        Moment::Value(x) => Moment::Value(x * area),
        Moment::Undefined => Moment::Undefined,
    };
    let v = match v {
        Moment::Value(x) => Moment::Value(x * area),
        Moment::Undefined => Moment::Undefined,
    };
    Ok((m, v))
}

/// n iid draws from the eps-truncated normalized jump law of a measure.
pub fn sample_levy_measure<T: Real>(
    measure: &LevyMeasureSpec<T>,
    eps: T,
    n: usize,
    rng: &mut RngStream,
) -> Result<Vec<T>> {
    match measure {
        LevyMeasureSpec::Finite(f) => {
            Ok((0..n).map(|_| f.sample_jump(rng)).collect())
        }
        LevyMeasureSpec::InfiniteDensity(d) => {
            if !(eps > T::zero()) {
                return Err(Error::invalid(
                    "an infinite measure cannot be sampled with eps = 0",
                ));
            }
            let sampler = d.build_sampler(eps)?;
            Ok((0..n).map(|_| sampler.sample(rng)).collect())
        }
    }
}

fn sample_custom<T: Real>(
    t: &CustomTriplet<T>,
    area: T,
    n: usize,
    out: &mut Vec<T>,
    rng: &mut RngStream,
) -> Result<()> {
    let a = area.as_f64();
    let gauss = rand_distr::Normal::new(
        t.drift.as_f64() * a,
        (t.gaussian_variance.as_f64() * a).sqrt(),
    )
    .map_err(|e| Error::invalid(format!("normal sampler: {e}")))?;
    match &t.measure {
        LevyMeasureSpec::Finite(f) => {
            let pois = rand_distr::Poisson::new(f.mass().as_f64() * a)
                .map_err(|e| Error::invalid(format!("poisson sampler: {e}")))?;
            let comp = f.compensator() * area;
            for _ in 0..n {
                let mut x = T::of(gauss.sample(rng)) - comp;
                let cnt = pois.sample(rng) as u64;
                for _ in 0..cnt {
                    x += f.sample_jump(rng);
                }
                out.push(x);
            }
        }
        LevyMeasureSpec::InfiniteDensity(d) => {
            // truncated compound Poisson surrogate; eps chosen so the
            // neglected-jump variance is negligible relative to the law
            let eps = d.epsilon_for_relative_mse(T::of(1e-10))?;
            let sampler = d.build_sampler(eps)?;
            let mass = sampler.total_mass();
            let comp = d.compensator_eps(eps)? * area;
            let pois = rand_distr::Poisson::new(mass.as_f64() * a)
                .map_err(|e| Error::invalid(format!("poisson sampler: {e}")))?;
            for _ in 0..n {
                let mut x = T::of(gauss.sample(rng)) - comp;
                let cnt = pois.sample(rng) as u64;
                for _ in 0..cnt {
                    x += sampler.sample(rng);
                }
                out.push(x);
            }
        }
    }
    Ok(())
}

/// Stable cumulant in the S1 parameterization: for alpha != 1,
/// `i theta mu - |c theta|^alpha (1 - i beta sgn(theta) tan(pi alpha/2))`;
/// for alpha = 1 the log-branch `Phi = -(2/pi) log|theta|`.
fn stable_cumulant<T: Real>(alpha: T, beta: T, c: T, mu: T, theta: T) -> Complex<T> {
    let i = Complex::new(T::zero(), T::one());
    if theta == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    let sgn = if theta > T::zero() { T::one() } else { -T::one() };
    let phi = if alpha == T::one() {
        -T::of(2.0 / std::f64::consts::PI) * theta.abs().ln()
    } else {
        (T::of(std::f64::consts::PI) * alpha * T::of(0.5)).tan()
    };
    let amp = (c * theta).abs().powf(alpha);
    i * theta * mu - (Complex::new(T::one(), T::zero()) - i * (beta * sgn * phi)) * amp
}

/// Chambers-Mallows-Stuck draw from Stable(alpha, beta, c, mu) in S1.
/// The alpha = 1 scaling carries the (2/pi) beta c log c drift correction.
pub(crate) fn sample_stable(
    alpha: f64,
    beta: f64,
    c: f64,
    mu: f64,
    rng: &mut RngStream,
) -> f64 {
    use std::f64::consts::{FRAC_PI_2, PI};
    let u: f64 = rng.random::<f64>().mul_add(PI, -FRAC_PI_2); // U(-pi/2, pi/2)
    let w: f64 = -rng.random::<f64>().max(1e-300).ln(); // Exp(1)
    let x0 = if (alpha - 1.0).abs() > 1e-12 {
        let ta = (FRAC_PI_2 * alpha).tan();
        let b = (beta * ta).atan() / alpha;
        let s = (1.0 + beta * beta * ta * ta).powf(0.5 / alpha);
        let num = (alpha * (u + b)).sin();
        let den = u.cos().powf(1.0 / alpha);
        let tail = ((u - alpha * (u + b)).cos() / w).powf((1.0 - alpha) / alpha);
        s * num / den * tail
    } else {
        let bu = FRAC_PI_2 + beta * u;
        (2.0 / PI) * (bu * u.tan() - beta * ((FRAC_PI_2 * w * u.cos()) / bu).ln())
    };
    if (alpha - 1.0).abs() > 1e-12 {
        c * x0 + mu
    } else {
        c * x0 + mu + (2.0 / PI) * beta * c * c.ln()
    }
}

/// Jump-part cumulant `int (e^{i theta y} - 1 - i theta y 1_{|y|<=1}) l(dy)`.
fn jump_cumulant<T: Real>(measure: &LevyMeasureSpec<T>, theta: T) -> Result<Complex<T>> {
    match measure {
        LevyMeasureSpec::Finite(f) => match f.atoms() {
            Some(atoms) => {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (y, p) in atoms {
                    let m = *p * f.mass();
                    let e = Complex::new(T::zero(), theta * *y).exp();
                    let mut term = e - T::one();
                    if y.abs() <= T::one() {
                        term -= Complex::new(T::zero(), theta * *y);
                    }
                    acc += term * m;
                }
                Ok(acc)
            }
            None => Err(Error::Unsupported(
                "cumulant of a sampler-specified finite measure".into(),
            )),
        },
        LevyMeasureSpec::InfiniteDensity(d) => {
            let opts = QuadOpts::tol(1e-10, 1e-8);
            let mut acc = Complex::new(T::zero(), T::zero());
            for (side, sign) in [(&d.pos, T::one()), (&d.neg, -T::one())] {
                let Some(s) = side else { continue };
                let dens = s.density.clone();
                let re_inner = integrate(
                    |u: T| ((theta * sign * u).cos() - T::one()) * dens(u),
                    T::zero(),
                    T::one().min(s.upper),
                    opts,
                )?;
                let im_inner = integrate(
                    |u: T| ((theta * sign * u).sin() - theta * sign * u) * dens(u),
                    T::zero(),
                    T::one().min(s.upper),
                    opts,
                )?;
                let (re_outer, im_outer) = if s.upper > T::one() {
                    let dens2 = s.density.clone();
                    let re = if s.upper.is_infinite() {
                        integrate_right_tail(
                            |u: T| ((theta * sign * u).cos() - T::one()) * dens2(u),
                            T::one(),
                            opts,
                        )?
                    } else {
                        integrate(
                            |u: T| ((theta * sign * u).cos() - T::one()) * dens2(u),
                            T::one(),
                            s.upper,
                            opts,
                        )?
                    };
                    let dens3 = s.density.clone();
                    let im = if s.upper.is_infinite() {
                        integrate_right_tail(
                            |u: T| (theta * sign * u).sin() * dens3(u),
                            T::one(),
                            opts,
                        )?
                    } else {
                        integrate(
                            |u: T| (theta * sign * u).sin() * dens3(u),
                            T::one(),
                            s.upper,
                            opts,
                        )?
                    };
                    (re, im)
                } else {
                    (T::zero(), T::zero())
                };
                acc += Complex::new(re_inner + re_outer, im_inner + im_outer);
            }
            Ok(acc)
        }
    }
}

/// Levy density of the Gamma(shape, scale) subordinator:
/// `shape y^{-1} e^{-y/scale}` on y > 0.
pub fn gamma_jump_density<T: Real>(shape: T, scale: T) -> DensityMeasure<T> {
    let (k, th) = (shape, scale);
    let mut side = SideDensity::new(move |y: T| k / y * (-y / th).exp());
    side.tail_log_slope = Some(-scale.recip());
    side.moment1_band = Some(Arc::new(move |a: T, b: T| {
        let hi = if b.is_finite() { (-b / th).exp() } else { T::zero() };
        k * th * ((-a / th).exp() - hi)
    }));
    side.moment2_below = Some(Arc::new(move |e: T| {
        k * th * th * (T::one() - (-e / th).exp() * (T::one() + e / th))
    }));
    DensityMeasure::one_sided(side)
}

/// Levy density of the Cauchy(scale) seed: `scale / (pi y^2)`, two-sided.
pub fn cauchy_jump_density<T: Real>(scale: T) -> DensityMeasure<T> {
    let g = scale;
    let pi = T::of(std::f64::consts::PI);
    let mut side = SideDensity::new(move |y: T| g / (pi * y * y));
    side.mass_above = Some(Arc::new(move |e: T| g / (pi * e)));
    side.moment1_band = Some(Arc::new(move |a: T, b: T| {
        if b.is_infinite() {
            T::infinity()
        } else {
            g / pi * (b / a).ln()
        }
    }));
    side.moment2_below = Some(Arc::new(move |e: T| g / pi * e));
    // P(Y > y | Y > eps) = eps / y, inverse y = eps / (1 - v)
    side.inverse_cdf = Some(Arc::new(move |eps: T, v: T| eps / (T::one() - v)));
    DensityMeasure::symmetric(side)
}

/// Levy density of the IG(delta, gamma) seed:
/// `delta / sqrt(2 pi) y^{-3/2} e^{-gamma^2 y / 2}` on y > 0.
pub fn ig_jump_density<T: Real>(delta: T, gamma: T) -> DensityMeasure<T> {
    let d = delta;
    let g2 = gamma * gamma;
    let c = d / T::of((2.0 * std::f64::consts::PI).sqrt());
    let mut side =
        SideDensity::new(move |y: T| c * y.powf(T::of(-1.5)) * (-g2 * y * T::of(0.5)).exp());
    side.tail_log_slope = Some(-g2 * T::of(0.5));
    DensityMeasure::one_sided(side)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ecf_check<T: Real>(seed: &LevySeed<T>, area: T, n: usize, seed_id: u64) {
        let mut rng = RngStream::from_seed(seed_id);
        let xs = seed.sample_set_law(area, n, &mut rng).unwrap();
        let se = 4.0 / (n as f64).sqrt();
        for k in 1..=10 {
            let theta = T::of(-2.4 + 0.48 * k as f64);
            if theta == T::zero() {
                continue;
            }
            let want = set_law_cumulant(seed, area, theta).unwrap().exp();
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for x in &xs {
                let a = (theta.as_f64()) * x.as_f64();
                re += a.cos();
                im += a.sin();
            }
            re /= n as f64;
            im /= n as f64;
            assert!(
                (re - want.re.as_f64()).abs() < se && (im - want.im.as_f64()).abs() < se,
                "{seed:?} area {:?} theta {:?}: ecf ({re},{im}) vs ({},{})",
                area.as_f64(),
                theta.as_f64(),
                want.re.as_f64(),
                want.im.as_f64()
            );
        }
    }

    #[test]
    fn cumulant_closed_forms() {
        let p = LevySeed::poisson(5.0).unwrap();
        let th = 0.7f64;
        let want = Complex::new((th.cos() - 1.0) * 5.0, th.sin() * 5.0);
        let got = p.cumulant(th).unwrap();
        assert!((got - want).norm() < 1e-12);

        // C(0, X) = 0 for every seed
        for s in [
            LevySeed::poisson(5.0).unwrap(),
            LevySeed::gaussian(0.0, 1.0).unwrap(),
            LevySeed::gamma(2.0, 3.0).unwrap(),
            LevySeed::stable(1.5, 0.3, 1.0, 0.2).unwrap(),
        ] {
            assert_eq!(s.cumulant(0.0).unwrap().norm(), 0.0);
        }

        let g = LevySeed::gaussian(0.0, 1.0).unwrap();
        assert!((g.cumulant(1.0).unwrap().re + 0.5).abs() < 1e-12);

        // area scaling of the Gaussian cumulant
        let c = set_law_cumulant(&g, 4.0, 1.0).unwrap();
        assert!((c.re + 2.0).abs() < 1e-12 && c.im == 0.0);
    }

    #[test]
    fn cumulant_additivity_over_areas() {
        let seeds: Vec<LevySeed<f64>> = vec![
            LevySeed::poisson(2.5).unwrap(),
            LevySeed::gamma(2.0, 3.0).unwrap(),
            LevySeed::stable(1.3, -0.4, 0.8, 0.1).unwrap(),
            LevySeed::inverse_gaussian(2.0, 1.0).unwrap(),
        ];
        for s in &seeds {
            for theta in [-1.7, -0.3, 0.4, 2.2] {
                let a = set_law_cumulant(s, 0.7, theta).unwrap();
                let b = set_law_cumulant(s, 1.9, theta).unwrap();
                let ab = set_law_cumulant(s, 2.6, theta).unwrap();
                assert!(
                    (a + b - ab).norm() <= 1e-12 * ab.norm().max(1.0),
                    "{s:?} theta {theta}"
                );
            }
        }
    }

    #[test]
    fn stable_area_scaling_matches_example() {
        // Stable set law = Stable(alpha, beta, c s^{1/alpha}, mu s)
        let s = LevySeed::stable(1.5f64, 0.5, 2.0, 0.7).unwrap();
        let area = 3.0;
        let scaled = LevySeed::stable(1.5f64, 0.5, 2.0 * area.powf(1.0 / 1.5), 0.7 * area).unwrap();
        for theta in [-2.0, -0.5, 0.8, 1.9] {
            let a = set_law_cumulant(&s, area, theta).unwrap();
            let b = scaled.cumulant(theta).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn sampler_cumulant_consistency() {
        let n = 100_000;
        ecf_check(&LevySeed::poisson(5.0f64).unwrap(), 1.0, n, 21);
        ecf_check(&LevySeed::skellam(1.0f64, 2.0).unwrap(), 0.7, n, 22);
        ecf_check(&LevySeed::gaussian(1.0f64, 1.0).unwrap(), 1.0, n, 23);
        ecf_check(&LevySeed::cauchy(1.0f64).unwrap(), 1.0, n, 24);
        ecf_check(&LevySeed::gamma(2.0f64, 3.0).unwrap(), 0.5, n, 25);
        ecf_check(&LevySeed::inverse_gaussian(2.0f64, 1.0).unwrap(), 1.0, n, 26);
        ecf_check(&LevySeed::stable(1.7f64, 0.4, 1.0, 0.0).unwrap(), 1.0, n, 27);
        ecf_check(&LevySeed::stable(1.0f64, 0.6, 1.0, 0.0).unwrap(), 2.0, n, 28);
    }

    #[test]
    fn moments_and_scaling() {
        let (m, v) = set_mean_var(&LevySeed::poisson(3.0f64).unwrap(), 2.0).unwrap();
        assert_eq!(m.value().unwrap(), 6.0);
        assert_eq!(v.value().unwrap(), 6.0);

        let (m, v) = set_mean_var(&LevySeed::gamma(2.0f64, 3.0).unwrap(), 1.0).unwrap();
        assert_eq!(m.value().unwrap(), 6.0);
        assert_eq!(v.value().unwrap(), 18.0);

        let (m, v) = set_mean_var(&LevySeed::cauchy(1.0f64).unwrap(), 4.0).unwrap();
        assert!(m.value().is_none() && v.value().is_none());
    }

    #[test]
    fn gamma_area_scaling_law() {
        // Gamma(2,3) over area 0.5 is Gamma(1,3): check mean/var by sampling
        let s = LevySeed::gamma(2.0f64, 3.0).unwrap();
        let mut rng = RngStream::from_seed(31);
        let n = 200_000;
        let xs = s.sample_set_law(0.5, n, &mut rng).unwrap();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!((mean - 3.0).abs() < 4.0 * (var / n as f64).sqrt());
        assert!((var - 9.0).abs() < 0.3, "{var}");
    }

    #[test]
    fn area_linear_mean_and_variance() {
        let s = LevySeed::inverse_gaussian(2.0f64, 1.0).unwrap();
        let mut rng = RngStream::from_seed(32);
        let n = 100_000;
        for area in [0.5, 1.0, 2.0] {
            let xs = s.sample_set_law(area, n, &mut rng).unwrap();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
            let (m, v) = set_mean_var(&s, area).unwrap();
            let (m, v) = (m.value().unwrap(), v.value().unwrap());
            assert!((mean - m).abs() < 4.0 * (var / n as f64).sqrt(), "area {area}");
            assert!((var - v).abs() / v < 0.05, "area {area}: {var} vs {v}");
        }
    }

    #[test]
    fn split_reproduces_poisson_and_gamma_moments() {
        for (seed, label) in [
            (LevySeed::poisson(4.0f64).unwrap(), "poisson"),
            (LevySeed::gamma(2.0f64, 3.0).unwrap(), "gamma"),
        ] {
            let (g, j) = seed.levy_ito_split().unwrap();
            let mut rng = RngStream::from_seed(33);
            let n = 100_000;
            let area = 1.3;
            let gs = g.sample_set_law(area, n, &mut rng).unwrap();
            let js = j.sample_set_law(area, n, &mut rng).unwrap();
            let xs: Vec<f64> = gs.iter().zip(&js).map(|(a, b)| a + b).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
            let (m, v) = set_mean_var(&seed, area).unwrap();
            let (m, v) = (m.value().unwrap(), v.value().unwrap());
            let se_m = (var / n as f64).sqrt();
            assert!((mean - m).abs() < 4.0 * se_m, "{label} mean {mean} vs {m}");
            assert!((var - v).abs() / v < 0.05, "{label} var {var} vs {v}");
        }
    }

    #[test]
    fn split_gaussian_is_identity() {
        let s = LevySeed::gaussian(1.5f64, 2.0).unwrap();
        let (g, j) = s.levy_ito_split().unwrap();
        match (g, j) {
            (
                LevySeed::Gaussian { mean, variance },
                LevySeed::Gaussian {
                    mean: m0,
                    variance: v0,
                },
            ) => {
                assert_eq!((mean, variance), (1.5, 2.0));
                assert_eq!((m0, v0), (0.0, 0.0));
            }
            _ => panic!("unexpected split"),
        }
    }

    #[test]
    fn stable_split_refused() {
        let s = LevySeed::stable(1.5f64, 0.0, 1.0, 0.0).unwrap();
        assert!(s.levy_ito_split().is_err());
    }

    #[test]
    fn point_mass_measure_sampling() {
        let m = LevyMeasureSpec::Finite(FiniteMeasure::from_atoms(vec![(1.0f64, 5.0)]).unwrap());
        let mut rng = RngStream::from_seed(40);
        let xs = sample_levy_measure(&m, 0.5, 200, &mut rng).unwrap();
        assert!(xs.iter().all(|x| *x == 1.0));

        let inf = LevyMeasureSpec::InfiniteDensity(gamma_jump_density(2.0f64, 1.0 / 3.0));
        assert!(sample_levy_measure(&inf, 0.0, 10, &mut rng).is_err());
    }

    #[test]
    fn zero_variance_gaussian_sampling() {
        let s = LevySeed::gaussian(2.0f64, 0.0).unwrap();
        let mut rng = RngStream::from_seed(41);
        let xs = s.sample_set_law(0.5, 10, &mut rng).unwrap();
        assert!(xs.iter().all(|x| (*x - 1.0).abs() < 1e-15));
    }
}
