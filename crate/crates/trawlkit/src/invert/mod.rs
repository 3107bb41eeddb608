//! Sampling from a law specified only through a transform: CDF/PDF
//! evaluation by numerical inversion of the Laplace transform (Bromwich
//! contour, trapezium rule, Euler summation) or of the characteristic
//! function (Gil-Pelaez), safeguarded Newton quantile inversion, discrete
//! mixtures, and envelope rejection sampling.

pub mod envelope;

use std::sync::Arc;

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::rng::RngStream;

pub use envelope::{LogDensity, LogEnvelope};

type CharFn<T> = Arc<dyn Fn(T) -> Complex<T> + Send + Sync>;
type LaplaceFn<T> = Arc<dyn Fn(Complex<T>) -> Complex<T> + Send + Sync>;

/// Side of the real line carrying the continuous mass (Laplace path).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportSide {
    Positive,
    Negative,
}

#[derive(Clone)]
pub enum Transform<T: Real> {
    /// theta -> E exp(i theta X), the characteristic function.
    Characteristic(CharFn<T>),
    /// s -> E exp(-s X) on the Bromwich contour. For `Negative` support the
    /// transform is that of -X and results are mirrored.
    Laplace { lt: LaplaceFn<T>, support: SupportSide },
}

/// A law split into an absolutely continuous part (given by a transform)
/// and a discrete part (atoms). The singular continuous part is assumed
/// absent.
#[derive(Clone)]
pub struct TransformSpec<T: Real> {
    pub continuous: Transform<T>,
    /// Mass of the continuous part; atoms carry the rest.
    pub continuous_weight: T,
    /// (location, mass) pairs of the discrete part.
    pub atoms: Vec<(T, T)>,
    /// Rough center of the continuous law, used to seed the quantile search.
    pub center_hint: Option<T>,
    /// Rough spread, used to scale the bracket search.
    pub scale_hint: Option<T>,
}

impl<T: Real> TransformSpec<T> {
    pub fn characteristic(phi: impl Fn(T) -> Complex<T> + Send + Sync + 'static) -> Self {
        TransformSpec {
            continuous: Transform::Characteristic(Arc::new(phi)),
            continuous_weight: T::one(),
            atoms: Vec::new(),
            center_hint: None,
            scale_hint: None,
        }
    }

    pub fn laplace(
        lt: impl Fn(Complex<T>) -> Complex<T> + Send + Sync + 'static,
        support: SupportSide,
    ) -> Self {
        TransformSpec {
            continuous: Transform::Laplace {
                lt: Arc::new(lt),
                support,
            },
            continuous_weight: T::one(),
            atoms: Vec::new(),
            center_hint: None,
            scale_hint: None,
        }
    }

    pub fn with_hints(mut self, center: T, scale: T) -> Self {
        self.center_hint = Some(center);
        self.scale_hint = Some(scale);
        self
    }

    pub fn with_atoms(mut self, atoms: Vec<(T, T)>, continuous_weight: T) -> Self {
        self.atoms = atoms;
        self.continuous_weight = continuous_weight;
        self
    }
}

/// Abate-Whitt parameters; `a` controls the discretization error (~e^-a).
const AW_A: f64 = 21.0;
const AW_N: usize = 45;
const AW_M: usize = 13;

fn binomials(m: usize) -> Vec<f64> {
    let mut c = vec![0.0; m + 1];
    c[0] = 1.0;
    for i in 1..=m {
        c[i] = c[i - 1] * (m - i + 1) as f64 / i as f64;
    }
    c
}

/// Bromwich inversion of `g` (the Laplace transform of the function to
/// recover) at x > 0, trapezium rule with Euler summation. Returns the
/// value and an error estimate.
fn bromwich_euler<T: Real>(g: &dyn Fn(Complex<T>) -> Complex<T>, x: T) -> (T, T) {
    let a = T::of(AW_A);
    let two_x = T::of(2.0) * x;
    let expa2 = (a * T::of(0.5)).exp();
    let first = expa2 / two_x * g(Complex::new(a / two_x, T::zero())).re;

    let total_terms = AW_N + AW_M + 1;
    let mut partial = Vec::with_capacity(total_terms);
    let mut acc = first;
    let pi = T::of(std::f64::consts::PI);
    for k in 1..=total_terms {
        let s = Complex::new(a / two_x, T::of(k as f64) * pi / x);
        let term = expa2 / x * g(s).re;
        acc += if k % 2 == 0 { term } else { -term };
        partial.push(acc);
    }
    let binom = binomials(AW_M);
    let norm = T::of(0.5).powi(AW_M as i32);
    let mut e_m = T::zero();
    let mut e_m1 = T::zero();
    for j in 0..=AW_M {
        let w = T::of(binom[j]) * norm;
        e_m += w * partial[AW_N + j - 1];
    }
    let binom1 = binomials(AW_M - 1);
    let norm1 = T::of(0.5).powi((AW_M - 1) as i32);
    for j in 0..AW_M {
        let w = T::of(binom1[j]) * norm1;
        e_m1 += w * partial[AW_N + j - 1];
    }
    let err = (e_m - e_m1).abs() + T::of((-AW_A).exp());
    (e_m, err)
}

/// Same as [`bromwich_euler`] with the Euler order overridden; exposed for
/// the acceleration-monotonicity diagnostics.
pub fn bromwich_euler_order<T: Real>(
    lt: impl Fn(Complex<T>) -> Complex<T>,
    x: T,
    m: usize,
    cdf: bool,
) -> T {
    let g = |s: Complex<T>| {
        if cdf {
            lt(s) / s
        } else {
            lt(s)
        }
    };
    let a = T::of(AW_A);
    let two_x = T::of(2.0) * x;
    let expa2 = (a * T::of(0.5)).exp();
    let first = expa2 / two_x * g(Complex::new(a / two_x, T::zero())).re;
    let total = AW_N + m + 1;
    let mut partial = Vec::with_capacity(total);
    let mut acc = first;
    let pi = T::of(std::f64::consts::PI);
    for k in 1..=total {
        let s = Complex::new(a / two_x, T::of(k as f64) * pi / x);
        let term = expa2 / x * g(s).re;
        acc += if k % 2 == 0 { term } else { -term };
        partial.push(acc);
    }
    let binom = binomials(m);
    let norm = T::of(0.5).powi(m as i32);
    let mut e = T::zero();
    for (j, b) in binom.iter().enumerate() {
        e += T::of(*b) * norm * partial[AW_N + j - 1];
    }
    e
}

/// Gil-Pelaez integrals for the CDF and PDF at x.
fn gil_pelaez<T: Real>(phi: &dyn Fn(T) -> Complex<T>, x: T, tol: f64) -> Result<(T, T)> {
    use crate::quad::{integrate, QuadOpts};
    let opts = QuadOpts::tol(tol * 0.05, 1e-9);
    let w = T::of(std::f64::consts::PI) / T::one().max(x.abs());
    let cdf_integrand = |theta: T| {
        if theta <= T::zero() {
            return T::zero();
        }
        let e = Complex::new(T::zero(), -theta * x).exp();
        (e * phi(theta)).im / theta
    };
    let pdf_integrand = |theta: T| {
        if theta <= T::zero() {
            return T::zero();
        }
        let e = Complex::new(T::zero(), -theta * x).exp();
        (e * phi(theta)).re
    };
    let mut cdf_int = T::zero();
    let mut pdf_int = T::zero();
    let mut lo = T::zero();
    let mut quiet = 0;
    let mut chunks = 0usize;
    loop {
        let hi = lo + w;
        let c = integrate(cdf_integrand, lo, hi, opts)?;
        let p = integrate(pdf_integrand, lo, hi, opts)?;
        cdf_int += c;
        pdf_int += p;
        chunks += 1;
        let phimod = phi(hi).norm();
        if phimod.as_f64() < tol * 0.01 && c.abs().as_f64() < tol * 0.1 {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        if chunks > 50_000 {
            return Err(Error::NoConvergence {
                iterations: chunks,
                residual: phimod.as_f64(),
            });
        }
        lo = hi;
    }
    let pi = T::of(std::f64::consts::PI);
    let f_cdf = T::of(0.5) - cdf_int / pi;
    let f_pdf = (pdf_int / pi).max(T::zero());
    Ok((f_cdf.max(T::zero()).min(T::one()), f_pdf))
}

/// CDF and PDF of the continuous part of `spec` at x.
pub fn eval_cdf_pdf<T: Real>(spec: &TransformSpec<T>, x: T) -> Result<(T, T)> {
    if !x.is_finite() {
        return Err(Error::invalid("eval_cdf_pdf requires finite x"));
    }
    match &spec.continuous {
        Transform::Characteristic(phi) => gil_pelaez(phi.as_ref(), x, 1e-7),
        Transform::Laplace { lt, support } => {
            let (xe, mirror) = match support {
                SupportSide::Positive => (x, false),
                SupportSide::Negative => (-x, true),
            };
            if xe <= T::zero() {
                let (f, d) = (T::zero(), T::zero());
                return Ok(if mirror { (T::one() - f, d) } else { (f, d) });
            }
            let lt = lt.clone();
            let (f, _ef) = bromwich_euler(&|s| lt(s) / s, xe);
            let (d, _ed) = bromwich_euler(&|s| lt(s), xe);
            let f = f.max(T::zero()).min(T::one());
            let d = d.max(T::zero());
            if mirror {
                // F_X(x) = 1 - F_{-X}(-x) for continuous laws
                Ok((T::one() - f, d))
            } else {
                Ok((f, d))
            }
        }
    }
}

/// Quantile of the continuous part by safeguarded Newton iteration
/// bracketed by bisection; tolerance 1e-9 on |F(x) - u|.
pub fn inverse_cdf_sample<T: Real>(spec: &TransformSpec<T>, u: T) -> Result<T> {
    if !(u > T::zero() && u < T::one()) {
        return Err(Error::invalid("quantile level must lie in (0,1)"));
    }
    let center = spec.center_hint.unwrap_or(T::zero());
    let scale = spec.scale_hint.unwrap_or(T::one()).max(T::of(1e-6));

    // 17-point geometric scan for a bracket
    let mut pts = vec![center];
    for j in 0..8 {
        let d = scale * T::of(2.0f64.powi(j) - 0.5);
        pts.push(center + d);
        pts.push(center - d);
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut lo = None;
    let mut hi = None;
    let mut f_cache: Vec<(T, T)> = Vec::new();
    for &p in &pts {
        let (fp, _) = eval_cdf_pdf(spec, p)?;
        f_cache.push((p, fp));
        if fp <= u {
            lo = Some(p);
        }
        if fp >= u && hi.is_none() {
            hi = Some(p);
        }
    }
    let mut lo = match lo {
        Some(l) => l,
        None => {
            let mut p = pts[0];
            let mut width = scale * T::of(256.0);
            loop {
                p -= width;
                let (fp, _) = eval_cdf_pdf(spec, p)?;
                if fp <= u {
                    break p;
                }
                width *= T::of(2.0);
                if !p.is_finite() {
                    return Err(Error::NoConvergence {
                        iterations: 0,
                        residual: f64::INFINITY,
                    });
                }
            }
        }
    };
    let mut hi = match hi {
        Some(h) => h,
        None => {
            let mut p = *pts.last().unwrap();
            let mut width = scale * T::of(256.0);
            loop {
                p += width;
                let (fp, _) = eval_cdf_pdf(spec, p)?;
                if fp >= u {
                    break p;
                }
                width *= T::of(2.0);
                if !p.is_finite() {
                    return Err(Error::NoConvergence {
                        iterations: 0,
                        residual: f64::INFINITY,
                    });
                }
            }
        }
    };

    let mut x = (lo + hi) * T::of(0.5);
    // prefer a cached starting point close to u
    if let Some((p, _)) = f_cache
        .iter()
        .min_by(|a, b| (a.1 - u).abs().partial_cmp(&(b.1 - u).abs()).unwrap())
    {
        if *p > lo && *p < hi {
            x = *p;
        }
    }

    let tol = T::of(1e-9);
    let mut residual = T::infinity();
    for _ in 0..200 {
        let (fx, dx) = eval_cdf_pdf(spec, x)?;
        residual = (fx - u).abs();
        if residual <= tol {
            return Ok(x);
        }
        if fx > u {
            hi = x;
        } else {
            lo = x;
        }
        let newton_ok = dx > T::of(1e-12);
        let mut next = if newton_ok { x - (fx - u) / dx } else { x };
        if !newton_ok || next <= lo || next >= hi || !next.is_finite() {
            next = (lo + hi) * T::of(0.5);
        }
        if (next - x).abs() <= T::of(1e-15) * (T::one() + x.abs()) {
            // bracket collapsed; accept if the residual is small
            if residual <= T::of(1e-6) {
                return Ok(x);
            }
        }
        x = next;
    }
    Err(Error::NoConvergence {
        iterations: 200,
        residual: residual.as_f64(),
    })
}

/// Sample the full mixed law: atoms by mass, continuous part by quantile
/// inversion.
pub fn mixed_sample<T: Real>(spec: &TransformSpec<T>, rng: &mut RngStream) -> Result<T> {
    let mut atom_mass = T::zero();
    for &(_, m) in &spec.atoms {
        if m < T::zero() {
            return Err(Error::invalid("atom masses must be nonnegative"));
        }
        atom_mass += m;
    }
    let total = atom_mass + spec.continuous_weight;
    if (total - T::one()).abs() > T::of(1e-9) {
        return Err(Error::invalid("atom masses and continuous weight must sum to 1"));
    }
    let u: f64 = rng.random();
    let mut acc = T::zero();
    let ut = T::of(u);
    for &(a, m) in &spec.atoms {
        acc += m;
        if ut < acc {
            return Ok(a);
        }
    }
    let v: f64 = rng.random::<f64>().clamp(1e-15, 1.0 - 1e-15);
    inverse_cdf_sample(spec, T::of(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp1_spec() -> TransformSpec<f64> {
        TransformSpec::laplace(
            |s: Complex<f64>| (Complex::new(1.0, 0.0) + s).inv(),
            SupportSide::Positive,
        )
        .with_hints(1.0, 1.0)
    }

    #[test]
    fn exponential_cdf_at_ln2() {
        let (f, d) = eval_cdf_pdf(&exp1_spec(), (2.0f64).ln()).unwrap();
        assert!((f - 0.5).abs() < 1e-8, "F {f}");
        assert!((d - 0.5).abs() < 1e-7, "f {d}");
    }

    #[test]
    fn exponential_quantile_roundtrip() {
        let spec = exp1_spec();
        let x = inverse_cdf_sample(&spec, 0.5).unwrap();
        assert!((x - (2.0f64).ln()).abs() < 1e-7, "{x}");
        for i in 1..100 {
            let u = i as f64 / 100.0;
            let q = inverse_cdf_sample(&spec, u).unwrap();
            let (f, _) = eval_cdf_pdf(&spec, q).unwrap();
            assert!((f - u).abs() <= 1e-8, "u={u}: roundtrip {}", (f - u).abs());
        }
    }

    #[test]
    fn gaussian_cdf_by_gil_pelaez() {
        let spec = TransformSpec::characteristic(|theta: f64| {
            Complex::new((-0.5 * theta * theta).exp(), 0.0)
        })
        .with_hints(0.0, 1.0);
        let (f, d) = eval_cdf_pdf(&spec, 0.0).unwrap();
        assert!((f - 0.5).abs() < 1e-7);
        assert!((d - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-7);
        let med = inverse_cdf_sample(&spec, 0.5).unwrap();
        assert!(med.abs() < 1e-6);
    }

    #[test]
    fn gamma_cdf_matches_series_oracle() {
        // Gamma(2, 3): L(s) = (1 + 3 s)^{-2}; F(x) = 1 - e^{-x/3}(1 + x/3)
        let spec = TransformSpec::laplace(
            |s: Complex<f64>| (Complex::new(1.0, 0.0) + s * 3.0).powf(-2.0),
            SupportSide::Positive,
        )
        .with_hints(6.0, 4.0);
        for x in [0.5, 2.0, 6.0, 12.0] {
            let (f, _) = eval_cdf_pdf(&spec, x).unwrap();
            let oracle = 1.0 - (-x / 3.0f64).exp() * (1.0 + x / 3.0);
            assert!((f - oracle).abs() < 1e-6, "x={x}: {f} vs {oracle}");
        }
    }

    #[test]
    fn euler_acceleration_improves_monotonically() {
        let lt = |s: Complex<f64>| (Complex::new(1.0, 0.0) + s).inv();
        let x = (2.0f64).ln();
        let truth = 0.5;
        let mut prev = f64::INFINITY;
        for m in [2usize, 4, 6, 8, 10, 12] {
            let v = bromwich_euler_order(lt, x, m, true);
            let err = (v - truth).abs();
            assert!(err <= prev + 1e-12, "m={m}: {err} vs {prev}");
            prev = err;
        }
        assert!(prev < 1e-9);
    }

    #[test]
    fn mixed_sampling_mass_split() {
        let spec = exp1_spec().with_atoms(vec![(0.0, 0.5)], 0.5);
        let mut rng = RngStream::from_seed(11);
        let n = 20_000;
        let mut zeros = 0;
        for _ in 0..n {
            let x = mixed_sample(&spec, &mut rng).unwrap();
            if x == 0.0 {
                zeros += 1;
            }
        }
        let p = zeros as f64 / n as f64;
        let se = (0.25f64 / n as f64).sqrt();
        assert!((p - 0.5).abs() < 4.0 * se, "{p}");
    }

    #[test]
    fn pure_atom_spec() {
        let spec = exp1_spec().with_atoms(vec![(1.0, 1.0)], 0.0);
        let mut rng = RngStream::from_seed(3);
        for _ in 0..100 {
            assert_eq!(mixed_sample(&spec, &mut rng).unwrap(), 1.0);
        }
    }

    #[test]
    fn negative_mass_rejected() {
        let spec = exp1_spec().with_atoms(vec![(1.0, -0.2), (0.0, 1.2)], 0.0);
        let mut rng = RngStream::from_seed(4);
        assert!(mixed_sample(&spec, &mut rng).is_err());
    }

    #[test]
    fn cdf_monotone_on_grid() {
        let spec = exp1_spec();
        let mut prev = -1.0;
        for i in 0..60 {
            let x = 0.1 * i as f64;
            let (fx, _) = eval_cdf_pdf(&spec, x).unwrap();
            assert!(fx >= prev - 1e-9);
            prev = fx;
        }
    }
}
