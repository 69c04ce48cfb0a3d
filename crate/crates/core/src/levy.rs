//! Lévy seeds: characteristic triplets `(γ, b, ν)`, exponents, moments, and
//! exact samplers for `L(A)` given `Leb(A)`.
//!
//! The exponent convention is
//! `ψ(z) = iγz − ½b²z² + ∫(e^{izx} − 1 − izx·1{|x|≤1}) ν(dx)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::quad;
use crate::scalar::{gamma, Scalar};

pub type Density<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Jump-size law of a compound Poisson seed.
#[derive(Clone, Debug, PartialEq)]
pub enum JumpLaw<T> {
    Point(T),
    Normal { mean: T, sd: T },
    Exponential { rate: T },
}

impl<T: Scalar> JumpLaw<T> {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match *self {
            JumpLaw::Point(x) => x,
            JumpLaw::Normal { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + sd * T::lit(z)
            }
            JumpLaw::Exponential { rate } => {
                let e: f64 = rng.sample(Exp1);
                T::lit(e) / rate
            }
        }
    }

    pub fn cf(&self, z: T) -> Complex<T> {
        match *self {
            JumpLaw::Point(x) => Complex::new(T::zero(), z * x).exp(),
            JumpLaw::Normal { mean, sd } => Complex::new(-T::lit(0.5) * sd * sd * z * z, z * mean).exp(),
            JumpLaw::Exponential { rate } => Complex::new(rate, T::zero()) / Complex::new(rate, -z),
        }
    }

    /// Raw moment `E[J^k]` for k = 1..4.
    pub fn raw_moment(&self, k: u32) -> T {
        match *self {
            JumpLaw::Point(x) => x.powi(k as i32),
            JumpLaw::Normal { mean: m, sd: s } => {
                let (m2, s2) = (m * m, s * s);
                match k {
                    1 => m,
                    2 => m2 + s2,
                    3 => m * m2 + T::lit(3.0) * m * s2,
                    _ => m2 * m2 + T::lit(6.0) * m2 * s2 + T::lit(3.0) * s2 * s2,
                }
            }
            JumpLaw::Exponential { rate } => gamma(T::lit(k as f64 + 1.0)) / rate.powi(k as i32),
        }
    }

    /// `E[|J|^p; sign(J) = side]`, `p > 0`.
    pub fn side_moment(&self, p: T, positive: bool) -> Result<T> {
        match *self {
            JumpLaw::Point(x) => Ok(if (x > T::zero()) == positive && x != T::zero() { x.abs().powf(p) } else { T::zero() }),
            JumpLaw::Exponential { rate } => Ok(if positive { gamma(p + T::one()) / rate.powf(p) } else { T::zero() }),
            JumpLaw::Normal { mean, sd } => {
                let sgn = if positive { T::one() } else { -T::one() };
                let dens = move |x: T| {
                    let u = (sgn * x - mean) / sd;
                    x.powf(p) * (-T::lit(0.5) * u * u).exp() / (sd * T::lit((2.0 * std::f64::consts::PI).sqrt()))
                };
                quad::simpson_to_inf(dens, T::zero(), T::lit(1e-12))
            }
        }
    }
}

/// A Lévy measure. `PowerLaw` has density `K_± |x|^{-1-β}` on each half-line.
#[derive(Clone)]
pub enum LevyMeasureSpec<T> {
    Zero,
    Finite { rate: T, law: JumpLaw<T> },
    PowerLaw { beta: T, k_plus: T, k_minus: T },
    Density { label: String, plus: Density<T>, minus: Density<T> },
}

impl<T: fmt::Debug> fmt::Debug for LevyMeasureSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::Finite { rate, law } => write!(f, "Finite{{rate={rate:?}, law={law:?}}}"),
            Self::PowerLaw { beta, k_plus, k_minus } => write!(f, "PowerLaw{{beta={beta:?}, k_plus={k_plus:?}, k_minus={k_minus:?}}}"),
            Self::Density { label, .. } => write!(f, "Density{{{label}}}"),
        }
    }
}

// log-variable integration window for density measures
const LOG_LO: f64 = -60.0;
const PROBE_SMALL: f64 = 1e-10;

impl<T: Scalar> LevyMeasureSpec<T> {
    pub fn poisson(lambda: T) -> Self {
        LevyMeasureSpec::Finite { rate: lambda, law: JumpLaw::Point(T::one()) }
    }

    /// Tempered stable density `c_± x^{-1-α} e^{-λ_± x}`.
    pub fn tempered_stable(c_plus: T, c_minus: T, alpha: T, lambda_plus: T, lambda_minus: T) -> Result<Self> {
        if !(alpha >= T::zero() && alpha < T::lit(2.0)) {
            return invalid("tempered stable alpha must lie in [0, 2)");
        }
        if c_plus < T::zero() || c_minus < T::zero() || lambda_plus <= T::zero() || lambda_minus <= T::zero() {
            return invalid("tempered stable needs c_± ≥ 0 and λ_± > 0");
        }
        let one = T::one();
        let plus: Density<T> = Arc::new(move |x: T| c_plus * x.powf(-one - alpha) * (-lambda_plus * x).exp());
        let minus: Density<T> = Arc::new(move |x: T| c_minus * x.powf(-one - alpha) * (-lambda_minus * x).exp());
        Ok(LevyMeasureSpec::Density {
            label: format!("tempered_stable(c+={c_plus},c-={c_minus},alpha={alpha},l+={lambda_plus},l-={lambda_minus})"),
            plus,
            minus,
        })
    }

    fn density_side(&self, positive: bool) -> Option<&Density<T>> {
        match self {
            LevyMeasureSpec::Density { plus, minus, .. } => Some(if positive { plus } else { minus }),
            _ => None,
        }
    }

    /// `∫_lo^hi x^p ρ(x) dx` over one half-line of a density measure, in log variable.
    fn density_integral(rho: &Density<T>, p: T, lo: T, hi: Option<T>) -> Result<T> {
        let g = |v: T| {
            let x = v.exp();
            let y = x.powf(p + T::one()) * rho(x);
            if y.is_finite() {
                y
            } else {
                T::zero()
            }
        };
        let tol = T::lit(1e-13);
        let vlo = if lo > T::zero() { lo.ln() } else { T::lit(LOG_LO) };
        match hi {
            Some(h) => quad::simpson(g, vlo, h.ln(), tol),
            None => {
                let zero = T::zero();
                if vlo >= zero {
                    quad::simpson_to_inf(g, vlo, tol)
                } else {
                    Ok(quad::simpson(g, vlo, zero, tol)? + quad::simpson_to_inf(g, zero, tol)?)
                }
            }
        }
    }

    /// Local power of `ρ` at `x`: `-d ln ρ / d ln x`.
    fn local_power(rho: &Density<T>, x: T) -> Option<T> {
        let h = T::lit(1e-3);
        let (a, b) = (rho(x * (-h).exp()), rho(x * h.exp()));
        if a <= T::zero() || b <= T::zero() || !a.is_finite() || !b.is_finite() {
            return None;
        }
        Some(-(b.ln() - a.ln()) / (T::lit(2.0) * h))
    }

    /// Tail `ν((x, ∞))`.
    pub fn nu_plus(&self, x: T) -> T {
        self.tail(x, true)
    }

    /// Tail `ν((−∞, −x))`.
    pub fn nu_minus(&self, x: T) -> T {
        self.tail(x, false)
    }

    fn tail(&self, x: T, positive: bool) -> T {
        match self {
            LevyMeasureSpec::Zero => T::zero(),
            LevyMeasureSpec::Finite { rate, law } => {
                let p = match *law {
                    JumpLaw::Point(y) => {
                        let s = if positive { y } else { -y };
                        if s > x {
                            T::one()
                        } else {
                            T::zero()
                        }
                    }
                    JumpLaw::Exponential { rate: r } => {
                        if positive {
                            (-r * x.max(T::zero())).exp()
                        } else {
                            T::zero()
                        }
                    }
                    JumpLaw::Normal { mean, sd } => {
                        let u = if positive { (x - mean) / sd } else { (x + mean) / sd };
                        T::one() - crate::scalar::norm_cdf(u)
                    }
                };
                *rate * p
            }
            LevyMeasureSpec::PowerLaw { beta, k_plus, k_minus } => {
                let k = if positive { *k_plus } else { *k_minus };
                k * x.powf(-*beta) / *beta
            }
            LevyMeasureSpec::Density { .. } => {
                let rho = self.density_side(positive).unwrap();
                Self::density_integral(rho, T::zero(), x, None).unwrap_or(T::infinity())
            }
        }
    }

    /// `∫_{x ≷ 0} |x|^p ν(dx)`; `+∞` is reported as an error.
    pub fn side_moment(&self, p: T, positive: bool) -> Result<T> {
        match self {
            LevyMeasureSpec::Zero => Ok(T::zero()),
            LevyMeasureSpec::Finite { rate, law } => Ok(*rate * law.side_moment(p, positive)?),
            LevyMeasureSpec::PowerLaw { k_plus, k_minus, .. } => {
                let k = if positive { *k_plus } else { *k_minus };
                if k == T::zero() {
                    Ok(T::zero())
                } else {
                    Err(Error::InfiniteMoment(format!("power-law Lévy measure has no finite moment of order {p}")))
                }
            }
            LevyMeasureSpec::Density { .. } => {
                let rho = self.density_side(positive).unwrap();
                let small = T::lit(PROBE_SMALL);
                if let Some(q) = Self::local_power(rho, small) {
                    if p + T::one() - q <= T::lit(1e-6) {
                        return Err(Error::InfiniteMoment(format!("order {p} diverges at the origin")));
                    }
                }
                if let Some(q) = Self::local_power(rho, T::lit(1e6)) {
                    if q - p - T::one() <= T::lit(1e-6) {
                        return Err(Error::InfiniteMoment(format!("order {p} diverges at infinity")));
                    }
                }
                Self::density_integral(rho, p, T::zero(), None)
            }
        }
    }

    /// `∫ |x|^p ν(dx)`.
    pub fn abs_moment(&self, p: T) -> Result<T> {
        Ok(self.side_moment(p, true)? + self.side_moment(p, false)?)
    }

    /// `∫_{lo<|x|≤hi} x ν(dx)` (signed).
    fn signed_first_moment_between(&self, lo: T, hi: Option<T>) -> Result<T> {
        match self {
            LevyMeasureSpec::Zero => Ok(T::zero()),
            LevyMeasureSpec::Finite { rate, law } => {
                let inside = |x: T| x.abs() > lo && hi.is_none_or(|h| x.abs() <= h);
                match *law {
                    JumpLaw::Point(y) => Ok(if inside(y) { *rate * y } else { T::zero() }),
                    _ => {
                        let law = law.clone();
                        let pdf = move |x: T| -> T {
                            match law {
                                JumpLaw::Normal { mean, sd } => {
                                    let u = (x - mean) / sd;
                                    (-T::lit(0.5) * u * u).exp() / (sd * T::lit((2.0 * std::f64::consts::PI).sqrt()))
                                }
                                JumpLaw::Exponential { rate } => {
                                    if x >= T::zero() {
                                        rate * (-rate * x).exp()
                                    } else {
                                        T::zero()
                                    }
                                }
                                JumpLaw::Point(_) => T::zero(),
                            }
                        };
                        let tol = T::lit(1e-12);
                        let (pos, neg) = match hi {
                            Some(h) => (quad::simpson(|x| x * pdf(x), lo, h, tol)?, quad::simpson(|x| x * pdf(-x), lo, h, tol)?),
                            None => (quad::simpson_to_inf(|x| x * pdf(x), lo, tol)?, quad::simpson_to_inf(|x| x * pdf(-x), lo, tol)?),
                        };
                        Ok(*rate * (pos - neg))
                    }
                }
            }
            LevyMeasureSpec::PowerLaw { beta, k_plus, k_minus } => {
                let d = *k_plus - *k_minus;
                if d == T::zero() {
                    return Ok(T::zero());
                }
                let one = T::one();
                let prim = |x: T| {
                    if (*beta - one).abs() < T::epsilon() {
                        x.ln()
                    } else {
                        x.powf(one - *beta) / (one - *beta)
                    }
                };
                match hi {
                    Some(h) => Ok(d * (prim(h) - prim(lo))),
                    None if *beta > one => Ok(-d * prim(lo)),
                    None => Err(Error::InfiniteMoment("first moment of power-law measure".into())),
                }
            }
            LevyMeasureSpec::Density { plus, minus, .. } => {
                let lo = if lo > T::zero() { lo } else { T::lit(LOG_LO).exp() };
                let one = T::one();
                Ok(Self::density_integral(plus, one, lo, hi)? - Self::density_integral(minus, one, lo, hi)?)
            }
        }
    }

    /// Blumenthal–Getoor index; `0` for the zero and finite measures.
    pub fn bg_index(&self) -> T {
        match self {
            LevyMeasureSpec::Zero | LevyMeasureSpec::Finite { .. } => T::zero(),
            LevyMeasureSpec::PowerLaw { beta, .. } => *beta,
            LevyMeasureSpec::Density { plus, minus, .. } => {
                let x0 = T::lit(PROBE_SMALL);
                let h = T::lit(1e-3);
                // ∫_{|x|≤1}|x|^β ν < ∞ iff x^{β+1}ρ(x) vanishes as x → 0
                let finite = |b: T| {
                    let f = |x: T| x.powf(b + T::one()) * (plus(x) + minus(x));
                    let (lo, hi) = (f(x0 * (-h).exp()), f(x0 * h.exp()));
                    if lo <= T::zero() || hi <= T::zero() {
                        return true;
                    }
                    (hi.ln() - lo.ln()) / (T::lit(2.0) * h) > T::lit(1e-6)
                };
                if finite(T::zero()) {
                    return T::zero();
                }
                let (mut lo, mut hi) = (T::zero(), T::lit(2.0));
                for _ in 0..60 {
                    let mid = T::lit(0.5) * (lo + hi);
                    if finite(mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                T::lit(0.5) * (lo + hi)
            }
        }
    }

    /// `∫(e^{izx} − 1 − izx·1{|x|≤1}) ν(dx)`.
    pub fn jump_exponent(&self, z: T) -> Result<Complex<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        match self {
            LevyMeasureSpec::Zero => Ok(zero),
            LevyMeasureSpec::Finite { rate, law } => {
                let small = self.signed_first_moment_between(T::zero(), Some(T::one()))?;
                let base = (law.cf(z) - T::one()) * *rate;
                Ok(base - Complex::new(T::zero(), z * small))
            }
            LevyMeasureSpec::PowerLaw { beta, k_plus, k_minus } => {
                let strict = stable_exponent(*beta, *k_plus, *k_minus, T::zero(), z)?;
                let one = T::one();
                let shift = if (*beta - one).abs() < T::epsilon() { T::zero() } else { (*k_plus - *k_minus) / (*beta - one) };
                Ok(strict + Complex::new(T::zero(), z * shift))
            }
            LevyMeasureSpec::Density { plus, minus, .. } => {
                let one = T::one();
                let side = |rho: &Density<T>, s: T| -> Result<Complex<T>> {
                    let re = |v: T| {
                        let x = v.exp();
                        let y = ((s * z * x).cos() - one) * rho(x) * x;
                        if y.is_finite() {
                            y
                        } else {
                            T::zero()
                        }
                    };
                    let im = |v: T| {
                        let x = v.exp();
                        let comp = if x <= one { s * z * x } else { T::zero() };
                        let y = ((s * z * x).sin() - comp) * rho(x) * x;
                        if y.is_finite() {
                            y
                        } else {
                            T::zero()
                        }
                    };
                    let tol = T::lit(1e-11);
                    let (lo, mid) = (T::lit(LOG_LO), T::zero());
                    let r = quad::simpson(re, lo, mid, tol)? + quad::simpson_to_inf(re, mid, tol)?;
                    let i = quad::simpson(im, lo, mid, tol)? + quad::simpson_to_inf(im, mid, tol)?;
                    Ok(Complex::new(r, i))
                };
                Ok(side(plus, one)? + side(minus, -one)?)
            }
        }
    }
}

/// Strictly β-stable exponent.
///
/// For β ≠ 1 returns `−σ|z|^β (1 − iρ·sign(z)·tan(πβ/2))` with
/// `σ = Γ(2−β)/(β(1−β))·cos(πβ/2)·(K₊+K₋)` and `ρ = (K₊−K₋)/(K₊+K₋)`, where
/// `K_±` are the coefficients of the Lévy density `K_±|x|^{-1-β}`.
/// For β = 1 (symmetric only) returns `−K₊π|z| + iγz`.
pub fn stable_exponent<T: Scalar>(beta: T, k_plus: T, k_minus: T, gamma_s: T, z: T) -> Result<Complex<T>> {
    let (zero, one, two) = (T::zero(), T::one(), T::lit(2.0));
    if !(beta > zero && beta < two) {
        return Err(Error::OutOfRange(format!("stable index {beta} outside (0, 2)")));
    }
    if k_plus < zero || k_minus < zero || k_plus + k_minus <= zero {
        return invalid("stable needs K_± ≥ 0 with K₊ + K₋ > 0");
    }
    if !z.is_finite() {
        return invalid("non-finite argument");
    }
    if beta == one {
        if k_plus != k_minus {
            return invalid("β = 1 requires K₊ = K₋");
        }
        return Ok(Complex::new(-k_plus * T::PI() * z.abs(), gamma_s * z));
    }
    let (sigma, rho) = stable_sigma_rho(beta, k_plus, k_minus);
    let t = (T::PI() * beta / two).tan();
    let mag = sigma * z.abs().powf(beta);
    let sgn = if z > zero {
        one
    } else if z < zero {
        -one
    } else {
        zero
    };
    Ok(Complex::new(-mag, mag * rho * sgn * t))
}

/// `(σ, ρ)` of the strictly stable exponent, β ≠ 1.
pub fn stable_sigma_rho<T: Scalar>(beta: T, k_plus: T, k_minus: T) -> (T, T) {
    let (one, two) = (T::one(), T::lit(2.0));
    let sigma = gamma(two - beta) / (beta * (one - beta)) * (T::PI() * beta / two).cos() * (k_plus + k_minus);
    let rho = (k_plus - k_minus) / (k_plus + k_minus);
    (sigma, rho)
}

/// Draw from `S_β(scale, skew)` with cf `exp(−scale^β|z|^β(1 − i·skew·sign(z)·tan(πβ/2)))`,
/// β ≠ 1 (Chambers–Mallows–Stuck, Weron's form).
pub fn sample_stable_std<T: Scalar, R: Rng + ?Sized>(beta: T, skew: T, scale: T, rng: &mut R) -> T {
    let b = beta.f64();
    let sk = skew.f64();
    let half_pi = std::f64::consts::FRAC_PI_2;
    let v = (rng.random::<f64>() - 0.5) * std::f64::consts::PI;
    let w: f64 = rng.sample(Exp1);
    let t = (half_pi * b).tan();
    let bb = (sk * t).atan() / b;
    let s = (1.0 + sk * sk * t * t).powf(1.0 / (2.0 * b));
    let x = s * (b * (v + bb)).sin() / v.cos().powf(1.0 / b) * ((v - b * (v + bb)).cos() / w).powf((1.0 - b) / b);
    scale * T::lit(x)
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeedFamily<T> {
    Gaussian,
    Poisson { lambda: T },
    CompoundPoisson { rate: T, jumps: JumpLaw<T>, drift: T },
    Stable { beta: T, k_plus: T, k_minus: T },
    Custom,
}

/// Truncation data for custom triplets: jumps with `|x| > ε` are exact,
/// the rest is replaced by a Gaussian of matched variance.
#[derive(Clone, Debug)]
pub struct Truncation<T> {
    pub epsilon: T,
    pub mass_plus: T,
    pub mass_minus: T,
    pub small_var: T,
    pub drift: T,
    table_plus: Vec<(T, T)>,
    table_minus: Vec<(T, T)>,
}

/// A Lévy seed `L′`.
#[derive(Clone, Debug)]
pub struct LevySeedSpec<T> {
    pub family: SeedFamily<T>,
    pub gamma: T,
    pub b: T,
    pub nu: LevyMeasureSpec<T>,
    truncation: Option<Truncation<T>>,
}

/// First two moments plus the fourth cumulant of `L′`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeedMoments<T> {
    pub mean: T,
    pub var: T,
    pub kappa4: T,
}

const TABLE_POINTS: usize = 400;

impl<T: Scalar> LevySeedSpec<T> {
    pub fn gaussian(gamma: T, b: T) -> Result<Self> {
        if !(b >= T::zero()) {
            return invalid("b must be ≥ 0");
        }
        Ok(Self { family: SeedFamily::Gaussian, gamma, b, nu: LevyMeasureSpec::Zero, truncation: None })
    }

    pub fn poisson(lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) {
            return invalid("Poisson intensity must be > 0");
        }
        // jumps of size 1 sit inside the truncation window, so γ = λ
        Ok(Self {
            family: SeedFamily::Poisson { lambda },
            gamma: lambda,
            b: T::zero(),
            nu: LevyMeasureSpec::poisson(lambda),
            truncation: None,
        })
    }

    pub fn compound_poisson(rate: T, jumps: JumpLaw<T>, drift: T) -> Result<Self> {
        if !(rate > T::zero()) {
            return invalid("compound Poisson rate must be > 0");
        }
        let nu = LevyMeasureSpec::Finite { rate, law: jumps.clone() };
        let small = nu.signed_first_moment_between(T::zero(), Some(T::one()))?;
        Ok(Self { family: SeedFamily::CompoundPoisson { rate, jumps, drift }, gamma: drift + small, b: T::zero(), nu, truncation: None })
    }

    /// Strictly stable seed; the drift is the one making the law strictly stable.
    pub fn stable(beta: T, k_plus: T, k_minus: T) -> Result<Self> {
        stable_exponent(beta, k_plus, k_minus, T::zero(), T::one())?;
        let one = T::one();
        let gamma = if beta == one { T::zero() } else { (k_plus - k_minus) / (one - beta) };
        Ok(Self {
            family: SeedFamily::Stable { beta, k_plus, k_minus },
            gamma,
            b: T::zero(),
            nu: LevyMeasureSpec::PowerLaw { beta, k_plus, k_minus },
            truncation: None,
        })
    }

    /// General triplet. `epsilon = None` picks the largest power-of-two
    /// fraction of 1 whose substituted small-jump variance is below
    /// `1e-6` of the total variance.
    pub fn custom(gamma: T, b: T, nu: LevyMeasureSpec<T>, epsilon: Option<T>) -> Result<Self> {
        if !(b >= T::zero()) {
            return invalid("b must be ≥ 0");
        }
        let truncation = match &nu {
            LevyMeasureSpec::Zero | LevyMeasureSpec::Finite { .. } => None,
            _ => Some(Self::build_truncation(b, &nu, epsilon)?),
        };
        Ok(Self { family: SeedFamily::Custom, gamma, b, nu, truncation })
    }

    fn small_jump_var(nu: &LevyMeasureSpec<T>, eps: T) -> Result<T> {
        match nu {
            LevyMeasureSpec::PowerLaw { beta, k_plus, k_minus } => {
                let two = T::lit(2.0);
                Ok((*k_plus + *k_minus) * eps.powf(two - *beta) / (two - *beta))
            }
            LevyMeasureSpec::Density { plus, minus, .. } => {
                let two = T::lit(2.0);
                Ok(LevyMeasureSpec::density_integral(plus, two, T::zero(), Some(eps))?
                    + LevyMeasureSpec::density_integral(minus, two, T::zero(), Some(eps))?)
            }
            _ => Ok(T::zero()),
        }
    }

    fn build_truncation(b: T, nu: &LevyMeasureSpec<T>, epsilon: Option<T>) -> Result<Truncation<T>> {
        let eps = match epsilon {
            Some(e) if e > T::zero() => e,
            Some(_) => return invalid("epsilon must be > 0"),
            None => {
                let total = b * b
                    + nu.abs_moment(T::lit(2.0))
                        .map_err(|_| Error::InvalidArgument("infinite-variance Lévy measure: epsilon must be given".into()))?;
                let mut e = T::one();
                while Self::small_jump_var(nu, e)? > T::lit(1e-6) * total && e > T::lit(1e-12) {
                    e = e * T::lit(0.5);
                }
                e
            }
        };
        let small_var = Self::small_jump_var(nu, eps)?;
        let drift = if eps < T::one() { nu.signed_first_moment_between(eps, Some(T::one()))? } else { T::zero() };
        let drift = if eps > T::one() { -nu.signed_first_moment_between(T::one(), Some(eps))? } else { drift };
        let (mass_plus, mass_minus) = (nu.nu_plus(eps), nu.nu_minus(eps));
        let table = |positive: bool, mass: T| -> Result<Vec<(T, T)>> {
            let rho = match nu.density_side(positive) {
                Some(r) if mass > T::zero() => r,
                _ => return Ok(Vec::new()),
            };
            let mut hi = eps * T::lit(2.0);
            while nu.tail(hi, positive) > T::lit(1e-12) * mass && hi < T::lit(1e12) {
                hi = hi * T::lit(2.0);
            }
            let (la, lb) = (eps.ln(), hi.ln());
            let xs: Vec<T> = (0..TABLE_POINTS).map(|k| (la + (lb - la) * T::usize(k) / T::usize(TABLE_POINTS - 1)).exp()).collect();
            let mut out = vec![(T::zero(), T::zero()); TABLE_POINTS];
            let mut acc = nu.tail(hi, positive);
            out[TABLE_POINTS - 1] = (xs[TABLE_POINTS - 1], acc);
            for k in (0..TABLE_POINTS - 1).rev() {
                acc = acc + LevyMeasureSpec::density_integral(rho, T::zero(), xs[k], Some(xs[k + 1]))?;
                out[k] = (xs[k], acc);
            }
            Ok(out)
        };
        Ok(Truncation {
            epsilon: eps,
            mass_plus,
            mass_minus,
            small_var,
            drift,
            table_plus: table(true, mass_plus)?,
            table_minus: table(false, mass_minus)?,
        })
    }

    pub fn truncation(&self) -> Option<&Truncation<T>> {
        self.truncation.as_ref()
    }

    pub fn is_stable(&self) -> bool {
        matches!(self.family, SeedFamily::Stable { .. })
    }

    /// True when the seed has no jump part.
    pub fn is_gaussian(&self) -> bool {
        matches!(self.nu, LevyMeasureSpec::Zero)
    }

    pub fn label(&self) -> String {
        format!("{:?}|gamma={}|b={}|nu={:?}", self.family, self.gamma, self.b, self.nu)
    }

    pub fn bg_index(&self) -> T {
        self.nu.bg_index()
    }

    pub fn mean(&self) -> Result<T> {
        match &self.family {
            SeedFamily::Gaussian => Ok(self.gamma),
            SeedFamily::Poisson { lambda } => Ok(*lambda),
            SeedFamily::CompoundPoisson { rate, jumps, drift } => Ok(*drift + *rate * jumps.raw_moment(1)),
            SeedFamily::Stable { beta, .. } => {
                if *beta > T::one() {
                    Ok(T::zero())
                } else {
                    Err(Error::InfiniteMoment(format!("stable seed with index {beta} has no mean")))
                }
            }
            SeedFamily::Custom => Ok(self.gamma + self.nu.signed_first_moment_between(T::one(), None)?),
        }
    }

    pub fn variance(&self) -> Result<T> {
        match &self.family {
            SeedFamily::Stable { .. } => Err(Error::InfiniteMoment("stable seed has no second moment".into())),
            SeedFamily::CompoundPoisson { rate, jumps, .. } => Ok(*rate * jumps.raw_moment(2)),
            _ => Ok(self.b * self.b + self.nu.abs_moment(T::lit(2.0))?),
        }
    }

    pub fn kappa4(&self) -> Result<T> {
        match &self.family {
            SeedFamily::Stable { .. } => Err(Error::InfiniteMoment("stable seed has no fourth moment".into())),
            SeedFamily::CompoundPoisson { rate, jumps, .. } => Ok(*rate * jumps.raw_moment(4)),
            _ => self.nu.abs_moment(T::lit(4.0)),
        }
    }

    /// Third cumulant `∫x³ν`.
    pub fn kappa3(&self) -> Result<T> {
        match &self.family {
            SeedFamily::Stable { .. } => Err(Error::InfiniteMoment("stable seed has no third moment".into())),
            SeedFamily::CompoundPoisson { rate, jumps, .. } => Ok(*rate * jumps.raw_moment(3)),
            _ => {
                let three = T::lit(3.0);
                Ok(self.nu.side_moment(three, true)? - self.nu.side_moment(three, false)?)
            }
        }
    }
}

/// `ψ(z)` of the seed.
pub fn cumulant<T: Scalar>(seed: &LevySeedSpec<T>, z: T) -> Result<Complex<T>> {
    if !z.is_finite() {
        return invalid("non-finite argument");
    }
    let half = T::lit(0.5);
    match &seed.family {
        SeedFamily::Gaussian => Ok(Complex::new(-half * seed.b * seed.b * z * z, seed.gamma * z)),
        SeedFamily::Poisson { lambda } => Ok((Complex::new(T::zero(), z).exp() - T::one()) * *lambda),
        SeedFamily::CompoundPoisson { rate, jumps, drift } => Ok((jumps.cf(z) - T::one()) * *rate + Complex::new(T::zero(), *drift * z)),
        SeedFamily::Stable { beta, k_plus, k_minus } => stable_exponent(*beta, *k_plus, *k_minus, seed.gamma, z),
        SeedFamily::Custom => Ok(Complex::new(-half * seed.b * seed.b * z * z, seed.gamma * z) + seed.nu.jump_exponent(z)?),
    }
}

/// `(mean, variance, κ₄)` of the seed.
pub fn seed_moments<T: Scalar>(seed: &LevySeedSpec<T>) -> Result<SeedMoments<T>> {
    Ok(SeedMoments { mean: seed.mean()?, var: seed.variance()?, kappa4: seed.kappa4()? })
}

pub fn bg_index<T: Scalar>(seed: &LevySeedSpec<T>) -> T {
    seed.bg_index()
}

pub(crate) fn poisson_count<T: Scalar, R: Rng + ?Sized>(mean: T, rng: &mut R) -> u64 {
    let m = mean.f64();
    if m <= 0.0 {
        return 0;
    }
    match Poisson::new(m) {
        Ok(p) => {
            let v: f64 = p.sample(rng);
            v as u64
        }
        Err(_) => 0,
    }
}

fn sample_table<T: Scalar, R: Rng + ?Sized>(table: &[(T, T)], mass: T, rng: &mut R) -> T {
    // tail values decrease along the table; find the bracket of u·mass
    let target = T::lit(rng.random::<f64>()) * mass;
    let k = table.partition_point(|&(_, t)| t >= target);
    if k == 0 {
        return table[0].0;
    }
    if k >= table.len() {
        return table[table.len() - 1].0;
    }
    let (x0, t0) = table[k - 1];
    let (x1, t1) = table[k];
    if t1 <= T::zero() || t0 <= t1 {
        return x0;
    }
    let w = (t0.ln() - target.ln()) / (t0.ln() - t1.ln());
    (x0.ln() + w * (x1.ln() - x0.ln())).exp()
}

/// Draw `L(A)` for `Leb(A) = area`.
pub fn cell_sample<T: Scalar, R: Rng + ?Sized>(seed: &LevySeedSpec<T>, area: T, rng: &mut R) -> Result<T> {
    if !(area >= T::zero()) || !area.is_finite() {
        return invalid(format!("cell area must be finite and ≥ 0, got {area}"));
    }
    if area == T::zero() {
        return Ok(T::zero());
    }
    Ok(cell_sample_unchecked(seed, area, rng))
}

pub(crate) fn cell_sample_unchecked<T: Scalar, R: Rng + ?Sized>(seed: &LevySeedSpec<T>, area: T, rng: &mut R) -> T {
    if area <= T::zero() {
        return T::zero();
    }
    match &seed.family {
        SeedFamily::Gaussian => {
            let z: f64 = rng.sample(StandardNormal);
            seed.gamma * area + seed.b * area.sqrt() * T::lit(z)
        }
        SeedFamily::Poisson { lambda } => T::lit(poisson_count(*lambda * area, rng) as f64),
        SeedFamily::CompoundPoisson { rate, jumps, drift } => {
            let k = poisson_count(*rate * area, rng);
            let mut s = *drift * area;
            for _ in 0..k {
                s = s + jumps.sample(rng);
            }
            s
        }
        SeedFamily::Stable { beta, k_plus, k_minus } => {
            if *beta == T::one() {
                // symmetric Cauchy with scale K₊π·area
                let v = (rng.random::<f64>() - 0.5) * std::f64::consts::PI;
                seed.gamma * area + *k_plus * T::PI() * area * T::lit(v.tan())
            } else {
                let (sigma, rho) = stable_sigma_rho(*beta, *k_plus, *k_minus);
                sample_stable_std(*beta, rho, (sigma * area).powf(T::one() / *beta), rng)
            }
        }
        SeedFamily::Custom => {
            let mut s = seed.gamma * area;
            let mut var = seed.b * seed.b;
            if let Some(tr) = &seed.truncation {
                s = s - tr.drift * area;
                var = var + tr.small_var;
                let k = poisson_count((tr.mass_plus + tr.mass_minus) * area, rng);
                let p_plus = tr.mass_plus / (tr.mass_plus + tr.mass_minus);
                for _ in 0..k {
                    let up = T::lit(rng.random::<f64>()) < p_plus;
                    let x = sample_truncated_jump(&seed.nu, tr, up, rng);
                    s = if up { s + x } else { s - x };
                }
            } else if let LevyMeasureSpec::Finite { rate, law } = &seed.nu {
                let small = seed.nu.signed_first_moment_between(T::zero(), Some(T::one())).unwrap_or(T::zero());
                s = s - small * area;
                let k = poisson_count(*rate * area, rng);
                for _ in 0..k {
                    s = s + law.sample(rng);
                }
            }
            if var > T::zero() {
                let z: f64 = rng.sample(StandardNormal);
                s = s + (var * area).sqrt() * T::lit(z);
            }
            s
        }
    }
}

fn sample_truncated_jump<T: Scalar, R: Rng + ?Sized>(nu: &LevyMeasureSpec<T>, tr: &Truncation<T>, up: bool, rng: &mut R) -> T {
    match nu {
        LevyMeasureSpec::PowerLaw { beta, .. } => {
            let u: f64 = rng.random::<f64>();
            tr.epsilon * T::lit(1.0 - u).powf(-T::one() / *beta)
        }
        _ => {
            if up {
                sample_table(&tr.table_plus, tr.mass_plus, rng)
            } else {
                sample_table(&tr.table_minus, tr.mass_minus, rng)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::path_rng;

    fn ecf(samples: &[f64], z: f64) -> Complex<f64> {
        let n = samples.len() as f64;
        samples.iter().map(|&x| Complex::new(0.0, z * x).exp()).sum::<Complex<f64>>() / n
    }

    #[test]
    fn poisson_cumulant_value() {
        let s = LevySeedSpec::poisson(2.0f64).unwrap();
        let p = cumulant(&s, 1.0).unwrap();
        assert!((p.re - (-0.9193953882637205)).abs() < 1e-12);
        assert!((p.im - 1.682941969615793).abs() < 1e-12);
    }

    #[test]
    fn cumulant_at_zero_vanishes() {
        let seeds = vec![
            LevySeedSpec::poisson(3.0f64).unwrap(),
            LevySeedSpec::gaussian(1.0, 2.0).unwrap(),
            LevySeedSpec::stable(1.4, 1.0, 0.5).unwrap(),
            LevySeedSpec::compound_poisson(2.0, JumpLaw::Normal { mean: 0.5, sd: 1.0 }, 0.1).unwrap(),
            LevySeedSpec::custom(0.0, 0.5, LevyMeasureSpec::tempered_stable(1.0, 1.0, 0.7, 1.0, 2.0).unwrap(), None).unwrap(),
        ];
        for s in &seeds {
            assert!(cumulant(s, 0.0).unwrap().norm() < 1e-12, "{}", s.label());
        }
    }

    #[test]
    fn gaussian_cumulant() {
        let s = LevySeedSpec::gaussian(0.0f64, 1.0).unwrap();
        let p = cumulant(&s, 2.0).unwrap();
        assert_eq!(p, Complex::new(-2.0, 0.0));
    }

    #[test]
    fn stable_exponent_values() {
        let p = stable_exponent(0.5f64, 1.0, 1.0, 0.0, 1.0).unwrap();
        assert!((p.re + 5.013256549262001).abs() < 1e-9, "{p}");
        assert!(p.im.abs() < 1e-12);
        assert_eq!(stable_exponent(1.2f64, 1.0, 0.0, 0.0, 0.0).unwrap().norm(), 0.0);
        let c = stable_exponent(1.0f64, 1.0, 1.0, 0.0, 2.0).unwrap();
        assert!((c.re + 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn stable_exponent_errors() {
        assert!(matches!(stable_exponent(1.0f64, 1.0, 0.5, 0.0, 1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(stable_exponent(2.0f64, 1.0, 1.0, 0.0, 1.0), Err(Error::OutOfRange(_))));
        assert!(matches!(stable_exponent(0.0f64, 1.0, 1.0, 0.0, 1.0), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn stable_skew_matches_levy_measure() {
        // only positive jumps: Im ∫(sin(zx) − zx)x^{-2.5}dx < 0 for z > 0
        let p = stable_exponent(1.5f64, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert!((p.re + 1.6710855164206666).abs() < 1e-9);
        assert!((p.im + 1.6710855164206666).abs() < 1e-9);
    }

    #[test]
    fn sigma_monotone_in_total_mass() {
        for &b in &[0.3f64, 0.7, 1.4, 1.8] {
            let (s1, _) = stable_sigma_rho(b, 1.0, 1.0);
            let (s2, _) = stable_sigma_rho(b, 1.5, 1.0);
            assert!(s2 > s1 && s1 > 0.0);
        }
    }

    #[test]
    fn bg_indices() {
        assert_eq!(LevySeedSpec::poisson(3.0f64).unwrap().bg_index(), 0.0);
        assert_eq!(LevySeedSpec::gaussian(0.0f64, 1.0).unwrap().bg_index(), 0.0);
        for &b in &[0.3f64, 0.7, 1.0, 1.4, 1.8] {
            assert_eq!(LevySeedSpec::stable(b, 1.0, 1.0).unwrap().bg_index(), b);
        }
        let ts = LevyMeasureSpec::tempered_stable(1.0f64, 0.5, 1.3, 1.0, 1.0).unwrap();
        assert!((ts.bg_index() - 1.3).abs() < 1e-4);
    }

    #[test]
    fn moments_by_family() {
        let m = seed_moments(&LevySeedSpec::poisson(2.0f64).unwrap()).unwrap();
        assert_eq!((m.mean, m.var, m.kappa4), (2.0, 2.0, 2.0));
        let g = seed_moments(&LevySeedSpec::gaussian(1.0f64, 2.0).unwrap()).unwrap();
        assert_eq!((g.mean, g.var, g.kappa4), (1.0, 4.0, 0.0));
        let s = LevySeedSpec::stable(1.5f64, 1.0, 1.0).unwrap();
        assert!(matches!(s.variance(), Err(Error::InfiniteMoment(_))));
        assert!(matches!(seed_moments(&s), Err(Error::InfiniteMoment(_))));
    }

    #[test]
    fn tempered_stable_moments() {
        // ∫x²·x^{-1.5}e^{-x}dx = Γ(1.5), ∫x⁴·... = Γ(3.5)
        let nu = LevyMeasureSpec::tempered_stable(1.0f64, 0.0, 0.5, 1.0, 1.0).unwrap();
        assert!((nu.abs_moment(2.0).unwrap() - gamma(1.5)).abs() < 1e-8);
        assert!((nu.abs_moment(4.0).unwrap() - gamma(3.5)).abs() < 1e-7);
        assert!(matches!(nu.abs_moment(0.3), Err(Error::InfiniteMoment(_))));
        // tail at x: Γ(-0.5, x) via quadrature against direct integral
        let t = nu.nu_plus(0.5);
        let direct = quad::simpson_to_inf(|x: f64| x.powf(-1.5) * (-x).exp(), 0.5, 1e-12).unwrap();
        assert!((t - direct).abs() < 1e-7);
    }

    #[test]
    fn cell_sample_rejects_negative_area() {
        let s = LevySeedSpec::poisson(1.0f64).unwrap();
        let mut rng = path_rng(1, 0, 0);
        assert!(cell_sample(&s, -1.0, &mut rng).is_err());
        assert_eq!(cell_sample(&s, 0.0, &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn poisson_cell_mean() {
        let s = LevySeedSpec::poisson(2.0f64).unwrap();
        let mut rng = path_rng(11, 0, 0);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| cell_sample(&s, 0.5, &mut rng).unwrap()).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 3.0 * (1.0f64 / n as f64).sqrt());
    }

    #[test]
    fn gaussian_cell_variance() {
        let s = LevySeedSpec::gaussian(0.0f64, 1.0).unwrap();
        let mut rng = path_rng(12, 0, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| cell_sample(&s, 4.0, &mut rng).unwrap()).collect();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((v / 4.0 - 1.0).abs() < 0.05);
    }

    fn check_cf(seed: &LevySeedSpec<f64>, area: f64, stream: u64) {
        let mut rng = path_rng(99, stream, 0);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| cell_sample(seed, area, &mut rng).unwrap()).collect();
        let tol = 4.0 / (n as f64).sqrt();
        for k in -8..=8 {
            let z = 0.25 * k as f64;
            let target = (cumulant(seed, z).unwrap() * area).exp();
            let d = (ecf(&xs, z) - target).norm();
            assert!(d < tol, "{} z={z} d={d}", seed.label());
        }
    }

    #[test]
    fn cell_laws_match_exponents() {
        check_cf(&LevySeedSpec::poisson(1.5).unwrap(), 0.7, 1);
        check_cf(&LevySeedSpec::gaussian(0.3, 1.2).unwrap(), 1.3, 2);
        check_cf(&LevySeedSpec::stable(1.2, 1.0, 1.0).unwrap(), 0.8, 3);
        check_cf(&LevySeedSpec::stable(0.7, 1.0, 0.3).unwrap(), 0.5, 4);
        check_cf(&LevySeedSpec::stable(1.5, 0.2, 1.0).unwrap(), 0.5, 5);
        check_cf(&LevySeedSpec::stable(1.0, 0.5, 0.5).unwrap(), 0.5, 6);
        check_cf(&LevySeedSpec::compound_poisson(2.0, JumpLaw::Exponential { rate: 2.0 }, -0.5).unwrap(), 0.9, 7);
        let ts = LevyMeasureSpec::tempered_stable(0.5, 0.8, 0.6, 2.0, 1.0).unwrap();
        check_cf(&LevySeedSpec::custom(0.2, 0.3, ts, None).unwrap(), 1.0, 8);
    }

    #[test]
    fn additivity_of_cells() {
        // sum of cells with areas a₁, a₂ has exponent (a₁+a₂)ψ
        let s = LevySeedSpec::compound_poisson(1.0, JumpLaw::Normal { mean: 1.0, sd: 0.5 }, 0.0).unwrap();
        let mut rng = path_rng(5, 0, 0);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| cell_sample(&s, 0.4, &mut rng).unwrap() + cell_sample(&s, 0.9, &mut rng).unwrap()).collect();
        for k in -6..=6 {
            let z = 0.3 * k as f64;
            let t = (cumulant(&s, z).unwrap() * 1.3).exp();
            assert!((ecf(&xs, z) - t).norm() < 4.0 / (n as f64).sqrt());
        }
    }

    #[test]
    fn custom_truncation_is_tight() {
        let ts = LevyMeasureSpec::tempered_stable(1.0f64, 1.0, 0.5, 1.0, 1.0).unwrap();
        let s = LevySeedSpec::custom(0.0, 0.0, ts, None).unwrap();
        let tr = s.truncation().unwrap();
        assert!(tr.small_var <= 1e-6 * s.variance().unwrap());
    }
}
