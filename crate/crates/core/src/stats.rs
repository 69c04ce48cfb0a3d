//! Estimators and distances used to compare rescaled functionals with
//! their limit laws.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::levy::{stable_exponent, LevySeedSpec};
use crate::scalar::{norm_cdf, Scalar};
use crate::trawl::{Kernel, TrawlFunction};

/// Sample moments with standard errors (delta-method, plug-in).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments<T> {
    pub n: usize,
    pub mean: T,
    /// Unbiased.
    pub var: T,
    pub central4: T,
    pub se_mean: T,
    pub se_var: T,
    pub se_central4: T,
}

pub fn empirical_moments<T: Scalar>(samples: &[T]) -> Result<Moments<T>> {
    let n = samples.len();
    if n < 2 {
        return invalid("need at least 2 samples");
    }
    let nn = T::usize(n);
    let mean = samples.iter().copied().sum::<T>() / nn;
    let (mut m2, mut m4, mut m8) = (T::zero(), T::zero(), T::zero());
    for &x in samples {
        let d = x - mean;
        let d2 = d * d;
        m2 = m2 + d2;
        m4 = m4 + d2 * d2;
        m8 = m8 + d2 * d2 * d2 * d2;
    }
    let (m2p, m4, m8) = (m2 / nn, m4 / nn, m8 / nn);
    let var = m2 / T::usize(n - 1);
    Ok(Moments {
        n,
        mean,
        var,
        central4: m4,
        se_mean: (var / nn).sqrt(),
        se_var: ((m4 - m2p * m2p).max(T::zero()) / nn).sqrt(),
        se_central4: ((m8 - m4 * m4).max(T::zero()) / nn).sqrt(),
    })
}

/// Fourth central moment of `X_t`: `Leb(A)κ₄ + 3(Leb(A)·Var L′)²`, and
/// the variant without the factor 3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourthMoment<T> {
    pub cumulant_form: T,
    pub displayed_form: T,
}

pub fn trawl_fourth_central_moment<T: Scalar>(seed: &LevySeedSpec<T>, trawl: &TrawlFunction<T>) -> Result<FourthMoment<T>> {
    let leb = trawl.leb();
    let k4 = seed.kappa4()?;
    let v = leb * seed.variance()?;
    Ok(FourthMoment { cumulant_form: leb * k4 + T::lit(3.0) * v * v, displayed_form: leb * k4 + v * v })
}

fn sorted<T: Scalar>(samples: &[T]) -> Vec<T> {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// `sup_x |F_N(x) − F(x)|`.
pub fn ks_distance<T: Scalar>(samples: &[T], cdf: impl Fn(T) -> T) -> T {
    let s = sorted(samples);
    let nn = T::usize(s.len());
    let mut d = T::zero();
    for (k, &x) in s.iter().enumerate() {
        let f = cdf(x);
        let lo = T::usize(k) / nn;
        let hi = T::usize(k + 1) / nn;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample<T: Scalar>(a: &[T], b: &[T]) -> T {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (T::usize(a.len()), T::usize(b.len()));
    let (mut i, mut j, mut d) = (0, 0, T::zero());
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((T::usize(i) / na - T::usize(j) / nb).abs());
    }
    d
}

/// `sup_z |N⁻¹Σ e^{izX_k} − φ(z)|` over `z_grid`.
pub fn ecf_distance<T: Scalar>(samples: &[T], z_grid: &[T], target_cf: impl Fn(T) -> Complex<T>) -> T {
    let nn = T::usize(samples.len().max(1));
    z_grid.iter().fold(T::zero(), |d, &z| {
        let e = samples.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &x| acc + Complex::new(T::zero(), z * x).exp()) / nn;
        d.max((e - target_cf(z)).norm())
    })
}

/// Sample covariance of the columns of `rows` (one row per path).
#[derive(Clone, Debug, PartialEq)]
pub struct CovMatrix<T> {
    pub dim: usize,
    pub cov: Vec<T>,
    pub se: Vec<T>,
}

impl<T: Scalar> CovMatrix<T> {
    pub fn get(&self, i: usize, j: usize) -> T {
        self.cov[i * self.dim + j]
    }
    pub fn se(&self, i: usize, j: usize) -> T {
        self.se[i * self.dim + j]
    }
}

pub fn empirical_cov_matrix<T: Scalar>(rows: &[Vec<T>]) -> Result<CovMatrix<T>> {
    let n = rows.len();
    if n < 2 {
        return invalid("need at least 2 paths");
    }
    let dim = rows[0].len();
    if rows.iter().any(|r| r.len() != dim) {
        return invalid("rows have different lengths");
    }
    let nn = T::usize(n);
    let means: Vec<T> = (0..dim).map(|j| rows.iter().map(|r| r[j]).sum::<T>() / nn).collect();
    let mut cov = vec![T::zero(); dim * dim];
    let mut se = vec![T::zero(); dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let prods: Vec<T> = rows.iter().map(|r| (r[i] - means[i]) * (r[j] - means[j])).collect();
            let c = prods.iter().copied().sum::<T>() / T::usize(n - 1);
            let m = prods.iter().copied().sum::<T>() / nn;
            let v = prods.iter().map(|&p| (p - m) * (p - m)).sum::<T>() / nn;
            let s = (v / nn).sqrt();
            for (a, b) in [(i, j), (j, i)] {
                cov[a * dim + b] = c;
                se[a * dim + b] = s;
            }
        }
    }
    Ok(CovMatrix { dim, cov, se })
}

/// `Ĥ = ½ log₂(E|X_{t+2b} − X_t|² / E|X_{t+b} − X_t|²)` pooled over paths
/// and block starts `t = 0, b, 2b, …`.
pub fn hurst_from_increments<T: Scalar>(paths: &[Vec<T>], block: usize) -> Result<T> {
    if block == 0 {
        return invalid("block must be ≥ 1");
    }
    let (mut one, mut two, mut n1, mut n2) = (T::zero(), T::zero(), 0usize, 0usize);
    for p in paths {
        if p.len() < 2 * block + 1 {
            return invalid(format!("path of length {} has fewer than 2 blocks of {block}", p.len()));
        }
        let mut k = 0;
        while k + block < p.len() {
            let d = p[k + block] - p[k];
            one = one + d * d;
            n1 += 1;
            if k + 2 * block < p.len() {
                let d2 = p[k + 2 * block] - p[k];
                two = two + d2 * d2;
                n2 += 1;
            }
            k += block;
        }
    }
    if n1 == 0 || n2 == 0 || !(one > T::zero()) {
        return Err(Error::InvalidArgument("degenerate increment variance".into()));
    }
    let ratio = (two / T::usize(n2)) / (one / T::usize(n1));
    Ok(T::lit(0.5) * ratio.log2())
}

/// Laws the rescaled functionals are compared with.
#[derive(Clone, Debug)]
pub enum LimitTarget<T> {
    Normal {
        mean: T,
        var: T,
    },
    /// `exp(t·ψ(z; β, K₊, K₋))`.
    StableCf {
        beta: T,
        k_plus: T,
        k_minus: T,
        t: T,
    },
    FbmCov {
        hurst: T,
        sigma2: T,
    },
    MaCov {
        kernel: Kernel<T>,
        tol: T,
    },
    BrownianCov {
        sigma2: T,
    },
}

impl<T: Scalar> LimitTarget<T> {
    pub fn cdf(&self, x: T) -> Result<T> {
        match self {
            Self::Normal { mean, var } if *var > T::zero() => Ok(norm_cdf((x - *mean) / var.sqrt())),
            Self::Normal { .. } => invalid("normal target needs var > 0"),
            _ => invalid("target has no closed-form cdf"),
        }
    }

    pub fn cf(&self, z: T) -> Result<Complex<T>> {
        match self {
            Self::Normal { mean, var } => Ok(Complex::new(-T::lit(0.5) * *var * z * z, *mean * z).exp()),
            Self::StableCf { beta, k_plus, k_minus, t } => Ok((stable_exponent(*beta, *k_plus, *k_minus, T::zero(), z)? * *t).exp()),
            _ => invalid("target is a covariance, not a law"),
        }
    }

    pub fn cov(&self, s: T, t: T) -> Result<T> {
        let half = T::lit(0.5);
        match self {
            Self::FbmCov { hurst, sigma2 } => {
                let h2 = T::lit(2.0) * *hurst;
                Ok(*sigma2 * half * (s.powf(h2) + t.powf(h2) - (s - t).abs().powf(h2)))
            }
            Self::BrownianCov { sigma2 } => Ok(*sigma2 * s.min(t)),
            Self::MaCov { kernel, tol } => kernel.overlap((s - t).abs(), *tol),
            _ => invalid("target is a law, not a covariance"),
        }
    }
}

/// One line of a JSON metric report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricRecord {
    pub metric: String,
    pub value: f64,
    pub se: Option<f64>,
    pub target: Option<f64>,
    pub pass: Option<bool>,
}
