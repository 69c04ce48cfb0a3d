//! Partial sums `S_m = Σ_{k<m} (X_{kΔ} − E X)`, their exact and leading-order
//! variances, the rescaling factors of each sampling regime and the
//! constants of the corresponding limit laws.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::levy::{stable_exponent, LevyMeasureSpec, LevySeedSpec, SeedFamily};
use crate::quad;
use crate::scalar::Scalar;
use crate::sim::{CellField, GridScheme, MuRegime};
use crate::trawl::{acf, MemoryClass, TrawlFamily, TrawlFunction};

/// Sampling regime of a limit experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RegimeSpec<T> {
    FiniteMu { mu: T },
    ZeroMuFirst,
    ZeroMuSecondGauss,
    ZeroMuSecondStable { beta: T },
    ShortMemory,
    LongMemoryGauss { kappa: T },
    LongMemoryStableI { kappa: T },
    LongMemoryStableII { kappa: T, beta_nu: T },
    StableBasisI { beta: T, kappa: T },
}

impl<T: Scalar> RegimeSpec<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Self::FiniteMu { .. } => "finite_mu",
            Self::ZeroMuFirst => "zero_mu_first",
            Self::ZeroMuSecondGauss => "zero_mu_second_gauss",
            Self::ZeroMuSecondStable { .. } => "zero_mu_second_stable",
            Self::ShortMemory => "short_memory",
            Self::LongMemoryGauss { .. } => "long_memory_gauss",
            Self::LongMemoryStableI { .. } => "long_memory_stable_i",
            Self::LongMemoryStableII { .. } => "long_memory_stable_ii",
            Self::StableBasisI { .. } => "stable_basis_i",
        }
    }

    fn required_mu(&self) -> MuRegime {
        match self {
            Self::FiniteMu { .. } => MuRegime::Finite,
            Self::ZeroMuFirst | Self::ZeroMuSecondGauss | Self::ZeroMuSecondStable { .. } => MuRegime::Zero,
            _ => MuRegime::Infinite,
        }
    }

    /// Rejects parameter combinations outside the regime's hypotheses.
    pub fn validate(&self, trawl: &TrawlFunction<T>, seed: &LevySeedSpec<T>, scheme: Option<&GridScheme<T>>) -> Result<()> {
        let (zero, one, two, three) = (T::zero(), T::one(), T::lit(2.0), T::lit(3.0));
        if let Some(s) = scheme {
            if s.regime() != self.required_mu() {
                return invalid(format!("{} needs grid regime {:?}, got {:?}", self.name(), self.required_mu(), s.regime()));
            }
            if let (Self::FiniteMu { mu }, MuRegime::Finite) = (self, s.regime()) {
                if (*mu - s.c).abs() > T::lit(1e-12) * mu.abs().max(one) {
                    return invalid("finite_mu: μ must equal the Δ-rule constant c");
                }
            }
        }
        let lm_kappa = |kappa: T| -> Result<()> {
            if !(kappa > two && kappa < three) {
                return invalid(format!("κ must lie in (2, 3), got {kappa}"));
            }
            match trawl.memory_class() {
                MemoryClass::Long { kappa: k } if (k - kappa).abs() < T::lit(1e-12) => Ok(()),
                _ => invalid(format!("{} needs a power-law trawl with κ = {kappa}", self.name())),
            }
        };
        let finite_var = || -> Result<()> {
            seed.variance().map(|_| ()).map_err(|_| Error::InvalidArgument(format!("{} needs a finite-variance seed", self.name())))
        };
        match *self {
            Self::FiniteMu { mu } => {
                if !(mu > zero) {
                    return invalid("μ must be > 0");
                }
                finite_var()
            }
            Self::ZeroMuFirst => seed.mean().map(|_| ()),
            Self::ZeroMuSecondGauss => {
                if !(seed.b > zero) {
                    return invalid("zero_mu_second_gauss needs b > 0");
                }
                Ok(())
            }
            Self::ZeroMuSecondStable { beta } => {
                if seed.b != zero {
                    return invalid("zero_mu_second_stable needs b = 0");
                }
                if !(beta > zero && beta < two) {
                    return invalid("β must lie in (0, 2)");
                }
                if (seed.bg_index() - beta).abs() > T::lit(1e-3) {
                    return invalid(format!("seed small-jump index {} differs from β = {beta}", seed.bg_index()));
                }
                if beta == one {
                    let (kp, km) = small_jump_constants(seed, beta);
                    if (kp - km).abs() > T::lit(1e-9) * (kp + km) {
                        return invalid("β = 1 needs symmetric small jumps");
                    }
                }
                Ok(())
            }
            Self::ShortMemory => {
                if trawl.memory_class() != MemoryClass::Short {
                    return invalid("short_memory needs a short-memory trawl");
                }
                finite_var()
            }
            Self::LongMemoryGauss { kappa } => {
                lm_kappa(kappa)?;
                if !(seed.b > zero) {
                    return invalid("long_memory_gauss needs b > 0");
                }
                finite_var()
            }
            Self::LongMemoryStableI { kappa } => {
                lm_kappa(kappa)?;
                if seed.b != zero {
                    return invalid("long_memory_stable_i needs b = 0");
                }
                finite_var()?;
                if !(seed.bg_index() < kappa - one) {
                    return invalid("long_memory_stable_i needs β_ν < κ − 1");
                }
                Ok(())
            }
            Self::LongMemoryStableII { kappa, beta_nu } => {
                lm_kappa(kappa)?;
                if seed.b != zero {
                    return invalid("long_memory_stable_ii needs b = 0");
                }
                finite_var()?;
                if !(beta_nu < two && beta_nu > kappa - one && kappa - one > one) {
                    return invalid("long_memory_stable_ii needs 2 > β_ν > κ − 1 > 1");
                }
                if (seed.bg_index() - beta_nu).abs() > T::lit(1e-3) {
                    return invalid(format!("seed index {} differs from β_ν = {beta_nu}", seed.bg_index()));
                }
                Ok(())
            }
            Self::StableBasisI { beta, kappa } => {
                lm_kappa(kappa)?;
                match seed.family {
                    SeedFamily::Stable { beta: b, .. } if (b - beta).abs() < T::lit(1e-12) => {}
                    _ => return invalid(format!("stable_basis_i needs a strictly stable seed with β = {beta}")),
                }
                if !(beta > one && beta < kappa - one) {
                    return invalid("stable_basis_i needs 1 < β < κ − 1");
                }
                Ok(())
            }
        }
    }
}

/// `S_1, …, S_n` of the path centred at `mean`.
pub fn partial_sums<T: Scalar>(path: &[T], mean: T) -> Vec<T> {
    let mut acc = T::zero();
    path.iter()
        .map(|&x| {
            acc = acc + (x - mean);
            acc
        })
        .collect()
}

/// `Var(S_m) = mΓ(0) + 2 Σ_{i=1}^{m−1} Σ_{j=1}^{i} Γ(jΔ)`.
#[allow(non_snake_case)]
pub fn theoretical_var_S<T: Scalar>(trawl: &TrawlFunction<T>, var_seed: T, m: usize, delta: T) -> T {
    let mut s = T::usize(m) * acf(trawl, var_seed, T::zero());
    let two = T::lit(2.0);
    for j in 1..m {
        s = s + two * T::usize(m - j) * acf(trawl, var_seed, delta * T::usize(j));
    }
    s
}

/// Which leading-order variance formula applies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VarianceCase<T> {
    /// `mΔ → 0`.
    I,
    /// `mΔ → μ`.
    II { mu: T },
    /// `mΔ → ∞`, integrable autocovariance.
    IIIa,
    /// `mΔ → ∞`, power-law trawl.
    IIIb,
}

impl<T: Scalar> VarianceCase<T> {
    pub fn infer(trawl: &TrawlFunction<T>, scheme: &GridScheme<T>) -> Self {
        match scheme.regime() {
            MuRegime::Zero => Self::I,
            MuRegime::Finite => Self::II { mu: scheme.c },
            MuRegime::Infinite | MuRegime::Fixed => match trawl.memory_class() {
                MemoryClass::Short => Self::IIIa,
                MemoryClass::Long { .. } => Self::IIIb,
            },
        }
    }
}

/// `c_α = 2/((α−1)(2−α)(3−α))`.
pub fn c_alpha<T: Scalar>(alpha: T) -> T {
    let one = T::one();
    T::lit(2.0) / ((alpha - one) * (T::lit(2.0) - alpha) * (T::lit(3.0) - alpha))
}

/// Leading term of `Var(S_m)` in each case.
#[allow(non_snake_case)]
pub fn asymptotic_var_S<T: Scalar>(case: VarianceCase<T>, trawl: &TrawlFunction<T>, var_seed: T, m: usize, delta: T) -> Result<T> {
    let mm = T::usize(m);
    match case {
        VarianceCase::I => Ok(mm * mm * acf(trawl, var_seed, T::zero())),
        VarianceCase::II { mu } => {
            // ∫_0^μ ∫_0^r Γ(s) ds dr = ∫_0^μ (μ − s) Γ(s) ds
            let inner = quad::simpson(|s| (mu - s) * acf(trawl, var_seed, s), T::zero(), mu, T::lit(1e-13))?;
            Ok(T::lit(2.0) / (delta * delta) * inner)
        }
        VarianceCase::IIIa => {
            if trawl.memory_class() != MemoryClass::Short {
                return invalid("short-memory formula used with a long-memory trawl");
            }
            Ok(mm / delta * integrated_acf(trawl, var_seed)?)
        }
        VarianceCase::IIIb => match trawl.family {
            TrawlFamily::PowerLawLM { kappa, .. } => {
                let alpha = kappa - T::one();
                Ok(c_alpha(alpha) * var_seed * trawl.a(mm * delta) * mm * mm * mm * delta)
            }
            _ => invalid("long-memory formula needs a power-law trawl"),
        },
    }
}

/// `∫_ℝ Γ_X = 2 Var(L′) ∫_0^∞ u a(u) du`.
pub fn integrated_acf<T: Scalar>(trawl: &TrawlFunction<T>, var_seed: T) -> Result<T> {
    Ok(T::lit(2.0) * var_seed * trawl.double_tail(T::zero())?)
}

/// Factor multiplying `S` (or `Z`) in each regime.
pub fn rescale_factor<T: Scalar>(
    regime: &RegimeSpec<T>,
    n: usize,
    delta: T,
    trawl: &TrawlFunction<T>,
    _seed: &LevySeedSpec<T>,
) -> Result<T> {
    if n == 0 || !(delta > T::zero()) {
        return invalid("need n ≥ 1 and Δ > 0");
    }
    let one = T::one();
    let nn = T::usize(n);
    let t = nn * delta;
    Ok(match *regime {
        RegimeSpec::FiniteMu { .. } => delta,
        RegimeSpec::ZeroMuFirst => one / nn,
        RegimeSpec::ShortMemory => (delta / nn).sqrt(),
        RegimeSpec::LongMemoryGauss { .. } => one / (nn * (trawl.a(t) * t).sqrt()),
        RegimeSpec::LongMemoryStableI { kappa } => match trawl.family {
            TrawlFamily::PowerLawLM { c_a, .. } => delta / (c_a * t).powf(one / (kappa - one)),
            _ => return invalid("long_memory_stable_i needs a power-law trawl"),
        },
        RegimeSpec::LongMemoryStableII { beta_nu, .. } => one / (nn * (trawl.a(t) * t).powf(one / beta_nu)),
        RegimeSpec::StableBasisI { beta, .. } => delta / t.powf(one / beta),
        RegimeSpec::ZeroMuSecondGauss => one / t.sqrt(),
        RegimeSpec::ZeroMuSecondStable { beta } => t.powf(-one / beta),
    })
}

/// `lim_{x↓0} x^β ν^±(x)`.
pub fn small_jump_constants<T: Scalar>(seed: &LevySeedSpec<T>, beta: T) -> (T, T) {
    match &seed.nu {
        LevyMeasureSpec::PowerLaw { beta: b, k_plus, k_minus } => (*k_plus / *b, *k_minus / *b),
        LevyMeasureSpec::Zero | LevyMeasureSpec::Finite { .. } => (T::zero(), T::zero()),
        nu => {
            let x = T::lit(1e-9);
            (x.powf(beta) * nu.nu_plus(x), x.powf(beta) * nu.nu_minus(x))
        }
    }
}

/// Constants of the limit law of a regime. Absent entries do not apply.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LimitConstants<T> {
    /// `∫_ℝ Γ_X`, the variance of the Brownian limit.
    pub sigma_a2: Option<T>,
    /// `Var(L′)·∫_0^∞ a`, the displayed alternative.
    pub sigma_a2_displayed: Option<T>,
    pub sigma_kappa2: Option<T>,
    pub hurst: Option<T>,
    pub c_alpha: Option<T>,
    pub rho_a: Option<T>,
    pub k_plus_kappa: Option<T>,
    pub k_minus_kappa: Option<T>,
    /// `b²a(0)`, the squared scale of the Brownian drivers when `μ = 0`.
    pub sigma_zero: Option<T>,
    /// `βa(0)`.
    pub rho_zero: Option<T>,
    /// Variance of the Gaussian limit of the rescaled functional at time 1.
    pub target_var: Option<T>,
    /// `(index, K₊, K₋)` of the stable limit at time 1.
    pub target_stable: Option<(T, T, T)>,
}

impl<T: Scalar> LimitConstants<T> {
    /// `log E e^{izY}` of the stable target.
    pub fn stable_target_exponent(&self, z: T) -> Result<Complex<T>> {
        match self.target_stable {
            Some((b, kp, km)) => stable_exponent(b, kp, km, T::zero(), z),
            None => invalid("regime has no stable target"),
        }
    }
}

/// `ϱ_a = 1/(κ−2) + (κ−1)∫_0^1(1−s)s^{β−κ}ds + 2∫_0^1 s^{β−κ+1}ds`.
pub fn rho_a_long_memory<T: Scalar>(kappa: T, beta_nu: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let q = beta_nu - kappa;
    one / (kappa - two) + (kappa - one) * (one / (q + one) - one / (q + two)) + two / (q + two)
}

pub fn limit_constants<T: Scalar>(regime: &RegimeSpec<T>, trawl: &TrawlFunction<T>, seed: &LevySeedSpec<T>) -> Result<LimitConstants<T>> {
    let (one, two, three, four) = (T::one(), T::lit(2.0), T::lit(3.0), T::lit(4.0));
    let mut c = LimitConstants::default();
    match *regime {
        RegimeSpec::FiniteMu { .. } | RegimeSpec::ZeroMuFirst => {}
        RegimeSpec::ShortMemory => {
            let v = seed.variance()?;
            let s = integrated_acf(trawl, v)?;
            c.sigma_a2 = Some(s);
            c.sigma_a2_displayed = Some(v * trawl.leb());
            c.target_var = Some(s);
        }
        RegimeSpec::LongMemoryGauss { kappa } => {
            let b2 = seed.b * seed.b;
            let s = b2 / ((kappa - two) * (three - kappa) * (four - kappa));
            c.sigma_kappa2 = Some(s);
            c.hurst = Some(two - kappa / two);
            c.c_alpha = Some(c_alpha(kappa - one));
            c.target_var = Some(s);
        }
        RegimeSpec::LongMemoryStableI { kappa } => {
            let p = kappa - one;
            let (kp, km) = (seed.nu.side_moment(p, true)?, seed.nu.side_moment(p, false)?);
            c.k_plus_kappa = Some(kp);
            c.k_minus_kappa = Some(km);
            c.target_stable = Some((p, kp, km));
        }
        RegimeSpec::LongMemoryStableII { kappa, beta_nu } => {
            let r = rho_a_long_memory(kappa, beta_nu);
            let (kp, km) = small_jump_constants(seed, beta_nu);
            c.rho_a = Some(r);
            c.target_stable = Some((beta_nu, r * beta_nu * kp, r * beta_nu * km));
        }
        RegimeSpec::StableBasisI { beta, .. } => {
            let r = trawl.a_prime_moment(beta)?;
            c.rho_a = Some(r);
            if let SeedFamily::Stable { k_plus, k_minus, .. } = seed.family {
                c.target_stable = Some((beta, r * k_plus, r * k_minus));
            }
        }
        RegimeSpec::ZeroMuSecondGauss => {
            let s = seed.b * seed.b * trawl.a(T::zero());
            c.sigma_zero = Some(s);
            // Var ∫_0^1 (1−r) d(B¹+B²) = 2/3 per unit squared scale
            c.target_var = Some(two / three * s);
        }
        RegimeSpec::ZeroMuSecondStable { beta } => {
            let r = beta * trawl.a(T::zero());
            let (kp, km) = small_jump_constants(seed, beta);
            c.rho_zero = Some(r);
            // ∫_0^1 (1−s) d(Y¹ − Y²): exponent (ψ_Y(z) + ψ_Y(−z))/(β+1)
            let k = r * (kp + km) / (beta + one);
            c.target_stable = Some((beta, k, k));
        }
    }
    Ok(c)
}

/// `Σ_cells Leb(cell)·w^p` where `w` is the multiplicity of the cell in `S_m`.
/// With `p = 2` and a Gaussian seed this is `Var(S_m)/b²`; with a strictly
/// stable seed, `S_m` has exponent `(Σ A w^β)·ψ`.
pub fn sum_weight_power<T: Scalar>(trawl: &TrawlFunction<T>, delta: T, m: usize, p: T) -> T {
    if m == 0 {
        return T::zero();
    }
    let t = |k: usize| delta * T::usize(k);
    let w = |k: usize| T::usize(k).powf(p);
    let mut s = w(m) * trawl.tail(t(m - 1));
    for j in 0..m.saturating_sub(1) {
        s = s + w(j + 1) * trawl.strip(t(j), delta);
    }
    for d in 0..m.saturating_sub(2) {
        s = s + T::usize(m - 2 - d) * w(d + 1) * trawl.second(t(d), delta);
    }
    for j in 1..m {
        s = s + w(j) * trawl.strip(t(j - 1), delta);
    }
    s
}

/// For `n·Z_1 = n·X_0 − S_n`: `(Σ_{c>0} A c^p, Σ_{c<0} A |c|^p)` over cell coefficients `c`.
pub fn z_weight_powers<T: Scalar>(trawl: &TrawlFunction<T>, delta: T, n: usize, p: T) -> (T, T) {
    let t = |k: usize| delta * T::usize(k);
    let w = |k: usize| T::usize(k).powf(p);
    let mut pos = T::zero();
    for j in 0..n.saturating_sub(1) {
        pos = pos + w(n - 1 - j) * trawl.strip(t(j), delta);
    }
    let mut neg = T::zero();
    for d in 0..n.saturating_sub(2) {
        neg = neg + T::usize(n - 2 - d) * w(d + 1) * trawl.second(t(d), delta);
    }
    for j in 1..n {
        neg = neg + w(j) * trawl.strip(t(j - 1), delta);
    }
    (pos, neg)
}

/// Exact `Var(Z_1)` for `Z_1 = X_0 − S_n/n` from the cell weights.
pub fn z_variance<T: Scalar>(trawl: &TrawlFunction<T>, var_seed: T, delta: T, n: usize) -> T {
    let (pos, neg) = z_weight_powers(trawl, delta, n, T::lit(2.0));
    let nn = T::usize(n);
    var_seed * (pos + neg) / (nn * nn)
}

/// `[S^{Δ,1}, S^{Δ,2}, S^{Δ,3}, S^{Δ,4}]` of `S_m` from centred cells.
pub fn decompose<T: Scalar>(cells: &CellField<T>, m: usize) -> Result<[T; 4]> {
    if m == 0 || m > cells.n {
        return invalid("need 1 ≤ m ≤ n");
    }
    let mut s = [T::zero(); 4];
    for i in 1..m {
        for j in 1..=(m - i) {
            s[0] = s[0] + T::usize(j) * cells.cell(i, i + j - 1);
        }
        s[1] = s[1] + T::usize(m - i) * cells.zeta(i, m);
    }
    for j in 0..m {
        s[2] = s[2] + T::usize(j + 1) * cells.cell(0, j);
    }
    s[3] = T::usize(m) * cells.zeta(0, m);
    Ok(s)
}

/// Riemann sums of a coarse subgrid against the trapezoid integral of the
/// fine path, at the coarse times `t_k = k·stride·Δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoarseComparison<T> {
    pub times: Vec<T>,
    pub riemann: Vec<T>,
    pub trapezoid: Vec<T>,
}

impl<T: Scalar> CoarseComparison<T> {
    pub fn sup_error(&self) -> T {
        self.riemann.iter().zip(&self.trapezoid).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }
}

pub fn coarse_sums_from_fine<T: Scalar>(fine_path: &[T], mean: T, fine_delta: T, stride: usize) -> Result<CoarseComparison<T>> {
    let n = fine_path.len();
    if stride == 0 || n == 0 || !n.is_multiple_of(stride) {
        return invalid(format!("stride {stride} does not divide the fine grid of {n} points"));
    }
    let half = T::lit(0.5);
    let x = |l: usize| fine_path[l] - mean;
    let coarse_delta = fine_delta * T::usize(stride);
    let kmax = (n - 1) / stride;
    let (mut times, mut riemann, mut trapezoid) = (Vec::new(), Vec::new(), Vec::new());
    let (mut r, mut tr) = (T::zero(), T::zero());
    for k in 0..=kmax {
        times.push(fine_delta * T::usize(k * stride));
        riemann.push(r);
        trapezoid.push(tr);
        if k < kmax {
            r = r + coarse_delta * x(k * stride);
            for l in k * stride..(k + 1) * stride {
                tr = tr + fine_delta * half * (x(l) + x(l + 1));
            }
        }
    }
    Ok(CoarseComparison { times, riemann, trapezoid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exp1() -> TrawlFunction<f64> {
        TrawlFunction::exponential(1.0).unwrap()
    }

    #[test]
    fn partial_sums_examples() {
        assert_eq!(partial_sums(&[3.0, 3.0, 3.0], 3.0), vec![0.0, 0.0, 0.0]);
        assert_eq!(partial_sums(&[1.0, 2.0], 1.0), vec![0.0, 1.0]);
    }

    #[test]
    fn exact_variance_values() {
        assert_eq!(theoretical_var_S(&exp1(), 1.0, 1, 1.0), 1.0);
        assert!((theoretical_var_S(&exp1(), 1.0, 2, 1.0) - (2.0 + 2.0 * (-1f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn c_alpha_value() {
        assert!((c_alpha(1.5f64) - 16.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn asymptotic_variance_values() {
        let t = exp1();
        assert_eq!(asymptotic_var_S(VarianceCase::I, &t, 1.0, 100, 0.001).unwrap(), 1e4);
        let v = asymptotic_var_S(VarianceCase::IIIa, &t, 1.0, 50, 0.5).unwrap();
        assert!((v - 2.0 * 50.0 / 0.5).abs() < 1e-12);
        let lm = TrawlFunction::power_law(2.5, 1.0).unwrap();
        assert!(asymptotic_var_S(VarianceCase::IIIa, &lm, 1.0, 50, 0.5).is_err());
        assert!(asymptotic_var_S(VarianceCase::IIIb, &t, 1.0, 50, 0.5).is_err());
        // ∫_0^1(1−s)e^{−s}ds = e^{−1}
        let v2 = asymptotic_var_S(VarianceCase::II { mu: 1.0 }, &t, 1.0, 10, 0.1).unwrap();
        assert!((v2 - 2.0 / 0.01 * (-1f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rescale_examples() {
        let t = exp1();
        let s = LevySeedSpec::poisson(1.0).unwrap();
        let f = rescale_factor(&RegimeSpec::ShortMemory, 100, 0.1, &t, &s).unwrap();
        assert!((f - 0.001f64.sqrt()).abs() < 1e-15);
        let g = rescale_factor(&RegimeSpec::ZeroMuSecondGauss, 100, 1e-4, &t, &s).unwrap();
        assert!((g - 10.0).abs() < 1e-12);
        let lm = TrawlFunction::power_law(2.5, 1.0).unwrap();
        let n = 10_000usize;
        let d = (n as f64).powf(-0.5);
        let r = rescale_factor(&RegimeSpec::LongMemoryGauss { kappa: 2.5 }, n, d, &lm, &s).unwrap();
        let tn = 100.0;
        let a = 101f64.powf(-1.5) / 1.5;
        assert!((r - 1.0 / (n as f64 * (a * tn).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn constants_examples() {
        let lm = TrawlFunction::power_law(2.5f64, 1.0).unwrap();
        let g = LevySeedSpec::gaussian(0.0, 1.0).unwrap();
        let c = limit_constants(&RegimeSpec::LongMemoryGauss { kappa: 2.5 }, &lm, &g).unwrap();
        assert_eq!(c.hurst, Some(0.75));
        assert!((c.sigma_kappa2.unwrap() - 8.0 / 3.0).abs() < 1e-12);
        assert!((rho_a_long_memory(2.5f64, 1.8) - 7.384615384615385).abs() < 1e-9);
        let p = LevySeedSpec::poisson(1.0).unwrap();
        let c = limit_constants(&RegimeSpec::LongMemoryStableI { kappa: 2.5 }, &lm, &p).unwrap();
        assert_eq!((c.k_plus_kappa, c.k_minus_kappa), (Some(1.0), Some(0.0)));
        let sm = limit_constants(&RegimeSpec::ShortMemory, &exp1(), &p).unwrap();
        assert_eq!((sm.sigma_a2, sm.sigma_a2_displayed), (Some(2.0), Some(1.0)));
    }

    #[test]
    fn stable_basis_rho_is_beta_integral() {
        let lm = TrawlFunction::power_law(2.5f64, 1.0).unwrap();
        let s = LevySeedSpec::stable(1.2, 1.0, 1.0).unwrap();
        let c = limit_constants(&RegimeSpec::StableBasisI { beta: 1.2, kappa: 2.5 }, &lm, &s).unwrap();
        // B(2.2, 0.3) from an independent special-function library
        assert!((c.rho_a.unwrap() - 2.4795140443957657).abs() < 1e-9);
        assert_eq!(c.target_stable, Some((1.2, c.rho_a.unwrap(), c.rho_a.unwrap())));
    }

    #[test]
    fn regime_validation_table() {
        let exp = exp1();
        let lm = TrawlFunction::power_law(2.5f64, 1.0).unwrap();
        let pois = LevySeedSpec::poisson(1.0).unwrap();
        let gauss = LevySeedSpec::gaussian(0.0, 1.0).unwrap();
        let stab = LevySeedSpec::stable(1.2, 1.0, 1.0).unwrap();
        let inf = GridScheme::new(64, 1.0, 0.5).unwrap();
        let zero = GridScheme::new(64, 1.0, 1.5).unwrap();
        type Case<'a> = (RegimeSpec<f64>, &'a TrawlFunction<f64>, &'a LevySeedSpec<f64>, &'a GridScheme<f64>, bool);
        let cases: Vec<Case> = vec![
            (RegimeSpec::ShortMemory, &exp, &pois, &inf, true),
            (RegimeSpec::ShortMemory, &lm, &pois, &inf, false),
            (RegimeSpec::ShortMemory, &exp, &pois, &zero, false),
            (RegimeSpec::ShortMemory, &exp, &stab, &inf, false),
            (RegimeSpec::LongMemoryGauss { kappa: 2.5 }, &lm, &gauss, &inf, true),
            (RegimeSpec::LongMemoryGauss { kappa: 2.5 }, &lm, &pois, &inf, false),
            (RegimeSpec::LongMemoryGauss { kappa: 2.5 }, &exp, &gauss, &inf, false),
            (RegimeSpec::LongMemoryGauss { kappa: 2.6 }, &lm, &gauss, &inf, false),
            (RegimeSpec::LongMemoryStableI { kappa: 2.5 }, &lm, &pois, &inf, true),
            (RegimeSpec::LongMemoryStableI { kappa: 2.5 }, &lm, &gauss, &inf, false),
            (RegimeSpec::StableBasisI { beta: 1.2, kappa: 2.5 }, &lm, &stab, &inf, true),
            (RegimeSpec::StableBasisI { beta: 1.6, kappa: 2.5 }, &lm, &stab, &inf, false),
            (RegimeSpec::ZeroMuSecondGauss, &exp, &gauss, &zero, true),
            (RegimeSpec::ZeroMuSecondGauss, &exp, &pois, &zero, false),
            (RegimeSpec::ZeroMuSecondStable { beta: 1.2 }, &exp, &stab, &zero, true),
            (RegimeSpec::ZeroMuSecondStable { beta: 1.2 }, &exp, &stab, &inf, false),
        ];
        for (k, (r, t, s, g, ok)) in cases.into_iter().enumerate() {
            assert_eq!(r.validate(t, s, Some(g)).is_ok(), ok, "case {k}: {r:?}");
        }
    }

    #[test]
    fn weight_sum_matches_exact_variance() {
        for (t, d) in [(exp1(), 0.3), (TrawlFunction::power_law(2.5, 1.0).unwrap(), 0.7)] {
            for m in [1usize, 2, 3, 10, 57] {
                let w = sum_weight_power(&t, d, m, 2.0);
                let v = theoretical_var_S(&t, 1.0, m, d);
                assert!((w - v).abs() < 1e-9 * v, "m={m} {w} {v}");
            }
        }
    }

    #[test]
    fn z_variance_matches_acf_form() {
        let t = exp1();
        for (n, d) in [(2usize, 0.5), (17, 0.01), (300, 1e-4)] {
            let nn = n as f64;
            let direct = acf(&t, 1.0, 0.0) - 2.0 / nn * (0..n).map(|k| acf(&t, 1.0, k as f64 * d)).sum::<f64>()
                + theoretical_var_S(&t, 1.0, n, d) / (nn * nn);
            let z = z_variance(&t, 1.0, d, n);
            assert!((z - direct).abs() < 1e-12, "n={n}: {z} vs {direct}");
        }
    }

    #[test]
    fn coarse_examples() {
        let d = 0.01;
        let path: Vec<f64> = (0..100).map(|k| k as f64 * d).collect();
        let c = coarse_sums_from_fine(&path, 0.0, d, 1).unwrap();
        let mut r = 0.0;
        for (k, x) in path.iter().enumerate() {
            assert!((c.riemann[k] - r).abs() < 1e-12);
            r += d * x;
        }
        let last = path.len() - 1;
        let horizon = last as f64 * d;
        assert!((c.trapezoid[last] - c.riemann[last] - d * horizon / 2.0).abs() < 1e-12);
        assert!(coarse_sums_from_fine(&path, 0.0, d, 3).is_err());
    }

    proptest! {
        #[test]
        fn rescale_scale_equivariance(p in 0.1f64..0.9, c in 0.2f64..3.0, n in 16usize..5000) {
            let t = exp1();
            let s = LevySeedSpec::poisson(1.0).unwrap();
            let d1 = c * (n as f64).powf(-p);
            let d2 = 2.0 * d1;
            let f1 = rescale_factor(&RegimeSpec::ShortMemory, n, d1, &t, &s).unwrap();
            let f2 = rescale_factor(&RegimeSpec::ShortMemory, n, d2, &t, &s).unwrap();
            prop_assert!((f2 / f1 - 2f64.sqrt()).abs() < 1e-12);
            let g1 = rescale_factor(&RegimeSpec::StableBasisI { beta: 1.2, kappa: 2.5 }, n, d1, &t, &s).unwrap();
            let g2 = rescale_factor(&RegimeSpec::StableBasisI { beta: 1.2, kappa: 2.5 }, n, d2, &t, &s).unwrap();
            prop_assert!((g2 / g1 - 2f64.powf(1.0 - 1.0 / 1.2)).abs() < 1e-12);
            let z1 = rescale_factor(&RegimeSpec::ZeroMuSecondGauss, n, d1, &t, &s).unwrap();
            let z2 = rescale_factor(&RegimeSpec::ZeroMuSecondGauss, n, d2, &t, &s).unwrap();
            prop_assert!((z2 / z1 - 2f64.powf(-0.5)).abs() < 1e-12);
            prop_assert!(f1 > 0.0 && g1 > 0.0 && z1 > 0.0);
        }
    }
}
