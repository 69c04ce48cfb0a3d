//! Trawl functions, slice geometry of the grid-shifted trawl sets, the
//! autocovariance, and the moving-average kernel link.
//!
//! The trawl set is `A = {(r, y): r ≤ 0, 0 ≤ y ≤ a(−r)}` and `A_t = A + (t, 0)`.
//! On the grid `t_k = kΔ` the union of `A_{t_0}, …, A_{t_{n−1}}` splits into
//! disjoint cells `P(i, j)`, `0 ≤ i ≤ j`, where cell `(i, j)` belongs to
//! exactly the sets `A_{t_k}` with `i ≤ k ≤ j`, plus one tail cell per row
//! that belongs to every `A_{t_k}` with `k ≥ i`.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::levy::Density;
use crate::quad;
use crate::scalar::{pow1pm1, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MemoryClass<T> {
    Short,
    Long { kappa: T },
}

/// Moving-average kernel `g` on `[0, ∞)`.
#[derive(Clone)]
pub struct Kernel<T> {
    pub label: String,
    pub g: Density<T>,
    pub g_prime: Option<Density<T>>,
    /// `g` vanishes beyond this point when set.
    pub support: Option<T>,
}

impl<T> fmt::Debug for Kernel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Kernel({})", self.label)
    }
}

impl<T: Scalar> Kernel<T> {
    pub fn new(label: impl Into<String>, g: Density<T>, support: Option<T>) -> Self {
        Self { label: label.into(), g, g_prime: None, support }
    }

    /// `g(s) = e^{-rate·s}`; the derivative is supplied.
    pub fn exponential(rate: T) -> Self {
        Self {
            label: format!("exp(rate={rate})"),
            g: Arc::new(move |s: T| if s < T::zero() { T::zero() } else { (-rate * s).exp() }),
            g_prime: Some(Arc::new(move |s: T| if s < T::zero() { T::zero() } else { -rate * (-rate * s).exp() })),
            support: None,
        }
    }

    /// `g = 1_{[0, width]}`.
    pub fn indicator(width: T) -> Self {
        Self::new(
            format!("indicator(width={width})"),
            Arc::new(move |s: T| if s >= T::zero() && s <= width { T::one() } else { T::zero() }),
            Some(width),
        )
    }

    /// `∫_0^∞ g(s)g(h+s) ds`.
    pub fn overlap(&self, h: T, tol: T) -> Result<T> {
        let h = h.abs();
        let f = |s: T| (self.g)(s) * (self.g)(h + s);
        match self.support {
            Some(w) => {
                if h >= w {
                    Ok(T::zero())
                } else {
                    quad::simpson(f, T::zero(), w - h, tol)
                }
            }
            None => quad::simpson_to_inf(f, T::zero(), tol),
        }
    }
}

#[derive(Clone, Debug)]
pub enum TrawlFamily<T> {
    /// `a(s) = e^{−λs}`.
    Exponential { lambda: T },
    /// `a(s) = ∫_s^∞ c_a(1+y)^{−κ} dy`, `κ ∈ (2, 3)`.
    PowerLawLM { kappa: T, c_a: T },
    /// `a(h) = −d/dh ∫_0^∞ g(s)g(h+s) ds`.
    KernelDerived { kernel: Kernel<T>, quad_tol: T, diff_step: T },
}

/// The trawl function `a` with its integrals.
#[derive(Clone, Debug)]
pub struct TrawlFunction<T> {
    pub family: TrawlFamily<T>,
}

impl<T: Scalar> TrawlFunction<T> {
    pub fn exponential(lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) {
            return invalid("exponential trawl needs λ > 0");
        }
        Ok(Self { family: TrawlFamily::Exponential { lambda } })
    }

    pub fn power_law(kappa: T, c_a: T) -> Result<Self> {
        if !(kappa > T::lit(2.0) && kappa < T::lit(3.0)) {
            return invalid(format!("power-law trawl needs κ ∈ (2, 3), got {kappa}"));
        }
        if !(c_a > T::zero()) {
            return invalid("power-law trawl needs c_a > 0");
        }
        Ok(Self { family: TrawlFamily::PowerLawLM { kappa, c_a } })
    }

    pub fn label(&self) -> String {
        match &self.family {
            TrawlFamily::Exponential { lambda } => format!("exponential(lambda={lambda})"),
            TrawlFamily::PowerLawLM { kappa, c_a } => format!("power_law(kappa={kappa},c_a={c_a})"),
            TrawlFamily::KernelDerived { kernel, .. } => format!("kernel({})", kernel.label),
        }
    }

    pub fn memory_class(&self) -> MemoryClass<T> {
        match self.family {
            TrawlFamily::PowerLawLM { kappa, .. } => MemoryClass::Long { kappa },
            _ => MemoryClass::Short,
        }
    }

    fn kernel_parts(&self) -> Option<(&Kernel<T>, T, T)> {
        match &self.family {
            TrawlFamily::KernelDerived { kernel, quad_tol, diff_step } => Some((kernel, *quad_tol, *diff_step)),
            _ => None,
        }
    }

    fn overlap(&self, h: T) -> T {
        let (k, tol, _) = self.kernel_parts().expect("kernel trawl");
        k.overlap(h, tol).unwrap_or(T::nan())
    }

    /// `a(s)`, `s ≥ 0`.
    pub fn a(&self, s: T) -> T {
        let s = s.max(T::zero());
        match &self.family {
            TrawlFamily::Exponential { lambda } => (-*lambda * s).exp(),
            TrawlFamily::PowerLawLM { kappa, c_a } => *c_a * (T::one() + s).powf(T::one() - *kappa) / (*kappa - T::one()),
            TrawlFamily::KernelDerived { kernel, quad_tol, diff_step } => {
                if let Some(gp) = &kernel.g_prime {
                    let f = |u: T| -(kernel.g)(u) * gp(s + u);
                    return match kernel.support {
                        Some(w) if s >= w => T::zero(),
                        Some(w) => quad::simpson(f, T::zero(), w - s, *quad_tol).unwrap_or(T::nan()),
                        None => quad::simpson_to_inf(f, T::zero(), *quad_tol).unwrap_or(T::nan()),
                    };
                }
                let d = *diff_step;
                let two = T::lit(2.0);
                if s >= d {
                    -(self.overlap(s + d) - self.overlap(s - d)) / (two * d)
                } else {
                    // one-sided second order stencil at the boundary
                    -(-T::lit(3.0) * self.overlap(s) + T::lit(4.0) * self.overlap(s + d) - self.overlap(s + two * d)) / (two * d)
                }
            }
        }
    }

    /// `a′(s) = −da/ds ≥ 0`.
    pub fn a_prime(&self, s: T) -> T {
        let s = s.max(T::zero());
        match &self.family {
            TrawlFamily::Exponential { lambda } => *lambda * (-*lambda * s).exp(),
            TrawlFamily::PowerLawLM { kappa, c_a } => *c_a * (T::one() + s).powf(-*kappa),
            TrawlFamily::KernelDerived { diff_step, .. } => {
                let d = *diff_step;
                let lo = (s - d).max(T::zero());
                (self.a(lo) - self.a(s + d)) / (s + d - lo)
            }
        }
    }

    /// `∫_h^∞ a(u) du`.
    pub fn tail(&self, h: T) -> T {
        let h = h.max(T::zero());
        match &self.family {
            TrawlFamily::Exponential { lambda } => (-*lambda * h).exp() / *lambda,
            TrawlFamily::PowerLawLM { kappa, c_a } => {
                let one = T::one();
                let two = T::lit(2.0);
                *c_a * (one + h).powf(two - *kappa) / ((*kappa - one) * (*kappa - two))
            }
            TrawlFamily::KernelDerived { .. } => self.overlap(h),
        }
    }

    /// `Leb(A) = ∫_0^∞ a`.
    pub fn leb(&self) -> T {
        self.tail(T::zero())
    }

    /// `∫_h^{h+Δ} a(u) du`.
    pub fn strip(&self, h: T, delta: T) -> T {
        let h = h.max(T::zero());
        match &self.family {
            TrawlFamily::Exponential { lambda } => -(-*lambda * h).exp() * (-*lambda * delta).exp_m1() / *lambda,
            TrawlFamily::PowerLawLM { kappa, .. } => {
                let q = T::lit(2.0) - *kappa;
                -self.tail(h) * pow1pm1(delta / (T::one() + h), q)
            }
            TrawlFamily::KernelDerived { .. } => (self.tail(h) - self.tail(h + delta)).max(T::zero()),
        }
    }

    /// `∫_h^{h+Δ} [a(s) − a(s+Δ)] ds`.
    pub fn second(&self, h: T, delta: T) -> T {
        let h = h.max(T::zero());
        let v = match &self.family {
            TrawlFamily::Exponential { lambda } => {
                let e = (-*lambda * delta).exp_m1();
                (-*lambda * h).exp() * e * e / *lambda
            }
            _ => self.strip(h, delta) - self.strip(h + delta, delta),
        };
        v.max(T::zero())
    }

    /// `∫_h^∞ ∫_u^∞ a = ∫_h^∞ tail(u) du`.
    pub fn double_tail(&self, h: T) -> Result<T> {
        let h = h.max(T::zero());
        match &self.family {
            TrawlFamily::Exponential { lambda } => Ok((-*lambda * h).exp() / (*lambda * *lambda)),
            TrawlFamily::PowerLawLM { .. } => Err(Error::InfiniteMoment("long-memory trawl: ∫ tail(u) du diverges".into())),
            TrawlFamily::KernelDerived { quad_tol, .. } => quad::simpson_to_inf(|u| self.tail(u), h, *quad_tol),
        }
    }

    /// `∫_0^∞ s^p a′(s) ds`.
    pub fn a_prime_moment(&self, p: T) -> Result<T> {
        let one = T::one();
        match &self.family {
            TrawlFamily::Exponential { lambda } => Ok(crate::scalar::gamma(p + one) / lambda.powf(p)),
            TrawlFamily::PowerLawLM { kappa, c_a } => {
                if p + one >= *kappa {
                    return Err(Error::InfiniteMoment(format!("∫s^{p}a′ diverges for κ = {kappa}")));
                }
                Ok(*c_a * crate::scalar::beta_fn(p + one, *kappa - p - one))
            }
            TrawlFamily::KernelDerived { quad_tol, .. } => quad::simpson_to_inf(|s| s.powf(p) * self.a_prime(s), T::zero(), *quad_tol),
        }
    }
}

/// `Γ_X(h) = Var(L′)·∫_{|h|}^∞ a`.
pub fn acf<T: Scalar>(trawl: &TrawlFunction<T>, var_seed: T, h: T) -> T {
    var_seed * trawl.tail(h.abs())
}

/// Cell grid position on `t_k = kΔ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceIndex<T> {
    pub delta: T,
    pub i: usize,
    pub j: usize,
}

/// Area of cell `(i, i + j_offset)`; row 0 is indexed by its column.
pub fn slice_area<T: Scalar>(trawl: &TrawlFunction<T>, delta: T, i: usize, j_offset: usize) -> Result<T> {
    if !(delta > T::zero()) {
        return invalid("Δ must be > 0");
    }
    let t = delta * T::usize(j_offset);
    Ok(if i == 0 { trawl.strip(t, delta) } else { trawl.second(t, delta) })
}

/// Total area of row `i`'s cells beyond column `m − 1`.
pub fn row_tail_area<T: Scalar>(trawl: &TrawlFunction<T>, delta: T, i: usize, m: usize) -> Result<T> {
    if !(delta > T::zero()) {
        return invalid("Δ must be > 0");
    }
    if i >= m {
        return invalid(format!("row {i} has no tail beyond column {m}"));
    }
    Ok(if i == 0 { trawl.tail(delta * T::usize(m)) } else { trawl.strip(delta * T::usize(m - i), delta) })
}

/// All cell areas for an `n`-point grid.
///
/// Row `i ≥ 1` has cells at offsets `d = 0..n−1−i` with areas `offset[d]`
/// and a tail of area `row0[n−i]`.
#[derive(Clone, Debug)]
pub struct SliceTable<T> {
    pub n: usize,
    pub delta: T,
    pub row0: Vec<T>,
    pub row0_tail: T,
    pub offset: Vec<T>,
    /// Area of every row `i ≥ 1`, `∫_0^Δ a`.
    pub strip: T,
    pub leb: T,
}

impl<T: Scalar> SliceTable<T> {
    pub fn new(trawl: &TrawlFunction<T>, delta: T, n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("grid needs n ≥ 1");
        }
        if !(delta > T::zero()) {
            return invalid("Δ must be > 0");
        }
        let t = |k: usize| delta * T::usize(k);
        let row0: Vec<T> = (0..n).map(|j| trawl.strip(t(j), delta)).collect();
        let offset: Vec<T> = (0..n.saturating_sub(1)).map(|d| trawl.second(t(d), delta)).collect();
        let row0_tail = trawl.tail(t(n));
        let table = Self { n, delta, strip: row0[0], row0, row0_tail, offset, leb: trawl.leb() };
        if table.row0.iter().chain(table.offset.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Quadrature("non-finite slice area".into()));
        }
        Ok(table)
    }

    pub fn row_tail(&self, i: usize) -> T {
        if i == 0 {
            self.row0_tail
        } else {
            self.row0[self.n - i]
        }
    }

    /// `Leb(A_{t_k})` rebuilt from the cells that cover it.
    pub fn covered_area(&self, k: usize) -> T {
        let mut s = self.row0_tail;
        for j in k..self.n {
            s = s + self.row0[j];
        }
        for i in 1..=k {
            for d in (k - i)..(self.n - i) {
                s = s + self.offset[d];
            }
            s = s + self.row_tail(i);
        }
        s
    }
}

/// Builds the trawl `a(h) = −d/dh ∫g(s)g(h+s)ds` and checks it is a valid
/// (non-negative, non-increasing) trawl function on `[0, 5]`.
pub fn kernel_to_trawl<T: Scalar>(kernel: Kernel<T>, quad_tol: T, diff_step: T) -> Result<TrawlFunction<T>> {
    if !(quad_tol > T::zero() && diff_step > T::zero()) {
        return invalid("tolerance and step must be > 0");
    }
    let trawl = TrawlFunction { family: TrawlFamily::KernelDerived { kernel, quad_tol, diff_step } };
    let slack = T::lit(10.0) * quad_tol / diff_step + T::lit(1e-9);
    let probe_end = match trawl.kernel_parts().unwrap().0.support {
        Some(w) => w.min(T::lit(5.0)),
        None => T::lit(5.0),
    };
    let mut prev = T::infinity();
    for k in 0..=100 {
        let h = probe_end * T::usize(k) / T::lit(100.0);
        let v = trawl.a(h);
        if !v.is_finite() || v < -slack {
            return Err(Error::InvalidKernel(format!("a({h}) = {v}")));
        }
        if v > prev + slack {
            return Err(Error::InvalidKernel(format!("a increases near {h}")));
        }
        prev = v;
    }
    if !(trawl.leb() > T::zero()) {
        return Err(Error::InvalidKernel("zero overlap".into()));
    }
    Ok(trawl)
}

/// Result of the trawl-set regularity probe.
#[derive(Clone, Debug, PartialEq)]
pub struct A1Report<T> {
    /// `sup Leb(A_t∖A_s) / (t−s)^{½+ε/2}`.
    pub increment_ratio: T,
    /// `sup Leb(B̃_{t,s,r}) / (t−r)^{1+ε}`.
    pub b_ratio: T,
    pub max_b: T,
    pub pass: bool,
}

/// Probes the two inequalities on an equispaced grid of `[0, T]`, where
/// `cumulative(x) = ∫_0^x a`. Passes iff both ratios are finite, the second
/// is at most `c_t` and every `Leb(B̃)` is at most 1.
pub fn check_assumption_a1<T: Scalar>(cumulative: &dyn Fn(T) -> T, horizon: T, epsilon: T, c_t: T, grid: usize) -> A1Report<T> {
    let half = T::lit(0.5);
    let one = T::one();
    let pts: Vec<T> = (0..=grid).map(|k| horizon * T::usize(k) / T::usize(grid.max(1))).collect();
    let (mut r1, mut r2, mut mb) = (T::zero(), T::zero(), T::zero());
    for (a, &r) in pts.iter().enumerate() {
        for (b, &s) in pts.iter().enumerate().skip(a) {
            if b > a {
                let inc = cumulative(s - r);
                r1 = r1.max(inc / (s - r).powf(half + half * epsilon));
            }
            for &t in pts.iter().skip(b) {
                if t <= r {
                    continue;
                }
                // ∫_r^s a(s−p) − a(t−p) dp
                let bt = cumulative(s - r) - (cumulative(t - r) - cumulative(t - s));
                mb = mb.max(bt);
                r2 = r2.max(bt / (t - r).powf(one + epsilon));
            }
        }
    }
    let pass = r1.is_finite() && r2.is_finite() && r2 <= c_t * (one + T::lit(1e-12)) && mb <= one;
    A1Report { increment_ratio: r1, b_ratio: r2, max_b: mb, pass }
}

pub fn check_assumption_a1_trawl<T: Scalar>(trawl: &TrawlFunction<T>, horizon: T, epsilon: T, c_t: T, grid: usize) -> A1Report<T> {
    let leb = trawl.leb();
    let f = |x: T| leb - trawl.tail(x);
    check_assumption_a1(&f, horizon, epsilon, c_t, grid)
}

/// `f(u) = ∫_0^∞ (∫_h^∞ a) cos(2πuh) dh`, to absolute tolerance `1e-6`.
pub fn spectral_density<T: Scalar>(trawl: &TrawlFunction<T>, u: T) -> Result<T> {
    trawl.double_tail(T::zero())?;
    let tol = T::lit(1e-6);
    let w = T::lit(2.0) * T::PI() * u.abs();
    let chunk = if w > T::zero() { (T::lit(2.0) * T::PI() / w).max(T::lit(0.5)) } else { T::one() };
    let mut acc = T::zero();
    let mut h = T::zero();
    for _ in 0..100_000 {
        let piece = quad::simpson(|x| trawl.tail(x) * (w * x).cos(), h, h + chunk, tol * T::lit(1e-3))?;
        acc = acc + piece;
        h = h + chunk;
        if trawl.double_tail(h)? < tol * T::lit(0.1) {
            return Ok(acc);
        }
    }
    Err(Error::Quadrature("spectral density did not converge".into()))
}
