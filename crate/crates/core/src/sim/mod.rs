//! Grid simulation of `X_{kΔ}, k = 0..n−1` and reference simulators for the
//! limit processes.
//!
//! Three exact strategies produce the same joint law:
//! - dense: one draw per slice cell, streamed row by row with suffix sums;
//! - scatter: finite-activity seeds only; Poisson points are dropped into
//!   rows and located in their cell by binary search on cumulative areas;
//! - toeplitz: Gaussian seeds only; circulant embedding of the ACF.

mod cells;
mod dense;
mod ensemble;
mod linear;
mod reference;
mod scatter;
mod toeplitz;

pub use cells::CellField;
pub use dense::simulate_grid_path;
pub use ensemble::{par_map_paths, read_binary, simulate_ensemble, EnsembleSidecar, PathEnsemble};
pub use linear::stable_functional_sample;
pub use reference::{simulate_fbm, simulate_gaussian_ma, simulate_stable_levy};

use rand::Rng;

use crate::error::{invalid, Result};
use crate::levy::{LevySeedSpec, SeedFamily};
use crate::scalar::Scalar;
use crate::trawl::{SliceTable, TrawlFunction};

/// Limit of `nΔ_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MuRegime {
    /// `p > 1`.
    Zero,
    /// `p = 1`, `μ = c`.
    Finite,
    /// `0 < p < 1`.
    Infinite,
    /// `p = 0`: `Δ = c` for every `n`.
    Fixed,
}

/// `Δ_n = c·n^{−p}` on a grid of `n` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridScheme<T> {
    pub n: usize,
    pub c: T,
    pub p: T,
}

impl<T: Scalar> GridScheme<T> {
    pub fn new(n: usize, c: T, p: T) -> Result<Self> {
        if n == 0 {
            return invalid("grid needs n ≥ 1");
        }
        if !(c > T::zero()) || !c.is_finite() {
            return invalid(format!("Δ-rule constant must be > 0, got {c}"));
        }
        if !(p >= T::zero()) || !p.is_finite() {
            return invalid(format!("Δ-rule exponent must be ≥ 0, got {p}"));
        }
        Ok(Self { n, c, p })
    }

    /// Fixed spacing `Δ` regardless of `n`.
    pub fn fixed(n: usize, delta: T) -> Result<Self> {
        Self::new(n, delta, T::zero())
    }

    pub fn delta(&self) -> T {
        self.c * T::usize(self.n).powf(-self.p)
    }

    /// `T_n = nΔ_n`.
    pub fn horizon(&self) -> T {
        T::usize(self.n) * self.delta()
    }

    pub fn regime(&self) -> MuRegime {
        let one = T::one();
        if self.p == T::zero() {
            MuRegime::Fixed
        } else if self.p > one {
            MuRegime::Zero
        } else if self.p == one {
            MuRegime::Finite
        } else {
            MuRegime::Infinite
        }
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(n, self.c, self.p)
    }
}

/// Sampling strategy. `Auto` picks scatter for Poisson and compound
/// Poisson seeds, toeplitz for Gaussian seeds and dense otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SimMethod {
    #[default]
    Auto,
    Dense,
    Scatter,
    Toeplitz,
}

impl std::str::FromStr for SimMethod {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "dense" => Ok(Self::Dense),
            "scatter" => Ok(Self::Scatter),
            "toeplitz" => Ok(Self::Toeplitz),
            _ => invalid(format!("unknown simulation method '{s}'")),
        }
    }
}

#[derive(Clone)]
enum Plan<T: Scalar> {
    Dense,
    Scatter(scatter::ScatterPlan<T>),
    Toeplitz(toeplitz::ToeplitzPlan<T>),
}

/// Precomputed slice areas (and FFT plan or cumulative tables) for
/// repeated sampling of paths on one grid.
#[derive(Clone)]
pub struct GridSimulator<T: Scalar> {
    pub seed: LevySeedSpec<T>,
    pub trawl: TrawlFunction<T>,
    pub scheme: GridScheme<T>,
    pub table: SliceTable<T>,
    method: SimMethod,
    plan: Plan<T>,
}

impl<T: Scalar> GridSimulator<T> {
    pub fn new(seed: &LevySeedSpec<T>, trawl: &TrawlFunction<T>, scheme: GridScheme<T>, method: SimMethod) -> Result<Self> {
        let table = SliceTable::new(trawl, scheme.delta(), scheme.n)?;
        let finite_activity = matches!(seed.family, SeedFamily::Poisson { .. } | SeedFamily::CompoundPoisson { .. });
        let method = match method {
            SimMethod::Auto if finite_activity => SimMethod::Scatter,
            SimMethod::Auto if seed.is_gaussian() => SimMethod::Toeplitz,
            SimMethod::Auto => SimMethod::Dense,
            m => m,
        };
        let plan = match method {
            SimMethod::Dense => Plan::Dense,
            SimMethod::Scatter => {
                if !finite_activity {
                    return invalid("scatter sampling needs a Poisson or compound Poisson seed");
                }
                Plan::Scatter(scatter::ScatterPlan::new(seed, &table)?)
            }
            SimMethod::Toeplitz => {
                if !seed.is_gaussian() {
                    return invalid("toeplitz sampling needs a Gaussian seed");
                }
                Plan::Toeplitz(toeplitz::ToeplitzPlan::new(seed, trawl, &scheme)?)
            }
            SimMethod::Auto => unreachable!(),
        };
        Ok(Self { seed: seed.clone(), trawl: trawl.clone(), scheme, table, method, plan })
    }

    pub fn method(&self) -> SimMethod {
        self.method
    }

    pub fn sample_path<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        match &self.plan {
            Plan::Dense => dense::sample(&self.seed, &self.table, rng),
            Plan::Scatter(p) => p.sample(rng),
            Plan::Toeplitz(p) => p.sample(rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_regimes() {
        let s = GridScheme::new(100, 2.0f64, 1.0).unwrap();
        assert_eq!(s.regime(), MuRegime::Finite);
        assert!((s.horizon() - 2.0).abs() < 1e-14);
        assert_eq!(GridScheme::new(100, 1.0f64, 1.5).unwrap().regime(), MuRegime::Zero);
        assert_eq!(GridScheme::new(100, 1.0f64, 0.5).unwrap().regime(), MuRegime::Infinite);
        assert_eq!(GridScheme::fixed(3, 0.5f64).unwrap().delta(), 0.5);
        assert!(GridScheme::new(0, 1.0f64, 0.5).is_err());
        assert!(GridScheme::new(10, 0.0f64, 0.5).is_err());
        assert!(GridScheme::new(10, 1.0f64, -1.0).is_err());
        let s2 = s.with_n(400).unwrap();
        assert!((s2.horizon() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn auto_method_choice() {
        let t = TrawlFunction::exponential(1.0f64).unwrap();
        let g = GridScheme::fixed(8, 0.5).unwrap();
        let pick = |s: &LevySeedSpec<f64>| GridSimulator::new(s, &t, g, SimMethod::Auto).unwrap().method();
        assert_eq!(pick(&LevySeedSpec::poisson(1.0).unwrap()), SimMethod::Scatter);
        assert_eq!(pick(&LevySeedSpec::gaussian(0.0, 1.0).unwrap()), SimMethod::Toeplitz);
        assert_eq!(pick(&LevySeedSpec::stable(1.5, 1.0, 1.0).unwrap()), SimMethod::Dense);
        assert!(GridSimulator::new(&LevySeedSpec::gaussian(0.0, 1.0).unwrap(), &t, g, SimMethod::Scatter).is_err());
        assert!(GridSimulator::new(&LevySeedSpec::poisson(1.0).unwrap(), &t, g, SimMethod::Toeplitz).is_err());
    }
}
