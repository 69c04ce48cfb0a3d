use std::sync::Arc;

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::levy::LevySeedSpec;
use crate::scalar::Scalar;
use crate::trawl::{acf, TrawlFunction};

use super::GridScheme;

// relative size of negative embedding eigenvalues treated as round-off
const NEG_EIG_TOL: f64 = 1e-8;

/// Circulant embedding of the Gaussian trawl covariance `b²·tail(|h|)`.
#[derive(Clone)]
pub(crate) struct ToeplitzPlan<T: Scalar> {
    n: usize,
    mean: T,
    sqrt_eig: Vec<T>,
    fft: Arc<dyn Fft<T>>,
}

impl<T: Scalar> ToeplitzPlan<T> {
    pub(crate) fn new(seed: &LevySeedSpec<T>, trawl: &TrawlFunction<T>, scheme: &GridScheme<T>) -> Result<Self> {
        let n = scheme.n;
        let delta = scheme.delta();
        let var = seed.variance()?;
        let m = (2 * n.saturating_sub(1)).max(2).next_power_of_two();
        let half = m / 2;
        let mut row: Vec<Complex<T>> = (0..m)
            .map(|k| {
                let lag = if k <= half { k } else { m - k };
                Complex::new(acf(trawl, var, delta * T::usize(lag)), T::zero())
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(m);
        fft.process(&mut row);
        let max = row.iter().fold(T::zero(), |a, c| a.max(c.re));
        let min = row.iter().fold(T::infinity(), |a, c| a.min(c.re));
        if min < -T::lit(NEG_EIG_TOL) * max {
            return Err(Error::NotPositiveDefinite { min_pivot: min.f64(), condition: (max / min.abs()).f64() });
        }
        let scale = T::usize(m);
        let sqrt_eig = row.iter().map(|c| (c.re.max(T::zero()) / scale).sqrt()).collect();
        Ok(Self { n, mean: seed.mean()? * trawl.leb(), sqrt_eig, fft })
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        let mut w: Vec<Complex<T>> = self
            .sqrt_eig
            .iter()
            .map(|&s| {
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                Complex::new(s * T::lit(a), s * T::lit(b))
            })
            .collect();
        self.fft.process(&mut w);
        w[..self.n].iter().map(|c| self.mean + c.re).collect()
    }
}
