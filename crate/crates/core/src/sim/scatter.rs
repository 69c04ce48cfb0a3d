use rand::Rng;

use crate::error::{invalid, Result};
use crate::levy::{poisson_count, JumpLaw, LevySeedSpec, SeedFamily};
use crate::scalar::Scalar;
use crate::trawl::SliceTable;

/// Poisson points per row, each located in its slice cell by binary search;
/// a point in cell `(i, j)` adds its jump to `X_i..=X_j` via a difference array.
#[derive(Clone)]
pub(crate) struct ScatterPlan<T> {
    n: usize,
    rate: T,
    jumps: Option<JumpLaw<T>>,
    drift_total: T,
    // prefix sums of row 0 cells, then of row-i offsets
    cum0: Vec<T>,
    leb: T,
    cum_off: Vec<T>,
    strip: T,
}

impl<T: Scalar> ScatterPlan<T> {
    pub(crate) fn new(seed: &LevySeedSpec<T>, table: &SliceTable<T>) -> Result<Self> {
        let (rate, jumps, drift) = match &seed.family {
            SeedFamily::Poisson { lambda } => (*lambda, None, T::zero()),
            SeedFamily::CompoundPoisson { rate, jumps, drift } => (*rate, Some(jumps.clone()), *drift),
            _ => return invalid("scatter sampling needs a finite-activity seed"),
        };
        let prefix = |v: &[T]| {
            let mut acc = T::zero();
            v.iter()
                .map(|&a| {
                    acc = acc + a;
                    acc
                })
                .collect::<Vec<T>>()
        };
        let cum0 = prefix(&table.row0);
        let leb = cum0.last().copied().unwrap_or(T::zero()) + table.row0_tail;
        Ok(Self { n: table.n, rate, jumps, drift_total: drift * table.leb, cum0, leb, cum_off: prefix(&table.offset), strip: table.strip })
    }

    fn jump<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match &self.jumps {
            None => T::one(),
            Some(j) => j.sample(rng),
        }
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        let n = self.n;
        let mut diff = vec![T::zero(); n + 1];
        // row 0 has area Leb(A); cells j = 0..n−1 then the tail
        for _ in 0..poisson_count(self.rate * self.leb, rng) {
            let u = T::lit(rng.random::<f64>()) * self.leb;
            let j = self.cum0.partition_point(|&c| c <= u).min(n - 1);
            let jv = self.jump(rng);
            diff[0] = diff[0] + jv;
            diff[j + 1] = diff[j + 1] - jv;
        }
        for i in 1..n {
            let cells = &self.cum_off[..n - i];
            for _ in 0..poisson_count(self.rate * self.strip, rng) {
                let u = T::lit(rng.random::<f64>()) * self.strip;
                let d = cells.partition_point(|&c| c <= u);
                let end = (i + d).min(n - 1);
                let jv = self.jump(rng);
                diff[i] = diff[i] + jv;
                diff[end + 1] = diff[end + 1] - jv;
            }
        }
        let mut acc = self.drift_total;
        diff[..n]
            .iter()
            .map(|&d| {
                acc = acc + d;
                acc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::path_rng;
    use crate::sim::{GridScheme, GridSimulator, SimMethod};
    use crate::trawl::TrawlFunction;

    #[test]
    fn scatter_and_dense_agree_in_moments() {
        let t = TrawlFunction::exponential(1.0f64).unwrap();
        let s = LevySeedSpec::poisson(2.0).unwrap();
        let g = GridScheme::fixed(5, 0.5).unwrap();
        let n = 40_000u64;
        let stats = |m: SimMethod| {
            let sim = GridSimulator::new(&s, &t, g, m).unwrap();
            let (mut mean, mut cov) = (0.0, 0.0);
            for k in 0..n {
                let p = sim.sample_path(&mut path_rng(9, 0, k));
                mean += p[4] / n as f64;
                cov += (p[0] - 2.0) * (p[4] - 2.0) / n as f64;
            }
            (mean, cov)
        };
        let (m1, c1) = stats(SimMethod::Scatter);
        let (m2, c2) = stats(SimMethod::Dense);
        let exact = 2.0 * (-2.0f64).exp();
        let se = (2.0f64 / n as f64).sqrt();
        assert!((m1 - 2.0).abs() < 4.0 * se && (m2 - 2.0).abs() < 4.0 * se);
        assert!((c1 - exact).abs() < 5.0 * se && (c2 - exact).abs() < 5.0 * se, "{c1} {c2} {exact}");
    }

    #[test]
    fn compound_poisson_drift_shifts_paths() {
        let t = TrawlFunction::exponential(1.0f64).unwrap();
        let s = LevySeedSpec::compound_poisson(1e-12, JumpLaw::Point(1.0), 3.0).unwrap();
        let sim = GridSimulator::new(&s, &t, GridScheme::fixed(4, 1.0).unwrap(), SimMethod::Scatter).unwrap();
        for x in sim.sample_path(&mut path_rng(1, 0, 0)) {
            assert!((x - 3.0).abs() < 1e-12);
        }
    }
}
