use rand::Rng;

use crate::error::Result;
use crate::levy::{cell_sample_unchecked, LevySeedSpec};
use crate::scalar::Scalar;
use crate::trawl::{SliceTable, TrawlFunction};

use super::GridScheme;

/// One exact path by sampling every slice cell once.
pub fn simulate_grid_path<T: Scalar, R: Rng + ?Sized>(
    seed: &LevySeedSpec<T>,
    trawl: &TrawlFunction<T>,
    scheme: &GridScheme<T>,
    rng: &mut R,
) -> Result<Vec<T>> {
    let table = SliceTable::new(trawl, scheme.delta(), scheme.n)?;
    Ok(sample(seed, &table, rng))
}

// Row i covers X_k for k ≥ i; its contribution to X_k is the suffix sum of
// cells j ≥ k plus the row tail.
pub(crate) fn sample<T: Scalar, R: Rng + ?Sized>(seed: &LevySeedSpec<T>, table: &SliceTable<T>, rng: &mut R) -> Vec<T> {
    let n = table.n;
    let mut x = vec![T::zero(); n];
    for i in 0..n {
        let mut suffix = cell_sample_unchecked(seed, table.row_tail(i), rng);
        for j in (i..n).rev() {
            let area = if i == 0 { table.row0[j] } else { table.offset[j - i] };
            suffix = suffix + cell_sample_unchecked(seed, area, rng);
            x[j] = x[j] + suffix;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::path_rng;

    #[test]
    fn single_point_is_one_trawl_set() {
        let t = TrawlFunction::exponential(1.0f64).unwrap();
        let s = LevySeedSpec::gaussian(0.0, 1.0).unwrap();
        let g = GridScheme::fixed(1, 1.0).unwrap();
        let n = 20_000;
        let v: Vec<f64> = (0..n).map(|k| simulate_grid_path(&s, &t, &g, &mut path_rng(1, 0, k)).unwrap()[0]).collect();
        let var = v.iter().map(|x| x * x).sum::<f64>() / n as f64;
        assert!((var - 1.0).abs() < 4.0 * (2.0f64 / n as f64).sqrt());
    }

    #[test]
    fn gaussian_marginal_variance_constant_across_columns() {
        let t = TrawlFunction::exponential(1.0f64).unwrap();
        let s = LevySeedSpec::gaussian(0.0, 1.0).unwrap();
        let g = GridScheme::fixed(6, 0.4).unwrap();
        let n = 20_000;
        let mut m2 = [0.0f64; 6];
        for k in 0..n {
            let p = simulate_grid_path(&s, &t, &g, &mut path_rng(2, 0, k)).unwrap();
            for (a, x) in m2.iter_mut().zip(&p) {
                *a += x * x / n as f64;
            }
        }
        for v in m2 {
            assert!((v - 1.0).abs() < 4.0 * (2.0f64 / n as f64).sqrt(), "{v}");
        }
    }
}
