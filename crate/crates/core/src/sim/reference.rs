use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::levy::{cell_sample_unchecked, LevySeedSpec};
use crate::scalar::Scalar;

/// `Y_t = ∫_{t−T}^{t} g(t−s) dB_s` on a mesh of white-noise increments,
/// evaluated with the midpoint rule.
pub fn simulate_gaussian_ma<T: Scalar, R: Rng + ?Sized>(
    g: &dyn Fn(T) -> T,
    times: &[T],
    truncation: T,
    mesh: T,
    rng: &mut R,
) -> Result<Vec<T>> {
    if !(mesh > T::zero()) || !(truncation >= T::zero()) {
        return invalid("need mesh > 0 and truncation ≥ 0");
    }
    if times.is_empty() {
        return Ok(Vec::new());
    }
    let lo = times.iter().fold(T::infinity(), |a, &t| a.min(t)) - truncation;
    let hi = times.iter().fold(T::neg_infinity(), |a, &t| a.max(t));
    let cells = ((hi - lo) / mesh).ceil().to_usize().unwrap_or(0).max(1);
    let sd = mesh.sqrt();
    let db: Vec<T> = (0..cells)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            sd * T::lit(z)
        })
        .collect();
    let half = T::lit(0.5);
    Ok(times
        .iter()
        .map(|&t| {
            let mut y = T::zero();
            for (k, &d) in db.iter().enumerate() {
                let mid = lo + (T::usize(k) + half) * mesh;
                if mid > t {
                    break;
                }
                if t - mid <= truncation {
                    y = y + g(t - mid) * d;
                }
            }
            y
        })
        .collect())
}

/// Exact fractional Brownian motion at `times` by Cholesky factorisation of
/// `½(t^{2H} + s^{2H} − |t−s|^{2H})`. Points at `t = 0` are set to 0.
pub fn simulate_fbm<T: Scalar, R: Rng + ?Sized>(hurst: T, times: &[T], rng: &mut R) -> Result<Vec<T>> {
    let h = hurst.f64();
    if !(h > 0.0 && h < 1.0) {
        return invalid(format!("H must lie in (0, 1), got {h}"));
    }
    if times.iter().any(|t| !(*t >= T::zero())) {
        return invalid("fBm times must be ≥ 0");
    }
    let idx: Vec<usize> = (0..times.len()).filter(|&k| times[k] > T::zero()).collect();
    let m = idx.len();
    let mut out = vec![T::zero(); times.len()];
    if m == 0 {
        return Ok(out);
    }
    let tf: Vec<f64> = idx.iter().map(|&k| times[k].f64()).collect();
    let cov = DMatrix::from_fn(m, m, |i, j| {
        let (s, t) = (tf[i], tf[j]);
        0.5 * (s.powf(2.0 * h) + t.powf(2.0 * h) - (s - t).abs().powf(2.0 * h))
    });
    let chol = cov.clone().cholesky().ok_or_else(|| {
        let eig = cov.symmetric_eigenvalues();
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = eig.iter().cloned().fold(0.0, f64::max);
        Error::NotPositiveDefinite { min_pivot: min, condition: max / min.abs() }
    })?;
    let z: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
    let y = chol.l() * nalgebra::DVector::from_vec(z);
    for (r, &k) in idx.iter().enumerate() {
        out[k] = T::lit(y[r]);
    }
    Ok(out)
}

/// Strictly stable Lévy process at increasing `times ≥ 0`, started at 0.
pub fn simulate_stable_levy<T: Scalar, R: Rng + ?Sized>(beta: T, k_plus: T, k_minus: T, times: &[T], rng: &mut R) -> Result<Vec<T>> {
    let seed = LevySeedSpec::stable(beta, k_plus, k_minus)?;
    let mut prev = T::zero();
    let mut x = T::zero();
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if !(t >= prev) {
            return invalid("times must be non-decreasing and ≥ 0");
        }
        x = x + cell_sample_unchecked(&seed, t - prev, rng);
        prev = t;
        out.push(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::stable_exponent;
    use crate::rng::path_rng;
    use crate::stats::ecf_distance;

    #[test]
    fn ma_variance_and_lag_covariance() {
        let g = |s: f64| (-s).exp();
        let n = 4000;
        let (mut v, mut c) = (0.0, 0.0);
        for k in 0..n {
            let y = simulate_gaussian_ma(&g, &[0.0, 1.0], 12.0, 0.01, &mut path_rng(6, 0, k)).unwrap();
            v += y[0] * y[0] / n as f64;
            c += y[0] * y[1] / n as f64;
        }
        let se = 0.5 * (2.0 / n as f64).sqrt();
        assert!((v - 0.5).abs() < 4.0 * se, "{v}");
        assert!((c - 0.5 * (-1f64).exp()).abs() < 4.0 * se, "{c}");
        let zero = simulate_gaussian_ma(&|_s: f64| 0.0, &[0.0, 1.0, 2.0], 5.0, 0.1, &mut path_rng(6, 1, 0)).unwrap();
        assert!(zero.iter().all(|&y| y == 0.0));
    }

    #[test]
    fn fbm_covariances() {
        let n = 20_000;
        let (mut v1, mut c75, mut c50) = (0.0, 0.0, 0.0);
        for k in 0..n {
            let b = simulate_fbm(0.75f64, &[1.0, 2.0], &mut path_rng(7, 0, k)).unwrap();
            v1 += b[0] * b[0] / n as f64;
            c75 += b[0] * (b[1] - b[0]) / n as f64;
            let w = simulate_fbm(0.5f64, &[1.0, 2.0], &mut path_rng(7, 1, k)).unwrap();
            c50 += w[0] * (w[1] - w[0]) / n as f64;
        }
        let se = (2.0 / n as f64).sqrt();
        assert!((v1 - 1.0).abs() < 4.0 * se);
        assert!((c75 - 0.5 * (2f64.powf(1.5) - 2.0)).abs() < 4.0 * se);
        assert!(c50.abs() < 4.0 * se);
        assert!(simulate_fbm(1.0f64, &[1.0], &mut path_rng(0, 0, 0)).is_err());
    }

    #[test]
    fn stable_levy_increments() {
        let n = 20_000;
        let inc: Vec<f64> = (0..n)
            .map(|k| {
                let p = simulate_stable_levy(1.5f64, 1.0, 0.5, &[0.0, 0.5, 1.25], &mut path_rng(8, 0, k)).unwrap();
                assert_eq!(p[0], 0.0);
                p[2] - p[1]
            })
            .collect();
        let zs: Vec<f64> = (0..=40).map(|k| -5.0 + 0.25 * k as f64).collect();
        let d = ecf_distance(&inc, &zs, |z| (stable_exponent(1.5, 1.0, 0.5, 0.0, z).unwrap() * 0.75).exp());
        assert!(d < 4.0 / (n as f64).sqrt(), "{d}");
        let sym: Vec<f64> = (0..n).map(|k| simulate_stable_levy(1.2f64, 1.0, 1.0, &[1.0], &mut path_rng(8, 1, k)).unwrap()[0]).collect();
        let below = sym.iter().filter(|&&x| x < 0.0).count() as f64 / n as f64;
        assert!((below - 0.5).abs() < 4.0 * 0.5 / (n as f64).sqrt());
    }
}
