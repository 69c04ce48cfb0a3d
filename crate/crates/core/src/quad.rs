//! Adaptive Simpson quadrature. Only used where no closed form exists.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_TOL: f64 = 1e-9;
const MAX_DEPTH: u32 = 48;
const MIN_DEPTH: u32 = 4;
// below this relative size a panel's error is round-off
const REL_FLOOR: f64 = 1e-14;
const MAX_EVALS: usize = 4_000_000;

/// `∫_a^b f` to absolute tolerance `tol`.
pub fn simpson<T: Scalar, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    if b < a {
        return simpson(f, b, a, tol).map(|v| -v);
    }
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb);
    let mut evals = 3usize;
    let v = step(&f, a, b, fa, fm, fb, whole, tol, 0, &mut evals);
    if evals > MAX_EVALS {
        return Err(Error::Quadrature(format!("no convergence on [{a}, {b}] within {MAX_EVALS} evaluations")));
    }
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Quadrature(format!("non-finite result on [{a}, {b}]")))
    }
}

#[allow(clippy::too_many_arguments)]
fn step<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: u32, evals: &mut usize) -> T {
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let (lm, rm) = ((a + m) / two, (m + b) / two);
    let (flm, frm) = (f(lm), f(rm));
    *evals += 2;
    let six = T::lit(6.0);
    let four = T::lit(4.0);
    let left = (m - a) / six * (fa + four * flm + fm);
    let right = (b - m) / six * (fm + four * frm + fb);
    let diff = left + right - whole;
    let thresh = tol.max(T::lit(REL_FLOOR) * (left + right).abs());
    if depth >= MAX_DEPTH || *evals > MAX_EVALS || (depth >= MIN_DEPTH && diff.abs() <= T::lit(15.0) * thresh) || m <= a || m >= b {
        return left + right + diff / T::lit(15.0);
    }
    step(f, a, m, fa, flm, fm, left, tol / two, depth + 1, evals) + step(f, m, b, fm, frm, fb, right, tol / two, depth + 1, evals)
}

/// `∫_a^∞ f` via `s = a + u/(1-u)`; `f` must decay.
pub fn simpson_to_inf<T: Scalar, F: Fn(T) -> T>(f: F, a: T, tol: T) -> Result<T> {
    let one = T::one();
    let g = |u: T| {
        if u >= one {
            return T::zero();
        }
        let w = one - u;
        let v = f(a + u / w) / (w * w);
        if v.is_finite() {
            v
        } else {
            T::zero()
        }
    };
    simpson(g, T::zero(), one, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = simpson(|x: f64| x * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_limits() {
        let v = simpson(|x: f64| x.cos(), 1.0, 0.0, 1e-12).unwrap();
        assert!((v + 1f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn exponential_tail() {
        let v = simpson_to_inf(|x: f64| (-x).exp(), 1.0, 1e-10).unwrap();
        assert!((v - (-1f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn kink_converges() {
        let v = simpson(|x: f64| (1.0 - x).max(0.0), 0.0, 3.0, 1e-10).unwrap();
        assert!((v - 0.5).abs() < 1e-9);
    }
}
