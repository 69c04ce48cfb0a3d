use rand::Rng;

use crate::error::{invalid, Result};
use crate::levy::{cell_sample, LevySeedSpec, SeedFamily};
use crate::scalar::Scalar;

/// Draw of `Σ_c w_c L(c)` over disjoint cells for a strictly stable seed,
/// given `pos = Σ_{w>0} Leb(c)·w^β` and `neg = Σ_{w<0} Leb(c)·|w|^β`.
///
/// The sum has exponent `pos·ψ(z) + neg·ψ(−z)`, which is again strictly
/// stable with coefficients `(pos·K₊ + neg·K₋, pos·K₋ + neg·K₊)`.
pub fn stable_functional_sample<T: Scalar, R: Rng + ?Sized>(seed: &LevySeedSpec<T>, pos: T, neg: T, rng: &mut R) -> Result<T> {
    let SeedFamily::Stable { beta, k_plus, k_minus } = seed.family else {
        return invalid("linear functional sampler needs a strictly stable seed");
    };
    if !(pos >= T::zero() && neg >= T::zero()) {
        return invalid("weight sums must be ≥ 0");
    }
    if pos + neg == T::zero() {
        return Ok(T::zero());
    }
    let merged = LevySeedSpec::stable(beta, pos * k_plus + neg * k_minus, pos * k_minus + neg * k_plus)?;
    cell_sample(&merged, T::one(), rng)
}
