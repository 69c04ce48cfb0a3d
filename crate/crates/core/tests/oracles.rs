//! Closed-form values frozen from independent hand or scipy evaluation.

use trawl_core::levy::{bg_index, cumulant, stable_exponent, stable_sigma_rho, LevySeedSpec};
use trawl_core::stats::trawl_fourth_central_moment;
use trawl_core::sums::{c_alpha, limit_constants, rho_a_long_memory, theoretical_var_S, RegimeSpec};
use trawl_core::trawl::{acf, check_assumption_a1, kernel_to_trawl, row_tail_area, slice_area, spectral_density, Kernel};
use trawl_core::{Complex64, LevySeed, Trawl};

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

fn exp1() -> Trawl {
    Trawl::exponential(1.0).unwrap()
}

#[test]
fn poisson_cumulant() {
    let s = LevySeed::poisson(2.0).unwrap();
    let v = cumulant(&s, 1.0).unwrap();
    let want = Complex64::new(2.0 * (1f64.cos() - 1.0), 2.0 * 1f64.sin());
    close(v.re, want.re, 1e-12);
    close(v.im, want.im, 1e-12);
    close(v.re, -0.9193953882637205, 1e-12);
    close(v.im, 1.682941969615793, 1e-12);
}

#[test]
fn stable_exponent_values() {
    let (sigma, rho) = stable_sigma_rho(0.5, 1.0, 1.0);
    close(sigma, 5.013256549262001, 1e-12);
    close(rho, 0.0, 0.0);
    let v = stable_exponent(0.5, 1.0, 1.0, 0.0, 1.0).unwrap();
    close(v.re, -5.013256549262001, 1e-12);
    close(v.im, 0.0, 1e-15);
    let c = stable_exponent(1.0, 1.0, 1.0, 0.0, 2.0).unwrap();
    close(c.re, -2.0 * std::f64::consts::PI, 1e-12);
    assert!(stable_exponent(1.0, 1.0, 0.5, 0.0, 2.0).is_err());
}

#[test]
fn seed_moments_and_index() {
    let s = LevySeed::poisson(2.0).unwrap();
    close(s.mean().unwrap(), 2.0, 1e-12);
    close(s.variance().unwrap(), 2.0, 1e-12);
    close(s.kappa4().unwrap(), 2.0, 1e-12);
    close(bg_index(&LevySeed::stable(1.2, 1.0, 0.5).unwrap()), 1.2, 1e-12);
}

#[test]
fn exponential_trawl_geometry() {
    let t = exp1();
    let e1 = (-1f64).exp();
    close(acf(&t, 1.0, 0.0), 1.0, 1e-12);
    close(acf(&t, 1.0, 1.0), 0.36787944117144233, 1e-12);
    close(slice_area(&t, 1.0, 0, 0).unwrap(), 1.0 - e1, 1e-12);
    close(slice_area(&t, 1.0, 1, 0).unwrap(), (1.0 - e1).powi(2), 1e-12);
    close(row_tail_area(&t, 1.0, 0, 2).unwrap(), (-2f64).exp(), 1e-12);
    close(row_tail_area(&t, 1.0, 1, 2).unwrap(), 0.23254415793482963, 1e-12);
}

#[test]
fn kernel_overlaps() {
    let g = Kernel::exponential(1.0);
    close(g.overlap(1.0, 1e-12).unwrap(), 0.5 * (-1f64).exp(), 1e-9);
    let t = kernel_to_trawl(Kernel::exponential(1.0), 1e-10, 1e-4).unwrap();
    for h in [0.1f64, 0.5, 2.0] {
        close(t.a(h), 0.5 * (-h).exp(), 1e-6);
    }
    let box1 = Kernel::indicator(1.0);
    close(box1.overlap(0.25, 1e-12).unwrap(), 0.75, 1e-9);
    close(box1.overlap(1.5, 1e-12).unwrap(), 0.0, 1e-12);
    let tb = kernel_to_trawl(Kernel::indicator(1.0), 1e-10, 1e-4).unwrap();
    close(tb.a(0.5), 1.0, 1e-6);
    close(tb.a(1.5), 0.0, 1e-6);
}

#[test]
fn regularity_probe() {
    // a(p) = C e^{−p} with C = T^{−2}
    let horizon = 2.0f64;
    let c = horizon.powi(-2);
    let cum = move |x: f64| c * (1.0 - (-x).exp());
    assert!(check_assumption_a1(&cum, horizon, 0.5, 1.0, 24).pass);
    // a(p) = p^{−1/2+ε/2} near 0 breaks the bound on B̃
    let eps = 0.5;
    let q = 0.5 + eps / 2.0;
    let cum = move |x: f64| x.powf(q) / q;
    assert!(!check_assumption_a1(&cum, 1.0, eps, 1.0, 24).pass);
}

#[test]
fn spectral_density_values() {
    let t = exp1();
    close(spectral_density(&t, 0.0).unwrap(), 1.0, 1e-5);
    close(spectral_density(&t, 1.0 / (2.0 * std::f64::consts::PI)).unwrap(), 0.5, 1e-5);
}

#[test]
fn variance_and_limit_constants() {
    let t = exp1();
    close(theoretical_var_S(&t, 1.0, 2, 1.0), 2.0 + 2.0 * (-1f64).exp(), 1e-12);
    close(c_alpha(1.5), 16.0 / 3.0, 1e-12);
    close(rho_a_long_memory(2.5, 1.8), 2.0 + 1.5 * (1.0 / 0.3 - 1.0 / 1.3) + 2.0 / 1.3, 1e-12);
    close(rho_a_long_memory(2.5, 1.8), 7.384615384615385, 1e-12);

    let lm = Trawl::power_law(2.5, 1.0).unwrap();
    let g = LevySeed::gaussian(0.0, 1.0).unwrap();
    let c = limit_constants(&RegimeSpec::LongMemoryGauss { kappa: 2.5 }, &lm, &g).unwrap();
    close(c.hurst.unwrap(), 0.75, 1e-15);
    close(c.sigma_kappa2.unwrap(), 8.0 / 3.0, 1e-12);

    let p = LevySeed::poisson(1.0).unwrap();
    let c = limit_constants(&RegimeSpec::LongMemoryStableI { kappa: 2.5 }, &lm, &p).unwrap();
    close(c.k_plus_kappa.unwrap(), 1.0, 1e-9);
    close(c.k_minus_kappa.unwrap(), 0.0, 1e-12);

    // scipy: beta(2.2, 0.3)
    let st = LevySeed::stable(1.2, 1.0, 0.5).unwrap();
    let c = limit_constants(&RegimeSpec::StableBasisI { beta: 1.2, kappa: 2.5 }, &lm, &st).unwrap();
    close(c.rho_a.unwrap(), 2.4795140443957657, 1e-8);

    let c = limit_constants(&RegimeSpec::ShortMemory, &t, &p).unwrap();
    close(c.sigma_a2.unwrap(), 2.0, 1e-9);
    close(c.sigma_a2_displayed.unwrap(), 1.0, 1e-12);
}

#[test]
fn fourth_moment_forms() {
    let f = trawl_fourth_central_moment(&LevySeed::poisson(2.0).unwrap(), &exp1()).unwrap();
    close(f.cumulant_form, 14.0, 1e-12);
    close(f.displayed_form, 6.0, 1e-12);
}

#[test]
fn custom_seed_matches_gaussian() {
    let nu = trawl_core::LevyMeasure::Zero;
    let s = LevySeedSpec::custom(0.5, 2.0, nu, None).unwrap();
    close(s.variance().unwrap(), 4.0, 1e-12);
    let v = cumulant(&s, 1.0).unwrap();
    close(v.re, -2.0, 1e-12);
    close(v.im, 0.5, 1e-12);
}
