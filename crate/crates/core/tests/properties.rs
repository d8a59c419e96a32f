use std::f64::consts::PI;

use mzbath::bath::{self, BathParameters, MarkovParameters, FREQUENCY_CUTOFF_FACTOR, K_B_OVER_HBAR};
use mzbath::dynamics::{evolve_analytic, gibbs_state};
use mzbath::interferometer::{
    apply_bs2, detector_probabilities, fringe_coefficients, pipeline_state, prepare_after_bs1, InterferometerConfig,
};
use mzbath::qmath::{distillable_coherence, mixedness, relative_entropy, von_neumann_entropy, DensityMatrix};
use mzbath::quadrature::{integrate, QuadOptions};
use nalgebra::{Complex, Matrix2};
use num_complex::Complex64;
use proptest::prelude::*;

fn bloch(x: f64, y: f64, z: f64) -> DensityMatrix {
    let h = 0.5;
    DensityMatrix::new([
        [Complex64::new(h * (1.0 + z), 0.0), Complex64::new(h * x, -h * y)],
        [Complex64::new(h * x, h * y), Complex64::new(h * (1.0 - z), 0.0)],
    ])
    .unwrap()
}

fn ball() -> impl Strategy<Value = DensityMatrix> {
    (0.0..0.999f64, 0.0..PI, 0.0..2.0 * PI).prop_map(|(r, th, ph)| {
        bloch(r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos())
    })
}

fn eigen_entropy(rho: &DensityMatrix) -> f64 {
    let e = rho.elements();
    let m = Matrix2::new(
        Complex::new(e[0][0].re, e[0][0].im),
        Complex::new(e[0][1].re, e[0][1].im),
        Complex::new(e[1][0].re, e[1][0].im),
        Complex::new(e[1][1].re, e[1][1].im),
    );
    m.symmetric_eigen()
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum()
}

fn distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let (ea, eb) = (a.elements(), b.elements());
    let dz = ea[0][0].re - eb[0][0].re;
    let dc = (ea[0][1] - eb[0][1]).norm();
    (dz * dz + dc * dc).sqrt()
}

proptest! {
    #[test]
    fn entropy_agrees_with_eigensolver(rho in ball()) {
        prop_assert!((von_neumann_entropy(&rho) - eigen_entropy(&rho)).abs() < 1e-12);
    }

    #[test]
    fn measures_stay_in_range(rho in ball()) {
        let s = von_neumann_entropy(&rho);
        let cd = distillable_coherence(&rho);
        let m = mixedness(&rho);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&s));
        prop_assert!((-1e-15..=1.0 + 1e-15).contains(&cd));
        prop_assert!((-1e-15..=0.5 + 1e-15).contains(&m));
    }

    #[test]
    fn analytic_propagator_is_a_semigroup(
        rho in ball(), n in 0.0..20.0f64, rate in 1e8..1e11f64, s in 0.0..3.0f64, t in 0.0..3.0f64,
    ) {
        let m = MarkovParameters::new(rate, n).unwrap();
        let scale = 1.0 / m.decoherence_rate();
        let two_step = evolve_analytic(&evolve_analytic(&rho, &m, s * scale).unwrap(), &m, t * scale).unwrap();
        let one_step = evolve_analytic(&rho, &m, (s + t) * scale).unwrap();
        prop_assert!(distance(&two_step, &one_step) < 1e-12);
    }

    #[test]
    fn relative_entropy_to_gibbs_never_grows(
        rho in ball(), n in 0.01..20.0f64, s in 0.0..3.0f64, t in 0.0..3.0f64,
    ) {
        let m = MarkovParameters::new(1e9, n).unwrap();
        let g = gibbs_state(n).unwrap().matrix;
        let scale = 1.0 / m.decoherence_rate();
        let early = evolve_analytic(&rho, &m, s * scale).unwrap();
        let late = evolve_analytic(&early, &m, t * scale).unwrap();
        let (d0, d1) = (relative_entropy(&early, &g).unwrap(), relative_entropy(&late, &g).unwrap());
        prop_assert!(d1 <= d0 + 1e-12, "{d1} > {d0}");
        prop_assert!(distance(&late, &g) <= distance(&early, &g) + 1e-14);
    }

    #[test]
    fn beamsplitter_preserves_spectrum(rho in ball()) {
        let out = apply_bs2(&rho);
        prop_assert!((von_neumann_entropy(&out) - von_neumann_entropy(&rho)).abs() < 1e-12);
        prop_assert!((out.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn detectors_follow_fringe_law(phi in 0.0..2.0 * PI, n in 0.0..20.0f64, u in 0.0..5.0f64) {
        let m = MarkovParameters::new(1e9, n).unwrap();
        let cfg = InterferometerConfig::with_defaults(phi, 1e12, m);
        let t = u / m.decoherence_rate();
        let (d1, d2) = detector_probabilities(&pipeline_state(&cfg, t).unwrap());
        prop_assert!((d1 + d2 - 1.0).abs() < 1e-14);
        // Inside the arms ρ₀₁ = η(sin φ − i cos φ)/2, so D1 − D2 = 2 Im ρ₀₁ = −η cos φ.
        let eta = (-u).exp();
        prop_assert!((d1 - d2 + eta * phi.cos()).abs() < 1e-12);
        let (a, b) = fringe_coefficients(eta, n, phi);
        prop_assert!(a <= 0.0 && a.abs() <= 1.0 && b.abs() <= 1.0);
        prop_assert!(prepare_after_bs1(phi).trace() == 1.0);
    }
}

/// Δ(t) and γ(t) with the time integral done first, in closed form, and
/// the frequency integral last.
fn swapped_order(b: &BathParameters, t: f64) -> (f64, f64) {
    let omega = b.system_frequency;
    let two_kt = 2.0 * K_B_OVER_HBAR * b.temperature;
    let sinc_t = |x: f64| if x.abs() * t < 1e-8 { t } else { (x * t).sin() / x };
    let opts = QuadOptions {
        rel_tol: 1e-12,
        abs_tol_scaled: 1e-12,
        max_panel_width: (PI / t).min(b.cutoff / 4.0),
        max_panels: 2_000_000,
    };
    let top = FREQUENCY_CUTOFF_FACTOR * b.cutoff;
    let j = |w: f64| bath::spectral_density(w, b).unwrap();
    let d = integrate(
        |w| j(w) / (w / two_kt).tanh() * (sinc_t(w - omega) + sinc_t(w + omega)),
        0.0,
        top,
        &opts,
    )
    .unwrap();
    let g = integrate(|w| j(w) * (sinc_t(w - omega) - sinc_t(w + omega)), 0.0, top, &opts).unwrap();
    (d.value, g.value)
}

#[test]
fn transient_coefficients_match_swapped_integration_order() {
    let b = BathParameters::new(100.0, 1e13, 0.1, 1e12).unwrap();
    let times: Vec<f64> = [0.0, 0.5, 1.0, 3.0, 10.0, 30.0].iter().map(|k| k / b.cutoff).collect();
    let tc = bath::transient_coefficients(&b, &times).unwrap();
    let (d_inf, g_inf) = bath::stationary_coefficients(&b);
    assert_eq!((tc.delta[0], tc.gamma[0]), (0.0, 0.0));
    for (k, &t) in times.iter().enumerate().skip(1) {
        let (d, g) = swapped_order(&b, t);
        assert!((tc.delta[k] - d).abs() <= 1e-6 * d_inf, "Δ at t={t:e}: {} vs {d}", tc.delta[k]);
        assert!((tc.gamma[k] - g).abs() <= 1e-6 * g_inf, "γ at t={t:e}: {} vs {g}", tc.gamma[k]);
    }
}
