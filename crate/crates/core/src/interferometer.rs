//! Mach-Zehnder pipeline: BS1 preparation, bath interaction, BS2, detector
//! statistics and the pointer distributions along X and P.
//!
//! Conventions: BS2 is U = (1/√2)[[1, i], [i, 1]]; the momentum pointer
//! wavefunctions are ⟨P|0⟩ = G(P)e^{−iPd/2}, ⟨P|1⟩ = G(P)e^{+iPd/2} with
//! G(P) = (1/Ωπ)^{1/4} e^{−P²/2Ω}. With this pair the compositional ⟨P|ρ|P⟩
//! reproduces the closed-form fringe law exactly.

use num_complex::Complex64;

use crate::bath::MarkovParameters;
use crate::dynamics::{decoherence_factor, evolve_analytic, Trajectory};
use crate::qmath::{DensityMatrix, Mat2};
use crate::{Error, Result};

/// Minimum Ω·d² (pointer overlap e^{−Ωd²/4} ≤ 1e−12).
pub const MIN_FRINGE_SEPARATION: f64 = 110.5;
/// Minimum x₀·√(2Ω) for non-overlapping position peaks.
pub const MIN_POINTER_SEPARATION: f64 = 8.0;
/// Relative slack on the geometry minima so values built from them survive
/// rounding.
const GEOMETRY_SLACK: f64 = 1e-12;
/// Default Ω·d².
pub const DEFAULT_FRINGE_SEPARATION: f64 = 120.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerConfig {
    /// φ in radians.
    pub phase: f64,
    /// d, conjugate to P.
    pub path_difference: f64,
    /// Ω in s⁻¹.
    pub system_frequency: f64,
    /// x₀, position units.
    pub pointer_separation: f64,
    pub markov: MarkovParameters,
}

impl InterferometerConfig {
    /// Defaults: x₀ = 8/√(2Ω) and Ωd² = 120.
    pub fn with_defaults(phase: f64, system_frequency: f64, markov: MarkovParameters) -> Self {
        Self {
            phase,
            path_difference: (DEFAULT_FRINGE_SEPARATION / system_frequency).sqrt(),
            system_frequency,
            pointer_separation: MIN_POINTER_SEPARATION / (2.0 * system_frequency).sqrt(),
            markov,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.phase.is_finite() {
            return Err(Error::config("interferometer.phase", "must be finite"));
        }
        if !(self.system_frequency.is_finite() && self.system_frequency > 0.0) {
            return Err(Error::config("bath.system_frequency", "must be finite and > 0"));
        }
        let fringe = self.system_frequency * self.path_difference * self.path_difference;
        if !(fringe >= MIN_FRINGE_SEPARATION * (1.0 - GEOMETRY_SLACK)) {
            return Err(Error::config(
                "interferometer.path_difference",
                format!("Omega*d^2 = {fringe} is below {MIN_FRINGE_SEPARATION}"),
            ));
        }
        let pointer = self.pointer_separation * (2.0 * self.system_frequency).sqrt();
        if !(pointer >= MIN_POINTER_SEPARATION * (1.0 - GEOMETRY_SLACK)) {
            return Err(Error::config(
                "interferometer.pointer_separation",
                format!("x0*sqrt(2*Omega) = {pointer} is below {MIN_POINTER_SEPARATION}"),
            ));
        }
        Ok(())
    }

    /// e^{−Ωd²/4}, the overlap of the two momentum pointer states.
    pub fn pointer_overlap(&self) -> f64 {
        (-0.25 * self.system_frequency * self.path_difference * self.path_difference).exp()
    }
}

/// Sampled probability density.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSamples {
    pub abscissa: Vec<f64>,
    pub density: Vec<f64>,
}

impl DistributionSamples {
    pub fn trapezoid_integral(&self) -> f64 {
        self.abscissa
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }

    /// (max, min) of the density.
    pub fn extrema(&self) -> (f64, f64) {
        self.density
            .iter()
            .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), &v| (hi.max(v), lo.min(v)))
    }
}

/// Uniform grid of `count` points over `[-half_width, half_width]`.
pub fn symmetric_grid(half_width: f64, count: usize) -> Vec<f64> {
    let n = count.max(2);
    (0..n)
        .map(|k| -half_width + 2.0 * half_width * (k as f64) / ((n - 1) as f64))
        .collect()
}

/// State after BS1: (e^{iφ}|0⟩ + i|1⟩)/√2, i.e. ρ₀₁ = −ie^{iφ}/2.
pub fn prepare_after_bs1(phase: f64) -> DensityMatrix {
    // −i e^{iφ} = sin φ − i cos φ
    let c = Complex64::new(phase.sin(), -phase.cos()) * 0.5;
    let half = Complex64::new(0.5, 0.0);
    DensityMatrix::new([[half, c], [c.conj(), half]]).expect("BS1 output is a valid pure state")
}

/// U ρ U† for U = (1/√2)[[1, i], [i, 1]], in closed form so that the
/// halves stay exact.
pub fn apply_bs2(rho: &DensityMatrix) -> DensityMatrix {
    let (p, q) = rho.populations();
    let c = rho.coherence();
    let mean = 0.5 * (p + q);
    let off = Complex64::new(c.re, 0.5 * (q - p));
    let out: Mat2 = [
        [Complex64::new(mean + c.im, 0.0), off],
        [off.conj(), Complex64::new(mean - c.im, 0.0)],
    ];
    DensityMatrix::new(out).expect("unitary conjugation preserves validity")
}

/// prepare_after_bs1 → evolve_analytic → apply_bs2.
pub fn pipeline_state(config: &InterferometerConfig, t: f64) -> Result<DensityMatrix> {
    let inside = evolve_analytic(&prepare_after_bs1(config.phase), &config.markov, t)?;
    Ok(apply_bs2(&inside))
}

/// The pipeline state sampled on a time grid.
pub fn pipeline_trajectory(config: &InterferometerConfig, times: &[f64]) -> Result<Trajectory> {
    let states = times
        .iter()
        .map(|&t| pipeline_state(config, t))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(times.to_vec(), states)
}

/// (p_D1, p_D2) = (ρ₀₀, ρ₁₁).
pub fn detector_probabilities(rho_final: &DensityMatrix) -> (f64, f64) {
    rho_final.populations()
}

/// Fringe coefficients (A, B) = ((η²−1)/(2n̄+1), η sin φ) of
/// Pr(P) ∝ 1 + A sin(Pd) + B cos(Pd).
pub fn fringe_coefficients(eta: f64, occupation: f64, phase: f64) -> (f64, f64) {
    ((eta * eta - 1.0) / (2.0 * occupation + 1.0), eta * phase.sin())
}

fn momentum_envelope(p: f64, omega: f64) -> f64 {
    (1.0 / (omega * std::f64::consts::PI)).sqrt() * (-p * p / omega).exp()
}

/// Closed-form Pr(P) = √(1/Ωπ) e^{−P²/Ω} [1 + A sin(Pd) + B cos(Pd)].
pub fn momentum_distribution(config: &InterferometerConfig, t: f64, p_grid: &[f64]) -> Result<DistributionSamples> {
    config.validate()?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    let eta = decoherence_factor(&config.markov, t);
    let (a, b) = fringe_coefficients(eta, config.markov.occupation, config.phase);
    let d = config.path_difference;
    let density = p_grid
        .iter()
        .map(|&p| {
            let v = momentum_envelope(p, config.system_frequency) * (1.0 + a * (p * d).sin() + b * (p * d).cos());
            // The bracket is ≥ 1 − √(A²+B²) ≥ 0; clip rounding dust only.
            v.max(0.0)
        })
        .collect();
    Ok(DistributionSamples {
        abscissa: p_grid.to_vec(),
        density,
    })
}

/// ⟨P|ρ|P⟩ for the pipeline state using the pointer wavefunctions.
pub fn momentum_distribution_compositional(
    config: &InterferometerConfig,
    t: f64,
    p_grid: &[f64],
) -> Result<DistributionSamples> {
    config.validate()?;
    let rho = pipeline_state(config, t)?;
    let m = rho.elements();
    let omega = config.system_frequency;
    let d = config.path_difference;
    let density = p_grid
        .iter()
        .map(|&p| {
            let g = (1.0 / (omega * std::f64::consts::PI)).powf(0.25) * (-p * p / (2.0 * omega)).exp();
            let psi = [
                Complex64::from_polar(g, -0.5 * p * d),
                Complex64::from_polar(g, 0.5 * p * d),
            ];
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..2 {
                for k in 0..2 {
                    acc += psi[j] * m[j][k] * psi[k].conj();
                }
            }
            acc.re.max(0.0)
        })
        .collect();
    Ok(DistributionSamples {
        abscissa: p_grid.to_vec(),
        density,
    })
}

/// Pr(X) = ρ₀₀ g²(X − x₀) + ρ₁₁ g²(X + x₀), g²(x) = √(Ω/π) e^{−Ωx²}.
pub fn position_distribution(config: &InterferometerConfig, t: f64, x_grid: &[f64]) -> Result<DistributionSamples> {
    config.validate()?;
    let rho = pipeline_state(config, t)?;
    let (p1, p2) = detector_probabilities(&rho);
    let omega = config.system_frequency;
    let x0 = config.pointer_separation;
    let g2 = |x: f64| (omega / std::f64::consts::PI).sqrt() * (-omega * x * x).exp();
    let density = x_grid.iter().map(|&x| p1 * g2(x - x0) + p2 * g2(x + x0)).collect();
    Ok(DistributionSamples {
        abscissa: x_grid.to_vec(),
        density,
    })
}

/// v = √(A² + B²) clamped to [0, 1].
pub fn fringe_visibility(config: &InterferometerConfig, t: f64) -> f64 {
    let eta = decoherence_factor(&config.markov, t);
    let (a, b) = fringe_coefficients(eta, config.markov.occupation, config.phase);
    a.hypot(b).clamp(0.0, 1.0)
}

/// (I_max − I_min)/(I_max + I_min) of the envelope-normalised fringe factor
/// sampled on `p_grid`.
pub fn sampled_visibility(config: &InterferometerConfig, t: f64, p_grid: &[f64]) -> f64 {
    let eta = decoherence_factor(&config.markov, t);
    let (a, b) = fringe_coefficients(eta, config.markov.occupation, config.phase);
    let d = config.path_difference;
    let (hi, lo) = p_grid
        .iter()
        .map(|&p| 1.0 + a * (p * d).sin() + b * (p * d).cos())
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(h, l), v| (h.max(v), l.min(v)));
    (hi - lo) / (hi + lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{eigenvalues2, mat2, mixedness};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn cfg(phase: f64, rate: f64, n: f64) -> InterferometerConfig {
        InterferometerConfig::with_defaults(phase, 1e12, MarkovParameters::new(rate, n).unwrap())
    }

    fn generic_bs2(rho: &DensityMatrix) -> Mat2 {
        let s = FRAC_1_SQRT_2;
        let u = [
            [Complex64::new(s, 0.0), Complex64::new(0.0, s)],
            [Complex64::new(0.0, s), Complex64::new(s, 0.0)],
        ];
        mat2::mul(&mat2::mul(&u, rho.elements()), &mat2::dagger(&u))
    }

    #[test]
    fn bs1_examples() {
        let r0 = prepare_after_bs1(0.0);
        assert_eq!(r0.get(0, 1), Complex64::new(0.0, -0.5));
        assert_eq!(r0.get(1, 0), Complex64::new(0.0, 0.5));
        let r = prepare_after_bs1(FRAC_PI_2);
        assert!((r.get(0, 1) - Complex64::new(0.5, 0.0)).norm() < 1e-16);
        for phi in [0.0, 0.3, 2.0, -4.0] {
            let r = prepare_after_bs1(phi);
            let (hi, lo) = eigenvalues2(&r);
            assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(mixedness(&r), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn bs2_closed_form_matches_matrix_product() {
        for (phi, t) in [(0.0, 0.0), (0.7, 1e-12), (2.1, 5e-12)] {
            let c = cfg(phi, 1e10, 1.3);
            let rho = evolve_analytic(&prepare_after_bs1(phi), &c.markov, t).unwrap();
            let diff = mat2::sub(apply_bs2(&rho).elements(), &generic_bs2(&rho));
            assert!(mat2::max_abs(&diff) < 1e-15);
        }
    }

    #[test]
    fn bs2_examples() {
        let mixed = DensityMatrix::maximally_mixed();
        assert_eq!(apply_bs2(&mixed), mixed);
        let up = DensityMatrix::diagonal(1.0).unwrap();
        assert_eq!(apply_bs2(&apply_bs2(&up)), DensityMatrix::diagonal(0.0).unwrap());
    }

    #[test]
    fn bs2_reproduces_final_state_diagonal_and_conjugate_offdiagonal() {
        let (phi, n) = (0.8, 2.0);
        let c = cfg(phi, 1e10, n);
        let t = 3e-12;
        let eta = decoherence_factor(&c.markov, t);
        let out = pipeline_state(&c, t).unwrap();
        assert_abs_diff_eq!(out.get(0, 0).re, (1.0 - eta * phi.cos()) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.get(1, 1).re, (1.0 + eta * phi.cos()) / 2.0, epsilon = 1e-14);
        let s = 2.0 * n + 1.0;
        // Conjugate of i(1−η²)/(2s) + η sin φ/2.
        let expected = Complex64::new(eta * phi.sin() / 2.0, -(1.0 - eta * eta) / (2.0 * s));
        assert!((out.get(0, 1) - expected).norm() < 1e-14);
    }

    #[test]
    fn pipeline_limits() {
        let c = cfg(0.0, 1e10, 3.0);
        assert_eq!(detector_probabilities(&pipeline_state(&c, 0.0).unwrap()), (0.0, 1.0));
        assert_eq!(detector_probabilities(&pipeline_state(&c, 1.0).unwrap()), (0.5, 0.5));
        let c = cfg(PI, 1e10, 3.0);
        let (p1, p2) = detector_probabilities(&pipeline_state(&c, 0.0).unwrap());
        assert_abs_diff_eq!(p1, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p2, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pipeline_eigenvalues_match_closed_form() {
        for (phi, n, t) in [(0.0, 0.1, 1e-11), (1.0, 5.0, 2e-12), (2.5, 0.0, 4e-11)] {
            let c = cfg(phi, 1e10, n);
            let eta = decoherence_factor(&c.markov, t);
            let s = 2.0 * n + 1.0;
            let r = (eta * eta + (1.0 - eta * eta).powi(2) / (s * s)).sqrt();
            let (hi, lo) = eigenvalues2(&pipeline_state(&c, t).unwrap());
            assert_abs_diff_eq!(hi, 0.5 + 0.5 * r, epsilon = 1e-14);
            assert_abs_diff_eq!(lo, 0.5 - 0.5 * r, epsilon = 1e-14);
        }
    }

    #[test]
    fn momentum_examples() {
        let grid = symmetric_grid(8.0 * 1e6, 1001);
        let env: Vec<f64> = grid.iter().map(|&p| momentum_envelope(p, 1e12)).collect();

        let c = cfg(0.0, 1e10, 2.0);
        let d = momentum_distribution(&c, 0.0, &grid).unwrap();
        for (v, e) in d.density.iter().zip(&env) {
            assert_abs_diff_eq!(*v, *e, epsilon = 1e-22);
        }

        let c = cfg(FRAC_PI_2, 1e10, 2.0);
        let d = momentum_distribution(&c, 0.0, &grid).unwrap();
        for ((v, e), p) in d.density.iter().zip(&env).zip(&grid) {
            assert_abs_diff_eq!(*v, e * (1.0 + (p * c.path_difference).cos()), epsilon = 1e-21);
        }

        let c = cfg(1.2, 1e10, 2.0);
        let d = momentum_distribution(&c, 1.0, &grid).unwrap();
        for ((v, e), p) in d.density.iter().zip(&env).zip(&grid) {
            assert_abs_diff_eq!(*v, e * (1.0 - (p * c.path_difference).sin() / 5.0), epsilon = 1e-21);
        }
    }

    #[test]
    fn momentum_rejects_overlapping_pointers() {
        let mut c = cfg(0.0, 1e10, 2.0);
        c.path_difference = (100.0f64 / 1e12).sqrt();
        let err = momentum_distribution(&c, 0.0, &[0.0]).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "interferometer.path_difference"));
    }

    #[test]
    fn position_examples() {
        let c = cfg(0.0, 1e10, 1.0);
        let grid = symmetric_grid(2.0 * c.pointer_separation, 2001);
        let d = position_distribution(&c, 0.0, &grid).unwrap();
        let (argmax, _) = d
            .density
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert_abs_diff_eq!(grid[argmax], -c.pointer_separation, epsilon = 1e-3 * c.pointer_separation);
        assert_abs_diff_eq!(d.trapezoid_integral(), 1.0, epsilon = 1e-9);

        let late = position_distribution(&c, 1.0, &grid).unwrap();
        let mid = grid.len() / 2;
        let left = late.density[..mid].iter().cloned().fold(0.0, f64::max);
        let right = late.density[mid..].iter().cloned().fold(0.0, f64::max);
        assert_abs_diff_eq!(left, right, epsilon = 1e-9 * left);

        let mut bad = c;
        bad.pointer_separation = 1.0 / (2.0f64 * 1e12).sqrt();
        assert!(position_distribution(&bad, 0.0, &grid).is_err());
    }

    #[test]
    fn visibility_examples() {
        assert_abs_diff_eq!(fringe_visibility(&cfg(FRAC_PI_2, 1e10, 3.0), 0.0), 1.0, epsilon = 1e-15);
        assert_eq!(fringe_visibility(&cfg(0.0, 1e10, 3.0), 0.0), 0.0);
        assert_abs_diff_eq!(fringe_visibility(&cfg(0.4, 1e10, 3.0), 1.0), 1.0 / 7.0, epsilon = 1e-15);
    }

    #[test]
    fn visibility_matches_sampled_max_min() {
        let c = cfg(0.9, 1e10, 0.5);
        let t = 2e-11;
        // Fine grid over many fringe periods hits the extrema closely.
        let grid = symmetric_grid(2.0e3 / c.path_difference, 400_001);
        let sampled = sampled_visibility(&c, t, &grid);
        assert_abs_diff_eq!(sampled, fringe_visibility(&c, t), epsilon = 1e-8);
    }

    #[test]
    fn visibility_rises_monotonically_at_zero_phase() {
        let c = cfg(0.0, 1e10, 0.7);
        let span = 20.0 / c.markov.decoherence_rate();
        let v: Vec<f64> = (0..=400).map(|k| fringe_visibility(&c, span * k as f64 / 400.0)).collect();
        assert!(v.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert_abs_diff_eq!(*v.last().unwrap(), 1.0 / 2.4, epsilon = 1e-12);
    }
}
