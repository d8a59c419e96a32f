//! Ohmic Lorentz-Drude bath: spectral density, thermal occupation and the
//! master-equation coefficients it induces.
//!
//! The noise and dissipation kernels are the continuum-limit integrals
//!
//! ```text
//! κ(τ) = 2 ∫₀^{ω_c} J(ω) coth(ω/2kT) cos(ωτ) dω
//! μ(τ) = 2 ∫₀^{ω_c} J(ω) sin(ωτ) dω
//! ```
//!
//! with the hard frequency cutoff `ω_c = 50 Λ`. The transient coefficients
//! are their cumulative projections on cos(Ωτ) and sin(Ωτ). These raw
//! quadrature values are linear in γ₀, while the stationary formulas carry
//! γ₀²; only ratios and shapes are comparable between the two.

use rayon::prelude::*;

use num_complex::Complex64;

use crate::quadrature::{integrate, QuadOptions, WGK, XGK};
use crate::{Error, Result};

/// k_B/ħ in s⁻¹ K⁻¹. Converts a temperature in kelvin to a frequency.
pub const K_B_OVER_HBAR: f64 = 1.30920e11;

/// Kernel frequency integrals stop at this multiple of Λ.
pub const FREQUENCY_CUTOFF_FACTOR: f64 = 50.0;

/// Relative/absolute tolerance of every kernel quadrature.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Tolerance of the frequency integrals inside κ and μ.
pub const KERNEL_QUADRATURE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParameters {
    /// Kelvin, ≥ 0.
    pub temperature: f64,
    /// Λ in s⁻¹, > 0.
    pub cutoff: f64,
    /// γ₀, dimensionless, ≥ 0.
    pub coupling: f64,
    /// Ω in s⁻¹, > 0.
    pub system_frequency: f64,
}

impl BathParameters {
    pub fn new(temperature: f64, cutoff: f64, coupling: f64, system_frequency: f64) -> Result<Self> {
        let p = Self {
            temperature,
            cutoff,
            coupling,
            system_frequency,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters from the dimensionless pair r = Λ/Ω and x = Ω/2kT.
    pub fn from_ratios(
        system_frequency: f64,
        cutoff_ratio: f64,
        half_inverse_temperature: f64,
        coupling: f64,
    ) -> Result<Self> {
        let temperature = if half_inverse_temperature.is_infinite() {
            0.0
        } else {
            system_frequency / (2.0 * half_inverse_temperature * K_B_OVER_HBAR)
        };
        Self::new(temperature, cutoff_ratio * system_frequency, coupling, system_frequency)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64, ok: bool, what: &str| {
            if !v.is_finite() || !ok {
                Err(Error::config(format!("bath.{name}"), format!("{what}, got {v}")))
            } else {
                Ok(())
            }
        };
        check("temperature", self.temperature, self.temperature >= 0.0, "must be finite and >= 0")?;
        check("cutoff", self.cutoff, self.cutoff > 0.0, "must be finite and > 0")?;
        check("coupling", self.coupling, self.coupling >= 0.0, "must be finite and >= 0")?;
        check(
            "system_frequency",
            self.system_frequency,
            self.system_frequency > 0.0,
            "must be finite and > 0",
        )?;
        let r = self.cutoff_ratio();
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::config("bath.cutoff", "cutoff/system_frequency must be finite"));
        }
        Ok(())
    }

    /// r = Λ/Ω.
    pub fn cutoff_ratio(&self) -> f64 {
        self.cutoff / self.system_frequency
    }

    /// kT in s⁻¹.
    pub fn thermal_frequency(&self) -> f64 {
        K_B_OVER_HBAR * self.temperature
    }

    /// Ω/kT, infinite at T = 0.
    pub fn frequency_over_thermal(&self) -> f64 {
        if self.temperature == 0.0 {
            f64::INFINITY
        } else {
            self.system_frequency / self.thermal_frequency()
        }
    }

    /// coth(Ω/2kT); 1 at T = 0.
    pub fn thermal_factor(&self) -> f64 {
        coth_or_one(0.5 * self.frequency_over_thermal())
    }
}

fn coth_or_one(x: f64) -> f64 {
    if x.is_infinite() {
        1.0
    } else {
        1.0 / x.tanh()
    }
}

/// y·coth(y), continuous through y = 0.
fn y_coth_y(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        1.0 + y * y / 3.0
    } else {
        y / y.tanh()
    }
}

/// (Γ, n̄) of the Markovian damped-oscillator limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovParameters {
    /// Γ in s⁻¹.
    pub rate: f64,
    /// n̄, dimensionless.
    pub occupation: f64,
}

impl MarkovParameters {
    pub fn new(rate: f64, occupation: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::config("markov.rate", format!("must be finite and >= 0, got {rate}")));
        }
        if !(occupation.is_finite() && occupation >= 0.0) {
            return Err(Error::config(
                "markov.occupation",
                format!("must be finite and >= 0, got {occupation}"),
            ));
        }
        Ok(Self { rate, occupation })
    }

    /// Γ(2n̄ + 1), the coherence decay rate.
    pub fn decoherence_rate(&self) -> f64 {
        self.rate * (2.0 * self.occupation + 1.0)
    }
}

/// J(ω) = (2γ₀ω/π)·Λ²/(Λ² + ω²).
pub fn spectral_density(omega: f64, bath: &BathParameters) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!("spectral density needs omega >= 0, got {omega}")));
    }
    Ok(spectral_density_unchecked(omega, bath))
}

fn spectral_density_unchecked(omega: f64, bath: &BathParameters) -> f64 {
    let l2 = bath.cutoff * bath.cutoff;
    2.0 * bath.coupling * omega / std::f64::consts::PI * l2 / (l2 + omega * omega)
}

/// J(ω)·coth(ω/2kT), finite at ω = 0 for T > 0.
fn thermal_spectral_density(omega: f64, bath: &BathParameters) -> f64 {
    let l2 = bath.cutoff * bath.cutoff;
    let lorentz = 2.0 * bath.coupling / std::f64::consts::PI * l2 / (l2 + omega * omega);
    if bath.temperature == 0.0 {
        lorentz * omega
    } else {
        let two_kt = 2.0 * bath.thermal_frequency();
        lorentz * two_kt * y_coth_y(omega / two_kt)
    }
}

/// n̄ = (e^{Ω/kT} − 1)⁻¹, zero at T = 0.
pub fn mean_occupation(bath: &BathParameters) -> f64 {
    if bath.temperature == 0.0 {
        return 0.0;
    }
    1.0 / bath.frequency_over_thermal().exp_m1()
}

/// Γ = γ₀²Ω r²/(1 + r²) together with n̄.
pub fn markov_parameters(bath: &BathParameters) -> MarkovParameters {
    MarkovParameters {
        rate: markov_rate(bath),
        occupation: mean_occupation(bath),
    }
}

fn markov_rate(bath: &BathParameters) -> f64 {
    let r2 = bath.cutoff_ratio().powi(2);
    bath.coupling * bath.coupling * bath.system_frequency * (r2 / (1.0 + r2))
}

/// Long-time limits `(Δ, γ)`: `γ = Γ`, `Δ = Γ·coth(Ω/2kT)`.
pub fn stationary_coefficients(bath: &BathParameters) -> (f64, f64) {
    let gamma = markov_rate(bath);
    (gamma * bath.thermal_factor(), gamma)
}

fn kernel_options(tau: f64, bath: &BathParameters) -> QuadOptions {
    // Half an oscillation of the trigonometric factor per initial panel.
    let width = if tau > 0.0 {
        (std::f64::consts::PI / tau).min(bath.cutoff)
    } else {
        bath.cutoff
    };
    // Tighter than the outer τ integral so kernel noise does not drive its
    // refinement.
    QuadOptions {
        rel_tol: KERNEL_QUADRATURE_TOL,
        abs_tol_scaled: KERNEL_QUADRATURE_TOL,
        max_panel_width: width,
        ..QuadOptions::default()
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("kernel lag must be finite and >= 0, got {tau}")));
    }
    Ok(())
}

/// κ(τ), in s⁻².
pub fn noise_kernel(tau: f64, bath: &BathParameters) -> Result<f64> {
    check_tau(tau)?;
    let omega_max = FREQUENCY_CUTOFF_FACTOR * bath.cutoff;
    let r = integrate(
        |w| thermal_spectral_density(w, bath) * (w * tau).cos(),
        0.0,
        omega_max,
        &kernel_options(tau, bath),
    )?;
    Ok(2.0 * r.value)
}

/// μ(τ), in s⁻². Independent of temperature.
pub fn dissipation_kernel(tau: f64, bath: &BathParameters) -> Result<f64> {
    check_tau(tau)?;
    if tau == 0.0 {
        return Ok(0.0);
    }
    let omega_max = FREQUENCY_CUTOFF_FACTOR * bath.cutoff;
    let r = integrate(
        |w| spectral_density_unchecked(w, bath) * (w * tau).sin(),
        0.0,
        omega_max,
        &kernel_options(tau, bath),
    )?;
    Ok(2.0 * r.value)
}

/// Δ(t), γ(t) sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientCoefficients {
    pub times: Vec<f64>,
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl TransientCoefficients {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Linear interpolation of `(Δ, γ)`; clamped to the end values outside
    /// the grid.
    pub fn interpolate(&self, t: f64) -> (f64, f64) {
        let n = self.times.len();
        if n == 0 {
            return (0.0, 0.0);
        }
        if t <= self.times[0] {
            return (self.delta[0], self.gamma[0]);
        }
        if t >= self.times[n - 1] {
            return (self.delta[n - 1], self.gamma[n - 1]);
        }
        let k = self.times.partition_point(|&x| x <= t) - 1;
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let w = (t - t0) / (t1 - t0);
        (
            self.delta[k] + w * (self.delta[k + 1] - self.delta[k]),
            self.gamma[k] + w * (self.gamma[k + 1] - self.gamma[k]),
        )
    }

    /// Indices where Δ ± γ < −tol·Δ (the Lindblad-type condition fails).
    pub fn lindblad_violations(&self, tol: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                let (d, g) = (self.delta[i], self.gamma[i]);
                let slack = -tol * d.abs();
                d + g < slack || d - g < slack
            })
            .collect()
    }
}

pub(crate) fn check_time_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Domain("time grid is empty".into()));
    }
    if !(times[0] >= 0.0) {
        return Err(Error::Domain(format!("time grid must start at t >= 0, got {}", times[0])));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain("time grid has non-finite entries".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Both kernels for every lag in [0, τ_max] from one precomputed composite
/// Kronrod rule.
///
/// The frequency axis is cut into uniform blocks whose panels are at most
/// half an oscillation of cos(ωτ_max) wide and no wider than the distance to
/// the nearest complex singularity of J(ω)coth(ω/2kT) (±iΛ, and ±2πikT near
/// the origin), so each 15-point panel is accurate far beyond the 1e−10
/// target. Weighted integrand values are stored once; e^{iωτ} is advanced
/// by a phase recurrence, so a lag costs one complex multiply per node.
#[derive(Debug, Clone)]
pub struct KernelRule {
    blocks: Vec<RuleBlock>,
    tau_max: f64,
}

#[derive(Debug, Clone)]
struct RuleBlock {
    start: f64,
    width: f64,
    /// Per panel, per Kronrod node: weight·J·coth and weight·J.
    noise: Vec<[f64; 15]>,
    dissipation: Vec<[f64; 15]>,
}

/// Exact sin/cos resynchronisation interval of the phase recurrence.
const RESYNC_PANELS: usize = 32;

impl KernelRule {
    pub fn new(bath: &BathParameters, tau_max: f64) -> Result<Self> {
        bath.validate()?;
        check_tau(tau_max)?;
        let omega_max = FREQUENCY_CUTOFF_FACTOR * bath.cutoff;
        let oscillation = if tau_max > 0.0 {
            std::f64::consts::PI / tau_max
        } else {
            f64::INFINITY
        };
        let smooth = oscillation.min(bath.cutoff);
        let mut spans = Vec::new();
        if bath.temperature == 0.0 {
            spans.push((0.0, omega_max, smooth));
        } else {
            // Above 40kT the thermal factor is 1 to machine precision and the
            // coth poles are far from every panel.
            let kt = bath.thermal_frequency();
            let split = (40.0 * kt).min(omega_max);
            spans.push((0.0, split, smooth.min(2.0 * std::f64::consts::PI * kt)));
            if split < omega_max {
                spans.push((split, omega_max, smooth.min(split)));
            }
        }
        let mut blocks = Vec::with_capacity(spans.len());
        for (a, b, h_max) in spans {
            let n = ((b - a) / h_max).ceil().max(1.0);
            if n > 5e6 {
                return Err(Error::Quadrature(format!("kernel rule would need {n:e} panels")));
            }
            let n = n as usize;
            let width = (b - a) / n as f64;
            let mut noise = Vec::with_capacity(n);
            let mut dissipation = Vec::with_capacity(n);
            for k in 0..n {
                let center = a + (k as f64 + 0.5) * width;
                let mut wn = [0.0; 15];
                let mut wd = [0.0; 15];
                for (i, (x, w)) in rule_nodes().enumerate() {
                    let omega = center + 0.5 * width * x;
                    let weight = 0.5 * width * w;
                    wn[i] = weight * thermal_spectral_density(omega, bath);
                    wd[i] = weight * spectral_density_unchecked(omega, bath);
                }
                noise.push(wn);
                dissipation.push(wd);
            }
            blocks.push(RuleBlock {
                start: a,
                width,
                noise,
                dissipation,
            });
        }
        Ok(Self { blocks, tau_max })
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    /// (κ(τ), μ(τ)) for 0 ≤ τ ≤ τ_max.
    pub fn kernels(&self, tau: f64) -> Result<(f64, f64)> {
        check_tau(tau)?;
        if tau > self.tau_max * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "lag {tau:e} beyond the rule's range {:e}",
                self.tau_max
            )));
        }
        let (mut kappa, mut mu) = (0.0, 0.0);
        for block in &self.blocks {
            let offsets: Vec<Complex64> = rule_nodes()
                .map(|(x, _)| Complex64::from_polar(1.0, 0.5 * block.width * x * tau))
                .collect();
            let step = Complex64::from_polar(1.0, block.width * tau);
            let mut phase = Complex64::new(1.0, 0.0);
            for (k, (wn, wd)) in block.noise.iter().zip(&block.dissipation).enumerate() {
                if k % RESYNC_PANELS == 0 {
                    phase = Complex64::from_polar(1.0, (block.start + (k as f64 + 0.5) * block.width) * tau);
                }
                for i in 0..15 {
                    let z = phase * offsets[i];
                    kappa += wn[i] * z.re;
                    mu += wd[i] * z.im;
                }
                phase *= step;
            }
        }
        Ok((2.0 * kappa, 2.0 * mu))
    }
}

/// The 15 Kronrod abscissae on [−1, 1] with their weights.
fn rule_nodes() -> impl Iterator<Item = (f64, f64)> {
    (0..15).map(|i| match i {
        0..=6 => (-XGK[i], WGK[i]),
        7 => (0.0, WGK[7]),
        _ => (XGK[14 - i], WGK[14 - i]),
    })
}

/// Cumulative `Δ(t) = ∫₀ᵗ κ(τ)cos(Ωτ)dτ` and `γ(t) = ∫₀ᵗ μ(τ)sin(Ωτ)dτ`.
///
/// Each grid interval is integrated adaptively with initial panels no wider
/// than min(π/4Ω, π/4Λ); intervals are evaluated in parallel and summed in
/// order.
pub fn transient_coefficients(bath: &BathParameters, times: &[f64]) -> Result<TransientCoefficients> {
    bath.validate()?;
    check_time_grid(times)?;
    let omega = bath.system_frequency;
    let panel = (std::f64::consts::PI / (4.0 * omega)).min(std::f64::consts::PI / (4.0 * bath.cutoff));
    let opts = QuadOptions {
        rel_tol: QUADRATURE_TOL,
        abs_tol_scaled: QUADRATURE_TOL,
        max_panel_width: panel,
        ..QuadOptions::default()
    };

    let rule = KernelRule::new(bath, *times.last().expect("grid checked non-empty"))?;

    let mut edges = Vec::with_capacity(times.len() + 1);
    edges.push(0.0);
    edges.extend(times.iter().copied().filter(|&t| t > 0.0));
    let pieces: Vec<(f64, f64)> = edges
        .windows(2)
        .map(|w| (w[0], w[1]))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(a, b)| -> Result<(f64, f64)> {
            // Lags are inside the rule's range by construction; a failure
            // would surface as NaN and stop the quadrature.
            let d = integrate(
                |tau| rule.kernels(tau).map_or(f64::NAN, |k| k.0) * (omega * tau).cos(),
                a,
                b,
                &opts,
            )?;
            let g = integrate(
                |tau| rule.kernels(tau).map_or(f64::NAN, |k| k.1) * (omega * tau).sin(),
                a,
                b,
                &opts,
            )?;
            Ok((d.value, g.value))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut delta = Vec::with_capacity(times.len());
    let mut gamma = Vec::with_capacity(times.len());
    let (mut d_acc, mut g_acc) = (0.0, 0.0);
    let mut piece = pieces.iter();
    for &t in times {
        if t > 0.0 {
            let (d, g) = piece.next().expect("one piece per positive grid time");
            d_acc += d;
            g_acc += g;
        }
        delta.push(d_acc);
        gamma.push(g_acc);
    }
    Ok(TransientCoefficients {
        times: times.to_vec(),
        delta,
        gamma,
    })
}
