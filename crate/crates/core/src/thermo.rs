//! Entropy bookkeeping and the thermodynamic checks on trajectories.

use crate::dynamics::{GibbsState, Trajectory};
use crate::qmath::{binary_entropy, distillable_coherence, mixedness, von_neumann_entropy, DensityMatrix};
use crate::{Error, Result};

/// Tolerance of the second-law check on ΔS.
pub const SECOND_LAW_TOL: f64 = 1e-12;

/// Per-sample thermodynamic series along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoSeries {
    pub times: Vec<f64>,
    pub entropy: Vec<f64>,
    /// S(t) − S(t₀).
    pub entropy_change: Vec<f64>,
    pub distillable_coherence: Vec<f64>,
    pub mixedness: Vec<f64>,
    /// δQ/dt in s⁻² (energy per time with ħ = 1).
    pub heat_rate: Vec<f64>,
}

impl ThermoSeries {
    pub fn from_trajectory(trajectory: &Trajectory, system_frequency: f64) -> Self {
        let entropy: Vec<f64> = trajectory.states.iter().map(von_neumann_entropy).collect();
        let s0 = entropy.first().copied().unwrap_or(0.0);
        Self {
            times: trajectory.times.clone(),
            entropy_change: entropy.iter().map(|s| s - s0).collect(),
            entropy,
            distillable_coherence: trajectory.states.iter().map(distillable_coherence).collect(),
            mixedness: trajectory.states.iter().map(mixedness).collect(),
            heat_rate: heat_rate(trajectory, system_frequency),
        }
    }
}

/// Radicand of the closed-form eigenvalues,
/// (1 − η²(2 − η² − (2n̄+1)²))/(2n̄+1)².
pub fn entropy_radicand(eta: f64, occupation: f64) -> f64 {
    let s2 = (2.0 * occupation + 1.0).powi(2);
    (1.0 - eta * eta * (2.0 - eta * eta - s2)) / s2
}

/// S(η, n̄) of the pipeline state, in bits.
pub fn entropy_closed_form(eta: f64, occupation: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("eta must lie in [0, 1], got {eta}")));
    }
    if !(occupation >= 0.0 && occupation.is_finite()) {
        return Err(Error::Domain(format!("occupation must be finite and >= 0, got {occupation}")));
    }
    let radicand = entropy_radicand(eta, occupation);
    if radicand > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("eigenvalue radicand {radicand} exceeds 1")));
    }
    let root = radicand.clamp(0.0, 1.0).sqrt();
    Ok(binary_entropy(0.5 - 0.5 * root))
}

/// S(t → ∞) = h(n̄/(2n̄+1)).
pub fn asymptotic_entropy(occupation: f64) -> f64 {
    let s = 2.0 * occupation + 1.0;
    // Matches entropy_closed_form(0, n̄): eigenvalues ½ ± 1/(2s).
    binary_entropy(0.5 - 0.5 / s)
}

/// S_rem = 1 − S(t → ∞).
pub fn remained_entropy(occupation: f64) -> f64 {
    1.0 - asymptotic_entropy(occupation)
}

/// −Tr[(ρt − ρ0) log₂ ξ] for the diagonal fixed point ξ.
pub fn hatano_sasa_bound(rho0: &DensityMatrix, rho_t: &DensityMatrix, fixed_point: &GibbsState) -> Result<f64> {
    let (g0, g1) = fixed_point.matrix.populations();
    if g0 <= 0.0 || g1 <= 0.0 {
        return Err(Error::Support(
            "fixed point has a zero eigenvalue; the Hatano-Sasa bound is undefined".into(),
        ));
    }
    let (a0, a1) = rho0.populations();
    let (b0, b1) = rho_t.populations();
    Ok(-((b0 - a0) * g0.log2() + (b1 - a1) * g1.log2()))
}

/// Outcome of [`second_law_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondLawReport {
    pub passed: bool,
    pub first_violation: Option<usize>,
    /// Smallest ΔS seen.
    pub min_entropy_change: f64,
}

/// ΔS(t) = S(t) − S(t₀) ≥ −1e−12 at every sample.
pub fn second_law_check(trajectory: &Trajectory) -> SecondLawReport {
    let entropy: Vec<f64> = trajectory.states.iter().map(von_neumann_entropy).collect();
    let s0 = entropy.first().copied().unwrap_or(0.0);
    let mut first_violation = None;
    let mut min_change = 0.0f64;
    for (i, s) in entropy.iter().enumerate() {
        let ds = s - s0;
        min_change = min_change.min(ds);
        if ds < -SECOND_LAW_TOL && first_violation.is_none() {
            first_violation = Some(i);
        }
    }
    SecondLawReport {
        passed: first_violation.is_none(),
        first_violation,
        min_entropy_change: min_change,
    }
}

/// Stationary second moments in the two-level truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratures {
    /// ⟨X²⟩ in units of Ω⁻¹.
    pub position: f64,
    /// ⟨P²⟩ in units of Ω.
    pub momentum: f64,
}

/// ⟨X²⟩ = 1/2Ω, ⟨P²⟩ = Ω/2.
///
/// With a = |0⟩⟨1| both X² = (aa†+a†a)/2Ω and P² = Ω(aa†+a†a)/2 are
/// multiples of the identity, so the moments do not depend on the state.
pub fn quadratures(system_frequency: f64) -> Quadratures {
    Quadratures {
        position: 1.0 / (2.0 * system_frequency),
        momentum: system_frequency / 2.0,
    }
}

/// U = ⟨P²⟩/2 + Ω²⟨X²⟩/2.
pub fn internal_energy(system_frequency: f64) -> f64 {
    let q = quadratures(system_frequency);
    0.5 * q.momentum + 0.5 * system_frequency * system_frequency * q.position
}

/// δQ/dt = Ω²/2 ∂ₜ⟨X²⟩ + ½ ∂ₜ⟨P²⟩ by finite differences along the grid.
pub fn heat_rate(trajectory: &Trajectory, system_frequency: f64) -> Vec<f64> {
    let n = trajectory.len();
    let moments: Vec<Quadratures> = (0..n).map(|_| quadratures(system_frequency)).collect();
    let w = 0.5 * system_frequency * system_frequency;
    let energy_like = |q: &Quadratures| w * q.position + 0.5 * q.momentum;
    (0..n)
        .map(|i| {
            if n < 2 {
                return 0.0;
            }
            let (lo, hi) = if i == 0 {
                (0, 1)
            } else if i == n - 1 {
                (n - 2, n - 1)
            } else {
                (i - 1, i + 1)
            };
            let dt = trajectory.times[hi] - trajectory.times[lo];
            (energy_like(&moments[hi]) - energy_like(&moments[lo])) / dt
        })
        .collect()
}
