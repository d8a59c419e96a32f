//! Two-level Lindblad dynamics with lowering operator a = |0⟩⟨1|.
//!
//! The generator is
//!
//! ```text
//! dρ/dt = −(Δ+γ)/2 [a†aρ − 2aρa† + ρa†a] − (Δ−γ)/2 [aa†ρ − 2a†ρa + ρaa†]
//! ```
//!
//! In the Markov limit Δ = Γ(2n̄+1), γ = Γ, so the prefactors become Γ(n̄+1)
//! and Γn̄. Coherences decay with η = e^{−Γt(2n̄+1)} and populations with η².

use num_complex::Complex64;

use crate::bath::{check_time_grid, MarkovParameters, TransientCoefficients};
use crate::qmath::{eigenvalues2, mat2, DensityMatrix, Mat2};
use crate::{Error, Result};

/// Largest allowed RK4 step in units of 1/(Δ+γ).
pub const MAX_STEP_FACTOR: f64 = 0.01;
/// Default RK4 step in units of 1/(Δ+γ).
pub const DEFAULT_STEP_FACTOR: f64 = 0.005;
/// Trajectory states may dip this far below zero before integration fails.
pub const TRAJECTORY_PSD_TOL: f64 = 1e-9;
/// Largest accepted trace drift over a trajectory, before renormalisation.
pub const TRAJECTORY_TRACE_TOL: f64 = 1e-9;
/// Underflow threshold for η.
pub const ETA_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladCoefficients {
    /// Δ in s⁻¹.
    pub delta: f64,
    /// γ in s⁻¹.
    pub gamma: f64,
}

impl LindbladCoefficients {
    pub const ZERO: Self = Self {
        delta: 0.0,
        gamma: 0.0,
    };

    pub fn new(delta: f64, gamma: f64) -> Self {
        Self { delta, gamma }
    }

    /// Δ = Γ(2n̄+1), γ = Γ.
    pub fn from_markov(m: &MarkovParameters) -> Self {
        Self {
            delta: m.rate * (2.0 * m.occupation + 1.0),
            gamma: m.rate,
        }
    }

    /// Δ ± γ ≥ 0.
    pub fn is_lindblad_type(&self) -> bool {
        self.delta + self.gamma >= 0.0 && self.delta - self.gamma >= 0.0
    }

    /// Δ + γ, the quantity the step-size bound is expressed in.
    pub fn total_rate(&self) -> f64 {
        self.delta + self.gamma
    }

    /// Largest step allowed by the accuracy bound; infinite when Δ+γ ≤ 0.
    pub fn max_step(&self) -> f64 {
        let rate = self.total_rate().abs();
        if rate == 0.0 {
            f64::INFINITY
        } else {
            MAX_STEP_FACTOR / rate
        }
    }

    pub fn default_step(&self) -> f64 {
        let rate = self.total_rate().abs();
        if rate == 0.0 {
            f64::INFINITY
        } else {
            DEFAULT_STEP_FACTOR / rate
        }
    }
}

/// Time-indexed supply of generator coefficients.
pub trait CoefficientSource {
    fn coefficients_at(&self, t: f64) -> LindbladCoefficients;
}

impl CoefficientSource for LindbladCoefficients {
    fn coefficients_at(&self, _t: f64) -> LindbladCoefficients {
        *self
    }
}

impl CoefficientSource for MarkovParameters {
    fn coefficients_at(&self, _t: f64) -> LindbladCoefficients {
        LindbladCoefficients::from_markov(self)
    }
}

impl CoefficientSource for TransientCoefficients {
    fn coefficients_at(&self, t: f64) -> LindbladCoefficients {
        let (delta, gamma) = self.interpolate(t);
        LindbladCoefficients { delta, gamma }
    }
}

fn lowering() -> Mat2 {
    mat2::from_real([[0.0, 1.0], [0.0, 0.0]])
}

/// Generator applied to an arbitrary 2×2 matrix (RK4 stages are not states).
pub(crate) fn apply_generator(rho: &Mat2, c: &LindbladCoefficients) -> Mat2 {
    let a = lowering();
    let ad = mat2::dagger(&a);
    let n = mat2::mul(&ad, &a); // a†a = |1⟩⟨1|
    let m = mat2::mul(&a, &ad); // aa† = |0⟩⟨0|

    let down = mat2::add(
        &mat2::sub(&mat2::mul(&n, rho), &mat2::scale(&mat2::mul(&mat2::mul(&a, rho), &ad), 2.0)),
        &mat2::mul(rho, &n),
    );
    let up = mat2::add(
        &mat2::sub(&mat2::mul(&m, rho), &mat2::scale(&mat2::mul(&mat2::mul(&ad, rho), &a), 2.0)),
        &mat2::mul(rho, &m),
    );
    mat2::add(
        &mat2::scale(&down, -0.5 * (c.delta + c.gamma)),
        &mat2::scale(&up, -0.5 * (c.delta - c.gamma)),
    )
}

/// dρ/dt for the given coefficients.
pub fn lindblad_rhs(rho: &DensityMatrix, coeffs: &LindbladCoefficients) -> Mat2 {
    apply_generator(rho.elements(), coeffs)
}

/// Time-ordered states.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Largest |Tr ρ − 1| observed before renormalisation.
    pub trace_drift: f64,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::Domain(format!(
                "trajectory has {} times but {} states",
                times.len(),
                states.len()
            )));
        }
        check_time_grid(&times)?;
        Ok(Self {
            times,
            states,
            trace_drift: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Keep only the samples at `indices`.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            times: indices.iter().map(|&i| self.times[i]).collect(),
            states: indices.iter().map(|&i| self.states[i]).collect(),
            trace_drift: self.trace_drift,
        }
    }

    /// Same samples in reverse order with re-labelled increasing times.
    pub fn reversed_states(&self) -> Self {
        Self {
            times: self.times.clone(),
            states: self.states.iter().rev().copied().collect(),
            trace_drift: self.trace_drift,
        }
    }
}

/// Subdivide each interval of `times` into equal sub-steps no longer than
/// `max_step`. Returns the fine grid and the index of each original point.
pub fn refine_grid(times: &[f64], max_step: f64) -> Result<(Vec<f64>, Vec<usize>)> {
    check_time_grid(times)?;
    if !(max_step > 0.0) {
        return Err(Error::Domain(format!("max_step must be > 0, got {max_step}")));
    }
    let mut fine = vec![times[0]];
    let mut index = vec![0];
    for w in times.windows(2) {
        let span = w[1] - w[0];
        let n = if max_step.is_finite() {
            (span / max_step).ceil().max(1.0) as usize
        } else {
            1
        };
        for k in 1..n {
            fine.push(w[0] + span * (k as f64) / (n as f64));
        }
        fine.push(w[1]);
        index.push(fine.len() - 1);
    }
    Ok((fine, index))
}

/// Uniform grid from 0 to `span` at the default step for `coeffs`.
pub fn default_grid(coeffs: &LindbladCoefficients, span: f64) -> Vec<f64> {
    let h = coeffs.default_step();
    let n = if h.is_finite() {
        (span / h).ceil().max(1.0) as usize
    } else {
        1
    };
    (0..=n).map(|k| span * (k as f64) / (n as f64)).collect()
}

/// Classical fixed-step RK4 on the given grid.
///
/// Each step is hermitized and checked for positivity; the trace drift is
/// recorded and the states are renormalised at the end.
pub fn evolve_rk4<S: CoefficientSource + ?Sized>(
    rho0: &DensityMatrix,
    source: &S,
    times: &[f64],
) -> Result<Trajectory> {
    check_time_grid(times)?;
    let mut raw: Vec<Mat2> = Vec::with_capacity(times.len());
    raw.push(*rho0.elements());
    let mut drift = (rho0.trace() - 1.0).abs();

    for w in times.windows(2) {
        let (t, h) = (w[0], w[1] - w[0]);
        let c1 = source.coefficients_at(t);
        let c2 = source.coefficients_at(t + 0.5 * h);
        let c3 = source.coefficients_at(t + h);
        for (c, at) in [(c1, t), (c2, t + 0.5 * h), (c3, t + h)] {
            let bound = c.max_step();
            if h > bound {
                return Err(Error::StepSize {
                    step: h,
                    bound,
                    time: at,
                });
            }
        }
        let y = raw.last().expect("trajectory starts non-empty");
        let k1 = apply_generator(y, &c1);
        let k2 = apply_generator(&mat2::add(y, &mat2::scale(&k1, 0.5 * h)), &c2);
        let k3 = apply_generator(&mat2::add(y, &mat2::scale(&k2, 0.5 * h)), &c2);
        let k4 = apply_generator(&mat2::add(y, &mat2::scale(&k3, h)), &c3);
        let incr = mat2::add(&mat2::add(&k1, &mat2::scale(&k2, 2.0)), &mat2::add(&mat2::scale(&k3, 2.0), &k4));
        let next = mat2::hermitize(&mat2::add(y, &mat2::scale(&incr, h / 6.0)));

        let trace = next[0][0].re + next[1][1].re;
        drift = drift.max((trace - 1.0).abs());
        let normalized = mat2::scale(&next, 1.0 / trace);
        let probe = DensityMatrix::with_tolerance(normalized, f64::INFINITY, f64::INFINITY)?;
        let (_, low) = eigenvalues2(&probe);
        if low < -TRAJECTORY_PSD_TOL {
            return Err(Error::Positivity {
                min_eigenvalue: low,
                tolerance: TRAJECTORY_PSD_TOL,
            });
        }
        raw.push(next);
    }

    if drift > TRAJECTORY_TRACE_TOL {
        return Err(Error::Trace {
            deviation: drift,
            tolerance: TRAJECTORY_TRACE_TOL,
        });
    }
    let states = raw
        .iter()
        .map(|m| {
            let tr = m[0][0].re + m[1][1].re;
            DensityMatrix::with_tolerance(mat2::scale(m, 1.0 / tr), crate::qmath::TRACE_TOL, TRAJECTORY_PSD_TOL)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        trace_drift: drift,
    })
}

/// η = e^{−Γt(2n̄+1)}, flushed to 0 below [`ETA_FLOOR`].
pub fn decoherence_factor(markov: &MarkovParameters, t: f64) -> f64 {
    let eta = (-markov.decoherence_rate() * t).exp();
    if eta < ETA_FLOOR {
        0.0
    } else {
        eta
    }
}

/// Closed-form Markov propagator: coherences scale by η, the excited
/// population relaxes as ρ₁₁^∞ + (ρ₁₁(0) − ρ₁₁^∞)η².
pub fn evolve_analytic(rho0: &DensityMatrix, markov: &MarkovParameters, t: f64) -> Result<DensityMatrix> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("evolution time must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(*rho0);
    }
    let eta = decoherence_factor(markov, t);
    let n = markov.occupation;
    let excited_inf = n / (2.0 * n + 1.0);
    let (_, excited0) = rho0.populations();
    let excited = excited_inf + (excited0 - excited_inf) * (eta * eta);
    let ground = 1.0 - excited;
    let c = rho0.coherence() * eta;
    DensityMatrix::new([
        [Complex64::new(ground, 0.0), c],
        [c.conj(), Complex64::new(excited, 0.0)],
    ])
}

/// Gibbs fixed point diag((n̄+1)/(2n̄+1), n̄/(2n̄+1)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsState {
    pub occupation: f64,
    pub matrix: DensityMatrix,
}

impl GibbsState {
    /// β = ln(1 + 1/n̄)/Ω in s (ħ = 1), for level spacing Ω; infinite at n̄ = 0.
    pub fn inverse_temperature(&self, system_frequency: f64) -> f64 {
        if self.occupation == 0.0 {
            f64::INFINITY
        } else {
            (1.0 / self.occupation).ln_1p() / system_frequency
        }
    }

    /// F = −β⁻¹ ln(1 + e^{−βΩ}) for levels {0, Ω}; zero at n̄ = 0.
    pub fn free_energy(&self, system_frequency: f64) -> f64 {
        let n = self.occupation;
        if n == 0.0 {
            return 0.0;
        }
        let beta = self.inverse_temperature(system_frequency);
        -((2.0 * n + 1.0) / (n + 1.0)).ln() / beta
    }
}

pub fn gibbs_state(occupation: f64) -> Result<GibbsState> {
    if !(occupation >= 0.0 && occupation.is_finite()) {
        return Err(Error::Domain(format!("occupation must be finite and >= 0, got {occupation}")));
    }
    let excited = occupation / (2.0 * occupation + 1.0);
    let matrix = DensityMatrix::new(mat2::from_real([[1.0 - excited, 0.0], [0.0, excited]]))?;
    Ok(GibbsState { occupation, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::mixedness;
    use approx::assert_abs_diff_eq;

    fn after_bs1(phi: f64) -> DensityMatrix {
        let c = Complex64::new(phi.sin(), -phi.cos()) * 0.5;
        DensityMatrix::new([[Complex64::new(0.5, 0.0), c], [c.conj(), Complex64::new(0.5, 0.0)]]).unwrap()
    }

    fn markov(rate: f64, n: f64) -> MarkovParameters {
        MarkovParameters::new(rate, n).unwrap()
    }

    #[test]
    fn markov_mapping_identities() {
        for (g, n) in [(1.0, 0.0), (2.5e9, 12.6), (1e8, 0.1)] {
            let c = LindbladCoefficients::from_markov(&markov(g, n));
            let scale = g * (n + 1.0);
            assert!(((c.delta + c.gamma) - 2.0 * g * (n + 1.0)).abs() <= 1e-12 * scale);
            assert!(((c.delta - c.gamma) - 2.0 * g * n).abs() <= 1e-12 * scale);
            assert!(c.is_lindblad_type());
        }
        assert!(!LindbladCoefficients::new(1.0, 2.0).is_lindblad_type());
    }

    #[test]
    fn rhs_zero_coefficients_and_fixed_point() {
        let rho = after_bs1(0.3);
        assert_eq!(mat2::max_abs(&lindblad_rhs(&rho, &LindbladCoefficients::ZERO)), 0.0);
        for n in [0.0, 0.1, 1.0, 12.6] {
            let g = 3e9;
            let gibbs = gibbs_state(n).unwrap();
            let d = lindblad_rhs(&gibbs.matrix, &LindbladCoefficients::from_markov(&markov(g, n)));
            assert!(mat2::max_abs(&d) <= 1e-14 * g, "n = {n}: {:e}", mat2::max_abs(&d));
        }
    }

    #[test]
    fn rhs_is_traceless_and_hermitian() {
        let rho = after_bs1(1.1);
        let d = lindblad_rhs(&rho, &LindbladCoefficients::new(3.0, 1.0));
        assert!(mat2::trace(&d).norm() < 1e-14);
        assert!((d[0][1] - d[1][0].conj()).norm() < 1e-14);
    }

    #[test]
    fn rhs_matches_finite_difference_of_analytic_map() {
        let m = markov(2.0, 0.7);
        let rho = after_bs1(0.4);
        let d = lindblad_rhs(&rho, &LindbladCoefficients::from_markov(&m));
        let h = 1e-6;
        let plus = evolve_analytic(&rho, &m, 2.0 * h).unwrap();
        let mid = evolve_analytic(&rho, &m, h).unwrap();
        // Second-order one-sided difference: (−3f(0) + 4f(h) − f(2h)) / 2h.
        #[allow(clippy::needless_range_loop)]
        for i in 0..2 {
            for j in 0..2 {
                let fd = (rho.get(i, j) * -3.0 + mid.get(i, j) * 4.0 - plus.get(i, j)) / (2.0 * h);
                assert!((fd - d[i][j]).norm() < 1e-8, "({i},{j}) {fd} vs {}", d[i][j]);
            }
        }
        // Coherence rate −Γ(2n̄+1).
        assert!((d[0][1] + rho.get(0, 1) * m.decoherence_rate()).norm() < 1e-15);
    }

    #[test]
    fn analytic_examples() {
        let m = markov(1.3, 0.8);
        let rho0 = after_bs1(0.9);
        assert_eq!(evolve_analytic(&rho0, &m, 0.0).unwrap(), rho0);
        let t = 0.37;
        let eta = decoherence_factor(&m, t);
        let n = m.occupation;
        let s = 2.0 * n + 1.0;
        let out = evolve_analytic(&rho0, &m, t).unwrap();
        assert_abs_diff_eq!(out.get(0, 0).re, (2.0 * (n + 1.0) - eta * eta) / (2.0 * s), epsilon = 1e-14);
        assert_abs_diff_eq!(out.get(1, 1).re, (2.0 * n + eta * eta) / (2.0 * s), epsilon = 1e-14);
        let expect01 = Complex64::new(0.0, -0.5) * eta * Complex64::from_polar(1.0, 0.9);
        assert!((out.get(0, 1) - expect01).norm() < 1e-14);
        let late = evolve_analytic(&rho0, &m, 1e6).unwrap();
        assert_eq!(late, gibbs_state(n).unwrap().matrix);
        assert!(evolve_analytic(&rho0, &m, -1.0).is_err());
    }

    #[test]
    fn decoherence_factor_examples() {
        assert_eq!(decoherence_factor(&markov(5.0, 3.0), 0.0), 1.0);
        let m = markov(std::f64::consts::LN_2, 0.0);
        assert_abs_diff_eq!(decoherence_factor(&m, 1.0), 0.5, epsilon = 1e-16);
        assert_eq!(decoherence_factor(&markov(9.901e9, 12.60), 1.5e-8), 0.0);
    }

    #[test]
    fn gibbs_examples() {
        let g0 = gibbs_state(0.0).unwrap();
        assert_eq!(g0.matrix.populations(), (1.0, 0.0));
        let g1 = gibbs_state(1.0).unwrap();
        assert_abs_diff_eq!(g1.matrix.populations().0, 2.0 / 3.0, epsilon = 2e-16);
        assert_abs_diff_eq!(g1.matrix.populations().1, 1.0 / 3.0, epsilon = 2e-16);
        let ghot = gibbs_state(1e6).unwrap();
        assert_abs_diff_eq!(ghot.matrix.populations().0, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(mixedness(&ghot.matrix), 0.5, epsilon = 1e-6);
        assert!(gibbs_state(-1.0).is_err());
    }

    #[test]
    fn gibbs_weights_are_boltzmann() {
        let omega = 1e12;
        let g = gibbs_state(0.6).unwrap();
        let beta = g.inverse_temperature(omega);
        let f = g.free_energy(omega);
        let (p0, p1) = g.matrix.populations();
        assert_abs_diff_eq!(p0, (-beta * (0.0 - f)).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(p1, (-beta * (omega - f)).exp(), epsilon = 1e-14);
    }

    #[test]
    fn rk4_constant_for_zero_generator_and_gibbs() {
        let rho0 = after_bs1(0.2);
        let times: Vec<f64> = (0..50).map(|k| k as f64).collect();
        let traj = evolve_rk4(&rho0, &LindbladCoefficients::ZERO, &times).unwrap();
        assert!(traj.states.iter().all(|s| *s == rho0));

        let m = markov(2.0, 1.5);
        let c = LindbladCoefficients::from_markov(&m);
        let grid = default_grid(&c, 5.0 / m.decoherence_rate());
        let g = gibbs_state(1.5).unwrap().matrix;
        let traj = evolve_rk4(&g, &c, &grid).unwrap();
        for s in &traj.states {
            assert!(mat2::max_abs(&mat2::sub(s.elements(), g.elements())) < 1e-10);
        }
    }

    #[test]
    fn rk4_rejects_coarse_steps() {
        let c = LindbladCoefficients::new(10.0, 10.0);
        let err = evolve_rk4(&after_bs1(0.0), &c, &[0.0, 0.1]).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. }));
    }

    #[test]
    fn rk4_follows_transient_coefficients() {
        // Linearly ramped coefficients must still preserve trace and positivity.
        let tc = TransientCoefficients {
            times: vec![0.0, 1.0, 2.0],
            delta: vec![0.0, 3.0, 3.0],
            gamma: vec![0.0, 1.0, 1.0],
        };
        let grid: Vec<f64> = (0..=1000).map(|k| 2.0 * k as f64 / 1000.0).collect();
        let traj = evolve_rk4(&after_bs1(0.5), &tc, &grid).unwrap();
        assert!(traj.trace_drift < 1e-12);
        for s in &traj.states {
            assert!(eigenvalues2(s).1 >= -1e-12);
        }
    }

    #[test]
    fn refine_grid_keeps_original_points() {
        let (fine, idx) = refine_grid(&[0.0, 1.0, 1.5], 0.2).unwrap();
        assert_eq!(idx, vec![0, 5, 8]);
        assert_eq!(fine[5], 1.0);
        assert_eq!(*fine.last().unwrap(), 1.5);
        assert!(fine.windows(2).all(|w| w[1] - w[0] <= 0.2 + 1e-15));
    }
}
