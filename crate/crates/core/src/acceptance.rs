//! The acceptance suite run by `mzbath selftest`.
//!
//! Every check draws its random inputs from its own ChaCha8 stream seeded by
//! `seed + id`, so a criterion's outcome does not depend on which other
//! criteria ran. Tolerances are multiplied by `tolerance_scale` (1 in normal
//! runs); exact checks are never scaled.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bath::{
    noise_kernel, dissipation_kernel, spectral_density, transient_coefficients, BathParameters, MarkovParameters,
    FREQUENCY_CUTOFF_FACTOR, K_B_OVER_HBAR,
};
use crate::config::RunConfig;
use crate::dynamics::{
    decoherence_factor, default_grid, evolve_analytic, evolve_rk4, gibbs_state, LindbladCoefficients, Trajectory,
};
use crate::interferometer::{
    detector_probabilities, fringe_visibility, momentum_distribution, momentum_distribution_compositional,
    pipeline_state, prepare_after_bs1, symmetric_grid, InterferometerConfig,
};
use crate::output::{Cell, CsvDocument};
use crate::qmath::{distillable_coherence, mat2, mixedness, relative_entropy, von_neumann_entropy, DensityMatrix};
use crate::thermo::{
    asymptotic_entropy, entropy_closed_form, hatano_sasa_bound, heat_rate, quadratures, second_law_check,
};
use crate::Result;

pub const DEFAULT_SEED: u64 = 20240601;
pub const RANDOM_DRAWS: usize = 1000;

const PHASES: [f64; 3] = [0.0, FRAC_PI_4, FRAC_PI_2];
const OCCUPATIONS: [f64; 3] = [0.1, 1.0, 12.6];
/// Γ over three decades, s⁻¹.
const RATES: [f64; 3] = [1e8, 3.1622776601683795e9, 1e11];
const SYSTEM_FREQUENCY: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub tolerance_scale: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            tolerance_scale: 1.0,
        }
    }
}

impl SuiteOptions {
    fn tol(&self, t: f64) -> f64 {
        t * self.tolerance_scale
    }

    fn rng(&self, id: u32) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(u64::from(id)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value of the criterion's main metric.
    pub metric: f64,
    pub detail: String,
}

impl CriterionOutcome {
    fn new(id: u32, name: &'static str, passed: bool, metric: f64, detail: String) -> Self {
        Self {
            id,
            name,
            passed,
            metric,
            detail,
        }
    }

    fn failed(id: u32, name: &'static str, err: crate::Error) -> Self {
        Self::new(id, name, false, f64::NAN, format!("error: {err}"))
    }

    /// One table line, `[PASS]`/`[FAIL]` first.
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

fn outcome(id: u32, name: &'static str, r: Result<CriterionOutcome>) -> CriterionOutcome {
    r.unwrap_or_else(|e| CriterionOutcome::failed(id, name, e))
}

fn markov(rate: f64, n: f64) -> Result<MarkovParameters> {
    MarkovParameters::new(rate, n)
}

fn combos() -> Vec<(f64, f64, f64)> {
    let mut v = Vec::with_capacity(27);
    for &phi in &PHASES {
        for &n in &OCCUPATIONS {
            for &g in &RATES {
                v.push((phi, n, g));
            }
        }
    }
    v
}

/// RK4 from the post-BS1 state over `span` decoherence times.
fn rk4_run(phi: f64, n: f64, rate: f64, span: f64) -> Result<(Trajectory, MarkovParameters)> {
    let m = markov(rate, n)?;
    let coeffs = LindbladCoefficients::from_markov(&m);
    let times = default_grid(&coeffs, span / m.decoherence_rate());
    Ok((evolve_rk4(&prepare_after_bs1(phi), &m, &times)?, m))
}

fn max_analytic_error(traj: &Trajectory, m: &MarkovParameters, phi: f64) -> Result<f64> {
    let rho0 = prepare_after_bs1(phi);
    let mut worst = 0.0f64;
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let exact = evolve_analytic(&rho0, m, *t)?;
        worst = worst.max(mat2::max_abs(&mat2::sub(rho.elements(), exact.elements())));
    }
    Ok(worst)
}

fn random_state(rng: &mut ChaCha8Rng, max_radius: f64) -> DensityMatrix {
    let cos_t: f64 = rng.random_range(-1.0..=1.0);
    let az: f64 = rng.random_range(0.0..2.0 * PI);
    let r = max_radius * rng.random::<f64>().cbrt();
    let sin_t = (1.0 - cos_t * cos_t).sqrt();
    let (x, y, z) = (r * sin_t * az.cos(), r * sin_t * az.sin(), r * cos_t);
    DensityMatrix::new([
        [Complex64::new(0.5 * (1.0 + z), 0.0), Complex64::new(0.5 * x, -0.5 * y)],
        [Complex64::new(0.5 * x, 0.5 * y), Complex64::new(0.5 * (1.0 - z), 0.0)],
    ])
    .expect("Bloch ball states are valid")
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.random_range(lo.log10()..hi.log10()))
}

/// Von Neumann entropy from nalgebra's Hermitian eigensolver.
pub fn oracle_entropy(rho: &DensityMatrix) -> f64 {
    let m = rho.elements();
    let a = Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1]);
    a.symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|&l| if l > 0.0 { -l * l.log2() } else { 0.0 })
        .sum()
}

pub fn criterion_1(opts: &SuiteOptions) -> CriterionOutcome {
    const NAME: &str = "RK4 vs closed form";
    let tol = opts.tol(1e-8);
    let run = || -> Result<CriterionOutcome> {
        let mut worst = 0.0f64;
        let mut slowest = Duration::ZERO;
        for (phi, n, g) in combos() {
            let start = Instant::now();
            let (traj, m) = rk4_run(phi, n, g, 5.0)?;
            worst = worst.max(max_analytic_error(&traj, &m, phi)?);
            slowest = slowest.max(start.elapsed());
        }
        let passed = worst <= tol && slowest < Duration::from_secs(1);
        Ok(CriterionOutcome::new(
            1,
            NAME,
            passed,
            worst,
            format!("max |err| = {worst:.3e} (tol {tol:.0e}), slowest combo {:.3} s", slowest.as_secs_f64()),
        ))
    };
    outcome(1, NAME, run())
}

pub fn criterion_2(opts: &SuiteOptions) -> CriterionOutcome {
    const NAME: &str = "entropy closed form";
    let tol = opts.tol(1e-12);
    let mut rng = opts.rng(2);
    let mut run = || -> Result<CriterionOutcome> {
        let mut worst = 0.0f64;
        for _ in 0..RANDOM_DRAWS {
            let eta_target: f64 = rng.random();
            let n = log_uniform(&mut rng, 1e-2, 1e2);
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            let m = markov(1e8, n)?;
            let t = -eta_target.ln() / m.decoherence_rate();
            let cfg = InterferometerConfig::with_defaults(phi, SYSTEM_FREQUENCY, m);
            let eta = decoherence_factor(&m, t);
            let closed = entropy_closed_form(eta, n)?;
            let oracle = oracle_entropy(&pipeline_state(&cfg, t)?);
            worst = worst.max((closed - oracle).abs());
        }
        Ok(CriterionOutcome::new(
            2,
            NAME,
            worst <= tol,
            worst,
            format!("{RANDOM_DRAWS} draws, max |closed - eigen| = {worst:.3e} (tol {tol:.0e})"),
        ))
    };
    outcome(2, NAME, run())
}

pub fn criterion_3(opts: &SuiteOptions) -> CriterionOutcome {
    const NAME: &str = "second law and plateau";
    let plateau_tol = opts.tol(1e-6);
    let run = || -> Result<CriterionOutcome> {
        let mut min_change = 0.0f64;
        let mut violations = 0usize;
        let mut plateau_err = 0.0f64;
        for (phi, n, g) in combos() {
            // 40 decoherence times: η = e^{-40}, well inside the plateau.
            let (traj, _) = rk4_run(phi, n, g, 40.0)?;
            let report = second_law_check(&traj);
            min_change = min_change.min(report.min_entropy_change);
            violations += usize::from(!report.passed);
            let s_end = von_neumann_entropy(traj.states.last().expect("non-empty"));
            plateau_err = plateau_err.max((s_end - asymptotic_entropy(n)).abs());
        }
        let (hot, _) = rk4_run(FRAC_PI_2, 1e6, 1e8, 40.0)?;
        let s_hot = von_neumann_entropy(hot.states.last().expect("non-empty"));
        let hot_err = (s_hot - 1.0).abs();
        let passed = violations == 0 && plateau_err <= plateau_tol && hot_err <= plateau_tol;
        Ok(CriterionOutcome::new(
            3,
            NAME,
            passed,
            plateau_err.max(hot_err),
            format!(
                "min dS = {min_change:.3e}, {violations} violating runs, plateau err {plateau_err:.3e}, |S - 1| at n=1e6 {hot_err:.3e}"
            ),
        ))
    };
    outcome(3, NAME, run())
}

pub fn criterion_4(opts: &SuiteOptions) -> CriterionOutcome {
    const NAME: &str = "Hatano-Sasa inequality";
    let tol = opts.tol(1e-10);
    let mut rng = opts.rng(4);
    let mut run = || -> Result<CriterionOutcome> {
        let mut worst_margin = f64::INFINITY;
        for _ in 0..RANDOM_DRAWS {
            let rho0 = random_state(&mut rng, 1.0);
            let n = log_uniform(&mut rng, 1e-2, 1e2);
            let m = markov(1.0, n)?;
            let t = rng.random_range(0.0..5.0) / m.decoherence_rate();
            let rho_t = evolve_analytic(&rho0, &m, t)?;
            let ds = von_neumann_entropy(&rho_t) - von_neumann_entropy(&rho0);
            let bound = hatano_sasa_bound(&rho0, &rho_t, &gibbs_state(n)?)?;
            worst_margin = worst_margin.min(ds - bound);
        }
        Ok(CriterionOutcome::new(
            4,
            NAME,
            worst_margin >= -tol,
            worst_margin,
            format!("{RANDOM_DRAWS} draws, min (dS - bound) = {worst_margin:.3e}"),
        ))
    };
    outcome(4, NAME, run())
}

pub fn criterion_5(opts: &SuiteOptions) -> CriterionOutcome {
    const NAME: &str = "contractivity";
    let tol = opts.tol(1e-10);
    let mut rng = opts.rng(5);
    let mut run = || -> Result<CriterionOutcome> {
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..RANDOM_DRAWS {
            let rho = random_state(&mut rng, 1.0);
            let sigma = random_state(&mut rng, 0.99);
            let n = log_uniform(&mut rng, 1e-2, 1e2);
            let m = markov(1.0, n)?;
            let t = rng.random_range(0.0..5.0) / m.decoherence_rate();
            let before = relative_entropy(&rho, &sigma)?;
            let after = relative_entropy(&evolve_analytic(&rho, &m, t)?, &evolve_analytic(&sigma, &m, t)?)?;
            worst = worst.max(after - before);
        }
        Ok(CriterionOutcome::new(
            5,
            NAME,
            worst <= tol,
            worst,
            format!("{RANDOM_DRAWS} pairs, max (after - before) = {worst:.3e}"),
        ))
    };
    outcome(5, NAME, run())
}

pub fn criterion_6(opts: &SuiteOptions) -> CriterionOutcome {
    const NAME: &str = "fringe formula";
    let tol = opts.tol(1e-12);
    let norm_tol = opts.tol(1e-6);
    let mut rng = opts.rng(6);
    let mut run = || -> Result<CriterionOutcome> {
        let mut worst = 0.0f64;
        let mut worst_norm = 0.0f64;
        let mut norm_ok = true;
        for _ in 0..50 {
            let omega = log_uniform(&mut rng, 1e10, 1e13);
            let fringe: f64 = rng.random_range(110.5..400.0);
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            let n = log_uniform(&mut rng, 1e-2, 1e2);
            let m = markov(1e8, n)?;
            let t = rng.random_range(0.0..3.0) / m.decoherence_rate();
            let mut cfg = InterferometerConfig::with_defaults(phi, omega, m);
            cfg.path_difference = (fringe / omega).sqrt();
            let grid = symmetric_grid(8.0 * omega.sqrt(), 1000);
            let closed = momentum_distribution(&cfg, t, &grid)?;
            let comp = momentum_distribution_compositional(&cfg, t, &grid)?;
            // Pointwise error relative to the envelope peak √(1/Ωπ).
            let peak = (1.0 / (omega * PI)).sqrt();
            for (a, b) in closed.density.iter().zip(&comp.density) {
                worst = worst.max((a - b).abs() / peak);
            }
            let norm_err = (closed.trapezoid_integral() - 1.0).abs();
            worst_norm = worst_norm.max(norm_err);
            norm_ok &= norm_err <= norm_tol + (-fringe / 4.0).exp();
        }
        Ok(CriterionOutcome::new(
            6,
            NAME,
            worst <= tol && norm_ok,
            worst,
            format!("50 configs, max pointwise err / peak = {worst:.3e}, max |norm - 1| = {worst_norm:.3e}"),
        ))
    };
    outcome(6, NAME, run())
}

pub fn criterion_7(_opts: &SuiteOptions) -> CriterionOutcome {
    const NAME: &str = "detector limits";
    let run = || -> Result<CriterionOutcome> {
        let mut ok = true;
        for &n in &OCCUPATIONS {
            let m = markov(1e8, n)?;
            let start = InterferometerConfig::with_defaults(0.0, SYSTEM_FREQUENCY, m);
            ok &= detector_probabilities(&pipeline_state(&start, 0.0)?) == (0.0, 1.0);
            for &phi in &PHASES {
                let cfg = InterferometerConfig::with_defaults(phi, SYSTEM_FREQUENCY, m);
                let t = 1e3 / m.decoherence_rate();
                ok &= decoherence_factor(&m, t) == 0.0;
                ok &= detector_probabilities(&pipeline_state(&cfg, t)?) == (0.5, 0.5);
            }
        }
        Ok(CriterionOutcome::new(
            7,
            NAME,
            ok,
            if ok { 0.0 } else { 1.0 },
            "(0, 1) at t = 0, phi = 0 and (1/2, 1/2) at eta = 0, compared exactly".into(),
        ))
    };
    outcome(7, NAME, run())
}

pub fn criterion_8(opts: &SuiteOptions) -> CriterionOutcome {
    const NAME: &str = "residual visibility";
    let tol = opts.tol(1e-12);
    let run = || -> Result<CriterionOutcome> {
        let mut worst = 0.0f64;
        for &n in &[0.0, 0.1, 1.0, 12.6, 1e3] {
            let m = markov(1e8, n)?;
            let late = InterferometerConfig::with_defaults(0.0, SYSTEM_FREQUENCY, m);
            let v = fringe_visibility(&late, 1e3 / m.decoherence_rate());
            worst = worst.max((v - 1.0 / (2.0 * n + 1.0)).abs());
            let early = InterferometerConfig::with_defaults(FRAC_PI_2, SYSTEM_FREQUENCY, m);
            worst = worst.max((fringe_visibility(&early, 0.0) - 1.0).abs());
        }
        Ok(CriterionOutcome::new(
            8,
            NAME,
            worst <= tol,
            worst,
            format!("max deviation {worst:.3e}"),
        ))
    };
    outcome(8, NAME, run())
}

pub fn criterion_9(opts: &SuiteOptions) -> CriterionOutcome {
    const NAME: &str = "mixedness limits";
    let run = || -> Result<CriterionOutcome> {
        let at_eta_zero = |n: f64| -> Result<f64> {
            let m = markov(1e8, n)?;
            let cfg = InterferometerConfig::with_defaults(FRAC_PI_2, SYSTEM_FREQUENCY, m);
            Ok(mixedness(&pipeline_state(&cfg, 1e3 / m.decoherence_rate())?))
        };
        let cold = at_eta_zero(0.0)?;
        let hot = at_eta_zero(1e6)?;
        let passed = cold <= opts.tol(1e-12) && (hot - 0.5).abs() <= opts.tol(1e-6);
        Ok(CriterionOutcome::new(
            9,
            NAME,
            passed,
            (hot - 0.5).abs().max(cold),
            format!("M(n=0) = {cold:.3e}, M(n=1e6) = {hot:.9}"),
        ))
    };
    outcome(9, NAME, run())
}

pub fn criterion_10(opts: &SuiteOptions) -> CriterionOutcome {
    const NAME: &str = "zero heat";
    let tol = opts.tol(1e-12);
    let run = || -> Result<CriterionOutcome> {
        let mut worst = 0.0f64;
        for (phi, n, g) in combos() {
            let (traj, _) = rk4_run(phi, n, g, 5.0)?;
            for q in heat_rate(&traj, SYSTEM_FREQUENCY) {
                worst = worst.max(q.abs());
            }
        }
        let mut exact = true;
        for omega in [1.0, 3.7e9, SYSTEM_FREQUENCY, 2.5e14] {
            let q = quadratures(omega);
            exact &= q.position == 1.0 / (2.0 * omega) && q.momentum == omega / 2.0;
        }
        Ok(CriterionOutcome::new(
            10,
            NAME,
            worst <= tol && exact,
            worst,
            format!("max |dQ/dt| = {worst:.3e}, quadratures exact: {exact}"),
        ))
    };
    outcome(10, NAME, run())
}

pub fn criterion_11(opts: &SuiteOptions) -> CriterionOutcome {
    const NAME: &str = "coherence ordering";
    let tol = opts.tol(1e-10);
    let rate = 1e8;
    let run = || -> Result<CriterionOutcome> {
        // One shared grid over 10 decoherence times of the coldest bath.
        let horizon = 10.0 / (rate * (2.0 * OCCUPATIONS[0] + 1.0));
        let times: Vec<f64> = (0..=400).map(|k| horizon * k as f64 / 400.0).collect();
        let mut rising = Vec::new();
        let mut worst_rise = 0.0f64;
        let mut curves = Vec::new();
        for &phi in &PHASES {
            for &n in &OCCUPATIONS {
                let cfg = InterferometerConfig::with_defaults(phi, SYSTEM_FREQUENCY, markov(rate, n)?);
                let cd = times
                    .iter()
                    .map(|&t| Ok(distillable_coherence(&pipeline_state(&cfg, t)?)))
                    .collect::<Result<Vec<f64>>>()?;
                let rise = cd.windows(2).map(|w| w[1] - w[0]).fold(0.0f64, f64::max);
                worst_rise = worst_rise.max(rise);
                if rise > tol {
                    rising.push(format!("phi={phi:.3}/n={n}"));
                }
                curves.push((phi, n, cd));
            }
        }
        let mut order_fail = Vec::new();
        for &phi in &PHASES {
            let cold = curves.iter().find(|c| c.0 == phi && c.1 == OCCUPATIONS[0]).expect("curve");
            let hot = curves.iter().find(|c| c.0 == phi && c.1 == OCCUPATIONS[2]).expect("curve");
            if cold.2.iter().zip(&hot.2).skip(1).any(|(a, b)| !(a > b)) {
                order_fail.push(format!("phi={phi:.3}"));
            }
        }
        let passed = rising.is_empty() && order_fail.is_empty();
        Ok(CriterionOutcome::new(
            11,
            NAME,
            passed,
            worst_rise,
            format!(
                "max rise {worst_rise:.3e}; non-monotone: [{}]; ordering broken: [{}]",
                rising.join(", "),
                order_fail.join(", ")
            ),
        ))
    };
    outcome(11, NAME, run())
}

fn riemann_kernel(tau: f64, bath: &BathParameters, noise: bool) -> f64 {
    const N: usize = 4_000_000;
    let top = FREQUENCY_CUTOFF_FACTOR * bath.cutoff;
    let h = top / N as f64;
    let kt = K_B_OVER_HBAR * bath.temperature;
    let mut sum = 0.0;
    for k in 0..N {
        let w = (k as f64 + 0.5) * h;
        let j = spectral_density(w, bath).unwrap_or(f64::NAN);
        sum += if noise {
            j / (w / (2.0 * kt)).tanh() * (w * tau).cos()
        } else {
            j * (w * tau).sin()
        };
    }
    2.0 * sum * h
}

pub fn criterion_12(opts: &SuiteOptions) -> CriterionOutcome {
    const NAME: &str = "transient coefficients";
    let ratio_tol = opts.tol(0.01);
    let kernel_tol = opts.tol(1e-6);
    let run = || -> Result<CriterionOutcome> {
        let mut cases = Vec::new();
        for r in [1.0, 10.0, 100.0] {
            for x in [0.1, 0.5, 1.0] {
                cases.push((r, x));
            }
        }
        let results = cases
            .par_iter()
            .map(|&(r, x)| -> Result<(f64, f64, f64, f64)> {
                let bath = BathParameters::from_ratios(SYSTEM_FREQUENCY, r, x, 0.1)?;
                let stop = 50.0 / bath.cutoff;
                let times: Vec<f64> = (0..=100).map(|k| stop * k as f64 / 100.0).collect();
                let tc = transient_coefficients(&bath, &times)?;
                let ratio = tc.delta[100] / tc.gamma[100];
                let rel = (ratio / bath.thermal_factor() - 1.0).abs();
                let worst_sign = tc
                    .delta
                    .iter()
                    .zip(&tc.gamma)
                    .map(|(d, g)| ((d + g).min(d - g) + 1e-12 * d) / d.abs().max(f64::MIN_POSITIVE))
                    .fold(f64::INFINITY, f64::min);
                Ok((r, x, rel, worst_sign))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut ratio_fail = Vec::new();
        let mut worst_rel = 0.0f64;
        let mut sign_ok = true;
        for &(r, x, rel, sign) in &results {
            worst_rel = worst_rel.max(rel);
            if !(rel <= ratio_tol) {
                ratio_fail.push(format!("r={r}/x={x}: {:.2}%", rel * 100.0));
            }
            if r == 10.0 && x == 0.1 {
                sign_ok = sign >= 0.0;
            }
        }

        let bath = BathParameters::new(100.0, 1e13, 0.1, SYSTEM_FREQUENCY)?;
        let mut worst_kernel = 0.0f64;
        for s in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let tau = s / bath.cutoff;
            let k = noise_kernel(tau, &bath)?;
            let mu = dissipation_kernel(tau, &bath)?;
            worst_kernel = worst_kernel.max((k / riemann_kernel(tau, &bath, true) - 1.0).abs());
            worst_kernel = worst_kernel.max((mu / riemann_kernel(tau, &bath, false) - 1.0).abs());
        }
        let passed = ratio_fail.is_empty() && sign_ok && worst_kernel <= kernel_tol;
        Ok(CriterionOutcome::new(
            12,
            NAME,
            passed,
            worst_rel,
            format!(
                "ratio misses: [{}]; Lindblad sign ok: {sign_ok}; kernel rel err {worst_kernel:.3e}",
                ratio_fail.join(", ")
            ),
        ))
    };
    outcome(12, NAME, run())
}

pub fn criterion_13(_opts: &SuiteOptions) -> CriterionOutcome {
    const NAME: &str = "sweep monotonicity";
    let run = || -> Result<CriterionOutcome> {
        let doc = crate::commands::cmd_sweep(&RunConfig::default())?;
        let x = doc.column("sweep_value").unwrap_or_default();
        let s_rem = doc.column("S_rem").unwrap_or_default();
        let vis = doc.column("residual_visibility").unwrap_or_default();
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
        let passed = x.len() == 20 && increasing(&x) && increasing(&s_rem) && increasing(&vis);
        let min_step = s_rem.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        Ok(CriterionOutcome::new(
            13,
            NAME,
            passed,
            min_step,
            format!("{} points, smallest S_rem step {min_step:.3e}", x.len()),
        ))
    };
    outcome(13, NAME, run())
}

/// The seeded random inputs of the suite as a CSV, one row per draw.
pub fn random_draw_artifact(opts: &SuiteOptions) -> Result<String> {
    let mut doc = CsvDocument::new(&["criterion", "draw", "u0", "u1", "u2"]);
    doc.comments.push(format!("mzbath {} draws seed={}", crate::VERSION, opts.seed));
    for id in [2u32, 4, 5, 6] {
        let mut rng = opts.rng(id);
        for k in 0..RANDOM_DRAWS {
            let u: [f64; 3] = [rng.random(), rng.random(), rng.random()];
            doc.push(vec![
                Cell::Num(f64::from(id)),
                Cell::Num(k as f64),
                Cell::Num(u[0]),
                Cell::Num(u[1]),
                Cell::Num(u[2]),
            ]);
        }
    }
    doc.render()
}

pub fn criterion_14(opts: &SuiteOptions) -> CriterionOutcome {
    const NAME: &str = "determinism";
    let run = || -> Result<CriterionOutcome> {
        let a = random_draw_artifact(opts)? + &results_csv(&[criterion_2(opts), criterion_6(opts)])?;
        let b = random_draw_artifact(opts)? + &results_csv(&[criterion_2(opts), criterion_6(opts)])?;
        let passed = a.as_bytes() == b.as_bytes();
        Ok(CriterionOutcome::new(
            14,
            NAME,
            passed,
            if passed { 0.0 } else { 1.0 },
            format!("two seeded renders, {} bytes each, identical: {passed}", a.len()),
        ))
    };
    outcome(14, NAME, run())
}

pub type Criterion = fn(&SuiteOptions) -> CriterionOutcome;

pub const CRITERIA: [Criterion; 14] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
    criterion_12,
    criterion_13,
    criterion_14,
];

pub fn run_suite(opts: &SuiteOptions) -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|c| c(opts)).collect()
}

/// Deterministic per-criterion results (no timings).
pub fn results_csv(outcomes: &[CriterionOutcome]) -> Result<String> {
    let mut doc = CsvDocument::new(&["id", "name", "passed", "metric"]);
    for o in outcomes {
        doc.push(vec![
            Cell::Num(f64::from(o.id)),
            Cell::from(o.name),
            Cell::Bool(o.passed),
            Cell::Num(o.metric),
        ]);
    }
    doc.render()
}
