//! Experiment drivers behind the CLI subcommands. Each returns the CSV
//! document it would write so callers (and tests) can inspect the data.

use rayon::prelude::*;

use crate::bath::{
    mean_occupation, stationary_coefficients, transient_coefficients, BathParameters, MarkovParameters,
};
use crate::config::{RunConfig, SweepAxis};
use crate::dynamics::{decoherence_factor, evolve_rk4, gibbs_state, refine_grid, LindbladCoefficients};
use crate::interferometer::{
    apply_bs2, momentum_distribution, pipeline_state, position_distribution, prepare_after_bs1, symmetric_grid,
};
use crate::output::{Cell, CsvDocument, Panel, Series};
use crate::qmath::{distillable_coherence, mat2, mixedness};
use crate::thermo::{asymptotic_entropy, remained_entropy, ThermoSeries};
use crate::{Error, Result};

/// Largest tolerated |RK4 − closed form| in `evolve`.
pub const EVOLVE_CROSS_CHECK_TOL: f64 = 1e-6;

/// Default `evolve` horizon in decoherence times 1/(Γ(2n̄+1)).
pub const EVOLVE_SPAN_DECOHERENCE_TIMES: f64 = 40.0;

/// Default `coeffs` horizon in units of 1/Λ.
pub const COEFFS_SPAN_CUTOFF_TIMES: f64 = 50.0;

/// Half-widths of the pointer grids in units of the pointer widths.
const P_GRID_HALF_WIDTH: f64 = 6.0;
const X_GRID_HALF_WIDTH: f64 = 3.0;

fn header(command: &str, cfg: &RunConfig, grid_stop: Option<f64>) -> Vec<String> {
    vec![
        format!("mzbath {} {command}", crate::VERSION),
        cfg.resolved(grid_stop).to_toml(),
    ]
}

pub fn coeffs_grid(cfg: &RunConfig) -> Result<Vec<f64>> {
    let stop = cfg.grid.stop.unwrap_or(COEFFS_SPAN_CUTOFF_TIMES / cfg.bath.cutoff);
    cfg.grid.points(stop)
}

pub fn cmd_coeffs(cfg: &RunConfig) -> Result<CsvDocument> {
    let bath = cfg.bath_parameters()?;
    let times = coeffs_grid(cfg)?;
    let tc = transient_coefficients(&bath, &times)?;
    let (sd, sg) = stationary_coefficients(&bath);
    let mut doc = CsvDocument::new(&[
        "t",
        "delta",
        "gamma",
        "delta_plus_gamma",
        "delta_minus_gamma",
        "stationary_delta",
        "stationary_gamma",
    ]);
    doc.comments = header("coeffs", cfg, times.last().copied());
    for i in 0..tc.len() {
        let (d, g) = (tc.delta[i], tc.gamma[i]);
        doc.push(vec![
            Cell::Num(tc.times[i]),
            Cell::Num(d),
            Cell::Num(g),
            Cell::Num(d + g),
            Cell::Num(d - g),
            Cell::Num(sd),
            Cell::Num(sg),
        ]);
    }
    Ok(doc)
}

pub fn evolve_grid(cfg: &RunConfig) -> Result<Vec<f64>> {
    let stop = match cfg.grid.stop {
        Some(s) => s,
        None => {
            let m = cfg.markov()?;
            let rate = m.decoherence_rate();
            if !(rate > 0.0) {
                return Err(Error::config(
                    "grid.stop",
                    "no decoherence (coupling 0); set grid.stop explicitly",
                ));
            }
            EVOLVE_SPAN_DECOHERENCE_TIMES / rate
        }
    };
    cfg.grid.points(stop)
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<CsvDocument> {
    let markov = cfg.markov()?;
    let icfg = cfg.interferometer_config(cfg.interferometer.phase)?;
    let times = evolve_grid(cfg)?;

    // RK4 runs inside the interferometer on a grid refined to the default
    // step; BS2 is applied to each reported state.
    let coeffs = LindbladCoefficients::from_markov(&markov);
    let (fine, index) = refine_grid(&times, coeffs.default_step())?;
    let inner = evolve_rk4(&prepare_after_bs1(icfg.phase), &markov, &fine)?.select(&index);
    let states: Vec<_> = inner.states.iter().map(apply_bs2).collect();
    let traj = crate::dynamics::Trajectory::new(times.clone(), states)?;
    let thermo = ThermoSeries::from_trajectory(&traj, cfg.bath.system_frequency);

    let mut doc = CsvDocument::new(&[
        "t",
        "eta",
        "rho11_re",
        "rho12_re",
        "rho12_im",
        "rho22_re",
        "entropy",
        "entropy_change",
        "coherence",
        "mixedness",
        "heat_rate",
        "numeric_vs_analytic_maxerr",
    ]);
    doc.comments = header("evolve", cfg, times.last().copied());
    let mut worst = (0.0f64, 0.0f64);
    for (i, rho) in traj.states.iter().enumerate() {
        let t = times[i];
        let exact = pipeline_state(&icfg, t)?;
        let err = mat2::max_abs(&mat2::sub(rho.elements(), exact.elements()));
        if err > worst.0 {
            worst = (err, t);
        }
        let m = rho.elements();
        doc.push(vec![
            Cell::Num(t),
            Cell::Num(decoherence_factor(&markov, t)),
            Cell::Num(m[0][0].re),
            Cell::Num(m[0][1].re),
            Cell::Num(m[0][1].im),
            Cell::Num(m[1][1].re),
            Cell::Num(thermo.entropy[i]),
            Cell::Num(thermo.entropy_change[i]),
            Cell::Num(thermo.distillable_coherence[i]),
            Cell::Num(thermo.mixedness[i]),
            Cell::Num(thermo.heat_rate[i]),
            Cell::Num(err),
        ]);
    }
    if worst.0 > EVOLVE_CROSS_CHECK_TOL {
        return Err(Error::CrossCheck(format!(
            "RK4 and closed form differ by {:e} at t = {:e} (limit {EVOLVE_CROSS_CHECK_TOL:e})",
            worst.0, worst.1
        )));
    }
    Ok(doc)
}

/// Output of `interfere`: the long-format CSV plus one SVG per snapshot.
#[derive(Debug, Clone)]
pub struct InterfereOutput {
    pub csv: CsvDocument,
    pub snapshots: Vec<(f64, Vec<Panel>)>,
}

pub fn cmd_interfere(cfg: &RunConfig) -> Result<InterfereOutput> {
    let omega = cfg.bath.system_frequency;
    let markov = cfg.markov()?;
    let n = cfg.interferometer.grid_points;
    let configs = cfg
        .interferometer
        .phases
        .iter()
        .map(|&phi| cfg.interferometer_config_for(phi, markov))
        .collect::<Result<Vec<_>>>()?;
    let x0 = configs.first().map_or(0.0, |c| c.pointer_separation);
    let x_grid = symmetric_grid(x0 + X_GRID_HALF_WIDTH * (2.0 / omega).sqrt(), n);
    let d = configs.first().map_or(1.0, |c| c.path_difference);
    let p_grid = symmetric_grid(fringe_aligned_half_width(P_GRID_HALF_WIDTH * (omega / 2.0).sqrt(), d, n), n);

    let mut csv = CsvDocument::new(&["snapshot_t", "axis", "coordinate", "density", "phase_phi"]);
    csv.comments = header("interfere", cfg, None);
    let mut snapshots = Vec::new();
    for &t in &cfg.interferometer.snapshots {
        let mut x_panel = Panel {
            title: format!("X, t = {t:e} s"),
            series: Vec::new(),
        };
        let mut p_panel = Panel {
            title: format!("P, t = {t:e} s"),
            series: Vec::new(),
        };
        for (k, ic) in configs.iter().enumerate() {
            let dashed = k % 2 == 1;
            for (axis, samples, panel) in [
                ("X", position_distribution(ic, t, &x_grid)?, &mut x_panel),
                ("P", momentum_distribution(ic, t, &p_grid)?, &mut p_panel),
            ] {
                for (&c, &d) in samples.abscissa.iter().zip(&samples.density) {
                    csv.push(vec![
                        Cell::Num(t),
                        Cell::from(axis),
                        Cell::Num(c),
                        Cell::Num(d),
                        Cell::Num(ic.phase),
                    ]);
                }
                panel.series.push(Series {
                    label: format!("phi = {}", ic.phase),
                    x: samples.abscissa,
                    y: samples.density,
                    dashed,
                });
            }
        }
        snapshots.push((t, vec![x_panel, p_panel]));
    }
    Ok(InterfereOutput { csv, snapshots })
}

/// Half-width near `target` whose grid spacing is π/(d·m) for an integer m,
/// so an odd-sized grid samples every fringe maximum and minimum exactly.
fn fringe_aligned_half_width(target: f64, d: f64, count: usize) -> f64 {
    let intervals = (count.max(2) - 1) as f64;
    let m = (std::f64::consts::PI * intervals / (2.0 * d * target)).ceil().max(1.0);
    std::f64::consts::PI / (d * m) * intervals / 2.0
}

fn sweep_point(cfg: &RunConfig, axis: SweepAxis, value: f64) -> Result<Vec<Cell>> {
    let b = &cfg.bath;
    let temperature = match axis {
        SweepAxis::OmegaOverT => {
            if !(value > 0.0) {
                return Err(Error::config("sweep.values", format!("Omega/T must be > 0, got {value}")));
            }
            b.system_frequency / value
        }
        SweepAxis::Temperature => value,
        SweepAxis::Time => b.temperature,
    };
    let bath = BathParameters::new(temperature, b.cutoff, b.coupling, b.system_frequency)
        .map_err(|e| match e {
            Error::Config { message, .. } => Error::config("sweep.values", message),
            other => other,
        })?;
    let n = mean_occupation(&bath);
    let markov = MarkovParameters::new(crate::bath::markov_parameters(&bath).rate, n)?;
    let ic = cfg.interferometer_config_for(cfg.interferometer.phase, markov)?;
    let cd_times: Vec<f64> = match axis {
        SweepAxis::Time => vec![value],
        _ => cfg.sweep.cd_times.clone(),
    };
    let mut row = vec![
        Cell::Num(value),
        Cell::Num(n),
        Cell::Num(asymptotic_entropy(n)),
        Cell::Num(remained_entropy(n)),
    ];
    for t in cd_times {
        if !(t >= 0.0) {
            return Err(Error::config("sweep.values", format!("time must be >= 0, got {t}")));
        }
        row.push(Cell::Num(distillable_coherence(&pipeline_state(&ic, t)?)));
    }
    row.push(Cell::Num(mixedness(&gibbs_state(n)?.matrix)));
    row.push(Cell::Num(1.0 / (2.0 * n + 1.0)));
    Ok(row)
}

pub fn sweep_columns(cfg: &RunConfig) -> Result<Vec<String>> {
    let mut cols: Vec<String> = ["sweep_value", "n_bar", "S_inf", "S_rem"].iter().map(|s| s.to_string()).collect();
    match cfg.sweep.axis()? {
        SweepAxis::Time => cols.push("C_d_at_t".into()),
        _ => cols.extend(cfg.sweep.cd_times.iter().map(|t| format!("C_d_at_t_{t:e}"))),
    }
    cols.push("M_inf".into());
    cols.push("residual_visibility".into());
    Ok(cols)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<CsvDocument> {
    let axis = cfg.sweep.axis()?;
    let mut values = cfg.sweep.sweep_values()?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::config("sweep.values", "must be finite"));
    }
    values.sort_by(f64::total_cmp);
    let rows = values
        .par_iter()
        .map(|&v| sweep_point(cfg, axis, v))
        .collect::<Result<Vec<_>>>()?;
    let cols = sweep_columns(cfg)?;
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut doc = CsvDocument::new(&col_refs);
    doc.comments = header("sweep", cfg, None);
    for r in rows {
        doc.push(r);
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::asymptotic_entropy;

    fn cfg(overrides: &[&str]) -> RunConfig {
        let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
        RunConfig::from_toml_with_overrides("", &o).unwrap()
    }

    #[test]
    fn coeffs_start_at_zero_and_approach_the_thermal_ratio() {
        let doc = cmd_coeffs(&cfg(&["--grid.count=26"])).unwrap();
        let d = doc.column("delta").unwrap();
        let g = doc.column("gamma").unwrap();
        assert_eq!((d[0], g[0]), (0.0, 0.0));
        let ratio = d.last().unwrap() / g.last().unwrap();
        let x = 1e12 / (2.0 * crate::bath::K_B_OVER_HBAR * 100.0);
        let coth = 1.0 / x.tanh();
        assert!((ratio / coth - 1.0).abs() < 0.01, "ratio {ratio} vs {coth}");
    }

    #[test]
    fn evolve_entropy_rises_to_the_plateau() {
        let c = cfg(&["--grid.count=81"]);
        let doc = cmd_evolve(&c).unwrap();
        let s = doc.column("entropy").unwrap();
        let eta = doc.column("eta").unwrap();
        assert_eq!(eta[0], 1.0);
        assert!(s[0].abs() < 1e-12);
        let n = c.markov().unwrap().occupation;
        assert!((s.last().unwrap() - asymptotic_entropy(n)).abs() < 1e-6);
        assert!(doc.column("heat_rate").unwrap().iter().all(|h| h.abs() <= 1e-12));
        assert!(doc.column("numeric_vs_analytic_maxerr").unwrap().iter().all(|e| *e <= 1e-6));
    }

    #[test]
    fn interfere_panels_and_contrast() {
        let c = cfg(&["--interferometer.grid_points=2001"]);
        let out = cmd_interfere(&c).unwrap();
        assert_eq!(out.snapshots.len(), 3);
        assert!(out.snapshots.iter().all(|(_, p)| p.len() == 2 && p[0].series.len() == 2));
        let dens = out.csv.column("density").unwrap();
        assert!(dens.iter().all(|d| *d >= 0.0));
        // φ = π/2, t = 0 momentum panel: envelope-normalised contrast is 1.
        let p = &out.snapshots[0].1[1].series[1];
        let omega = c.bath.system_frequency;
        let (hi, lo) = p
            .x
            .iter()
            .zip(&p.y)
            .filter(|(x, _)| x.abs() < (omega / 2.0).sqrt())
            .map(|(x, y)| y / ((1.0 / (omega * std::f64::consts::PI)).sqrt() * (-x * x / omega).exp()))
            .fold((f64::MIN, f64::MAX), |(h, l), v| (h.max(v), l.min(v)));
        assert!(((hi - lo) / (hi + lo) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sweep_trends() {
        let doc = cmd_sweep(&cfg(&[])).unwrap();
        let s_rem = doc.column("S_rem").unwrap();
        assert_eq!(s_rem.len(), 20);
        assert!(s_rem.windows(2).all(|w| w[1] > w[0]));
        let m = doc.column("M_inf").unwrap();
        assert!((m[0] - 0.5).abs() < 1e-3);
        let at = cmd_sweep(&cfg(&["--sweep.values=[1e10]"])).unwrap();
        assert!((at.column("n_bar").unwrap()[0] - 12.60).abs() < 0.01);
    }

    #[test]
    fn sweep_rejects_unknown_axis_and_supports_time() {
        assert!(RunConfig::from_toml_with_overrides("", &["--sweep.axis=foo".into()]).is_err());
        let doc = cmd_sweep(&cfg(&["--sweep.axis=time", "--sweep.values=[0.0, 1e-9]"])).unwrap();
        let cd = doc.column("C_d_at_t").unwrap();
        assert_eq!(cd.len(), 2);
        assert!(cd[1] < cd[0] + 1e-12);
    }
}
