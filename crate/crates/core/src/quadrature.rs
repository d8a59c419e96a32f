//! Adaptive Gauss-Kronrod (7/15) integration with global bisection of the
//! worst panel.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

// 15-point Kronrod abscissae (non-negative half) and weights; the odd
// indices are the 7-point Gauss nodes.
pub(crate) const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
pub(crate) const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Target error relative to |I|.
    pub rel_tol: f64,
    /// Target error relative to ∫|f|; keeps near-cancelling integrals finite.
    pub abs_tol_scaled: f64,
    /// Initial panels are no wider than this.
    pub max_panel_width: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol_scaled: 1e-10,
            max_panel_width: f64::INFINITY,
            max_panels: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    /// ∫|f| estimate.
    pub abs_value: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.abs() * WGK[7];
    let mut samples = [(0.0, 0.0); 7];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        samples[j] = (f1, f2);
        kronrod += w * (f1 + f2);
        abs_sum += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    // QUADPACK's QK15 error heuristic: |K − G| rescaled by the spread of f
    // about its mean, floored at the rounding level of ∫|f|.
    let mean = 0.5 * kronrod;
    let mut spread = WGK[7] * (fc - mean).abs();
    for (j, &(f1, f2)) in samples.iter().enumerate() {
        spread += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let spread = spread * half.abs();
    let abs_value = abs_sum * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if spread != 0.0 && error != 0.0 {
        error = spread * (200.0 * error / spread).powf(1.5).min(1.0);
    }
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_value);
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error,
        abs_value,
    }
}

/// ∫ₐᵇ f(x) dx.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            abs_value: 0.0,
            evaluations: 0,
        });
    }
    let width = b - a;
    let n0 = if opts.max_panel_width.is_finite() && opts.max_panel_width > 0.0 {
        ((width.abs() / opts.max_panel_width).ceil() as usize).max(1)
    } else {
        1
    };
    if n0 > opts.max_panels {
        return Err(Error::Quadrature(format!(
            "{n0} initial panels exceed the limit of {}",
            opts.max_panels
        )));
    }

    let mut heap = BinaryHeap::with_capacity(2 * n0);
    let mut value = 0.0;
    let mut error = 0.0;
    let mut abs_value = 0.0;
    for k in 0..n0 {
        let lo = a + width * (k as f64) / (n0 as f64);
        let hi = if k + 1 == n0 {
            b
        } else {
            a + width * ((k + 1) as f64) / (n0 as f64)
        };
        let p = kronrod15(&f, lo, hi);
        value += p.value;
        error += p.error;
        abs_value += p.abs_value;
        heap.push(p);
    }
    let mut evaluations = 15 * n0;

    let tolerance = |value: f64, abs_value: f64| {
        (opts.rel_tol * value.abs()).max(opts.abs_tol_scaled * abs_value)
    };

    while error > tolerance(value, abs_value) {
        if !value.is_finite() {
            return Err(Error::Quadrature("integrand produced a non-finite value".into()));
        }
        if heap.len() >= opts.max_panels {
            return Err(Error::Quadrature(format!(
                "tolerance not met after {} panels (error estimate {error:e}, target {:e})",
                heap.len(),
                tolerance(value, abs_value)
            )));
        }
        let worst = heap.pop().expect("heap is never empty here");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Panel at floating-point resolution; accept what we have.
            heap.push(worst);
            break;
        }
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        abs_value += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum in interval order so the result does not depend on the
    // running-update rounding.
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error: f64 = panels.iter().map(|p| p.error).sum();
    let abs_value: f64 = panels.iter().map(|p| p.abs_value).sum();
    if !value.is_finite() {
        return Err(Error::Quadrature("integrand produced a non-finite value".into()));
    }
    Ok(QuadResult {
        value,
        error,
        abs_value,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, 0.0, 2.0, &QuadOptions::default()).unwrap();
        assert!((r.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_integral() {
        let opts = QuadOptions {
            max_panel_width: 0.5,
            ..QuadOptions::default()
        };
        let r = integrate(|x| (40.0 * x).cos() * (-x).exp(), 0.0, 10.0, &opts).unwrap();
        let exact = (1.0 - (-10.0f64).exp() * ((400.0f64).cos() - 40.0 * (400.0f64).sin())) / 1601.0;
        assert!((r.value - exact).abs() < 1e-12, "{} vs {exact}", r.value);
    }

    #[test]
    fn integrable_log_singularity() {
        let r = integrate(|x: f64| -x.ln(), 0.0, 1.0, &QuadOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
        let r = integrate(|x: f64| x.sin(), 0.0, PI, &QuadOptions::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let f = |x: f64| x.exp();
        let fwd = integrate(f, 0.0, 1.0, &QuadOptions::default()).unwrap().value;
        let back = integrate(f, 1.0, 0.0, &QuadOptions::default()).unwrap().value;
        assert!((fwd + back).abs() < 1e-15);
    }

    #[test]
    fn reports_failure_when_panel_budget_is_exhausted() {
        let opts = QuadOptions {
            max_panels: 4,
            ..QuadOptions::default()
        };
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &opts);
        assert!(matches!(r, Err(Error::Quadrature(_))));
    }
}
