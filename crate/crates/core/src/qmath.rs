//! Exact 2×2 density-matrix algebra and the information measures built on it.
//!
//! Every entropic quantity is reported in bits (log base 2), so the maximally
//! mixed qubit has entropy 1.

use num_complex::Complex64;

use crate::{Error, Result};

/// Row-major 2×2 complex matrix.
pub type Mat2 = [[Complex64; 2]; 2];

/// Allowed |Tr − 1| for a valid state.
pub const TRACE_TOL: f64 = 1e-12;
/// Allowed negative excursion of the smallest eigenvalue.
pub const PSD_TOL: f64 = 1e-12;
/// σ-eigenvalues below this count as outside the support of σ.
pub const SUPPORT_EIGEN_TOL: f64 = 1e-15;
/// ρ-weight allowed in a σ-kernel direction before the relative entropy diverges.
pub const SUPPORT_WEIGHT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Small helpers over [`Mat2`].
pub mod mat2 {
    use super::{Mat2, ZERO};
    use num_complex::Complex64;

    pub const fn zeros() -> Mat2 {
        [[ZERO; 2]; 2]
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Mat2 {
        [
            [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
            [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
        ]
    }

    pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
        let mut out = zeros();
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    pub fn dagger(a: &Mat2) -> Mat2 {
        [
            [a[0][0].conj(), a[1][0].conj()],
            [a[0][1].conj(), a[1][1].conj()],
        ]
    }

    pub fn add(a: &Mat2, b: &Mat2) -> Mat2 {
        [
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ]
    }

    pub fn sub(a: &Mat2, b: &Mat2) -> Mat2 {
        [
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ]
    }

    pub fn scale(a: &Mat2, s: f64) -> Mat2 {
        [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
    }

    pub fn trace(a: &Mat2) -> Complex64 {
        a[0][0] + a[1][1]
    }

    /// (A + A†)/2 with an exactly real diagonal.
    pub fn hermitize(a: &Mat2) -> Mat2 {
        let off = (a[0][1] + a[1][0].conj()) * 0.5;
        [
            [Complex64::new(a[0][0].re, 0.0), off],
            [off.conj(), Complex64::new(a[1][1].re, 0.0)],
        ]
    }

    /// Largest elementwise modulus.
    pub fn max_abs(a: &Mat2) -> f64 {
        a.iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues (descending) of a Hermitian 2×2 matrix given by its diagonal
/// and upper off-diagonal element.
fn hermitian_eigenvalues(a: f64, c: f64, b: Complex64) -> (f64, f64) {
    let mean = 0.5 * (a + c);
    let radius = (0.25 * (a - c) * (a - c) + b.norm_sqr()).sqrt();
    (mean + radius, mean - radius)
}

/// A 2×2 complex Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    elements: Mat2,
}

impl DensityMatrix {
    /// Hermitizes `elements` and validates trace and positivity at the
    /// default tolerances.
    pub fn new(elements: Mat2) -> Result<Self> {
        Self::with_tolerance(elements, TRACE_TOL, PSD_TOL)
    }

    /// As [`DensityMatrix::new`] with caller-chosen tolerances. Eigenvalues in
    /// `(-psd_tol, 0)` are accepted as they are; measures clamp them later.
    pub fn with_tolerance(elements: Mat2, trace_tol: f64, psd_tol: f64) -> Result<Self> {
        if elements
            .iter()
            .flat_map(|r| r.iter())
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Domain("density matrix has non-finite elements".into()));
        }
        let h = mat2::hermitize(&elements);
        let trace = h[0][0].re + h[1][1].re;
        let deviation = (trace - 1.0).abs();
        if deviation > trace_tol {
            return Err(Error::Trace {
                deviation,
                tolerance: trace_tol,
            });
        }
        let (_, low) = hermitian_eigenvalues(h[0][0].re, h[1][1].re, h[0][1]);
        if low < -psd_tol {
            return Err(Error::Positivity {
                min_eigenvalue: low,
                tolerance: psd_tol,
            });
        }
        Ok(Self { elements: h })
    }

    /// Diagonal state with populations `(p, 1 - p)`.
    pub fn diagonal(p: f64) -> Result<Self> {
        Self::new(mat2::from_real([[p, 0.0], [0.0, 1.0 - p]]))
    }

    pub fn maximally_mixed() -> Self {
        Self {
            elements: mat2::from_real([[0.5, 0.0], [0.0, 0.5]]),
        }
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalised) amplitude pair.
    pub fn pure(amplitudes: [Complex64; 2]) -> Result<Self> {
        let norm = (amplitudes[0].norm_sqr() + amplitudes[1].norm_sqr()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("pure state amplitudes must be non-zero".into()));
        }
        let v = [amplitudes[0] / norm, amplitudes[1] / norm];
        let mut m = mat2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = v[i] * v[j].conj();
            }
        }
        Self::new(m)
    }

    pub fn elements(&self) -> &Mat2 {
        &self.elements
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.elements[row][col]
    }

    /// Populations `(ρ₀₀, ρ₁₁)`.
    pub fn populations(&self) -> (f64, f64) {
        (self.elements[0][0].re, self.elements[1][1].re)
    }

    /// The upper off-diagonal element ρ₀₁.
    pub fn coherence(&self) -> Complex64 {
        self.elements[0][1]
    }

    pub fn trace(&self) -> f64 {
        self.elements[0][0].re + self.elements[1][1].re
    }

    pub fn spectral_decomposition(&self) -> SpectralDecomposition {
        SpectralDecomposition::of(&self.elements)
    }
}

/// Eigen-decomposition of a Hermitian 2×2 matrix, eigenvalues descending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: [f64; 2],
    /// `eigenvectors[k]` is the unit eigenvector belonging to `eigenvalues[k]`.
    pub eigenvectors: [[Complex64; 2]; 2],
}

impl SpectralDecomposition {
    pub fn of(m: &Mat2) -> Self {
        let (a, c, b) = (m[0][0].re, m[1][1].re, m[0][1]);
        let (hi, lo) = hermitian_eigenvalues(a, c, b);
        let half_gap = 0.5 * (a - c);
        let radius = hi - 0.5 * (a + c);
        let one = Complex64::new(1.0, 0.0);

        let v_hi = if b.norm() == 0.0 {
            if a >= c {
                [one, ZERO]
            } else {
                [ZERO, one]
            }
        } else if a >= c {
            // (λ₊ − c, b̄) has the larger first component here.
            let x = Complex64::new(half_gap + radius, 0.0);
            normalize([x, b.conj()])
        } else {
            let y = Complex64::new(-half_gap + radius, 0.0);
            normalize([b, y])
        };
        let v_lo = [-v_hi[1].conj(), v_hi[0].conj()];
        Self {
            eigenvalues: [hi, lo],
            eigenvectors: [v_hi, v_lo],
        }
    }

    /// Σ f(λₖ) vₖvₖ†.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Mat2 {
        let mut out = mat2::zeros();
        for k in 0..2 {
            let w = f(self.eigenvalues[k]);
            let v = &self.eigenvectors[k];
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] += v[i] * v[j].conj() * w;
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Mat2 {
        self.apply(|x| x)
    }
}

fn normalize(v: [Complex64; 2]) -> [Complex64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Validating constructor, the named entry point for raw 2×2 input.
pub fn new_density_matrix(elements: Mat2) -> Result<DensityMatrix> {
    DensityMatrix::new(elements)
}

/// Closed-form eigenvalues `(λ₊, λ₋)` using the unit trace:
/// `1/2 ± sqrt((ρ₀₀−ρ₁₁)²/4 + |ρ₀₁|²)`, with dust in `(-1e-12, 0)` clamped.
pub fn eigenvalues2(rho: &DensityMatrix) -> (f64, f64) {
    let m = rho.elements();
    let d = m[0][0].re - m[1][1].re;
    let radius = (0.25 * d * d + m[0][1].norm_sqr()).sqrt();
    let hi = (0.5 + radius).min(1.0);
    let lo = 0.5 - radius;
    (hi, clamp_dust(lo))
}

fn clamp_dust(x: f64) -> f64 {
    if x < 0.0 && x > -PSD_TOL {
        0.0
    } else {
        x
    }
}

/// −x·log₂x with 0·log 0 := 0.
pub fn entropy_term(x: f64) -> f64 {
    let x = clamp_dust(x);
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Binary entropy h(p) = −p log₂p − (1−p) log₂(1−p).
pub fn binary_entropy(p: f64) -> f64 {
    entropy_term(p) + entropy_term(1.0 - p)
}

/// S(ρ) = −Tr ρ log₂ρ in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let (hi, lo) = eigenvalues2(rho);
    entropy_term(hi) + entropy_term(lo)
}

/// S[ρ‖σ] = Tr[ρ log₂ρ − ρ log₂σ] in bits.
///
/// Fails with [`Error::Support`] when ρ carries weight above
/// [`SUPPORT_WEIGHT_TOL`] along an eigendirection of σ whose eigenvalue is
/// below [`SUPPORT_EIGEN_TOL`].
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho == sigma {
        return Ok(0.0);
    }
    let sd = sigma.spectral_decomposition();
    let m = rho.elements();
    let mut cross = 0.0;
    for k in 0..2 {
        let v = &sd.eigenvectors[k];
        // ⟨v|ρ|v⟩
        let mut w = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                w += v[i].conj() * m[i][j] * v[j];
            }
        }
        let weight = w.re;
        let mu = sd.eigenvalues[k];
        if mu < SUPPORT_EIGEN_TOL {
            if weight > SUPPORT_WEIGHT_TOL {
                return Err(Error::Support(format!(
                    "rho has weight {weight:e} on a direction where sigma has eigenvalue {mu:e}"
                )));
            }
            continue;
        }
        cross -= weight * mu.log2();
    }
    Ok(cross - von_neumann_entropy(rho))
}

/// Ξ[ρ]: keep the diagonal, zero the coherences.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    let m = rho.elements();
    DensityMatrix {
        elements: [
            [Complex64::new(m[0][0].re, 0.0), ZERO],
            [ZERO, Complex64::new(m[1][1].re, 0.0)],
        ],
    }
}

/// C_d(ρ) = S(Ξ[ρ]) − S(ρ).
pub fn distillable_coherence(rho: &DensityMatrix) -> f64 {
    von_neumann_entropy(&dephase(rho)) - von_neumann_entropy(rho)
}

/// M = 1 − Tr ρ².
pub fn mixedness(rho: &DensityMatrix) -> f64 {
    let m = rho.elements();
    let purity = m[0][0].re * m[0][0].re + m[1][1].re * m[1][1].re + 2.0 * m[0][1].norm_sqr();
    1.0 - purity
}
