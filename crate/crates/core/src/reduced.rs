//! Reduced density matrix of an M-spin subsystem.
//!
//! A Dicke state of N spins decomposes over subsystem Dicke states as
//!
//! ```text
//! |J, −J + k⟩ = Σ_p √H(p; N, M, k) |J_A, −J_A + p⟩ ⊗ |J_B, −J_B + k − p⟩
//! ```
//!
//! with H the hypergeometric distribution. Writing the ground state as the
//! (M+1) × (N−M+1) amplitude matrix X[p, b] = C_{p+b} √H(p; N, M, p + b)
//! gives ρ_A = X Xᵀ. The factor X is kept alongside ρ_A; fidelities between
//! reduced states are evaluated from it directly.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::DickeGroundState;

/// Eigenvalues below this are treated as roundoff and clamped to zero;
/// anything more negative is rejected.
pub const NEGATIVE_EIGENVALUE_TOLERANCE: f64 = 1e-10;

/// Tolerance on |tr ρ − 1| and on max |ρ − ρᵀ|.
pub const TRACE_TOLERANCE: f64 = 1e-12;

/// Eigenvalues at or below this do not contribute to the entropy.
pub const ENTROPY_CUTOFF: f64 = 1e-14;

/// Split of N spins into a subsystem of M spins and its complement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bipartition {
    n: usize,
    m_sub: usize,
    tau: f64,
}

impl Bipartition {
    pub fn new(n: usize, m_sub: usize) -> Result<Self> {
        if m_sub < 1 || m_sub > n {
            return Err(Error::InvalidArgument(format!(
                "subsystem size must satisfy 1 <= M <= N, got M={m_sub}, N={n}"
            )));
        }
        Ok(Self {
            n,
            m_sub,
            tau: m_sub as f64 / n as f64,
        })
    }

    /// Nearest bipartition to the fraction `tau`. The flag reports whether
    /// τN had to be rounded.
    pub fn from_tau(n: usize, tau: f64) -> Result<(Self, bool)> {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::InvalidArgument(format!("tau must lie in (0, 1], got {tau}")));
        }
        let exact = tau * n as f64;
        let m_sub = (exact.round() as usize).clamp(1, n);
        let rounded = (exact - m_sub as f64).abs() > 1e-9;
        Ok((Self::new(n, m_sub)?, rounded))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m_sub(&self) -> usize {
        self.m_sub
    }

    /// Realized fraction M/N.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// The other side of the cut.
    pub fn complement(&self) -> Option<Self> {
        Self::new(self.n, self.n - self.m_sub).ok()
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Hypergeometric weight C(2j₁, p) C(2j₂, m − p) / C(2j, m) with
/// 2j₂ = 2j − 2j₁: the probability that p of m excitations sit in the
/// first subsystem. Zero when m − p falls outside 0..=2j₂.
pub fn hypergeometric_weight(p: usize, two_j: usize, two_j1: usize, m: usize) -> Result<f64> {
    if two_j1 > two_j || p > two_j1 || m > two_j {
        return Err(Error::InvalidArgument(format!(
            "hypergeometric weight needs p <= 2j1 <= 2j and m <= 2j, got p={p}, 2j1={two_j1}, 2j={two_j}, m={m}"
        )));
    }
    let two_j2 = two_j - two_j1;
    if p > m || m - p > two_j2 {
        return Ok(0.0);
    }
    let ln = ln_binomial(two_j1, p) + ln_binomial(two_j2, m - p) - ln_binomial(two_j, m);
    Ok(ln.exp())
}

/// Eigendecomposition of a density matrix, eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    raw_min: f64,
}

impl Spectrum {
    fn of(matrix: &DMatrix<f64>) -> Result<Self> {
        let Some((ascending, eigenvectors)) = linalg::symmetric_eigen(matrix) else {
            return Err(Error::InvalidDensity("eigendecomposition did not converge".into()));
        };
        let raw_min = ascending.first().copied().unwrap_or(0.0);
        if !raw_min.is_finite() || raw_min < -NEGATIVE_EIGENVALUE_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "eigenvalue {raw_min:e} below -{NEGATIVE_EIGENVALUE_TOLERANCE:e}"
            )));
        }
        let dim = ascending.len();
        let values = ascending.iter().rev().map(|p| p.max(0.0)).collect();
        let vectors = DMatrix::from_fn(matrix.nrows(), dim, |r, c| eigenvectors[(r, dim - 1 - c)]);
        Ok(Self {
            values,
            vectors,
            raw_min,
        })
    }

    /// Clamped eigenvalues, largest first.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Eigenvectors as columns, matching `values`.
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// Smallest eigenvalue before clamping.
    pub fn raw_min(&self) -> f64 {
        self.raw_min
    }

    /// Symmetric square root V diag(√p) Vᵀ.
    pub fn sqrt_matrix(&self) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (c, p) in self.values.iter().enumerate() {
            let s = p.sqrt();
            scaled.column_mut(c).scale_mut(s);
        }
        &scaled * self.vectors.transpose()
    }
}

/// How far a density matrix is from the ideal invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityDiagnostics {
    pub trace_error: f64,
    pub asymmetry: f64,
    pub min_eigenvalue: f64,
}

/// Real symmetric, positive semidefinite, unit-trace matrix of an M-spin
/// subsystem in its Dicke basis p = 0..M.
#[derive(Debug, Clone)]
pub struct ReducedDensity {
    m_sub: usize,
    matrix: DMatrix<f64>,
    factor: Option<DMatrix<f64>>,
    spectrum: Spectrum,
    asymmetry: f64,
}

impl ReducedDensity {
    /// Validate and wrap an explicit matrix. Asymmetry up to the trace
    /// tolerance is symmetrized away.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidDensity(format!(
                "expected a non-empty square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asymmetry = (&matrix - matrix.transpose()).amax();
        if !(asymmetry <= TRACE_TOLERANCE) {
            return Err(Error::InvalidDensity(format!("asymmetry {asymmetry:e}")));
        }
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        Self::finish(matrix, None, asymmetry)
    }

    /// ρ = X Xᵀ from an amplitude factor X with Σ X² = 1.
    pub fn from_factor(factor: DMatrix<f64>) -> Result<Self> {
        let product = &factor * factor.transpose();
        let asymmetry = (&product - product.transpose()).amax();
        let matrix = (&product + product.transpose()) * 0.5;
        Self::finish(matrix, Some(factor), asymmetry)
    }

    fn finish(matrix: DMatrix<f64>, factor: Option<DMatrix<f64>>, asymmetry: f64) -> Result<Self> {
        let trace = matrix.trace();
        if !((trace - 1.0).abs() <= TRACE_TOLERANCE) {
            return Err(Error::InvalidDensity(format!("trace {trace} differs from 1")));
        }
        let spectrum = Spectrum::of(&matrix)?;
        Ok(Self {
            m_sub: matrix.nrows() - 1,
            matrix,
            factor,
            spectrum,
            asymmetry,
        })
    }

    pub fn m_sub(&self) -> usize {
        self.m_sub
    }

    pub fn dim(&self) -> usize {
        self.m_sub + 1
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Amplitude factor X with ρ = X Xᵀ, when the state came from `reduce`.
    pub fn factor(&self) -> Option<&DMatrix<f64>> {
        self.factor.as_ref()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn diagnostics(&self) -> DensityDiagnostics {
        DensityDiagnostics {
            trace_error: (self.matrix.trace() - 1.0).abs(),
            asymmetry: self.asymmetry,
            min_eigenvalue: self.spectrum.raw_min,
        }
    }
}

/// Amplitude matrix X[p, b] = C_{p+b} √H(p; N, M, p + b).
fn amplitude_factor(coefficients: &[f64], n: usize, m_sub: usize) -> DMatrix<f64> {
    let rest = n - m_sub;
    let ln_a: Vec<f64> = (0..=m_sub).map(|p| ln_binomial(m_sub, p)).collect();
    let ln_b: Vec<f64> = (0..=rest).map(|b| ln_binomial(rest, b)).collect();
    let ln_n: Vec<f64> = (0..=n).map(|k| ln_binomial(n, k)).collect();
    DMatrix::from_fn(m_sub + 1, rest + 1, |p, b| {
        let k = p + b;
        let c = coefficients[k];
        if c == 0.0 {
            0.0
        } else {
            c * (0.5 * (ln_a[p] + ln_b[b] - ln_n[k])).exp()
        }
    })
}

/// Trace out the N − M complement spins of a Dicke ground state.
pub fn reduce(state: &DickeGroundState, part: &Bipartition) -> Result<ReducedDensity> {
    let n = state.params().n();
    if part.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: part.n(),
        });
    }
    let factor = amplitude_factor(state.coefficients(), n, part.m_sub());
    ReducedDensity::from_factor(factor)
}

/// −Σ λ ln λ over the spectrum, natural log.
pub fn von_neumann_entropy(rho: &ReducedDensity) -> f64 {
    rho.spectrum
        .values
        .iter()
        .filter(|&&p| p > ENTROPY_CUTOFF)
        .map(|&p| -p * p.ln())
        .sum()
}
