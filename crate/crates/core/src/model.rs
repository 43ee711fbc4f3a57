//! LMG Hamiltonian in the maximal-spin Dicke basis and its ground state.
//!
//! With λ = 1 the Hamiltonian is
//!
//! ```text
//! H = -(1/N) (S_x² + γ S_y²) - h S_z
//! ```
//!
//! Inside the J = N/2 multiplet it only couples |J, m⟩ to |J, m ± 2⟩, so the
//! matrix is banded (offsets 0 and ±2) and splits into two tridiagonal blocks
//! of fixed m-parity. Basis states are indexed by k = m + J = number of up
//! spins, k = 0..N.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tridiag;

/// Amplitudes smaller than this are ignored when fixing the overall sign.
pub const GAUGE_THRESHOLD: f64 = 1e-12;

/// Relative residual ‖Hv − Ev‖ / ‖H‖ above which a ground state is rejected.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// One LMG instance: particle count, anisotropy and field. The coupling
/// strength is fixed to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    n: usize,
    gamma: f64,
    h: f64,
}

impl ModelParams {
    pub fn new(n: usize, gamma: f64, h: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("N must be at least 2, got {n}")));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParams(format!(
                "gamma must lie in [0, 1], got {gamma}"
            )));
        }
        if !(h >= 0.0) || !h.is_finite() {
            return Err(Error::InvalidParams(format!(
                "h must be finite and non-negative, got {h}"
            )));
        }
        Ok(Self { n, gamma, h })
    }

    /// Skips the range checks. Only used to probe the h → −h symmetry.
    #[cfg(test)]
    pub(crate) fn new_unchecked(n: usize, gamma: f64, h: f64) -> Self {
        Self { n, gamma, h }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Same model at a different field.
    pub fn with_h(&self, h: f64) -> Result<Self> {
        Self::new(self.n, self.gamma, h)
    }

    /// Total spin J = N/2.
    pub fn total_spin(&self) -> f64 {
        self.n as f64 / 2.0
    }
}

/// Hamiltonian restricted to the J = N/2 multiplet.
///
/// Only the main diagonal and the band at offset two are stored; the matrix is
/// symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedHamiltonian {
    diagonal: Vec<f64>,
    superdiagonal2: Vec<f64>,
}

impl BandedHamiltonian {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Entry (k, k + 2) for k = 0..N−2.
    pub fn superdiagonal2(&self) -> &[f64] {
        &self.superdiagonal2
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (k, &d) in self.diagonal.iter().enumerate() {
            m[(k, k)] = d;
        }
        for (k, &c) in self.superdiagonal2.iter().enumerate() {
            m[(k, k + 2)] = c;
            m[(k + 2, k)] = c;
        }
        m
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let dim = self.dim();
        (0..dim)
            .map(|k| {
                let mut s = self.diagonal[k].abs();
                if k + 2 < dim {
                    s += self.superdiagonal2[k].abs();
                }
                if k >= 2 {
                    s += self.superdiagonal2[k - 2].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        assert_eq!(v.len(), dim);
        (0..dim)
            .map(|k| {
                let mut s = self.diagonal[k] * v[k];
                if k + 2 < dim {
                    s += self.superdiagonal2[k] * v[k + 2];
                }
                if k >= 2 {
                    s += self.superdiagonal2[k - 2] * v[k - 2];
                }
                s
            })
            .collect()
    }

    /// The tridiagonal block on basis indices k ≡ parity (mod 2): returns
    /// (indices, diagonal, off-diagonal).
    pub fn parity_block(&self, parity: usize) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
        let indices: Vec<usize> = (parity..self.dim()).step_by(2).collect();
        let diag = indices.iter().map(|&k| self.diagonal[k]).collect();
        let off = indices
            .iter()
            .take(indices.len().saturating_sub(1))
            .map(|&k| self.superdiagonal2[k])
            .collect();
        (indices, diag, off)
    }

    /// Full spectrum in ascending order from a dense symmetric solve.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = SymmetricEigen::new(self.to_dense())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }
}

/// Build the Hamiltonian matrix in the Dicke basis |J, m⟩, m = −J..J.
///
/// Uses S_x² + γS_y² = ((1−γ)/4)(S_+² + S_−²) + ((1+γ)/2)(S² − S_z²).
pub fn build_hamiltonian(params: &ModelParams) -> BandedHamiltonian {
    let n = params.n;
    let nf = n as f64;
    let j = params.total_spin();
    let jj = j * (j + 1.0);
    let gamma = params.gamma;
    let h = params.h;

    let diagonal = (0..=n)
        .map(|k| {
            let m = k as f64 - j;
            -(1.0 + gamma) / (2.0 * nf) * (jj - m * m) - h * m
        })
        .collect();
    let superdiagonal2 = (0..n.saturating_sub(1))
        .map(|k| {
            let m = k as f64 - j;
            let a = (jj - m * (m + 1.0)) * (jj - (m + 1.0) * (m + 2.0));
            -(1.0 - gamma) / (4.0 * nf) * a.max(0.0).sqrt()
        })
        .collect();
    BandedHamiltonian {
        diagonal,
        superdiagonal2,
    }
}

/// Normalized ground state expanded over the Dicke states |J, −J + k⟩.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DickeGroundState {
    params: ModelParams,
    coefficients: Vec<f64>,
    energy: f64,
}

impl DickeGroundState {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// C_k for k = 0..N, where k counts up spins.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// ⟨S_z⟩ / J, the per-spin magnetization along the field.
    pub fn magnetization(&self) -> f64 {
        let j = self.params.total_spin();
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c * c * (k as f64 - j))
            .sum::<f64>()
            / j
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &DickeGroundState) -> Result<f64> {
        if self.coefficients.len() != other.coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coefficients.len(),
                got: other.coefficients.len(),
            });
        }
        Ok(self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a * b)
            .sum())
    }
}

fn fix_gauge(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    if let Some(first) = v.iter().find(|x| x.abs() > GAUGE_THRESHOLD) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Lowest eigenpair of the LMG Hamiltonian.
///
/// Each parity block is solved separately. If the two block minima agree to
/// within roundoff (the twofold near-degeneracy deep in the broken phase), the
/// block containing the fully polarized state k = N wins, which keeps the
/// chosen branch continuous in h.
pub fn ground_state(params: &ModelParams) -> Result<DickeGroundState> {
    let ham = build_hamiltonian(params);
    let norm = ham.norm_inf().max(f64::MIN_POSITIVE);
    let fail = |reason: String| Error::Eigensolver {
        n: params.n,
        gamma: params.gamma,
        h: params.h,
        reason,
    };

    let polarized = params.n % 2;
    let mut best: Option<(usize, tridiag::Eigenpair, Vec<usize>)> = None;
    for parity in [polarized, 1 - polarized] {
        let (indices, diag, off) = ham.parity_block(parity);
        if indices.is_empty() {
            continue;
        }
        let pair = tridiag::lowest_eigenpair(&diag, &off)
            .ok_or_else(|| fail(format!("inverse iteration failed in parity block {parity}")))?;
        let take = match &best {
            None => true,
            Some((_, current, _)) => pair.value < current.value - 1e-12 * norm.max(1.0),
        };
        if take {
            best = Some((parity, pair, indices));
        }
    }
    let (_, pair, indices) = best.ok_or_else(|| fail("empty Hamiltonian".into()))?;

    let mut coefficients = vec![0.0; ham.dim()];
    for (&k, &c) in indices.iter().zip(&pair.vector) {
        coefficients[k] = c;
    }
    fix_gauge(&mut coefficients);

    let hv = ham.apply(&coefficients);
    let energy: f64 = hv.iter().zip(&coefficients).map(|(a, b)| a * b).sum();
    let residual = hv
        .iter()
        .zip(&coefficients)
        .map(|(a, b)| (a - energy * b).powi(2))
        .sum::<f64>()
        .sqrt();
    if !(residual <= RESIDUAL_TOLERANCE * norm) {
        return Err(fail(format!(
            "residual {residual:e} exceeds {:e}",
            RESIDUAL_TOLERANCE * norm
        )));
    }

    Ok(DickeGroundState {
        params: *params,
        coefficients,
        energy,
    })
}

/// Ground state from a dense solve of the full band. Used to cross-check the
/// block solver; it does not resolve near-degenerate parity partners.
pub fn ground_state_dense(params: &ModelParams) -> Result<DickeGroundState> {
    let ham = build_hamiltonian(params);
    let eig = SymmetricEigen::new(ham.to_dense());
    let (idx, &energy) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Eigensolver {
            n: params.n,
            gamma: params.gamma,
            h: params.h,
            reason: "empty spectrum".into(),
        })?;
    let mut coefficients: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
    fix_gauge(&mut coefficients);
    Ok(DickeGroundState {
        params: *params,
        coefficients,
        energy,
    })
}

/// Ground-state energy per spin.
pub fn energy_density(state: &DickeGroundState) -> f64 {
    state.energy / state.params.n as f64
}
