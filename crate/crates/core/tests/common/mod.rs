//! Brute-force oracles over the full 2^N product Hilbert space.
//!
//! Bit i of a basis index is spin i, set bit = spin up (σ_z = +1). These
//! routines never touch the Dicke-basis code paths they are used to check.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Binomial coefficient as f64, exact for the sizes used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Collective operators S_x, i·S_y (real), S_z on N spins.
fn collective(n: usize) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let dim = 1usize << n;
    let mut sx = DMatrix::zeros(dim, dim);
    let mut isy = DMatrix::zeros(dim, dim);
    let mut sz = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        for i in 0..n {
            let up = (s >> i) & 1 == 1;
            let t = s ^ (1 << i);
            sx[(t, s)] += 0.5;
            // σ_y|↑⟩ = i|↓⟩, σ_y|↓⟩ = −i|↑⟩, so iσ_y|↑⟩ = −|↓⟩, iσ_y|↓⟩ = |↑⟩.
            isy[(t, s)] += if up { -0.5 } else { 0.5 };
            sz[(s, s)] += if up { 0.5 } else { -0.5 };
        }
    }
    (sx, isy, sz)
}

/// H = −(1/N)(S_x² + γS_y²) − hS_z in the product basis.
pub fn pauli_hamiltonian(n: usize, gamma: f64, h: f64) -> DMatrix<f64> {
    let (sx, isy, sz) = collective(n);
    let sy2 = -(&isy * &isy);
    -(&sx * &sx + sy2 * gamma) / n as f64 - sz * h
}

/// Columns are the normalized symmetric Dicke states with k = 0..N up spins.
pub fn dicke_embedding(n: usize) -> DMatrix<f64> {
    let dim = 1usize << n;
    let mut p = DMatrix::zeros(dim, n + 1);
    for s in 0..dim {
        let k = (s as u64).count_ones() as usize;
        p[(s, k)] = 1.0 / binomial(n, k).sqrt();
    }
    p
}

/// Hamiltonian projected onto the symmetric J = N/2 subspace.
pub fn projected_hamiltonian(n: usize, gamma: f64, h: f64) -> DMatrix<f64> {
    let p = dicke_embedding(n);
    p.transpose() * pauli_hamiltonian(n, gamma, h) * p
}

pub fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Reduced density matrix of the first `m_sub` spins of a symmetric state
/// given by Dicke coefficients, expressed in the subsystem Dicke basis.
pub fn brute_force_reduction(coefficients: &[f64], n: usize, m_sub: usize) -> DMatrix<f64> {
    let psi: DVector<f64> = dicke_embedding(n) * DVector::from_column_slice(coefficients);
    let da = 1usize << m_sub;
    let db = 1usize << (n - m_sub);
    // ψ[a + b·2^M] with a the low M bits (subsystem A).
    let mut amp = DMatrix::zeros(da, db);
    for s in 0..(1usize << n) {
        amp[(s & (da - 1), s >> m_sub)] = psi[s];
    }
    let rho_full = &amp * amp.transpose();
    let pa = dicke_embedding(m_sub);
    pa.transpose() * rho_full * pa
}
