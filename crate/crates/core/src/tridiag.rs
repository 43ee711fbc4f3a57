//! Extremal eigenpair of a real symmetric tridiagonal matrix.
//!
//! The lowest eigenvalue is bracketed by Sturm-sequence bisection and the
//! eigenvector follows from shifted inverse iteration. The shift sits just
//! below the lowest eigenvalue, so the shifted matrix is positive definite and
//! the unpivoted LDLᵀ factorization is stable.

/// Lowest eigenpair of a symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub(crate) struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// Number of eigenvalues strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += off[i - 1].abs();
        }
        if i + 1 < n {
            r += off[i].abs();
        }
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// Solve (T - shift I) x = b in place using an LDLᵀ factorization.
/// Returns `false` if a non-positive pivot shows up.
fn shifted_solve(diag: &[f64], off: &[f64], shift: f64, b: &mut [f64]) -> bool {
    let n = diag.len();
    let mut d = vec![0.0; n];
    let mut l = vec![0.0; n.saturating_sub(1)];
    d[0] = diag[0] - shift;
    if d[0] <= 0.0 {
        return false;
    }
    for i in 1..n {
        l[i - 1] = off[i - 1] / d[i - 1];
        d[i] = diag[i] - shift - l[i - 1] * off[i - 1];
        if d[i] <= 0.0 {
            return false;
        }
    }
    for i in 1..n {
        b[i] -= l[i - 1] * b[i - 1];
    }
    for i in 0..n {
        b[i] /= d[i];
    }
    for i in (0..n.saturating_sub(1)).rev() {
        b[i] -= l[i] * b[i + 1];
    }
    true
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn apply(diag: &[f64], off: &[f64], v: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut s = diag[i] * v[i];
            if i > 0 {
                s += off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += off[i] * v[i + 1];
            }
            s
        })
        .collect()
}

pub(crate) fn lowest_eigenpair(diag: &[f64], off: &[f64]) -> Option<Eigenpair> {
    let n = diag.len();
    assert_eq!(off.len(), n.saturating_sub(1));
    if n == 0 {
        return None;
    }
    if n == 1 {
        return Some(Eigenpair {
            value: diag[0],
            vector: vec![1.0],
        });
    }

    let (mut lo, mut hi) = gershgorin(diag, off);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * scale);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale {
            break;
        }
        if sturm_count(diag, off, mid, pivmin) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    let mut gap = 4.0 * f64::EPSILON * scale;
    let mut vector = vec![1.0; n];
    normalize(&mut vector);
    let mut converged = false;
    for _attempt in 0..40 {
        let shift = lo - gap;
        let mut v = vec![1.0; n];
        normalize(&mut v);
        let mut ok = true;
        for _ in 0..4 {
            if !shifted_solve(diag, off, shift, &mut v) {
                ok = false;
                break;
            }
            if !(normalize(&mut v).is_finite()) {
                ok = false;
                break;
            }
        }
        if ok {
            vector = v;
            converged = true;
            break;
        }
        gap *= 4.0;
    }
    if !converged {
        return None;
    }

    let tv = apply(diag, off, &vector);
    let value: f64 = tv.iter().zip(&vector).map(|(a, b)| a * b).sum();
    Some(Eigenpair { value, vector })
}
