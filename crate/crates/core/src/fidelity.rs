//! Uhlmann fidelity, Bures distance and fidelity susceptibility.
//!
//! Fidelities are evaluated through factorizations ρ = X Xᵀ, σ = Y Yᵀ:
//!
//! ```text
//! d_B²(ρ, σ) = 2 (1 − F) = min_W ‖X − Y W‖²,   W orthogonal
//! ```
//!
//! with the minimizer W = U Vᵀ from the SVD YᵀX = U Σ Vᵀ, so F = tr Σ.
//! Computing the distance as an explicit difference keeps full relative
//! precision when the two states are close, which is the regime that
//! matters for a susceptibility. For reduced states coming from `reduce`
//! the amplitude factor is used directly; otherwise X = √ρ.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{ground_state, DickeGroundState, ModelParams};
use crate::reduced::{reduce, von_neumann_entropy, Bipartition, ReducedDensity};

/// Eigenvalue pairs whose sum is at or below this are outside the support
/// and carry no weight in the spectral susceptibility.
pub const SUPPORT_CUTOFF: f64 = 2e-12;

/// Relative slack allowed on χ_r ≤ χ_g and η ≤ 1.
pub const INEQUALITY_SLACK: f64 = 1e-6;

/// Squared Bures distances at or below this are rounding noise. In
/// susceptibility units the floor is this value over δ².
pub const DISTANCE_NOISE_FLOOR: f64 = 1e-28;

/// Relative drift between δ and δ/2 above which a point is reported as
/// step-sensitive.
pub const DRIFT_WARNING: f64 = 1e-3;

/// Anything that has a fidelity with a state of the same kind.
pub trait FidelityState {
    /// Squared Bures distance 2(1 − F).
    fn bures_distance_sq(&self, other: &Self) -> Result<f64>;

    fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok((1.0 - 0.5 * self.bures_distance_sq(other)?).clamp(0.0, 1.0))
    }
}

impl FidelityState for DickeGroundState {
    /// For pure states this is 2(1 − |⟨a|b⟩|).
    fn bures_distance_sq(&self, other: &Self) -> Result<f64> {
        let a = self.coefficients();
        let b = other.coefficients();
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        let sign = if self.overlap(other)? < 0.0 { -1.0 } else { 1.0 };
        let d2: f64 = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x / na - sign * y / nb).powi(2))
            .sum();
        Ok(d2.clamp(0.0, 2.0))
    }
}

impl FidelityState for ReducedDensity {
    fn bures_distance_sq(&self, other: &Self) -> Result<f64> {
        bures_distance_sq(self, other)
    }
}

/// min_W ‖X − Y W‖² over orthogonal W, for factors of equal shape. Both
/// factors are rescaled to unit norm first; a residual norm error η then
/// only perturbs the result by a relative η.
fn factored_distance_sq(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let x = x / x.norm();
    let y = y / y.norm();
    let cross = y.transpose() * &x;
    let Some(rotation) = linalg::polar_rotation(&cross) else {
        // Propagates as a non-finite distance.
        return f64::NAN;
    };
    (x - &y * rotation).norm_squared().clamp(0.0, 2.0)
}

fn check_dims(rho: &ReducedDensity, sigma: &ReducedDensity) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    Ok(())
}

/// Squared Bures distance 2[1 − F(ρ, σ)].
pub fn bures_distance_sq(rho: &ReducedDensity, sigma: &ReducedDensity) -> Result<f64> {
    check_dims(rho, sigma)?;
    match (rho.factor(), sigma.factor()) {
        (Some(x), Some(y)) if x.shape() == y.shape() => Ok(factored_distance_sq(x, y)),
        _ => Ok(factored_distance_sq(
            &rho.spectrum().sqrt_matrix(),
            &sigma.spectrum().sqrt_matrix(),
        )),
    }
}

/// Uhlmann fidelity tr √(√ρ σ √ρ).
pub fn uhlmann_fidelity(rho: &ReducedDensity, sigma: &ReducedDensity) -> Result<f64> {
    rho.fidelity(sigma)
}

/// Finite-difference step for the susceptibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Delta {
    /// 10⁻³ · max(1, |h|), with a δ/2 drift probe.
    Auto,
    Fixed(f64),
}

impl Delta {
    pub fn resolve(&self, h: f64) -> f64 {
        match *self {
            Delta::Auto => 1e-3 * h.abs().max(1.0),
            Delta::Fixed(d) => d,
        }
    }
}

impl Default for Delta {
    fn default() -> Self {
        Delta::Auto
    }
}

/// The two points a two-state stencil compares at `h`: symmetric around h,
/// or forward from h when h − δ/2 would leave the h ≥ 0 domain.
pub fn fidelity_stencil(h: f64, delta: f64) -> (f64, f64) {
    if h - 0.5 * delta < 0.0 {
        (h, h + delta)
    } else {
        (h - 0.5 * delta, h + 0.5 * delta)
    }
}

/// χ = 2[1 − F(state(h − δ/2), state(h + δ/2))] / δ².
pub fn fs_finite_difference<S, F>(value_at: F, h: f64, delta: f64) -> Result<f64>
where
    S: FidelityState,
    F: Fn(f64) -> Result<S>,
{
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let (lo, hi) = fidelity_stencil(h, delta);
    let a = value_at(lo)?;
    let b = value_at(hi)?;
    let chi = a.bures_distance_sq(&b)? / (delta * delta);
    if !chi.is_finite() {
        return Err(Error::NonFinite {
            h,
            delta,
            what: "finite-difference susceptibility".into(),
        });
    }
    Ok(chi)
}

/// ½ Σ_{n,m} |⟨ψ_n|∂ρ|ψ_m⟩|² / (p_n + p_m) in the eigenbasis of ρ.
///
/// The diagonal terms are (∂p_n)²/(4p_n); the off-diagonal terms equal
/// ½ (p_n − p_m)²/(p_n + p_m) |⟨ψ_n|∂ψ_m⟩|². Summing the matrix elements of
/// ∂ρ directly keeps degenerate eigenvalue pairs well defined.
pub fn fs_from_derivative(rho: &ReducedDensity, drho: &DMatrix<f64>) -> Result<f64> {
    if drho.shape() != (rho.dim(), rho.dim()) {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: drho.nrows(),
        });
    }
    let spectrum = rho.spectrum();
    let v = spectrum.vectors();
    let p = spectrum.values();
    let rotated = v.transpose() * drho * v;
    let mut chi = 0.0;
    for n in 0..p.len() {
        for m in 0..p.len() {
            let w = p[n] + p[m];
            if w > SUPPORT_CUTOFF {
                chi += rotated[(n, m)].powi(2) / w;
            }
        }
    }
    Ok(0.5 * chi)
}

/// Spectral susceptibility from ρ at h − δ, h and h + δ, with a central
/// difference for ∂ρ.
pub fn fs_spectral(
    rho_minus: &ReducedDensity,
    rho: &ReducedDensity,
    rho_plus: &ReducedDensity,
    delta: f64,
) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    check_dims(rho, rho_minus)?;
    check_dims(rho, rho_plus)?;
    let drho = (rho_plus.matrix() - rho_minus.matrix()) / (2.0 * delta);
    let chi = fs_from_derivative(rho, &drho)?;
    if !chi.is_finite() {
        return Err(Error::NonFinite {
            h: f64::NAN,
            delta,
            what: "spectral susceptibility".into(),
        });
    }
    Ok(chi)
}

/// How a susceptibility was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FiniteDifference,
    Spectral,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::FiniteDifference => "finite-difference",
            Method::Spectral => "spectral",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "finite-difference" | "fd" => Ok(Method::FiniteDifference),
            "spectral" => Ok(Method::Spectral),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

/// Numeric results at one field value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub h: f64,
    pub n: usize,
    pub m_sub: usize,
    pub tau: f64,
    pub delta: f64,
    pub chi_g: f64,
    pub chi_r: f64,
    /// χ_r / χ_g; absent when χ_g is at the rounding floor.
    pub eta: Option<f64>,
    pub entropy: f64,
    pub method: Method,
    /// Largest relative change of χ_g, χ_r when δ is halved, if probed.
    pub delta_drift: Option<f64>,
}

impl SweepPoint {
    /// Susceptibility below which a value is indistinguishable from zero.
    pub fn noise_floor(&self) -> f64 {
        DISTANCE_NOISE_FLOOR / (self.delta * self.delta)
    }

    /// 0 ≤ χ_r ≤ χ_g (1 + slack) up to the noise floor, η ∈ [0, 1 + slack],
    /// all values finite.
    pub fn check_invariants(&self) -> Result<()> {
        let finite = [self.chi_g, self.chi_r, self.entropy]
            .iter()
            .chain(self.eta.iter())
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::NonFinite {
                h: self.h,
                delta: self.delta,
                what: "sweep point".into(),
            });
        }
        if self.chi_g < 0.0 || self.chi_r < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "negative susceptibility at h={}: chi_g={}, chi_r={}",
                self.h, self.chi_g, self.chi_r
            )));
        }
        if self.chi_r > self.chi_g * (1.0 + INEQUALITY_SLACK) + self.noise_floor() {
            return Err(Error::InvalidArgument(format!(
                "chi_r={} exceeds chi_g={} at h={}",
                self.chi_r, self.chi_g, self.h
            )));
        }
        if let Some(eta) = self.eta {
            if !(0.0..=1.0 + INEQUALITY_SLACK).contains(&eta) {
                return Err(Error::InvalidArgument(format!("eta={eta} outside [0, 1] at h={}", self.h)));
            }
        }
        Ok(())
    }
}

struct Evaluated {
    chi_g: f64,
    chi_r: f64,
    entropy: f64,
}

fn evaluate_fd(base: &ModelParams, part: &Bipartition, h: f64, delta: f64) -> Result<Evaluated> {
    let states = |x: f64| ground_state(&base.with_h(x)?);
    let (lo, hi) = fidelity_stencil(h, delta);
    let a = states(lo)?;
    let b = states(hi)?;
    let chi_g = a.bures_distance_sq(&b)? / (delta * delta);
    let chi_r = reduce(&a, part)?.bures_distance_sq(&reduce(&b, part)?)? / (delta * delta);
    let entropy = von_neumann_entropy(&reduce(&states(h)?, part)?);
    Ok(Evaluated {
        chi_g,
        chi_r,
        entropy,
    })
}

fn pure_density(state: &DickeGroundState) -> Result<ReducedDensity> {
    let c = DVector::from_column_slice(state.coefficients());
    ReducedDensity::from_factor(DMatrix::from_columns(&[c]))
}

fn evaluate_spectral(base: &ModelParams, part: &Bipartition, h: f64, delta: f64) -> Result<Evaluated> {
    let states = |x: f64| ground_state(&base.with_h(x)?);
    let forward = h - delta < 0.0;
    let (s0, s1, s2) = if forward {
        (states(h)?, states(h + delta)?, states(h + 2.0 * delta)?)
    } else {
        (states(h - delta)?, states(h)?, states(h + delta)?)
    };
    let derivative = |a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>| {
        if forward {
            (a * -3.0 + b * 4.0 - c) / (2.0 * delta)
        } else {
            (c - a) / (2.0 * delta)
        }
    };
    let at_h = if forward { &s0 } else { &s1 };

    let g = [pure_density(&s0)?, pure_density(&s1)?, pure_density(&s2)?];
    let g_here = if forward { &g[0] } else { &g[1] };
    let chi_g = fs_from_derivative(g_here, &derivative(g[0].matrix(), g[1].matrix(), g[2].matrix()))?;

    let r = [reduce(&s0, part)?, reduce(&s1, part)?, reduce(&s2, part)?];
    let r_here = if forward { &r[0] } else { &r[1] };
    let chi_r = fs_from_derivative(r_here, &derivative(r[0].matrix(), r[1].matrix(), r[2].matrix()))?;

    debug_assert_eq!(at_h.params().h(), h);
    Ok(Evaluated {
        chi_g,
        chi_r,
        entropy: von_neumann_entropy(r_here),
    })
}

/// Compute one sweep point. The model is `base` with its field replaced by
/// `h`; `part` must refer to the same N.
pub fn sweep_point(
    base: &ModelParams,
    part: &Bipartition,
    h: f64,
    delta: Delta,
    method: Method,
) -> Result<SweepPoint> {
    let inner = || -> Result<SweepPoint> {
        if part.n() != base.n() {
            return Err(Error::DimensionMismatch {
                expected: base.n(),
                got: part.n(),
            });
        }
        let step = delta.resolve(h);
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument(format!("delta must be positive, got {step}")));
        }
        let eval = |d: f64| match method {
            Method::FiniteDifference => evaluate_fd(base, part, h, d),
            Method::Spectral => evaluate_spectral(base, part, h, d),
        };
        let main = eval(step)?;
        let delta_drift = if delta == Delta::Auto {
            let half = eval(0.5 * step)?;
            let rel = |a: f64, b: f64| {
                let scale = a.abs().max(b.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (a - b).abs() / scale
                }
            };
            Some(rel(main.chi_g, half.chi_g).max(rel(main.chi_r, half.chi_r)))
        } else {
            None
        };
        let floor = DISTANCE_NOISE_FLOOR / (step * step);
        let eta = (main.chi_g > floor).then(|| main.chi_r / main.chi_g);
        let point = SweepPoint {
            h,
            n: part.n(),
            m_sub: part.m_sub(),
            tau: part.tau(),
            delta: step,
            chi_g: main.chi_g,
            chi_r: main.chi_r,
            eta,
            entropy: main.entropy,
            method,
            delta_drift,
        };
        point.check_invariants()?;
        Ok(point)
    };
    inner().map_err(|e| e.at(h))
}

/// Outcome of one grid point when failures are recorded instead of fatal.
#[derive(Debug, Clone, PartialEq)]
pub enum PointOutcome {
    Ok(SweepPoint),
    Failed { h: f64, error: Error },
}

/// Sweep a monotone h grid at fixed N, γ and bipartition.
///
/// Points are independent; callers may evaluate `sweep_point` over the grid
/// in parallel and get identical results. With `skip_errors` false the
/// first failing point aborts the sweep.
pub fn sweep(
    base: &ModelParams,
    part: &Bipartition,
    h_grid: &[f64],
    delta: Delta,
    method: Method,
    skip_errors: bool,
) -> Result<Vec<PointOutcome>> {
    if h_grid.is_empty() {
        return Err(Error::InvalidArgument("empty h grid".into()));
    }
    let increasing = h_grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = h_grid.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::InvalidArgument("h grid must be strictly monotone".into()));
    }
    let mut out = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        match sweep_point(base, part, h, delta, method) {
            Ok(p) => out.push(PointOutcome::Ok(p)),
            Err(e) if skip_errors => out.push(PointOutcome::Failed { h, error: e }),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(values: &[f64]) -> ReducedDensity {
        ReducedDensity::from_matrix(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
            .unwrap()
    }

    fn pure(v: &[f64]) -> ReducedDensity {
        let v = DVector::from_column_slice(v).normalize();
        ReducedDensity::from_matrix(&v * v.transpose()).unwrap()
    }

    #[test]
    fn identical_states() {
        let rho = diag(&[0.2, 0.3, 0.5]);
        assert_abs_diff_eq!(uhlmann_fidelity(&rho, &rho).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(bures_distance_sq(&rho, &rho).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn commuting_states_give_classical_fidelity() {
        let a = diag(&[0.5, 0.5]);
        let b = diag(&[0.9, 0.1]);
        let f = uhlmann_fidelity(&a, &b).unwrap();
        assert_abs_diff_eq!(f, 0.45f64.sqrt() + 0.05f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(f, 0.894427, epsilon = 1e-6);
        assert_abs_diff_eq!(bures_distance_sq(&a, &b).unwrap(), 0.211146, epsilon = 1e-6);
        assert_abs_diff_eq!(uhlmann_fidelity(&b, &a).unwrap(), f, epsilon = 1e-14);
    }

    #[test]
    fn orthogonal_pure_states() {
        let a = pure(&[1.0, 0.0, 0.0]);
        let b = pure(&[0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(uhlmann_fidelity(&a, &b).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(bures_distance_sq(&a, &b).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn pure_states_give_absolute_overlap() {
        let u = [0.3, -0.5, 0.8, 0.1];
        let w = [0.6, 0.2, -0.4, 0.5];
        let nu: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nw: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let overlap = u.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / (nu * nw);
        let f = uhlmann_fidelity(&pure(&u), &pure(&w)).unwrap();
        assert_abs_diff_eq!(f, overlap.abs(), epsilon = 1e-10);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(uhlmann_fidelity(&diag(&[0.5, 0.5]), &diag(&[0.2, 0.3, 0.5])).is_err());
    }

    #[test]
    fn constant_family_has_zero_susceptibility() {
        let rho = diag(&[0.25, 0.75]);
        let chi = fs_finite_difference(|_| Ok(rho.clone()), 0.7, 1e-3).unwrap();
        assert_eq!(chi, 0.0);
        let chi = fs_spectral(&rho, &rho, &rho, 1e-3).unwrap();
        assert_eq!(chi, 0.0);
    }

    #[test]
    fn two_level_classical_family() {
        // ρ(h) = diag(h, 1 − h): χ = 1/(4h) + 1/(4(1 − h)).
        let family = |h: f64| diag(&[h, 1.0 - h]);
        let d = 1e-4;
        for h in [0.2, 0.5, 0.8] {
            let exact = 0.25 / h + 0.25 / (1.0 - h);
            let spectral = fs_spectral(&family(h - d), &family(h), &family(h + d), d).unwrap();
            assert_abs_diff_eq!(spectral, exact, epsilon = 1e-6 * exact);
            let fd = fs_finite_difference(|x| Ok(family(x)), h, d).unwrap();
            assert_abs_diff_eq!(fd, exact, epsilon = 1e-6 * exact);
        }
        let at_half = fs_spectral(&family(0.5 - d), &family(0.5), &family(0.5 + d), d).unwrap();
        assert_abs_diff_eq!(at_half, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn rotating_pure_state() {
        // |ψ(h)⟩ = (cos h, sin h): χ = 1.
        let family = |h: f64| pure(&[h.cos(), h.sin()]);
        let d = 1e-4;
        let fd = fs_finite_difference(|x| Ok(family(x)), 0.4, d).unwrap();
        assert_abs_diff_eq!(fd, 1.0, epsilon = 1e-7);
        let spectral = fs_spectral(&family(0.4 - d), &family(0.4), &family(0.4 + d), d).unwrap();
        assert_abs_diff_eq!(spectral, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn rejects_bad_delta() {
        let rho = diag(&[0.25, 0.75]);
        assert!(fs_finite_difference(|_| Ok(rho.clone()), 0.7, 0.0).is_err());
        assert!(fs_spectral(&rho, &rho, &rho, -1.0).is_err());
    }

    #[test]
    fn non_finite_is_reported() {
        // δ² underflows to zero.
        let err = fs_finite_difference(|h| Ok(diag(&[h, 1.0 - h])), 0.5, 1e-200).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn factor_and_sqrt_routes_agree() {
        let base = ModelParams::new(24, 0.5, 0.8).unwrap();
        let part = Bipartition::new(24, 9).unwrap();
        let a = reduce(&ground_state(&base).unwrap(), &part).unwrap();
        let b = reduce(&ground_state(&base.with_h(0.85).unwrap()).unwrap(), &part).unwrap();
        let plain_a = ReducedDensity::from_matrix(a.matrix().clone()).unwrap();
        let plain_b = ReducedDensity::from_matrix(b.matrix().clone()).unwrap();
        let via_factor = bures_distance_sq(&a, &b).unwrap();
        let via_sqrt = bures_distance_sq(&plain_a, &plain_b).unwrap();
        assert_abs_diff_eq!(via_factor, via_sqrt, epsilon = 1e-10);
    }

    #[test]
    fn point_at_domain_edge_uses_forward_stencil() {
        let base = ModelParams::new(16, 0.5, 0.0).unwrap();
        let part = Bipartition::new(16, 8).unwrap();
        for method in [Method::FiniteDifference, Method::Spectral] {
            let p = sweep_point(&base, &part, 0.0, Delta::Fixed(1e-3), method).unwrap();
            assert!(p.chi_g.is_finite() && p.chi_r >= 0.0);
        }
    }

    #[test]
    fn sweep_grid_validation() {
        let base = ModelParams::new(8, 0.5, 1.0).unwrap();
        let part = Bipartition::new(8, 4).unwrap();
        assert!(sweep(&base, &part, &[], Delta::Auto, Method::FiniteDifference, false).is_err());
        assert!(sweep(&base, &part, &[0.5, 0.4, 0.6], Delta::Auto, Method::FiniteDifference, false).is_err());
        let out = sweep(&base, &part, &[0.5, 1.5], Delta::Auto, Method::FiniteDifference, false).unwrap();
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn failed_points_are_recorded_when_skipping() {
        let base = ModelParams::new(8, 0.5, 1.0).unwrap();
        let part = Bipartition::new(8, 4).unwrap();
        let grid = [0.5, 1.0];
        let out = sweep(&base, &part, &grid, Delta::Fixed(-1.0), Method::FiniteDifference, true).unwrap();
        assert!(out.iter().all(|o| matches!(o, PointOutcome::Failed { .. })));
        assert!(sweep(&base, &part, &grid, Delta::Fixed(-1.0), Method::FiniteDifference, false).is_err());
    }

    #[test]
    fn isotropic_plateau_has_undefined_eta() {
        // γ = 1 ground states are single Dicke states, constant between level crossings.
        let base = ModelParams::new(10, 1.0, 0.5).unwrap();
        let part = Bipartition::new(10, 5).unwrap();
        let p = sweep_point(&base, &part, 0.45, Delta::Fixed(1e-3), Method::FiniteDifference).unwrap();
        assert!(p.chi_g < p.noise_floor());
        assert!(p.chi_r < p.noise_floor());
        assert_eq!(p.eta, None);
    }
}
