//! Thermodynamic-limit closed forms.
//!
//! Everything here follows from the bosonic (Holstein-Primakoff) description
//! of the two-block LMG model at fixed τ = M/N. The reduced state of the
//! block is thermal in a Bogoliubov mode, parameterized by
//!
//! ```text
//! α   = √((h−1)/(h−γ))        h > 1
//!     = √((1−h²)/(1−γ))       h < 1
//! G⁺⁺ = 1 + (1/α − 1) τ
//! G⁻⁻ = (1 − α) τ − 1
//! μ   = α^{-1/2} √([τα + 1 − τ][τ + α(1 − τ)])
//! ```
//!
//! Note that the broken-phase α exceeds one where 1 − h² > 1 − γ (e.g. γ = 0.5
//! near h = 0). The formulas are evaluated as written there; μ is invariant
//! under α → 1/α so it stays ≥ 1 and the susceptibilities stay positive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed forms are refused within this distance of h = 1.
pub const CRITICAL_GUARD: f64 = 1e-6;

/// Largest central-difference step used for h-derivatives of closed forms.
pub const DERIVATIVE_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// h < 1, collective, twofold degenerate in the limit.
    Broken,
    /// h > 1, polarized along the field.
    Symmetric,
}

/// Which side of the transition `h` is on; errors inside the critical window.
pub fn phase(h: f64) -> Result<Phase> {
    if !(h >= 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("h must be finite and >= 0, got {h}")));
    }
    if (h - 1.0).abs() < CRITICAL_GUARD {
        return Err(Error::CriticalPoint { h });
    }
    Ok(if h < 1.0 { Phase::Broken } else { Phase::Symmetric })
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::Unsupported(format!(
            "closed forms need 0 <= gamma < 1, got {gamma}"
        )));
    }
    Ok(())
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidArgument(format!("tau must lie in (0, 1], got {tau}")));
    }
    Ok(())
}

/// Mean-field rotation angle: arccos h in the broken phase, 0 above h = 1.
pub fn theta0(h: f64) -> f64 {
    if h <= 1.0 {
        h.clamp(-1.0, 1.0).acos()
    } else {
        0.0
    }
}

/// Mean-field ground-state energy per spin, (m² − 1 − 2h)/4 with
/// m = cos θ₀ = min(h, 1).
pub fn ground_energy_density(h: f64) -> f64 {
    let m = h.min(1.0);
    (m * m - 1.0 - 2.0 * h) / 4.0
}

fn alpha_raw(h: f64, gamma: f64) -> f64 {
    if h > 1.0 {
        ((h - 1.0) / (h - gamma)).sqrt()
    } else {
        ((1.0 - h * h) / (1.0 - gamma)).sqrt()
    }
}

pub fn alpha(h: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    phase(h)?;
    Ok(alpha_raw(h, gamma))
}

/// dα/dh.
fn alpha_prime(h: f64, gamma: f64) -> f64 {
    let a = alpha_raw(h, gamma);
    if h > 1.0 {
        (1.0 - gamma) / (2.0 * a * (h - gamma).powi(2))
    } else {
        -h / ((1.0 - gamma) * a)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

fn mu_raw(alpha: f64, tau: f64) -> f64 {
    if tau == 1.0 {
        return 1.0;
    }
    ((tau * alpha + 1.0 - tau) * (tau + alpha * (1.0 - tau)) / alpha).sqrt()
}

fn greens_raw(alpha: f64, tau: f64) -> (f64, f64) {
    (1.0 + (1.0 / alpha - 1.0) * tau, (1.0 - alpha) * tau - 1.0)
}

/// Correlation parameter μ ≥ 1 of the reduced state; exactly 1 at τ = 1.
pub fn mu(alpha: f64, tau: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_tau(tau)?;
    Ok(mu_raw(alpha, tau))
}

/// Green's functions (G⁺⁺, G⁻⁻) = (⟨(a† + a)²⟩, ⟨(a† − a)²⟩).
pub fn greens(alpha: f64, tau: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    check_tau(tau)?;
    Ok(greens_raw(alpha, tau))
}

/// Global fidelity susceptibility in the thermodynamic limit.
pub fn chi_g_analytic(h: f64, gamma: f64, n: usize) -> Result<f64> {
    check_gamma(gamma)?;
    let nf = n as f64;
    Ok(match phase(h)? {
        Phase::Broken => {
            let s = 1.0 - h * h;
            nf / (4.0 * (s * (1.0 - gamma)).sqrt())
                + h * h * (h * h - gamma).powi(2) / (32.0 * (1.0 - gamma).powi(2) * s * s)
        }
        Phase::Symmetric => {
            (1.0 - gamma).powi(2) / (32.0 * (h - gamma).powi(2) * (h - 1.0).powi(2))
        }
    })
}

/// lim χ_g / N: the extensive coefficient, zero in the symmetric phase.
pub fn chi_g_extensive_density(h: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(match phase(h)? {
        Phase::Broken => 1.0 / (4.0 * ((1.0 - h * h) * (1.0 - gamma)).sqrt()),
        Phase::Symmetric => 0.0,
    })
}

fn derivative_step(h: f64) -> f64 {
    DERIVATIVE_STEP.min(1e-2 * (h - 1.0).abs())
}

/// Central difference of a closed form in h.
fn d_dh(f: impl Fn(f64) -> f64, h: f64, step: f64) -> f64 {
    (f(h + step) - f(h - step)) / (2.0 * step)
}

/// N-independent part of χ_r:
/// (∂_h μ)²/(4(μ² − 1)) + μ²/(4(μ² + 1)) [∂_h ln|μ/G⁺⁺|]².
///
/// With μ² − 1 = τ(1−τ)(α−1)²/α the first term reduces to
/// τ(1−τ)(α′)²(α+1)²/(16 μ² α³), which has no 0/0 at α = 1 or τ = 1.
fn chi_intensive(h: f64, gamma: f64, tau: f64, step: f64) -> f64 {
    let a = alpha_raw(h, gamma);
    let da = alpha_prime(h, gamma);
    let log_ratio = |x: f64| {
        let a = alpha_raw(x, gamma);
        (mu_raw(a, tau) / greens_raw(a, tau).0).abs().ln()
    };
    let m = mu_raw(a, tau);
    let dlog = d_dh(log_ratio, h, step);
    tau * (1.0 - tau) * (da * (a + 1.0)).powi(2) / (16.0 * m * m * a.powi(3))
        + m * m / (4.0 * (m * m + 1.0)) * dlog * dlog
}

/// Extensive rotation term Nτ/(4 G⁺⁺ (1 − h²)), present only for h < 1.
fn rotation_term(h: f64, gamma: f64, tau: f64) -> f64 {
    if h < 1.0 {
        let g_pp = greens_raw(alpha_raw(h, gamma), tau).0;
        tau / (4.0 * g_pp * (1.0 - h * h))
    } else {
        0.0
    }
}

fn chi_r_with_step(h: f64, gamma: f64, tau: f64, n: usize, step: f64) -> f64 {
    chi_intensive(h, gamma, tau, step) + n as f64 * rotation_term(h, gamma, tau)
}

/// Reduced fidelity susceptibility of an M = τN block in the thermodynamic
/// limit.
pub fn chi_r_analytic(h: f64, gamma: f64, tau: f64, n: usize) -> Result<f64> {
    check_gamma(gamma)?;
    check_tau(tau)?;
    phase(h)?;
    Ok(chi_r_with_step(h, gamma, tau, n, derivative_step(h)))
}

/// Same as [`chi_r_analytic`] with an explicit derivative step, for step
/// sensitivity checks.
pub fn chi_r_analytic_with_step(h: f64, gamma: f64, tau: f64, n: usize, step: f64) -> Result<f64> {
    check_gamma(gamma)?;
    check_tau(tau)?;
    phase(h)?;
    if !(step > 0.0) || step >= (h - 1.0).abs() {
        return Err(Error::InvalidArgument(format!(
            "derivative step {step} must be positive and smaller than |h - 1|"
        )));
    }
    Ok(chi_r_with_step(h, gamma, tau, n, step))
}

/// lim χ_r / N: the extensive coefficient τ/(4 G⁺⁺ (1 − h²)) for h < 1,
/// zero above.
pub fn chi_r_extensive_density(h: f64, gamma: f64, tau: f64) -> Result<f64> {
    check_gamma(gamma)?;
    check_tau(tau)?;
    phase(h)?;
    Ok(rotation_term(h, gamma, tau))
}

/// Entanglement entropy of the block:
/// ((μ+1)/2) ln((μ+1)/2) − ((μ−1)/2) ln((μ−1)/2) + x ln 2, x = 1 for h < 1.
pub fn entropy_analytic(h: f64, gamma: f64, tau: f64) -> Result<f64> {
    check_gamma(gamma)?;
    check_tau(tau)?;
    let degeneracy = match phase(h)? {
        Phase::Broken => std::f64::consts::LN_2,
        Phase::Symmetric => 0.0,
    };
    let m = mu_raw(alpha_raw(h, gamma), tau);
    let plus = 0.5 * (m + 1.0);
    let minus = 0.5 * (m - 1.0);
    let thermal = if minus > 0.0 {
        plus * plus.ln() - minus * minus.ln()
    } else {
        0.0
    };
    Ok(thermal + degeneracy)
}

/// All closed-form quantities at one (h, γ, τ, N).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticPoint {
    pub h: f64,
    pub gamma: f64,
    pub tau: f64,
    pub n: usize,
    pub phase: Phase,
    pub theta0: f64,
    pub alpha: f64,
    pub mu: f64,
    pub g_pp: f64,
    pub g_mm: f64,
    /// Bogoliubov angle arctanh[(μ − G⁺⁺)/(μ + G⁺⁺)].
    pub varphi: f64,
    /// Pseudoenergy ln[(μ+1)/(μ−1)]; absent for a pure block (μ = 1).
    pub epsilon: Option<f64>,
    pub chi_g: f64,
    pub chi_r: f64,
    pub eta: f64,
    pub entropy: f64,
}

impl AnalyticPoint {
    pub fn evaluate(h: f64, gamma: f64, tau: f64, n: usize) -> Result<Self> {
        let phase = phase(h)?;
        let alpha = alpha(h, gamma)?;
        let mu = mu(alpha, tau)?;
        let (g_pp, g_mm) = greens(alpha, tau)?;
        let chi_g = chi_g_analytic(h, gamma, n)?;
        let chi_r = chi_r_analytic(h, gamma, tau, n)?;
        Ok(Self {
            h,
            gamma,
            tau,
            n,
            phase,
            theta0: theta0(h),
            alpha,
            mu,
            g_pp,
            g_mm,
            varphi: ((mu - g_pp) / (mu + g_pp)).atanh(),
            epsilon: (mu > 1.0).then(|| ((mu + 1.0) / (mu - 1.0)).ln()),
            chi_g,
            chi_r,
            eta: chi_r / chi_g,
            entropy: entropy_analytic(h, gamma, tau)?,
        })
    }
}
