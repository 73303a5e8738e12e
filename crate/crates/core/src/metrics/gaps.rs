//! Closed-form gap bounds and outage-rate lower bounds.

use crate::error::{CoreError, Result};
use crate::metrics::capacity::rayleigh_icdf;
use crate::metrics::{GapBound, GapRegime};

/// Outage probabilities must stay below this for the outage-capacity gap
/// to be finite (`F(eps) < 1`).
pub const EPS_REGIME_LIMIT: f64 = 0.6321;

fn two_pi_e() -> f64 {
    2.0 * std::f64::consts::PI * std::f64::consts::E
}

/// Gap of the K-user full-CSI scheme to the Gaussian capacity region, in
/// bits per real dimension:
/// `Δ1 = 1 + log2(2πe 5ψ)/2`, `Δk = 1 + log2(2πe 6ψ)/2` for `k >= 2`.
pub fn gap_bound_ch5(psi: f64, users: usize) -> Result<GapBound> {
    if !psi.is_finite() || psi <= 0.0 {
        return Err(CoreError::InvalidParameter("psi must be positive".into()));
    }
    if users == 0 {
        return Err(CoreError::InvalidParameter("need at least one user".into()));
    }
    let d1 = 1.0 + 0.5 * (two_pi_e() * 5.0 * psi).log2();
    let dk = 1.0 + 0.5 * (two_pi_e() * 6.0 * psi).log2();
    let mut per_user = vec![d1];
    per_user.extend(std::iter::repeat_n(dk, users - 1));
    Ok(GapBound {
        per_user,
        regime: GapRegime::Ch5Full,
        psi,
        eps: None,
    })
}

/// Gap of the statistical-CSI scheme to the outage capacity region.
///
/// With `Ψ = log2(2πe 18ψ)/2`: the strongest user gets `2.5 + Ψ`, the
/// weakest `1 + Ψ`, and every middle user
/// `1.5 - log2(F(eps_k))/2 + Ψ`. Requires every `eps < 0.6321`.
pub fn gap_bound_ch6(psi: f64, eps: &[f64]) -> Result<GapBound> {
    if !psi.is_finite() || psi <= 0.0 {
        return Err(CoreError::InvalidParameter("psi must be positive".into()));
    }
    if eps.len() < 2 {
        return Err(CoreError::InvalidParameter(
            "outage gap bound needs at least two users".into(),
        ));
    }
    for &e in eps {
        if !(0.0..EPS_REGIME_LIMIT).contains(&e) {
            return Err(CoreError::OutOfRegime(format!(
                "outage probability {e} is out of regime: bounds require eps < {EPS_REGIME_LIMIT}"
            )));
        }
    }
    let psi_term = 0.5 * (two_pi_e() * 18.0 * psi).log2();
    let k = eps.len();
    let per_user: Vec<f64> = (0..k)
        .map(|i| {
            if i == 0 {
                2.5 + psi_term
            } else if i == k - 1 {
                1.0 + psi_term
            } else {
                1.5 - 0.5 * rayleigh_icdf(eps[i]).log2() + psi_term
            }
        })
        .collect();
    Ok(GapBound {
        per_user,
        regime: GapRegime::Ch6Outage,
        psi,
        eps: Some(eps.to_vec()),
    })
}

/// Closed-form lower bounds on the per-user outage rates of the
/// statistical-CSI scheme (may be negative; reported as-is).
///
/// With `Ψ = log2(2πe 18ψ)/2` and `F = -ln(1-eps)`:
/// user 1: `min(m1, m1 + log2(F)/2) - 1 - Ψ`;
/// middle: `min(mk, log2(F snr̄_k)/2 - Σ_{i>k} m_i) - Ψ`;
/// user K: `min(mK, log2(F snr̄_K)/2) - Ψ`.
pub fn outage_rate_lower_bound_ch6(
    psi: f64,
    m: &[u32],
    eps: &[f64],
    mean_snrs_linear: &[f64],
) -> Result<Vec<f64>> {
    if !psi.is_finite() || psi <= 0.0 {
        return Err(CoreError::InvalidParameter("psi must be positive".into()));
    }
    if m.is_empty() || m.len() != eps.len() || m.len() != mean_snrs_linear.len() {
        return Err(CoreError::InvalidParameter(
            "m, eps and snr lists must be non-empty and matching".into(),
        ));
    }
    if eps.iter().any(|&e| !(0.0 < e && e < 1.0)) {
        return Err(CoreError::InvalidParameter(
            "outage probabilities must lie in (0,1)".into(),
        ));
    }
    let psi_term = 0.5 * (two_pi_e() * 18.0 * psi).log2();
    let k = m.len();
    let bounds = (0..k)
        .map(|i| {
            let f = rayleigh_icdf(eps[i]);
            let mi = f64::from(m[i]);
            if i == 0 {
                mi.min(mi + 0.5 * f.log2()) - 1.0 - psi_term
            } else if i == k - 1 {
                mi.min(0.5 * (f * mean_snrs_linear[i]).log2()) - psi_term
            } else {
                let tail: u32 = m[i + 1..].iter().sum();
                mi.min(0.5 * (f * mean_snrs_linear[i]).log2() - f64::from(tail)) - psi_term
            }
        })
        .collect();
    Ok(bounds)
}
