//! Gaussian broadcast and outage capacity regions.

use crate::error::{CoreError, Result};

fn validate_split(power_split: &[f64]) -> Result<()> {
    if power_split.is_empty() {
        return Err(CoreError::InvalidParameter("empty power split".into()));
    }
    if power_split.iter().any(|&a| a < 0.0) {
        return Err(CoreError::InvalidParameter(
            "power split entries must be non-negative".into(),
        ));
    }
    let sum: f64 = power_split.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(CoreError::InvalidParameter(format!(
            "power split must sum to 1, got {sum}"
        )));
    }
    Ok(())
}

/// Per-user rates of the Gaussian broadcast channel for one power split.
///
/// Users are ordered strongest first; user `k` sees the power of users
/// `1..k-1` as interference:
/// `C_k = log2(1 + P_k snr_k / (snr_k Σ_{i<k} P_i + 1)) / 2`.
pub fn gaussian_bc_capacity(snrs: &[f64], power_split: &[f64]) -> Result<Vec<f64>> {
    validate_split(power_split)?;
    if snrs.len() != power_split.len() {
        return Err(CoreError::InvalidParameter(
            "snr list and power split must have matching lengths".into(),
        ));
    }
    if snrs.iter().any(|&s| s <= 0.0) {
        return Err(CoreError::InvalidParameter("SNRs must be positive".into()));
    }
    let mut rates = Vec::with_capacity(snrs.len());
    let mut interference = 0.0;
    for (k, (&snr, &pk)) in snrs.iter().zip(power_split).enumerate() {
        let c = 0.5 * (1.0 + pk * snr / (snr * interference + 1.0)).log2();
        rates.push(c);
        let _ = k;
        interference += pk;
    }
    Ok(rates)
}

/// Rayleigh inverse CDF factor `F(eps) = -ln(1 - eps)`.
pub fn rayleigh_icdf(eps: f64) -> f64 {
    -(1.0 - eps).ln()
}

/// Per-user outage capacities at target outage probabilities, for mean
/// channel gains, total power `p` and one power split.
///
/// `F_k(eps) = mean_gain_k (-ln(1 - eps_k))`; user ordering must follow
/// `F_1(eps_1) >= ... >= F_K(eps_K)`.
pub fn outage_capacity(
    eps: &[f64],
    mean_gains: &[f64],
    p: f64,
    power_split: &[f64],
) -> Result<Vec<f64>> {
    validate_split(power_split)?;
    if eps.len() != mean_gains.len() || eps.len() != power_split.len() {
        return Err(CoreError::InvalidParameter(
            "eps, gains and split must have matching lengths".into(),
        ));
    }
    if !p.is_finite() || p <= 0.0 {
        return Err(CoreError::InvalidParameter("power must be positive".into()));
    }
    if eps.iter().any(|&e| !(0.0..1.0).contains(&e)) {
        return Err(CoreError::InvalidParameter(
            "outage probabilities must lie in [0,1)".into(),
        ));
    }
    let f: Vec<f64> = eps
        .iter()
        .zip(mean_gains)
        .map(|(&e, &g)| g * rayleigh_icdf(e))
        .collect();
    for w in f.windows(2) {
        if w[0] < w[1] - 1e-12 {
            return Err(CoreError::InvalidParameter(
                "users must be ordered by non-increasing F_k(eps_k)".into(),
            ));
        }
    }
    let mut rates = Vec::with_capacity(eps.len());
    let mut interference = 0.0;
    for (k, &fk) in f.iter().enumerate() {
        let ak = power_split[k];
        let c = 0.5 * (1.0 + fk * ak * p / (fk * interference * p + 1.0)).log2();
        rates.push(c);
        interference += ak;
    }
    Ok(rates)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_user_shannon_rate() {
        let c = gaussian_bc_capacity(&[15.0], &[1.0]).unwrap();
        assert!((c[0] - 0.5 * 16f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn zero_power_means_zero_rate() {
        let c = gaussian_bc_capacity(&[31.6, 2.0], &[0.0, 1.0]).unwrap();
        assert_eq!(c[0], 0.0);
        assert!(c[1] > 0.0);
    }

    #[test]
    fn split_must_be_valid() {
        assert!(gaussian_bc_capacity(&[10.0, 5.0], &[0.6, 0.6]).is_err());
        assert!(gaussian_bc_capacity(&[10.0, 5.0], &[-0.1, 1.1]).is_err());
        assert!(gaussian_bc_capacity(&[10.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn boundary_sweep_is_monotone_tradeoff() {
        // Sweeping power toward user 2 trades user-1 rate for user-2 rate.
        let snrs = [10f64.powf(1.5), 10f64.powf(0.3)];
        let mut prev = gaussian_bc_capacity(&snrs, &[1.0, 0.0]).unwrap();
        for i in 1..=20 {
            let a2 = i as f64 / 20.0;
            let c = gaussian_bc_capacity(&snrs, &[1.0 - a2, a2]).unwrap();
            assert!(c[0] <= prev[0] + 1e-12);
            assert!(c[1] >= prev[1] - 1e-12);
            prev = c;
        }
    }

    #[test]
    fn outage_capacity_examples() {
        // eps -> 0 collapses every rate to zero.
        let c = outage_capacity(&[1e-12, 1e-12], &[1.0, 1.0], 100.0, &[0.5, 0.5]).unwrap();
        assert!(c.iter().all(|&r| r < 1e-5));

        // eps = 0.6321 makes F very close to 1: rates match the plain
        // Gaussian region at the mean SNRs within 1e-3.
        let p = 10f64.powf(1.8);
        let split = [0.3, 0.7];
        let via_outage =
            outage_capacity(&[0.6321, 0.6321], &[1.0, 1.0], p, &split).unwrap();
        let via_awgn = gaussian_bc_capacity(&[p, p], &split).unwrap();
        for (a, b) in via_outage.iter().zip(&via_awgn) {
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn outage_capacity_requires_ordering() {
        // Second user has larger F: rejected.
        assert!(outage_capacity(&[0.05, 0.5], &[1.0, 1.0], 10.0, &[0.5, 0.5]).is_err());
        assert!(outage_capacity(&[0.5, 0.05], &[1.0, 1.0], 10.0, &[0.5, 0.5]).is_ok());
    }

    #[test]
    fn icdf_anchor_value() {
        assert!((rayleigh_icdf(0.6321) - 1.0).abs() < 2e-4);
        assert!((rayleigh_icdf(0.05) - 0.05129329438755058).abs() < 1e-15);
    }
}
