//! Symbol error rate under per-dimension (block) Rayleigh fading with
//! joint maximum-likelihood detection.

use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::metrics::{DecodeMode, SerReport};
use crate::rng::{rayleigh_unit_ms, standard_normal, trial_rng};
use crate::schemes::CompositeConstellation;

const SER_STREAM_TAG: u64 = 0x5e50_0000;

/// Measure per-user symbol error rates of a two-user composite over a
/// grid of average SNRs (dB), with i.i.d. Rayleigh fading per real
/// dimension known at the receiver.
///
/// The detector is exact joint ML over the composite followed by
/// marginalization to each user's symbol. Under `GenieSic`, user 1 is
/// detected over the points consistent with user 2's true symbol
/// (equivalently: user 2's signal perfectly removed).
pub fn ser_mc(
    c: &CompositeConstellation,
    snr_grid_db: &[f64],
    mode: DecodeMode,
    trials: u64,
    seed: u64,
) -> Result<SerReport> {
    if trials < 1 {
        return Err(CoreError::InvalidParameter("need at least one trial".into()));
    }
    if snr_grid_db.is_empty() {
        return Err(CoreError::InvalidParameter("empty SNR grid".into()));
    }
    let users = c.user_cards.len();
    if users != 2 {
        return Err(CoreError::InvalidParameter(
            "SER measurement expects a two-user composite".into(),
        ));
    }

    let n = c.n;
    let len = c.len();
    let mut labels = vec![vec![0u32; len]; users];
    for j in 0..len {
        for (k, lk) in labels.iter_mut().enumerate() {
            lk[j] = c.user_label(j, k) as u32;
        }
    }

    let mut per_user = vec![Vec::with_capacity(snr_grid_db.len()); users];
    let mut errors = vec![Vec::with_capacity(snr_grid_db.len()); users];
    for (gi, &snr_db) in snr_grid_db.iter().enumerate() {
        let s = 10f64.powf(snr_db / 20.0);
        let (e1, e2) = (0..trials)
            .into_par_iter()
            .map(|t| {
                use rand::Rng;
                let mut rng = trial_rng(seed, SER_STREAM_TAG ^ ((gi as u64) << 32), t);
                let j_star = rng.gen_range(0..len);
                let mut h = vec![0.0f64; n];
                let mut y = vec![0.0f64; n];
                for i in 0..n {
                    h[i] = rayleigh_unit_ms(&mut rng);
                    y[i] = s * h[i] * c.points[j_star][i] + standard_normal(&mut rng);
                }
                let metric = |j: usize| -> f64 {
                    let mut d2 = 0.0;
                    for i in 0..n {
                        let d = y[i] - s * h[i] * c.points[j][i];
                        d2 += d * d;
                    }
                    d2
                };
                // Joint ML over the full composite.
                let mut best = 0usize;
                let mut best_d = f64::INFINITY;
                for j in 0..len {
                    let d = metric(j);
                    if d < best_d {
                        best_d = d;
                        best = j;
                    }
                }
                let err2 = labels[1][best] != labels[1][j_star];
                let err1 = match mode {
                    DecodeMode::SingleUser => labels[0][best] != labels[0][j_star],
                    DecodeMode::GenieSic => {
                        // Restrict to points consistent with user 2's true
                        // symbol.
                        let mut b = usize::MAX;
                        let mut bd = f64::INFINITY;
                        for j in 0..len {
                            if labels[1][j] != labels[1][j_star] {
                                continue;
                            }
                            let d = metric(j);
                            if d < bd {
                                bd = d;
                                b = j;
                            }
                        }
                        labels[0][b] != labels[0][j_star]
                    }
                };
                (u64::from(err1), u64::from(err2))
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        per_user[0].push(e1 as f64 / trials as f64);
        per_user[1].push(e2 as f64 / trials as f64);
        errors[0].push(e1);
        errors[1].push(e2);
    }
    Ok(SerReport {
        snr_db: snr_grid_db.to_vec(),
        per_user,
        errors,
        trials,
        mode,
    })
}

/// Diversity order estimated from the log-log slope of SER versus SNR:
/// a least-squares fit of `log10(ser)` against `snr_db / 10`.
///
/// Grid points with zero measured errors are skipped; at least two
/// usable points are required.
pub fn diversity_slope(snr_db: &[f64], ser: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = snr_db
        .iter()
        .zip(ser)
        .filter(|(_, &s)| s > 0.0)
        .map(|(&x, &s)| (x / 10.0, s.log10()))
        .collect();
    if pts.len() < 2 {
        return Err(CoreError::InvalidParameter(
            "need at least two nonzero SER points for a slope fit".into(),
        ));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(-slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_lattice, LatticeKind};
    use crate::schemes::{CombinationRule, SchemeSpec};

    fn alpha_scheme(kind: LatticeKind) -> CompositeConstellation {
        SchemeSpec::new(
            make_lattice(kind).unwrap(),
            vec![1, 1],
            CombinationRule::AlphaWeighted(0.2),
        )
        .unwrap()
        .build()
        .unwrap()
    }

    #[test]
    fn ser_vanishes_at_extreme_snr() {
        let c = alpha_scheme(LatticeKind::CyclotomicIdeal(5));
        let rep = ser_mc(&c, &[90.0], DecodeMode::SingleUser, 4_000, 9).unwrap();
        assert_eq!(rep.errors[0][0], 0);
        assert_eq!(rep.errors[1][0], 0);
    }

    #[test]
    fn ser_decreases_with_snr() {
        let c = alpha_scheme(LatticeKind::CyclotomicIdeal(5));
        let rep = ser_mc(&c, &[5.0, 20.0], DecodeMode::SingleUser, 20_000, 13).unwrap();
        for k in 0..2 {
            assert!(
                rep.per_user[k][1] < rep.per_user[k][0],
                "user {k}: {:?}",
                rep.per_user[k]
            );
        }
    }

    #[test]
    fn genie_user1_not_worse() {
        let c = alpha_scheme(LatticeKind::CyclotomicIdeal(5));
        let single = ser_mc(&c, &[15.0], DecodeMode::SingleUser, 30_000, 21).unwrap();
        let genie = ser_mc(&c, &[15.0], DecodeMode::GenieSic, 30_000, 21).unwrap();
        let tol = 3.0 * (single.per_user[0][0] / 30_000f64).sqrt().max(1e-3);
        assert!(genie.per_user[0][0] <= single.per_user[0][0] + tol);
    }

    #[test]
    fn slope_fit_recovers_synthetic_diversity() {
        let grid = [25.0, 30.0, 35.0];
        // SER = c / snr^2 exactly.
        let ser: Vec<f64> = grid
            .iter()
            .map(|&db| 10.0 / 10f64.powf(db / 10.0).powi(2))
            .collect();
        let d = diversity_slope(&grid, &ser).unwrap();
        assert!((d - 2.0).abs() < 1e-9);
        assert!(diversity_slope(&grid, &[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn deterministic_reports() {
        let c = alpha_scheme(LatticeKind::CyclotomicIdeal(5));
        let a = ser_mc(&c, &[12.0], DecodeMode::SingleUser, 5_000, 41).unwrap();
        let b = ser_mc(&c, &[12.0], DecodeMode::SingleUser, 5_000, 41).unwrap();
        assert_eq!(a.errors, b.errors);
    }
}
