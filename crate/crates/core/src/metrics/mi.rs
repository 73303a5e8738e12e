//! Monte-Carlo mutual information for discrete composite inputs on
//! Gaussian channels.
//!
//! Each trial draws one joint symbol and one noise vector, then evaluates
//! the exact conditional densities over the composite via log-sum-exp.
//! Trials run in parallel but are reduced in index order, so estimates
//! are bit-identical for a fixed seed.

use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::metrics::{DecodeMode, MiEstimate};
use crate::rng::{standard_normal, trial_rng};
use crate::schemes::CompositeConstellation;

const MI_STREAM_TAG: u64 = 0x4d49_0000;

/// Estimate `I(V_k; Y) / n` in bits per real dimension for user `k` of a
/// composite constellation at a given receive SNR.
///
/// `SingleUser` marginalizes every other user's symbol. `GenieSic`
/// conditions on the symbols of all weaker users (`k+1..K`), the
/// genie-aided cancellation benchmark.
pub fn mutual_information_mc(
    c: &CompositeConstellation,
    user_k: usize,
    snr_linear: f64,
    mode: DecodeMode,
    trials: u64,
    seed: u64,
) -> Result<MiEstimate> {
    if trials < 1 {
        return Err(CoreError::InvalidParameter("need at least one trial".into()));
    }
    if user_k >= c.user_cards.len() {
        return Err(CoreError::InvalidParameter(format!(
            "user index {user_k} out of range"
        )));
    }
    if !snr_linear.is_finite() || snr_linear <= 0.0 {
        return Err(CoreError::InvalidParameter("SNR must be positive".into()));
    }

    let n = c.n;
    let len = c.len();
    let s = snr_linear.sqrt();
    // Flattened received-constellation points s * x_j.
    let mut sx = vec![0.0f64; len * n];
    for (j, p) in c.points.iter().enumerate() {
        for (i, &v) in p.iter().enumerate() {
            sx[j * n + i] = s * v;
        }
    }
    // Per-joint user labels, precomputed once.
    let users = c.user_cards.len();
    let mut labels = vec![vec![0u32; len]; users];
    for j in 0..len {
        for (k, lk) in labels.iter_mut().enumerate() {
            lk[j] = c.user_label(j, k) as u32;
        }
    }

    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map_init(
            || vec![0.0f64; len],
            |loglik, t| {
                use rand::Rng;
                let mut rng = trial_rng(seed, MI_STREAM_TAG ^ user_k as u64, t);
                let j_star = rng.gen_range(0..len);
                let mut y = vec![0.0f64; n];
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi = sx[j_star * n + i] + standard_normal(&mut rng);
                }
                for (j, l) in loglik.iter_mut().enumerate() {
                    let mut d2 = 0.0;
                    for (i, &yi) in y.iter().enumerate() {
                        let d = yi - sx[j * n + i];
                        d2 += d * d;
                    }
                    *l = -0.5 * d2;
                }

                // Conditioning sets: numerator fixes user k's symbol (and
                // the weaker users' under GenieSic); denominator fixes only
                // what the genie reveals.
                let target = labels[user_k][j_star];
                let weaker_match = |j: usize| -> bool {
                    labels[user_k + 1..]
                        .iter()
                        .all(|lk| lk[j] == lk[j_star])
                };
                let (mut max_num, mut max_den) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
                for j in 0..len {
                    let in_den = match mode {
                        DecodeMode::SingleUser => true,
                        DecodeMode::GenieSic => weaker_match(j),
                    };
                    if !in_den {
                        continue;
                    }
                    if loglik[j] > max_den {
                        max_den = loglik[j];
                    }
                    if labels[user_k][j] == target && loglik[j] > max_num {
                        max_num = loglik[j];
                    }
                }
                let (mut sum_num, mut cnt_num) = (0.0f64, 0u64);
                let (mut sum_den, mut cnt_den) = (0.0f64, 0u64);
                for j in 0..len {
                    let in_den = match mode {
                        DecodeMode::SingleUser => true,
                        DecodeMode::GenieSic => weaker_match(j),
                    };
                    if !in_den {
                        continue;
                    }
                    sum_den += (loglik[j] - max_den).exp();
                    cnt_den += 1;
                    if labels[user_k][j] == target {
                        sum_num += (loglik[j] - max_num).exp();
                        cnt_num += 1;
                    }
                }
                let log_cond = max_num + sum_num.ln() - (cnt_num as f64).ln();
                let log_marg = max_den + sum_den.ln() - (cnt_den as f64).ln();
                (log_cond - log_marg) / std::f64::consts::LN_2 / n as f64
            },
        )
        .collect();

    let mean = values.iter().sum::<f64>() / trials as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (trials as f64 - 1.0).max(1.0);
    Ok(MiEstimate {
        mi: mean,
        std_err: (var / trials as f64).sqrt(),
        trials,
    })
}

/// Lower bound on the mutual information between a discrete lattice input
/// and its Gaussian observation:
/// `H(X)/n - log2(2 pi e (Vol^(-2/n) + psi)) / 2`.
pub fn mi_lower_bound(entropy_per_dim: f64, volume: f64, n: usize, psi: f64) -> Result<f64> {
    if !volume.is_finite() || volume <= 0.0 {
        return Err(CoreError::InvalidParameter("volume must be positive".into()));
    }
    let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    let v = volume.powf(-2.0 / n as f64) + psi;
    Ok(entropy_per_dim - 0.5 * (two_pi_e * v).log2())
}
