//! Rate planning on the linear deterministic model.
//!
//! The broadcast channel is abstracted as a bit pipe: user `k` sees only
//! the top `n_k` power levels. User 1 (the strongest) occupies the lowest
//! levels, each further user stacks above the previous ones. These
//! integer decompositions size the per-user constellations and drive the
//! rate analysis.

use crate::error::{CoreError, Result};

/// A K-user rate plan: bits per dimension for each user plus the bit-pipe
/// capacities they must fit into.
#[derive(Debug, Clone)]
pub struct RatePlan {
    /// Bits per dimension intended for user k (index 0 = strongest user).
    pub m: Vec<u32>,
    /// Bit-pipe levels per user (`n_k` or the average-SNR `n̄_k`),
    /// ordered like `m`.
    pub n_levels: Vec<u32>,
}

/// Split of user 1's bits against a weaker user's noise level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RDecomposition {
    /// Bits above the noise level.
    pub r11: u32,
    /// Bits below the noise level (truncated).
    pub r12: u32,
}

/// Full decomposition seen by a middle user `k`: the stronger super-user's
/// bits and the user's own bits, each split at user k's noise level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UserKDecomposition {
    /// Super-user (users 1..k-1) bits above the noise level.
    pub r11_star: u32,
    /// Super-user bits below the noise level.
    pub r12_star: u32,
    /// Own bits above the noise level.
    pub rk1: u32,
    /// Own bits below the noise level.
    pub rk2: u32,
}

/// Number of bit levels supported at a given linear SNR:
/// `max(0, ceil(log2(snr) / 2))`.
pub fn n_of_snr(snr_linear: f64) -> Result<u32> {
    if !snr_linear.is_finite() || snr_linear <= 0.0 {
        return Err(CoreError::InvalidParameter(format!(
            "SNR must be positive, got {snr_linear}"
        )));
    }
    let raw = (0.5 * snr_linear.log2()).ceil();
    Ok(raw.max(0.0) as u32)
}

impl RatePlan {
    pub fn new(m: Vec<u32>, n_levels: Vec<u32>) -> Result<Self> {
        if m.is_empty() || m.len() != n_levels.len() {
            return Err(CoreError::InvalidParameter(
                "rate plan needs matching non-empty m and n lists".into(),
            ));
        }
        Ok(Self { m, n_levels })
    }

    pub fn user_count(&self) -> usize {
        self.m.len()
    }

    /// All nested sum constraints `m_k + ... + m_K <= n_k` hold.
    pub fn feasible(&self) -> bool {
        let k = self.m.len();
        let mut tail = 0u64;
        for i in (0..k).rev() {
            tail += u64::from(self.m[i]);
            if tail > u64::from(self.n_levels[i]) {
                return false;
            }
        }
        true
    }
}

fn clamp_i64(v: i64, lo: i64, hi: i64) -> u32 {
    v.clamp(lo, hi) as u32
}

/// Two-user split of the strong user's bits at the weak user's pipe
/// capacity: `r11 = min(m1, n2 - m2)`, `r12 = max(m1 + m2 - n2, 0)`.
///
/// Requires feasibility (`m2 <= n2`), otherwise `r11` would go negative.
pub fn r_decompose_ch5(m1: u32, m2: u32, n2: u32) -> Result<RDecomposition> {
    let (m1, m2, n2) = (i64::from(m1), i64::from(m2), i64::from(n2));
    if m2 > n2 {
        return Err(CoreError::InvalidParameter(format!(
            "infeasible pair: m2={m2} exceeds n2={n2}"
        )));
    }
    let r11 = m1.min(n2 - m2);
    let r12 = (m1 + m2 - n2).max(0);
    Ok(RDecomposition {
        r11: r11 as u32,
        r12: r12 as u32,
    })
}

/// User 1's own split under a fading realization: bits above and below
/// its observed noise level given the average-SNR plan.
pub fn r_decompose_ch6_user1(m1: u32, n1_bar: u32, n1: u32) -> RDecomposition {
    let (m1, n1_bar, n1) = (i64::from(m1), i64::from(n1_bar), i64::from(n1));
    let over = (n1_bar - n1).max(0);
    RDecomposition {
        r11: (m1 - over).max(0) as u32,
        r12: m1.min(over) as u32,
    }
}

/// The weak-side view in a two-user plan: how `m1` splits at user 2's
/// noise level, and how user 2's own bits split.
pub fn r_decompose_ch6_weak(m1: u32, m2: u32, n2: u32) -> UserKDecomposition {
    let (m1, m2, n2) = (i64::from(m1), i64::from(m2), i64::from(n2));
    UserKDecomposition {
        r11_star: clamp_i64(n2 - m2, 0, m1),
        r12_star: clamp_i64(m1 + m2 - n2, 0, m1),
        rk1: clamp_i64(n2, 0, m2),
        rk2: clamp_i64(m2 - n2, 0, m2),
    }
}

/// Middle user `k` (1-indexed, `1 < k < K`) in a K-user plan: splits of
/// the stronger super-user's bits and the own bits at user k's noise
/// level `n_k`, with users `k+1..K` stacked above.
pub fn r_decompose_ch6_userk(m: &[u32], k: usize, n_k: u32) -> Result<UserKDecomposition> {
    let count = m.len();
    if count < 3 || k <= 1 || k >= count {
        return Err(CoreError::InvalidParameter(format!(
            "middle-user decomposition needs 1 < k < K, got k={k}, K={count}"
        )));
    }
    let idx = k - 1;
    let sum_below: i64 = m[..idx].iter().map(|&v| i64::from(v)).sum();
    let own = i64::from(m[idx]);
    let sum_above: i64 = m[idx + 1..].iter().map(|&v| i64::from(v)).sum();
    let total = sum_below + own + sum_above;
    let n_k = i64::from(n_k);
    Ok(UserKDecomposition {
        r11_star: clamp_i64(n_k - own - sum_above, 0, sum_below),
        r12_star: clamp_i64(total - n_k, 0, sum_below),
        rk1: clamp_i64(n_k - sum_above, 0, own),
        rk2: clamp_i64(own + sum_above - n_k, 0, own),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_of_snr_examples() {
        assert_eq!(n_of_snr(1000.0).unwrap(), 5);
        assert_eq!(n_of_snr(63.1).unwrap(), 3);
        assert_eq!(n_of_snr(1.0).unwrap(), 0);
        assert_eq!(n_of_snr(0.25).unwrap(), 0);
        assert_eq!(n_of_snr(4.0).unwrap(), 1);
        assert!(n_of_snr(0.0).is_err());
        assert!(n_of_snr(-3.0).is_err());
    }

    #[test]
    fn feasibility_examples() {
        assert!(RatePlan::new(vec![2, 1], vec![3, 1]).unwrap().feasible());
        assert!(RatePlan::new(vec![4, 1], vec![5, 3]).unwrap().feasible());
        assert!(RatePlan::new(vec![0, 0, 0], vec![0, 0, 0])
            .unwrap()
            .feasible());
        assert!(!RatePlan::new(vec![4, 1], vec![3, 1]).unwrap().feasible());
        assert!(!RatePlan::new(vec![1, 2], vec![5, 1]).unwrap().feasible());
    }

    #[test]
    fn ch5_decomposition_examples() {
        assert_eq!(
            r_decompose_ch5(2, 1, 1).unwrap(),
            RDecomposition { r11: 0, r12: 2 }
        );
        assert_eq!(
            r_decompose_ch5(2, 1, 3).unwrap(),
            RDecomposition { r11: 2, r12: 0 }
        );
        assert_eq!(
            r_decompose_ch5(0, 2, 4).unwrap(),
            RDecomposition { r11: 0, r12: 0 }
        );
        assert!(r_decompose_ch5(1, 3, 2).is_err());
    }

    #[test]
    fn ch5_split_identities() {
        for m1 in 0..=6u32 {
            for m2 in 0..=6u32 {
                for n2 in m2..=8u32 {
                    let r = r_decompose_ch5(m1, m2, n2).unwrap();
                    assert_eq!(r.r11 + r.r12, m1);
                    if m1 + m2 >= n2 {
                        assert_eq!(r.r11 + m2, n2);
                    }
                }
            }
        }
    }

    #[test]
    fn ch6_user1_examples() {
        assert_eq!(
            r_decompose_ch6_user1(4, 5, 3),
            RDecomposition { r11: 2, r12: 2 }
        );
        assert_eq!(
            r_decompose_ch6_user1(4, 5, 7),
            RDecomposition { r11: 4, r12: 0 }
        );
        assert_eq!(
            r_decompose_ch6_user1(4, 5, 0),
            RDecomposition { r11: 0, r12: 4 }
        );
        assert_eq!(
            r_decompose_ch6_user1(7, 5, 0),
            RDecomposition { r11: 2, r12: 5 }
        );
    }

    #[test]
    fn ch6_userk_example() {
        let d = r_decompose_ch6_userk(&[2, 1, 1], 2, 2).unwrap();
        assert_eq!(d.rk1, 1);
        assert_eq!(d.rk2, 0);
        assert_eq!(d.r11_star, 0);
        assert_eq!(d.r12_star, 2);
    }

    #[test]
    fn ch6_userk_rejects_edge_indices() {
        assert!(r_decompose_ch6_userk(&[1, 1, 1], 1, 2).is_err());
        assert!(r_decompose_ch6_userk(&[1, 1, 1], 3, 2).is_err());
        assert!(r_decompose_ch6_userk(&[1, 1], 2, 2).is_err());
    }

    /// Bit-pipe oracle: explicitly build the level stack (user 1 at the
    /// bottom, user K on top), truncate everything below the noise level,
    /// and count received bits per user.
    fn stack_oracle(m: &[u32], n_k: u32) -> Vec<(u32, u32)> {
        let mut owners = Vec::new();
        for (user, &bits) in m.iter().enumerate() {
            for _ in 0..bits {
                owners.push(user);
            }
        }
        let total = owners.len() as u32;
        let cutoff = total.saturating_sub(n_k);
        let mut out = vec![(0u32, 0u32); m.len()];
        for (level, &user) in owners.iter().enumerate() {
            if (level as u32) < cutoff {
                out[user].1 += 1; // below noise
            } else {
                out[user].0 += 1; // received
            }
        }
        out
    }

    #[test]
    fn middle_user_formulas_match_stack_oracle() {
        // Exhaustive grid over K = 3, m_i <= 4, n <= 8.
        for m1 in 0..=4u32 {
            for m2 in 0..=4u32 {
                for m3 in 0..=4u32 {
                    for n2 in 0..=8u32 {
                        let m = [m1, m2, m3];
                        let d = r_decompose_ch6_userk(&m, 2, n2).unwrap();
                        let oracle = stack_oracle(&m, n2);
                        assert_eq!(d.rk1, oracle[1].0, "m={m:?} n2={n2}");
                        assert_eq!(d.rk2, oracle[1].1, "m={m:?} n2={n2}");
                        assert_eq!(d.r11_star, oracle[0].0, "m={m:?} n2={n2}");
                        assert_eq!(d.r12_star, oracle[0].1, "m={m:?} n2={n2}");
                        // Received-bit total (users 1..k): the corrected
                        // fact vi identity.
                        let effective = n2.saturating_sub(m3).min(m1 + m2);
                        assert_eq!(d.rk1 + d.r11_star, effective);
                        // Truncated total (users 1..k): corrected fact vii.
                        let truncated =
                            (i64::from(m1 + m2 + m3) - i64::from(n2)).clamp(0, i64::from(m1 + m2));
                        assert_eq!(i64::from(d.rk2 + d.r12_star), truncated);
                    }
                }
            }
        }
    }

    #[test]
    fn weak_user_formulas_match_stack_oracle() {
        for m1 in 0..=4u32 {
            for m2 in 0..=4u32 {
                for n2 in 0..=8u32 {
                    let d = r_decompose_ch6_weak(m1, m2, n2);
                    let oracle = stack_oracle(&[m1, m2], n2);
                    assert_eq!(d.rk1, oracle[1].0);
                    assert_eq!(d.rk2, oracle[1].1);
                    assert_eq!(d.r11_star, oracle[0].0);
                    assert_eq!(d.r12_star, oracle[0].1);
                    // Fact i: received bits total.
                    assert_eq!(d.rk1 + d.r11_star, n2.min(m1 + m2));
                    // Fact ii: truncated bits total.
                    assert_eq!(
                        i64::from(d.rk2 + d.r12_star),
                        (i64::from(m1 + m2) - i64::from(n2)).max(0)
                    );
                    // Facts iv/v: regime signs.
                    if n2 < m2 {
                        assert_eq!(d.r11_star, 0);
                        assert_eq!(d.r12_star, m1);
                        assert!(d.rk2 >= 1 && d.rk2 <= m2);
                        assert!(d.rk1 < m2 || m2 == 0);
                    } else {
                        assert_eq!(d.rk2, 0);
                        assert_eq!(d.rk1, m2);
                    }
                }
            }
        }
    }

    #[test]
    fn overtransmission_identity_in_regime() {
        // Truncated own bits plus the expected-but-lost interference bits
        // equal the shortfall n̄_2 - n_2 when the pipe was planned full
        // (m1 + m2 >= n̄_2) and 0 <= n2 < n̄_2.
        for m1 in 0..=4u32 {
            for m2 in 0..=4u32 {
                for n2_bar in m2..=6u32 {
                    if m1 + m2 < n2_bar {
                        continue;
                    }
                    let planned = r_decompose_ch5(m1, m2, n2_bar).unwrap();
                    for n2 in 0..n2_bar {
                        let actual = r_decompose_ch6_weak(m1, m2, n2);
                        let lost = actual.rk2 + planned.r11 - actual.r11_star;
                        assert_eq!(
                            lost,
                            n2_bar - n2,
                            "m=({m1},{m2}) n̄2={n2_bar} n2={n2}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn all_r_values_bounded_by_their_m() {
        for m1 in 0..=4u32 {
            for m2 in 0..=4u32 {
                for n2 in 0..=8u32 {
                    if m2 <= n2 {
                        let r = r_decompose_ch5(m1, m2, n2).unwrap();
                        assert!(r.r11 <= m1 && r.r12 <= m1);
                    }
                    let d = r_decompose_ch6_weak(m1, m2, n2);
                    assert!(d.rk1 <= m2 && d.rk2 <= m2);
                    assert!(d.r11_star <= m1 && d.r12_star <= m1);
                    assert_eq!(d.rk1 + d.rk2, m2);
                    assert_eq!(d.r11_star + d.r12_star, m1);
                }
            }
        }
    }
}
