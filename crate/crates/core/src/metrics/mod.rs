//! Channel simulation and information/error metrics.
//!
//! Monte-Carlo estimators (mutual information, outage rate, symbol error
//! rate), the Gaussian and outage capacity regions, and the closed-form
//! gap bounds. All estimators are seeded and deterministic across worker
//! counts.

pub mod capacity;
pub mod gaps;
pub mod mi;
pub mod outage;
pub mod ser;

use serde::{Deserialize, Serialize};

/// Receiver behaviour for the Monte-Carlo estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeMode {
    /// Treat every other user's signal as noise.
    SingleUser,
    /// Weaker users' symbols are known (genie-aided successive
    /// cancellation benchmark).
    GenieSic,
}

/// Fading law of the link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelKind {
    /// Static gain, Gaussian noise only.
    Awgn,
    /// One Rayleigh gain per frame (quasi-static).
    SlowRayleigh,
    /// Independent unit-mean-square Rayleigh gain per real dimension.
    BlockRayleigh,
}

/// Channel descriptor shared by the estimators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelModel {
    pub kind: ChannelKind,
    /// Average SNR per user in dB.
    pub snr_db: Vec<f64>,
    pub seed: u64,
}

impl ChannelModel {
    /// Linear average SNR of user `k`.
    pub fn snr_linear(&self, k: usize) -> f64 {
        10f64.powf(self.snr_db[k] / 10.0)
    }
}

/// One mutual-information estimate in bits per real dimension.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MiEstimate {
    pub mi: f64,
    pub std_err: f64,
    pub trials: u64,
}

/// Per-user mutual-information estimates for one operating point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateReport {
    pub per_user: Vec<MiEstimate>,
    pub mode: DecodeMode,
    pub snr_db: Vec<f64>,
}

impl RateReport {
    pub fn to_csv(&self) -> String {
        use crate::csvfmt::{header, row, sig9};
        let mut out = header(&["user", "snr_db", "mi_bits_per_dim", "std_err", "trials"]);
        out.push('\n');
        for (k, est) in self.per_user.iter().enumerate() {
            out.push_str(&row(&[
                k.to_string(),
                sig9(self.snr_db[k]),
                sig9(est.mi),
                sig9(est.std_err),
                est.trials.to_string(),
            ]));
            out.push('\n');
        }
        out
    }
}

/// Symbol-error-rate measurements over an SNR grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SerReport {
    pub snr_db: Vec<f64>,
    /// `per_user[k][i]` is user k's SER at grid point `i`.
    pub per_user: Vec<Vec<f64>>,
    pub errors: Vec<Vec<u64>>,
    pub trials: u64,
    pub mode: DecodeMode,
}

impl SerReport {
    pub fn to_csv(&self) -> String {
        use crate::csvfmt::{header, row, sig9};
        let mut out = header(&["snr_db", "user", "ser", "errors", "trials"]);
        out.push('\n');
        for (i, &snr) in self.snr_db.iter().enumerate() {
            for (k, sers) in self.per_user.iter().enumerate() {
                out.push_str(&row(&[
                    sig9(snr),
                    k.to_string(),
                    sig9(sers[i]),
                    self.errors[k][i].to_string(),
                    self.trials.to_string(),
                ]));
                out.push('\n');
            }
        }
        out
    }
}

/// Closed-form gap bound to the relevant capacity region.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapBound {
    /// Per-user gap in bits per real dimension.
    pub per_user: Vec<f64>,
    pub regime: GapRegime,
    pub psi: f64,
    pub eps: Option<Vec<f64>>,
}

/// Which analysis regime produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapRegime {
    /// Full instantaneous-CSI gap to the Gaussian capacity region.
    Ch5Full,
    /// Statistical-CSI gap to the outage capacity region.
    Ch6Outage,
}
