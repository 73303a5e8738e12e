//! Superposition encoders: build the composite constellation transmitted
//! by the base station for each combination rule.
//!
//! The joint label packs user 1's bits in the least significant digits,
//! so `joint = l1 + |C1| (l2 + |C2| (l3 + ...))`. Collisions (distinct
//! joint labels mapping to the same point, possible for degenerate power
//! allocations) are kept as distinct labeled symbols so error and
//! information metrics see the ambiguity.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::lattice::{LatticeKind, LatticeSpec};
use crate::partitions::{
    average_power, build_constellation, mean_center, Constellation, PartitionSpec,
    MAX_POINTS_LOG2,
};

/// How the per-user symbols are combined into one transmitted point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CombinationRule {
    /// `β ([v1 + Σ 2^(m1+..+m_{k-1}) v_k - d] mod 2^(Σm) Λ)`.
    ModuloChain,
    /// Same chain without the final modulo reduction.
    DirectSum,
    /// `η (√α (v1-d1) + √(1-α) (v2-d2))`, two users over a rotated `Z^n`.
    AlphaWeighted(f64),
    /// `η' (v1 + 2^m1 v2 - d')`; the alpha-weighted scheme at the power
    /// split induced by the lattice partition.
    LatticePartitionAlpha,
}

/// Dither convention for the modulo-chain reduction.
///
/// Both yield zero-mean composites; they differ in which representative
/// each coset keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DitherPolicy {
    /// Reduce to minimum-norm coset representatives, then subtract the
    /// mean.
    MeanCenter,
    /// Also search for the reduction offset that minimizes transmit
    /// power (a deterministic grid plus coordinate descent). For
    /// non-cubic lattices the rewrapped slice carries measurably less
    /// power and a correspondingly better rate pair.
    MinPower,
}

/// A K-user superposition scheme.
#[derive(Debug, Clone)]
pub struct SchemeSpec {
    pub base: LatticeSpec,
    /// Bits per dimension per user; index 0 is the strongest user.
    pub m: Vec<u32>,
    pub rule: CombinationRule,
    pub dither: DitherPolicy,
}

/// The composite constellation together with its per-user factors.
#[derive(Debug, Clone)]
pub struct CompositeConstellation {
    /// Transmitted points (scaled and dithered), one per joint label.
    pub points: Vec<Vec<f64>>,
    /// Per-user constellations in user order.
    pub per_user: Vec<Constellation>,
    /// Cardinality of each user's constellation.
    pub user_cards: Vec<usize>,
    /// Overall normalization (β or η) applied to the centered points.
    pub scale: f64,
    /// Average energy per dimension of the centered points before
    /// normalization.
    pub raw_power_per_dim: f64,
    /// Ambient dimension.
    pub n: usize,
    /// Bits per dimension per user.
    pub m: Vec<u32>,
    pub rule: CombinationRule,
}

impl SchemeSpec {
    pub fn new(base: LatticeSpec, m: Vec<u32>, rule: CombinationRule) -> Result<Self> {
        if m.is_empty() {
            return Err(CoreError::InvalidParameter("need at least one user".into()));
        }
        let total_bits = base.n as u32 * m.iter().sum::<u32>();
        if total_bits > MAX_POINTS_LOG2 {
            return Err(CoreError::TooLarge(format!(
                "composite would have 2^{total_bits} points (limit 2^{MAX_POINTS_LOG2})"
            )));
        }
        Ok(Self {
            base,
            m,
            rule,
            dither: DitherPolicy::MinPower,
        })
    }

    /// Override the modulo-chain dither convention.
    pub fn with_dither(mut self, dither: DitherPolicy) -> Self {
        self.dither = dither;
        self
    }

    /// Power allocation induced by the lattice-partition rule,
    /// `α = 1 / (1 + 2^(2 m1))`.
    pub fn induced_alpha(m1: u32) -> f64 {
        1.0 / (1.0 + 4f64.powi(m1 as i32))
    }

    /// Build the composite constellation for this scheme.
    pub fn build(&self) -> Result<CompositeConstellation> {
        match self.rule {
            CombinationRule::ModuloChain => self.build_chain(true),
            CombinationRule::DirectSum => self.build_chain(false),
            CombinationRule::AlphaWeighted(alpha) => self.build_alpha(alpha),
            CombinationRule::LatticePartitionAlpha => self.build_lattice_partition(),
        }
    }

    fn user_constellations(&self) -> Result<Vec<Constellation>> {
        self.m
            .iter()
            .map(|&mk| build_constellation(&PartitionSpec::new(self.base.clone(), mk)?))
            .collect()
    }

    fn is_zn_equivalent(&self) -> bool {
        matches!(
            self.base.kind,
            LatticeKind::Zn(_) | LatticeKind::CyclotomicIdeal(_)
        )
    }

    /// Shared construction for the modulo chain and the plain direct sum.
    fn build_chain(&self, reduce: bool) -> Result<CompositeConstellation> {
        let per_user = self.user_constellations()?;
        let n = self.base.n;
        let user_cards: Vec<usize> = per_user.iter().map(|c| c.len()).collect();
        let total: usize = user_cards.iter().product();
        let total_m: u32 = self.m.iter().sum();
        let coarse = (1u64 << total_m) as f64;

        let mut raw = Vec::with_capacity(total);
        for joint in 0..total {
            let mut rest = joint;
            let mut s = vec![0.0; n];
            let mut shift = 0u32;
            for (k, c) in per_user.iter().enumerate() {
                let lk = rest % user_cards[k];
                rest /= user_cards[k];
                let w = (1u64 << shift) as f64;
                for (si, pi) in s.iter_mut().zip(&c.points[lk]) {
                    *si += w * pi;
                }
                shift += self.m[k];
            }
            raw.push(s);
        }
        if reduce && total_m > 0 {
            let offset = match self.dither {
                DitherPolicy::MeanCenter => vec![0.0; n],
                DitherPolicy::MinPower => min_power_offset(&self.base, &raw, coarse),
            };
            for s in raw.iter_mut() {
                let shifted: Vec<f64> = s.iter().zip(&offset).map(|(a, b)| a - b).collect();
                *s = self.base.modulo_scaled(coarse, &shifted)?;
            }
        }

        let (dither, centered) = mean_center(&raw)?;
        let raw_power = average_power(&raw, &dither) / n as f64;
        let scale = if raw_power > 0.0 {
            (1.0 / raw_power).sqrt()
        } else {
            1.0
        };
        let points = centered
            .into_iter()
            .map(|p| p.into_iter().map(|v| v * scale).collect())
            .collect();

        let composite = CompositeConstellation {
            points,
            per_user,
            user_cards,
            scale,
            raw_power_per_dim: raw_power,
            n,
            m: self.m.clone(),
            rule: self.rule,
        };
        if reduce {
            composite.assert_distinct()?;
        }
        Ok(composite)
    }

    fn build_alpha(&self, alpha: f64) -> Result<CompositeConstellation> {
        if self.m.len() != 2 {
            return Err(CoreError::InvalidParameter(
                "alpha-weighted schemes are two-user".into(),
            ));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(CoreError::InvalidParameter(format!(
                "alpha must lie in [0,1], got {alpha}"
            )));
        }
        if !self.is_zn_equivalent() {
            return Err(CoreError::Unsupported(
                "alpha-weighted schemes require a rotated-Z^n base lattice".into(),
            ));
        }
        let (m1, m2) = (self.m[0] as i32, self.m[1] as i32);
        let denom = (4f64.powi(m1) - 4f64.powi(m2)) * alpha + 4f64.powi(m2) - 1.0;
        if denom <= 0.0 {
            return Err(CoreError::InvalidParameter(
                "degenerate scheme: composite would carry no power".into(),
            ));
        }
        let eta = (12.0 / denom).sqrt();
        self.build_weighted(eta * alpha.sqrt(), eta * (1.0 - alpha).sqrt())
    }

    fn build_lattice_partition(&self) -> Result<CompositeConstellation> {
        if self.m.len() != 2 {
            return Err(CoreError::InvalidParameter(
                "lattice-partition schemes are two-user".into(),
            ));
        }
        if !self.is_zn_equivalent() {
            return Err(CoreError::Unsupported(
                "lattice-partition alpha schemes require a rotated-Z^n base lattice".into(),
            ));
        }
        let total_m = self.m[0] + self.m[1];
        if total_m == 0 {
            return Err(CoreError::InvalidParameter(
                "degenerate scheme: m1 + m2 must be positive".into(),
            ));
        }
        let eta_p = (12.0 / (4f64.powi(total_m as i32) - 1.0)).sqrt();
        self.build_weighted(eta_p, eta_p * 2f64.powi(self.m[0] as i32))
    }

    /// Composite points `w1 (v1 - d1) + w2 (v2 - d2)` for per-user
    /// weights; covers both the alpha-weighted and lattice-partition
    /// rules.
    fn build_weighted(&self, w1: f64, w2: f64) -> Result<CompositeConstellation> {
        let per_user = self.user_constellations()?;
        let n = self.base.n;
        let user_cards: Vec<usize> = per_user.iter().map(|c| c.len()).collect();
        let total: usize = user_cards.iter().product();

        let mut points = Vec::with_capacity(total);
        for joint in 0..total {
            let l1 = joint % user_cards[0];
            let l2 = joint / user_cards[0];
            let c1 = &per_user[0];
            let c2 = &per_user[1];
            let p: Vec<f64> = (0..n)
                .map(|i| {
                    w1 * (c1.points[l1][i] - c1.dither[i])
                        + w2 * (c2.points[l2][i] - c2.dither[i])
                })
                .collect();
            points.push(p);
        }
        let zero = vec![0.0; n];
        let power = average_power(&points, &zero) / n as f64;

        Ok(CompositeConstellation {
            points,
            per_user,
            user_cards,
            scale: 1.0,
            raw_power_per_dim: power,
            n,
            m: self.m.clone(),
            rule: self.rule,
        })
    }
}

impl CompositeConstellation {
    /// Number of joint labels.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// User `k`'s label inside a joint label.
    pub fn user_label(&self, joint: usize, k: usize) -> usize {
        let mut rest = joint;
        for card in &self.user_cards[..k] {
            rest /= card;
        }
        rest % self.user_cards[k]
    }

    /// Pack per-user labels into a joint label.
    pub fn joint_label(&self, user_labels: &[usize]) -> usize {
        let mut joint = 0usize;
        for (k, &l) in user_labels.iter().enumerate().rev() {
            joint = joint * self.user_cards[k] + l;
        }
        joint
    }

    /// Measured average energy per dimension of the final points.
    pub fn power_per_dim(&self) -> f64 {
        let zero = vec![0.0; self.n];
        average_power(&self.points, &zero) / self.n as f64
    }

    fn assert_distinct(&self) -> Result<()> {
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let d: f64 = self.points[i]
                    .iter()
                    .zip(&self.points[j])
                    .map(|(a, b)| (a - b).abs())
                    .sum();
                if d < 1e-9 {
                    return Err(CoreError::NumericalFailure(format!(
                        "joint labels {i} and {j} collapsed to the same point"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Export as CSV: coordinates of every composite point plus its joint
    /// label.
    pub fn to_csv(&self) -> String {
        use crate::csvfmt::{header, row, sig9};
        let mut cols: Vec<String> = (0..self.n).map(|i| format!("x{i}")).collect();
        cols.push("joint_label".to_string());
        let cols_ref: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
        let mut out = header(&cols_ref);
        out.push('\n');
        for (label, p) in self.points.iter().enumerate() {
            let mut fields: Vec<String> = p.iter().map(|&v| sig9(v)).collect();
            fields.push(label.to_string());
            out.push_str(&row(&fields));
            out.push('\n');
        }
        out
    }
}

/// Mean-centered transmit power per dimension of the reduction
/// `[s - d] mod coarse·Λ` over a fixed representative list.
fn reduced_power(base: &LatticeSpec, raw: &[Vec<f64>], coarse: f64, d: &[f64]) -> f64 {
    let n = base.n;
    let mut mean = vec![0.0; n];
    let mut sq = 0.0;
    for s in raw {
        let shifted: Vec<f64> = s.iter().zip(d).map(|(a, b)| a - b).collect();
        let r = base
            .modulo_scaled(coarse, &shifted)
            .expect("dimensions fixed");
        for (mi, &ri) in mean.iter_mut().zip(&r) {
            *mi += ri;
        }
        sq += r.iter().map(|v| v * v).sum::<f64>();
    }
    let count = raw.len() as f64;
    let mean_sq: f64 = mean.iter().map(|v| (v / count) * (v / count)).sum();
    (sq / count - mean_sq) / n as f64
}

/// Deterministic search for the reduction offset minimizing the centered
/// transmit power: a coarse grid over one period of the fine lattice
/// followed by coordinate descent with halving steps.
///
/// The power is periodic in the fine lattice and every class has a
/// representative of norm at most the covering radius (at most 1 for the
/// supported lattices), so the grid box `[-1, 1)^n` covers all classes.
fn min_power_offset(base: &LatticeSpec, raw: &[Vec<f64>], coarse: f64) -> Vec<f64> {
    let n = base.n;
    let budget = 30_000_000usize / raw.len().max(1);
    let steps = (budget as f64).powf(1.0 / n as f64).floor() as usize;
    let steps = steps.clamp(2, 8);
    let decode = |g: usize| -> Vec<f64> {
        let mut k = g;
        (0..n)
            .map(|_| {
                let v = (k % steps) as f64 / steps as f64 * 2.0 - 1.0;
                k /= steps;
                v
            })
            .collect()
    };
    // The zero offset (plain minimum-norm reduction) is the baseline; a
    // candidate must beat it by a real margin, so flat power landscapes
    // (the cubic lattices, where rewrapping saves nothing) keep the
    // natural labeling.
    let mut best_d = vec![0.0; n];
    let mut best_power = reduced_power(base, raw, coarse, &best_d);
    let margin = |p: f64| 1e-9 * (1.0 + p);

    let total = steps.pow(n as u32);
    let (grid_power, grid_idx) = (0..total)
        .into_par_iter()
        .map(|g| (reduced_power(base, raw, coarse, &decode(g)), g))
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| {
                if (b.0, b.1) < (a.0, a.1) {
                    b
                } else {
                    a
                }
            },
        );
    if grid_power < best_power - margin(best_power) {
        best_power = grid_power;
        best_d = decode(grid_idx);
    }

    let mut step = 2.0 / steps as f64;
    while step > 1e-3 {
        loop {
            let mut improved = false;
            for i in 0..n {
                for sgn in [-1.0, 1.0] {
                    let mut d = best_d.clone();
                    d[i] += sgn * step;
                    let p = reduced_power(base, raw, coarse, &d);
                    if p < best_power - margin(best_power) {
                        best_power = p;
                        best_d = d;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        step *= 0.5;
    }
    best_d
}

/// Alamouti space-time encoding of two complex symbols.
///
/// The codeword `X = [[x1, -x2*], [x2, x1*]]` satisfies
/// `X X^H = (|x1|^2 + |x2|^2) I` exactly.
pub fn alamouti_encode(x1: Complex64, x2: Complex64) -> [[Complex64; 2]; 2] {
    [[x1, -x2.conj()], [x2, x1.conj()]]
}
