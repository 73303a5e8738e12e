//! Minimum product distance and minimum determinant analysis of
//! superimposed constellations.
//!
//! Exhaustive pair scans are the ground truth; the closed forms (the
//! lattice-partition value, the piecewise power-allocation bound and the
//! orthogonal space-time determinant) are validated against them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csvfmt::{header, row, sig9};
use crate::error::{CoreError, Result};
use crate::lattice::DIVERSITY_EPS;
use crate::schemes::CompositeConstellation;

/// Largest composite an exhaustive pair scan accepts.
pub const MAX_SCAN_POINTS: usize = 1 << 16;

/// Distance figures of one composite constellation at one power split.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DistanceReport {
    pub alpha: f64,
    pub exact_dpmin: f64,
    pub bound_dpmin: f64,
    pub exact_demin: f64,
    /// Minimum determinant of the Alamouti codeword difference matrices.
    pub min_det: f64,
    pub diversity_violation: bool,
}

/// Result of one exhaustive scan over unordered point pairs.
#[derive(Debug, Clone, Copy)]
pub struct PairScan {
    pub dp_min: f64,
    pub de_min: f64,
    /// Some pair differed in fewer than `n` coordinates.
    pub diversity_violation: bool,
}

fn scan_guard(c: &CompositeConstellation) -> Result<()> {
    if c.len() > MAX_SCAN_POINTS {
        return Err(CoreError::TooLarge(format!(
            "{} points exceed the exhaustive-scan limit {MAX_SCAN_POINTS}",
            c.len()
        )));
    }
    Ok(())
}

/// Exhaustive scan of all unordered pairs: minimum product distance,
/// minimum Euclidean distance and the diversity flag in one pass.
///
/// A pair differing in no coordinate (a label collision) contributes a
/// product distance of zero. Coordinates differing by less than
/// `DIVERSITY_EPS` count as equal so rotation residue is not mistaken
/// for diversity.
pub fn pair_scan(c: &CompositeConstellation) -> Result<PairScan> {
    scan_guard(c)?;
    let n = c.n;
    let pts = &c.points;
    let len = pts.len();
    let merged = (0..len)
        .into_par_iter()
        .map(|i| {
            let mut dp = f64::INFINITY;
            let mut de = f64::INFINITY;
            let mut violation = false;
            for j in i + 1..len {
                let mut prod = 1.0;
                let mut differing = 0usize;
                let mut d2 = 0.0;
                for (a, b) in pts[i].iter().zip(&pts[j]) {
                    let delta = (a - b).abs();
                    d2 += delta * delta;
                    if delta > DIVERSITY_EPS {
                        differing += 1;
                        prod *= delta;
                    }
                }
                if differing == 0 {
                    prod = 0.0;
                }
                if differing < n {
                    violation = true;
                }
                if prod < dp {
                    dp = prod;
                }
                if d2 < de {
                    de = d2;
                }
            }
            (dp, de, violation)
        })
        .reduce(
            || (f64::INFINITY, f64::INFINITY, false),
            |a, b| (a.0.min(b.0), a.1.min(b.1), a.2 || b.2),
        );
    Ok(PairScan {
        dp_min: merged.0,
        de_min: merged.1.sqrt(),
        diversity_violation: merged.2,
    })
}

/// Exact minimum product distance of a composite constellation.
pub fn exact_dpmin(c: &CompositeConstellation) -> Result<f64> {
    Ok(pair_scan(c)?.dp_min)
}

/// Exact minimum Euclidean distance of a composite constellation.
pub fn exact_demin(c: &CompositeConstellation) -> Result<f64> {
    Ok(pair_scan(c)?.de_min)
}

/// Closed-form minimum product distance of the lattice-partition scheme:
/// `(12 / (2^(2(m1+m2)) - 1))^(n/2) d_pmin(Λ)`.
pub fn dpmin_lattice_partition_closed(m1: u32, m2: u32, n: usize, dp_lambda: f64) -> Result<f64> {
    if dp_lambda <= 0.0 {
        return Err(CoreError::InvalidParameter(
            "base product distance must be positive".into(),
        ));
    }
    if m1 + m2 == 0 {
        return Err(CoreError::InvalidParameter(
            "degenerate partition: m1 + m2 must be positive".into(),
        ));
    }
    let denom = 4f64.powi((m1 + m2) as i32) - 1.0;
    Ok((12.0 / denom).powf(n as f64 / 2.0) * dp_lambda)
}

/// Inter-cluster n-th-root distance for the two-cluster case (`m2 = 1`),
/// as a function of the cluster spacing regime.
///
/// `s1`, `s2` are the n-th roots of the per-user minimum product
/// distances in one layer.
fn intercluster_root_m2_1(alpha: f64, m1: u32, s1: f64, s2: f64) -> f64 {
    let m1_pts = 2f64.powi(m1 as i32);
    // Edge-to-edge regime before clusters interleave deeply.
    let first_hi = 1.0 / ((m1_pts - 1.5) * (m1_pts - 1.5) + 1.0);
    if alpha <= first_hi {
        return (s2 - (m1_pts - 1.0) * s1).abs();
    }
    for l in 2..=(m1_pts as i64 - 2) {
        let hi = 1.0 / ((m1_pts - 0.5 - l as f64) * (m1_pts - 0.5 - l as f64) + 1.0);
        if alpha <= hi {
            return (s2 - (m1_pts - l as f64) * s1).abs();
        }
    }
    // alpha > 4/13: deepest interleaving.
    (s2 - s1).abs()
}

/// Piecewise upper bound on the minimum product distance of the
/// alpha-weighted scheme (exact for the one-dimensional layer).
///
/// For `alpha > 1/2` the roles of the users swap. Breakpoints are
/// half-open `(lo, hi]`, so a value landing exactly on a breakpoint takes
/// the branch it closes.
pub fn dpmin_upper_bound(
    alpha: f64,
    m1: u32,
    m2: u32,
    n: usize,
    dp_lambda: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(CoreError::InvalidParameter(format!(
            "alpha must lie in [0,1], got {alpha}"
        )));
    }
    if m1 == 0 || m2 == 0 {
        return Err(CoreError::InvalidParameter(
            "the bound needs m1, m2 >= 1".into(),
        ));
    }
    if dp_lambda <= 0.0 {
        return Err(CoreError::InvalidParameter(
            "base product distance must be positive".into(),
        ));
    }
    // Swap rule: analyze alpha <= 1/2 with the user roles exchanged.
    let (alpha, m1, m2) = if alpha > 0.5 {
        (1.0 - alpha, m2, m1)
    } else {
        (alpha, m1, m2)
    };

    let nf = n as f64;
    let denom = (4f64.powi(m1 as i32) - 4f64.powi(m2 as i32)) * alpha + 4f64.powi(m2 as i32) - 1.0;
    let t = dp_lambda.powf(1.0 / nf);
    let base = (12.0 / denom).sqrt() * t;
    let s1 = base * alpha.sqrt();
    let s2 = base * (1.0 - alpha).sqrt();

    let alpha_lp = 1.0 / (1.0 + 4f64.powi(m1 as i32));
    if alpha <= alpha_lp {
        return Ok(s1.powf(nf));
    }

    let s_cl = intercluster_root_m2_1(alpha, m1, s1, s2);
    if m2 == 1 {
        return Ok(s_cl.powf(nf));
    }

    // Count how many clusters interleave at this power split.
    let c = (2f64.powi(m1 as i32) - 0.5).powi(2);
    let clusters = 1usize << m2;
    let mut xi = 2usize;
    while xi < clusters {
        let hi = (xi * xi) as f64 / (c + (xi * xi) as f64);
        if alpha <= hi {
            break;
        }
        xi += 1;
    }

    let mut best = f64::INFINITY;
    for gamma in 0..=(xi - 1) / 2 {
        for beta in 1..xi {
            let v = (gamma as f64 * s1 - beta as f64 * s_cl).abs().powf(nf);
            if v < best {
                best = v;
            }
        }
    }
    Ok(best)
}

/// Exact minimum Euclidean distance of the weighted composite via the
/// one-dimensional layer reduction (`n = 1` instance of the piecewise
/// form with unit base distance).
pub fn demin_analytic(alpha: f64, m1: u32, m2: u32) -> Result<f64> {
    dpmin_upper_bound(alpha, m1, m2, 1, 1.0)
}

/// Analytic minimum determinant of the orthogonal space-time codewords
/// built on the composite: `d_Emin^(2 Mt)`. Only the two-antenna
/// (Alamouti) wrapper is supported.
pub fn min_determinant(c: &CompositeConstellation, mt: u32) -> Result<f64> {
    if mt != 2 {
        return Err(CoreError::Unsupported(format!(
            "only Mt = 2 (Alamouti) is supported, got {mt}"
        )));
    }
    let de = exact_demin(c)?;
    Ok(de.powi(2 * mt as i32))
}

/// Exhaustive minimum determinant over codeword differences.
///
/// Codewords carry `Mt` symbols from the composite; the orthogonal
/// structure makes `det(ΔΔ^H) = (Σ_l |Δ_l|^2)^Mt`, minimized by a pair
/// differing in a single slot, so the scan reduces to the minimum
/// pairwise distance (zero when labels collide).
pub fn min_determinant_exhaustive(c: &CompositeConstellation, mt: u32) -> Result<f64> {
    if mt != 2 {
        return Err(CoreError::Unsupported(format!(
            "only Mt = 2 (Alamouti) is supported, got {mt}"
        )));
    }
    scan_guard(c)?;
    let pts = &c.points;
    let len = pts.len();
    let min_d2 = (0..len)
        .into_par_iter()
        .map(|i| {
            let mut best = f64::INFINITY;
            for j in i + 1..len {
                let d2: f64 = pts[i]
                    .iter()
                    .zip(&pts[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if d2 < best {
                    best = d2;
                }
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(min_d2.powi(mt as i32))
}

/// Full distance report for one alpha-weighted composite.
pub fn analyze(c: &CompositeConstellation, alpha: f64, dp_lambda: f64) -> Result<DistanceReport> {
    let scan = pair_scan(c)?;
    let bound = dpmin_upper_bound(alpha, c.m[0], c.m[1], c.n, dp_lambda)?;
    let de_analytic = demin_analytic(alpha, c.m[0], c.m[1])?;
    Ok(DistanceReport {
        alpha,
        exact_dpmin: scan.dp_min,
        bound_dpmin: bound,
        exact_demin: scan.de_min,
        min_det: de_analytic.powi(4),
        diversity_violation: scan.diversity_violation,
    })
}

/// CSV rows for a sweep of distance reports.
pub fn reports_to_csv(reports: &[DistanceReport]) -> String {
    let mut out = header(&[
        "alpha",
        "exact_dpmin",
        "bound_dpmin",
        "exact_demin",
        "min_det",
        "diversity_violation",
    ]);
    out.push('\n');
    for r in reports {
        out.push_str(&row(&[
            sig9(r.alpha),
            sig9(r.exact_dpmin),
            sig9(r.bound_dpmin),
            sig9(r.exact_demin),
            sig9(r.min_det),
            (r.diversity_violation as u8).to_string(),
        ]));
        out.push('\n');
    }
    out
}
