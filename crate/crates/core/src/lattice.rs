//! Exact lattice algebra for the lattices used by the NOMA schemes.
//!
//! Covers generator matrices, nearest-point quantizers with a
//! deterministic tie rule, modulo reduction, second-moment estimation and
//! minimum product distances for `Z^n`, the hexagonal lattice `A2`, the
//! checkerboard lattice `D4`, the Gosset lattice `E8` and the cyclotomic
//! ideal lattices (orthogonal rotations of `Z^n`).

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::rng::trial_rng;

/// Tolerance used for the cyclotomic orthogonality check and for treating
/// a coordinate difference as zero in product distances.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Coordinates below this magnitude count as zero when measuring
/// diversity, so rotation residue is not mistaken for a differing
/// coordinate.
pub const DIVERSITY_EPS: f64 = 1e-12;

/// The lattice families supported by the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeKind {
    /// The cubic lattice `Z^n`.
    Zn(usize),
    /// Hexagonal lattice, densest packing in two dimensions.
    A2,
    /// Checkerboard lattice, densest packing in four dimensions.
    D4,
    /// Gosset lattice, densest packing in eight dimensions.
    E8,
    /// Ideal lattice from the maximal real subfield of the p-th
    /// cyclotomic field; an orthogonal rotation of `Z^((p-1)/2)`.
    CyclotomicIdeal(u32),
}

impl LatticeKind {
    /// Dimension of the ambient space.
    pub fn dim(&self) -> usize {
        match self {
            LatticeKind::Zn(n) => *n,
            LatticeKind::A2 => 2,
            LatticeKind::D4 => 4,
            LatticeKind::E8 => 8,
            LatticeKind::CyclotomicIdeal(p) => (*p as usize - 1) / 2,
        }
    }
}

/// A point of a lattice, stored in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePoint {
    pub coords: Vec<f64>,
}

/// An n-dimensional lattice with its generator matrix (rows are basis
/// vectors) and cached figures of merit.
///
/// Immutable after construction; safe to share across worker threads.
#[derive(Debug, Clone)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub generator: DMatrix<f64>,
    pub n: usize,
    pub volume: f64,
    pub cached_nsm: Option<f64>,
    pub cached_dpmin: Option<f64>,
    inverse: DMatrix<f64>,
}

/// Result of a Monte-Carlo second-moment estimate.
#[derive(Debug, Clone, Copy)]
pub struct SecondMomentEstimate {
    /// Estimated average energy per dimension of a uniform distribution
    /// over the fundamental Voronoi region.
    pub sigma2: f64,
    /// Standard error of the estimate.
    pub std_err: f64,
    pub samples: u64,
}

/// Result of a brute-force product-distance scan.
#[derive(Debug, Clone, Copy)]
pub struct ProductDistanceScan {
    /// Minimum product of |coordinates| over full-diversity vectors in
    /// the scanned box; infinite if none was full-diversity.
    pub dp_min: f64,
    /// True when some nonzero vector had a (near-)zero coordinate.
    pub diversity_violation: bool,
}

/// Round to the integer `N` with `x` in `(N-1/2, N+1/2]`.
///
/// This is the deterministic tie rule used by every quantizer in the
/// crate; half-integers round down. Values within `1e-9` of the
/// half-integer grid are snapped onto it first, so coset ties survive
/// the round-off of rotated frames.
#[inline]
pub fn round_tie(x: f64) -> f64 {
    let snapped = (2.0 * x).round() / 2.0;
    let x = if (x - snapped).abs() < 1e-9 { snapped } else { x };
    (x - 0.5).ceil() + 0.0
}

/// Fixed generic direction (square roots of primes) used to break exact
/// ties between coset candidates. Its dot product never vanishes on a
/// nonzero difference of candidates, and candidate differences are
/// preserved under lattice translations, so the tie choice is
/// translation covariant — required for quotient-group closure.
fn tie_direction(i: usize) -> f64 {
    const PRIMES: [f64; 8] = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0];
    PRIMES[i].sqrt()
}

/// Choose the nearer of two coset candidates; exact ties (within a
/// relative `1e-9`) go to the candidate whose offset from `x` has the
/// smaller projection onto the fixed generic direction.
fn pick_coset_candidate(x: &[f64], q0: Vec<f64>, q1: Vec<f64>) -> Vec<f64> {
    let d0 = dist2(x, &q0);
    let d1 = dist2(x, &q1);
    let tol = 1e-9 * (1.0 + d0.max(d1));
    if (d0 - d1).abs() <= tol {
        let score = |q: &[f64]| -> f64 {
            q.iter()
                .zip(x)
                .enumerate()
                .map(|(i, (qi, xi))| (qi - xi) * tie_direction(i))
                .sum()
        };
        if score(&q0) <= score(&q1) {
            q0
        } else {
            q1
        }
    } else if d0 < d1 {
        q0
    } else {
        q1
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Generator matrix of the cyclotomic ideal lattice for prime `p >= 5`.
///
/// Rows are the canonical embeddings of the integral basis of the
/// maximal real subfield of the p-th cyclotomic field, twisted so the
/// result is an orthogonal rotation of `Z^((p-1)/2)` with unit volume.
pub fn cyclotomic_generator(p: u32) -> Result<DMatrix<f64>> {
    if !is_prime(p) || p < 5 {
        return Err(CoreError::InvalidParameter(format!(
            "cyclotomic construction needs a prime p >= 5, got {p}"
        )));
    }
    let n = (p as usize - 1) / 2;
    let pf = f64::from(p);
    let two_pi = 2.0 * std::f64::consts::PI;

    // M[i][j] = 2 cos(2 pi i j / p) for i, j in 1..=n.
    let m = DMatrix::from_fn(n, n, |i, j| {
        2.0 * (two_pi * ((i + 1) as f64) * ((j + 1) as f64) / pf).cos()
    });
    // Upper-triangular all-ones.
    let t = DMatrix::from_fn(n, n, |i, j| if i <= j { 1.0 } else { 0.0 });
    // diag(sqrt((1 - zeta^j)(1 - zeta^-j))) = diag(sqrt(2 - 2 cos(2 pi j / p))),
    // always positive so the square roots are real.
    let d = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            (2.0 - 2.0 * (two_pi * ((j + 1) as f64) / pf).cos()).sqrt()
        } else {
            0.0
        }
    });

    let g = (t * m * d) / pf.sqrt();

    // The product of the cosine terms is exactly +-1 analytically; check
    // we did not lose that in floating point.
    let gram = &g * g.transpose();
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { 1.0 } else { 0.0 };
            if (gram[(i, j)] - expect).abs() > ORTHOGONALITY_TOL {
                return Err(CoreError::NumericalFailure(format!(
                    "cyclotomic generator for p={p} is not orthogonal: |G G^T - I| = {:.3e} at ({i},{j})",
                    (gram[(i, j)] - expect).abs()
                )));
            }
        }
    }
    Ok(g)
}

/// Construct one of the supported lattices.
pub fn make_lattice(kind: LatticeKind) -> Result<LatticeSpec> {
    let generator = match kind {
        LatticeKind::Zn(n) => {
            if n == 0 {
                return Err(CoreError::InvalidParameter(
                    "Zn dimension must be positive".into(),
                ));
            }
            DMatrix::identity(n, n)
        }
        LatticeKind::A2 => {
            let s3 = 3f64.sqrt();
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.5, s3 / 2.0])
        }
        LatticeKind::D4 => DMatrix::from_row_slice(
            4,
            4,
            &[
                -1.0, -1.0, 0.0, 0.0, //
                1.0, -1.0, 0.0, 0.0, //
                0.0, 1.0, -1.0, 0.0, //
                0.0, 0.0, 1.0, -1.0,
            ],
        ),
        LatticeKind::E8 => {
            // E8 = D8 union (D8 + 1/2): seven D8 rows plus the half vector.
            let mut g = DMatrix::zeros(8, 8);
            g[(0, 0)] = 2.0;
            for r in 1..7 {
                g[(r, r - 1)] = -1.0;
                g[(r, r)] = 1.0;
            }
            for c in 0..8 {
                g[(7, c)] = 0.5;
            }
            g
        }
        LatticeKind::CyclotomicIdeal(p) => cyclotomic_generator(p)?,
    };

    let n = generator.nrows();
    let volume = generator.determinant().abs();
    if volume < 1e-12 {
        return Err(CoreError::NumericalFailure(
            "generator matrix is singular".into(),
        ));
    }
    let inverse = generator
        .clone()
        .try_inverse()
        .ok_or_else(|| CoreError::NumericalFailure("generator not invertible".into()))?;

    let cached_nsm = Some(closed_form_nsm(kind));
    let cached_dpmin = match kind {
        LatticeKind::CyclotomicIdeal(p) => {
            Some(f64::from(p).powf(-((n as f64 - 1.0) / 2.0)))
        }
        _ => None,
    };

    Ok(LatticeSpec {
        kind,
        generator,
        n,
        volume,
        cached_nsm,
        cached_dpmin,
        inverse,
    })
}

fn closed_form_nsm(kind: LatticeKind) -> f64 {
    match kind {
        LatticeKind::Zn(_) | LatticeKind::CyclotomicIdeal(_) => 1.0 / 12.0,
        LatticeKind::A2 => 5.0 / (36.0 * 3f64.sqrt()),
        LatticeKind::D4 => 13.0 / (120.0 * 2f64.sqrt()),
        LatticeKind::E8 => 929.0 / 12960.0,
    }
}

/// Nearest-point quantizer for `D_n` (integer vectors with even sum).
///
/// Round every coordinate; if the sum comes out odd, re-round the
/// coordinate with the largest rounding error the other way.
fn quantize_dn(x: &[f64], out: &mut [f64]) {
    let mut sum = 0i64;
    for (o, &xi) in out.iter_mut().zip(x) {
        *o = round_tie(xi);
        sum += *o as i64;
    }
    if sum.rem_euclid(2) != 0 {
        let mut worst = 0usize;
        let mut worst_err = -1.0;
        for (i, (&o, &xi)) in out.iter().zip(x).enumerate() {
            let err = (xi - o).abs();
            if err > worst_err {
                worst_err = err;
                worst = i;
            }
        }
        // Flip toward the second-nearest integer; exact integers move up.
        if x[worst] >= out[worst] {
            out[worst] += 1.0;
        } else {
            out[worst] -= 1.0;
        }
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl LatticeSpec {
    /// Nearest lattice point to `x` under the deterministic tie rule.
    pub fn quantize(&self, x: &[f64]) -> Result<LatticePoint> {
        if x.len() != self.n {
            return Err(CoreError::InvalidParameter(format!(
                "expected a {}-dimensional point, got {}",
                self.n,
                x.len()
            )));
        }
        let coords = match self.kind {
            LatticeKind::Zn(_) => x.iter().map(|&v| round_tie(v)).collect(),
            LatticeKind::D4 | LatticeKind::E8 => {
                let dn = self.n;
                let mut q0 = vec![0.0; dn];
                quantize_dn(x, &mut q0);
                if self.kind == LatticeKind::D4 {
                    q0
                } else {
                    // E8 = D8 union (D8 + 1/2).
                    let shifted: Vec<f64> = x.iter().map(|&v| v - 0.5).collect();
                    let mut q1 = vec![0.0; dn];
                    quantize_dn(&shifted, &mut q1);
                    for q in q1.iter_mut() {
                        *q += 0.5;
                    }
                    pick_coset_candidate(x, q0, q1)
                }
            }
            LatticeKind::A2 => {
                // A2 = R union (R + s) with R the rectangle lattice
                // Z x sqrt(3) Z and s = (1/2, sqrt(3)/2).
                let s3 = 3f64.sqrt();
                let q0 = vec![round_tie(x[0]), s3 * round_tie(x[1] / s3)];
                let q1 = vec![
                    round_tie(x[0] - 0.5) + 0.5,
                    s3 * round_tie((x[1] - s3 / 2.0) / s3) + s3 / 2.0,
                ];
                pick_coset_candidate(x, q0, q1)
            }
            LatticeKind::CyclotomicIdeal(_) => {
                // Rotate into the Z^n frame, round there, rotate back.
                let mut b = vec![0.0; self.n];
                for (j, bj) in b.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (i, &xi) in x.iter().enumerate() {
                        acc += xi * self.generator[(j, i)];
                    }
                    *bj = round_tie(acc);
                }
                let mut coords = vec![0.0; self.n];
                for (i, c) in coords.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (j, &bj) in b.iter().enumerate() {
                        acc += bj * self.generator[(j, i)];
                    }
                    *c = acc;
                }
                coords
            }
        };
        Ok(LatticePoint { coords })
    }

    /// `x mod Λ`: the representative of `x` in the fundamental Voronoi
    /// region.
    pub fn modulo(&self, x: &[f64]) -> Result<Vec<f64>> {
        let q = self.quantize(x)?;
        Ok(x.iter().zip(&q.coords).map(|(a, b)| a - b).collect())
    }

    /// `x mod cΛ` for a scaled copy of the lattice, `c > 0`.
    pub fn modulo_scaled(&self, c: f64, x: &[f64]) -> Result<Vec<f64>> {
        if c <= 0.0 {
            return Err(CoreError::InvalidParameter(format!(
                "scale must be positive, got {c}"
            )));
        }
        let scaled: Vec<f64> = x.iter().map(|v| v / c).collect();
        let q = self.quantize(&scaled)?;
        Ok(x.iter().zip(&q.coords).map(|(a, b)| a - c * b).collect())
    }

    /// Map integer coordinates to the lattice point `b G`.
    pub fn point_from_integers(&self, b: &[i64]) -> Vec<f64> {
        let mut coords = vec![0.0; self.n];
        for (i, c) in coords.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, &bj) in b.iter().enumerate() {
                acc += bj as f64 * self.generator[(j, i)];
            }
            *c = acc;
        }
        coords
    }

    /// Recover the integer coordinates of a lattice point (inverse of
    /// [`Self::point_from_integers`]); errors if `x` is not a lattice
    /// point within `1e-9`.
    pub fn integer_coords(&self, x: &[f64]) -> Result<Vec<i64>> {
        if x.len() != self.n {
            return Err(CoreError::InvalidParameter("dimension mismatch".into()));
        }
        let mut b = vec![0i64; self.n];
        for (j, bj) in b.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, &xi) in x.iter().enumerate() {
                acc += xi * self.inverse[(i, j)];
            }
            let r = acc.round();
            if (acc - r).abs() > 1e-6 {
                return Err(CoreError::NumericalFailure(format!(
                    "not a lattice point: integer solve residual {:.3e}",
                    (acc - r).abs()
                )));
            }
            *bj = r as i64;
        }
        let back = self.point_from_integers(&b);
        if dist2(&back, x).sqrt() > 1e-9 {
            return Err(CoreError::NumericalFailure(
                "not a lattice point within 1e-9".into(),
            ));
        }
        Ok(b)
    }

    /// Monte-Carlo estimate of the second moment `sigma^2(Λ)`.
    ///
    /// Samples uniformly over the fundamental parallelepiped and reduces
    /// modulo the lattice; the reduction is a measure-preserving bijection
    /// onto the Voronoi region, so the samples are exactly uniform there.
    pub fn second_moment(&self, n_samples: u64, seed: u64) -> Result<SecondMomentEstimate> {
        if n_samples < 1 {
            return Err(CoreError::InvalidParameter(
                "need at least one sample".into(),
            ));
        }
        let n = self.n;
        let values: Vec<f64> = (0..n_samples)
            .into_par_iter()
            .map(|t| {
                use rand::Rng;
                let mut rng = trial_rng(seed, 0x5ec0_4d4e, t);
                let mut y = vec![0.0; n];
                for j in 0..n {
                    let u: f64 = rng.gen();
                    for (i, yi) in y.iter_mut().enumerate() {
                        *yi += u * self.generator[(j, i)];
                    }
                }
                let z = self.modulo(&y).expect("dimension fixed");
                z.iter().map(|v| v * v).sum::<f64>() / n as f64
            })
            .collect();

        let mean = values.iter().sum::<f64>() / n_samples as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (n_samples as f64 - 1.0).max(1.0);
        Ok(SecondMomentEstimate {
            sigma2: mean,
            std_err: (var / n_samples as f64).sqrt(),
            samples: n_samples,
        })
    }

    /// Normalized second moment `psi(Λ)`, from the closed form.
    pub fn nsm(&self) -> f64 {
        self.cached_nsm.unwrap_or_else(|| closed_form_nsm(self.kind))
    }

    /// Closed-form minimum product distance `p^{-(n-1)/2}` of the
    /// cyclotomic ideal lattice.
    pub fn min_product_distance_closed(&self) -> Result<f64> {
        match self.kind {
            LatticeKind::CyclotomicIdeal(_) => Ok(self.cached_dpmin.expect("set at construction")),
            _ => Err(CoreError::Unsupported(
                "closed-form product distance only exists for the cyclotomic ideal lattices"
                    .into(),
            )),
        }
    }

    /// Brute-force minimum product distance over all nonzero integer
    /// vectors with infinity norm at most `radius`.
    pub fn min_product_distance_bruteforce(&self, radius: i64) -> Result<ProductDistanceScan> {
        if radius < 1 {
            return Err(CoreError::InvalidParameter(
                "radius must be at least 1".into(),
            ));
        }
        let n = self.n;
        let width = (2 * radius + 1) as u64;
        let total = width.pow(n as u32);
        let mut dp_min = f64::INFINITY;
        let mut violation = false;
        let mut b = vec![0i64; n];
        for idx in 0..total {
            let mut k = idx;
            let mut all_zero = true;
            for bj in b.iter_mut() {
                *bj = (k % width) as i64 - radius;
                if *bj != 0 {
                    all_zero = false;
                }
                k /= width;
            }
            if all_zero {
                continue;
            }
            let lam = self.point_from_integers(&b);
            let mut prod = 1.0;
            let mut full = true;
            for &c in &lam {
                if c.abs() < DIVERSITY_EPS {
                    full = false;
                    break;
                }
                prod *= c.abs();
            }
            if full {
                dp_min = dp_min.min(prod);
            } else {
                violation = true;
            }
        }
        Ok(ProductDistanceScan {
            dp_min,
            diversity_violation: violation,
        })
    }

    /// Minimum Euclidean distance of the lattice (closed form; every
    /// supported lattice has a known shortest-vector length).
    pub fn min_euclidean_distance(&self) -> f64 {
        match self.kind {
            LatticeKind::Zn(_) | LatticeKind::CyclotomicIdeal(_) => 1.0,
            LatticeKind::A2 => 1.0,
            LatticeKind::D4 | LatticeKind::E8 => 2f64.sqrt(),
        }
    }
}
