//! Coset-leader constellations for the lattice partition `Λ/2^mΛ`.
//!
//! The `2^(n m)` coset leaders are the minimum-norm representatives in
//! the Voronoi region of the coarse lattice, mean-centered by a
//! deterministic dither and power-normalized so the average energy per
//! dimension is one. The bit labeling is the natural per-coordinate
//! binary expansion, bijective by construction.

use crate::error::{CoreError, Result};
use crate::lattice::LatticeSpec;

/// Guard on the number of constellation points an enumeration may
/// produce; exhaustive scans beyond this are intractable.
pub const MAX_POINTS_LOG2: u32 = 16;

/// A lattice partition `Λ/2^mΛ`.
#[derive(Debug, Clone)]
pub struct PartitionSpec {
    pub base: LatticeSpec,
    pub m: u32,
}

/// A finite constellation with dither, scale and bit labeling.
///
/// `points` are the raw (unscaled, undithered) coset leaders in label
/// order; a transmitted symbol for label `k` is
/// `scale * (points[k] - dither)`.
#[derive(Debug, Clone)]
pub struct Constellation {
    pub points: Vec<Vec<f64>>,
    pub dither: Vec<f64>,
    pub scale: f64,
    /// Base lattice dimension.
    pub n: usize,
    /// Bits per dimension (the partition exponent).
    pub m: u32,
}

impl PartitionSpec {
    pub fn new(base: LatticeSpec, m: u32) -> Result<Self> {
        let bits = base.n as u32 * m;
        if bits > MAX_POINTS_LOG2 {
            return Err(CoreError::TooLarge(format!(
                "partition would have 2^{bits} coset leaders (limit 2^{MAX_POINTS_LOG2})"
            )));
        }
        Ok(Self { base, m })
    }

    /// Number of coset leaders, `2^(n m)`.
    pub fn cardinality(&self) -> usize {
        1usize << (self.base.n as u32 * self.m)
    }
}

/// Enumerate the coset leaders of `Λ/2^mΛ` in label order.
///
/// Label `k` has per-coordinate digits `b_i = (k >> (i m)) & (2^m - 1)`;
/// the leader is `bG mod 2^mΛ`, the minimum-norm representative of its
/// coset under the deterministic tie rule.
pub fn coset_leaders(part: &PartitionSpec) -> Result<Vec<Vec<f64>>> {
    let n = part.base.n;
    let m = part.m;
    if m == 0 {
        return Ok(vec![vec![0.0; n]]);
    }
    let per_coord = 1u64 << m;
    let count = part.cardinality();
    let scale = per_coord as f64;
    let mut leaders = Vec::with_capacity(count);
    let mut b = vec![0i64; n];
    for k in 0..count as u64 {
        for (i, bi) in b.iter_mut().enumerate() {
            *bi = ((k >> (i as u32 * m)) & (per_coord - 1)) as i64;
        }
        let raw = part.base.point_from_integers(&b);
        leaders.push(part.base.modulo_scaled(scale, &raw)?);
    }
    Ok(leaders)
}

/// Arithmetic mean of a point list and the centered copy.
pub fn mean_center(points: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if points.is_empty() {
        return Err(CoreError::InvalidParameter("empty point list".into()));
    }
    let n = points[0].len();
    let mut dither = vec![0.0; n];
    for p in points {
        for (d, v) in dither.iter_mut().zip(p) {
            *d += v;
        }
    }
    for d in dither.iter_mut() {
        *d /= points.len() as f64;
    }
    let centered = points
        .iter()
        .map(|p| p.iter().zip(&dither).map(|(v, d)| v - d).collect())
        .collect();
    Ok((dither, centered))
}

/// Average squared norm of the dithered points, `mean ||p - d||^2`.
pub fn average_power(points: &[Vec<f64>], dither: &[f64]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    points
        .iter()
        .map(|p| {
            p.iter()
                .zip(dither)
                .map(|(v, d)| (v - d) * (v - d))
                .sum::<f64>()
        })
        .sum::<f64>()
        / points.len() as f64
}

/// Build the full constellation for a partition: leaders in label order,
/// mean-centering dither and a scale meeting the power constraint
/// `E||x||^2 <= n` with equality (zero-power constellations get scale 1).
pub fn build_constellation(part: &PartitionSpec) -> Result<Constellation> {
    let points = coset_leaders(part)?;
    let (dither, _) = mean_center(&points)?;
    let power = average_power(&points, &dither);
    let n = part.base.n;
    let scale = if power > 0.0 {
        (n as f64 / power).sqrt()
    } else {
        1.0
    };
    Ok(Constellation {
        points,
        dither,
        scale,
        n,
        m: part.m,
    })
}

impl Constellation {
    /// Transmitted symbol for a label.
    pub fn symbol(&self, label: usize) -> Vec<f64> {
        self.points[label]
            .iter()
            .zip(&self.dither)
            .map(|(p, d)| self.scale * (p - d))
            .collect()
    }

    /// Number of labels.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Encode a bit string (length `n*m`, index 0 = least significant)
    /// into a label.
    pub fn label_from_bits(&self, bits: &[u8]) -> Result<usize> {
        let want = self.n as u32 * self.m;
        if bits.len() != want as usize {
            return Err(CoreError::InvalidParameter(format!(
                "expected {want} bits, got {}",
                bits.len()
            )));
        }
        let mut label = 0usize;
        for (i, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(CoreError::InvalidParameter("bits must be 0 or 1".into()));
            }
            label |= (b as usize) << i;
        }
        Ok(label)
    }

    /// Decode a label back to its bit string.
    pub fn bits_from_label(&self, label: usize) -> Vec<u8> {
        let want = (self.n as u32 * self.m) as usize;
        (0..want).map(|i| ((label >> i) & 1) as u8).collect()
    }

    /// Export as CSV, one point per row, columns = coordinates of the
    /// transmitted (dithered, scaled) symbol plus the label.
    pub fn to_csv(&self) -> String {
        use crate::csvfmt::{header, row, sig9};
        let mut cols: Vec<String> = (0..self.n).map(|i| format!("x{i}")).collect();
        cols.push("label".to_string());
        let cols_ref: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
        let mut out = header(&cols_ref);
        out.push('\n');
        for label in 0..self.len() {
            let sym = self.symbol(label);
            let mut fields: Vec<String> = sym.iter().map(|&v| sig9(v)).collect();
            fields.push(label.to_string());
            out.push_str(&row(&fields));
            out.push('\n');
        }
        out
    }
}
