//! TOML experiment configuration: one table per experiment kind.

use anyhow::{bail, Context};
use latnoma_core::lattice::{make_lattice, LatticeKind, LatticeSpec};
use latnoma_core::metrics::DecodeMode;
use latnoma_core::schemes::CombinationRule;
use serde::{Deserialize, Serialize};

/// Top-level config file; each experiment reads its own table.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ConfigFile {
    pub rate_region: Option<RateRegionConfig>,
    pub outage_region: Option<OutageRegionConfig>,
    pub product_distance: Option<AlphaSweepConfig>,
    pub min_det: Option<AlphaSweepConfig>,
    pub ser: Option<SerConfig>,
    pub gap_bounds: Option<GapBoundsConfig>,
}

/// Achievable-rate evaluation of one scheme at fixed SNRs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateRegionConfig {
    /// Lattice name: `z<n>`, `a2`, `d4`, `e8` or `cyc<p>`.
    pub lattice: String,
    /// Bits per dimension per user, strongest first.
    pub m: Vec<u32>,
    /// Per-user receive SNR in dB.
    pub snr_db: Vec<f64>,
    pub trials: u64,
    /// `modulo_chain` (default) or `direct_sum`.
    #[serde(default = "default_rule")]
    pub rule: String,
    /// Decoder modes to evaluate: `single_user` and/or `genie_sic`.
    #[serde(default = "default_modes")]
    pub modes: Vec<String>,
}

/// Outage-rate evaluation over slow Rayleigh fading plus the outage
/// capacity boundary at the same parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutageRegionConfig {
    pub lattice: String,
    pub m: Vec<u32>,
    /// Average per-user SNR in dB.
    pub mean_snr_db: Vec<f64>,
    /// Per-user target outage probabilities.
    pub eps: Vec<f64>,
    pub frames: u64,
    pub trials_per_frame: u64,
    #[serde(default = "default_modes")]
    pub modes: Vec<String>,
    /// Number of power splits for the capacity boundary sweep.
    #[serde(default = "default_boundary_points")]
    pub boundary_points: usize,
}

/// Sweep of the power-allocation factor for distance analysis; shared by
/// the product-distance and minimum-determinant experiments.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlphaSweepConfig {
    /// Prime of the cyclotomic base lattice (or any lattice name; the
    /// distance experiments expect a rotated-`Z^n` base).
    pub lattice: String,
    pub m: Vec<u32>,
    pub alpha_points: usize,
    #[serde(default)]
    pub alpha_min: f64,
    #[serde(default = "default_alpha_max")]
    pub alpha_max: f64,
}

/// Symbol-error-rate sweep under block Rayleigh fading.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SerConfig {
    pub lattice: String,
    pub m: Vec<u32>,
    /// Power allocation for user 1; omit to use the lattice-partition
    /// split.
    pub alpha: Option<f64>,
    pub snr_db_grid: Vec<f64>,
    pub trials: u64,
    #[serde(default = "default_mode")]
    pub mode: String,
}

/// Closed-form gap bound tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapBoundsConfig {
    /// `full_csi` (instantaneous CSI) or `outage` (statistical CSI).
    pub regime: String,
    /// Lattice names; `opt` selects the asymptotically optimal shaping
    /// value `1/(2 pi e)`.
    pub lattices: Vec<String>,
    pub users: usize,
    /// Outage probabilities (outage regime only).
    #[serde(default)]
    pub eps: Vec<f64>,
}

fn default_rule() -> String {
    "modulo_chain".into()
}
fn default_mode() -> String {
    "single_user".into()
}
fn default_modes() -> Vec<String> {
    vec!["single_user".into()]
}
fn default_alpha_max() -> f64 {
    0.5
}
fn default_boundary_points() -> usize {
    201
}

pub fn parse_lattice(name: &str) -> anyhow::Result<LatticeSpec> {
    let kind = parse_lattice_kind(name)?;
    make_lattice(kind).with_context(|| format!("constructing lattice {name}"))
}

pub fn parse_lattice_kind(name: &str) -> anyhow::Result<LatticeKind> {
    let lower = name.to_ascii_lowercase();
    let kind = match lower.as_str() {
        "a2" => LatticeKind::A2,
        "d4" => LatticeKind::D4,
        "e8" => LatticeKind::E8,
        _ => {
            if let Some(n) = lower.strip_prefix('z') {
                LatticeKind::Zn(n.parse().context("lattice z<n> needs an integer dimension")?)
            } else if let Some(p) = lower.strip_prefix("cyc") {
                LatticeKind::CyclotomicIdeal(
                    p.parse().context("lattice cyc<p> needs an integer prime")?,
                )
            } else {
                bail!("unknown lattice '{name}' (expected z<n>, a2, d4, e8 or cyc<p>)");
            }
        }
    };
    Ok(kind)
}

pub fn parse_rule(name: &str) -> anyhow::Result<CombinationRule> {
    match name.to_ascii_lowercase().as_str() {
        "modulo_chain" => Ok(CombinationRule::ModuloChain),
        "direct_sum" => Ok(CombinationRule::DirectSum),
        other => bail!("unknown combination rule '{other}'"),
    }
}

pub fn parse_mode(name: &str) -> anyhow::Result<DecodeMode> {
    match name.to_ascii_lowercase().as_str() {
        "single_user" => Ok(DecodeMode::SingleUser),
        "genie_sic" => Ok(DecodeMode::GenieSic),
        other => bail!("unknown decode mode '{other}'"),
    }
}

pub fn mode_name(mode: DecodeMode) -> &'static str {
    match mode {
        DecodeMode::SingleUser => "single_user",
        DecodeMode::GenieSic => "genie_sic",
    }
}

pub fn load(path: &std::path::Path) -> anyhow::Result<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let cfg: ConfigFile = toml::from_str(&text).with_context(|| {
        format!("parsing config {} (TOML with one table per experiment)", path.display())
    })?;
    Ok(cfg)
}
