//! Config validation: collect every violation without running anything.

use latnoma_core::detmodel::{n_of_snr, RatePlan};
use latnoma_core::metrics::gaps::EPS_REGIME_LIMIT;

use crate::config::{
    parse_lattice_kind, parse_mode, parse_rule, AlphaSweepConfig, ConfigFile, GapBoundsConfig,
    OutageRegionConfig, RateRegionConfig, SerConfig,
};
use crate::Experiment;

/// One validation finding, tagged with the experiment table it concerns.
#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub experiment: &'static str,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}", self.experiment, self.message)
    }
}

fn push(diags: &mut Vec<Diagnostic>, experiment: &'static str, message: impl Into<String>) {
    diags.push(Diagnostic {
        experiment,
        message: message.into(),
    });
}

fn check_lattice(
    diags: &mut Vec<Diagnostic>,
    tag: &'static str,
    name: &str,
    m: &[u32],
) -> Option<usize> {
    match parse_lattice_kind(name) {
        Err(e) => {
            push(diags, tag, format!("{e:#}"));
            None
        }
        Ok(kind) => {
            let n = kind.dim();
            let bits = n as u32 * m.iter().sum::<u32>();
            if bits > 16 {
                push(
                    diags,
                    tag,
                    format!("constellation too large: 2^{bits} composite points (limit 2^16)"),
                );
            }
            if let latnoma_core::lattice::LatticeKind::CyclotomicIdeal(p) = kind {
                if latnoma_core::lattice::make_lattice(
                    latnoma_core::lattice::LatticeKind::CyclotomicIdeal(p),
                )
                .is_err()
                {
                    push(diags, tag, format!("invalid cyclotomic prime {p}"));
                }
            }
            Some(n)
        }
    }
}

fn check_rate_region(diags: &mut Vec<Diagnostic>, c: &RateRegionConfig) {
    const TAG: &str = "rate_region";
    check_lattice(diags, TAG, &c.lattice, &c.m);
    if c.m.len() != c.snr_db.len() {
        push(diags, TAG, "m and snr_db must have one entry per user");
        return;
    }
    if c.trials == 0 {
        push(diags, TAG, "trials must be at least 1");
    }
    if let Err(e) = parse_rule(&c.rule) {
        push(diags, TAG, format!("{e:#}"));
    }
    for mode in &c.modes {
        if let Err(e) = parse_mode(mode) {
            push(diags, TAG, format!("{e:#}"));
        }
    }
    let mut levels = Vec::new();
    for &snr_db in &c.snr_db {
        let lin = 10f64.powf(snr_db / 10.0);
        match n_of_snr(lin) {
            Ok(n) => levels.push(n),
            Err(e) => push(diags, TAG, format!("snr {snr_db} dB: {e}")),
        }
    }
    if levels.len() == c.m.len() {
        let plan = RatePlan::new(c.m.clone(), levels.clone());
        match plan {
            Ok(p) if !p.feasible() => push(
                diags,
                TAG,
                format!(
                    "rate plan m={:?} infeasible against bit-pipe levels {:?}",
                    c.m, levels
                ),
            ),
            Err(e) => push(diags, TAG, format!("{e}")),
            _ => {}
        }
    }
}

fn check_outage_region(diags: &mut Vec<Diagnostic>, c: &OutageRegionConfig) {
    const TAG: &str = "outage_region";
    check_lattice(diags, TAG, &c.lattice, &c.m);
    if c.m.len() != c.mean_snr_db.len() || c.m.len() != c.eps.len() {
        push(diags, TAG, "m, mean_snr_db and eps must have one entry per user");
        return;
    }
    if c.frames == 0 || c.trials_per_frame == 0 {
        push(diags, TAG, "frames and trials_per_frame must be at least 1");
    }
    for mode in &c.modes {
        if let Err(e) = parse_mode(mode) {
            push(diags, TAG, format!("{e:#}"));
        }
    }
    for &e in &c.eps {
        if !(0.0 < e && e < 1.0) {
            push(diags, TAG, format!("outage probability {e} must lie in (0,1)"));
        } else if e >= EPS_REGIME_LIMIT {
            push(
                diags,
                TAG,
                format!(
                    "outage probability {e} out of regime: capacity gap bounds require eps < {EPS_REGIME_LIMIT}"
                ),
            );
        }
    }
    let mut levels = Vec::new();
    for &snr_db in &c.mean_snr_db {
        let lin = 10f64.powf(snr_db / 10.0);
        match n_of_snr(lin) {
            Ok(n) => levels.push(n),
            Err(e) => push(diags, TAG, format!("snr {snr_db} dB: {e}")),
        }
    }
    if levels.len() == c.m.len() {
        if let Ok(p) = RatePlan::new(c.m.clone(), levels.clone()) {
            if !p.feasible() {
                push(
                    diags,
                    TAG,
                    format!(
                        "rate plan m={:?} infeasible against bit-pipe levels {:?}",
                        c.m, levels
                    ),
                );
            }
        }
    }
}

fn check_alpha_sweep(
    diags: &mut Vec<Diagnostic>,
    tag: &'static str,
    c: &AlphaSweepConfig,
    needs_product_distance: bool,
) {
    check_lattice(diags, tag, &c.lattice, &c.m);
    if c.m.len() != 2 {
        push(diags, tag, "alpha sweeps are two-user experiments");
    } else if c.m.contains(&0) {
        push(diags, tag, "alpha sweeps need m1, m2 >= 1");
    }
    if c.alpha_points < 2 {
        push(diags, tag, "need at least two alpha grid points");
    }
    if !(0.0..=1.0).contains(&c.alpha_min)
        || !(0.0..=1.0).contains(&c.alpha_max)
        || c.alpha_min >= c.alpha_max
    {
        push(diags, tag, "alpha range must satisfy 0 <= alpha_min < alpha_max <= 1");
    }
    if let Ok(kind) = parse_lattice_kind(&c.lattice) {
        match kind {
            latnoma_core::lattice::LatticeKind::CyclotomicIdeal(_) => {}
            latnoma_core::lattice::LatticeKind::Zn(_) if !needs_product_distance => {}
            _ if needs_product_distance => push(
                diags,
                tag,
                "product-distance sweeps need a cyclotomic base lattice",
            ),
            _ => push(diags, tag, "alpha sweeps require a rotated-Z^n base lattice"),
        }
    }
}

fn check_ser(diags: &mut Vec<Diagnostic>, c: &SerConfig) {
    const TAG: &str = "ser";
    check_lattice(diags, TAG, &c.lattice, &c.m);
    if c.m.len() != 2 {
        push(diags, TAG, "SER sweeps are two-user experiments");
    }
    if let Some(a) = c.alpha {
        if !(0.0..=1.0).contains(&a) {
            push(diags, TAG, format!("alpha {a} must lie in [0,1]"));
        }
    }
    if c.snr_db_grid.is_empty() {
        push(diags, TAG, "snr_db_grid must not be empty");
    }
    if c.trials == 0 {
        push(diags, TAG, "trials must be at least 1");
    }
    if let Err(e) = parse_mode(&c.mode) {
        push(diags, TAG, format!("{e:#}"));
    }
}

fn check_gap_bounds(diags: &mut Vec<Diagnostic>, c: &GapBoundsConfig) {
    const TAG: &str = "gap_bounds";
    match c.regime.as_str() {
        "full_csi" => {
            if c.users == 0 {
                push(diags, TAG, "users must be at least 1");
            }
        }
        "outage" => {
            if c.eps.len() != c.users || c.users < 2 {
                push(diags, TAG, "outage regime needs eps entries for at least two users");
            }
            for &e in &c.eps {
                if !(0.0..EPS_REGIME_LIMIT).contains(&e) {
                    push(
                        diags,
                        TAG,
                        format!(
                            "outage probability {e} out of regime: bounds require eps < {EPS_REGIME_LIMIT}"
                        ),
                    );
                }
            }
        }
        other => push(diags, TAG, format!("unknown regime '{other}'")),
    }
    for name in &c.lattices {
        if name != "opt" && parse_lattice_kind(name).is_err() {
            push(diags, TAG, format!("unknown lattice '{name}'"));
        }
    }
}

/// Collect all diagnostics for the experiment table a subcommand uses.
pub fn validate(cfg: &ConfigFile, experiment: Experiment) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let missing = |diags: &mut Vec<Diagnostic>, tag: &'static str| {
        push(
            diags,
            tag,
            format!("config has no [{tag}] table for this experiment"),
        );
    };
    match experiment {
        Experiment::RateRegion => match &cfg.rate_region {
            Some(c) => check_rate_region(&mut diags, c),
            None => missing(&mut diags, "rate_region"),
        },
        Experiment::OutageRegion => match &cfg.outage_region {
            Some(c) => check_outage_region(&mut diags, c),
            None => missing(&mut diags, "outage_region"),
        },
        Experiment::ProductDistance => match &cfg.product_distance {
            Some(c) => check_alpha_sweep(&mut diags, "product_distance", c, true),
            None => missing(&mut diags, "product_distance"),
        },
        Experiment::MinDet => match &cfg.min_det {
            Some(c) => check_alpha_sweep(&mut diags, "min_det", c, false),
            None => missing(&mut diags, "min_det"),
        },
        Experiment::Ser => match &cfg.ser {
            Some(c) => check_ser(&mut diags, c),
            None => missing(&mut diags, "ser"),
        },
        Experiment::GapBounds => match &cfg.gap_bounds {
            Some(c) => check_gap_bounds(&mut diags, c),
            None => missing(&mut diags, "gap_bounds"),
        },
    }
    diags
}
