//! Experiment drivers: build the scheme, run the estimators, emit CSV
//! data plus a JSON metadata sidecar.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use latnoma_core::csvfmt::{header, row, sig9};
use latnoma_core::distance::{
    dpmin_upper_bound, min_determinant_exhaustive, pair_scan, demin_analytic,
};
use latnoma_core::lattice::LatticeKind;
use latnoma_core::metrics::capacity::outage_capacity;
use latnoma_core::metrics::gaps::{gap_bound_ch5, gap_bound_ch6};
use latnoma_core::metrics::mi::mutual_information_mc;
use latnoma_core::metrics::outage::outage_rate_mc;
use latnoma_core::metrics::ser::{diversity_slope, ser_mc};
use latnoma_core::schemes::{CombinationRule, SchemeSpec};
use serde_json::json;

use crate::checkpoint::Checkpoint;
use crate::config::{
    mode_name, parse_lattice, parse_mode, parse_rule, AlphaSweepConfig, ConfigFile,
    GapBoundsConfig, OutageRegionConfig, RateRegionConfig, SerConfig,
};
use crate::Experiment;

pub struct RunOutcome {
    pub files: Vec<PathBuf>,
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

#[allow(clippy::too_many_arguments)]
fn write_metadata(
    out: &Path,
    name: &str,
    seed: u64,
    threads: usize,
    config_echo: &str,
    extra: serde_json::Value,
    started: Instant,
    files: &[PathBuf],
) -> anyhow::Result<PathBuf> {
    let meta_path = out.join(format!("{name}.meta.json"));
    let meta = json!({
        "experiment": name,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "threads": threads,
        "config": config_echo,
        "wall_ms": started.elapsed().as_millis() as u64,
        "outputs": files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
        "results": extra,
    });
    write_file(&meta_path, &serde_json::to_string_pretty(&meta)?)?;
    Ok(meta_path)
}

fn echo<T: serde::Serialize>(table: &T) -> anyhow::Result<String> {
    Ok(toml::to_string(table)?)
}

pub fn run(
    experiment: Experiment,
    cfg: &ConfigFile,
    seed: u64,
    out: &Path,
    threads: usize,
) -> anyhow::Result<RunOutcome> {
    std::fs::create_dir_all(out)?;
    match experiment {
        Experiment::RateRegion => rate_region(cfg.rate_region.as_ref().unwrap(), seed, out, threads),
        Experiment::OutageRegion => {
            outage_region(cfg.outage_region.as_ref().unwrap(), seed, out, threads)
        }
        Experiment::ProductDistance => {
            alpha_sweep(cfg.product_distance.as_ref().unwrap(), seed, out, threads, true)
        }
        Experiment::MinDet => {
            alpha_sweep(cfg.min_det.as_ref().unwrap(), seed, out, threads, false)
        }
        Experiment::Ser => ser(cfg.ser.as_ref().unwrap(), seed, out, threads),
        Experiment::GapBounds => gap_bounds(cfg.gap_bounds.as_ref().unwrap(), seed, out, threads),
    }
}

fn rate_region(
    c: &RateRegionConfig,
    seed: u64,
    out: &Path,
    threads: usize,
) -> anyhow::Result<RunOutcome> {
    let started = Instant::now();
    let base = parse_lattice(&c.lattice)?;
    let rule = parse_rule(&c.rule)?;
    let scheme = SchemeSpec::new(base, c.m.clone(), rule)?;
    let composite = scheme.build()?;

    let mut csv = header(&["mode", "user", "snr_db", "mi_bits_per_dim", "std_err", "trials"]);
    csv.push('\n');
    let mut summary = Vec::new();
    for mode_name_str in &c.modes {
        let mode = parse_mode(mode_name_str)?;
        for user in 0..c.m.len() {
            let snr = 10f64.powf(c.snr_db[user] / 10.0);
            let est = mutual_information_mc(&composite, user, snr, mode, c.trials, seed)?;
            csv.push_str(&row(&[
                mode_name(mode).to_string(),
                user.to_string(),
                sig9(c.snr_db[user]),
                sig9(est.mi),
                sig9(est.std_err),
                est.trials.to_string(),
            ]));
            csv.push('\n');
            summary.push(json!({
                "mode": mode_name(mode), "user": user, "mi": est.mi, "std_err": est.std_err,
            }));
            println!(
                "rate-region {} user {}: {:.4} +- {:.4} bits/dim",
                mode_name(mode),
                user,
                est.mi,
                est.std_err
            );
        }
    }
    let csv_path = out.join("rate_region.csv");
    write_file(&csv_path, &csv)?;
    let mut files = vec![csv_path];
    let meta = write_metadata(
        out,
        "rate_region",
        seed,
        threads,
        &echo(c)?,
        json!(summary),
        started,
        &files,
    )?;
    files.push(meta);
    Ok(RunOutcome { files })
}

fn outage_region(
    c: &OutageRegionConfig,
    seed: u64,
    out: &Path,
    threads: usize,
) -> anyhow::Result<RunOutcome> {
    let started = Instant::now();
    let base = parse_lattice(&c.lattice)?;
    let scheme = SchemeSpec::new(base, c.m.clone(), CombinationRule::ModuloChain)?;
    let composite = scheme.build()?;

    let mut csv = header(&[
        "mode",
        "user",
        "mean_snr_db",
        "eps",
        "outage_rate",
        "frames",
        "trials_per_frame",
    ]);
    csv.push('\n');
    for mode_str in &c.modes {
        let mode = parse_mode(mode_str)?;
        for user in 0..c.m.len() {
            let snr = 10f64.powf(c.mean_snr_db[user] / 10.0);
            let est = outage_rate_mc(
                &composite,
                user,
                snr,
                c.eps[user],
                c.frames,
                c.trials_per_frame,
                mode,
                seed,
            )?;
            csv.push_str(&row(&[
                mode_name(mode).to_string(),
                user.to_string(),
                sig9(c.mean_snr_db[user]),
                sig9(c.eps[user]),
                sig9(est.outage_rate),
                c.frames.to_string(),
                c.trials_per_frame.to_string(),
            ]));
            csv.push('\n');
            println!(
                "outage-region {} user {}: {:.4} bits/dim at eps {}",
                mode_name(mode),
                user,
                est.outage_rate,
                c.eps[user]
            );
        }
    }
    let csv_path = out.join("outage_region_rates.csv");
    write_file(&csv_path, &csv)?;
    let mut files = vec![csv_path];

    // Outage capacity boundary sweep (two-user configs only).
    if c.m.len() == 2 {
        let mut bcsv = header(&["alpha_user1", "c1", "c2"]);
        bcsv.push('\n');
        let snrs: Vec<f64> = c.mean_snr_db.iter().map(|db| 10f64.powf(db / 10.0)).collect();
        for i in 0..c.boundary_points {
            let a1 = i as f64 / (c.boundary_points - 1).max(1) as f64;
            let caps = outage_capacity(&c.eps, &snrs, 1.0, &[a1, 1.0 - a1])?;
            bcsv.push_str(&row(&[sig9(a1), sig9(caps[0]), sig9(caps[1])]));
            bcsv.push('\n');
        }
        let bpath = out.join("outage_region_boundary.csv");
        write_file(&bpath, &bcsv)?;
        files.push(bpath);
    }

    let meta = write_metadata(
        out,
        "outage_region",
        seed,
        threads,
        &echo(c)?,
        json!({}),
        started,
        &files,
    )?;
    files.push(meta);
    Ok(RunOutcome { files })
}

fn alpha_sweep(
    c: &AlphaSweepConfig,
    seed: u64,
    out: &Path,
    threads: usize,
    product_distance: bool,
) -> anyhow::Result<RunOutcome> {
    let started = Instant::now();
    let base = parse_lattice(&c.lattice)?;
    let (m1, m2) = (c.m[0], c.m[1]);
    let dp_lambda = if product_distance {
        match base.kind {
            LatticeKind::CyclotomicIdeal(_) => base.min_product_distance_closed()?,
            _ => bail!("product-distance sweeps need a cyclotomic base lattice"),
        }
    } else {
        1.0
    };

    let name = if product_distance { "product_distance" } else { "min_det" };
    let cols: &[&str] = if product_distance {
        &["alpha", "exact_dpmin", "bound_dpmin", "exact_demin", "diversity_violation"]
    } else {
        &["alpha", "min_det_analytic", "min_det_exhaustive", "exact_demin"]
    };
    let csv_path = out.join(format!("{name}.csv"));
    let mut ckpt = Checkpoint::open(&csv_path, name, seed, &echo(c)?)?;
    if ckpt.completed() > 0 {
        println!("{name}: resuming with {} grid points already done", ckpt.completed());
    }

    let mut rows = Vec::with_capacity(c.alpha_points);
    for i in 0..c.alpha_points {
        if let Some(done) = ckpt.get(i) {
            rows.push(done);
            continue;
        }
        let alpha = c.alpha_min
            + (c.alpha_max - c.alpha_min) * i as f64 / (c.alpha_points - 1) as f64;
        let scheme = SchemeSpec::new(
            base.clone(),
            vec![m1, m2],
            CombinationRule::AlphaWeighted(alpha),
        )?;
        let composite = scheme.build()?;
        let line = if product_distance {
            let scan = pair_scan(&composite)?;
            let bound = dpmin_upper_bound(alpha, m1, m2, base.n, dp_lambda)?;
            row(&[
                sig9(alpha),
                sig9(scan.dp_min),
                sig9(bound),
                sig9(scan.de_min),
                (scan.diversity_violation as u8).to_string(),
            ])
        } else {
            let analytic = demin_analytic(alpha, m1, m2)?.powi(4);
            let exhaustive = min_determinant_exhaustive(&composite, 2)?;
            let de = pair_scan(&composite)?.de_min;
            row(&[sig9(alpha), sig9(analytic), sig9(exhaustive), sig9(de)])
        };
        ckpt.record(i, line.clone())?;
        rows.push(line);
    }

    let mut csv = header(cols);
    csv.push('\n');
    for r in rows {
        csv.push_str(&r);
        csv.push('\n');
    }
    write_file(&csv_path, &csv)?;
    ckpt.finish()?;

    let mut files = vec![csv_path];
    let meta = write_metadata(out, name, seed, threads, &echo(c)?, json!({}), started, &files)?;
    files.push(meta);
    println!("{name}: {} grid points written", c.alpha_points);
    Ok(RunOutcome { files })
}

fn ser(c: &SerConfig, seed: u64, out: &Path, threads: usize) -> anyhow::Result<RunOutcome> {
    let started = Instant::now();
    let base = parse_lattice(&c.lattice)?;
    let rule = match c.alpha {
        Some(a) => CombinationRule::AlphaWeighted(a),
        None => CombinationRule::LatticePartitionAlpha,
    };
    let mode = parse_mode(&c.mode)?;
    let scheme = SchemeSpec::new(base, c.m.clone(), rule)?;
    let composite = scheme.build()?;

    let csv_path = out.join("ser.csv");
    let mut ckpt = Checkpoint::open(&csv_path, "ser", seed, &echo(c)?)?;
    if ckpt.completed() > 0 {
        println!("ser: resuming with {} grid points already done", ckpt.completed());
    }
    // One checkpoint unit per SNR grid point; each row carries both users.
    let mut rows = Vec::with_capacity(c.snr_db_grid.len());
    let mut per_user = vec![Vec::new(); 2];
    for (i, &snr_db) in c.snr_db_grid.iter().enumerate() {
        let line = if let Some(done) = ckpt.get(i) {
            done
        } else {
            let rep = ser_mc(&composite, &[snr_db], mode, c.trials, seed)?;
            let line = row(&[
                sig9(snr_db),
                sig9(rep.per_user[0][0]),
                rep.errors[0][0].to_string(),
                sig9(rep.per_user[1][0]),
                rep.errors[1][0].to_string(),
                c.trials.to_string(),
            ]);
            ckpt.record(i, line.clone())?;
            println!("ser: {snr_db} dB done");
            line
        };
        // Parse the SER fields back for the slope summary.
        let fields: Vec<&str> = line.split(',').collect();
        per_user[0].push(fields[1].parse::<f64>().unwrap_or(0.0));
        per_user[1].push(fields[3].parse::<f64>().unwrap_or(0.0));
        rows.push(line);
    }

    let mut csv = header(&["snr_db", "ser_user1", "errors_user1", "ser_user2", "errors_user2", "trials"]);
    csv.push('\n');
    for r in rows {
        csv.push_str(&r);
        csv.push('\n');
    }
    write_file(&csv_path, &csv)?;
    ckpt.finish()?;

    let slopes: Vec<Option<f64>> = (0..2)
        .map(|k| diversity_slope(&c.snr_db_grid, &per_user[k]).ok())
        .collect();
    let mut files = vec![csv_path];
    let meta = write_metadata(
        out,
        "ser",
        seed,
        threads,
        &echo(c)?,
        json!({ "diversity_slopes": slopes }),
        started,
        &files,
    )?;
    files.push(meta);
    Ok(RunOutcome { files })
}

fn psi_of(name: &str) -> anyhow::Result<f64> {
    if name == "opt" {
        return Ok(1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::E));
    }
    let lat = parse_lattice(name)?;
    Ok(lat.nsm())
}

fn gap_bounds(
    c: &GapBoundsConfig,
    seed: u64,
    out: &Path,
    threads: usize,
) -> anyhow::Result<RunOutcome> {
    let started = Instant::now();
    let mut csv = header(&["lattice", "psi", "user", "eps", "delta_bits"]);
    csv.push('\n');
    for name in &c.lattices {
        let psi = psi_of(name)?;
        let bound = match c.regime.as_str() {
            "full_csi" => gap_bound_ch5(psi, c.users)?,
            "outage" => gap_bound_ch6(psi, &c.eps)?,
            other => bail!("unknown regime '{other}'"),
        };
        for (user, delta) in bound.per_user.iter().enumerate() {
            let eps = if c.regime == "outage" {
                sig9(c.eps[user])
            } else {
                String::new()
            };
            csv.push_str(&row(&[
                name.clone(),
                sig9(psi),
                user.to_string(),
                eps,
                sig9(*delta),
            ]));
            csv.push('\n');
        }
    }
    let csv_path = out.join("gap_bounds.csv");
    write_file(&csv_path, &csv)?;
    let mut files = vec![csv_path];
    let meta =
        write_metadata(out, "gap_bounds", seed, threads, &echo(c)?, json!({}), started, &files)?;
    files.push(meta);
    Ok(RunOutcome { files })
}
