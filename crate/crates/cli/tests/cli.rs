//! Behavioural tests of the `latnoma` binary: validation, determinism,
//! checkpoint resume and row reproducibility.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_latnoma"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn validate_only_accepts_good_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    write(
        &cfg,
        "[gap_bounds]\nregime = \"full_csi\"\nlattices = [\"z2\", \"e8\"]\nusers = 2\n",
    );
    let out = bin()
        .args(["gap-bounds", "--validate-only", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("config ok"));
}

#[test]
fn invalid_configs_fail_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();

    // Out-of-regime outage probability.
    let cfg = dir.path().join("eps.toml");
    write(
        &cfg,
        "[outage_region]\nlattice = \"z2\"\nm = [4, 1]\nmean_snr_db = [30.0, 18.0]\n\
         eps = [0.7, 0.05]\nframes = 4\ntrials_per_frame = 10\n",
    );
    let out = bin()
        .args(["outage-region", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("out of regime"), "stderr: {err}");

    // Infeasible rate plan: m = (4, 1) needs 5 levels but 12 dB gives 2.
    let cfg = dir.path().join("plan.toml");
    write(
        &cfg,
        "[rate_region]\nlattice = \"z2\"\nm = [4, 1]\nsnr_db = [12.0, 3.0]\ntrials = 10\n",
    );
    let out = bin()
        .args(["rate-region", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));

    // TOML syntax errors carry a line position.
    let cfg = dir.path().join("syntax.toml");
    write(&cfg, "[rate_region\nlattice = 3\n");
    let out = bin()
        .args(["rate-region", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn missing_table_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    write(&cfg, "[gap_bounds]\nregime = \"full_csi\"\nlattices = [\"z2\"]\nusers = 2\n");
    let out = bin().args(["ser", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no [ser] table"));
}

#[test]
fn identical_seeds_give_byte_identical_csv_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    write(
        &cfg,
        "[ser]\nlattice = \"cyc5\"\nm = [1, 1]\nalpha = 0.2\n\
         snr_db_grid = [10.0, 15.0]\ntrials = 20000\n",
    );
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out_dir = dir.path().join(format!("out{threads}"));
        let st = bin()
            .args(["ser", "--seed", "9", "--threads", threads, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir)
            .status()
            .unwrap();
        assert!(st.success());
        outputs.push(std::fs::read(out_dir.join("ser.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "CSV bytes differ across thread counts");
}

#[test]
fn checkpoint_resume_skips_completed_grid_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    let cfg_text = "[product_distance]\nlattice = \"cyc5\"\nm = [1, 1]\nalpha_points = 5\n\
                    alpha_min = 0.0\nalpha_max = 0.5\n";
    write(&cfg, cfg_text);
    let out_dir = dir.path().join("out");
    std::fs::create_dir_all(&out_dir).unwrap();

    // Fabricate a partial file with one sentinel row for grid index 2.
    let table: toml::Value = toml::from_str(cfg_text).unwrap();
    let sub = toml::to_string(table.get("product_distance").unwrap()).unwrap();
    let header = serde_json::json!({
        "experiment": "product_distance", "seed": 5u64, "config": sub,
    });
    let sentinel = "SENTINEL,1,2,3,4";
    let partial = format!(
        "{}\n{}\n",
        header,
        serde_json::json!({"i": 2usize, "row": sentinel})
    );
    std::fs::write(out_dir.join("product_distance.partial.jsonl"), partial).unwrap();

    let st = bin()
        .args(["product-distance", "--seed", "5", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(st.success());
    let csv = std::fs::read_to_string(out_dir.join("product_distance.csv")).unwrap();
    let lines: Vec<&str> = csv.trim().lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[3], sentinel, "resume should reuse the recorded row");
    assert!(
        !out_dir.join("product_distance.partial.jsonl").exists(),
        "checkpoint should be removed after a completed sweep"
    );

    // A different seed invalidates the checkpoint: rerun recomputes row 2.
    std::fs::write(
        out_dir.join("product_distance.partial.jsonl"),
        format!(
            "{}\n{}\n",
            serde_json::json!({
                "experiment": "product_distance", "seed": 77u64, "config": sub,
            }),
            serde_json::json!({"i": 2usize, "row": sentinel})
        ),
    )
    .unwrap();
    let st = bin()
        .args(["product-distance", "--seed", "5", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(st.success());
    let csv = std::fs::read_to_string(out_dir.join("product_distance.csv")).unwrap();
    assert!(!csv.contains("SENTINEL"), "stale checkpoint must be discarded");
}

#[test]
fn gap_bound_rows_are_reproducible_from_their_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    write(
        &cfg,
        "[gap_bounds]\nregime = \"full_csi\"\nlattices = [\"d4\"]\nusers = 2\n",
    );
    let out_dir = dir.path().join("out");
    let st = bin()
        .args(["gap-bounds", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(st.success());
    let csv = std::fs::read_to_string(out_dir.join("gap_bounds.csv")).unwrap();
    for line in csv.trim().lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let psi: f64 = f[1].parse().unwrap();
        let user: usize = f[2].parse().unwrap();
        let bound = latnoma_core::metrics::gaps::gap_bound_ch5(psi, 2).unwrap();
        let expect = latnoma_core::csvfmt::sig9(bound.per_user[user]);
        assert_eq!(f[4], expect, "row not reproducible from its parameters");
    }
}
