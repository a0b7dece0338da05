use std::process::Command;

use fran_cli::sweep::manifest_path;
use fran_cli::{parse_config, presets, run_sweep, Axis, CliError, CSV_HEADER};
use fran_core::Strategy;

fn ov(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[test]
fn fig3_preset_carries_the_caption_parameters() {
    let spec = presets::load("fig3", &[]).unwrap();
    let b = &spec.base;
    assert_eq!(
        (
            b.library_size,
            b.subfiles,
            b.pairs,
            b.tx_antennas,
            b.rx_antennas
        ),
        (60, 50, 4, 1, 1)
    );
    assert_eq!(
        (b.fronthaul_capacity, b.snr_db, b.connectivity),
        (2.0, 20.0, 2)
    );
    assert_eq!((b.zipf_exponent, b.path_loss, b.file_bits), (0.2, 0.7, 8e8));
    assert_eq!(spec.axis, Axis::CacheFraction);
    let expected = vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
    assert_eq!(spec.values, expected);
    assert_eq!(spec.strategies, Strategy::ALL.to_vec());
    assert_eq!(spec.n_trials, 200);
}

#[test]
fn other_presets_match_their_captions() {
    let fig4 = presets::load("fig4", &[]).unwrap();
    assert_eq!(
        (
            fig4.base.library_size,
            fig4.base.subfiles,
            fig4.base.cache_fraction
        ),
        (50, 20, 0.3)
    );
    assert_eq!(fig4.axis, Axis::Connectivity);
    assert_eq!(fig4.capacity_curves, vec![0.5, 1.0, 2.0]);

    let fig5 = presets::load("fig5", &[]).unwrap();
    assert_eq!(
        (
            fig5.base.tx_antennas,
            fig5.base.rx_antennas,
            fig5.base.connectivity
        ),
        (2, 2, 1)
    );
    assert_eq!(
        (fig5.base.fronthaul_capacity, fig5.base.library_size),
        (0.5, 60)
    );
    assert_eq!(fig5.axis, Axis::Subfiles);
    assert!(!fig5.notes.is_empty());

    let fig6 = presets::load("fig6", &[]).unwrap();
    assert_eq!(
        (
            fig6.base.subfiles,
            fig6.base.fronthaul_capacity,
            fig6.base.connectivity
        ),
        (60, 1.0, 2)
    );
    assert_eq!(fig6.base.cache_fraction, 1.0 / 3.0);
    assert_eq!(fig6.base.cached_per_file(), 20);
    assert_eq!(fig6.axis, Axis::SnrDb);

    assert!(presets::load("fig7", &[]).is_err());
}

#[test]
fn flag_override_changes_only_that_key() {
    let plain = presets::load("fig3", &[]).unwrap();
    let over = presets::load("fig3", &ov(&[("M", "3")])).unwrap();
    let mut expected = plain.clone();
    expected.base.connectivity = 3;
    assert_eq!(over, expected);
}

#[test]
fn out_of_range_mu_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    std::fs::write(&path, "N = 4\nmu = 1.5\n").unwrap();
    let err = parse_config(&path, &[]).unwrap_err();
    assert!(err.to_string().contains("\"mu\""), "{err}");
    assert_eq!(err.exit_code(), 2);

    let err = parse_config(&dir.path().join("missing.conf"), &[]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

fn small_fig3(out: &std::path::Path) -> fran_cli::SweepSpec {
    presets::load(
        "fig3",
        &ov(&[
            ("trials", "8"),
            ("out", out.to_str().unwrap()),
            ("L", "10"),
            ("F", "12"),
        ]),
    )
    .unwrap()
}

#[test]
fn sweep_writes_one_row_per_point_and_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig3.csv");
    let spec = small_fig3(&out);
    let result = run_sweep(&spec).unwrap();
    assert_eq!(result.rows.len(), 33);

    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 34);
    assert_eq!(lines[0], CSV_HEADER.join(","));
    assert!(lines[1].starts_with("unicast,mu,0,4,12,10,800000000,0,2,2,20,0.2,0.7,1,1,1,8,1,"));
    assert!(lines[33].starts_with("coded,mu,1,"));
    for l in &lines[1..] {
        assert_eq!(l.split(',').count(), CSV_HEADER.len());
    }

    let manifest = std::fs::read_to_string(manifest_path(&out)).unwrap();
    assert!(manifest.starts_with("version = fran-cli "));
    assert!(manifest.contains("\nseed = 1\n"));
    assert!(manifest.contains("\ntrials = 8\n"));
    assert!(manifest.contains("\nrows = 33\n"));
}

#[test]
fn identical_specs_give_byte_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    run_sweep(&small_fig3(&a)).unwrap();
    run_sweep(&small_fig3(&b)).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn unwritable_output_fails_before_computing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("no/such/dir/out.csv");
    let spec = presets::load(
        "fig3",
        // A million trials would take hours if computation started.
        &ov(&[("trials", "1000000"), ("out", out.to_str().unwrap())]),
    )
    .unwrap();
    let err = run_sweep(&spec).unwrap_err();
    assert!(matches!(err, CliError::Io { .. }));
    assert_eq!(err.exit_code(), 3);
}

fn simulate() -> Command {
    Command::new(env!("CARGO_BIN_EXE_simulate"))
}

#[test]
fn binary_exit_codes_and_banner() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let ok = simulate()
        .args([
            "--preset", "fig3", "--trials", "3", "--values", "0,1", "--L", "5", "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    let banner = String::from_utf8_lossy(&ok.stderr);
    assert!(banner.contains("nS = auto  (default)"), "{banner}");
    assert!(banner.contains("L = 5\n"));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 7);

    let bad = simulate()
        .args(["--preset", "fig3", "--mu", "1.5"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("\"mu\""));

    let none = simulate().output().unwrap();
    assert_eq!(none.status.code(), Some(2));

    let io = simulate()
        .args(["--preset", "fig3", "--trials", "2", "--out"])
        .arg(dir.path().join("missing/x.csv"))
        .output()
        .unwrap();
    assert_eq!(io.status.code(), Some(3));

    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        format!(
            "N = 2\nM = 2\nF = 5\nL = 4\naxis = C\nvalues = 0, 1\ntrials = 2\nstrategies = coded\nout = {}\n",
            dir.path().join("c.csv").display()
        ),
    )
    .unwrap();
    let from_file = simulate().arg("--config").arg(&conf).output().unwrap();
    assert_eq!(
        from_file.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&from_file.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().nth(1).unwrap().starts_with("coded,C,0,"));
}

#[test]
fn stall_threshold_maps_to_exit_code_four() {
    let err = CliError::Stalled {
        stalled: 11,
        trials: 200,
    };
    assert_eq!(err.exit_code(), 4);
    let out = fran_cli::SweepOutput {
        rows: Vec::new(),
        solver_runs: 200,
        stalled_runs: 11,
    };
    assert!(matches!(out.check_stalls(), Err(CliError::Stalled { .. })));
    let fine = fran_cli::SweepOutput {
        stalled_runs: 10,
        ..out
    };
    assert!(fine.check_stalls().is_ok());
}
