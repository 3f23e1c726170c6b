use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use delay_apt::cli::{parse_config, ConfigError, Mode, Source};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_delay-apt"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn markovian_eigen_run_has_two_rows_and_echo() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["--mode", "eigen", "--set", "tau=0", "--set", "kappa=1.5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("eigenvalues.csv")).unwrap();
    let r = rows(&text);
    assert_eq!(r[0], "u,v,residual");
    assert_eq!(r.len(), 3);
    let us: Vec<f64> = r[1..].iter().map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!((us[0] - 1.5).abs() < 1e-12 && (us[1] + 1.5).abs() < 1e-12);
    assert!(text.contains("# mode=eigen\n"));
    assert!(text.contains("# kappa=1.5\n"));
    assert!(text.contains("# fig3_kappas=0.4,2\n"));
}

#[test]
fn config_file_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "# comment\nkappa=1\nwobble=3\n").unwrap();
    let out = run(dir.path(), &["--mode", "dome", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    let line = err.lines().last().unwrap();
    assert!(line.starts_with("error kind=config code=2 message="), "{line}");
    assert!(line.contains("line 3"), "{line}");

    let out = run(dir.path(), &["--mode", "eigen", "--set", "kappa=-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    // The root +κ sits on the right edge of the window.
    let out = run(
        dir.path(),
        &["--mode", "eigen", "--set", "tau=0", "--set", "kappa=1", "--set", "u_max=1"],
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.lines().last().unwrap().starts_with("error kind=numerical code=3"));
}

#[test]
fn sweeps_are_byte_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "--mode", "sweep-lk", "--seed", "17", "--workers", "2",
        "--set", "kappa=1", "--set", "tau=0.5", "--set", "h=1e-3",
        "--set", "transient=5", "--set", "retained=2",
        "--set", "dw_min=0", "--set", "dw_max=6", "--set", "dw_step=0.5",
    ];
    assert!(run(a.path(), &args).status.success());
    assert!(run(b.path(), &args).status.success());
    let pa = fs::read_to_string(a.path().join("profile.csv")).unwrap();
    let pb = fs::read_to_string(b.path().join("profile.csv")).unwrap();
    // The echoed output directory is the only difference.
    let strip = |s: &str| s.lines().filter(|l| !l.starts_with("# out=")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&pa), strip(&pb));
    assert_eq!(rows(&pa)[0], "delta_omega,I1,I2,I1_norm,I2_norm,converged");
    assert_eq!(rows(&pa).len(), 14);
}

#[test]
fn transition_table_and_spacing_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["--mode", "sweep-eigen", "--set", "kappa=2", "--set", "tau=1", "--set", "dw_max=14", "--set", "dw_step=0.1"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(dir.path().join("sign_changes.csv")).unwrap();
    let decaying: Vec<Vec<&str>> = rows(&table)[1..]
        .iter()
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|c| c[1] == "-1")
        .collect();
    assert_eq!(decaying.len(), 4);
    for c in decaying {
        assert!(c[4].parse::<f64>().unwrap() < 1e-3 * 2.0);
    }
    let theory = fs::read_to_string(dir.path().join("sow_theory.csv")).unwrap();
    assert!(theory.contains("# closed_form_factor_two_mismatch=true"));
}

#[test]
fn provenance_distinguishes_sources() {
    let c = parse_config("tau=2\n", Some("fig3"), &["kappa=0.5".into()], &[("seed", "4".into())]).unwrap();
    assert_eq!(c.source("tau"), Some(&Source::File(1)));
    assert_eq!(c.source("kappa"), Some(&Source::Set));
    assert_eq!(c.source("seed"), Some(&Source::Flag));
    assert_eq!(c.source("window"), Some(&Source::ModeDefault));
    assert_eq!(c.source("alpha"), Some(&Source::Default));
    assert_eq!(c.mode, Mode::Fig3);
    assert!(matches!(
        parse_config("mode=simulate\nmode=bogus\n", None, &[], &[]),
        Err(ConfigError::BadValue { .. }) | Err(ConfigError::Parse { .. })
    ));
}
