use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use revival_cwt::pipeline::{parse_echo, RunConfig, OUTPUT_DIR_ENV};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_revival-cwt"));
    c.env_remove(OUTPUT_DIR_ENV);
    c
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str], cfg: &Path, out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect()
}

fn header_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .find_map(|l| {
            l.strip_prefix(key)?
                .trim_start()
                .strip_prefix('=')
                .map(str::trim)
        })
}

#[test]
fn simulate_two_samples() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[grid]\nn_samples = 2\n");
    let out = run(&["simulate"], &cfg, &tmp.path().join("o"));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(tmp.path().join("o/timeseries.csv")).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 2);
    let (t, v) = rows[0].split_once(',').unwrap();
    assert_eq!(t.parse::<f64>().unwrap(), 0.0);
    assert!((v.parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn all_is_deterministic_and_echo_round_trips() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[grid]\nt_max_rev = 0.6\n[slices]\nscales = [1.2e8]\n",
    );
    let names = [
        "timeseries.csv",
        "spectrum.csv",
        "bands.csv",
        "scalogram.csv",
        "scalogram.meta",
        "slice_p1.csv",
        "slice_p4.csv",
        "slice_s0.csv",
        "patches.csv",
        "estimate.txt",
    ];
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(run(&["all"], &cfg, &a).status.success());
    let out = run(&["all", "--threads", "2"], &cfg, &b);
    assert!(out.status.success());
    for n in names {
        let x = std::fs::read(a.join(n)).unwrap_or_else(|_| panic!("missing {n}"));
        let y = std::fs::read(b.join(n)).unwrap();
        assert!(x == y, "{n} differs between runs");
    }

    let original = RunConfig::from_path(&cfg).unwrap();
    let text = std::fs::read_to_string(a.join("scalogram.meta")).unwrap();
    assert_eq!(parse_echo(&text).unwrap(), original);
    let hash = header_value(&text, "config_sha256").unwrap();
    assert_eq!(hash.len(), 64);
    assert!(text.contains("display_scale: time = 1e10, frequency = 1e-8, scale = 1e8"));

    let sc = std::fs::read_to_string(a.join("scalogram.csv")).unwrap();
    let n: usize = header_value(&sc, "n_scales").unwrap().parse().unwrap();
    let m: usize = header_value(&sc, "n_taus").unwrap().parse().unwrap();
    assert_eq!(data_rows(&sc).len(), n * m);
    assert!(sc.lines().any(|l| l == "tau,scale,energy"));

    let patches = std::fs::read_to_string(a.join("patches.csv")).unwrap();
    assert!(patches
        .lines()
        .any(|l| l == "p,k,tau,frequency,scale,energy,source"));
    assert!(data_rows(&patches)
        .iter()
        .any(|l| l.ends_with(",predicted")));
    assert!(data_rows(&patches).iter().any(|l| l.ends_with(",detected")));
}

#[test]
fn short_lived_estimate_report() {
    let tmp = TempDir::new().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/short_lived.toml");
    let out = run(&["estimate"], &cfg, tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(tmp.path().join("estimate.txt")).unwrap();
    let t: f64 = header_value(&text, "t_rev_hat").unwrap().parse().unwrap();
    assert!((t / 4.3923e10 - 1.0).abs() < 0.02, "t_rev_hat = {t:e}");
}

#[test]
fn config_errors_exit_2_with_line() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[model]\nn_mean = 320\n\n[grid]\nn_samples = 10\nt_max = 1e9\n",
    );
    let out = run(&["simulate"], &cfg, tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 6"), "{err}");

    let cfg = write_config(tmp.path(), "[wavelet]\nomega0 = 6.0\n");
    let out = run(&["simulate", "--omega0", "2"], &cfg, tmp.path());
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["simulate"], &tmp.path().join("missing.toml"), tmp.path());
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["frobnicate", "--config", "x"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let tmp = TempDir::new().unwrap();
    // too short for a spectrum
    let cfg = write_config(tmp.path(), "[grid]\nn_samples = 8\n");
    let out = run(&["spectrum"], &cfg, tmp.path());
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn impossible_estimate_exits_4_and_says_why() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[grid]\nt_max_rev = 0.06\n");
    let out = run(&["estimate"], &cfg, tmp.path());
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(tmp.path().join("estimate.txt")).unwrap();
    assert_eq!(header_value(&text, "status"), Some("impossible"));
}

#[test]
fn env_var_sets_default_output_dir_only() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[grid]\nn_samples = 4\n");
    let env_dir = tmp.path().join("from-env");
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .env(OUTPUT_DIR_ENV, &env_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(env_dir.join("timeseries.csv").exists());

    let cli_dir = tmp.path().join("from-cli");
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&cli_dir)
        .env(OUTPUT_DIR_ENV, &env_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(cli_dir.join("timeseries.csv").exists());
}

#[test]
fn overrides_show_in_echo() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[grid]\nn_samples = 4\n");
    let out = run(
        &[
            "simulate",
            "--p-max",
            "4",
            "--lifetime",
            "1e9",
            "--omega0",
            "6.5",
        ],
        &cfg,
        tmp.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(tmp.path().join("timeseries.csv")).unwrap();
    let echoed = parse_echo(&text).unwrap();
    assert_eq!(echoed.p_max(), 4);
    assert_eq!(echoed.decay.lifetime, Some(1e9));
    assert_eq!(echoed.wavelet.omega0, 6.5);
}
