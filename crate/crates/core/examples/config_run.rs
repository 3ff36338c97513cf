// Runs the full configuration-driven pipeline and lists the artifacts.
//
// `cargo run --release --example config_run -- [config.toml] [out_dir]`
//
// Without arguments the bundled short-lived configuration is used and
// output goes to a temporary directory.

use std::path::{Path, PathBuf};

use revival_cwt::pipeline::{run_stage, RunConfig, Stage};

fn bundled_config() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/short_lived.toml")
}

pub fn run_example() -> revival_cwt::Result<()> {
    let out = std::env::temp_dir().join(format!("revival-cwt-example-{}", std::process::id()));
    let result = run_with(&bundled_config(), &out);
    let _ = std::fs::remove_dir_all(&out);
    result
}

pub fn run_with(config: &Path, out: &Path) -> revival_cwt::Result<()> {
    let cfg = RunConfig::from_path(config)?;
    for file in run_stage(Stage::All, &cfg, out)? {
        let size = std::fs::metadata(&file)?.len();
        println!("{:>10} bytes  {}", size, file.display());
    }
    let report = std::fs::read_to_string(out.join("estimate.txt"))?;
    for line in report
        .lines()
        .filter(|l| l.starts_with("# t_rev") || l.starts_with("# relative"))
    {
        println!("{line}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> revival_cwt::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(bundled_config);
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("revival-cwt-example"));
    run_with(&config, &out)
}
