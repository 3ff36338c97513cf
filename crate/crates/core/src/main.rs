use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use revival_cwt::pipeline::{
    resolve_output_dir, run_stage, Overrides, RunConfig, Stage, OUTPUT_DIR_ENV,
};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Subcommand {
    Simulate,
    Spectrum,
    Scalogram,
    Slices,
    Detect,
    Estimate,
    All,
}

impl From<Subcommand> for Stage {
    fn from(s: Subcommand) -> Self {
        match s {
            Subcommand::Simulate => Stage::Simulate,
            Subcommand::Spectrum => Stage::Spectrum,
            Subcommand::Scalogram => Stage::Scalogram,
            Subcommand::Slices => Stage::Slices,
            Subcommand::Detect => Stage::Detect,
            Subcommand::Estimate => Stage::Estimate,
            Subcommand::All => Stage::All,
        }
    }
}

/// Wavelet analysis of wave-packet revivals.
///
/// Exit status: 0 success, 2 config error, 3 numerical failure,
/// 4 revival time not estimable.
#[derive(Debug, Parser)]
#[command(name = "revival-cwt", version)]
#[command(after_help = format!("Output directory: --out, else [output] dir in the config, else ${OUTPUT_DIR_ENV}."))]
struct Cli {
    #[arg(value_enum)]
    subcommand: Subcommand,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    omega0: Option<f64>,
    /// Decay lifetime in atomic units of time.
    #[arg(long)]
    lifetime: Option<f64>,
    #[arg(long = "p-max")]
    p_max: Option<u32>,
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = RunConfig::from_path(&cli.config).and_then(|mut cfg| {
        Overrides {
            omega0: cli.omega0,
            lifetime: cli.lifetime,
            p_max: cli.p_max,
            threads: cli.threads,
        }
        .apply(&mut cfg)?;
        let out = resolve_output_dir(cli.out.as_deref(), &cfg);
        run_stage(cli.subcommand.into(), &cfg, &out)
    });
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("revival-cwt: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
