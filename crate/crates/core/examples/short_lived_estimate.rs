// A packet that decays with lifetime `0.15 T_rev` and is only observed up
// to `0.4 T_rev` never shows a revival in `|A(t)|^2`, yet the early
// fractional-revival patches are enough to recover `T_rev`.
//
// `cargo run --release --example short_lived_estimate`

use revival_cwt::cwt::{cwt_fast, harmonic_scale_range, log_scales, tau_subgrid, MorletParams};
use revival_cwt::revival::{detect_patches, estimate_revival_time, DetectOptions, EstimateOptions};
use revival_cwt::wavepacket::{apply_decay, default_time_step, WavePacketModel};

pub fn run_example() -> revival_cwt::Result<()> {
    let model = WavePacketModel::rydberg_circular();
    let ts = model.time_scales()?;
    let params = MorletParams::default();
    let p_max = 6;
    let dt = default_time_step(&ts, p_max);
    let n = (0.4 * ts.revival / dt) as usize + 1;
    let f = apply_decay(&model.autocorrelation_power(0.0, dt, n)?, 0.15 * ts.revival)?;

    let late = f.argmax_in(0.2 * ts.revival, f.end()).unwrap().2;
    println!("largest f(t) after 0.2 T_rev: {late:.2e} (f(0) = 1)");

    let (lo, hi) = harmonic_scale_range(&ts, p_max, &params)?;
    let taus = tau_subgrid(&f, 4);
    let grid = cwt_fast(&f, &log_scales(lo, hi, 8)?, &taus, &params)?;
    let detect = DetectOptions {
        rel_threshold: 0.05,
        ..DetectOptions::for_time_scales(&ts, p_max)
    };
    let found = detect_patches(&grid, &detect)?;
    let opts = EstimateOptions {
        p_max,
        tau_resolution: taus[1] - taus[0],
        ..Default::default()
    };
    let est = estimate_revival_time(&found, &opts)?;

    println!("  p   f*T_cl   patches   row T_rev/1e10   used");
    for r in &est.rows {
        println!(
            "  {}   {:>6.3}   {:>7}   {:>14.4}   {}",
            r.p,
            r.frequency * ts.classical,
            r.taus.len(),
            r.revival / 1e10,
            if r.accepted { "yes" } else { "no" }
        );
    }
    println!(
        "T_rev estimate {:.4e} +- {:.1e}  (model {:.4e}, error {:+.2}%)",
        est.revival,
        est.std_error,
        ts.revival,
        100.0 * (est.revival / ts.revival - 1.0)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> revival_cwt::Result<()> {
    run_example()
}
