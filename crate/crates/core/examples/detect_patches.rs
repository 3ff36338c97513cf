// Finds scalogram patches and compares them with the predicted lattice
// `(k T_rev / (2p), p / T_cl)`.
//
// `cargo run --release --example detect_patches`

use revival_cwt::cwt::{cwt_fast, harmonic_scale_range, log_scales, tau_subgrid, MorletParams};
use revival_cwt::revival::{detect_patches, predicted_patch_grid, DetectOptions};
use revival_cwt::wavepacket::{default_time_step, WavePacketModel};

pub fn run_example() -> revival_cwt::Result<()> {
    let model = WavePacketModel::rydberg_circular();
    let ts = model.time_scales()?;
    let params = MorletParams::default();
    let p_max = 6;
    let dt = default_time_step(&ts, p_max);
    let f = model.autocorrelation_power(0.0, dt, (1.05 * ts.revival / dt) as usize + 1)?;
    let (lo, hi) = harmonic_scale_range(&ts, p_max, &params)?;
    let grid = cwt_fast(&f, &log_scales(lo, hi, 8)?, &tau_subgrid(&f, 4), &params)?;

    let found = detect_patches(&grid, &DetectOptions::for_time_scales(&ts, p_max))?;
    let predicted = predicted_patch_grid(&ts, 4, f.end(), &params)?;
    println!(
        "{} detections, {} predicted patches with p <= 4",
        found.len(),
        predicted.len()
    );
    println!("   p  k   predicted t/T_rev   nearest detection   d(t)/T_rev");
    for pp in &predicted {
        let best = found
            .iter()
            .filter(|d| (d.frequency / pp.frequency - 1.0).abs() < 0.03)
            .min_by(|a, b| (a.tau - pp.tau).abs().total_cmp(&(b.tau - pp.tau).abs()))
            .filter(|d| (d.tau - pp.tau).abs() < 0.02 * ts.revival);
        match best {
            Some(d) => println!(
                "  {:>2} {:>2}   {:>17.4}   {:>17.4}   {:>+10.4}",
                pp.p.unwrap(),
                pp.k.unwrap(),
                pp.tau / ts.revival,
                d.tau / ts.revival,
                (d.tau - pp.tau) / ts.revival
            ),
            // at half and full revivals the lower harmonics dominate every
            // scale, so row p has no maximum of its own there
            None => println!(
                "  {:>2} {:>2}   {:>17.4}   (no separate maximum)",
                pp.p.unwrap(),
                pp.k.unwrap(),
                pp.tau / ts.revival
            ),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> revival_cwt::Result<()> {
    run_example()
}
