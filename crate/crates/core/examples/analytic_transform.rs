// Closed-form transform of the model signal against the numerical
// transform at the predicted patch centers.
//
// `cargo run --release --example analytic_transform`

use revival_cwt::cwt::{cwt_fast, MorletParams};
use revival_cwt::revival::{analytic_cwt_levels, predicted_patch_grid};
use revival_cwt::wavepacket::{default_time_step, WavePacketModel};

pub fn run_example() -> revival_cwt::Result<()> {
    let model = WavePacketModel::rydberg_circular();
    let levels = model.levels()?;
    let ts = model.time_scales()?;
    let params = MorletParams::default();
    let dt = default_time_step(&ts, 6);
    let f = model.autocorrelation_power(0.0, dt, (1.05 * ts.revival / dt) as usize + 1)?;

    println!("  p  k   |T| closed form   |T| numerical   rel. diff");
    for patch in predicted_patch_grid(&ts, 4, 0.9 * ts.revival, &params)? {
        if patch.tau < 4.0 * patch.scale {
            continue;
        }
        // nearest sample time, so the fast route can evaluate it
        let tau = (patch.tau / dt).round() * dt;
        let a = analytic_cwt_levels(tau, patch.scale, &levels, &params)?;
        let n = cwt_fast(&f, &[patch.scale], &[tau], &params)?.values()[0][0];
        println!(
            "  {}  {}   {:>15.6e}   {:>13.6e}   {:>9.2e}",
            patch.p.unwrap(),
            patch.k.unwrap(),
            a.norm(),
            n.norm(),
            (a - n).norm() / a.norm()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> revival_cwt::Result<()> {
    run_example()
}
