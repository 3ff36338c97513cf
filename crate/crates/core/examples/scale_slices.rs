// Energy along translation at the scales of the first four harmonics. Each
// slice peaks at `k T_rev / (2p)`.
//
// `cargo run --release --example scale_slices`

use revival_cwt::cwt::{
    cwt_fast, harmonic_scale_range, log_scales, scale_for_frequency, scale_slice, tau_subgrid,
    MorletParams,
};
use revival_cwt::wavepacket::{default_time_step, WavePacketModel};

pub fn run_example() -> revival_cwt::Result<()> {
    let model = WavePacketModel::rydberg_circular();
    let ts = model.time_scales()?;
    let params = MorletParams::default();
    let dt = default_time_step(&ts, 6);
    let f = model.autocorrelation_power(0.0, dt, (1.05 * ts.revival / dt) as usize + 1)?;
    let (lo, hi) = harmonic_scale_range(&ts, 6, &params)?;
    let grid = cwt_fast(&f, &log_scales(lo, hi, 8)?, &tau_subgrid(&f, 4), &params)?;

    for p in 1..=4u32 {
        let s = scale_for_frequency(ts.harmonic_frequency(p), &params)?;
        let sl = scale_slice(&grid, s)?;
        let (cone_lo, cone_hi) = grid.valid_tau_range(sl.scale_index);
        print!(
            "p = {p}: s = {:.3}e8 (grid {:.3}e8), maxima at t/T_rev:",
            s / 1e8,
            sl.scale / 1e8
        );
        let spacing = ts.lattice_spacing(p);
        let mut k = 1;
        while k as f64 * spacing <= cone_hi {
            let c = k as f64 * spacing;
            if c >= cone_lo {
                if let Some((_, t, _)) = sl.series.argmax_in(c - 0.3 * spacing, c + 0.3 * spacing) {
                    print!(" {:.3}", t / ts.revival);
                }
            }
            k += 1;
        }
        println!();
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> revival_cwt::Result<()> {
    run_example()
}
