// Morlet scalogram of the full signal, printed as a coarse text map
// (rows: scale, columns: translation). Fractional revivals show up as
// isolated patches whose spacing shrinks as the scale decreases.
//
// `cargo run --release --example scalogram`

use revival_cwt::cwt::{cwt_fast, harmonic_scale_range, log_scales, tau_subgrid, MorletParams};
use revival_cwt::wavepacket::{default_time_step, WavePacketModel};

const COLUMNS: usize = 84;
const SHADES: &[u8] = b" .:-=+*#%@";

pub fn run_example() -> revival_cwt::Result<()> {
    let model = WavePacketModel::rydberg_circular();
    let ts = model.time_scales()?;
    let params = MorletParams::default();
    let dt = default_time_step(&ts, 6);
    let f = model.autocorrelation_power(0.0, dt, (1.05 * ts.revival / dt) as usize + 1)?;

    let (lo, hi) = harmonic_scale_range(&ts, 6, &params)?;
    let scales = log_scales(lo, hi, 8)?;
    let grid = cwt_fast(&f, &scales, &tau_subgrid(&f, 4), &params)?;

    let per_col = grid.taus().len().div_ceil(COLUMNS);
    println!("   scale/1e8  0{:>w$}", "T_rev", w = COLUMNS - 6);
    for (si, row) in grid.energy().iter().enumerate().rev() {
        let top = row.iter().copied().fold(0.0, f64::max);
        let line: String = row
            .chunks(per_col)
            .enumerate()
            .map(|(c, chunk)| {
                if grid.in_cone(si, c * per_col)
                    || grid.in_cone(si, (c * per_col + chunk.len() - 1).min(row.len() - 1))
                {
                    return ' ';
                }
                let v = chunk.iter().copied().fold(0.0, f64::max) / top;
                SHADES[((v * (SHADES.len() - 1) as f64).round() as usize).min(SHADES.len() - 1)]
                    as char
            })
            .collect();
        println!("   {:>8.3}  {line}", grid.scales()[si] / 1e8);
    }
    println!("(each row normalized to its own maximum; blank = cone of influence)");
    Ok(())
}

#[allow(dead_code)]
fn main() -> revival_cwt::Result<()> {
    run_example()
}
