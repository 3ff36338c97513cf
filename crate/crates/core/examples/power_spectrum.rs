// Fourier spectrum of the signal: bands sit at integer multiples of `1/T_cl`
// but the spectrum alone says nothing about when each harmonic is active.
//
// `cargo run --example power_spectrum`

use revival_cwt::spectral::{band_centers, power_spectrum, Taper};
use revival_cwt::wavepacket::{default_time_step, WavePacketModel};

pub fn run_example() -> revival_cwt::Result<()> {
    let model = WavePacketModel::rydberg_circular();
    let ts = model.time_scales()?;
    let dt = default_time_step(&ts, 6);
    let f = model.autocorrelation_power(0.0, dt, (1.05 * ts.revival / dt) as usize + 1)?;

    let sp = power_spectrum(&f, Taper::None)?;
    println!(
        "{} samples padded to {}, df = {:.3e}",
        f.len(),
        sp.transform_len,
        sp.df
    );
    println!("  band   f (1e-8 a.u.)   f * T_cl   power");
    for b in band_centers(&sp, 8, 0.05)? {
        let p = b.harmonic_index.map_or("-".into(), |p| p.to_string());
        println!(
            "  {p:>4}   {:>13.4}   {:>8.4}   {:.3}",
            b.frequency / 1e-8,
            b.frequency * ts.classical,
            b.power
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> revival_cwt::Result<()> {
    run_example()
}
