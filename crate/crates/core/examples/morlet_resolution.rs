// Time and frequency spread of the Morlet wavelet across scales: the
// product stays at the Gaussian minimum 1/2.
//
// `cargo run --example morlet_resolution`

use revival_cwt::cwt::{morlet, rms_bandwidth, rms_duration, MorletParams};

pub fn run_example() -> revival_cwt::Result<()> {
    let p = MorletParams::default();
    println!("phi(0) = {:.10}", morlet(0.0, &p).re);
    println!("      s        dt          dw      dt*dw");
    for i in 0..10 {
        let s = 0.25 * 2f64.powf(i as f64 / 2.0);
        let (dt, dw) = (rms_duration(&p, s), rms_bandwidth(&p, s));
        println!("  {s:>6.3}  {dt:>9.5}  {dw:>9.5}  {:>8.6}", dt * dw);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> revival_cwt::Result<()> {
    run_example()
}
