// Synthesizes the autocorrelation power of the circular Rydberg packet and
// shows the classical recurrences decaying into collapse.
//
// `cargo run --example simulate_signal`

use revival_cwt::wavepacket::{default_time_step, WavePacketModel};

pub fn run_example() -> revival_cwt::Result<()> {
    let model = WavePacketModel::rydberg_circular();
    let ts = model.time_scales()?;
    println!("T_cl  = {:.6e} a.u.", ts.classical);
    println!(
        "T_rev = {:.6e} a.u.  (T_rev / T_cl = {:.2})",
        ts.revival,
        ts.revival / ts.classical
    );

    let dt = default_time_step(&ts, 6);
    let n = (12.0 * ts.classical / dt) as usize + 1;
    let f = model.autocorrelation_power(0.0, dt, n)?;
    println!("f(0) = {:.12}", f.samples()[0]);

    // one maximum per classical period, shrinking as the packet spreads
    for r in 1..=10 {
        let c = r as f64 * ts.classical;
        let (_, t, v) = f
            .argmax_in(c - 0.5 * ts.classical, c + 0.5 * ts.classical)
            .unwrap();
        println!(
            "  recurrence {r:2}: t/T_cl = {:.3}  f = {v:.4}",
            t / ts.classical
        );
    }

    let full = model.autocorrelation_power(0.0, dt, (1.05 * ts.revival / dt) as usize + 1)?;
    let (_, t, v) = full.argmax_in(0.9 * ts.revival, 1.05 * ts.revival).unwrap();
    println!(
        "largest value near T_rev: f = {v:.4} at t/T_rev = {:.4}",
        t / ts.revival
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> revival_cwt::Result<()> {
    run_example()
}
