//! Two-arm interference with a tuned moment. Pass the target phase as the
//! first argument (default 0.5 rad). Takes about a minute.

use tdab::experiments::{InterferenceOptions, InterferenceSetup};

fn main() -> tdab::Result<()> {
    let target: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.5);
    let setup = InterferenceSetup::sinusoidal(target)?;
    println!("moment {:.6}, arrival at t = {:.3}", setup.dipole.moment, setup.geometry.arrival_time(setup.dipole.mass));

    let res = setup.run(InterferenceOptions::default())?;
    println!("fringe shift {:+.6} rad", res.fringe_shift);
    println!("predicted    {:+.6} rad", res.predicted_delta);
    println!("contrast {:.3}, fringe wavenumber {:.3}", res.contrast, res.fringe_wavenumber);

    let peak = res.pattern.intensity.iter().cloned().fold(0.0, f64::max);
    for (u, i) in res.pattern.coords.iter().zip(&res.pattern.intensity).step_by(4) {
        if u.abs() < 4.0 {
            println!("{u:+6.2} {}", "#".repeat((60.0 * i / peak) as usize));
        }
    }
    Ok(())
}
