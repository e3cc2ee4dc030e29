//! Induced fields of a sinusoidal solenoid and its flux-tube dual, with
//! the loop law checked on a few circles.

use std::f64::consts::PI;

use tdab::fields::{duality_map, field_at, flux, FluxProfile, SourceConfig, SourceKind};
use tdab::algebra::{Dipole, SpinLabel};

fn circulation(cfg: &SourceConfig, r: f64, t: f64) -> f64 {
    let n = 256;
    (0..n)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / n as f64;
            let f = field_at(cfg, r * th.cos(), r * th.sin(), t).unwrap();
            let v = match cfg.kind {
                SourceKind::MagneticSolenoid => f.e,
                SourceKind::ElectricFluxTube => f.b,
            };
            r * (-th.sin() * v[0] + th.cos() * v[1]) * 2.0 * PI / n as f64
        })
        .sum()
}

fn main() {
    let solenoid = SourceConfig::new(SourceKind::MagneticSolenoid, 1.0, FluxProfile::sinusoidal(1.0, 1.0).unwrap()).unwrap();
    let mu = Dipole::magnetic(0.1, SpinLabel::Up, 1.0).unwrap();
    let (tube, _) = duality_map(&solenoid, &mu);
    let t = 0.4;

    println!("{:>6} {:>12} {:>12} {:>12}", "r", "E_phi", "B_z", "tube B_phi");
    for r in [0.25, 0.5, 1.0, 1.5, 3.0, 6.0] {
        let f = field_at(&solenoid, r, 0.0, t).unwrap();
        let g = field_at(&tube, r, 0.0, t).unwrap();
        println!("{r:>6.2} {:>12.5e} {:>12.5e} {:>12.5e}", f.e[1], f.b[2], g.b[1]);
    }

    let (_, rate) = flux(&solenoid.profile, solenoid.radius, t).unwrap();
    for r in [1.5, 4.0] {
        println!(
            "r = {r}: solenoid loop {:+.10} vs -dPhi/dt {:+.10}; tube loop {:+.10}",
            circulation(&solenoid, r, t),
            -rate,
            circulation(&tube, r, t),
        );
    }
}
