//! Radial-segment phase against its closed form, and the two-arm phase
//! split into vector and scalar parts.

use tdab::algebra::{Dipole, SpinLabel};
use tdab::fields::{FluxProfile, SourceConfig, SourceKind};
use tdab::phases::{closed_form_sinusoidal, phase_breakdown, phase_factor, two_path_delta, vector_phase, SpatialPath, TimedPoint, Trajectory};

fn main() {
    let cfg = SourceConfig::new(SourceKind::MagneticSolenoid, 1.0, FluxProfile::sinusoidal(1.0, 1.0).unwrap()).unwrap();
    let mu = Dipole::magnetic(0.1, SpinLabel::Up, 1.0).unwrap();

    for t in [0.0, 0.7, 1.5] {
        let path = SpatialPath::new(vec![[1.5, 0.0], [3.0, 0.0]], t, false).unwrap();
        let quad = vector_phase(&cfg, &mu, &path).unwrap();
        let exact = closed_form_sinusoidal(&cfg, &mu, 1.5, 3.0, t).unwrap();
        println!("t = {t:.1}: quadrature {quad:+.12}, closed form {exact:+.12}");
    }

    let arm = |mid_y: f64| {
        Trajectory::new(vec![
            TimedPoint::new(-3.0, 0.0, 0.0),
            TimedPoint::new(0.0, mid_y, 1.0),
            TimedPoint::new(3.0, 0.0, 2.0),
        ])
        .unwrap()
    };
    let (upper, lower) = (arm(4.0), arm(-2.0));
    for (name, traj) in [("upper", &upper), ("lower", &lower)] {
        let b = phase_breakdown(&cfg, &mu, traj, true).unwrap();
        let z = phase_factor(&b, true);
        println!("{name}: vector {:+.6e} scalar {:+.6e} factor {z:.6}", b.vector_phase, b.scalar_phase);
    }
    println!("delta = {:+.6e} rad", two_path_delta(&cfg, &mu, &upper, &lower).unwrap());
}
