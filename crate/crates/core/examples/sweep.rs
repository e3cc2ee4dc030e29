//! Two-arm phase over a grid of source and dipole parameters.

use tdab::algebra::{Dipole, SpinLabel};
use tdab::experiments::{sweep, ParameterGrid, SweepTemplate};
use tdab::fields::{FluxProfile, SourceConfig, SourceKind};
use tdab::phases::{TimedPoint, Trajectory};

fn main() -> tdab::Result<()> {
    let arm = |mid_y: f64| {
        Trajectory::new(vec![
            TimedPoint::new(-3.0, 0.0, 0.0),
            TimedPoint::new(0.0, mid_y, 1.0),
            TimedPoint::new(3.0, 0.0, 2.0),
        ])
    };
    let template = SweepTemplate {
        source: SourceConfig::new(SourceKind::MagneticSolenoid, 1.0, FluxProfile::sinusoidal(1.0, 1.0)?)?,
        dipole: Dipole::magnetic(0.1, SpinLabel::Up, 1.0)?,
        upper: arm(4.0)?,
        lower: arm(-2.0)?,
        lattice: None,
    };
    let grid = ParameterGrid {
        radius: vec![0.5, 1.0, 2.5],
        amplitude: vec![1.0],
        angular_frequency: vec![0.5, 1.0, 2.0],
        moment: vec![0.1],
        spin: vec![SpinLabel::Up, SpinLabel::Down],
    };
    println!("{:>6} {:>6} {:>3} {:>14}", "a", "w", "s", "delta");
    for row in sweep(&template, &grid).rows {
        let p = row.point;
        let value = match (row.delta, row.error) {
            (Some(d), _) => format!("{d:+.6e}"),
            (None, Some(e)) => e,
            (None, None) => "-".into(),
        };
        println!("{:>6.2} {:>6.2} {:>+3} {value:>14}", p.radius, p.angular_frequency, p.s.as_i8());
    }
    Ok(())
}
