//! The same paths evaluated for a magnetic dipole by a solenoid and an
//! electric dipole by the dual flux tube.

use std::f64::consts::PI;

use tdab::algebra::{Dipole, SpinLabel};
use tdab::experiments::{run_duality_check, DualitySuite};
use tdab::fields::{FluxProfile, SourceConfig, SourceKind};
use tdab::phases::{route_around_source, SpatialPath, Trajectory};

fn main() -> tdab::Result<()> {
    let cfg = SourceConfig::new(SourceKind::MagneticSolenoid, 1.0, FluxProfile::sinusoidal(1.0, 1.0)?)?;
    let mu = Dipole::magnetic(0.1, SpinLabel::Up, 1.0)?;

    let paths = vec![
        SpatialPath::new(vec![[1.5, 0.0], [4.0, 1.0], [2.0, 3.0]], 0.3, false)?,
        SpatialPath::new(route_around_source([-4.0, 0.5], [4.0, -2.5], 1.0), 1.1, false)?,
    ];
    let suite = DualitySuite {
        paths,
        trajectories: vec![Trajectory::arc(3.0, PI, 0.0, 0.0, 2.0, 24)?],
        scalar_second_order: true,
        lattice: Vec::new(),
    };
    let report = run_duality_check(&cfg, &mu, &suite)?;
    for row in &report.phase_rows {
        println!("{:<20} {:+.12e} {:+.12e}", row.label, row.original, row.dual);
    }
    println!("largest discrepancy {:.1e}", report.max_phase_discrepancy);
    Ok(())
}
