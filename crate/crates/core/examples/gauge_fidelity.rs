//! A packet passing a ramped solenoid: the interacting run against the
//! gauge image of the free one. Much larger moments push the field step
//! inside the disk past the zone-edge monitor.

use tdab::algebra::{Dipole, SpinLabel};
use tdab::dirac::{EvolveConfig, LatticeSpec};
use tdab::experiments::{run_gauge_check, LatticeCase};
use tdab::fields::{FluxProfile, SourceConfig, SourceKind};

fn main() -> tdab::Result<()> {
    let cfg = SourceConfig::new(SourceKind::MagneticSolenoid, 1.0, FluxProfile::linear_ramp(1.0, 1.0)?)?;
    let case = LatticeCase {
        label: "ramp".into(),
        lattice: LatticeSpec::new(128, 128, 0.25, [0.0, 0.0], 1.0)?,
        center: [-5.0, 4.0],
        momentum: [1.0, 0.0],
        width: 1.0,
        start_time: -2.5,
        evolve: EvolveConfig::new(0.05, 100),
        gauge_start: true,
    };
    for moment in [0.0, 0.02, 0.05, 0.1] {
        let mu = Dipole::magnetic(moment, SpinLabel::Up, 1.0)?;
        let check = run_gauge_check(&cfg, &mu, &case)?;
        let drift = check.interacting.max_solver_drift();
        println!("mu = {moment:.2}: fidelity {:.8}, norm drift {drift:.1e}", check.fidelity);
    }
    Ok(())
}
