use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tdab::algebra::{gamma_rep, Dipole, SpinLabel};
use tdab::dirac::{
    apply_hamiltonian, gauge_fidelity, gauge_fidelity_with_reference, init_gaussian_wavepacket,
    lattice_phase_field, mean_momentum, overlap_fidelity, EvolveConfig, Evolver, LatticeSpec, SpinorField, Sponge,
};
use tdab::experiments::{run_gauge_check, LatticeCase};
use tdab::fields::{FluxProfile, SourceConfig, SourceKind};

fn solenoid(profile: FluxProfile) -> SourceConfig {
    SourceConfig::new(SourceKind::MagneticSolenoid, 1.0, profile).unwrap()
}

fn random_field(spec: LatticeSpec, rng: &mut ChaCha8Rng) -> SpinorField {
    let mut psi = SpinorField::zeros(spec, 0.0);
    for z in psi.upper.iter_mut().chain(psi.lower.iter_mut()) {
        *z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    psi
}

fn quiet(dt: f64, n: usize) -> EvolveConfig {
    let mut ec = EvolveConfig::new(dt, n);
    ec.sponge = Sponge::off();
    ec
}

#[test]
fn hamiltonian_is_hermitian() {
    let spec = LatticeSpec::new(32, 32, 0.3, [0.0, 0.0], 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (s, profile) in [
        (SpinLabel::Up, FluxProfile::sinusoidal(1.3, 0.7).unwrap()),
        (SpinLabel::Down, FluxProfile::linear_ramp(-2.0, 1.0).unwrap()),
    ] {
        let cfg = solenoid(profile);
        let rep = gamma_rep(s);
        let mu = Dipole::magnetic(0.7, s, 1.5).unwrap();
        let phi = random_field(spec, &mut rng);
        let psi = random_field(spec, &mut rng);
        let t = rng.random_range(-2.0..2.0);
        let a = phi.inner(&apply_hamiltonian(&psi, &rep, &cfg, &mu, t).unwrap());
        let b = apply_hamiltonian(&phi, &rep, &cfg, &mu, t).unwrap().inner(&psi);
        assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0), "{a} vs {b}");
    }
}

/// H_μ e^{−iχ}ψ = e^{−iχ}H₀ψ for a static gauge function and a packet
/// clear of the source.
#[test]
fn hamiltonian_is_gauge_covariant() {
    let spec = LatticeSpec::new(128, 128, 0.2, [0.0, 0.0], 1.0).unwrap();
    let cfg = solenoid(FluxProfile::linear_ramp(1.0, 1.0).unwrap());
    let rep = gamma_rep(SpinLabel::Up);
    let mu = Dipole::magnetic(0.2, SpinLabel::Up, 1.0).unwrap();
    let psi = init_gaussian_wavepacket(&spec, [-7.0, 6.0], [1.0, 0.0], 0.6, &rep, 1.0).unwrap();
    let chi = lattice_phase_field(&spec, &cfg, &mu, psi.mean_position(), 0.0).unwrap();
    let minus: Vec<f64> = chi.iter().map(|c| -c).collect();

    let mut dressed = psi.clone();
    dressed.apply_phase(&minus);
    let lhs = apply_hamiltonian(&dressed, &rep, &cfg, &mu, 0.0).unwrap();
    let mut rhs = apply_hamiltonian(&psi, &rep, &cfg, &mu.with_moment(0.0), 0.0).unwrap();
    rhs.apply_phase(&minus);

    let mut diff = lhs.clone();
    diff.scale(C64::new(-1.0, 0.0));
    diff.add_assign(&rhs);
    let rel = diff.norm() / rhs.norm();
    assert!(rel < 1e-6, "relative gap {rel:e}");
}

/// Reflecting y, flipping s and negating the flux maps one run onto
/// the other while the packet stays clear of the source.
#[test]
fn spin_flip_mirrors_the_evolution() {
    let spec = LatticeSpec::new(128, 128, 0.25, [0.0, 0.0], 1.0).unwrap();
    let profile = FluxProfile::sinusoidal(1.0, 1.0).unwrap();
    let cfg = solenoid(profile.clone());
    let mirrored = solenoid(profile.negated());
    let up = gamma_rep(SpinLabel::Up);
    let down = gamma_rep(SpinLabel::Down);
    let mu = Dipole::magnetic(0.3, SpinLabel::Up, 1.0).unwrap();
    let psi = init_gaussian_wavepacket(&spec, [-7.0, 6.0], [0.8, -0.3], 1.0, &up, 1.0).unwrap();
    let ec = quiet(0.1, 40);
    let a = Evolver::new(spec, up, &cfg, mu, ec).unwrap().run_with(&psi, |_, _| {}).unwrap();
    let b = Evolver::new(spec, down, &mirrored, mu.with_spin(SpinLabel::Down), ec)
        .unwrap()
        .run_with(&psi.reflect_y(), |_, _| {})
        .unwrap();
    let f = overlap_fidelity(&a.final_state.reflect_y(), &b.final_state);
    assert!(f >= 1.0 - 1e-8, "fidelity {f}");
}

fn dispersion_packet() -> (LatticeSpec, SpinorField, f64) {
    let spec = LatticeSpec::new(256, 256, 0.25, [0.0, 0.0], 0.1).unwrap();
    let mass = 2.0;
    let psi = init_gaussian_wavepacket(&spec, [-15.0, 0.0], [1.0, 0.0], 3.0, &gamma_rep(SpinLabel::Up), mass).unwrap();
    (spec, psi, mass)
}

#[test]
fn packet_energy_follows_dispersion() {
    let (_, psi, mass) = dispersion_packet();
    let cfg = solenoid(FluxProfile::constant(0.0).unwrap());
    let rep = gamma_rep(SpinLabel::Up);
    let mu = Dipole::magnetic(0.0, SpinLabel::Up, mass).unwrap();
    let e = psi.inner(&apply_hamiltonian(&psi, &rep, &cfg, &mu, 0.0).unwrap()).re;
    let expect = (mass * mass + 1.0f64).sqrt();
    assert!((e - expect).abs() <= 0.01 * expect, "{e} vs {expect}");
}

#[test]
fn packet_moves_at_group_velocity() {
    let (spec, psi, mass) = dispersion_packet();
    let cfg = solenoid(FluxProfile::constant(0.0).unwrap());
    let rep = gamma_rep(SpinLabel::Up);
    let mu = Dipole::magnetic(0.0, SpinLabel::Up, mass).unwrap();
    let mut ec = quiet(0.05, 200);
    ec.energy_reference = (mass * mass + 1.0f64).sqrt();
    let run = Evolver::new(spec, rep, &cfg, mu, ec).unwrap().run_with(&psi, |_, _| {}).unwrap();
    let shift = run.final_state.mean_position()[0] - psi.mean_position()[0];
    let v = shift / (run.t_final() - run.t_start());
    let expect = 1.0 / (mass * mass + 1.0f64).sqrt();
    assert!((v - expect).abs() <= 0.01 * expect, "{v} vs {expect}");
}

#[test]
fn steps_are_unitary_without_sponge() {
    let spec = LatticeSpec::new(64, 64, 0.3, [0.0, 0.0], 1.0).unwrap();
    let cfg = solenoid(FluxProfile::sinusoidal(1.0, 1.0).unwrap());
    let rep = gamma_rep(SpinLabel::Up);
    let mu = Dipole::magnetic(0.1, SpinLabel::Up, 1.0).unwrap();
    let psi = init_gaussian_wavepacket(&spec, [-5.0, 4.5], [1.0, 0.0], 1.0, &rep, 1.0).unwrap();
    let run = Evolver::new(spec, rep, &cfg, mu, quiet(0.1, 50)).unwrap().run_with(&psi, |_, _| {}).unwrap();
    for w in run.norms.windows(2) {
        assert!((w[1].norm_sqr - w[0].norm_sqr).abs() <= 1e-12, "{:?}", w);
    }
}

fn gauge_case(start_time: f64, n_steps: usize) -> LatticeCase {
    LatticeCase {
        label: "probe".into(),
        lattice: LatticeSpec::new(64, 64, 0.3, [0.0, 0.0], 1.0).unwrap(),
        center: [-4.0, 4.0],
        momentum: [1.0, 0.0],
        width: 1.0,
        start_time,
        evolve: EvolveConfig::new(0.1, n_steps),
        gauge_start: true,
    }
}

#[test]
fn reference_point_only_sets_a_global_phase() {
    let cfg = solenoid(FluxProfile::sinusoidal(1.0, 1.0).unwrap());
    let mu = Dipole::magnetic(0.2, SpinLabel::Up, 1.0).unwrap();
    let check = run_gauge_check(&cfg, &mu, &gauge_case(-1.0, 20)).unwrap();
    let a = gauge_fidelity(&check.free, &check.interacting, &cfg, &mu).unwrap();
    for reference in [[3.0, -2.0], [0.0, 7.5], [-6.0, -6.0]] {
        let b = gauge_fidelity_with_reference(&check.free, &check.interacting, &cfg, &mu, reference).unwrap();
        assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }
}

#[test]
fn zero_moment_gives_unit_fidelity() {
    let cfg = solenoid(FluxProfile::sinusoidal(1.0, 1.0).unwrap());
    let mu = Dipole::magnetic(0.0, SpinLabel::Down, 1.0).unwrap();
    let check = run_gauge_check(&cfg, &mu, &gauge_case(0.0, 20)).unwrap();
    assert!((1.0 - check.fidelity).abs() <= 1e-12, "{}", check.fidelity);
}

/// The residual ∂χ/∂t scales as μΦ̈ ∝ w², so √(1 − F) should too over a
/// window centred on the peak of Φ̈.
#[test]
fn fidelity_loss_grows_quadratically_with_frequency() {
    let mu = Dipole::magnetic(0.1, SpinLabel::Up, 1.0).unwrap();
    let span = 2.0;
    let loss: Vec<(f64, f64)> = [0.25, 0.5, 1.0]
        .into_iter()
        .map(|w| {
            let cfg = solenoid(FluxProfile::sinusoidal(1.0, w).unwrap());
            let case = gauge_case(PI / (2.0 * w) - span / 2.0, 20);
            let f = run_gauge_check(&cfg, &mu, &case).unwrap().fidelity;
            (w, (1.0 - f).max(0.0).sqrt())
        })
        .collect();
    for p in loss.windows(2) {
        let slope = (p[1].1 / p[0].1).ln() / (p[1].0 / p[0].0).ln();
        assert!((slope - 2.0).abs() < 0.3, "slope {slope} from {loss:?}");
    }
}

#[test]
fn packets_have_requested_moments() {
    let spec = LatticeSpec::new(128, 128, 0.3, [0.0, 0.0], 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..12 {
        let s = if rng.random_bool(0.5) { SpinLabel::Up } else { SpinLabel::Down };
        let center = [rng.random_range(-8.0..-5.0), rng.random_range(-6.0..6.0)];
        let k = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let width = rng.random_range(0.9..1.1);
        let mass = rng.random_range(0.5..3.0);
        let psi = init_gaussian_wavepacket(&spec, center, k, width, &gamma_rep(s), mass).unwrap();
        assert!((psi.norm() - 1.0).abs() <= 1e-12);
        let m = psi.mean_position();
        let p = mean_momentum(&psi);
        for d in 0..2 {
            assert!((m[d] - center[d]).abs() <= 1e-6, "{m:?} vs {center:?}");
            assert!((p[d] - k[d]).abs() <= 1e-6, "{p:?} vs {k:?}");
        }
    }
}
