//! Two-arm interference, duality verification and parameter sweeps.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::algebra::{gamma_rep, Dipole, SpinLabel};
use crate::dirac::{
    gauge_fidelity, init_gaussian_wavepacket, lattice_phase_field, EvolveConfig, EvolveRun,
    Evolver, LatticeSpec, SpinorField,
};
use crate::error::{Error, Result};
use crate::fields::{duality_map, FluxProfile, SourceConfig, SourceKind};
use crate::phases::{
    scalar_phase, snapshot_phase_field, two_path_delta, vector_phase, SpatialPath, TimedPoint,
    Trajectory,
};

/// Fringe contrast below which a phase fit is refused.
pub const CONTRAST_THRESHOLD: f64 = 0.05;

/// Wraps an angle into (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Two Gaussian arms leaving a common point and meeting on a screen line.
///
/// The packets are launched at `upper_launch` and `lower_launch` at
/// `launch_time`, both heading for `screen_point`. Before launch the particle
/// is taken to have split at `source_point` a moment `split_duration`
/// earlier, which fixes the reference of the initial gauge phase. The screen
/// is the lattice column through `screen_point`.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceGeometry {
    pub lattice: LatticeSpec,
    pub source_point: [f64; 2],
    pub upper_launch: [f64; 2],
    pub lower_launch: [f64; 2],
    pub screen_point: [f64; 2],
    pub packet_width: f64,
    pub momentum: f64,
    pub launch_time: f64,
    pub split_duration: f64,
}

impl InterferenceGeometry {
    /// Arms of length `arm_length` arriving at `screen` at ±`half_angle` from
    /// the +x direction. The lattice is centred so the screen point is a site.
    pub fn symmetric(
        screen: [f64; 2],
        arm_length: f64,
        half_angle: f64,
        packet_width: f64,
        momentum: f64,
        n: usize,
        dx: f64,
        source_radius: f64,
    ) -> Result<Self> {
        let (s, c) = half_angle.sin_cos();
        let upper = [screen[0] - arm_length * c, screen[1] + arm_length * s];
        let lower = [screen[0] - arm_length * c, screen[1] - arm_length * s];
        let center = [screen[0] - (n as f64 * 0.1875).round() * dx, screen[1]];
        let lattice = LatticeSpec::new(n, n, dx, center, source_radius)?;
        Ok(Self {
            lattice,
            source_point: [upper[0] - 0.25 * arm_length, screen[1]],
            upper_launch: upper,
            lower_launch: lower,
            screen_point: screen,
            packet_width,
            momentum,
            launch_time: 0.0,
            split_duration: 1e-6,
        })
    }

    /// 256² lattice, arms of length 16 meeting at 60°, unit packets with
    /// |k| = 4. The lower arm clears a unit source by about 4.8 widths.
    pub fn standard() -> Result<Self> {
        Self::symmetric([15.0, 2.0], 16.0, PI / 6.0, 1.0, 4.0, 256, 0.15625, 1.0)
    }

    /// Flight time from launch to screen.
    pub fn flight_time(&self, mass: f64) -> f64 {
        self.arrival_time(mass) - self.launch_time
    }

    fn arm_length(&self, launch: [f64; 2]) -> f64 {
        (self.screen_point[0] - launch[0]).hypot(self.screen_point[1] - launch[1])
    }

    fn heading(&self, launch: [f64; 2]) -> [f64; 2] {
        let d = self.arm_length(launch);
        [
            self.momentum * (self.screen_point[0] - launch[0]) / d,
            self.momentum * (self.screen_point[1] - launch[1]) / d,
        ]
    }

    /// Kinematic arrival time at the screen for a particle of mass `mass`.
    pub fn arrival_time(&self, mass: f64) -> f64 {
        let v = self.momentum / (mass * mass + self.momentum * self.momentum).sqrt();
        self.launch_time + self.arm_length(self.upper_launch) / v
    }

    /// Timed centre-line trajectories of both arms, source to screen.
    pub fn trajectories(&self, mass: f64) -> Result<(Trajectory, Trajectory)> {
        let t_split = self.launch_time - self.split_duration;
        let t_arr = self.arrival_time(mass);
        let arm = |launch: [f64; 2]| {
            Trajectory::new(vec![
                TimedPoint::new(self.source_point[0], self.source_point[1], t_split),
                TimedPoint::new(launch[0], launch[1], self.launch_time),
                TimedPoint::new(self.screen_point[0], self.screen_point[1], t_arr),
            ])
        };
        Ok((arm(self.upper_launch)?, arm(self.lower_launch)?))
    }

    pub fn validate(&self, radius: f64) -> Result<()> {
        let mut errors = Vec::new();
        let (du, dl) = (self.arm_length(self.upper_launch), self.arm_length(self.lower_launch));
        if !((du - dl).abs() <= 1e-9 * du.max(dl)) {
            errors.push(format!("arms must have equal length, got {du} and {dl}"));
        }
        if !(self.momentum > 0.0 && self.momentum.is_finite()) {
            errors.push("packet momentum must be > 0".into());
        }
        if !(self.packet_width > 0.0 && self.packet_width.is_finite()) {
            errors.push("packet width must be > 0".into());
        }
        if !(self.split_duration > 0.0) {
            errors.push("split duration must be > 0".into());
        }
        if self.upper_launch[1] <= self.screen_point[1] || self.lower_launch[1] >= self.screen_point[1] {
            errors.push("upper arm must start above the screen point and lower arm below".into());
        }
        if self.lattice.column_at(self.screen_point[0]).is_none()
            || self.lattice.row_at(self.screen_point[1]).is_none()
        {
            errors.push("screen point must coincide with a lattice site".into());
        }
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        let clearance = radius + 3.0 * self.packet_width;
        for launch in [self.upper_launch, self.lower_launch] {
            let r = closest_approach(launch, self.screen_point);
            if r <= clearance {
                return Err(Error::EntersSource { r, radius: clearance });
            }
        }
        Ok(())
    }
}

fn closest_approach(p: [f64; 2], q: [f64; 2]) -> f64 {
    let d = [q[0] - p[0], q[1] - p[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let u = (-(p[0] * d[0] + p[1] * d[1]) / len2).clamp(0.0, 1.0);
    (p[0] + u * d[0]).hypot(p[1] + u * d[1])
}

/// How the unshifted fringe position is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FringeReference {
    /// Compare against the run with the flux reversed and halve the
    /// difference. Effects even in the coupling cancel.
    FluxReversal,
    /// Compare against a run with the coupling switched off.
    FieldFree,
}

impl FringeReference {
    pub fn name(self) -> &'static str {
        match self {
            FringeReference::FluxReversal => "flux_reversal",
            FringeReference::FieldFree => "field_free",
        }
    }
}

/// Intensity sampled along the screen line; `coords` increase toward the
/// upper arm and vanish at the screen point.
#[derive(Clone, Debug, PartialEq)]
pub struct ScreenPattern {
    pub coords: Vec<f64>,
    pub intensity: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceResult {
    pub pattern: ScreenPattern,
    pub reference: ScreenPattern,
    pub reference_mode: FringeReference,
    pub fringe_shift: f64,
    /// Shift against the coupling-free run, when it was computed.
    pub field_free_shift: Option<f64>,
    pub predicted_delta: f64,
    /// |shift − prediction| / |prediction|; absent for a null prediction.
    pub relative_error: Option<f64>,
    pub absolute_error: f64,
    pub contrast: f64,
    pub fringe_wavenumber: f64,
    pub arrival_time: f64,
    pub steps: usize,
    pub dt: f64,
    pub max_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterferenceOptions {
    pub reference: FringeReference,
    pub report_field_free: bool,
}

impl Default for InterferenceOptions {
    fn default() -> Self {
        Self {
            reference: FringeReference::FluxReversal,
            report_field_free: false,
        }
    }
}

/// Single dominant-harmonic fit of a screen pattern.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FringeFit {
    pub wavenumber: f64,
    /// Phase of the harmonic at the screen point.
    pub phase: f64,
    pub contrast: f64,
}

fn check_pattern(p: &ScreenPattern) -> Result<f64> {
    let n = p.coords.len();
    if n < 8 || n != p.intensity.len() {
        return Err(Error::InvalidInput(
            "screen pattern needs matching coordinate and intensity arrays of length >= 8".into(),
        ));
    }
    let h = p.coords[1] - p.coords[0];
    if !(h > 0.0) || p.coords.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::InvalidInput("screen coordinates must be uniformly increasing".into()));
    }
    if p.intensity.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidInput("intensities must be finite and >= 0".into()));
    }
    Ok(h)
}

fn spectrum(values: &[f64], len: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    buf.resize(len, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    buf
}

/// Wavenumber of the strongest spectral peak beyond the envelope lobe.
fn dominant_wavenumber(p: &ScreenPattern, h: f64) -> Result<f64> {
    let n = p.intensity.len();
    let pad = (8 * n).next_power_of_two();
    let mag: Vec<f64> = spectrum(&p.intensity, pad)[..pad / 2].iter().map(|z| z.norm()).collect();
    let mut k = 0;
    while k + 1 < mag.len() && mag[k + 1] <= mag[k] {
        k += 1;
    }
    let (peak, _) = mag[k..]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i + k, *v))
        .ok_or(Error::LowContrast {
            contrast: 0.0,
            threshold: CONTRAST_THRESHOLD,
        })?;
    let mut bin = peak as f64;
    if peak > 0 && peak + 1 < mag.len() {
        let (a, b, c) = (mag[peak - 1], mag[peak], mag[peak + 1]);
        let denom = a - 2.0 * b + c;
        if denom < 0.0 {
            bin += 0.5 * (a - c) / denom;
        }
    }
    Ok(2.0 * PI * bin / (pad as f64 * h))
}

/// Band-pass demodulation at wavenumber q: phase and contrast at the
/// coordinate origin.
fn demodulate(p: &ScreenPattern, h: f64, q: f64) -> Result<FringeFit> {
    let n = p.intensity.len();
    let full = spectrum(&p.intensity, n);
    let dq = 2.0 * PI / (n as f64 * h);
    let mut side = vec![Complex64::new(0.0, 0.0); n];
    let mut low = vec![Complex64::new(0.0, 0.0); n];
    for (k, z) in full.iter().enumerate() {
        let f = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 } * dq;
        if f >= 0.5 * q && f <= 1.5 * q {
            side[k] = *z;
        } else if f.abs() < 0.5 * q {
            low[k] = *z;
        }
    }
    let inv = FftPlanner::new().plan_fft_inverse(n);
    inv.process(&mut side);
    inv.process(&mut low);
    let origin = p
        .coords
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let z = side[origin] / n as f64;
    let background = low[origin].re / n as f64;
    let u0 = p.coords[origin];
    let contrast = if background > 0.0 { 2.0 * z.norm() / background } else { 0.0 };
    Ok(FringeFit {
        wavenumber: q,
        phase: wrap_phase(z.arg() - q * u0),
        contrast,
    })
}

/// Fits the dominant fringe harmonic of a pattern.
pub fn fit_fringe(p: &ScreenPattern) -> Result<FringeFit> {
    let h = check_pattern(p)?;
    let q = dominant_wavenumber(p, h)?;
    demodulate(p, h, q)
}

/// Phase shift of the dominant harmonic of `shifted` relative to
/// `reference`, in (−π, π]. The harmonic's wavenumber comes from the
/// reference.
pub fn extract_fringe_shift(reference: &ScreenPattern, shifted: &ScreenPattern) -> Result<f64> {
    Ok(fringe_pair(reference, shifted)?.0)
}

fn fringe_pair(reference: &ScreenPattern, shifted: &ScreenPattern) -> Result<(f64, FringeFit, FringeFit)> {
    let h = check_pattern(reference)?;
    check_pattern(shifted)?;
    if reference.coords != shifted.coords {
        return Err(Error::InvalidInput("patterns were sampled on different screens".into()));
    }
    let q = dominant_wavenumber(reference, h)?;
    let a = demodulate(reference, h, q)?;
    let b = demodulate(shifted, h, q)?;
    let worst = a.contrast.min(b.contrast);
    if !(worst >= CONTRAST_THRESHOLD) {
        return Err(Error::LowContrast {
            contrast: worst,
            threshold: CONTRAST_THRESHOLD,
        });
    }
    Ok((wrap_phase(b.phase - a.phase), a, b))
}

/// Moment that makes the predicted two-arm phase equal `target`; the
/// prediction is linear in the moment.
pub fn tune_moment(
    cfg: &SourceConfig,
    dipole: &Dipole,
    geometry: &InterferenceGeometry,
    target: f64,
) -> Result<f64> {
    let (upper, lower) = geometry.trajectories(dipole.mass)?;
    let unit = two_path_delta(cfg, &dipole.with_moment(1.0), &upper, &lower)?;
    if unit.abs() < 1e-12 {
        return Err(Error::InvalidInput(
            "predicted phase vanishes for this source and geometry".into(),
        ));
    }
    Ok(target / unit)
}

/// Sources, dipole, geometry and step control for the standard two-arm run.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceSetup {
    pub source: SourceConfig,
    pub dipole: Dipole,
    pub geometry: InterferenceGeometry,
    pub evolve: EvolveConfig,
}

impl InterferenceSetup {
    /// Sinusoidal solenoid (a = 1, B₀ = 1, w = 0.8) with the moment tuned
    /// for a predicted phase of `target`. The axial coupling μB₀ stays well
    /// below the mass, so the field inside the source is resolved.
    pub fn sinusoidal(target: f64) -> Result<Self> {
        let geometry = InterferenceGeometry::standard()?;
        let source = SourceConfig::new(
            SourceKind::MagneticSolenoid,
            1.0,
            FluxProfile::sinusoidal(1.0, 0.8)?,
        )?;
        let mut dipole = Dipole::magnetic(1.0, SpinLabel::Up, 10.0)?;
        dipole.moment = tune_moment(&source, &dipole, &geometry, target)?;
        let mut evolve = EvolveConfig::new(0.075, 2000);
        evolve.energy_reference = dipole.mass;
        Ok(Self {
            source,
            dipole,
            geometry,
            evolve,
        })
    }

    /// Same moment and geometry with a constant-rate flux. The flight is
    /// centred on t = 0 and the rate set so |B_z| inside the source never
    /// exceeds the sinusoid's amplitude.
    pub fn constant_rate_control(&self) -> Result<Self> {
        let mut out = self.clone();
        let flight = self.geometry.flight_time(self.dipole.mass);
        out.geometry.launch_time = -0.5 * flight;
        let w = self.source.profile.angular_frequency;
        let amplitude = 2.0 * self.source.profile.amplitude / (w * flight);
        out.source = self.source.with_profile(FluxProfile::linear_ramp(amplitude, w)?);
        Ok(out)
    }

    pub fn with_moment(&self, moment: f64) -> Self {
        let mut out = self.clone();
        out.dipole.moment = moment;
        out
    }

    pub fn run(&self, options: InterferenceOptions) -> Result<InterferenceResult> {
        run_interference_with(&self.source, &self.dipole, &self.geometry, &self.evolve, options)
    }
}

/// Two-arm state at launch: both packets, gauge-imprinted relative to the
/// split point at the launch instant.
pub fn interference_initial_state(
    cfg: &SourceConfig,
    dipole: &Dipole,
    geometry: &InterferenceGeometry,
) -> Result<SpinorField> {
    let rep = gamma_rep(dipole.s);
    let mut psi = init_gaussian_wavepacket(
        &geometry.lattice,
        geometry.upper_launch,
        geometry.heading(geometry.upper_launch),
        geometry.packet_width,
        &rep,
        dipole.mass,
    )?;
    let lower = init_gaussian_wavepacket(
        &geometry.lattice,
        geometry.lower_launch,
        geometry.heading(geometry.lower_launch),
        geometry.packet_width,
        &rep,
        dipole.mass,
    )?;
    psi.add_assign(&lower);
    psi.normalize()?;
    psi.t = geometry.launch_time;
    if dipole.moment != 0.0 {
        let chi = lattice_phase_field(
            &geometry.lattice,
            cfg,
            dipole,
            geometry.source_point,
            geometry.launch_time,
        )?;
        let minus: Vec<f64> = chi.iter().map(|c| -c).collect();
        psi.apply_phase(&minus);
    }
    Ok(psi)
}

struct ScreenRun {
    pattern: ScreenPattern,
    max_residual: f64,
}

fn screen_run(
    cfg: &SourceConfig,
    dipole: &Dipole,
    geometry: &InterferenceGeometry,
    evolve_cfg: &EvolveConfig,
) -> Result<ScreenRun> {
    let psi = interference_initial_state(cfg, dipole, geometry)?;
    let mut ev = Evolver::new(geometry.lattice, gamma_rep(dipole.s), cfg, *dipole, *evolve_cfg)?;
    let run = ev.run_with(&psi, |_, _| {})?;
    let spec = geometry.lattice;
    let col = spec.column_at(geometry.screen_point[0]).ok_or_else(|| {
        Error::MissedScreen("screen column is not on the lattice".into())
    })?;
    let rho = run.final_state.density();
    let coords: Vec<f64> = (0..spec.ny).map(|j| spec.y(j) - geometry.screen_point[1]).collect();
    let intensity: Vec<f64> = (0..spec.ny).map(|j| rho[j * spec.nx + col]).collect();
    let peak = intensity.iter().cloned().fold(0.0, f64::max);
    let total: f64 = rho.iter().sum();
    if !(peak > 1e-6 * total) {
        return Err(Error::MissedScreen(format!(
            "no intensity on the screen at t = {}",
            run.t_final()
        )));
    }
    Ok(ScreenRun {
        pattern: ScreenPattern { coords, intensity },
        max_residual: run.max_residual,
    })
}

/// Runs the two-arm experiment and compares the fringe shift with the
/// quadrature prediction along the arms' centre lines.
///
/// `evolve_cfg.dt` is the largest step allowed and `evolve_cfg.n_steps` the
/// step budget. The step is shortened so the last step lands on the
/// kinematic arrival time.
pub fn run_interference(
    cfg: &SourceConfig,
    dipole: &Dipole,
    geometry: &InterferenceGeometry,
    evolve_cfg: &EvolveConfig,
) -> Result<InterferenceResult> {
    run_interference_with(cfg, dipole, geometry, evolve_cfg, InterferenceOptions::default())
}

pub fn run_interference_with(
    cfg: &SourceConfig,
    dipole: &Dipole,
    geometry: &InterferenceGeometry,
    evolve_cfg: &EvolveConfig,
    options: InterferenceOptions,
) -> Result<InterferenceResult> {
    cfg.check_dipole(dipole)?;
    geometry.validate(cfg.radius)?;
    let (upper, lower) = geometry.trajectories(dipole.mass)?;
    let predicted = two_path_delta(cfg, dipole, &upper, &lower)?;

    let t_arr = geometry.arrival_time(dipole.mass);
    let span = t_arr - geometry.launch_time;
    let steps = (span / evolve_cfg.dt).ceil() as usize;
    if steps > evolve_cfg.n_steps {
        return Err(Error::MissedScreen(format!(
            "arrival needs {steps} steps of at most {} but the budget is {}",
            evolve_cfg.dt, evolve_cfg.n_steps
        )));
    }
    let mut ec = *evolve_cfg;
    ec.n_steps = steps;
    ec.dt = span / steps as f64;
    ec.record_every = 0;

    let shifted = screen_run(cfg, dipole, geometry, &ec)?;
    let free = dipole.with_moment(0.0);
    let field_free = if options.reference == FringeReference::FieldFree || options.report_field_free {
        Some(screen_run(cfg, &free, geometry, &ec)?)
    } else {
        None
    };
    let (reference, shift, fit) = match (options.reference, &field_free) {
        (FringeReference::FieldFree, Some(ff)) => {
            let (shift, a, b) = fringe_pair(&ff.pattern, &shifted.pattern)?;
            (ff.pattern.clone(), shift, (a, b))
        }
        _ => {
            let reversed_cfg = cfg.with_profile(cfg.profile.negated());
            let reversed = screen_run(&reversed_cfg, dipole, geometry, &ec)?;
            let (shift, a, b) = fringe_pair(&reversed.pattern, &shifted.pattern)?;
            (reversed.pattern, 0.5 * shift, (a, b))
        }
    };
    let field_free_shift = match (&field_free, options.reference) {
        (Some(_), FringeReference::FieldFree) => Some(shift),
        (Some(ff), _) => Some(extract_fringe_shift(&ff.pattern, &shifted.pattern)?),
        (None, _) => None,
    };
    let absolute_error = (shift - predicted).abs();
    let relative_error = (predicted.abs() > 1e-9).then(|| absolute_error / predicted.abs());
    Ok(InterferenceResult {
        pattern: shifted.pattern,
        reference,
        reference_mode: options.reference,
        fringe_shift: shift,
        field_free_shift,
        predicted_delta: predicted,
        relative_error,
        absolute_error,
        contrast: fit.0.contrast.min(fit.1.contrast),
        fringe_wavenumber: fit.0.wavenumber,
        arrival_time: t_arr,
        steps,
        dt: ec.dt,
        max_residual: shifted.max_residual,
    })
}

/// A lattice gauge-equivalence case: one packet, a free and an interacting
/// run, compared through [`gauge_fidelity`].
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeCase {
    pub label: String,
    pub lattice: LatticeSpec,
    pub center: [f64; 2],
    pub momentum: [f64; 2],
    pub width: f64,
    pub start_time: f64,
    pub evolve: EvolveConfig,
    /// Start the interacting run from the gauge image e^{−iχ}ψ₀ of the free
    /// packet rather than from ψ₀ itself.
    pub gauge_start: bool,
}

#[derive(Clone, Debug)]
pub struct GaugeCheck {
    pub fidelity: f64,
    pub free: EvolveRun,
    pub interacting: EvolveRun,
}

pub fn run_gauge_check(cfg: &SourceConfig, dipole: &Dipole, case: &LatticeCase) -> Result<GaugeCheck> {
    cfg.check_dipole(dipole)?;
    let rep = gamma_rep(dipole.s);
    let mut psi0 = init_gaussian_wavepacket(
        &case.lattice,
        case.center,
        case.momentum,
        case.width,
        &rep,
        dipole.mass,
    )?;
    psi0.t = case.start_time;
    let mut psi_int = psi0.clone();
    if case.gauge_start && dipole.moment != 0.0 {
        let reference = psi0.mean_position();
        let chi = lattice_phase_field(&case.lattice, cfg, dipole, reference, case.start_time)?;
        let minus: Vec<f64> = chi.iter().map(|c| -c).collect();
        psi_int.apply_phase(&minus);
    }
    let free_dipole = dipole.with_moment(0.0);
    let free = Evolver::new(case.lattice, rep, cfg, free_dipole, case.evolve)?.run_with(&psi0, |_, _| {})?;
    let interacting = Evolver::new(case.lattice, rep, cfg, *dipole, case.evolve)?.run_with(&psi_int, |_, _| {})?;
    let fidelity = gauge_fidelity(&free, &interacting, cfg, dipole)?;
    Ok(GaugeCheck {
        fidelity,
        free,
        interacting,
    })
}

/// Inputs for [`run_duality_check`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DualitySuite {
    pub paths: Vec<SpatialPath>,
    pub trajectories: Vec<Trajectory>,
    /// Also compare scalar phases with the second-order field switched on.
    pub scalar_second_order: bool,
    pub lattice: Vec<LatticeCase>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualityRow {
    pub label: String,
    pub original: f64,
    pub dual: f64,
    pub double_dual: f64,
}

impl DualityRow {
    pub fn discrepancy(&self) -> f64 {
        (self.original - self.dual).abs()
    }

    pub fn double_discrepancy(&self) -> f64 {
        (self.original - self.double_dual).abs()
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct DualityReport {
    pub phase_rows: Vec<DualityRow>,
    pub fidelity_rows: Vec<DualityRow>,
    pub max_phase_discrepancy: f64,
    pub max_double_discrepancy: f64,
    /// Largest |F_original − F_dual| over lattice cases.
    pub max_fidelity_gap: f64,
    pub min_fidelity: Option<f64>,
}

impl DualityReport {
    pub fn is_empty(&self) -> bool {
        self.phase_rows.is_empty() && self.fidelity_rows.is_empty()
    }
}

/// Evaluates every suite entry in the given configuration, in its dual
/// image and in the image of the image.
pub fn run_duality_check(cfg: &SourceConfig, dipole: &Dipole, suite: &DualitySuite) -> Result<DualityReport> {
    let (dcfg, ddip) = duality_map(cfg, dipole);
    let (ccfg, cdip) = duality_map(&dcfg, &ddip);
    let mut report = DualityReport::default();
    for (k, path) in suite.paths.iter().enumerate() {
        report.phase_rows.push(DualityRow {
            label: format!("path{k}"),
            original: vector_phase(cfg, dipole, path)?,
            dual: vector_phase(&dcfg, &ddip, path)?,
            double_dual: vector_phase(&ccfg, &cdip, path)?,
        });
    }
    for (k, traj) in suite.trajectories.iter().enumerate() {
        report.phase_rows.push(DualityRow {
            label: format!("trajectory{k}"),
            original: vector_phase(cfg, dipole, traj)?,
            dual: vector_phase(&dcfg, &ddip, traj)?,
            double_dual: vector_phase(&ccfg, &cdip, traj)?,
        });
        if suite.scalar_second_order {
            report.phase_rows.push(DualityRow {
                label: format!("trajectory{k}_scalar"),
                original: scalar_phase(cfg, dipole, traj, true)?,
                dual: scalar_phase(&dcfg, &ddip, traj, true)?,
                double_dual: scalar_phase(&ccfg, &cdip, traj, true)?,
            });
        }
    }
    for case in &suite.lattice {
        let a = run_gauge_check(cfg, dipole, case)?;
        let b = run_gauge_check(&dcfg, &ddip, case)?;
        let c = run_gauge_check(&ccfg, &cdip, case)?;
        report.fidelity_rows.push(DualityRow {
            label: case.label.clone(),
            original: a.fidelity,
            dual: b.fidelity,
            double_dual: c.fidelity,
        });
    }
    report.max_phase_discrepancy = report.phase_rows.iter().map(DualityRow::discrepancy).fold(0.0, f64::max);
    report.max_double_discrepancy = report
        .phase_rows
        .iter()
        .chain(&report.fidelity_rows)
        .map(DualityRow::double_discrepancy)
        .fold(0.0, f64::max);
    report.max_fidelity_gap = report.fidelity_rows.iter().map(DualityRow::discrepancy).fold(0.0, f64::max);
    report.min_fidelity = report
        .fidelity_rows
        .iter()
        .flat_map(|r| [r.original, r.dual])
        .reduce(f64::min);
    Ok(report)
}

/// Axes of a sweep; the grid is their Cartesian product.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterGrid {
    pub radius: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub angular_frequency: Vec<f64>,
    pub moment: Vec<f64>,
    pub spin: Vec<SpinLabel>,
}

impl ParameterGrid {
    pub fn len(&self) -> usize {
        self.radius.len() * self.amplitude.len() * self.angular_frequency.len() * self.moment.len() * self.spin.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Tuples in row-major order (radius slowest, spin fastest).
    pub fn tuples(&self) -> Vec<SweepPoint> {
        let mut out = Vec::with_capacity(self.len());
        for &radius in &self.radius {
            for &amplitude in &self.amplitude {
                for &angular_frequency in &self.angular_frequency {
                    for &moment in &self.moment {
                        for &s in &self.spin {
                            out.push(SweepPoint {
                                radius,
                                amplitude,
                                angular_frequency,
                                moment,
                                s,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub radius: f64,
    pub amplitude: f64,
    pub angular_frequency: f64,
    pub moment: f64,
    pub s: SpinLabel,
}

/// What each sweep tuple evaluates.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepTemplate {
    pub source: SourceConfig,
    pub dipole: Dipole,
    pub upper: Trajectory,
    pub lower: Trajectory,
    pub lattice: Option<LatticeCase>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub delta: Option<f64>,
    pub fidelity: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

fn sweep_one(template: &SweepTemplate, point: SweepPoint) -> SweepRow {
    let eval = || -> Result<(f64, Option<f64>)> {
        let profile = FluxProfile::new(
            template.source.profile.waveform.clone(),
            point.amplitude,
            point.angular_frequency,
        )?;
        let cfg = SourceConfig::new(template.source.kind, point.radius, profile)?;
        let dipole = Dipole::new(template.dipole.kind, point.moment, point.s, template.dipole.mass)?;
        let delta = two_path_delta(&cfg, &dipole, &template.upper, &template.lower)?;
        let fidelity = match &template.lattice {
            Some(case) => Some(run_gauge_check(&cfg, &dipole, case)?.fidelity),
            None => None,
        };
        Ok((delta, fidelity))
    };
    match eval() {
        Ok((delta, fidelity)) => SweepRow {
            point,
            delta: Some(delta),
            fidelity,
            error: None,
        },
        Err(e) => SweepRow {
            point,
            delta: None,
            fidelity: None,
            error: Some(e.to_string()),
        },
    }
}

/// Evaluates the template on every grid tuple, in parallel, keeping grid
/// order in the output. Failures are recorded on their row.
pub fn sweep(template: &SweepTemplate, grid: &ParameterGrid) -> SweepResult {
    let rows = grid
        .tuples()
        .into_par_iter()
        .map(|p| sweep_one(template, p))
        .collect();
    SweepResult { rows }
}

/// Snapshot gauge function at arbitrary points; re-exported for examples.
pub fn phase_map(
    cfg: &SourceConfig,
    dipole: &Dipole,
    reference: [f64; 2],
    t: f64,
    points: &[[f64; 2]],
) -> Result<Vec<f64>> {
    snapshot_phase_field(cfg, dipole, reference, t, points)
}
