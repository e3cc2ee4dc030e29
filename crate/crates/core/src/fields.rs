//! Source configurations and the fields they produce.
//!
//! Two sources are modelled, both infinitely long and aligned with +ẑ:
//!
//! * a solenoid carrying magnetic flux Φ_B(t), whose changing flux induces an
//!   azimuthal electric field (Faraday, `E_θ = −Φ̇_B / 2πr` outside);
//! * an electric flux tube carrying Φ_E(t), whose changing flux induces an
//!   azimuthal magnetic field (Ampère–Maxwell, `B_θ = +Φ̇_E / 2πr` outside).
//!
//! Fluxes are built from a field amplitude and the source cross-section, so
//! a sinusoidal profile gives `Φ(t) = πa²A sin(wt)`. The exterior induced
//! magnitude at radius r is therefore `a²wA cos(wt) / 2r`.

use std::f64::consts::PI;

use crate::algebra::{Dipole, DipoleKind};
use crate::error::{Error, Result};

/// Flux samples interpolated with a monotone (Fritsch–Carlson) cubic.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxTable {
    times: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl FluxTable {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "flux table has {} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidInput(
                "flux table needs at least two samples".into(),
            ));
        }
        if times.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("flux table entries must be finite".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "flux table times must be strictly increasing".into(),
            ));
        }
        let slopes = pchip_slopes(&times, &values);
        Ok(Self {
            times,
            values,
            slopes,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn span(&self) -> (f64, f64) {
        (self.times[0], self.times[self.times.len() - 1])
    }

    /// Value, first and second derivative of the interpolant.
    pub fn eval(&self, t: f64) -> Result<[f64; 3]> {
        let (start, end) = self.span();
        if !(t >= start && t <= end) {
            return Err(Error::OutsideTable { t, start, end });
        }
        let k = match self.times.partition_point(|&x| x <= t) {
            0 => 0,
            p => (p - 1).min(self.times.len() - 2),
        };
        let h = self.times[k + 1] - self.times[k];
        let u = (t - self.times[k]) / h;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let u2 = u * u;
        let u3 = u2 * u;
        let value = (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * m0
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * m1;
        let d1 = (6.0 * u2 - 6.0 * u) * y0
            + (3.0 * u2 - 4.0 * u + 1.0) * m0
            + (-6.0 * u2 + 6.0 * u) * y1
            + (3.0 * u2 - 2.0 * u) * m1;
        let d2 = (12.0 * u - 6.0) * y0
            + (6.0 * u - 4.0) * m0
            + (-12.0 * u + 6.0) * y1
            + (6.0 * u - 2.0) * m1;
        Ok([value, d1 / h, d2 / (h * h)])
    }
}

fn pchip_slopes(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Waveform {
    /// Φ = πa²A.
    Constant,
    /// Φ = πa²A·w·t, a constant rate equal to the sinusoid's peak rate.
    LinearRamp,
    /// Φ = πa²A·sin(wt).
    Sinusoidal,
    /// Φ = A·table(t); the table holds flux values directly.
    Tabulated(FluxTable),
}

impl Waveform {
    pub fn name(&self) -> &'static str {
        match self {
            Waveform::Constant => "constant",
            Waveform::LinearRamp => "linear_ramp",
            Waveform::Sinusoidal => "sinusoidal",
            Waveform::Tabulated(_) => "tabulated",
        }
    }
}

/// Flux and its first two time derivatives at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxState {
    pub value: f64,
    pub rate: f64,
    pub accel: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FluxProfile {
    pub waveform: Waveform,
    pub amplitude: f64,
    pub angular_frequency: f64,
}

impl FluxProfile {
    pub fn new(waveform: Waveform, amplitude: f64, angular_frequency: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::InvalidInput(format!(
                "amplitude must be finite, got {amplitude}"
            )));
        }
        if !angular_frequency.is_finite() || angular_frequency < 0.0 {
            return Err(Error::InvalidInput(format!(
                "angular frequency must be finite and >= 0, got {angular_frequency}"
            )));
        }
        Ok(Self {
            waveform,
            amplitude,
            angular_frequency,
        })
    }

    pub fn constant(amplitude: f64) -> Result<Self> {
        Self::new(Waveform::Constant, amplitude, 0.0)
    }

    pub fn linear_ramp(amplitude: f64, angular_frequency: f64) -> Result<Self> {
        Self::new(Waveform::LinearRamp, amplitude, angular_frequency)
    }

    pub fn sinusoidal(amplitude: f64, angular_frequency: f64) -> Result<Self> {
        Self::new(Waveform::Sinusoidal, amplitude, angular_frequency)
    }

    pub fn tabulated(table: FluxTable, amplitude: f64) -> Result<Self> {
        Self::new(Waveform::Tabulated(table), amplitude, 0.0)
    }

    pub fn is_sinusoidal(&self) -> bool {
        matches!(self.waveform, Waveform::Sinusoidal)
    }

    /// The same waveform with the amplitude sign reversed.
    pub fn negated(&self) -> Self {
        Self {
            amplitude: -self.amplitude,
            ..self.clone()
        }
    }

    pub fn state(&self, radius: f64, t: f64) -> Result<FluxState> {
        if !t.is_finite() {
            return Err(Error::InvalidInput(format!("time must be finite, got {t}")));
        }
        let area = PI * radius * radius;
        let amp = self.amplitude;
        let w = self.angular_frequency;
        Ok(match &self.waveform {
            Waveform::Constant => FluxState {
                value: area * amp,
                rate: 0.0,
                accel: 0.0,
            },
            Waveform::LinearRamp => FluxState {
                value: area * amp * w * t,
                rate: area * amp * w,
                accel: 0.0,
            },
            Waveform::Sinusoidal => {
                let (sin, cos) = (w * t).sin_cos();
                FluxState {
                    value: area * amp * sin,
                    rate: area * amp * w * cos,
                    accel: -area * amp * w * w * sin,
                }
            }
            Waveform::Tabulated(table) => {
                let [v, d1, d2] = table.eval(t)?;
                FluxState {
                    value: amp * v,
                    rate: amp * d1,
                    accel: amp * d2,
                }
            }
        })
    }
}

/// Flux Φ(t) and its rate dΦ/dt.
pub fn flux(profile: &FluxProfile, radius: f64, t: f64) -> Result<(f64, f64)> {
    let s = profile.state(radius, t)?;
    Ok((s.value, s.rate))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SourceKind {
    MagneticSolenoid,
    ElectricFluxTube,
}

impl SourceKind {
    pub fn name(self) -> &'static str {
        match self {
            SourceKind::MagneticSolenoid => "magnetic_solenoid",
            SourceKind::ElectricFluxTube => "electric_flux_tube",
        }
    }

    pub fn dual(self) -> Self {
        match self {
            SourceKind::MagneticSolenoid => SourceKind::ElectricFluxTube,
            SourceKind::ElectricFluxTube => SourceKind::MagneticSolenoid,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SourceConfig {
    pub kind: SourceKind,
    pub radius: f64,
    pub profile: FluxProfile,
}

impl SourceConfig {
    pub fn new(kind: SourceKind, radius: f64, profile: FluxProfile) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "source radius must be finite and > 0, got {radius}"
            )));
        }
        Ok(Self {
            kind,
            radius,
            profile,
        })
    }

    pub fn flux_state(&self, t: f64) -> Result<FluxState> {
        self.profile.state(self.radius, t)
    }

    pub fn with_profile(&self, profile: FluxProfile) -> Self {
        Self {
            profile,
            ..self.clone()
        }
    }

    /// Errors unless `dipole` couples to this source.
    pub fn check_dipole(&self, dipole: &Dipole) -> Result<()> {
        if dipole.kind.source_kind() == self.kind {
            Ok(())
        } else {
            Err(Error::KindMismatch {
                dipole: dipole.kind.name().into(),
                config: self.kind.name().into(),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct FieldOptions {
    /// Adds the axial field induced by the time derivative of the first
    /// induced field (first iteration only), normalised to vanish at r = a.
    pub second_order: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSample {
    pub position: [f64; 2],
    pub time: f64,
    pub e: [f64; 3],
    pub b: [f64; 3],
}

impl FieldSample {
    pub fn is_finite(&self) -> bool {
        self.e.iter().chain(&self.b).all(|v| v.is_finite())
    }
}

/// Planar confined field: E×ẑ or B×ẑ.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ConfinedField {
    pub x: f64,
    pub y: f64,
}

impl ConfinedField {
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(&self, v: [f64; 2]) -> f64 {
        self.x * v[0] + self.y * v[1]
    }
}

/// Fields of the source at (x, y, t), first order.
pub fn field_at(cfg: &SourceConfig, x: f64, y: f64, t: f64) -> Result<FieldSample> {
    field_at_with(cfg, x, y, t, FieldOptions::default())
}

pub fn field_at_with(
    cfg: &SourceConfig,
    x: f64,
    y: f64,
    t: f64,
    opts: FieldOptions,
) -> Result<FieldSample> {
    if x == 0.0 && y == 0.0 {
        return Err(Error::AtOrigin);
    }
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::InvalidInput(format!(
            "position must be finite, got ({x}, {y})"
        )));
    }
    let state = cfg.flux_state(t)?;
    Ok(sample_from_state(cfg, &state, x, y, t, opts))
}

/// Field evaluation from a precomputed flux state; the axis is handled by
/// continuity (the induced field vanishes there).
pub(crate) fn sample_from_state(
    cfg: &SourceConfig,
    state: &FluxState,
    x: f64,
    y: f64,
    t: f64,
    opts: FieldOptions,
) -> FieldSample {
    let a = cfg.radius;
    let a2 = a * a;
    let r = x.hypot(y);
    let inside = r <= a;
    // Induced azimuthal magnitude with the Faraday sign; the flux tube flips it.
    let faraday = if inside {
        -state.rate * r / (2.0 * PI * a2)
    } else {
        -state.rate / (2.0 * PI * r)
    };
    let (ux, uy) = if r > 0.0 { (-y / r, x / r) } else { (0.0, 0.0) };
    let mut axial = if inside { state.value / (PI * a2) } else { 0.0 };
    if opts.second_order {
        axial += if inside {
            state.accel * (r * r - a2) / (4.0 * PI * a2)
        } else {
            state.accel * (r / a).ln() / (2.0 * PI)
        };
    }
    let (e, b) = match cfg.kind {
        SourceKind::MagneticSolenoid => ([faraday * ux, faraday * uy, 0.0], [0.0, 0.0, axial]),
        SourceKind::ElectricFluxTube => ([0.0, 0.0, axial], [-faraday * ux, -faraday * uy, 0.0]),
    };
    FieldSample {
        position: [x, y],
        time: t,
        e,
        b,
    }
}

/// E×ẑ for the solenoid, B×ẑ for the flux tube.
pub fn confine(sample: &FieldSample, kind: SourceKind) -> ConfinedField {
    let v = match kind {
        SourceKind::MagneticSolenoid => sample.e,
        SourceKind::ElectricFluxTube => sample.b,
    };
    ConfinedField { x: v[1], y: -v[0] }
}

/// Exchanges the solenoid and flux-tube pictures.
///
/// The dipole kind flips (μ ↔ d) with its moment value kept, and the flux
/// changes sign because the map sends B to −E. The resulting fields are
/// (E', B') = (B, −E) in one direction and (−B, E) in the other, so the
/// map is an involution and every vector phase is preserved.
pub fn duality_map(cfg: &SourceConfig, dipole: &Dipole) -> (SourceConfig, Dipole) {
    let kind = match dipole.kind {
        DipoleKind::Magnetic => DipoleKind::Electric,
        DipoleKind::Electric => DipoleKind::Magnetic,
    };
    (
        SourceConfig {
            kind: cfg.kind.dual(),
            radius: cfg.radius,
            profile: cfg.profile.negated(),
        },
        Dipole { kind, ..*dipole },
    )
}
