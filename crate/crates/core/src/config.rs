//! Sectioned key-value run configuration.
//!
//! ```text
//! [source]
//! kind = magnetic_solenoid
//! radius = 1.0
//! waveform = sinusoidal
//! amplitude = 1.0
//! angular_frequency = 1.0
//!
//! [dipole]
//! kind = magnetic
//! moment = 0.1
//! s = 1
//! ```
//!
//! Every key is optional and falls back to the defaults of
//! [`RunConfig::default`]. Unknown sections and keys are errors. Lists are
//! comma separated; timed points are `x y t` triples separated by `;`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::algebra::{Dipole, DipoleKind, SpinLabel};
use crate::dirac::{EvolveConfig, LatticeSpec, Sponge};
use crate::error::{Error, Result};
use crate::experiments::{InterferenceGeometry, LatticeCase, ParameterGrid};
use crate::fields::{FieldOptions, FluxProfile, FluxTable, SourceConfig, SourceKind, Waveform};
use crate::phases::{TimedPoint, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WaveformKind {
    Constant,
    LinearRamp,
    Sinusoidal,
    Tabulated,
}

impl WaveformKind {
    pub fn name(self) -> &'static str {
        match self {
            WaveformKind::Constant => "constant",
            WaveformKind::LinearRamp => "linear_ramp",
            WaveformKind::Sinusoidal => "sinusoidal",
            WaveformKind::Tabulated => "tabulated",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputFormat {
    Csv,
    Binary,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Binary => "binary",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SourceSection {
    pub kind: SourceKind,
    pub radius: f64,
    pub waveform: WaveformKind,
    pub amplitude: f64,
    pub angular_frequency: f64,
    pub table_times: Vec<f64>,
    pub table_values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DipoleSection {
    pub kind: DipoleKind,
    pub moment: f64,
    pub s: SpinLabel,
    pub mass: f64,
}

/// Paths for phase runs, probes for field runs, the single packet for
/// lattice runs and the two-arm layout for interference runs.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometrySection {
    pub upper: Vec<TimedPoint>,
    pub lower: Vec<TimedPoint>,
    pub probe_radii: Vec<f64>,
    pub probe_times: Vec<f64>,
    pub grid: usize,
    pub center: [f64; 2],
    pub packet_center: [f64; 2],
    pub packet_momentum: [f64; 2],
    pub packet_width: f64,
    pub start_time: f64,
    pub screen: [f64; 2],
    pub arm_length: f64,
    pub half_angle: f64,
    pub arm_momentum: f64,
    /// When set, the moment is rescaled so the predicted two-arm phase
    /// equals this value.
    pub target_phase: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericsSection {
    pub dx: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub solver_tolerance: f64,
    pub max_iterations: usize,
    pub energy_reference: f64,
    pub sponge_width: f64,
    pub sponge_strength: f64,
    pub zone_edge_threshold: f64,
    pub second_order: bool,
    pub drop_scalar: bool,
    pub gauge_start: bool,
    pub record_every: usize,
    pub lattice_duality: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSection {
    pub directory: Option<String>,
    pub formats: Vec<OutputFormat>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSection {
    pub radius: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub angular_frequency: Vec<f64>,
    pub moment: Vec<f64>,
    pub spin: Vec<SpinLabel>,
    pub fidelity: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub source: SourceSection,
    pub dipole: DipoleSection,
    pub geometry: GeometrySection,
    pub numerics: NumericsSection,
    pub output: OutputSection,
    pub sweep: SweepSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source: SourceSection {
                kind: SourceKind::MagneticSolenoid,
                radius: 1.0,
                waveform: WaveformKind::Sinusoidal,
                amplitude: 1.0,
                angular_frequency: 1.0,
                table_times: Vec::new(),
                table_values: Vec::new(),
            },
            dipole: DipoleSection {
                kind: DipoleKind::Magnetic,
                moment: 0.1,
                s: SpinLabel::Up,
                mass: 1.0,
            },
            geometry: GeometrySection {
                upper: vec![
                    TimedPoint::new(-3.0, 0.0, 0.0),
                    TimedPoint::new(0.0, 4.0, 1.0),
                    TimedPoint::new(3.0, 0.0, 2.0),
                ],
                lower: vec![
                    TimedPoint::new(-3.0, 0.0, 0.0),
                    TimedPoint::new(0.0, -2.0, 1.0),
                    TimedPoint::new(3.0, 0.0, 2.0),
                ],
                probe_radii: vec![1.5, 2.0, 5.0, 10.0],
                probe_times: vec![0.0, 0.5, 1.0],
                grid: 128,
                center: [0.0, 0.0],
                packet_center: [-5.0, 3.0],
                packet_momentum: [1.0, 0.0],
                packet_width: 1.0,
                start_time: 0.0,
                screen: [15.0, 2.0],
                arm_length: 16.0,
                half_angle: PI / 6.0,
                arm_momentum: 4.0,
                target_phase: None,
            },
            numerics: NumericsSection {
                dx: 0.25,
                dt: 0.05,
                n_steps: 100,
                solver_tolerance: 1e-13,
                max_iterations: 200,
                energy_reference: 0.0,
                sponge_width: 0.1,
                sponge_strength: 2.0,
                zone_edge_threshold: 1e-6,
                second_order: false,
                drop_scalar: true,
                gauge_start: true,
                record_every: 0,
                lattice_duality: false,
            },
            output: OutputSection {
                directory: None,
                formats: vec![OutputFormat::Csv],
            },
            sweep: SweepSection {
                radius: vec![1.0],
                amplitude: vec![1.0],
                angular_frequency: vec![1.0],
                moment: vec![0.1],
                spin: vec![SpinLabel::Up, SpinLabel::Down],
                fidelity: false,
            },
        }
    }
}

const SECTIONS: [&str; 6] = ["source", "dipole", "geometry", "numerics", "output", "sweep"];

struct Entries {
    values: BTreeMap<(String, String), String>,
    errors: Vec<String>,
}

impl Entries {
    fn take(&mut self, section: &str, key: &str) -> Option<String> {
        self.values.remove(&(section.to_string(), key.to_string()))
    }

    fn parse<T>(&mut self, section: &str, key: &str, target: &mut T, f: impl Fn(&str) -> std::result::Result<T, String>) {
        if let Some(raw) = self.take(section, key) {
            match f(raw.trim()) {
                Ok(v) => *target = v,
                Err(e) => self.errors.push(format!("{section}.{key}: {e}")),
            }
        }
    }
}

fn real(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("expected a number, got {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a finite number, got {s:?}"))
    }
}

fn count(s: &str) -> std::result::Result<usize, String> {
    s.parse().map_err(|_| format!("expected a non-negative integer, got {s:?}"))
}

fn flag(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, got {s:?}")),
    }
}

fn reals(s: &str) -> std::result::Result<Vec<f64>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| real(p.trim())).collect()
}

fn pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let v = reals(s)?;
    <[f64; 2]>::try_from(v).map_err(|_| format!("expected two comma-separated numbers, got {s:?}"))
}

fn spin(s: &str) -> std::result::Result<SpinLabel, String> {
    let v: i64 = s.parse().map_err(|_| format!("expected 1 or -1, got {s:?}"))?;
    SpinLabel::try_from(v).map_err(|_| format!("must be 1 or -1, got {v}"))
}

fn spins(s: &str) -> std::result::Result<Vec<SpinLabel>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| spin(p.trim())).collect()
}

fn points(s: &str) -> std::result::Result<Vec<TimedPoint>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|p| {
            let v: Vec<f64> = p.split_whitespace().map(real).collect::<std::result::Result<_, _>>()?;
            match v[..] {
                [x, y, t] => Ok(TimedPoint::new(x, y, t)),
                _ => Err(format!("expected `x y t` triples, got {:?}", p.trim())),
            }
        })
        .collect()
}

fn source_kind(s: &str) -> std::result::Result<SourceKind, String> {
    match s {
        "magnetic_solenoid" => Ok(SourceKind::MagneticSolenoid),
        "electric_flux_tube" => Ok(SourceKind::ElectricFluxTube),
        _ => Err(format!("expected magnetic_solenoid or electric_flux_tube, got {s:?}")),
    }
}

fn dipole_kind(s: &str) -> std::result::Result<DipoleKind, String> {
    match s {
        "magnetic" => Ok(DipoleKind::Magnetic),
        "electric" => Ok(DipoleKind::Electric),
        _ => Err(format!("expected magnetic or electric, got {s:?}")),
    }
}

fn waveform(s: &str) -> std::result::Result<WaveformKind, String> {
    match s {
        "constant" => Ok(WaveformKind::Constant),
        "linear_ramp" => Ok(WaveformKind::LinearRamp),
        "sinusoidal" => Ok(WaveformKind::Sinusoidal),
        "tabulated" => Ok(WaveformKind::Tabulated),
        _ => Err(format!("expected constant, linear_ramp, sinusoidal or tabulated, got {s:?}")),
    }
}

fn formats(s: &str) -> std::result::Result<Vec<OutputFormat>, String> {
    s.split(',')
        .map(|p| match p.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "binary" => Ok(OutputFormat::Binary),
            other => Err(format!("unknown output format {other:?}")),
        })
        .collect()
}

/// Parses and validates a configuration, reporting every problem found.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries = Entries {
        values: BTreeMap::new(),
        errors: Vec::new(),
    };
    let mut section: Option<String> = None;
    let mut known_section = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim_end();
        let trimmed = body.trim_start();
        let indent = body.len() - trimmed.len();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| Error::Syntax {
                line,
                column: body.chars().count() + 1,
                message: "expected `]` closing the section header".into(),
            })?;
            let name = name.trim();
            if let Some(pos) = name.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).or(name.is_empty().then_some(0)) {
                return Err(Error::Syntax {
                    line,
                    column: indent + 2 + pos,
                    message: format!("invalid section name {name:?}"),
                });
            }
            known_section = SECTIONS.contains(&name);
            if !known_section {
                entries.errors.push(format!("unknown section [{name}] (line {line})"));
            }
            section = Some(name.to_string());
            continue;
        }
        let eq = trimmed.find('=').ok_or_else(|| Error::Syntax {
            line,
            column: indent + 1,
            message: "expected `key = value`".into(),
        })?;
        let key = trimmed[..eq].trim_end();
        if let Some(pos) = key.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).or(key.is_empty().then_some(0)) {
            return Err(Error::Syntax {
                line,
                column: indent + 1 + pos,
                message: format!("invalid key {key:?}"),
            });
        }
        let value = trimmed[eq + 1..].trim();
        match &section {
            None => entries.errors.push(format!("key {key:?} appears before any section (line {line})")),
            Some(_) if !known_section => {}
            Some(name) => {
                if entries.values.insert((name.clone(), key.to_string()), value.to_string()).is_some() {
                    entries.errors.push(format!("{name}.{key}: duplicate key (line {line})"));
                }
            }
        }
    }

    let mut c = RunConfig::default();
    let e = &mut entries;
    e.parse("source", "kind", &mut c.source.kind, source_kind);
    e.parse("source", "radius", &mut c.source.radius, real);
    e.parse("source", "waveform", &mut c.source.waveform, waveform);
    e.parse("source", "amplitude", &mut c.source.amplitude, real);
    e.parse("source", "angular_frequency", &mut c.source.angular_frequency, real);
    e.parse("source", "table_times", &mut c.source.table_times, reals);
    e.parse("source", "table_values", &mut c.source.table_values, reals);

    e.parse("dipole", "kind", &mut c.dipole.kind, dipole_kind);
    e.parse("dipole", "moment", &mut c.dipole.moment, real);
    e.parse("dipole", "s", &mut c.dipole.s, spin);
    e.parse("dipole", "mass", &mut c.dipole.mass, real);

    let g = &mut c.geometry;
    e.parse("geometry", "upper", &mut g.upper, points);
    e.parse("geometry", "lower", &mut g.lower, points);
    e.parse("geometry", "probe_radii", &mut g.probe_radii, reals);
    e.parse("geometry", "probe_times", &mut g.probe_times, reals);
    e.parse("geometry", "grid", &mut g.grid, count);
    e.parse("geometry", "center", &mut g.center, pair);
    e.parse("geometry", "packet_center", &mut g.packet_center, pair);
    e.parse("geometry", "packet_momentum", &mut g.packet_momentum, pair);
    e.parse("geometry", "packet_width", &mut g.packet_width, real);
    e.parse("geometry", "start_time", &mut g.start_time, real);
    e.parse("geometry", "screen", &mut g.screen, pair);
    e.parse("geometry", "arm_length", &mut g.arm_length, real);
    e.parse("geometry", "half_angle", &mut g.half_angle, real);
    e.parse("geometry", "arm_momentum", &mut g.arm_momentum, real);
    e.parse("geometry", "target_phase", &mut g.target_phase, |s| real(s).map(Some));

    let n = &mut c.numerics;
    e.parse("numerics", "dx", &mut n.dx, real);
    e.parse("numerics", "dt", &mut n.dt, real);
    e.parse("numerics", "n_steps", &mut n.n_steps, count);
    e.parse("numerics", "solver_tolerance", &mut n.solver_tolerance, real);
    e.parse("numerics", "max_iterations", &mut n.max_iterations, count);
    e.parse("numerics", "energy_reference", &mut n.energy_reference, real);
    e.parse("numerics", "sponge_width", &mut n.sponge_width, real);
    e.parse("numerics", "sponge_strength", &mut n.sponge_strength, real);
    e.parse("numerics", "zone_edge_threshold", &mut n.zone_edge_threshold, real);
    e.parse("numerics", "second_order", &mut n.second_order, flag);
    e.parse("numerics", "drop_scalar", &mut n.drop_scalar, flag);
    e.parse("numerics", "gauge_start", &mut n.gauge_start, flag);
    e.parse("numerics", "record_every", &mut n.record_every, count);
    e.parse("numerics", "lattice_duality", &mut n.lattice_duality, flag);

    e.parse("output", "directory", &mut c.output.directory, |s| Ok(Some(s.to_string())));
    e.parse("output", "formats", &mut c.output.formats, formats);

    let w = &mut c.sweep;
    e.parse("sweep", "radius", &mut w.radius, reals);
    e.parse("sweep", "amplitude", &mut w.amplitude, reals);
    e.parse("sweep", "angular_frequency", &mut w.angular_frequency, reals);
    e.parse("sweep", "moment", &mut w.moment, reals);
    e.parse("sweep", "spin", &mut w.spin, spins);
    e.parse("sweep", "fidelity", &mut w.fidelity, flag);

    let leftover: Vec<String> = entries
        .values
        .keys()
        .map(|(s, k)| format!("{s}.{k}: unknown key"))
        .collect();
    let mut errors = entries.errors;
    errors.extend(leftover);
    errors.extend(c.domain_errors());
    if errors.is_empty() {
        Ok(c)
    } else {
        Err(Error::Validation(errors))
    }
}

fn list<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

fn pts(items: &[TimedPoint]) -> String {
    items
        .iter()
        .map(|p| format!("{:?} {:?} {:?}", p.x, p.y, p.t))
        .collect::<Vec<_>>()
        .join("; ")
}

impl RunConfig {
    /// Renders every key; floats use the shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let s = &self.source;
        let _ = writeln!(out, "[source]");
        let _ = writeln!(out, "kind = {}", s.kind.name());
        let _ = writeln!(out, "radius = {:?}", s.radius);
        let _ = writeln!(out, "waveform = {}", s.waveform.name());
        let _ = writeln!(out, "amplitude = {:?}", s.amplitude);
        let _ = writeln!(out, "angular_frequency = {:?}", s.angular_frequency);
        let _ = writeln!(out, "table_times = {}", list(&s.table_times, |v| format!("{v:?}")));
        let _ = writeln!(out, "table_values = {}", list(&s.table_values, |v| format!("{v:?}")));
        let d = &self.dipole;
        let _ = writeln!(out, "\n[dipole]");
        let _ = writeln!(out, "kind = {}", d.kind.name());
        let _ = writeln!(out, "moment = {:?}", d.moment);
        let _ = writeln!(out, "s = {}", d.s.as_i8());
        let _ = writeln!(out, "mass = {:?}", d.mass);
        let g = &self.geometry;
        let _ = writeln!(out, "\n[geometry]");
        let _ = writeln!(out, "upper = {}", pts(&g.upper));
        let _ = writeln!(out, "lower = {}", pts(&g.lower));
        let _ = writeln!(out, "probe_radii = {}", list(&g.probe_radii, |v| format!("{v:?}")));
        let _ = writeln!(out, "probe_times = {}", list(&g.probe_times, |v| format!("{v:?}")));
        let _ = writeln!(out, "grid = {}", g.grid);
        let _ = writeln!(out, "center = {:?}, {:?}", g.center[0], g.center[1]);
        let _ = writeln!(out, "packet_center = {:?}, {:?}", g.packet_center[0], g.packet_center[1]);
        let _ = writeln!(out, "packet_momentum = {:?}, {:?}", g.packet_momentum[0], g.packet_momentum[1]);
        let _ = writeln!(out, "packet_width = {:?}", g.packet_width);
        let _ = writeln!(out, "start_time = {:?}", g.start_time);
        let _ = writeln!(out, "screen = {:?}, {:?}", g.screen[0], g.screen[1]);
        let _ = writeln!(out, "arm_length = {:?}", g.arm_length);
        let _ = writeln!(out, "half_angle = {:?}", g.half_angle);
        let _ = writeln!(out, "arm_momentum = {:?}", g.arm_momentum);
        if let Some(p) = g.target_phase {
            let _ = writeln!(out, "target_phase = {p:?}");
        }
        let n = &self.numerics;
        let _ = writeln!(out, "\n[numerics]");
        let _ = writeln!(out, "dx = {:?}", n.dx);
        let _ = writeln!(out, "dt = {:?}", n.dt);
        let _ = writeln!(out, "n_steps = {}", n.n_steps);
        let _ = writeln!(out, "solver_tolerance = {:?}", n.solver_tolerance);
        let _ = writeln!(out, "max_iterations = {}", n.max_iterations);
        let _ = writeln!(out, "energy_reference = {:?}", n.energy_reference);
        let _ = writeln!(out, "sponge_width = {:?}", n.sponge_width);
        let _ = writeln!(out, "sponge_strength = {:?}", n.sponge_strength);
        let _ = writeln!(out, "zone_edge_threshold = {:?}", n.zone_edge_threshold);
        let _ = writeln!(out, "second_order = {}", n.second_order);
        let _ = writeln!(out, "drop_scalar = {}", n.drop_scalar);
        let _ = writeln!(out, "gauge_start = {}", n.gauge_start);
        let _ = writeln!(out, "record_every = {}", n.record_every);
        let _ = writeln!(out, "lattice_duality = {}", n.lattice_duality);
        let o = &self.output;
        let _ = writeln!(out, "\n[output]");
        if let Some(dir) = &o.directory {
            let _ = writeln!(out, "directory = {dir}");
        }
        let _ = writeln!(out, "formats = {}", list(&o.formats, |f| f.name().to_string()));
        let w = &self.sweep;
        let _ = writeln!(out, "\n[sweep]");
        let _ = writeln!(out, "radius = {}", list(&w.radius, |v| format!("{v:?}")));
        let _ = writeln!(out, "amplitude = {}", list(&w.amplitude, |v| format!("{v:?}")));
        let _ = writeln!(out, "angular_frequency = {}", list(&w.angular_frequency, |v| format!("{v:?}")));
        let _ = writeln!(out, "moment = {}", list(&w.moment, |v| format!("{v:?}")));
        let _ = writeln!(out, "spin = {}", list(&w.spin, |s| s.as_i8().to_string()));
        let _ = writeln!(out, "fidelity = {}", w.fidelity);
        out
    }

    fn domain_errors(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v > 0.0) {
                errs.push(format!("{name}: must be > 0, got {v}"));
            }
        };
        positive("source.radius", self.source.radius);
        positive("dipole.mass", self.dipole.mass);
        positive("geometry.packet_width", self.geometry.packet_width);
        positive("geometry.arm_length", self.geometry.arm_length);
        positive("geometry.arm_momentum", self.geometry.arm_momentum);
        positive("numerics.dx", self.numerics.dx);
        positive("numerics.dt", self.numerics.dt);
        positive("numerics.solver_tolerance", self.numerics.solver_tolerance);
        positive("numerics.zone_edge_threshold", self.numerics.zone_edge_threshold);
        for (k, r) in self.sweep.radius.iter().enumerate() {
            positive(&format!("sweep.radius[{k}]"), *r);
        }
        if self.dipole.moment < 0.0 {
            errs.push(format!("dipole.moment: must be >= 0, got {}", self.dipole.moment));
        }
        for (k, m) in self.sweep.moment.iter().enumerate() {
            if *m < 0.0 {
                errs.push(format!("sweep.moment[{k}]: must be >= 0, got {m}"));
            }
        }
        if self.source.angular_frequency < 0.0 {
            errs.push(format!(
                "source.angular_frequency: must be >= 0, got {}",
                self.source.angular_frequency
            ));
        }
        if self.dipole.kind.source_kind() != self.source.kind {
            errs.push(format!(
                "dipole.kind: {} does not couple to source.kind {}",
                self.dipole.kind.name(),
                self.source.kind.name()
            ));
        }
        if self.source.waveform == WaveformKind::Tabulated {
            if let Err(e) = FluxTable::new(self.source.table_times.clone(), self.source.table_values.clone()) {
                errs.push(format!("source.table_times: {e}"));
            }
        } else if !self.source.table_times.is_empty() || !self.source.table_values.is_empty() {
            errs.push("source.table_times: only allowed with waveform = tabulated".into());
        }
        let grid = self.geometry.grid;
        if grid < 8 || !grid.is_power_of_two() {
            errs.push(format!("geometry.grid: must be a power of two >= 8, got {grid}"));
        }
        if !(self.numerics.sponge_width > 0.0 && self.numerics.sponge_width < 0.5) {
            errs.push(format!("numerics.sponge_width: must lie in (0, 0.5), got {}", self.numerics.sponge_width));
        }
        if self.numerics.sponge_strength < 0.0 {
            errs.push(format!("numerics.sponge_strength: must be >= 0, got {}", self.numerics.sponge_strength));
        }
        if self.numerics.max_iterations == 0 {
            errs.push("numerics.max_iterations: must be >= 1".into());
        }
        if self.output.formats.is_empty() {
            errs.push("output.formats: at least one format is required".into());
        }
        for (name, len) in [
            ("sweep.radius", self.sweep.radius.len()),
            ("sweep.amplitude", self.sweep.amplitude.len()),
            ("sweep.angular_frequency", self.sweep.angular_frequency.len()),
            ("sweep.moment", self.sweep.moment.len()),
            ("sweep.spin", self.sweep.spin.len()),
        ] {
            if len == 0 {
                errs.push(format!("{name}: needs at least one value"));
            }
        }
        errs
    }

    pub fn flux_profile(&self) -> Result<FluxProfile> {
        let s = &self.source;
        match s.waveform {
            WaveformKind::Constant => FluxProfile::constant(s.amplitude),
            WaveformKind::LinearRamp => FluxProfile::linear_ramp(s.amplitude, s.angular_frequency),
            WaveformKind::Sinusoidal => FluxProfile::sinusoidal(s.amplitude, s.angular_frequency),
            WaveformKind::Tabulated => FluxProfile::new(
                Waveform::Tabulated(FluxTable::new(s.table_times.clone(), s.table_values.clone())?),
                s.amplitude,
                s.angular_frequency,
            ),
        }
    }

    pub fn source_config(&self) -> Result<SourceConfig> {
        SourceConfig::new(self.source.kind, self.source.radius, self.flux_profile()?)
    }

    pub fn dipole(&self) -> Result<Dipole> {
        let d = &self.dipole;
        Dipole::new(d.kind, d.moment, d.s, d.mass)
    }

    pub fn trajectories(&self) -> Result<(Trajectory, Trajectory)> {
        Ok((
            Trajectory::new(self.geometry.upper.clone())?,
            Trajectory::new(self.geometry.lower.clone())?,
        ))
    }

    pub fn lattice(&self) -> Result<LatticeSpec> {
        let g = &self.geometry;
        LatticeSpec::new(g.grid, g.grid, self.numerics.dx, g.center, self.source.radius)
    }

    pub fn evolve_config(&self) -> EvolveConfig {
        let n = &self.numerics;
        let mut ec = EvolveConfig::new(n.dt, n.n_steps);
        ec.solver_tolerance = n.solver_tolerance;
        ec.max_iterations = n.max_iterations;
        ec.energy_reference = n.energy_reference;
        ec.sponge = Sponge {
            width_fraction: n.sponge_width,
            strength: n.sponge_strength,
        };
        ec.zone_edge_threshold = n.zone_edge_threshold;
        ec.field_options = FieldOptions {
            second_order: n.second_order,
        };
        ec.record_every = n.record_every;
        ec
    }

    pub fn lattice_case(&self) -> Result<LatticeCase> {
        let g = &self.geometry;
        Ok(LatticeCase {
            label: "packet".into(),
            lattice: self.lattice()?,
            center: g.packet_center,
            momentum: g.packet_momentum,
            width: g.packet_width,
            start_time: g.start_time,
            evolve: self.evolve_config(),
            gauge_start: self.numerics.gauge_start,
        })
    }

    pub fn interference_geometry(&self) -> Result<InterferenceGeometry> {
        let g = &self.geometry;
        let mut geo = InterferenceGeometry::symmetric(
            g.screen,
            g.arm_length,
            g.half_angle,
            g.packet_width,
            g.arm_momentum,
            g.grid,
            self.numerics.dx,
            self.source.radius,
        )?;
        geo.launch_time = g.start_time;
        Ok(geo)
    }

    pub fn parameter_grid(&self) -> ParameterGrid {
        let w = &self.sweep;
        ParameterGrid {
            radius: w.radius.clone(),
            amplitude: w.amplitude.clone(),
            angular_frequency: w.angular_frequency.clone(),
            moment: w.moment.clone(),
            spin: w.spin.clone(),
        }
    }
}
