//! Gauge functions, scalar phases and two-path phase differences.
//!
//! The vector phase along a curve is `−s·moment·∫ C̃·dl`, where C̃ is the
//! confined field (E×ẑ for the solenoid, B×ẑ for the flux tube). Snapshot
//! paths freeze the field at one instant; timed trajectories evaluate it at
//! the time each point is visited.
//!
//! Outside the source the confined field is radial and equals
//! `∓Φ̇/(2πr) r̂`, so a radial segment picks up `±s·moment·Φ̇·ln(r₂/r₁)/2π`.
//! That logarithm is why the phase is often written as a power r^{iX}.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::{Dipole, DipoleKind};
use crate::error::{Error, Result};
use crate::fields::{confine, sample_from_state, FieldOptions, SourceConfig, SourceKind};
use crate::quadrature;

/// Absolute tolerance for each segment quadrature.
pub const QUAD_TOL: f64 = 1e-10;
/// Spacetime tolerance for shared endpoints in [`two_path_delta`].
pub const ENDPOINT_TOL: f64 = 1e-9;

/// Polyline evaluated at a single instant.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialPath {
    vertices: Vec<[f64; 2]>,
    pub t_eval: f64,
    pub closed: bool,
}

impl SpatialPath {
    pub fn new(vertices: Vec<[f64; 2]>, t_eval: f64, closed: bool) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidInput("a path needs at least two vertices".into()));
        }
        if !t_eval.is_finite() || vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("path coordinates must be finite".into()));
        }
        if vertices.iter().any(|v| v[0] == 0.0 && v[1] == 0.0) {
            return Err(Error::InvalidInput("path vertex at the origin".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("consecutive path vertices coincide".into()));
        }
        if closed && vertices.first() == vertices.last() {
            return Err(Error::InvalidInput(
                "closed paths repeat the first vertex implicitly".into(),
            ));
        }
        Ok(Self {
            vertices,
            t_eval,
            closed,
        })
    }

    /// Closed polygon approximating the centered circle of radius r.
    pub fn circle(radius: f64, sides: usize, t_eval: f64) -> Result<Self> {
        let sides = sides.max(3);
        let vertices = (0..sides)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / sides as f64;
                [radius * th.cos(), radius * th.sin()]
            })
            .collect();
        Self::new(vertices, t_eval, true)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// The same path traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        if self.closed {
            vertices[1..].reverse();
        } else {
            vertices.reverse();
        }
        Self {
            vertices,
            ..self.clone()
        }
    }

    fn segments(&self) -> Vec<Segment> {
        let mut pts = self.vertices.clone();
        if self.closed {
            pts.push(self.vertices[0]);
        }
        pts.windows(2)
            .map(|w| Segment {
                from: w[0],
                to: w[1],
                t_from: self.t_eval,
                t_to: self.t_eval,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimedPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl TimedPoint {
    pub fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }

    fn gap(&self, other: &Self) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.t - other.t).abs())
    }
}

/// Piecewise-linear motion through timed samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    samples: Vec<TimedPoint>,
}

impl Trajectory {
    pub fn new(samples: Vec<TimedPoint>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput(
                "a trajectory needs at least two samples".into(),
            ));
        }
        if samples
            .iter()
            .any(|p| !(p.x.is_finite() && p.y.is_finite() && p.t.is_finite()))
        {
            return Err(Error::InvalidInput("trajectory samples must be finite".into()));
        }
        if samples.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::InvalidInput(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        Ok(Self { samples })
    }

    /// Uniform circular motion about the axis from angle θ₀ to θ₁.
    pub fn arc(radius: f64, theta0: f64, theta1: f64, t0: f64, t1: f64, pieces: usize) -> Result<Self> {
        let n = pieces.max(1);
        let samples = (0..=n)
            .map(|k| {
                let u = k as f64 / n as f64;
                let th = theta0 + u * (theta1 - theta0);
                TimedPoint::new(radius * th.cos(), radius * th.sin(), t0 + u * (t1 - t0))
            })
            .collect();
        Self::new(samples)
    }

    pub fn samples(&self) -> &[TimedPoint] {
        &self.samples
    }

    pub fn start(&self) -> TimedPoint {
        self.samples[0]
    }

    pub fn end(&self) -> TimedPoint {
        self.samples[self.samples.len() - 1]
    }

    fn segments(&self) -> Vec<Segment> {
        self.samples
            .windows(2)
            .map(|w| Segment {
                from: [w[0].x, w[0].y],
                to: [w[1].x, w[1].y],
                t_from: w[0].t,
                t_to: w[1].t,
            })
            .collect()
    }
}

/// A curve to integrate along: frozen in time or timed.
#[derive(Clone, Copy, Debug)]
pub enum Contour<'a> {
    Snapshot(&'a SpatialPath),
    Timed(&'a Trajectory),
}

impl<'a> From<&'a SpatialPath> for Contour<'a> {
    fn from(p: &'a SpatialPath) -> Self {
        Contour::Snapshot(p)
    }
}

impl<'a> From<&'a Trajectory> for Contour<'a> {
    fn from(t: &'a Trajectory) -> Self {
        Contour::Timed(t)
    }
}

impl Contour<'_> {
    fn segments(&self) -> Vec<Segment> {
        match self {
            Contour::Snapshot(p) => p.segments(),
            Contour::Timed(t) => t.segments(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    from: [f64; 2],
    to: [f64; 2],
    t_from: f64,
    t_to: f64,
}

impl Segment {
    fn closest_approach(&self) -> f64 {
        let d = [self.to[0] - self.from[0], self.to[1] - self.from[1]];
        let len2 = d[0] * d[0] + d[1] * d[1];
        let u = if len2 > 0.0 {
            (-(self.from[0] * d[0] + self.from[1] * d[1]) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        (self.from[0] + u * d[0]).hypot(self.from[1] + u * d[1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PhaseBreakdown {
    pub vector_phase: f64,
    pub scalar_phase: f64,
    pub total: f64,
}

impl PhaseBreakdown {
    pub fn new(vector_phase: f64, scalar_phase: f64) -> Self {
        Self {
            vector_phase,
            scalar_phase,
            total: vector_phase + scalar_phase,
        }
    }
}

fn confined_line_integral(cfg: &SourceConfig, contour: Contour<'_>) -> Result<f64> {
    let mut total = 0.0;
    for seg in contour.segments() {
        let r = seg.closest_approach();
        if r <= cfg.radius {
            return Err(Error::EntersSource {
                r,
                radius: cfg.radius,
            });
        }
        let d = [seg.to[0] - seg.from[0], seg.to[1] - seg.from[1]];
        let frozen = seg.t_from == seg.t_to;
        let state0 = if frozen { Some(cfg.flux_state(seg.t_from)?) } else { None };
        let mut failure = None;
        let est = quadrature::integrate(
            |u| {
                let x = seg.from[0] + u * d[0];
                let y = seg.from[1] + u * d[1];
                let t = seg.t_from + u * (seg.t_to - seg.t_from);
                let state = match state0 {
                    Some(s) => s,
                    None => match cfg.flux_state(t) {
                        Ok(s) => s,
                        Err(e) => {
                            failure.get_or_insert(e);
                            return 0.0;
                        }
                    },
                };
                let sample = sample_from_state(cfg, &state, x, y, t, FieldOptions::default());
                confine(&sample, cfg.kind).dot(d)
            },
            0.0,
            1.0,
            QUAD_TOL,
            quadrature::MAX_SUBDIVISIONS,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        total += est.value;
    }
    Ok(total)
}

/// χ (solenoid) or ξ (flux tube) accumulated along a contour.
pub fn vector_phase<'a>(
    cfg: &SourceConfig,
    dipole: &Dipole,
    path: impl Into<Contour<'a>>,
) -> Result<f64> {
    cfg.check_dipole(dipole)?;
    let integral = confined_line_integral(cfg, path.into())?;
    Ok(-dipole.s.sign() * dipole.moment * integral)
}

/// ∫ μB_z dt (solenoid) or −∫ dE_z dt (flux tube) along a timed trajectory.
///
/// Outside the source only the second-order induced axial field contributes.
pub fn scalar_phase(
    cfg: &SourceConfig,
    dipole: &Dipole,
    traj: &Trajectory,
    include_second_order: bool,
) -> Result<f64> {
    cfg.check_dipole(dipole)?;
    let opts = FieldOptions {
        second_order: include_second_order,
    };
    let sign = match dipole.kind {
        DipoleKind::Magnetic => 1.0,
        DipoleKind::Electric => -1.0,
    };
    let mut total = 0.0;
    for seg in traj.segments() {
        let dt = seg.t_to - seg.t_from;
        let mut failure = None;
        let est = quadrature::integrate(
            |u| {
                let x = seg.from[0] + u * (seg.to[0] - seg.from[0]);
                let y = seg.from[1] + u * (seg.to[1] - seg.from[1]);
                let t = seg.t_from + u * dt;
                let state = match cfg.flux_state(t) {
                    Ok(s) => s,
                    Err(e) => {
                        failure.get_or_insert(e);
                        return 0.0;
                    }
                };
                let f = sample_from_state(cfg, &state, x, y, t, opts);
                match cfg.kind {
                    SourceKind::MagneticSolenoid => f.b[2],
                    SourceKind::ElectricFluxTube => f.e[2],
                }
            },
            0.0,
            1.0,
            QUAD_TOL,
            quadrature::MAX_SUBDIVISIONS,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        total += est.value * dt;
    }
    Ok(sign * dipole.moment * total)
}

/// Vector and scalar phase of one trajectory, summed in one place.
pub fn phase_breakdown(
    cfg: &SourceConfig,
    dipole: &Dipole,
    traj: &Trajectory,
    include_second_order: bool,
) -> Result<PhaseBreakdown> {
    let v = vector_phase(cfg, dipole, traj)?;
    let s = scalar_phase(cfg, dipole, traj, include_second_order)?;
    Ok(PhaseBreakdown::new(v, s))
}

/// Analytic radial-segment phase for a sinusoidal source.
///
/// Solenoid: `s·μ·Φ̇_B·ln(r_to/r_from)/2π`. The flux tube's induced field
/// has the opposite orientation, so it gives `−s·d·Φ̇_E·ln(r_to/r_from)/2π`.
pub fn closed_form_sinusoidal(
    cfg: &SourceConfig,
    dipole: &Dipole,
    r_from: f64,
    r_to: f64,
    t: f64,
) -> Result<f64> {
    if !cfg.profile.is_sinusoidal() {
        return Err(Error::NotSinusoidal);
    }
    cfg.check_dipole(dipole)?;
    for r in [r_from, r_to] {
        if !(r > cfg.radius) {
            return Err(Error::EntersSource {
                r,
                radius: cfg.radius,
            });
        }
    }
    let rate = cfg.flux_state(t)?.rate;
    let orientation = match cfg.kind {
        SourceKind::MagneticSolenoid => 1.0,
        SourceKind::ElectricFluxTube => -1.0,
    };
    Ok(orientation * dipole.s.sign() * dipole.moment * rate * (r_to / r_from).ln() / (2.0 * PI))
}

/// e^{i·total}, or e^{i·vector_phase} with the scalar part dropped.
pub fn phase_factor(breakdown: &PhaseBreakdown, drop_scalar: bool) -> Complex64 {
    let phase = if drop_scalar {
        breakdown.vector_phase
    } else {
        breakdown.total
    };
    Complex64::from_polar(1.0, phase)
}

/// Predicted fringe shift between two arms sharing both spacetime endpoints.
pub fn two_path_delta(
    cfg: &SourceConfig,
    dipole: &Dipole,
    upper: &Trajectory,
    lower: &Trajectory,
) -> Result<f64> {
    let gap = upper
        .start()
        .gap(&lower.start())
        .max(upper.end().gap(&lower.end()));
    if gap > ENDPOINT_TOL {
        return Err(Error::EndpointMismatch {
            gap,
            tol: ENDPOINT_TOL,
        });
    }
    Ok(vector_phase(cfg, dipole, upper)? - vector_phase(cfg, dipole, lower)?)
}

/// Polyline from `from` to `to` that keeps clear of the disk r ≤ radius.
///
/// Straight when the chord clears the disk; otherwise it leaves radially to
/// a safe radius, follows a polygonal arc and comes back in radially.
pub fn route_around_source(from: [f64; 2], to: [f64; 2], radius: f64) -> Vec<[f64; 2]> {
    let chord = Segment {
        from,
        to,
        t_from: 0.0,
        t_to: 0.0,
    };
    if from == to {
        return vec![from];
    }
    if chord.closest_approach() > 1.05 * radius {
        return vec![from, to];
    }
    let r0 = from[0].hypot(from[1]);
    let r1 = to[0].hypot(to[1]);
    let rho = r0.max(r1).max(1.5 * radius);
    let th0 = from[1].atan2(from[0]);
    let th1 = to[1].atan2(to[0]);
    let mut sweep = th1 - th0;
    if sweep > PI {
        sweep -= 2.0 * PI;
    } else if sweep <= -PI {
        sweep += 2.0 * PI;
    }
    let steps = ((sweep.abs() / (PI / 8.0)).ceil() as usize).max(1);
    let mut out = vec![from];
    let mut push = |p: [f64; 2]| {
        if out.last() != Some(&p) {
            out.push(p);
        }
    };
    for k in 0..=steps {
        let th = th0 + sweep * k as f64 / steps as f64;
        push([rho * th.cos(), rho * th.sin()]);
    }
    push(to);
    out
}

/// Snapshot gauge function χ(p, t) − χ(reference, t) at each point.
///
/// Points inside the source take the value at the rim along their ray.
pub fn snapshot_phase_field(
    cfg: &SourceConfig,
    dipole: &Dipole,
    reference: [f64; 2],
    t: f64,
    points: &[[f64; 2]],
) -> Result<Vec<f64>> {
    cfg.check_dipole(dipole)?;
    let rim = cfg.radius * (1.0 + 1e-9);
    let clamp = |p: [f64; 2]| -> [f64; 2] {
        let r = p[0].hypot(p[1]);
        if r > rim {
            p
        } else if r == 0.0 {
            [rim, 0.0]
        } else {
            [p[0] * rim / r, p[1] * rim / r]
        }
    };
    let reference = clamp(reference);
    points
        .iter()
        .map(|&p| {
            let target = clamp(p);
            let route = route_around_source(reference, target, cfg.radius);
            if route.len() < 2 {
                return Ok(0.0);
            }
            let path = SpatialPath::new(route, t, false)?;
            vector_phase(cfg, dipole, &path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::SpinLabel;
    use crate::fields::{duality_map, field_at_with, FluxProfile};

    fn worked() -> (SourceConfig, Dipole) {
        (
            SourceConfig::new(
                SourceKind::MagneticSolenoid,
                1.0,
                FluxProfile::sinusoidal(1.0, 1.0).unwrap(),
            )
            .unwrap(),
            Dipole::magnetic(0.1, SpinLabel::Up, 1.0).unwrap(),
        )
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let n = panels + panels % 2;
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + k as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn worked_radial_segment() {
        let (cfg, mu) = worked();
        let path = SpatialPath::new(vec![[1.5, 0.0], [3.0, 0.0]], 0.0, false).unwrap();
        let chi = vector_phase(&cfg, &mu, &path).unwrap();
        // Ẽ_r = −1/(2r) on the positive x axis at t = 0.
        let oracle = -0.1 * simpson(|r| -1.0 / (2.0 * r), 1.5, 3.0, 1_000_000);
        assert!((chi - oracle).abs() < 1e-12);
        assert!((chi - 0.05 * 2f64.ln()).abs() < 1e-12);
        let closed = closed_form_sinusoidal(&cfg, &mu, 1.5, 3.0, 0.0).unwrap();
        assert!((closed - chi).abs() < 1e-8 * chi.abs());
    }

    #[test]
    fn zero_rate_gives_zero() {
        let (cfg, mu) = worked();
        let path = SpatialPath::new(vec![[1.5, 0.0], [3.0, 2.0], [-2.0, 4.0]], PI / 2.0, false).unwrap();
        assert!(vector_phase(&cfg, &mu, &path).unwrap().abs() < 1e-15);
    }

    #[test]
    fn centered_circle_gives_zero() {
        let (cfg, mu) = worked();
        for r in [1.5, 4.0] {
            let path = SpatialPath::circle(r, 64, 0.3).unwrap();
            assert!(vector_phase(&cfg, &mu, &path).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn entering_source_is_rejected() {
        let (cfg, mu) = worked();
        let path = SpatialPath::new(vec![[-3.0, 0.5], [3.0, 0.5]], 0.0, false).unwrap();
        assert!(matches!(
            vector_phase(&cfg, &mu, &path),
            Err(Error::EntersSource { .. })
        ));
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let (cfg, _) = worked();
        let d = Dipole::electric(0.1, SpinLabel::Up, 1.0).unwrap();
        let path = SpatialPath::new(vec![[1.5, 0.0], [3.0, 0.0]], 0.0, false).unwrap();
        assert!(matches!(
            vector_phase(&cfg, &d, &path),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn closed_form_edge_cases() {
        let (cfg, mu) = worked();
        assert_eq!(closed_form_sinusoidal(&cfg, &mu, 2.0, 2.0, 0.4).unwrap(), 0.0);
        assert!(closed_form_sinusoidal(&cfg, &mu, 2.0, 5.0, PI / 2.0).unwrap().abs() < 1e-16);
        let ramp = cfg.with_profile(FluxProfile::linear_ramp(1.0, 1.0).unwrap());
        assert_eq!(
            closed_form_sinusoidal(&ramp, &mu, 2.0, 3.0, 0.0),
            Err(Error::NotSinusoidal)
        );
    }

    #[test]
    fn electric_closed_form_matches_quadrature() {
        let (cfg, mu) = worked();
        let (dcfg, d) = duality_map(&cfg, &mu);
        let path = SpatialPath::new(vec![[0.0, 1.5], [0.0, 4.0]], 0.7, false).unwrap();
        let q = vector_phase(&dcfg, &d, &path).unwrap();
        let c = closed_form_sinusoidal(&dcfg, &d, 1.5, 4.0, 0.7).unwrap();
        assert!((q - c).abs() < 1e-8 * c.abs());
    }

    #[test]
    fn scalar_phase_first_order_exterior_is_zero() {
        let (cfg, mu) = worked();
        let traj = Trajectory::arc(2.0, 0.0, PI, 0.0, 3.0, 16).unwrap();
        assert_eq!(scalar_phase(&cfg, &mu, &traj, false).unwrap(), 0.0);
        let constant = cfg.with_profile(FluxProfile::constant(1.0).unwrap());
        assert_eq!(scalar_phase(&constant, &mu, &traj, true).unwrap(), 0.0);
    }

    #[test]
    fn scalar_phase_matches_trapezoid() {
        let (cfg, mu) = worked();
        let (r, t1, pieces) = (2.5, 2.0, 32);
        let traj = Trajectory::arc(r, 0.0, 2.0 * PI, 0.0, t1, pieces).unwrap();
        let got = scalar_phase(&cfg, &mu, &traj, true).unwrap();
        let on = FieldOptions { second_order: true };
        let at = |t: f64| {
            let k = ((t / t1 * pieces as f64) as usize).min(pieces - 1);
            let s = traj.samples();
            let u = (t - s[k].t) / (s[k + 1].t - s[k].t);
            let x = s[k].x + u * (s[k + 1].x - s[k].x);
            let y = s[k].y + u * (s[k + 1].y - s[k].y);
            0.1 * field_at_with(&cfg, x, y, t, on).unwrap().b[2]
        };
        let n = 400_000;
        let h = t1 / n as f64;
        let mut trap = 0.5 * (at(0.0) + at(t1));
        for k in 1..n {
            trap += at(k as f64 * h);
        }
        trap *= h;
        assert!(got.abs() > 1e-3);
        assert!((got - trap).abs() < 1e-8, "{got} {trap}");
    }

    #[test]
    fn phase_factor_cases() {
        assert_eq!(phase_factor(&PhaseBreakdown::default(), false), Complex64::new(1.0, 0.0));
        let b = PhaseBreakdown::new(PI, 0.3);
        let z = phase_factor(&b, true);
        assert!((z - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(b.total, PI + 0.3);
    }

    #[test]
    fn static_field_is_path_independent() {
        let (cfg, mu) = worked();
        let ramp = cfg.with_profile(FluxProfile::linear_ramp(1.0, 1.0).unwrap());
        let upper = Trajectory::arc(3.0, PI, 0.0, 0.0, 5.0, 24).unwrap();
        let lower = Trajectory::arc(3.0, -PI, 0.0, 0.0, 5.0, 24).unwrap();
        let d = two_path_delta(&ramp, &mu, &upper, &lower).unwrap();
        assert!(d.abs() < 1e-10);
    }

    #[test]
    fn endpoint_mismatch() {
        let (cfg, mu) = worked();
        let upper = Trajectory::arc(3.0, PI, 0.0, 0.0, 5.0, 8).unwrap();
        let lower = Trajectory::arc(3.0, -PI, 0.0, 0.0, 5.1, 8).unwrap();
        assert!(matches!(
            two_path_delta(&cfg, &mu, &upper, &lower),
            Err(Error::EndpointMismatch { .. })
        ));
    }

    #[test]
    fn routes_avoid_the_disk() {
        let route = route_around_source([-3.0, 0.1], [3.0, -0.1], 1.0);
        assert!(route.len() > 2);
        let path = SpatialPath::new(route, 0.0, false).unwrap();
        for seg in path.segments() {
            assert!(seg.closest_approach() > 1.0);
        }
    }

    #[test]
    fn phase_field_gradient_matches_field() {
        let (cfg, mu) = worked();
        let t = 0.2;
        let h = 1e-4;
        let p = [2.0, 1.5];
        let pts = [[p[0] + h, p[1]], [p[0] - h, p[1]], [p[0], p[1] + h], [p[0], p[1] - h]];
        let chi = snapshot_phase_field(&cfg, &mu, [-2.5, -2.0], t, &pts).unwrap();
        let gx = (chi[0] - chi[1]) / (2.0 * h);
        let gy = (chi[2] - chi[3]) / (2.0 * h);
        let f = crate::fields::field_at(&cfg, p[0], p[1], t).unwrap();
        let c = confine(&f, cfg.kind);
        let ex = -0.1 * c.x;
        let ey = -0.1 * c.y;
        let scale = ex.hypot(ey);
        assert!((gx - ex).abs() < 1e-4 * scale && (gy - ey).abs() < 1e-4 * scale);
    }
}
