//! Planar Dirac evolution on a periodic lattice.
//!
//! Momenta are applied pseudospectrally (the Nyquist mode is assigned zero
//! momentum). Time stepping is Crank–Nicolson with the Hamiltonian evaluated
//! at the step midpoint:
//!
//! ```text
//! (1 + i·dt/2·H(t+dt/2)) ψ(t+dt) = (1 − i·dt/2·H(t+dt/2)) ψ(t)
//! ```
//!
//! The implicit solve splits H into its free part, which is diagonal in
//! k-space and inverted exactly mode by mode, and the pointwise interaction
//! plus sponge, handled by fixed-point iteration. Each iterate's true
//! residual is `i·dt/2·Δ(x_{k+1} − x_k)`, so convergence is measured on the
//! linear system itself.
//!
//! An optional energy reference E_s replaces H by H − E_s. In exact
//! evolution that is a global phase; for Crank–Nicolson it moves the
//! expansion point so heavy particles do not pay the phase error of their
//! rest energy.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::algebra::{interaction_matrix, Dipole, GammaRep, Matrix2C};
use crate::error::{Error, Result};
use crate::fields::{sample_from_state, FieldOptions, SourceConfig};
use crate::phases::snapshot_phase_field;

type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Periodic grid. Site (i, j) sits at
/// `(center_x + (i − nx/2)·dx, center_y + (j − ny/2)·dx)` and is stored at
/// index `j·nx + i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSpec {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub center: [f64; 2],
    pub source_radius: f64,
}

impl LatticeSpec {
    pub fn new(nx: usize, ny: usize, dx: f64, center: [f64; 2], source_radius: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::InvalidInput(format!(
                    "{name} must be a power of two >= 8, got {n}"
                )));
            }
        }
        if !dx.is_finite() || dx <= 0.0 {
            return Err(Error::InvalidInput(format!("dx must be finite and > 0, got {dx}")));
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidInput("lattice center must be finite".into()));
        }
        if !source_radius.is_finite() || source_radius <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "source radius must be finite and > 0, got {source_radius}"
            )));
        }
        let spec = Self {
            nx,
            ny,
            dx,
            center,
            source_radius,
        };
        let [x0, y0, x1, y1] = spec.bounds();
        let a = source_radius;
        if !(x0 < -a && x1 > a && y0 < -a && y1 > a) {
            return Err(Error::InvalidInput(format!(
                "domain [{x0}, {x1}] x [{y0}, {y1}] does not contain the source disk of radius {a}"
            )));
        }
        Ok(spec)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        self.center[0] + (i as f64 - (self.nx / 2) as f64) * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.center[1] + (j as f64 - (self.ny / 2) as f64) * self.dx
    }

    pub fn position(&self, idx: usize) -> [f64; 2] {
        [self.x(idx % self.nx), self.y(idx / self.nx)]
    }

    /// `[x_min, y_min, x_max, y_max]` of the sampled sites.
    pub fn bounds(&self) -> [f64; 4] {
        [self.x(0), self.y(0), self.x(self.nx - 1), self.y(self.ny - 1)]
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dx
    }

    /// Band limit imposed on packet momenta, π/(4dx).
    pub fn momentum_limit(&self) -> f64 {
        PI / (4.0 * self.dx)
    }

    /// Angular wavenumbers with the Nyquist entry set to zero.
    pub fn wavenumbers(n: usize, dx: f64) -> Vec<f64> {
        let scale = 2.0 * PI / (n as f64 * dx);
        (0..n)
            .map(|i| {
                if i < n / 2 {
                    i as f64 * scale
                } else if i == n / 2 {
                    0.0
                } else {
                    (i as f64 - n as f64) * scale
                }
            })
            .collect()
    }

    pub fn kx(&self) -> Vec<f64> {
        Self::wavenumbers(self.nx, self.dx)
    }

    pub fn ky(&self) -> Vec<f64> {
        Self::wavenumbers(self.ny, self.dx)
    }

    /// Column index whose x coordinate equals `x` to within 1e−9·dx.
    pub fn column_at(&self, x: f64) -> Option<usize> {
        let i = ((x - self.center[0]) / self.dx + (self.nx / 2) as f64).round();
        if i < 0.0 || i >= self.nx as f64 {
            return None;
        }
        let i = i as usize;
        ((self.x(i) - x).abs() <= 1e-9 * self.dx).then_some(i)
    }

    pub fn row_at(&self, y: f64) -> Option<usize> {
        let j = ((y - self.center[1]) / self.dx + (self.ny / 2) as f64).round();
        if j < 0.0 || j >= self.ny as f64 {
            return None;
        }
        let j = j as usize;
        ((self.y(j) - y).abs() <= 1e-9 * self.dx).then_some(j)
    }
}

/// Two-component spinor sampled on a lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField {
    pub spec: LatticeSpec,
    pub t: f64,
    pub upper: Vec<C64>,
    pub lower: Vec<C64>,
}

impl SpinorField {
    pub fn zeros(spec: LatticeSpec, t: f64) -> Self {
        Self {
            spec,
            t,
            upper: vec![ZERO; spec.len()],
            lower: vec![ZERO; spec.len()],
        }
    }

    pub fn components(&self) -> [&[C64]; 2] {
        [&self.upper, &self.lower]
    }

    /// ‖ψ‖² = Σ (|ψ₁|² + |ψ₂|²) dx².
    pub fn norm_sqr(&self) -> f64 {
        let s: f64 = self
            .upper
            .iter()
            .chain(&self.lower)
            .map(|z| z.norm_sqr())
            .sum();
        s * self.spec.cell_area()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// ⟨self, other⟩ with the conjugate on `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        let mut acc = ZERO;
        for (a, b) in self.upper.iter().zip(&other.upper) {
            acc += a.conj() * b;
        }
        for (a, b) in self.lower.iter().zip(&other.lower) {
            acc += a.conj() * b;
        }
        acc * self.spec.cell_area()
    }

    pub fn scale(&mut self, z: C64) {
        for v in self.upper.iter_mut().chain(self.lower.iter_mut()) {
            *v *= z;
        }
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidInput("cannot normalize a zero or non-finite state".into()));
        }
        self.scale(C64::new(1.0 / n, 0.0));
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.upper.iter_mut().zip(&other.upper) {
            *a += b;
        }
        for (a, b) in self.lower.iter_mut().zip(&other.lower) {
            *a += b;
        }
    }

    /// Multiplies site k by e^{i·phase[k]}.
    pub fn apply_phase(&mut self, phase: &[f64]) {
        for (k, p) in phase.iter().enumerate() {
            let z = C64::from_polar(1.0, *p);
            self.upper[k] *= z;
            self.lower[k] *= z;
        }
    }

    pub fn density(&self) -> Vec<f64> {
        self.upper
            .iter()
            .zip(&self.lower)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect()
    }

    /// Probability-weighted mean position.
    pub fn mean_position(&self) -> [f64; 2] {
        let rho = self.density();
        let total: f64 = rho.iter().sum();
        let mut m = [0.0; 2];
        for (k, w) in rho.iter().enumerate() {
            let p = self.spec.position(k);
            m[0] += w * p[0];
            m[1] += w * p[1];
        }
        [m[0] / total, m[1] / total]
    }

    /// Mirror image under y → 2·center_y − y on the periodic grid.
    pub fn reflect_y(&self) -> Self {
        let (nx, ny) = (self.spec.nx, self.spec.ny);
        let mut out = Self::zeros(self.spec, self.t);
        for j in 0..ny {
            let src = (ny - j) % ny;
            for i in 0..nx {
                out.upper[j * nx + i] = self.upper[src * nx + i];
                out.lower[j * nx + i] = self.lower[src * nx + i];
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.upper
            .iter()
            .chain(&self.lower)
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest |ψ_a − ψ_b| over sites and components.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.upper
            .iter()
            .zip(&other.upper)
            .chain(self.lower.iter().zip(&other.lower))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Normalised overlap |⟨a, b⟩| / (‖a‖‖b‖).
pub fn overlap_fidelity(a: &SpinorField, b: &SpinorField) -> f64 {
    a.inner(b).norm() / (a.norm() * b.norm())
}

/// 2D FFT built from row and column passes.
pub(crate) struct Fft2 {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
    transposed: Vec<C64>,
}

impl Fft2 {
    pub(crate) fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd_x = planner.plan_fft_forward(nx);
        let inv_x = planner.plan_fft_inverse(nx);
        let fwd_y = planner.plan_fft_forward(ny);
        let inv_y = planner.plan_fft_inverse(ny);
        let len = [&fwd_x, &inv_x, &fwd_y, &inv_y]
            .iter()
            .map(|f| f.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Self {
            nx,
            ny,
            fwd_x,
            inv_x,
            fwd_y,
            inv_y,
            scratch: vec![ZERO; len],
            transposed: vec![ZERO; nx * ny],
        }
    }

    pub(crate) fn forward(&mut self, data: &mut [C64]) {
        self.run(data, true);
    }

    /// Normalised inverse.
    pub(crate) fn inverse(&mut self, data: &mut [C64]) {
        self.run(data, false);
        let s = 1.0 / (self.nx * self.ny) as f64;
        for v in data.iter_mut() {
            *v *= s;
        }
    }

    fn run(&mut self, data: &mut [C64], forward: bool) {
        let (fx, fy) = if forward {
            (&self.fwd_x, &self.fwd_y)
        } else {
            (&self.inv_x, &self.inv_y)
        };
        let (nx, ny) = (self.nx, self.ny);
        fx.process_with_scratch(data, &mut self.scratch);
        for j in 0..ny {
            for i in 0..nx {
                self.transposed[i * ny + j] = data[j * nx + i];
            }
        }
        fy.process_with_scratch(&mut self.transposed, &mut self.scratch);
        for i in 0..nx {
            for j in 0..ny {
                data[j * nx + i] = self.transposed[i * ny + j];
            }
        }
    }
}

/// Positive-energy eigenvector of the free Hamiltonian at momentum k.
fn positive_spinor(rep: &GammaRep, kx: f64, ky: f64, mass: f64) -> [C64; 2] {
    let h = rep.free_hamiltonian(kx, ky, mass).entries;
    let e = (mass * mass + kx * kx + ky * ky).sqrt();
    let v = [C64::new(e, 0.0) - h[1][1], h[1][0]];
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Normalised positive-energy Gaussian packet with |ψ|² of standard
/// deviation `width` per axis, mean position `center` and mean momentum
/// `momentum`.
pub fn init_gaussian_wavepacket(
    spec: &LatticeSpec,
    center: [f64; 2],
    momentum: [f64; 2],
    width: f64,
    rep: &GammaRep,
    mass: f64,
) -> Result<SpinorField> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidInput(format!("packet width must be > 0, got {width}")));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::InvalidInput(format!("mass must be > 0, got {mass}")));
    }
    if !center.iter().chain(&momentum).all(|v| v.is_finite()) {
        return Err(Error::InvalidInput("packet center and momentum must be finite".into()));
    }
    let k = momentum[0].hypot(momentum[1]);
    let limit = spec.momentum_limit();
    if k >= limit {
        return Err(Error::MomentumOutOfBand { k, limit });
    }
    let r = center[0].hypot(center[1]);
    let min = spec.source_radius + 3.0 * width;
    if r <= min {
        return Err(Error::PacketOverlapsSource { r, min });
    }
    let [x0, y0, x1, y1] = spec.bounds();
    let margin = 4.0 * width;
    if center[0] - margin < x0 || center[0] + margin > x1 || center[1] - margin < y0 || center[1] + margin > y1 {
        return Err(Error::InvalidInput(format!(
            "packet at ({}, {}) with width {width} does not fit inside the domain",
            center[0], center[1]
        )));
    }

    let n = spec.len();
    let mut g = vec![ZERO; n];
    let inv4s2 = 1.0 / (4.0 * width * width);
    for (idx, v) in g.iter_mut().enumerate() {
        let p = spec.position(idx);
        let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
        let env = (-(dx * dx + dy * dy) * inv4s2).exp();
        *v = C64::from_polar(env, momentum[0] * dx + momentum[1] * dy);
    }
    let mut fft = Fft2::new(spec.nx, spec.ny);
    fft.forward(&mut g);
    let kx = spec.kx();
    let ky = spec.ky();
    let build = |g: &[C64], shift: [f64; 2], fft: &mut Fft2| -> SpinorField {
        let mut up = vec![ZERO; n];
        let mut lo = vec![ZERO; n];
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                let idx = j * spec.nx + i;
                let u = positive_spinor(rep, kx[i], ky[j], mass);
                let phase = C64::from_polar(1.0, -(kx[i] * shift[0] + ky[j] * shift[1]));
                up[idx] = g[idx] * u[0] * phase;
                lo[idx] = g[idx] * u[1] * phase;
            }
        }
        fft.inverse(&mut up);
        fft.inverse(&mut lo);
        SpinorField {
            spec: *spec,
            t: 0.0,
            upper: up,
            lower: lo,
        }
    };
    let first = build(&g, [0.0, 0.0], &mut fft);
    let m = first.mean_position();
    let mut psi = build(&g, [center[0] - m[0], center[1] - m[1]], &mut fft);
    psi.normalize()?;
    Ok(psi)
}

/// Probability-weighted mean momentum, from the spectral density.
pub fn mean_momentum(state: &SpinorField) -> [f64; 2] {
    let spec = state.spec;
    let mut fft = Fft2::new(spec.nx, spec.ny);
    let mut up = state.upper.clone();
    let mut lo = state.lower.clone();
    fft.forward(&mut up);
    fft.forward(&mut lo);
    let (kx, ky) = (spec.kx(), spec.ky());
    let mut acc = [0.0; 3];
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let idx = j * spec.nx + i;
            let w = up[idx].norm_sqr() + lo[idx].norm_sqr();
            acc[0] += w * kx[i];
            acc[1] += w * ky[j];
            acc[2] += w;
        }
    }
    [acc[0] / acc[2], acc[1] / acc[2]]
}

/// Fraction of spectral weight with |k_x| or |k_y| above half the zone edge.
pub fn zone_edge_weight(state: &SpinorField) -> f64 {
    let spec = state.spec;
    let mut fft = Fft2::new(spec.nx, spec.ny);
    zone_edge_weight_with(state, &mut fft)
}

fn zone_edge_weight_with(state: &SpinorField, fft: &mut Fft2) -> f64 {
    let spec = state.spec;
    let mut up = state.upper.clone();
    let mut lo = state.lower.clone();
    fft.forward(&mut up);
    fft.forward(&mut lo);
    let (qx, qy) = (spec.nx / 4, spec.ny / 4);
    let mut edge = 0.0;
    let mut total = 0.0;
    for j in 0..spec.ny {
        let fj = j.min(spec.ny - j);
        for i in 0..spec.nx {
            let fi = i.min(spec.nx - i);
            let idx = j * spec.nx + i;
            let w = up[idx].norm_sqr() + lo[idx].norm_sqr();
            total += w;
            if fi > qx || fj > qy {
                edge += w;
            }
        }
    }
    if total > 0.0 {
        edge / total
    } else {
        0.0
    }
}

/// Interaction matrices ΔH at every site for the flux state at time t.
fn interaction_field(
    spec: &LatticeSpec,
    rep: &GammaRep,
    cfg: &SourceConfig,
    dipole: &Dipole,
    t: f64,
    opts: FieldOptions,
) -> Result<Vec<Matrix2C>> {
    let state = cfg.flux_state(t)?;
    (0..spec.len())
        .map(|idx| {
            let p = spec.position(idx);
            let sample = sample_from_state(cfg, &state, p[0], p[1], t, opts);
            if !sample.is_finite() {
                return Err(Error::NonFiniteField { x: p[0], y: p[1], t });
            }
            Ok(interaction_matrix(rep, dipole, &sample))
        })
        .collect()
}

/// Hψ with H = α·p + βm + ΔH(t); no sponge, no energy reference.
pub fn apply_hamiltonian(
    state: &SpinorField,
    rep: &GammaRep,
    cfg: &SourceConfig,
    dipole: &Dipole,
    t: f64,
) -> Result<SpinorField> {
    apply_hamiltonian_with(state, rep, cfg, dipole, t, FieldOptions::default())
}

pub fn apply_hamiltonian_with(
    state: &SpinorField,
    rep: &GammaRep,
    cfg: &SourceConfig,
    dipole: &Dipole,
    t: f64,
    opts: FieldOptions,
) -> Result<SpinorField> {
    cfg.check_dipole(dipole)?;
    let spec = state.spec;
    let mut fft = Fft2::new(spec.nx, spec.ny);
    let mut up = state.upper.clone();
    let mut lo = state.lower.clone();
    fft.forward(&mut up);
    fft.forward(&mut lo);
    let (kx, ky) = (spec.kx(), spec.ky());
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let idx = j * spec.nx + i;
            let h = rep.free_hamiltonian(kx[i], ky[j], dipole.mass);
            let v = h.apply([up[idx], lo[idx]]);
            up[idx] = v[0];
            lo[idx] = v[1];
        }
    }
    fft.inverse(&mut up);
    fft.inverse(&mut lo);
    let delta = interaction_field(&spec, rep, cfg, dipole, t, opts)?;
    for (idx, d) in delta.iter().enumerate() {
        let v = d.apply([state.upper[idx], state.lower[idx]]);
        up[idx] += v[0];
        lo[idx] += v[1];
    }
    Ok(SpinorField {
        spec,
        t,
        upper: up,
        lower: lo,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stepper {
    CrankNicolson,
}

/// Quartic imaginary potential −iV over the outer `width_fraction` of each
/// axis, V = strength·(ξ_x⁴ + ξ_y⁴) with ξ the depth into the layer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sponge {
    pub width_fraction: f64,
    pub strength: f64,
}

impl Default for Sponge {
    fn default() -> Self {
        Self {
            width_fraction: 0.1,
            strength: 2.0,
        }
    }
}

impl Sponge {
    pub fn off() -> Self {
        Self {
            width_fraction: 0.1,
            strength: 0.0,
        }
    }

    pub fn potential(&self, spec: &LatticeSpec) -> Vec<f64> {
        let depth = |k: usize, n: usize| -> f64 {
            let half = n as f64 / 2.0;
            let layer = (self.width_fraction * n as f64).max(1.0);
            let d = (k as f64 - half).abs();
            ((d - (half - layer)) / layer).clamp(0.0, 1.0)
        };
        (0..spec.len())
            .map(|idx| {
                let xi = depth(idx % spec.nx, spec.nx);
                let eta = depth(idx / spec.nx, spec.ny);
                self.strength * (xi.powi(4) + eta.powi(4))
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub stepper: Stepper,
    pub sponge: Sponge,
    pub solver_tolerance: f64,
    pub max_iterations: usize,
    pub energy_reference: f64,
    pub field_options: FieldOptions,
    /// Steps between stored snapshots; 0 keeps only the endpoints.
    pub record_every: usize,
    /// Steps between zone-edge checks; 0 checks only at the endpoints.
    pub monitor_every: usize,
    pub zone_edge_threshold: f64,
}

impl EvolveConfig {
    pub fn new(dt: f64, n_steps: usize) -> Self {
        Self {
            dt,
            n_steps,
            stepper: Stepper::CrankNicolson,
            sponge: Sponge::default(),
            solver_tolerance: 1e-13,
            max_iterations: 200,
            energy_reference: 0.0,
            field_options: FieldOptions::default(),
            record_every: 0,
            monitor_every: 25,
            zone_edge_threshold: 1e-6,
        }
    }

    pub fn validate(&self, spec: &LatticeSpec) -> Result<()> {
        let mut errors = Vec::new();
        if !(self.dt.is_finite() && self.dt > 0.0) {
            errors.push(format!("dt must be finite and > 0, got {}", self.dt));
        } else if self.dt > spec.dx / 2.0 {
            errors.push(format!(
                "dt = {} exceeds the bound dx/2 = {}",
                self.dt,
                spec.dx / 2.0
            ));
        }
        if !(self.solver_tolerance.is_finite() && self.solver_tolerance > 0.0) {
            errors.push("solver tolerance must be > 0".into());
        }
        if self.max_iterations == 0 {
            errors.push("max_iterations must be >= 1".into());
        }
        if !(self.sponge.strength.is_finite() && self.sponge.strength >= 0.0) {
            errors.push("sponge strength must be finite and >= 0".into());
        }
        if !(self.sponge.width_fraction > 0.0 && self.sponge.width_fraction < 0.5) {
            errors.push("sponge width fraction must lie in (0, 0.5)".into());
        }
        if !self.energy_reference.is_finite() {
            errors.push("energy reference must be finite".into());
        }
        if !(self.zone_edge_threshold > 0.0) {
            errors.push("zone-edge threshold must be > 0".into());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errors))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormRecord {
    pub t: f64,
    pub norm_sqr: f64,
    /// Cumulative probability removed by the sponge.
    pub sponge_loss: f64,
}

impl NormRecord {
    /// Norm change not explained by the sponge.
    pub fn solver_drift(&self, initial: f64) -> f64 {
        self.norm_sqr + self.sponge_loss - initial
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    pub iterations: usize,
    pub residual: f64,
    pub sponge_loss: f64,
}

/// Everything a completed run carries.
#[derive(Clone, Debug)]
pub struct EvolveRun {
    pub config: EvolveConfig,
    pub initial: SpinorField,
    pub history: Vec<SpinorField>,
    pub final_state: SpinorField,
    pub norms: Vec<NormRecord>,
    pub max_residual: f64,
    pub max_iterations_used: usize,
    pub max_zone_edge_weight: f64,
}

impl EvolveRun {
    pub fn t_start(&self) -> f64 {
        self.initial.t
    }

    pub fn t_final(&self) -> f64 {
        self.final_state.t
    }

    pub fn max_solver_drift(&self) -> f64 {
        let n0 = self.norms.first().map(|r| r.norm_sqr).unwrap_or(0.0);
        self.norms
            .iter()
            .map(|r| r.solver_drift(n0).abs())
            .fold(0.0, f64::max)
    }
}

/// Reusable Crank–Nicolson propagator for one lattice and Hamiltonian.
pub struct Evolver<'a> {
    spec: LatticeSpec,
    rep: GammaRep,
    cfg: &'a SourceConfig,
    dipole: Dipole,
    config: EvolveConfig,
    fft: Fft2,
    free_fwd: Vec<Matrix2C>,
    free_inv: Vec<Matrix2C>,
    sponge: Vec<f64>,
    delta: Vec<Matrix2C>,
    rhs: [Vec<C64>; 2],
    next: [Vec<C64>; 2],
    work: [Vec<C64>; 2],
}

impl<'a> Evolver<'a> {
    pub fn new(
        spec: LatticeSpec,
        rep: GammaRep,
        cfg: &'a SourceConfig,
        dipole: Dipole,
        config: EvolveConfig,
    ) -> Result<Self> {
        cfg.check_dipole(&dipole)?;
        config.validate(&spec)?;
        let h = 0.5 * config.dt;
        let i_h = C64::new(0.0, h);
        let es = config.energy_reference;
        let c_minus = C64::new(1.0, -h * es);
        let c_plus = C64::new(1.0, h * es);
        let (kx, ky) = (spec.kx(), spec.ky());
        let mut free_fwd = Vec::with_capacity(spec.len());
        let mut free_inv = Vec::with_capacity(spec.len());
        for &qy in &ky {
            for &qx in &kx {
                let hd = rep.free_hamiltonian(qx, qy, dipole.mass);
                let e2 = qx * qx + qy * qy + dipole.mass * dipole.mass;
                free_fwd.push(Matrix2C::identity() * c_plus - hd * i_h);
                let denom = c_minus * c_minus + h * h * e2;
                free_inv.push((Matrix2C::identity() * c_minus - hd * i_h) * (1.0 / denom));
            }
        }
        let n = spec.len();
        Ok(Self {
            spec,
            rep,
            cfg,
            dipole,
            config,
            fft: Fft2::new(spec.nx, spec.ny),
            free_fwd,
            free_inv,
            sponge: config.sponge.potential(&spec),
            delta: vec![Matrix2C::zero(); n],
            rhs: [vec![ZERO; n], vec![ZERO; n]],
            next: [vec![ZERO; n], vec![ZERO; n]],
            work: [vec![ZERO; n], vec![ZERO; n]],
        })
    }

    pub fn config(&self) -> &EvolveConfig {
        &self.config
    }

    fn spectral_in_place(&mut self, mats: Mats, buf: Buf) {
        let [a, b] = match buf {
            Buf::Rhs => &mut self.rhs,
            Buf::Next => &mut self.next,
        };
        self.fft.forward(a);
        self.fft.forward(b);
        let m = match mats {
            Mats::Forward => &self.free_fwd,
            Mats::Inverse => &self.free_inv,
        };
        for (k, mat) in m.iter().enumerate() {
            let v = mat.apply([a[k], b[k]]);
            a[k] = v[0];
            b[k] = v[1];
        }
        self.fft.inverse(a);
        self.fft.inverse(b);
    }

    /// Advances `state` by one step.
    pub fn step(&mut self, state: &mut SpinorField) -> Result<StepReport> {
        if state.spec != self.spec {
            return Err(Error::RunMismatch("state lattice differs from the evolver lattice".into()));
        }
        let dt = self.config.dt;
        let h = 0.5 * dt;
        let i_h = C64::new(0.0, h);
        let t_mid = state.t + h;
        self.delta = interaction_field(
            &self.spec,
            &self.rep,
            self.cfg,
            &self.dipole,
            t_mid,
            self.config.field_options,
        )?;
        for (d, v) in self.delta.iter_mut().zip(&self.sponge) {
            d.entries[0][0] -= C64::new(0.0, *v);
            d.entries[1][1] -= C64::new(0.0, *v);
        }

        // rhs = (1 − ih(H_D − E_s))ψ − ihΔψ
        self.rhs[0].copy_from_slice(&state.upper);
        self.rhs[1].copy_from_slice(&state.lower);
        self.spectral_in_place(Mats::Forward, Buf::Rhs);
        for k in 0..self.spec.len() {
            let v = self.delta[k].apply([state.upper[k], state.lower[k]]);
            self.rhs[0][k] -= i_h * v[0];
            self.rhs[1][k] -= i_h * v[1];
        }

        // x₀ = L_free⁻¹ rhs, then x ← L_free⁻¹(rhs − ihΔx).
        self.next[0].copy_from_slice(&self.rhs[0]);
        self.next[1].copy_from_slice(&self.rhs[1]);
        self.spectral_in_place(Mats::Inverse, Buf::Next);
        let area = self.spec.cell_area();
        let mut iterations = 0;
        let mut residual = f64::INFINITY;
        let has_coupling = self.delta.iter().any(|d| d.max_abs() > 0.0);
        if !has_coupling {
            residual = 0.0;
        }
        while residual > self.config.solver_tolerance {
            if iterations >= self.config.max_iterations || !residual.is_finite() && iterations > 0 {
                return Err(Error::SolverDiverged {
                    residual,
                    iterations,
                });
            }
            for k in 0..self.spec.len() {
                let v = self.delta[k].apply([self.next[0][k], self.next[1][k]]);
                self.work[0][k] = self.rhs[0][k] - i_h * v[0];
                self.work[1][k] = self.rhs[1][k] - i_h * v[1];
            }
            // work now holds the previous iterate.
            std::mem::swap(&mut self.work, &mut self.next);
            self.spectral_in_place(Mats::Inverse, Buf::Next);
            let mut acc = 0.0;
            for k in 0..self.spec.len() {
                let d = [self.next[0][k] - self.work[0][k], self.next[1][k] - self.work[1][k]];
                let v = self.delta[k].apply(d);
                acc += v[0].norm_sqr() + v[1].norm_sqr();
            }
            residual = h * (acc * area).sqrt();
            iterations += 1;
        }

        let mut loss = 0.0;
        for k in 0..self.spec.len() {
            let v = self.sponge[k];
            if v > 0.0 {
                let m0 = 0.5 * (state.upper[k] + self.next[0][k]);
                let m1 = 0.5 * (state.lower[k] + self.next[1][k]);
                loss += v * (m0.norm_sqr() + m1.norm_sqr());
            }
        }
        loss *= 2.0 * dt * area;

        state.upper.copy_from_slice(&self.next[0]);
        state.lower.copy_from_slice(&self.next[1]);
        state.t += dt;
        if !state.is_finite() {
            return Err(Error::SolverDiverged {
                residual: f64::INFINITY,
                iterations,
            });
        }
        Ok(StepReport {
            iterations,
            residual,
            sponge_loss: loss,
        })
    }

    pub fn zone_edge_weight(&mut self, state: &SpinorField) -> f64 {
        zone_edge_weight_with(state, &mut self.fft)
    }

    fn check_zone_edge(&mut self, state: &SpinorField) -> Result<f64> {
        let w = self.zone_edge_weight(state);
        if w > self.config.zone_edge_threshold {
            return Err(Error::ZoneEdgeWeight {
                weight: w,
                threshold: self.config.zone_edge_threshold,
            });
        }
        Ok(w)
    }

    /// Runs `n_steps` steps, calling `observe` after each one.
    pub fn run_with<F: FnMut(&SpinorField, &StepReport)>(
        &mut self,
        state0: &SpinorField,
        mut observe: F,
    ) -> Result<EvolveRun> {
        let mut state = state0.clone();
        let mut max_edge = self.check_zone_edge(&state)?;
        let mut norms = vec![NormRecord {
            t: state.t,
            norm_sqr: state.norm_sqr(),
            sponge_loss: 0.0,
        }];
        let mut history = vec![state.clone()];
        let mut max_residual: f64 = 0.0;
        let mut max_iter = 0;
        let mut sponge_total = 0.0;
        for n in 1..=self.config.n_steps {
            let report = self.step(&mut state)?;
            sponge_total += report.sponge_loss;
            max_residual = max_residual.max(report.residual);
            max_iter = max_iter.max(report.iterations);
            norms.push(NormRecord {
                t: state.t,
                norm_sqr: state.norm_sqr(),
                sponge_loss: sponge_total,
            });
            let every = self.config.monitor_every;
            if (every > 0 && n % every == 0) || n == self.config.n_steps {
                max_edge = max_edge.max(self.check_zone_edge(&state)?);
            }
            let rec = self.config.record_every;
            if rec > 0 && n % rec == 0 && n != self.config.n_steps {
                history.push(state.clone());
            }
            observe(&state, &report);
        }
        if self.config.n_steps > 0 {
            history.push(state.clone());
        }
        Ok(EvolveRun {
            config: self.config,
            initial: state0.clone(),
            history,
            final_state: state,
            norms,
            max_residual,
            max_iterations_used: max_iter,
            max_zone_edge_weight: max_edge,
        })
    }
}

#[derive(Clone, Copy)]
enum Mats {
    Forward,
    Inverse,
}

#[derive(Clone, Copy)]
enum Buf {
    Rhs,
    Next,
}

/// Crank–Nicolson evolution of `state0` for `evolve_cfg.n_steps` steps.
pub fn evolve(
    state0: &SpinorField,
    rep: &GammaRep,
    cfg: &SourceConfig,
    dipole: &Dipole,
    evolve_cfg: &EvolveConfig,
) -> Result<EvolveRun> {
    let mut ev = Evolver::new(state0.spec, *rep, cfg, *dipole, *evolve_cfg)?;
    ev.run_with(state0, |_, _| {})
}

/// Snapshot gauge function on every lattice site, referenced at `reference`.
pub fn lattice_phase_field(
    spec: &LatticeSpec,
    cfg: &SourceConfig,
    dipole: &Dipole,
    reference: [f64; 2],
    t: f64,
) -> Result<Vec<f64>> {
    let points: Vec<[f64; 2]> = (0..spec.len()).map(|k| spec.position(k)).collect();
    snapshot_phase_field(cfg, dipole, reference, t, &points)
}

/// Overlap between the interacting final state and the gauge image of the
/// free final state, e^{−iχ}ψ_free, with χ referenced at the packet's
/// initial center.
///
/// The interacting Hamiltonian is α·(p − sμẼ) + βm, and e^{−iχ}ψ carries
/// exactly the momentum shift sμẼ = −∇χ, so that is the image an exact
/// gauge equivalence predicts.
pub fn gauge_fidelity(
    run_free: &EvolveRun,
    run_interacting: &EvolveRun,
    cfg: &SourceConfig,
    dipole: &Dipole,
) -> Result<f64> {
    let reference = run_free.initial.mean_position();
    gauge_fidelity_with_reference(run_free, run_interacting, cfg, dipole, reference)
}

pub fn gauge_fidelity_with_reference(
    run_free: &EvolveRun,
    run_interacting: &EvolveRun,
    cfg: &SourceConfig,
    dipole: &Dipole,
    reference: [f64; 2],
) -> Result<f64> {
    check_runs_match(run_free, run_interacting)?;
    let spec = run_free.final_state.spec;
    let chi = lattice_phase_field(&spec, cfg, dipole, reference, run_free.t_final())?;
    let mut image = run_free.final_state.clone();
    let minus: Vec<f64> = chi.iter().map(|c| -c).collect();
    image.apply_phase(&minus);
    Ok(overlap_fidelity(&image, &run_interacting.final_state).min(1.0))
}

fn check_runs_match(a: &EvolveRun, b: &EvolveRun) -> Result<()> {
    if a.initial.spec != b.initial.spec {
        return Err(Error::RunMismatch("lattices differ".into()));
    }
    if a.config.dt != b.config.dt || a.config.n_steps != b.config.n_steps {
        return Err(Error::RunMismatch("time step schedules differ".into()));
    }
    if a.t_start() != b.t_start() {
        return Err(Error::RunMismatch("start times differ".into()));
    }
    let da = a.initial.density();
    let db = b.initial.density();
    let peak = da.iter().cloned().fold(0.0, f64::max);
    let gap = da
        .iter()
        .zip(&db)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if gap > 1e-10 * peak.max(f64::MIN_POSITIVE) {
        return Err(Error::RunMismatch(format!(
            "initial packets differ (max density gap {gap:e})"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{gamma_rep, SpinLabel};
    use crate::fields::{FluxProfile, SourceKind};

    fn small() -> LatticeSpec {
        LatticeSpec::new(64, 64, 0.4, [0.0, 0.0], 1.0).unwrap()
    }

    fn no_field() -> SourceConfig {
        SourceConfig::new(SourceKind::MagneticSolenoid, 1.0, FluxProfile::constant(0.0).unwrap()).unwrap()
    }

    #[test]
    fn lattice_validation() {
        assert!(LatticeSpec::new(60, 64, 0.25, [0.0, 0.0], 1.0).is_err());
        assert!(LatticeSpec::new(64, 64, 0.01, [0.0, 0.0], 1.0).is_err());
        assert!(LatticeSpec::new(64, 64, -0.1, [0.0, 0.0], 1.0).is_err());
        let s = small();
        assert_eq!(s.x(32), 0.0);
        assert_eq!(s.column_at(0.4), Some(33));
        assert_eq!(s.column_at(0.3), None);
    }

    #[test]
    fn fft_round_trip() {
        let mut fft = Fft2::new(16, 8);
        let data: Vec<C64> = (0..128).map(|k| C64::new((k as f64).sin(), (k as f64 * 0.3).cos())).collect();
        let mut work = data.clone();
        fft.forward(&mut work);
        fft.inverse(&mut work);
        let err = work.iter().zip(&data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-14);
    }

    #[test]
    fn rest_packet_uses_upper_component() {
        let rep = gamma_rep(SpinLabel::Up);
        let psi = init_gaussian_wavepacket(&small(), [5.0, 0.0], [0.0, 0.0], 1.0, &rep, 2.0).unwrap();
        let mut up = psi.upper.clone();
        let mut lo = psi.lower.clone();
        let mut fft = Fft2::new(64, 64);
        fft.forward(&mut up);
        fft.forward(&mut lo);
        assert!(up[0].norm() > 1.0);
        assert!(lo[0].norm() < 1e-14 * up[0].norm());
        let lower: f64 = psi.lower.iter().map(|z| z.norm_sqr()).sum::<f64>() * 0.16;
        assert!(lower < 0.05);
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn packet_moments() {
        let rep = gamma_rep(SpinLabel::Down);
        let psi = init_gaussian_wavepacket(&small(), [-5.0, 3.0], [1.0, -0.5], 1.2, &rep, 1.0).unwrap();
        let m = psi.mean_position();
        assert!((m[0] + 5.0).abs() < 1e-6 && (m[1] - 3.0).abs() < 1e-6, "{m:?}");
        let k = mean_momentum(&psi);
        assert!((k[0] - 1.0).abs() < 1e-6 && (k[1] + 0.5).abs() < 1e-6, "{k:?}");
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn packet_preconditions() {
        let rep = gamma_rep(SpinLabel::Up);
        let spec = small();
        assert!(matches!(
            init_gaussian_wavepacket(&spec, [2.5, 0.0], [0.0, 0.0], 1.0, &rep, 1.0),
            Err(Error::PacketOverlapsSource { .. })
        ));
        assert!(matches!(
            init_gaussian_wavepacket(&spec, [4.5, 0.0], [3.2, 0.0], 1.0, &rep, 1.0),
            Err(Error::MomentumOutOfBand { .. })
        ));
    }

    #[test]
    fn rest_energy() {
        let rep = gamma_rep(SpinLabel::Up);
        let cfg = no_field();
        let mu = Dipole::magnetic(0.0, SpinLabel::Up, 5.0).unwrap();
        let psi = init_gaussian_wavepacket(&small(), [6.0, 0.0], [0.0, 0.0], 1.5, &rep, 5.0).unwrap();
        let h = apply_hamiltonian(&psi, &rep, &cfg, &mu, 0.0).unwrap();
        let e = psi.inner(&h).re;
        assert!((e - 5.0).abs() < 0.01 * 5.0);
        let mut m_psi = psi.clone();
        m_psi.scale(C64::new(5.0, 0.0));
        assert!(h.max_abs_diff(&m_psi) < 0.05 * 5.0 * psi.upper.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }

    #[test]
    fn sponge_profile() {
        let spec = small();
        let v = Sponge::default().potential(&spec);
        assert_eq!(v[32 * 64 + 32], 0.0);
        assert!(v[0] > 0.0);
        assert!(Sponge::off().potential(&spec).iter().all(|x| *x == 0.0));
    }

    #[test]
    fn reflection_is_an_involution() {
        let rep = gamma_rep(SpinLabel::Up);
        let psi = init_gaussian_wavepacket(&small(), [-5.0, 3.0], [1.0, -0.5], 1.2, &rep, 1.0).unwrap();
        assert_eq!(psi.reflect_y().reflect_y(), psi);
        let m = psi.reflect_y().mean_position();
        assert!((m[1] + 3.0).abs() < 1e-9);
    }

    #[test]
    fn courant_bound_enforced() {
        let spec = small();
        let cfg = EvolveConfig::new(0.25, 10);
        assert!(matches!(cfg.validate(&spec), Err(Error::Validation(_))));
        assert!(EvolveConfig::new(0.2, 10).validate(&spec).is_ok());
    }

    #[test]
    fn zero_moment_fidelity_is_one() {
        let rep = gamma_rep(SpinLabel::Up);
        let spec = small();
        let cfg = SourceConfig::new(SourceKind::MagneticSolenoid, 1.0, FluxProfile::linear_ramp(1.0, 1.0).unwrap()).unwrap();
        let mu0 = Dipole::magnetic(0.0, SpinLabel::Up, 1.0).unwrap();
        let psi = init_gaussian_wavepacket(&spec, [-4.0, 3.0], [0.5, 0.0], 1.0, &rep, 1.0).unwrap();
        let mut ec = EvolveConfig::new(0.1, 20);
        ec.sponge = Sponge::off();
        let a = evolve(&psi, &rep, &cfg, &mu0, &ec).unwrap();
        let b = evolve(&psi, &rep, &cfg, &mu0, &ec).unwrap();
        let f = gauge_fidelity(&a, &b, &cfg, &mu0).unwrap();
        assert!((1.0 - f).abs() < 1e-10);
    }

    #[test]
    fn mismatched_runs_are_rejected() {
        let rep = gamma_rep(SpinLabel::Up);
        let spec = small();
        let cfg = no_field();
        let mu = Dipole::magnetic(0.0, SpinLabel::Up, 1.0).unwrap();
        let psi = init_gaussian_wavepacket(&spec, [-4.0, 3.0], [0.5, 0.0], 1.0, &rep, 1.0).unwrap();
        let a = evolve(&psi, &rep, &cfg, &mu, &EvolveConfig::new(0.1, 3)).unwrap();
        let b = evolve(&psi, &rep, &cfg, &mu, &EvolveConfig::new(0.1, 4)).unwrap();
        assert!(matches!(gauge_fidelity(&a, &b, &cfg, &mu), Err(Error::RunMismatch(_))));
    }
}
