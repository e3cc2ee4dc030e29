//! Gamma matrices, field-tensor contractions and dipole interaction
//! Hamiltonians.
//!
//! Planar (2+1D) problems use 2×2 representations labelled by the spin
//! label `s = ±1`:
//!
//! ```text
//! α_x = σ_x,  α_y = s σ_y,  β = γ⁰ = σ_z,  γ¹ = β α_x = iσ_y,  γ² = β α_y = −is σ_x
//! ```
//!
//! The metric signature is (+,−,−) in the plane and (+,−,−,−) for the one
//! 3+1D identity checked here; both come from [`METRIC`]. The Levi-Civita
//! symbol uses ε^{0123} = +1 and γ⁵ = iγ⁰γ¹γ²γ³.
//!
//! Sign bookkeeping for the closed forms: with F^{0i} = −E_i and
//! F^{ij} = −ε_{ijk}B_k, one finds σ^{12} = sσ_z and F_{12} = −B_z, so the
//! magnetic piece of σ^{μν}F_{μν} is `2σ_z·(−sB_z)`. Likewise the planar dual
//! contraction carries `+2Σ_z E_z`. Those are the axial terms written as
//! `2σ_z B̃_z` and `−2σ_z Ẽ_z` in the usual planar notation.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{confine, FieldSample, SourceKind};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Diagonal of the metric η_{μμ}; the planar problem uses the first three
/// entries.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Small dense complex matrix. Entries built from Pauli matrices are exact
/// in double precision, so equality checks on them are exact too.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquareMatrix<const N: usize> {
    pub entries: [[C64; N]; N],
}

pub type Matrix2C = SquareMatrix<2>;
pub type Matrix4C = SquareMatrix<4>;

impl<const N: usize> SquareMatrix<N> {
    pub fn zero() -> Self {
        Self {
            entries: [[ZERO; N]; N],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for k in 0..N {
            m.entries[k][k] = ONE;
        }
        m
    }

    pub fn from_entries(entries: [[C64; N]; N]) -> Self {
        Self { entries }
    }

    pub fn dagger(&self) -> Self {
        let mut out = Self::zero();
        for r in 0..N {
            for c in 0..N {
                out.entries[r][c] = self.entries[c][r].conj();
            }
        }
        out
    }

    pub fn scale(&self, z: C64) -> Self {
        let mut out = *self;
        for row in out.entries.iter_mut() {
            for e in row.iter_mut() {
                *e *= z;
            }
        }
        out
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0f64;
        for r in 0..N {
            for c in 0..N {
                m = m.max((self.entries[r][c] - other.entries[r][c]).norm());
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&Self::zero())
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.dagger()
    }

    pub fn is_anti_hermitian(&self) -> bool {
        *self == -self.dagger()
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl SquareMatrix<2> {
    /// Applies the matrix to a two-component spinor.
    #[inline]
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.entries;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }
}

impl<const N: usize> Add for SquareMatrix<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const N: usize> AddAssign for SquareMatrix<N> {
    fn add_assign(&mut self, rhs: Self) {
        for r in 0..N {
            for c in 0..N {
                self.entries[r][c] += rhs.entries[r][c];
            }
        }
    }
}

impl<const N: usize> Sub for SquareMatrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const N: usize> Neg for SquareMatrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl<const N: usize> Mul for SquareMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for r in 0..N {
            for c in 0..N {
                let mut acc = ZERO;
                for k in 0..N {
                    acc += self.entries[r][k] * rhs.entries[k][c];
                }
                out.entries[r][c] = acc;
            }
        }
        out
    }
}

impl<const N: usize> Mul<f64> for SquareMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl<const N: usize> Mul<C64> for SquareMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: C64) -> Self {
        self.scale(rhs)
    }
}

/// Pauli matrices.
pub mod pauli {
    use super::{Matrix2C, I, ONE, ZERO};

    pub fn identity() -> Matrix2C {
        Matrix2C::identity()
    }

    pub fn x() -> Matrix2C {
        Matrix2C::from_entries([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn y() -> Matrix2C {
        Matrix2C::from_entries([[ZERO, -I], [I, ZERO]])
    }

    pub fn z() -> Matrix2C {
        Matrix2C::from_entries([[ONE, ZERO], [ZERO, -ONE]])
    }
}

/// Block-diagonal embedding `diag(m, m)`.
pub fn block_diag(m: &Matrix2C) -> Matrix4C {
    block(m, &Matrix2C::zero(), &Matrix2C::zero(), m)
}

/// Assembles `[[a, b], [c, d]]` from 2×2 blocks.
pub fn block(a: &Matrix2C, b: &Matrix2C, c: &Matrix2C, d: &Matrix2C) -> Matrix4C {
    let mut out = Matrix4C::zero();
    for r in 0..2 {
        for col in 0..2 {
            out.entries[r][col] = a.entries[r][col];
            out.entries[r][col + 2] = b.entries[r][col];
            out.entries[r + 2][col] = c.entries[r][col];
            out.entries[r + 2][col + 2] = d.entries[r][col];
        }
    }
    out
}

/// Spin/polarization label selecting one of the two inequivalent planar
/// representations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpinLabel {
    Up,
    Down,
}

impl SpinLabel {
    pub fn sign(self) -> f64 {
        match self {
            SpinLabel::Up => 1.0,
            SpinLabel::Down => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            SpinLabel::Up => 1,
            SpinLabel::Down => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SpinLabel::Up => SpinLabel::Down,
            SpinLabel::Down => SpinLabel::Up,
        }
    }
}

impl TryFrom<i64> for SpinLabel {
    type Error = Error;
    fn try_from(v: i64) -> Result<Self> {
        match v {
            1 => Ok(SpinLabel::Up),
            -1 => Ok(SpinLabel::Down),
            other => Err(Error::InvalidInput(format!(
                "spin label must be +1 or -1, got {other}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DipoleKind {
    Magnetic,
    Electric,
}

impl DipoleKind {
    pub fn name(self) -> &'static str {
        match self {
            DipoleKind::Magnetic => "magnetic",
            DipoleKind::Electric => "electric",
        }
    }

    /// The source configuration this dipole couples to.
    pub fn source_kind(self) -> SourceKind {
        match self {
            DipoleKind::Magnetic => SourceKind::MagneticSolenoid,
            DipoleKind::Electric => SourceKind::ElectricFluxTube,
        }
    }
}

/// A neutral particle carrying a magnetic moment μ or an electric dipole
/// moment d, polarized along ẑ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dipole {
    pub kind: DipoleKind,
    pub moment: f64,
    pub s: SpinLabel,
    pub mass: f64,
}

impl Dipole {
    pub fn new(kind: DipoleKind, moment: f64, s: SpinLabel, mass: f64) -> Result<Self> {
        if !moment.is_finite() || moment < 0.0 {
            return Err(Error::InvalidInput(format!(
                "dipole moment must be finite and >= 0, got {moment}"
            )));
        }
        if !mass.is_finite() || mass <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "mass must be finite and > 0, got {mass}"
            )));
        }
        Ok(Self {
            kind,
            moment,
            s,
            mass,
        })
    }

    pub fn magnetic(moment: f64, s: SpinLabel, mass: f64) -> Result<Self> {
        Self::new(DipoleKind::Magnetic, moment, s, mass)
    }

    pub fn electric(moment: f64, s: SpinLabel, mass: f64) -> Result<Self> {
        Self::new(DipoleKind::Electric, moment, s, mass)
    }

    pub fn with_moment(self, moment: f64) -> Self {
        Self { moment, ..self }
    }

    pub fn with_spin(self, s: SpinLabel) -> Self {
        Self { s, ..self }
    }
}

/// Electromagnetic field tensor stored through its physical components, so
/// antisymmetry holds by construction.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct FieldTensor {
    pub e: [f64; 3],
    pub b: [f64; 3],
}

impl FieldTensor {
    pub fn new(e: [f64; 3], b: [f64; 3]) -> Self {
        Self { e, b }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// F^{μν} with F^{0i} = −E_i and F^{ij} = −ε_{ijk} B_k.
    pub fn upper(&self) -> [[f64; 4]; 4] {
        let [ex, ey, ez] = self.e;
        let [bx, by, bz] = self.b;
        [
            [0.0, -ex, -ey, -ez],
            [ex, 0.0, -bz, by],
            [ey, bz, 0.0, -bx],
            [ez, -by, bx, 0.0],
        ]
    }

    /// F_{μν} = η_{μα} F^{αβ} η_{βν}.
    pub fn lower(&self) -> [[f64; 4]; 4] {
        let up = self.upper();
        let mut out = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                out[mu][nu] = METRIC[mu] * up[mu][nu] * METRIC[nu];
            }
        }
        out
    }

    /// Dual tensor F̃^{μν} = ½ ε^{μναβ} F_{αβ}.
    pub fn dual_upper(&self) -> [[f64; 4]; 4] {
        let low = self.lower();
        let mut out = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                let mut acc = 0.0;
                for a in 0..4 {
                    for b in 0..4 {
                        acc += 0.5 * levi_civita([mu, nu, a, b]) * low[a][b];
                    }
                }
                out[mu][nu] = acc;
            }
        }
        out
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            e: self.e.map(|v| v * k),
            b: self.b.map(|v| v * k),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = *self;
        for k in 0..3 {
            out.e[k] += other.e[k];
            out.b[k] += other.b[k];
        }
        out
    }
}

/// Totally antisymmetric symbol with ε^{0123} = +1.
pub fn levi_civita(idx: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// One of the two planar gamma-matrix representations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaRep {
    pub s: SpinLabel,
    pub alpha_x: Matrix2C,
    pub alpha_y: Matrix2C,
    pub beta: Matrix2C,
    /// Upper-index γ^0, γ^1, γ^2.
    pub gamma: [Matrix2C; 3],
}

impl GammaRep {
    pub fn gamma0(&self) -> Matrix2C {
        self.gamma[0]
    }

    pub fn gamma1(&self) -> Matrix2C {
        self.gamma[1]
    }

    pub fn gamma2(&self) -> Matrix2C {
        self.gamma[2]
    }

    /// Free Dirac Hamiltonian at momentum (kx, ky): α_x kx + α_y ky + mβ.
    pub fn free_hamiltonian(&self, kx: f64, ky: f64, mass: f64) -> Matrix2C {
        self.alpha_x * kx + self.alpha_y * ky + self.beta * mass
    }
}

pub fn gamma_rep(s: SpinLabel) -> GammaRep {
    let sign = s.sign();
    let alpha_x = pauli::x();
    let alpha_y = pauli::y() * sign;
    let beta = pauli::z();
    GammaRep {
        s,
        alpha_x,
        alpha_y,
        beta,
        gamma: [beta, beta * alpha_x, beta * alpha_y],
    }
}

/// Max entrywise |{γ^μ, γ^ν} − 2η^{μν} I| over μ, ν ∈ {0, 1, 2}.
pub fn clifford_check(rep: &GammaRep) -> f64 {
    let mut worst = 0.0f64;
    for mu in 0..3 {
        for nu in 0..3 {
            let lhs = rep.gamma[mu].anticommutator(&rep.gamma[nu]);
            let eta = if mu == nu { METRIC[mu] } else { 0.0 };
            let rhs = Matrix2C::identity() * (2.0 * eta);
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
    }
    worst
}

/// Closed form of σ^{μν}F_{μν} in the planar representation:
/// `2i(σ_x E_x + sσ_y E_y) + 2σ_z·(−sB_z)`. E_z, B_x and B_y do not enter.
pub fn contract_sigma_f(rep: &GammaRep, f: &FieldTensor) -> Matrix2C {
    let sign = rep.s.sign();
    let [ex, ey, _] = f.e;
    let bz = f.b[2];
    let electric = (pauli::x() * ex + pauli::y() * (sign * ey)) * C64::new(0.0, 2.0);
    let magnetic = pauli::z() * (2.0 * (-sign * bz));
    electric + magnetic
}

/// σ^{μν}F_{μν} summed term by term with σ^{μν} = (i/2)[γ^μ, γ^ν].
pub fn sigma_f_tensor_sum(rep: &GammaRep, f: &FieldTensor) -> Matrix2C {
    let low = f.lower();
    let mut out = Matrix2C::zero();
    for mu in 0..3 {
        for nu in 0..3 {
            let sigma = rep.gamma[mu].commutator(&rep.gamma[nu]) * C64::new(0.0, 0.5);
            out += sigma * low[mu][nu];
        }
    }
    out
}

/// Basis used for 3+1D gamma matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiracBasis {
    /// γ⁰ = diag(I, −I).
    Dirac,
    /// γ⁰ off-diagonal, γ⁵ = diag(−I, I).
    Chiral,
}

/// 3+1D gamma matrices γ^μ and γ⁵ = iγ⁰γ¹γ²γ³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gamma4 {
    pub gamma: [Matrix4C; 4],
    pub gamma5: Matrix4C,
}

impl Gamma4 {
    pub fn new(basis: DiracBasis) -> Self {
        let zero = Matrix2C::zero();
        let id = Matrix2C::identity();
        let paulis = [pauli::x(), pauli::y(), pauli::z()];
        let g0 = match basis {
            DiracBasis::Dirac => block(&id, &zero, &zero, &-id),
            DiracBasis::Chiral => block(&zero, &id, &id, &zero),
        };
        let spatial = paulis.map(|p| block(&zero, &p, &-p, &zero));
        let gamma = [g0, spatial[0], spatial[1], spatial[2]];
        let gamma5 = (gamma[0] * gamma[1] * gamma[2] * gamma[3]) * I;
        Self { gamma, gamma5 }
    }

    /// σ^{μν} = (i/2)[γ^μ, γ^ν].
    pub fn sigma_upper(&self, mu: usize, nu: usize) -> Matrix4C {
        self.gamma[mu].commutator(&self.gamma[nu]) * C64::new(0.0, 0.5)
    }

    /// σ_{μν} with both indices lowered by the metric.
    pub fn sigma_lower(&self, mu: usize, nu: usize) -> Matrix4C {
        self.sigma_upper(mu, nu) * (METRIC[mu] * METRIC[nu])
    }
}

/// Closed form of the planar dual contraction σ_{αβ}F̃^{αβ} (α, β ∈ {0,1,2})
/// in the Dirac basis: `2iα⊥·B + 2Σ_z E_z`, with Σ_z = diag(σ_z, σ_z).
pub fn contract_dual_sigma_f(f: &FieldTensor) -> Matrix4C {
    let g = Gamma4::new(DiracBasis::Dirac);
    let alpha_x = g.gamma[0] * g.gamma[1];
    let alpha_y = g.gamma[0] * g.gamma[2];
    let sigma_z = block_diag(&pauli::z());
    let [bx, by, _] = f.b;
    (alpha_x * bx + alpha_y * by) * C64::new(0.0, 2.0) + sigma_z * (2.0 * f.e[2])
}

/// σ_{αβ}F̃^{αβ} over α, β ∈ {0, 1, 2}, summed term by term in the Dirac
/// basis.
pub fn dual_sigma_f_tensor_sum(f: &FieldTensor) -> Matrix4C {
    let g = Gamma4::new(DiracBasis::Dirac);
    let dual = f.dual_upper();
    let mut out = Matrix4C::zero();
    for a in 0..3 {
        for b in 0..3 {
            out += g.sigma_lower(a, b) * dual[a][b];
        }
    }
    out
}

/// Max entrywise deviation between (i/2)σ^{μν}γ⁵F_{μν} and
/// −(1/2)σ_{αβ}F̃^{αβ} in the Dirac basis.
pub fn verify_dual_identity(f: &FieldTensor) -> f64 {
    verify_dual_identity_in(DiracBasis::Dirac, f)
}

pub fn verify_dual_identity_in(basis: DiracBasis, f: &FieldTensor) -> f64 {
    let g = Gamma4::new(basis);
    let low = f.lower();
    let dual = f.dual_upper();
    let mut lhs = Matrix4C::zero();
    let mut rhs = Matrix4C::zero();
    for mu in 0..4 {
        for nu in 0..4 {
            if mu == nu {
                continue;
            }
            lhs += (g.sigma_upper(mu, nu) * g.gamma5) * C64::new(0.0, 0.5 * low[mu][nu]);
            rhs += g.sigma_lower(mu, nu) * (-0.5 * dual[mu][nu]);
        }
    }
    lhs.max_abs_diff(&rhs)
}

/// Pointwise interaction Hamiltonian ΔH for a dipole in the local fields.
///
/// * magnetic: `−sμ(α_x Ẽ_x + α_y Ẽ_y) + μB_z σ_z`, Ẽ = E × ẑ
/// * electric: `−sd(α_x B̃_x + α_y B̃_y) − dE_z σ_z`, B̃ = B × ẑ
///
/// The axial terms only see the second-order induced fields outside the
/// source, since the primary axial field vanishes there.
pub fn interaction_hamiltonian(
    rep: &GammaRep,
    dipole: &Dipole,
    sample: &FieldSample,
) -> Result<Matrix2C> {
    if !sample.is_finite() {
        return Err(Error::NonFiniteField {
            x: sample.position[0],
            y: sample.position[1],
            t: sample.time,
        });
    }
    Ok(interaction_matrix(rep, dipole, sample))
}

#[inline]
pub(crate) fn interaction_matrix(rep: &GammaRep, dipole: &Dipole, sample: &FieldSample) -> Matrix2C {
    let s = rep.s.sign();
    let moment = dipole.moment;
    let confined = confine(sample, dipole.kind.source_kind());
    let planar = (rep.alpha_x * confined.x + rep.alpha_y * confined.y) * (-s * moment);
    let axial = match dipole.kind {
        DipoleKind::Magnetic => moment * sample.b[2],
        DipoleKind::Electric => -moment * sample.e[2],
    };
    planar + pauli::z() * axial
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldSample;

    fn sample(e: [f64; 3], b: [f64; 3]) -> FieldSample {
        FieldSample {
            position: [2.0, 0.0],
            time: 0.0,
            e,
            b,
        }
    }

    #[test]
    fn representation_matches_pauli_construction() {
        let up = gamma_rep(SpinLabel::Up);
        assert_eq!(up.alpha_y, pauli::y());
        assert_eq!(up.gamma2(), pauli::x() * C64::new(0.0, -1.0));
        assert_eq!(up.gamma1(), pauli::y() * I);

        let down = gamma_rep(SpinLabel::Down);
        assert_eq!(down.alpha_y, -pauli::y());
        assert_eq!(down.gamma2(), pauli::x() * I);

        for rep in [up, down] {
            assert_eq!(rep.beta * rep.beta, Matrix2C::identity());
            assert_eq!(rep.beta, rep.gamma0());
        }
    }

    #[test]
    fn clifford_algebra_is_exact() {
        for s in [SpinLabel::Up, SpinLabel::Down] {
            let rep = gamma_rep(s);
            assert_eq!(clifford_check(&rep), 0.0);
            let g1 = rep.gamma1();
            assert_eq!(g1.anticommutator(&g1), Matrix2C::identity() * -2.0);
        }
    }

    #[test]
    fn hermiticity_pattern() {
        for s in [SpinLabel::Up, SpinLabel::Down] {
            let rep = gamma_rep(s);
            assert!(rep.alpha_x.is_hermitian());
            assert!(rep.alpha_y.is_hermitian());
            assert!(rep.beta.is_hermitian());
            assert!(rep.gamma1().is_anti_hermitian());
            assert!(rep.gamma2().is_anti_hermitian());
        }
    }

    #[test]
    fn sigma_f_examples() {
        let rep = gamma_rep(SpinLabel::Up);
        assert_eq!(contract_sigma_f(&rep, &FieldTensor::zero()), Matrix2C::zero());
        let f = FieldTensor::new([1.0, 0.0, 0.0], [0.0; 3]);
        assert_eq!(contract_sigma_f(&rep, &f), pauli::x() * C64::new(0.0, 2.0));
    }

    #[test]
    fn dual_sigma_f_examples() {
        assert_eq!(contract_dual_sigma_f(&FieldTensor::zero()), Matrix4C::zero());
        let g = Gamma4::new(DiracBasis::Dirac);
        let alpha_x = g.gamma[0] * g.gamma[1];
        let f = FieldTensor::new([0.0; 3], [1.0, 0.0, 0.0]);
        assert_eq!(contract_dual_sigma_f(&f), alpha_x * C64::new(0.0, 2.0));
    }

    #[test]
    fn dual_tensor_components() {
        let f = FieldTensor::new([0.3, -0.7, 1.1], [0.2, 0.5, -0.9]);
        let d = f.dual_upper();
        for i in 0..3 {
            assert!((d[0][i + 1] + f.b[i]).abs() < 1e-15);
        }
        assert!((d[1][2] - f.e[2]).abs() < 1e-15);
        assert!((d[2][3] - f.e[0]).abs() < 1e-15);
    }

    #[test]
    fn dual_identity_examples() {
        assert_eq!(verify_dual_identity(&FieldTensor::zero()), 0.0);
        let f = FieldTensor::new([0.0, 0.0, 1.0], [0.0; 3]);
        assert!(verify_dual_identity(&f) < 1e-13);
        assert!(verify_dual_identity_in(DiracBasis::Chiral, &f) < 1e-13);
    }

    #[test]
    fn gamma5_properties() {
        for basis in [DiracBasis::Dirac, DiracBasis::Chiral] {
            let g = Gamma4::new(basis);
            assert!((g.gamma5 * g.gamma5).max_abs_diff(&Matrix4C::identity()) < 1e-15);
            for mu in 0..4 {
                assert!(g.gamma5.anticommutator(&g.gamma[mu]).max_abs() < 1e-15);
            }
        }
    }

    #[test]
    fn interaction_examples() {
        let rep = gamma_rep(SpinLabel::Up);
        let mu = Dipole::magnetic(1.0, SpinLabel::Up, 1.0).unwrap();
        let zero = interaction_hamiltonian(&rep, &mu, &sample([0.0; 3], [0.0; 3])).unwrap();
        assert_eq!(zero, Matrix2C::zero());

        // E = ŷ gives Ẽ = x̂, so ΔH = −sμ α_x = −σ_x.
        let h = interaction_hamiltonian(&rep, &mu, &sample([0.0, 1.0, 0.0], [0.0; 3])).unwrap();
        assert_eq!(h, -pauli::x());
    }

    #[test]
    fn interaction_rejects_non_finite() {
        let rep = gamma_rep(SpinLabel::Up);
        let mu = Dipole::magnetic(1.0, SpinLabel::Up, 1.0).unwrap();
        let err = interaction_hamiltonian(&rep, &mu, &sample([f64::NAN, 0.0, 0.0], [0.0; 3]));
        assert!(matches!(err, Err(Error::NonFiniteField { .. })));
    }

    #[test]
    fn spin_label_domain() {
        assert_eq!(SpinLabel::try_from(1).unwrap(), SpinLabel::Up);
        assert_eq!(SpinLabel::try_from(-1).unwrap(), SpinLabel::Down);
        assert!(SpinLabel::try_from(2).is_err());
        assert!(SpinLabel::try_from(0).is_err());
    }

    #[test]
    fn dipole_validation() {
        assert!(Dipole::magnetic(-0.1, SpinLabel::Up, 1.0).is_err());
        assert!(Dipole::magnetic(0.1, SpinLabel::Up, 0.0).is_err());
        assert!(Dipole::electric(f64::INFINITY, SpinLabel::Up, 1.0).is_err());
    }
}
