//! Reference computations written from scratch for the integration tests.
//! Nothing here calls into the library's algebra or quadrature.

#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type M<const N: usize> = [[C; N]; N];

pub const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn zero<const N: usize>() -> M<N> {
    [[c(0.0, 0.0); N]; N]
}

pub fn eye<const N: usize>() -> M<N> {
    let mut m = zero();
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = c(1.0, 0.0);
    }
    m
}

pub fn mul<const N: usize>(a: &M<N>, b: &M<N>) -> M<N> {
    let mut out = zero();
    for i in 0..N {
        for j in 0..N {
            for k in 0..N {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn add<const N: usize>(a: &M<N>, b: &M<N>) -> M<N> {
    let mut out = *a;
    for i in 0..N {
        for j in 0..N {
            out[i][j] += b[i][j];
        }
    }
    out
}

pub fn scale<const N: usize>(a: &M<N>, z: C) -> M<N> {
    let mut out = *a;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v *= z;
        }
    }
    out
}

pub fn comm<const N: usize>(a: &M<N>, b: &M<N>) -> M<N> {
    add(&mul(a, b), &scale(&mul(b, a), c(-1.0, 0.0)))
}

pub fn max_diff<const N: usize>(a: &M<N>, b: &M<N>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst
}

pub fn sx() -> M<2> {
    [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn sy() -> M<2> {
    [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]
}

pub fn sz() -> M<2> {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]
}

/// Planar γ^0, γ^1, γ^2 for spin label `s`: β = σz, α = (σx, sσy), γ^i = βα_i.
pub fn planar_gammas(s: f64) -> [M<2>; 3] {
    let beta = sz();
    let ax = sx();
    let ay = scale(&sy(), c(s, 0.0));
    [beta, mul(&beta, &ax), mul(&beta, &ay)]
}

/// 4×4 from 2×2 blocks.
pub fn blocks(a: &M<2>, b: &M<2>, cc: &M<2>, d: &M<2>) -> M<4> {
    let mut out = zero();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][j];
            out[i][j + 2] = b[i][j];
            out[i + 2][j] = cc[i][j];
            out[i + 2][j + 2] = d[i][j];
        }
    }
    out
}

pub fn dirac_gammas() -> [M<4>; 4] {
    let z = zero::<2>();
    let i2 = eye::<2>();
    let neg = |m: &M<2>| scale(m, c(-1.0, 0.0));
    [
        blocks(&i2, &z, &z, &neg(&i2)),
        blocks(&z, &sx(), &neg(&sx()), &z),
        blocks(&z, &sy(), &neg(&sy()), &z),
        blocks(&z, &sz(), &neg(&sz()), &z),
    ]
}

pub fn chiral_gammas() -> [M<4>; 4] {
    let z = zero::<2>();
    let i2 = eye::<2>();
    let neg = |m: &M<2>| scale(m, c(-1.0, 0.0));
    [
        blocks(&z, &i2, &i2, &z),
        blocks(&z, &sx(), &neg(&sx()), &z),
        blocks(&z, &sy(), &neg(&sy()), &z),
        blocks(&z, &sz(), &neg(&sz()), &z),
    ]
}

/// Sign of a permutation of distinct indices, 0 on repeats.
pub fn epsilon(idx: [usize; 4]) -> f64 {
    let mut p = idx;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if p[i] == p[j] {
                return 0.0;
            }
        }
    }
    let mut sign = 1.0;
    for i in 0..4 {
        while p[i] != i {
            let k = p[i];
            p.swap(i, k);
            sign = -sign;
        }
    }
    sign
}

/// F^{μν}: F^{i0} = E^i, F^{ij} = −ε^{ijk}B^k.
pub fn f_upper(e: [f64; 3], b: [f64; 3]) -> [[f64; 4]; 4] {
    let mut f = [[0.0; 4]; 4];
    for i in 0..3 {
        f[i + 1][0] = e[i];
        f[0][i + 1] = -e[i];
        for j in 0..3 {
            for k in 0..3 {
                f[i + 1][j + 1] -= epsilon([0, i + 1, j + 1, k + 1]) * b[k];
            }
        }
    }
    f
}

pub fn lower(f: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for m in 0..4 {
        for n in 0..4 {
            out[m][n] = ETA[m] * ETA[n] * f[m][n];
        }
    }
    out
}

/// F̃^{μν} = ½ ε^{μναβ} F_{αβ}.
pub fn dual_upper(f: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let lo = lower(f);
    let mut out = [[0.0; 4]; 4];
    for m in 0..4 {
        for n in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    out[m][n] += 0.5 * epsilon([m, n, a, b]) * lo[a][b];
                }
            }
        }
    }
    out
}

/// Σ_{μ,ν<3} (i/2)[γ^μ, γ^ν] F_{μν} for the planar representation.
pub fn planar_sigma_f(s: f64, e: [f64; 3], b: [f64; 3]) -> M<2> {
    let g = planar_gammas(s);
    let lo = lower(&f_upper(e, b));
    let mut out = zero();
    for m in 0..3 {
        for n in 0..3 {
            let sigma = scale(&comm(&g[m], &g[n]), c(0.0, 0.5));
            out = add(&out, &scale(&sigma, c(lo[m][n], 0.0)));
        }
    }
    out
}

/// Σ_{α,β<3} σ_{αβ} F̃^{αβ} in the Dirac basis.
pub fn planar_dual_sigma_f(e: [f64; 3], b: [f64; 3]) -> M<4> {
    let g = dirac_gammas();
    let dual = dual_upper(&f_upper(e, b));
    let mut out = zero();
    for a in 0..3 {
        for bb in 0..3 {
            let sigma = scale(&comm(&g[a], &g[bb]), c(0.0, 0.5 * ETA[a] * ETA[bb]));
            out = add(&out, &scale(&sigma, c(dual[a][bb], 0.0)));
        }
    }
    out
}

/// Max deviation of (i/2)σ^{μν}γ⁵F_{μν} from −½σ_{αβ}F̃^{αβ} in a basis.
pub fn dual_identity_gap(g: &[M<4>; 4], e: [f64; 3], b: [f64; 3]) -> f64 {
    let g5 = scale(&mul(&mul(&g[0], &g[1]), &mul(&g[2], &g[3])), c(0.0, 1.0));
    let f = f_upper(e, b);
    let lo = lower(&f);
    let dual = dual_upper(&f);
    let mut lhs = zero();
    let mut rhs = zero();
    for m in 0..4 {
        for n in 0..4 {
            let sigma = scale(&comm(&g[m], &g[n]), c(0.0, 0.5));
            lhs = add(&lhs, &scale(&mul(&sigma, &g5), c(0.0, 0.5 * lo[m][n])));
            let sigma_lo = scale(&sigma, c(ETA[m] * ETA[n], 0.0));
            rhs = add(&rhs, &scale(&sigma_lo, c(-0.5 * dual[m][n], 0.0)));
        }
    }
    max_diff(&lhs, &rhs)
}

/// Uniform random field components in [−10, 10].
pub fn random_fields(seed: u64, count: usize) -> Vec<([f64; 3], [f64; 3])> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut draw = || std::array::from_fn(|_| rng.random_range(-10.0..10.0));
            let e = draw();
            let b = draw();
            (e, b)
        })
        .collect()
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Trapezoid rule around the circle of radius r; exponentially accurate
/// for smooth periodic integrands.
pub fn circulation<F: Fn(f64, f64) -> [f64; 2]>(field: F, r: f64, n: usize) -> f64 {
    let mut acc = 0.0;
    for k in 0..n {
        let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let (s, co) = th.sin_cos();
        let v = field(r * co, r * s);
        acc += v[0] * (-s) + v[1] * co;
    }
    acc * 2.0 * std::f64::consts::PI * r / n as f64
}

/// ‖a − b‖ for two spinor grids with the given cell area.
pub fn l2_gap(a: &[C], b: &[C], a2: &[C], b2: &[C], area: f64) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>()
        + a2.iter().zip(b2).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>();
    (s * area).sqrt()
}

/// A random configuration that passes validation. Values span many
/// magnitudes so float formatting gets exercised.
pub fn random_config(rng: &mut ChaCha8Rng) -> tdab::config::RunConfig {
    use tdab::algebra::{DipoleKind, SpinLabel};
    use tdab::config::{OutputFormat, RunConfig, WaveformKind};
    use tdab::fields::SourceKind;
    use tdab::phases::TimedPoint;

    let any = |rng: &mut ChaCha8Rng| -> f64 {
        let mant: f64 = rng.random_range(-1.0..1.0);
        mant * 10f64.powi(rng.random_range(-8..8))
    };
    let pos = |rng: &mut ChaCha8Rng| -> f64 { rng.random_range(1e-3..1e3) * 10f64.powi(rng.random_range(-3..3)) };
    let spin = |rng: &mut ChaCha8Rng| if rng.random_bool(0.5) { SpinLabel::Up } else { SpinLabel::Down };
    let mut c = RunConfig::default();

    let magnetic = rng.random_bool(0.5);
    c.source.kind = if magnetic { SourceKind::MagneticSolenoid } else { SourceKind::ElectricFluxTube };
    c.dipole.kind = if magnetic { DipoleKind::Magnetic } else { DipoleKind::Electric };
    c.source.radius = pos(rng);
    c.source.amplitude = any(rng);
    c.source.angular_frequency = pos(rng);
    c.source.waveform = match rng.random_range(0..4) {
        0 => WaveformKind::Constant,
        1 => WaveformKind::LinearRamp,
        2 => WaveformKind::Sinusoidal,
        _ => WaveformKind::Tabulated,
    };
    if c.source.waveform == WaveformKind::Tabulated {
        let n = rng.random_range(2..7);
        let mut t = any(rng);
        for _ in 0..n {
            c.source.table_times.push(t);
            c.source.table_values.push(any(rng));
            t += pos(rng);
        }
    }
    c.dipole.moment = any(rng).abs();
    c.dipole.s = spin(rng);
    c.dipole.mass = pos(rng);

    let path = |rng: &mut ChaCha8Rng| -> Vec<TimedPoint> {
        (0..rng.random_range(2..5)).map(|_| TimedPoint::new(any(rng), any(rng), any(rng))).collect()
    };
    let g = &mut c.geometry;
    g.upper = path(rng);
    g.lower = path(rng);
    g.probe_radii = (0..rng.random_range(0..4)).map(|_| pos(rng)).collect();
    g.probe_times = (0..rng.random_range(0..4)).map(|_| any(rng)).collect();
    g.grid = 1 << rng.random_range(3..10);
    g.center = [any(rng), any(rng)];
    g.packet_center = [any(rng), any(rng)];
    g.packet_momentum = [any(rng), any(rng)];
    g.packet_width = pos(rng);
    g.start_time = any(rng);
    g.screen = [any(rng), any(rng)];
    g.arm_length = pos(rng);
    g.half_angle = rng.random_range(0.01..1.5);
    g.arm_momentum = pos(rng);
    g.target_phase = rng.random_bool(0.5).then(|| any(rng));

    let n = &mut c.numerics;
    n.dx = pos(rng);
    n.dt = pos(rng);
    n.n_steps = rng.random_range(0..100_000);
    n.solver_tolerance = pos(rng);
    n.max_iterations = rng.random_range(1..1000);
    n.energy_reference = any(rng);
    n.sponge_width = rng.random_range(0.001..0.499);
    n.sponge_strength = pos(rng);
    n.zone_edge_threshold = pos(rng);
    n.second_order = rng.random_bool(0.5);
    n.drop_scalar = rng.random_bool(0.5);
    n.gauge_start = rng.random_bool(0.5);
    n.record_every = rng.random_range(0..50);
    n.lattice_duality = rng.random_bool(0.5);

    c.output.directory = rng
        .random_bool(0.5)
        .then(|| format!("runs/out-{}", rng.random_range(0..10_000)));
    c.output.formats = match rng.random_range(0..3) {
        0 => vec![OutputFormat::Csv],
        1 => vec![OutputFormat::Binary],
        _ => vec![OutputFormat::Csv, OutputFormat::Binary],
    };

    let w = &mut c.sweep;
    w.radius = (0..rng.random_range(1..4)).map(|_| pos(rng)).collect();
    w.amplitude = (0..rng.random_range(1..4)).map(|_| any(rng)).collect();
    w.angular_frequency = (0..rng.random_range(1..4)).map(|_| pos(rng)).collect();
    w.moment = (0..rng.random_range(1..4)).map(|_| any(rng).abs()).collect();
    w.spin = (0..rng.random_range(1..3)).map(|_| spin(rng)).collect();
    w.fidelity = rng.random_bool(0.5);
    c
}
