//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input, 2 a numerical tolerance was not
//! met, 64 usage error.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    clifford_check, contract_dual_sigma_f, contract_sigma_f, dual_sigma_f_tensor_sum, gamma_rep,
    sigma_f_tensor_sum, verify_dual_identity_in, DiracBasis, FieldTensor, SpinLabel,
};
use crate::config::{parse_config, OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::experiments::{
    run_duality_check, run_gauge_check, run_interference_with, sweep, tune_moment, DualitySuite,
    FringeReference, InterferenceOptions, SweepTemplate,
};
use crate::fields::{field_at_with, FieldOptions, SourceKind};
use crate::output::{snapshot_binary, snapshot_csv, Cell, Row, RunRecorder, Schema};
use crate::phases::{phase_breakdown, two_path_delta, SpatialPath};
use crate::quadrature::{integrate, MAX_SUBDIVISIONS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "TDAB_OUTPUT_DIR";

const ALGEBRA_TOL: f64 = 1e-12;
const FARADAY_TOL: f64 = 1e-9;
const DUALITY_PHASE_TOL: f64 = 1e-12;
const DUALITY_FIDELITY_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "tdab", version, about = "Dipole phases around time-dependent flux sources")]
struct Cli {
    /// Suppress the summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    /// Report progress on stderr.
    #[arg(long, global = true)]
    verbose: bool,
    /// Print failures as a JSON object on stderr.
    #[arg(long, global = true)]
    json_errors: bool,
    /// Output directory; overrides the config and TDAB_OUTPUT_DIR.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ConfigArg {
    /// Run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Clifford relations and σF closed forms against brute-force sums.
    VerifyAlgebra {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Fields and loop circulations on probe circles.
    Fields(ConfigArg),
    /// Vector and scalar phases along the configured arms.
    Phase(ConfigArg),
    /// Free and interacting lattice runs and their gauge fidelity.
    Evolve(ConfigArg),
    /// Two-arm lattice interference and fringe shift.
    Interfere(ConfigArg),
    /// Compare phases with the dual configuration.
    DualityCheck(ConfigArg),
    /// Two-arm phase over a parameter grid.
    Sweep(ConfigArg),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyAlgebra { .. } => "verify-algebra",
            Command::Fields(_) => "fields",
            Command::Phase(_) => "phase",
            Command::Evolve(_) => "evolve",
            Command::Interfere(_) => "interfere",
            Command::DualityCheck(_) => "duality-check",
            Command::Sweep(_) => "sweep",
        }
    }

    fn config_path(&self) -> Option<&Path> {
        match self {
            Command::VerifyAlgebra { .. } => None,
            Command::Fields(c)
            | Command::Phase(c)
            | Command::Evolve(c)
            | Command::Interfere(c)
            | Command::DualityCheck(c)
            | Command::Sweep(c) => c.config.as_deref(),
        }
    }
}

struct Ctx {
    quiet: bool,
    verbose: bool,
}

impl Ctx {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }

    fn note(&self, line: impl AsRef<str>) {
        if self.verbose {
            eprintln!("{}", line.as_ref());
        }
    }
}

fn tolerance_miss(what: &str, value: f64, tol: f64) -> Error {
    Error::Tolerance {
        check: what.to_string(),
        value,
        tol,
    }
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_VALIDATION
    }
}

fn report_error(err: &Error, json: bool) -> i32 {
    let code = exit_code(err);
    if json {
        let details = match err {
            Error::Validation(v) => v.clone(),
            _ => Vec::new(),
        };
        let obj = serde_json::json!({
            "status": "error",
            "kind": if code == EXIT_NUMERICAL { "numerical" } else { "validation" },
            "exit_code": code,
            "message": err.to_string(),
            "details": details,
        });
        eprintln!("{obj}");
    } else {
        match err {
            Error::Validation(v) if !v.is_empty() => {
                eprintln!("error: invalid configuration");
                for e in v {
                    eprintln!("  {e}");
                }
            }
            _ => eprintln!("error: {err}"),
        }
    }
    code
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let ctx = Ctx {
        quiet: cli.quiet,
        verbose: cli.verbose,
    };
    match run(&cli, &ctx) {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(&e, cli.json_errors),
    }
}

fn load_config(path: Option<&Path>) -> Result<(RunConfig, String)> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            let cfg = parse_config(&text)?;
            Ok((cfg, text))
        }
        None => {
            let cfg = RunConfig::default();
            let text = cfg.to_text();
            Ok((cfg, text))
        }
    }
}

fn output_dir(cli: &Cli, cfg: &RunConfig) -> PathBuf {
    cli.output_dir
        .clone()
        .or_else(|| cfg.output.directory.as_ref().map(PathBuf::from))
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("tdab-out"))
}

fn run(cli: &Cli, ctx: &Ctx) -> Result<()> {
    let (cfg, text) = load_config(cli.command.config_path())?;
    let dir = output_dir(cli, &cfg);
    let mut rec = RunRecorder::new(&dir, cli.command.name(), &text);
    ctx.note(format!("{}: writing to {}", cli.command.name(), dir.display()));
    let outcome = match &cli.command {
        Command::VerifyAlgebra { samples, seed } => verify_algebra(*samples, *seed, &mut rec, ctx),
        Command::Fields(_) => fields(&cfg, &mut rec, ctx),
        Command::Phase(_) => phase(&cfg, &mut rec, ctx),
        Command::Evolve(_) => evolve(&cfg, &mut rec, ctx),
        Command::Interfere(_) => interfere(&cfg, &mut rec, ctx),
        Command::DualityCheck(_) => duality(&cfg, &mut rec, ctx),
        Command::Sweep(_) => sweep_cmd(&cfg, &mut rec, ctx),
    };
    match outcome {
        Ok(()) => {
            rec.finish()?;
            Ok(())
        }
        Err(e) if !rec.files().is_empty() => {
            rec.finish()?;
            Err(e)
        }
        Err(e) => Err(e),
    }
}

fn check(rec: &mut RunRecorder, stage: &str, what: &str, value: f64, tol: f64) -> Option<Error> {
    rec.tolerance(stage, what, value, Some(tol));
    (!(value <= tol)).then(|| tolerance_miss(what, value, tol))
}

fn random_tensor(rng: &mut ChaCha8Rng) -> FieldTensor {
    let mut v = || rng.random_range(-10.0..10.0);
    FieldTensor::new([v(), v(), v()], [v(), v(), v()])
}

fn verify_algebra(samples: usize, seed: u64, rec: &mut RunRecorder, ctx: &Ctx) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tensors: Vec<FieldTensor> = (0..samples).map(|_| random_tensor(&mut rng)).collect();
    let mut results = Vec::new();
    for s in [SpinLabel::Up, SpinLabel::Down] {
        let rep = gamma_rep(s);
        results.push((format!("clifford_s{:+}", s.as_i8()), clifford_check(&rep), 0.0));
        let worst = tensors
            .iter()
            .map(|f| contract_sigma_f(&rep, f).max_abs_diff(&sigma_f_tensor_sum(&rep, f)))
            .fold(0.0, f64::max);
        results.push((format!("sigma_f_closed_form_s{:+}", s.as_i8()), worst, ALGEBRA_TOL));
    }
    let worst = tensors
        .iter()
        .map(|f| contract_dual_sigma_f(f).max_abs_diff(&dual_sigma_f_tensor_sum(f)))
        .fold(0.0, f64::max);
    results.push(("dual_sigma_f_closed_form".into(), worst, ALGEBRA_TOL));
    for (name, basis) in [("dirac", DiracBasis::Dirac), ("chiral", DiracBasis::Chiral)] {
        let worst = tensors
            .iter()
            .map(|f| verify_dual_identity_in(basis, f))
            .fold(0.0, f64::max);
        results.push((format!("gamma5_dual_identity_{name}"), worst, ALGEBRA_TOL));
    }
    let rows: Vec<Row> = results
        .iter()
        .map(|(n, v, t)| vec![n.as_str().into(), (*v).into(), (*t).into(), Cell::Int((*v <= *t) as i64)])
        .collect();
    rec.write_table("algebra.csv", &rows, &Schema::new(&["check", "max_deviation", "tolerance", "pass"]))?;
    let mut first_miss = None;
    for (name, value, tol) in &results {
        ctx.say(format!("{name:<32} {value:.3e}  (tol {tol:.0e})"));
        if let Some(e) = check(rec, "algebra", name, *value, *tol) {
            first_miss.get_or_insert(e);
        }
    }
    first_miss.map_or(Ok(()), Err)
}

fn fields(cfg: &RunConfig, rec: &mut RunRecorder, ctx: &Ctx) -> Result<()> {
    let source = cfg.source_config()?;
    let opts = FieldOptions {
        second_order: cfg.numerics.second_order,
    };
    let a = source.radius;
    let sign = match source.kind {
        SourceKind::MagneticSolenoid => 1.0,
        SourceKind::ElectricFluxTube => -1.0,
    };
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &r in &cfg.geometry.probe_radii {
        for &t in &cfg.geometry.probe_times {
            let sample = field_at_with(&source, r, 0.0, t, opts)?;
            let circulation = integrate(
                |th| {
                    let (s, c) = th.sin_cos();
                    let f = field_at_with(&source, r * c, r * s, t, opts).map(|f| match source.kind {
                        SourceKind::MagneticSolenoid => -s * f.e[0] + c * f.e[1],
                        SourceKind::ElectricFluxTube => -s * f.b[0] + c * f.b[1],
                    });
                    r * f.unwrap_or(f64::NAN)
                },
                0.0,
                2.0 * PI,
                1e-13 * (1.0 + r),
                MAX_SUBDIVISIONS,
            )?
            .value;
            let rate = source.flux_state(t)?.rate * (r.min(a) / a).powi(2);
            let residual = circulation + sign * rate;
            let rel = residual.abs() / rate.abs().max(1e-300);
            if rate != 0.0 {
                worst = worst.max(rel);
            }
            rows.push(vec![
                r.into(),
                t.into(),
                sample.e[0].into(),
                sample.e[1].into(),
                sample.e[2].into(),
                sample.b[0].into(),
                sample.b[1].into(),
                sample.b[2].into(),
                circulation.into(),
                rate.into(),
                residual.into(),
            ]);
        }
    }
    let schema = Schema::new(&[
        "r", "t", "ex", "ey", "ez", "bx", "by", "bz", "circulation", "enclosed_flux_rate", "loop_residual",
    ]);
    rec.write_table("fields.csv", &rows, &schema)?;
    ctx.say(format!("{} probes, worst relative loop residual {worst:.3e}", rows.len()));
    check(rec, "fields", "loop_residual_relative", worst, FARADAY_TOL).map_or(Ok(()), Err)
}

fn phase(cfg: &RunConfig, rec: &mut RunRecorder, ctx: &Ctx) -> Result<()> {
    let source = cfg.source_config()?;
    let dipole = cfg.dipole()?;
    let (upper, lower) = cfg.trajectories()?;
    let second = cfg.numerics.second_order;
    let drop = cfg.numerics.drop_scalar;
    let u = phase_breakdown(&source, &dipole, &upper, second)?;
    let l = phase_breakdown(&source, &dipole, &lower, second)?;
    let delta = two_path_delta(&source, &dipole, &upper, &lower)?;
    let kept = |b: &crate::phases::PhaseBreakdown| if drop { b.vector_phase } else { b.total };
    let rows: Vec<Row> = vec![
        vec!["upper".into(), u.vector_phase.into(), u.scalar_phase.into(), kept(&u).into()],
        vec!["lower".into(), l.vector_phase.into(), l.scalar_phase.into(), kept(&l).into()],
        vec![
            "difference".into(),
            delta.into(),
            (u.scalar_phase - l.scalar_phase).into(),
            (kept(&u) - kept(&l)).into(),
        ],
    ];
    rec.write_table("phase.csv", &rows, &Schema::new(&["arm", "vector_phase", "scalar_phase", "phase"]))?;
    ctx.say(format!("two-path phase {delta:.12e} rad"));
    Ok(())
}

fn evolve(cfg: &RunConfig, rec: &mut RunRecorder, ctx: &Ctx) -> Result<()> {
    let source = cfg.source_config()?;
    let dipole = cfg.dipole()?;
    let case = cfg.lattice_case()?;
    ctx.note(format!("evolving {} steps on {}x{}", case.evolve.n_steps, case.lattice.nx, case.lattice.ny));
    let res = run_gauge_check(&source, &dipole, &case)?;
    let n0 = res.interacting.norms[0].norm_sqr;
    let rows: Vec<Row> = res
        .free
        .norms
        .iter()
        .zip(&res.interacting.norms)
        .map(|(f, i)| vec![i.t.into(), f.norm_sqr.into(), i.norm_sqr.into(), i.sponge_loss.into(), i.solver_drift(n0).into()])
        .collect();
    rec.write_table(
        "norms.csv",
        &rows,
        &Schema::new(&["t", "free_norm_sqr", "interacting_norm_sqr", "sponge_loss", "solver_drift"]),
    )?;
    let summary: Vec<Row> = vec![
        vec!["gauge_fidelity".into(), res.fidelity.into()],
        vec!["max_residual".into(), res.interacting.max_residual.into()],
        vec!["max_iterations".into(), Cell::Int(res.interacting.max_iterations_used as i64)],
        vec!["max_zone_edge_weight".into(), res.interacting.max_zone_edge_weight.into()],
        vec!["max_solver_drift".into(), res.interacting.max_solver_drift().into()],
    ];
    rec.write_table("evolve.csv", &summary, &Schema::new(&["quantity", "value"]))?;
    for fmt in &cfg.output.formats {
        match fmt {
            OutputFormat::Csv => {
                let text = snapshot_csv(&res.interacting.final_state)?;
                rec.write_bytes("snapshot.csv", text.as_bytes())?;
            }
            OutputFormat::Binary => rec.write_bytes("snapshot.bin", &snapshot_binary(&res.interacting.final_state))?,
        }
    }
    rec.tolerance("evolve", "solver_residual", res.interacting.max_residual, Some(case.evolve.solver_tolerance));
    rec.tolerance("evolve", "zone_edge_weight", res.interacting.max_zone_edge_weight, Some(case.evolve.zone_edge_threshold));
    rec.tolerance("evolve", "solver_drift", res.interacting.max_solver_drift(), None);
    ctx.say(format!("gauge fidelity {:.12}", res.fidelity));
    Ok(())
}

fn interfere(cfg: &RunConfig, rec: &mut RunRecorder, ctx: &Ctx) -> Result<()> {
    let source = cfg.source_config()?;
    let mut dipole = cfg.dipole()?;
    let geometry = cfg.interference_geometry()?;
    if let Some(target) = cfg.geometry.target_phase {
        dipole.moment = tune_moment(&source, &dipole, &geometry, target)?;
        ctx.note(format!("moment tuned to {}", dipole.moment));
    }
    let options = InterferenceOptions {
        reference: FringeReference::FluxReversal,
        report_field_free: true,
    };
    let res = run_interference_with(&source, &dipole, &geometry, &cfg.evolve_config(), options)?;
    let rows: Vec<Row> = res
        .pattern
        .coords
        .iter()
        .zip(&res.pattern.intensity)
        .zip(&res.reference.intensity)
        .map(|((u, i), r)| vec![(*u).into(), (*i).into(), (*r).into()])
        .collect();
    rec.write_table("screen.csv", &rows, &Schema::new(&["u", "intensity", "reference_intensity"]))?;
    let summary: Vec<Row> = vec![
        vec!["moment".into(), dipole.moment.into()],
        vec!["fringe_shift".into(), res.fringe_shift.into()],
        vec!["predicted_delta".into(), res.predicted_delta.into()],
        vec!["relative_error".into(), res.relative_error.into()],
        vec!["absolute_error".into(), res.absolute_error.into()],
        vec!["field_free_shift".into(), res.field_free_shift.into()],
        vec!["contrast".into(), res.contrast.into()],
        vec!["fringe_wavenumber".into(), res.fringe_wavenumber.into()],
        vec!["arrival_time".into(), res.arrival_time.into()],
        vec!["dt".into(), res.dt.into()],
        vec!["steps".into(), Cell::Int(res.steps as i64)],
    ];
    rec.write_table("interference.csv", &summary, &Schema::new(&["quantity", "value"]))?;
    rec.tolerance("interfere", "solver_residual", res.max_residual, Some(cfg.numerics.solver_tolerance));
    rec.tolerance("interfere", "fringe_contrast", res.contrast, None);
    ctx.say(format!(
        "fringe shift {:.6} rad, predicted {:.6} rad, contrast {:.3}",
        res.fringe_shift, res.predicted_delta, res.contrast
    ));
    Ok(())
}

fn duality(cfg: &RunConfig, rec: &mut RunRecorder, ctx: &Ctx) -> Result<()> {
    let source = cfg.source_config()?;
    let dipole = cfg.dipole()?;
    let (upper, lower) = cfg.trajectories()?;
    let t0 = upper.start().t;
    let snapshot = |traj: &crate::phases::Trajectory| {
        SpatialPath::new(traj.samples().iter().map(|p| [p.x, p.y]).collect(), t0, false)
    };
    let mut paths = vec![snapshot(&upper)?, snapshot(&lower)?];
    for &r in cfg.geometry.probe_radii.iter().filter(|r| **r > source.radius) {
        paths.push(SpatialPath::circle(r, 64, t0)?);
    }
    let lattice = if cfg.numerics.lattice_duality {
        vec![cfg.lattice_case()?]
    } else {
        Vec::new()
    };
    let suite = DualitySuite {
        paths,
        trajectories: vec![upper, lower],
        scalar_second_order: cfg.numerics.second_order,
        lattice,
    };
    let report = run_duality_check(&source, &dipole, &suite)?;
    let rows: Vec<Row> = report
        .phase_rows
        .iter()
        .map(|r| ("phase", r))
        .chain(report.fidelity_rows.iter().map(|r| ("fidelity", r)))
        .map(|(kind, r)| {
            vec![
                kind.into(),
                r.label.as_str().into(),
                r.original.into(),
                r.dual.into(),
                r.double_dual.into(),
                r.discrepancy().into(),
                r.double_discrepancy().into(),
            ]
        })
        .collect();
    rec.write_table(
        "duality.csv",
        &rows,
        &Schema::new(&["kind", "label", "original", "dual", "double_dual", "discrepancy", "double_discrepancy"]),
    )?;
    ctx.say(format!(
        "max phase discrepancy {:.3e}, double duality {:.3e}, fidelity gap {:.3e}",
        report.max_phase_discrepancy, report.max_double_discrepancy, report.max_fidelity_gap
    ));
    check(rec, "duality", "phase_discrepancy", report.max_phase_discrepancy, DUALITY_PHASE_TOL)
        .or_else(|| check(rec, "duality", "double_discrepancy", report.max_double_discrepancy, DUALITY_PHASE_TOL))
        .or_else(|| check(rec, "duality", "fidelity_gap", report.max_fidelity_gap, DUALITY_FIDELITY_TOL))
        .map_or(Ok(()), Err)
}

fn sweep_cmd(cfg: &RunConfig, rec: &mut RunRecorder, ctx: &Ctx) -> Result<()> {
    let (upper, lower) = cfg.trajectories()?;
    let template = SweepTemplate {
        source: cfg.source_config()?,
        dipole: cfg.dipole()?,
        upper,
        lower,
        lattice: if cfg.sweep.fidelity {
            Some(cfg.lattice_case()?)
        } else {
            None
        },
    };
    let grid = cfg.parameter_grid();
    ctx.note(format!("sweeping {} tuples", grid.len()));
    let result = sweep(&template, &grid);
    let rows: Vec<Row> = result
        .rows
        .iter()
        .map(|r| {
            vec![
                r.point.radius.into(),
                r.point.amplitude.into(),
                r.point.angular_frequency.into(),
                r.point.moment.into(),
                Cell::Int(r.point.s.as_i8() as i64),
                r.delta.into(),
                r.fidelity.into(),
                r.error.clone().into(),
            ]
        })
        .collect();
    rec.write_table(
        "sweep.csv",
        &rows,
        &Schema::new(&["radius", "amplitude", "angular_frequency", "moment", "s", "delta", "fidelity", "error"]),
    )?;
    let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
    ctx.say(format!("{} rows, {failed} failed", result.rows.len()));
    Ok(())
}
