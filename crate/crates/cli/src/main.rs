use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use curvint::dynamics::{integrate, IntegratorConfig, Method};
use curvint::exact_poisson::{verify_casimir, verify_structure_constants, verify_vector_rep};
use curvint::generators::phase_map;
use curvint::geometry::{constraint_residual, polar_to_ambient, PolarCoords, SpaceSpec};
use curvint::harness::{
    certified_integrals, random_betas, system_of, verify, RunOptions, SampleConfig, BRACKET_TOL,
};
use curvint::observables::{hamiltonian, Betas, RadialFn, SystemKind};
use curvint::PhasePoint;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "curvint",
    version,
    about = "Integrable systems on constant-curvature spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the randomized certificates for one or all propositions.
    Verify(VerifyArgs),
    /// Integrate a Hamiltonian and write the trajectory as CSV.
    Simulate(SimulateArgs),
    /// Exact polynomial certificates of the Lie-Poisson algebra.
    Brackets(BracketsArgs),
    /// Map polar coordinates (and momenta) to the ambient space.
    Map(MapArgs),
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, allow_hyphen_values = true)]
    k1: f64,
    #[arg(long, allow_hyphen_values = true)]
    k2: f64,
}

impl SpaceArgs {
    fn spec(&self) -> Result<SpaceSpec> {
        Ok(SpaceSpec::new(self.dim, self.k1, self.k2)?)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SystemArg {
    Free,
    Central,
    Sw,
    Gkc,
    Kc,
}

#[derive(Args)]
struct BetaArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
    beta0: f64,
    /// β_1..β_N, comma separated; drawn from the seed when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    beta: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    k: f64,
}

impl BetaArgs {
    fn betas(&self, dim: usize, seed: u64) -> Result<Betas> {
        match &self.beta {
            Some(v) if v.len() != dim => bail!("--beta needs {dim} values, got {}", v.len()),
            Some(v) => Ok(Betas::new(self.beta0, v.clone(), self.k)),
            None => Ok(random_betas(dim, seed, self.beta0, self.k)),
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// 1..7 or "all".
    #[arg(long, default_value = "all")]
    prop: String,
    /// Restrict "all" to the propositions about this system.
    #[arg(long)]
    system: Option<SystemArg>,
    /// Fix the index i of propositions 5 and 6.
    #[arg(long)]
    i: Option<usize>,
    #[command(flatten)]
    betas: BetaArgs,
    #[arg(long, default_value_t = 24)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = BRACKET_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long, default_value = "sw")]
    system: SystemArg,
    /// Index of the generalized Kepler system.
    #[arg(long, default_value_t = 1)]
    i: usize,
    #[command(flatten)]
    betas: BetaArgs,
    /// Coefficients of the central term c1 Tk + c2 Ck.
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    c1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -0.5)]
    c2: f64,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    q0: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    p0: Vec<f64>,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    #[arg(long, default_value_t = 1)]
    stride: usize,
    #[arg(long, value_enum, default_value = "midpoint")]
    method: MethodArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Midpoint,
    Rk4,
}

#[derive(Args)]
struct BracketsArgs {
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    dim: usize,
    /// Write the residual polynomials (empty on success) to this file.
    #[arg(long)]
    golden: Option<PathBuf>,
}

#[derive(Args)]
struct MapArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    coords: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    with_momenta: Option<Vec<f64>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(a) => run_verify(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Brackets(a) => run_brackets(a),
        Command::Map(a) => run_map(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn props_for(prop: &str, system: Option<SystemArg>) -> Result<Vec<u8>> {
    let wanted = |p: u8| {
        system.is_none_or(|s| {
            let name = match s {
                SystemArg::Free => "free",
                SystemArg::Central => "central",
                SystemArg::Sw => "sw",
                SystemArg::Gkc => "gkc",
                SystemArg::Kc => "kc",
            };
            system_of(p) == name
        })
    };
    if prop == "all" {
        return Ok((1..=7).filter(|&p| wanted(p)).collect());
    }
    let p: u8 = prop.parse().context("--prop must be 1..7 or all")?;
    if !(1..=7).contains(&p) {
        bail!("--prop must be 1..7 or all");
    }
    if !wanted(p) {
        bail!("proposition {p} is about the {} system", system_of(p));
    }
    Ok(vec![p])
}

fn run_verify(a: VerifyArgs) -> Result<bool> {
    let spec = a.space.spec()?;
    let props = props_for(&a.prop, a.system)?;
    let b = a.betas.betas(spec.dim, a.seed)?;
    let cfg = SampleConfig::for_spec(&spec, a.samples, a.seed);
    let opts = RunOptions {
        index: a.i,
        tol: a.tol,
    };
    let report = verify(&spec, &props, &b, &cfg, &opts)?;
    emit(&a.out, &report.to_json())?;
    Ok(report.overall_pass)
}

/// 17 significant digits.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn run_simulate(a: SimulateArgs) -> Result<bool> {
    let spec = a.space.spec()?;
    let n = spec.dim;
    let system = match a.system {
        SystemArg::Free => SystemKind::Free,
        SystemArg::Central => SystemKind::Central(RadialFn::Mixed { c1: a.c1, c2: a.c2 }),
        SystemArg::Sw => SystemKind::SW,
        SystemArg::Gkc => SystemKind::GKC(a.i),
        SystemArg::Kc => SystemKind::KC,
    };
    let mut b = a.betas.betas(n, 0)?;
    if a.betas.beta.is_none() {
        b = Betas::new(b.beta0, vec![0.0; n], b.k);
    }
    let h = hamiltonian(&spec, system, &b)?;
    let monitors = certified_integrals(&spec, system, &b)?;
    let z0 = PhasePoint::new(a.q0, a.p0)?;
    let method = match a.method {
        MethodArg::Midpoint => Method::ImplicitMidpoint,
        MethodArg::Rk4 => Method::Rk4,
    };
    let cfg = IntegratorConfig::new(method, a.dt, a.steps).with_stride(a.stride);
    let (traj, failure) = match integrate(&h, &z0, &cfg, &monitors, Some(&spec)) {
        Ok(t) => (t, None),
        Err(e) => (e.partial, Some(e.error)),
    };

    let mut header = vec!["t".to_string(), "r".into(), "theta".into()];
    header.extend((3..=n).map(|s| format!("phi{s}")));
    header.extend(["p_r".to_string(), "p_theta".into()]);
    header.extend((3..=n).map(|s| format!("p_phi{s}")));
    header.push("H".into());
    header.extend(traj.monitors.iter().map(|(name, _)| name.clone()));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for (k, (t, z)) in traj.samples.iter().enumerate() {
        let mut row = vec![fmt(*t)];
        row.extend(z.to_vec().into_iter().map(fmt));
        row.push(fmt(traj.energy[k]));
        row.extend(traj.monitors.iter().map(|(_, v)| fmt(v[k])));
        w.write_record(&row)?;
    }
    let text = String::from_utf8(w.into_inner()?)?;
    emit(&a.out, &text)?;
    match failure {
        None => Ok(true),
        Some(e) => {
            eprintln!("integration stopped: {e}");
            Ok(false)
        }
    }
}

fn run_brackets(a: BracketsArgs) -> Result<bool> {
    if !a.exact {
        bail!("only --exact certificates are available");
    }
    let reports = [
        ("structure_constants", verify_structure_constants(a.dim)?),
        ("casimir", verify_casimir(a.dim)?),
        ("vector_representation", verify_vector_rep(a.dim)?),
    ];
    let pass = reports.iter().all(|(_, r)| r.pass());
    let summary = json!({
        "dim": a.dim,
        "certificates": reports.iter().map(|(name, r)| json!({
            "name": name,
            "checked": r.pairs_checked,
            "failures": r.failures,
            "pass": r.pass(),
        })).collect::<Vec<_>>(),
        "overall_pass": pass,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    if let Some(path) = &a.golden {
        let text: String = reports
            .iter()
            .map(|(name, r)| format!("# {name}\n{}", r.golden()))
            .collect();
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(pass)
}

fn run_map(a: MapArgs) -> Result<bool> {
    let spec = a.space.spec()?;
    if a.coords.len() != spec.dim {
        bail!("--coords needs {} values, got {}", spec.dim, a.coords.len());
    }
    let x = polar_to_ambient(&spec, &PolarCoords(a.coords.clone()));
    let mut out = json!({
        "ambient": x.as_slice(),
        "constraint_residual": constraint_residual(&spec, &x),
    });
    if let Some(p) = a.with_momenta {
        let z = PhasePoint::new(a.coords, p)?;
        let az = phase_map(&spec, &z)?;
        out["ambient_momenta"] = json!(az.p);
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(true)
}
