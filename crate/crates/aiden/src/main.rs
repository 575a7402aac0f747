use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use aiden::bench::{
    render_convergence, render_runtime_table, run_convergence, run_runtime_eval, runtime_to_json,
    trial_request, BenchError, ConvergenceSpec, RuntimeStats,
};
use aiden::survey::{analysis_to_json, read_matrix, render_analysis};
use aiden::{load_profile, serve, ClassRef, Client, FixtureStore, ServerConfig, World};
use aiden_core::stats::analyze;
use aiden_core::{BackendProfile, FunctionKind};
use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "aiden", version, about = "Guidance simulator, offload server and evaluation tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the offload server.
    Serve(ServeArgs),
    /// Runtime and convergence benchmarks.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Descriptive and inferential statistics over questionnaire responses.
    Stats(StatsArgs),
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 7878)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Backend latency profile (JSON); defaults to the measured runtimes.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Scene file (JSON); defaults to a built-in room.
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Fixture texts (JSON object); defaults to built-in captions.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Multiplies every latency mean and std.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Also accept WebSocket upgrades and static page requests on this port.
    #[arg(long)]
    ws_port: Option<u16>,
    /// Directory with the steering page, served on the WebSocket port.
    #[arg(long, requires = "ws_port")]
    ui: Option<PathBuf>,
    /// Camera step for guide requests, degrees.
    #[arg(long, default_value_t = 2.0)]
    step_deg: f64,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Sequential trials of one functionality against a running server.
    Runtime(RuntimeArgs),
    /// Closed-loop guidance campaigns over seeded starting poses.
    Converge(ConvergeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Scene,
    Ocr,
    Find,
}

impl From<KindArg> for FunctionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Scene => FunctionKind::SceneDescribe,
            KindArg::Ocr => FunctionKind::Ocr,
            KindArg::Find => FunctionKind::FindObject,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct RuntimeArgs {
    #[arg(long, value_enum, num_args = 1.., required = true)]
    kind: Vec<KindArg>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value = "127.0.0.1:7878")]
    endpoint: String,
    #[arg(long, default_value = "street_sign")]
    fixture: String,
    #[arg(long, default_value = "cup")]
    target: String,
    #[arg(long, default_value_t = 30.0)]
    timeout_s: f64,
    /// Fail unless server means are within 3 standard errors of this profile times --check-scale.
    #[arg(long)]
    check_scale: Option<f64>,
    /// Profile for --check-scale; defaults to the measured runtimes.
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Number of seeds, starting at --first-seed.
    #[arg(long, default_value_t = 100)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    first_seed: u64,
    #[arg(long, default_value_t = 2.0)]
    gain: f64,
    /// Overrides the scene's dropout probability.
    #[arg(long)]
    dropout: Option<f64>,
    /// Overrides the scene's corner jitter, pixels.
    #[arg(long)]
    pixel_sigma: Option<f64>,
    /// Target class; defaults to the scene's target.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, default_value_t = 200)]
    budget: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 2000)]
    bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Serve(a) => cmd_serve(a),
        Command::Bench(BenchCommand::Runtime(a)) => cmd_runtime(a),
        Command::Bench(BenchCommand::Converge(a)) => cmd_converge(a),
        Command::Stats(a) => cmd_stats(a),
    }
}

fn profile_or_default(path: Option<&PathBuf>) -> anyhow::Result<BackendProfile> {
    path.map_or_else(|| Ok(BackendProfile::measured()), |p| load_profile(p))
}

fn cmd_serve(a: ServeArgs) -> anyhow::Result<ExitCode> {
    let config = ServerConfig {
        profile: profile_or_default(a.profile.as_ref())?.scaled(a.scale)?,
        world: a.scene.as_deref().map_or_else(|| Ok(World::demo()), World::load)?,
        fixtures: a
            .fixtures
            .as_deref()
            .map_or_else(|| Ok(FixtureStore::builtin()), FixtureStore::load)?,
        seed: a.seed,
        step_deg: a.step_deg,
        ui_dir: a.ui,
        ..ServerConfig::default()
    };
    let addr = format!("{}:{}", a.host, a.port);
    let ws_addr = a.ws_port.map(|p| format!("{}:{p}", a.host));
    let handle = serve(addr.clone(), ws_addr, config).with_context(|| format!("binding {addr}"))?;
    eprintln!("listening on {}", handle.addr());
    if let Some(ws) = handle.ws_addr() {
        eprintln!("websocket and static page on {ws}");
    }
    handle.wait();
    Ok(ExitCode::SUCCESS)
}

fn cmd_runtime(a: RuntimeArgs) -> anyhow::Result<ExitCode> {
    let timeout = Duration::try_from_secs_f64(a.timeout_s).context("--timeout-s")?;
    let mut client = Client::connect_with_timeout(a.endpoint.as_str(), timeout)?;
    let target = match a.target.parse::<i64>() {
        Ok(id) => ClassRef::Id(id),
        Err(_) => ClassRef::Name(a.target.clone()),
    };
    let expected = match a.check_scale {
        Some(s) => Some(profile_or_default(a.profile.as_ref())?.scaled(s)?),
        None => None,
    };

    let mut rows: Vec<RuntimeStats> = Vec::new();
    let mut failures = Vec::new();
    for kind in a.kind.iter().copied().map(FunctionKind::from) {
        let body = trial_request(kind, &a.fixture, target.clone());
        match run_runtime_eval(&mut client, kind, &body, a.trials) {
            Ok(stats) => rows.push(stats),
            Err(BenchError::Aborted { trial, reason, partial }) => {
                failures.push(format!("{}: aborted at trial {trial}: {reason}", kind.label()));
                rows.extend(partial);
            }
            Err(e) => bail!(e),
        }
    }
    for r in rows.iter().filter(|r| r.valid) {
        if let Some(t) = r.trials.iter().position(|t| t.e2e_s <= t.server_s) {
            failures.push(format!("{}: trial {} has e2e <= server time", r.kind.label(), t + 1));
        }
        if let Some(p) = &expected {
            let want = p.model(r.kind).mean_s;
            let se = p.model(r.kind).std_s / (r.n as f64).sqrt();
            if (r.server_mean_s - want).abs() > 3.0 * se {
                failures.push(format!(
                    "{}: server mean {:.6} s is more than 3 SE ({:.6} s) from {want:.6} s",
                    r.kind.label(),
                    r.server_mean_s,
                    se
                ));
            }
        }
    }

    match a.format {
        Format::Text => print!("{}", render_runtime_table(&rows)),
        Format::Json => println!("{}", runtime_to_json(&rows)),
    }
    for f in &failures {
        eprintln!("FAIL {f}");
    }
    Ok(if failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_converge(a: ConvergeArgs) -> anyhow::Result<ExitCode> {
    let world = a.scene.as_deref().map_or_else(|| Ok(World::demo()), World::load)?;
    let target = match &a.target {
        Some(t) => t
            .parse::<i64>()
            .map_or_else(|_| ClassRef::Name(t.clone()), ClassRef::Id)
            .resolve()
            .with_context(|| format!("unknown class {t:?}"))?,
        None => world.target.context("scene names no target; pass --target")?,
    };
    let seeds: Vec<u64> = (a.first_seed..a.first_seed + a.seeds).collect();
    let mut spec = ConvergenceSpec::new(world, target, a.gain, seeds);
    spec.tick_budget = a.budget;
    if let Some(d) = a.dropout {
        spec.noise.dropout_prob = d;
    }
    if let Some(s) = a.pixel_sigma {
        spec.noise.pixel_sigma = s;
    }
    let report = run_convergence(&spec)?;
    match a.format {
        Format::Text => print!("{}", render_convergence(&report)),
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    let noise_free = spec.noise.dropout_prob == 0.0 && spec.noise.pixel_sigma == 0.0;
    let threshold = if noise_free { 1.0 } else { 0.95 };
    if report.success_rate() < threshold {
        eprintln!(
            "FAIL success rate {:.3} below {threshold}",
            report.success_rate()
        );
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_stats(a: StatsArgs) -> anyhow::Result<ExitCode> {
    let file = File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
    let matrix = read_matrix(file).with_context(|| format!("reading {}", a.input.display()))?;
    let analysis = analyze(&matrix, a.bootstrap, a.seed)?;
    match a.format {
        Format::Text => print!("{}", render_analysis(&analysis)),
        Format::Json => println!("{}", analysis_to_json(&analysis)),
    }
    Ok(ExitCode::SUCCESS)
}
