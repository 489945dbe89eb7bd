//! `csi-wiretap`: rate bounds, end-to-end simulation and example checks for
//! wiretap channels with causal state information at the encoder.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use csi_wiretap::channel::{induce_joint, ChannelSpec, Preset, PresetParams, ShannonStrategy};
use csi_wiretap::codec::{CodeRates, CodeSystem, Scheme};
use csi_wiretap::eval::{simulate, SimConfig, SimReport, DEFAULT_ENUMERATION_CAP};
use csi_wiretap::rates::{
    gallager_e0, interior_split, lower_bound, resolvability_bound, upper_bound_degraded, LowerBound,
    OptimizerConfig, RateBounds, RateComponents, RateTuple, StrategyFamily, UpperBound,
};
use csi_wiretap::verify::{default_grid, verify_examples, ExampleCheck, VerifyConfig};
use csi_wiretap::Error;

use output::{emit, render, Envelope, Format, RenderError};

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "csi-wiretap", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads (default: all logical cores).
    #[arg(long, global = true, env = "CSI_WIRETAP_THREADS")]
    threads: Option<usize>,

    /// Write the report here instead of stdout; a summary table then goes
    /// to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Lower bound on the secrecy capacity and, for degraded channels, the converse.
    RateBounds(RateBoundsArgs),
    /// Monte Carlo run of the block-Markov scheme with exact leakage where feasible.
    Simulate(SimulateArgs),
    /// Compare the optimizer against the closed-form examples.
    VerifyExamples(VerifyArgs),
}

#[derive(Args, Clone, Debug, Serialize)]
struct ChannelArgs {
    /// Built-in example channel.
    #[arg(long, value_parser = parse_preset, conflicts_with = "channel_file",
          required_unless_present = "channel_file")]
    preset: Option<Preset>,
    /// JSON channel description.
    #[arg(long)]
    channel_file: Option<PathBuf>,
    /// State bias P(S=1) of a preset.
    #[arg(long)]
    eps_s: Option<f64>,
    /// First noise parameter of a preset.
    #[arg(long)]
    eps_phi: Option<f64>,
    /// Second noise parameter of a preset.
    #[arg(long)]
    eps_psi: Option<f64>,
}

#[derive(Args, Clone, Debug, Serialize)]
struct OptimizerArgs {
    /// Auxiliary alphabet size (default |X|·|S|).
    #[arg(long)]
    u_card: Option<usize>,
    /// Random restarts of the optimizer.
    #[arg(long, default_value_t = 6)]
    restarts: usize,
    /// Strategy family searched by the optimizer.
    #[arg(long, value_enum, default_value = "general")]
    family: FamilyArg,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum FamilyArg {
    General,
    Additive,
    Direct,
}

impl From<FamilyArg> for StrategyFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::General => StrategyFamily::General,
            FamilyArg::Additive => StrategyFamily::Additive,
            FamilyArg::Direct => StrategyFamily::Direct,
        }
    }
}

impl OptimizerArgs {
    fn config(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            u_cardinality: self.u_card,
            restarts: self.restarts,
            seed,
            family: self.family.into(),
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Args, Debug)]
struct RateBoundsArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Degradedness tolerance on I(XS;Z|Y) for the converse to apply.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// ρ at which the Gallager exponent of the best strategy is reported.
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum StrategyChoice {
    /// The example's own strategy (presets only).
    Canonical,
    /// The optimizer's best strategy.
    Optimized,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    /// Blocklength.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Message blocks (block 0 only carries state information).
    #[arg(long, default_value_t = 3)]
    b: usize,
    /// Independent Monte Carlo transcripts.
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    /// Master seed for codebooks, hashing and channel noise.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Strategy to code with; channel files always use the optimized one.
    #[arg(long, value_enum)]
    strategy: Option<StrategyChoice>,
    #[arg(long)]
    r_bar: Option<f64>,
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long)]
    r1: Option<f64>,
    #[arg(long)]
    r2: Option<f64>,
    /// Code systems averaged for the ensemble leakage.
    #[arg(long, default_value_t = 8)]
    ensemble: u64,
    /// Largest enumeration attempted for exact leakage.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    enumeration_cap: usize,
    /// ρ for the resolvability bound on the wiretap-coded slice.
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Restrict to one example.
    #[arg(long, value_parser = parse_preset)]
    preset: Option<Preset>,
    /// Rate tolerance against the closed forms.
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
    /// Largest converse–achievability gap.
    #[arg(long, default_value_t = 2e-2)]
    bracket_tol: f64,
    #[arg(long)]
    u_card: Option<usize>,
    #[arg(long, default_value_t = 6)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// P(S=1) for examples whose closed form does not involve it.
    #[arg(long, default_value_t = 0.3)]
    eps_s: f64,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Resource(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Resource(_)) | CliError::Resource(_) => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        }
    }
}

/// How the channel was specified, as recorded in reports.
#[derive(Serialize)]
struct ChannelSource {
    preset: Option<Preset>,
    params: Option<PresetParams>,
    channel_file: Option<PathBuf>,
    spec: ChannelSpec,
}

struct Loaded {
    source: ChannelSource,
    channel: csi_wiretap::channel::WiretapChannel,
    canonical: Option<ShannonStrategy>,
}

fn load_channel(a: &ChannelArgs) -> Result<Loaded, CliError> {
    let spec = match (&a.preset, &a.channel_file) {
        (Some(p), None) => {
            let d = PresetParams::default();
            ChannelSpec::for_preset(
                *p,
                PresetParams {
                    eps_s: a.eps_s.unwrap_or(d.eps_s),
                    eps_phi: a.eps_phi.unwrap_or(d.eps_phi),
                    eps_psi: a.eps_psi.unwrap_or(d.eps_psi),
                },
            )
        }
        (None, Some(path)) => {
            let mut spec = ChannelSpec::from_path(path).map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
                other => other,
            })?;
            // command-line ε values override those of a preset-style file
            if spec.preset.is_some() {
                spec.eps_s = a.eps_s.or(spec.eps_s);
                spec.eps_phi = a.eps_phi.or(spec.eps_phi);
                spec.eps_psi = a.eps_psi.or(spec.eps_psi);
            } else if a.eps_s.is_some() || a.eps_phi.is_some() || a.eps_psi.is_some() {
                return Err(CliError::Usage(
                    "--eps-* flags only apply to preset channels".into(),
                ));
            }
            spec
        }
        _ => return Err(CliError::Usage("give exactly one of --preset or --channel-file".into())),
    };
    let loaded = spec.load()?;
    Ok(Loaded {
        source: ChannelSource {
            preset: loaded.preset.map(|p| p.0),
            params: loaded.preset.map(|p| p.1),
            channel_file: a.channel_file.clone(),
            spec,
        },
        channel: loaded.channel,
        canonical: loaded.canonical,
    })
}

fn write_report<C: Serialize, R: Serialize>(
    cli: &Cli,
    command: &str,
    seed: u64,
    config: &C,
    result: &R,
    table: &str,
) -> Result<(), CliError> {
    let value = serde_json::to_value(Envelope::new(command, seed, config, result)).map_err(RenderError::from)?;
    let bytes = render(&value, cli.format)?;
    match &cli.out {
        Some(path) => {
            emit(&bytes, Some(path)).map_err(Error::from)?;
            print!("{table}");
        }
        None => {
            eprint!("{table}");
            emit(&bytes, None).map_err(Error::from)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct RateBoundsConfig<'a> {
    channel: &'a ChannelSource,
    optimizer: OptimizerConfig,
    tol: f64,
    rho: f64,
}

#[derive(Serialize)]
struct Exponent {
    rho: f64,
    e0: f64,
}

#[derive(Serialize)]
struct RateBoundsResult {
    lower: LowerBound,
    upper: UpperBound,
    /// Whether `upper` is a converse (degradedness gap within `tol`).
    converse: bool,
    exponent: Exponent,
}

fn cmd_rate_bounds(cli: &Cli, a: &RateBoundsArgs) -> Result<ExitCode, CliError> {
    let ch = load_channel(&a.channel)?;
    let opt = a.optimizer.config(a.seed);
    let lower = lower_bound(&ch.channel, &opt)?;
    let upper = upper_bound_degraded(&ch.channel, &opt)?;
    let converse = upper.degradedness_gap <= a.tol;
    let e0 = gallager_e0(a.rho, &induce_joint(&ch.channel, &lower.strategy)?)?;
    let result = RateBoundsResult {
        converse,
        exponent: Exponent { rho: a.rho, e0 },
        lower,
        upper,
    };
    let b = &result.lower.bounds;
    let mut table = String::new();
    table += &format!("case            {:?}\n", b.case);
    table += &format!("r_csi0          {:.6}\n", b.r_csi0);
    table += &format!("r_csi1          {:.6}\n", b.r_csi1);
    table += &format!("r_csi2          {:.6}\n", b.r_csi2);
    table += &format!("lower bound     {:.6}  ({:?})\n", result.lower.value, result.lower.objective);
    if converse {
        table += &format!("converse        {:.6}  (degraded)\n", result.upper.value);
    } else {
        table += &format!(
            "converse        n/a  (not degraded: I(XS;Z|Y) = {:.3e})\n",
            result.upper.degradedness_gap
        );
    }
    let config = RateBoundsConfig {
        channel: &ch.source,
        optimizer: opt,
        tol: a.tol,
        rho: a.rho,
    };
    write_report(cli, "rate-bounds", a.seed, &config, &result, &table)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SimulateConfig<'a> {
    channel: &'a ChannelSource,
    optimizer: Option<OptimizerConfig>,
    strategy: StrategyChoice,
    n: usize,
    b: usize,
    runs: usize,
    requested_split: RateTuple,
    ensemble: u64,
    enumeration_cap: usize,
    rho: f64,
}

#[derive(Serialize)]
struct Resolvability {
    rho: f64,
    e0: f64,
    /// Bound on `I(M0; S^n Z^n)` for one block, in bits.
    bound: f64,
}

#[derive(Serialize)]
struct SimulateResult {
    strategy: ShannonStrategy,
    bounds: RateBounds,
    resolvability: Resolvability,
    report: SimReport,
}

fn cmd_simulate(cli: &Cli, a: &SimulateArgs) -> Result<ExitCode, CliError> {
    if a.b == 0 {
        return Err(CliError::Usage("at least one message block required".into()));
    }
    if a.n == 0 || a.runs == 0 {
        return Err(CliError::Usage("--n and --runs must be positive".into()));
    }
    let ch = load_channel(&a.channel)?;
    let choice = match (a.strategy, &ch.canonical) {
        (Some(StrategyChoice::Canonical), None) => {
            return Err(CliError::Usage("a canonical strategy exists only for presets".into()))
        }
        (Some(c), _) => c,
        (None, Some(_)) => StrategyChoice::Canonical,
        (None, None) => StrategyChoice::Optimized,
    };
    let (strategy, optimizer) = match choice {
        StrategyChoice::Canonical => (ch.canonical.clone().expect("checked above"), None),
        StrategyChoice::Optimized => {
            let opt = a.optimizer.config(a.seed);
            (lower_bound(&ch.channel, &opt)?.strategy, Some(opt))
        }
    };
    let joint = induce_joint(&ch.channel, &strategy)?;
    let components = RateComponents::from_joint(&joint)?;
    let default = interior_split(&components);
    let split = RateTuple {
        r_bar: a.r_bar.unwrap_or(default.r_bar),
        r0: a.r0.unwrap_or(default.r0),
        r1: a.r1.unwrap_or(default.r1),
        r2: a.r2.unwrap_or(default.r2),
    };
    let counts = CodeRates::quantize_split(a.n, &split).map_err(|e| with_smaller_n(e, a.n))?;
    let system = CodeSystem::generate(counts, strategy.u_dist(), ch.channel.sizes().s, a.b, a.seed, 0)
        .map_err(|e| with_smaller_n(e, a.n))?;
    let scheme = Scheme::new(ch.channel.clone(), strategy.clone(), system)?;
    let sim = SimConfig {
        runs: a.runs,
        seed: a.seed,
        ensemble: a.ensemble,
        enumeration_cap: a.enumeration_cap,
        ..SimConfig::default()
    };
    let report = simulate(&scheme, &sim).map_err(|e| with_smaller_n(e, a.n))?;
    let e0 = gallager_e0(a.rho, &joint)?;
    let gap = counts.r_bar() - counts.r0();
    let result = SimulateResult {
        strategy,
        bounds: csi_wiretap::rates::rate_components(&joint)?,
        resolvability: Resolvability {
            rho: a.rho,
            e0,
            bound: resolvability_bound(a.rho, a.n, gap, e0)?,
        },
        report,
    };

    let r = &result.report;
    let mut table = String::new();
    table += &format!(
        "counts          m0={} m1={} m2={} residual={}\n",
        counts.m0, counts.m1, counts.m2, counts.residual
    );
    table += &format!(
        "rates           R̄={:.4} R0={:.4} R1={:.4} R2={:.4}  R={:.4}  throughput={:.4}\n",
        r.rates.r_bar, r.rates.r0, r.rates.r1, r.rates.r2, r.secret_rate, r.throughput
    );
    table += &format!("P_e (mean)      {:.4}   any block {:.4}\n", r.p_e, r.p_e_any_block);
    for (j, p) in r.p_e_per_block.iter().enumerate() {
        table += &format!(
            "  block {:<3}     P_e {:.4}  codeword {:.4}  reconciliation {:.4}\n",
            j + 1,
            p,
            r.codeword_error_per_block[j],
            r.reconciliation_error_per_block[j]
        );
    }
    match &r.leakage {
        Some(l) => table += &format!("leakage         {:.6} bits ({:?})\n", l.bits, l.method),
        None => table += "leakage         n/a\n",
    }
    if let Some(p) = &r.plugin {
        table += &format!(
            "plug-in         {:.6} bits (bias bound {:.6}, {} samples)\n",
            p.bits, p.bias_bound, p.samples
        );
    }
    if let Some(s) = r.security_index {
        table += &format!("security index  {s:.6}\n");
    }
    let config = SimulateConfig {
        channel: &ch.source,
        optimizer,
        strategy: choice,
        n: a.n,
        b: a.b,
        runs: a.runs,
        requested_split: split,
        ensemble: a.ensemble,
        enumeration_cap: a.enumeration_cap,
        rho: a.rho,
    };
    write_report(cli, "simulate", a.seed, &config, &result, &table)?;
    Ok(ExitCode::SUCCESS)
}

fn with_smaller_n(e: Error, n: usize) -> CliError {
    match e {
        Error::Resource(m) => CliError::Resource(format!(
            "resource limit exceeded: {m}; try a smaller blocklength (e.g. --n {})",
            (n / 2).max(1)
        )),
        other => CliError::Core(other),
    }
}

#[derive(Serialize)]
struct VerifySummary {
    checks: Vec<ExampleCheck>,
    passed: usize,
    failed: usize,
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<ExitCode, CliError> {
    let cfg = VerifyConfig {
        tol: a.tol,
        bracket_tol: a.bracket_tol,
        grid: default_grid(),
        background_eps_s: a.eps_s,
        optimizer: OptimizerConfig {
            u_cardinality: a.u_card,
            restarts: a.restarts,
            seed: a.seed,
            ..OptimizerConfig::default()
        },
        examples: a.preset.map_or_else(|| Preset::ALL.to_vec(), |p| vec![p]),
    };
    let checks = verify_examples(&cfg)?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    let mut table = String::new();
    table += "example  eps_s  eps_phi eps_psi  closed    family    general   converse  result\n";
    for c in &checks {
        table += &format!(
            "{:<8} {:.3}  {:.3}   {:.3}    {:.6}  {:.6}  {:.6}  {}  {}\n",
            c.example,
            c.params.eps_s,
            c.params.eps_phi,
            c.params.eps_psi,
            c.closed_form,
            c.family_value,
            c.general_value,
            c.upper.map_or("   -    ".to_string(), |u| format!("{u:.6}")),
            if c.pass { "PASS" } else { "FAIL" }
        );
        for f in &c.failures {
            table += &format!("         {f}\n");
        }
    }
    table += &format!("{} checks, {} failed\n", checks.len(), failed);
    let summary = VerifySummary {
        passed: checks.len() - failed,
        failed,
        checks,
    };
    write_report(cli, "verify-examples", a.seed, &cfg, &summary, &table)?;
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY)
    })
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match &cli.command {
        Command::RateBounds(a) => cmd_rate_bounds(cli, a),
        Command::Simulate(a) => cmd_simulate(cli, a),
        Command::VerifyExamples(a) => cmd_verify(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
