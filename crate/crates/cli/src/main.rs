use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use planar_memory::bounds::{
    chain_check, concat_fidelity_corrected_bound, concat_fidelity_lower_bound, concat_success_product,
    concat_success_product_closed_form, hofmann_bound, sample_chain_params, storage_success_bound,
    ConcatParams, StorageBound, StorageParams,
};
use planar_memory::montecarlo::{estimate_success_with_threads, ExperimentConfig, Mode, ReadoutDecoder, RunResult};
use planar_memory::verify::{run_all, VerifyOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod recipes;

use recipes::{Curve, FigureRecipe};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "planar-memory", version, about = "Planar-code quantum memory simulator")]
struct Cli {
    /// Worker threads for Monte Carlo runs (0 = all cores).
    #[arg(long, global = true, env = "PLANAR_MEMORY_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate storage success probability; one CSV row per p.
    Simulate(SimulateArgs),
    /// Check the encode/decode, grow/shrink and teleportation protocols
    /// exactly on small lattices.
    Verify(VerifyArgs),
    /// Evaluate analytic bounds as CSV.
    Bounds(BoundsArgs),
    /// Produce the data behind one figure, one CSV file per curve.
    Recipe(RecipeArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum DecoderArg {
    Line,
    Multiline,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Encode,
    NoEncode,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, default_value_t = 7)]
    rows: usize,
    #[arg(long, default_value_t = 8)]
    cols: usize,
    /// Error probability; a comma-separated list gives one row each.
    #[arg(long, value_delimiter = ',', default_value = "0.01")]
    p: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long, default_value_t = 10_000)]
    runs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = DecoderArg::Line)]
    decoder: DecoderArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Encode)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    syndrome_noise: Switch,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Largest lattice side checked.
    #[arg(long, default_value_t = 4)]
    max_size: usize,
    #[arg(long, default_value_t = 100)]
    seeds: u64,
    /// Invert every measurement outcome (negative control).
    #[arg(long, hide = true)]
    inject_sign_fault: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Formula {
    Concat,
    Storage,
    Hofmann,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, value_enum)]
    formula: Formula,
    /// Error probability; comma-separated list allowed.
    #[arg(long, value_delimiter = ',', default_value = "0.0001")]
    p: Vec<f64>,
    /// Encoding-circuit volume (concat).
    #[arg(long, default_value_t = 10.0)]
    volume: f64,
    /// Pair count (concat); defaults to volume·(volume−1)/2.
    #[arg(long)]
    pairs: Option<f64>,
    /// Concatenation level (concat).
    #[arg(long, default_value_t = 0)]
    levels: u32,
    /// Check (1/v)·ln p_s ≥ −p on random points with c·p ≤ 1/e instead.
    #[arg(long)]
    chain_check: bool,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 7)]
    rows: usize,
    #[arg(long, default_value_t = 7)]
    cols: usize,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// F_x (hofmann); if omitted, the bit-sector success on rows×cols.
    #[arg(long)]
    fx: Option<f64>,
    /// F_z (hofmann); if omitted, the bit-sector success on the transposed
    /// cols×rows lattice, i.e. the phase sector.
    #[arg(long)]
    fz: Option<f64>,
    /// Trials per simulated fidelity (hofmann).
    #[arg(long, default_value_t = 10_000)]
    runs: u64,
}

#[derive(Args, Debug)]
struct RecipeArgs {
    /// Built-in recipe name (see --list).
    name: Option<String>,
    /// Load the recipe from a JSON file instead.
    #[arg(long, conflicts_with = "name")]
    config: Option<PathBuf>,
    #[arg(long)]
    list: bool,
    /// Print the recipe as JSON and exit.
    #[arg(long)]
    dump: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long)]
    runs: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<planar_memory::Error> for Failure {
    fn from(e: planar_memory::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

/// Round-trippable, locale-independent float text ("1.0", "0.0125").
fn num(x: f64) -> String {
    format!("{x:?}")
}

const SIM_HEADER: [&str; 12] = [
    "N", "M", "p", "k", "n", "mode", "decoder", "syndrome_noise", "seed", "successes", "p_hat", "stderr",
];

fn sim_row(c: &ExperimentConfig, r: &RunResult) -> Vec<String> {
    vec![
        c.rows.to_string(),
        c.cols.to_string(),
        num(c.p),
        c.steps.to_string(),
        c.trials.to_string(),
        match c.mode {
            Mode::Encode => "encode",
            Mode::NoEncode => "no-encode",
        }
        .into(),
        match c.decoder {
            ReadoutDecoder::Line => "line",
            ReadoutDecoder::Multiline => "multiline",
        }
        .into(),
        if c.syndrome_noise { "on" } else { "off" }.into(),
        c.seed.to_string(),
        r.successes.to_string(),
        num(r.p_hat()),
        num(r.stderr()),
    ]
}

fn run_sweep<W: Write>(out: W, base: &ExperimentConfig, grid: &[f64], threads: usize) -> CliResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SIM_HEADER)?;
    for &p in grid {
        let c = ExperimentConfig { p, ..base.clone() };
        c.validate()?;
        log::info!("{}x{} {:?} p={p}: {} trials", c.rows, c.cols, c.mode, c.trials);
        let r = estimate_success_with_threads(&c, threads)?;
        w.write_record(sim_row(&c, &r))?;
        w.flush()?;
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs, threads: usize) -> CliResult {
    let base = ExperimentConfig {
        rows: a.rows,
        cols: a.cols,
        p: 0.0,
        steps: a.steps,
        trials: a.runs,
        decoder: match a.decoder {
            DecoderArg::Line => ReadoutDecoder::Line,
            DecoderArg::Multiline => ReadoutDecoder::Multiline,
        },
        mode: match a.mode {
            ModeArg::Encode => Mode::Encode,
            ModeArg::NoEncode => Mode::NoEncode,
        },
        syndrome_noise: matches!(a.syndrome_noise, Switch::On),
        seed: a.seed,
        ..Default::default()
    };
    for &p in &a.p {
        ExperimentConfig { p, ..base.clone() }.validate()?;
    }
    run_sweep(io::stdout().lock(), &base, &a.p, threads)
}

fn cmd_verify(a: VerifyArgs) -> CliResult {
    let opts = VerifyOptions {
        max_size: a.max_size,
        seeds: a.seeds,
        sign_fault: a.inject_sign_fault,
    };
    let report = run_all(&opts);
    let mut out = io::stdout().lock();
    for c in &report.checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        writeln!(out, "{status} {} ({} cases, {} failed)", c.name, c.cases, c.failures)?;
        if let Some(f) = &c.first_failure {
            writeln!(out, "     first failure: {f}")?;
        }
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification("protocol verification failed".into()))
    }
}

fn storage_row(params: &StorageParams, b: &StorageBound) -> Vec<String> {
    vec![
        params.rows.to_string(),
        params.cols.to_string(),
        params.steps.to_string(),
        num(params.p),
        num(b.alpha()),
        b.value().map(num).unwrap_or_default(),
        b.is_vacuous().to_string(),
    ]
}

const STORAGE_HEADER: [&str; 7] = ["N", "M", "k", "p", "alpha", "bound", "vacuous"];

fn cmd_bounds(a: BoundsArgs, threads: usize) -> CliResult {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    match a.formula {
        Formula::Concat if a.chain_check => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let points: Vec<ConcatParams> = (0..a.samples).map(|_| sample_chain_params(&mut rng, 30)).collect();
            let r = chain_check(&points)?;
            w.write_record(["samples", "violations", "worst_gap", "status"])?;
            w.write_record([
                r.samples.to_string(),
                r.violations.to_string(),
                num(r.worst_gap),
                if r.passed() { "pass" } else { "fail" }.into(),
            ])?;
            w.flush()?;
            if !r.passed() {
                return Err(Failure::Verification(format!(
                    "(1/v)·ln p_s ≥ −p violated on {} of {} points",
                    r.violations, r.samples
                )));
            }
        }
        Formula::Concat => {
            w.write_record([
                "p",
                "v",
                "c",
                "r",
                "success_product",
                "closed_form_product",
                "exp_bound",
                "corrected_bound",
                "above_threshold",
            ])?;
            for &p in &a.p {
                let params = match a.pairs {
                    Some(c) => ConcatParams::with_pairs(p, a.volume, c, a.levels)?,
                    None => ConcatParams::new(p, a.volume, a.levels)?,
                };
                w.write_record([
                    num(p),
                    num(params.volume),
                    num(params.pairs),
                    params.levels.to_string(),
                    num(concat_success_product(&params)?),
                    num(concat_success_product_closed_form(&params)?),
                    num(concat_fidelity_lower_bound(p, params.volume)),
                    concat_fidelity_corrected_bound(&params).map(num).unwrap_or_default(),
                    (params.beta() >= 1.0).to_string(),
                ])?;
            }
        }
        Formula::Storage => {
            w.write_record(STORAGE_HEADER)?;
            for &p in &a.p {
                let params = StorageParams {
                    rows: a.rows,
                    cols: a.cols,
                    steps: a.steps,
                    p,
                };
                w.write_record(storage_row(&params, &storage_success_bound(&params)?))?;
            }
        }
        Formula::Hofmann => {
            w.write_record(["N", "M", "k", "p", "n", "F_x", "F_z", "bound"])?;
            for &p in &a.p {
                let base = ExperimentConfig {
                    rows: a.rows,
                    cols: a.cols,
                    p,
                    steps: a.steps,
                    trials: a.runs,
                    seed: a.seed,
                    ..Default::default()
                };
                let fx = match a.fx {
                    Some(f) => f,
                    None => estimate_success_with_threads(&base, threads)?.p_hat(),
                };
                // The phase sector is the bit sector of the transposed lattice.
                let fz = match a.fz {
                    Some(f) => f,
                    None => {
                        let t = ExperimentConfig {
                            rows: a.cols,
                            cols: a.rows,
                            ..base.clone()
                        };
                        estimate_success_with_threads(&t, threads)?.p_hat()
                    }
                };
                w.write_record([
                    a.rows.to_string(),
                    a.cols.to_string(),
                    a.steps.to_string(),
                    num(p),
                    a.runs.to_string(),
                    num(fx),
                    num(fz),
                    num(hofmann_bound(fx, fz)?),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_recipe(a: RecipeArgs, threads: usize) -> CliResult {
    if a.list {
        let mut out = io::stdout().lock();
        for r in recipes::builtin() {
            writeln!(out, "{}\t{}", r.name, r.figure)?;
        }
        return Ok(());
    }
    let mut recipe: FigureRecipe = match (&a.name, &a.config) {
        (_, Some(path)) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        (Some(name), None) => recipes::find(name).ok_or_else(|| Failure::Usage(format!("unknown recipe {name}")))?,
        (None, None) => return Err(Failure::Usage("give a recipe name, --config or --list".into())),
    };
    if let Some(grid) = a.p {
        recipe.p_grid = grid;
    }
    for c in &mut recipe.curves {
        match c {
            Curve::Simulation { config, .. } => {
                config.trials = a.runs.unwrap_or(config.trials);
                config.steps = a.steps.unwrap_or(config.steps);
                config.seed = a.seed.unwrap_or(config.seed);
            }
            Curve::StorageBound { steps, .. } => *steps = a.steps.unwrap_or(*steps),
        }
    }
    if a.dump {
        let text = serde_json::to_string_pretty(&recipe).map_err(|e| Failure::Usage(e.to_string()))?;
        writeln!(io::stdout().lock(), "{text}")?;
        return Ok(());
    }
    fs::create_dir_all(&a.out_dir)?;
    let stem: String = recipe
        .name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect();
    for curve in &recipe.curves {
        let path = a.out_dir.join(format!("{stem}_{}.csv", curve.label()));
        let file = fs::File::create(&path)?;
        match curve {
            Curve::Simulation { config, .. } => run_sweep(file, config, &recipe.p_grid, threads)?,
            Curve::StorageBound { rows, cols, steps, .. } => {
                let mut w = csv::Writer::from_writer(file);
                w.write_record(STORAGE_HEADER)?;
                for &p in &recipe.p_grid {
                    let params = StorageParams {
                        rows: *rows,
                        cols: *cols,
                        steps: *steps,
                        p,
                    };
                    w.write_record(storage_row(&params, &storage_success_bound(&params)?))?;
                }
                w.flush()?;
            }
        }
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = cli.threads;
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(a, threads),
        Command::Verify(a) => cmd_verify(a),
        Command::Bounds(a) => cmd_bounds(a, threads),
        Command::Recipe(a) => cmd_recipe(a, threads),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}
