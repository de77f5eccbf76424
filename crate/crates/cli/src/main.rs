mod config;
mod error;
mod tables;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use segsift::cimsim::{simulate_with, write_trace_csv, HwConfig, SimOptions, TimingTable};
use segsift::eval::{
    end_to_end, preset, preset_names, report_rows, write_report, ConfusionMatrix, LabelCache, ReportFormat,
};
use segsift::filter::{filter_batch, FilterMode, FilterParams};
use segsift::oracle::edit_distance_within;
use segsift::seq::{generate_pairs, read_pairs, write_pairs, DatasetSpec, EditMix, PairRecord, PhiDist};

use config::RunConfig;
use error::{io_error, CliError};

#[derive(Parser)]
#[command(name = "segsift", version, about = "Segment-based pre-alignment filter for long reads")]
struct Cli {
    /// Worker threads for batch operations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON run configuration (`version`, optional `filter` and `hw` sections).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate read/reference pairs with planted edits.
    Generate(GenerateArgs),
    /// Run the filter and write per-pair verdicts.
    Filter(FilterArgs),
    /// Label pairs with the exact edit distance oracle.
    Oracle(OracleArgs),
    /// Join verdicts with labels into a confusion matrix.
    Evaluate(EvaluateArgs),
    /// Run the accelerator model and check it against the filter.
    Simulate(SimulateArgs),
    /// Sweep segment lengths and thresholds into a long-format report.
    Sweep(SweepArgs),
    /// Time filtering plus full alignment of the survivors.
    E2e(E2eArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 100)]
    pairs: usize,
    #[arg(long, default_value_t = 1000)]
    read_len: usize,
    #[arg(long, default_value_t = 0.03)]
    edit_rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Window padding on each side; defaults to -E, else 7% of the read length.
    #[arg(long)]
    pad: Option<usize>,
    #[arg(short = 'E', long = "threshold")]
    threshold: Option<usize>,
    /// Fractions of substitutions, insertions and deletions.
    #[arg(long, num_args = 3, value_names = ["SUB", "INS", "DEL"])]
    mix: Option<Vec<f64>>,
    /// Draw phi uniformly from [0, MAX); 0 places every read at phi = 0.
    #[arg(long, default_value_t = 0)]
    phi_max: u64,
    #[arg(long, default_value_t = 0)]
    first_id: u64,
    /// Emit a named preset instead (ignores the size and rate flags).
    #[arg(long)]
    preset: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(short = 'T', long = "segment-len")]
    segment_len: Option<usize>,
    #[arg(short = 'E', long = "threshold")]
    threshold: Option<usize>,
    /// `ref` or `hw`.
    #[arg(long)]
    mode: Option<FilterMode>,
    #[arg(long)]
    ws: Option<usize>,
    #[arg(long)]
    wordset_bases: Option<usize>,
}

#[derive(Args)]
struct FilterArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(short = 'E', long = "threshold")]
    threshold: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    verdicts: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(short = 'T', long = "segment-len")]
    segment_len: Option<usize>,
    #[arg(short = 'E', long = "threshold")]
    threshold: Option<usize>,
    /// JSON hardware configuration (overrides the run configuration's `hw`).
    #[arg(long)]
    hw_config: Option<PathBuf>,
    /// Timing preset: `reram` or `cmos`.
    #[arg(long)]
    timing: Option<String>,
    /// Write the event trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, conflicts_with = "preset")]
    pairs: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Seed for the preset; echoed into the report.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "8")]
    t_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    e_list: Vec<usize>,
    #[arg(long)]
    mode: Option<FilterMode>,
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
    /// Dataset name in the report; defaults to the preset or file name.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct E2eArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Align every pair without filtering.
    #[arg(long)]
    no_filter: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| io_error(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Data(format!("stdout: {e}"))),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serialisable") + "\n"
}

struct Ctx {
    run: RunConfig,
}

impl Ctx {
    fn params(&self, a: &ParamArgs) -> Result<FilterParams, CliError> {
        let mut p = self.run.filter.unwrap_or_else(|| FilterParams::new(8, 0));
        if let Some(t) = a.segment_len {
            p.segment_len = t;
        }
        if let Some(e) = a.threshold {
            p.threshold = e;
        }
        if let Some(m) = a.mode {
            p.mode = m;
        }
        if let Some(ws) = a.ws {
            p.shift_set_width = ws;
        }
        if let Some(b) = a.wordset_bases {
            p.wordset_bases = b;
        }
        if a.threshold.is_none() && self.run.filter.is_none() {
            return Err(CliError::Usage("missing -E/--threshold".into()));
        }
        p.validate()?;
        Ok(p)
    }

    fn threshold(&self, e: Option<usize>) -> Result<usize, CliError> {
        e.or(self.run.filter.map(|f| f.threshold))
            .ok_or_else(|| CliError::Usage("missing -E/--threshold".into()))
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<(), CliError> {
    let pairs = if let Some(name) = &a.preset {
        preset(name, a.seed)
            .ok_or_else(|| CliError::Usage(format!("unknown preset {name:?} (known: {})", preset_names().join(", "))))??
    } else {
        let pad = a
            .pad
            .or(a.threshold)
            .unwrap_or_else(|| (0.07 * a.read_len as f64).round() as usize);
        let mut spec = DatasetSpec::new(a.pairs, a.read_len, a.edit_rate, pad, a.seed);
        if let Some(m) = &a.mix {
            spec.mix = EditMix { sub: m[0], ins: m[1], del: m[2] };
        }
        if a.phi_max > 0 {
            spec.phi = PhiDist::Uniform { lo: 0, hi: a.phi_max };
        }
        spec.first_id = a.first_id;
        generate_pairs(&spec)?
    };
    match &a.output {
        Some(path) => write_pairs(path, &pairs)?,
        None => emit(None, &segsift::seq::format_pairs(&pairs))?,
    }
    Ok(())
}

fn cmd_filter(ctx: &Ctx, a: FilterArgs) -> Result<(), CliError> {
    let params = ctx.params(&a.params)?;
    let pairs = read_pairs(&a.pairs)?;
    let (verdicts, _) = filter_batch(&pairs, &params)?;
    emit(a.output.as_deref(), &tables::format_verdicts(&verdicts))
}

fn cmd_oracle(ctx: &Ctx, a: OracleArgs) -> Result<(), CliError> {
    use rayon::prelude::*;
    let e = ctx.threshold(a.threshold)?;
    let pairs = read_pairs(&a.pairs)?;
    if let Some(p) = pairs.iter().find(|p| p.pad < e) {
        return Err(segsift::filter::FilterError::PadTooSmall { id: p.id, pad: p.pad, threshold: e }.into());
    }
    let labels: Vec<_> = pairs
        .par_iter()
        .map(|p| (p.id, edit_distance_within(&p.read, &p.anchored_slice(), e).distance))
        .collect();
    emit(a.output.as_deref(), &tables::format_labels(&labels))
}

#[derive(Serialize)]
struct MatrixReport {
    #[serde(flatten)]
    matrix: ConfusionMatrix,
    total: u64,
    tp_rate: f64,
    fp_rate: f64,
    tn_rate: f64,
    fn_rate: f64,
    sensitivity: f64,
    p_rate: f64,
    oracle_positive_rate: f64,
}

fn matrix_report(m: ConfusionMatrix) -> MatrixReport {
    MatrixReport {
        matrix: m,
        total: m.total(),
        tp_rate: m.tp_rate(),
        fp_rate: m.fp_rate(),
        tn_rate: m.tn_rate(),
        fn_rate: m.fn_rate(),
        sensitivity: m.sensitivity(),
        p_rate: m.p_rate(),
        oracle_positive_rate: m.oracle_positive_rate(),
    }
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<(), CliError> {
    let verdicts = tables::read_verdicts(&a.verdicts)?;
    let labels = tables::read_labels(&a.labels)?;
    if verdicts.len() != labels.len() || verdicts.keys().ne(labels.keys()) {
        return Err(CliError::Data(format!(
            "{} and {} cover different pair ids",
            a.verdicts.display(),
            a.labels.display()
        )));
    }
    let mut m = ConfusionMatrix::default();
    for (id, accept) in &verdicts {
        m.record(*accept, labels[id]);
    }
    emit(a.output.as_deref(), &to_json(&matrix_report(m)))
}

fn load_hw(ctx: &Ctx, a: &SimulateArgs) -> Result<HwConfig, CliError> {
    let mut cfg = match &a.hw_config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => ctx.run.hw.clone().unwrap_or_default(),
    };
    if let Some(name) = &a.timing {
        cfg.timing = TimingTable::preset(name)
            .ok_or_else(|| CliError::Usage(format!("unknown timing preset {name:?} (expected reram or cmos)")))?;
    }
    Ok(cfg)
}

fn cmd_simulate(ctx: &Ctx, a: SimulateArgs) -> Result<(), CliError> {
    let cfg = load_hw(ctx, &a)?;
    let t = a
        .segment_len
        .or(ctx.run.filter.map(|f| f.segment_len))
        .unwrap_or(segsift::filter::DEFAULT_SEGMENT_LEN);
    let params = cfg.filter_params(t, ctx.threshold(a.threshold)?);
    let pairs = read_pairs(&a.pairs)?;
    let opts = SimOptions { trace: a.trace.is_some(), tcam: None };
    let run = simulate_with(&pairs, &cfg, &params, &opts)?;
    let (verdicts, _) = filter_batch(&pairs, &params)?;
    let expected: BTreeMap<u64, bool> = verdicts.iter().map(|v| (v.id, v.accept)).collect();
    if expected != run.stats.verdicts {
        let bad: Vec<u64> = expected
            .iter()
            .filter(|(id, acc)| run.stats.verdicts.get(id) != Some(acc))
            .map(|(id, _)| *id)
            .take(10)
            .collect();
        return Err(CliError::Invariant(format!(
            "simulator verdicts differ from the hardware-mode filter (first ids: {bad:?})"
        )));
    }
    if let Some(path) = &a.trace {
        let file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
        write_trace_csv(&run.trace, std::io::BufWriter::new(file))?;
    }
    emit(a.output.as_deref(), &to_json(&run.stats))
}

fn cmd_sweep(ctx: &Ctx, a: SweepArgs) -> Result<(), CliError> {
    let (pairs, name): (Vec<PairRecord>, String) = match (&a.pairs, &a.preset) {
        (Some(path), None) => (read_pairs(path)?, path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()),
        (None, Some(p)) => (
            preset(p, a.seed).ok_or_else(|| CliError::Usage(format!("unknown preset {p:?}")))??,
            p.clone(),
        ),
        _ => return Err(CliError::Usage("give exactly one of --pairs or --preset".into())),
    };
    let mut base = ctx.run.filter.unwrap_or_else(|| FilterParams::new(8, 0));
    if let Some(m) = a.mode {
        base.mode = m;
    }
    let mut cache = LabelCache::new();
    let mut rows = Vec::new();
    for &e in &a.e_list {
        let p = FilterParams { threshold: e, ..base };
        rows.extend(segsift::eval::sweep_t(&pairs, &a.t_list, &p, &mut cache)?);
    }
    let report = report_rows(a.dataset.as_deref().unwrap_or(&name), a.seed, &rows);
    write_report(&report, &a.output, a.format)?;
    Ok(())
}

fn cmd_e2e(ctx: &Ctx, a: E2eArgs) -> Result<(), CliError> {
    let params = ctx.params(&a.params)?;
    let pairs = read_pairs(&a.pairs)?;
    let b = end_to_end(&pairs, &params, !a.no_filter)?;
    emit(a.output.as_deref(), &to_json(&b))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let run = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let ctx = Ctx { run };
    let body = move || match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Filter(a) => cmd_filter(&ctx, a),
        Command::Oracle(a) => cmd_oracle(&ctx, a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Simulate(a) => cmd_simulate(&ctx, a),
        Command::Sweep(a) => cmd_sweep(&ctx, a),
        Command::E2e(a) => cmd_e2e(&ctx, a),
    };
    match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?
            .install(body),
        None => body(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("segsift: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
