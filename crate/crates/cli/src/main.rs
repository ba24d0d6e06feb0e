use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use wmfc::classify::{anova_two_way, FeatureTable};
use wmfc::connectivity::{CrossPlotGrid, Method};
use wmfc::network::MetricKind;
use wmfc::pipeline::{nom_from_csv, parse_threshold_sweep, render_heatmap, run_pipeline, FeatureKind, PipelineConfig, Precision};
use wmfc::signal_io::{extract_epochs, parse_csv_matrix, parse_edf, parse_markers, render_csv, write_edf, Recording};
use wmfc::synth::{default_profiles, generate_cohort, SynthConfig};
use wmfc::{GroupLabel, StageTag};

#[derive(Parser)]
#[command(name = "wmfc", version, about = "EEG working-memory functional connectivity pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Generate a synthetic cohort (EDF + marker CSV per subject, manifest.csv).
    Synth(SynthArgs),
    /// Validate a recording and optional marker file; optionally convert it.
    Ingest(IngestArgs),
    /// Run the stage x threshold x metric sweep.
    Pipeline(PipelineArgs),
    /// Render a matrix CSV as PGM and SVG heatmaps.
    Render(RenderArgs),
    /// Two-way ANOVA (group x stage) on one feature of exported tables.
    Anova(AnovaArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    subjects_per_group: usize,
    #[arg(long, default_value_t = 63)]
    channels: usize,
    #[arg(long, default_value_t = 1000.0)]
    fs: f64,
    /// Trials per stage: encoding,retro-cue,recall,retrieval.
    #[arg(long, value_delimiter = ',')]
    trials: Option<Vec<usize>>,
    #[arg(long)]
    kappa_ad: Option<f64>,
    #[arg(long)]
    kappa_mci: Option<f64>,
    #[arg(long)]
    kappa_hc: Option<f64>,
}

#[derive(Args)]
struct IngestArgs {
    /// EDF or CSV recording.
    input: PathBuf,
    /// Sample rate for CSV input.
    #[arg(long)]
    fs: Option<f64>,
    #[arg(long)]
    markers: Option<PathBuf>,
    /// Write the recording as EDF or CSV, chosen by extension.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// TOML configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cohort manifest (subject_id,group,file).
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    low: Option<f64>,
    #[arg(long)]
    high: Option<f64>,
    /// Butterworth prototype order.
    #[arg(long)]
    filter_order: Option<usize>,
    /// Window width in samples.
    #[arg(long)]
    window: Option<usize>,
    /// Window step in samples.
    #[arg(long)]
    step: Option<usize>,
    #[arg(long)]
    features: Option<FeatureKind>,
    /// Harmonic order N.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    method: Option<Method>,
    /// count:BxS or ruler:DR,DTHETA_DEG.
    #[arg(long)]
    grid: Option<CrossPlotGrid>,
    #[arg(long, conflicts_with = "threshold_sweep")]
    threshold: Option<f64>,
    /// start:stop:step, inclusive.
    #[arg(long)]
    threshold_sweep: Option<String>,
    /// Comma-separated metrics (D, C, EC, BC, Cc).
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<MetricKind>>,
    /// Comma-separated stages.
    #[arg(long, value_delimiter = ',')]
    stages: Option<Vec<StageTag>>,
    #[arg(long)]
    invert_cpte: bool,
    #[arg(long)]
    group_by_subject: bool,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    trees: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    precision: Option<Precision>,
    /// Skip feature CSV export.
    #[arg(long)]
    no_features: bool,
    /// Skip group mean NOM export.
    #[arg(long)]
    no_noms: bool,
}

#[derive(Args)]
struct RenderArgs {
    /// Square matrix CSV with a label header.
    input: PathBuf,
    /// Output path; .pgm and .svg extensions are added.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnovaArgs {
    /// Feature tables (label,stage,f_000..); rows are pooled.
    #[arg(required = true)]
    tables: Vec<PathBuf>,
    /// Feature column to test; the row mean over all features when omitted.
    #[arg(long)]
    feature: Option<String>,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => synth(a),
        Command::Ingest(a) => ingest(a),
        Command::Pipeline(a) => pipeline(a),
        Command::Render(a) => render(a),
        Command::Anova(a) => anova(a),
    }
}

fn synth(a: SynthArgs) -> Result<()> {
    let mut cfg = SynthConfig {
        channels: a.channels,
        fs: a.fs,
        subjects_per_group: a.subjects_per_group,
        seed: a.seed,
        ..Default::default()
    };
    if let Some(t) = a.trials {
        cfg.trials = t
            .try_into()
            .map_err(|t: Vec<usize>| anyhow::anyhow!("--trials needs 4 counts, got {}", t.len()))?;
    }
    let mut profiles = default_profiles();
    for (group, kappa) in [
        (GroupLabel::AD, a.kappa_ad),
        (GroupLabel::MCI, a.kappa_mci),
        (GroupLabel::HC, a.kappa_hc),
    ] {
        if let (Some(k), Some(p)) = (kappa, profiles.get_mut(&group)) {
            p.kappa = k;
        }
    }
    let manifest = generate_cohort(&profiles, &cfg, &a.out)?;
    println!("{}", a.out.join("manifest.csv").display());
    log::info!("wrote {} subjects", manifest.entries.len());
    Ok(())
}

fn read_recording(path: &Path, fs: Option<f64>) -> Result<Recording<f64>> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let fs = fs.context("--fs is required for CSV recordings")?;
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(parse_csv_matrix(&text, fs)?)
    } else {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(parse_edf(&bytes)?)
    }
}

fn ingest(a: IngestArgs) -> Result<()> {
    let rec = read_recording(&a.input, a.fs)?;
    println!("channels,{}", rec.channels());
    println!("samples,{}", rec.samples());
    println!("sample_rate,{}", rec.sample_rate());
    println!("labels,{}", rec.label_names().join(" "));
    if let Some(m) = &a.markers {
        let text = std::fs::read_to_string(m).with_context(|| format!("reading {}", m.display()))?;
        let markers = parse_markers(&text)?;
        let epochs = extract_epochs(&rec, &markers, GroupLabel::HC, None)?;
        for s in StageTag::ALL {
            println!("epochs_{s},{}", markers.count(s));
        }
        log::info!("{} epochs within bounds", epochs.len());
    }
    if let Some(out) = &a.out {
        let bytes = if out.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            render_csv(&rec).into_bytes()
        } else {
            write_edf(&rec)?
        };
        std::fs::write(out, bytes).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(())
}

fn pipeline_config(a: PipelineArgs) -> Result<PipelineConfig> {
    let mut cfg = match &a.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if a.manifest.is_some() {
        cfg.manifest = a.manifest;
    }
    if let Some(v) = a.out {
        cfg.output_dir = v;
    }
    if let Some(v) = a.low {
        cfg.filter.low_cut = v;
    }
    if let Some(v) = a.high {
        cfg.filter.high_cut = v;
    }
    if let Some(v) = a.filter_order {
        cfg.filter.order = v;
    }
    if let Some(v) = a.window {
        cfg.window.width = v;
    }
    if let Some(v) = a.step {
        cfg.window.step = v;
    }
    if let Some(v) = a.features {
        cfg.features = v;
    }
    if let Some(v) = a.order {
        cfg.order = v;
    }
    if let Some(v) = a.method {
        cfg.method = v;
    }
    if let Some(v) = a.grid {
        cfg.grid = v;
    }
    if let Some(v) = a.threshold {
        cfg.thresholds = vec![v];
    }
    if let Some(v) = &a.threshold_sweep {
        cfg.thresholds = parse_threshold_sweep(v)?;
    }
    if let Some(v) = a.metrics {
        cfg.metrics = v;
    }
    if let Some(v) = a.stages {
        cfg.stages = v;
    }
    cfg.invert_cpte |= a.invert_cpte;
    cfg.group_by_subject |= a.group_by_subject;
    if let Some(v) = a.folds {
        cfg.folds = v;
    }
    if let Some(v) = a.trees {
        cfg.forest.n_trees = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.workers {
        cfg.workers = v;
    }
    if let Some(v) = a.precision {
        cfg.precision = v;
    }
    if a.no_features {
        cfg.write_features = false;
    }
    if a.no_noms {
        cfg.write_group_noms = false;
    }
    cfg.validate()?;
    if cfg.manifest.is_none() {
        bail!("no manifest: pass --manifest or set `manifest` in the config file");
    }
    Ok(cfg)
}

fn pipeline(a: PipelineArgs) -> Result<()> {
    let cfg = pipeline_config(a)?;
    let out = run_pipeline(&cfg)?;
    print!("{}", out.sweep.to_csv()?);
    let failed = out.sweep.rows.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        log::warn!("{failed} of {} cells failed", out.sweep.rows.len());
    }
    log::info!("results in {}", out.sweep_path.display());
    Ok(())
}

fn render(a: RenderArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let (labels, m) = nom_from_csv(&text)?;
    let (pgm, svg) = render_heatmap(&m, &labels, &a.out)?;
    println!("{}", pgm.display());
    println!("{}", svg.display());
    Ok(())
}

fn anova(a: AnovaArgs) -> Result<()> {
    let mut values = Vec::new();
    let mut groups = Vec::new();
    let mut stages = Vec::new();
    for path in &a.tables {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let table = FeatureTable::<f64>::from_csv(&text).with_context(|| format!("parsing {}", path.display()))?;
        let column = match &a.feature {
            Some(name) => Some(
                table
                    .feature_names
                    .iter()
                    .position(|n| n == name)
                    .with_context(|| format!("{} has no feature `{name}`", path.display()))?,
            ),
            None => None,
        };
        for r in 0..table.len() {
            let row = table.rows.row(r);
            values.push(match column {
                Some(c) => row[c],
                None => row.iter().sum::<f64>() / row.len().max(1) as f64,
            });
        }
        groups.extend_from_slice(&table.labels);
        stages.extend_from_slice(&table.stages);
    }
    print!("{}", anova_two_way(&values, &groups, &stages)?.to_csv());
    Ok(())
}
