//! Command-line front end. [`run`] parses argv, executes one subcommand and
//! maps the result to an exit status: 0 success, 1 validation or usage
//! error, 2 runtime (I/O) error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::checks;
use crate::dataio::{atomic_write, load_dataset, load_manifest, FeatureDataset};
use crate::density::{BandwidthRule, DensityConfig, GridSpec};
use crate::divergence::DivergenceKind;
use crate::error::{Error, Result};
use crate::expansion::{build_cloud, check_learnability, estimate_expansion, FeatureCloud};
use crate::metrics::{per_feature_metrics, projected_metrics, report_csv, MetricSelection, ProjectionOptions};
use crate::plot::expansion_svg;
use crate::selection::{select_from_manifest, PipelineOptions, R0Mode, SelectionConfig};
use crate::synthetic::{
    colored_mnist_sidecar, gaussian_lemma_sidecar, gen_colored_mnist, gen_gaussian_lemma, gen_trap, trap_sidecar,
    write_with_sidecar, ColoredMnistSpec, GaussianLemmaSpec, TrapSpec, TrapVariant,
};

#[derive(Debug, Parser)]
#[command(name = "oodsel", version, about = "Variation, informativeness and model selection for out-of-distribution generalization")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "OODSEL_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-feature variation report.
    Variation(MetricArgs),
    /// Per-feature informativeness report.
    Informativeness(MetricArgs),
    /// Supremum of variation and infimum of informativeness over projected features.
    Projected(ProjectedArgs),
    /// Rank the models of a manifest by accuracy minus r0 times variation.
    Select(SelectArgs),
    /// Feature cloud, expansion envelope and learnability verdict.
    Expansion(ExpansionArgs),
    /// Generate a synthetic dataset with an oracle sidecar.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Render a cloud CSV as an SVG scatter.
    Plot(PlotArgs),
    /// Run the analytic-oracle acceptance suite.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct DensityArgs {
    /// Bandwidth rule: silverman, scott, or a fixed positive width.
    #[arg(long, default_value = "silverman")]
    bandwidth: BandwidthRule,
    /// Density grid points.
    #[arg(long, default_value_t = 512)]
    grid_size: usize,
}

impl DensityArgs {
    fn config(&self) -> Result<DensityConfig> {
        let grid = GridSpec {
            m: self.grid_size,
            ..GridSpec::default()
        };
        grid.validate()?;
        Ok(DensityConfig { rule: self.bandwidth, grid })
    }
}

#[derive(Debug, Args)]
struct DomainArgs {
    /// Domain set: `avail`, `all`, or a comma-separated id list.
    #[arg(long, default_value = "avail")]
    domains: String,
    /// Available domain ids; read from the dataset's JSON sidecar when omitted.
    #[arg(long, value_delimiter = ',')]
    avail: Option<Vec<u16>>,
}

#[derive(Debug, Args)]
struct MetricArgs {
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    domains: DomainArgs,
    /// tv, symkl or l2.
    #[arg(long, default_value = "tv")]
    divergence: DivergenceKind,
    #[command(flatten)]
    density: DensityArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ProjectedArgs {
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    domains: DomainArgs,
    #[arg(long, default_value = "tv")]
    divergence: DivergenceKind,
    #[command(flatten)]
    density: DensityArgs,
    /// Random directions sampled in addition to the coordinate axes.
    #[arg(long, default_value_t = 256)]
    n_directions: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Hill-climb evaluations from the best sampled direction (0 disables).
    #[arg(long, default_value_t = 0)]
    refine_steps: usize,
    /// Per-direction CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// `auto` or a fixed value >= 0.
    #[arg(long, default_value = "auto")]
    r0: R0Mode,
    #[arg(long, default_value_t = 0.1)]
    acc_window: f64,
    #[arg(long, default_value = "tv")]
    divergence: DivergenceKind,
    #[command(flatten)]
    density: DensityArgs,
    /// Compute variation for every model, not only those that could rank first.
    #[arg(long)]
    score_all: bool,
    /// Model ids to score regardless of accuracy.
    #[arg(long, value_delimiter = ',')]
    include: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ExpansionArgs {
    /// Dataset to build the cloud from.
    #[arg(long, conflicts_with = "cloud", required_unless_present = "cloud")]
    data: Option<PathBuf>,
    /// Previously written cloud CSV.
    #[arg(long)]
    cloud: Option<PathBuf>,
    /// Available domain ids; read from the dataset's JSON sidecar when omitted.
    #[arg(long, value_delimiter = ',')]
    avail: Option<Vec<u16>>,
    #[arg(long, default_value = "tv")]
    divergence: DivergenceKind,
    #[command(flatten)]
    density: DensityArgs,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 40)]
    n_bins: usize,
    #[arg(long, default_value_t = 0.05)]
    x0: f64,
    #[arg(long, default_value_t = 0.2)]
    y0: f64,
    /// Cloud CSV output (only with --data).
    #[arg(long)]
    out_cloud: Option<PathBuf>,
    /// Envelope CSV output.
    #[arg(long)]
    out_envelope: PathBuf,
    /// Optional SVG scatter with the envelope.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long)]
    cloud: PathBuf,
    /// Draw the envelope for this delta.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 40)]
    n_bins: usize,
    #[arg(long, default_value = "feature cloud")]
    title: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Paper,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, value_enum, default_value = "paper")]
    suite: Suite,
}

#[derive(Debug, Args)]
struct SynthOut {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// File stem for the dataset and sidecar.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Debug, Subcommand)]
enum SynthCommand {
    /// Feature-level Colored MNIST: a shape score and a domain-dependent color score.
    ColoredMnist {
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2")]
        e_avail: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        e_all: Vec<f64>,
        #[arg(long, default_value_t = 50_000)]
        n: usize,
        #[arg(long, default_value_t = 0.25)]
        flip_prob: f64,
        #[arg(long, default_value_t = 1.0)]
        shape_mean: f64,
        #[arg(long, default_value_t = 0.05)]
        color_noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exactly balanced labels per domain.
        #[arg(long)]
        exact_balance: bool,
        #[command(flatten)]
        out: SynthOut,
    },
    /// Two-feature Gaussian family over four domains.
    GaussianLemma {
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long, default_value_t = 4.0)]
        k: f64,
        #[arg(long, default_value_t = 50_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        exact_balance: bool,
        #[command(flatten)]
        out: SynthOut,
    },
    /// Two-domain dataset whose coordinates hide a domain shift.
    Trap {
        #[arg(long, value_enum, default_value = "strict")]
        variant: TrapArg,
        #[arg(long, default_value_t = 0.9)]
        correlation: f64,
        #[arg(long, default_value_t = 50_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        exact_balance: bool,
        #[command(flatten)]
        out: SynthOut,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TrapArg {
    Paper,
    Strict,
}

/// Parses `argv` (including the program name) and runs one subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                eprintln!("see `oodsel --help` for usage");
                1
            } else {
                2
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.threads {
        Some(0) => Err(Error::invalid("--threads must be >= 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::io(Path::new("<thread pool>"), std::io::Error::other(e)))?;
            pool.install(|| execute(cli.command))
        }
        None => execute(cli.command),
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Variation(a) => metric_report(a, MetricSelection::VARIATION),
        Command::Informativeness(a) => metric_report(a, MetricSelection::INFORMATIVENESS),
        Command::Projected(a) => projected(a),
        Command::Select(a) => select(a),
        Command::Expansion(a) => expansion(a),
        Command::Synth(s) => synth(s),
        Command::Plot(a) => plot(a),
        Command::Check(a) => check(a),
    }
}

#[derive(serde::Deserialize)]
struct SidecarDomains {
    avail_domains: Vec<u16>,
}

fn sidecar_avail(data: &Path) -> Result<Vec<u16>> {
    let path = data.with_extension("json");
    let text = std::fs::read_to_string(&path).map_err(|_| {
        Error::invalid(format!(
            "no available-domain list: pass --avail or provide a sidecar at {}",
            path.display()
        ))
    })?;
    Ok(serde_json::from_str::<SidecarDomains>(&text)?.avail_domains)
}

fn parse_id_list(s: &str) -> Result<Vec<u16>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u16>()
                .map_err(|_| Error::invalid(format!("--domains {s:?}: expected avail, all, or comma-separated ids")))
        })
        .collect()
}

/// Resolves a domain-set name against the dataset; returns ids and the report label.
fn resolve_domains(ds: &FeatureDataset, data: &Path, spec: &str, avail: Option<&[u16]>) -> Result<(Vec<u16>, String)> {
    match spec {
        "all" => Ok((ds.domain_ids().to_vec(), "all".to_string())),
        "avail" => {
            let ids = match avail {
                Some(ids) => ids.to_vec(),
                None => sidecar_avail(data)?,
            };
            Ok((ids, "avail".to_string()))
        }
        list => {
            let ids = parse_id_list(list)?;
            let label = ids.iter().map(u16::to_string).collect::<Vec<_>>().join(";");
            Ok((ids, label))
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    atomic_write(path, text.as_bytes())
}

fn metric_report(a: MetricArgs, which: MetricSelection) -> Result<i32> {
    a.divergence.validate()?;
    let cfg = a.density.config()?;
    let ds = load_dataset(&a.data)?;
    let (domains, label) = resolve_domains(&ds, &a.data, &a.domains.domains, a.domains.avail.as_deref())?;
    let rows = per_feature_metrics(&ds, &domains, &label, a.divergence, &cfg, which)?;
    write_text(&a.out, &report_csv(&rows))?;
    let (name, values): (&str, Vec<f64>) = if which.variation {
        ("variation", rows.iter().filter_map(|r| r.variation).collect())
    } else {
        ("informativeness", rows.iter().filter_map(|r| r.informativeness).collect())
    };
    let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
    println!(
        "{name}: {} features over domains [{label}] ({}), mean {mean:.6} -> {}",
        rows.len(),
        a.divergence,
        a.out.display()
    );
    Ok(0)
}

fn projected(a: ProjectedArgs) -> Result<i32> {
    a.divergence.validate()?;
    let cfg = a.density.config()?;
    let ds = load_dataset(&a.data)?;
    let (domains, label) = resolve_domains(&ds, &a.data, &a.domains.domains, a.domains.avail.as_deref())?;
    let opts = ProjectionOptions {
        n_directions: a.n_directions,
        seed: a.seed,
        refine_steps: a.refine_steps,
    };
    let m = projected_metrics(&ds, &domains, a.divergence, opts, &cfg)?;
    write_text(&a.out, &m.directions_csv())?;
    println!(
        "projected: v_sup {:.6}, i_inf {:.6} over {} directions on domains [{label}] ({}) -> {}",
        m.v_sup,
        m.i_inf,
        m.directions.len(),
        a.divergence,
        a.out.display()
    );
    Ok(0)
}

fn select(a: SelectArgs) -> Result<i32> {
    let cfg = SelectionConfig {
        r0: a.r0,
        acc_window: a.acc_window,
        divergence: a.divergence,
    };
    cfg.validate()?;
    let opts = PipelineOptions {
        score_all: a.score_all,
        include: a.include,
        density: a.density.config()?,
    };
    let manifest = load_manifest(&a.manifest)?;
    let ranking = select_from_manifest(&manifest, &cfg, &opts)?;
    write_text(&a.out, &ranking.to_csv())?;
    let best = ranking.best().map(|m| m.model_id.as_str()).unwrap_or("none");
    println!(
        "select: best {best}, r0 {:.6}, {} scored, {} skipped -> {}",
        ranking.r0_used,
        ranking.ranked.len(),
        ranking.unscored.len(),
        a.out.display()
    );
    Ok(0)
}

fn validate_window(x0: f64, y0: f64, n_bins: usize) -> Result<()> {
    if !(x0 > 0.0 && y0 > 0.0) {
        return Err(Error::invalid("--x0 and --y0 must be > 0"));
    }
    if n_bins < 2 {
        return Err(Error::invalid("--n-bins must be >= 2"));
    }
    Ok(())
}

fn expansion(a: ExpansionArgs) -> Result<i32> {
    validate_window(a.x0, a.y0, a.n_bins)?;
    if !(a.delta.is_finite() && a.delta >= 0.0) {
        return Err(Error::invalid("--delta must be >= 0"));
    }
    a.divergence.validate()?;
    let cfg = a.density.config()?;
    let cloud = match (&a.data, &a.cloud) {
        (Some(data), _) => {
            let ds = load_dataset(data)?;
            let avail = match &a.avail {
                Some(ids) => ids.clone(),
                None => sidecar_avail(data)?,
            };
            let rows_avail = per_feature_metrics(&ds, &avail, "avail", a.divergence, &cfg, MetricSelection::BOTH)?;
            let rows_all = per_feature_metrics(&ds, ds.domain_ids(), "all", a.divergence, &cfg, MetricSelection::VARIATION)?;
            build_cloud(&rows_avail, &rows_all)?
        }
        (None, Some(path)) => FeatureCloud::read_csv(path)?,
        (None, None) => return Err(Error::invalid("pass --data or --cloud")),
    };
    if a.out_cloud.is_some() && a.data.is_none() {
        return Err(Error::invalid("--out-cloud requires --data"));
    }
    let est = estimate_expansion(&cloud, a.delta, a.n_bins)?;
    let verdict = check_learnability(&cloud, a.delta, a.x0, a.y0)?;
    if let Some(path) = &a.out_cloud {
        write_text(path, &cloud.to_csv())?;
    }
    write_text(&a.out_envelope, &est.to_csv())?;
    if let Some(path) = &a.svg {
        write_text(path, &expansion_svg(&cloud, Some(&est), &format!("delta = {}", a.delta)))?;
    }
    println!("expansion: {} points, {} used; {}", cloud.len(), est.n_points_used, verdict.summary());
    Ok(0)
}

fn synth(s: SynthCommand) -> Result<i32> {
    let (path, n, d) = match s {
        SynthCommand::ColoredMnist {
            e_avail,
            e_all,
            n,
            flip_prob,
            shape_mean,
            color_noise,
            seed,
            exact_balance,
            out,
        } => {
            let spec = ColoredMnistSpec {
                e_avail,
                e_all,
                n_per_domain: n,
                flip_prob,
                shape_mean,
                color_noise,
                seed,
                exact_balance,
            };
            let ds = gen_colored_mnist(&spec)?;
            let name = out.name.unwrap_or_else(|| "colored_mnist".into());
            let path = write_with_sidecar(&out.out, &name, &ds, &colored_mnist_sidecar(&spec)?)?;
            (path, ds.n_samples(), ds.dim())
        }
        SynthCommand::GaussianLemma { t, k, n, seed, exact_balance, out } => {
            let spec = GaussianLemmaSpec { t, k, n_per_domain: n, seed, exact_balance };
            let ds = gen_gaussian_lemma(&spec)?;
            let name = out.name.unwrap_or_else(|| "gaussian_lemma".into());
            let path = write_with_sidecar(&out.out, &name, &ds, &gaussian_lemma_sidecar(&spec)?)?;
            (path, ds.n_samples(), ds.dim())
        }
        SynthCommand::Trap { variant, correlation, n, seed, exact_balance, out } => {
            let spec = TrapSpec {
                variant: match variant {
                    TrapArg::Paper => TrapVariant::Paper,
                    TrapArg::Strict => TrapVariant::Strict,
                },
                correlation,
                n_per_domain: n,
                seed,
                exact_balance,
            };
            let ds = gen_trap(&spec)?;
            let name = out.name.unwrap_or_else(|| "trap".into());
            let path = write_with_sidecar(&out.out, &name, &ds, &trap_sidecar(&spec))?;
            (path, ds.n_samples(), ds.dim())
        }
    };
    println!("synth: {n} samples, d = {d} -> {}", path.display());
    Ok(0)
}

fn plot(a: PlotArgs) -> Result<i32> {
    if a.n_bins < 2 {
        return Err(Error::invalid("--n-bins must be >= 2"));
    }
    let cloud = FeatureCloud::read_csv(&a.cloud)?;
    let est = match a.delta {
        Some(delta) => Some(estimate_expansion(&cloud, delta, a.n_bins)?),
        None => None,
    };
    write_text(&a.out, &expansion_svg(&cloud, est.as_ref(), &a.title))?;
    println!("plot: {} points -> {}", cloud.len(), a.out.display());
    Ok(0)
}

fn check(a: CheckArgs) -> Result<i32> {
    let Suite::Paper = a.suite;
    let outcomes = checks::paper_suite();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("check: {passed}/{} criteria passed", outcomes.len());
    Ok(if passed == outcomes.len() { 0 } else { 1 })
}
