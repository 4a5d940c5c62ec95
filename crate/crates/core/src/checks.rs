//! Analytic-oracle acceptance suite.
//!
//! Each `run_*` function performs one measurement and returns the raw numbers;
//! [`paper_suite`] compares them against closed-form answers. The same
//! measurements back the `check` subcommand and the acceptance test target.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataio::FeatureDataset;
use crate::density::{estimate_density, DensityConfig};
use crate::divergence::{divergence, DivergenceKind};
use crate::error::{Error, Result};
use crate::expansion::{check_learnability, estimate_expansion, CloudPoint, FeatureCloud};
use crate::metrics::{
    feature_variation, per_feature_metrics, projected_metrics, report_csv, Direction, FeatureRef, MetricSelection,
    ProjectionOptions,
};
use crate::normal;
use crate::selection::{select, R0Mode, Ranking, SelectionConfig};
use crate::synthetic::{
    colored_mnist_zoo, empirical_worst_error, eval_lemma_classifier, gen_colored_mnist, gen_gaussian_lemma, gen_trap,
    pearson, zero_mean_normal_tv, ColoredMnistSpec, GaussianLemmaSpec, LemmaClassifierEval, TrapSpec, TrapVariant,
    ZooModel, ZooSpec,
};

/// One pass/fail line of the suite.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {} ({:.2} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, Duration)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed()))
}

fn normal_draws(rng: &mut ChaCha8Rng, n: usize, mean: f64) -> Vec<f64> {
    (0..n)
        .map(|_| mean + <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct DivergenceRun {
    pub tv: f64,
    pub sym_kl: f64,
    pub elapsed: Duration,
}

/// KDE divergences between `n` draws of N(0, 1) and `n` draws of N(1, 1).
pub fn run_divergence(n: usize, seed: u64) -> Result<DivergenceRun> {
    let ((tv, sym_kl), elapsed) = timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = normal_draws(&mut rng, n, 0.0);
        let b = normal_draws(&mut rng, n, 1.0);
        let cfg = DensityConfig::default();
        let p = estimate_density(&a, cfg.rule, cfg.grid)?;
        let q = estimate_density(&b, cfg.rule, cfg.grid)?;
        Ok((
            divergence(&p, &q, DivergenceKind::TotalVariation)?,
            divergence(&p, &q, DivergenceKind::symmetric_kl())?,
        ))
    })?;
    Ok(DivergenceRun { tv, sym_kl, elapsed })
}

#[derive(Debug, Clone, Copy)]
pub struct LemmaVariationRun {
    pub v_avail: f64,
    pub v_all: f64,
    pub elapsed: Duration,
}

/// Symmetric-KL variation of `(z + η)/√2` on the Gaussian family, available and all domains.
pub fn run_lemma_variation(t: f64, k: f64, n: usize, seed: u64) -> Result<LemmaVariationRun> {
    let ((v_avail, v_all), elapsed) = timed(|| {
        let ds = gen_gaussian_lemma(&GaussianLemmaSpec { t, k, n_per_domain: n, seed, exact_balance: false })?;
        let dir = FeatureRef::Projected(Direction::new(vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2])?);
        let cfg = DensityConfig::default();
        let kind = DivergenceKind::symmetric_kl();
        Ok((
            feature_variation(&ds, &dir, &GaussianLemmaSpec::AVAIL, kind, &cfg)?,
            feature_variation(&ds, &dir, &GaussianLemmaSpec::ALL, kind, &cfg)?,
        ))
    })?;
    Ok(LemmaVariationRun { v_avail, v_all, elapsed })
}

/// Mixing angles `0°, 10°, …, 80°` of the lower-bound sweep.
pub fn lemma_angles() -> Vec<f64> {
    (0..9).map(|i| f64::from(i) * FRAC_PI_2 / 9.0).collect()
}

#[derive(Debug, Clone, Copy)]
pub struct LowerBoundRow {
    pub angle: f64,
    pub eval: LemmaClassifierEval,
    pub mc_loss_avail: f64,
    pub mc_loss_all: f64,
}

impl LowerBoundRow {
    pub fn mc_err(&self) -> f64 {
        self.mc_loss_all - self.mc_loss_avail
    }
}

/// Closed-form and Monte Carlo losses of `sign(cos α·z + sin α·η)` for each angle.
pub fn run_lower_bound(t: f64, k: f64, n: usize, seed: u64) -> Result<Vec<LowerBoundRow>> {
    let spec = GaussianLemmaSpec { t, k, n_per_domain: n, seed, exact_balance: false };
    let ds = gen_gaussian_lemma(&spec)?;
    lemma_angles()
        .into_iter()
        .map(|angle| {
            let w = [angle.cos(), angle.sin()];
            Ok(LowerBoundRow {
                angle,
                eval: eval_lemma_classifier(&spec, w, false)?,
                mc_loss_avail: empirical_worst_error(&ds, &w, &GaussianLemmaSpec::AVAIL),
                mc_loss_all: empirical_worst_error(&ds, &w, &GaussianLemmaSpec::ALL),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct ColoredMnistRun {
    pub color_v_avail: f64,
    pub color_v_all: f64,
    pub shape_v_avail: f64,
    pub shape_v_all: f64,
    pub elapsed: Duration,
}

/// TV variation of the shape and color features on the available and all domains.
pub fn run_colored_mnist(spec: &ColoredMnistSpec) -> Result<ColoredMnistRun> {
    let (v, elapsed) = timed(|| {
        let ds = gen_colored_mnist(spec)?;
        let cfg = DensityConfig::default();
        let kind = DivergenceKind::TotalVariation;
        let (avail, all) = (spec.avail_ids(), spec.all_ids());
        let rows_avail = per_feature_metrics(&ds, &avail, "avail", kind, &cfg, MetricSelection::VARIATION)?;
        let rows_all = per_feature_metrics(&ds, &all, "all", kind, &cfg, MetricSelection::VARIATION)?;
        let get = |rows: &[crate::metrics::FeatureMetrics], j: usize| rows[j].variation.unwrap_or(0.0);
        Ok([get(&rows_avail, 0), get(&rows_all, 0), get(&rows_avail, 1), get(&rows_all, 1)])
    })?;
    Ok(ColoredMnistRun {
        shape_v_avail: v[0],
        shape_v_all: v[1],
        color_v_avail: v[2],
        color_v_all: v[3],
        elapsed,
    })
}

#[derive(Debug, Clone)]
pub struct TrapRun {
    pub coordinate_v: Vec<f64>,
    pub v_sup: f64,
    pub v_sup_direction: Direction,
    pub elapsed: Duration,
}

/// Per-coordinate TV variation and the projected `v_sup` on the strict trap.
pub fn run_trap(correlation: f64, n: usize, opts: ProjectionOptions, seed: u64) -> Result<TrapRun> {
    let ((coordinate_v, proj), elapsed) = timed(|| {
        let ds = gen_trap(&TrapSpec {
            variant: TrapVariant::Strict,
            correlation,
            n_per_domain: n,
            seed,
            exact_balance: false,
        })?;
        let cfg = DensityConfig::default();
        let kind = DivergenceKind::TotalVariation;
        let coords = per_feature_metrics(&ds, &TrapSpec::DOMAINS, "all", kind, &cfg, MetricSelection::VARIATION)?
            .iter()
            .map(|r| r.variation.unwrap_or(0.0))
            .collect::<Vec<_>>();
        let proj = projected_metrics(&ds, &TrapSpec::DOMAINS, kind, opts, &cfg)?;
        Ok((coords, proj))
    })?;
    Ok(TrapRun {
        coordinate_v,
        v_sup: proj.v_sup,
        v_sup_direction: proj.v_sup_direction,
        elapsed,
    })
}

#[derive(Debug, Clone)]
pub struct ZooRun {
    pub models: Vec<ZooModel>,
    pub auto: Ranking,
    pub baseline: Ranking,
    pub elapsed: Duration,
}

impl ZooRun {
    fn model(&self, id: &str) -> Option<&ZooModel> {
        self.models.iter().find(|m| m.record.model_id == id)
    }

    pub fn auto_pick(&self) -> Option<&ZooModel> {
        self.auto.best().and_then(|b| self.model(&b.model_id))
    }

    pub fn baseline_pick(&self) -> Option<&ZooModel> {
        self.baseline.best().and_then(|b| self.model(&b.model_id))
    }

    /// Correlation between validation and OOD accuracy across the zoo.
    pub fn correlation(&self) -> f64 {
        let val: Vec<f64> = self.models.iter().map(|m| m.record.val_accuracy).collect();
        let ood: Vec<f64> = self.models.iter().map(|m| m.ood_accuracy).collect();
        pearson(&val, &ood)
    }
}

/// Ranks the Colored MNIST zoo with auto `r0` and with `r0 = 0`.
pub fn run_zoo(spec: &ZooSpec) -> Result<ZooRun> {
    let ((models, auto, baseline), elapsed) = timed(|| {
        let models = colored_mnist_zoo(spec, &DensityConfig::default())?;
        let records: Vec<_> = models.iter().map(|m| m.record.clone()).collect();
        let auto = select(&records, &SelectionConfig::default())?;
        let baseline = select(&records, &SelectionConfig { r0: R0Mode::Fixed(0.0), ..SelectionConfig::default() })?;
        Ok((models, auto, baseline))
    })?;
    Ok(ZooRun { models, auto, baseline, elapsed })
}

fn point(tag: &str, v_avail: f64, v_all: f64, informativeness: f64) -> CloudPoint {
    CloudPoint {
        feature_tag: tag.to_string(),
        v_avail,
        v_all,
        informativeness,
    }
}

/// Figure-style cloud: informative features on a gentle slope plus one
/// non-informative feature that is nearly invariant on the available domains
/// but varies strongly across all domains.
pub fn origin_trap_cloud() -> FeatureCloud {
    let mut pts: Vec<CloudPoint> = (1..=12)
        .map(|i| {
            let x = 0.02 * f64::from(i);
            point(&format!("f{i}"), x, 1.5 * x, 0.2 + 0.02 * f64::from(i))
        })
        .collect();
    pts.push(point("trap", 0.01, 0.9, 0.0));
    FeatureCloud::new(pts).expect("static cloud is valid")
}

/// Envelope and verdict invariants of one cloud over an increasing list of deltas.
pub fn expansion_properties(cloud: &FeatureCloud, deltas: &[f64], n_bins: usize, x0: f64, y0: f64) -> std::result::Result<(), String> {
    let mut previous: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    let mut was_learnable = false;
    for &delta in deltas {
        let verdict = check_learnability(cloud, delta, x0, y0).map_err(|e| e.to_string())?;
        if verdict.learnable != (verdict.envelope_at_origin <= y0) {
            return Err(format!("verdict inconsistent at delta {delta}"));
        }
        if was_learnable && !verdict.learnable {
            return Err(format!("verdict regressed to unlearnable at delta {delta}"));
        }
        was_learnable |= verdict.learnable;
        let est = match estimate_expansion(cloud, delta, n_bins) {
            Ok(est) => est,
            Err(Error::Invalid(_)) => continue,
            Err(e) => return Err(e.to_string()),
        };
        for b in 0..est.envelope.len() {
            if b > 0 && est.envelope[b] < est.envelope[b - 1] {
                return Err(format!("envelope decreases at bin {b}, delta {delta}"));
            }
            if est.envelope[b] < est.bin_edges[b + 1] {
                return Err(format!("envelope below identity at bin {b}, delta {delta}"));
            }
        }
        if let Some((d_prev, edges, env)) = &previous {
            if edges != &est.bin_edges {
                return Err("bin edges depend on delta".to_string());
            }
            if let Some(b) = (0..env.len()).find(|&b| est.envelope[b] > env[b]) {
                return Err(format!("envelope rises at bin {b} from delta {d_prev} to {delta}"));
            }
        }
        previous = Some((delta, est.bin_edges.clone(), est.envelope.clone()));
    }
    Ok(())
}

/// A random cloud of 1..=60 points with coordinates in [0, 1].
pub fn random_cloud(seed: u64) -> FeatureCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=60);
    let pts = (0..n)
        .map(|i| point(&format!("r{i}"), rng.gen(), rng.gen(), rng.gen()))
        .collect();
    FeatureCloud::new(pts).expect("coordinates are finite and nonnegative")
}

/// Deltas used for the randomized expansion properties.
pub const PROPERTY_DELTAS: [f64; 6] = [0.0, 0.1, 0.15, 0.3, 0.6, 0.9];

/// Dataset with `d` features, three domains and `k` classes; half the
/// features shift with the domain.
pub fn perf_dataset(d: usize, n: usize, k: u32, seed: u64) -> Result<FeatureDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    let mut domains = Vec::with_capacity(n);
    for i in 0..n {
        let label = (i % k as usize) as u16 + 1;
        let domain = ((i / k as usize) % 3) as u16;
        for j in 0..d {
            let z: f64 = StandardNormal.sample(&mut rng);
            let shift = if j % 2 == 0 { 0.3 * f64::from(domain) } else { 0.0 };
            features.push((z + 0.5 * f64::from(label) + shift) as f32);
        }
        labels.push(label);
        domains.push(domain);
    }
    FeatureDataset::new(d, k, features, labels, domains)
}

/// Named CSV artifacts of a small end-to-end pipeline.
pub fn pipeline_outputs() -> Result<Vec<(&'static str, String)>> {
    let cfg = DensityConfig::default();
    let kind = DivergenceKind::TotalVariation;
    let ds = perf_dataset(12, 1_500, 3, 99)?;
    let avail = [0u16, 1];
    let all = [0u16, 1, 2];
    let rows_avail = per_feature_metrics(&ds, &avail, "avail", kind, &cfg, MetricSelection::BOTH)?;
    let rows_all = per_feature_metrics(&ds, &all, "all", kind, &cfg, MetricSelection::BOTH)?;
    let cloud = crate::expansion::build_cloud(&rows_avail, &rows_all)?;
    let est = estimate_expansion(&cloud, 0.0, 40)?;
    let proj = projected_metrics(
        &ds,
        &avail,
        kind,
        ProjectionOptions { n_directions: 32, seed: 7, refine_steps: 20 },
        &cfg,
    )?;
    let zoo = colored_mnist_zoo(
        &ZooSpec {
            data: ColoredMnistSpec { n_per_domain: 2_000, shape_mean: 3.0, ..ColoredMnistSpec::default() },
            n_models: 4,
            n_eval_per_domain: 1_000,
        },
        &cfg,
    )?;
    let records: Vec<_> = zoo.into_iter().map(|m| m.record).collect();
    let ranking = select(&records, &SelectionConfig::default())?;
    Ok(vec![
        ("variation_avail.csv", report_csv(&rows_avail)),
        ("variation_all.csv", report_csv(&rows_all)),
        ("cloud.csv", cloud.to_csv()),
        ("envelope.csv", est.to_csv()),
        ("directions.csv", proj.directions_csv()),
        ("ranking.csv", ranking.to_csv()),
    ])
}

/// Runs `f` inside a dedicated rayon pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid(format!("cannot build a {threads}-thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub fn max_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Thread counts compared by the determinism check.
pub fn determinism_thread_counts() -> Vec<usize> {
    let mut v = vec![1, 4, max_threads()];
    v.dedup();
    v
}

/// Names of pipeline outputs that differ from the single-thread run.
pub fn run_determinism() -> Result<Vec<String>> {
    let reference = with_threads(1, pipeline_outputs)??;
    let mut mismatches = Vec::new();
    for threads in determinism_thread_counts().into_iter().skip(1) {
        let out = with_threads(threads, pipeline_outputs)??;
        for ((name, a), (_, b)) in reference.iter().zip(&out) {
            if a != b {
                mismatches.push(format!("{name}@{threads}"));
            }
        }
    }
    Ok(mismatches)
}

/// Wall time of per-feature TV variation on the performance dataset, using every core.
pub fn run_performance(d: usize, n: usize, k: u32) -> Result<Duration> {
    let ds = perf_dataset(d, n, k, 2024)?;
    let cfg = DensityConfig::default();
    let (_, elapsed) = timed(|| {
        with_threads(max_threads(), || {
            per_feature_metrics(&ds, &[0, 1, 2], "all", DivergenceKind::TotalVariation, &cfg, MetricSelection::VARIATION)
        })?
    })?;
    Ok(elapsed)
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn outcome(id: u8, title: &'static str, start: Instant, result: Result<(bool, String)>) -> Outcome {
    let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome {
        id,
        title,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

/// Runs every criterion against its closed-form oracle.
pub fn paper_suite() -> Vec<Outcome> {
    let mut out = Vec::with_capacity(8);

    let start = Instant::now();
    out.push(outcome(1, "divergence oracles", start, (|| {
        let r = run_divergence(20_000, 1)?;
        let tv_true = 2.0 * normal::cdf(0.5) - 1.0;
        let ok = within(r.tv, tv_true, 0.02) && within(r.sym_kl, 0.5, 0.05) && r.elapsed < Duration::from_secs(2);
        Ok((ok, format!("tv {:.4} (oracle {tv_true:.4}), symkl {:.4} (oracle 0.5)", r.tv, r.sym_kl)))
    })()));

    let start = Instant::now();
    out.push(outcome(2, "gaussian-lemma variation", start, (|| {
        let r = run_lemma_variation(0.5, 4.0, 50_000, 7)?;
        let ratio = r.v_all / r.v_avail;
        let ok = within(r.v_avail, 0.25, 0.0375)
            && within(r.v_all, 1.0, 0.15)
            && within(ratio, 4.0, 0.8)
            && r.elapsed < Duration::from_secs(30);
        Ok((ok, format!("v_avail {:.4}, v_all {:.4}, ratio {ratio:.3}", r.v_avail, r.v_all)))
    })()));

    let start = Instant::now();
    out.push(outcome(3, "lower-bound inequality", start, (|| {
        let rows = run_lower_bound(0.5, 4.0, 200_000, 3)?;
        let bound_ok = rows.iter().all(|r| r.eval.err >= r.eval.c1_bound);
        let worst = rows.iter().map(|r| (r.eval.err - r.mc_err()).abs()).fold(0.0, f64::max);
        let mut detail = format!("bound holds at {}/{} angles, max |err − mc| {worst:.4}", rows.iter().filter(|r| r.eval.err >= r.eval.c1_bound).count(), rows.len());
        if let Some(r) = rows.last() {
            let _ = write!(detail, ", err(80°) {:.4} ≥ {:.4}", r.eval.err, r.eval.c1_bound);
        }
        Ok((bound_ok && worst <= 0.005, detail))
    })()));

    let start = Instant::now();
    out.push(outcome(4, "colored-mnist expansion slope", start, (|| {
        let spec = ColoredMnistSpec::default();
        let r = run_colored_mnist(&spec)?;
        let slope_true = crate::synthetic::colored_mnist_expansion_slope(&spec.e_avail, &spec.e_all)?;
        let slope = r.color_v_all / r.color_v_avail;
        let ok = within(slope, slope_true, 0.1 * slope_true) && r.shape_v_avail <= 0.05 && r.shape_v_all <= 0.05;
        Ok((ok, format!(
            "color slope {slope:.3} (oracle {slope_true:.1}), shape v {:.4}/{:.4}",
            r.shape_v_avail, r.shape_v_all
        )))
    })()));

    let start = Instant::now();
    out.push(outcome(5, "projection necessity", start, (|| {
        let r = run_trap(0.9, 50_000, ProjectionOptions::default(), 5)?;
        let oracle = zero_mean_normal_tv(1.9, 0.1);
        let coord = r.coordinate_v.iter().copied().fold(0.0, f64::max);
        let ok = coord <= 0.02 && r.v_sup >= 0.5;
        Ok((ok, format!("max coordinate v {coord:.4}, v_sup {:.4} (diagonal oracle {oracle:.4})", r.v_sup)))
    })()));

    let start = Instant::now();
    out.push(outcome(6, "selection behavior", start, (|| {
        let r = run_zoo(&ZooSpec::default())?;
        let (Some(pick), Some(base)) = (r.auto_pick(), r.baseline_pick()) else {
            return Ok((false, "empty ranking".to_string()));
        };
        let corr = r.correlation();
        let ok = r.models.len() >= 6 && pick.invariant_dominant() && pick.ood_accuracy > base.ood_accuracy && corr < 0.0;
        Ok((ok, format!(
            "auto r0 {:.3} picks {} (ood {:.3}) vs baseline {} (ood {:.3}), corr {corr:.3}",
            r.auto.r0_used, pick.record.model_id, pick.ood_accuracy, base.record.model_id, base.ood_accuracy
        )))
    })()));

    let start = Instant::now();
    out.push(outcome(7, "expansion verdicts", start, (|| {
        let cloud = origin_trap_cloud();
        let at0 = check_learnability(&cloud, 0.0, 0.05, 0.2)?;
        let at15 = check_learnability(&cloud, 0.15, 0.05, 0.2)?;
        let failures: Vec<String> = (0..100u64)
            .filter_map(|seed| expansion_properties(&random_cloud(seed), &PROPERTY_DELTAS, 40, 0.05, 0.2).err())
            .collect();
        let ok = !at0.learnable && at15.learnable && failures.is_empty();
        Ok((ok, format!(
            "delta 0 learnable={}, delta 0.15 learnable={}, {} of 100 random clouds violate invariants",
            at0.learnable, at15.learnable, failures.len()
        )))
    })()));

    let start = Instant::now();
    out.push(outcome(8, "determinism and performance", start, (|| {
        let mismatches = run_determinism()?;
        let perf = run_performance(2_048, 10_000, 7)?;
        let ok = mismatches.is_empty() && perf < Duration::from_secs(60);
        Ok((ok, format!(
            "threads {:?}: {} mismatching outputs; d=2048 variation in {:.1} s on {} threads",
            determinism_thread_counts(),
            mismatches.len(),
            perf.as_secs_f64(),
            max_threads()
        )))
    })()));

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_trap_cloud_verdicts() {
        let cloud = origin_trap_cloud();
        let v0 = check_learnability(&cloud, 0.0, 0.05, 0.2).unwrap();
        assert!(!v0.learnable);
        assert_eq!(v0.witnesses, vec!["trap".to_string()]);
        assert!(check_learnability(&cloud, 0.15, 0.05, 0.2).unwrap().learnable);
        assert!(expansion_properties(&cloud, &PROPERTY_DELTAS, 40, 0.05, 0.2).is_ok());
    }

    #[test]
    fn lemma_angles_cover_first_quadrant() {
        let a = lemma_angles();
        assert_eq!(a.len(), 9);
        assert_eq!(a[0], 0.0);
        assert!(a[8] < FRAC_PI_2);
    }

    #[test]
    fn perf_dataset_shape() {
        let ds = perf_dataset(4, 70, 7, 1).unwrap();
        assert_eq!((ds.dim(), ds.n_samples(), ds.n_classes()), (4, 70, 7));
        assert_eq!(ds.domain_ids(), &[0, 1, 2]);
    }
}
