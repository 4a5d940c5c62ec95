//! Per-feature variation and informativeness, and their extremes over
//! projection directions.
//!
//! Both quantities are built from the label-conditional KDE of a scalar
//! feature in each domain. Variation is the largest divergence between two
//! domains for the same label; informativeness is the mean over label pairs
//! of the smallest within-domain divergence between the two classes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::dataio::FeatureDataset;
use crate::density::{plan_kernel, DensityConfig, KernelPlan};
use crate::divergence::{planned_divergence, DivergenceKind};
use crate::error::{Error, Result};

/// A unit-norm projection vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Scales `coefficients` to unit norm.
    pub fn normalized(coefficients: Vec<f64>) -> Result<Self> {
        let norm = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid("direction must have a finite nonzero norm"));
        }
        Ok(Self(coefficients.into_iter().map(|c| c / norm).collect()))
    }

    /// Accepts coefficients that already have unit norm (to 1e-9).
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        let norm = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("direction norm {norm} is not 1")));
        }
        Ok(Self(coefficients))
    }

    pub fn axis(d: usize, i: usize) -> Self {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        Self(v)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Which scalar feature to analyse.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureRef {
    Index(usize),
    Projected(Direction),
}

impl FeatureRef {
    fn values(&self, ds: &FeatureDataset) -> Result<Vec<f64>> {
        match self {
            FeatureRef::Index(j) if *j < ds.dim() => Ok(ds.column(*j)),
            FeatureRef::Index(j) => Err(Error::invalid(format!(
                "feature index {j} out of range for d = {}",
                ds.dim()
            ))),
            FeatureRef::Projected(dir) if dir.dim() == ds.dim() => Ok(ds.project(dir.coefficients())),
            FeatureRef::Projected(dir) => Err(Error::invalid(format!(
                "direction has {} coefficients but d = {}",
                dir.dim(),
                ds.dim()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMetrics {
    pub feature: FeatureRef,
    pub variation: Option<f64>,
    pub informativeness: Option<f64>,
    pub divergence: DivergenceKind,
    /// Label of the domain set the metrics were computed on (`avail`, `all`, or an id list).
    pub domain_set: String,
}

/// Which of the two metrics to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricSelection {
    pub variation: bool,
    pub informativeness: bool,
}

impl MetricSelection {
    pub const BOTH: Self = Self {
        variation: true,
        informativeness: true,
    };
    pub const VARIATION: Self = Self {
        variation: true,
        informativeness: false,
    };
    pub const INFORMATIVENESS: Self = Self {
        variation: false,
        informativeness: true,
    };
}

/// Row indices of every (domain, label) cell.
#[derive(Debug, Clone)]
pub struct CellIndex {
    k: u16,
    cells: BTreeMap<(u16, u16), Vec<usize>>,
}

impl CellIndex {
    pub fn new(ds: &FeatureDataset) -> Self {
        let mut cells: BTreeMap<(u16, u16), Vec<usize>> = BTreeMap::new();
        for (i, (&e, &y)) in ds.domains().iter().zip(ds.labels()).enumerate() {
            cells.entry((e, y)).or_default().push(i);
        }
        Self {
            k: ds.n_classes() as u16,
            cells,
        }
    }

    pub fn count(&self, domain: u16, label: u16) -> usize {
        self.cells.get(&(domain, label)).map_or(0, Vec::len)
    }

    /// Fails on the first (domain, label) cell with fewer than 2 rows.
    pub fn check(&self, domains: &[u16]) -> Result<()> {
        for &e in domains {
            for y in 1..=self.k {
                let count = self.count(e, y);
                if count < 2 {
                    return Err(Error::EmptyCell {
                        domain: e,
                        label: y,
                        count,
                    });
                }
            }
        }
        Ok(())
    }

    fn gather(&self, values: &[f64], domain: u16, label: u16) -> Vec<f64> {
        self.cells[&(domain, label)].iter().map(|&i| values[i]).collect()
    }
}

/// Kernel estimates of one scalar feature per selected domain (outer) and
/// label (inner). Each pair is tabulated on its own union grid on demand.
struct CellDensities(Vec<Vec<KernelPlan>>);

impl CellDensities {
    fn build(values: &[f64], cells: &CellIndex, domains: &[u16], cfg: &DensityConfig) -> Result<Self> {
        let mut out = Vec::with_capacity(domains.len());
        for &e in domains {
            let mut per_label = Vec::with_capacity(cells.k as usize);
            for y in 1..=cells.k {
                per_label.push(plan_kernel(&cells.gather(values, e, y), cfg.rule, cfg.grid)?);
            }
            out.push(per_label);
        }
        Ok(Self(out))
    }

    fn variation(&self, kind: DivergenceKind) -> Result<f64> {
        let mut best: f64 = 0.0;
        let n_labels = self.0.first().map_or(0, Vec::len);
        for y in 0..n_labels {
            for a in 0..self.0.len() {
                for b in a + 1..self.0.len() {
                    best = best.max(planned_divergence(&self.0[a][y], &self.0[b][y], kind)?);
                }
            }
        }
        Ok(best)
    }

    fn informativeness(&self, kind: DivergenceKind) -> Result<f64> {
        let n_labels = self.0.first().map_or(0, Vec::len);
        let mut total = 0.0;
        let mut pairs = 0usize;
        for y in 0..n_labels {
            for y2 in y + 1..n_labels {
                let mut worst = f64::INFINITY;
                for per_label in &self.0 {
                    worst = worst.min(planned_divergence(&per_label[y], &per_label[y2], kind)?);
                }
                total += worst;
                pairs += 1;
            }
        }
        Ok(if pairs == 0 { 0.0 } else { total / pairs as f64 })
    }
}

fn normalize_domains(domains: &[u16]) -> Vec<u16> {
    domains.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

fn metrics_for_values(
    values: &[f64],
    cells: &CellIndex,
    domains: &[u16],
    kind: DivergenceKind,
    cfg: &DensityConfig,
    which: MetricSelection,
) -> Result<(Option<f64>, Option<f64>)> {
    cells.check(domains)?;
    let need_variation = which.variation && domains.len() >= 2;
    if !(need_variation || which.informativeness) {
        return Ok((which.variation.then_some(0.0), None));
    }
    let dens = CellDensities::build(values, cells, domains, cfg)?;
    let v = if need_variation {
        Some(dens.variation(kind)?)
    } else {
        which.variation.then_some(0.0)
    };
    let i = if which.informativeness {
        Some(dens.informativeness(kind)?)
    } else {
        None
    };
    Ok((v, i))
}

fn preflight(ds: &FeatureDataset, domains: &[u16], kind: DivergenceKind, cfg: &DensityConfig, which: MetricSelection) -> Result<Vec<u16>> {
    kind.validate()?;
    cfg.grid.validate()?;
    let domains = normalize_domains(domains);
    if domains.is_empty() {
        return Err(Error::invalid("domain set is empty"));
    }
    if which.variation && domains.len() < 2 {
        log::warn!("fewer than 2 domains selected; variation is 0 by definition");
    }
    CellIndex::new(ds).check(&domains)?;
    Ok(domains)
}

/// Variation of one feature over `domains`.
pub fn feature_variation(
    ds: &FeatureDataset,
    feature: &FeatureRef,
    domains: &[u16],
    kind: DivergenceKind,
    cfg: &DensityConfig,
) -> Result<f64> {
    let domains = preflight(ds, domains, kind, cfg, MetricSelection::VARIATION)?;
    let values = feature.values(ds)?;
    let (v, _) = metrics_for_values(&values, &CellIndex::new(ds), &domains, kind, cfg, MetricSelection::VARIATION)?;
    Ok(v.unwrap_or(0.0))
}

/// Informativeness of one feature over `domains`.
pub fn feature_informativeness(
    ds: &FeatureDataset,
    feature: &FeatureRef,
    domains: &[u16],
    kind: DivergenceKind,
    cfg: &DensityConfig,
) -> Result<f64> {
    let domains = preflight(ds, domains, kind, cfg, MetricSelection::INFORMATIVENESS)?;
    let values = feature.values(ds)?;
    let (_, i) = metrics_for_values(&values, &CellIndex::new(ds), &domains, kind, cfg, MetricSelection::INFORMATIVENESS)?;
    Ok(i.unwrap_or(0.0))
}

/// Metrics for every coordinate feature, computed in parallel; output order is feature order.
pub fn per_feature_metrics(
    ds: &FeatureDataset,
    domains: &[u16],
    domain_set: &str,
    kind: DivergenceKind,
    cfg: &DensityConfig,
    which: MetricSelection,
) -> Result<Vec<FeatureMetrics>> {
    let domains = preflight(ds, domains, kind, cfg, which)?;
    let cells = CellIndex::new(ds);
    (0..ds.dim())
        .into_par_iter()
        .map(|j| {
            let values = ds.column(j);
            let (variation, informativeness) = metrics_for_values(&values, &cells, &domains, kind, cfg, which)?;
            Ok(FeatureMetrics {
                feature: FeatureRef::Index(j),
                variation,
                informativeness,
                divergence: kind,
                domain_set: domain_set.to_string(),
            })
        })
        .collect()
}

/// Mean per-coordinate variation, the model-selection statistic.
pub fn model_variation(ds: &FeatureDataset, domains: &[u16], kind: DivergenceKind, cfg: &DensityConfig) -> Result<f64> {
    let rows = per_feature_metrics(ds, domains, "", kind, cfg, MetricSelection::VARIATION)?;
    let total: f64 = rows.iter().map(|r| r.variation.unwrap_or(0.0)).sum();
    Ok(total / rows.len() as f64)
}

/// VariationReport CSV: `feature_index,variation,informativeness,divergence,domain_set`.
/// Metrics that were not computed are left empty.
pub fn report_csv(rows: &[FeatureMetrics]) -> String {
    let mut out = String::from("feature_index,variation,informativeness,divergence,domain_set\n");
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        let idx = match &r.feature {
            FeatureRef::Index(j) => j.to_string(),
            FeatureRef::Projected(_) => "projected".to_string(),
        };
        let _ = writeln!(
            out,
            "{idx},{},{},{},{}",
            fmt(r.variation),
            fmt(r.informativeness),
            r.divergence,
            r.domain_set
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionOrigin {
    Axis,
    Random,
    Refined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionMetrics {
    pub direction: Direction,
    pub origin: DirectionOrigin,
    pub variation: f64,
    pub informativeness: f64,
}

/// Monte Carlo estimates of `sup_β V(βᵀh)` and `inf_β I(βᵀh)`.
///
/// `v_sup` is a lower bound on the true supremum and `i_inf` an upper bound
/// on the true infimum: only the sampled directions are observed.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedMetrics {
    pub v_sup: f64,
    pub v_sup_direction: Direction,
    pub i_inf: f64,
    pub i_inf_direction: Direction,
    pub n_directions: usize,
    pub seed: u64,
    pub divergence: DivergenceKind,
    pub directions: Vec<DirectionMetrics>,
}

impl ProjectedMetrics {
    /// Per-direction CSV: `direction,origin,variation,informativeness,coefficients`.
    pub fn directions_csv(&self) -> String {
        let mut out = String::from("direction,origin,variation,informativeness,coefficients\n");
        for (i, d) in self.directions.iter().enumerate() {
            let origin = match d.origin {
                DirectionOrigin::Axis => "axis",
                DirectionOrigin::Random => "random",
                DirectionOrigin::Refined => "refined",
            };
            let coeffs: Vec<String> = d.direction.coefficients().iter().map(|c| c.to_string()).collect();
            let _ = writeln!(
                out,
                "{i},{origin},{},{},{}",
                d.variation,
                d.informativeness,
                coeffs.join(";")
            );
        }
        out
    }
}

/// Options for [`projected_metrics`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionOptions {
    pub n_directions: usize,
    pub seed: u64,
    /// Candidate evaluations of the optional hill climb on `v_sup` (0 disables).
    pub refine_steps: usize,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self {
            n_directions: 256,
            seed: 7,
            refine_steps: 0,
        }
    }
}

/// The `d` coordinate axes followed by `n` seeded uniform directions on the sphere.
pub fn sample_directions(d: usize, n: usize, seed: u64) -> Vec<(Direction, DirectionOrigin)> {
    let mut out: Vec<_> = (0..d).map(|i| (Direction::axis(d, i), DirectionOrigin::Axis)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < d + n {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        if let Ok(dir) = Direction::normalized(v) {
            out.push((dir, DirectionOrigin::Random));
        }
    }
    out
}

pub fn projected_metrics(
    ds: &FeatureDataset,
    domains: &[u16],
    kind: DivergenceKind,
    opts: ProjectionOptions,
    cfg: &DensityConfig,
) -> Result<ProjectedMetrics> {
    if opts.n_directions == 0 {
        return Err(Error::invalid("n_directions must be at least 1"));
    }
    let domains = preflight(ds, domains, kind, cfg, MetricSelection::BOTH)?;
    let cells = CellIndex::new(ds);
    let eval = |dir: &Direction| -> Result<(f64, f64)> {
        let values = ds.project(dir.coefficients());
        let (v, i) = metrics_for_values(&values, &cells, &domains, kind, cfg, MetricSelection::BOTH)?;
        Ok((v.unwrap_or(0.0), i.unwrap_or(0.0)))
    };

    let candidates = sample_directions(ds.dim(), opts.n_directions, opts.seed);
    let mut directions: Vec<DirectionMetrics> = candidates
        .into_par_iter()
        .map(|(direction, origin)| {
            let (variation, informativeness) = eval(&direction)?;
            Ok(DirectionMetrics {
                direction,
                origin,
                variation,
                informativeness,
            })
        })
        .collect::<Result<_>>()?;

    if opts.refine_steps > 0 {
        let start = argmax(&directions, |m| m.variation);
        let mut best = directions[start].clone();
        let d = ds.dim();
        let mut eta = 0.1;
        let mut since_improvement = 0usize;
        for step in 0..opts.refine_steps {
            let coord = (step / 2) % d;
            let sign = if step % 2 == 0 { 1.0 } else { -1.0 };
            let mut v = best.direction.coefficients().to_vec();
            v[coord] += sign * eta;
            let Ok(dir) = Direction::normalized(v) else { continue };
            let (variation, informativeness) = eval(&dir)?;
            if variation > best.variation {
                best = DirectionMetrics {
                    direction: dir,
                    origin: DirectionOrigin::Refined,
                    variation,
                    informativeness,
                };
                directions.push(best.clone());
                since_improvement = 0;
            } else {
                since_improvement += 1;
                if since_improvement >= 2 * d {
                    eta *= 0.5;
                    since_improvement = 0;
                }
            }
        }
    }

    let vi = argmax(&directions, |m| m.variation);
    let ii = argmax(&directions, |m| -m.informativeness);
    Ok(ProjectedMetrics {
        v_sup: directions[vi].variation,
        v_sup_direction: directions[vi].direction.clone(),
        i_inf: directions[ii].informativeness,
        i_inf_direction: directions[ii].direction.clone(),
        n_directions: opts.n_directions,
        seed: opts.seed,
        divergence: kind,
        directions,
    })
}

/// First index of the maximum.
fn argmax<T>(items: &[T], key: impl Fn(&T) -> f64) -> usize {
    let mut best = 0;
    for (i, item) in items.iter().enumerate().skip(1) {
        if key(item) > key(&items[best]) {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::Normal;

    /// Two features over three domains: feature 0 is domain-invariant noise,
    /// feature 1 shifts its mean by domain and separates labels.
    fn toy(n_per_cell: usize, seed: u64) -> FeatureDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let (mut f, mut l, mut e) = (Vec::new(), Vec::new(), Vec::new());
        for dom in 0..3u16 {
            for y in 1..=2u16 {
                for _ in 0..n_per_cell {
                    f.push(noise.sample(&mut rng) as f32);
                    f.push((noise.sample(&mut rng) + f64::from(dom) * 0.5 + f64::from(y) * 2.0) as f32);
                    l.push(y);
                    e.push(dom);
                }
            }
        }
        FeatureDataset::new(2, 2, f, l, e).unwrap()
    }

    fn cfg() -> DensityConfig {
        DensityConfig::default()
    }

    #[test]
    fn single_domain_has_zero_variation() {
        let ds = toy(200, 1);
        let v = feature_variation(&ds, &FeatureRef::Index(1), &[0], DivergenceKind::TotalVariation, &cfg()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn empty_cell_is_reported() {
        let ds = FeatureDataset::new(1, 2, vec![0.0, 1.0, 2.0, 3.0, 4.0], vec![1, 1, 2, 2, 1], vec![0, 0, 0, 0, 1]).unwrap();
        let err = feature_variation(&ds, &FeatureRef::Index(0), &[0, 1], DivergenceKind::TotalVariation, &cfg()).unwrap_err();
        assert!(matches!(err, Error::EmptyCell { domain: 1, label: 1, count: 1 }), "{err}");
    }

    #[test]
    fn domain_set_monotonicity_is_exact() {
        let ds = toy(300, 2);
        let kind = DivergenceKind::TotalVariation;
        for j in 0..2 {
            let f = FeatureRef::Index(j);
            let v01 = feature_variation(&ds, &f, &[0, 1], kind, &cfg()).unwrap();
            let v012 = feature_variation(&ds, &f, &[0, 1, 2], kind, &cfg()).unwrap();
            assert!(v01 <= v012 + 1e-9);
        }
    }

    #[test]
    fn sign_flip_invariance() {
        let ds = toy(300, 3);
        let pos = FeatureRef::Projected(Direction::new(vec![0.0, 1.0]).unwrap());
        let neg = FeatureRef::Projected(Direction::new(vec![0.0, -1.0]).unwrap());
        for kind in [DivergenceKind::TotalVariation, DivergenceKind::symmetric_kl()] {
            let a = feature_variation(&ds, &pos, &[0, 1, 2], kind, &cfg()).unwrap();
            let b = feature_variation(&ds, &neg, &[0, 1, 2], kind, &cfg()).unwrap();
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            let a = feature_informativeness(&ds, &pos, &[0, 1, 2], kind, &cfg()).unwrap();
            let b = feature_informativeness(&ds, &neg, &[0, 1, 2], kind, &cfg()).unwrap();
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn noise_feature_is_uninformative_and_shifted_one_informative() {
        let ds = toy(2000, 4);
        let kind = DivergenceKind::TotalVariation;
        let i0 = feature_informativeness(&ds, &FeatureRef::Index(0), &[0, 1, 2], kind, &cfg()).unwrap();
        let i1 = feature_informativeness(&ds, &FeatureRef::Index(1), &[0, 1, 2], kind, &cfg()).unwrap();
        assert!(i0 < 0.08, "{i0}");
        // class gap of 2 sigma: TV = 2Φ(1) − 1
        assert!((i1 - 0.6827).abs() < 0.04, "{i1}");
    }

    #[test]
    fn identical_class_conditionals_give_zero_informativeness() {
        let mut f = Vec::new();
        let mut l = Vec::new();
        let mut e = Vec::new();
        for y in 1..=2u16 {
            for i in 0..50 {
                f.push(i as f32 * 0.1);
                l.push(y);
                e.push(0);
            }
        }
        let ds = FeatureDataset::new(1, 2, f, l, e).unwrap();
        let i = feature_informativeness(&ds, &FeatureRef::Index(0), &[0], DivergenceKind::TotalVariation, &cfg()).unwrap();
        assert!(i.abs() < 1e-12);
    }

    #[test]
    fn identical_copies_share_model_variation() {
        let base = toy(300, 5);
        let col = base.column(1);
        let f: Vec<f32> = col.iter().flat_map(|&v| [v as f32; 3]).collect();
        let ds = FeatureDataset::new(3, 2, f, base.labels().to_vec(), base.domains().to_vec()).unwrap();
        let kind = DivergenceKind::TotalVariation;
        let mv = model_variation(&ds, &[0, 1, 2], kind, &cfg()).unwrap();
        let v = feature_variation(&ds, &FeatureRef::Index(0), &[0, 1, 2], kind, &cfg()).unwrap();
        assert!((mv - v).abs() < 1e-12);
    }

    #[test]
    fn projected_dominates_axes_and_is_deterministic() {
        let ds = toy(300, 6);
        let kind = DivergenceKind::TotalVariation;
        let opts = ProjectionOptions {
            n_directions: 16,
            seed: 7,
            refine_steps: 0,
        };
        let pm = projected_metrics(&ds, &[0, 1, 2], kind, opts, &cfg()).unwrap();
        let axes = per_feature_metrics(&ds, &[0, 1, 2], "all", kind, &cfg(), MetricSelection::VARIATION).unwrap();
        let axis_max = axes.iter().map(|m| m.variation.unwrap()).fold(0.0, f64::max);
        assert!(pm.v_sup >= axis_max);
        assert_eq!(pm.directions.len(), 18);
        let again = projected_metrics(&ds, &[0, 1, 2], kind, opts, &cfg()).unwrap();
        assert_eq!(pm, again);
        assert!(projected_metrics(&ds, &[0, 1], kind, ProjectionOptions { n_directions: 0, ..opts }, &cfg()).is_err());
    }

    #[test]
    fn one_dimensional_projection_equals_feature_variation() {
        let base = toy(300, 8);
        let ds = FeatureDataset::new(1, 2, base.column(1).iter().map(|&v| v as f32).collect(), base.labels().to_vec(), base.domains().to_vec()).unwrap();
        let kind = DivergenceKind::TotalVariation;
        let pm = projected_metrics(&ds, &[0, 1, 2], kind, ProjectionOptions { n_directions: 4, seed: 1, refine_steps: 0 }, &cfg()).unwrap();
        let v = feature_variation(&ds, &FeatureRef::Index(0), &[0, 1, 2], kind, &cfg()).unwrap();
        assert!((pm.v_sup - v).abs() < 1e-9);
    }

    #[test]
    fn refinement_never_lowers_v_sup() {
        let ds = toy(200, 9);
        let kind = DivergenceKind::TotalVariation;
        let base = ProjectionOptions { n_directions: 4, seed: 3, refine_steps: 0 };
        let plain = projected_metrics(&ds, &[0, 1, 2], kind, base, &cfg()).unwrap();
        let refined = projected_metrics(&ds, &[0, 1, 2], kind, ProjectionOptions { refine_steps: 20, ..base }, &cfg()).unwrap();
        assert!(refined.v_sup >= plain.v_sup);
    }

    #[test]
    fn report_csv_layout() {
        let rows = vec![FeatureMetrics {
            feature: FeatureRef::Index(3),
            variation: Some(0.25),
            informativeness: None,
            divergence: DivergenceKind::TotalVariation,
            domain_set: "avail".into(),
        }];
        assert_eq!(
            report_csv(&rows),
            "feature_index,variation,informativeness,divergence,domain_set\n3,0.25,,tv,avail\n"
        );
    }

    #[test]
    fn direction_validation() {
        assert!(Direction::new(vec![1.0, 1.0]).is_err());
        let d = Direction::normalized(vec![3.0, 4.0]).unwrap();
        assert_eq!(d.coefficients(), &[0.6, 0.8]);
        assert!(Direction::normalized(vec![0.0, 0.0]).is_err());
    }
}
