//! Variation-aware model selection: rank candidates by `Acc_f − r0·V_f`.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::dataio::{load_dataset, ModelManifest};
use crate::density::DensityConfig;
use crate::divergence::DivergenceKind;
use crate::error::{Error, Result};
use crate::metrics::model_variation;

/// Slack applied to the accuracy window boundary so that values such as
/// `0.9 − 0.1` land inside it.
const WINDOW_SLACK: f64 = 1e-12;
const MIN_VARIATION_SPREAD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ModelRecord {
    pub model_id: String,
    pub val_accuracy: f64,
    /// Mean per-feature variation on the available domains.
    pub variation: f64,
    pub score: Option<f64>,
}

impl ModelRecord {
    pub fn new(model_id: impl Into<String>, val_accuracy: f64, variation: f64) -> Result<Self> {
        let model_id = model_id.into();
        if !(val_accuracy.is_finite() && (0.0..=1.0).contains(&val_accuracy)) {
            return Err(Error::invalid(format!("model {model_id}: accuracy {val_accuracy} outside [0, 1]")));
        }
        if !(variation.is_finite() && variation >= 0.0) {
            return Err(Error::invalid(format!("model {model_id}: variation {variation} must be >= 0")));
        }
        Ok(Self {
            model_id,
            val_accuracy,
            variation,
            score: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum R0Mode {
    Auto,
    Fixed(f64),
}

impl std::str::FromStr for R0Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("auto") {
            return Ok(R0Mode::Auto);
        }
        match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => Ok(R0Mode::Fixed(v)),
            _ => Err(Error::invalid(format!("r0 {s:?}: expected `auto` or a number >= 0"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    pub r0: R0Mode,
    pub acc_window: f64,
    pub divergence: DivergenceKind,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            r0: R0Mode::Auto,
            acc_window: 0.1,
            divergence: DivergenceKind::TotalVariation,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.acc_window > 0.0 && self.acc_window <= 1.0) {
            return Err(Error::invalid(format!("acc_window {} outside (0, 1]", self.acc_window)));
        }
        if let R0Mode::Fixed(r) = self.r0 {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::invalid(format!("r0 {r} must be >= 0")));
            }
        }
        self.divergence.validate()
    }
}

/// Indices of models with accuracy within `acc_window` of the best.
pub fn accuracy_window(accuracies: &[f64], acc_window: f64) -> Vec<usize> {
    let Some(best) = accuracies.iter().copied().reduce(f64::max) else {
        return Vec::new();
    };
    accuracies
        .iter()
        .enumerate()
        .filter(|(_, &a)| a >= best - acc_window - WINDOW_SLACK)
        .map(|(i, _)| i)
        .collect()
}

/// Population standard deviation; values are sorted first so the result
/// does not depend on input order.
fn population_std(xs: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = xs.collect();
    v.sort_by(f64::total_cmp);
    if v.first() == v.last() {
        return 0.0;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}

/// `Std(Acc) / Std(V)` over the near-top window, population std devs.
pub fn estimate_r0(models: &[ModelRecord], acc_window: f64) -> Result<f64> {
    let accs: Vec<f64> = models.iter().map(|m| m.val_accuracy).collect();
    let window = accuracy_window(&accs, acc_window);
    if window.len() < 2 {
        return Err(Error::invalid(format!(
            "window too narrow: {} model(s) within {acc_window} of the best accuracy, need 2",
            window.len()
        )));
    }
    let std_acc = population_std(window.iter().map(|&i| models[i].val_accuracy));
    let std_var = population_std(window.iter().map(|&i| models[i].variation));
    if std_var < MIN_VARIATION_SPREAD {
        log::warn!("degenerate variation spread in the accuracy window; r0 = 0 (pure accuracy selection)");
        return Ok(0.0);
    }
    Ok(std_acc / std_var)
}

fn rank_order(a: &ModelRecord, b: &ModelRecord) -> Ordering {
    let sa = a.score.unwrap_or(f64::NEG_INFINITY);
    let sb = b.score.unwrap_or(f64::NEG_INFINITY);
    sb.total_cmp(&sa)
        .then_with(|| b.val_accuracy.total_cmp(&a.val_accuracy))
        .then_with(|| a.model_id.cmp(&b.model_id))
}

/// Scored models in rank order, plus any models whose variation was never computed.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub r0_used: f64,
    pub ranked: Vec<ModelRecord>,
    /// `(model_id, val_accuracy)` of models skipped because they could not win.
    pub unscored: Vec<(String, f64)>,
}

impl Ranking {
    pub fn best(&self) -> Option<&ModelRecord> {
        self.ranked.first()
    }

    /// Ranking CSV: `model_id,val_accuracy,variation,r0_used,score,rank`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model_id,val_accuracy,variation,r0_used,score,rank\n");
        for (i, m) in self.ranked.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                m.model_id,
                m.val_accuracy,
                m.variation,
                self.r0_used,
                m.score.unwrap_or(f64::NAN),
                i + 1
            );
        }
        for (id, acc) in &self.unscored {
            let _ = writeln!(out, "{id},{acc},,{},,", self.r0_used);
        }
        out
    }
}

fn resolve_r0(models: &[ModelRecord], cfg: &SelectionConfig) -> Result<f64> {
    match cfg.r0 {
        R0Mode::Fixed(r) => Ok(r),
        R0Mode::Auto => estimate_r0(models, cfg.acc_window),
    }
}

/// Scores every model and sorts by score, then accuracy, then id.
pub fn select(models: &[ModelRecord], cfg: &SelectionConfig) -> Result<Ranking> {
    cfg.validate()?;
    if models.is_empty() {
        return Err(Error::invalid("no candidate models"));
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = models.iter().find(|m| !seen.insert(m.model_id.as_str())) {
        return Err(Error::invalid(format!("duplicate model_id {:?}", dup.model_id)));
    }
    let r0 = resolve_r0(models, cfg)?;
    let mut ranked: Vec<ModelRecord> = models
        .iter()
        .map(|m| ModelRecord {
            score: Some(m.val_accuracy - r0 * m.variation),
            ..m.clone()
        })
        .collect();
    ranked.sort_by(rank_order);
    Ok(Ranking {
        r0_used: r0,
        ranked,
        unscored: Vec::new(),
    })
}

/// Options for [`select_from_manifest`].
#[derive(Debug, Clone, Default)]
pub struct PipelineOptions {
    pub score_all: bool,
    /// Models to score even when outside the accuracy window.
    pub include: Vec<String>,
    pub density: DensityConfig,
}

/// Runs selection over a manifest, loading each model's `avail` feature file
/// and computing its mean variation over the domains that file contains.
///
/// Without `score_all`, variation is computed for the accuracy window, the
/// explicitly included models, and any other model whose accuracy exceeds
/// the best score found so far; the rest cannot rank first because
/// `score ≤ accuracy` whenever `r0 ≥ 0`.
pub fn select_from_manifest(manifest: &ModelManifest, cfg: &SelectionConfig, opts: &PipelineOptions) -> Result<Ranking> {
    cfg.validate()?;
    if manifest.entries.is_empty() {
        return Err(Error::invalid("manifest lists no models"));
    }
    for id in &opts.include {
        if !manifest.entries.iter().any(|e| &e.model_id == id) {
            return Err(Error::invalid(format!("--include names unknown model {id:?}")));
        }
    }
    let variation_of = |idx: usize| -> Result<f64> {
        let entry = &manifest.entries[idx];
        let ds = load_dataset(&entry.feature_file.avail)?;
        let v = model_variation(&ds, ds.domain_ids(), cfg.divergence, &opts.density)?;
        log::info!("model {}: V_f = {v}", entry.model_id);
        Ok(v)
    };
    let record = |idx: usize, v: f64| ModelRecord::new(manifest.entries[idx].model_id.clone(), manifest.entries[idx].val_accuracy, v);

    let accs: Vec<f64> = manifest.entries.iter().map(|e| e.val_accuracy).collect();
    let mut wanted: Vec<usize> = if opts.score_all {
        (0..accs.len()).collect()
    } else {
        let mut w = accuracy_window(&accs, cfg.acc_window);
        for (i, e) in manifest.entries.iter().enumerate() {
            if opts.include.contains(&e.model_id) && !w.contains(&i) {
                w.push(i);
            }
        }
        w.sort_unstable();
        w
    };

    let mut scored: Vec<Option<ModelRecord>> = vec![None; accs.len()];
    for &i in &wanted {
        scored[i] = Some(record(i, variation_of(i)?)?);
    }
    let window: Vec<ModelRecord> = accuracy_window(&accs, cfg.acc_window)
        .into_iter()
        .filter_map(|i| scored[i].clone())
        .collect();
    let r0 = match cfg.r0 {
        R0Mode::Fixed(r) => r,
        R0Mode::Auto => estimate_r0(&window, cfg.acc_window)?,
    };
    let score = |m: &ModelRecord| m.val_accuracy - r0 * m.variation;

    let mut best = scored.iter().flatten().map(score).fold(f64::NEG_INFINITY, f64::max);
    let mut rest: Vec<usize> = (0..accs.len()).filter(|i| scored[*i].is_none()).collect();
    rest.sort_by(|&a, &b| accs[b].total_cmp(&accs[a]).then(a.cmp(&b)));
    for i in rest {
        if accs[i] >= best {
            let rec = record(i, variation_of(i)?)?;
            best = best.max(score(&rec));
            scored[i] = Some(rec);
            wanted.push(i);
        }
    }

    let mut ranked: Vec<ModelRecord> = scored
        .iter()
        .flatten()
        .map(|m| ModelRecord {
            score: Some(score(m)),
            ..m.clone()
        })
        .collect();
    ranked.sort_by(rank_order);
    let mut unscored: Vec<(String, f64)> = manifest
        .entries
        .iter()
        .zip(&scored)
        .filter(|(_, s)| s.is_none())
        .map(|(e, _)| (e.model_id.clone(), e.val_accuracy))
        .collect();
    unscored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(Ranking {
        r0_used: r0,
        ranked,
        unscored,
    })
}
