//! Synthetic OOD problems with closed-form answers.
//!
//! * Colored MNIST at feature level: a domain-invariant shape score and a
//!   color score whose correlation with the label depends on the domain `e`.
//! * The two-feature Gaussian family `z ~ N(r·y, 1)`, `η ~ N(a_e·y, 1)` over
//!   four domains, whose linear projections have closed-form variation and
//!   optimal-classifier losses.
//! * Marginal traps: two domains whose per-coordinate conditional laws agree
//!   (strict variant) or nearly agree while the joint law differs.
//!
//! Every generator is seeded; domain blocks draw from separate ChaCha streams
//! and are concatenated in domain order, so output is independent of thread
//! count.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataio::{atomic_write, write_dataset, FeatureDataset};
use crate::density::DensityConfig;
use crate::divergence::{gaussian_tv, DivergenceKind};
use crate::error::{Error, Result};
use crate::metrics::model_variation;
use crate::normal;
use crate::selection::ModelRecord;

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64 + 1);
    rng
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Per-block rows: features (row-major), labels, domain id.
struct Block {
    features: Vec<f32>,
    labels: Vec<u16>,
    domain: u16,
}

fn assemble(d: usize, k: u32, blocks: Vec<Block>) -> Result<FeatureDataset> {
    let n: usize = blocks.iter().map(|b| b.labels.len()).sum();
    let mut features = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    let mut domains = Vec::with_capacity(n);
    for b in blocks {
        domains.extend(std::iter::repeat_n(b.domain, b.labels.len()));
        features.extend(b.features);
        labels.extend(b.labels);
    }
    FeatureDataset::new(d, k, features, labels, domains)
}

/// Binary label for draw `i`: exact alternation when stratified, a fair coin otherwise.
fn binary_label(rng: &mut ChaCha8Rng, i: usize, exact_balance: bool) -> bool {
    if exact_balance {
        i % 2 == 1
    } else {
        rng.gen::<bool>()
    }
}

fn contains_close(es: &[f64], e: f64) -> bool {
    es.iter().any(|x| (x - e).abs() < 1e-9)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoredMnistSpec {
    pub e_avail: Vec<f64>,
    pub e_all: Vec<f64>,
    pub n_per_domain: usize,
    pub flip_prob: f64,
    pub shape_mean: f64,
    pub color_noise: f64,
    pub seed: u64,
    #[serde(default)]
    pub exact_balance: bool,
}

impl Default for ColoredMnistSpec {
    fn default() -> Self {
        Self {
            e_avail: vec![0.1, 0.2],
            e_all: (1..=9).map(|i| f64::from(i) / 10.0).collect(),
            n_per_domain: 50_000,
            flip_prob: 0.25,
            shape_mean: 1.0,
            color_noise: 0.05,
            seed: 0,
            exact_balance: false,
        }
    }
}

impl ColoredMnistSpec {
    pub fn validate(&self) -> Result<()> {
        if self.e_all.is_empty() || self.e_avail.is_empty() {
            return Err(Error::invalid("colored-mnist needs nonempty e_avail and e_all"));
        }
        if let Some(e) = self.e_all.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(Error::invalid(format!("domain parameter e = {e} outside [0, 1]")));
        }
        if let Some(e) = self.e_avail.iter().find(|&&e| !contains_close(&self.e_all, e)) {
            return Err(Error::invalid(format!("available domain e = {e} is not in e_all")));
        }
        if self.e_all.len() > usize::from(u16::MAX) {
            return Err(Error::invalid("too many domains"));
        }
        if self.n_per_domain == 0 {
            return Err(Error::invalid("n_per_domain must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.flip_prob) {
            return Err(Error::invalid(format!("flip_prob {} outside [0, 1]", self.flip_prob)));
        }
        if !(self.shape_mean > 0.0 && self.color_noise > 0.0) {
            return Err(Error::invalid("shape_mean and color_noise must be positive"));
        }
        Ok(())
    }

    /// Domain ids (indices into `e_all`) of the available domains.
    pub fn avail_ids(&self) -> Vec<u16> {
        self.e_all
            .iter()
            .enumerate()
            .filter(|(_, &e)| contains_close(&self.e_avail, e))
            .map(|(i, _)| i as u16)
            .collect()
    }

    pub fn all_ids(&self) -> Vec<u16> {
        (0..self.e_all.len() as u16).collect()
    }
}

/// One Colored MNIST draw: `(clean label ŷ, label Y, shape score, color score)`.
fn colored_mnist_draw(spec: &ColoredMnistSpec, e: f64, rng: &mut ChaCha8Rng, i: usize) -> (bool, bool, f64, f64) {
    let (y_hat, y) = if spec.exact_balance {
        let y = binary_label(rng, i, true);
        let keep = rng.gen::<f64>() >= spec.flip_prob;
        (if keep { y } else { !y }, y)
    } else {
        let y_hat = rng.gen::<bool>();
        let keep = rng.gen::<f64>() >= spec.flip_prob;
        (y_hat, if keep { y_hat } else { !y_hat })
    };
    let sign = |b: bool| if b { 1.0 } else { -1.0 };
    let shape = spec.shape_mean * sign(y_hat) + gauss(rng);
    let p_red = e + (1.0 - 2.0 * e) * if y { 1.0 } else { 0.0 };
    let red = rng.gen::<f64>() < p_red;
    let color = sign(red) + spec.color_noise * gauss(rng);
    (y_hat, y, shape, color)
}

/// Features `(shape, color)`, labels `Y + 1`, domain ids indexing `e_all`.
pub fn gen_colored_mnist(spec: &ColoredMnistSpec) -> Result<FeatureDataset> {
    spec.validate()?;
    let blocks = spec
        .e_all
        .par_iter()
        .enumerate()
        .map(|(b, &e)| {
            let mut rng = block_rng(spec.seed, b);
            let mut features = Vec::with_capacity(2 * spec.n_per_domain);
            let mut labels = Vec::with_capacity(spec.n_per_domain);
            for i in 0..spec.n_per_domain {
                let (_, y, shape, color) = colored_mnist_draw(spec, e, &mut rng, i);
                features.push(shape as f32);
                features.push(color as f32);
                labels.push(if y { 2 } else { 1 });
            }
            Block {
                features,
                labels,
                domain: b as u16,
            }
        })
        .collect();
    assemble(2, 2, blocks)
}

/// TV between the color-score laws of domains `e1`, `e2` given either label:
/// `|e1 − e2| · TV(N(1, σ²), N(−1, σ²))`, which tends to `|e1 − e2|` as σ → 0.
pub fn colored_mnist_color_tv(e1: f64, e2: f64, color_noise: f64) -> Result<f64> {
    Ok((e1 - e2).abs() * gaussian_tv(-1.0, 1.0, color_noise)?)
}

fn max_gap(es: &[f64]) -> f64 {
    let lo = es.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = es.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

/// Slope of the linear expansion function `max|e−e'| over E_all / max|e−e'| over E_avail`.
pub fn colored_mnist_expansion_slope(e_avail: &[f64], e_all: &[f64]) -> Result<f64> {
    let gap = max_gap(e_avail);
    if gap <= 0.0 {
        return Err(Error::invalid("expansion slope needs two distinct available domains"));
    }
    Ok(max_gap(e_all) / gap)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianLemmaSpec {
    pub t: f64,
    pub k: f64,
    pub n_per_domain: usize,
    pub seed: u64,
    #[serde(default)]
    pub exact_balance: bool,
}

impl GaussianLemmaSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(Error::invalid(format!("t = {} must be > 0", self.t)));
        }
        if !(self.k.is_finite() && self.k > 1.0) {
            return Err(Error::invalid(format!("k = {} must be > 1", self.k)));
        }
        if self.n_per_domain == 0 {
            return Err(Error::invalid("n_per_domain must be >= 1"));
        }
        Ok(())
    }

    /// Mean shifts `a_1..a_4` of the domain-dependent coordinate.
    pub fn shifts(&self) -> [f64; 4] {
        let near = (self.t / 2.0).sqrt();
        let far = (self.k * self.t / 2.0).sqrt();
        [-near, near, -far, far]
    }

    /// Mean of the invariant coordinate for `y = +1`.
    pub fn r(&self) -> f64 {
        self.t.sqrt()
    }

    pub const AVAIL: [u16; 2] = [1, 2];
    pub const ALL: [u16; 4] = [1, 2, 3, 4];

    /// Symmetric-KL variation of `wᵀx` over the available domains: `t·ŵ2²`.
    pub fn variation_avail(&self, w: [f64; 2]) -> f64 {
        let n2 = w[0] * w[0] + w[1] * w[1];
        self.t * w[1] * w[1] / n2
    }

    /// Symmetric-KL variation over all four domains: `k·t·ŵ2²`.
    pub fn variation_all(&self, w: [f64; 2]) -> f64 {
        self.k * self.variation_avail(w)
    }
}

/// Features `(z, η)`, labels 1 (`y = −1`) and 2 (`y = +1`), domains 1..=4.
pub fn gen_gaussian_lemma(spec: &GaussianLemmaSpec) -> Result<FeatureDataset> {
    spec.validate()?;
    let shifts = spec.shifts();
    let r = spec.r();
    let blocks = (0..4)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(spec.seed, b);
            let mut features = Vec::with_capacity(2 * spec.n_per_domain);
            let mut labels = Vec::with_capacity(spec.n_per_domain);
            for i in 0..spec.n_per_domain {
                let pos = binary_label(&mut rng, i, spec.exact_balance);
                let y = if pos { 1.0 } else { -1.0 };
                features.push((r * y + gauss(&mut rng)) as f32);
                features.push((shifts[b] * y + gauss(&mut rng)) as f32);
                labels.push(if pos { 2 } else { 1 });
            }
            Block {
                features,
                labels,
                domain: b as u16 + 1,
            }
        })
        .collect();
    assemble(2, 2, blocks)
}

/// Closed-form behaviour of the classifier `sign(wᵀx)` on the Gaussian family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaClassifierEval {
    /// Worst-domain 0-1 loss over the available domains.
    pub loss_avail: f64,
    /// Worst-domain 0-1 loss over all domains.
    pub loss_all: f64,
    pub err: f64,
    /// Projected symmetric-KL variation `t·ŵ2²` on the available domains.
    pub v_sup_symkl: f64,
    /// Normal-density lower bound over the loss-gap interval.
    pub density_floor: f64,
    /// `C·(√k − 1)·√(t/2) / (k·t)`
    pub c1: f64,
    /// `C1 · s(V)` with `s(x) = k·x`.
    pub c1_bound: f64,
}

pub fn eval_lemma_classifier(spec: &GaussianLemmaSpec, w: [f64; 2], normalize: bool) -> Result<LemmaClassifierEval> {
    spec.validate()?;
    let norm = (w[0] * w[0] + w[1] * w[1]).sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::invalid("classifier weights must be nonzero"));
    }
    let w = if normalize { [w[0] / norm, w[1] / norm] } else { w };
    if w[0] <= 0.0 {
        return Err(Error::invalid(format!("first weight {} must be > 0", w[0])));
    }
    let norm = (w[0] * w[0] + w[1] * w[1]).sqrt();
    let (w1, w2) = (w[0] / norm, (w[1] / norm).abs());
    let (t, k) = (spec.t, spec.k);
    let hi = w1 * spec.r() - w2 * (t / 2.0).sqrt();
    let lo = w1 * spec.r() - w2 * (k * t / 2.0).sqrt();
    let loss_avail = normal::sf(hi);
    let loss_all = normal::sf(lo);
    let density_floor = normal::pdf(lo).min(normal::pdf(hi));
    let c1 = density_floor * (k.sqrt() - 1.0) * (t / 2.0).sqrt() / (k * t);
    let v = t * w2 * w2;
    Ok(LemmaClassifierEval {
        loss_avail,
        loss_all,
        err: loss_all - loss_avail,
        v_sup_symkl: v,
        density_floor,
        c1,
        c1_bound: c1 * k * v,
    })
}

/// Empirical worst-domain 0-1 error of `sign(wᵀx)` over the listed domains.
pub fn empirical_worst_error(ds: &FeatureDataset, w: &[f64], domains: &[u16]) -> f64 {
    let scores = ds.project(w);
    domains
        .iter()
        .map(|&e| {
            let (mut wrong, mut total) = (0usize, 0usize);
            for ((&s, &l), &d) in scores.iter().zip(ds.labels()).zip(ds.domains()) {
                if d == e {
                    total += 1;
                    // label 2 is the positive class
                    if (s > 0.0) != (l == 2) {
                        wrong += 1;
                    }
                }
            }
            if total == 0 {
                0.0
            } else {
                wrong as f64 / total as f64
            }
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrapVariant {
    /// Means `y(4, 4)` in domain 1 and `y(4, −4)` in domain 2, identity covariance.
    Paper,
    /// Zero means, unit variances, correlation `+ρ·y` in domain 1 and `−ρ·y` in domain 2.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapSpec {
    pub variant: TrapVariant,
    pub correlation: f64,
    pub n_per_domain: usize,
    pub seed: u64,
    #[serde(default)]
    pub exact_balance: bool,
}

impl TrapSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.correlation > 0.0 && self.correlation < 1.0) {
            return Err(Error::invalid(format!("correlation {} outside (0, 1)", self.correlation)));
        }
        if self.n_per_domain == 0 {
            return Err(Error::invalid("n_per_domain must be >= 1"));
        }
        Ok(())
    }

    pub const DOMAINS: [u16; 2] = [1, 2];
}

/// Two-feature, two-domain trap; labels 1 (`y = −1`) and 2 (`y = +1`), domains 1 and 2.
pub fn gen_trap(spec: &TrapSpec) -> Result<FeatureDataset> {
    spec.validate()?;
    let blocks = (0..2)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(spec.seed, b);
            let mut features = Vec::with_capacity(2 * spec.n_per_domain);
            let mut labels = Vec::with_capacity(spec.n_per_domain);
            let domain_sign = if b == 0 { 1.0 } else { -1.0 };
            for i in 0..spec.n_per_domain {
                let pos = binary_label(&mut rng, i, spec.exact_balance);
                let y = if pos { 1.0 } else { -1.0 };
                let (z1, z2) = (gauss(&mut rng), gauss(&mut rng));
                let (h1, h2) = match spec.variant {
                    TrapVariant::Paper => (4.0 * y + z1, 4.0 * y * domain_sign + z2),
                    TrapVariant::Strict => {
                        let rho = spec.correlation * y * domain_sign;
                        (z1, rho * z1 + (1.0 - rho * rho).sqrt() * z2)
                    }
                };
                features.push(h1 as f32);
                features.push(h2 as f32);
                labels.push(if pos { 2 } else { 1 });
            }
            Block {
                features,
                labels,
                domain: b as u16 + 1,
            }
        })
        .collect();
    assemble(2, 2, blocks)
}

/// TV between `N(0, v1)` and `N(0, v2)` by Simpson quadrature on `[−L, L]`.
pub fn zero_mean_normal_tv(v1: f64, v2: f64) -> f64 {
    let (s1, s2) = (v1.sqrt(), v2.sqrt());
    let half = 12.0 * s1.max(s2);
    let n = 200_000usize;
    let h = 2.0 * half / n as f64;
    let f = |x: f64| (normal::pdf_scaled(x, 0.0, s1) - normal::pdf_scaled(x, 0.0, s2)).abs();
    let mut s = f(-half) + f(half);
    for i in 1..n {
        s += f(-half + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    0.5 * s * h / 3.0
}

/// Colored MNIST model zoo: each model reads the single feature
/// `cos θ · shape + sin θ · color` and predicts `Y = 1` when it is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZooSpec {
    pub data: ColoredMnistSpec,
    pub n_models: usize,
    /// Draws per domain for the validation and OOD accuracy estimates.
    pub n_eval_per_domain: usize,
}

impl Default for ZooSpec {
    fn default() -> Self {
        Self {
            data: ColoredMnistSpec {
                shape_mean: 3.0,
                seed: 11,
                ..ColoredMnistSpec::default()
            },
            n_models: 8,
            n_eval_per_domain: 50_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZooModel {
    pub record: ModelRecord,
    /// Mixing angle in radians: 0 reads only shape, π/2 only color.
    pub mix_angle: f64,
    /// Worst-domain accuracy over the domains outside `e_avail`.
    pub ood_accuracy: f64,
}

impl ZooModel {
    pub fn invariant_dominant(&self) -> bool {
        self.mix_angle.cos() > self.mix_angle.sin()
    }
}

fn zoo_accuracy(data: &ColoredMnistSpec, e: f64, theta: f64, n: usize, seed_block: usize) -> f64 {
    let mut rng = block_rng(data.seed ^ 0x5eed_fa11, seed_block);
    let (c, s) = (theta.cos(), theta.sin());
    let correct = (0..n)
        .filter(|&i| {
            let (_, y, shape, color) = colored_mnist_draw(data, e, &mut rng, i);
            ((c * shape + s * color) > 0.0) == y
        })
        .count();
    correct as f64 / n as f64
}

/// Builds the zoo: validation accuracy pooled over `e_avail`, OOD accuracy as
/// the worst domain of `e_all \ e_avail`, and mean TV variation on the
/// available domains from the generated training features.
pub fn colored_mnist_zoo(spec: &ZooSpec, density: &DensityConfig) -> Result<Vec<ZooModel>> {
    spec.data.validate()?;
    if spec.n_models < 2 || spec.n_eval_per_domain == 0 {
        return Err(Error::invalid("zoo needs >= 2 models and >= 1 evaluation draw per domain"));
    }
    let train = gen_colored_mnist(&ColoredMnistSpec {
        e_all: spec.data.e_avail.clone(),
        ..spec.data.clone()
    })?;
    let avail_ids: Vec<u16> = train.domain_ids().to_vec();
    let test_domains: Vec<(usize, f64)> = spec
        .data
        .e_all
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, e)| !contains_close(&spec.data.e_avail, *e))
        .collect();
    if test_domains.is_empty() {
        return Err(Error::invalid("zoo needs at least one domain outside e_avail"));
    }

    (0..spec.n_models)
        .map(|m| {
            let theta = FRAC_PI_2 * m as f64 / (spec.n_models - 1) as f64;
            let (c, s) = (theta.cos(), theta.sin());
            let feats: Vec<f32> = train
                .features()
                .chunks_exact(2)
                .map(|row| (c * f64::from(row[0]) + s * f64::from(row[1])) as f32)
                .collect();
            let single = FeatureDataset::new(1, 2, feats, train.labels().to_vec(), train.domains().to_vec())?;
            let variation = model_variation(&single, &avail_ids, DivergenceKind::TotalVariation, density)?;

            let n = spec.n_eval_per_domain;
            let val = spec
                .data
                .e_avail
                .iter()
                .enumerate()
                .map(|(i, &e)| zoo_accuracy(&spec.data, e, theta, n, 1000 + i))
                .sum::<f64>()
                / spec.data.e_avail.len() as f64;
            let ood = test_domains
                .iter()
                .map(|&(i, e)| zoo_accuracy(&spec.data, e, theta, n, 2000 + i))
                .fold(f64::INFINITY, f64::min);
            Ok(ZooModel {
                record: ModelRecord::new(format!("cmnist_theta{m:02}"), val, variation)?,
                mix_angle: theta,
                ood_accuracy: ood,
            })
        })
        .collect()
}

/// Sample Pearson correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    cov / (vx * vy).sqrt()
}

/// Sidecar written next to each generated OODF file.
#[derive(Debug, Clone, Serialize)]
pub struct Sidecar<S: Serialize> {
    pub generator: &'static str,
    pub spec: S,
    pub avail_domains: Vec<u16>,
    pub all_domains: Vec<u16>,
    pub oracle: serde_json::Value,
}

/// Writes `<dir>/<name>.oodf` and `<dir>/<name>.json`; returns the data path.
pub fn write_with_sidecar<S: Serialize>(dir: &Path, name: &str, ds: &FeatureDataset, sidecar: &Sidecar<S>) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let data = dir.join(format!("{name}.oodf"));
    write_dataset(ds, &data)?;
    let json = serde_json::to_string_pretty(sidecar)?;
    atomic_write(&dir.join(format!("{name}.json")), json.as_bytes())?;
    Ok(data)
}

pub fn colored_mnist_sidecar(spec: &ColoredMnistSpec) -> Result<Sidecar<ColoredMnistSpec>> {
    let pairs = |es: &[f64]| -> Result<f64> {
        let mut best: f64 = 0.0;
        for (i, &a) in es.iter().enumerate() {
            for &b in &es[i + 1..] {
                best = best.max(colored_mnist_color_tv(a, b, spec.color_noise)?);
            }
        }
        Ok(best)
    };
    let v_avail = pairs(&spec.e_avail)?;
    let v_all = pairs(&spec.e_all)?;
    let informativeness = spec
        .e_avail
        .iter()
        .map(|e| (1.0 - 2.0 * e).abs() * gaussian_tv(-1.0, 1.0, spec.color_noise).unwrap_or(1.0))
        .fold(f64::INFINITY, f64::min);
    let slope = colored_mnist_expansion_slope(&spec.e_avail, &spec.e_all).ok();
    Ok(Sidecar {
        generator: "colored-mnist",
        spec: spec.clone(),
        avail_domains: spec.avail_ids(),
        all_domains: spec.all_ids(),
        oracle: serde_json::json!({
            "color_tv_variation_avail": v_avail,
            "color_tv_variation_all": v_all,
            "color_tv_informativeness_avail": informativeness,
            "shape_tv_variation": 0.0,
            "expansion_slope": slope,
        }),
    })
}

pub fn gaussian_lemma_sidecar(spec: &GaussianLemmaSpec) -> Result<Sidecar<GaussianLemmaSpec>> {
    let diag = [std::f64::consts::FRAC_1_SQRT_2; 2];
    let eval = eval_lemma_classifier(spec, diag, false)?;
    Ok(Sidecar {
        generator: "gaussian-lemma",
        spec: *spec,
        avail_domains: GaussianLemmaSpec::AVAIL.to_vec(),
        all_domains: GaussianLemmaSpec::ALL.to_vec(),
        oracle: serde_json::json!({
            "a": spec.shifts(),
            "r": spec.r(),
            "expansion_slope": spec.k,
            "symkl_variation_avail_diag": spec.variation_avail(diag),
            "symkl_variation_all_diag": spec.variation_all(diag),
            "classifier_diag": eval,
        }),
    })
}

pub fn trap_sidecar(spec: &TrapSpec) -> Sidecar<TrapSpec> {
    let oracle = match spec.variant {
        TrapVariant::Strict => serde_json::json!({
            "coordinate_tv_variation": 0.0,
            "diag_tv_variation": zero_mean_normal_tv(1.0 + spec.correlation, 1.0 - spec.correlation),
        }),
        TrapVariant::Paper => serde_json::json!({ "coordinate0_tv_variation": 0.0 }),
    };
    Sidecar {
        generator: "trap",
        spec: *spec,
        avail_domains: TrapSpec::DOMAINS.to_vec(),
        all_domains: TrapSpec::DOMAINS.to_vec(),
        oracle,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{feature_variation, FeatureRef};

    #[test]
    fn lemma_shifts() {
        let s = GaussianLemmaSpec { t: 0.5, k: 4.0, n_per_domain: 1, seed: 0, exact_balance: false };
        let a = s.shifts();
        assert!((a[0] + 0.5).abs() < 1e-15 && (a[1] - 0.5).abs() < 1e-15);
        assert!((a[2] + 1.0).abs() < 1e-15 && (a[3] - 1.0).abs() < 1e-15);
        assert!((s.r() - 0.5f64.sqrt()).abs() < 1e-15);
        let diag = [1.0, 1.0];
        assert!((s.variation_avail(diag) - 0.25).abs() < 1e-15);
        assert!((s.variation_all(diag) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lemma_classifier_closed_form() {
        let s = GaussianLemmaSpec { t: 0.5, k: 4.0, n_per_domain: 1, seed: 0, exact_balance: false };
        let axis = eval_lemma_classifier(&s, [1.0, 0.0], false).unwrap();
        assert_eq!(axis.err, 0.0);
        assert_eq!(axis.c1_bound, 0.0);
        let diag = eval_lemma_classifier(&s, [1.0, 1.0], true).unwrap();
        // Φ̄(0.5 − √2/4) and Φ̄(0.5 − √2/2)
        assert!((diag.loss_avail - 0.441_784_417_458_292).abs() < 1e-9, "{}", diag.loss_avail);
        assert!((diag.loss_all - 0.582_036_766_853_491).abs() < 1e-9, "{}", diag.loss_all);
        assert!((diag.err - 0.140_252_349_395_199).abs() < 1e-9, "{}", diag.err);
        assert!(diag.err >= diag.c1_bound);
        assert!(eval_lemma_classifier(&s, [0.0, 0.0], true).is_err());
        assert!(eval_lemma_classifier(&s, [-1.0, 0.5], true).is_err());
    }

    #[test]
    fn generators_are_seed_deterministic() {
        let spec = ColoredMnistSpec { n_per_domain: 200, seed: 5, ..Default::default() };
        assert_eq!(gen_colored_mnist(&spec).unwrap(), gen_colored_mnist(&spec).unwrap());
        let other = gen_colored_mnist(&ColoredMnistSpec { seed: 6, ..spec.clone() }).unwrap();
        assert_ne!(gen_colored_mnist(&spec).unwrap(), other);
        let t = TrapSpec { variant: TrapVariant::Strict, correlation: 0.9, n_per_domain: 100, seed: 1, exact_balance: false };
        assert_eq!(gen_trap(&t).unwrap(), gen_trap(&t).unwrap());
    }

    #[test]
    fn label_balance_within_four_sigma() {
        let n = 10_000usize;
        let sigma = (n as f64 * 0.25).sqrt();
        let ds = gen_gaussian_lemma(&GaussianLemmaSpec { t: 0.5, k: 4.0, n_per_domain: n, seed: 3, exact_balance: false }).unwrap();
        for &e in ds.domain_ids() {
            let pos = ds.labels().iter().zip(ds.domains()).filter(|(&l, &d)| d == e && l == 2).count();
            assert!((pos as f64 - n as f64 / 2.0).abs() <= 4.0 * sigma);
        }
        let cm = gen_colored_mnist(&ColoredMnistSpec { n_per_domain: n, seed: 3, ..Default::default() }).unwrap();
        for &e in cm.domain_ids() {
            let pos = cm.labels().iter().zip(cm.domains()).filter(|(&l, &d)| d == e && l == 2).count();
            assert!((pos as f64 - n as f64 / 2.0).abs() <= 4.0 * sigma);
        }
        let exact = gen_trap(&TrapSpec { variant: TrapVariant::Paper, correlation: 0.9, n_per_domain: 100, seed: 0, exact_balance: true }).unwrap();
        assert_eq!(exact.labels().iter().filter(|&&l| l == 2).count(), 100);
    }

    #[test]
    fn trap_strict_covariance() {
        let ds = gen_trap(&TrapSpec { variant: TrapVariant::Strict, correlation: 0.9, n_per_domain: 40_000, seed: 2, exact_balance: false }).unwrap();
        let (mut sum, mut count) = (0.0, 0usize);
        for i in 0..ds.n_samples() {
            if ds.domains()[i] == 1 && ds.labels()[i] == 2 {
                let r = ds.row(i);
                sum += f64::from(r[0]) * f64::from(r[1]);
                count += 1;
            }
        }
        assert!((sum / count as f64 - 0.9).abs() < 0.02);
    }

    #[test]
    fn trap_oracle_quadrature() {
        // crossing points ±x*, x*² = 2 ln(σ1/σ2) σ1² σ2² / (σ1² − σ2²)
        let (v1, v2) = (1.9f64, 0.1f64);
        let x = (2.0 * (v1.sqrt() / v2.sqrt()).ln() * v1 * v2 / (v1 - v2)).sqrt();
        let closed = 2.0 * (normal::cdf(x / v2.sqrt()) - normal::cdf(x / v1.sqrt()));
        let quad = zero_mean_normal_tv(v1, v2);
        assert!((closed - quad).abs() < 1e-8, "{closed} vs {quad}");
        assert!(quad > 0.5);
    }

    #[test]
    fn colored_mnist_oracles() {
        assert!((colored_mnist_color_tv(0.1, 0.2, 0.05).unwrap() - 0.1).abs() < 1e-12);
        assert!((colored_mnist_expansion_slope(&[0.1, 0.2], &[0.1, 0.5, 0.9]).unwrap() - 8.0).abs() < 1e-9);
        assert!(colored_mnist_expansion_slope(&[0.1], &[0.1, 0.9]).is_err());
    }

    #[test]
    fn colored_mnist_shape_is_invariant_color_is_not() {
        let spec = ColoredMnistSpec { e_avail: vec![0.1, 0.9], e_all: vec![0.1, 0.9], n_per_domain: 8_000, seed: 4, ..Default::default() };
        let ds = gen_colored_mnist(&spec).unwrap();
        let cfg = DensityConfig::default();
        let shape = feature_variation(&ds, &FeatureRef::Index(0), &[0, 1], DivergenceKind::TotalVariation, &cfg).unwrap();
        let color = feature_variation(&ds, &FeatureRef::Index(1), &[0, 1], DivergenceKind::TotalVariation, &cfg).unwrap();
        assert!(shape < 0.06, "{shape}");
        assert!((color - 0.8).abs() < 0.03, "{color}");
    }

    #[test]
    fn spec_validation() {
        assert!(ColoredMnistSpec { e_avail: vec![0.35], ..Default::default() }.validate().is_err());
        assert!(ColoredMnistSpec { e_all: vec![1.5], e_avail: vec![1.5], ..Default::default() }.validate().is_err());
        assert!(GaussianLemmaSpec { t: 0.5, k: 1.0, n_per_domain: 1, seed: 0, exact_balance: false }.validate().is_err());
        assert!(TrapSpec { variant: TrapVariant::Strict, correlation: 1.0, n_per_domain: 1, seed: 0, exact_balance: false }.validate().is_err());
    }
}
