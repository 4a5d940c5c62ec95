//! One-dimensional Gaussian-kernel density estimation on uniform grids.
//!
//! Kernel sums are accumulated by a per-sample scatter: starting from the
//! grid point nearest each sample, neighbouring kernel values follow from a
//! multiplicative recurrence (`k[j+1] = k[j]·r[j]`, `r[j+1] = r[j]·exp(-δ²)`),
//! split into a few interleaved chains and re-anchored with exact `exp`
//! values every [`REANCHOR`] steps. Samples are visited in sorted order, so a
//! density is a pure function of its inputs.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::normal;

/// Kernel contributions beyond this many bandwidths are dropped (`exp(-40.5)`).
const CUTOFF: f64 = 9.0;
const REANCHOR: usize = 64;
/// Tolerance of the normalization invariant.
pub const NORMALIZATION_TOL: f64 = 1e-3;
/// Gaussian reference densities always cover at least this many std devs.
const MIN_GAUSSIAN_HALF_WIDTH: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BandwidthRule {
    /// `0.9 · min(std, IQR/1.34) · n^(-1/5)`
    #[default]
    Silverman,
    /// `1.06 · std · n^(-1/5)`
    Scott,
    Fixed(f64),
}

impl std::str::FromStr for BandwidthRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "silverman" => Ok(Self::Silverman),
            "scott" => Ok(Self::Scott),
            other => {
                let v = other
                    .strip_prefix("fixed:")
                    .or_else(|| other.strip_prefix("fixed="))
                    .unwrap_or(other);
                match v.parse::<f64>() {
                    Ok(h) if h.is_finite() && h > 0.0 => Ok(Self::Fixed(h)),
                    _ => Err(Error::invalid(format!(
                        "bandwidth rule {s:?}: expected silverman, scott, or a positive number"
                    ))),
                }
            }
        }
    }
}

/// Grid size and padding (in bandwidths) beyond the sample range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub m: usize,
    pub padding: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { m: 512, padding: 3.0 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m < 16 {
            return Err(Error::invalid(format!("grid size {} is below 16", self.m)));
        }
        if !(self.padding.is_finite() && self.padding >= 0.0) {
            return Err(Error::invalid(format!("grid padding {} must be finite and >= 0", self.padding)));
        }
        Ok(())
    }
}

/// Bandwidth rule plus grid, as consumed by the metrics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DensityConfig {
    pub rule: BandwidthRule,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub std: f64,
}

/// What a density was built from; kept so it can be re-evaluated exactly on
/// another grid.
#[derive(Debug, Clone, PartialEq)]
pub enum DensitySource {
    /// Sorted samples and the kernel bandwidth.
    Kernel { samples: Arc<[f64]>, bandwidth: f64 },
    /// Closed-form Gaussian mixture (weights sum to 1).
    Mixture(Arc<[MixtureComponent]>),
}

/// A density tabulated on a uniform grid, normalized so its trapezoidal
/// integral is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Density1D {
    grid: Vec<f64>,
    mass: Vec<f64>,
    bandwidth: f64,
    source: DensitySource,
    fallback: bool,
}

impl Density1D {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn source(&self) -> &DensitySource {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.grid[0], *self.grid.last().unwrap())
    }

    pub fn step(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// True when a data-driven bandwidth collapsed and the fixed fallback was used.
    pub fn used_fallback(&self) -> bool {
        self.fallback
    }

    pub fn integral(&self) -> f64 {
        trapezoid(&self.mass, self.step())
    }

    /// True when both densities are tabulated on the same abscissae.
    pub fn same_grid(&self, other: &Density1D) -> bool {
        self.grid.len() == other.grid.len() && self.grid[0] == other.grid[0] && self.step() == other.step()
    }

    /// Re-evaluates the underlying source on `m` points spanning `[lo, hi]`.
    pub fn regrid(&self, lo: f64, hi: f64, m: usize) -> Result<Density1D> {
        let grid = uniform_grid(lo, hi, m)?;
        let mass = evaluate(&self.source, &grid)?;
        Ok(Density1D {
            grid,
            mass,
            bandwidth: self.bandwidth,
            source: self.source.clone(),
            fallback: self.fallback,
        })
    }
}

/// Trapezoid rule over uniformly spaced values.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            step * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

pub(crate) fn uniform_grid(lo: f64, hi: f64, m: usize) -> Result<Vec<f64>> {
    if m < 16 {
        return Err(Error::invalid(format!("grid size {m} is below 16")));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::invalid(format!("degenerate grid support [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (m - 1) as f64;
    Ok((0..m).map(|j| lo + j as f64 * step).collect())
}

fn evaluate(source: &DensitySource, grid: &[f64]) -> Result<Vec<f64>> {
    let step = grid[1] - grid[0];
    let mut mass = match source {
        DensitySource::Kernel { samples, bandwidth } => kernel_sum(samples, *bandwidth, grid[0], step, grid.len()),
        DensitySource::Mixture(comps) => grid
            .iter()
            .map(|&x| comps.iter().map(|c| c.weight * normal::pdf_scaled(x, c.mean, c.std)).sum())
            .collect(),
    };
    let total = trapezoid(&mass, step);
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::invalid(format!(
            "density has no mass on the grid [{}, {}]",
            grid[0],
            grid[grid.len() - 1]
        )));
    }
    mass.iter_mut().for_each(|v| *v /= total);
    Ok(mass)
}

/// Unnormalized Gaussian kernel sum `Σ_s exp(-((x_j - s)/h)²/2)` scaled by
/// `1/(n h √(2π))`, on the grid `lo + j·step`, `j < m`.
fn kernel_sum(samples: &[f64], h: f64, lo: f64, step: f64, m: usize) -> Vec<f64> {
    let mut acc = vec![0.0; m];
    let delta = step / h;
    let last = (m - 1) as isize;
    for &s in samples {
        let j0 = (((s - lo) / step).round() as isize).clamp(0, last);
        let u0 = (lo + j0 as f64 * step - s) / h;
        acc[j0 as usize] += (-0.5 * u0 * u0).exp();

        let n_right = if u0 > CUTOFF {
            0
        } else {
            (((CUTOFF - u0) / delta).floor() as isize).min(last - j0).max(0) as usize
        };
        add_run::<true>(&mut acc, j0 as usize, n_right, u0, delta);
        let n_left = if u0 < -CUTOFF {
            0
        } else {
            (((CUTOFF + u0) / delta).floor() as isize).min(j0).max(0) as usize
        };
        add_run::<false>(&mut acc, j0 as usize, n_left, u0, -delta);
    }
    let norm = 1.0 / (samples.len() as f64 * h * (2.0 * PI).sqrt());
    acc.iter_mut().for_each(|v| *v *= norm);
    acc
}

/// Independent recurrence chains per run; they hide multiply latency.
const LANES: usize = 4;

/// Adds `exp(-u_t²/2)` with `u_t = u0 + t·d` to `acc[j0 ± t]` for `t = 1..=n`.
///
/// Lane `i` covers `t ≡ i + 1 (mod LANES)` and steps by `L = LANES` points:
/// `k_{t+L} = k_t·R_t`, `R_{t+L} = R_t·exp(-L²d²)`. Every lane is re-anchored
/// from exact values after `REANCHOR` of its own steps.
#[inline]
fn add_run<const RIGHT: bool>(acc: &mut [f64], j0: usize, n: usize, u0: f64, d: f64) {
    let l = LANES as f64;
    let lane_decay = (-l * l * d * d).exp();
    let lane_spread = (-l * d * d).exp();
    let unit_decay = (-d * d).exp();
    let idx = |t: usize| if RIGHT { j0 + t } else { j0 - t };
    let mut t = 1;
    while t <= n {
        let end = (t + LANES * REANCHOR - 1).min(n);
        let u = u0 + t as f64 * d;
        let mut k = [0.0f64; LANES];
        let mut r = [0.0f64; LANES];
        k[0] = (-0.5 * u * u).exp();
        r[0] = (-(l * d * u + 0.5 * l * l * d * d)).exp();
        let mut unit = (-(d * u + 0.5 * d * d)).exp();
        for i in 1..LANES {
            k[i] = k[i - 1] * unit;
            unit *= unit_decay;
            r[i] = r[i - 1] * lane_spread;
        }
        while t + LANES - 1 <= end {
            for i in 0..LANES {
                acc[idx(t + i)] += k[i];
                k[i] *= r[i];
                r[i] *= lane_decay;
            }
            t += LANES;
        }
        for (i, &ki) in k.iter().enumerate().take(end + 1 - t) {
            acc[idx(t + i)] += ki;
        }
        t = end + 1;
    }
}

fn sample_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (ss / (n - 1.0)).sqrt()
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

/// Resolves a bandwidth rule on sorted samples. Returns `None` when a
/// data-driven rule yields zero.
fn resolve_bandwidth(sorted: &[f64], rule: BandwidthRule) -> Option<f64> {
    let n = sorted.len() as f64;
    let h = match rule {
        BandwidthRule::Fixed(h) => return Some(h),
        BandwidthRule::Scott => 1.06 * sample_std(sorted) * n.powf(-0.2),
        BandwidthRule::Silverman => {
            let std = sample_std(sorted);
            let iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
            let spread = if iqr > 0.0 { std.min(iqr / 1.34) } else { std };
            0.9 * spread * n.powf(-0.2)
        }
    };
    (h.is_finite() && h > 0.0).then_some(h)
}

pub(crate) fn plan_kernel(samples: &[f64], rule: BandwidthRule, grid: GridSpec) -> Result<KernelPlan> {
    grid.validate()?;
    if samples.len() < 2 {
        return Err(Error::invalid(format!(
            "density estimation needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
        return Err(Error::invalid(format!("sample {i} is not finite")));
    }
    if let BandwidthRule::Fixed(h) = rule {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::invalid(format!("fixed bandwidth {h} must be positive")));
        }
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);

    let (bandwidth, fallback) = match resolve_bandwidth(&sorted, rule) {
        Some(h) => (h, false),
        None => {
            let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
            let h = 1e-3 * mean.abs().max(1.0);
            log::warn!("zero sample spread under {rule:?}; falling back to fixed bandwidth {h:e}");
            (h, true)
        }
    };

    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let pad = grid.padding.max(if max > min { 0.0 } else { 1.0 }) * bandwidth;
    Ok(KernelPlan {
        source: DensitySource::Kernel {
            samples: sorted.into(),
            bandwidth,
        },
        bandwidth,
        fallback,
        lo: min - pad,
        hi: max + pad,
        m: grid.m,
    })
}

/// Gaussian-kernel density estimate of `samples` on `m` points spanning
/// `[min - padding·h, max + padding·h]`.
pub fn estimate_density(samples: &[f64], rule: BandwidthRule, grid: GridSpec) -> Result<Density1D> {
    plan_kernel(samples, rule, grid)?.evaluate()
}

/// A kernel estimate resolved down to its bandwidth and support but not yet
/// tabulated, for callers that only ever evaluate it on shared grids.
#[derive(Debug, Clone)]
pub(crate) struct KernelPlan {
    source: DensitySource,
    bandwidth: f64,
    fallback: bool,
    lo: f64,
    hi: f64,
    m: usize,
}

impl KernelPlan {
    pub(crate) fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub(crate) fn grid_len(&self) -> usize {
        self.m
    }

    /// Normalized values on `m` points spanning `[lo, hi]`, and the grid step.
    pub(crate) fn mass_on(&self, lo: f64, hi: f64, m: usize) -> Result<(Vec<f64>, f64)> {
        let grid = uniform_grid(lo, hi, m)?;
        let mass = evaluate(&self.source, &grid)?;
        Ok((mass, grid[1] - grid[0]))
    }

    pub(crate) fn evaluate(self) -> Result<Density1D> {
        let grid = uniform_grid(self.lo, self.hi, self.m)?;
        let mass = evaluate(&self.source, &grid)?;
        Ok(Density1D {
            grid,
            mass,
            bandwidth: self.bandwidth,
            source: self.source,
            fallback: self.fallback,
        })
    }
}

/// Exact `N(mean, std²)` on a grid of half-width `max(padding, 6)·std`.
pub fn gaussian_density(mean: f64, std: f64, grid: GridSpec) -> Result<Density1D> {
    mixture_density(&[MixtureComponent { weight: 1.0, mean, std }], grid)
}

/// Exact Gaussian mixture; weights are renormalized to sum to 1.
pub fn mixture_density(components: &[MixtureComponent], grid: GridSpec) -> Result<Density1D> {
    grid.validate()?;
    if components.is_empty() {
        return Err(Error::invalid("mixture has no components"));
    }
    for c in components {
        if !(c.std.is_finite() && c.std > 0.0) {
            return Err(Error::invalid(format!("std {} must be positive", c.std)));
        }
        if !(c.weight.is_finite() && c.weight >= 0.0 && c.mean.is_finite()) {
            return Err(Error::invalid("mixture weights must be >= 0 and means finite"));
        }
    }
    let total: f64 = components.iter().map(|c| c.weight).sum();
    if total <= 0.0 {
        return Err(Error::invalid("mixture weights sum to zero"));
    }
    let comps: Vec<MixtureComponent> = components
        .iter()
        .map(|c| MixtureComponent {
            weight: c.weight / total,
            ..*c
        })
        .collect();
    let half = grid.padding.max(MIN_GAUSSIAN_HALF_WIDTH);
    let lo = comps.iter().map(|c| c.mean - half * c.std).fold(f64::INFINITY, f64::min);
    let hi = comps.iter().map(|c| c.mean + half * c.std).fold(f64::NEG_INFINITY, f64::max);
    let bandwidth = comps.iter().map(|c| c.std).fold(f64::INFINITY, f64::min);
    let grid_pts = uniform_grid(lo, hi, grid.m)?;
    let source = DensitySource::Mixture(comps.into());
    let mass = evaluate(&source, &grid_pts)?;
    Ok(Density1D {
        grid: grid_pts,
        mass,
        bandwidth,
        source,
        fallback: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn normal_draws(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    /// Direct O(n·m) evaluation with one `exp` per kernel term.
    fn brute_kde(samples: &[f64], h: f64, grid: &[f64]) -> Vec<f64> {
        grid.iter()
            .map(|&x| {
                samples.iter().map(|&s| normal::pdf((x - s) / h)).sum::<f64>() / (samples.len() as f64 * h)
            })
            .collect()
    }

    #[test]
    fn recurrence_matches_direct_sum() {
        let xs = normal_draws(300, 3);
        for &h in &[0.004, 0.05, 0.3, 2.0] {
            let d = estimate_density(&xs, BandwidthRule::Fixed(h), GridSpec::default()).unwrap();
            let mut brute = brute_kde(&xs, h, d.grid());
            let total = trapezoid(&brute, d.step());
            brute.iter_mut().for_each(|v| *v /= total);
            let peak = brute.iter().cloned().fold(0.0, f64::max);
            for (a, b) in d.mass().iter().zip(&brute) {
                assert!((a - b).abs() <= 1e-10 * peak, "h={h}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn standard_gaussian_recovered() {
        let xs = normal_draws(50_000, 11);
        let d = estimate_density(&xs, BandwidthRule::Silverman, GridSpec::default()).unwrap();
        assert!((d.integral() - 1.0).abs() < 1e-12);
        let worst = d
            .grid()
            .iter()
            .zip(d.mass())
            .map(|(&x, &p)| (p - normal::pdf(x)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 0.01, "max abs deviation {worst}");
    }

    #[test]
    fn constant_samples_use_fallback() {
        let d = estimate_density(&[5.0; 10], BandwidthRule::Silverman, GridSpec::default()).unwrap();
        assert!(d.used_fallback());
        assert!((d.bandwidth() - 5e-3).abs() < 1e-15);
        assert!((d.integral() - 1.0).abs() < 1e-12);
        let (lo, hi) = d.support();
        assert!(lo < 5.0 && hi > 5.0 && hi - lo < 0.05);
        let argmax = d.mass().iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert!((d.grid()[argmax] - 5.0).abs() < 2.0 * d.step());
    }

    #[test]
    fn two_point_mixture() {
        let d = estimate_density(&[0.0, 1.0], BandwidthRule::Fixed(0.5), GridSpec::default()).unwrap();
        let mut exact: Vec<f64> = d
            .grid()
            .iter()
            .map(|&x| 0.5 * normal::pdf_scaled(x, 0.0, 0.5) + 0.5 * normal::pdf_scaled(x, 1.0, 0.5))
            .collect();
        let total = trapezoid(&exact, d.step());
        exact.iter_mut().for_each(|v| *v /= total);
        for (a, b) in d.mass().iter().zip(&exact) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(d.support(), (-1.5, 2.5));
    }

    #[test]
    fn gaussian_reference_peak() {
        let d = gaussian_density(0.0, 1.0, GridSpec { m: 513, padding: 3.0 }).unwrap();
        let argmax = d.mass().iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert!(d.grid()[argmax].abs() < 1e-12);
        assert!((d.mass()[argmax] - 0.398_942_280_401_432_7).abs() < 1e-6);
        // narrow padding is widened to +-6 sigma
        assert_eq!(d.support(), (-6.0, 6.0));

        let d = gaussian_density(2.5, 0.5, GridSpec { m: 513, padding: 8.0 }).unwrap();
        let argmax = d.mass().iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert!((d.grid()[argmax] - 2.5).abs() < 1e-12);
        assert!(gaussian_density(0.0, 0.0, GridSpec::default()).is_err());
        assert!(gaussian_density(0.0, -1.0, GridSpec::default()).is_err());
    }

    #[test]
    fn precondition_errors() {
        assert!(estimate_density(&[1.0], BandwidthRule::Silverman, GridSpec::default()).is_err());
        assert!(estimate_density(&[1.0, f64::NAN], BandwidthRule::Silverman, GridSpec::default()).is_err());
        assert!(estimate_density(&[1.0, 2.0], BandwidthRule::Silverman, GridSpec { m: 8, padding: 3.0 }).is_err());
        assert!(estimate_density(&[1.0, 2.0], BandwidthRule::Fixed(0.0), GridSpec::default()).is_err());
    }

    #[test]
    fn l1_error_shrinks_with_n() {
        let mut prev = f64::INFINITY;
        for &n in &[5_000usize, 20_000, 80_000] {
            let xs = normal_draws(n, 5);
            let d = estimate_density(&xs, BandwidthRule::Silverman, GridSpec::default()).unwrap();
            let err: Vec<f64> = d.grid().iter().zip(d.mass()).map(|(&x, &p)| (p - normal::pdf(x)).abs()).collect();
            let l1 = trapezoid(&err, d.step());
            assert!(l1 <= prev, "n={n}: L1 {l1} > {prev}");
            prev = l1;
        }
    }

    #[test]
    fn shift_equivariance() {
        let xs: Vec<f64> = normal_draws(500, 9).iter().map(|x| (x * 1024.0).round() / 1024.0).collect();
        let c = 4.0;
        let shifted: Vec<f64> = xs.iter().map(|x| x + c).collect();
        let a = estimate_density(&xs, BandwidthRule::Fixed(0.25), GridSpec::default()).unwrap();
        let b = estimate_density(&shifted, BandwidthRule::Fixed(0.25), GridSpec::default()).unwrap();
        for (ga, gb) in a.grid().iter().zip(b.grid()) {
            assert!((ga + c - gb).abs() < 1e-12);
        }
        for (pa, pb) in a.mass().iter().zip(b.mass()) {
            assert!((pa - pb).abs() < 1e-9);
        }
    }

    #[test]
    fn regrid_reevaluates_source() {
        let xs = normal_draws(200, 1);
        let d = estimate_density(&xs, BandwidthRule::Silverman, GridSpec::default()).unwrap();
        let wide = d.regrid(-10.0, 10.0, 1024).unwrap();
        assert_eq!(wide.len(), 1024);
        assert!((wide.integral() - 1.0).abs() < 1e-12);
        assert_eq!(wide.bandwidth(), d.bandwidth());
    }

    #[test]
    fn bandwidth_rule_parsing() {
        assert_eq!("silverman".parse::<BandwidthRule>().unwrap(), BandwidthRule::Silverman);
        assert_eq!("Scott".parse::<BandwidthRule>().unwrap(), BandwidthRule::Scott);
        assert_eq!("fixed:0.5".parse::<BandwidthRule>().unwrap(), BandwidthRule::Fixed(0.5));
        assert!("fixed:-1".parse::<BandwidthRule>().is_err());
    }
}
