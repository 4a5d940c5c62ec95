//! Symmetric distances between one-dimensional densities.

use std::fmt;
use std::str::FromStr;

use crate::density::{trapezoid, Density1D, KernelPlan};
use crate::error::{Error, Result};
use crate::normal;

pub const DEFAULT_KL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DivergenceKind {
    /// `½∫|p − q|`, clamped to [0, 1].
    #[default]
    TotalVariation,
    /// `½KL(p‖q) + ½KL(q‖p)` with both densities floored before the log.
    SymmetricKl { floor: f64 },
    /// `(∫(p − q)²)^½`
    L2,
}

impl DivergenceKind {
    pub fn symmetric_kl() -> Self {
        DivergenceKind::SymmetricKl {
            floor: DEFAULT_KL_FLOOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let DivergenceKind::SymmetricKl { floor } = self {
            if !(floor.is_finite() && *floor > 0.0) {
                return Err(Error::invalid(format!("symmetric KL floor {floor} must be positive")));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            DivergenceKind::TotalVariation => "tv",
            DivergenceKind::SymmetricKl { .. } => "symkl",
            DivergenceKind::L2 => "l2",
        }
    }
}

impl fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DivergenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "tv" | "total_variation" => Ok(DivergenceKind::TotalVariation),
            "symkl" | "symmetric_kl" | "skl" => Ok(DivergenceKind::symmetric_kl()),
            "l2" => Ok(DivergenceKind::L2),
            _ => Err(Error::invalid(format!(
                "unknown divergence {s:?} (expected tv, symkl or l2)"
            ))),
        }
    }
}

/// Distance between `p` and `q`.
///
/// Unless both already share a grid, each is re-evaluated from its source
/// on the union of the two supports with `max(m_p, m_q)` points.
pub fn divergence(p: &Density1D, q: &Density1D, kind: DivergenceKind) -> Result<f64> {
    kind.validate()?;
    if p.same_grid(q) {
        return Ok(on_shared_grid(p.mass(), q.mass(), p.step(), kind));
    }
    let (plo, phi) = p.support();
    let (qlo, qhi) = q.support();
    let (lo, hi) = (plo.min(qlo), phi.max(qhi));
    let m = p.len().max(q.len());
    let pg = p.regrid(lo, hi, m)?;
    let qg = q.regrid(lo, hi, m)?;
    Ok(on_shared_grid(pg.mass(), qg.mass(), pg.step(), kind))
}

/// Same value as [`divergence`] on the two tabulated estimates, without
/// tabulating either on its own grid first.
pub(crate) fn planned_divergence(p: &KernelPlan, q: &KernelPlan, kind: DivergenceKind) -> Result<f64> {
    let (plo, phi) = p.support();
    let (qlo, qhi) = q.support();
    let (lo, hi) = (plo.min(qlo), phi.max(qhi));
    let m = p.grid_len().max(q.grid_len());
    let (pm, step) = p.mass_on(lo, hi, m)?;
    let (qm, _) = q.mass_on(lo, hi, m)?;
    Ok(on_shared_grid(&pm, &qm, step, kind))
}

pub(crate) fn on_shared_grid(p: &[f64], q: &[f64], step: f64, kind: DivergenceKind) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    match kind {
        DivergenceKind::TotalVariation => {
            let diff: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a - b).abs()).collect();
            (0.5 * trapezoid(&diff, step)).clamp(0.0, 1.0)
        }
        DivergenceKind::SymmetricKl { floor } => {
            let terms: Vec<f64> = p
                .iter()
                .zip(q)
                .map(|(&a, &b)| {
                    let (a, b) = (a.max(floor), b.max(floor));
                    (a - b) * (a.ln() - b.ln())
                })
                .collect();
            (0.5 * trapezoid(&terms, step)).max(0.0)
        }
        DivergenceKind::L2 => {
            let sq: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).collect();
            trapezoid(&sq, step).max(0.0).sqrt()
        }
    }
}

/// Symmetric KL between `N(mu1, σ²)` and `N(mu2, σ²)`: `(μ1 − μ2)² / (2σ²)`.
pub fn gaussian_sym_kl(mu1: f64, mu2: f64, sigma: f64) -> Result<f64> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid(format!("sigma {sigma} must be positive")));
    }
    let gap = mu1 - mu2;
    Ok(gap * gap / (2.0 * sigma * sigma))
}

/// Total variation between equal-variance Gaussians: `2Φ(|μ1 − μ2|/(2σ)) − 1`.
pub fn gaussian_tv(mu1: f64, mu2: f64, sigma: f64) -> Result<f64> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid(format!("sigma {sigma} must be positive")));
    }
    let z = (mu1 - mu2).abs() / (2.0 * sigma);
    // 2Φ(z) − 1 = 1 − 2Φ̄(z), which keeps precision for large z
    Ok((1.0 - 2.0 * normal::sf(z)).clamp(0.0, 1.0))
}
