//! Expansion-function estimation over the (V_avail, V_all) feature cloud and
//! learnability verdicts.
//!
//! Verdicts only see the sampled features: a "learnable" verdict says no
//! observed feature contradicts the expansion bound near the origin, not that
//! the whole feature space obeys it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{FeatureMetrics, FeatureRef};

/// Points within this relative distance of a bin's right edge belong to that bin.
const EDGE_SLACK: f64 = 1e-9;
const MAX_WITNESSES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudPoint {
    pub feature_tag: String,
    pub v_avail: f64,
    pub v_all: f64,
    pub informativeness: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureCloud {
    points: Vec<CloudPoint>,
}

impl FeatureCloud {
    pub fn new(points: Vec<CloudPoint>) -> Result<Self> {
        for p in &points {
            for (name, v) in [("v_avail", p.v_avail), ("v_all", p.v_all), ("informativeness", p.informativeness)] {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::invalid(format!("point {:?}: {name} = {v} must be finite and >= 0", p.feature_tag)));
                }
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[CloudPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn filtered(&self, delta: f64) -> impl Iterator<Item = &CloudPoint> {
        self.points.iter().filter(move |p| p.informativeness >= delta)
    }

    /// Cloud CSV: `feature_tag,v_avail,v_all,informativeness`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature_tag,v_avail,v_all,informativeness\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{},{}", p.feature_tag, p.v_avail, p.v_all, p.informativeness);
        }
        out
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let points = rdr.deserialize().collect::<std::result::Result<Vec<CloudPoint>, _>>()?;
        Self::new(points)
    }
}

pub fn feature_tag(feature: &FeatureRef) -> String {
    match feature {
        FeatureRef::Index(j) => j.to_string(),
        FeatureRef::Projected(dir) => {
            let c: Vec<String> = dir.coefficients().iter().map(|x| x.to_string()).collect();
            format!("proj[{}]", c.join(";"))
        }
    }
}

/// One point per feature: variation on both domain sets, informativeness on
/// the available set.
pub fn build_cloud(avail: &[FeatureMetrics], all: &[FeatureMetrics]) -> Result<FeatureCloud> {
    let all_by_tag: BTreeMap<String, &FeatureMetrics> = all.iter().map(|m| (feature_tag(&m.feature), m)).collect();
    if all_by_tag.len() != all.len() || avail.len() != all.len() {
        return Err(Error::invalid(format!(
            "tag mismatch: {} available-set rows vs {} full-set rows",
            avail.len(),
            all.len()
        )));
    }
    let mut points = Vec::with_capacity(avail.len());
    for m in avail {
        let tag = feature_tag(&m.feature);
        let other = all_by_tag
            .get(&tag)
            .ok_or_else(|| Error::invalid(format!("tag mismatch: feature {tag} missing from the full-set metrics")))?;
        let (Some(v_avail), Some(informativeness), Some(v_all)) = (m.variation, m.informativeness, other.variation) else {
            return Err(Error::invalid(format!("feature {tag}: metrics incomplete for the cloud")));
        };
        points.push(CloudPoint {
            feature_tag: tag,
            v_avail,
            v_all,
            informativeness,
        });
    }
    FeatureCloud::new(points)
}

/// Piecewise-constant expansion function over equal-width bins of `[0, max v_avail]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionEstimate {
    pub delta: f64,
    pub bin_edges: Vec<f64>,
    pub envelope: Vec<f64>,
    pub n_points_used: usize,
}

impl ExpansionEstimate {
    /// `s(x)` for `x > 0`; 0 at the origin. Beyond the last edge the identity bound applies.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let last = *self.bin_edges.last().unwrap();
        if x > last * (1.0 + EDGE_SLACK) {
            return self.envelope.last().copied().unwrap_or(0.0).max(x);
        }
        self.envelope[bin_of(x, last, self.envelope.len())]
    }

    /// CSV: `bin,left,right,envelope`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin,left,right,envelope\n");
        for (b, v) in self.envelope.iter().enumerate() {
            let _ = writeln!(out, "{b},{},{},{v}", self.bin_edges[b], self.bin_edges[b + 1]);
        }
        out
    }
}

/// Right-closed bins `(edge[b], edge[b+1]]`; zero goes to the first bin.
fn bin_of(x: f64, max: f64, n_bins: usize) -> usize {
    if max <= 0.0 || x <= 0.0 {
        return 0;
    }
    let t = x / max * n_bins as f64;
    let b = (t - EDGE_SLACK * n_bins as f64).ceil() as isize - 1;
    b.clamp(0, n_bins as isize - 1) as usize
}

/// Smallest nondecreasing step function with `s(x) ≥ x` that dominates every
/// point whose informativeness is at least `delta`.
///
/// Bins span `[0, max v_avail]` over the whole cloud, so the edges do not move
/// with `delta` and envelopes for different thresholds compare bin by bin.
pub fn estimate_expansion(cloud: &FeatureCloud, delta: f64, n_bins: usize) -> Result<ExpansionEstimate> {
    if n_bins < 2 {
        return Err(Error::invalid(format!("n_bins = {n_bins}; need at least 2")));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::invalid(format!("delta {delta} must be >= 0")));
    }
    let pts: Vec<&CloudPoint> = cloud.filtered(delta).collect();
    if pts.is_empty() {
        return Err(Error::invalid(format!("delta too large: no feature has informativeness >= {delta}")));
    }
    let max = cloud.points.iter().map(|p| p.v_avail).fold(0.0, f64::max);
    let bin_edges: Vec<f64> = (0..=n_bins).map(|b| max * b as f64 / n_bins as f64).collect();
    let mut raw = vec![0.0f64; n_bins];
    for p in &pts {
        let b = bin_of(p.v_avail, max, n_bins);
        raw[b] = raw[b].max(p.v_all);
    }
    let mut running = 0.0f64;
    let envelope = raw
        .iter()
        .enumerate()
        .map(|(b, &r)| {
            running = running.max(r);
            running.max(bin_edges[b + 1])
        })
        .collect();
    Ok(ExpansionEstimate {
        delta,
        bin_edges,
        envelope,
        n_points_used: pts.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearnabilityVerdict {
    pub delta: f64,
    pub learnable: bool,
    /// Largest `v_all` among informative points with `v_avail ≤ x0`.
    pub envelope_at_origin: f64,
    pub witnesses: Vec<String>,
    pub x0: f64,
    pub y0: f64,
}

impl LearnabilityVerdict {
    pub fn summary(&self) -> String {
        let verdict = if self.learnable { "learnable" } else { "NOT learnable" };
        let mut s = format!(
            "delta={} x0={} y0={}: {verdict} (envelope near origin {} vs {}; sampled features only)",
            self.delta, self.x0, self.y0, self.envelope_at_origin, self.y0
        );
        if !self.witnesses.is_empty() {
            let _ = write!(s, "; witnesses: {}", self.witnesses.join(" "));
        }
        s
    }
}

pub fn check_learnability(cloud: &FeatureCloud, delta: f64, x0: f64, y0: f64) -> Result<LearnabilityVerdict> {
    if !(x0.is_finite() && x0 > 0.0 && y0.is_finite() && y0 > 0.0) {
        return Err(Error::invalid(format!("x0 = {x0} and y0 = {y0} must both be positive")));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::invalid(format!("delta {delta} must be >= 0")));
    }
    let near: Vec<&CloudPoint> = cloud.filtered(delta).filter(|p| p.v_avail <= x0).collect();
    let envelope_at_origin = near.iter().map(|p| p.v_all).fold(0.0, f64::max);
    let mut violators: Vec<&CloudPoint> = near.into_iter().filter(|p| p.v_all > y0).collect();
    violators.sort_by(|a, b| b.v_all.total_cmp(&a.v_all).then_with(|| a.feature_tag.cmp(&b.feature_tag)));
    Ok(LearnabilityVerdict {
        delta,
        learnable: envelope_at_origin <= y0,
        envelope_at_origin,
        witnesses: violators.iter().take(MAX_WITNESSES).map(|p| p.feature_tag.clone()).collect(),
        x0,
        y0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::DivergenceKind;
    use proptest::prelude::*;

    fn pt(tag: &str, v_avail: f64, v_all: f64, i: f64) -> CloudPoint {
        CloudPoint {
            feature_tag: tag.into(),
            v_avail,
            v_all,
            informativeness: i,
        }
    }

    #[test]
    fn hand_envelope() {
        let cloud = FeatureCloud::new(vec![pt("a", 0.1, 0.4, 1.0), pt("b", 0.2, 0.5, 1.0), pt("c", 0.3, 0.45, 1.0)]).unwrap();
        let est = estimate_expansion(&cloud, 0.0, 3).unwrap();
        assert_eq!(est.envelope, vec![0.4, 0.5, 0.5]);
        assert_eq!(est.n_points_used, 3);
        assert_eq!(est.eval(0.0), 0.0);
        assert_eq!(est.eval(0.15), 0.5);
    }

    #[test]
    fn diagonal_point_gives_identity_bound() {
        let cloud = FeatureCloud::new(vec![pt("a", 0.2, 0.2, 1.0)]).unwrap();
        let est = estimate_expansion(&cloud, 0.0, 4).unwrap();
        for (b, v) in est.envelope.iter().enumerate() {
            assert!(*v >= est.bin_edges[b + 1]);
            assert!(*v <= 0.2 + 1e-15);
        }
        assert_eq!(*est.envelope.last().unwrap(), 0.2);
    }

    #[test]
    fn errors() {
        let cloud = FeatureCloud::new(vec![pt("a", 0.2, 0.2, 0.1)]).unwrap();
        let err = estimate_expansion(&cloud, 0.5, 4).unwrap_err();
        assert!(err.to_string().contains("delta too large"));
        assert!(estimate_expansion(&cloud, 0.0, 1).is_err());
        assert!(check_learnability(&cloud, 0.0, 0.0, 0.2).is_err());
        assert!(FeatureCloud::new(vec![pt("x", -0.1, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn verdict_examples() {
        let cloud = FeatureCloud::new(vec![pt("spurious", 0.01, 0.9, 0.0), pt("good", 0.02, 0.1, 0.5), pt("far", 0.4, 0.8, 0.5)]).unwrap();
        let v0 = check_learnability(&cloud, 0.0, 0.05, 0.2).unwrap();
        assert!(!v0.learnable);
        assert_eq!(v0.witnesses, vec!["spurious".to_string()]);
        let v1 = check_learnability(&cloud, 0.15, 0.05, 0.2).unwrap();
        assert!(v1.learnable);
        assert_eq!(v1.envelope_at_origin, 0.1);
        let empty = check_learnability(&FeatureCloud::default(), 0.0, 0.05, 0.2).unwrap();
        assert!(empty.learnable && empty.envelope_at_origin == 0.0);
    }

    #[test]
    fn build_cloud_matches_by_tag() {
        let m = |j: usize, v: f64, i: Option<f64>| FeatureMetrics {
            feature: FeatureRef::Index(j),
            variation: Some(v),
            informativeness: i,
            divergence: DivergenceKind::TotalVariation,
            domain_set: String::new(),
        };
        let avail = vec![m(0, 0.1, Some(0.5)), m(1, 0.0, Some(0.2)), m(2, 0.3, Some(0.0))];
        let all = vec![m(2, 0.6, None), m(0, 0.8, None), m(1, 0.05, None)];
        let cloud = build_cloud(&avail, &all).unwrap();
        assert_eq!(cloud.len(), 3);
        assert_eq!(cloud.points()[0], pt("0", 0.1, 0.8, 0.5));
        assert!(build_cloud(&avail, &all[..2]).is_err());
        let wrong = vec![m(0, 0.8, None), m(1, 0.05, None), m(5, 0.1, None)];
        assert!(build_cloud(&avail, &wrong).is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let cloud = FeatureCloud::new(vec![pt("a", 0.1, 0.4, 0.25), pt("b", 0.0, 0.5, 1.0)]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cloud.csv");
        std::fs::write(&p, cloud.to_csv()).unwrap();
        assert_eq!(FeatureCloud::read_csv(&p).unwrap(), cloud);
    }

    fn cloud_strategy() -> impl Strategy<Value = FeatureCloud> {
        prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 1..60).prop_map(|v| {
            FeatureCloud::new(
                v.into_iter()
                    .enumerate()
                    .map(|(i, (a, b, c))| pt(&i.to_string(), a, b, c))
                    .collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn envelope_properties(cloud in cloud_strategy(), d1 in 0.0f64..0.5, extra in 0.0f64..0.5, bins in 2usize..50) {
            let d2 = d1 + extra;
            let Ok(e1) = estimate_expansion(&cloud, d1, bins) else { return Ok(()) };
            for b in 0..bins {
                prop_assert!(e1.envelope[b] >= e1.bin_edges[b + 1]);
                if b > 0 { prop_assert!(e1.envelope[b] >= e1.envelope[b - 1]); }
            }
            for p in cloud.points().iter().filter(|p| p.informativeness >= d1) {
                prop_assert!(e1.eval(p.v_avail.max(1e-300)) >= p.v_all || p.v_avail == 0.0 && e1.envelope[0] >= p.v_all);
            }
            if let Ok(e2) = estimate_expansion(&cloud, d2, bins) {
                prop_assert_eq!(&e1.bin_edges, &e2.bin_edges);
                for (a, b) in e1.envelope.iter().zip(&e2.envelope) {
                    prop_assert!(b <= a);
                }
            }
            let v1 = check_learnability(&cloud, d1, 0.05, 0.2).unwrap();
            let v2 = check_learnability(&cloud, d2, 0.05, 0.2).unwrap();
            prop_assert_eq!(v1.learnable, v1.envelope_at_origin <= 0.2);
            prop_assert!(!v1.learnable || v2.learnable);
        }
    }
}
