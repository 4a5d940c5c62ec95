//! Feature dumps (OODF binary and CSV), model manifests and domain splits.
//!
//! OODF layout, little-endian:
//!
//! | field      | type              |
//! |------------|-------------------|
//! | magic      | `b"OODF"`         |
//! | version    | u32 = 1           |
//! | n_samples  | u64               |
//! | d          | u32               |
//! | K          | u32               |
//! | n_domains  | u32               |
//! | features   | n·d f32 row-major |
//! | labels     | n u16, 1-based    |
//! | domains    | n u16             |

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"OODF";
pub const VERSION: u32 = 1;
const HEADER_LEN: u64 = 28;

/// An n×d feature matrix with a class label and a domain id per row.
///
/// Values are held as `f32`, the storage precision; every consumer widens
/// to `f64` before doing arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDataset {
    d: usize,
    k: u32,
    features: Vec<f32>,
    labels: Vec<u16>,
    domains: Vec<u16>,
    domain_ids: Vec<u16>,
}

impl FeatureDataset {
    /// Builds a dataset and checks every invariant. `labels` are 1-based.
    pub fn new(
        d: usize,
        k: u32,
        features: Vec<f32>,
        labels: Vec<u16>,
        domains: Vec<u16>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::invalid("dataset has no samples"));
        }
        if d == 0 {
            return Err(Error::invalid("feature dimension must be at least 1"));
        }
        if k < 2 || k > u32::from(u16::MAX) {
            return Err(Error::invalid(format!("class count K = {k} outside 2..=65535")));
        }
        if domains.len() != n || features.len() != n * d {
            return Err(Error::invalid(format!(
                "array lengths disagree: {} labels, {} domains, {} feature values for d = {d}",
                n,
                domains.len(),
                features.len()
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                record: pos / d,
                feature: pos % d,
            });
        }
        if let Some((record, &label)) = labels
            .iter()
            .enumerate()
            .find(|(_, &l)| l == 0 || u32::from(l) > k)
        {
            return Err(Error::LabelOutOfRange { record, label, k });
        }
        let domain_ids: Vec<u16> = domains.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        Ok(Self {
            d,
            k,
            features,
            labels,
            domains,
            domain_ids,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n_classes(&self) -> u32 {
        self.k
    }

    pub fn features(&self) -> &[f32] {
        &self.features
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    pub fn domains(&self) -> &[u16] {
        &self.domains
    }

    /// Sorted distinct domain ids.
    pub fn domain_ids(&self) -> &[u16] {
        &self.domain_ids
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    /// Column `j` widened to `f64`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        assert!(j < self.d, "feature index {j} out of range for d = {}", self.d);
        self.features
            .iter()
            .skip(j)
            .step_by(self.d)
            .map(|&v| f64::from(v))
            .collect()
    }

    /// `β·h(x)` for every row.
    pub fn project(&self, coefficients: &[f64]) -> Vec<f64> {
        assert_eq!(coefficients.len(), self.d, "direction length must equal d");
        self.features
            .chunks_exact(self.d)
            .map(|row| {
                row.iter()
                    .zip(coefficients)
                    .map(|(&x, &b)| f64::from(x) * b)
                    .sum()
            })
            .collect()
    }
}

/// Available and full domain sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainSplit {
    avail: BTreeSet<u16>,
    all: BTreeSet<u16>,
}

impl DomainSplit {
    pub fn new(avail: impl IntoIterator<Item = u16>, all: impl IntoIterator<Item = u16>) -> Result<Self> {
        let avail: BTreeSet<u16> = avail.into_iter().collect();
        let mut all: BTreeSet<u16> = all.into_iter().collect();
        if avail.is_empty() {
            return Err(Error::invalid("available domain set is empty"));
        }
        if !avail.is_subset(&all) {
            let missing: Vec<_> = avail.difference(&all).collect();
            return Err(Error::invalid(format!(
                "available domains {missing:?} are not in the full domain set"
            )));
        }
        all.extend(avail.iter().copied());
        Ok(Self { avail, all })
    }

    pub fn avail(&self) -> &BTreeSet<u16> {
        &self.avail
    }

    pub fn all(&self) -> &BTreeSet<u16> {
        &self.all
    }
}

fn read_u32(buf: &[u8], off: usize) -> u32 {
    u32::from_le_bytes(buf[off..off + 4].try_into().unwrap())
}

/// Parses an OODF image held in memory.
pub fn decode_oodf(buf: &[u8]) -> Result<FeatureDataset> {
    if (buf.len() as u64) < HEADER_LEN {
        if buf.len() >= 4 && &buf[..4] != MAGIC {
            return Err(Error::Format {
                offset: 0,
                message: "missing OODF magic".into(),
            });
        }
        return Err(Error::Truncated {
            offset: buf.len() as u64,
            expected: HEADER_LEN - buf.len() as u64,
        });
    }
    if &buf[..4] != MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: "missing OODF magic".into(),
        });
    }
    let version = read_u32(buf, 4);
    if version != VERSION {
        return Err(Error::Format {
            offset: 4,
            message: format!("unsupported version {version}"),
        });
    }
    let n = u64::from_le_bytes(buf[8..16].try_into().unwrap());
    let d = read_u32(buf, 16);
    let k = read_u32(buf, 20);
    let n_domains = read_u32(buf, 24);
    if n == 0 {
        return Err(Error::Format {
            offset: 8,
            message: "n_samples is zero".into(),
        });
    }
    if d == 0 {
        return Err(Error::Format {
            offset: 16,
            message: "feature dimension is zero".into(),
        });
    }
    if !(2..=u32::from(u16::MAX)).contains(&k) {
        return Err(Error::Format {
            offset: 20,
            message: format!("class count {k} outside 2..=65535"),
        });
    }
    if n_domains == 0 || n_domains > u32::from(u16::MAX) + 1 {
        return Err(Error::Format {
            offset: 24,
            message: format!("domain count {n_domains} out of range"),
        });
    }

    let payload = n
        .checked_mul(u64::from(d))
        .and_then(|nd| nd.checked_mul(4))
        .and_then(|b| b.checked_add(n.checked_mul(4)?))
        .ok_or_else(|| Error::Format {
            offset: 8,
            message: "header sizes overflow".into(),
        })?;
    let have = buf.len() as u64 - HEADER_LEN;
    if have < payload {
        return Err(Error::Truncated {
            offset: buf.len() as u64,
            expected: payload - have,
        });
    }
    if have > payload {
        return Err(Error::Format {
            offset: HEADER_LEN + payload,
            message: format!("{} trailing bytes after payload", have - payload),
        });
    }

    let n = n as usize;
    let d = d as usize;
    let mut off = HEADER_LEN as usize;
    let features: Vec<f32> = buf[off..off + n * d * 4]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    off += n * d * 4;
    let labels: Vec<u16> = buf[off..off + n * 2]
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes(c.try_into().unwrap()))
        .collect();
    off += n * 2;
    let domains: Vec<u16> = buf[off..off + n * 2]
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes(c.try_into().unwrap()))
        .collect();

    let ds = FeatureDataset::new(d, k, features, labels, domains)?;
    if ds.domain_ids.len() as u32 != n_domains {
        return Err(Error::Format {
            offset: 24,
            message: format!(
                "header declares {n_domains} domains but {} distinct ids are present",
                ds.domain_ids.len()
            ),
        });
    }
    Ok(ds)
}

/// Serializes a dataset to its OODF image.
pub fn encode_oodf(ds: &FeatureDataset) -> Vec<u8> {
    let n = ds.n_samples();
    let mut out = Vec::with_capacity(HEADER_LEN as usize + n * (ds.d * 4 + 4));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&(ds.d as u32).to_le_bytes());
    out.extend_from_slice(&ds.k.to_le_bytes());
    out.extend_from_slice(&(ds.domain_ids.len() as u32).to_le_bytes());
    for v in &ds.features {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for l in &ds.labels {
        out.extend_from_slice(&l.to_le_bytes());
    }
    for e in &ds.domains {
        out.extend_from_slice(&e.to_le_bytes());
    }
    out
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Loads an OODF file, or a CSV fixture when the path ends in `.csv`.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<FeatureDataset> {
    let path = path.as_ref();
    if is_csv(path) {
        return load_csv(path);
    }
    let buf = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_oodf(&buf)
}

/// Writes `ds` atomically. A `.csv` extension selects the CSV fixture format.
pub fn write_dataset(ds: &FeatureDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = if is_csv(path) {
        encode_csv(ds)?
    } else {
        encode_oodf(ds)
    };
    atomic_write(path, &bytes)
}

fn encode_csv(ds: &FeatureDataset) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (0..ds.d).map(|j| format!("f{j}")).collect();
    header.push("label".into());
    header.push("domain".into());
    w.write_record(&header)?;
    for i in 0..ds.n_samples() {
        let mut rec: Vec<String> = ds.row(i).iter().map(|v| v.to_string()).collect();
        rec.push(ds.labels[i].to_string());
        rec.push(ds.domains[i].to_string());
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| Error::invalid(e.to_string()))
}

/// CSV fixtures: header `f0,...,f{d-1},label,domain`; K is the largest label seen.
pub fn load_csv(path: &Path) -> Result<FeatureDataset> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::invalid(format!("{other:?}")),
    })?;
    let header = rdr.headers()?.clone();
    let cols = header.len();
    if cols < 3 {
        return Err(Error::invalid("csv needs at least one feature column plus label and domain"));
    }
    let d = cols - 2;
    for (j, name) in header.iter().take(d).enumerate() {
        if name.trim() != format!("f{j}") {
            return Err(Error::invalid(format!("csv header column {j} is {name:?}, expected f{j}")));
        }
    }
    if header[d].trim() != "label" || header[d + 1].trim() != "domain" {
        return Err(Error::invalid("csv header must end with label,domain"));
    }
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut domains = Vec::new();
    for (record, row) in rdr.records().enumerate() {
        let row = row?;
        for j in 0..d {
            let v: f32 = row[j]
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("record {record}: bad feature value {:?}", &row[j])))?;
            features.push(v);
        }
        let label: u16 = row[d]
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("record {record}: bad label {:?}", &row[d])))?;
        let domain: u16 = row[d + 1]
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("record {record}: bad domain {:?}", &row[d + 1])))?;
        labels.push(label);
        domains.push(domain);
    }
    let k = labels.iter().copied().max().map(u32::from).unwrap_or(0);
    FeatureDataset::new(d, k.max(2), features, labels, domains)
}

/// Writes through a temp file in the destination directory, then renames.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if path.as_os_str().is_empty() {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidInput, "empty path"),
        ));
    }
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Per-split feature files for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureFiles {
    pub avail: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub model_id: String,
    pub feature_file: FeatureFiles,
    pub val_accuracy: f64,
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelManifest {
    pub entries: Vec<ManifestEntry>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ManifestDoc {
    Wrapped { models: Vec<ManifestEntry> },
    Bare(Vec<ManifestEntry>),
}

impl ModelManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(e.model_id.as_str()) {
                return Err(Error::Manifest(format!("duplicate model_id {:?}", e.model_id)));
            }
            if !e.val_accuracy.is_finite() || !(0.0..=1.0).contains(&e.val_accuracy) {
                return Err(Error::Manifest(format!(
                    "model {:?}: val_accuracy {} outside [0, 1]",
                    e.model_id, e.val_accuracy
                )));
            }
        }
        Ok(Self { entries })
    }

    /// Parses a manifest document: either `{"models": [...]}` or a bare array.
    pub fn from_json(text: &str) -> Result<Self> {
        let entries = match serde_json::from_str::<ManifestDoc>(text)? {
            ManifestDoc::Wrapped { models } => models,
            ManifestDoc::Bare(models) => models,
        };
        Self::new(entries)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            models: &'a [ManifestEntry],
        }
        serde_json::to_string_pretty(&Doc { models: &self.entries }).expect("manifest serializes")
    }

    /// Rewrites relative feature paths against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        for e in &mut self.entries {
            if e.feature_file.avail.is_relative() {
                e.feature_file.avail = base.join(&e.feature_file.avail);
            }
            if let Some(all) = e.feature_file.all.as_mut() {
                if all.is_relative() {
                    *all = base.join(&*all);
                }
            }
        }
    }
}

/// Loads and validates a manifest. Feature paths are resolved relative to
/// the manifest's directory but the files themselves are not opened.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<ModelManifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut m = ModelManifest::from_json(&text)?;
    if let Some(base) = path.parent() {
        m.resolve_paths(base);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FeatureDataset {
        FeatureDataset::new(
            2,
            2,
            vec![0.5, -1.0, 1.5, 2.0, -0.25, 0.0, 3.0, 1.0],
            vec![1, 2, 1, 2],
            vec![0, 0, 1, 1],
        )
        .unwrap()
    }

    #[test]
    fn roundtrip_small() {
        let ds = small();
        let back = decode_oodf(&encode_oodf(&ds)).unwrap();
        assert_eq!(back, ds);
        assert_eq!(back.n_samples(), 4);
        assert_eq!(back.dim(), 2);
        assert_eq!(back.domain_ids(), &[0, 1]);
    }

    #[test]
    fn minimal_record() {
        let ds = FeatureDataset::new(1, 2, vec![7.0], vec![1], vec![3]).unwrap();
        let bytes = encode_oodf(&ds);
        assert_eq!(bytes.len(), 28 + 4 + 2 + 2);
        assert_eq!(decode_oodf(&bytes).unwrap(), ds);
    }

    #[test]
    fn label_out_of_range_reports_record() {
        let mut bytes = encode_oodf(&small());
        // labels start after the header and 8 f32 values
        let label_off = 28 + 8 * 4 + 2 * 2;
        bytes[label_off..label_off + 2].copy_from_slice(&3u16.to_le_bytes());
        let err = decode_oodf(&bytes).unwrap_err();
        assert!(matches!(err, Error::LabelOutOfRange { record: 2, label: 3, k: 2 }), "{err}");
        assert!(err.to_string().contains("label out of range at record 2"));
    }

    #[test]
    fn truncated_mid_features() {
        let bytes = encode_oodf(&small());
        let err = decode_oodf(&bytes[..28 + 10]).unwrap_err();
        assert!(matches!(err, Error::Truncated { .. }), "{err}");
        assert!(err.to_string().contains("truncated payload"));
    }

    #[test]
    fn bad_magic_and_trailing_bytes() {
        let mut bytes = encode_oodf(&small());
        bytes.push(0);
        assert!(matches!(decode_oodf(&bytes), Err(Error::Format { .. })));
        bytes.pop();
        bytes[0] = b'X';
        assert!(matches!(decode_oodf(&bytes), Err(Error::Format { offset: 0, .. })));
    }

    #[test]
    fn non_finite_rejected() {
        let err = FeatureDataset::new(2, 2, vec![0.0, f32::NAN], vec![1], vec![0]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { record: 0, feature: 1 }));
    }

    #[test]
    fn domain_count_must_match_header() {
        let mut bytes = encode_oodf(&small());
        bytes[24..28].copy_from_slice(&3u32.to_le_bytes());
        assert!(matches!(decode_oodf(&bytes), Err(Error::Format { offset: 24, .. })));
    }

    #[test]
    fn csv_roundtrip_and_header_check() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("fixture.csv");
        let ds = small();
        write_dataset(&ds, &p).unwrap();
        assert_eq!(load_dataset(&p).unwrap(), ds);

        std::fs::write(&p, "a,b,label,domain\n1,2,1,0\n").unwrap();
        assert!(load_dataset(&p).is_err());
    }

    #[test]
    fn write_to_missing_dir_is_io_error() {
        let err = write_dataset(&small(), "/nonexistent/dir/x.oodf").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(matches!(write_dataset(&small(), ""), Err(Error::Io { .. })));
    }

    #[test]
    fn manifest_parsing() {
        let doc = r#"{"models": [
            {"model_id": "a", "feature_file": {"avail": "a.oodf"}, "val_accuracy": 0.85, "metadata": {"lr": 0.001}},
            {"model_id": "b", "feature_file": {"avail": "b.oodf", "all": "b_all.oodf"}, "val_accuracy": 0.88}
        ]}"#;
        let m = ModelManifest::from_json(doc).unwrap();
        assert_eq!(m.entries.len(), 2);
        assert_eq!(m.entries[1].feature_file.all.as_deref(), Some(Path::new("b_all.oodf")));

        let dup = r#"[{"model_id": "a", "feature_file": {"avail": "a"}, "val_accuracy": 0.5},
                      {"model_id": "a", "feature_file": {"avail": "b"}, "val_accuracy": 0.6}]"#;
        assert!(matches!(ModelManifest::from_json(dup), Err(Error::Manifest(_))));

        let bad = r#"[{"model_id": "a", "feature_file": {"avail": "a"}, "val_accuracy": 1.2}]"#;
        assert!(matches!(ModelManifest::from_json(bad), Err(Error::Manifest(_))));
    }

    #[test]
    fn manifest_paths_resolve_lazily() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        std::fs::write(&p, r#"[{"model_id": "a", "feature_file": {"avail": "missing.oodf"}, "val_accuracy": 0.5}]"#).unwrap();
        let m = load_manifest(&p).unwrap();
        assert_eq!(m.entries[0].feature_file.avail, dir.path().join("missing.oodf"));
    }

    #[test]
    fn domain_split_rules() {
        assert!(DomainSplit::new([0, 1], [0, 1, 2]).is_ok());
        assert!(DomainSplit::new([], [0]).is_err());
        assert!(DomainSplit::new([5], [0, 1]).is_err());
    }
}
