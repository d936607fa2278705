//! Datasets of gallery images with identity labels and named feature channels.
//!
//! A dataset is described by a JSON manifest that lists the images (in a fixed
//! order) and the channels. Vector channels point at a headerless CSV with one
//! row per image; precomputed distance channels point at a CSV with one row per
//! probe (`probe_id, d_1, ..., d_N`).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the bin sum of a histogram channel.
pub const HISTOGRAM_SUM_TOL: f64 = 1e-6;

/// Standard deviations below this are treated as degenerate and left unscaled.
pub const DEGENERATE_SD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub id: String,
    pub person: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Vector,
    PrecomputedDistance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    Bhattacharyya,
}

/// A channel entry of the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub name: String,
    pub kind: ChannelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Metric>,
    #[serde(default)]
    pub standardize: bool,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub images: Vec<ImageRecord>,
    pub channels: Vec<ChannelSpec>,
}

/// Per-dimension gallery statistics used to standardize a vector channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    pub mean: Array1<f64>,
    pub sd: Array1<f64>,
}

impl Standardization {
    /// Two-pass population mean and standard deviation over the rows.
    pub fn fit(matrix: ArrayView2<'_, f64>) -> Self {
        let (n, d) = matrix.dim();
        let mut mean = Array1::zeros(d);
        let mut sd = Array1::zeros(d);
        if n == 0 {
            return Standardization { mean, sd };
        }
        for k in 0..d {
            let col = matrix.column(k);
            let m = col.iter().sum::<f64>() / n as f64;
            let var = col.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n as f64;
            mean[k] = m;
            sd[k] = var.sqrt();
        }
        Standardization { mean, sd }
    }

    fn transform_value(&self, k: usize, x: f64) -> f64 {
        let centered = x - self.mean[k];
        if self.sd[k] < DEGENERATE_SD {
            centered
        } else {
            centered / self.sd[k]
        }
    }

    pub fn apply_matrix(&self, matrix: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut out = matrix.to_owned();
        for mut row in out.rows_mut() {
            for (k, x) in row.iter_mut().enumerate() {
                *x = self.transform_value(k, *x);
            }
        }
        out
    }

    pub fn apply_vector(&self, v: ArrayView1<'_, f64>) -> Array1<f64> {
        v.iter().enumerate().map(|(k, &x)| self.transform_value(k, x)).collect()
    }
}

/// Standardizes gallery rows with their own statistics and maps the probe
/// through the same transform. The probe never contributes to the fit.
pub fn standardize_channel(
    matrix: ArrayView2<'_, f64>,
    probe: ArrayView1<'_, f64>,
) -> Result<(Array2<f64>, Array1<f64>)> {
    if probe.len() != matrix.ncols() {
        return Err(Error::DimensionMismatch {
            expected: matrix.ncols(),
            found: probe.len(),
        });
    }
    let stats = Standardization::fit(matrix);
    Ok((stats.apply_matrix(matrix), stats.apply_vector(probe)))
}

#[derive(Debug, Clone)]
pub struct VectorChannel {
    pub metric: Metric,
    /// Features as loaded, row `r` belongs to image `r`.
    pub raw: Array2<f64>,
    pub standardization: Option<Standardization>,
    /// Representation used by kernels: `raw` or its standardized copy.
    pub features: Array2<f64>,
}

impl VectorChannel {
    pub fn dim(&self) -> usize {
        self.raw.ncols()
    }

    /// Maps a raw probe vector into the kernel representation.
    pub fn transform_probe(&self, v: ArrayView1<'_, f64>) -> Array1<f64> {
        match &self.standardization {
            Some(s) => s.apply_vector(v),
            None => v.to_owned(),
        }
    }

    /// Gallery representation used by the unary distance. Histograms are
    /// always compared raw, Euclidean channels in the kernel representation.
    pub fn unary_features(&self) -> &Array2<f64> {
        match self.metric {
            Metric::Euclidean => &self.features,
            Metric::Bhattacharyya => &self.raw,
        }
    }
}

/// Probe-to-gallery distances, one row per registered probe.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    pub probes: Vec<String>,
    pub rows: Array2<f64>,
    index: HashMap<String, usize>,
}

impl DistanceTable {
    pub fn new(probes: Vec<String>, rows: Array2<f64>) -> Result<Self> {
        let mut index = HashMap::with_capacity(probes.len());
        for (r, p) in probes.iter().enumerate() {
            if index.insert(p.clone(), r).is_some() {
                return Err(Error::invalid(format!("duplicate probe row `{p}`")));
            }
        }
        Ok(DistanceTable { probes, rows, index })
    }

    pub fn row(&self, probe_id: &str) -> Option<ArrayView1<'_, f64>> {
        self.index.get(probe_id).map(|&r| self.rows.row(r))
    }
}

#[derive(Debug, Clone)]
pub enum ChannelData {
    Vector(VectorChannel),
    Precomputed(DistanceTable),
}

#[derive(Debug, Clone)]
pub struct Channel {
    pub spec: ChannelSpec,
    pub data: ChannelData,
}

impl Channel {
    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn as_vector(&self) -> Option<&VectorChannel> {
        match &self.data {
            ChannelData::Vector(v) => Some(v),
            ChannelData::Precomputed(_) => None,
        }
    }
}

/// An immutable, validated gallery.
#[derive(Debug, Clone)]
pub struct Dataset {
    images: Vec<ImageRecord>,
    channels: Vec<Channel>,
    image_index: HashMap<String, usize>,
}

/// A query record. Vectors are raw (unstandardized) features.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProbeQuery {
    pub probe_id: String,
    #[serde(default)]
    pub vectors: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub precomputed: BTreeMap<String, Vec<f64>>,
}

impl ProbeQuery {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn check_histogram_row(channel: &str, row: usize, v: ArrayView1<'_, f64>) -> Result<()> {
    if v.iter().any(|&x| x < 0.0) {
        return Err(Error::NegativeHistogram {
            channel: channel.to_string(),
            row,
        });
    }
    let sum: f64 = v.sum();
    if (sum - 1.0).abs() > HISTOGRAM_SUM_TOL {
        return Err(Error::HistogramNotNormalized {
            channel: channel.to_string(),
            row,
            sum,
        });
    }
    Ok(())
}

impl Dataset {
    /// Validates and assembles a dataset. `channels` pairs each spec with its
    /// data; standardization statistics are fitted here for flagged channels.
    pub fn new(images: Vec<ImageRecord>, channels: Vec<(ChannelSpec, RawChannel)>) -> Result<Self> {
        let mut image_index = HashMap::with_capacity(images.len());
        for (i, im) in images.iter().enumerate() {
            if im.person.is_empty() {
                return Err(Error::invalid(format!("image `{}` has an empty person id", im.id)));
            }
            if image_index.insert(im.id.clone(), i).is_some() {
                return Err(Error::DuplicateImage(im.id.clone()));
            }
        }
        let n = images.len();
        let mut seen = HashSet::new();
        let mut built = Vec::with_capacity(channels.len());
        for (spec, raw) in channels {
            if !seen.insert(spec.name.clone()) {
                return Err(Error::invalid(format!("duplicate channel `{}`", spec.name)));
            }
            let data = match (spec.kind, raw) {
                (ChannelKind::Vector, RawChannel::Matrix(m)) => ChannelData::Vector(build_vector_channel(&spec, m, n)?),
                (ChannelKind::PrecomputedDistance, RawChannel::Distances(t)) => {
                    validate_distances(&spec.name, &t, n)?;
                    ChannelData::Precomputed(t)
                }
                _ => {
                    return Err(Error::invalid(format!(
                        "channel `{}`: data does not match its kind",
                        spec.name
                    )))
                }
            };
            built.push(Channel { spec, data });
        }
        Ok(Dataset {
            images,
            channels: built,
            image_index,
        })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[ImageRecord] {
        &self.images
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel(&self, name: &str) -> Result<&Channel> {
        self.channels
            .iter()
            .find(|c| c.spec.name == name)
            .ok_or_else(|| Error::UnknownChannel(name.to_string()))
    }

    pub fn vector_channel(&self, name: &str) -> Result<&VectorChannel> {
        self.channel(name)?
            .as_vector()
            .ok_or_else(|| Error::NotAVectorChannel(name.to_string()))
    }

    pub fn image_index(&self, id: &str) -> Option<usize> {
        self.image_index.get(id).copied()
    }

    /// Distinct person ids in order of first appearance.
    pub fn persons(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        self.images
            .iter()
            .filter(|im| seen.insert(im.person.as_str()))
            .map(|im| im.person.clone())
            .collect()
    }

    /// Image indices grouped by person, in manifest order.
    pub fn images_by_person(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut map: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, im) in self.images.iter().enumerate() {
            map.entry(im.person.as_str()).or_default().push(i);
        }
        map
    }

    /// Builds a probe query from a dataset image: its raw vectors plus its
    /// precomputed-distance rows where the tables register it.
    pub fn probe_from_image(&self, index: usize) -> Result<ProbeQuery> {
        let image = self.images.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.images.len(),
        })?;
        let mut probe = ProbeQuery {
            probe_id: image.id.clone(),
            ..ProbeQuery::default()
        };
        for channel in &self.channels {
            match &channel.data {
                ChannelData::Vector(v) => {
                    probe
                        .vectors
                        .insert(channel.spec.name.clone(), v.raw.row(index).to_vec());
                }
                ChannelData::Precomputed(t) => {
                    if let Some(row) = t.row(&image.id) {
                        probe.precomputed.insert(channel.spec.name.clone(), row.to_vec());
                    }
                }
            }
        }
        Ok(probe)
    }

    /// Returns a dataset with images (and all aligned rows and distance
    /// columns) reordered so that new row `r` is old row `order[r]`.
    /// Standardization statistics are refitted, which leaves them unchanged
    /// up to summation order.
    pub fn permuted(&self, order: &[usize]) -> Result<Dataset> {
        let n = self.len();
        let mut check = order.to_vec();
        check.sort_unstable();
        if check != (0..n).collect::<Vec<_>>() {
            return Err(Error::invalid("not a permutation of the image list"));
        }
        let images = order.iter().map(|&i| self.images[i].clone()).collect();
        let channels = self
            .channels
            .iter()
            .map(|c| {
                let raw = match &c.data {
                    ChannelData::Vector(v) => RawChannel::Matrix(v.raw.select(ndarray::Axis(0), order)),
                    ChannelData::Precomputed(t) => RawChannel::Distances(
                        DistanceTable::new(t.probes.clone(), t.rows.select(ndarray::Axis(1), order))
                            .expect("probe ids already unique"),
                    ),
                };
                (c.spec.clone(), raw)
            })
            .collect();
        Dataset::new(images, channels)
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            images: self.images.clone(),
            channels: self.channels.iter().map(|c| c.spec.clone()).collect(),
        }
    }
}

/// Channel payload prior to validation.
#[derive(Debug, Clone)]
pub enum RawChannel {
    Matrix(Array2<f64>),
    Distances(DistanceTable),
}

fn build_vector_channel(spec: &ChannelSpec, raw: Array2<f64>, n: usize) -> Result<VectorChannel> {
    let name = spec.name.as_str();
    let dim = spec
        .dim
        .filter(|&d| d > 0)
        .ok_or_else(|| Error::invalid(format!("channel `{name}`: vector channels need a positive dim")))?;
    let metric = spec
        .metric
        .ok_or_else(|| Error::invalid(format!("channel `{name}`: vector channels need a metric")))?;
    if raw.nrows() != n {
        return Err(Error::RowCountMismatch {
            channel: name.to_string(),
            expected: n,
            found: raw.nrows(),
        });
    }
    if raw.ncols() != dim {
        return Err(Error::RowWidthMismatch {
            channel: name.to_string(),
            row: 0,
            expected: dim,
            found: raw.ncols(),
        });
    }
    for (r, row) in raw.rows().into_iter().enumerate() {
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                channel: name.to_string(),
                row: r,
            });
        }
        if metric == Metric::Bhattacharyya {
            check_histogram_row(name, r, row)?;
        }
    }
    let standardization = spec.standardize.then(|| Standardization::fit(raw.view()));
    let features = match &standardization {
        Some(s) => s.apply_matrix(raw.view()),
        None => raw.clone(),
    };
    Ok(VectorChannel {
        metric,
        raw,
        standardization,
        features,
    })
}

fn validate_distances(name: &str, table: &DistanceTable, n: usize) -> Result<()> {
    if table.rows.ncols() != n {
        return Err(Error::RowCountMismatch {
            channel: name.to_string(),
            expected: n,
            found: table.rows.ncols(),
        });
    }
    for (r, row) in table.rows.rows().into_iter().enumerate() {
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                channel: name.to_string(),
                row: r,
            });
        }
        if row.iter().any(|&x| x < 0.0) {
            return Err(Error::invalid(format!("channel `{name}`, row {r}: negative distance")));
        }
    }
    Ok(())
}

fn csv_reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn parse_f64(path: &Path, line: usize, field: &str) -> Result<f64> {
    field.parse::<f64>().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("not a number: `{field}`"),
    })
}

/// Reads a headerless numeric CSV. All rows must have `dim` columns.
pub fn read_matrix_csv(path: &Path, channel: &str, dim: usize) -> Result<Array2<f64>> {
    let mut reader = csv_reader(path)?;
    let mut data = Vec::new();
    let mut rows = 0;
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        if record.len() != dim {
            return Err(Error::RowWidthMismatch {
                channel: channel.to_string(),
                row: r,
                expected: dim,
                found: record.len(),
            });
        }
        for field in record.iter() {
            data.push(parse_f64(path, r + 1, field)?);
        }
        rows += 1;
    }
    Ok(Array2::from_shape_vec((rows, dim), data).expect("shape checked per row"))
}

/// Reads a precomputed distance CSV: `probe_id, d_1, ..., d_n` per line.
pub fn read_distance_csv(path: &Path, channel: &str, n: usize) -> Result<DistanceTable> {
    let mut reader = csv_reader(path)?;
    let mut probes = Vec::new();
    let mut data = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        if record.len() != n + 1 {
            return Err(Error::RowCountMismatch {
                channel: channel.to_string(),
                expected: n,
                found: record.len().saturating_sub(1),
            });
        }
        probes.push(record[0].to_string());
        for field in record.iter().skip(1) {
            data.push(parse_f64(path, r + 1, field)?);
        }
    }
    let rows = Array2::from_shape_vec((probes.len(), n), data).expect("shape checked per row");
    DistanceTable::new(probes, rows)
}

pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a manifest and every channel file it references (paths are relative
/// to the manifest's directory).
pub fn load_dataset(manifest_path: &Path) -> Result<Dataset> {
    let manifest = load_manifest(manifest_path)?;
    let base = manifest_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let n = manifest.images.len();
    let mut channels = Vec::with_capacity(manifest.channels.len());
    for spec in manifest.channels {
        let path = base.join(&spec.file);
        let raw = match spec.kind {
            ChannelKind::Vector => {
                let dim = spec.dim.filter(|&d| d > 0).ok_or_else(|| {
                    Error::invalid(format!("channel `{}`: vector channels need a positive dim", spec.name))
                })?;
                RawChannel::Matrix(read_matrix_csv(&path, &spec.name, dim)?)
            }
            ChannelKind::PrecomputedDistance => RawChannel::Distances(read_distance_csv(&path, &spec.name, n)?),
        };
        channels.push((spec, raw));
    }
    Dataset::new(manifest.images, channels)
}

pub(crate) fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub(crate) fn format_row<'a>(values: impl IntoIterator<Item = &'a f64>) -> String {
    values.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Writes the manifest and channel files into `dir`; returns the manifest path.
/// Floats are written in shortest round-trip form so a reload is bit-exact.
pub fn save_dataset(dataset: &Dataset, dir: &Path) -> Result<PathBuf> {
    let manifest = dataset.manifest();
    for channel in dataset.channels() {
        let mut out = String::new();
        match &channel.data {
            ChannelData::Vector(v) => {
                for row in v.raw.rows() {
                    out.push_str(&format_row(row.iter()));
                    out.push('\n');
                }
            }
            ChannelData::Precomputed(t) => {
                for (probe, row) in t.probes.iter().zip(t.rows.rows()) {
                    out.push_str(probe);
                    out.push(',');
                    out.push_str(&format_row(row.iter()));
                    out.push('\n');
                }
            }
        }
        write_file(&dir.join(&channel.spec.file), out.as_bytes())?;
    }
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&path, json.as_bytes())?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn vector_spec(name: &str, dim: usize, metric: Metric, standardize: bool) -> ChannelSpec {
        ChannelSpec {
            name: name.into(),
            kind: ChannelKind::Vector,
            dim: Some(dim),
            metric: Some(metric),
            standardize,
            file: format!("{name}.csv"),
        }
    }

    fn images(n: usize) -> Vec<ImageRecord> {
        (0..n)
            .map(|i| ImageRecord {
                id: format!("img{i}"),
                person: format!("p{}", i / 2),
            })
            .collect()
    }

    #[test]
    fn standardize_two_rows() {
        let (g, p) = standardize_channel(array![[0.0], [2.0]].view(), array![1.0].view()).unwrap();
        assert_eq!(g, array![[-1.0], [1.0]]);
        assert_eq!(p, array![0.0]);
    }

    #[test]
    fn standardize_constant_column_is_only_centered() {
        let (g, p) = standardize_channel(array![[5.0], [5.0], [5.0]].view(), array![7.0].view()).unwrap();
        assert_eq!(g, array![[0.0], [0.0], [0.0]]);
        assert_eq!(p, array![2.0]);
    }

    #[test]
    fn standardize_matches_hand_statistics() {
        // Column 0: mean 2, population sd 1. Column 1: mean 2, sd 2.
        let (g, p) = standardize_channel(array![[1.0, 0.0], [3.0, 4.0]].view(), array![2.0, 2.0].view()).unwrap();
        let mean = [2.0, 2.0];
        let sd = [1.0, 2.0];
        let raw = [[1.0, 0.0], [3.0, 4.0]];
        for r in 0..2 {
            for k in 0..2 {
                assert!((g[[r, k]] - (raw[r][k] - mean[k]) / sd[k]).abs() < 1e-15);
            }
        }
        assert_eq!(p, array![0.0, 0.0]);
    }

    #[test]
    fn standardize_rejects_probe_of_wrong_length() {
        let err = standardize_channel(array![[0.0], [2.0]].view(), array![1.0, 2.0].view());
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dataset_rejects_unnormalized_histogram() {
        let err = Dataset::new(
            images(1),
            vec![(
                vector_spec("hist", 2, Metric::Bhattacharyya, false),
                RawChannel::Matrix(array![[0.5, 0.6]]),
            )],
        )
        .unwrap_err();
        assert!(err.to_string().contains("histogram not normalized"), "{err}");
        assert!(err.to_string().contains("hist"));
    }

    #[test]
    fn dataset_rejects_row_mismatch_and_nan() {
        let err = Dataset::new(
            images(3),
            vec![(
                vector_spec("f", 1, Metric::Euclidean, false),
                RawChannel::Matrix(array![[0.0], [1.0]]),
            )],
        )
        .unwrap_err();
        assert!(err.to_string().contains("row count mismatch"), "{err}");

        let err = Dataset::new(
            images(2),
            vec![(
                vector_spec("f", 1, Metric::Euclidean, false),
                RawChannel::Matrix(array![[0.0], [f64::NAN]]),
            )],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 1, .. }));
    }

    #[test]
    fn dataset_rejects_duplicate_ids() {
        let mut ims = images(2);
        ims[1].id = ims[0].id.clone();
        assert!(matches!(Dataset::new(ims, vec![]), Err(Error::DuplicateImage(_))));
    }

    #[test]
    fn restandardizing_is_idempotent() {
        let raw = array![[1.0, 10.0], [2.0, -3.0], [7.5, 0.25], [-4.0, 2.0]];
        let once = Standardization::fit(raw.view()).apply_matrix(raw.view());
        let twice = Standardization::fit(once.view()).apply_matrix(once.view());
        for (a, b) in once.iter().zip(twice.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn probe_from_image_collects_all_channels() {
        let table = DistanceTable::new(vec!["img1".into()], array![[0.3, 0.0]]).unwrap();
        let ds = Dataset::new(
            images(2),
            vec![
                (
                    vector_spec("f", 2, Metric::Euclidean, true),
                    RawChannel::Matrix(array![[0.0, 1.0], [2.0, 3.0]]),
                ),
                (
                    ChannelSpec {
                        name: "mscr".into(),
                        kind: ChannelKind::PrecomputedDistance,
                        dim: None,
                        metric: None,
                        standardize: false,
                        file: "mscr.csv".into(),
                    },
                    RawChannel::Distances(table),
                ),
            ],
        )
        .unwrap();
        let p = ds.probe_from_image(1).unwrap();
        assert_eq!(p.vectors["f"], vec![2.0, 3.0]);
        assert_eq!(p.precomputed["mscr"], vec![0.3, 0.0]);
        assert!(ds.probe_from_image(0).unwrap().precomputed.is_empty());
    }
}
