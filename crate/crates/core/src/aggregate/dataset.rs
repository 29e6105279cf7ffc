//! Sample sets and their on-disk form: a CSV with header `x1,...,xk,z` and a
//! sidecar manifest `<stem>.manifest.json`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algebra::{Field, FieldKind, Fp, Modulus, PolyJson, Rational};

use super::DataError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Clean,
    Noisy,
    Corrupt,
}

/// Ordered samples `(x, z)` with `x` in `k` coordinates.
///
/// `indices[i]` is the row of sample `i` in the set it was first read or
/// generated as, so filtered subsets still point back at the original rows.
#[derive(Clone, Debug, PartialEq)]
pub struct DataSet<F: Field> {
    ctx: F::Ctx,
    dim: usize,
    points: Vec<Vec<F>>,
    values: Vec<F>,
    indices: Vec<usize>,
    labels: Option<Vec<Label>>,
    pub truth: Option<PolyJson>,
    pub seed: Option<u64>,
}

impl<F: Field> DataSet<F> {
    pub fn new(ctx: F::Ctx, dim: usize, points: Vec<Vec<F>>, values: Vec<F>) -> Result<Self, DataError> {
        if dim == 0 {
            return Err(DataError::Invalid("datasets need at least one coordinate".into()));
        }
        if points.len() != values.len() {
            return Err(DataError::Invalid(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.len() != dim) {
            return Err(DataError::Invalid(format!(
                "row {i} has {} coordinates, expected {dim}",
                p.len()
            )));
        }
        let indices = (0..points.len()).collect();
        Ok(DataSet {
            ctx,
            dim,
            points,
            values,
            indices,
            labels: None,
            truth: None,
            seed: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<Label>) -> Result<Self, DataError> {
        if labels.len() != self.len() {
            return Err(DataError::Invalid(format!(
                "{} labels for {} rows",
                labels.len(),
                self.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn ctx(&self) -> &F::Ctx {
        &self.ctx
    }

    pub fn kind(&self) -> FieldKind {
        F::kind(&self.ctx)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, i: usize) -> &[F] {
        &self.points[i]
    }

    pub fn value(&self, i: usize) -> &F {
        &self.values[i]
    }

    pub fn points(&self) -> &[Vec<F>] {
        &self.points
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> Option<Label> {
        self.labels.as_ref().map(|l| l[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[F], &F)> {
        self.points.iter().map(|p| p.as_slice()).zip(&self.values)
    }

    /// Rows at the given positions, keeping original indices and labels.
    pub fn subset(&self, positions: &[usize]) -> Self {
        DataSet {
            ctx: self.ctx.clone(),
            dim: self.dim,
            points: positions.iter().map(|&i| self.points[i].clone()).collect(),
            values: positions.iter().map(|&i| self.values[i].clone()).collect(),
            indices: positions.iter().map(|&i| self.indices[i]).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| positions.iter().map(|&i| l[i]).collect()),
            truth: self.truth.clone(),
            seed: self.seed,
        }
    }

    /// Same rows, values replaced.
    pub fn with_values(&self, values: Vec<F>) -> Result<Self, DataError> {
        if values.len() != self.len() {
            return Err(DataError::Invalid("value count changed".into()));
        }
        Ok(DataSet {
            values,
            ..self.clone()
        })
    }

    pub(crate) fn set_indices(&mut self, indices: Vec<usize>) {
        assert_eq!(indices.len(), self.len());
        self.indices = indices;
    }

    pub fn manifest(&self) -> Manifest {
        let kind = self.kind();
        Manifest {
            k: self.dim,
            field: kind.tag().into(),
            modulus: kind.modulus(),
            truth: self.truth.clone(),
            labels: self.labels.clone(),
            seed: self.seed,
            indices: if self.indices.iter().enumerate().all(|(i, &j)| i == j) {
                None
            } else {
                Some(self.indices.clone())
            },
        }
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for a in 1..=self.dim {
            out.push_str(&format!("x{a},"));
        }
        out.push_str("z\n");
        for (p, z) in self.iter() {
            for c in p {
                out.push_str(&c.to_string());
                out.push(',');
            }
            out.push_str(&z.to_string());
            out.push('\n');
        }
        out
    }

    /// Writes the CSV and its manifest, each atomically.
    pub fn write(&self, path: &Path) -> Result<(), DataError> {
        write_atomic(path, self.to_csv_string().as_bytes())?;
        let manifest = serde_json::to_string_pretty(&self.manifest())?;
        write_atomic(&manifest_path(path), manifest.as_bytes())
    }

    pub fn from_csv_str(text: &str, ctx: &F::Ctx, manifest: Option<&Manifest>) -> Result<Self, DataError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let headers = rdr.headers()?.clone();
        let cols = headers.len();
        if cols < 2 || headers.get(cols - 1) != Some("z") {
            return Err(DataError::Invalid(format!(
                "header must be x1,...,xk,z; got {:?}",
                headers.iter().collect::<Vec<_>>()
            )));
        }
        let dim = cols - 1;
        if let Some(m) = manifest {
            if m.k != dim {
                return Err(DataError::Invalid(format!("manifest says k={} but CSV has {dim}", m.k)));
            }
        }
        let mut points = Vec::new();
        let mut values = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |s: &str| {
                F::parse(s, ctx).map_err(|e| DataError::Invalid(format!("row {}: {e}", row + 1)))
            };
            let mut p = Vec::with_capacity(dim);
            for a in 0..dim {
                p.push(parse(&rec[a])?);
            }
            points.push(p);
            values.push(parse(&rec[dim])?);
        }
        let mut ds = DataSet::new(ctx.clone(), dim, points, values)?;
        if let Some(m) = manifest {
            if let Some(l) = &m.labels {
                ds = ds.with_labels(l.clone())?;
            }
            if let Some(ix) = &m.indices {
                if ix.len() != ds.len() {
                    return Err(DataError::Invalid("manifest indices do not match row count".into()));
                }
                ds.indices = ix.clone();
            }
            ds.truth = m.truth.clone();
            ds.seed = m.seed;
        }
        Ok(ds)
    }
}

/// Sidecar JSON describing a CSV dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub k: usize,
    pub field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<PolyJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Label>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<usize>>,
}

/// `data.csv` -> `data.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

/// Write to a sibling temp file, then rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DataError> {
    let name = path
        .file_name()
        .ok_or_else(|| DataError::Invalid(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        e.into()
    })
}

/// A dataset whose field is decided at runtime.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyDataSet {
    Rational(DataSet<Rational>),
    Gf(DataSet<Fp>),
    Float(DataSet<f64>),
}

impl AnyDataSet {
    /// Reads `path` and its manifest if present. Without a manifest the field
    /// is `fallback`.
    pub fn read(path: &Path, fallback: FieldKind) -> Result<Self, DataError> {
        let text = fs::read_to_string(path)?;
        let mpath = manifest_path(path);
        let manifest: Option<Manifest> = if mpath.exists() {
            Some(serde_json::from_str(&fs::read_to_string(&mpath)?)?)
        } else {
            None
        };
        let kind = match &manifest {
            Some(m) => FieldKind::from_tag(&m.field, m.modulus)?,
            None => fallback,
        };
        Self::parse(&text, kind, manifest.as_ref())
    }

    pub fn parse(text: &str, kind: FieldKind, manifest: Option<&Manifest>) -> Result<Self, DataError> {
        Ok(match kind {
            FieldKind::Rational => AnyDataSet::Rational(DataSet::from_csv_str(text, &(), manifest)?),
            FieldKind::PrimeField(q) => {
                AnyDataSet::Gf(DataSet::from_csv_str(text, &Modulus::new(q)?, manifest)?)
            }
            FieldKind::Float => AnyDataSet::Float(DataSet::from_csv_str(text, &(), manifest)?),
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), DataError> {
        match self {
            AnyDataSet::Rational(d) => d.write(path),
            AnyDataSet::Gf(d) => d.write(path),
            AnyDataSet::Float(d) => d.write(path),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AnyDataSet::Rational(d) => d.len(),
            AnyDataSet::Gf(d) => d.len(),
            AnyDataSet::Float(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyDataSet::Rational(d) => d.dim(),
            AnyDataSet::Gf(d) => d.dim(),
            AnyDataSet::Float(d) => d.dim(),
        }
    }

    pub fn kind(&self) -> FieldKind {
        match self {
            AnyDataSet::Rational(d) => d.kind(),
            AnyDataSet::Gf(d) => d.kind(),
            AnyDataSet::Float(d) => d.kind(),
        }
    }

    pub fn labels(&self) -> Option<&[Label]> {
        match self {
            AnyDataSet::Rational(d) => d.labels(),
            AnyDataSet::Gf(d) => d.labels(),
            AnyDataSet::Float(d) => d.labels(),
        }
    }

    pub fn truth(&self) -> Option<&PolyJson> {
        match self {
            AnyDataSet::Rational(d) => d.truth.as_ref(),
            AnyDataSet::Gf(d) => d.truth.as_ref(),
            AnyDataSet::Float(d) => d.truth.as_ref(),
        }
    }

    /// Coordinates and values as binary64, for the float path and audits.
    pub fn to_float(&self) -> DataSet<f64> {
        fn conv<F: Field>(d: &DataSet<F>) -> DataSet<f64> {
            let points = d
                .points()
                .iter()
                .map(|p| p.iter().map(|c| c.to_f64()).collect())
                .collect();
            let values = d.values().iter().map(|v| v.to_f64()).collect();
            let mut out = DataSet::new((), d.dim(), points, values).expect("same shape");
            out.indices = d.indices().to_vec();
            out.labels = d.labels.clone();
            out.truth = d.truth.clone();
            out.seed = d.seed;
            out
        }
        match self {
            AnyDataSet::Rational(d) => conv(d),
            AnyDataSet::Gf(d) => conv(d),
            AnyDataSet::Float(d) => d.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn csv_round_trip_with_manifest() {
        let ds = DataSet::new(
            (),
            2,
            vec![vec![rat(1, 1), rat(2, 1)], vec![rat(-1, 2), rat(3, 4)]],
            vec![rat(3, 1), rat(1, 4)],
        )
        .unwrap()
        .with_labels(vec![Label::Clean, Label::Corrupt])
        .unwrap();
        let text = ds.to_csv_string();
        assert_eq!(text, "x1,x2,z\n1,2,3\n-1/2,3/4,1/4\n");
        let back = DataSet::<Rational>::from_csv_str(&text, &(), Some(&ds.manifest())).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn subset_keeps_original_rows() {
        let ds = DataSet::new((), 1, (0..5).map(|i| vec![i as f64]).collect(), vec![0.0; 5]).unwrap();
        let s = ds.subset(&[4, 1]).subset(&[1]);
        assert_eq!(s.indices(), &[1]);
        assert_eq!(s.manifest().indices, Some(vec![1]));
    }

    #[test]
    fn rejects_ragged_rows_and_bad_header() {
        assert!(DataSet::<f64>::new((), 2, vec![vec![1.0]], vec![0.0]).is_err());
        assert!(DataSet::<f64>::from_csv_str("a,b\n1,2\n", &(), None).is_err());
        assert!(DataSet::<f64>::from_csv_str("x1,z\n1\n", &(), None).is_err());
    }

    #[test]
    fn files_and_manifest_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let m = Modulus::new(11).unwrap();
        let ds = DataSet::new(
            m,
            1,
            vec![vec![Fp::new(1, m)], vec![Fp::new(2, m)]],
            vec![Fp::new(5, m), Fp::new(10, m)],
        )
        .unwrap();
        AnyDataSet::Gf(ds.clone()).write(&path).unwrap();
        assert!(dir.path().join("d.manifest.json").exists());
        let back = AnyDataSet::read(&path, FieldKind::Rational).unwrap();
        assert_eq!(back, AnyDataSet::Gf(ds));
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
    }
}
