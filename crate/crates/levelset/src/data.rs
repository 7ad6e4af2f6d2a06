//! Dataset files: `x1,...,xn,label` rows with a JSON sidecar holding the
//! generator metadata.

use std::path::{Path, PathBuf};

use levelset_core::training::{Dataset, DatasetMeta};

use crate::{Error, Result};

/// `data.csv` -> `data.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

pub fn dataset_to_csv(data: &Dataset) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=data.dim()).map(|i| format!("x{i}")).collect();
    header.push("label".into());
    w.write_record(&header).expect("in-memory write");
    for (p, l) in data.points().iter().zip(data.labels()) {
        let mut row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        row.push(l.to_string());
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn dataset_from_csv(text: &str, meta: DatasetMeta, path: &Path) -> Result<Dataset> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::format(path, e))?.clone();
    let dim = header.len().checked_sub(1).filter(|&d| d > 0).ok_or_else(|| {
        Error::format(path, "expected columns x1,...,xn,label")
    })?;
    if &header[dim] != "label" {
        return Err(Error::format(path, "last column must be `label`"));
    }
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::format(path, e))?;
        let bad = |what: &str| Error::format(path, format!("row {}: bad {what}", i + 1));
        let p = (0..dim)
            .map(|k| rec[k].trim().parse::<f64>().map_err(|_| bad("coordinate")))
            .collect::<Result<Vec<_>>>()?;
        points.push(p);
        labels.push(rec[dim].trim().parse::<u8>().map_err(|_| bad("label"))?);
    }
    Ok(Dataset::new(points, labels, meta)?)
}

/// Writes the CSV and its sidecar.
pub fn write_dataset(path: &Path, data: &Dataset) -> Result<()> {
    std::fs::write(path, dataset_to_csv(data)).map_err(Error::io(path))?;
    let side = sidecar_path(path);
    let mut meta = serde_json::to_string_pretty(data.meta()).expect("metadata serializes");
    meta.push('\n');
    std::fs::write(&side, meta).map_err(Error::io(side))
}

/// Reads a CSV dataset; the sidecar is optional.
pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    let side = sidecar_path(path);
    let meta = match std::fs::read_to_string(&side) {
        Ok(s) => serde_json::from_str(&s).map_err(|e| Error::format(&side, e))?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => DatasetMeta {
            generator: "file".into(),
            seed: 0,
            params: Vec::new(),
        },
        Err(e) => return Err(Error::io(side)(e)),
    };
    dataset_from_csv(&text, meta, path)
}
