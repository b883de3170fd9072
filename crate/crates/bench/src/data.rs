//! Dataset CSV files: header `x_0,...,x_{d-1},y`, one sample per row.

use std::path::Path;

use azo_core::problems::{Dataset, DatasetError};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("header must be x_0..x_{{d-1}},y; got {0:?}")]
    Header(String),
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

pub fn write_dataset<W: std::io::Write>(ds: &Dataset, writer: W) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (0..ds.d()).map(|j| format!("x_{j}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    let mut record = Vec::with_capacity(ds.d() + 1);
    for i in 0..ds.n() {
        record.clear();
        // `Display` for f64 prints the shortest string that parses back exactly.
        record.extend(ds.row(i).iter().map(|v| v.to_string()));
        record.push(ds.label(i).to_string());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset<R: std::io::Read>(reader: R) -> Result<Dataset, DataError> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    let d = header.len().saturating_sub(1);
    let well_formed = d > 0
        && header.get(d) == Some("y")
        && header.iter().take(d).enumerate().all(|(j, h)| h == format!("x_{j}"));
    if !well_formed {
        return Err(DataError::Header(header.iter().collect::<Vec<_>>().join(",")));
    }
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = |reason: String| DataError::Row { row: i + 1, reason };
        if rec.len() != d + 1 {
            return Err(row(format!("expected {} fields, got {}", d + 1, rec.len())));
        }
        for field in rec.iter().take(d) {
            features.push(field.trim().parse::<f64>().map_err(|e| row(format!("{field:?}: {e}")))?);
        }
        let y = &rec[d];
        labels.push(y.trim().parse::<u8>().map_err(|e| row(format!("label {y:?}: {e}")))?);
    }
    Ok(Dataset::new(features, labels, d)?)
}

pub fn save_dataset(ds: &Dataset, path: &Path) -> Result<(), DataError> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_dataset(ds, std::io::BufWriter::new(std::fs::File::create(path)?))
}

pub fn load_dataset(path: &Path) -> Result<Dataset, DataError> {
    read_dataset(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use azo_core::problems::{generate_synthetic, SyntheticSpec};

    #[test]
    fn round_trip_is_exact() {
        let ds = generate_synthetic(&SyntheticSpec::new(7, 4, 3)).unwrap();
        let mut buf = Vec::new();
        write_dataset(&ds, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x_0,x_1,x_2,x_3,y\n"));
        assert_eq!(read_dataset(buf.as_slice()).unwrap(), ds);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(read_dataset("a,b\n1,0\n".as_bytes()), Err(DataError::Header(_))));
        assert!(matches!(read_dataset("x_0,y\nfoo,1\n".as_bytes()), Err(DataError::Row { row: 1, .. })));
        assert!(matches!(read_dataset("x_0,y\n1.0,3\n".as_bytes()), Err(DataError::Dataset(_))));
    }
}
