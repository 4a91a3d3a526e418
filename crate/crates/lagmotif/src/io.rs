//! CSV ingestion and atomic file output.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use lagmotif_core::TimeSeries;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{}: no data rows", .0.display())]
    EmptySeries(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

/// Attaches `path` to an OS error, mapping "not found" to
/// [`IoError::FileNotFound`].
pub fn to_io(path: &Path, source: io::Error) -> IoError {
    if source.kind() == io::ErrorKind::NotFound {
        IoError::FileNotFound(path.to_path_buf())
    } else {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Reads a series from a CSV file with one column (values) or two columns
/// (time, value). A first row whose value field is not numeric is taken
/// as a header. The time column is ignored; row order is kept.
pub fn load_csv(path: impl AsRef<Path>) -> Result<TimeSeries, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| to_io(path, e))?;
    let values = parse_csv(&text).map_err(|(line, message)| IoError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    })?;
    if values.is_empty() {
        return Err(IoError::EmptySeries(path.to_path_buf()));
    }
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    let series = TimeSeries::new(values).map_err(|e| IoError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })?;
    Ok(match name {
        Some(n) => series.with_name(n),
        None => series,
    })
}

fn parse_csv(text: &str) -> Result<Vec<f64>, (u64, String)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut columns = None;
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            (line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let width = *columns.get_or_insert(record.len());
        if !(1..=2).contains(&width) {
            return Err((line, format!("expected 1 or 2 columns, found {width}")));
        }
        if record.len() != width {
            return Err((
                line,
                format!("expected {width} columns, found {}", record.len()),
            ));
        }
        let field = &record[width - 1];
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => return Err((line, format!("non-finite value {field:?}"))),
            Err(_) if first => {}
            Err(_) => return Err((line, format!("not a number: {field:?}"))),
        }
        first = false;
    }
    Ok(values)
}

/// Single-column CSV with a `value` header. Values are written in their
/// shortest round-trip form.
pub fn series_csv(series: &TimeSeries) -> String {
    let mut out = String::with_capacity(series.len() * 20 + 6);
    out.push_str("value\n");
    for v in series.values() {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: impl AsRef<Path>, contents: &[u8]) -> Result<(), IoError> {
    let path = path.as_ref();
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(to_io(path, e));
    }
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<T, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| to_io(path, e))?;
    serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })
}
