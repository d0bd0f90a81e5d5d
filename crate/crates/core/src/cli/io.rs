use std::io::Write;
use std::path::{Path, PathBuf};

use crate::geometry::PointCloud;

use super::CliError;

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>, CliError> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn rows(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let mut out = Vec::new();
    for (i, rec) in reader(path)?.records().enumerate() {
        let rec = rec.map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        let row = rec
            .iter()
            .filter(|f| !f.is_empty())
            .map(|f| {
                f.parse::<f64>().map_err(|_| {
                    CliError::config(format!("{}: row {}: `{f}` is not a number", path.display(), i + 1))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if !row.is_empty() {
            out.push(row);
        }
    }
    Ok(out)
}

/// Headerless CSV, one point per row.
pub fn read_cloud(path: &Path) -> Result<PointCloud, CliError> {
    let rows = rows(path)?;
    PointCloud::new(rows).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// The first `ncols` columns of a headerless numeric CSV.
pub fn read_columns(path: &Path, ncols: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let mut cols = vec![Vec::new(); ncols];
    for (i, row) in rows(path)?.into_iter().enumerate() {
        if row.len() < ncols {
            return Err(CliError::config(format!(
                "{}: row {} has {} columns, expected {ncols}",
                path.display(),
                i + 1,
                row.len()
            )));
        }
        for (c, v) in cols.iter_mut().zip(row) {
            c.push(v);
        }
    }
    Ok(cols)
}

/// In-memory CSV document.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
        if !header.is_empty() {
            writer.write_record(header).expect("writing to memory");
        }
        Table { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("writing to memory");
    }

    pub fn finish(self) -> String {
        String::from_utf8(self.writer.into_inner().expect("writing to memory")).expect("ascii csv")
    }
}

/// Writes every regular file through a temporary sibling and renames it
/// into place, so a failed run leaves no partial output. Existing
/// non-regular targets (pipes, devices) are written directly, last.
pub fn commit(files: &[(PathBuf, String)]) -> Result<(), CliError> {
    let err = |path: &Path, e: &dyn std::fmt::Display| CliError::io(format!("{}: {e}", path.display()));
    let mut staged = Vec::with_capacity(files.len());
    let mut direct = Vec::new();
    for (path, content) in files {
        let target = match std::fs::metadata(path) {
            Ok(m) if !m.is_file() => {
                direct.push((path, content));
                continue;
            }
            Ok(_) => std::fs::canonicalize(path).map_err(|e| err(path, &e))?,
            Err(_) => path.clone(),
        };
        let dir = match target.parent() {
            Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| err(path, &e))?;
        tmp.write_all(content.as_bytes())
            .and_then(|_| tmp.flush())
            .map_err(|e| err(path, &e))?;
        staged.push((tmp, target, path));
    }
    for (tmp, target, path) in staged {
        tmp.persist(&target).map_err(|e| err(path, &e))?;
    }
    for (path, content) in direct {
        std::fs::write(path, content).map_err(|e| err(path, &e))?;
    }
    Ok(())
}
