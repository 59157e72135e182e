//! File IO helpers: atomic writes and path CSV parsing.

use anyhow::{bail, Context, Result};
use siglab::sig::Path as SigPath;
use std::fs;
use std::path::{Path, PathBuf};

/// Writes via a temporary file in the same directory and renames into
/// place, so a failed run never leaves a partial output behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
    }
    let tmp = path.with_extension(format!(
        "{}.tmp-{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} into place", path.display()))?;
    Ok(())
}

/// Parses a CSV of one or more paths. Header must be `t,x1,...,xd` or
/// `path,t,x1,...,xd`; rows of a multi-path file are grouped by the path
/// id column. Errors carry 1-based line numbers.
pub fn read_paths_csv(file: &Path) -> Result<Vec<(String, SigPath)>> {
    let text = fs::read_to_string(file)
        .with_context(|| format!("reading input CSV {}", file.display()))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().context("empty CSV: missing header")?;
    let cols: Vec<&str> = header.split(',').map(|c| c.trim()).collect();
    let (has_id, t_col) = match cols.first() {
        Some(&"path") => (true, 1),
        Some(&"t") => (false, 0),
        _ => bail!("line 1: header must start with 't' or 'path,t'"),
    };
    if cols.get(t_col) != Some(&"t") {
        bail!("line 1: expected 't' column at position {}", t_col + 1);
    }
    let dim = cols.len() - t_col - 1;
    if dim == 0 {
        bail!("line 1: no coordinate columns x1..xd found");
    }

    let mut groups: Vec<(String, Vec<f64>, Vec<f64>)> = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').map(|f| f.trim()).collect();
        if fields.len() != cols.len() {
            bail!(
                "line {}: expected {} fields, found {}",
                lineno,
                cols.len(),
                fields.len()
            );
        }
        let id = if has_id { fields[0].to_string() } else { "0".to_string() };
        let t: f64 = fields[t_col]
            .parse()
            .with_context(|| format!("line {}: bad time value '{}'", lineno, fields[t_col]))?;
        let mut row = Vec::with_capacity(dim);
        for (k, field) in fields[t_col + 1..].iter().enumerate() {
            let v: f64 = field.parse().with_context(|| {
                format!("line {}: bad value '{}' in column x{}", lineno, field, k + 1)
            })?;
            row.push(v);
        }
        match groups.last_mut() {
            Some((gid, times, values)) if *gid == id => {
                times.push(t);
                values.extend(row);
            }
            _ => {
                groups.push((id, vec![t], row));
            }
        }
    }
    groups
        .into_iter()
        .map(|(id, times, values)| {
            let path = SigPath::new(times, values, dim)
                .with_context(|| format!("path '{}' is invalid", id))?;
            Ok((id, path))
        })
        .collect()
}

/// Output directory joiner.
pub fn out_file(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
