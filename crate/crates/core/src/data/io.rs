//! CSV bundle I/O.
//!
//! A dataset bundle is a directory holding `view_0.csv .. view_{V-1}.csv`
//! (comma-separated numeric rows, `.` decimal, no header), `labels.csv`
//! (one integer class id per line) and `meta.json` (counts, per-view
//! widths, and the generator spec when the data is synthetic). Features
//! are written with 12 significant digits, so a save/load round trip
//! reproduces values to about 1e-9.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{MultiViewDataset, ToySpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMeta {
    pub num_instances: usize,
    pub num_views: usize,
    pub num_classes: usize,
    pub view_dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<ToySpec>,
}

/// Write a dataset bundle, replacing existing files.
pub fn save_bundle(
    dataset: &MultiViewDataset,
    dir: &Path,
    generator: Option<&ToySpec>,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    for v in 0..dataset.num_views() {
        let mut out = String::new();
        for row in dataset.view(v) {
            let mut first = true;
            for x in row {
                if !first {
                    out.push(',');
                }
                out.push_str(&format!("{x:.11e}"));
                first = false;
            }
            out.push('\n');
        }
        fs::File::create(dir.join(format!("view_{v}.csv")))?.write_all(out.as_bytes())?;
    }

    let mut labels = String::new();
    for n in 0..dataset.num_instances() {
        labels.push_str(&dataset.class_of(n).to_string());
        labels.push('\n');
    }
    fs::File::create(dir.join("labels.csv"))?.write_all(labels.as_bytes())?;

    let meta = BundleMeta {
        num_instances: dataset.num_instances(),
        num_views: dataset.num_views(),
        num_classes: dataset.num_classes(),
        view_dims: dataset.view_dims(),
        generator: generator.cloned(),
    };
    let json = serde_json::to_string_pretty(&meta)?;
    fs::File::create(dir.join("meta.json"))?.write_all(json.as_bytes())?;
    Ok(())
}

/// Load a bundle directory written by [`save_bundle`].
pub fn load_bundle(dir: &Path) -> Result<(MultiViewDataset, BundleMeta)> {
    let meta_path = dir.join("meta.json");
    let meta: BundleMeta = serde_json::from_str(&fs::read_to_string(&meta_path).map_err(
        |e| Error::Data(format!("cannot read {}: {e}", meta_path.display())),
    )?)?;
    let view_paths: Vec<PathBuf> =
        (0..meta.num_views).map(|v| dir.join(format!("view_{v}.csv"))).collect();
    let dataset = load_csv_with_classes(
        &view_paths,
        &dir.join("labels.csv"),
        false,
        Some(meta.num_classes),
    )?;
    if dataset.num_instances() != meta.num_instances
        || dataset.view_dims() != meta.view_dims
    {
        return Err(Error::Data(format!(
            "bundle {} does not match its meta.json",
            dir.display()
        )));
    }
    Ok((dataset, meta))
}

/// Load a dataset from per-view numeric CSV files plus a label file with
/// one integer class id per line. `skip_header` drops the first line of
/// every file. The class count is inferred as `max(label) + 1`.
pub fn load_csv(
    view_paths: &[PathBuf],
    label_path: &Path,
    skip_header: bool,
) -> Result<MultiViewDataset> {
    load_csv_with_classes(view_paths, label_path, skip_header, None)
}

fn load_csv_with_classes(
    view_paths: &[PathBuf],
    label_path: &Path,
    skip_header: bool,
    num_classes: Option<usize>,
) -> Result<MultiViewDataset> {
    if view_paths.is_empty() {
        return Err(Error::InvalidArgument("no view files given".into()));
    }
    let mut views = Vec::with_capacity(view_paths.len());
    for path in view_paths {
        views.push(read_matrix(path, skip_header)?);
    }
    let labels = read_labels(label_path, skip_header)?;

    for (path, rows) in view_paths.iter().zip(&views) {
        if rows.len() != labels.len() {
            return Err(Error::Data(format!(
                "{} has {} rows but {} has {} labels",
                path.display(),
                rows.len(),
                label_path.display(),
                labels.len()
            )));
        }
    }

    let inferred = labels.iter().copied().max().map_or(0, |m| m + 1);
    let num_classes = match num_classes {
        Some(c) => {
            if inferred > c {
                return Err(Error::Data(format!(
                    "{}: label {} out of range for {c} classes",
                    label_path.display(),
                    inferred - 1
                )));
            }
            c
        }
        None => inferred.max(2),
    };
    MultiViewDataset::from_class_ids(views, &labels, num_classes)
}

fn read_matrix(path: &Path, skip_header: bool) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if skip_header && line_no == 0 {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col, cell) in line.split(',').enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| {
                Error::Data(format!(
                    "{}: row {}, column {}: '{}' is not numeric",
                    path.display(),
                    line_no + 1,
                    col + 1,
                    cell.trim()
                ))
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn read_labels(path: &Path, skip_header: bool) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut labels = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if skip_header && line_no == 0 {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let value: usize = line.trim().parse().map_err(|_| {
            Error::Data(format!(
                "{}: row {}: '{}' is not a class id",
                path.display(),
                line_no + 1,
                line.trim()
            ))
        })?;
        labels.push(value);
    }
    Ok(labels)
}
