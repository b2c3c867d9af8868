//! Curve databases and queries: loading, writing, and synthetic generation.

mod format;
mod synthetic;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::geometry::Curve;

pub use format::{
    format_vertices, load_curve, parse_manifest, parse_query_lines, parse_vertices, write_curve,
};
pub use synthetic::{generate_synthetic, synthesize, Profile, Synthetic, SyntheticSpec};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}: curve has {count} vertices, at least 2 are required", path.display())]
    TooFewVertices { path: PathBuf, count: usize },
    #[error("{}:{line}: duplicate curve {entry:?} (first listed on line {first})", path.display())]
    DuplicateCurve {
        path: PathBuf,
        line: usize,
        first: usize,
        entry: String,
    },
    #[error("{}:{line}: delta {value:?} must be a finite number >= 0", path.display())]
    InvalidDelta {
        path: PathBuf,
        line: usize,
        value: String,
    },
    #[error("duplicate curve id {0:?}")]
    DuplicateId(String),
    #[error("unknown synthetic profile {0:?} (expected clustered-paths or uniform)")]
    UnknownProfile(String),
}

/// An immutable set of curves with unique ids.
#[derive(Debug, Clone, Default)]
pub struct Database {
    curves: Vec<Curve>,
    positions: HashMap<String, usize>,
    manifest: Option<PathBuf>,
}

impl Database {
    pub fn from_curves(curves: Vec<Curve>) -> Result<Self, DatasetError> {
        let mut positions = HashMap::with_capacity(curves.len());
        for (k, c) in curves.iter().enumerate() {
            if positions.insert(c.id().to_string(), k).is_some() {
                return Err(DatasetError::DuplicateId(c.id().to_string()));
            }
        }
        Ok(Self {
            curves,
            positions,
            manifest: None,
        })
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn curve(&self, position: usize) -> &Curve {
        &self.curves[position]
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.positions.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<&Curve> {
        self.position(id).map(|k| &self.curves[k])
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// Manifest the database was loaded from, if any.
    pub fn manifest(&self) -> Option<&Path> {
        self.manifest.as_deref()
    }

    pub fn total_vertices(&self) -> usize {
        self.curves.iter().map(Curve::len).sum()
    }
}

/// A range query: all curves within Fréchet distance `delta` of `curve`.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub curve: Curve,
    pub delta: f64,
}

impl Query {
    /// Panics unless `delta` is finite and non-negative.
    pub fn new(curve: Curve, delta: f64) -> Self {
        assert!(delta.is_finite() && delta >= 0.0, "invalid delta {delta}");
        Self { curve, delta }
    }
}

/// Loads every curve listed in a manifest. Curve ids are the paths as listed.
pub fn load_database(manifest: &Path) -> Result<Database, DatasetError> {
    let text = format::read_text(manifest)?;
    let entries = parse_manifest(&text, manifest)?;
    let curves = entries
        .iter()
        .map(|(_, listed)| load_curve(&format::resolve(manifest, listed), listed))
        .collect::<Result<Vec<_>, _>>()?;
    let mut db = Database::from_curves(curves)?;
    db.manifest = Some(manifest.to_path_buf());
    Ok(db)
}

/// Loads a query file. Each query curve's id is its path as listed.
pub fn load_queries(path: &Path) -> Result<Vec<Query>, DatasetError> {
    let text = format::read_text(path)?;
    parse_query_lines(&text, path)?
        .into_iter()
        .map(|(_, listed, delta)| {
            let curve = load_curve(&format::resolve(path, &listed), &listed)?;
            Ok(Query { curve, delta })
        })
        .collect()
}

/// Writes `db` under `dir` as a manifest (`manifest.txt`) plus one file per
/// curve, named by the curve's id. Returns the manifest path.
pub fn write_database(dir: &Path, db: &Database) -> Result<PathBuf, DatasetError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| DatasetError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut manifest = String::new();
    for c in db.curves() {
        let file = dir.join(c.id());
        if let Some(parent) = file.parent() {
            fs::create_dir_all(parent).map_err(io(parent))?;
        }
        write_curve(&file, c)?;
        manifest.push_str(c.id());
        manifest.push('\n');
    }
    let path = dir.join("manifest.txt");
    fs::write(&path, manifest).map_err(io(&path))?;
    Ok(path)
}

/// Writes queries as a query file at `path`, each query curve stored next to
/// it as `<stem>-<k>.txt`.
pub fn write_queries(path: &Path, queries: &[Query]) -> Result<(), DatasetError> {
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |source| DatasetError::Io { path: p, source }
    };
    let dir = path.parent().unwrap_or(Path::new(""));
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "query".into());
    let mut listing = String::new();
    for (k, q) in queries.iter().enumerate() {
        let name = format!("{stem}-{k}.txt");
        write_curve(&dir.join(&name), &q.curve)?;
        listing.push_str(&format!("{name} {}\n", q.delta));
    }
    fs::write(path, listing).map_err(io(path))
}
