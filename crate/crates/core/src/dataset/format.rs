//! Text formats.
//!
//! * Curve file: one vertex per line, `x y` separated by spaces or tabs;
//!   further columns are ignored, blank lines skipped.
//! * Manifest: one curve-file path per line, relative to the manifest's
//!   directory; lines starting with `#` and blank lines are skipped.
//! * Query file: one query per line, `<curve-file-path> <delta>`, paths
//!   relative to the query file's directory.
//!
//! All files are UTF-8 with LF or CRLF line endings.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::geometry::{Curve, CurveError, Point};

use super::DatasetError;

fn read(path: &Path) -> Result<String, DatasetError> {
    fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Lines with their 1-based numbers, CR stripped.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.strip_suffix('\r').unwrap_or(l)))
}

fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split([' ', '\t']).filter(|t| !t.is_empty())
}

fn is_blank(line: &str) -> bool {
    fields(line).next().is_none()
}

/// Parses the vertex list of a curve file.
pub fn parse_vertices(text: &str, path: &Path) -> Result<Vec<Point>, DatasetError> {
    let mut out = Vec::new();
    for (line_no, line) in lines(text) {
        if is_blank(line) {
            continue;
        }
        let mut it = fields(line);
        let mut coord = |name: &str| -> Result<f64, DatasetError> {
            let token = it.next().ok_or_else(|| DatasetError::Parse {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("missing {name} coordinate"),
            })?;
            let v: f64 = token.parse().map_err(|_| DatasetError::Parse {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("{name} coordinate {token:?} is not a number"),
            })?;
            if !v.is_finite() {
                return Err(DatasetError::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: format!("{name} coordinate {token:?} is not finite"),
                });
            }
            Ok(v)
        };
        let x = coord("x")?;
        let y = coord("y")?;
        out.push(Point::new(x, y));
    }
    Ok(out)
}

/// Loads a curve file; the curve's id is `id`.
pub fn load_curve(path: &Path, id: &str) -> Result<Curve, DatasetError> {
    let text = read(path)?;
    let vertices = parse_vertices(&text, path)?;
    Curve::new(id, vertices).map_err(|e| match e {
        CurveError::TooFewVertices(count) => DatasetError::TooFewVertices {
            path: path.to_path_buf(),
            count,
        },
        CurveError::NonFinite { index } => DatasetError::Parse {
            path: path.to_path_buf(),
            line: index + 1,
            message: "non-finite coordinate".into(),
        },
    })
}

/// Manifest entries as `(line number, listed path)`.
pub fn parse_manifest(text: &str, path: &Path) -> Result<Vec<(usize, String)>, DatasetError> {
    let mut out: Vec<(usize, String)> = Vec::new();
    let mut seen = std::collections::HashMap::new();
    for (line_no, line) in lines(text) {
        let entry = line.trim_matches([' ', '\t']);
        if entry.is_empty() || entry.starts_with('#') {
            continue;
        }
        if let Some(first) = seen.insert(entry.to_string(), line_no) {
            return Err(DatasetError::DuplicateCurve {
                path: path.to_path_buf(),
                line: line_no,
                first,
                entry: entry.to_string(),
            });
        }
        out.push((line_no, entry.to_string()));
    }
    Ok(out)
}

/// Query file entries as `(line number, listed curve path, delta)`.
pub fn parse_query_lines(
    text: &str,
    path: &Path,
) -> Result<Vec<(usize, String, f64)>, DatasetError> {
    let mut out = Vec::new();
    for (line_no, line) in lines(text) {
        if is_blank(line) {
            continue;
        }
        let mut it = fields(line);
        let file = it.next().expect("non-blank line has a field");
        let err = |message: String| DatasetError::Parse {
            path: path.to_path_buf(),
            line: line_no,
            message,
        };
        let token = it.next().ok_or_else(|| err("missing delta".into()))?;
        let delta: f64 = token
            .parse()
            .map_err(|_| err(format!("delta {token:?} is not a number")))?;
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(DatasetError::InvalidDelta {
                path: path.to_path_buf(),
                line: line_no,
                value: token.to_string(),
            });
        }
        if it.next().is_some() {
            return Err(err("expected exactly two fields".into()));
        }
        out.push((line_no, file.to_string(), delta));
    }
    Ok(out)
}

pub(super) fn resolve(base: &Path, listed: &str) -> PathBuf {
    let listed = Path::new(listed);
    if listed.is_absolute() {
        listed.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new("")).join(listed)
    }
}

pub(super) fn read_text(path: &Path) -> Result<String, DatasetError> {
    read(path)
}

/// Serializes vertices in curve-file format. Uses the shortest decimal form
/// that parses back to the same double.
pub fn format_vertices(vertices: &[Point]) -> String {
    let mut s = String::with_capacity(vertices.len() * 24);
    for v in vertices {
        let _ = writeln!(s, "{} {}", v.x, v.y);
    }
    s
}

pub fn write_curve(path: &Path, curve: &Curve) -> Result<(), DatasetError> {
    fs::write(path, format_vertices(curve.vertices())).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> PathBuf {
        PathBuf::from("mem.txt")
    }

    #[test]
    fn vertices_accept_tabs_crlf_and_extra_columns() {
        let v = parse_vertices("0 0\r\n1\t2  99 extra\n\n  3.5   -4e1\n", &p()).unwrap();
        assert_eq!(
            v,
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 2.0),
                Point::new(3.5, -40.0)
            ]
        );
    }

    #[test]
    fn vertex_errors_name_the_line() {
        match parse_vertices("0 0\n1 abc\n", &p()) {
            Err(DatasetError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_vertices("0 0\n7\n", &p()) {
            Err(DatasetError::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("missing y"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_vertices("0 inf\n", &p()),
            Err(DatasetError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_vertices("NaN 0\n", &p()),
            Err(DatasetError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn manifest_skips_comments_and_rejects_duplicates() {
        let m = parse_manifest("# header\na.txt\n\n  b.txt \n", &p()).unwrap();
        assert_eq!(m, vec![(2, "a.txt".to_string()), (4, "b.txt".to_string())]);
        match parse_manifest("a.txt\nb.txt\na.txt\n", &p()) {
            Err(DatasetError::DuplicateCurve { line, first, .. }) => {
                assert_eq!((line, first), (3, 1))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn query_lines() {
        let q = parse_query_lines("q1.txt 5.0\n\nq2.txt\t0\n", &p()).unwrap();
        assert_eq!(
            q,
            vec![(1, "q1.txt".into(), 5.0), (3, "q2.txt".into(), 0.0)]
        );
        assert!(parse_query_lines("", &p()).unwrap().is_empty());
        for bad in ["q.txt -1", "q.txt NaN", "q.txt inf"] {
            assert!(
                matches!(
                    parse_query_lines(bad, &p()),
                    Err(DatasetError::InvalidDelta { line: 1, .. })
                ),
                "{bad}"
            );
        }
        assert!(matches!(
            parse_query_lines("q.txt", &p()),
            Err(DatasetError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_query_lines("q.txt x", &p()),
            Err(DatasetError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn formatted_vertices_parse_back_exactly() {
        let v = vec![
            Point::new(0.1, -1e-300),
            Point::new(123456.789012345, 1.0 / 3.0),
        ];
        assert_eq!(parse_vertices(&format_vertices(&v), &p()).unwrap(), v);
    }
}
