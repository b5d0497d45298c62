use std::path::{Path, PathBuf};

use crate::error::{Result, VqeError};

/// One geometry of a scan: displacement in Å and the integral file for it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub delta: f64,
    pub path: PathBuf,
    pub label: String,
}

/// Parses `<delta_angstrom> <path> [label]` lines; `#` starts a comment.
/// Relative paths resolve against `base_dir`.
pub fn parse_scan_manifest(text: &str, base_dir: Option<&Path>) -> Result<Vec<ScanPoint>> {
    let mut points: Vec<ScanPoint> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(VqeError::parse(
                line_no,
                "expected '<delta> <path> [label]'",
            ));
        }
        let delta: f64 = fields[0]
            .parse()
            .ok()
            .filter(|d: &f64| d.is_finite())
            .ok_or_else(|| VqeError::parse(line_no, format!("bad delta '{}'", fields[0])))?;
        if points.iter().any(|p| p.delta == delta) {
            return Err(VqeError::parse(line_no, format!("duplicate delta {delta}")));
        }
        let mut path = PathBuf::from(fields[1]);
        if path.is_relative() {
            if let Some(base) = base_dir {
                path = base.join(path);
            }
        }
        let label = fields
            .get(2)
            .map(|s| s.to_string())
            .unwrap_or_else(|| format!("{delta:+.4}"));
        points.push(ScanPoint { delta, path, label });
    }
    Ok(points)
}

pub fn load_scan_manifest(path: &Path) -> Result<Vec<ScanPoint>> {
    let text = std::fs::read_to_string(path)?;
    parse_scan_manifest(&text, path.parent())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_relative_paths_and_labels() {
        let text = "# scan\n-0.4 a.fcidump\n0.0 /abs/b.fcidump center\n";
        let pts = parse_scan_manifest(text, Some(Path::new("/data"))).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].path, PathBuf::from("/data/a.fcidump"));
        assert_eq!(pts[1].path, PathBuf::from("/abs/b.fcidump"));
        assert_eq!(pts[1].label, "center");
    }

    #[test]
    fn duplicate_delta_rejected() {
        let e = parse_scan_manifest("0.1 a\n0.1 b\n", None).unwrap_err();
        assert!(matches!(e, VqeError::Parse { line: 2, .. }));
        assert!(parse_scan_manifest("x a\n", None).is_err());
    }
}
