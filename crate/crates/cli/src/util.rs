//! File loading, format parsing and output helpers shared by the
//! subcommands. Data problems carry file and line context; outputs are
//! written atomically (temp file + rename) once a command's compute phase is
//! done.

use std::fs;
use std::path::{Path, PathBuf};

use zsasr_core::{DevUtterance, EmissionMatrix, FallbackPolicy, RomanScheme};

use crate::CliError;

pub fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Writes via a temp file in the target directory, then renames into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let context = |e: std::io::Error| CliError::Data(format!("{}: {e}", path.display()));
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(context)?;
    }
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new("."))).map_err(context)?;
    std::io::Write::write_all(&mut tmp, bytes).map_err(context)?;
    tmp.persist(path)
        .map_err(|e| CliError::Data(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Builds the romanization scheme: built-in tables plus every `*.tsv` under
/// `tables`, loaded in lexicographic filename order so overrides are
/// deterministic.
pub fn load_scheme(
    tables: Option<&Path>,
    fallback: FallbackPolicy,
) -> Result<RomanScheme, CliError> {
    let mut scheme = RomanScheme::builtin().with_fallback(fallback);
    if let Some(dir) = tables {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "tsv"))
            .collect();
        paths.sort();
        for path in paths {
            scheme
                .load_table_file(&path)
                .map_err(|e| CliError::Data(e.to_string()))?;
        }
    }
    Ok(scheme)
}

/// One reference line: `utterance_id<TAB>language<TAB>text`.
pub struct RefLine {
    pub utterance_id: String,
    pub language: String,
    pub text: String,
}

pub fn read_refs(path: &Path) -> Result<Vec<RefLine>, CliError> {
    let text = read_file(path)?;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let mut fields = raw.splitn(3, '\t');
        let (id, language, content) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(CliError::Data(format!(
                    "{}:{}: expected `utterance_id<TAB>language<TAB>text`",
                    path.display(),
                    idx + 1
                )))
            }
        };
        out.push(RefLine {
            utterance_id: id.to_string(),
            language: language.to_string(),
            text: content.to_string(),
        });
    }
    if out.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no reference lines",
            path.display()
        )));
    }
    Ok(out)
}

/// One manifest line: `utterance_id<TAB>path<TAB>reference-text`. Relative
/// emission paths resolve against the manifest's directory.
pub struct ManifestLine {
    pub utterance_id: String,
    pub path: PathBuf,
    /// Part of the manifest format; decoding itself never consults it.
    #[allow(dead_code)]
    pub reference: String,
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestLine>, CliError> {
    let text = read_file(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let mut fields = raw.splitn(3, '\t');
        let (id, file, reference) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(CliError::Data(format!(
                    "{}:{}: expected `utterance_id<TAB>path<TAB>reference-text`",
                    path.display(),
                    idx + 1
                )))
            }
        };
        let file = PathBuf::from(file);
        let resolved = if file.is_absolute() {
            file
        } else {
            base.join(file)
        };
        out.push(ManifestLine {
            utterance_id: id.to_string(),
            path: resolved,
            reference: reference.to_string(),
        });
    }
    if out.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no manifest lines",
            path.display()
        )));
    }
    Ok(out)
}

pub fn read_emissions(path: &Path, utterance_id: &str) -> Result<EmissionMatrix, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    EmissionMatrix::from_bytes(&bytes)
        .map(|m| m.with_utterance_id(utterance_id))
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Joins a manifest with a reference file into decodable dev utterances.
/// Every manifest utterance must have a reference entry.
pub fn load_dev_set(manifest_path: &Path, refs_path: &Path) -> Result<Vec<DevUtterance>, CliError> {
    let manifest = read_manifest(manifest_path)?;
    let refs = read_refs(refs_path)?;
    let by_id: std::collections::HashMap<&str, &RefLine> =
        refs.iter().map(|r| (r.utterance_id.as_str(), r)).collect();
    let mut out = Vec::with_capacity(manifest.len());
    for line in &manifest {
        let reference = by_id.get(line.utterance_id.as_str()).ok_or_else(|| {
            CliError::Data(format!(
                "{}: utterance {:?} has no entry in {}",
                manifest_path.display(),
                line.utterance_id,
                refs_path.display()
            ))
        })?;
        out.push(DevUtterance {
            utterance_id: line.utterance_id.clone(),
            language: reference.language.clone(),
            reference: reference.text.clone(),
            emissions: read_emissions(&line.path, &line.utterance_id)?,
        });
    }
    Ok(out)
}

/// Inclusive `LO:HI:STEP` grid; both ends included when HI - LO is an exact
/// multiple of STEP.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let usage = || {
        CliError::Usage(format!(
            "grid {spec:?} must have the form LO:HI:STEP with STEP > 0 and HI >= LO"
        ))
    };
    if parts.len() != 3 {
        return Err(usage());
    }
    let lo: f64 = parts[0].parse().map_err(|_| usage())?;
    let hi: f64 = parts[1].parse().map_err(|_| usage())?;
    let step: f64 = parts[2].parse().map_err(|_| usage())?;
    if !(lo.is_finite() && hi.is_finite() && step > 0.0) || hi < lo {
        return Err(usage());
    }
    let mut values = Vec::new();
    let mut i = 0u32;
    loop {
        let v = lo + f64::from(i) * step;
        if v > hi + step * 1e-9 {
            break;
        }
        values.push(v);
        i += 1;
    }
    Ok(values)
}

/// `a,b,c` ascending positive integers.
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>, CliError> {
    let sizes: Result<Vec<usize>, _> = spec.split(',').map(|s| s.trim().parse()).collect();
    let sizes = sizes.map_err(|_| CliError::Usage(format!("sizes {spec:?} must be integers")))?;
    if sizes.is_empty() || sizes[0] == 0 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage(
            "sizes must be ascending positive integers".to_string(),
        ));
    }
    Ok(sizes)
}

/// Filesystem-safe name for an utterance id; collisions are caught by the
/// caller.
pub fn sanitize_id(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_both_ends_on_exact_multiples() {
        assert_eq!(parse_grid("0:1:0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0:0:1").unwrap(), vec![0.0]);
        let grid = parse_grid("-1:1:0.5").unwrap();
        assert_eq!(grid.len(), 5);
        assert!((grid[0] + 1.0).abs() < 1e-12);
        assert!((grid[4] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_stops_below_inexact_top() {
        assert_eq!(parse_grid("0:0.9:0.5").unwrap(), vec![0.0, 0.5]);
    }

    #[test]
    fn grid_rejects_bad_specs() {
        for bad in ["1:0:0.5", "0:1:0", "0:1:-1", "0:1", "a:b:c"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn sizes_must_ascend() {
        assert_eq!(parse_sizes("1,2,5").unwrap(), vec![1, 2, 5]);
        assert!(parse_sizes("2,1").is_err());
        assert!(parse_sizes("0,1").is_err());
        assert!(parse_sizes("x").is_err());
    }

    #[test]
    fn sanitized_ids_are_fs_safe() {
        assert_eq!(sanitize_id("utt/1:a"), "utt_1_a");
        assert_eq!(sanitize_id("ok-1_2.x"), "ok-1_2.x");
    }
}
