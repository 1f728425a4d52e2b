//! Matrix files (CSV or JSON), set-function instance files (JSON) and
//! atomic output.

use std::fs;
use std::io::Write;
use std::path::Path;

use condineq_core::linalg::{Matrix, SymPdMatrix};
use condineq_core::submodular::{
    discrete_entropy_fn, facility_location_fn, gaussian_entropy_fn, graph_cut_fn, matroid_rank_fn,
    modular_fn, set_cover_fn, JointPmf, MatroidSpec, SetFunction,
};
use condineq_core::Partition;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Parses comma-separated rows. Blank lines and lines starting with `#` are
/// skipped; errors name the offending line.
pub fn parse_matrix_csv(text: &str) -> Result<Matrix, String> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut first_line = 0;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row = trimmed
            .split(',')
            .enumerate()
            .map(|(col, field)| {
                let field = field.trim();
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        format!(
                            "line {lineno}, field {}: '{field}' is not a finite number",
                            col + 1
                        )
                    })
            })
            .collect::<Result<Vec<f64>, String>>()?;
        if let Some(prev) = rows.first() {
            if row.len() != prev.len() {
                return Err(format!(
                    "line {lineno}: expected {} values (as on line {first_line}), found {}",
                    prev.len(),
                    row.len()
                ));
            }
        } else {
            first_line = lineno;
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err("no matrix rows found".into());
    }
    if rows.len() != rows[0].len() {
        return Err(format!(
            "matrix is not square: {} rows of {} values",
            rows.len(),
            rows[0].len()
        ));
    }
    Matrix::from_rows(&rows).map_err(|e| e.to_string())
}

/// `{"n": 4, "rows": [[...], ...]}`; `n` is optional and checked when given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub rows: Vec<Vec<f64>>,
}

pub fn parse_matrix_json(text: &str) -> Result<Matrix, String> {
    let doc: MatrixDoc = serde_json::from_str(text).map_err(json_message)?;
    if let Some(n) = doc.n {
        if doc.rows.len() != n {
            return Err(format!(
                "\"n\" is {n} but {} rows are given",
                doc.rows.len()
            ));
        }
    }
    if doc.rows.is_empty() {
        return Err("no matrix rows found".into());
    }
    for (i, row) in doc.rows.iter().enumerate() {
        if row.len() != doc.rows.len() {
            return Err(format!(
                "row {}: expected {} values, found {}",
                i + 1,
                doc.rows.len(),
                row.len()
            ));
        }
    }
    Matrix::from_rows(&doc.rows).map_err(|e| e.to_string())
}

fn json_message(e: serde_json::Error) -> String {
    format!("line {}, column {}: {e}", e.line(), e.column())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn looks_like_json(path: &Path, text: &str) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('{')
}

/// Reads a matrix file and validates symmetry and positive definiteness.
pub fn read_matrix(path: &Path) -> Result<SymPdMatrix, CliError> {
    let text = read_text(path)?;
    let m = if looks_like_json(path, &text) {
        parse_matrix_json(&text)
    } else {
        parse_matrix_csv(&text)
    }
    .map_err(|msg| CliError::parse(path, msg))?;
    SymPdMatrix::new(m).map_err(|e| CliError::in_file(path, e))
}

/// Set-function instance descriptions, tagged by `"kind"`. Indices are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceDoc {
    /// Differential entropy of a Gaussian with covariance `rows`.
    Gaussian {
        rows: Vec<Vec<f64>>,
    },
    DiscreteEntropy {
        alphabet: Vec<usize>,
        probs: Vec<f64>,
    },
    GraphCut {
        n: usize,
        edges: Vec<(usize, usize, f64)>,
    },
    /// Weighted coverage: item `i` covers universe elements `sets[i-1]`.
    SetCover {
        weights: Vec<f64>,
        sets: Vec<Vec<usize>>,
    },
    UniformMatroid {
        n: usize,
        rank: usize,
    },
    PartitionMatroid {
        blocks: Vec<Vec<usize>>,
        capacities: Vec<usize>,
    },
    Facility {
        similarity: Vec<Vec<f64>>,
    },
    Modular {
        weights: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(flatten)]
    pub instance: InstanceDoc,
}

impl InstanceDoc {
    pub fn ground_size(&self) -> usize {
        match self {
            InstanceDoc::Gaussian { rows } => rows.len(),
            InstanceDoc::DiscreteEntropy { alphabet, .. } => alphabet.len(),
            InstanceDoc::GraphCut { n, .. } | InstanceDoc::UniformMatroid { n, .. } => *n,
            InstanceDoc::SetCover { sets, .. } => sets.len(),
            InstanceDoc::PartitionMatroid { blocks, .. } => blocks.iter().map(Vec::len).sum(),
            InstanceDoc::Facility { similarity } => similarity.len(),
            InstanceDoc::Modular { weights } => weights.len(),
        }
    }

    pub fn build(&self) -> condineq_core::Result<SetFunction> {
        Ok(match self {
            InstanceDoc::Gaussian { rows } => gaussian_entropy_fn(&SymPdMatrix::from_rows(rows)?),
            InstanceDoc::DiscreteEntropy { alphabet, probs } => {
                discrete_entropy_fn(&JointPmf::new(alphabet.clone(), probs.clone())?)
            }
            InstanceDoc::GraphCut { n, edges } => graph_cut_fn(*n, edges)?,
            InstanceDoc::SetCover { weights, sets } => set_cover_fn(weights, sets)?,
            InstanceDoc::UniformMatroid { n, rank } => matroid_rank_fn(&MatroidSpec::Uniform {
                ground_n: *n,
                rank: *rank,
            })?,
            InstanceDoc::PartitionMatroid { blocks, capacities } => {
                let n = blocks.iter().map(Vec::len).sum();
                matroid_rank_fn(&MatroidSpec::Partition {
                    blocks: Partition::from_blocks(blocks, n)?,
                    capacities: capacities.clone(),
                })?
            }
            InstanceDoc::Facility { similarity } => {
                facility_location_fn(&Matrix::from_rows(similarity)?)?
            }
            InstanceDoc::Modular { weights } => modular_fn(weights),
        })
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceFile, String> {
    serde_json::from_str(text).map_err(json_message)
}

pub struct LoadedInstance {
    pub doc: InstanceDoc,
    pub function: SetFunction,
}

/// Reads an instance file. `cap` bounds the ground-set size before any
/// evaluation takes place.
pub fn read_instance(path: &Path, cap: usize) -> Result<LoadedInstance, CliError> {
    let text = read_text(path)?;
    let file = parse_instance(&text).map_err(|msg| CliError::parse(path, msg))?;
    let n = file.instance.ground_size();
    if n > cap {
        return Err(CliError::in_file(
            path,
            condineq_core::Error::GroundTooLarge {
                n,
                cap,
                evaluations: 1u128 << n.min(127),
            },
        ));
    }
    let f = file
        .instance
        .build()
        .map_err(|e| CliError::in_file(path, e))?;
    let label = file.label.unwrap_or_else(|| {
        path.file_stem().map_or_else(
            || f.label().to_string(),
            |s| s.to_string_lossy().into_owned(),
        )
    });
    Ok(LoadedInstance {
        doc: file.instance,
        function: f.with_label(label),
    })
}

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|_| tmp.flush())
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
