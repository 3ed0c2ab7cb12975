//! On-disk JSON formats for single matrices and POVMs.
//!
//! Matrices are stored as split real and imaginary parts, each a list of
//! rows:
//!
//! ```json
//! {"kind": "choi", "sys_dim": 2, "re": [[0.5, 0.0, ...], ...], "im": [[...], ...]}
//! {"kind": "povm", "dim": 2, "elements": [{"re": [[...]], "im": [[...]]}, ...]}
//! ```
//!
//! Numbers are written in shortest round-trip form, so loading and storing a
//! valid file reproduces it byte for byte.

use std::fs;
use std::io::Write;
use std::path::Path;

use projtomo::matcore::{c64, Mat};
use projtomo::{ChoiCandidate, HermitianMatrix, PovmCandidate};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Entrywise Hermiticity tolerance applied when loading.
pub const LOAD_HERMITICITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FileJson {
    Choi {
        sys_dim: usize,
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
    },
    Hermitian {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sys_dim: Option<usize>,
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
    },
    Povm {
        dim: usize,
        elements: Vec<MatrixJson>,
    },
}

/// A validated input or output object.
#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Choi(ChoiCandidate),
    /// A bare Hermitian matrix, treated as a density-matrix candidate.
    Hermitian(HermitianMatrix),
    Povm(PovmCandidate),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Choi(_) => "choi",
            Document::Hermitian(_) => "hermitian",
            Document::Povm(_) => "povm",
        }
    }

    pub fn from_json(json: FileJson) -> Result<Self, CliError> {
        match json {
            FileJson::Choi { sys_dim, re, im } => {
                let m = matrix_from_parts(&re, &im, "matrix")?;
                if sys_dim == 0 || m.dim() != sys_dim * sys_dim {
                    return Err(CliError::Malformed(format!(
                        "choi matrix is {0}x{0} but sys_dim {sys_dim} requires {1}x{1}",
                        m.dim(),
                        sys_dim * sys_dim
                    )));
                }
                Ok(Document::Choi(ChoiCandidate::new(sys_dim, m)?))
            }
            FileJson::Hermitian { re, im, .. } => Ok(Document::Hermitian(matrix_from_parts(&re, &im, "matrix")?)),
            FileJson::Povm { dim, elements } => {
                if elements.is_empty() {
                    return Err(CliError::Malformed("povm has no elements".into()));
                }
                let elements = elements
                    .iter()
                    .enumerate()
                    .map(|(n, e)| {
                        let m = matrix_from_parts(&e.re, &e.im, &format!("element {n}"))?;
                        if m.dim() != dim {
                            return Err(CliError::Malformed(format!("element {n} is {0}x{0}, expected {dim}x{dim}", m.dim())));
                        }
                        Ok(m)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Document::Povm(PovmCandidate::new(elements)?))
            }
        }
    }

    pub fn to_json(&self) -> FileJson {
        match self {
            Document::Choi(c) => {
                let (re, im) = matrix_to_parts(c.matrix());
                FileJson::Choi { sys_dim: c.sys_dim(), re, im }
            }
            Document::Hermitian(h) => {
                let (re, im) = matrix_to_parts(h);
                FileJson::Hermitian { sys_dim: None, re, im }
            }
            Document::Povm(p) => FileJson::Povm {
                dim: p.dim(),
                elements: p
                    .elements()
                    .iter()
                    .map(|e| {
                        let (re, im) = matrix_to_parts(e);
                        MatrixJson { re, im }
                    })
                    .collect(),
            },
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let json: FileJson = serde_json::from_str(text).map_err(|e| CliError::Malformed(e.to_string()))?;
        Self::from_json(json)
    }

    pub fn to_string(&self) -> String {
        let mut s = serde_json::to_string(&self.to_json()).expect("finite values serialize");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Malformed(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn store(&self, path: Option<&Path>) -> Result<(), CliError> {
        let text = self.to_string();
        match path {
            Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
            None => std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
        }
    }
}

fn matrix_from_parts(re: &[Vec<f64>], im: &[Vec<f64>], what: &str) -> Result<HermitianMatrix, CliError> {
    let n = re.len();
    if n == 0 {
        return Err(CliError::Malformed(format!("{what} is empty")));
    }
    if im.len() != n || re.iter().chain(im).any(|row| row.len() != n) {
        return Err(CliError::Malformed(format!("{what}: re and im must both be {n}x{n}")));
    }
    if re.iter().chain(im).flatten().any(|v| !v.is_finite()) {
        return Err(CliError::Malformed(format!("{what} has non-finite entries")));
    }
    let m = Mat::from_fn(n, n, |i, j| c64::new(re[i][j], im[i][j]));
    HermitianMatrix::with_tolerance(m, LOAD_HERMITICITY_TOL)
        .map_err(|e| CliError::Malformed(format!("{what}: {e}")))
}

fn matrix_to_parts(m: &HermitianMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = m.dim();
    let re = (0..n).map(|i| (0..n).map(|j| m.get(i, j).re).collect()).collect();
    let im = (0..n).map(|i| (0..n).map(|j| m.get(i, j).im).collect()).collect();
    (re, im)
}
