//! JSON documents read and written by `gammactl`.

use std::fs;
use std::io::Write;
use std::path::Path;

use gamma_core::von_neumann::MatrixPolynomial;
use gamma_core::ComplexMatrix;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// `{"rows": r, "cols": c, "data": [[re, im], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let z = m[(r, c)];
                data.push([z.re, z.im]);
            }
        }
        Self { rows, cols, data }
    }

    pub fn validate(&self) -> CliResult<()> {
        let expected = self.rows.checked_mul(self.cols);
        if expected != Some(self.data.len()) {
            return Err(CliError::Invalid(format!(
                "matrix declares {}x{} but has {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        if let Some(k) = self.data.iter().position(|[re, im]| !re.is_finite() || !im.is_finite()) {
            return Err(CliError::Invalid(format!("entry {k} is not finite")));
        }
        Ok(())
    }

    pub fn to_matrix(&self) -> CliResult<ComplexMatrix> {
        self.validate()?;
        Ok(ComplexMatrix::from_fn(self.rows, self.cols, |r, c| {
            let [re, im] = self.data[r * self.cols + c];
            Complex64::new(re, im)
        }))
    }
}

/// A pair document: `{"s": MatrixFile, "p": MatrixFile, ...}`. Extra fields are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFile {
    pub s: MatrixFile,
    pub p: MatrixFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub i: usize,
    pub j: usize,
    pub coeff: MatrixFile,
}

/// `{"size": k, "terms": [{"i": 1, "j": 0, "coeff": MatrixFile}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialFile {
    pub size: usize,
    pub terms: Vec<TermFile>,
}

impl PolynomialFile {
    pub fn to_polynomial(&self) -> CliResult<MatrixPolynomial> {
        let mut poly = MatrixPolynomial::zero(self.size);
        for t in &self.terms {
            poly.add_term(t.i, t.j, &t.coeff.to_matrix()?)?;
        }
        Ok(poly)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_json(path, &text)
}

pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a matrix file, field `key` of a document holding one, or field `key`
/// of instance `index` of a `gammactl gen` document.
pub fn read_matrix_doc(path: &Path, index: usize, key: &str) -> CliResult<ComplexMatrix> {
    let value: Value = read_json(path)?;
    let value = match value.get("instances") {
        Some(Value::Array(items)) => items.get(index).cloned().ok_or_else(|| missing_instance(path, index, items.len()))?,
        _ => value,
    };
    let doc = match value.get(key) {
        Some(inner) if value.get("rows").is_none() => inner.clone(),
        _ => value,
    };
    let file: MatrixFile = serde_json::from_value(doc).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    file.to_matrix()
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn missing_instance(path: &Path, index: usize, len: usize) -> CliError {
    CliError::Invalid(format!("{}: instance {index} requested, file has {len}", path.display()))
}

/// Reads a pair document, or instance `index` of a `gammactl gen` document.
pub fn read_pair_file(path: &Path, index: usize) -> CliResult<(ComplexMatrix, ComplexMatrix)> {
    let value: Value = read_json(path)?;
    let doc = match value.get("instances") {
        Some(Value::Array(items)) => items.get(index).cloned().ok_or_else(|| missing_instance(path, index, items.len()))?,
        _ => value,
    };
    let pair: PairFile = serde_json::from_value(doc).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    let wrap = |e: CliError| CliError::Invalid(format!("{}: {e}", path.display()));
    Ok((pair.s.to_matrix().map_err(wrap)?, pair.p.to_matrix().map_err(wrap)?))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let mut file = fs::File::create(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
