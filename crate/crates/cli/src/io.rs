//! Matrix Market text I/O for dense complex matrices.
//!
//! Supported headers:
//! `%%MatrixMarket matrix array {complex|real|integer} general` with a
//! column-major body, and the `coordinate` variant with 1-based indices.
//! Real and integer fields are promoted to complex with zero imaginary
//! parts. Values are written with 17 significant digits, so a write/read
//! round trip reproduces every entry exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use trishift::DenseMatrix;

use crate::fmt::g17;

#[derive(Debug)]
pub enum IoError {
    Parse { path: PathBuf, line: usize, msg: String },
    Io { path: PathBuf, source: std::io::Error },
}

impl std::fmt::Display for IoError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IoError::Parse { path, line, msg } => {
                write!(f, "{}:{line}: {msg}", path.display())
            }
            IoError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for IoError {}

fn parse_err<T>(path: &Path, line: usize, msg: impl Into<String>) -> Result<T, IoError> {
    Err(IoError::Parse { path: path.to_path_buf(), line, msg: msg.into() })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum MmFormat {
    Array,
    Coordinate,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum MmField {
    Complex,
    Real,
    Integer,
}

/// Reads a Matrix Market file into a dense matrix.
pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|source| IoError::Io { path: path.to_path_buf(), source })?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or(())
        .or_else(|_| parse_err(path, 1, "empty file; expected a MatrixMarket header"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 5 || tokens[0] != "%%MatrixMarket" || tokens[1] != "matrix" {
        return parse_err(
            path,
            1,
            "header must read '%%MatrixMarket matrix <array|coordinate> <field> general'",
        );
    }
    let format = match tokens[2] {
        "array" => MmFormat::Array,
        "coordinate" => MmFormat::Coordinate,
        other => return parse_err(path, 1, format!("unsupported format '{other}'")),
    };
    let field = match tokens[3] {
        "complex" => MmField::Complex,
        "real" => MmField::Real,
        "integer" => MmField::Integer,
        other => return parse_err(path, 1, format!("unsupported field '{other}'")),
    };
    if tokens[4] != "general" {
        return parse_err(path, 1, format!("unsupported symmetry '{}'", tokens[4]));
    }

    // size line: first non-comment, non-empty line
    let mut size_line = None;
    for (idx, line) in lines.by_ref() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        size_line = Some((idx + 1, trimmed));
        break;
    }
    let Some((size_lineno, size_text)) = size_line else {
        return parse_err(path, 1, "missing size line");
    };
    let dims: Vec<&str> = size_text.split_whitespace().collect();

    let parse_dim = |tok: &str, what: &str| -> Result<usize, IoError> {
        tok.parse::<usize>()
            .or_else(|_| parse_err(path, size_lineno, format!("cannot parse {what} '{tok}'")))
    };

    match format {
        MmFormat::Array => {
            if dims.len() != 2 {
                return parse_err(path, size_lineno, "array size line must be '<rows> <cols>'");
            }
            let rows = parse_dim(dims[0], "row count")?;
            let cols = parse_dim(dims[1], "column count")?;
            let mut data = Vec::with_capacity(rows * cols);
            for (idx, line) in lines {
                let lineno = idx + 1;
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('%') {
                    continue;
                }
                if data.len() == rows * cols {
                    return parse_err(path, lineno, "more entries than the size line declares");
                }
                data.push(parse_value(path, lineno, trimmed, field)?);
            }
            if data.len() != rows * cols {
                return parse_err(
                    path,
                    size_lineno,
                    format!("expected {} entries, found {}", rows * cols, data.len()),
                );
            }
            Ok(DenseMatrix::from_fn(rows, cols, |i, j| data[j * rows + i]))
        }
        MmFormat::Coordinate => {
            if dims.len() != 3 {
                return parse_err(
                    path,
                    size_lineno,
                    "coordinate size line must be '<rows> <cols> <nnz>'",
                );
            }
            let rows = parse_dim(dims[0], "row count")?;
            let cols = parse_dim(dims[1], "column count")?;
            let nnz = parse_dim(dims[2], "entry count")?;
            let mut out = DenseMatrix::zeros(rows, cols);
            let mut seen = 0usize;
            for (idx, line) in lines {
                let lineno = idx + 1;
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('%') {
                    continue;
                }
                if seen == nnz {
                    return parse_err(path, lineno, "more entries than the size line declares");
                }
                let mut toks = trimmed.split_whitespace();
                let i: usize = toks
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or(())
                    .or_else(|_| parse_err(path, lineno, "cannot parse row index"))?;
                let j: usize = toks
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or(())
                    .or_else(|_| parse_err(path, lineno, "cannot parse column index"))?;
                if i < 1 || i > rows || j < 1 || j > cols {
                    return parse_err(path, lineno, format!("index ({i},{j}) out of bounds"));
                }
                let rest: Vec<&str> = toks.collect();
                let value = parse_value(path, lineno, &rest.join(" "), field)?;
                out[(i - 1, j - 1)] = value;
                seen += 1;
            }
            if seen != nnz {
                return parse_err(
                    path,
                    size_lineno,
                    format!("expected {nnz} entries, found {seen}"),
                );
            }
            Ok(out)
        }
    }
}

fn parse_value(path: &Path, lineno: usize, text: &str, field: MmField) -> Result<Complex64, IoError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    let want = if field == MmField::Complex { 2 } else { 1 };
    if toks.len() != want {
        return parse_err(
            path,
            lineno,
            format!("expected {want} value token(s), found {}", toks.len()),
        );
    }
    let re: f64 = toks[0]
        .parse()
        .or_else(|_| parse_err(path, lineno, format!("cannot parse value '{}'", toks[0])))?;
    let im: f64 = if field == MmField::Complex {
        toks[1]
            .parse()
            .or_else(|_| parse_err(path, lineno, format!("cannot parse value '{}'", toks[1])))?
    } else {
        0.0
    };
    Ok(Complex64::new(re, im))
}

/// Renders a dense matrix in array/complex/general form. `pre_comments`
/// go right after the header; `post_comments` after the data (scale
/// factors ride along there, keeping the file valid Matrix Market).
pub fn render_matrix(
    m: &DenseMatrix,
    pre_comments: &[String],
    post_comments: &[String],
) -> String {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix array complex general\n");
    for c in pre_comments {
        let _ = writeln!(out, "%{c}");
    }
    let _ = writeln!(out, "{} {}", m.rows(), m.cols());
    for j in 0..m.cols() {
        for z in m.col(j) {
            let _ = writeln!(out, "{} {}", g17(z.re), g17(z.im));
        }
    }
    for c in post_comments {
        let _ = writeln!(out, "%{c}");
    }
    out
}

/// Writes atomically: the content lands in a temporary file that is
/// renamed over the target.
pub fn write_atomic(path: impl AsRef<Path>, content: &[u8]) -> Result<(), IoError> {
    let path = path.as_ref();
    let tmp = path.with_extension(format!(
        "{}.tmp{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or(""),
        std::process::id()
    ));
    let res = fs::write(&tmp, content).and_then(|_| fs::rename(&tmp, path));
    res.map_err(|source| {
        let _ = fs::remove_file(&tmp);
        IoError::Io { path: path.to_path_buf(), source }
    })
}

/// Writes a matrix (with optional comment blocks) to `path`.
pub fn write_matrix(
    path: impl AsRef<Path>,
    m: &DenseMatrix,
    pre_comments: &[String],
    post_comments: &[String],
) -> Result<(), IoError> {
    write_atomic(path, render_matrix(m, pre_comments, post_comments).as_bytes())
}
