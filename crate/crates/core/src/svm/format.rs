//! Line-oriented text serialization of [`SvmModel`].
//!
//! ```text
//! hermite-qrs-svm 1
//! kernel rbf <gamma>            | kernel linear | kernel polynomial <degree> <offset>
//! regularization <P>
//! dimension <d>
//! mean <d values>
//! scale <d values>
//! bias <b>
//! support_vectors <n>
//! sv <label> <multiplier> <d values>     (n lines)
//! end
//! ```
//!
//! Floats are written in scientific notation with 17 significant digits, which
//! round-trips every f64 exactly. Blank lines and lines starting with `#` are
//! ignored on load.

use std::fmt::Write as _;

use thiserror::Error;

use super::{KernelSpec, Standardizer, SvmError, SvmModel};

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "hermite-qrs-svm";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelFormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unexpected end of model file (expected `{0}`)")]
    UnexpectedEof(&'static str),
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),
    #[error("invalid model: {0}")]
    Invalid(#[from] SvmError),
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn floats(vs: &[f64]) -> String {
    vs.iter().map(|&v| float(v)).collect::<Vec<_>>().join(" ")
}

pub fn save_model(model: &SvmModel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC} {MODEL_FORMAT_VERSION}");
    match model.kernel() {
        KernelSpec::Linear => s.push_str("kernel linear\n"),
        KernelSpec::Polynomial { degree, offset } => {
            let _ = writeln!(s, "kernel polynomial {degree} {}", float(offset));
        }
        KernelSpec::Rbf { gamma } => {
            let _ = writeln!(s, "kernel rbf {}", float(gamma));
        }
    }
    let _ = writeln!(s, "regularization {}", float(model.regularization()));
    let _ = writeln!(s, "dimension {}", model.dimension());
    let _ = writeln!(s, "mean {}", floats(&model.standardizer().mean));
    let _ = writeln!(s, "scale {}", floats(&model.standardizer().scale));
    let _ = writeln!(s, "bias {}", float(model.bias()));
    let _ = writeln!(s, "support_vectors {}", model.support_vectors().len());
    for ((sv, a), c) in model
        .support_vectors()
        .iter()
        .zip(model.multipliers())
        .zip(model.sv_labels())
    {
        let _ = writeln!(s, "sv {c} {} {}", float(*a), floats(sv));
    }
    s.push_str("end\n");
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next meaningful line split into `(line number, key, rest tokens)`.
    fn next_record(&mut self, expected: &'static str) -> Result<(usize, Vec<&'a str>), ModelFormatError> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens[0] != expected {
                return Err(ModelFormatError::Syntax {
                    line: i + 1,
                    message: format!("expected `{expected}`, found `{}`", tokens[0]),
                });
            }
            return Ok((i + 1, tokens[1..].to_vec()));
        }
        Err(ModelFormatError::UnexpectedEof(expected))
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ModelFormatError {
    ModelFormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, tok: &str) -> Result<f64, ModelFormatError> {
    tok.parse::<f64>()
        .map_err(|_| syntax(line, format!("`{tok}` is not a number")))
}

fn parse_usize(line: usize, tok: &str) -> Result<usize, ModelFormatError> {
    tok.parse::<usize>()
        .map_err(|_| syntax(line, format!("`{tok}` is not a count")))
}

fn expect_len<T>(line: usize, tokens: &[T], n: usize) -> Result<(), ModelFormatError> {
    if tokens.len() == n {
        Ok(())
    } else {
        Err(syntax(line, format!("expected {n} values, found {}", tokens.len())))
    }
}

fn parse_vec(line: usize, tokens: &[&str], n: usize) -> Result<Vec<f64>, ModelFormatError> {
    expect_len(line, tokens, n)?;
    tokens.iter().map(|t| parse_f64(line, t)).collect()
}

pub fn load_model(text: &str) -> Result<SvmModel, ModelFormatError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (line, rest) = lines.next_record(MAGIC)?;
    expect_len(line, &rest, 1)?;
    let version = rest[0]
        .parse::<u32>()
        .map_err(|_| syntax(line, format!("bad version `{}`", rest[0])))?;
    if version != MODEL_FORMAT_VERSION {
        return Err(ModelFormatError::UnsupportedVersion(version));
    }

    let (line, rest) = lines.next_record("kernel")?;
    let kernel = match rest.first().copied() {
        Some("linear") => {
            expect_len(line, &rest, 1)?;
            KernelSpec::Linear
        }
        Some("rbf") => {
            expect_len(line, &rest, 2)?;
            KernelSpec::Rbf {
                gamma: parse_f64(line, rest[1])?,
            }
        }
        Some("polynomial") => {
            expect_len(line, &rest, 3)?;
            let degree = rest[1]
                .parse::<u32>()
                .map_err(|_| syntax(line, format!("bad degree `{}`", rest[1])))?;
            KernelSpec::Polynomial {
                degree,
                offset: parse_f64(line, rest[2])?,
            }
        }
        other => return Err(syntax(line, format!("unknown kernel {other:?}"))),
    };

    let (line, rest) = lines.next_record("regularization")?;
    expect_len(line, &rest, 1)?;
    let regularization = parse_f64(line, rest[0])?;

    let (line, rest) = lines.next_record("dimension")?;
    expect_len(line, &rest, 1)?;
    let dim = parse_usize(line, rest[0])?;

    let (line, rest) = lines.next_record("mean")?;
    let mean = parse_vec(line, &rest, dim)?;
    let (line, rest) = lines.next_record("scale")?;
    let scale = parse_vec(line, &rest, dim)?;

    let (line, rest) = lines.next_record("bias")?;
    expect_len(line, &rest, 1)?;
    let bias = parse_f64(line, rest[0])?;

    let (line, rest) = lines.next_record("support_vectors")?;
    expect_len(line, &rest, 1)?;
    let count = parse_usize(line, rest[0])?;

    let mut svs = Vec::with_capacity(count);
    let mut etas = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for _ in 0..count {
        let (line, rest) = lines.next_record("sv")?;
        expect_len(line, &rest, dim + 2)?;
        let label = rest[0]
            .parse::<i32>()
            .map_err(|_| syntax(line, format!("bad label `{}`", rest[0])))?;
        labels.push(label);
        etas.push(parse_f64(line, rest[1])?);
        svs.push(parse_vec(line, &rest[2..], dim)?);
    }
    lines.next_record("end")?;

    Ok(SvmModel::from_parts(
        kernel,
        regularization,
        Standardizer { mean, scale },
        svs,
        etas,
        labels,
        bias,
    )?)
}
