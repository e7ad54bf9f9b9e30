//! Plain-text formats: signal CSV, annotation CSV and feature CSV.
//!
//! * Signal: optional `# sample_rate=<Hz>` header, then one value per line or
//!   `time,value` pairs. Other `#` lines and blank lines are ignored, and a
//!   single non-numeric header row (e.g. `time,value`) is allowed first.
//! * Annotations: `index,label` with label `regular` or `irregular`.
//! * Features: `r_index,label,C0,...,C{M-1}`; the label may be empty.

use std::fmt::Write as _;

use super::{Annotation, BeatLabel, EcgRecord, LabeledFeature, PipelineError, Result};

fn parse_err(line: usize, message: impl Into<String>) -> PipelineError {
    PipelineError::Parse {
        line,
        message: message.into(),
    }
}

/// Meaningful lines with 1-based line numbers; comment lines are passed to
/// `on_comment`.
fn data_lines<'a>(
    text: &'a str,
    mut on_comment: impl FnMut(usize, &'a str) -> Result<()>,
) -> Result<Vec<(usize, &'a str)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            on_comment(i + 1, comment.trim())?;
            continue;
        }
        out.push((i + 1, line));
    }
    Ok(out)
}

fn fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn is_numeric_row(line: &str) -> bool {
    fields(line).iter().all(|f| f.parse::<f64>().is_ok())
}

/// Parses a signal CSV. `sample_rate` overrides the header; with neither, a
/// `time,value` file falls back to the spacing of its first two time stamps.
pub fn read_signal_csv(text: &str, sample_rate: Option<f64>) -> Result<EcgRecord> {
    let mut header_rate = None;
    let lines = data_lines(text, |line, comment| {
        if let Some(v) = comment.strip_prefix("sample_rate") {
            let v = v.trim_start().trim_start_matches(['=', ':']).trim();
            let rate = v
                .parse::<f64>()
                .map_err(|_| parse_err(line, format!("bad sample rate `{v}`")))?;
            header_rate = Some(rate);
        }
        Ok(())
    })?;
    let mut rows = lines.as_slice();
    if let Some(&(_, first)) = rows.first() {
        if !is_numeric_row(first) {
            rows = &rows[1..];
        }
    }
    if rows.is_empty() {
        return Err(PipelineError::InvalidRecord("signal file contains no samples".into()));
    }
    let width = fields(rows[0].1).len();
    if width != 1 && width != 2 {
        return Err(parse_err(rows[0].0, format!("expected 1 or 2 columns, found {width}")));
    }
    let mut times = Vec::new();
    let mut values = Vec::with_capacity(rows.len());
    for &(line, row) in rows {
        let f = fields(row);
        if f.len() != width {
            return Err(parse_err(line, format!("expected {width} columns, found {}", f.len())));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| parse_err(line, format!("`{s}` is not a number")))
        };
        if width == 2 {
            times.push(parse(f[0])?);
        }
        let v = parse(f[width - 1])?;
        if !v.is_finite() {
            return Err(parse_err(line, format!("sample `{}` is not finite", f[width - 1])));
        }
        values.push(v);
    }
    let rate = match sample_rate.or(header_rate) {
        Some(r) => r,
        None if times.len() >= 2 && times[1] > times[0] => 1.0 / (times[1] - times[0]),
        None => return Err(PipelineError::MissingSampleRate),
    };
    EcgRecord::new(rate, values)
}

/// One value per line under a `# sample_rate=` header. Values use the
/// shortest representation that parses back to the same f64.
pub fn write_signal_csv(record: &EcgRecord) -> String {
    let mut s = String::with_capacity(record.len() * 12);
    let _ = writeln!(s, "# sample_rate={}", record.sample_rate());
    for v in record.samples() {
        let _ = writeln!(s, "{v}");
    }
    s
}

pub fn read_annotations_csv(text: &str) -> Result<Vec<Annotation>> {
    let lines = data_lines(text, |_, _| Ok(()))?;
    let mut out = Vec::with_capacity(lines.len());
    for (k, &(line, row)) in lines.iter().enumerate() {
        let f = fields(row);
        if k == 0 && f.first().is_some_and(|s| s.eq_ignore_ascii_case("index")) {
            continue;
        }
        if f.len() != 2 {
            return Err(parse_err(
                line,
                format!("expected `index,label`, found {} columns", f.len()),
            ));
        }
        let index = f[0]
            .parse::<usize>()
            .map_err(|_| parse_err(line, format!("`{}` is not a sample index", f[0])))?;
        let label = f[1].parse::<BeatLabel>().map_err(|e| parse_err(line, e))?;
        out.push(Annotation { index, label });
    }
    Ok(out)
}

pub fn write_annotations_csv(annotations: &[Annotation]) -> String {
    let mut s = String::from("index,label\n");
    for a in annotations {
        let _ = writeln!(s, "{},{}", a.index, a.label);
    }
    s
}

/// A parsed feature-CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub r_index: usize,
    pub label: Option<BeatLabel>,
    pub values: Vec<f64>,
}

impl From<&LabeledFeature> for FeatureRow {
    fn from(f: &LabeledFeature) -> Self {
        Self {
            r_index: f.r_index,
            label: f.label,
            values: f.features.values().to_vec(),
        }
    }
}

pub fn write_features_csv(rows: &[FeatureRow]) -> String {
    let order = rows.first().map_or(0, |r| r.values.len());
    let mut s = String::from("r_index,label");
    for n in 0..order {
        let _ = write!(s, ",C{n}");
    }
    s.push('\n');
    for r in rows {
        let _ = write!(s, "{},{}", r.r_index, r.label.map_or("", BeatLabel::as_str));
        for v in &r.values {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

pub fn read_features_csv(text: &str) -> Result<Vec<FeatureRow>> {
    let lines = data_lines(text, |_, _| Ok(()))?;
    let Some(&(hline, header)) = lines.first() else {
        return Err(PipelineError::Parse {
            line: 1,
            message: "feature file is empty".into(),
        });
    };
    let cols = fields(header);
    if cols.len() < 3 || cols[0] != "r_index" || cols[1] != "label" {
        return Err(parse_err(hline, "expected header `r_index,label,C0,...`"));
    }
    for (n, c) in cols[2..].iter().enumerate() {
        if *c != format!("C{n}") {
            return Err(parse_err(hline, format!("expected column C{n}, found `{c}`")));
        }
    }
    let order = cols.len() - 2;
    let mut out = Vec::with_capacity(lines.len() - 1);
    for &(line, row) in &lines[1..] {
        let f = fields(row);
        if f.len() != order + 2 {
            return Err(parse_err(
                line,
                format!("expected {} columns, found {}", order + 2, f.len()),
            ));
        }
        let r_index = f[0]
            .parse::<usize>()
            .map_err(|_| parse_err(line, format!("`{}` is not a sample index", f[0])))?;
        let label = if f[1].is_empty() {
            None
        } else {
            Some(f[1].parse::<BeatLabel>().map_err(|e| parse_err(line, e))?)
        };
        let values = f[2..]
            .iter()
            .map(|s| match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(parse_err(line, format!("`{s}` is not a finite number"))),
            })
            .collect::<Result<Vec<f64>>>()?;
        out.push(FeatureRow { r_index, label, values });
    }
    Ok(out)
}
