use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use hermite_qrs::hermite::HermiteBasis;
use hermite_qrs::metrics::{confusion, ConfusionMatrix};
use hermite_qrs::pipeline::{
    detect_r_peaks, process_record, read_annotations_csv, read_features_csv, read_signal_csv, synthesize_dataset,
    write_annotations_csv, write_features_csv, write_signal_csv, BeatLabel, EcgRecord, FeatureRow, PipelineConfig,
    PipelineError, RecordFeatures, SynthConfig,
};
use hermite_qrs::svm::{kkt_report, load_model, save_model, train as train_svm, SvmModel, TrainingSet};

use crate::error::{Categorize, Category, CliError, CliResult};
use crate::{
    DetectArgs, EvaluateArgs, FeatureSource, PipelineArgs, PredictArgs, SignalArgs, SynthArgs, TrainArgs, TransformArgs,
};

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).category_with(Category::Io, || format!("cannot read {}", path.display()))
}

/// `dir/name.csv` becomes `dir/name.<tag>.csv`.
pub fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.{tag}.csv"))
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

/// Writes every output only after all of them are computed, refusing to
/// overwrite an input or to write one path twice.
pub fn write_outputs(inputs: &[&Path], outputs: &[(PathBuf, String)]) -> CliResult<()> {
    for (k, (out, _)) in outputs.iter().enumerate() {
        if let Some(input) = inputs.iter().find(|i| same_file(i, out)) {
            return Err(CliError::new(
                Category::Config,
                format!("output {} would overwrite input {}", out.display(), input.display()),
            ));
        }
        if outputs[..k].iter().any(|(o, _)| same_file(o, out)) {
            return Err(CliError::new(
                Category::Config,
                format!("{} is named as more than one output", out.display()),
            ));
        }
    }
    for (out, text) in outputs {
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).category_with(Category::Io, || format!("cannot create {}", dir.display()))?;
        }
        fs::write(out, text).category_with(Category::Io, || format!("cannot write {}", out.display()))?;
    }
    Ok(())
}

pub fn pipeline_category(e: &PipelineError) -> Category {
    match e {
        PipelineError::Parse { .. } | PipelineError::MissingSampleRate => Category::Parse,
        PipelineError::InvalidRecord(_) | PipelineError::MissingAnnotations => Category::Data,
        _ => Category::Config,
    }
}

fn pipeline_err(path: Option<&Path>) -> impl Fn(PipelineError) -> CliError + '_ {
    move |e| {
        let category = pipeline_category(&e);
        let error = match path {
            Some(p) => anyhow::Error::new(e).context(p.display().to_string()),
            None => anyhow::Error::new(e),
        };
        CliError { category, error }
    }
}

fn load_record(signal: &Path, annotations: Option<&Path>, sample_rate: Option<f64>) -> CliResult<EcgRecord> {
    let record = read_signal_csv(&read_text(signal)?, sample_rate).map_err(pipeline_err(Some(signal)))?;
    match annotations {
        None => Ok(record),
        Some(path) => {
            let ann = read_annotations_csv(&read_text(path)?).map_err(pipeline_err(Some(path)))?;
            record.with_annotations(ann).map_err(pipeline_err(Some(path)))
        }
    }
}

fn pipeline_setup(args: &PipelineArgs) -> CliResult<(PipelineConfig, HermiteBasis)> {
    let config = args.config();
    config.validate().map_err(pipeline_err(None))?;
    let basis = HermiteBasis::new(config.order).category(Category::Config)?;
    Ok((config, basis))
}

fn extract(record: &EcgRecord, basis: &HermiteBasis, config: &PipelineConfig) -> CliResult<RecordFeatures> {
    let out = process_record(record, "input", basis, config).map_err(pipeline_err(None))?;
    if out.features.is_empty() {
        return Err(CliError::new(
            Category::Data,
            format!(
                "no complete beats found ({} peaks, {} too close to the record edges)",
                out.peaks.len(),
                out.dropped
            ),
        ));
    }
    Ok(out)
}

pub fn synth(args: &SynthArgs) -> CliResult<()> {
    let config = SynthConfig {
        sample_rate: args.sample_rate,
        ..SynthConfig::default()
    };
    let record = synthesize_dataset(&config, args.count, args.snr, args.seed).map_err(pipeline_err(None))?;
    let annotations = args
        .annotations
        .clone()
        .unwrap_or_else(|| sibling(&args.out, "annotations"));
    let ann = record.annotations().unwrap_or_default();
    write_outputs(
        &[],
        &[
            (args.out.clone(), write_signal_csv(&record)),
            (annotations.clone(), write_annotations_csv(ann)),
        ],
    )?;
    println!(
        "wrote {} samples at {} Hz and {} annotations to {} and {}",
        record.len(),
        record.sample_rate(),
        ann.len(),
        args.out.display(),
        annotations.display()
    );
    Ok(())
}

pub fn detect(args: &DetectArgs) -> CliResult<()> {
    let SignalArgs {
        signal,
        annotations,
        sample_rate,
    } = &args.input;
    let (config, _) = pipeline_setup(&args.pipeline)?;
    let record = load_record(signal, annotations.as_deref(), *sample_rate)?;
    let peaks = detect_r_peaks(&record, &config);
    let mut text = String::from("index\n");
    for p in &peaks {
        let _ = writeln!(text, "{p}");
    }
    let mut inputs = vec![signal.as_path()];
    inputs.extend(annotations.as_deref());
    write_outputs(&inputs, &[(args.out.clone(), text)])?;
    println!("{} R peaks written to {}", peaks.len(), args.out.display());
    Ok(())
}

/// Per-coefficient class statistics and the pooled between/within variance ratio.
fn class_summary(rows: &[FeatureRow], order: usize) -> (String, Option<f64>) {
    let class = |l| -> Vec<&[f64]> {
        rows.iter()
            .filter(|r| r.label == Some(l))
            .map(|r| r.values.as_slice())
            .collect()
    };
    let regular = class(BeatLabel::Regular);
    let irregular = class(BeatLabel::Irregular);
    let mut s = String::from(
        "coefficient,mean_regular,mean_irregular,std_regular,std_irregular,between_variance,within_variance\n",
    );
    if regular.is_empty() || irregular.is_empty() {
        return (s, None);
    }
    let stats = |v: &[&[f64]], n: usize| {
        let mean = v.iter().map(|x| x[n]).sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x[n] - mean).powi(2)).sum::<f64>() / v.len() as f64;
        (mean, var)
    };
    let total = (regular.len() + irregular.len()) as f64;
    let (wr, wi) = (regular.len() as f64 / total, irregular.len() as f64 / total);
    let (mut between_sum, mut within_sum) = (0.0, 0.0);
    for n in 0..order {
        let (mr, vr) = stats(&regular, n);
        let (mi, vi) = stats(&irregular, n);
        let grand = wr * mr + wi * mi;
        let between = wr * (mr - grand).powi(2) + wi * (mi - grand).powi(2);
        let within = wr * vr + wi * vi;
        between_sum += between;
        within_sum += within;
        let _ = writeln!(
            s,
            "C{n},{mr:.10e},{mi:.10e},{:.10e},{:.10e},{between:.10e},{within:.10e}",
            vr.sqrt(),
            vi.sqrt()
        );
    }
    let ratio = between_sum / within_sum;
    (s, Some(ratio))
}

pub fn transform(args: &TransformArgs) -> CliResult<()> {
    let SignalArgs {
        signal,
        annotations,
        sample_rate,
    } = &args.input;
    let (config, basis) = pipeline_setup(&args.pipeline)?;
    let record = load_record(signal, annotations.as_deref(), *sample_rate)?;
    let out = extract(&record, &basis, &config)?;

    let rows: Vec<FeatureRow> = out.features.iter().map(FeatureRow::from).collect();
    let mut errors = String::from("r_index,label,max_abs_error,relative_error\n");
    let mut worst: f64 = 0.0;
    for (f, samples) in out.features.iter().zip(&out.node_samples) {
        let back = basis.inverse(&f.features).category(Category::Data)?;
        let abs = back.iter().zip(samples).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let rel = if scale > 0.0 { abs / scale } else { abs };
        worst = worst.max(rel);
        let _ = writeln!(
            errors,
            "{},{},{abs:.6e},{rel:.6e}",
            f.r_index,
            f.label.map_or("", BeatLabel::as_str)
        );
    }
    let (mut summary, ratio) = class_summary(&rows, config.order);
    if let Some(r) = ratio {
        let _ = writeln!(summary, "variance_ratio,,,,,{r:.10e},");
    }

    let errors_path = args.errors.clone().unwrap_or_else(|| sibling(&args.out, "errors"));
    let summary_path = args.summary.clone().unwrap_or_else(|| sibling(&args.out, "summary"));
    let mut inputs = vec![signal.as_path()];
    inputs.extend(annotations.as_deref());
    write_outputs(
        &inputs,
        &[
            (args.out.clone(), write_features_csv(&rows)),
            (errors_path, errors),
            (summary_path, summary),
        ],
    )?;
    println!(
        "{} beats x {} coefficients ({} dropped at record edges); max relative round-trip error {worst:.3e}",
        rows.len(),
        config.order,
        out.dropped
    );
    if let Some(r) = ratio {
        println!("between/within class variance ratio {r:.4}");
    }
    Ok(())
}

fn labeled(rows: &[FeatureRow]) -> (Vec<Vec<f64>>, Vec<i32>) {
    rows.iter()
        .filter_map(|r| r.label.map(|l| (r.values.clone(), l.class())))
        .unzip()
}

fn load_features(path: &Path) -> CliResult<Vec<FeatureRow>> {
    let rows = read_features_csv(&read_text(path)?).map_err(pipeline_err(Some(path)))?;
    if rows.is_empty() {
        return Err(CliError::new(
            Category::Data,
            format!("{}: feature file has no rows", path.display()),
        ));
    }
    Ok(rows)
}

fn source_rows(source: &FeatureSource, pipeline: &PipelineArgs) -> CliResult<(Vec<FeatureRow>, Vec<PathBuf>)> {
    match (&source.features, &source.signal, &source.annotations) {
        (Some(f), None, _) => Ok((load_features(f)?, vec![f.clone()])),
        (None, Some(s), Some(a)) => {
            let (config, basis) = pipeline_setup(pipeline)?;
            let record = load_record(s, Some(a), source.sample_rate)?;
            let out = extract(&record, &basis, &config)?;
            Ok((
                out.features.iter().map(FeatureRow::from).collect(),
                vec![s.clone(), a.clone()],
            ))
        }
        _ => Err(CliError::new(
            Category::Config,
            "give either --features or --signal with --annotations",
        )),
    }
}

fn check_dimension(model: &SvmModel, rows: &[FeatureRow], path: &Path) -> CliResult<()> {
    if let Some(r) = rows.iter().find(|r| r.values.len() != model.dimension()) {
        return Err(CliError::new(
            Category::Data,
            format!(
                "{}: features have dimension {} but the model expects {}",
                path.display(),
                r.values.len(),
                model.dimension()
            ),
        ));
    }
    Ok(())
}

pub fn load_model_file(path: &Path) -> CliResult<SvmModel> {
    load_model(&read_text(path)?).category_with(Category::Parse, || path.display().to_string())
}

fn report_csv(pairs: &[(String, String)]) -> String {
    let mut s = String::from("key,value\n");
    for (k, v) in pairs {
        let _ = writeln!(s, "{k},{v}");
    }
    s
}

pub fn train(args: &TrainArgs) -> CliResult<()> {
    let (rows, inputs) = source_rows(&args.source, &args.pipeline)?;
    let (points, labels) = labeled(&rows);
    let skipped = rows.len() - points.len();
    if points.is_empty() {
        return Err(CliError::new(Category::Data, "no labelled beats to train on"));
    }
    let data = TrainingSet::new(points, labels).category(Category::Data)?;
    let kernel = args.solver.kernel(data.dimension());
    let config = args.solver.config();
    config.validate().category(Category::Config)?;
    kernel.validate().category(Category::Config)?;
    let t = train_svm(&data, &config, kernel).category(Category::Data)?;
    let kkt = kkt_report(&t.model, &data, config.tolerance).category(Category::Data)?;
    let predictions: Vec<i32> = data
        .points()
        .iter()
        .map(|p| t.model.predict(p))
        .collect::<Result<_, _>>()
        .category(Category::Data)?;
    let cm = confusion(&predictions, data.labels()).category(Category::Data)?;

    let mut pairs: Vec<(String, String)> = vec![
        ("converged".into(), t.converged.to_string()),
        ("iterations".into(), t.iterations.to_string()),
        ("final_violation".into(), format!("{:.6e}", t.final_violation)),
        ("tolerance".into(), format!("{:e}", config.tolerance)),
        ("objective".into(), format!("{:.10e}", t.objective)),
        ("kernel".into(), kernel.to_string()),
        ("regularization".into(), config.regularization.to_string()),
        ("training_points".into(), data.len().to_string()),
        ("unlabelled_skipped".into(), skipped.to_string()),
        ("support_vectors".into(), t.model.support_vectors().len().to_string()),
        ("kkt_max_violation".into(), format!("{:.6e}", kkt.max_violation)),
        ("kkt_offenders".into(), kkt.offenders.to_string()),
    ];
    pairs.extend(cm.report().into_iter().map(|(k, v)| (format!("train_{k}"), v)));

    let report_path = args.report.clone().unwrap_or_else(|| sibling(&args.model, "report"));
    let input_refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    write_outputs(
        &input_refs,
        &[
            (args.model.clone(), save_model(&t.model)),
            (report_path, report_csv(&pairs)),
        ],
    )?;
    println!(
        "trained on {} beats: {} support vectors, {} iterations, KKT max violation {:.3e} ({} offenders)",
        data.len(),
        t.model.support_vectors().len(),
        t.iterations,
        kkt.max_violation,
        kkt.offenders
    );
    print!("{cm}");
    if !t.converged {
        return Err(CliError::new(
            Category::Convergence,
            format!(
                "solver stopped after {} iterations with KKT violation {:.3e} above tolerance {:e}; model written and flagged",
                t.iterations, t.final_violation, config.tolerance
            ),
        ));
    }
    Ok(())
}

pub fn predict(args: &PredictArgs) -> CliResult<()> {
    let model = load_model_file(&args.model)?;
    let rows = load_features(&args.features)?;
    check_dimension(&model, &rows, &args.features)?;
    let mut text = String::from("r_index,truth,predicted,decision\n");
    let mut irregular = 0;
    for r in &rows {
        let f = model.decision_value(&r.values).category(Category::Data)?;
        let class = model.predict(&r.values).category(Category::Data)?;
        let label = BeatLabel::from_class(class).unwrap_or(BeatLabel::Irregular);
        irregular += usize::from(label == BeatLabel::Irregular);
        let _ = writeln!(
            text,
            "{},{},{},{f:e}",
            r.r_index,
            r.label.map_or("", BeatLabel::as_str),
            label
        );
    }
    write_outputs(&[&args.model, &args.features], &[(args.out.clone(), text)])?;
    println!(
        "{} beats classified: {irregular} irregular, {} regular",
        rows.len(),
        rows.len() - irregular
    );
    Ok(())
}

/// Reads `truth` and `predicted` columns from a CSV with a header row.
fn read_prediction_pairs(path: &Path) -> CliResult<(Vec<i32>, Vec<i32>)> {
    let text = read_text(path)?;
    let parse_err =
        |line: usize, msg: String| CliError::new(Category::Parse, format!("{}: line {line}: {msg}", path.display()));
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let Some((hline, header)) = lines.next() else {
        return Err(CliError::new(
            Category::Data,
            format!("{}: prediction file is empty", path.display()),
        ));
    };
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| {
        cols.iter()
            .position(|c| *c == name)
            .ok_or_else(|| parse_err(hline, format!("missing `{name}` column")))
    };
    let (ti, pi) = (find("truth")?, find("predicted")?);
    let (mut truths, mut preds) = (Vec::new(), Vec::new());
    for (line, row) in lines {
        let f: Vec<&str> = row.split(',').map(str::trim).collect();
        if f.len() != cols.len() {
            return Err(parse_err(
                line,
                format!("expected {} columns, found {}", cols.len(), f.len()),
            ));
        }
        let label = |s: &str| {
            s.parse::<BeatLabel>()
                .map(BeatLabel::class)
                .map_err(|e| parse_err(line, e.to_string()))
        };
        if f[ti].is_empty() {
            continue;
        }
        truths.push(label(f[ti])?);
        preds.push(label(f[pi])?);
    }
    Ok((truths, preds))
}

pub fn evaluate(args: &EvaluateArgs) -> CliResult<()> {
    let (truths, preds, inputs): (Vec<i32>, Vec<i32>, Vec<PathBuf>) =
        match (&args.model, &args.features, &args.predictions) {
            (_, _, Some(p)) => {
                let (t, q) = read_prediction_pairs(p)?;
                (t, q, vec![p.clone()])
            }
            (Some(m), Some(f), None) => {
                let model = load_model_file(m)?;
                let rows = load_features(f)?;
                check_dimension(&model, &rows, f)?;
                let (points, truths) = labeled(&rows);
                let preds = points
                    .iter()
                    .map(|p| model.predict(p))
                    .collect::<Result<Vec<_>, _>>()
                    .category(Category::Data)?;
                (truths, preds, vec![m.clone(), f.clone()])
            }
            _ => {
                return Err(CliError::new(
                    Category::Config,
                    "give --predictions, or --model with --features",
                ))
            }
        };
    if truths.is_empty() {
        return Err(CliError::new(Category::Data, "no labelled beats to evaluate"));
    }
    let cm: ConfusionMatrix = confusion(&preds, &truths).category(Category::Data)?;
    if let Some(out) = &args.out {
        let input_refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
        write_outputs(&input_refs, &[(out.clone(), cm.to_csv())])?;
    }
    print!("{cm}");
    Ok(())
}
