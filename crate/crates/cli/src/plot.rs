//! Two-coefficient scatter with the SVM decision boundary.
//!
//! The model lives in the full coefficient space, so the boundary is drawn on
//! a plane through a fixed point: the plotted coordinates vary over a grid and
//! every other coefficient is held at a class-conditional mean. One slice is
//! drawn per class present in the feature file.

use std::fmt::Write as _;

use hermite_qrs::pipeline::{BeatLabel, FeatureRow};
use hermite_qrs::svm::SvmModel;

use crate::commands::{load_model_file, read_text, write_outputs};
use crate::error::{Categorize, Category, CliError, CliResult};
use crate::PlotArgs;

const SIZE: f64 = 640.0;
const PAD: f64 = 60.0;
const REGULAR_COLOR: &str = "#1f77b4";
const IRREGULAR_COLOR: &str = "#d62728";

struct Slice {
    name: &'static str,
    base: Vec<f64>,
    dash: &'static str,
}

#[derive(Debug, Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !lo.is_finite() || hi <= lo {
            let c = if lo.is_finite() { lo } else { 0.0 };
            return Self {
                lo: c - 1.0,
                hi: c + 1.0,
            };
        }
        let pad = 0.05 * (hi - lo);
        Self {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn node(&self, k: usize, n: usize) -> f64 {
        self.lo + (self.hi - self.lo) * k as f64 / (n - 1) as f64
    }
}

fn mean_of(rows: &[&FeatureRow], dim: usize) -> Vec<f64> {
    let mut m = vec![0.0; dim];
    for r in rows {
        for (a, v) in m.iter_mut().zip(&r.values) {
            *a += v;
        }
    }
    m.iter_mut().for_each(|a| *a /= rows.len() as f64);
    m
}

fn slices(rows: &[FeatureRow], dim: usize) -> Vec<Slice> {
    let mut out = Vec::new();
    for (label, name, dash) in [
        (BeatLabel::Regular, "regular", ""),
        (BeatLabel::Irregular, "irregular", "6,4"),
    ] {
        let members: Vec<&FeatureRow> = rows.iter().filter(|r| r.label == Some(label)).collect();
        if !members.is_empty() {
            out.push(Slice {
                name,
                base: mean_of(&members, dim),
                dash,
            });
        }
    }
    if out.is_empty() {
        let all: Vec<&FeatureRow> = rows.iter().collect();
        out.push(Slice {
            name: "all",
            base: mean_of(&all, dim),
            dash: "",
        });
    }
    out
}

/// Line segments of the zero level set of a `n × n` grid, `values[i * n + j]`
/// being the value at the `i`-th x node and `j`-th y node. Saddle cells are
/// resolved with the cell-centre average.
fn marching_squares(values: &[f64], n: usize, x: Range, y: Range) -> Vec<[f64; 4]> {
    let at = |i: usize, j: usize| values[i * n + j];
    let mut segments = Vec::new();
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let v = corners.map(|(a, b)| at(a, b));
            let inside = v.map(|x| x >= 0.0);
            if inside.iter().all(|&s| s) || inside.iter().all(|&s| !s) {
                continue;
            }
            // Edges: bottom (0-1), right (1-2), top (3-2), left (0-3).
            let edges = [(0, 1), (1, 2), (3, 2), (0, 3)];
            let mut cross: [Option<(f64, f64)>; 4] = [None; 4];
            for (e, &(a, b)) in edges.iter().enumerate() {
                if inside[a] != inside[b] {
                    let t = v[a] / (v[a] - v[b]);
                    let (ia, ja) = corners[a];
                    let (ib, jb) = corners[b];
                    let xi = ia as f64 + t * (ib as f64 - ia as f64);
                    let yj = ja as f64 + t * (jb as f64 - ja as f64);
                    let map = |r: Range, u: f64| r.lo + (r.hi - r.lo) * u / (n - 1) as f64;
                    cross[e] = Some((map(x, xi), map(y, yj)));
                }
            }
            let hits: Vec<(f64, f64)> = cross.iter().flatten().copied().collect();
            if hits.len() == 2 {
                segments.push([hits[0].0, hits[0].1, hits[1].0, hits[1].1]);
            } else if hits.len() == 4 {
                let centre = v.iter().sum::<f64>() / 4.0 >= 0.0;
                let pairs = if centre == inside[0] {
                    [(0, 1), (2, 3)]
                } else {
                    [(3, 0), (1, 2)]
                };
                for (a, b) in pairs {
                    let (p, q) = (cross[a].unwrap_or_default(), cross[b].unwrap_or_default());
                    segments.push([p.0, p.1, q.0, q.1]);
                }
            }
        }
    }
    segments
}

fn is_support_vector(model: &SvmModel, values: &[f64]) -> bool {
    model
        .support_vectors()
        .iter()
        .any(|sv| sv.iter().zip(values).all(|(a, b)| a.to_bits() == b.to_bits()))
}

pub fn plot(args: &PlotArgs) -> CliResult<()> {
    let model = load_model_file(&args.model)?;
    let rows = hermite_qrs::pipeline::read_features_csv(&read_text(&args.features)?).map_err(|e| CliError {
        category: crate::commands::pipeline_category(&e),
        error: anyhow::Error::new(e).context(args.features.display().to_string()),
    })?;
    if rows.is_empty() {
        return Err(CliError::new(Category::Data, "feature file has no rows"));
    }
    let dim = model.dimension();
    if let Some(r) = rows.iter().find(|r| r.values.len() != dim) {
        return Err(CliError::new(
            Category::Data,
            format!("features have dimension {} but the model expects {dim}", r.values.len()),
        ));
    }
    let (ax, ay) = match args.axes.as_deref() {
        Some([a, b]) => (*a, *b),
        Some(_) => return Err(CliError::new(Category::Config, "--axes takes two indices")),
        None if dim == 1 => (0, 0),
        None => (0, 1),
    };
    if ax >= dim || ay >= dim {
        return Err(CliError::new(
            Category::Config,
            format!("plot axes ({ax}, {ay}) out of range for {dim} coefficients"),
        ));
    }
    if ax == ay && dim > 1 {
        return Err(CliError::new(Category::Config, "plot axes must differ"));
    }
    if args.grid < 2 {
        return Err(CliError::new(Category::Config, "--grid must be at least 2"));
    }
    let flat = dim == 1;
    let coord = |v: &[f64]| (v[ax], if flat { 0.0 } else { v[ay] });

    // Points.
    let mut points_csv = String::from("r_index,label,x,y,decision,predicted,support_vector\n");
    let mut marks = Vec::with_capacity(rows.len());
    for r in &rows {
        let f = model.decision_value(&r.values).category(Category::Data)?;
        let class = model.predict(&r.values).category(Category::Data)?;
        let sv = is_support_vector(&model, &r.values);
        let (x, y) = coord(&r.values);
        let predicted = BeatLabel::from_class(class).map_or("", BeatLabel::as_str);
        let _ = writeln!(
            points_csv,
            "{},{},{x:e},{y:e},{f:e},{predicted},{}",
            r.r_index,
            r.label.map_or("", BeatLabel::as_str),
            u8::from(sv)
        );
        marks.push((x, y, class, sv));
    }

    // Grid and boundary per slice.
    let n = args.grid;
    let xr = Range::of(marks.iter().map(|m| m.0));
    let yr = if flat {
        Range { lo: -1.0, hi: 1.0 }
    } else {
        Range::of(marks.iter().map(|m| m.1))
    };
    let slices = slices(&rows, dim);
    let mut grid_csv = String::from("slice,i,j,x,y,decision\n");
    let mut boundary_csv = String::from("slice,x1,y1,x2,y2\n");
    let mut boundaries = Vec::with_capacity(slices.len());
    for s in &slices {
        let mut values = vec![0.0; n * n];
        let mut probe = s.base.clone();
        for i in 0..n {
            let x = xr.node(i, n);
            for j in 0..n {
                let y = yr.node(j, n);
                probe[ax] = x;
                if !flat {
                    probe[ay] = y;
                }
                let f = model.decision_value(&probe).category(Category::Data)?;
                values[i * n + j] = f;
                let _ = writeln!(grid_csv, "{},{i},{j},{x:e},{y:e},{f:e}", s.name);
            }
        }
        let segs = marching_squares(&values, n, xr, yr);
        for g in &segs {
            let _ = writeln!(boundary_csv, "{},{:e},{:e},{:e},{:e}", s.name, g[0], g[1], g[2], g[3]);
        }
        boundaries.push(segs);
    }

    let svg = render_svg(&model, &marks, &slices, &boundaries, xr, yr, (ax, ay), flat);
    let dir = &args.out_dir;
    write_outputs(
        &[args.model.as_path(), args.features.as_path()],
        &[
            (dir.join("plot.svg"), svg),
            (dir.join("points.csv"), points_csv),
            (dir.join("grid.csv"), grid_csv),
            (dir.join("boundary.csv"), boundary_csv),
        ],
    )?;
    println!(
        "plotted {} beats on (C{ax}, C{}) with {} boundary slice(s) in {}",
        rows.len(),
        if flat { ax } else { ay },
        slices.len(),
        dir.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn render_svg(
    model: &SvmModel,
    marks: &[(f64, f64, i32, bool)],
    slices: &[Slice],
    boundaries: &[Vec<[f64; 4]>],
    xr: Range,
    yr: Range,
    (ax, ay): (usize, usize),
    flat: bool,
) -> String {
    let span = SIZE - 2.0 * PAD;
    let px = |x: f64| PAD + (x - xr.lo) / (xr.hi - xr.lo) * span;
    let py = |y: f64| SIZE - PAD - (y - yr.lo) / (yr.hi - yr.lo) * span;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        "<title>SVM decision boundary on C{ax} / C{}</title>",
        if flat { ax } else { ay }
    );
    let fixed = slices.iter().map(|s| s.name).collect::<Vec<_>>().join(", ");
    let _ = writeln!(
        s,
        "<metadata>Coefficients other than C{ax}{} are fixed at the class-conditional means ({fixed}); one boundary per slice. Kernel {}, {} support vectors circled.</metadata>",
        if flat { String::new() } else { format!(" and C{ay}") },
        model.kernel(),
        model.support_vectors().len()
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{span}" height="{span}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">C{ax}</text>"#,
        SIZE / 2.0,
        SIZE - PAD / 3.0
    );
    if !flat {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">C{ay}</text>"#,
            PAD / 3.0,
            SIZE / 2.0,
            PAD / 3.0,
            SIZE / 2.0
        );
    }
    for (v, x, y, anchor) in [
        (xr.lo, PAD, SIZE - PAD + 16.0, "start"),
        (xr.hi, SIZE - PAD, SIZE - PAD + 16.0, "end"),
    ] {
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{v:.3}</text>"#);
    }
    if !flat {
        for (v, y) in [(yr.lo, SIZE - PAD), (yr.hi, PAD + 10.0)] {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{y:.2}" text-anchor="end">{v:.3}</text>"#,
                PAD - 4.0
            );
        }
    }
    for (slice, segs) in slices.iter().zip(boundaries) {
        let mut d = String::new();
        for g in segs {
            let _ = write!(d, "M{:.2} {:.2}L{:.2} {:.2}", px(g[0]), py(g[1]), px(g[2]), py(g[3]));
        }
        let dash = if slice.dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{}""#, slice.dash)
        };
        let _ = writeln!(
            s,
            r#"<path class="boundary" data-slice="{}" d="{d}" fill="none" stroke="black" stroke-width="1.5"{dash}/>"#,
            slice.name
        );
    }
    let _ = writeln!(s, r#"<g class="points">"#);
    for &(x, y, class, _) in marks {
        let color = if class > 0 { IRREGULAR_COLOR } else { REGULAR_COLOR };
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
            px(x),
            py(y)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="support-vectors">"#);
    for &(x, y, _, sv) in marks {
        if sv {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="7" fill="none" stroke="black"/>"#,
                px(x),
                py(y)
            );
        }
    }
    let _ = writeln!(s, "</g>");
    for (k, (label, color)) in [
        ("predicted regular", REGULAR_COLOR),
        ("predicted irregular", IRREGULAR_COLOR),
    ]
    .iter()
    .enumerate()
    {
        let y = PAD / 2.0 + 14.0 * k as f64 - 8.0;
        let _ = writeln!(s, r#"<circle cx="{PAD}" cy="{y:.2}" r="4" fill="{color}"/>"#);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{label}</text>"#, PAD + 8.0, y + 4.0);
    }
    let _ = writeln!(s, "</svg>");
    s
}
