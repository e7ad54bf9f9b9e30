//! Pairwise coordinate ascent on the SVM dual over a precomputed Gram matrix.
//!
//! Internally the equivalent minimization `½ ηᵀQη − Σ η` with
//! `Q_nm = c_n c_m K_nm` is solved. Each step picks the maximal violating
//! index `i` and, among the indices that form a violating pair with it, the
//! `j` that maximizes the second-order decrease of the objective; the pair is
//! then optimized analytically and clipped back into the box `[0, P]`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Result, SolverConfig, SvmError};

/// Curvature floor for non-positive-definite pairs.
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    /// One multiplier per training point, each in `[0, P]`.
    pub multipliers: Vec<f64>,
    pub bias: f64,
    /// `Σ η − ½ ηᵀQη`, recomputed from scratch at exit.
    pub objective: f64,
    pub iterations: usize,
    /// Maximal KKT violation (`max_up(−cG) − min_low(−cG)`) at exit.
    pub gap: f64,
    pub converged: bool,
}

/// `Σ η − ½ Σ Σ η_n η_m c_n c_m K_nm` for a row-major Gram matrix.
pub fn dual_objective(gram: &[f64], labels: &[i32], multipliers: &[f64]) -> f64 {
    let n = labels.len();
    let mut quad = 0.0;
    for a in 0..n {
        if multipliers[a] == 0.0 {
            continue;
        }
        let row = &gram[a * n..(a + 1) * n];
        let mut acc = 0.0;
        for b in 0..n {
            acc += multipliers[b] * labels[b] as f64 * row[b];
        }
        quad += multipliers[a] * labels[a] as f64 * acc;
    }
    multipliers.iter().sum::<f64>() - 0.5 * quad
}

/// Solves the box- and equality-constrained dual for the given Gram matrix.
///
/// Labels must be `±1` with both classes present; callers go through
/// [`super::TrainingSet`] for that validation.
pub fn solve_dual(gram: &[f64], labels: &[i32], config: &SolverConfig) -> Result<DualSolution> {
    config.validate()?;
    let n = labels.len();
    if gram.len() != n * n {
        return Err(SvmError::GramShape {
            expected: n * n,
            actual: gram.len(),
        });
    }
    let cap = config.regularization;
    let y: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
    let k = |a: usize, b: usize| gram[a * n + b];

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let max_iter = config.max_passes.saturating_mul(n.max(1));
    let stop = 0.5 * config.tolerance;

    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < cap) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < cap);

    let mut iterations = 0;
    let mut gap;
    let converged;
    loop {
        let mut gmax = f64::NEG_INFINITY;
        let mut sel_i = None;
        for &t in &order {
            if in_up(alpha[t], y[t]) {
                let v = -y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    sel_i = Some(t);
                }
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut sel_j = None;
        let mut best = f64::INFINITY;
        for &t in &order {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            let v = y[t] * grad[t];
            if v > gmax2 {
                gmax2 = v;
            }
            if let Some(i) = sel_i {
                let b = gmax + v;
                if b > 0.0 {
                    let mut a = k(i, i) + k(t, t) - 2.0 * k(i, t);
                    if a <= 0.0 {
                        a = TAU;
                    }
                    let score = -(b * b) / a;
                    if score < best {
                        best = score;
                        sel_j = Some(t);
                    }
                }
            }
        }
        gap = gmax + gmax2;
        let (i, j) = match (sel_i, sel_j) {
            (Some(i), Some(j)) if gap >= stop => (i, j),
            _ => {
                converged = true;
                break;
            }
        };
        if iterations >= max_iter {
            converged = false;
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let kij = k(i, j);
        if y[i] != y[j] {
            let mut quad = k(i, i) + k(j, j) - 2.0 * kij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > cap {
                    alpha[i] = cap;
                    alpha[j] = cap - diff;
                }
            } else if alpha[j] > cap {
                alpha[j] = cap;
                alpha[i] = cap + diff;
            }
        } else {
            let mut quad = k(i, i) + k(j, j) - 2.0 * kij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > cap {
                if alpha[i] > cap {
                    alpha[i] = cap;
                    alpha[j] = sum - cap;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cap {
                if alpha[j] > cap {
                    alpha[j] = cap;
                    alpha[i] = sum - cap;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let di = (alpha[i] - old_i) * y[i];
        let dj = (alpha[j] - old_j) * y[j];
        for t in 0..n {
            grad[t] += y[t] * (k(t, i) * di + k(t, j) * dj);
        }
    }

    // Fresh gradient so the bias and objective carry no accumulated drift.
    for t in 0..n {
        let s: f64 = (0..n).map(|m| alpha[m] * y[m] * k(t, m)).sum();
        grad[t] = y[t] * s - 1.0;
    }
    let bias = compute_bias(&alpha, &y, &grad, cap);
    let objective = dual_objective(gram, labels, &alpha);
    Ok(DualSolution {
        multipliers: alpha,
        bias,
        objective,
        iterations,
        gap,
        converged,
    })
}

/// Average of `c_t − Σ η c K` over unbounded multipliers, else the midpoint of
/// the interval of biases that satisfy every bounded point's KKT condition.
fn compute_bias(alpha: &[f64], y: &[f64], grad: &[f64], cap: f64) -> f64 {
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for t in 0..alpha.len() {
        let f = -y[t] * grad[t];
        if alpha[t] > 0.0 && alpha[t] < cap {
            free_sum += f;
            free_count += 1;
        } else if (alpha[t] == 0.0) == (y[t] > 0.0) {
            lower = lower.max(f);
        } else {
            upper = upper.min(f);
        }
    }
    if free_count > 0 {
        free_sum / free_count as f64
    } else if lower.is_finite() && upper.is_finite() {
        0.5 * (lower + upper)
    } else if lower.is_finite() {
        lower
    } else {
        upper
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_gram(points: &[Vec<f64>]) -> Vec<f64> {
        let n = points.len();
        let mut g = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                g[a * n + b] = points[a].iter().zip(&points[b]).map(|(x, y)| x * y).sum();
            }
        }
        g
    }

    #[test]
    fn symmetric_pair() {
        let g = linear_gram(&[vec![-1.0], vec![1.0]]);
        let sol = solve_dual(&g, &[-1, 1], &SolverConfig::default()).unwrap();
        assert!(sol.converged);
        assert!((sol.multipliers[0] - 0.5).abs() < 1e-12);
        assert!((sol.multipliers[1] - 0.5).abs() < 1e-12);
        assert!(sol.bias.abs() < 1e-12);
        assert!((sol.objective - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bounded_solution_uses_interval_midpoint() {
        // Overlapping classes with a tiny cap: every multiplier saturates.
        let pts = vec![vec![0.0], vec![1.0], vec![0.2], vec![0.9]];
        let g = linear_gram(&pts);
        let config = SolverConfig {
            regularization: 0.01,
            ..SolverConfig::default()
        };
        let sol = solve_dual(&g, &[1, 1, -1, -1], &config).unwrap();
        assert!(sol.converged);
        assert!(sol.multipliers.iter().all(|&a| a == 0.0 || a == 0.01));
        assert!(sol.bias.is_finite());
    }

    #[test]
    fn rejects_bad_gram() {
        assert_eq!(
            solve_dual(&[1.0; 3], &[1, -1], &SolverConfig::default()),
            Err(SvmError::GramShape { expected: 4, actual: 3 })
        );
    }

    #[test]
    fn equality_constraint_holds() {
        let pts: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()])
            .collect();
        let labels: Vec<i32> = (0..12).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect();
        let g = linear_gram(&pts);
        let config = SolverConfig {
            regularization: 2.0,
            ..SolverConfig::default()
        };
        let sol = solve_dual(&g, &labels, &config).unwrap();
        let s: f64 = sol.multipliers.iter().zip(&labels).map(|(a, &l)| a * l as f64).sum();
        assert!(s.abs() < 1e-10);
        assert!(sol.multipliers.iter().all(|&a| (0.0..=2.0).contains(&a)));
    }
}
