//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hermite_qrs::svm::{KernelSpec, SolverConfig, TrainingSet};

/// Best point of the soft-margin dual found by enumerating every assignment
/// of each multiplier to {0, P, free} and solving the equality-constrained
/// stationarity system on the free block.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub multipliers: Vec<f64>,
    pub objective: f64,
}

pub fn gram(kernel: &KernelSpec, points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            k[i * n + j] = kernel_reference(kernel, &points[i], &points[j]);
        }
    }
    k
}

/// Written out again here so the oracle shares no code with the solver.
pub fn kernel_reference(kernel: &KernelSpec, a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    match *kernel {
        KernelSpec::Linear => dot,
        KernelSpec::Polynomial { degree, offset } => (dot + offset).powi(degree as i32),
        KernelSpec::Rbf { gamma } => {
            let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            (-gamma * d2).exp()
        }
    }
}

pub fn objective(gram: &[f64], labels: &[i32], eta: &[f64]) -> f64 {
    let n = labels.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += eta[i] * eta[j] * f64::from(labels[i] * labels[j]) * gram[i * n + j];
        }
    }
    eta.iter().sum::<f64>() - 0.5 * quad
}

pub fn brute_force_dual(gram: &[f64], labels: &[i32], p: f64) -> OracleSolution {
    let n = labels.len();
    assert!(n <= 10, "enumeration is 3^n");
    let y: Vec<f64> = labels.iter().map(|&c| f64::from(c)).collect();
    let q = |i: usize, j: usize| y[i] * y[j] * gram[i * n + j];
    let feas_tol = 1e-10 * p.max(1.0);

    let mut best = OracleSolution {
        multipliers: vec![0.0; n],
        objective: 0.0,
    };
    let mut state = vec![0u8; n];
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        for s in state.iter_mut() {
            *s = (c % 3) as u8;
            c /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut eta: Vec<f64> = state.iter().map(|&s| if s == 1 { p } else { 0.0 }).collect();
        let bound_sum: f64 = (0..n).map(|i| y[i] * eta[i]).sum();

        if free.is_empty() {
            if bound_sum.abs() > feas_tol {
                continue;
            }
        } else {
            // [Q_FF y_F; y_Fᵀ 0] [η_F; b] = [1 − Q_FB η_B; −y_Bᵀ η_B]
            let f = free.len();
            let mut a = DMatrix::<f64>::zeros(f + 1, f + 1);
            let mut rhs = DVector::<f64>::zeros(f + 1);
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[(r, s)] = q(i, j);
                }
                a[(r, f)] = y[i];
                a[(f, r)] = y[i];
                rhs[r] = 1.0 - (0..n).filter(|&j| state[j] != 2).map(|j| q(i, j) * eta[j]).sum::<f64>();
            }
            rhs[f] = -bound_sum;
            let Some(sol) = a.lu().solve(&rhs) else {
                continue;
            };
            if !sol.iter().all(|v| v.is_finite()) {
                continue;
            }
            if free
                .iter()
                .enumerate()
                .any(|(r, _)| sol[r] < -feas_tol || sol[r] > p + feas_tol)
            {
                continue;
            }
            for (r, &i) in free.iter().enumerate() {
                eta[i] = sol[r].clamp(0.0, p);
            }
            let residual: f64 = (0..n).map(|i| y[i] * eta[i]).sum();
            if residual.abs() > 1e-8 * p.max(1.0) {
                continue;
            }
        }
        let obj = objective(gram, labels, &eta);
        if obj > best.objective {
            best = OracleSolution {
                multipliers: eta,
                objective: obj,
            };
        }
    }
    best
}

/// A random labelled problem with both classes present.
pub struct RandomInstance {
    pub data: TrainingSet,
    pub kernel: KernelSpec,
    pub config: SolverConfig,
}

pub fn random_instance(seed: u64) -> RandomInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=8usize);
    let dim = rng.gen_range(1..=3usize);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let mut labels: Vec<i32> = (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    labels[0] = 1;
    labels[1] = -1;
    let kernel = if seed.is_multiple_of(2) {
        KernelSpec::Linear
    } else {
        KernelSpec::Rbf {
            gamma: rng.gen_range(0.2..2.0),
        }
    };
    let regularization = [0.5, 1.0, 10.0][rng.gen_range(0..3)];
    RandomInstance {
        data: TrainingSet::new(points, labels).unwrap(),
        kernel,
        config: SolverConfig {
            regularization,
            standardize: false,
            seed,
            ..SolverConfig::default()
        },
    }
}

/// Seeded 70/30 style split of indices.
pub fn split_indices(n: usize, train_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    use rand::seq::SliceRandom;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = (n as f64 * train_fraction).round() as usize;
    let test = idx.split_off(cut);
    (idx, test)
}
