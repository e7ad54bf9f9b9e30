//! Hermite polynomials, Hermite functions and the finite discrete Hermite
//! transform sampled at the roots of the order-`M` Hermite polynomial.
//!
//! Conventions used throughout:
//!
//! * `P_n` are the physicists' polynomials, `P_0 = 1`, `P_1 = 2t`,
//!   `P_{n+1} = 2t P_n - 2n P_{n-1}`.
//! * `ψ_n(t) = e^{-t²/2} P_n(t) / sqrt(2^n n! sqrt(π))`, evaluated through the
//!   normalized recurrence so nothing overflows for large `n`.
//! * The transform of `f` sampled at the roots `t_z` of `P_M` is
//!   `C_n = (1/M) Σ_z ψ_n(t_z) / ψ_{M-1}(t_z)² · f(t_z)`, and its inverse is
//!   `f(t_z) = Σ_n C_n ψ_n(t_z)`.

use std::f64::consts::{LN_2, PI};

use thiserror::Error;

/// Largest polynomial degree accepted by [`hermite_polynomial`].
pub const MAX_POLYNOMIAL_DEGREE: usize = 512;
/// Largest basis order accepted by [`hermite_roots`] and [`HermiteBasis::new`].
pub const MAX_ORDER: usize = 256;

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HermiteError {
    #[error("polynomial degree {0} exceeds the supported maximum of {MAX_POLYNOMIAL_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("order {0} is outside 1..={MAX_ORDER}")]
    InvalidOrder(usize),
    #[error("argument is not finite: {0}")]
    NonFinite(f64),
    #[error("P_{degree}({t}) overflows f64")]
    Overflow { degree: usize, t: f64 },
    #[error("newton iteration for root {index} of P_{order} did not converge (last step {last_step:e})")]
    RootNotConverged { order: usize, index: usize, last_step: f64 },
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("index {index} out of range for order {order}")]
    IndexOutOfRange { index: usize, order: usize },
}

pub type Result<T> = std::result::Result<T, HermiteError>;

fn check_finite(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(HermiteError::NonFinite(t))
    }
}

/// Physicists' Hermite polynomial `P_n(t)` by the three-term recurrence.
pub fn hermite_polynomial(n: usize, t: f64) -> Result<f64> {
    if n > MAX_POLYNOMIAL_DEGREE {
        return Err(HermiteError::DegreeTooLarge(n));
    }
    check_finite(t)?;
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * t;
    for k in 1..n {
        let next = 2.0 * t * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    if cur.is_finite() {
        Ok(cur)
    } else {
        Err(HermiteError::Overflow { degree: n, t })
    }
}

/// `(sign, ln|P_n(t)|)`, running the same recurrence with periodic rescaling so
/// that the magnitude never leaves the f64 range. A zero value is reported as
/// `(0.0, -inf)`.
pub fn hermite_polynomial_log(n: usize, t: f64) -> Result<(f64, f64)> {
    if n > MAX_POLYNOMIAL_DEGREE {
        return Err(HermiteError::DegreeTooLarge(n));
    }
    check_finite(t)?;
    let mut log_scale = 0.0;
    let mut prev = 1.0;
    let mut cur = if n == 0 { 1.0 } else { 2.0 * t };
    for k in 1..n {
        let next = 2.0 * t * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > 1e150 {
            prev /= mag;
            cur /= mag;
            log_scale += mag.ln();
        }
    }
    if cur == 0.0 {
        Ok((0.0, f64::NEG_INFINITY))
    } else {
        Ok((cur.signum(), cur.abs().ln() + log_scale))
    }
}

/// Hermite function `ψ_n(t)` by the normalized recurrence
/// `ψ_n = t sqrt(2/n) ψ_{n-1} - sqrt((n-1)/n) ψ_{n-2}`.
pub fn hermite_function(n: usize, t: f64) -> Result<f64> {
    check_finite(t)?;
    Ok(hermite_functions_upto(n, t)[n])
}

/// `ψ_0(t), ..., ψ_n(t)` in one recurrence sweep.
pub(crate) fn hermite_functions_upto(n: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let psi0 = PI.powf(-0.25) * (-0.5 * t * t).exp();
    out.push(psi0);
    if n == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * t * psi0);
    for k in 2..=n {
        let kf = k as f64;
        let next = t * (2.0 / kf).sqrt() * out[k - 1] - ((kf - 1.0) / kf).sqrt() * out[k - 2];
        out.push(next);
    }
    out
}

/// Evaluates `p̃_m(t) = e^{t²/2} ψ_m(t)` and `p̃_{m-1}(t)`: the normalized
/// polynomial without the Gaussian factor, which keeps Newton's method well
/// scaled for large roots.
fn normalized_polynomial_pair(m: usize, t: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    for k in 1..=m {
        let kf = k as f64;
        let next = t * (2.0 / kf).sqrt() * cur - ((kf - 1.0) / kf).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Number of roots of `P_m` strictly below `x`.
///
/// The roots are the eigenvalues of the symmetric tridiagonal Jacobi matrix
/// with zero diagonal and off-diagonal `sqrt(k/2)`; the count is the number of
/// negative pivots in the LDLᵀ factorization of `J - xI`.
fn roots_below(m: usize, x: f64) -> usize {
    let mut count = 0;
    let mut d = -x;
    for k in 0..m {
        if k > 0 {
            d = -x - (k as f64 / 2.0) / d;
        }
        if d == 0.0 {
            d = -f64::MIN_POSITIVE;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn newton_root(m: usize, mut z: f64) -> (f64, bool, f64) {
    let mf = m as f64;
    let mut step = f64::INFINITY;
    for _ in 0..NEWTON_MAX_ITER {
        let (p, p_prev) = normalized_polynomial_pair(m, z);
        let dp = (2.0 * mf).sqrt() * p_prev;
        step = p / dp;
        z -= step;
        if !z.is_finite() {
            return (z, false, step);
        }
        if step.abs() <= NEWTON_TOL * z.abs().max(1.0) {
            return (z, true, step);
        }
    }
    (z, false, step)
}

/// The `M` roots of `P_M`, strictly increasing.
///
/// Only the positive roots are searched, largest first, by Newton's method
/// from the usual asymptotic starting guesses. Each converged value is checked
/// against a Sturm count; when Newton lands on the wrong root the guess is
/// replaced by a bisection bracket of the intended one and Newton is rerun.
/// The negative half is mirrored and the middle root of an odd order is
/// exactly zero.
pub fn hermite_roots(order: usize) -> Result<Vec<f64>> {
    if order == 0 || order > MAX_ORDER {
        return Err(HermiteError::InvalidOrder(order));
    }
    let m = order;
    let n_pos = m / 2;
    let mut positive: Vec<f64> = Vec::with_capacity(n_pos);
    let mf = m as f64;
    for i in 0..n_pos {
        // Sorted ascending, this root has index `m - 1 - i`.
        let rank = m - 1 - i;
        let guess = match i {
            0 => (2.0 * mf + 1.0).sqrt() - 1.85575 * (2.0 * mf + 1.0).powf(-0.16667),
            1 => positive[0] - 1.14 * mf.powf(0.426) / positive[0],
            2 => 1.86 * positive[1] - 0.86 * positive[0],
            3 => 1.91 * positive[2] - 0.91 * positive[1],
            _ => 2.0 * positive[i - 1] - positive[i - 2],
        };
        let is_target = |z: f64| {
            let delta = 1e-9 * z.abs().max(1.0);
            z > 0.0 && roots_below(m, z - delta) == rank && roots_below(m, z + delta) == rank + 1
        };
        let (mut z, mut converged, mut step) = newton_root(m, guess);
        if !(converged && is_target(z)) {
            let mut lo = 0.0;
            let mut hi = positive.last().copied().unwrap_or((2.0 * mf + 1.0).sqrt());
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if roots_below(m, mid) > rank {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-8 * hi {
                    break;
                }
            }
            (z, converged, step) = newton_root(m, 0.5 * (lo + hi));
        }
        if !converged || !is_target(z) {
            return Err(HermiteError::RootNotConverged {
                order: m,
                index: rank,
                last_step: step,
            });
        }
        positive.push(z);
    }
    let mut roots = Vec::with_capacity(m);
    roots.extend(positive.iter().map(|z| -z));
    if m % 2 == 1 {
        roots.push(0.0);
    }
    roots.extend(positive.iter().rev());
    Ok(roots)
}

/// `ln(n!)` by direct summation; exact enough for the orders used here.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln sqrt(2^n n! sqrt(π))`, the log of the Hermite normalization constant.
fn ln_norm(n: usize) -> f64 {
    0.5 * (n as f64 * LN_2 + ln_factorial(n) + 0.5 * PI.ln())
}

fn quadrature_weights_at(roots: &[f64]) -> Result<Vec<f64>> {
    let s = roots.len();
    let log_numer = (s as f64 - 1.0) * LN_2 + ln_factorial(s) + 0.5 * PI.ln() - 2.0 * (s as f64).ln();
    roots
        .iter()
        .map(|&t| {
            let (_, log_p) = hermite_polynomial_log(s - 1, t)?;
            let w = (log_numer - 2.0 * log_p).exp();
            if w.is_finite() && w > 0.0 {
                Ok(w)
            } else {
                Err(HermiteError::Overflow { degree: s - 1, t })
            }
        })
        .collect()
}

/// Gauss–Hermite weights `w_z = 2^{S-1} S! sqrt(π) / (S² P_{S-1}(t_z)²)` for the
/// `S` roots of `P_S`, evaluated in log space.
pub fn quadrature_weights(s: usize) -> Result<Vec<f64>> {
    let roots = hermite_roots(s)?;
    quadrature_weights_at(&roots)
}

/// Hermite coefficients `C_0..C_{M-1}` of one signal.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    values: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(HermiteError::InvalidOrder(0));
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(HermiteError::NonFinite(bad));
        }
        Ok(Self { values })
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Copy with every coefficient of index `>= keep` set to zero.
    pub fn truncated(&self, keep: usize) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(n, &c)| if n < keep { c } else { 0.0 })
            .collect();
        Self { values }
    }
}

/// Precomputed roots, Hermite-function values and dual factors for one order.
///
/// Immutable once built; share it freely between threads.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    order: usize,
    roots: Vec<f64>,
    /// Row-major `(n, z)`: `ψ_n(t_z)`.
    basis_values: Vec<f64>,
    /// Row-major `(n, z)`: `ψ_n(t_z) / ψ_{M-1}(t_z)²`.
    dual_factors: Vec<f64>,
}

impl HermiteBasis {
    pub fn new(order: usize) -> Result<Self> {
        let roots = hermite_roots(order)?;
        let m = order;
        let mut basis_values = vec![0.0; m * m];
        for (z, &t) in roots.iter().enumerate() {
            for (n, psi) in hermite_functions_upto(m - 1, t).into_iter().enumerate() {
                basis_values[n * m + z] = psi;
            }
        }
        let mut dual_factors = vec![0.0; m * m];
        for z in 0..m {
            let last = basis_values[(m - 1) * m + z];
            assert!(
                last != 0.0 && last.is_finite(),
                "ψ_{}(t_{z}) = {last}: root finding produced an invalid node",
                m - 1
            );
            let denom = last * last;
            for n in 0..m {
                dual_factors[n * m + z] = basis_values[n * m + z] / denom;
            }
        }
        Ok(Self {
            order,
            roots,
            basis_values,
            dual_factors,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    /// `ψ_n(t_z)`.
    pub fn basis_value(&self, n: usize, z: usize) -> f64 {
        self.basis_values[n * self.order + z]
    }

    /// `ξ^n_{M-1}(t_z) = ψ_n(t_z) / ψ_{M-1}(t_z)²`.
    pub fn dual_factor(&self, n: usize, z: usize) -> Result<f64> {
        let m = self.order;
        if n >= m {
            return Err(HermiteError::IndexOutOfRange { index: n, order: m });
        }
        if z >= m {
            return Err(HermiteError::IndexOutOfRange { index: z, order: m });
        }
        Ok(self.dual_factors[n * m + z])
    }

    /// Gauss–Hermite weights at this basis' roots.
    pub fn quadrature_weights(&self) -> Result<Vec<f64>> {
        quadrature_weights_at(&self.roots)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.order {
            Ok(())
        } else {
            Err(HermiteError::LengthMismatch {
                expected: self.order,
                actual: len,
            })
        }
    }

    /// Forward transform from samples at the roots, via the dual factors.
    pub fn forward(&self, samples: &[f64]) -> Result<CoefficientVector> {
        self.check_len(samples.len())?;
        let m = self.order;
        let inv_m = 1.0 / m as f64;
        let values = self
            .dual_factors
            .chunks_exact(m)
            .map(|row| row.iter().zip(samples).map(|(x, f)| x * f).sum::<f64>() * inv_m)
            .collect();
        CoefficientVector::new(values)
    }

    /// Forward transform through the unsimplified quadrature formula:
    /// `C_n = (2^n n! sqrt(π))^{-1/2} Σ_z w_z f(t_z) e^{t_z²/2} P_n(t_z)`.
    ///
    /// Every factor is carried in log space, and `P_n` comes from the raw
    /// polynomial recurrence rather than from the stored basis values.
    pub fn forward_quadrature(&self, samples: &[f64]) -> Result<CoefficientVector> {
        self.check_len(samples.len())?;
        let weights = self.quadrature_weights()?;
        let log_weights: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
        let mut values = Vec::with_capacity(self.order);
        for n in 0..self.order {
            let log_norm = ln_norm(n);
            let mut acc = 0.0;
            for (z, &t) in self.roots.iter().enumerate() {
                let f = samples[z];
                if f == 0.0 {
                    continue;
                }
                let (sign, log_p) = hermite_polynomial_log(n, t)?;
                if sign == 0.0 {
                    continue;
                }
                let log_mag = log_weights[z] + 0.5 * t * t + log_p - log_norm;
                acc += sign * f * log_mag.exp();
            }
            values.push(acc);
        }
        CoefficientVector::new(values)
    }

    /// Samples at the roots reconstructed from coefficients,
    /// `f(t_z) = Σ_n C_n ψ_n(t_z)`.
    pub fn inverse(&self, coeffs: &CoefficientVector) -> Result<Vec<f64>> {
        self.check_len(coeffs.order())?;
        let m = self.order;
        let mut out = vec![0.0; m];
        for (row, &c) in self.basis_values.chunks_exact(m).zip(coeffs.values()) {
            for (o, &psi) in out.iter_mut().zip(row) {
                *o += c * psi;
            }
        }
        Ok(out)
    }

    /// Discrete inner product under which the basis is orthonormal:
    /// `(1/M) Σ_z a_z b_z / ψ_{M-1}(t_z)²`.
    pub fn dual_inner_product(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        self.check_len(a.len())?;
        self.check_len(b.len())?;
        let m = self.order;
        let last = &self.basis_values[(m - 1) * m..];
        Ok(a.iter()
            .zip(b)
            .zip(last)
            .map(|((x, y), p)| x * y / (p * p))
            .sum::<f64>()
            / m as f64)
    }
}

/// Free-function form of [`HermiteBasis::dual_factor`].
pub fn dual_factor(n: usize, basis: &HermiteBasis, z: usize) -> Result<f64> {
    basis.dual_factor(n, z)
}

/// Free-function form of [`HermiteBasis::forward`].
pub fn forward_transform(samples_at_roots: &[f64], basis: &HermiteBasis) -> Result<CoefficientVector> {
    basis.forward(samples_at_roots)
}

/// Free-function form of [`HermiteBasis::forward_quadrature`].
pub fn forward_transform_quadrature(samples_at_roots: &[f64], basis: &HermiteBasis) -> Result<CoefficientVector> {
    basis.forward_quadrature(samples_at_roots)
}

/// Free-function form of [`HermiteBasis::inverse`].
pub fn inverse_transform(coeffs: &CoefficientVector, basis: &HermiteBasis) -> Result<Vec<f64>> {
    basis.inverse(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Coefficients (lowest degree first) of `d^n/dt^n e^{-t²}` divided by
    /// `e^{-t²}`, built by exact integer differentiation: `q_{n+1} = q_n' - 2t q_n`.
    fn rodrigues_coefficients(n: usize) -> Vec<i128> {
        let mut q = vec![1i128];
        for _ in 0..n {
            let mut next = vec![0i128; q.len() + 1];
            for (k, &c) in q.iter().enumerate() {
                if k > 0 {
                    next[k - 1] += k as i128 * c;
                }
                next[k + 1] -= 2 * c;
            }
            q = next;
        }
        let sign = if n.is_multiple_of(2) { 1 } else { -1 };
        q.into_iter().map(|c| sign * c).collect()
    }

    fn eval_poly(coeffs: &[i128], t: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c as f64)
    }

    #[test]
    fn polynomial_small_cases() {
        assert_eq!(hermite_polynomial(0, 3.7).unwrap(), 1.0);
        assert_eq!(hermite_polynomial(2, 1.0).unwrap(), 2.0);
        // Exact Rodrigues evaluation: 32/32 - 160/8 + 120/2.
        assert_eq!(eval_poly(&rodrigues_coefficients(5), 0.5), 41.0);
        assert_eq!(hermite_polynomial(5, 0.5).unwrap(), 41.0);
    }

    #[test]
    fn polynomial_matches_rodrigues_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 0..=10 {
            let oracle = rodrigues_coefficients(n);
            for _ in 0..20 {
                let t: f64 = rng.gen_range(-4.0..4.0);
                let expected = eval_poly(&oracle, t);
                let got = hermite_polynomial(n, t).unwrap();
                assert_relative_eq!(got, expected, max_relative = 1e-9, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn polynomial_guards() {
        assert_eq!(hermite_polynomial(513, 0.1), Err(HermiteError::DegreeTooLarge(513)));
        assert!(matches!(
            hermite_polynomial(3, f64::NAN),
            Err(HermiteError::NonFinite(_))
        ));
        assert!(matches!(
            hermite_polynomial(400, 30.0),
            Err(HermiteError::Overflow { .. })
        ));
    }

    #[test]
    fn log_polynomial_agrees_with_direct() {
        for n in [0, 1, 4, 9, 20] {
            for t in [-2.3, -0.4, 0.7, 3.1] {
                let p = hermite_polynomial(n, t).unwrap();
                let (s, l) = hermite_polynomial_log(n, t).unwrap();
                assert_relative_eq!(s * l.exp(), p, max_relative = 1e-12);
            }
        }
        // Far beyond f64 range directly, still finite in log space.
        let (_, l) = hermite_polynomial_log(400, 30.0).unwrap();
        assert!(l.is_finite() && l > 709.0);
    }

    #[test]
    fn hermite_function_values() {
        assert_relative_eq!(hermite_function(0, 0.0).unwrap(), 0.7511255444649425, epsilon = 1e-15);
        assert_eq!(hermite_function(1, 0.0).unwrap(), 0.0);
        // mpmath: e^{-t²/2} H_7(t) / sqrt(2^7 7! sqrt(π)).
        let expected = 0.406_098_664_251_905_4;
        assert_relative_eq!(hermite_function(7, 1.3).unwrap(), expected, max_relative = 1e-13);
        assert_relative_eq!(hermite_function(7, -1.3).unwrap(), -expected, max_relative = 1e-13);
        assert!(hermite_function(2, f64::INFINITY).is_err());
    }

    #[test]
    fn hermite_function_matches_direct_formula() {
        for n in 0..=10usize {
            let norm = ((1u64 << n) as f64 * (1..=n).map(|k| k as f64).product::<f64>() * PI.sqrt()).sqrt();
            for t in [-3.0f64, -0.9, 0.2, 1.7] {
                let direct = (-0.5 * t * t).exp() * eval_poly(&rodrigues_coefficients(n), t) / norm;
                assert_relative_eq!(
                    hermite_function(n, t).unwrap(),
                    direct,
                    max_relative = 1e-11,
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn high_order_function_stays_finite() {
        let v = hermite_function(300, 10.0).unwrap();
        assert!(v.is_finite() && v.abs() < 1.0);
    }

    #[test]
    fn small_order_roots() {
        assert_eq!(hermite_roots(1).unwrap(), vec![0.0]);
        let r2 = hermite_roots(2).unwrap();
        assert_relative_eq!(r2[1], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(r2[0], -std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        let r3 = hermite_roots(3).unwrap();
        assert_eq!(r3[1], 0.0);
        assert_relative_eq!(r3[2], 1.5f64.sqrt(), epsilon = 1e-14);
        let r4 = hermite_roots(4).unwrap();
        assert_relative_eq!(r4[1], -0.5246476232752903, epsilon = 1e-14);
        assert_relative_eq!(r4[3], 1.6506801238857846, epsilon = 1e-14);
    }

    #[test]
    fn roots_reject_bad_order() {
        assert_eq!(hermite_roots(0), Err(HermiteError::InvalidOrder(0)));
        assert_eq!(hermite_roots(257), Err(HermiteError::InvalidOrder(257)));
    }

    #[test]
    fn roots_are_zeros_and_antisymmetric() {
        for m in [1usize, 2, 5, 15, 64, 128, 256] {
            let roots = hermite_roots(m).unwrap();
            assert_eq!(roots.len(), m);
            for z in 0..m {
                assert!((roots[z] + roots[m - 1 - z]).abs() <= 1e-12);
                let (p, p_prev) = normalized_polynomial_pair(m, roots[z]);
                let dp = (2.0 * m as f64).sqrt() * p_prev;
                assert!((p / dp).abs() < 1e-12, "M={m} z={z}: {}", p / dp);
            }
        }
    }

    #[test]
    fn quadrature_weight_cases() {
        let sqrt_pi = PI.sqrt();
        assert_relative_eq!(quadrature_weights(1).unwrap()[0], sqrt_pi, max_relative = 1e-14);
        for w in quadrature_weights(2).unwrap() {
            assert_relative_eq!(w, sqrt_pi / 2.0, max_relative = 1e-14);
        }
        for s in [3usize, 8, 15, 40, 100, 256] {
            let total: f64 = quadrature_weights(s).unwrap().iter().sum();
            assert_relative_eq!(total, sqrt_pi, max_relative = 1e-12);
        }
    }

    #[test]
    fn quadrature_integrates_polynomials() {
        // ∫ t² e^{-t²} dt = sqrt(π)/2, ∫ t⁴ e^{-t²} dt = 3 sqrt(π)/4.
        let roots = hermite_roots(6).unwrap();
        let w = quadrature_weights(6).unwrap();
        let m2: f64 = roots.iter().zip(&w).map(|(t, w)| w * t * t).sum();
        let m4: f64 = roots.iter().zip(&w).map(|(t, w)| w * t.powi(4)).sum();
        assert_relative_eq!(m2, PI.sqrt() / 2.0, max_relative = 1e-13);
        assert_relative_eq!(m4, 0.75 * PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn dual_factor_cases() {
        let b1 = HermiteBasis::new(1).unwrap();
        assert_relative_eq!(
            dual_factor(0, &b1, 0).unwrap(),
            1.3313353638003897,
            max_relative = 1e-14
        );

        let b4 = HermiteBasis::new(4).unwrap();
        // mpmath: ψ_2(t_1)/ψ_3(t_1)² at t_1 = -0.52464762327529...
        assert_relative_eq!(
            dual_factor(2, &b4, 1).unwrap(),
            -0.882_059_196_894_180_6,
            max_relative = 1e-12
        );
        for z in 0..4 {
            assert_relative_eq!(
                dual_factor(3, &b4, z).unwrap(),
                1.0 / b4.basis_value(3, z),
                max_relative = 1e-14
            );
        }
        assert!(dual_factor(4, &b4, 0).is_err());
        assert!(dual_factor(0, &b4, 4).is_err());
    }

    #[test]
    fn forward_of_basis_function_is_unit_vector() {
        let basis = HermiteBasis::new(8).unwrap();
        for k in [0usize, 3] {
            let f: Vec<f64> = basis.roots().iter().map(|&t| hermite_function(k, t).unwrap()).collect();
            for c in [basis.forward(&f).unwrap(), basis.forward_quadrature(&f).unwrap()] {
                for (n, v) in c.values().iter().enumerate() {
                    let expected = if n == k { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() < 1e-8, "k={k} n={n} v={v}");
                }
            }
        }
        let zero = basis.forward(&[0.0; 8]).unwrap();
        assert!(zero.values().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn forward_paths_agree_on_random_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in [8usize, 16] {
            let basis = HermiteBasis::new(m).unwrap();
            let f: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let a = basis.forward(&f).unwrap();
            let b = basis.forward_quadrature(&f).unwrap();
            let scale = a.values().iter().fold(0.0f64, |s, v| s.max(v.abs()));
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() <= 1e-10 * scale, "M={m}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn transforms_reject_wrong_length() {
        let basis = HermiteBasis::new(5).unwrap();
        assert_eq!(
            basis.forward(&[1.0; 4]).unwrap_err(),
            HermiteError::LengthMismatch { expected: 5, actual: 4 }
        );
        assert!(basis.forward_quadrature(&[1.0; 6]).is_err());
        let c = CoefficientVector::new(vec![1.0; 3]).unwrap();
        assert!(basis.inverse(&c).is_err());
    }

    #[test]
    fn inverse_of_unit_vector_is_psi0() {
        let basis = HermiteBasis::new(10).unwrap();
        let mut c = vec![0.0; 10];
        c[0] = 1.0;
        let f = basis.inverse(&CoefficientVector::new(c).unwrap()).unwrap();
        for (z, &t) in basis.roots().iter().enumerate() {
            assert_relative_eq!(f[z], hermite_function(0, t).unwrap(), max_relative = 1e-14);
        }
    }

    #[test]
    fn truncation_residual_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let basis = HermiteBasis::new(20).unwrap();
        let f: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c = basis.forward(&f).unwrap();
        for keep in [0usize, 5, 12, 19] {
            let approx = basis.inverse(&c.truncated(keep)).unwrap();
            let residual: Vec<f64> = f.iter().zip(&approx).map(|(a, b)| a - b).collect();
            // Direct summation of the weighted residual, independent of the transform.
            let last: Vec<f64> = basis
                .roots()
                .iter()
                .map(|&t| hermite_function(19, t).unwrap())
                .collect();
            let energy: f64 = residual.iter().zip(&last).map(|(r, p)| r * r / (p * p)).sum::<f64>() / 20.0;
            let tail: f64 = c.values()[keep..].iter().map(|v| v * v).sum();
            assert_relative_eq!(energy, tail, max_relative = 1e-9, epsilon = 1e-14);
        }
    }

    #[test]
    fn coefficient_vector_rejects_non_finite() {
        assert!(CoefficientVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(CoefficientVector::new(vec![]).is_err());
    }
}
