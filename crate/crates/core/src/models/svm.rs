use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::logistic::unpack;
use super::{check_labels, standardize, FeatureMatrix, LinearModel, ModelError};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig<T = f64> {
    pub c: T,
    pub epochs: usize,
    pub seed: u64,
}

impl<T: Real> Default for SvmConfig<T> {
    fn default() -> Self {
        SvmConfig { c: T::one(), epochs: 60, seed: 7 }
    }
}

/// Regularization strength matching `C * sum(hinge) + |w|^2 / 2` up to scale.
pub fn svm_lambda<T: Real>(c: T, n: usize) -> T {
    T::one() / (c * T::of_usize(n.max(1)))
}

fn margin<T: Real>(w: &[T], row: &[T]) -> T {
    let d = row.len();
    w[..d].iter().zip(row).fold(w[d], |acc, (&a, &b)| acc + a * b)
}

/// `lambda/2 * |w|^2 + mean(max(0, 1 - s * (w.x + b)))`, where the bias is the
/// last entry of `w` and is regularized like any weight.
pub fn hinge_objective<T: Real>(x: &FeatureMatrix<T>, signs: &[T], lambda: T, w: &[T]) -> T {
    let n = T::of_usize(x.n_rows().max(1));
    let hinge: T = x
        .rows()
        .zip(signs)
        .map(|(row, &s)| (T::one() - s * margin(w, row)).max(T::zero()))
        .sum();
    let norm2: T = w.iter().map(|&v| v * v).sum();
    T::lit(0.5) * lambda * norm2 + hinge / n
}

/// Subgradient of [`hinge_objective`], taking zero for the hinge at its kink.
pub fn hinge_subgradient<T: Real>(x: &FeatureMatrix<T>, signs: &[T], lambda: T, w: &[T]) -> Vec<T> {
    let n = T::of_usize(x.n_rows().max(1));
    let d = x.n_cols();
    let mut g: Vec<T> = w.iter().map(|&v| lambda * v).collect();
    for (row, &s) in x.rows().zip(signs) {
        if s * margin(w, row) < T::one() {
            for (gj, &xj) in g[..d].iter_mut().zip(row) {
                *gj -= s * xj / n;
            }
            g[d] -= s / n;
        }
    }
    g
}

/// One-vs-rest stochastic subgradient training. At each epoch checkpoint the
/// better of the last iterate and the running average is retained. Returns the model and, per
/// class, the objective of the retained iterate at every epoch checkpoint.
pub fn train_linear_svm_traced<T: Real>(
    x: &FeatureMatrix<T>,
    y: &[usize],
    n_classes: usize,
    cfg: &SvmConfig<T>,
) -> Result<(LinearModel<T>, Vec<Vec<T>>), ModelError> {
    check_labels(x, y, n_classes)?;
    let (xs, scaler) = standardize(x);
    let d = x.n_cols();
    let n = xs.n_rows();
    let lambda = svm_lambda(cfg.c, n);
    let radius = T::one() / lambda.sqrt();
    let mut params = Vec::with_capacity(n_classes * (d + 1));
    let mut traces = Vec::with_capacity(n_classes);
    for class in 0..n_classes {
        let signs: Vec<T> = y.iter().map(|&yi| if yi == class { T::one() } else { -T::one() }).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(class as u64));
        let mut order: Vec<usize> = (0..n).collect();
        let mut w = vec![T::zero(); d + 1];
        let mut best = w.clone();
        let mut best_obj = hinge_objective(&xs, &signs, lambda, &best);
        let mut trace = vec![best_obj];
        let mut t = 0usize;
        // running mean of the iterates after the first epoch
        let mut avg = vec![T::zero(); d + 1];
        let mut n_avg = 0usize;
        for epoch in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = T::one() / (lambda * T::of_usize(t));
                let row = xs.row(i);
                let s = signs[i];
                let violated = s * margin(&w, row) < T::one();
                let shrink = T::one() - T::one() / T::of_usize(t);
                w.iter_mut().for_each(|v| *v *= shrink);
                if violated {
                    for (wj, &xj) in w[..d].iter_mut().zip(row) {
                        *wj += eta * s * xj;
                    }
                    w[d] += eta * s;
                }
                let norm = w.iter().map(|&v| v * v).sum::<T>().sqrt();
                if norm > radius {
                    let f = radius / norm;
                    w.iter_mut().for_each(|v| *v *= f);
                }
                if epoch > 0 {
                    n_avg += 1;
                    let k = T::one() / T::of_usize(n_avg);
                    for (a, &v) in avg.iter_mut().zip(&w) {
                        *a += (v - *a) * k;
                    }
                }
            }
            for candidate in [&w, &avg] {
                let obj = hinge_objective(&xs, &signs, lambda, candidate);
                if obj < best_obj {
                    best_obj = obj;
                    best.copy_from_slice(candidate);
                }
            }
            trace.push(best_obj);
        }
        params.extend_from_slice(&best);
        traces.push(trace);
    }
    Ok((unpack(params, n_classes, d, x.names().to_vec(), scaler), traces))
}

pub fn train_linear_svm<T: Real>(
    x: &FeatureMatrix<T>,
    y: &[usize],
    n_classes: usize,
    cfg: &SvmConfig<T>,
) -> Result<LinearModel<T>, ModelError> {
    train_linear_svm_traced(x, y, n_classes, cfg).map(|(m, _)| m)
}
