use super::{check_labels, standardize, FeatureMatrix, LinearModel, ModelError};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticConfig<T = f64> {
    /// L2 penalty on the weights (bias excluded).
    pub l2: T,
    pub epochs: usize,
    /// First trial step; later trials use the Barzilai-Borwein estimate.
    pub lr: T,
    /// Unused by the full-batch optimizer; kept so configs round-trip.
    pub seed: u64,
}

impl<T: Real> Default for LogisticConfig<T> {
    fn default() -> Self {
        LogisticConfig { l2: T::lit(1e-3), epochs: 500, lr: T::one(), seed: 7 }
    }
}

const ARMIJO: f64 = 1e-4;
const GRAD_TOL: f64 = 1e-7;
const MAX_STEP: f64 = 1e4;

/// Mean softmax cross-entropy plus `l2/2 * |W|^2`. `params` holds one row of
/// `d` weights followed by the bias per class.
pub fn logistic_objective<T: Real>(
    x: &FeatureMatrix<T>,
    y: &[usize],
    n_classes: usize,
    l2: T,
    params: &[T],
) -> T {
    loss_and_grad(x, y, n_classes, l2, params, None)
}

pub fn logistic_gradient<T: Real>(
    x: &FeatureMatrix<T>,
    y: &[usize],
    n_classes: usize,
    l2: T,
    params: &[T],
) -> Vec<T> {
    let mut g = vec![T::zero(); params.len()];
    loss_and_grad(x, y, n_classes, l2, params, Some(&mut g));
    g
}

fn loss_and_grad<T: Real>(
    x: &FeatureMatrix<T>,
    y: &[usize],
    k: usize,
    l2: T,
    params: &[T],
    mut grad: Option<&mut [T]>,
) -> T {
    let d = x.n_cols();
    let stride = d + 1;
    let n = T::of_usize(x.n_rows().max(1));
    if let Some(g) = grad.as_deref_mut() {
        g.iter_mut().for_each(|v| *v = T::zero());
    }
    let mut z = vec![T::zero(); k];
    let mut loss = T::zero();
    for (row, &yi) in x.rows().zip(y) {
        for (c, zc) in z.iter_mut().enumerate() {
            let w = &params[c * stride..(c + 1) * stride];
            *zc = w[..d].iter().zip(row).fold(w[d], |acc, (&a, &b)| acc + a * b);
        }
        let m = z.iter().copied().fold(T::neg_infinity(), T::max);
        let sum: T = z.iter().map(|&v| (v - m).exp()).sum();
        let lse = m + sum.ln();
        loss += lse - z[yi];
        if let Some(g) = grad.as_deref_mut() {
            for c in 0..k {
                let p = (z[c] - lse).exp();
                let r = (p - if c == yi { T::one() } else { T::zero() }) / n;
                let gc = &mut g[c * stride..(c + 1) * stride];
                for (gj, &xj) in gc[..d].iter_mut().zip(row) {
                    *gj += r * xj;
                }
                gc[d] += r;
            }
        }
    }
    let half = T::lit(0.5);
    let mut penalty = T::zero();
    for c in 0..k {
        for j in 0..d {
            let w = params[c * stride + j];
            penalty += w * w;
            if let Some(g) = grad.as_deref_mut() {
                g[c * stride + j] += l2 * w;
            }
        }
    }
    loss / n + half * l2 * penalty
}

/// Trains and returns the model together with the loss after every accepted
/// step (the first entry is the loss at zero weights).
pub fn train_logistic_traced<T: Real>(
    x: &FeatureMatrix<T>,
    y: &[usize],
    n_classes: usize,
    cfg: &LogisticConfig<T>,
) -> Result<(LinearModel<T>, Vec<T>), ModelError> {
    check_labels(x, y, n_classes)?;
    let (xs, scaler) = standardize(x);
    let d = x.n_cols();
    let mut params = vec![T::zero(); n_classes * (d + 1)];
    let mut grad = vec![T::zero(); params.len()];
    let mut loss = loss_and_grad(&xs, y, n_classes, cfg.l2, &params, Some(&mut grad));
    let mut trace = vec![loss];
    let mut step = cfg.lr;
    let min_step = cfg.lr * T::lit(1e-12);
    let mut cand = params.clone();
    let mut cand_grad = grad.clone();
    'epochs: for _ in 0..cfg.epochs {
        let g2: T = grad.iter().map(|&g| g * g).sum();
        if g2.sqrt() < T::lit(GRAD_TOL) {
            break;
        }
        let lc = loop {
            for ((c, &p), &g) in cand.iter_mut().zip(&params).zip(&grad) {
                *c = p - step * g;
            }
            let lc = logistic_objective(&xs, y, n_classes, cfg.l2, &cand);
            if lc <= loss - T::lit(ARMIJO) * step * g2 {
                break lc;
            }
            step /= T::lit(2.0);
            if step < min_step {
                break 'epochs;
            }
        };
        loss_and_grad(&xs, y, n_classes, cfg.l2, &cand, Some(&mut cand_grad));
        // Barzilai-Borwein trial step for the next iteration
        let (mut ss, mut sy) = (T::zero(), T::zero());
        for i in 0..params.len() {
            let s = cand[i] - params[i];
            ss += s * s;
            sy += s * (cand_grad[i] - grad[i]);
        }
        step = if sy > T::zero() { (ss / sy).min(T::lit(MAX_STEP)) } else { cfg.lr };
        std::mem::swap(&mut params, &mut cand);
        std::mem::swap(&mut grad, &mut cand_grad);
        loss = lc;
        trace.push(loss);
    }
    Ok((unpack(params, n_classes, d, x.names().to_vec(), scaler), trace))
}

pub fn train_logistic<T: Real>(
    x: &FeatureMatrix<T>,
    y: &[usize],
    n_classes: usize,
    cfg: &LogisticConfig<T>,
) -> Result<LinearModel<T>, ModelError> {
    train_logistic_traced(x, y, n_classes, cfg).map(|(m, _)| m)
}

pub(crate) fn unpack<T: Real>(
    params: Vec<T>,
    n_classes: usize,
    d: usize,
    feature_names: Vec<String>,
    scaler: super::Scaler<T>,
) -> LinearModel<T> {
    let mut weights = Vec::with_capacity(n_classes);
    let mut bias = Vec::with_capacity(n_classes);
    for chunk in params.chunks(d + 1).take(n_classes) {
        weights.push(chunk[..d].to_vec());
        bias.push(chunk[d]);
    }
    LinearModel {
        feature_names,
        class_names: (0..n_classes).map(|c| c.to_string()).collect(),
        scaler,
        weights,
        bias,
    }
}
