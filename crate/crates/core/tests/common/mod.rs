#![allow(dead_code)]

pub mod invariants;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use ridge_sdr::Dataset;

pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng))
}

/// Gaussian inputs with a smooth nonlinear response that uses every coordinate.
pub fn random_dataset(seed: u64, n: usize, m: usize) -> Dataset {
    let x = gaussian_matrix(n, m, seed);
    let y = x
        .row_iter()
        .map(|r| {
            let lin: f64 = r.iter().enumerate().map(|(j, v)| v * (j as f64 + 1.0) / m as f64).sum();
            r[0] * r[0] + lin.sin() + 0.3 * r[m - 1]
        })
        .collect();
    Dataset::new(x, y).unwrap()
}

/// Coefficient of determination of a least-squares fit of `y` on `a + b·s`.
pub fn linear_r2(s: &[f64], y: &[f64]) -> f64 {
    let n = s.len() as f64;
    let ms = s.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = s.iter().zip(y).map(|(a, b)| (a - ms) * (b - my)).sum();
    let sxx: f64 = s.iter().map(|a| (a - ms) * (a - ms)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    sxy * sxy / (sxx * syy)
}

/// R² of `y ≈ a + b t²`.
pub fn squared_r2(t: &[f64], y: &[f64]) -> f64 {
    let s: Vec<f64> = t.iter().map(|v| v * v).collect();
    linear_r2(&s, y)
}

/// Pool-adjacent-violators fit of `y` as a nondecreasing function of `t`;
/// returns the fitted values in the original sample order.
pub fn isotonic_fit(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by(|&a, &b| t[a].total_cmp(&t[b]));
    // blocks of (sum, count)
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(t.len());
    for &i in &order {
        blocks.push((y[i], 1));
        while blocks.len() > 1 {
            let (s1, c1) = blocks[blocks.len() - 1];
            let (s0, c0) = blocks[blocks.len() - 2];
            if s0 / c0 as f64 <= s1 / c1 as f64 {
                break;
            }
            blocks.pop();
            *blocks.last_mut().unwrap() = (s0 + s1, c0 + c1);
        }
    }
    let mut fitted = vec![0.0; t.len()];
    let mut k = 0;
    for (s, c) in blocks {
        for &i in &order[k..k + c] {
            fitted[i] = s / c as f64;
        }
        k += c;
    }
    fitted
}

/// Best R² over nondecreasing and nonincreasing fits of `y` on `t`.
pub fn monotone_r2(t: &[f64], y: &[f64]) -> f64 {
    let my = y.iter().sum::<f64>() / y.len() as f64;
    let tss: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let r2 = |fit: Vec<f64>| 1.0 - fit.iter().zip(y).map(|(f, v)| (v - f) * (v - f)).sum::<f64>() / tss;
    let neg: Vec<f64> = t.iter().map(|v| -v).collect();
    r2(isotonic_fit(t, y)).max(r2(isotonic_fit(&neg, y)))
}

/// `E[g(z)]` for `z ~ N(0, 1)` by composite Simpson quadrature on [−12, 12].
pub fn gaussian_expectation(g: impl Fn(f64) -> f64) -> f64 {
    let (a, b, n) = (-12.0f64, 12.0f64, 24_000usize);
    let h = (b - a) / n as f64;
    let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = g(a) * phi(a) + g(b) * phi(b);
    for i in 1..n {
        let z = a + i as f64 * h;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(z) * phi(z);
    }
    acc * h / 3.0
}

pub fn column_means(x: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.sum() / x.nrows() as f64))
}
