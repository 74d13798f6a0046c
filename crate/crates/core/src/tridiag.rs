//! Symmetric tridiagonal eigenvalue tools: Sturm-sequence bisection for
//! eigenvalues and inverse iteration for eigenvectors.
//!
//! Bisection is slower than QL-type methods but is transparent and
//! robust: the Sturm count gives guaranteed brackets for every
//! eigenvalue, which matters because the principal eigenpair feeds
//! certificate checks downstream.

use crate::error::{Error, Result};

/// Number of eigenvalues of the symmetric tridiagonal (diag, off)
/// strictly below x, by the shifted LDL^T sign count.
pub fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let n = diag.len();
    let mut count = 0;
    let mut d = diag[0] - x;
    if d < 0.0 {
        count += 1;
    }
    for i in 1..n {
        if d == 0.0 {
            d = 1e-300;
        }
        d = diag[i] - x - off[i - 1] * off[i - 1] / d;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin enclosure of the spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += off[i - 1].abs();
        }
        if i + 1 < n {
            r += off[i].abs();
        }
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// The idx-th smallest eigenvalue (0-based) to absolute tolerance `abstol`.
pub fn eigenvalue_at(diag: &[f64], off: &[f64], idx: usize, abstol: f64) -> f64 {
    let (mut lo, mut hi) = gershgorin(diag, off);
    // Widen slightly so counts at the ends are unambiguous.
    let pad = 1e-10 * (1.0 + hi.abs().max(lo.abs()));
    lo -= pad;
    hi += pad;
    while hi - lo > abstol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if count_below(diag, off, mid) > idx {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn smallest_eigenvalue(diag: &[f64], off: &[f64], abstol: f64) -> f64 {
    eigenvalue_at(diag, off, 0, abstol)
}

/// Solve a general tridiagonal system by LU with partial pivoting.
///
/// `dl`, `d`, `du` are the sub-, main and superdiagonal; all bands are
/// consumed as working storage conceptually (copied internally).
pub fn solve_general(dl: &[f64], d: &[f64], du: &[f64], b: &[f64]) -> Vec<f64> {
    let n = d.len();
    let dl = dl.to_vec();
    let mut d = d.to_vec();
    let mut du = du.to_vec();
    let mut du2 = vec![0.0; n]; // second superdiagonal fill-in
    let mut x = b.to_vec();

    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            let piv = if d[i] == 0.0 { 1e-300 } else { d[i] };
            let m = dl[i] / piv;
            d[i + 1] -= m * du[i];
            x[i + 1] -= m * x[i];
        } else {
            // Swap rows i and i+1.
            let m = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - m * tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -m * du[i + 1];
            }
            du[i] = tmp;
            x.swap(i, i + 1);
            x[i + 1] -= m * x[i];
        }
    }
    let last = n - 1;
    let piv = if d[last] == 0.0 { 1e-300 } else { d[last] };
    x[last] /= piv;
    if n >= 2 {
        let i = n - 2;
        let piv = if d[i] == 0.0 { 1e-300 } else { d[i] };
        x[i] = (x[i] - du[i] * x[i + 1]) / piv;
    }
    for i in (0..n.saturating_sub(2)).rev() {
        let piv = if d[i] == 0.0 { 1e-300 } else { d[i] };
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / piv;
    }
    x
}

/// Solve (T - shift I) x = b for symmetric tridiagonal T.
pub fn solve_shifted(diag: &[f64], off: &[f64], shift: f64, b: &[f64]) -> Vec<f64> {
    let d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
    solve_general(off, &d, off, b)
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// Eigenvector for a converged eigenvalue by inverse iteration.
pub fn inverse_iteration(diag: &[f64], off: &[f64], eigenvalue: f64) -> Result<Vec<f64>> {
    let n = diag.len();
    let (lo, hi) = gershgorin(diag, off);
    let scale = (hi - lo).max(1.0);
    // Deterministic non-degenerate start vector.
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i as f64 * 0.7391) % 1.0))
        .collect();
    normalize(&mut v);
    // A tiny shift off the eigenvalue keeps the solve well-posed.
    let shift = eigenvalue + 1e-12 * scale;
    for _ in 0..8 {
        let mut w = solve_shifted(diag, off, shift, &v);
        let growth = normalize(&mut w);
        let drift: f64 = w
            .iter()
            .zip(v.iter())
            .map(|(a, b)| (a - b).abs().min((a + b).abs()))
            .fold(0.0, f64::max);
        v = w;
        if growth > 1.0 / (1e-13 * scale) || drift < 1e-14 {
            break;
        }
    }
    let res = residual(diag, off, eigenvalue, &v);
    if res > 1e-8 {
        return Err(Error::Numerical(format!(
            "inverse iteration residual {res:.3e} at eigenvalue {eigenvalue}"
        )));
    }
    Ok(v)
}

/// Relative residual ||T v - mu v|| / (||T||_inf ||v||).
pub fn residual(diag: &[f64], off: &[f64], mu: f64, v: &[f64]) -> f64 {
    let n = diag.len();
    let mut num = 0.0;
    for i in 0..n {
        let mut r = (diag[i] - mu) * v[i];
        if i > 0 {
            r += off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            r += off[i] * v[i + 1];
        }
        num += r * r;
    }
    let norm_v = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut norm_t = 0.0_f64;
    for i in 0..n {
        let mut row = diag[i].abs();
        if i > 0 {
            row += off[i - 1].abs();
        }
        if i + 1 < n {
            row += off[i].abs();
        }
        norm_t = norm_t.max(row);
    }
    num.sqrt() / (norm_t * norm_v).max(1e-300)
}

/// All eigenvalues (ascending) and orthonormal eigenvectors.
///
/// Eigenvalues by per-index bisection; eigenvectors by inverse iteration
/// with Gram-Schmidt against neighbors when eigenvalues nearly coincide.
pub fn full_decomposition(
    diag: &[f64],
    off: &[f64],
    abstol: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = diag.len();
    let mut values = Vec::with_capacity(n);
    for idx in 0..n {
        values.push(eigenvalue_at(diag, off, idx, abstol));
    }
    let (lo, hi) = gershgorin(diag, off);
    let scale = (hi - lo).max(1.0);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    for idx in 0..n {
        let mut v = inverse_iteration(diag, off, values[idx])?;
        // Re-orthogonalize within clusters of nearly equal eigenvalues.
        let mut changed = false;
        for prev in (0..idx).rev() {
            if (values[idx] - values[prev]).abs() > 1e-8 * scale {
                break;
            }
            let dot: f64 = v.iter().zip(vectors[prev].iter()).map(|(a, b)| a * b).sum();
            for (a, b) in v.iter_mut().zip(vectors[prev].iter()) {
                *a -= dot * b;
            }
            changed = true;
        }
        if changed {
            normalize(&mut v);
        }
        vectors.push(v);
    }
    Ok((values, vectors))
}
