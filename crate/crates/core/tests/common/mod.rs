//! Shared oracles for the integration tests, implemented independently
//! of the library's own numerics: an implicit-shift QL eigenvalue
//! routine (EISPACK tql-style similarity transforms, nothing shared
//! with the library's Sturm bisection) and a bisection root finder for
//! the Robin transcendental equation.

#![allow(dead_code)]

/// All eigenvalues (ascending) of the symmetric tridiagonal matrix with
/// main diagonal `diag` and off-diagonal `off`, by implicit-shift QL.
pub fn ql_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert_eq!(off.len(), n.saturating_sub(1));
    let mut d = diag.to_vec();
    let mut e = vec![0.0_f64; n];
    e[..n - 1].copy_from_slice(off);

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Look for a negligible subdiagonal element to split at.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "QL iteration failed to converge");

            // Implicit shift from the 2x2 block at l.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    d
}

pub fn ql_smallest(diag: &[f64], off: &[f64]) -> f64 {
    ql_eigenvalues(diag, off)[0]
}

/// Root of sqrt(v) tan(sqrt(v) L / 2) = q on (0, (pi/L)^2): the Robin
/// eigenvalue of -phi'' on (0, L) with phi' = q phi inward at both ends
/// and zero potential, solved by bisection on the monotone branch.
pub fn robin_laplace_eigenvalue(length: f64, q: f64) -> f64 {
    let f = |v: f64| {
        let s = v.sqrt();
        s * (s * length / 2.0).tan() - q
    };
    let mut lo = 1e-12;
    let mut hi = (std::f64::consts::PI / length).powi(2) * (1.0 - 1e-12);
    assert!(f(lo) < 0.0 && f(hi) > 0.0, "no bracket for the Robin root");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
