//! Gauss rules used by the product-integration and verification code.

use nalgebra::{DMatrix, SymmetricEigen};
use std::sync::OnceLock;

use crate::params::gamma;

/// Gauss–Legendre nodes and weights mapped to `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = ((4 * k + 3) as f64 * std::f64::consts::PI / (4 * n + 2) as f64).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((1.0 - x) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const CACHED: [usize; 8] = [2, 3, 4, 6, 8, 12, 16, 24];

/// Cached Gauss–Legendre rule on `[0, 1]` with exactly `n` points for `n` in
/// `{2, 3, 4, 6, 8, 12, 16, 24}`.
pub fn gl(n: usize) -> &'static [(f64, f64)] {
    static TABLES: OnceLock<Vec<Vec<(f64, f64)>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| CACHED.iter().map(|&m| gauss_legendre(m)).collect());
    let idx = CACHED
        .iter()
        .position(|&m| m == n)
        .unwrap_or_else(|| panic!("no cached Gauss-Legendre rule with {n} points"));
    &tables[idx]
}

/// Gauss–Jacobi rule on `[0, 1]` for the weight `(1 - τ)^a τ^b`, `a, b > -1`.
///
/// Golub–Welsch on the monic Jacobi recurrence.
pub fn gauss_jacobi_unit(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    assert!(n >= 1 && a > -1.0 && b > -1.0);
    let mut t = DMatrix::<f64>::zeros(n, n);
    let ab = a + b;
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        t[(k, k)] = diag;
        if k + 1 < n {
            let m = kf + 1.0;
            let beta = if k == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * m * (m + a) * (m + b) * (m + ab)
                    / ((2.0 * m + ab).powi(2) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0))
            };
            t[(k, k + 1)] = beta.sqrt();
            t[(k + 1, k)] = beta.sqrt();
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma(a + 1.0) * gamma(b + 1.0) / gamma(ab + 2.0);
    let eig = SymmetricEigen::new(t);
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let x = eig.eigenvalues[k];
            let v0 = eig.eigenvectors[(0, k)];
            // x ∈ [-1, 1] with weight (1-x)^a (1+x)^b; τ = (1 + x)/2.
            ((1.0 + x) / 2.0, mu0 * v0 * v0 / 2f64.powf(ab + 1.0))
        })
        .collect();
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        for n in CACHED {
            let rule = gl(n);
            for deg in 0..(2 * n) {
                let s: f64 = rule.iter().map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((s - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn jacobi_integrates_beta_moments() {
        let (a, b) = (0.3, -0.3);
        let rule = gauss_jacobi_unit(40, a, b);
        for k in 0..60 {
            let s: f64 = rule.iter().map(|(x, w)| w * x.powi(k)).sum();
            // ∫ τ^{b+k} (1-τ)^a = B(b+k+1, a+1)
            let exact = gamma(b + k as f64 + 1.0) * gamma(a + 1.0) / gamma(a + b + k as f64 + 2.0);
            assert!((s - exact).abs() < 1e-13 * exact.max(1e-3), "k={k}: {s} vs {exact}");
        }
    }

    #[test]
    fn jacobi_reduces_to_legendre() {
        let r = gauss_jacobi_unit(8, 0.0, 0.0);
        let g = gl(8);
        for (p, q) in r.iter().zip(g) {
            assert!((p.0 - q.0).abs() < 1e-14 && (p.1 - q.1).abs() < 1e-14);
        }
    }
}
