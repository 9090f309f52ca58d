//! Fractional-order constants shared by every kernel.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function via the Lanczos approximation (g = 7, 9 terms).
///
/// Uses the reflection formula for `x < 1/2`. Returns an infinite value at
/// the poles `0, -1, -2, ...`.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (PI * x).sin();
        if s == 0.0 {
            return f64::INFINITY;
        }
        return PI / (s * gamma(1.0 - x));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}

/// The order `s` and every constant derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalOrder {
    pub s: f64,
    pub alpha: f64,
    /// Green's constant of the integral representation.
    pub c_alpha: f64,
    /// Normalization of the conjugate Riesz potential, `2 α c_α`.
    pub d_alpha: f64,
    /// Normalization of `(-Δ)^s`; zero at the `s = 1` endpoint.
    pub big_c_s: f64,
    /// Riesz-potential normalization, kept as a diagnostic.
    pub gamma_s: f64,
    /// Set when `s = 1`, which lies outside the open interval `(1/2, 1)`.
    pub oracle: bool,
}

impl FractionalOrder {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.5 && s <= 1.0) {
            return Err(Error::InvalidOrder(s));
        }
        let alpha = s - 0.5;
        let c_alpha =
            -PI.powf(-0.5) * 2f64.powf(-2.0 * alpha - 1.0) * gamma(-alpha) / gamma(alpha + 0.5);
        let oracle = s == 1.0;
        // 1/|Γ(-s)| = s / Γ(1-s) = s sin(πs) Γ(s) / π
        let big_c_s = if oracle {
            0.0
        } else {
            4f64.powf(s) / PI.sqrt() * gamma(0.5 + s) * s * (PI * s).sin() * gamma(s) / PI
        };
        let gamma_s = if oracle {
            0.0
        } else {
            PI.sqrt() * 2f64.powf(s) * gamma(s / 2.0) / gamma((1.0 - s) / 2.0)
        };
        Ok(Self {
            s,
            alpha,
            c_alpha,
            d_alpha: 2.0 * alpha * c_alpha,
            big_c_s,
            gamma_s,
            oracle,
        })
    }

    /// Exponent `2α` of the kernel `|x - y|^{2α}`.
    pub fn p(&self) -> f64 {
        2.0 * self.alpha
    }
}

/// Same as [`FractionalOrder::new`].
pub fn make_order(s: f64) -> Result<FractionalOrder> {
    FractionalOrder::new(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
        // Γ(1/4) from the reflection/duplication tables
        assert!((gamma(0.25) - 3.625_609_908_221_908).abs() < 1e-13);
        assert!(gamma(0.0).is_infinite());
    }

    #[test]
    fn gamma_recurrence() {
        for k in 0..200 {
            let x = -0.99 + 0.017 * k as f64;
            if (x - x.round()).abs() < 1e-3 {
                continue;
            }
            let lhs = gamma(x + 1.0);
            let rhs = x * gamma(x);
            assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0), "x = {x}");
        }
    }

    #[test]
    fn three_quarter_constants() {
        let o = FractionalOrder::new(0.75).unwrap();
        assert_eq!(o.alpha, 0.25);
        assert!((o.c_alpha - (2.0 / PI).sqrt()).abs() < 1e-13);
        assert!((o.d_alpha - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-13);
        let expected = 4f64.powf(0.75) * (3.0 / 16.0) / PI.sqrt();
        assert!((o.big_c_s - expected).abs() < 1e-13);
        assert!((o.big_c_s - 0.299_206).abs() < 1e-6);
        assert!(!o.oracle);
    }

    #[test]
    fn oracle_endpoint() {
        let o = FractionalOrder::new(1.0).unwrap();
        assert!((o.c_alpha - 0.5).abs() < 1e-14);
        assert!((o.d_alpha - 0.5).abs() < 1e-14);
        assert!(o.oracle);
        assert_eq!(o.big_c_s, 0.0);
    }

    #[test]
    fn rejects_out_of_range() {
        for s in [0.5, 0.4, -1.0, 1.0000001, f64::NAN] {
            assert!(FractionalOrder::new(s).is_err(), "s = {s}");
        }
    }

    #[test]
    fn sweep_invariants() {
        let mut prev: Option<f64> = None;
        for k in 1..=500 {
            let s = 0.5 + 0.001 * k as f64;
            let o = FractionalOrder::new(s).unwrap();
            assert_eq!(o.alpha + 0.5, s);
            assert!(o.c_alpha > 0.0);
            assert!((o.d_alpha - 2.0 * (s - 0.5) * o.c_alpha).abs() <= 1e-15 * o.d_alpha);
            if let Some(d) = prev {
                assert!((o.d_alpha - d).abs() < 0.01 * d, "jump at s = {s}");
            }
            prev = Some(o.d_alpha);
        }
    }

    #[test]
    fn big_c_s_matches_direct_formula() {
        for s in [0.55, 0.6, 0.75, 0.9, 0.99] {
            let o = FractionalOrder::new(s).unwrap();
            let direct = 4f64.powf(s) / PI.sqrt() * gamma(0.5 + s) / gamma(-s).abs();
            assert!((o.big_c_s - direct).abs() < 1e-12 * direct, "s = {s}");
        }
    }
}
