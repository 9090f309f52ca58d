//! The weight `K` and the hypotheses the theory places on it: `K` even,
//! positive, nonincreasing in `|x|`, with `∂_x √K` bounded.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::HalfGrid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Weight {
    /// `K ≡ c`.
    Constant { c: f64 },
    /// `K = (1 + x²)^{-a}`.
    Polynomial { a: f64 },
    /// `K = e^{-β|x|^{2m}}`.
    StretchedExp { beta: f64, m: f64 },
}

impl Default for Weight {
    fn default() -> Self {
        Weight::Constant { c: 1.0 }
    }
}

impl Weight {
    /// Rejects parameters for which the formula is not a positive,
    /// nonincreasing weight. The `m > 1/2` gate is left to
    /// [`validate_assumption_a`].
    pub fn checked(self) -> Result<Self> {
        let ok = match self {
            Weight::Constant { c } => c > 0.0 && c.is_finite(),
            Weight::Polynomial { a } => a >= 0.0 && a.is_finite(),
            Weight::StretchedExp { beta, m } => beta >= 0.0 && beta.is_finite() && m > 0.0 && m.is_finite(),
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidParameter(format!("weight parameters out of range: {self:?}")))
        }
    }

    pub fn log_value(&self, x: f64) -> f64 {
        match *self {
            Weight::Constant { c } => c.ln(),
            Weight::Polynomial { a } => -a * (x * x).ln_1p(),
            Weight::StretchedExp { beta, m } => -beta * x.abs().powf(2.0 * m),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.log_value(x).exp()
    }

    pub fn sqrt_value(&self, x: f64) -> f64 {
        (0.5 * self.log_value(x)).exp()
    }

    /// `½ ∂_x log K`.
    pub fn dlog_half(&self, x: f64) -> f64 {
        match *self {
            Weight::Constant { .. } => 0.0,
            Weight::Polynomial { a } => -a * x / (1.0 + x * x),
            Weight::StretchedExp { beta, m } => {
                if x == 0.0 {
                    0.0
                } else {
                    -beta * m * x.abs().powf(2.0 * m - 1.0) * x.signum()
                }
            }
        }
    }

    /// `∂_x √K = √K · ½ ∂_x log K`.
    pub fn dsqrt(&self, x: f64) -> f64 {
        self.sqrt_value(x) * self.dlog_half(x)
    }

    /// `K(0) = sup K`.
    pub fn k0(&self) -> f64 {
        self.value(0.0)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Weight::Constant { .. })
            || matches!(self, Weight::Polynomial { a } if *a == 0.0)
            || matches!(self, Weight::StretchedExp { beta, .. } if *beta == 0.0)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Weight::Constant { .. } => "const",
            Weight::Polynomial { .. } => "poly",
            Weight::StretchedExp { .. } => "stretched_exp",
        }
    }
}

/// Outcome of the sampled checks; each failure names the first violating
/// node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// `m > 1/2` for stretched exponentials, trivially true otherwise.
    pub admissible: bool,
    pub positive: bool,
    pub nonincreasing: bool,
    pub x_dlog_nonpositive: bool,
    pub dsqrt_sup: f64,
    pub dsqrt_argmax: f64,
    pub dsqrt_bounded: bool,
    pub first_violation: Option<usize>,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.admissible && self.positive && self.nonincreasing && self.x_dlog_nonpositive && self.dsqrt_bounded
    }

    /// `Err(AssumptionViolation)` naming the failed hypotheses.
    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            return Ok(self);
        }
        let mut failed = Vec::new();
        if !self.admissible {
            failed.push("stretched exponent needs m > 1/2");
        }
        if !self.positive {
            failed.push("K must be positive");
        }
        if !self.nonincreasing {
            failed.push("K must be nonincreasing in |x|");
        }
        if !self.x_dlog_nonpositive {
            failed.push("x ∂_x log K must be nonpositive");
        }
        if !self.dsqrt_bounded {
            failed.push("∂_x √K must be bounded");
        }
        Err(Error::AssumptionViolation(failed.join("; ")))
    }
}

/// Samples the hypotheses on the nodes of `grid` and at cell midpoints.
///
/// Evenness holds by construction: every kind depends on `|x|` only.
pub fn validate_assumption_a(k: &Weight, grid: &HalfGrid) -> AssumptionReport {
    let admissible = match *k {
        Weight::StretchedExp { beta, m } => beta == 0.0 || m > 0.5,
        _ => true,
    };
    let nodes = grid.nodes();
    let mut xs = Vec::with_capacity(2 * nodes.len());
    for w in nodes.windows(2) {
        xs.push(w[0]);
        xs.push(0.5 * (w[0] + w[1]));
    }
    xs.push(grid.length());

    let mut report = AssumptionReport {
        admissible,
        positive: true,
        nonincreasing: true,
        x_dlog_nonpositive: true,
        dsqrt_sup: 0.0,
        dsqrt_argmax: 0.0,
        dsqrt_bounded: true,
        first_violation: None,
    };
    let mut first = None;
    let mut prev = f64::INFINITY;
    for (i, &x) in xs.iter().enumerate() {
        let node = i / 2;
        // Log values, so that positivity survives underflow of K itself.
        let kv = k.log_value(x);
        if !(kv > f64::NEG_INFINITY) {
            fail(&mut report.positive, node, &mut first);
        }
        if kv > prev {
            fail(&mut report.nonincreasing, node, &mut first);
        }
        prev = kv;
        if x * k.dlog_half(x) > 0.0 {
            fail(&mut report.x_dlog_nonpositive, node, &mut first);
        }
        let d = k.dsqrt(x).abs();
        if !d.is_finite() {
            fail(&mut report.dsqrt_bounded, node, &mut first);
        } else if d > report.dsqrt_sup {
            report.dsqrt_sup = d;
            report.dsqrt_argmax = x;
        }
    }
    if !admissible {
        report.dsqrt_bounded = false;
    }
    report.first_violation = first;
    report
}

fn fail(ok: &mut bool, node: usize, first: &mut Option<usize>) {
    *ok = false;
    first.get_or_insert(node);
}

/// True when `e^{μ|x|} K ∉ L¹` for every `μ > 0`, the regime in which every
/// solution is known to be symmetric.
pub fn slow_decay_class(k: &Weight) -> bool {
    match *k {
        Weight::Constant { .. } | Weight::Polynomial { .. } => true,
        Weight::StretchedExp { beta, m } => beta == 0.0 || 2.0 * m < 1.0,
    }
}
