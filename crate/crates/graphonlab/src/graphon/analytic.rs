//! Closed-form graphons from a fixed registry.

use serde::{Deserialize, Serialize};

/// A graphon with a closed-form expression.
///
/// Every variant is symmetric by construction and maps into `[0,1]` for the
/// parameter ranges accepted here (the constructor-level checks live in the
/// JSON config layer; direct construction trusts the caller).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "expression", rename_all = "kebab-case")]
pub enum AnalyticGraphon {
    /// `W(u, v) = u * v`.
    Product,
    /// `W(u, v) = p`, the Erdős–Rényi kernel.
    Constant { p: f64 },
    /// `W(u, v) = min(u, v)`.
    Min,
    /// `W(u, v) = max(u, v)`.
    Max,
    /// A two-community kernel with a smooth crossover between an
    /// in-community density `p_in` and a cross-community density `p_out`:
    ///
    /// `W(u, v) = p_out + (p_in - p_out) * s(u) * s(v) + (p_in - p_out) * (1 - s(u)) * (1 - s(v))`
    ///
    /// where `s(x) = 1 / (1 + exp(sharpness * (x - center)))` is a logistic
    /// membership function. Large `sharpness` approaches a two-block kernel.
    SmoothSbm {
        p_in: f64,
        p_out: f64,
        center: f64,
        sharpness: f64,
    },
}

impl AnalyticGraphon {
    pub(crate) fn value(&self, u: f64, v: f64) -> f64 {
        match *self {
            AnalyticGraphon::Product => u * v,
            AnalyticGraphon::Constant { p } => p,
            AnalyticGraphon::Min => u.min(v),
            AnalyticGraphon::Max => u.max(v),
            AnalyticGraphon::SmoothSbm {
                p_in,
                p_out,
                center,
                sharpness,
            } => {
                let s = |x: f64| 1.0 / (1.0 + (sharpness * (x - center)).exp());
                let (su, sv) = (s(u), s(v));
                p_out + (p_in - p_out) * (su * sv + (1.0 - su) * (1.0 - sv))
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AnalyticGraphon::Product => "product",
            AnalyticGraphon::Constant { .. } => "constant",
            AnalyticGraphon::Min => "min",
            AnalyticGraphon::Max => "max",
            AnalyticGraphon::SmoothSbm { .. } => "smooth-sbm",
        }
    }

    /// The exact Lipschitz constant under the `|du| + |dv|` metric.
    ///
    /// For the logistic kernel the per-coordinate derivative is bounded by
    /// `|p_in - p_out| * sharpness / 4` (the logistic slope peaks at 1/4).
    pub fn analytic_lipschitz(&self) -> Option<f64> {
        match *self {
            AnalyticGraphon::Product => Some(1.0),
            AnalyticGraphon::Constant { .. } => Some(0.0),
            AnalyticGraphon::Min | AnalyticGraphon::Max => Some(1.0),
            AnalyticGraphon::SmoothSbm {
                p_in,
                p_out,
                sharpness,
                ..
            } => Some((p_in - p_out).abs() * sharpness / 4.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_values_match_formulas() {
        assert_eq!(AnalyticGraphon::Product.value(0.25, 0.5), 0.125);
        assert_eq!(AnalyticGraphon::Constant { p: 0.7 }.value(0.1, 0.9), 0.7);
        assert_eq!(AnalyticGraphon::Min.value(0.3, 0.8), 0.3);
        assert_eq!(AnalyticGraphon::Max.value(0.3, 0.8), 0.8);
    }

    #[test]
    fn smooth_sbm_is_symmetric_and_interpolates() {
        let g = AnalyticGraphon::SmoothSbm {
            p_in: 0.8,
            p_out: 0.1,
            center: 0.5,
            sharpness: 40.0,
        };
        assert!((g.value(0.2, 0.7) - g.value(0.7, 0.2)).abs() < 1e-15);
        // Deep inside a community the kernel is close to p_in, across it to p_out.
        assert!((g.value(0.1, 0.2) - 0.8).abs() < 1e-4);
        assert!((g.value(0.1, 0.9) - 0.1).abs() < 1e-4);
    }

    #[test]
    fn lipschitz_constant_bounds_finite_differences() {
        let g = AnalyticGraphon::SmoothSbm {
            p_in: 0.8,
            p_out: 0.1,
            center: 0.5,
            sharpness: 12.0,
        };
        let l = g.analytic_lipschitz().unwrap();
        let h = 1e-6;
        let mut worst = 0.0f64;
        for i in 0..50 {
            let u = i as f64 / 49.0 * (1.0 - h);
            for j in 0..50 {
                let v = j as f64 / 49.0;
                worst = worst.max((g.value(u + h, v) - g.value(u, v)).abs() / h);
            }
        }
        assert!(worst <= l + 1e-6, "slope {worst} exceeds declared {l}");
    }
}
