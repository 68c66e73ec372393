//! Closed-form generating families `f(x, e)` on boxes of `ℝⁿ × ℝᴺ`, their
//! difference functions, fronts, and numerically computed GH tables.

pub mod bundled;
mod front;
mod pipeline;
mod spin;

use serde::{Deserialize, Serialize};

use crate::cubical::{BoxRule, CubicalError, Grid};
use crate::expr::{var_names, EvalError, Expr, Tape};

pub use front::{legendrian_front, Front, FrontPoint};
pub use pipeline::{gh, stability, stability_from, GHOptions, GHResult, StabilityReport, StabilityRun};
pub use spin::{spin_spec, translate};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenFamError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown variable {0:?} (expected x1..xn, e1..eN)")]
    UnknownVariable(String),
    #[error("variable {0:?} collides with the difference-function variables t1..tN")]
    VariableCollision(String),
    #[error("linear_direction must be nonzero")]
    ZeroLinearDirection,
    #[error("support_box axis {axis} [{lo}, {hi}] is not inside the computation box")]
    SupportOutsideBox { axis: usize, lo: f64, hi: f64 },
    #[error("not linear at infinity: |f - A.e| = {deviation} at {location:?}")]
    NotLinearAtInfinity { location: Vec<f64>, deviation: f64 },
    #[error("box validation failed (heuristic): slab point {witness:?} with value {value} and gradient norm {gradient_norm} is flagged by {rule:?}")]
    BoxValidation {
        witness: Vec<f64>,
        value: f64,
        gradient_norm: f64,
        rule: BoxRule,
    },
    #[error("support must lie in the half-space x{axis} > 1/2; witness {witness:?}")]
    HalfSpace { axis: usize, witness: Vec<f64> },
    #[error("0 is not a regular value of the fiber derivative at {location:?} (smallest singular value {margin})")]
    NonGenerating { location: Vec<f64>, margin: f64 },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Cubical(#[from] CubicalError),
}

/// A generating family `f(x1..xn, e1..eN)` that agrees with `A·e` outside
/// `support_box`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenFamSpec {
    pub n: usize,
    #[serde(rename = "N")]
    pub fiber_dim: usize,
    pub expr: Expr,
    pub linear_direction: Vec<f64>,
    pub computation_box: Vec<[f64; 2]>,
    pub support_box: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

const SHELL_TOL: f64 = 1e-9;
const SHELL_SAMPLES: usize = 9;

impl GenFamSpec {
    pub fn base_vars(&self) -> Vec<String> {
        var_names("x", self.n)
    }

    pub fn fiber_vars(&self) -> Vec<String> {
        var_names("e", self.fiber_dim)
    }

    /// `x1..xn, e1..eN`.
    pub fn vars(&self) -> Vec<String> {
        let mut v = self.base_vars();
        v.extend(self.fiber_vars());
        v
    }

    /// Structural checks plus the sampled linear-at-infinity shell test.
    pub fn validate(&self) -> Result<(), GenFamError> {
        self.validate_structure()?;
        self.shell_test()
    }

    pub fn validate_structure(&self) -> Result<(), GenFamError> {
        let dim = self.n + self.fiber_dim;
        if self.fiber_dim == 0 {
            return Err(GenFamError::Dimension("N must be at least 1".into()));
        }
        if self.computation_box.len() != dim || self.support_box.len() != dim {
            return Err(GenFamError::Dimension(format!(
                "boxes need n + N = {dim} axes (computation {}, support {})",
                self.computation_box.len(),
                self.support_box.len()
            )));
        }
        if self.linear_direction.len() != self.fiber_dim {
            return Err(GenFamError::Dimension(format!(
                "linear_direction has {} entries, N = {}",
                self.linear_direction.len(),
                self.fiber_dim
            )));
        }
        if self.linear_direction.iter().all(|&a| a == 0.0) {
            return Err(GenFamError::ZeroLinearDirection);
        }
        let vars = self.vars();
        for v in self.expr.variables() {
            if !vars.contains(&v) {
                return Err(GenFamError::UnknownVariable(v));
            }
        }
        for (axis, (c, s)) in self.computation_box.iter().zip(&self.support_box).enumerate() {
            if !(c[0] < c[1]) {
                return Err(GenFamError::Dimension(format!("computation box axis {axis} is empty")));
            }
            if s[0] < c[0] || s[1] > c[1] || s[0] > s[1] {
                return Err(GenFamError::SupportOutsideBox {
                    axis,
                    lo: s[0],
                    hi: s[1],
                });
            }
        }
        Ok(())
    }

    /// `|f − A·e| < 1e−9` on a sample of the computation box outside the
    /// support box.
    pub fn shell_test(&self) -> Result<(), GenFamError> {
        let vars = self.vars();
        let tape = Tape::compile(&self.expr, &vars)?;
        let dim = vars.len();
        let mut stack = Vec::new();
        let total = SHELL_SAMPLES.pow(dim as u32);
        let mut x = vec![0.0f64; dim];
        for mut c in 0..total {
            for a in (0..dim).rev() {
                let k = c % SHELL_SAMPLES;
                c /= SHELL_SAMPLES;
                let [lo, hi] = self.computation_box[a];
                x[a] = lo + (hi - lo) * k as f64 / (SHELL_SAMPLES - 1) as f64;
            }
            if self.in_support(&x) {
                continue;
            }
            let f = tape.eval(&x, &mut stack)?;
            let lin: f64 = self
                .linear_direction
                .iter()
                .zip(&x[self.n..])
                .map(|(a, e)| a * e)
                .sum();
            let dev = (f - lin).abs();
            if !(dev < SHELL_TOL) {
                return Err(GenFamError::NotLinearAtInfinity {
                    location: x,
                    deviation: dev,
                });
            }
        }
        Ok(())
    }

    fn in_support(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(&self.support_box)
            .all(|(&v, s)| v > s[0] && v < s[1])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

/// `δ(x, η, η̃) = f(x, η̃) − f(x, η)` on `M × ℝᴺ × ℝᴺ`. Variables are
/// `x1..xn`, `e1..eN` for `η` and `t1..tN` for `η̃`.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceFunction {
    pub n: usize,
    pub fiber_dim: usize,
    pub expr: Expr,
    pub axes: Vec<String>,
    pub bounds: Vec<(f64, f64)>,
}

impl DifferenceFunction {
    /// Grid on the computation box scaled by `box_scale` about its center.
    pub fn grid(&self, resolution: usize, box_scale: f64) -> Result<Grid, CubicalError> {
        let bounds = self
            .bounds
            .iter()
            .map(|&(lo, hi)| {
                let c = 0.5 * (lo + hi);
                let h = 0.5 * (hi - lo) * box_scale;
                (c - h, c + h)
            })
            .collect();
        Grid::uniform(self.axes.clone(), bounds, resolution)
    }
}

pub fn difference(spec: &GenFamSpec) -> Result<DifferenceFunction, GenFamError> {
    let t_vars = var_names("t", spec.fiber_dim);
    for v in spec.expr.variables() {
        if v.starts_with('t') {
            return Err(GenFamError::VariableCollision(v));
        }
    }
    spec.validate_structure()?;
    let n = spec.n;
    let shifted = spec.expr.rename(&|v| {
        v.strip_prefix('e')
            .and_then(|i| i.parse::<usize>().ok())
            .map(|i| format!("t{i}"))
    });
    let expr = Expr::sub(shifted, spec.expr.clone());
    let mut axes = spec.vars();
    axes.extend(t_vars);
    let mut bounds: Vec<(f64, f64)> = spec.computation_box.iter().map(|b| (b[0], b[1])).collect();
    bounds.extend(spec.computation_box[n..].iter().map(|b| (b[0], b[1])));
    Ok(DifferenceFunction {
        n,
        fiber_dim: spec.fiber_dim,
        expr,
        axes,
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn simple(expr: &str) -> GenFamSpec {
        GenFamSpec {
            n: 1,
            fiber_dim: 1,
            expr: parse(expr).unwrap(),
            linear_direction: vec![1.0],
            computation_box: vec![[-2.0, 2.0], [-3.0, 3.0]],
            support_box: vec![[-2.0, 2.0], [-3.0, 3.0]],
            name: None,
        }
    }

    #[test]
    fn difference_of_square() {
        let d = difference(&simple("e1^2")).unwrap();
        assert_eq!(d.expr, parse("t1^2 - e1^2").unwrap());
        assert_eq!(d.axes, vec!["x1", "e1", "t1"]);
    }

    #[test]
    fn difference_of_cubic_at_one_two() {
        let d = difference(&simple("e1^3 - x1*e1")).unwrap();
        for x in [-1.0, 0.0, 0.7, 3.0] {
            let v = d.expr.eval_with(&|n| match n {
                "x1" => x,
                "e1" => 1.0,
                "t1" => 2.0,
                _ => unreachable!(),
            });
            assert!((v - (7.0 - x)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_t_variables_and_unknowns() {
        assert_eq!(
            difference(&simple("e1 + t1")),
            Err(GenFamError::VariableCollision("t1".into()))
        );
        assert_eq!(
            simple("e1 + y3").validate(),
            Err(GenFamError::UnknownVariable("y3".into()))
        );
    }

    #[test]
    fn shell_test_catches_nonlinear_tail() {
        let mut s = simple("e1 + 0.001*x1^2");
        s.support_box = vec![[-1.0, 1.0], [-1.0, 1.0]];
        assert!(matches!(s.validate(), Err(GenFamError::NotLinearAtInfinity { .. })));
        let mut s = simple("e1 + smoothstep(1 - x1^2)*smoothstep(1 - e1^2)");
        s.support_box = vec![[-1.0, 1.0], [-1.0, 1.0]];
        s.validate().unwrap();
    }

    #[test]
    fn json_round_trip() {
        let s = bundled::unknot();
        let text = s.to_json();
        assert!(text.contains("\"N\": 1"));
        let back: GenFamSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
