use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{symmetric_eigen, CubicalError, ScalarField};
use crate::expr::Derivatives;
use crate::Scalar;

/// How a boundary vertex in the slab is judged to be near a critical point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "threshold")]
pub enum BoxRule {
    /// `‖∇δ‖ ≤ τ`.
    Gradient(f64),
    /// The Newton step `‖H⁺∇δ‖` is at most this distance, and `∇δ` has no
    /// component along the kernel of the Hessian.
    NewtonDistance(f64),
}

impl BoxRule {
    /// Newton distance of 10 grid spacings.
    pub fn default_for(grid: &super::Grid) -> Self {
        BoxRule::NewtonDistance(10.0 * grid.max_spacing())
    }
}

/// Outcome of the sampled box-adequacy test. The test is a heuristic and is
/// reported as such.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxValidation {
    pub ok: bool,
    pub heuristic: bool,
    pub rule: BoxRule,
    /// Boundary vertex inside the slab that the rule flags.
    pub witness: Option<Vec<f64>>,
    pub witness_value: Option<f64>,
    pub witness_gradient_norm: Option<f64>,
    pub witness_distance: Option<f64>,
}

/// Estimated distance from `x` to a critical point of the quadratic model
/// with gradient `g` and Hessian `h` (row-major `d × d`).
pub fn newton_distance(g: &[f64], h: &[f64]) -> f64 {
    let d = g.len();
    let (vals, vecs) = symmetric_eigen(h, d);
    let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let g_norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut sq = 0.0;
    for k in 0..d {
        let c: f64 = (0..d).map(|i| vecs[i * d + k] * g[i]).sum();
        if vals[k].abs() <= 1e-9 * scale {
            if c.abs() > 1e-9 * (1.0 + g_norm) {
                return f64::INFINITY;
            }
        } else {
            sq += (c / vals[k]).powi(2);
        }
    }
    sq.sqrt()
}

/// Checks that no boundary vertex in the slab `eps/2 ≤ δ ≤ 2·omega` is
/// flagged by `rule`.
pub fn validate_box<F: Scalar>(
    derivs: &Derivatives,
    field: &ScalarField<F>,
    eps: f64,
    omega: f64,
    rule: BoxRule,
) -> Result<BoxValidation, CubicalError> {
    let grid = field.grid();
    let values = field.values();
    let (lo, hi) = (eps / 2.0, 2.0 * omega);
    let candidates: Vec<usize> = (0..values.len())
        .into_par_iter()
        .filter(|&i| {
            let v = values[i].to_f64_lossy();
            v >= lo && v <= hi && grid.on_boundary(i)
        })
        .collect();
    let hits: Vec<(usize, f64, f64)> = candidates
        .par_iter()
        .map(|&i| -> Result<Option<(usize, f64, f64)>, CubicalError> {
            let x = grid.vertex(i);
            let mut stack = Vec::new();
            let g = derivs.gradient_at(&x, &mut stack)?;
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            Ok(match rule {
                BoxRule::Gradient(tau) => (norm <= tau).then_some((i, norm, f64::NAN)),
                BoxRule::NewtonDistance(r) => {
                    let h = derivs.hessian_at(&x, &mut stack)?;
                    let dist = newton_distance(&g, &h);
                    (dist <= r).then_some((i, norm, dist))
                }
            })
        })
        .filter_map(|r| r.transpose())
        .collect::<Result<_, _>>()?;
    let first = hits.first();
    Ok(BoxValidation {
        ok: first.is_none(),
        heuristic: true,
        rule,
        witness: first.map(|&(i, _, _)| grid.vertex(i)),
        witness_value: first.map(|&(i, _, _)| values[i].to_f64_lossy()),
        witness_gradient_norm: first.map(|&(_, n, _)| n),
        witness_distance: first.and_then(|&(_, _, d)| (!d.is_nan()).then_some(d)),
    })
}
