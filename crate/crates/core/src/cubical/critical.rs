use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::symmetric_eigen;
use super::{CubicalError, Grid};
use crate::expr::{Derivatives, Expr};
use crate::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CriticalPoint<F: Scalar> {
    pub location: Vec<F>,
    pub value: F,
    pub morse_index: usize,
    /// Smallest |eigenvalue| of the Hessian.
    pub hessian_min_singular_value: F,
}

/// Critical points whose Hessian is singular, grouped by value. These arise
/// on Morse–Bott sets, where Newton converges to many distinct points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DegenerateLevel<F: Scalar> {
    pub value: F,
    pub count: usize,
    pub location: Vec<F>,
    /// Negative and zero eigenvalue counts at `location`.
    pub index: usize,
    pub nullity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct UnconvergedSeed<F: Scalar> {
    pub seed: Vec<F>,
    pub last: Vec<F>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CriticalPointReport<F: Scalar> {
    /// Non-degenerate critical points, ascending by value.
    pub points: Vec<CriticalPoint<F>>,
    pub degenerate: Vec<DegenerateLevel<F>>,
    pub unconverged: Vec<UnconvergedSeed<F>>,
    pub warnings: Vec<String>,
}

impl<F: Scalar> CriticalPointReport<F> {
    /// Every critical value, degenerate levels included, ascending.
    pub fn all_values(&self) -> Vec<F> {
        let mut v: Vec<F> = self
            .points
            .iter()
            .map(|p| p.value)
            .chain(self.degenerate.iter().map(|l| l.value))
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CriticalOptions {
    /// Points closer than this (max-norm, domain units) are merged; Hessian
    /// margins below it are reported as degenerate.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 60,
        }
    }
}

/// Locates critical points of `expr` in `grid`: cells where every gradient
/// component changes sign seed a pseudo-inverse Newton iteration.
pub fn critical_values<F: Scalar>(
    expr: &Expr,
    grid: &Grid,
    tol: f64,
) -> Result<CriticalPointReport<F>, CubicalError> {
    let derivs = Derivatives::new(expr, &grid.axes)?;
    critical_values_with(&derivs, grid, CriticalOptions { tol, ..Default::default() })
}

enum Outcome<F: Scalar> {
    Point { x: Vec<F>, value: F, eig: Vec<F> },
    Failed(UnconvergedSeed<F>),
}

pub fn critical_values_with<F: Scalar>(
    derivs: &Derivatives,
    grid: &Grid,
    opts: CriticalOptions,
) -> Result<CriticalPointReport<F>, CubicalError> {
    let d = grid.dim();
    let n = grid.n_vertices();
    let strides = grid.strides();
    // Gradient at every vertex, vertex-major.
    let mut grad = vec![F::zero(); n * d];
    grad.par_chunks_mut(d)
        .enumerate()
        .try_for_each(|(i, g)| -> Result<(), CubicalError> {
            let x: Vec<F> = grid.vertex(i).into_iter().map(F::lit).collect();
            let mut stack = Vec::new();
            for (a, t) in derivs.gradient.iter().enumerate() {
                g[a] = t.eval(&x, &mut stack)?;
            }
            Ok(())
        })?;
    let corner_offsets: Vec<usize> = (0..1usize << d)
        .map(|mask| (0..d).filter(|a| mask >> a & 1 == 1).map(|a| strides[a]).sum())
        .collect();
    let seeds: Vec<usize> = (0..n)
        .into_par_iter()
        .filter(|&i| {
            let mi = grid.multi_index(i);
            if mi.iter().zip(&grid.resolution).any(|(&k, &r)| k + 1 >= r) {
                return false;
            }
            (0..d).all(|a| {
                let (mut lo, mut hi) = (F::infinity(), F::neg_infinity());
                for &o in &corner_offsets {
                    let v = grad[(i + o) * d + a];
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                lo <= F::zero() && hi >= F::zero()
            })
        })
        .collect();

    let outcomes: Vec<Outcome<F>> = seeds
        .par_iter()
        .map(|&i| {
            let mi = grid.multi_index(i);
            let start: Vec<F> = (0..d)
                .map(|a| {
                    let lo = grid.coordinate(a, mi[a]);
                    let hi = grid.coordinate(a, mi[a] + 1);
                    F::lit(0.5 * (lo + hi))
                })
                .collect();
            newton(derivs, grid, start, opts)
        })
        .collect::<Result<_, _>>()?;

    let mut report = CriticalPointReport {
        points: Vec::new(),
        degenerate: Vec::new(),
        unconverged: Vec::new(),
        warnings: Vec::new(),
    };
    let tol = F::lit(opts.tol);
    for o in outcomes {
        match o {
            Outcome::Failed(u) => report.unconverged.push(u),
            Outcome::Point { x, value, eig } => {
                let scale = eig.iter().fold(F::zero(), |m, e| m.max(e.abs()));
                let thresh = tol.max(F::lit(64.0) * F::epsilon() * scale);
                let margin = eig.iter().fold(F::infinity(), |m, e| m.min(e.abs()));
                let negative = eig.iter().filter(|&&e| e < -thresh).count();
                if margin < thresh {
                    let nullity = eig.iter().filter(|e| e.abs() < thresh).count();
                    let value_tol = F::lit(1e-7) * (F::one() + value.abs());
                    match report
                        .degenerate
                        .iter_mut()
                        .find(|l| (l.value - value).abs() <= value_tol)
                    {
                        Some(level) => level.count += 1,
                        None => report.degenerate.push(DegenerateLevel {
                            value,
                            count: 1,
                            location: x,
                            index: negative,
                            nullity,
                        }),
                    }
                } else {
                    let dup = report.points.iter().any(|p| {
                        p.location
                            .iter()
                            .zip(&x)
                            .all(|(a, b)| (*a - *b).abs() <= tol)
                    });
                    if !dup {
                        report.points.push(CriticalPoint {
                            location: x,
                            value,
                            morse_index: negative,
                            hessian_min_singular_value: margin,
                        });
                    }
                }
            }
        }
    }
    report.points.sort_by(|a, b| {
        a.value
            .partial_cmp(&b.value)
            .unwrap()
            .then_with(|| a.location.partial_cmp(&b.location).unwrap())
    });
    report
        .degenerate
        .sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    for l in &report.degenerate {
        report.warnings.push(format!(
            "degenerate critical level at value {} ({} points, nullity {}, index {})",
            l.value, l.count, l.nullity, l.index
        ));
    }
    if !report.unconverged.is_empty() {
        report.warnings.push(format!(
            "{} Newton seeds did not converge",
            report.unconverged.len()
        ));
    }
    Ok(report)
}

fn newton<F: Scalar>(
    derivs: &Derivatives,
    grid: &Grid,
    seed: Vec<F>,
    opts: CriticalOptions,
) -> Result<Outcome<F>, CubicalError> {
    let d = grid.dim();
    let mut x = seed.clone();
    let mut stack = Vec::new();
    let slack = grid.max_spacing();
    for _ in 0..opts.max_iter {
        let g = derivs.gradient_at(&x, &mut stack)?;
        let h = derivs.hessian_at(&x, &mut stack)?;
        let (vals, vecs) = symmetric_eigen(&h, d);
        let scale = vals.iter().fold(F::zero(), |m, e| m.max(e.abs()));
        let cut = scale * F::lit(1e-9);
        let mut step = vec![F::zero(); d];
        for k in 0..d {
            if vals[k].abs() <= cut {
                continue;
            }
            let coef = (0..d).fold(F::zero(), |s, i| s + vecs[i * d + k] * g[i]) / vals[k];
            for i in 0..d {
                step[i] = step[i] + coef * vecs[i * d + k];
            }
        }
        let step_norm = step.iter().fold(F::zero(), |m, s| m.max(s.abs()));
        for i in 0..d {
            x[i] = x[i] - step[i];
        }
        let xf: Vec<f64> = x.iter().map(|v| v.to_f64_lossy()).collect();
        if !grid.contains(&xf, slack) || x.iter().any(|v| !v.is_finite()) {
            return Ok(Outcome::Failed(UnconvergedSeed {
                seed,
                last: x,
                reason: "left the box".into(),
            }));
        }
        let x_norm = x.iter().fold(F::one(), |m, v| m.max(v.abs()));
        if step_norm <= F::lit(16.0) * F::epsilon() * x_norm {
            break;
        }
    }
    let g = derivs.gradient_at(&x, &mut stack)?;
    let h = derivs.hessian_at(&x, &mut stack)?;
    let (eig, _) = symmetric_eigen(&h, d);
    let g_norm = g.iter().fold(F::zero(), |m, v| m.max(v.abs()));
    let h_scale = eig.iter().fold(F::one(), |m, e| m.max(e.abs()));
    if g_norm > F::lit(1e3) * F::epsilon().sqrt() * h_scale {
        return Ok(Outcome::Failed(UnconvergedSeed {
            seed,
            last: x,
            reason: format!("gradient {} after {} iterations", g_norm, opts.max_iter),
        }));
    }
    let xf: Vec<f64> = x.iter().map(|v| v.to_f64_lossy()).collect();
    if !grid.contains(&xf, 0.0) {
        return Ok(Outcome::Failed(UnconvergedSeed {
            seed,
            last: x,
            reason: "converged outside the box".into(),
        }));
    }
    let value = derivs.value.eval(&x, &mut stack)?;
    Ok(Outcome::Point { x, value, eig })
}
