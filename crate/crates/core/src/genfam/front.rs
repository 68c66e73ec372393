use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GenFamError, GenFamSpec};
use crate::cubical::symmetric_eigen;
use crate::expr::Derivatives;

/// One sample of the Legendrian: base point, `∂ₓf`, `f`, and the fiber point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontPoint {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub z: f64,
    pub e: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub n: usize,
    pub fiber_dim: usize,
    pub points: Vec<FrontPoint>,
}

impl Front {
    /// Columns `x1..xn, p1..pn, z, e1..eN`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut head: Vec<String> = (1..=self.n).map(|i| format!("x{i}")).collect();
        head.extend((1..=self.n).map(|i| format!("p{i}")));
        head.push("z".into());
        head.extend((1..=self.fiber_dim).map(|i| format!("e{i}")));
        writeln!(w, "{}", head.join(","))?;
        for pt in &self.points {
            let row: Vec<String> = pt
                .x
                .iter()
                .chain(&pt.p)
                .chain(std::iter::once(&pt.z))
                .chain(&pt.e)
                .map(|v| format!("{v:?}"))
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Samples `Σ_f = {∂_e f = 0}` over a `resolution`-per-axis grid of base
/// points and lifts it to the 1-jet `(x, ∂ₓf, f)`. At every sample the
/// Jacobian of `∂_e f` in `(x, e)` must have full rank `N`.
pub fn legendrian_front(spec: &GenFamSpec, resolution: usize) -> Result<Front, GenFamError> {
    spec.validate_structure()?;
    if spec.n > 2 {
        return Err(GenFamError::Invalid(format!("front export needs n <= 2, got {}", spec.n)));
    }
    if resolution < 2 {
        return Err(GenFamError::Invalid("resolution must be at least 2".into()));
    }
    let n = spec.n;
    let big_n = spec.fiber_dim;
    let vars = spec.vars();
    let derivs = Derivatives::new(&spec.expr, &vars)?;
    let fiber_res = if big_n == 1 { 16 * resolution } else { 2 * resolution };
    let axis = |a: usize, k: usize, r: usize| {
        let [lo, hi] = spec.computation_box[a];
        if k == r - 1 {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (r - 1) as f64
        }
    };
    let n_base = resolution.pow(n as u32);
    let per_base: Vec<Vec<FrontPoint>> = (0..n_base)
        .into_par_iter()
        .map(|mut c| -> Result<Vec<FrontPoint>, GenFamError> {
            let mut x = vec![0.0; n];
            for a in (0..n).rev() {
                x[a] = axis(a, c % resolution, resolution);
                c /= resolution;
            }
            fiber_critical_points(spec, &derivs, &x, fiber_res, &axis)
        })
        .collect::<Result<_, _>>()?;
    Ok(Front {
        n,
        fiber_dim: big_n,
        points: per_base.into_iter().flatten().collect(),
    })
}

fn fiber_critical_points(
    spec: &GenFamSpec,
    derivs: &Derivatives,
    x: &[f64],
    fiber_res: usize,
    axis: &(dyn Fn(usize, usize, usize) -> f64 + Sync),
) -> Result<Vec<FrontPoint>, GenFamError> {
    let n = spec.n;
    let big_n = spec.fiber_dim;
    let dim = n + big_n;
    let mut stack = Vec::new();
    let total = fiber_res.pow(big_n as u32);
    let mut pt = x.to_vec();
    pt.resize(dim, 0.0);
    // ∂_e f on the fiber grid.
    let mut grad = vec![0.0; total * big_n];
    for c in 0..total {
        let mut rest = c;
        for b in (0..big_n).rev() {
            pt[n + b] = axis(n + b, rest % fiber_res, fiber_res);
            rest /= fiber_res;
        }
        for b in 0..big_n {
            grad[c * big_n + b] = derivs.gradient[n + b].eval(&pt, &mut stack)?;
        }
    }
    let mut strides = vec![1usize; big_n];
    for b in (0..big_n.saturating_sub(1)).rev() {
        strides[b] = strides[b + 1] * fiber_res;
    }
    let corners: Vec<usize> = (0..1usize << big_n)
        .map(|m| (0..big_n).filter(|b| m >> b & 1 == 1).map(|b| strides[b]).sum())
        .collect();
    let mut found: Vec<FrontPoint> = Vec::new();
    'cells: for c in 0..total {
        let mut rest = c;
        let mut cell = vec![0usize; big_n];
        for b in (0..big_n).rev() {
            cell[b] = rest % fiber_res;
            rest /= fiber_res;
            if cell[b] + 1 >= fiber_res {
                continue 'cells;
            }
        }
        let straddles = (0..big_n).all(|b| {
            let vals = corners.iter().map(|&o| grad[(c + o) * big_n + b]);
            let lo = vals.clone().fold(f64::INFINITY, f64::min);
            let hi = vals.fold(f64::NEG_INFINITY, f64::max);
            lo <= 0.0 && hi >= 0.0
        });
        if !straddles {
            continue;
        }
        for b in 0..big_n {
            pt[n + b] = 0.5 * (axis(n + b, cell[b], fiber_res) + axis(n + b, cell[b] + 1, fiber_res));
        }
        let Some(e) = fiber_newton(spec, derivs, &mut pt, &mut stack)? else {
            continue;
        };
        if found
            .iter()
            .any(|q| q.e.iter().zip(&e).all(|(a, b)| (a - b).abs() < 1e-8))
        {
            continue;
        }
        check_regular(spec, derivs, &pt, &mut stack)?;
        let p = (0..n)
            .map(|a| derivs.gradient[a].eval(&pt, &mut stack))
            .collect::<Result<Vec<_>, _>>()?;
        let z = derivs.value.eval(&pt, &mut stack)?;
        found.push(FrontPoint {
            x: x.to_vec(),
            p,
            z,
            e,
        });
    }
    found.sort_by(|a, b| a.e.partial_cmp(&b.e).unwrap());
    Ok(found)
}

/// Newton on `∂_e f(x, ·) = 0` with `x` fixed. Returns the converged fiber
/// point, or `None` when the iteration leaves the fiber box.
fn fiber_newton(
    spec: &GenFamSpec,
    derivs: &Derivatives,
    pt: &mut [f64],
    stack: &mut Vec<f64>,
) -> Result<Option<Vec<f64>>, GenFamError> {
    let n = spec.n;
    let big_n = spec.fiber_dim;
    for _ in 0..60 {
        let g: Vec<f64> = (0..big_n)
            .map(|b| derivs.gradient[n + b].eval(pt, stack))
            .collect::<Result<_, _>>()?;
        let h = derivs.hessian_at(pt, stack)?;
        let d = n + big_n;
        let block: Vec<f64> = (0..big_n)
            .flat_map(|i| (0..big_n).map(move |j| (i, j)))
            .map(|(i, j)| h[(n + i) * d + n + j])
            .collect();
        let (vals, vecs) = symmetric_eigen(&block, big_n);
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut step = vec![0.0; big_n];
        for k in 0..big_n {
            if vals[k].abs() <= 1e-12 * scale.max(1e-300) {
                continue;
            }
            let coef: f64 = (0..big_n).map(|i| vecs[i * big_n + k] * g[i]).sum::<f64>() / vals[k];
            for i in 0..big_n {
                step[i] += coef * vecs[i * big_n + k];
            }
        }
        let mut small = true;
        for b in 0..big_n {
            pt[n + b] -= step[b];
            let [lo, hi] = spec.computation_box[n + b];
            if !(pt[n + b] >= lo && pt[n + b] <= hi) {
                return Ok(None);
            }
            small &= step[b].abs() <= 1e-14 * (1.0 + pt[n + b].abs());
        }
        if small {
            break;
        }
    }
    let g_norm = (0..big_n)
        .map(|b| derivs.gradient[n + b].eval(pt, stack).map(f64::abs))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if g_norm > 1e-9 {
        return Ok(None);
    }
    Ok(Some(pt[n..].to_vec()))
}

fn check_regular(
    spec: &GenFamSpec,
    derivs: &Derivatives,
    pt: &[f64],
    stack: &mut Vec<f64>,
) -> Result<(), GenFamError> {
    let n = spec.n;
    let big_n = spec.fiber_dim;
    let d = n + big_n;
    let h = derivs.hessian_at(pt, stack)?;
    // J = rows n..d of the Hessian; rank N iff J Jᵀ is nonsingular.
    let mut jjt = vec![0.0; big_n * big_n];
    for i in 0..big_n {
        for j in 0..big_n {
            jjt[i * big_n + j] = (0..d).map(|k| h[(n + i) * d + k] * h[(n + j) * d + k]).sum();
        }
    }
    let (vals, _) = symmetric_eigen(&jjt, big_n);
    let margin = vals[0].max(0.0).sqrt();
    if margin < 1e-8 {
        return Err(GenFamError::NonGenerating {
            location: pt.to_vec(),
            margin,
        });
    }
    Ok(())
}
