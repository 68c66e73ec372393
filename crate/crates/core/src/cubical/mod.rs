//! Sampled scalar fields on boxes, their critical points, and relative
//! homology of sublevel-set pairs through a lower-star cubical model.

mod critical;
mod eigen;
mod homology;
mod validate;

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::expr::{EvalError, Expr, Tape};
use crate::Scalar;

pub use critical::{
    critical_values, critical_values_with, CriticalOptions, CriticalPoint, CriticalPointReport,
    DegenerateLevel, UnconvergedSeed,
};
pub use eigen::symmetric_eigen;
pub use homology::{relative_homology, relative_homology_detailed, RelativeHomology};
pub use validate::{newton_distance, validate_box, BoxRule, BoxValidation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CubicalError {
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("eps ({eps}) must be below omega ({omega})")]
    EpsNotBelowOmega { eps: f64, omega: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Axis-aligned box sampled with `resolution[i]` vertices along axis `i`.
///
/// Vertices are stored row-major with the last axis varying fastest. Vertex
/// `k` on axis `i` sits at `lo + (hi − lo)·k/(resolution − 1)`, computed in
/// `f64`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub axes: Vec<String>,
    pub bounds: Vec<(f64, f64)>,
    pub resolution: Vec<usize>,
}

impl Grid {
    pub fn new(
        axes: Vec<String>,
        bounds: Vec<(f64, f64)>,
        resolution: Vec<usize>,
    ) -> Result<Self, CubicalError> {
        if axes.len() != bounds.len() || axes.len() != resolution.len() {
            return Err(CubicalError::BadGrid("axes, bounds and resolution lengths differ".into()));
        }
        if axes.is_empty() {
            return Err(CubicalError::BadGrid("zero-dimensional grid".into()));
        }
        for (i, (&(lo, hi), &r)) in bounds.iter().zip(&resolution).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(CubicalError::BadGrid(format!("axis {i}: bounds [{lo}, {hi}]")));
            }
            if r < 2 {
                return Err(CubicalError::BadGrid(format!("axis {i}: resolution {r} < 2")));
            }
        }
        let total = resolution.iter().try_fold(1usize, |acc, &r| acc.checked_mul(2 * r - 1));
        if total.is_none_or(|t| t >= u32::MAX as usize) {
            return Err(CubicalError::BadGrid("grid too large".into()));
        }
        Ok(Self {
            axes,
            bounds,
            resolution,
        })
    }

    /// Same resolution on every axis.
    pub fn uniform(axes: Vec<String>, bounds: Vec<(f64, f64)>, r: usize) -> Result<Self, CubicalError> {
        let n = bounds.len();
        Self::new(axes, bounds, vec![r; n])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let (lo, hi) = self.bounds[axis];
        (hi - lo) / (self.resolution[axis] - 1) as f64
    }

    pub fn max_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(0.0, f64::max)
    }

    pub fn coordinate(&self, axis: usize, k: usize) -> f64 {
        let (lo, hi) = self.bounds[axis];
        let r = self.resolution[axis] - 1;
        if k == r {
            hi
        } else {
            lo + (hi - lo) * (k as f64) / (r as f64)
        }
    }

    /// Row-major strides of the vertex array.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for a in (0..self.dim().saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.resolution[a + 1];
        }
        s
    }

    pub fn multi_index(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            out[a] = index % self.resolution[a];
            index /= self.resolution[a];
        }
        out
    }

    pub fn vertex(&self, index: usize) -> Vec<f64> {
        self.multi_index(index)
            .iter()
            .enumerate()
            .map(|(a, &k)| self.coordinate(a, k))
            .collect()
    }

    pub fn contains(&self, x: &[f64], slack: f64) -> bool {
        x.iter()
            .zip(&self.bounds)
            .all(|(&v, &(lo, hi))| v >= lo - slack && v <= hi + slack)
    }

    /// True for vertices on the boundary of the box.
    pub fn on_boundary(&self, index: usize) -> bool {
        self.multi_index(index)
            .iter()
            .zip(&self.resolution)
            .any(|(&k, &r)| k == 0 || k == r - 1)
    }
}

/// Values of a function at the vertices of a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<F> {
    grid: Grid,
    values: Vec<F>,
}

impl<F: Scalar> ScalarField<F> {
    pub fn new(grid: Grid, values: Vec<F>) -> Result<Self, CubicalError> {
        if values.len() != grid.n_vertices() {
            return Err(CubicalError::BadGrid(format!(
                "{} values for {} vertices",
                values.len(),
                grid.n_vertices()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(EvalError::NonFinite {
                value: values[i].to_f64_lossy(),
                location: grid.vertex(i),
            }
            .into());
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn value_range(&self) -> (F, F) {
        self.values
            .iter()
            .fold((F::infinity(), F::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// JSON header describing the layout of the exported values.
    pub fn export_header(&self) -> serde_json::Value {
        serde_json::json!({
            "axes": self.grid.axes,
            "bounds": self.grid.bounds,
            "resolution": self.grid.resolution,
            "order": "row-major, last axis fastest",
            "scalar": std::any::type_name::<F>(),
        })
    }

    /// CSV with a `# {json header}` first line, then one row per vertex:
    /// coordinates in axis order followed by the value.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {}", self.export_header())?;
        let mut head: Vec<String> = self.grid.axes.clone();
        head.push("value".into());
        writeln!(w, "{}", head.join(","))?;
        for (i, v) in self.values.iter().enumerate() {
            let coords = self.grid.vertex(i);
            for c in coords {
                write!(w, "{c:?},")?;
            }
            writeln!(w, "{:?}", v.to_f64_lossy())?;
        }
        Ok(())
    }

    /// The JSON header on one line, then the values as little-endian `f64`.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.export_header())?;
        for v in &self.values {
            w.write_all(&v.to_f64_lossy().to_le_bytes())?;
        }
        Ok(())
    }
}

/// Evaluates `expr` at every vertex. Variables bind to grid axes by name.
pub fn sample<F: Scalar>(expr: &Expr, grid: &Grid) -> Result<ScalarField<F>, CubicalError> {
    let tape = Tape::compile(expr, &grid.axes)?;
    sample_tape(&tape, grid)
}

pub(crate) fn sample_tape<F: Scalar>(tape: &Tape, grid: &Grid) -> Result<ScalarField<F>, CubicalError> {
    let n = grid.n_vertices();
    let d = grid.dim();
    let last = grid.resolution[d - 1];
    let coords: Vec<Vec<F>> = (0..d)
        .map(|a| (0..grid.resolution[a]).map(|k| F::lit(grid.coordinate(a, k))).collect())
        .collect();
    let mut values = vec![F::zero(); n];
    values
        .par_chunks_mut(last)
        .enumerate()
        .try_for_each(|(row, chunk)| -> Result<(), CubicalError> {
            let mut stack = Vec::new();
            let mut x = vec![F::zero(); d];
            let mut rest = row;
            for a in (0..d - 1).rev() {
                x[a] = coords[a][rest % grid.resolution[a]];
                rest /= grid.resolution[a];
            }
            for (k, out) in chunk.iter_mut().enumerate() {
                x[d - 1] = coords[d - 1][k];
                *out = tape.eval_finite(&x, &mut stack)?;
            }
            Ok(())
        })?;
    Ok(ScalarField { grid: grid.clone(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn grid1(lo: f64, hi: f64, r: usize) -> Grid {
        Grid::uniform(vec!["x1".into()], vec![(lo, hi)], r).unwrap()
    }

    #[test]
    fn samples_parabola() {
        let f: ScalarField<f64> = sample(&parse("x1^2").unwrap(), &grid1(-1.0, 1.0, 3)).unwrap();
        assert_eq!(f.values(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn samples_plane_corners() {
        let g = Grid::uniform(vec!["x1".into(), "x2".into()], vec![(0.0, 1.0); 2], 2).unwrap();
        let f: ScalarField<f64> = sample(&parse("x1 + x2").unwrap(), &g).unwrap();
        assert_eq!(f.values(), &[0.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn domain_error_has_location() {
        let err = sample::<f64>(&parse("sqrt(x1)").unwrap(), &grid1(-1.0, 1.0, 3)).unwrap_err();
        match err {
            CubicalError::Eval(EvalError::NegativeSqrt { location, .. }) => {
                assert_eq!(location, vec![-1.0])
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::uniform(vec!["x1".into()], vec![(0.0, 1.0)], 1).is_err());
        assert!(Grid::uniform(vec!["x1".into()], vec![(1.0, 0.0)], 4).is_err());
    }

    #[test]
    fn csv_export_header_and_rows() {
        let f: ScalarField<f64> = sample(&parse("x1").unwrap(), &grid1(0.0, 1.0, 2)).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# {"));
        assert_eq!(lines[1], "x1,value");
        assert_eq!(lines[3], "1.0,1.0");
        let mut bin = Vec::new();
        f.write_binary(&mut bin).unwrap();
        let nl = bin.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(bin.len() - nl - 1, 16);
    }
}
