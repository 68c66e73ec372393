use serde::{Deserialize, Serialize};

use crate::z2::ComplexDoc;

/// Morse data of the base of a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseDescriptor {
    /// `S^m` with a maximum `a` (degree `m`) and a minimum `b` (degree 0).
    Sphere { m: usize },
    /// `[−1, 1]` with minima at `±1` and a maximum at `0`.
    Interval,
    /// `[−1, 1] × S^m`: six critical points `(n, c)`.
    IntervalSphere { m: usize },
    /// Arbitrary base given by its Morse complex.
    Complex { complex: ComplexDoc },
}

impl BaseDescriptor {
    /// Base points and their degrees. Interval points are `"-1"`, `"0"`,
    /// `"1"`; interval-sphere points are `"(n,c)"`.
    pub fn points(&self) -> Vec<(String, i64)> {
        match self {
            BaseDescriptor::Sphere { m } => vec![("a".into(), *m as i64), ("b".into(), 0)],
            BaseDescriptor::Interval => {
                vec![("-1".into(), 0), ("0".into(), 1), ("1".into(), 0)]
            }
            BaseDescriptor::IntervalSphere { m } => {
                let m = *m as i64;
                let mut out = Vec::new();
                for n in [-1i64, 0, 1] {
                    let l = if n == 0 { 1 } else { 0 };
                    out.push((interval_sphere_point(n, 'a'), l + m));
                    out.push((interval_sphere_point(n, 'b'), l));
                }
                out
            }
            BaseDescriptor::Complex { complex } => complex
                .generators
                .iter()
                .map(|g| (g.id.clone(), g.degree))
                .collect(),
        }
    }

    pub fn sphere_dim(&self) -> Option<usize> {
        match self {
            BaseDescriptor::Sphere { m } | BaseDescriptor::IntervalSphere { m } => Some(*m),
            _ => None,
        }
    }
}

/// Name of the interval-sphere base point `(n, c)`.
pub fn interval_sphere_point(n: i64, c: char) -> String {
    format!("({n},{c})")
}
