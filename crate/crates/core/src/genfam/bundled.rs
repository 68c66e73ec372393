//! Ready-made generating families used by the tests and the CLI.
//!
//! Each one is `e1·(1 − c·b(x)·g(e1))` with smoothstep bumps `b`, `g`: two
//! fiber critical points over the region where `c·b·g(0) > 1`, joined at two
//! cusps, and exactly `A·e = e1` outside the support box.

use super::{GHOptions, GenFamSpec};
use crate::expr::parse;

fn bump_x(center: f64) -> String {
    format!("smoothstep(0.5*(1 - (x1 - {center})^2))")
}

const BUMP_E: &str = "smoothstep(0.5*(1 - e1^2/2.25))";

fn spec(name: &str, expr: &str, computation: Vec<[f64; 2]>, support: Vec<[f64; 2]>) -> GenFamSpec {
    GenFamSpec {
        n: 1,
        fiber_dim: 1,
        expr: parse(expr).expect("bundled expression parses"),
        linear_direction: vec![1.0],
        computation_box: computation,
        support_box: support,
        name: Some(name.to_string()),
    }
}

/// The flying-saucer unknot over `x1 ∈ (0.75, 2.75)`.
pub fn unknot() -> GenFamSpec {
    spec(
        "unknot",
        &format!("e1*(1 - 8*{}*{BUMP_E})", bump_x(1.75)),
        vec![[0.25, 3.25], [-2.0, 2.0]],
        vec![[0.75, 2.75], [-1.5, 1.5]],
    )
}

/// [`unknot`] moved by `+0.3` in `x1`.
pub fn translated_unknot() -> GenFamSpec {
    let mut s = super::translate(&unknot(), &[0.3]).expect("translation of a valid spec");
    s.name = Some("translated-unknot".into());
    s
}

/// Two unknots over disjoint intervals of the base.
pub fn two_component() -> GenFamSpec {
    spec(
        "two-component",
        &format!(
            "e1*(1 - 8*({} + {})*{BUMP_E})",
            bump_x(1.75),
            bump_x(4.25)
        ),
        vec![[0.25, 5.75], [-2.0, 2.0]],
        vec![[0.75, 5.25], [-1.5, 1.5]],
    )
}

/// The unknot sampled on 0.4 of its computation box, which clips the front.
/// The box check is only a heuristic and lets this through; the doubled-box
/// stability rerun does not.
pub fn undersized_unknot() -> (GenFamSpec, GHOptions) {
    let mut s = unknot();
    s.name = Some("undersized-unknot".into());
    let opts = GHOptions {
        box_scale: 0.4,
        enforce_box: false,
        ..GHOptions::default()
    };
    (s, opts)
}

/// Specs whose GH tables are expected to be stable.
pub fn numeric_specs() -> Vec<GenFamSpec> {
    vec![unknot(), translated_unknot(), two_component()]
}
