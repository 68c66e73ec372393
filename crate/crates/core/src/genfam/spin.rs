use super::{GenFamError, GenFamSpec};
use crate::expr::{Expr, Tape};

const HALF_SPACE: f64 = 0.5;

/// Front spinning: replaces the last base coordinate by the radius
/// `sqrt(x_n² + … + x_{n+m}²)`. The new base axes are `[-hi, hi]` where `hi`
/// is the old upper bound of `x_n`.
pub fn spin_spec(spec: &GenFamSpec, m: usize) -> Result<GenFamSpec, GenFamError> {
    spec.validate_structure()?;
    if m == 0 {
        return Err(GenFamError::Invalid("spin needs m >= 1".into()));
    }
    if spec.n == 0 {
        return Err(GenFamError::Dimension("spin needs a base coordinate".into()));
    }
    let n = spec.n;
    let axis = n - 1;
    if spec.support_box[axis][0] <= HALF_SPACE {
        return Err(GenFamError::HalfSpace {
            axis: n,
            witness: half_space_witness(spec)?,
        });
    }
    let radius = Expr::sqrt(Expr::sum(
        (n..=n + m).map(|i| Expr::pow(Expr::var(&format!("x{i}")), 2)),
    ));
    let xn = format!("x{n}");
    let expr = spec
        .expr
        .substitute(&|v| (v == xn).then(|| radius.clone()));

    let revolve = |b: &Vec<[f64; 2]>| {
        let mut out: Vec<[f64; 2]> = b[..axis].to_vec();
        let hi = b[axis][1];
        out.extend(std::iter::repeat_n([-hi, hi], m + 1));
        out.extend_from_slice(&b[n..]);
        out
    };
    Ok(GenFamSpec {
        n: n + m,
        fiber_dim: spec.fiber_dim,
        expr,
        linear_direction: spec.linear_direction.clone(),
        computation_box: revolve(&spec.computation_box),
        support_box: revolve(&spec.support_box),
        name: spec.name.as_ref().map(|s| format!("{s}-spun{m}")),
    })
}

/// A sample of the support region with `x_n ≤ 1/2` where `f ≠ A·e`, or the
/// lower support corner when the sample finds none.
fn half_space_witness(spec: &GenFamSpec) -> Result<Vec<f64>, GenFamError> {
    const K: usize = 9;
    let vars = spec.vars();
    let tape = Tape::compile(&spec.expr, &vars)?;
    let dim = vars.len();
    let axis = spec.n - 1;
    let mut bounds: Vec<[f64; 2]> = spec.support_box.clone();
    bounds[axis][1] = bounds[axis][1].min(HALF_SPACE);
    let mut stack = Vec::new();
    let mut x = vec![0.0; dim];
    for mut c in 0..K.pow(dim as u32) {
        for a in (0..dim).rev() {
            let [lo, hi] = bounds[a];
            x[a] = lo + (hi - lo) * (c % K) as f64 / (K - 1) as f64;
            c /= K;
        }
        let f = tape.eval(&x, &mut stack)?;
        let lin: f64 = spec.linear_direction.iter().zip(&x[spec.n..]).map(|(a, e)| a * e).sum();
        if (f - lin).abs() >= 1e-9 {
            return Ok(x);
        }
    }
    Ok(spec.support_box.iter().map(|b| b[0]).collect())
}

/// The spec of `f(x - shift, e)`: translation of the Legendrian in the base.
pub fn translate(spec: &GenFamSpec, shift: &[f64]) -> Result<GenFamSpec, GenFamError> {
    spec.validate_structure()?;
    if shift.len() != spec.n {
        return Err(GenFamError::Dimension(format!(
            "shift has {} entries, n = {}",
            shift.len(),
            spec.n
        )));
    }
    let expr = spec.expr.substitute(&|v| {
        let i: usize = v.strip_prefix('x')?.parse().ok()?;
        let s = shift[i - 1];
        Some(Expr::sub(Expr::var(v), Expr::constant(s)))
    });
    let mv = |b: &Vec<[f64; 2]>| {
        b.iter()
            .enumerate()
            .map(|(a, &[lo, hi])| {
                let s = shift.get(a).copied().unwrap_or(0.0);
                [lo + s, hi + s]
            })
            .collect()
    };
    Ok(GenFamSpec {
        n: spec.n,
        fiber_dim: spec.fiber_dim,
        expr,
        linear_direction: spec.linear_direction.clone(),
        computation_box: mv(&spec.computation_box),
        support_box: mv(&spec.support_box),
        name: spec.name.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::bundled;
    use super::*;

    #[test]
    fn spun_unknot_is_rotation_invariant() {
        let u = bundled::unknot();
        let s = spin_spec(&u, 1).unwrap();
        assert_eq!(s.n, 2);
        assert_eq!(s.computation_box[0], [-3.25, 3.25]);
        assert_eq!(s.computation_box[1], [-3.25, 3.25]);
        s.validate().unwrap();
        let tu = Tape::compile(&u.expr, &u.vars()).unwrap();
        let ts = Tape::compile(&s.expr, &s.vars()).unwrap();
        let mut st = Vec::new();
        for (r, th, e) in [(1.75, 0.3, 0.2), (1.1, 2.0, -0.9), (2.5, -1.0, 1.2)] {
            let a = tu.eval(&[r, e], &mut st).unwrap();
            let b = ts.eval(&[r * f64::cos(th), r * f64::sin(th), e], &mut st).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn half_space_violation_has_witness() {
        let t = translate(&bundled::unknot(), &[-0.5]).unwrap();
        match spin_spec(&t, 1) {
            Err(GenFamError::HalfSpace { axis: 1, witness }) => {
                assert!(witness[0] <= 0.5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn translation_moves_boxes() {
        let t = translate(&bundled::unknot(), &[0.3]).unwrap();
        t.validate().unwrap();
        let u = bundled::unknot();
        assert!((t.support_box[0][0] - u.support_box[0][0] - 0.3).abs() < 1e-15);
        let mut st = Vec::new();
        let a: f64 = Tape::compile(&u.expr, &u.vars()).unwrap().eval(&[1.6, 0.4], &mut st).unwrap();
        let b = Tape::compile(&t.expr, &t.vars()).unwrap().eval(&[1.9, 0.4], &mut st).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
