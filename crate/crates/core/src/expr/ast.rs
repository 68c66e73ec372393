use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Expression tree over named real variables.
///
/// Nodes are shared through `Arc`, so cloning and substitution are cheap.
/// Build trees with the smart constructors ([`Expr::add`], [`Expr::mul`], ...),
/// which fold constants and drop neutral elements.
#[derive(Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Arc<str>),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Pow(Arc<Expr>, i32),
    /// `order`-th derivative of the clamped cubic smoothstep, `order ≤ 3`.
    Smooth(u8, Arc<Expr>),
    Sqrt(Arc<Expr>),
}

pub(crate) const SMOOTH_NAMES: [&str; 4] =
    ["smoothstep", "smoothstep_d1", "smoothstep_d2", "smoothstep_d3"];

/// `order`-th derivative of `S(t) = 3t² − 2t³` on `[0, 1]`, constant outside.
#[inline]
pub fn smoothstep_derivative(order: u8, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    match order {
        0 => t * t * (3.0 - 2.0 * t),
        1 => 6.0 * t * (1.0 - t),
        2 => 6.0 - 12.0 * t,
        3 => -12.0,
        _ => 0.0,
    }
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(Arc::from(name))
    }

    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn one() -> Expr {
        Expr::Const(1.0)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_const(&self, v: f64) -> bool {
        self.as_const() == Some(v)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => match b {
                Expr::Neg(inner) => Expr::Sub(Arc::new(a), inner),
                b => Expr::Add(Arc::new(a), Arc::new(b)),
            },
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            (Some(x), _) if x == 0.0 => Expr::neg(b),
            (_, Some(y)) if y == 0.0 => a,
            _ => match b {
                Expr::Neg(inner) => Expr::Add(Arc::new(a), inner),
                b => Expr::Sub(Arc::new(a), Arc::new(b)),
            },
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            (Some(x), _) if x == 0.0 => Expr::zero(),
            (_, Some(y)) if y == 0.0 => Expr::zero(),
            (Some(x), _) if x == 1.0 => b,
            (_, Some(y)) if y == 1.0 => a,
            (Some(x), _) if x == -1.0 => Expr::neg(b),
            (_, Some(y)) if y == -1.0 => Expr::neg(a),
            _ => Expr::Mul(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), _) if x == 0.0 => Expr::zero(),
            (Some(x), Some(y)) if y != 0.0 => Expr::Const(x / y),
            (_, Some(y)) if y == 1.0 => a,
            _ => Expr::Div(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => (*inner).clone(),
            a => Expr::Neg(Arc::new(a)),
        }
    }

    pub fn pow(a: Expr, k: i32) -> Expr {
        match (k, a.as_const()) {
            (0, _) => Expr::one(),
            (1, _) => a,
            (_, Some(c)) => Expr::Const(c.powi(k)),
            _ => Expr::Pow(Arc::new(a), k),
        }
    }

    pub fn smooth(order: u8, a: Expr) -> Expr {
        if order > 3 {
            return Expr::zero();
        }
        match a.as_const() {
            Some(c) => Expr::Const(smoothstep_derivative(order, c)),
            None => Expr::Smooth(order, Arc::new(a)),
        }
    }

    pub fn smoothstep(a: Expr) -> Expr {
        Expr::smooth(0, a)
    }

    pub fn sqrt(a: Expr) -> Expr {
        match a.as_const() {
            Some(c) if c >= 0.0 => Expr::Const(c.sqrt()),
            _ => Expr::Sqrt(Arc::new(a)),
        }
    }

    /// Sum of a list, `0` when empty.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        terms.into_iter().fold(Expr::zero(), Expr::add)
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(v.to_string());
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Smooth(_, a) | Expr::Sqrt(a) => {
                a.collect_vars(out)
            }
        }
    }

    /// Replaces variables for which `f` returns an expression.
    pub fn substitute(&self, f: &dyn Fn(&str) -> Option<Expr>) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Expr::Add(a, b) => Expr::add(a.substitute(f), b.substitute(f)),
            Expr::Sub(a, b) => Expr::sub(a.substitute(f), b.substitute(f)),
            Expr::Mul(a, b) => Expr::mul(a.substitute(f), b.substitute(f)),
            Expr::Div(a, b) => Expr::div(a.substitute(f), b.substitute(f)),
            Expr::Neg(a) => Expr::neg(a.substitute(f)),
            Expr::Pow(a, k) => Expr::pow(a.substitute(f), *k),
            Expr::Smooth(o, a) => Expr::smooth(*o, a.substitute(f)),
            Expr::Sqrt(a) => Expr::sqrt(a.substitute(f)),
        }
    }

    /// Renames variables through `f`; names mapped to `None` are kept.
    pub fn rename(&self, f: &dyn Fn(&str) -> Option<String>) -> Expr {
        self.substitute(&|v| f(v).map(|n| Expr::var(&n)))
    }

    /// Exact partial derivative with respect to `var`.
    pub fn diff(&self, var: &str) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(v) => {
                if &**v == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Add(a, b) => Expr::add(a.diff(var), b.diff(var)),
            Expr::Sub(a, b) => Expr::sub(a.diff(var), b.diff(var)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.diff(var), (**b).clone()),
                Expr::mul((**a).clone(), b.diff(var)),
            ),
            Expr::Div(a, b) => {
                let da = a.diff(var);
                let db = b.diff(var);
                if db.is_const(0.0) {
                    Expr::div(da, (**b).clone())
                } else {
                    Expr::div(
                        Expr::sub(
                            Expr::mul(da, (**b).clone()),
                            Expr::mul((**a).clone(), db),
                        ),
                        Expr::pow((**b).clone(), 2),
                    )
                }
            }
            Expr::Neg(a) => Expr::neg(a.diff(var)),
            Expr::Pow(a, k) => Expr::mul(
                Expr::mul(Expr::Const(*k as f64), Expr::pow((**a).clone(), k - 1)),
                a.diff(var),
            ),
            Expr::Smooth(o, a) => Expr::mul(Expr::smooth(o + 1, (**a).clone()), a.diff(var)),
            Expr::Sqrt(a) => Expr::div(
                a.diff(var),
                Expr::mul(Expr::Const(2.0), Expr::sqrt((**a).clone())),
            ),
        }
    }

    /// Reference evaluator by direct tree walk. Uses the same conventions as
    /// the compiled tape (`0 · anything = 0`, `0 / anything = 0`).
    pub fn eval_with(&self, lookup: &dyn Fn(&str) -> f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(v) => lookup(v),
            Expr::Add(a, b) => a.eval_with(lookup) + b.eval_with(lookup),
            Expr::Sub(a, b) => a.eval_with(lookup) - b.eval_with(lookup),
            Expr::Mul(a, b) => {
                let x = a.eval_with(lookup);
                let y = b.eval_with(lookup);
                if x == 0.0 || y == 0.0 {
                    0.0
                } else {
                    x * y
                }
            }
            Expr::Div(a, b) => {
                let x = a.eval_with(lookup);
                if x == 0.0 {
                    0.0
                } else {
                    x / b.eval_with(lookup)
                }
            }
            Expr::Neg(a) => -a.eval_with(lookup),
            Expr::Pow(a, k) => a.eval_with(lookup).powi(*k),
            Expr::Smooth(o, a) => smoothstep_derivative(*o, a.eval_with(lookup)),
            Expr::Sqrt(a) => a.eval_with(lookup).sqrt(),
        }
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.size() + b.size()
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Smooth(_, a) | Expr::Sqrt(a) => 1 + a.size(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if *c < 0.0 || c.is_sign_negative() => 3,
            _ => 5,
        }
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c.is_finite() {
        write!(f, "{c:?}")
    } else if c.is_nan() {
        write!(f, "(0.0/0.0)")
    } else if c > 0.0 {
        write!(f, "(1.0/0.0)")
    } else {
        write!(f, "(-1.0/0.0)")
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints in the grammar accepted by [`super::parse`]; printing then parsing
/// gives back an identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write_const(f, *c),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Add(a, b) => {
                write_operand(f, a, 1)?;
                write!(f, " + ")?;
                write_operand(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_operand(f, a, 1)?;
                write!(f, " - ")?;
                write_operand(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_operand(f, a, 2)?;
                write!(f, "*")?;
                write_operand(f, b, 3)
            }
            Expr::Div(a, b) => {
                write_operand(f, a, 2)?;
                write!(f, "/")?;
                write_operand(f, b, 3)
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_operand(f, a, 4)
            }
            Expr::Pow(a, k) => {
                write_operand(f, a, 5)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Expr::Smooth(o, a) => write!(f, "{}({a})", SMOOTH_NAMES[*o as usize]),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        super::parse(&text).map_err(serde::de::Error::custom)
    }
}
