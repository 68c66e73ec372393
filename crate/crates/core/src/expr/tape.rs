use crate::Scalar;

use super::ast::Expr;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("square root of negative value {value} at {location:?}")]
    NegativeSqrt { value: f64, location: Vec<f64> },
    #[error("non-finite value {value} at {location:?}")]
    NonFinite { value: f64, location: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Op {
    Const(f64),
    Var(usize),
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Pow(i32),
    Smooth(u8),
    Sqrt,
}

/// Postfix program for one expression with variables bound to positions.
#[derive(Clone, Debug, PartialEq)]
pub struct Tape {
    ops: Vec<Op>,
    n_vars: usize,
    max_stack: usize,
}

impl Tape {
    /// Compiles `expr`; variable `vars[i]` reads slot `i` of the input.
    pub fn compile(expr: &Expr, vars: &[String]) -> Result<Tape, EvalError> {
        let mut ops = Vec::new();
        emit(expr, vars, &mut ops)?;
        let mut depth = 0usize;
        let mut max_stack = 0usize;
        for op in &ops {
            match op {
                Op::Const(_) | Op::Var(_) => depth += 1,
                Op::Add | Op::Sub | Op::Mul | Op::Div => depth -= 1,
                _ => {}
            }
            max_stack = max_stack.max(depth);
        }
        Ok(Tape {
            ops,
            n_vars: vars.len(),
            max_stack,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Evaluates at `x`, reusing `stack` as scratch. Products with a zero
    /// factor are zero and quotients with a zero numerator are zero, whatever
    /// the other operand is.
    pub fn eval<F: Scalar>(&self, x: &[F], stack: &mut Vec<F>) -> Result<F, EvalError> {
        debug_assert_eq!(x.len(), self.n_vars);
        stack.clear();
        stack.reserve(self.max_stack);
        for op in &self.ops {
            match *op {
                Op::Const(c) => stack.push(F::lit(c)),
                Op::Var(i) => stack.push(x[i]),
                Op::Neg => {
                    let a = stack.last_mut().unwrap();
                    *a = -*a;
                }
                Op::Pow(k) => {
                    let a = stack.last_mut().unwrap();
                    *a = a.powi(k);
                }
                Op::Smooth(o) => {
                    let a = stack.last_mut().unwrap();
                    *a = smooth(o, *a);
                }
                Op::Sqrt => {
                    let a = stack.last_mut().unwrap();
                    if *a < F::zero() {
                        return Err(EvalError::NegativeSqrt {
                            value: a.to_f64_lossy(),
                            location: x.iter().map(|v| v.to_f64_lossy()).collect(),
                        });
                    }
                    *a = a.sqrt();
                }
                bin => {
                    let b = stack.pop().unwrap();
                    let a = stack.last_mut().unwrap();
                    *a = match bin {
                        Op::Add => *a + b,
                        Op::Sub => *a - b,
                        Op::Mul => {
                            if a.is_zero() || b.is_zero() {
                                F::zero()
                            } else {
                                *a * b
                            }
                        }
                        Op::Div => {
                            if a.is_zero() {
                                F::zero()
                            } else {
                                *a / b
                            }
                        }
                        _ => unreachable!(),
                    };
                }
            }
        }
        Ok(stack[0])
    }

    /// Like [`Tape::eval`] but also rejects non-finite results.
    pub fn eval_finite<F: Scalar>(&self, x: &[F], stack: &mut Vec<F>) -> Result<F, EvalError> {
        let v = self.eval(x, stack)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite {
                value: v.to_f64_lossy(),
                location: x.iter().map(|v| v.to_f64_lossy()).collect(),
            })
        }
    }
}

#[inline]
fn smooth<F: Scalar>(order: u8, t: F) -> F {
    let zero = F::zero();
    let one = F::one();
    if t <= zero {
        return zero;
    }
    if t >= one {
        return if order == 0 { one } else { zero };
    }
    let two = F::lit(2.0);
    let three = F::lit(3.0);
    let six = F::lit(6.0);
    match order {
        0 => t * t * (three - two * t),
        1 => six * t * (one - t),
        2 => six - F::lit(12.0) * t,
        3 => F::lit(-12.0),
        _ => zero,
    }
}

fn emit(e: &Expr, vars: &[String], ops: &mut Vec<Op>) -> Result<(), EvalError> {
    match e {
        Expr::Const(c) => ops.push(Op::Const(*c)),
        Expr::Var(v) => {
            let i = vars
                .iter()
                .position(|n| n.as_str() == &**v)
                .ok_or_else(|| EvalError::UnknownVariable(v.to_string()))?;
            ops.push(Op::Var(i));
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            emit(a, vars, ops)?;
            emit(b, vars, ops)?;
            ops.push(match e {
                Expr::Add(..) => Op::Add,
                Expr::Sub(..) => Op::Sub,
                Expr::Mul(..) => Op::Mul,
                _ => Op::Div,
            });
        }
        Expr::Neg(a) => {
            emit(a, vars, ops)?;
            ops.push(Op::Neg);
        }
        Expr::Pow(a, k) => {
            emit(a, vars, ops)?;
            ops.push(Op::Pow(*k));
        }
        Expr::Smooth(o, a) => {
            emit(a, vars, ops)?;
            ops.push(Op::Smooth(*o));
        }
        Expr::Sqrt(a) => {
            emit(a, vars, ops)?;
            ops.push(Op::Sqrt);
        }
    }
    Ok(())
}

/// Value, gradient and Hessian tapes of one expression.
#[derive(Clone, Debug)]
pub struct Derivatives {
    pub value: Tape,
    pub gradient: Vec<Tape>,
    /// Upper triangle, row-major: `(0,0), (0,1), …, (1,1), …`.
    pub hessian: Vec<Tape>,
    pub dim: usize,
}

impl Derivatives {
    pub fn new(expr: &Expr, vars: &[String]) -> Result<Self, EvalError> {
        let dim = vars.len();
        let value = Tape::compile(expr, vars)?;
        let grads: Vec<Expr> = vars.iter().map(|v| expr.diff(v)).collect();
        let gradient = grads
            .iter()
            .map(|g| Tape::compile(g, vars))
            .collect::<Result<Vec<_>, _>>()?;
        let mut hessian = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for v in &vars[i..] {
                hessian.push(Tape::compile(&grads[i].diff(v), vars)?);
            }
        }
        Ok(Self {
            value,
            gradient,
            hessian,
            dim,
        })
    }

    pub fn gradient_at<F: Scalar>(&self, x: &[F], stack: &mut Vec<F>) -> Result<Vec<F>, EvalError> {
        self.gradient.iter().map(|t| t.eval(x, stack)).collect()
    }

    /// Full symmetric Hessian, row-major `dim × dim`.
    pub fn hessian_at<F: Scalar>(&self, x: &[F], stack: &mut Vec<F>) -> Result<Vec<F>, EvalError> {
        let d = self.dim;
        let mut h = vec![F::zero(); d * d];
        let mut k = 0;
        for i in 0..d {
            for j in i..d {
                let v = self.hessian[k].eval(x, stack)?;
                h[i * d + j] = v;
                h[j * d + i] = v;
                k += 1;
            }
        }
        Ok(h)
    }
}
