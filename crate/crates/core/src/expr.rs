//! Closed-form expressions in the sequence index `n`.
//!
//! Degenerating families and rescaling sequences are described by one
//! expression per coefficient so that arbitrarily large `n` can be sampled.
//! The JSON encoding is compact:
//!
//! * a number `3.5` or a pair `[re, im]` is a constant,
//! * the string `"n"` is the variable,
//! * `{"+": [..]}`, `{"*": [..]}` are n-ary sums and products,
//! * `{"-": [a]}` negates, `{"-": [a, b]}` subtracts, `{"/": [a, b]}` divides.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;
use serde_json::{json, Value};
use thiserror::Error;

use crate::scalar::{cplx, creal, Real};

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("malformed expression: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64, f64),
    Var,
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Neg(Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn real(x: f64) -> Self {
        Expr::Const(x, 0.0)
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Expr::Const(re, im)
    }

    pub fn n() -> Self {
        Expr::Var
    }

    pub fn zero() -> Self {
        Expr::real(0.0)
    }

    pub fn one() -> Self {
        Expr::real(1.0)
    }

    /// `self^k` expanded as a product.
    pub fn powi(&self, k: u32) -> Self {
        match k {
            0 => Expr::one(),
            1 => self.clone(),
            _ => Expr::Product(vec![self.clone(); k as usize]),
        }
    }

    pub fn eval<T: Real>(&self, n: T) -> Complex<T> {
        match self {
            Expr::Const(re, im) => cplx(*re, *im),
            Expr::Var => creal(n),
            Expr::Sum(args) => args.iter().fold(cplx(0.0, 0.0), |acc, e| acc + e.eval(n)),
            Expr::Product(args) => args.iter().fold(cplx(1.0, 0.0), |acc, e| acc * e.eval(n)),
            Expr::Neg(a) => -a.eval(n),
            Expr::Sub(a, b) => a.eval(n) - b.eval(n),
            Expr::Div(a, b) => a.eval(n) / b.eval(n),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Expr::Const(re, 0.0) => json!(re),
            Expr::Const(re, im) => json!([re, im]),
            Expr::Var => json!("n"),
            Expr::Sum(args) => json!({ "+": args.iter().map(Expr::to_json).collect::<Vec<_>>() }),
            Expr::Product(args) => {
                json!({ "*": args.iter().map(Expr::to_json).collect::<Vec<_>>() })
            }
            Expr::Neg(a) => json!({ "-": [a.to_json()] }),
            Expr::Sub(a, b) => json!({ "-": [a.to_json(), b.to_json()] }),
            Expr::Div(a, b) => json!({ "/": [a.to_json(), b.to_json()] }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, ExprError> {
        match v {
            Value::Number(x) => Ok(Expr::real(
                x.as_f64().ok_or_else(|| ExprError::Malformed(v.to_string()))?,
            )),
            Value::String(s) if s == "n" => Ok(Expr::Var),
            Value::Array(pair) if pair.len() == 2 && pair.iter().all(Value::is_number) => {
                Ok(Expr::Const(pair[0].as_f64().unwrap(), pair[1].as_f64().unwrap()))
            }
            Value::Object(map) if map.len() == 1 => {
                let (op, args) = map.iter().next().unwrap();
                let args = args
                    .as_array()
                    .ok_or_else(|| ExprError::Malformed(format!("operands of {op} must be a list")))?
                    .iter()
                    .map(Expr::from_json)
                    .collect::<Result<Vec<_>, _>>()?;
                match (op.as_str(), args.len()) {
                    ("+", k) if k >= 1 => Ok(Expr::Sum(args)),
                    ("*", k) if k >= 1 => Ok(Expr::Product(args)),
                    ("-", 1) => Ok(Expr::Neg(Box::new(args.into_iter().next().unwrap()))),
                    ("-", 2) | ("/", 2) => {
                        let mut it = args.into_iter();
                        let a = Box::new(it.next().unwrap());
                        let b = Box::new(it.next().unwrap());
                        Ok(if op == "-" { Expr::Sub(a, b) } else { Expr::Div(a, b) })
                    }
                    _ => Err(ExprError::Malformed(format!("bad arity for operator {op}"))),
                }
            }
            _ => Err(ExprError::Malformed(v.to_string())),
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Product(vec![self, rhs])
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}
