//! Tiny symbolic expressions used only to render provenance strings
//! (rate-constant formulas, matrix entries, inequality left-hand sides).

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::linalg::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Num(Q),
    Sym(String),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
}

impl Expr {
    pub fn sym(s: &str) -> Expr {
        Expr::Sym(s.to_string())
    }

    pub fn num(v: Q) -> Expr {
        Expr::Num(v)
    }

    pub fn zero() -> Expr {
        Expr::Num(Q::zero())
    }

    pub fn one() -> Expr {
        Expr::Num(Q::one())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(v) if v.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Num(v) if v.is_one())
    }

    pub fn add(self, other: Expr) -> Expr {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let mut terms = Vec::new();
        for e in [self, other] {
            match e {
                Expr::Add(ts) => terms.extend(ts),
                e => terms.push(e),
            }
        }
        Expr::Add(terms)
    }

    pub fn sum(items: impl IntoIterator<Item = Expr>) -> Expr {
        items.into_iter().fold(Expr::zero(), Expr::add)
    }

    pub fn sub(self, other: Expr) -> Expr {
        self.add(other.neg())
    }

    pub fn mul(self, other: Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if self.is_one() {
            return other;
        }
        if other.is_one() {
            return self;
        }
        if let (Expr::Num(a), Expr::Num(b)) = (&self, &other) {
            return Expr::Num(a * b);
        }
        match (self, other) {
            (Expr::Neg(a), b) => a.mul(b).neg(),
            (a, Expr::Neg(b)) => a.mul(*b).neg(),
            (a, b) => {
                let mut fs = Vec::new();
                for e in [a, b] {
                    match e {
                        Expr::Mul(f) => fs.extend(f),
                        e => fs.push(e),
                    }
                }
                Expr::Mul(fs)
            }
        }
    }

    pub fn product(items: impl IntoIterator<Item = Expr>) -> Expr {
        items.into_iter().fold(Expr::one(), Expr::mul)
    }

    pub fn div(self, other: Expr) -> Expr {
        if other.is_one() || self.is_zero() {
            return self;
        }
        if let (Expr::Num(a), Expr::Num(b)) = (&self, &other) {
            if !b.is_zero() {
                return Expr::Num(a / b);
            }
        }
        match self {
            Expr::Neg(a) => a.div(other).neg(),
            Expr::Div(a, b) => a.div(b.mul(other)),
            s => Expr::Div(Box::new(s), Box::new(other)),
        }
    }

    pub fn neg(self) -> Expr {
        match self {
            Expr::Num(v) => Expr::Num(-v),
            Expr::Neg(e) => *e,
            e => Expr::Neg(Box::new(e)),
        }
    }

    /// Numeric value with symbols resolved by `env`.
    pub fn eval(&self, env: &dyn Fn(&str) -> Option<Q>) -> Option<Q> {
        Some(match self {
            Expr::Num(v) => v.clone(),
            Expr::Sym(s) => env(s)?,
            Expr::Add(ts) => {
                let mut acc = Q::zero();
                for t in ts {
                    acc += t.eval(env)?;
                }
                acc
            }
            Expr::Mul(fs) => {
                let mut acc = Q::one();
                for f in fs {
                    acc *= f.eval(env)?;
                }
                acc
            }
            Expr::Div(a, b) => {
                let d = b.eval(env)?;
                if d.is_zero() {
                    return None;
                }
                a.eval(env)? / d
            }
            Expr::Neg(e) => -e.eval(env)?,
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(_) => 1,
            Expr::Neg(_) => 2,
            Expr::Num(v) if v.is_negative() || !v.is_integer() => 2,
            Expr::Mul(_) | Expr::Div(..) => 3,
            _ => 4,
        }
    }

    fn fmt_wrapped(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Add(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    let (neg, body) = match t {
                        Expr::Neg(e) => (true, e.as_ref()),
                        Expr::Num(v) if v.is_negative() => {
                            if i == 0 {
                                write!(f, "-{}", -v)?;
                            } else {
                                write!(f, " - {}", -v)?;
                            }
                            continue;
                        }
                        e => (false, e),
                    };
                    match (i, neg) {
                        (0, true) => write!(f, "-")?,
                        (0, false) => {}
                        (_, true) => write!(f, " - ")?,
                        (_, false) => write!(f, " + ")?,
                    }
                    body.fmt_wrapped(f, 2)?;
                }
                Ok(())
            }
            Expr::Mul(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    x.fmt_wrapped(f, 3)?;
                }
                Ok(())
            }
            Expr::Div(a, b) => {
                a.fmt_wrapped(f, 3)?;
                write!(f, "/")?;
                b.fmt_wrapped(f, 4)
            }
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.fmt_wrapped(f, 3)
            }
        }
    }
}
