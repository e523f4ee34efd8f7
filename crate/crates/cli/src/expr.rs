//! Arithmetic expressions in one variable `x`: numbers, `+ - * / ^`,
//! parentheses, `abs(...)` and `exp(...)`, with symbolic differentiation.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
    Exp(Box<Expr>),
    // only produced by differentiation
    Ln(Box<Expr>),
    Sign(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part, e.g. 1e-3
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &s[start..i];
            let v = text.parse::<f64>().map_err(|_| ParseError {
                pos: start,
                msg: format!("bad number '{text}'"),
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Tok::Ident(s[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ParseError {
                pos: i,
                msg: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.len, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    // sum := term (('+' | '-') term)*
    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    // term := unary (('*' | '/') unary)*
    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    // power := atom ('^' unary)?   (right associative, binds tighter than unary minus on the left)
    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.at += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                match name.as_str() {
                    "x" => Ok(Expr::X),
                    "abs" | "exp" => {
                        if !self.eat('(') {
                            return self.err(format!("expected '(' after {name}"));
                        }
                        let inner = Box::new(self.sum()?);
                        if !self.eat(')') {
                            return self.err("expected ')'");
                        }
                        Ok(if name == "abs" {
                            Expr::Abs(inner)
                        } else {
                            Expr::Exp(inner)
                        })
                    }
                    _ => {
                        self.at -= 1;
                        self.err(format!("unknown identifier '{name}'"))
                    }
                }
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let inner = self.sum()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(Tok::Op(c)) => self.err(format!("unexpected '{c}'")),
            None => self.err("unexpected end of expression"),
        }
    }
}

pub fn parse(s: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(s)?;
    let mut p = Parser {
        toks,
        at: 0,
        len: s.len(),
    };
    let e = p.sum()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

fn num(v: f64) -> Expr {
    Expr::Num(v)
}

fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => num(x + y),
        (Expr::Num(z), _) if *z == 0.0 => b,
        (_, Expr::Num(z)) if *z == 0.0 => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => num(x - y),
        (_, Expr::Num(z)) if *z == 0.0 => a,
        (Expr::Num(z), _) if *z == 0.0 => neg(b),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => num(x * y),
        (Expr::Num(z), _) | (_, Expr::Num(z)) if *z == 0.0 => num(0.0),
        (Expr::Num(o), _) if *o == 1.0 => b,
        (_, Expr::Num(o)) if *o == 1.0 => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(z), _) if *z == 0.0 => num(0.0),
        (_, Expr::Num(o)) if *o == 1.0 => a,
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(x) => num(-x),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match &b {
        Expr::Num(z) if *z == 0.0 => num(1.0),
        Expr::Num(o) if *o == 1.0 => a,
        _ => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

impl Expr {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => {
                let base = a.eval(x);
                match **b {
                    Expr::Num(e) if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 => {
                        base.powi(e as i32)
                    }
                    _ => base.powf(b.eval(x)),
                }
            }
            Expr::Abs(a) => a.eval(x).abs(),
            Expr::Exp(a) => a.eval(x).exp(),
            Expr::Ln(a) => a.eval(x).ln(),
            Expr::Sign(a) => {
                let v = a.eval(x);
                if v > 0.0 {
                    1.0
                } else if v < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn is_const(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::X => false,
            Expr::Neg(a) | Expr::Abs(a) | Expr::Exp(a) | Expr::Ln(a) | Expr::Sign(a) => {
                a.is_const()
            }
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.is_const() && b.is_const(),
        }
    }

    /// Derivative with respect to `x`. `abs` is differentiated as
    /// `sign(u) u'`, which is 0 at the kink.
    pub fn derivative(&self) -> Expr {
        if self.is_const() {
            return num(0.0);
        }
        match self {
            Expr::Num(_) => num(0.0),
            Expr::X => num(1.0),
            Expr::Neg(a) => neg(a.derivative()),
            Expr::Add(a, b) => add(a.derivative(), b.derivative()),
            Expr::Sub(a, b) => sub(a.derivative(), b.derivative()),
            Expr::Mul(a, b) => add(
                mul(a.derivative(), (**b).clone()),
                mul((**a).clone(), b.derivative()),
            ),
            Expr::Div(a, b) => div(
                sub(
                    mul(a.derivative(), (**b).clone()),
                    mul((**a).clone(), b.derivative()),
                ),
                pow((**b).clone(), num(2.0)),
            ),
            Expr::Pow(a, b) => {
                if b.is_const() {
                    // d(u^c) = c u^(c-1) u'
                    let c = b.eval(0.0);
                    mul(
                        mul(num(c), pow((**a).clone(), num(c - 1.0))),
                        a.derivative(),
                    )
                } else {
                    // d(u^v) = u^v (v' ln u + v u' / u)
                    mul(
                        self.clone(),
                        add(
                            mul(b.derivative(), Expr::Ln(a.clone())),
                            div(mul((**b).clone(), a.derivative()), (**a).clone()),
                        ),
                    )
                }
            }
            Expr::Abs(a) => mul(Expr::Sign(a.clone()), a.derivative()),
            Expr::Exp(a) => mul(self.clone(), a.derivative()),
            Expr::Ln(a) => div(a.derivative(), (**a).clone()),
            Expr::Sign(_) => num(0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64) -> f64 {
        parse(s).unwrap().eval(x)
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("1+2*3", 0.0), 7.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("-x^2", 3.0), -9.0);
        assert_eq!(ev("x^2/2+x^4/4", 2.0), 6.0);
        assert_eq!(ev("(1+x)*(1-x)", 3.0), -8.0);
        assert_eq!(ev("2^-1", 0.0), 0.5);
        assert_eq!(ev("1e-3*x", 1000.0), 1.0);
        assert_eq!(ev("abs(x)^3", -2.0), 8.0);
        assert!((ev("exp(-x)", 1.0) - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        for bad in ["", "x+", "sin(x)", "(x", "x)", "2 3", "x $ 2", "abs x"] {
            assert!(parse(bad).is_err(), "{bad}");
        }
        assert_eq!(parse("x + y").unwrap_err().pos, 4);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let cases = [
            "x^2/2+x^4/4",
            "exp(-x^2)*x",
            "abs(x)^1.5",
            "1/(1+x^2)",
            "x^x",
            "2^x - 3*x",
            "exp(abs(x))",
        ];
        for s in cases {
            let e = parse(s).unwrap();
            let d = e.derivative();
            let d2 = d.derivative();
            for x in [0.3, 0.7, 1.3, 2.1] {
                let h = 1e-5;
                let fd = (e.eval(x + h) - e.eval(x - h)) / (2.0 * h);
                let fd2 = (d.eval(x + h) - d.eval(x - h)) / (2.0 * h);
                assert!(
                    (d.eval(x) - fd).abs() < 1e-6 * (1.0 + fd.abs()),
                    "{s} at {x}"
                );
                assert!(
                    (d2.eval(x) - fd2).abs() < 1e-5 * (1.0 + fd2.abs()),
                    "{s}'' at {x}"
                );
            }
        }
    }

    #[test]
    fn constant_subtrees_fold() {
        assert_eq!(
            parse("x^2").unwrap().derivative().derivative(),
            Expr::Num(2.0)
        );
        assert_eq!(parse("3*x+exp(2)").unwrap().derivative(), Expr::Num(3.0));
    }

    proptest::proptest! {
        #[test]
        fn polynomial_derivatives(a in -5.0f64..5.0, b in -5.0f64..5.0, c in 0.0f64..5.0, x in -3.0f64..3.0) {
            let src = format!("{a}*x + {b}*x^2 + {c}*x^4");
            let e = parse(&src).unwrap();
            let d = e.derivative();
            let d2 = d.derivative();
            let exact_d = a + 2.0 * b * x + 4.0 * c * x.powi(3);
            let exact_d2 = 2.0 * b + 12.0 * c * x * x;
            proptest::prop_assert!((d.eval(x) - exact_d).abs() < 1e-10 * (1.0 + exact_d.abs()));
            proptest::prop_assert!((d2.eval(x) - exact_d2).abs() < 1e-10 * (1.0 + exact_d2.abs()));
        }
    }
}
