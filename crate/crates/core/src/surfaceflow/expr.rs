//! Arithmetic expressions in the chart variables `s` and `phi`.
//!
//! Grammar: numbers, `s`, `phi`, `pi`, `+ - * /`, unary minus, parentheses, `sin(..)` and
//! `cos(..)`.

use super::SurfaceFlowError;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    S,
    Phi,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, SurfaceFlowError> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(SurfaceFlowError::Parse(format!(
                "unexpected {:?} in {src:?}",
                p.tokens[p.pos]
            )));
        }
        Ok(e)
    }

    pub fn eval(&self, s: f64, phi: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::S => s,
            Expr::Phi => phi,
            Expr::Neg(a) => -a.eval(s, phi),
            Expr::Add(a, b) => a.eval(s, phi) + b.eval(s, phi),
            Expr::Sub(a, b) => a.eval(s, phi) - b.eval(s, phi),
            Expr::Mul(a, b) => a.eval(s, phi) * b.eval(s, phi),
            Expr::Div(a, b) => a.eval(s, phi) / b.eval(s, phi),
            Expr::Sin(a) => a.eval(s, phi).sin(),
            Expr::Cos(a) => a.eval(s, phi).cos(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>, SurfaceFlowError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' | '-' | '*' | '/' => {
                out.push(Token::Op(c));
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // exponent part, e.g. 1e-3
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v = text
                    .parse::<f64>()
                    .map_err(|_| SurfaceFlowError::Parse(format!("bad number {text:?}")))?;
                out.push(Token::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(SurfaceFlowError::Parse(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr, SurfaceFlowError> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, SurfaceFlowError> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SurfaceFlowError> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr, SurfaceFlowError> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "s" => Ok(Expr::S),
                "phi" => Ok(Expr::Phi),
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                "sin" | "cos" => {
                    if self.next() != Some(Token::LParen) {
                        return Err(SurfaceFlowError::Parse(format!("expected '(' after {name}")));
                    }
                    let arg = Box::new(self.expr()?);
                    self.expect_rparen()?;
                    Ok(if name == "sin" { Expr::Sin(arg) } else { Expr::Cos(arg) })
                }
                other => Err(SurfaceFlowError::Parse(format!("unknown identifier {other:?}"))),
            },
            Some(t) => Err(SurfaceFlowError::Parse(format!("unexpected {t:?}"))),
            None => Err(SurfaceFlowError::Parse("unexpected end of expression".into())),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), SurfaceFlowError> {
        match self.next() {
            Some(Token::RParen) => Ok(()),
            _ => Err(SurfaceFlowError::Parse("expected ')'".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_functions() {
        let e = Expr::parse("3+cos(phi)*2 - -s/4").unwrap();
        assert_eq!(e.eval(2.0, 0.0), 3.0 + 2.0 + 0.5);
        let e = Expr::parse("sin(pi/2) * (1 + 1e-1)").unwrap();
        assert!((e.eval(0.0, 0.0) - 1.1).abs() < 1e-15);
        assert_eq!(Expr::parse("2/4/2").unwrap().eval(0.0, 0.0), 0.25);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1+", "sin 2", "foo", "(1", "1)", "2 $ 3", "1..2"] {
            assert!(Expr::parse(bad).is_err(), "{bad}");
        }
    }
}
