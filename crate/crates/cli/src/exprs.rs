//! Parser for polynomial expressions in the model spec files:
//! sums of terms like `3/2 x1^2 y2 - x2 y1`, with optional `*` between
//! factors. Errors carry line and column positions.

use bfvkit_core::poly::Poly;
use bfvkit_core::scalar::Scalar;
use bfvkit_core::GenId;
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "parse error at {}:{}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(Scalar),
    Name(String),
    Plus,
    Minus,
    Star,
    Caret,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Lexer {
            src,
            pos: 0,
            line,
            col: 1,
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.col,
            message: message.into(),
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += c.len_utf8();
        self.col += 1;
        Some(c)
    }

    fn next_token(&mut self) -> Result<Option<(Token, usize)>, ParseError> {
        while matches!(self.peek_char(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
        let start_col = self.col;
        let Some(c) = self.peek_char() else {
            return Ok(None);
        };
        let tok = match c {
            '+' => {
                self.bump();
                Token::Plus
            }
            '-' => {
                self.bump();
                Token::Minus
            }
            '*' => {
                self.bump();
                Token::Star
            }
            '^' => {
                self.bump();
                Token::Caret
            }
            '0'..='9' => {
                let mut digits = String::new();
                while matches!(self.peek_char(), Some(c) if c.is_ascii_digit()) {
                    digits.push(self.bump().unwrap());
                }
                let num: BigInt = digits.parse().unwrap();
                if self.peek_char() == Some('/') {
                    self.bump();
                    let mut den = String::new();
                    while matches!(self.peek_char(), Some(c) if c.is_ascii_digit()) {
                        den.push(self.bump().unwrap());
                    }
                    if den.is_empty() {
                        return Err(self.error("expected denominator digits after `/`"));
                    }
                    let den: BigInt = den.parse().unwrap();
                    if den.is_zero() {
                        return Err(self.error("zero denominator"));
                    }
                    Token::Number(Scalar::new(num, den))
                } else {
                    Token::Number(Scalar::from_integer(num))
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while matches!(self.peek_char(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    name.push(self.bump().unwrap());
                }
                Token::Name(name)
            }
            other => return Err(self.error(format!("unexpected character `{}`", other))),
        };
        Ok(Some((tok, start_col)))
    }
}

/// Parses one polynomial expression over the x/y variables of `pairs`
/// symplectic pairs. `line` is used in error positions.
pub fn parse_poly(src: &str, pairs: u32, line: usize) -> Result<Poly, ParseError> {
    let nvars = 2 * pairs as usize;
    let mut lex = Lexer::new(src, line);
    let mut tokens: Vec<(Token, usize)> = Vec::new();
    while let Some(t) = lex.next_token()? {
        tokens.push(t);
    }
    if tokens.is_empty() {
        return Err(ParseError {
            line,
            column: 1,
            message: "empty expression".into(),
        });
    }

    let mut out = Poly::zero(nvars);
    let mut i = 0;
    let mut sign;
    let mut first = true;
    while i < tokens.len() {
        // leading sign of the term
        match &tokens[i].0 {
            Token::Plus => {
                sign = Scalar::one();
                i += 1;
            }
            Token::Minus => {
                sign = -Scalar::one();
                i += 1;
            }
            _ if first => {
                sign = Scalar::one();
            }
            _ => {
                return Err(ParseError {
                    line,
                    column: tokens[i].1,
                    message: "expected `+` or `-` between terms".into(),
                });
            }
        }
        first = false;
        // one term: product of numbers and powered names
        let mut coeff = sign.clone();
        let mut exps = vec![0u32; nvars];
        let mut any_factor = false;
        loop {
            match tokens.get(i) {
                Some((Token::Number(c), _)) => {
                    coeff *= c;
                    any_factor = true;
                    i += 1;
                }
                Some((Token::Name(name), col)) => {
                    let var = resolve_var(name, pairs).ok_or_else(|| ParseError {
                        line,
                        column: *col,
                        message: format!("unknown variable `{}` (declared pairs: {})", name, pairs),
                    })?;
                    let mut exp = 1u32;
                    if matches!(tokens.get(i + 1), Some((Token::Caret, _))) {
                        match tokens.get(i + 2) {
                            Some((Token::Number(n), col2)) => {
                                if !n.denom().is_one() {
                                    return Err(ParseError {
                                        line,
                                        column: *col2,
                                        message: "exponent must be a nonnegative integer".into(),
                                    });
                                }
                                exp = u32::try_from(n.numer().clone()).map_err(|_| ParseError {
                                    line,
                                    column: *col2,
                                    message: "exponent out of range".into(),
                                })?;
                                i += 2;
                            }
                            _ => {
                                return Err(ParseError {
                                    line,
                                    column: tokens[i + 1].1,
                                    message: "expected integer exponent after `^`".into(),
                                })
                            }
                        }
                    }
                    exps[var] += exp;
                    any_factor = true;
                    i += 1;
                }
                Some((Token::Star, _)) => {
                    i += 1;
                }
                Some((Token::Plus, _)) | Some((Token::Minus, _)) | None => break,
                Some((Token::Caret, col)) => {
                    return Err(ParseError {
                        line,
                        column: *col,
                        message: "`^` must follow a variable".into(),
                    })
                }
            }
        }
        if !any_factor {
            return Err(ParseError {
                line,
                column: tokens.get(i).map(|t| t.1).unwrap_or(1),
                message: "empty term".into(),
            });
        }
        out.add_term(exps, coeff);
    }
    Ok(out)
}

fn resolve_var(name: &str, pairs: u32) -> Option<usize> {
    match GenId::parse(name)? {
        GenId::X(i) if i < pairs => Some(i as usize),
        GenId::Y(i) if i < pairs => Some(pairs as usize + i as usize),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mu() {
        let p = parse_poly("x1 y2 - x2 y1", 2, 1).unwrap();
        let v = |i: usize| Poly::variable(4, i);
        assert_eq!(p, v(0).mul(&v(3)).sub(&v(1).mul(&v(2))));
        // explicit stars and coefficients
        let q = parse_poly("1 * x1*y2 + -1 x2 * y1", 2, 1);
        assert!(q.is_err(), "unary minus after + is not a term separator");
        let q = parse_poly("1 * x1*y2 - 1 x2 * y1", 2, 1).unwrap();
        assert_eq!(q, p);
    }

    #[test]
    fn parses_powers_and_rationals() {
        let p = parse_poly("3/2 x1^2 y2 + y1", 2, 1).unwrap();
        let v = |i: usize| Poly::variable(4, i);
        let expected = v(0)
            .mul(&v(0))
            .mul(&v(3))
            .scale(&Scalar::new(3.into(), 2.into()))
            .add(&v(2));
        assert_eq!(p, expected);
    }

    #[test]
    fn error_positions() {
        let err = parse_poly("x1 + z9", 2, 7).unwrap_err();
        assert_eq!(err.line, 7);
        assert_eq!(err.column, 6);
        let err = parse_poly("x3", 2, 1).unwrap_err();
        assert!(err.message.contains("x3"));
        let err = parse_poly("x1 ^ y1", 2, 1).unwrap_err();
        assert!(err.message.contains("exponent"));
    }
}
