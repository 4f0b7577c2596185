//! Text input: ring declarations (`"p=5; vars x,y,z"`, `"q; vars x"`),
//! polynomials (`"x^2 - 2*x*y + y^2"`, `"3x"` with implicit `*`), and
//! matrices of polynomials.

use crate::error::{Error, Result};
use crate::field::BaseField;
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::ring::PolyRing;
use std::sync::Arc;

/// `"q"` is the rationals, `"p=NUM"` the prime field.
pub fn parse_field(s: &str) -> Result<BaseField> {
    let s = s.trim();
    if s == "q" || s == "Q" {
        return Ok(BaseField::Rationals);
    }
    if let Some(rest) = s.strip_prefix("p=").or_else(|| s.strip_prefix("P=")) {
        let p: u64 = rest
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad characteristic `{rest}`")))?;
        return BaseField::prime(p);
    }
    Err(Error::Parse(format!("bad field `{s}`: expected `q` or `p=<prime>`")))
}

/// Full ring declaration: `<field>; vars <name>,<name>,...`.
pub fn parse_ring(s: &str) -> Result<Arc<PolyRing>> {
    let (field_part, vars_part) = s
        .split_once(';')
        .ok_or_else(|| Error::Parse(format!("ring declaration `{s}` is missing `;`")))?;
    let field = parse_field(field_part)?;
    let vars_part = vars_part.trim();
    let list = vars_part
        .strip_prefix("vars")
        .ok_or_else(|| Error::Parse(format!("expected `vars ...` after `;` in `{s}`")))?;
    let vars: Vec<String> = list
        .split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    PolyRing::new(field, vars)
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Caret,
    Number(String),
    Ident(String),
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { chars: src.chars().collect(), pos: 0, src }
    }

    fn peek_tok(&mut self) -> Result<Tok> {
        let save = self.pos;
        let t = self.next_tok()?;
        self.pos = save;
        Ok(t)
    }

    fn next_tok(&mut self) -> Result<Tok> {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.chars.len() {
            return Ok(Tok::End);
        }
        let c = self.chars[self.pos];
        self.pos += 1;
        match c {
            '+' => Ok(Tok::Plus),
            '-' => Ok(Tok::Minus),
            '*' => Ok(Tok::Star),
            '^' => Ok(Tok::Caret),
            _ if c.is_ascii_digit() => {
                let mut s = String::from(c);
                let mut seen_slash = false;
                while self.pos < self.chars.len() {
                    let d = self.chars[self.pos];
                    if d.is_ascii_digit() {
                        s.push(d);
                        self.pos += 1;
                    } else if d == '/' && !seen_slash {
                        // Lookahead: only a fraction if a digit follows.
                        if self.pos + 1 < self.chars.len() && self.chars[self.pos + 1].is_ascii_digit() {
                            seen_slash = true;
                            s.push('/');
                            self.pos += 2;
                            s.push(self.chars[self.pos - 1]);
                        } else {
                            break;
                        }
                    } else {
                        break;
                    }
                }
                Ok(Tok::Number(s))
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::from(c);
                while self.pos < self.chars.len() {
                    let d = self.chars[self.pos];
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                Ok(Tok::Ident(s))
            }
            _ => Err(Error::Parse(format!("unexpected character `{c}` in `{}`", self.src))),
        }
    }
}

/// Parse one polynomial over the given ring.
pub fn parse_poly(ring: &Arc<PolyRing>, src: &str) -> Result<Polynomial> {
    let mut lx = Lexer::new(src);
    let mut terms: Vec<(Monomial, crate::field::Coeff)> = Vec::new();
    let mut first = true;
    loop {
        let mut t = lx.next_tok()?;
        if t == Tok::End {
            if first {
                return Err(Error::Parse(format!("empty polynomial `{src}`")));
            }
            break;
        }
        // Sign handling: leading sign optional, inner sign mandatory.
        let mut negative = false;
        match t {
            Tok::Plus => {
                t = lx.next_tok()?;
            }
            Tok::Minus => {
                negative = true;
                t = lx.next_tok()?;
            }
            _ if first => {}
            _ => {
                return Err(Error::Parse(format!("expected `+` or `-` before a term in `{src}`")));
            }
        }
        first = false;

        // One term: product of number and variable-power factors.
        let mut coeff = ring.field.one();
        let mut exps = vec![0u32; ring.nvars()];
        loop {
            match t {
                Tok::Number(ref n) => {
                    let c = ring.field.parse_scalar(n)?;
                    coeff = ring.field.mul(&coeff, &c);
                }
                Tok::Ident(ref name) => {
                    let idx = ring
                        .var_index(name)
                        .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
                    let mut e = 1u32;
                    if lx.peek_tok()? == Tok::Caret {
                        lx.next_tok()?;
                        match lx.next_tok()? {
                            Tok::Number(n) if !n.contains('/') => {
                                e = n
                                    .parse()
                                    .map_err(|_| Error::Parse(format!("bad exponent `{n}`")))?;
                            }
                            other => {
                                return Err(Error::Parse(format!(
                                    "expected integer exponent after `^`, got {other:?}"
                                )))
                            }
                        }
                    }
                    exps[idx] += e;
                }
                _ => return Err(Error::Parse(format!("unexpected token in term of `{src}`"))),
            }
            // Continue the product? `*` joins explicitly; a number or ident
            // directly after is implicit multiplication.
            match lx.peek_tok()? {
                Tok::Star => {
                    lx.next_tok()?;
                    t = lx.next_tok()?;
                }
                Tok::Number(_) | Tok::Ident(_) => {
                    t = lx.next_tok()?;
                }
                _ => break,
            }
        }
        if negative {
            coeff = ring.field.neg(&coeff);
        }
        let capped: Vec<u16> = exps
            .iter()
            .map(|&e| u16::try_from(e).map_err(|_| Error::Parse(format!("exponent {e} too large"))))
            .collect::<Result<_>>()?;
        terms.push((Monomial::new(capped), coeff));
    }
    Ok(Polynomial::from_terms(ring, terms))
}

/// A rectangular matrix of polynomials from rows of strings. `"0"` entries
/// are allowed and give the zero polynomial.
pub fn parse_matrix(ring: &Arc<PolyRing>, rows: &[Vec<String>]) -> Result<Vec<Vec<Polynomial>>> {
    let width = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        if row.len() != width {
            return Err(Error::ShapeMismatch("ragged matrix rows".into()));
        }
        out.push(row.iter().map(|e| parse_poly(ring, e)).collect::<Result<Vec<_>>>()?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_declarations() {
        let r = parse_ring("p=5; vars x,y,z").unwrap();
        assert_eq!(r.to_string(), "F5[x,y,z]");
        let r2 = parse_ring("q; vars x").unwrap();
        assert_eq!(r2.to_string(), "QQ[x]");
        match parse_ring("p=6; vars x") {
            Err(Error::NonPrime(6)) => {}
            other => panic!("expected NonPrime, got {other:?}"),
        }
        assert!(parse_ring("q; vars x,x").is_err());
        assert!(parse_ring("q; vars").is_err());
    }

    #[test]
    fn poly_forms_agree() {
        let r = parse_ring("q; vars x,y").unwrap();
        let a = parse_poly(&r, "2*x*y").unwrap();
        let b = parse_poly(&r, "2x y").unwrap();
        let c = parse_poly(&r, "2xy");
        assert_eq!(a, b);
        // `xy` is a single unknown identifier, not x*y.
        assert!(matches!(c, Err(Error::UnknownVariable(ref v)) if v == "xy"));
    }

    #[test]
    fn signs_and_constants() {
        let r = parse_ring("q; vars x").unwrap();
        let p = parse_poly(&r, "-x^2 + 3x - 1").unwrap();
        assert_eq!(p.render(), "-x^2 + 3*x - 1");
        let z = parse_poly(&r, "0").unwrap();
        assert!(z.is_zero());
        assert!(parse_poly(&r, "x + + x").is_err());
        assert!(parse_poly(&r, "").is_err());
    }

    #[test]
    fn rational_coefficients() {
        let r = parse_ring("q; vars x").unwrap();
        let p = parse_poly(&r, "1/2 x + 1/2x").unwrap();
        assert_eq!(p, parse_poly(&r, "x").unwrap());
    }

    #[test]
    fn repeated_variable_factors_multiply() {
        let r = parse_ring("q; vars x,y").unwrap();
        let p = parse_poly(&r, "x*x*y^2 - x^2*y*y").unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn matrix_parsing() {
        let r = parse_ring("q; vars x,y").unwrap();
        let m = parse_matrix(
            &r,
            &[vec!["x".into(), "y".into()], vec!["0".into(), "x^2".into()]],
        )
        .unwrap();
        assert_eq!(m.len(), 2);
        assert!(m[1][0].is_zero());
        assert!(parse_matrix(&r, &[vec!["x".into()], vec![]]).is_err());
    }
}
