//! Text grammar: `term (('+'|'-') term)*`, `term = factor (['*'] factor)*`,
//! `factor = number ['i'] | 'i' | '(' complex ')' | var ['^' int]`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use super::LaurentPoly;
use crate::coeff::{Coeff, Literal, QComplex};
use crate::error::{Error, Result};

struct RawTerm {
    coef: Literal,
    exps: Vec<(usize, i64)>,
}

struct Parsed {
    terms: Vec<RawTerm>,
    max_var: Option<usize>,
    alias_pos: Option<usize>,
    var_pos: Vec<(usize, usize)>,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    alias_pos: Option<usize>,
    var_pos: Vec<(usize, usize)>,
}

fn mul_lit(a: &Literal, b: &Literal) -> Literal {
    Literal { exact: &a.exact * &b.exact, approx: a.approx * b.approx }
}

fn neg_lit(a: &Literal) -> Literal {
    Literal { exact: -a.exact.clone(), approx: -a.approx }
}

fn add_lit(a: &Literal, b: &Literal) -> Literal {
    Literal { exact: &a.exact + &b.exact, approx: a.approx + b.approx }
}

fn imag_unit() -> Literal {
    Literal { exact: QComplex::new(BigRational::zero(), BigRational::one()), approx: Complex64::new(0.0, 1.0) }
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0, alias_pos: None, var_pos: Vec::new() }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(|c: char| c.is_whitespace()) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn bump(&mut self) {
        self.pos += self.peek_raw().map_or(0, char::len_utf8);
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.peek_raw().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn unsigned_int(&mut self) -> Result<u64> {
        let d = self.digits();
        if d.is_empty() {
            return self.err("expected digits");
        }
        d.parse().or_else(|_| self.err("integer too large"))
    }

    /// Unsigned decimal or fraction literal, optionally followed by `i`.
    fn number(&mut self) -> Result<Literal> {
        let start = self.pos;
        let int_part = self.digits();
        let mut frac_part = "";
        if self.peek_raw() == Some('.') {
            self.pos += 1;
            frac_part = self.digits();
        }
        if int_part.is_empty() && frac_part.is_empty() {
            self.pos = start;
            return self.err("expected a number");
        }
        let mut exp10: i64 = 0;
        if matches!(self.peek_raw(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            let neg = match self.peek_raw() {
                Some('-') => {
                    self.pos += 1;
                    true
                }
                Some('+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let d = self.digits();
            if d.is_empty() {
                self.pos = save;
            } else {
                let v: i64 = d.parse().or_else(|_| self.err("exponent too large"))?;
                if v > 400 {
                    return self.err("exponent too large");
                }
                exp10 = if neg { -v } else { v };
            }
        }
        let decimal_text = &self.src[start..self.pos];
        let approx_num: f64 = decimal_text.parse().or_else(|_| self.err("malformed number"))?;
        let mantissa: BigInt = format!("{int_part}{frac_part}").parse().expect("digit string");
        let shift = exp10 - frac_part.len() as i64;
        let ten = BigInt::from(10u8);
        let mut exact = if shift >= 0 {
            BigRational::from_integer(mantissa * Pow::pow(&ten, shift as u64))
        } else {
            BigRational::new(mantissa, Pow::pow(&ten, (-shift) as u64))
        };
        let mut approx = approx_num;
        if self.peek_raw() == Some('/') {
            self.pos += 1;
            let den = self.unsigned_int()?;
            if den == 0 {
                return self.err("zero denominator");
            }
            exact /= BigRational::from_integer(den.into());
            approx /= den as f64;
        }
        let lit = Literal { exact: QComplex::new(exact, BigRational::zero()), approx: Complex64::new(approx, 0.0) };
        if self.peek_raw() == Some('i') {
            self.pos += 1;
            return Ok(mul_lit(&lit, &imag_unit()));
        }
        Ok(lit)
    }

    /// `[sign] part (sign part)*` where `part = number ['i'] | 'i'`.
    fn complex_body(&mut self) -> Result<Literal> {
        let mut total = Literal::from_int(0);
        let mut first = true;
        loop {
            let neg = match self.peek() {
                Some('+') => {
                    self.bump();
                    false
                }
                Some('-') => {
                    self.bump();
                    true
                }
                Some(_) if first => false,
                _ => break,
            };
            let part = match self.peek() {
                Some('i') => {
                    self.bump();
                    imag_unit()
                }
                Some(c) if c.is_ascii_digit() || c == '.' => self.number()?,
                _ => return self.err("expected a number inside parentheses"),
            };
            total = add_lit(&total, &if neg { neg_lit(&part) } else { part });
            first = false;
        }
        Ok(total)
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.peek() == Some('(');
        if paren {
            self.bump();
        }
        let neg = match self.peek() {
            Some('-') => {
                self.bump();
                true
            }
            Some('+') => {
                self.bump();
                false
            }
            _ => false,
        };
        self.skip_ws();
        let v = self.unsigned_int()? as i64;
        if paren {
            if self.peek() != Some(')') {
                return self.err("expected ')'");
            }
            self.bump();
        }
        Ok(if neg { -v } else { v })
    }

    fn variable(&mut self) -> Result<usize> {
        let start = self.pos;
        let c = self.peek_raw().expect("caller checked");
        self.bump();
        let index = match c {
            'x' => {
                let d = self.digits();
                if d.is_empty() {
                    self.alias_pos.get_or_insert(start);
                    0
                } else {
                    let k: usize = d.parse().or_else(|_| self.err("variable index too large"))?;
                    if k == 0 {
                        self.pos = start;
                        return self.err("variables are numbered from x1");
                    }
                    k - 1
                }
            }
            'y' => {
                self.alias_pos.get_or_insert(start);
                1
            }
            _ => {
                self.alias_pos.get_or_insert(start);
                2
            }
        };
        self.var_pos.push((index, start));
        Ok(index)
    }

    fn starts_factor(c: char) -> bool {
        c.is_ascii_digit() || matches!(c, '.' | '(' | 'i' | 'x' | 'y' | 'z')
    }

    fn term(&mut self) -> Result<RawTerm> {
        let mut coef = Literal::from_int(1);
        let mut exps = Vec::new();
        let mut expect_factor = true;
        loop {
            match self.peek() {
                Some(c) if Self::starts_factor(c) => {}
                _ if expect_factor => return self.err("expected a coefficient or variable"),
                _ => break,
            }
            match self.peek().expect("checked") {
                '(' => {
                    self.bump();
                    let lit = self.complex_body()?;
                    if self.peek() != Some(')') {
                        return self.err("expected ')'");
                    }
                    self.bump();
                    coef = mul_lit(&coef, &lit);
                }
                'i' => {
                    self.bump();
                    coef = mul_lit(&coef, &imag_unit());
                }
                'x' | 'y' | 'z' => {
                    let v = self.variable()?;
                    let e = if self.peek() == Some('^') {
                        self.bump();
                        self.exponent()?
                    } else {
                        1
                    };
                    exps.push((v, e));
                }
                _ => {
                    let lit = self.number()?;
                    coef = mul_lit(&coef, &lit);
                }
            }
            expect_factor = false;
            if self.peek() == Some('*') {
                self.bump();
                expect_factor = true;
            }
        }
        Ok(RawTerm { coef, exps })
    }

    fn poly(mut self) -> Result<Parsed> {
        if self.peek().is_none() {
            return self.err("empty polynomial");
        }
        let mut terms = Vec::new();
        let mut neg = match self.peek() {
            Some('-') => {
                self.bump();
                true
            }
            Some('+') => {
                self.bump();
                false
            }
            _ => false,
        };
        loop {
            let mut t = self.term()?;
            if neg {
                t.coef = neg_lit(&t.coef);
            }
            terms.push(t);
            neg = match self.peek() {
                None => break,
                Some('+') => false,
                Some('-') => true,
                Some(c) => return self.err(format!("unexpected character '{c}'")),
            };
            self.bump();
        }
        let max_var = terms.iter().flat_map(|t| t.exps.iter().map(|(v, _)| *v)).max();
        Ok(Parsed { terms, max_var, alias_pos: self.alias_pos, var_pos: self.var_pos })
    }
}

/// Parses the grammar above into a polynomial in `nvars` variables.
pub fn parse<C: Coeff>(text: &str, nvars: usize) -> Result<LaurentPoly<C>> {
    let parsed = Cursor::new(text).poly()?;
    if nvars > 3 {
        if let Some(pos) = parsed.alias_pos {
            return Err(Error::Parse { pos, message: "aliases x, y, z need at most 3 variables".into() });
        }
    }
    if let Some(&(index, pos)) = parsed.var_pos.iter().find(|(v, _)| *v >= nvars) {
        return Err(Error::Parse {
            pos,
            message: format!("variable x{} exceeds the {nvars} declared variables", index + 1),
        });
    }
    let terms = parsed.terms.iter().map(|t| {
        let mut e = vec![0i64; nvars];
        for &(v, k) in &t.exps {
            e[v] += k;
        }
        (e, C::from_literal(&t.coef))
    });
    LaurentPoly::from_terms(nvars, terms)
}

/// Smallest variable count accommodating every variable named in `texts` (at least 1).
pub fn infer_nvars<S: AsRef<str>>(texts: &[S]) -> Result<usize> {
    let mut n = 1;
    for t in texts {
        if let Some(v) = Cursor::new(t.as_ref()).poly()?.max_var {
            n = n.max(v + 1);
        }
    }
    Ok(n)
}

/// Parses a single (possibly signed, possibly complex) numeric literal.
pub fn parse_literal(text: &str) -> Result<Literal> {
    let mut cur = Cursor::new(text);
    let lit = cur.complex_body()?;
    if let Some(c) = cur.peek() {
        return cur.err(format!("unexpected character '{c}'"));
    }
    Ok(lit)
}

fn var_name(nvars: usize, i: usize) -> String {
    if nvars <= 3 {
        ["x", "y", "z"][i].to_string()
    } else {
        format!("x{}", i + 1)
    }
}

pub fn format<C: Coeff>(p: &LaurentPoly<C>) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (exp, c)) in p.terms_grlex_desc().into_iter().enumerate() {
        let mono: Vec<String> = exp
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(i, &a)| match a {
                1 => var_name(p.nvars(), i),
                _ => format!("{}^{a}", var_name(p.nvars(), i)),
            })
            .collect();
        let mono = mono.join("*");
        let term = if mono.is_empty() {
            c.render()
        } else if *c == C::one() {
            mono
        } else if *c == -C::one() {
            format!("-{mono}")
        } else {
            format!("{}*{mono}", c.render())
        };
        match (k, term.strip_prefix('-')) {
            (0, _) => out.push_str(&term),
            (_, Some(rest)) => {
                out.push_str(" - ");
                out.push_str(rest);
            }
            (_, None) => {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::q_ratio;
    use crate::laurent::QPoly;

    type P = LaurentPoly<Complex64>;

    const HEXAGON_CURVE: &str = "-x*y^2 + 2*x*y^3 + 3*x^2*y - x^2*y^3 - 2*x^3*y + 3*x^3*y^2";

    #[test]
    fn two_terms() {
        let p = P::parse("-x*y^2 + 2*x*y^3", 2).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.coeff(&[1, 2]), Some(&Complex64::new(-1.0, 0.0)));
        assert_eq!(p.coeff(&[1, 3]), Some(&Complex64::new(2.0, 0.0)));
    }

    #[test]
    fn negative_exponent() {
        let p = P::parse("x^-1", 1).unwrap();
        assert_eq!(p, P::monomial(vec![-1], Complex64::new(1.0, 0.0)));
        assert_eq!(P::parse("x^(-2)*y", 2).unwrap().coeff(&[-2, 1]), Some(&Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn hexagon_curve_round_trip_reorders() {
        let p = P::parse(HEXAGON_CURVE, 2).unwrap();
        let text = p.format();
        assert_eq!(text, "3*x^3*y^2 - x^2*y^3 - 2*x^3*y + 2*x*y^3 + 3*x^2*y - x*y^2");
        assert_eq!(P::parse(&text, 2).unwrap(), p);
        assert_eq!(P::parse(&text, 2).unwrap().format(), text);
    }

    #[test]
    fn coefficients_of_every_kind() {
        let p = QPoly::parse("1/2*x + 0.25*y - (1-2i)*z + 3i + 2.5e-1", 3).unwrap();
        assert_eq!(p.coeff(&[1, 0, 0]).unwrap().re, q_ratio(1, 2));
        assert_eq!(p.coeff(&[0, 1, 0]).unwrap().re, q_ratio(1, 4));
        let z = p.coeff(&[0, 0, 1]).unwrap();
        assert_eq!((z.re.clone(), z.im.clone()), (q_ratio(-1, 1), q_ratio(2, 1)));
        let k = p.coeff(&[0, 0, 0]).unwrap();
        assert_eq!((k.re.clone(), k.im.clone()), (q_ratio(1, 4), q_ratio(3, 1)));
        assert_eq!(P::parse(&p.format(), 3).unwrap(), p.to_c64());
    }

    #[test]
    fn indexed_variables() {
        let p = P::parse("x1*x4^2 - 3*x2", 4).unwrap();
        assert_eq!(p.format(), "x1*x4^2 - 3*x2");
        assert!(matches!(P::parse("x*y", 4), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(P::parse("x5", 4), Err(Error::Parse { .. })));
        assert_eq!(infer_nvars(&["x1*x4", "x2"]).unwrap(), 4);
        assert_eq!(infer_nvars(&["3"]).unwrap(), 1);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(
            P::parse("x + * y", 2),
            Err(Error::Parse { pos: 4, message: "expected a coefficient or variable".into() })
        );
        assert!(matches!(P::parse("", 1), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(P::parse("x ^", 1), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(P::parse("x # 1", 1), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(P::parse("1/0", 1), Err(Error::Parse { .. })));
    }

    #[test]
    fn float_literals_round_trip_to_the_same_double() {
        let p = P::parse("0.1*x + 1e-7", 1).unwrap();
        assert_eq!(p.coeff(&[1]).unwrap().re, 0.1);
        assert_eq!(p.coeff(&[0]).unwrap().re, 1e-7);
        assert_eq!(P::parse(&p.format(), 1).unwrap(), p);
    }

    #[test]
    fn literals() {
        let l = parse_literal("-1/2+3i").unwrap();
        assert_eq!(l.approx, Complex64::new(-0.5, 3.0));
        assert!(parse_literal("1/2 x").is_err());
    }
}
