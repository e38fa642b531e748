use num_complex::Complex64;
use serde_json::{json, Value};

use super::text::parse_literal;
use super::LaurentPoly;
use crate::coeff::{q_from_i64, Coeff, Literal, QComplex};
use crate::error::{Error, Result};

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Reads a scalar given as a JSON number, a literal string (`"1/2"`, `"0.5-2i"`) or a `[re, im]` pair.
pub fn literal_from_json(v: &Value) -> Result<Literal> {
    match v {
        Value::Number(num) => {
            let x = num.as_f64().ok_or_else(|| invalid(format!("unrepresentable number {num}")))?;
            // Shortest round-trip decimal text, so 0.1 is read as 1/10 exactly.
            parse_literal(&format!("{x:?}")).map(|mut l| {
                l.approx = Complex64::new(x, 0.0);
                l
            })
        }
        Value::String(s) => parse_literal(s),
        Value::Array(parts) if parts.len() == 2 => {
            let re = literal_from_json(&parts[0])?;
            let im = literal_from_json(&parts[1])?;
            if re.approx.im != 0.0 || im.approx.im != 0.0 {
                return Err(invalid("[re, im] entries must be real"));
            }
            let i = QComplex::new(q_from_i64(0), q_from_i64(1));
            Ok(Literal { exact: re.exact + im.exact * i, approx: Complex64::new(re.approx.re, im.approx.re) })
        }
        other => Err(invalid(format!("expected a number, string or [re, im], got {other}"))),
    }
}

/// JSON rendering of a coefficient: numbers for doubles, strings for exact rationals.
pub fn literal_to_json<C: Coeff>(c: &C) -> (Value, Value) {
    match c.as_exact() {
        Some(q) => (Value::String(q.re.to_string()), Value::String(q.im.to_string())),
        None => {
            let z = c.to_c64();
            (json!(z.re), json!(z.im))
        }
    }
}

pub fn poly_to_json<C: Coeff>(p: &LaurentPoly<C>) -> Value {
    let terms: Vec<Value> = p
        .terms_grlex_desc()
        .into_iter()
        .map(|(e, c)| {
            let (re, im) = literal_to_json(c);
            json!({"exp": e, "re": re, "im": im})
        })
        .collect();
    json!({"nvars": p.nvars(), "terms": terms})
}

pub fn poly_from_json<C: Coeff>(v: &Value) -> Result<LaurentPoly<C>> {
    let nvars = v
        .get("nvars")
        .and_then(Value::as_u64)
        .ok_or_else(|| invalid("polynomial object needs a positive integer \"nvars\""))? as usize;
    if nvars == 0 {
        return Err(invalid("nvars must be positive"));
    }
    let terms =
        v.get("terms").and_then(Value::as_array).ok_or_else(|| invalid("polynomial object needs a \"terms\" array"))?;
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let exp: Vec<i64> = t
            .get("exp")
            .and_then(Value::as_array)
            .ok_or_else(|| invalid("term needs an \"exp\" array"))?
            .iter()
            .map(|e| e.as_i64().ok_or_else(|| invalid("exponents must be integers")))
            .collect::<Result<_>>()?;
        let part = |key: &str| -> Result<Literal> {
            match t.get(key) {
                None => Ok(Literal::from_int(0)),
                Some(x) => literal_from_json(x),
            }
        };
        let (re, im) = (part("re")?, part("im")?);
        let i = QComplex::new(q_from_i64(0), q_from_i64(1));
        let lit = Literal { exact: re.exact + im.exact * i, approx: Complex64::new(re.approx.re, im.approx.re) };
        out.push((exp, C::from_literal(&lit)));
    }
    LaurentPoly::from_terms(nvars, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::q_ratio;
    use crate::laurent::QPoly;

    #[test]
    fn json_round_trip() {
        let p = LaurentPoly::<Complex64>::parse("-x*y^2 + (0.5+2i)*x^-1", 2).unwrap();
        let v = p.to_json();
        assert_eq!(v["nvars"], 2);
        assert_eq!(LaurentPoly::<Complex64>::from_json(&v).unwrap(), p);
        let q = QPoly::parse("1/3*x - 2", 1).unwrap();
        assert_eq!(QPoly::from_json(&q.to_json()).unwrap(), q);
    }

    #[test]
    fn scalars() {
        let l = literal_from_json(&json!(0.1)).unwrap();
        assert_eq!(l.exact.re, q_ratio(1, 10));
        assert_eq!(l.approx.re, 0.1);
        let l = literal_from_json(&json!("1/2")).unwrap();
        assert_eq!(l.exact.re, q_ratio(1, 2));
        let l = literal_from_json(&json!([0.5, "-1"])).unwrap();
        assert_eq!(l.approx, Complex64::new(0.5, -1.0));
        assert!(literal_from_json(&json!({"re": 1})).is_err());
    }
}
