//! Problem files: the integrand plus optional cycles, cocycles, forms, operators and settings.

use euler_core::critical::TrackerSettings;
use euler_core::gkz::CayleyConfig;
use euler_core::laurent::{infer_nvars, literal_from_json};
use euler_core::polytope::LatticePointSet;
use euler_core::relations::{poly_from_value, AnnOperator, LogForm, Relation};
use euler_core::twisted::{principal_branch, Cocycle, IntegrationSettings, TwistedCycle};
use euler_core::{Coeff, Error, IntegrandSpec, QComplex, QPoly, Result};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

/// Optional tuning block `"settings"`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub tracker: TrackerSettings,
    pub integration: IntegrationSettings,
    /// Relative singular-value threshold of the numerical kernel.
    pub nullspace_tol: Option<f64>,
    /// Largest accepted `|Σ C·I| / max|I|` for a relation on a cycle.
    pub residual_tol: Option<f64>,
    /// Independent `(s, ν)` draws that must agree in `chi`.
    pub draws: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Problem {
    raw: Value,
    pub nvars: Option<usize>,
    pub settings: Settings,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn scalars(v: &Value, what: &str) -> Result<Vec<QComplex>> {
    v.as_array()
        .ok_or_else(|| invalid(format!("\"{what}\" must be an array")))?
        .iter()
        .map(|x| literal_from_json(x).map(|l| l.exact))
        .collect()
}

fn point(v: Option<&Value>, what: &str) -> Result<Complex64> {
    let v = v.ok_or_else(|| invalid(format!("cycle needs \"{what}\"")))?;
    Ok(literal_from_json(v)?.approx)
}

impl Problem {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: Value = serde_json::from_str(text).map_err(|e| invalid(format!("malformed JSON: {e}")))?;
        if !raw.is_object() {
            return Err(invalid("a problem file is a JSON object"));
        }
        let nvars = match raw.get("nvars") {
            None => None,
            Some(v) => {
                Some(v.as_u64().filter(|&n| n > 0).ok_or_else(|| invalid("\"nvars\" must be a positive integer"))?
                    as usize)
            }
        };
        let settings = match raw.get("settings") {
            None => Settings::default(),
            Some(v) => Settings::deserialize(v).map_err(|e| invalid(format!("settings: {e}")))?,
        };
        Ok(Problem { raw, nvars, settings })
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.raw.get(key).filter(|v| !v.is_null())
    }

    fn items(&self, key: &str) -> Result<&[Value]> {
        match self.get(key) {
            None => Ok(&[]),
            Some(v) => v.as_array().map(Vec::as_slice).ok_or_else(|| invalid(format!("\"{key}\" must be an array"))),
        }
    }

    fn resolve_nvars(&self, f: &[Value]) -> Result<usize> {
        if let Some(n) = self.nvars {
            return Ok(n);
        }
        if let Some(n) = f.iter().find_map(|p| p.get("nvars").and_then(Value::as_u64)) {
            return Ok(n as usize);
        }
        let texts: Vec<&str> = f.iter().filter_map(Value::as_str).collect();
        infer_nvars(&texts)
    }

    /// The integrand; missing `s` or `ν` are zero unless `require_params`.
    pub fn spec(&self, require_params: bool) -> Result<IntegrandSpec<QComplex>> {
        let f = self.items("f")?;
        if f.is_empty() {
            return Err(invalid("\"f\" must list at least one polynomial"));
        }
        let n = self.resolve_nvars(f)?;
        let polys: Vec<QPoly> = f.iter().map(|p| poly_from_value(p, n)).collect::<Result<_>>()?;
        let params = |key: &str, len: usize| -> Result<Vec<QComplex>> {
            match self.get(key) {
                Some(v) => scalars(v, key),
                None if require_params => Err(invalid(format!("\"{key}\" is required for this command"))),
                None => Ok(vec![QComplex::from_int(0); len]),
            }
        };
        let s = params("s", polys.len())?;
        let nu = params("nu", n)?;
        IntegrandSpec::new(polys, s, nu)
    }

    pub fn points(&self) -> Result<Option<LatticePointSet>> {
        self.get("points")
            .map(|v| LatticePointSet::deserialize(v).map_err(|e| invalid(format!("points: {e}"))))
            .transpose()
    }

    /// `"matrix": {"rows": [[..]], "ell": k, "kappa": [..]}`.
    pub fn matrix(&self) -> Result<Option<CayleyConfig<QComplex>>> {
        let Some(m) = self.get("matrix") else { return Ok(None) };
        let rows: Vec<Vec<i64>> = m
            .get("rows")
            .map(|r| Vec::<Vec<i64>>::deserialize(r).map_err(|e| invalid(format!("matrix rows: {e}"))))
            .transpose()?
            .ok_or_else(|| invalid("\"matrix\" needs \"rows\""))?;
        let ell = m
            .get("ell")
            .map_or(Ok(0), |v| v.as_u64().ok_or_else(|| invalid("\"ell\" must be a non-negative integer")))?
            as usize;
        let kappa = match m.get("kappa") {
            Some(k) => scalars(k, "kappa")?,
            None => vec![QComplex::from_int(0); rows.len()],
        };
        CayleyConfig::from_matrix(rows, kappa, ell).map(Some)
    }

    pub fn cocycles(&self) -> Result<Vec<Cocycle>> {
        self.items("cocycles")?
            .iter()
            .map(|c| Cocycle::deserialize(c).map_err(|e| invalid(format!("cocycle: {e}"))))
            .collect()
    }

    /// Cycles with `φ_AB(A)` defaulting to the principal branch.
    pub fn cycles(&self, spec: &IntegrandSpec<Complex64>) -> Result<Vec<TwistedCycle>> {
        self.items("cycles")?
            .iter()
            .map(|c| {
                let a = point(c.get("A"), "A")?;
                let phi = match c.get("phi") {
                    Some(v) => literal_from_json(v)?.approx,
                    None => principal_branch(spec, a)?,
                };
                Ok(TwistedCycle { a, b: point(c.get("B"), "B")?, c: point(c.get("C"), "C")?, phi })
            })
            .collect()
    }

    pub fn forms(&self, n: usize, ell: usize) -> Result<Vec<LogForm<QComplex>>> {
        self.items("forms")?.iter().map(|v| LogForm::from_json(v, n, ell)).collect()
    }

    pub fn operators(&self, n: usize) -> Result<Vec<AnnOperator<QComplex>>> {
        self.items("operators")?.iter().map(|v| AnnOperator::from_json(v, n)).collect()
    }

    pub fn relations(&self) -> Result<Vec<Relation<QComplex>>> {
        self.items("relations")?.iter().map(Relation::from_json).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_problem() {
        let p = Problem::parse(r#"{"f": ["x - 1", "x - 2"], "s": ["1/2", 0.5], "nu": [[0.5, 0]]}"#).unwrap();
        let spec = p.spec(true).unwrap();
        assert_eq!((spec.n(), spec.ell()), (1, 2));
        assert_eq!(spec.s()[0], spec.s()[1]);
        assert!(p.cocycles().unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Problem::parse("[1]").is_err());
        assert!(Problem::parse("{").is_err());
        assert!(Problem::parse(r#"{"f": [], "s": []}"#).unwrap().spec(false).is_err());
        assert!(Problem::parse(r#"{"f": ["x - 1"]}"#).unwrap().spec(true).is_err());
        assert!(Problem::parse(r#"{"f": ["x"], "settings": {"bogus": 1}}"#).is_err());
    }
}
