//! One function per subcommand, each producing the JSON body of its report.

use euler_core::critical::{euler_characteristic, ChiOptions, TrackerSettings};
use euler_core::gkz::{cayley_matrix, gkz_report};
use euler_core::polytope::{cayley_support, normalized_volume};
use euler_core::relations::{mellin_relation, nabla_apply, relations_agree, verify_numeric, LogForm, Relation};
use euler_core::twisted::{nullspace, pairing_matrix, singular_values, IntegrationSettings, Integrator};
use euler_core::{Error, QComplex, Result};
use serde_json::{json, Value};

use crate::problem::Problem;

pub const DEFAULT_NULLSPACE_TOL: f64 = 1e-3;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-3;
/// Relative tolerance of `relations_agree` between two produced relations.
pub const AGREEMENT_TOL: f64 = 1e-6;

/// Command-line overrides shared by all subcommands.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub nodes: Option<usize>,
    pub tol: Option<f64>,
    pub draws: Option<usize>,
    pub pin: bool,
    pub numeric: bool,
    pub forms: Vec<String>,
    pub operators: Vec<String>,
}

pub fn seed(problem: &Problem, o: &Overrides) -> u64 {
    o.seed.unwrap_or(problem.settings.tracker.seed)
}

fn tracker(problem: &Problem, o: &Overrides) -> Result<TrackerSettings> {
    let mut t = problem.settings.tracker.clone();
    t.seed = seed(problem, o);
    if let Some(tol) = o.tol {
        t.success_tol = tol;
    }
    t.validate()?;
    Ok(t)
}

fn integration(problem: &Problem, o: &Overrides, tol_is_closure: bool) -> IntegrationSettings {
    let mut s = problem.settings.integration.clone();
    if let Some(n) = o.nodes {
        s.nodes = n;
    }
    if let (true, Some(tol)) = (tol_is_closure, o.tol) {
        s.closure_tol = tol;
    }
    s
}

pub fn chi(problem: &Problem, o: &Overrides) -> Result<Value> {
    let spec = problem.spec(false)?;
    let draws = o.draws.or(problem.settings.draws).unwrap_or(ChiOptions::default().draws);
    let report = euler_characteristic(&spec, &tracker(problem, o)?, ChiOptions { draws, pin_first: o.pin })?;
    Ok(json!(report))
}

pub fn vol(problem: &Problem, _: &Overrides) -> Result<Value> {
    let points = match problem.points()? {
        Some(p) => p,
        None => cayley_support(&problem.spec(false)?),
    };
    let report = normalized_volume(&points)?;
    Ok(json!({"points": points.points(), "report": report}))
}

pub fn integrate(problem: &Problem, o: &Overrides) -> Result<Value> {
    let spec = problem.spec(true)?;
    let integrator = Integrator::new(&spec, integration(problem, o, true))?;
    let cycles = problem.cycles(integrator.spec())?;
    if cycles.is_empty() {
        return Err(Error::InvalidInput("\"cycles\" must list at least one twisted cycle".into()));
    }
    let cocycles = problem.cocycles()?;
    let m = pairing_matrix(&integrator, &cycles, &cocycles)?;
    Ok(json!({
        "curve": integrator.curve(),
        "cycles": cycles,
        "pairing": m,
        "singular_values": singular_values(&m.entries),
    }))
}

struct Produced {
    source: String,
    relation: Relation<QComplex>,
}

fn parse_inline(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("{what}: {e}")))
}

pub fn relations(problem: &Problem, o: &Overrides) -> Result<Value> {
    let spec = problem.spec(true)?;
    let (n, ell) = (spec.n(), spec.ell());
    let mut produced: Vec<Produced> = Vec::new();
    let mut agreement = Vec::new();
    let mut kernel_json = Value::Null;

    let mut forms = problem.forms(n, ell)?;
    for text in &o.forms {
        forms.push(LogForm::from_json(&parse_inline(text, "--form")?, n, ell)?);
    }
    for (i, phi) in forms.iter().enumerate() {
        produced.push(Produced { source: format!("form {}", i + 1), relation: nabla_apply(phi, &spec)? });
    }

    let mut operators = problem.operators(n)?;
    for text in &o.operators {
        operators.push(euler_core::relations::AnnOperator::from_json(&parse_inline(text, "--operator")?, n)?);
    }
    for (i, op) in operators.iter().enumerate() {
        let mellin = mellin_relation(op, &spec)?;
        let nabla = nabla_apply(&LogForm::from_operator(op, ell)?, &spec)?;
        agreement.push(json!({
            "left": format!("operator {}", i + 1),
            "right": format!("form of operator {}", i + 1),
            "agree": relations_agree(&mellin, &nabla, AGREEMENT_TOL),
        }));
        produced.push(Produced { source: format!("operator {}", i + 1), relation: mellin });
    }

    for (i, r) in problem.relations()?.into_iter().enumerate() {
        produced.push(Produced { source: format!("input {}", i + 1), relation: r });
    }

    let mut residuals = Vec::new();
    if o.numeric {
        let integrator = Integrator::new(&spec, integration(problem, o, false))?;
        let cycles = problem.cycles(integrator.spec())?;
        let cocycles = problem.cocycles()?;
        let symbolic = produced.len();
        if !cycles.is_empty() && !cocycles.is_empty() {
            let m = pairing_matrix(&integrator, &cycles, &cocycles)?;
            let tol = o.tol.or(problem.settings.nullspace_tol).unwrap_or(DEFAULT_NULLSPACE_TOL);
            let kernel = nullspace(&m.entries, tol)?;
            for (i, k) in kernel.iter().enumerate() {
                let relation = match &k.exact {
                    Some(exact) => Relation::from_cocycles(&cocycles, exact)?,
                    None => {
                        let coeffs: Vec<QComplex> = k
                            .scaled
                            .iter()
                            .map(|&z| {
                                euler_core::twisted::exact_of(z)
                                    .ok_or_else(|| Error::NonGeneric("non-finite kernel entry".into()))
                            })
                            .collect::<Result<_>>()?;
                        Relation::from_cocycles(&cocycles, &coeffs)?
                    }
                };
                for p in &produced[..symbolic] {
                    agreement.push(json!({
                        "left": format!("kernel {}", i + 1),
                        "right": p.source,
                        "agree": relations_agree(&relation, &p.relation, AGREEMENT_TOL),
                    }));
                }
                produced.push(Produced { source: format!("kernel {}", i + 1), relation });
            }
            kernel_json = json!({
                "pairing": m,
                "singular_values": singular_values(&m.entries),
                "rel_tol": tol,
                "vectors": kernel,
            });
        }
        let bound = problem.settings.residual_tol.unwrap_or(DEFAULT_RESIDUAL_TOL);
        for p in &produced {
            for (j, cycle) in cycles.iter().enumerate() {
                let check = verify_numeric(&p.relation, cycle, &integrator)?;
                residuals.push(json!({
                    "relation": p.source,
                    "cycle": j + 1,
                    "residual": check.residual,
                    "max_integral": check.scale,
                    "relative": check.relative(),
                    "sound": check.relative() <= bound,
                }));
            }
        }
    }

    let relations: Vec<Value> = produced
        .iter()
        .map(|p| json!({"source": p.source, "terms": p.relation.to_json(), "normalized": p.relation.normalize().to_json()}))
        .collect();
    Ok(json!({"relations": relations, "agreement": agreement, "residuals": residuals, "kernel": kernel_json}))
}

pub fn gkz(problem: &Problem, _: &Overrides) -> Result<Value> {
    let cfg = match problem.matrix()? {
        Some(cfg) => cfg,
        None => cayley_matrix(&problem.spec(true)?),
    };
    Ok(json!(gkz_report(&cfg)?))
}
