//! Problem descriptions read from JSON.

use std::collections::BTreeMap;

use prismstrat::coefficients::{parse_q, FieldDesc, RawKElem, Q};
use prismstrat::cosimplicial::CosimpCtx;
use prismstrat::matrix::{mat_from_raw, Mat};
use prismstrat::rings::Trunc;
use prismstrat::stratification::Seeds;
use prismstrat::Error;
use serde::{Deserialize, Serialize};

/// A rational given as a JSON integer or a "num/den" string.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum RawQ {
    Int(i64),
    Str(String),
}

impl RawQ {
    pub fn parse(&self) -> prismstrat::Result<Q> {
        match self {
            RawQ::Int(n) => Ok(Q::from_integer((*n).into())),
            RawQ::Str(s) => parse_q(s),
        }
    }
}

/// One seed A_{m,1}: a matrix of K-elements, or a bare scalar when l = 1.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum RawSeed {
    Matrix(Vec<Vec<RawKElem>>),
    Scalar(RawKElem),
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// closed-form: largest m.
    pub m_max: Option<usize>,
    /// conjecture: largest k.
    pub k_max: Option<usize>,
    /// sen: cap on Frobenius factors.
    pub n_phi_max: Option<usize>,
    /// h0: kernel scan bound.
    pub m_probe: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default)]
    pub id: Option<String>,
    pub p: u64,
    #[serde(rename = "E_coeffs")]
    pub e_coeffs: Vec<RawQ>,
    #[serde(default)]
    pub l: Option<usize>,
    #[serde(default)]
    pub seeds: Vec<RawSeed>,
    pub trunc: Trunc,
    #[serde(default = "default_prec")]
    pub padic_prec: i64,
    #[serde(default)]
    pub options: Options,
}

fn default_prec() -> i64 {
    10
}

/// Command-line overrides of the spec.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub trunc_t: Option<usize>,
    pub trunc_x: Option<usize>,
    pub prec: Option<i64>,
}

impl ProblemSpec {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(t) = o.trunc_t {
            self.trunc.t_order = t;
        }
        if let Some(x) = o.trunc_x {
            self.trunc.pd_degree = x;
        }
        if let Some(p) = o.prec {
            self.padic_prec = p;
        }
    }

    pub fn field(&self) -> prismstrat::Result<FieldDesc> {
        let coeffs = self.e_coeffs.iter().map(RawQ::parse).collect::<prismstrat::Result<Vec<_>>>()?;
        FieldDesc::new(self.p, coeffs)
    }

    pub fn trunc(&self) -> prismstrat::Result<Trunc> {
        Trunc::new(self.trunc.t_order, self.trunc.pd_degree)
    }

    pub fn seeds(&self, f: &FieldDesc) -> prismstrat::Result<Seeds> {
        let mats = self
            .seeds
            .iter()
            .enumerate()
            .map(|(m, s)| seed_matrix(f, m, s))
            .collect::<prismstrat::Result<Vec<Mat>>>()?;
        let l = self.l.or_else(|| mats.first().map(Mat::rows)).unwrap_or(1);
        if l == 0 {
            return Err(Error::SeedShapeMismatch("rank l must be positive".into()));
        }
        if mats.is_empty() {
            return Ok(Seeds::zero(f, l));
        }
        if let Some((m, bad)) = mats.iter().enumerate().find(|(_, a)| a.rows() != l) {
            return Err(Error::SeedShapeMismatch(format!(
                "A_{{{m},1}} has {} rows but l = {l}",
                bad.rows()
            )));
        }
        Seeds::new(mats)
    }

    pub fn context(&self) -> prismstrat::Result<(FieldDesc, CosimpCtx, Seeds)> {
        let f = self.field()?;
        let seeds = self.seeds(&f)?;
        let ctx = CosimpCtx::new(&f, self.trunc()?)?;
        Ok((f, ctx, seeds))
    }
}

fn seed_matrix(f: &FieldDesc, m: usize, s: &RawSeed) -> prismstrat::Result<Mat> {
    let mat = match s {
        RawSeed::Scalar(x) => mat_from_raw(f, &[vec![x.clone()]])?,
        RawSeed::Matrix(rows) => {
            if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
                return Err(Error::SeedShapeMismatch(format!("A_{{{m},1}} is not square")));
            }
            mat_from_raw(f, rows)?
        }
    };
    Ok(mat)
}

/// A precondition violated by a spec.
#[derive(Clone, Debug, Serialize)]
pub struct Diagnostic {
    pub kind: String,
    pub message: String,
    /// Commands the diagnostic blocks; empty means every command.
    pub applies_to: Vec<&'static str>,
}

impl Diagnostic {
    fn from_error(e: &Error, applies_to: Vec<&'static str>) -> Self {
        Diagnostic {
            kind: e.kind().to_string(),
            message: e.to_string(),
            applies_to,
        }
    }
}

/// All violated preconditions, without computing anything.
pub fn validate(spec: &ProblemSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if let Err(e) = spec.trunc() {
        out.push(Diagnostic::from_error(&e, vec![]));
    }
    if spec.padic_prec < 1 {
        out.push(Diagnostic {
            kind: "ShapeMismatch".into(),
            message: format!("padic_prec must be at least 1, got {}", spec.padic_prec),
            applies_to: vec!["sen"],
        });
    }
    let field = match spec.field() {
        Ok(f) => f,
        Err(e) => {
            out.push(Diagnostic::from_error(&e, vec![]));
            return out;
        }
    };
    let mut mats = Vec::new();
    for (m, s) in spec.seeds.iter().enumerate() {
        match seed_matrix(&field, m, s) {
            Ok(a) => mats.push(a),
            Err(e) => out.push(Diagnostic::from_error(&e, vec![])),
        }
    }
    if mats.len() == spec.seeds.len() {
        match spec.seeds(&field) {
            Ok(seeds) => {
                if let Err(e) = seeds.require_commuting(&field) {
                    out.push(Diagnostic::from_error(&e, vec!["closed-form", "conjecture"]));
                }
            }
            Err(e) => out.push(Diagnostic::from_error(&e, vec![])),
        }
    }
    out
}

/// Sweep input: explicit instances, or one base spec with a grid of seed lists.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub instances: Vec<ProblemSpec>,
    #[serde(default)]
    pub base: Option<ProblemSpec>,
    #[serde(default)]
    pub seed_grid: Vec<Vec<RawSeed>>,
    #[serde(default = "default_sweep_commands")]
    pub commands: Vec<String>,
}

fn default_sweep_commands() -> Vec<String> {
    vec!["cocycle".into()]
}

impl SweepSpec {
    /// Instances keyed by id; generated ids are zero-padded grid positions.
    pub fn expand(&self) -> std::result::Result<BTreeMap<String, ProblemSpec>, String> {
        let mut out = BTreeMap::new();
        for (i, inst) in self.instances.iter().enumerate() {
            let id = inst.id.clone().unwrap_or_else(|| format!("instance-{i:04}"));
            if out.insert(id.clone(), inst.clone()).is_some() {
                return Err(format!("duplicate instance id {id}"));
            }
        }
        if !self.seed_grid.is_empty() {
            let base = self.base.as_ref().ok_or("seed_grid needs a base spec")?;
            for (i, seeds) in self.seed_grid.iter().enumerate() {
                let mut inst = base.clone();
                inst.seeds = seeds.clone();
                let id = format!("grid-{i:04}");
                inst.id = Some(id.clone());
                if out.insert(id.clone(), inst).is_some() {
                    return Err(format!("duplicate instance id {id}"));
                }
            }
        }
        Ok(out)
    }
}
