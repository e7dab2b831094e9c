//! Engine dispatch; every command produces a JSON value.

use std::collections::BTreeMap;

use clap::ValueEnum;
use prismstrat::closedform::{conjecture_residual, fg_coeffs, h_table, verify_commutative};
use prismstrat::cohomology::h0_solve_with_probe;
use prismstrat::sen::{nearly_dr_report, sen_operator_matrix};
use prismstrat::stratification::{cocycle_report, generate_amn};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::spec::{validate, ProblemSpec, SweepSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Gen,
    Cocycle,
    ClosedForm,
    H0,
    Sen,
    Conjecture,
    Sweep,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Gen => "gen",
            Command::Cocycle => "cocycle",
            Command::ClosedForm => "closed-form",
            Command::H0 => "h0",
            Command::Sen => "sen",
            Command::Conjecture => "conjecture",
            Command::Sweep => "sweep",
            Command::Validate => "validate",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        <Command as ValueEnum>::from_str(s, false).ok()
    }
}

fn to_value<T: Serialize>(x: &T) -> Result<Value, CliError> {
    Ok(serde_json::to_value(x)?)
}

const N_PHI_MAX: usize = 40;

/// Runs one engine command on one spec.
pub fn run_single(cmd: Command, spec: &ProblemSpec) -> Result<Value, CliError> {
    let (f, ctx, seeds) = spec.context()?;
    let trunc = ctx.trunc();
    let t_max = trunc.t_order - 1;
    let report = match cmd {
        Command::Gen => {
            let table = generate_amn(&seeds, &ctx, trunc.pd_degree)?;
            json!({
                "trunc": to_value(&trunc)?,
                "l": seeds.l(),
                "table": to_value(&table)?,
                "row_valuations": to_value(&table.row_valuations(&f))?,
            })
        }
        Command::Cocycle => {
            let mut v = to_value(&cocycle_report(&seeds, &ctx)?)?;
            v["seeds_commute"] = json!(seeds.first_noncommuting(&f).is_none());
            v
        }
        Command::ClosedForm => {
            seeds.require_commuting(&f)?;
            let m_max = spec.options.m_max.unwrap_or(t_max.min(4));
            let ht = h_table(&seeds, &ctx, m_max)?;
            let verify = verify_commutative(&seeds, &ctx, m_max, trunc.pd_degree)?;
            let (_, fg) = fg_coeffs(&f, m_max.max(1));
            json!({ "h_tilde": to_value(&ht)?, "verify": to_value(&verify)?, "fg": to_value(&fg)? })
        }
        Command::H0 => {
            let table = generate_amn(&seeds, &ctx, trunc.pd_degree.max(1))?;
            let probe = spec.options.m_probe.unwrap_or(t_max + seeds.l());
            to_value(&h0_solve_with_probe(&table, &ctx, trunc.t_order, probe)?)?
        }
        Command::Sen => {
            let n_phi = spec.options.n_phi_max.unwrap_or(N_PHI_MAX);
            let rep = sen_operator_matrix(&seeds, &ctx, spec.padic_prec, n_phi)?;
            json!({
                "sen": to_value(&rep)?,
                "nearly_de_rham": to_value(&nearly_dr_report(&seeds, &ctx)?)?,
            })
        }
        Command::Conjecture => {
            let k_max = spec.options.k_max.unwrap_or(t_max.min(2));
            let rep = conjecture_residual(&seeds, &ctx, k_max)?;
            let mut v = to_value(&rep)?;
            // Number of nonzero residual monomials per k; all zero means the identity holds.
            v["residuals"] = to_value(&rep.residuals.iter().map(|r| r.nonzero_monomials.len()).collect::<Vec<_>>())?;
            v
        }
        Command::Sweep | Command::Validate => {
            return Err(CliError::Usage(format!("{} is not a single-spec command", cmd.name())))
        }
    };
    Ok(json!({ "command": cmd.name(), "id": spec.id, "report": report }))
}

/// Diagnostics report and whether any of them blocks every command.
pub fn run_validate(spec: &ProblemSpec) -> (Value, bool) {
    let diags = validate(spec);
    let blocking = diags.iter().any(|d| d.applies_to.is_empty());
    let v = json!({
        "command": "validate",
        "valid": diags.is_empty(),
        "blocking": blocking,
        "diagnostics": serde_json::to_value(&diags).expect("serializable"),
    });
    (v, blocking)
}

#[derive(Serialize)]
struct InstanceResult {
    verdicts: BTreeMap<String, Value>,
    potential_counterexample: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<crate::error::ErrorObject>,
}

/// One-word verdict per command plus whether it contradicts a proved or conjectured identity.
fn sweep_verdict(cmd: Command, spec: &ProblemSpec) -> Result<(Value, bool), CliError> {
    let (_, ctx, seeds) = spec.context()?;
    let trunc = ctx.trunc();
    Ok(match cmd {
        Command::Cocycle => {
            let r = cocycle_report(&seeds, &ctx)?;
            (to_value(&r.verdict)?, !r.is_zero())
        }
        Command::Conjecture => {
            let k_max = spec.options.k_max.unwrap_or((trunc.t_order - 1).min(2));
            let r = conjecture_residual(&seeds, &ctx, k_max)?;
            let bad = !r.nonzero_orders.is_empty();
            (json!({ "nonzero_orders": r.nonzero_orders, "zero": !bad }), bad)
        }
        Command::ClosedForm => {
            let m_max = spec.options.m_max.unwrap_or((trunc.t_order - 1).min(4));
            let r = verify_commutative(&seeds, &ctx, m_max, trunc.pd_degree)?;
            (json!({ "all_zero": r.all_zero }), !r.all_zero)
        }
        Command::H0 => {
            let table = generate_amn(&seeds, &ctx, trunc.pd_degree.max(1))?;
            let probe = spec.options.m_probe.unwrap_or(trunc.t_order - 1 + seeds.l());
            let s = h0_solve_with_probe(&table, &ctx, trunc.t_order, probe)?;
            (json!({ "dim": s.dim, "q": s.q }), s.dim > s.q)
        }
        Command::Sen => {
            let r = nearly_dr_report(&seeds, &ctx)?;
            (to_value(&r.classification)?, false)
        }
        other => return Err(CliError::Usage(format!("{} cannot be swept", other.name()))),
    })
}

fn run_instance(commands: &[Command], spec: &ProblemSpec) -> InstanceResult {
    let mut verdicts = BTreeMap::new();
    let mut flagged = false;
    for &cmd in commands {
        match sweep_verdict(cmd, spec) {
            Ok((v, bad)) => {
                flagged |= bad;
                verdicts.insert(cmd.name().to_string(), v);
            }
            Err(e) => {
                return InstanceResult {
                    verdicts,
                    potential_counterexample: flagged,
                    error: Some(e.object()),
                }
            }
        }
    }
    InstanceResult {
        verdicts,
        potential_counterexample: flagged,
        error: None,
    }
}

#[cfg(feature = "parallel")]
fn map_instances(items: &[(String, ProblemSpec)], commands: &[Command]) -> Vec<InstanceResult> {
    use rayon::prelude::*;
    items.par_iter().map(|(_, s)| run_instance(commands, s)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_instances(items: &[(String, ProblemSpec)], commands: &[Command]) -> Vec<InstanceResult> {
    items.iter().map(|(_, s)| run_instance(commands, s)).collect()
}

/// Batch over many specs; results are keyed by instance id.
pub fn run_sweep(sweep: &SweepSpec, apply: impl Fn(&mut ProblemSpec)) -> Result<Value, CliError> {
    let commands = sweep
        .commands
        .iter()
        .map(|c| Command::from_name(c).ok_or_else(|| CliError::Usage(format!("unknown sweep command {c}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if commands.is_empty() {
        return Err(CliError::Usage("sweep needs at least one command".into()));
    }
    let items: Vec<(String, ProblemSpec)> = sweep
        .expand()
        .map_err(CliError::Usage)?
        .into_iter()
        .map(|(id, mut s)| {
            apply(&mut s);
            (id, s)
        })
        .collect();
    let results = map_instances(&items, &commands);
    let mut instances = BTreeMap::new();
    let mut flagged = Vec::new();
    let mut errors = 0;
    let mut tally: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    for ((id, _), r) in items.iter().zip(results) {
        if r.potential_counterexample {
            flagged.push(id.clone());
        }
        if r.error.is_some() {
            errors += 1;
        }
        for c in &commands {
            let t = tally.entry(c.name()).or_default();
            // Flagging is per instance, so a verdict counts as "ok" unless the instance failed or was flagged.
            let key = match (r.verdicts.contains_key(c.name()), r.potential_counterexample) {
                (false, _) => "error",
                (true, true) => "flagged",
                (true, false) => "ok",
            };
            *t.entry(key).or_default() += 1;
        }
        instances.insert(id.clone(), to_value(&r)?);
    }
    Ok(json!({
        "command": "sweep",
        "commands": commands.iter().map(|c| c.name()).collect::<Vec<_>>(),
        "instances": instances,
        "summary": {
            "total": items.len(),
            "errors": errors,
            "potential_counterexamples": flagged,
            "verdicts": tally,
        },
    }))
}
