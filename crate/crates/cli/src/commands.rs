use std::path::Path;

use rankloss::conditions::{check_c2, cross_validate_with_ranks, max_tau, Ensemble};
use rankloss::exactla::{format_rational, IndexSet};
use rankloss::formats::{parse_ensemble, parse_scheme, parse_topology, scheme_to_json};
use rankloss::matroid::{block_matroid, dual, verify_axioms, RankOracleMatroid};
use rankloss::randrank::{c1_from_ranks, sampled_ranks, TrialConfig};
use rankloss::tim::{
    check_p1_p2, chromatic_number, half_dof_feasible, half_dof_structure_check, is_bipartite, ldof_sym,
    normalize_alignment, reduced_conflict_graph, regular_conflict_graph, synth_exclusive_scheme_at,
    synth_exclusive_scheme_with, synth_half_dof_scheme_with, verify_decodability, ActivationPolicy, GenericEntries,
    Scheme, SparseAssignment, TimError,
};
use serde_json::{json, Value};

use crate::report::{CliError, Report};
use crate::{Policy, Sampling, SchemeKind};

/// Ground sets up to this size get full rank tables.
const RANK_TABLE_LIMIT: usize = 6;

fn trial_config(s: &Sampling) -> Result<TrialConfig, CliError> {
    Ok(TrialConfig::with_bits(s.trials, s.bits, s.seed)?)
}

fn ensemble_summary(e: &Ensemble) -> Value {
    json!({ "n": e.n(), "K": e.k(), "m": e.column_counts(), "R": e.r() })
}

pub fn certify(path: &Path, tau: Option<usize>) -> Result<Report, CliError> {
    let e = parse_ensemble(path)?;
    let top = max_tau(&e)?;
    let taus: Vec<usize> = match tau {
        Some(t) => vec![t],
        None => (1..=e.r()).collect(),
    };
    let checks = taus
        .into_iter()
        .map(|t| check_c2(&e, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Report::new(
        "certify",
        json!({ "ensemble": ensemble_summary(&e), "max_tau": top, "checks": checks }),
    ))
}

pub fn mc_rank(path: &Path, sampling: &Sampling) -> Result<Report, CliError> {
    let e = parse_ensemble(path)?;
    let cfg = trial_config(sampling)?;
    let ranks = sampled_ranks(&e, &cfg);
    let best = ranks.iter().copied().max().unwrap_or(0);
    Ok(Report::new(
        "mc-rank",
        json!({
            "ensemble": ensemble_summary(&e),
            "trials": cfg.trials(),
            "entry_bound": cfg.entry_bound(),
            "seed": cfg.seed(),
            "sampled_ranks": ranks,
            "generic_rank_lower_bound": best,
            "rank_loss_upper_bound": e.r() - best,
            // probability that the sampled maximum undershoots the generic rank
            "failure_bound_log2": cfg.failure_bound_log2(e.n()),
        }),
    ))
}

pub fn equiv(path: &Path, tau: Option<usize>, sampling: &Sampling) -> Result<Report, CliError> {
    let e = parse_ensemble(path)?;
    let cfg = trial_config(sampling)?;
    let ranks = sampled_ranks(&e, &cfg);
    let taus: Vec<usize> = match tau {
        Some(t) => vec![t],
        None => (1..=e.r()).collect(),
    };
    let mut reports = Vec::new();
    for t in taus {
        let r = cross_validate_with_ranks(&e, t, &cfg, &ranks)?;
        reports.push(json!({
            "tau": t,
            "agreement": r.agreement,
            "summary": r.summary(),
            "verdicts": r.verdicts(),
            "c1": c1_from_ranks(&e, t, &cfg, &ranks),
            "c2": r.c2,
            "c3": r.c3,
            "c4": r.c4,
            "c5": r.c5,
        }));
    }
    Ok(Report::new(
        "equiv",
        json!({
            "ensemble": ensemble_summary(&e),
            "seed": cfg.seed(),
            "trials": cfg.trials(),
            "agreement": true,
            "results": reports,
        }),
    ))
}

fn one_based_set(universe: usize, list: Option<&[usize]>, what: &str) -> Result<IndexSet, CliError> {
    match list {
        None => Ok(IndexSet::full(universe)),
        Some(l) => IndexSet::from_one_based(universe, l.iter().copied())
            .map_err(|e| CliError::Usage(format!("--{what}: {e}"))),
    }
}

fn rank_table(m: &RankOracleMatroid) -> Value {
    Value::Array(
        m.rank_table()
            .into_iter()
            .map(|(s, r)| json!({ "set": s, "rank": r }))
            .collect(),
    )
}

pub fn matroid_check(path: &Path, block: usize, x: Option<&[usize]>, y: Option<&[usize]>) -> Result<Report, CliError> {
    let e = parse_ensemble(path)?;
    if block == 0 || block > e.k() {
        return Err(CliError::Usage(format!("--block {block} is outside 1..={}", e.k())));
    }
    let i = block - 1;
    let x = one_based_set(e.n(), x, "x")?;
    let y = one_based_set(e.m(i), y, "y")?;
    let m = block_matroid(&e, i, &x, &y)?;
    let d = dual(&m);
    let small = x.len() <= RANK_TABLE_LIMIT;
    Ok(Report::new(
        "matroid-check",
        json!({
            "block": block,
            "x": x,
            "y": y,
            "rank": m.rank(&x),
            "dual_rank": d.rank(&x),
            "axioms": verify_axioms(&m)?,
            "dual_axioms": verify_axioms(&d)?,
            "rank_table": if small { rank_table(&m) } else { Value::Null },
            "dual_rank_table": if small { rank_table(&d) } else { Value::Null },
        }),
    ))
}

pub fn tim_dof(path: &Path) -> Result<Report, CliError> {
    let t = parse_topology(path)?;
    let reduced = reduced_conflict_graph(&t);
    let regular = regular_conflict_graph(&t);
    let props = check_p1_p2(&t);
    let ldof = match ldof_sym(&t) {
        Ok(v) => json!({ "value": format_rational(&v) }),
        Err(TimError::Precondition(reason)) => json!({ "value": null, "reason": reason }),
        Err(e) => return Err(e.into()),
    };
    Ok(Report::new(
        "tim dof",
        json!({
            "K": t.k(),
            "properties": props,
            "reduced_edges": reduced.edges_one_based(),
            "regular_edges": regular.edges_one_based(),
            "reduced_bipartition": is_bipartite(&reduced),
            "chi_reduced": chromatic_number(&reduced)?,
            "chi_regular": chromatic_number(&regular)?,
            "half_dof_feasible": half_dof_feasible(&t),
            "ldof_sym": ldof,
        }),
    ))
}

fn write_scheme(path: Option<&Path>, s: &Scheme, a: Option<&SparseAssignment>) -> Result<Value, CliError> {
    let v = scheme_to_json(s, a);
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(&v).expect("JSON values serialize");
        std::fs::write(p, format!("{text}\n")).map_err(|e| CliError::Load(format!("{}: {e}", p.display())))?;
    }
    Ok(v)
}

fn active_slots(s: &Scheme) -> Vec<Vec<usize>> {
    (0..s.k()).map(|i| s.active_slots(i)).collect()
}

pub fn tim_scheme(
    path: &Path,
    kind: SchemeKind,
    policy: Policy,
    random_entries: Option<u64>,
    point: Option<(usize, usize)>,
    out: Option<&Path>,
) -> Result<Report, CliError> {
    let t = parse_topology(path)?;
    let policy = match policy {
        Policy::Plain => ActivationPolicy::Plain,
        Policy::Minimal => ActivationPolicy::MinimalActivation,
    };
    let entries = random_entries.map_or(GenericEntries::Primes, GenericEntries::Random);
    let half = match kind {
        SchemeKind::Half => true,
        SchemeKind::Exclusive => false,
        SchemeKind::Auto => point.is_none() && half_dof_feasible(&t),
    };
    if half {
        let s = synth_half_dof_scheme_with(&t, policy)?;
        let file = write_scheme(out, &s, None)?;
        return Ok(Report::new(
            "tim scheme",
            json!({ "kind": "half", "policy": policy, "n": 2, "m": 1, "active_slots": active_slots(&s), "scheme": file }),
        ));
    }
    let d = match point {
        Some((n, m)) => synth_exclusive_scheme_at(&t, n, m, entries)?,
        None => synth_exclusive_scheme_with(&t, entries)?,
    };
    let file = write_scheme(out, &d.scheme, Some(&d.assignment))?;
    Ok(Report::new(
        "tim scheme",
        json!({
            "kind": if d.half_dof_route { "half" } else { "exclusive" },
            "n": d.n,
            "m": d.m,
            "tau": d.tau,
            "chi": d.chi,
            "chi_alignment": d.chi_alignment,
            "divergence": d.divergence,
            "assignment": d.assignment,
            "scheme": file,
        }),
    ))
}

pub fn tim_verify(topology: &Path, scheme: &Path, sampling: &Sampling) -> Result<Report, CliError> {
    let t = parse_topology(topology)?;
    let (s, _) = parse_scheme(scheme)?;
    let cfg = trial_config(sampling)?;
    let report = verify_decodability(&t, &s, &cfg)?;
    let half_rate = s.n() % 2 == 0 && s.symmetric_m() == Some(s.n() / 2);
    let structure = if half_rate {
        json!(half_dof_structure_check(&t, &s)?)
    } else {
        Value::Null
    };
    let dof = s.symmetric_m().map(|m| format!("{m}/{}", s.n()));
    Ok(Report::new(
        "tim verify",
        json!({
            "n": s.n(),
            "symmetric_dof": dof,
            "seed": cfg.seed(),
            "decodability": report,
            "structure": structure,
        }),
    ))
}

pub fn tim_normalize(topology: &Path, scheme: &Path, out: Option<&Path>) -> Result<Report, CliError> {
    let t = parse_topology(topology)?;
    let (s, a) = parse_scheme(scheme)?;
    let a = a.ok_or_else(|| CliError::Load(format!("{}: scheme file has no assignment", scheme.display())))?;
    let (ns, na) = normalize_alignment(&t, &s, &a)?;
    let file = write_scheme(out, &ns, Some(&na))?;
    Ok(Report::new(
        "tim normalize",
        json!({ "assignment": na, "scheme": file }),
    ))
}
