use std::sync::Arc;

use serde_json::{json, Value};

use lgl_core::io::Loader;
use lgl_core::lgroup::{self, Counterexample, Mode};
use lgl_core::maxfrat::{self, Budget, Via};
use lgl_core::verify::{self, VerificationReport};
use lgl_core::{reconstruct, Error, FiniteLattice, GroupKind, LPoint, LSubset, Result};

use crate::output::{emit, lsubset, lsubset_text, points_text};
use crate::{Cli, Command, GroupCommand, LatticeCommand, LsubCommand, ModeArg, Status, ViaArg};

fn budget(cli: &Cli) -> Budget {
    let mut b = Budget::default();
    if let Some(n) = cli.global.budget {
        b.max_candidates = n;
    }
    if let Some(t) = cli.global.threads {
        b.threads = t;
    }
    b
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Ok
    } else {
        Status::Violation
    }
}

pub fn run(cli: &Cli) -> Result<Status> {
    let loader = Loader::new(cli.global.fixtures.clone());
    match &cli.command {
        Command::Lattice(LatticeCommand::Check { lattice }) => {
            lattice_check(cli, &loader.lattice(lattice, None)?)
        }
        Command::Lattice(LatticeCommand::Reconstruct) => lattice_reconstruct(cli),
        Command::Lattice(LatticeCommand::Export { lattice }) => {
            let spec = loader.lattice(lattice, None)?.to_spec();
            println!(
                "{}",
                serde_json::to_string_pretty(&spec).expect("serializable")
            );
            Ok(Status::Ok)
        }
        Command::Group(GroupCommand::Info { group }) => group_info(cli, &loader, group),
        Command::Lsub(LsubCommand::Check { mu, mode, ambient }) => {
            let ambient = ambient.as_deref().map(|a| loader.lsubset(a)).transpose()?;
            lsub_check(cli, &loader.lsubset(mu)?, *mode, ambient.as_ref())
        }
        Command::Gen { mu, points, eta } => {
            let mu = loader.lsubset(mu)?;
            let eta = match (points, eta) {
                (Some(p), None) => LSubset::points(
                    mu.group(),
                    mu.lattice(),
                    &LPoint::parse_list(p, mu.group(), mu.lattice())?,
                ),
                (None, Some(e)) => loader.lsubset(e)?,
                _ => {
                    return Err(Error::Input(
                        "gen needs exactly one of --points and --eta".into(),
                    ))
                }
            };
            gen(cli, &eta, &mu)
        }
        Command::Nilpotency { mu } => nilpotency(cli, &loader.lsubset(mu)?),
        Command::Normalizer { eta, mu } => {
            normalizer(cli, &loader.lsubset(eta)?, &loader.lsubset(mu)?)
        }
        Command::Closure { eta, mu } => closure(cli, &loader.lsubset(eta)?, &loader.lsubset(mu)?),
        Command::Maximal { eta, mu } => maximal(cli, &loader.lsubset(eta)?, &loader.lsubset(mu)?),
        Command::Frattini { mu, via } => frattini(cli, &loader.lsubset(mu)?, *via),
        Command::Fingen { mu, k_max } => fingen(cli, &loader.lsubset(mu)?, *k_max),
        Command::Verify { suite, cases, case } => run_verify(cli, suite, *cases, *case),
    }
}

fn lattice_check(cli: &Cli, l: &Arc<FiniteLattice>) -> Result<Status> {
    let witness = l.distributivity_witness();
    let chain = l.chain_properties();
    let mut parts = vec!["valid".to_string()];
    parts.push(match witness {
        None => "distributive".into(),
        Some([x, y, z]) => format!(
            "not distributive (at {}, {}, {})",
            l.label(x),
            l.label(y),
            l.label(z)
        ),
    });
    parts.push(if chain.is_chain {
        "chain".into()
    } else {
        "not a chain".into()
    });
    let body = json!({
        "name": l.name(),
        "size": l.size(),
        "valid": true,
        "distributive": witness.is_none(),
        "distributivity_witness": witness.map(|w| w.map(|x| l.label(x).to_string())),
        "chain": chain.is_chain,
        "upper_well_ordered": chain.is_upper_well_ordered,
    });
    emit(&cli.global, "lattice check", &parts.join(", "), body);
    Ok(Status::Ok)
}

fn lattice_reconstruct(cli: &Cli) -> Result<Status> {
    let report = reconstruct::search()?;
    let solutions: Vec<&reconstruct::Candidate> = report.solutions().collect();
    let mut text = format!(
        "{} posets, {} completions, {} of size {}, {} satisfying every check",
        report.posets,
        report.completions_tried,
        report.of_target_size,
        reconstruct::TARGET_SIZE,
        solutions.len()
    );
    for c in &solutions {
        text.push_str(&format!(
            "\n  {:?}: {}",
            c.completion,
            c.lattice.labels().join(" ")
        ));
    }
    let body = json!({
        "posets": report.posets,
        "completions_tried": report.completions_tried,
        "of_target_size": report.of_target_size,
        "candidates": report.candidates.iter().map(|c| json!({
            "completion": c.completion,
            "checks": c.checks,
            "lattice": c.lattice.to_spec(),
        })).collect::<Vec<_>>(),
        "solutions": solutions.len(),
    });
    emit(&cli.global, "lattice reconstruct", &text, body);
    Ok(status(!solutions.is_empty()))
}

fn group_info(cli: &Cli, loader: &Loader, reference: &str) -> Result<Status> {
    let g = loader.group(reference, None)?;
    let subgroups = g.all_subgroups()?;
    let normal = subgroups.iter().filter(|h| g.is_normal_subgroup(h)).count();
    let kind = if g.degree().is_some() {
        GroupKind::Permutation
    } else {
        GroupKind::Cayley
    };
    let elements: Vec<String> = g.elements().map(|x| g.display(x)).collect();
    let mut text = format!(
        "{}: order {}, {} subgroups ({} normal)",
        g.name(),
        g.order(),
        subgroups.len(),
        normal
    );
    if let Some(d) = g.degree() {
        text.push_str(&format!(", permutations of degree {d}"));
    }
    text.push_str(&format!("\nelements: {}", elements.join(" ")));
    let body = json!({
        "name": g.name(),
        "order": g.order(),
        "kind": kind,
        "degree": g.degree(),
        "elements": elements,
        "subgroup_orders": subgroups.iter().map(|h| h.order()).collect::<Vec<_>>(),
        "normal_subgroups": normal,
    });
    emit(&cli.global, "group info", &text, body);
    Ok(Status::Ok)
}

fn lsub_check(cli: &Cli, mu: &LSubset, mode: ModeArg, ambient: Option<&LSubset>) -> Result<Status> {
    let mode = match mode {
        ModeArg::Pointwise => Mode::Pointwise,
        ModeArg::Levels => Mode::Levels,
        ModeArg::StrongLevels => Mode::StrongLevels,
    };
    let w = lgroup::is_lsubgroup(mu, mode)?;
    let (g, l) = (mu.group(), mu.lattice());
    let counterexample = w.counterexample.map(|c| match c {
        Counterexample::Product(x, y) => format!(
            "μ({}·{}) ≱ μ({}) ∧ μ({})",
            g.display(x),
            g.display(y),
            g.display(x),
            g.display(y)
        ),
        Counterexample::Inverse(x) => format!("μ({}⁻¹) ≠ μ({})", g.display(x), g.display(x)),
        Counterexample::Level(a) => format!("level {} is not a subgroup", l.label(a)),
    });
    let mut text = format!("L-subgroup: {}", w.verdict);
    if let Some(c) = &counterexample {
        text.push_str(&format!(" ({c})"));
    }
    let mut body =
        json!({ "mode": mode, "lsubgroup": w.verdict, "counterexample": counterexample });
    let mut ok = w.verdict;
    if let Some(amb) = ambient {
        let within = lgroup::is_lsubgroup_of(mu, amb)?;
        let normal = within && lgroup::is_normal(mu, amb)?;
        text.push_str(&format!(
            "\nL-subgroup of ambient: {within}\nnormal in ambient: {normal}"
        ));
        body["lsubgroup_of_ambient"] = json!(within);
        body["normal_in_ambient"] = json!(normal);
        ok &= within;
    } else {
        let normal = lgroup::is_normal_in_group(mu);
        text.push_str(&format!("\nnormal in group: {normal}"));
        body["normal_in_group"] = json!(normal);
    }
    emit(&cli.global, "lsub check", &text, body);
    Ok(status(ok))
}

fn gen(cli: &Cli, eta: &LSubset, mu: &LSubset) -> Result<Status> {
    let g = lgroup::generated(eta, mu)?;
    let levels = lgroup::generated_levels(eta);
    let l = mu.lattice();
    let grp = mu.group();
    let level_rows: Vec<(String, Vec<String>)> = levels
        .iter()
        .map(|(a, h)| {
            (
                l.label(*a).to_string(),
                h.elements().into_iter().map(|x| grp.display(x)).collect(),
            )
        })
        .collect();
    let mut text = format!("⟨η⟩ = {}\nequals μ: {}", lsubset_text(&g), g == *mu);
    for (a, members) in &level_rows {
        text.push_str(&format!("\n⟨η_{a}⟩ = {{{}}}", members.join(", ")));
    }
    let body = json!({
        "generated": lsubset(&g),
        "equals_mu": g == *mu,
        "levels": level_rows.iter().map(|(a, m)| json!({ "value": a, "subgroup": m })).collect::<Vec<_>>(),
    });
    emit(&cli.global, "gen", &text, body);
    Ok(Status::Ok)
}

fn nilpotency(cli: &Cli, mu: &LSubset) -> Result<Status> {
    if !lgroup::is_lsubgroup_fast(mu) {
        return Err(Error::NotAnLSubgroup(
            "nilpotency needs an L-subgroup".into(),
        ));
    }
    let class = lgroup::nilpotency_class(mu)?;
    let chain = lgroup::central_chain(mu)?;
    let text = match class {
        Some(c) => format!("nilpotent, class {c}"),
        None => format!(
            "not nilpotent: central chain stabilizes after {} steps",
            chain.stages.len() - 1
        ),
    };
    let body = json!({
        "nilpotent": class.is_some(),
        "class": class,
        "stabilized": chain.stabilized,
        "central_chain": chain.stages.iter().map(lsubset).collect::<Vec<_>>(),
    });
    emit(&cli.global, "nilpotency", &text, body);
    Ok(Status::Ok)
}

fn normalizer(cli: &Cli, eta: &LSubset, mu: &LSubset) -> Result<Status> {
    let n = lgroup::normalizer(eta, mu)?;
    let normal = lgroup::is_normal(eta, mu)?;
    let text = format!("N(η) = {}\nη normal in μ: {normal}", lsubset_text(&n));
    emit(
        &cli.global,
        "normalizer",
        &text,
        json!({ "normalizer": lsubset(&n), "normal": normal }),
    );
    Ok(Status::Ok)
}

fn closure(cli: &Cli, eta: &LSubset, mu: &LSubset) -> Result<Status> {
    let c = lgroup::normal_closure(eta, mu)?;
    let series = lgroup::closure_series(eta, mu, lgroup::default_max_steps(mu))?;
    let text = format!(
        "η^μ = {}\nclosure series: {} stages, reaches η: {}",
        lsubset_text(&c),
        series.stages.len(),
        series.reached_eta
    );
    let body = json!({
        "normal_closure": lsubset(&c),
        "series": series.stages.iter().map(lsubset).collect::<Vec<_>>(),
        "reached_eta": series.reached_eta,
        "stabilized": series.stabilized,
    });
    emit(&cli.global, "closure", &text, body);
    Ok(Status::Ok)
}

fn maximal(cli: &Cli, eta: &LSubset, mu: &LSubset) -> Result<Status> {
    let cert = maxfrat::is_maximal(eta, mu, budget(cli))?;
    let mut text = format!(
        "maximal: {} (box {}, survivors {})",
        cert.verdict, cert.box_size, cert.survivors
    );
    if cert.not_proper {
        text.push_str("\nη is not proper");
    }
    if let Some(t) = &cert.strict_intermediate {
        text.push_str(&format!("\nstrictly between: {}", lsubset_text(t)));
    }
    let body = json!({
        "maximal": cert.verdict,
        "box_size": cert.box_size.to_string(),
        "survivors": cert.survivors,
        "not_proper": cert.not_proper,
        "strict_intermediate": cert.strict_intermediate.as_ref().map(lsubset),
    });
    emit(&cli.global, "maximal", &text, body);
    Ok(Status::Ok)
}

fn frattini(cli: &Cli, mu: &LSubset, via: ViaArg) -> Result<Status> {
    let via = match via {
        ViaArg::Enumeration => Via::Enumeration,
        ViaArg::NonGenerators => Via::NonGenerators,
        ViaArg::Both => Via::Both,
    };
    let report = maxfrat::frattini(mu, budget(cli), via)?;
    let mut lines = Vec::new();
    if let Some(phi) = &report.phi {
        lines.push(format!("Φ(μ) = {}", lsubset_text(phi)));
    }
    if let Some(lambda) = &report.lambda {
        lines.push(format!("λ(μ) = {}", lsubset_text(lambda)));
    }
    if let Some(n) = report.maximal_count {
        lines.push(format!("maximal L-subgroups: {n}"));
    }
    if let Some(w) = report.lambda_within_phi {
        lines.push(format!("λ ⊆ Φ: {w}"));
    }
    if let Some(e) = report.chain_equality {
        lines.push(format!("λ = Φ: {e}"));
    }
    let body = json!({
        "phi": report.phi.as_ref().map(lsubset),
        "lambda": report.lambda.as_ref().map(lsubset),
        "maximal_count": report.maximal_count,
        "lambda_within_phi": report.lambda_within_phi,
        "chain_equality": report.chain_equality,
    });
    emit(&cli.global, "frattini", &lines.join("\n"), body);
    Ok(Status::Ok)
}

fn fingen(cli: &Cli, mu: &LSubset, k_max: usize) -> Result<Status> {
    let set = maxfrat::generating_points(mu, k_max, budget(cli))?;
    let mut text = format!(
        "generators: {}\ncomplete: {}",
        points_text(mu, &set.points),
        set.complete
    );
    match &set.minimum {
        Some(m) => text.push_str(&format!("\nminimum ({}): {}", m.len(), points_text(mu, m))),
        None if set.minimum_search_complete => {
            text.push_str(&format!("\nno generating set of size ≤ {k_max}"))
        }
        None => text.push_str("\nminimum search ran out of budget"),
    }
    let body = json!({
        "points": points_text(mu, &set.points),
        "complete": set.complete,
        "minimum": set.minimum.as_ref().map(|m| points_text(mu, m)),
        "minimum_search_complete": set.minimum_search_complete,
    });
    emit(&cli.global, "fingen", &text, body);
    Ok(Status::Ok)
}

fn report_text(r: &VerificationReport) -> String {
    let mut text = format!(
        "{} ({}): {} cases, {} vacuous, {} violations, {}, {} ms",
        r.suite_id,
        r.result,
        r.cases_run,
        r.vacuous,
        r.violations.len(),
        if r.passed() { "pass" } else { "FAIL" },
        r.elapsed_ms
    );
    for v in r.violations.iter().take(5) {
        text.push_str(&format!(
            "\n  case {}: {}\n    replay: lgl verify {} --seed {} --case {}",
            v.case, v.detail, r.suite_id, r.seed, v.case
        ));
    }
    if r.violations.len() > 5 {
        text.push_str(&format!("\n  … {} more", r.violations.len() - 5));
    }
    if !r.over_budget.is_empty() {
        text.push_str(&format!("\n  over budget: {} cases", r.over_budget.len()));
    }
    text
}

fn run_verify(cli: &Cli, suite: &str, cases: u64, case: Option<u64>) -> Result<Status> {
    let seed = cli.global.seed;
    match (suite, case) {
        ("list", _) => {
            let rows: Vec<Value> = verify::suites()
                .iter()
                .map(|s| json!({ "suite_id": s.id, "result": s.result, "description": s.description }))
                .collect();
            let text = verify::suites()
                .iter()
                .map(|s| format!("{:<18} {:<44} {}", s.id, s.result, s.description))
                .collect::<Vec<_>>()
                .join("\n");
            emit(&cli.global, "verify list", &text, json!({ "suites": rows }));
            Ok(Status::Ok)
        }
        ("all", _) => {
            let pool = verify::instances::Pool::new();
            let reports = verify::suites()
                .iter()
                .map(|s| verify::run_with_pool(s, &pool, seed, cases, budget(cli)))
                .collect::<Result<Vec<_>>>()?;
            let ok = reports.iter().all(|r| r.passed());
            let partial = reports.iter().any(|r| !r.over_budget.is_empty());
            let text = reports
                .iter()
                .map(report_text)
                .collect::<Vec<_>>()
                .join("\n");
            emit(&cli.global, "verify", &text, json!({ "reports": reports }));
            finish(ok, partial)
        }
        (id, Some(k)) => {
            let found = verify::replay(id, seed, k, budget(cli))?;
            let text = match &found {
                Some(v) => format!("case {k} violates {id}: {}\ninputs: {}", v.detail, v.inputs),
                None => format!("case {k} holds for {id}"),
            };
            emit(
                &cli.global,
                "verify replay",
                &text,
                json!({ "suite_id": id, "seed": seed, "violation": found }),
            );
            Ok(status(found.is_none()))
        }
        (id, None) => {
            let report = verify::run_suite(id, seed, cases, budget(cli))?;
            let text = report_text(&report);
            let (ok, partial) = (report.violations.is_empty(), !report.over_budget.is_empty());
            if cli.global.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                );
            } else {
                println!("{text}");
            }
            finish(ok, partial)
        }
    }
}

/// Violations win over budget exhaustion.
fn finish(ok: bool, partial: bool) -> Result<Status> {
    Ok(match (ok, partial) {
        (false, _) => Status::Violation,
        (true, true) => Status::OverBudget,
        (true, false) => Status::Ok,
    })
}
