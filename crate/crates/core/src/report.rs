//! Assembled reports and their text and JSON renderings.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::criterion::{
    check_applicability, construct_phase_object, obstruction_report, CriterionError, CriterionReport, EvaluationLevel,
    InputBundle, Options, PhaseObject,
};
use crate::decomposition::ModuleRep;
use crate::filtration::{DefectFiltration, TerminationVerdict};
use crate::forced::{descend_module, forced_structure_report, ForcedError, ForcedStructureReport};
use crate::structure::{ElementId, InteractionStructure};
use crate::symmetry::{DynamicVerdict, Induced};
use crate::witness::ObstructionWitness;

/// How the tool reads the criterion's informal terms, printed in every
/// report header.
pub const INTERPRETATION: &str = "all data derived from the input tables with no truncation; \
the declared dynamics are taken as the full set of admissible dynamics";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error(transparent)]
    Criterion(#[from] CriterionError),
    #[error(transparent)]
    Forced(#[from] ForcedError),
}

/// Verdicts, witnesses and, when the criterion passes, the phase object and
/// the forced-structure report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullReport {
    pub criterion: CriterionReport,
    pub witnesses: Vec<ObstructionWitness>,
    pub phase: Option<PhaseObject>,
    pub forced: Option<ForcedStructureReport>,
}

/// Runs the whole pipeline. `module` is keyed by the input's elements and
/// is carried down to the phase carrier before use.
pub fn build_report(
    bundle: &InputBundle,
    options: &Options,
    module: Option<&ModuleRep>,
    other: Option<&InteractionStructure>,
) -> Result<FullReport, ReportError> {
    let criterion = check_applicability(bundle, options)?;
    if !criterion.overall {
        let witnesses = obstruction_report(bundle, &criterion)?;
        return Ok(FullReport {
            criterion,
            witnesses,
            phase: None,
            forced: None,
        });
    }
    let phase = construct_phase_object(bundle, options)?;
    let descended = module.map(|m| descend_module(&phase, m)).transpose()?;
    let forced = forced_structure_report(&phase, descended.as_ref(), other, options.max_enumeration)?;
    Ok(FullReport {
        criterion,
        witnesses: Vec::new(),
        phase: Some(phase),
        forced: Some(forced),
    })
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

fn marker(passed: bool) -> &'static str {
    if passed {
        "[PASS]"
    } else {
        "[FAIL]"
    }
}

fn names(s: &InteractionStructure, ids: impl IntoIterator<Item = ElementId>) -> Vec<String> {
    ids.into_iter().map(|p| s.name_of(p).to_string()).collect()
}

fn braces(items: &[String]) -> String {
    format!("{{{}}}", items.join(","))
}

fn filtration_json(s: &InteractionStructure, f: &DefectFiltration) -> Value {
    json!({
        "mode": f.mode.to_string(),
        "levels": f.levels.iter().map(|l| names(s, l.iter().copied())).collect::<Vec<_>>(),
        "stabilized_at": f.stabilized_at,
        "covers_carrier": f.covers_carrier,
    })
}

fn label_names(report: &CriterionReport, bundle: &InputBundle) -> Vec<String> {
    match &report.carrier {
        Some(pc) => pc.dual.labels.clone(),
        None => bundle
            .declared
            .as_ref()
            .map(|d| d.dual.labels.clone())
            .unwrap_or_default(),
    }
}

fn dynamic_json(s: &InteractionStructure, v: &DynamicVerdict, report: &CriterionReport) -> Value {
    let pair = |w: Option<(ElementId, ElementId)>| w.map(|(a, b)| json!([s.name_of(a), s.name_of(b)]));
    let carrier_map = match &v.carrier_map {
        Induced::Computed(m) => {
            let c = &report.carrier.as_ref().expect("computed maps need a carrier").carrier;
            json!({ "status": "computed", "map": names(c, m.iter().copied()) })
        }
        Induced::Failed((a, b)) => json!({ "status": "failed", "witness": [s.name_of(*a), s.name_of(*b)] }),
        Induced::Unavailable(why) => json!({ "status": "unavailable", "reason": why }),
    };
    let dual_map = match &v.dual_map {
        Induced::Computed(m) => {
            let labels = &report
                .carrier
                .as_ref()
                .expect("computed maps need a carrier")
                .dual
                .labels;
            json!({ "status": "computed", "map": m.iter().map(|&l| labels[l].clone()).collect::<Vec<_>>() })
        }
        Induced::Failed(l) => {
            let labels = &report
                .carrier
                .as_ref()
                .expect("failed dual maps need a carrier")
                .dual
                .labels;
            json!({ "status": "failed", "label": labels[*l] })
        }
        Induced::Unavailable(why) => json!({ "status": "unavailable", "reason": why }),
    };
    json!({
        "name": v.name,
        "verdict": verdict(v.passed()),
        "bijective": v.bijective,
        "homomorphism_witness": pair(v.homomorphism_witness),
        "defect_witness": pair(v.defect_witness),
        "defect_note": v.defect_note,
        "filtration_witness": v.filtration_witness.map(|(k, p)| json!({ "level": k, "element": s.name_of(p) })),
        "carrier_map": carrier_map,
        "dual_map": dual_map,
    })
}

fn criterion_json(bundle: &InputBundle, r: &CriterionReport) -> Value {
    let s = &bundle.structure;
    let d = &r.duality;
    let level_structure = match (d.level, &r.carrier) {
        (EvaluationLevel::Carrier, Some(pc)) => &pc.carrier,
        _ => s,
    };
    let labels = label_names(r, bundle);
    let duality = json!({
        "verdict": verdict(d.passed),
        "evaluated_on": match d.level {
            EvaluationLevel::Carrier => "carrier",
            EvaluationLevel::Observables => "observables",
        },
        "reason": d.reason,
        "labels": d.label_count,
        "multiplicativity_witness": d.multiplicativity.map(|w| json!({
            "a": s.name_of(w.a),
            "b": s.name_of(w.b),
            "label": labels.get(w.label).cloned().unwrap_or_else(|| w.label.to_string()),
        })),
        "second_argument_multiplicative": d.second_argument.is_none(),
        "invisible_elements": d.nondegeneracy.as_ref().map(|n| names(level_structure, n.left.iter().copied())),
        "blind_labels": d.nondegeneracy.as_ref().map(|n| n.right.iter().map(|&l| labels.get(l).cloned().unwrap_or_default()).collect::<Vec<_>>()),
        "collision": d.collision.map(|(a, b)| json!([level_structure.name_of(a), level_structure.name_of(b)])),
        "quotient_failure": d.quotient_failure.as_ref().map(ToString::to_string),
    });
    let symmetry = json!({
        "verdict": verdict(r.symmetry_passed()),
        "note": if r.symmetry.is_empty() { Some("vacuous (no declared dynamics)") } else { None },
        "dynamics": r.symmetry.iter().map(|v| dynamic_json(s, v, r)).collect::<Vec<_>>(),
    });
    let termination = match &r.termination {
        TerminationVerdict::Pass { depth } => json!({ "verdict": "pass", "depth": depth }),
        TerminationVerdict::Fail { stable, excluded } => json!({
            "verdict": "fail",
            "stable": names(s, stable.iter().copied()),
            "excluded": s.name_of(*excluded),
        }),
    };
    json!({
        "structure": r.structure_name,
        "interpretation": INTERPRETATION,
        "dual_mode": r.dual_mode.to_string(),
        "filtration_mode": r.filtration_mode.to_string(),
        "associative": r.associative,
        "overall": verdict(r.overall),
        "duality": duality,
        "symmetry": symmetry,
        "termination": termination,
        "filtration": filtration_json(s, &r.filtration),
    })
}

fn phase_json(p: &PhaseObject) -> Value {
    let c = p.structure();
    let labels = &p.dual().labels;
    let mut classes = Map::new();
    for q in c.ids() {
        let members: Vec<String> = p
            .source
            .ids()
            .filter(|&a| p.carrier.project(a) == q)
            .map(|a| p.source.name_of(a).to_string())
            .collect();
        classes.insert(c.name_of(q).to_string(), json!(members));
    }
    let mut degrees = Map::new();
    for q in c.ids() {
        degrees.insert(c.name_of(q).to_string(), json!(p.degrees.get(q)));
    }
    json!({
        "dual_mode": p.dual_mode.to_string(),
        "carrier": names(c, c.ids()),
        "classes": classes,
        "dual": labels,
        "pairing": p.pairing().rows().iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "filtration": filtration_json(c, &p.filtration),
        "depth": p.filtration.depth(),
        "degrees": degrees,
        "dynamics": p.dynamics.iter().map(|g| json!({
            "name": g.name,
            "carrier_map": names(c, g.carrier_map.iter().copied()),
            "dual_map": g.dual_map.iter().map(|&l| labels[l].clone()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "log": p.log.iter().map(|s| json!({ "step": s.step, "title": s.title, "detail": s.detail })).collect::<Vec<_>>(),
    })
}

fn forced_json(p: &PhaseObject, f: &ForcedStructureReport) -> Value {
    let c = p.structure();
    let labels = &p.dual().labels;
    let label = |l: usize| labels[l].clone();
    json!({
        "all_pass": f.all_passed(),
        "bullets": f.bullets.iter().map(|b| json!({
            "key": b.key,
            "title": b.title,
            "status": b.status,
            "evidence": b.evidence,
        })).collect::<Vec<_>>(),
        "component_dimensions": f.component_dimensions.as_ref().map(|dims| {
            dims.iter().enumerate().map(|(l, d)| (label(l), json!(d))).collect::<Map<_, _>>()
        }),
        "transports": f.transports.iter().map(|t| json!({
            "dynamic": t.dynamic,
            "transport": t.transport.iter().enumerate().map(|(l, x)| (label(l), json!(x.map(label)))).collect::<Map<_, _>>(),
        })).collect::<Vec<_>>(),
        "census": f.census,
        "core": names(c, f.core.iter().copied()),
        "islands": f.islands.as_ref().map(|is| is.iter().map(|i| json!({
            "elements": names(c, i.elements.iter().copied()),
            "internal_depth": i.internal_depth,
            "internally_covered": i.internally_covered,
            "maximal": i.maximal,
        })).collect::<Vec<_>>()),
    })
}

/// The JSON document with top-level keys `criterion`, `witnesses`,
/// `phase_object` and `forced_structure`.
pub fn report_json(bundle: &InputBundle, report: &FullReport) -> Value {
    json!({
        "criterion": criterion_json(bundle, &report.criterion),
        "witnesses": report.witnesses,
        "phase_object": report.phase.as_ref().map(phase_json),
        "forced_structure": match (&report.phase, &report.forced) {
            (Some(p), Some(f)) => forced_json(p, f),
            _ => Value::Null,
        },
    })
}

pub fn report_json_string(bundle: &InputBundle, report: &FullReport) -> String {
    let mut text = serde_json::to_string_pretty(&report_json(bundle, report)).expect("values always serialize");
    text.push('\n');
    text
}

/// Text rendering of the criterion verdicts and any witnesses.
pub fn criterion_text(bundle: &InputBundle, r: &CriterionReport, witnesses: &[ObstructionWitness]) -> String {
    let s = &bundle.structure;
    let mut out = String::new();
    let mut line = |t: String| {
        out.push_str(&t);
        out.push('\n');
    };
    line(format!(
        "structure {} ({} elements, {})",
        r.structure_name,
        s.size(),
        if r.associative {
            "associative"
        } else {
            "not associative"
        }
    ));
    line(format!("interpretation: {INTERPRETATION}"));
    line(format!("modes: {} dual, {} filtration", r.dual_mode, r.filtration_mode));
    line(String::new());

    let d = &r.duality;
    let mut detail = match &d.reason {
        Some(reason) => reason.clone(),
        None => format!(
            "{} label(s), evaluated on the {}",
            d.label_count,
            match d.level {
                EvaluationLevel::Carrier => "phase carrier",
                EvaluationLevel::Observables => "observables",
            }
        ),
    };
    if d.second_argument.is_some() {
        detail.push_str("; not multiplicative in the label argument (informational)");
    }
    line(format!("{} duality: {detail}", marker(d.passed)));

    if r.symmetry.is_empty() {
        line(format!("{} symmetry: vacuous (no declared dynamics)", marker(true)));
    } else {
        line(format!(
            "{} symmetry: {} dynamic(s)",
            marker(r.symmetry_passed()),
            r.symmetry.len()
        ));
        for v in &r.symmetry {
            let mut notes = Vec::new();
            if !v.bijective {
                notes.push("not bijective".to_string());
            }
            if let Some(n) = v.defect_note {
                notes.push(n.to_string());
            }
            if let Induced::Unavailable(why) = v.carrier_map {
                notes.push(format!("carrier map unavailable: {why}"));
            }
            let suffix = if notes.is_empty() {
                String::new()
            } else {
                format!(" ({})", notes.join("; "))
            };
            line(format!("    {} {}{suffix}", marker(v.passed()), v.name));
        }
    }

    match &r.termination {
        TerminationVerdict::Pass { depth } => line(format!("{} termination: depth {depth}", marker(true))),
        TerminationVerdict::Fail { stable, excluded } => line(format!(
            "{} termination: stalls at {} excluding {}",
            marker(false),
            braces(&names(s, stable.iter().copied())),
            s.name_of(*excluded)
        )),
    }
    line(format!(
        "    levels: {}",
        r.filtration
            .levels
            .iter()
            .map(|l| braces(&names(s, l.iter().copied())))
            .collect::<Vec<_>>()
            .join(" ⊆ ")
    ));
    line(format!("overall: {}", if r.overall { "PASS" } else { "FAIL" }));

    if !witnesses.is_empty() {
        line(String::new());
        line("witnesses:".into());
        for w in witnesses {
            line(format!("  [{}] {}", w.condition, w.summary));
            line(format!("    replay: {}", w.replay));
        }
    }
    out
}

pub fn phase_text(p: &PhaseObject) -> String {
    let c = p.structure();
    let mut out = String::new();
    let mut line = |t: String| {
        out.push_str(&t);
        out.push('\n');
    };
    line(format!(
        "phase object: {} carrier element(s), {} label(s), depth {}",
        c.size(),
        p.dual().len(),
        p.filtration.depth()
    ));
    for step in &p.log {
        line(format!("  step {} {}: {}", step.step, step.title, step.detail));
    }
    let by_degree = |k: usize| -> Vec<String> {
        c.ids()
            .filter(|&q| p.degrees.get(q) == Some(k))
            .map(|q| c.name_of(q).to_string())
            .collect()
    };
    for k in 0..=p.filtration.depth() {
        line(format!("  degree {k}: {}", braces(&by_degree(k))));
    }
    for g in &p.dynamics {
        line(format!(
            "  {}: carrier ({}) dual ({})",
            g.name,
            names(c, g.carrier_map.iter().copied()).join(" "),
            g.dual_map
                .iter()
                .map(|&l| p.dual().labels[l].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    out
}

pub fn forced_text(f: &ForcedStructureReport) -> String {
    let mut out = String::from("forced structure:\n");
    for b in &f.bullets {
        out.push_str(&format!("  [{}] {}\n", b.status, b.title));
        for e in &b.evidence {
            out.push_str(&format!("      {e}\n"));
        }
    }
    out
}

pub fn report_text(bundle: &InputBundle, report: &FullReport) -> String {
    let mut out = criterion_text(bundle, &report.criterion, &report.witnesses);
    if let Some(p) = &report.phase {
        out.push('\n');
        out.push_str(&phase_text(p));
    }
    if let Some(f) = &report.forced {
        out.push('\n');
        out.push_str(&forced_text(f));
    }
    out
}
