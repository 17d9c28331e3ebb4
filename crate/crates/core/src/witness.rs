//! Obstruction witnesses and their replay.
//!
//! A replay assertion is one or more clauses joined by ` && `. Each clause is
//! a kind followed by `key=value` pairs, for example
//! `not-homomorphic dynamic=g a=1 b=1` or
//! `stalls mode=ascending stable={e} excluded=(12)`. Replay re-evaluates
//! every clause against the input tables with direct loops that share no
//! code with the checks that produced the witness.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::criterion::{Condition, CriterionReport, DualMode, InputBundle};
use crate::duality::{canonical_dual, Pairing};
use crate::filtration::{FiltrationMode, TerminationVerdict};
use crate::phase::Angle;
use crate::structure::{ElementId, ElementSet, InteractionStructure};
use crate::symmetry::Induced;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionWitness {
    pub condition: Condition,
    pub summary: String,
    pub replay: String,
}

/// `{a,b,c}` in canonical order.
pub fn set_literal(s: &InteractionStructure, set: &ElementSet) -> String {
    let names: Vec<&str> = set.iter().map(|&p| s.name_of(p)).collect();
    format!("{{{}}}", names.join(","))
}

pub(crate) fn witnesses_for(bundle: &InputBundle, report: &CriterionReport) -> Vec<ObstructionWitness> {
    let s = &bundle.structure;
    let n = |p: ElementId| s.name_of(p).to_string();
    let mut out = Vec::new();

    if !report.duality.passed {
        let d = &report.duality;
        let label_name = |l: usize| -> String {
            bundle
                .declared
                .as_ref()
                .and_then(|dd| dd.dual.labels.get(l).cloned())
                .unwrap_or_else(|| l.to_string())
        };
        let mut clauses = Vec::new();
        let mut summary = Vec::new();
        if let Some(reason) = &d.reason {
            clauses.push("not-group-like".to_string());
            summary.push(reason.clone());
        } else if let Some(w) = d.multiplicativity {
            clauses.push(format!(
                "not-multiplicative a={} b={} label={}",
                n(w.a),
                n(w.b),
                label_name(w.label)
            ));
            summary.push(format!(
                "pairing is not multiplicative: ⟨{}⋆{}, {}⟩ ≠ ⟨{},{}⟩ + ⟨{},{}⟩",
                n(w.a),
                n(w.b),
                label_name(w.label),
                n(w.a),
                label_name(w.label),
                n(w.b),
                label_name(w.label)
            ));
        } else {
            if let Some(nd) = &d.nondegeneracy {
                for &p in &nd.left {
                    clauses.push(format!("invisible p={}", n(p)));
                    summary.push(format!("{} is invisible to every label", n(p)));
                }
                for &l in &nd.right {
                    clauses.push(format!("blind label={}", label_name(l)));
                    summary.push(format!("label {} vanishes on every element", label_name(l)));
                }
            }
            if let Some((a, b)) = d.collision {
                clauses.push(format!("collide a={} b={}", n(a), n(b)));
                summary.push(format!("{} and {} share a response profile", n(a), n(b)));
            }
            if let Some(q) = &d.quotient_failure {
                clauses.push(format!(
                    "ill-defined-quotient op={} a={} a2={} b={} b2={}",
                    q.operation, q.a, q.a_prime, q.b, q.b_prime
                ));
                summary.push(q.to_string());
            }
        }
        out.push(ObstructionWitness {
            condition: Condition::Duality,
            summary: summary.join("; "),
            replay: clauses.join(" && "),
        });
    }

    if let Some(v) = report.symmetry.iter().find(|v| !v.passed()) {
        let g = &v.name;
        let map = &s.dynamic(g).expect("verdicts follow declared dynamics").map;
        let (summary, replay) = if let Some((a, b)) = v.homomorphism_witness {
            (
                format!(
                    "dynamic {g} does not normalise the interaction: {g}({}⋆{}) = {} but {g}({})⋆{g}({}) = {}",
                    n(a),
                    n(b),
                    n(map[s.compose(a, b).0]),
                    n(a),
                    n(b),
                    n(s.compose(map[a.0], map[b.0]))
                ),
                format!("not-homomorphic dynamic={g} a={} b={}", n(a), n(b)),
            )
        } else if let Some((a, b)) = v.defect_witness {
            (
                format!("dynamic {g} does not preserve the defect of ({}, {})", n(a), n(b)),
                format!("defect-not-preserved dynamic={g} a={} b={}", n(a), n(b)),
            )
        } else if let Some((k, p)) = v.filtration_witness {
            (
                format!("dynamic {g} moves {} out of filtration level {k}", n(p)),
                format!(
                    "filtration-not-preserved dynamic={g} mode={} level={k} p={}",
                    report.filtration_mode,
                    n(p)
                ),
            )
        } else if let Induced::Failed((a, b)) = v.carrier_map {
            (
                format!(
                    "dynamic {g} does not descend to the phase carrier: {} ∼ {} but their images differ",
                    n(a),
                    n(b)
                ),
                format!(
                    "induced-ill-defined dynamic={g} dual={} a={} b={}",
                    report.dual_mode,
                    n(a),
                    n(b)
                ),
            )
        } else if let Induced::Failed(label) = v.dual_map {
            let name = report
                .carrier
                .as_ref()
                .and_then(|pc| pc.dual.labels.get(label).cloned())
                .unwrap_or_else(|| label.to_string());
            (
                format!("dual is not stable under {g}: {name}∘{g} is not a label"),
                format!("dual-not-stable dynamic={g} dual={} label={name}", report.dual_mode),
            )
        } else {
            unreachable!("a failing verdict carries a witness")
        };
        out.push(ObstructionWitness {
            condition: Condition::Symmetry,
            summary,
            replay,
        });
    }

    if let TerminationVerdict::Fail { stable, excluded } = &report.termination {
        out.push(ObstructionWitness {
            condition: Condition::Termination,
            summary: format!(
                "filtration stalls at {} without reaching {}",
                set_literal(s, stable),
                n(*excluded)
            ),
            replay: format!(
                "stalls mode={} stable={} excluded={}",
                report.filtration_mode,
                set_literal(s, stable),
                n(*excluded)
            ),
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayOutcome {
    /// Every clause re-evaluates to the asserted failure.
    Confirmed,
    /// Some clause does not hold against the input.
    Refuted(String),
    Malformed(String),
}

impl fmt::Display for ReplayOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayOutcome::Confirmed => write!(f, "confirmed"),
            ReplayOutcome::Refuted(why) => write!(f, "refuted: {why}"),
            ReplayOutcome::Malformed(why) => write!(f, "malformed: {why}"),
        }
    }
}

/// Direct table evaluation, deliberately independent of the structure's
/// own helpers.
struct Direct<'a> {
    s: &'a InteractionStructure,
}

impl Direct<'_> {
    fn n(&self) -> usize {
        self.s.elements.len()
    }

    fn op(&self, a: usize, b: usize) -> usize {
        self.s.op[a * self.n() + b].0
    }

    fn identity(&self) -> Option<usize> {
        self.s.identity.map(|e| e.0)
    }

    fn inverse(&self, a: usize) -> Option<usize> {
        let e = self.identity()?;
        (0..self.n()).find(|&b| self.op(a, b) == e && self.op(b, a) == e)
    }

    fn defect(&self, a: usize, b: usize) -> Option<usize> {
        if let Some(t) = &self.s.defect_table {
            return Some(t[a * self.n() + b].0);
        }
        self.s.inverses.as_ref()?;
        let ab = self.op(a, b);
        let ba = self.op(b, a);
        Some(self.op(ab, self.inverse(ba)?))
    }

    fn group_like(&self) -> bool {
        let n = self.n();
        let Some(e) = self.identity() else { return false };
        if self.s.inverses.is_none() {
            return false;
        }
        (0..n).all(|a| self.op(e, a) == a && self.op(a, e) == a && self.inverse(a).is_some())
            && (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| self.op(self.op(a, b), c) == self.op(a, self.op(b, c)))))
    }

    fn levels(&self, mode: FiltrationMode) -> Option<Vec<Vec<bool>>> {
        let n = self.n();
        let e = self.identity()?;
        let mut defects = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                defects[a * n + b] = self.defect(a, b)?;
            }
        }
        let d = |a: usize, b: usize| defects[a * n + b];
        let mut level: Vec<bool> = (0..n).map(|p| (0..n).all(|q| d(p, q) == e)).collect();
        let mut levels = vec![level.clone()];
        loop {
            let mut next = level.clone();
            match mode {
                FiltrationMode::Ascending => {
                    for p in 0..n {
                        if (0..n).all(|q| level[d(p, q)]) {
                            next[p] = true;
                        }
                    }
                }
                FiltrationMode::Literal => {
                    for p in (0..n).filter(|&p| level[p]) {
                        for q in 0..n {
                            next[d(p, q)] = true;
                        }
                    }
                    next[e] = true;
                    let mut grew = true;
                    while grew {
                        grew = false;
                        for a in 0..n {
                            for b in 0..n {
                                if next[a] && next[b] {
                                    for c in [self.op(a, b), d(a, b)] {
                                        if !next[c] {
                                            next[c] = true;
                                            grew = true;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            if next == level {
                return Some(levels);
            }
            levels.push(next.clone());
            level = next;
        }
    }
}

type Args<'t> = BTreeMap<&'t str, &'t str>;

fn parse_clause(clause: &str) -> Result<(&str, Args<'_>), String> {
    let mut parts = clause.split_whitespace();
    let kind = parts.next().ok_or("empty clause")?;
    let mut args = BTreeMap::new();
    for part in parts {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, found '{part}'"))?;
        if args.insert(k, v).is_some() {
            return Err(format!("duplicate key '{k}'"));
        }
    }
    Ok((kind, args))
}

struct Clause<'a, 't> {
    bundle: &'a InputBundle,
    args: Args<'t>,
}

impl<'a, 't> Clause<'a, 't> {
    fn s(&self) -> &'a InteractionStructure {
        &self.bundle.structure
    }

    fn raw(&self, key: &str) -> Result<&'t str, String> {
        self.args
            .get(key)
            .copied()
            .ok_or_else(|| format!("missing key '{key}'"))
    }

    fn element(&self, key: &str) -> Result<usize, String> {
        let token = self.raw(key)?;
        self.s()
            .find(token)
            .map(|e| e.0)
            .ok_or_else(|| format!("unknown element '{token}'"))
    }

    fn set(&self, key: &str) -> Result<Vec<bool>, String> {
        let text = self.raw(key)?;
        let inner = text
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| format!("malformed set '{text}'"))?;
        let mut member = vec![false; self.s().size()];
        for token in inner.split(',').filter(|t| !t.is_empty()) {
            let p = self
                .s()
                .find(token)
                .ok_or_else(|| format!("unknown element '{token}'"))?;
            member[p.0] = true;
        }
        Ok(member)
    }

    fn dynamic(&self) -> Result<&'a [ElementId], String> {
        let name = self.raw("dynamic")?;
        self.s()
            .dynamic(name)
            .map(|d| d.map.as_slice())
            .ok_or_else(|| format!("unknown dynamic '{name}'"))
    }

    fn mode(&self) -> Result<FiltrationMode, String> {
        self.raw("mode")?.parse()
    }

    /// Pairing table and labels selected by the optional `dual` key.
    fn pairing(&self) -> Result<(Vec<String>, Pairing), String> {
        let mode: DualMode = match self.args.get("dual") {
            Some(m) => m.parse()?,
            None => DualMode::Declared,
        };
        match mode {
            DualMode::Declared => self
                .bundle
                .declared
                .as_ref()
                .map(|d| (d.dual.labels.clone(), d.pairing.clone()))
                .ok_or_else(|| "input declares no dual".to_string()),
            DualMode::Canonical => canonical_dual(self.s())
                .map(|cd| (cd.dual.labels, cd.pairing))
                .map_err(|e| e.to_string()),
        }
    }

    fn label(&self, labels: &[String]) -> Result<usize, String> {
        let name = self.raw("label")?;
        labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| format!("unknown label '{name}'"))
    }
}

fn row(p: &Pairing, a: usize) -> &[Angle] {
    &p.rows()[a]
}

fn column(p: &Pairing, l: usize) -> Vec<Angle> {
    p.rows().iter().map(|r| r[l]).collect()
}

/// `Ok(true)` when the clause's failure holds, `Ok(false)` when it does not,
/// `Err` when the clause cannot be interpreted.
fn evaluate(bundle: &InputBundle, kind: &str, args: Args<'_>) -> Result<bool, String> {
    let c = Clause { bundle, args };
    let d = Direct { s: c.s() };
    let n = d.n();
    match kind {
        "not-group-like" => Ok(!d.group_like()),
        "not-multiplicative" => {
            let (labels, p) = c.pairing()?;
            let (a, b, l) = (c.element("a")?, c.element("b")?, c.label(&labels)?);
            Ok(row(&p, d.op(a, b))[l] != row(&p, a)[l] + row(&p, b)[l])
        }
        "invisible" => {
            let (_, p) = c.pairing()?;
            let x = c.element("p")?;
            let zero = |a: usize| row(&p, a).iter().all(|v| v.is_zero());
            let neutral = d.identity().or_else(|| (0..n).find(|&a| zero(a)));
            Ok(zero(x) && Some(x) != neutral)
        }
        "blind" => {
            let (labels, p) = c.pairing()?;
            let l = c.label(&labels)?;
            let zero = |l: usize| column(&p, l).iter().all(|v| v.is_zero());
            Ok(zero(l) && (0..l).any(zero))
        }
        "collide" => {
            let (_, p) = c.pairing()?;
            let (a, b) = (c.element("a")?, c.element("b")?);
            Ok(a != b && Some(a) != d.identity() && Some(b) != d.identity() && row(&p, a) == row(&p, b))
        }
        "ill-defined-quotient" => {
            let (_, p) = c.pairing()?;
            let (a, a2, b, b2) = (c.element("a")?, c.element("a2")?, c.element("b")?, c.element("b2")?);
            let same = |x: usize, y: usize| row(&p, x) == row(&p, y);
            if !same(a, a2) || !same(b, b2) {
                return Ok(false);
            }
            let diverge = match c.raw("op")? {
                "composition" => !same(d.op(a, b), d.op(a2, b2)),
                "defect" => match (d.defect(a, b), d.defect(a2, b2)) {
                    (Some(x), Some(y)) => !same(x, y),
                    _ => false,
                },
                "inverse" => match (d.inverse(a), d.inverse(a2)) {
                    (Some(x), Some(y)) => !same(x, y),
                    _ => false,
                },
                other => return Err(format!("unknown operation '{other}'")),
            };
            Ok(diverge)
        }
        "not-homomorphic" => {
            let g = c.dynamic()?;
            let (a, b) = (c.element("a")?, c.element("b")?);
            Ok(g[d.op(a, b)].0 != d.op(g[a].0, g[b].0))
        }
        "defect-not-preserved" => {
            let g = c.dynamic()?;
            let (a, b) = (c.element("a")?, c.element("b")?);
            let lhs = d.defect(a, b).ok_or("no defect calculus")?;
            let rhs = d.defect(g[a].0, g[b].0).ok_or("no defect calculus")?;
            Ok(g[lhs].0 != rhs)
        }
        "filtration-not-preserved" => {
            let g = c.dynamic()?;
            let levels = d.levels(c.mode()?).ok_or("no defect calculus")?;
            let k: usize = c
                .raw("level")?
                .parse()
                .map_err(|_| "level is not an index".to_string())?;
            let x = c.element("p")?;
            let Some(level) = levels.get(k) else { return Ok(false) };
            Ok(level[x] && !level[g[x].0])
        }
        "induced-ill-defined" => {
            let g = c.dynamic()?;
            let (_, p) = c.pairing()?;
            let (a, b) = (c.element("a")?, c.element("b")?);
            Ok(row(&p, a) == row(&p, b) && row(&p, g[a].0) != row(&p, g[b].0))
        }
        "dual-not-stable" => {
            let g = c.dynamic()?;
            let (labels, p) = c.pairing()?;
            let l = c.label(&labels)?;
            let composite: Vec<Angle> = (0..n).map(|a| row(&p, g[a].0)[l]).collect();
            Ok((0..labels.len()).all(|m| column(&p, m) != composite))
        }
        "stalls" => {
            let levels = d.levels(c.mode()?).ok_or("no defect calculus")?;
            let stable = c.set("stable")?;
            let x = c.element("excluded")?;
            Ok(levels.last() == Some(&stable) && !stable[x])
        }
        other => Err(format!("unknown clause kind '{other}'")),
    }
}

/// Re-evaluates a replay assertion against the input.
pub fn replay(bundle: &InputBundle, assertion: &str) -> ReplayOutcome {
    if assertion.trim().is_empty() {
        return ReplayOutcome::Malformed("empty assertion".into());
    }
    for clause in assertion.split("&&") {
        let clause = clause.trim();
        let (kind, args) = match parse_clause(clause) {
            Ok(x) => x,
            Err(e) => return ReplayOutcome::Malformed(e),
        };
        match evaluate(bundle, kind, args) {
            Ok(true) => {}
            Ok(false) => return ReplayOutcome::Refuted(format!("'{clause}' does not hold")),
            Err(e) => return ReplayOutcome::Malformed(format!("'{clause}': {e}")),
        }
    }
    ReplayOutcome::Confirmed
}
