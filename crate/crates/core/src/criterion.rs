//! The three-condition applicability verdict, the phase-object construction
//! and its re-validation, and obstruction witnesses for failed conditions.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::duality::{
    canonical_dual, first_collision, label_product_witness, multiplicativity_witness, nondegeneracy_check,
    quotient_by_response, DualObject, DualityError, MultiplicativityWitness, Nondegeneracy, Pairing, PhaseCarrier,
    QuotientWitness,
};
use crate::filtration::{
    ascending_filtration, defect_degree, termination_check, DefectDegrees, DefectFiltration, FiltrationMode,
    TerminationVerdict,
};
use crate::rigidity::DEFAULT_ENUMERATION_BOUND;
use crate::structure::{ElementId, InteractionStructure, StructureError};
use crate::symmetry::{
    check_dynamic, defect_witness, filtration_witness, homomorphism_witness, DynamicVerdict, Induced,
};
use crate::witness::{set_literal, ObstructionWitness};

/// A structure together with the dual and pairing it declares, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputBundle {
    pub structure: InteractionStructure,
    pub declared: Option<DeclaredDual>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclaredDual {
    pub dual: DualObject,
    pub pairing: Pairing,
}

impl InputBundle {
    pub fn new(structure: InteractionStructure) -> Self {
        Self {
            structure,
            declared: None,
        }
    }

    pub fn with_dual(mut self, dual: DualObject, pairing: Pairing) -> Self {
        self.declared = Some(DeclaredDual { dual, pairing });
        self
    }
}

/// Where the dual comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DualMode {
    /// Characters of the abelianization, pulled back.
    Canonical,
    /// The `[dual]` and `[pairing]` sections of the input.
    Declared,
}

impl fmt::Display for DualMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DualMode::Canonical => "canonical",
            DualMode::Declared => "declared",
        })
    }
}

impl FromStr for DualMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "canonical" => Ok(DualMode::Canonical),
            "declared" => Ok(DualMode::Declared),
            other => Err(format!("unknown dual mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub filtration: FiltrationMode,
    /// `None` selects the declared dual when present, canonical otherwise.
    pub dual: Option<DualMode>,
    pub max_enumeration: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            filtration: FiltrationMode::Ascending,
            dual: None,
            max_enumeration: DEFAULT_ENUMERATION_BOUND,
        }
    }
}

impl Options {
    pub fn resolve_dual(&self, bundle: &InputBundle) -> DualMode {
        self.dual.unwrap_or(if bundle.declared.is_some() {
            DualMode::Declared
        } else {
            DualMode::Canonical
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Duality,
    Symmetry,
    Termination,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Duality => "duality",
            Condition::Symmetry => "symmetry",
            Condition::Termination => "termination",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriterionError {
    #[error("invalid structure: {}", .0.join("; "))]
    InvalidStructure(Vec<String>),
    #[error("declared dual mode requested but the input declares no dual")]
    NoDeclaredDual,
    #[error("pairing table does not match the element and label lists")]
    PairingShape,
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("criterion not met: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))]
    CriterionNotMet(Vec<Condition>),
    #[error("internal validation failure: {0}")]
    InternalValidationFailure(String),
    #[error("the criterion passed; there is nothing to report")]
    NothingToReport,
}

/// Which set of elements the duality conditions were evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvaluationLevel {
    Carrier,
    Observables,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityVerdict {
    pub passed: bool,
    pub reason: Option<String>,
    pub level: EvaluationLevel,
    pub label_count: usize,
    pub multiplicativity: Option<MultiplicativityWitness>,
    /// Informational: first label pair whose sum is not a label.
    pub second_argument: Option<(usize, usize)>,
    pub nondegeneracy: Option<Nondegeneracy>,
    pub collision: Option<(ElementId, ElementId)>,
    pub quotient_failure: Option<QuotientWitness>,
}

impl DualityVerdict {
    fn failed(reason: impl Into<String>, level: EvaluationLevel) -> Self {
        Self {
            passed: false,
            reason: Some(reason.into()),
            level,
            label_count: 0,
            multiplicativity: None,
            second_argument: None,
            nondegeneracy: None,
            collision: None,
            quotient_failure: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionReport {
    pub structure_name: String,
    pub dual_mode: DualMode,
    pub filtration_mode: FiltrationMode,
    pub associative: bool,
    pub duality: DualityVerdict,
    pub symmetry: Vec<DynamicVerdict>,
    pub termination: TerminationVerdict,
    /// Filtration of the input structure.
    pub filtration: DefectFiltration,
    pub carrier: Option<PhaseCarrier>,
    pub overall: bool,
}

impl CriterionReport {
    pub fn symmetry_passed(&self) -> bool {
        self.symmetry.iter().all(DynamicVerdict::passed)
    }

    pub fn failed_conditions(&self) -> Vec<Condition> {
        let mut out = Vec::new();
        if !self.duality.passed {
            out.push(Condition::Duality);
        }
        if !self.symmetry_passed() {
            out.push(Condition::Symmetry);
        }
        if !self.termination.passed() {
            out.push(Condition::Termination);
        }
        out
    }
}

fn evaluate_duality(
    s: &InteractionStructure,
    bundle: &InputBundle,
    mode: DualMode,
) -> Result<(DualityVerdict, Option<PhaseCarrier>), CriterionError> {
    match mode {
        DualMode::Canonical => {
            if !s.is_group_like() {
                return Ok((
                    DualityVerdict::failed("no canonical dual realizable", EvaluationLevel::Carrier),
                    None,
                ));
            }
            let cd = canonical_dual(s).map_err(duality_to_criterion)?;
            let pc = quotient_by_response(s, &cd.dual, &cd.pairing).map_err(duality_to_criterion)?;
            let nd = nondegeneracy_check(&pc.carrier, &pc.pairing);
            let verdict = DualityVerdict {
                passed: nd.holds(),
                reason: None,
                level: EvaluationLevel::Carrier,
                label_count: cd.dual.len(),
                multiplicativity: multiplicativity_witness(&pc.carrier, &pc.pairing),
                second_argument: label_product_witness(&pc.pairing),
                collision: first_collision(&pc.carrier, &pc.pairing),
                nondegeneracy: Some(nd),
                quotient_failure: None,
            };
            Ok((verdict, Some(pc)))
        }
        DualMode::Declared => {
            let declared = bundle.declared.as_ref().ok_or(CriterionError::NoDeclaredDual)?;
            let (dual, pairing) = (&declared.dual, &declared.pairing);
            if !pairing.fits(s, dual) {
                return Err(CriterionError::PairingShape);
            }
            let multiplicativity = multiplicativity_witness(s, pairing);
            let nd = nondegeneracy_check(s, pairing);
            let mut quotient_failure = None;
            let carrier = if multiplicativity.is_none() {
                match quotient_by_response(s, dual, pairing) {
                    Ok(pc) => Some(pc),
                    Err(DualityError::IllDefinedQuotient(w)) => {
                        quotient_failure = Some(w);
                        None
                    }
                    Err(e) => return Err(duality_to_criterion(e)),
                }
            } else {
                None
            };
            let verdict = DualityVerdict {
                passed: multiplicativity.is_none() && nd.holds() && quotient_failure.is_none(),
                reason: None,
                level: EvaluationLevel::Observables,
                label_count: dual.len(),
                multiplicativity,
                second_argument: label_product_witness(pairing),
                collision: first_collision(s, pairing),
                nondegeneracy: Some(nd),
                quotient_failure,
            };
            Ok((verdict, carrier))
        }
    }
}

fn duality_to_criterion(e: DualityError) -> CriterionError {
    match e {
        DualityError::Structure(s) => CriterionError::Structure(s),
        DualityError::PairingShape => CriterionError::PairingShape,
        other => CriterionError::InternalValidationFailure(other.to_string()),
    }
}

/// Evaluates duality, symmetry and termination; every condition is always
/// evaluated.
pub fn check_applicability(bundle: &InputBundle, options: &Options) -> Result<CriterionReport, CriterionError> {
    let s = &bundle.structure;
    let validation = s.validate();
    if !validation.is_valid() {
        return Err(CriterionError::InvalidStructure(validation.violations));
    }
    s.neutral_defect()?;
    let dual_mode = options.resolve_dual(bundle);
    let (duality, carrier) = evaluate_duality(s, bundle, dual_mode)?;
    let filtration = ascending_filtration(s, options.filtration)?;
    let symmetry = s
        .dynamics
        .iter()
        .map(|g| check_dynamic(s, g, &filtration, carrier.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    let termination = termination_check(&filtration, s);
    let overall = duality.passed && symmetry.iter().all(DynamicVerdict::passed) && termination.passed();
    Ok(CriterionReport {
        structure_name: s.name.clone(),
        dual_mode,
        filtration_mode: options.filtration,
        associative: validation.associative,
        duality,
        symmetry,
        termination,
        filtration,
        carrier,
        overall,
    })
}

/// A dynamic transported to the phase carrier and its dual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedDynamic {
    pub name: String,
    pub carrier_map: Vec<ElementId>,
    pub dual_map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionStep {
    pub step: usize,
    pub title: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseObject {
    pub source: InteractionStructure,
    pub dual_mode: DualMode,
    pub carrier: PhaseCarrier,
    pub filtration: DefectFiltration,
    pub degrees: DefectDegrees,
    pub dynamics: Vec<InducedDynamic>,
    pub log: Vec<ConstructionStep>,
}

impl PhaseObject {
    pub fn structure(&self) -> &InteractionStructure {
        &self.carrier.carrier
    }

    pub fn pairing(&self) -> &Pairing {
        &self.carrier.pairing
    }

    pub fn dual(&self) -> &DualObject {
        &self.carrier.dual
    }
}

/// Builds the phase object in five steps: quotient by response, filtration
/// on the carrier, defect degrees, induced dynamics, re-validation.
pub fn construct_phase_object(bundle: &InputBundle, options: &Options) -> Result<PhaseObject, CriterionError> {
    let report = check_applicability(bundle, options)?;
    if !report.overall {
        return Err(CriterionError::CriterionNotMet(report.failed_conditions()));
    }
    let s = &bundle.structure;
    let mut log = Vec::new();

    let carrier = report
        .carrier
        .clone()
        .ok_or_else(|| CriterionError::InternalValidationFailure("duality passed without a phase carrier".into()))?;
    log.push(ConstructionStep {
        step: 1,
        title: "quotient by response",
        detail: format!(
            "{} observables identified into {} carrier elements against {} labels",
            s.size(),
            carrier.carrier.size(),
            carrier.dual.len()
        ),
    });

    let filtration = ascending_filtration(&carrier.carrier, options.filtration)?;
    log.push(ConstructionStep {
        step: 2,
        title: "defect filtration",
        detail: format!(
            "{} mode, {} level(s), sizes {:?}",
            options.filtration,
            filtration.levels.len(),
            filtration.levels.iter().map(|l| l.len()).collect::<Vec<_>>()
        ),
    });

    let degrees = defect_degree(&filtration, carrier.carrier.size());
    log.push(ConstructionStep {
        step: 3,
        title: "defect degrees",
        detail: format!("depth {}", filtration.depth()),
    });

    let mut dynamics = Vec::new();
    for verdict in &report.symmetry {
        match (&verdict.carrier_map, &verdict.dual_map) {
            (Induced::Computed(m), Induced::Computed(d)) => dynamics.push(InducedDynamic {
                name: verdict.name.clone(),
                carrier_map: m.clone(),
                dual_map: d.clone(),
            }),
            _ => {
                return Err(CriterionError::InternalValidationFailure(format!(
                    "dynamic {} passed without induced maps",
                    verdict.name
                )))
            }
        }
    }
    log.push(ConstructionStep {
        step: 4,
        title: "induced dynamics",
        detail: format!("{} dynamic(s) transported to carrier and dual", dynamics.len()),
    });

    let object = PhaseObject {
        source: s.clone(),
        dual_mode: report.dual_mode,
        carrier,
        filtration,
        degrees,
        dynamics,
        log,
    };
    revalidate(&object).map_err(CriterionError::InternalValidationFailure)?;
    let mut object = object;
    object.log.push(ConstructionStep {
        step: 5,
        title: "re-validation",
        detail: "all phase-object invariants hold".into(),
    });
    Ok(object)
}

/// Re-checks every phase-object invariant from scratch.
pub fn revalidate(object: &PhaseObject) -> Result<(), String> {
    let s = &object.source;
    let pc = &object.carrier;
    let c = &pc.carrier;
    let mut hit = vec![false; c.size()];
    for a in s.ids() {
        hit[pc.project(a).0] = true;
        for b in s.ids() {
            if pc.project(s.compose(a, b)) != c.compose(pc.project(a), pc.project(b)) {
                return Err(format!(
                    "projection is not a homomorphism at ({}, {})",
                    s.name_of(a),
                    s.name_of(b)
                ));
            }
        }
    }
    if hit.contains(&false) {
        return Err("projection is not surjective".into());
    }
    if let Some(w) = multiplicativity_witness(c, &pc.pairing) {
        return Err(format!("carrier pairing not multiplicative at label {}", w.label));
    }
    if !nondegeneracy_check(c, &pc.pairing).holds() {
        return Err("carrier pairing is degenerate".into());
    }
    if !object.filtration.covers_carrier {
        return Err(format!(
            "carrier filtration stalls at {}",
            set_literal(c, object.filtration.stable_level())
        ));
    }
    if object.degrees.0.iter().any(Option::is_none) {
        return Err("defect degree undefined on the carrier".into());
    }
    for g in &object.dynamics {
        if let Some((a, b)) = homomorphism_witness(c, &g.carrier_map) {
            return Err(format!(
                "induced {} not homomorphic at ({}, {})",
                g.name,
                c.name_of(a),
                c.name_of(b)
            ));
        }
        if defect_witness(c, &g.carrier_map).map_err(|e| e.to_string())?.is_some() {
            return Err(format!("induced {} does not preserve defects", g.name));
        }
        if let Some((k, p)) = filtration_witness(&g.carrier_map, &object.filtration) {
            return Err(format!("induced {} moves {} out of level {k}", g.name, c.name_of(p)));
        }
        for p in c.ids() {
            if object.degrees.get(g.carrier_map[p.0]) != object.degrees.get(p) {
                return Err(format!("induced {} changes the degree of {}", g.name, c.name_of(p)));
            }
        }
        if g.dual_map.len() != pc.dual.len() {
            return Err(format!("induced dual map of {} has the wrong length", g.name));
        }
    }
    Ok(())
}

/// One witness per failed condition, each with a replay assertion.
pub fn obstruction_report(
    bundle: &InputBundle,
    report: &CriterionReport,
) -> Result<Vec<ObstructionWitness>, CriterionError> {
    if report.overall {
        return Err(CriterionError::NothingToReport);
    }
    Ok(crate::witness::witnesses_for(bundle, report))
}
