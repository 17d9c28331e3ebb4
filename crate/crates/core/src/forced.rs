//! The six-item report of structure forced by a constructed phase object:
//! decomposition, factorisation of dynamics, separation, equivalence
//! census, rigid core and rigidity islands.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::criterion::PhaseObject;
use crate::decomposition::{
    decompose_module, dynamics_factorization, regular_action, regular_representation, validate_module, Decomposition,
    DecompositionError, ModuleRep, ModuleWitness,
};
use crate::filtration::ascending_filtration;
use crate::phase::{conductor_for, CyclotomicField, PhaseError, MAX_CONDUCTOR};
use crate::rigidity::{equivalence_oracle, rigid_core, rigidity_islands, Island, RigidityError};
use crate::structure::{ElementId, InteractionStructure, StructureError};
use crate::symmetry::reconstruct_from_dual;
use crate::witness::set_literal;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForcedError {
    #[error(transparent)]
    Module(#[from] ModuleWitness),
    #[error("module is not constant on response classes: {a} and {b} identify but act differently")]
    NotConstantOnClasses { a: String, b: String },
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BulletStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for BulletStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BulletStatus::Pass => "PASS",
            BulletStatus::Fail => "FAIL",
            BulletStatus::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bullet {
    pub key: &'static str,
    pub title: &'static str,
    pub status: BulletStatus,
    pub evidence: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransportRecord {
    pub dynamic: String,
    /// Target label per label, `None` where no component receives it.
    pub transport: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusCounts {
    pub target: String,
    pub strategy: &'static str,
    pub total: usize,
    pub filtration_preserving: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForcedStructureReport {
    pub bullets: Vec<Bullet>,
    pub component_dimensions: Option<Vec<usize>>,
    pub transports: Vec<TransportRecord>,
    pub census: Option<CensusCounts>,
    pub core: Vec<ElementId>,
    pub islands: Option<Vec<Island>>,
}

impl ForcedStructureReport {
    pub fn all_passed(&self) -> bool {
        self.bullets.iter().all(|b| b.status == BulletStatus::Pass)
    }

    pub fn bullet(&self, key: &str) -> Option<&Bullet> {
        self.bullets.iter().find(|b| b.key == key)
    }
}

/// Transfers a module over the observables to the phase carrier through
/// class representatives, after checking it is constant on every class.
pub fn descend_module(phase: &PhaseObject, source_rep: &ModuleRep) -> Result<ModuleRep, ForcedError> {
    let source = &phase.source;
    validate_module(source, source_rep)?;
    let pc = &phase.carrier;
    let mut representative: Vec<Option<ElementId>> = vec![None; pc.carrier.size()];
    for a in source.ids() {
        let c = pc.project(a).0;
        match representative[c] {
            None => representative[c] = Some(a),
            Some(r) if source_rep.matrix(r) != source_rep.matrix(a) => {
                return Err(ForcedError::NotConstantOnClasses {
                    a: source.name_of(r).to_string(),
                    b: source.name_of(a).to_string(),
                })
            }
            Some(_) => {}
        }
    }
    let matrices = representative
        .iter()
        .map(|r| source_rep.matrix(r.expect("projection is surjective")).clone())
        .collect();
    Ok(ModuleRep {
        dimension: source_rep.dimension,
        field: source_rep.field.clone(),
        matrices,
        actions: source_rep.actions.clone(),
    })
}

fn label_name(phase: &PhaseObject, l: usize) -> &str {
    &phase.dual().labels[l]
}

type DecompositionBullet = (BulletStatus, Vec<String>, Option<Decomposition>);

fn decomposition_bullet(
    phase: &PhaseObject,
    rep: &ModuleRep,
    supplied: bool,
) -> Result<DecompositionBullet, ForcedError> {
    let carrier = phase.structure();
    let source_note = if supplied {
        format!("supplied module, dimension {}", rep.dimension)
    } else {
        format!("regular representation, dimension {}", rep.dimension)
    };
    let d = match decompose_module(carrier, phase.pairing(), rep) {
        Ok(d) => d,
        Err(DecompositionError::ModuleInvalid(w)) => return Err(w.into()),
        Err(DecompositionError::Phase(e)) => return Err(e.into()),
        Err(e) => return Ok((BulletStatus::Fail, vec![source_note, e.to_string()], None)),
    };
    let mut evidence = vec![source_note];
    evidence.push(format!(
        "components: {}",
        d.dimensions()
            .iter()
            .enumerate()
            .map(|(l, k)| format!("{}:{k}", label_name(phase, l)))
            .collect::<Vec<_>>()
            .join(" ")
    ));
    if let Some(l) = d.resolution.not_idempotent {
        evidence.push(format!("projector of {} is not idempotent", label_name(phase, l)));
    }
    if let Some((x, y)) = d.resolution.not_orthogonal {
        evidence.push(format!(
            "projectors of {} and {} are not orthogonal",
            label_name(phase, x),
            label_name(phase, y)
        ));
    }
    if !d.resolution.sums_to_identity {
        evidence.push("projectors do not sum to the identity".into());
    }
    if let Some((l, p)) = d.eigen_failure {
        evidence.push(format!(
            "{} does not act by {} on its component",
            carrier.name_of(p),
            label_name(phase, l)
        ));
    }
    let status = if d.verified() {
        evidence.push("E² = E, EE′ = 0 and ΣE = I hold exactly".into());
        BulletStatus::Pass
    } else {
        BulletStatus::Fail
    };
    Ok((status, evidence, Some(d)))
}

/// Builds the report over the phase carrier. `module` must already live on
/// the carrier (see [`descend_module`]); `other` is compared against the
/// carrier in the census, which otherwise compares the carrier with itself.
pub fn forced_structure_report(
    phase: &PhaseObject,
    module: Option<&ModuleRep>,
    other: Option<&InteractionStructure>,
    bound: usize,
) -> Result<ForcedStructureReport, ForcedError> {
    let carrier = phase.structure();
    let pairing = phase.pairing();
    let mut bullets = Vec::with_capacity(6);

    // Decomposition.
    let conductor = match module {
        Some(m) => m.conductor(),
        None => conductor_for(pairing.rows().iter().flatten().copied()),
    };
    let regular;
    let rep = match module {
        Some(m) => Some(m),
        None if conductor <= MAX_CONDUCTOR => {
            regular = regular_representation(carrier, &CyclotomicField::new(conductor));
            Some(&regular)
        }
        None => None,
    };
    let (status, evidence, decomposition) = match rep {
        None => (
            BulletStatus::Skipped,
            vec![format!(
                "conductor {conductor} exceeds the supported maximum {MAX_CONDUCTOR}"
            )],
            None,
        ),
        Some(rep) => decomposition_bullet(phase, rep, module.is_some())?,
    };
    bullets.push(Bullet {
        key: "decomposition",
        title: "phase-response decomposition",
        status,
        evidence,
    });

    // Factorisation of dynamics through the induced dual action.
    let mut transports = Vec::new();
    let (status, evidence) = if phase.dynamics.is_empty() {
        (BulletStatus::Pass, vec!["vacuous (no declared dynamics)".to_string()])
    } else if let Some(d) = &decomposition {
        let mut status = BulletStatus::Pass;
        let mut evidence = Vec::new();
        for g in &phase.dynamics {
            let action = match module {
                Some(m) => match m.action(&g.name) {
                    Some(a) => a.clone(),
                    None => {
                        if status == BulletStatus::Pass {
                            status = BulletStatus::Skipped;
                        }
                        evidence.push(format!(
                            "{}: {}",
                            g.name,
                            DecompositionError::MissingDynamicMatrix(g.name.clone())
                        ));
                        continue;
                    }
                },
                None => regular_action(&g.carrier_map, &rep.expect("a decomposition implies a module").field),
            };
            let f = match dynamics_factorization(&d.projectors, &g.dual_map, &action) {
                Ok(f) => f,
                Err(DecompositionError::Phase(e)) => return Err(e.into()),
                Err(e) => {
                    status = BulletStatus::Fail;
                    evidence.push(format!("{}: {e}", g.name));
                    continue;
                }
            };
            let arrows = f
                .transport
                .iter()
                .enumerate()
                .map(|(l, t)| match t {
                    Some(t) => format!("{}→{}", label_name(phase, l), label_name(phase, *t)),
                    None => format!("{}→?", label_name(phase, l)),
                })
                .collect::<Vec<_>>()
                .join(" ");
            evidence.push(format!("{}: {arrows}", g.name));
            if let Some(l) = f.failure {
                status = BulletStatus::Fail;
                evidence.push(format!(
                    "{}: component {} is not carried to a component",
                    g.name,
                    label_name(phase, l)
                ));
            }
            transports.push(TransportRecord {
                dynamic: g.name.clone(),
                transport: f.transport,
            });
        }
        (status, evidence)
    } else {
        (
            BulletStatus::Skipped,
            vec!["no verified decomposition to factor through".to_string()],
        )
    };
    bullets.push(Bullet {
        key: "factorization",
        title: "factorisation of dynamics through the dual action",
        status,
        evidence,
    });

    // Separation: each induced dynamic is recovered from its dual action.
    let mut status = BulletStatus::Pass;
    let mut evidence = Vec::new();
    if phase.dynamics.is_empty() {
        evidence.push("vacuous (no declared dynamics)".to_string());
    }
    for g in &phase.dynamics {
        match reconstruct_from_dual(carrier, pairing, &g.dual_map) {
            Some(m) if m == g.carrier_map => {
                evidence.push(format!("{}: recovered uniquely from its dual action", g.name))
            }
            Some(_) => {
                status = BulletStatus::Fail;
                evidence.push(format!("{}: dual action determines a different carrier map", g.name));
            }
            None => {
                status = BulletStatus::Fail;
                evidence.push(format!("{}: dual action determines no carrier map", g.name));
            }
        }
    }
    bullets.push(Bullet {
        key: "separation",
        title: "dynamics determined by their dual action",
        status,
        evidence,
    });

    // Equivalence census.
    let target = other.unwrap_or(carrier);
    let target_name = if other.is_some() {
        target.name.clone()
    } else {
        "self".to_string()
    };
    let target_filtration = other.map(|t| ascending_filtration(t, phase.filtration.mode));
    let (status, evidence, census) = match target_filtration {
        Some(Err(e)) => (
            BulletStatus::Skipped,
            vec![format!("{}: no filtration on comparison structure ({e})", target_name)],
            None,
        ),
        tf => {
            let ft = match &tf {
                Some(Ok(f)) => f,
                _ => &phase.filtration,
            };
            match equivalence_oracle(carrier, target, &phase.filtration, ft, bound) {
                Ok(c) => {
                    let counts = CensusCounts {
                        target: target_name.clone(),
                        strategy: c.strategy,
                        total: c.total(),
                        filtration_preserving: c.filtration_preserving_count(),
                    };
                    let mut evidence = vec![format!(
                        "against {target_name}: {} interaction-and-defect-preserving bijection(s), {} preserve the filtration ({})",
                        counts.total, counts.filtration_preserving, c.strategy
                    )];
                    for m in c.counterexamples().take(3) {
                        let images: Vec<&str> = m.iter().map(|&x| target.name_of(x)).collect();
                        evidence.push(format!("counterexample: ({})", images.join(" ")));
                    }
                    let status = if counts.total == counts.filtration_preserving {
                        BulletStatus::Pass
                    } else {
                        BulletStatus::Fail
                    };
                    (status, evidence, Some(counts))
                }
                Err(RigidityError::CarrierTooLarge { size, bound }) => (
                    BulletStatus::Skipped,
                    vec![format!("carrier of size {size} exceeds the enumeration bound {bound}")],
                    None,
                ),
                Err(RigidityError::Structure(e)) => return Err(e.into()),
            }
        }
    };
    bullets.push(Bullet {
        key: "census",
        title: "collapse of equivalence",
        status,
        evidence,
    });

    // Rigid core.
    let core = rigid_core(&phase.filtration, module);
    let mut status = BulletStatus::Pass;
    let mut evidence = vec![format!("core {}", set_literal(carrier, &core.elements))];
    if let Some(e) = carrier.identity {
        if !core.elements.contains(&e) {
            status = BulletStatus::Fail;
            evidence.push("core misses the identity".into());
        }
    }
    for g in &phase.dynamics {
        if let Some(&p) = core
            .elements
            .iter()
            .find(|p| !core.elements.contains(&g.carrier_map[p.0]))
        {
            status = BulletStatus::Fail;
            evidence.push(format!("{} moves {} out of the core", g.name, carrier.name_of(p)));
        }
    }
    if let Some(scalars) = &core.scalar_action {
        let names = |want: bool| -> Vec<&str> {
            scalars
                .iter()
                .filter(|(_, s)| *s == want)
                .map(|(p, _)| carrier.name_of(*p))
                .collect()
        };
        evidence.push(format!("acting as scalars: {{{}}}", names(true).join(",")));
        let rest = names(false);
        if !rest.is_empty() {
            evidence.push(format!("not scalar: {{{}}}", rest.join(",")));
        }
    }
    bullets.push(Bullet {
        key: "rigid_core",
        title: "rigid core",
        status,
        evidence,
    });

    // Rigidity islands.
    let (status, evidence, islands) = match rigidity_islands(carrier, phase.filtration.mode, bound) {
        Ok(islands) => {
            let mut status = BulletStatus::Pass;
            let mut evidence = Vec::new();
            if islands.is_empty() {
                evidence.push("no proper closed subphase".into());
            }
            for i in &islands {
                let closed = carrier.closure(&i.elements)? == i.elements;
                evidence.push(format!(
                    "{} internal depth {}{}",
                    set_literal(carrier, &i.elements),
                    i.internal_depth,
                    if i.internally_covered {
                        ""
                    } else {
                        ", not internally covered"
                    }
                ));
                if !closed || !i.maximal {
                    status = BulletStatus::Fail;
                    evidence.push(format!(
                        "{} is {}",
                        set_literal(carrier, &i.elements),
                        if closed { "not maximal" } else { "not closed" }
                    ));
                }
            }
            (status, evidence, Some(islands))
        }
        Err(RigidityError::CarrierTooLarge { size, bound }) => (
            BulletStatus::Skipped,
            vec![format!("carrier of size {size} exceeds the enumeration bound {bound}")],
            None,
        ),
        Err(RigidityError::Structure(e)) => return Err(e.into()),
    };
    bullets.push(Bullet {
        key: "islands",
        title: "rigidity islands",
        status,
        evidence,
    });

    Ok(ForcedStructureReport {
        bullets,
        component_dimensions: decomposition.map(|d| d.dimensions()),
        transports,
        census,
        core: core.elements.into_iter().collect(),
        islands,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::{construct_phase_object, InputBundle, Options};
    use crate::library;
    use crate::phase::{CycloMatrix, CyclotomicScalar};

    fn phase(s: InteractionStructure) -> PhaseObject {
        construct_phase_object(&InputBundle::new(s), &Options::default()).unwrap()
    }

    #[test]
    fn z4_all_pass() {
        let p = phase(library::cyclic_with_inversion(4));
        let r = forced_structure_report(&p, None, None, 24).unwrap();
        assert!(r.all_passed(), "{:#?}", r.bullets);
        assert_eq!(r.component_dimensions, Some(vec![1, 1, 1, 1]));
        assert_eq!(r.transports[0].transport, vec![Some(0), Some(3), Some(2), Some(1)]);
        assert_eq!(r.census.as_ref().unwrap().total, 2);
        let islands = r.islands.unwrap();
        assert_eq!(islands.len(), 1);
        assert_eq!(set_literal(p.structure(), &islands[0].elements), "{0,2}");
    }

    #[test]
    fn one_point_carrier() {
        let p = phase(library::trivial());
        let r = forced_structure_report(&p, None, None, 24).unwrap();
        assert!(r.all_passed());
        assert_eq!(r.islands, Some(vec![]));
    }

    #[test]
    fn q8_canonical_is_evaluated_on_v4() {
        let p = phase(library::quaternion_with_conjugation());
        assert_eq!(p.structure().size(), 4);
        let r = forced_structure_report(&p, None, None, 24).unwrap();
        assert!(r.all_passed(), "{:#?}", r.bullets);
        assert_eq!(r.core.len(), 4);
    }

    #[test]
    fn large_carrier_skips_enumeration() {
        let p = phase(library::cyclic(6));
        let r = forced_structure_report(&p, None, None, 4).unwrap();
        assert_eq!(r.bullet("census").unwrap().status, BulletStatus::Skipped);
        assert_eq!(r.bullet("islands").unwrap().status, BulletStatus::Skipped);
        assert_eq!(r.bullet("decomposition").unwrap().status, BulletStatus::Pass);
    }

    #[test]
    fn census_against_other() {
        let p = phase(library::cyclic(4));
        let r = forced_structure_report(&p, None, Some(&library::klein()), 24).unwrap();
        let c = r.census.clone().unwrap();
        assert_eq!((c.target.as_str(), c.total), ("V4", 0));
        assert_eq!(r.bullet("census").unwrap().status, BulletStatus::Pass);
    }

    fn z4_rotation_module(field: &std::sync::Arc<CyclotomicField>, with_action: bool) -> ModuleRep {
        let z = CyclotomicScalar::root_power(field, 1);
        let gen = CycloMatrix::from_rows(field, vec![vec![z]]).unwrap();
        let mut matrices = vec![CycloMatrix::identity(field, 1)];
        for _ in 1..4 {
            let next = matrices.last().unwrap().mul(&gen).unwrap();
            matrices.push(next);
        }
        let actions = if with_action {
            vec![("inv".to_string(), CycloMatrix::identity(field, 1))]
        } else {
            vec![]
        };
        ModuleRep {
            dimension: 1,
            field: field.clone(),
            matrices,
            actions,
        }
    }

    #[test]
    fn supplied_module() {
        let p = phase(library::cyclic_with_inversion(4));
        let field = CyclotomicField::new(4);
        let m = z4_rotation_module(&field, false);
        let r = forced_structure_report(&p, Some(&m), None, 24).unwrap();
        assert_eq!(r.component_dimensions, Some(vec![0, 1, 0, 0]));
        assert_eq!(r.bullet("decomposition").unwrap().status, BulletStatus::Pass);
        assert_eq!(r.bullet("factorization").unwrap().status, BulletStatus::Skipped);
        // The identity action does not intertwine inversion on a single character.
        let m = z4_rotation_module(&field, true);
        let r = forced_structure_report(&p, Some(&m), None, 24).unwrap();
        assert_eq!(r.bullet("factorization").unwrap().status, BulletStatus::Fail);
    }

    #[test]
    fn descent_checks_classes() {
        let q8 = library::quaternion();
        let p = phase(q8.clone());
        let field = CyclotomicField::new(1);
        let regular = regular_representation(&q8, &field);
        assert!(matches!(
            descend_module(&p, &regular),
            Err(ForcedError::NotConstantOnClasses { .. })
        ));
        let trivial = ModuleRep {
            dimension: 1,
            field: field.clone(),
            matrices: vec![CycloMatrix::identity(&field, 1); 8],
            actions: vec![],
        };
        let d = descend_module(&p, &trivial).unwrap();
        assert_eq!(d.matrices.len(), 4);
    }
}
