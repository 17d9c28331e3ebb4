//! Phase-algebra idempotents and the decomposition of carrier modules into
//! phase-response components.

use std::sync::Arc;

use thiserror::Error;

use crate::duality::{multiplicativity_witness, nondegeneracy_check, Pairing};
use crate::phase::{embed_angle, rat, CycloMatrix, CyclotomicField, CyclotomicScalar, PhaseError};
use crate::structure::{ElementId, InteractionStructure};

/// A matrix representation of a carrier over `ℚ(ζ_m)`, with optional
/// matrices for named dynamics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleRep {
    pub dimension: usize,
    pub field: Arc<CyclotomicField>,
    pub matrices: Vec<CycloMatrix>,
    pub actions: Vec<(String, CycloMatrix)>,
}

impl ModuleRep {
    pub fn matrix(&self, p: ElementId) -> &CycloMatrix {
        &self.matrices[p.0]
    }

    pub fn action(&self, name: &str) -> Option<&CycloMatrix> {
        self.actions.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn conductor(&self) -> u64 {
        self.field.conductor()
    }
}

/// Left translation: `π(p)` sends basis vector `q` to `p∘q`.
pub fn regular_representation(carrier: &InteractionStructure, field: &Arc<CyclotomicField>) -> ModuleRep {
    let n = carrier.size();
    let matrices = carrier
        .ids()
        .map(|p| CycloMatrix::from_column_images(field, n, |q| carrier.compose(p, ElementId(q)).0))
        .collect();
    ModuleRep {
        dimension: n,
        field: field.clone(),
        matrices,
        actions: Vec::new(),
    }
}

/// The permutation matrix of a carrier self-map in the regular
/// representation.
pub fn regular_action(map: &[ElementId], field: &Arc<CyclotomicField>) -> CycloMatrix {
    CycloMatrix::from_column_images(field, map.len(), |q| map[q].0)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleWitness {
    #[error("module has {found} matrices for a carrier of size {expected}")]
    MatrixCount { expected: usize, found: usize },
    #[error("matrix for {0} is not square of the module dimension")]
    Shape(String),
    #[error("identity {0} does not act as the identity matrix")]
    NotIdentity(String),
    #[error("π({0}∘{1}) ≠ π({0})·π({1})")]
    NotMultiplicative(String, String),
    #[error("matrix for {0} uses a different conductor")]
    Conductor(String),
}

/// Exhaustive check of the module axioms; the witness is the first failure
/// in canonical order.
pub fn validate_module(carrier: &InteractionStructure, rep: &ModuleRep) -> Result<(), ModuleWitness> {
    if rep.matrices.len() != carrier.size() {
        return Err(ModuleWitness::MatrixCount {
            expected: carrier.size(),
            found: rep.matrices.len(),
        });
    }
    let named = |p: ElementId| carrier.name_of(p).to_string();
    for p in carrier.ids() {
        let m = rep.matrix(p);
        if m.rows() != rep.dimension || m.cols() != rep.dimension {
            return Err(ModuleWitness::Shape(named(p)));
        }
        if m.field().conductor() != rep.conductor() {
            return Err(ModuleWitness::Conductor(named(p)));
        }
    }
    if let Some(e) = carrier.identity {
        if *rep.matrix(e) != CycloMatrix::identity(&rep.field, rep.dimension) {
            return Err(ModuleWitness::NotIdentity(named(e)));
        }
    }
    for p in carrier.ids() {
        for q in carrier.ids() {
            let product = rep.matrix(p).mul(rep.matrix(q)).expect("shapes checked");
            if *rep.matrix(carrier.compose(p, q)) != product {
                return Err(ModuleWitness::NotMultiplicative(named(p), named(q)));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("invalid module: {0}")]
    ModuleInvalid(#[from] ModuleWitness),
    #[error("pairing cannot separate phase components: {0}")]
    DegeneratePairing(String),
    #[error("module declares no matrix action for dynamic '{0}'")]
    MissingDynamicMatrix(String),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

/// `e_χ = |P|⁻¹ Σ_p ⟨p,χ⟩⁻¹ p` as coefficient vectors, one per label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Idempotents {
    pub coefficients: Vec<Vec<CyclotomicScalar>>,
}

pub fn idempotents(
    carrier: &InteractionStructure,
    pairing: &Pairing,
    field: &Arc<CyclotomicField>,
) -> Result<Idempotents, DecompositionError> {
    if let Some(w) = multiplicativity_witness(carrier, pairing) {
        return Err(DecompositionError::DegeneratePairing(format!(
            "not multiplicative at ({}, {}, label {})",
            carrier.name_of(w.a),
            carrier.name_of(w.b),
            w.label
        )));
    }
    let nd = nondegeneracy_check(carrier, pairing);
    if !nd.holds() {
        return Err(DecompositionError::DegeneratePairing(format!(
            "{} invisible elements, {} blind labels",
            nd.left.len(),
            nd.right.len()
        )));
    }
    let weight = rat(1, carrier.size() as i64);
    let coefficients = (0..pairing.label_count())
        .map(|label| {
            carrier
                .ids()
                .map(|p| Ok(embed_angle(-pairing.get(p, label), field)?.scale(&weight)))
                .collect::<Result<Vec<_>, PhaseError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(Idempotents { coefficients })
}

/// `E_χ = Σ_p c_{χ,p} π(p)` for every label.
pub fn projectors(idem: &Idempotents, rep: &ModuleRep) -> Vec<CycloMatrix> {
    idem.coefficients
        .iter()
        .map(|coeffs| {
            coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).fold(
                CycloMatrix::zeros(&rep.field, rep.dimension, rep.dimension),
                |acc, (p, c)| acc.add(&rep.matrices[p].scale(c)).expect("uniform shapes"),
            )
        })
        .collect()
}

/// Outcome of checking `E_χ² = E_χ`, `E_χE_{χ′} = 0` and `ΣE_χ = I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionCheck {
    pub not_idempotent: Option<usize>,
    pub not_orthogonal: Option<(usize, usize)>,
    pub sums_to_identity: bool,
}

impl ResolutionCheck {
    pub fn holds(&self) -> bool {
        self.not_idempotent.is_none() && self.not_orthogonal.is_none() && self.sums_to_identity
    }
}

pub fn verify_resolution(
    projectors: &[CycloMatrix],
    field: &Arc<CyclotomicField>,
    dimension: usize,
) -> ResolutionCheck {
    let mut not_idempotent = None;
    let mut not_orthogonal = None;
    for (x, ex) in projectors.iter().enumerate() {
        for (y, ey) in projectors.iter().enumerate() {
            let product = ex.mul(ey).expect("uniform shapes");
            if x == y {
                if not_idempotent.is_none() && product != *ex {
                    not_idempotent = Some(x);
                }
            } else if not_orthogonal.is_none() && !product.is_zero() {
                not_orthogonal = Some((x, y));
            }
        }
    }
    let sum = projectors
        .iter()
        .fold(CycloMatrix::zeros(field, dimension, dimension), |acc, e| {
            acc.add(e).expect("uniform shapes")
        });
    ResolutionCheck {
        not_idempotent,
        not_orthogonal,
        sums_to_identity: sum == CycloMatrix::identity(field, dimension),
    }
}

/// A full decomposition with its verification record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub idempotents: Idempotents,
    pub projectors: Vec<CycloMatrix>,
    /// Echelon basis of each `V_χ`, in label order.
    pub bases: Vec<Vec<Vec<CyclotomicScalar>>>,
    pub resolution: ResolutionCheck,
    /// First `(label, element)` where a basis vector fails to be an
    /// eigenvector with the label's eigenvalue.
    pub eigen_failure: Option<(usize, ElementId)>,
    pub dimension: usize,
}

impl Decomposition {
    pub fn dimensions(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    pub fn verified(&self) -> bool {
        self.resolution.holds()
            && self.eigen_failure.is_none()
            && self.dimensions().iter().sum::<usize>() == self.dimension
    }
}

pub fn decompose_module(
    carrier: &InteractionStructure,
    pairing: &Pairing,
    rep: &ModuleRep,
) -> Result<Decomposition, DecompositionError> {
    validate_module(carrier, rep)?;
    let idem = idempotents(carrier, pairing, &rep.field)?;
    let projectors = projectors(&idem, rep);
    let resolution = verify_resolution(&projectors, &rep.field, rep.dimension);
    let bases: Vec<Vec<Vec<CyclotomicScalar>>> = projectors.iter().map(CycloMatrix::column_space_basis).collect();

    let mut eigen_failure = None;
    'labels: for (label, basis) in bases.iter().enumerate() {
        for p in carrier.ids() {
            let eigenvalue = embed_angle(pairing.get(p, label), &rep.field)?;
            for v in basis {
                let image = rep.matrix(p).apply(v)?;
                let expected: Vec<CyclotomicScalar> = v.iter().map(|x| &eigenvalue * x).collect();
                let fixed = projectors[label].apply(v)? == *v;
                if image != expected || !fixed {
                    eigen_failure = Some((label, p));
                    break 'labels;
                }
            }
        }
    }

    Ok(Decomposition {
        idempotents: idem,
        projectors,
        bases,
        resolution,
        eigen_failure,
        dimension: rep.dimension,
    })
}

/// Where each label's component is carried by a dynamic, and the first
/// label whose nonzero component is not carried onto a label `χ′` with
/// `ĝ(χ′) = χ`, tested by `G·E_χ = E_{χ′}·G·E_χ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub transport: Vec<Option<usize>>,
    pub failure: Option<usize>,
}

/// Tries the labels `χ′` with `ĝ(χ′) = χ` first, then every other label, so
/// the transport records where a component actually goes even when it
/// disagrees with the dual action.
pub fn dynamics_factorization(
    projectors: &[CycloMatrix],
    dual_map: &[usize],
    action: &CycloMatrix,
) -> Result<Factorization, DecompositionError> {
    let mut transport = Vec::with_capacity(projectors.len());
    let mut failure = None;
    for (label, e) in projectors.iter().enumerate() {
        let ge = action.mul(e)?;
        let is_preimage = |c: usize| dual_map.get(c) == Some(&label);
        let preimages = (0..projectors.len()).filter(|&c| is_preimage(c));
        let others = (0..projectors.len()).filter(|&c| !is_preimage(c));
        let mut found = None;
        for candidate in preimages.chain(others) {
            if projectors[candidate].mul(&ge)? == ge {
                found = Some(candidate);
                break;
            }
        }
        let carried = match found {
            Some(c) => ge.is_zero() || is_preimage(c),
            None => false,
        };
        if !carried && failure.is_none() {
            failure = Some(label);
        }
        transport.push(found);
    }
    Ok(Factorization { transport, failure })
}
