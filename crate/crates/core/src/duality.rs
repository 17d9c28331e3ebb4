//! Phase duality: characters of finite abelian groups, declared pairings and
//! their verdicts, response profiles, and the quotient phase carrier.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::phase::Angle;
use crate::structure::{ElementId, ElementSet, InteractionStructure, StructureError};

/// Ordered list of dual labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualObject {
    pub labels: Vec<String>,
}

impl DualObject {
    pub fn new(labels: Vec<String>) -> Self {
        Self { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn find(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Angle-valued pairing table, one row per element and one column per label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    rows: Vec<Vec<Angle>>,
}

impl Pairing {
    pub fn new(rows: Vec<Vec<Angle>>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[Vec<Angle>] {
        &self.rows
    }

    #[inline]
    pub fn get(&self, a: ElementId, label: usize) -> Angle {
        self.rows[a.0][label]
    }

    pub fn element_count(&self) -> usize {
        self.rows.len()
    }

    pub fn label_count(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn column(&self, label: usize) -> Vec<Angle> {
        self.rows.iter().map(|r| r[label]).collect()
    }

    /// Whether the table is rectangular with one row per element and one
    /// column per label.
    pub fn fits(&self, s: &InteractionStructure, dual: &DualObject) -> bool {
        self.rows.len() == s.size() && self.rows.iter().all(|r| r.len() == dual.len())
    }
}

/// `Φ(a) = (⟨a,χ⟩)_χ` in label order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ResponseProfile(pub Vec<Angle>);

impl ResponseProfile {
    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|a| a.is_zero())
    }
}

impl fmt::Display for ResponseProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

pub fn response_profile(pairing: &Pairing, a: ElementId) -> ResponseProfile {
    ResponseProfile(pairing.rows[a.0].clone())
}

/// `a ∼ a′` and `b ∼ b′` but the composites land in different classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientWitness {
    pub operation: &'static str,
    pub a: String,
    pub a_prime: String,
    pub b: String,
    pub b_prime: String,
}

impl fmt::Display for QuotientWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} not well defined: {} ∼ {} and {} ∼ {} but results differ",
            self.operation, self.a, self.a_prime, self.b, self.b_prime
        )
    }
}

/// First triple with `⟨a⋆b,χ⟩ ≠ ⟨a,χ⟩ + ⟨b,χ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MultiplicativityWitness {
    pub a: ElementId,
    pub b: ElementId,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualityError {
    #[error("structure '{0}' is not group-like (needs associativity, identity and inverses)")]
    NotGroupLike(String),
    #[error("structure is not abelian: {0}⋆{1} ≠ {1}⋆{0}")]
    NotAbelian(String, String),
    #[error("ill-defined quotient: {0}")]
    IllDefinedQuotient(QuotientWitness),
    #[error("pairing is not multiplicative at ({}, {}, label {})", .0.a, .0.b, .0.label)]
    MultiplicativityRequired(MultiplicativityWitness),
    #[error("pairing table does not match the carrier and label list")]
    PairingShape,
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// A quotient structure with its projection and the least representative
/// of each class.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub structure: InteractionStructure,
    pub projection: Vec<ElementId>,
    pub representatives: Vec<ElementId>,
}

/// Quotient by the partition `class_of`, whose classes must be numbered
/// `0..k` in the intended output order. Every table is re-verified for
/// well-definedness.
pub(crate) fn quotient_by_classes(
    s: &InteractionStructure,
    class_of: &[usize],
    name: String,
) -> Result<Quotient, QuotientWitness> {
    let k = class_of.iter().copied().max().map_or(0, |m| m + 1);
    let mut reps = vec![None; k];
    for a in s.ids() {
        reps[class_of[a.0]].get_or_insert(a);
    }
    let reps: Vec<ElementId> = reps.into_iter().map(|r| r.expect("classes are contiguous")).collect();
    let cls = |x: ElementId| ElementId(class_of[x.0]);
    let witness = |operation, a: ElementId, a2: ElementId, b: ElementId, b2: ElementId| QuotientWitness {
        operation,
        a: s.name_of(a).to_string(),
        a_prime: s.name_of(a2).to_string(),
        b: s.name_of(b).to_string(),
        b_prime: s.name_of(b2).to_string(),
    };

    let induce = |operation: &'static str, f: &dyn Fn(ElementId, ElementId) -> ElementId| {
        let mut table: Vec<Option<(ElementId, ElementId, ElementId)>> = vec![None; k * k];
        for a in s.ids() {
            for b in s.ids() {
                let slot = &mut table[class_of[a.0] * k + class_of[b.0]];
                let c = cls(f(a, b));
                match slot {
                    None => *slot = Some((c, a, b)),
                    Some((prev, a0, b0)) if *prev != c => {
                        return Err(witness(operation, *a0, a, *b0, b));
                    }
                    _ => {}
                }
            }
        }
        Ok(table.into_iter().map(|x| x.unwrap().0).collect::<Vec<_>>())
    };

    let op = induce("composition", &|a, b| s.compose(a, b))?;
    let defect_table = match &s.defect_table {
        Some(t) => Some(induce("defect", &|a, b| t[a.0 * s.size() + b.0])?),
        None => None,
    };
    let inverses = match &s.inverses {
        Some(inv) => {
            let mut out: Vec<Option<(ElementId, ElementId)>> = vec![None; k];
            for a in s.ids() {
                let c = cls(inv[a.0]);
                match &out[class_of[a.0]] {
                    None => out[class_of[a.0]] = Some((c, a)),
                    Some((prev, a0)) if *prev != c => return Err(witness("inverse", *a0, a, *a0, a)),
                    _ => {}
                }
            }
            Some(out.into_iter().map(|x| x.unwrap().0).collect())
        }
        None => None,
    };

    let structure = InteractionStructure {
        name,
        elements: reps.iter().map(|&r| s.name_of(r).to_string()).collect(),
        op,
        identity: s.identity.map(cls),
        inverses,
        dynamics: Vec::new(),
        defect_table,
    };
    Ok(Quotient {
        structure,
        projection: s.ids().map(cls).collect(),
        representatives: reps,
    })
}

/// Numbers the classes of an equivalence given by a key function in order of
/// their least member.
fn classes_by_least_member<K: Ord + Clone>(s: &InteractionStructure, key: impl Fn(ElementId) -> K) -> Vec<usize> {
    let mut index: BTreeMap<K, usize> = BTreeMap::new();
    s.ids()
        .map(|a| {
            let next = index.len();
            *index.entry(key(a)).or_insert(next)
        })
        .collect()
}

fn require_group_like(s: &InteractionStructure) -> Result<(), DualityError> {
    if s.is_group_like() {
        Ok(())
    } else {
        Err(DualityError::NotGroupLike(s.name.clone()))
    }
}

/// Closure of all defects under composition and defect.
pub fn commutator_subgroup(s: &InteractionStructure) -> Result<ElementSet, DualityError> {
    require_group_like(s)?;
    let mut seed = ElementSet::new();
    for a in s.ids() {
        for b in s.ids() {
            seed.insert(s.defect(a, b)?);
        }
    }
    Ok(s.closure(&seed)?)
}

/// Left cosets of a subgroup, numbered by least representative.
fn coset_classes(s: &InteractionStructure, subgroup: &ElementSet) -> Vec<usize> {
    classes_by_least_member(s, |a| subgroup.iter().map(|&k| s.compose(a, k)).min().unwrap())
}

/// Quotient by the commutator subgroup.
pub fn abelianization(s: &InteractionStructure) -> Result<Quotient, DualityError> {
    let k = commutator_subgroup(s)?;
    quotient_by_classes(s, &coset_classes(s, &k), format!("{}^ab", s.name)).map_err(DualityError::IllDefinedQuotient)
}

/// Generators and orders of a decomposition of an abelian group into cyclic
/// factors: an element of maximal order is split off, the quotient is
/// decomposed recursively, and each quotient generator is lifted to an
/// element of the same order.
pub fn cyclic_decomposition(s: &InteractionStructure) -> Result<Vec<(ElementId, usize)>, DualityError> {
    require_group_like(s)?;
    if let Some((a, b)) = s.commutativity_witness() {
        return Err(DualityError::NotAbelian(s.name_of(a).into(), s.name_of(b).into()));
    }
    Ok(decompose_abelian(s))
}

fn decompose_abelian(s: &InteractionStructure) -> Vec<(ElementId, usize)> {
    if s.size() <= 1 {
        return Vec::new();
    }
    let (g, n) = s
        .ids()
        .map(|a| (a, s.order_of(a)))
        .fold(None::<(ElementId, usize)>, |best, (a, o)| match best {
            Some((_, bo)) if bo >= o => best,
            _ => Some((a, o)),
        })
        .unwrap();
    let powers: Vec<ElementId> = (0..n).map(|k| s.power(g, k)).collect();
    let cyclic: ElementSet = powers.iter().copied().collect();
    let q = quotient_by_classes(s, &coset_classes(s, &cyclic), format!("{}/<{}>", s.name, s.name_of(g)))
        .expect("subgroups of abelian groups are normal");
    let mut out = vec![(g, n)];
    for (qg, order) in decompose_abelian(&q.structure) {
        let h = q.representatives[qg.0];
        let landing = s.power(h, order);
        let exp = powers
            .iter()
            .position(|&p| p == landing)
            .expect("lands in the cyclic factor");
        debug_assert_eq!(exp % order, 0);
        let lifted = s.compose(h, s.power(g, (n - exp / order) % n));
        out.push((lifted, order));
    }
    out
}

/// All homomorphisms of a finite abelian group into `ℚ/ℤ`, labelled
/// `χ0..χ_{n−1}` with `χ0` trivial.
///
/// With cyclic factors `g_i` of order `n_i`, the label with mixed-radix
/// index `(r_0, r_1, …)` (first factor most significant) sends
/// `∏ g_i^{a_i}` to `Σ r_i a_i / n_i`.
pub fn character_group(s: &InteractionStructure) -> Result<(DualObject, Pairing), DualityError> {
    let factors = cyclic_decomposition(s)?;
    let orders: Vec<usize> = factors.iter().map(|&(_, o)| o).collect();
    let total: usize = orders.iter().product();
    debug_assert_eq!(total, s.size());

    let digits = |mut idx: usize| -> Vec<usize> {
        let mut d = vec![0; orders.len()];
        for i in (0..orders.len()).rev() {
            d[i] = idx % orders[i];
            idx /= orders[i];
        }
        d
    };

    let e = s.identity.unwrap();
    let mut coords: Vec<Option<Vec<usize>>> = vec![None; s.size()];
    for idx in 0..total {
        let a = digits(idx);
        let x = factors
            .iter()
            .zip(&a)
            .fold(e, |acc, (&(g, _), &k)| s.compose(acc, s.power(g, k)));
        coords[x.0] = Some(a);
    }
    let coords: Vec<Vec<usize>> = coords.into_iter().map(|c| c.expect("factors generate")).collect();

    let labels = (0..total).map(|i| format!("χ{i}")).collect();
    let rows = coords
        .iter()
        .map(|a| {
            (0..total)
                .map(|label| {
                    digits(label)
                        .iter()
                        .zip(a)
                        .zip(&orders)
                        .map(|((&r, &k), &n)| Angle::new((r * k) as i64, n as u64))
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok((DualObject::new(labels), Pairing::new(rows)))
}

/// The characters of the abelianization pulled back to the structure.
#[derive(Debug, Clone)]
pub struct CanonicalDual {
    pub dual: DualObject,
    pub pairing: Pairing,
    pub abelianization: Quotient,
    pub commutator_subgroup: ElementSet,
}

pub fn canonical_dual(s: &InteractionStructure) -> Result<CanonicalDual, DualityError> {
    let commutators = commutator_subgroup(s)?;
    let ab = abelianization(s)?;
    let (dual, on_quotient) = character_group(&ab.structure)?;
    let rows = s
        .ids()
        .map(|a| on_quotient.rows[ab.projection[a.0].0].clone())
        .collect();
    Ok(CanonicalDual {
        dual,
        pairing: Pairing::new(rows),
        abelianization: ab,
        commutator_subgroup: commutators,
    })
}

/// First failing triple `(a, b, χ)` of first-argument multiplicativity, in
/// canonical order.
pub fn multiplicativity_witness(s: &InteractionStructure, pairing: &Pairing) -> Option<MultiplicativityWitness> {
    for a in s.ids() {
        for b in s.ids() {
            let ab = s.compose(a, b);
            for label in 0..pairing.label_count() {
                if pairing.get(ab, label) != pairing.get(a, label) + pairing.get(b, label) {
                    return Some(MultiplicativityWitness { a, b, label });
                }
            }
        }
    }
    None
}

/// Informational second-argument check: the first pair of labels whose
/// pointwise sum is not itself a label column.
pub fn label_product_witness(pairing: &Pairing) -> Option<(usize, usize)> {
    let columns: Vec<Vec<Angle>> = (0..pairing.label_count()).map(|l| pairing.column(l)).collect();
    for x in 0..columns.len() {
        for y in 0..columns.len() {
            let sum: Vec<Angle> = columns[x].iter().zip(&columns[y]).map(|(&p, &q)| p + q).collect();
            if !columns.contains(&sum) {
                return Some((x, y));
            }
        }
    }
    None
}

/// Both directions of nondegeneracy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Nondegeneracy {
    /// Non-identity elements invisible to every label.
    pub left: Vec<ElementId>,
    /// Labels other than the first trivial one that vanish on every element.
    pub right: Vec<usize>,
}

impl Nondegeneracy {
    pub fn holds(&self) -> bool {
        self.left.is_empty() && self.right.is_empty()
    }
}

/// Without a declared identity the first element with trivial profile plays
/// the identity's role.
pub fn nondegeneracy_check(s: &InteractionStructure, pairing: &Pairing) -> Nondegeneracy {
    let invisible: Vec<ElementId> = s.ids().filter(|&a| response_profile(pairing, a).is_trivial()).collect();
    let neutral = s.identity.or_else(|| invisible.first().copied());
    let left = invisible.into_iter().filter(|&a| Some(a) != neutral).collect();
    let blind: Vec<usize> = (0..pairing.label_count())
        .filter(|&l| s.ids().all(|a| pairing.get(a, l).is_zero()))
        .collect();
    let right = blind.into_iter().skip(1).collect();
    Nondegeneracy { left, right }
}

/// First pair `a < b` of non-identity elements with identical profiles.
pub fn first_collision(s: &InteractionStructure, pairing: &Pairing) -> Option<(ElementId, ElementId)> {
    let mut seen: BTreeMap<ResponseProfile, ElementId> = BTreeMap::new();
    let mut best: Option<(ElementId, ElementId)> = None;
    for b in s.ids().filter(|&x| Some(x) != s.identity) {
        let p = response_profile(pairing, b);
        match seen.get(&p) {
            Some(&a) => {
                if best.is_none_or(|(ba, bb)| (a, b) < (ba, bb)) {
                    best = Some((a, b));
                }
            }
            None => {
                seen.insert(p, b);
            }
        }
    }
    best
}

/// The quotient of a structure by equality of response profiles, with the
/// pairing transported to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseCarrier {
    pub carrier: InteractionStructure,
    pub projection: Vec<ElementId>,
    pub source_name: String,
    pub dual: DualObject,
    pub pairing: Pairing,
}

impl PhaseCarrier {
    #[inline]
    pub fn project(&self, a: ElementId) -> ElementId {
        self.projection[a.0]
    }
}

/// Carrier elements are the distinct response profiles, ordered by profile
/// and named by their least source representative.
pub fn quotient_by_response(
    s: &InteractionStructure,
    dual: &DualObject,
    pairing: &Pairing,
) -> Result<PhaseCarrier, DualityError> {
    if !pairing.fits(s, dual) {
        return Err(DualityError::PairingShape);
    }
    if let Some(w) = multiplicativity_witness(s, pairing) {
        return Err(DualityError::MultiplicativityRequired(w));
    }
    let profiles: Vec<ResponseProfile> = s.ids().map(|a| response_profile(pairing, a)).collect();
    let distinct: Vec<&ResponseProfile> = {
        let mut v: Vec<&ResponseProfile> = profiles.iter().collect();
        v.sort();
        v.dedup();
        v
    };
    let class_of: Vec<usize> = profiles.iter().map(|p| distinct.binary_search(&p).unwrap()).collect();
    let q =
        quotient_by_classes(s, &class_of, format!("{}/response", s.name)).map_err(DualityError::IllDefinedQuotient)?;
    let carrier_rows = q.representatives.iter().map(|&r| pairing.rows[r.0].clone()).collect();
    Ok(PhaseCarrier {
        carrier: q.structure,
        projection: q.projection,
        source_name: s.name.clone(),
        dual: dual.clone(),
        pairing: Pairing::new(carrier_rows),
    })
}
