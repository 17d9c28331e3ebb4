//! Rigid cores, rigidity islands, and brute-force oracles for equivalence
//! collapse and representation rigidity.

use itertools::Itertools;
use thiserror::Error;

use crate::decomposition::ModuleRep;
use crate::filtration::{ascending_filtration, DefectFiltration, FiltrationMode};
use crate::structure::{ElementId, ElementSet, InteractionStructure, StructureError};

pub const DEFAULT_ENUMERATION_BOUND: usize = 24;

/// Carriers up to this size are searched by full permutation enumeration.
pub const FACTORIAL_BOUND: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RigidityError {
    #[error("carrier of size {size} exceeds the enumeration bound {bound}")]
    CarrierTooLarge { size: usize, bound: usize },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// `P₀` together with, when a module is supplied, which core elements act
/// as scalars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RigidCore {
    pub elements: ElementSet,
    pub scalar_action: Option<Vec<(ElementId, bool)>>,
}

pub fn rigid_core(filtration: &DefectFiltration, module: Option<&ModuleRep>) -> RigidCore {
    let elements = filtration.core().clone();
    let scalar_action = module.map(|m| {
        elements
            .iter()
            .map(|&p| (p, m.matrix(p).as_scalar().is_some()))
            .collect()
    });
    RigidCore {
        elements,
        scalar_action,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Island {
    pub elements: ElementSet,
    /// Stabilisation index of the filtration computed inside the island.
    pub internal_depth: usize,
    pub internally_covered: bool,
    /// No proper closed subset strictly contains the island.
    pub maximal: bool,
}

/// Maximal proper closures of singleton and pair seeds.
pub fn rigidity_islands(
    carrier: &InteractionStructure,
    mode: FiltrationMode,
    bound: usize,
) -> Result<Vec<Island>, RigidityError> {
    let n = carrier.size();
    if n > bound {
        return Err(RigidityError::CarrierTooLarge { size: n, bound });
    }
    let full = carrier.all();
    let mut found: Vec<ElementSet> = Vec::new();
    for a in carrier.ids() {
        for b in carrier.ids().filter(|&b| b >= a) {
            let c = carrier.closure(&[a, b].into_iter().collect())?;
            if c != full && !found.contains(&c) {
                found.push(c);
            }
        }
    }
    let mut maximal: Vec<ElementSet> = found
        .iter()
        .filter(|q| !found.iter().any(|r| r != *q && q.is_subset(r)))
        .cloned()
        .collect();
    maximal.sort();

    maximal
        .into_iter()
        .map(|elements| {
            let (sub, _) = carrier.restrict(&elements)?;
            let f = ascending_filtration(&sub, mode)?;
            let mut is_maximal = true;
            for x in carrier.ids().filter(|x| !elements.contains(x)) {
                let mut seed = elements.clone();
                seed.insert(x);
                if carrier.closure(&seed)? != full {
                    is_maximal = false;
                    break;
                }
            }
            Ok(Island {
                elements,
                internal_depth: f.depth(),
                internally_covered: f.covers_carrier,
                maximal: is_maximal,
            })
        })
        .collect()
}

/// Bijections preserving composition and defect, in lexicographic order of
/// their image tuples, each flagged by whether it carries every filtration
/// level onto the corresponding level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceCensus {
    pub maps: Vec<Vec<ElementId>>,
    pub preserves_filtration: Vec<bool>,
    pub strategy: &'static str,
}

impl EquivalenceCensus {
    pub fn total(&self) -> usize {
        self.maps.len()
    }

    pub fn filtration_preserving_count(&self) -> usize {
        self.preserves_filtration.iter().filter(|&&b| b).count()
    }

    pub fn counterexamples(&self) -> impl Iterator<Item = &Vec<ElementId>> {
        self.maps
            .iter()
            .zip(&self.preserves_filtration)
            .filter(|(_, &ok)| !ok)
            .map(|(m, _)| m)
    }
}

struct Matcher<'a> {
    s: &'a InteractionStructure,
    t: &'a InteractionStructure,
    s_defect: Vec<ElementId>,
    t_defect: Vec<ElementId>,
}

impl<'a> Matcher<'a> {
    fn new(s: &'a InteractionStructure, t: &'a InteractionStructure) -> Result<Self, StructureError> {
        let table = |x: &InteractionStructure| -> Result<Vec<ElementId>, StructureError> {
            let mut v = Vec::with_capacity(x.size() * x.size());
            for a in x.ids() {
                for b in x.ids() {
                    v.push(x.defect(a, b)?);
                }
            }
            Ok(v)
        };
        Ok(Self {
            s,
            t,
            s_defect: table(s)?,
            t_defect: table(t)?,
        })
    }

    fn defect_s(&self, a: ElementId, b: ElementId) -> ElementId {
        self.s_defect[a.0 * self.s.size() + b.0]
    }

    fn defect_t(&self, a: ElementId, b: ElementId) -> ElementId {
        self.t_defect[a.0 * self.t.size() + b.0]
    }

    fn preserves(&self, f: &[ElementId]) -> bool {
        self.s.ids().all(|a| {
            self.s.ids().all(|b| {
                f[self.s.compose(a, b).0] == self.t.compose(f[a.0], f[b.0])
                    && f[self.defect_s(a, b).0] == self.defect_t(f[a.0], f[b.0])
            })
        })
    }

    /// Extends a partial map by composition; `false` on a conflict or a
    /// collision of images.
    fn propagate(&self, partial: &mut [Option<ElementId>], used: &mut [bool]) -> bool {
        let n = self.s.size();
        let mut changed = true;
        while changed {
            changed = false;
            for a in 0..n {
                let Some(fa) = partial[a] else { continue };
                for b in 0..n {
                    let Some(fb) = partial[b] else { continue };
                    let ab = self.s.compose(ElementId(a), ElementId(b));
                    let target = self.t.compose(fa, fb);
                    match partial[ab.0] {
                        Some(x) if x != target => return false,
                        Some(_) => {}
                        None => {
                            if used[target.0] {
                                return false;
                            }
                            used[target.0] = true;
                            partial[ab.0] = Some(target);
                            changed = true;
                        }
                    }
                }
            }
        }
        true
    }

    fn backtrack(
        &self,
        generators: &[ElementId],
        partial: Vec<Option<ElementId>>,
        used: Vec<bool>,
        out: &mut Vec<Vec<ElementId>>,
    ) {
        let Some((&g, rest)) = generators.split_first() else {
            if let Some(total) = partial.iter().copied().collect::<Option<Vec<_>>>() {
                if self.preserves(&total) {
                    out.push(total);
                }
            }
            return;
        };
        if partial[g.0].is_some() {
            self.backtrack(rest, partial, used, out);
            return;
        }
        for image in self.t.ids().filter(|x| !used[x.0]) {
            let mut p = partial.clone();
            let mut u = used.clone();
            p[g.0] = Some(image);
            u[image.0] = true;
            if self.propagate(&mut p, &mut u) {
                self.backtrack(rest, p, u, out);
            }
        }
    }
}

/// Greedy generating set under composition: scan the carrier in order and
/// keep each element not yet generated.
pub fn generating_set(s: &InteractionStructure, candidates: impl IntoIterator<Item = ElementId>) -> Vec<ElementId> {
    let mut gens = Vec::new();
    let mut span = s.compose_closure(&ElementSet::new());
    for x in candidates {
        if !span.contains(&x) {
            gens.push(x);
            span = s.compose_closure(&gens.iter().copied().collect());
        }
    }
    gens
}

fn preserves_levels(f: &[ElementId], fs: &DefectFiltration, ft: &DefectFiltration) -> bool {
    let depth = fs.levels.len().max(ft.levels.len());
    (0..depth).all(|k| {
        let image: ElementSet = fs.level(k).iter().map(|p| f[p.0]).collect();
        &image == ft.level(k)
    })
}

/// Every bijection `s → t` preserving composition and defect, each checked
/// against the filtrations. Carriers up to [`FACTORIAL_BOUND`] are searched
/// over all permutations; larger ones by backtracking over generator images
/// up to `bound`.
pub fn equivalence_oracle(
    s: &InteractionStructure,
    t: &InteractionStructure,
    fs: &DefectFiltration,
    ft: &DefectFiltration,
    bound: usize,
) -> Result<EquivalenceCensus, RigidityError> {
    let n = s.size();
    for size in [n, t.size()] {
        if size > bound {
            return Err(RigidityError::CarrierTooLarge { size, bound });
        }
    }
    let matcher = Matcher::new(s, t)?;
    let (mut maps, strategy) = if n != t.size() {
        (Vec::new(), "size mismatch")
    } else if n <= FACTORIAL_BOUND {
        let maps = t.ids().permutations(n).filter(|f| matcher.preserves(f)).collect();
        (maps, "permutations")
    } else {
        let gens = generating_set(s, s.ids());
        let mut out = Vec::new();
        matcher.backtrack(&gens, vec![None; n], vec![false; n], &mut out);
        (out, "generator backtracking")
    };
    maps.sort();
    let preserves_filtration = maps.iter().map(|f| preserves_levels(f, fs, ft)).collect();
    Ok(EquivalenceCensus {
        maps,
        preserves_filtration,
        strategy,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepresentationRigidity {
    /// The representations agree on the generators and on the whole carrier.
    Agree,
    /// The representations already differ on a generator.
    HypothesisNotMet { element: ElementId },
    /// Agreement on generators without agreement everywhere.
    Violation { element: ElementId },
}

/// Generators chosen level by level through the filtration, then through
/// whatever lies outside the stable level.
pub fn level_generators(carrier: &InteractionStructure, filtration: &DefectFiltration) -> Vec<ElementId> {
    let order = filtration
        .levels
        .iter()
        .flat_map(|l| l.iter().copied())
        .chain(carrier.ids())
        .unique();
    generating_set(carrier, order)
}

pub fn representation_rigidity_oracle(
    carrier: &InteractionStructure,
    filtration: &DefectFiltration,
    rep1: &ModuleRep,
    rep2: &ModuleRep,
) -> RepresentationRigidity {
    let gens = level_generators(carrier, filtration);
    if let Some(&g) = gens.iter().find(|&&g| rep1.matrix(g) != rep2.matrix(g)) {
        return RepresentationRigidity::HypothesisNotMet { element: g };
    }
    match carrier.ids().find(|&p| rep1.matrix(p) != rep2.matrix(p)) {
        Some(element) => RepresentationRigidity::Violation { element },
        None => RepresentationRigidity::Agree,
    }
}
