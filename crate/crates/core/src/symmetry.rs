//! Compatibility of declared dynamics with composition, defect and
//! filtration, and their induced actions on phase carriers and duals.

use crate::duality::{response_profile, Pairing, PhaseCarrier};
use crate::filtration::DefectFiltration;
use crate::phase::Angle;
use crate::structure::{Dynamic, ElementId, InteractionStructure, StructureError};

/// First pair with `g(a⋆b) ≠ g(a)⋆g(b)`.
pub fn homomorphism_witness(s: &InteractionStructure, map: &[ElementId]) -> Option<(ElementId, ElementId)> {
    s.ids()
        .flat_map(|a| s.ids().map(move |b| (a, b)))
        .find(|&(a, b)| map[s.compose(a, b).0] != s.compose(map[a.0], map[b.0]))
}

/// First pair with `g(defect(a,b)) ≠ defect(g(a), g(b))`.
pub fn defect_witness(
    s: &InteractionStructure,
    map: &[ElementId],
) -> Result<Option<(ElementId, ElementId)>, StructureError> {
    let mode = s.defect_mode()?;
    Ok(s.ids()
        .flat_map(|a| s.ids().map(move |b| (a, b)))
        .find(|&(a, b)| map[s.defect_fast(mode, a, b).0] != s.defect_fast(mode, map[a.0], map[b.0])))
}

/// First `(k, p)` with `p ∈ P_k` and `g(p) ∉ P_k`.
pub fn filtration_witness(map: &[ElementId], filtration: &DefectFiltration) -> Option<(usize, ElementId)> {
    filtration
        .levels
        .iter()
        .enumerate()
        .find_map(|(k, level)| level.iter().find(|p| !level.contains(&map[p.0])).map(|&p| (k, p)))
}

/// `g_#([a]) = [g(a)]`, or the first pair `a ∼ b` with `g(a) ≁ g(b)`.
pub fn induce_on_carrier(map: &[ElementId], pc: &PhaseCarrier) -> Result<Vec<ElementId>, (ElementId, ElementId)> {
    let k = pc.carrier.size();
    let mut induced: Vec<Option<(ElementId, ElementId)>> = vec![None; k];
    for (a, &class) in pc.projection.iter().enumerate() {
        let a = ElementId(a);
        let image = pc.project(map[a.0]);
        match induced[class.0] {
            None => induced[class.0] = Some((image, a)),
            Some((prev, first)) if prev != image => return Err((first, a)),
            _ => {}
        }
    }
    Ok(induced
        .into_iter()
        .map(|x| x.expect("projection is surjective").0)
        .collect())
}

/// For each label `χ`, the label whose column equals `χ∘g_#`; otherwise the
/// first label whose composite is missing.
pub fn induce_on_dual(carrier_map: &[ElementId], pairing: &Pairing) -> Result<Vec<usize>, usize> {
    let columns: Vec<Vec<Angle>> = (0..pairing.label_count()).map(|l| pairing.column(l)).collect();
    columns
        .iter()
        .enumerate()
        .map(|(label, column)| {
            let composite: Vec<Angle> = carrier_map.iter().map(|p| column[p.0]).collect();
            columns.iter().position(|c| *c == composite).ok_or(label)
        })
        .collect()
}

/// Recovers `g_#` from its dual action: `g_#(p)` is the unique `q` with
/// `⟨q,χ⟩ = ⟨p,ĝ(χ)⟩` for every label. `None` when some `p` has no or
/// several candidates.
pub fn reconstruct_from_dual(
    carrier: &InteractionStructure,
    pairing: &Pairing,
    dual_map: &[usize],
) -> Option<Vec<ElementId>> {
    carrier
        .ids()
        .map(|p| {
            let target: Vec<Angle> = dual_map.iter().map(|&l| pairing.get(p, l)).collect();
            let mut hits = carrier.ids().filter(|&q| response_profile(pairing, q).0 == target);
            match (hits.next(), hits.next()) {
                (Some(q), None) => Some(q),
                _ => None,
            }
        })
        .collect()
}

/// What happened when transporting a dynamic to the phase carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Induced<T, W> {
    Computed(T),
    Failed(W),
    Unavailable(&'static str),
}

impl<T, W> Induced<T, W> {
    pub fn computed(&self) -> Option<&T> {
        match self {
            Induced::Computed(t) => Some(t),
            _ => None,
        }
    }

    pub fn failed(&self) -> bool {
        matches!(self, Induced::Failed(_))
    }
}

/// All compatibility checks for one dynamic. Witness fields are `None`
/// exactly when the corresponding check passes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicVerdict {
    pub name: String,
    pub bijective: bool,
    pub homomorphism_witness: Option<(ElementId, ElementId)>,
    pub defect_witness: Option<(ElementId, ElementId)>,
    /// Set when defect preservation follows from the homomorphism property.
    pub defect_note: Option<&'static str>,
    pub filtration_witness: Option<(usize, ElementId)>,
    pub carrier_map: Induced<Vec<ElementId>, (ElementId, ElementId)>,
    pub dual_map: Induced<Vec<usize>, usize>,
}

impl DynamicVerdict {
    pub fn passed(&self) -> bool {
        self.homomorphism_witness.is_none()
            && self.defect_witness.is_none()
            && self.filtration_witness.is_none()
            && !self.carrier_map.failed()
            && !self.dual_map.failed()
    }
}

/// Runs every check for `g` against the source structure and its
/// filtration, then transports it to the phase carrier when one exists.
pub fn check_dynamic(
    s: &InteractionStructure,
    g: &Dynamic,
    filtration: &DefectFiltration,
    carrier: Option<&PhaseCarrier>,
) -> Result<DynamicVerdict, StructureError> {
    let homomorphism_witness = homomorphism_witness(s, &g.map);
    let defect_witness = defect_witness(s, &g.map)?;
    let defect_note = (homomorphism_witness.is_none() && s.defect_mode()? == crate::DefectMode::Commutator)
        .then_some("implied by the homomorphism property for commutator defects");
    let filtration_witness = filtration_witness(&g.map, filtration);

    let carrier_map = match carrier {
        None => Induced::Unavailable("no phase carrier"),
        Some(_) if homomorphism_witness.is_some() => Induced::Unavailable("dynamic is not homomorphic"),
        Some(pc) => match induce_on_carrier(&g.map, pc) {
            Ok(m) => Induced::Computed(m),
            Err(w) => Induced::Failed(w),
        },
    };
    let dual_map = match (carrier, carrier_map.computed()) {
        (Some(pc), Some(m)) => match induce_on_dual(m, &pc.pairing) {
            Ok(d) => Induced::Computed(d),
            Err(label) => Induced::Failed(label),
        },
        _ => Induced::Unavailable("no induced carrier map"),
    };

    Ok(DynamicVerdict {
        name: g.name.clone(),
        bijective: g.is_bijective(),
        homomorphism_witness,
        defect_witness,
        defect_note,
        filtration_witness,
        carrier_map,
        dual_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::{canonical_dual, character_group, quotient_by_response, DualObject};
    use crate::filtration::{ascending_filtration, defect_degree, FiltrationMode};
    use crate::library;

    fn ids(v: &[usize]) -> Vec<ElementId> {
        v.iter().map(|&i| ElementId(i)).collect()
    }

    fn z4_carrier() -> PhaseCarrier {
        let z4 = library::cyclic(4);
        let (dual, pairing) = character_group(&z4).unwrap();
        quotient_by_response(&z4, &dual, &pairing).unwrap()
    }

    #[test]
    fn homomorphism_examples() {
        let z4 = library::cyclic(4);
        assert_eq!(homomorphism_witness(&z4, &ids(&[0, 3, 2, 1])), None);
        assert_eq!(
            homomorphism_witness(&z4, &ids(&[0, 1, 1, 3])),
            Some((ElementId(1), ElementId(1)))
        );
        assert_eq!(homomorphism_witness(&z4, &ids(&[0, 1, 2, 3])), None);
    }

    #[test]
    fn defect_examples() {
        let q8 = library::quaternion_with_conjugation();
        let g = q8.dynamic("conj_i").unwrap();
        assert_eq!(defect_witness(&q8, &g.map).unwrap(), None);

        let mut z4 = library::cyclic(4);
        z4.defect_table = Some(vec![ElementId(1); 16]);
        assert_eq!(
            defect_witness(&z4, &ids(&[0, 3, 2, 1])).unwrap(),
            Some((ElementId(0), ElementId(0)))
        );
        assert_eq!(defect_witness(&z4, &ids(&[0, 1, 2, 3])).unwrap(), None);
    }

    #[test]
    fn filtration_examples() {
        let q8 = library::quaternion();
        let f = ascending_filtration(&q8, FiltrationMode::Ascending).unwrap();
        let mut corrupted: Vec<ElementId> = q8.ids().collect();
        corrupted[1] = q8.find("i").unwrap();
        assert_eq!(filtration_witness(&corrupted, &f), Some((0, q8.find("-1").unwrap())));

        let z4 = library::cyclic(4);
        let f = ascending_filtration(&z4, FiltrationMode::Ascending).unwrap();
        assert_eq!(filtration_witness(&ids(&[0, 3, 2, 1]), &f), None);
    }

    #[test]
    fn induced_maps() {
        let pc = z4_carrier();
        let inv = induce_on_carrier(&ids(&[0, 3, 2, 1]), &pc).unwrap();
        assert_eq!(inv, ids(&[0, 3, 2, 1]));
        assert_eq!(induce_on_dual(&inv, &pc.pairing).unwrap(), vec![0, 3, 2, 1]);
        let id = induce_on_carrier(&ids(&[0, 1, 2, 3]), &pc).unwrap();
        assert_eq!(induce_on_dual(&id, &pc.pairing).unwrap(), vec![0, 1, 2, 3]);

        let q8 = library::quaternion_with_conjugation();
        let cd = canonical_dual(&q8).unwrap();
        let pc = quotient_by_response(&q8, &cd.dual, &cd.pairing).unwrap();
        let m = induce_on_carrier(&q8.dynamics[0].map, &pc).unwrap();
        assert_eq!(m, pc.carrier.ids().collect::<Vec<_>>());
    }

    #[test]
    fn half_dual_is_not_stable() {
        let z4 = library::cyclic(4);
        let (_, pairing) = character_group(&z4).unwrap();
        let half = Pairing::new(pairing.rows().iter().map(|r| r[..2].to_vec()).collect());
        let dual = DualObject::new(vec!["χ0".into(), "χ1".into()]);
        let pc = quotient_by_response(&z4, &dual, &half).unwrap();
        let m = induce_on_carrier(&ids(&[0, 3, 2, 1]), &pc).unwrap();
        assert_eq!(induce_on_dual(&m, &pc.pairing), Err(1));
    }

    #[test]
    fn ill_defined_induced_map() {
        // the parity dual identifies 0~2 and 1~3; a map sending 0↦0, 2↦1 cannot descend
        let z4 = library::cyclic(4);
        let dual = DualObject::new(vec!["χ0".into(), "χ2".into()]);
        let pairing = Pairing::new((0..4).map(|j| vec![Angle::ZERO, Angle::new(j as i64, 2)]).collect());
        let pc = quotient_by_response(&z4, &dual, &pairing).unwrap();
        assert_eq!(
            induce_on_carrier(&ids(&[0, 1, 1, 3]), &pc),
            Err((ElementId(0), ElementId(2)))
        );
    }

    #[test]
    fn automorphisms_of_q8_preserve_filtration() {
        let q8 = library::quaternion();
        let f = ascending_filtration(&q8, FiltrationMode::Ascending).unwrap();
        let autos = crate::rigidity::equivalence_oracle(&q8, &q8, &f, &f, 24).unwrap();
        assert_eq!(autos.maps.len(), 24);
        for m in &autos.maps {
            assert_eq!(filtration_witness(m, &f), None);
            assert_eq!(defect_witness(&q8, m).unwrap(), None);
        }
    }

    #[test]
    fn functoriality_and_degree_preservation() {
        let z8 = library::cyclic(8);
        let (dual, pairing) = character_group(&z8).unwrap();
        let pc = quotient_by_response(&z8, &dual, &pairing).unwrap();
        let f = ascending_filtration(&pc.carrier, FiltrationMode::Ascending).unwrap();
        let deg = defect_degree(&f, 8);
        let maps: Vec<Vec<ElementId>> = [1usize, 3, 5, 7, 2]
            .iter()
            .map(|&k| (0..8).map(|x| ElementId(x * k % 8)).collect())
            .collect();
        for g in &maps {
            for h in &maps {
                let gh: Vec<ElementId> = (0..8).map(|x| g[h[x].0]).collect();
                let ig = induce_on_carrier(g, &pc).unwrap();
                let ih = induce_on_carrier(h, &pc).unwrap();
                let igh = induce_on_carrier(&gh, &pc).unwrap();
                let composed: Vec<ElementId> = ih.iter().map(|x| ig[x.0]).collect();
                assert_eq!(igh, composed);
            }
            let ig = induce_on_carrier(g, &pc).unwrap();
            for p in pc.carrier.ids() {
                assert_eq!(deg.get(ig[p.0]), deg.get(p));
            }
        }
    }

    #[test]
    fn separation_recovers_carrier_map() {
        let pc = z4_carrier();
        let m = induce_on_carrier(&ids(&[0, 3, 2, 1]), &pc).unwrap();
        let d = induce_on_dual(&m, &pc.pairing).unwrap();
        assert_eq!(reconstruct_from_dual(&pc.carrier, &pc.pairing, &d), Some(m));
    }

    #[test]
    fn verdict_for_bad_dynamic() {
        let z4 = library::cyclic(4);
        let f = ascending_filtration(&z4, FiltrationMode::Ascending).unwrap();
        let pc = z4_carrier();
        let g = Dynamic::new("g", ids(&[0, 1, 1, 3]));
        let v = check_dynamic(&z4, &g, &f, Some(&pc)).unwrap();
        assert!(!v.passed());
        assert!(!v.bijective);
        assert_eq!(v.homomorphism_witness, Some((ElementId(1), ElementId(1))));
        assert_eq!(v.carrier_map, Induced::Unavailable("dynamic is not homomorphic"));

        let inv = Dynamic::new("inv", ids(&[0, 3, 2, 1]));
        let v = check_dynamic(&z4, &inv, &f, Some(&pc)).unwrap();
        assert!(v.passed());
        assert_eq!(v.dual_map, Induced::Computed(vec![0, 3, 2, 1]));
        assert!(v.defect_note.is_some());
    }
}
