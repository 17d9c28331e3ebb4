//! Builders shared by the integration tests.

#![allow(dead_code)]

use std::path::PathBuf;

use phase_criterion::criterion::{InputBundle, Options};
use phase_criterion::decomposition::{regular_action, regular_representation, ModuleRep};
use phase_criterion::duality::{canonical_dual, character_group, DualObject, Pairing};
use phase_criterion::format::{parse_module, parse_structure, serialize_module, serialize_structure};
use phase_criterion::report::{build_report, forced_text};
use phase_criterion::{library, CycloMatrix, CyclotomicField, CyclotomicScalar, Dynamic, ElementId};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn read_fixture(name: &str) -> String {
    let path = fixtures_dir().join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn load_structure(name: &str) -> InputBundle {
    parse_structure(&read_fixture(name)).unwrap_or_else(|e| panic!("{name}: {e:?}"))
}

pub fn load_module(name: &str, bundle: &InputBundle) -> ModuleRep {
    parse_module(&read_fixture(name), &bundle.structure).unwrap_or_else(|e| panic!("{name}: {e:?}"))
}

/// `Z4` with a declared dynamic that is not a homomorphism.
pub fn z4_bad_dynamic() -> InputBundle {
    let map = [0, 1, 1, 3].map(ElementId).to_vec();
    InputBundle::new(library::cyclic(4).with_dynamic(Dynamic::new("g", map)))
}

/// `Q8` with conjugation by `i` and the abelianization characters declared.
pub fn q8_pulled_back() -> InputBundle {
    let q8 = library::quaternion_with_conjugation();
    let cd = canonical_dual(&q8).unwrap();
    InputBundle::new(q8).with_dual(cd.dual, cd.pairing)
}

/// `Z4` with inversion and only the first two characters declared.
pub fn z4_half_dual() -> InputBundle {
    let z4 = library::cyclic_with_inversion(4);
    let (dual, pairing) = character_group(&z4).unwrap();
    let rows = pairing.rows().iter().map(|r| r[..2].to_vec()).collect();
    InputBundle::new(z4).with_dual(DualObject::new(dual.labels[..2].to_vec()), Pairing::new(rows))
}

/// The faithful two-dimensional representation of `Q8` over `ℚ(i)`, with
/// conjugation by `i` acting through the image of `i`.
pub fn q8_two_dim_module() -> ModuleRep {
    let q8 = library::quaternion_with_conjugation();
    let field = CyclotomicField::new(4);
    let zero = CyclotomicScalar::zero(&field);
    let one = CyclotomicScalar::one(&field);
    let z = CyclotomicScalar::root_power(&field, 1);
    let i = CycloMatrix::from_rows(&field, vec![vec![z.clone(), zero.clone()], vec![zero.clone(), -&z]]).unwrap();
    let j = CycloMatrix::from_rows(&field, vec![vec![zero.clone(), one.clone()], vec![-&one, zero]]).unwrap();
    let minus = |m: &CycloMatrix| m.scale(&CyclotomicScalar::from_int(&field, -1));
    let k = i.mul(&j).unwrap();
    let id = CycloMatrix::identity(&field, 2);
    let by_name = [
        ("1", id.clone()),
        ("-1", minus(&id)),
        ("i", i.clone()),
        ("-i", minus(&i)),
        ("j", j.clone()),
        ("-j", minus(&j)),
        ("k", k.clone()),
        ("-k", minus(&k)),
    ];
    let matrices = q8
        .ids()
        .map(|p| by_name.iter().find(|(n, _)| *n == q8.name_of(p)).unwrap().1.clone())
        .collect();
    ModuleRep {
        dimension: 2,
        field: field.clone(),
        matrices,
        actions: vec![("conj_i".to_string(), i)],
    }
}

/// The regular representation of `Z4` over `ℚ(i)` with inversion acting by
/// permuting the basis.
pub fn z4_regular_module() -> ModuleRep {
    let z4 = library::cyclic_with_inversion(4);
    let field = CyclotomicField::new(4);
    let mut rep = regular_representation(&z4, &field);
    let inv = z4.dynamic("inv").unwrap();
    rep.actions.push(("inv".into(), regular_action(&inv.map, &field)));
    rep
}

/// Every fixture file with the contents the builders produce.
pub fn expected_fixtures() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = library::corpus()
        .into_iter()
        .map(|(stem, s)| (format!("{stem}.structure"), serialize_structure(&InputBundle::new(s))))
        .collect();
    out.push((
        "z4-bad-dynamic.structure".into(),
        serialize_structure(&z4_bad_dynamic()),
    ));
    out.push((
        "q8-pulled-back.structure".into(),
        serialize_structure(&q8_pulled_back()),
    ));
    out.push(("z4-half-dual.structure".into(), serialize_structure(&z4_half_dual())));
    let q8 = library::quaternion_with_conjugation();
    out.push(("q8-2dim.module".into(), serialize_module(&q8_two_dim_module(), &q8)));
    let z4 = InputBundle::new(library::cyclic_with_inversion(4));
    out.push((
        "z4-regular.module".into(),
        serialize_module(&z4_regular_module(), &z4.structure),
    ));
    let report = build_report(&z4, &Options::default(), None, None).unwrap();
    out.push(("z4-forced.txt".into(), forced_text(report.forced.as_ref().unwrap())));
    out
}
