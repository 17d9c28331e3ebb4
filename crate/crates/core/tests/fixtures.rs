//! Keeps `fixtures/` in step with the builders. Run with
//! `UPDATE_FIXTURES=1` to rewrite the files.

mod common;

use phase_criterion::format::{parse_module, parse_structure, serialize_module, serialize_structure};

#[test]
fn fixtures_match_builders() {
    let dir = common::fixtures_dir();
    let update = std::env::var_os("UPDATE_FIXTURES").is_some();
    for (name, contents) in common::expected_fixtures() {
        let path = dir.join(&name);
        if update {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, &contents).unwrap();
        } else {
            assert_eq!(common::read_fixture(&name), contents, "{name} is stale");
        }
    }
}

#[test]
fn structure_fixtures_round_trip() {
    for entry in std::fs::read_dir(common::fixtures_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("structure") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let bundle = parse_structure(&text).unwrap();
        assert_eq!(serialize_structure(&bundle), text, "{}", path.display());
    }
}

#[test]
fn module_fixture_round_trips() {
    let bundle = common::load_structure("q8.structure");
    let text = common::read_fixture("q8-2dim.module");
    let module = parse_module(&text, &bundle.structure).unwrap();
    assert_eq!(module, common::q8_two_dim_module());
    assert_eq!(serialize_module(&module, &bundle.structure), text);
}
