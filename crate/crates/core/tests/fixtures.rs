//! Pins the fixture files shipped at `fixtures/` (repository root) to the
//! in-crate constructors: the files are the CLI-facing form of the same
//! models the unit tests use, so the two must never drift apart.

use std::fs;
use std::path::PathBuf;

use absorbd_core::fixtures;
use absorbd_core::format;
use absorbd_core::ModelSpec;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn all() -> Vec<(&'static str, ModelSpec)> {
    vec![
        ("twostate", fixtures::twostate()),
        ("selfloop", fixtures::selfloop()),
        ("cycle3", fixtures::cycle3()),
        ("onestep", fixtures::onestep()),
        ("eta_on_delta", fixtures::eta_on_delta()),
        ("unreachable_cycle", fixtures::unreachable_cycle()),
    ]
}

#[test]
fn shipped_fixture_files_match_the_constructors() {
    for (name, spec) in all() {
        let path = fixture_dir().join(format!("{name}.json"));
        let text =
            fs::read_to_string(&path).unwrap_or_else(|e| panic!("reading {path:?}: {e}"));
        let parsed = format::model_from_json(&text)
            .unwrap_or_else(|e| panic!("parsing {path:?}: {e}"));
        assert_eq!(parsed, spec, "fixture file {name} drifted from its constructor");
    }
}

#[test]
#[ignore = "writes fixtures/*.json from the constructors; run after editing a fixture"]
fn regenerate_fixture_files() {
    let dir = fixture_dir();
    fs::create_dir_all(&dir).unwrap();
    for (name, spec) in all() {
        let mut text = format::model_to_json(&spec);
        text.push('\n');
        fs::write(dir.join(format!("{name}.json")), text).unwrap();
    }
}
