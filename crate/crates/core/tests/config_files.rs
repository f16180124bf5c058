use gptdyn_core::restriction::{classify_restriction, RestrictionClass};
use gptdyn_core::solver::allowed_transform_set;
use gptdyn_core::theory::{load_theory_file, make_octahedron};
use gptdyn_core::Error;

const OCTAHEDRON_H: &str = r#"{
  "measurements": [
    {"label": "Z", "outcomes": 2, "role": "branch"},
    {"label": "X", "outcomes": 2, "role": "fiducial"}
  ],
  "state_space": {
    "type": "polytope_h",
    "halfspaces": [
      {"a": ["-1", "2", "2"], "b": "2"},
      {"a": ["-1", "-2", "2"], "b": "0"},
      {"a": ["-1", "2", "-2"], "b": "0"},
      {"a": ["-1", "-2", "-2"], "b": "-2"}
    ]
  }
}"#;

fn write(name: &str, text: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("gptdyn-core-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn halfspace_config_reproduces_the_octahedron() {
    let t = load_theory_file(write("diamond.json", OCTAHEDRON_H)).unwrap();
    assert_eq!(t.name(), "diamond");
    let built = make_octahedron();
    let mut ours = t.polytope().unwrap().vertices.clone();
    let mut theirs = built.polytope().unwrap().vertices.clone();
    ours.sort();
    theirs.sort();
    assert_eq!(ours, theirs);
    assert_eq!(
        classify_restriction(&t).unwrap().class,
        RestrictionClass::FullyConditionallyRestricted
    );
    for b in 0..2 {
        assert_eq!(allowed_transform_set(&t, b).unwrap().exact_dim(), Some(1));
    }
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_theory_file("/nonexistent/theory.json").unwrap_err();
    assert!(matches!(err, Error::Io(_)), "{err:?}");
}
