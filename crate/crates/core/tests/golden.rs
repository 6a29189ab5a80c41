use honeycomb_core::evaluator::evaluate_on;
use honeycomb_core::{Engine, QParam, QScalar, SpinColor};
use serde::Deserialize;

#[derive(Deserialize)]
struct Case {
    name: String,
    n: usize,
    backend: QParam,
    coloring: Vec<SpinColor>,
    value: QScalar,
}

#[derive(Deserialize)]
struct File {
    format: String,
    version: u32,
    cases: Vec<Case>,
}

#[test]
fn reference_values_are_reproduced() {
    let file: File = serde_json::from_str(include_str!("golden/values.json")).unwrap();
    assert_eq!(
        (file.format.as_str(), file.version),
        ("honeycomb-golden", 1)
    );
    assert!(file.cases.len() >= 20);
    for c in &file.cases {
        let got = evaluate_on(&Engine::shared(c.backend), c.n, &c.coloring).unwrap();
        match c.backend {
            QParam::Classical => assert_eq!(got, c.value, "{}", c.name),
            QParam::RootOfUnity(_) => assert!(got.relative_diff(&c.value) <= 1e-9, "{}", c.name),
        }
    }
}
