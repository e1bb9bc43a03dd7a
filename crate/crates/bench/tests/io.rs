use std::fs;
use std::path::Path;

use spac_bench::io::{load_dataset, DatasetPaths, LoadError};

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

fn three_node_fixture(dir: &Path) {
    write(dir, "edges.tsv", "# triangle\n0\t1\n1\t2\n2\t0\n1\t0\n");
    write(dir, "features.csv", "1.0,0.0\n0.5,0.5\n0.0,1.0\n");
    write(dir, "labels.csv", "node_id,label\n0,0\n1,0\n2,1\n");
    write(dir, "split.json", r#"{"train": [0, 2], "test": [1]}"#);
}

#[test]
fn loads_three_node_fixture() {
    let dir = tempfile::tempdir().unwrap();
    three_node_fixture(dir.path());
    let loaded = load_dataset(&DatasetPaths::in_dir(dir.path())).unwrap();
    let g = loaded.graph;
    assert_eq!(g.n(), 3);
    assert_eq!(g.edges(), vec![(0, 1), (0, 2), (1, 2)]);
    assert_eq!(g.features().unwrap()[[1, 1]], 0.5);
    let labels = g.labels().unwrap();
    assert_eq!((labels.get(0), labels.get(2), labels.num_classes()), (Some(0), Some(1), 2));
    assert_eq!(g.split().unwrap().test, vec![1]);
    assert_eq!(loaded.warnings.len(), 1, "{:?}", loaded.warnings);
    assert!(loaded.warnings[0].contains("duplicate edge (1, 0)"));
}

#[test]
fn edges_only_dataset() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "edges.tsv", "0\t1\n1\t2\n");
    let loaded = load_dataset(&DatasetPaths::in_dir(dir.path())).unwrap();
    assert_eq!(loaded.graph.n(), 3);
    assert!(loaded.graph.features().is_none() && loaded.graph.labels().is_none());
}

#[test]
fn self_loop_is_reported_with_line() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "edges.tsv", "0\t1\n2\t2\n");
    match load_dataset(&DatasetPaths::in_dir(dir.path())) {
        Err(LoadError::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn node_ids_beyond_feature_rows_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    three_node_fixture(dir.path());
    write(dir.path(), "edges.tsv", "0\t1\n1\t3\n");
    assert!(matches!(load_dataset(&DatasetPaths::in_dir(dir.path())), Err(LoadError::InconsistentDims(_))));
}

#[test]
fn ragged_features_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    three_node_fixture(dir.path());
    write(dir.path(), "features.csv", "1.0,0.0\n0.5\n0.0,1.0\n");
    assert!(load_dataset(&DatasetPaths::in_dir(dir.path())).is_err());
}
