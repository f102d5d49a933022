use std::path::PathBuf;

use jamgraph::corpus::example_files;
use jamgraph::io::{parse_embedding, parse_graph, to_json};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

#[test]
#[ignore = "rewrites the shipped corpus"]
fn regenerate_corpus() {
    for (name, text) in example_files() {
        std::fs::write(corpus_dir().join(name), text).unwrap();
    }
}

#[test]
fn shipped_files_match_builders() {
    for (name, text) in example_files() {
        let shipped = std::fs::read_to_string(corpus_dir().join(name)).unwrap();
        assert_eq!(
            shipped, text,
            "{name} is stale; run the ignored regenerate_corpus test"
        );
    }
}

#[test]
fn corpus_round_trips() {
    for (name, text) in example_files() {
        if let Ok(g) = parse_graph(&text) {
            g.to_graph().unwrap();
            assert_eq!(to_json(&g), text, "{name}");
        } else {
            let e = parse_embedding(&text).unwrap();
            e.resolve(None).unwrap();
            assert_eq!(to_json(&e), text, "{name}");
        }
    }
}
