mod common;

use common::*;
use ontosoc::load::load_graphs;
use ontosoc::schema::{builtin_schema, schema_from_graph};
use ontosoc::validate::validate;
use proptest::prelude::*;

fn with_corpus<'a>(head: &[&'a str]) -> Vec<&'a str> {
    head.iter().copied().chain(CORPUS_ARGS).collect()
}

#[test]
fn exit_code_matrix() {
    let q = "queries/community_activities.rq";
    let fault = "fixtures/faults/range_member_of_locality.ttl";
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (with_corpus(&["validate"]), 0),
        (with_corpus(&["validate", "--format", "json"]), 0),
        (with_corpus(&["validate", fault]), 1),
        (with_corpus(&["validate", "--format", "json", fault]), 1),
        (with_corpus(&["validate", "missing.ttl"]), 2),
        (vec!["validate", "fixtures/cli/broken.ttl"], 2),
        (vec!["validate"], 2),
        (with_corpus(&["validate", "--format", "yaml"]), 2),
        (with_corpus(&["validate", "--schema", "missing-schema.ttl"]), 2),
        (with_corpus(&["query", "--file", q]), 0),
        (with_corpus(&["query", "--file", q, "--format", "json"]), 0),
        (with_corpus(&["query", "--query", "SELECT * WHERE { ?s ?p ?o } LIMIT 1"]), 0),
        (with_corpus(&["query", "--query", "SELECT"]), 2),
        (with_corpus(&["query", "--query", "ASK { ?s ?p ?o }"]), 2),
        (with_corpus(&["query", "--file", "missing.rq"]), 2),
        (with_corpus(&["query", "--query", "SELECT * WHERE { ?s ?p ?o }", "--file", q]), 2),
        (with_corpus(&["query"]), 2),
        (vec!["query", "--file", q], 2),
        (vec!["derive-schema"], 0),
        (vec!["derive-schema", "--triads", "missing.txt"], 2),
        (vec!["derive-schema", "--triads", "fixtures/cli/bad_triads.txt"], 2),
        (vec!["export-alignment"], 0),
        (with_corpus(&["stats"]), 0),
        (with_corpus(&["stats", "--format", "json"]), 0),
        (vec!["stats", "missing.ttl"], 2),
        (vec!["stats"], 2),
        (vec!["frobnicate"], 2),
        (with_corpus(&["validate", "--unknown-flag"]), 2),
    ];
    for (args, want) in cases {
        let out = run(&args);
        assert_eq!(code(&out), want, "{args:?}\nstdout:\n{}\nstderr:\n{}", stdout(&out), stderr(&out));
        if want == 2 {
            assert!(!stderr(&out).is_empty(), "{args:?} explains itself on stderr");
        }
    }
}

#[test]
fn missing_files_are_named() {
    for args in [
        vec!["validate", "corpus/naakosenda.ttl", "no/such/file.ttl"],
        vec!["query", "--file", "no/such/file.ttl", "corpus/naakosenda.ttl"],
        vec!["stats", "no/such/file.ttl"],
        vec!["derive-schema", "--decisions", "no/such/file.ttl"],
        vec!["validate", "--schema", "no/such/file.ttl", "corpus/naakosenda.ttl"],
    ] {
        let out = run(&args);
        assert_eq!(code(&out), 2);
        assert!(stderr(&out).contains("no/such/file.ttl"), "{args:?}: {}", stderr(&out));
        assert!(stdout(&out).is_empty());
    }
}

#[test]
fn json_outputs_parse() {
    for args in [
        with_corpus(&["validate", "--format", "json"]),
        with_corpus(&["validate", "--format", "json", "fixtures/faults/disjoint_event_town.ttl"]),
        with_corpus(&["query", "--file", "queries/community_activities.rq", "--format", "json"]),
        with_corpus(&["stats", "--format", "json"]),
    ] {
        let out = run(&args);
        let v: serde_json::Value =
            serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", stdout(&out)));
        assert!(v.is_object());
    }
    let stats: serde_json::Value = serde_json::from_slice(&run(&with_corpus(&["stats", "--format", "json"])).stdout).unwrap();
    let (corpus, _) = load_graphs(&corpus_files()).unwrap();
    assert_eq!(stats["triples"], corpus.len());
    assert_eq!(stats["predicates"]["ontosoc:isMemberOf"], 3);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    for args in [
        with_corpus(&["validate"]),
        with_corpus(&["validate", "--format", "json", "fixtures/faults/domain_resource_as_member.ttl"]),
        with_corpus(&["query", "--file", "queries/community_activities.rq"]),
        with_corpus(&["query", "--file", "queries/community_activities.rq", "--format", "json"]),
        vec!["derive-schema"],
        vec!["export-alignment"],
        with_corpus(&["stats"]),
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn documented_examples() {
    let out = run(&["derive-schema"]);
    assert!(stdout(&out).lines().any(|l| l == "candidates=30 pairs=12 reduction=60% final=10"), "{}", stdout(&out));

    let out = run(&with_corpus(&["validate"]));
    assert!(stdout(&out).starts_with("0 violations"), "{}", stdout(&out));

    let out = run(&with_corpus(&["query", "--file", "queries/community_activities.rq"]));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "{text}");
    assert!(lines[1].starts_with("<http://example.org/CDE-SAARE>"));
    assert!(lines[2].starts_with("<http://example.org/Club_2_0>"));
    assert!(lines[3].starts_with("<http://example.org/Naakosenda>") && lines[3].contains("Tangoche"));
    assert_eq!(lines[4], "3 rows");
}

#[test]
fn derive_schema_writes_the_builtin_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("schema.ttl");
    let out = run(&[
        "derive-schema",
        "--triads",
        "fixtures/cli/default_triads.txt",
        "--decisions",
        "crates/core/data/decisions.txt",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(!stdout(&out).contains("@prefix"), "schema goes to the file");
    let (g, _) = load_graphs(&[&out_path]).unwrap();
    assert!(schema_from_graph(&g).unwrap().equivalent(&builtin_schema()));

    // The derived file works as a --schema argument.
    let out = run(&with_corpus(&["validate", "--schema", out_path.to_str().unwrap()]));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn schema_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let schema = dir.path().join("extended.ttl");
    assert_eq!(code(&run(&["derive-schema", "--out", schema.to_str().unwrap()])), 0);
    let mut text = std::fs::read_to_string(&schema).unwrap();
    text.push_str("ontosoc:Festival a owl:Class ; rdfs:label \"Festival\" ; rdfs:subClassOf ontosoc:CulturalActivity .\n");
    std::fs::write(&schema, text).unwrap();
    let data = dir.path().join("festival.ttl");
    std::fs::write(
        &data,
        "@prefix os: <http://maroua-univ/ns/ontosoc#> . @prefix ex: <http://example.org/> .\n\
         ex:f a os:Festival ; os:isOrganisedBy ex:Naakosenda .\n",
    )
    .unwrap();
    let mut args = with_corpus(&["validate"]);
    args.push(data.to_str().unwrap());

    assert_eq!(code(&run(&args)), 1, "unknown class under the builtin schema");
    let out = ontosoc(&args).env("ONTOSOC_SCHEMA", &schema).output().unwrap();
    assert_eq!(code(&out), 0, "{}{}", stdout(&out), stderr(&out));
    let out = ontosoc(&args).env("ONTOSOC_SCHEMA", dir.path().join("nope.ttl")).output().unwrap();
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("nope.ttl"));
}

#[test]
fn service_survives_kill_and_restart() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("kb.ttl");
    let server = Server::start(&data, &corpus_files());
    let before = server.health();
    assert_eq!(before["epoch"], 0);

    let (status, body) = server.post(NEW_CLUB);
    assert_eq!(status, 200, "{body}");
    let acked = server.health();
    assert_eq!(acked["epoch"], 1);
    server.kill();

    let server = Server::start(&data, &[]);
    assert_eq!(server.health(), acked);
    let (status, rows) = server.query(
        "SELECT ?p WHERE { ?p <http://maroua-univ/ns/ontosoc#isMemberOf> <http://example.org/NewClub> }",
    );
    assert_eq!(status, 200);
    assert_eq!(rows["results"]["bindings"][0]["p"]["value"], "http://example.org/Aissatou");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Exit status of `validate` agrees with the library on random mixes of
    /// corpus and fault files.
    #[test]
    fn validate_exit_code_follows_the_report(mask in 0u16..(1 << 9)) {
        let mut files: Vec<std::path::PathBuf> = corpus_files();
        let mut faults: Vec<_> = std::fs::read_dir(root().join("fixtures/faults")).unwrap().map(|e| e.unwrap().path()).collect();
        faults.sort();
        files.extend(faults);
        let chosen: Vec<_> = files.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, f)| f.clone()).collect();
        prop_assume!(!chosen.is_empty());
        let (g, _) = load_graphs(&chosen).unwrap();
        let conforms = validate(&g, &builtin_schema()).conforms();
        let mut cmd = ontosoc(&["validate"]);
        cmd.args(&chosen);
        let out = cmd.output().unwrap();
        prop_assert_eq!(code(&out), if conforms { 0 } else { 1 });
    }
}
