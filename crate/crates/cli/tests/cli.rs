use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn retrokit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_retrokit")).current_dir(dir).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const REACTIONS: &str = "reaction_id\tec_numbers\treactant_smiles\tproduct_smiles
R1\t1.1.1.1\tCCCC=O\tCCCCO
R2\t1.1.1.1\tC1\tCCCCCO
R3\t4.2.1.1\tCCC=CC.O\tCCC(O)CC
R4\t2.1.1.1;2.1.1.2\tOc1ccccc1.CO\tCOc1ccccc1
R5\t1.1.1.3\tC2\tC9
";

const COMPOUNDS: &str = "compound_id\traw_smiles
C1\tCCCCC=O
C2\tCCC(=O)C
C9\tUNRESOLVED
";

fn ingest_fixture(dir: &Path) {
    fs::write(dir.join("reactions.tsv"), REACTIONS).unwrap();
    fs::write(dir.join("compounds.tsv"), COMPOUNDS).unwrap();
}

#[test]
fn help_documents_columns_weights_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let top = stdout(&retrokit(dir.path(), &["--help"]));
    assert!(top.contains("NNPR"));
    assert!(top.contains("Exit codes"));
    let ingest = stdout(&retrokit(dir.path(), &["ingest", "--help"]));
    assert!(ingest.contains("compound_id, raw_smiles"));
    let retro = stdout(&retrokit(dir.path(), &["retro", "--help"]));
    assert!(retro.contains("pathway_rank, aggregate_score"));
}

#[test]
fn ingest_keeps_resolvable_reactions() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ingest_fixture(d);
    let out =
        retrokit(d, &["ingest", "--reactions", "reactions.tsv", "--compounds", "compounds.tsv", "--out-dir", "o"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stats = json(&d.join("o/stats.json"));
    assert_eq!(stats["reactions_in"], 5);
    assert_eq!(stats["reactions_usable"], 4);
    assert_eq!(stats["reactions_broken"], 1);
    assert_eq!(stats["compounds_unresolved"], 1);
    let mono = fs::read_to_string(d.join("o/mono.tsv")).unwrap();
    assert_eq!(mono.lines().count(), 1 + 4);
    assert!(!mono.contains("R5"));
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ingest_fixture(d);
    let missing = retrokit(d, &["ingest", "--reactions", "nope.tsv", "--compounds", "compounds.tsv", "--out-dir", "o"]);
    assert_eq!(code(&missing), 1);
    let no_flag = retrokit(d, &["ingest", "--compounds", "compounds.tsv", "--out-dir", "o"]);
    assert_eq!(code(&no_flag), 1);
    assert!(String::from_utf8_lossy(&no_flag.stderr).contains("--reactions"));
    fs::write(d.join("bad.toml"), "[ingest]\nunknown-key = 1\n").unwrap();
    assert_eq!(code(&retrokit(d, &["--config", "bad.toml", "ingest"])), 1);
}

#[test]
fn empty_corpus_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ingest_fixture(d);
    fs::write(d.join("empty.tsv"), "reaction_id\tec_numbers\treactant_smiles\tproduct_smiles\n").unwrap();
    let out = retrokit(d, &["ingest", "--reactions", "empty.tsv", "--compounds", "compounds.tsv", "--out-dir", "o"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn config_file_fills_gaps_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("run.toml"), "seed = 4\n\n[synth]\nout-dir = \"s\"\npathways = 5\n").unwrap();
    let from_file = retrokit(d, &["--config", "run.toml", "synth"]);
    assert_eq!(code(&from_file), 0);
    assert!(stdout(&from_file).contains("in 5 pathways"), "{}", stdout(&from_file));
    let overridden = retrokit(d, &["--config", "run.toml", "synth", "--pathways", "7", "--out-dir", "t"]);
    assert!(stdout(&overridden).contains("in 7 pathways"));
    // the seed from the file matches the same seed given as a flag
    let flagged = retrokit(d, &["--seed", "4", "synth", "--pathways", "5", "--out-dir", "u"]);
    assert_eq!(code(&flagged), 0);
    assert_eq!(fs::read(d.join("s/reactions.tsv")).unwrap(), fs::read(d.join("u/reactions.tsv")).unwrap());
}

/// Runs synth, ingest and augment inside `d`.
fn prepare(d: &Path) {
    let steps: [&[&str]; 3] = [
        &["--seed", "2", "synth", "--out-dir", "s", "--pathways", "15"],
        &["ingest", "--reactions", "s/reactions.tsv", "--compounds", "s/compounds.tsv", "--out-dir", "i"],
        &[
            "--seed",
            "2",
            "augment",
            "--corpus",
            "i/mono.tsv",
            "--templates",
            "s/templates.tsv",
            "--pathways",
            "s/pathways.tsv",
            "--out-dir",
            "a",
        ],
    ];
    for args in steps {
        let out = retrokit(d, args);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn train_eval_and_retro_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    prepare(d);
    let summary = json(&d.join("a/augment.json"));
    assert_eq!(summary["schema_version"], 1);
    assert!(summary["negatives"].as_u64().unwrap() > 0);

    let train = retrokit(
        d,
        &[
            "train",
            "--model",
            "nn1pr",
            "--data",
            "a/train.tsv",
            "--epochs",
            "2",
            "--out",
            "m.bin",
            "--history",
            "h.csv",
        ],
    );
    assert_eq!(code(&train), 0);
    assert!(stdout(&train).contains("262657 parameters"));
    let history = fs::read_to_string(d.join("h.csv")).unwrap();
    assert_eq!(history.lines().next(), Some("epoch,loss,accuracy"));
    assert_eq!(history.lines().count(), 3);

    let eval = retrokit(
        d,
        &["eval", "--weights", "m.bin", "--data", "a/test.tsv", "--report", "r.json", "--ranks", "ranks.tsv"],
    );
    assert_eq!(code(&eval), 0);
    let report = json(&d.join("r.json"));
    assert_eq!(report["schema_version"], 1);
    let groups = report["groups"].as_u64().unwrap();
    assert!(groups > 0);
    for side in ["model", "baseline"] {
        let coverage = report[side]["coverage"].as_array().unwrap();
        let ks: Vec<u64> = coverage.iter().map(|p| p["k"].as_u64().unwrap()).collect();
        assert_eq!(ks, [1, 5, 10, 50, 100, 1000]);
        let fractions: Vec<f64> = coverage.iter().map(|p| p["fraction"].as_f64().unwrap()).collect();
        assert!(fractions.windows(2).all(|w| w[0] <= w[1]));
    }
    let ranks = fs::read_to_string(d.join("ranks.tsv")).unwrap();
    assert_eq!(ranks.lines().count() as u64, groups + 1);

    let target = fs::read_to_string(d.join("s/planted_target.smi")).unwrap();
    let retro = retrokit(
        d,
        &[
            "retro",
            "--target",
            target.trim(),
            "--templates",
            "s/templates.tsv",
            "--nn1",
            "m.bin",
            "--stop-set",
            "s/planted_stop.smi",
            "--gold",
            "s/planted_gold.tsv",
            "--max-steps",
            "3",
            "--beam",
            "1000",
            "--report",
            "p.json",
            "--pathways",
            "p.tsv",
        ],
    );
    assert_eq!(code(&retro), 0, "{}", String::from_utf8_lossy(&retro.stderr));
    let report = json(&d.join("p.json"));
    let gold = report["gold"].as_array().unwrap();
    assert_eq!(gold.len(), 3);
    assert!(fs::read_to_string(d.join("p.tsv")).unwrap().starts_with("pathway_rank\taggregate_score"));
}

#[test]
fn degenerate_and_mismatched_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    prepare(d);
    let wrong_width =
        retrokit(d, &["train", "--model", "nn2pr", "--data", "a/train.tsv", "--epochs", "1", "--out", "x.bin"]);
    assert_eq!(code(&wrong_width), 2);

    fs::write(d.join("none.tsv"), "template_id\tdirection\tdiameter\tec_numbers\tsmarts\n").unwrap();
    let no_templates = retrokit(d, &["augment", "--corpus", "i/mono.tsv", "--templates", "none.tsv", "--out-dir", "b"]);
    assert_eq!(code(&no_templates), 2);

    let train = retrokit(d, &["train", "--model", "nn1pr", "--data", "a/train.tsv", "--epochs", "1", "--out", "m.bin"]);
    assert_eq!(code(&train), 0);
    let retro = |target: &str| {
        retrokit(
            d,
            &[
                "retro",
                "--target",
                target,
                "--templates",
                "s/templates.tsv",
                "--nn1",
                "m.bin",
                "--max-steps",
                "1",
                "--report",
                "q.json",
            ],
        )
    };
    assert_eq!(code(&retro("C(C")), 1);
    // nothing in the template set applies to a lone chloride
    assert_eq!(code(&retro("[Cl-]")), 2);
}
