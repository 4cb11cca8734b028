use std::path::Path;
use std::process::Command;

use ratchet::config::{Experiment, Overrides, RunConfig};
use ratchet::experiment::{hash_tree, run_experiment, seed_dir, AGGREGATE_FILE, MANIFEST_FILE, METRICS_FILE};
use ratchet::images::{load_sitter, write_sitter};
use ratchet::plot::{load_series, plot, render_svg};
use ratchet::table::{aggregate, mean_sd, Cell, Table};
use ratchet::AppError;
use ratchet_core::portrait::synthetic_sitter;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ratchet"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn parse_errors_carry_line_numbers() {
    let err = RunConfig::parse("seed = 1\nreplicates = \"many\"\n", "cfg.toml").unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, AppError::Validation(_)));
    assert!(msg.contains("line 2"), "{msg}");
}

#[test]
fn unknown_keys_are_rejected() {
    let msg = RunConfig::parse("[world]\nwidht = 3\n", "cfg.toml").unwrap_err().to_string();
    assert!(msg.contains("widht"), "{msg}");
    let msg = RunConfig::parse("colour = 1\n", "cfg.toml").unwrap_err().to_string();
    assert!(msg.contains("colour"), "{msg}");
}

#[test]
fn validation_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "c.toml", "[world]\np_cont = 1.5\n");
    let msg = RunConfig::resolve(Some(&p), Experiment::Evoc, &Overrides::default())
        .unwrap_err()
        .to_string();
    assert!(msg.contains("p_cont"), "{msg}");

    let p = write(dir.path(), "d.toml", "[controller]\ndecay = 1.5\n");
    let msg = RunConfig::resolve(Some(&p), Experiment::CfEvoc, &Overrides::default())
        .unwrap_err()
        .to_string();
    assert!(msg.contains("decay"), "{msg}");

    let p = write(dir.path(), "e.toml", "replicates = 0\n");
    let msg = RunConfig::resolve(Some(&p), Experiment::Evoc, &Overrides::default())
        .unwrap_err()
        .to_string();
    assert!(msg.contains("replicates"), "{msg}");
}

#[test]
fn config_must_match_the_command() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "c.toml", "experiment = \"portrait\"\n");
    let msg = RunConfig::resolve(Some(&p), Experiment::Evoc, &Overrides::default())
        .unwrap_err()
        .to_string();
    assert!(msg.contains("experiment"), "{msg}");
}

#[test]
fn overrides_take_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "c.toml", "seed = 5\nreplicates = 4\n");
    let cfg = RunConfig::resolve(
        Some(&p),
        Experiment::Evoc,
        &Overrides {
            seed: Some(9),
            replicates: None,
            output_dir: Some("x".into()),
        },
    )
    .unwrap();
    assert_eq!(cfg.seeds(), vec![9, 10, 11, 12]);
    assert_eq!(cfg.output_dir, Path::new("x"));
    let again = RunConfig::parse(&cfg.to_toml(), "echo").unwrap();
    assert_eq!(again, cfg);
}

#[test]
fn aggregate_is_mean_and_sample_sd() {
    let mk = |v: f64| {
        let mut t = Table::new(["t", "x", "mode"]);
        t.push(vec![Cell::Int(0), Cell::Float(v), Cell::Text("a".into())]);
        t
    };
    let agg = aggregate(&[mk(1.0), mk(3.0)]).unwrap();
    assert_eq!(agg.columns, ["t", "x_mean", "x_sd"]);
    assert_eq!(agg.rows[0][1], Cell::Float(2.0));
    assert_eq!(agg.rows[0][2], Cell::Float(2f64.sqrt()));
    assert_eq!(mean_sd(&[4.0]), (4.0, 0.0));
}

fn small_evoc(out: &Path, seeds: usize) -> RunConfig {
    let mut cfg = RunConfig {
        experiment: Some(Experiment::Evoc),
        replicates: seeds,
        seed: 3,
        output_dir: out.to_path_buf(),
        ..RunConfig::default()
    };
    cfg.world.iterations = 30;
    cfg.world.chaining_enabled = true;
    cfg
}

#[test]
fn evoc_outputs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let outcome = run_experiment(&small_evoc(&out, 3)).unwrap();
    assert_eq!(outcome.manifest.seeds, vec![3, 4, 5]);
    assert!(outcome.manifest.runs.iter().all(|r| r.status == "ok"));
    for s in 3..6 {
        let csv = std::fs::read_to_string(seed_dir(&out, s).join(METRICS_FILE)).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "iteration,mean_fitness,max_fitness,diversity,mean_chain_length,mean_mutation_rate"
        );
        assert_eq!(lines.count(), 31);
    }
    assert!(out.join(AGGREGATE_FILE).exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join(MANIFEST_FILE)).unwrap()).unwrap();
    let files = manifest["files"].as_object().unwrap();
    assert_eq!(files.len(), 4);
    assert_eq!(hash_tree(&out).unwrap().len(), 4);
    assert_eq!(files["seed_4/metrics.csv"], hash_tree(&out).unwrap()["seed_4/metrics.csv"]);
    assert_eq!(manifest["config"]["world"]["iterations"], 30);
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_experiment(&small_evoc(&dir.path().join("a"), 2)).unwrap();
    let b = run_experiment(&small_evoc(&dir.path().join("b"), 2)).unwrap();
    assert_eq!(a.manifest.files, b.manifest.files);
}

#[test]
fn cf_csv_carries_the_fitness_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cf");
    let mut cfg = small_evoc(&out, 1);
    cfg.experiment = Some(Experiment::CfEvoc);
    cfg.world.iterations = 60;
    cfg.world.chaining_enabled = false;
    run_experiment(&cfg).unwrap();
    let csv = std::fs::read_to_string(seed_dir(&out, 3).join(METRICS_FILE)).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].ends_with(",mean_mutation_rate,fitness_mode"));
    assert!(lines[50].ends_with(",still-same"));
    assert!(lines[51].ends_with(",moving-same"));
}

#[test]
fn oracle_csv_lists_every_step() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        experiment: Some(Experiment::Oracle),
        output_dir: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    run_experiment(&cfg).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("oracle.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 730);
    assert_eq!(lines[0], "head,left_arm,right_arm,left_leg,right_leg,hips,fitness");
    assert_eq!(lines.iter().filter(|l| l.ends_with(",10")).count(), 12);
}

#[test]
fn missing_sitter_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("portrait");
    let mut cfg = RunConfig {
        experiment: Some(Experiment::Portrait),
        output_dir: out.clone(),
        ..RunConfig::default()
    };
    let err = run_experiment(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(!out.exists());

    cfg.portrait.sitter = Some(dir.path().join("absent.png"));
    cfg.portrait.mask = Some(dir.path().join("absent_mask.png"));
    let err = run_experiment(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(!out.exists());
}

#[test]
fn portrait_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (sitter, mask) = (dir.path().join("s.png"), dir.path().join("m.png"));
    write_sitter(&synthetic_sitter(24, 24), &sitter, &mask).unwrap();
    let loaded = load_sitter(&sitter, &mask).unwrap();
    assert_eq!(loaded.face(), synthetic_sitter(24, 24).face());

    let out = dir.path().join("out");
    let mut cfg = RunConfig {
        experiment: Some(Experiment::Portrait),
        output_dir: out.clone(),
        ..RunConfig::default()
    };
    cfg.portrait.sitter = Some(sitter);
    cfg.portrait.mask = Some(mask);
    cfg.portrait.evolution.population = 10;
    cfg.portrait.evolution.generations = 12;
    cfg.portrait.evolution.snapshot_every = 5;
    run_experiment(&cfg).unwrap();
    let seed = seed_dir(&out, 0);
    for f in ["best_gen_00000.png", "best_gen_00005.png", "best_gen_00010.png", "final_best.png", "final_best.genome"] {
        assert!(seed.join(f).exists(), "{f}");
    }
    let header = std::fs::read_to_string(seed.join(METRICS_FILE)).unwrap();
    assert!(header.starts_with(
        "generation,best_combined,best_R,best_A,p1,p2,p3,mode,w_painterly,stuck_counter,archive_size\n"
    ));
    let genome = std::fs::read_to_string(seed.join("final_best.genome")).unwrap();
    ratchet_core::cgp::CgpGenome::from_text(&genome).unwrap();
}

#[test]
fn mismatched_mask_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (s1, m1) = (dir.path().join("s1.png"), dir.path().join("m1.png"));
    let (s2, m2) = (dir.path().join("s2.png"), dir.path().join("m2.png"));
    write_sitter(&synthetic_sitter(16, 16), &s1, &m1).unwrap();
    write_sitter(&synthetic_sitter(20, 20), &s2, &m2).unwrap();
    let err = load_sitter(&s1, &m2).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn plot_checks_columns_and_handles_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "m.csv", "iteration,a,b\n0,1,2\n1,2,4\n");
    let svg = dir.path().join("p.svg");
    plot(&[csv.clone()], &["a".into(), "b".into()], &svg).unwrap();
    let first = std::fs::read(&svg).unwrap();
    plot(&[csv.clone()], &["a".into(), "b".into()], &svg).unwrap();
    assert_eq!(first, std::fs::read(&svg).unwrap());
    assert_eq!(String::from_utf8(first).unwrap().matches("<polyline").count(), 2);

    let err = plot(&[csv.clone()], &["c".into()], &svg).unwrap_err();
    assert!(err.to_string().contains("unknown column `c`"));
    assert_eq!(err.exit_code(), 1);

    let empty = write(dir.path(), "e.csv", "iteration,a\n");
    let (x, series) = load_series(&[empty], &["a".into()]).unwrap();
    assert_eq!(x, "iteration");
    let doc = render_svg(&x, &series);
    assert!(doc.starts_with("<svg") && doc.ends_with("</svg>\n"));
    assert!(!doc.contains("<polyline"));
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let ok = bin()
        .args(["run-evoc", "--seed", "1", "--replicates", "2", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(String::from_utf8_lossy(&ok.stderr).contains("[world]"));
    assert!(seed_dir(&out, 2).join(METRICS_FILE).exists());

    let bad = write(dir.path(), "bad.toml", "[world]\np_invent = 2\n");
    let st = bin().args(["run-evoc", "--config"]).arg(&bad).status().unwrap();
    assert_eq!(st.code(), Some(1));

    let st = bin().args(["run-portrait", "--out"]).arg(dir.path().join("p")).status().unwrap();
    assert_eq!(st.code(), Some(1));
    assert!(!dir.path().join("p").exists());

    let st = bin().args(["frobnicate"]).status().unwrap();
    assert_eq!(st.code(), Some(1));

    let svg = dir.path().join("x.svg");
    let st = bin()
        .args(["plot", "--in"])
        .arg(seed_dir(&out, 1).join(METRICS_FILE))
        .args(["--columns", "mean_fitness,diversity", "--svg"])
        .arg(&svg)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(svg.exists());

    // an output path under a regular file cannot be created
    let blocker = write(dir.path(), "file", "");
    let st = bin().args(["oracle-fitness", "--out"]).arg(blocker.join("sub")).status().unwrap();
    assert_eq!(st.code(), Some(2));
}
