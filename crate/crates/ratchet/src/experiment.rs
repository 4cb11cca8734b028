//! Replicated experiment runs and their on-disk outputs.
//!
//! Layout of an output directory:
//!
//! ```text
//! <out>/seed_<n>/metrics.csv      one per replicate
//! <out>/seed_<n>/*.png, *.genome  portrait runs only
//! <out>/aggregate.csv             mean and sd across replicates
//! <out>/oracle.csv                oracle runs only
//! <out>/manifest.json
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use rayon::prelude::*;
use ratchet_core::cgp::{render, Phenotype};
use ratchet_core::evoc::{oracle_enumerate, run, BodyPart, FitnessParams, Metrics};
use ratchet_core::focus::{run_cf, CfMetrics};
use ratchet_core::portrait::{
    score_phenotype, Evaluator, GenerationRecord, PortraitRun, RuleConstants, RuleScores, SitterAssets,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Experiment, RunConfig};
use crate::images::{load_sitter, write_png};
use crate::table::{aggregate, Cell, Table};
use crate::AppError;

pub const METRICS_FILE: &str = "metrics.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const ORACLE_FILE: &str = "oracle.csv";

/// Scores phenotypes on the rayon pool. Results keep input order.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParallelEvaluator;

impl Evaluator for ParallelEvaluator {
    fn score_all(
        &self,
        phenotypes: &[&Phenotype],
        assets: &SitterAssets,
        rules: &RuleConstants,
    ) -> Result<Vec<RuleScores>, ratchet_core::Error> {
        phenotypes.par_iter().map(|p| score_phenotype(p, assets, rules)).collect()
    }
}

pub fn evoc_table(series: &[Metrics]) -> Table {
    let mut t = Table::new([
        "iteration",
        "mean_fitness",
        "max_fitness",
        "diversity",
        "mean_chain_length",
        "mean_mutation_rate",
    ]);
    for m in series {
        t.push(metric_cells(m));
    }
    t
}

fn metric_cells(m: &Metrics) -> Vec<Cell> {
    vec![
        Cell::Int(m.iteration as u64),
        Cell::Float(m.mean_fitness),
        Cell::Float(m.max_fitness),
        Cell::Int(m.diversity as u64),
        Cell::Float(m.mean_chain_length),
        Cell::Float(m.mean_mutation_rate),
    ]
}

pub fn cf_table(series: &[CfMetrics]) -> Table {
    let mut t = evoc_table(&[]);
    t.columns.push("fitness_mode".into());
    for row in series {
        let mut cells = metric_cells(&row.metrics);
        cells.push(Cell::Text(row.params.mode_label().into()));
        t.push(cells);
    }
    t
}

pub fn portrait_table(records: &[GenerationRecord]) -> Table {
    let mut t = Table::new([
        "generation",
        "best_combined",
        "best_R",
        "best_A",
        "p1",
        "p2",
        "p3",
        "mode",
        "w_painterly",
        "stuck_counter",
        "archive_size",
    ]);
    for r in records {
        t.push(vec![
            Cell::Int(r.generation as u64),
            Cell::Float(r.best_combined),
            Cell::Float(r.best_r),
            Cell::Float(r.best_a),
            Cell::Float(r.p1),
            Cell::Float(r.p2),
            Cell::Float(r.p3),
            Cell::Text(r.mode.as_str().into()),
            Cell::Float(r.w_painterly),
            Cell::Int(r.stuck_counter as u64),
            Cell::Int(r.archive_size as u64),
        ]);
    }
    t
}

/// Every action step with its fitness.
pub fn oracle_table(params: &FitnessParams) -> Table {
    let mut columns: Vec<String> = BodyPart::ALL.iter().map(|p| p.as_str().to_string()).collect();
    columns.push("fitness".into());
    let mut t = Table::new(columns);
    for (step, f) in oracle_enumerate(params).rows {
        let mut row: Vec<Cell> = BodyPart::ALL
            .iter()
            .map(|&p| Cell::Text(step.posture(p).as_str().into()))
            .collect();
        row.push(Cell::Float(f));
        t.push(row);
    }
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct RunStatus {
    pub seed: u64,
    pub status: String,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub config: RunConfig,
    pub seeds: Vec<u64>,
    pub runs: Vec<RunStatus>,
    /// SHA-256 of every emitted file except the manifest, keyed by path
    /// relative to the output directory.
    pub files: BTreeMap<String, String>,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub output_dir: PathBuf,
    pub manifest: Manifest,
}

/// Runs the configured experiment for every replicate seed and writes the
/// output directory. Inputs are validated before anything is written.
pub fn run_experiment(cfg: &RunConfig) -> Result<Outcome, AppError> {
    cfg.validate()?;
    let assets = match cfg.experiment() {
        Experiment::Portrait => {
            let p = &cfg.portrait;
            let (sitter, mask) = (p.sitter.as_deref(), p.mask.as_deref());
            Some(load_sitter(sitter.expect("validated"), mask.expect("validated"))?)
        }
        _ => None,
    };

    let out = cfg.output_dir.clone();
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let started = Instant::now();

    let seeds = cfg.seeds();
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    if cfg.experiment() == Experiment::Oracle {
        let t0 = Instant::now();
        oracle_table(&cfg.world.fitness).write_csv(&out.join(ORACLE_FILE))?;
        runs.push(RunStatus {
            seed: cfg.seed,
            status: "ok".into(),
            wall_clock_seconds: t0.elapsed().as_secs_f64(),
        });
    } else {
        let results: Vec<(u64, f64, anyhow::Result<Table>)> = seeds
            .par_iter()
            .map(|&seed| {
                let t0 = Instant::now();
                let r = run_seed(cfg, seed, assets.as_ref(), &out);
                (seed, t0.elapsed().as_secs_f64(), r)
            })
            .collect();
        let mut tables = Vec::new();
        for (seed, secs, r) in results {
            let status = match r {
                Ok(t) => {
                    tables.push(t);
                    "ok".to_string()
                }
                Err(e) => {
                    failures.push(format!("seed {seed}: {e:#}"));
                    format!("failed: {e:#}")
                }
            };
            runs.push(RunStatus {
                seed,
                status,
                wall_clock_seconds: secs,
            });
        }
        if failures.is_empty() {
            if let Some(agg) = aggregate(&tables) {
                agg.write_csv(&out.join(AGGREGATE_FILE))?;
            }
        }
    }

    let manifest = Manifest {
        experiment: cfg.experiment().to_string(),
        config: cfg.clone(),
        seeds,
        runs,
        files: hash_tree(&out)?,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let json = serde_json::to_string_pretty(&manifest).context("serializing manifest")?;
    std::fs::write(out.join(MANIFEST_FILE), json + "\n").context("writing manifest")?;
    if !failures.is_empty() {
        return Err(AppError::Runtime(anyhow::anyhow!(failures.join("; "))));
    }
    Ok(Outcome {
        output_dir: out,
        manifest,
    })
}

pub fn seed_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed_{seed}"))
}

fn run_seed(cfg: &RunConfig, seed: u64, assets: Option<&SitterAssets>, out: &Path) -> anyhow::Result<Table> {
    let dir = seed_dir(out, seed);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let table = match cfg.experiment() {
        Experiment::Evoc => evoc_table(&run(&cfg.world_for(seed))?),
        Experiment::CfEvoc => cf_table(&run_cf(&cfg.cf_config(seed))?),
        Experiment::Portrait => run_portrait(cfg, seed, assets.context("sitter assets")?, &dir)?,
        Experiment::Oracle => unreachable!("oracle runs once"),
    };
    table.write_csv(&dir.join(METRICS_FILE))?;
    Ok(table)
}

fn run_portrait(cfg: &RunConfig, seed: u64, assets: &SitterAssets, dir: &Path) -> anyhow::Result<Table> {
    let params = cfg.portrait.evolution;
    let mut run = PortraitRun::new(params, seed)?;
    let mut records = Vec::with_capacity(params.generations);
    for _ in 0..params.generations {
        let rec = run.step(assets, &ParallelEvaluator)?;
        if rec.generation % params.snapshot_every == 0 {
            let (genome, _) = run.best().context("generation has a best individual")?;
            let img = render(genome, assets.spec())?;
            write_png(&img, &dir.join(format!("best_gen_{:05}.png", rec.generation)))?;
        }
        records.push(rec);
    }
    if let Some((genome, _)) = run.best() {
        write_png(&render(genome, assets.spec())?, &dir.join("final_best.png"))?;
        std::fs::write(dir.join("final_best.genome"), genome.to_text()).context("writing final_best.genome")?;
    }
    Ok(portrait_table(&records))
}

/// SHA-256 of every file under `root` except the manifest, sorted by path.
pub fn hash_tree(root: &Path) -> anyhow::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).with_context(|| format!("listing {}", dir.display()))? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let rel = path.strip_prefix(root).expect("under root");
            let key = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
            if key == MANIFEST_FILE {
                continue;
            }
            let bytes = std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
            out.insert(key, hex::encode(Sha256::digest(&bytes)));
        }
    }
    Ok(out)
}
