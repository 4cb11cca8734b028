use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng as _;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::cgp::{
    decode, mutate, neutral_variant, render_phenotype, uniform_crossover, CgpGenome, MutationRates, Phenotype,
    DEFAULT_NODES,
};
use crate::{Error, Rng};

use super::assets::SitterAssets;
use super::focus::{combined_fitness, update_focus, FocusParams, FocusState, GenerationSummary, Mode};
use super::scores::{score_image, RuleConstants, RuleScores};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PortraitParams {
    pub population: usize,
    pub generations: usize,
    pub tournament: usize,
    pub elitism: usize,
    /// Offspring per generation bred from an archived uncle and the elite.
    pub uncle_matings: usize,
    pub archive_cap: usize,
    /// Painterly score needed to enter the archive.
    pub uncle_threshold: f64,
    pub node_count: usize,
    /// Write an image of the best individual every this many generations.
    pub snapshot_every: usize,
    pub mutation: MutationRates,
    pub rules: RuleConstants,
    pub focus: FocusParams,
}

impl Default for PortraitParams {
    fn default() -> Self {
        PortraitParams {
            population: 40,
            generations: 300,
            tournament: 3,
            elitism: 1,
            uncle_matings: 2,
            archive_cap: 20,
            uncle_threshold: 0.8,
            node_count: DEFAULT_NODES,
            snapshot_every: 10,
            mutation: MutationRates::default(),
            rules: RuleConstants::default(),
            focus: FocusParams::default(),
        }
    }
}

impl PortraitParams {
    pub fn validate(&self) -> Result<(), Error> {
        if self.elitism != 1 {
            return Err(Error::config("elitism", "only a single elite is supported"));
        }
        if self.population < 2 {
            return Err(Error::config("population", "must be >= 2"));
        }
        if self.uncle_matings + self.elitism >= self.population {
            return Err(Error::config("uncle_matings", "must leave room for at least one mutant"));
        }
        if self.tournament == 0 {
            return Err(Error::config("tournament", "must be >= 1"));
        }
        if self.node_count == 0 {
            return Err(Error::config("node_count", "must be >= 1"));
        }
        if self.snapshot_every == 0 {
            return Err(Error::config("snapshot_every", "must be >= 1"));
        }
        crate::error::check_probability("uncle_threshold", self.uncle_threshold)?;
        crate::error::check_probability("mutation.point", self.mutation.point)?;
        self.rules.validate()?;
        self.focus.validate()
    }
}

/// An archived high-painterly individual.
#[derive(Debug, Clone, PartialEq)]
pub struct Uncle {
    pub genome: CgpGenome,
    pub phenotype: Phenotype,
    pub scores: RuleScores,
}

/// The "strange uncles": a bounded set of distinct phenotypes whose
/// painterly score reached the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Archive {
    uncles: Vec<Uncle>,
    cap: usize,
    threshold: f64,
}

impl Archive {
    pub fn new(cap: usize, threshold: f64) -> Self {
        Archive {
            uncles: Vec::new(),
            cap,
            threshold,
        }
    }

    pub fn uncles(&self) -> &[Uncle] {
        &self.uncles
    }

    pub fn len(&self) -> usize {
        self.uncles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.uncles.is_empty()
    }

    /// Offers a candidate. Returns whether it was stored. When full, the
    /// member with the lowest painterly score is evicted if the candidate
    /// beats it.
    pub fn offer(&mut self, genome: &CgpGenome, phenotype: &Phenotype, scores: RuleScores) -> bool {
        if self.cap == 0 || scores.painterly < self.threshold {
            return false;
        }
        if self.uncles.iter().any(|u| &u.phenotype == phenotype) {
            return false;
        }
        let uncle = Uncle {
            genome: genome.clone(),
            phenotype: phenotype.clone(),
            scores,
        };
        if self.uncles.len() < self.cap {
            self.uncles.push(uncle);
            return true;
        }
        let (worst, worst_a) = self
            .uncles
            .iter()
            .enumerate()
            .map(|(i, u)| (i, u.scores.painterly))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if scores.painterly > worst_a {
            self.uncles[worst] = uncle;
            true
        } else {
            false
        }
    }
}

/// Scores a batch of phenotypes. Results must be in input order.
pub trait Evaluator {
    fn score_all(&self, phenotypes: &[&Phenotype], assets: &SitterAssets, rules: &RuleConstants)
        -> Result<Vec<RuleScores>, Error>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SerialEvaluator;

impl Evaluator for SerialEvaluator {
    fn score_all(
        &self,
        phenotypes: &[&Phenotype],
        assets: &SitterAssets,
        rules: &RuleConstants,
    ) -> Result<Vec<RuleScores>, Error> {
        phenotypes.iter().map(|p| score_phenotype(p, assets, rules)).collect()
    }
}

/// Renders a phenotype at the sitter's size and scores it.
pub fn score_phenotype(phenotype: &Phenotype, assets: &SitterAssets, rules: &RuleConstants) -> Result<RuleScores, Error> {
    let image = render_phenotype(phenotype, assets.spec());
    score_image(&image, assets, rules)
}

/// One evaluated individual.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated {
    pub phenotype: Phenotype,
    pub scores: RuleScores,
    pub combined: f64,
}

/// One row of the per-generation log.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_combined: f64,
    /// Resemblance of the best-combined individual.
    pub best_r: f64,
    /// Highest painterly score in the population.
    pub best_a: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    /// Mode and weight the generation was scored under.
    pub mode: Mode,
    pub w_painterly: f64,
    /// Counter after this generation's controller update.
    pub stuck_counter: usize,
    pub archive_size: usize,
    pub mean_a: f64,
    pub stuck_fired: bool,
}

/// A running portrait evolution.
#[derive(Debug, Clone)]
pub struct PortraitRun {
    params: PortraitParams,
    population: Vec<CgpGenome>,
    archive: Archive,
    state: FocusState,
    history: Vec<GenerationSummary>,
    cache: BTreeMap<Phenotype, RuleScores>,
    generation: usize,
    rng: Rng,
    best: Option<(CgpGenome, Evaluated)>,
}

impl PortraitRun {
    pub fn new(params: PortraitParams, seed: u64) -> Result<Self, Error> {
        params.validate()?;
        let mut rng = crate::seeded_rng(seed);
        let population = (0..params.population)
            .map(|_| CgpGenome::random(&mut rng, params.node_count))
            .collect();
        Ok(PortraitRun {
            params,
            population,
            archive: Archive::new(params.archive_cap, params.uncle_threshold),
            state: FocusState::new(&params.focus),
            history: Vec::new(),
            cache: BTreeMap::new(),
            generation: 0,
            rng,
            best: None,
        })
    }

    pub fn params(&self) -> &PortraitParams {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut PortraitParams {
        &mut self.params
    }

    pub fn state(&self) -> &FocusState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut FocusState {
        &mut self.state
    }

    pub fn population(&self) -> &[CgpGenome] {
        &self.population
    }

    pub fn archive(&self) -> &Archive {
        &self.archive
    }

    /// Index of the next generation to be evaluated.
    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Best individual of the most recently evaluated generation.
    pub fn best(&self) -> Option<(&CgpGenome, &Evaluated)> {
        self.best.as_ref().map(|(g, e)| (g, e))
    }

    /// Scores the current population. Phenotypes seen in the previous
    /// generation reuse their cached scores.
    pub fn evaluate<E: Evaluator>(&mut self, assets: &SitterAssets, evaluator: &E) -> Result<Vec<Evaluated>, Error> {
        let phenotypes = self.population.iter().map(decode).collect::<Result<Vec<_>, _>>()?;
        let mut missing: Vec<&Phenotype> = Vec::new();
        for p in &phenotypes {
            if !self.cache.contains_key(p) && !missing.contains(&p) {
                missing.push(p);
            }
        }
        let fresh = evaluator.score_all(&missing, assets, &self.params.rules)?;
        let mut cache = BTreeMap::new();
        for (p, s) in missing.into_iter().zip(fresh) {
            cache.insert(p.clone(), s);
        }
        for p in &phenotypes {
            if let Some(s) = self.cache.get(p) {
                cache.insert(p.clone(), *s);
            }
        }
        let evaluated = phenotypes
            .into_iter()
            .map(|phenotype| {
                let scores = cache[&phenotype];
                let combined = combined_fitness(&scores, &self.state);
                Evaluated {
                    phenotype,
                    scores,
                    combined,
                }
            })
            .collect();
        self.cache = cache;
        Ok(evaluated)
    }

    /// Evaluates the current generation, updates the archive and the focus
    /// controller, and breeds the next generation.
    pub fn step<E: Evaluator>(&mut self, assets: &SitterAssets, evaluator: &E) -> Result<GenerationRecord, Error> {
        let evaluated = self.evaluate(assets, evaluator)?;
        let elite_idx = argmax(evaluated.iter().map(|e| e.combined));
        let best_r_idx = argmax(evaluated.iter().map(|e| e.scores.resemblance));
        let scored_state = self.state.clone();

        for (genome, e) in self.population.iter().zip(&evaluated) {
            self.archive.offer(genome, &e.phenotype, e.scores);
        }

        let elite = &evaluated[elite_idx];
        self.history.push(GenerationSummary {
            best_phenotype: elite.phenotype.clone(),
            best_combined: elite.combined,
            best_r: evaluated[best_r_idx].scores.resemblance,
        });
        let update = update_focus(&self.state, &self.history, &self.params.focus);
        self.state = update.state;
        if self.history.len() > 2 {
            self.history.remove(0);
        }

        let mean_a = evaluated.iter().map(|e| e.scores.painterly).sum::<f64>() / evaluated.len() as f64;
        let record = GenerationRecord {
            generation: self.generation,
            best_combined: elite.combined,
            best_r: elite.scores.resemblance,
            best_a: evaluated.iter().map(|e| e.scores.painterly).fold(0.0, f64::max),
            p1: elite.scores.p1_composition,
            p2: elite.scores.p2_tonal_color,
            p3: elite.scores.p3_dominance,
            mode: scored_state.mode,
            w_painterly: scored_state.w_painterly,
            stuck_counter: self.state.stuck_counter,
            archive_size: self.archive.len(),
            mean_a,
            stuck_fired: update.stuck_fired,
        };

        let mut elite_genome = self.population[elite_idx].clone();
        if update.stuck_fired {
            elite_genome = neutral_variant(&elite_genome, &mut self.rng, self.params.node_count).genome;
        }
        self.best = Some((elite_genome.clone(), elite.clone()));
        self.population = self.breed(elite_genome, &evaluated, best_r_idx);
        self.generation += 1;
        Ok(record)
    }

    fn breed(&mut self, elite: CgpGenome, evaluated: &[Evaluated], best_r_idx: usize) -> Vec<CgpGenome> {
        let size = self.params.population;
        let mut next = Vec::with_capacity(size);
        if self.state.mode == Mode::Associative {
            next.push(self.population[best_r_idx].clone());
        }
        if !self.archive.is_empty() {
            for _ in 0..self.params.uncle_matings {
                if next.len() + 1 >= size {
                    break;
                }
                let uncle = &self.archive.uncles()[self.rng.gen_range(0..self.archive.len())];
                next.push(uniform_crossover(&uncle.genome, &elite, &mut self.rng));
            }
        }
        while next.len() + 1 < size {
            let winner = tournament(evaluated, self.params.tournament, &mut self.rng);
            next.push(mutate(&self.population[winner], &mut self.rng, self.params.mutation));
        }
        next.insert(0, elite);
        next
    }
}

/// First index of the largest value.
fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Draws `size` contestants with replacement; the fittest wins, lower index
/// breaking ties.
fn tournament(evaluated: &[Evaluated], size: usize, rng: &mut Rng) -> usize {
    let mut winner = rng.gen_range(0..evaluated.len());
    for _ in 1..size {
        let c = rng.gen_range(0..evaluated.len());
        let (cf, wf) = (evaluated[c].combined, evaluated[winner].combined);
        if cf > wf || (cf == wf && c < winner) {
            winner = c;
        }
    }
    winner
}

/// Runs `params.generations` generations and returns one record each.
pub fn evolve<E: Evaluator>(
    params: PortraitParams,
    assets: &SitterAssets,
    seed: u64,
    evaluator: &E,
) -> Result<(PortraitRun, Vec<GenerationRecord>), Error> {
    let mut run = PortraitRun::new(params, seed)?;
    let mut records = Vec::with_capacity(params.generations);
    for _ in 0..params.generations {
        records.push(run.step(assets, evaluator)?);
    }
    Ok((run, records))
}
