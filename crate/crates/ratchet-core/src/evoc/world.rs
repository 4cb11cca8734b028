use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::action::{chain_fitness_unchecked, ActionStep, BodyPart, ChainedAction, FitnessParams, Posture};
use crate::error::check_probability;
use crate::{Error, Rng};

/// Per-part probability of changing posture during invention.
pub const DEFAULT_MUTATION_RATE: f64 = 1.0 / 6.0;

/// Samples an agent needs before its movement trend biases invention.
pub const TREND_MIN_SAMPLES: u64 = 10;

/// Steps with at least this many moving parts count as high-movement.
const HIGH_MOVE_PARTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Creator,
    Imitator,
    Mixed,
}

/// How roles are handed out when a world is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RoleMode {
    /// Every agent invents with probability `p_invent` each tick and
    /// imitates otherwise.
    #[default]
    Mixed,
    /// `fraction_creators` of the agents, scattered at random, only invent;
    /// the rest only imitate.
    Dispersed,
}

/// Running means of the fitness of an agent's own inventions, split by how
/// much the invented first step moves.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrendStats {
    pub mean_fitness_highmove: f64,
    pub mean_fitness_lowmove: f64,
    pub highmove_samples: u64,
    pub lowmove_samples: u64,
}

impl TrendStats {
    pub fn samples(&self) -> u64 {
        self.highmove_samples + self.lowmove_samples
    }

    pub fn record(&mut self, step: &ActionStep, fitness: f64) {
        if step.moving_parts() >= HIGH_MOVE_PARTS {
            self.highmove_samples += 1;
            self.mean_fitness_highmove +=
                (fitness - self.mean_fitness_highmove) / self.highmove_samples as f64;
        } else {
            self.lowmove_samples += 1;
            self.mean_fitness_lowmove +=
                (fitness - self.mean_fitness_lowmove) / self.lowmove_samples as f64;
        }
    }
}

/// Distribution over postures used when invention changes a body part.
/// UP and DOWN always share the moving mass evenly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostureSampler {
    pub p_up: f64,
    pub p_down: f64,
    pub p_still: f64,
}

impl PostureSampler {
    pub const UNIFORM: PostureSampler = PostureSampler {
        p_up: 1.0 / 3.0,
        p_down: 1.0 / 3.0,
        p_still: 1.0 / 3.0,
    };

    pub fn with_still(p_still: f64) -> Self {
        let moving = (1.0 - p_still) / 2.0;
        PostureSampler {
            p_up: moving,
            p_down: moving,
            p_still,
        }
    }

    pub fn probability(&self, posture: Posture) -> f64 {
        match posture {
            Posture::Up => self.p_up,
            Posture::Down => self.p_down,
            Posture::Still => self.p_still,
        }
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Posture {
        let u: f64 = rng.gen::<f64>() * (self.p_up + self.p_down + self.p_still);
        if u < self.p_up {
            Posture::Up
        } else if u < self.p_up + self.p_down {
            Posture::Down
        } else {
            Posture::Still
        }
    }

    /// Draws a posture different from `current`, with the remaining two
    /// weighted by this distribution.
    pub fn sample_change<R: rand::Rng + ?Sized>(&self, current: Posture, rng: &mut R) -> Posture {
        let mut others = Posture::ALL.into_iter().filter(|&p| p != current);
        let (a, b) = (others.next().unwrap(), others.next().unwrap());
        let (wa, wb) = (self.probability(a), self.probability(b));
        let u: f64 = rng.gen::<f64>() * (wa + wb);
        if u < wa {
            a
        } else {
            b
        }
    }
}

/// Chooses the posture sampler for invention from an agent's learned trend.
pub fn trend_bias(trend: &TrendStats, learning_enabled: bool) -> PostureSampler {
    if !learning_enabled || trend.samples() < TREND_MIN_SAMPLES {
        return PostureSampler::UNIFORM;
    }
    // Both means start at 0, so a side that was never sampled loses ties
    // only if the other side saw positive fitness.
    if trend.mean_fitness_highmove > trend.mean_fitness_lowmove {
        PostureSampler::with_still(0.2)
    } else if trend.mean_fitness_highmove < trend.mean_fitness_lowmove {
        PostureSampler::with_still(0.8)
    } else {
        PostureSampler::UNIFORM
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub current_action: ChainedAction,
    pub role: Role,
    pub trend: TrendStats,
    pub mutation_rate: f64,
}

impl Agent {
    pub fn new(role: Role) -> Self {
        Agent {
            current_action: ChainedAction::still(),
            role,
            trend: TrendStats::default(),
            mutation_rate: DEFAULT_MUTATION_RATE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct WorldConfig {
    pub width: usize,
    pub height: usize,
    pub chaining_enabled: bool,
    pub learning_enabled: bool,
    /// Probability that a MIXED agent invents rather than imitates in a tick.
    /// Calibration choice; not a published value.
    pub p_invent: f64,
    /// Probability of appending one more step to a chain during invention.
    /// Calibration choice; not a published value.
    pub p_cont: f64,
    pub role_mode: RoleMode,
    /// Share of creators when `role_mode` is `dispersed`.
    pub fraction_creators: f64,
    pub iterations: usize,
    /// Filled from the run seed by the harness.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub seed: u64,
    pub fitness: FitnessParams,
    pub max_chain_length: usize,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            width: 10,
            height: 10,
            chaining_enabled: false,
            learning_enabled: false,
            p_invent: 0.5,
            p_cont: 0.5,
            role_mode: RoleMode::Mixed,
            fraction_creators: 0.5,
            iterations: 100,
            seed: 0,
            fitness: FitnessParams::default(),
            max_chain_length: 100,
        }
    }
}

impl WorldConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.width == 0 {
            return Err(Error::config("width", "lattice width must be >= 1"));
        }
        if self.height == 0 {
            return Err(Error::config("height", "lattice height must be >= 1"));
        }
        check_probability("p_invent", self.p_invent)?;
        check_probability("p_cont", self.p_cont)?;
        check_probability("fraction_creators", self.fraction_creators)?;
        if self.max_chain_length == 0 {
            return Err(Error::config(
                "max_chain_length",
                "the chain length cap must be >= 1",
            ));
        }
        self.fitness.validate()
    }

    pub fn agents(&self) -> usize {
        self.width * self.height
    }
}

/// Snapshot of the society after a tick. Iteration 0 is the initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub iteration: usize,
    pub mean_fitness: f64,
    pub max_fitness: f64,
    pub diversity: usize,
    pub mean_chain_length: f64,
    pub mean_mutation_rate: f64,
}

/// Source of new candidate actions. The default [`TrendInventor`] mutates
/// the agent's current first step under its learned movement trend; other
/// implementations (for example a learned network) can replace it.
pub trait Inventor {
    fn invent(&self, agent: &Agent, config: &WorldConfig, rng: &mut Rng) -> ChainedAction;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TrendInventor;

impl Inventor for TrendInventor {
    fn invent(&self, agent: &Agent, config: &WorldConfig, rng: &mut Rng) -> ChainedAction {
        invent(agent, config, rng)
    }
}

/// Invents a new action from the agent's current one.
///
/// Each body part of the first step changes with probability
/// `agent.mutation_rate`; a changed part takes one of the two other
/// postures, weighted by the agent's trend bias. With chaining enabled and a
/// moving arm in the new first step, further steps are appended while a
/// `p_cont` draw succeeds: each reverses the chain arm and draws the other
/// parts uniformly.
pub fn invent<R: rand::Rng + ?Sized>(agent: &Agent, config: &WorldConfig, rng: &mut R) -> ChainedAction {
    let sampler = trend_bias(&agent.trend, config.learning_enabled);
    let mut first = *agent.current_action.first();
    for part in BodyPart::ALL {
        if rng.gen_bool(agent.mutation_rate) {
            let changed = sampler.sample_change(first.posture(part), rng);
            first.set(part, changed);
        }
    }

    let chain_arm = match (config.chaining_enabled, first.first_moving_arm()) {
        (true, Some(arm)) => arm,
        _ => return ChainedAction::single(first),
    };
    let mut steps = alloc::vec![first];
    while steps.len() < config.max_chain_length && rng.gen_bool(config.p_cont) {
        let prev = steps[steps.len() - 1].posture(chain_arm);
        let mut next = ActionStep::STILL;
        for part in BodyPart::ALL {
            let posture = if part == chain_arm {
                // prev is moving: step 1 moves the arm and every appended
                // step reverses it.
                prev.opposite().expect("chain arm is moving")
            } else {
                Posture::ALL[rng.gen_range(0..3)]
            };
            next.set(part, posture);
        }
        steps.push(next);
    }
    if steps.len() == 1 {
        ChainedAction::single(first)
    } else {
        ChainedAction::from_parts_unchecked(steps, Some(chain_arm))
    }
}

/// Scans the neighbours in random order and returns the index of the first
/// one strictly fitter than `own_fitness`.
fn imitate_index<R: rand::Rng + ?Sized>(
    own_fitness: f64,
    neighbor_fitness: &[f64],
    rng: &mut R,
) -> Option<usize> {
    let mut order: Vec<usize> = (0..neighbor_fitness.len()).collect();
    order.shuffle(rng);
    order.into_iter().find(|&j| neighbor_fitness[j] > own_fitness)
}

/// Returns the first strictly fitter neighbour action, scanning in random
/// order, or the agent's own action if none is fitter.
pub fn imitate<'a, R: rand::Rng + ?Sized>(
    own: &'a ChainedAction,
    neighbors: &[&'a ChainedAction],
    params: &FitnessParams,
    rng: &mut R,
) -> &'a ChainedAction {
    let own_fitness = chain_fitness_unchecked(own, params);
    let fitness: Vec<f64> = neighbors
        .iter()
        .map(|a| chain_fitness_unchecked(a, params))
        .collect();
    match imitate_index(own_fitness, &fitness, rng) {
        Some(j) => neighbors[j],
        None => own,
    }
}

/// Number of structurally distinct actions (by step list).
pub fn diversity<'a>(actions: impl IntoIterator<Item = &'a ChainedAction>) -> usize {
    actions
        .into_iter()
        .map(|a| a.steps())
        .collect::<BTreeSet<&[ActionStep]>>()
        .len()
}

/// A toroidal lattice of agents.
#[derive(Debug, Clone)]
pub struct World<I: Inventor = TrendInventor> {
    config: WorldConfig,
    params: FitnessParams,
    agents: Vec<Agent>,
    fitness: Vec<f64>,
    neighbors: Vec<[usize; 4]>,
    inventor: I,
    rng: Rng,
    iteration: usize,
}

impl World<TrendInventor> {
    pub fn new(config: WorldConfig) -> Result<Self, Error> {
        Self::with_inventor(config, TrendInventor)
    }
}

impl<I: Inventor> World<I> {
    pub fn with_inventor(config: WorldConfig, inventor: I) -> Result<Self, Error> {
        config.validate()?;
        let mut rng = crate::seeded_rng(config.seed);
        let n = config.agents();
        let roles = match config.role_mode {
            RoleMode::Mixed => alloc::vec![Role::Mixed; n],
            RoleMode::Dispersed => {
                let creators = libm::round(config.fraction_creators * n as f64) as usize;
                let mut roles: Vec<Role> = (0..n)
                    .map(|i| if i < creators { Role::Creator } else { Role::Imitator })
                    .collect();
                roles.shuffle(&mut rng);
                roles
            }
        };
        let agents: Vec<Agent> = roles.into_iter().map(Agent::new).collect();
        let (w, h) = (config.width, config.height);
        let neighbors = (0..n)
            .map(|i| {
                let (r, c) = (i / w, i % w);
                [
                    ((r + h - 1) % h) * w + c,
                    ((r + 1) % h) * w + c,
                    r * w + (c + w - 1) % w,
                    r * w + (c + 1) % w,
                ]
            })
            .collect();
        let params = config.fitness;
        let mut world = World {
            config,
            params,
            fitness: Vec::new(),
            agents,
            neighbors,
            inventor,
            rng,
            iteration: 0,
        };
        world.refresh_fitness();
        Ok(world)
    }

    pub fn config(&self) -> &WorldConfig {
        &self.config
    }

    pub fn params(&self) -> &FitnessParams {
        &self.params
    }

    /// Replaces the fitness function; every agent is re-scored.
    pub fn set_params(&mut self, params: FitnessParams) {
        self.params = params;
        self.refresh_fitness();
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agents_mut(&mut self) -> &mut [Agent] {
        &mut self.agents
    }

    /// Overwrites one agent's action, re-scoring it.
    pub fn set_action(&mut self, index: usize, action: ChainedAction) {
        self.fitness[index] = chain_fitness_unchecked(&action, &self.params);
        self.agents[index].current_action = action;
    }

    /// Current fitness of every agent under the active parameters.
    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    pub fn neighbors(&self, index: usize) -> [usize; 4] {
        self.neighbors[index]
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    fn refresh_fitness(&mut self) {
        self.fitness = self
            .agents
            .iter()
            .map(|a| chain_fitness_unchecked(&a.current_action, &self.params))
            .collect();
    }

    pub fn metrics(&self) -> Metrics {
        let n = self.agents.len() as f64;
        Metrics {
            iteration: self.iteration,
            mean_fitness: self.fitness.iter().sum::<f64>() / n,
            max_fitness: self.fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            diversity: diversity(self.agents.iter().map(|a| &a.current_action)),
            mean_chain_length: self
                .agents
                .iter()
                .map(|a| a.current_action.len() as f64)
                .sum::<f64>()
                / n,
            mean_mutation_rate: self.agents.iter().map(|a| a.mutation_rate).sum::<f64>() / n,
        }
    }

    /// One round of invention and imitation.
    ///
    /// Agents act in lattice order against the pre-tick state, and all
    /// adoptions land together at the end. A new action (invented or
    /// imitated) is adopted only if strictly fitter than the current one.
    pub fn tick(&mut self) -> Metrics {
        let mut adopted: Vec<Option<(ChainedAction, f64)>> = alloc::vec![None; self.agents.len()];
        for i in 0..self.agents.len() {
            let invents = match self.agents[i].role {
                Role::Creator => true,
                Role::Imitator => false,
                Role::Mixed => self.rng.gen_bool(self.config.p_invent),
            };
            if invents {
                let candidate = self
                    .inventor
                    .invent(&self.agents[i], &self.config, &mut self.rng);
                let f = chain_fitness_unchecked(&candidate, &self.params);
                self.agents[i].trend.record(candidate.first(), f);
                if f > self.fitness[i] {
                    adopted[i] = Some((candidate, f));
                }
            } else {
                let nb = self.neighbors[i];
                let nf = nb.map(|j| self.fitness[j]);
                if let Some(k) = imitate_index(self.fitness[i], &nf, &mut self.rng) {
                    let j = nb[k];
                    adopted[i] = Some((self.agents[j].current_action.clone(), nf[k]));
                }
            }
        }
        for (i, slot) in adopted.into_iter().enumerate() {
            if let Some((action, f)) = slot {
                self.agents[i].current_action = action;
                self.fitness[i] = f;
            }
        }
        self.iteration += 1;
        self.metrics()
    }
}

/// Builds a world from `config` and runs it, returning metrics for
/// iteration 0 (initial state) through `config.iterations`.
pub fn run(config: &WorldConfig) -> Result<Vec<Metrics>, Error> {
    let mut world = World::new(config.clone())?;
    let mut series = Vec::with_capacity(config.iterations + 1);
    series.push(world.metrics());
    for _ in 0..config.iterations {
        series.push(world.tick());
    }
    Ok(series)
}
