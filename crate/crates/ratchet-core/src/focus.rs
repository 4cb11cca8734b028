//! Contextual focus in the society: the fitness function flips on a fixed
//! schedule, and each agent raises its mutation rate when it notices it is
//! doing worse than it recently did, then lets it decay back once it
//! performs well again.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::evoc::{FitnessParams, Metrics, World, WorldConfig, DEFAULT_MUTATION_RATE};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ShiftKind {
    #[default]
    HeadFlip,
    SymFlip,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct FitnessSchedule {
    pub enabled: bool,
    pub period: usize,
    pub shift_kind: ShiftKind,
}

impl Default for FitnessSchedule {
    fn default() -> Self {
        FitnessSchedule {
            enabled: true,
            period: 50,
            shift_kind: ShiftKind::HeadFlip,
        }
    }
}

impl FitnessSchedule {
    pub fn disabled() -> Self {
        FitnessSchedule {
            enabled: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.enabled && self.period == 0 {
            return Err(Error::config("period", "shift period must be >= 1"));
        }
        Ok(())
    }

    /// Whether the fitness function flips at the start of `iteration`.
    /// Iteration 0 is the initial state and never shifts.
    pub fn shifts_at(&self, iteration: usize) -> bool {
        self.enabled && iteration > 0 && iteration % self.period == 0
    }
}

/// Flips the head mode, the symmetry mode or both when `iteration` falls on
/// a shift boundary; otherwise returns `params` unchanged.
pub fn shift_fitness(params: &FitnessParams, schedule: &FitnessSchedule, iteration: usize) -> FitnessParams {
    let mut out = *params;
    if schedule.shifts_at(iteration) {
        if matches!(schedule.shift_kind, ShiftKind::HeadFlip | ShiftKind::Both) {
            out.head_mode = out.head_mode.flipped();
        }
        if matches!(schedule.shift_kind, ShiftKind::SymFlip | ShiftKind::Both) {
            out.sym_mode = out.sym_mode.flipped();
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct FocusController {
    /// Base (analytic) per-part mutation probability.
    pub p_lo: f64,
    /// Elevated (associative) probability.
    pub p_hi: f64,
    /// An agent underperforms when its fitness falls below
    /// `theta * recent_best`.
    pub theta: f64,
    pub decay: f64,
    /// Iterations of own history searched for `recent_best`.
    pub window: usize,
}

impl Default for FocusController {
    fn default() -> Self {
        FocusController {
            p_lo: DEFAULT_MUTATION_RATE,
            p_hi: 0.5,
            theta: 0.85,
            decay: 0.9,
            window: 10,
        }
    }
}

impl FocusController {
    /// A controller that never leaves the base rate.
    pub fn pinned(rate: f64) -> Self {
        FocusController {
            p_lo: rate,
            p_hi: rate,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.p_lo > 0.0 && self.p_lo <= self.p_hi && self.p_hi <= 1.0) {
            return Err(Error::config("p_hi", "requires 0 < p_lo <= p_hi <= 1"));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::config("theta", "requires 0 < theta <= 1"));
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(Error::config("decay", "requires 0 < decay < 1"));
        }
        if self.window == 0 {
            return Err(Error::config("window", "lookback window must be >= 1"));
        }
        Ok(())
    }
}

/// Next mutation rate for one agent.
///
/// * below `theta * recent_best`: jump to `p_hi`;
/// * improving on the previous iteration, or back at the recent best:
///   decay geometrically, never below `p_lo`;
/// * otherwise unchanged.
///
/// The result is always clamped into `[p_lo, p_hi]`.
pub fn update_mutation_rate(
    rate: f64,
    controller: &FocusController,
    current_fitness: f64,
    previous_fitness: f64,
    recent_best: f64,
) -> f64 {
    let next = if current_fitness < controller.theta * recent_best {
        controller.p_hi
    } else if current_fitness > previous_fitness || current_fitness >= recent_best {
        f64::max(controller.p_lo, controller.decay * rate)
    } else {
        rate
    };
    next.clamp(controller.p_lo, controller.p_hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CfConfig {
    pub world: WorldConfig,
    pub schedule: FitnessSchedule,
    pub controller: FocusController,
}

impl CfConfig {
    pub fn validate(&self) -> Result<(), Error> {
        self.world.validate()?;
        self.schedule.validate()?;
        self.controller.validate()
    }
}

/// One row of a contextual-focus run: the society metrics plus the fitness
/// function in force during that iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfMetrics {
    pub metrics: Metrics,
    pub params: FitnessParams,
}

/// Fixed-length per-agent fitness history.
struct History {
    window: usize,
    values: Vec<VecDeque<f64>>,
}

impl History {
    fn new(agents: usize, window: usize) -> Self {
        History {
            window,
            values: (0..agents).map(|_| VecDeque::with_capacity(window)).collect(),
        }
    }

    fn best(&self, agent: usize) -> Option<f64> {
        self.values[agent].iter().copied().reduce(f64::max)
    }

    fn last(&self, agent: usize) -> Option<f64> {
        self.values[agent].back().copied()
    }

    fn push(&mut self, agent: usize, value: f64) {
        let q = &mut self.values[agent];
        if q.len() == self.window {
            q.pop_front();
        }
        q.push_back(value);
    }
}

/// Runs the society with scheduled fitness shifts and per-agent mutation
/// control. Each iteration: apply any shift, tick, then update every
/// agent's rate from its post-tick fitness against its own history.
pub fn run_cf(config: &CfConfig) -> Result<Vec<CfMetrics>, Error> {
    config.validate()?;
    let mut world = World::new(config.world.clone())?;
    for agent in world.agents_mut() {
        agent.mutation_rate = config.controller.p_lo;
    }
    let n = world.agents().len();
    let mut history = History::new(n, config.controller.window);
    for (i, &f) in world.fitness().iter().enumerate() {
        history.push(i, f);
    }

    let mut series = Vec::with_capacity(config.world.iterations + 1);
    series.push(CfMetrics {
        metrics: world.metrics(),
        params: *world.params(),
    });
    for t in 1..=config.world.iterations {
        if config.schedule.shifts_at(t) {
            let shifted = shift_fitness(world.params(), &config.schedule, t);
            world.set_params(shifted);
        }
        world.tick();
        let fitness: Vec<f64> = world.fitness().to_vec();
        for (i, agent) in world.agents_mut().iter_mut().enumerate() {
            let recent_best = history.best(i).unwrap_or(fitness[i]);
            let previous = history.last(i).unwrap_or(fitness[i]);
            agent.mutation_rate = update_mutation_rate(
                agent.mutation_rate,
                &config.controller,
                fitness[i],
                previous,
                recent_best,
            );
            history.push(i, fitness[i]);
        }
        series.push(CfMetrics {
            metrics: world.metrics(),
            params: *world.params(),
        });
    }
    Ok(series)
}

/// Iterations after a shift at `shift` until mean fitness is back to
/// `fraction` of its value just before the shift. `None` if it never
/// recovers within the series.
pub fn recovery_time(series: &[CfMetrics], shift: usize, fraction: f64) -> Option<usize> {
    let before = series.get(shift.checked_sub(1)?)?.metrics.mean_fitness;
    series[shift..]
        .iter()
        .position(|row| row.metrics.mean_fitness >= fraction * before)
}
