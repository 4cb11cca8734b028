//! The artificial society: an action space scored by a fixed fitness
//! function, and a lattice of agents that invent and imitate actions.

mod action;
mod world;

pub use action::{
    chain_fitness, oracle_enumerate, step_fitness, validate_chain, ActionStep, BodyPart,
    ChainViolation, ChainedAction, FitnessParams, HeadMode, OracleTable, Posture, SymMode,
};
pub use world::{
    diversity, imitate, invent, run, trend_bias, Agent, Inventor, Metrics, PostureSampler, Role,
    RoleMode, TrendInventor, TrendStats, World, WorldConfig, DEFAULT_MUTATION_RATE,
    TREND_MIN_SAMPLES,
};

