//! Contextual-focus portrait evolution.
//!
//! Images from [`crate::cgp`] programs are scored for resemblance to a sitter
//! and against three painterly rules. A controller blends the two, normally
//! 80/20 in favour of resemblance, and shifts weight to the painterly rules
//! when progress stalls. Individuals that score very high on the painterly
//! rules are archived and mated back into the population.

mod assets;
mod evolve;
mod focus;
mod scores;

pub use assets::{synthetic_sitter, SitterAssets};
pub use evolve::{
    evolve, score_phenotype, Archive, Evaluated, Evaluator, GenerationRecord, PortraitParams, PortraitRun,
    SerialEvaluator, Uncle,
};
pub use focus::{combined_fitness, update_focus, FocusParams, FocusState, FocusUpdate, GenerationSummary, Mode};
pub use scores::{blend, painterly_rules, resemblance, score_image, PainterlyAggregate, RuleConstants, RuleScores};
