use crate::cgp::Phenotype;
use crate::Error;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::scores::{blend, RuleScores};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Resemblance-led: painterly weight pinned at its floor.
    Analytic,
    /// Painterly-led: painterly weight sliding toward its ceiling.
    Associative,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Associative => "associative",
        }
    }
}

/// Trigger thresholds of the portrait fitness controller.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct FocusParams {
    /// Painterly weight in analytic mode (the 80/20 blend).
    pub w_analytic: f64,
    /// Ceiling reached by the associative slide.
    pub w_max: f64,
    /// The stuck action fires once the fittest phenotype has been unchanged
    /// for more than this many consecutive generations.
    pub stuck_generations: usize,
    /// Smallest best-combined gain that counts as progress.
    pub epsilon: f64,
    /// Generations without progress before switching to associative mode.
    pub plateau_window: usize,
    /// Generations over which the painterly weight slides to `w_max`.
    pub slide_window: usize,
    /// Relative best-resemblance gain over its value at the switch that
    /// returns the controller to analytic mode.
    pub return_delta: f64,
}

impl Default for FocusParams {
    fn default() -> Self {
        FocusParams {
            w_analytic: 0.2,
            w_max: 0.8,
            stuck_generations: 3,
            epsilon: 1e-4,
            plateau_window: 10,
            slide_window: 10,
            return_delta: 0.02,
        }
    }
}

impl FocusParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(0.0 <= self.w_analytic && self.w_analytic < self.w_max && self.w_max <= 1.0) {
            return Err(Error::config("w_max", "requires 0 <= w_analytic < w_max <= 1"));
        }
        if self.plateau_window == 0 {
            return Err(Error::config("plateau_window", "must be >= 1"));
        }
        if self.slide_window == 0 {
            return Err(Error::config("slide_window", "must be >= 1"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::config("epsilon", "must be >= 0"));
        }
        if !(self.return_delta >= 0.0) {
            return Err(Error::config("return_delta", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FocusState {
    pub mode: Mode,
    pub w_painterly: f64,
    /// Consecutive generations the fittest phenotype has not changed.
    pub stuck_counter: usize,
    /// Consecutive generations without best-combined progress.
    pub plateau_counter: usize,
    /// Best resemblance when associative mode was entered.
    pub best_r_at_switch: f64,
    /// Position on the associative slide, 1..=slide_window.
    pub slide_step: usize,
}

impl FocusState {
    pub fn new(params: &FocusParams) -> Self {
        FocusState {
            mode: Mode::Analytic,
            w_painterly: params.w_analytic,
            stuck_counter: 0,
            plateau_counter: 0,
            best_r_at_switch: 0.0,
            slide_step: 0,
        }
    }

    fn slide_weight(&self, params: &FocusParams) -> f64 {
        let t = self.slide_step as f64 / params.slide_window as f64;
        params.w_analytic + (params.w_max - params.w_analytic) * t
    }
}

/// Combined portrait fitness under the controller's current blend.
pub fn combined_fitness(scores: &RuleScores, state: &FocusState) -> f64 {
    blend(scores, state.w_painterly)
}

/// What the controller saw in one generation.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationSummary {
    pub best_phenotype: Phenotype,
    pub best_combined: f64,
    /// Highest resemblance anywhere in the population.
    pub best_r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FocusUpdate {
    pub state: FocusState,
    /// The incumbent should be swapped for a neutral variant.
    pub stuck_fired: bool,
    pub switched_to_associative: bool,
    pub returned_to_analytic: bool,
}

/// Advances the controller by one generation. `history` ends with the
/// generation just evaluated.
///
/// * stuck: the fittest phenotype unchanged for more than
///   `stuck_generations` generations requests a neutral substitution and
///   restarts the count;
/// * plateau: in analytic mode, `plateau_window` generations of
///   best-combined gain below `epsilon` switch to associative mode, whose
///   painterly weight then climbs linearly to `w_max` over `slide_window`
///   generations (the switch itself is the first step);
/// * return: in associative mode, best resemblance exceeding its value at
///   the switch by `return_delta` (relative) restores analytic mode.
pub fn update_focus(state: &FocusState, history: &[GenerationSummary], params: &FocusParams) -> FocusUpdate {
    let mut next = state.clone();
    let mut update = FocusUpdate {
        state: state.clone(),
        stuck_fired: false,
        switched_to_associative: false,
        returned_to_analytic: false,
    };
    let Some(current) = history.last() else {
        return update;
    };
    let previous = history.len().checked_sub(2).map(|i| &history[i]);

    if let Some(prev) = previous {
        if prev.best_phenotype == current.best_phenotype {
            next.stuck_counter += 1;
        } else {
            next.stuck_counter = 0;
        }
        if current.best_combined - prev.best_combined < params.epsilon {
            next.plateau_counter += 1;
        } else {
            next.plateau_counter = 0;
        }
    }
    if next.stuck_counter > params.stuck_generations {
        update.stuck_fired = true;
        next.stuck_counter = 0;
    }

    match next.mode {
        Mode::Analytic => {
            if next.plateau_counter >= params.plateau_window {
                next.mode = Mode::Associative;
                next.best_r_at_switch = current.best_r;
                next.slide_step = 1;
                next.plateau_counter = 0;
                next.w_painterly = next.slide_weight(params);
                update.switched_to_associative = true;
            }
        }
        Mode::Associative => {
            if current.best_r > next.best_r_at_switch * (1.0 + params.return_delta) {
                next.mode = Mode::Analytic;
                next.w_painterly = params.w_analytic;
                next.slide_step = 0;
                next.plateau_counter = 0;
                update.returned_to_analytic = true;
            } else {
                next.slide_step = usize::min(next.slide_step + 1, params.slide_window);
                next.w_painterly = next.slide_weight(params);
            }
        }
    }
    update.state = next;
    update
}
