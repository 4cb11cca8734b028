//! Cartesian genetic programming over HSV pixel programs.
//!
//! A genome is a fixed row of two-input nodes. Only nodes reachable from the
//! three outputs (H, S, V) are executed; every other gene is free to drift
//! without changing the painted image.

mod function;
mod genome;
mod mutate;
mod phenotype;
mod render;

pub use function::{apply_function, uses_parameter, uses_second_input, FUNCTION_COUNT};
pub use genome::{
    CgpGenome, GenomeParseError, Node, DEFAULT_NODES, DEFAULT_PM_SIGMA, INPUTS, PM_SIGMA_MAX,
    PM_SIGMA_MIN,
};
pub use mutate::{
    mutate, neutral_genes, neutral_variant, perturb_pm, uniform_crossover, MutationRates,
    NeutralGene, NeutralVariant,
};
pub use phenotype::{active_mask, decode, ActiveNode, Phenotype};
pub use render::{quantize, render, render_phenotype, render_rows, HsvImage, ImageSpec};
