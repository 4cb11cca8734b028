use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::function::{uses_parameter, uses_second_input, FUNCTION_COUNT};
use super::genome::{CgpGenome, INPUTS, PM_SIGMA_MAX, PM_SIGMA_MIN};
use super::phenotype::active_mask;

/// Multiplicative updates applied to a parameter's step size.
const SIGMA_UP: f64 = 1.15;
const SIGMA_DOWN: f64 = 0.87;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct MutationRates {
    /// Per-gene probability of rerolling a function, connection or output
    /// gene.
    pub point: f64,
    /// Whether parameter genes take a self-adapted random step.
    pub pm_step: bool,
}

impl Default for MutationRates {
    fn default() -> Self {
        MutationRates {
            point: 0.04,
            pm_step: true,
        }
    }
}

impl MutationRates {
    pub const NONE: MutationRates = MutationRates {
        point: 0.0,
        pm_step: false,
    };
}

/// Adds `step` to a parameter gene, clamped to [0, 255].
pub fn perturb_pm(pm: f64, step: f64) -> f64 {
    // + 0.0 folds a -0.0 result into 0.0
    (pm + step).clamp(0.0, 255.0) + 0.0
}

/// Point mutation plus self-adaptive parameter steps.
///
/// Function, connection and output genes are each rerolled with probability
/// `rates.point`. When `rates.pm_step` is set, every node first scales its
/// step size by 1.15 or 0.87 (even odds) and then moves its parameter by a
/// uniform step in `[-sigma, sigma]`.
pub fn mutate<R: rand::Rng + ?Sized>(genome: &CgpGenome, rng: &mut R, rates: MutationRates) -> CgpGenome {
    let mut out = genome.clone();
    for (i, node) in out.nodes.iter_mut().enumerate() {
        if rng.gen_bool(rates.point) {
            node.function = rng.gen_range(1..=FUNCTION_COUNT);
        }
        if rng.gen_bool(rates.point) {
            node.conn_a = rng.gen_range(0..i + INPUTS);
        }
        if rng.gen_bool(rates.point) {
            node.conn_b = rng.gen_range(0..i + INPUTS);
        }
        if rates.pm_step {
            let factor = if rng.gen_bool(0.5) { SIGMA_UP } else { SIGMA_DOWN };
            node.pm_sigma = (node.pm_sigma * factor).clamp(PM_SIGMA_MIN, PM_SIGMA_MAX);
            let step = rng.gen_range(-1.0..=1.0) * node.pm_sigma;
            node.pm = perturb_pm(node.pm, step);
        }
    }
    let limit = out.nodes.len() + INPUTS;
    for o in out.outputs.iter_mut() {
        if rng.gen_bool(rates.point) {
            *o = rng.gen_range(0..limit);
        }
    }
    out
}

/// A gene whose value the phenotype does not read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeutralGene {
    Function(usize),
    ConnA(usize),
    ConnB(usize),
    Pm(usize),
}

/// Genes that can change without changing the phenotype: every gene of an
/// inactive node, the second connection of an active unary node, and the
/// parameter of an active node whose function ignores it. Step sizes are
/// strategy parameters, not program genes, and are not listed.
pub fn neutral_genes(genome: &CgpGenome) -> Vec<NeutralGene> {
    let active = active_mask(genome);
    let mut genes = Vec::new();
    for (i, node) in genome.nodes.iter().enumerate() {
        if !active[i] {
            genes.extend([
                NeutralGene::Function(i),
                NeutralGene::ConnA(i),
                NeutralGene::ConnB(i),
                NeutralGene::Pm(i),
            ]);
            continue;
        }
        if !uses_second_input(node.function) {
            genes.push(NeutralGene::ConnB(i));
        }
        if !uses_parameter(node.function) {
            genes.push(NeutralGene::Pm(i));
        }
    }
    genes
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeutralVariant {
    pub genome: CgpGenome,
    /// No neutral gene existed; the genome is returned unchanged.
    pub saturated: bool,
}

/// Applies `steps` mutations restricted to neutral genes. The decoded
/// phenotype, and therefore the rendered image, is unchanged.
pub fn neutral_variant<R: rand::Rng + ?Sized>(genome: &CgpGenome, rng: &mut R, steps: usize) -> NeutralVariant {
    let genes = neutral_genes(genome);
    if genes.is_empty() {
        return NeutralVariant {
            genome: genome.clone(),
            saturated: true,
        };
    }
    // Neutral edits never change which nodes are active, so the gene list
    // stays valid across steps.
    let mut out = genome.clone();
    for _ in 0..steps {
        match genes[rng.gen_range(0..genes.len())] {
            NeutralGene::Function(i) => {
                let node = &mut out.nodes[i];
                // draw one of the other 12 functions
                let k = rng.gen_range(1..FUNCTION_COUNT);
                node.function = if k >= node.function { k + 1 } else { k };
            }
            NeutralGene::ConnA(i) => out.nodes[i].conn_a = reroll_conn(rng, out.nodes[i].conn_a, i),
            NeutralGene::ConnB(i) => out.nodes[i].conn_b = reroll_conn(rng, out.nodes[i].conn_b, i),
            NeutralGene::Pm(i) => out.nodes[i].pm = rng.gen_range(0.0..=255.0),
        }
    }
    NeutralVariant {
        genome: out,
        saturated: false,
    }
}

fn reroll_conn<R: rand::Rng + ?Sized>(rng: &mut R, current: usize, node: usize) -> usize {
    let limit = node + INPUTS;
    let k = rng.gen_range(0..limit - 1);
    if k >= current {
        k + 1
    } else {
        k
    }
}

/// Node-wise uniform crossover: each node and each output gene comes from
/// either parent with even odds. Both parents must have the same length.
pub fn uniform_crossover<R: rand::Rng + ?Sized>(a: &CgpGenome, b: &CgpGenome, rng: &mut R) -> CgpGenome {
    assert_eq!(a.nodes.len(), b.nodes.len(), "crossover parents differ in length");
    let nodes = a
        .nodes
        .iter()
        .zip(&b.nodes)
        .map(|(x, y)| if rng.gen_bool(0.5) { *x } else { *y })
        .collect();
    let mut outputs = a.outputs;
    for (o, &other) in outputs.iter_mut().zip(&b.outputs) {
        if rng.gen_bool(0.5) {
            *o = other;
        }
    }
    CgpGenome { nodes, outputs }
}
