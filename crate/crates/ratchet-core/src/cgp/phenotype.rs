use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::function::{apply_valid, uses_parameter, uses_second_input};
use super::genome::{CgpGenome, INPUTS};
use crate::Error;

/// One active node after renumbering. Addresses 0 and 1 are the inputs and
/// active node `j` has address `j + 2`. Genes the function ignores are
/// dropped, so they cannot distinguish phenotypes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActiveNode {
    pub function: u8,
    pub a: u32,
    pub b: Option<u32>,
    /// Bit pattern of the parameter gene, when the function reads it.
    pub pm_bits: Option<u64>,
}

impl ActiveNode {
    fn pm(&self) -> f64 {
        self.pm_bits.map(f64::from_bits).unwrap_or(0.0)
    }
}

/// The program actually executed: nodes reachable from the outputs, in
/// feed-forward order. Two genomes with equal phenotypes paint identical
/// images.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Phenotype {
    nodes: Vec<ActiveNode>,
    outputs: [u32; 3],
}

impl Phenotype {
    pub fn active_nodes(&self) -> &[ActiveNode] {
        &self.nodes
    }

    pub fn outputs(&self) -> [u32; 3] {
        self.outputs
    }

    /// Stable text serialization of the active program.
    pub fn canonical_form(&self) -> String {
        alloc::format!("{self}")
    }

    /// Evaluates the program at unit pixel coordinates (`x_u`, `y_u` in
    /// [0, 1)), which enter the graph scaled to [0, 255].
    pub fn eval_pixel(&self, x_u: f64, y_u: f64) -> [f64; 3] {
        let mut values = Vec::with_capacity(self.nodes.len() + INPUTS);
        self.eval_into(x_u * 255.0, y_u * 255.0, &mut values)
    }

    /// Evaluation with a caller-owned scratch buffer.
    pub(crate) fn eval_into(&self, x: f64, y: f64, values: &mut Vec<f64>) -> [f64; 3] {
        values.clear();
        values.push(x);
        values.push(y);
        for node in &self.nodes {
            let a = values[node.a as usize];
            let b = node.b.map(|b| values[b as usize]).unwrap_or(0.0);
            values.push(apply_valid(node.function, a, b, node.pm()));
        }
        self.outputs.map(|o| values[o as usize])
    }
}

impl fmt::Display for Phenotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, n) in self.nodes.iter().enumerate() {
            write!(f, "n{}=f{}({}", j + INPUTS, n.function, n.a)?;
            if let Some(b) = n.b {
                write!(f, ",{b}")?;
            }
            if let Some(bits) = n.pm_bits {
                write!(f, ";pm={}", f64::from_bits(bits))?;
            }
            f.write_str(")\n")?;
        }
        let [h, s, v] = self.outputs;
        write!(f, "out={h},{s},{v}")
    }
}

/// Per-node activity of a genome, as a mask over `genome.nodes`.
pub fn active_mask(genome: &CgpGenome) -> Vec<bool> {
    let mut active = alloc::vec![false; genome.nodes.len()];
    let mut stack: Vec<usize> = genome.outputs.to_vec();
    while let Some(addr) = stack.pop() {
        if addr < INPUTS {
            continue;
        }
        let i = addr - INPUTS;
        if active[i] {
            continue;
        }
        active[i] = true;
        let node = &genome.nodes[i];
        stack.push(node.conn_a);
        if uses_second_input(node.function) {
            stack.push(node.conn_b);
        }
    }
    active
}

/// Extracts the active program by backward reachability from the outputs.
pub fn decode(genome: &CgpGenome) -> Result<Phenotype, Error> {
    genome.validate()?;
    let active = active_mask(genome);
    let mut remap = alloc::vec![u32::MAX; genome.nodes.len() + INPUTS];
    remap[0] = 0;
    remap[1] = 1;
    let mut nodes = Vec::new();
    for (i, node) in genome.nodes.iter().enumerate() {
        if !active[i] {
            continue;
        }
        remap[i + INPUTS] = (nodes.len() + INPUTS) as u32;
        nodes.push(ActiveNode {
            function: node.function,
            a: remap[node.conn_a],
            b: uses_second_input(node.function).then(|| remap[node.conn_b]),
            pm_bits: uses_parameter(node.function).then(|| node.pm.to_bits()),
        });
    }
    Ok(Phenotype {
        nodes,
        outputs: genome.outputs.map(|o| remap[o]),
    })
}
