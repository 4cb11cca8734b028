use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use super::function::FUNCTION_COUNT;
use crate::Error;

/// Number of virtual input slots preceding the nodes: 0 is x, 1 is y.
pub const INPUTS: usize = 2;

pub const DEFAULT_NODES: usize = 100;

pub const DEFAULT_PM_SIGMA: f64 = 16.0;

/// Bounds kept on the self-adapted parameter step size.
pub const PM_SIGMA_MIN: f64 = 1e-3;
pub const PM_SIGMA_MAX: f64 = 255.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    /// Function gene, 1..=13.
    pub function: u8,
    pub conn_a: usize,
    pub conn_b: usize,
    /// Parameter gene in [0, 255].
    pub pm: f64,
    /// Step size used when perturbing `pm`.
    pub pm_sigma: f64,
}

/// A fixed-length, feed-forward Cartesian program with three outputs
/// (H, S, V). Node `i` sits at address `i + 2`; addresses 0 and 1 are the
/// x and y inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct CgpGenome {
    pub nodes: Vec<Node>,
    pub outputs: [usize; 3],
}

impl CgpGenome {
    /// Draws a uniformly random genome.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R, node_count: usize) -> Self {
        let nodes = (0..node_count)
            .map(|i| Node {
                function: rng.gen_range(1..=FUNCTION_COUNT),
                conn_a: rng.gen_range(0..i + INPUTS),
                conn_b: rng.gen_range(0..i + INPUTS),
                pm: rng.gen_range(0.0..=255.0),
                pm_sigma: DEFAULT_PM_SIGMA,
            })
            .collect();
        let outputs = [(); 3].map(|_| rng.gen_range(0..node_count + INPUTS));
        CgpGenome { nodes, outputs }
    }

    /// Address of node `i`.
    pub fn address(i: usize) -> usize {
        i + INPUTS
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (i, node) in self.nodes.iter().enumerate() {
            if !(1..=FUNCTION_COUNT).contains(&node.function) {
                return Err(Error::UnknownFunction(node.function));
            }
            for conn in [node.conn_a, node.conn_b] {
                if conn >= Self::address(i) {
                    return Err(Error::BadConnection { node: i, conn });
                }
            }
            if !(0.0..=255.0).contains(&node.pm) || !(node.pm_sigma > 0.0 && node.pm_sigma.is_finite()) {
                return Err(Error::InvalidAssets("node parameter out of range"));
            }
        }
        for (index, &target) in self.outputs.iter().enumerate() {
            if target >= Self::address(self.nodes.len()) {
                return Err(Error::BadOutput { index, target });
            }
        }
        Ok(())
    }

    /// Line-oriented text form: one `function conn_a conn_b pm pm_sigma`
    /// line per node, then one line with the three output addresses.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            let _ = writeln!(out, "{} {} {} {} {}", n.function, n.conn_a, n.conn_b, n.pm, n.pm_sigma);
        }
        let [h, s, v] = self.outputs;
        let _ = writeln!(out, "{h} {s} {v}");
        out
    }

    pub fn from_text(text: &str) -> Result<Self, GenomeParseError> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let ((out_line, out_text), node_lines) = lines.split_last().ok_or(GenomeParseError {
            line: 0,
            message: "empty genome",
        })?;
        let mut nodes = Vec::with_capacity(node_lines.len());
        for &(line, text) in node_lines {
            let fields: Vec<&str> = text.split_whitespace().collect();
            let err = |message| GenomeParseError { line, message };
            if fields.len() != 5 {
                return Err(err("node line needs 5 fields"));
            }
            nodes.push(Node {
                function: fields[0].parse().map_err(|_| err("bad function gene"))?,
                conn_a: fields[1].parse().map_err(|_| err("bad conn_a"))?,
                conn_b: fields[2].parse().map_err(|_| err("bad conn_b"))?,
                pm: fields[3].parse().map_err(|_| err("bad pm"))?,
                pm_sigma: fields[4].parse().map_err(|_| err("bad pm_sigma"))?,
            });
        }
        let err = |message| GenomeParseError { line: *out_line, message };
        let outs: Vec<usize> = out_text
            .split_whitespace()
            .map(|f| f.parse().map_err(|_| err("bad output gene")))
            .collect::<Result<_, _>>()?;
        let outputs: [usize; 3] = outs.try_into().map_err(|_| err("output line needs 3 fields"))?;
        let genome = CgpGenome { nodes, outputs };
        genome.validate().map_err(|_| err("genome violates feed-forward invariants"))?;
        Ok(genome)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("genome line {line}: {message}")]
pub struct GenomeParseError {
    pub line: usize,
    pub message: &'static str,
}
