//! Logic simulation and the structural metrics the locking schemes need:
//! signal probabilities, stuck-at fault impact, and the key-gate
//! interference graph.
//!
//! Simulation works on 64-wide pattern blocks (`u64` per net, one pattern
//! per bit); the scalar [`simulate`] is the single-pattern view of the same
//! evaluator.

use crate::netlist::{Circuit, GateKind, NetId};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AnalysisError {
    /// The input assignment does not cover every primary input.
    MissingInput { expected: usize, got: usize },
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::MissingInput { expected, got } => write!(
                f,
                "expected a value for each of {expected} primary inputs, got {got}"
            ),
        }
    }
}

impl core::error::Error for AnalysisError {}

/// Evaluates every net for one 64-pattern block. `force` overrides a single
/// net with a fixed word after its driver runs (stuck-at injection).
fn eval_nets_block(c: &Circuit, pi_blocks: &[u64], force: Option<(NetId, u64)>) -> Vec<u64> {
    let mut values = vec![0u64; c.num_nets()];
    for (pos, &pi) in c.primary_inputs().iter().enumerate() {
        values[pi.index()] = pi_blocks[pos];
    }
    if let Some((net, word)) = force {
        if c.is_primary_input(net) {
            values[net.index()] = word;
        }
    }
    for gate in c.topo_gates() {
        let out = gate.output.index();
        values[out] = match gate.kind {
            GateKind::And => gate.inputs.iter().fold(!0u64, |a, i| a & values[i.index()]),
            GateKind::Nand => !gate.inputs.iter().fold(!0u64, |a, i| a & values[i.index()]),
            GateKind::Or => gate.inputs.iter().fold(0u64, |a, i| a | values[i.index()]),
            GateKind::Nor => !gate.inputs.iter().fold(0u64, |a, i| a | values[i.index()]),
            GateKind::Xor => gate.inputs.iter().fold(0u64, |a, i| a ^ values[i.index()]),
            GateKind::Xnor => !gate.inputs.iter().fold(0u64, |a, i| a ^ values[i.index()]),
            GateKind::Not => !values[gate.inputs[0].index()],
            GateKind::Buf => values[gate.inputs[0].index()],
            GateKind::Mux2 => {
                let s = values[gate.inputs[0].index()];
                let d0 = values[gate.inputs[1].index()];
                let d1 = values[gate.inputs[2].index()];
                (!s & d0) | (s & d1)
            }
            GateKind::Lut => {
                let table = gate.lut_table.as_ref().expect("validated LUT");
                let mut acc = 0u64;
                for t in 0..table.len() {
                    if !table.row(t) {
                        continue;
                    }
                    let mut minterm = !0u64;
                    for (j, input) in gate.inputs.iter().enumerate() {
                        let v = values[input.index()];
                        minterm &= if t >> j & 1 == 1 { v } else { !v };
                    }
                    acc |= minterm;
                }
                acc
            }
        };
        if let Some((net, word)) = force {
            if net == gate.output {
                values[out] = word;
            }
        }
    }
    values
}

/// Evaluates the circuit on one 64-pattern block per primary input,
/// returning one word per primary output.
pub fn simulate_block(c: &Circuit, pi_blocks: &[u64]) -> Result<Vec<u64>, AnalysisError> {
    if pi_blocks.len() != c.primary_inputs().len() {
        return Err(AnalysisError::MissingInput {
            expected: c.primary_inputs().len(),
            got: pi_blocks.len(),
        });
    }
    let values = eval_nets_block(c, pi_blocks, None);
    Ok(c.primary_outputs()
        .iter()
        .map(|po| values[po.index()])
        .collect())
}

/// Evaluates the circuit on a single input pattern (the functional oracle:
/// gate-by-gate evaluation in topological order).
pub fn simulate(c: &Circuit, inputs: &[bool]) -> Result<Vec<bool>, AnalysisError> {
    let words: Vec<u64> = inputs.iter().map(|&b| if b { 1 } else { 0 }).collect();
    let outs = simulate_block(c, &words)?;
    Ok(outs.iter().map(|w| w & 1 == 1).collect())
}

/// Pattern blocks plus a per-block validity mask.
struct Patterns {
    /// `blocks[b][pi]` is the word for primary input `pi` in block `b`.
    blocks: Vec<Vec<u64>>,
    masks: Vec<u64>,
}

impl Patterns {
    fn total(&self) -> u64 {
        self.masks.iter().map(|m| m.count_ones() as u64).sum()
    }
}

/// Uniform random patterns, or an exhaustive sweep once the budget covers
/// all `2^N_X` input valuations of a small circuit. `n_patterns` is rounded
/// up to a multiple of 64.
fn make_patterns(num_inputs: usize, n_patterns: usize, seed: u64) -> Patterns {
    let n = n_patterns.max(1).div_ceil(64) * 64;
    if num_inputs <= 20 && 1u64 << num_inputs <= n as u64 {
        let total = 1usize << num_inputs;
        let nblocks = total.div_ceil(64);
        let mut blocks = Vec::with_capacity(nblocks);
        let mut masks = Vec::with_capacity(nblocks);
        for b in 0..nblocks {
            let mut words = vec![0u64; num_inputs];
            let mut mask = 0u64;
            for lane in 0..64usize {
                let t = b * 64 + lane;
                if t >= total {
                    break;
                }
                mask |= 1 << lane;
                for (i, word) in words.iter_mut().enumerate() {
                    if t >> i & 1 == 1 {
                        *word |= 1 << lane;
                    }
                }
            }
            blocks.push(words);
            masks.push(mask);
        }
        Patterns { blocks, masks }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nblocks = n / 64;
        let blocks = (0..nblocks)
            .map(|_| (0..num_inputs).map(|_| rng.next_u64()).collect())
            .collect();
        Patterns {
            blocks,
            masks: vec![!0u64; nblocks],
        }
    }
}

/// Empirical probability of each net evaluating to 1 under uniform random
/// inputs; indexed by net. Deterministic for a fixed seed.
pub fn signal_probabilities(c: &Circuit, n_patterns: usize, seed: u64) -> Vec<f64> {
    let patterns = make_patterns(c.primary_inputs().len(), n_patterns, seed);
    let mut ones = vec![0u64; c.num_nets()];
    for (words, &mask) in patterns.blocks.iter().zip(&patterns.masks) {
        let values = eval_nets_block(c, words, None);
        for (net, &v) in values.iter().enumerate() {
            ones[net] += (v & mask).count_ones() as u64;
        }
    }
    let total = patterns.total() as f64;
    ones.iter().map(|&n| n as f64 / total).collect()
}

/// Stuck-at impact of one net: `NoP` counts patterns where the fault flips
/// at least one output, `NoO` sums output-bit flips over all patterns.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FaultImpact {
    pub net: NetId,
    pub nop0: u64,
    pub noo0: u64,
    pub nop1: u64,
    pub noo1: u64,
}

impl FaultImpact {
    pub fn score(&self) -> u64 {
        self.nop0 * self.noo0 + self.nop1 * self.noo1
    }
}

/// Fault impact of every internal (gate-output) net under the given pattern
/// budget; exhaustive when the budget covers all input valuations.
pub fn fault_impact(c: &Circuit, n_patterns: usize, seed: u64) -> Vec<FaultImpact> {
    let patterns = make_patterns(c.primary_inputs().len(), n_patterns, seed);
    let pos = c.primary_outputs();
    let nets = c.internal_nets();
    let mut impacts: Vec<FaultImpact> = nets
        .iter()
        .map(|&net| FaultImpact {
            net,
            nop0: 0,
            noo0: 0,
            nop1: 0,
            noo1: 0,
        })
        .collect();

    for (words, &mask) in patterns.blocks.iter().zip(&patterns.masks) {
        let base = eval_nets_block(c, words, None);
        for (k, &net) in nets.iter().enumerate() {
            for stuck_one in [false, true] {
                let forced = if stuck_one { !0u64 } else { 0u64 };
                if (base[net.index()] ^ forced) & mask == 0 {
                    continue; // the net already holds the stuck value everywhere
                }
                let faulty = eval_nets_block(c, words, Some((net, forced)));
                let mut any = 0u64;
                let mut flips = 0u64;
                for po in pos {
                    let diff = (base[po.index()] ^ faulty[po.index()]) & mask;
                    any |= diff;
                    flips += diff.count_ones() as u64;
                }
                let imp = &mut impacts[k];
                if stuck_one {
                    imp.nop1 += any.count_ones() as u64;
                    imp.noo1 += flips;
                } else {
                    imp.nop0 += any.count_ones() as u64;
                    imp.noo0 += flips;
                }
            }
        }
    }
    impacts
}

/// Undirected interference graph over candidate key-gate locations.
///
/// Vertices keep the order of `locations`; an edge `(u, v)` means the output
/// cones of `u` and `v` share at least one primary output and neither net
/// lies on every path of the other to those shared outputs.
#[derive(Clone, Debug)]
pub struct InterferenceGraph {
    vertices: Vec<NetId>,
    adjacency: Vec<Vec<u32>>,
}

impl InterferenceGraph {
    pub fn vertices(&self) -> &[NetId] {
        &self.vertices
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(&(v as u32))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

struct Reach {
    /// Primary-output positions reachable from the net.
    po_cone: Vec<u64>,
    /// All nets in the transitive fanout (including the net itself).
    tfo: Vec<u64>,
}

fn bitset_get(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn bitset_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

/// Forward reachability from `from`, optionally treating `skip` as removed.
fn reach(
    c: &Circuit,
    fanout: &[Vec<u32>],
    po_positions: &[Vec<u32>],
    from: NetId,
    skip: Option<NetId>,
) -> Reach {
    let net_words = c.num_nets().div_ceil(64);
    let po_words = c.primary_outputs().len().div_ceil(64).max(1);
    let mut r = Reach {
        po_cone: vec![0u64; po_words],
        tfo: vec![0u64; net_words],
    };
    if Some(from) == skip {
        return r;
    }
    let mut stack = vec![from];
    bitset_set(&mut r.tfo, from.index());
    while let Some(net) = stack.pop() {
        for &pos in &po_positions[net.index()] {
            bitset_set(&mut r.po_cone, pos as usize);
        }
        for &gi in &fanout[net.index()] {
            let out = c.gates()[gi as usize].output;
            if Some(out) == skip || bitset_get(&r.tfo, out.index()) {
                continue;
            }
            bitset_set(&mut r.tfo, out.index());
            stack.push(out);
        }
    }
    r
}

/// Builds the interference graph for the given candidate locations.
pub fn interference_graph(c: &Circuit, locations: &[NetId]) -> InterferenceGraph {
    let fanout = c.fanout();
    let mut po_positions = vec![Vec::new(); c.num_nets()];
    for (pos, &po) in c.primary_outputs().iter().enumerate() {
        po_positions[po.index()].push(pos as u32);
    }

    let reaches: Vec<Reach> = locations
        .iter()
        .map(|&net| reach(c, &fanout, &po_positions, net, None))
        .collect();

    // `removing u cuts v from every shared output`; only possible when u is
    // in v's transitive fanout.
    let cuts = |u: usize, v: usize, shared: &[u64]| -> bool {
        if !bitset_get(&reaches[v].tfo, locations[u].index()) {
            return false;
        }
        let restricted = reach(c, &fanout, &po_positions, locations[v], Some(locations[u]));
        restricted
            .po_cone
            .iter()
            .zip(shared)
            .all(|(a, b)| a & b == 0)
    };

    let mut adjacency = vec![Vec::new(); locations.len()];
    for u in 0..locations.len() {
        for v in u + 1..locations.len() {
            let shared: Vec<u64> = reaches[u]
                .po_cone
                .iter()
                .zip(&reaches[v].po_cone)
                .map(|(a, b)| a & b)
                .collect();
            if shared.iter().all(|&w| w == 0) {
                continue;
            }
            if cuts(u, v, &shared) || cuts(v, u, &shared) {
                continue;
            }
            adjacency[u].push(v as u32);
            adjacency[v].push(u as u32);
        }
    }
    InterferenceGraph {
        vertices: locations.to_vec(),
        adjacency,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::synth::{random_dag, DagSpec};
    use crate::netlist::{parse_bench, synth::C17_BENCH, CircuitBuilder};

    #[test]
    fn truth_tables() {
        let c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)").unwrap();
        assert_eq!(simulate(&c, &[true, true]).unwrap(), [true]);
        assert_eq!(simulate(&c, &[true, false]).unwrap(), [false]);
        assert_eq!(simulate(&c, &[false, false]).unwrap(), [false]);
    }

    #[test]
    fn lut_0x8_is_and() {
        let c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = LUT 0x8 (a, b)").unwrap();
        for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
            assert_eq!(simulate(&c, &[a, b]).unwrap(), [a && b], "a={a} b={b}");
        }
    }

    /// Independent scalar evaluator used as the oracle for the block path.
    fn brute_eval(c: &Circuit, inputs: &[bool]) -> alloc::vec::Vec<bool> {
        let mut values = alloc::vec![false; c.num_nets()];
        for (pos, &pi) in c.primary_inputs().iter().enumerate() {
            values[pi.index()] = inputs[pos];
        }
        for gate in c.topo_gates() {
            let ins: alloc::vec::Vec<bool> =
                gate.inputs.iter().map(|i| values[i.index()]).collect();
            values[gate.output.index()] = match gate.kind {
                GateKind::And => ins.iter().all(|&x| x),
                GateKind::Nand => !ins.iter().all(|&x| x),
                GateKind::Or => ins.iter().any(|&x| x),
                GateKind::Nor => !ins.iter().any(|&x| x),
                GateKind::Xor => ins.iter().filter(|&&x| x).count() % 2 == 1,
                GateKind::Xnor => ins.iter().filter(|&&x| x).count() % 2 == 0,
                GateKind::Not => !ins[0],
                GateKind::Buf => ins[0],
                GateKind::Mux2 => {
                    if ins[0] {
                        ins[2]
                    } else {
                        ins[1]
                    }
                }
                GateKind::Lut => {
                    let t = ins
                        .iter()
                        .enumerate()
                        .fold(0usize, |acc, (j, &b)| acc | (b as usize) << j);
                    gate.lut_table.as_ref().unwrap().row(t)
                }
            };
        }
        c.primary_outputs()
            .iter()
            .map(|po| values[po.index()])
            .collect()
    }

    #[test]
    fn c17_all_zero_matches_brute_force() {
        let c = parse_bench(C17_BENCH).unwrap();
        let zeros = alloc::vec![false; 5];
        assert_eq!(simulate(&c, &zeros).unwrap(), brute_eval(&c, &zeros));
    }

    #[test]
    fn block_simulation_matches_scalar() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..3 {
            let c = random_dag(
                "t",
                &DagSpec::new(30, 6, 3).with_luts(),
                100 + trial,
            );
            let npis = c.primary_inputs().len();
            let words: alloc::vec::Vec<u64> = (0..npis).map(|_| rng.next_u64()).collect();
            let block = simulate_block(&c, &words).unwrap();
            for lane in 0..64 {
                let inputs: alloc::vec::Vec<bool> =
                    words.iter().map(|w| w >> lane & 1 == 1).collect();
                let expect = brute_eval(&c, &inputs);
                let got: alloc::vec::Vec<bool> =
                    block.iter().map(|w| w >> lane & 1 == 1).collect();
                assert_eq!(got, expect, "lane {lane} of trial {trial}");
            }
        }
    }

    #[test]
    fn missing_input_detected() {
        let c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)").unwrap();
        assert!(matches!(
            simulate(&c, &[true]),
            Err(AnalysisError::MissingInput { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn probabilities_of_basic_gates() {
        let c = parse_bench(
            "INPUT(a)\nINPUT(b)\nOUTPUT(y)\nOUTPUT(z)\ny = AND(a, b)\nz = XOR(a, b)",
        )
        .unwrap();
        let p = signal_probabilities(&c, 10_000, 3);
        let net = |name: &str| c.find_net(name).unwrap().index();
        assert!((p[net("a")] - 0.5).abs() < 0.05);
        assert!((p[net("b")] - 0.5).abs() < 0.05);
        assert!((p[net("y")] - 0.25).abs() < 0.05);
        assert!((p[net("z")] - 0.5).abs() < 0.05);
    }

    #[test]
    fn probabilities_deterministic_per_seed() {
        let c = parse_bench(C17_BENCH).unwrap();
        assert_eq!(
            signal_probabilities(&c, 1024, 9),
            signal_probabilities(&c, 1024, 9)
        );
    }

    #[test]
    fn buffer_fault_counts_forced_by_definition() {
        // y = BUF(a): stuck-at-0 flips y exactly on patterns with a = 1.
        let c = parse_bench("INPUT(a)\nOUTPUT(y)\ny = BUF(a)").unwrap();
        let impacts = fault_impact(&c, 64, 1); // exhaustive: 2 patterns
        assert_eq!(impacts.len(), 1);
        let imp = impacts[0];
        assert_eq!((imp.nop0, imp.noo0), (1, 1));
        assert_eq!((imp.nop1, imp.noo1), (1, 1));
        assert_eq!(imp.score(), 2);
    }

    #[test]
    fn net_outside_any_output_cone_scores_zero() {
        let mut b = CircuitBuilder::new("t");
        let a = b.add_input("a");
        let dead = b.net("dead");
        let y = b.net("y");
        b.add_gate(GateKind::Not, &[a], dead);
        b.add_gate(GateKind::Buf, &[a], y);
        b.add_output(y);
        let c = b.build().unwrap();
        let impacts = fault_impact(&c, 64, 1);
        let dead_imp = impacts.iter().find(|i| i.net == dead).unwrap();
        assert_eq!(dead_imp.score(), 0);
    }

    /// Exhaustive scalar fault simulator: the oracle for `fault_impact`.
    fn exhaustive_fault_impact(c: &Circuit) -> alloc::vec::Vec<(NetId, u64, u64, u64, u64)> {
        let npis = c.primary_inputs().len();
        let mut result = alloc::vec::Vec::new();
        for &net in &c.internal_nets() {
            let (mut nop0, mut noo0, mut nop1, mut noo1) = (0u64, 0u64, 0u64, 0u64);
            for t in 0..1usize << npis {
                let inputs: alloc::vec::Vec<bool> =
                    (0..npis).map(|i| t >> i & 1 == 1).collect();
                let base = brute_eval_forced(c, &inputs, None);
                for stuck_one in [false, true] {
                    let faulty = brute_eval_forced(c, &inputs, Some((net, stuck_one)));
                    let flips = base
                        .iter()
                        .zip(&faulty)
                        .filter(|(a, b)| a != b)
                        .count() as u64;
                    if flips > 0 {
                        if stuck_one {
                            nop1 += 1;
                            noo1 += flips;
                        } else {
                            nop0 += 1;
                            noo0 += flips;
                        }
                    }
                }
            }
            result.push((net, nop0, noo0, nop1, noo1));
        }
        result
    }

    fn brute_eval_forced(
        c: &Circuit,
        inputs: &[bool],
        force: Option<(NetId, bool)>,
    ) -> alloc::vec::Vec<bool> {
        let mut values = alloc::vec![false; c.num_nets()];
        for (pos, &pi) in c.primary_inputs().iter().enumerate() {
            values[pi.index()] = inputs[pos];
        }
        for gate in c.topo_gates() {
            let ins: alloc::vec::Vec<bool> =
                gate.inputs.iter().map(|i| values[i.index()]).collect();
            let v = match gate.kind {
                GateKind::And => ins.iter().all(|&x| x),
                GateKind::Nand => !ins.iter().all(|&x| x),
                GateKind::Or => ins.iter().any(|&x| x),
                GateKind::Nor => !ins.iter().any(|&x| x),
                GateKind::Xor => ins.iter().filter(|&&x| x).count() % 2 == 1,
                GateKind::Xnor => ins.iter().filter(|&&x| x).count() % 2 == 0,
                GateKind::Not => !ins[0],
                GateKind::Buf => ins[0],
                GateKind::Mux2 => {
                    if ins[0] {
                        ins[2]
                    } else {
                        ins[1]
                    }
                }
                GateKind::Lut => {
                    let t = ins
                        .iter()
                        .enumerate()
                        .fold(0usize, |acc, (j, &b)| acc | (b as usize) << j);
                    gate.lut_table.as_ref().unwrap().row(t)
                }
            };
            values[gate.output.index()] = match force {
                Some((net, stuck)) if net == gate.output => stuck,
                _ => v,
            };
        }
        c.primary_outputs()
            .iter()
            .map(|po| values[po.index()])
            .collect()
    }

    #[test]
    fn fault_impact_matches_exhaustive_oracle() {
        for seed in [5u64, 6, 7] {
            let c = random_dag("t", &DagSpec::new(12, 5, 3), seed);
            let impacts = fault_impact(&c, 1 << 5, 0); // covers all 2^5 inputs
            let oracle = exhaustive_fault_impact(&c);
            for (imp, (net, nop0, noo0, nop1, noo1)) in impacts.iter().zip(&oracle) {
                assert_eq!(imp.net, *net);
                assert_eq!(
                    (imp.nop0, imp.noo0, imp.nop1, imp.noo1),
                    (*nop0, *noo0, *nop1, *noo1),
                    "net {} of seed {seed}",
                    c.net_name(*net)
                );
            }
        }
    }

    #[test]
    fn disjoint_cones_are_isolated() {
        let c = parse_bench(
            "INPUT(a)\nINPUT(b)\nOUTPUT(x)\nOUTPUT(y)\n\
             u = NOT(a)\nx = BUF(u)\nv = NOT(b)\ny = BUF(v)",
        )
        .unwrap();
        let u = c.find_net("u").unwrap();
        let v = c.find_net("v").unwrap();
        let g = interference_graph(&c, &[u, v]);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn sole_fanout_dominates() {
        // v is the only path from u to the output: no edge.
        let c = parse_bench("INPUT(a)\nOUTPUT(y)\nu = NOT(a)\nv = NOT(u)\ny = BUF(v)").unwrap();
        let u = c.find_net("u").unwrap();
        let v = c.find_net("v").unwrap();
        let g = interference_graph(&c, &[u, v]);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn reconvergent_nets_interfere() {
        // u and v both reach y by paths that avoid each other.
        let c = parse_bench(
            "INPUT(a)\nINPUT(b)\nOUTPUT(y)\nu = NOT(a)\nv = NOT(b)\ny = AND(u, v)",
        )
        .unwrap();
        let u = c.find_net("u").unwrap();
        let v = c.find_net("v").unwrap();
        let g = interference_graph(&c, &[u, v]);
        assert_eq!(g.edge_count(), 1);
    }

    /// Path-enumeration oracle: every simple path from a net to an output.
    fn paths_to_pos(c: &Circuit, from: NetId) -> alloc::vec::Vec<alloc::vec::Vec<NetId>> {
        fn go(
            c: &Circuit,
            fanout: &[alloc::vec::Vec<u32>],
            here: NetId,
            path: &mut alloc::vec::Vec<NetId>,
            out: &mut alloc::vec::Vec<alloc::vec::Vec<NetId>>,
        ) {
            path.push(here);
            if c.primary_outputs().contains(&here) {
                out.push(path.clone());
            }
            for &gi in &fanout[here.index()] {
                go(c, fanout, c.gates()[gi as usize].output, path, out);
            }
            path.pop();
        }
        let fanout = c.fanout();
        let mut out = alloc::vec::Vec::new();
        go(c, &fanout, from, &mut alloc::vec::Vec::new(), &mut out);
        out
    }

    #[test]
    fn interference_matches_path_enumeration() {
        for seed in 0..8u64 {
            let c = random_dag("t", &DagSpec::new(10, 4, 3), 40 + seed);
            let locations = c.internal_nets();
            let g = interference_graph(&c, &locations);
            for u in 0..locations.len() {
                for v in u + 1..locations.len() {
                    let pu = paths_to_pos(&c, locations[u]);
                    let pv = paths_to_pos(&c, locations[v]);
                    let outs_u: alloc::vec::Vec<NetId> =
                        pu.iter().map(|p| *p.last().unwrap()).collect();
                    let shared: alloc::vec::Vec<NetId> = pv
                        .iter()
                        .map(|p| *p.last().unwrap())
                        .filter(|o| outs_u.contains(o))
                        .collect();
                    let expected = if shared.is_empty() {
                        false
                    } else {
                        // u on every path of v to shared outputs?
                        let dom = |paths: &[alloc::vec::Vec<NetId>], x: NetId| {
                            paths
                                .iter()
                                .filter(|p| shared.contains(p.last().unwrap()))
                                .all(|p| p.contains(&x))
                        };
                        !dom(&pv, locations[u]) && !dom(&pu, locations[v])
                    };
                    assert_eq!(
                        g.has_edge(u, v),
                        expected,
                        "seed {seed}: {} - {}",
                        c.net_name(locations[u]),
                        c.net_name(locations[v])
                    );
                }
            }
        }
    }
}
