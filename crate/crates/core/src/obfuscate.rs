//! Key-gate insertion for five published locking schemes, plus conversion
//! of keyless obfuscation cells (LUTs, camouflaged gates) into
//! key-programmable gates.
//!
//! Every produced circuit reduces to the original under its correct key:
//! XOR key gates are transparent at key 0, XNOR at key 1 (so the gate kind
//! never reveals the bit by itself), AND at 1, OR at 0, and MUX key gates
//! route the true net when the select holds the correct bit.

use crate::analysis::{fault_impact, interference_graph, signal_probabilities, simulate};
use crate::netlist::{build_mux_tree, Circuit, GateKind, NetId, NetlistError, write_bench};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default simulation budget for placement metrics (patterns).
pub const DEFAULT_PATTERN_BUDGET: usize = 1024;

/// Primary inputs carrying key bits are named `keyinput<i>`.
pub const KEY_INPUT_PREFIX: &str = "keyinput";

/// The five supported locking schemes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SchemeTag {
    Rnd,
    Dac12,
    Toc13Xor,
    Toc13Mux,
    Iolts14,
}

impl SchemeTag {
    pub const ALL: [SchemeTag; 5] = [
        SchemeTag::Rnd,
        SchemeTag::Dac12,
        SchemeTag::Toc13Xor,
        SchemeTag::Toc13Mux,
        SchemeTag::Iolts14,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeTag::Rnd => "rnd",
            SchemeTag::Dac12 => "dac12",
            SchemeTag::Toc13Xor => "toc13xor",
            SchemeTag::Toc13Mux => "toc13mux",
            SchemeTag::Iolts14 => "iolts14",
        }
    }

    pub fn parse(s: &str) -> Option<SchemeTag> {
        SchemeTag::ALL.into_iter().find(|t| t.name() == s)
    }
}

impl fmt::Display for SchemeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for SchemeTag {
    type Err = String;
    fn from_str(s: &str) -> Result<SchemeTag, String> {
        SchemeTag::parse(s).ok_or_else(|| format!("unknown scheme `{s}`"))
    }
}

/// A locked circuit with its ground truth.
#[derive(Clone, Debug)]
pub struct LockedCircuit {
    pub circuit: Circuit,
    /// Key-carrying primary inputs, in key-bit order.
    pub key_inputs: Vec<NetId>,
    pub correct_key: Vec<bool>,
    pub scheme: SchemeTag,
    pub base_name: String,
    pub overhead_pct: u32,
    pub seed: u64,
}

impl LockedCircuit {
    /// Non-key primary inputs, in primary-input order (the X of the
    /// locked circuit).
    pub fn x_inputs(&self) -> Vec<NetId> {
        self.circuit
            .primary_inputs()
            .iter()
            .copied()
            .filter(|pi| !self.key_inputs.contains(pi))
            .collect()
    }

    /// Simulates the locked circuit under an explicit key.
    pub fn simulate_with_key(&self, x: &[bool], key: &[bool]) -> Vec<bool> {
        let mut inputs = vec![false; self.circuit.primary_inputs().len()];
        let mut xi = 0;
        for (pos, pi) in self.circuit.primary_inputs().iter().enumerate() {
            if let Some(ki) = self.key_inputs.iter().position(|k| k == pi) {
                inputs[pos] = key[ki];
            } else {
                inputs[pos] = x[xi];
                xi += 1;
            }
        }
        simulate(&self.circuit, &inputs).expect("input width checked")
    }
}

/// Result of exposing a keyless obfuscation cell as explicit key inputs.
#[derive(Clone, Debug)]
pub struct KpgConversion {
    pub circuit: Circuit,
    pub key_inputs: Vec<NetId>,
    pub correct_key: Vec<bool>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ObfuscateError {
    /// Overhead percentage outside 1..=100.
    InvalidOverhead(u32),
    /// More key gates requested than distinct eligible nets.
    TooFewLocations { needed: usize, available: usize },
    /// The named gate is not of the kind the conversion expects.
    WrongGateKind { gate: usize, expected: &'static str },
    /// Candidate list invalid for `camo_to_kpg`.
    BadCandidates(String),
    /// Structural validation failed on the rebuilt circuit.
    Netlist(NetlistError),
}

impl fmt::Display for ObfuscateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObfuscateError::InvalidOverhead(p) => {
                write!(f, "overhead must be within 1..=100 percent, got {p}")
            }
            ObfuscateError::TooFewLocations { needed, available } => write!(
                f,
                "{needed} key gates requested but only {available} eligible nets exist"
            ),
            ObfuscateError::WrongGateKind { gate, expected } => {
                write!(f, "gate #{gate} is not a {expected}")
            }
            ObfuscateError::BadCandidates(msg) => write!(f, "bad candidate set: {msg}"),
            ObfuscateError::Netlist(e) => write!(f, "rebuilt netlist invalid: {e}"),
        }
    }
}

impl core::error::Error for ObfuscateError {}

impl From<NetlistError> for ObfuscateError {
    fn from(e: NetlistError) -> ObfuscateError {
        ObfuscateError::Netlist(e)
    }
}

/// Key count for an overhead percentage measured in gate count:
/// `max(1, round(pct/100 * gates))`, integer round-half-up.
pub fn key_count(gate_count: usize, overhead_pct: u32) -> usize {
    ((overhead_pct as usize * gate_count + 50) / 100).max(1)
}

/// How one key gate is realized on its target net.
#[derive(Clone, Copy, Debug)]
enum KeyGatePlan {
    /// XOR (bit 0) or XNOR (bit 1).
    Parity { bit: bool },
    /// AND (bit 1) or OR (bit 0).
    Mask { bit: bool },
    /// MUX with the key as select; true net on the correct-key data input.
    Mux { bit: bool, decoy: NetId },
}

fn next_key_index(c: &Circuit) -> usize {
    c.primary_inputs()
        .iter()
        .filter_map(|&pi| {
            c.net_name(pi)
                .strip_prefix(KEY_INPUT_PREFIX)
                .and_then(|s| s.parse::<usize>().ok())
        })
        .map(|i| i + 1)
        .max()
        .unwrap_or(0)
}

/// Splices the planned key gates into the circuit. Key bit `i` drives
/// `keyinput<base+i>`.
fn apply_plans(
    c: &Circuit,
    plans: &[(NetId, KeyGatePlan)],
) -> Result<(Circuit, Vec<NetId>, Vec<bool>), ObfuscateError> {
    let key_base = next_key_index(c);
    let mut b = c.clone().into_builder();
    let mut key_nets = Vec::with_capacity(plans.len());
    let mut key_bits = Vec::with_capacity(plans.len());

    for (i, &(target, plan)) in plans.iter().enumerate() {
        let replacement = b.fresh_net("lock");
        for gate in b.gates_mut() {
            for input in gate.inputs.iter_mut() {
                if *input == target {
                    *input = replacement;
                }
            }
        }
        for po in b.primary_outputs_mut() {
            if *po == target {
                *po = replacement;
            }
        }
        let key = b.add_input(&format!("{KEY_INPUT_PREFIX}{}", key_base + i));
        match plan {
            KeyGatePlan::Parity { bit } => {
                let kind = if bit { GateKind::Xnor } else { GateKind::Xor };
                b.add_gate(kind, &[target, key], replacement);
                key_bits.push(bit);
            }
            KeyGatePlan::Mask { bit } => {
                let kind = if bit { GateKind::And } else { GateKind::Or };
                b.add_gate(kind, &[target, key], replacement);
                key_bits.push(bit);
            }
            KeyGatePlan::Mux { bit, decoy } => {
                let (d0, d1) = if bit { (decoy, target) } else { (target, decoy) };
                b.add_gate(GateKind::Mux2, &[key, d0, d1], replacement);
                key_bits.push(bit);
            }
        }
        key_nets.push(key);
    }

    let circuit = b.build()?;
    Ok((circuit, key_nets, key_bits))
}

/// Nets in the transitive fanout of `from` (inclusive), accumulated into
/// `seen`.
fn transitive_fanout_into(c: &Circuit, fanout: &[Vec<u32>], from: NetId, seen: &mut [bool]) {
    let mut stack = vec![from];
    seen[from.index()] = true;
    while let Some(net) = stack.pop() {
        for &gi in &fanout[net.index()] {
            let out = c.gates()[gi as usize].output;
            if !seen[out.index()] {
                seen[out.index()] = true;
                stack.push(out);
            }
        }
    }
}

/// Internal nets from whose value at least one primary output is reachable.
/// Key gates on unobservable nets would be vacuous, so only these are
/// eligible insertion locations.
fn observable_internal_nets(c: &Circuit) -> Vec<NetId> {
    let mut marked = vec![false; c.num_nets()];
    let mut stack: Vec<NetId> = Vec::new();
    for &po in c.primary_outputs() {
        if !marked[po.index()] {
            marked[po.index()] = true;
            stack.push(po);
        }
    }
    while let Some(net) = stack.pop() {
        if let crate::netlist::Driver::Gate(gi) = c.driver(net) {
            for &input in &c.gates()[gi as usize].inputs {
                if !marked[input.index()] {
                    marked[input.index()] = true;
                    stack.push(input);
                }
            }
        }
    }
    c.internal_nets()
        .into_iter()
        .filter(|n| marked[n.index()])
        .collect()
}

/// Eligible nets ranked by descending fault-impact score, ties by net id.
fn impact_ranking(c: &Circuit, eligible: &[NetId], seed: u64) -> Vec<(NetId, u64)> {
    let impacts = fault_impact(c, DEFAULT_PATTERN_BUDGET, seed);
    let mut ranked: Vec<(NetId, u64)> = impacts
        .iter()
        .filter(|i| eligible.contains(&i.net))
        .map(|i| (i.net, i.score()))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
}

/// Inserts `K = max(1, round(pct/100 * gates))` key gates per the scheme.
pub fn lock(
    c: &Circuit,
    scheme: SchemeTag,
    overhead_pct: u32,
    seed: u64,
) -> Result<LockedCircuit, ObfuscateError> {
    if overhead_pct == 0 || overhead_pct > 100 {
        return Err(ObfuscateError::InvalidOverhead(overhead_pct));
    }
    let eligible = observable_internal_nets(c);
    let k = key_count(c.gates().len(), overhead_pct);
    if k > eligible.len() {
        return Err(ObfuscateError::TooFewLocations {
            needed: k,
            available: eligible.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plans: Vec<(NetId, KeyGatePlan)> = match scheme {
        SchemeTag::Rnd => {
            // Partial Fisher-Yates: the first k entries are a uniform
            // sample without replacement.
            let mut pool = eligible.clone();
            for i in 0..k {
                let j = rng.gen_range(i..pool.len());
                pool.swap(i, j);
            }
            pool[..k]
                .iter()
                .map(|&net| (net, KeyGatePlan::Parity { bit: rng.gen() }))
                .collect()
        }
        SchemeTag::Toc13Xor => {
            let metric_seed = rng.gen();
            impact_ranking(c, &eligible, metric_seed)[..k]
                .iter()
                .map(|&(net, _)| (net, KeyGatePlan::Parity { bit: rng.gen() }))
                .collect()
        }
        SchemeTag::Toc13Mux => {
            let metric_seed = rng.gen();
            let ranked = impact_ranking(c, &eligible, metric_seed);
            let fanout = c.fanout();
            // Decoys must sit outside the fanout cone of EVERY target: a
            // decoy inside another target's cone can close a loop through
            // that target's mux. Primary inputs always qualify.
            let mut blocked = vec![false; c.num_nets()];
            for &(net, _) in &ranked[..k] {
                transitive_fanout_into(c, &fanout, net, &mut blocked);
            }
            let candidates: Vec<NetId> = c.nets().filter(|n| !blocked[n.index()]).collect();
            let mut plans = Vec::with_capacity(k);
            for &(net, _) in &ranked[..k] {
                let decoy = candidates[rng.gen_range(0..candidates.len())];
                plans.push((net, KeyGatePlan::Mux { bit: rng.gen(), decoy }));
            }
            plans
        }
        SchemeTag::Iolts14 => {
            let metric_seed = rng.gen();
            let probs = signal_probabilities(c, DEFAULT_PATTERN_BUDGET, metric_seed);
            // The k nets with probability farthest from 1/2.
            let mut ranked: Vec<(NetId, f64)> = eligible
                .iter()
                .map(|&net| (net, probs[net.index()]))
                .collect();
            ranked.sort_by(|a, b| {
                let da = (a.1 - 0.5).abs();
                let db = (b.1 - 0.5).abs();
                db.partial_cmp(&da).unwrap().then(a.0.cmp(&b.0))
            });
            ranked[..k]
                .iter()
                .map(|&(net, p)| {
                    let plan = if p < 0.5 {
                        KeyGatePlan::Mask { bit: true } // AND, transparent at 1
                    } else {
                        KeyGatePlan::Mask { bit: false } // OR, transparent at 0
                    };
                    (net, plan)
                })
                .collect()
        }
        SchemeTag::Dac12 => {
            let metric_seed = rng.gen();
            let ranked = impact_ranking(c, &eligible, metric_seed);
            let pool_size = ranked.len().min((4 * k).max(64));
            let pool: Vec<NetId> = ranked[..pool_size].iter().map(|&(n, _)| n).collect();
            let scores: Vec<u64> = ranked[..pool_size].iter().map(|&(_, s)| s).collect();
            let graph = interference_graph(c, &pool);

            // Greedy max-degree over the remaining graph; zero-degree
            // remainders fall back to the fault-impact order.
            let mut alive = vec![true; pool.len()];
            let mut degree: Vec<usize> = (0..pool.len()).map(|v| graph.degree(v)).collect();
            let mut picks = Vec::with_capacity(k);
            for _ in 0..k {
                let best = (0..pool.len())
                    .filter(|&v| alive[v])
                    .max_by(|&a, &b| {
                        degree[a]
                            .cmp(&degree[b])
                            .then(scores[a].cmp(&scores[b]))
                            .then(b.cmp(&a)) // lower pool index wins ties
                    })
                    .expect("pool is at least k large");
                alive[best] = false;
                for &n in graph.neighbors(best) {
                    if alive[n as usize] {
                        degree[n as usize] -= 1;
                    }
                }
                picks.push(pool[best]);
            }
            picks
                .into_iter()
                .map(|net| (net, KeyGatePlan::Parity { bit: rng.gen() }))
                .collect()
        }
    };

    let (circuit, key_inputs, correct_key) = apply_plans(c, &plans)?;
    Ok(LockedCircuit {
        circuit,
        key_inputs,
        correct_key,
        scheme,
        base_name: c.name().to_string(),
        overhead_pct,
        seed,
    })
}

/// Rewrites one LUT gate as a key-programmable MUX tree: the LUT inputs
/// become the selects and `2^L` fresh key inputs carry the table, so the
/// correct key bits equal the table bits. The table itself disappears from
/// the attacker-visible netlist.
pub fn lut_to_kpg(c: &Circuit, gate_index: usize) -> Result<KpgConversion, ObfuscateError> {
    let gate = c
        .gates()
        .get(gate_index)
        .filter(|g| g.kind == GateKind::Lut)
        .ok_or(ObfuscateError::WrongGateKind {
            gate: gate_index,
            expected: "LUT",
        })?;
    let table = gate.lut_table.clone().expect("validated LUT");
    let selects = gate.inputs.clone();
    let output = gate.output;
    let key_base = next_key_index(c);

    let mut b = c.clone().into_builder();
    b.remove_gate(gate_index);
    let key_inputs: Vec<NetId> = (0..table.len())
        .map(|i| b.add_input(&format!("{KEY_INPUT_PREFIX}{}", key_base + i)))
        .collect();
    build_mux_tree(&mut b, &selects, &key_inputs, output);
    let circuit = b.build()?;
    Ok(KpgConversion {
        circuit,
        key_inputs,
        correct_key: table.bits().to_vec(),
    })
}

/// Rewrites one gate, camouflaged among `possibilities`, as all candidate
/// gates feeding a key-selected MUX tree with `ceil(log2 M)` key inputs.
/// The correct key encodes `true_index`; out-of-range select codes clamp to
/// the last candidate, so some keys alias when M is not a power of two.
pub fn camo_to_kpg(
    c: &Circuit,
    gate_index: usize,
    possibilities: &[GateKind],
    true_index: usize,
) -> Result<KpgConversion, ObfuscateError> {
    let m = possibilities.len();
    if m < 2 {
        return Err(ObfuscateError::BadCandidates(
            "need at least two gate possibilities".to_string(),
        ));
    }
    if true_index >= m {
        return Err(ObfuscateError::BadCandidates(format!(
            "true index {true_index} out of range for {m} possibilities"
        )));
    }
    let gate = c
        .gates()
        .get(gate_index)
        .ok_or(ObfuscateError::WrongGateKind {
            gate: gate_index,
            expected: "existing gate",
        })?;
    if gate.kind != possibilities[true_index] {
        return Err(ObfuscateError::BadCandidates(format!(
            "gate #{gate_index} is {} but candidate {true_index} is {}",
            gate.kind,
            possibilities[true_index]
        )));
    }
    if possibilities.contains(&GateKind::Lut) {
        return Err(ObfuscateError::BadCandidates(
            "LUT candidates carry no table here; convert with lut_to_kpg".to_string(),
        ));
    }
    let inputs = gate.inputs.clone();
    let output = gate.output;
    let key_base = next_key_index(c);

    let mut b = c.clone().into_builder();
    b.remove_gate(gate_index);
    let candidates: Vec<NetId> = possibilities
        .iter()
        .map(|&kind| {
            let net = b.fresh_net("camo");
            b.add_gate(kind, &inputs, net);
            net
        })
        .collect();

    let num_keys = {
        let mut bits = 0usize;
        while 1 << bits < m {
            bits += 1;
        }
        bits
    };
    let key_inputs: Vec<NetId> = (0..num_keys)
        .map(|i| b.add_input(&format!("{KEY_INPUT_PREFIX}{}", key_base + i)))
        .collect();
    let leaves: Vec<NetId> = (0..1usize << num_keys)
        .map(|t| candidates[t.min(m - 1)])
        .collect();
    build_mux_tree(&mut b, &key_inputs, &leaves, output);
    let circuit = b.build()?;
    Ok(KpgConversion {
        circuit,
        key_inputs,
        correct_key: (0..num_keys).map(|i| true_index >> i & 1 == 1).collect(),
    })
}

/// Renders a locked netlist with its comment header. The correct-key line
/// is omitted when `strip_key` is set (the attacker view).
pub fn write_locked_bench(lc: &LockedCircuit, strip_key: bool) -> String {
    let mut s = format!(
        "# locked: scheme={} overhead={} seed={} keys={}\n",
        lc.scheme,
        lc.overhead_pct,
        lc.seed,
        lc.key_inputs.len()
    );
    if !strip_key {
        s.push_str("# key: ");
        s.extend(lc.correct_key.iter().map(|&b| if b { '1' } else { '0' }));
        s.push('\n');
    }
    s.push_str(&write_bench(&lc.circuit));
    s
}

/// Header recovered from a locked `.bench` file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LockHeader {
    pub scheme: Option<SchemeTag>,
    pub overhead_pct: Option<u32>,
    pub seed: Option<u64>,
    pub keys: Option<usize>,
    pub correct_key: Option<Vec<bool>>,
}

/// Reads the `# locked:` / `# key:` comment header back, if present.
pub fn parse_locked_header(text: &str) -> LockHeader {
    let mut header = LockHeader::default();
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("# locked:") {
            for field in rest.split_whitespace() {
                match field.split_once('=') {
                    Some(("scheme", v)) => header.scheme = SchemeTag::parse(v),
                    Some(("overhead", v)) => header.overhead_pct = v.parse().ok(),
                    Some(("seed", v)) => header.seed = v.parse().ok(),
                    Some(("keys", v)) => header.keys = v.parse().ok(),
                    _ => {}
                }
            }
        } else if let Some(rest) = line.strip_prefix("# key:") {
            let bits: Option<Vec<bool>> = rest
                .trim()
                .chars()
                .map(|c| match c {
                    '0' => Some(false),
                    '1' => Some(true),
                    _ => None,
                })
                .collect();
            header.correct_key = bits.filter(|b| !b.is_empty());
        } else if !line.starts_with('#') && !line.is_empty() {
            break; // header comments precede the netlist body
        }
    }
    header
}
