//! Gate-level combinational netlists.
//!
//! A [`Circuit`] is an immutable DAG of gates over named nets, built either
//! by parsing ISCAS-85 `.bench` text ([`parse_bench`]) or through a
//! [`CircuitBuilder`]. Construction validates the structural invariants:
//! every net has exactly one driver, gate arities match their kinds, and the
//! gate graph is acyclic.

mod bench;
pub mod synth;

pub use bench::{parse_bench, structurally_equal, write_bench};
pub(crate) use bench::build_mux_tree;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

/// Reserved prefix for nets synthesized by decomposition or locking.
pub const SYNTH_NET_PREFIX: &str = "__kf_";

/// Dense index of a net within one circuit.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NetId(u32);

impl NetId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    fn new(index: usize) -> NetId {
        NetId(index as u32)
    }
}

/// The supported gate kinds.
///
/// `Mux2` takes `[select, d0, d1]` and outputs `d1` when the select is 1,
/// `d0` otherwise. `Lut` carries a truth table where bit `t` is the output
/// for input valuation `t` (first input = least-significant bit of `t`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum GateKind {
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
    Mux2,
    Lut,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Nand => "NAND",
            GateKind::Or => "OR",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Not => "NOT",
            GateKind::Buf => "BUF",
            GateKind::Mux2 => "MUX",
            GateKind::Lut => "LUT",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// LUT truth table: bit `t` is the output for input valuation `t`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LutTable {
    bits: Vec<bool>,
}

impl LutTable {
    /// Builds a table of `2^num_inputs` bits; `bits[t]` is the row output.
    pub fn new(bits: Vec<bool>) -> LutTable {
        LutTable { bits }
    }

    /// Builds the table from an integer, bit `t` for row `t`.
    pub fn from_value(num_inputs: usize, value: u128) -> LutTable {
        let rows = 1usize << num_inputs;
        LutTable {
            bits: (0..rows).map(|t| value >> t & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn row(&self, t: usize) -> bool {
        self.bits[t]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Hexadecimal rendering, most-significant row first, e.g. `0x8` for a
    /// 2-input AND.
    pub fn to_hex(&self) -> String {
        let nibbles = self.bits.len().div_ceil(4);
        let mut s = String::with_capacity(nibbles + 2);
        s.push_str("0x");
        for n in (0..nibbles).rev() {
            let mut v = 0u8;
            for b in 0..4 {
                let t = n * 4 + b;
                if t < self.bits.len() && self.bits[t] {
                    v |= 1 << b;
                }
            }
            s.push(char::from_digit(v as u32, 16).unwrap());
        }
        s
    }

    /// Parses the `to_hex` format; `num_inputs` fixes the table length.
    pub fn from_hex(num_inputs: usize, hex: &str) -> Option<LutTable> {
        let digits = hex.strip_prefix("0x").or_else(|| hex.strip_prefix("0X"))?;
        if digits.is_empty() {
            return None;
        }
        let rows = 1usize << num_inputs;
        let mut bits = vec![false; rows];
        for (i, c) in digits.chars().rev().enumerate() {
            let v = c.to_digit(16)? as usize;
            for b in 0..4 {
                let t = i * 4 + b;
                if v >> b & 1 == 1 {
                    if t >= rows {
                        return None; // table wider than 2^L
                    }
                    bits[t] = true;
                }
            }
        }
        Some(LutTable { bits })
    }
}

/// One gate: a kind, ordered input nets, and the single output net.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<NetId>,
    pub output: NetId,
    pub lut_table: Option<LutTable>,
}

impl Gate {
    pub fn new(kind: GateKind, inputs: Vec<NetId>, output: NetId) -> Gate {
        Gate {
            kind,
            inputs,
            output,
            lut_table: None,
        }
    }

    pub fn lut(inputs: Vec<NetId>, table: LutTable, output: NetId) -> Gate {
        Gate {
            kind: GateKind::Lut,
            inputs,
            output,
            lut_table: Some(table),
        }
    }
}

/// What drives a net.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Driver {
    /// Position within `primary_inputs`.
    Input(u32),
    /// Index into `gates`.
    Gate(u32),
}

/// Validation and parse errors. Each names the offending net and, when the
/// error comes from `.bench` text, the 1-based source line.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NetlistError {
    UnknownGateKind { line: usize, kind: String },
    UndrivenNet { net: String, line: Option<usize> },
    MultipleDrivers { net: String, line: Option<usize> },
    CombinationalLoop { net: String },
    ArityMismatch {
        net: String,
        kind: String,
        detail: String,
        line: Option<usize>,
    },
}

impl fmt::Display for NetlistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn at(f: &mut fmt::Formatter<'_>, line: &Option<usize>) -> fmt::Result {
            match line {
                Some(n) => write!(f, " (line {n})"),
                None => Ok(()),
            }
        }
        match self {
            NetlistError::UnknownGateKind { line, kind } => {
                if matches!(kind.as_str(), "DFF" | "DFFSR" | "LATCH") {
                    write!(
                        f,
                        "line {line}: sequential element `{kind}` is not supported; \
                         only combinational netlists are accepted"
                    )
                } else {
                    write!(f, "line {line}: unknown gate kind `{kind}`")
                }
            }
            NetlistError::UndrivenNet { net, line } => {
                write!(f, "net `{net}` is used but never driven")?;
                at(f, line)
            }
            NetlistError::MultipleDrivers { net, line } => {
                write!(f, "net `{net}` has more than one driver")?;
                at(f, line)
            }
            NetlistError::CombinationalLoop { net } => {
                write!(f, "combinational loop through net `{net}`")
            }
            NetlistError::ArityMismatch {
                net,
                kind,
                detail,
                line,
            } => {
                write!(f, "gate `{kind}` driving `{net}`: {detail}")?;
                at(f, line)
            }
        }
    }
}

impl core::error::Error for NetlistError {}

/// Basic size metrics of a circuit.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CircuitStats {
    pub gates: usize,
    pub pis: usize,
    pub pos: usize,
    /// Longest primary-input-to-primary-output path, in gates.
    pub depth: usize,
}

/// An immutable, validated combinational netlist.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Circuit {
    name: String,
    net_names: Vec<String>,
    gates: Vec<Gate>,
    primary_inputs: Vec<NetId>,
    primary_outputs: Vec<NetId>,
    drivers: Vec<Driver>,
    topo: Vec<u32>,
}

impl Circuit {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Returns a copy of the circuit under a different name.
    pub fn with_name(mut self, name: &str) -> Circuit {
        self.name = name.to_string();
        self
    }

    pub fn num_nets(&self) -> usize {
        self.net_names.len()
    }

    pub fn net_name(&self, net: NetId) -> &str {
        &self.net_names[net.index()]
    }

    pub fn find_net(&self, name: &str) -> Option<NetId> {
        self.net_names
            .iter()
            .position(|n| n == name)
            .map(NetId::new)
    }

    pub fn nets(&self) -> impl Iterator<Item = NetId> + '_ {
        (0..self.net_names.len()).map(NetId::new)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn primary_inputs(&self) -> &[NetId] {
        &self.primary_inputs
    }

    pub fn primary_outputs(&self) -> &[NetId] {
        &self.primary_outputs
    }

    pub fn driver(&self, net: NetId) -> Driver {
        self.drivers[net.index()]
    }

    pub fn is_primary_input(&self, net: NetId) -> bool {
        matches!(self.drivers[net.index()], Driver::Input(_))
    }

    /// Gate indices in topological order: every gate appears after the
    /// drivers of all its inputs, ties broken by declaration index.
    pub fn topo_order(&self) -> &[u32] {
        &self.topo
    }

    /// Gates in topological order.
    pub fn topo_gates(&self) -> impl Iterator<Item = &Gate> + '_ {
        self.topo.iter().map(|&g| &self.gates[g as usize])
    }

    /// For each net, the gate indices reading it.
    pub fn fanout(&self) -> Vec<Vec<u32>> {
        let mut fanout = vec![Vec::new(); self.net_names.len()];
        for (gi, gate) in self.gates.iter().enumerate() {
            for &input in &gate.inputs {
                fanout[input.index()].push(gi as u32);
            }
        }
        fanout
    }

    /// Gate-output nets, i.e. the locations eligible for key-gate insertion.
    pub fn internal_nets(&self) -> Vec<NetId> {
        self.gates.iter().map(|g| g.output).collect()
    }

    pub fn stats(&self) -> CircuitStats {
        let mut level = vec![0usize; self.net_names.len()];
        for gate in self.topo_gates() {
            let max_in = gate
                .inputs
                .iter()
                .map(|i| level[i.index()])
                .max()
                .unwrap_or(0);
            level[gate.output.index()] = max_in + 1;
        }
        let depth = self
            .primary_outputs
            .iter()
            .map(|po| level[po.index()])
            .max()
            .unwrap_or(0);
        CircuitStats {
            gates: self.gates.len(),
            pis: self.primary_inputs.len(),
            pos: self.primary_outputs.len(),
            depth,
        }
    }

    /// Decomposes back into a builder, preserving net ids.
    pub fn into_builder(self) -> CircuitBuilder {
        let index = self
            .net_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), NetId::new(i)))
            .collect();
        CircuitBuilder {
            name: self.name,
            net_names: self.net_names,
            index,
            gates: self.gates,
            primary_inputs: self.primary_inputs,
            primary_outputs: self.primary_outputs,
            fresh_counter: 0,
        }
    }
}

/// Checks a gate's arity against its kind.
fn check_arity(gate: &Gate, net: &str) -> Result<(), NetlistError> {
    let n = gate.inputs.len();
    let fail = |detail: String| NetlistError::ArityMismatch {
        net: net.to_string(),
        kind: gate.kind.name().to_string(),
        detail,
        line: None,
    };
    match gate.kind {
        GateKind::Not | GateKind::Buf => {
            if n != 1 {
                return Err(fail(format!("expected 1 input, got {n}")));
            }
        }
        GateKind::Mux2 => {
            if n != 3 {
                return Err(fail(format!("expected 3 inputs (select, d0, d1), got {n}")));
            }
        }
        GateKind::Lut => {
            let table = gate
                .lut_table
                .as_ref()
                .ok_or_else(|| fail("LUT gate without a table".to_string()))?;
            if n == 0 || n > 16 {
                return Err(fail(format!("expected 1..=16 inputs, got {n}")));
            }
            if table.len() != 1 << n {
                return Err(fail(format!(
                    "table has {} rows, expected {}",
                    table.len(),
                    1 << n
                )));
            }
        }
        _ => {
            if n < 2 {
                return Err(fail(format!("expected at least 2 inputs, got {n}")));
            }
        }
    }
    if gate.kind != GateKind::Lut && gate.lut_table.is_some() {
        return Err(fail("only LUT gates carry a table".to_string()));
    }
    Ok(())
}

/// Incrementally assembles a circuit; `build` validates the invariants.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    name: String,
    net_names: Vec<String>,
    index: BTreeMap<String, NetId>,
    gates: Vec<Gate>,
    primary_inputs: Vec<NetId>,
    primary_outputs: Vec<NetId>,
    fresh_counter: u32,
}

impl CircuitBuilder {
    pub fn new(name: &str) -> CircuitBuilder {
        CircuitBuilder {
            name: name.to_string(),
            net_names: Vec::new(),
            index: BTreeMap::new(),
            gates: Vec::new(),
            primary_inputs: Vec::new(),
            primary_outputs: Vec::new(),
            fresh_counter: 0,
        }
    }

    /// Interns a net name, allocating an id on first sight.
    pub fn net(&mut self, name: &str) -> NetId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = NetId::new(self.net_names.len());
        self.net_names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    /// Allocates a synthesized net with the reserved `__kf_` prefix.
    pub fn fresh_net(&mut self, tag: &str) -> NetId {
        loop {
            let name = format!("{SYNTH_NET_PREFIX}{tag}{}", self.fresh_counter);
            self.fresh_counter += 1;
            if !self.index.contains_key(&name) {
                return self.net(&name);
            }
        }
    }

    pub fn add_input(&mut self, name: &str) -> NetId {
        let id = self.net(name);
        self.primary_inputs.push(id);
        id
    }

    pub fn add_output(&mut self, net: NetId) {
        self.primary_outputs.push(net);
    }

    pub fn add_gate(&mut self, kind: GateKind, inputs: &[NetId], output: NetId) {
        self.gates.push(Gate::new(kind, inputs.to_vec(), output));
    }

    pub fn add_lut(&mut self, inputs: &[NetId], table: LutTable, output: NetId) {
        self.gates.push(Gate::lut(inputs.to_vec(), table, output));
    }

    pub fn push_gate(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gates_mut(&mut self) -> &mut [Gate] {
        &mut self.gates
    }

    pub fn primary_inputs(&self) -> &[NetId] {
        &self.primary_inputs
    }

    pub fn primary_outputs_mut(&mut self) -> &mut [NetId] {
        &mut self.primary_outputs
    }

    pub fn remove_gate(&mut self, index: usize) -> Gate {
        self.gates.remove(index)
    }

    pub fn net_name(&self, net: NetId) -> &str {
        &self.net_names[net.index()]
    }

    /// Validates drivers, arities and acyclicity, producing the circuit.
    pub fn build(self) -> Result<Circuit, NetlistError> {
        let num_nets = self.net_names.len();
        let name_of = |id: NetId| self.net_names[id.index()].clone();

        // Exactly one driver per net.
        let mut drivers: Vec<Option<Driver>> = vec![None; num_nets];
        for (pos, &pi) in self.primary_inputs.iter().enumerate() {
            if drivers[pi.index()].is_some() {
                return Err(NetlistError::MultipleDrivers {
                    net: name_of(pi),
                    line: None,
                });
            }
            drivers[pi.index()] = Some(Driver::Input(pos as u32));
        }
        for (gi, gate) in self.gates.iter().enumerate() {
            if drivers[gate.output.index()].is_some() {
                return Err(NetlistError::MultipleDrivers {
                    net: name_of(gate.output),
                    line: None,
                });
            }
            drivers[gate.output.index()] = Some(Driver::Gate(gi as u32));
        }
        let mut drivers_final = Vec::with_capacity(num_nets);
        for (i, d) in drivers.iter().enumerate() {
            match d {
                Some(d) => drivers_final.push(*d),
                None => {
                    return Err(NetlistError::UndrivenNet {
                        net: self.net_names[i].clone(),
                        line: None,
                    })
                }
            }
        }

        for gate in &self.gates {
            check_arity(gate, &name_of(gate.output))?;
        }

        // Kahn's algorithm; a min-heap on gate index keeps ties in
        // declaration order. The ready set is a sorted Vec used as a heap
        // substitute: pop-min via binary search insertion keeps it ordered.
        let mut pending = vec![0usize; self.gates.len()];
        let mut dependents: Vec<Vec<u32>> = vec![Vec::new(); num_nets];
        for (gi, gate) in self.gates.iter().enumerate() {
            for &input in &gate.inputs {
                if matches!(drivers_final[input.index()], Driver::Gate(_)) {
                    pending[gi] += 1;
                    dependents[input.index()].push(gi as u32);
                }
            }
        }
        let mut ready: Vec<u32> = pending
            .iter()
            .enumerate()
            .filter(|(_, &p)| p == 0)
            .map(|(gi, _)| gi as u32)
            .collect();
        ready.sort_unstable_by(|a, b| b.cmp(a)); // descending; pop from the back
        let mut topo = Vec::with_capacity(self.gates.len());
        while let Some(gi) = ready.pop() {
            topo.push(gi);
            let out = self.gates[gi as usize].output;
            for &dep in &dependents[out.index()] {
                pending[dep as usize] -= 1;
                if pending[dep as usize] == 0 {
                    let pos = ready.partition_point(|&x| x > dep);
                    ready.insert(pos, dep);
                }
            }
        }
        if topo.len() != self.gates.len() {
            let stuck = pending
                .iter()
                .position(|&p| p > 0)
                .expect("unsorted gate must exist");
            return Err(NetlistError::CombinationalLoop {
                net: name_of(self.gates[stuck].output),
            });
        }

        Ok(Circuit {
            name: self.name,
            net_names: self.net_names,
            gates: self.gates,
            primary_inputs: self.primary_inputs,
            primary_outputs: self.primary_outputs,
            drivers: drivers_final,
            topo,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and2() -> Circuit {
        let mut b = CircuitBuilder::new("and2");
        let a = b.add_input("a");
        let c = b.add_input("b");
        let y = b.net("y");
        b.add_gate(GateKind::And, &[a, c], y);
        b.add_output(y);
        b.build().unwrap()
    }

    #[test]
    fn single_and_stats() {
        let c = and2();
        assert_eq!(
            c.stats(),
            CircuitStats {
                gates: 1,
                pis: 2,
                pos: 1,
                depth: 1
            }
        );
    }

    #[test]
    fn two_not_chain_depth_and_topo() {
        let mut b = CircuitBuilder::new("chain");
        let a = b.add_input("a");
        let m = b.net("m");
        let y = b.net("y");
        // Declare in reverse order to exercise the sort.
        b.add_gate(GateKind::Not, &[m], y);
        b.add_gate(GateKind::Not, &[a], m);
        b.add_output(y);
        let c = b.build().unwrap();
        assert_eq!(c.stats().depth, 2);
        assert_eq!(c.topo_order(), &[1, 0]);
    }

    #[test]
    fn undriven_net_rejected() {
        let mut b = CircuitBuilder::new("bad");
        let a = b.add_input("a");
        let z = b.net("z");
        let y = b.net("y");
        b.add_gate(GateKind::And, &[a, z], y);
        b.add_output(y);
        match b.build() {
            Err(NetlistError::UndrivenNet { net, .. }) => assert_eq!(net, "z"),
            other => panic!("expected UndrivenNet, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_driver_rejected() {
        let mut b = CircuitBuilder::new("bad");
        let a = b.add_input("a");
        let y = b.net("y");
        b.add_gate(GateKind::Buf, &[a], y);
        b.add_gate(GateKind::Not, &[a], y);
        b.add_output(y);
        assert!(matches!(
            b.build(),
            Err(NetlistError::MultipleDrivers { .. })
        ));
    }

    #[test]
    fn loop_rejected() {
        let mut b = CircuitBuilder::new("bad");
        let a = b.add_input("a");
        let x = b.net("x");
        let y = b.net("y");
        b.add_gate(GateKind::And, &[a, y], x);
        b.add_gate(GateKind::Buf, &[x], y);
        b.add_output(y);
        assert!(matches!(
            b.build(),
            Err(NetlistError::CombinationalLoop { .. })
        ));
    }

    #[test]
    fn arity_checked() {
        let mut b = CircuitBuilder::new("bad");
        let a = b.add_input("a");
        let y = b.net("y");
        b.add_gate(GateKind::And, &[a], y);
        b.add_output(y);
        assert!(matches!(b.build(), Err(NetlistError::ArityMismatch { .. })));
    }

    #[test]
    fn lut_table_hex_round_trip() {
        let t = LutTable::from_value(2, 0b0110);
        assert_eq!(t.to_hex(), "0x6");
        assert_eq!(LutTable::from_hex(2, "0x6").unwrap(), t);
        assert_eq!(LutTable::from_hex(2, "0x06").unwrap(), t);
        // Table value too wide for the arity.
        assert!(LutTable::from_hex(2, "0x1f").is_none());
        let wide = LutTable::from_value(3, 0xA5);
        assert_eq!(wide.to_hex(), "0xa5");
        assert_eq!(LutTable::from_hex(3, "0xa5").unwrap(), wide);
    }

    #[test]
    fn fresh_nets_avoid_collisions() {
        let mut b = CircuitBuilder::new("t");
        b.net("__kf_x0");
        let f = b.fresh_net("x");
        assert_ne!(b.net_name(f), "__kf_x0");
    }
}
