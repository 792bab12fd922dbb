//! Tseitin encoding of circuits: one variable per net, a fixed clause
//! schema per gate kind.
//!
//! Clause counts per gate (n = fan-in, L = LUT fan-in): AND/NAND/OR/NOR
//! `n + 1`; NOT/BUF `2`; XOR/XNOR `4(n - 1)` via a chain of fresh parity
//! nets; MUX `6` (including the two redundant propagation clauses); LUT
//! `2^L` (one clause per table row).

use super::{Clause, CnfError, CnfFormula, Lit, Var};
use crate::netlist::{Circuit, GateKind, NetId};
use alloc::string::ToString;
use alloc::vec::Vec;
use alloc::{format, vec};

/// Hands out fresh 1-based variables.
#[derive(Clone, Debug, Default)]
pub struct VarAllocator {
    next: u32,
}

impl VarAllocator {
    pub fn new() -> VarAllocator {
        VarAllocator { next: 1 }
    }

    pub fn fresh(&mut self) -> Var {
        let v = Var::new(self.next);
        self.next += 1;
        v
    }

    /// Number of variables allocated so far.
    pub fn count(&self) -> u32 {
        self.next - 1
    }
}

/// Maps every net of `c` to a variable: pinned nets use the given variable,
/// the rest get fresh ones.
pub fn allocate_net_vars(
    c: &Circuit,
    alloc: &mut VarAllocator,
    pinned: &[(NetId, Var)],
) -> Vec<Var> {
    let mut vars: Vec<Option<Var>> = vec![None; c.num_nets()];
    for &(net, var) in pinned {
        vars[net.index()] = Some(var);
    }
    vars.into_iter()
        .map(|v| v.unwrap_or_else(|| alloc.fresh()))
        .collect()
}

fn xor2(out: &mut CnfFormula, a: Lit, b: Lit, y: Lit) {
    out.push_lits(&[!a, !b, !y]);
    out.push_lits(&[a, b, !y]);
    out.push_lits(&[!a, b, y]);
    out.push_lits(&[a, !b, y]);
}

/// Encodes a parity chain over `ins`, leaving the final parity on `y`
/// (complemented for XNOR).
fn encode_parity(
    out: &mut CnfFormula,
    alloc: &mut VarAllocator,
    ins: &[Lit],
    y: Lit,
    complement: bool,
) {
    debug_assert!(ins.len() >= 2);
    let mut acc = ins[0];
    for (i, &next) in ins[1..].iter().enumerate() {
        let last = i + 2 == ins.len();
        let target = if last {
            if complement {
                !y
            } else {
                y
            }
        } else {
            Lit::positive(alloc.fresh())
        };
        xor2(out, acc, next, target);
        acc = target;
    }
}

/// Emits consistency clauses for one circuit copy whose nets map to
/// `net_vars`. Fresh helper variables (parity chains) come from `alloc`.
pub fn encode_circuit(
    c: &Circuit,
    net_vars: &[Var],
    alloc: &mut VarAllocator,
    out: &mut CnfFormula,
) {
    for gate in c.gates() {
        let y = Lit::positive(net_vars[gate.output.index()]);
        let ins: Vec<Lit> = gate
            .inputs
            .iter()
            .map(|i| Lit::positive(net_vars[i.index()]))
            .collect();
        match gate.kind {
            GateKind::And => {
                for &a in &ins {
                    out.push_lits(&[a, !y]);
                }
                let mut all: Vec<Lit> = ins.iter().map(|&a| !a).collect();
                all.push(y);
                out.push_lits(&all);
            }
            GateKind::Nand => {
                for &a in &ins {
                    out.push_lits(&[a, y]);
                }
                let mut all: Vec<Lit> = ins.iter().map(|&a| !a).collect();
                all.push(!y);
                out.push_lits(&all);
            }
            GateKind::Or => {
                for &a in &ins {
                    out.push_lits(&[!a, y]);
                }
                let mut all = ins.clone();
                all.push(!y);
                out.push_lits(&all);
            }
            GateKind::Nor => {
                for &a in &ins {
                    out.push_lits(&[!a, !y]);
                }
                let mut all = ins.clone();
                all.push(y);
                out.push_lits(&all);
            }
            GateKind::Xor => encode_parity(out, alloc, &ins, y, false),
            GateKind::Xnor => encode_parity(out, alloc, &ins, y, true),
            GateKind::Not => {
                out.push_lits(&[ins[0], y]);
                out.push_lits(&[!ins[0], !y]);
            }
            GateKind::Buf => {
                out.push_lits(&[ins[0], !y]);
                out.push_lits(&[!ins[0], y]);
            }
            GateKind::Mux2 => {
                let (s, d0, d1) = (ins[0], ins[1], ins[2]);
                out.push_lits(&[!s, !d1, y]);
                out.push_lits(&[!s, d1, !y]);
                out.push_lits(&[s, !d0, y]);
                out.push_lits(&[s, d0, !y]);
                out.push_lits(&[!d0, !d1, y]);
                out.push_lits(&[d0, d1, !y]);
            }
            GateKind::Lut => {
                let table = gate.lut_table.as_ref().expect("validated LUT");
                for t in 0..table.len() {
                    let mut clause: Vec<Lit> = ins
                        .iter()
                        .enumerate()
                        .map(|(j, &a)| if t >> j & 1 == 1 { !a } else { a })
                        .collect();
                    clause.push(if table.row(t) { y } else { !y });
                    out.push_lits(&clause);
                }
            }
        }
    }
}

/// Encodes a circuit with fresh variables for every net; returns the
/// formula and the per-net variable map.
pub fn tseitin(c: &Circuit) -> (CnfFormula, Vec<Var>) {
    let mut alloc = VarAllocator::new();
    let mut formula = CnfFormula::new();
    let net_vars = allocate_net_vars(c, &mut alloc, &[]);
    encode_circuit(c, &net_vars, &mut alloc, &mut formula);
    formula.ensure_vars(alloc.count());
    (formula, net_vars)
}

/// An equivalence miter: UNSAT iff the two circuits agree on every input.
#[derive(Clone, Debug)]
pub struct MiterFormula {
    pub formula: CnfFormula,
    /// Shared input variables, in `a`'s primary-input order.
    pub input_vars: Vec<Var>,
    pub a_net_vars: Vec<Var>,
    pub b_net_vars: Vec<Var>,
}

/// Builds a miter over `a` and `b` with inputs tied by name. Nets of `b`
/// listed in `b_fixed` (key inputs) are pinned to constants instead of
/// being shared.
pub fn equivalence_miter(
    a: &Circuit,
    b: &Circuit,
    b_fixed: &[(NetId, bool)],
) -> Result<MiterFormula, CnfError> {
    let mut alloc = VarAllocator::new();
    let mut formula = CnfFormula::new();

    let a_net_vars = allocate_net_vars(a, &mut alloc, &[]);
    let input_vars: Vec<Var> = a
        .primary_inputs()
        .iter()
        .map(|&pi| a_net_vars[pi.index()])
        .collect();

    // Tie b's free inputs to a's by name.
    let fixed_nets: Vec<NetId> = b_fixed.iter().map(|&(n, _)| n).collect();
    let mut pinned: Vec<(NetId, Var)> = Vec::new();
    for &pi in b.primary_inputs() {
        if fixed_nets.contains(&pi) {
            continue;
        }
        let name = b.net_name(pi);
        let a_net = a.find_net(name).ok_or_else(|| {
            CnfError::MiterMismatch(format!("input `{name}` missing from the reference circuit"))
        })?;
        if !a.is_primary_input(a_net) {
            return Err(CnfError::MiterMismatch(format!(
                "`{name}` is not an input of the reference circuit"
            )));
        }
        pinned.push((pi, a_net_vars[a_net.index()]));
    }
    if pinned.len() != a.primary_inputs().len() {
        return Err(CnfError::MiterMismatch(format!(
            "reference has {} inputs, candidate has {} free inputs",
            a.primary_inputs().len(),
            pinned.len()
        )));
    }
    let b_net_vars = allocate_net_vars(b, &mut alloc, &pinned);

    encode_circuit(a, &a_net_vars, &mut alloc, &mut formula);
    encode_circuit(b, &b_net_vars, &mut alloc, &mut formula);
    for &(net, value) in b_fixed {
        formula.push(Clause::unit(Lit::new(b_net_vars[net.index()], value)));
    }

    // Outputs paired by name; any disagreement raises a difference bit.
    if a.primary_outputs().len() != b.primary_outputs().len() {
        return Err(CnfError::MiterMismatch(
            "output counts differ".to_string(),
        ));
    }
    let mut diff_lits = Vec::new();
    for &po in a.primary_outputs() {
        let name = a.net_name(po);
        let b_net = b.find_net(name).ok_or_else(|| {
            CnfError::MiterMismatch(format!("output `{name}` missing from candidate"))
        })?;
        let d = Lit::positive(alloc.fresh());
        xor2(
            &mut formula,
            Lit::positive(a_net_vars[po.index()]),
            Lit::positive(b_net_vars[b_net.index()]),
            d,
        );
        diff_lits.push(d);
    }
    formula.push(Clause::new(diff_lits));
    formula.ensure_vars(alloc.count());

    Ok(MiterFormula {
        formula,
        input_vars,
        a_net_vars,
        b_net_vars,
    })
}
