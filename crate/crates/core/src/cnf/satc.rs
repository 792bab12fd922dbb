//! The attack-formula state: a key-differentiating base (two keyed copies
//! of the circuit over shared inputs, outputs forced to differ) plus
//! append-only validation copies for each discriminating input and the
//! learned clauses retained between solver calls.

use super::tseitin::{allocate_net_vars, encode_circuit, VarAllocator};
use super::{Clause, CnfError, CnfFormula, Lit, Var};
use crate::netlist::{Circuit, NetId};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// Range of clauses appended by one `add_divc` call.
#[derive(Clone, Copy, Debug)]
pub struct DivcGroup {
    start: usize,
    end: usize,
}

/// Single-owner formula state for one attack run.
pub struct SatcState {
    circuit: Circuit,
    key_inputs: Vec<NetId>,
    x_nets: Vec<NetId>,
    alloc: VarAllocator,
    kdc: CnfFormula,
    sckvc: Vec<Clause>,
    divc_bounds: Vec<usize>,
    lcac: Vec<Clause>,
    x_vars: Vec<Var>,
    key_vars: [Vec<Var>; 2],
    var_map: Option<Vec<(Var, String)>>,
}

impl SatcState {
    /// Builds the KDC: two Tseitin copies sharing the non-key inputs, with
    /// disjoint key variables, and at least one output forced to differ.
    pub fn build_kdc(circuit: &Circuit, key_inputs: &[NetId]) -> SatcState {
        Self::build_kdc_inner(circuit, key_inputs, false)
    }

    /// Like [`SatcState::build_kdc`] but records a variable-to-net map for
    /// the debug sidecar.
    pub fn build_kdc_with_var_map(circuit: &Circuit, key_inputs: &[NetId]) -> SatcState {
        Self::build_kdc_inner(circuit, key_inputs, true)
    }

    fn build_kdc_inner(circuit: &Circuit, key_inputs: &[NetId], record_map: bool) -> SatcState {
        let mut alloc = VarAllocator::new();
        let mut kdc = CnfFormula::new();
        let mut var_map = record_map.then(Vec::new);

        let is_key: Vec<bool> = {
            let mut v = alloc::vec![false; circuit.num_nets()];
            for &k in key_inputs {
                v[k.index()] = true;
            }
            v
        };
        let x_nets: Vec<NetId> = circuit
            .primary_inputs()
            .iter()
            .copied()
            .filter(|pi| !is_key[pi.index()])
            .collect();

        let x_vars: Vec<Var> = x_nets.iter().map(|_| alloc.fresh()).collect();
        let key_vars = [
            key_inputs.iter().map(|_| alloc.fresh()).collect::<Vec<_>>(),
            key_inputs.iter().map(|_| alloc.fresh()).collect::<Vec<_>>(),
        ];
        if let Some(map) = var_map.as_mut() {
            for (net, var) in x_nets.iter().zip(&x_vars) {
                map.push((*var, format!("x:{}", circuit.net_name(*net))));
            }
            for copy in 0..2 {
                for (net, var) in key_inputs.iter().zip(&key_vars[copy]) {
                    map.push((*var, format!("k{}:{}", copy + 1, circuit.net_name(*net))));
                }
            }
        }

        let mut copy_net_vars = [Vec::new(), Vec::new()];
        for copy in 0..2 {
            let mut pinned: Vec<(NetId, Var)> =
                x_nets.iter().copied().zip(x_vars.iter().copied()).collect();
            pinned.extend(
                key_inputs
                    .iter()
                    .copied()
                    .zip(key_vars[copy].iter().copied()),
            );
            let net_vars = allocate_net_vars(circuit, &mut alloc, &pinned);
            encode_circuit(circuit, &net_vars, &mut alloc, &mut kdc);
            if let Some(map) = var_map.as_mut() {
                for (id, var) in circuit.nets().zip(&net_vars) {
                    if !circuit.is_primary_input(id) {
                        map.push((*var, format!("c{}:{}", copy + 1, circuit.net_name(id))));
                    }
                }
            }
            copy_net_vars[copy] = net_vars;
        }

        // One fresh difference bit per output, a single OR clause over them.
        let mut diff = Vec::with_capacity(circuit.primary_outputs().len());
        for &po in circuit.primary_outputs() {
            let y1 = Lit::positive(copy_net_vars[0][po.index()]);
            let y2 = Lit::positive(copy_net_vars[1][po.index()]);
            let d = Lit::positive(alloc.fresh());
            kdc.push_lits(&[!y1, !y2, !d]);
            kdc.push_lits(&[y1, y2, !d]);
            kdc.push_lits(&[!y1, y2, d]);
            kdc.push_lits(&[y1, !y2, d]);
            diff.push(d);
        }
        kdc.push(Clause::new(diff));
        kdc.ensure_vars(alloc.count());

        SatcState {
            circuit: circuit.clone(),
            key_inputs: key_inputs.to_vec(),
            x_nets,
            alloc,
            kdc,
            sckvc: Vec::new(),
            divc_bounds: Vec::new(),
            lcac: Vec::new(),
            x_vars,
            key_vars,
            var_map,
        }
    }

    /// Appends the validation copies for one discriminating input: both key
    /// copies must reproduce the oracle response on that input.
    pub fn add_divc(&mut self, x_di: &[bool], y_f: &[bool]) -> DivcGroup {
        assert_eq!(x_di.len(), self.x_nets.len(), "X assignment width");
        assert_eq!(
            y_f.len(),
            self.circuit.primary_outputs().len(),
            "oracle response width"
        );
        let start = self.sckvc.len();
        let di_index = self.divc_bounds.len();

        // The two copies share one set of input variables, hard-wired by
        // unit clauses; unit propagation specializes the copies in-solver.
        let di_vars: Vec<Var> = self.x_nets.iter().map(|_| self.alloc.fresh()).collect();
        let mut scratch = CnfFormula::new();
        for (var, &bit) in di_vars.iter().zip(x_di) {
            scratch.push(Clause::unit(Lit::new(*var, bit)));
        }
        for copy in 0..2 {
            let mut pinned: Vec<(NetId, Var)> = self
                .x_nets
                .iter()
                .copied()
                .zip(di_vars.iter().copied())
                .collect();
            pinned.extend(
                self.key_inputs
                    .iter()
                    .copied()
                    .zip(self.key_vars[copy].iter().copied()),
            );
            let net_vars = allocate_net_vars(&self.circuit, &mut self.alloc, &pinned);
            encode_circuit(&self.circuit, &net_vars, &mut self.alloc, &mut scratch);
            for (po, &bit) in self.circuit.primary_outputs().iter().zip(y_f) {
                scratch.push(Clause::unit(Lit::new(net_vars[po.index()], bit)));
            }
            if let Some(map) = self.var_map.as_mut() {
                for (id, var) in self.circuit.nets().zip(&net_vars) {
                    if !self.circuit.is_primary_input(id) {
                        map.push((
                            *var,
                            format!("d{}c{}:{}", di_index, copy + 1, self.circuit.net_name(id)),
                        ));
                    }
                }
            }
        }

        self.sckvc.extend(scratch.clauses().iter().cloned());
        let end = self.sckvc.len();
        self.divc_bounds.push(end);
        DivcGroup { start, end }
    }

    /// Appends learned clauses to the retained set. They must be implied by
    /// the formula they were learned from, so the solution set is unchanged.
    pub fn add_learned(&mut self, clauses: &[Clause]) -> Result<(), CnfError> {
        let num_vars = self.alloc.count();
        for clause in clauses {
            let max = clause.max_var();
            if max > num_vars {
                return Err(CnfError::ForeignVariable { var: max, num_vars });
            }
        }
        self.lcac.extend(clauses.iter().cloned());
        Ok(())
    }

    /// Number of discriminating inputs recorded so far.
    pub fn di_count(&self) -> usize {
        self.divc_bounds.len()
    }

    pub fn num_vars(&self) -> u32 {
        self.alloc.count()
    }

    pub fn num_clauses(&self) -> usize {
        self.kdc.len() + self.sckvc.len() + self.lcac.len()
    }

    pub fn learned_count(&self) -> usize {
        self.lcac.len()
    }

    pub fn x_vars(&self) -> &[Var] {
        &self.x_vars
    }

    pub fn key_vars(&self, copy: usize) -> &[Var] {
        &self.key_vars[copy]
    }

    pub fn kdc_clauses(&self) -> &[Clause] {
        self.kdc.clauses()
    }

    pub fn divc_clauses(&self, group: DivcGroup) -> &[Clause] {
        &self.sckvc[group.start..group.end]
    }

    /// Snapshot of the full per-iteration formula: KDC ∧ SCKVC ∧ LCAC.
    pub fn satc_formula(&self) -> CnfFormula {
        let mut f = CnfFormula::with_vars(self.alloc.count());
        f.extend_from(self.kdc.clauses());
        f.extend_from(&self.sckvc);
        f.extend_from(&self.lcac);
        f
    }

    /// The key-extraction formula: SCKVC plus per-bit equality of the two
    /// key copies. Any model's first-copy key projection is a valid key.
    pub fn keygen_formula(&self) -> CnfFormula {
        let mut f = CnfFormula::with_vars(self.alloc.count());
        f.extend_from(&self.sckvc);
        for (k1, k2) in self.key_vars[0].iter().zip(&self.key_vars[1]) {
            let a = Lit::positive(*k1);
            let b = Lit::positive(*k2);
            f.push_lits(&[!a, b]);
            f.push_lits(&[a, !b]);
        }
        f
    }

    /// X projection of a model (0-indexed by variable offset); this is the
    /// discriminating input when the SATC solve was satisfiable.
    pub fn project_inputs(&self, model: &[bool]) -> Vec<bool> {
        self.x_vars.iter().map(|v| model[v.offset()]).collect()
    }

    /// Key projection of a model for copy 0 or 1.
    pub fn project_key(&self, model: &[bool], copy: usize) -> Vec<bool> {
        self.key_vars[copy]
            .iter()
            .map(|v| model[v.offset()])
            .collect()
    }

    /// Debug sidecar entries `(variable, "<copy>:<net>")`, present when the
    /// state was built with `build_kdc_with_var_map`.
    pub fn var_map(&self) -> Option<&[(Var, String)]> {
        self.var_map.as_deref()
    }
}
