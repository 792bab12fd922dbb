//! The oracle-guided attack: iterate discriminating-input discovery over
//! the SATC formula, query the oracle once per input, grow the validation
//! constraints, and finally extract and verify a key.
//!
//! With the embedded backend the session is incremental: new constraint
//! copies are pushed into the live solver and everything it learned stays.
//! External backends re-solve the re-encoded formula each pass, and no
//! learned clauses are retained (they cannot be exported portably).

use crate::backend::{
    solve_oneshot, BackendKind, BackendSpec, EmbeddedSession, ResourceReport, SolveResult,
    SolverError, Status, DEFAULT_TIMEOUT,
};
use keyforge_core::analysis::{simulate, simulate_block};
use keyforge_core::cnf::{equivalence_miter, Lit, SatcState};
use keyforge_core::netlist::{Circuit, NetId};
use keyforge_core::obfuscate::LockedCircuit;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("the locked circuit exposes no key inputs")]
    NoKeyInputs,
    #[error("input/output interfaces do not line up: {0}")]
    InterfaceMismatch(String),
    #[error("key generation is unsatisfiable: the obfuscation instance is invalid")]
    InvalidObfuscation,
    #[error("instance too large to brute force ({0})")]
    TooLarge(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Answers input queries like the unlocked working chip.
pub trait Oracle {
    fn query(&mut self, inputs: &[bool]) -> Vec<bool>;
}

/// The standard oracle: simulation of the original netlist.
pub struct CircuitOracle<'a> {
    circuit: &'a Circuit,
    pub queries: u64,
}

impl<'a> CircuitOracle<'a> {
    pub fn new(circuit: &'a Circuit) -> CircuitOracle<'a> {
        CircuitOracle {
            circuit,
            queries: 0,
        }
    }
}

impl Oracle for CircuitOracle<'_> {
    fn query(&mut self, inputs: &[bool]) -> Vec<bool> {
        self.queries += 1;
        simulate(self.circuit, inputs).expect("oracle input width")
    }
}

/// One discriminating input and the oracle's response.
#[derive(Clone, Debug)]
pub struct DiRecord {
    pub inputs: Vec<bool>,
    pub outputs: Vec<bool>,
}

/// Effort of one solver pass.
#[derive(Clone, Debug)]
pub struct PassRecord {
    pub solve_time: f64,
    pub cumulative_clauses: usize,
    pub cumulative_vars: u32,
    pub learned_count: u64,
    pub mean_learned_len: Option<f64>,
}

impl PassRecord {
    fn from_result(result: &SolveResult, state: &SatcState) -> PassRecord {
        PassRecord {
            solve_time: result.resources.wall_time,
            cumulative_clauses: state.num_clauses(),
            cumulative_vars: state.num_vars(),
            learned_count: result.resources.learned_count.unwrap_or(0),
            mean_learned_len: result.resources.mean_learned_len,
        }
    }
}

/// Per-iteration record of the whole attack.
#[derive(Clone, Debug, Default)]
pub struct AttackTrace {
    pub dis: Vec<DiRecord>,
    /// One record per discriminating-input pass, in order.
    pub passes: Vec<PassRecord>,
    /// The closing pass that proved no further input exists.
    pub final_pass: Option<PassRecord>,
    pub keygen_pass: Option<PassRecord>,
    pub total_time: f64,
    pub peak_memory: u64,
}

impl AttackTrace {
    /// Iteration count; equals the number of discriminating inputs.
    pub fn iterations(&self) -> usize {
        self.dis.len()
    }

    /// Mean learned-clause length over every pass, weighted by count.
    pub fn mean_learned_len(&self) -> Option<f64> {
        let mut clauses = 0u64;
        let mut weighted = 0.0;
        for p in self.passes.iter().chain(&self.final_pass) {
            if let Some(len) = p.mean_learned_len {
                clauses += p.learned_count;
                weighted += len * p.learned_count as f64;
            }
        }
        (clauses > 0).then(|| weighted / clauses as f64)
    }
}

#[derive(Clone, Debug)]
pub struct RecoveredKey {
    pub bits: Vec<bool>,
    pub verified: bool,
}

#[derive(Clone, Debug)]
pub enum AttackOutcome {
    Solved(RecoveredKey),
    TimedOut,
}

#[derive(Clone, Debug)]
pub struct AttackReport {
    pub outcome: AttackOutcome,
    pub trace: AttackTrace,
}

impl AttackReport {
    pub fn key(&self) -> Option<&RecoveredKey> {
        match &self.outcome {
            AttackOutcome::Solved(k) => Some(k),
            AttackOutcome::TimedOut => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AttackLimits {
    pub timeout: Option<Duration>,
    pub max_iterations: Option<u64>,
}

impl Default for AttackLimits {
    fn default() -> AttackLimits {
        AttackLimits {
            timeout: Some(DEFAULT_TIMEOUT),
            max_iterations: None,
        }
    }
}

enum Session {
    Incremental(EmbeddedSession),
    Reencode(BackendSpec),
}

/// Runs the attack against a locked circuit, using its original as the
/// functional oracle.
pub fn sat_attack_locked(
    locked: &LockedCircuit,
    oracle_circuit: &Circuit,
    backend: &BackendSpec,
    limits: &AttackLimits,
) -> Result<AttackReport, AttackError> {
    let mut oracle = CircuitOracle::new(oracle_circuit);
    sat_attack(
        &locked.circuit,
        &locked.key_inputs,
        &mut oracle,
        backend,
        limits,
    )
}

/// The attack proper, over any oracle implementation.
pub fn sat_attack(
    circuit: &Circuit,
    key_inputs: &[NetId],
    oracle: &mut dyn Oracle,
    backend: &BackendSpec,
    limits: &AttackLimits,
) -> Result<AttackReport, AttackError> {
    if key_inputs.is_empty() {
        return Err(AttackError::NoKeyInputs);
    }
    let start = Instant::now();
    let deadline = limits.timeout.map(|t| start + t);
    let mut trace = AttackTrace::default();

    let mut state = SatcState::build_kdc(circuit, key_inputs);
    let mut session = match &backend.kind {
        BackendKind::Embedded => {
            let mut s = EmbeddedSession::new();
            s.ensure_vars(state.num_vars());
            s.add_clauses(state.kdc_clauses());
            Session::Incremental(s)
        }
        BackendKind::External { .. } => Session::Reencode(backend.clone()),
    };

    let finish_timeout = |mut trace: AttackTrace, start: Instant| {
        trace.total_time = start.elapsed().as_secs_f64();
        Ok(AttackReport {
            outcome: AttackOutcome::TimedOut,
            trace,
        })
    };

    loop {
        let remaining = match deadline {
            Some(d) => match d.checked_duration_since(Instant::now()) {
                Some(r) => Some(r),
                None => return finish_timeout(trace, start),
            },
            None => None,
        };
        if let Some(max) = limits.max_iterations {
            if trace.dis.len() as u64 >= max {
                return finish_timeout(trace, start);
            }
        }

        let result = match &mut session {
            Session::Incremental(s) => s.solve(&[], remaining)?,
            Session::Reencode(spec) => {
                let spec = spec.clone().with_timeout(remaining);
                solve_oneshot(&state.satc_formula(), &spec)?
            }
        };
        trace.peak_memory = trace.peak_memory.max(result.resources.peak_memory);

        match result.status {
            Status::Timeout => return finish_timeout(trace, start),
            Status::Unsat => {
                trace.final_pass = Some(PassRecord::from_result(&result, &state));
                break;
            }
            Status::Sat => {
                let model = result.model.as_deref().expect("model on SAT");
                let x_di = state.project_inputs(model);
                let y_f = oracle.query(&x_di);
                let group = state.add_divc(&x_di, &y_f);
                if let Session::Incremental(s) = &mut session {
                    s.ensure_vars(state.num_vars());
                    s.add_clauses(state.divc_clauses(group));
                }
                if let Some(learned) = &result.learned {
                    // Bookkeeping for traces and snapshot rebuilds; the
                    // incremental session already holds these internally.
                    state
                        .add_learned(learned)
                        .expect("solver clauses use known variables");
                }
                trace.passes.push(PassRecord::from_result(&result, &state));
                trace.dis.push(DiRecord {
                    inputs: x_di,
                    outputs: y_f,
                });
            }
        }
    }

    // Key extraction from the validation constraints alone.
    let remaining = match deadline {
        Some(d) => match d.checked_duration_since(Instant::now()) {
            Some(r) => Some(r),
            None => return finish_timeout(trace, start),
        },
        None => None,
    };
    let keygen_spec = backend.clone().with_timeout(remaining);
    let result = solve_oneshot(&state.keygen_formula(), &keygen_spec)?;
    trace.peak_memory = trace.peak_memory.max(result.resources.peak_memory);
    trace.keygen_pass = Some(PassRecord::from_result(&result, &state));
    let key = match result.status {
        Status::Timeout => return finish_timeout(trace, start),
        Status::Unsat => return Err(AttackError::InvalidObfuscation),
        Status::Sat => {
            let model = result.model.as_deref().expect("model on SAT");
            state.project_key(model, 0)
        }
    };

    let verified = verify_key(circuit, key_inputs, &key, oracleify(oracle, circuit))?;
    trace.total_time = start.elapsed().as_secs_f64();
    Ok(AttackReport {
        outcome: AttackOutcome::Solved(RecoveredKey {
            bits: key,
            verified,
        }),
        trace,
    })
}

/// The verification step needs the oracle as a netlist for the miter; the
/// attack keeps the query interface abstract, so the circuit is threaded
/// through separately.
fn oracleify<'a>(_oracle: &mut dyn Oracle, circuit: &'a Circuit) -> &'a Circuit {
    circuit
}

/// Formal equivalence check: true iff the miter of the oracle circuit and
/// the locked circuit with `key` hard-wired is unsatisfiable. For up to 16
/// free inputs the verdict is cross-checked by exhaustive simulation.
pub fn verify_key(
    circuit: &Circuit,
    key_inputs: &[NetId],
    key: &[bool],
    oracle_circuit: &Circuit,
) -> Result<bool, AttackError> {
    assert_eq!(key.len(), key_inputs.len(), "key width");
    let fixed: Vec<(NetId, bool)> = key_inputs.iter().copied().zip(key.iter().copied()).collect();
    let miter = equivalence_miter(oracle_circuit, circuit, &fixed)
        .map_err(|e| AttackError::InterfaceMismatch(e.to_string()))?;
    let result = crate::backend::solve_embedded(&miter.formula, &[], None)?;
    let equivalent = match result.status {
        Status::Unsat => true,
        Status::Sat => false,
        Status::Timeout => unreachable!("no timeout configured"),
    };

    let nx = oracle_circuit.primary_inputs().len();
    if nx <= 16 {
        let brute = exhaustive_equivalence(circuit, key_inputs, key, oracle_circuit);
        assert_eq!(
            brute, equivalent,
            "miter verdict must agree with exhaustive simulation"
        );
    }
    Ok(equivalent)
}

/// Block-simulation sweep over all input patterns.
fn exhaustive_equivalence(
    circuit: &Circuit,
    key_inputs: &[NetId],
    key: &[bool],
    oracle_circuit: &Circuit,
) -> bool {
    let x_nets: Vec<NetId> = circuit
        .primary_inputs()
        .iter()
        .copied()
        .filter(|pi| !key_inputs.contains(pi))
        .collect();
    let nx = x_nets.len();
    debug_assert_eq!(nx, oracle_circuit.primary_inputs().len());
    let total = 1u64 << nx;
    let lanes = total.min(64) as u32;

    let mut t = 0u64;
    while t < total {
        // Pattern block for lanes t..t+64 over the oracle's input order.
        let oracle_words: Vec<u64> = (0..nx)
            .map(|i| {
                let mut w = 0u64;
                for lane in 0..lanes as u64 {
                    if (t + lane) >> i & 1 == 1 {
                        w |= 1 << lane;
                    }
                }
                w
            })
            .collect();
        // The locked circuit's inputs follow its own PI order, with key
        // bits held constant; inputs are matched to the oracle by name.
        let locked_words: Vec<u64> = circuit
            .primary_inputs()
            .iter()
            .map(|&pi| {
                if let Some(ki) = key_inputs.iter().position(|k| *k == pi) {
                    if key[ki] {
                        !0u64
                    } else {
                        0
                    }
                } else {
                    let name = circuit.net_name(pi);
                    let pos = oracle_circuit
                        .primary_inputs()
                        .iter()
                        .position(|&o| oracle_circuit.net_name(o) == name)
                        .expect("interface checked by the miter");
                    oracle_words[pos]
                }
            })
            .collect();

        let oracle_out = simulate_block(oracle_circuit, &oracle_words).expect("width");
        let locked_out = simulate_block(circuit, &locked_words).expect("width");
        let mask = if total - t >= 64 {
            !0u64
        } else {
            (1u64 << (total - t)) - 1
        };
        // Outputs matched by name.
        for (pos, &po) in oracle_circuit.primary_outputs().iter().enumerate() {
            let name = oracle_circuit.net_name(po);
            let locked_pos = circuit
                .primary_outputs()
                .iter()
                .position(|&p| circuit.net_name(p) == name)
                .expect("interface checked by the miter");
            if (oracle_out[pos] ^ locked_out[locked_pos]) & mask != 0 {
                return false;
            }
        }
        t += 64;
    }
    true
}

/// Exact set of valid keys by full enumeration over inputs and keys.
/// Requires at most 16 key bits and 16 free inputs.
pub fn brute_force_svk(
    circuit: &Circuit,
    key_inputs: &[NetId],
    oracle_circuit: &Circuit,
) -> Result<BTreeSet<u64>, AttackError> {
    let k = key_inputs.len();
    let nx = circuit.primary_inputs().len() - k;
    if k > 16 || nx > 16 {
        return Err(AttackError::TooLarge(format!("K={k}, N_X={nx}")));
    }
    let mut svk = BTreeSet::new();
    for code in 0..1u64 << k {
        let key = code_to_key(code, k);
        if exhaustive_equivalence(circuit, key_inputs, &key, oracle_circuit) {
            svk.insert(code);
        }
    }
    Ok(svk)
}

/// Enumerates the key projections of the key-generation formula after
/// replaying the recorded discriminating inputs; `cap` bounds the search.
pub fn enumerate_svk(
    circuit: &Circuit,
    key_inputs: &[NetId],
    dis: &[DiRecord],
    cap: usize,
) -> Result<BTreeSet<u64>, AttackError> {
    let mut state = SatcState::build_kdc(circuit, key_inputs);
    for di in dis {
        state.add_divc(&di.inputs, &di.outputs);
    }
    let mut session = EmbeddedSession::new();
    session.ensure_vars(state.num_vars());
    session.add_formula(&state.keygen_formula());
    let mut keys = BTreeSet::new();
    while keys.len() < cap {
        let result = session.solve(&[], None)?;
        match result.status {
            Status::Sat => {
                let model = result.model.as_deref().expect("model on SAT");
                let key = state.project_key(model, 0);
                keys.insert(key_to_code(&key));
                let blocking: Vec<Lit> = state
                    .key_vars(0)
                    .iter()
                    .zip(&key)
                    .map(|(&v, &b)| Lit::new(v, !b))
                    .collect();
                session.add_clause(&keyforge_core::cnf::Clause::new(blocking));
            }
            Status::Unsat => return Ok(keys),
            Status::Timeout => unreachable!("no timeout configured"),
        }
    }
    Ok(keys)
}

pub fn key_to_code(bits: &[bool]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (b as u64) << i)
}

pub fn code_to_key(code: u64, width: usize) -> Vec<bool> {
    (0..width).map(|i| code >> i & 1 == 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use keyforge_core::netlist::parse_bench;
    use keyforge_core::obfuscate::{lock, SchemeTag};

    #[test]
    fn one_key_buffer_attack() {
        // y = BUF(a) under a single parity key gate: one discriminating
        // input suffices, the second pass is UNSAT, and the recovered key
        // is the correct one.
        let c = parse_bench("INPUT(a)\nOUTPUT(y)\ny = BUF(a)").unwrap();
        let locked = lock(&c, SchemeTag::Rnd, 100, 1).unwrap();
        let report = sat_attack_locked(
            &locked,
            &c,
            &BackendSpec::embedded(),
            &AttackLimits::default(),
        )
        .unwrap();
        let key = report.key().expect("solved");
        assert!(key.verified);
        assert_eq!(key.bits, locked.correct_key);
        assert_eq!(report.trace.iterations(), 1);
        assert!(report.trace.final_pass.is_some());
    }

    #[test]
    fn oracle_queried_exactly_once_per_di() {
        let c = parse_bench(keyforge_core::netlist::synth::C17_BENCH).unwrap();
        let locked = lock(&c, SchemeTag::Toc13Xor, 25, 3).unwrap();
        let mut oracle = CircuitOracle::new(&c);
        let report = sat_attack(
            &locked.circuit,
            &locked.key_inputs,
            &mut oracle,
            &BackendSpec::embedded(),
            &AttackLimits::default(),
        )
        .unwrap();
        assert!(report.key().unwrap().verified);
        assert_eq!(oracle.queries, report.trace.iterations() as u64);
    }

    #[test]
    fn oracle_as_keyed_locked_circuit_is_equivalent() {
        // Using the locked circuit with the correct key applied as the
        // oracle recovers a key that verifies as well.
        let c = parse_bench(keyforge_core::netlist::synth::C17_BENCH).unwrap();
        let locked = lock(&c, SchemeTag::Rnd, 25, 8).unwrap();

        struct KeyedOracle<'a> {
            locked: &'a LockedCircuit,
        }
        impl Oracle for KeyedOracle<'_> {
            fn query(&mut self, inputs: &[bool]) -> Vec<bool> {
                self.locked.simulate_with_key(inputs, &self.locked.correct_key)
            }
        }
        let mut oracle = KeyedOracle { locked: &locked };
        let report = sat_attack(
            &locked.circuit,
            &locked.key_inputs,
            &mut oracle,
            &BackendSpec::embedded(),
            &AttackLimits::default(),
        )
        .unwrap();
        let key = report.key().expect("solved");
        assert!(verify_key(&locked.circuit, &locked.key_inputs, &key.bits, &c).unwrap());
    }

    #[test]
    fn recovered_key_lies_in_brute_force_svk() {
        for seed in 0..6u64 {
            let c = keyforge_core::netlist::synth::random_dag(
                "t",
                &keyforge_core::netlist::synth::DagSpec::new(8, 4, 2),
                3000 + seed,
            );
            let locked = match lock(&c, SchemeTag::Rnd, 40, seed) {
                Ok(l) => l,
                Err(_) => continue,
            };
            let report = sat_attack_locked(
                &locked,
                &c,
                &BackendSpec::embedded(),
                &AttackLimits::default(),
            )
            .unwrap();
            let key = report.key().expect("solved");
            assert!(key.verified);
            let svk = brute_force_svk(&locked.circuit, &locked.key_inputs, &c).unwrap();
            assert!(svk.contains(&key_to_code(&key.bits)));
            // Iterations bounded by the number of prunable keys.
            assert!(report.trace.iterations() <= (1 << locked.key_inputs.len()) - svk.len() + 1);
        }
    }

    #[test]
    fn verify_rejects_bad_keys() {
        let c = parse_bench(keyforge_core::netlist::synth::C17_BENCH).unwrap();
        let locked = lock(&c, SchemeTag::Rnd, 25, 17).unwrap();
        assert!(verify_key(&locked.circuit, &locked.key_inputs, &locked.correct_key, &c).unwrap());
        // The complemented key flips every parity gate: inequivalent as
        // long as at least one key bit is effective.
        let complement: Vec<bool> = locked.correct_key.iter().map(|b| !b).collect();
        assert!(!verify_key(&locked.circuit, &locked.key_inputs, &complement, &c).unwrap());
    }

    #[test]
    fn svk_members_verify_nonmembers_fail() {
        let c = keyforge_core::netlist::synth::random_dag(
            "t",
            &keyforge_core::netlist::synth::DagSpec::new(10, 4, 3),
            911,
        );
        let locked = lock(&c, SchemeTag::Toc13Mux, 30, 2).unwrap();
        let k = locked.key_inputs.len();
        let svk = brute_force_svk(&locked.circuit, &locked.key_inputs, &c).unwrap();
        for code in 0..1u64 << k {
            let key = code_to_key(code, k);
            let ok = verify_key(&locked.circuit, &locked.key_inputs, &key, &c).unwrap();
            assert_eq!(ok, svk.contains(&code), "key {code:#b}");
        }
    }

    #[test]
    fn decoy_buffer_key_accepts_every_key() {
        // A key wired through a gate that cannot influence any output:
        // every key is valid, and the attack needs zero iterations.
        let src = "INPUT(a)\nINPUT(keyinput0)\nOUTPUT(y)\n\
                   y = BUF(a)\ndead = AND(a, keyinput0)\n";
        let c = parse_bench(src).unwrap();
        let key_net = c.find_net("keyinput0").unwrap();
        let oracle_src = "INPUT(a)\nOUTPUT(y)\ny = BUF(a)";
        let oracle = parse_bench(oracle_src).unwrap();
        let svk = brute_force_svk(&c, &[key_net], &oracle).unwrap();
        assert_eq!(svk.len(), 2, "both keys valid");
        let report = sat_attack(
            &c,
            &[key_net],
            &mut CircuitOracle::new(&oracle),
            &BackendSpec::embedded(),
            &AttackLimits::default(),
        )
        .unwrap();
        assert_eq!(report.trace.iterations(), 0);
        assert!(report.key().unwrap().verified);
    }

    #[test]
    fn timeout_returns_partial_trace() {
        let c = keyforge_core::netlist::synth::random_dag(
            "t",
            &keyforge_core::netlist::synth::DagSpec::new(150, 10, 6),
            5,
        );
        let locked = lock(&c, SchemeTag::Dac12, 25, 5).unwrap();
        let limits = AttackLimits {
            timeout: Some(Duration::from_millis(1)),
            max_iterations: None,
        };
        let report =
            sat_attack_locked(&locked, &c, &BackendSpec::embedded(), &limits).unwrap();
        assert!(matches!(report.outcome, AttackOutcome::TimedOut));
    }

    #[test]
    fn no_key_inputs_rejected() {
        let c = parse_bench("INPUT(a)\nOUTPUT(y)\ny = BUF(a)").unwrap();
        let mut oracle = CircuitOracle::new(&c);
        assert!(matches!(
            sat_attack(
                &c,
                &[],
                &mut oracle,
                &BackendSpec::embedded(),
                &AttackLimits::default()
            ),
            Err(AttackError::NoKeyInputs)
        ));
    }
}
