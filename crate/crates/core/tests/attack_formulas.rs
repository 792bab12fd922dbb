//! Cross-module checks: the embedded solver against the attack-formula
//! constructions, with brute-force key tracking as the oracle.

use keyforge_core::analysis::simulate;
use keyforge_core::cnf::{Clause, Lit, SatcState};
use keyforge_core::netlist::synth::{random_dag, DagSpec};
use keyforge_core::obfuscate::{lock, LockedCircuit, SchemeTag};
use keyforge_core::sat::{Limits, SolveStatus, Solver};

fn key_code(bits: &[bool]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (b as u64) << i)
}

fn code_key(code: u64, width: usize) -> Vec<bool> {
    (0..width).map(|i| code >> i & 1 == 1).collect()
}

/// All keys already consistent with the recorded discriminating inputs.
fn brute_force_sck(lc: &LockedCircuit, dis: &[(Vec<bool>, Vec<bool>)]) -> Vec<u64> {
    let k = lc.key_inputs.len();
    (0..1u64 << k)
        .filter(|&code| {
            let key = code_key(code, k);
            dis.iter().all(|(x, y)| &lc.simulate_with_key(x, &key) == y)
        })
        .collect()
}

/// Enumerates the key projections of the key-generation formula with the
/// embedded solver, blocking each found key.
fn enumerate_keys(state: &SatcState) -> Vec<u64> {
    let mut solver = Solver::new();
    solver.ensure_vars(state.num_vars());
    solver.add_formula(&state.keygen_formula());
    let mut found = Vec::new();
    loop {
        match solver.solve(Limits::none()) {
            SolveStatus::Sat => {
                let model = solver.model().unwrap().to_vec();
                let key = state.project_key(&model, 0);
                found.push(key_code(&key));
                let blocking: Vec<Lit> = state
                    .key_vars(0)
                    .iter()
                    .zip(&key)
                    .map(|(&v, &b)| Lit::new(v, !b))
                    .collect();
                if !solver.add_clause(&blocking) {
                    break;
                }
            }
            SolveStatus::Unsat => break,
            SolveStatus::Interrupted => panic!("no budget configured"),
        }
    }
    found.sort_unstable();
    found
}

/// Drives the discriminating-input loop by hand and checks, at every pass,
/// that the candidate-key set shrinks strictly and matches brute force.
#[test]
fn candidate_keys_shrink_and_match_brute_force() {
    let mut checked_instances = 0;
    for seed in 0..10u64 {
        let c = random_dag("t", &DagSpec::new(15, 5, 3), 2000 + seed);
        for scheme in [SchemeTag::Rnd, SchemeTag::Toc13Mux, SchemeTag::Iolts14] {
            let lc = match lock(&c, scheme, 20, seed) {
                Ok(lc) => lc,
                Err(_) => continue,
            };
            let k = lc.key_inputs.len();
            if k > 6 {
                continue;
            }
            checked_instances += 1;

            let mut state = SatcState::build_kdc(&lc.circuit, &lc.key_inputs);
            let mut solver = Solver::new();
            solver.ensure_vars(state.num_vars());
            for clause in state.kdc_clauses() {
                solver.add_clause(clause.lits());
            }

            let mut dis: Vec<(Vec<bool>, Vec<bool>)> = Vec::new();
            let mut prev_sck = brute_force_sck(&lc, &dis);
            loop {
                let status = solver.solve(Limits::none());
                match status {
                    SolveStatus::Sat => {
                        let model = solver.model().unwrap().to_vec();
                        let x = state.project_inputs(&model);
                        let y = simulate(&c, &x).unwrap();
                        let group = state.add_divc(&x, &y);
                        solver.ensure_vars(state.num_vars());
                        for clause in state.divc_clauses(group) {
                            solver.add_clause(clause.lits());
                        }
                        let learned = solver.take_exported_learned();
                        state.add_learned(&learned).unwrap();
                        dis.push((x, y));

                        let sck = brute_force_sck(&lc, &dis);
                        assert!(
                            sck.len() < prev_sck.len(),
                            "{scheme} seed {seed}: pass {} removed no key",
                            dis.len()
                        );
                        assert!(
                            sck.iter().all(|c| prev_sck.contains(c)),
                            "{scheme} seed {seed}: candidate set must shrink monotonically"
                        );
                        let cnf_keys = enumerate_keys(&state);
                        assert_eq!(
                            cnf_keys, sck,
                            "{scheme} seed {seed}: formula keys diverge from brute force"
                        );
                        prev_sck = sck;
                    }
                    SolveStatus::Unsat => break,
                    SolveStatus::Interrupted => panic!("no budget configured"),
                }
                assert!(dis.len() <= 1 << k, "too many passes; loop must halt");
            }

            // Loop exhausted: every remaining candidate is a valid key.
            let svk = brute_force_sck(&lc, &dis);
            assert_eq!(enumerate_keys(&state), svk);
            let nx = lc.x_inputs().len();
            for &code in &svk {
                let key = code_key(code, k);
                for t in 0..1u64 << nx {
                    let x: Vec<bool> = (0..nx).map(|i| t >> i & 1 == 1).collect();
                    assert_eq!(
                        lc.simulate_with_key(&x, &key),
                        simulate(&c, &x).unwrap(),
                        "valid key must match the oracle everywhere"
                    );
                }
            }
            assert!(svk.contains(&key_code(&lc.correct_key)));
        }
    }
    assert!(checked_instances >= 10, "corpus too thin: {checked_instances}");
}

/// Forcing the two key copies equal makes the difference constraint
/// unsatisfiable: identical functions cannot differ.
#[test]
fn kdc_unsat_under_equal_keys() {
    let c = random_dag("t", &DagSpec::new(12, 4, 2), 77);
    let lc = lock(&c, SchemeTag::Rnd, 25, 3).unwrap();
    let state = SatcState::build_kdc(&lc.circuit, &lc.key_inputs);
    let mut solver = Solver::new();
    solver.ensure_vars(state.num_vars());
    for clause in state.kdc_clauses() {
        solver.add_clause(clause.lits());
    }
    for (k1, k2) in state.key_vars(0).iter().zip(state.key_vars(1)) {
        let a = Lit::positive(*k1);
        let b = Lit::positive(*k2);
        solver.add_clause(&[!a, b]);
        solver.add_clause(&[a, !b]);
    }
    assert_eq!(solver.solve(Limits::none()), SolveStatus::Unsat);
}

/// A 1-key XOR lock on a buffer: some model exists with differing keys.
#[test]
fn kdc_sat_for_single_key_lock() {
    let c = keyforge_core::netlist::parse_bench("INPUT(a)\nOUTPUT(y)\ny = BUF(a)").unwrap();
    let lc = lock(&c, SchemeTag::Rnd, 100, 1).unwrap();
    let state = SatcState::build_kdc(&lc.circuit, &lc.key_inputs);
    let mut solver = Solver::new();
    solver.ensure_vars(state.num_vars());
    for clause in state.kdc_clauses() {
        solver.add_clause(clause.lits());
    }
    assert_eq!(solver.solve(Limits::none()), SolveStatus::Sat);
    let model = solver.model().unwrap();
    let k1 = state.project_key(model, 0);
    let k2 = state.project_key(model, 1);
    assert_ne!(k1, k2, "the difference constraint forces distinct keys");
}

/// Learned clauses exported by the solver may be appended without changing
/// the SATC solution set (checked by enumeration).
#[test]
fn learned_clauses_preserve_satc_models() {
    let c = random_dag("t", &DagSpec::new(6, 3, 2), 4);
    let lc = lock(&c, SchemeTag::Rnd, 20, 9).unwrap();
    let mut state = SatcState::build_kdc(&lc.circuit, &lc.key_inputs);
    let f = state.satc_formula();
    if f.num_vars() > 22 {
        return; // keep enumeration tractable
    }
    let count_models = |state: &SatcState| {
        let f = state.satc_formula();
        let n = f.num_vars();
        (0..1u64 << n)
            .filter(|bits| {
                let assignment: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
                f.eval(&assignment)
            })
            .count()
    };
    let before = count_models(&state);

    let mut solver = Solver::new();
    solver.ensure_vars(state.num_vars());
    solver.add_formula(&state.satc_formula());
    solver.solve(Limits::none());
    let learned = solver.take_exported_learned();
    state.add_learned(&learned).unwrap();

    let after = count_models(&state);
    assert_eq!(before, after, "implied clauses must not change the model set");

    // A unit clause asserting a literal forced in every model is inert too.
    let f = state.satc_formula();
    let n = f.num_vars();
    let models: Vec<Vec<bool>> = (0..1u64 << n)
        .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<bool>>())
        .filter(|a| f.eval(a))
        .collect();
    if let Some(offset) = (0..n as usize).find(|&o| {
        let v = models[0][o];
        models.iter().all(|m| m[o] == v)
    }) {
        let var = keyforge_core::cnf::Var::new(offset as u32 + 1);
        let forced = Clause::unit(Lit::new(var, models[0][offset]));
        state.add_learned(&[forced]).unwrap();
        assert_eq!(count_models(&state), after);
    }
}
