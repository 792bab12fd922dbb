//! Seeded random-circuit generation for corpora and tests.

use super::{Circuit, CircuitBuilder, GateKind, LutTable, NetId};
use alloc::format;
use alloc::vec::Vec;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The public-domain ISCAS-85 c17 benchmark (6 NAND gates, 5 PIs, 2 POs).
pub const C17_BENCH: &str = "\
INPUT(1)
INPUT(2)
INPUT(3)
INPUT(6)
INPUT(7)
OUTPUT(22)
OUTPUT(23)
10 = NAND(1, 3)
11 = NAND(3, 6)
16 = NAND(2, 11)
19 = NAND(11, 7)
22 = NAND(10, 16)
23 = NAND(16, 19)
";

/// Shape of a generated DAG.
#[derive(Clone, Copy, Debug)]
pub struct DagSpec {
    pub gates: usize,
    pub inputs: usize,
    pub outputs: usize,
    /// Mix in occasional small LUT gates.
    pub luts: bool,
}

impl DagSpec {
    pub fn new(gates: usize, inputs: usize, outputs: usize) -> DagSpec {
        DagSpec {
            gates,
            inputs,
            outputs,
            luts: false,
        }
    }

    pub fn with_luts(mut self) -> DagSpec {
        self.luts = true;
        self
    }
}

/// Generates a random combinational DAG, deterministic per seed.
///
/// Gates only read nets created earlier, so the result is acyclic by
/// construction. Input picks are biased toward recent nets so the circuit
/// develops depth instead of staying a shallow fan-in cone.
pub fn random_dag(name: &str, spec: &DagSpec, seed: u64) -> Circuit {
    assert!(spec.gates >= 1 && spec.inputs >= 1 && spec.outputs >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = CircuitBuilder::new(name);

    let mut pool: Vec<NetId> = (0..spec.inputs).map(|i| b.add_input(&format!("i{i}"))).collect();

    for g in 0..spec.gates {
        let out = b.net(&format!("n{g}"));
        let pick = |rng: &mut ChaCha8Rng, pool: &[NetId]| -> NetId {
            // max of two uniform draws: biased toward recent nets.
            let a = rng.gen_range(0..pool.len());
            let c = rng.gen_range(0..pool.len());
            pool[a.max(c)]
        };
        // Make sure every primary input feeds something.
        let forced_pi = (g < spec.inputs).then(|| pool[g]);

        let roll = rng.gen_range(0..100u32);
        if spec.luts && roll < 5 {
            let x = forced_pi.unwrap_or_else(|| pick(&mut rng, &pool));
            let y = pick(&mut rng, &pool);
            let table = LutTable::from_value(2, rng.gen_range(0..16u32) as u128);
            b.add_lut(&[x, y], table, out);
        } else if roll < 13 {
            let s = forced_pi.unwrap_or_else(|| pick(&mut rng, &pool));
            let d0 = pick(&mut rng, &pool);
            let d1 = pick(&mut rng, &pool);
            b.add_gate(GateKind::Mux2, &[s, d0, d1], out);
        } else if roll < 23 {
            let x = forced_pi.unwrap_or_else(|| pick(&mut rng, &pool));
            b.add_gate(GateKind::Not, &[x], out);
        } else {
            let kind = match rng.gen_range(0..6u32) {
                0 => GateKind::And,
                1 => GateKind::Nand,
                2 => GateKind::Or,
                3 => GateKind::Nor,
                4 => GateKind::Xor,
                _ => GateKind::Xnor,
            };
            let x = forced_pi.unwrap_or_else(|| pick(&mut rng, &pool));
            let y = pick(&mut rng, &pool);
            b.add_gate(GateKind::And, &[x, y], out);
            let last = b.gates_mut().last_mut().unwrap();
            last.kind = kind;
        }
        pool.push(out);
    }

    // Outputs: the most-downstream gate nets, newest first.
    let n_outputs = spec.outputs.min(spec.gates);
    for k in 0..n_outputs {
        let net = pool[pool.len() - 1 - k];
        b.add_output(net);
    }

    b.build().expect("generated DAG must validate")
}
