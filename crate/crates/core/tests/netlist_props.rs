//! Format and ordering properties over generated circuits.

use keyforge_core::netlist::synth::{random_dag, DagSpec};
use keyforge_core::netlist::{parse_bench, structurally_equal, write_bench};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// parse(write(c)) is structurally identical to c.
    #[test]
    fn write_parse_round_trip(seed in 0u64..10_000, gates in 1usize..80, luts in any::<bool>()) {
        let mut spec = DagSpec::new(gates, 1 + gates.min(8), 1 + gates.min(4));
        if luts {
            spec = spec.with_luts();
        }
        let c = random_dag("prop", &spec, seed);
        let text = write_bench(&c);
        let again = parse_bench(&text).expect("own output must parse");
        prop_assert!(structurally_equal(&c, &again));
    }

    /// Topological order puts every gate after the drivers of its inputs
    /// and is a permutation of all gates.
    #[test]
    fn topo_precedence(seed in 0u64..10_000, gates in 1usize..60) {
        let c = random_dag("prop", &DagSpec::new(gates, 4, 3), seed);
        let mut placed = vec![false; c.num_nets()];
        for &pi in c.primary_inputs() {
            placed[pi.index()] = true;
        }
        let mut count = 0;
        for gate in c.topo_gates() {
            for input in &gate.inputs {
                prop_assert!(placed[input.index()]);
            }
            placed[gate.output.index()] = true;
            count += 1;
        }
        prop_assert_eq!(count, c.gates().len());
    }

    /// Whitespace and comments do not affect the parse.
    #[test]
    fn comments_and_spacing_ignored(seed in 0u64..1_000) {
        let c = random_dag("prop", &DagSpec::new(10, 4, 2), seed);
        let text = write_bench(&c);
        let noisy: String = text
            .lines()
            .map(|l| format!("  {l}   # trailing note\n# full comment line\n\n"))
            .collect();
        let again = parse_bench(&noisy).expect("noisy text parses");
        prop_assert!(structurally_equal(&c, &again));
    }
}
