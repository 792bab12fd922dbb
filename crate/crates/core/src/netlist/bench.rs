//! ISCAS-85 `.bench` text format.
//!
//! Grammar per line: `INPUT(x)`, `OUTPUT(y)`, `y = GATE(a, b, ...)`, with
//! `#` starting a comment. One vendor extension carries LUT gates:
//! `y = LUT 0x<hex-table> (i0, ..., iL-1)` where bit `t` of the table is the
//! output for input valuation `t` (i0 = least-significant select bit).

use super::{Circuit, CircuitBuilder, Gate, GateKind, LutTable, NetId, NetlistError};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Parses `.bench` text into a validated circuit.
///
/// Net ids follow first textual appearance, so parsing is deterministic.
/// Sequential elements (`DFF`) are rejected; MUXes wider than 2:1 whose
/// operand count is `k + 2^k` are decomposed into a `MUX` tree over
/// synthesized `__kf_` nets.
pub fn parse_bench(text: &str) -> Result<Circuit, NetlistError> {
    let mut builder = CircuitBuilder::new("");
    // First line a net was referenced on, for error reports from `build`.
    let mut first_ref: BTreeMap<String, usize> = BTreeMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }

        if let Some(name) = parse_io_decl(line, "INPUT") {
            let id = builder.net(name);
            first_ref.entry(name.to_string()).or_insert(lineno);
            if builder.primary_inputs().contains(&id) {
                return Err(NetlistError::MultipleDrivers {
                    net: name.to_string(),
                    line: Some(lineno),
                });
            }
            builder.add_input(name);
            continue;
        }
        if let Some(name) = parse_io_decl(line, "OUTPUT") {
            let id = builder.net(name);
            first_ref.entry(name.to_string()).or_insert(lineno);
            builder.add_output(id);
            continue;
        }

        let (target, rhs) = line.split_once('=').ok_or(NetlistError::UnknownGateKind {
            line: lineno,
            kind: line.to_string(),
        })?;
        let target = target.trim();
        let rhs = rhs.trim();
        let (kind_str, args_str) = split_gate_expr(rhs).ok_or(NetlistError::UnknownGateKind {
            line: lineno,
            kind: rhs.to_string(),
        })?;

        let out = builder.net(target);
        first_ref.entry(target.to_string()).or_insert(lineno);
        let inputs: Vec<NetId> = args_str
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|name| {
                let id = builder.net(name);
                first_ref.entry(name.to_string()).or_insert(lineno);
                id
            })
            .collect();

        let upper = kind_str.to_ascii_uppercase();
        let (kw, lut_hex) = match upper.split_once(char::is_whitespace) {
            Some((kw, rest)) => (kw.to_string(), Some(rest.trim().to_string())),
            None => (upper, None),
        };
        match kw.as_str() {
            "LUT" => {
                let hex = lut_hex.ok_or(NetlistError::UnknownGateKind {
                    line: lineno,
                    kind: kind_str.to_string(),
                })?;
                let table = LutTable::from_hex(inputs.len(), &hex).ok_or_else(|| {
                    NetlistError::ArityMismatch {
                        net: target.to_string(),
                        kind: "LUT".to_string(),
                        detail: format!(
                            "table `{hex}` does not fit {} inputs (need {} rows)",
                            inputs.len(),
                            1usize << inputs.len()
                        ),
                        line: Some(lineno),
                    }
                })?;
                builder.add_lut(&inputs, table, out);
            }
            "MUX" => {
                add_mux(&mut builder, &inputs, out, target, lineno)?;
            }
            _ if lut_hex.is_some() => {
                return Err(NetlistError::UnknownGateKind {
                    line: lineno,
                    kind: kind_str.to_string(),
                })
            }
            "AND" => builder.add_gate(GateKind::And, &inputs, out),
            "NAND" => builder.add_gate(GateKind::Nand, &inputs, out),
            "OR" => builder.add_gate(GateKind::Or, &inputs, out),
            "NOR" => builder.add_gate(GateKind::Nor, &inputs, out),
            "XOR" => builder.add_gate(GateKind::Xor, &inputs, out),
            "XNOR" => builder.add_gate(GateKind::Xnor, &inputs, out),
            "NOT" | "INV" => builder.add_gate(GateKind::Not, &inputs, out),
            "BUF" | "BUFF" => builder.add_gate(GateKind::Buf, &inputs, out),
            other => {
                return Err(NetlistError::UnknownGateKind {
                    line: lineno,
                    kind: other.to_string(),
                })
            }
        }

        if let Some(gate) = builder.gates().last() {
            check_line_arity(gate).map_err(|detail| NetlistError::ArityMismatch {
                net: target.to_string(),
                kind: kw,
                detail,
                line: Some(lineno),
            })?;
        }
    }

    builder.build().map_err(|e| attach_lines(e, &first_ref))
}

/// Cheap arity pre-check so errors carry the source line; `build` re-checks.
fn check_line_arity(gate: &Gate) -> Result<(), String> {
    let n = gate.inputs.len();
    match gate.kind {
        GateKind::Not | GateKind::Buf if n != 1 => Err(format!("expected 1 input, got {n}")),
        GateKind::And | GateKind::Nand | GateKind::Or | GateKind::Nor | GateKind::Xor
        | GateKind::Xnor
            if n < 2 =>
        {
            Err(format!("expected at least 2 inputs, got {n}"))
        }
        _ => Ok(()),
    }
}

/// `build` reports by name only; recover the line of first reference.
fn attach_lines(err: NetlistError, first_ref: &BTreeMap<String, usize>) -> NetlistError {
    match err {
        NetlistError::UndrivenNet { net, line: None } => {
            let line = first_ref.get(&net).copied();
            NetlistError::UndrivenNet { net, line }
        }
        NetlistError::MultipleDrivers { net, line: None } => {
            let line = first_ref.get(&net).copied();
            NetlistError::MultipleDrivers { net, line }
        }
        NetlistError::ArityMismatch {
            net,
            kind,
            detail,
            line: None,
        } => {
            let line = first_ref.get(&net).copied();
            NetlistError::ArityMismatch {
                net,
                kind,
                detail,
                line,
            }
        }
        other => other,
    }
}

/// `INPUT(name)` / `OUTPUT(name)`, case-insensitive keyword.
fn parse_io_decl<'a>(line: &'a str, keyword: &str) -> Option<&'a str> {
    let rest = line
        .get(..keyword.len())
        .filter(|head| head.eq_ignore_ascii_case(keyword))
        .map(|_| line[keyword.len()..].trim_start())?;
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    let name = inner.trim();
    (!name.is_empty()).then_some(name)
}

/// Splits `KIND(args)` / `LUT 0x8 (args)` into the head and argument list.
fn split_gate_expr(rhs: &str) -> Option<(&str, &str)> {
    let open = rhs.find('(')?;
    let close = rhs.rfind(')')?;
    if close < open {
        return None;
    }
    Some((rhs[..open].trim(), &rhs[open + 1..close]))
}

/// 2:1 MUX directly; wider `k + 2^k`-operand MUXes become a tree.
fn add_mux(
    builder: &mut CircuitBuilder,
    inputs: &[NetId],
    out: NetId,
    target: &str,
    lineno: usize,
) -> Result<(), NetlistError> {
    if inputs.len() == 3 {
        builder.add_gate(GateKind::Mux2, inputs, out);
        return Ok(());
    }
    for k in 2..=4usize {
        if inputs.len() == k + (1 << k) {
            let selects = &inputs[..k];
            let data = &inputs[k..];
            build_mux_tree(builder, selects, data, out);
            return Ok(());
        }
    }
    Err(NetlistError::ArityMismatch {
        net: target.to_string(),
        kind: "MUX".to_string(),
        detail: format!(
            "expected 3 operands or k selects + 2^k data operands, got {}",
            inputs.len()
        ),
        line: Some(lineno),
    })
}

/// Builds a MUX tree over `data` (leaf `t` selected by code `t`,
/// `selects[0]` = least-significant bit), driving `out`.
pub(crate) fn build_mux_tree(
    builder: &mut CircuitBuilder,
    selects: &[NetId],
    data: &[NetId],
    out: NetId,
) {
    debug_assert_eq!(data.len(), 1 << selects.len());
    if selects.len() == 1 {
        builder.add_gate(GateKind::Mux2, &[selects[0], data[0], data[1]], out);
        return;
    }
    let (rest, top) = selects.split_at(selects.len() - 1);
    let half = data.len() / 2;
    let low = builder.fresh_net("mux");
    let high = builder.fresh_net("mux");
    build_mux_tree(builder, rest, &data[..half], low);
    build_mux_tree(builder, rest, &data[half..], high);
    builder.add_gate(GateKind::Mux2, &[top[0], low, high], out);
}

/// Renders a circuit back to `.bench` text.
///
/// Output re-parses to a structurally identical circuit: declaration order
/// of inputs, outputs and gates is preserved. LUT gates get a table
/// annotation comment plus the vendor extension line.
pub fn write_bench(c: &Circuit) -> String {
    let mut s = String::new();
    for &pi in c.primary_inputs() {
        s.push_str(&format!("INPUT({})\n", c.net_name(pi)));
    }
    for &po in c.primary_outputs() {
        s.push_str(&format!("OUTPUT({})\n", c.net_name(po)));
    }
    for gate in c.gates() {
        let args: Vec<&str> = gate.inputs.iter().map(|&i| c.net_name(i)).collect();
        let out = c.net_name(gate.output);
        match gate.kind {
            GateKind::Lut => {
                let table = gate.lut_table.as_ref().expect("validated LUT");
                s.push_str(&format!(
                    "# lut {out}: {}-input table {}\n",
                    gate.inputs.len(),
                    table.to_hex()
                ));
                s.push_str(&format!("{out} = LUT {} ({})\n", table.to_hex(), args.join(", ")));
            }
            kind => {
                s.push_str(&format!("{out} = {}({})\n", kind.name(), args.join(", ")));
            }
        }
    }
    s
}

/// Structural identity: same PI/PO name sequences and the same gates over
/// the same net names (synthesized net numbering may differ).
pub fn structurally_equal(a: &Circuit, b: &Circuit) -> bool {
    let names = |c: &Circuit, nets: &[NetId]| -> Vec<String> {
        nets.iter().map(|&n| c.net_name(n).to_string()).collect()
    };
    if names(a, a.primary_inputs()) != names(b, b.primary_inputs())
        || names(a, a.primary_outputs()) != names(b, b.primary_outputs())
        || a.gates().len() != b.gates().len()
    {
        return false;
    }
    a.gates().iter().zip(b.gates().iter()).all(|(ga, gb)| {
        ga.kind == gb.kind
            && ga.lut_table == gb.lut_table
            && a.net_name(ga.output) == b.net_name(gb.output)
            && names(a, &ga.inputs) == names(b, &gb.inputs)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::SYNTH_NET_PREFIX;

    pub(crate) const C17: &str = "\
# c17 iscas example
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

    #[test]
    fn smallest_legal_netlist() {
        let c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)").unwrap();
        let st = c.stats();
        assert_eq!((st.gates, st.pis, st.pos), (1, 2, 1));
        assert_eq!(c.gates()[0].kind, GateKind::And);
    }

    #[test]
    fn undriven_net_reported() {
        let err = parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a, z)").unwrap_err();
        match err {
            NetlistError::UndrivenNet { net, .. } => assert_eq!(net, "z"),
            other => panic!("expected UndrivenNet, got {other:?}"),
        }
    }

    #[test]
    fn c17_stats() {
        // Hand count of the public c17 netlist: 6 NAND gates, 5 inputs,
        // 2 outputs, longest path 3 -> 11 -> 16 -> 22.
        let c = parse_bench(C17).unwrap();
        let st = c.stats();
        assert_eq!((st.gates, st.pis, st.pos, st.depth), (6, 5, 2, 3));
    }

    #[test]
    fn dff_rejected_with_clear_message() {
        let err = parse_bench("INPUT(a)\nOUTPUT(q)\nq = DFF(a)").unwrap_err();
        let msg = alloc::format!("{err}");
        assert!(msg.contains("sequential"), "got: {msg}");
        assert!(msg.contains("line 3"), "got: {msg}");
    }

    #[test]
    fn unknown_kind_names_line() {
        let err = parse_bench("INPUT(a)\nOUTPUT(y)\ny = FROB(a, a)").unwrap_err();
        assert_eq!(
            err,
            NetlistError::UnknownGateKind {
                line: 3,
                kind: "FROB".into()
            }
        );
    }

    #[test]
    fn round_trip_c17() {
        let c = parse_bench(C17).unwrap();
        let again = parse_bench(&write_bench(&c)).unwrap();
        assert!(structurally_equal(&c, &again));
        assert_eq!(again.gates().len(), 6);
    }

    #[test]
    fn lut_extension_round_trip() {
        let src = "INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = LUT 0x8 (a, b)";
        let c = parse_bench(src).unwrap();
        let gate = &c.gates()[0];
        assert_eq!(gate.kind, GateKind::Lut);
        assert_eq!(gate.lut_table.as_ref().unwrap().bits(), &[false, false, false, true]);
        let text = write_bench(&c);
        assert!(text.contains("y = LUT 0x8 (a, b)"), "got: {text}");
        assert!(text.contains("# lut y:"), "got: {text}");
        assert!(structurally_equal(&c, &parse_bench(&text).unwrap()));
    }

    #[test]
    fn wide_mux_decomposed() {
        // 2 selects + 4 data operands.
        let src = "INPUT(s0)\nINPUT(s1)\nINPUT(d0)\nINPUT(d1)\nINPUT(d2)\nINPUT(d3)\n\
                   OUTPUT(y)\ny = MUX(s0, s1, d0, d1, d2, d3)";
        let c = parse_bench(src).unwrap();
        assert_eq!(c.gates().len(), 3);
        assert!(c.gates().iter().all(|g| g.kind == GateKind::Mux2));
        assert!(c
            .nets()
            .any(|n| c.net_name(n).starts_with(SYNTH_NET_PREFIX)));
    }

    #[test]
    fn output_can_be_an_input() {
        let c = parse_bench("INPUT(a)\nOUTPUT(a)").unwrap();
        assert_eq!(c.stats().gates, 0);
        assert_eq!(c.stats().depth, 0);
    }
}
