//! Plain-text circuit description used by `inspect`.
//!
//! ```text
//! # circuit template=rxyz qubits=4 blocks=8 params=96 features=16
//! enc RX 0 x0
//! pre SQRT_H 0 -
//! 0 RX 0 0
//! 0 CZ 0,1 -
//! ```
//!
//! Columns: block (`enc`, `pre` or block index), gate kind, wires, slots
//! (`xN` names the bound input feature for encoder gates, `-` none).

use super::{BlockTag, Circuit, Gate, GateKind};
use crate::error::{Error, Result};

fn join(v: &[usize]) -> String {
    if v.is_empty() {
        "-".to_string()
    } else {
        v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
    }
}

fn line(g: &Gate) -> String {
    let block = match g.block {
        BlockTag::Encoder => "enc".to_string(),
        BlockTag::Prefix => "pre".to_string(),
        BlockTag::Block(b) => b.to_string(),
    };
    let slots = match g.feature {
        Some(f) => format!("x{f}"),
        None => join(&g.slots),
    };
    format!("{block} {} {} {slots}", g.kind, join(&g.wires))
}

pub fn describe(circuit: &Circuit) -> String {
    let mut out = format!(
        "# circuit template={} qubits={} blocks={} params={} features={}\n",
        circuit.template().map_or("custom", |t| t.name()),
        circuit.n_qubits(),
        circuit.n_blocks(),
        circuit.n_params(),
        circuit.n_features()
    );
    for g in circuit.all_gates() {
        out.push_str(&line(g));
        out.push('\n');
    }
    out
}

/// Reads back the gate lines of a description.
pub fn parse_description(text: &str) -> Result<Vec<Gate>> {
    let mut gates = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: n + 1, msg };
        let cols: Vec<&str> = l.split_whitespace().collect();
        let [block, kind, wires, slots] = cols[..] else {
            return Err(err(format!("expected 4 columns, got {}", cols.len())));
        };
        let list = |s: &str| -> Result<Vec<usize>> {
            if s == "-" {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|x| x.parse().map_err(|_| err(format!("bad index {x:?}"))))
                .collect()
        };
        let kind: GateKind = kind.parse().map_err(|_| err(format!("unknown gate {kind:?}")))?;
        let block = match block {
            "enc" => BlockTag::Encoder,
            "pre" => BlockTag::Prefix,
            b => BlockTag::Block(b.parse().map_err(|_| err(format!("bad block {b:?}")))?),
        };
        let wires = list(wires)?;
        let gate = match slots.strip_prefix('x') {
            Some(f) => {
                let feature = f.parse().map_err(|_| err(format!("bad feature {f:?}")))?;
                Gate::encoder(kind, wires[0], feature)
            }
            None => Gate::trainable(kind, wires, list(slots)?, block),
        };
        gates.push(gate);
    }
    Ok(gates)
}
