use anyhow::Result;
use quantumsea::circuit::{build_template, circuit_stats, CircuitStats, TemplateKind};
use quantumsea::report::stable_json;
use quantumsea::sparse::init_mask;
use quantumsea::tasks::{build_circuit, Task};
use quantumsea::{Error, SparsityMask};
use serde::Serialize;

use crate::artifacts::read_snapshot;
use crate::{Format, InspectArgs};

#[derive(Serialize)]
struct Report {
    source: String,
    template: String,
    n_qubits: usize,
    n_blocks: usize,
    n_params: usize,
    active_params: usize,
    implicit_capacity: f64,
    stats: CircuitStats,
}

pub fn run(args: &InspectArgs, format: Format) -> Result<()> {
    let (source, circuit, mask, capacity) = match (&args.run, &args.template) {
        (Some(run), _) => {
            let snap = read_snapshot(run)?;
            let task = Task::load(&snap.config.task, &snap.config_dir, snap.config.seed)?;
            let circuit = build_circuit(&snap.config, &task)?;
            (run.display().to_string(), circuit, snap.mask, snap.capacity)
        }
        (None, Some(name)) => {
            let kind: TemplateKind = name.parse()?;
            let circuit = build_template(kind, args.qubits, args.blocks)?;
            let mask = match args.sparsity {
                Some(s) => init_mask(&circuit, &[s], args.seed)?,
                None => SparsityMask::dense(&circuit),
            };
            (format!("template {name}"), circuit, mask, 0.0)
        }
        (None, None) => return Err(Error::Config("pass --run or --template".into()).into()),
    };
    let stats = circuit_stats(&circuit, &mask);
    let report = Report {
        source,
        template: circuit.template().map_or("custom".into(), |t| t.name().to_string()),
        n_qubits: circuit.n_qubits(),
        n_blocks: circuit.n_blocks(),
        n_params: circuit.n_params(),
        active_params: mask.active_count(),
        implicit_capacity: capacity,
        stats,
    };
    match format {
        Format::Records => println!("{}", stable_json(&report)?),
        Format::Human => {
            println!("source:            {}", report.source);
            println!(
                "circuit:           {} on {} qubits, {} blocks",
                report.template, report.n_qubits, report.n_blocks
            );
            println!("parameters:        {} active of {}", report.active_params, report.n_params);
            println!("implicit capacity: {:.4}", report.implicit_capacity);
            println!("depth:             {}", report.stats.depth);
            println!(
                "gates:             {} total, {} rotation, {} two-qubit",
                report.stats.total_gates, report.stats.rotation_gates, report.stats.two_qubit_gates
            );
            for (kind, n) in &report.stats.gate_counts {
                println!("  {kind:<8} {n}");
            }
        }
    }
    Ok(())
}
