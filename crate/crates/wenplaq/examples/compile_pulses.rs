//! Compile the four-body ZZZZ evolution into rotations and free evolutions
//! on a four-spin machine, and check the program against the exact unitary.
//!
//! Run with: cargo run --example compile_pulses

use wenplaq::driver::SAMPLE_MACHINE_JSON;
use wenplaq::trotter::{
    compile_four_body, emit_sequence, four_body_target, sequence_unitary, verify_equivalence,
    Instruction, NmrMachine,
};

fn main() -> wenplaq::Result<()> {
    let machine: NmrMachine = serde_json::from_str(SAMPLE_MACHINE_JSON).unwrap();
    let (j, tau) = (1.0, 0.05);

    let seq = compile_four_body(j, tau, &machine)?;
    let rotations = seq
        .instructions
        .iter()
        .filter(|i| matches!(i, Instruction::Rotation { .. }))
        .count();
    let total_free: f64 = seq
        .instructions
        .iter()
        .filter_map(|i| match i {
            Instruction::Free { duration } => Some(*duration),
            _ => None,
        })
        .sum();
    println!(
        "compiled e^(-i 2J tau ZZZZ) at J={j}, tau={tau}: {} instructions ({rotations} rotations, {:.2} ms total free evolution)",
        seq.instructions.len(),
        total_free * 1e3
    );

    let u = sequence_unitary(&seq, Some(&machine))?;
    let (distance, phase) = verify_equivalence(&four_body_target(j, tau), &u)?;
    println!("distance to target (up to global phase): {distance:.3e}, phase {phase:.4}");

    println!("\nfirst lines of the serialized program:");
    for line in emit_sequence(&seq, &machine)?.lines().take(18) {
        println!("  {line}");
    }
    Ok(())
}
