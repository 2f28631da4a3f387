//! Sweep the coupling J across the phase diagram at a few field strengths
//! and watch the Wilson loop flip sign while the local order parameter stays
//! even in J.
//!
//! Run with: cargo run --example phase_scan

use wenplaq::lattice::{build_hamiltonian, Lattice, LoopPath};
use wenplaq::observables::{local_order_p_state, wilson_expectation};
use wenplaq::spectra::dense_spectrum;

fn main() -> wenplaq::Result<()> {
    let l = Lattice::new(2, 2);
    let loop_c = LoopPath::canonical_2x2(&l);

    for g in [1.0, 5.0, 20.0] {
        println!("g = {g}");
        println!("{:>8} {:>12} {:>12} {:>12}", "J", "<W>", "P", "J/sqrt(g2+J2)");
        for j in [-20.0, -5.0, -1.0, 0.0, 1.0, 5.0, 20.0] {
            let h = build_hamiltonian(&l, j, g)?;
            let spec = dense_spectrum(&h)?;
            let v = &spec.states[0];
            let w = wilson_expectation(v, &l, &loop_c)?;
            let p = local_order_p_state(v, 0)?;
            let predicted = j / (g * g + j * j).sqrt();
            println!("{j:>8.1} {w:>12.6} {p:>12.6} {predicted:>12.6}");
        }
        println!();
    }

    // the transition region narrows as g shrinks: width where |<W>| < 0.9
    for g in [20.0, 5.0, 1.0] {
        let mut width = 0.0;
        let n = 81;
        for i in 0..n {
            let j = -20.0 + 40.0 * i as f64 / (n - 1) as f64;
            let h = build_hamiltonian(&l, j, g)?;
            let v = &dense_spectrum(&h)?.states[0];
            let w = wilson_expectation(v, &l, &LoopPath::canonical_2x2(&l))?;
            if w.abs() < 0.9 {
                width += 40.0 / (n - 1) as f64;
            }
        }
        println!("g = {g:>5}: |<W>| < 0.9 over a J-window of width {width:.2}");
    }
    Ok(())
}
