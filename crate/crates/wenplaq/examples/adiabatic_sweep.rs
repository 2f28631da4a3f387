//! Drive the system from one topological order to the other through the
//! polarized phase with a constant-adiabaticity schedule, and compare step
//! counts.
//!
//! Run with: cargo run --example adiabatic_sweep

use wenplaq::adiabatic::{min_fidelity_scan, run_sweep, Stepper};

fn main() -> wenplaq::Result<()> {
    let (g, j_start, j_end, t_total) = (1.0, -20.0, 20.0, 6.5684);

    let (schedule, sweep) = run_sweep(g, j_start, j_end, t_total, 31, Stepper::Exact)?;
    println!(
        "schedule: c = {:.6}, {} samples, J(T/2) = {:.4}",
        schedule.adiabaticity_c,
        schedule.samples.len(),
        schedule.j_at(t_total / 2.0)
    );
    println!("{:>4} {:>10} {:>10} {:>10} {:>10}", "m", "J_m", "fidelity", "<W>", "P");
    for s in &sweep.steps {
        println!(
            "{:>4} {:>10.4} {:>10.6} {:>10.6} {:>10.6}",
            s.m, s.j_m, s.fidelity, s.wilson, s.local_p
        );
    }
    println!("minimum step fidelity (M=31): {:.6}\n", sweep.min_fidelity());

    let scan = min_fidelity_scan(g, j_start, j_end, t_total, &[1, 5, 10, 15, 20, 25, 31, 40, 60, 100])?;
    println!("{:>5} {:>12}", "M", "F_min");
    for (m, f) in scan {
        println!("{m:>5} {f:>12.6}");
    }

    // the Trotterized stepper lands close to the exact one
    let (_, trot) = run_sweep(g, j_start, j_end, t_total, 31, Stepper::Trotter(4))?;
    println!(
        "\ntrotter stepper (4 slices): F_min = {:.6}",
        trot.min_fidelity()
    );
    Ok(())
}
