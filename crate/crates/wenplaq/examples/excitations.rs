//! Create plaquette defects on top of a topologically ordered ground state
//! and read off their e/m labels from the flipped plaquette expectations.
//!
//! Run with: cargo run --example excitations

use wenplaq::lattice::{classify_excitations, Lattice, Order, DefectLabel, DEFECT_TOL};
use wenplaq::pauli::{apply_string, Letter, PauliString};
use wenplaq::spectra::ground_state;

fn main() -> wenplaq::Result<()> {
    let l = Lattice::new(2, 2);
    let (e0, ground) = ground_state(&l, 1.0, 0.2)?; // J >> g: all <F_i> near +1
    println!("ground energy {e0:.6}");

    let records = classify_excitations(&l, &ground, Order::Z2A, DEFECT_TOL)?;
    println!("ground-state plaquettes:");
    for r in &records {
        println!("  base {}: <F> = {:+.4}  {:?}", r.base + 1, r.f_value, r.label);
    }

    // a single sigma_z flips the two plaquettes whose operators anticommute
    // with it, pumping an e-m defect pair
    let z0 = PauliString::single(4, 0, Letter::Z);
    let excited = apply_string(&z0, &ground)?;
    let records = classify_excitations(&l, &excited, Order::Z2A, DEFECT_TOL)?;
    println!("after sigma_z on site 1:");
    for r in &records {
        let tag = match r.label {
            DefectLabel::E => "e-particle",
            DefectLabel::M => "m-particle",
            DefectLabel::None => "",
        };
        println!("  base {}: <F> = {:+.4}  {tag}", r.base + 1, r.f_value);
    }
    Ok(())
}
