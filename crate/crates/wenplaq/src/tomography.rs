//! Synthetic Pauli-basis tomography: expectation records over the complete
//! operator basis (4^n words), noisy or exact, and linear reconstruction with
//! a clip-and-renormalize physicality projection.

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LoopPath};
use crate::observables::{
    concurrence, local_order_p, project_physical, reduced_density, state_fidelity, wilson_expectation_rho,
    DensityMatrix,
};
use crate::pauli::{materialize_string, Letter, PauliString};
use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::collections::BTreeMap;

/// All Pauli words over n sites in lexicographic order (I < X < Y < Z,
/// site 0 is the leftmost letter). The noise stream is drawn in this order,
/// so records are reproducible for a given seed.
pub fn all_words(n_sites: usize) -> Vec<PauliString> {
    let letters = [Letter::I, Letter::X, Letter::Y, Letter::Z];
    let count = 4usize.pow(n_sites as u32);
    (0..count)
        .map(|mut idx| {
            let mut w = Vec::with_capacity(n_sites);
            for _ in 0..n_sites {
                w.push(letters[idx % 4]);
                idx /= 4;
            }
            // leftmost (site 0) letter varies slowest
            w.reverse();
            PauliString {
                letters: w,
                phase: crate::pauli::Phase::ONE,
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct MeasurementRecord {
    pub n_sites: usize,
    pub sigma: f64,
    pub seed: u64,
    /// Word -> measured expectation; the identity word is exactly 1.
    pub entries: BTreeMap<String, f64>,
}

/// Draw a record of all 4^n expectations Tr(rho P) + noise. The identity
/// entry is exempt from noise; noisy entries are clamped to [-1-5s, 1+5s].
pub fn synth_measure(rho: &DensityMatrix, sigma: f64, seed: u64) -> Result<MeasurementRecord> {
    if sigma < 0.0 {
        return Err(Error::Domain("noise sigma must be nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).unwrap();
    let mut entries = BTreeMap::new();
    let identity = "I".repeat(rho.n_sites);
    for p in all_words(rho.n_sites) {
        let word = p.word();
        let exact = rho.expect(&p)?;
        let value = if word == identity {
            1.0
        } else if sigma > 0.0 {
            let noisy = exact + normal.sample(&mut rng);
            noisy.clamp(-1.0 - 5.0 * sigma, 1.0 + 5.0 * sigma)
        } else {
            exact
        };
        entries.insert(word, value);
    }
    Ok(MeasurementRecord {
        n_sites: rho.n_sites,
        sigma,
        seed,
        entries,
    })
}

/// Linear inversion rho = (1/2^n) sum_P entry(P) P, returned raw alongside
/// the physical (clipped, renormalized) projection.
pub fn reconstruct(rec: &MeasurementRecord) -> Result<(DensityMatrix, DensityMatrix)> {
    let words = all_words(rec.n_sites);
    let missing: Vec<String> = words
        .iter()
        .map(|p| p.word())
        .filter(|w| !rec.entries.contains_key(w))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Incomplete {
            missing: missing.len(),
            first: missing[0].clone(),
        });
    }
    let dim = 1usize << rec.n_sites;
    let mut m: Array2<Complex64> = Array2::zeros((dim, dim));
    let scale = 1.0 / dim as f64;
    for p in &words {
        let entry = rec.entries[&p.word()];
        if entry == 0.0 {
            continue;
        }
        let pm = materialize_string(p)?;
        m += &(pm * Complex64::new(entry * scale, 0.0));
    }
    let raw = DensityMatrix::from_matrix(rec.n_sites, m)?;
    let projected = project_physical(&raw)?;
    Ok((raw, projected))
}

/// Side-by-side observables of the true and reconstructed states.
#[derive(Clone, Debug)]
pub struct TomoReport {
    pub fidelity: f64,
    pub wilson_true: f64,
    pub wilson_rec: f64,
    pub p_true: f64,
    pub p_rec: f64,
    /// Pairwise concurrences keyed by 1-based site pairs, (true, reconstructed).
    pub concurrences: Vec<((usize, usize), f64, f64)>,
}

/// Evaluate the observable suite on both states (2x2 lattice observables).
pub fn tomography_report(rho_true: &DensityMatrix, rho_rec: &DensityMatrix) -> Result<TomoReport> {
    if rho_true.n_sites != 4 || rho_rec.n_sites != 4 {
        return Err(Error::Dimension("tomography report expects 4-site states".into()));
    }
    let l = Lattice::new(2, 2);
    let c = LoopPath::canonical_2x2(&l);
    let pairs = [(1usize, 3usize), (2, 4), (1, 2), (1, 4), (2, 3), (3, 4)];
    let mut concurrences = Vec::new();
    for (a, b) in pairs {
        let keep = [a - 1, b - 1];
        let ct = concurrence(&reduced_density(rho_true, &keep)?)?;
        let cr = concurrence(&reduced_density(rho_rec, &keep)?)?;
        concurrences.push(((a, b), ct, cr));
    }
    Ok(TomoReport {
        fidelity: state_fidelity(rho_true, rho_rec)?,
        wilson_true: wilson_expectation_rho(rho_true, &l, &c)?,
        wilson_rec: wilson_expectation_rho(rho_rec, &l, &c)?,
        p_true: local_order_p(rho_true, 0)?,
        p_rec: local_order_p(rho_rec, 0)?,
        concurrences,
    })
}

// ---------------------------------------------------------------------------
// text format
// ---------------------------------------------------------------------------

pub fn emit_record(rec: &MeasurementRecord) -> String {
    let mut out = String::new();
    out.push_str("TOMOREC v1\n");
    out.push_str(&format!("NSITES {}\n", rec.n_sites));
    out.push_str(&format!("SIGMA {}\n", rec.sigma));
    out.push_str(&format!("SEED {}\n", rec.seed));
    for (word, value) in &rec.entries {
        out.push_str(&format!("{word} {value}\n"));
    }
    out
}

pub fn parse_record(text: &str) -> Result<MeasurementRecord> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty record".into()))?;
    if header.trim() != "TOMOREC v1" {
        return Err(Error::Parse(format!("bad header '{header}'")));
    }
    let mut n_sites = 0;
    let mut sigma = 0.0;
    let mut seed = 0;
    let mut entries = BTreeMap::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap();
        let val = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("missing value in '{line}'")))?;
        match key {
            "NSITES" => {
                n_sites = val
                    .parse()
                    .map_err(|_| Error::Parse("bad NSITES".into()))?
            }
            "SIGMA" => sigma = val.parse().map_err(|_| Error::Parse("bad SIGMA".into()))?,
            "SEED" => seed = val.parse().map_err(|_| Error::Parse("bad SEED".into()))?,
            word => {
                for ch in word.chars() {
                    Letter::from_char(ch)?;
                }
                let value: f64 = val
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad value in '{line}'")))?;
                entries.insert(word.to_string(), value);
            }
        }
    }
    Ok(MeasurementRecord {
        n_sites,
        sigma,
        seed,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::StateVector;
    use crate::spectra::ground_state;
    use rand::Rng;

    fn random_density(seed: u64) -> DensityMatrix {
        // Ginibre ensemble: G G^dag normalized
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 16;
        let mut g: Array2<Complex64> = Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                g[(i, j)] = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
        }
        let gh = g.t().mapv(|z| z.conj());
        let m = g.dot(&gh);
        let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
        DensityMatrix::from_matrix(4, m.mapv(|z| z / tr)).unwrap()
    }

    #[test]
    fn word_enumeration_is_complete() {
        let words = all_words(4);
        assert_eq!(words.len(), 256);
        assert_eq!(words[0].word(), "IIII");
        assert_eq!(words[255].word(), "ZZZZ");
    }

    #[test]
    fn stabilizer_expectations_of_zero_state() {
        let rho = DensityMatrix::from_state(&StateVector::zero_state(4));
        let rec = synth_measure(&rho, 0.0, 1).unwrap();
        assert_eq!(rec.entries["ZZZZ"], 1.0);
        assert_eq!(rec.entries["XIII"], 0.0);
        assert_eq!(rec.entries["IIII"], 1.0);
    }

    #[test]
    fn noiseless_roundtrip_is_exact() {
        for seed in 0..10 {
            let rho = random_density(seed);
            let rec = synth_measure(&rho, 0.0, seed).unwrap();
            let (_, projected) = reconstruct(&rec).unwrap();
            let f = state_fidelity(&rho, &projected).unwrap();
            assert!((f - 1.0).abs() < 1e-12, "seed {seed}: fidelity {f}");
        }
    }

    #[test]
    fn maximally_mixed_reconstruction() {
        let m = Array2::eye(16).mapv(|x: f64| Complex64::new(x / 16.0, 0.0));
        let rho = DensityMatrix::from_matrix(4, m).unwrap();
        let rec = synth_measure(&rho, 0.0, 0).unwrap();
        for (word, &v) in &rec.entries {
            if word != "IIII" {
                assert!(v.abs() < 1e-12);
            }
        }
        let (raw, _) = reconstruct(&rec).unwrap();
        for i in 0..16 {
            assert!((raw.matrix[(i, i)].re - 1.0 / 16.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noisy_record_is_reproducible() {
        let rho = random_density(3);
        let a = synth_measure(&rho, 0.05, 42).unwrap();
        let b = synth_measure(&rho, 0.05, 42).unwrap();
        assert_eq!(a.entries, b.entries);
        let c = synth_measure(&rho, 0.05, 43).unwrap();
        assert_ne!(a.entries, c.entries);
    }

    #[test]
    fn record_roundtrip_text() {
        let rho = random_density(5);
        let rec = synth_measure(&rho, 0.03, 9).unwrap();
        let text = emit_record(&rec);
        let parsed = parse_record(&text).unwrap();
        assert_eq!(parsed.entries, rec.entries);
        assert_eq!(emit_record(&parsed), text);
    }

    #[test]
    fn missing_words_reported() {
        let rho = random_density(6);
        let mut rec = synth_measure(&rho, 0.0, 0).unwrap();
        rec.entries.remove("XYXY");
        match reconstruct(&rec) {
            Err(Error::Incomplete { missing, first }) => {
                assert_eq!(missing, 1);
                assert_eq!(first, "XYXY");
            }
            other => panic!("expected incompleteness error, got {other:?}"),
        }
    }

    #[test]
    fn wilson_state_reconstructs_with_report() {
        let l = Lattice::new(2, 2);
        let (_, v) = ground_state(&l, 20.0, 1.0).unwrap();
        let rho = DensityMatrix::from_state(&v);
        let rec = synth_measure(&rho, 0.0, 0).unwrap();
        let (_, projected) = reconstruct(&rec).unwrap();
        let report = tomography_report(&rho, &projected).unwrap();
        assert!((report.fidelity - 1.0).abs() < 1e-10);
        assert!((report.wilson_true - report.wilson_rec).abs() < 1e-10);
        for ((_, _), ct, cr) in &report.concurrences {
            assert!((ct - cr).abs() < 1e-8);
        }
    }
}
