//! Pauli-string algebra with matrix-free state application.
//!
//! Site indexing is little-endian throughout: site 0 is the least
//! significant bit of a computational-basis index. Phases are kept in the
//! exact four-element group {1, i, -1, -i}, stored as a power of i, so long
//! products never accumulate floating-point drift.

use crate::error::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64;

/// Number of sites above which dense materialization is refused.
pub const DENSE_LIMIT: usize = 12;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Letter> {
        match c {
            'I' => Ok(Letter::I),
            'X' => Ok(Letter::X),
            'Y' => Ok(Letter::Y),
            'Z' => Ok(Letter::Z),
            _ => Err(Error::Parse(format!("unknown Pauli letter '{c}'"))),
        }
    }
}

/// Element of {1, i, -1, -i} stored as the exponent k in i^k.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_i_power(k: u32) -> Phase {
        Phase((k % 4) as u8)
    }

    pub fn i_power(self) -> u8 {
        self.0
    }

    pub fn times(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    pub fn inverse(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn as_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

/// A phased word of single-site Pauli letters: phase * L_{n-1} ⊗ ... ⊗ L_0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PauliString {
    pub letters: Vec<Letter>,
    pub phase: Phase,
}

impl PauliString {
    pub fn identity(n_sites: usize) -> PauliString {
        PauliString {
            letters: vec![Letter::I; n_sites],
            phase: Phase::ONE,
        }
    }

    /// Single nontrivial letter at `site`, identity elsewhere.
    pub fn single(n_sites: usize, site: usize, letter: Letter) -> PauliString {
        let mut letters = vec![Letter::I; n_sites];
        letters[site] = letter;
        PauliString {
            letters,
            phase: Phase::ONE,
        }
    }

    /// Build from site->letter pairs; remaining sites are identity.
    pub fn from_pairs(n_sites: usize, pairs: &[(usize, Letter)]) -> PauliString {
        let mut letters = vec![Letter::I; n_sites];
        for &(s, l) in pairs {
            letters[s] = l;
        }
        PauliString {
            letters,
            phase: Phase::ONE,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.letters.len()
    }

    /// Word as a string with site 0 leftmost, e.g. "XYXY".
    pub fn word(&self) -> String {
        self.letters.iter().map(|l| l.as_char()).collect()
    }

    /// Bit mask of sites whose letter flips the basis bit (X or Y).
    fn flip_mask(&self) -> usize {
        let mut m = 0;
        for (s, l) in self.letters.iter().enumerate() {
            if matches!(l, Letter::X | Letter::Y) {
                m |= 1 << s;
            }
        }
        m
    }

    /// Bit mask of sites carrying Y or Z (the phase-active letters).
    fn yz_mask(&self) -> usize {
        let mut m = 0;
        for (s, l) in self.letters.iter().enumerate() {
            if matches!(l, Letter::Y | Letter::Z) {
                m |= 1 << s;
            }
        }
        m
    }

    fn y_count(&self) -> u32 {
        self.letters.iter().filter(|l| matches!(l, Letter::Y)).count() as u32
    }

    /// Product of two strings as a new phased string.
    ///
    /// Per-site letter products contribute phases from the single-qubit
    /// multiplication table (XY = iZ etc.); all phases stay in {±1, ±i}.
    pub fn product(&self, other: &PauliString) -> Result<PauliString> {
        if self.n_sites() != other.n_sites() {
            return Err(Error::Dimension(format!(
                "string product: {} vs {} sites",
                self.n_sites(),
                other.n_sites()
            )));
        }
        let mut phase = self.phase.times(other.phase);
        let mut letters = Vec::with_capacity(self.n_sites());
        for (&a, &b) in self.letters.iter().zip(&other.letters) {
            let (l, k) = letter_product(a, b);
            letters.push(l);
            phase = phase.times(Phase::from_i_power(k));
        }
        Ok(PauliString { letters, phase })
    }

    /// True when the two strings commute (anticommuting letter pairs occur an
    /// even number of times).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| {
                a != Letter::I && b != Letter::I && a != b
            })
            .count();
        anti % 2 == 0
    }
}

/// Single-qubit product a*b = i^k * letter.
fn letter_product(a: Letter, b: Letter) -> (Letter, u32) {
    use Letter::*;
    match (a, b) {
        (I, x) => (x, 0),
        (x, I) => (x, 0),
        (X, X) | (Y, Y) | (Z, Z) => (I, 0),
        (X, Y) => (Z, 1),
        (Y, X) => (Z, 3),
        (Y, Z) => (X, 1),
        (Z, Y) => (X, 3),
        (Z, X) => (Y, 1),
        (X, Z) => (Y, 3),
    }
}

/// Real-weighted list of Pauli strings; Hamiltonians and observables live
/// here without ever being materialized unless a dense oracle asks for it.
#[derive(Clone, Debug, Default)]
pub struct OperatorSum {
    pub terms: Vec<(f64, PauliString)>,
}

impl OperatorSum {
    pub fn new(terms: Vec<(f64, PauliString)>) -> OperatorSum {
        OperatorSum { terms }
    }

    pub fn n_sites(&self) -> usize {
        self.terms.first().map_or(0, |(_, p)| p.n_sites())
    }

    /// Merge terms sharing the same letter word; phases are folded into the
    /// coefficient (only ±1 phases can merge with real weights, ±i phases are
    /// kept as-is with their own entry).
    pub fn merged(&self) -> OperatorSum {
        let mut out: Vec<(f64, PauliString)> = Vec::new();
        for (c, p) in &self.terms {
            // fold a real phase into the coefficient
            let (coef, string) = if p.phase.is_real() {
                let sign = if p.phase == Phase::MINUS_ONE { -1.0 } else { 1.0 };
                (
                    c * sign,
                    PauliString {
                        letters: p.letters.clone(),
                        phase: Phase::ONE,
                    },
                )
            } else {
                (*c, p.clone())
            };
            if let Some(slot) = out
                .iter_mut()
                .find(|(_, q)| q.letters == string.letters && q.phase == string.phase)
            {
                slot.0 += coef;
            } else {
                out.push((coef, string));
            }
        }
        out.retain(|(c, _)| *c != 0.0);
        OperatorSum { terms: out }
    }

    /// Scalar multiple.
    pub fn scaled(&self, s: f64) -> OperatorSum {
        OperatorSum {
            terms: self.terms.iter().map(|(c, p)| (c * s, p.clone())).collect(),
        }
    }

    /// Every term contributes a real matrix (even number of Y letters after
    /// accounting for the stored phase), so the materialized operator is a
    /// real symmetric matrix.
    pub fn is_real_symmetric(&self) -> bool {
        self.terms
            .iter()
            .all(|(_, p)| (p.phase.i_power() as u32 + p.y_count()) % 2 == 0)
    }
}

/// Normalized complex amplitude vector over 2^n_sites basis states.
#[derive(Clone, Debug)]
pub struct StateVector {
    pub n_sites: usize,
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n_sites: usize) -> StateVector {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_sites];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        StateVector {
            n_sites,
            amplitudes,
        }
    }

    pub fn from_amplitudes(n_sites: usize, amplitudes: Vec<Complex64>) -> Result<StateVector> {
        if amplitudes.len() != 1 << n_sites {
            return Err(Error::Dimension(format!(
                "state over {n_sites} sites needs {} amplitudes, got {}",
                1usize << n_sites,
                amplitudes.len()
            )));
        }
        Ok(StateVector {
            n_sites,
            amplitudes,
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amplitudes {
                *a /= n;
            }
        }
    }

    /// <self|other>.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |<self|other>| — the amplitude-overlap fidelity.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }
}

/// Apply a Pauli string to a state without building a matrix.
///
/// For basis index b the image is b ^ flip_mask with phase
/// i^(nY + 2*popcount(b & (Ymask|Zmask))) times the string's own phase:
/// Y|0> = i|1>, Y|1> = -i|0>, Z|1> = -|1>.
pub fn apply_string(p: &PauliString, v: &StateVector) -> Result<StateVector> {
    if p.n_sites() != v.n_sites {
        return Err(Error::Dimension(format!(
            "apply_string: operator has {} sites, state has {}",
            p.n_sites(),
            v.n_sites
        )));
    }
    let flip = p.flip_mask();
    let yz = p.yz_mask();
    let base = p.phase.i_power() as u32 + p.y_count();
    let mut out = vec![Complex64::new(0.0, 0.0); v.dim()];
    for (b, &amp) in v.amplitudes.iter().enumerate() {
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        let k = base + 2 * (b & yz).count_ones();
        out[b ^ flip] = Phase::from_i_power(k).as_complex() * amp;
    }
    StateVector::from_amplitudes(v.n_sites, out)
}

/// Apply a weighted sum of strings: returns H|v> accumulated term by term.
pub fn apply_sum(h: &OperatorSum, v: &StateVector) -> Result<StateVector> {
    let mut acc = vec![Complex64::new(0.0, 0.0); v.dim()];
    for (c, p) in &h.terms {
        let pv = apply_string(p, v)?;
        for (a, b) in acc.iter_mut().zip(&pv.amplitudes) {
            *a += c * b;
        }
    }
    StateVector::from_amplitudes(v.n_sites, acc)
}

/// Complex expectation <v|P|v>; physical observables use the real part.
pub fn expectation_complex(p: &PauliString, v: &StateVector) -> Result<Complex64> {
    let pv = apply_string(p, v)?;
    Ok(v.inner(&pv))
}

/// Re<v|P|v>.
pub fn expectation(p: &PauliString, v: &StateVector) -> Result<f64> {
    Ok(expectation_complex(p, v)?.re)
}

/// Re<v|H|v> for a weighted sum.
pub fn expectation_sum(h: &OperatorSum, v: &StateVector) -> Result<f64> {
    let hv = apply_sum(h, v)?;
    Ok(v.inner(&hv).re)
}

/// Dense 2^n x 2^n complex matrix of a single string.
pub fn materialize_string(p: &PauliString) -> Result<Array2<Complex64>> {
    if p.n_sites() > DENSE_LIMIT {
        return Err(Error::Capacity(format!(
            "materialize: {} sites exceeds dense limit {DENSE_LIMIT}",
            p.n_sites()
        )));
    }
    let dim = 1usize << p.n_sites();
    let flip = p.flip_mask();
    let yz = p.yz_mask();
    let base = p.phase.i_power() as u32 + p.y_count();
    let mut m = Array2::zeros((dim, dim));
    for b in 0..dim {
        let k = base + 2 * (b & yz).count_ones();
        m[(b ^ flip, b)] = Phase::from_i_power(k).as_complex();
    }
    Ok(m)
}

/// Dense complex matrix of a weighted sum.
pub fn materialize(h: &OperatorSum) -> Result<Array2<Complex64>> {
    if h.n_sites() > DENSE_LIMIT {
        return Err(Error::Capacity(format!(
            "materialize: {} sites exceeds dense limit {DENSE_LIMIT}",
            h.n_sites()
        )));
    }
    let dim = 1usize << h.n_sites();
    let mut m = Array2::zeros((dim, dim));
    for (c, p) in &h.terms {
        let pm = materialize_string(p)?;
        m += &(pm * Complex64::new(*c, 0.0));
    }
    Ok(m)
}

/// Dense real matrix; only valid when `is_real_symmetric` holds.
pub fn materialize_real(h: &OperatorSum) -> Result<Array2<f64>> {
    if !h.is_real_symmetric() {
        return Err(Error::Domain(
            "operator has imaginary entries; use materialize".into(),
        ));
    }
    if h.n_sites() > DENSE_LIMIT {
        return Err(Error::Capacity(format!(
            "materialize_real: {} sites exceeds dense limit {DENSE_LIMIT}",
            h.n_sites()
        )));
    }
    let dim = 1usize << h.n_sites();
    let mut m = Array2::zeros((dim, dim));
    for (c, p) in &h.terms {
        let flip = p.flip_mask();
        let yz = p.yz_mask();
        let base = p.phase.i_power() as u32 + p.y_count();
        for b in 0..dim {
            let k = base + 2 * (b & yz).count_ones();
            // k is even here, so the phase is ±1
            let sign = if k % 4 == 0 { 1.0 } else { -1.0 };
            m[(b ^ flip, b)] += c * sign;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn x_flips_zero() {
        let p = PauliString::single(1, 0, Letter::X);
        let v = StateVector::zero_state(1);
        let out = apply_string(&p, &v).unwrap();
        assert_eq!(out.amplitudes[0], c(0.0, 0.0));
        assert_eq!(out.amplitudes[1], c(1.0, 0.0));
    }

    #[test]
    fn identity_is_noop() {
        let p = PauliString::identity(3);
        let mut v = StateVector::zero_state(3);
        v.amplitudes[5] = c(0.3, -0.2);
        let out = apply_string(&p, &v).unwrap();
        assert_eq!(out.amplitudes, v.amplitudes);
    }

    #[test]
    fn xyxy_on_0000() {
        // X⊗Y⊗X⊗Y |0000> = -|1111>: each Y contributes a factor i.
        let p = PauliString::from_pairs(
            4,
            &[(0, Letter::X), (1, Letter::Y), (2, Letter::X), (3, Letter::Y)],
        );
        let v = StateVector::zero_state(4);
        let out = apply_string(&p, &v).unwrap();
        assert_eq!(out.amplitudes[0b1111], c(-1.0, 0.0));
        assert_eq!(out.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>(), 1.0);
    }

    #[test]
    fn string_squares_to_identity() {
        let p = PauliString::from_pairs(3, &[(0, Letter::Y), (2, Letter::Z)]);
        let sq = p.product(&p).unwrap();
        assert_eq!(sq.letters, vec![Letter::I; 3]);
        assert_eq!(sq.phase, Phase::ONE);
    }

    #[test]
    fn plus_state_sx_expectation() {
        let v = StateVector::from_amplitudes(
            1,
            vec![c(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2],
        )
        .unwrap();
        let p = PauliString::single(1, 0, Letter::X);
        assert!((expectation(&p, &v).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn materialize_single_x() {
        let p = PauliString::single(1, 0, Letter::X);
        let h = OperatorSum::new(vec![(1.0, p)]);
        let m = materialize(&h).unwrap();
        assert_eq!(m[(0, 1)], c(1.0, 0.0));
        assert_eq!(m[(1, 0)], c(1.0, 0.0));
        assert_eq!(m[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn real_materialization_matches_complex() {
        let p1 = PauliString::from_pairs(2, &[(0, Letter::Y), (1, Letter::Y)]);
        let p2 = PauliString::from_pairs(2, &[(0, Letter::X)]);
        let h = OperatorSum::new(vec![(0.7, p1), (-1.3, p2)]);
        assert!(h.is_real_symmetric());
        let mr = materialize_real(&h).unwrap();
        let mc = materialize(&h).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((mc[(i, j)].re - mr[(i, j)]).abs() < 1e-15);
                assert!(mc[(i, j)].im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let p = PauliString::identity(2);
        let v = StateVector::zero_state(3);
        assert!(apply_string(&p, &v).is_err());
    }
}
