//! Trotter splitting of evolution steps and compilation of the four-body
//! ZZZZ evolution into single-site rotations and free evolutions under a
//! four-spin NMR machine Hamiltonian
//!   H_NMR = sum_i (w_i/2) Z_i + sum_{i<j} (pi J_ij / 2) Z_i Z_j
//! (w in rad/s, J in Hz, durations in seconds), plus brute-force unitary
//! verification.
//!
//! Machine sites are labeled 1..4 in sequences and machine files; site k
//! maps to qubit k-1 (bit k-1 of the basis index).

use crate::error::{Error, Result};
use crate::pauli::DENSE_LIMIT;
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    NegX,
    NegY,
}

impl Axis {
    pub fn token(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::NegX => "-x",
            Axis::NegY => "-y",
        }
    }

    pub fn from_token(t: &str) -> Result<Axis> {
        match t {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "-x" => Ok(Axis::NegX),
            "-y" => Ok(Axis::NegY),
            _ => Err(Error::Parse(format!("unknown rotation axis '{t}'"))),
        }
    }

    fn sign(self) -> f64 {
        match self {
            Axis::X | Axis::Y => 1.0,
            Axis::NegX | Axis::NegY => -1.0,
        }
    }

    fn is_x(self) -> bool {
        matches!(self, Axis::X | Axis::NegX)
    }
}

#[derive(Clone, Debug)]
pub enum Instruction {
    /// e^{-i (angle/2) * sign(axis) * sum_sites sigma_axis}; sites are 1-based.
    Rotation {
        sites: Vec<usize>,
        axis: Axis,
        angle: f64,
    },
    /// Free evolution under the machine Hamiltonian for `duration` seconds.
    Free { duration: f64 },
    /// e^{-i (angle/2) Z_site}.
    ZPhase { site: usize, angle: f64 },
    /// Exact unitary inserted into ideal-gate sequences (not serializable).
    Ideal {
        label: String,
        matrix: Array2<Complex64>,
    },
}

/// Ordered instruction list; instructions apply in list order (index 0 first).
#[derive(Clone, Debug)]
pub struct PulseSequence {
    pub n_sites: usize,
    pub instructions: Vec<Instruction>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NmrMachine {
    /// Chemical shifts in rad/s, one per site.
    pub omegas_rad_s: Vec<f64>,
    /// Scalar couplings in Hz as (site_a, site_b, value) with 1-based sites.
    pub couplings_hz: Vec<(usize, usize, f64)>,
}

impl NmrMachine {
    pub fn n_sites(&self) -> usize {
        self.omegas_rad_s.len()
    }

    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        let key = (a.min(b), a.max(b));
        self.couplings_hz
            .iter()
            .find(|&&(x, y, _)| (x.min(y), x.max(y)) == key)
            .map_or(0.0, |&(_, _, v)| v)
    }

    pub fn coupling_nonzero(&self, a: usize, b: usize) -> Result<f64> {
        let v = self.coupling(a, b);
        if v == 0.0 {
            return Err(Error::Machine(format!(
                "coupling J{}{} is zero but is used as a divisor",
                a.min(b),
                a.max(b)
            )));
        }
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_sites();
        for &(a, b, _) in &self.couplings_hz {
            if a == b || a < 1 || b < 1 || a > n || b > n {
                return Err(Error::Machine(format!("bad coupling pair ({a},{b})")));
            }
        }
        let mut seen = BTreeMap::new();
        for &(a, b, v) in &self.couplings_hz {
            let key = (a.min(b), a.max(b));
            if let Some(prev) = seen.insert(key, v) {
                if prev != v {
                    return Err(Error::Machine(format!(
                        "coupling J{}{} listed twice with different values",
                        key.0, key.1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<NmrMachine> {
        let text = std::fs::read_to_string(path)?;
        let m: NmrMachine = serde_json::from_str(&text)?;
        m.validate()?;
        Ok(m)
    }

    /// Diagonal of the machine Hamiltonian over basis states (rad/s).
    fn diagonal(&self) -> Vec<f64> {
        let n = self.n_sites();
        let dim = 1usize << n;
        let z = |b: usize, site: usize| -> f64 {
            // Z|0> = +|0>, site k on bit k-1
            if b >> (site - 1) & 1 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        (0..dim)
            .map(|b| {
                let mut e = 0.0;
                for site in 1..=n {
                    e += self.omegas_rad_s[site - 1] / 2.0 * z(b, site);
                }
                for &(a, c, j) in &self.couplings_hz {
                    e += PI * j / 2.0 * z(b, a) * z(b, c);
                }
                e
            })
            .collect()
    }
}

/// Echo block implementing e^{-i theta Z_a Z_b} exactly on a 4-spin machine.
///
/// The free time t = |2 theta / (pi J_ab)| is split into four equal delays.
/// Each spin follows a sign pattern over the four delays — (+,+,-,-) on the
/// kept pair (the partner negated when theta/J_ab < 0), (+,-,+,-) and
/// (+,-,-,+) on the two spectators — realized by pi pulses about x at the
/// pattern boundaries. Every pattern sums to zero, so all chemical shifts
/// refocus; every cross-pattern product sums to zero except the kept pair's,
/// so every other coupling refocuses as well.
fn keep_zz(seq: &mut Vec<Instruction>, a: usize, b: usize, theta: f64, m: &NmrMachine) -> Result<()> {
    let j_ab = m.coupling_nonzero(a, b)?;
    let mut t = 2.0 * theta / (PI * j_ab);
    let flip_partner = t < 0.0;
    t = t.abs();

    let base: [i32; 4] = [1, 1, -1, -1];
    let mut pattern = [[0i32; 4]; 5]; // indexed by site 1..4
    pattern[a] = base;
    pattern[b] = if flip_partner {
        [-1, -1, 1, 1]
    } else {
        base
    };
    let spectators: Vec<usize> = (1..=4).filter(|s| *s != a && *s != b).collect();
    pattern[spectators[0]] = [1, -1, 1, -1];
    pattern[spectators[1]] = [1, -1, -1, 1];

    let mut current = [1i32; 5];
    for k in 0..4 {
        let flips: Vec<usize> = (1..=4).filter(|&s| pattern[s][k] != current[s]).collect();
        if !flips.is_empty() {
            for &s in &flips {
                current[s] = -current[s];
            }
            seq.push(Instruction::Rotation {
                sites: flips,
                axis: Axis::X,
                angle: PI,
            });
        }
        seq.push(Instruction::Free { duration: t / 4.0 });
    }
    let flips: Vec<usize> = (1..=4).filter(|&s| current[s] != 1).collect();
    if !flips.is_empty() {
        seq.push(Instruction::Rotation {
            sites: flips,
            axis: Axis::X,
            angle: PI,
        });
    }
    Ok(())
}

/// Compile e^{-i 2 J tau Z1 Z2 Z3 Z4} into machine instructions.
///
/// Basis change: with B = X . ZZ(pi/4) . Y acting on a spin pair (rotations
/// on the first spin only), B' Z1 B = Z1 Z2. Applying it on pairs (1,2) and
/// (3,4) turns the inner e^{-i 2 J tau Z1 Z3} — itself an echo block — into
/// the four-body evolution. Every piece is exact, so the whole program is
/// exact up to global phase for any machine with nonzero J12, J34, J13.
pub fn compile_four_body(j: f64, tau: f64, m: &NmrMachine) -> Result<PulseSequence> {
    if tau < 0.0 {
        return Err(Error::Domain("tau must be nonnegative".into()));
    }
    m.validate()?;
    let mut seq = Vec::new();
    seq.push(Instruction::Rotation {
        sites: vec![1, 3],
        axis: Axis::Y,
        angle: FRAC_PI_2,
    });
    keep_zz(&mut seq, 3, 4, FRAC_PI_2 / 2.0, m)?;
    keep_zz(&mut seq, 1, 2, FRAC_PI_2 / 2.0, m)?;
    seq.push(Instruction::Rotation {
        sites: vec![1, 3],
        axis: Axis::X,
        angle: FRAC_PI_2,
    });
    keep_zz(&mut seq, 1, 3, 2.0 * j * tau, m)?;
    seq.push(Instruction::Rotation {
        sites: vec![1, 3],
        axis: Axis::X,
        angle: -FRAC_PI_2,
    });
    keep_zz(&mut seq, 1, 2, -FRAC_PI_2 / 2.0, m)?;
    keep_zz(&mut seq, 3, 4, -FRAC_PI_2 / 2.0, m)?;
    seq.push(Instruction::Rotation {
        sites: vec![1, 3],
        axis: Axis::Y,
        angle: -FRAC_PI_2,
    });
    Ok(PulseSequence {
        n_sites: 4,
        instructions: seq,
    })
}

/// Dense target of the four-body step: e^{-i 2 J tau Z1 Z2 Z3 Z4}.
pub fn four_body_target(j: f64, tau: f64) -> Array2<Complex64> {
    let dim = 16;
    let mut u = Array2::zeros((dim, dim));
    for b in 0..dim {
        let zprod = if (b as u32).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let phase = -2.0 * j * tau * zprod;
        u[(b, b)] = Complex64::from_polar(1.0, phase);
    }
    u
}

/// Symmetric Trotter step for the merged 2x2 Hamiltonian in ideal-gate form:
/// e^{-i H tau} ~ e^{-i H_x tau/2} e^{-i H_wen tau} e^{-i H_x tau/2} with the
/// four-body factor expanded exactly into two conjugated ZZZZ evolutions
/// (the two plaquette words commute, so that expansion carries no error).
pub fn trotter_step(j: f64, g: f64, tau: f64) -> PulseSequence {
    let mut seq = Vec::new();
    let half_field = Instruction::Rotation {
        sites: vec![1, 2, 3, 4],
        axis: Axis::X,
        angle: -g * tau,
    };
    seq.push(half_field.clone());
    // e^{+i 2 J tau XYXY}: conjugate ZZZZ by Y-rotations on sites 1,3 and
    // X-rotations on sites 2,4 (the sign flips from the two X-conjugations
    // cancel pairwise)
    push_conjugated_zzzz(&mut seq, j, tau, &[1, 3], &[2, 4]);
    // e^{+i 2 J tau YXYX}: roles of the two sublattices swap
    push_conjugated_zzzz(&mut seq, j, tau, &[2, 4], &[1, 3]);
    seq.push(half_field);
    PulseSequence {
        n_sites: 4,
        instructions: seq,
    }
}

fn push_conjugated_zzzz(seq: &mut Vec<Instruction>, j: f64, tau: f64, y_sites: &[usize], x_sites: &[usize]) {
    seq.push(Instruction::Rotation {
        sites: y_sites.to_vec(),
        axis: Axis::Y,
        angle: FRAC_PI_2,
    });
    seq.push(Instruction::Rotation {
        sites: x_sites.to_vec(),
        axis: Axis::X,
        angle: FRAC_PI_2,
    });
    seq.push(Instruction::Ideal {
        label: format!("ZZZZ({})", 2.0 * j * tau),
        matrix: zzzz_evolution(2.0 * j * tau),
    });
    seq.push(Instruction::Rotation {
        sites: x_sites.to_vec(),
        axis: Axis::X,
        angle: -FRAC_PI_2,
    });
    seq.push(Instruction::Rotation {
        sites: y_sites.to_vec(),
        axis: Axis::Y,
        angle: -FRAC_PI_2,
    });
}

/// e^{+i theta Z1 Z2 Z3 Z4} (diagonal).
fn zzzz_evolution(theta: f64) -> Array2<Complex64> {
    let dim = 16;
    let mut u = Array2::zeros((dim, dim));
    for b in 0..dim {
        let zprod = if (b as u32).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        u[(b, b)] = Complex64::from_polar(1.0, theta * zprod);
    }
    u
}

/// Dense unitary of a sequence. Free evolutions need the machine; ideal-gate
/// sequences may pass None.
pub fn sequence_unitary(s: &PulseSequence, m: Option<&NmrMachine>) -> Result<Array2<Complex64>> {
    if s.n_sites > DENSE_LIMIT {
        return Err(Error::Capacity(format!(
            "sequence over {} sites exceeds dense limit",
            s.n_sites
        )));
    }
    let dim = 1usize << s.n_sites;
    let mut u = Array2::eye(dim);
    let machine_diag = m.map(|mm| mm.diagonal());
    for ins in &s.instructions {
        let f = match ins {
            Instruction::Rotation { sites, axis, angle } => {
                rotation_unitary(s.n_sites, sites, *axis, *angle)?
            }
            Instruction::Free { duration } => {
                let diag = machine_diag
                    .as_ref()
                    .ok_or_else(|| Error::Machine("free evolution needs a machine".into()))?;
                let mut f = Array2::zeros((dim, dim));
                for (b, &e) in diag.iter().enumerate() {
                    f[(b, b)] = Complex64::from_polar(1.0, -e * duration);
                }
                f
            }
            Instruction::ZPhase { site, angle } => {
                let mut f = Array2::zeros((dim, dim));
                for b in 0..dim {
                    let z = if b >> (site - 1) & 1 == 0 { 1.0 } else { -1.0 };
                    f[(b, b)] = Complex64::from_polar(1.0, -angle / 2.0 * z);
                }
                f
            }
            Instruction::Ideal { matrix, .. } => matrix.clone(),
        };
        u = f.dot(&u);
    }
    Ok(u)
}

fn rotation_unitary(
    n_sites: usize,
    sites: &[usize],
    axis: Axis,
    angle: f64,
) -> Result<Array2<Complex64>> {
    let dim = 1usize << n_sites;
    let half = angle / 2.0 * axis.sign();
    let c = half.cos();
    let s = half.sin();
    // single-qubit factor: cos(a/2) I - i sin(a/2) sigma
    let mut u = Array2::eye(dim);
    for &site in sites {
        if site < 1 || site > n_sites {
            return Err(Error::Dimension(format!("rotation site {site} out of range")));
        }
        let bit = 1usize << (site - 1);
        let mut f: Array2<Complex64> = Array2::zeros((dim, dim));
        for b in 0..dim {
            f[(b, b)] = Complex64::new(c, 0.0);
            let flipped = b ^ bit;
            if axis.is_x() {
                f[(flipped, b)] = Complex64::new(0.0, -s);
            } else {
                // -i sin * sigma_y: Y|0> = i|1>, Y|1> = -i|0>
                let y = if b & bit == 0 {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, -1.0)
                };
                f[(flipped, b)] = Complex64::new(0.0, -s) * y;
            }
        }
        u = f.dot(&u);
    }
    Ok(u)
}

/// Frobenius distance up to global phase, min_phi ||u - phi v||_F / ||u||_F,
/// with phi = Tr(v' u)/|Tr(v' u)|. Errors when either input is not unitary.
pub fn verify_equivalence(
    u: &Array2<Complex64>,
    v: &Array2<Complex64>,
) -> Result<(f64, Complex64)> {
    if u.dim() != v.dim() {
        return Err(Error::Dimension("verify_equivalence: shape mismatch".into()));
    }
    for (name, m) in [("first", u), ("second", v)] {
        if !is_unitary(m, 1e-9) {
            return Err(Error::Domain(format!("{name} argument is not unitary")));
        }
    }
    let dim = u.nrows();
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            tr += v[(j, i)].conj() * u[(j, i)];
        }
    }
    let norm_u = (dim as f64).sqrt();
    if tr.norm() < 1e-14 {
        return Ok((2.0_f64.sqrt(), Complex64::new(1.0, 0.0)));
    }
    let phi = tr / tr.norm();
    let mut diff = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            diff += (u[(i, j)] - phi * v[(i, j)]).norm_sqr();
        }
    }
    Ok((diff.sqrt() / norm_u, phi))
}

fn is_unitary(m: &Array2<Complex64>, tol: f64) -> bool {
    let dim = m.nrows();
    if m.ncols() != dim {
        return false;
    }
    let mut err: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                s += m[(k, i)].conj() * m[(k, j)];
            }
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((s - target).norm());
        }
    }
    err < tol
}

// ---------------------------------------------------------------------------
// text format
// ---------------------------------------------------------------------------

/// Serialize a machine-form sequence. Floats use the shortest round-trip
/// decimal representation, so parse(emit(s)) reproduces the exact bits.
pub fn emit_sequence(s: &PulseSequence, m: &NmrMachine) -> Result<String> {
    let mut out = String::new();
    out.push_str("PULSESEQ v1\n");
    out.push_str(&format!("NSITES {}\n", s.n_sites));
    for (i, w) in m.omegas_rad_s.iter().enumerate() {
        out.push_str(&format!("OMEGA {} {}\n", i + 1, w));
    }
    for &(a, b, v) in &m.couplings_hz {
        out.push_str(&format!("COUPLING {} {} {}\n", a, b, v));
    }
    out.push_str("BEGIN\n");
    for ins in &s.instructions {
        match ins {
            Instruction::Rotation { sites, axis, angle } => {
                let list: Vec<String> = sites.iter().map(|s| s.to_string()).collect();
                out.push_str(&format!("ROT {} {} {}\n", list.join(","), axis.token(), angle));
            }
            Instruction::Free { duration } => {
                out.push_str(&format!("FREE {}\n", duration));
            }
            Instruction::ZPhase { site, angle } => {
                out.push_str(&format!("ZPHASE {} {}\n", site, angle));
            }
            Instruction::Ideal { label, .. } => {
                return Err(Error::Parse(format!(
                    "ideal unitary '{label}' has no text form; compile to machine instructions first"
                )));
            }
        }
    }
    out.push_str("END\n");
    Ok(out)
}

pub fn parse_sequence(text: &str) -> Result<(PulseSequence, NmrMachine)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty sequence file".into()))?;
    if header.trim() != "PULSESEQ v1" {
        return Err(Error::Parse(format!("bad header '{header}'")));
    }
    let mut n_sites = 0usize;
    let mut omegas: Vec<(usize, f64)> = Vec::new();
    let mut couplings: Vec<(usize, usize, f64)> = Vec::new();
    let mut instructions = Vec::new();
    let mut in_body = false;
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap();
        let rest: Vec<&str> = parts.collect();
        match (tag, in_body) {
            ("NSITES", false) => n_sites = parse_num(rest.first(), "NSITES")? as usize,
            ("OMEGA", false) => {
                let site = parse_num(rest.first(), "OMEGA site")? as usize;
                let val = parse_float(rest.get(1), "OMEGA value")?;
                omegas.push((site, val));
            }
            ("COUPLING", false) => {
                let a = parse_num(rest.first(), "COUPLING a")? as usize;
                let b = parse_num(rest.get(1), "COUPLING b")? as usize;
                let v = parse_float(rest.get(2), "COUPLING value")?;
                couplings.push((a, b, v));
            }
            ("BEGIN", false) => in_body = true,
            ("END", true) => in_body = false,
            ("ROT", true) => {
                let sites: Vec<usize> = rest
                    .first()
                    .ok_or_else(|| Error::Parse("ROT missing sites".into()))?
                    .split(',')
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad ROT site '{t}'")))
                    })
                    .collect::<Result<_>>()?;
                let axis = Axis::from_token(
                    rest.get(1)
                        .ok_or_else(|| Error::Parse("ROT missing axis".into()))?,
                )?;
                let angle = parse_float(rest.get(2), "ROT angle")?;
                instructions.push(Instruction::Rotation { sites, axis, angle });
            }
            ("FREE", true) => {
                let duration = parse_float(rest.first(), "FREE duration")?;
                if duration < 0.0 {
                    return Err(Error::Parse("negative FREE duration".into()));
                }
                instructions.push(Instruction::Free { duration });
            }
            ("ZPHASE", true) => {
                let site = parse_num(rest.first(), "ZPHASE site")? as usize;
                let angle = parse_float(rest.get(1), "ZPHASE angle")?;
                instructions.push(Instruction::ZPhase { site, angle });
            }
            _ => return Err(Error::Parse(format!("unexpected line '{line}'"))),
        }
    }
    if n_sites == 0 {
        return Err(Error::Parse("missing NSITES".into()));
    }
    omegas.sort_by_key(|&(s, _)| s);
    let machine = NmrMachine {
        omegas_rad_s: omegas.into_iter().map(|(_, v)| v).collect(),
        couplings_hz: couplings,
    };
    machine.validate()?;
    Ok((
        PulseSequence {
            n_sites,
            instructions,
        },
        machine,
    ))
}

fn parse_num(t: Option<&&str>, what: &str) -> Result<u64> {
    t.ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what}")))
}

fn parse_float(t: Option<&&str>, what: &str) -> Result<f64> {
    t.ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hamiltonian, Lattice};
    use crate::pauli::materialize;
    use ndarray_linalg::Eigh;
    use ndarray_linalg::UPLO;

    fn test_machine() -> NmrMachine {
        NmrMachine {
            omegas_rad_s: vec![4312.0, -1100.5, 6203.8, -880.2],
            couplings_hz: vec![
                (1, 2, 41.64),
                (1, 3, 69.7),
                (1, 4, -1.46),
                (2, 3, -7.1),
                (2, 4, 3.9),
                (3, 4, 72.4),
            ],
        }
    }

    fn exact_step(j: f64, g: f64, tau: f64) -> Array2<Complex64> {
        let l = Lattice::new(2, 2);
        let h = build_hamiltonian(&l, j, g).unwrap();
        let m = materialize(&h).unwrap();
        let herm = m.mapv(|z| z.re);
        let (vals, vecs) = herm.eigh(UPLO::Lower).unwrap();
        let dim = 16;
        let mut u = Array2::zeros((dim, dim));
        for a in 0..dim {
            for b in 0..dim {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    s += Complex64::from_polar(1.0, -vals[k] * tau) * vecs[(a, k)] * vecs[(b, k)];
                }
                u[(a, b)] = s;
            }
        }
        u
    }

    #[test]
    fn four_body_compiler_is_exact() {
        let m = test_machine();
        for (j, tau) in [(1.0, 0.05), (1.0, 0.0), (-3.0, 0.1), (5.0, 0.02)] {
            let seq = compile_four_body(j, tau, &m).unwrap();
            let u = sequence_unitary(&seq, Some(&m)).unwrap();
            let target = four_body_target(j, tau);
            let (d, _) = verify_equivalence(&target, &u).unwrap();
            assert!(d < 1e-10, "J={j} tau={tau}: distance {d}");
        }
    }

    #[test]
    fn trotter_exact_at_g_zero() {
        let seq = trotter_step(1.3, 0.0, 0.21);
        let u = sequence_unitary(&seq, None).unwrap();
        let exact = exact_step(1.3, 0.0, 0.21);
        let (d, _) = verify_equivalence(&exact, &u).unwrap();
        assert!(d < 1e-12, "distance {d}");
    }

    #[test]
    fn trotter_reduces_to_field_at_j_zero() {
        let seq = trotter_step(0.0, 0.7, 0.3);
        let u = sequence_unitary(&seq, None).unwrap();
        let exact = exact_step(0.0, 0.7, 0.3);
        let (d, _) = verify_equivalence(&exact, &u).unwrap();
        assert!(d < 1e-12, "distance {d}");
    }

    #[test]
    fn trotter_third_order_per_step() {
        let taus = [0.2, 0.1, 0.05, 0.025];
        let mut pts = Vec::new();
        for &tau in &taus {
            let seq = trotter_step(1.0, 1.0, tau);
            let u = sequence_unitary(&seq, None).unwrap();
            let exact = exact_step(1.0, 1.0, tau);
            let (d, _) = verify_equivalence(&exact, &u).unwrap();
            pts.push((tau.ln(), d.ln()));
        }
        let slope = fit_slope(&pts);
        assert!((slope - 3.0).abs() < 0.2, "slope {slope}");
    }

    fn fit_slope(pts: &[(f64, f64)]) -> f64 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }

    #[test]
    fn sequence_roundtrip_is_bit_exact() {
        let m = test_machine();
        let seq = compile_four_body(0.83, 0.037, &m).unwrap();
        let text = emit_sequence(&seq, &m).unwrap();
        let (parsed, pm) = parse_sequence(&text).unwrap();
        let text2 = emit_sequence(&parsed, &pm).unwrap();
        assert_eq!(text, text2);
    }

    #[test]
    fn zero_divisor_rejected() {
        let mut m = test_machine();
        m.couplings_hz.retain(|&(a, b, _)| (a, b) != (1, 3));
        assert!(compile_four_body(1.0, 0.05, &m).is_err());
    }

    #[test]
    fn inverse_sequence_composes_to_identity() {
        let m = test_machine();
        let seq = compile_four_body(2.0, 0.01, &m).unwrap();
        let u = sequence_unitary(&seq, Some(&m)).unwrap();
        let uh = u.t().mapv(|z| z.conj());
        let prod = uh.dot(&u);
        let (d, _) = verify_equivalence(&Array2::eye(16), &prod).unwrap();
        assert!(d < 1e-12);
    }
}
