//! Constant-adiabaticity sweep schedules, midpoint discretization, stepwise
//! evolution, and fidelity tracking on the 2x2 torus.
//!
//! The sweep rate solves dJ/dt = c * r(J) with
//!   r(J) = min_e (eps_e - eps_g)^2 / ||P_e dH/dJ |psi_g>||
//! over excited multiplets with coupling above 1e-12, dH/dJ = -sum_i F_i
//! and P_e the projector onto the multiplet.
//! The curve J(t) comes from a dense cumulative inversion of 1/r on a
//! 2001-point J-grid; c is pinned by bisection so the traversal time is
//! exactly T.

use crate::error::{Error, Result};
use crate::lattice::{plaquette_operator, build_hamiltonian, Lattice, LoopPath};
use crate::observables::{local_order_p_state, wilson_expectation};
use crate::pauli::{apply_sum, OperatorSum, StateVector};
use crate::spectra::dense_spectrum;
use crate::trotter::{sequence_unitary, trotter_step};
use ndarray::Array2;
use num_complex::Complex64;

pub const SCHEDULE_GRID_POINTS: usize = 2001;

#[derive(Clone, Debug)]
pub struct Schedule {
    pub g: f64,
    pub j_start: f64,
    pub j_end: f64,
    pub t_total: f64,
    /// Ordered (t, J(t)) samples spanning [0, T].
    pub samples: Vec<(f64, f64)>,
    pub adiabaticity_c: f64,
}

impl Schedule {
    /// J(t) by linear interpolation of the stored samples.
    pub fn j_at(&self, t: f64) -> f64 {
        let s = &self.samples;
        if t <= s[0].0 {
            return s[0].1;
        }
        if t >= s[s.len() - 1].0 {
            return s[s.len() - 1].1;
        }
        // binary search on the monotone time axis
        let mut lo = 0;
        let mut hi = s.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if s[mid].0 <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (t0, j0) = s[lo];
        let (t1, j1) = s[hi];
        if t1 == t0 {
            return j0;
        }
        j0 + (j1 - j0) * (t - t0) / (t1 - t0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stepper {
    Exact,
    /// Trotter-split steps with this many slices per step.
    Trotter(usize),
}

#[derive(Clone, Debug)]
pub struct StepRecord {
    pub m: usize,
    pub t_m: f64,
    pub j_m: f64,
    pub ground_energy: f64,
    /// |<psi(t_m)|psi_g(J_m)>| after applying step m.
    pub fidelity: f64,
    pub wilson: f64,
    pub local_p: f64,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub steps: Vec<StepRecord>,
    pub final_state: StateVector,
}

impl SweepResult {
    pub fn min_fidelity(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.fidelity)
            .fold(f64::INFINITY, f64::min)
    }
}

/// The allowed-rate profile r(J) on the given grid.
fn rate_profile(l: &Lattice, g: f64, grid: &[f64]) -> Result<Vec<f64>> {
    let n = l.n_sites();
    let mut dhdj_terms = Vec::new();
    for base in 0..n {
        dhdj_terms.push((-1.0, plaquette_operator(l, base)?));
    }
    let dhdj = OperatorSum::new(dhdj_terms).merged();
    let mut rates = Vec::with_capacity(grid.len());
    for &j in grid {
        let h = build_hamiltonian(l, j, g)?;
        let spec = dense_spectrum(&h)?;
        let ground = &spec.states[0];
        let e0 = spec.energies[0];
        let dv = apply_sum(&dhdj, ground)?;
        let mut best = f64::INFINITY;
        // aggregate the coupling over each degenerate multiplet; the per-state
        // split is an artifact of the eigensolver's basis choice
        for group in &spec.degeneracy_groups {
            if group.contains(&0) {
                continue;
            }
            let coupling: f64 = group
                .iter()
                .map(|&k| spec.states[k].inner(&dv).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if coupling > 1e-12 {
                let gap = spec.energies[group[0]] - e0;
                best = best.min(gap * gap / coupling);
            }
        }
        if !best.is_finite() {
            return Err(Error::Domain(format!(
                "no coupled excited state at J={j} (rate unbounded)"
            )));
        }
        rates.push(best);
    }
    Ok(rates)
}

/// Build the constant-adiabaticity schedule between J_start and J_end.
pub fn make_schedule(g: f64, j_start: f64, j_end: f64, t_total: f64) -> Result<Schedule> {
    if g <= 0.0 {
        return Err(Error::Domain(
            "schedule needs g > 0: the gap closes at g = 0".into(),
        ));
    }
    if t_total <= 0.0 {
        return Err(Error::Domain("schedule needs T > 0".into()));
    }
    if j_start == j_end {
        return Err(Error::Domain("schedule needs J_start != J_end".into()));
    }
    let l = Lattice::new(2, 2);
    let npts = SCHEDULE_GRID_POINTS;
    let grid: Vec<f64> = (0..npts)
        .map(|i| j_start + (j_end - j_start) * i as f64 / (npts - 1) as f64)
        .collect();
    let rates = rate_profile(&l, g, &grid)?;

    // cumulative time-per-unit-c: integral of |dJ| / r(J) by trapezoid
    let dj = (grid[1] - grid[0]).abs();
    let mut cum = Vec::with_capacity(npts);
    cum.push(0.0);
    for i in 1..npts {
        let step = 0.5 * (1.0 / rates[i - 1] + 1.0 / rates[i]) * dj;
        cum.push(cum[i - 1] + step);
    }
    let total = cum[npts - 1];

    // traversal time at rate constant c is total/c; bisect c to hit T
    let mut lo = 0.5 * total / t_total;
    let mut hi = 2.0 * total / t_total;
    while total / lo < t_total {
        lo *= 0.5;
    }
    while total / hi > t_total {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total / mid > t_total {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) / hi < 1e-15 {
            break;
        }
    }
    let c = 0.5 * (lo + hi);

    let samples: Vec<(f64, f64)> = cum.iter().zip(&grid).map(|(&s, &j)| (s / c, j)).collect();
    Ok(Schedule {
        g,
        j_start,
        j_end,
        t_total,
        samples,
        adiabaticity_c: c,
    })
}

/// Midpoint-rule discretization: J_m = J((m - 1/2) T / M) for m = 1..M.
pub fn discretize(s: &Schedule, m_steps: usize) -> Result<(Vec<f64>, f64)> {
    if m_steps < 1 {
        return Err(Error::Domain("discretize needs M >= 1".into()));
    }
    let tau = s.t_total / m_steps as f64;
    let js = (1..=m_steps)
        .map(|m| s.j_at((m as f64 - 0.5) * tau))
        .collect();
    Ok((js, tau))
}

/// Apply the discretized sweep to psi0 and record per-step fidelities and
/// observables. The instantaneous ground state at each step is sign-fixed by
/// maximal-overlap continuation with the previous step's ground state.
pub fn evolve(
    l: &Lattice,
    g: f64,
    j_list: &[f64],
    tau: f64,
    psi0: &StateVector,
    stepper: Stepper,
) -> Result<SweepResult> {
    if psi0.n_sites != l.n_sites() {
        return Err(Error::Dimension(format!(
            "initial state has {} sites, lattice has {}",
            psi0.n_sites,
            l.n_sites()
        )));
    }
    if matches!(stepper, Stepper::Trotter(_)) && (l.lx, l.ly) != (2, 2) {
        return Err(Error::Validation(
            "the trotter stepper is only defined on the 2x2 lattice".into(),
        ));
    }
    let is_2x2 = (l.lx, l.ly) == (2, 2);
    let loop_c = if is_2x2 {
        Some(LoopPath::canonical_2x2(l))
    } else {
        None
    };
    let mut psi = psi0.clone();
    let mut prev_ground: Option<StateVector> = None;
    let mut steps = Vec::with_capacity(j_list.len());

    for (idx, &j_m) in j_list.iter().enumerate() {
        let h = build_hamiltonian(l, j_m, g)?;
        let spec = dense_spectrum(&h)?;
        let mut ground = spec.states[0].clone();
        if let Some(prev) = &prev_ground {
            // continuation: align the arbitrary eigenvector sign with the
            // previous step's ground state
            if prev.inner(&ground).re < 0.0 {
                for a in &mut ground.amplitudes {
                    *a = -*a;
                }
            }
        }

        match stepper {
            Stepper::Exact => {
                psi = exact_step(&spec, &psi, tau)?;
            }
            Stepper::Trotter(k) => {
                if k < 1 {
                    return Err(Error::Validation("trotter stepper needs k >= 1 slices".into()));
                }
                let seq = trotter_step(j_m, g, tau / k as f64);
                let u = sequence_unitary(&seq, None)?;
                for _ in 0..k {
                    psi = apply_unitary(&u, &psi)?;
                }
            }
        }
        psi.normalize();

        let fidelity = psi.overlap(&ground);
        let (wilson, local_p) = if let Some(c) = &loop_c {
            (
                wilson_expectation(&psi, l, c)?,
                local_order_p_state(&psi, 0)?,
            )
        } else {
            (f64::NAN, f64::NAN)
        };
        steps.push(StepRecord {
            m: idx + 1,
            t_m: (idx as f64 + 1.0) * tau,
            j_m,
            ground_energy: spec.energies[0],
            fidelity,
            wilson,
            local_p,
        });
        prev_ground = Some(ground);
    }
    Ok(SweepResult {
        steps,
        final_state: psi,
    })
}

/// One exact step e^{-i H tau} |psi> via the precomputed eigendecomposition.
fn exact_step(
    spec: &crate::spectra::EigenResult,
    psi: &StateVector,
    tau: f64,
) -> Result<StateVector> {
    let dim = psi.dim();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (e, v) in spec.energies.iter().zip(&spec.states) {
        let c = v.inner(psi) * Complex64::from_polar(1.0, -e * tau);
        for (o, a) in out.iter_mut().zip(&v.amplitudes) {
            *o += c * a;
        }
    }
    StateVector::from_amplitudes(psi.n_sites, out)
}

fn apply_unitary(u: &Array2<Complex64>, psi: &StateVector) -> Result<StateVector> {
    let dim = psi.dim();
    if u.nrows() != dim {
        return Err(Error::Dimension("unitary/state dimension mismatch".into()));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (i, o) in out.iter_mut().enumerate() {
        for (k, a) in psi.amplitudes.iter().enumerate() {
            *o += u[(i, k)] * a;
        }
    }
    StateVector::from_amplitudes(psi.n_sites, out)
}

/// Run the full operating pipeline: schedule, discretize, evolve from the
/// ground state at J_start.
pub fn run_sweep(
    g: f64,
    j_start: f64,
    j_end: f64,
    t_total: f64,
    m_steps: usize,
    stepper: Stepper,
) -> Result<(Schedule, SweepResult)> {
    let l = Lattice::new(2, 2);
    let schedule = make_schedule(g, j_start, j_end, t_total)?;
    let (j_list, tau) = discretize(&schedule, m_steps)?;
    let h0 = build_hamiltonian(&l, j_start, g)?;
    let psi0 = dense_spectrum(&h0)?.states[0].clone();
    let sweep = evolve(&l, g, &j_list, tau, &psi0, stepper)?;
    Ok((schedule, sweep))
}

/// Minimum fidelity as a function of step count M, sharing one schedule.
pub fn min_fidelity_scan(
    g: f64,
    j_start: f64,
    j_end: f64,
    t_total: f64,
    m_list: &[usize],
) -> Result<Vec<(usize, f64)>> {
    let l = Lattice::new(2, 2);
    let schedule = make_schedule(g, j_start, j_end, t_total)?;
    let h0 = build_hamiltonian(&l, j_start, g)?;
    let psi0 = dense_spectrum(&h0)?.states[0].clone();
    let mut out = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let (j_list, tau) = discretize(&schedule, m)?;
        let sweep = evolve(&l, g, &j_list, tau, &psi0, Stepper::Exact)?;
        out.push((m, sweep.min_fidelity()));
    }
    Ok(out)
}
