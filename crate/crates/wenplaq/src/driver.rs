//! Run configuration, scan orchestration, and file emission for the CLI.
//!
//! Every command is deterministic given its configuration (seeds included):
//! repeated runs produce byte-identical CSV files. Numeric CSV fields use 12
//! significant digits; plots are written after their data files so an SVG
//! failure can never corrupt a CSV.

use crate::adiabatic::{discretize, evolve, run_sweep, Stepper};
use crate::error::{Error, Result};
use crate::lattice::{build_hamiltonian, Lattice, LoopPath};
use crate::observables::{
    concurrence, local_order_p_state, reduced_density, spin_correlations, wilson_expectation,
    DensityMatrix,
};
use crate::pauli::Letter;
use crate::spectra::dense_spectrum;
use crate::tomography::{emit_record, reconstruct, synth_measure, tomography_report};
use crate::trotter::{
    compile_four_body, emit_sequence, four_body_target, sequence_unitary, trotter_step,
    verify_equivalence, Instruction, NmrMachine, PulseSequence,
};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Sample machine bundled for `compile` runs without a machine file. The
/// numbers are generic four-spin values chosen to exercise every coupling;
/// they do not describe any particular molecule.
pub const SAMPLE_MACHINE_JSON: &str = include_str!("../machines/sample_machine.json");

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub lx: usize,
    pub ly: usize,
    /// Field values for `scan`.
    pub g_list: Vec<f64>,
    /// Field value for single-g commands.
    pub g: f64,
    pub j_min: f64,
    pub j_max: f64,
    pub j_points: usize,
    /// Coupling for `compile` and `tomo`.
    pub j: f64,
    pub t_total: f64,
    pub m_steps: usize,
    pub stepper: String,
    pub slices: usize,
    pub tau: f64,
    pub machine: Option<PathBuf>,
    pub sigma: f64,
    pub seed: u64,
    /// Monte Carlo repetitions for `tomo`.
    pub n_seeds: usize,
    /// J/g ratios for `correlate` rows.
    pub ratios: Vec<f64>,
    /// Step counts for the optional M-scan in `sweep` (empty disables it).
    pub m_scan: Vec<usize>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lx: 2,
            ly: 2,
            g_list: vec![1.0, 5.0, 20.0],
            g: 1.0,
            j_min: -20.0,
            j_max: 20.0,
            j_points: 81,
            j: 1.0,
            t_total: 6.5684,
            m_steps: 31,
            stepper: "exact".into(),
            slices: 4,
            tau: 0.05,
            machine: None,
            sigma: 0.05,
            seed: 0,
            n_seeds: 100,
            ratios: vec![0.0, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0],
            m_scan: vec![],
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn stepper(&self) -> Result<Stepper> {
        match self.stepper.as_str() {
            "exact" => Ok(Stepper::Exact),
            "trotter" => Ok(Stepper::Trotter(self.slices)),
            other => Err(Error::Validation(format!(
                "unknown stepper '{other}' (expected exact|trotter)"
            ))),
        }
    }

    pub fn machine(&self) -> Result<NmrMachine> {
        match &self.machine {
            Some(path) => NmrMachine::from_json_file(path),
            None => {
                let m: NmrMachine = serde_json::from_str(SAMPLE_MACHINE_JSON)?;
                m.validate()?;
                Ok(m)
            }
        }
    }

    fn j_grid(&self) -> Result<Vec<f64>> {
        if self.j_points < 2 {
            return Err(Error::Validation("j_points must be at least 2".into()));
        }
        if !(self.j_min < self.j_max) {
            return Err(Error::Validation("j_min must be below j_max".into()));
        }
        let n = self.j_points;
        Ok((0..n)
            .map(|i| self.j_min + (self.j_max - self.j_min) * i as f64 / (n - 1) as f64)
            .collect())
    }

    fn ensure_out(&self) -> Result<()> {
        fs::create_dir_all(&self.out)?;
        Ok(())
    }
}

/// 12 significant digits, locale-free.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000e0".into();
    }
    format!("{x:.11e}")
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

/// Ground-state observables over the J grid for each g: Wilson loop, local
/// order parameter, and pairwise concurrences, one CSV per g plus an SVG
/// overlay against the closed-form curves.
pub fn cmd_scan(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.ensure_out()?;
    let l = Lattice::new(2, 2);
    let c = LoopPath::canonical_2x2(&l);
    let grid = cfg.j_grid()?;
    let pairs = [(1usize, 3usize), (2, 4), (1, 2), (1, 4), (2, 3), (3, 4)];
    let mut files = Vec::new();
    let mut svg_series = Vec::new();

    for &g in &cfg.g_list {
        if g <= 0.0 {
            return Err(Error::Validation(format!("scan needs g > 0, got {g}")));
        }
        let mut csv = String::new();
        csv.push_str("# wenplaq scan v1: 2x2 ground-state observables\n");
        csv.push_str("j,energy,wilson,local_p,c13,c24,c12,c14,c23,c34\n");
        let mut wilson_curve = Vec::new();
        let mut p_curve = Vec::new();
        for &j in &grid {
            let h = build_hamiltonian(&l, j, g)?;
            let spec = dense_spectrum(&h)?;
            let v = &spec.states[0];
            let w = wilson_expectation(v, &l, &c)?;
            let p = local_order_p_state(v, 0)?;
            let rho = DensityMatrix::from_state(v);
            let mut row = format!(
                "{},{},{},{}",
                fmt12(j),
                fmt12(spec.energies[0]),
                fmt12(w),
                fmt12(p)
            );
            for (a, b) in pairs {
                let cc = concurrence(&reduced_density(&rho, &[a - 1, b - 1])?)?;
                let _ = write!(row, ",{}", fmt12(cc));
            }
            csv.push_str(&row);
            csv.push('\n');
            wilson_curve.push((j, w));
            p_curve.push((j, p));
        }
        let path = cfg.out.join(format!("scan_g{g}.csv"));
        write_file(&path, &csv)?;
        files.push(path);
        svg_series.push((g, wilson_curve, p_curve));
    }

    // overlay plot, written last
    let mut series: Vec<(String, Vec<(f64, f64)>, &str)> = Vec::new();
    for (g, w, p) in &svg_series {
        series.push((format!("W g={g}"), w.clone(), "#c0392b"));
        series.push((format!("P g={g}"), p.clone(), "#2980b9"));
        let analytic_w: Vec<(f64, f64)> = grid
            .iter()
            .map(|&j| (j, j / (g * g + j * j).sqrt()))
            .collect();
        series.push((format!("W analytic g={g}"), analytic_w, "#e67e22"));
    }
    let svg_path = cfg.out.join("scan.svg");
    write_file(&svg_path, &line_plot_svg("Wilson loop and local order vs J", &series))?;
    files.push(svg_path);
    Ok(files)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.ensure_out()?;
    if cfg.g <= 0.0 {
        return Err(Error::Validation("sweep needs g > 0".into()));
    }
    let stepper = cfg.stepper()?;
    let (schedule, sweep) = run_sweep(
        cfg.g,
        cfg.j_min,
        cfg.j_max,
        cfg.t_total,
        cfg.m_steps,
        stepper,
    )?;

    let mut csv = String::new();
    csv.push_str("# wenplaq sweep v1: per-step adiabatic passage record\n");
    csv.push_str("m,t_m,j_m,fidelity,wilson,local_p,energy\n");
    for s in &sweep.steps {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            s.m,
            fmt12(s.t_m),
            fmt12(s.j_m),
            fmt12(s.fidelity),
            fmt12(s.wilson),
            fmt12(s.local_p),
            fmt12(s.ground_energy)
        );
    }
    let _ = writeln!(
        csv,
        "# summary: F_min = {} (c = {})",
        fmt12(sweep.min_fidelity()),
        fmt12(schedule.adiabaticity_c)
    );
    let path = cfg.out.join("sweep.csv");
    write_file(&path, &csv)?;
    println!("F_min = {}", fmt12(sweep.min_fidelity()));
    let mut files = vec![path];

    if !cfg.m_scan.is_empty() {
        let l = Lattice::new(2, 2);
        let h0 = build_hamiltonian(&l, cfg.j_min, cfg.g)?;
        let psi0 = dense_spectrum(&h0)?.states[0].clone();
        let mut csv = String::new();
        csv.push_str("# wenplaq sweep m-scan v1\n");
        csv.push_str("m_steps,f_min\n");
        for &m in &cfg.m_scan {
            let (j_list, tau) = discretize(&schedule, m)?;
            let r = evolve(&l, cfg.g, &j_list, tau, &psi0, Stepper::Exact)?;
            let _ = writeln!(csv, "{},{}", m, fmt12(r.min_fidelity()));
        }
        let path = cfg.out.join("sweep_mscan.csv");
        write_file(&path, &csv)?;
        files.push(path);
    }
    Ok(files)
}

// ---------------------------------------------------------------------------
// correlate
// ---------------------------------------------------------------------------

/// Ground-state x-correlators from site 1 to every site for a grid of J/g
/// ratios (g fixed at 1, J = ratio).
pub fn cmd_correlate(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.ensure_out()?;
    let l = Lattice::new(cfg.lx.max(2), cfg.ly.max(2));
    if l.n_sites() > crate::pauli::DENSE_LIMIT {
        return Err(Error::Capacity(format!(
            "correlate lattice {}x{} exceeds {} sites",
            l.lx,
            l.ly,
            crate::pauli::DENSE_LIMIT
        )));
    }
    let mut csv = String::new();
    csv.push_str("# wenplaq correlate v1: <sx_1 sx_k> on the ground state\n");
    csv.push_str("j_over_g,k,raw,connected,degenerate_manifold\n");
    let mut heat = Vec::new();
    for &ratio in &cfg.ratios {
        let table = spin_correlations(&l, ratio, 1.0, Letter::X)?;
        let mut row = Vec::new();
        for k in 0..l.n_sites() {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                fmt12(ratio),
                k + 1,
                fmt12(table.raw[(0, k)]),
                fmt12(table.connected[(0, k)]),
                table.degenerate_manifold as u8
            );
            row.push(table.raw[(0, k)]);
        }
        heat.push((ratio, row));
    }
    let path = cfg.out.join("correlate.csv");
    write_file(&path, &csv)?;
    let svg_path = cfg.out.join("correlate.svg");
    write_file(&svg_path, &heatmap_svg("raw <sx_1 sx_k> by J/g", &heat))?;
    Ok(vec![path, svg_path])
}

// ---------------------------------------------------------------------------
// compile
// ---------------------------------------------------------------------------

/// Machine-form Trotter step: half-field rotations around the exactly
/// compiled four-body cores. The cores conjugate e^{+i 2 J tau ZZZZ}
/// (compiled with J -> -J) into the two plaquette-word evolutions.
pub fn machine_form_step(j: f64, g: f64, tau: f64, m: &NmrMachine) -> Result<PulseSequence> {
    use crate::trotter::Axis;
    let mut ins: Vec<Instruction> = Vec::new();
    let half_field = Instruction::Rotation {
        sites: vec![1, 2, 3, 4],
        axis: Axis::X,
        angle: -g * tau,
    };
    ins.push(half_field.clone());
    for (y_sites, x_sites) in [(vec![1, 3], vec![2, 4]), (vec![2, 4], vec![1, 3])] {
        ins.push(Instruction::Rotation {
            sites: y_sites.clone(),
            axis: Axis::Y,
            angle: std::f64::consts::FRAC_PI_2,
        });
        ins.push(Instruction::Rotation {
            sites: x_sites.clone(),
            axis: Axis::X,
            angle: std::f64::consts::FRAC_PI_2,
        });
        ins.extend(compile_four_body(-j, tau, m)?.instructions);
        ins.push(Instruction::Rotation {
            sites: x_sites,
            axis: Axis::X,
            angle: -std::f64::consts::FRAC_PI_2,
        });
        ins.push(Instruction::Rotation {
            sites: y_sites,
            axis: Axis::Y,
            angle: -std::f64::consts::FRAC_PI_2,
        });
    }
    ins.push(half_field);
    Ok(PulseSequence {
        n_sites: 4,
        instructions: ins,
    })
}

pub struct CompileOutcome {
    pub files: Vec<PathBuf>,
    /// Distance of the compiled four-body core to its exact target.
    pub core_distance: f64,
    /// Distance of the full machine-form step to the ideal-gate step (both
    /// carry the same Trotter splitting, so this too should be ~0).
    pub step_distance: f64,
    pub pass: bool,
}

pub const COMPILE_THRESHOLD: f64 = 1e-8;

pub fn cmd_compile(cfg: &RunConfig) -> Result<CompileOutcome> {
    cfg.ensure_out()?;
    let machine = cfg.machine()?;
    if machine.n_sites() != 4 {
        return Err(Error::Machine(format!(
            "compile needs a 4-site machine, got {}",
            machine.n_sites()
        )));
    }
    // the three couplings used as divisors must exist up front
    for (a, b) in [(1, 2), (3, 4), (1, 3)] {
        machine.coupling_nonzero(a, b)?;
    }

    // four-body core: the exactness claim under test
    let core = compile_four_body(cfg.j, cfg.tau, &machine)?;
    let core_u = sequence_unitary(&core, Some(&machine))?;
    let (core_distance, _) = verify_equivalence(&four_body_target(cfg.j, cfg.tau), &core_u)?;

    // full machine-form step: carries the usual Trotter error on top
    let step = machine_form_step(cfg.j, cfg.g, cfg.tau, &machine)?;
    let step_u = sequence_unitary(&step, Some(&machine))?;
    let ideal = sequence_unitary(&trotter_step(cfg.j, cfg.g, cfg.tau), None)?;
    let (step_vs_ideal, _) = verify_equivalence(&ideal, &step_u)?;

    let core_path = cfg.out.join("four_body.pulse");
    write_file(&core_path, &emit_sequence(&core, &machine)?)?;
    let step_path = cfg.out.join("trotter_step.pulse");
    write_file(&step_path, &emit_sequence(&step, &machine)?)?;

    let pass = core_distance <= COMPILE_THRESHOLD && step_vs_ideal <= COMPILE_THRESHOLD;
    let mut report = String::new();
    let _ = writeln!(report, "# wenplaq compile report v1");
    let _ = writeln!(report, "j {}", fmt12(cfg.j));
    let _ = writeln!(report, "g {}", fmt12(cfg.g));
    let _ = writeln!(report, "tau {}", fmt12(cfg.tau));
    let _ = writeln!(report, "four_body_distance {}", fmt12(core_distance));
    let _ = writeln!(report, "step_vs_ideal_distance {}", fmt12(step_vs_ideal));
    let _ = writeln!(report, "threshold {}", fmt12(COMPILE_THRESHOLD));
    let _ = writeln!(report, "pass {}", pass);
    let report_path = cfg.out.join("compile_report.txt");
    write_file(&report_path, &report)?;

    println!(
        "four-body distance {} | step-vs-ideal distance {} | {}",
        fmt12(core_distance),
        fmt12(step_vs_ideal),
        if pass { "PASS" } else { "FAIL" }
    );
    if !pass {
        return Err(Error::Verification(
            core_distance.max(step_vs_ideal),
            COMPILE_THRESHOLD,
        ));
    }
    Ok(CompileOutcome {
        files: vec![core_path, step_path, report_path],
        core_distance,
        step_distance: step_vs_ideal,
        pass,
    })
}

// ---------------------------------------------------------------------------
// tomo
// ---------------------------------------------------------------------------

pub fn cmd_tomo(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.ensure_out()?;
    if cfg.g <= 0.0 {
        return Err(Error::Validation("tomo needs g > 0".into()));
    }
    let l = Lattice::new(2, 2);
    let h = build_hamiltonian(&l, cfg.j, cfg.g)?;
    let v = dense_spectrum(&h)?.states[0].clone();
    let rho_true = DensityMatrix::from_state(&v);

    // one full record at the base seed, serialized for inspection
    let rec = synth_measure(&rho_true, cfg.sigma, cfg.seed)?;
    let rec_path = cfg.out.join("record.txt");
    write_file(&rec_path, &emit_record(&rec))?;

    let (_, projected) = reconstruct(&rec)?;
    let mut re_csv = String::from("# wenplaq tomo v1: reconstructed density matrix, real part\n");
    let mut im_csv = String::from("# wenplaq tomo v1: reconstructed density matrix, imaginary part\n");
    for i in 0..projected.dim() {
        let re_row: Vec<String> = (0..projected.dim())
            .map(|j| fmt12(projected.matrix[(i, j)].re))
            .collect();
        let im_row: Vec<String> = (0..projected.dim())
            .map(|j| fmt12(projected.matrix[(i, j)].im))
            .collect();
        re_csv.push_str(&re_row.join(","));
        re_csv.push('\n');
        im_csv.push_str(&im_row.join(","));
        im_csv.push('\n');
    }
    let re_path = cfg.out.join("rho_real.csv");
    let im_path = cfg.out.join("rho_imag.csv");
    write_file(&re_path, &re_csv)?;
    write_file(&im_path, &im_csv)?;

    // Monte Carlo over seeds
    let mut csv = String::from("# wenplaq tomo v1: per-seed reconstruction report\n");
    csv.push_str("seed,fidelity,wilson_rec,local_p_rec,c13,c24\n");
    let mut mean_f = 0.0;
    for k in 0..cfg.n_seeds {
        let seed = cfg.seed + k as u64;
        let rec = synth_measure(&rho_true, cfg.sigma, seed)?;
        let (_, proj) = reconstruct(&rec)?;
        let report = tomography_report(&rho_true, &proj)?;
        let c13 = report
            .concurrences
            .iter()
            .find(|(p, _, _)| *p == (1, 3))
            .map(|(_, _, cr)| *cr)
            .unwrap();
        let c24 = report
            .concurrences
            .iter()
            .find(|(p, _, _)| *p == (2, 4))
            .map(|(_, _, cr)| *cr)
            .unwrap();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            seed,
            fmt12(report.fidelity),
            fmt12(report.wilson_rec),
            fmt12(report.p_rec),
            fmt12(c13),
            fmt12(c24)
        );
        mean_f += report.fidelity;
    }
    mean_f /= cfg.n_seeds.max(1) as f64;
    let _ = writeln!(csv, "# mean_fidelity {}", fmt12(mean_f));
    let path = cfg.out.join("tomo_report.csv");
    write_file(&path, &csv)?;
    println!("mean reconstruction fidelity {}", fmt12(mean_f));
    Ok(vec![rec_path, re_path, im_path, path])
}

// ---------------------------------------------------------------------------
// SVG helpers
// ---------------------------------------------------------------------------

const W: f64 = 860.0;
const H: f64 = 560.0;
const MARGIN: f64 = 60.0;

fn line_plot_svg(title: &str, series: &[(String, Vec<(f64, f64)>, &str)]) -> String {
    let pts: Vec<(f64, f64)> = series.iter().flat_map(|(_, s, _)| s.iter().copied()).collect();
    let (x0, x1) = bounds(pts.iter().map(|p| p.0));
    let (y0, y1) = bounds(pts.iter().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0).max(1e-300) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0).max(1e-300) * (H - 2.0 * MARGIN);
    let mut svg = svg_open(title);
    for (i, (label, s, color)) in series.iter().enumerate() {
        let path: Vec<String> = s.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let dash = if label.contains("analytic") { " stroke-dasharray=\"6,4\"" } else { "" };
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash} points=\"{}\"/>",
            path.join(" ")
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{label}</text>",
            W - MARGIN - 160.0,
            MARGIN + 16.0 * i as f64
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn heatmap_svg(title: &str, rows: &[(f64, Vec<f64>)]) -> String {
    let mut svg = svg_open(title);
    if rows.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let ncols = rows[0].1.len();
    let cw = (W - 2.0 * MARGIN) / ncols as f64;
    let ch = (H - 2.0 * MARGIN) / rows.len() as f64;
    for (r, (ratio, vals)) in rows.iter().enumerate() {
        for (cix, &v) in vals.iter().enumerate() {
            let x = MARGIN + cix as f64 * cw;
            let y = MARGIN + r as f64 * ch;
            let t = ((v + 1.0) / 2.0).clamp(0.0, 1.0);
            let red = (255.0 * t) as u8;
            let blue = (255.0 * (1.0 - t)) as u8;
            let _ = writeln!(
                svg,
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{cw:.1}\" height=\"{ch:.1}\" fill=\"rgb({red},80,{blue})\"/>"
            );
        }
        let _ = writeln!(
            svg,
            "<text x=\"6\" y=\"{:.1}\" font-size=\"11\">J/g={ratio}</text>",
            MARGIN + r as f64 * ch + ch / 2.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-size=\"15\">{title}</text>\n",
        MARGIN
    )
}

fn bounds(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}
