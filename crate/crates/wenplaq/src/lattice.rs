//! Periodic lattice geometry, plaquette operators, Hamiltonians, Wilson
//! loops, and excitation labeling.
//!
//! Site numbering is a boustrophedon walk: row 0 left-to-right, row 1
//! right-to-left, and so on. On the 2x2 torus this reproduces the canonical
//! numbering 1=(0,0), 2=(1,0), 3=(1,1), 4=(0,1) as internal indices 0..3.
//! A site is "odd" when (x+y) is even — the convention that puts sigma_x on
//! site 1 of the canonical Wilson loop.

use crate::error::{Error, Result};
use crate::pauli::{apply_string, expectation, Letter, OperatorSum, PauliString, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub lx: usize,
    pub ly: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Which topological order supplies the reference plaquette pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// All plaquettes +1 in the ground state (J > 0).
    Z2A,
    /// All plaquettes -1 in the ground state (J < 0).
    Z2B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefectLabel {
    None,
    E,
    M,
}

#[derive(Clone, Debug)]
pub struct PlaquetteRecord {
    pub base: usize,
    pub f_value: f64,
    pub label: DefectLabel,
}

/// Default half-width of the band around the defect sign that earns a label.
pub const DEFECT_TOL: f64 = 0.1;

impl Lattice {
    pub fn new(lx: usize, ly: usize) -> Lattice {
        assert!(lx >= 2 && ly >= 2, "lattice needs at least 2 sites per axis");
        Lattice { lx, ly }
    }

    pub fn n_sites(&self) -> usize {
        self.lx * self.ly
    }

    /// Coordinates wrap modulo (Lx, Ly).
    pub fn site_of(&self, x: isize, y: isize) -> usize {
        let xm = x.rem_euclid(self.lx as isize) as usize;
        let ym = y.rem_euclid(self.ly as isize) as usize;
        if ym % 2 == 0 {
            ym * self.lx + xm
        } else {
            ym * self.lx + (self.lx - 1 - xm)
        }
    }

    pub fn coords_of(&self, site: usize) -> (usize, usize) {
        let y = site / self.lx;
        let r = site % self.lx;
        let x = if y % 2 == 0 { r } else { self.lx - 1 - r };
        (x, y)
    }

    pub fn parity_of(&self, site: usize) -> Parity {
        let (x, y) = self.coords_of(site);
        if (x + y) % 2 == 0 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_sites() {
            return Err(Error::Dimension(format!(
                "site {site} out of range for {}x{} lattice",
                self.lx, self.ly
            )));
        }
        Ok(())
    }

    fn are_neighbors(&self, a: usize, b: usize) -> bool {
        let (ax, ay) = self.coords_of(a);
        let (bx, by) = self.coords_of(b);
        let dx = wrapped_dist(ax, bx, self.lx);
        let dy = wrapped_dist(ay, by, self.ly);
        dx + dy == 1
    }
}

fn wrapped_dist(a: usize, b: usize, l: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(l - d)
}

/// Closed string of nearest-neighbor sites.
#[derive(Clone, Debug)]
pub struct LoopPath {
    pub sites: Vec<usize>,
}

impl LoopPath {
    pub fn new(l: &Lattice, sites: Vec<usize>) -> Result<LoopPath> {
        if sites.len() < 2 {
            return Err(Error::Dimension("loop needs at least 2 sites".into()));
        }
        for &s in &sites {
            l.check_site(s)?;
        }
        for i in 0..sites.len() {
            let a = sites[i];
            let b = sites[(i + 1) % sites.len()];
            if !l.are_neighbors(a, b) {
                return Err(Error::Dimension(format!(
                    "loop sites {a} and {b} are not nearest neighbors"
                )));
            }
        }
        Ok(LoopPath { sites })
    }

    /// The canonical 2x2 loop through all four sites.
    pub fn canonical_2x2(l: &Lattice) -> LoopPath {
        assert_eq!((l.lx, l.ly), (2, 2));
        LoopPath {
            sites: vec![0, 1, 2, 3],
        }
    }
}

/// F_base = sigma_x(i) sigma_y(i+ex) sigma_x(i+ex+ey) sigma_y(i+ey),
/// wrapped periodically. Built as an operator product so coincident sites
/// (on tiny lattices) multiply correctly.
pub fn plaquette_operator(l: &Lattice, base: usize) -> Result<PauliString> {
    l.check_site(base)?;
    let (x, y) = l.coords_of(base);
    let (x, y) = (x as isize, y as isize);
    let corners = [
        (l.site_of(x, y), Letter::X),
        (l.site_of(x + 1, y), Letter::Y),
        (l.site_of(x + 1, y + 1), Letter::X),
        (l.site_of(x, y + 1), Letter::Y),
    ];
    let n = l.n_sites();
    let mut p = PauliString::identity(n);
    for (s, letter) in corners {
        p = p.product(&PauliString::single(n, s, letter))?;
    }
    Ok(p)
}

/// H = -J sum_i F_i - g sum_i sigma_x(i), with coincident plaquette strings
/// merged by coefficient summation (the 2x2 factor of two emerges here).
pub fn build_hamiltonian(l: &Lattice, j: f64, g: f64) -> Result<OperatorSum> {
    let n = l.n_sites();
    let mut terms = Vec::new();
    for base in 0..n {
        terms.push((-j, plaquette_operator(l, base)?));
    }
    for site in 0..n {
        terms.push((-g, PauliString::single(n, site, Letter::X)));
    }
    Ok(OperatorSum::new(terms).merged())
}

/// Wilson loop W(C): product over member sites, letter sigma_x on odd sites
/// and sigma_y on even sites. Orientation-free by construction.
pub fn wilson_loop(l: &Lattice, c: &LoopPath) -> Result<PauliString> {
    let n = l.n_sites();
    let mut p = PauliString::identity(n);
    for &s in &c.sites {
        let letter = match l.parity_of(s) {
            Parity::Odd => Letter::X,
            Parity::Even => Letter::Y,
        };
        p = p.product(&PauliString::single(n, s, letter))?;
    }
    Ok(p)
}

/// Per-plaquette expectation values with defect labels relative to the
/// chosen order's reference pattern. A plaquette is labeled when its value
/// sits within `tol` of the defect sign; e on odd sub-plaquettes, m on even.
pub fn classify_excitations(
    l: &Lattice,
    v: &StateVector,
    order: Order,
    tol: f64,
) -> Result<Vec<PlaquetteRecord>> {
    if v.n_sites != l.n_sites() {
        return Err(Error::Dimension(format!(
            "state has {} sites, lattice has {}",
            v.n_sites,
            l.n_sites()
        )));
    }
    let defect_sign = match order {
        Order::Z2A => -1.0,
        Order::Z2B => 1.0,
    };
    let mut out = Vec::with_capacity(l.n_sites());
    for base in 0..l.n_sites() {
        let f = plaquette_operator(l, base)?;
        let f_value = expectation(&f, v)?;
        let label = if (f_value - defect_sign).abs() < tol {
            match l.parity_of(base) {
                Parity::Odd => DefectLabel::E,
                Parity::Even => DefectLabel::M,
            }
        } else {
            DefectLabel::None
        };
        out.push(PlaquetteRecord {
            base,
            f_value,
            label,
        });
    }
    Ok(out)
}

/// Apply F_base to a state (handy for pumping defect pairs in examples).
pub fn apply_plaquette(l: &Lattice, base: usize, v: &StateVector) -> Result<StateVector> {
    let f = plaquette_operator(l, base)?;
    apply_string(&f, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Phase;

    #[test]
    fn canonical_numbering_2x2() {
        let l = Lattice::new(2, 2);
        assert_eq!(l.site_of(0, 0), 0);
        assert_eq!(l.site_of(1, 0), 1);
        assert_eq!(l.site_of(1, 1), 2);
        assert_eq!(l.site_of(0, 1), 3);
    }

    #[test]
    fn checkerboard_parity() {
        let l = Lattice::new(2, 6);
        let odd = (0..12).filter(|&s| l.parity_of(s) == Parity::Odd).count();
        assert_eq!(odd, 6);
        // site 0 at (0,0) is odd by convention
        assert_eq!(l.parity_of(0), Parity::Odd);
    }

    #[test]
    fn plaquette_at_origin_is_xyxy() {
        let l = Lattice::new(2, 2);
        let f = plaquette_operator(&l, 0).unwrap();
        assert_eq!(f.word(), "XYXY");
        assert_eq!(f.phase, Phase::ONE);
    }

    #[test]
    fn plaquette_at_second_base_is_yxyx() {
        let l = Lattice::new(2, 2);
        let f = plaquette_operator(&l, 1).unwrap();
        assert_eq!(f.word(), "YXYX");
        assert_eq!(f.phase, Phase::ONE);
    }

    #[test]
    fn plaquettes_square_to_identity() {
        let l = Lattice::new(2, 6);
        for base in 0..12 {
            let f = plaquette_operator(&l, base).unwrap();
            let sq = f.product(&f).unwrap();
            assert_eq!(sq.word(), "I".repeat(12));
            assert_eq!(sq.phase, Phase::ONE);
        }
    }

    #[test]
    fn plaquettes_commute_pairwise() {
        let l = Lattice::new(2, 6);
        for a in 0..12 {
            for b in 0..12 {
                let fa = plaquette_operator(&l, a).unwrap();
                let fb = plaquette_operator(&l, b).unwrap();
                assert!(fa.commutes_with(&fb), "plaquettes {a},{b} anticommute");
            }
        }
    }

    #[test]
    fn merged_2x2_hamiltonian() {
        let l = Lattice::new(2, 2);
        let h = build_hamiltonian(&l, 1.5, 0.0).unwrap();
        assert_eq!(h.terms.len(), 2);
        for (c, p) in &h.terms {
            assert!((c + 3.0).abs() < 1e-15, "coefficient {c}");
            assert!(p.word() == "XYXY" || p.word() == "YXYX");
        }
    }

    #[test]
    fn wilson_loop_canonical() {
        let l = Lattice::new(2, 2);
        let c = LoopPath::canonical_2x2(&l);
        let w = wilson_loop(&l, &c).unwrap();
        assert_eq!(w.word(), "XYXY");
        assert_eq!(w.phase, Phase::ONE);
    }

    #[test]
    fn wilson_loop_orientation_free() {
        let l = Lattice::new(2, 2);
        let fwd = wilson_loop(&l, &LoopPath::new(&l, vec![0, 1, 2, 3]).unwrap()).unwrap();
        let rev = wilson_loop(&l, &LoopPath::new(&l, vec![3, 2, 1, 0]).unwrap()).unwrap();
        assert_eq!(fwd, rev);
    }

    #[test]
    fn contractible_loop_matches_plaquette() {
        let l = Lattice::new(2, 6);
        // plaquette with base (0,2): corners (0,2),(1,2),(1,3),(0,3)
        let sites = vec![
            l.site_of(0, 2),
            l.site_of(1, 2),
            l.site_of(1, 3),
            l.site_of(0, 3),
        ];
        let w = wilson_loop(&l, &LoopPath::new(&l, sites).unwrap()).unwrap();
        let f = plaquette_operator(&l, l.site_of(0, 2)).unwrap();
        assert_eq!(w, f);
    }

    #[test]
    fn open_path_rejected() {
        let l = Lattice::new(2, 6);
        assert!(LoopPath::new(&l, vec![0, 1, 6]).is_err());
    }
}
