//! Reduced states, Pauli-normalized magnetization and two-site correlators,
//! and logarithmic negativity of two-qubit states.
//!
//! Reduced-state ordering: the first kept site is the most significant
//! (left-most) tensor factor.

use faer::{c64, Mat, Side};
use serde::{Deserialize, Serialize};

use crate::dynamics::{DensityMatrix, PSD_TOL};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::pauli::{Pauli, PauliString};

/// Partial-transpose eigenvalues above `-NEGATIVITY_FLOOR` count as zero.
pub const NEGATIVITY_FLOOR: f64 = 1e-13;

pub(crate) fn validate_keep(keep: &[usize], n_sites: usize) -> Result<()> {
    if keep.is_empty() {
        return Err(Error::InvalidSites("keep set is empty".into()));
    }
    for (k, &s) in keep.iter().enumerate() {
        if s >= n_sites {
            return Err(Error::InvalidSites(format!("site {s} out of range 0..{n_sites}")));
        }
        if keep[..k].contains(&s) {
            return Err(Error::InvalidSites(format!("site {s} listed twice")));
        }
    }
    Ok(())
}

fn n_sites_of(dim: usize) -> Result<usize> {
    if !dim.is_power_of_two() {
        return Err(Error::InvalidSites(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

pub fn partial_trace(rho: &DensityMatrix, keep_sites: &[usize]) -> Result<DensityMatrix> {
    let n_sites = n_sites_of(rho.dim())?;
    validate_keep(keep_sites, n_sites)?;
    let k = keep_sites.len();
    let keep_mask: usize = keep_sites.iter().map(|s| 1usize << s).sum();
    let env_sites: Vec<usize> = (0..n_sites).filter(|s| keep_mask & (1 << s) == 0).collect();

    // embed a reduced index (first kept site most significant) into a full one
    let embed_keep = |idx: usize| -> usize {
        keep_sites
            .iter()
            .enumerate()
            .map(|(pos, &site)| ((idx >> (k - 1 - pos)) & 1) << site)
            .sum()
    };
    let embed_env = |idx: usize| -> usize {
        env_sites
            .iter()
            .enumerate()
            .map(|(pos, &site)| ((idx >> pos) & 1) << site)
            .sum()
    };
    let dk = 1usize << k;
    let keep_full: Vec<usize> = (0..dk).map(embed_keep).collect();
    let m = rho.matrix();
    let mut out = Mat::<c64>::zeros(dk, dk);
    for e in 0..(1usize << env_sites.len()) {
        let env = embed_env(e);
        for c in 0..dk {
            for r in 0..dk {
                out[(r, c)] += m[(keep_full[r] | env, keep_full[c] | env)];
            }
        }
    }
    Ok(DensityMatrix::new_unchecked(out))
}

/// Every Pauli string supported on `keep`, labelled by its per-site factors
/// in `keep` order. Identity comes first.
pub fn pauli_strings_on(keep: &[usize]) -> Vec<(Vec<Pauli>, PauliString)> {
    let mut labels: Vec<Vec<Pauli>> = vec![Vec::new()];
    for _ in keep {
        labels = labels
            .into_iter()
            .flat_map(|label| {
                Pauli::ALL.into_iter().map(move |p| {
                    let mut l = label.clone();
                    l.push(p);
                    l
                })
            })
            .collect();
    }
    labels
        .into_iter()
        .map(|label| {
            let string = PauliString::new(keep.iter().copied().zip(label.iter().copied()));
            (label, string)
        })
        .collect()
}

/// `ρ = 2^{-k} Σ_P ⟨P⟩ P` on `k` qubits.
pub fn reduced_from_pauli_expectations(labels: &[Vec<Pauli>], expectations: &[f64]) -> DensityMatrix {
    assert_eq!(labels.len(), expectations.len());
    let k = labels.first().map_or(0, |l| l.len());
    let d = 1usize << k;
    let mut out = Mat::<c64>::zeros(d, d);
    for (label, &value) in labels.iter().zip(expectations) {
        if value == 0.0 {
            continue;
        }
        let mats: Vec<[[c64; 2]; 2]> = label.iter().map(|p| p.matrix()).collect();
        for r in 0..d {
            for c in 0..d {
                let mut entry = c64::new(value, 0.0);
                for (pos, m) in mats.iter().enumerate() {
                    let shift = k - 1 - pos;
                    entry *= m[(r >> shift) & 1][(c >> shift) & 1];
                }
                out[(r, c)] += entry;
            }
        }
    }
    let norm = 1.0 / d as f64;
    DensityMatrix::new_unchecked(Mat::from_fn(d, d, |r, c| out[(r, c)] * norm))
}

/// Magnetization and nearest-neighbour correlators, all as `tr(ρ σ ⊗ σ)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSet {
    pub m_z: f64,
    pub t_xx: f64,
    pub t_yy: f64,
    pub t_zz: f64,
    pub t_xy: f64,
    pub t_yx: f64,
    pub t_xz: f64,
    pub t_yz: f64,
}

impl CorrelatorSet {
    pub fn diagonal(m_z: f64, t_xx: f64, t_yy: f64, t_zz: f64) -> Self {
        CorrelatorSet {
            m_z,
            t_xx,
            t_yy,
            t_zz,
            ..Default::default()
        }
    }

    pub fn max_off_diagonal(&self) -> f64 {
        [self.t_xy, self.t_yx, self.t_xz, self.t_yz]
            .iter()
            .fold(0.0, |a, v| a.max(v.abs()))
    }

    fn entries(&self) -> [f64; 8] {
        [
            self.m_z, self.t_xx, self.t_yy, self.t_zz, self.t_xy, self.t_yx, self.t_xz, self.t_yz,
        ]
    }

    pub fn in_range(&self) -> bool {
        self.entries().iter().all(|v| v.abs() <= 1.0 + 1e-9)
    }
}

/// Correlators of the nearest-neighbour pair `(i, j)` in a full lattice state;
/// `m_z` is the mean of the two single-site magnetizations.
pub fn correlators(rho_full: &DensityMatrix, lattice: &Lattice, pair: (usize, usize)) -> Result<CorrelatorSet> {
    let (i, j) = pair;
    if rho_full.dim() != 1usize << lattice.n_sites {
        return Err(Error::DimensionMismatch {
            expected: 1 << lattice.n_sites,
            found: rho_full.dim(),
        });
    }
    if !lattice.is_bond(i, j) {
        return Err(Error::NotABond(i, j));
    }
    let ev = |s: PauliString| s.expectation(rho_full.as_ref()).re;
    let t = |a: Pauli, b: Pauli| ev(PauliString::pair(i, a, j, b));
    Ok(CorrelatorSet {
        m_z: 0.5 * (ev(PauliString::single(i, Pauli::Z)) + ev(PauliString::single(j, Pauli::Z))),
        t_xx: t(Pauli::X, Pauli::X),
        t_yy: t(Pauli::Y, Pauli::Y),
        t_zz: t(Pauli::Z, Pauli::Z),
        t_xy: t(Pauli::X, Pauli::Y),
        t_yx: t(Pauli::Y, Pauli::X),
        t_xz: t(Pauli::X, Pauli::Z),
        t_yz: t(Pauli::Y, Pauli::Z),
    })
}

/// A validated 4×4 two-qubit state.
#[derive(Clone, Debug)]
pub struct TwoSiteState(DensityMatrix);

impl TwoSiteState {
    pub fn new(rho: DensityMatrix) -> Result<Self> {
        if rho.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: rho.dim(),
            });
        }
        rho.check()?;
        Ok(TwoSiteState(rho))
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.0
    }

    pub fn correlators(&self) -> CorrelatorSet {
        let ev = |a: Pauli, b: Pauli| {
            // site 1 (first factor) is bit 1 of the 4×4 index
            PauliString::pair(1, a, 0, b).expectation(self.0.as_ref()).re
        };
        CorrelatorSet {
            m_z: 0.5 * (ev(Pauli::Z, Pauli::I) + ev(Pauli::I, Pauli::Z)),
            t_xx: ev(Pauli::X, Pauli::X),
            t_yy: ev(Pauli::Y, Pauli::Y),
            t_zz: ev(Pauli::Z, Pauli::Z),
            t_xy: ev(Pauli::X, Pauli::Y),
            t_yx: ev(Pauli::Y, Pauli::X),
            t_xz: ev(Pauli::X, Pauli::Z),
            t_yz: ev(Pauli::Y, Pauli::Z),
        }
    }
}

/// `ρ = ¼[I⊗I + M(σᶻ⊗I + I⊗σᶻ) + Σ Tⁱʲ σⁱ⊗σʲ]`.
///
/// Eigenvalues in `[-1e-9, 0)` are clipped and the state renormalized;
/// anything more negative is rejected.
pub fn two_site_from_correlators(set: &CorrelatorSet) -> Result<TwoSiteState> {
    use Pauli::*;
    let terms: [(Pauli, Pauli, f64); 10] = [
        (I, I, 1.0),
        (Z, I, set.m_z),
        (I, Z, set.m_z),
        (X, X, set.t_xx),
        (Y, Y, set.t_yy),
        (Z, Z, set.t_zz),
        (X, Y, set.t_xy),
        (Y, X, set.t_yx),
        (X, Z, set.t_xz),
        (Y, Z, set.t_yz),
    ];
    let labels: Vec<Vec<Pauli>> = terms.iter().map(|&(a, b, _)| vec![a, b]).collect();
    let values: Vec<f64> = terms.iter().map(|t| t.2).collect();
    let rho = reduced_from_pauli_expectations(&labels, &values);
    clip_to_physical(rho).map(TwoSiteState)
}

fn clip_to_physical(rho: DensityMatrix) -> Result<DensityMatrix> {
    let evd = rho
        .matrix()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::Eigensolver)?;
    let s: Vec<f64> = evd.S().column_vector().iter().map(|z| z.re).collect();
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOL {
        return Err(Error::Unphysical { min_eigenvalue: min });
    }
    if min >= 0.0 {
        return Ok(rho);
    }
    let clipped: Vec<f64> = s.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let u = evd.U();
    let n = rho.dim();
    let m = Mat::<c64>::from_fn(n, n, |r, c| {
        (0..n)
            .map(|k| u[(r, k)] * u[(c, k)].conj() * (clipped[k] / total))
            .sum()
    });
    Ok(DensityMatrix::new_unchecked(m))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementValue {
    /// Logarithmic negativity in ebits.
    pub e_n: f64,
    pub negativity: f64,
}

impl EntanglementValue {
    pub fn from_negativity(negativity: f64) -> Self {
        EntanglementValue {
            e_n: (2.0 * negativity + 1.0).log2(),
            negativity,
        }
    }
}

/// Partial transpose over the first (most significant) qubit of a 4×4 matrix.
pub fn partial_transpose_first(rho: &Mat<c64>) -> Mat<c64> {
    Mat::from_fn(4, 4, |r, c| {
        let (ra, rb) = (r >> 1, r & 1);
        let (ca, cb) = (c >> 1, c & 1);
        rho[((ca << 1) | rb, (ra << 1) | cb)]
    })
}

pub fn partial_transpose_spectrum(rho: &DensityMatrix) -> Vec<f64> {
    let pt = partial_transpose_first(rho.matrix());
    let mut e = pt
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("4x4 Hermitian eigensolver converges");
    e.sort_by(f64::total_cmp);
    e
}

pub fn logarithmic_negativity(rho2: &TwoSiteState) -> EntanglementValue {
    negativity_of(rho2.density())
}

/// Logarithmic negativity of any 4×4 density matrix, without the physicality
/// check that [`TwoSiteState`] performs.
pub fn negativity_of(rho: &DensityMatrix) -> EntanglementValue {
    let spectrum = partial_transpose_spectrum(rho);
    let negative: Vec<f64> = spectrum.iter().copied().filter(|&x| x < -NEGATIVITY_FLOOR).collect();
    assert!(
        negative.len() <= 1,
        "two-qubit partial transpose with {} negative eigenvalues: {spectrum:?}",
        negative.len()
    );
    EntanglementValue::from_negativity(-negative.iter().sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, Geometry};

    fn bell_phi_plus() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = c64::new(0.0, 0.0);
        DensityMatrix::pure(&[c64::new(s, 0.0), z, z, c64::new(s, 0.0)]).unwrap()
    }

    fn singlet() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = c64::new(0.0, 0.0);
        DensityMatrix::pure(&[z, c64::new(s, 0.0), c64::new(-s, 0.0), z]).unwrap()
    }

    fn kron(a: &Mat<c64>, b: &Mat<c64>) -> Mat<c64> {
        let (na, nb) = (a.nrows(), b.nrows());
        Mat::from_fn(na * nb, na * nb, |r, c| a[(r / nb, c / nb)] * b[(r % nb, c % nb)])
    }

    #[test]
    fn trace_out_product_state() {
        let a = DensityMatrix::pure(&[c64::new(0.6, 0.0), c64::new(0.0, 0.8)]).unwrap();
        let b = DensityMatrix::maximally_mixed(2);
        // site 1 is the most significant bit of a 2-site index
        let ab = DensityMatrix::new(kron(a.matrix(), b.matrix())).unwrap();
        let kept = partial_trace(&ab, &[1]).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert!((kept.matrix()[(r, c)] - a.matrix()[(r, c)]).norm() < 1e-15);
            }
        }
        let kept = partial_trace(&ab, &[0]).unwrap();
        assert!((kept.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bell_marginal_is_mixed() {
        let r = partial_trace(&bell_phi_plus(), &[0]).unwrap();
        assert!((r.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!(r.matrix()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_keep_sets() {
        let rho = DensityMatrix::maximally_mixed(8);
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[1, 1]).is_err());
        assert!(partial_trace(&rho, &[3]).is_err());
    }

    #[test]
    fn keep_order_sets_tensor_order() {
        // |↑↓⟩ with site 0 up and site 1 down is index 0b10
        let mut amp = vec![c64::new(0.0, 0.0); 4];
        amp[0b10] = c64::new(1.0, 0.0);
        let rho = DensityMatrix::pure(&amp).unwrap();
        let r01 = partial_trace(&rho, &[0, 1]).unwrap();
        let r10 = partial_trace(&rho, &[1, 0]).unwrap();
        // keep [0, 1]: site 0 most significant -> |0⟩|1⟩ = index 1
        assert!((r01.matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
        assert!((r10.matrix()[(2, 2)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn correlators_of_simple_states() {
        let lattice = build_lattice(Geometry::Chain(3)).unwrap();
        let mixed = DensityMatrix::maximally_mixed(8);
        let c = correlators(&mixed, &lattice, (0, 1)).unwrap();
        assert_eq!(c, CorrelatorSet::default());

        let mut up = vec![c64::new(0.0, 0.0); 8];
        up[0] = c64::new(1.0, 0.0);
        let c = correlators(&DensityMatrix::pure(&up).unwrap(), &lattice, (1, 2)).unwrap();
        assert_eq!((c.m_z, c.t_zz, c.t_xx, c.t_yy), (1.0, 1.0, 0.0, 0.0));

        // singlet on sites (0, 1), site 2 up
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amp = vec![c64::new(0.0, 0.0); 8];
        amp[0b001] = c64::new(s, 0.0);
        amp[0b010] = c64::new(-s, 0.0);
        let c = correlators(&DensityMatrix::pure(&amp).unwrap(), &lattice, (0, 1)).unwrap();
        for t in [c.t_xx, c.t_yy, c.t_zz] {
            assert!((t + 1.0).abs() < 1e-14);
        }
        assert!(c.m_z.abs() < 1e-15);
    }

    #[test]
    fn correlators_reject_non_bonds() {
        let lattice = build_lattice(Geometry::Torus(3, 3)).unwrap();
        let mixed = DensityMatrix::maximally_mixed(512);
        assert!(matches!(
            correlators(&mixed, &lattice, (0, 4)),
            Err(Error::NotABond(0, 4))
        ));
    }

    #[test]
    fn reconstruction_examples() {
        let rho = two_site_from_correlators(&CorrelatorSet::default()).unwrap();
        for r in 0..4 {
            assert!((rho.density().matrix()[(r, r)].re - 0.25).abs() < 1e-15);
        }
        let up = two_site_from_correlators(&CorrelatorSet::diagonal(1.0, 0.0, 0.0, 1.0)).unwrap();
        assert!((up.density().matrix()[(0, 0)].re - 1.0).abs() < 1e-14);

        let bad = CorrelatorSet::diagonal(0.0, 1.0, 1.0, 1.0);
        assert!(matches!(two_site_from_correlators(&bad), Err(Error::Unphysical { .. })));
    }

    #[test]
    fn singlet_correlators_via_two_site_state() {
        let st = TwoSiteState::new(singlet()).unwrap();
        let c = st.correlators();
        assert!((c.t_xx + 1.0).abs() < 1e-14 && (c.t_yy + 1.0).abs() < 1e-14);
    }

    #[test]
    fn negativity_oracles() {
        let bell = TwoSiteState::new(bell_phi_plus()).unwrap();
        let e = logarithmic_negativity(&bell);
        assert!((e.negativity - 0.5).abs() < 1e-14);
        assert!((e.e_n - 1.0).abs() < 1e-14);

        let p = 0.5;
        let werner = Mat::<c64>::from_fn(4, 4, |r, c| {
            let id = if r == c { 0.25 } else { 0.0 };
            bell_phi_plus().matrix()[(r, c)] * p + c64::new((1.0 - p) * id, 0.0)
        });
        let e = logarithmic_negativity(&TwoSiteState::new(DensityMatrix::new(werner).unwrap()).unwrap());
        assert!((e.negativity - 0.125).abs() < 1e-14);
        assert!((e.e_n - 1.25f64.log2()).abs() < 1e-14);

        let product = two_site_from_correlators(&CorrelatorSet::diagonal(0.3, 0.0, 0.0, 0.09)).unwrap();
        let e = logarithmic_negativity(&product);
        assert_eq!(e.e_n, 0.0);
    }

    #[test]
    fn pauli_strings_cover_all_labels() {
        let s = pauli_strings_on(&[4, 1]);
        assert_eq!(s.len(), 16);
        assert!(s[0].0.iter().all(|&p| p == Pauli::I));
        let (label, string) = &s[7];
        assert_eq!(label, &vec![Pauli::X, Pauli::Z]);
        assert_eq!(string, &PauliString::pair(4, Pauli::X, 1, Pauli::Z));
    }
}
