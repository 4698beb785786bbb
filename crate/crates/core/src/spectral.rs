//! Dense eigendecomposition, split by global σᶻ parity when the operator
//! allows it.

use std::ops::Range;

use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::hamiltonian::{max_abs, max_asymmetry, HermitianOperator};

/// Relative gap below which two eigenvalues count as degenerate.
pub const DEGENERACY_RELATIVE_TOL: f64 = 1e-10;

/// Eigenpairs restricted to one invariant subspace spanned by computational
/// basis states.
#[derive(Clone, Debug)]
pub struct Sector {
    /// Computational basis indices spanning the sector, ascending.
    pub states: Vec<usize>,
    /// Ascending.
    pub energies: Vec<f64>,
    /// `states.len()` square; column `k` is the eigenvector of `energies[k]`
    /// expressed on `states`.
    pub vectors: Mat<f64>,
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    dim: usize,
    sectors: Vec<Sector>,
    energies: Vec<f64>,
    /// `(sector, local index)` of each entry of `energies`.
    order: Vec<(usize, usize)>,
}

pub fn spectral_decompose(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    let m = h.matrix();
    let dim = h.dim();
    let asym = max_asymmetry(m);
    if asym > 1e-12 * max_abs(m).max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    let partitions: Vec<Vec<usize>> = if dim > 1 && h.commutes_with_parity() {
        let even = (0..dim).filter(|s| s.count_ones().is_multiple_of(2)).collect();
        let odd = (0..dim).filter(|s| !s.count_ones().is_multiple_of(2)).collect();
        vec![even, odd]
    } else {
        vec![(0..dim).collect()]
    };

    let mut sectors = Vec::with_capacity(partitions.len());
    for states in partitions {
        let block = Mat::<f64>::from_fn(states.len(), states.len(), |r, c| m[(states[r], states[c])]);
        let evd = block.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigensolver)?;
        let energies: Vec<f64> = evd.S().column_vector().iter().copied().collect();
        sectors.push(Sector {
            states,
            energies,
            vectors: evd.U().to_owned(),
        });
    }
    Ok(SpectralDecomposition::from_sectors(dim, sectors))
}

impl SpectralDecomposition {
    pub fn from_sectors(dim: usize, sectors: Vec<Sector>) -> Self {
        let mut order: Vec<(usize, usize)> = sectors
            .iter()
            .enumerate()
            .flat_map(|(s, sec)| (0..sec.energies.len()).map(move |k| (s, k)))
            .collect();
        order.sort_by(|&(sa, ka), &(sb, kb)| {
            sectors[sa].energies[ka]
                .total_cmp(&sectors[sb].energies[kb])
                .then((sa, ka).cmp(&(sb, kb)))
        });
        let energies = order.iter().map(|&(s, k)| sectors[s].energies[k]).collect();
        SpectralDecomposition {
            dim,
            sectors,
            energies,
            order,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All eigenvalues, ascending.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn spectral_width(&self) -> f64 {
        self.energies[self.dim - 1] - self.energies[0]
    }

    pub fn degeneracy_tolerance(&self) -> f64 {
        DEGENERACY_RELATIVE_TOL * self.spectral_width()
    }

    /// `(sector, local index)` for the `k`-th lowest eigenvalue.
    pub fn locate(&self, k: usize) -> (usize, usize) {
        self.order[k]
    }

    /// Full unitary with columns ordered like [`energies`](Self::energies).
    pub fn vectors_dense(&self) -> Mat<f64> {
        let mut v = Mat::<f64>::zeros(self.dim, self.dim);
        for (col, &(s, k)) in self.order.iter().enumerate() {
            let sec = &self.sectors[s];
            for (r, &state) in sec.states.iter().enumerate() {
                v[(state, col)] = sec.vectors[(r, k)];
            }
        }
        v
    }

    /// Maximal runs of ascending eigenvalues whose consecutive gaps are within
    /// the degeneracy tolerance.
    pub fn degenerate_clusters(&self) -> Vec<Range<usize>> {
        let tol = self.degeneracy_tolerance();
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=self.dim {
            if k == self.dim || self.energies[k] - self.energies[k - 1] > tol {
                out.push(start..k);
                start = k;
            }
        }
        out
    }

    /// Same clustering restricted to one sector's (ascending) energies.
    pub fn sector_clusters(&self, sector: usize) -> Vec<Range<usize>> {
        let tol = self.degeneracy_tolerance();
        let e = &self.sectors[sector].energies;
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=e.len() {
            if k == e.len() || e[k] - e[k - 1] > tol {
                out.push(start..k);
                start = k;
            }
        }
        out
    }

    /// Whether another decomposition uses the same sector partition.
    pub fn same_sectors(&self, other: &SpectralDecomposition) -> bool {
        self.dim == other.dim
            && self.sectors.len() == other.sectors.len()
            && self
                .sectors
                .iter()
                .zip(&other.sectors)
                .all(|(a, b)| a.states == b.states)
    }

    /// `‖V diag(E) Vᵀ − H‖_max`, for validation.
    pub fn reconstruction_error(&self, h: &HermitianOperator) -> f64 {
        let v = self.vectors_dense();
        let ve = Mat::<f64>::from_fn(self.dim, self.dim, |r, c| v[(r, c)] * self.energies[c]);
        let rec = &ve * v.transpose();
        let mut err = 0.0f64;
        for c in 0..self.dim {
            for r in 0..self.dim {
                err = err.max((rec[(r, c)] - h.matrix()[(r, c)]).abs());
            }
        }
        err
    }
}
