//! The anisotropic XY Hamiltonian in a transverse field,
//!
//! `H = J Σ_⟨ij⟩ [(1 + γ) SˣᵢSˣⱼ + (1 − γ) SʸᵢSʸⱼ] − h Σᵢ Sᶻᵢ`, with `S = σ/2`,
//!
//! as a dense matrix in the computational basis. Every term is real in that
//! basis, so the operator is stored as a real symmetric matrix.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::pauli::z_eigenvalue;

/// Default limit on the number of spins: 2^14 states is a 2 GiB dense matrix.
pub const DEFAULT_SITE_CAP: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub coupling_j: f64,
    pub gamma: f64,
    /// Field applied before the quench.
    pub field_a: f64,
    /// Inverse temperature of the initial canonical state.
    pub beta: f64,
}

impl ModelParams {
    pub fn new(coupling_j: f64, gamma: f64, field_a: f64, beta: f64) -> Result<Self> {
        let p = ModelParams {
            coupling_j,
            gamma,
            field_a,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters from the dimensionless pair `(ã, β̃)` at coupling `J`.
    pub fn from_dimensionless(coupling_j: f64, gamma: f64, a_tilde: f64, beta_tilde: f64) -> Result<Self> {
        if coupling_j == 0.0 {
            return Err(Error::InvalidParams("coupling J must be nonzero".into()));
        }
        Self::new(coupling_j, gamma, a_tilde * coupling_j, beta_tilde / coupling_j)
    }

    pub fn validate(&self) -> Result<()> {
        if self.coupling_j == 0.0 || !self.coupling_j.is_finite() {
            return Err(Error::InvalidParams("coupling J must be finite and nonzero".into()));
        }
        if self.gamma == 0.0 || !self.gamma.is_finite() {
            return Err(Error::InvalidParams(
                "anisotropy gamma must be finite and nonzero".into(),
            ));
        }
        if !self.field_a.is_finite() {
            return Err(Error::InvalidParams("field a must be finite".into()));
        }
        if self.beta.is_nan() || self.beta < 0.0 {
            return Err(Error::InvalidParams("beta must be non-negative".into()));
        }
        Ok(())
    }

    pub fn a_tilde(&self) -> f64 {
        self.field_a / self.coupling_j
    }

    pub fn beta_tilde(&self) -> f64 {
        self.beta * self.coupling_j
    }
}

/// Real symmetric operator on the `2^n` dimensional spin space.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    matrix: Mat<f64>,
}

impl HermitianOperator {
    /// Wraps a matrix after checking that it is symmetric to `1e-12` relative.
    pub fn from_matrix(matrix: Mat<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let asym = max_asymmetry(&matrix);
        let scale = max_abs(&matrix).max(f64::MIN_POSITIVE);
        if asym > 1e-12 * scale {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        Ok(HermitianOperator { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<f64> {
        self.matrix
    }

    /// Whether the matrix is block diagonal in the global σᶻ-parity sectors.
    pub fn commutes_with_parity(&self) -> bool {
        let n = self.dim();
        (0..n).all(|c| (0..n).all(|r| ((r ^ c).count_ones().is_multiple_of(2)) || self.matrix[(r, c)] == 0.0))
    }
}

pub(crate) fn max_abs(m: &Mat<f64>) -> f64 {
    let mut acc = 0.0f64;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            acc = acc.max(m[(r, c)].abs());
        }
    }
    acc
}

pub(crate) fn max_asymmetry(m: &Mat<f64>) -> f64 {
    let mut acc = 0.0f64;
    for c in 0..m.ncols() {
        for r in 0..c {
            acc = acc.max((m[(r, c)] - m[(c, r)]).abs());
        }
    }
    acc
}

pub fn build_hamiltonian(lattice: &Lattice, params: &ModelParams, field_h: f64) -> Result<HermitianOperator> {
    build_hamiltonian_with_cap(lattice, params, field_h, DEFAULT_SITE_CAP)
}

pub fn build_hamiltonian_with_cap(
    lattice: &Lattice,
    params: &ModelParams,
    field_h: f64,
    site_cap: usize,
) -> Result<HermitianOperator> {
    params.validate()?;
    let n = lattice.n_sites;
    if n > site_cap {
        return Err(Error::TooManySites {
            n_sites: n,
            cap: site_cap,
        });
    }
    let dim = 1usize << n;
    let j = params.coupling_j;
    let gamma = params.gamma;
    // ⟨t| J[(1+γ)SˣSˣ + (1−γ)SʸSʸ] |s⟩ with t = s with both spins flipped:
    // Jγ/2 for parallel spins, J/2 for antiparallel ones.
    let parallel = 0.5 * j * gamma;
    let antiparallel = 0.5 * j;

    let mut m = Mat::<f64>::zeros(dim, dim);
    for s in 0..dim {
        let mut diag = 0.0;
        for site in 0..n {
            diag -= 0.5 * field_h * z_eigenvalue(s, site);
        }
        m[(s, s)] = diag;
        for bond in &lattice.bonds {
            let t = s ^ (1 << bond.a) ^ (1 << bond.b);
            let same = ((s >> bond.a) & 1) == ((s >> bond.b) & 1);
            m[(t, s)] += if same { parallel } else { antiparallel };
        }
    }
    Ok(HermitianOperator { matrix: m })
}
