//! Canonical states, post-quench unitary evolution and long-time averages on
//! dense density matrices.
//!
//! These routines work on the full `2^N` space and are meant for systems up
//! to roughly ten sites. [`crate::quench`] computes the same quantities
//! sector by sector in real arithmetic for the 12-site geometries.

use faer::{c64, Mat, MatRef, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::reduced_from_pauli_expectations;
use crate::pauli::PauliString;
use crate::spectral::SpectralDecomposition;

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: Mat<c64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and numerical positivity.
    pub fn new(matrix: Mat<c64>) -> Result<Self> {
        let dm = DensityMatrix { matrix };
        dm.check()?;
        Ok(dm)
    }

    pub(crate) fn new_unchecked(matrix: Mat<c64>) -> Self {
        DensityMatrix { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = 1.0 / dim as f64;
        DensityMatrix {
            matrix: Mat::from_fn(
                dim,
                dim,
                |r, c| if r == c { c64::new(w, 0.0) } else { c64::new(0.0, 0.0) },
            ),
        }
    }

    pub fn pure(amplitudes: &[c64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm == 0.0 {
            return Err(Error::InvalidParams("zero state vector".into()));
        }
        let n = amplitudes.len();
        Ok(DensityMatrix {
            matrix: Mat::from_fn(n, n, |r, c| amplitudes[r] * amplitudes[c].conj() / norm),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    pub fn as_ref(&self) -> MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut err = 0.0f64;
        for c in 0..n {
            for r in 0..=c {
                err = err.max((self.matrix[(r, c)] - self.matrix[(c, r)].conj()).norm());
            }
        }
        err
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e = self
            .matrix
            .self_adjoint_eigenvalues(Side::Lower)
            .expect("Hermitian eigensolver converges");
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn check(&self) -> Result<()> {
        if self.matrix.nrows() != self.matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                found: self.matrix.ncols(),
            });
        }
        let herm = self.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::NotHermitian { asymmetry: herm });
        }
        let tr = self.trace();
        if (tr - c64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidParams(format!("density matrix trace {tr} != 1")));
        }
        let min = self.eigenvalues()[0];
        if min < -PSD_TOL {
            return Err(Error::Unphysical { min_eigenvalue: min });
        }
        Ok(())
    }

    pub fn expectation(&self, observable: MatRef<'_, c64>) -> f64 {
        let n = self.dim();
        let mut acc = c64::new(0.0, 0.0);
        for r in 0..n {
            for c in 0..n {
                acc += self.matrix[(r, c)] * observable[(c, r)];
            }
        }
        acc.re
    }
}

fn complexify(m: MatRef<'_, f64>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |r, c| c64::new(m[(r, c)], 0.0))
}

/// Canonical state `exp(−βH)/Z`; `beta = +∞` gives the uniform mixture over
/// the (numerically) degenerate ground manifold.
pub fn thermal_state(spectral: &SpectralDecomposition, beta: f64) -> Result<DensityMatrix> {
    let weights = thermal_weights(spectral.energies(), beta, spectral.degeneracy_tolerance())?;
    let v = spectral.vectors_dense();
    let n = spectral.dim();
    let vw = Mat::<f64>::from_fn(n, n, |r, c| v[(r, c)] * weights[c]);
    let rho = &vw * v.transpose();
    Ok(DensityMatrix::new_unchecked(complexify(rho.as_ref())))
}

/// Normalized Boltzmann weights of ascending `energies`, shifted by the
/// lowest energy before exponentiation.
pub fn thermal_weights(energies: &[f64], beta: f64, degeneracy_tol: f64) -> Result<Vec<f64>> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::InvalidParams(format!("beta must be non-negative, got {beta}")));
    }
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let mut w: Vec<f64> = if beta.is_infinite() {
        energies
            .iter()
            .map(|&e| if e - e0 <= degeneracy_tol { 1.0 } else { 0.0 })
            .collect()
    } else {
        energies.iter().map(|&e| (-beta * (e - e0)).exp()).collect()
    };
    let z: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= z);
    Ok(w)
}

fn propagator(spectral: &SpectralDecomposition, t: f64) -> Mat<c64> {
    let v = complexify(spectral.vectors_dense().as_ref());
    let n = spectral.dim();
    let e0 = spectral.ground_energy();
    let phases: Vec<c64> = spectral.energies().iter().map(|&e| c64::cis(-(e - e0) * t)).collect();
    let vd = Mat::<c64>::from_fn(n, n, |r, c| v[(r, c)] * phases[c]);
    &vd * v.adjoint()
}

/// `ρ(t) = U ρ₀ U†` with `U = exp(−i H₁ t)` (up to a global phase).
pub fn evolve(rho0: &DensityMatrix, spectral_h1: &SpectralDecomposition, t: f64) -> Result<DensityMatrix> {
    if rho0.dim() != spectral_h1.dim() {
        return Err(Error::DimensionMismatch {
            expected: spectral_h1.dim(),
            found: rho0.dim(),
        });
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let u = propagator(spectral_h1, t);
    let rho = &u * rho0.matrix() * u.adjoint();
    Ok(DensityMatrix::new_unchecked(rho))
}

/// Infinite-time average of `tr(ρ(t) O)`: the sum of `ρ̃_mn Õ_nm` over pairs of
/// H₁ eigenstates inside the same degenerate cluster.
pub fn diagonal_ensemble_expectation(
    rho0: &DensityMatrix,
    spectral_h1: &SpectralDecomposition,
    observable: MatRef<'_, c64>,
) -> Result<f64> {
    let n = spectral_h1.dim();
    if rho0.dim() != n || observable.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rho0.dim(),
        });
    }
    let v = complexify(spectral_h1.vectors_dense().as_ref());
    let rho_t = v.adjoint() * rho0.matrix() * &v;
    let obs_t = v.adjoint() * observable * &v;
    let mut acc = c64::new(0.0, 0.0);
    for cluster in spectral_h1.degenerate_clusters() {
        for m in cluster.clone() {
            for k in cluster.clone() {
                acc += rho_t[(m, k)] * obs_t[(k, m)];
            }
        }
    }
    Ok(acc.re)
}

/// Random-time sampling of a window `[0, t_max]` in units of `1/J`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingPlan {
    pub t_max: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            t_max: 1000.0,
            n_samples: 2000,
            seed: 0x0005_eed0_fe49_0d1c,
        }
    }
}

impl SamplingPlan {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::Sampling(format!(
                "need at least 2 samples for an error bar, got {}",
                self.n_samples
            )));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::Sampling(format!("t_max must be positive, got {}", self.t_max)));
        }
        Ok(())
    }

    /// Sample times for a system with coupling `|J|`, drawn up front from one
    /// seeded stream so results never depend on evaluation order.
    pub fn times(&self, coupling_j: f64) -> Result<Vec<f64>> {
        self.validate()?;
        let window = self.t_max / coupling_j.abs();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok((0..self.n_samples).map(|_| rng.random_range(0.0..window)).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeAverageResult {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub window_t: f64,
    pub seed: u64,
}

impl TimeAverageResult {
    pub fn from_samples(values: &[f64], plan: &SamplingPlan) -> Self {
        let (mean, std_error) = mean_and_std_error(values);
        TimeAverageResult {
            mean,
            std_error,
            n_samples: values.len(),
            window_t: plan.t_max,
            seed: plan.seed,
        }
    }
}

pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean and standard error of `f(ρ_keep(t))` over the plan's random times,
/// where `ρ_keep` is the evolved state reduced to `keep_sites`.
///
/// The reduced state is rebuilt from the time series of every Pauli string
/// supported on `keep_sites`, each obtained in the H₁ eigenbasis.
pub fn time_sampled_average<F>(
    rho0: &DensityMatrix,
    spectral_h1: &SpectralDecomposition,
    keep_sites: &[usize],
    f: F,
    plan: &SamplingPlan,
) -> Result<TimeAverageResult>
where
    F: Fn(&DensityMatrix) -> f64,
{
    plan.validate()?;
    let n = spectral_h1.dim();
    if rho0.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rho0.dim(),
        });
    }
    let n_sites = n.trailing_zeros() as usize;
    crate::observables::validate_keep(keep_sites, n_sites)?;
    let times = plan.times(1.0)?;
    let m = times.len();

    let v = complexify(spectral_h1.vectors_dense().as_ref());
    let rho_t = v.adjoint() * rho0.matrix() * &v;
    let e0 = spectral_h1.ground_energy();
    // X[k, j] = exp(−i E_k t_j)
    let x = Mat::<c64>::from_fn(n, m, |k, j| c64::cis(-(spectral_h1.energies()[k] - e0) * times[j]));
    let x_conj = Mat::<c64>::from_fn(n, m, |k, j| x[(k, j)].conj());

    let strings = crate::observables::pauli_strings_on(keep_sites);
    let mut series: Vec<Vec<f64>> = Vec::with_capacity(strings.len());
    for (_, string) in &strings {
        let obs_t = v.adjoint() * string.to_dense(n_sites) * &v;
        // B[m, k] = ρ̃_mk Õ_km; value(t) = xᵀ B x̄
        let b = Mat::<c64>::from_fn(n, n, |r, c| rho_t[(r, c)] * obs_t[(c, r)]);
        let y = &b * &x_conj;
        series.push(
            (0..m)
                .map(|j| (0..n).map(|k| x[(k, j)] * y[(k, j)]).sum::<c64>().re)
                .collect(),
        );
    }

    let labels: Vec<_> = strings.iter().map(|(l, _)| l.clone()).collect();
    let values: Vec<f64> = (0..m)
        .map(|j| {
            let exps: Vec<f64> = series.iter().map(|s| s[j]).collect();
            let reduced = reduced_from_pauli_expectations(&labels, &exps);
            f(&reduced)
        })
        .collect();
    Ok(TimeAverageResult::from_samples(&values, plan))
}

/// `tr(ρ P)` for each Pauli string.
pub fn pauli_expectations(rho: &DensityMatrix, strings: &[PauliString]) -> Vec<f64> {
    strings.iter().map(|p| p.expectation(rho.as_ref()).re).collect()
}
