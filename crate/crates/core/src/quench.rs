//! Sector-resolved quench analysis in real arithmetic.
//!
//! Both the pre-quench and post-quench XY Hamiltonians are real and conserve
//! the global σᶻ parity, so the initial canonical state written in the H₁
//! eigenbasis, `ρ̃ = Wᵀ ρ₀ W`, is real symmetric and block diagonal. A Pauli
//! string `P = i^{n_y} R` (`R` a real signed permutation) becomes
//! `i^{n_y} Wᵀ R W` per sector. With `c_k = cos(E_k t)`, `s_k = sin(E_k t)` and
//! `K_mn = ρ̃_mn (WᵀRW)_nm`:
//!
//! * real strings: `⟨P⟩(t) = ±(cᵀKc + sᵀKs)`,
//! * imaginary strings: `⟨P⟩(t) = ±2 sᵀKc`,
//!
//! so a whole batch of sample times is one matrix product per sector.

use faer::{Mat, MatRef};

use crate::dynamics::{mean_and_std_error, thermal_weights, SamplingPlan};
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::spectral::SpectralDecomposition;

/// Boltzmann weights below this fraction of the largest are dropped when
/// building the initial state.
const WEIGHT_CUTOFF: f64 = 1e-20;

/// Initial canonical state of H₀ expressed in the H₁ eigenbasis, per sector.
#[derive(Clone, Debug)]
pub struct EigenbasisState {
    blocks: Vec<Mat<f64>>,
}

impl EigenbasisState {
    /// `ρ̃ = Wᵀ exp(−βH₀) W / Z` for decompositions sharing a sector layout.
    pub fn canonical(pre: &SpectralDecomposition, post: &SpectralDecomposition, beta: f64) -> Result<Self> {
        if !pre.same_sectors(post) {
            return Err(Error::InvalidParams(
                "pre- and post-quench decompositions use different sectors".into(),
            ));
        }
        let weights = thermal_weights(pre.energies(), beta, pre.degeneracy_tolerance())?;
        let w_max = weights.iter().copied().fold(0.0, f64::max);
        let mut per_sector: Vec<Vec<(usize, f64)>> = vec![Vec::new(); pre.sectors().len()];
        for (k, &w) in weights.iter().enumerate() {
            if w > WEIGHT_CUTOFF * w_max {
                let (s, local) = pre.locate(k);
                per_sector[s].push((local, w.sqrt()));
            }
        }
        let blocks = pre
            .sectors()
            .iter()
            .zip(post.sectors())
            .zip(per_sector)
            .map(|((ps, qs), kept)| {
                let n = ps.states.len();
                let v0 = Mat::<f64>::from_fn(n, kept.len(), |r, c| ps.vectors[(r, kept[c].0)] * kept[c].1);
                let phi = qs.vectors.transpose() * &v0;
                &phi * phi.transpose()
            })
            .collect();
        Ok(EigenbasisState { blocks })
    }

    pub fn blocks(&self) -> &[Mat<f64>] {
        &self.blocks
    }

    pub fn trace(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (0..b.nrows()).map(|i| b[(i, i)]).sum::<f64>())
            .sum()
    }
}

/// A Pauli string in the H₁ eigenbasis.
#[derive(Clone, Debug)]
pub enum EigenbasisOperator {
    /// Maps every sector to a different one; its expectation vanishes in any
    /// state that is block diagonal.
    OffDiagonal,
    Blocks {
        /// `+1` or `−1` times `1` (real) or `i` (imaginary).
        sign: f64,
        imaginary: bool,
        blocks: Vec<Mat<f64>>,
    },
}

/// Position of each basis state inside its sector.
fn sector_positions(spec: &SpectralDecomposition) -> (Vec<usize>, Vec<usize>) {
    let mut sector_of = vec![0; spec.dim()];
    let mut pos = vec![0; spec.dim()];
    for (s, sec) in spec.sectors().iter().enumerate() {
        for (p, &state) in sec.states.iter().enumerate() {
            sector_of[state] = s;
            pos[state] = p;
        }
    }
    (sector_of, pos)
}

fn phase_parts(p: &PauliString) -> (f64, bool) {
    let ph = p.global_phase();
    if p.is_real() {
        (ph.re, false)
    } else {
        (ph.im, true)
    }
}

/// `R W` for one sector, or `None` when `R` leaves the sector.
fn permuted_vectors(
    p: &PauliString,
    states: &[usize],
    vectors: MatRef<'_, f64>,
    sector: usize,
    sector_of: &[usize],
    pos: &[usize],
) -> Result<Option<Mat<f64>>> {
    let n = states.len();
    let mut rw = Mat::<f64>::zeros(n, n);
    let mut inside = 0usize;
    for (r, &state) in states.iter().enumerate() {
        let (target, sign) = p.real_action(state);
        if sector_of[target] == sector {
            inside += 1;
            let t = pos[target];
            for c in 0..n {
                rw[(t, c)] = sign * vectors[(r, c)];
            }
        }
    }
    match inside {
        0 => Ok(None),
        x if x == n => Ok(Some(rw)),
        _ => Err(Error::InvalidParams(
            "Pauli string mixes states inside and outside a sector".into(),
        )),
    }
}

impl EigenbasisOperator {
    pub fn new(spec: &SpectralDecomposition, p: &PauliString) -> Result<Self> {
        let (sector_of, pos) = sector_positions(spec);
        let (sign, imaginary) = phase_parts(p);
        let mut blocks = Vec::with_capacity(spec.sectors().len());
        for (s, sec) in spec.sectors().iter().enumerate() {
            match permuted_vectors(p, &sec.states, sec.vectors.as_ref(), s, &sector_of, &pos)? {
                Some(rw) => blocks.push(sec.vectors.transpose() * &rw),
                None => return Ok(EigenbasisOperator::OffDiagonal),
            }
        }
        Ok(EigenbasisOperator::Blocks {
            sign,
            imaginary,
            blocks,
        })
    }

    /// Exact infinite-time average: pairs of eigenstates within a degenerate
    /// cluster of one sector. Imaginary strings average to zero because `ρ̃` is
    /// symmetric and their eigenbasis blocks are antisymmetric.
    pub fn diagonal_ensemble(&self, spec: &SpectralDecomposition, state: &EigenbasisState) -> f64 {
        let EigenbasisOperator::Blocks {
            sign,
            imaginary,
            blocks,
        } = self
        else {
            return 0.0;
        };
        if *imaginary {
            return 0.0;
        }
        let mut acc = 0.0;
        for (s, (a, rho)) in blocks.iter().zip(state.blocks()).enumerate() {
            for cluster in spec.sector_clusters(s) {
                for m in cluster.clone() {
                    for n in cluster.clone() {
                        acc += rho[(m, n)] * a[(n, m)];
                    }
                }
            }
        }
        sign * acc
    }

    /// `⟨P⟩(t)` at every time encoded in `trig`.
    pub fn time_series(&self, state: &EigenbasisState, trig: &TrigTable) -> Vec<f64> {
        let m = trig.n_times();
        let mut out = vec![0.0; m];
        let EigenbasisOperator::Blocks {
            sign,
            imaginary,
            blocks,
        } = self
        else {
            return out;
        };
        for ((a, rho), cs) in blocks.iter().zip(state.blocks()).zip(&trig.blocks) {
            let n = a.nrows();
            let k = Mat::<f64>::from_fn(n, n, |r, c| rho[(r, c)] * a[(c, r)]);
            let y = &k * cs;
            for (j, o) in out.iter_mut().enumerate() {
                let mut v = 0.0;
                if *imaginary {
                    for r in 0..n {
                        v += cs[(r, m + j)] * y[(r, j)];
                    }
                    v *= 2.0;
                } else {
                    for r in 0..n {
                        v += cs[(r, j)] * y[(r, j)] + cs[(r, m + j)] * y[(r, m + j)];
                    }
                }
                *o += sign * v;
            }
        }
        out
    }
}

/// Per-sector `[C | S]` tables with `C[k, j] = cos(E_k t_j)` and
/// `S[k, j] = sin(E_k t_j)`, energies measured from the ground energy.
#[derive(Clone, Debug)]
pub struct TrigTable {
    times: Vec<f64>,
    blocks: Vec<Mat<f64>>,
}

impl TrigTable {
    pub fn new(post: &SpectralDecomposition, times: Vec<f64>) -> Self {
        let e0 = post.ground_energy();
        let m = times.len();
        let blocks = post
            .sectors()
            .iter()
            .map(|sec| {
                Mat::<f64>::from_fn(sec.energies.len(), 2 * m, |k, j| {
                    let phase = (sec.energies[k] - e0) * times[j % m];
                    if j < m {
                        phase.cos()
                    } else {
                        phase.sin()
                    }
                })
            })
            .collect();
        TrigTable { times, blocks }
    }

    pub fn from_plan(post: &SpectralDecomposition, plan: &SamplingPlan, coupling_j: f64) -> Result<Self> {
        Ok(Self::new(post, plan.times(coupling_j)?))
    }

    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Diagonal of a Pauli string in the H₁ eigenbasis, enough for any canonical
/// expectation of H₁.
#[derive(Clone, Debug)]
pub struct ThermalProfile {
    energies: Vec<f64>,
    diagonal: Vec<f64>,
    degeneracy_tol: f64,
}

impl ThermalProfile {
    pub fn new(spec: &SpectralDecomposition, p: &PauliString) -> Result<Self> {
        let (sector_of, pos) = sector_positions(spec);
        let (sign, imaginary) = phase_parts(p);
        let mut energies = Vec::with_capacity(spec.dim());
        let mut diagonal = Vec::with_capacity(spec.dim());
        for (s, sec) in spec.sectors().iter().enumerate() {
            energies.extend_from_slice(&sec.energies);
            let rw = permuted_vectors(p, &sec.states, sec.vectors.as_ref(), s, &sector_of, &pos)?;
            match rw {
                Some(rw) if !imaginary => {
                    for k in 0..sec.energies.len() {
                        let d: f64 = (0..sec.states.len()).map(|r| sec.vectors[(r, k)] * rw[(r, k)]).sum();
                        diagonal.push(sign * d);
                    }
                }
                // the diagonal of an antisymmetric block is zero
                _ => diagonal.extend(std::iter::repeat_n(0.0, sec.energies.len())),
            }
        }
        Ok(ThermalProfile {
            energies,
            diagonal,
            degeneracy_tol: spec.degeneracy_tolerance(),
        })
    }

    pub fn expectation(&self, beta: f64) -> Result<f64> {
        let w = thermal_weights(&self.energies, beta, self.degeneracy_tol)?;
        Ok(w.iter().zip(&self.diagonal).map(|(w, d)| w * d).sum())
    }
}

/// Mean and standard error of a derived quantity over the sampled times.
pub fn summarize(values: &[f64]) -> (f64, f64) {
    mean_and_std_error(values)
}
