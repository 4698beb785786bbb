//! Pauli strings acting on the computational basis.
//!
//! Basis convention: bit `i` of a basis index is the state of site `i`, with
//! bit value 0 meaning spin up (σᶻ = +1) and 1 meaning spin down.

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> [[c64; 2]; 2] {
        let o = c64::new(0.0, 0.0);
        let one = c64::new(1.0, 0.0);
        let i = c64::new(0.0, 1.0);
        match self {
            Pauli::I => [[one, o], [o, one]],
            Pauli::X => [[o, one], [one, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[one, o], [o, -one]],
        }
    }
}

/// σᶻ eigenvalue of `site` in basis state `state`.
#[inline]
pub fn z_eigenvalue(state: usize, site: usize) -> f64 {
    if (state >> site) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A tensor product of single-site Pauli matrices; identities are implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    factors: Vec<(usize, Pauli)>,
    flip_mask: usize,
    sign_mask: usize,
    y_count: u32,
}

impl PauliString {
    pub fn new(factors: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        let mut factors: Vec<(usize, Pauli)> = factors.into_iter().filter(|&(_, p)| p != Pauli::I).collect();
        factors.sort_by_key(|&(s, _)| s);
        for w in factors.windows(2) {
            assert!(w[0].0 != w[1].0, "site {} appears twice in a Pauli string", w[0].0);
        }
        let mut flip_mask = 0;
        let mut sign_mask = 0;
        let mut y_count = 0;
        for &(site, p) in &factors {
            match p {
                Pauli::X => flip_mask |= 1 << site,
                Pauli::Y => {
                    flip_mask |= 1 << site;
                    sign_mask |= 1 << site;
                    y_count += 1;
                }
                Pauli::Z => sign_mask |= 1 << site,
                Pauli::I => {}
            }
        }
        PauliString {
            factors,
            flip_mask,
            sign_mask,
            y_count,
        }
    }

    pub fn identity() -> Self {
        Self::new([])
    }

    pub fn single(site: usize, p: Pauli) -> Self {
        Self::new([(site, p)])
    }

    pub fn pair(a: usize, pa: Pauli, b: usize, pb: Pauli) -> Self {
        Self::new([(a, pa), (b, pb)])
    }

    pub fn factors(&self) -> &[(usize, Pauli)] {
        &self.factors
    }

    pub fn flip_mask(&self) -> usize {
        self.flip_mask
    }

    /// Whether the string commutes with the global phase flip Πᵢ σᶻᵢ.
    pub fn preserves_parity(&self) -> bool {
        self.flip_mask.count_ones().is_multiple_of(2)
    }

    /// True when the matrix is real (an even number of σʸ factors).
    pub fn is_real(&self) -> bool {
        self.y_count.is_multiple_of(2)
    }

    /// The string equals `i^{y_count} · R` with `R` a real signed permutation;
    /// this returns `R`'s nonzero entry in column `state` as `(row, sign)`.
    #[inline]
    pub fn real_action(&self, state: usize) -> (usize, f64) {
        let sign = if (state & self.sign_mask).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        (state ^ self.flip_mask, sign)
    }

    /// `i^{y_count}`, the global phase separating the string from its real part.
    pub fn global_phase(&self) -> c64 {
        match self.y_count % 4 {
            0 => c64::new(1.0, 0.0),
            1 => c64::new(0.0, 1.0),
            2 => c64::new(-1.0, 0.0),
            _ => c64::new(0.0, -1.0),
        }
    }

    /// Nonzero entry of column `state`: `P|state⟩ = amp |row⟩`.
    #[inline]
    pub fn action(&self, state: usize) -> (usize, c64) {
        let (row, sign) = self.real_action(state);
        (row, self.global_phase() * sign)
    }

    pub fn to_dense(&self, n_sites: usize) -> Mat<c64> {
        let dim = 1usize << n_sites;
        let mut m = Mat::<c64>::zeros(dim, dim);
        for s in 0..dim {
            let (row, amp) = self.action(s);
            m[(row, s)] = amp;
        }
        m
    }

    /// `tr(ρ P)` for a dense state in the same basis.
    pub fn expectation(&self, rho: faer::MatRef<'_, c64>) -> c64 {
        let mut acc = c64::new(0.0, 0.0);
        for s in 0..rho.ncols() {
            let (row, amp) = self.action(s);
            // tr(ρP) = Σ_s ⟨s|ρ P|s⟩ = Σ_s ρ[s, row] · amp
            acc += rho[(s, row)] * amp;
        }
        acc
    }
}
