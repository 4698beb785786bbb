//! One experiment end to end: canonical curves at zero field, long-time
//! values for every pre-quench field, and a verdict for each pair.

use serde::{Deserialize, Serialize};

use crate::analytic::{
    equilibrium_correlator_set, evolved_correlator_set, infinite_chain_entanglement, ChainCorrelators, ChainPoint,
};
use crate::config::{ExperimentConfig, SystemGeometry};
use crate::dynamics::mean_and_std_error;
use crate::ergodicity::{classify, CanonicalQuantity, CurvePoint, EquilibriumCurve, ErgodicityVerdict, Verdict};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonian_with_cap, ModelParams};
use crate::lattice::{build_lattice, BondClass, Lattice};
use crate::observables::{logarithmic_negativity, two_site_from_correlators, CorrelatorSet};
use crate::pauli::{Pauli, PauliString};
use crate::quench::{EigenbasisOperator, EigenbasisState, ThermalProfile, TrigTable};
use crate::spectral::{spectral_decompose, SpectralDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "M_z")]
    Mz,
    #[serde(rename = "T_xx")]
    Txx,
    #[serde(rename = "T_yy")]
    Tyy,
    #[serde(rename = "T_zz")]
    Tzz,
    #[serde(rename = "E_N")]
    En,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [Quantity::Mz, Quantity::Txx, Quantity::Tyy, Quantity::Tzz, Quantity::En];

    pub fn label(self) -> &'static str {
        match self {
            Quantity::Mz => "M_z",
            Quantity::Txx => "T_xx",
            Quantity::Tyy => "T_yy",
            Quantity::Tzz => "T_zz",
            Quantity::En => "E_N",
        }
    }

    /// Linear in the state, so its long-time value is the diagonal-ensemble
    /// expectation.
    pub fn is_linear(self) -> bool {
        self != Quantity::En
    }

    /// Single-site quantities are reported once, not per bond.
    pub fn is_single_site(self) -> bool {
        self == Quantity::Mz
    }

    fn linear_part(self, set: &CorrelatorSet) -> f64 {
        match self {
            Quantity::Mz => set.m_z,
            Quantity::Txx => set.t_xx,
            Quantity::Tyy => set.t_yy,
            Quantity::Tzz => set.t_zz,
            Quantity::En => unreachable!("entanglement is not linear"),
        }
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace(['_', '^'], "");
        Quantity::ALL
            .into_iter()
            .find(|q| q.label().to_ascii_lowercase().replace('_', "") == norm)
            .ok_or_else(|| {
                Error::InvalidParams(format!("unknown quantity `{s}`; expected M_z, T_xx, T_yy, T_zz or E_N"))
            })
    }
}

pub const SITE_LABEL: &str = "site";
pub const AVERAGE_LABEL: &str = "average";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LongTimeValue {
    #[serde(rename = "a_over_J")]
    pub a_over_j: f64,
    pub value: f64,
    pub std_error: f64,
    /// Entanglement of the infinite-time-averaged two-site state; a
    /// cross-check for `value`, which averages the entanglement itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub of_averaged_state: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub quantity: Quantity,
    pub bond: String,
    pub geometry: String,
    #[serde(rename = "a_over_J")]
    pub a_over_j: f64,
    pub gamma: f64,
    pub beta_init: f64,
    pub long_time_value: f64,
    pub verdict: Verdict,
    pub crossing_beta_tilde: Option<f64>,
    pub crossings: Vec<f64>,
    pub band: (f64, f64),
    pub match_tolerance: f64,
}

/// Everything computed for one quantity on one bond type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantitySeries {
    pub quantity: Quantity,
    pub bond: String,
    /// How the long-time values were obtained.
    pub method: String,
    pub curve: EquilibriumCurve,
    pub long_time: Vec<LongTimeValue>,
    pub verdicts: Vec<VerdictRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FigureDataset {
    pub config: ExperimentConfig,
    pub series: Vec<QuantitySeries>,
}

impl FigureDataset {
    pub fn series(&self, quantity: Quantity, bond: &str) -> Option<&QuantitySeries> {
        self.series.iter().find(|s| s.quantity == quantity && s.bond == bond)
    }

    /// The bond label that summarizes the whole lattice: the average when
    /// several bond types exist, otherwise the only one.
    pub fn primary_bond(&self, quantity: Quantity) -> &str {
        if quantity.is_single_site() {
            return SITE_LABEL;
        }
        if self.series.iter().any(|s| s.bond == AVERAGE_LABEL) {
            AVERAGE_LABEL
        } else {
            self.series
                .iter()
                .find(|s| s.quantity == quantity)
                .map_or(AVERAGE_LABEL, |s| s.bond.as_str())
        }
    }

    pub fn verdicts(&self) -> Vec<VerdictRecord> {
        self.series.iter().flat_map(|s| s.verdicts.iter().cloned()).collect()
    }
}

pub fn run(config: &ExperimentConfig) -> Result<FigureDataset> {
    config.validate()?;
    match config.geometry {
        SystemGeometry::InfiniteChain => run_infinite_chain(config),
        SystemGeometry::Finite(g) => {
            let lattice = build_lattice(g)?;
            FiniteExperiment::prepare(config, &lattice)?.finish()
        }
    }
}

/// Rows keyed by (geometry, quantity, bond, field).
pub fn verdict_table(config: &ExperimentConfig) -> Result<Vec<VerdictRecord>> {
    Ok(run(config)?.verdicts())
}

fn classify_series(
    config: &ExperimentConfig,
    quantity: Quantity,
    bond: &str,
    curve: &EquilibriumCurve,
    source: &dyn CanonicalQuantity,
    long_time: &[LongTimeValue],
) -> Result<Vec<VerdictRecord>> {
    long_time
        .iter()
        .map(|lt| {
            let v: ErgodicityVerdict = classify(
                lt.value,
                curve,
                Some(source),
                config.beta_tilde_init,
                &config.classify_options(),
            )
            .map_err(|e| e.at(format!("{} ({bond}) at a/J={}", quantity.label(), lt.a_over_j)))?;
            Ok(VerdictRecord {
                quantity,
                bond: bond.to_string(),
                geometry: config.geometry.to_string(),
                a_over_j: lt.a_over_j,
                gamma: config.gamma,
                beta_init: config.beta_tilde_init,
                long_time_value: lt.value,
                verdict: v.verdict,
                crossing_beta_tilde: v.crossing_beta_tilde,
                crossings: v.crossings,
                band: v.band,
                match_tolerance: v.match_tolerance,
            })
        })
        .collect()
}

/// First-order bound on the change of `E_N` from errors in the correlators:
/// the trace norm of the partially transposed state moves by at most
/// `2|δm| + Σ|δT|`, and `dE_N/dN ≤ 2/ln 2`.
fn entanglement_error(c: &ChainCorrelators) -> f64 {
    let trace_norm = 2.0 * c.m_z_err + c.t_xx_err + c.t_yy_err + c.t_zz_err;
    trace_norm / std::f64::consts::LN_2
}

fn chain_value(q: Quantity, c: &ChainCorrelators) -> Result<(f64, f64)> {
    Ok(match q {
        Quantity::Mz => (c.set.m_z, c.m_z_err),
        Quantity::Txx => (c.set.t_xx, c.t_xx_err),
        Quantity::Tyy => (c.set.t_yy, c.t_yy_err),
        Quantity::Tzz => (c.set.t_zz, c.t_zz_err),
        Quantity::En => (infinite_chain_entanglement(&c.set)?.e_n, entanglement_error(c)),
    })
}

fn run_infinite_chain(config: &ExperimentConfig) -> Result<FigureDataset> {
    let quad = config.quadrature;
    let base = ChainPoint::new(0.0, config.beta_tilde_init, config.gamma)?;
    let grid = config.beta_grid.points();
    let canonical = grid
        .iter()
        .map(|&b| equilibrium_correlator_set(&base.with_beta(b), &quad).map_err(|e| e.at(format!("beta_tilde={b}"))))
        .collect::<Result<Vec<_>>>()?;
    let evolved = config
        .fields
        .iter()
        .map(|&a| {
            let p = ChainPoint::new(a, config.beta_tilde_init, config.gamma)?;
            evolved_correlator_set(&p, &quad).map_err(|e| e.at(format!("a/J={a}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut series = Vec::new();
    for q in Quantity::ALL {
        let bond = if q.is_single_site() {
            SITE_LABEL
        } else {
            BondClass::Chain.label()
        };
        let points = grid
            .iter()
            .zip(&canonical)
            .map(|(&b, c)| {
                let (value, error) = chain_value(q, c)?;
                Ok(CurvePoint {
                    beta_tilde: b,
                    value,
                    error,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let curve = EquilibriumCurve::new(q.label(), points)?;
        let long_time = config
            .fields
            .iter()
            .zip(&evolved)
            .map(|(&a, c)| {
                let (value, std_error) = chain_value(q, c)?;
                Ok(LongTimeValue {
                    a_over_j: a,
                    value,
                    std_error,
                    // the chain's correlators relax, so both orders agree
                    of_averaged_state: (q == Quantity::En).then_some(value),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let source = |b: f64| chain_value(q, &equilibrium_correlator_set(&base.with_beta(b), &quad)?).map(|v| v.0);
        let verdicts = classify_series(config, q, bond, &curve, &source, &long_time)?;
        series.push(QuantitySeries {
            quantity: q,
            bond: bond.to_string(),
            method: "closed-form long-time limit; error is the quadrature estimate".into(),
            curve,
            long_time,
            verdicts,
        });
    }
    Ok(FigureDataset {
        config: config.clone(),
        series,
    })
}

/// The strings whose expectations fix a nearest-neighbour two-site state of
/// a parity-symmetric state.
const PAIR_FACTORS: [(Pauli, Pauli); 5] = [
    (Pauli::X, Pauli::X),
    (Pauli::Y, Pauli::Y),
    (Pauli::Z, Pauli::Z),
    (Pauli::X, Pauli::Y),
    (Pauli::Y, Pauli::X),
];

struct BondGroup {
    class: BondClass,
    count: usize,
    /// Indices into the experiment's string list, in `PAIR_FACTORS` order.
    strings: [usize; 5],
}

/// A finite lattice after the expensive spectral work: canonical profiles
/// and, per field, diagonal-ensemble values and sampled time series of every
/// needed Pauli string.
struct FiniteExperiment<'a> {
    config: &'a ExperimentConfig,
    groups: Vec<BondGroup>,
    /// `strings[0]` is `Z` on site 0.
    profiles: Vec<ThermalProfile>,
    /// `[string][field]`
    diagonal: Vec<Vec<f64>>,
    series: Vec<Vec<Vec<f64>>>,
}

impl<'a> FiniteExperiment<'a> {
    fn prepare(config: &'a ExperimentConfig, lattice: &Lattice) -> Result<Self> {
        let j = config.coupling_j;
        let mut strings = vec![PauliString::single(0, Pauli::Z)];
        let mut groups = Vec::new();
        for class in lattice.bond_classes() {
            let bond = lattice.representative(class).expect("class has a bond");
            let mut idx = [0; 5];
            for (slot, (pa, pb)) in idx.iter_mut().zip(PAIR_FACTORS) {
                *slot = strings.len();
                strings.push(PauliString::pair(bond.a, pa, bond.b, pb));
            }
            groups.push(BondGroup {
                class,
                count: lattice.bonds_of(class).count(),
                strings: idx,
            });
        }

        let post_params = ModelParams::new(j, config.gamma, 0.0, 0.0)?;
        let post = spectral_decompose(&build_hamiltonian_with_cap(
            lattice,
            &post_params,
            0.0,
            config.site_cap,
        )?)?;
        let profiles = strings
            .iter()
            .map(|s| ThermalProfile::new(&post, s))
            .collect::<Result<Vec<_>>>()?;

        let beta = config.beta_tilde_init / j;
        let states = config
            .fields
            .iter()
            .map(|&a| initial_state(config, lattice, &post, a * j, beta).map_err(|e| e.at(format!("a/J={a}"))))
            .collect::<Result<Vec<_>>>()?;
        let trig = TrigTable::from_plan(&post, &config.sampling, j)?;

        // one eigenbasis operator alive at a time
        let mut diagonal = Vec::with_capacity(strings.len());
        let mut series = Vec::with_capacity(strings.len());
        for s in &strings {
            let op = EigenbasisOperator::new(&post, s)?;
            diagonal.push(states.iter().map(|st| op.diagonal_ensemble(&post, st)).collect());
            series.push(states.iter().map(|st| op.time_series(st, &trig)).collect());
        }
        Ok(FiniteExperiment {
            config,
            groups,
            profiles,
            diagonal,
            series,
        })
    }

    fn canonical_set(&self, group: &BondGroup, beta_tilde: f64) -> Result<CorrelatorSet> {
        let beta = beta_tilde / self.config.coupling_j;
        let e = |k: usize| self.profiles[k].expectation(beta);
        let [xx, yy, zz, xy, yx] = group.strings;
        Ok(CorrelatorSet {
            m_z: e(0)?,
            t_xx: e(xx)?,
            t_yy: e(yy)?,
            t_zz: e(zz)?,
            t_xy: e(xy)?,
            t_yx: e(yx)?,
            ..Default::default()
        })
    }

    /// Canonical value on one group, or the bond-weighted average.
    fn canonical(&self, q: Quantity, group: Option<usize>, beta_tilde: f64) -> Result<f64> {
        let value = |g: &BondGroup| -> Result<f64> {
            let set = self.canonical_set(g, beta_tilde)?;
            if q.is_linear() {
                Ok(q.linear_part(&set))
            } else {
                Ok(logarithmic_negativity(&two_site_from_correlators(&set)?).e_n)
            }
        };
        match group {
            Some(i) => value(&self.groups[i]),
            None => self.weighted(|g| value(g)),
        }
    }

    fn weighted(&self, mut f: impl FnMut(&BondGroup) -> Result<f64>) -> Result<f64> {
        let total: usize = self.groups.iter().map(|g| g.count).sum();
        let mut acc = 0.0;
        for g in &self.groups {
            acc += g.count as f64 * f(g)?;
        }
        Ok(acc / total as f64)
    }

    /// Entanglement at every sample time on one group.
    fn sampled_entanglement(&self, group: &BondGroup, field: usize) -> Result<Vec<f64>> {
        let z = &self.series[0][field];
        let [xx, yy, zz, xy, yx] = group.strings.map(|k| &self.series[k][field]);
        (0..z.len())
            .map(|t| {
                let set = CorrelatorSet {
                    m_z: z[t],
                    t_xx: xx[t],
                    t_yy: yy[t],
                    t_zz: zz[t],
                    t_xy: xy[t],
                    t_yx: yx[t],
                    ..Default::default()
                };
                Ok(logarithmic_negativity(&two_site_from_correlators(&set)?).e_n)
            })
            .collect()
    }

    fn entanglement_of_diagonal(&self, group: &BondGroup, field: usize) -> Result<f64> {
        let [xx, yy, zz, xy, yx] = group.strings.map(|k| self.diagonal[k][field]);
        let set = CorrelatorSet {
            m_z: self.diagonal[0][field],
            t_xx: xx,
            t_yy: yy,
            t_zz: zz,
            t_xy: xy,
            t_yx: yx,
            ..Default::default()
        };
        Ok(logarithmic_negativity(&two_site_from_correlators(&set)?).e_n)
    }

    fn long_time(&self, q: Quantity, group: Option<usize>) -> Result<Vec<LongTimeValue>> {
        let fields = &self.config.fields;
        (0..fields.len())
            .map(|f| {
                let (value, std_error) = if q.is_linear() {
                    let de = |g: &BondGroup| -> Result<f64> {
                        let [xx, yy, zz, _, _] = g.strings;
                        Ok(match q {
                            Quantity::Mz => self.diagonal[0][f],
                            Quantity::Txx => self.diagonal[xx][f],
                            Quantity::Tyy => self.diagonal[yy][f],
                            Quantity::Tzz => self.diagonal[zz][f],
                            Quantity::En => unreachable!(),
                        })
                    };
                    let v = match group {
                        Some(i) => de(&self.groups[i])?,
                        None => self.weighted(de)?,
                    };
                    (v, 0.0)
                } else {
                    let samples = match group {
                        Some(i) => self.sampled_entanglement(&self.groups[i], f)?,
                        None => {
                            let total: usize = self.groups.iter().map(|g| g.count).sum();
                            let mut acc = vec![0.0; self.config.sampling.n_samples];
                            for g in &self.groups {
                                for (a, e) in acc.iter_mut().zip(self.sampled_entanglement(g, f)?) {
                                    *a += g.count as f64 * e / total as f64;
                                }
                            }
                            acc
                        }
                    };
                    mean_and_std_error(&samples)
                };
                let of_averaged_state = if q.is_linear() {
                    None
                } else {
                    let de = |g: &BondGroup| self.entanglement_of_diagonal(g, f);
                    Some(match group {
                        Some(i) => de(&self.groups[i])?,
                        None => self.weighted(de)?,
                    })
                };
                Ok(LongTimeValue {
                    a_over_j: fields[f],
                    value,
                    std_error,
                    of_averaged_state,
                })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e: Error| e.at(format!("{} long-time value", q.label())))
    }

    fn finish(self) -> Result<FigureDataset> {
        let config = self.config;
        let mut selections: Vec<(String, Option<usize>)> = self
            .groups
            .iter()
            .enumerate()
            .map(|(i, g)| (g.class.label().to_string(), Some(i)))
            .collect();
        if self.groups.len() > 1 {
            selections.push((AVERAGE_LABEL.to_string(), None));
        }
        let mut series = Vec::new();
        for q in Quantity::ALL {
            let sel: Vec<(String, Option<usize>)> = if q.is_single_site() {
                vec![(SITE_LABEL.to_string(), Some(0))]
            } else {
                selections.clone()
            };
            for (bond, group) in sel {
                let curve = EquilibriumCurve::sample(q.label(), &config.beta_grid, |b| {
                    Ok((self.canonical(q, group, b)?, 0.0))
                })?;
                let long_time = self.long_time(q, group)?;
                let source = |b: f64| self.canonical(q, group, b);
                let verdicts = classify_series(config, q, &bond, &curve, &source, &long_time)?;
                let method = if q.is_linear() {
                    "diagonal ensemble of the post-quench Hamiltonian (exact infinite-time average)"
                } else {
                    "mean over seeded random times with its standard error"
                };
                series.push(QuantitySeries {
                    quantity: q,
                    bond,
                    method: method.into(),
                    curve,
                    long_time,
                    verdicts,
                });
            }
        }
        Ok(FigureDataset {
            config: config.clone(),
            series,
        })
    }
}

fn initial_state(
    config: &ExperimentConfig,
    lattice: &Lattice,
    post: &SpectralDecomposition,
    field: f64,
    beta: f64,
) -> Result<EigenbasisState> {
    let params = ModelParams::new(config.coupling_j, config.gamma, field, beta)?;
    let pre = spectral_decompose(&build_hamiltonian_with_cap(lattice, &params, field, config.site_cap)?)?;
    EigenbasisState::canonical(&pre, post, beta)
}
