//! Decide whether a long-time average is reproduced by the canonical curve
//! at some temperature.
//!
//! A quantity is *ergodic* when the horizontal line `q∞` meets the canonical
//! curve inside the band `[β̃₀/f, β̃₀·f]` around the initial inverse
//! temperature, *nonergodic* when it meets the curve only outside that band,
//! and *strongly nonergodic* when it never meets it on the searched range.

// `!(x > 0.0)` is deliberate: NaN must fail every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_CURVE_POINTS: usize = 16;
pub const DEFAULT_BAND_FACTOR: f64 = 10.0;
pub const DEFAULT_MATCH_TOL: f64 = 1e-4;
pub const DEFAULT_SEARCH_RANGE: (f64, f64) = (1e-3, 1e3);
/// Relative bracket width at which bisection stops.
pub const CROSSING_REL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub beta_tilde: f64,
    pub value: f64,
    pub error: f64,
}

/// Something that can be evaluated at any `β̃`; lets crossings be refined
/// beyond the sampled grid.
pub trait CanonicalQuantity {
    fn evaluate(&self, beta_tilde: f64) -> Result<f64>;
}

impl<F: Fn(f64) -> Result<f64>> CanonicalQuantity for F {
    fn evaluate(&self, beta_tilde: f64) -> Result<f64> {
        self(beta_tilde)
    }
}

/// Log-spaced inverse-temperature grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BetaGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Default for BetaGrid {
    fn default() -> Self {
        BetaGrid {
            lo: DEFAULT_SEARCH_RANGE.0,
            hi: DEFAULT_SEARCH_RANGE.1,
            count: 61,
        }
    }
}

impl BetaGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.hi.is_finite()) {
            return Err(Error::InvalidCurve(format!(
                "grid bounds must satisfy 0 < lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.count < MIN_CURVE_POINTS {
            return Err(Error::InvalidCurve(format!(
                "grid needs at least {MIN_CURVE_POINTS} points, got {}",
                self.count
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let (l0, l1) = (self.lo.ln(), self.hi.ln());
        let step = (l1 - l0) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| match i {
                0 => self.lo,
                i if i == self.count - 1 => self.hi,
                i => (l0 + step * i as f64).exp(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCurve {
    pub label: String,
    pub points: Vec<CurvePoint>,
}

impl EquilibriumCurve {
    pub fn new(label: impl Into<String>, points: Vec<CurvePoint>) -> Result<Self> {
        let c = EquilibriumCurve {
            label: label.into(),
            points,
        };
        c.validate()?;
        Ok(c)
    }

    /// Evaluates `source` with an error estimate at every grid point.
    pub fn sample<F>(label: impl Into<String>, grid: &BetaGrid, mut source: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<(f64, f64)>,
    {
        grid.validate()?;
        let points = grid
            .points()
            .into_iter()
            .map(|b| {
                let (value, error) = source(b).map_err(|e| e.at(format!("beta_tilde={b}")))?;
                Ok(CurvePoint {
                    beta_tilde: b,
                    value,
                    error,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, points)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.len() < MIN_CURVE_POINTS {
            return Err(Error::InvalidCurve(format!(
                "{} points, need at least {MIN_CURVE_POINTS}",
                self.points.len()
            )));
        }
        if !self.points.windows(2).all(|w| w[0].beta_tilde < w[1].beta_tilde) {
            return Err(Error::InvalidCurve("beta_tilde must be strictly increasing".into()));
        }
        if self
            .points
            .iter()
            .any(|p| !(p.beta_tilde > 0.0) || !p.value.is_finite())
        {
            return Err(Error::InvalidCurve(
                "non-positive beta_tilde or non-finite value".into(),
            ));
        }
        Ok(())
    }

    pub fn beta_range(&self) -> (f64, f64) {
        (self.points[0].beta_tilde, self.points[self.points.len() - 1].beta_tilde)
    }

    pub fn is_identically_zero(&self, tol: f64) -> bool {
        self.points.iter().all(|p| p.value.abs() <= tol)
    }

    pub fn min(&self) -> CurvePoint {
        *self
            .points
            .iter()
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .expect("validated curve is non-empty")
    }

    pub fn max(&self) -> CurvePoint {
        *self
            .points
            .iter()
            .max_by(|a, b| a.value.total_cmp(&b.value))
            .expect("validated curve is non-empty")
    }

    /// Piecewise-linear interpolation in `ln β̃`.
    pub fn interpolate(&self, beta_tilde: f64) -> f64 {
        let pts = &self.points;
        if beta_tilde <= pts[0].beta_tilde {
            return pts[0].value;
        }
        let last = pts[pts.len() - 1];
        if beta_tilde >= last.beta_tilde {
            return last.value;
        }
        let i = pts.partition_point(|p| p.beta_tilde <= beta_tilde);
        let (p0, p1) = (pts[i - 1], pts[i]);
        let w = (beta_tilde.ln() - p0.beta_tilde.ln()) / (p1.beta_tilde.ln() - p0.beta_tilde.ln());
        p0.value + w * (p1.value - p0.value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Ergodic,
    Nonergodic,
    StronglyNonergodic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityVerdict {
    pub verdict: Verdict,
    /// The crossing nearest to the initial inverse temperature (log scale).
    pub crossing_beta_tilde: Option<f64>,
    pub crossings: Vec<f64>,
    pub band: (f64, f64),
    pub match_tolerance: f64,
}

/// Refines a sign change of `value(β) − q` inside `[lo, hi]` by bisection in
/// `ln β̃` until the bracket is narrower than [`CROSSING_REL_TOL`].
fn bisect(q: f64, mut lo: f64, mut hi: f64, mut f_lo: f64, eval: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    while hi - lo > CROSSING_REL_TOL * lo {
        let mid = (lo * hi).sqrt();
        let f_mid = eval(mid)? - q;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// Every `β̃` where the curve meets `q_infinity`: sign changes between grid
/// points, refined by bisection (on `source` when given, otherwise on the
/// log-linear interpolant), plus grid points within `match_tol` of the line
/// and the refined edges of each such touching region.
pub fn find_crossings(
    q_infinity: f64,
    curve: &EquilibriumCurve,
    source: Option<&dyn CanonicalQuantity>,
    match_tol: f64,
) -> Result<Vec<f64>> {
    curve.validate()?;
    let interp = |b: f64| Ok(curve.interpolate(b));
    let exact = |b: f64| source.expect("checked").evaluate(b);
    let eval: &dyn Fn(f64) -> Result<f64> = if source.is_some() { &exact } else { &interp };

    let mut out: Vec<f64> = Vec::new();
    for w in curve.points.windows(2) {
        let d0 = w[0].value - q_infinity;
        let d1 = w[1].value - q_infinity;
        if d0 != 0.0 && d1 != 0.0 && (d0 > 0.0) != (d1 > 0.0) {
            out.push(bisect(q_infinity, w[0].beta_tilde, w[1].beta_tilde, d0, eval)?);
        }
    }
    for p in &curve.points {
        if (p.value - q_infinity).abs() <= match_tol {
            out.push(p.beta_tilde);
        }
    }
    // edges of a touching region lie between a grid point inside the
    // tolerance and a neighbour outside it
    if match_tol > 0.0 {
        let gap = |b: f64| Ok((eval(b)? - q_infinity).abs() - match_tol);
        for w in curve.points.windows(2) {
            let g0 = (w[0].value - q_infinity).abs() - match_tol;
            let g1 = (w[1].value - q_infinity).abs() - match_tol;
            if (g0 <= 0.0) != (g1 <= 0.0) && g0 != 0.0 && g1 != 0.0 {
                out.push(bisect(0.0, w[0].beta_tilde, w[1].beta_tilde, g0, &gap)?);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= CROSSING_REL_TOL * b.abs());
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub band_factor: f64,
    pub match_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            band_factor: DEFAULT_BAND_FACTOR,
            match_tol: DEFAULT_MATCH_TOL,
        }
    }
}

/// Log-distance from `b` to the band; zero inside.
fn distance_to_band(b: f64, band: (f64, f64)) -> f64 {
    if b < band.0 {
        band.0.ln() - b.ln()
    } else if b > band.1 {
        b.ln() - band.1.ln()
    } else {
        0.0
    }
}

pub fn classify(
    q_infinity: f64,
    curve: &EquilibriumCurve,
    source: Option<&dyn CanonicalQuantity>,
    beta_init: f64,
    options: &ClassifyOptions,
) -> Result<ErgodicityVerdict> {
    if !(options.band_factor > 1.0) {
        return Err(Error::InvalidParams(format!(
            "band_factor must exceed 1, got {}",
            options.band_factor
        )));
    }
    if !(beta_init > 0.0) {
        return Err(Error::InvalidParams(format!(
            "beta_init must be positive, got {beta_init}"
        )));
    }
    let band = (beta_init / options.band_factor, beta_init * options.band_factor);
    let strongly = |crossings: Vec<f64>| ErgodicityVerdict {
        verdict: Verdict::StronglyNonergodic,
        crossing_beta_tilde: None,
        crossings,
        band,
        match_tolerance: options.match_tol,
    };

    // an identically vanishing canonical curve can only meet a vanishing line
    if curve.is_identically_zero(1e-12) && q_infinity.abs() > options.match_tol {
        curve.validate()?;
        return Ok(strongly(Vec::new()));
    }

    if source.is_none() {
        // a bracket straddling a band edge cannot be placed without refinement
        for w in curve.points.windows(2) {
            let d0 = w[0].value - q_infinity;
            let d1 = w[1].value - q_infinity;
            let straddles = [band.0, band.1]
                .iter()
                .any(|&e| w[0].beta_tilde < e && e < w[1].beta_tilde);
            if d0 != 0.0 && d1 != 0.0 && (d0 > 0.0) != (d1 > 0.0) && straddles {
                return Err(Error::CurveTooSparse {
                    lo: w[0].beta_tilde,
                    hi: w[1].beta_tilde,
                });
            }
        }
    }

    let crossings = find_crossings(q_infinity, curve, source, options.match_tol)?;
    if crossings.is_empty() {
        return Ok(strongly(crossings));
    }
    let nearest = crossings
        .iter()
        .copied()
        .min_by(|a, b| {
            distance_to_band(*a, band).total_cmp(&distance_to_band(*b, band)).then(
                (a.ln() - beta_init.ln())
                    .abs()
                    .total_cmp(&(b.ln() - beta_init.ln()).abs()),
            )
        })
        .expect("non-empty");
    let verdict = if distance_to_band(nearest, band) == 0.0 {
        Verdict::Ergodic
    } else {
        Verdict::Nonergodic
    };
    Ok(ErgodicityVerdict {
        verdict,
        crossing_beta_tilde: Some(nearest),
        crossings,
        band,
        match_tolerance: options.match_tol,
    })
}
