//! Periodic lattice geometries and their nearest-neighbour bond lists.
//!
//! Site ordering is row-major for the torus (`site = row * cols + col`) and
//! rail-major for the ladder (`site = rail * len + rung`), so rail 0 holds
//! sites `0..len` and rail 1 holds `len..2*len`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Chain,
    Ladder,
    Torus,
}

/// Which family of equivalent bonds a bond belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondClass {
    Chain,
    Rail,
    Rung,
    /// Along a row of the torus, `(r, c) - (r, c + 1)`.
    Row,
    /// Along a column of the torus, `(r, c) - (r + 1, c)`.
    Column,
}

impl BondClass {
    pub fn label(self) -> &'static str {
        match self {
            BondClass::Chain => "chain",
            BondClass::Rail => "rail",
            BondClass::Rung => "rung",
            BondClass::Row => "row",
            BondClass::Column => "column",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub class: BondClass,
}

/// Requested finite geometry, before validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    Chain(usize),
    /// Two rails of the given length.
    Ladder(usize),
    Torus(usize, usize),
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Geometry::Chain(n) => write!(f, "chain:{n}"),
            Geometry::Ladder(l) => write!(f, "ladder:{l}"),
            Geometry::Torus(r, c) => write!(f, "torus:{r}x{c}"),
        }
    }
}

impl FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidLattice(format!("cannot parse geometry `{s}`"));
        let (kind, dims) = s.split_once(':').ok_or_else(bad)?;
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        match kind.trim() {
            "chain" => Ok(Geometry::Chain(num(dims)?)),
            "ladder" => {
                // accept both "ladder:4" and "ladder:2x4"
                match dims.split_once('x') {
                    Some((rails, len)) if num(rails)? == 2 => Ok(Geometry::Ladder(num(len)?)),
                    Some(_) => Err(Error::InvalidLattice("a ladder has exactly 2 rails".into())),
                    None => Ok(Geometry::Ladder(num(dims)?)),
                }
            }
            "torus" => {
                let (r, c) = dims.split_once('x').ok_or_else(bad)?;
                Ok(Geometry::Torus(num(r)?, num(c)?))
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub kind: LatticeKind,
    pub n_sites: usize,
    /// `(rows, cols)`; `(1, n)` for a chain and `(2, len)` for a ladder.
    pub dimensions: (usize, usize),
    pub bonds: Vec<Bond>,
    pub site_ordering: String,
}

pub fn build_lattice(geometry: Geometry) -> Result<Lattice> {
    let mut edges: Vec<(usize, usize, BondClass)> = Vec::new();
    let (kind, dims, ordering) = match geometry {
        Geometry::Chain(n) => {
            if n < 3 {
                return Err(Error::InvalidLattice(format!(
                    "chain needs at least 3 sites, got {n}: the wrap-around bond would duplicate a direct bond"
                )));
            }
            for i in 0..n {
                edges.push((i, (i + 1) % n, BondClass::Chain));
            }
            (LatticeKind::Chain, (1, n), "site = i")
        }
        Geometry::Ladder(len) => {
            if len < 3 {
                return Err(Error::InvalidLattice(format!(
                    "ladder rails need at least 3 sites, got {len}: the wrap-around rail bond would duplicate a direct bond"
                )));
            }
            for rail in 0..2 {
                for i in 0..len {
                    edges.push((rail * len + i, rail * len + (i + 1) % len, BondClass::Rail));
                }
            }
            for i in 0..len {
                edges.push((i, len + i, BondClass::Rung));
            }
            (LatticeKind::Ladder, (2, len), "rail-major: site = rail * len + i")
        }
        Geometry::Torus(rows, cols) => {
            if rows < 3 || cols < 3 {
                return Err(Error::InvalidLattice(format!(
                    "torus extents must both be at least 3, got {rows}x{cols}: wrap-around bonds would duplicate direct bonds"
                )));
            }
            for r in 0..rows {
                for c in 0..cols {
                    let i = r * cols + c;
                    edges.push((i, r * cols + (c + 1) % cols, BondClass::Row));
                    edges.push((i, ((r + 1) % rows) * cols + c, BondClass::Column));
                }
            }
            (LatticeKind::Torus, (rows, cols), "row-major: site = row * cols + col")
        }
    };

    let n_sites = dims.0 * dims.1;
    let mut seen = BTreeSet::new();
    let mut bonds = Vec::with_capacity(edges.len());
    for (a, b, class) in edges {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if seen.insert((a, b)) {
            bonds.push(Bond { a, b, class });
        }
    }
    bonds.sort_by_key(|bond| (bond.class, bond.a, bond.b));

    Ok(Lattice {
        kind,
        n_sites,
        dimensions: dims,
        bonds,
        site_ordering: ordering.to_string(),
    })
}

impl Lattice {
    pub fn degree(&self, site: usize) -> usize {
        self.bonds.iter().filter(|b| b.a == site || b.b == site).count()
    }

    pub fn bond_between(&self, i: usize, j: usize) -> Option<&Bond> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.bonds.iter().find(|bond| bond.a == a && bond.b == b)
    }

    pub fn is_bond(&self, i: usize, j: usize) -> bool {
        self.bond_between(i, j).is_some()
    }

    /// Distinct bond classes present, in a fixed order.
    pub fn bond_classes(&self) -> Vec<BondClass> {
        let set: BTreeSet<BondClass> = self.bonds.iter().map(|b| b.class).collect();
        set.into_iter().collect()
    }

    pub fn bonds_of(&self, class: BondClass) -> impl Iterator<Item = &Bond> {
        self.bonds.iter().filter(move |b| b.class == class)
    }

    /// First bond of a class; all bonds of one class are related by a lattice
    /// translation or the rail exchange.
    pub fn representative(&self, class: BondClass) -> Option<&Bond> {
        self.bonds_of(class).next()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("lattice serializes")
    }
}
