//! Abel–Jacobi multidegrees and extension of the Abel–Jacobi section.
//!
//! The section attached to `(k; a_1, ..., a_n)` sends a pointed curve to
//! `ω^{-k}(a_1 p_1 + ... + a_n p_n)`. On a dual graph its multidegree is
//! `D(v) = -k (2 h_v - 2 + val v) + sum_{i marked on v} a_i`.
//!
//! The section extends over all stable curves for a parameter `φ` iff this
//! line bundle is φ-stable on every vine with at least two nodes, so the
//! extension question only sees the values of `φ` on vines. A
//! [`VinePhiTable`] records exactly those values. Whether a table passing
//! every check comes from a global parameter on all stable curves is not
//! decided here.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chamber::small_perturbation_chambers;
use crate::error::{Error, Result};
use crate::graph::DualGraph;
use crate::rational::{half, int, Rational, RationalString};
use crate::stability::{
    is_nondegenerate, is_small_perturbation, is_stable, Perturbations, PhiVector, SheafDatum,
    MAX_REDRAWS,
};
use crate::vine::{enumerate_vines, VineCurve};

/// Twist data `(k; a_1, ..., a_n)` in genus `g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AJDatum {
    pub g: u32,
    pub k: i64,
    pub a: Vec<i64>,
}

impl AJDatum {
    /// Checks `k(2 - 2g) + sum(a) = 0`.
    pub fn new(g: u32, k: i64, a: Vec<i64>) -> Result<Self> {
        let aj = AJDatum { g, k, a };
        let total = aj.canonical_twist() + aj.a.iter().sum::<i64>();
        if total != 0 {
            return Err(Error::DegreeConstraint(format!(
                "k(2-2g) + sum(a) = {total} for g={g}, k={}, a={:?}",
                aj.k, aj.a
            )));
        }
        Ok(aj)
    }

    pub fn n(&self) -> u32 {
        self.a.len() as u32
    }

    /// `k(2 - 2g)`.
    pub fn canonical_twist(&self) -> i64 {
        self.k * (2 - 2 * self.g as i64)
    }

    pub fn is_trivial(&self) -> bool {
        self.canonical_twist() == 0 && self.a.iter().all(|&x| x == 0)
    }

    /// `Some((i, j))` (1-based) when `a = e_i - e_j`.
    pub fn unit_difference(&self) -> Option<(u32, u32)> {
        let mut plus = None;
        let mut minus = None;
        for (idx, &x) in self.a.iter().enumerate() {
            match x {
                0 => {}
                1 if plus.is_none() => plus = Some(idx as u32 + 1),
                -1 if minus.is_none() => minus = Some(idx as u32 + 1),
                _ => return None,
            }
        }
        plus.zip(minus)
    }

    fn sum_over(&self, markings: impl IntoIterator<Item = u32>) -> i64 {
        markings.into_iter().map(|m| self.a[m as usize - 1]).sum()
    }
}

/// Multidegree of the Abel–Jacobi line bundle on `graph`, in vertex order.
pub fn aj_multidegree(graph: &DualGraph, aj: &AJDatum) -> Result<Vec<i64>> {
    AJDatum::new(aj.g, aj.k, aj.a.clone())?;
    if graph.genus() != aj.g as i64 || graph.n() != aj.n() {
        return Err(Error::Precondition(format!(
            "twist data for (g, n) = ({}, {}) on a graph with (g, n) = ({}, {})",
            aj.g,
            aj.n(),
            graph.genus(),
            graph.n()
        )));
    }
    Ok(graph
        .vertices()
        .iter()
        .enumerate()
        .map(|(pos, v)| {
            -aj.k * graph.canonical_degree(pos) + aj.sum_over(v.markings.iter().copied())
        })
        .collect())
}

/// Bidegree `(side 1, side 2)` of the Abel–Jacobi bundle on `vine`.
pub fn vine_bidegree(vine: &VineCurve, aj: &AJDatum) -> (i64, i64) {
    let e = vine.e as i64;
    let d1 = -aj.k * (2 * vine.g1 as i64 - 2 + e) + aj.sum_over(vine.side1.iter().copied());
    let d2 = -aj.k * (2 * vine.g2 as i64 - 2 + e) + aj.sum_over(vine.side2());
    (d1, d2)
}

/// Stability parameter values `φ(C1)` on the vines of a fixed `(g, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VinePhiTable {
    pub g: u32,
    pub n: u32,
    entries: BTreeMap<VineCurve, Rational>,
}

#[derive(Serialize, Deserialize)]
struct TableEntryJson {
    vine: VineCurve,
    phi: RationalString,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    g: u32,
    n: u32,
    entries: Vec<TableEntryJson>,
}

impl VinePhiTable {
    /// Rejects entries on walls (`φ(C1) + e/2 ∈ ℤ`).
    pub fn new(g: u32, n: u32, entries: BTreeMap<VineCurve, Rational>) -> Result<Self> {
        for (vine, x) in &entries {
            if vine.genus() != g || vine.n != n {
                return Err(Error::Precondition(format!(
                    "vine {vine} is not of genus {g} with {n} markings"
                )));
            }
            if !is_nondegenerate(&vine.to_graph(), &PhiVector::on_vine(*x))? {
                return Err(Error::Precondition(format!(
                    "degenerate value on vine {vine}"
                )));
            }
        }
        Ok(VinePhiTable { g, n, entries })
    }

    /// `φ(C1) = 0` on one-node vines and a small positive perturbation on the others.
    pub fn near_zero(g: u32, n: u32, seed: u64) -> Result<Self> {
        let mut eps = Perturbations::new(seed);
        let entries = enumerate_vines(g, n, 1)
            .into_iter()
            .map(|v| {
                let x = if v.e == 1 { int(0) } else { eps.draw() };
                (v, x)
            })
            .collect();
        VinePhiTable::new(g, n, entries)
    }

    pub fn get(&self, vine: &VineCurve) -> Option<Rational> {
        self.entries.get(vine).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&VineCurve, &Rational)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn missing(&self, min_edges: u32) -> Vec<VineCurve> {
        enumerate_vines(self.g, self.n, min_edges)
            .into_iter()
            .filter(|v| !self.entries.contains_key(v))
            .collect()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let json = TableJson {
            g: self.g,
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|(v, x)| TableEntryJson {
                    vine: v.clone(),
                    phi: RationalString(*x),
                })
                .collect(),
        };
        serde_json::to_value(json).expect("table serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let parsed: TableJson = serde_json::from_str(json)?;
        let mut entries = BTreeMap::new();
        for e in parsed.entries {
            let vine = VineCurve::new(e.vine.g1, &e.vine.side1, e.vine.g2, e.vine.e, e.vine.n);
            if entries.insert(vine.clone(), e.phi.0).is_some() {
                return Err(Error::Precondition(format!("vine {vine} listed twice")));
            }
        }
        VinePhiTable::new(parsed.g, parsed.n, entries)
    }
}

/// A vine on which the Abel–Jacobi bundle, of the given bidegree, fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub vine: VineCurve,
    pub bidegree: (i64, i64),
}

impl Witness {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "e": self.vine.e,
            "g1": self.vine.g1,
            "S": self.vine.side1,
            "g2": self.vine.g2,
            "n": self.vine.n,
            "bidegree": [self.bidegree.0, self.bidegree.1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionCheck {
    pub extends: bool,
    pub witness: Option<Witness>,
}

/// Whether the Abel–Jacobi bundle is stable on every vine with at least
/// two nodes for the parameters in `table`; otherwise the first failing
/// vine in canonical order.
pub fn sigma_extends(aj: &AJDatum, table: &VinePhiTable) -> Result<ExtensionCheck> {
    AJDatum::new(aj.g, aj.k, aj.a.clone())?;
    if table.g != aj.g || table.n != aj.n() {
        return Err(Error::Precondition(format!(
            "table for (g, n) = ({}, {}), twist data for ({}, {})",
            table.g,
            table.n,
            aj.g,
            aj.n()
        )));
    }
    let missing = table.missing(2);
    if !missing.is_empty() {
        return Err(Error::IncompleteTable(
            missing.iter().map(|v| v.to_string()).collect(),
        ));
    }
    for vine in enumerate_vines(aj.g, aj.n(), 2) {
        let x = table.get(&vine).expect("coverage checked");
        let graph = vine.to_graph();
        let bidegree = vine_bidegree(&vine, aj);
        let bundle = SheafDatum::line_bundle(&graph, vec![bidegree.0, bidegree.1])?;
        if !is_stable(&graph, &PhiVector::on_vine(x), &bundle)? {
            return Ok(ExtensionCheck {
                extends: false,
                witness: Some(Witness { vine, bidegree }),
            });
        }
    }
    Ok(ExtensionCheck {
        extends: true,
        witness: None,
    })
}

/// The parameter making `O(p_i - p_j)` stable on all vines: `φ(C1) = 0` on
/// one-node vines, and `1/2 [i ∈ S] - 1/2 [j ∈ S] + ε` on the others, with
/// `ε` drawn from [`Perturbations`] and redrawn until the entry is
/// nondegenerate, a small perturbation of 0, and stabilizes `O(p_i - p_j)`.
pub fn construct_prop_phi(g: u32, n: u32, i: u32, j: u32, seed: u64) -> Result<VinePhiTable> {
    if i == j || i == 0 || j == 0 || i > n || j > n {
        return Err(Error::Precondition(format!(
            "need distinct markings in 1..={n}, got i={i}, j={j}"
        )));
    }
    if g < 1 {
        return Err(Error::Precondition("genus must be at least 1".into()));
    }
    let mut a = vec![0i64; n as usize];
    a[i as usize - 1] = 1;
    a[j as usize - 1] = -1;
    let aj = AJDatum::new(g, 0, a)?;

    let mut eps = Perturbations::new(seed);
    let mut entries = BTreeMap::new();
    for vine in enumerate_vines(g, n, 1) {
        if vine.e == 1 {
            entries.insert(vine, int(0));
            continue;
        }
        let indicator = |m: u32| {
            if vine.side1.contains(&m) {
                half()
            } else {
                int(0)
            }
        };
        let base = indicator(i) - indicator(j);
        let graph = vine.to_graph();
        let bidegree = vine_bidegree(&vine, &aj);
        let bundle = SheafDatum::line_bundle(&graph, vec![bidegree.0, bidegree.1])?;
        let mut accepted = None;
        for _ in 0..MAX_REDRAWS {
            let phi = PhiVector::on_vine(base + eps.draw());
            if is_nondegenerate(&graph, &phi)?
                && is_small_perturbation(&graph, &phi)?
                && is_stable(&graph, &phi, &bundle)?
            {
                accepted = Some(phi.values()[0]);
                break;
            }
        }
        let x = accepted.ok_or_else(|| Error::Construction(vine.to_string()))?;
        entries.insert(vine, x);
    }
    VinePhiTable::new(g, n, entries)
}

/// Answer of [`classify_extension`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub extends: bool,
    pub witness: Option<Witness>,
    pub table: Option<VinePhiTable>,
}

pub const GLOBAL_PARAMETER_NOTE: &str = "parameters are constructed and checked on vines only; \
whether a vine table comes from a global stability parameter is not decided";

impl Classification {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "extends": self.extends,
            "witness_vine": self.witness.as_ref().map(Witness::to_json_value),
            "phi_table": self.table.as_ref().map(VinePhiTable::to_json_value),
            "note": GLOBAL_PARAMETER_NOTE,
        })
    }
}

/// Whether no small-perturbation chamber of `vine` makes `bidegree` stable,
/// decided by enumerating those chambers.
pub fn certify_obstruction(vine: &VineCurve, bidegree: (i64, i64)) -> Result<bool> {
    let chambers = small_perturbation_chambers(vine)?;
    Ok(chambers.iter().all(|c| !c.contains_line_bundle(bidegree)))
}

/// Decides whether the section of a nontrivial `aj` extends for some
/// nondegenerate small perturbation of 0.
///
/// Yes exactly when `k(2-2g) = 0` and `a = ±(e_i - e_j)`; the answer then
/// carries a table from [`construct_prop_phi`]. Otherwise the answer
/// carries the first vine (with at least two nodes, in canonical order)
/// on which no small-perturbation chamber stabilizes the bundle.
pub fn classify_extension(aj: &AJDatum, seed: u64) -> Result<Classification> {
    let aj = AJDatum::new(aj.g, aj.k, aj.a.clone())?;
    if aj.is_trivial() {
        return Err(Error::TrivialTwist);
    }
    if aj.canonical_twist() == 0 {
        if let Some((i, j)) = aj.unit_difference() {
            let table = construct_prop_phi(aj.g, aj.n(), i, j, seed)?;
            let check = sigma_extends(&aj, &table)?;
            if !check.extends {
                let vine = check
                    .witness
                    .map(|w| w.vine.to_string())
                    .unwrap_or_default();
                return Err(Error::Construction(vine));
            }
            return Ok(Classification {
                extends: true,
                witness: None,
                table: Some(table),
            });
        }
    }
    for vine in enumerate_vines(aj.g, aj.n(), 2) {
        let bidegree = vine_bidegree(&vine, &aj);
        if certify_obstruction(&vine, bidegree)? {
            return Ok(Classification {
                extends: false,
                witness: Some(Witness { vine, bidegree }),
                table: None,
            });
        }
    }
    Err(Error::Precondition(format!(
        "no obstructing vine found for g={}, k={}, a={:?}",
        aj.g, aj.k, aj.a
    )))
}
