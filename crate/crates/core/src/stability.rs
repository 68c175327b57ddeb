//! Stability parameters and the stability inequality for rank-1
//! torsion-free sheaves, modelled combinatorially.
//!
//! A sheaf datum `F = (S, D)` records the set `S` of nodes where `F` fails to
//! be locally free and a multidegree `D` on the partial normalization at `S`.
//! For a subcurve `C0`,
//!
//! * `deg_C0(F) = sum_{v in C0} D(v) + #{e in S with both ends in C0}`,
//! * `delta_C0(F) = #{e in S crossing C0}`,
//!
//! and `F` is φ-stable (semistable) when for every nonempty proper `C0`
//!
//! ```text
//! | deg_C0(F) - φ(C0) + delta_C0(F)/2 | <  (cr(C0) - delta_C0(F)) / 2    (resp. <=)
//! ```
//!
//! where `cr(C0)` counts the edges joining `C0` to its complement.
//!
//! Equality in the inequality forces `deg_C0 = φ(C0) - cr/2` or
//! `deg_C0 = φ(C0) + cr/2 - delta`; since `cr` and `delta` are integers, an
//! equality instance exists iff `φ(C0) + cr(C0)/2` is an integer. That is the
//! wall criterion used by [`is_nondegenerate`]; `oracle::wall_equality_search`
//! checks it by brute force.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{crosses, DualGraph, EdgeId, Subcurve, VertexId};
use crate::rational::{
    self, int, is_integral, strict_ceil, strict_floor, Rational, RationalString,
};
use crate::vine::VineCurve;

/// Exact stability parameter on one dual graph: a rational weight per vertex,
/// summing to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiVector {
    vertex_ids: Vec<VertexId>,
    values: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct PhiJson {
    values: BTreeMap<VertexId, RationalString>,
}

impl PhiVector {
    /// Values in vertex order of `graph`.
    pub fn new(graph: &DualGraph, values: Vec<Rational>) -> Result<Self> {
        if values.len() != graph.num_vertices() {
            return Err(Error::GraphMismatch(format!(
                "{} values for {} vertices",
                values.len(),
                graph.num_vertices()
            )));
        }
        let total = rational::sum(&values);
        if !total.is_zero() {
            return Err(Error::NonzeroTotal(rational::format_rational(&total)));
        }
        Ok(PhiVector {
            vertex_ids: graph.vertex_ids(),
            values,
        })
    }

    pub fn from_map(graph: &DualGraph, values: &BTreeMap<VertexId, Rational>) -> Result<Self> {
        if let Some(extra) = values
            .keys()
            .find(|id| graph.vertex_position(**id).is_none())
        {
            return Err(Error::GraphMismatch(format!("unknown vertex id {extra}")));
        }
        let ordered = graph
            .vertex_ids()
            .iter()
            .map(|id| {
                values
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::GraphMismatch(format!("no value for vertex {id}")))
            })
            .collect::<Result<Vec<_>>>()?;
        PhiVector::new(graph, ordered)
    }

    pub fn zero(graph: &DualGraph) -> Self {
        PhiVector {
            vertex_ids: graph.vertex_ids(),
            values: vec![Rational::zero(); graph.num_vertices()],
        }
    }

    /// `(x, -x)` on the graph of `vine`.
    pub fn on_vine(x: Rational) -> Self {
        PhiVector {
            vertex_ids: vec![0, 1],
            values: vec![x, -x],
        }
    }

    pub fn from_json(graph: &DualGraph, json: &str) -> Result<Self> {
        let parsed: PhiJson = serde_json::from_str(json)?;
        let map = parsed.values.into_iter().map(|(k, v)| (k, v.0)).collect();
        PhiVector::from_map(graph, &map)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let values = self
            .vertex_ids
            .iter()
            .zip(&self.values)
            .map(|(id, v)| (*id, RationalString(*v)))
            .collect();
        serde_json::to_value(PhiJson { values }).expect("phi serializes")
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn vertex_ids(&self) -> &[VertexId] {
        &self.vertex_ids
    }

    fn check_graph(&self, graph: &DualGraph) -> Result<()> {
        if self.vertex_ids != graph.vertex_ids() {
            return Err(Error::GraphMismatch(format!(
                "parameter on vertices {:?}, graph has {:?}",
                self.vertex_ids,
                graph.vertex_ids()
            )));
        }
        Ok(())
    }

    pub(crate) fn of_mask(&self, mask: u64) -> Rational {
        self.values
            .iter()
            .enumerate()
            .filter(|(p, _)| (mask >> p) & 1 == 1)
            .fold(Rational::zero(), |acc, (_, v)| acc + v)
    }
}

/// `φ(C0)`, the sum of the parameter over the vertices of `c0`.
pub fn phi_of(graph: &DualGraph, phi: &PhiVector, c0: &Subcurve) -> Result<Rational> {
    phi.check_graph(graph)?;
    c0.check(graph)?;
    Ok(phi.of_mask(c0.mask()))
}

/// Combinatorial rank-1 torsion-free sheaf: non-free nodes `S` and the
/// multidegree `D` on the partial normalization at `S`.
///
/// Ordering is lexicographic in `(sorted S, D)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SheafDatum {
    nonfree: BTreeSet<EdgeId>,
    degrees: Vec<i64>,
    vertex_ids: Vec<VertexId>,
}

#[derive(Serialize, Deserialize)]
struct SheafJson {
    #[serde(rename = "S")]
    nonfree: Vec<EdgeId>,
    #[serde(rename = "D")]
    degrees: BTreeMap<VertexId, i64>,
}

impl SheafDatum {
    pub fn new(graph: &DualGraph, nonfree: &[EdgeId], degrees: Vec<i64>) -> Result<Self> {
        if let Some(&bad) = nonfree.iter().find(|&&e| graph.edge_position(e).is_none()) {
            return Err(Error::UnknownEdge(bad));
        }
        if degrees.len() != graph.num_vertices() {
            return Err(Error::GraphMismatch(format!(
                "{} degrees for {} vertices",
                degrees.len(),
                graph.num_vertices()
            )));
        }
        Ok(SheafDatum {
            nonfree: nonfree.iter().copied().collect(),
            degrees,
            vertex_ids: graph.vertex_ids(),
        })
    }

    pub fn line_bundle(graph: &DualGraph, degrees: Vec<i64>) -> Result<Self> {
        SheafDatum::new(graph, &[], degrees)
    }

    pub fn trivial(graph: &DualGraph) -> Self {
        SheafDatum {
            nonfree: BTreeSet::new(),
            degrees: vec![0; graph.num_vertices()],
            vertex_ids: graph.vertex_ids(),
        }
    }

    pub fn from_json(graph: &DualGraph, json: &str) -> Result<Self> {
        let parsed: SheafJson = serde_json::from_str(json)?;
        if let Some(extra) = parsed
            .degrees
            .keys()
            .find(|id| graph.vertex_position(**id).is_none())
        {
            return Err(Error::GraphMismatch(format!("unknown vertex id {extra}")));
        }
        let degrees = graph
            .vertex_ids()
            .iter()
            .map(|id| {
                parsed
                    .degrees
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::GraphMismatch(format!("no degree for vertex {id}")))
            })
            .collect::<Result<Vec<_>>>()?;
        SheafDatum::new(graph, &parsed.nonfree, degrees)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(SheafJson {
            nonfree: self.nonfree.iter().copied().collect(),
            degrees: self
                .vertex_ids
                .iter()
                .copied()
                .zip(self.degrees.iter().copied())
                .collect(),
        })
        .expect("sheaf datum serializes")
    }

    pub fn nonfree(&self) -> &BTreeSet<EdgeId> {
        &self.nonfree
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn is_line_bundle(&self) -> bool {
        self.nonfree.is_empty()
    }

    /// `sum D + #S`.
    pub fn total_degree(&self) -> i64 {
        self.degrees.iter().sum::<i64>() + self.nonfree.len() as i64
    }

    fn resolve(&self, graph: &DualGraph) -> Result<Resolved<'_>> {
        if self.vertex_ids != graph.vertex_ids() {
            return Err(Error::GraphMismatch(
                "sheaf datum built on another graph".into(),
            ));
        }
        let mut nonfree = vec![false; graph.num_edges()];
        for &id in &self.nonfree {
            let pos = graph.edge_position(id).ok_or(Error::UnknownEdge(id))?;
            nonfree[pos] = true;
        }
        Ok(Resolved {
            nonfree,
            degrees: &self.degrees,
        })
    }

    /// `(deg_C0(F), delta_C0(F))`.
    pub fn degree_on(&self, graph: &DualGraph, c0: &Subcurve) -> Result<(i64, i64)> {
        c0.check(graph)?;
        let r = self.resolve(graph)?;
        Ok(r.degree_and_delta(graph, c0.mask()))
    }

    /// Compact form `(d1,d2,..)` for line bundles, `{e1,e2}(d1,..)` otherwise.
    pub fn compact(&self) -> String {
        let d: Vec<String> = self.degrees.iter().map(|x| x.to_string()).collect();
        if self.nonfree.is_empty() {
            format!("({})", d.join(","))
        } else {
            let s: Vec<String> = self.nonfree.iter().map(|x| x.to_string()).collect();
            format!("{{{}}}({})", s.join(","), d.join(","))
        }
    }
}

impl fmt::Display for SheafDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.compact())
    }
}

struct Resolved<'a> {
    nonfree: Vec<bool>,
    degrees: &'a [i64],
}

impl Resolved<'_> {
    fn degree_and_delta(&self, graph: &DualGraph, mask: u64) -> (i64, i64) {
        degree_and_delta(graph, &self.nonfree, self.degrees, mask)
    }
}

fn degree_and_delta(graph: &DualGraph, nonfree: &[bool], degrees: &[i64], mask: u64) -> (i64, i64) {
    let mut deg: i64 = degrees
        .iter()
        .enumerate()
        .filter(|(p, _)| (mask >> p) & 1 == 1)
        .map(|(_, d)| d)
        .sum();
    let mut delta = 0;
    for (e, &is_nonfree) in nonfree.iter().enumerate() {
        if !is_nonfree {
            continue;
        }
        let [a, b] = graph.ends(e);
        if crosses(mask, a, b) {
            delta += 1;
        } else if (mask >> a) & 1 == 1 {
            deg += 1;
        }
    }
    (deg, delta)
}

/// Which side of the inequality to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Strictness {
    Stable,
    Semistable,
}

/// The doubled inequality `|2 deg - 2φ + δ|` vs `cr - δ`.
fn inequality_holds(deg: i64, delta: i64, cr: i64, phi_c0: Rational, mode: Strictness) -> bool {
    let lhs = (int(2 * deg + delta) - phi_c0 * 2).abs();
    let rhs = int(cr - delta);
    match mode {
        Strictness::Stable => lhs < rhs,
        Strictness::Semistable => lhs <= rhs,
    }
}

fn check_all(graph: &DualGraph, phi: &PhiVector, f: &SheafDatum, mode: Strictness) -> Result<bool> {
    phi.check_graph(graph)?;
    let resolved = f.resolve(graph)?;
    Ok(graph.subcurves().all(|c0| {
        let mask = c0.mask();
        let (deg, delta) = resolved.degree_and_delta(graph, mask);
        let cr = graph.crossing_count_mask(mask) as i64;
        inequality_holds(deg, delta, cr, phi.of_mask(mask), mode)
    }))
}

pub fn is_stable(graph: &DualGraph, phi: &PhiVector, f: &SheafDatum) -> Result<bool> {
    check_all(graph, phi, f, Strictness::Stable)
}

pub fn is_semistable(graph: &DualGraph, phi: &PhiVector, f: &SheafDatum) -> Result<bool> {
    check_all(graph, phi, f, Strictness::Semistable)
}

/// Whether `φ(C0) + cr(C0)/2` is an integer, i.e. `C0` lies on a wall.
pub fn on_wall(phi_c0: Rational, cr: usize) -> bool {
    is_integral(&(phi_c0 + Rational::new(cr as i64, 2)))
}

/// First subcurve on a wall, if any.
pub fn wall_witness(graph: &DualGraph, phi: &PhiVector) -> Result<Option<Subcurve>> {
    phi.check_graph(graph)?;
    Ok(graph
        .subcurves()
        .find(|c0| on_wall(phi.of_mask(c0.mask()), graph.crossing_count_mask(c0.mask()))))
}

pub fn is_nondegenerate(graph: &DualGraph, phi: &PhiVector) -> Result<bool> {
    Ok(wall_witness(graph, phi)?.is_none())
}

/// `|φ(C0)| < cr(C0)/2` for every subcurve. Does not imply nondegeneracy.
pub fn is_small_perturbation(graph: &DualGraph, phi: &PhiVector) -> Result<bool> {
    phi.check_graph(graph)?;
    Ok(graph.subcurves().all(|c0| {
        let cr = graph.crossing_count_mask(c0.mask()) as i64;
        phi.of_mask(c0.mask()).abs() * 2 < int(cr)
    }))
}

/// Small-perturbation test through stability of the trivial line bundle.
pub fn equivalent_small_perturbation_check(graph: &DualGraph, phi: &PhiVector) -> Result<bool> {
    is_stable(graph, phi, &SheafDatum::trivial(graph))
}

/// Every φ-stable sheaf datum of total degree `d`, sorted by `(S, D)`.
/// With `include_nonfree = false` only line bundles are returned.
pub fn stable_sheaf_data(
    graph: &DualGraph,
    phi: &PhiVector,
    d: i64,
    include_nonfree: bool,
) -> Result<Vec<SheafDatum>> {
    phi.check_graph(graph)?;
    if !is_nondegenerate(graph, phi)? {
        return Err(Error::DegenerateParameter);
    }
    let ne = graph.num_edges();
    if include_nonfree && ne >= 31 {
        return Err(Error::Precondition(format!(
            "{ne} edges is too many to enumerate"
        )));
    }
    let subsets: Vec<u64> = if include_nonfree {
        (0..1u64 << ne).collect()
    } else {
        vec![0]
    };
    let mut out: Vec<SheafDatum> = subsets
        .par_iter()
        .flat_map_iter(|&s_mask| stable_with_nonfree(graph, phi, d, s_mask))
        .collect();
    out.sort();
    Ok(out)
}

fn stable_with_nonfree(graph: &DualGraph, phi: &PhiVector, d: i64, s_mask: u64) -> Vec<SheafDatum> {
    let nv = graph.num_vertices();
    let nonfree: Vec<bool> = (0..graph.num_edges())
        .map(|e| (s_mask >> e) & 1 == 1)
        .collect();
    let s_ids: Vec<EdgeId> = graph
        .edges()
        .iter()
        .enumerate()
        .filter(|(p, _)| nonfree[*p])
        .map(|(_, e)| e.id)
        .collect();
    let remaining = d - s_ids.len() as i64;

    let mut results = Vec::new();
    let make = |degrees: Vec<i64>| SheafDatum {
        nonfree: s_ids.iter().copied().collect(),
        degrees,
        vertex_ids: graph.vertex_ids(),
    };
    if nv == 1 {
        results.push(make(vec![remaining]));
        return results;
    }

    // Singleton subcurves bound each D(v):
    // deg_v in (φ_v - cr_v/2, φ_v + cr_v/2 - δ_v), deg_v = D(v) + #(S-loops at v).
    let windows: Vec<(i64, i64)> = (0..nv)
        .map(|v| {
            let (mut cr, mut delta, mut loops) = (0i64, 0i64, 0i64);
            for (e, &in_s) in nonfree.iter().enumerate() {
                let [a, b] = graph.ends(e);
                if a == v && b == v {
                    loops += in_s as i64;
                } else if a == v || b == v {
                    cr += 1;
                    delta += in_s as i64;
                }
            }
            let phi_v = phi.values[v];
            let lo = strict_ceil(&(phi_v - Rational::new(cr, 2))) - loops;
            let hi = strict_floor(&(phi_v + Rational::new(cr, 2) - int(delta))) - loops;
            (lo, hi)
        })
        .collect();

    let mut degrees = vec![0i64; nv];
    enumerate_windows(&windows, 0, remaining, &mut degrees, &mut |candidate| {
        let stable = graph.subcurves().all(|c0| {
            let mask = c0.mask();
            let (deg, delta) = degree_and_delta(graph, &nonfree, candidate, mask);
            let cr = graph.crossing_count_mask(mask) as i64;
            inequality_holds(deg, delta, cr, phi.of_mask(mask), Strictness::Stable)
        });
        if stable {
            results.push(make(candidate.to_vec()));
        }
    });
    results
}

fn enumerate_windows(
    windows: &[(i64, i64)],
    v: usize,
    remaining: i64,
    degrees: &mut Vec<i64>,
    visit: &mut dyn FnMut(&[i64]),
) {
    let last = windows.len() - 1;
    if v == last {
        let (lo, hi) = windows[v];
        if (lo..=hi).contains(&remaining) {
            degrees[v] = remaining;
            visit(degrees);
        }
        return;
    }
    let rest_lo: i64 = windows[v + 1..].iter().map(|w| w.0).sum();
    let rest_hi: i64 = windows[v + 1..].iter().map(|w| w.1).sum();
    let (lo, hi) = windows[v];
    for x in lo.max(remaining - rest_hi)..=hi.min(remaining - rest_lo) {
        degrees[v] = x;
        enumerate_windows(windows, v + 1, remaining - x, degrees, visit);
    }
}

/// Outcome of the support check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SupportCheck {
    Holds,
    /// A stable degree-0 datum with `deg_C0 >= cr(C0) - delta_C0` on `subcurve`.
    Violation {
        datum: SheafDatum,
        subcurve: Subcurve,
    },
}

/// For a nondegenerate small perturbation, checks that every stable
/// degree-0 datum satisfies `deg_C0(F) < cr(C0) - delta_C0(F)` on every
/// subcurve, so no subcurve carries a section forcing `deg_C0 >= cr(C0)`.
pub fn verify_support_lemma(graph: &DualGraph, phi: &PhiVector) -> Result<SupportCheck> {
    if !is_small_perturbation(graph, phi)? {
        return Err(Error::Precondition(
            "parameter is not a small perturbation of 0".into(),
        ));
    }
    if !is_nondegenerate(graph, phi)? {
        return Err(Error::Precondition("parameter is degenerate".into()));
    }
    for datum in stable_sheaf_data(graph, phi, 0, true)? {
        let r = datum.resolve(graph)?;
        for c0 in graph.subcurves() {
            let (deg, delta) = r.degree_and_delta(graph, c0.mask());
            let cr = graph.crossing_count_mask(c0.mask()) as i64;
            if deg >= cr - delta {
                return Ok(SupportCheck::Violation {
                    datum,
                    subcurve: c0,
                });
            }
        }
    }
    Ok(SupportCheck::Holds)
}

/// Deterministic stream of small positive perturbations `1/(100 p)` over
/// distinct primes `p`, starting at a seed-dependent prime.
#[derive(Debug, Clone)]
pub struct Perturbations {
    next_index: usize,
}

impl Perturbations {
    pub fn new(seed: u64) -> Self {
        Perturbations {
            next_index: (seed % 1000) as usize,
        }
    }

    pub fn draw(&mut self) -> Rational {
        let p = rational::nth_prime(self.next_index);
        self.next_index += 1;
        Rational::new(1, 100 * p)
    }
}

/// How many perturbations a constructor tries before giving up.
pub const MAX_REDRAWS: usize = 64;

/// A nondegenerate parameter `(t + ε, -t - ε)` on `vine` for which the line
/// bundles of bidegree `(t, -t)` are stable.
pub fn make_t_stable_phi(vine: &VineCurve, t: i64, seed: u64) -> Result<PhiVector> {
    let graph = vine.to_graph();
    let mut eps = Perturbations::new(seed);
    let target = SheafDatum::line_bundle(&graph, vec![t, -t])?;
    for _ in 0..MAX_REDRAWS {
        let phi = PhiVector::on_vine(int(t) + eps.draw());
        if is_nondegenerate(&graph, &phi)? && is_stable(&graph, &phi, &target)? {
            return Ok(phi);
        }
    }
    Err(Error::Construction(vine.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn vine(e: usize) -> DualGraph {
        DualGraph::new(1, &[(0, &[1]), (1, &[])], &vec![(0, 1); e]).unwrap()
    }

    fn side1() -> Subcurve {
        Subcurve::from_positions(&[0])
    }

    #[test]
    fn phi_of_examples() {
        let g = vine(2);
        let phi = PhiVector::on_vine(rat(3, 10));
        assert_eq!(phi_of(&g, &phi, &side1()).unwrap(), rat(3, 10));
        let c = side1().complement(&g);
        assert_eq!(
            phi_of(&g, &phi, &side1()).unwrap() + phi_of(&g, &phi, &c).unwrap(),
            int(0)
        );

        let path = DualGraph::new(
            1,
            &[(0, &[1]), (0, &[]), (1, &[])],
            &[(0, 1), (0, 1), (1, 2)],
        )
        .unwrap();
        let phi = PhiVector::new(&path, vec![rat(1, 4), rat(1, 4), rat(-1, 2)]).unwrap();
        assert_eq!(
            phi_of(&path, &phi, &Subcurve::from_positions(&[0, 1])).unwrap(),
            rat(1, 2)
        );
        assert!(phi_of(&vine(3), &PhiVector::zero(&path), &side1()).is_err());
    }

    #[test]
    fn phi_rejects_nonzero_total() {
        assert!(matches!(
            PhiVector::new(&vine(2), vec![rat(1, 2), rat(1, 2)]),
            Err(Error::NonzeroTotal(_))
        ));
    }

    #[test]
    fn two_node_vine_line_bundles() {
        let g = vine(2);
        let phi = PhiVector::on_vine(rat(3, 10));
        let lb = |a: i64| SheafDatum::line_bundle(&g, vec![a, -a]).unwrap();
        assert!(is_stable(&g, &phi, &lb(0)).unwrap());
        assert!(is_stable(&g, &phi, &lb(1)).unwrap());
        assert!(!is_stable(&g, &phi, &lb(2)).unwrap());
        assert!(!is_stable(&g, &phi, &lb(-1)).unwrap());
    }

    #[test]
    fn two_node_vine_nonfree_datum() {
        let g = vine(2);
        let phi = PhiVector::on_vine(rat(3, 10));
        let f = SheafDatum::new(&g, &[0], vec![0, -1]).unwrap();
        assert_eq!(f.total_degree(), 0);
        assert!(is_stable(&g, &phi, &f).unwrap());
    }

    #[test]
    fn unknown_edge_rejected() {
        assert!(matches!(
            SheafDatum::new(&vine(2), &[5], vec![0, 0]),
            Err(Error::UnknownEdge(5))
        ));
    }

    #[test]
    fn separating_node_unique_bidegree() {
        let g = vine(1);
        for x in [rat(1, 5), rat(7, 3), rat(-13, 10), rat(2, 7)] {
            let phi = PhiVector::on_vine(x);
            let nearest = rational::nearest_integer(&x);
            let all = stable_sheaf_data(&g, &phi, 0, true).unwrap();
            assert_eq!(
                all,
                vec![SheafDatum::line_bundle(&g, vec![nearest, -nearest]).unwrap()]
            );
        }
    }

    #[test]
    fn nondegeneracy_examples() {
        let g2 = vine(2);
        assert!(is_nondegenerate(&g2, &PhiVector::on_vine(rat(1, 2))).unwrap());
        assert!(!is_nondegenerate(&g2, &PhiVector::on_vine(int(0))).unwrap());
        assert!(is_nondegenerate(&vine(1), &PhiVector::on_vine(int(0))).unwrap());
        // on the wall φ(C1) = 0, e = 2: t = 1, δ = 0 gives equality, so
        // (1,-1) is semistable but not stable
        let phi = PhiVector::on_vine(int(0));
        let f = SheafDatum::line_bundle(&g2, vec![1, -1]).unwrap();
        assert!(is_semistable(&g2, &phi, &f).unwrap());
        assert!(!is_stable(&g2, &phi, &f).unwrap());
    }

    #[test]
    fn small_perturbation_examples() {
        let g2 = vine(2);
        let phi = PhiVector::on_vine(rat(3, 10));
        assert!(is_small_perturbation(&g2, &phi).unwrap());
        assert!(equivalent_small_perturbation_check(&g2, &phi).unwrap());
        assert!(!is_small_perturbation(&g2, &PhiVector::on_vine(int(1))).unwrap());
        let g1 = vine(1);
        let phi = PhiVector::on_vine(rat(3, 4));
        assert!(!is_small_perturbation(&g1, &phi).unwrap());
        assert!(!equivalent_small_perturbation_check(&g1, &phi).unwrap());
        let tri = DualGraph::new(
            1,
            &[(0, &[1]), (1, &[]), (1, &[])],
            &[(0, 1), (1, 2), (2, 0)],
        )
        .unwrap();
        let zero = PhiVector::zero(&tri);
        assert!(is_small_perturbation(&tri, &zero).unwrap());
        assert!(equivalent_small_perturbation_check(&tri, &zero).unwrap());
        assert!(!is_nondegenerate(&tri, &zero).unwrap());
    }

    #[test]
    fn stable_data_examples() {
        let g2 = vine(2);
        let lbs = stable_sheaf_data(&g2, &PhiVector::on_vine(rat(3, 10)), 0, false).unwrap();
        let bidegrees: Vec<&[i64]> = lbs.iter().map(|f| f.degrees()).collect();
        assert_eq!(bidegrees, vec![&[0, 0][..], &[1, -1][..]]);

        let g1 = vine(1);
        let all = stable_sheaf_data(&g1, &PhiVector::on_vine(rat(1, 5)), 0, true).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all[0].is_line_bundle());
        assert_eq!(all[0].degrees(), &[0, 0]);

        let g3 = vine(3);
        let lbs = stable_sheaf_data(&g3, &PhiVector::on_vine(rat(1, 7)), 0, false).unwrap();
        assert_eq!(lbs.len(), 3);

        assert!(matches!(
            stable_sheaf_data(&g2, &PhiVector::on_vine(int(0)), 0, false),
            Err(Error::DegenerateParameter)
        ));
    }

    #[test]
    fn stable_data_nonzero_degree_and_single_vertex() {
        let g2 = vine(2);
        // parameters sum to 0, so no datum of degree 3 can be stable on a
        // two-component curve
        let lbs = stable_sheaf_data(&g2, &PhiVector::on_vine(rat(3, 10)), 3, true).unwrap();
        assert!(lbs.is_empty());

        let rose = DualGraph::new(1, &[(1, &[1])], &[(0, 0)]).unwrap();
        let all = stable_sheaf_data(&rose, &PhiVector::zero(&rose), 0, true).unwrap();
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|f| f.total_degree() == 0));
    }

    #[test]
    fn support_lemma_examples() {
        assert_eq!(
            verify_support_lemma(&vine(2), &PhiVector::on_vine(rat(3, 10))).unwrap(),
            SupportCheck::Holds
        );
        assert_eq!(
            verify_support_lemma(&vine(3), &PhiVector::on_vine(rat(1, 7))).unwrap(),
            SupportCheck::Holds
        );
        assert!(matches!(
            verify_support_lemma(&vine(2), &PhiVector::on_vine(rat(6, 5))),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn t_stable_constructor() {
        for (e, t) in [(2u32, 5i64), (2, 0), (4, -3)] {
            let v = VineCurve::new(0, &[1], 1, e, 1);
            let g = v.to_graph();
            let phi = make_t_stable_phi(&v, t, 11).unwrap();
            assert!(is_nondegenerate(&g, &phi).unwrap());
            let f = SheafDatum::line_bundle(&g, vec![t, -t]).unwrap();
            assert!(is_stable(&g, &phi, &f).unwrap());
            if t == 0 {
                assert!(is_small_perturbation(&g, &phi).unwrap());
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let g = vine(2);
        let phi = PhiVector::on_vine(rat(3, 10));
        let json = phi.to_json_value().to_string();
        assert_eq!(json, r#"{"values":{"0":"3/10","1":"-3/10"}}"#);
        assert_eq!(PhiVector::from_json(&g, &json).unwrap(), phi);
        let f = SheafDatum::new(&g, &[1], vec![0, -1]).unwrap();
        let json = f.to_json_value().to_string();
        assert_eq!(json, r#"{"S":[1],"D":{"0":0,"1":-1}}"#);
        assert_eq!(SheafDatum::from_json(&g, &json).unwrap(), f);
    }
}
