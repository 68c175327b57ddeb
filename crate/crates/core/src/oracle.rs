//! Brute-force reference computations.
//!
//! Each function here reaches its answer by a route that does not share
//! code with the production path it is compared against; the property
//! suites and the tests use them as oracles.

use crate::graph::DualGraph;
use crate::rational::{int, Rational};
use crate::stability::{is_stable, PhiVector, SheafDatum};
use num_traits::Signed;

/// Spanning trees counted by enumerating every `(#V - 1)`-subset of
/// non-loop edges and testing it with union-find.
pub fn spanning_trees_brute_force(graph: &DualGraph) -> u64 {
    let nv = graph.num_vertices();
    let edges: Vec<[usize; 2]> = (0..graph.num_edges())
        .map(|e| graph.ends(e))
        .filter(|[a, b]| a != b)
        .collect();
    let need = nv - 1;
    if edges.len() > 24 {
        panic!("brute-force tree count limited to 24 edges");
    }
    let mut count = 0;
    for mask in 0u32..(1 << edges.len()) {
        if mask.count_ones() as usize != need {
            continue;
        }
        let mut parent: Vec<usize> = (0..nv).collect();
        let mut acyclic = true;
        for (i, [a, b]) in edges.iter().enumerate() {
            if mask >> i & 1 == 0 {
                continue;
            }
            let (ra, rb) = (root(&mut parent, *a), root(&mut parent, *b));
            if ra == rb {
                acyclic = false;
                break;
            }
            parent[ra] = rb;
        }
        if acyclic {
            count += 1;
        }
    }
    count
}

fn root(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        x = parent[x];
    }
    x
}

/// An explicit equality instance of the stability inequality:
/// vertex positions of the subcurve, `deg_C0` and `delta_C0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityInstance {
    pub subcurve: Vec<usize>,
    pub degree: i64,
    pub delta: i64,
}

/// Searches every subcurve, every `delta in [0, cr]` and every integer
/// degree with `|deg - φ + delta/2| <= (cr + 1)/2` for an exact equality
/// `|deg - φ + delta/2| = (cr - delta)/2`.
pub fn wall_equality_search(graph: &DualGraph, phi: &PhiVector) -> Option<EqualityInstance> {
    let nv = graph.num_vertices();
    let values = phi.values();
    for mask in 1u64..(1u64 << nv) - 1 {
        let members: Vec<usize> = (0..nv).filter(|v| mask >> v & 1 == 1).collect();
        let phi_c0: Rational = members.iter().map(|&v| values[v]).sum();
        let cr = (0..graph.num_edges())
            .filter(|&e| {
                let [a, b] = graph.ends(e);
                members.contains(&a) != members.contains(&b)
            })
            .count() as i64;
        for delta in 0..=cr {
            let center = phi_c0 - Rational::new(delta, 2);
            let radius = Rational::new(cr + 1, 2);
            let lo = (center - radius).ceil().to_integer();
            let hi = (center + radius).floor().to_integer();
            for degree in lo..=hi {
                let lhs = (int(degree) - center).abs();
                if lhs == Rational::new(cr - delta, 2) {
                    return Some(EqualityInstance {
                        subcurve: members,
                        degree,
                        delta,
                    });
                }
            }
        }
    }
    None
}

/// Stable line bundles of total degree `d` found by scanning the box
/// `[-bound, bound]^#V`.
pub fn stable_line_bundles_in_box(
    graph: &DualGraph,
    phi: &PhiVector,
    d: i64,
    bound: i64,
) -> Vec<SheafDatum> {
    let nv = graph.num_vertices();
    let mut out = Vec::new();
    let mut degrees = vec![-bound; nv];
    loop {
        if degrees.iter().sum::<i64>() == d {
            let f = SheafDatum::line_bundle(graph, degrees.clone()).expect("sizes match");
            if is_stable(graph, phi, &f).expect("same graph") {
                out.push(f);
            }
        }
        // odometer
        let mut i = 0;
        loop {
            if i == nv {
                out.sort();
                return out;
            }
            if degrees[i] < bound {
                degrees[i] += 1;
                break;
            }
            degrees[i] = -bound;
            i += 1;
        }
    }
}

/// Whether some parameter `x` in `(-e/2, e/2)` off the walls makes bidegree
/// `(t, -t)` stable on an `e`-node vine. The walls cut the interval into
/// `e` chambers with midpoints `m - e/2 + 1/2`, and stability of a line
/// bundle is constant on each chamber.
pub fn vine_bidegree_stabilizable(e: u32, t: i64) -> bool {
    let e = e as i64;
    (0..e).any(|m| {
        let x = Rational::new(2 * m - e + 1, 2);
        (int(t) - x).abs() < Rational::new(e, 2)
    })
}
