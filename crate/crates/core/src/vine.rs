//! Vine curves: two smooth components meeting in `e` nodes.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{DualGraph, Marking, Subcurve};

/// A vine in canonical orientation: `(g1, sorted S) <= (g2, sorted S^c)`.
///
/// Field order gives the canonical enumeration order: by number of nodes,
/// then by the side-1 genus, then by the side-1 markings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VineCurve {
    pub e: u32,
    pub g1: u32,
    #[serde(rename = "S")]
    pub side1: Vec<Marking>,
    pub g2: u32,
    pub n: u32,
}

impl VineCurve {
    /// Builds a vine from either orientation, returning it canonicalized.
    pub fn new(g1: u32, side1: &[Marking], g2: u32, e: u32, n: u32) -> Self {
        let s: BTreeSet<Marking> = side1.iter().copied().collect();
        let sc: Vec<Marking> = (1..=n).filter(|m| !s.contains(m)).collect();
        let s: Vec<Marking> = s.into_iter().collect();
        if (g1, &s) <= (g2, &sc) {
            VineCurve {
                e,
                g1,
                side1: s,
                g2,
                n,
            }
        } else {
            VineCurve {
                e,
                g1: g2,
                side1: sc,
                g2: g1,
                n,
            }
        }
    }

    pub fn genus(&self) -> u32 {
        self.g1 + self.g2 + self.e - 1
    }

    pub fn side2(&self) -> Vec<Marking> {
        (1..=self.n).filter(|m| !self.side1.contains(m)).collect()
    }

    pub fn is_stable(&self) -> bool {
        side_stable(self.g1, self.e, self.side1.len())
            && side_stable(self.g2, self.e, self.n as usize - self.side1.len())
    }

    /// Whether `(g, S)` describes side 1 of this vine as stored, `Some(false)`
    /// if it describes side 2, `None` if it is neither.
    pub fn orientation_of(&self, g: u32, side: &[Marking]) -> Option<bool> {
        let s: Vec<Marking> = side
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if g == self.g1 && s == self.side1 {
            Some(true)
        } else if g == self.g2 && s == self.side2() {
            Some(false)
        } else {
            None
        }
    }

    /// The dual graph: vertex 0 is side 1, vertex 1 is side 2, edges `0..e`.
    pub fn to_graph(&self) -> DualGraph {
        let s1 = self.side1.clone();
        let s2 = self.side2();
        let edges = vec![(0, 1); self.e as usize];
        DualGraph::new(self.n, &[(self.g1, &s1), (self.g2, &s2)], &edges)
            .expect("vine graph is well formed")
    }

    /// Side 1 as a subcurve of [`VineCurve::to_graph`].
    pub fn side1_subcurve() -> Subcurve {
        Subcurve::from_positions(&[0])
    }
}

impl fmt::Display for VineCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.side1.iter().map(|m| m.to_string()).collect();
        write!(
            f,
            "(g1={}, S={{{}}}, g2={}, e={})",
            self.g1,
            s.join(","),
            self.g2,
            self.e
        )
    }
}

fn side_stable(genus: u32, e: u32, markings: usize) -> bool {
    2 * genus as i64 - 2 + e as i64 + markings as i64 > 0
}

/// All stable vines of genus `g` with `n` markings and at least `min_edges`
/// nodes, one per side swap, in canonical order.
pub fn enumerate_vines(g: u32, n: u32, min_edges: u32) -> Vec<VineCurve> {
    let mut out = Vec::new();
    for e in min_edges.max(1)..=g + 1 {
        let side_genus = g + 1 - e;
        for g1 in 0..=side_genus {
            let g2 = side_genus - g1;
            for bits in 0u64..(1u64 << n) {
                let s: Vec<Marking> = (1..=n).filter(|m| bits >> (m - 1) & 1 == 1).collect();
                let vine = VineCurve::new(g1, &s, g2, e, n);
                if vine.g1 == g1 && vine.side1 == s && vine.is_stable() {
                    out.push(vine);
                }
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_two_one_marking() {
        let vines = enumerate_vines(2, 1, 2);
        assert!(vines.contains(&VineCurve::new(0, &[1], 1, 2, 1)));
        // genus-0 side with two nodes and no markings is unstable
        assert!(!vines
            .iter()
            .any(|v| v.e == 2 && v.g1 == 0 && v.side1.is_empty()));
        assert_eq!(vines.len(), 2);
        assert_eq!(vines[1], VineCurve::new(0, &[1], 0, 3, 1));
    }

    #[test]
    fn canonical_orientation() {
        let a = VineCurve::new(1, &[], 0, 2, 1);
        let b = VineCurve::new(0, &[1], 1, 2, 1);
        assert_eq!(a, b);
        assert_eq!(a.orientation_of(1, &[]), Some(false));
        assert_eq!(a.orientation_of(0, &[1]), Some(true));
        assert_eq!(a.orientation_of(2, &[]), None);
    }

    #[test]
    fn exhaustive_against_brute_force() {
        for g in 1..=4u32 {
            for n in 1..=3u32 {
                let vines = enumerate_vines(g, n, 1);
                assert!(vines.iter().all(|v| v.e <= g + 1 && v.genus() == g));
                // brute force over a generous box, deduplicating by side swap
                let mut expected = BTreeSet::new();
                for e in 1..=g + 3 {
                    for g1 in 0..=g + 2 {
                        for g2 in 0..=g + 2 {
                            if g1 + g2 + e != g + 1 {
                                continue;
                            }
                            for bits in 0u64..(1 << n) {
                                let s: Vec<u32> =
                                    (1..=n).filter(|m| bits >> (m - 1) & 1 == 1).collect();
                                let v = VineCurve::new(g1, &s, g2, e, n);
                                if v.is_stable() {
                                    expected.insert(v);
                                }
                            }
                        }
                    }
                }
                let got: BTreeSet<_> = vines.iter().cloned().collect();
                assert_eq!(got.len(), vines.len(), "duplicates for g={g} n={n}");
                assert_eq!(got, expected, "g={g} n={n}");
            }
        }
    }

    #[test]
    fn vine_graph_is_valid() {
        for v in enumerate_vines(3, 2, 1) {
            let graph = v.to_graph();
            assert!(graph.validate().is_empty(), "{v}");
            assert_eq!(graph.genus(), 3);
        }
    }
}
