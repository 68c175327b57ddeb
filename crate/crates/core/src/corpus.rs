//! Test corpora: exhaustive stable graphs, random graphs and random
//! stability parameters.

use std::collections::BTreeSet;

use rand::Rng;

use crate::graph::{DualGraph, Marking};
use crate::rational::{int, Rational};
use crate::stability::{is_nondegenerate, PhiVector};

/// Bounds for [`stable_graphs`].
#[derive(Debug, Clone, Copy)]
pub struct CorpusBounds {
    pub max_genus: u32,
    pub max_n: u32,
    pub max_vertices: usize,
    pub max_edges: usize,
}

impl Default for CorpusBounds {
    fn default() -> Self {
        CorpusBounds {
            max_genus: 3,
            max_n: 2,
            max_vertices: 4,
            max_edges: 7,
        }
    }
}

/// Every connected stable graph with `1 <= g <= max_genus`,
/// `1 <= n <= max_n` and the given vertex and edge bounds, one per
/// isomorphism class (isomorphisms fix the marking labels).
/// Ordered by `(g, n, #V, #E)` and then by canonical form.
pub fn stable_graphs(bounds: CorpusBounds) -> Vec<DualGraph> {
    let mut out = Vec::new();
    for g in 1..=bounds.max_genus {
        for n in 1..=bounds.max_n {
            for nv in 1..=bounds
                .max_vertices
                .min(2 * g as usize - 2 + n as usize)
                .max(1)
            {
                let mut seen = BTreeSet::new();
                let mut found = Vec::new();
                graphs_with(g, n, nv, bounds.max_edges, &mut |shape| {
                    let key = canonical_key(shape);
                    if seen.insert(key.clone()) {
                        found.push((key, shape.to_graph(n)));
                    }
                });
                found.sort_by(|a, b| (a.1.num_edges(), &a.0).cmp(&(b.1.num_edges(), &b.0)));
                out.extend(found.into_iter().map(|(_, graph)| graph));
            }
        }
    }
    out
}

struct Shape {
    genera: Vec<u32>,
    /// multiplicity of each unordered vertex pair `(i <= j)`, row-major
    mult: Vec<Vec<u32>>,
    owner: Vec<usize>,
}

impl Shape {
    fn to_graph(&self, n: u32) -> DualGraph {
        let nv = self.genera.len();
        let markings: Vec<Vec<Marking>> = (0..nv)
            .map(|v| {
                (1..=n)
                    .filter(|m| self.owner[*m as usize - 1] == v)
                    .collect()
            })
            .collect();
        let verts: Vec<(u32, &[Marking])> = (0..nv)
            .map(|v| (self.genera[v], markings[v].as_slice()))
            .collect();
        let mut edges = Vec::new();
        for i in 0..nv {
            for j in i..nv {
                for _ in 0..self.mult[i][j] {
                    edges.push((i, j));
                }
            }
        }
        DualGraph::new(n, &verts, &edges).expect("generated graph is well formed")
    }
}

fn graphs_with(g: u32, n: u32, nv: usize, max_edges: usize, visit: &mut dyn FnMut(&Shape)) {
    let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|i| (i..nv).map(move |j| (i, j))).collect();
    let mut genera = vec![0u32; nv];
    for_each_genera(&mut genera, 0, g, &mut |genera| {
        let sum_h: u32 = genera.iter().sum();
        // #E = g - sum(h) + #V - 1
        let edges = g as i64 - sum_h as i64 + nv as i64 - 1;
        if edges < nv as i64 - 1 || edges as usize > max_edges {
            return;
        }
        let mut counts = vec![0u32; pairs.len()];
        for_each_composition(&mut counts, 0, edges as u32, &mut |counts| {
            let mut mult = vec![vec![0u32; nv]; nv];
            for (&(i, j), &c) in pairs.iter().zip(counts.iter()) {
                mult[i][j] = c;
            }
            if !connected(&mult) {
                return;
            }
            let mut owner = vec![0usize; n as usize];
            loop {
                if stable(genera, &mult, &owner) {
                    visit(&Shape {
                        genera: genera.to_vec(),
                        mult: mult.clone(),
                        owner: owner.clone(),
                    });
                }
                let mut i = 0;
                loop {
                    if i == owner.len() {
                        return;
                    }
                    owner[i] += 1;
                    if owner[i] < nv {
                        break;
                    }
                    owner[i] = 0;
                    i += 1;
                }
            }
        });
    });
}

fn for_each_genera(genera: &mut Vec<u32>, v: usize, budget: u32, visit: &mut dyn FnMut(&[u32])) {
    if v == genera.len() {
        visit(genera);
        return;
    }
    for h in 0..=budget {
        genera[v] = h;
        for_each_genera(genera, v + 1, budget - h, visit);
    }
}

fn for_each_composition(
    counts: &mut Vec<u32>,
    slot: usize,
    left: u32,
    visit: &mut dyn FnMut(&[u32]),
) {
    if slot == counts.len() - 1 {
        counts[slot] = left;
        visit(counts);
        return;
    }
    for c in 0..=left {
        counts[slot] = c;
        for_each_composition(counts, slot + 1, left - c, visit);
    }
}

fn connected(mult: &[Vec<u32>]) -> bool {
    let nv = mult.len();
    let mut seen = vec![false; nv];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for w in 0..nv {
            let m = if v <= w { mult[v][w] } else { mult[w][v] };
            if m > 0 && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn stable(genera: &[u32], mult: &[Vec<u32>], owner: &[usize]) -> bool {
    (0..genera.len()).all(|v| {
        let valence: u32 = (0..genera.len())
            .map(|w| {
                if v == w {
                    2 * mult[v][v]
                } else if v < w {
                    mult[v][w]
                } else {
                    mult[w][v]
                }
            })
            .sum();
        let marks = owner.iter().filter(|&&o| o == v).count() as i64;
        2 * genera[v] as i64 - 2 + valence as i64 + marks > 0
    })
}

fn canonical_key(shape: &Shape) -> Vec<u32> {
    let nv = shape.genera.len();
    let mut best: Option<Vec<u32>> = None;
    let mut perm: Vec<usize> = (0..nv).collect();
    permutations(&mut perm, 0, &mut |perm| {
        // perm[new] = old
        let mut inverse = vec![0; nv];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let mut key: Vec<u32> = perm.iter().map(|&old| shape.genera[old]).collect();
        for i in 0..nv {
            for j in i..nv {
                let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                key.push(shape.mult[a][b]);
            }
        }
        key.extend(shape.owner.iter().map(|&o| inverse[o] as u32));
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    });
    best.expect("at least one permutation")
}

fn permutations(perm: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permutations(perm, k + 1, visit);
        perm.swap(k, i);
    }
}

/// A random valid stable graph with at most `max_vertices` vertices.
pub fn random_stable_graph<R: Rng>(rng: &mut R, max_vertices: usize) -> DualGraph {
    loop {
        let nv = rng.random_range(1..=max_vertices);
        let genera: Vec<u32> = (0..nv).map(|_| rng.random_range(0..=2)).collect();
        let mut edges: Vec<(usize, usize)> = (1..nv).map(|v| (rng.random_range(0..v), v)).collect();
        for _ in 0..rng.random_range(0..=3) {
            edges.push((rng.random_range(0..nv), rng.random_range(0..nv)));
        }
        let n = rng.random_range(1..=4u32);
        let mut markings = vec![Vec::new(); nv];
        for m in 1..=n {
            markings[rng.random_range(0..nv)].push(m);
        }
        let verts: Vec<(u32, &[Marking])> = genera
            .iter()
            .zip(&markings)
            .map(|(h, m)| (*h, m.as_slice()))
            .collect();
        let graph = DualGraph::new(n, &verts, &edges).expect("well formed");
        if graph.validate().is_empty() {
            return graph;
        }
    }
}

/// What kind of parameter [`random_phi`] should draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiKind {
    /// Values up to 3 in absolute value with denominators up to 12.
    Any,
    /// Like `Any`, redrawn until nondegenerate.
    Nondegenerate,
    /// Nondegenerate with `|φ(C0)| < 1/2` on every subcurve.
    SmallNondegenerate,
}

pub fn random_phi<R: Rng>(graph: &DualGraph, rng: &mut R, kind: PhiKind) -> PhiVector {
    let nv = graph.num_vertices();
    loop {
        let mut values: Vec<Rational> = match kind {
            PhiKind::Any | PhiKind::Nondegenerate => (0..nv - 1)
                .map(|_| {
                    let den = rng.random_range(1..=12i64);
                    Rational::new(rng.random_range(-3 * den..=3 * den), den)
                })
                .collect(),
            PhiKind::SmallNondegenerate => {
                // subcurve sums stay below (#V - 1) * 50 / den < 1/2
                let den = 100 * nv as i64 + 1;
                (0..nv - 1)
                    .map(|_| Rational::new(rng.random_range(-50..=50), den))
                    .collect()
            }
        };
        let last = -values.iter().fold(int(0), |acc, v| acc + v);
        values.push(last);
        let phi = PhiVector::new(graph, values).expect("sums to zero");
        if kind == PhiKind::Any || is_nondegenerate(graph, &phi).expect("same graph") {
            return phi;
        }
    }
}

/// A random parameter moved onto the wall of a random subcurve, so that
/// `φ(C0) + cr(C0)/2` is an integer. Single-vertex graphs have no walls.
pub fn random_phi_on_wall<R: Rng>(graph: &DualGraph, rng: &mut R) -> PhiVector {
    let nv = graph.num_vertices();
    let phi = random_phi(graph, rng, PhiKind::Any);
    if nv == 1 {
        return phi;
    }
    let mask = rng.random_range(1..(1u64 << nv) - 1);
    let cr = graph.crossing_count_mask(mask) as i64;
    let phi_c0: Rational = (0..nv)
        .filter(|v| mask >> v & 1 == 1)
        .map(|v| phi.values()[v])
        .sum();
    let shifted = phi_c0 + Rational::new(cr, 2);
    let target = shifted.round();
    let shift = target - shifted;
    let inside = (0..nv).find(|v| mask >> v & 1 == 1).expect("nonempty");
    let outside = (0..nv).find(|v| mask >> v & 1 == 0).expect("proper");
    let mut values = phi.values().to_vec();
    values[inside] += shift;
    values[outside] -= shift;
    PhiVector::new(graph, values).expect("sum preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::is_small_perturbation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_corpus_counts() {
        // genus 1, one marking: the smooth curve and the irreducible nodal curve
        let graphs = stable_graphs(CorpusBounds {
            max_genus: 1,
            max_n: 1,
            max_vertices: 4,
            max_edges: 7,
        });
        assert!(graphs.iter().all(|g| g.validate().is_empty()));
        assert_eq!(graphs.len(), 2);
    }

    #[test]
    fn default_corpus_is_valid_and_deduplicated() {
        let graphs = stable_graphs(CorpusBounds::default());
        assert!(graphs.len() > 50);
        for g in &graphs {
            assert!(g.validate().is_empty());
            assert!(g.num_vertices() <= 4 && g.num_edges() <= 7);
        }
    }

    #[test]
    fn random_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = random_stable_graph(&mut rng, 5);
            assert!(g.validate().is_empty());
            let phi = random_phi(&g, &mut rng, PhiKind::SmallNondegenerate);
            assert!(is_small_perturbation(&g, &phi).unwrap());
            assert!(is_nondegenerate(&g, &phi).unwrap());
            if g.num_vertices() > 1 {
                let wall = random_phi_on_wall(&g, &mut rng);
                assert!(!is_nondegenerate(&g, &wall).unwrap());
            }
        }
    }
}
