//! Property suites comparing the production routines with brute-force
//! oracles over exhaustive graph corpora.
//!
//! Every graph gets its own generator seeded from `(seed, index)`, so the
//! outcome does not depend on how the work is split across threads.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::abel_jacobi::{
    certify_obstruction, classify_extension, sigma_extends, vine_bidegree, AJDatum,
};
use crate::corpus::{random_phi, random_phi_on_wall, stable_graphs, CorpusBounds, PhiKind};
use crate::error::{Error, Result};
use crate::graph::DualGraph;
use crate::oracle;
use crate::rational::format_rational;
use crate::stability::{
    equivalent_small_perturbation_check, is_nondegenerate, is_small_perturbation,
    stable_sheaf_data, verify_support_lemma, PhiVector, SupportCheck,
};
use crate::vine::enumerate_vines;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    SmallPerturbation,
    SupportLemma,
    TreeCount,
    WallCriterion,
    Extension,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::SmallPerturbation,
        Suite::SupportLemma,
        Suite::TreeCount,
        Suite::WallCriterion,
        Suite::Extension,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SmallPerturbation => "cor25",
            Suite::SupportLemma => "support-lemma",
            Suite::TreeCount => "tree-count",
            Suite::WallCriterion => "wall-criterion",
            Suite::Extension => "prop41",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub bounds: CorpusBounds,
    pub trials: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            bounds: CorpusBounds::default(),
            trials: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub passed: bool,
    pub counterexample: Option<String>,
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            write!(f, "{}: pass ({} cases)", self.suite, self.cases)
        } else {
            write!(
                f,
                "{}: fail ({} cases); first counterexample: {}",
                self.suite,
                self.cases,
                self.counterexample.as_deref().unwrap_or("-")
            )
        }
    }
}

pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Result<SuiteReport> {
    match suite {
        Suite::Extension => extension_suite(config),
        _ => {
            let graphs = stable_graphs(config.bounds);
            per_graph(suite, &graphs, config)
        }
    }
}

/// Outcome for one graph: number of cases checked, first failure.
type GraphOutcome = (usize, Option<String>);

fn per_graph(suite: Suite, graphs: &[DualGraph], config: &SuiteConfig) -> Result<SuiteReport> {
    let outcomes = graphs
        .par_iter()
        .enumerate()
        .map(|(index, graph)| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                config
                    .seed
                    .wrapping_mul(0x9E37_79B9)
                    .wrapping_add(index as u64),
            );
            let outcome = match suite {
                Suite::SmallPerturbation => small_perturbation_graph(graph, &mut rng, config.trials),
                Suite::WallCriterion => wall_graph(graph, &mut rng, config.trials),
                Suite::SupportLemma => support_graph(graph, &mut rng, config.trials),
                Suite::TreeCount => tree_graph(graph, &mut rng, config.trials),
                Suite::Extension => unreachable!("the extension suite is not per graph"),
            }?;
            let (cases, failure) = outcome;
            Ok((
                cases,
                failure.map(|msg| format!("graph {} ({msg})", graph_summary(graph))),
            ))
        })
        .collect::<Result<Vec<GraphOutcome>>>()?;
    let cases = outcomes.iter().map(|o| o.0).sum();
    let counterexample = outcomes.into_iter().find_map(|o| o.1);
    Ok(SuiteReport {
        suite: suite.name().to_string(),
        cases,
        passed: counterexample.is_none(),
        counterexample,
    })
}

fn graph_summary(graph: &DualGraph) -> String {
    serde_json::to_string(graph).expect("graph serializes")
}

fn phi_summary(phi: &PhiVector) -> String {
    let parts: Vec<String> = phi.values().iter().map(format_rational).collect();
    format!("phi=({})", parts.join(", "))
}

fn small_perturbation_graph(graph: &DualGraph, rng: &mut ChaCha8Rng, trials: usize) -> Result<GraphOutcome> {
    for t in 0..trials {
        let phi = match t % 3 {
            0 => random_phi(graph, rng, PhiKind::Any),
            1 => random_phi(graph, rng, PhiKind::SmallNondegenerate),
            _ => random_phi_on_wall(graph, rng),
        };
        let direct = is_small_perturbation(graph, &phi)?;
        let via_trivial = equivalent_small_perturbation_check(graph, &phi)?;
        if direct != via_trivial {
            return Ok((
                t + 1,
                Some(format!(
                    "{}: small perturbation {direct}, trivial bundle stable {via_trivial}",
                    phi_summary(&phi)
                )),
            ));
        }
    }
    Ok((trials, None))
}

fn wall_graph(graph: &DualGraph, rng: &mut ChaCha8Rng, trials: usize) -> Result<GraphOutcome> {
    for t in 0..trials {
        let phi = if t % 2 == 0 {
            random_phi(graph, rng, PhiKind::Any)
        } else {
            random_phi_on_wall(graph, rng)
        };
        let closed_form = is_nondegenerate(graph, &phi)?;
        let brute = oracle::wall_equality_search(graph, &phi);
        if closed_form != brute.is_none() {
            return Ok((
                t + 1,
                Some(format!(
                    "{}: closed form nondegenerate {closed_form}, equality instance {brute:?}",
                    phi_summary(&phi)
                )),
            ));
        }
    }
    Ok((trials, None))
}

fn support_graph(graph: &DualGraph, rng: &mut ChaCha8Rng, trials: usize) -> Result<GraphOutcome> {
    for t in 0..trials {
        let phi = random_phi(graph, rng, PhiKind::SmallNondegenerate);
        if let SupportCheck::Violation { datum, subcurve } = verify_support_lemma(graph, &phi)? {
            return Ok((
                t + 1,
                Some(format!(
                    "{}: datum {datum} on subcurve {:?}",
                    phi_summary(&phi),
                    subcurve.vertex_ids(graph)
                )),
            ));
        }
    }
    Ok((trials, None))
}

fn tree_graph(graph: &DualGraph, rng: &mut ChaCha8Rng, trials: usize) -> Result<GraphOutcome> {
    let trees = graph.spanning_tree_count()?;
    let brute_trees = oracle::spanning_trees_brute_force(graph);
    if trees != brute_trees {
        return Ok((
            1,
            Some(format!(
                "matrix-tree count {trees}, enumeration {brute_trees}"
            )),
        ));
    }
    for t in 0..trials {
        let phi = random_phi(graph, rng, PhiKind::Nondegenerate);
        let stable = stable_sheaf_data(graph, &phi, 0, false)?;
        if stable.len() as u64 != trees {
            return Ok((
                t + 1,
                Some(format!(
                    "{}: {} stable multidegrees, {trees} spanning trees",
                    phi_summary(&phi),
                    stable.len()
                )),
            ));
        }
        if t == 0 {
            // the stable search windows against a plain box scan; any stable
            // degree lies within |phi_v| + valence of zero
            let reach = phi
                .values()
                .iter()
                .map(|x| num_traits::Signed::abs(x).ceil().to_integer())
                .max()
                .unwrap_or(0);
            let bound = reach + 2 * graph.num_edges() as i64 + 1;
            let boxed = oracle::stable_line_bundles_in_box(graph, &phi, 0, bound);
            if boxed != stable {
                return Ok((
                    1,
                    Some(format!(
                        "{}: window search found {}, box scan {}",
                        phi_summary(&phi),
                        stable.len(),
                        boxed.len()
                    )),
                ));
            }
        }
    }
    Ok((trials, None))
}

/// Every twist `(k; a)` with `|k| <= 1`, `|a_i| <= 2` satisfying the degree
/// constraint, for `1 <= g <= max_g` and `1 <= n <= max_n`.
pub fn small_twists(max_g: u32, max_n: u32) -> Vec<AJDatum> {
    let mut out = Vec::new();
    for g in 1..=max_g {
        for n in 1..=max_n {
            for k in -1..=1i64 {
                let mut a = vec![-2i64; n as usize];
                loop {
                    if let Ok(aj) = AJDatum::new(g, k, a.clone()) {
                        out.push(aj);
                    }
                    let mut i = 0;
                    loop {
                        if i == a.len() {
                            break;
                        }
                        if a[i] < 2 {
                            a[i] += 1;
                            break;
                        }
                        a[i] = -2;
                        i += 1;
                    }
                    if i == a.len() {
                        break;
                    }
                }
            }
        }
    }
    out
}

/// Extension decided by brute force: on every vine with at least two nodes
/// some small-perturbation chamber stabilizes the Abel–Jacobi bidegree.
pub fn extends_by_brute_force(aj: &AJDatum) -> bool {
    enumerate_vines(aj.g, aj.n(), 2)
        .iter()
        .all(|v| oracle::vine_bidegree_stabilizable(v.e, vine_bidegree(v, aj).0))
}

/// `k(2-2g) = 0` and `a = ±(e_i - e_j)`.
pub fn is_unit_difference_twist(aj: &AJDatum) -> bool {
    let negated = AJDatum {
        g: aj.g,
        k: -aj.k,
        a: aj.a.iter().map(|x| -x).collect(),
    };
    aj.canonical_twist() == 0
        && (aj.unit_difference().is_some() || negated.unit_difference().is_some())
}

/// Checks one twist; `None` when every claim holds.
pub fn check_twist(aj: &AJDatum, seed: u64) -> Result<Option<String>> {
    let brute = extends_by_brute_force(aj);
    let describe = |msg: &str| Some(format!("g={}, k={}, a={:?}: {msg}", aj.g, aj.k, aj.a));
    if aj.is_trivial() {
        if !brute {
            return Ok(describe("trivial twist fails brute force"));
        }
        return Ok(match classify_extension(aj, seed) {
            Err(Error::TrivialTwist) => None,
            other => describe(&format!("trivial twist classified as {other:?}")),
        });
    }
    let expected = is_unit_difference_twist(aj);
    let answer = classify_extension(aj, seed)?;
    if answer.extends != expected || answer.extends != brute {
        return Ok(describe(&format!(
            "classifier {}, criterion {expected}, brute force {brute}",
            answer.extends
        )));
    }
    if answer.extends {
        let table = answer.table.as_ref().expect("yes answers carry a table");
        if !sigma_extends(aj, table)?.extends {
            return Ok(describe("yes table fails the extension check"));
        }
    } else {
        let w = answer.witness.as_ref().expect("no answers carry a witness");
        if w.vine.e < 2
            || !certify_obstruction(&w.vine, w.bidegree)?
            || oracle::vine_bidegree_stabilizable(w.vine.e, w.bidegree.0)
        {
            return Ok(describe(&format!("witness {} not certified", w.vine)));
        }
    }
    Ok(None)
}

fn extension_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let twists = small_twists(config.bounds.max_genus, config.bounds.max_n);
    let failures = twists
        .par_iter()
        .map(|aj| check_twist(aj, config.seed))
        .collect::<Result<Vec<_>>>()?;
    let counterexample = failures.into_iter().flatten().next();
    Ok(SuiteReport {
        suite: Suite::Extension.name().to_string(),
        cases: twists.len(),
        passed: counterexample.is_none(),
        counterexample,
    })
}
