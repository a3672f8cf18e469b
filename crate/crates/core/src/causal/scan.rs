//! Fine-tuning scan over the DAGs that could explain a two-party Bell
//! experiment.
//!
//! The family has nodes `X, Y, A, B` (observed) and `L` (latent), with `X`,
//! `Y` and `L` roots. Each of `A`, `B` takes any subset of `{L, X, Y}` as
//! parents, and `A`, `B` are joined by no edge, `A -> B` or `B -> A`:
//! `8 * 8 * 3 = 192` DAGs.
//!
//! A DAG forces LHV membership when `A _||_ Y | {X, L}` and
//! `B _||_ X | {Y, L}` are d-separations. In this family that leaves each
//! outcome a local response to its own setting and `L` (plus the other
//! outcome when that one depends on `L` alone), so every Markov-compatible
//! behavior is a convex mixture of deterministic strategies.

use rayon::prelude::*;
use serde::Serialize;

use super::{CausalDag, JointDistribution, Node};
use crate::behavior::{validate_behavior, Behavior, Inequality, Scenario};
use crate::error::{Error, Result};
use crate::polytope::{membership, Certificate, PolytopeKind};
use crate::scalar::Rational;

pub const SCAN_DAG_COUNT: usize = 192;
const LATENT_CAP: usize = 4;

const X: usize = 0;
const Y: usize = 1;
const A: usize = 2;
const B: usize = 3;
const L: usize = 4;

/// `X -> A <- L -> B <- Y` with a latent `L` of the given cardinality.
pub fn bell_dag(latent_card: usize) -> Result<CausalDag> {
    scan_dag(latent_card, 0b110, 0b101, 0)
}

fn scan_nodes(latent_card: usize) -> Vec<Node> {
    vec![
        Node::observed("X", 2),
        Node::observed("Y", 2),
        Node::observed("A", 2),
        Node::observed("B", 2),
        Node::latent("L", latent_card),
    ]
}

/// Parent bits of `A` and `B` over `(L, X, Y)` as bits `(2, 1, 0)`;
/// `link` 0 = none, 1 = `A -> B`, 2 = `B -> A`.
fn scan_dag(latent_card: usize, into_a: usize, into_b: usize, link: usize) -> Result<CausalDag> {
    let mut edges = Vec::new();
    for (bit, src) in [(2, L), (1, X), (0, Y)] {
        if into_a >> bit & 1 == 1 {
            edges.push((src, A));
        }
        if into_b >> bit & 1 == 1 {
            edges.push((src, B));
        }
    }
    match link {
        1 => edges.push((A, B)),
        2 => edges.push((B, A)),
        _ => {}
    }
    CausalDag::from_indices(scan_nodes(latent_card), edges)
}

/// Joint table of `(X, Y, A, B, L)` for a 2x2 behavior with uniform
/// settings and `L` fixed at its first value.
pub fn bell_joint(b: &Behavior<Rational>, latent_card: usize) -> Result<JointDistribution<Rational>> {
    if *b.scenario() != Scenario::binary(2, 2) {
        return Err(Error::InvalidScenario(format!("expected 2,2,2,2, got {}", b.scenario())));
    }
    let nodes = scan_nodes(latent_card);
    let mut table = Vec::with_capacity(16 * latent_card);
    let quarter = Rational::new(1.into(), 4.into());
    for x in 1..=2 {
        for y in 1..=2 {
            for a in 1..=2 {
                for bb in 1..=2 {
                    for l in 0..latent_card {
                        table.push(if l == 0 { b.get(a, bb, x, y) * &quarter } else { Rational::from_integer(0.into()) });
                    }
                }
            }
        }
    }
    JointDistribution::new(nodes.iter().map(|n| n.name.clone()).collect(), nodes.iter().map(|n| n.card).collect(), table)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Markov factorization forces LHV; the behavior lies outside it.
    CannotReproduce,
    /// Reproducing the behavior needs the no-signalling CIs, which the
    /// graph does not imply.
    FineTuned,
    /// Would reproduce the behavior faithfully; never expected.
    FaithfulReproducing,
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::CannotReproduce => "cannot_reproduce",
            Classification::FineTuned => "fine_tuned",
            Classification::FaithfulReproducing => "faithful_reproducing",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub dag_id: usize,
    pub edges: String,
    /// `A _||_ Y | X` and `B _||_ X | Y` both implied with `L` unobserved.
    pub ns_implied: bool,
    pub lhv_forced: bool,
    pub classification: Classification,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub latent_cardinality: usize,
    pub rows: Vec<ScanRow>,
    /// Bell inequality separating the behavior from LHV.
    pub lhv_certificate: Inequality<Rational>,
}

impl ScanReport {
    pub fn count(&self, c: Classification) -> usize {
        self.rows.iter().filter(|r| r.classification == c).count()
    }

    /// No DAG both reproduces the behavior and is faithful to it.
    pub fn dichotomy_holds(&self) -> bool {
        self.count(Classification::FaithfulReproducing) == 0
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("dag_id,edges,ns_implied,lhv_forced,classification\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.dag_id,
                r.edges,
                r.ns_implied,
                r.lhv_forced,
                r.classification.name()
            ));
        }
        s
    }
}

fn edge_string(g: &CausalDag) -> String {
    let n = g.nodes();
    let mut e: Vec<String> = g.edges().iter().map(|&(u, v)| format!("{}->{}", n[u].name, n[v].name)).collect();
    e.sort();
    e.join(";")
}

pub fn bell_dag_scan(b: &Behavior<Rational>, latent_card: usize) -> Result<ScanReport> {
    if *b.scenario() != Scenario::binary(2, 2) {
        return Err(Error::Precondition(format!("scan needs a 2,2,2,2 behavior, got {}", b.scenario())));
    }
    if !(1..=LATENT_CAP).contains(&latent_card) {
        return Err(Error::Precondition(format!("latent cardinality must be in 1..={LATENT_CAP}, got {latent_card}")));
    }
    let report = validate_behavior(b, &Rational::from_integer(0.into()));
    if !report.all_ok() {
        return Err(Error::Precondition("behavior must be normalized, nonnegative and no-signalling".into()));
    }
    let lhv = membership(PolytopeKind::Lhv, b)?;
    let lhv_certificate = match lhv.certificate {
        Certificate::Separating(ineq) if !lhv.inside => ineq,
        _ => return Err(Error::Precondition("behavior violates no Bell inequality".into())),
    };
    let rows = (0..SCAN_DAG_COUNT)
        .into_par_iter()
        .map(|id| {
            let g = scan_dag(latent_card, id % 8, id / 8 % 8, id / 64)?;
            let ns_implied = g.d_separated_mask(1 << A, 1 << Y, 1 << X) && g.d_separated_mask(1 << B, 1 << X, 1 << Y);
            let lhv_forced = g.d_separated_mask(1 << A, 1 << Y, 1 << X | 1 << L)
                && g.d_separated_mask(1 << B, 1 << X, 1 << Y | 1 << L);
            let classification = if lhv_forced {
                Classification::CannotReproduce
            } else if !ns_implied {
                Classification::FineTuned
            } else {
                Classification::FaithfulReproducing
            };
            Ok(ScanRow { dag_id: id, edges: edge_string(&g), ns_implied, lhv_forced, classification })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanReport { latent_cardinality: latent_card, rows, lhv_certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{deterministic_behavior, DeterministicStrategy};
    use crate::causal::cmc_check;
    use crate::scalar::int;

    #[test]
    fn enumeration_is_complete_and_distinct() {
        let mut seen = std::collections::BTreeSet::new();
        for id in 0..SCAN_DAG_COUNT {
            let g = scan_dag(2, id % 8, id / 8 % 8, id / 64).unwrap();
            assert!(seen.insert(edge_string(&g)));
        }
    }

    #[test]
    fn pr_box_dichotomy() {
        let pr = Behavior::<Rational>::pr_box(Scenario::binary(2, 2)).unwrap();
        let r = bell_dag_scan(&pr, 4).unwrap();
        assert_eq!(r.rows.len(), SCAN_DAG_COUNT);
        assert!(r.dichotomy_holds());
        assert!(r.rows.iter().any(|row| row.edges == "L->A;L->B;X->A;Y->B" && row.lhv_forced));
        assert!(r.to_csv().starts_with("dag_id,edges,ns_implied,lhv_forced,classification\n0,,true,true,"));
    }

    #[test]
    fn local_vertex_rejected() {
        let sc = Scenario::binary(2, 2);
        let v = deterministic_behavior(&DeterministicStrategy::new(vec![1, 2], vec![2, 2]), &sc).unwrap();
        assert!(matches!(bell_dag_scan(&v, 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn pr_box_with_fixed_latent_breaks_cmc() {
        let pr = Behavior::<Rational>::pr_box(Scenario::binary(2, 2)).unwrap();
        let r = cmc_check(&bell_dag(2).unwrap(), &bell_joint(&pr, 2).unwrap(), &int(0)).unwrap();
        assert!(!r.passes);
        assert!(!r.nodes.iter().find(|n| n.name == "A").unwrap().passes);
    }
}
