//! Classical causal models over small discrete DAGs.

mod distribution;
mod scan;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use distribution::{
    cmc_check, factorize, faithfulness_check, random_markov, CmcReport, Cpt, FaithfulnessReport, JointDistribution,
    NodeCmc,
};
pub use scan::{bell_dag, bell_dag_scan, bell_joint, Classification, ScanReport, ScanRow, SCAN_DAG_COUNT};

/// Node sets are bit masks over node indices.
pub type Mask = u64;

/// Largest DAG supported by the bit-mask representation.
pub const MAX_NODES: usize = 64;
/// Node cap for exhaustive CI enumeration.
pub const CI_NODE_CAP: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Observed,
    Latent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
    pub card: usize,
}

impl Node {
    pub fn observed(name: &str, card: usize) -> Self {
        Node { name: name.into(), kind: NodeKind::Observed, card }
    }

    pub fn latent(name: &str, card: usize) -> Self {
        Node { name: name.into(), kind: NodeKind::Latent, card }
    }
}

#[derive(Serialize, Deserialize)]
struct DagRepr {
    nodes: Vec<Node>,
    edges: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DagRepr", into = "DagRepr")]
pub struct CausalDag {
    nodes: Vec<Node>,
    edges: Vec<(usize, usize)>,
    parents: Vec<Mask>,
}

impl TryFrom<DagRepr> for CausalDag {
    type Error = Error;

    fn try_from(r: DagRepr) -> Result<Self> {
        let edges: Vec<(&str, &str)> = r.edges.iter().map(|[u, v]| (u.as_str(), v.as_str())).collect();
        CausalDag::new(r.nodes.clone(), &edges)
    }
}

impl From<CausalDag> for DagRepr {
    fn from(g: CausalDag) -> Self {
        let edges = g.edges.iter().map(|&(u, v)| [g.nodes[u].name.clone(), g.nodes[v].name.clone()]).collect();
        DagRepr { nodes: g.nodes, edges }
    }
}

pub(crate) fn bits(m: Mask) -> impl Iterator<Item = usize> {
    (0..MAX_NODES).filter(move |i| m >> i & 1 == 1)
}

impl CausalDag {
    pub fn new(nodes: Vec<Node>, edges: &[(&str, &str)]) -> Result<Self> {
        if nodes.len() > MAX_NODES {
            return Err(Error::CapExceeded { what: "DAG nodes".into(), needed: nodes.len() as u128, cap: MAX_NODES as u128 });
        }
        for (i, n) in nodes.iter().enumerate() {
            if n.card == 0 {
                return Err(Error::InvalidGraph(format!("node {} has cardinality 0", n.name)));
            }
            if nodes[..i].iter().any(|m| m.name == n.name) {
                return Err(Error::InvalidGraph(format!("duplicate node {}", n.name)));
            }
        }
        let find = |name: &str| {
            nodes.iter().position(|n| n.name == name).ok_or_else(|| Error::UnknownName(format!("node {name}")))
        };
        let mut idx = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            idx.push((find(u)?, find(v)?));
        }
        Self::from_indices(nodes, idx)
    }

    pub fn from_indices(nodes: Vec<Node>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = nodes.len();
        let mut parents = vec![0 as Mask; n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) references a missing node")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on {}", nodes[u].name)));
            }
            if parents[v] >> u & 1 == 1 {
                return Err(Error::InvalidGraph(format!("duplicate edge {} -> {}", nodes[u].name, nodes[v].name)));
            }
            parents[v] |= 1 << u;
        }
        let g = CausalDag { nodes, edges, parents };
        if g.topological_order().is_none() {
            return Err(Error::InvalidGraph("graph has a directed cycle".into()));
        }
        Ok(g)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("DAG serializes") + "\n"
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.nodes.iter().position(|n| n.name == name).ok_or_else(|| Error::UnknownName(format!("node {name}")))
    }

    pub fn parents(&self, v: usize) -> Mask {
        self.parents[v]
    }

    pub fn children(&self, v: usize) -> Mask {
        (0..self.len()).filter(|&c| self.parents[c] >> v & 1 == 1).fold(0, |m, c| m | 1 << c)
    }

    pub fn observed(&self) -> Mask {
        (0..self.len()).filter(|&i| self.nodes[i].kind == NodeKind::Observed).fold(0, |m, i| m | 1 << i)
    }

    pub fn all(&self) -> Mask {
        if self.len() == MAX_NODES {
            Mask::MAX
        } else {
            (1 << self.len()) - 1
        }
    }

    /// Ancestors of `set`, including `set` itself.
    pub fn ancestors(&self, set: Mask) -> Mask {
        let mut out = set;
        let mut frontier = set;
        while frontier != 0 {
            let next = bits(frontier).fold(0, |m, v| m | self.parents[v]) & !out;
            out |= next;
            frontier = next;
        }
        out
    }

    /// Strict descendants of `v`.
    pub fn descendants(&self, v: usize) -> Mask {
        let mut out = 0;
        let mut frontier = self.children(v);
        while frontier != 0 {
            out |= frontier;
            frontier = bits(frontier).fold(0, |m, c| m | self.children(c)) & !out;
        }
        out
    }

    /// Kahn order with ties broken by index; `None` if cyclic.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indeg: Vec<u32> = self.parents.iter().map(|p| p.count_ones()).collect();
        let mut order = Vec::with_capacity(n);
        let mut done = vec![false; n];
        while order.len() < n {
            let v = (0..n).find(|&v| !done[v] && indeg[v] == 0)?;
            done[v] = true;
            order.push(v);
            for c in bits(self.children(v)) {
                indeg[c] -= 1;
            }
        }
        Some(order)
    }

    /// d-separation of node sets via the moralized ancestral graph.
    pub fn d_separated_mask(&self, a: Mask, b: Mask, z: Mask) -> bool {
        let keep = self.ancestors(a | b | z);
        let n = self.len();
        let mut adj = vec![0 as Mask; n];
        for v in bits(keep) {
            let pa: Vec<usize> = bits(self.parents[v]).collect();
            for (i, &p) in pa.iter().enumerate() {
                adj[v] |= 1 << p;
                adj[p] |= 1 << v;
                for &q in &pa[i + 1..] {
                    adj[p] |= 1 << q;
                    adj[q] |= 1 << p;
                }
            }
        }
        let mut seen = a;
        let mut queue: VecDeque<usize> = bits(a).collect();
        while let Some(v) = queue.pop_front() {
            for w in bits(adj[v] & keep & !z & !seen) {
                if b >> w & 1 == 1 {
                    return false;
                }
                seen |= 1 << w;
                queue.push_back(w);
            }
        }
        true
    }

    fn mask_of(&self, names: &[String]) -> Result<Mask> {
        names.iter().try_fold(0, |m, n| Ok(m | 1 << self.index(n)?))
    }

    fn names_of(&self, m: Mask) -> Vec<String> {
        bits(m).map(|i| self.nodes[i].name.clone()).collect()
    }

    fn statement(&self, a: usize, b: usize, z: Mask) -> CiStatement {
        CiStatement { a: vec![self.nodes[a].name.clone()], b: vec![self.nodes[b].name.clone()], z: self.names_of(z) }
    }
}

/// `A _||_ B | Z` over named node sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CiStatement {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub z: Vec<String>,
}

impl CiStatement {
    pub fn new(a: &[&str], b: &[&str], z: &[&str]) -> Self {
        let v = |s: &[&str]| s.iter().map(|x| x.to_string()).collect();
        CiStatement { a: v(a), b: v(b), z: v(z) }
    }

    /// Same statement with `A` and `B` exchanged.
    pub fn swapped(&self) -> Self {
        CiStatement { a: self.b.clone(), b: self.a.clone(), z: self.z.clone() }
    }

    /// Equal up to the symmetry of `A` and `B` and the order within sets.
    pub fn equivalent(&self, other: &CiStatement) -> bool {
        let sorted = |v: &[String]| {
            let mut v = v.to_vec();
            v.sort();
            v
        };
        let (a, b, z) = (sorted(&self.a), sorted(&self.b), sorted(&self.z));
        let (c, d, w) = (sorted(&other.a), sorted(&other.b), sorted(&other.z));
        z == w && ((a == c && b == d) || (a == d && b == c))
    }

    fn masks(&self, g: &CausalDag) -> Result<(Mask, Mask, Mask)> {
        let (a, b, z) = (g.mask_of(&self.a)?, g.mask_of(&self.b)?, g.mask_of(&self.z)?);
        if a == 0 || b == 0 {
            return Err(Error::Precondition(format!("{self}: both sides must be nonempty")));
        }
        if a & b != 0 || a & z != 0 || b & z != 0 {
            return Err(Error::Precondition(format!("{self}: sets must be disjoint")));
        }
        Ok((a, b, z))
    }
}

impl fmt::Display for CiStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}} _||_ {{{}}} | {{{}}}", self.a.join(","), self.b.join(","), self.z.join(","))
    }
}

pub fn d_separated(g: &CausalDag, stmt: &CiStatement) -> Result<bool> {
    let (a, b, z) = stmt.masks(g)?;
    Ok(g.d_separated_mask(a, b, z))
}

/// Singleton-pair candidates `(i, j, Z)` over `pool`, with `i < j` and
/// `Z` a subset of the rest ordered by size, then by mask value.
pub(crate) fn ci_candidates(pool: Mask) -> Vec<(usize, usize, Mask)> {
    let members: Vec<usize> = bits(pool).collect();
    let mut out = Vec::new();
    for (k, &i) in members.iter().enumerate() {
        for &j in &members[k + 1..] {
            let rest: Vec<usize> = members.iter().copied().filter(|&v| v != i && v != j).collect();
            let mut zs: Vec<Mask> = (0..1u64 << rest.len())
                .map(|sel| bits(sel).fold(0, |m, t| m | 1 << rest[t]))
                .collect();
            zs.sort_by_key(|z| (z.count_ones(), *z));
            out.extend(zs.into_iter().map(|z| (i, j, z)));
        }
    }
    out
}

pub(crate) fn check_ci_cap(g: &CausalDag) -> Result<()> {
    if g.len() > CI_NODE_CAP {
        return Err(Error::CapExceeded {
            what: "DAG nodes for CI enumeration".into(),
            needed: g.len() as u128,
            cap: CI_NODE_CAP as u128,
        });
    }
    Ok(())
}

/// Every singleton-pair CI statement implied by d-separation, over the
/// observed nodes (latents never conditioned on) or over all nodes.
pub fn implied_cis(g: &CausalDag, observed_only: bool) -> Result<Vec<CiStatement>> {
    check_ci_cap(g)?;
    let pool = if observed_only { g.observed() } else { g.all() };
    Ok(ci_candidates(pool)
        .into_iter()
        .filter(|&(i, j, z)| g.d_separated_mask(1 << i, 1 << j, z))
        .map(|(i, j, z)| g.statement(i, j, z))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(names: &[&str]) -> Vec<Node> {
        names.iter().map(|n| Node::observed(n, 2)).collect()
    }

    fn chain() -> CausalDag {
        CausalDag::new(obs(&["X", "Y", "Z"]), &[("X", "Y"), ("Y", "Z")]).unwrap()
    }

    #[test]
    fn chain_and_collider() {
        let g = chain();
        assert!(d_separated(&g, &CiStatement::new(&["X"], &["Z"], &["Y"])).unwrap());
        assert!(!d_separated(&g, &CiStatement::new(&["X"], &["Z"], &[])).unwrap());
        let c = CausalDag::new(obs(&["X", "C", "Z"]), &[("X", "C"), ("Z", "C")]).unwrap();
        assert!(d_separated(&c, &CiStatement::new(&["X"], &["Z"], &[])).unwrap());
        assert!(!d_separated(&c, &CiStatement::new(&["X"], &["Z"], &["C"])).unwrap());
    }

    #[test]
    fn bell_dag_screening() {
        let g = bell_dag(2).unwrap();
        assert!(d_separated(&g, &CiStatement::new(&["A"], &["Y"], &["X", "L"])).unwrap());
        let cis = implied_cis(&g, true).unwrap();
        assert!(cis.iter().any(|s| s.equivalent(&CiStatement::new(&["A"], &["Y"], &["X"]))));
    }

    #[test]
    fn implied_cis_examples() {
        let cis = implied_cis(&chain(), false).unwrap();
        assert!(cis.contains(&CiStatement::new(&["X"], &["Z"], &["Y"])));
        assert!(!cis.contains(&CiStatement::new(&["X"], &["Z"], &[])));
        let empty = CausalDag::new(obs(&["P", "Q", "R"]), &[]).unwrap();
        // 3 pairs, 2 conditioning sets each
        assert_eq!(implied_cis(&empty, false).unwrap().len(), 6);
        let big = CausalDag::new((0..9).map(|i| Node::observed(&format!("N{i}"), 2)).collect(), &[]).unwrap();
        assert!(matches!(implied_cis(&big, false), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn structural_errors() {
        assert!(CausalDag::new(obs(&["X", "Y"]), &[("X", "Y"), ("Y", "X")]).is_err());
        assert!(CausalDag::new(obs(&["X"]), &[("X", "X")]).is_err());
        assert!(CausalDag::new(obs(&["X", "Y"]), &[("X", "Y"), ("X", "Y")]).is_err());
        assert!(matches!(CausalDag::new(obs(&["X"]), &[("X", "Q")]), Err(Error::UnknownName(_))));
        let g = chain();
        assert!(d_separated(&g, &CiStatement::new(&["X"], &["X"], &[])).is_err());
        assert!(d_separated(&g, &CiStatement::new(&["X"], &["W"], &[])).is_err());
    }

    #[test]
    fn dag_json_round_trip() {
        let g = bell_dag(3).unwrap();
        let s = g.to_json();
        assert!(s.contains("\"latent\"") && s.contains("\"card\": 3"));
        assert_eq!(CausalDag::from_json(&s).unwrap(), g);
        assert!(CausalDag::from_json(r#"{"nodes":[{"name":"X","kind":"observed","card":2}],"edges":[["X","X"]]}"#).is_err());
    }
}
