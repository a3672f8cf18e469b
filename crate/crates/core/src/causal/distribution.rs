use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{bits, check_ci_cap, ci_candidates, CausalDag, CiStatement, Mask};
use crate::error::{Error, Result};
use crate::scalar::{Field, Rational};

/// Largest joint table built from a factorization.
pub const TABLE_CAP: usize = 1 << 22;

/// Joint table over named discrete variables. Row-major, first variable
/// most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution<T> {
    names: Vec<String>,
    cards: Vec<usize>,
    table: Vec<T>,
}

impl<T: Field> JointDistribution<T> {
    pub fn new(names: Vec<String>, cards: Vec<usize>, table: Vec<T>) -> Result<Self> {
        if names.len() != cards.len() {
            return Err(Error::Dimension(format!("{} names for {} cardinalities", names.len(), cards.len())));
        }
        let size: usize = cards.iter().product();
        if table.len() != size {
            return Err(Error::Dimension(format!("table has {} entries, cardinalities need {size}", table.len())));
        }
        if table.iter().any(|p| p.is_strictly_negative()) {
            return Err(Error::OutOfRange("negative probability".into()));
        }
        let total = table.iter().fold(T::zero(), |s, p| s + p.clone());
        if !(total - T::one()).is_negligible() {
            return Err(Error::Unnormalized("joint table does not sum to 1".into()));
        }
        Ok(JointDistribution { names, cards, table })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    /// Probability of a full assignment (0-based values).
    pub fn get(&self, values: &[usize]) -> &T {
        let idx = values.iter().zip(&self.cards).fold(0, |acc, (v, c)| acc * c + v);
        &self.table[idx]
    }

    /// Marginal over `vars`, row-major in the given order.
    pub fn marginal(&self, vars: &[usize]) -> Vec<T> {
        let size: usize = vars.iter().map(|&v| self.cards[v]).product();
        let mut out = vec![T::zero(); size];
        let mut values = vec![0usize; self.cards.len()];
        for p in &self.table {
            if !p.is_zero() {
                let k = vars.iter().fold(0, |acc, &v| acc * self.cards[v] + values[v]);
                out[k] = out[k].clone() + p.clone();
            }
            for i in (0..values.len()).rev() {
                values[i] += 1;
                if values[i] < self.cards[i] {
                    break;
                }
                values[i] = 0;
            }
        }
        out
    }

    /// `max |p(a,b,z) p(z) - p(a,z) p(b,z)|` over all assignments.
    pub fn ci_residual(&self, a: &[usize], b: &[usize], z: &[usize]) -> T {
        let vars: Vec<usize> = a.iter().chain(b).chain(z).copied().collect();
        let joint = self.marginal(&vars);
        let size = |s: &[usize]| s.iter().map(|&v| self.cards[v]).product::<usize>();
        let (na, nb, nz) = (size(a), size(b), size(z));
        let mut pz = vec![T::zero(); nz];
        let mut paz = vec![T::zero(); na * nz];
        let mut pbz = vec![T::zero(); nb * nz];
        for ia in 0..na {
            for ib in 0..nb {
                for iz in 0..nz {
                    let p = &joint[(ia * nb + ib) * nz + iz];
                    pz[iz] = pz[iz].clone() + p.clone();
                    paz[ia * nz + iz] = paz[ia * nz + iz].clone() + p.clone();
                    pbz[ib * nz + iz] = pbz[ib * nz + iz].clone() + p.clone();
                }
            }
        }
        let mut worst = T::zero();
        for ia in 0..na {
            for ib in 0..nb {
                for iz in 0..nz {
                    let lhs = joint[(ia * nb + ib) * nz + iz].clone() * pz[iz].clone();
                    let rhs = paz[ia * nz + iz].clone() * pbz[ib * nz + iz].clone();
                    let d = (lhs - rhs).abs();
                    if d > worst {
                        worst = d;
                    }
                }
            }
        }
        worst
    }

    fn check_against(&self, g: &CausalDag) -> Result<()> {
        if self.names.len() != g.len() {
            return Err(Error::Dimension(format!("distribution has {} variables, DAG has {}", self.names.len(), g.len())));
        }
        for (i, node) in g.nodes().iter().enumerate() {
            if self.names[i] != node.name {
                return Err(Error::UnknownName(format!("variable {} where DAG has {}", self.names[i], node.name)));
            }
            if self.cards[i] != node.card {
                return Err(Error::Dimension(format!(
                    "cardinality mismatch for {}: distribution {}, DAG {}",
                    node.name, self.cards[i], node.card
                )));
            }
        }
        Ok(())
    }
}

/// Conditional table of one node: `cpt[parent_config][value]`, parent
/// configurations row-major over parents in index order.
pub type Cpt<T> = Vec<Vec<T>>;

/// Joint table of the Markov factorization `prod_v p(v | pa(v))`.
pub fn factorize<T: Field>(g: &CausalDag, cpts: &[Cpt<T>]) -> Result<JointDistribution<T>> {
    let n = g.len();
    if cpts.len() != n {
        return Err(Error::Dimension(format!("{} conditional tables for {n} nodes", cpts.len())));
    }
    let cards: Vec<usize> = g.nodes().iter().map(|v| v.card).collect();
    let size = cards.iter().try_fold(1usize, |s, &c| s.checked_mul(c)).filter(|&s| s <= TABLE_CAP);
    let size = size.ok_or_else(|| Error::CapExceeded {
        what: "joint table entries".into(),
        needed: cards.iter().map(|&c| c as u128).product(),
        cap: TABLE_CAP as u128,
    })?;
    let parents: Vec<Vec<usize>> = (0..n).map(|v| bits(g.parents(v)).collect()).collect();
    for v in 0..n {
        let configs: usize = parents[v].iter().map(|&p| cards[p]).product();
        if cpts[v].len() != configs || cpts[v].iter().any(|row| row.len() != cards[v]) {
            return Err(Error::Dimension(format!("conditional table shape for {}", g.nodes()[v].name)));
        }
        for row in &cpts[v] {
            let s = row.iter().fold(T::zero(), |s, p| s + p.clone());
            if !(s - T::one()).is_negligible() || row.iter().any(|p| p.is_strictly_negative()) {
                return Err(Error::Unnormalized(format!("conditional table row for {}", g.nodes()[v].name)));
            }
        }
    }
    let mut table = Vec::with_capacity(size);
    let mut values = vec![0usize; n];
    for _ in 0..size {
        let mut p = T::one();
        for v in 0..n {
            let cfg = parents[v].iter().fold(0, |acc, &q| acc * cards[q] + values[q]);
            p = p * cpts[v][cfg][values[v]].clone();
        }
        table.push(p);
        for i in (0..n).rev() {
            values[i] += 1;
            if values[i] < cards[i] {
                break;
            }
            values[i] = 0;
        }
    }
    let names = g.nodes().iter().map(|v| v.name.clone()).collect();
    JointDistribution::new(names, cards, table)
}

/// Exact random Markov parameterization: every conditional row draws
/// integer weights in `1..=16` and normalizes them.
pub fn random_markov(g: &CausalDag, seed: u64) -> Result<JointDistribution<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cpts: Vec<Cpt<Rational>> = (0..g.len())
        .map(|v| {
            let configs: usize = bits(g.parents(v)).map(|p| g.nodes()[p].card).product();
            (0..configs)
                .map(|_| {
                    let w: Vec<i64> = (0..g.nodes()[v].card).map(|_| rng.gen_range(1..=16)).collect();
                    let total: i64 = w.iter().sum();
                    w.into_iter().map(|x| Rational::new(x.into(), total.into())).collect()
                })
                .collect()
        })
        .collect();
    factorize(g, &cpts)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeCmc<T> {
    pub name: String,
    /// Largest `|p(x | nd, pa) - p(x | pa)|` over supported assignments.
    pub residual: T,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CmcReport<T> {
    pub passes: bool,
    pub nodes: Vec<NodeCmc<T>>,
}

/// Each node independent of its non-descendants given its parents.
pub fn cmc_check<T: Field>(g: &CausalDag, d: &JointDistribution<T>, tol: &T) -> Result<CmcReport<T>> {
    d.check_against(g)?;
    let mut nodes = Vec::with_capacity(g.len());
    for v in 0..g.len() {
        let pa: Vec<usize> = bits(g.parents(v)).collect();
        let nd_mask: Mask = g.all() & !g.descendants(v) & !g.parents(v) & !(1 << v);
        let nd: Vec<usize> = bits(nd_mask).collect();
        let residual = conditional_residual(d, v, &pa, &nd);
        let passes = residual <= *tol;
        nodes.push(NodeCmc { name: g.nodes()[v].name.clone(), residual, passes });
    }
    Ok(CmcReport { passes: nodes.iter().all(|n| n.passes), nodes })
}

fn conditional_residual<T: Field>(d: &JointDistribution<T>, v: usize, pa: &[usize], nd: &[usize]) -> T {
    if nd.is_empty() {
        return T::zero();
    }
    // layout (pa, nd, v)
    let vars: Vec<usize> = pa.iter().chain(nd).copied().chain([v]).collect();
    let joint = d.marginal(&vars);
    let card = |s: &[usize]| s.iter().map(|&u| d.cards[u]).product::<usize>();
    let (npa, nnd, nv) = (card(pa), card(nd), d.cards[v]);
    let mut worst = T::zero();
    for ip in 0..npa {
        let mut pa_tot = T::zero();
        let mut xv = vec![T::zero(); nv];
        for inn in 0..nnd {
            for x in 0..nv {
                let p = &joint[(ip * nnd + inn) * nv + x];
                xv[x] = xv[x].clone() + p.clone();
                pa_tot = pa_tot + p.clone();
            }
        }
        if pa_tot.is_zero() {
            continue;
        }
        for inn in 0..nnd {
            let row = &joint[(ip * nnd + inn) * nv..(ip * nnd + inn + 1) * nv];
            let tot = row.iter().fold(T::zero(), |s, p| s + p.clone());
            if tot.is_zero() {
                continue;
            }
            for x in 0..nv {
                let diff = (row[x].clone() / tot.clone() - xv[x].clone() / pa_tot.clone()).abs();
                if diff > worst {
                    worst = diff;
                }
            }
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaithfulnessReport {
    pub holds: bool,
    /// True in the distribution, not implied by the graph.
    pub extra_cis: Vec<CiStatement>,
    /// Implied by the graph, false in the distribution.
    pub missing_cis: Vec<CiStatement>,
}

/// Compare observed-node CIs of `d` with those implied by `g`.
pub fn faithfulness_check<T: Field>(g: &CausalDag, d: &JointDistribution<T>, tol: &T) -> Result<FaithfulnessReport> {
    d.check_against(g)?;
    check_ci_cap(g)?;
    let mut extra = Vec::new();
    let mut missing = Vec::new();
    for (i, j, z) in ci_candidates(g.observed()) {
        let zs: Vec<usize> = bits(z).collect();
        let holds = d.ci_residual(&[i], &[j], &zs) <= *tol;
        let implied = g.d_separated_mask(1 << i, 1 << j, z);
        if holds != implied {
            let s = g.statement(i, j, z);
            if holds {
                extra.push(s);
            } else {
                missing.push(s);
            }
        }
    }
    Ok(FaithfulnessReport { holds: extra.is_empty() && missing.is_empty(), extra_cis: extra, missing_cis: missing })
}
