//! Exact LHV, LF and NS correlation polytopes.
//!
//! All arithmetic here is over [`Rational`]. Membership is decided by LP;
//! an infeasible LP yields a Farkas vector that is turned into a separating
//! inequality whose bound is then tightened to the polytope maximum.

pub mod extension;
pub mod facets;
pub mod slice;

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::behavior::{deterministic_behavior, Behavior, DeterministicStrategy, Inequality, Scenario, Sense};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::scalar::{primitive_integers, Rational};

pub use extension::{ExtIndex, ExtensionLayout, LfExtension};
pub use facets::{enumerate_facets, enumerate_facets_with, facets_cg, FacetOptions};
pub use slice::{slice_2d, SliceData, SlicePolygon};

/// Default bound on the number of deterministic strategies.
pub const DEFAULT_VERTEX_CAP: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolytopeKind {
    Lhv,
    Lf,
    Ns,
}

impl PolytopeKind {
    pub const ALL: [PolytopeKind; 3] = [PolytopeKind::Lhv, PolytopeKind::Lf, PolytopeKind::Ns];

    pub fn name(&self) -> &'static str {
        match self {
            PolytopeKind::Lhv => "LHV",
            PolytopeKind::Lf => "LF",
            PolytopeKind::Ns => "NS",
        }
    }

    pub fn check_scenario(&self, sc: &Scenario) -> Result<()> {
        if *self == PolytopeKind::Lf && !sc.supports_lf() {
            return Err(Error::InvalidScenario(format!("LF needs at least 2 settings per party, got {sc}")));
        }
        Ok(())
    }
}

impl fmt::Display for PolytopeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolytopeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lhv" => Ok(PolytopeKind::Lhv),
            "lf" => Ok(PolytopeKind::Lf),
            "ns" => Ok(PolytopeKind::Ns),
            _ => Err(Error::UnknownName(format!("polytope kind '{s}' (expected lhv, lf or ns)"))),
        }
    }
}

pub fn enumerate_lhv_vertices(sc: &Scenario) -> Result<Vec<Behavior<Rational>>> {
    enumerate_lhv_vertices_capped(sc, DEFAULT_VERTEX_CAP)
}

pub fn enumerate_lhv_vertices_capped(sc: &Scenario, cap: u128) -> Result<Vec<Behavior<Rational>>> {
    let needed = sc.strategy_count().unwrap_or(u128::MAX);
    if needed > cap {
        return Err(Error::CapExceeded { what: format!("LHV vertices of {sc}"), needed, cap });
    }
    DeterministicStrategy::all(sc).map(|s| deterministic_behavior(&s, sc)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// Convex weights over deterministic strategies (positive weights only).
    Decomposition(Vec<(DeterministicStrategy, Rational)>),
    Extension(LfExtension),
    /// Inside NS: normalization, positivity and no-signalling hold exactly.
    NoSignalling,
    /// Violated strictly by the query; bound equals the polytope maximum.
    Separating(Inequality<Rational>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipResult {
    pub inside: bool,
    pub certificate: Certificate,
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

fn require_normalized(b: &Behavior<Rational>) -> Result<()> {
    let sc = b.scenario();
    for x in 1..=sc.x_count {
        for y in 1..=sc.y_count {
            let mut s = Rational::zero();
            for a in 1..=sc.a_count {
                for bb in 1..=sc.b_count {
                    s += b.get(a, bb, x, y);
                }
            }
            if !s.is_one() {
                return Err(Error::Unnormalized(format!("block (x={x}, y={y}) sums to {s}")));
            }
        }
    }
    Ok(())
}

/// Scale `coeffs . p <= bound` to primitive integers.
fn integer_inequality(sc: Scenario, coeffs: &[Rational], bound: &Rational) -> Result<Inequality<Rational>> {
    let mut v = coeffs.to_vec();
    v.push(bound.clone());
    let ints: Vec<Rational> = primitive_integers(&v).into_iter().map(Rational::from_integer).collect();
    let (c, b) = ints.split_at(coeffs.len());
    Inequality::new(sc, c.to_vec(), b[0].clone(), Sense::Le)
}

/// Separating inequality from a direction `c` with `c . p` above the
/// polytope: the bound is the exact maximum over `kind`.
fn separating(kind: PolytopeKind, sc: Scenario, c: &[Rational]) -> Result<Inequality<Rational>> {
    let (bound, _) = maximize(kind, &sc, c)?;
    integer_inequality(sc, c, &bound)
}

pub fn membership(kind: PolytopeKind, b: &Behavior<Rational>) -> Result<MembershipResult> {
    let sc = *b.scenario();
    kind.check_scenario(&sc)?;
    require_normalized(b)?;
    match kind {
        PolytopeKind::Ns => Ok(ns_membership(b)),
        PolytopeKind::Lhv => {
            let strategies: Vec<DeterministicStrategy> = {
                let needed = sc.strategy_count().unwrap_or(u128::MAX);
                if needed > DEFAULT_VERTEX_CAP {
                    return Err(Error::CapExceeded { what: format!("LHV vertices of {sc}"), needed, cap: DEFAULT_VERTEX_CAP });
                }
                DeterministicStrategy::all(&sc).collect()
            };
            let mut lp = LinearProgram::<Rational>::new(strategies.len());
            for (a, bb, x, y) in sc.entries() {
                let terms: Vec<(usize, Rational)> = strategies
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.alice_map[x - 1] == a && s.bob_map[y - 1] == bb)
                    .map(|(j, _)| (j, Rational::one()))
                    .collect();
                lp.add_sparse(&terms, Relation::Eq, b.get(a, bb, x, y).clone());
            }
            match lp.feasibility()? {
                LpOutcome::Optimal(sol) => {
                    let weights = strategies
                        .into_iter()
                        .zip(sol.x)
                        .filter(|(_, w)| !w.is_zero())
                        .collect();
                    Ok(MembershipResult { inside: true, certificate: Certificate::Decomposition(weights) })
                }
                LpOutcome::Infeasible { farkas } => Ok(MembershipResult {
                    inside: false,
                    certificate: Certificate::Separating(separating(kind, sc, &farkas)?),
                }),
                LpOutcome::Unbounded => Err(Error::Internal("feasibility LP reported unbounded".into())),
            }
        }
        PolytopeKind::Lf => {
            let layout = ExtensionLayout::new(sc)?;
            let lp = layout.lp(Some(b));
            match lp.feasibility()? {
                LpOutcome::Optimal(sol) => Ok(MembershipResult {
                    inside: true,
                    certificate: Certificate::Extension(LfExtension::from_solution(&layout, &sol.x)),
                }),
                LpOutcome::Infeasible { farkas } => {
                    // marginal rows come first, one per table entry
                    let c = &farkas[..sc.len()];
                    Ok(MembershipResult { inside: false, certificate: Certificate::Separating(separating(kind, sc, c)?) })
                }
                LpOutcome::Unbounded => Err(Error::Internal("feasibility LP reported unbounded".into())),
            }
        }
    }
}

fn ns_membership(b: &Behavior<Rational>) -> MembershipResult {
    let sc = *b.scenario();
    for (a, bb, x, y) in sc.entries() {
        if b.get(a, bb, x, y) < &Rational::zero() {
            return MembershipResult {
                inside: false,
                certificate: Certificate::Separating(Inequality::positivity(sc, a, bb, x, y)),
            };
        }
    }
    // Alice marginal at (x,y) versus (x,1); Bob at (x,y) versus (1,y)
    let mut witness = None;
    'outer: for x in 1..=sc.x_count {
        for y in 1..=sc.y_count {
            for a in 1..=sc.a_count {
                if y > 1 && b.alice_marginal(a, x, y) != b.alice_marginal(a, x, 1) {
                    let up = b.alice_marginal(a, x, y) > b.alice_marginal(a, x, 1);
                    witness = Some((up, (0..sc.b_count).map(|k| (a, k + 1, x, y)).collect::<Vec<_>>(), (0..sc.b_count).map(|k| (a, k + 1, x, 1)).collect::<Vec<_>>()));
                    break 'outer;
                }
            }
            for bb in 1..=sc.b_count {
                if x > 1 && b.bob_marginal(bb, x, y) != b.bob_marginal(bb, 1, y) {
                    let up = b.bob_marginal(bb, x, y) > b.bob_marginal(bb, 1, y);
                    witness = Some((up, (0..sc.a_count).map(|k| (k + 1, bb, x, y)).collect(), (0..sc.a_count).map(|k| (k + 1, bb, 1, y)).collect()));
                    break 'outer;
                }
            }
        }
    }
    match witness {
        None => MembershipResult { inside: true, certificate: Certificate::NoSignalling },
        Some((up, plus, minus)) => {
            let s = if up { Rational::one() } else { -Rational::one() };
            let mut coeffs = vec![Rational::zero(); sc.len()];
            for (a, bb, x, y) in plus {
                coeffs[sc.index(a, bb, x, y)] += &s;
            }
            for (a, bb, x, y) in minus {
                coeffs[sc.index(a, bb, x, y)] -= &s;
            }
            let ineq = Inequality::new(sc, coeffs, Rational::zero(), Sense::Le).expect("sized to scenario");
            MembershipResult { inside: false, certificate: Certificate::Separating(ineq) }
        }
    }
}

/// Check a membership certificate against the queried behavior.
pub fn verify_certificate(kind: PolytopeKind, b: &Behavior<Rational>, r: &MembershipResult) -> Result<bool> {
    let sc = *b.scenario();
    Ok(match (&r.certificate, r.inside) {
        (Certificate::Decomposition(ws), true) => {
            let mut acc = vec![Rational::zero(); sc.len()];
            let mut total = Rational::zero();
            for (s, w) in ws {
                if w < &Rational::zero() {
                    return Ok(false);
                }
                total += w;
                let v: Behavior<Rational> = deterministic_behavior(s, &sc)?;
                for (slot, e) in acc.iter_mut().zip(v.table()) {
                    if !e.is_zero() {
                        *slot += w * e;
                    }
                }
            }
            total.is_one() && acc.as_slice() == b.table()
        }
        (Certificate::Extension(ext), true) => ext.scenario == sc && ext.check().is_ok() && &ext.marginal()? == b,
        (Certificate::NoSignalling, true) => kind == PolytopeKind::Ns && ns_membership(b).inside,
        (Certificate::Separating(ineq), false) => {
            let value = dot(&ineq.coeffs, b.table());
            value > ineq.bound && max_over_polytope(kind, ineq)? == ineq.bound
        }
        _ => false,
    })
}

/// Maximum of `coeffs . p` over the polytope, with a maximizing behavior.
pub fn maximize(kind: PolytopeKind, sc: &Scenario, coeffs: &[Rational]) -> Result<(Rational, Behavior<Rational>)> {
    kind.check_scenario(sc)?;
    if coeffs.len() != sc.len() {
        return Err(Error::Dimension(format!("{} coefficients for scenario {sc}", coeffs.len())));
    }
    match kind {
        PolytopeKind::Lhv => {
            let mut best: Option<(Rational, Behavior<Rational>)> = None;
            for v in enumerate_lhv_vertices(sc)? {
                let val = dot(coeffs, v.table());
                if best.as_ref().is_none_or(|(b, _)| val > *b) {
                    best = Some((val, v));
                }
            }
            best.ok_or_else(|| Error::Internal("scenario has no strategies".into()))
        }
        PolytopeKind::Lf => {
            let layout = ExtensionLayout::new(*sc)?;
            let mut lp = layout.lp::<Rational>(None);
            lp.set_objective(layout.lift_functional(coeffs));
            let sol = optimal(lp.solve()?)?;
            let ext = LfExtension::from_solution(&layout, &sol.x);
            Ok((sol.value, ext.marginal()?))
        }
        PolytopeKind::Ns => {
            let lp = ns_lp(sc, coeffs);
            let sol = optimal(lp.solve()?)?;
            Ok((sol.value, Behavior::from_table(*sc, sol.x)?))
        }
    }
}

fn optimal(out: LpOutcome<Rational>) -> Result<crate::lp::LpSolution<Rational>> {
    match out {
        LpOutcome::Optimal(s) => Ok(s),
        LpOutcome::Infeasible { .. } => Err(Error::Internal("polytope LP infeasible".into())),
        LpOutcome::Unbounded => Err(Error::Internal("polytope LP unbounded".into())),
    }
}

fn ns_lp(sc: &Scenario, coeffs: &[Rational]) -> LinearProgram<Rational> {
    let mut lp = LinearProgram::new(sc.len());
    for x in 1..=sc.x_count {
        for y in 1..=sc.y_count {
            let terms: Vec<(usize, Rational)> = sc
                .entries()
                .filter(|&(_, _, x2, y2)| (x2, y2) == (x, y))
                .map(|(a, b, x2, y2)| (sc.index(a, b, x2, y2), Rational::one()))
                .collect();
            lp.add_sparse(&terms, Relation::Eq, Rational::one());
        }
    }
    for x in 1..=sc.x_count {
        for y in 2..=sc.y_count {
            for a in 1..sc.a_count {
                let mut terms = Vec::new();
                for b in 1..=sc.b_count {
                    terms.push((sc.index(a, b, x, y), Rational::one()));
                    terms.push((sc.index(a, b, x, 1), -Rational::one()));
                }
                lp.add_sparse(&terms, Relation::Eq, Rational::zero());
            }
        }
    }
    for y in 1..=sc.y_count {
        for x in 2..=sc.x_count {
            for b in 1..sc.b_count {
                let mut terms = Vec::new();
                for a in 1..=sc.a_count {
                    terms.push((sc.index(a, b, x, y), Rational::one()));
                    terms.push((sc.index(a, b, 1, y), -Rational::one()));
                }
                lp.add_sparse(&terms, Relation::Eq, Rational::zero());
            }
        }
    }
    lp.set_objective(coeffs.to_vec());
    lp
}

/// Exact maximum of the inequality's functional over the polytope. The
/// sense and bound of `ineq` are ignored.
pub fn max_over_polytope(kind: PolytopeKind, ineq: &Inequality<Rational>) -> Result<Rational> {
    Ok(maximize(kind, &ineq.scenario, &ineq.coeffs)?.0)
}
