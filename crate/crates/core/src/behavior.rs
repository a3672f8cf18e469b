//! Bipartite scenarios, behaviors p(a,b|x,y), linear inequalities over
//! them, and deterministic local strategies.
//!
//! All setting and outcome labels are 1-based at the API surface. Setting
//! 1 plays the "open the vault" role in Local Friendliness scenarios.

use std::fmt;

use num_traits::Zero;

use crate::cg::CgMap;
use crate::error::{Error, Result};
use crate::scalar::{rationalize, Rational, Rationalized, Scalar};

/// Counts of settings and outcomes for a two-party scenario. Outcome
/// cardinality is uniform across settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scenario {
    pub x_count: usize,
    pub y_count: usize,
    pub a_count: usize,
    pub b_count: usize,
}

impl Scenario {
    pub fn new(x_count: usize, y_count: usize, a_count: usize, b_count: usize) -> Result<Self> {
        if x_count == 0 || y_count == 0 || a_count == 0 || b_count == 0 {
            return Err(Error::InvalidScenario(format!(
                "all counts must be >= 1, got {x_count},{y_count},{a_count},{b_count}"
            )));
        }
        Ok(Scenario { x_count, y_count, a_count, b_count })
    }

    /// Binary-outcome scenario with the given setting counts.
    pub fn binary(x_count: usize, y_count: usize) -> Self {
        Scenario::new(x_count, y_count, 2, 2).expect("positive setting counts")
    }

    /// Parse the command-line spelling `x,y,a,b`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("scenario '{s}': {e}")))?;
        match parts.as_slice() {
            [x, y, a, b] => Scenario::new(*x, *y, *a, *b),
            _ => Err(Error::Parse(format!("scenario '{s}' must be x,y,a,b"))),
        }
    }

    /// Setting 1 is reserved for asking the friend, so LF needs at least
    /// one further setting per party.
    pub fn supports_lf(&self) -> bool {
        self.x_count >= 2 && self.y_count >= 2
    }

    pub fn is_binary(&self) -> bool {
        self.a_count == 2 && self.b_count == 2
    }

    /// Number of table entries.
    pub fn len(&self) -> usize {
        self.x_count * self.y_count * self.a_count * self.b_count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index of the 1-based entry (a, b, x, y). Iteration order is
    /// x outermost, then y, a, b.
    pub fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        debug_assert!(self.contains(a, b, x, y), "({a},{b},{x},{y}) outside {self}");
        (((x - 1) * self.y_count + (y - 1)) * self.a_count + (a - 1)) * self.b_count + (b - 1)
    }

    pub fn contains(&self, a: usize, b: usize, x: usize, y: usize) -> bool {
        (1..=self.a_count).contains(&a)
            && (1..=self.b_count).contains(&b)
            && (1..=self.x_count).contains(&x)
            && (1..=self.y_count).contains(&y)
    }

    /// All 1-based (a, b, x, y) tuples in flat-index order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        let sc = *self;
        (1..=sc.x_count).flat_map(move |x| {
            (1..=sc.y_count).flat_map(move |y| {
                (1..=sc.a_count).flat_map(move |a| (1..=sc.b_count).map(move |b| (a, b, x, y)))
            })
        })
    }

    /// Number of deterministic local strategies, `a^x * b^y`, or `None` on
    /// overflow.
    pub fn strategy_count(&self) -> Option<u128> {
        let a = (self.a_count as u128).checked_pow(self.x_count as u32)?;
        let b = (self.b_count as u128).checked_pow(self.y_count as u32)?;
        a.checked_mul(b)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.x_count, self.y_count, self.a_count, self.b_count)
    }
}

/// Conditional probability table p(a,b|x,y).
#[derive(Clone, Debug, PartialEq)]
pub struct Behavior<T> {
    scenario: Scenario,
    table: Vec<T>,
}

impl<T: Scalar> Behavior<T> {
    /// Build from a flat table in [`Scenario::index`] order.
    pub fn from_table(scenario: Scenario, table: Vec<T>) -> Result<Self> {
        if table.len() != scenario.len() {
            return Err(Error::Dimension(format!(
                "table has {} entries, scenario {} needs {}",
                table.len(),
                scenario,
                scenario.len()
            )));
        }
        Ok(Behavior { scenario, table })
    }

    /// Build from an unordered list of entries; every index must appear
    /// exactly once.
    pub fn from_entries(
        scenario: Scenario,
        entries: impl IntoIterator<Item = ((usize, usize, usize, usize), T)>,
    ) -> Result<Self> {
        let mut slots: Vec<Option<T>> = vec![None; scenario.len()];
        for ((a, b, x, y), v) in entries {
            if !scenario.contains(a, b, x, y) {
                return Err(Error::OutOfRange(format!("entry ({a},{b},{x},{y}) outside scenario {scenario}")));
            }
            let slot = &mut slots[scenario.index(a, b, x, y)];
            if slot.is_some() {
                return Err(Error::DuplicateEntry { a, b, x, y });
            }
            *slot = Some(v);
        }
        let mut table = Vec::with_capacity(slots.len());
        for ((a, b, x, y), slot) in scenario.entries().zip(slots) {
            table.push(slot.ok_or(Error::MissingEntry { a, b, x, y })?);
        }
        Ok(Behavior { scenario, table })
    }

    pub fn from_fn(scenario: Scenario, mut f: impl FnMut(usize, usize, usize, usize) -> T) -> Self {
        let table = scenario.entries().map(|(a, b, x, y)| f(a, b, x, y)).collect();
        Behavior { scenario, table }
    }

    /// p = 1/(a_count * b_count) everywhere.
    pub fn uniform(scenario: Scenario) -> Self {
        let v = T::one() / T::from_usize(scenario.a_count * scenario.b_count).expect("small count");
        Behavior { scenario, table: vec![v; scenario.len()] }
    }

    /// The Popescu-Rohrlich box on the first two settings of a binary
    /// scenario: p = 1/2 iff (a-1) xor (b-1) = (x-1)(y-1). Settings beyond
    /// 2 reuse the rule with the product taken modulo 2.
    pub fn pr_box(scenario: Scenario) -> Result<Self> {
        if !scenario.is_binary() {
            return Err(Error::InvalidScenario("PR box needs binary outcomes".into()));
        }
        let half = T::one() / T::from_u8(2).expect("2");
        Ok(Behavior::from_fn(scenario, |a, b, x, y| {
            if ((a - 1) ^ (b - 1)) == ((x - 1) * (y - 1)) % 2 {
                half.clone()
            } else {
                T::zero()
            }
        }))
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    pub fn into_table(self) -> Vec<T> {
        self.table
    }

    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> &T {
        &self.table[self.scenario.index(a, b, x, y)]
    }

    pub fn set(&mut self, a: usize, b: usize, x: usize, y: usize, v: T) {
        let i = self.scenario.index(a, b, x, y);
        self.table[i] = v;
    }

    /// Alice's marginal p(a|x) computed with Bob's setting `y`.
    pub fn alice_marginal(&self, a: usize, x: usize, y: usize) -> T {
        (1..=self.scenario.b_count).fold(T::zero(), |s, b| s + self.get(a, b, x, y).clone())
    }

    /// Bob's marginal p(b|y) computed with Alice's setting `x`.
    pub fn bob_marginal(&self, b: usize, x: usize, y: usize) -> T {
        (1..=self.scenario.a_count).fold(T::zero(), |s, a| s + self.get(a, b, x, y).clone())
    }

    /// Entrywise convex combination `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Self, lambda: &T) -> Result<Self> {
        if self.scenario != other.scenario {
            return Err(Error::ScenarioMismatch(format!("{} vs {}", self.scenario, other.scenario)));
        }
        let mu = T::one() - lambda.clone();
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(p, q)| lambda.clone() * p.clone() + mu.clone() * q.clone())
            .collect();
        Ok(Behavior { scenario: self.scenario, table })
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.scenario != other.scenario {
            return Err(Error::ScenarioMismatch(format!("{} vs {}", self.scenario, other.scenario)));
        }
        Ok(self
            .table
            .iter()
            .zip(&other.table)
            .map(|(p, q)| (p.clone() - q.clone()).abs())
            .fold(T::zero(), |m, d| if d > m { d } else { m }))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Behavior<U> {
        Behavior { scenario: self.scenario, table: self.table.iter().map(f).collect() }
    }
}

impl Behavior<f64> {
    /// Convert to exact rationals on the grid `1/den`.
    ///
    /// Rounding is done on the Collins-Gisin coordinates (marginals and
    /// joint non-last outcomes), so the result is exactly normalized and
    /// exactly no-signalling. Fails if rounding creates a negative entry.
    pub fn rationalize(&self, den: u64) -> Result<Rationalized<Behavior<Rational>>> {
        let map = CgMap::new(self.scenario);
        let coords = map.coordinates(self);
        let rounded: Vec<Rational> = coords.iter().map(|&c| rationalize(c, den)).collect();
        let exact = map.behavior(&rounded);
        let mut max_error = 0.0f64;
        for (p, q) in self.table.iter().zip(exact.table()) {
            max_error = max_error.max((p - q.to_f64_lossy()).abs());
        }
        if let Some(neg) = exact.table().iter().find(|v| *v < &Rational::zero()) {
            return Err(Error::OutOfRange(format!("rationalized entry {neg} is negative")));
        }
        Ok(Rationalized { value: exact, max_error })
    }
}

/// Comparison sense of an [`Inequality`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
}

impl Sense {
    pub fn symbol(&self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
        }
    }
}

/// Linear functional `sum coeffs(a,b,x,y) p(a,b|x,y)` compared against a
/// bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Inequality<T> {
    pub scenario: Scenario,
    pub coeffs: Vec<T>,
    pub bound: T,
    pub sense: Sense,
}

impl<T: Scalar> Inequality<T> {
    pub fn new(scenario: Scenario, coeffs: Vec<T>, bound: T, sense: Sense) -> Result<Self> {
        if coeffs.len() != scenario.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients for scenario {} with {} entries",
                coeffs.len(),
                scenario,
                scenario.len()
            )));
        }
        Ok(Inequality { scenario, coeffs, bound, sense })
    }

    pub fn from_fn(
        scenario: Scenario,
        bound: T,
        sense: Sense,
        mut f: impl FnMut(usize, usize, usize, usize) -> T,
    ) -> Self {
        let coeffs = scenario.entries().map(|(a, b, x, y)| f(a, b, x, y)).collect();
        Inequality { scenario, coeffs, bound, sense }
    }

    pub fn coeff(&self, a: usize, b: usize, x: usize, y: usize) -> &T {
        &self.coeffs[self.scenario.index(a, b, x, y)]
    }

    /// Same halfspace written with sense `<=`.
    pub fn to_le(&self) -> Self {
        match self.sense {
            Sense::Le => self.clone(),
            Sense::Ge => Inequality {
                scenario: self.scenario,
                coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
                bound: -self.bound.clone(),
                sense: Sense::Le,
            },
        }
    }

    /// `true` when `value` satisfies the inequality.
    pub fn holds_for(&self, value: &T) -> bool {
        match self.sense {
            Sense::Le => *value <= self.bound,
            Sense::Ge => *value >= self.bound,
        }
    }

    /// Amount by which `value` violates the inequality (positive means
    /// violated).
    pub fn violation(&self, value: &T) -> T {
        match self.sense {
            Sense::Le => value.clone() - self.bound.clone(),
            Sense::Ge => self.bound.clone() - value.clone(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Inequality<U> {
        Inequality {
            scenario: self.scenario,
            coeffs: self.coeffs.iter().map(&f).collect(),
            bound: f(&self.bound),
            sense: self.sense,
        }
    }

    /// CHSH functional `E(x1,y1) + E(x1,y2) + E(x2,y1) - E(x2,y2) <= 2`
    /// on the given setting pairs, expanded into p-coefficients with the
    /// correlator `E = p(1,1) + p(2,2) - p(1,2) - p(2,1)`.
    pub fn chsh(scenario: Scenario, xs: (usize, usize), ys: (usize, usize)) -> Result<Self> {
        if !scenario.is_binary() {
            return Err(Error::InvalidScenario("CHSH needs binary outcomes".into()));
        }
        let ok = |s: usize, n: usize| (1..=n).contains(&s);
        if !(ok(xs.0, scenario.x_count) && ok(xs.1, scenario.x_count) && ok(ys.0, scenario.y_count) && ok(ys.1, scenario.y_count))
            || xs.0 == xs.1
            || ys.0 == ys.1
        {
            return Err(Error::OutOfRange(format!("CHSH settings {xs:?} x {ys:?} on {scenario}")));
        }
        let two = T::from_u8(2).expect("2");
        Ok(Inequality::from_fn(scenario, two, Sense::Le, |a, b, x, y| {
            let sign_xy = if x == xs.0 && (y == ys.0 || y == ys.1) || x == xs.1 && y == ys.0 {
                T::one()
            } else if x == xs.1 && y == ys.1 {
                -T::one()
            } else {
                return T::zero();
            };
            if a == b {
                sign_xy
            } else {
                -sign_xy
            }
        }))
    }

    /// Positivity `p(a,b|x,y) >= 0`, written as `-p(a,b|x,y) <= 0`.
    pub fn positivity(scenario: Scenario, a: usize, b: usize, x: usize, y: usize) -> Self {
        Inequality::from_fn(scenario, T::zero(), Sense::Le, |a2, b2, x2, y2| {
            if (a2, b2, x2, y2) == (a, b, x, y) {
                -T::one()
            } else {
                T::zero()
            }
        })
    }
}

impl<T: Scalar> fmt::Display for Inequality<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((a, b, x, y), c) in self.scenario.entries().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            let (sign, mag) = if c < &T::zero() { ("-", -c.clone()) } else { ("+", c.clone()) };
            if first && sign == "+" {
                write!(f, "{mag}p({a}{b}|{x}{y})")?;
            } else {
                write!(f, "{sign}{mag}p({a}{b}|{x}{y})")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " {} {}", self.sense.symbol(), self.bound)
    }
}

/// Deterministic local strategy: Alice answers `alice_map[x-1]` to setting
/// x, Bob answers `bob_map[y-1]` to setting y (outcomes 1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub alice_map: Vec<usize>,
    pub bob_map: Vec<usize>,
}

impl DeterministicStrategy {
    pub fn new(alice_map: Vec<usize>, bob_map: Vec<usize>) -> Self {
        DeterministicStrategy { alice_map, bob_map }
    }

    pub fn check(&self, sc: &Scenario) -> Result<()> {
        if self.alice_map.len() != sc.x_count || self.bob_map.len() != sc.y_count {
            return Err(Error::OutOfRange(format!(
                "strategy covers {}x{} settings, scenario has {}x{}",
                self.alice_map.len(),
                self.bob_map.len(),
                sc.x_count,
                sc.y_count
            )));
        }
        if let Some(a) = self.alice_map.iter().find(|a| !(1..=sc.a_count).contains(*a)) {
            return Err(Error::OutOfRange(format!("Alice outcome {a} outside 1..={}", sc.a_count)));
        }
        if let Some(b) = self.bob_map.iter().find(|b| !(1..=sc.b_count).contains(*b)) {
            return Err(Error::OutOfRange(format!("Bob outcome {b} outside 1..={}", sc.b_count)));
        }
        Ok(())
    }

    /// All strategies of a scenario in lexicographic order (Alice's map
    /// most significant, setting 1 first).
    pub fn all(sc: &Scenario) -> impl Iterator<Item = DeterministicStrategy> + '_ {
        let total = sc.strategy_count().expect("strategy count fits u128");
        (0..total).map(move |mut k| {
            let mut bob = vec![0; sc.y_count];
            for slot in bob.iter_mut().rev() {
                *slot = (k % sc.b_count as u128) as usize + 1;
                k /= sc.b_count as u128;
            }
            let mut alice = vec![0; sc.x_count];
            for slot in alice.iter_mut().rev() {
                *slot = (k % sc.a_count as u128) as usize + 1;
                k /= sc.a_count as u128;
            }
            DeterministicStrategy { alice_map: alice, bob_map: bob }
        })
    }
}

/// Residuals of the three defining constraint families of a behavior.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport<T> {
    pub is_normalized: bool,
    pub is_nonnegative: bool,
    pub is_no_signalling: bool,
    pub normalization_residual: T,
    pub negativity_residual: T,
    pub signalling_residual: T,
    /// Largest of the three residuals.
    pub max_violation: T,
}

impl<T: Scalar> ValidationReport<T> {
    pub fn is_valid(&self) -> bool {
        self.is_normalized && self.is_nonnegative
    }

    pub fn all_ok(&self) -> bool {
        self.is_normalized && self.is_nonnegative && self.is_no_signalling
    }
}

fn max_of<T: Scalar>(m: T, v: T) -> T {
    if v > m {
        v
    } else {
        m
    }
}

pub fn validate_behavior<T: Scalar>(b: &Behavior<T>, tol: &T) -> ValidationReport<T> {
    let sc = b.scenario();
    let mut norm = T::zero();
    let mut neg = T::zero();
    for x in 1..=sc.x_count {
        for y in 1..=sc.y_count {
            let mut total = T::zero();
            for a in 1..=sc.a_count {
                for b_ in 1..=sc.b_count {
                    let p = b.get(a, b_, x, y).clone();
                    if p < T::zero() {
                        neg = max_of(neg, -p.clone());
                    }
                    total = total + p;
                }
            }
            norm = max_of(norm, (total - T::one()).abs());
        }
    }
    let sig = all_pairs_signalling(b);
    let max_violation = max_of(max_of(norm.clone(), neg.clone()), sig.clone());
    ValidationReport {
        is_normalized: norm <= *tol,
        is_nonnegative: neg <= *tol,
        is_no_signalling: sig <= *tol,
        normalization_residual: norm,
        negativity_residual: neg,
        signalling_residual: sig,
        max_violation,
    }
}

fn all_pairs_signalling<T: Scalar>(b: &Behavior<T>) -> T {
    let sc = b.scenario();
    let mut sig = T::zero();
    for x in 1..=sc.x_count {
        for a in 1..=sc.a_count {
            for y in 1..=sc.y_count {
                for y2 in (y + 1)..=sc.y_count {
                    sig = max_of(sig, (b.alice_marginal(a, x, y) - b.alice_marginal(a, x, y2)).abs());
                }
            }
        }
    }
    for y in 1..=sc.y_count {
        for b_ in 1..=sc.b_count {
            for x in 1..=sc.x_count {
                for x2 in (x + 1)..=sc.x_count {
                    sig = max_of(sig, (b.bob_marginal(b_, x, y) - b.bob_marginal(b_, x2, y)).abs());
                }
            }
        }
    }
    sig
}

pub fn deterministic_behavior<T: Scalar>(s: &DeterministicStrategy, sc: &Scenario) -> Result<Behavior<T>> {
    s.check(sc)?;
    Ok(Behavior::from_fn(*sc, |a, b, x, y| {
        if s.alice_map[x - 1] == a && s.bob_map[y - 1] == b {
            T::one()
        } else {
            T::zero()
        }
    }))
}

pub fn evaluate_inequality<T: Scalar>(ineq: &Inequality<T>, b: &Behavior<T>) -> Result<T> {
    if ineq.scenario != *b.scenario() {
        return Err(Error::ScenarioMismatch(format!(
            "inequality on {}, behavior on {}",
            ineq.scenario,
            b.scenario()
        )));
    }
    Ok(ineq
        .coeffs
        .iter()
        .zip(b.table())
        .fold(T::zero(), |s, (c, p)| if c.is_zero() { s } else { s + c.clone() * p.clone() }))
}

/// Convenience: `true` iff `b` satisfies `ineq`.
pub fn satisfies<T: Scalar>(ineq: &Inequality<T>, b: &Behavior<T>) -> Result<bool> {
    Ok(ineq.holds_for(&evaluate_inequality(ineq, b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn two() -> Scenario {
        Scenario::binary(2, 2)
    }

    #[test]
    fn uniform_is_valid_with_zero_residuals() {
        let b = Behavior::<Rational>::uniform(Scenario::binary(3, 3));
        let r = validate_behavior(&b, &Rational::zero());
        assert!(r.all_ok());
        assert_eq!(r.max_violation, int(0));
    }

    #[test]
    fn pr_box_is_no_signalling() {
        let b = Behavior::<Rational>::pr_box(two()).unwrap();
        let r = validate_behavior(&b, &Rational::zero());
        assert!(r.is_no_signalling && r.all_ok());
        assert_eq!(b.get(1, 1, 2, 2), &int(0));
        assert_eq!(b.get(1, 2, 2, 2), &rat(1, 2));
    }

    #[test]
    fn perturbed_entry_reports_residual() {
        let mut b = Behavior::<f64>::uniform(two());
        b.set(1, 1, 1, 1, 0.25 + 0.1);
        let r = validate_behavior(&b, &1e-12);
        assert!(!r.is_normalized);
        assert!((r.max_violation - 0.1).abs() < 1e-12);
        assert!((r.normalization_residual - 0.1).abs() < 1e-12);
    }

    #[test]
    fn missing_entry_is_structural_error() {
        let sc = two();
        let entries: Vec<_> = sc.entries().skip(1).map(|e| (e, int(0))).collect();
        match Behavior::from_entries(sc, entries) {
            Err(Error::MissingEntry { a: 1, b: 1, x: 1, y: 1 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constant_strategy_table() {
        let s = DeterministicStrategy::new(vec![1, 1], vec![1, 1]);
        let b: Behavior<Rational> = deterministic_behavior(&s, &two()).unwrap();
        for x in 1..=2 {
            for y in 1..=2 {
                assert_eq!(b.get(1, 1, x, y), &int(1));
                assert_eq!(b.get(2, 2, x, y), &int(0));
            }
        }
    }

    #[test]
    fn identity_alice_map() {
        let s = DeterministicStrategy::new(vec![1, 2], vec![2, 2]);
        let b: Behavior<Rational> = deterministic_behavior(&s, &two()).unwrap();
        for x in 1..=2 {
            for y in 1..=2 {
                assert_eq!(b.get(x, 2, x, y), &int(1));
            }
        }
    }

    #[test]
    fn out_of_range_strategy_rejected() {
        let s = DeterministicStrategy::new(vec![1, 3], vec![1, 1]);
        assert!(deterministic_behavior::<Rational>(&s, &two()).is_err());
        let s = DeterministicStrategy::new(vec![1], vec![1, 1]);
        assert!(deterministic_behavior::<Rational>(&s, &two()).is_err());
    }

    #[test]
    fn chsh_values() {
        let sc = two();
        let chsh = Inequality::<Rational>::chsh(sc, (1, 2), (1, 2)).unwrap();
        let pr = Behavior::pr_box(sc).unwrap();
        assert_eq!(evaluate_inequality(&chsh, &pr).unwrap(), int(4));
        assert_eq!(evaluate_inequality(&chsh, &Behavior::uniform(sc)).unwrap(), int(0));
    }

    #[test]
    fn chsh_lhv_maximum_by_exhaustion() {
        let sc = two();
        let chsh = Inequality::<Rational>::chsh(sc, (1, 2), (1, 2)).unwrap();
        let best = DeterministicStrategy::all(&sc)
            .map(|s| evaluate_inequality(&chsh, &deterministic_behavior(&s, &sc).unwrap()).unwrap())
            .max()
            .unwrap();
        assert_eq!(DeterministicStrategy::all(&sc).count(), 16);
        assert_eq!(best, int(2));
    }

    #[test]
    fn scenario_mismatch_is_error() {
        let chsh = Inequality::<Rational>::chsh(two(), (1, 2), (1, 2)).unwrap();
        let b = Behavior::uniform(Scenario::binary(3, 3));
        assert!(matches!(evaluate_inequality(&chsh, &b), Err(Error::ScenarioMismatch(_))));
    }

    #[test]
    fn rationalize_keeps_exact_no_signalling() {
        let sc = two();
        let b = Behavior::<f64>::from_fn(sc, |a, b, x, y| {
            let e = if (x, y) == (2, 2) { -1.0 } else { 1.0 } / 2f64.sqrt();
            (1.0 + if a == b { e } else { -e }) / 4.0
        });
        let r = b.rationalize(1_000_000).unwrap();
        assert!(r.max_error < 2e-6);
        assert!(validate_behavior(&r.value, &Rational::zero()).all_ok());
    }

    #[test]
    fn display_is_readable() {
        let ineq = Inequality::<Rational>::positivity(two(), 1, 2, 2, 1);
        assert_eq!(ineq.to_string(), "-1p(12|21) <= 0");
    }
}
