//! AND-OR implication graph over causal and metaphysical principles, with
//! the no-go theorems that falsify bundles of them.
//!
//! Rules are definite Horn clauses; a position is a set of held principles
//! and its closure is the forward-chaining fixed point. A theorem marked as
//! falsified rules out every position whose closure contains one of its
//! bundles.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NameSet = BTreeSet<String>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub premises: Vec<String>,
    pub conclusion: String,
    /// Plain-language justification carried with the graph.
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem {
    pub name: String,
    pub bundles: Vec<Vec<String>>,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipleGraph {
    pub principles: Vec<String>,
    pub rules: Vec<Rule>,
    pub theorems: Vec<Theorem>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Position {
    pub held: NameSet,
}

impl Position {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Position { held: names.into_iter().map(Into::into).collect() }
    }

    pub fn without(&self, removed: &NameSet) -> Position {
        Position { held: self.held.difference(removed).cloned().collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Consistency {
    pub ok: bool,
    /// Every bundle of a falsified theorem contained in the closure.
    pub violated: Vec<(String, Vec<String>)>,
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn rule(premises: &[&str], conclusion: &str, note: &str) -> Rule {
    Rule { premises: names(premises), conclusion: conclusion.into(), note: note.into() }
}

/// The fifteen named principles.
pub const PRINCIPLES: [&str; 15] = [
    "AOE",
    "SpaceTime",
    "NoSuperdeterminism",
    "Locality",
    "Predetermination",
    "LocalCausality",
    "RPCC",
    "PCC",
    "DecorrelatingExplanation",
    "RelativisticCausalArrow",
    "TemporalCausalArrow",
    "RelativisticCausality",
    "IndependentInterventions",
    "InterventionistCausation",
    "LocalAction",
];

pub fn default_graph() -> PrincipleGraph {
    let ric = ["RelativisticCausalArrow", "InterventionistCausation"];
    let rules = vec![
        rule(
            &["PCC", "DecorrelatingExplanation"],
            "RPCC",
            "Common causes plus decorrelating explanation give Reichenbach's principle.",
        ),
        rule(
            &["RPCC", "RelativisticCausalArrow"],
            "LocalCausality",
            "Local Causality is Reichenbach's principle with the relativistic causal arrow.",
        ),
        rule(
            &["TemporalCausalArrow", "RelativisticCausality"],
            "RelativisticCausalArrow",
            "Causes precede effects in time and causal influence stays inside light cones.",
        ),
        rule(
            &["IndependentInterventions", "PCC"],
            "InterventionistCausation",
            "Free interventions with common-cause explanations make correlation with an intervention causal.",
        ),
        rule(&ric, "Locality", "An intervention cannot influence space-like separated events."),
        rule(&ric, "NoSuperdeterminism", "Interventions are uncorrelated with events outside their future."),
        rule(&ric, "LocalAction", "An intervention acts only within its future light cone."),
    ];
    let theorem = |name: &str, bundles: &[&[&str]], note: &str| Theorem {
        name: name.into(),
        bundles: bundles.iter().map(|b| names(b)).collect(),
        note: note.into(),
    };
    let theorems = vec![
        theorem(
            "Bell64",
            &[
                &["AOE", "SpaceTime", "NoSuperdeterminism", "Locality", "Predetermination"],
                &["AOE", "SpaceTime", "LocalAction", "Predetermination"],
            ],
            "Deterministic local hidden variables cannot reproduce quantum correlations.",
        ),
        theorem(
            "Bell76",
            &[
                &["AOE", "SpaceTime", "NoSuperdeterminism", "LocalCausality"],
                &["AOE", "SpaceTime", "LocalAction", "LocalCausality"],
            ],
            "Locally causal models cannot reproduce quantum correlations.",
        ),
        theorem(
            "LF",
            &[&["AOE", "SpaceTime", "NoSuperdeterminism", "Locality"], &["AOE", "SpaceTime", "LocalAction"]],
            "Absolute observed events with local, non-superdeterministic agency obey LF inequalities, which quantum theory violates.",
        ),
    ];
    PrincipleGraph { principles: names(&PRINCIPLES), rules, theorems }
}

impl PrincipleGraph {
    /// Check name references and acyclicity of the rule dependencies.
    pub fn validate(&self) -> Result<()> {
        let known: BTreeSet<&str> = self.principles.iter().map(String::as_str).collect();
        if known.len() != self.principles.len() {
            return Err(Error::InvalidGraph("duplicate principle name".into()));
        }
        let check = |n: &String| {
            if known.contains(n.as_str()) {
                Ok(())
            } else {
                Err(Error::UnknownName(n.clone()))
            }
        };
        for r in &self.rules {
            if r.premises.is_empty() {
                return Err(Error::InvalidGraph(format!("rule for {} has no premises", r.conclusion)));
            }
            r.premises.iter().try_for_each(check)?;
            check(&r.conclusion)?;
        }
        for t in &self.theorems {
            for b in &t.bundles {
                b.iter().try_for_each(check)?;
            }
        }
        // A conclusion may not reach itself through premise links.
        let mut deps: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for r in &self.rules {
            deps.entry(r.conclusion.as_str()).or_default().extend(r.premises.iter().map(String::as_str));
        }
        for start in deps.keys() {
            let mut stack: Vec<&str> = deps[start].iter().copied().collect();
            let mut seen = BTreeSet::new();
            while let Some(n) = stack.pop() {
                if n == *start {
                    return Err(Error::InvalidGraph(format!("{start} depends on itself")));
                }
                if seen.insert(n) {
                    if let Some(next) = deps.get(n) {
                        stack.extend(next.iter().copied());
                    }
                }
            }
        }
        Ok(())
    }

    fn check_position(&self, pos: &Position) -> Result<()> {
        match pos.held.iter().find(|n| !self.principles.contains(n)) {
            Some(n) => Err(Error::UnknownName(n.clone())),
            None => Ok(()),
        }
    }

    /// Case-insensitive theorem lookup.
    pub fn theorem(&self, name: &str) -> Result<&Theorem> {
        self.theorems
            .iter()
            .find(|t| t.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownName(format!("theorem {name}")))
    }

    /// Principles that are not the conclusion of any rule.
    pub fn basic(&self) -> Vec<String> {
        self.principles.iter().filter(|p| !self.rules.iter().any(|r| &r.conclusion == *p)).cloned().collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("graph serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: PrincipleGraph = serde_json::from_str(s)?;
        g.validate()?;
        Ok(g)
    }
}

fn closure_unchecked(g: &PrincipleGraph, held: &NameSet) -> NameSet {
    let mut out = held.clone();
    loop {
        let mut grew = false;
        for r in &g.rules {
            if !out.contains(&r.conclusion) && r.premises.iter().all(|p| out.contains(p)) {
                out.insert(r.conclusion.clone());
                grew = true;
            }
        }
        if !grew {
            return out;
        }
    }
}

pub fn closure(g: &PrincipleGraph, pos: &Position) -> Result<NameSet> {
    g.check_position(pos)?;
    Ok(closure_unchecked(g, &pos.held))
}

fn resolve<'a>(g: &'a PrincipleGraph, falsified: &[String]) -> Result<Vec<&'a Theorem>> {
    falsified.iter().map(|n| g.theorem(n)).collect()
}

fn violations(theorems: &[&Theorem], closed: &NameSet) -> Vec<(String, Vec<String>)> {
    let mut out = Vec::new();
    for t in theorems {
        for b in &t.bundles {
            if b.iter().all(|p| closed.contains(p)) {
                out.push((t.name.clone(), b.clone()));
            }
        }
    }
    out
}

pub fn consistent(g: &PrincipleGraph, pos: &Position, falsified: &[String]) -> Result<Consistency> {
    let theorems = resolve(g, falsified)?;
    let violated = violations(&theorems, &closure(g, pos)?);
    Ok(Consistency { ok: violated.is_empty(), violated })
}

/// Largest position searched exhaustively by [`minimal_repairs`].
pub const MAX_REPAIR_HELD: usize = 20;

/// All inclusion-minimal sets of held principles whose removal restores
/// consistency, ordered by size and then lexicographically.
pub fn minimal_repairs(g: &PrincipleGraph, pos: &Position, falsified: &[String]) -> Result<Vec<NameSet>> {
    g.check_position(pos)?;
    let theorems = resolve(g, falsified)?;
    let held: Vec<&String> = pos.held.iter().collect();
    if held.len() > MAX_REPAIR_HELD {
        return Err(Error::CapExceeded {
            what: "held principles for repair search".into(),
            needed: held.len() as u128,
            cap: MAX_REPAIR_HELD as u128,
        });
    }
    let n = held.len();
    let subset = |mask: u32| -> NameSet { (0..n).filter(|i| mask >> i & 1 == 1).map(|i| held[i].clone()).collect() };
    let ok = |mask: u32| violations(&theorems, &closure_unchecked(g, &pos.without(&subset(mask)).held)).is_empty();
    let good: Vec<u32> = (0..1u32 << n).into_par_iter().filter(|&m| ok(m)).collect();
    // Consistency is monotone under removal, so a good set is minimal iff no
    // single-element deletion is good.
    let good_set: BTreeSet<u32> = good.iter().copied().collect();
    let mut minimal: Vec<NameSet> = good
        .iter()
        .filter(|&&m| (0..n).all(|i| m >> i & 1 == 0 || !good_set.contains(&(m & !(1 << i)))))
        .map(|&m| subset(m))
        .collect();
    minimal.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(minimal)
}

/// The quantum-causal-model position: every deep causal principle except
/// decorrelating explanation, with absolute events.
pub fn qcm_position() -> Position {
    Position::new(["AOE", "SpaceTime", "PCC", "IndependentInterventions", "TemporalCausalArrow", "RelativisticCausality"])
}

/// All basic principles together with the redundant shallow ones.
pub fn full_position() -> Position {
    Position::new([
        "AOE",
        "SpaceTime",
        "NoSuperdeterminism",
        "Locality",
        "Predetermination",
        "PCC",
        "DecorrelatingExplanation",
        "TemporalCausalArrow",
        "RelativisticCausality",
        "IndependentInterventions",
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(list: &[&str]) -> NameSet {
        list.iter().map(|s| s.to_string()).collect()
    }

    fn all_theorems() -> Vec<String> {
        names(&["Bell64", "Bell76", "LF"])
    }

    #[test]
    fn default_graph_shape() {
        let g = default_graph();
        assert_eq!(g.principles.len(), 15);
        g.validate().unwrap();
        let allowed = set(&[
            "RPCC",
            "LocalCausality",
            "RelativisticCausalArrow",
            "InterventionistCausation",
            "Locality",
            "NoSuperdeterminism",
            "LocalAction",
        ]);
        assert!(g.rules.iter().all(|r| allowed.contains(&r.conclusion)));
    }

    #[test]
    fn cycle_rejected() {
        let mut g = default_graph();
        g.rules.push(rule(&["LocalAction"], "PCC", ""));
        assert!(matches!(g.validate(), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn closure_examples() {
        let g = default_graph();
        let c = closure(&g, &full_position()).unwrap();
        assert!(c.contains("LocalCausality") && c.contains("LocalAction"));
        assert!(closure(&g, &Position::default()).unwrap().is_empty());
        let c = closure(&g, &Position::new(["TemporalCausalArrow", "RelativisticCausality", "IndependentInterventions", "PCC"]))
            .unwrap();
        for n in ["RelativisticCausalArrow", "InterventionistCausation", "Locality", "NoSuperdeterminism", "LocalAction"] {
            assert!(c.contains(n), "{n}");
        }
        assert!(!c.contains("LocalCausality"));
        assert!(closure(&g, &Position::new(["Nonsense"])).is_err());
    }

    #[test]
    fn qcm_consistency() {
        let g = default_graph();
        let qcm = qcm_position();
        assert!(consistent(&g, &qcm, &names(&["Bell64", "Bell76"])).unwrap().ok);
        let r = consistent(&g, &qcm, &all_theorems()).unwrap();
        assert!(!r.ok);
        assert!(r.violated.contains(&("LF".into(), names(&["AOE", "SpaceTime", "LocalAction"]))));
        let realist = qcm.without(&set(&["RelativisticCausality"]));
        assert!(consistent(&g, &realist, &all_theorems()).unwrap().ok);
        assert!(consistent(&g, &qcm, &names(&["Bell99"])).is_err());
    }

    #[test]
    fn qcm_repairs_are_singletons() {
        let g = default_graph();
        let reps = minimal_repairs(&g, &qcm_position(), &names(&["LF"])).unwrap();
        let expected: Vec<NameSet> = ["AOE", "IndependentInterventions", "PCC", "RelativisticCausality", "SpaceTime", "TemporalCausalArrow"]
            .iter()
            .map(|n| set(&[n]))
            .collect();
        assert_eq!(reps, expected);
        assert!(!reps.iter().any(|r| r.contains("DecorrelatingExplanation")));
    }

    #[test]
    fn trivial_repairs() {
        let g = default_graph();
        assert_eq!(minimal_repairs(&g, &qcm_position(), &names(&["Bell64"])).unwrap(), vec![NameSet::new()]);
        assert_eq!(minimal_repairs(&g, &Position::default(), &all_theorems()).unwrap(), vec![NameSet::new()]);
    }

    #[test]
    fn graph_json_round_trip() {
        let g = default_graph();
        assert_eq!(PrincipleGraph::from_json(&g.to_json()).unwrap(), g);
        assert_eq!(g.theorem("lf").unwrap().name, "LF");
    }
}
