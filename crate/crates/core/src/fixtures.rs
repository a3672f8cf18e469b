//! Derived reference values, regenerated from their oracles and compared
//! against the committed copies under `tests/fixtures`.

use std::fs;
use std::path::{Path, PathBuf};

use num_traits::Signed;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::behavior::{evaluate_inequality, Behavior, Inequality, Scenario};
use crate::causal::{bell_dag, bell_dag_scan, faithfulness_check, implied_cis, random_markov};
use crate::cg::CgMap;
use crate::dd::independent_rows;
use crate::error::Result;
use crate::fm::Halfspace;
use crate::json::{behavior_to_value, inequalities_to_string, inequality_to_value, membership_to_value, pretty};
use crate::polytope::facets::{difference, facets_cg, lift, FacetOptions};
use crate::polytope::{maximize, membership, PolytopeKind};
use crate::principles::{closure, consistent, default_graph, full_position, minimal_repairs, qcm_position, Position};
use crate::quantum::{born_behavior, optimize_violation, tsirelson_grid, OptimizeResult, PureState, QubitMeasurement};
use crate::scalar::{rat, Rational, Scalar};

pub const CHSH_SEED: u64 = 7;
pub const CHSH_STEPS: usize = 50;
pub const GRID_RESOLUTION: usize = 360;
/// Grid resolution used to rank genuine facets by singlet violation.
pub const SELECTION_RESOLUTION: usize = 36;
pub const GENUINE_SEED: u64 = 2;
pub const GENUINE_STEPS: usize = 50;
pub const RATIONALIZE_DEN: u64 = 1_000_000;
pub const FAITHFUL_SEED: u64 = 1;
pub const SCAN_LATENT: usize = 4;

/// One fixture file.
#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub contents: String,
}

/// Directory holding the committed fixtures.
pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

pub fn scenario_3x3() -> Scenario {
    Scenario::binary(3, 3)
}

pub fn chsh_2x2() -> Inequality<Rational> {
    Inequality::chsh(Scenario::binary(2, 2), (1, 2), (1, 2)).expect("settings in range")
}

/// Singlet CHSH behavior at 2 sqrt 2, rounded to denominator 1e6.
pub fn quantum_chsh_behavior() -> Result<Behavior<Rational>> {
    let alice = [QubitMeasurement::zx(0.0), QubitMeasurement::zx(std::f64::consts::FRAC_PI_2)];
    let bob = [QubitMeasurement::zx(1.25 * std::f64::consts::PI), QubitMeasurement::zx(0.75 * std::f64::consts::PI)];
    Ok(born_behavior(&PureState::singlet(), &alice, &bob)?.rationalize(RATIONALIZE_DEN)?.value)
}

/// Facets of LF on 3x3 that are not facets of LHV, in canonical order.
pub fn genuine_lf_facets() -> Result<Vec<Halfspace<Rational>>> {
    let sc = scenario_3x3();
    let opts = FacetOptions::default();
    let lf = facets_cg(PolytopeKind::Lf, &sc, &opts)?;
    let lhv = facets_cg(PolytopeKind::Lhv, &sc, &opts)?;
    Ok(difference(&lf, &lhv))
}

/// First genuine facet whose singlet grid violation is maximal.
pub fn select_genuine_facet(genuine: &[Halfspace<Rational>]) -> Result<(usize, Inequality<Rational>)> {
    let sc = scenario_3x3();
    let scores = genuine
        .par_iter()
        .map(|h| {
            let ineq = lift(&sc, h).map(|c| c.to_f64_lossy());
            Ok(tsirelson_grid(&ineq, SELECTION_RESOLUTION)?.value - ineq.bound)
        })
        .collect::<Result<Vec<f64>>>()?;
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let idx = scores.iter().position(|&s| s >= best - 1e-9).expect("nonempty facet list");
    Ok((idx, lift(&sc, &genuine[idx])))
}

/// A vertex of LF outside LHV: maximizer of a slightly tilted CHSH on
/// settings {2,3}.
pub fn lf_vertex_outside_lhv() -> Result<Behavior<Rational>> {
    let sc = scenario_3x3();
    let chsh = Inequality::<Rational>::chsh(sc, (2, 3), (2, 3))?;
    let w: Vec<Rational> = chsh
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c + rat((k * 7 % 11) as i64 - 5, 1000))
        .collect();
    Ok(maximize(PolytopeKind::Lf, &sc, &w)?.1)
}

/// An NS point outside LF: maximizer of CHSH on settings {1,2} over NS.
pub fn ns_outside_lf() -> Result<Behavior<Rational>> {
    let sc = scenario_3x3();
    Ok(maximize(PolytopeKind::Ns, &sc, &Inequality::<Rational>::chsh(sc, (1, 2), (1, 2))?.coeffs)?.1)
}

/// PR box on settings {1,2}, uniform noise whenever setting 3 is used.
pub fn pr_with_noise() -> Behavior<Rational> {
    Behavior::from_fn(scenario_3x3(), |a, b, x, y| {
        if x == 3 || y == 3 {
            rat(1, 4)
        } else if (a + b) % 2 == ((x - 1) * (y - 1)) % 2 {
            rat(1, 2)
        } else {
            rat(0, 1)
        }
    })
}

/// Is `p` a vertex of the polytope with these coordinate-space facets?
pub fn is_vertex(facets: &[Halfspace<Rational>], p: &Behavior<Rational>) -> bool {
    let z = CgMap::new(*p.scenario()).coordinates(p);
    let tight: Vec<Vec<Rational>> = facets
        .iter()
        .filter(|h| h.normal.iter().zip(&z).map(|(a, b)| a * b).sum::<Rational>() == h.offset)
        .map(|h| h.normal.clone())
        .collect();
    independent_rows(&tight).len() == z.len()
}

fn optimizer_value(r: &OptimizeResult, ineq_id: &str, seed: u64, steps: usize) -> Value {
    json!({
        "ineq_id": ineq_id,
        "seed": seed,
        "steps": steps,
        "value": r.value,
        "config": r.config,
    })
}

fn polytope_2x2() -> Result<Vec<Fixture>> {
    let sc = Scenario::binary(2, 2);
    let opts = FacetOptions::default();
    let lhv: Vec<Inequality<Rational>> =
        facets_cg(PolytopeKind::Lhv, &sc, &opts)?.iter().map(|h| lift(&sc, h)).collect();
    let lf: Vec<Inequality<Rational>> = facets_cg(PolytopeKind::Lf, &sc, &opts)?.iter().map(|h| lift(&sc, h)).collect();
    let pr = Behavior::<Rational>::pr_box(sc)?;
    let mut members = serde_json::Map::new();
    for kind in PolytopeKind::ALL {
        members.insert(kind.name().into(), membership_to_value(kind, &membership(kind, &pr)?));
    }
    let chsh = chsh_2x2();
    let summary = json!({
        "lhv_facets": lhv.len(),
        "lf_facets": lf.len(),
        "lf_equals_lhv": lf == lhv,
        "chsh_max": {
            "lhv": crate::json::rational_to_value(&maximize(PolytopeKind::Lhv, &sc, &chsh.coeffs)?.0),
            "lf": crate::json::rational_to_value(&maximize(PolytopeKind::Lf, &sc, &chsh.coeffs)?.0),
            "ns": crate::json::rational_to_value(&maximize(PolytopeKind::Ns, &sc, &chsh.coeffs)?.0),
        },
        "pr_box": Value::Object(members),
    });
    Ok(vec![
        Fixture { name: "lhv_facets_2x2.json", contents: inequalities_to_string(&lhv) },
        Fixture { name: "polytope_2x2.json", contents: pretty(&summary) },
    ])
}

fn polytope_3x3() -> Result<(Vec<Fixture>, Vec<Halfspace<Rational>>)> {
    let sc = scenario_3x3();
    let opts = FacetOptions::default();
    let lf = facets_cg(PolytopeKind::Lf, &sc, &opts)?;
    let lhv = facets_cg(PolytopeKind::Lhv, &sc, &opts)?;
    let genuine = difference(&lf, &lhv);
    let a = lf_vertex_outside_lhv()?;
    let b = ns_outside_lf()?;
    let c = pr_with_noise();
    let violated: Vec<usize> = lf
        .iter()
        .enumerate()
        .filter(|(_, h)| {
            let ineq = lift(&sc, h);
            evaluate_inequality(&ineq, &c).map(|v| v > ineq.bound).unwrap_or(false)
        })
        .map(|(i, _)| i)
        .collect();
    let chsh23_ok = [(2, 3), (3, 2)].iter().all(|&xs| {
        [(2, 3), (3, 2)].iter().all(|&ys| {
            let ineq = Inequality::<Rational>::chsh(sc, xs, ys).expect("settings in range");
            evaluate_inequality(&ineq, &c).map(|v| v.abs() <= ineq.bound).unwrap_or(false)
        })
    });
    let v = json!({
        "facet_counts": { "lhv": lhv.len(), "lf": lf.len(), "genuine_lf": genuine.len() },
        "lf_not_lhv": {
            "behavior": behavior_to_value(&a),
            "is_lf_vertex": is_vertex(&lf, &a),
            "lhv": membership_to_value(PolytopeKind::Lhv, &membership(PolytopeKind::Lhv, &a)?),
            "lf": membership_to_value(PolytopeKind::Lf, &membership(PolytopeKind::Lf, &a)?),
        },
        "ns_not_lf": {
            "behavior": behavior_to_value(&b),
            "lf": membership_to_value(PolytopeKind::Lf, &membership(PolytopeKind::Lf, &b)?),
            "ns": membership_to_value(PolytopeKind::Ns, &membership(PolytopeKind::Ns, &b)?),
        },
        "pr_with_noise": {
            "behavior": behavior_to_value(&c),
            "chsh_23_satisfied": chsh23_ok,
            "violated_lf_facets": violated,
        },
    });
    Ok((vec![Fixture { name: "polytope_3x3.json", contents: pretty(&v) }], genuine))
}

fn quantum(genuine: &[Halfspace<Rational>]) -> Result<Vec<Fixture>> {
    let chsh = chsh_2x2().map(|c| c.to_f64_lossy());
    let opt = optimize_violation(&chsh, CHSH_STEPS, CHSH_SEED)?;
    let grid = tsirelson_grid(&chsh, GRID_RESOLUTION)?;
    let chsh_fixture = json!({
        "optimizer": optimizer_value(&opt, "chsh_2x2", CHSH_SEED, CHSH_STEPS),
        "grid": { "resolution": GRID_RESOLUTION, "value": grid.value },
    });

    let (index, facet) = select_genuine_facet(genuine)?;
    let ineq = facet.map(|c| c.to_f64_lossy());
    let opt = optimize_violation(&ineq, GENUINE_STEPS, GENUINE_SEED)?;
    let grid = tsirelson_grid(&ineq, GRID_RESOLUTION)?;
    let behavior = crate::quantum::ewfs_behavior(&opt.config)?.rationalize(RATIONALIZE_DEN)?.value;
    let lf = membership(PolytopeKind::Lf, &behavior)?;
    let genuine_fixture = json!({
        "index": index,
        "inequality": inequality_to_value(&facet),
        "optimizer": optimizer_value(&opt, &format!("genuine_lf_3x3_{index}"), GENUINE_SEED, GENUINE_STEPS),
        "grid": {
            "resolution": GRID_RESOLUTION,
            "value": grid.value,
            "alice_angles": grid.alice_angles,
            "bob_angles": grid.bob_angles,
        },
        "rationalized_denominator": RATIONALIZE_DEN,
        "rationalized_behavior": behavior_to_value(&behavior),
        "lf_membership": membership_to_value(PolytopeKind::Lf, &lf),
    });
    Ok(vec![
        Fixture { name: "chsh_optimum.json", contents: pretty(&chsh_fixture) },
        Fixture { name: "genuine_lf_facet_3x3.json", contents: pretty(&genuine_fixture) },
    ])
}

fn causal() -> Result<Vec<Fixture>> {
    let g = bell_dag(2)?;
    let d = random_markov(&g, FAITHFUL_SEED)?;
    let report = faithfulness_check(&g, &d, &Rational::from_integer(0.into()))?;
    let faithful = json!({
        "seed": FAITHFUL_SEED,
        "holds": report.holds,
        "implied_observed": implied_cis(&g, true)?.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
    });
    let pr = bell_dag_scan(&Behavior::pr_box(Scenario::binary(2, 2))?, SCAN_LATENT)?;
    let q = bell_dag_scan(&quantum_chsh_behavior()?, SCAN_LATENT)?;
    Ok(vec![
        Fixture { name: "faithfulness_seed.json", contents: pretty(&faithful) },
        Fixture { name: "bell_scan_pr.csv", contents: pr.to_csv() },
        Fixture { name: "bell_scan_quantum.csv", contents: q.to_csv() },
    ])
}

fn principles() -> Result<Vec<Fixture>> {
    let g = default_graph();
    let all = vec!["Bell64".to_string(), "Bell76".into(), "LF".into()];
    let qcm = qcm_position();
    let partial = Position::new(["TemporalCausalArrow", "RelativisticCausality", "IndependentInterventions", "PCC"]);
    let v = json!({
        "closure_partial": closure(&g, &partial)?,
        "qcm_bell": consistent(&g, &qcm, &all[..2])?,
        "qcm_all": consistent(&g, &qcm, &all)?,
        "qcm_repairs_lf": minimal_repairs(&g, &qcm, &all[2..])?,
        "full_repairs_all": minimal_repairs(&g, &full_position(), &all)?,
    });
    Ok(vec![Fixture { name: "principles.json", contents: pretty(&v) }])
}

/// Recompute every fixture.
pub fn derive_all() -> Result<Vec<Fixture>> {
    let mut out = polytope_2x2()?;
    let (f3, genuine) = polytope_3x3()?;
    out.extend(f3);
    out.extend(quantum(&genuine)?);
    out.extend(causal()?);
    out.extend(principles()?);
    Ok(out)
}

/// Recompute and write every fixture into `dir`.
pub fn regenerate(dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    derive_all()?
        .into_iter()
        .map(|f| {
            let path = dir.join(f.name);
            fs::write(&path, f.contents)?;
            Ok(path)
        })
        .collect()
}
