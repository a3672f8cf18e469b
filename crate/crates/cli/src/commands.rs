use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;
use serde_json::{json, Value};

use lfgeo::causal::{
    bell_dag_scan, cmc_check, d_separated, faithfulness_check, implied_cis, CausalDag, CiStatement, Classification,
};
use lfgeo::fm::ProjectionMethod;
use lfgeo::json::{
    behavior_from_str, behavior_to_string, behavior_to_value, inequalities_to_string, inequality_from_str,
    inequality_to_value, joint_from_value, membership_to_value, pretty, rational_to_value, scenario_to_value,
};
use lfgeo::polytope::{
    enumerate_facets_with, enumerate_lhv_vertices_capped, maximize, membership, slice_2d, FacetOptions, PolytopeKind,
    DEFAULT_VERTEX_CAP,
};
use lfgeo::principles::{consistent, default_graph, minimal_repairs, PrincipleGraph, Position};
use lfgeo::quantum::{
    born_behavior, ewfs_behavior, optimize_violation, tsirelson_grid_capped, EwfsConfig, PureState, QubitMeasurement,
    DEFAULT_GRID_CAP,
};
use lfgeo::{Error, Rational, Result, Scenario};

use crate::manifest::Run;
use crate::{CausalCmd, Command, FixturesCmd, PolytopeCmd, PrinciplesCmd, QuantumCmd};

pub fn execute(cmd: Command, argv: Vec<String>) -> Result<()> {
    let mut run = Run::new(argv);
    match cmd {
        Command::Polytope(c) => polytope(&mut run, c)?,
        Command::Quantum(c) => quantum(&mut run, c)?,
        Command::Causal(c) => causal(&mut run, c)?,
        Command::Principles(c) => principles(&mut run, c)?,
        Command::Fixtures(FixturesCmd::Regen { dir }) => {
            let dir = dir.unwrap_or_else(lfgeo::fixtures::default_dir);
            let written = lfgeo::fixtures::regenerate(&dir)?;
            let names: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
            print!("{}", pretty(&json!({ "written": names })));
            run.record_output(dir);
        }
    }
    run.finish()
}

fn kind(s: &str) -> Result<PolytopeKind> {
    PolytopeKind::from_str(s)
}

fn list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect()
}

/// Integer, fraction `p/q`, or decimal (converted exactly).
fn tolerance(s: &str) -> Result<Rational> {
    if let Ok(r) = Rational::from_str(s.trim()) {
        return Ok(r);
    }
    s.trim()
        .parse::<f64>()
        .ok()
        .and_then(Rational::from_float)
        .ok_or_else(|| Error::Parse(format!("tolerance '{s}' is not a number")))
}

fn json_file(run: &mut Run, path: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&run.read(path)?)?)
}

/// `out` with `suffix` appended to the file name.
fn companion(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn polytope(run: &mut Run, cmd: PolytopeCmd) -> Result<()> {
    match cmd {
        PolytopeCmd::Vertices { kind: k, scenario, cap, out } => {
            if kind(&k)? != PolytopeKind::Lhv {
                return Err(Error::Precondition(format!("vertex enumeration is available for lhv only, got {k}")));
            }
            let sc = Scenario::parse(&scenario)?;
            let vs = enumerate_lhv_vertices_capped(&sc, cap.unwrap_or(DEFAULT_VERTEX_CAP))?;
            let v = Value::Array(vs.iter().map(behavior_to_value).collect());
            run.write(out.out.as_deref(), &pretty(&v))
        }
        PolytopeCmd::Facets { kind: k, scenario, method, cap, out } => {
            let sc = Scenario::parse(&scenario)?;
            let lf_method = match method.to_ascii_lowercase().as_str() {
                "hull" => ProjectionMethod::VertexHull,
                "fm" => ProjectionMethod::FourierMotzkin,
                _ => return Err(Error::UnknownName(format!("projection method '{method}' (expected hull or fm)"))),
            };
            let mut opts = FacetOptions { lf_method, ..FacetOptions::default() };
            if let Some(c) = cap {
                opts.fm.max_rows = c;
            }
            let facets = enumerate_facets_with(kind(&k)?, &sc, &opts)?;
            run.write(out.out.as_deref(), &inequalities_to_string(&facets))
        }
        PolytopeCmd::Member { kind: k, behavior, out } => {
            let k = kind(&k)?;
            let b = behavior_from_str::<Rational>(&run.read(&behavior)?)?;
            let r = membership(k, &b)?;
            run.write(out.out.as_deref(), &pretty(&membership_to_value(k, &r)))
        }
        PolytopeCmd::Max { kind: k, ineq, out } => {
            let k = kind(&k)?;
            let ineq = inequality_from_str::<Rational>(&run.read(&ineq)?)?;
            let (value, arg) = maximize(k, &ineq.scenario, &ineq.coeffs)?;
            let v = json!({
                "kind": k.name(),
                "value": rational_to_value(&value),
                "bound": rational_to_value(&ineq.bound),
                "sense": ineq.sense.symbol(),
                "holds": ineq.holds_for(&value),
                "maximizer": behavior_to_value(&arg),
            });
            run.write(out.out.as_deref(), &pretty(&v))
        }
        PolytopeCmd::Slice { kinds, f1, f2, resolution, out } => {
            let kinds = list(&kinds).iter().map(|s| kind(s)).collect::<Result<Vec<_>>>()?;
            let f1 = inequality_from_str::<Rational>(&run.read(&f1)?)?;
            let f2 = inequality_from_str::<Rational>(&run.read(&f2)?)?;
            let s = slice_2d(&kinds, &f1, &f2, resolution)?;
            run.write(out.out.as_deref(), &s.to_csv())?;
            if let Some(path) = out.out.as_deref() {
                let pair = |(u, v): &(Rational, Rational)| json!([rational_to_value(u), rational_to_value(v)]);
                let v = json!({
                    "scenario": scenario_to_value(&s.scenario),
                    "f1": s.f1.iter().map(rational_to_value).collect::<Vec<_>>(),
                    "f2": s.f2.iter().map(rational_to_value).collect::<Vec<_>>(),
                    "directions": s.directions.iter().map(pair).collect::<Vec<_>>(),
                    "polygons": s.polygons.iter().map(|p| json!({
                        "kind": p.kind.name(),
                        "points": p.points.iter().map(pair).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                    "convex": s.is_convex(),
                });
                run.write(Some(&companion(path, ".json")), &pretty(&v))?;
            }
            Ok(())
        }
    }
}

#[derive(Deserialize)]
struct BornConfig {
    state: PureState,
    alice: Vec<QubitMeasurement>,
    bob: Vec<QubitMeasurement>,
}

fn quantum(run: &mut Run, cmd: QuantumCmd) -> Result<()> {
    match cmd {
        QuantumCmd::Born { config, out } => {
            let c: BornConfig = serde_json::from_str(&run.read(&config)?)?;
            let b = born_behavior(&c.state, &c.alice, &c.bob)?;
            run.write(out.out.as_deref(), &behavior_to_string(&b))
        }
        QuantumCmd::Ewfs { config, out } => {
            let c: EwfsConfig = serde_json::from_str(&run.read(&config)?)?;
            run.write(out.out.as_deref(), &behavior_to_string(&ewfs_behavior(&c)?))
        }
        QuantumCmd::Optimize { ineq, steps, seed, out } => {
            run.seed = Some(seed);
            let text = run.read(&ineq)?;
            let id = run.last_digest().unwrap_or_default().to_string();
            let ineq = inequality_from_str::<f64>(&text)?;
            let r = optimize_violation(&ineq, steps, seed)?;
            let v = json!({
                "value": r.value,
                "bound": ineq.bound,
                "violation": r.value - ineq.bound,
                "config": r.config,
                "ineq_id": id,
                "seed": seed,
                "steps": steps,
                "history": r.history,
            });
            run.write(out.out.as_deref(), &pretty(&v))
        }
        QuantumCmd::Grid { ineq, resolution, cap, out } => {
            let ineq = inequality_from_str::<f64>(&run.read(&ineq)?)?;
            let g = tsirelson_grid_capped(&ineq, resolution, cap.unwrap_or(DEFAULT_GRID_CAP))?;
            let v = json!({
                "value": g.value,
                "bound": ineq.bound,
                "resolution": g.resolution,
                "alice_angles": g.alice_angles,
                "bob_angles": g.bob_angles,
                "config": g.to_config(),
            });
            run.write(out.out.as_deref(), &pretty(&v))
        }
    }
}

fn causal(run: &mut Run, cmd: CausalCmd) -> Result<()> {
    match cmd {
        CausalCmd::Dsep { dag, a, b, z, all, observed, out } => {
            let g = CausalDag::from_json(&run.read(&dag)?)?;
            let v = if all {
                let cis = implied_cis(&g, observed)?;
                json!({ "implied": cis.iter().map(|s| s.to_string()).collect::<Vec<_>>() })
            } else {
                let stmt = CiStatement { a: list(&a), b: list(&b), z: list(&z) };
                json!({ "statement": stmt.to_string(), "d_separated": d_separated(&g, &stmt)? })
            };
            run.write(out.out.as_deref(), &pretty(&v))
        }
        CausalCmd::Cmc { dag, dist, tol, out } => {
            let g = CausalDag::from_json(&run.read(&dag)?)?;
            let d = joint_from_value::<Rational>(&json_file(run, &dist)?)?;
            let r = cmc_check(&g, &d, &tolerance(&tol)?)?;
            let v = json!({
                "passes": r.passes,
                "nodes": r.nodes.iter().map(|n| json!({
                    "name": n.name,
                    "residual": rational_to_value(&n.residual),
                    "passes": n.passes,
                })).collect::<Vec<_>>(),
            });
            run.write(out.out.as_deref(), &pretty(&v))
        }
        CausalCmd::Faithful { dag, dist, tol, out } => {
            let g = CausalDag::from_json(&run.read(&dag)?)?;
            let d = joint_from_value::<Rational>(&json_file(run, &dist)?)?;
            let r = faithfulness_check(&g, &d, &tolerance(&tol)?)?;
            let text = |v: &[CiStatement]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
            let v = json!({ "holds": r.holds, "extra_cis": text(&r.extra_cis), "missing_cis": text(&r.missing_cis) });
            run.write(out.out.as_deref(), &pretty(&v))
        }
        CausalCmd::ScanBell { behavior, latent, out } => {
            let b = behavior_from_str::<Rational>(&run.read(&behavior)?)?;
            let r = bell_dag_scan(&b, latent)?;
            run.write(out.out.as_deref(), &r.to_csv())?;
            if let Some(path) = out.out.as_deref() {
                let count = |c: Classification| r.count(c);
                let v = json!({
                    "latent_cardinality": r.latent_cardinality,
                    "dags": r.rows.len(),
                    "counts": {
                        "cannot_reproduce": count(Classification::CannotReproduce),
                        "fine_tuned": count(Classification::FineTuned),
                        "faithful_reproducing": count(Classification::FaithfulReproducing),
                    },
                    "dichotomy_holds": r.dichotomy_holds(),
                    "lhv_certificate": inequality_to_value(&r.lhv_certificate),
                });
                run.write(Some(&companion(path, ".json")), &pretty(&v))?;
            }
            Ok(())
        }
    }
}

fn graph(run: &mut Run, path: Option<&Path>) -> Result<PrincipleGraph> {
    match path {
        Some(p) => PrincipleGraph::from_json(&run.read(p)?),
        None => Ok(default_graph()),
    }
}

/// `{"held": [...]}` or a bare array of names.
fn position(run: &mut Run, path: &Path) -> Result<Position> {
    match json_file(run, path)? {
        Value::Array(items) => {
            let names = items
                .into_iter()
                .map(|v| v.as_str().map(String::from).ok_or_else(|| Error::Parse(format!("principle name must be a string, got {v}"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(Position::new(names))
        }
        v => Ok(serde_json::from_value(v)?),
    }
}

/// Falsified theorem names, canonicalized against the graph.
fn falsified(g: &PrincipleGraph, s: &str) -> Result<Vec<String>> {
    list(s).iter().map(|n| Ok(g.theorem(n)?.name.clone())).collect()
}

fn principles(run: &mut Run, cmd: PrinciplesCmd) -> Result<()> {
    match cmd {
        PrinciplesCmd::Show { graph: gp, out } => {
            let g = graph(run, gp.as_deref())?;
            run.write(out.out.as_deref(), &pretty(&serde_json::to_value(&g)?))
        }
        PrinciplesCmd::Check { position: pp, falsified: f, graph: gp, out } => {
            let g = graph(run, gp.as_deref())?;
            let pos = position(run, &pp)?;
            let f = falsified(&g, &f)?;
            let c = consistent(&g, &pos, &f)?;
            run.write(out.out.as_deref(), &pretty(&serde_json::to_value(&c)?))
        }
        PrinciplesCmd::Repair { position: pp, falsified: f, graph: gp, out } => {
            let g = graph(run, gp.as_deref())?;
            let pos = position(run, &pp)?;
            let f = falsified(&g, &f)?;
            let repairs = minimal_repairs(&g, &pos, &f)?;
            let theorems: Vec<_> = g.theorems.iter().filter(|t| f.contains(&t.name)).collect();
            let v = json!({ "repairs": repairs, "rules": g.rules, "theorems": theorems });
            run.write(out.out.as_deref(), &pretty(&v))
        }
    }
}
