use std::fs;

use num_traits::{One, Zero};
use serde_json::Value;

use lfgeo::behavior::{deterministic_behavior, evaluate_inequality, DeterministicStrategy};
use lfgeo::fixtures::{default_dir, derive_all, is_vertex, pr_with_noise};
use lfgeo::json::{behavior_from_value, inequalities_from_str, membership_from_value, rational_from_value};
use lfgeo::polytope::facets::{facets_cg, lift, FacetOptions};
use lfgeo::polytope::{maximize, verify_certificate, Certificate, PolytopeKind};
use lfgeo::{Behavior, Inequality, Rational, Scenario};

fn read(name: &str) -> String {
    fs::read_to_string(default_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn read_json(name: &str) -> Value {
    serde_json::from_str(&read(name)).unwrap()
}

/// Maximum over deterministic strategies, by enumeration.
fn vertex_max(ineq: &Inequality<Rational>) -> Rational {
    DeterministicStrategy::all(&ineq.scenario)
        .map(|s| evaluate_inequality(ineq, &deterministic_behavior(&s, &ineq.scenario).unwrap()).unwrap())
        .max()
        .unwrap()
}

#[test]
fn committed_fixtures_match_regeneration() {
    for f in derive_all().unwrap() {
        assert_eq!(read(f.name), f.contents, "fixture {} is stale; run `lfgeo fixtures regen`", f.name);
    }
}

#[test]
fn lhv_2x2_facets_are_valid_and_tight() {
    let sc = Scenario::binary(2, 2);
    let facets = inequalities_from_str::<Rational>(&read("lhv_facets_2x2.json")).unwrap();
    assert_eq!(facets.len(), 24);
    let vertices: Vec<Behavior<Rational>> =
        DeterministicStrategy::all(&sc).map(|s| deterministic_behavior(&s, &sc).unwrap()).collect();
    let cg = lfgeo::cg::CgMap::new(sc);
    let mut positivity = 0;
    for f in &facets {
        let values: Vec<Rational> = vertices.iter().map(|v| evaluate_inequality(f, v).unwrap()).collect();
        assert!(values.iter().all(|v| v <= &f.bound));
        // tight vertices span a hyperplane: dim affinely independent points
        let tight: Vec<Vec<Rational>> = vertices
            .iter()
            .zip(&values)
            .filter(|(_, v)| **v == f.bound)
            .map(|(p, _)| {
                let mut z = cg.coordinates(p);
                z.push(Rational::one());
                z
            })
            .collect();
        assert_eq!(lfgeo::dd::independent_rows(&tight).len(), cg.dim());
        if maximize(PolytopeKind::Ns, &sc, &f.coeffs).unwrap().0 == f.bound {
            positivity += 1;
        }
    }
    assert_eq!(positivity, 16);
}

#[test]
fn chsh_maxima_2x2() {
    let v = read_json("polytope_2x2.json");
    let max = |k: &str| rational_from_value(&v["chsh_max"][k]).unwrap();
    assert_eq!(max("lhv"), Rational::from_integer(2.into()));
    assert_eq!(max("lf"), Rational::from_integer(2.into()));
    assert_eq!(max("ns"), Rational::from_integer(4.into()));
    assert_eq!(v["lf_equals_lhv"], Value::Bool(true));
}

#[test]
fn three_by_three_witnesses_verify_independently() {
    let v = read_json("polytope_3x3.json");
    let sc = Scenario::binary(3, 3);
    let opts = FacetOptions::default();
    let lf_facets = facets_cg(PolytopeKind::Lf, &sc, &opts).unwrap();

    let a: Behavior<Rational> = behavior_from_value(&v["lf_not_lhv"]["behavior"]).unwrap();
    let (_, lf) = membership_from_value(&v["lf_not_lhv"]["lf"]).unwrap();
    assert!(lf.inside && verify_certificate(PolytopeKind::Lf, &a, &lf).unwrap());
    let (_, lhv) = membership_from_value(&v["lf_not_lhv"]["lhv"]).unwrap();
    match &lhv.certificate {
        Certificate::Separating(ineq) => {
            assert!(!lhv.inside);
            assert_eq!(&vertex_max(ineq), &ineq.bound);
            assert!(evaluate_inequality(ineq, &a).unwrap() > ineq.bound);
        }
        c => panic!("expected separating certificate, got {c:?}"),
    }
    assert!(is_vertex(&lf_facets, &a));

    let b: Behavior<Rational> = behavior_from_value(&v["ns_not_lf"]["behavior"]).unwrap();
    assert!(lfgeo::validate_behavior(&b, &Rational::zero()).all_ok());
    let violated = lf_facets.iter().any(|h| {
        let ineq = lift(&sc, h);
        evaluate_inequality(&ineq, &b).unwrap() > ineq.bound
    });
    assert!(violated, "NS witness must violate an enumerated LF facet");

    let c = pr_with_noise();
    assert!(v["pr_with_noise"]["chsh_23_satisfied"].as_bool().unwrap());
    assert!(!v["pr_with_noise"]["violated_lf_facets"].as_array().unwrap().is_empty());
    let pr12 = Inequality::<Rational>::chsh(sc, (1, 2), (1, 2)).unwrap();
    assert_eq!(evaluate_inequality(&pr12, &c).unwrap(), Rational::from_integer(4.into()));
}

#[test]
fn chsh_optimum_fixture() {
    let v = read_json("chsh_optimum.json");
    let target = 2.0 * 2f64.sqrt();
    assert!(v["optimizer"]["value"].as_f64().unwrap() >= target - 1e-3);
    assert!((v["grid"]["value"].as_f64().unwrap() - target).abs() < 2e-3);
}

#[test]
fn principles_fixture_repairs_touch_grey_set() {
    let v = read_json("principles.json");
    let grey = ["AOE", "SpaceTime", "TemporalCausalArrow", "RelativisticCausality", "IndependentInterventions", "PCC"];
    for r in v["full_repairs_all"].as_array().unwrap() {
        assert!(r.as_array().unwrap().iter().any(|n| grey.contains(&n.as_str().unwrap())), "{r}");
    }
    let singles: Vec<&str> =
        v["qcm_repairs_lf"].as_array().unwrap().iter().map(|r| r[0].as_str().unwrap()).collect();
    for name in ["AOE", "RelativisticCausality", "TemporalCausalArrow", "IndependentInterventions", "PCC", "SpaceTime"] {
        assert!(singles.contains(&name));
    }
    assert!(!singles.contains(&"DecorrelatingExplanation"));
}

#[test]
fn bell_scans_have_no_faithful_rows() {
    for name in ["bell_scan_pr.csv", "bell_scan_quantum.csv"] {
        let text = read(name);
        let rows: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(rows.len(), 192);
        assert!(rows.iter().all(|r| r.ends_with(",cannot_reproduce") || r.ends_with(",fine_tuned")));
    }
}
