//! Facet enumeration in canonical integer form.
//!
//! Facets are computed in Collins-Gisin coordinates, where all three
//! polytopes are full-dimensional, scaled to primitive integers (gcd 1
//! over normal and bound together), and lifted back to a full-table
//! functional with marginal terms on the other party's setting 1. Lists
//! are sorted lexicographically by `(normal, bound)`.

use num_traits::{Signed, Zero};

use super::{enumerate_lhv_vertices, ExtensionLayout, PolytopeKind};
use crate::behavior::{Inequality, Scenario, Sense};
use crate::cg::CgMap;
use crate::dd;
use crate::error::{Error, Result};
use crate::fm::{remove_redundant, FmOptions, Halfspace, ProjectionMethod};
use crate::scalar::{Field, Rational};

#[derive(Clone, Copy, Debug)]
pub struct FacetOptions {
    pub max_settings: usize,
    pub require_binary: bool,
    /// How the LF extension is projected onto behavior space.
    pub lf_method: ProjectionMethod,
    pub fm: FmOptions,
}

impl Default for FacetOptions {
    fn default() -> Self {
        FacetOptions {
            max_settings: 3,
            require_binary: true,
            lf_method: ProjectionMethod::VertexHull,
            fm: FmOptions::default(),
        }
    }
}

fn canonical(h: Halfspace<Rational>) -> Halfspace<Rational> {
    let mut v = h.normal;
    v.push(h.offset);
    Rational::normalize_direction(&mut v);
    let offset = v.pop().expect("nonempty");
    Halfspace { normal: v, offset }
}

fn check_caps(sc: &Scenario, opts: &FacetOptions) -> Result<()> {
    let most = sc.x_count.max(sc.y_count);
    if most > opts.max_settings {
        return Err(Error::CapExceeded {
            what: format!("settings per party for facet enumeration on {sc}"),
            needed: most as u128,
            cap: opts.max_settings as u128,
        });
    }
    if opts.require_binary && !sc.is_binary() {
        return Err(Error::CapExceeded {
            what: format!("outcomes per setting for facet enumeration on {sc}"),
            needed: sc.a_count.max(sc.b_count) as u128,
            cap: 2,
        });
    }
    Ok(())
}

/// Canonical facets as halfspaces `normal . cg(p) <= offset`.
pub fn facets_cg(kind: PolytopeKind, sc: &Scenario, opts: &FacetOptions) -> Result<Vec<Halfspace<Rational>>> {
    kind.check_scenario(sc)?;
    check_caps(sc, opts)?;
    let map = CgMap::new(*sc);
    let raw: Vec<Halfspace<Rational>> = match kind {
        PolytopeKind::Lhv => {
            let pts: Vec<Vec<Rational>> = enumerate_lhv_vertices(sc)?.iter().map(|v| map.coordinates(v)).collect();
            dd::hull_facets(&pts)?.into_iter().map(|(normal, offset)| Halfspace { normal, offset }).collect()
        }
        PolytopeKind::Lf => ExtensionLayout::new(*sc)?.affine_system::<Rational>().project(opts.lf_method, opts.fm)?,
        PolytopeKind::Ns => {
            // p(a,b|x,y) = g . z + k >= 0
            let mut rows: Vec<Vec<Rational>> = Vec::new();
            for (a, b, x, y) in sc.entries() {
                let (mut g, k) = map.entry::<Rational>(a, b, x, y);
                g.push(k);
                Rational::normalize_direction(&mut g);
                if !rows.contains(&g) {
                    rows.push(g);
                }
            }
            let cols: Vec<usize> = (0..map.dim()).collect();
            remove_redundant(rows, &cols)?
                .into_iter()
                .map(|mut r| {
                    let k = r.pop().expect("constant");
                    Halfspace { normal: r.into_iter().map(|v| -v).collect(), offset: k }
                })
                .collect()
        }
    };
    let mut out: Vec<Halfspace<Rational>> = raw.into_iter().map(canonical).collect();
    out.sort_by(|a, b| a.normal.cmp(&b.normal).then_with(|| a.offset.cmp(&b.offset)));
    out.dedup();
    Ok(out)
}

/// Lift a coordinate-space halfspace to a full-table inequality.
pub fn lift(sc: &Scenario, h: &Halfspace<Rational>) -> Inequality<Rational> {
    let coeffs = CgMap::new(*sc).functional_from_cg(&h.normal);
    Inequality::new(*sc, coeffs, h.offset.clone(), Sense::Le).expect("lifted functional matches scenario")
}

/// Restrict a `<=` inequality to coordinate space in canonical form.
pub fn restrict(ineq: &Inequality<Rational>) -> Halfspace<Rational> {
    let le = ineq.to_le();
    let (g, k) = CgMap::new(ineq.scenario).functional_to_cg(&le.coeffs);
    canonical(Halfspace { normal: g, offset: le.bound - k })
}

pub fn enumerate_facets(kind: PolytopeKind, sc: &Scenario) -> Result<Vec<Inequality<Rational>>> {
    enumerate_facets_with(kind, sc, &FacetOptions::default())
}

pub fn enumerate_facets_with(kind: PolytopeKind, sc: &Scenario, opts: &FacetOptions) -> Result<Vec<Inequality<Rational>>> {
    Ok(facets_cg(kind, sc, opts)?.iter().map(|h| lift(sc, h)).collect())
}

/// Is `h` the canonical form of some positivity constraint?
pub fn is_positivity(sc: &Scenario, h: &Halfspace<Rational>) -> Result<bool> {
    let opts = FacetOptions { require_binary: false, max_settings: usize::MAX, ..FacetOptions::default() };
    let ns = facets_cg(PolytopeKind::Ns, sc, &opts)?;
    Ok(ns.contains(h))
}

/// Facets of `outer` that are not facets of `inner`.
pub fn difference(outer: &[Halfspace<Rational>], inner: &[Halfspace<Rational>]) -> Vec<Halfspace<Rational>> {
    outer.iter().filter(|h| !inner.contains(h)).cloned().collect()
}

/// Sum of coefficient magnitudes; used to order candidate facets.
pub fn weight(h: &Halfspace<Rational>) -> Rational {
    h.normal.iter().fold(Rational::zero(), |s, v| s + v.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{evaluate_inequality, Behavior};
    use crate::polytope::max_over_polytope;
    use crate::scalar::int;

    #[test]
    fn lhv_2x2_has_24_facets() {
        let sc = Scenario::binary(2, 2);
        let f = facets_cg(PolytopeKind::Lhv, &sc, &FacetOptions::default()).unwrap();
        assert_eq!(f.len(), 24);
        let pos = f.iter().filter(|h| is_positivity(&sc, h).unwrap()).count();
        assert_eq!(pos, 16);
    }

    #[test]
    fn ns_2x2_has_16_facets() {
        let sc = Scenario::binary(2, 2);
        assert_eq!(enumerate_facets(PolytopeKind::Ns, &sc).unwrap().len(), 16);
    }

    #[test]
    fn lf_2x2_methods_agree_and_equal_lhv() {
        let sc = Scenario::binary(2, 2);
        let hull = facets_cg(PolytopeKind::Lf, &sc, &FacetOptions::default()).unwrap();
        let fm = facets_cg(
            PolytopeKind::Lf,
            &sc,
            &FacetOptions { lf_method: ProjectionMethod::FourierMotzkin, ..FacetOptions::default() },
        )
        .unwrap();
        assert_eq!(hull, fm);
        assert_eq!(hull, facets_cg(PolytopeKind::Lhv, &sc, &FacetOptions::default()).unwrap());
    }

    #[test]
    fn facets_are_tight() {
        let sc = Scenario::binary(2, 2);
        for ineq in enumerate_facets(PolytopeKind::Lhv, &sc).unwrap() {
            assert_eq!(max_over_polytope(PolytopeKind::Lhv, &ineq).unwrap(), ineq.bound);
            assert!(ineq.coeffs.iter().all(|c| c.is_integer()));
            assert!(ineq.bound.is_integer());
        }
    }

    #[test]
    fn restrict_inverts_lift() {
        let sc = Scenario::binary(2, 2);
        let chsh = Inequality::<Rational>::chsh(sc, (1, 2), (1, 2)).unwrap();
        let h = restrict(&chsh);
        let back = lift(&sc, &h);
        let pr = Behavior::<Rational>::pr_box(sc).unwrap();
        let v1 = evaluate_inequality(&chsh, &pr).unwrap() - chsh.bound.clone();
        let v2 = evaluate_inequality(&back, &pr).unwrap() - back.bound.clone();
        assert!(v1 > int(0) && v2 > int(0));
        assert_eq!(restrict(&back), h);
    }

    #[test]
    fn caps_enforced() {
        let err = facets_cg(PolytopeKind::Lhv, &Scenario::binary(4, 2), &FacetOptions::default()).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }
}
