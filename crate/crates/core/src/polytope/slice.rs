//! Two-dimensional linear images of the polytopes.

use rayon::prelude::*;

use super::{maximize, PolytopeKind};
use crate::behavior::{Inequality, Scenario};
use crate::cg::CgMap;
use crate::dd::independent_rows;
use crate::error::{Error, Result};
use crate::scalar::{decimal_string, rationalize, Rational};

/// Denominator used to round the direction `(cos t, sin t)`.
pub const DIRECTION_DENOMINATOR: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SlicePolygon {
    pub kind: PolytopeKind,
    /// One support point per direction, in direction order.
    pub points: Vec<(Rational, Rational)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SliceData {
    pub scenario: Scenario,
    pub f1: Vec<Rational>,
    pub f2: Vec<Rational>,
    pub directions: Vec<(Rational, Rational)>,
    pub polygons: Vec<SlicePolygon>,
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn directions(resolution: usize) -> Vec<(Rational, Rational)> {
    (0..resolution)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / resolution as f64;
            (rationalize(t.cos(), DIRECTION_DENOMINATOR), rationalize(t.sin(), DIRECTION_DENOMINATOR))
        })
        .collect()
}

pub fn slice_2d(
    kinds: &[PolytopeKind],
    f1: &Inequality<Rational>,
    f2: &Inequality<Rational>,
    resolution: usize,
) -> Result<SliceData> {
    let sc = f1.scenario;
    if f2.scenario != sc {
        return Err(Error::ScenarioMismatch(format!("slice functionals on {} and {}", sc, f2.scenario)));
    }
    if resolution == 0 {
        return Err(Error::OutOfRange("slice resolution must be positive".into()));
    }
    let map = CgMap::new(sc);
    let (g1, _) = map.functional_to_cg(&f1.coeffs);
    let (g2, _) = map.functional_to_cg(&f2.coeffs);
    if independent_rows(&[g1, g2]).len() < 2 {
        return Err(Error::Degenerate("slice functionals are linearly dependent on behavior space".into()));
    }
    let dirs = directions(resolution);
    let mut polygons = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        kind.check_scenario(&sc)?;
        let points = dirs
            .par_iter()
            .map(|(c, s)| {
                let w: Vec<Rational> = f1.coeffs.iter().zip(&f2.coeffs).map(|(a, b)| c * a + s * b).collect();
                let (_, p) = maximize(kind, &sc, &w)?;
                Ok((dot(&f1.coeffs, p.table()), dot(&f2.coeffs, p.table())))
            })
            .collect::<Result<Vec<_>>>()?;
        polygons.push(SlicePolygon { kind, points });
    }
    Ok(SliceData { scenario: sc, f1: f1.coeffs.clone(), f2: f2.coeffs.clone(), directions: dirs, polygons })
}

impl SliceData {
    /// Support value of polygon `k` in direction `i`.
    pub fn support(&self, k: usize, i: usize) -> Rational {
        let (c, s) = &self.directions[i];
        let (u, v) = &self.polygons[k].points[i];
        c * u + s * v
    }

    /// Each point maximizes its own direction among the polygon's points.
    pub fn is_convex(&self) -> bool {
        self.polygons.iter().enumerate().all(|(k, poly)| {
            (0..self.directions.len()).all(|i| {
                let (c, s) = &self.directions[i];
                let h = self.support(k, i);
                poly.points.iter().all(|(u, v)| c * u + s * v <= h)
            })
        })
    }

    /// Support values of `inner` never exceed those of `outer`.
    pub fn nested(&self, inner: usize, outer: usize) -> bool {
        (0..self.directions.len()).all(|i| self.support(inner, i) <= self.support(outer, i))
    }

    /// Columns `kind,theta_index,f1,f2`, values as decimals.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,theta_index,f1,f2\n");
        for poly in &self.polygons {
            for (i, (u, v)) in poly.points.iter().enumerate() {
                s.push_str(&format!("{},{},{},{}\n", poly.kind, i, decimal_string(u, 9), decimal_string(v, 9)));
            }
        }
        s
    }
}
