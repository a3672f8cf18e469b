//! Double description method: extreme rays of a pointed polyhedral cone
//! `{ r : A r >= 0 }`.
//!
//! The same routine serves both directions of the vertex/facet duality.
//! Facets of `conv(V)` are the extreme rays of
//! `{ (beta, -g) : beta - g.v >= 0 for v in V }`, and vertices of `{ z : A z + k >= 0 }` are the
//! extreme rays of the homogenised cone with a positive first coordinate.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Field;

#[derive(Clone, Debug)]
struct Ray<T> {
    v: Vec<T>,
    zeros: Vec<u64>,
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn popcount_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

fn contains_all(sup: &[u64], sub: &[u64]) -> bool {
    sup.iter().zip(sub).all(|(s, t)| t & !s == 0)
}

fn dot<T: Field>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |s, (x, y)| if x.is_zero() || y.is_zero() { s } else { s + x.clone() * y.clone() })
}

/// Indices of a maximal linearly independent subset of `rows`, chosen
/// greedily in order.
pub fn independent_rows<T: Field>(rows: &[Vec<T>]) -> Vec<usize> {
    let n = rows.first().map_or(0, |r| r.len());
    let mut basis: Vec<(usize, Vec<T>)> = Vec::new(); // (pivot col, reduced row)
    let mut picked = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut r = row.clone();
        for (pc, br) in &basis {
            if r[*pc].is_zero() {
                continue;
            }
            let f = r[*pc].clone() / br[*pc].clone();
            for j in 0..n {
                if !br[j].is_zero() {
                    r[j] = r[j].clone() - f.clone() * br[j].clone();
                }
            }
            if !T::EXACT {
                r[*pc] = T::zero();
            }
        }
        if let Some(pc) = (0..n).find(|&j| !r[j].is_negligible()) {
            basis.push((pc, r));
            picked.push(i);
            if picked.len() == n {
                break;
            }
        }
    }
    picked
}

/// Inverse of a square matrix by Gauss-Jordan elimination.
fn invert<T: Field>(m: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let n = m.len();
    let mut a: Vec<Vec<T>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { T::one() } else { T::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .filter(|&p| !a[p][c].is_negligible())
            .ok_or_else(|| Error::Degenerate("singular basis in double description".into()))?;
        a.swap(c, p);
        let piv = a[c][c].clone();
        for v in a[c].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let t = a[c][j].clone();
                    if !t.is_zero() {
                        a[i][j] = a[i][j].clone() - f.clone() * t;
                    }
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Extreme rays of `{ r : row . r >= 0 for every row }`, each rescaled by
/// [`Field::normalize_direction`]. The cone must be pointed (rows of full
/// column rank). Output order is deterministic.
pub fn extreme_rays<T: Field>(rows: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let m = rows.len();
    let n = rows.first().map(|r| r.len()).ok_or_else(|| Error::Degenerate("empty constraint matrix".into()))?;
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("ragged constraint matrix".into()));
    }
    let init = independent_rows(rows);
    if init.len() < n {
        return Err(Error::Degenerate(format!("cone is not pointed: rank {} < {}", init.len(), n)));
    }
    let words = m.div_ceil(64);
    let basis: Vec<Vec<T>> = init.iter().map(|&i| rows[i].clone()).collect();
    let inv = invert(&basis)?;
    let mut rays: Vec<Ray<T>> = (0..n)
        .map(|j| {
            let mut v: Vec<T> = (0..n).map(|i| inv[i][j].clone()).collect();
            T::normalize_direction(&mut v);
            let mut zeros = vec![0u64; words];
            for (k, &ri) in init.iter().enumerate() {
                if k != j {
                    bit_set(&mut zeros, ri);
                }
            }
            Ray { v, zeros }
        })
        .collect();

    let mut in_init = vec![false; m];
    for &i in &init {
        in_init[i] = true;
    }
    for (ri, row) in rows.iter().enumerate() {
        if in_init[ri] {
            continue;
        }
        let vals: Vec<T> = rays.par_iter().map(|r| dot(row, &r.v)).collect();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut zero = Vec::new();
        for (k, s) in vals.iter().enumerate() {
            if s.is_strictly_positive() {
                pos.push(k);
            } else if s.is_strictly_negative() {
                neg.push(k);
            } else {
                zero.push(k);
            }
        }
        if neg.is_empty() {
            for &k in &zero {
                bit_set(&mut rays[k].zeros, ri);
            }
            continue;
        }
        let need = (n as u32).saturating_sub(2);
        let snapshot = &rays;
        let vals = &vals;
        let neg = &neg;
        let created: Vec<Ray<T>> = pos
            .par_iter()
            .flat_map_iter(|&p| {
                neg.iter().filter_map(move |&q| {
                    let (rp, rq) = (&snapshot[p], &snapshot[q]);
                    if popcount_and(&rp.zeros, &rq.zeros) < need {
                        return None;
                    }
                    let common: Vec<u64> = rp.zeros.iter().zip(&rq.zeros).map(|(a, b)| a & b).collect();
                    let blocked = snapshot
                        .iter()
                        .enumerate()
                        .any(|(k, r)| k != p && k != q && contains_all(&r.zeros, &common));
                    if blocked {
                        return None;
                    }
                    let (sp, sq) = (&vals[p], &vals[q]);
                    let mut v: Vec<T> = rp
                        .v
                        .iter()
                        .zip(&rq.v)
                        .map(|(a, b)| sp.clone() * b.clone() - sq.clone() * a.clone())
                        .collect();
                    T::normalize_direction(&mut v);
                    let mut zeros = common;
                    bit_set(&mut zeros, ri);
                    Some(Ray { v, zeros })
                })
            })
            .collect();
        let mut next: Vec<Ray<T>> = Vec::with_capacity(pos.len() + zero.len() + created.len());
        let mut keep = vec![false; rays.len()];
        for &k in pos.iter().chain(&zero) {
            keep[k] = true;
        }
        for &k in &zero {
            bit_set(&mut rays[k].zeros, ri);
        }
        for (k, r) in rays.into_iter().enumerate() {
            if keep[k] {
                next.push(r);
            }
        }
        next.extend(created);
        rays = next;
    }
    Ok(rays.into_iter().map(|r| r.v).collect())
}

/// Facets of the convex hull of `points`, as rows `(beta, g)` meaning
/// `g . z <= beta`. The points must affinely span their ambient space.
pub fn hull_facets<T: Field>(points: &[Vec<T>]) -> Result<Vec<(Vec<T>, T)>> {
    let rows: Vec<Vec<T>> = points
        .iter()
        .map(|p| {
            let mut r = Vec::with_capacity(p.len() + 1);
            r.push(T::one());
            r.extend(p.iter().cloned());
            r
        })
        .collect();
    let rays = extreme_rays(&rows).map_err(|e| match e {
        Error::Degenerate(_) => Error::Degenerate("points are not full-dimensional".into()),
        other => other,
    })?;
    Ok(rays
        .into_iter()
        .map(|r| {
            let beta = r[0].clone();
            let g = r[1..].iter().map(|v| -v.clone()).collect();
            (g, beta)
        })
        .collect())
}

/// Vertices of the bounded polyhedron `{ z : a . z + k >= 0 }` given rows
/// `(a, k)`.
pub fn polytope_vertices<T: Field>(ineqs: &[(Vec<T>, T)]) -> Result<Vec<Vec<T>>> {
    let d = ineqs.first().map(|r| r.0.len()).ok_or_else(|| Error::Degenerate("no inequalities".into()))?;
    let mut rows: Vec<Vec<T>> = ineqs
        .iter()
        .map(|(a, k)| {
            let mut r = Vec::with_capacity(d + 1);
            r.push(k.clone());
            r.extend(a.iter().cloned());
            r
        })
        .collect();
    let mut t = vec![T::zero(); d + 1];
    t[0] = T::one();
    rows.push(t);
    let rays = extreme_rays(&rows)?;
    let mut out = Vec::new();
    for r in rays {
        if !r[0].is_strictly_positive() {
            return Err(Error::Degenerate("polyhedron is unbounded".into()));
        }
        let s = r[0].clone();
        out.push(r[1..].iter().map(|v| v.clone() / s.clone()).collect());
    }
    Ok(out)
}
