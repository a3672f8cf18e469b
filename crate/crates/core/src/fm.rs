//! Polyhedral projection.
//!
//! [`AffineSystem`] describes a polytope over `(eliminated, kept)`
//! variables by affine equalities and inequalities. Its projection onto
//! the kept variables is computed either by Fourier-Motzkin elimination
//! with LP redundancy pruning after each round, or by enumerating the
//! lifted polytope's vertices and taking the convex hull of their images.

use rayon::prelude::*;

use crate::dd;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::scalar::Field;

/// `normal . z <= offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace<T> {
    pub normal: Vec<T>,
    pub offset: T,
}

#[derive(Clone, Copy, Debug)]
pub struct FmOptions {
    /// Abort when a round produces more candidate rows than this.
    pub max_rows: usize,
}

impl Default for FmOptions {
    fn default() -> Self {
        FmOptions { max_rows: 20_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionMethod {
    FourierMotzkin,
    VertexHull,
}

/// Rows are affine forms over `(z, 1)`: the last entry is the constant.
#[derive(Clone, Debug)]
pub struct AffineSystem<T> {
    pub n_elim: usize,
    pub n_keep: usize,
    /// `row . (z, 1) = 0`
    pub equalities: Vec<Vec<T>>,
    /// `row . (z, 1) >= 0`
    pub inequalities: Vec<Vec<T>>,
}

/// The system after substituting the equalities: inequalities over
/// `(free eliminated vars, kept vars, 1)`.
#[derive(Clone, Debug)]
pub struct Reduced<T> {
    pub n_free: usize,
    pub n_keep: usize,
    pub rows: Vec<Vec<T>>,
}

impl<T: Field> AffineSystem<T> {
    pub fn width(&self) -> usize {
        self.n_elim + self.n_keep + 1
    }

    /// Solve the equalities for as many eliminated variables as possible
    /// and substitute them into the inequalities.
    pub fn reduce(&self) -> Result<Reduced<T>> {
        let w = self.width();
        let mut eqs: Vec<Vec<T>> = self.equalities.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut next = 0;
        for col in 0..self.n_elim {
            let Some(p) = (next..eqs.len()).find(|&i| !eqs[i][col].is_negligible()) else {
                continue;
            };
            eqs.swap(next, p);
            let piv = eqs[next][col].clone();
            for v in eqs[next].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() / piv.clone();
                }
            }
            let prow = eqs[next].clone();
            for (i, row) in eqs.iter_mut().enumerate() {
                if i == next || row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for j in 0..w {
                    if !prow[j].is_zero() {
                        row[j] = row[j].clone() - f.clone() * prow[j].clone();
                    }
                }
                if !T::EXACT {
                    row[col] = T::zero();
                }
            }
            pivots.push((next, col));
            next += 1;
        }
        if eqs[next..].iter().any(|r| r.iter().any(|v| !v.is_negligible())) {
            return Err(Error::Degenerate("equalities constrain the kept variables".into()));
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let free: Vec<usize> = (0..self.n_elim).filter(|c| !pivot_cols.contains(c)).collect();
        let out_cols: Vec<usize> = free.iter().copied().chain(self.n_elim..w).collect();
        // pivot var = -(rest of its row)
        let subst: Vec<(usize, Vec<T>)> = pivots
            .iter()
            .map(|&(r, c)| (c, out_cols.iter().map(|&j| -eqs[r][j].clone()).collect()))
            .collect();
        let rows = self
            .inequalities
            .iter()
            .map(|ineq| {
                let mut out: Vec<T> = out_cols.iter().map(|&j| ineq[j].clone()).collect();
                for (c, expr) in &subst {
                    let f = &ineq[*c];
                    if f.is_zero() {
                        continue;
                    }
                    for (o, e) in out.iter_mut().zip(expr) {
                        if !e.is_zero() {
                            *o = o.clone() + f.clone() * e.clone();
                        }
                    }
                }
                out
            })
            .collect();
        Ok(Reduced { n_free: free.len(), n_keep: self.n_keep, rows })
    }

    pub fn project(&self, method: ProjectionMethod, opts: FmOptions) -> Result<Vec<Halfspace<T>>> {
        let red = self.reduce()?;
        match method {
            ProjectionMethod::FourierMotzkin => red.project_fm(opts),
            ProjectionMethod::VertexHull => red.project_via_vertices(),
        }
    }
}

fn is_trivial<T: Field>(row: &[T]) -> bool {
    row[..row.len() - 1].iter().all(|v| v.is_negligible())
}

fn dedup_rows<T: Field>(rows: Vec<(Vec<T>, Vec<u64>)>) -> Result<Vec<(Vec<T>, Vec<u64>)>> {
    let mut out: Vec<(Vec<T>, Vec<u64>)> = Vec::with_capacity(rows.len());
    for (mut r, h) in rows {
        if is_trivial(&r) {
            if r[r.len() - 1].is_strictly_negative() {
                return Err(Error::Degenerate("inconsistent system (0 >= positive)".into()));
            }
            continue;
        }
        T::normalize_direction(&mut r);
        if !out.iter().any(|(o, _)| *o == r) {
            out.push((r, h));
        }
    }
    Ok(out)
}

/// Is `rows[i]` implied by the other rows in `active`?
fn implied<T: Field>(rows: &[Vec<T>], active: &[usize], i: usize, cols: &[usize]) -> Result<bool> {
    let k = rows[i].len() - 1;
    let mut lp = LinearProgram::new(cols.len());
    for j in 0..cols.len() {
        lp.set_free(j);
    }
    for &j in active {
        if j == i {
            continue;
        }
        let r = &rows[j];
        lp.add(cols.iter().map(|&c| r[c].clone()).collect(), Relation::Ge, -r[k].clone());
    }
    let target: Vec<T> = cols.iter().map(|&c| rows[i][c].clone()).collect();
    lp.add(target.clone(), Relation::Ge, -rows[i][k].clone() - T::one());
    lp.set_objective(target.iter().map(|v| -v.clone()).collect());
    match lp.solve()? {
        LpOutcome::Optimal(s) => {
            let slack = rows[i][k].clone() - s.value;
            Ok(slack >= T::zero() || slack.is_negligible())
        }
        LpOutcome::Infeasible { .. } => Err(Error::Degenerate("empty polyhedron during redundancy removal".into())),
        LpOutcome::Unbounded => Err(Error::Internal("bounded redundancy LP reported unbounded".into())),
    }
}

/// Remove rows implied by the others. Rows are `a . z + k >= 0` with the
/// constant last; `cols` lists the variable columns still in play. The
/// screening LPs run in parallel; rows flagged redundant are then removed
/// one at a time in order, re-checking against the survivors.
pub fn remove_redundant<T: Field>(rows: Vec<Vec<T>>, cols: &[usize]) -> Result<Vec<Vec<T>>> {
    let all: Vec<usize> = (0..rows.len()).collect();
    let flags: Vec<bool> = all
        .par_iter()
        .map(|&i| implied(&rows, &all, i, cols))
        .collect::<Result<Vec<_>>>()?;
    let mut active: Vec<usize> = all.clone();
    for i in 0..rows.len() {
        if flags[i] && implied(&rows, &active, i, cols)? {
            active.retain(|&j| j != i);
        }
    }
    Ok(active.into_iter().map(|i| rows[i].clone()).collect())
}

impl<T: Field> Reduced<T> {
    fn kept_halfspaces(&self, rows: Vec<Vec<T>>) -> Vec<Halfspace<T>> {
        let w = self.n_free + self.n_keep;
        rows.into_iter()
            .map(|r| Halfspace {
                normal: r[self.n_free..w].iter().map(|v| -v.clone()).collect(),
                offset: r[w].clone(),
            })
            .collect()
    }

    /// Fourier-Motzkin elimination of the free variables.
    pub fn project_fm(&self, opts: FmOptions) -> Result<Vec<Halfspace<T>>> {
        let w = self.n_free + self.n_keep;
        let words = self.rows.len().div_ceil(64).max(1);
        let tagged: Vec<(Vec<T>, Vec<u64>)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut h = vec![0u64; words];
                h[i / 64] |= 1 << (i % 64);
                (r.clone(), h)
            })
            .collect();
        let mut rows = dedup_rows(tagged)?;
        let mut remaining: Vec<usize> = (0..self.n_free).collect();
        let mut eliminated = 0usize;
        let live = |remaining: &[usize]| -> Vec<usize> { remaining.iter().copied().chain(self.n_free..w).collect() };
        {
            let cols = live(&remaining);
            let kept = remove_redundant(rows.iter().map(|(r, _)| r.clone()).collect(), &cols)?;
            rows.retain(|(r, _)| kept.contains(r));
        }
        while !remaining.is_empty() {
            // cheapest column: fewest new rows
            let (pos_of_best, col) = remaining
                .iter()
                .enumerate()
                .map(|(k, &c)| {
                    let p = rows.iter().filter(|(r, _)| r[c].is_strictly_positive()).count();
                    let n = rows.iter().filter(|(r, _)| r[c].is_strictly_negative()).count();
                    ((p * n) as i64 - (p + n) as i64, k, c)
                })
                .min()
                .map(|(_, k, c)| (k, c))
                .expect("nonempty");
            remaining.remove(pos_of_best);
            eliminated += 1;
            let (pos, rest): (Vec<_>, Vec<_>) = rows.into_iter().partition(|(r, _)| r[col].is_strictly_positive());
            let (neg, zero): (Vec<_>, Vec<_>) = rest.into_iter().partition(|(r, _)| r[col].is_strictly_negative());
            let candidates = zero.len() + pos.len() * neg.len();
            if candidates > opts.max_rows {
                return Err(Error::BlowUp { rows: candidates, bound: opts.max_rows });
            }
            let mut next: Vec<(Vec<T>, Vec<u64>)> = zero;
            for (p, hp) in &pos {
                for (n, hn) in &neg {
                    let h: Vec<u64> = hp.iter().zip(hn).map(|(a, b)| a | b).collect();
                    // Chernikov: a row built from more than k+1 originals
                    // after k eliminations is redundant
                    if h.iter().map(|x| x.count_ones() as usize).sum::<usize>() > eliminated + 1 {
                        continue;
                    }
                    let (cp, cn) = (p[col].clone(), -n[col].clone());
                    let mut r: Vec<T> = p.iter().zip(n).map(|(a, b)| cn.clone() * a.clone() + cp.clone() * b.clone()).collect();
                    r[col] = T::zero();
                    next.push((r, h));
                }
            }
            let next = dedup_rows(next)?;
            let cols = live(&remaining);
            let kept = remove_redundant(next.iter().map(|(r, _)| r.clone()).collect(), &cols)?;
            rows = next.into_iter().filter(|(r, _)| kept.contains(r)).collect();
        }
        Ok(self.kept_halfspaces(rows.into_iter().map(|(r, _)| r).collect()))
    }

    /// Vertices of the reduced polytope, projected and hulled.
    pub fn project_via_vertices(&self) -> Result<Vec<Halfspace<T>>> {
        let w = self.n_free + self.n_keep;
        let ineqs: Vec<(Vec<T>, T)> = self.rows.iter().map(|r| (r[..w].to_vec(), r[w].clone())).collect();
        let verts = dd::polytope_vertices(&ineqs)?;
        let mut pts: Vec<Vec<T>> = Vec::new();
        for v in verts {
            let p = v[self.n_free..].to_vec();
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        Ok(dd::hull_facets(&pts)?
            .into_iter()
            .map(|(normal, offset)| Halfspace { normal, offset })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, Rational};

    fn v(x: &[i64]) -> Vec<Rational> {
        x.iter().map(|&a| int(a)).collect()
    }

    /// Unit cube in (u, z1, z2); project onto (z1, z2) with u = z1 + z2 - w
    /// style couplings removed: the simplex 0 <= u <= 1, u >= z1, u >= z2,
    /// 0 <= z1, z2 -> projection is the unit square.
    fn square_system() -> AffineSystem<Rational> {
        AffineSystem {
            n_elim: 1,
            n_keep: 2,
            equalities: vec![],
            inequalities: vec![
                v(&[1, 0, 0, 0]),   // u >= 0
                v(&[-1, 0, 0, 1]),  // u <= 1
                v(&[1, -1, 0, 0]),  // u >= z1
                v(&[1, 0, -1, 0]),  // u >= z2
                v(&[0, 1, 0, 0]),   // z1 >= 0
                v(&[0, 0, 1, 0]),   // z2 >= 0
            ],
        }
    }

    #[test]
    fn both_methods_agree_on_square() {
        let s = square_system();
        let mut a = s.project(ProjectionMethod::FourierMotzkin, FmOptions::default()).unwrap();
        let mut b = s.project(ProjectionMethod::VertexHull, FmOptions::default()).unwrap();
        let key = |h: &Halfspace<Rational>| {
            let mut r = h.normal.clone();
            r.push(h.offset.clone());
            Rational::normalize_direction(&mut r);
            r
        };
        let mut ka: Vec<_> = a.drain(..).map(|h| key(&h)).collect();
        let mut kb: Vec<_> = b.drain(..).map(|h| key(&h)).collect();
        ka.sort();
        kb.sort();
        assert_eq!(ka.len(), 4);
        assert_eq!(ka, kb);
    }

    #[test]
    fn equalities_are_substituted() {
        // u = z1 + z2, 0 <= u <= 1, z >= 0 -> triangle
        let s = AffineSystem {
            n_elim: 1,
            n_keep: 2,
            equalities: vec![v(&[1, -1, -1, 0])],
            inequalities: vec![v(&[1, 0, 0, 0]), v(&[-1, 0, 0, 1]), v(&[0, 1, 0, 0]), v(&[0, 0, 1, 0])],
        };
        let h = s.project(ProjectionMethod::FourierMotzkin, FmOptions::default()).unwrap();
        assert_eq!(h.len(), 3);
    }

    #[test]
    fn blow_up_is_reported() {
        let s = square_system();
        let err = s.project(ProjectionMethod::FourierMotzkin, FmOptions { max_rows: 1 }).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }));
    }

    #[test]
    fn redundant_rows_removed() {
        let rows = vec![v(&[1, 0]), v(&[1, 1]), v(&[-1, 2]), v(&[-1, 5])];
        let kept = remove_redundant(rows, &[0]).unwrap();
        assert_eq!(kept, vec![v(&[1, 0]), v(&[-1, 2])]);
    }
}
