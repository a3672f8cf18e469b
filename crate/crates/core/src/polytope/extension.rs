//! Extensions q(a,b,c,d|x,y) over the friends' outcomes c (Alice's
//! setting 1) and d (Bob's setting 1).
//!
//! Entries forced to zero by the protocol (a != c when x = 1, b != d when
//! y = 1) are not variables at all.

use num_traits::{One, Zero};

use crate::behavior::{Behavior, Scenario};
use crate::cg::CgMap;
use crate::error::{Error, Result};
use crate::fm::AffineSystem;
use crate::lp::{LinearProgram, Relation};
use crate::scalar::{Field, Rational};

/// `(a, b, c, d, x, y)`, all 1-based.
pub type ExtIndex = (usize, usize, usize, usize, usize, usize);

/// Variable layout of the extension.
#[derive(Clone, Debug)]
pub struct ExtensionLayout {
    sc: Scenario,
    vars: Vec<ExtIndex>,
}

impl ExtensionLayout {
    pub fn new(sc: Scenario) -> Result<Self> {
        if !sc.supports_lf() {
            return Err(Error::InvalidScenario(format!("LF needs at least 2 settings per party, got {sc}")));
        }
        let mut vars = Vec::new();
        for x in 1..=sc.x_count {
            for y in 1..=sc.y_count {
                for a in 1..=sc.a_count {
                    for b in 1..=sc.b_count {
                        for c in 1..=sc.a_count {
                            for d in 1..=sc.b_count {
                                if (x == 1 && a != c) || (y == 1 && b != d) {
                                    continue;
                                }
                                vars.push((a, b, c, d, x, y));
                            }
                        }
                    }
                }
            }
        }
        Ok(ExtensionLayout { sc, vars })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.sc
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[ExtIndex] {
        &self.vars
    }

    pub fn position(&self, idx: ExtIndex) -> Option<usize> {
        self.vars.binary_search_by_key(&Self::key(idx), |&v| Self::key(v)).ok()
    }

    fn key((a, b, c, d, x, y): ExtIndex) -> (usize, usize, usize, usize, usize, usize) {
        (x, y, a, b, c, d)
    }

    fn select(&self, pred: impl Fn(&ExtIndex) -> bool) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| pred(&self.vars[i])).collect()
    }

    /// Variables summing to p(a,b|x,y).
    pub fn marginal_vars(&self, a: usize, b: usize, x: usize, y: usize) -> Vec<usize> {
        self.select(|v| (v.0, v.1, v.4, v.5) == (a, b, x, y))
    }

    /// Homogeneous equalities `sum(plus) - sum(minus) = 0` expressing
    /// no-superdeterminism and locality.
    pub fn structural_equalities(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let sc = &self.sc;
        let mut out = Vec::new();
        // p(c,d) identical across (x,y)
        for x in 1..=sc.x_count {
            for y in 1..=sc.y_count {
                if (x, y) == (1, 1) {
                    continue;
                }
                for c in 1..=sc.a_count {
                    for d in 1..=sc.b_count {
                        out.push((
                            self.select(|v| (v.2, v.3, v.4, v.5) == (c, d, x, y)),
                            self.select(|v| (v.2, v.3, v.4, v.5) == (c, d, 1, 1)),
                        ));
                    }
                }
            }
        }
        // Alice side: sum_b q(a,b,c,d|x,y) independent of y
        for x in 1..=sc.x_count {
            for y in 2..=sc.y_count {
                for a in 1..=sc.a_count {
                    for c in 1..=sc.a_count {
                        for d in 1..=sc.b_count {
                            out.push((
                                self.select(|v| (v.0, v.2, v.3, v.4, v.5) == (a, c, d, x, y)),
                                self.select(|v| (v.0, v.2, v.3, v.4, v.5) == (a, c, d, x, 1)),
                            ));
                        }
                    }
                }
            }
        }
        // Bob side: sum_a q(a,b,c,d|x,y) independent of x
        for y in 1..=sc.y_count {
            for x in 2..=sc.x_count {
                for b in 1..=sc.b_count {
                    for c in 1..=sc.a_count {
                        for d in 1..=sc.b_count {
                            out.push((
                                self.select(|v| (v.1, v.2, v.3, v.4, v.5) == (b, c, d, x, y)),
                                self.select(|v| (v.1, v.2, v.3, v.4, v.5) == (b, c, d, 1, y)),
                            ));
                        }
                    }
                }
            }
        }
        out.retain(|(p, m)| !(p.is_empty() && m.is_empty()));
        out
    }

    fn dense_row<T: Field>(&self, plus: &[usize], minus: &[usize]) -> Vec<T> {
        let mut r = vec![T::zero(); self.vars.len()];
        for &i in plus {
            r[i] = r[i].clone() + T::one();
        }
        for &i in minus {
            r[i] = r[i].clone() - T::one();
        }
        r
    }

    /// LP over q >= 0 with the structural equalities. When `target` is
    /// given, its entries are pinned through `sum_{c,d} q = p`; otherwise
    /// each (x,y) block is normalized. Marginal rows come first, in table
    /// order.
    pub fn lp<T: Field>(&self, target: Option<&Behavior<T>>) -> LinearProgram<T> {
        let mut lp = LinearProgram::new(self.vars.len());
        match target {
            Some(p) => {
                for (a, b, x, y) in self.sc.entries() {
                    let row = self.dense_row::<T>(&self.marginal_vars(a, b, x, y), &[]);
                    lp.add(row, Relation::Eq, p.get(a, b, x, y).clone());
                }
            }
            None => {
                for x in 1..=self.sc.x_count {
                    for y in 1..=self.sc.y_count {
                        let row = self.dense_row::<T>(&self.select(|v| (v.4, v.5) == (x, y)), &[]);
                        lp.add(row, Relation::Eq, T::one());
                    }
                }
            }
        }
        for (plus, minus) in self.structural_equalities() {
            lp.add(self.dense_row(&plus, &minus), Relation::Eq, T::zero());
        }
        lp
    }

    /// Objective row for a full-table functional: sum coeffs(a,b,x,y) q.
    pub fn lift_functional<T: Field>(&self, coeffs: &[T]) -> Vec<T> {
        self.vars
            .iter()
            .map(|&(a, b, _, _, x, y)| coeffs[self.sc.index(a, b, x, y)].clone())
            .collect()
    }

    /// The projection problem: eliminate q, keep the Collins-Gisin
    /// coordinates of p.
    pub fn affine_system<T: Field>(&self) -> AffineSystem<T> {
        let n = self.vars.len();
        let map = CgMap::new(self.sc);
        let dim = map.dim();
        let w = n + dim + 1;
        let embed = |plus: &[usize], minus: &[usize]| -> Vec<T> {
            let mut r = self.dense_row::<T>(plus, minus);
            r.resize(w, T::zero());
            r
        };
        let mut equalities = Vec::new();
        for x in 1..=self.sc.x_count {
            for y in 1..=self.sc.y_count {
                let mut r = embed(&self.select(|v| (v.4, v.5) == (x, y)), &[]);
                r[w - 1] = -T::one();
                equalities.push(r);
            }
        }
        for (plus, minus) in self.structural_equalities() {
            equalities.push(embed(&plus, &minus));
        }
        let sc = self.sc;
        let link = |vars: Vec<usize>, coord: usize| {
            let mut r = embed(&vars, &[]);
            r[n + coord] = -T::one();
            r
        };
        for x in 1..=sc.x_count {
            for a in 1..sc.a_count {
                equalities.push(link(self.select(|v| (v.0, v.4, v.5) == (a, x, 1)), map.alice(a, x)));
            }
        }
        for y in 1..=sc.y_count {
            for b in 1..sc.b_count {
                equalities.push(link(self.select(|v| (v.1, v.4, v.5) == (b, 1, y)), map.bob(b, y)));
            }
        }
        for x in 1..=sc.x_count {
            for y in 1..=sc.y_count {
                for a in 1..sc.a_count {
                    for b in 1..sc.b_count {
                        equalities.push(link(self.marginal_vars(a, b, x, y), map.joint(a, b, x, y)));
                    }
                }
            }
        }
        let inequalities = (0..n)
            .map(|i| {
                let mut r = vec![T::zero(); w];
                r[i] = T::one();
                r
            })
            .collect();
        AffineSystem { n_elim: n, n_keep: dim, equalities, inequalities }
    }
}

/// An explicit extension witnessing LF membership.
#[derive(Clone, Debug, PartialEq)]
pub struct LfExtension {
    pub scenario: Scenario,
    /// Nonzero entries only.
    pub q: Vec<(ExtIndex, Rational)>,
}

impl LfExtension {
    pub fn from_solution(layout: &ExtensionLayout, x: &[Rational]) -> Self {
        let q = layout
            .vars()
            .iter()
            .zip(x)
            .filter(|(_, v)| !v.is_zero())
            .map(|(&i, v)| (i, v.clone()))
            .collect();
        LfExtension { scenario: *layout.scenario(), q }
    }

    fn dense(&self, layout: &ExtensionLayout) -> Result<Vec<Rational>> {
        let mut v = vec![Rational::zero(); layout.len()];
        for (idx, val) in &self.q {
            let pos = layout
                .position(*idx)
                .ok_or_else(|| Error::OutOfRange(format!("extension entry {idx:?} is a protocol zero or out of range")))?;
            v[pos] = v[pos].clone() + val.clone();
        }
        Ok(v)
    }

    /// The behavior this extension marginalizes to.
    pub fn marginal(&self) -> Result<Behavior<Rational>> {
        let layout = ExtensionLayout::new(self.scenario)?;
        let dense = self.dense(&layout)?;
        let mut p = Behavior::from_fn(self.scenario, |_, _, _, _| Rational::zero());
        for (&(a, b, _, _, x, y), v) in layout.vars().iter().zip(&dense) {
            let cur = p.get(a, b, x, y).clone();
            p.set(a, b, x, y, cur + v.clone());
        }
        Ok(p)
    }

    /// Check nonnegativity, normalization and the structural equalities
    /// exactly.
    pub fn check(&self) -> Result<()> {
        let layout = ExtensionLayout::new(self.scenario)?;
        let dense = self.dense(&layout)?;
        if dense.iter().any(|v| v < &Rational::zero()) {
            return Err(Error::OutOfRange("negative extension entry".into()));
        }
        for x in 1..=self.scenario.x_count {
            for y in 1..=self.scenario.y_count {
                let s: Rational = layout.select(|v| (v.4, v.5) == (x, y)).iter().map(|&i| dense[i].clone()).sum();
                if !s.is_one() {
                    return Err(Error::Unnormalized(format!("extension block (x={x}, y={y}) sums to {s}")));
                }
            }
        }
        for (plus, minus) in layout.structural_equalities() {
            let s: Rational = plus.iter().map(|&i| dense[i].clone()).sum::<Rational>()
                - minus.iter().map(|&i| dense[i].clone()).sum::<Rational>();
            if !s.is_zero() {
                return Err(Error::Precondition("extension violates no-superdeterminism or locality".into()));
            }
        }
        Ok(())
    }
}
