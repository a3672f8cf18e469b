//! Collins-Gisin coordinates: the minimal affine parameterisation of the
//! no-signalling subspace.
//!
//! Coordinates, in order: Alice marginals p(a|x) for a < a_count, Bob
//! marginals p(b|y) for b < b_count, then joint p(a,b|x,y) for a < a_count,
//! b < b_count. Every no-signalling behavior is an affine image of its
//! coordinates, so LHV, LF and NS polytopes are full-dimensional here.

use crate::behavior::{Behavior, Scenario};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct CgMap {
    sc: Scenario,
}

impl CgMap {
    pub fn new(sc: Scenario) -> Self {
        CgMap { sc }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.sc
    }

    fn na(&self) -> usize {
        self.sc.a_count - 1
    }

    fn nb(&self) -> usize {
        self.sc.b_count - 1
    }

    pub fn dim(&self) -> usize {
        let (x, y) = (self.sc.x_count, self.sc.y_count);
        x * self.na() + y * self.nb() + x * y * self.na() * self.nb()
    }

    /// Coordinate of Alice's marginal p(a|x), a < a_count.
    pub fn alice(&self, a: usize, x: usize) -> usize {
        (x - 1) * self.na() + (a - 1)
    }

    pub fn bob(&self, b: usize, y: usize) -> usize {
        self.sc.x_count * self.na() + (y - 1) * self.nb() + (b - 1)
    }

    pub fn joint(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        let base = self.sc.x_count * self.na() + self.sc.y_count * self.nb();
        base + (((x - 1) * self.sc.y_count + (y - 1)) * self.na() + (a - 1)) * self.nb() + (b - 1)
    }

    /// Coordinates of `p`, reading Alice's marginals at y = 1 and Bob's at
    /// x = 1.
    pub fn coordinates<T: Scalar>(&self, p: &Behavior<T>) -> Vec<T> {
        let mut v = vec![T::zero(); self.dim()];
        for x in 1..=self.sc.x_count {
            for a in 1..=self.na() {
                v[self.alice(a, x)] = p.alice_marginal(a, x, 1);
            }
        }
        for y in 1..=self.sc.y_count {
            for b in 1..=self.nb() {
                v[self.bob(b, y)] = p.bob_marginal(b, 1, y);
            }
        }
        for x in 1..=self.sc.x_count {
            for y in 1..=self.sc.y_count {
                for a in 1..=self.na() {
                    for b in 1..=self.nb() {
                        v[self.joint(a, b, x, y)] = p.get(a, b, x, y).clone();
                    }
                }
            }
        }
        v
    }

    /// Affine expression `(coeffs, constant)` of the entry p(a,b|x,y) on the
    /// no-signalling subspace.
    pub fn entry<T: Scalar>(&self, a: usize, b: usize, x: usize, y: usize) -> (Vec<T>, T) {
        let mut g = vec![T::zero(); self.dim()];
        let mut k = T::zero();
        let (la, lb) = (a == self.sc.a_count, b == self.sc.b_count);
        match (la, lb) {
            (false, false) => g[self.joint(a, b, x, y)] = T::one(),
            (true, false) => {
                g[self.bob(b, y)] = T::one();
                for a2 in 1..=self.na() {
                    g[self.joint(a2, b, x, y)] = -T::one();
                }
            }
            (false, true) => {
                g[self.alice(a, x)] = T::one();
                for b2 in 1..=self.nb() {
                    g[self.joint(a, b2, x, y)] = -T::one();
                }
            }
            (true, true) => {
                k = T::one();
                for a2 in 1..=self.na() {
                    g[self.alice(a2, x)] = -T::one();
                }
                for b2 in 1..=self.nb() {
                    g[self.bob(b2, y)] = -T::one();
                }
                for a2 in 1..=self.na() {
                    for b2 in 1..=self.nb() {
                        g[self.joint(a2, b2, x, y)] = T::one();
                    }
                }
            }
        }
        (g, k)
    }

    /// The no-signalling behavior with the given coordinates.
    pub fn behavior<T: Scalar>(&self, c: &[T]) -> Behavior<T> {
        assert_eq!(c.len(), self.dim(), "coordinate vector length");
        Behavior::from_fn(self.sc, |a, b, x, y| {
            let (g, k) = self.entry::<T>(a, b, x, y);
            g.iter().zip(c).fold(k, |s, (gi, ci)| if gi.is_zero() { s } else { s + gi.clone() * ci.clone() })
        })
    }

    /// Restrict a full-table functional to the no-signalling subspace:
    /// returns `(g, k)` with `coeffs . p = g . cg(p) + k` for every
    /// no-signalling `p`.
    pub fn functional_to_cg<T: Scalar>(&self, coeffs: &[T]) -> (Vec<T>, T) {
        let mut g = vec![T::zero(); self.dim()];
        let mut k = T::zero();
        for ((a, b, x, y), c) in self.sc.entries().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            let (eg, ek) = self.entry::<T>(a, b, x, y);
            for (gi, ei) in g.iter_mut().zip(eg) {
                if !ei.is_zero() {
                    *gi = gi.clone() + c.clone() * ei;
                }
            }
            k = k + c.clone() * ek;
        }
        (g, k)
    }

    /// Canonical full-table functional for coordinate coefficients `g`:
    /// marginal terms are placed on the other party's setting 1, so that
    /// `lift(g) . p = g . coordinates(p)` for every table `p`.
    pub fn functional_from_cg<T: Scalar>(&self, g: &[T]) -> Vec<T> {
        let sc = self.sc;
        let mut c = vec![T::zero(); sc.len()];
        for x in 1..=sc.x_count {
            for a in 1..=self.na() {
                let w = &g[self.alice(a, x)];
                for b in 1..=sc.b_count {
                    let i = sc.index(a, b, x, 1);
                    c[i] = c[i].clone() + w.clone();
                }
            }
        }
        for y in 1..=sc.y_count {
            for b in 1..=self.nb() {
                let w = &g[self.bob(b, y)];
                for a in 1..=sc.a_count {
                    let i = sc.index(a, b, 1, y);
                    c[i] = c[i].clone() + w.clone();
                }
            }
        }
        for x in 1..=sc.x_count {
            for y in 1..=sc.y_count {
                for a in 1..=self.na() {
                    for b in 1..=self.nb() {
                        let i = sc.index(a, b, x, y);
                        c[i] = c[i].clone() + g[self.joint(a, b, x, y)].clone();
                    }
                }
            }
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{evaluate_inequality, Inequality, Sense};
    use crate::scalar::{int, Rational};

    #[test]
    fn dimensions() {
        assert_eq!(CgMap::new(Scenario::binary(2, 2)).dim(), 8);
        assert_eq!(CgMap::new(Scenario::binary(3, 3)).dim(), 15);
        assert_eq!(CgMap::new(Scenario::new(2, 3, 3, 2).unwrap()).dim(), 4 + 3 + 12);
    }

    #[test]
    fn round_trip_on_ns_behaviors() {
        let sc = Scenario::new(2, 3, 3, 2).unwrap();
        let map = CgMap::new(sc);
        let u = Behavior::<Rational>::uniform(sc);
        assert_eq!(map.behavior(&map.coordinates(&u)), u);
        let pr = Behavior::<Rational>::pr_box(Scenario::binary(3, 3)).unwrap();
        let m3 = CgMap::new(Scenario::binary(3, 3));
        assert_eq!(m3.behavior(&m3.coordinates(&pr)), pr);
    }

    #[test]
    fn functional_restriction_agrees_on_ns() {
        let sc = Scenario::binary(2, 2);
        let map = CgMap::new(sc);
        let chsh = Inequality::<Rational>::chsh(sc, (1, 2), (1, 2)).unwrap();
        let (g, k) = map.functional_to_cg(&chsh.coeffs);
        let lifted = Inequality::new(sc, map.functional_from_cg(&g), int(2), Sense::Le).unwrap();
        let pr = Behavior::<Rational>::pr_box(sc).unwrap();
        let direct = evaluate_inequality(&chsh, &pr).unwrap();
        let via = evaluate_inequality(&lifted, &pr).unwrap() + k;
        assert_eq!(direct, via);
        assert_eq!(direct, int(4));
    }
}
