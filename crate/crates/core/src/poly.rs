//! Bivariate polynomials truncated at a fixed total degree.

use alloc::vec;
use alloc::vec::Vec;

/// `Σ c[i][j] u^i v^j` with `i + j ≤ deg`; higher terms are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2 {
    deg: usize,
    c: Vec<Vec<f64>>,
}

impl Poly2 {
    pub fn zero(deg: usize) -> Self {
        Self { deg, c: vec![vec![0.0; deg + 1]; deg + 1] }
    }

    pub fn constant(deg: usize, v: f64) -> Self {
        let mut p = Self::zero(deg);
        p.c[0][0] = v;
        p
    }

    /// `a + b u + c v`.
    pub fn affine(deg: usize, a: f64, b: f64, c: f64) -> Self {
        let mut p = Self::constant(deg, a);
        if deg >= 1 {
            p.c[1][0] = b;
            p.c[0][1] = c;
        }
        p
    }

    pub fn degree_bound(&self) -> usize {
        self.deg
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.deg {
            0.0
        } else {
            self.c[i][j]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        if i + j <= self.deg {
            self.c[i][j] = v;
        }
    }

    pub fn add(&self, o: &Poly2) -> Poly2 {
        let mut p = self.clone();
        p.add_scaled(o, 1.0);
        p
    }

    pub fn add_scaled(&mut self, o: &Poly2, s: f64) {
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                self.c[i][j] += s * o.coeff(i, j);
            }
        }
    }

    pub fn scale(&self, s: f64) -> Poly2 {
        let mut p = self.clone();
        p.c.iter_mut().flatten().for_each(|v| *v *= s);
        p
    }

    pub fn mul(&self, o: &Poly2) -> Poly2 {
        let d = self.deg.min(o.deg);
        let mut p = Poly2::zero(d);
        for i1 in 0..=d {
            for j1 in 0..=d - i1 {
                let a = self.coeff(i1, j1);
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..=d - i1 - j1 {
                    for j2 in 0..=d - i1 - j1 - i2 {
                        p.c[i1 + i2][j1 + j2] += a * o.coeff(i2, j2);
                    }
                }
            }
        }
        p
    }

    pub fn powi(&self, e: u32) -> Poly2 {
        let mut acc = Poly2::constant(self.deg, 1.0);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `P(U(u, v), V(u, v))`.
    pub fn compose(&self, uu: &Poly2, vv: &Poly2) -> Poly2 {
        let d = self.deg;
        let mut out = Poly2::zero(d);
        let upow: Vec<Poly2> = (0..=d as u32).map(|e| uu.powi(e)).collect();
        let vpow: Vec<Poly2> = (0..=d as u32).map(|e| vv.powi(e)).collect();
        for i in 0..=d {
            for j in 0..=d - i {
                let a = self.c[i][j];
                if a != 0.0 {
                    out.add_scaled(&upow[i].mul(&vpow[j]), a);
                }
            }
        }
        out
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        let mut s = 0.0;
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                s += self.c[i][j] * powu(u, i) * powu(v, j);
            }
        }
        s
    }

    /// Partial derivative `∂^{i+j}/∂u^i ∂v^j` at the origin.
    pub fn derivative_at_origin(&self, i: usize, j: usize) -> f64 {
        self.coeff(i, j) * factorial(i) * factorial(j)
    }

    /// Drops the terms of total degree below `k`.
    pub fn without_low_order(&self, k: usize) -> Poly2 {
        let mut p = self.clone();
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                if i + j < k {
                    p.c[i][j] = 0.0;
                }
            }
        }
        p
    }
}

fn powu(x: f64, e: usize) -> f64 {
    (0..e).fold(1.0, |acc, _| acc * x)
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, v| acc * v as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_expansion() {
        let p = Poly2::affine(3, 1.0, 1.0, 0.0).powi(4);
        assert_eq!(p.coeff(0, 0), 1.0);
        assert_eq!(p.coeff(2, 0), 6.0);
        assert_eq!(p.coeff(3, 0), 4.0);
        assert_eq!(p.coeff(4, 0), 0.0);
    }

    #[test]
    fn compose_and_eval() {
        let mut p = Poly2::zero(3);
        p.set(1, 1, 2.0);
        p.set(0, 2, -1.0);
        let u = Poly2::affine(3, 0.0, 1.0, 1.0);
        let v = Poly2::affine(3, 0.0, 2.0, 0.0);
        let q = p.compose(&u, &v);
        for (a, b) in [(0.3, -0.2), (1.0, 2.0)] {
            assert!((q.eval(a, b) - p.eval(a + b, 2.0 * a)).abs() < 1e-12);
        }
        assert_eq!(q.derivative_at_origin(2, 0), 2.0 * (4.0 - 4.0));
    }
}
