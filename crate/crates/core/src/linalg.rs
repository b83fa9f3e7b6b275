//! Exact linear algebra over the rationals: rank, row bases, kernels and
//! Fourier–Motzkin feasibility with certificates.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Q;

pub fn to_q(rows: &[Vec<i64>]) -> Vec<Vec<Q>> {
    rows.iter().map(|r| r.iter().map(|&v| Q::from_integer(BigInt::from(v))).collect()).collect()
}

pub fn transpose<T: Clone>(rows: &[Vec<T>], ncols: usize) -> Vec<Vec<T>> {
    (0..ncols).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
pub fn rank_int(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let nrows = a.len();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..nrows {
            for j in col + 1..ncols {
                let v = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(a: &mut [Vec<Q>]) -> Vec<usize> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][col].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..nrows {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..ncols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

pub fn rank_q(a: &[Vec<Q>]) -> usize {
    let mut b = a.to_vec();
    rref(&mut b).len()
}

/// Indices of the first linearly independent rows, scanning in order.
pub fn independent_rows(rows: &[Vec<i64>]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        let mut trial: Vec<Vec<i64>> = chosen.iter().map(|&k| rows[k].clone()).collect();
        trial.push(rows[i].clone());
        if rank_int(&trial) == trial.len() {
            chosen.push(i);
        }
    }
    chosen
}

/// Basis of the right kernel `{v : A v = 0}`.
pub fn nullspace(a: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut b = a.to_vec();
    let pivots = rref(&mut b);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); ncols];
        v[free] = Q::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -b[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Basis of the left kernel `{w : w^T A = 0}`, in reduced echelon form.
pub fn left_kernel(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<Q>> {
    let at = transpose(&to_q(rows), ncols);
    let mut basis = nullspace(&at, rows.len());
    rref(&mut basis);
    basis.into_iter().filter(|v| v.iter().any(|x| !x.is_zero())).collect()
}

/// Some solution of `A x = b`, if one exists.
pub fn solve(a: &[Vec<Q>], b: &[Q], ncols: usize) -> Option<Vec<Q>> {
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![Q::zero(); ncols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][ncols].clone();
    }
    Some(x)
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn mat_vec(a: &[Vec<Q>], v: &[Q]) -> Vec<Q> {
    a.iter().map(|r| dot(r, v)).collect()
}

pub fn cross3(a: &[Q], b: &[Q]) -> [Q; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

pub fn cross3_i(a: &[i64], b: &[i64]) -> [i64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Scales a rational vector to coprime integers, keeping the direction.
pub fn primitive(v: &[Q]) -> Vec<Q> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter().map(|x| Q::from_integer(x / &g)).collect()
}

/// Outcome of deciding whether `A v = 0` has a strictly positive solution.
#[derive(Debug, Clone, PartialEq)]
pub enum PositiveKernel {
    /// A solution with every entry positive.
    Feasible(Vec<Q>),
    /// Nonnegative, nonzero multipliers orthogonal to the kernel.
    Infeasible(Vec<Q>),
}

#[derive(Clone)]
struct FmRow {
    coef: Vec<Q>,
    rhs: Q,
    mult: Vec<Q>,
}

fn normalize(row: &mut FmRow) {
    if let Some(s) = row.coef.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
        let inv = s.recip();
        for c in row.coef.iter_mut() {
            *c *= &inv;
        }
        row.rhs *= &inv;
        for c in row.mult.iter_mut() {
            *c *= &inv;
        }
    }
}

/// Fourier–Motzkin decision of `{A v = 0, v ≥ 1}` for an integer matrix
/// with `m` columns. Either returns a positive kernel vector or multipliers
/// `λ ≥ 0`, `λ ≠ 0` with `λ ⟂ ker A`.
pub fn positive_kernel_fm(rows: &[Vec<i64>], m: usize) -> PositiveKernel {
    let a = to_q(rows);
    let kernel = nullspace(&a, m);
    let k = kernel.len();
    if k == 0 {
        return PositiveKernel::Infeasible(vec![Q::one(); m]);
    }
    // v = K t with K the kernel basis as columns; constraints (K t)_i ≥ 1
    let mut system: Vec<FmRow> = (0..m)
        .map(|i| {
            let mut mult = vec![Q::zero(); m];
            mult[i] = Q::one();
            FmRow { coef: kernel.iter().map(|b| b[i].clone()).collect(), rhs: Q::one(), mult }
        })
        .collect();
    let mut levels: Vec<Vec<FmRow>> = Vec::with_capacity(k + 1);
    for var in (0..k).rev() {
        levels.push(system.clone());
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in system {
            if r.coef[var].is_positive() {
                pos.push(r);
            } else if r.coef[var].is_negative() {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        for p in &pos {
            for n in &neg {
                let fp = -n.coef[var].clone();
                let fnn = p.coef[var].clone();
                let mut row = FmRow {
                    coef: p.coef.iter().zip(&n.coef).map(|(x, y)| x * &fp + y * &fnn).collect(),
                    rhs: &p.rhs * &fp + &n.rhs * &fnn,
                    mult: p.mult.iter().zip(&n.mult).map(|(x, y)| x * &fp + y * &fnn).collect(),
                };
                row.coef[var] = Q::zero();
                normalize(&mut row);
                rest.push(row);
            }
        }
        // drop exact duplicates and trivially satisfied rows
        let mut dedup: Vec<FmRow> = Vec::new();
        for r in rest {
            let trivial = r.coef.iter().all(|c| c.is_zero()) && !r.rhs.is_positive();
            if trivial {
                continue;
            }
            if r.coef.iter().all(|c| c.is_zero()) {
                dedup.push(r);
                continue;
            }
            if !dedup.iter().any(|d| d.coef == r.coef && d.rhs >= r.rhs) {
                dedup.retain(|d| !(d.coef == r.coef && d.rhs <= r.rhs));
                dedup.push(r);
            }
        }
        system = dedup;
    }
    let contradictions: Vec<&FmRow> = system.iter().filter(|r| r.rhs.is_positive()).collect();
    if !contradictions.is_empty() {
        let mut lambda = vec![Q::zero(); m];
        for r in contradictions {
            for (l, x) in lambda.iter_mut().zip(&r.mult) {
                *l += x;
            }
        }
        return PositiveKernel::Infeasible(lambda);
    }
    // back substitution, variable 0 first
    let mut t = vec![Q::zero(); k];
    for var in 0..k {
        let sys = &levels[k - 1 - var];
        let mut lower: Option<Q> = None;
        let mut upper: Option<Q> = None;
        for r in sys {
            let c = &r.coef[var];
            if c.is_zero() {
                continue;
            }
            let mut rhs = r.rhs.clone();
            for u in 0..var {
                rhs -= &r.coef[u] * &t[u];
            }
            let bound = rhs / c;
            if c.is_positive() {
                if lower.as_ref().map_or(true, |l| bound > *l) {
                    lower = Some(bound);
                }
            } else if upper.as_ref().map_or(true, |u| bound < *u) {
                upper = Some(bound);
            }
        }
        t[var] = match (lower, upper) {
            (Some(l), _) => l,
            (None, Some(u)) => u,
            (None, None) => Q::zero(),
        };
    }
    let v: Vec<Q> = (0..m).map(|i| kernel.iter().zip(&t).fold(Q::zero(), |acc, (b, ti)| acc + &b[i] * ti)).collect();
    PositiveKernel::Feasible(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{qi, qr};

    #[test]
    fn rank_examples() {
        assert_eq!(rank_int(&[vec![1, -1, 0], vec![0, 1, -1]]), 2);
        assert_eq!(rank_int(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank_int(&[vec![0, 0]]), 0);
        assert_eq!(rank_int(&[vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 2]]), 2);
    }

    #[test]
    fn rank_agrees_with_rref() {
        let rows = vec![vec![2, -1, 0, 3], vec![4, -2, 1, 0], vec![6, -3, 1, 3]];
        assert_eq!(rank_int(&rows), rank_q(&to_q(&rows)));
        assert_eq!(rank_int(&rows), 2);
    }

    #[test]
    fn nullspace_vectors_annihilate() {
        let a = to_q(&[vec![1, 0, 1], vec![0, 1, 1]]);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 1);
        assert!(mat_vec(&a, &ns[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn left_kernel_of_fold_network() {
        let gamma = vec![vec![-1, 2, 0], vec![-1, 0, 1], vec![2, -2, -1]];
        let lk = left_kernel(&gamma, 3);
        assert_eq!(lk, vec![vec![qi(1), qi(1), qi(1)]]);
    }

    #[test]
    fn fm_feasible_lotka() {
        match positive_kernel_fm(&[vec![1, -1, 0], vec![0, 1, -1]], 3) {
            PositiveKernel::Feasible(v) => assert!(v.iter().all(|x| *x >= qi(1))),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn fm_infeasible_multipliers() {
        match positive_kernel_fm(&[vec![1, 0, 1], vec![0, 1, 1]], 3) {
            PositiveKernel::Infeasible(l) => assert_eq!(l, vec![qi(1), qi(1), qi(2)]),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn primitive_scaling() {
        assert_eq!(primitive(&[qr(1, 2), qr(3, 4)]), vec![qi(2), qi(3)]);
        assert_eq!(primitive(&[qr(-2, 1), qi(4)]), vec![qi(-1), qi(2)]);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = to_q(&[vec![1, 1], vec![2, 2]]);
        assert!(solve(&a, &[qi(1), qi(3)], 2).is_none());
        let x = solve(&a, &[qi(1), qi(2)], 2).unwrap();
        assert_eq!(mat_vec(&a, &x), vec![qi(1), qi(2)]);
    }

    #[test]
    fn independent_row_selection() {
        let rows = vec![vec![0, 0, 0], vec![1, -1, 0], vec![2, -2, 0], vec![0, 1, -1]];
        assert_eq!(independent_rows(&rows), vec![1, 3]);
    }
}
