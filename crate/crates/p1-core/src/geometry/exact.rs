//! Dense exact-rational linear algebra helpers: rank, reduced row echelon
//! form, and null spaces. Small matrices only; clarity over speed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rat = BigRational;

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn rat_one() -> Rat {
    Rat::one()
}

/// Convert an integer row to rationals.
pub fn row_from_i64(row: &[i64]) -> Vec<Rat> {
    row.iter().map(|&v| rat_int(v)).collect()
}

/// In-place reduced row echelon form. Returns the pivot column of each
/// nonzero row, in order.
pub fn rref(m: &mut Vec<Vec<Rat>>) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = &*v / &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, pv) in row.iter_mut().zip(&pivot_row) {
                    let sub = pv * &f;
                    *x = &*x - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(pivots.len());
    pivots
}

/// Rank of a rational matrix given by rows.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    rref(&mut m).len()
}

/// Rank of an integer matrix given by rows.
pub fn rank_i64(rows: &[&[i64]]) -> usize {
    let m: Vec<Vec<Rat>> = rows.iter().map(|r| row_from_i64(r)).collect();
    rank(&m)
}

/// Basis of the null space `{x : M x = 0}` of a rational matrix.
pub fn nullspace(rows: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let pivots = rref(&mut m);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![rat_zero(); cols];
        v[free] = rat_one();
        for (rix, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[rix][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Scale a rational vector to a primitive integer vector (clear denominators,
/// divide by the gcd). The sign is preserved.
pub fn primitive_integer(v: &[Rat]) -> Vec<BigInt> {
    use num_integer::Integer;
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let mut ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if !g.is_zero() && !g.is_one() {
        for x in ints.iter_mut() {
            *x = &*x / &g;
        }
    }
    ints
}

/// Reduce `v` modulo the row space of `basis_rref` (which must be in reduced
/// row echelon form with the given pivot columns): subtracts multiples of the
/// basis rows so the pivot coordinates of the result vanish. Yields a
/// canonical coset representative.
pub fn reduce_mod_rowspace(v: &mut [Rat], basis_rref: &[Vec<Rat>], pivots: &[usize]) {
    for (row, &pc) in basis_rref.iter().zip(pivots) {
        if v[pc].is_zero() {
            continue;
        }
        let f = v[pc].clone();
        for (x, b) in v.iter_mut().zip(row) {
            let sub = b * &f;
            *x = &*x - sub;
        }
    }
}

/// Dot product of a rational vector with an integer vector.
pub fn dot_i64(v: &[Rat], w: &[i64]) -> Rat {
    let mut acc = rat_zero();
    for (a, &b) in v.iter().zip(w) {
        if b != 0 && !a.is_zero() {
            acc += a * rat_int(b);
        }
    }
    acc
}

/// Dot product of two integer vectors into a BigInt.
pub fn dot_big_i64(v: &[BigInt], w: &[i64]) -> BigInt {
    let mut acc = BigInt::zero();
    for (a, &b) in v.iter().zip(w) {
        if b != 0 && !a.is_zero() {
            acc += a * BigInt::from(b);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_identity_and_singular() {
        let id: Vec<Vec<Rat>> = (0..3)
            .map(|i| (0..3).map(|j| rat_int((i == j) as i64)).collect())
            .collect();
        assert_eq!(rank(&id), 3);
        let sing = vec![
            row_from_i64(&[1, 2, 3]),
            row_from_i64(&[2, 4, 6]),
            row_from_i64(&[0, 1, 1]),
        ];
        assert_eq!(rank(&sing), 2);
    }

    #[test]
    fn nullspace_is_kernel() {
        let m = vec![row_from_i64(&[1, 1, 1, 0]), row_from_i64(&[0, 1, 2, 1])];
        let ns = nullspace(&m, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &m {
                let mut acc = rat_zero();
                for (a, b) in row.iter().zip(v) {
                    acc += a * b;
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![
            Rat::new(BigInt::from(2), BigInt::from(3)),
            Rat::new(BigInt::from(-4), BigInt::from(3)),
            rat_zero(),
        ];
        let ints = primitive_integer(&v);
        assert_eq!(ints, vec![BigInt::from(1), BigInt::from(-2), BigInt::from(0)]);
    }
}
