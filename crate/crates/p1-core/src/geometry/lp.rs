//! Exact-rational linear programming: a dense two-phase primal simplex with
//! Bland's anti-cycling rule.
//!
//! Problems are stated in standard form, maximize `c^T x` subject to
//! `A x = b`, `x >= 0`. The solver returns exact optima with duals, exact
//! Farkas certificates of infeasibility, or exact unbounded rays. Everything
//! here is arbitrary-precision rational; a wrong feasibility verdict would
//! silently corrupt the MLE-existence analysis downstream, so no floating
//! point is allowed in this module.

use super::exact::{rat_int, rat_zero, Rat};
use num_traits::{Signed, Zero};

/// `maximize c^T x  s.t.  A x = b, x >= 0`.
#[derive(Clone, Debug)]
pub struct StandardLp {
    pub a: Vec<Vec<Rat>>,
    pub b: Vec<Rat>,
    pub c: Vec<Rat>,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    /// An optimal basic solution, its value, and a dual vector `y` with
    /// `y^T A >= c` (componentwise) and `y^T b = value`.
    Optimal { x: Vec<Rat>, value: Rat, dual: Vec<Rat> },
    /// A Farkas certificate: `y^T A >= 0` and `y^T b < 0`.
    Infeasible { farkas: Vec<Rat> },
    /// A ray `d >= 0` with `A d = 0` and `c^T d > 0`.
    Unbounded { ray: Vec<Rat> },
}

struct Tableau {
    /// number of structural variables
    n: usize,
    /// number of constraint rows still active
    rows: Vec<TableauRow>,
    /// objective reduced costs over structural + artificial columns
    obj: Vec<Rat>,
    obj_value: Rat,
    /// basic variable of each active row (column index)
    basis: Vec<usize>,
    /// artificial column k corresponds to original constraint k with sign
    /// `art_sign[k]` (rows were negated to make b nonnegative)
    art_sign: Vec<i64>,
}

struct TableauRow {
    coeff: Vec<Rat>,
    rhs: Rat,
}

impl Tableau {
    fn width(&self) -> usize {
        self.n + self.art_sign.len()
    }

    /// One simplex pivot at (row r, column j).
    fn pivot(&mut self, r: usize, j: usize) {
        let piv = self.rows[r].coeff[j].clone();
        debug_assert!(!piv.is_zero());
        for v in self.rows[r].coeff.iter_mut() {
            *v = &*v / &piv;
        }
        self.rows[r].rhs = &self.rows[r].rhs / &piv;
        let pivot_coeff = self.rows[r].coeff.clone();
        let pivot_rhs = self.rows[r].rhs.clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row.coeff[j].is_zero() {
                continue;
            }
            let f = row.coeff[j].clone();
            for (x, pv) in row.coeff.iter_mut().zip(&pivot_coeff) {
                if !pv.is_zero() {
                    let sub = pv * &f;
                    *x = &*x - sub;
                }
            }
            let sub = &pivot_rhs * &f;
            row.rhs = &row.rhs - sub;
        }
        if !self.obj[j].is_zero() {
            let f = self.obj[j].clone();
            for (x, pv) in self.obj.iter_mut().zip(&pivot_coeff) {
                if !pv.is_zero() {
                    let sub = pv * &f;
                    *x = &*x - sub;
                }
            }
            let add = &pivot_rhs * &f;
            self.obj_value = &self.obj_value + add;
        }
        self.basis[r] = j;
    }

    /// Bland's rule: smallest eligible entering column; smallest basic
    /// variable among min-ratio rows. Returns `Err(j)` when column `j`
    /// proves the problem unbounded.
    fn run(&mut self, allow: impl Fn(usize) -> bool) -> Result<(), usize> {
        loop {
            let width = self.width();
            let Some(j) = (0..width).find(|&j| allow(j) && self.obj[j].is_positive()) else {
                return Ok(());
            };
            let mut best: Option<(usize, Rat)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row.coeff[j].is_positive() {
                    let ratio = &row.rhs / &row.coeff[j];
                    match &best {
                        None => best = Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < *bratio
                                || (ratio == *bratio && self.basis[r] < self.basis[*br])
                            {
                                best = Some((r, ratio));
                            }
                        }
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, j),
                None => return Err(j),
            }
        }
    }
}

/// Solve a standard-form LP exactly.
pub fn solve(lp: &StandardLp) -> LpOutcome {
    let m = lp.a.len();
    let n = lp.c.len();
    for row in &lp.a {
        assert_eq!(row.len(), n, "constraint row width mismatch");
    }
    assert_eq!(lp.b.len(), m, "rhs length mismatch");

    // Phase 1: artificial basis, maximize minus the sum of artificials.
    let mut rows = Vec::with_capacity(m);
    let mut art_sign = Vec::with_capacity(m);
    for i in 0..m {
        let negate = lp.b[i].is_negative();
        let sign: i64 = if negate { -1 } else { 1 };
        let coeff: Vec<Rat> = {
            let mut v: Vec<Rat> = lp.a[i]
                .iter()
                .map(|x| if negate { -x.clone() } else { x.clone() })
                .collect();
            v.extend((0..m).map(|k| rat_int((k == i) as i64)));
            v
        };
        let rhs = if negate { -lp.b[i].clone() } else { lp.b[i].clone() };
        rows.push(TableauRow { coeff, rhs });
        art_sign.push(sign);
    }
    let mut tab = Tableau {
        n,
        rows,
        obj: Vec::new(),
        obj_value: rat_zero(),
        basis: (0..m).map(|i| n + i).collect(),
        art_sign,
    };
    // phase-1 reduced costs: cost 0 on structurals, -1 on artificials,
    // basis = artificials  =>  r_j = sum of structural column j, value = -sum(b)
    let mut obj = vec![rat_zero(); n + m];
    for j in 0..n {
        let mut s = rat_zero();
        for row in &tab.rows {
            s += &row.coeff[j];
        }
        obj[j] = s;
    }
    let mut val = rat_zero();
    for row in &tab.rows {
        val -= &row.rhs;
    }
    tab.obj = obj;
    tab.obj_value = val;
    tab.run(|_| true).expect("phase 1 is bounded by construction");

    if tab.obj_value.is_negative() {
        // infeasible: recover the Farkas certificate from the phase-1 duals
        // (y_k = -1 - reduced cost at artificial k, then undo row negation)
        let mut farkas = vec![rat_zero(); m];
        for (k, f) in farkas.iter_mut().enumerate() {
            let y = -rat_int(1) - &tab.obj[tab.n + k];
            *f = y * rat_int(tab.art_sign[k]);
        }
        return LpOutcome::Infeasible { farkas };
    }

    // Drive remaining basic artificials out; drop redundant rows.
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= tab.n {
            debug_assert!(tab.rows[r].rhs.is_zero(), "artificial basic at nonzero");
            if let Some(j) = (0..tab.n).find(|&j| !tab.rows[r].coeff[j].is_zero()) {
                tab.pivot(r, j);
            } else {
                tab.rows.remove(r);
                tab.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    // Phase 2: real objective. Recompute reduced costs r = c - c_B B^-1 A
    // directly from the current tableau (columns are B^-1 A already).
    let width = tab.width();
    let mut obj = vec![rat_zero(); width];
    for (j, o) in obj.iter_mut().enumerate().take(tab.n) {
        *o = lp.c[j].clone();
    }
    let mut value = rat_zero();
    for (r, &bj) in tab.basis.iter().enumerate() {
        debug_assert!(bj < tab.n);
        let cb = lp.c[bj].clone();
        if cb.is_zero() {
            continue;
        }
        for j in 0..width {
            let sub = &tab.rows[r].coeff[j] * &cb;
            obj[j] = &obj[j] - sub;
        }
        value += &cb * &tab.rows[r].rhs;
    }
    tab.obj = obj;
    tab.obj_value = value;
    let n_struct = tab.n;
    if let Err(j) = tab.run(|j| j < n_struct) {
        // unbounded: build the improving ray
        let mut ray = vec![rat_zero(); tab.n];
        ray[j] = rat_int(1);
        for (r, &bj) in tab.basis.iter().enumerate() {
            if bj < tab.n {
                ray[bj] = -tab.rows[r].coeff[j].clone();
            }
        }
        return LpOutcome::Unbounded { ray };
    }

    let mut x = vec![rat_zero(); tab.n];
    for (r, &bj) in tab.basis.iter().enumerate() {
        if bj < tab.n {
            x[bj] = tab.rows[r].rhs.clone();
        }
    }
    // Duals from the artificial columns: artificial k is the k-th original
    // identity column, so its reduced cost equals -y_k (up to the row
    // negation applied while normalizing the rhs).
    let mut dual = vec![rat_zero(); m];
    for (k, d) in dual.iter_mut().enumerate() {
        let y = -tab.obj[tab.n + k].clone();
        *d = y * rat_int(tab.art_sign[k]);
    }
    LpOutcome::Optimal {
        x,
        value: tab.obj_value.clone(),
        dual,
    }
}

/// Convenience: is `A x = b, x >= 0` feasible? Returns a witness.
pub fn feasible_point(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let lp = StandardLp {
        a: a.to_vec(),
        b: b.to_vec(),
        c: vec![rat_zero(); a.first().map_or(0, |r| r.len())],
    };
    match solve(&lp) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::exact::row_from_i64;

    fn lp(a: Vec<Vec<i64>>, b: Vec<i64>, c: Vec<i64>) -> StandardLp {
        StandardLp {
            a: a.iter().map(|r| row_from_i64(r)).collect(),
            b: b.iter().map(|&v| rat_int(v)).collect(),
            c: c.iter().map(|&v| rat_int(v)).collect(),
        }
    }

    #[test]
    fn solves_a_small_problem() {
        // max x0 + x1 s.t. x0 + x1 + s = 4, x0 + 3 x1 + t = 6
        let p = lp(
            vec![vec![1, 1, 1, 0], vec![1, 3, 0, 1]],
            vec![4, 6],
            vec![1, 1, 0, 0],
        );
        match solve(&p) {
            LpOutcome::Optimal { value, x, dual } => {
                assert_eq!(value, rat_int(4));
                // check primal feasibility and dual feasibility by hand
                let x0 = &x[0];
                let x1 = &x[1];
                assert_eq!(x0 + x1 + &x[2], rat_int(4));
                // dual feasibility: y^T a_j >= c_j
                for (j, cj) in [1i64, 1, 0, 0].iter().enumerate() {
                    let mut lhs = rat_zero();
                    for (i, row) in p.a.iter().enumerate() {
                        lhs += &dual[i] * &row[j];
                    }
                    assert!(lhs >= rat_int(*cj));
                }
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn detects_infeasibility_with_certificate() {
        // x0 = 1 and x0 = 2 cannot both hold
        let p = lp(vec![vec![1], vec![1]], vec![1, 2], vec![0]);
        match solve(&p) {
            LpOutcome::Infeasible { farkas } => {
                // y^T A >= 0 and y^T b < 0
                let col = &farkas[0] + &farkas[1];
                assert!(col >= rat_zero());
                let yb = &farkas[0] * rat_int(1) + &farkas[1] * rat_int(2);
                assert!(yb < rat_zero());
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn detects_unboundedness_with_ray() {
        // max x0 with x0 - x1 = 0: ray (1,1)
        let p = lp(vec![vec![1, -1]], vec![0], vec![1, 0]);
        match solve(&p) {
            LpOutcome::Unbounded { ray } => {
                assert_eq!(&ray[0] - &ray[1], rat_zero());
                assert!(ray[0].is_positive());
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn handles_redundant_rows() {
        // duplicated constraint row
        let p = lp(
            vec![vec![1, 1], vec![1, 1], vec![1, 0]],
            vec![3, 3, 1],
            vec![0, 1],
        );
        match solve(&p) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat_int(2)),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_cycling_guard() {
        // classic degenerate example; Bland must terminate
        let p = lp(
            vec![vec![1, -1, 1, 0, 0], vec![1, 1, 0, 1, 0], vec![1, 0, 0, 0, 1]],
            vec![0, 0, 2],
            vec![3, -1, 0, 0, 0],
        );
        match solve(&p) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat_int(0)),
            other => panic!("expected optimal, got {other:?}"),
        }
    }
}
