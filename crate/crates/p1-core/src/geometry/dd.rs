//! Double description: exact enumeration of the minimal generators (lineality
//! basis plus extreme rays) of a polyhedral cone given by homogeneous
//! inequalities `{ y : h^T y >= 0 for all h }`.
//!
//! Facet enumeration of `cone(A)` reduces to this: the facets of the primal
//! cone are exactly the extreme rays of its dual cone `{ y : A^T y >= 0 }`,
//! taken modulo the lineality space `null(A^T)`.
//!
//! Inequalities are inserted one at a time. While the intermediate cone still
//! has lineality crossing the new hyperplane, one lineality generator absorbs
//! the cut; afterwards the classic positive/negative ray combination step with
//! the combinatorial adjacency test applies. Insertion follows a max-cutoff
//! order (largest number of strictly negative rays first) with index order
//! breaking ties, which keeps intermediate ray counts down and makes the
//! output ordering deterministic.

use super::exact::{rat_zero, Rat};
use num_traits::{Signed, Zero};

/// Tight-set bitmask over inserted inequality indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> BitSet {
        BitSet {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn intersect(&self, other: &BitSet) -> BitSet {
        BitSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn is_subset_of(&self, other: &BitSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }
}

#[derive(Clone, Debug)]
pub struct DdRay {
    pub v: Vec<Rat>,
    /// inequalities (by input index) this ray satisfies with equality
    pub tight: BitSet,
}

/// Minimal generator description of `{ y : h^T y >= 0 }`.
#[derive(Clone, Debug)]
pub struct DdCone {
    pub dim: usize,
    pub lineality: Vec<Vec<Rat>>,
    pub rays: Vec<DdRay>,
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    let mut acc = rat_zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Enumerate the minimal generators of `{ y in R^dim : h^T y >= 0 }`.
pub fn dual_rays(inequalities: &[Vec<Rat>], dim: usize) -> DdCone {
    let total = inequalities.len();
    let mut lineality: Vec<Vec<Rat>> = (0..dim)
        .map(|i| {
            let mut e = vec![rat_zero(); dim];
            e[i] = Rat::from_integer(1.into());
            e
        })
        .collect();
    let mut rays: Vec<DdRay> = Vec::new();
    let mut remaining: Vec<usize> = (0..total).collect();
    let mut inserted: Vec<usize> = Vec::new();

    while !remaining.is_empty() {
        // max-cutoff: prefer the inequality that strictly cuts the most rays;
        // among ties the smallest input index
        let mut pick = 0usize;
        if !rays.is_empty() && remaining.len() > 1 {
            let mut best_cut = 0usize;
            for (pos, &cand) in remaining.iter().enumerate() {
                let cut = rays
                    .iter()
                    .filter(|r| dot(&inequalities[cand], &r.v).is_negative())
                    .count();
                if pos == 0 || cut > best_cut {
                    best_cut = cut;
                    pick = pos;
                }
            }
        }
        let hix = remaining.remove(pick);
        let h = &inequalities[hix];

        // Lineality absorption: if some lineality generator crosses h, it can
        // repair every other generator and becomes the single new ray.
        if let Some(l0pos) = lineality.iter().position(|l| !dot(h, l).is_zero()) {
            let mut l0 = lineality.remove(l0pos);
            let hl0 = dot(h, &l0);
            if hl0.is_negative() {
                for x in l0.iter_mut() {
                    *x = -x.clone();
                }
            }
            let hl0 = dot(h, &l0);
            for l in lineality.iter_mut() {
                let f = dot(h, l) / &hl0;
                if !f.is_zero() {
                    for (x, y) in l.iter_mut().zip(&l0) {
                        let sub = y * &f;
                        *x = &*x - sub;
                    }
                }
            }
            for r in rays.iter_mut() {
                let f = dot(h, &r.v) / &hl0;
                if !f.is_zero() {
                    for (x, y) in r.v.iter_mut().zip(&l0) {
                        let sub = y * &f;
                        *x = &*x - sub;
                    }
                }
                r.tight.set(hix);
            }
            let mut tight = BitSet::new(total);
            for &g in &inserted {
                debug_assert!(dot(&inequalities[g], &l0).is_zero());
                tight.set(g);
            }
            rays.push(DdRay { v: l0, tight });
            inserted.push(hix);
            continue;
        }

        // All lineality is tight on h; split the rays.
        let mut vals: Vec<Rat> = rays.iter().map(|r| dot(h, &r.v)).collect();
        let mut pos_ix = Vec::new();
        let mut neg_ix = Vec::new();
        for (i, v) in vals.iter().enumerate() {
            if v.is_positive() {
                pos_ix.push(i);
            } else if v.is_negative() {
                neg_ix.push(i);
            }
        }
        if neg_ix.is_empty() {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    r.tight.set(hix);
                }
            }
            inserted.push(hix);
            continue;
        }

        let mut new_rays: Vec<DdRay> = Vec::new();
        for &pi in &pos_ix {
            for &ni in &neg_ix {
                let meet = rays[pi].tight.intersect(&rays[ni].tight);
                // combinatorial adjacency: no third ray is tight on everything
                // both parents are tight on
                let adjacent = rays.iter().enumerate().all(|(k, w)| {
                    k == pi || k == ni || !meet.is_subset_of(&w.tight)
                });
                if !adjacent {
                    continue;
                }
                // combo = (h.p) * neg - (h.neg) * pos, tight on h
                let hp = &vals[pi];
                let hn = &vals[ni];
                let mut v = vec![rat_zero(); dim];
                for (k, x) in v.iter_mut().enumerate() {
                    *x = hp * &rays[ni].v[k] - hn * &rays[pi].v[k];
                }
                let mut tight = meet.clone();
                tight.set(hix);
                new_rays.push(DdRay { v, tight });
            }
        }

        // keep nonnegative rays, mark tight ones, append the new combinations
        let mut kept: Vec<DdRay> = Vec::new();
        for (i, r) in rays.drain(..).enumerate() {
            if vals[i].is_negative() {
                continue;
            }
            let mut r = r;
            if vals[i].is_zero() {
                r.tight.set(hix);
            }
            kept.push(r);
        }
        vals.clear();
        kept.extend(new_rays);
        rays = kept;
        inserted.push(hix);
    }

    DdCone {
        dim,
        lineality,
        rays,
    }
}
