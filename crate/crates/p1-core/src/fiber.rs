//! Fibers of the sufficient-statistic map: exact enumeration (the desk-scale
//! oracle), fiber-graph connectivity verification, and the Monte Carlo
//! goodness-of-fit walk.
//!
//! All networks in one fiber share the same fitted probabilities, so the
//! goodness-of-fit comparison inside a fiber is against one fixed (extended)
//! MLE computed from the margins.

use crate::error::{invalid_arg, Error, Result};
use crate::inference::{extended_mle, FitOptions, GofKind, MleResult};
use crate::model::{
    dyad_count, DesignMatrix, DyadConfig, MatrixForm, Network, SufficientStatistic,
};
use crate::moves::{apply, move_set_hash, MarkovMove};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;

/// Largest node count for which exhaustive fiber enumeration is allowed.
pub const FIBER_ENUMERATION_NODE_CAP: usize = 5;

/// A fully enumerated fiber: every network sharing the margins `t`.
#[derive(Clone, Debug, Serialize)]
pub struct Fiber {
    pub t: SufficientStatistic,
    /// Members in lexicographic network order.
    pub members: Vec<Network>,
}

impl Fiber {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// One member per line in the network text format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for m in &self.members {
            s.push_str(&m.to_line());
            s.push('\n');
        }
        s
    }
}

/// Exact fiber enumeration by depth-first search over the dyads with
/// componentwise bounds on the remaining margin contributions.
pub fn enumerate_fiber(a: &DesignMatrix, t: &SufficientStatistic) -> Result<Fiber> {
    if a.form != MatrixForm::Full {
        return Err(invalid_arg("fiber enumeration requires the full design matrix"));
    }
    if t.values.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "statistic has {} entries, matrix has {} rows",
            t.values.len(),
            a.rows()
        )));
    }
    if a.n > FIBER_ENUMERATION_NODE_CAP {
        return Err(Error::Capacity(format!(
            "exhaustive enumeration is capped at {FIBER_ENUMERATION_NODE_CAP} nodes \
             ({} would scan 4^{} networks); use the fiber walker instead",
            a.n,
            dyad_count(a.n)
        )));
    }
    let nd = dyad_count(a.n);
    let rows = a.rows();
    // per-dyad column vectors and per-row suffix bounds
    let col: Vec<[Vec<i64>; 4]> = (0..nd)
        .map(|d| {
            [
                a.column(4 * d),
                a.column(4 * d + 1),
                a.column(4 * d + 2),
                a.column(4 * d + 3),
            ]
        })
        .collect();
    let mut suffix_min = vec![vec![0i64; rows]; nd + 1];
    let mut suffix_max = vec![vec![0i64; rows]; nd + 1];
    for d in (0..nd).rev() {
        for r in 0..rows {
            let mn = (0..4).map(|k| col[d][k][r]).min().unwrap();
            let mx = (0..4).map(|k| col[d][k][r]).max().unwrap();
            suffix_min[d][r] = suffix_min[d + 1][r] + mn;
            suffix_max[d][r] = suffix_max[d + 1][r] + mx;
        }
    }

    let mut members = Vec::new();
    let mut partial = vec![0i64; rows];
    let mut configs = vec![DyadConfig::Null; nd];
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        d: usize,
        nd: usize,
        rows: usize,
        col: &[[Vec<i64>; 4]],
        suffix_min: &[Vec<i64>],
        suffix_max: &[Vec<i64>],
        t: &[i64],
        partial: &mut Vec<i64>,
        configs: &mut Vec<DyadConfig>,
        n: usize,
        members: &mut Vec<Network>,
    ) {
        for r in 0..rows {
            let rest_min = partial[r] + suffix_min[d][r];
            let rest_max = partial[r] + suffix_max[d][r];
            if rest_min > t[r] || rest_max < t[r] {
                return;
            }
        }
        if d == nd {
            members.push(Network::new(n, configs.clone()).unwrap());
            return;
        }
        for k in 0..4 {
            for r in 0..rows {
                partial[r] += col[d][k][r];
            }
            configs[d] = DyadConfig::from_index(k).unwrap();
            dfs(
                d + 1,
                nd,
                rows,
                col,
                suffix_min,
                suffix_max,
                t,
                partial,
                configs,
                n,
                members,
            );
            for r in 0..rows {
                partial[r] -= col[d][k][r];
            }
        }
    }
    dfs(
        0,
        nd,
        rows,
        &col,
        &suffix_min,
        &suffix_max,
        &t.values,
        &mut partial,
        &mut configs,
        a.n,
        &mut members,
    );
    members.sort_by_key(|m| m.to_index());
    Ok(Fiber {
        t: t.clone(),
        members,
    })
}

/// The fiber of an observed network.
pub fn fiber_of(a: &DesignMatrix, x: &Network) -> Result<Fiber> {
    let t = crate::model::sufficient_statistic(a, x)?;
    enumerate_fiber(a, &t)
}

/// Verdict of a fiber-graph connectivity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Connectivity {
    Connected,
    /// The partition of member indices into connected components.
    Components(Vec<Vec<usize>>),
}

impl Connectivity {
    pub fn is_connected(&self) -> bool {
        matches!(self, Connectivity::Connected)
    }
}

/// Build the graph on fiber members whose edges are single applicable moves
/// (in either direction and sign) and report its connectivity.
pub fn check_connectivity(fiber: &Fiber, moves: &[MarkovMove]) -> Connectivity {
    let k = fiber.members.len();
    if k <= 1 {
        return Connectivity::Connected;
    }
    let index: HashMap<u128, usize> = fiber
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| (m.to_index(), i))
        .collect();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for (i, x) in fiber.members.iter().enumerate() {
        for m in moves {
            for dir in [1i64, -1] {
                if let Some(y) = apply(x, m, dir) {
                    if let Some(&j) = index.get(&y.to_index()) {
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        if ri != rj {
                            parent[ri] = rj;
                        }
                    }
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..k {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    if groups.len() == 1 {
        Connectivity::Connected
    } else {
        let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
        comps.sort();
        Connectivity::Components(comps)
    }
}

/// Tie handling in the exceedance count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TieRule {
    /// Count states whose statistic strictly exceeds the observed one (the
    /// printed procedure; ties never count).
    Strict,
    /// Count ties as exceedances as well. A sensitivity-analysis option, not
    /// part of the printed procedure.
    Inclusive,
}

/// Options for the goodness-of-fit walk.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WalkOptions {
    /// Number of counted steps (the estimator's denominator).
    pub steps: u64,
    pub seed: u64,
    pub kind: GofKind,
    pub tie: TieRule,
    /// Chain steps discarded before counting starts.
    pub burn_in: u64,
    /// Count every `thinning`-th step (1 = the raw chain, as printed).
    pub thinning: u64,
    /// Record per-state visit counts (small fibers only; used by diagnostics).
    pub record_visits: bool,
}

impl WalkOptions {
    pub fn new(steps: u64, seed: u64) -> WalkOptions {
        WalkOptions {
            steps,
            seed,
            kind: GofKind::PearsonStandard,
            tie: TieRule::Strict,
            burn_in: 0,
            thinning: 1,
            record_visits: false,
        }
    }
}

/// Outcome of a goodness-of-fit walk.
#[derive(Clone, Debug, Serialize)]
pub struct WalkReport {
    pub steps: u64,
    pub exceed_count: u64,
    pub alpha_hat: f64,
    pub seed: u64,
    pub kind: GofKind,
    pub tie: TieRule,
    pub acceptance_rate: f64,
    pub distinct_states_visited: u64,
    /// Hash of the proposal move list, for reproducibility records.
    pub move_set_hash: u64,
    /// Statistic of the observed network under the fiber's fitted
    /// probabilities.
    pub gf_observed: f64,
    /// Per-state visit counts (network line, count), when recording was on.
    pub visits: Option<Vec<(String, u64)>>,
}

/// Per-dyad additive decomposition of a goodness-of-fit statistic: entry
/// `[d][k]` is the contribution of dyad `d` in configuration `k`. Infinite
/// entries mark configurations outside the fitted support.
fn gof_table(p_hat: &[f64], nd: usize, kind: GofKind) -> Vec<[f64; 4]> {
    let mut table = vec![[0.0f64; 4]; nd];
    for (d, row) in table.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            let block = &p_hat[4 * d..4 * d + 4];
            if block[k] <= 0.0 {
                *cell = f64::INFINITY;
                continue;
            }
            let mut acc = 0.0;
            for (c, &p) in block.iter().enumerate() {
                if p <= 0.0 {
                    continue;
                }
                let x = (c == k) as u8 as f64;
                match kind {
                    GofKind::PearsonStandard => acc += (x - p) * (x - p) / p,
                    GofKind::PearsonPaper => acc += (x - p) * (x - p) / (p * p),
                    GofKind::LikelihoodRatio => {
                        if c == k {
                            acc += -p.ln();
                        }
                    }
                }
            }
            *cell = acc;
        }
    }
    table
}

fn gof_from_table(table: &[[f64; 4]], x: &Network) -> f64 {
    x.configs()
        .iter()
        .enumerate()
        .map(|(d, c)| table[d][c.index()])
        .sum()
}

/// Run the fiber walk: starting from the observed network, repeatedly pick a
/// move and a sign uniformly, step when the result is a valid network and
/// stay put otherwise, and count the steps whose goodness-of-fit statistic
/// exceeds the observed one. The fraction of exceedances estimates the exact
/// conditional tail probability.
pub fn walk_gof(
    a: &DesignMatrix,
    x: &Network,
    moves: &[MarkovMove],
    opts: WalkOptions,
) -> Result<WalkReport> {
    if opts.steps == 0 {
        return Err(invalid_arg("the walk needs at least one step"));
    }
    if moves.is_empty() {
        return Err(invalid_arg("the walk needs a nonempty move set"));
    }
    if opts.thinning == 0 {
        return Err(invalid_arg("thinning must be at least 1"));
    }
    if a.n != x.n() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is for {} nodes, network for {}",
            a.n,
            x.n()
        )));
    }
    let t = crate::model::sufficient_statistic(a, x)?;
    let fit = extended_mle(a, &t, FitOptions::default())?;
    walk_gof_with_fit(a, x, &fit, moves, opts)
}

/// The walk with a precomputed fit (so batch callers fit once per fiber).
pub fn walk_gof_with_fit(
    a: &DesignMatrix,
    x: &Network,
    fit: &MleResult,
    moves: &[MarkovMove],
    opts: WalkOptions,
) -> Result<WalkReport> {
    let nd = dyad_count(a.n);
    let table = gof_table(&fit.p_hat.p, nd, opts.kind);
    let gf_observed = gof_from_table(&table, x);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut current = x.clone();
    let mut gf_current = gf_observed;
    let mut exceed = 0u64;
    let mut accepted = 0u64;
    let mut counted = 0u64;
    let mut visits: HashMap<u128, u64> = HashMap::new();
    visits.insert(current.to_index(), 0);
    let total_steps = opts
        .burn_in
        .checked_add(opts.steps.checked_mul(opts.thinning).ok_or_else(|| {
            invalid_arg("step count times thinning overflows")
        })?)
        .ok_or_else(|| invalid_arg("step count overflows"))?;

    for step in 0..total_steps {
        let mix = rng.gen_range(0..moves.len());
        let dir = if rng.gen_range(0..2u8) == 0 { 1 } else { -1 };
        if let Some(next) = apply(&current, &moves[mix], dir) {
            current = next;
            gf_current = gof_from_table(&table, &current);
            accepted += 1;
        }
        *visits.entry(current.to_index()).or_insert(0) += 1;
        if step >= opts.burn_in && (step - opts.burn_in) % opts.thinning == opts.thinning - 1 {
            counted += 1;
            let exceeds = match opts.tie {
                TieRule::Strict => gf_current > gf_observed,
                TieRule::Inclusive => gf_current >= gf_observed,
            };
            if exceeds {
                exceed += 1;
            }
        }
    }
    debug_assert_eq!(counted, opts.steps);

    let visits_out = if opts.record_visits {
        let mut v: Vec<(String, u64)> = visits
            .iter()
            .map(|(&ix, &c)| (Network::from_index(a.n, ix).to_line(), c))
            .collect();
        v.sort();
        Some(v)
    } else {
        None
    };
    Ok(WalkReport {
        steps: opts.steps,
        exceed_count: exceed,
        alpha_hat: exceed as f64 / opts.steps as f64,
        seed: opts.seed,
        kind: opts.kind,
        tie: opts.tie,
        acceptance_rate: accepted as f64 / total_steps as f64,
        distinct_states_visited: visits.len() as u64,
        move_set_hash: move_set_hash(moves),
        gf_observed,
        visits: visits_out,
    })
}

/// Exact conditional tail probability as a ratio of counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExactAlpha {
    pub exceed: u64,
    pub fiber_size: u64,
}

impl ExactAlpha {
    pub fn value(&self) -> f64 {
        self.exceed as f64 / self.fiber_size as f64
    }
}

/// Exact fraction of fiber members whose statistic strictly exceeds the
/// observed network's, under the fiber's fixed fitted probabilities.
pub fn exact_alpha(a: &DesignMatrix, x: &Network, kind: GofKind) -> Result<ExactAlpha> {
    let t = crate::model::sufficient_statistic(a, x)?;
    let fiber = enumerate_fiber(a, &t)?;
    let fit = extended_mle(a, &t, FitOptions::default())?;
    exact_alpha_in_fiber(a, x, &fiber, &fit, kind, TieRule::Strict)
}

/// The exact tail fraction with explicit fiber, fit, and tie rule.
pub fn exact_alpha_in_fiber(
    a: &DesignMatrix,
    x: &Network,
    fiber: &Fiber,
    fit: &MleResult,
    kind: GofKind,
    tie: TieRule,
) -> Result<ExactAlpha> {
    let nd = dyad_count(a.n);
    let table = gof_table(&fit.p_hat.p, nd, kind);
    let gf_observed = gof_from_table(&table, x);
    let mut exceed = 0u64;
    for member in &fiber.members {
        let gf = gof_from_table(&table, member);
        let exceeds = match tie {
            TieRule::Strict => gf > gf_observed,
            TieRule::Inclusive => gf >= gf_observed,
        };
        if exceeds {
            exceed += 1;
        }
    }
    Ok(ExactAlpha {
        exceed,
        fiber_size: fiber.members.len() as u64,
    })
}
