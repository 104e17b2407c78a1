//! Exhaustive small-network censuses: distinct sufficient statistics, exact
//! MLE-existence counts by polyhedral classification, fiber statistics, and
//! empirical fiber-connectivity verification of the generated move sets.

use crate::error::{invalid_arg, Error, Result};
use crate::fiber::{check_connectivity, Connectivity, Fiber};
use crate::geometry;
use crate::model::{
    dyad_count, network_count, DesignMatrix, MatrixForm, Network, ReciprocationVariant,
    SufficientStatistic,
};
use crate::moves::generate_move_set;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::time::Instant;

/// Largest node count a census will enumerate.
pub const CENSUS_NODE_CAP: usize = 5;
/// Largest node count classified through the exact interiority test by
/// default; the five-node case runs hundreds of thousands of exact solves
/// and must be forced.
pub const CENSUS_CLASSIFY_CAP: usize = 4;

/// Census options.
#[derive(Clone, Copy, Debug, Default)]
pub struct CensusOptions {
    /// Classify each distinct statistic through the exact interiority test.
    /// `None` classifies up to [`CENSUS_CLASSIFY_CAP`] nodes.
    pub classify: Option<bool>,
    /// Keep the per-statistic table in the report.
    pub detail: bool,
}

/// Per-statistic table row.
#[derive(Clone, Debug, Serialize)]
pub struct StatisticDetail {
    /// Display hash of the statistic (grouping itself is by exact vectors).
    pub t_hash: String,
    pub t: SufficientStatistic,
    pub fiber_size: u64,
    pub interior: Option<bool>,
}

/// Census outcome.
#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub n: usize,
    pub variant: ReciprocationVariant,
    pub networks_total: u64,
    pub distinct_statistics: u64,
    pub interior_statistics: Option<u64>,
    /// Number of networks whose margins admit an ordinary MLE.
    pub networks_with_mle: Option<u64>,
    pub runtime_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Vec<StatisticDetail>>,
}

impl CensusReport {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<u64>| v.map_or(String::new(), |x| x.to_string());
        format!(
            "n,variant,networks_total,distinct_statistics,interior_statistics,networks_with_mle,runtime_ms\n\
             {},{},{},{},{},{},{}\n",
            self.n,
            self.variant,
            self.networks_total,
            self.distinct_statistics,
            opt(self.interior_statistics),
            opt(self.networks_with_mle),
            self.runtime_ms
        )
    }

    pub fn details_to_csv(&self) -> Option<String> {
        let details = self.details.as_ref()?;
        let mut s = String::from("t_hash,fiber_size,interior,t\n");
        for d in details {
            s.push_str(&format!(
                "{},{},{},{}\n",
                d.t_hash,
                d.fiber_size,
                d.interior.map_or(String::new(), |b| b.to_string()),
                d.t
            ));
        }
        Some(s)
    }
}

/// Group the whole sample space by exact sufficient statistic.
///
/// Returns the sorted list of `(t, fiber size)` pairs; the order is
/// deterministic regardless of worker count.
fn group_by_statistic(a: &DesignMatrix) -> Vec<(Vec<i64>, u64)> {
    let n = a.n;
    let total = network_count(n) as u64;
    let workers = rayon::current_num_threads().max(1) as u64;
    let chunk = total.div_ceil(workers * 8).max(1);
    let ranges: Vec<(u64, u64)> = (0..total)
        .step_by(chunk as usize)
        .map(|s| (s, (s + chunk).min(total)))
        .collect();
    let merged: HashMap<Vec<i64>, u64> = ranges
        .into_par_iter()
        .map(|(start, end)| {
            let mut local: HashMap<Vec<i64>, u64> = HashMap::new();
            for ix in start..end {
                let x = Network::from_index(n, ix as u128);
                let t = crate::model::sufficient_statistic(a, &x).unwrap();
                *local.entry(t.values).or_insert(0) += 1;
            }
            local
        })
        .reduce(HashMap::new, |mut acc, local| {
            for (k, v) in local {
                *acc.entry(k).or_insert(0) += v;
            }
            acc
        });
    let mut groups: Vec<(Vec<i64>, u64)> = merged.into_iter().collect();
    groups.sort();
    groups
}

/// Exhaustively enumerate the sample space, group networks by their margins,
/// and (by default up to four nodes) classify each distinct margin through
/// the exact relative-interior test.
pub fn run_census(
    n: usize,
    variant: ReciprocationVariant,
    opts: CensusOptions,
) -> Result<CensusReport> {
    if n < 2 {
        return Err(invalid_arg("census needs at least 2 nodes"));
    }
    if n > CENSUS_NODE_CAP {
        return Err(Error::Capacity(format!(
            "census enumerates 4^{} networks; capped at {CENSUS_NODE_CAP} nodes",
            dyad_count(n)
        )));
    }
    let classify = opts.classify.unwrap_or(n <= CENSUS_CLASSIFY_CAP);
    let start = Instant::now();
    let a = DesignMatrix::build(n, variant, MatrixForm::Full)?;
    let groups = group_by_statistic(&a);
    let distinct = groups.len() as u64;
    let networks_total = network_count(n) as u64;
    debug_assert_eq!(groups.iter().map(|(_, c)| c).sum::<u64>(), networks_total);

    let (interior_statistics, networks_with_mle, flags) = if classify {
        let flags: Vec<bool> = groups
            .par_iter()
            .map(|(tv, _)| {
                let t = SufficientStatistic { values: tv.clone() };
                // every grouped statistic is observable, hence in the cone
                geometry::in_relative_interior(&a, &t).expect("observable statistic")
            })
            .collect();
        let interior = flags.iter().filter(|&&b| b).count() as u64;
        let with_mle: u64 = groups
            .iter()
            .zip(&flags)
            .filter(|(_, &f)| f)
            .map(|((_, c), _)| *c)
            .sum();
        (Some(interior), Some(with_mle), Some(flags))
    } else {
        (None, None, None)
    };

    let details = if opts.detail {
        Some(
            groups
                .iter()
                .enumerate()
                .map(|(ix, (tv, count))| {
                    let t = SufficientStatistic { values: tv.clone() };
                    StatisticDetail {
                        t_hash: format!("{:016x}", t.display_hash()),
                        t,
                        fiber_size: *count,
                        interior: flags.as_ref().map(|f| f[ix]),
                    }
                })
                .collect(),
        )
    } else {
        None
    };

    Ok(CensusReport {
        n,
        variant,
        networks_total,
        distinct_statistics: distinct,
        interior_statistics,
        networks_with_mle,
        runtime_ms: start.elapsed().as_millis(),
        details,
    })
}

/// A fiber that stayed disconnected under a move set.
#[derive(Clone, Debug, Serialize)]
pub struct DisconnectedFiber {
    pub t: SufficientStatistic,
    pub fiber_size: u64,
    pub components: usize,
}

/// Outcome of the exhaustive connectivity verification.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectivityCensus {
    pub n: usize,
    pub variant: ReciprocationVariant,
    pub fibers_checked: u64,
    /// Smallest composition depth whose move set connected every fiber, if
    /// one was found within the allowed range.
    pub minimal_connecting_depth: Option<usize>,
    pub max_depth_tried: usize,
    /// Move-set sizes per depth tried.
    pub move_counts: Vec<(usize, usize)>,
    /// Fibers still split at the deepest move set tried.
    pub counterexamples: Vec<DisconnectedFiber>,
}

/// For every observable margin, enumerate the fiber and test whether the
/// generated move set connects it, escalating the composition depth until
/// everything connects or the cap is reached.
pub fn verify_connectivity_census(
    n: usize,
    variant: ReciprocationVariant,
    max_depth: usize,
) -> Result<ConnectivityCensus> {
    if n > 4 {
        return Err(Error::Capacity(
            "connectivity verification enumerates every fiber; capped at 4 nodes".into(),
        ));
    }
    if max_depth < 1 {
        return Err(invalid_arg("depth cap must be at least 1"));
    }
    let a = DesignMatrix::build(n, variant, MatrixForm::Full)?;
    // group members by statistic
    let mut by_t: HashMap<Vec<i64>, Vec<Network>> = HashMap::new();
    for x in crate::model::enumerate_networks(n) {
        let t = crate::model::sufficient_statistic(&a, &x).unwrap();
        by_t.entry(t.values).or_default().push(x);
    }
    let mut fibers: Vec<Fiber> = by_t
        .into_iter()
        .map(|(tv, members)| Fiber {
            t: SufficientStatistic { values: tv },
            members,
        })
        .collect();
    fibers.sort_by(|x, y| x.t.values.cmp(&y.t.values));
    let fibers_checked = fibers.len() as u64;

    let mut move_counts = Vec::new();
    let mut counterexamples = Vec::new();
    let mut minimal = None;
    for depth in 1..=max_depth {
        let moves = generate_move_set(n, variant, depth)?;
        move_counts.push((depth, moves.len()));
        let failures: Vec<DisconnectedFiber> = fibers
            .par_iter()
            .filter(|f| f.size() > 1)
            .filter_map(|f| match check_connectivity(f, &moves) {
                Connectivity::Connected => None,
                Connectivity::Components(comps) => Some(DisconnectedFiber {
                    t: f.t.clone(),
                    fiber_size: f.size() as u64,
                    components: comps.len(),
                }),
            })
            .collect();
        if failures.is_empty() {
            minimal = Some(depth);
            counterexamples.clear();
            break;
        }
        counterexamples = failures;
    }
    counterexamples.sort_by(|x, y| x.t.values.cmp(&y.t.values));
    Ok(ConnectivityCensus {
        n,
        variant,
        fibers_checked,
        minimal_connecting_depth: minimal,
        max_depth_tried: max_depth,
        move_counts,
        counterexamples,
    })
}
