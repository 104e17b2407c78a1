//! Markov moves for fiber walks: cycle moves of the bipartite out/in-role
//! graph, the per-dyad exchange generators, the mutual-edge quadric
//! generators, and the lifting/overlap calculus that composes them into moves
//! applicable under the one-configuration-per-dyad sampling constraint.
//!
//! A move is stored as its integer exponent vector: positive entries are the
//! configurations the move adds, negative entries the ones it removes. The
//! monomial (binomial) notation of the literature is derived for display
//! only.

use crate::error::{invalid_arg, Error, Result};
use crate::model::{
    dyads, DesignMatrix, Dyad, DyadConfig, MatrixForm, Network, ReciprocationVariant,
};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

/// How a move was produced.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// From a cycle of the bipartite out/in-role graph.
    Cycle,
    /// Per-dyad exchange of two single edges against a mutual plus an empty
    /// dyad (zero-reciprocation variant only).
    TGenerator,
    /// Transfer of a mutual/empty pair on one dyad against two opposite
    /// single edges on another (preserves the total reciprocation count).
    PairedExchange,
    /// Mutual-edge quadric over a four-node subset.
    QGenerator,
    /// From a primitive even closed walk of the complete graph.
    Walk,
    /// Padding of another move to per-dyad balance.
    Lift(Box<Provenance>),
    /// Composition of two moves sharing dyads.
    Overlap(Box<Provenance>, Box<Provenance>),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Cycle => f.write_str("cycle"),
            Provenance::TGenerator => f.write_str("t"),
            Provenance::PairedExchange => f.write_str("paired-exchange"),
            Provenance::QGenerator => f.write_str("q"),
            Provenance::Walk => f.write_str("walk"),
            Provenance::Lift(p) => write!(f, "lift({p})"),
            Provenance::Overlap(a, b) => write!(f, "overlap({a},{b})"),
        }
    }
}

impl Serialize for Provenance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An integer vector in the per-(dyad, configuration) coordinate space with
/// disjoint positive and negative supports.
#[derive(Clone, Debug, Serialize)]
pub struct MarkovMove {
    n: usize,
    /// Sorted nonzero entries.
    entries: Vec<((Dyad, DyadConfig), i64)>,
    pub provenance: Provenance,
}

impl PartialEq for MarkovMove {
    fn eq(&self, other: &Self) -> bool {
        // provenance is bookkeeping, not identity
        self.n == other.n && self.entries == other.entries
    }
}

impl Eq for MarkovMove {}

impl MarkovMove {
    pub fn from_map(
        n: usize,
        map: BTreeMap<(Dyad, DyadConfig), i64>,
        provenance: Provenance,
    ) -> Result<MarkovMove> {
        let entries: Vec<_> = map.into_iter().filter(|&(_, v)| v != 0).collect();
        if entries.is_empty() {
            return Err(Error::EmptyMove);
        }
        for &((d, _), _) in &entries {
            if d.j >= n {
                return Err(invalid_arg(format!("dyad {d} out of range for {n} nodes")));
            }
        }
        Ok(MarkovMove {
            n,
            entries,
            provenance,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[((Dyad, DyadConfig), i64)] {
        &self.entries
    }

    pub fn coefficient(&self, d: Dyad, cfg: DyadConfig) -> i64 {
        self.entries
            .iter()
            .find(|&&((ed, ec), _)| ed == d && ec == cfg)
            .map_or(0, |&(_, v)| v)
    }

    /// Sum of the positive coefficients (the degree of either monomial when
    /// the move is per-dyad balanced).
    pub fn degree(&self) -> i64 {
        self.entries.iter().map(|&(_, v)| v.max(0)).sum()
    }

    /// Dyads the move touches.
    pub fn dyads(&self) -> BTreeSet<Dyad> {
        self.entries.iter().map(|&((d, _), _)| d).collect()
    }

    pub fn shares_dyad_with(&self, other: &MarkovMove) -> bool {
        let mine = self.dyads();
        other.dyads().iter().any(|d| mine.contains(d))
    }

    /// Per-dyad sums of the coefficients; all zero iff the move respects the
    /// one-observation-per-dyad degree constraint.
    pub fn per_dyad_sums(&self) -> BTreeMap<Dyad, i64> {
        let mut sums = BTreeMap::new();
        for &((d, _), v) in &self.entries {
            *sums.entry(d).or_insert(0) += v;
        }
        sums
    }

    pub fn is_per_dyad_balanced(&self) -> bool {
        self.per_dyad_sums().values().all(|&s| s == 0)
    }

    pub fn negated(&self) -> MarkovMove {
        MarkovMove {
            n: self.n,
            entries: self.entries.iter().map(|&(k, v)| (k, -v)).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Sign-normalized representative: the lexicographically smaller of the
    /// move and its negation, by entry list.
    pub fn canonical(&self) -> MarkovMove {
        let neg = self.negated();
        if neg.entries < self.entries {
            neg
        } else {
            self.clone()
        }
    }

    /// Identity key ignoring provenance.
    pub fn key(&self) -> Vec<(usize, usize, usize, i64)> {
        self.entries
            .iter()
            .map(|&((d, c), v)| (d.i, d.j, c.index(), v))
            .collect()
    }

    /// The move in the column coordinates of a design matrix. Fails when the
    /// move has entries on columns the form dropped.
    pub fn to_vector(&self, a: &DesignMatrix) -> Result<Vec<i64>> {
        if a.n != self.n {
            return Err(Error::DimensionMismatch(format!(
                "move is for {} nodes, matrix for {}",
                self.n, a.n
            )));
        }
        let mut v = vec![0i64; a.cols()];
        for &((d, cfg), val) in &self.entries {
            let Some(c) = a.column_of(d, cfg) else {
                return Err(invalid_arg(format!(
                    "move touches column ({d},{cfg}) absent from the {:?} form",
                    a.form
                )));
            };
            v[c] = val;
        }
        Ok(v)
    }

    /// Exact kernel membership: `A m = 0`.
    pub fn in_kernel(&self, a: &DesignMatrix) -> bool {
        match self.to_vector(a) {
            Ok(v) => a
                .multiply(&v)
                .map(|t| t.iter().all(|&x| x == 0))
                .unwrap_or(false),
            Err(_) => false,
        }
    }

    /// Could this move ever apply to a one-hot network? Requires every
    /// coefficient to be a unit and each dyad to gain at most one
    /// configuration and lose at most one.
    pub fn is_potentially_applicable(&self) -> bool {
        let mut pos_per_dyad: BTreeMap<Dyad, i64> = BTreeMap::new();
        let mut neg_per_dyad: BTreeMap<Dyad, i64> = BTreeMap::new();
        for &((d, _), v) in &self.entries {
            if v.abs() != 1 {
                return false;
            }
            if v > 0 {
                *pos_per_dyad.entry(d).or_insert(0) += 1;
            } else {
                *neg_per_dyad.entry(d).or_insert(0) += 1;
            }
        }
        pos_per_dyad.values().all(|&c| c <= 1) && neg_per_dyad.values().all(|&c| c <= 1)
    }

    /// Line format: degree, then the added and removed configurations, each
    /// repeated by multiplicity: `deg 3 + 12:01 13:10 23:01 - 12:10 ...`.
    pub fn to_line(&self) -> String {
        let mut s = format!("deg {}", self.degree());
        for sign in [1i64, -1] {
            s.push_str(if sign > 0 { " +" } else { " -" });
            for &((d, c), v) in &self.entries {
                if v.signum() == sign {
                    for _ in 0..v.abs() {
                        s.push_str(&format!(" {}{}:{}", d.i + 1, d.j + 1, c.code()));
                    }
                }
            }
        }
        s
    }

    pub fn parse_line(n: usize, line: &str) -> Result<MarkovMove> {
        let mut map: BTreeMap<(Dyad, DyadConfig), i64> = BTreeMap::new();
        let mut sign = 1i64;
        for tok in line.split_whitespace() {
            match tok {
                "deg" => continue,
                "+" => sign = 1,
                "-" => sign = -1,
                t if t.parse::<i64>().is_ok() => continue,
                t => {
                    let (dy, cfg) = t
                        .split_once(':')
                        .ok_or_else(|| Error::Parse(format!("bad move term {t:?}")))?;
                    let cfg = DyadConfig::from_code(cfg)
                        .ok_or_else(|| Error::Parse(format!("bad configuration {cfg:?}")))?;
                    let digits: Vec<u32> = dy
                        .chars()
                        .map(|ch| {
                            ch.to_digit(10)
                                .ok_or_else(|| Error::Parse(format!("bad dyad {dy:?}")))
                        })
                        .collect::<Result<_>>()?;
                    if digits.len() != 2 || digits[0] == 0 || digits[1] == 0 {
                        return Err(Error::Parse(format!("bad dyad {dy:?}")));
                    }
                    let d = Dyad::new(digits[0] as usize - 1, digits[1] as usize - 1);
                    *map.entry((d, cfg)).or_insert(0) += sign;
                }
            }
        }
        MarkovMove::from_map(n, map, Provenance::Walk)
    }
}

impl fmt::Display for MarkovMove {
    /// Binomial notation, positive monomial first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |fm: &mut fmt::Formatter<'_>, sign: i64| -> fmt::Result {
            let mut first = true;
            for &((d, c), v) in &self.entries {
                if v.signum() == sign {
                    if !first {
                        fm.write_str(" ")?;
                    }
                    write!(fm, "p{}{}({})", d.i + 1, d.j + 1, c.code())?;
                    if v.abs() > 1 {
                        write!(fm, "^{}", v.abs())?;
                    }
                    first = false;
                }
            }
            if first {
                fm.write_str("1")?;
            }
            Ok(())
        };
        term(f, 1)?;
        f.write_str(" - ")?;
        term(f, -1)
    }
}

/// Directed edge as a move coordinate: the edge `from -> to` belongs to dyad
/// `{from,to}` with the outgoing configuration when `from < to`.
fn edge_coord(from: usize, to: usize) -> (Dyad, DyadConfig) {
    let d = Dyad::new(from, to);
    if from < to {
        (d, DyadConfig::Out)
    } else {
        (d, DyadConfig::In)
    }
}

/// A vertex-simple cycle of the bipartite graph on out-roles and in-roles
/// (role `i` adjacent to role `j` iff `i != j`), stored as the alternating
/// vertex sequence starting at its smallest out-role.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleSpec {
    n: usize,
    /// Alternating vertices: even positions are out-roles (`0..n`), odd
    /// positions in-roles (`n..2n`).
    vertices: Vec<usize>,
}

impl CycleSpec {
    pub fn new(n: usize, vertices: Vec<usize>) -> Result<CycleSpec> {
        if vertices.len() < 4 || !vertices.len().is_multiple_of(2) {
            return Err(invalid_arg(
                "a cycle needs an even number of at least 4 vertices",
            ));
        }
        let mut seen = HashSet::new();
        for (k, &v) in vertices.iter().enumerate() {
            if v >= 2 * n {
                return Err(invalid_arg(format!("vertex {v} out of range")));
            }
            let is_out = v < n;
            if is_out != (k % 2 == 0) {
                return Err(invalid_arg("cycle vertices must alternate out/in roles"));
            }
            if !seen.insert(v) {
                return Err(invalid_arg("cycle revisits a vertex"));
            }
        }
        for k in 0..vertices.len() {
            let a = vertices[k];
            let b = vertices[(k + 1) % vertices.len()];
            let (o, i) = if a < n { (a, b - n) } else { (b, a - n) };
            if o == i {
                return Err(invalid_arg(
                    "cycle uses a diagonal pairing absent from the graph",
                ));
            }
        }
        Ok(CycleSpec { n, vertices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node indices the cycle involves, via either role.
    pub fn nodes(&self) -> BTreeSet<usize> {
        self.vertices
            .iter()
            .map(|&v| if v < self.n { v } else { v - self.n })
            .collect()
    }
}

/// All vertex-simple cycles of the out/in-role graph up to rotation and
/// reflection, of length at most `max_length`.
///
/// Canonical form: the cycle starts at its smallest vertex (always an
/// out-role) and its second vertex is smaller than its last.
pub fn enumerate_cycles(n: usize, max_length: usize) -> Vec<CycleSpec> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let cap = max_length.min(2 * n);
    if cap < 4 {
        return out;
    }
    let adjacent = |a: usize, b: usize| -> bool {
        let (o, i) = if a < n { (a, b) } else { (b, a) };
        o < n && i >= n && o != i - n
    };
    let mut path: Vec<usize> = Vec::with_capacity(cap);
    // the smallest cycle vertex is an out-role, so out-roles suffice as starts
    for start in 0..n {
        path.push(start);
        let mut used = vec![false; 2 * n];
        used[start] = true;
        dfs_cycles(n, start, cap, &adjacent, &mut path, &mut used, &mut out);
        path.pop();
    }
    out
}

fn dfs_cycles(
    n: usize,
    start: usize,
    cap: usize,
    adjacent: &impl Fn(usize, usize) -> bool,
    path: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<CycleSpec>,
) {
    let last = *path.last().unwrap();
    if path.len() >= 4 && path.len().is_multiple_of(2) && adjacent(last, start) && path[1] < last {
        out.push(CycleSpec {
            n,
            vertices: path.clone(),
        });
    }
    if path.len() == cap {
        return;
    }
    for next in (start + 1)..(2 * n) {
        if !used[next] && adjacent(last, next) {
            used[next] = true;
            path.push(next);
            dfs_cycles(n, start, cap, adjacent, path, used, out);
            path.pop();
            used[next] = false;
        }
    }
}

/// The kernel vector arising from a cycle: its edges alternate between the
/// added and the removed monomial.
pub fn cycle_move(c: &CycleSpec) -> MarkovMove {
    let n = c.n();
    let verts = c.vertices();
    let mut map: BTreeMap<(Dyad, DyadConfig), i64> = BTreeMap::new();
    for k in 0..verts.len() {
        let a = verts[k];
        let b = verts[(k + 1) % verts.len()];
        let (from, to) = if a < n { (a, b - n) } else { (b, a - n) };
        let coord = edge_coord(from, to);
        let sign = if k % 2 == 0 { 1 } else { -1 };
        *map.entry(coord).or_insert(0) += sign;
    }
    MarkovMove::from_map(n, map, Provenance::Cycle).expect("cycle edges never fully cancel")
}

/// Per-dyad exchange generators of the zero-reciprocation model: trade the
/// two single-edge states of a dyad against its mutual and empty states.
/// Never applicable on their own, but essential composition material.
pub fn t_generators(n: usize, variant: ReciprocationVariant) -> Result<Vec<MarkovMove>> {
    if variant != ReciprocationVariant::Zero {
        return Err(Error::InvalidVariant(format!(
            "the single-edge/mutual exchange is only a kernel element without \
             reciprocation; variant {variant} values a mutual dyad differently"
        )));
    }
    Ok(dyads(n)
        .into_iter()
        .map(|d| {
            let mut map = BTreeMap::new();
            map.insert((d, DyadConfig::Out), 1);
            map.insert((d, DyadConfig::In), 1);
            map.insert((d, DyadConfig::Mutual), -1);
            map.insert((d, DyadConfig::Null), -1);
            MarkovMove::from_map(n, map, Provenance::TGenerator).unwrap()
        })
        .collect())
}

/// Exchange a mutual-plus-empty pair on one dyad for two opposite single
/// edges on another, for every ordered pair of distinct dyads.
///
/// One such move changes the mutual count of each dyad by one in opposite
/// directions, so the total reciprocation statistic is preserved: these are
/// kernel elements of the zero and constant variants (but not the
/// edge-dependent one, whose per-node mutual counts tell the dyads apart).
/// Like the single-dyad exchanges, they cannot apply on their own and serve
/// as composition seeds.
pub fn paired_exchange_generators(n: usize) -> Vec<MarkovMove> {
    let ds = dyads(n);
    let mut out = Vec::new();
    for (i, &d) in ds.iter().enumerate() {
        for &e in ds.iter().skip(i + 1) {
            let mut map = BTreeMap::new();
            map.insert((d, DyadConfig::Out), 1);
            map.insert((d, DyadConfig::In), 1);
            map.insert((d, DyadConfig::Mutual), -1);
            map.insert((d, DyadConfig::Null), -1);
            map.insert((e, DyadConfig::Out), -1);
            map.insert((e, DyadConfig::In), -1);
            map.insert((e, DyadConfig::Mutual), 1);
            map.insert((e, DyadConfig::Null), 1);
            out.push(MarkovMove::from_map(n, map, Provenance::PairedExchange).unwrap());
        }
    }
    out
}

/// Mutual-edge quadrics: for every four-node subset, the differences of its
/// three perfect pairings, on mutual coordinates.
pub fn q_generators(n: usize) -> Vec<MarkovMove> {
    let mut out = Vec::new();
    if n < 4 {
        return out;
    }
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for d in (c + 1)..n {
                    let pairings = [[(a, b), (c, d)], [(a, c), (b, d)], [(a, d), (b, c)]];
                    for p in 0..3 {
                        for q in (p + 1)..3 {
                            let mut map = BTreeMap::new();
                            for &(i, j) in &pairings[p] {
                                *map.entry((Dyad::new(i, j), DyadConfig::Mutual))
                                    .or_insert(0) += 1;
                            }
                            for &(i, j) in &pairings[q] {
                                *map.entry((Dyad::new(i, j), DyadConfig::Mutual))
                                    .or_insert(0) -= 1;
                            }
                            out.push(MarkovMove::from_map(n, map, Provenance::QGenerator).unwrap());
                        }
                    }
                }
            }
        }
    }
    out
}

/// Classification of a primitive even closed walk of the complete graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WalkClass {
    EvenCycle,
    OddCyclePairSharedVertex,
    OddCyclePairBridged,
}

/// An even closed walk of the complete graph on the nodes, as its edge
/// sequence.
#[derive(Clone, Debug, Serialize)]
pub struct WalkSpec {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub class: WalkClass,
}

impl WalkSpec {
    /// The kernel vector on mutual coordinates: walk edges alternate between
    /// the two monomials; doubled bridge edges accumulate.
    pub fn to_move(&self) -> Result<MarkovMove> {
        let mut map: BTreeMap<(Dyad, DyadConfig), i64> = BTreeMap::new();
        for (k, &(u, v)) in self.edges.iter().enumerate() {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            *map.entry((Dyad::new(u, v), DyadConfig::Mutual)).or_insert(0) += sign;
        }
        MarkovMove::from_map(self.n, map, Provenance::Walk)
    }
}

/// Simple cycles of the complete graph on `n` nodes with length in
/// `3..=max_len`, canonical up to rotation/reflection.
fn complete_graph_cycles(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    fn dfs(
        n: usize,
        start: usize,
        max_len: usize,
        path: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        if path.len() >= 3 && path[1] < *path.last().unwrap() {
            out.push(path.clone());
        }
        if path.len() == max_len {
            return;
        }
        for next in (start + 1)..n {
            if !used[next] {
                used[next] = true;
                path.push(next);
                dfs(n, start, max_len, path, used, out);
                path.pop();
                used[next] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(max_len);
    for start in 0..n {
        let mut used = vec![false; n];
        used[start] = true;
        path.push(start);
        dfs(n, start, max_len, &mut path, &mut used, &mut out);
        path.pop();
    }
    out
}

/// Moves arising from primitive even closed walks of the complete graph,
/// mapped onto mutual-edge coordinates: even cycles, two odd cycles sharing
/// exactly one vertex, and two disjoint odd cycles joined by a doubled path.
pub fn walk_moves(n: usize, max_edges: usize) -> Result<Vec<MarkovMove>> {
    if n < 3 {
        return Err(invalid_arg("walks need at least 3 nodes"));
    }
    let mut seen: HashSet<Vec<(usize, usize, usize, i64)>> = HashSet::new();
    let mut out = Vec::new();
    let mut push = |w: WalkSpec, out: &mut Vec<MarkovMove>| {
        if let Ok(m) = w.to_move() {
            let canon = m.canonical();
            if seen.insert(canon.key()) {
                out.push(canon);
            }
        }
    };

    let cycles = complete_graph_cycles(n, max_edges.min(n));
    for cyc in &cycles {
        if cyc.len() % 2 == 0 && cyc.len() >= 4 && cyc.len() <= max_edges {
            let edges: Vec<(usize, usize)> = (0..cyc.len())
                .map(|k| (cyc[k], cyc[(k + 1) % cyc.len()]))
                .collect();
            push(
                WalkSpec {
                    n,
                    edges,
                    class: WalkClass::EvenCycle,
                },
                &mut out,
            );
        }
    }

    let odd: Vec<&Vec<usize>> = cycles.iter().filter(|c| c.len() % 2 == 1).collect();
    let rotate_to = |cyc: &[usize], v: usize| -> Vec<(usize, usize)> {
        let pos = cyc.iter().position(|&x| x == v).unwrap();
        (0..cyc.len())
            .map(|k| {
                let a = cyc[(pos + k) % cyc.len()];
                let b = cyc[(pos + k + 1) % cyc.len()];
                (a, b)
            })
            .collect()
    };
    for (i, c1) in odd.iter().enumerate() {
        for c2 in odd.iter().skip(i) {
            if c1.len() + c2.len() > max_edges {
                continue;
            }
            let s1: BTreeSet<usize> = c1.iter().copied().collect();
            let s2: BTreeSet<usize> = c2.iter().copied().collect();
            let common: Vec<usize> = s1.intersection(&s2).copied().collect();
            if common.len() == 1 {
                let v = common[0];
                let mut edges = rotate_to(c1, v);
                edges.extend(rotate_to(c2, v));
                push(
                    WalkSpec {
                        n,
                        edges,
                        class: WalkClass::OddCyclePairSharedVertex,
                    },
                    &mut out,
                );
            } else if common.is_empty() {
                // join by a doubled path with interior disjoint from the
                // cycles
                let blocked: BTreeSet<usize> = s1.union(&s2).copied().collect();
                let free: Vec<usize> = (0..n).filter(|v| !blocked.contains(v)).collect();
                let budget = max_edges.saturating_sub(c1.len() + c2.len());
                for &v1 in &s1 {
                    for &v2 in &s2 {
                        for path in simple_paths(v1, v2, &free, budget / 2) {
                            let mut edges = rotate_to(c1, v1);
                            for w in path.windows(2) {
                                edges.push((w[0], w[1]));
                            }
                            edges.extend(rotate_to(c2, v2));
                            for w in path.windows(2).rev() {
                                edges.push((w[1], w[0]));
                            }
                            push(
                                WalkSpec {
                                    n,
                                    edges,
                                    class: WalkClass::OddCyclePairBridged,
                                },
                                &mut out,
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Simple paths from `a` to `b` whose interior vertices come from `free`,
/// with at most `max_edges` edges.
fn simple_paths(a: usize, b: usize, free: &[usize], max_edges: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if max_edges == 0 {
        return out;
    }
    let mut stack = vec![vec![a]];
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        if path.len() > 1 && last == b {
            out.push(path);
            continue;
        }
        if path.len() > max_edges {
            continue;
        }
        for &next in free.iter().chain(std::iter::once(&b)) {
            if !path.contains(&next) && next != last {
                let mut p = path.clone();
                p.push(next);
                stack.push(p);
            }
        }
    }
    out
}

/// Padding configuration used to restore per-dyad balance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftPad {
    Null,
    Mutual,
}

impl LiftPad {
    fn config(self) -> DyadConfig {
        match self {
            LiftPad::Null => DyadConfig::Null,
            LiftPad::Mutual => DyadConfig::Mutual,
        }
    }
}

/// Restore per-dyad balance by adding the padding configuration to the
/// deficient side of every unbalanced dyad (surplus padding entries on the
/// heavy side cancel first). A balanced move is returned unchanged.
///
/// Padding with the empty configuration only shifts normalizing-constant
/// rows and always preserves the kernel; mutual padding carries degree and
/// reciprocation weight, so its legality is variant-dependent and the caller
/// must re-check kernel membership.
pub fn lift_move(m: &MarkovMove, pad: LiftPad) -> Result<MarkovMove> {
    let sums = m.per_dyad_sums();
    if sums.values().all(|&s| s == 0) {
        return Ok(m.clone());
    }
    let mut map: BTreeMap<(Dyad, DyadConfig), i64> = m.entries.iter().copied().collect();
    for (d, s) in sums {
        if s != 0 {
            *map.entry((d, pad.config())).or_insert(0) -= s;
        }
    }
    MarkovMove::from_map(m.n, map, Provenance::Lift(Box::new(m.provenance.clone())))
}

/// Compose two moves sharing at least one dyad: multiply the positive and
/// negative monomials, rewrite, cancel, and re-lift.
///
/// For the zero-reciprocation variant a pair of opposite single edges on one
/// side of one dyad rewrites to a mutual plus an empty configuration (the two
/// edges combine to a double-ended edge); the reciprocation variants admit no
/// rewrite, only cancellation. The result is padded with empty configurations
/// back to per-dyad balance.
pub fn overlap(
    f: &MarkovMove,
    g: &MarkovMove,
    variant: ReciprocationVariant,
) -> Result<MarkovMove> {
    if f.n != g.n {
        return Err(Error::DimensionMismatch(
            "overlapping moves for different node counts".into(),
        ));
    }
    if !f.shares_dyad_with(g) {
        return Err(invalid_arg("overlap requires a shared dyad"));
    }
    let mut pos: BTreeMap<(Dyad, DyadConfig), i64> = BTreeMap::new();
    let mut neg: BTreeMap<(Dyad, DyadConfig), i64> = BTreeMap::new();
    for m in [f, g] {
        for &(k, v) in &m.entries {
            if v > 0 {
                *pos.entry(k).or_insert(0) += v;
            } else {
                *neg.entry(k).or_insert(0) += -v;
            }
        }
    }

    // zero-reciprocation rewrite within each monomial
    if variant == ReciprocationVariant::Zero {
        for side in [&mut pos, &mut neg] {
            let ds: Vec<Dyad> = side.keys().map(|&(d, _)| d).collect();
            for d in ds {
                loop {
                    let o = side.get(&(d, DyadConfig::Out)).copied().unwrap_or(0);
                    let i = side.get(&(d, DyadConfig::In)).copied().unwrap_or(0);
                    if o < 1 || i < 1 {
                        break;
                    }
                    *side.entry((d, DyadConfig::Out)).or_insert(0) -= 1;
                    *side.entry((d, DyadConfig::In)).or_insert(0) -= 1;
                    *side.entry((d, DyadConfig::Mutual)).or_insert(0) += 1;
                    *side.entry((d, DyadConfig::Null)).or_insert(0) += 1;
                }
            }
        }
    }

    // cancel common factors
    let keys: Vec<(Dyad, DyadConfig)> = pos.keys().copied().collect();
    for k in keys {
        let p = pos.get(&k).copied().unwrap_or(0);
        let q = neg.get(&k).copied().unwrap_or(0);
        let c = p.min(q);
        if c > 0 {
            *pos.get_mut(&k).unwrap() -= c;
            *neg.get_mut(&k).unwrap() -= c;
        }
    }
    pos.retain(|_, v| *v != 0);
    neg.retain(|_, v| *v != 0);

    // re-lift to per-dyad balance with empty-configuration padding
    let mut all_dyads: BTreeSet<Dyad> = pos.keys().map(|&(d, _)| d).collect();
    all_dyads.extend(neg.keys().map(|&(d, _)| d));
    for d in all_dyads {
        let ps: i64 = pos
            .iter()
            .filter(|&(&(pd, _), _)| pd == d)
            .map(|(_, &v)| v)
            .sum();
        let ns: i64 = neg
            .iter()
            .filter(|&(&(nd, _), _)| nd == d)
            .map(|(_, &v)| v)
            .sum();
        let (heavy, light, excess) = match ps - ns {
            0 => continue,
            s if s > 0 => (&mut pos, &mut neg, s),
            s => (&mut neg, &mut pos, -s),
        };
        let have = heavy.get(&(d, DyadConfig::Null)).copied().unwrap_or(0);
        let takeback = have.min(excess);
        if takeback > 0 {
            *heavy.get_mut(&(d, DyadConfig::Null)).unwrap() -= takeback;
        }
        if excess > takeback {
            *light.entry((d, DyadConfig::Null)).or_insert(0) += excess - takeback;
        }
    }

    let mut map = pos;
    for (k, v) in neg {
        *map.entry(k).or_insert(0) -= v;
    }
    MarkovMove::from_map(
        f.n,
        map,
        Provenance::Overlap(Box::new(f.provenance.clone()), Box::new(g.provenance.clone())),
    )
}

/// Apply a move to a network in the given direction (`+1` or `-1`).
///
/// Inapplicability is a normal outcome: the result is `None` unless, on every
/// dyad the move touches, the configuration being removed is the network's
/// current one.
pub fn apply(x: &Network, m: &MarkovMove, direction: i64) -> Option<Network> {
    debug_assert!(direction == 1 || direction == -1);
    debug_assert_eq!(x.n(), m.n);
    let mut out = x.clone();
    // first pass: verify every touched dyad removes the current configuration
    // and adds exactly one; entries are sorted, so dyads appear contiguously
    let mut k = 0;
    let entries = &m.entries;
    while k < entries.len() {
        let d = entries[k].0 .0;
        let mut add: Option<DyadConfig> = None;
        let mut remove: Option<DyadConfig> = None;
        while k < entries.len() && entries[k].0 .0 == d {
            let ((_, cfg), v) = entries[k];
            match v * direction {
                1 if add.is_none() => add = Some(cfg),
                -1 if remove.is_none() => remove = Some(cfg),
                _ => return None,
            }
            k += 1;
        }
        let (Some(add), Some(remove)) = (add, remove) else {
            return None;
        };
        if x.config(d) != remove {
            return None;
        }
        out.set_config(d, add);
    }
    Some(out)
}

/// FNV-1a hash of a move list, recorded by walk reports for reproducibility.
pub fn move_set_hash(moves: &[MarkovMove]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |b: u8| {
        h ^= b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    };
    for m in moves {
        for &((d, c), v) in &m.entries {
            eat(d.i as u8);
            eat(d.j as u8);
            eat(c.index() as u8);
            for b in v.to_le_bytes() {
                eat(b);
            }
        }
        eat(0xff);
    }
    h
}

/// Generate the applicable move set for a model: lifted cycle moves, lifted
/// mutual-edge quadrics, and the variant's exchange generators (single-dyad
/// for zero reciprocation, paired transfers for constant) as composition
/// seeds, closed under pairwise overlap up to the given composition depth.
///
/// Every emitted move is verified in the kernel of the variant's full design
/// matrix, deduplicated by sign-normalized form, and filtered to moves that
/// can act on one-hot networks (which drops the raw exchange generators —
/// they enter only through their composites).
pub fn generate_move_set(
    n: usize,
    variant: ReciprocationVariant,
    depth: usize,
) -> Result<Vec<MarkovMove>> {
    if n < 3 {
        return Err(invalid_arg("move generation needs at least 3 nodes"));
    }
    if depth < 1 {
        return Err(invalid_arg("composition depth must be at least 1"));
    }
    let full = DesignMatrix::build(n, variant, MatrixForm::Full)?;

    let mut seen: HashSet<Vec<(usize, usize, usize, i64)>> = HashSet::new();
    let mut seeds: Vec<MarkovMove> = Vec::new();
    let mut push_seed = |m: MarkovMove, seeds: &mut Vec<MarkovMove>| {
        let canon = m.canonical();
        if seen.insert(canon.key()) {
            seeds.push(canon);
        }
    };

    for c in enumerate_cycles(n, 2 * n) {
        let m = cycle_move(&c);
        for pad in [LiftPad::Null, LiftPad::Mutual] {
            if let Ok(l) = lift_move(&m, pad) {
                if l.in_kernel(&full) {
                    push_seed(l, &mut seeds);
                }
            }
        }
    }
    for q in q_generators(n) {
        // mutual padding of a pure-mutual move cancels it entirely, so only
        // the empty-configuration lift survives
        if let Ok(l) = lift_move(&q, LiftPad::Null) {
            if l.in_kernel(&full) {
                push_seed(l, &mut seeds);
            }
        }
    }
    match variant {
        ReciprocationVariant::Zero => {
            for t in t_generators(n, variant)? {
                push_seed(t, &mut seeds);
            }
        }
        ReciprocationVariant::Constant => {
            // the single-dyad exchange is not a kernel element here, but the
            // reciprocation-preserving paired transfer is
            for t in paired_exchange_generators(n) {
                debug_assert!(t.in_kernel(&full));
                push_seed(t, &mut seeds);
            }
        }
        ReciprocationVariant::EdgeDependent => {}
    }

    let mut all: HashMap<Vec<(usize, usize, usize, i64)>, MarkovMove> = HashMap::new();
    for m in &seeds {
        all.insert(m.key(), m.clone());
    }
    let mut frontier: Vec<MarkovMove> = seeds.clone();
    for _ in 2..=depth {
        let mut next: Vec<MarkovMove> = Vec::new();
        for f in &frontier {
            for g in &seeds {
                if !f.shares_dyad_with(g) {
                    continue;
                }
                for flip in [false, true] {
                    let flipped;
                    let gref = if flip {
                        flipped = g.negated();
                        &flipped
                    } else {
                        g
                    };
                    let Ok(m) = overlap(f, gref, variant) else {
                        continue;
                    };
                    if !m.in_kernel(&full) {
                        continue;
                    }
                    let canon = m.canonical();
                    if let std::collections::hash_map::Entry::Vacant(e) = all.entry(canon.key()) {
                        e.insert(canon.clone());
                        next.push(canon);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }

    let mut out: Vec<MarkovMove> = all
        .into_values()
        .filter(|m| m.is_potentially_applicable())
        .collect();
    out.sort_by_key(|a| a.key());
    Ok(out)
}
