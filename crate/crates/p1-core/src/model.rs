//! Core domain types: dyads, networks, design matrices, sufficient statistics,
//! and the parameter-to-probability map.
//!
//! A network on `n` nodes is stored one-hot: each of the `C(n,2)` dyads carries
//! exactly one of the four configurations. Dyads are ordered lexicographically
//! and, within a dyad, configurations are ordered `(0,0), (1,0), (0,1), (1,1)`.
//! All matrices, statistics and probability vectors follow this column order.

use crate::error::{invalid_arg, Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// The four observable states of a dyad `{i < j}`.
///
/// The pair `(a, b)` means: `a = 1` iff the edge `i -> j` is present and
/// `b = 1` iff the edge `j -> i` is present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DyadConfig {
    /// `(0,0)`: no edge between the two nodes.
    Null,
    /// `(1,0)`: a single edge from the smaller to the larger node.
    Out,
    /// `(0,1)`: a single edge from the larger to the smaller node.
    In,
    /// `(1,1)`: edges in both directions.
    Mutual,
}

impl DyadConfig {
    /// All configurations in their fixed serialization order.
    pub const ALL: [DyadConfig; 4] = [
        DyadConfig::Null,
        DyadConfig::Out,
        DyadConfig::In,
        DyadConfig::Mutual,
    ];

    /// Index in the fixed order `(0,0), (1,0), (0,1), (1,1)`.
    pub fn index(self) -> usize {
        match self {
            DyadConfig::Null => 0,
            DyadConfig::Out => 1,
            DyadConfig::In => 2,
            DyadConfig::Mutual => 3,
        }
    }

    pub fn from_index(k: usize) -> Option<DyadConfig> {
        DyadConfig::ALL.get(k).copied()
    }

    /// The `(a, b)` bits of the configuration.
    pub fn bits(self) -> (i64, i64) {
        match self {
            DyadConfig::Null => (0, 0),
            DyadConfig::Out => (1, 0),
            DyadConfig::In => (0, 1),
            DyadConfig::Mutual => (1, 1),
        }
    }

    /// Two-character code used by the network text format.
    pub fn code(self) -> &'static str {
        match self {
            DyadConfig::Null => "00",
            DyadConfig::Out => "10",
            DyadConfig::In => "01",
            DyadConfig::Mutual => "11",
        }
    }

    pub fn from_code(s: &str) -> Option<DyadConfig> {
        match s {
            "00" => Some(DyadConfig::Null),
            "10" => Some(DyadConfig::Out),
            "01" => Some(DyadConfig::In),
            "11" => Some(DyadConfig::Mutual),
            _ => None,
        }
    }
}

impl fmt::Display for DyadConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// An unordered pair of nodes `{i < j}`, zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dyad {
    pub i: usize,
    pub j: usize,
}

impl Dyad {
    pub fn new(i: usize, j: usize) -> Dyad {
        assert!(i != j, "a dyad joins two distinct nodes");
        if i < j {
            Dyad { i, j }
        } else {
            Dyad { i: j, j: i }
        }
    }

    pub fn contains(&self, node: usize) -> bool {
        self.i == node || self.j == node
    }

    /// Position of this dyad in the lexicographic enumeration for `n` nodes.
    pub fn index(&self, n: usize) -> usize {
        debug_assert!(self.j < n);
        // dyads (0,1)..(0,n-1), (1,2)..: offset of block i, plus j - i - 1
        self.i * n - self.i * (self.i + 1) / 2 + (self.j - self.i - 1)
    }
}

impl fmt::Display for Dyad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // one-based in all human-readable output
        write!(f, "{{{},{}}}", self.i + 1, self.j + 1)
    }
}

/// Number of dyads on `n` nodes.
pub fn dyad_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// All dyads on `n` nodes in lexicographic order.
pub fn dyads(n: usize) -> Vec<Dyad> {
    let mut out = Vec::with_capacity(dyad_count(n));
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(Dyad { i, j });
        }
    }
    out
}

/// How dyad reciprocation enters the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReciprocationVariant {
    /// No reciprocal effect: a mutual dyad is valued like its two single edges.
    Zero,
    /// One shared reciprocation effect for all dyads.
    Constant,
    /// A shared effect plus one effect per node: `rho + rho_i + rho_j`.
    EdgeDependent,
}

impl ReciprocationVariant {
    pub const ALL: [ReciprocationVariant; 3] = [
        ReciprocationVariant::Zero,
        ReciprocationVariant::Constant,
        ReciprocationVariant::EdgeDependent,
    ];

    /// Number of reciprocation rows in the design matrix for `n` nodes.
    pub fn rho_rows(self, n: usize) -> usize {
        match self {
            ReciprocationVariant::Zero => 0,
            ReciprocationVariant::Constant => 1,
            ReciprocationVariant::EdgeDependent => 1 + n,
        }
    }

    pub fn parse(s: &str) -> Option<ReciprocationVariant> {
        match s.to_ascii_lowercase().as_str() {
            "zero" | "z" => Some(ReciprocationVariant::Zero),
            "constant" | "c" | "const" => Some(ReciprocationVariant::Constant),
            "edge" | "e" | "edge-dependent" | "edgedependent" => {
                Some(ReciprocationVariant::EdgeDependent)
            }
            _ => None,
        }
    }
}

impl fmt::Display for ReciprocationVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReciprocationVariant::Zero => f.write_str("zero"),
            ReciprocationVariant::Constant => f.write_str("constant"),
            ReciprocationVariant::EdgeDependent => f.write_str("edge"),
        }
    }
}

/// Which of the three matrix shapes a [`DesignMatrix`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatrixForm {
    /// All rows (normalizing constants included), all four columns per dyad.
    Full,
    /// Normalizing-constant rows and `(0,0)` columns dropped.
    Simplified,
    /// Out/in-degree rows only, `(1,0)` and `(0,1)` columns only; shared by
    /// all three variants.
    CommonSubmatrix,
}

/// Label of one design-matrix row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowLabel {
    /// Per-dyad normalizing constant.
    Lambda(Dyad),
    /// Out-degree (expansiveness) effect of a node.
    Alpha(usize),
    /// In-degree (popularity) effect of a node.
    Beta(usize),
    /// Overall density effect.
    Theta,
    /// Shared reciprocation effect.
    Rho,
    /// Per-node reciprocation effect.
    RhoNode(usize),
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowLabel::Lambda(d) => write!(f, "lambda_{}{}", d.i + 1, d.j + 1),
            RowLabel::Alpha(i) => write!(f, "alpha_{}", i + 1),
            RowLabel::Beta(i) => write!(f, "beta_{}", i + 1),
            RowLabel::Theta => f.write_str("theta"),
            RowLabel::Rho => f.write_str("rho"),
            RowLabel::RhoNode(i) => write!(f, "rho_{}", i + 1),
        }
    }
}

/// An integer design matrix with labeled rows and columns.
///
/// Row order for the full form is: the `C(n,2)` normalizing-constant rows in
/// dyad order, then `alpha_1..alpha_n`, `beta_1..beta_n`, `theta`, and the
/// reciprocation rows. The simplified form drops the normalizing rows and the
/// `(0,0)` columns; the common submatrix keeps only the `alpha`/`beta` rows
/// and the single-edge columns (the redundant `theta` row, which equals the
/// sum of the `alpha` rows, is dropped so that the matrix is exactly the
/// incidence matrix of the bipartite out/in-role graph).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignMatrix {
    pub n: usize,
    pub variant: ReciprocationVariant,
    pub form: MatrixForm,
    rows: usize,
    cols: usize,
    /// Row-major entries; all values in `0..=2`.
    entries: Vec<i64>,
    row_labels: Vec<RowLabel>,
    col_labels: Vec<(Dyad, DyadConfig)>,
}

impl DesignMatrix {
    /// Build the full or simplified design matrix for `n` nodes.
    pub fn build(n: usize, variant: ReciprocationVariant, form: MatrixForm) -> Result<DesignMatrix> {
        if n < 2 {
            return Err(invalid_arg(format!("need at least 2 nodes, got {n}")));
        }
        match form {
            MatrixForm::Full | MatrixForm::Simplified => {}
            MatrixForm::CommonSubmatrix => return DesignMatrix::common(n),
        }
        let full = matches!(form, MatrixForm::Full);
        let nd = dyad_count(n);

        let mut row_labels = Vec::new();
        if full {
            row_labels.extend(dyads(n).into_iter().map(RowLabel::Lambda));
        }
        row_labels.extend((0..n).map(RowLabel::Alpha));
        row_labels.extend((0..n).map(RowLabel::Beta));
        row_labels.push(RowLabel::Theta);
        match variant {
            ReciprocationVariant::Zero => {}
            ReciprocationVariant::Constant => row_labels.push(RowLabel::Rho),
            ReciprocationVariant::EdgeDependent => {
                row_labels.push(RowLabel::Rho);
                row_labels.extend((0..n).map(RowLabel::RhoNode));
            }
        }

        let configs: &[DyadConfig] = if full {
            &DyadConfig::ALL
        } else {
            &DyadConfig::ALL[1..]
        };
        let mut col_labels = Vec::with_capacity(nd * configs.len());
        for d in dyads(n) {
            for &c in configs {
                col_labels.push((d, c));
            }
        }

        let rows = row_labels.len();
        let cols = col_labels.len();
        let mut entries = vec![0i64; rows * cols];
        for (cix, &(d, cfg)) in col_labels.iter().enumerate() {
            for (rix, &label) in row_labels.iter().enumerate() {
                entries[rix * cols + cix] = column_entry(label, d, cfg);
            }
        }

        Ok(DesignMatrix {
            n,
            variant,
            form,
            rows,
            cols,
            entries,
            row_labels,
            col_labels,
        })
    }

    /// The `2n x n(n-1)` incidence matrix of the bipartite graph whose parts
    /// are the out-roles and in-roles of the nodes, with the `n` diagonal
    /// pairings removed: per dyad `{i<j}`, the `(1,0)` column is
    /// `e_alpha_i + e_beta_j` and the `(0,1)` column is `e_alpha_j + e_beta_i`.
    pub fn common(n: usize) -> Result<DesignMatrix> {
        if n < 2 {
            return Err(invalid_arg(format!("need at least 2 nodes, got {n}")));
        }
        let mut row_labels: Vec<RowLabel> = (0..n).map(RowLabel::Alpha).collect();
        row_labels.extend((0..n).map(RowLabel::Beta));
        let mut col_labels = Vec::with_capacity(n * (n - 1));
        for d in dyads(n) {
            col_labels.push((d, DyadConfig::Out));
            col_labels.push((d, DyadConfig::In));
        }
        let rows = row_labels.len();
        let cols = col_labels.len();
        let mut entries = vec![0i64; rows * cols];
        for (cix, &(d, cfg)) in col_labels.iter().enumerate() {
            let (out_node, in_node) = match cfg {
                DyadConfig::Out => (d.i, d.j),
                DyadConfig::In => (d.j, d.i),
                _ => unreachable!(),
            };
            entries[out_node * cols + cix] = 1;
            entries[(n + in_node) * cols + cix] = 1;
        }
        Ok(DesignMatrix {
            n,
            variant: ReciprocationVariant::Zero,
            form: MatrixForm::CommonSubmatrix,
            rows,
            cols,
            entries,
            row_labels,
            col_labels,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_labels(&self) -> &[RowLabel] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[(Dyad, DyadConfig)] {
        &self.col_labels
    }

    /// Column index of `(dyad, config)`, if that column exists in this form.
    pub fn column_of(&self, d: Dyad, cfg: DyadConfig) -> Option<usize> {
        let per = match self.form {
            MatrixForm::Full => 4,
            MatrixForm::Simplified => 3,
            MatrixForm::CommonSubmatrix => 2,
        };
        let within = match self.form {
            MatrixForm::Full => cfg.index(),
            MatrixForm::Simplified => cfg.index().checked_sub(1)?,
            MatrixForm::CommonSubmatrix => match cfg {
                DyadConfig::Out => 0,
                DyadConfig::In => 1,
                _ => return None,
            },
        };
        Some(d.index(self.n) * per + within)
    }

    /// Copy of column `c` as a dense vector.
    pub fn column(&self, c: usize) -> Vec<i64> {
        (0..self.rows).map(|r| self.entry(r, c)).collect()
    }

    /// Indices of the non-normalizing rows (all rows except the `lambda` block).
    pub fn non_lambda_rows(&self) -> std::ops::Range<usize> {
        match self.form {
            MatrixForm::Full => dyad_count(self.n)..self.rows,
            _ => 0..self.rows,
        }
    }

    /// Exact product `A x` for an integer vector in column coordinates.
    pub fn multiply(&self, x: &[i64]) -> Result<Vec<i64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} vs {} columns",
                x.len(),
                self.cols
            )));
        }
        let mut out = vec![0i64; self.rows];
        for (cix, &xv) in x.iter().enumerate() {
            if xv == 0 {
                continue;
            }
            for r in 0..self.rows {
                out[r] += self.entry(r, cix) * xv;
            }
        }
        Ok(out)
    }

    /// Serialize in the plain text matrix format: a `rows cols` header line,
    /// then row-major whitespace-separated integers.
    pub fn to_text(&self) -> String {
        matrix_to_text(self.rows, self.cols, |r, c| self.entry(r, c))
    }
}

/// Entry of the full design matrix in row `label`, column `(d, cfg)`.
fn column_entry(label: RowLabel, d: Dyad, cfg: DyadConfig) -> i64 {
    let (a, b) = cfg.bits();
    match label {
        RowLabel::Lambda(ld) => (ld == d) as i64,
        RowLabel::Alpha(k) => {
            if k == d.i {
                a
            } else if k == d.j {
                b
            } else {
                0
            }
        }
        RowLabel::Beta(k) => {
            if k == d.i {
                b
            } else if k == d.j {
                a
            } else {
                0
            }
        }
        RowLabel::Theta => a + b,
        RowLabel::Rho => a.min(b),
        RowLabel::RhoNode(k) => {
            if d.contains(k) {
                a.min(b)
            } else {
                0
            }
        }
    }
}

/// Render any integer matrix in the `rows cols` text format.
pub fn matrix_to_text(rows: usize, cols: usize, entry: impl Fn(usize, usize) -> i64) -> String {
    use fmt::Write;
    let mut s = String::new();
    writeln!(s, "{rows} {cols}").unwrap();
    for r in 0..rows {
        let mut first = true;
        for c in 0..cols {
            if !first {
                s.push(' ');
            }
            write!(s, "{}", entry(r, c)).unwrap();
            first = false;
        }
        s.push('\n');
    }
    s
}

/// Parse the `rows cols` text format into a row-major integer matrix.
pub fn matrix_from_text(s: &str) -> Result<(usize, usize, Vec<i64>)> {
    let mut tokens = s.split_whitespace();
    let rows: usize = tokens
        .next()
        .ok_or_else(|| Error::Parse("empty matrix text".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad row count: {e}")))?;
    let cols: usize = tokens
        .next()
        .ok_or_else(|| Error::Parse("missing column count".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad column count: {e}")))?;
    let mut entries = Vec::with_capacity(rows * cols);
    for t in tokens {
        entries.push(
            t.parse::<i64>()
                .map_err(|e| Error::Parse(format!("bad entry {t:?}: {e}")))?,
        );
    }
    if entries.len() != rows * cols {
        return Err(Error::Parse(format!(
            "expected {} entries, found {}",
            rows * cols,
            entries.len()
        )));
    }
    Ok((rows, cols, entries))
}

/// One-hot dyad configuration state for `n` nodes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Network {
    n: usize,
    configs: Vec<DyadConfig>,
}

impl Network {
    pub fn new(n: usize, configs: Vec<DyadConfig>) -> Result<Network> {
        if n < 2 {
            return Err(invalid_arg(format!("need at least 2 nodes, got {n}")));
        }
        if configs.len() != dyad_count(n) {
            return Err(Error::DimensionMismatch(format!(
                "{} nodes need {} dyad configurations, got {}",
                n,
                dyad_count(n),
                configs.len()
            )));
        }
        Ok(Network { n, configs })
    }

    /// The empty network: every dyad in state `(0,0)`.
    pub fn empty(n: usize) -> Network {
        Network {
            n,
            configs: vec![DyadConfig::Null; dyad_count(n)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn configs(&self) -> &[DyadConfig] {
        &self.configs
    }

    pub fn config(&self, d: Dyad) -> DyadConfig {
        self.configs[d.index(self.n)]
    }

    pub fn set_config(&mut self, d: Dyad, cfg: DyadConfig) {
        let ix = d.index(self.n);
        self.configs[ix] = cfg;
    }

    /// The one-hot vector of length `4 * C(n,2)` in full column order.
    pub fn one_hot(&self) -> Vec<i64> {
        let mut v = vec![0i64; 4 * self.configs.len()];
        for (dix, cfg) in self.configs.iter().enumerate() {
            v[4 * dix + cfg.index()] = 1;
        }
        v
    }

    /// Decode a network from its rank in the lexicographic enumeration
    /// (first dyad most significant, configurations in their fixed order).
    pub fn from_index(n: usize, mut index: u128) -> Network {
        let nd = dyad_count(n);
        let mut configs = vec![DyadConfig::Null; nd];
        for dix in (0..nd).rev() {
            configs[dix] = DyadConfig::from_index((index & 3) as usize).unwrap();
            index >>= 2;
        }
        debug_assert_eq!(index, 0, "network index out of range");
        Network { n, configs }
    }

    /// Rank of this network in the lexicographic enumeration.
    pub fn to_index(&self) -> u128 {
        let mut ix: u128 = 0;
        for cfg in &self.configs {
            ix = (ix << 2) | cfg.index() as u128;
        }
        ix
    }

    /// Network text format: `n` followed by the `C(n,2)` two-bit codes.
    pub fn to_line(&self) -> String {
        let mut s = self.n.to_string();
        for cfg in &self.configs {
            s.push(' ');
            s.push_str(cfg.code());
        }
        s
    }

    pub fn parse_line(line: &str) -> Result<Network> {
        let mut tokens = line.split_whitespace();
        let n: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse("empty network line".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad node count: {e}")))?;
        let mut configs = Vec::with_capacity(dyad_count(n));
        for t in tokens {
            configs.push(
                DyadConfig::from_code(t)
                    .ok_or_else(|| Error::Parse(format!("bad dyad code {t:?}")))?,
            );
        }
        Network::new(n, configs)
    }

    /// Import from a directed 0/1 adjacency matrix with zero diagonal.
    pub fn from_adjacency(adj: &[Vec<u8>]) -> Result<Network> {
        let n = adj.len();
        if n < 2 {
            return Err(invalid_arg("adjacency matrix needs at least 2 nodes"));
        }
        for (i, row) in adj.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "adjacency row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            if row[i] != 0 {
                return Err(invalid_arg(format!("nonzero diagonal at ({i},{i})")));
            }
            if let Some(v) = row.iter().find(|&&v| v > 1) {
                return Err(invalid_arg(format!("adjacency entries must be 0/1, got {v}")));
            }
        }
        let mut net = Network::empty(n);
        for d in dyads(n) {
            let cfg = match (adj[d.i][d.j], adj[d.j][d.i]) {
                (0, 0) => DyadConfig::Null,
                (1, 0) => DyadConfig::Out,
                (0, 1) => DyadConfig::In,
                (1, 1) => DyadConfig::Mutual,
                _ => unreachable!(),
            };
            net.set_config(d, cfg);
        }
        Ok(net)
    }

    /// Export as a directed 0/1 adjacency matrix.
    pub fn to_adjacency(&self) -> Vec<Vec<u8>> {
        let mut adj = vec![vec![0u8; self.n]; self.n];
        for d in dyads(self.n) {
            let (a, b) = self.config(d).bits();
            adj[d.i][d.j] = a as u8;
            adj[d.j][d.i] = b as u8;
        }
        adj
    }

    /// Out-degree (row-sum) and in-degree (column-sum) sequences.
    pub fn degrees(&self) -> (Vec<i64>, Vec<i64>) {
        let mut outd = vec![0i64; self.n];
        let mut ind = vec![0i64; self.n];
        for d in dyads(self.n) {
            let (a, b) = self.config(d).bits();
            outd[d.i] += a;
            ind[d.j] += a;
            outd[d.j] += b;
            ind[d.i] += b;
        }
        (outd, ind)
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

/// Number of networks on `n` nodes: `4^C(n,2)`.
pub fn network_count(n: usize) -> u128 {
    1u128 << (2 * dyad_count(n))
}

/// Iterate over all networks with indices in `start..end`.
///
/// The full sample space is `0..network_count(n)`; disjoint ranges partition
/// it, so callers may split the range across workers.
pub fn enumerate_networks_range(
    n: usize,
    start: u128,
    end: u128,
) -> impl Iterator<Item = Network> {
    (start..end).map(move |ix| Network::from_index(n, ix))
}

/// Iterate over the whole sample space in lexicographic order.
pub fn enumerate_networks(n: usize) -> impl Iterator<Item = Network> {
    enumerate_networks_range(n, 0, network_count(n))
}

/// Exact integer vector of margins `t = A x`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SufficientStatistic {
    pub values: Vec<i64>,
}

impl SufficientStatistic {
    /// Display-only FNV-1a hash used to abbreviate statistics in reports.
    pub fn display_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for &v in &self.values {
            for byte in v.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x1000_0000_01b3);
            }
        }
        h
    }
}

impl fmt::Display for SufficientStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", strs.join(","))
    }
}

/// Exact integer `t = A x` for a one-hot network.
///
/// Requires the full form: the simplified and common forms drop columns, so
/// their products with one-hot networks are not the model margins.
pub fn sufficient_statistic(a: &DesignMatrix, x: &Network) -> Result<SufficientStatistic> {
    if a.form != MatrixForm::Full {
        return Err(invalid_arg("sufficient statistics require the full design matrix"));
    }
    if a.n != x.n() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is for {} nodes, network for {}",
            a.n,
            x.n()
        )));
    }
    let mut t = vec![0i64; a.rows()];
    for (dix, cfg) in x.configs().iter().enumerate() {
        let cix = 4 * dix + cfg.index();
        for r in 0..a.rows() {
            t[r] += a.entry(r, cix);
        }
    }
    Ok(SufficientStatistic { values: t })
}

/// Real parameter vector indexed by the non-normalizing rows of a full design
/// matrix (the per-dyad constants are derived, never stored).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    pub values: Vec<f64>,
}

impl ParameterVector {
    pub fn zeros(a: &DesignMatrix) -> ParameterVector {
        ParameterVector {
            values: vec![0.0; a.non_lambda_rows().len()],
        }
    }
}

/// Dyad-wise probability vector of length `4 * C(n,2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector {
    pub n: usize,
    pub p: Vec<f64>,
}

impl ProbabilityVector {
    pub fn dyad_block(&self, dix: usize) -> &[f64] {
        &self.p[4 * dix..4 * dix + 4]
    }

    /// Probability of one dyad configuration.
    pub fn get(&self, d: Dyad, cfg: DyadConfig) -> f64 {
        self.p[4 * d.index(self.n) + cfg.index()]
    }

    /// Support as full-column indices (entries strictly positive).
    pub fn support(&self) -> Vec<usize> {
        (0..self.p.len()).filter(|&c| self.p[c] > 0.0).collect()
    }
}

/// Map model parameters to dyad probabilities.
///
/// Per dyad, `p(a,b)` is proportional to `exp(<zeta, column(a,b)>)` over the
/// non-normalizing rows, normalized to sum to one within the dyad; the
/// normalization implicitly solves for the per-dyad constant.
pub fn probabilities_from_parameters(
    a: &DesignMatrix,
    zeta: &ParameterVector,
) -> Result<ProbabilityVector> {
    if a.form != MatrixForm::Full {
        return Err(invalid_arg("probabilities require the full design matrix"));
    }
    let rows = a.non_lambda_rows();
    if zeta.values.len() != rows.len() {
        return Err(Error::DimensionMismatch(format!(
            "parameter vector has {} entries, matrix has {} non-normalizing rows",
            zeta.values.len(),
            rows.len()
        )));
    }
    if zeta.values.iter().any(|v| !v.is_finite()) {
        return Err(invalid_arg("parameter vector has non-finite entries"));
    }
    let nd = dyad_count(a.n);
    let mut p = vec![0.0f64; 4 * nd];
    for dix in 0..nd {
        let mut weights = [0.0f64; 4];
        for k in 0..4 {
            let cix = 4 * dix + k;
            let mut dot = 0.0;
            for (zi, r) in rows.clone().enumerate() {
                let e = a.entry(r, cix);
                if e != 0 {
                    dot += zeta.values[zi] * e as f64;
                }
            }
            weights[k] = dot;
        }
        // softmax with max-shift for stability
        let m = weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for k in 0..4 {
            weights[k] = (weights[k] - m).exp();
            z += weights[k];
        }
        for k in 0..4 {
            p[4 * dix + k] = weights[k] / z;
        }
    }
    Ok(ProbabilityVector { n: a.n, p })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(n: usize, v: ReciprocationVariant) -> DesignMatrix {
        DesignMatrix::build(n, v, MatrixForm::Full).unwrap()
    }

    fn entries_grid(a: &DesignMatrix) -> Vec<Vec<i64>> {
        (0..a.rows()).map(|r| a.row(r).to_vec()).collect()
    }

    #[test]
    fn dyad_indexing_is_lexicographic() {
        let ds = dyads(4);
        assert_eq!(ds.len(), 6);
        for (k, d) in ds.iter().enumerate() {
            assert_eq!(d.index(4), k);
        }
        assert_eq!(Dyad::new(2, 0), Dyad { i: 0, j: 2 });
    }

    // Golden: the 6x4 two-node matrix with zero reciprocation.
    #[test]
    fn golden_two_node_zero_matrix() {
        let a = full(2, ReciprocationVariant::Zero);
        let expected = vec![
            vec![1, 1, 1, 1],
            vec![0, 1, 0, 1],
            vec![0, 0, 1, 1],
            vec![0, 0, 1, 1],
            vec![0, 1, 0, 1],
            vec![0, 1, 1, 2],
        ];
        assert_eq!(entries_grid(&a), expected);
        assert_eq!(
            a.row_labels()[0],
            RowLabel::Lambda(Dyad { i: 0, j: 1 })
        );
        assert_eq!(a.row_labels()[5], RowLabel::Theta);
    }

    // Golden: the 7x4 two-node matrix with constant reciprocation.
    #[test]
    fn golden_two_node_constant_matrix() {
        let a = full(2, ReciprocationVariant::Constant);
        let expected = vec![
            vec![1, 1, 1, 1],
            vec![0, 1, 0, 1],
            vec![0, 0, 1, 1],
            vec![0, 0, 1, 1],
            vec![0, 1, 0, 1],
            vec![0, 1, 1, 2],
            vec![0, 0, 0, 1],
        ];
        assert_eq!(entries_grid(&a), expected);
    }

    // Golden: the 9x4 two-node matrix with edge-dependent reciprocation.
    #[test]
    fn golden_two_node_edge_matrix() {
        let a = full(2, ReciprocationVariant::EdgeDependent);
        let expected = vec![
            vec![1, 1, 1, 1],
            vec![0, 1, 0, 1],
            vec![0, 0, 1, 1],
            vec![0, 0, 1, 1],
            vec![0, 1, 0, 1],
            vec![0, 1, 1, 2],
            vec![0, 0, 0, 1],
            vec![0, 0, 0, 1],
            vec![0, 0, 0, 1],
        ];
        assert_eq!(entries_grid(&a), expected);
    }

    // Golden: the 11x9 simplified three-node matrix with edge-dependent
    // reciprocation.
    #[test]
    fn golden_three_node_edge_simplified() {
        let a =
            DesignMatrix::build(3, ReciprocationVariant::EdgeDependent, MatrixForm::Simplified)
                .unwrap();
        let expected = vec![
            vec![1, 0, 1, 1, 0, 1, 0, 0, 0],
            vec![0, 1, 1, 0, 0, 0, 1, 0, 1],
            vec![0, 0, 0, 0, 1, 1, 0, 1, 1],
            vec![0, 1, 1, 0, 1, 1, 0, 0, 0],
            vec![1, 0, 1, 0, 0, 0, 0, 1, 1],
            vec![0, 0, 0, 1, 0, 1, 1, 0, 1],
            vec![1, 1, 2, 1, 1, 2, 1, 1, 2],
            vec![0, 0, 1, 0, 0, 1, 0, 0, 1],
            vec![0, 0, 1, 0, 0, 1, 0, 0, 0],
            vec![0, 0, 1, 0, 0, 0, 0, 0, 1],
            vec![0, 0, 0, 0, 0, 1, 0, 0, 1],
        ];
        assert_eq!(entries_grid(&a), expected);
    }

    // Golden: the 5x3 simplified two-node matrix with zero reciprocation.
    #[test]
    fn golden_two_node_zero_simplified() {
        let a = DesignMatrix::build(2, ReciprocationVariant::Zero, MatrixForm::Simplified).unwrap();
        let expected = vec![
            vec![1, 0, 1],
            vec![0, 1, 1],
            vec![0, 1, 1],
            vec![1, 0, 1],
            vec![1, 1, 2],
        ];
        assert_eq!(entries_grid(&a), expected);
    }

    // Golden: the common submatrix for n = 3 equals the printed 6x6 incidence
    // matrix (its published column order groups the two directions of each
    // dyad together, which is exactly our canonical order).
    #[test]
    fn golden_common_submatrix_three_nodes() {
        let a = DesignMatrix::common(3).unwrap();
        let expected = vec![
            vec![1, 0, 1, 0, 0, 0],
            vec![0, 1, 0, 0, 1, 0],
            vec![0, 0, 0, 1, 0, 1],
            vec![0, 1, 0, 1, 0, 0],
            vec![1, 0, 0, 0, 0, 1],
            vec![0, 0, 1, 0, 1, 0],
        ];
        assert_eq!(entries_grid(&a), expected);
    }

    #[test]
    fn common_submatrix_columns_have_two_ones() {
        for n in 2..=6 {
            let a = DesignMatrix::common(n).unwrap();
            for c in 0..a.cols() {
                let col = a.column(c);
                assert_eq!(col.iter().sum::<i64>(), 2);
                assert_eq!(col.iter().filter(|&&v| v == 1).count(), 2);
            }
        }
    }

    #[test]
    fn rejects_fewer_than_two_nodes() {
        assert!(DesignMatrix::build(1, ReciprocationVariant::Zero, MatrixForm::Full).is_err());
        assert!(DesignMatrix::common(0).is_err());
    }

    #[test]
    fn full_null_columns_are_lambda_indicators() {
        for n in [2, 3, 4, 5] {
            for v in ReciprocationVariant::ALL {
                let a = full(n, v);
                for (dix, d) in dyads(n).into_iter().enumerate() {
                    let c = a.column_of(d, DyadConfig::Null).unwrap();
                    let col = a.column(c);
                    for (r, &val) in col.iter().enumerate() {
                        let expect = (a.row_labels()[r] == RowLabel::Lambda(d)) as i64;
                        assert_eq!(val, expect, "n={n} {v} col {c} row {r}");
                    }
                    assert_eq!(c, 4 * dix);
                }
            }
        }
    }

    #[test]
    fn mutual_column_identity_with_rho_block() {
        // col(1,1) + col(0,0) - col(1,0) - col(0,1) equals the reciprocation
        // indicator block; exactly zero for the zero variant.
        for n in 2..=6 {
            for v in ReciprocationVariant::ALL {
                let a = full(n, v);
                for d in dyads(n) {
                    let m = a.column(a.column_of(d, DyadConfig::Mutual).unwrap());
                    let z = a.column(a.column_of(d, DyadConfig::Null).unwrap());
                    let o = a.column(a.column_of(d, DyadConfig::Out).unwrap());
                    let i = a.column(a.column_of(d, DyadConfig::In).unwrap());
                    for r in 0..a.rows() {
                        let lhs = m[r] + z[r] - o[r] - i[r];
                        let rhs = match a.row_labels()[r] {
                            RowLabel::Rho => 1,
                            RowLabel::RhoNode(k) if d.contains(k) => 1,
                            _ => 0,
                        };
                        assert_eq!(lhs, rhs, "n={n} {v} dyad {d} row {r}");
                    }
                }
            }
        }
    }

    #[test]
    fn theta_row_is_sum_of_alpha_rows() {
        for n in 2..=6 {
            for v in ReciprocationVariant::ALL {
                for form in [MatrixForm::Full, MatrixForm::Simplified] {
                    let a = DesignMatrix::build(n, v, form).unwrap();
                    let theta_row = a
                        .row_labels()
                        .iter()
                        .position(|l| matches!(l, RowLabel::Theta))
                        .unwrap();
                    let mut sum = vec![0i64; a.cols()];
                    for (r, label) in a.row_labels().iter().enumerate() {
                        if matches!(label, RowLabel::Alpha(_)) {
                            for c in 0..a.cols() {
                                sum[c] += a.entry(r, c);
                            }
                        }
                    }
                    assert_eq!(sum, a.row(theta_row));
                }
            }
        }
    }

    #[test]
    fn empty_network_statistic_is_lambda_block_only() {
        let a = full(3, ReciprocationVariant::Zero);
        let t = sufficient_statistic(&a, &Network::empty(3)).unwrap();
        assert_eq!(t.values, vec![1, 1, 1, 0, 0, 0, 0, 0, 0, 0]);
    }

    // The two printed three-node networks share their margins.
    #[test]
    fn printed_three_cycles_share_statistic() {
        let a = full(3, ReciprocationVariant::Zero);
        let x1 = Network::parse_line("3 01 10 01").unwrap();
        let x2 = Network::parse_line("3 10 01 10").unwrap();
        assert_eq!(
            x1.one_hot(),
            vec![0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 1, 0],
            "first printed fiber member"
        );
        assert_eq!(
            x2.one_hot(),
            vec![0, 1, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0],
            "second printed fiber member"
        );
        let t1 = sufficient_statistic(&a, &x1).unwrap();
        let t2 = sufficient_statistic(&a, &x2).unwrap();
        assert_eq!(t1, t2);
        // lambda block all ones, degrees all one, six edge endpoints
        assert_eq!(t1.values, vec![1, 1, 1, 1, 1, 1, 1, 1, 1, 3]);
    }

    // Derived oracle: an independent dense matrix-vector multiply.
    #[test]
    fn statistic_matches_dense_multiply_oracle() {
        let a = full(4, ReciprocationVariant::EdgeDependent);
        let x = Network::parse_line("4 11 10 00 01 11 10").unwrap();
        let t = sufficient_statistic(&a, &x).unwrap();
        let xs = x.one_hot();
        let mut oracle = vec![0i64; a.rows()];
        for r in 0..a.rows() {
            for c in 0..a.cols() {
                oracle[r] += a.entry(r, c) * xs[c];
            }
        }
        assert_eq!(t.values, oracle);
    }

    #[test]
    fn statistic_is_linear_over_dyads() {
        // computing dyad-by-dyad equals the full product
        let a = full(4, ReciprocationVariant::Constant);
        for ix in [0u128, 17, 4095, 2048] {
            let x = Network::from_index(4, ix);
            let t = sufficient_statistic(&a, &x).unwrap();
            let full_product = a.multiply(&x.one_hot()).unwrap();
            assert_eq!(t.values, full_product);
        }
    }

    #[test]
    fn lambda_block_of_full_statistic_is_all_ones() {
        let a = full(4, ReciprocationVariant::Zero);
        for ix in 0..64u128 {
            let x = Network::from_index(4, ix * 64 + ix);
            let t = sufficient_statistic(&a, &x).unwrap();
            assert!(t.values[..6].iter().all(|&v| v == 1));
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(network_count(2), 4);
        assert_eq!(network_count(3), 64);
        assert_eq!(network_count(4), 4096);
        assert_eq!(enumerate_networks(3).count(), 64);
        assert_eq!(enumerate_networks(2).count(), 4);
    }

    #[test]
    fn enumeration_is_lexicographic_and_splittable() {
        let whole: Vec<Network> = enumerate_networks(3).collect();
        let mut split: Vec<Network> = enumerate_networks_range(3, 0, 20).collect();
        split.extend(enumerate_networks_range(3, 20, 64));
        assert_eq!(whole, split);
        for (ix, x) in whole.iter().enumerate() {
            assert_eq!(x.to_index(), ix as u128);
        }
        // first network is the empty one, last is all-mutual
        assert_eq!(whole[0], Network::empty(3));
        assert!(whole[63]
            .configs()
            .iter()
            .all(|&c| c == DyadConfig::Mutual));
    }

    #[test]
    fn uniform_probabilities_at_zero_parameters() {
        for v in ReciprocationVariant::ALL {
            let a = full(3, v);
            let p = probabilities_from_parameters(&a, &ParameterVector::zeros(&a)).unwrap();
            for x in &p.p {
                assert!((x - 0.25).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn dyad_blocks_sum_to_one() {
        let a = full(4, ReciprocationVariant::EdgeDependent);
        let mut zeta = ParameterVector::zeros(&a);
        for (k, z) in zeta.values.iter_mut().enumerate() {
            *z = ((k * 37 % 11) as f64 - 5.0) * 0.3;
        }
        let p = probabilities_from_parameters(&a, &zeta).unwrap();
        for dix in 0..dyad_count(4) {
            let s: f64 = p.dyad_block(dix).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    // log p - A^T zeta' is constant within each dyad block, where zeta' extends
    // zeta by zeros on the normalizing rows.
    #[test]
    fn log_probabilities_match_linear_form_up_to_dyad_constants() {
        let a = full(3, ReciprocationVariant::Constant);
        let mut zeta = ParameterVector::zeros(&a);
        let vals = [0.3, -0.7, 0.25, 0.9, -0.2, 0.05, 1.1, -0.6];
        for (z, v) in zeta.values.iter_mut().zip(vals) {
            *z = v;
        }
        let p = probabilities_from_parameters(&a, &zeta).unwrap();
        let rows = a.non_lambda_rows();
        for dix in 0..dyad_count(3) {
            let mut consts = Vec::new();
            for k in 0..4 {
                let cix = 4 * dix + k;
                let mut dot = 0.0;
                for (zi, r) in rows.clone().enumerate() {
                    dot += zeta.values[zi] * a.entry(r, cix) as f64;
                }
                consts.push(p.p[cix].ln() - dot);
            }
            for w in consts.windows(2) {
                assert!((w[0] - w[1]).abs() < 1e-12);
            }
        }
    }

    // Parameters that differ by a kernel direction of A^T give identical
    // probabilities (alpha shift +c, beta shift +d, theta shift -c-d).
    #[test]
    fn gauge_shift_leaves_probabilities_unchanged() {
        let a = full(3, ReciprocationVariant::Zero);
        let mut zeta1 = ParameterVector::zeros(&a);
        for (k, z) in zeta1.values.iter_mut().enumerate() {
            *z = 0.1 * (k as f64) - 0.3;
        }
        let mut zeta2 = zeta1.clone();
        let (c, d) = (0.8, -0.45);
        for (zi, r) in a.non_lambda_rows().enumerate() {
            match a.row_labels()[r] {
                RowLabel::Alpha(_) => zeta2.values[zi] += c,
                RowLabel::Beta(_) => zeta2.values[zi] += d,
                RowLabel::Theta => zeta2.values[zi] -= c + d,
                _ => {}
            }
        }
        let p1 = probabilities_from_parameters(&a, &zeta1).unwrap();
        let p2 = probabilities_from_parameters(&a, &zeta2).unwrap();
        for (x, y) in p1.p.iter().zip(&p2.p) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_parameters_rejected() {
        let a = full(2, ReciprocationVariant::Zero);
        let mut zeta = ParameterVector::zeros(&a);
        zeta.values[0] = f64::NAN;
        assert!(probabilities_from_parameters(&a, &zeta).is_err());
    }

    #[test]
    fn matrix_text_round_trip() {
        let a = full(3, ReciprocationVariant::EdgeDependent);
        let text = a.to_text();
        let (rows, cols, entries) = matrix_from_text(&text).unwrap();
        assert_eq!(rows, a.rows());
        assert_eq!(cols, a.cols());
        for r in 0..rows {
            for c in 0..cols {
                assert_eq!(entries[r * cols + c], a.entry(r, c));
            }
        }
    }

    #[test]
    fn network_text_and_adjacency_round_trip() {
        let x = Network::parse_line("4 11 10 00 01 11 10").unwrap();
        assert_eq!(Network::parse_line(&x.to_line()).unwrap(), x);
        let adj = x.to_adjacency();
        assert_eq!(Network::from_adjacency(&adj).unwrap(), x);
        // the printed incidence-matrix parametrization: row sums are
        // out-degrees, column sums in-degrees
        let (outd, ind) = x.degrees();
        for i in 0..4 {
            assert_eq!(outd[i], adj[i].iter().map(|&v| v as i64).sum::<i64>());
            assert_eq!(ind[i], (0..4).map(|r| adj[r][i] as i64).sum::<i64>());
        }
    }
}
