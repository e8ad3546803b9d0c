//! Design types and the exact evaluation of every criterion used to rank
//! quantitative-sequence designs: maximin L1/L2 distances of the quantitative
//! part, Hamming distance, adjacent pair counts and average absolute column
//! correlation of the sequence part, the distance upper bounds, and the
//! marginally coupled structure of the pair.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn is_permutation_of_one_to(values: impl Iterator<Item = u32>, size: usize) -> bool {
    let mut seen = vec![false; size + 1];
    let mut count = 0;
    for v in values {
        let v = v as usize;
        if v == 0 || v > size || seen[v] {
            return false;
        }
        seen[v] = true;
        count += 1;
    }
    count == size
}

/// Quantitative part `X`: an `n x m` Latin hypercube on levels `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuantDesign {
    n: usize,
    m: usize,
    data: Vec<u32>,
}

impl QuantDesign {
    pub fn new(n: usize, m: usize, data: Vec<u32>) -> Result<Self> {
        if n == 0 || m == 0 || data.len() != n * m {
            return Err(Error::Dimension(format!(
                "expected {n}x{m} = {} entries, got {}",
                n * m,
                data.len()
            )));
        }
        for j in 0..m {
            let column = (0..n).map(|i| data[i * m + j]);
            if !is_permutation_of_one_to(column, n) {
                return Err(Error::NotLatinHypercube { column: j, levels: n });
            }
        }
        Ok(Self { n, m, data })
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let (n, m, data) = flatten(rows)?;
        Self::new(n, m, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks_exact(self.m)
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.rows().map(<[u32]>::to_vec).collect()
    }
}

/// Sequence part `O`: `n` runs, each a permutation of the components `1..=m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeqDesign {
    n: usize,
    m: usize,
    data: Vec<u32>,
}

impl SeqDesign {
    pub fn new(n: usize, m: usize, data: Vec<u32>) -> Result<Self> {
        if n == 0 || m == 0 || data.len() != n * m {
            return Err(Error::Dimension(format!(
                "expected {n}x{m} = {} entries, got {}",
                n * m,
                data.len()
            )));
        }
        for (i, row) in data.chunks_exact(m).enumerate() {
            if !is_permutation_of_one_to(row.iter().copied(), m) {
                return Err(Error::NotSequence { row: i, components: m });
            }
        }
        Ok(Self { n, m, data })
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let (n, m, data) = flatten(rows)?;
        Self::new(n, m, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks_exact(self.m)
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.rows().map(<[u32]>::to_vec).collect()
    }

    /// True when `n == m` and every column is also a permutation.
    pub fn is_latin_square(&self) -> bool {
        self.n == self.m
            && (0..self.m).all(|j| is_permutation_of_one_to((0..self.n).map(|i| self.get(i, j)), self.m))
    }

    /// Relabels every entry through `map`, where `map[level - 1]` is the new level.
    pub fn relabel(&self, map: &[u32]) -> Result<Self> {
        if !is_permutation_of_one_to(map.iter().copied(), self.m) {
            return Err(Error::Dimension(format!(
                "level map must be a permutation of 1..={}",
                self.m
            )));
        }
        let data = self.data.iter().map(|&v| map[v as usize - 1]).collect();
        Ok(Self {
            n: self.n,
            m: self.m,
            data,
        })
    }

    /// Reorders runs so that run `i` of the result is run `order[i]` of `self`.
    pub fn permute_rows(&self, order: &[usize]) -> Result<Self> {
        let data = permute_rows(&self.data, self.n, self.m, order)?;
        Ok(Self {
            n: self.n,
            m: self.m,
            data,
        })
    }

    /// Row-wise juxtaposition of designs with a common component count.
    pub fn stack(parts: &[SeqDesign]) -> Result<Self> {
        let m = parts
            .first()
            .map(|p| p.m)
            .ok_or_else(|| Error::Dimension("cannot stack zero designs".into()))?;
        if parts.iter().any(|p| p.m != m) {
            return Err(Error::Dimension("stacked designs differ in m".into()));
        }
        let n = parts.iter().map(|p| p.n).sum();
        let data = parts.iter().flat_map(|p| p.data.iter().copied()).collect();
        Ok(Self { n, m, data })
    }
}

fn flatten(rows: &[Vec<u32>]) -> Result<(usize, usize, Vec<u32>)> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
        return Err(Error::Dimension(format!(
            "row {i} has {} entries, expected {m}",
            r.len()
        )));
    }
    Ok((n, m, rows.concat()))
}

pub(crate) fn permute_rows(data: &[u32], n: usize, m: usize, order: &[usize]) -> Result<Vec<u32>> {
    if order.len() != n || !is_permutation_of_one_to(order.iter().map(|&i| i as u32 + 1), n) {
        return Err(Error::Dimension(format!(
            "row order must be a permutation of 0..{n}"
        )));
    }
    Ok(order
        .iter()
        .flat_map(|&i| data[i * m..(i + 1) * m].iter().copied())
        .collect())
}

/// How a design was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// `n = m = p - 1`: both parts are leave-one-out Williams-transformed
    /// lattice designs (or the modified-Williams equidistant design for `X`).
    GlpPair,
    /// `n = m` via a totient modulus: `X` from the multiplicative Latin
    /// square, `O` a level-permuted Williams Latin square.
    TotientLatin,
    /// `n = 2m`: the two mirrored leave-one-out squares `b` and `p - b`.
    PairedShifts,
    /// `n = km`, `m + 1` prime: the `k` lowest-correlation shifts.
    ThreeStep,
    /// `n = km` with level-permuted Williams squares.
    GeneralBlocks,
    /// The first `m` rows of the lattice set for both parts.
    Competitor,
    /// Read from a file without provenance.
    External,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Route::GlpPair => "glp-pair",
            Route::TotientLatin => "totient-latin",
            Route::PairedShifts => "paired-shifts",
            Route::ThreeStep => "three-step",
            Route::GeneralBlocks => "general-blocks",
            Route::Competitor => "competitor",
            Route::External => "external",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "glp-pair" => Route::GlpPair,
            "totient-latin" => Route::TotientLatin,
            "paired-shifts" => Route::PairedShifts,
            "three-step" => Route::ThreeStep,
            "general-blocks" => Route::GeneralBlocks,
            "competitor" => Route::Competitor,
            "external" => Route::External,
            other => return Err(Error::Config(format!("unknown route {other:?}"))),
        })
    }
}

/// Construction parameters recorded alongside a design.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Shifts used for the sequence part.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b_seq: Vec<u64>,
    /// Shift used for the quantitative part, when it is a shifted design.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_quant: Option<u64>,
    /// Totient modulus `N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_source: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignMeta {
    pub route: Route,
    pub seed: Option<u64>,
    pub params: DesignParams,
}

impl DesignMeta {
    pub fn new(route: Route) -> Self {
        Self {
            route,
            seed: None,
            params: DesignParams::default(),
        }
    }
}

/// A quantitative-sequence design `D = (X, O)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSDesign {
    x: QuantDesign,
    o: SeqDesign,
    pub meta: DesignMeta,
}

impl QSDesign {
    pub fn new(x: QuantDesign, o: SeqDesign, meta: DesignMeta) -> Result<Self> {
        if x.n() != o.n() || x.m() != o.m() {
            return Err(Error::Dimension(format!(
                "X is {}x{} but O is {}x{}",
                x.n(),
                x.m(),
                o.n(),
                o.m()
            )));
        }
        Ok(Self { x, o, meta })
    }

    pub fn x(&self) -> &QuantDesign {
        &self.x
    }

    pub fn o(&self) -> &SeqDesign {
        &self.o
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    pub fn m(&self) -> usize {
        self.x.m()
    }
}

fn min_over_pairs<T: Copy, F>(rows: &[&[T]], dist: F) -> Result<u64>
where
    F: Fn(&[T], &[T]) -> u64,
{
    if rows.len() < 2 {
        return Err(Error::TooFewRuns);
    }
    let mut best = u64::MAX;
    for i in 1..rows.len() {
        for j in 0..i {
            best = best.min(dist(rows[i], rows[j]));
        }
    }
    Ok(best)
}

pub fn l1_between(a: &[u32], b: &[u32]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| u64::from(x.abs_diff(y)))
        .sum()
}

pub fn l2_sq_between(a: &[u32], b: &[u32]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = u64::from(x.abs_diff(y));
            d * d
        })
        .sum()
}

pub fn hamming_between(a: &[u32], b: &[u32]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// Minimum pairwise L1 distance between runs of `X`.
pub fn l1_distance(x: &QuantDesign) -> Result<u64> {
    let rows: Vec<&[u32]> = x.rows().collect();
    min_over_pairs(&rows, l1_between)
}

/// Minimum pairwise squared Euclidean distance between runs of `X`.
pub fn l2_distance_sq(x: &QuantDesign) -> Result<u64> {
    let rows: Vec<&[u32]> = x.rows().collect();
    min_over_pairs(&rows, l2_sq_between)
}

/// Minimum pairwise Hamming distance between runs of `O`.
pub fn hamming_distance(o: &SeqDesign) -> Result<u64> {
    let rows: Vec<&[u32]> = o.rows().collect();
    min_over_pairs(&rows, hamming_between)
}

/// Number of unordered run pairs of `O` at exactly Hamming distance `d`.
pub fn hamming_pairs_at(o: &SeqDesign, d: u64) -> usize {
    let mut count = 0;
    for i in 1..o.n() {
        for j in 0..i {
            if hamming_between(o.row(i), o.row(j)) == d {
                count += 1;
            }
        }
    }
    count
}

/// Average absolute Pearson correlation between distinct columns.
///
/// `exact` is present whenever all columns share the same sum and sum of
/// squares, which holds for every design assembled from Latin squares; the
/// common variance then cancels and the average is rational.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AvgCorrelation {
    pub exact: Option<Ratio<i128>>,
    pub value: f64,
}

impl AvgCorrelation {
    fn from_exact(r: Ratio<i128>) -> Self {
        Self {
            exact: Some(r),
            value: ratio_to_f64(r),
        }
    }
}

impl fmt::Display for AvgCorrelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3}", self.value)
    }
}

pub fn ratio_to_f64(r: Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Cross-product matrix `S[u][v] = sum_i o_iu * o_iv` (row-major `m x m`).
pub(crate) fn cross_products(data: &[u32], n: usize, m: usize) -> Vec<i64> {
    let mut s = vec![0i64; m * m];
    for row in data.chunks_exact(m).take(n) {
        for u in 0..m {
            let a = i64::from(row[u]);
            let su = &mut s[u * m..(u + 1) * m];
            for (v, &b) in row.iter().enumerate() {
                su[v] += a * i64::from(b);
            }
        }
    }
    s
}

pub fn r_ave(o: &SeqDesign) -> Result<AvgCorrelation> {
    let (n, m) = (o.n(), o.m());
    if n < 2 || m < 2 {
        return Err(Error::TooFewRuns);
    }
    let sums: Vec<i64> = (0..m)
        .map(|j| (0..n).map(|i| i64::from(o.get(i, j))).sum())
        .collect();
    let s = cross_products(o.as_slice(), n, m);
    let n_i = n as i64;
    let centered_ss: Vec<i64> = (0..m).map(|j| n_i * s[j * m + j] - sums[j] * sums[j]).collect();
    if let Some(j) = centered_ss.iter().position(|&v| v == 0) {
        return Err(Error::ZeroVariance(j));
    }

    let shared = sums.iter().all(|&v| v == sums[0]) && centered_ss.iter().all(|&v| v == centered_ss[0]);
    if shared {
        let mut total: i128 = 0;
        for u in 0..m {
            for v in 0..m {
                if u != v {
                    total += i128::from((n_i * s[u * m + v] - sums[u] * sums[v]).abs());
                }
            }
        }
        let denom = i128::from(centered_ss[0]) * (m * (m - 1)) as i128;
        return Ok(AvgCorrelation::from_exact(Ratio::new(total, denom)));
    }

    let mut total = 0.0;
    for u in 0..m {
        for v in 0..m {
            if u != v {
                let cov = (n_i * s[u * m + v] - sums[u] * sums[v]) as f64;
                total += (cov / ((centered_ss[u] as f64) * (centered_ss[v] as f64)).sqrt()).abs();
            }
        }
    }
    Ok(AvgCorrelation {
        exact: None,
        value: total / (m * (m - 1)) as f64,
    })
}

/// Counts `t[i][j]` of the adjacent sub-sequence "i, j" over all runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCounts {
    m: usize,
    t: Vec<u64>,
}

impl PairCounts {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Count for components `i` then `j`, both 1-based.
    pub fn get(&self, i: u32, j: u32) -> u64 {
        self.t[(i as usize - 1) * self.m + (j as usize - 1)]
    }

    pub fn total(&self) -> u64 {
        self.t.iter().sum()
    }

    pub fn off_diagonal(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        let m = self.m as u32;
        (1..=m)
            .flat_map(move |i| (1..=m).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| (i, j, self.get(i, j)))
    }

    /// The common count when all ordered pairs appear equally often.
    pub fn balanced_value(&self) -> Option<u64> {
        let mut it = self.off_diagonal().map(|(_, _, c)| c);
        let first = it.next()?;
        it.all(|c| c == first).then_some(first)
    }

    pub fn is_balanced(&self) -> bool {
        self.m < 2 || self.balanced_value().is_some()
    }
}

pub fn pair_counts(o: &SeqDesign) -> PairCounts {
    let m = o.m();
    let mut t = vec![0u64; m * m];
    for row in o.rows() {
        for w in row.windows(2) {
            t[(w[0] as usize - 1) * m + (w[1] as usize - 1)] += 1;
        }
    }
    PairCounts { m, t }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub d1_upper: u64,
    pub d2sq_upper: u64,
    pub dh_upper: u64,
}

/// Upper bounds on `d1`, squared `d2` and Hamming distance for `n` runs, `m` factors.
pub fn bounds(n: usize, m: usize) -> Bounds {
    let (n, m) = (n as u64, m as u64);
    Bounds {
        d1_upper: (n + 1) * m / 3,
        d2sq_upper: n * (n + 1) * m / 6,
        dh_upper: if n <= m { m } else { m.saturating_sub(1) },
    }
}

/// Tighter `(d1, d2^2)` bounds for marginally coupled designs with `n = 2m`.
pub fn n2m_bounds(m: usize) -> (u64, u64) {
    let m = m as u64;
    ((m + 1) * m / 3, m * m * (m + 1) / 6)
}

/// First violation found by the marginal-coupling check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum McdViolation {
    /// A column of `X` is not a permutation of `1..=n`.
    NotLhd { x_column: usize },
    /// Level `level` appears `count != k` times in column `o_column` of `O`.
    LevelCount {
        o_column: usize,
        level: u32,
        count: usize,
    },
    /// The `X` rows under (`o_column`, `level`) repeat a collapsed level in `x_column`.
    CollapsedRepeat {
        o_column: usize,
        level: u32,
        x_column: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McdCheck {
    pub coupled: bool,
    pub violation: Option<McdViolation>,
}

/// Direct check of the marginally coupled structure: for every column of `O`
/// and every component, the `k = n / m` runs carrying it must hit each
/// collapsed level `ceil(x / m)` exactly once in every column of `X`.
pub fn marginal_coupling(d: &QSDesign) -> Result<McdCheck> {
    let (n, m) = (d.n(), d.m());
    if n % m != 0 {
        return Err(Error::NotMultiple { n, m });
    }
    let k = n / m;
    let fail = |v| Ok(McdCheck {
        coupled: false,
        violation: Some(v),
    });
    for j in 0..m {
        if !is_permutation_of_one_to((0..n).map(|i| d.x().get(i, j)), n) {
            return fail(McdViolation::NotLhd { x_column: j });
        }
    }
    let mut runs: Vec<Vec<usize>> = vec![Vec::with_capacity(k); m + 1];
    for c in 0..m {
        runs.iter_mut().for_each(Vec::clear);
        for i in 0..n {
            runs[d.o().get(i, c) as usize].push(i);
        }
        for level in 1..=m {
            let rows = &runs[level];
            if rows.len() != k {
                return fail(McdViolation::LevelCount {
                    o_column: c,
                    level: level as u32,
                    count: rows.len(),
                });
            }
            for xj in 0..m {
                let mut seen = vec![false; k];
                for &i in rows {
                    let collapsed = (d.x().get(i, xj) as usize - 1) / m;
                    if std::mem::replace(&mut seen[collapsed], true) {
                        return fail(McdViolation::CollapsedRepeat {
                            o_column: c,
                            level: level as u32,
                            x_column: xj,
                        });
                    }
                }
            }
        }
    }
    Ok(McdCheck {
        coupled: true,
        violation: None,
    })
}

pub fn is_marginally_coupled(d: &QSDesign) -> Result<bool> {
    marginal_coupling(d).map(|c| c.coupled)
}

/// Structural form of the coupling check: for every column of `X`, grouping
/// runs by collapsed level must split `O` into `k` Latin squares.
pub fn latin_block_structure(d: &QSDesign) -> Result<bool> {
    let (n, m) = (d.n(), d.m());
    if n % m != 0 {
        return Err(Error::NotMultiple { n, m });
    }
    let k = n / m;
    for xj in 0..m {
        let mut blocks: Vec<Vec<u32>> = vec![Vec::with_capacity(m * m); k];
        for i in 0..n {
            let b = (d.x().get(i, xj) as usize - 1) / m;
            blocks[b].extend_from_slice(d.o().row(i));
        }
        for block in blocks {
            if block.len() != m * m {
                return Ok(false);
            }
            let sq = SeqDesign::new(m, m, block)?;
            if !sq.is_latin_square() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every criterion, bound and structural flag for one design.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub n: usize,
    pub m: usize,
    pub d1: u64,
    pub d2sq: u64,
    pub dh: u64,
    pub r_ave: AvgCorrelation,
    pub pair_counts: PairCounts,
    pub bounds: Bounds,
    /// `n = 2m` coupled-design bounds, present when their preconditions hold.
    pub coupled_bounds: Option<(u64, u64)>,
    pub is_lhd: bool,
    pub is_pair_balanced: bool,
    pub is_marginally_coupled: bool,
}

impl MetricsReport {
    pub fn d1_ratio(&self) -> f64 {
        let upper = self.coupled_bounds.map_or(self.bounds.d1_upper, |b| b.0);
        self.d1 as f64 / upper as f64
    }

    pub fn d2_ratio(&self) -> f64 {
        let upper = self.coupled_bounds.map_or(self.bounds.d2sq_upper, |b| b.1);
        (self.d2sq as f64 / upper as f64).sqrt()
    }
}

pub fn evaluate(d: &QSDesign) -> Result<MetricsReport> {
    let (n, m) = (d.n(), d.m());
    let d1 = l1_distance(d.x())?;
    let d2sq = l2_distance_sq(d.x())?;
    let dh = hamming_distance(d.o())?;
    let r = r_ave(d.o())?;
    let t = pair_counts(d.o());
    let mcd = n % m == 0 && is_marginally_coupled(d)?;
    let coupled_bounds = (mcd
        && n == 2 * m
        && m >= 2
        && dh + 2 >= m as u64
        && 2 * hamming_pairs_at(d.o(), m as u64 - 2) < m * m)
        .then(|| n2m_bounds(m));
    Ok(MetricsReport {
        n,
        m,
        d1,
        d2sq,
        dh,
        r_ave: r,
        is_pair_balanced: t.is_balanced(),
        pair_counts: t,
        bounds: bounds(n, m),
        coupled_bounds,
        is_lhd: true,
        is_marginally_coupled: mcd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn table5() -> QSDesign {
        let x = QuantDesign::from_rows(&[
            vec![1, 2, 3, 4, 5, 6],
            vec![2, 4, 6, 5, 3, 1],
            vec![3, 6, 4, 1, 2, 5],
            vec![4, 5, 1, 3, 6, 2],
            vec![5, 3, 2, 6, 1, 4],
            vec![6, 1, 5, 2, 4, 3],
        ])
        .unwrap();
        let o = SeqDesign::from_rows(&[
            vec![4, 6, 5, 3, 2, 1],
            vec![6, 3, 1, 4, 5, 2],
            vec![5, 1, 6, 2, 4, 3],
            vec![3, 4, 2, 6, 1, 5],
            vec![2, 5, 4, 1, 3, 6],
            vec![1, 2, 3, 5, 6, 4],
        ])
        .unwrap();
        QSDesign::new(x, o, DesignMeta::new(Route::External)).unwrap()
    }

    #[test]
    fn table5_metrics() {
        let d = table5();
        let r = evaluate(&d).unwrap();
        assert_eq!((r.d1, r.d2sq, r.dh), (14, 40, 6));
        assert_eq!(r.r_ave.exact, Some(Ratio::new(1, 5)));
        assert_eq!(r.pair_counts.balanced_value(), Some(1));
        assert_eq!(r.bounds, Bounds { d1_upper: 14, d2sq_upper: 42, dh_upper: 6 });
        assert!(r.is_marginally_coupled);
    }

    #[test]
    fn two_run_hand_cases() {
        let x = QuantDesign::from_rows(&[vec![1, 2], vec![2, 1]]).unwrap();
        assert_eq!(l1_distance(&x).unwrap(), 2);
        assert_eq!(l2_distance_sq(&x).unwrap(), 2);
        let o = SeqDesign::from_rows(&[vec![1, 2], vec![1, 2]]).unwrap();
        assert_eq!(hamming_distance(&o).unwrap(), 0);
    }

    #[test]
    fn single_run_is_rejected() {
        let x = QuantDesign::from_rows(&[vec![1, 1]]).unwrap();
        assert_eq!(l1_distance(&x), Err(Error::TooFewRuns));
        let o = SeqDesign::from_rows(&[vec![2, 1]]).unwrap();
        assert_eq!(hamming_distance(&o), Err(Error::TooFewRuns));
    }

    #[test]
    fn reversed_columns_are_perfectly_anticorrelated() {
        let o = SeqDesign::from_rows(&[vec![1, 2], vec![2, 1]]).unwrap();
        assert_eq!(r_ave(&o).unwrap().exact, Some(Ratio::from_integer(1)));
    }

    #[test]
    fn constant_column_has_zero_variance() {
        let o = SeqDesign::from_rows(&[vec![1, 2], vec![1, 2]]).unwrap();
        assert_eq!(r_ave(&o), Err(Error::ZeroVariance(0)));
    }

    #[test]
    fn unequal_moments_fall_back_to_floating_point() {
        let o = SeqDesign::from_rows(&[vec![1, 2, 3], vec![1, 3, 2], vec![2, 1, 3]]).unwrap();
        let r = r_ave(&o).unwrap();
        assert!(r.exact.is_none());
        assert!(r.value > 0.0 && r.value <= 1.0);
    }

    #[test]
    fn single_row_pair_counts() {
        let o = SeqDesign::from_rows(&[vec![1, 2, 3]]).unwrap();
        let t = pair_counts(&o);
        assert_eq!(t.get(1, 2), 1);
        assert_eq!(t.get(2, 3), 1);
        assert_eq!(t.total(), 2);
        assert_eq!(t.get(2, 1) + t.get(1, 3) + t.get(3, 1) + t.get(3, 2), 0);
    }

    #[test]
    fn pair_balance_example() {
        // c1..c4 designs compared by their adjacent pairs.
        let cyclic = SeqDesign::from_rows(&[
            vec![1, 2, 3, 4],
            vec![2, 3, 4, 1],
            vec![3, 4, 1, 2],
            vec![4, 1, 2, 3],
        ])
        .unwrap();
        let t = pair_counts(&cyclic);
        assert_eq!(t.get(1, 2), 3);
        assert_eq!(t.get(1, 3), 0);
        assert!(!t.is_balanced());

        let balanced = SeqDesign::from_rows(&[
            vec![1, 2, 3, 4],
            vec![2, 4, 1, 3],
            vec![3, 1, 4, 2],
            vec![4, 3, 2, 1],
        ])
        .unwrap();
        assert_eq!(pair_counts(&balanced).balanced_value(), Some(1));
    }

    #[test]
    fn bound_values() {
        assert_eq!(bounds(6, 6), Bounds { d1_upper: 14, d2sq_upper: 42, dh_upper: 6 });
        // A single component admits one sequence, so two runs coincide.
        assert_eq!(bounds(2, 1), Bounds { d1_upper: 1, d2sq_upper: 1, dh_upper: 0 });
        // (13*6/3, 12*13*6/6, m - 1)
        assert_eq!(bounds(12, 6), Bounds { d1_upper: 26, d2sq_upper: 156, dh_upper: 5 });
        assert_eq!(n2m_bounds(6), (14, 42));
        assert_eq!(n2m_bounds(2), (2, 2));
        assert_eq!(n2m_bounds(8), (24, 96));
    }

    #[test]
    fn latin_square_is_coupled_for_any_lhd() {
        let d = table5();
        let x = QuantDesign::from_rows(&[
            vec![6, 1, 1, 1, 1, 1],
            vec![5, 2, 2, 2, 2, 2],
            vec![4, 3, 3, 3, 3, 3],
            vec![3, 4, 4, 4, 4, 4],
            vec![2, 5, 5, 5, 5, 5],
            vec![1, 6, 6, 6, 6, 6],
        ])
        .unwrap();
        let d2 = QSDesign::new(x, d.o().clone(), d.meta.clone()).unwrap();
        assert!(is_marginally_coupled(&d2).unwrap());
        assert!(latin_block_structure(&d2).unwrap());
    }

    #[test]
    fn non_multiple_is_rejected() {
        let x = QuantDesign::from_rows(&[vec![1, 2], vec![2, 1], vec![3, 3]]).unwrap();
        let o = SeqDesign::from_rows(&[vec![1, 2], vec![2, 1], vec![1, 2]]).unwrap();
        let d = QSDesign::new(x, o, DesignMeta::new(Route::External)).unwrap();
        assert_eq!(is_marginally_coupled(&d), Err(Error::NotMultiple { n: 3, m: 2 }));
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(matches!(
            QuantDesign::from_rows(&[vec![1, 2], vec![1, 1]]),
            Err(Error::NotLatinHypercube { column: 0, levels: 2 })
        ));
        assert!(matches!(
            SeqDesign::from_rows(&[vec![1, 1]]),
            Err(Error::NotSequence { row: 0, .. })
        ));
        assert!(SeqDesign::from_rows(&[vec![1, 2], vec![1]]).is_err());
    }
}
