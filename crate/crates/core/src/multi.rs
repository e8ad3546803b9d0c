//! Marginally coupled designs with `n = k m` runs.
//!
//! The sequence part stacks `k` Latin squares. The quantitative part is built
//! block by block from column-permuted copies `F_i` of an `m x m` LHD, with
//! column `j` of block `i` offset by `m * ell_j[i]` so that collapsing `X` to
//! `k` levels reproduces the block structure of `O`.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::design::{r_ave, DesignMeta, QSDesign, QuantDesign, Route, SeqDesign};
use crate::error::{Error, Result};
use crate::glp::{corollary1_design, is_odd_prime, tilde_e};
use crate::optimizer::{ta_minimize_psi, TaConfig};
use crate::single::{
    construct_nm, find_totient_modulus, latin_square_l, rave_by_shift, select_b1, select_b2,
    unsupported_reason, williams_latin_square,
};

/// Independent random streams derived from one root seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    /// Row permutations (or level permutations) of the sequence blocks.
    Sequence = 0,
    /// Column permutations of the base LHD.
    Columns = 1,
    /// The block offsets `ell_j`.
    Offsets = 2,
    Optimizer = 3,
}

pub fn sub_seed(root: u64, stream: Stream) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    let mut out = 0;
    for _ in 0..=stream as usize {
        out = rng.next_u64();
    }
    out
}

fn stream_rng(root: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sub_seed(root, stream))
}

/// A sequence design made of `k` stacked `m x m` Latin squares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockedSeqDesign {
    m: usize,
    blocks: Vec<SeqDesign>,
}

impl BlockedSeqDesign {
    pub fn new(blocks: Vec<SeqDesign>) -> Result<Self> {
        let m = blocks
            .first()
            .map(SeqDesign::m)
            .ok_or_else(|| Error::Dimension("at least one block is required".into()))?;
        for (i, b) in blocks.iter().enumerate() {
            if b.m() != m || !b.is_latin_square() {
                return Err(Error::NotLatinSquare(format!("block {i} is not an {m}x{m} Latin square")));
            }
        }
        Ok(Self { m, blocks })
    }

    pub fn from_stacked(o: &SeqDesign, k: usize) -> Result<Self> {
        let m = o.m();
        if k == 0 || o.n() != k * m {
            return Err(Error::Dimension(format!("{} runs cannot form {k} blocks of {m}", o.n())));
        }
        let blocks = o
            .as_slice()
            .chunks_exact(m * m)
            .map(|c| SeqDesign::new(m, m, c.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(blocks)
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn blocks(&self) -> &[SeqDesign] {
        &self.blocks
    }

    pub fn to_seq(&self) -> SeqDesign {
        SeqDesign::stack(&self.blocks).expect("blocks share m")
    }
}

/// Column-permuted copies of a base LHD together with the block offsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnAssembly {
    m: usize,
    /// `F` as `k` stacked `m x m` blocks, row-major.
    f: Vec<u32>,
    /// `ell[j]` is a permutation of `0..k` giving the offset of column `j` per block.
    ell: Vec<Vec<u32>>,
}

impl ColumnAssembly {
    /// `col_perms[i][j]` is the column of `f0` copied into column `j` of block `i`.
    pub fn new(f0: &QuantDesign, col_perms: &[Vec<usize>], ell: Vec<Vec<u32>>) -> Result<Self> {
        let m = f0.m();
        if f0.n() != m {
            return Err(Error::Dimension(format!("base design is {}x{m}, expected square", f0.n())));
        }
        let k = col_perms.len();
        if k == 0 {
            return Err(Error::Dimension("at least one block is required".into()));
        }
        for (i, perm) in col_perms.iter().enumerate() {
            if !is_permutation(perm, m) {
                return Err(Error::Dimension(format!("column order {i} is not a permutation of 0..{m}")));
            }
        }
        if ell.len() != m {
            return Err(Error::Dimension(format!("expected {m} offset vectors, got {}", ell.len())));
        }
        for (j, l) in ell.iter().enumerate() {
            let as_usize: Vec<usize> = l.iter().map(|&v| v as usize).collect();
            if !is_permutation(&as_usize, k) {
                return Err(Error::Dimension(format!("offsets of column {j} are not a permutation of 0..{k}")));
            }
        }
        let mut f = Vec::with_capacity(k * m * m);
        for perm in col_perms {
            for r in 0..m {
                f.extend(perm.iter().map(|&c| f0.get(r, c)));
            }
        }
        Ok(Self { m, f, ell })
    }

    pub fn k(&self) -> usize {
        self.f.len() / (self.m * self.m)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ell(&self) -> &[Vec<u32>] {
        &self.ell
    }

    pub fn f_block(&self, i: usize) -> QuantDesign {
        let mm = self.m * self.m;
        QuantDesign::new(self.m, self.m, self.f[i * mm..(i + 1) * mm].to_vec()).expect("column permutation of an LHD")
    }

    /// Column `j` of block `i` is `m * ell_j[i] + f_j`.
    pub fn to_quant(&self) -> Result<QuantDesign> {
        let m = self.m;
        let data = self
            .f
            .iter()
            .enumerate()
            .map(|(idx, &v)| {
                let (row, j) = (idx / m, idx % m);
                m as u32 * self.ell[j][row / m] + v
            })
            .collect();
        QuantDesign::new(self.k() * m, m, data)
    }
}

fn is_permutation(v: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    v.len() == n && v.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
}

pub fn assemble(o: &BlockedSeqDesign, columns: &ColumnAssembly, meta: DesignMeta) -> Result<QSDesign> {
    if o.k() != columns.k() || o.m() != columns.m() {
        return Err(Error::Dimension(format!(
            "sequence part has {} blocks of {}, quantitative part {} blocks of {}",
            o.k(),
            o.m(),
            columns.k(),
            columns.m()
        )));
    }
    QSDesign::new(columns.to_quant()?, o.to_seq(), meta)
}

fn random_perm<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

fn random_columns(f0: &QuantDesign, k: usize, seed: u64) -> Result<ColumnAssembly> {
    let m = f0.m();
    let mut cols = stream_rng(seed, Stream::Columns);
    let col_perms: Vec<Vec<usize>> = (0..k).map(|_| random_perm(m, &mut cols)).collect();
    let mut offs = stream_rng(seed, Stream::Offsets);
    let ell = (0..m)
        .map(|_| random_perm(k, &mut offs).into_iter().map(|v| v as u32).collect())
        .collect();
    ColumnAssembly::new(f0, &col_perms, ell)
}

/// Base LHD for the lattice routes: the equidistant design when `2m + 1` is
/// prime, otherwise the leave-one-out design at the selected `b2`.
fn lattice_base(p: u64) -> Result<(QuantDesign, Option<u64>)> {
    let m = p as usize - 1;
    match corollary1_design(m) {
        Ok(e) => Ok((e, None)),
        Err(_) => {
            let b2 = select_b2(p)?.chosen;
            Ok((tilde_e(p, b2)?.to_quant(), Some(b2)))
        }
    }
}

/// Shifts ordered by `(r_ave, b)`.
pub fn ranked_shifts(p: u64) -> Result<Vec<u64>> {
    let values = rave_by_shift(p)?;
    let mut order: Vec<u64> = (0..p).collect();
    order.sort_by(|&a, &b| values[a as usize].cmp(&values[b as usize]).then(a.cmp(&b)));
    Ok(order)
}

/// `n = k m` via the `k` lowest-correlation shifts, each with its rows
/// randomly permuted, for `2 <= k <= m + 1`.
pub fn three_step(p: u64, k: usize, seed: u64) -> Result<QSDesign> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let m = p as usize - 1;
    if k < 2 || k > m + 1 {
        return Err(Error::Config(format!("k = {k} outside 2..={}", m + 1)));
    }
    let shifts: Vec<u64> = ranked_shifts(p)?.into_iter().take(k).collect();
    let mut rows = stream_rng(seed, Stream::Sequence);
    let blocks = shifts
        .iter()
        .map(|&b| tilde_e(p, b)?.to_seq().permute_rows(&random_perm(m, &mut rows)))
        .collect::<Result<Vec<_>>>()?;
    let (f0, b_quant) = lattice_base(p)?;
    let columns = random_columns(&f0, k, seed)?;
    let mut meta = DesignMeta::new(Route::ThreeStep);
    meta.seed = Some(seed);
    meta.params.p = Some(p);
    meta.params.k = Some(k);
    meta.params.b_seq = shifts;
    meta.params.b_quant = b_quant;
    if b_quant.is_none() {
        meta.params.x_source = Some("equidistant".into());
    }
    assemble(&BlockedSeqDesign::new(blocks)?, &columns, meta)
}

/// `n = 2m` from the shift pair `b1*` and `p - b1*`, rows left in place.
pub fn prop2_construct(p: u64, seed: u64) -> Result<QSDesign> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let b1 = select_b1(p)?.chosen;
    let partner = (p - b1) % p;
    let blocks = vec![tilde_e(p, b1)?.to_seq(), tilde_e(p, partner)?.to_seq()];
    let (f0, b_quant) = lattice_base(p)?;
    let columns = random_columns(&f0, 2, seed)?;
    let mut meta = DesignMeta::new(Route::PairedShifts);
    meta.seed = Some(seed);
    meta.params.p = Some(p);
    meta.params.k = Some(2);
    meta.params.b_seq = vec![b1, partner];
    meta.params.b_quant = b_quant;
    if b_quant.is_none() {
        meta.params.x_source = Some("equidistant".into());
    }
    assemble(&BlockedSeqDesign::new(blocks)?, &columns, meta)
}

/// `n = k m` for even `m = phi(N) / 2`: level-permuted Williams squares
/// optimised jointly, with column-permuted copies of the totient square.
pub fn general_km(m: usize, k: usize, cfg: &TaConfig, seed: u64) -> Result<QSDesign> {
    if k < 2 {
        return Err(Error::Config(format!("k = {k} must be at least 2")));
    }
    let (x0, t) = latin_square_l(m)?;
    let base = williams_latin_square(m)?;
    let mut levels = stream_rng(seed, Stream::Sequence);
    let init = (0..k)
        .map(|_| {
            let map: Vec<u32> = random_perm(m, &mut levels).into_iter().map(|v| v as u32 + 1).collect();
            base.relabel(&map)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut opt = stream_rng(seed, Stream::Optimizer);
    let (o, _) = ta_minimize_psi(&BlockedSeqDesign::new(init)?, cfg, &mut opt)?;
    let columns = random_columns(&x0, k, seed)?;
    let mut meta = DesignMeta::new(Route::GeneralBlocks);
    meta.seed = Some(seed);
    meta.params.k = Some(k);
    meta.params.modulus = Some(t.modulus);
    assemble(&o, &columns, meta)
}

/// The construction `generate` would use for `(n, m)`.
pub fn route_for(n: usize, m: usize) -> Result<Route> {
    if m == 0 || n == 0 {
        return Err(Error::Dimension(format!("n = {n} and m = {m} must be positive")));
    }
    if !n.is_multiple_of(m) {
        return Err(Error::NotMultiple { n, m });
    }
    let k = n / m;
    let lattice = m >= 2 && is_odd_prime(m as u64 + 1);
    let totient = m.is_multiple_of(2) && find_totient_modulus(m).is_ok();
    let route = match k {
        1 => match unsupported_reason(m) {
            None if lattice => Some(Route::GlpPair),
            None => Some(Route::TotientLatin),
            Some(_) => None,
        },
        2 if lattice => Some(Route::PairedShifts),
        _ if lattice && k <= m + 1 => Some(Route::ThreeStep),
        _ if totient => Some(Route::GeneralBlocks),
        _ => None,
    };
    route.ok_or_else(|| {
        let sizes = supported_runs(m, (m + 1) * m);
        let listed = if sizes.is_empty() {
            "none".to_string()
        } else {
            sizes.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        };
        let tail = if totient { ", ..." } else { "" };
        Error::Unsupported(format!(
            "no construction for n = {n}, m = {m}; supported n for this m: {listed}{tail}"
        ))
    })
}

/// Run sizes `n <= max_n` that `generate` supports for `m`.
pub fn supported_runs(m: usize, max_n: usize) -> Vec<usize> {
    if m == 0 {
        return Vec::new();
    }
    (1..=max_n / m)
        .map(|k| k * m)
        .filter(|&n| {
            let lattice = m >= 2 && is_odd_prime(m as u64 + 1);
            let k = n / m;
            match k {
                1 => unsupported_reason(m).is_none(),
                _ if lattice && k <= m + 1 => true,
                _ => m.is_multiple_of(2) && find_totient_modulus(m).is_ok(),
            }
        })
        .collect()
}

/// Builds a design for any supported `(n, m)`.
pub fn generate(n: usize, m: usize, cfg: &TaConfig, seed: u64) -> Result<QSDesign> {
    let route = route_for(n, m)?;
    let k = n / m;
    let p = m as u64 + 1;
    match route {
        Route::GlpPair | Route::TotientLatin => construct_nm(m, cfg, seed),
        Route::PairedShifts => prop2_construct(p, seed),
        Route::ThreeStep => three_step(p, k, seed),
        Route::GeneralBlocks => general_km(m, k, cfg, seed),
        Route::Competitor | Route::External => unreachable!("not produced by route_for"),
    }
}

/// Average correlation of a stack bounded by the mean over its blocks.
pub fn block_rave_mean(o: &BlockedSeqDesign) -> Result<f64> {
    let total: f64 = o
        .blocks()
        .iter()
        .map(|b| r_ave(b).map(|r| r.value))
        .sum::<Result<f64>>()?;
    Ok(total / o.k() as f64)
}
