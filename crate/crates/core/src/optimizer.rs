//! Threshold-accepting search over level permutations of sequence designs.
//!
//! Swapping two levels everywhere in a Latin square keeps it a Latin square
//! with the same Hamming distance and pair balance, so the search only moves
//! the correlation structure. Each move touches exactly two cells per run,
//! which lets [`SwapState`] update the cross-product matrix and the pairwise
//! Hamming distances incrementally instead of re-evaluating the design.
//!
//! Objectives are compared exactly: both `r_ave` and the weighted criterion
//! share a constant denominator for a fixed design size, so the relative
//! acceptance test `new < (1 + T) * current` reduces to integer arithmetic on
//! numerators with the threshold factor decoded as a dyadic rational.

use num_rational::Ratio;
use rand::Rng;

use crate::design::{cross_products, SeqDesign};
use crate::error::{Error, Result};
use crate::multi::BlockedSeqDesign;

#[derive(Clone, Debug, PartialEq)]
pub struct TaConfig {
    /// Outer iterations `I`.
    pub outer: usize,
    /// Inner iterations `J` per threshold level.
    pub inner: usize,
    /// Initial relative threshold `T_1`.
    pub t_initial: f64,
    /// Final relative threshold `T_tau`.
    pub t_final: f64,
    /// Weight on `r_ave` in the blocked criterion; the Hamming term gets `1 - w`.
    pub weight: Ratio<i64>,
}

impl Default for TaConfig {
    fn default() -> Self {
        Self {
            outer: 100,
            inner: 100,
            t_initial: 0.05,
            t_final: 1e-6,
            weight: Ratio::new(1, 2),
        }
    }
}

impl TaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.outer == 0 || self.inner == 0 {
            return Err(Error::Config("outer and inner iterations must be at least 1".into()));
        }
        if !(self.t_final > 0.0 && self.t_final <= self.t_initial && self.t_initial.is_finite()) {
            return Err(Error::Config(format!(
                "thresholds must satisfy 0 < t_final <= t_initial (got {} and {})",
                self.t_final, self.t_initial
            )));
        }
        let zero = Ratio::from_integer(0);
        let one = Ratio::from_integer(1);
        if self.weight < zero || self.weight > one {
            return Err(Error::Config("weight must lie in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn iterations(&self) -> usize {
        self.outer * self.inner
    }
}

/// Thresholds `T_1..T_tau`: `inner` copies of each of `T_1, g T_1, g^2 T_1, ...`
/// with `g = (T_tau / T_1)^(1 / (I - 1))`.
pub fn threshold_schedule(cfg: &TaConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let gamma = if cfg.outer > 1 {
        (cfg.t_final / cfg.t_initial).powf(1.0 / (cfg.outer - 1) as f64)
    } else {
        1.0
    };
    let mut out = Vec::with_capacity(cfg.iterations());
    let mut t = cfg.t_initial;
    for level in 0..cfg.outer {
        if level + 1 == cfg.outer && cfg.outer > 1 {
            t = cfg.t_final;
        }
        out.extend(std::iter::repeat_n(t, cfg.inner));
        t *= gamma;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaTrace {
    /// Best objective after each outer iteration.
    pub best_per_outer: Vec<Ratio<i128>>,
    pub accepted: usize,
    pub iterations: usize,
    pub initial_objective: Ratio<i128>,
    pub final_objective: Ratio<i128>,
}

/// `w * r_ave + (1 - w) * (1 - dH / (m - 1))`.
pub fn psi_value(r_ave: Ratio<i128>, dh: u64, m: usize, weight: Ratio<i64>) -> Ratio<i128> {
    let w = Ratio::new(i128::from(*weight.numer()), i128::from(*weight.denom()));
    let one = Ratio::from_integer(1);
    let spread = one - Ratio::new(dh as i128, m as i128 - 1);
    w * r_ave + (one - w) * spread
}

/// Exact test of `new < factor * cur` for nonnegative integers.
fn below_relative(new: i128, cur: i128, factor: f64) -> bool {
    let (mantissa, exponent) = decode(factor);
    let mantissa = i128::from(mantissa);
    let result = if exponent >= 0 {
        cur.checked_mul(mantissa)
            .and_then(|v| v.checked_mul(1i128.checked_shl(exponent as u32)?))
            .map(|rhs| new < rhs)
    } else {
        let shift = (-exponent) as u32;
        1i128
            .checked_shl(shift)
            .filter(|_| shift < 126)
            .and_then(|p| new.checked_mul(p))
            .zip(cur.checked_mul(mantissa))
            .map(|(lhs, rhs)| lhs < rhs)
    };
    result.unwrap_or((new as f64) < factor * cur as f64)
}

/// `x = mantissa * 2^exponent` for finite positive `x`.
fn decode(x: f64) -> (u64, i32) {
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mantissa, mut exponent) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    while mantissa != 0 && mantissa % 2 == 0 {
        mantissa /= 2;
        exponent += 1;
    }
    (mantissa, exponent)
}

/// Incrementally maintained statistics of a stacked design of Latin squares
/// under within-block level swaps.
pub(crate) struct SwapState {
    n: usize,
    m: usize,
    k: usize,
    data: Vec<u32>,
    // pos[r * (m + 1) + level] = column holding `level` in run r
    pos: Vec<usize>,
    cross: Vec<i64>,
    col_sum: i64,
    abs_total: i128,
    centered_ss: i64,
    hamming: Option<HammingTracker>,
}

struct HammingTracker {
    dist: Vec<u32>,
    hist: Vec<u64>,
}

impl SwapState {
    pub(crate) fn new(data: Vec<u32>, k: usize, m: usize, track_hamming: bool) -> Self {
        let n = k * m;
        let mut pos = vec![0usize; n * (m + 1)];
        for r in 0..n {
            for c in 0..m {
                pos[r * (m + 1) + data[r * m + c] as usize] = c;
            }
        }
        let cross = cross_products(&data, n, m);
        let col_sum = (k * m * (m + 1) / 2) as i64;
        let n_i = n as i64;
        let centered_ss = n_i * cross[0] - col_sum * col_sum;
        let hamming = track_hamming.then(|| {
            let mut dist = vec![0u32; n * n];
            let mut hist = vec![0u64; m + 1];
            for a in 0..n {
                for b in 0..a {
                    let d = data[a * m..(a + 1) * m]
                        .iter()
                        .zip(&data[b * m..(b + 1) * m])
                        .filter(|(x, y)| x != y)
                        .count() as u32;
                    dist[a * n + b] = d;
                    dist[b * n + a] = d;
                    hist[d as usize] += 1;
                }
            }
            HammingTracker { dist, hist }
        });
        let mut state = Self {
            n,
            m,
            k,
            data,
            pos,
            cross,
            col_sum,
            abs_total: 0,
            centered_ss,
            hamming,
        };
        state.abs_total = state.recompute_abs_total();
        state
    }

    fn recompute_abs_total(&self) -> i128 {
        let (m, n) = (self.m, self.n as i64);
        let shift = self.col_sum * self.col_sum;
        let mut total: i128 = 0;
        for u in 0..m {
            let row = &self.cross[u * m..(u + 1) * m];
            for (v, &s) in row.iter().enumerate() {
                if u != v {
                    total += i128::from((n * s - shift).abs());
                }
            }
        }
        total
    }

    /// Denominator of `r_ave`: the shared centered sum of squares times `m(m - 1)`.
    pub(crate) fn r_ave_denominator(&self) -> i128 {
        i128::from(self.centered_ss) * (self.m * (self.m - 1)) as i128
    }

    #[cfg(test)]
    pub(crate) fn r_ave(&self) -> Ratio<i128> {
        Ratio::new(self.abs_total, self.r_ave_denominator())
    }

    pub(crate) fn hamming_min(&self) -> u64 {
        let within = if self.m >= 2 { self.m as u64 } else { u64::MAX };
        match &self.hamming {
            Some(h) => h
                .hist
                .iter()
                .position(|&c| c > 0)
                .map_or(within, |d| (d as u64).min(within)),
            None => within,
        }
    }

    /// Exchanges levels `a` and `b` within block `block`.
    pub(crate) fn swap(&mut self, block: usize, a: u32, b: u32) {
        let (m, n) = (self.m, self.n);
        let stride = m + 1;
        for r in block * m..(block + 1) * m {
            let ca = self.pos[r * stride + a as usize];
            let cb = self.pos[r * stride + b as usize];
            let delta = i64::from(b) - i64::from(a);
            let row = &self.data[r * m..(r + 1) * m];
            for (v, &val) in row.iter().enumerate() {
                if v == ca || v == cb {
                    continue;
                }
                let dv = delta * i64::from(val);
                self.cross[ca * m + v] += dv;
                self.cross[v * m + ca] += dv;
                self.cross[cb * m + v] -= dv;
                self.cross[v * m + cb] -= dv;
            }
            let sq = i64::from(b) * i64::from(b) - i64::from(a) * i64::from(a);
            self.cross[ca * m + ca] += sq;
            self.cross[cb * m + cb] -= sq;

            if let Some(h) = self.hamming.as_mut() {
                for s in 0..n {
                    if s / m == block {
                        continue;
                    }
                    let os_a = self.data[s * m + ca];
                    let os_b = self.data[s * m + cb];
                    let before = u32::from(a != os_a) + u32::from(b != os_b);
                    let after = u32::from(b != os_a) + u32::from(a != os_b);
                    if before != after {
                        let d = &mut h.dist[r * n + s];
                        h.hist[*d as usize] -= 1;
                        *d = *d + after - before;
                        h.hist[*d as usize] += 1;
                        h.dist[s * n + r] = *d;
                    }
                }
            }

            self.data[r * m + ca] = b;
            self.data[r * m + cb] = a;
            self.pos[r * stride + a as usize] = cb;
            self.pos[r * stride + b as usize] = ca;
        }
        self.abs_total = self.recompute_abs_total();
    }

    pub(crate) fn data(&self) -> &[u32] {
        &self.data
    }
}

enum Objective {
    RAve,
    Psi { weight: Ratio<i64> },
}

impl Objective {
    /// Numerator and the (constant) denominator of the objective.
    fn evaluate(&self, st: &SwapState) -> (i128, i128) {
        let dr = st.r_ave_denominator();
        match self {
            Objective::RAve => (st.abs_total, dr),
            Objective::Psi { weight } => {
                let (wn, wd) = (i128::from(*weight.numer()), i128::from(*weight.denom()));
                let m1 = st.m as i128 - 1;
                let gap = (m1 - st.hamming_min() as i128).max(0);
                (wn * st.abs_total * m1 + (wd - wn) * gap * dr, wd * dr * m1)
            }
        }
    }
}

fn run_search<R: Rng + ?Sized>(
    state: &mut SwapState,
    objective: Objective,
    cfg: &TaConfig,
    rng: &mut R,
) -> Result<(Vec<u32>, TaTrace)> {
    let schedule = threshold_schedule(cfg)?;
    let m = state.m;
    let k = state.k;
    let (mut current, denom) = objective.evaluate(state);
    let initial = current;
    let mut best = current;
    let mut best_data = state.data().to_vec();
    let mut accepted = 0;
    let mut best_per_outer = Vec::with_capacity(cfg.outer);
    let mut iterations = 0;

    for (i, &t) in schedule.iter().enumerate() {
        if best == 0 || m < 2 {
            break;
        }
        iterations += 1;
        let block = if k > 1 { rng.random_range(0..k) } else { 0 };
        let a = rng.random_range(1..=m as u32);
        let mut b = rng.random_range(1..m as u32);
        if b >= a {
            b += 1;
        }
        state.swap(block, a, b);
        let (candidate, _) = objective.evaluate(state);
        if below_relative(candidate, current, 1.0 + t) {
            current = candidate;
            accepted += 1;
            if candidate < best {
                best = candidate;
                best_data.copy_from_slice(state.data());
            }
        } else {
            state.swap(block, a, b);
        }
        if (i + 1) % cfg.inner == 0 {
            best_per_outer.push(Ratio::new(best, denom));
        }
    }

    Ok((
        best_data,
        TaTrace {
            best_per_outer,
            accepted,
            iterations,
            initial_objective: Ratio::new(initial, denom),
            final_objective: Ratio::new(best, denom),
        },
    ))
}

/// Minimises `r_ave` of a Latin square over level permutations.
pub fn ta_minimize_rave<R: Rng + ?Sized>(
    o0: &SeqDesign,
    cfg: &TaConfig,
    rng: &mut R,
) -> Result<(SeqDesign, TaTrace)> {
    if !o0.is_latin_square() {
        return Err(Error::NotLatinSquare("initial sequence design".into()));
    }
    if o0.m() < 2 {
        return Err(Error::Config("level swaps need at least two components".into()));
    }
    let m = o0.m();
    let mut state = SwapState::new(o0.as_slice().to_vec(), 1, m, false);
    let (data, trace) = run_search(&mut state, Objective::RAve, cfg, rng)?;
    Ok((SeqDesign::new(m, m, data)?, trace))
}

/// Minimises the weighted correlation/Hamming criterion over per-block level
/// permutations of a stack of `k >= 2` Latin squares.
pub fn ta_minimize_psi<R: Rng + ?Sized>(
    o0: &BlockedSeqDesign,
    cfg: &TaConfig,
    rng: &mut R,
) -> Result<(BlockedSeqDesign, TaTrace)> {
    let k = o0.k();
    if k < 2 {
        return Err(Error::Config(format!("blocked search needs k >= 2 blocks, got {k}")));
    }
    let m = o0.m();
    if m < 2 {
        return Err(Error::Config("level swaps need at least two components".into()));
    }
    let stacked = o0.to_seq();
    let mut state = SwapState::new(stacked.as_slice().to_vec(), k, m, true);
    let (data, trace) = run_search(&mut state, Objective::Psi { weight: cfg.weight }, cfg, rng)?;
    let out = BlockedSeqDesign::from_stacked(&SeqDesign::new(k * m, m, data)?, k)?;
    Ok((out, trace))
}
