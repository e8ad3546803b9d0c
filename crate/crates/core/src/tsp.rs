//! A travelling-salesman scheduling problem with quantitative-sequence
//! inputs: visit every city once, choosing the order and how long to stay,
//! to maximise income plus commission minus travel cost and late penalties.

use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::design::QSDesign;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TspInstance {
    m: usize,
    /// Fixed income per city.
    pub a: f64,
    /// Commission per day of stay.
    pub e: f64,
    /// Travel expense per day.
    pub b: f64,
    /// Penalty per day late.
    pub f: f64,
    deadlines: Vec<f64>,
    /// `(m + 1) x m`, row `i` = origin city `i` (0 is the start), column `j` = city `j + 1`.
    travel: Vec<f64>,
    pub stay_bounds: Option<(f64, f64)>,
}

impl TspInstance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: f64,
        e: f64,
        b: f64,
        f: f64,
        deadlines: Vec<f64>,
        travel: Vec<Vec<f64>>,
        stay_bounds: Option<(f64, f64)>,
    ) -> Result<Self> {
        let m = deadlines.len();
        if m == 0 {
            return Err(Error::Dimension("at least one city is required".into()));
        }
        if travel.len() != m + 1 || travel.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension(format!("travel matrix must be {}x{m}", m + 1)));
        }
        if let Some(d) = deadlines.iter().find(|&&d| d.is_nan() || d <= 0.0) {
            return Err(Error::Config(format!("deadline {d} must be positive")));
        }
        let travel: Vec<f64> = travel.concat();
        if let Some(s) = travel.iter().find(|&&s| s.is_nan() || s < 0.0) {
            return Err(Error::Config(format!("travel time {s} must be nonnegative")));
        }
        if let Some((lo, hi)) = stay_bounds {
            if !(lo <= hi) {
                return Err(Error::Config(format!("stay bounds [{lo}, {hi}] are empty")));
            }
        }
        Ok(Self {
            m,
            a,
            e,
            b,
            f,
            deadlines,
            travel,
            stay_bounds,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Deadline of city `city` (1-based).
    pub fn deadline(&self, city: usize) -> f64 {
        self.deadlines[city - 1]
    }

    /// Travel time from `from` (0 = start) to `to` (1-based).
    pub fn travel(&self, from: usize, to: usize) -> f64 {
        self.travel[from * self.m + to - 1]
    }
}

/// An order of visits and the stay at each visit, both in visit order.
#[derive(Clone, Debug, PartialEq)]
pub struct TspStrategy {
    order: Vec<usize>,
    stays: Vec<f64>,
}

impl TspStrategy {
    pub fn new(order: Vec<usize>, stays: Vec<f64>) -> Result<Self> {
        let m = order.len();
        if stays.len() != m {
            return Err(Error::Dimension(format!("{} stays for {m} cities", stays.len())));
        }
        let mut seen = vec![false; m + 1];
        for &c in &order {
            if c == 0 || c > m || std::mem::replace(&mut seen[c], true) {
                return Err(Error::Config(format!("order {order:?} is not a permutation of 1..={m}")));
            }
        }
        Ok(Self { order, stays })
    }

    /// Builds a strategy from stays indexed by city rather than by visit.
    pub fn from_city_indexed(order: Vec<usize>, stays_by_city: &[f64]) -> Result<Self> {
        if stays_by_city.len() != order.len() {
            return Err(Error::Dimension(format!(
                "{} stays for {} cities",
                stays_by_city.len(),
                order.len()
            )));
        }
        let stays = order
            .iter()
            .map(|&c| stays_by_city.get(c.wrapping_sub(1)).copied().unwrap_or(f64::NAN))
            .collect();
        Self::new(order, stays)
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn stays(&self) -> &[f64] {
        &self.stays
    }

    pub fn stays_by_city(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.order.len()];
        for (&c, &x) in self.order.iter().zip(&self.stays) {
            out[c - 1] = x;
        }
        out
    }

    /// Parses `"x1,...,xm;o1,...,om"` with stays in visit order.
    pub fn parse(s: &str) -> Result<Self> {
        let (xs, os) = s.split_once(';').ok_or_else(|| Error::Parse {
            row: 1,
            column: 1,
            message: "expected \"stays;order\"".into(),
        })?;
        let stays = xs
            .split(',')
            .enumerate()
            .map(|(i, t)| {
                t.trim().parse::<f64>().map_err(|e| Error::Parse {
                    row: 1,
                    column: i + 1,
                    message: format!("stay {t:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let order = os
            .split(',')
            .enumerate()
            .map(|(i, t)| {
                t.trim().parse::<usize>().map_err(|e| Error::Parse {
                    row: 2,
                    column: i + 1,
                    message: format!("city {t:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(order, stays)
    }
}

fn check(inst: &TspInstance, strat: &TspStrategy) -> Result<()> {
    if strat.order.len() != inst.m {
        return Err(Error::Dimension(format!(
            "strategy visits {} cities, instance has {}",
            strat.order.len(),
            inst.m
        )));
    }
    Ok(())
}

/// Time at which the task in each visited city is finished, in visit order.
pub fn completion_times(inst: &TspInstance, strat: &TspStrategy) -> Result<Vec<f64>> {
    check(inst, strat)?;
    let mut prev = 0;
    let mut t = 0.0;
    Ok(strat
        .order
        .iter()
        .zip(&strat.stays)
        .map(|(&c, &x)| {
            t += inst.travel(prev, c) + x;
            prev = c;
            t
        })
        .collect())
}

/// Lateness of each visit against the visited city's deadline.
pub fn delays(inst: &TspInstance, strat: &TspStrategy) -> Result<Vec<f64>> {
    let c = completion_times(inst, strat)?;
    Ok(c
        .iter()
        .zip(&strat.order)
        .map(|(&t, &city)| (t - inst.deadline(city)).max(0.0))
        .collect())
}

pub fn profit(inst: &TspInstance, strat: &TspStrategy) -> Result<f64> {
    let c = completion_times(inst, strat)?;
    let late: f64 = c
        .iter()
        .zip(&strat.order)
        .map(|(&t, &city)| (t - inst.deadline(city)).max(0.0))
        .sum();
    let stay: f64 = strat.stays.iter().sum();
    let last = c.last().copied().unwrap_or(0.0);
    Ok(inst.m as f64 * inst.a + inst.e * stay - inst.b * last - inst.f * late)
}

/// Six cities, stays in `[1, 4]` days.
pub fn six_city_instance() -> TspInstance {
    let travel = vec![
        vec![0.6, 2.2, 1.8, 2.6, 1.8, 1.7],
        vec![0.0, 0.8, 1.5, 1.4, 2.8, 1.1],
        vec![0.7, 0.0, 1.2, 2.4, 2.3, 1.4],
        vec![1.5, 1.2, 0.0, 1.8, 1.3, 1.5],
        vec![1.2, 2.4, 1.7, 0.0, 1.7, 2.1],
        vec![2.7, 2.4, 1.3, 1.7, 0.0, 0.9],
        vec![1.1, 1.3, 1.4, 2.3, 0.9, 0.0],
    ];
    TspInstance::new(
        20.0,
        10.0,
        2.0,
        15.0,
        vec![26.0, 10.0, 23.0, 25.0, 12.0, 10.0],
        travel,
        Some((1.0, 4.0)),
    )
    .expect("constants are valid")
}

/// The `rank`-th permutation of `1..=m` in lexicographic order.
pub fn unrank_permutation(mut rank: u128, m: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (1..=m).collect();
    let mut fact: Vec<u128> = vec![1; m + 1];
    for i in 1..=m {
        fact[i] = fact[i - 1].saturating_mul(i as u128);
    }
    let mut out = Vec::with_capacity(m);
    for i in (0..m).rev() {
        let idx = (rank / fact[i]) as usize;
        rank %= fact[i];
        out.push(pool.remove(idx));
    }
    out
}

fn factorial(m: usize) -> Option<u128> {
    (1..=m as u128).try_fold(1u128, |acc, v| acc.checked_mul(v))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineResult {
    pub best: f64,
    pub profits: Vec<f64>,
    pub strategies: Vec<TspStrategy>,
}

/// `n` strategies with distinct uniformly drawn orders and uniform stays.
pub fn random_baseline(inst: &TspInstance, n: usize, seed: u64) -> Result<BaselineResult> {
    let (lo, hi) = inst
        .stay_bounds
        .ok_or_else(|| Error::Config("instance has no stay bounds to sample from".into()))?;
    let m = inst.m;
    if n == 0 {
        return Err(Error::Config("at least one strategy is required".into()));
    }
    let total = factorial(m);
    if total.is_some_and(|t| (n as u128) > t) {
        return Err(Error::Config(format!("cannot draw {n} distinct orders of {m} cities")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let orders: Vec<Vec<usize>> = match total.and_then(|t| usize::try_from(t).ok()) {
        Some(t) => index::sample(&mut rng, t, n)
            .into_iter()
            .map(|r| unrank_permutation(r as u128, m))
            .collect(),
        None => {
            let mut seen = HashSet::with_capacity(n);
            let mut out = Vec::with_capacity(n);
            while out.len() < n {
                let mut o: Vec<usize> = (1..=m).collect();
                o.shuffle(&mut rng);
                if seen.insert(o.clone()) {
                    out.push(o);
                }
            }
            out
        }
    };
    let strategies = orders
        .into_iter()
        .map(|order| {
            let stays = (0..m).map(|_| rng.random_range(lo..=hi)).collect();
            TspStrategy::new(order, stays)
        })
        .collect::<Result<Vec<_>>>()?;
    let profits = strategies
        .iter()
        .map(|s| profit(inst, s))
        .collect::<Result<Vec<_>>>()?;
    let best = profits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(BaselineResult {
        best,
        profits,
        strategies,
    })
}

/// One strategy per run: `O` rows give the orders and each `X` column is
/// scaled from `1..=n` onto the stay bounds of its city.
pub fn strategies_from_design(inst: &TspInstance, d: &QSDesign) -> Result<Vec<TspStrategy>> {
    if d.m() != inst.m {
        return Err(Error::Dimension(format!("design has {} components, instance {} cities", d.m(), inst.m)));
    }
    let (lo, hi) = inst
        .stay_bounds
        .ok_or_else(|| Error::Config("instance has no stay bounds to scale onto".into()))?;
    let n = d.n();
    let scale = |x: u32| {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * f64::from(x - 1) / (n - 1) as f64
        }
    };
    (0..n)
        .map(|i| {
            let by_city: Vec<f64> = d.x().row(i).iter().map(|&x| scale(x)).collect();
            let order = d.o().row(i).iter().map(|&c| c as usize).collect();
            TspStrategy::from_city_indexed(order, &by_city)
        })
        .collect()
}
