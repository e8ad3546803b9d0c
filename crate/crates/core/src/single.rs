//! Designs with as many runs as components.
//!
//! When `m + 1 = p` is prime both parts come from leave-one-out
//! Williams-transformed lattice sets: the shift with the smallest `r_ave`
//! drives the sequence part and a shift near `(p - 1) / 2 +- sqrt((p^2 - 1) / 12)`
//! drives the quantitative part. Otherwise, for even `m = phi(N) / 2`, the
//! quantitative part is the multiplicative Latin square modulo `N` and the
//! sequence part is a level-permuted Williams Latin square.

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::design::{l2_distance_sq, r_ave, DesignMeta, QSDesign, QuantDesign, Route, SeqDesign};
use crate::error::{Error, Result};
use crate::glp::{corollary1_design, glp, is_odd_prime, is_prime, tilde_e, williams_inv};
use crate::multi::{sub_seed, Stream};
use crate::optimizer::{ta_minimize_rave, TaConfig};

/// Exact `r_ave` of every leave-one-out Williams design for `p`, indexed by shift.
pub fn rave_by_shift(p: u64) -> Result<Vec<Ratio<i128>>> {
    (0..p)
        .map(|b| {
            let o = tilde_e(p, b)?.to_seq();
            r_ave(&o)?
                .exact
                .ok_or_else(|| Error::NotLatinSquare(format!("shift {b} lost equal column moments")))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct B1Selection {
    pub p: u64,
    /// Every shift attaining the minimum, ascending.
    pub minimizers: Vec<u64>,
    pub chosen: u64,
    pub r_value: Ratio<i128>,
}

pub fn select_b1(p: u64) -> Result<B1Selection> {
    let values = rave_by_shift(p)?;
    let r_value = *values.iter().min().expect("p >= 3 shifts");
    let minimizers: Vec<u64> = (0..p).filter(|&b| values[b as usize] == r_value).collect();
    Ok(B1Selection {
        p,
        chosen: minimizers[0],
        minimizers,
        r_value,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct B2Selection {
    pub p: u64,
    pub c: u64,
    /// `W^-1((p - 1) / 2 + c)` and `W^-1((p - 1) / 2 - c)`, ascending and deduplicated.
    pub candidates: Vec<u64>,
    pub chosen: u64,
}

/// The offset `c`: with `c0 = floor(sqrt((p^2 - 1) / 12))`, take `c0` if
/// `c0^2 + 2 (c0 + 1)^2 >= (p^2 - 1) / 4`, else `c0 + 1`.
///
/// Reading the offset as `floor((p^2 - 1) / 12)` without the square root does
/// not reproduce the tabulated shifts (for `p = 7` it yields `{0, 3}`).
pub fn b2_offset(p: u64) -> u64 {
    let q = p * p - 1;
    let c0 = (q / 12).isqrt();
    if 4 * (c0 * c0 + 2 * (c0 + 1) * (c0 + 1)) >= q {
        c0
    } else {
        c0 + 1
    }
}

pub fn select_b2(p: u64) -> Result<B2Selection> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let c = b2_offset(p);
    let half = (p - 1) / 2;
    let mut candidates = vec![
        williams_inv((half + c) % p, p)?,
        williams_inv((half + p - c % p) % p, p)?,
    ];
    candidates.sort_unstable();
    candidates.dedup();
    let mut chosen = candidates[0];
    let mut best = l2_distance_sq(&tilde_e(p, chosen)?.to_quant())?;
    for &b in &candidates[1..] {
        let d = l2_distance_sq(&tilde_e(p, b)?.to_quant())?;
        if d > best {
            best = d;
            chosen = b;
        }
    }
    Ok(B2Selection {
        p,
        c,
        candidates,
        chosen,
    })
}

pub fn euler_phi(mut n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut result = n;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            while n.is_multiple_of(d) {
                n /= d;
            }
            result -= result / d;
        }
        d += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Which of the structured families a totient modulus falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulusClass {
    /// `N = p` or `N = 2p`.
    A,
    /// `N = 4p`.
    B,
    /// `N = 2^t`, `t >= 3`.
    C,
    Other,
}

impl ModulusClass {
    pub fn of(n: u64) -> Self {
        if is_odd_prime(n) || (n.is_multiple_of(2) && is_odd_prime(n / 2)) {
            ModulusClass::A
        } else if n.is_multiple_of(4) && is_odd_prime(n / 4) {
            ModulusClass::B
        } else if n >= 8 && n.is_power_of_two() {
            ModulusClass::C
        } else {
            ModulusClass::Other
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotientDecomposition {
    pub m: usize,
    pub modulus: u64,
    /// The `m` integers below `N / 2` coprime to `N`, ascending.
    pub h: Vec<u64>,
    pub class: ModulusClass,
}

/// A modulus `N` with `phi(N) = 2m`, preferring classes A, B, C in that order
/// and the smallest `N` within a class.
pub fn find_totient_modulus(m: usize) -> Result<TotientDecomposition> {
    if m == 0 || !m.is_multiple_of(2) {
        return Err(Error::NoTotientModulus(m));
    }
    let target = 2 * m as u64;
    let scan = |lo: u64, hi: u64| -> Option<u64> {
        (lo..=hi)
            .filter(|&n| euler_phi(n) == target)
            .min_by_key(|&n| (ModulusClass::of(n), n))
    };
    let near = 8 * m as u64 + 8;
    // Every solution of phi(N) = 2m satisfies N <= 2 phi(N)^2.
    let far = 2 * target * target;
    let modulus = scan(3, near)
        .or_else(|| scan(near + 1, far))
        .ok_or(Error::NoTotientModulus(m))?;
    let h: Vec<u64> = (1..modulus)
        .take_while(|&x| 2 * x < modulus)
        .filter(|&x| gcd(x, modulus) == 1)
        .collect();
    debug_assert_eq!(h.len(), m);
    Ok(TotientDecomposition {
        m,
        modulus,
        h,
        class: ModulusClass::of(modulus),
    })
}

/// `l_ij = min(h_i h_j mod N, N - h_i h_j mod N)`, relabelled through `h_i -> i`.
pub fn latin_square_l(m: usize) -> Result<(QuantDesign, TotientDecomposition)> {
    let t = find_totient_modulus(m)?;
    let n = t.modulus;
    let mut index = vec![0u32; n as usize];
    for (i, &h) in t.h.iter().enumerate() {
        index[h as usize] = i as u32 + 1;
    }
    let mut data = Vec::with_capacity(m * m);
    for &hi in &t.h {
        for &hj in &t.h {
            let r = hi * hj % n;
            data.push(index[r.min(n - r) as usize]);
        }
    }
    Ok((QuantDesign::new(m, m, data)?, t))
}

/// Row `i` is `h + i mod m` with `h = (W^-1(0), ..., W^-1(m - 1))` and `0` written as `m`.
pub fn williams_latin_square(m: usize) -> Result<SeqDesign> {
    if m == 0 || !m.is_multiple_of(2) {
        return Err(Error::Config(format!("Williams Latin square needs even m, got {m}")));
    }
    let mu = m as u64;
    let h = (0..mu).map(|y| williams_inv(y, mu)).collect::<Result<Vec<_>>>()?;
    let mut data = Vec::with_capacity(m * m);
    for i in 0..mu {
        data.extend(h.iter().map(|&v| match (v + i) % mu {
            0 => m as u32,
            x => x as u32,
        }));
    }
    SeqDesign::new(m, m, data)
}

/// The first `m` rows of the `(m + 1)`-point lattice set, used for both parts.
pub fn competitor_baseline(m: usize) -> Result<QSDesign> {
    let p = m as u64 + 1;
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let d0 = glp(p)?;
    let data: Vec<u32> = (0..m).flat_map(|i| d0.row(i).iter().map(|&v| v as u32)).collect();
    let mut meta = DesignMeta::new(Route::Competitor);
    meta.params.p = Some(p);
    QSDesign::new(QuantDesign::new(m, m, data.clone())?, SeqDesign::new(m, m, data)?, meta)
}

/// Why no `n = m` construction exists for `m`, or `None` if one does.
pub fn unsupported_reason(m: usize) -> Option<String> {
    if m < 2 {
        return Some(format!("m = {m} is below 2"));
    }
    if is_prime(m as u64 + 1) {
        return None;
    }
    if !m.is_multiple_of(2) {
        return Some(format!("m = {m}: m + 1 = {} is not prime and m is odd", m + 1));
    }
    if find_totient_modulus(m).is_err() {
        return Some(format!(
            "m = {m}: m + 1 = {} is not prime and no N has phi(N) = {}",
            m + 1,
            2 * m
        ));
    }
    None
}

/// `n = m` design for any supported `m`.
pub fn construct_nm(m: usize, cfg: &TaConfig, seed: u64) -> Result<QSDesign> {
    if let Some(reason) = unsupported_reason(m) {
        return Err(Error::Unsupported(reason));
    }
    let p = m as u64 + 1;
    if is_odd_prime(p) {
        glp_pair(p)
    } else {
        totient_latin(m, cfg, seed)
    }
}

fn glp_pair(p: u64) -> Result<QSDesign> {
    let m = p as usize - 1;
    let b1 = select_b1(p)?;
    let b2 = select_b2(p)?;
    let o = tilde_e(p, b1.chosen)?.to_seq();
    let shifted_x = tilde_e(p, b2.chosen)?.to_quant();
    let mut meta = DesignMeta::new(Route::GlpPair);
    meta.params.p = Some(p);
    meta.params.b_seq = vec![b1.chosen];
    let x = match corollary1_design(m) {
        Ok(e) if l2_distance_sq(&e)? > l2_distance_sq(&shifted_x)? => {
            meta.params.x_source = Some("equidistant".into());
            e
        }
        _ => {
            meta.params.b_quant = Some(b2.chosen);
            shifted_x
        }
    };
    QSDesign::new(x, o, meta)
}

fn totient_latin(m: usize, cfg: &TaConfig, seed: u64) -> Result<QSDesign> {
    let (x, t) = latin_square_l(m)?;
    let start = williams_latin_square(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, Stream::Optimizer));
    let (o, _) = ta_minimize_rave(&start, cfg, &mut rng)?;
    let mut meta = DesignMeta::new(Route::TotientLatin);
    meta.seed = Some(seed);
    meta.params.modulus = Some(t.modulus);
    QSDesign::new(x, o, meta)
}
