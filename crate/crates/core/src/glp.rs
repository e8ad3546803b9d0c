//! Good lattice point sets and the level transformations applied to them:
//! shifting, the Williams map and its inverse, the modified (even-valued)
//! Williams map, and the leave-one-out reduction to an `m x m` Latin square.

use crate::design::{QuantDesign, SeqDesign};
use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn is_odd_prime(n: u64) -> bool {
    n > 2 && is_prime(n)
}

fn require_odd_prime(p: u64) -> Result<()> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(Error::NotOddPrime(p))
    }
}

/// The `p x (p - 1)` lattice set whose row `i` is `i * (1, ..., p - 1) mod p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlpSet {
    p: u64,
    data: Vec<u64>,
}

impl GlpSet {
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Number of columns, `p - 1`.
    pub fn m(&self) -> usize {
        self.p as usize - 1
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.data.chunks_exact(self.m())
    }

    pub fn row(&self, i: usize) -> &[u64] {
        let m = self.m();
        &self.data[i * m..(i + 1) * m]
    }
}

pub fn glp(p: u64) -> Result<GlpSet> {
    require_odd_prime(p)?;
    let m = p - 1;
    let data = (1..=p)
        .flat_map(|i| (1..=m).map(move |j| (i * j) % p))
        .collect();
    Ok(GlpSet { p, data })
}

/// Williams transformation on `Z_modulus`: `2x` below half, `2(modulus - x) - 1` above.
pub fn williams(x: u64, modulus: u64) -> Result<u64> {
    if x >= modulus {
        return Err(Error::OutOfRange { value: x, modulus });
    }
    Ok(if 2 * x < modulus {
        2 * x
    } else {
        2 * (modulus - x) - 1
    })
}

/// `(W(0), ..., W(modulus - 1))`.
pub fn williams_map(modulus: u64) -> Vec<u64> {
    (0..modulus)
        .map(|x| if 2 * x < modulus { 2 * x } else { 2 * (modulus - x) - 1 })
        .collect()
}

/// The unique `x` with `W(x) = y` on `Z_modulus`; defined for odd and even moduli.
pub fn williams_inv(y: u64, modulus: u64) -> Result<u64> {
    if y >= modulus {
        return Err(Error::OutOfRange { value: y, modulus });
    }
    // Even images come from the lower half, odd images from the upper half.
    Ok(if y.is_multiple_of(2) { y / 2 } else { modulus - y.div_ceil(2) })
}

/// Modified Williams transformation on `Z_q`, onto the even residues.
pub fn modified_williams(x: u64, q: u64) -> Result<u64> {
    if x >= q {
        return Err(Error::OutOfRange { value: x, modulus: q });
    }
    Ok(if 2 * x < q { 2 * x } else { 2 * (q - x) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    None,
    Williams,
}

/// `(D_0 + b) mod p`, optionally passed through the Williams map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftedDesign {
    p: u64,
    b: u64,
    transform: Transform,
    data: Vec<u64>,
}

impl ShiftedDesign {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    pub fn m(&self) -> usize {
        self.p as usize - 1
    }

    pub fn row(&self, i: usize) -> &[u64] {
        let m = self.m();
        &self.data[i * m..(i + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.data.chunks_exact(self.m())
    }

    /// The value the last (constant) row is expected to carry: `b` or `W(b)`.
    pub fn constant_level(&self) -> u64 {
        match self.transform {
            Transform::None => self.b,
            Transform::Williams => williams_map(self.p)[self.b as usize],
        }
    }
}

pub fn shifted(d0: &GlpSet, b: u64, transform: Transform) -> Result<ShiftedDesign> {
    let p = d0.p;
    if b >= p {
        return Err(Error::OutOfRange { value: b, modulus: p });
    }
    let w = williams_map(p);
    let data = d0
        .data
        .iter()
        .map(|&v| {
            let s = (v + b) % p;
            match transform {
                Transform::None => s,
                Transform::Williams => w[s as usize],
            }
        })
        .collect();
    Ok(ShiftedDesign {
        p,
        b,
        transform,
        data,
    })
}

/// An `m x m` Latin square on `1..=m` obtained by dropping the constant last
/// row of a shifted design and closing the gap left by that level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeaveOneOutDesign {
    m: usize,
    deleted_level: u64,
    relabel: Vec<Option<u32>>,
    data: Vec<u32>,
}

impl LeaveOneOutDesign {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn deleted_level(&self) -> u64 {
        self.deleted_level
    }

    /// `relabel[z]` is the new level of residue `z`; `None` for the deleted level.
    pub fn relabel_map(&self) -> &[Option<u32>] {
        &self.relabel
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks_exact(self.m)
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.rows().map(<[u32]>::to_vec).collect()
    }

    pub fn to_seq(&self) -> SeqDesign {
        SeqDesign::new(self.m, self.m, self.data.clone()).expect("leave-one-out rows are permutations")
    }

    pub fn to_quant(&self) -> QuantDesign {
        QuantDesign::new(self.m, self.m, self.data.clone()).expect("leave-one-out columns are permutations")
    }
}

pub fn leave_one_out(e: &ShiftedDesign) -> Result<LeaveOneOutDesign> {
    let m = e.m();
    let v = e.constant_level();
    let last = e.row(m);
    if last.iter().any(|&z| z != last[0]) {
        return Err(Error::NonConstantLastRow);
    }
    if last[0] != v {
        return Err(Error::DeletedLevelMismatch {
            recorded: v,
            found: last[0],
        });
    }
    let relabel: Vec<Option<u32>> = (0..e.p)
        .map(|z| match z.cmp(&v) {
            std::cmp::Ordering::Less => Some(z as u32 + 1),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(z as u32),
        })
        .collect();
    let data = e.data[..m * m]
        .iter()
        .map(|&z| relabel[z as usize].ok_or_else(|| Error::NotLatinSquare("deleted level reappears".into())))
        .collect::<Result<Vec<u32>>>()?;
    Ok(LeaveOneOutDesign {
        m,
        deleted_level: v,
        relabel,
        data,
    })
}

/// Leave-one-out Williams-transformed design for shift `b`.
pub fn tilde_e(p: u64, b: u64) -> Result<LeaveOneOutDesign> {
    leave_one_out(&shifted(&glp(p)?, b, Transform::Williams)?)
}

/// Leave-one-out untransformed design for shift `b`.
pub fn tilde_d(p: u64, b: u64) -> Result<LeaveOneOutDesign> {
    leave_one_out(&shifted(&glp(p)?, b, Transform::None)?)
}

/// L1-equidistant `m x m` LHD for even `m` with `m + 1` and `2m + 1` prime:
/// the leading `m x m` block of the `(2m + 1)`-point lattice set, mapped by
/// the modified Williams transformation and halved.
pub fn corollary1_design(m: usize) -> Result<QuantDesign> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::EquidistantInapplicable {
            m,
            reason: "m must be even".into(),
        });
    }
    let q = 2 * m as u64 + 1;
    if !is_odd_prime(m as u64 + 1) {
        return Err(Error::EquidistantInapplicable {
            m,
            reason: format!("m + 1 = {} is not prime", m + 1),
        });
    }
    if !is_odd_prime(q) {
        return Err(Error::EquidistantInapplicable {
            m,
            reason: format!("2m + 1 = {q} is not prime"),
        });
    }
    let mut data = Vec::with_capacity(m * m);
    for i in 1..=m as u64 {
        for j in 1..=m as u64 {
            let w = modified_williams((i * j) % q, q)?;
            data.push((w / 2) as u32);
        }
    }
    QuantDesign::new(m, m, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{hamming_distance, l1_between, l1_distance, l2_distance_sq, pair_counts, r_ave};

    #[test]
    fn glp_small_cases() {
        let d = glp(3).unwrap();
        assert_eq!(d.rows().collect::<Vec<_>>(), vec![&[1, 2][..], &[2, 1], &[0, 0]]);
        assert_eq!(glp(5).unwrap().row(1), &[2, 4, 1, 3]);
        let d7 = glp(7).unwrap();
        assert_eq!(d7.row(0), &[1, 2, 3, 4, 5, 6]);
        assert_eq!(d7.row(2), &[3, 6, 2, 5, 1, 4]);
        assert_eq!(d7.row(6), &[0; 6]);
    }

    #[test]
    fn glp_rejects_non_odd_primes() {
        for p in [0, 1, 2, 4, 9, 15] {
            assert_eq!(glp(p), Err(Error::NotOddPrime(p)));
        }
    }

    #[test]
    fn williams_tables() {
        assert_eq!(williams_map(7), vec![0, 2, 4, 6, 5, 3, 1]);
        assert_eq!(williams_map(5), vec![0, 2, 4, 3, 1]);
        assert_eq!(williams(0, 11).unwrap(), 0);
        assert!(williams(7, 7).is_err());
        let inv8: Vec<u64> = (0..8).map(|y| williams_inv(y, 8).unwrap()).collect();
        assert_eq!(inv8, vec![0, 7, 1, 6, 2, 5, 3, 4]);
        assert_eq!(williams_inv(5, 7).unwrap(), 4);
    }

    #[test]
    fn williams_inverse_round_trips() {
        for modulus in 2..60u64 {
            let w = williams_map(modulus);
            let mut sorted = w.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..modulus).collect::<Vec<_>>());
            for x in 0..modulus {
                assert_eq!(williams_inv(w[x as usize], modulus).unwrap(), x);
            }
        }
    }

    #[test]
    fn modified_williams_values() {
        assert_eq!(modified_williams(7, 13).unwrap(), 12);
        assert_eq!(modified_williams(6, 13).unwrap(), 12);
        assert_eq!(modified_williams(0, 13).unwrap(), 0);
        assert!(modified_williams(13, 13).is_err());
        for x in 1..13 {
            let w = modified_williams(x, 13).unwrap();
            assert!(w.is_multiple_of(2) && w > 0);
        }
    }

    #[test]
    fn shifted_example() {
        let d0 = glp(7).unwrap();
        assert_eq!(shifted(&d0, 0, Transform::None).unwrap().data, d0.data);
        let e1 = shifted(&d0, 1, Transform::Williams).unwrap();
        let expected: [[u64; 6]; 7] = [
            [4, 6, 5, 3, 1, 0],
            [6, 3, 0, 4, 5, 1],
            [5, 0, 6, 1, 4, 3],
            [3, 4, 1, 6, 0, 5],
            [1, 5, 4, 0, 3, 6],
            [0, 1, 3, 5, 6, 4],
            [2, 2, 2, 2, 2, 2],
        ];
        for (row, exp) in e1.rows().zip(expected.iter()) {
            assert_eq!(row, exp);
        }
    }

    #[test]
    fn leave_one_out_example() {
        let t = tilde_e(7, 1).unwrap();
        assert_eq!(
            t.to_rows(),
            vec![
                vec![4, 6, 5, 3, 2, 1],
                vec![6, 3, 1, 4, 5, 2],
                vec![5, 1, 6, 2, 4, 3],
                vec![3, 4, 2, 6, 1, 5],
                vec![2, 5, 4, 1, 3, 6],
                vec![1, 2, 3, 5, 6, 4],
            ]
        );
        assert_eq!(t.deleted_level(), 2);
        assert!(t.rows().all(|r| r.iter().sum::<u32>() == 21));
        let mut images: Vec<u32> = t.relabel_map().iter().flatten().copied().collect();
        images.sort_unstable();
        assert_eq!(images, (1..=6).collect::<Vec<_>>());
    }

    #[test]
    fn leave_one_out_small_prime() {
        assert_eq!(
            tilde_e(5, 3).unwrap().to_rows(),
            vec![vec![2, 1, 3, 4], vec![1, 4, 2, 3], vec![3, 2, 4, 1], vec![4, 3, 1, 2]]
        );
        assert_eq!(
            tilde_e(5, 1).unwrap().to_rows(),
            vec![vec![4, 3, 2, 1], vec![3, 1, 4, 2], vec![2, 4, 1, 3], vec![1, 2, 3, 4]]
        );
    }

    #[test]
    fn leave_one_out_rejects_non_constant_last_row() {
        let mut e = shifted(&glp(5).unwrap(), 2, Transform::Williams).unwrap();
        let m = e.m();
        e.data[m * m] = (e.data[m * m] + 1) % 5;
        assert_eq!(leave_one_out(&e), Err(Error::NonConstantLastRow));
    }

    #[test]
    fn leave_one_out_checks_recorded_level() {
        let mut e = shifted(&glp(5).unwrap(), 2, Transform::Williams).unwrap();
        let m = e.m();
        for v in &mut e.data[m * m..] {
            *v = 0;
        }
        assert!(matches!(leave_one_out(&e), Err(Error::DeletedLevelMismatch { .. })));
    }

    #[test]
    fn corollary1_m6() {
        let e = corollary1_design(6).unwrap();
        assert_eq!(e.row(0), &[1, 2, 3, 4, 5, 6]);
        assert_eq!(e.row(1), &[2, 4, 6, 5, 3, 1]);
        assert_eq!(l1_distance(&e).unwrap(), 14);
        assert_eq!(l2_distance_sq(&e).unwrap(), 40);
        for i in 0..6 {
            for j in 0..i {
                assert_eq!(l1_between(e.row(i), e.row(j)), 14);
            }
        }
    }

    #[test]
    fn corollary1_rejects_composite() {
        assert!(matches!(corollary1_design(4), Err(Error::EquidistantInapplicable { .. })));
        assert!(matches!(corollary1_design(7), Err(Error::EquidistantInapplicable { .. })));
        assert!(matches!(corollary1_design(8), Err(Error::EquidistantInapplicable { .. })));
    }

    #[test]
    fn tilde_d_is_balanced_too() {
        for b in 0..7 {
            let o = tilde_d(7, b).unwrap().to_seq();
            assert!(o.is_latin_square());
            assert_eq!(pair_counts(&o).balanced_value(), Some(1));
            assert_eq!(hamming_distance(&o).unwrap(), 6);
            assert!(r_ave(&o).unwrap().exact.is_some());
        }
    }
}
