//! Product kernel on integer coefficient vectors.
//!
//! Every coefficient of both operands is expressed in one field Q(ζ_L) over
//! one common denominator per operand, so the inner loop is a plain integer
//! convolution. A checked `i128` pass runs first and the `BigInt` pass is
//! used only when it overflows.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::cyclotomic::{field, CycNum};

/// (ζ-exponent, numerator vector) pairs of one q-exponent.
type Row<T> = Vec<(i64, Vec<T>)>;

/// A product term: ((n, l), numerators modulo Φ_order).
pub(crate) type KernelTerm = ((i64, i64), Vec<BigInt>);

/// One operand: rows of equal q-exponent, ascending.
pub(crate) struct Prepared<T> {
    pub rows: Vec<(i64, Row<T>)>,
}

pub(crate) trait KernelInt: Clone + Zero {
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    /// acc += a·b; false on overflow.
    fn mul_add(acc: &mut Self, a: &Self, b: &Self) -> bool;
    /// acc += a·w; false on overflow.
    fn mul_small_add(acc: &mut Self, a: &Self, w: i64) -> bool;
}

impl KernelInt for i128 {
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn mul_add(acc: &mut Self, a: &Self, b: &Self) -> bool {
        match a.checked_mul(*b).and_then(|p| acc.checked_add(p)) {
            Some(v) => {
                *acc = v;
                true
            }
            None => false,
        }
    }
    fn mul_small_add(acc: &mut Self, a: &Self, w: i64) -> bool {
        match a.checked_mul(w as i128).and_then(|p| acc.checked_add(p)) {
            Some(v) => {
                *acc = v;
                true
            }
            None => false,
        }
    }
}

impl KernelInt for BigInt {
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn mul_add(acc: &mut Self, a: &Self, b: &Self) -> bool {
        *acc += a * b;
        true
    }
    fn mul_small_add(acc: &mut Self, a: &Self, w: i64) -> bool {
        *acc += a * w;
        true
    }
}

/// Common order and denominator of a coefficient list.
pub(crate) fn common_order_den<'a>(coeffs: impl Iterator<Item = &'a CycNum>) -> (u32, BigInt) {
    let mut order = 1u64;
    let mut den = BigInt::one();
    for c in coeffs {
        order = order.lcm(&(c.order() as u64));
        den = den.lcm(c.denominator());
    }
    (order as u32, den)
}

/// Integer numerators of `c` in Q(ζ_order) over the denominator `den`.
pub(crate) fn scaled_numerators(c: &CycNum, order: u32, den: &BigInt) -> Vec<BigInt> {
    let factor = den / c.denominator();
    let mut v = c.lifted_numerators(order);
    if !factor.is_one() {
        for x in &mut v {
            *x *= &factor;
        }
    }
    v
}

pub(crate) fn prepare<T: KernelInt>(terms: &[(i64, i64, Vec<BigInt>)]) -> Option<Prepared<T>> {
    let mut rows: Vec<(i64, Row<T>)> = Vec::new();
    for (n, l, v) in terms {
        let conv: Option<Vec<T>> = v.iter().map(T::from_big).collect();
        let conv = conv?;
        match rows.last_mut() {
            Some((rn, row)) if rn == n => row.push((*l, conv)),
            _ => rows.push((*n, vec![(*l, conv)])),
        }
    }
    Some(Prepared { rows })
}

/// Products of all term pairs with q-exponent sum below `limit`, reduced
/// modulo Φ_order. Output keys are sorted.
pub(crate) fn multiply<T: KernelInt>(
    order: u32,
    a: &Prepared<T>,
    b: &Prepared<T>,
    limit: Option<i64>,
) -> Option<Vec<KernelTerm>> {
    let f = field(order);
    let deg = f.degree;
    let width = 2 * deg - 1;
    let mut index: HashMap<(i64, i64), usize> = HashMap::new();
    let mut accs: Vec<Vec<T>> = Vec::new();
    let b_min = match b.rows.first() {
        Some((n, _)) => *n,
        None => return Some(Vec::new()),
    };
    for (na, row_a) in &a.rows {
        if limit.is_some_and(|lim| na + b_min >= lim) {
            break;
        }
        for (nb, row_b) in &b.rows {
            let n = na + nb;
            if limit.is_some_and(|lim| n >= lim) {
                break;
            }
            for (la, va) in row_a {
                for (lb, vb) in row_b {
                    let key = (n, la + lb);
                    let slot = *index.entry(key).or_insert_with(|| {
                        accs.push(vec![T::zero(); width]);
                        accs.len() - 1
                    });
                    let acc = &mut accs[slot];
                    for (i, x) in va.iter().enumerate() {
                        if x.is_zero() {
                            continue;
                        }
                        for (j, y) in vb.iter().enumerate() {
                            if !T::mul_add(&mut acc[i + j], x, y) {
                                return None;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut keys: Vec<((i64, i64), usize)> = index.into_iter().collect();
    keys.sort_unstable();
    let l = order as usize;
    let mut out = Vec::with_capacity(keys.len());
    for (key, slot) in keys {
        let acc = &accs[slot];
        let mut red: Vec<T> = acc[..deg].to_vec();
        for (j, c) in acc.iter().enumerate().skip(deg) {
            if c.is_zero() {
                continue;
            }
            for (o, &w) in red.iter_mut().zip(&f.powers[j % l]) {
                if w != 0 && !T::mul_small_add(o, c, w) {
                    return None;
                }
            }
        }
        out.push((key, red.iter().map(T::to_big).collect()));
    }
    Some(out)
}
