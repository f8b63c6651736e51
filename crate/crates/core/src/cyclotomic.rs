//! Exact arithmetic in cyclotomic fields.
//!
//! An element of Q(ζ_L) is stored in the power basis of Q[x]/Φ_L as integer
//! numerators over one positive common denominator. Values are kept at their
//! least order L, and that order is never ≡ 2 mod 4 because Q(ζ_2m) = Q(ζ_m)
//! for odd m. Binary operations lift to the lcm of the operand orders and
//! reduce again afterwards.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::arith;
use crate::error::{Error, Result};
use crate::rational::{format_big, parse_big, Rat};

/// Cached data for one cyclotomic field.
pub(crate) struct Field {
    pub degree: usize,
    /// Coefficients of Φ_L, constant term first, monic.
    pub phi: Vec<i64>,
    /// `powers[j]` is x^j reduced modulo Φ_L, for 0 ≤ j < L.
    pub powers: Vec<Vec<i64>>,
}

fn cache() -> &'static RwLock<HashMap<u32, Arc<Field>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Field>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

pub(crate) fn field(order: u32) -> Arc<Field> {
    assert!(order >= 1);
    if let Some(f) = cache().read().unwrap().get(&order) {
        return f.clone();
    }
    let built = Arc::new(build_field(order));
    cache()
        .write()
        .unwrap()
        .entry(order)
        .or_insert(built)
        .clone()
}

/// Coefficients of Φ_L, constant term first.
pub fn cyclotomic_polynomial(order: u32) -> Vec<i64> {
    field(order).phi.clone()
}

fn build_field(order: u32) -> Field {
    let l = order as usize;
    // x^L - 1 divided by Φ_d for every proper divisor d.
    let mut poly = vec![0i64; l + 1];
    poly[0] = -1;
    poly[l] = 1;
    for d in arith::divisors(order as u64) {
        if d as u32 == order {
            continue;
        }
        let divisor = field(d as u32);
        poly = exact_div_monic(&poly, &divisor.phi);
    }
    let degree = poly.len() - 1;
    let mut powers = Vec::with_capacity(l);
    let mut cur = vec![0i64; degree.max(1)];
    cur[0] = 1;
    for _ in 0..l {
        powers.push(cur.clone());
        let top = cur[degree - 1];
        let mut next = vec![0i64; degree];
        next[1..degree].copy_from_slice(&cur[..degree - 1]);
        if top != 0 {
            for (i, c) in next.iter_mut().enumerate() {
                *c = c
                    .checked_sub(top.checked_mul(poly[i]).expect("power table overflow"))
                    .expect("power table overflow");
            }
        }
        cur = next;
    }
    Field {
        degree,
        phi: poly,
        powers,
    }
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

/// Exact element of Q(ζ_L).
#[derive(Clone)]
pub struct CycNum {
    order: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

fn phi_of(order: u32) -> usize {
    field(order).degree
}

impl CycNum {
    pub fn zero() -> Self {
        CycNum {
            order: 1,
            num: vec![BigInt::zero()],
            den: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        CycNum {
            order: 1,
            num: vec![BigInt::from(n)],
            den: BigInt::one(),
        }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        CycNum {
            order: 1,
            num: vec![r.numer().clone()],
            den: r.denom().clone(),
        }
    }

    pub fn from_rat(r: &Rat) -> Self {
        CycNum::from_rational(&crate::rational::to_big(r))
    }

    /// Builds and canonicalizes from integer numerators over `den` in Q(ζ_order).
    pub(crate) fn from_parts(order: u32, num: Vec<BigInt>, den: BigInt) -> Self {
        debug_assert_eq!(num.len(), phi_of(order));
        let mut c = CycNum { order, num, den };
        c.canonicalize();
        c
    }

    /// ζ_denom^numer at its least order.
    pub fn root_of_unity(numer: i64, denom: i64) -> Self {
        assert!(denom >= 1, "root_of_unity needs a positive denominator");
        let g = numer.gcd(&denom);
        let (mut p, mut q) = ((numer / g).rem_euclid(denom / g), denom / g);
        let mut sign = BigInt::one();
        if q % 4 == 2 {
            // e(p/2m) = -e(((p - m)/2)/m) for m odd, p odd.
            let m = q / 2;
            p = ((p - m) / 2).rem_euclid(m);
            q = m;
            sign = -sign;
        }
        let f = field(q as u32);
        let num = f.powers[p as usize]
            .iter()
            .map(|&c| BigInt::from(c) * &sign)
            .collect();
        CycNum {
            order: q as u32,
            num,
            den: BigInt::one(),
        }
    }

    /// e(x) = exp(2πix) for rational x.
    pub fn e(x: &Rat) -> Self {
        Self::root_of_unity(*x.numer(), *x.denom())
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.order == 1 && self.den.is_one() && self.num[0].is_one()
    }

    /// The value as a rational, if it is one.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    /// Power-basis coordinates as rationals, length φ(order).
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|n| BigRational::new(n.clone(), self.den.clone()))
            .collect()
    }

    pub(crate) fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// Numerators of the same value in Q(ζ_to), over the unchanged denominator.
    pub(crate) fn lifted_numerators(&self, to: u32) -> Vec<BigInt> {
        debug_assert_eq!(to % self.order, 0);
        if to == self.order {
            return self.num.clone();
        }
        let target = field(to);
        let step = (to / self.order) as usize;
        let mut out = vec![BigInt::zero(); target.degree];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &w) in out.iter_mut().zip(&target.powers[i * step]) {
                if w != 0 {
                    *o += c * w;
                }
            }
        }
        out
    }

    /// The same value represented in Q(ζ_L2), without reducing the order.
    pub fn lift(&self, l2: u32) -> Result<Self> {
        if l2 == 0 || !l2.is_multiple_of(self.order) {
            return Err(Error::IncompatibleOrder {
                from: self.order,
                to: l2,
            });
        }
        Ok(CycNum {
            order: l2,
            num: self.lifted_numerators(l2),
            den: self.den.clone(),
        })
    }

    fn common_order(&self, other: &Self) -> u32 {
        (self.order as u64).lcm(&(other.order as u64)) as u32
    }

    pub fn add(&self, other: &Self) -> Self {
        let l = self.common_order(other);
        let a = self.lifted_numerators(l);
        let b = other.lifted_numerators(l);
        let (num, den) = if self.den == other.den {
            (
                a.into_iter().zip(b).map(|(x, y)| x + y).collect(),
                self.den.clone(),
            )
        } else {
            (
                a.into_iter()
                    .zip(b)
                    .map(|(x, y)| x * &other.den + y * &self.den)
                    .collect(),
                &self.den * &other.den,
            )
        };
        Self::from_parts(l, num, den)
    }

    pub fn neg(&self) -> Self {
        CycNum {
            order: self.order,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.order == 1 {
            return other.scale(&self.num[0], &self.den);
        }
        if other.order == 1 {
            return self.scale(&other.num[0], &other.den);
        }
        let l = self.common_order(other);
        let a = self.lifted_numerators(l);
        let b = other.lifted_numerators(l);
        let num = reduce_product(l, &convolve(&a, &b));
        Self::from_parts(l, num, &self.den * &other.den)
    }

    /// Multiplies by the rational n/d.
    fn scale(&self, n: &BigInt, d: &BigInt) -> Self {
        if n.is_zero() {
            return Self::zero();
        }
        let num = self.num.iter().map(|c| c * n).collect();
        let mut out = CycNum {
            order: self.order,
            num,
            den: &self.den * d,
        };
        out.reduce_gcd();
        out
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        self.scale(r.numer(), r.denom())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.order == 1 {
            return Ok(Self::from_rational(&BigRational::new(
                self.den.clone(),
                self.num[0].clone(),
            )));
        }
        let f = field(self.order);
        let a: Vec<BigRational> = self
            .num
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let m: Vec<BigRational> = f
            .phi
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        let s = poly_inverse_mod(&a, &m);
        // s / (num / den) = s · den / num-polynomial: multiply by den.
        let mut lcm_den = BigInt::one();
        for c in &s {
            lcm_den = lcm_den.lcm(c.denom());
        }
        let mut num: Vec<BigInt> = s
            .iter()
            .map(|c| c.numer() * (&lcm_den / c.denom()) * &self.den)
            .collect();
        num.resize(f.degree, BigInt::zero());
        Ok(Self::from_parts(self.order, num, lcm_den))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Complex conjugate, the automorphism ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        let f = field(self.order);
        let l = self.order as usize;
        let mut num = vec![BigInt::zero(); f.degree];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &w) in num.iter_mut().zip(&f.powers[(l - i) % l]) {
                if w != 0 {
                    *o += c * w;
                }
            }
        }
        Self::from_parts(self.order, num, self.den.clone())
    }

    /// Floating evaluation at ζ_L = e^{2πi/L}; diagnostics only.
    pub fn to_complex(&self) -> (f64, f64) {
        let den = self.den.to_f64().unwrap_or(f64::NAN);
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.num.iter().enumerate() {
            let c = c.to_f64().unwrap_or(f64::NAN) / den;
            let ang = 2.0 * std::f64::consts::PI * j as f64 / self.order as f64;
            re += c * ang.cos();
            im += c * ang.sin();
        }
        (re, im)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order,
            "coeffs": self.coeffs().iter().map(format_big).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("cyclotomic number: {m}"));
        let order = v["order"]
            .as_u64()
            .filter(|&o| o >= 1)
            .ok_or_else(|| bad("missing order"))? as u32;
        let coeffs = v["coeffs"]
            .as_array()
            .ok_or_else(|| bad("missing coeffs"))?;
        let f = field(order);
        if coeffs.len() != f.degree {
            return Err(bad("coefficient count differs from the field degree"));
        }
        let rs = coeffs
            .iter()
            .map(|c| {
                c.as_str()
                    .ok_or_else(|| bad("coefficient not a string"))
                    .and_then(parse_big)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut den = BigInt::one();
        for r in &rs {
            den = den.lcm(r.denom());
        }
        let num = rs.iter().map(|r| r.numer() * (&den / r.denom())).collect();
        // Orders ≡ 2 mod 4 are accepted and re-expressed at half the order.
        if order % 4 == 2 {
            let c = CycNum { order, num, den };
            let mut acc = CycNum::zero();
            for (j, x) in c.coeffs().into_iter().enumerate() {
                if !x.is_zero() {
                    acc = acc.add(&CycNum::root_of_unity(j as i64, order as i64).mul_rational(&x));
                }
            }
            return Ok(acc);
        }
        Ok(Self::from_parts(order, num, den))
    }

    fn reduce_gcd(&mut self) {
        if self.is_zero() {
            *self = Self::zero();
            return;
        }
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in &mut self.num {
                *c = -&*c;
            }
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                return;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            self.den = &self.den / &g;
            for c in &mut self.num {
                *c = &*c / &g;
            }
        }
    }

    /// Reduces to lowest terms and least order.
    fn canonicalize(&mut self) {
        self.reduce_gcd();
        if self.is_zero() {
            return;
        }
        loop {
            if self.order == 1 {
                return;
            }
            if self.num[1..].iter().all(Zero::is_zero) {
                self.num.truncate(1);
                self.order = 1;
                return;
            }
            if !self.descend_once() {
                return;
            }
        }
    }

    /// Moves to a proper subfield containing the value, if one of the
    /// maximal proper cyclotomic subfields does.
    fn descend_once(&mut self) -> bool {
        let l = self.order as u64;
        for p in arith::prime_factors(l) {
            if (p > 2 && l.is_multiple_of(p * p)) || (p == 2 && l.is_multiple_of(8)) {
                // Φ_L(x) = Φ_{L/p}(x^p): the subfield is spanned by x^{pj}.
                let p = p as usize;
                if self
                    .num
                    .iter()
                    .enumerate()
                    .all(|(j, c)| j % p == 0 || c.is_zero())
                {
                    self.num = self.num.iter().step_by(p).cloned().collect();
                    self.order /= p as u32;
                    return true;
                }
            } else {
                let pp = if p == 2 { 4 } else { p };
                if let Some(y) = self.trace_descend(pp as u32) {
                    self.num = y;
                    self.den = &self.den * BigInt::from(arith::euler_phi(pp));
                    self.order /= pp as u32;
                    self.reduce_gcd();
                    return true;
                }
            }
        }
        false
    }

    /// With L = P·M, gcd(P, M) = 1 and P a prime or 4: projects onto Q(ζ_M)
    /// by the relative trace and returns φ(P) times the projection when it
    /// reproduces the value.
    fn trace_descend(&self, pp: u32) -> Option<Vec<BigInt>> {
        let l = self.order;
        let m = l / pp;
        let fm = field(m);
        let fl = field(l);
        let inv_m = arith::mod_inverse((m % pp) as i64, pp as i64);
        let inv_p = arith::mod_inverse((pp % m.max(1)) as i64, m as i64);
        let ramanujan = |alpha: i64| -> i64 {
            if pp == 4 {
                [2, 0, -2, 0][alpha as usize]
            } else if alpha == 0 {
                pp as i64 - 1
            } else {
                -1
            }
        };
        let mut y = vec![BigInt::zero(); fm.degree];
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let j = j as i64;
            let alpha = (j * inv_m).rem_euclid(pp as i64);
            let beta = if m == 1 {
                0
            } else {
                (j * inv_p).rem_euclid(m as i64)
            };
            let w = ramanujan(alpha);
            if w == 0 {
                continue;
            }
            let cw = c * w;
            for (o, &t) in y.iter_mut().zip(&fm.powers[beta as usize]) {
                if t != 0 {
                    *o += &cw * t;
                }
            }
        }
        // Lift y back and compare with φ(P)·x.
        let scale = BigInt::from(arith::euler_phi(pp as u64));
        let mut lifted = vec![BigInt::zero(); fl.degree];
        for (i, c) in y.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &t) in lifted.iter_mut().zip(&fl.powers[i * pp as usize]) {
                if t != 0 {
                    *o += c * t;
                }
            }
        }
        if lifted.iter().zip(&self.num).all(|(a, b)| *a == b * &scale) {
            Some(y)
        } else {
            None
        }
    }
}

/// Schoolbook product of coefficient vectors.
pub(crate) fn convolve(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Reduces a polynomial of any degree modulo Φ_L using x^L = 1.
pub(crate) fn reduce_product(order: u32, poly: &[BigInt]) -> Vec<BigInt> {
    let f = field(order);
    let l = order as usize;
    let mut out: Vec<BigInt> = vec![BigInt::zero(); f.degree];
    for (j, c) in poly.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if j < f.degree {
            out[j] += c;
        } else {
            for (o, &w) in out.iter_mut().zip(&f.powers[j % l]) {
                if w != 0 {
                    *o += c * w;
                }
            }
        }
    }
    out
}

fn poly_trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (vec![BigRational::zero()], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    let lead = b[db].clone();
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / &lead;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
        }
        q[i] = c;
    }
    r.truncate(db.max(1));
    poly_trim(&mut r);
    (q, r)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out: Vec<BigRational> = (0..n)
        .map(|i| {
            a.get(i).cloned().unwrap_or_else(BigRational::zero)
                - b.get(i).cloned().unwrap_or_else(BigRational::zero)
        })
        .collect();
    poly_trim(&mut out);
    out
}

/// s with s·a ≡ 1 modulo m, for coprime a and m (extended Euclid over Q).
fn poly_inverse_mod(a: &[BigRational], m: &[BigRational]) -> Vec<BigRational> {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    poly_trim(&mut r1);
    let mut s0 = vec![BigRational::zero()];
    let mut s1 = vec![BigRational::one()];
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divrem(&r0, &r1);
        let s = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    // r0 is a nonzero constant gcd.
    let g = r0[0].clone();
    let s: Vec<BigRational> = s0.iter().map(|c| c / &g).collect();
    let (_, rem) = poly_divrem(&s, m);
    rem
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.num == other.num && self.den == other.den
                || self
                    .num
                    .iter()
                    .zip(&other.num)
                    .all(|(a, b)| a * &other.den == b * &self.den);
        }
        let l = self.common_order(other);
        let a = self.lifted_numerators(l);
        let b = other.lifted_numerators(l);
        a.iter()
            .zip(&b)
            .all(|(x, y)| x * &other.den == y * &self.den)
    }
}

impl Eq for CycNum {}

impl Default for CycNum {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for CycNum {
    fn from(n: i64) -> Self {
        CycNum::from_int(n)
    }
}

impl<'a> Add<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        CycNum::add(self, rhs)
    }
}

impl<'a> Sub<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        CycNum::sub(self, rhs)
    }
}

impl<'a> Mul<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        CycNum::mul(self, rhs)
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum::neg(self)
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Renders as a polynomial in ζL, e.g. `2ζ8^3 - 1/2`.
impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{}", crate::rational::display_big(&r));
        }
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (j, c) in self.coeffs().into_iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            let mono = match j {
                0 => String::new(),
                1 => format!("ζ{}", self.order),
                _ => format!("ζ{}^{}", self.order, j),
            };
            let coef = if a.is_one() && j > 0 {
                String::new()
            } else {
                crate::rational::display_big(&a)
            };
            parts.push((neg, format!("{coef}{mono}")));
        }
        for (i, (neg, s)) in parts.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{s}")?,
                (0, false) => write!(f, "{s}")?,
                (_, true) => write!(f, " - {s}")?,
                (_, false) => write!(f, " + {s}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> CycNum {
        CycNum::root_of_unity(n, d)
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(r(1, 2), CycNum::from_int(-1));
        assert_eq!(r(1, 2).order(), 1);
        assert_eq!(&r(1, 4) * &r(1, 4), r(1, 2));
        assert_eq!(&r(1, 3) + &r(2, 3), CycNum::from_int(-1));
        assert_eq!(&r(1, 8) * &r(3, 8), CycNum::from_int(-1));
        assert_eq!(r(1, 24).inv().unwrap(), r(23, 24));
        assert!((&r(1, 5) + &r(1, 5).neg()).is_zero());
        assert_eq!(r(5, 4), r(1, 4));
        assert_eq!(r(1, 6), r(2, 3).neg());
        assert_eq!(r(1, 6).order(), 3);
    }

    #[test]
    fn phi_products() {
        for l in 1..=120u32 {
            // Π_{d | L} Φ_d = x^L - 1.
            let mut prod = vec![1i64];
            for d in arith::divisors(l as u64) {
                let p = cyclotomic_polynomial(d as u32);
                let mut next = vec![0i64; prod.len() + p.len() - 1];
                for (i, a) in prod.iter().enumerate() {
                    for (j, b) in p.iter().enumerate() {
                        next[i + j] += a * b;
                    }
                }
                prod = next;
            }
            let mut expect = vec![0i64; l as usize + 1];
            expect[0] = -1;
            expect[l as usize] = 1;
            assert_eq!(prod, expect, "L = {l}");
        }
    }

    #[test]
    fn roots_sum_to_zero() {
        for l in 2..40 {
            let s = (0..l).fold(CycNum::zero(), |acc, j| acc.add(&r(j, l)));
            assert!(s.is_zero(), "L = {l}");
        }
    }

    #[test]
    fn order_descends_to_subfields() {
        // √2 = ζ8 + ζ8^7, √3 = ζ12 + ζ12^11, √-3 = 2ζ3 + 1.
        let s2 = &r(1, 8) + &r(7, 8);
        assert_eq!(s2.order(), 8);
        assert_eq!(&s2 * &s2, CycNum::from_int(2));
        let s3 = &r(1, 12) + &r(11, 12);
        assert_eq!((&s3 * &s3).order(), 1);
        let w = &r(1, 24) * &r(7, 24);
        assert_eq!(w.order(), 3);
        let i = &r(1, 12) * &r(2, 12);
        assert_eq!(i.order(), 4);
        let z = &r(1, 15) * &r(2, 15);
        assert_eq!(z, r(1, 5));
        assert_eq!(z.order(), 5);
        let cube = &r(5, 36) * &r(7, 36);
        assert_eq!(cube.order(), 3);
    }

    #[test]
    fn lifts() {
        let m1 = CycNum::from_int(-1).lift(8).unwrap();
        assert_eq!(m1, r(4, 8));
        let q = CycNum::from_rational(&BigRational::new(5.into(), 3.into()));
        assert_eq!(q.lift(12).unwrap(), q);
        let w = r(1, 3).lift(12).unwrap();
        assert_eq!(&w * &w, r(2, 3).lift(12).unwrap());
        assert!(r(1, 3).lift(8).is_err());
    }

    #[test]
    fn inverses_and_complex() {
        let a = &(&r(1, 7) + &CycNum::from_int(3)) + &r(3, 7);
        let b = a.inv().unwrap();
        assert!((&a * &b).is_one());
        assert!(CycNum::zero().inv().is_err());
        let (x, y) = r(1, 3).to_complex();
        assert!((x + 0.5).abs() < 1e-12 && (y - 0.866_025_403_784_438_6).abs() < 1e-12);
        let (x, y) = r(1, 4).to_complex();
        assert!(x.abs() < 1e-12 && (y - 1.0).abs() < 1e-12);
        assert_eq!(CycNum::from_int(-1).to_complex(), (-1.0, 0.0));
    }

    #[test]
    fn json_round_trip() {
        let a =
            &r(1, 12).mul_rational(&BigRational::new(3.into(), 7.into())) + &CycNum::from_int(2);
        let back = CycNum::from_json(&a.to_json()).unwrap();
        assert_eq!(a, back);
        assert_eq!(a.to_json(), back.to_json());
        let six = serde_json::json!({"order": 6, "coeffs": ["0/1", "1/1"]});
        assert_eq!(CycNum::from_json(&six).unwrap(), r(1, 6));
    }

    #[test]
    fn conjugation() {
        assert_eq!(r(1, 8).conj(), r(7, 8));
        let a = &r(1, 5) + &r(2, 5);
        assert_eq!(a.conj(), &r(4, 5) + &r(3, 5));
    }
}
