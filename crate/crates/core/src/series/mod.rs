//! Truncated Fourier-Jacobi series Σ c(n,l) q^{n/D} ζ^{l/E}.
//!
//! A series is exact strictly below its precision bound and asserts nothing
//! at or above it. Terms live in a sorted map keyed by the integer pair
//! (n, l) on the lattice (1/D)Z × (1/E)Z; iteration is (n, l) ascending.

mod kernel;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::rational::{format_rat, parse_rat, sqrt_upper, Rat};

/// Upper end of the exactly known q-range; `None` means no truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Precision(pub Option<Rat>);

impl Precision {
    pub const EXACT: Precision = Precision(None);

    pub fn at(q: Rat) -> Self {
        Precision(Some(q))
    }

    pub fn finite(&self) -> Option<Rat> {
        self.0
    }

    pub fn is_exact(&self) -> bool {
        self.0.is_none()
    }

    pub fn shifted(&self, by: Rat) -> Self {
        Precision(self.0.map(|q| q + by))
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Whether q-exponent `n` lies in the exactly known range.
    pub fn covers(&self, n: Rat) -> bool {
        self.0.is_none_or(|q| n < q)
    }
}

impl PartialOrd for Precision {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Precision {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0, other.0) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(a), Some(b)) => a.cmp(&b),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => write!(f, "inf"),
            Some(q) => write!(f, "{}", format_rat(&q)),
        }
    }
}

/// Weight, index and character υ_η^D·υ_H^ε of a Jacobi form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FormMeta {
    pub weight: Rat,
    pub index: Rat,
    /// D mod 24.
    pub eta_power: i64,
    /// ε mod 2.
    pub heis_parity: i64,
    /// Set for quasi-modular series (E_2, G_2), which no basis accepts.
    pub quasi: bool,
}

impl FormMeta {
    pub fn new(weight: Rat, index: Rat, eta_power: i64, heis_parity: i64) -> Self {
        FormMeta {
            weight,
            index,
            eta_power: eta_power.rem_euclid(24),
            heis_parity: heis_parity.rem_euclid(2),
            quasi: false,
        }
    }

    pub fn modular(weight: i64, index: i64) -> Self {
        Self::new(Rat::from_integer(weight), Rat::from_integer(index), 0, 0)
    }

    pub fn quasi(weight: i64) -> Self {
        FormMeta {
            quasi: true,
            ..Self::modular(weight, 0)
        }
    }

    /// ε ≡ 2t mod 2 and both weight and index are half-integers.
    pub fn is_consistent(&self) -> bool {
        let two_t = self.index * Rat::from_integer(2);
        let two_k = self.weight * Rat::from_integer(2);
        two_t.is_integer()
            && two_k.is_integer()
            && !self.index.is_negative()
            && two_t.to_integer().rem_euclid(2) == self.heis_parity
    }

    /// Meta of the product of two forms.
    pub fn times(&self, other: &FormMeta) -> FormMeta {
        FormMeta {
            quasi: self.quasi || other.quasi,
            ..FormMeta::new(
                self.weight + other.weight,
                self.index + other.index,
                self.eta_power + other.eta_power,
                self.heis_parity + other.heis_parity,
            )
        }
    }

    pub fn pow(&self, m: i64) -> FormMeta {
        FormMeta {
            quasi: self.quasi,
            ..FormMeta::new(
                self.weight * Rat::from_integer(m),
                self.index * Rat::from_integer(m),
                self.eta_power * m,
                self.heis_parity * m,
            )
        }
    }

    /// Meta after z ↦ m·z: index times m², parity of the new index.
    pub fn substituted(&self, m: i64) -> FormMeta {
        FormMeta {
            quasi: self.quasi,
            ..FormMeta::new(
                self.weight,
                self.index * Rat::from_integer(m * m),
                self.eta_power,
                self.heis_parity * m,
            )
        }
    }
}

impl fmt::Display for FormMeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "weight {} index {} eta^{} parity {}{}",
            self.weight,
            self.index,
            self.eta_power,
            self.heis_parity,
            if self.quasi { " (quasi-modular)" } else { "" }
        )
    }
}

/// Support bound |l| ≤ √(4nt − h) valid for every term, seen or not.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SupportBound {
    pub index: Rat,
    pub hyperbolic_order: Rat,
}

impl SupportBound {
    /// Lower bound of n + x·l over n ≥ p and l² ≤ 4nt − h.
    pub fn min_shifted_exponent(&self, p: Rat, x: Rat) -> Rat {
        let t = self.index;
        let h = self.hyperbolic_order;
        let ax = x.abs();
        if t.is_zero() || ax.is_zero() {
            return p;
        }
        let four_t = Rat::from_integer(4) * t;
        let radicand = four_t * p - h;
        if radicand >= four_t * t * ax * ax {
            p - ax * sqrt_upper(&radicand)
        } else {
            // Interior minimum of n − |x|√(4tn − h).
            h / four_t - t * ax * ax
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct FJSeries {
    q_den: i64,
    z_den: i64,
    prec: Precision,
    terms: BTreeMap<(i64, i64), CycNum>,
}

fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

/// Exclusive integer bound on n for n/den < prec.
fn lattice_limit(prec: Precision, den: i64) -> Option<i64> {
    prec.0
        .map(|q| (q * Rat::from_integer(den)).ceil().to_integer())
}

impl FJSeries {
    pub fn zero(prec: Precision) -> Self {
        FJSeries {
            q_den: 1,
            z_den: 1,
            prec,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: CycNum) -> Self {
        let mut s = Self::zero(Precision::EXACT);
        if !c.is_zero() {
            s.terms.insert((0, 0), c);
        }
        s
    }

    pub fn one() -> Self {
        Self::constant(CycNum::one())
    }

    pub fn monomial(n: Rat, l: Rat, c: CycNum) -> Self {
        Self::from_terms(vec![(n, l, c)], Precision::EXACT)
    }

    /// Builds from rational exponents; terms at or above `prec` are dropped
    /// and repeated exponents are summed.
    pub fn from_terms(terms: Vec<(Rat, Rat, CycNum)>, prec: Precision) -> Self {
        let q_den = terms.iter().fold(1, |d, (n, _, _)| lcm(d, *n.denom()));
        let z_den = terms.iter().fold(1, |d, (_, l, _)| lcm(d, *l.denom()));
        let mut map: BTreeMap<(i64, i64), CycNum> = BTreeMap::new();
        for (n, l, c) in terms {
            if !prec.covers(n) {
                continue;
            }
            let key = (
                (n * Rat::from_integer(q_den)).to_integer(),
                (l * Rat::from_integer(z_den)).to_integer(),
            );
            match map.get_mut(&key) {
                Some(v) => *v = &*v + &c,
                None => {
                    map.insert(key, c);
                }
            }
        }
        FJSeries {
            q_den,
            z_den,
            prec,
            terms: map,
        }
        .normalized()
    }

    /// Raw constructor on a given lattice; drops zeros and reduces lattices.
    fn from_map(
        q_den: i64,
        z_den: i64,
        prec: Precision,
        terms: BTreeMap<(i64, i64), CycNum>,
    ) -> Self {
        FJSeries {
            q_den,
            z_den,
            prec,
            terms,
        }
        .normalized()
    }

    /// Drops zero and out-of-range terms and shrinks both lattices.
    fn normalized(mut self) -> Self {
        self.terms.retain(|_, c| !c.is_zero());
        if let Some(lim) = lattice_limit(self.prec, self.q_den) {
            self.terms.retain(|(n, _), _| *n < lim);
        }
        let mut gq = self.q_den;
        let mut gz = self.z_den;
        for (n, l) in self.terms.keys() {
            gq = gq.gcd(n);
            gz = gz.gcd(l);
            if gq == 1 && gz == 1 {
                break;
            }
        }
        if gq > 1 || gz > 1 {
            self.terms = std::mem::take(&mut self.terms)
                .into_iter()
                .map(|((n, l), c)| ((n / gq, l / gz), c))
                .collect();
            self.q_den /= gq;
            self.z_den /= gz;
        }
        self
    }

    pub fn q_den(&self) -> i64 {
        self.q_den
    }

    pub fn z_den(&self) -> i64 {
        self.z_den
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    /// Number of known nonzero terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// No known nonzero term.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as (q-exponent, ζ-exponent, coefficient) in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (Rat, Rat, &CycNum)> + '_ {
        self.terms
            .iter()
            .map(move |(&(n, l), c)| (Rat::new(n, self.q_den), Rat::new(l, self.z_den), c))
    }

    /// Least q-exponent of a known term.
    pub fn ord_q(&self) -> Option<Rat> {
        self.terms
            .keys()
            .next()
            .map(|&(n, _)| Rat::new(n, self.q_den))
    }

    /// min(ord, prec): the least q-exponent the full series can have.
    fn effective_ord(&self) -> Precision {
        match self.ord_q() {
            Some(o) => Precision::at(o).min(self.prec),
            None => self.prec,
        }
    }

    /// The same series with precision lowered to `prec` (never raised).
    pub fn truncate(&self, prec: Precision) -> Self {
        let p = self.prec.min(prec);
        let mut out = self.clone();
        out.prec = p;
        out.normalized()
    }

    /// Replaces the precision bound; only for constructors that know the
    /// true range.
    fn rescaled(&self, q_den: i64, z_den: i64) -> BTreeMap<(i64, i64), CycNum> {
        let (sq, sz) = (q_den / self.q_den, z_den / self.z_den);
        if sq == 1 && sz == 1 {
            return self.terms.clone();
        }
        self.terms
            .iter()
            .map(|(&(n, l), c)| ((n * sq, l * sz), c.clone()))
            .collect()
    }

    fn rescaled_refs(&self, q_den: i64, z_den: i64) -> Vec<(i64, i64, &CycNum)> {
        let (sq, sz) = (q_den / self.q_den, z_den / self.z_den);
        self.terms
            .iter()
            .map(|(&(n, l), c)| (n * sq, l * sz, c))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let qd = lcm(self.q_den, other.q_den);
        let zd = lcm(self.z_den, other.z_den);
        let mut map = self.rescaled(qd, zd);
        for (n, l, c) in other.rescaled_refs(qd, zd) {
            match map.get_mut(&(n, l)) {
                Some(v) => *v = &*v + c,
                None => {
                    map.insert((n, l), c.clone());
                }
            }
        }
        Self::from_map(qd, zd, self.prec.min(other.prec), map)
    }

    pub fn neg(&self) -> Self {
        FJSeries {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, c: &CycNum) -> Self {
        if c.is_zero() {
            return Self::zero(self.prec);
        }
        let terms = self.terms.iter().map(|(k, v)| (*k, v * c)).collect();
        Self::from_map(self.q_den, self.z_den, self.prec, terms)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scalar_mul(&CycNum::from_int(k))
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scalar_mul(&CycNum::from_rat(r))
    }

    /// Multiplies by q^a.
    pub fn shift_q(&self, a: Rat) -> Self {
        let qd = lcm(self.q_den, *a.denom());
        let sh = (a * Rat::from_integer(qd)).to_integer();
        let terms = self
            .rescaled(qd, self.z_den)
            .into_iter()
            .map(|((n, l), c)| ((n + sh, l), c))
            .collect();
        Self::from_map(qd, self.z_den, self.prec.shifted(a), terms)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = match (self.prec.0, other.prec.0) {
            (None, None) => Precision::EXACT,
            _ => {
                let p1 = match (self.prec.0, other.effective_ord().0) {
                    (Some(p), Some(o)) => Precision::at(p + o),
                    _ => Precision::EXACT,
                };
                let p2 = match (other.prec.0, self.effective_ord().0) {
                    (Some(p), Some(o)) => Precision::at(p + o),
                    _ => Precision::EXACT,
                };
                p1.min(p2)
            }
        };
        let qd = lcm(self.q_den, other.q_den);
        let zd = lcm(self.z_den, other.z_den);
        if self.is_zero() || other.is_zero() {
            return Self::zero(prec);
        }
        let a = self.rescaled_refs(qd, zd);
        let b = other.rescaled_refs(qd, zd);
        let (oa, da) = kernel::common_order_den(a.iter().map(|t| t.2));
        let (ob, db) = kernel::common_order_den(b.iter().map(|t| t.2));
        let order = (oa as u64).lcm(&(ob as u64)) as u32;
        let num_a: Vec<(i64, i64, Vec<BigInt>)> = a
            .iter()
            .map(|(n, l, c)| (*n, *l, kernel::scaled_numerators(c, order, &da)))
            .collect();
        let num_b: Vec<(i64, i64, Vec<BigInt>)> = b
            .iter()
            .map(|(n, l, c)| (*n, *l, kernel::scaled_numerators(c, order, &db)))
            .collect();
        let limit = lattice_limit(prec, qd);
        let fast = kernel::prepare::<i128>(&num_a)
            .zip(kernel::prepare::<i128>(&num_b))
            .and_then(|(pa, pb)| kernel::multiply(order, &pa, &pb, limit));
        let products = match fast {
            Some(p) => p,
            None => {
                let pa = kernel::prepare::<BigInt>(&num_a).expect("BigInt conversion");
                let pb = kernel::prepare::<BigInt>(&num_b).expect("BigInt conversion");
                kernel::multiply(order, &pa, &pb, limit).expect("BigInt kernel")
            }
        };
        let den = &da * &db;
        let terms = products
            .into_iter()
            .filter(|(_, v)| v.iter().any(|x| !x.is_zero()))
            .map(|(k, v)| (k, CycNum::from_parts(order, v, den.clone())))
            .collect();
        Self::from_map(qd, zd, prec, terms)
    }

    pub fn pow(&self, m: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Whether every term has ζ-exponent 0.
    pub fn is_pure_q(&self) -> bool {
        self.terms.keys().all(|&(_, l)| l == 0)
    }

    /// Exact quotient A/B.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let ord_b = other.ord_q().ok_or(Error::DivisionByZero)?;
        // min(PA, PB) − ord B, tightened by the relative precision of 1/B.
        let spec_prec = self.prec.min(other.prec).shifted(-ord_b);
        let inv_prec = match other.prec.0 {
            Some(pb) => match self.effective_ord().0 {
                Some(oa) => Precision::at(pb - ord_b - ord_b + oa),
                None => Precision::EXACT,
            },
            None => Precision::EXACT,
        };
        let prec = spec_prec.min(inv_prec).min(self.prec.shifted(-ord_b));
        if other.is_pure_q() {
            let inv = other
                .inverse_q_series(prec.shifted(-self.effective_ord().0.unwrap_or(Rat::zero())))?;
            return Ok(self.mul(&inv).truncate(prec));
        }
        self.long_div(other, prec)
    }

    /// 1/B for a pure q-series B, exact below `prec` (or to B's own bound).
    fn inverse_q_series(&self, want: Precision) -> Result<Self> {
        let qd = self.q_den;
        let ord = *self.terms.keys().next().ok_or(Error::DivisionByZero)?;
        let b0_inv = self.terms[&ord].inv()?;
        let ord_b = Rat::new(ord.0, qd);
        // Relative precision of B: terms up to index K are known.
        let rel = self.prec.shifted(-ord_b);
        let out_prec = rel.shifted(-ord_b).min(want);
        let steps = match out_prec.0 {
            Some(p) => ((p + ord_b) * Rat::from_integer(qd))
                .ceil()
                .to_integer()
                .max(0),
            None => {
                // Exact B with a single term inverts exactly.
                if self.terms.len() == 1 {
                    return Ok(FJSeries::from_map(
                        qd,
                        1,
                        Precision::EXACT,
                        [((-ord.0, 0), b0_inv)].into_iter().collect(),
                    ));
                }
                return Err(Error::NotDivisible(
                    "inverse of an untruncated series needs a precision bound".into(),
                ));
            }
        };
        let rest: Vec<(i64, CycNum)> = self
            .terms
            .iter()
            .skip(1)
            .map(|(&(n, _), c)| (n - ord.0, c * &b0_inv))
            .collect();
        let mut u: Vec<CycNum> = Vec::with_capacity(steps as usize);
        for k in 0..steps {
            let mut acc = if k == 0 {
                CycNum::one()
            } else {
                CycNum::zero()
            };
            for (j, bj) in &rest {
                if *j > k {
                    break;
                }
                let prev = &u[(k - j) as usize];
                if !prev.is_zero() {
                    acc = &acc - &(bj * prev);
                }
            }
            u.push(acc);
        }
        let terms = u
            .into_iter()
            .enumerate()
            .map(|(k, c)| ((k as i64 - ord.0, 0), &c * &b0_inv))
            .collect();
        Ok(FJSeries::from_map(qd, 1, out_prec, terms))
    }

    /// Quotient by recursion on q-order with exact Laurent division in ζ.
    fn long_div(&self, other: &Self, prec: Precision) -> Result<Self> {
        let qd = lcm(self.q_den, other.q_den);
        let zd = lcm(self.z_den, other.z_den);
        let b = other.rescaled(qd, zd);
        let ord_b = b.keys().next().unwrap().0;
        let lead: Vec<(i64, CycNum)> = b
            .iter()
            .filter(|((n, _), _)| *n == ord_b)
            .map(|(&(_, l), c)| (l, c.clone()))
            .collect();
        let lead_top_inv = lead.last().unwrap().1.inv()?;
        let limit = lattice_limit(prec, qd).ok_or_else(|| {
            Error::NotDivisible("quotient of untruncated series needs a precision bound".into())
        })?;
        let mut rem: BTreeMap<i64, BTreeMap<i64, CycNum>> = BTreeMap::new();
        for ((n, l), c) in self.rescaled(qd, zd) {
            if n - ord_b < limit {
                rem.entry(n).or_default().insert(l, c);
            }
        }
        let mut quot: BTreeMap<(i64, i64), CycNum> = BTreeMap::new();
        while let Some((&n, _)) = rem.iter().next() {
            let row = rem.remove(&n).unwrap();
            let row: Vec<(i64, CycNum)> = row.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            if row.is_empty() {
                continue;
            }
            let qn = n - ord_b;
            if qn >= limit {
                break;
            }
            let slice = laurent_div(&row, &lead, &lead_top_inv)
                .ok_or_else(|| Error::NotDivisible(format_rat(&Rat::new(n, qd))))?;
            for (bl_key, bc) in b.iter() {
                let (bn, bl) = *bl_key;
                let tn = qn + bn;
                if tn == n || tn - ord_b >= limit {
                    continue;
                }
                let r = rem.entry(tn).or_default();
                for (sl, sc) in &slice {
                    let prod = sc * bc;
                    let e = r.entry(sl + bl).or_insert_with(CycNum::zero);
                    *e = &*e - &prod;
                }
            }
            for (sl, sc) in slice {
                quot.insert((qn, sl), sc);
            }
        }
        Ok(Self::from_map(qd, zd, prec, quot))
    }

    /// Term (n, l) ↦ (n, m·l).
    pub fn substitute_z(&self, m: i64) -> Self {
        if m == 0 {
            return self.evaluate_z_zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(&(n, l), c)| ((n, l * m), c.clone()))
            .collect();
        Self::from_map(self.q_den, self.z_den, self.prec, terms)
    }

    /// Sum of the ζ-coefficients at each q-exponent.
    pub fn evaluate_z_zero(&self) -> Self {
        let mut map: BTreeMap<(i64, i64), CycNum> = BTreeMap::new();
        for (&(n, _), c) in &self.terms {
            let e = map.entry((n, 0)).or_insert_with(CycNum::zero);
            *e = &*e + c;
        }
        Self::from_map(self.q_den, 1, self.prec, map)
    }

    /// Sets z = rτ + s. With a support bound the precision is rigorous;
    /// without one it relies on the observed ζ-support, and the flag is false.
    pub fn specialize_z(&self, r: Rat, s: Rat, bound: Option<SupportBound>) -> (Self, bool) {
        let (prec, rigorous) = match (self.prec.0, bound) {
            (None, _) => (Precision::EXACT, true),
            (Some(p), _) if r.is_zero() => (Precision::at(p), true),
            (Some(p), Some(b)) => (Precision::at(b.min_shifted_exponent(p, r)), true),
            (Some(p), None) => {
                let lmax = self.terms.keys().map(|&(_, l)| l.abs()).max().unwrap_or(0);
                (
                    Precision::at(p - r.abs() * Rat::new(lmax, self.z_den)),
                    false,
                )
            }
        };
        let qd = lcm(self.q_den, *r.denom() * self.z_den);
        let mut map: BTreeMap<(i64, i64), CycNum> = BTreeMap::new();
        let scale_q = qd / self.q_den;
        for (&(n, l), c) in &self.terms {
            let lr = Rat::new(l, self.z_den);
            let exp_shift = (lr * r * Rat::from_integer(qd)).to_integer();
            let phase = CycNum::e(&(lr * s));
            let e = map
                .entry((n * scale_q + exp_shift, 0))
                .or_insert_with(CycNum::zero);
            *e = &*e + &(c * &phase);
        }
        (Self::from_map(qd, 1, prec, map), rigorous)
    }

    /// D_z = (2πi)^{-1} ∂/∂z: c ↦ (l/E)·c.
    pub fn d_z(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&(n, l), c)| {
                let f = BigRational::new(BigInt::from(l), BigInt::from(self.z_den));
                ((n, l), c.mul_rational(&f))
            })
            .collect();
        Self::from_map(self.q_den, self.z_den, self.prec, terms)
    }

    /// Exact coefficient of q^n ζ^l.
    pub fn coefficient(&self, n: Rat, l: Rat) -> Result<CycNum> {
        if !self.prec.covers(n) {
            return Err(Error::InsufficientPrecision {
                requested: format_rat(&n),
                available: self.prec.to_string(),
            });
        }
        let nn = n * Rat::from_integer(self.q_den);
        let ll = l * Rat::from_integer(self.z_den);
        if !nn.is_integer() || !ll.is_integer() {
            return Ok(CycNum::zero());
        }
        Ok(self
            .terms
            .get(&(nn.to_integer(), ll.to_integer()))
            .cloned()
            .unwrap_or_default())
    }

    /// Least q-exponent and its ζ-polynomial, ascending in ζ.
    pub fn leading_term(&self) -> Option<(Rat, Vec<(Rat, CycNum)>)> {
        let n0 = self.terms.keys().next()?.0;
        let row = self
            .terms
            .range((n0, i64::MIN)..=(n0, i64::MAX))
            .map(|(&(_, l), c)| (Rat::new(l, self.z_den), c.clone()))
            .collect();
        Some((Rat::new(n0, self.q_den), row))
    }

    /// First term below `q` where the two series differ, if any.
    pub fn first_difference(
        &self,
        other: &Self,
        q: Rat,
    ) -> Result<Option<(Rat, Rat, CycNum, CycNum)>> {
        for p in [self.prec, other.prec] {
            if p < Precision::at(q) {
                return Err(Error::InsufficientPrecision {
                    requested: format_rat(&q),
                    available: p.to_string(),
                });
            }
        }
        let diff = self.sub(other).truncate(Precision::at(q));
        let first = diff.terms().next().map(|(n, l, _)| (n, l));
        Ok(first.map(|(n, l)| {
            let a = self.coefficient(n, l).unwrap_or_default();
            let b = other.coefficient(n, l).unwrap_or_default();
            (n, l, a, b)
        }))
    }

    pub fn equal_to_order(&self, other: &Self, q: Rat) -> Result<bool> {
        Ok(self.first_difference(other, q)?.is_none())
    }

    /// min 4nt − l² over the support.
    pub fn hyperbolic_order(&self, t: Rat) -> Result<Rat> {
        self.terms()
            .map(|(n, l, _)| Rat::from_integer(4) * n * t - l * l)
            .min()
            .ok_or(Error::EmptySeries)
    }

    /// Applies a coefficient map keyed by exponents; zero results are dropped.
    pub fn map_terms(&self, f: impl Fn(Rat, Rat, &CycNum) -> Option<(Rat, Rat, CycNum)>) -> Self {
        let terms = self.terms().filter_map(|(n, l, c)| f(n, l, c)).collect();
        Self::from_terms(terms, self.prec)
    }

    /// Whether all coefficients are rational.
    pub fn is_rational(&self) -> bool {
        self.terms.values().all(|c| c.order() == 1)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "q_den": self.q_den,
            "z_den": self.z_den,
            "prec": self.prec.to_string(),
            "terms": self.terms.iter().map(|(&(n, l), c)| json!({"n": n, "l": l, "c": c.to_json()})).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("series: {m}"));
        let q_den = v["q_den"]
            .as_i64()
            .filter(|d| *d > 0)
            .ok_or_else(|| bad("q_den"))?;
        let z_den = v["z_den"]
            .as_i64()
            .filter(|d| *d > 0)
            .ok_or_else(|| bad("z_den"))?;
        let prec = match v["prec"].as_str().ok_or_else(|| bad("prec"))? {
            "inf" => Precision::EXACT,
            s => Precision::at(parse_rat(s)?),
        };
        let mut terms = BTreeMap::new();
        for t in v["terms"].as_array().ok_or_else(|| bad("terms"))? {
            let n = t["n"].as_i64().ok_or_else(|| bad("term n"))?;
            let l = t["l"].as_i64().ok_or_else(|| bad("term l"))?;
            terms.insert((n, l), CycNum::from_json(&t["c"])?);
        }
        Ok(Self::from_map(q_den, z_den, prec, terms))
    }

    /// Human-readable rendering grouped by q-power.
    pub fn pretty(&self) -> String {
        let mut out: Vec<String> = Vec::new();
        let mut rows: BTreeMap<i64, Vec<(i64, &CycNum)>> = BTreeMap::new();
        for (&(n, l), c) in &self.terms {
            rows.entry(n).or_default().push((l, c));
        }
        for (n, row) in rows {
            let qpow = monomial_text("q", Rat::new(n, self.q_den));
            let mut inner: Vec<String> = Vec::new();
            for (l, c) in &row {
                inner.push(term_text(c, &monomial_text("ζ", Rat::new(*l, self.z_den))));
            }
            let body = join_signed(&inner);
            let piece = match (qpow.is_empty(), row.len()) {
                (true, _) => body,
                (false, 1) if row[0].1.is_one() && row[0].0 == 0 => qpow,
                (false, _) => format!("{qpow}({body})"),
            };
            out.push(piece);
        }
        let tail = match self.prec.0 {
            Some(p) => format!("O({})", {
                let m = monomial_text("q", p);
                if m.is_empty() {
                    "1".to_string()
                } else {
                    m
                }
            }),
            None => String::new(),
        };
        if !tail.is_empty() {
            out.push(tail);
        }
        if out.is_empty() {
            return "0".into();
        }
        join_signed(&out)
    }
}

fn monomial_text(var: &str, e: Rat) -> String {
    if e.is_zero() {
        String::new()
    } else if e.is_one() {
        var.to_string()
    } else if e.is_integer() {
        format!("{var}^{}", e)
    } else {
        format!("{var}^{{{}}}", e)
    }
}

fn term_text(c: &CycNum, mono: &str) -> String {
    match c.as_rational() {
        Some(r) => {
            let neg = r.is_negative();
            let a = r.abs();
            let body = if mono.is_empty() {
                crate::rational::display_big(&a)
            } else if a.is_one() {
                mono.to_string()
            } else {
                format!("{}{}", crate::rational::display_big(&a), mono)
            };
            if neg {
                format!("-{body}")
            } else {
                body
            }
        }
        None => format!("({c}){mono}"),
    }
}

fn join_signed(parts: &[String]) -> String {
    let mut s = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            s.push_str(p);
        } else if let Some(rest) = p.strip_prefix('-') {
            s.push_str(" − ");
            s.push_str(rest);
        } else {
            s.push_str(" + ");
            s.push_str(p);
        }
    }
    s
}

/// Exact Laurent division of `num` by `den` (both ascending in exponent).
fn laurent_div(
    num: &[(i64, CycNum)],
    den: &[(i64, CycNum)],
    den_top_inv: &CycNum,
) -> Option<Vec<(i64, CycNum)>> {
    let den_low = den[0].0;
    let den_high = den.last().unwrap().0;
    let mut rem: BTreeMap<i64, CycNum> = num.iter().cloned().collect();
    let mut out = Vec::new();
    let num_low = num[0].0;
    loop {
        rem.retain(|_, c| !c.is_zero());
        let Some((&top, c)) = rem.iter().next_back() else {
            break;
        };
        // Quotient exponents run down to num_low − den_low.
        if top - den_high < num_low - den_low {
            return None;
        }
        let qe = top - den_high;
        let qc = c * den_top_inv;
        for (e, d) in den {
            let slot = rem.entry(qe + e).or_insert_with(CycNum::zero);
            *slot = &*slot - &(&qc * d);
        }
        out.push((qe, qc));
    }
    out.reverse();
    Some(out)
}

impl<'a> Add<&'a FJSeries> for &'a FJSeries {
    type Output = FJSeries;
    fn add(self, rhs: &FJSeries) -> FJSeries {
        FJSeries::add(self, rhs)
    }
}

impl<'a> Sub<&'a FJSeries> for &'a FJSeries {
    type Output = FJSeries;
    fn sub(self, rhs: &FJSeries) -> FJSeries {
        FJSeries::sub(self, rhs)
    }
}

impl<'a> Mul<&'a FJSeries> for &'a FJSeries {
    type Output = FJSeries;
    fn mul(self, rhs: &FJSeries) -> FJSeries {
        FJSeries::mul(self, rhs)
    }
}

impl Neg for &FJSeries {
    type Output = FJSeries;
    fn neg(self) -> FJSeries {
        FJSeries::neg(self)
    }
}

impl fmt::Debug for FJSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty())
    }
}

impl fmt::Display for FJSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn ser(terms: &[(Rat, Rat, i64)], prec: Rat) -> FJSeries {
        FJSeries::from_terms(
            terms
                .iter()
                .map(|&(n, l, c)| (n, l, CycNum::from_int(c)))
                .collect(),
            Precision::at(prec),
        )
    }

    fn half_theta_lead() -> FJSeries {
        ser(
            &[(rat(1, 8), rat(1, 2), 1), (rat(1, 8), rat(-1, 2), -1)],
            int(10),
        )
    }

    #[test]
    fn square_of_lead() {
        let s = half_theta_lead().pow(2);
        let want = ser(
            &[
                (rat(1, 4), int(1), 1),
                (rat(1, 4), int(0), -2),
                (rat(1, 4), int(-1), 1),
            ],
            int(10),
        );
        assert!(s.equal_to_order(&want, rat(41, 4)).is_err());
        assert_eq!(s.prec(), Precision::at(rat(81, 8)));
        assert!(s.equal_to_order(&want, int(10)).unwrap());
    }

    #[test]
    fn add_neg_and_zero() {
        let a = half_theta_lead();
        let z = &a + &a.neg();
        assert!(z.is_zero());
        assert_eq!(z.prec(), a.prec());
        assert!(a.scalar_mul(&CycNum::zero()).is_zero());
        let b = ser(&[(int(2), int(0), 5)], int(5));
        let s = &a + &b;
        assert_eq!(s.term_count(), 3);
        assert_eq!(s.prec(), Precision::at(int(5)));
    }

    #[test]
    fn one_is_identity() {
        let a = half_theta_lead();
        assert_eq!(&FJSeries::one() * &a, a);
        assert_eq!(a.substitute_z(1), a);
    }

    #[test]
    fn laurent_quotient() {
        let a = ser(&[(int(0), int(1), 1), (int(0), int(-1), -1)], int(3));
        let b = ser(&[(int(0), rat(1, 2), 1), (int(0), rat(-1, 2), -1)], int(3));
        let c = a.div(&b).unwrap();
        let want = ser(&[(int(0), rat(1, 2), 1), (int(0), rat(-1, 2), 1)], int(3));
        assert_eq!(c, want);
        assert_eq!(
            a.div(&a).unwrap(),
            FJSeries::one().truncate(Precision::at(int(3)))
        );
        assert_eq!(
            a.div(&FJSeries::zero(Precision::at(int(3)))),
            Err(Error::DivisionByZero)
        );
        let not = FJSeries::one().truncate(Precision::at(int(3))).div(&b);
        assert!(matches!(not, Err(Error::NotDivisible(_))));
    }

    #[test]
    fn inverse_of_q_series() {
        // 1/(1 - q) = 1 + q + q² + ...
        let a = ser(&[(int(0), int(0), 1), (int(1), int(0), -1)], int(6));
        let inv = FJSeries::one().div(&a).unwrap();
        assert_eq!(inv.prec(), Precision::at(int(6)));
        for k in 0..6 {
            assert!(inv.coefficient(int(k), int(0)).unwrap().is_one());
        }
    }

    #[test]
    fn derivative_and_specialization() {
        let a = half_theta_lead();
        let d = a.d_z().evaluate_z_zero();
        assert!(d.coefficient(rat(1, 8), int(0)).unwrap().is_one());
        assert!(a.evaluate_z_zero().is_zero());
        let (s, rig) = a.specialize_z(int(0), int(0), None);
        assert!(rig);
        assert_eq!(s, a.evaluate_z_zero());
        assert!(FJSeries::one().d_z().is_zero());
    }

    #[test]
    fn json_round_trip_and_order() {
        let a = half_theta_lead().pow(3);
        let v = a.to_json();
        let b = FJSeries::from_json(&v).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            serde_json::to_string(&b.to_json()).unwrap()
        );
    }

    #[test]
    fn hyperbolic() {
        let a = half_theta_lead();
        assert_eq!(a.hyperbolic_order(rat(1, 2)).unwrap(), int(0));
        assert_eq!(
            FJSeries::zero(Precision::at(int(1))).hyperbolic_order(int(1)),
            Err(Error::EmptySeries)
        );
    }

    #[test]
    fn support_bound_shift() {
        let b = SupportBound {
            index: int(1),
            hyperbolic_order: int(0),
        };
        // n − √(4n) at n = 9 is 3.
        assert!(b.min_shifted_exponent(int(9), int(1)) <= int(3));
        assert!(b.min_shifted_exponent(int(9), int(1)) > rat(29, 10));
    }
}
