//! Bernoulli and generalized Bernoulli numbers, Cohen and Hurwitz class
//! numbers, elliptic and Jacobi Eisenstein series, and the level-p series
//! E_{2,1,p}.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{self, divisors, mobius, sigma};
use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::rational::{int, Rat};
use crate::series::{FJSeries, FormMeta, Precision};

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn bernoulli_cache() -> &'static RwLock<Vec<BigRational>> {
    static CACHE: OnceLock<RwLock<Vec<BigRational>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(vec![BigRational::one()]))
}

/// B_n with B_1 = −1/2, from Σ_{k=0}^{n} C(n+1, k) B_k = 0.
pub fn bernoulli(n: u32) -> BigRational {
    if let Some(b) = bernoulli_cache().read().unwrap().get(n as usize) {
        return b.clone();
    }
    let mut cache = bernoulli_cache().write().unwrap();
    while cache.len() <= n as usize {
        let m = cache.len() as u64;
        let s = (0..m).fold(BigRational::zero(), |acc, k| {
            acc + BigRational::from_integer(binomial(m + 1, k)) * &cache[k as usize]
        });
        let b = -s / BigRational::from_integer(BigInt::from(m + 1));
        cache.push(b);
    }
    cache[n as usize].clone()
}

fn jacobi_symbol(a: i64, n: i64) -> i64 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut result = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Kronecker symbol (D/m).
pub fn kronecker(d: i64, m: i64) -> i64 {
    if m == 0 {
        return if d.abs() == 1 { 1 } else { 0 };
    }
    let mut result = if m < 0 && d < 0 { -1 } else { 1 };
    let mut m = m.abs();
    while m % 2 == 0 {
        m /= 2;
        result *= match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    if m == 1 {
        result
    } else {
        result * jacobi_symbol(d, m)
    }
}

/// D = 1, or D ≡ 1 mod 4 squarefree, or D = 4m with m ≡ 2, 3 mod 4 squarefree.
pub fn is_fundamental(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    let squarefree = |x: i64| x != 0 && arith::square_part(x.unsigned_abs()) == 1;
    match d.rem_euclid(4) {
        1 => squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m)
        }
        _ => false,
    }
}

/// B_{n,χ} = f^{n−1} Σ_{a=1}^{f} χ(a) B_n(a/f) for χ = (D0/·), f = |D0|.
pub fn gen_bernoulli(n: u32, d0: i64) -> Result<BigRational> {
    if !is_fundamental(d0) {
        return Err(Error::BadParameter(format!(
            "{d0} is not a fundamental discriminant"
        )));
    }
    let f = d0.abs();
    // f^n B_n(a/f) = Σ_k C(n,k) B_k a^{n−k} f^k; sum against χ(a) first.
    let mut power_sums = vec![BigInt::zero(); n as usize + 1];
    for a in 1..=f {
        let chi = kronecker(d0, a);
        if chi == 0 {
            continue;
        }
        let mut ap = BigInt::one();
        for s in power_sums.iter_mut() {
            *s += &ap * chi;
            ap *= a;
        }
    }
    let fb = BigInt::from(f);
    let mut total = BigRational::zero();
    for k in 0..=n {
        let term = bernoulli(k)
            * BigRational::from_integer(
                binomial(n as u64, k as u64) * fb.pow(k) * &power_sums[(n - k) as usize],
            );
        total += term;
    }
    Ok(total / BigRational::from_integer(fb))
}

/// (−1)^r M = D0 f² with D0 fundamental, or None when ≡ 2, 3 mod 4.
fn discriminant_split(d: i64) -> Option<(i64, i64)> {
    if matches!(d.rem_euclid(4), 2 | 3) {
        return None;
    }
    let f0 = arith::square_part(d.unsigned_abs()) as i64;
    let core = d / (f0 * f0);
    if core.rem_euclid(4) == 1 {
        Some((core, f0))
    } else {
        Some((core * 4, f0 / 2))
    }
}

fn cohen_cache() -> &'static RwLock<HashMap<(u32, u64), BigRational>> {
    static CACHE: OnceLock<RwLock<HashMap<(u32, u64), BigRational>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Cohen's H(r, M); H(r, 0) = ζ(1 − 2r).
pub fn cohen_number(r: u32, m: u64) -> BigRational {
    assert!(r >= 1);
    if let Some(v) = cohen_cache().read().unwrap().get(&(r, m)) {
        return v.clone();
    }
    let value = compute_cohen(r, m);
    cohen_cache().write().unwrap().insert((r, m), value.clone());
    value
}

fn compute_cohen(r: u32, m: u64) -> BigRational {
    if m == 0 {
        return -bernoulli(2 * r) / BigRational::from_integer(BigInt::from(2 * r));
    }
    let d = if r.is_multiple_of(2) {
        m as i64
    } else {
        -(m as i64)
    };
    let Some((d0, f)) = discriminant_split(d) else {
        return BigRational::zero();
    };
    let l_value = -gen_bernoulli(r, d0).expect("fundamental by construction")
        / BigRational::from_integer(BigInt::from(r));
    let mut s = BigInt::zero();
    for dd in divisors(f as u64) {
        let mu = mobius(dd);
        if mu == 0 {
            continue;
        }
        let chi = kronecker(d0, dd as i64);
        if chi == 0 {
            continue;
        }
        s += BigInt::from(mu * chi) * BigInt::from(dd).pow(r - 1) * sigma(2 * r - 1, f as u64 / dd);
    }
    l_value * BigRational::from_integer(s)
}

/// Hurwitz class number, H(0) = −1/12.
pub fn hurwitz(m: u64) -> BigRational {
    cohen_number(1, m)
}

/// H^{(p)}(D) = H(p²D) − pH(D).
pub fn hp(p: u64, d: u64) -> BigRational {
    hurwitz(p * p * d) - hurwitz(d) * BigRational::from_integer(BigInt::from(p))
}

fn q_series(prec: Rat, coeff: impl Fn(u64) -> BigRational) -> FJSeries {
    let top = prec.ceil().to_integer().max(0);
    let terms = (0..top)
        .map(|n| (int(n), int(0), CycNum::from_rational(&coeff(n as u64))))
        .collect();
    FJSeries::from_terms(terms, Precision::at(prec))
}

/// E_{2k} = 1 − (4k/B_{2k}) Σ σ_{2k−1}(n) qⁿ; k = 1 gives the quasi-modular E_2.
pub fn eisenstein_2k(k: u32, prec: Rat) -> FJSeries {
    assert!(k >= 1);
    let factor = -BigRational::from_integer(BigInt::from(4 * k)) / bernoulli(2 * k);
    q_series(prec, |n| {
        if n == 0 {
            BigRational::one()
        } else {
            &factor * BigRational::from_integer(sigma(2 * k - 1, n))
        }
    })
}

/// G_2 = −1/24 + Σ σ_1(n) qⁿ, so E_2 = −24·G_2.
pub fn g2(prec: Rat) -> FJSeries {
    q_series(prec, |n| {
        if n == 0 {
            BigRational::new(BigInt::from(-1), BigInt::from(24))
        } else {
            BigRational::from_integer(sigma(1, n))
        }
    })
}

fn jacobi_from_discriminant(prec: Rat, index: u64, coeff: impl Fn(u64) -> BigRational) -> FJSeries {
    let top = prec.ceil().to_integer().max(0);
    let mut terms = Vec::new();
    for n in 0..top {
        let disc_max = 4 * n as u64 * index;
        let rmax = arith::isqrt(disc_max) as i64;
        for r in -rmax..=rmax {
            let c = coeff(disc_max - (r * r) as u64);
            if !c.is_zero() {
                terms.push((int(n), int(r), CycNum::from_rational(&c)));
            }
        }
    }
    FJSeries::from_terms(terms, Precision::at(prec))
}

/// E_{k,1}: f(n, r) = H(k−1, 4n − r²)/H(k−1, 0).
pub fn jacobi_eisenstein_1(k: u32, prec: Rat) -> Result<(FJSeries, FormMeta)> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::BadParameter(format!(
            "E_(k,1) needs even k ≥ 4, got {k}"
        )));
    }
    let h0 = cohen_number(k - 1, 0);
    let s = jacobi_from_discriminant(prec, 1, |d| cohen_number(k - 1, d) / &h0);
    Ok((s, FormMeta::modular(k as i64, 1)))
}

/// Index-raising V_m: c′(n, r) = Σ_{d | (n, r, m)} d^{k−1} c(nm/d², r/d).
pub fn hecke_v(a: &FJSeries, meta: &FormMeta, m: u64) -> Result<(FJSeries, FormMeta)> {
    if !meta.weight.is_integer() || !meta.index.is_integer() || a.q_den() != 1 || a.z_den() != 1 {
        return Err(Error::BadParameter(
            "V_m needs integral weight, index and exponents".into(),
        ));
    }
    if m == 0 {
        return Err(Error::BadParameter("V_m needs m ≥ 1".into()));
    }
    let k = meta.weight.to_integer();
    let prec = match a.prec().finite() {
        Some(p) => Precision::at(p / int(m as i64)),
        None => Precision::EXACT,
    };
    let mi = m as i64;
    let mut terms = Vec::new();
    for (n0, r0, c) in a.terms() {
        let (n0, r0) = (n0.to_integer(), r0.to_integer());
        for d in divisors(m) {
            let d = d as i64;
            if (n0 * d) % mi != 0 {
                continue;
            }
            let n = n0 * d * d / mi;
            if !prec.covers(int(n)) {
                continue;
            }
            let w = BigRational::from_integer(BigInt::from(d).pow((k - 1) as u32));
            terms.push((int(n), int(r0 * d), c.mul_rational(&w)));
        }
    }
    let out_meta = FormMeta::new(
        meta.weight,
        meta.index * int(mi),
        meta.eta_power,
        meta.heis_parity * mi,
    );
    Ok((FJSeries::from_terms(terms, prec), out_meta))
}

/// E_{k,m} = V_m(E_{k,1})/σ_{k−1}(m).
pub fn jacobi_eisenstein(k: u32, m: u64, prec: Rat) -> Result<(FJSeries, FormMeta)> {
    if m == 0 {
        return Err(Error::BadParameter("index must be positive".into()));
    }
    let (e1, meta) = jacobi_eisenstein_1(k, prec * int(m as i64))?;
    let (v, vmeta) = hecke_v(&e1, &meta, m)?;
    let norm = BigRational::new(BigInt::one(), sigma(k - 1, m));
    Ok((
        v.scalar_mul(&CycNum::from_rational(&norm))
            .truncate(Precision::at(prec)),
        vmeta,
    ))
}

/// The group-averaged Jacobi-Eisenstein series Σ 1|γ over Γ_∞\\Γ^J.
/// Its singular coefficients (4nm = r²) are 1 exactly when r ≡ 0 mod 2m.
/// For squarefree m this is [`jacobi_eisenstein`]; for m = 4 the
/// Eisenstein space is spanned by V_4(E_{k,1})/σ_{k−1}(4) and E_{k,1}(τ, 2z),
/// and the averaged series is the combination vanishing at q ζ^{±4}.
pub fn jacobi_eisenstein_averaged(k: u32, m: u64, prec: Rat) -> Result<(FJSeries, FormMeta)> {
    match m {
        1..=3 => jacobi_eisenstein(k, m, prec),
        4 => {
            let (v, meta) = jacobi_eisenstein(k, 4, prec.max(int(2)))?;
            let (e1, _) = jacobi_eisenstein_1(k, prec.max(int(2)))?;
            let u = e1.substitute_z(2);
            let c = v
                .coefficient(int(1), int(4))?
                .as_rational()
                .ok_or_else(|| Error::BadParameter("irrational Eisenstein coefficient".into()))?;
            let alpha = (BigRational::one() - &c).recip();
            let beta = BigRational::one() - &alpha;
            let s = v
                .scalar_mul(&CycNum::from_rational(&alpha))
                .add(&u.scalar_mul(&CycNum::from_rational(&beta)));
            Ok((s.truncate(Precision::at(prec)), meta))
        }
        _ => Err(Error::BadParameter(format!(
            "averaged Eisenstein series of index {m} not supported"
        ))),
    }
}

/// E_{2,1,p} = Σ_{4n ≥ r²} H^{(p)}(4n − r²) qⁿ ζ^r.
pub fn e21p(p: u64, prec: Rat) -> Result<FJSeries> {
    if !arith::is_prime(p) {
        return Err(Error::BadParameter(format!("{p} is not prime")));
    }
    Ok(jacobi_from_discriminant(prec, 1, |d| hp(p, d)))
}

/// Σ_{d | n, gcd(d, p) = 1} d.
pub fn coprime_divisor_sum(n: u64, p: u64) -> BigInt {
    divisors(n)
        .into_iter()
        .filter(|d| d % p != 0)
        .map(BigInt::from)
        .sum()
}

/// Σ_{|r| ≤ 2√n} H^{(p)}(4n − r²).
pub fn hp_row_sum(p: u64, n: u64) -> BigRational {
    let rmax = arith::isqrt(4 * n) as i64;
    (-rmax..=rmax).fold(BigRational::zero(), |acc, r| {
        acc + hp(p, 4 * n - (r * r) as u64)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(6), q(1, 42));
        assert_eq!(bernoulli(12), q(-691, 2730));
        assert!(bernoulli(7).is_zero());
    }

    #[test]
    fn kronecker_values() {
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-4, 5), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(12, 2), 0);
        assert_eq!(kronecker(-3, 1), 1);
    }

    #[test]
    fn generalized_bernoulli() {
        assert_eq!(gen_bernoulli(1, -4).unwrap(), q(-1, 2));
        assert_eq!(gen_bernoulli(1, -3).unwrap(), q(-1, 3));
        assert_eq!(gen_bernoulli(3, -3).unwrap(), q(2, 3));
        assert_eq!(gen_bernoulli(3, -4).unwrap(), q(3, 2));
        assert!(gen_bernoulli(1, -12).is_err());
        assert!(gen_bernoulli(2, 12).is_ok());
    }

    #[test]
    fn class_numbers() {
        assert_eq!(hurwitz(0), q(-1, 12));
        assert_eq!(hurwitz(3), q(1, 3));
        assert_eq!(hurwitz(4), q(1, 2));
        assert_eq!(hurwitz(12), q(4, 3));
        assert_eq!(hurwitz(16), q(3, 2));
        assert!(hurwitz(1).is_zero() && hurwitz(2).is_zero());
        assert_eq!(cohen_number(3, 0), q(-1, 252));
        assert_eq!(hp(2, 0), q(1, 12));
    }

    #[test]
    fn e4_and_e41() {
        let e4 = eisenstein_2k(2, int(3));
        assert_eq!(
            e4.coefficient(int(1), int(0)).unwrap(),
            CycNum::from_int(240)
        );
        assert_eq!(
            e4.coefficient(int(2), int(0)).unwrap(),
            CycNum::from_int(2160)
        );
        assert_eq!(
            g2(int(2)).coefficient(int(0), int(0)).unwrap(),
            CycNum::from_rat(&rat(-1, 24))
        );
        let (e41, _) = jacobi_eisenstein_1(4, int(3)).unwrap();
        for (l, c) in [(2, 1), (1, 56), (0, 126), (-1, 56), (-2, 1)] {
            assert_eq!(
                e41.coefficient(int(1), int(l)).unwrap(),
                CycNum::from_int(c)
            );
        }
        assert!(e41.coefficient(int(0), int(0)).unwrap().is_one());
        assert!(e41.coefficient(int(0), int(1)).unwrap().is_zero());
    }

    #[test]
    fn hecke_constant_term() {
        let (e41, meta) = jacobi_eisenstein_1(4, int(12)).unwrap();
        let (v, vmeta) = hecke_v(&e41, &meta, 3).unwrap();
        assert_eq!(v.coefficient(int(0), int(0)).unwrap(), CycNum::from_int(28));
        assert_eq!(vmeta.index, int(3));
        assert_eq!(hecke_v(&e41, &meta, 1).unwrap().0, e41);
        assert!(v.hyperbolic_order(int(3)).unwrap() >= int(0));
    }

    #[test]
    fn averaged_index_four() {
        let (e, _) = jacobi_eisenstein_averaged(4, 4, int(5)).unwrap();
        assert!(e.coefficient(int(1), int(4)).unwrap().is_zero());
        assert!(e.coefficient(int(4), int(8)).unwrap().is_one());
        assert_eq!(e.coefficient(int(0), int(0)).unwrap(), CycNum::one());
        let (v, _) = jacobi_eisenstein(4, 2, int(3)).unwrap();
        let (a, _) = jacobi_eisenstein_averaged(4, 2, int(3)).unwrap();
        assert_eq!(v, a);
    }

    #[test]
    fn class_number_sum() {
        for p in [2u64, 3, 5] {
            for n in 1..=12 {
                let lhs = hp_row_sum(p, n);
                let rhs = BigRational::from_integer(coprime_divisor_sum(n, p) * 2);
                assert_eq!(lhs, rhs, "p = {p}, n = {n}");
            }
        }
    }
}
