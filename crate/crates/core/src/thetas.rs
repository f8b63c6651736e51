//! Theta functions with rational characteristics, eta, the Heisenberg and
//! T slash actions, and orbits of the odd theta function under [Y; 0].

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::rational::{int, rat, sqrt_upper, Rat};
use crate::series::{FJSeries, FormMeta, Precision, SupportBound};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Characteristic {
    pub a: Rat,
    pub b: Rat,
}

impl Characteristic {
    pub fn new(a: Rat, b: Rat) -> Self {
        Characteristic { a, b }
    }
}

/// Element [x, y; r] of the real Heisenberg group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeisenbergElement {
    pub x: Rat,
    pub y: Rat,
    pub r: Rat,
}

impl HeisenbergElement {
    pub fn new(x: Rat, y: Rat, r: Rat) -> Self {
        HeisenbergElement { x, y, r }
    }

    pub fn identity() -> Self {
        Self::new(int(0), int(0), int(0))
    }

    /// [x1, y1; r1]·[x2, y2; r2] = [x1+x2, y1+y2; r1+r2+x1y2−x2y1].
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.x + other.x,
            self.y + other.y,
            self.r + other.r + self.x * other.y - other.x * self.y,
        )
    }
}

/// The representatives (u/N, v/N), 0 ≤ u, v < N, (u, v) ≠ (0, 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitSet {
    pub n: u32,
    pub points: Vec<Characteristic>,
}

/// ϑ_{a,b}(τ, z) = Σ_n q^{(n+a)²/2} ζ^{n+a} e((n+a)b), exact below `prec`.
pub fn theta_char(a: Rat, b: Rat, prec: Rat) -> FJSeries {
    let reach = sqrt_upper(&(prec * int(2))).ceil().to_integer() + 1;
    let center = (-a).floor().to_integer();
    let mut terms = Vec::new();
    for n in center - reach..=center + reach {
        let m = Rat::from_integer(n) + a;
        let e = m * m / int(2);
        if e < prec {
            terms.push((e, m, CycNum::e(&(m * b))));
        }
    }
    FJSeries::from_terms(terms, Precision::at(prec))
}

/// θ_{a,b}(τ) = ϑ_{a,b}(τ, 0).
pub fn theta_constant(a: Rat, b: Rat, prec: Rat) -> FJSeries {
    theta_char(a, b, prec).evaluate_z_zero()
}

/// The odd Jacobi theta function ϑ = −i·ϑ_{1/2,1/2}.
pub fn theta(prec: Rat) -> FJSeries {
    theta_char(rat(1, 2), rat(1, 2), prec).scalar_mul(&CycNum::root_of_unity(-1, 4))
}

/// ϑ_{00}, ϑ_{01}, ϑ_{10} by their two-letter names.
pub fn theta_even(name: &str, prec: Rat) -> Result<FJSeries> {
    let (a, b) = even_characteristic(name)?;
    Ok(theta_char(a, b, prec))
}

pub fn even_characteristic(name: &str) -> Result<(Rat, Rat)> {
    match name {
        "00" => Ok((int(0), int(0))),
        "01" => Ok((int(0), rat(1, 2))),
        "10" => Ok((rat(1, 2), int(0))),
        _ => Err(Error::BadParameter(format!("no even theta '{name}'"))),
    }
}

/// q^{1/8}(ζ^{1/2} − ζ^{−1/2}) Π_{n≥1} (1 − qⁿζ)(1 − qⁿζ⁻¹)(1 − qⁿ).
pub fn theta_triple_product(prec: Rat) -> FJSeries {
    let rel = prec - rat(1, 8);
    let mut acc = FJSeries::one().truncate(Precision::at(rel));
    let mut n = 1;
    while int(n) < rel {
        for l in [1, -1, 0] {
            let factor = &FJSeries::one() - &FJSeries::monomial(int(n), int(l), CycNum::one());
            acc = acc.mul(&factor);
        }
        n += 1;
    }
    let lead = FJSeries::from_terms(
        vec![
            (rat(1, 8), rat(1, 2), CycNum::one()),
            (rat(1, 8), rat(-1, 2), CycNum::from_int(-1)),
        ],
        Precision::EXACT,
    );
    acc.mul(&lead)
}

/// Π_{n≥1} (1 − qⁿ) exact below `prec`.
fn euler_product(prec: Rat) -> FJSeries {
    let mut acc = FJSeries::one().truncate(Precision::at(prec));
    let mut n = 1;
    while int(n) < prec {
        acc = acc.mul(&(&FJSeries::one() - &FJSeries::monomial(int(n), int(0), CycNum::one())));
        n += 1;
    }
    acc
}

/// η = q^{1/24} Π (1 − qⁿ).
pub fn eta(prec: Rat) -> FJSeries {
    eta_power(1, prec)
}

/// η^m exact below `prec`; η^24 = Δ.
pub fn eta_power(m: u32, prec: Rat) -> FJSeries {
    let shift = rat(m as i64, 24);
    euler_product(prec - shift).pow(m).shift_q(shift)
}

pub fn delta(prec: Rat) -> FJSeries {
    eta_power(24, prec)
}

/// Least q-exponent of ϑ_{a,b}: min_n (n+a)²/2.
pub fn theta_order(a: Rat) -> Rat {
    let f = a - a.floor();
    let d = if f > rat(1, 2) { int(1) - f } else { f };
    d * d / int(2)
}

/// ξ_{a,b} = ϑ_{a,b}/θ_{a,b}, exact below `prec`.
pub fn xi_char(a: Rat, b: Rat, prec: Rat) -> Result<FJSeries> {
    let lift = prec + theta_order(a);
    let th = theta_char(a, b, lift);
    let den = th.evaluate_z_zero();
    Ok(th.div(&den)?.truncate(Precision::at(prec)))
}

pub fn xi(name: &str, prec: Rat) -> Result<FJSeries> {
    let (a, b) = even_characteristic(name)?;
    xi_char(a, b, prec)
}

/// φ|[x, y; r] for a form of index t: (n, l, c) ↦ (n + lx + tx², l + 2tx,
/// c·e(ly + t(xy + r))). The precision assumes |l| ≤ √(4nt − h) with h the
/// smaller of 0 and the observed hyperbolic order.
pub fn slash_heisenberg(a: &FJSeries, meta: &FormMeta, h: &HeisenbergElement) -> FJSeries {
    let t = meta.index;
    let observed = a.hyperbolic_order(t).unwrap_or(int(0));
    let bound = SupportBound {
        index: t,
        hyperbolic_order: observed.min(int(0)),
    };
    slash_heisenberg_bounded(a, &bound, h)
}

pub fn slash_heisenberg_bounded(
    a: &FJSeries,
    bound: &SupportBound,
    h: &HeisenbergElement,
) -> FJSeries {
    let t = bound.index;
    let prec = match a.prec().finite() {
        Some(p) => Precision::at(bound.min_shifted_exponent(p, h.x) + t * h.x * h.x),
        None => Precision::EXACT,
    };
    let terms = a
        .terms()
        .map(|(n, l, c)| {
            let phase = CycNum::e(&(l * h.y + t * (h.x * h.y + h.r)));
            (
                n + l * h.x + t * h.x * h.x,
                l + int(2) * t * h.x,
                c * &phase,
            )
        })
        .collect();
    FJSeries::from_terms(terms, prec)
}

/// τ ↦ τ + 1 on the expansion: each term times e(n).
pub fn slash_t(a: &FJSeries) -> FJSeries {
    a.map_terms(|n, l, c| Some((n, l, c * &CycNum::e(&n))))
}

/// Every q-exponent satisfies n ≡ D/24 mod 1.
pub fn slash_check_t(a: &FJSeries, meta: &FormMeta) -> bool {
    let base = rat(meta.eta_power, 24);
    a.terms().all(|(n, _, _)| (n - base).is_integer())
}

pub fn orbit_set(n: u32) -> Result<OrbitSet> {
    if n < 2 {
        return Err(Error::BadParameter(format!(
            "orbit set needs N ≥ 2, got {n}"
        )));
    }
    let nn = n as i64;
    let points = (0..nn)
        .flat_map(|u| (0..nn).map(move |v| (u, v)))
        .filter(|&(u, v)| (u, v) != (0, 0))
        .map(|(u, v)| Characteristic::new(rat(u, nn), rat(v, nn)))
        .collect();
    Ok(OrbitSet { n, points })
}

/// ϑ|[a, b; 0] = e(−(ab + a)/2 − 1/4)·ϑ_{a+1/2, b+1/2}.
pub fn orbit_theta(y: &Characteristic, prec: Rat) -> FJSeries {
    let phase = CycNum::e(&(-(y.a * y.b + y.a) / int(2) - rat(1, 4)));
    theta_char(y.a + rat(1, 2), y.b + rat(1, 2), prec).scalar_mul(&phase)
}

/// ϑ|[a, b; 0] split as e(φ)·ψ with ψ = e(−a′b′)·ϑ_{a′,b′}, a′ = a + 1/2,
/// b′ = b + 1/2, whose coefficients e(n b′) avoid the phase's field.
pub fn orbit_theta_parts(y: &Characteristic, prec: Rat) -> (Rat, FJSeries) {
    let a1 = y.a + rat(1, 2);
    let b1 = y.b + rat(1, 2);
    let psi = theta_char(a1, b1, prec).scalar_mul(&CycNum::e(&(-a1 * b1)));
    let phase = (y.a * y.b + y.b) / int(2);
    (phase - phase.floor(), psi)
}

/// The meta of ϑ: weight 1/2, index 1/2, υ_η^3·υ_H.
pub fn theta_meta() -> FormMeta {
    FormMeta::new(rat(1, 2), rat(1, 2), 3, 1)
}

pub fn eta_meta(m: i64) -> FormMeta {
    FormMeta::new(rat(m, 2), int(0), m, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i() -> CycNum {
        CycNum::root_of_unity(1, 4)
    }

    #[test]
    fn theta_char_basics() {
        let t = theta_char(int(0), int(0), int(3));
        assert!(t.coefficient(int(0), int(0)).unwrap().is_one());
        assert!(t.coefficient(rat(1, 2), int(1)).unwrap().is_one());
        assert!(t.coefficient(rat(1, 2), int(-1)).unwrap().is_one());
        assert_eq!(
            theta_char(rat(1, 2), rat(1, 2), int(6)),
            theta(int(6)).scalar_mul(&i())
        );
    }

    #[test]
    fn characteristic_shifts() {
        let (a, b) = (rat(1, 6), rat(5, 6));
        let p = int(5);
        assert_eq!(theta_char(a + int(1), b, p), theta_char(a, b, p));
        assert_eq!(
            theta_char(a, b + int(1), p),
            theta_char(a, b, p).scalar_mul(&CycNum::e(&a))
        );
    }

    #[test]
    fn triple_product_matches_sum() {
        let p = int(8);
        let tp = theta_triple_product(p);
        assert_eq!(tp.prec(), Precision::at(p));
        assert_eq!(tp, theta(p));
        assert!(tp.evaluate_z_zero().is_zero());
    }

    #[test]
    fn theta_lead_coefficients() {
        let t = theta(int(3));
        assert!(t.coefficient(rat(1, 8), rat(1, 2)).unwrap().is_one());
        assert_eq!(
            t.coefficient(rat(1, 8), rat(-1, 2)).unwrap(),
            CycNum::from_int(-1)
        );
        let sq = t.pow(2);
        assert_eq!(
            sq.coefficient(rat(1, 4), int(0)).unwrap(),
            CycNum::from_int(-2)
        );
    }

    #[test]
    fn delta_start() {
        let d = delta(int(4));
        let want = [(1, 1), (2, -24), (3, 252)];
        for (n, c) in want {
            assert_eq!(d.coefficient(int(n), int(0)).unwrap(), CycNum::from_int(c));
        }
        assert!(d.coefficient(int(0), int(0)).unwrap().is_zero());
    }

    #[test]
    fn c1_theta_constants() {
        let p = int(6);
        let prod = theta_constant(int(0), rat(1, 2), p)
            .mul(&theta_constant(rat(1, 2), int(0), p))
            .mul(&theta_constant(int(0), int(0), p));
        assert!(prod
            .equal_to_order(&eta_power(3, p).scale_int(2), p)
            .unwrap());
    }

    #[test]
    fn orbit_theta_closed_forms() {
        let p = int(5);
        let set = orbit_set(2).unwrap();
        assert_eq!(set.points.len(), 3);
        let x1 = orbit_theta(&Characteristic::new(rat(1, 2), int(0)), p);
        assert_eq!(x1, theta_char(int(0), rat(1, 2), p).neg());
        let x2 = orbit_theta(&Characteristic::new(int(0), rat(1, 2)), p);
        assert_eq!(x2, theta_char(rat(1, 2), int(0), p).scalar_mul(&i()));
        let x3 = orbit_theta(&Characteristic::new(rat(1, 2), rat(1, 2)), p);
        assert_eq!(
            x3,
            theta_char(int(0), int(0), p).scalar_mul(&CycNum::e(&rat(-5, 8)))
        );
        for n in 2..5 {
            for y in orbit_set(n).unwrap().points {
                let (ph, psi) = orbit_theta_parts(&y, p);
                assert_eq!(psi.scalar_mul(&CycNum::e(&ph)), orbit_theta(&y, p));
            }
        }
        assert_eq!(orbit_set(3).unwrap().points.len(), 8);
        assert!(orbit_set(1).is_err());
    }

    #[test]
    fn slash_matches_closed_formula() {
        let p = int(6);
        let th = theta(p + int(2));
        let meta = theta_meta();
        for (a, b) in [
            (rat(1, 2), int(0)),
            (rat(1, 3), rat(2, 3)),
            (rat(2, 5), rat(1, 5)),
        ] {
            let s = slash_heisenberg(&th, &meta, &HeisenbergElement::new(a, b, int(0)));
            let want = orbit_theta(&Characteristic::new(a, b), p);
            assert!(s.prec() >= Precision::at(p), "{:?}", s.prec());
            assert!(s.equal_to_order(&want, p).unwrap());
        }
        let neg = slash_heisenberg(&th, &meta, &HeisenbergElement::new(int(1), int(1), int(0)));
        assert!(neg.equal_to_order(&th.neg(), int(4)).unwrap());
        assert_eq!(
            slash_heisenberg(&th, &meta, &HeisenbergElement::identity()),
            th
        );
    }

    #[test]
    fn t_congruences() {
        assert!(slash_check_t(&theta(int(4)), &theta_meta()));
        assert!(slash_check_t(&eta(int(4)), &eta_meta(1)));
        assert!(slash_check_t(&delta(int(4)), &FormMeta::modular(12, 0)));
        assert!(!slash_check_t(&eta(int(4)), &FormMeta::modular(0, 0)));
    }

    #[test]
    fn xi_normalized() {
        let x = xi("10", int(4)).unwrap();
        let z = x.evaluate_z_zero();
        assert!(z.equal_to_order(&FJSeries::one(), int(4)).unwrap());
    }
}
