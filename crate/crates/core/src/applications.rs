//! Consequences of the orbit identities: products of Weierstrass ℘
//! differences, derivatives of thetas at z = 0, special values of
//! Jacobi-Eisenstein series, and class-number identities.
//!
//! ℘ is never expanded (its ζ-support is unbounded). Each ℘ statement is
//! checked through ℘(z₁) − ℘(z₂) = 4π²η⁶ϑ(z₁+z₂)ϑ(z₁−z₂)/(ϑ²(z₁)ϑ²(z₂)),
//! cleared of denominators, up to a constant. Derivatives use the
//! normalized D = (2πi)⁻¹∂_z, so every statement has rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::cyclotomic::CycNum;
use crate::eisenstein::{
    coprime_divisor_sum, e21p, eisenstein_2k, hp_row_sum, jacobi_eisenstein,
    jacobi_eisenstein_averaged,
};
use crate::error::{Error, Result};
use crate::rational::{int, rat, sqrt_upper, Rat};
use crate::relations::registry::{Locus, Status};
use crate::series::{FJSeries, Precision, SupportBound};
use crate::thetas::{eta_power, theta, theta_char, theta_order};

/// v = a·τ + b with N·a, N·b integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionPoint {
    pub a: Rat,
    pub b: Rat,
}

impl TorsionPoint {
    pub fn new(a: Rat, b: Rat) -> Self {
        TorsionPoint { a, b }
    }

    pub fn zero() -> Self {
        Self::new(int(0), int(0))
    }

    /// Representatives (u/N)τ + v/N, 0 ≤ u, v < N.
    pub fn representatives(n: u32) -> Vec<Self> {
        let n = n as i64;
        (0..n)
            .flat_map(|u| (0..n).map(move |v| Self::new(rat(u, n), rat(v, n))))
            .collect()
    }

    /// Unreduced sum; the characteristic keeps track of the lattice shift.
    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.a + other.a, self.b + other.b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.a - other.a, self.b - other.b)
    }

    pub fn is_lattice_point(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    fn characteristic(&self) -> (Rat, Rat) {
        (self.a + rat(1, 2), self.b + rat(1, 2))
    }
}

/// ϑ_v = ϑ_{a+1/2, b+1/2}(τ, z) for v = aτ + b.
pub fn theta_shifted(v: &TorsionPoint, prec: Rat) -> FJSeries {
    let (a, b) = v.characteristic();
    theta_char(a, b, prec)
}

/// One check: sides compared below each precision in `prec_used`.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub prec_used: Vec<Rat>,
    pub locus: Option<Locus>,
    pub detail: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "id": self.name,
            "status": self.status.to_string(),
            "prec_used": self.prec_used.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        });
        if let Some(l) = &self.locus {
            v["locus"] = serde_json::json!({
                "prec": l.prec.to_string(),
                "side": l.side,
                "q": l.n.to_string(),
                "zeta": l.l.to_string(),
                "expected": l.expected.to_string(),
                "found": l.found.to_string(),
            });
        }
        if let Some(d) = &self.detail {
            v["detail"] = d.as_str().into();
        }
        v
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let precs: Vec<String> = self.prec_used.iter().map(|p| p.to_string()).collect();
        write!(
            f,
            "{:<5} {:<28} prec {}",
            self.status,
            self.name,
            precs.join(",")
        )?;
        if let Some(l) = &self.locus {
            write!(f, "  {l}")?;
        }
        if let Some(d) = &self.detail {
            write!(f, "  {d}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SectionReport {
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl SectionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for SectionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

fn error_check(name: &str, precs: Vec<Rat>, e: Error) -> Check {
    Check {
        name: name.to_string(),
        status: Status::Error,
        prec_used: precs,
        locus: None,
        detail: Some(e.to_string()),
    }
}

/// All sides from `build(p)` agree below p, for p = prec and prec + 2.
fn check_equal(name: &str, prec: Rat, build: impl Fn(Rat) -> Result<Vec<FJSeries>>) -> Check {
    check_equal_at(name, vec![prec, prec + int(2)], build)
}

fn check_equal_at(
    name: &str,
    precs: Vec<Rat>,
    build: impl Fn(Rat) -> Result<Vec<FJSeries>>,
) -> Check {
    for &p in &precs {
        let sides = match build(p) {
            Ok(s) => s,
            Err(e) => return error_check(name, precs, e),
        };
        for (i, side) in sides.iter().enumerate().skip(1) {
            match sides[0].first_difference(side, p) {
                Ok(None) => {}
                Ok(Some((n, l, expected, found))) => {
                    return Check {
                        name: name.to_string(),
                        status: Status::Fail,
                        prec_used: precs,
                        locus: Some(Locus {
                            prec: p,
                            side: i,
                            n,
                            l,
                            expected,
                            found,
                        }),
                        detail: None,
                    }
                }
                Err(e) => return error_check(name, precs, e),
            }
        }
    }
    Check {
        name: name.to_string(),
        status: Status::Pass,
        prec_used: precs,
        locus: None,
        detail: None,
    }
}

/// The c with lhs = c·rhs, or the first term where no constant works.
fn proportionality(lhs: &FJSeries, rhs: &FJSeries) -> Result<std::result::Result<CycNum, Locus>> {
    let (_, row) = rhs.leading_term().ok_or(Error::EmptySeries)?;
    let (n, l, lead) = (
        rhs.ord_q().ok_or(Error::EmptySeries)?,
        row[0].0,
        row[0].1.clone(),
    );
    let c = lhs.coefficient(n, l)?.div(&lead)?;
    let scaled = rhs.scalar_mul(&c);
    let limit = lhs
        .prec()
        .min(rhs.prec())
        .finite()
        .ok_or(Error::EmptySeries)?;
    Ok(match lhs.first_difference(&scaled, limit)? {
        None => Ok(c),
        Some((n, l, expected, found)) => Err(Locus {
            prec: limit,
            side: 1,
            n,
            l,
            expected,
            found,
        }),
    })
}

/// Runs `build(rel)` at two relative precisions; passes when both give
/// proportional sides with the same constant.
fn check_proportional(
    name: &str,
    rel: Rat,
    build: impl Fn(Rat) -> Result<(FJSeries, FJSeries)>,
) -> Check {
    let precs = vec![rel, rel + int(2)];
    let mut constants = Vec::new();
    for &p in &precs {
        let outcome = build(p).and_then(|(lhs, rhs)| proportionality(&lhs, &rhs));
        match outcome {
            Ok(Ok(c)) => constants.push(c),
            Ok(Err(locus)) => {
                return Check {
                    name: name.to_string(),
                    status: Status::Fail,
                    prec_used: precs,
                    locus: Some(locus),
                    detail: Some("ratio is not constant".into()),
                }
            }
            Err(e) => return error_check(name, precs, e),
        }
    }
    let stable = constants.windows(2).all(|w| w[0] == w[1]);
    Check {
        name: name.to_string(),
        status: if stable { Status::Pass } else { Status::Fail },
        prec_used: precs,
        locus: None,
        detail: Some(if stable {
            format!("constant {}", constants[0])
        } else {
            format!("constant drifts: {} vs {}", constants[0], constants[1])
        }),
    }
}

/// Factors ϑ_v(kz)^m (k = 0 for the constant θ_v), η^e and ϑ(kz)^m, each
/// built to relative precision `rel` so the product is exact to its own
/// leading order plus `rel`.
#[derive(Default)]
struct Product {
    shifted: BTreeMap<(TorsionPoint, i64), u32>,
    odd: BTreeMap<i64, u32>,
    eta: u32,
}

impl Product {
    fn shifted(&mut self, v: TorsionPoint, k: i64, m: u32) {
        *self.shifted.entry((v, k)).or_default() += m;
    }

    fn odd(&mut self, k: i64, m: u32) {
        *self.odd.entry(k).or_default() += m;
    }

    fn series(&self, rel: Rat) -> FJSeries {
        let mut factors: Vec<FJSeries> = Vec::new();
        for (&(v, k), &m) in &self.shifted {
            let (a, _) = v.characteristic();
            let base = theta_shifted(&v, theta_order(a) + rel);
            let s = if k == 0 {
                base.evaluate_z_zero()
            } else {
                base.substitute_z(k)
            };
            factors.push(s.pow(m));
        }
        for (&k, &m) in &self.odd {
            factors.push(theta(rat(1, 8) + rel).substitute_z(k).pow(m));
        }
        if self.eta > 0 {
            factors.push(eta_power(self.eta, rat(self.eta as i64, 24) + rel));
        }
        factors
            .into_par_iter()
            .reduce(FJSeries::one, |x, y| x.mul(&y))
    }
}

/// Cleared sides of Π_{v₁≠v₂}[℘(z+v₁) − ℘(z+v₂)] = c₁(ϑ(2Nz)/ϑ⁴(Nz))^{N²−1}η^{(4N²+3)(N²−1)}.
fn wp_shifted_sides(n: u32, rel: Rat) -> (FJSeries, FJSeries) {
    let points = TorsionPoint::representatives(n);
    let n2 = n * n;
    let mut lhs = Product::default();
    let mut rhs = Product::default();
    let mut pairs = 0;
    for v1 in &points {
        for v2 in points.iter().filter(|v| *v != v1) {
            lhs.shifted(v1.add(v2), 2, 1);
            lhs.shifted(v1.sub(v2), 0, 1);
            rhs.shifted(*v1, 1, 2);
            rhs.shifted(*v2, 1, 2);
            pairs += 1;
        }
    }
    lhs.eta = 6 * pairs;
    lhs.odd(n as i64, 4 * (n2 - 1));
    rhs.eta = (4 * n2 + 3) * (n2 - 1);
    rhs.odd(2 * n as i64, n2 - 1);
    (lhs.series(rel), rhs.series(rel))
}

/// Cleared sides of Π[℘(v₁) − ℘(v₂)] over nonzero v₁ ≠ ±v₂ = c₂Δ^{(N²−1)(N²−3)/6}.
/// Pairs with v₁ = −v₂ are left out: ℘ is even, so they would vanish.
fn wp_constant_sides(n: u32, rel: Rat) -> (FJSeries, FJSeries) {
    let points: Vec<TorsionPoint> = TorsionPoint::representatives(n)
        .into_iter()
        .filter(|v| *v != TorsionPoint::zero())
        .collect();
    let n2 = n * n;
    let mut lhs = Product::default();
    let mut rhs = Product::default();
    let mut pairs = 0;
    for v1 in &points {
        for v2 in points
            .iter()
            .filter(|v| *v != v1 && !v1.add(v).is_lattice_point())
        {
            lhs.shifted(v1.add(v2), 0, 1);
            lhs.shifted(v1.sub(v2), 0, 1);
            rhs.shifted(*v1, 0, 2);
            rhs.shifted(*v2, 0, 2);
            pairs += 1;
        }
    }
    lhs.eta = 6 * pairs;
    rhs.eta = 24 * (n2 - 1) * (n2 - 3) / 6;
    (lhs.series(rel), rhs.series(rel))
}

/// The two-torsion points 0, 1/2, τ/2, (τ+1)/2.
fn two_torsion() -> [TorsionPoint; 4] {
    [
        TorsionPoint::zero(),
        TorsionPoint::new(int(0), rat(1, 2)),
        TorsionPoint::new(rat(1, 2), int(0)),
        TorsionPoint::new(rat(1, 2), rat(1, 2)),
    ]
}

/// Π_{i<j}[℘(z+v_i) − ℘(z+v_j)] = c₃η³⁰(ϑ(4z)/ϑ⁴(2z))².
fn wp_order_two_shifted_sides(rel: Rat) -> (FJSeries, FJSeries) {
    let v = two_torsion();
    let mut lhs = Product::default();
    let mut rhs = Product::default();
    let mut pairs = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            lhs.shifted(v[i].add(&v[j]), 2, 1);
            lhs.shifted(v[i].sub(&v[j]), 0, 1);
            rhs.shifted(v[i], 1, 2);
            rhs.shifted(v[j], 1, 2);
            pairs += 1;
        }
    }
    lhs.eta = 6 * pairs;
    lhs.odd(2, 8);
    rhs.eta = 30;
    rhs.odd(4, 2);
    (lhs.series(rel), rhs.series(rel))
}

/// Π_{1<i<j}[℘(v_i) − ℘(v_j)] = c₄η¹².
fn wp_order_two_constant_sides(rel: Rat) -> (FJSeries, FJSeries) {
    let v = two_torsion();
    let mut lhs = Product::default();
    let mut rhs = Product::default();
    let mut pairs = 0;
    for i in 1..4 {
        for j in i + 1..4 {
            lhs.shifted(v[i].add(&v[j]), 0, 1);
            lhs.shifted(v[i].sub(&v[j]), 0, 1);
            rhs.shifted(v[i], 0, 2);
            rhs.shifted(v[j], 0, 2);
            pairs += 1;
        }
    }
    lhs.eta = 6 * pairs;
    rhs.eta = 12;
    (lhs.series(rel), rhs.series(rel))
}

/// ℘-product identities for odd `n` and the two-torsion variant, at
/// relative precision `rel` and `rel + 2`. Reported constants are the ratios
/// of the cleared theta forms; the ℘ constants differ from them by powers
/// of 4π² and the roots of unity relating ϑ(z + v) to ϑ_v(z).
pub fn verify_wp_products(n: u32, rel: Rat) -> Result<SectionReport> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::BadParameter(format!(
            "℘ products need odd N ≥ 3, got {n}"
        )));
    }
    let checks = vec![
        check_proportional(&format!("wp_shifted_n{n}"), rel, |r| {
            Ok(wp_shifted_sides(n, r))
        }),
        check_proportional(&format!("wp_constant_n{n}"), rel, |r| {
            Ok(wp_constant_sides(n, r))
        }),
        check_proportional("wp_shifted_n2", rel, |r| Ok(wp_order_two_shifted_sides(r))),
        check_proportional("wp_constant_n2", rel, |r| {
            Ok(wp_order_two_constant_sides(r))
        }),
    ];
    Ok(SectionReport {
        title: "Weierstrass products",
        checks,
    })
}

fn even_theta(name: &str, prec: Rat) -> FJSeries {
    match name {
        "00" => theta_char(int(0), int(0), prec),
        "01" => theta_char(int(0), rat(1, 2), prec),
        _ => theta_char(rat(1, 2), int(0), prec),
    }
}

fn constant(name: &str, prec: Rat) -> FJSeries {
    even_theta(name, prec).evaluate_z_zero()
}

/// D²ϑ_{ab}(τ, 0).
fn second_derivative_at_zero(name: &str, prec: Rat) -> FJSeries {
    even_theta(name, prec).d_z().d_z().evaluate_z_zero()
}

/// Normalized derivative formulas, D = (2πi)⁻¹∂_z, so (2πi)² = −4π²
/// turns each π² statement into a rational one.
pub fn verify_derivative_formulas(prec: Rat) -> SectionReport {
    let e2 = |p: Rat| eisenstein_2k(1, p);
    let checks = vec![
        check_equal("d_theta_zero", prec, |p| {
            Ok(vec![theta(p).d_z().evaluate_z_zero(), eta_power(3, p)])
        }),
        check_equal("d2_theta_zero", prec, |p| {
            Ok(vec![
                theta(p).d_z().d_z().evaluate_z_zero(),
                FJSeries::zero(Precision::EXACT),
            ])
        }),
        check_equal("d3_theta_zero", prec, |p| {
            let d3 = theta(p).d_z().d_z().d_z().evaluate_z_zero();
            Ok(vec![d3, e2(p).mul(&eta_power(3, p)).scale_rat(&rat(1, 4))])
        }),
        check_equal("d2_sum_over_constants", prec, |p| {
            // Σ D²ϑ_ab(0)/θ_ab = E₂/4, cleared by θ00θ01θ10.
            let (t00, t01, t10) = (constant("00", p), constant("01", p), constant("10", p));
            let lhs = second_derivative_at_zero("00", p)
                .mul(&t01)
                .mul(&t10)
                .add(&second_derivative_at_zero("01", p).mul(&t00).mul(&t10))
                .add(&second_derivative_at_zero("10", p).mul(&t00).mul(&t01));
            let rhs = e2(p).mul(&t00).mul(&t01).mul(&t10).scale_rat(&rat(1, 4));
            Ok(vec![lhs, rhs])
        }),
        check_equal("d2_cubic_combination", prec, |p| {
            let term =
                |name: &str| second_derivative_at_zero(name, p).mul(&constant(name, p).pow(3));
            Ok(vec![
                term("01").add(&term("10")).sub(&term("00")),
                FJSeries::zero(Precision::EXACT),
            ])
        }),
        check_equal("d2_difference", prec, |p| {
            // D²ϑ01/θ01 − D²ϑ10/θ10 = −θ00⁴/4, cleared by θ01θ10.
            let (t00, t01, t10) = (constant("00", p), constant("01", p), constant("10", p));
            let lhs = second_derivative_at_zero("01", p)
                .mul(&t10)
                .sub(&second_derivative_at_zero("10", p).mul(&t01));
            let rhs = t00.pow(4).mul(&t01).mul(&t10).scale_rat(&rat(-1, 4));
            Ok(vec![lhs, rhs])
        }),
        check_equal("d2_theta01", prec, |p| {
            let (t00, t01, t10) = (constant("00", p), constant("01", p), constant("10", p));
            let rhs = e2(p)
                .sub(&t00.pow(4))
                .sub(&t10.pow(4))
                .mul(&t01)
                .scale_rat(&rat(1, 12));
            Ok(vec![second_derivative_at_zero("01", p), rhs])
        }),
        check_equal("d2_theta10", prec, |p| {
            let (t00, t01, t10) = (constant("00", p), constant("01", p), constant("10", p));
            let rhs = e2(p)
                .add(&t00.pow(4))
                .add(&t01.pow(4))
                .mul(&t10)
                .scale_rat(&rat(1, 12));
            Ok(vec![second_derivative_at_zero("10", p), rhs])
        }),
        check_equal("d2_theta00", prec, |p| {
            let (t00, t01, t10) = (constant("00", p), constant("01", p), constant("10", p));
            let rhs = e2(p)
                .sub(&t01.pow(4))
                .add(&t10.pow(4))
                .mul(&t00)
                .scale_rat(&rat(1, 12));
            Ok(vec![second_derivative_at_zero("00", p), rhs])
        }),
    ];
    SectionReport {
        title: "Derivatives at z = 0",
        checks,
    }
}

/// f(τ, 1/2).
fn at_half(s: &FJSeries) -> FJSeries {
    s.specialize_z(int(0), rat(1, 2), None).0
}

/// Special values of Jacobi-Eisenstein series at z = 1/2. E_{4,4} is the
/// group-averaged series.
pub fn verify_special_values(prec: Rat) -> SectionReport {
    let checks = vec![
        check_equal("e42_half", prec, |p| {
            let e42 = at_half(&jacobi_eisenstein(4, 2, p)?.0);
            Ok(vec![
                e42,
                constant("00", p).pow(4).mul(&constant("01", p).pow(4)),
            ])
        }),
        check_equal("e44_half", prec, |p| {
            Ok(vec![
                at_half(&jacobi_eisenstein(4, 2, p)?.0),
                at_half(&jacobi_eisenstein_averaged(4, 4, p)?.0),
            ])
        }),
        check_equal("theta10_eighth", prec, |p| {
            let e42 = at_half(&jacobi_eisenstein(4, 2, p)?.0);
            Ok(vec![
                constant("10", p).pow(8),
                eisenstein_2k(2, p).sub(&e42),
            ])
        }),
        check_equal("e62_half", prec, |p| {
            let e62 = at_half(&jacobi_eisenstein(6, 2, p)?.0);
            let lhs = constant("00", p)
                .pow(4)
                .add(&constant("01", p).pow(4))
                .mul(&constant("10", p).pow(8));
            Ok(vec![lhs, e62.sub(&eisenstein_2k(3, p))])
        }),
    ];
    SectionReport {
        title: "Special values at z = 1/2",
        checks,
    }
}

/// θ00²ϑ00² + θ01²ϑ01², the orbit sum over the Γ₀(2)-orbit of (1/2, 1/2).
fn gamma0_two_form(prec: Rat) -> FJSeries {
    let term = |name: &str| {
        constant(name, prec)
            .pow(2)
            .mul(&even_theta(name, prec).pow(2))
    };
    term("00").add(&term("01"))
}

/// Precision of an index-1 holomorphic series that survives z = τ/2:
/// n + l/2 ≥ n − √n on its support.
fn lift(p: Rat) -> Rat {
    p + sqrt_upper(&p) + int(1)
}

fn holomorphic_index_one() -> SupportBound {
    SupportBound {
        index: int(1),
        hyperbolic_order: int(0),
    }
}

/// Γ₀(2) and class-number identities, with the level-p identity
/// Σ_r H^{(p)}(4n − r²) = 2Σ_{d|n, p∤d} d for p ∈ {2, 3, 5, 7, 13}, n ≤ `n_max`.
pub fn verify_class_number_identities(prec: Rat, n_max: u64) -> SectionReport {
    let e = |p: Rat| e21p(2, p);
    let mut checks = vec![
        check_equal_at("gamma0_two_first_terms", vec![int(2)], |p| {
            // ½(…) = 1 + q(ζ^{±2} + 8ζ^{±1} + 6) + O(q²).
            let half = gamma0_two_form(p).scale_rat(&rat(1, 2));
            let mut expected = vec![(int(0), int(0), CycNum::one())];
            for (l, c) in [(-2, 1), (-1, 8), (0, 6), (1, 8), (2, 1)] {
                expected.push((int(1), int(l), CycNum::from_int(c)));
            }
            Ok(vec![
                half,
                FJSeries::from_terms(expected, Precision::at(int(2))),
            ])
        }),
        check_equal("gamma0_two_eisenstein", prec, |p| {
            Ok(vec![gamma0_two_form(p), e(p)?.scale_int(24)])
        }),
        check_equal("theta_fourth_sum", prec, |p| {
            let lhs = constant("00", p).pow(4).add(&constant("01", p).pow(4));
            Ok(vec![lhs, e(p)?.evaluate_z_zero().scale_int(24)])
        }),
        check_equal("theta00_theta01_squared", prec, |p| {
            let lhs = constant("00", p).pow(2).mul(&constant("01", p).pow(2));
            Ok(vec![lhs, at_half(&e(p)?).scale_int(12)])
        }),
        check_equal("theta00_theta10_squared", prec, |p| {
            // z = τ/2: θ00²θ10² = 24 q^{1/4} E_{2,1,2}(τ, τ/2).
            let (s, _) = e(lift(p))?.specialize_z(rat(1, 2), int(0), Some(holomorphic_index_one()));
            let lhs = constant("00", p).pow(2).mul(&constant("10", p).pow(2));
            Ok(vec![lhs, s.shift_q(rat(1, 4)).scale_int(24)])
        }),
        check_equal("theta01_theta10_squared", prec, |p| {
            // z = (τ+1)/2: θ01²θ10² = 24 q^{1/4} E_{2,1,2}(τ, (τ+1)/2).
            let (s, _) =
                e(lift(p))?.specialize_z(rat(1, 2), rat(1, 2), Some(holomorphic_index_one()));
            let lhs = constant("01", p).pow(2).mul(&constant("10", p).pow(2));
            Ok(vec![lhs, s.shift_q(rat(1, 4)).scale_int(24)])
        }),
    ];
    for p in [2u64, 3, 5, 7, 13] {
        checks.push(level_p_check(p, n_max));
        checks.push(check_equal(&format!("level_{p}_series"), prec, |q| {
            level_p_series(p, q)
        }));
    }
    SectionReport {
        title: "Class-number identities",
        checks,
    }
}

fn level_p_check(p: u64, n_max: u64) -> Check {
    let name = format!("level_{p}_class_numbers");
    let failure = (1..=n_max).find_map(|n| {
        let lhs = hp_row_sum(p, n);
        let rhs = BigRational::from_integer(BigInt::from(2) * coprime_divisor_sum(n, p));
        (lhs != rhs).then(|| format!("n = {n}: {lhs} vs {rhs}"))
    });
    Check {
        name,
        status: if failure.is_none() {
            Status::Pass
        } else {
            Status::Fail
        },
        prec_used: vec![int(n_max as i64)],
        locus: None,
        detail: failure.or_else(|| Some(format!("n ≤ {n_max}"))),
    }
}

/// 12·E_{2,1,p}(τ, 0) = pE₂(pτ) − E₂(τ).
fn level_p_series(p: u64, prec: Rat) -> Result<Vec<FJSeries>> {
    let e2 = eisenstein_2k(1, prec);
    let scaled_terms = e2
        .terms()
        .filter(|(n, _, _)| *n * int(p as i64) < prec)
        .map(|(n, l, c)| (n * int(p as i64), l, c.clone()))
        .collect();
    let e2p = FJSeries::from_terms(scaled_terms, Precision::at(prec));
    let rhs = e2p.scale_int(p as i64).sub(&e2);
    Ok(vec![e21p(p, prec)?.evaluate_z_zero().scale_int(12), rhs])
}

/// All application reports.
pub fn verify_all(prec: Rat, wp_n: u32, wp_rel: Rat, n_max: u64) -> Result<Vec<SectionReport>> {
    Ok(vec![
        verify_wp_products(wp_n, wp_rel)?,
        verify_derivative_formulas(prec),
        verify_special_values(prec),
        verify_class_number_identities(prec, n_max),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_theta_at_origin_is_i_theta() {
        let s = theta_shifted(&TorsionPoint::zero(), int(3));
        assert_eq!(s, theta(int(3)).scalar_mul(&CycNum::root_of_unity(1, 4)));
    }

    #[test]
    fn shifted_theta_lattice_shift_is_a_root_of_unity() {
        let v = TorsionPoint::new(rat(1, 3), rat(2, 3));
        let w = v.add(&TorsionPoint::new(int(1), int(1)));
        let (s, t) = (theta_shifted(&v, int(3)), theta_shifted(&w, int(3)));
        let (_, row) = s.leading_term().unwrap();
        let ratio = t
            .coefficient(s.ord_q().unwrap(), row[0].0)
            .unwrap()
            .div(&row[0].1)
            .unwrap();
        assert_eq!(t, s.scalar_mul(&ratio));
    }

    #[test]
    fn reports_pass() {
        for report in [
            verify_derivative_formulas(int(4)),
            verify_special_values(int(4)),
        ] {
            assert!(report.passed(), "{report}");
        }
        let classes = verify_class_number_identities(int(4), 20);
        assert!(classes.passed(), "{classes}");
    }
}
