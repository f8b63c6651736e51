//! Orbit operators built from ϑ|Y over R_N: Tr, W, the antisymmetric A
//! combinations, the full orbit product, and checks of the Jacobi form
//! axioms.

pub mod registry;
pub mod search;

use rayon::prelude::*;

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::rational::{int, rat, Rat};
use crate::series::{FJSeries, FormMeta, Precision};
use crate::thetas::{
    eta_power, orbit_set, orbit_theta_parts, slash_check_t, slash_heisenberg, theta, theta_char,
    theta_order, Characteristic, HeisenbergElement,
};

/// Parameters (N; a, b, c, d) of Tr^{(N)}_{a,b,c,d}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrParams {
    pub n: u32,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl TrParams {
    /// Admissible parameters only.
    pub fn new(n: u32, a: u32, b: u32, c: u32, d: u32) -> Result<Self> {
        let p = Self::unchecked(n, a, b, c, d);
        if !p.is_admissible() {
            return Err(Error::BadParameter(format!(
                "Tr({n}; {a},{b},{c},{d}) needs N | b+2c and a+b+c+d ≡ 0 mod 2N"
            )));
        }
        Ok(p)
    }

    pub fn unchecked(n: u32, a: u32, b: u32, c: u32, d: u32) -> Self {
        TrParams { n, a, b, c, d }
    }

    pub fn is_admissible(&self) -> bool {
        self.n >= 2
            && (self.b + 2 * self.c).is_multiple_of(self.n)
            && self.total().is_multiple_of(2 * self.n)
    }

    pub fn total(&self) -> u32 {
        self.a + self.b + self.c + self.d
    }

    /// Weight (a+b+c+d)/2, index (b+4c+N²d)/2, υ_η^{3(a+b+c+d)}·υ_H^{b+Nd}.
    pub fn meta(&self) -> FormMeta {
        let l = self.total() as i64;
        let n = self.n as i64;
        FormMeta::new(
            rat(l, 2),
            rat(self.b as i64 + 4 * self.c as i64 + n * n * self.d as i64, 2),
            3 * l,
            self.b as i64 + n * self.d as i64,
        )
    }

    pub fn id(&self) -> String {
        format!("tr{}_{}_{}_{}_{}", self.n, self.a, self.b, self.c, self.d)
    }
}

/// ψ^a(τ,0)·ψ^b(τ,z)·ψ^c(τ,2z)·ψ^d(τ,Nz) for one orbit point, with the
/// orbit phase raised to the total power.
fn orbit_monomial(y: &Characteristic, exps: [(i64, u32); 4], prec: Rat) -> FJSeries {
    let (phase, psi) = orbit_theta_parts(y, prec);
    let total: u32 = exps.iter().map(|e| e.1).sum();
    let mut acc = FJSeries::one();
    for (m, e) in exps {
        if e > 0 {
            acc = acc.mul(&psi.substitute_z(m).pow(e));
        }
    }
    acc.scalar_mul(&CycNum::e(&(phase * int(total as i64))))
}

fn sum_in_order(parts: Vec<FJSeries>, prec: Rat) -> FJSeries {
    parts
        .into_iter()
        .fold(FJSeries::zero(Precision::EXACT), |acc, s| acc.add(&s))
        .truncate(Precision::at(prec))
}

/// Tr^{(N)}_{a,b,c,d} without the admissibility check, for probing.
pub fn tr_unchecked(p: &TrParams, prec: Rat) -> Result<FJSeries> {
    let set = orbit_set(p.n)?;
    let n = p.n as i64;
    let exps = [(0, p.a), (1, p.b), (2, p.c), (n, p.d)];
    let parts: Vec<FJSeries> = set
        .points
        .par_iter()
        .map(|y| orbit_monomial(y, exps, prec))
        .collect();
    Ok(sum_in_order(parts, prec))
}

pub fn tr(p: &TrParams, prec: Rat) -> Result<(FJSeries, FormMeta)> {
    if !p.is_admissible() {
        return Err(Error::BadParameter(format!("{} is not admissible", p.id())));
    }
    Ok((tr_unchecked(p, prec)?, p.meta()))
}

/// Weight 0, index (a + N²c)/2 + 2b.
pub fn w_meta(n: u32, a: u32, b: u32, c: u32) -> FormMeta {
    let nn = n as i64;
    let index = rat(a as i64 + nn * nn * c as i64, 2) + int(2 * b as i64);
    FormMeta::new(int(0), index, 0, (index * int(2)).to_integer())
}

/// W^{(N)}_{a,b,c} = Σ_Y (ϑ|Y)^a(z)(ϑ|Y)^b(2z)(ϑ|Y)^c(Nz)/(ϑ|Y)^{a+b+c}(0).
pub fn w_form(n: u32, a: u32, b: u32, c: u32, prec: Rat) -> Result<(FJSeries, FormMeta)> {
    if n < 2 || !(a + 2 * b).is_multiple_of(n) {
        return Err(Error::BadParameter(format!(
            "W({n}; {a},{b},{c}) needs N | a+2b"
        )));
    }
    let set = orbit_set(n)?;
    let m = a + b + c;
    let parts: Vec<Result<FJSeries>> = set
        .points
        .par_iter()
        .map(|y| {
            // The orbit phases cancel; the denominator has order m·ord ψ(0).
            let a1 = y.a + rat(1, 2);
            let lift = prec + theta_order(a1) * int(m as i64);
            let (_, psi) = orbit_theta_parts(y, lift);
            let mut num = FJSeries::one();
            for (k, e) in [(1, a), (2, b), (n as i64, c)] {
                if e > 0 {
                    num = num.mul(&psi.substitute_z(k).pow(e));
                }
            }
            let den = psi.evaluate_z_zero().pow(m);
            Ok(num.div(&den)?.truncate(Precision::at(prec)))
        })
        .collect();
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    let s = sum_in_order(parts, prec);
    if s.prec() < Precision::at(prec) {
        return Err(Error::InsufficientPrecision {
            requested: prec.to_string(),
            available: s.prec().to_string(),
        });
    }
    Ok((s, w_meta(n, a, b, c)))
}

/// X_1 = (1/2, 0), X_2 = (0, 1/2), X_3 = (1/2, 1/2).
pub fn two_torsion_points() -> [Characteristic; 3] {
    [
        Characteristic::new(rat(1, 2), int(0)),
        Characteristic::new(int(0), rat(1, 2)),
        Characteristic::new(rat(1, 2), rat(1, 2)),
    ]
}

/// The antisymmetric differences S_ij and s_ij for one exponent triple.
pub struct AntisymmetricParts {
    big: [FJSeries; 3],
    small: [FJSeries; 3],
}

impl AntisymmetricParts {
    pub fn new(a: u32, b: u32, c: u32, prec: Rat) -> Self {
        let pts = two_torsion_points();
        let total = a + b + c;
        let big = pts
            .each_ref()
            .map(|x| orbit_monomial(x, [(0, a), (1, b), (2, c), (0, 0)], prec));
        let small = pts
            .each_ref()
            .map(|x| orbit_monomial(x, [(0, total), (1, 0), (2, 0), (0, 0)], prec));
        AntisymmetricParts { big, small }
    }

    /// S_ij for i, j ∈ {1, 2, 3}.
    pub fn s_big(&self, i: usize, j: usize) -> FJSeries {
        self.big[i - 1].sub(&self.big[j - 1])
    }

    /// s_ij for i, j ∈ {1, 2, 3}.
    pub fn s_small(&self, i: usize, j: usize) -> FJSeries {
        self.small[i - 1].sub(&self.small[j - 1])
    }
}

/// Weight 3(a+b+c)/2, index i(b/2 + 2c); trivial character when
/// a+b+c ≡ 4 mod 8, υ_η^{12} when ≡ 0 mod 8.
pub fn a_meta(i: u32, a: u32, b: u32, c: u32) -> FormMeta {
    let l = (a + b + c) as i64;
    let index = int(i as i64) * (rat(b as i64, 2) + int(2 * c as i64));
    let d = if l % 8 == 4 { 0 } else { 12 };
    FormMeta::new(rat(3 * l, 2), index, d, 0)
}

/// A^{(i)}_{a,b,c}.
pub fn a_form(i: u32, a: u32, b: u32, c: u32, prec: Rat) -> Result<(FJSeries, FormMeta)> {
    if !(1..=3).contains(&i) || !b.is_multiple_of(2) || !(a + b + c).is_multiple_of(4) {
        return Err(Error::BadParameter(format!(
            "A^({i})({a},{b},{c}) needs i ∈ {{1,2,3}}, b even and a+b+c ≡ 0 mod 4"
        )));
    }
    let p = AntisymmetricParts::new(a, b, c, prec);
    let (s12, s13, s23) = (p.s_big(1, 2), p.s_big(1, 3), p.s_big(2, 3));
    let (t12, t13, t23) = (p.s_small(1, 2), p.s_small(1, 3), p.s_small(2, 3));
    let s = match i {
        1 => s12
            .mul(&t13)
            .mul(&t23)
            .add(&s13.mul(&t12).mul(&t23))
            .add(&s23.mul(&t13).mul(&t12))
            .scale_rat(&rat(1, 6)),
        2 => s12
            .mul(&s13)
            .mul(&t23)
            .add(&s13.mul(&t12).mul(&s23))
            .add(&s23.mul(&t13).mul(&s12))
            .scale_rat(&rat(1, 6)),
        _ => s12.mul(&s13).mul(&s23).scale_rat(&rat(1, 2)),
    };
    Ok((s.truncate(Precision::at(prec)), a_meta(i, a, b, c)))
}

/// Π_{(u,v) ≠ (0,0)} ϑ_{u/N+1/2, v/N+1/2}(τ, z).
pub fn product_orbit(n: u32, prec: Rat) -> Result<FJSeries> {
    let set = orbit_set(n)?;
    let factors: Vec<FJSeries> = set
        .points
        .par_iter()
        .map(|y| theta_char(y.a + rat(1, 2), y.b + rat(1, 2), prec))
        .collect();
    Ok(factors
        .into_iter()
        .fold(FJSeries::one(), |acc, f| acc.mul(&f))
        .truncate(Precision::at(prec)))
}

/// The meta of η^{N²−1}ϑ(τ,Nz)/ϑ(τ,z).
pub fn product_orbit_meta(n: u32) -> FormMeta {
    let m = (n * n - 1) as i64;
    FormMeta::new(rat(m, 2), rat(m, 2), m, m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitProductReport {
    pub n: u32,
    /// Π·ϑ(τ,z) = (−1)^{N−1}η^{N²−1}ϑ(τ,Nz) below prec.
    pub cleared_identity: bool,
    /// Π(τ,0) = (−1)^{N−1}N·η^{N²−1} below prec.
    pub constant_identity: bool,
    /// The z = 0 product starts with (−1)^{N−1}N·q^{(N²−1)/24}.
    pub lead_term: bool,
}

impl OrbitProductReport {
    pub fn passed(&self) -> bool {
        self.cleared_identity && self.constant_identity && self.lead_term
    }
}

pub fn verify_orbit_product(n: u32, prec: Rat) -> Result<OrbitProductReport> {
    let prod = product_orbit(n, prec)?;
    let m = n * n - 1;
    let sign = if n.is_multiple_of(2) { -1 } else { 1 };
    let eta = eta_power(m, prec);
    let th = theta(prec);
    let lhs = prod.mul(&th);
    let rhs = eta.mul(&th.substitute_z(n as i64)).scale_int(sign);
    let cleared_identity = lhs.equal_to_order(&rhs, prec)?;
    let constant = prod.evaluate_z_zero();
    let constant_identity = constant.equal_to_order(&eta.scale_int(sign * n as i64), prec)?;
    let lead_term = match constant.leading_term() {
        Some((e, row)) => {
            e == rat(m as i64, 24) && row == vec![(int(0), CycNum::from_int(sign * n as i64))]
        }
        None => false,
    };
    Ok(OrbitProductReport {
        n,
        cleared_identity,
        constant_identity,
        lead_term,
    })
}

/// Outcome of the four Jacobi form axioms on the computed range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    /// n ≡ D/24 mod 1.
    pub q_congruence: bool,
    /// l ≡ ε/2 mod 1.
    pub zeta_parity: bool,
    /// f|[1,0;0] = (−1)^ε f; None when 2t is not integral.
    pub ellipticity: Option<bool>,
    /// 4nt − l² ≥ 0 on the support.
    pub holomorphy: bool,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.q_congruence && self.zeta_parity && self.ellipticity.unwrap_or(true) && self.holomorphy
    }
}

pub fn check_form_axioms(a: &FJSeries, meta: &FormMeta) -> AxiomReport {
    let q_congruence = slash_check_t(a, meta);
    let half_eps = rat(meta.heis_parity, 2);
    let zeta_parity = a.terms().all(|(_, l, _)| (l - half_eps).is_integer());
    let ellipticity = if (meta.index * int(2)).is_integer() {
        Some(ellipticity_holds(a, meta))
    } else {
        None
    };
    let holomorphy = a.hyperbolic_order(meta.index).map_or(true, |h| h >= int(0));
    AxiomReport {
        q_congruence,
        zeta_parity,
        ellipticity,
        holomorphy,
    }
}

/// f(n, l) = (−1)^ε f(n + l + t, l + 2t) wherever both sides are known.
pub fn ellipticity_holds(a: &FJSeries, meta: &FormMeta) -> bool {
    let shifted = slash_heisenberg(a, meta, &HeisenbergElement::new(int(1), int(0), int(0)));
    let expected = if meta.heis_parity == 1 {
        a.neg()
    } else {
        a.clone()
    };
    let q = shifted.prec().min(a.prec());
    match q.finite() {
        Some(q) => shifted.equal_to_order(&expected, q).unwrap_or(false),
        None => shifted == expected,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::jacobi_eisenstein_1;
    use crate::thetas::eta;

    #[test]
    fn tr_examples() {
        let (c00, meta) = tr(&TrParams::new(2, 4, 0, 0, 0).unwrap(), int(6)).unwrap();
        assert!(c00.is_zero());
        assert_eq!(meta, FormMeta::new(int(2), int(0), 12, 0));
        let (t, _) = tr(&TrParams::new(3, 12, 0, 0, 0).unwrap(), int(4)).unwrap();
        assert!(t
            .equal_to_order(&eta_power(12, int(4)).scale_int(-72), int(4))
            .unwrap());
        assert!(TrParams::new(2, 1, 0, 0, 0).is_err());
    }

    #[test]
    fn c02_against_cohen_eisenstein() {
        let (t, meta) = tr(&TrParams::new(2, 6, 2, 0, 0).unwrap(), int(8)).unwrap();
        let (e41, _) = jacobi_eisenstein_1(4, int(8)).unwrap();
        assert!(t.equal_to_order(&e41.scale_int(2), int(8)).unwrap());
        assert!(check_form_axioms(&t, &meta).passed());
    }

    #[test]
    fn orbit_product_small() {
        for n in 2..=4 {
            let r = verify_orbit_product(n, int(3)).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        let c = product_orbit(2, int(4)).unwrap().evaluate_z_zero();
        assert!(c
            .equal_to_order(&eta(int(4)).pow(3).scale_int(-2), int(4))
            .unwrap());
    }

    #[test]
    fn w_and_a_factors() {
        let (w, meta) = w_form(2, 2, 0, 0, int(3)).unwrap();
        let (phi, _) = crate::spaces::generator("phi01", int(3)).unwrap();
        assert!(w.scale_int(4).equal_to_order(&phi, int(3)).unwrap());
        assert_eq!(meta.index, int(1));
        let (a3, meta) = a_form(3, 4, 0, 0, int(4)).unwrap();
        let e6 = crate::eisenstein::eisenstein_2k(3, int(4));
        assert!(a3.equal_to_order(&e6, int(4)).unwrap());
        assert_eq!(meta, FormMeta::modular(6, 0));
    }

    #[test]
    fn axioms_of_basic_forms() {
        let th = theta(int(6));
        assert!(check_form_axioms(&th, &crate::thetas::theta_meta()).passed());
        let (phi, meta) = crate::spaces::generator("phim21", int(4)).unwrap();
        let r = check_form_axioms(&phi, &meta);
        assert!(!r.holomorphy && r.ellipticity == Some(true));
    }
}
