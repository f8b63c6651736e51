//! Generators of weak Jacobi forms, bases of J_{k,t}(υ_η^D·υ_H^ε) and exact
//! decomposition of a series in a basis.
//!
//! Bases are reduced to the even-weight, integral-index ring
//! M_*[φ_{0,1}, φ_{−2,1}] by peeling off η^D and at most one of the
//! cofactors φ_{−1,2}, φ_{0,3/2}, φ_{−1,1/2}.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cyclotomic::CycNum;
use crate::eisenstein::{eisenstein_2k, jacobi_eisenstein_1};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{display_big, format_rat, int, rat, Rat};
use crate::series::{FJSeries, FormMeta, Precision};
use crate::thetas::{delta, eta_power, theta, xi};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Phi01,
    Phi02,
    Phi03,
    Phi04,
    PhiM21,
    PhiM12,
    Phi032,
    PhiM112,
}

impl Generator {
    pub const ALL: [Generator; 8] = [
        Generator::Phi01,
        Generator::Phi02,
        Generator::Phi03,
        Generator::Phi04,
        Generator::PhiM21,
        Generator::PhiM12,
        Generator::Phi032,
        Generator::PhiM112,
    ];

    /// Accepts "phi01", "phi_0_1" and "phi0,1" spellings.
    pub fn from_name(name: &str) -> Result<Self> {
        let key: String = name
            .chars()
            .filter(|c| !matches!(c, '_' | ',' | '/'))
            .collect();
        Ok(match key.as_str() {
            "phi01" => Generator::Phi01,
            "phi02" => Generator::Phi02,
            "phi03" => Generator::Phi03,
            "phi04" => Generator::Phi04,
            "phim21" | "phi-21" => Generator::PhiM21,
            "phim12" | "phi-12" => Generator::PhiM12,
            "phi032" => Generator::Phi032,
            "phim112" | "phi-112" => Generator::PhiM112,
            _ => return Err(Error::BadParameter(format!("unknown generator '{name}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Generator::Phi01 => "phi01",
            Generator::Phi02 => "phi02",
            Generator::Phi03 => "phi03",
            Generator::Phi04 => "phi04",
            Generator::PhiM21 => "phim21",
            Generator::PhiM12 => "phim12",
            Generator::Phi032 => "phi032",
            Generator::PhiM112 => "phim112",
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Generator::Phi01 => "φ0,1",
            Generator::Phi02 => "φ0,2",
            Generator::Phi03 => "φ0,3",
            Generator::Phi04 => "φ0,4",
            Generator::PhiM21 => "φ-2,1",
            Generator::PhiM12 => "φ-1,2",
            Generator::Phi032 => "φ0,3/2",
            Generator::PhiM112 => "φ-1,1/2",
        }
    }

    pub fn meta(&self) -> FormMeta {
        match self {
            Generator::Phi01 => FormMeta::modular(0, 1),
            Generator::Phi02 => FormMeta::modular(0, 2),
            Generator::Phi03 => FormMeta::modular(0, 3),
            Generator::Phi04 => FormMeta::modular(0, 4),
            Generator::PhiM21 => FormMeta::modular(-2, 1),
            Generator::PhiM12 => FormMeta::modular(-1, 2),
            Generator::Phi032 => FormMeta::new(int(0), rat(3, 2), 0, 1),
            Generator::PhiM112 => FormMeta::new(int(-1), rat(1, 2), 0, 1),
        }
    }

    /// The closed formula, exact below `prec`.
    fn build(&self, prec: Rat) -> Result<FJSeries> {
        let p = Precision::at(prec);
        let s = match self {
            Generator::Phi01 => {
                let lift = prec + int(1);
                let (e41, _) = jacobi_eisenstein_1(4, lift)?;
                let (e61, _) = jacobi_eisenstein_1(6, lift)?;
                let e4 = eisenstein_2k(2, lift);
                let e6 = eisenstein_2k(3, lift);
                let num = e4.pow(2).mul(&e41).sub(&e6.mul(&e61));
                num.div(&delta(lift).scale_int(144))?
            }
            Generator::Phi02 => {
                let names = ["00", "01", "10"];
                let x: Vec<FJSeries> = names.iter().map(|n| xi(n, prec)).collect::<Result<_>>()?;
                let pair = |i: usize, j: usize| x[i].mul(&x[j]).pow(2);
                pair(0, 1).add(&pair(0, 2)).add(&pair(2, 1)).scale_int(2)
            }
            Generator::Phi03 => {
                let th = theta(prec + rat(1, 4));
                th.substitute_z(2).pow(2).div(&th.pow(2))?
            }
            Generator::Phi04 => {
                let th = theta(prec + rat(1, 8));
                th.substitute_z(3).div(&th)?
            }
            Generator::PhiM21 => {
                let lift = prec + rat(1, 4);
                theta(lift).pow(2).div(&eta_power(6, lift))?
            }
            Generator::PhiM12 => {
                let lift = prec + rat(1, 8);
                theta(lift).substitute_z(2).div(&eta_power(3, lift))?
            }
            Generator::Phi032 => {
                let th = theta(prec + rat(1, 8));
                th.substitute_z(2).div(&th)?
            }
            Generator::PhiM112 => {
                let lift = prec + rat(1, 8);
                theta(lift).div(&eta_power(3, lift))?
            }
        };
        if s.prec() < p {
            return Err(Error::InsufficientPrecision {
                requested: format_rat(&prec),
                available: s.prec().to_string(),
            });
        }
        Ok(s.truncate(p))
    }
}

fn generator_cache() -> &'static RwLock<HashMap<Generator, FJSeries>> {
    static CACHE: OnceLock<RwLock<HashMap<Generator, FJSeries>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// A generator's series exact below `prec`, with its meta.
pub fn generator(name: &str, prec: Rat) -> Result<(FJSeries, FormMeta)> {
    let g = Generator::from_name(name)?;
    Ok((generator_series(g, prec)?, g.meta()))
}

pub fn generator_series(g: Generator, prec: Rat) -> Result<FJSeries> {
    let p = Precision::at(prec);
    if let Some(s) = generator_cache().read().unwrap().get(&g) {
        if s.prec() >= p {
            return Ok(s.truncate(p));
        }
    }
    let s = g.build(prec)?;
    let mut cache = generator_cache().write().unwrap();
    let keep = cache.get(&g).is_some_and(|old| old.prec() >= s.prec());
    if !keep {
        cache.insert(g, s.clone());
    }
    Ok(s)
}

/// E_4^α E_6^β φ_{0,1}^a φ_{−2,1}^b times η^D and an optional cofactor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub eta: i64,
    pub cofactor: Option<Generator>,
    pub e4: u32,
    pub e6: u32,
    pub phi01: u32,
    pub phim21: u32,
}

impl Monomial {
    pub fn series(&self, prec: Rat) -> Result<FJSeries> {
        let mut acc = FJSeries::one();
        if self.eta != 0 {
            acc = eta_power(self.eta as u32, prec);
        }
        if let Some(g) = self.cofactor {
            acc = acc.mul(&generator_series(g, prec)?);
        }
        if self.e4 > 0 {
            acc = acc.mul(&eisenstein_2k(2, prec).pow(self.e4));
        }
        if self.e6 > 0 {
            acc = acc.mul(&eisenstein_2k(3, prec).pow(self.e6));
        }
        if self.phi01 > 0 {
            acc = acc.mul(&generator_series(Generator::Phi01, prec)?.pow(self.phi01));
        }
        if self.phim21 > 0 {
            acc = acc.mul(&generator_series(Generator::PhiM21, prec)?.pow(self.phim21));
        }
        Ok(acc.truncate(Precision::at(prec)))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        let push = |parts: &mut Vec<String>, sym: &str, e: u32| match e {
            0 => {}
            1 => parts.push(sym.to_string()),
            _ => parts.push(format!("{sym}^{e}")),
        };
        push(&mut parts, "η", self.eta as u32);
        if let Some(g) = self.cofactor {
            parts.push(g.symbol().to_string());
        }
        push(&mut parts, "E4", self.e4);
        push(&mut parts, "E6", self.e6);
        push(&mut parts, "φ0,1", self.phi01);
        push(&mut parts, "φ-2,1", self.phim21);
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("·"))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    Weak,
    Holomorphic,
}

/// A basis vector as a rational combination of monomials.
#[derive(Clone, Debug)]
pub struct BasisElement {
    pub series: FJSeries,
    pub meta: FormMeta,
    pub combination: Vec<(BigRational, Monomial)>,
}

impl BasisElement {
    pub fn label(&self) -> String {
        if let [(c, m)] = self.combination.as_slice() {
            if c.is_one() {
                return m.to_string();
            }
        }
        self.combination
            .iter()
            .map(|(c, m)| format!("({})·{}", display_big(c), m))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[derive(Clone, Debug)]
pub struct SpaceBasis {
    pub meta: FormMeta,
    pub elements: Vec<BasisElement>,
    pub prec: Rat,
    pub kind: SpaceKind,
}

impl SpaceBasis {
    pub fn dimension(&self) -> usize {
        self.elements.len()
    }
}

/// Monomials of M_*[φ_{0,1}, φ_{−2,1}] of even weight `k` and index `t`.
fn ring_monomials(k: i64, t: i64) -> Vec<(u32, u32, u32, u32)> {
    let mut out = Vec::new();
    if t < 0 || k % 2 != 0 {
        return out;
    }
    for b in 0..=t {
        let a = t - b;
        // 4α + 6β = k + 2b.
        let modular = k + 2 * b;
        if modular < 0 {
            continue;
        }
        for beta in 0..=modular / 6 {
            let rest = modular - 6 * beta;
            if rest % 4 == 0 {
                out.push(((rest / 4) as u32, beta as u32, a as u32, b as u32));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Monomials spanning J^w_{k,t}(υ_η^D·υ_H^ε).
pub fn weak_monomials(meta: &FormMeta) -> Result<Vec<Monomial>> {
    if meta.quasi {
        return Err(Error::BadParameter(
            "quasi-modular meta has no basis".into(),
        ));
    }
    if !meta.is_consistent() {
        return Err(Error::BadParameter(format!("inconsistent meta: {meta}")));
    }
    let d = meta.eta_power;
    let reduced = meta.weight - rat(d, 2);
    if !reduced.is_integer() {
        return Err(Error::BadParameter(format!(
            "weight {} minus D/2 = {} is not integral",
            format_rat(&meta.weight),
            format_rat(&reduced)
        )));
    }
    let w = reduced.to_integer();
    let t = meta.index;
    let (cofactor, k, t_rest) = if t.is_integer() {
        if w % 2 == 0 {
            (None, w, t.to_integer())
        } else {
            (Some(Generator::PhiM12), w + 1, t.to_integer() - 2)
        }
    } else if w % 2 == 0 {
        (Some(Generator::Phi032), w, (t - rat(3, 2)).to_integer())
    } else {
        (
            Some(Generator::PhiM112),
            w + 1,
            (t - rat(1, 2)).to_integer(),
        )
    };
    Ok(ring_monomials(k, t_rest)
        .into_iter()
        .map(|(e4, e6, phi01, phim21)| Monomial {
            eta: d,
            cofactor,
            e4,
            e6,
            phi01,
            phim21,
        })
        .collect())
}

pub fn weak_basis(meta: &FormMeta, prec: Rat) -> Result<SpaceBasis> {
    let elements = weak_monomials(meta)?
        .into_iter()
        .map(|m| {
            Ok(BasisElement {
                series: m.series(prec)?,
                meta: *meta,
                combination: vec![(BigRational::one(), m)],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let positions = support_positions(elements.iter().map(|e| &e.series), prec);
    let matrix = coefficient_matrix(&elements, &positions)?;
    if linalg::rank(&matrix) < elements.len() {
        return Err(Error::Underdetermined(format!(
            "weak basis of {meta} is dependent below q^{}",
            format_rat(&prec)
        )));
    }
    Ok(SpaceBasis {
        meta: *meta,
        elements,
        prec,
        kind: SpaceKind::Weak,
    })
}

fn support_positions<'a>(series: impl Iterator<Item = &'a FJSeries>, prec: Rat) -> Vec<(Rat, Rat)> {
    let mut set: BTreeMap<(Rat, Rat), ()> = BTreeMap::new();
    for s in series {
        for (n, l, _) in s.terms() {
            if n < prec {
                set.insert((n, l), ());
            }
        }
    }
    set.into_keys().collect()
}

/// Rows are positions, columns basis elements.
fn coefficient_matrix(
    elements: &[BasisElement],
    positions: &[(Rat, Rat)],
) -> Result<linalg::Matrix> {
    positions
        .iter()
        .map(|&(n, l)| {
            elements
                .iter()
                .map(|e| {
                    e.series.coefficient(n, l)?.as_rational().ok_or_else(|| {
                        Error::BadParameter("basis series must have rational coefficients".into())
                    })
                })
                .collect()
        })
        .collect()
}

fn combine(elements: &[BasisElement], coeffs: &[BigRational], meta: FormMeta) -> BasisElement {
    let mut series = FJSeries::zero(Precision::EXACT);
    let mut combination: BTreeMap<Monomial, BigRational> = BTreeMap::new();
    for (e, c) in elements.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        series = series.add(&e.series.scalar_mul(&CycNum::from_rational(c)));
        for (c2, m) in &e.combination {
            let entry = combination.entry(*m).or_insert_with(BigRational::zero);
            *entry += c * c2;
        }
    }
    if let Some(p) = elements.first().map(|e| e.series.prec()) {
        series = series.truncate(p);
    }
    BasisElement {
        series,
        meta,
        combination: combination
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (c, m))
            .collect(),
    }
}

/// Combinations whose coefficients vanish wherever 4nt − l² < 0, as an
/// echelon basis over the monomial coordinates.
pub fn holomorphic_subspace(basis: &SpaceBasis) -> Result<SpaceBasis> {
    let t = basis.meta.index;
    if basis.prec < t + int(1) {
        return Err(Error::InsufficientPrecision {
            requested: format_rat(&(t + int(1))),
            available: format_rat(&basis.prec),
        });
    }
    let positions: Vec<(Rat, Rat)> =
        support_positions(basis.elements.iter().map(|e| &e.series), basis.prec)
            .into_iter()
            .filter(|(n, l)| int(4) * *n * t - *l * *l < int(0))
            .collect();
    let matrix = coefficient_matrix(&basis.elements, &positions)?;
    let kernel = if positions.is_empty() {
        (0..basis.elements.len())
            .map(|i| {
                let mut v = vec![BigRational::zero(); basis.elements.len()];
                v[i] = BigRational::one();
                v
            })
            .collect()
    } else {
        linalg::null_space(&matrix, basis.elements.len())
    };
    let elements: Vec<BasisElement> = kernel
        .iter()
        .map(|v| combine(&basis.elements, v, basis.meta))
        .collect();
    for e in &elements {
        if let Ok(h) = e.series.hyperbolic_order(t) {
            if h < int(0) {
                return Err(Error::Inconsistent(format!(
                    "{} has hyperbolic order {}",
                    e.label(),
                    h
                )));
            }
        }
    }
    Ok(SpaceBasis {
        meta: basis.meta,
        elements,
        prec: basis.prec,
        kind: SpaceKind::Holomorphic,
    })
}

/// Holomorphic basis of a meta at `prec` (at least index + 1).
pub fn holomorphic_basis(meta: &FormMeta, prec: Rat) -> Result<SpaceBasis> {
    holomorphic_subspace(&weak_basis(meta, prec)?)
}

/// The unique coefficients expressing `target` in the basis below its prec.
pub fn decompose(target: &FJSeries, basis: &SpaceBasis) -> Result<Vec<CycNum>> {
    let p = Precision::at(basis.prec);
    if target.prec() < p {
        return Err(Error::InsufficientPrecision {
            requested: format_rat(&basis.prec),
            available: target.prec().to_string(),
        });
    }
    if target.truncate(p).is_zero() && basis.elements.is_empty() {
        return Ok(Vec::new());
    }
    let positions = support_positions(
        basis
            .elements
            .iter()
            .map(|e| &e.series)
            .chain(std::iter::once(target)),
        basis.prec,
    );
    let matrix = coefficient_matrix(&basis.elements, &positions)?;
    let columns: Vec<Vec<BigRational>> = (0..basis.elements.len())
        .map(|j| matrix.iter().map(|row| row[j].clone()).collect())
        .collect();
    let coeffs: Vec<CycNum> = positions
        .iter()
        .map(|&(n, l)| target.coefficient(n, l))
        .collect::<Result<_>>()?;
    let order = coeffs
        .iter()
        .fold(1u64, |acc, c| num_integer::lcm(acc, c.order() as u64)) as u32;
    let lifted: Vec<Vec<BigRational>> = coeffs
        .iter()
        .map(|c| c.lift(order).map(|x| x.coeffs()))
        .collect::<Result<_>>()?;
    let degree = lifted.first().map_or(1, Vec::len);
    let mut per_coordinate: Vec<Vec<BigRational>> = Vec::with_capacity(degree);
    for i in 0..degree {
        let rhs: Vec<BigRational> = lifted.iter().map(|v| v[i].clone()).collect();
        if basis.elements.is_empty() {
            if rhs.iter().any(|x| !x.is_zero()) {
                return Err(Error::Inconsistent(
                    "target is nonzero but the space is zero".into(),
                ));
            }
            continue;
        }
        per_coordinate.push(linalg::solve_columns(&columns, &rhs)?);
    }
    Ok((0..basis.elements.len())
        .map(|j| {
            let mut acc = CycNum::zero();
            for (i, sol) in per_coordinate.iter().enumerate() {
                if !sol[j].is_zero() {
                    let power = CycNum::root_of_unity(i as i64, order as i64);
                    acc = &acc + &power.mul_rational(&sol[j]);
                }
            }
            acc
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q0_row(s: &FJSeries) -> Vec<(Rat, CycNum)> {
        s.terms()
            .filter(|(n, _, _)| n.is_zero())
            .map(|(_, l, c)| (l, c.clone()))
            .collect()
    }

    fn ints(v: &[(i64, i64)]) -> Vec<(Rat, CycNum)> {
        v.iter()
            .map(|&(l, c)| (int(l), CycNum::from_int(c)))
            .collect()
    }

    #[test]
    fn generator_leading_rows() {
        let p = int(2);
        assert_eq!(
            q0_row(&generator("phi01", p).unwrap().0),
            ints(&[(-1, 1), (0, 10), (1, 1)])
        );
        assert_eq!(
            q0_row(&generator("phi02", p).unwrap().0),
            ints(&[(-1, 1), (0, 4), (1, 1)])
        );
        assert_eq!(
            q0_row(&generator("phi03", p).unwrap().0),
            ints(&[(-1, 1), (0, 2), (1, 1)])
        );
        assert_eq!(
            q0_row(&generator("phi04", p).unwrap().0),
            ints(&[(-1, 1), (0, 1), (1, 1)])
        );
        assert_eq!(
            q0_row(&generator("phim21", p).unwrap().0),
            ints(&[(-1, 1), (0, -2), (1, 1)])
        );
        let half = q0_row(&generator("phi032", p).unwrap().0);
        assert_eq!(
            half,
            vec![(rat(-1, 2), CycNum::one()), (rat(1, 2), CycNum::one())]
        );
    }

    #[test]
    fn phi01_matches_xi_squares() {
        let p = int(4);
        let (phi, _) = generator("phi01", p).unwrap();
        let s = ["00", "01", "10"]
            .iter()
            .map(|n| xi(n, p).unwrap().pow(2))
            .fold(FJSeries::zero(Precision::EXACT), |a, b| a.add(&b))
            .scale_int(4);
        assert!(phi.equal_to_order(&s, p).unwrap());
    }

    #[test]
    fn dimensions() {
        let dim = |meta: FormMeta| {
            holomorphic_basis(&meta, meta.index + int(2))
                .unwrap()
                .dimension()
        };
        assert_eq!(dim(FormMeta::modular(4, 1)), 1);
        assert_eq!(dim(FormMeta::new(int(2), int(1), 12, 0)), 0);
        assert_eq!(dim(FormMeta::new(int(6), int(3), 12, 0)), 2);
        assert_eq!(dim(FormMeta::new(int(5), int(0), 6, 0)), 0);
        assert_eq!(
            weak_basis(&FormMeta::modular(0, 3), int(4))
                .unwrap()
                .dimension(),
            3
        );
        assert_eq!(
            weak_basis(&FormMeta::modular(-4, 1), int(3))
                .unwrap()
                .dimension(),
            0
        );
        assert_eq!(
            weak_basis(&FormMeta::modular(0, 0), int(3))
                .unwrap()
                .dimension(),
            1
        );
    }

    #[test]
    fn decompose_e41() {
        let (e41, meta) = jacobi_eisenstein_1(4, int(4)).unwrap();
        let b = holomorphic_basis(&meta, int(3)).unwrap();
        let c = decompose(&e41.scale_int(2), &b).unwrap();
        let back = b.elements[0].series.scalar_mul(&c[0]);
        assert!(back.equal_to_order(&e41.scale_int(2), int(3)).unwrap());
        assert!(decompose(&FJSeries::zero(Precision::at(int(5))), &b).unwrap()[0].is_zero());
    }
}
