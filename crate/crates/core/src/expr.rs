//! A small expression language for sides of identities.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom ('^' int)?
//! atom   := int ('/' int)? | '(' expr ')' | name params? arg?
//! params := '[' list (';' list)? ']'
//! arg    := '(' int 'z' ')' | '(' 'z' ')' | '(' '0' ')'
//! ```
//!
//! Names: th00 th01 th10 th[a,b] (theta constants), v v00 v01 v10 v[a,b]
//! (thetas in z; v is the odd ϑ), xi00 xi01 xi10 xi[a,b], orb[N;u,v]
//! (ϑ|(u/N, v/N)), eta Delta E2 G2 E4 E6 E8 E10, E[k,m] (normalized V_m of
//! E_{k,1}), Eavg[k,m] (the group-averaged series), E21p[p], the
//! generators phi01 phi02 phi03 phi04 phim21 phim12 phi032 phim112, and the
//! operators tr[N;a,b,c,d] W[N;a,b,c] A[i;a,b,c] prod[N].
//! There is no series division: identities are written denominator-cleared.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cyclotomic::CycNum;
use crate::eisenstein::{e21p, eisenstein_2k, g2, jacobi_eisenstein, jacobi_eisenstein_averaged};
use crate::error::{Error, Result};
use crate::rational::{int, parse_rat, rat, Rat};
use crate::relations::{
    a_form, a_meta, product_orbit, product_orbit_meta, tr, w_form, w_meta, TrParams,
};
use crate::series::{FJSeries, FormMeta, Precision};
use crate::spaces::{generator, Generator};
use crate::thetas::{
    delta, eta_meta, eta_power, even_characteristic, orbit_theta, theta, theta_char, theta_meta,
    xi_char, Characteristic,
};

/// Where the elliptic variable is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arg {
    /// (τ, m·z); m = 1 is the plain function.
    Multiple(i64),
    /// (τ, 0).
    Zero,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Atom {
    ThetaChar(Rat, Rat),
    ThetaConst(Rat, Rat),
    OddTheta,
    Xi(Rat, Rat),
    Orbit(u32, i64, i64),
    Eta,
    Delta,
    E2,
    G2,
    Eisenstein(u32),
    JacobiEisenstein(u32, u64),
    AveragedEisenstein(u32, u64),
    E21p(u64),
    Generator(Generator),
    Tr(TrParams),
    W(u32, u32, u32, u32),
    A(u32, u32, u32, u32),
    Product(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number(BigRational),
    Atom(Atom, Arg),
    Sum(Vec<(bool, Expr)>),
    Product(Vec<Expr>),
    Power(Box<Expr>, u32),
    Neg(Box<Expr>),
}

/// What is known about the transformation law of a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetaInfo {
    Scalar,
    Known(FormMeta),
    Unknown,
}

impl MetaInfo {
    fn times(self, other: MetaInfo) -> MetaInfo {
        match (self, other) {
            (MetaInfo::Scalar, x) | (x, MetaInfo::Scalar) => x,
            (MetaInfo::Known(a), MetaInfo::Known(b)) => MetaInfo::Known(a.times(&b)),
            _ => MetaInfo::Unknown,
        }
    }

    fn plus(self, other: MetaInfo) -> Result<MetaInfo> {
        match (self, other) {
            (MetaInfo::Scalar, MetaInfo::Scalar) => Ok(MetaInfo::Scalar),
            (MetaInfo::Known(a), MetaInfo::Known(b)) if a == b => Ok(MetaInfo::Known(a)),
            (MetaInfo::Known(a), MetaInfo::Known(b)) => Err(Error::BadParameter(format!(
                "adding forms of different meta: {a} and {b}"
            ))),
            _ => Ok(MetaInfo::Unknown),
        }
    }

    fn pow(self, e: u32) -> MetaInfo {
        match self {
            MetaInfo::Known(m) => MetaInfo::Known(m.pow(e as i64)),
            x => x,
        }
    }

    pub fn known(self) -> Option<FormMeta> {
        match self {
            MetaInfo::Known(m) => Some(m),
            _ => None,
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in '{}'", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..]
                .chars()
                .next()
                .map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err("expected an integer"));
        }
        self.pos += len;
        rest[..len].parse().map_err(|_| self.err("bad integer"))
    }

    fn identifier(&mut self) -> String {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        self.pos += len;
        rest[..len].to_string()
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![(true, self.term()?)];
        loop {
            if self.eat('+') {
                terms.push((true, self.term()?));
            } else if self.eat('-') {
                terms.push((false, self.term()?));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 && terms[0].0 {
            terms.pop().unwrap().1
        } else {
            Expr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.factor()?];
        while self.eat('*') {
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Product(factors)
        })
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
            return Ok(Expr::Power(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let value = if self.eat('/') {
                    let den = self.integer()?;
                    if den.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    BigRational::new(num, den)
                } else {
                    BigRational::from_integer(num)
                };
                Ok(Expr::Number(value))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.identifier();
                let params = if self.peek() == Some('[') {
                    self.pos += 1;
                    let start = self.pos;
                    let end = self.src[start..]
                        .find(']')
                        .map(|i| start + i)
                        .ok_or_else(|| self.err("unclosed '['"))?;
                    self.pos = end + 1;
                    Some(self.src[start..end].to_string())
                } else {
                    None
                };
                let atom = self.named_atom(&name, params.as_deref())?;
                let arg = self.argument()?;
                Ok(Expr::Atom(atom, arg))
            }
            _ => Err(self.err("expected a number, name or '('")),
        }
    }

    fn argument(&mut self) -> Result<Arg> {
        let save = self.pos;
        if !self.eat('(') {
            return Ok(Arg::Multiple(1));
        }
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let close = rest.find(')').ok_or_else(|| self.err("unclosed '('"))?;
        let inner: String = rest[..close]
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        let arg = if inner == "0" {
            Arg::Zero
        } else if inner == "z" {
            Arg::Multiple(1)
        } else if let Some(k) = inner.strip_suffix('z') {
            match k.parse::<i64>() {
                Ok(k) if k > 0 => Arg::Multiple(k),
                _ => {
                    self.pos = save;
                    return Ok(Arg::Multiple(1));
                }
            }
        } else {
            // Not an argument: a parenthesized factor follows without '*'.
            self.pos = save;
            return Err(self.err("expected '(kz)', '(z)' or '(0)'"));
        };
        self.pos += close + 1;
        Ok(arg)
    }

    fn named_atom(&self, name: &str, params: Option<&str>) -> Result<Atom> {
        let lists: Vec<Vec<String>> = params
            .map(|p| {
                p.split(';')
                    .map(|part| part.split(',').map(|s| s.trim().to_string()).collect())
                    .collect()
            })
            .unwrap_or_default();
        let ints = |v: &[String]| -> Result<Vec<i64>> {
            v.iter()
                .map(|s| {
                    s.parse::<i64>()
                        .map_err(|_| self.err(&format!("bad integer '{s}'")))
                })
                .collect()
        };
        let unsigned = |v: &[String]| -> Result<Vec<u32>> {
            v.iter()
                .map(|s| {
                    s.parse::<u32>()
                        .map_err(|_| self.err(&format!("bad parameter '{s}'")))
                })
                .collect()
        };
        let rats = |v: &[String]| -> Result<Vec<Rat>> { v.iter().map(|s| parse_rat(s)).collect() };
        let pair = |v: &Vec<Vec<String>>| -> Result<(Rat, Rat)> {
            match v.as_slice() {
                [one] if one.len() == 2 => {
                    let r = rats(one)?;
                    Ok((r[0], r[1]))
                }
                _ => Err(self.err("expected [a,b]")),
            }
        };
        let semi = |v: &Vec<Vec<String>>, len: usize| -> Result<(u32, Vec<u32>)> {
            match v.as_slice() {
                [head, rest] if head.len() == 1 && rest.len() == len => {
                    Ok((unsigned(head)?[0], unsigned(rest)?))
                }
                _ => Err(self.err(&format!("expected [N;{} integers]", len))),
            }
        };
        let bare = |atom: Atom| -> Result<Atom> {
            if params.is_some() {
                Err(self.err(&format!("'{name}' takes no parameters")))
            } else {
                Ok(atom)
            }
        };
        let even = |s: &str| -> Result<(Rat, Rat)> { even_characteristic(s) };
        match name {
            "th00" | "th01" | "th10" => {
                let (a, b) = even(&name[2..])?;
                bare(Atom::ThetaConst(a, b))
            }
            "th" => {
                let (a, b) = pair(&lists)?;
                Ok(Atom::ThetaConst(a, b))
            }
            "v" if params.is_none() => Ok(Atom::OddTheta),
            "v" => {
                let (a, b) = pair(&lists)?;
                Ok(Atom::ThetaChar(a, b))
            }
            "v00" | "v01" | "v10" => {
                let (a, b) = even(&name[1..])?;
                bare(Atom::ThetaChar(a, b))
            }
            "xi" => {
                let (a, b) = pair(&lists)?;
                Ok(Atom::Xi(a, b))
            }
            "xi00" | "xi01" | "xi10" => {
                let (a, b) = even(&name[2..])?;
                bare(Atom::Xi(a, b))
            }
            "orb" => {
                let (n, uv) = semi(&lists, 2)?;
                Ok(Atom::Orbit(n, uv[0] as i64, uv[1] as i64))
            }
            "eta" => bare(Atom::Eta),
            "Delta" => bare(Atom::Delta),
            "E2" => bare(Atom::E2),
            "G2" => bare(Atom::G2),
            "E4" | "E6" | "E8" | "E10" | "E12" | "E14" => {
                let k: u32 = name[1..].parse().unwrap();
                bare(Atom::Eisenstein(k / 2))
            }
            "E" | "Eavg" => match lists.as_slice() {
                [one] if one.len() == 2 => {
                    let v = ints(one)?;
                    if v[0] < 4 || v[0] % 2 != 0 || v[1] < 1 {
                        return Err(self.err("E[k,m] needs even k ≥ 4 and m ≥ 1"));
                    }
                    let (k, m) = (v[0] as u32, v[1] as u64);
                    Ok(if name == "E" {
                        Atom::JacobiEisenstein(k, m)
                    } else {
                        Atom::AveragedEisenstein(k, m)
                    })
                }
                _ => Err(self.err("expected E[k,m]")),
            },
            "E21p" => match lists.as_slice() {
                [one] if one.len() == 1 => Ok(Atom::E21p(ints(one)?[0] as u64)),
                _ => Err(self.err("expected E21p[p]")),
            },
            "tr" => {
                let (n, v) = semi(&lists, 4)?;
                Ok(Atom::Tr(TrParams::new(n, v[0], v[1], v[2], v[3])?))
            }
            "W" => {
                let (n, v) = semi(&lists, 3)?;
                Ok(Atom::W(n, v[0], v[1], v[2]))
            }
            "A" => {
                let (i, v) = semi(&lists, 3)?;
                Ok(Atom::A(i, v[0], v[1], v[2]))
            }
            "prod" => match lists.as_slice() {
                [one] if one.len() == 1 => Ok(Atom::Product(unsigned(one)?[0])),
                _ => Err(self.err("expected prod[N]")),
            },
            _ => match Generator::from_name(name) {
                Ok(g) => bare(Atom::Generator(g)),
                Err(_) => Err(self.err(&format!("unknown name '{name}'"))),
            },
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

/// The transformation law of an atom at (τ, z), where one is known.
fn atom_meta(atom: &Atom) -> MetaInfo {
    use MetaInfo::{Known, Unknown};
    match atom {
        Atom::ThetaChar(..)
        | Atom::ThetaConst(..)
        | Atom::Xi(..)
        | Atom::Orbit(..)
        | Atom::E21p(_) => Unknown,
        Atom::OddTheta => Known(theta_meta()),
        Atom::Eta => Known(eta_meta(1)),
        Atom::Delta => Known(FormMeta::modular(12, 0)),
        Atom::E2 | Atom::G2 => Known(FormMeta::quasi(2)),
        Atom::Eisenstein(k) => Known(FormMeta::modular(2 * *k as i64, 0)),
        Atom::JacobiEisenstein(k, m) | Atom::AveragedEisenstein(k, m) => {
            Known(FormMeta::modular(*k as i64, *m as i64))
        }
        Atom::Generator(g) => Known(g.meta()),
        Atom::Tr(p) => Known(p.meta()),
        Atom::W(n, a, b, c) => Known(w_meta(*n, *a, *b, *c)),
        Atom::A(i, a, b, c) => Known(a_meta(*i, *a, *b, *c)),
        Atom::Product(n) => Known(product_orbit_meta(*n)),
    }
}

/// Series of an atom at (τ, z), exact below `prec`.
fn atom_series(atom: &Atom, prec: Rat) -> Result<FJSeries> {
    Ok(match atom {
        Atom::ThetaChar(a, b) => theta_char(*a, *b, prec),
        Atom::ThetaConst(a, b) => theta_char(*a, *b, prec).evaluate_z_zero(),
        Atom::OddTheta => theta(prec),
        Atom::Xi(a, b) => xi_char(*a, *b, prec)?,
        Atom::Orbit(n, u, v) => {
            if *n < 2 {
                return Err(Error::BadParameter("orb needs N ≥ 2".into()));
            }
            let nn = *n as i64;
            orbit_theta(&Characteristic::new(rat(*u, nn), rat(*v, nn)), prec)
        }
        Atom::Eta => eta_power(1, prec),
        Atom::Delta => delta(prec),
        Atom::E2 => eisenstein_2k(1, prec),
        Atom::G2 => g2(prec),
        Atom::Eisenstein(k) => eisenstein_2k(*k, prec),
        Atom::JacobiEisenstein(k, m) => jacobi_eisenstein(*k, *m, prec)?.0,
        Atom::AveragedEisenstein(k, m) => jacobi_eisenstein_averaged(*k, *m, prec)?.0,
        Atom::E21p(p) => e21p(*p, prec)?,
        Atom::Generator(g) => generator(g.name(), prec)?.0,
        Atom::Tr(p) => tr(p, prec)?.0,
        Atom::W(n, a, b, c) => w_form(*n, *a, *b, *c, prec)?.0,
        Atom::A(i, a, b, c) => a_form(*i, *a, *b, *c, prec)?.0,
        Atom::Product(n) => product_orbit(*n, prec)?,
    })
}

fn arg_meta(meta: MetaInfo, arg: Arg) -> MetaInfo {
    match (meta, arg) {
        (MetaInfo::Known(x), Arg::Multiple(m)) => MetaInfo::Known(x.substituted(m)),
        (MetaInfo::Known(x), Arg::Zero) => MetaInfo::Known(FormMeta {
            quasi: x.quasi,
            ..FormMeta::new(x.weight, int(0), x.eta_power, 0)
        }),
        (x, _) => x,
    }
}

fn arg_series(s: FJSeries, arg: Arg) -> FJSeries {
    match arg {
        Arg::Multiple(1) => s,
        Arg::Multiple(m) => s.substitute_z(m),
        Arg::Zero => s.evaluate_z_zero(),
    }
}

/// The meta of an expression without evaluating it.
pub fn infer_meta(e: &Expr) -> Result<MetaInfo> {
    Ok(match e {
        Expr::Number(_) => MetaInfo::Scalar,
        Expr::Atom(atom, arg) => arg_meta(atom_meta(atom), *arg),
        Expr::Sum(terms) => {
            let mut meta: Option<MetaInfo> = None;
            for (_, t) in terms {
                let m = infer_meta(t)?;
                meta = Some(match meta {
                    None => m,
                    Some(prev) => prev.plus(m)?,
                });
            }
            meta.unwrap_or(MetaInfo::Scalar)
        }
        Expr::Product(factors) => factors.iter().try_fold(MetaInfo::Scalar, |acc, f| {
            Ok::<_, Error>(acc.times(infer_meta(f)?))
        })?,
        Expr::Power(base, k) => infer_meta(base)?.pow(*k),
        Expr::Neg(inner) => infer_meta(inner)?,
    })
}

/// Evaluates an expression exactly below `prec`. All atoms have
/// nonnegative q-order, so building each at `prec` suffices.
pub fn evaluate(e: &Expr, prec: Rat) -> Result<(FJSeries, MetaInfo)> {
    Ok((evaluate_series(e, prec)?, infer_meta(e)?))
}

fn evaluate_series(e: &Expr, prec: Rat) -> Result<FJSeries> {
    let p = Precision::at(prec);
    let s = match e {
        Expr::Number(r) => FJSeries::constant(CycNum::from_rational(r)),
        Expr::Atom(atom, arg) => arg_series(atom_series(atom, prec)?, *arg),
        Expr::Sum(terms) => {
            let mut acc = FJSeries::zero(Precision::EXACT);
            for (positive, t) in terms {
                let s = evaluate_series(t, prec)?;
                acc = if *positive { acc.add(&s) } else { acc.sub(&s) };
            }
            acc
        }
        Expr::Product(factors) => {
            let mut scalar = BigRational::one();
            let mut acc: Option<FJSeries> = None;
            for f in factors {
                if let Expr::Number(r) = f {
                    scalar *= r;
                    continue;
                }
                let s = evaluate_series(f, prec)?;
                acc = Some(match acc {
                    None => s,
                    Some(a) => a.mul(&s),
                });
            }
            acc.unwrap_or_else(FJSeries::one)
                .scalar_mul(&CycNum::from_rational(&scalar))
        }
        Expr::Power(base, k) => evaluate_series(base, prec)?.pow(*k),
        Expr::Neg(inner) => evaluate_series(inner, prec)?.neg(),
    };
    if s.prec() < p {
        return Err(Error::InsufficientPrecision {
            requested: prec.to_string(),
            available: s.prec().to_string(),
        });
    }
    Ok(s.truncate(p))
}

pub fn evaluate_str(src: &str, prec: Rat) -> Result<(FJSeries, MetaInfo)> {
    evaluate(&parse(src)?, prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_evaluates() {
        let p = int(4);
        let (lhs, _) = evaluate_str("th01*th10*th00", p).unwrap();
        let (rhs, m) = evaluate_str("2*eta^3", p).unwrap();
        assert_eq!(m, MetaInfo::Known(eta_meta(3)));
        assert!(lhs.equal_to_order(&rhs, p).unwrap());
        let (c00, _) = evaluate_str("th01^4 + th10^4 - th00^4", p).unwrap();
        assert!(c00.is_zero());
        let (x, _) = evaluate_str("272/43*eta^12*v^4 - 272/43*(eta^12*v^4)", p).unwrap();
        assert!(x.is_zero());
    }

    #[test]
    fn arguments() {
        let p = int(3);
        let (a, _) = evaluate_str("v(2z)", p).unwrap();
        assert_eq!(a, theta(p).substitute_z(2));
        let (b, meta) = evaluate_str("v(0)", p).unwrap();
        assert!(b.is_zero());
        assert_eq!(meta.known().unwrap().index, int(0));
        let (c, _) = evaluate_str("th[1/6,1/2]", p).unwrap();
        assert_eq!(c, theta_char(rat(1, 6), rat(1, 2), p).evaluate_z_zero());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("foo"), Err(Error::Parse(_))));
        assert!(matches!(parse("v +"), Err(Error::Parse(_))));
        assert!(matches!(
            parse("tr[2;1,0,0,0]"),
            Err(Error::BadParameter(_))
        ));
        assert!(parse("E[4,2]*v(3z)^2 - tr[3;0,6,0,0]").is_ok());
        assert!(evaluate_str("v + eta", int(2)).is_err());
    }
}
