//! Scan of the Tr parameter space for theta relations.
//!
//! A vanishing Tr is a theta relation; a nonzero one is expanded in the
//! holomorphic basis of its meta, giving a generalized relation.

use std::fmt;

use rayon::prelude::*;

use crate::cyclotomic::CycNum;
use crate::error::Error;
use crate::rational::{int, Rat};
use crate::series::{FJSeries, FormMeta};
use crate::spaces::{decompose, holomorphic_basis};

use super::{check_form_axioms, tr_unchecked, AxiomReport, TrParams};

#[derive(Clone, Debug)]
pub enum FindingStatus {
    /// Vanishes below `prec` and again below `prec + 4`.
    Zero,
    /// Expansion in monomials of the weak ring, nonzero terms only.
    Decomposed(Vec<(String, CycNum)>),
    /// Not in the span of the computed basis, or the basis could not be
    /// separated at this precision.
    Inconsistent(String),
    /// Tuple violating the total-degree condition; carries the axiom check
    /// against the meta the operator would have.
    NearAdmissible(AxiomReport),
}

#[derive(Clone, Debug)]
pub struct Finding {
    pub params: TrParams,
    pub meta: FormMeta,
    pub status: FindingStatus,
}

impl Finding {
    pub fn is_zero(&self) -> bool {
        matches!(self.status, FindingStatus::Zero)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (status, detail) = match &self.status {
            FindingStatus::Zero => ("ZERO", serde_json::Value::Null),
            FindingStatus::Decomposed(c) => (
                "DECOMPOSED",
                c.iter()
                    .map(|(label, x)| serde_json::json!({"basis": label, "coefficient": x.to_string()}))
                    .collect(),
            ),
            FindingStatus::Inconsistent(msg) => ("INCONSISTENT", msg.as_str().into()),
            FindingStatus::NearAdmissible(r) => ("NEAR_ADMISSIBLE", r.passed().into()),
        };
        serde_json::json!({
            "id": self.params.id(),
            "weight": self.meta.weight.to_string(),
            "index": self.meta.index.to_string(),
            "status": status,
            "detail": detail,
        })
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<16} {}  ", self.params.id(), self.meta)?;
        match &self.status {
            FindingStatus::Zero => write!(f, "ZERO"),
            FindingStatus::Decomposed(c) => {
                let terms: Vec<String> = c
                    .iter()
                    .map(|(label, x)| format!("({x})·{label}"))
                    .collect();
                write!(f, "= {}", terms.join(" + "))
            }
            FindingStatus::Inconsistent(msg) => write!(f, "INCONSISTENT {msg}"),
            FindingStatus::NearAdmissible(r) => {
                write!(
                    f,
                    "NEAR-ADMISSIBLE axioms {}",
                    if r.passed() { "pass" } else { "fail" }
                )
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchBounds {
    pub n: u32,
    /// Bound on (a+b+c+d)/2.
    pub max_weight: Rat,
    /// Bound on (b+4c+N²d)/2.
    pub max_index: Rat,
    /// Also probe tuples with N | b+2c but a+b+c+d ≡ N mod 2N.
    pub near_admissible: bool,
}

/// Tuples within the bounds, admissible ones first, in lexicographic order.
pub fn enumerate(bounds: &SearchBounds) -> Vec<TrParams> {
    let n = bounds.n;
    if n < 2 {
        return Vec::new();
    }
    let max_total = (bounds.max_weight * int(2)).floor().to_integer().max(0) as u32;
    let max_twice_index = (bounds.max_index * int(2)).floor().to_integer().max(0) as u32;
    let mut admissible = Vec::new();
    let mut near = Vec::new();
    for total in 1..=max_total {
        for d in 0..=total.min(max_twice_index / (n * n)) {
            for c in 0..=(total - d).min((max_twice_index - n * n * d) / 4) {
                let b_max = (total - d - c).min(max_twice_index - n * n * d - 4 * c);
                for b in 0..=b_max {
                    let a = total - b - c - d;
                    let p = TrParams::unchecked(n, a, b, c, d);
                    if (b + 2 * c) % n != 0 {
                        continue;
                    }
                    if total % (2 * n) == 0 {
                        admissible.push(p);
                    } else if bounds.near_admissible && total % (2 * n) == n {
                        near.push(p);
                    }
                }
            }
        }
    }
    admissible.sort();
    near.sort();
    admissible.extend(near);
    admissible
}

fn classify(p: TrParams, prec: Rat) -> Finding {
    let meta = p.meta();
    let finding = |status| Finding {
        params: p,
        meta,
        status,
    };
    let value = match tr_unchecked(&p, prec) {
        Ok(v) => v,
        Err(e) => return finding(FindingStatus::Inconsistent(e.to_string())),
    };
    if !p.is_admissible() {
        return finding(FindingStatus::NearAdmissible(check_form_axioms(
            &value, &meta,
        )));
    }
    if value.is_zero() {
        return match tr_unchecked(&p, prec + int(4)) {
            Ok(v) if v.is_zero() => finding(FindingStatus::Zero),
            Ok(v) => finding(decomposition(&v, &meta, prec + int(4))),
            Err(e) => finding(FindingStatus::Inconsistent(e.to_string())),
        };
    }
    finding(decomposition(&value, &meta, prec))
}

fn decomposition(value: &FJSeries, meta: &FormMeta, prec: Rat) -> FindingStatus {
    let result = holomorphic_basis(meta, prec).and_then(|basis| {
        let coeffs = decompose(value, &basis)?;
        let mut expansion: Vec<(String, CycNum)> = Vec::new();
        for (element, x) in basis.elements.iter().zip(&coeffs) {
            for (c, monomial) in &element.combination {
                let label = monomial.to_string();
                let term = x.mul_rational(c);
                match expansion.iter_mut().find(|(l, _)| *l == label) {
                    Some((_, acc)) => *acc = &*acc + &term,
                    None => expansion.push((label, term)),
                }
            }
        }
        expansion.retain(|(_, x)| !x.is_zero());
        Ok(expansion)
    });
    match result {
        Ok(c) => FindingStatus::Decomposed(c),
        Err(Error::Inconsistent(msg)) | Err(Error::Underdetermined(msg)) => {
            FindingStatus::Inconsistent(msg)
        }
        Err(e) => FindingStatus::Inconsistent(e.to_string()),
    }
}

/// Classifies every tuple within the bounds; Tr is computed below `prec`
/// (at least index + 1 so the holomorphic basis is separated).
pub fn search_relations(bounds: &SearchBounds, prec: Rat) -> Vec<Finding> {
    enumerate(bounds)
        .into_par_iter()
        .map(|p| {
            let needed = p.meta().index + int(1);
            classify(p, if prec < needed { needed } else { prec })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds(n: u32, w: i64, t: i64) -> SearchBounds {
        SearchBounds {
            n,
            max_weight: int(w),
            max_index: int(t),
            near_admissible: false,
        }
    }

    #[test]
    fn enumeration_respects_bounds() {
        let all = enumerate(&bounds(3, 6, 3));
        assert!(all.iter().all(|p| p.is_admissible()));
        assert!(all
            .iter()
            .all(|p| p.meta().weight <= int(6) && p.meta().index <= int(3)));
        assert!(all.contains(&TrParams::unchecked(3, 4, 1, 1, 0)));
        assert!(!all.contains(&TrParams::unchecked(3, 1, 4, 1, 0)));
    }

    #[test]
    fn order_two_rediscovers_vanishing_traces() {
        let found = search_relations(&bounds(2, 2, 2), int(3));
        let zeros: Vec<String> = found
            .iter()
            .filter(|f| f.is_zero())
            .map(|f| f.params.id())
            .collect();
        assert!(zeros.contains(&"tr2_4_0_0_0".to_string()));
        assert!(zeros.contains(&"tr2_2_2_0_0".to_string()));
        for f in found.iter().filter(|f| !f.is_zero()) {
            assert!(matches!(f.status, FindingStatus::Decomposed(_)), "{f}");
        }
    }
}
