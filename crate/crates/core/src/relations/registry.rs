//! Registered identities between orbit operators, theta products and forms.
//!
//! Every side is an expression in [`crate::expr`]; all sides of a reading
//! must agree coefficientwise. Quotients are cleared before registration, so
//! verification never divides. A record passes if one of its readings does.

use std::fmt;

use rayon::prelude::*;

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::expr::{evaluate, infer_meta, parse, MetaInfo};
use crate::rational::{int, Rat};
use crate::series::FormMeta;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    /// Vanishing and low-weight traces for N = 2.
    TraceBasic,
    /// Traces for N = 2 against Jacobi-Eisenstein series.
    TraceOrder2,
    /// Traces for N = 3, 5, 7.
    TraceOrder3,
    /// Antisymmetric constructions at the two-torsion points.
    Antisymmetric,
    /// Weight-zero quotients.
    Weak,
    /// Products over the orbit.
    Product,
    /// ϑ² through the even thetas.
    ThetaSquare,
}

impl Group {
    pub const ORBIT_IDENTITIES: [Group; 6] = [
        Group::TraceBasic,
        Group::TraceOrder2,
        Group::TraceOrder3,
        Group::Antisymmetric,
        Group::Weak,
        Group::Product,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Group::TraceBasic => "trace-basic",
            Group::TraceOrder2 => "trace-n2",
            Group::TraceOrder3 => "trace-n3",
            Group::Antisymmetric => "antisymmetric",
            Group::Weak => "weak",
            Group::Product => "product",
            Group::ThetaSquare => "theta-square",
        }
    }
}

/// One way of reading a displayed identity: a chain of equal sides.
#[derive(Clone, Debug)]
pub struct Reading {
    pub label: &'static str,
    pub sides: Vec<&'static str>,
}

#[derive(Clone, Debug)]
pub struct IdentityRecord {
    pub id: &'static str,
    pub aliases: &'static [&'static str],
    pub group: Group,
    pub readings: Vec<Reading>,
    pub note: Option<&'static str>,
    /// Index used for the default precision when no side has a full
    /// modular transformation law (even thetas only transform under Γ(2)).
    pub index: Option<Rat>,
}

impl IdentityRecord {
    fn new(id: &'static str, group: Group, sides: &[&'static str]) -> Self {
        IdentityRecord {
            id,
            aliases: &[],
            group,
            readings: vec![Reading {
                label: "displayed",
                sides: sides.to_vec(),
            }],
            note: None,
            index: None,
        }
    }

    fn alias(mut self, aliases: &'static [&'static str]) -> Self {
        self.aliases = aliases;
        self
    }

    fn note(mut self, note: &'static str) -> Self {
        self.note = Some(note);
        self
    }

    fn index(mut self, index: Rat) -> Self {
        self.index = Some(index);
        self
    }

    pub fn matches(&self, name: &str) -> bool {
        self.id == name || self.aliases.contains(&name)
    }

    /// The common meta of the sides with a known transformation law.
    pub fn meta(&self) -> Result<FormMeta> {
        let mut found: Option<FormMeta> = None;
        for reading in &self.readings {
            for side in &reading.sides {
                if let MetaInfo::Known(m) = infer_meta(&parse(side)?)? {
                    match found {
                        None => found = Some(m),
                        Some(prev) if prev != m => {
                            return Err(Error::BadParameter(format!(
                                "{}: sides disagree on meta ({prev} vs {m})",
                                self.id
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
        found.ok_or_else(|| Error::BadParameter(format!("{}: no side has a known meta", self.id)))
    }

    /// index + 4.
    pub fn default_prec(&self) -> Result<Rat> {
        let index = match self.index {
            Some(i) => i,
            None => self.meta()?.index,
        };
        Ok(index + int(4))
    }
}

const INDEX_FOUR_NOTE: &str =
    "index-4 Eisenstein space is two-dimensional; both the normalized V_4 image \
     and the group-averaged series are checked";

fn all_records() -> Vec<IdentityRecord> {
    use Group::*;
    let r = IdentityRecord::new;
    vec![
        // N = 2, basic.
        r("c00", TraceBasic, &["tr[2;4,0,0,0]", "th01^4 + th10^4 - th00^4", "0"]).alias(&["tr2_4_0_0_0"]),
        r("c01", TraceBasic, &["tr[2;2,2,0,0]", "th01^2*v01^2 + th10^2*v10^2 - th00^2*v00^2", "0"])
            .alias(&["tr2_2_2_0_0"]),
        r("tr2_0_4_0_0", TraceBasic, &["tr[2;0,4,0,0]", "v01^4 + v10^4 - v00^4", "v^4"]),
        r(
            "tr2_3_0_1_0",
            TraceBasic,
            &["tr[2;3,0,1,0]", "th01^3*v01(2z) + th10^3*v10(2z) - th00^3*v00(2z)", "-2*v^4"],
        ),
        r(
            "tr2_1_2_1_0",
            TraceBasic,
            &["tr[2;1,2,1,0]", "th01*v01^2*v01(2z) + th10*v10^2*v10(2z) - th00*v00^2*v00(2z)", "0"],
        ),
        r(
            "e4_theta",
            TraceBasic,
            &[
                "tr[2;8,0,0,0]",
                "th01^8 + th10^8 + th00^8",
                "2*E4",
                "2*(th00^4*th01^4 + th00^4*th10^4 - th10^4*th01^4)",
            ],
        )
        .alias(&["tr2_8_0_0_0"]),
        // N = 2 against Jacobi-Eisenstein series.
        r(
            "tr2_6_2_0_0",
            TraceOrder2,
            &["tr[2;6,2,0,0]", "th01^6*v01^2 + th10^6*v10^2 + th00^6*v00^2", "2*E[4,1]"],
        )
        .alias(&["c02"]),
        r(
            "tr2_10_2_0_0",
            TraceOrder2,
            &["tr[2;10,2,0,0]", "th01^10*v01^2 + th10^10*v10^2 - th00^10*v00^2", "-4*eta^12*phi01"],
        ),
        r(
            "tr2_14_2_0_0",
            TraceOrder2,
            &["tr[2;14,2,0,0]", "th01^14*v01^2 + th10^14*v10^2 + th00^14*v00^2", "2*E[8,1]"],
        ),
        r(
            "tr2_4_4_0_0",
            TraceOrder2,
            &["tr[2;4,4,0,0]", "th01^4*v01^4 + th10^4*v10^4 + th00^4*v00^4", "2*E[4,2]"],
        ),
        r(
            "tr2_2_6_0_0",
            TraceOrder2,
            &["tr[2;2,6,0,0]", "th01^2*v01^6 + th10^2*v10^6 + th00^2*v00^6", "2*E[4,3]"],
        ),
        IdentityRecord {
            id: "tr2_0_8_0_0",
            aliases: &[],
            group: TraceOrder2,
            readings: vec![
                Reading { label: "E[k,4] as V_4(E_k,1)/σ", sides: vec!["tr[2;0,8,0,0]", "v01^8 + v10^8 + v00^8", "2*E[4,4] + v^8"] },
                Reading { label: "E[k,4] group-averaged", sides: vec!["tr[2;0,8,0,0]", "v01^8 + v10^8 + v00^8", "2*Eavg[4,4] + v^8"] },
            ],
            note: Some(INDEX_FOUR_NOTE),
            index: None,
        },
        r(
            "tr2_7_0_1_0",
            TraceOrder2,
            &["tr[2;7,0,1,0]", "th01^7*v01(2z) + th10^7*v10(2z) + th00^7*v00(2z)", "2*E[4,2]"],
        ),
        IdentityRecord {
            id: "tr2_6_0_2_0",
            aliases: &[],
            group: TraceOrder2,
            readings: vec![
                Reading { label: "E[k,4] as V_4(E_k,1)/σ", sides: vec!["tr[2;6,0,2,0]", "th01^6*v01(2z)^2 + th10^6*v10(2z)^2 + th00^6*v00(2z)^2", "2*E[4,4] + 2*v^8"] },
                Reading { label: "E[k,4] group-averaged", sides: vec!["tr[2;6,0,2,0]", "th01^6*v01(2z)^2 + th10^6*v10(2z)^2 + th00^6*v00(2z)^2", "2*Eavg[4,4] + 2*v^8"] },
            ],
            note: Some(INDEX_FOUR_NOTE),
            index: None,
        },
        r(
            "tr2_12_4_0_0",
            TraceOrder2,
            &[
                "tr[2;12,4,0,0]",
                "th01^12*v01^4 + th10^12*v10^4 + th00^12*v00^4",
                "2*E[8,2] + 272/43*eta^12*v^4",
            ],
        ),
        r(
            "tr2_15_0_1_0",
            TraceOrder2,
            &[
                "tr[2;15,0,1,0]",
                "th01^15*v01(2z) + th10^15*v10(2z) + th00^15*v00(2z)",
                "2*E[8,2] + 2336/43*eta^12*v^4",
            ],
        ),
        r(
            "tr2_10_6_0_0",
            TraceOrder2,
            &[
                "tr[2;10,6,0,0]",
                "th01^10*v01^6 + th10^10*v10^6 + th00^10*v00^6",
                "2*E[8,3] - 28/547*eta^12*v^4*phi01",
            ],
        )
        .note("phi01 is the weak form of weight 0 and index 1"),
        IdentityRecord {
            id: "tr2_8_8_0_0",
            aliases: &[],
            group: TraceOrder2,
            readings: vec![
                Reading { label: "E[k,4] as V_4(E_k,1)/σ", sides: vec!["tr[2;8,8,0,0]", "th01^8*v01^8 + th10^8*v10^8 + th00^8*v00^8", "2*E[8,4] - 73/43*eta^12*v^4*phi02"] },
                Reading { label: "E[k,4] group-averaged", sides: vec!["tr[2;8,8,0,0]", "th01^8*v01^8 + th10^8*v10^8 + th00^8*v00^8", "2*Eavg[8,4] - 73/43*eta^12*v^4*phi02"] },
            ],
            note: Some(INDEX_FOUR_NOTE),
            index: None,
        },
        r(
            "tr2_13_2_1_0",
            TraceOrder2,
            &[
                "tr[2;13,2,1,0]",
                "th01^13*v01^2*v01(2z) + th10^13*v10^2*v10(2z) + th00^13*v00^2*v00(2z)",
                "2*E[8,3] + 2160/547*eta^12*v^4*phi01",
            ],
        )
        .note("phi01 is the weak form of weight 0 and index 1"),
        r(
            "tr2_5_2_1_0",
            TraceOrder2,
            &[
                "tr[2;5,2,1,0]",
                "th01^5*v01^2*v01(2z) + th10^5*v10^2*v10(2z) + th00^5*v00^2*v00(2z)",
                "2*E[4,3]",
            ],
        ),
        IdentityRecord {
            id: "tr2_11_4_1_0",
            aliases: &[],
            group: TraceOrder2,
            readings: vec![
                Reading {
                    label: "th00^12 as printed, E[8,4] as V_4(E_8,1)/σ",
                    sides: vec![
                        "th01^11*v01^4*v01(2z) + th10^11*v10^4*v10(2z) + th00^12*v00^4*v00(2z)",
                        "2*E[8,4] + 271/43*eta^12*v^4*phi02",
                    ],
                },
                Reading {
                    label: "th00^12 as printed, E[8,4] group-averaged",
                    sides: vec![
                        "th01^11*v01^4*v01(2z) + th10^11*v10^4*v10(2z) + th00^12*v00^4*v00(2z)",
                        "2*Eavg[8,4] + 271/43*eta^12*v^4*phi02",
                    ],
                },
                Reading {
                    label: "th00^11, E[8,4] as V_4(E_8,1)/σ",
                    sides: vec![
                        "tr[2;11,4,1,0]",
                        "th01^11*v01^4*v01(2z) + th10^11*v10^4*v10(2z) + th00^11*v00^4*v00(2z)",
                        "2*E[8,4] + 271/43*eta^12*v^4*phi02",
                    ],
                },
                Reading {
                    label: "th00^11, E[8,4] group-averaged",
                    sides: vec![
                        "tr[2;11,4,1,0]",
                        "th01^11*v01^4*v01(2z) + th10^11*v10^4*v10(2z) + th00^11*v00^4*v00(2z)",
                        "2*Eavg[8,4] + 271/43*eta^12*v^4*phi02",
                    ],
                },
            ],
            note: Some(
                "the printed exponent of th00 breaks homogeneity in weight; both exponents and both \
                 index-4 Eisenstein normalizations are checked",
            ),
            index: None,
        },
        // N = 3, 5, 7.
        r("tr3_0_6_0_0", TraceOrder3, &["tr[3;0,6,0,0]", "2*v^6"]),
        r("tr3_6_0_0_0", TraceOrder3, &["tr[3;6,0,0,0]", "0"]),
        r("tr3_3_3_0_0", TraceOrder3, &["tr[3;3,3,0,0]", "0"]),
        r("tr3_12_0_0_0", TraceOrder3, &["tr[3;12,0,0,0]", "-72*eta^12"]),
        r("tr3_9_3_0_0", TraceOrder3, &["tr[3;9,3,0,0]*v", "-36*eta^12*v(2z)"]),
        r("tr3_6_6_0_0", TraceOrder3, &["tr[3;6,6,0,0]*v^2", "-18*eta^12*v(2z)^2"]).alias(&["c05"]),
        r("tr3_3_9_0_0", TraceOrder3, &["tr[3;3,9,0,0]*v^3", "-9*eta^12*v(2z)^3"]),
        r(
            "tr3_0_12_0_0",
            TraceOrder3,
            &["tr[3;0,12,0,0]*v(2z)", "-36*eta^12*v(4z) + 2*v^12*v(2z)"],
        ),
        r("tr3_21_3_0_0", TraceOrder3, &["tr[3;21,3,0,0]*v", "756*Delta*v(2z)"]),
        r("tr3_24_0_0_0", TraceOrder3, &["tr[3;24,0,0,0]", "1512*Delta"]),
        r("tr3_4_1_1_0", TraceOrder3, &["tr[3;4,1,1,0]", "0"]),
        r("tr3_1_4_1_0", TraceOrder3, &["tr[3;1,4,1,0]", "0"]),
        r("tr3_2_2_2_0", TraceOrder3, &["tr[3;2,2,2,0]", "0"]),
        r("tr3_0_3_3_0", TraceOrder3, &["tr[3;0,3,3,0]", "2*v^3*v(2z)^3"]),
        r("tr3_5_0_0_1", TraceOrder3, &["tr[3;5,0,0,1]", "-3*v^5*v(2z)"]),
        r("tr3_3_1_1_1", TraceOrder3, &["tr[3;3,1,1,1]", "0"]),
        r("tr3_2_3_0_1", TraceOrder3, &["tr[3;2,3,0,1]", "-3*v^4*v(2z)^2"]),
        r("tr3_0_4_1_1", TraceOrder3, &["tr[3;0,4,1,1]", "-v^4*v(2z)*v(3z)"]),
        r("tr3_10_1_1_0", TraceOrder3, &["tr[3;10,1,1,0]*v", "-3*eta^12*v(2z)*phi01"]),
        r(
            "tr3_11_0_0_1",
            TraceOrder3,
            &["tr[3;11,0,0,1]*v", "-3*eta^12*v(2z)*(phi01*phi02 - 15*phi03)"],
        ),
        r("tr3_1_1_4_0", TraceOrder3, &["tr[3;1,1,4,0]", "3*v^4*v(2z)*v(3z)"]),
        r("tr3_1_2_2_1", TraceOrder3, &["tr[3;1,2,2,1]", "0"]),
        r("tr3_7_4_1_0", TraceOrder3, &["tr[3;7,4,1,0]*v", "-24*eta^12*v(3z)"]),
        r("tr3_15_3_0_0", TraceOrder3, &["tr[3;15,3,0,0]*v", "3*eta^6*E6*v(2z)"]),
        r("tr3_18_0_0_0", TraceOrder3, &["tr[3;18,0,0,0]", "6*eta^6*E6"]),
        r("tr3_27_3_0_0", TraceOrder3, &["tr[3;27,3,0,0]*v", "-90*eta^18*E6*v(2z)"]),
        r("tr3_30_0_0_0", TraceOrder3, &["tr[3;30,0,0,0]", "-180*eta^18*E6"]),
        r("tr5_10_0_0_0", TraceOrder3, &["tr[5;10,0,0,0]", "0"]),
        r("tr7_14_0_0_0", TraceOrder3, &["tr[7;14,0,0,0]", "0"]),
        // Antisymmetric constructions; each displayed theta polynomial is 2A.
        r(
            "a1_2_2_0",
            Antisymmetric,
            &[
                "2*A[1;2,2,0]",
                "(2*th01^10 + 2*th01^6*th10^4 - th01^2*th10^8)*v01^2 \
                 + (-2*th10^10 - 2*th01^4*th10^6 + th01^8*th10^2)*v10^2",
                "2*E[6,1]",
            ],
        ),
        r(
            "a2_2_2_0",
            Antisymmetric,
            &[
                "2*A[2;2,2,0]",
                "(2*th01^8 + th01^4*th10^4)*v01^4 + (2*th01^6*th10^2 - 2*th01^2*th10^6)*v01^2*v10^2 \
                 - (2*th10^8 + th01^4*th10^4)*v10^4",
                "2*E[6,2]",
            ],
        ),
        r(
            "a3_2_2_0",
            Antisymmetric,
            &[
                "2*A[3;2,2,0] - 44/61*eta^6*v^6",
                "2*th01^6*v01^6 + 3*th01^4*th10^2*v01^4*v10^2 - 3*th01^2*th10^4*v01^2*v10^4 \
                 - 2*th10^6*v10^6 - 44/61*eta^6*v^6",
                "2*E[6,3]",
            ],
        ),
        r(
            "a3_4_0_0",
            Antisymmetric,
            &[
                "2*A[3;4,0,0]",
                "2*th01^12 + 3*th01^8*th10^4 - 3*th01^4*th10^8 - 2*th10^12",
                "2*E6",
            ],
        ),
        // Weight-zero quotients, cleared of ϑ where the value is a quotient.
        r(
            "w2_2_0_0",
            Weak,
            &["4*W[2;2,0,0]", "4*(xi00^2 + xi01^2 + xi10^2)", "phi01"],
        )
        .note("the displayed sum of xi^2 is phi01/4"),
        r(
            "w2_0_1_0",
            Weak,
            &["2*W[2;0,1,0]", "2*(xi00(2z) + xi01(2z) + xi10(2z))", "phi02"],
        )
        .note("the displayed sum of xi(2z) is phi02/2"),
        r(
            "w3_3_0_0",
            Weak,
            &[
                "W[3;3,0,0]*v",
                "(xi[1/6,1/6]^3 + xi[1/6,1/2]^3 + xi[1/6,5/6]^3 + xi[1/2,1/6]^3 + xi[1/2,5/6]^3 \
                 + xi[5/6,1/6]^3 + xi[5/6,1/2]^3 + xi[5/6,5/6]^3)*v",
                "4*v(2z)",
            ],
        ),
        r(
            "w3_0_0_1",
            Weak,
            &[
                "W[3;0,0,1]*v^3",
                "(xi[1/6,1/6](3z) + xi[1/6,1/2](3z) + xi[1/6,5/6](3z) + xi[1/2,1/6](3z) + xi[1/2,5/6](3z) \
                 + xi[5/6,1/6](3z) + xi[5/6,1/2](3z) + xi[5/6,5/6](3z))*v^3",
                "v(2z)^3",
            ],
        ),
        r(
            "w3_1_1_0",
            Weak,
            &[
                "3*W[3;1,1,0]*v",
                "3*(xi[1/6,1/6]*xi[1/6,1/6](2z) + xi[1/6,1/2]*xi[1/6,1/2](2z) + xi[1/6,5/6]*xi[1/6,5/6](2z) \
                 + xi[1/2,1/6]*xi[1/2,1/6](2z) + xi[1/2,5/6]*xi[1/2,5/6](2z) + xi[5/6,1/6]*xi[5/6,1/6](2z) \
                 + xi[5/6,1/2]*xi[5/6,1/2](2z) + xi[5/6,5/6]*xi[5/6,5/6](2z))*v",
                "v(2z)*phi01",
            ],
        ),
        // Orbit products.
        r("ap01", Product, &["v01*v10*v00*v", "eta^3*v(2z)", "-prod[2]*v"]),
        r("c1", Product, &["th01*th10*th00", "2*eta^3", "-prod[2](0)"]),
        r(
            "prod3",
            Product,
            &[
                "v[1/6,1/6]*v[1/6,1/2]*v[1/6,5/6]*v[1/2,1/6]*v[1/2,5/6]*v[5/6,1/6]*v[5/6,1/2]*v[5/6,5/6]*v",
                "-eta^8*v(3z)",
                "-prod[3]*v",
            ],
        )
        .note("reduced characteristics; the unreduced product has the opposite sign"),
        r(
            "prod3_constant",
            Product,
            &[
                "th[1/6,1/6]*th[1/6,1/2]*th[1/6,5/6]*th[1/2,1/6]*th[1/2,5/6]*th[5/6,1/6]*th[5/6,1/2]*th[5/6,5/6]",
                "-3*eta^8",
                "-prod[3](0)",
            ],
        ),
        // ϑ² from the even thetas.
        r("theta_square", ThetaSquare, &["v^2*th00^2", "th01^2*v10^2 - th10^2*v01^2"]).index(int(1)),
    ]
}

/// All registered identities, in registry order.
pub fn registry() -> Vec<IdentityRecord> {
    all_records()
}

pub fn find(name: &str) -> Result<IdentityRecord> {
    all_records()
        .into_iter()
        .find(|r| r.matches(name))
        .ok_or_else(|| Error::UnknownIdentity(name.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        })
    }
}

/// First coefficient q^n ζ^l where side `side` differs from side 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Locus {
    pub prec: Rat,
    pub side: usize,
    pub n: Rat,
    pub l: Rat,
    pub expected: CycNum,
    pub found: CycNum,
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "side {} differs at q^{} ζ^{} (prec {}): {} vs {}",
            self.side, self.n, self.l, self.prec, self.expected, self.found
        )
    }
}

#[derive(Clone, Debug)]
pub struct ReadingOutcome {
    pub label: &'static str,
    pub status: Status,
    pub locus: Option<Locus>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub id: String,
    pub group: Group,
    pub status: Status,
    pub meta: Option<FormMeta>,
    pub prec_used: Vec<Rat>,
    /// Label of the reading that passed.
    pub reading: Option<&'static str>,
    pub outcomes: Vec<ReadingOutcome>,
    pub note: Option<&'static str>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// First locus among failing readings.
    pub fn locus(&self) -> Option<&Locus> {
        self.outcomes.iter().find_map(|o| o.locus.as_ref())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "id": self.id,
            "group": self.group.name(),
            "status": self.status.to_string(),
            "prec_used": self.prec_used.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        });
        if let Some(m) = &self.meta {
            v["meta"] = serde_json::json!({
                "weight": m.weight.to_string(),
                "index": m.index.to_string(),
                "eta_power": m.eta_power,
                "heis_parity": m.heis_parity,
            });
        }
        if let Some(r) = self.reading {
            v["reading"] = r.into();
        }
        if let Some(l) = self.locus() {
            v["locus"] = serde_json::json!({
                "prec": l.prec.to_string(),
                "side": l.side,
                "q": l.n.to_string(),
                "zeta": l.l.to_string(),
                "expected": l.expected.to_string(),
                "found": l.found.to_string(),
            });
        }
        let errors: Vec<&str> = self
            .outcomes
            .iter()
            .filter_map(|o| o.error.as_deref())
            .collect();
        if !errors.is_empty() {
            v["errors"] = errors.into();
        }
        if let Some(n) = self.note {
            v["note"] = n.into();
        }
        v
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let precs: Vec<String> = self.prec_used.iter().map(|p| p.to_string()).collect();
        write!(
            f,
            "{:<5} {:<16} prec {}",
            self.status,
            self.id,
            precs.join(",")
        )?;
        if let Some(r) = self.reading {
            if self.outcomes.len() > 1 {
                write!(f, "  [{r}]")?;
            }
        }
        if !self.passed() {
            if let Some(l) = self.locus() {
                write!(f, "  {l}")?;
            }
            for o in &self.outcomes {
                if let Some(e) = &o.error {
                    write!(f, "  {}: {e}", o.label)?;
                }
            }
        }
        Ok(())
    }
}

/// Checks that all sides agree below `prec`. Ok(None) means equality.
pub fn compare_sides(sides: &[&str], prec: Rat) -> Result<Option<Locus>> {
    let values = sides
        .iter()
        .map(|s| evaluate(&parse(s)?, prec).map(|(series, _)| series))
        .collect::<Result<Vec<_>>>()?;
    for (i, other) in values.iter().enumerate().skip(1) {
        if let Some((n, l, expected, found)) = values[0].first_difference(other, prec)? {
            return Ok(Some(Locus {
                prec,
                side: i,
                n,
                l,
                expected,
                found,
            }));
        }
    }
    Ok(None)
}

fn check_reading(reading: &Reading, precs: &[Rat]) -> ReadingOutcome {
    for &p in precs {
        match compare_sides(&reading.sides, p) {
            Ok(None) => {}
            Ok(Some(locus)) => {
                return ReadingOutcome {
                    label: reading.label,
                    status: Status::Fail,
                    locus: Some(locus),
                    error: None,
                }
            }
            Err(e) => {
                return ReadingOutcome {
                    label: reading.label,
                    status: Status::Error,
                    locus: None,
                    error: Some(e.to_string()),
                }
            }
        }
    }
    ReadingOutcome {
        label: reading.label,
        status: Status::Pass,
        locus: None,
        error: None,
    }
}

/// Verifies a record at `prec` (default index + 4) and at `prec + 2`.
pub fn verify_record(record: &IdentityRecord, prec: Option<Rat>) -> VerificationReport {
    let meta = if record.index.is_some() {
        Ok(record.meta().ok())
    } else {
        record.meta().map(Some)
    };
    let base = match prec {
        Some(p) => Ok(p),
        None => record.default_prec(),
    };
    let mut report = VerificationReport {
        id: record.id.to_string(),
        group: record.group,
        status: Status::Error,
        meta: meta.as_ref().ok().copied().flatten(),
        prec_used: Vec::new(),
        reading: None,
        outcomes: Vec::new(),
        note: record.note,
    };
    let base = match (base, meta) {
        (Ok(b), Ok(_)) => b,
        (Err(e), _) | (_, Err(e)) => {
            report.outcomes.push(ReadingOutcome {
                label: "meta",
                status: Status::Error,
                locus: None,
                error: Some(e.to_string()),
            });
            return report;
        }
    };
    report.prec_used = vec![base, base + int(2)];
    report.outcomes = record
        .readings
        .iter()
        .map(|r| check_reading(r, &report.prec_used))
        .collect();
    if let Some(ok) = report.outcomes.iter().find(|o| o.status == Status::Pass) {
        report.status = Status::Pass;
        report.reading = Some(ok.label);
    } else if report.outcomes.iter().any(|o| o.status == Status::Fail) {
        report.status = Status::Fail;
    }
    report
}

pub fn verify_identity(id: &str, prec: Option<Rat>) -> Result<VerificationReport> {
    Ok(verify_record(&find(id)?, prec))
}

/// Verifies every record whose id or group name contains `filter`, in
/// parallel; reports come back in registry order.
pub fn run_registry(filter: Option<&str>) -> Vec<VerificationReport> {
    let records: Vec<IdentityRecord> = all_records()
        .into_iter()
        .filter(|r| filter.is_none_or(|f| r.id.contains(f) || r.group.name() == f))
        .collect();
    records.par_iter().map(|r| verify_record(r, None)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_identity_count() {
        let records = registry();
        let count = |g: Group| records.iter().filter(|r| r.group == g).count();
        assert_eq!(count(Group::TraceBasic), 6);
        assert_eq!(count(Group::TraceOrder2), 15);
        assert_eq!(count(Group::TraceOrder3), 29);
        assert_eq!(count(Group::Antisymmetric), 4);
        assert_eq!(count(Group::Weak), 5);
        assert_eq!(count(Group::Product), 4);
        let orbit: usize = Group::ORBIT_IDENTITIES.iter().map(|&g| count(g)).sum();
        assert_eq!(orbit, 63);
    }

    #[test]
    fn ids_unique_and_metas_consistent() {
        let records = registry();
        let mut names: Vec<&str> = records
            .iter()
            .flat_map(|r| std::iter::once(r.id).chain(r.aliases.iter().copied()))
            .collect();
        let total = names.len();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), total);
        for r in records.iter().filter(|r| r.index.is_none()) {
            r.meta().unwrap_or_else(|e| panic!("{}: {e}", r.id));
        }
    }

    #[test]
    fn small_identities_pass() {
        for id in ["c00", "c01", "c1", "ap01", "theta_square"] {
            let report = verify_identity(id, None).unwrap();
            assert!(report.passed(), "{report}");
        }
    }

    #[test]
    fn corrupted_side_fails_with_locus() {
        let locus = compare_sides(&["th01*th10*th00", "3*eta^3"], int(4))
            .unwrap()
            .unwrap();
        assert_eq!(locus.side, 1);
        assert_eq!(locus.n, Rat::new(1, 8));
        assert!(matches!(
            verify_identity("nope", None),
            Err(Error::UnknownIdentity(_))
        ));
    }
}
