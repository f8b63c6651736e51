//! Randomized invariants shared by the property and acceptance targets.
//! Each suite runs `CASES` generated cases and reports the first failure.

use std::sync::LazyLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{TestCaseError, TestRunner};
use theta_orbits::cyclotomic::cyclotomic_polynomial;
use theta_orbits::eisenstein::{jacobi_eisenstein, jacobi_eisenstein_1};
use theta_orbits::rational::{int, rat};
use theta_orbits::relations::{
    check_form_axioms, ellipticity_holds, tr, AntisymmetricParts, TrParams,
};
use theta_orbits::spaces::{decompose, holomorphic_basis, weak_basis, Generator, SpaceBasis};
use theta_orbits::thetas::{
    slash_heisenberg, slash_heisenberg_bounded, theta, theta_char, theta_meta,
    theta_triple_product, HeisenbergElement,
};
use theta_orbits::{CycNum, FJSeries, FormMeta, Precision, Rat, SupportBound};

pub const CASES: u32 = 1000;

pub type Outcome = Result<(), String>;

fn check<S: Strategy>(
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Outcome {
    let mut runner = TestRunner::new(ProptestConfig {
        cases: CASES,
        ..ProptestConfig::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

const ORDERS: [i64; 9] = [1, 2, 3, 4, 5, 6, 8, 12, 24];

fn cyc() -> impl Strategy<Value = CycNum> {
    (
        prop::sample::select(ORDERS.to_vec()),
        prop::collection::vec((0i64..24, -5i64..=5, 1i64..=3), 0..4),
    )
        .prop_map(|(order, parts)| {
            parts.iter().fold(CycNum::zero(), |acc, &(j, num, den)| {
                let c = CycNum::from_rat(&rat(num, den));
                &acc + &(&c * &CycNum::root_of_unity(j % order, order))
            })
        })
}

fn nonzero_cyc() -> impl Strategy<Value = CycNum> {
    cyc().prop_filter("nonzero", |c| !c.is_zero())
}

/// Small series with bounded support, truncated or exact.
fn series_with(exact: bool) -> impl Strategy<Value = FJSeries> {
    (
        1i64..=3,
        1i64..=2,
        prop::collection::vec((0i64..4, -3i64..=3, cyc()), 0..5),
        prop::option::of(2i64..6),
    )
        .prop_map(move |(q_den, z_den, terms, prec)| {
            let terms = terms
                .into_iter()
                .map(|(n, l, c)| (rat(n, q_den), rat(l, z_den), c))
                .collect();
            let prec = match prec {
                Some(p) if !exact => Precision::at(rat(p, q_den) + int(1)),
                _ => Precision::EXACT,
            };
            FJSeries::from_terms(terms, prec)
        })
}

fn series() -> impl Strategy<Value = FJSeries> {
    series_with(false)
}

/// Equal wherever both are known.
fn agree(a: &FJSeries, b: &FJSeries) -> bool {
    match a.prec().min(b.prec()).finite() {
        Some(q) => a.equal_to_order(b, q).unwrap(),
        None => a == b,
    }
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (-4i64..=4, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

pub fn cyclotomic_distributive() -> Outcome {
    check((cyc(), cyc(), cyc()), |(a, b, c)| {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        Ok(())
    })
}

pub fn cyclotomic_commutative_associative() -> Outcome {
    check((cyc(), cyc(), cyc()), |(a, b, c)| {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        Ok(())
    })
}

pub fn cyclotomic_inverse() -> Outcome {
    check(nonzero_cyc(), |a| {
        prop_assert!((&a * &a.inv().unwrap()).is_one());
        prop_assert_eq!(a.div(&a).unwrap(), CycNum::one());
        Ok(())
    })
}

pub fn cyclotomic_lift_preserves_value() -> Outcome {
    check((cyc(), 1u32..=4), |(a, k)| {
        let lifted = a.lift(a.order() * k).unwrap();
        prop_assert_eq!(&lifted, &a);
        prop_assert_eq!(&(&lifted - &a), &CycNum::zero());
        Ok(())
    })
}

pub fn cyclotomic_conjugation_is_multiplicative() -> Outcome {
    check((cyc(), cyc()), |(a, b)| {
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!(CycNum::from_json(&a.to_json()).unwrap(), a);
        Ok(())
    })
}

pub fn roots_of_unity_sum_to_zero() -> Outcome {
    check(2i64..=60, |order| {
        let sum = (0..order).fold(CycNum::zero(), |acc, j| {
            &acc + &CycNum::root_of_unity(j, order)
        });
        prop_assert!(sum.is_zero());
        Ok(())
    })
}

pub fn cyclotomic_polynomials_multiply_to_binomial() -> Outcome {
    check(1u32..=60, |order| {
        let mut product = vec![BigInt::from(1)];
        for d in (1..=order).filter(|d| order % d == 0) {
            let phi = cyclotomic_polynomial(d);
            let mut next = vec![BigInt::from(0); product.len() + phi.len() - 1];
            for (i, p) in product.iter().enumerate() {
                for (j, c) in phi.iter().enumerate() {
                    next[i + j] += p * c;
                }
            }
            product = next;
        }
        let mut binomial = vec![BigInt::from(0); order as usize + 1];
        binomial[0] = BigInt::from(-1);
        binomial[order as usize] = BigInt::from(1);
        prop_assert_eq!(product, binomial);
        Ok(())
    })
}

pub fn series_ring_laws() -> Outcome {
    check((series(), series(), series()), |(a, b, c)| {
        prop_assert!(agree(&a.mul(&b), &b.mul(&a)));
        prop_assert!(agree(&a.add(&b), &b.add(&a)));
        prop_assert!(agree(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
        prop_assert!(agree(&a.add(&b).mul(&c), &a.mul(&c).add(&b.mul(&c))));
        prop_assert!(agree(&a.sub(&a), &FJSeries::zero(a.prec())));
        Ok(())
    })
}

pub fn division_inverts_multiplication() -> Outcome {
    check((series(), series()), |(a, b)| {
        prop_assume!(!b.is_zero());
        // An exact quotient by a multi-term divisor is an infinite series.
        let a = if a.prec().is_exact() && b.prec().is_exact() {
            a.truncate(Precision::at(int(6)))
        } else {
            a
        };
        let quotient = a.mul(&b).div(&b).unwrap();
        prop_assert!(
            agree(&quotient, &a),
            "{:?} / {:?} = {:?}",
            a.mul(&b),
            b,
            quotient
        );
        Ok(())
    })
}

pub fn leibniz_rule() -> Outcome {
    check((series(), series()), |(a, b)| {
        let lhs = a.mul(&b).d_z();
        let rhs = a.d_z().mul(&b).add(&a.mul(&b.d_z()));
        prop_assert!(agree(&lhs, &rhs));
        Ok(())
    })
}

pub fn substitution_is_a_ring_morphism() -> Outcome {
    check((series(), series(), -3i64..=3), |(a, b, m)| {
        let s = |x: &FJSeries| x.substitute_z(m);
        prop_assert!(agree(&s(&a.add(&b)), &s(&a).add(&s(&b))));
        prop_assert!(agree(&s(&a.mul(&b)), &s(&a).mul(&s(&b))));
        Ok(())
    })
}

pub fn specialization_is_a_ring_morphism() -> Outcome {
    check(
        (
            series_with(true),
            series_with(true),
            (0i64..=4, 1i64..=4),
            small_rat(),
        ),
        |(a, b, r, s)| {
            let r = rat(r.0, r.1);
            let sp = |x: &FJSeries| x.specialize_z(r, s, None).0;
            prop_assert!(agree(&sp(&a.add(&b)), &sp(&a).add(&sp(&b))));
            prop_assert!(agree(&sp(&a.mul(&b)), &sp(&a).mul(&sp(&b))));
            Ok(())
        },
    )
}

pub fn series_json_round_trip() -> Outcome {
    check(series(), |a| {
        prop_assert_eq!(FJSeries::from_json(&a.to_json()).unwrap(), a);
        Ok(())
    })
}

/// Named forms with their metas, built once.
static FORMS: LazyLock<Vec<(String, FJSeries, FormMeta)>> = LazyLock::new(|| {
    let prec = int(6);
    let mut forms = vec![("theta".to_string(), theta(prec), theta_meta())];
    for g in Generator::ALL {
        let (s, m) = theta_orbits::spaces::generator(g.name(), prec).unwrap();
        forms.push((g.name().into(), s, m));
    }
    for (k, m) in [(4, 1), (6, 1), (8, 1), (4, 2), (6, 2), (4, 3), (6, 3)] {
        let (s, meta) = if m == 1 {
            jacobi_eisenstein_1(k, prec)
        } else {
            jacobi_eisenstein(k, m, prec)
        }
        .unwrap();
        forms.push((format!("E{k},{m}"), s, meta));
    }
    for p in [
        (2, 0, 4, 0, 0),
        (2, 2, 0, 1, 1),
        (3, 0, 6, 0, 0),
        (3, 4, 1, 1, 0),
        (2, 6, 2, 0, 0),
    ] {
        let params = TrParams::new(p.0, p.1, p.2, p.3, p.4).unwrap();
        let (s, m) = tr(&params, prec).unwrap();
        forms.push((params.id(), s, m));
    }
    forms
});

/// Holomorphic bases of a few spaces, built once.
static BASES: LazyLock<Vec<SpaceBasis>> = LazyLock::new(|| {
    [
        FormMeta::modular(4, 1),
        FormMeta::modular(10, 1),
        FormMeta::modular(8, 2),
        FormMeta::modular(12, 2),
        FormMeta::new(int(6), int(3), 12, 0),
        FormMeta::new(int(12), rat(3, 2), 0, 1),
    ]
    .iter()
    .map(|m| holomorphic_basis(m, m.index + int(4)).unwrap())
    .collect()
});

static WEAK_BASES: LazyLock<Vec<SpaceBasis>> = LazyLock::new(|| {
    [
        FormMeta::modular(0, 2),
        FormMeta::modular(-2, 2),
        FormMeta::modular(8, 3),
        FormMeta::new(int(2), rat(5, 2), 0, 1),
    ]
    .iter()
    .map(|m| weak_basis(m, m.index + int(3)).unwrap())
    .collect()
});

fn combination(basis: &SpaceBasis, coeffs: &[i64]) -> (FJSeries, Vec<CycNum>) {
    let mut acc = FJSeries::zero(Precision::at(basis.prec));
    let mut used = Vec::new();
    for (e, &c) in basis.elements.iter().zip(coeffs.iter().cycle()) {
        acc = acc.add(&e.series.scale_int(c));
        used.push(CycNum::from_int(c));
    }
    (acc.truncate(Precision::at(basis.prec)), used)
}

fn heisenberg() -> impl Strategy<Value = HeisenbergElement> {
    (small_rat(), small_rat(), small_rat()).prop_map(|(x, y, r)| HeisenbergElement::new(x, y, r))
}

pub fn heisenberg_cocycle() -> Outcome {
    check(
        (0usize..64, heisenberg(), heisenberg()),
        |(index, h1, h2)| {
            let (name, form, meta) = &FORMS[index % FORMS.len()];
            // The intermediate may be empty below its precision, so the support
            // bound of the original form is carried through both steps.
            let bound = SupportBound {
                index: meta.index,
                hyperbolic_order: form
                    .hyperbolic_order(meta.index)
                    .unwrap_or(int(0))
                    .min(int(0)),
            };
            let stepwise =
                slash_heisenberg_bounded(&slash_heisenberg_bounded(form, &bound, &h1), &bound, &h2);
            let composed = slash_heisenberg(form, meta, &h1.compose(&h2));
            prop_assert!(agree(&stepwise, &composed), "{name}");
            Ok(())
        },
    )
}

pub fn named_forms_are_elliptic() -> Outcome {
    check((0usize..64, 1i64..=12), |(index, cut)| {
        let (name, form, meta) = &FORMS[index % FORMS.len()];
        let truncated = form.truncate(Precision::at(rat(cut, 2)));
        prop_assert!(ellipticity_holds(&truncated, meta), "{name}");
        prop_assert!(
            check_form_axioms(&truncated, meta).passed()
                || meta.weight < int(0)
                || name.starts_with("phi"),
            "{name}"
        );
        Ok(())
    })
}

pub fn holomorphic_combinations_are_elliptic() -> Outcome {
    check(
        (0usize..6, prop::collection::vec(-20i64..=20, 1..4)),
        |(index, coeffs)| {
            let basis = &BASES[index];
            let (form, _) = combination(basis, &coeffs);
            prop_assert!(ellipticity_holds(&form, &basis.meta));
            prop_assert!(check_form_axioms(&form, &basis.meta).passed());
            Ok(())
        },
    )
}

pub fn decompose_recovers_coefficients() -> Outcome {
    check(
        (0usize..10, prop::collection::vec(-20i64..=20, 1..6)),
        |(index, coeffs)| {
            let basis = if index < 6 {
                &BASES[index]
            } else {
                &WEAK_BASES[index - 6]
            };
            let (form, expected) = combination(basis, &coeffs);
            prop_assert_eq!(decompose(&form, basis).unwrap(), expected);
            Ok(())
        },
    )
}

pub fn odd_and_even_thetas() -> Outcome {
    check(1i64..=40, |cut| {
        let prec = rat(cut, 4);
        let odd = theta(prec);
        prop_assert_eq!(odd.substitute_z(-1), odd.neg());
        for (a, b) in [(0, 0), (0, 1), (1, 0)] {
            let even = theta_char(rat(a, 2), rat(b, 2), prec);
            prop_assert_eq!(even.substitute_z(-1), even);
        }
        Ok(())
    })
}

pub fn triple_product_matches_sum() -> Outcome {
    check(1i64..=80, |cut| {
        let prec = rat(cut, 8);
        let minus_i = CycNum::root_of_unity(3, 4);
        prop_assert_eq!(
            theta_triple_product(prec),
            theta_char(rat(1, 2), rat(1, 2), prec).scalar_mul(&minus_i)
        );
        Ok(())
    })
}

pub fn rational_characteristics_are_quasi_periodic() -> Outcome {
    check((small_rat(), small_rat(), 2i64..=6), |(a, b, cut)| {
        // ϑ_{a,b+1} = e(a)·ϑ_{a,b}: the sum runs over n + a.
        let prec = int(cut);
        let shifted = theta_char(a, b + int(1), prec);
        let base = theta_char(a, b, prec).scalar_mul(&CycNum::e(&a));
        prop_assert!(agree(&shifted, &base));
        Ok(())
    })
}

static PARTS: LazyLock<Vec<AntisymmetricParts>> = LazyLock::new(|| {
    [(2, 2, 0), (1, 1, 1), (3, 1, 0), (0, 2, 1)]
        .iter()
        .map(|&(a, b, c)| AntisymmetricParts::new(a, b, c, int(4)))
        .collect()
});

pub fn antisymmetric_parts() -> Outcome {
    check((0usize..4, 1usize..=3, 1usize..=3), |(index, i, j)| {
        let parts = &PARTS[index];
        prop_assert_eq!(parts.s_big(i, j), parts.s_big(j, i).neg());
        prop_assert_eq!(parts.s_small(i, j), parts.s_small(j, i).neg());
        Ok(())
    })
}

pub fn rational_big_round_trip() -> Outcome {
    check((-1000i64..1000, 1i64..1000), |(n, d)| {
        let r = rat(n, d);
        let big = BigRational::new(BigInt::from(n), BigInt::from(d));
        prop_assert_eq!(theta_orbits::rational::to_big(&r), big);
        prop_assert_eq!(
            theta_orbits::rational::parse_rat(&r.to_string()).unwrap(),
            r
        );
        Ok(())
    })
}

pub type Suite = (&'static str, fn() -> Outcome);

pub const SUITES: &[Suite] = &[
    ("cyclotomic_distributive", cyclotomic_distributive),
    (
        "cyclotomic_commutative_associative",
        cyclotomic_commutative_associative,
    ),
    ("cyclotomic_inverse", cyclotomic_inverse),
    (
        "cyclotomic_lift_preserves_value",
        cyclotomic_lift_preserves_value,
    ),
    (
        "cyclotomic_conjugation_is_multiplicative",
        cyclotomic_conjugation_is_multiplicative,
    ),
    ("roots_of_unity_sum_to_zero", roots_of_unity_sum_to_zero),
    (
        "cyclotomic_polynomials_multiply_to_binomial",
        cyclotomic_polynomials_multiply_to_binomial,
    ),
    ("series_ring_laws", series_ring_laws),
    (
        "division_inverts_multiplication",
        division_inverts_multiplication,
    ),
    ("leibniz_rule", leibniz_rule),
    (
        "substitution_is_a_ring_morphism",
        substitution_is_a_ring_morphism,
    ),
    (
        "specialization_is_a_ring_morphism",
        specialization_is_a_ring_morphism,
    ),
    ("series_json_round_trip", series_json_round_trip),
    ("heisenberg_cocycle", heisenberg_cocycle),
    ("named_forms_are_elliptic", named_forms_are_elliptic),
    (
        "holomorphic_combinations_are_elliptic",
        holomorphic_combinations_are_elliptic,
    ),
    (
        "decompose_recovers_coefficients",
        decompose_recovers_coefficients,
    ),
    ("odd_and_even_thetas", odd_and_even_thetas),
    ("triple_product_matches_sum", triple_product_matches_sum),
    (
        "rational_characteristics_are_quasi_periodic",
        rational_characteristics_are_quasi_periodic,
    ),
    ("antisymmetric_parts", antisymmetric_parts),
    ("rational_big_round_trip", rational_big_round_trip),
];
