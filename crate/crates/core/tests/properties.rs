//! Randomized invariants, 1000 cases each.

mod invariants;

macro_rules! suites {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                if let Err(e) = invariants::$name() {
                    panic!("{e}");
                }
            }
        )*
    };
}

suites!(
    cyclotomic_distributive,
    cyclotomic_commutative_associative,
    cyclotomic_inverse,
    cyclotomic_lift_preserves_value,
    cyclotomic_conjugation_is_multiplicative,
    roots_of_unity_sum_to_zero,
    cyclotomic_polynomials_multiply_to_binomial,
    series_ring_laws,
    division_inverts_multiplication,
    leibniz_rule,
    substitution_is_a_ring_morphism,
    specialization_is_a_ring_morphism,
    series_json_round_trip,
    heisenberg_cocycle,
    named_forms_are_elliptic,
    holomorphic_combinations_are_elliptic,
    decompose_recovers_coefficients,
    odd_and_even_thetas,
    triple_product_matches_sum,
    rational_characteristics_are_quasi_periodic,
    antisymmetric_parts,
    rational_big_round_trip,
);

#[test]
fn every_suite_is_wired() {
    assert_eq!(invariants::SUITES.len(), 22);
}
