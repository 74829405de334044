mod common;
mod props;

use common::*;

macro_rules! properties {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                if let Err(e) = props::$name() {
                    panic!("{e}");
                }
            }
        )*
    };
}

properties!(
    weight_filtration_axioms,
    weight_filtration_center_shift,
    signature_congruence,
    modular_law,
    tau_involution,
    pairing_symmetry,
    pairing_z_linearity,
    pairing_additivity,
    connection_leibniz,
    pairing_flatness,
    pairing_reality,
    gauss_round_trip,
    random_lattices_valid,
    twistor_report_invariants,
    spectrum_symmetry,
    spectral_pairs_refine,
    global_sections_tau_stable,
    pure_sections_basis,
    classify_generator_independence,
    lagrangian_round_trip,
    corpus_round_trip,
    exact_approx_agreement,
    reparam_invariance,
);

#[test]
fn every_property_is_listed() {
    assert_eq!(props::ALL.len(), 23);
}

#[test]
fn corpus_topological_data_is_valid() {
    for t in corpus_tops() {
        assert!(t.validate().ok(), "{}", t.validate());
    }
}
