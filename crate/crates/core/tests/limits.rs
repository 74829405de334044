use std::sync::Arc;

use terp_core::classifying::{build_w_omega, point_of_lattice, spectral_numbers};
use terp_core::corpus::*;
use terp_core::limits::{grassmann_limit, limit_reparam_invariance, limit_terp, reparameterize, Direction};
use terp_core::model::q;
use terp_core::twistor::classify;
use terp_core::*;

fn g(n: i64) -> GaussQ {
    GaussQ::int(n)
}

fn unwrap_lattice(o: LimitOutcome) -> Lattice<GaussQ> {
    match o {
        LimitOutcome::Lattice(l) => l,
        LimitOutcome::Degenerate { diagnosis, .. } => panic!("degenerate: {diagnosis}"),
    }
}

#[test]
fn two_dim_stratum_curve_limits() {
    let a = s91_alpha();
    let top = s91_top();
    for w in [0, 1] {
        let f = s91_curve(g(w));
        let lp = grassmann_limit(&f).unwrap();
        assert_eq!(lp.membership, Membership::LambdaAB);
        let l = unwrap_lattice(limit_terp(&f).unwrap());
        // s_2 + w z^-1 s_3, z^-1 s_4, z s_1, s_3
        let expected = lattice(
            &top,
            a[0],
            &[
                &[(1, a[1], g(1)), (2, a[2] - 1, g(w))],
                &[(3, a[3] - 1, g(1))],
                &[(0, a[0] + 1, g(1))],
                &[(2, a[2], g(1))],
            ],
        );
        assert!(l.same_lattice(&expected), "w = {w}: {:?}", l.generators);
        let mut sp = vec![a[1], a[3] - 1, a[0] + 1, a[2]];
        sp.sort();
        assert_eq!(spectral_numbers(&l), sp);
    }
}

#[test]
fn weighted_projective_curve_limits() {
    let top = s92_top();
    for u in [g(0), g(1), GaussQ::cplx((1, 2), (-1, 1))] {
        let l = unwrap_lattice(limit_terp(&s92_curve(u.clone())).unwrap());
        // z^-2 s_3 + 4u z s_1, s_2, z^2 s_1
        let expected = lattice(
            &top,
            q(-5, 4),
            &[&[(2, q(-3, 4), g(1)), (0, q(-1, 4), g(4) * u.clone())], &[(1, q(0, 1), g(1))], &[(0, q(3, 4), g(1))]],
        );
        assert!(l.same_lattice(&expected), "u = {u}");
        assert_eq!(spectral_numbers(&l), vec![q(-3, 4), q(0, 1), q(3, 4)]);
    }
}

#[test]
fn reducible_chain_limit_is_next_lattice() {
    for n in 1..=3 {
        let f = s93_family(n).restrict("r", &[], Direction::Infinity).unwrap();
        let l = unwrap_lattice(limit_terp(&f).unwrap());
        assert!(l.same_lattice(&s93_g(n, -n + 1)), "n = {n}");
    }
}

#[test]
fn pulled_back_line_is_degenerate() {
    for (a, b) in [(1, 1), (2, 3), (1, -1)] {
        match limit_terp(&ex35_line(a, b)).unwrap() {
            LimitOutcome::Degenerate { diagnosis, .. } => {
                assert!(diagnosis.contains("pairing rank 0 mod z"), "{diagnosis}")
            }
            LimitOutcome::Lattice(l) => panic!("expected degenerate, got {:?}", l.generators),
        }
    }
}

#[test]
fn holomorphic_family_limit_is_its_value() {
    let f = ex28a().restrict("r", &[], Direction::Zero).unwrap();
    let l = unwrap_lattice(limit_terp(&f).unwrap());
    assert!(l.same_lattice(&ex28a().eval(&[g(0)]).unwrap()));
}

#[test]
fn jordan_block_limit_at_infinity() {
    let f = s94_family().restrict("r", &[], Direction::Infinity).unwrap();
    let l = unwrap_lattice(limit_terp(&f).unwrap());
    assert!(l.same_lattice(&s94_infinity()));
    assert!(!classify(&l).unwrap().is_pure());
}

#[test]
fn limits_lie_in_the_window_and_are_isotropic() {
    let fams = vec![
        s91_curve(g(0)),
        s91_curve(g(1)),
        s92_curve(g(2)),
        s93_family(2).restrict("r", &[], Direction::Infinity).unwrap(),
        hirzebruch_fibre().restrict("r", &[], Direction::Infinity).unwrap(),
        s91_sp1().restrict("w", &[], Direction::Infinity).unwrap(),
    ];
    for f in &fams {
        let lp = grassmann_limit(f).unwrap();
        assert!(lp.point.model.is_isotropic(&lp.point.subspace));
        assert!(lp.membership >= Membership::LambdaB);
        let l = unwrap_lattice(limit_terp(f).unwrap());
        for a in spectral_numbers(&l) {
            assert!(a >= f.window.alpha1 && a <= f.window.alpha_mu);
        }
    }
    // the one-dimensional stratum degenerates to the zero-dimensional one
    let l = unwrap_lattice(limit_terp(&fams[5]).unwrap());
    assert!(l.same_lattice(&s91_sp0()));
    // and the Hirzebruch fibre to z^{1/2}A_1, z^{3/2}A_2
    let l = unwrap_lattice(limit_terp(&fams[4]).unwrap());
    let top = hirzebruch_top();
    assert!(l.same_lattice(&lattice(&top, q(-1, 2), &[&[(0, q(1, 2), g(1))], &[(1, q(3, 2), g(1))]])));
}

#[test]
fn limit_commutes_with_specialization() {
    // freeze y = 1 before taking x to infinity, versus the limit of the restricted curve
    let fam = s91_sp2();
    let f1 = fam.restrict("x", &[("y", g(1))], Direction::Infinity).unwrap();
    let f2 = fam
        .substitute("y", &MPoly::constant(2, g(1)))
        .unwrap()
        .restrict("x", &[], Direction::Infinity)
        .unwrap();
    assert!(grassmann_limit(&f1).unwrap().point == grassmann_limit(&f2).unwrap().point);
}

#[test]
fn reparameterization_invariance() {
    let one_plus = Laurent::from_terms([(0, g(1)), (1, g(1))]);
    let cases = vec![
        (s91_curve(g(1)), Laurent::constant(g(1))),
        (s91_curve(g(1)), one_plus.clone()),
        (s91_curve(g(0)), Laurent::from_terms([(0, g(3)), (2, GaussQ::i())])),
        (s93_family(2).restrict("r", &[], Direction::Infinity).unwrap(), Laurent::constant(g(2))),
        (s92_curve(g(1)), one_plus.clone()),
        (ex28a().restrict("r", &[], Direction::Zero).unwrap(), one_plus),
    ];
    for (f, u) in &cases {
        assert!(limit_reparam_invariance(f, u).unwrap(), "u = {u}");
    }
    // a unit must not vanish at the limit point
    let f = s91_curve(g(1));
    assert!(matches!(reparameterize(&f, &Laurent::monomial(g(1), 1)), Err(TerpError::UnitVanishes(_))));
}

#[test]
fn round_trip_on_corpus_points() {
    let cases: Vec<Lattice<GaussQ>> = vec![
        s91_universal().eval(&[g(1), g(-2), GaussQ::i()]).unwrap(),
        s91_sp2().eval(&[g(2), g(1)]).unwrap(),
        s91_sp1().eval(&[g(5)]).unwrap(),
        s91_sp0(),
        s92_family().eval(&[g(1), g(3)]).unwrap(),
        s93_g(2, 1),
        s94_family().eval(&[g(1)]).unwrap(),
        ex28a().eval(&[g(2)]).unwrap(),
    ];
    for l in cases {
        let model = Arc::new(build_w_omega::<GaussQ>(l.top.clone(), l.window).unwrap());
        let p = point_of_lattice(&model, &l).unwrap();
        assert_eq!(model.membership(&p.subspace).unwrap(), Membership::LambdaAB);
        let back = terp_core::classifying::lattice_of_point(&p).unwrap();
        assert!(back.same_lattice(&l));
        assert!(point_of_lattice(&model, &back).unwrap() == p);
        assert_eq!(back.generators, l.canonicalize().unwrap().generators);
    }
}
