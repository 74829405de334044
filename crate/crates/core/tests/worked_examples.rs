use terp_core::classifying::{
    ansatz_family, hodge_filtration, pmhs_check, spectral_numbers, spectral_pairs, Block,
};
use terp_core::corpus::*;
use terp_core::limits::variation_check;
use terp_core::model::{q, SlotSpace};
use terp_core::poly::parse_expr;
use terp_core::twistor::{classify, global_sections, h_form, h_matrix, pmts_check, splitting_type};
use terp_core::*;

fn g(n: i64) -> GaussQ {
    GaussQ::int(n)
}

fn sorted(mut v: Vec<Order>) -> Vec<Order> {
    v.sort();
    v
}

/// Span of sections inside the slot space of the window.
fn span(l: &Lattice<GaussQ>, secs: &[Section<GaussQ>]) -> Subspace<GaussQ> {
    let y = SlotSpace::new(&l.top, l.window.alpha1, l.window.alpha_mu);
    Subspace::span(y.dim(), secs.iter().map(|s| y.vector(s)).collect())
}

fn scalar_mat(n: usize, c: GaussQ) -> Mat<GaussQ> {
    Mat::identity(n).scale(&c)
}

fn es(j: usize, o: Order, c: GaussQ) -> Section<GaussQ> {
    Section::es(j, o, c)
}

#[test]
fn rank_two_swap_h_is_eps_times_norm_minus_one() {
    for eps in [1i64, -1] {
        let fam = ex28(eps, true);
        for r in [g(0), g(2), GaussQ::frac(1, 2), GaussQ::cplx((1, 1), (1, 1))] {
            let l = fam.eval(&[r.clone()]).unwrap();
            assert!(l.validate().ok(), "{}", l.validate());
            let rep = classify(&l).unwrap();
            let expect = g(eps) * (GaussQ::real(r.norm_sqr()) - g(1));
            let v1 = l.generators[0].clone();
            let basis = vec![v1.clone(), l.top.tau(&v1)];
            assert!(span(&l, &basis) == span(&l, &global_sections(&l)), "r = {r}");
            assert_eq!(h_form(&l.top, &basis).unwrap(), scalar_mat(2, expect.clone()), "r = {r}");
            assert!(rep.is_pure());
            assert_eq!(rep.polarized, expect.to_c64().re > 0.0, "eps {eps} r = {r}");
        }
        for r in [g(1), g(-1), GaussQ::i()] {
            let l = fam.eval(&[r]).unwrap();
            assert_eq!(splitting_type(&l).unwrap(), vec![-1, 1]);
            assert!(!classify(&l).unwrap().is_pure());
        }
    }
}

#[test]
fn rank_two_real_basis() {
    let fam = ex28b();
    let l0 = fam.eval(&[g(0)]).unwrap();
    assert_eq!(splitting_type(&l0).unwrap(), vec![-2, 2]);
    assert!(!classify(&l0).unwrap().is_pure());
    let l1 = fam.eval(&[g(1)]).unwrap();
    let h = h_matrix(&l1).unwrap();
    assert_eq!(h, Mat::from_rows(vec![vec![g(0), g(1)], vec![g(1), g(0)]]));
    let rep = classify(&l1).unwrap();
    assert_eq!((rep.signature.p, rep.signature.q), (1, 1));
}

#[test]
fn rank_two_spectrum() {
    let l = ex28a().eval(&[g(2)]).unwrap();
    assert_eq!(spectral_numbers(&l), vec![q(-1, 1), q(1, 1)]);
}

#[test]
fn lagrangian_grassmannian_strata_spectra() {
    let a = s91_alpha();
    let one = q(1, 1);
    let expected = [
        vec![a[0], a[1], a[2], a[3]],
        vec![a[0], a[2] - one, a[1] + one, a[3]],
        vec![a[1], a[3] - one, a[0] + one, a[2]],
        vec![a[2] - one, a[3] - one, a[0] + one, a[1] + one],
    ];
    let reps = [
        s91_universal().eval(&[g(0), g(0), g(0)]).unwrap(),
        s91_sp2().eval(&[g(0), g(0)]).unwrap(),
        s91_sp1().eval(&[g(0)]).unwrap(),
        s91_sp0(),
    ];
    for (l, e) in reps.iter().zip(expected) {
        assert!(l.validate().ok(), "{}", l.validate());
        assert_eq!(spectral_numbers(l), sorted(e));
    }
    // the generic point at the origin is polarized, the zero-dimensional stratum negative definite
    assert!(classify(&reps[0]).unwrap().polarized);
    let r0 = classify(&reps[3]).unwrap();
    assert_eq!((r0.signature.p, r0.signature.q), (0, 4));
}

#[test]
fn lagrangian_grassmannian_two_dim_stratum_signatures() {
    let fam = s91_sp2();
    let l = fam.eval(&[g(0), g(0)]).unwrap();
    let v1 = l.generators[0].clone();
    let v2 = l.generators[1].clone();
    let basis = vec![v1.clone(), v2.clone(), l.top.tau(&v1), l.top.tau(&v2)];
    assert!(span(&l, &basis) == span(&l, &global_sections(&l)));
    let h = h_form(&l.top, &basis).unwrap();
    for i in 0..4 {
        let d = h.get(i, i).to_c64().re;
        assert!(if i % 2 == 0 { d > 0.0 } else { d < 0.0 }, "entry {i} of {h:?}");
    }
    let rep = classify(&l).unwrap();
    assert_eq!((rep.signature.p, rep.signature.q), (2, 2));
    let rep = classify(&fam.eval(&[g(0), g(2)]).unwrap()).unwrap();
    assert_eq!((rep.signature.p, rep.signature.q, rep.signature.corank), (0, 4, 0));
    // |y| = |x|^2 + 1 is the wall
    assert!(!classify(&fam.eval(&[g(1), g(2)]).unwrap()).unwrap().is_pure());
}

#[test]
fn weighted_projective_rank_three() {
    let fam = s92_family();
    let l = fam.eval(&[g(0), g(0)]).unwrap();
    assert_eq!(spectral_numbers(&l), vec![q(-5, 4), q(0, 1), q(5, 4)]);
    let r = classify(&fam.eval(&[g(1), g(0)]).unwrap()).unwrap();
    assert_eq!((r.signature.p, r.signature.q), (3, 0));
    let r = classify(&fam.eval(&[g(0), g(2)]).unwrap()).unwrap();
    assert_eq!((r.signature.p, r.signature.q), (1, 2));
    // F^1 = <A_1>, F^0 = F^-1 = <A_1, A_2>, F^-2 = H
    let f = hodge_filtration(&l);
    let e = |k: usize| (0..3).map(|i| if i == k { g(1) } else { g(0) }).collect::<Vec<_>>();
    assert_eq!(f.total(2).dim(), 0);
    assert!(f.total(1) == Subspace::span(3, vec![e(0)]));
    assert!(f.total(0) == Subspace::span(3, vec![e(0), e(1)]));
    assert!(f.total(-1) == Subspace::span(3, vec![e(0), e(1)]));
    assert_eq!(f.total(-2).dim(), 3);
    let t = s92_top();
    for block in [Block::One, Block::NotOne] {
        let rep = pmhs_check(&f, t.s_form.as_ref().unwrap(), &t.conjugation, &t.nilpotent, 0, block).unwrap();
        assert!(rep.ok(), "{}", rep.report);
    }
}

#[test]
fn weighted_projective_ansatz_constraints() {
    let reference = s92_family().eval(&[g(0), g(0)]).unwrap();
    let chart = ansatz_family(&reference, &spectral_pairs(&reference).unwrap()).unwrap();
    let names = chart.var_names();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    // r = c1_2_1, r_2 = c1_3_2, r_4 = c2_3_1
    let cons = chart.constraints();
    for want in ["c1_2_1 - c2_3_1", "2*c1_3_2 - c1_2_1^2"] {
        let p = terp_core::classifying::normalize(&parse_expr(want, &refs).unwrap());
        assert!(cons.contains(&p), "{want} missing");
    }
    // all constraints vanish on the universal family r_4 = r, r_2 = r^2/2
    let r = parse_expr("c1_2_1", &refs).unwrap();
    let r2 = parse_expr("c1_2_1^2/2", &refs).unwrap();
    for c in cons {
        let c = c.substitute(refs.iter().position(|n| *n == "c2_3_1").unwrap(), &r).unwrap();
        let c = c.substitute(refs.iter().position(|n| *n == "c1_3_2").unwrap(), &r2).unwrap();
        assert!(c.is_zero(), "{}", c.display(&names));
    }

    let reference = ex28a().eval(&[g(0)]).unwrap();
    let chart = ansatz_family(&reference, &spectral_pairs(&reference).unwrap()).unwrap();
    let names = chart.var_names();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    assert_eq!(chart.constraints(), vec![parse_expr("c1_2_2", &refs).unwrap()]);
}

#[test]
fn hirzebruch_fibre_purity() {
    let fam = hirzebruch_fibre();
    let l = fam.eval(&[g(0)]).unwrap();
    assert_eq!(spectral_numbers(&l), vec![q(-1, 2), q(5, 2)]);
    assert!(classify(&l).unwrap().is_pure());
    assert!(!classify(&fam.eval(&[g(1)]).unwrap()).unwrap().is_pure());
}

#[test]
fn hirzebruch_gluing() {
    let c0 = hirzebruch_chart0();
    let ci = hirzebruch_chart_inf();
    for x in [g(1), g(2)] {
        let y = x.inv();
        for r0 in [g(0), g(1)] {
            let a = c0.eval(&[r0.clone(), y.clone()]).unwrap();
            let rinf = -(r0.clone() * x.clone() * x.clone());
            assert!(a.same_lattice(&ci.eval(&[rinf.clone(), x.clone()]).unwrap()), "x {x} r0 {r0}");
            for wrong in [rinf.clone() + g(1), rinf.clone() - g(1), -rinf.clone() + g(3)] {
                if wrong != rinf {
                    assert!(!a.same_lattice(&ci.eval(&[wrong, x.clone()]).unwrap()));
                }
            }
        }
    }
}

#[test]
fn reducible_chain() {
    assert!(classify(&s93_g(2, 0)).unwrap().polarized);
    let r = classify(&s93_g(1, 0)).unwrap();
    assert!(r.is_pure() && !r.polarized);
    for k in -2..=2 {
        let r = classify(&s93_g(2, k)).unwrap();
        assert!(r.is_pure());
        if k % 2 == 0 {
            assert!(r.polarized, "G_{k}");
        } else {
            assert_eq!((r.signature.p, r.signature.q), (0, 2), "G_{k}");
        }
    }
}

#[test]
fn jordan_block() {
    let fam = s94_family();
    let at = |r: GaussQ| classify(&fam.eval(&[r]).unwrap()).unwrap();
    let r1 = at(g(1));
    assert!(r1.polarized);
    let rm = at(g(-1));
    assert!(rm.is_pure());
    assert_eq!((rm.signature.p, rm.signature.q), (0, 2));
    assert!(!at(GaussQ::i()).is_pure());
    let l = fam.eval(&[g(1)]).unwrap();
    let spp = spectral_pairs(&l).unwrap();
    assert_eq!(spp.pairs_list(), vec![(q(-1, 2), 0), (q(1, 2), -2)]);
    let inf = s94_infinity();
    assert_eq!(spectral_pairs(&inf).unwrap().pairs_list(), vec![(q(-1, 2), -2), (q(1, 2), 0)]);
    assert!(!classify(&inf).unwrap().is_pure());
}

#[test]
fn jordan_block_mixed_hodge() {
    let t = s94_top();
    let s = t.s_form.as_ref().unwrap();
    for r in [g(0), g(1), g(-3), GaussQ::i(), GaussQ::cplx((2, 3), (-5, 7))] {
        let f = hodge_filtration(&s94_family().eval(&[r.clone()]).unwrap());
        let rep = pmhs_check(&f, s, &t.conjugation, &t.nilpotent, 0, Block::NotOne).unwrap();
        assert!(rep.ok(), "r = {r}\n{}", rep.report);
    }
    let f = hodge_filtration(&s94_infinity());
    let rep = pmhs_check(&f, s, &t.conjugation, &t.nilpotent, 0, Block::NotOne).unwrap();
    assert!(!rep.report.get("strictness").unwrap().passed);
}

#[test]
fn jordan_block_mixed_twistor() {
    let l = s94_family().eval(&[g(1)]).unwrap();
    let rep = pmts_check(&l, &s94_n()).unwrap();
    assert!(rep.ok(), "{}", rep.checks);
    // with N = 0 the check reduces to polarizedness
    for r in [g(1), g(-1), GaussQ::i(), g(2)] {
        let l = s94_family().eval(&[r]).unwrap();
        let rep = pmts_check(&l, &Mat::zeros(2, 2)).unwrap();
        assert_eq!(rep.ok(), classify(&l).unwrap().polarized);
    }
    // a non-isometry is rejected
    let mut bad = Mat::zeros(2, 2);
    bad.set(0, 1, g(1));
    assert!(pmts_check(&l, &bad).is_err() || !pmts_check(&l, &bad).unwrap().ok());
}

#[test]
fn variation_is_horizontal_on_families() {
    let samples = [g(0), g(1), g(2), GaussQ::i()];
    let f = ex28a().restrict("r", &[], limits::Direction::Zero).unwrap();
    assert!(variation_check(&f, &samples).ok());
    let f = s91_universal().restrict("r", &[("p", g(1)), ("q", g(0))], limits::Direction::Zero).unwrap();
    assert!(variation_check(&f, &samples).ok());
    let f = s92_family().restrict("t", &[("r", g(1))], limits::Direction::Zero).unwrap();
    assert!(variation_check(&f, &samples).ok());
    // s_1 + r z^-2 s_3 violates Griffiths transversality
    let top = s92_top();
    let bad = poly_family(
        &top,
        q(-5, 4),
        &["r"],
        &[&[(0, q(-5, 4), "1"), (2, q(-3, 4), "r")], &[(1, q(0, 1), "1")], &[(2, q(5, 4), "1")]],
    )
    .restrict("r", &[], limits::Direction::Zero)
    .unwrap();
    assert!(!variation_check(&bad, &[g(1)]).ok());
}

#[test]
fn corpus_lattices_validate() {
    let mut all = vec![
        ex28a().eval(&[g(2)]).unwrap(),
        ex28b().eval(&[g(1)]).unwrap(),
        s91_universal().eval(&[g(1), g(2), g(3)]).unwrap(),
        s91_sp2().eval(&[g(1), g(1)]).unwrap(),
        s91_sp1().eval(&[g(3)]).unwrap(),
        s91_sp0(),
        s92_family().eval(&[g(1), g(1)]).unwrap(),
        hirzebruch_chart0().eval(&[g(1), g(2)]).unwrap(),
        hirzebruch_chart_inf().eval(&[g(1), g(2)]).unwrap(),
        s94_family().eval(&[g(1)]).unwrap(),
        s94_infinity(),
    ];
    for n in 1..=2 {
        all.push(s93_family(n).eval(&[g(1)]).unwrap());
        for k in -n..=n {
            all.push(s93_g(n, k));
        }
    }
    for l in &all {
        assert!(l.top.validate().ok(), "{}", l.top.validate());
        assert!(l.validate().ok(), "{:?}\n{}", l.generators, l.validate());
    }
    let bad = ex35_limit_lattice();
    let rep = bad.validate();
    assert!(!rep.ok());
    assert!(rep.failures().any(|c| c.name == "pairing-nondegenerate"));
}

#[test]
fn pairing_on_reference_sections() {
    // P(s_1, s_2) = -z and P(s_2, s_1) = z for the weight two model
    let t = hirzebruch_top();
    let s1 = es(0, q(1, 2), g(1));
    let s2 = es(1, q(1, 2), g(1));
    assert_eq!(t.pair(&s1, &s2), Laurent::monomial(g(-1), 1));
    assert_eq!(t.pair(&s2, &s1), Laurent::monomial(g(1), 1));
    // second argument is evaluated at -z
    assert_eq!(t.pair(&s1, &s2.mul_z()), Laurent::monomial(g(1), 2));
}
