//! Randomized properties, shared by the property tests and the acceptance run.
#![allow(dead_code)]

use std::fmt::Debug;
use std::result::Result;
use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseResult, TestRng, TestRunner};
use terp_core::classifying::{
    build_w_omega, hodge_spectrum, lattice_of_point, point_of_lattice, spectral_numbers, spectral_pairs,
};
use terp_core::corpus::*;
use terp_core::limits::{limit_reparam_invariance, Direction, ParamFamily, ScanFamily};
use terp_core::model::SlotSpace;
use terp_core::twistor::{classify, global_sections, Classification};
use terp_core::*;

use crate::common::*;

pub const CASES: u32 = 256;

/// Run `f` on `CASES` inputs from a fixed seed; the error names the shrunk counterexample.
fn check<S: Strategy>(s: S, f: impl Fn(S::Value) -> TestCaseResult) -> Result<(), String>
where
    S::Value: Debug,
{
    let config = Config { cases: CASES, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config.clone(), TestRng::deterministic_rng(config.rng_algorithm));
    runner.run(&s, f).map_err(|e| {
        let msg = e.to_string();
        // lattices print their whole topological data; keep the message readable
        msg.chars().take(2000).collect()
    })
}

pub type Property = (&'static str, fn() -> Result<(), String>);

pub const ALL: &[Property] = &[
    ("weight filtration axioms", weight_filtration_axioms),
    ("weight filtration center shift", weight_filtration_center_shift),
    ("signature congruence invariance", signature_congruence),
    ("subspace modular law", modular_law),
    ("tau involution", tau_involution),
    ("pairing symmetry", pairing_symmetry),
    ("pairing z-linearity", pairing_z_linearity),
    ("pairing additivity", pairing_additivity),
    ("connection Leibniz rule", connection_leibniz),
    ("pairing flatness", pairing_flatness),
    ("pairing reality", pairing_reality),
    ("number syntax round trip", gauss_round_trip),
    ("random lattices valid", random_lattices_valid),
    ("twistor report invariants", twistor_report_invariants),
    ("spectrum symmetry", spectrum_symmetry),
    ("spectral pairs refine spectrum", spectral_pairs_refine),
    ("global sections tau-stable", global_sections_tau_stable),
    ("pure sections basis mod z", pure_sections_basis),
    ("classify generator independence", classify_generator_independence),
    ("Lagrangian round trip", lagrangian_round_trip),
    ("corpus round trip", corpus_round_trip),
    ("exact/approx agreement", exact_approx_agreement),
    ("limit reparameterization invariance", reparam_invariance),
];

// ---- linear algebra

pub fn weight_filtration_axioms() -> Result<(), String> {
    check(nilpotent(), |n| {
        let d = n.rows as i64;
        let w = weight_filtration(&n, 0).unwrap();
        prop_assert_eq!(w.get(-d - 1).dim(), 0);
        prop_assert_eq!(w.get(d).dim(), n.rows);
        for l in -d..=d {
            let wl = w.get(l);
            prop_assert!(wl.contains_all(&w.get(l - 1)), "not increasing at {}", l);
            prop_assert!(w.get(l - 2).contains_all(&wl.image(&n).unwrap()), "N W_{} not in W_{}", l, l - 2);
        }
        for l in 1..=d {
            // N^l : Gr_l → Gr_{-l} is an isomorphism
            prop_assert_eq!(w.gr_dim(l), w.gr_dim(-l));
            let img = w.get(l).image(&n.pow(l as usize)).unwrap().sum(&w.get(-l - 1)).unwrap();
            prop_assert!(img == w.get(-l), "N^{} not onto Gr_-{}", l, l);
        }
        Ok(())
    })
}

pub fn weight_filtration_center_shift() -> Result<(), String> {
    check((nilpotent(), -3i64..=3), |(n, c)| {
        let w0 = weight_filtration(&n, 0).unwrap();
        let wc = weight_filtration(&n, c).unwrap();
        for l in -9..=9 {
            prop_assert!(w0.get(l) == wc.get(l + c));
        }
        Ok(())
    })
}

pub fn signature_congruence() -> Result<(), String> {
    check((1usize..=6).prop_flat_map(|n| (square(n, gauss()), invertible(n))), |(a, c)| {
        let h = a.add(&a.adjoint());
        let s1 = hermitian_signature(&h).unwrap();
        let s2 = hermitian_signature(&c.adjoint().mul(&h).mul(&c)).unwrap();
        prop_assert_eq!(s1, s2);
        prop_assert_eq!(s1.p + s1.q + s1.corank, h.rows);
        prop_assert_eq!(s1.p + s1.q, h.rank());
        Ok(())
    })
}

pub fn modular_law() -> Result<(), String> {
    let s = (1usize..=8).prop_flat_map(|n| {
        let vs = move || proptest::collection::vec(proptest::collection::vec(gauss(), n), 0..=n);
        (vs(), vs(), vs())
            .prop_map(move |(a, b, c)| (Subspace::span(n, a), Subspace::span(n, b), Subspace::span(n, c)))
    });
    check(s, |(a, b, c)| {
        // with A ⊂ C: A + (B ∩ C) = (A + B) ∩ C
        let a = a.intersect(&c).unwrap();
        let lhs = a.sum(&b.intersect(&c).unwrap()).unwrap();
        let rhs = a.sum(&b).unwrap().intersect(&c).unwrap();
        prop_assert!(lhs == rhs);
        let ab = a.sum(&b).unwrap();
        prop_assert_eq!(ab.dim() + a.intersect(&b).unwrap().dim(), a.dim() + b.dim());
        Ok(())
    })
}

// ---- topological data

pub fn tau_involution() -> Result<(), String> {
    check(top_and_sections(1), |(top, s)| {
        prop_assert_eq!(top.tau(&top.tau(&s[0])), s[0].clone());
        Ok(())
    })
}

pub fn pairing_symmetry() -> Result<(), String> {
    check(top_and_sections(2), |(top, s)| {
        let (a, b) = (&s[0], &s[1]);
        let sign = if top.w % 2 == 0 { g(1) } else { g(-1) };
        prop_assert_eq!(top.pair(a, b), top.pair(b, a).negate_var().scale(&sign));
        Ok(())
    })
}

pub fn pairing_z_linearity() -> Result<(), String> {
    check((top_and_sections(2), gauss()), |((top, s), c)| {
        let (a, b) = (&s[0], &s[1]);
        let p = top.pair(a, b);
        // the second argument lives at −z
        prop_assert_eq!(top.pair(&a.mul_z(), b), p.shift(1));
        prop_assert_eq!(top.pair(a, &b.mul_z()), p.shift(1).scale(&g(-1)));
        prop_assert_eq!(top.pair(&a.scale(&c), b), p.scale(&c));
        prop_assert_eq!(top.pair(a, &b.scale(&c)), p.scale(&c));
        Ok(())
    })
}

pub fn pairing_additivity() -> Result<(), String> {
    check(top_and_sections(3), |(top, s)| {
        let (a, b, c) = (&s[0], &s[1], &s[2]);
        prop_assert_eq!(top.pair(&a.add(b), c), top.pair(a, c).add(&top.pair(b, c)));
        prop_assert_eq!(top.pair(a, &b.add(c)), top.pair(a, b).add(&top.pair(a, c)));
        Ok(())
    })
}

pub fn connection_leibniz() -> Result<(), String> {
    check(top_and_sections(1), |(top, s)| {
        let s = &s[0];
        prop_assert_eq!(top.z2_nabla(&s.mul_z()), top.z2_nabla(s).mul_z().add(&s.mul_z().mul_z()));
        Ok(())
    })
}

pub fn pairing_flatness() -> Result<(), String> {
    check(top_and_sections(2), |(top, s)| {
        let (a, b) = (&s[0], &s[1]);
        let lhs = top.pair(a, b).derivative().shift(2);
        let rhs = top.pair(&top.z2_nabla(a), b).sub(&top.pair(a, &top.z2_nabla(b)));
        prop_assert_eq!(lhs, rhs);
        Ok(())
    })
}

pub fn pairing_reality() -> Result<(), String> {
    check(top_and_sections(2), |(top, s)| {
        let (a, b) = (&s[0], &s[1]);
        let p = top.pair(a, b);
        let expect = Laurent::from_terms(p.terms().map(|(e, c)| (2 * top.w - e, c.conj())));
        prop_assert_eq!(top.pair(&top.tau(a), &top.tau(b)), expect);
        Ok(())
    })
}

pub fn gauss_round_trip() -> Result<(), String> {
    check(gauss(), |x| {
        prop_assert_eq!(x.to_string().parse::<GaussQ>().unwrap(), x);
        Ok(())
    })
}

// ---- lattices

fn scan_families() -> Vec<ScanFamily> {
    vec![
        ex28a(),
        ex28b(),
        s91_universal(),
        s91_sp2(),
        s91_sp1(),
        s92_family(),
        hirzebruch_chart0(),
        hirzebruch_chart_inf(),
        hirzebruch_fibre(),
        s93_family(1),
        s93_family(2),
        s94_family(),
    ]
}

/// Small parameter values, mostly integers.
fn param() -> impl Strategy<Value = GaussQ> + Clone {
    prop_oneof![3 => (-3i64..=3).prop_map(GaussQ::int), 1 => gauss()]
}

fn corpus_lattice() -> impl Strategy<Value = Lattice<GaussQ>> {
    let fams = scan_families();
    (0..fams.len(), proptest::collection::vec(param(), 3))
        .prop_map(move |(i, v)| fams[i].eval(&v[..fams[i].params.len()]).unwrap())
}

/// A lattice from the corpus families or from a random n = 1 Lagrangian.
fn any_lattice() -> impl Strategy<Value = Lattice<GaussQ>> {
    prop_oneof![corpus_lattice(), random_point().prop_map(|p| lattice_of_point(&p).unwrap())]
}

fn symmetric(k: &[i64]) -> bool {
    (0..k.len()).all(|i| k[i] == -k[k.len() - 1 - i])
}

pub fn random_lattices_valid() -> Result<(), String> {
    check(any_lattice(), |l| {
        let r = l.validate();
        prop_assert!(r.ok(), "{}", r);
        Ok(())
    })
}

pub fn twistor_report_invariants() -> Result<(), String> {
    check(any_lattice(), |l| {
        let r = classify(&l).unwrap();
        let k = &r.splitting;
        prop_assert_eq!(k.len(), l.mu());
        prop_assert!(k.windows(2).all(|p| p[0] <= p[1]));
        prop_assert_eq!(k.iter().sum::<i64>(), 0);
        prop_assert!(symmetric(k), "{:?}", k);
        let h0 = k.iter().filter(|&&x| x >= 0).count() as i64 + k.iter().filter(|&&x| x > 0).sum::<i64>();
        prop_assert_eq!(r.h0_basis.len() as i64, h0);
        let corank: i64 = k.iter().filter(|&&x| x > 0).map(|x| x + 1).sum();
        prop_assert_eq!(r.signature.corank as i64, corank, "splitting {:?}", k);
        // splitting and h rank decide purity independently
        let trivial = k.iter().all(|&x| x == 0);
        let nondegenerate = r.h0_basis.len() == l.mu() && r.signature.corank == 0;
        prop_assert_eq!(trivial, nondegenerate);
        prop_assert_eq!(r.is_pure(), trivial);
        if let Classification::Pure { p, q } = r.classification {
            prop_assert_eq!((p, q), (r.signature.p, r.signature.q));
        }
        if r.polarized {
            prop_assert!(r.is_pure() && r.signature.q == 0);
        }
        prop_assert_eq!(r.h_matrix.clone(), r.h_matrix.adjoint());
        Ok(())
    })
}

pub fn spectrum_symmetry() -> Result<(), String> {
    check(any_lattice(), |l| {
        let a = spectral_numbers(&l);
        let mu = l.mu();
        prop_assert_eq!(a.len(), mu);
        let w = Order::from_integer(l.top.w);
        for i in 0..mu {
            prop_assert_eq!(a[i] + a[mu - 1 - i], w);
            prop_assert!(a[i] >= l.window.alpha1 && a[i] <= l.window.alpha_mu);
        }
        Ok(())
    })
}

pub fn spectral_pairs_refine() -> Result<(), String> {
    check(any_lattice(), |l| {
        let sp = spectral_pairs(&l).unwrap();
        prop_assert_eq!(sp.numbers_list(), spectral_numbers(&l));
        for (a, d) in &sp.numbers {
            let m: usize = sp.pairs.iter().filter(|((b, _), _)| b == a).map(|(_, c)| *c).sum();
            prop_assert_eq!(m, *d);
        }
        prop_assert_eq!(hodge_spectrum(&l), spectral_numbers(&l));
        Ok(())
    })
}

pub fn global_sections_tau_stable() -> Result<(), String> {
    check(any_lattice(), |l| {
        let h0 = global_sections(&l);
        let space = SlotSpace::new(&l.top, l.window.alpha1, l.window.alpha_mu);
        let span = Subspace::span(space.dim(), h0.iter().map(|s| space.vector(s)).collect());
        prop_assert_eq!(span.dim(), h0.len());
        let img = l.window_image();
        for s in &h0 {
            prop_assert!(l.contains_in(&img, s));
            prop_assert!(span.contains(&space.vector(&l.top.tau(s))));
        }
        Ok(())
    })
}

pub fn pure_sections_basis() -> Result<(), String> {
    check(any_lattice(), |l| {
        let r = classify(&l).unwrap();
        if r.is_pure() {
            let img = l.window_image();
            let span = Subspace::span(img.space.dim(), r.h0_basis.iter().map(|s| img.space.vector(s)).collect());
            prop_assert_eq!(span.dim(), l.mu());
            prop_assert_eq!(span.intersect(&img.bg).unwrap().dim(), 0);
        }
        Ok(())
    })
}

pub fn classify_generator_independence() -> Result<(), String> {
    check((any_lattice(), proptest::collection::vec(nonzero_gauss(), 8)), |(l, c)| {
        let r = classify(&l).unwrap();
        let scaled = Lattice::new(
            l.top.clone(),
            l.window,
            l.generators.iter().zip(c.iter().cycle()).map(|(g, c)| g.scale(c)).collect(),
        );
        for other in [scaled, l.canonicalize().unwrap()] {
            let r2 = classify(&other).unwrap();
            prop_assert_eq!(&r.splitting, &r2.splitting);
            prop_assert_eq!(r.signature, r2.signature);
            prop_assert_eq!(r.classification, r2.classification);
            prop_assert_eq!(r.polarized, r2.polarized);
        }
        Ok(())
    })
}

pub fn lagrangian_round_trip() -> Result<(), String> {
    check(random_point(), |p| {
        prop_assert!(p.model.is_isotropic(&p.subspace));
        prop_assert_eq!(p.model.membership(&p.subspace).unwrap(), Membership::LambdaAB);
        let l = lattice_of_point(&p).unwrap();
        prop_assert!(l.validate().ok());
        prop_assert!(point_of_lattice(&p.model, &l).unwrap() == p);
        Ok(())
    })
}

pub fn corpus_round_trip() -> Result<(), String> {
    check(corpus_lattice(), |l| {
        let model = Arc::new(build_w_omega::<GaussQ>(l.top.clone(), l.window).unwrap());
        let p = point_of_lattice(&model, &l).unwrap();
        prop_assert_eq!(model.membership(&p.subspace).unwrap(), Membership::LambdaAB);
        let back = lattice_of_point(&p).unwrap();
        prop_assert!(back.same_lattice(&l));
        prop_assert!(point_of_lattice(&model, &back).unwrap() == p);
        Ok(())
    })
}

pub fn exact_approx_agreement() -> Result<(), String> {
    check(corpus_lattice(), |l| {
        let e = classify(&l).unwrap();
        let a = classify(&l.map_scalar(|x| Approx(x.to_c64()))).unwrap();
        if !a.marginal {
            prop_assert_eq!(&e.splitting, &a.splitting);
            prop_assert_eq!(e.signature, a.signature);
            prop_assert_eq!(e.polarized, a.polarized);
        }
        Ok(())
    })
}

fn limit_families() -> Vec<ParamFamily> {
    vec![
        s91_curve(GaussQ::int(0)),
        s91_curve(GaussQ::int(1)),
        s92_curve(GaussQ::int(1)),
        s93_family(1).restrict("r", &[], Direction::Infinity).unwrap(),
        s93_family(2).restrict("r", &[], Direction::Infinity).unwrap(),
        ex28a().restrict("r", &[], Direction::Zero).unwrap(),
        s94_family().restrict("r", &[], Direction::Infinity).unwrap(),
        hirzebruch_fibre().restrict("r", &[], Direction::Infinity).unwrap(),
        s91_sp1().restrict("w", &[], Direction::Infinity).unwrap(),
    ]
}

pub fn reparam_invariance() -> Result<(), String> {
    let fams = limit_families();
    check((0..fams.len(), nonzero_gauss(), gauss(), gauss()), |(i, u0, u1, u2)| {
        let u = Laurent::from_terms([(0, u0), (1, u1), (2, u2)]);
        prop_assert!(limit_reparam_invariance(&fams[i], &u).unwrap());
        Ok(())
    })
}
