//! Strategies and random models shared by the property suites.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use terp_core::classifying::{build_w_omega, GrassPoint, SymplecticModel};
use terp_core::corpus::*;
use terp_core::model::q;
use terp_core::*;

pub fn g(n: i64) -> GaussQ {
    GaussQ::int(n)
}

/// Small Gaussian rationals, zero included.
pub fn gauss() -> impl Strategy<Value = GaussQ> + Clone {
    (-3i64..=3, 1i64..=3, -3i64..=3, 1i64..=2).prop_map(|(a, b, c, d)| GaussQ::cplx((a, b), (c, d)))
}

pub fn nonzero_gauss() -> impl Strategy<Value = GaussQ> + Clone {
    gauss().prop_filter("nonzero", |x| !x.is_zero())
}

pub fn square(n: usize, entry: impl Strategy<Value = GaussQ> + Clone) -> impl Strategy<Value = Mat<GaussQ>> {
    proptest::collection::vec(proptest::collection::vec(entry, n), n).prop_map(Mat::from_rows)
}

/// Unit lower times unit upper triangular: invertible with a simple inverse.
pub fn invertible(n: usize) -> impl Strategy<Value = Mat<GaussQ>> {
    let e = (-1i64..=1).prop_map(GaussQ::int);
    (square(n, e.clone()), square(n, e)).prop_map(move |(a, b)| {
        let mut l = Mat::identity(n);
        let mut u = Mat::identity(n);
        for i in 0..n {
            for j in 0..n {
                if i > j {
                    l.set(i, j, a.get(i, j).clone());
                } else if i < j {
                    u.set(i, j, b.get(i, j).clone());
                }
            }
        }
        l.mul(&u)
    })
}

/// Random nilpotent matrix of size ≤ 8: a conjugated strictly lower triangular one.
pub fn nilpotent() -> impl Strategy<Value = Mat<GaussQ>> {
    (1usize..=8).prop_flat_map(|n| {
        let sparse = prop_oneof![3 => Just(g(0)), 2 => (-2i64..=2).prop_map(GaussQ::int), 1 => Just(GaussQ::i())];
        (square(n, sparse), invertible(n)).prop_map(move |(t, p)| {
            let mut s = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..i {
                    s.set(i, j, t.get(i, j).clone());
                }
            }
            p.mul(&s).mul(&p.inverse().unwrap())
        })
    })
}

/// Rank three model with spectrum in (−1, 1): α = (−2/3, 0, 2/3).
pub fn thirds_top() -> Arc<TopologicalData> {
    let exps = vec![q(-2, 3), q(0, 1), q(2, 3)];
    let mut k = Mat::zeros(3, 3);
    k.set(0, 2, g(1));
    k.set(2, 0, g(1));
    k.set(1, 1, g(1));
    let mut pairing = BTreeMap::new();
    pairing.insert((0, 2), (g(1), 0));
    pairing.insert((2, 0), (g(1), 0));
    pairing.insert((1, 1), (g(-1), 0));
    Arc::new(TopologicalData { mu: 3, w: 0, exponents: exps, nilpotent: Mat::zeros(3, 3), conjugation: k, pairing, s_form: None })
}

/// Every topological data set of the corpus plus the extra rank three model.
pub fn corpus_tops() -> Vec<Arc<TopologicalData>> {
    vec![
        ex22_top(1, true),
        ex22_top(-1, false),
        s91_top(),
        s92_top(),
        hirzebruch_top(),
        s93_top(1),
        s93_top(2),
        s94_top(),
        thirds_top(),
    ]
}

/// Windows with ⌊α_μ − α_1⌋ = 1, where every Lagrangian is a,b-invariant.
pub fn n1_models() -> Vec<Arc<SymplecticModel<GaussQ>>> {
    [(s91_top(), q(-7, 8)), (s94_top(), q(-1, 2)), (thirds_top(), q(-2, 3))]
        .into_iter()
        .map(|(t, a)| {
            let w = SpectralWindow::new(&t, a).unwrap();
            Arc::new(build_w_omega::<GaussQ>(t, w).unwrap())
        })
        .collect()
}

pub fn section(top: Arc<TopologicalData>) -> impl Strategy<Value = Section<GaussQ>> {
    let mu = top.mu;
    proptest::collection::vec((0..mu, -3i64..=3, gauss()), 0..5).prop_map(move |terms| {
        Section::from_terms(terms.into_iter().map(|(j, k, c)| (j, top.exponents[j] + k, c)))
    })
}

pub fn top_and_sections(n: usize) -> impl Strategy<Value = (Arc<TopologicalData>, Vec<Section<GaussQ>>)> {
    let tops = corpus_tops();
    (0..tops.len()).prop_flat_map(move |i| {
        let t = tops[i].clone();
        (Just(t.clone()), proptest::collection::vec(section(t), n))
    })
}

/// Build a Lagrangian subspace by adding vectors of the ω-orthogonal one at a time.
pub fn lagrangian(model: &SymplecticModel<GaussQ>, coeffs: &[GaussQ]) -> Subspace<GaussQ> {
    let d = model.dim();
    let mut s = Subspace::zero(d);
    let mut it = coeffs.iter().cycle();
    while s.dim() < model.m {
        let rows: Vec<Vec<GaussQ>> = s.basis().iter().map(|u| model.omega.transpose().mul_vec(u)).collect();
        let perp = if rows.is_empty() { Subspace::full(d) } else { Mat::from_rows_n(rows, d).kernel() };
        let mut tries = 0;
        loop {
            let c: Vec<GaussQ> = perp.basis().iter().map(|_| it.next().unwrap().clone()).collect();
            let v: Vec<GaussQ> = (0..d)
                .map(|i| perp.basis().iter().zip(&c).fold(g(0), |acc, (b, c)| acc + b[i].clone() * c.clone()))
                .collect();
            // fall back to a basis vector of the complement when the random combination is degenerate
            let v = if s.contains(&v) || tries > 3 {
                perp.basis().iter().find(|b| !s.contains(b)).cloned().unwrap()
            } else {
                v
            };
            if !s.contains(&v) {
                s = s.sum(&Subspace::span(d, vec![v])).unwrap();
                break;
            }
            tries += 1;
        }
    }
    s
}

pub fn random_point() -> impl Strategy<Value = GrassPoint<GaussQ>> {
    let models = n1_models();
    (0..models.len(), proptest::collection::vec(gauss(), 1..40)).prop_map(move |(i, c)| {
        let m = models[i].clone();
        let subspace = lagrangian(&m, &c);
        GrassPoint { model: m, subspace }
    })
}
