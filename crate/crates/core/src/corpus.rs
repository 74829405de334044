//! Worked models: rank two examples with trivial monodromy, the rank four Lagrangian Grassmannian,
//! weighted projective and Hirzebruch compactifications, the reducible chain and a Jordan block.
//!
//! Rational stand-ins are used where a model allows any exponent in an open interval.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::limits::{Direction, ParamFamily, PolySection, ScanFamily};
use crate::linalg::Mat;
use crate::model::{q, Lattice, Order, Section, SpectralWindow, TopologicalData};
use crate::poly::{parse_expr, MPoly};
use crate::scalar::GaussQ;

fn g(n: i64) -> GaussQ {
    GaussQ::int(n)
}

fn perm(mu: usize, pairs: &[(usize, usize)]) -> Mat<GaussQ> {
    let mut k = Mat::zeros(mu, mu);
    for &(a, b) in pairs {
        k.set(a, b, g(1));
        k.set(b, a, g(1));
    }
    for j in 0..mu {
        if (0..mu).all(|i| k.get(i, j).is_zero()) {
            k.set(j, j, g(1));
        }
    }
    k
}

/// P(s_i, s_j) = c·z^{α'_i+α'_j} for the listed entries.
fn pairing(exps: &[Order], entries: &[(usize, usize, GaussQ)]) -> BTreeMap<(usize, usize), (GaussQ, i64)> {
    entries
        .iter()
        .map(|(i, j, c)| ((*i, *j), (c.clone(), (exps[*i] + exps[*j]).to_integer())))
        .collect()
}

/// Family generators from expression strings: each term is (basis index, order, coefficient).
pub fn poly_family(
    top: &Arc<TopologicalData>,
    alpha1: Order,
    params: &[&str],
    gens: &[&[(usize, Order, &str)]],
) -> ScanFamily {
    let generators = gens
        .iter()
        .map(|terms| {
            let mut s = PolySection::new();
            for (j, o, c) in terms.iter() {
                let p = parse_expr(c, params).expect("corpus expression");
                let e = s.entry((*j, *o)).or_insert_with(|| MPoly::zero(params.len()));
                *e = e.add(&p);
            }
            s
        })
        .collect();
    ScanFamily {
        top: top.clone(),
        window: SpectralWindow::new(top, alpha1).expect("corpus window"),
        params: params.iter().map(|s| s.to_string()).collect(),
        generators,
    }
}

pub fn lattice(top: &Arc<TopologicalData>, alpha1: Order, gens: &[&[(usize, Order, GaussQ)]]) -> Lattice<GaussQ> {
    let window = SpectralWindow::new(top, alpha1).expect("corpus window");
    let gens = gens.iter().map(|t| Section::from_terms(t.iter().cloned())).collect();
    Lattice::new(top.clone(), window, gens)
}

/// Rank two, w = 0, trivial monodromy, P(s_1,s_2) = P(s_2,s_1) = ε; K swaps A_1, A_2 or is the identity.
pub fn ex22_top(eps: i64, swap: bool) -> Arc<TopologicalData> {
    let exps = vec![q(0, 1), q(0, 1)];
    Arc::new(TopologicalData {
        mu: 2,
        w: 0,
        pairing: pairing(&exps, &[(0, 1, g(eps)), (1, 0, g(eps))]),
        exponents: exps,
        nilpotent: Mat::zeros(2, 2),
        conjugation: if swap { perm(2, &[(0, 1)]) } else { Mat::identity(2) },
        s_form: None,
    })
}

/// z^{-1}A_1 + r A_2, z A_2.
pub fn ex28(eps: i64, swap: bool) -> ScanFamily {
    let top = ex22_top(eps, swap);
    poly_family(&top, q(-1, 1), &["r"], &[&[(0, q(-1, 1), "1"), (1, q(0, 1), "r")], &[(1, q(1, 1), "1")]])
}

pub fn ex28a() -> ScanFamily {
    ex28(1, true)
}

pub fn ex28b() -> ScanFamily {
    ex28(1, false)
}

/// Pullback along the line (r_1, r_2) = (a·r, b·r): b r z^{-1}A_1 + a r A_2, z A_2, A_1.
pub fn ex35_line(a: i64, b: i64) -> ParamFamily {
    let top = ex22_top(1, true);
    let (sa, sb) = (format!("{a}*r"), format!("{b}*r"));
    let fam = poly_family(
        &top,
        q(-1, 1),
        &["r"],
        &[&[(0, q(-1, 1), sb.as_str()), (1, q(0, 1), sa.as_str())], &[(1, q(1, 1), "1")], &[(0, q(0, 1), "1")]],
    );
    fam.restrict("r", &[], Direction::Zero).expect("one parameter")
}

/// The extension generated by z A_2 and A_1.
pub fn ex35_limit_lattice() -> Lattice<GaussQ> {
    let top = ex22_top(1, true);
    lattice(&top, q(-1, 1), &[&[(1, q(1, 1), g(1))], &[(0, q(0, 1), g(1))]])
}

/// α = (−7/8, −5/8, 5/8, 7/8), Ā_1 = A_4, Ā_2 = A_3, antidiagonal pairing.
pub fn s91_top() -> Arc<TopologicalData> {
    let exps = vec![q(-7, 8), q(-5, 8), q(5, 8), q(7, 8)];
    Arc::new(TopologicalData {
        mu: 4,
        w: 0,
        pairing: pairing(&exps, &[(0, 3, g(1)), (3, 0, g(1)), (1, 2, g(1)), (2, 1, g(1))]),
        exponents: exps,
        nilpotent: Mat::zeros(4, 4),
        conjugation: perm(4, &[(0, 3), (1, 2)]),
        s_form: None,
    })
}

pub fn s91_alpha() -> [Order; 4] {
    [q(-7, 8), q(-5, 8), q(5, 8), q(7, 8)]
}

/// Universal family over the open cell, parameters r, p, q.
pub fn s91_universal() -> ScanFamily {
    let top = s91_top();
    let a = s91_alpha();
    poly_family(
        &top,
        a[0],
        &["r", "p", "q"],
        &[
            &[(0, a[0], "1"), (2, a[2] - 1, "r"), (3, a[3] - 1, "q")],
            &[(1, a[1], "1"), (2, a[2] - 1, "p"), (3, a[3] - 1, "r")],
            &[(2, a[2], "1")],
            &[(3, a[3], "1")],
        ],
    )
}

/// Stratum of dimension two, parameters x, y.
pub fn s91_sp2() -> ScanFamily {
    let top = s91_top();
    let a = s91_alpha();
    poly_family(
        &top,
        a[0],
        &["x", "y"],
        &[
            &[(0, a[0], "1"), (1, a[1], "-x"), (3, a[3] - 1, "y")],
            &[(2, a[2] - 1, "1"), (3, a[3] - 1, "x")],
            &[(1, a[1] + 1, "1")],
            &[(3, a[3], "1")],
        ],
    )
}

/// Stratum of dimension one, parameter w.
pub fn s91_sp1() -> ScanFamily {
    let top = s91_top();
    let a = s91_alpha();
    poly_family(
        &top,
        a[0],
        &["w"],
        &[&[(1, a[1], "1"), (2, a[2] - 1, "w")], &[(3, a[3] - 1, "1")], &[(0, a[0] + 1, "1")], &[(2, a[2], "1")]],
    )
}

pub fn s91_sp0() -> Lattice<GaussQ> {
    let top = s91_top();
    let a = s91_alpha();
    lattice(
        &top,
        a[0],
        &[&[(2, a[2] - 1, g(1))], &[(3, a[3] - 1, g(1))], &[(0, a[0] + 1, g(1))], &[(1, a[1] + 1, g(1))]],
    )
}

/// Two dimensional stratum restricted to y = w·x², as a family in x towards ∞.
pub fn s91_curve(w: GaussQ) -> ParamFamily {
    let f = s91_sp2();
    let curve = MPoly::var(2, 0).mul(&MPoly::var(2, 0)).scale(&w);
    f.substitute("y", &curve).unwrap().restrict("x", &[], Direction::Infinity).unwrap()
}

/// α = (−5/4, 0, 5/4), Ā_1 = A_3, A_2 real, P(s_i,s_j) = δ_{i+j,4}.
pub fn s92_top() -> Arc<TopologicalData> {
    let exps = vec![q(-5, 4), q(0, 1), q(5, 4)];
    let s = Mat::from_rows(vec![
        vec![g(0), g(0), GaussQ::i()],
        vec![g(0), g(1), g(0)],
        vec![-GaussQ::i(), g(0), g(0)],
    ]);
    Arc::new(TopologicalData {
        mu: 3,
        w: 0,
        pairing: pairing(&exps, &[(0, 2, g(1)), (2, 0, g(1)), (1, 1, g(1))]),
        exponents: exps,
        nilpotent: Mat::zeros(3, 3),
        conjugation: perm(3, &[(0, 2)]),
        s_form: Some(s),
    })
}

/// v_1 = s_1 + r z^{-1}s_2 + (r²/2) z^{-2}s_3 + t z^{-1}s_3, v_2 = s_2 + r z^{-1}s_3, v_3 = s_3.
pub fn s92_family() -> ScanFamily {
    let top = s92_top();
    let (a1, a2, a3) = (q(-5, 4), q(0, 1), q(5, 4));
    poly_family(
        &top,
        a1,
        &["r", "t"],
        &[
            &[(0, a1, "1"), (1, a2 - 1, "r"), (2, a3 - 2, "r^2/2"), (2, a3 - 1, "t")],
            &[(1, a2, "1"), (2, a3 - 1, "r")],
            &[(2, a3, "1")],
        ],
    )
}

/// Restriction to t = u·r⁴ as a family in r towards ∞.
pub fn s92_curve(u: GaussQ) -> ParamFamily {
    let f = s92_family();
    let r4 = MPoly::var(2, 0).pow(4).unwrap().scale(&u);
    f.substitute("t", &r4).unwrap().restrict("r", &[], Direction::Infinity).unwrap()
}

/// w = 2, s_1 = z^{1/2}A, s_2 = z^{1/2}Ā, P(s_i,s_j) = (−1)^{j+1} z δ_{i+j,3}.
pub fn hirzebruch_top() -> Arc<TopologicalData> {
    let exps = vec![q(1, 2), q(1, 2)];
    let i2 = GaussQ::cplx((0, 1), (2, 1));
    Arc::new(TopologicalData {
        mu: 2,
        w: 2,
        pairing: pairing(&exps, &[(0, 1, g(-1)), (1, 0, g(1))]),
        exponents: exps,
        nilpotent: Mat::zeros(2, 2),
        conjugation: perm(2, &[(0, 1)]),
        s_form: Some(Mat::from_rows(vec![vec![g(0), i2.clone()], vec![-i2, g(0)]])),
    })
}

/// Chart at 0: z^{-1/2}(A + yĀ) + r_0 z^{3/2}Ā, z^{5/2}Ā.
pub fn hirzebruch_chart0() -> ScanFamily {
    let top = hirzebruch_top();
    poly_family(
        &top,
        q(-1, 2),
        &["r0", "y"],
        &[&[(0, q(-1, 2), "1"), (1, q(-1, 2), "y"), (1, q(3, 2), "r0")], &[(1, q(5, 2), "1")]],
    )
}

/// Chart at ∞: z^{-1/2}(xA + Ā) + r_∞ z^{3/2}A, z^{5/2}A.
pub fn hirzebruch_chart_inf() -> ScanFamily {
    let top = hirzebruch_top();
    poly_family(
        &top,
        q(-1, 2),
        &["rinf", "x"],
        &[&[(0, q(-1, 2), "x"), (1, q(-1, 2), "1"), (0, q(3, 2), "rinf")], &[(0, q(5, 2), "1")]],
    )
}

/// Rank one universal family over the Hodge filtration fibre: z^{-1/2}A_1 + r z^{3/2}A_2, z^{5/2}A_2.
pub fn hirzebruch_fibre() -> ScanFamily {
    let top = hirzebruch_top();
    poly_family(&top, q(-1, 2), &["r"], &[&[(0, q(-1, 2), "1"), (1, q(3, 2), "r")], &[(1, q(5, 2), "1")]])
}

/// Trivial monodromy, s_1 = z^{-n}A_1, s_2 = z^n A_2, Ā_1 = A_2, P(s_i,s_j) = δ_{i+j,3}.
pub fn s93_top(n: i64) -> Arc<TopologicalData> {
    let exps = vec![q(-n, 1), q(n, 1)];
    Arc::new(TopologicalData {
        mu: 2,
        w: 0,
        pairing: pairing(&exps, &[(0, 1, g(1)), (1, 0, g(1))]),
        exponents: exps,
        nilpotent: Mat::zeros(2, 2),
        conjugation: perm(2, &[(0, 1)]),
        s_form: None,
    })
}

/// G_k = ⟨z^k A_1, z^{-k} A_2⟩; G_0 = V^0.
pub fn s93_g(n: i64, k: i64) -> Lattice<GaussQ> {
    let top = s93_top(n);
    lattice(&top, q(-n, 1), &[&[(0, q(k, 1), g(1))], &[(1, q(-k, 1), g(1))]])
}

/// H_{-n}(r) = ⟨s_1 + r z^{-1}s_2, s_2⟩.
pub fn s93_family(n: i64) -> ScanFamily {
    let top = s93_top(n);
    poly_family(&top, q(-n, 1), &["r"], &[&[(0, q(-n, 1), "1"), (1, q(n - 1, 1), "r")], &[(1, q(n, 1), "1")]])
}

/// Jordan block: α' = (−1/2, 1/2), Ñ = i·E_21, K = I, P(es(A_1,−1/2), s_2) = −2i.
pub fn s94_top() -> Arc<TopologicalData> {
    let exps = vec![q(-1, 2), q(1, 2)];
    let m2i = GaussQ::cplx((0, 1), (-2, 1));
    let mut nt = Mat::zeros(2, 2);
    nt.set(1, 0, GaussQ::i());
    Arc::new(TopologicalData {
        mu: 2,
        w: 0,
        pairing: pairing(&exps, &[(0, 1, m2i.clone()), (1, 0, m2i)]),
        exponents: exps,
        nilpotent: nt,
        conjugation: Mat::identity(2),
        s_form: Some(Mat::from_rows(vec![vec![g(0), g(-1)], vec![g(1), g(0)]])),
    })
}

/// v_1 = s_1 + r z^{-1}s_2, v_2 = s_2 with s_1 = i·es(A_1, −1/2).
pub fn s94_family() -> ScanFamily {
    let top = s94_top();
    poly_family(&top, q(-1, 2), &["r"], &[&[(0, q(-1, 2), "i"), (1, q(-1, 2), "r")], &[(1, q(1, 2), "1")]])
}

/// The fibre over r = ∞: z^{-1}s_2, z s_1.
pub fn s94_infinity() -> Lattice<GaussQ> {
    let top = s94_top();
    lattice(&top, q(-1, 2), &[&[(1, q(-1, 2), g(1))], &[(0, q(1, 2), GaussQ::i())]])
}

/// The real nilpotent N with N(A_1) = A_2.
pub fn s94_n() -> Mat<GaussQ> {
    let mut n = Mat::zeros(2, 2);
    n.set(1, 0, g(1));
    n
}
