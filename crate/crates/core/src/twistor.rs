//! Gluing a lattice with its τ-conjugate: global sections, splitting type, the form h, purity and polarization.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;

use crate::error::{Result, TerpError};
use crate::limits::ScanFamily;
use crate::linalg::{hermitian_signature_info_at, weight_filtration, Mat, Signature, Subspace};
use crate::model::{class_rep, is_integer, Lattice, Order, Section, SlotSpace, SpectralWindow, TopologicalData};
use crate::report::Report;
use crate::scalar::{current_eps, Approx, GaussQ, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    NonPure,
    Pure { p: usize, q: usize },
}

#[derive(Clone, Debug)]
pub struct TwistorReport<S> {
    pub splitting: Vec<i64>,
    pub h0_basis: Vec<Section<S>>,
    pub h_matrix: Mat<S>,
    pub signature: Signature,
    pub classification: Classification,
    pub polarized: bool,
    /// Smallest pivot used in the rank decision for h is close to the tolerance.
    pub marginal: bool,
    pub min_pivot: f64,
}

impl<S> TwistorReport<S> {
    pub fn is_pure(&self) -> bool {
        matches!(self.classification, Classification::Pure { .. })
    }
}

/// Sections of L with orders ≤ hi, as a subspace of the slot space [α_1, hi].
fn sections_upto<S: Scalar>(l: &Lattice<S>, hi: Order) -> (SlotSpace, Subspace<S>) {
    let top_hi = if hi > l.window.alpha_mu { hi } else { l.window.alpha_mu };
    let big = SlotSpace::new(&l.top, l.window.alpha1, top_hi);
    let y = SlotSpace::new(&l.top, l.window.alpha1, hi);
    let g = big.span_shifts(&l.generators);
    let keep = big.indices_where(|o| o <= hi);
    let low = g.intersect(&Subspace::coordinate(big.dim(), &keep)).expect("same ambient");
    let vecs = low.basis().iter().map(|v| y.vector(&big.section(v))).collect();
    (y.clone(), Subspace::span(y.dim(), vecs))
}

/// Sections of Ĥ ⊗ O(d): v ∈ L with z^{-d}·τ... equivalently L ∩ z^d τ(L) inside the window.
pub fn twisted_sections<S: Scalar>(l: &Lattice<S>, d: i64) -> Vec<Section<S>> {
    let hi = l.window.alpha_mu + d;
    if hi < l.window.alpha1 {
        return Vec::new();
    }
    let (y, lsub) = sections_upto(l, hi);
    let top = &l.top;
    let phi: Vec<Vec<S>> =
        lsub.basis().iter().map(|v| y.vector(&top.tau(&y.section(v)).shift(d))).collect();
    let img = Subspace::span(y.dim(), phi);
    let h0 = lsub.intersect(&img).expect("same ambient");
    h0.basis().iter().map(|v| y.section(v)).collect()
}

pub fn global_sections<S: Scalar>(l: &Lattice<S>) -> Vec<Section<S>> {
    twisted_sections(l, 0)
}

/// Splitting type from the profile d ↦ h⁰(Ĥ(d)).
pub fn splitting_type<S: Scalar>(l: &Lattice<S>) -> Result<Vec<i64>> {
    let mu = l.mu() as i64;
    let bound = mu * l.window.n.max(1);
    let f: BTreeMap<i64, i64> = (-bound - 2..=bound).map(|d| (d, twisted_sections(l, d).len() as i64)).collect();
    // c(d) = #{k_i ≥ -d}
    let c = |d: i64| f[&d] - f[&(d - 1)];
    if f[&(-bound - 2)] != 0 || c(bound) != mu {
        return Err(TerpError::Internal(format!("dimension profile did not stabilize: {f:?}")));
    }
    let mut ks = Vec::new();
    for d in -bound - 1..=bound {
        let here = c(d) - if d > -bound - 1 { c(d - 1) } else { 0 };
        if here < 0 {
            return Err(TerpError::Internal(format!("dimension profile is not convex: {f:?}")));
        }
        for _ in 0..here {
            ks.push(-d);
        }
    }
    ks.sort();
    if ks.len() as i64 != mu {
        return Err(TerpError::Internal(format!("recovered {} splitting degrees for rank {mu}", ks.len())));
    }
    Ok(ks)
}

/// h(a,b) = z^{-w} P(a, τb), which must be constant on global sections.
pub fn h_form<S: Scalar>(top: &TopologicalData, basis: &[Section<S>]) -> Result<Mat<S>> {
    let n = basis.len();
    let mut h = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let p = top.pair(&basis[i], &top.tau(&basis[j]));
            let scale = p.terms().map(|(_, c)| c.magnitude()).fold(0.0, f64::max).max(1.0);
            for (k, c) in p.terms() {
                if k != top.w && !c.negligible(scale) {
                    return Err(TerpError::NonConstant(format!("h(v{}, v{}) has a z^{} term", i + 1, j + 1, k - top.w)));
                }
            }
            h.set(i, j, p.coeff(top.w));
        }
    }
    Ok(h)
}

pub fn h_matrix<S: Scalar>(l: &Lattice<S>) -> Result<Mat<S>> {
    h_form(&l.top, &global_sections(l))
}

/// Size h would have without cancellation: largest |P| coefficient times the largest squared section coefficient.
fn h_reference<S: Scalar>(top: &TopologicalData, basis: &[Section<S>]) -> f64 {
    let p = top.pairing.values().map(|(c, _)| c.magnitude()).fold(0.0, f64::max);
    let v = basis.iter().flat_map(|s| s.terms().map(|(_, c)| c.magnitude())).fold(0.0, f64::max);
    p * v * v
}

/// Accepted pivots within this factor of the rank cutoff mark a result as marginal.
pub const MARGIN: f64 = 10.0;

pub fn classify<S: Scalar>(l: &Lattice<S>) -> Result<TwistorReport<S>> {
    let splitting = splitting_type(l)?;
    let h0 = global_sections(l);
    let h = h_form(&l.top, &h0)?;
    let info = hermitian_signature_info_at(&h, h_reference(&l.top, &h0))?;
    let sig = info.sig;
    let pure_split = splitting.iter().all(|&k| k == 0);
    let pure_h = h0.len() == l.mu() && sig.corank == 0;
    let eps = current_eps();
    // min_pivot is already relative to the largest entry of h
    let mut marginal = !S::EXACT && info.min_pivot.is_finite() && info.min_pivot < MARGIN * eps;
    if pure_split != pure_h {
        if S::EXACT {
            return Err(TerpError::Internal(format!(
                "splitting {splitting:?} disagrees with h of signature {sig:?}"
            )));
        }
        marginal = true;
    }
    let classification = if pure_h { Classification::Pure { p: sig.p, q: sig.q } } else { Classification::NonPure };
    let polarized = pure_h && sig.p == l.mu();
    Ok(TwistorReport {
        splitting,
        h0_basis: h0,
        h_matrix: h,
        signature: sig,
        classification,
        polarized,
        marginal,
        min_pivot: info.min_pivot,
    })
}

/// One primitive graded piece of the weight filtration of N.
#[derive(Clone, Debug)]
pub struct PmtsPiece {
    pub level: i64,
    pub lattice: Lattice<GaussQ>,
    pub report: std::result::Result<TwistorReport<GaussQ>, String>,
}

#[derive(Clone, Debug)]
pub struct PmtsReport {
    pub checks: Report,
    pub pieces: Vec<PmtsPiece>,
}

impl PmtsReport {
    pub fn ok(&self) -> bool {
        self.checks.ok() && self.pieces.iter().all(|p| matches!(&p.report, Ok(r) if r.polarized))
    }
}

/// N acting on elementary sections: es(A_j,o) ↦ Σ_k N_kj es(A_k,o).
fn apply_flat<S: Scalar>(n: &Mat<GaussQ>, s: &Section<S>) -> Section<S> {
    let mut out = Section::zero();
    for (&(j, o), c) in s.terms() {
        for k in 0..n.rows {
            let x = n.get(k, j);
            if !x.is_zero() {
                out.add_term(k, o, c.clone() * S::from_gauss(x));
            }
        }
    }
    out
}

/// Polarized mixed twistor check: every primitive graded piece of W(N) is pure polarized of weight w − l.
pub fn pmts_check(l: &Lattice<GaussQ>, n: &Mat<GaussQ>) -> Result<PmtsReport> {
    let top = &l.top;
    let mu = top.mu;
    if (n.rows, n.cols) != (mu, mu) {
        return Err(TerpError::ShapeMismatch(format!("N is {}x{}, expected {mu}x{mu}", n.rows, n.cols)));
    }
    let mut checks = Report::new();
    checks.push("nilpotent", n.is_nilpotent(), "N^mu != 0");
    let mut cls = None;
    for k in 0..mu {
        for j in 0..mu {
            if !n.get(k, j).is_zero() && !top.same_class(k, j) {
                cls.get_or_insert((k + 1, j + 1));
            }
        }
    }
    checks.push("flat", cls.is_none(), format!("N links different eigenvalues at {cls:?}"));
    if cls.is_some() || !n.is_nilpotent() {
        return Err(TerpError::InvalidInput(format!("N is not a flat nilpotent endomorphism: {checks}")));
    }
    let mut iso = None;
    for i in 0..mu {
        for j in 0..mu {
            let a = top.reference::<GaussQ>(i);
            let b = top.reference::<GaussQ>(j);
            let s = top.pair(&apply_flat(n, &a), &b).add(&top.pair(&a, &apply_flat(n, &b)));
            if !s.is_zero() {
                iso.get_or_insert((i + 1, j + 1));
            }
        }
    }
    if let Some(p) = iso {
        return Err(TerpError::NotIsometry(format!("P(N s_{}, s_{}) + P(s_{0}, N s_{1}) != 0", p.0, p.1)));
    }
    let nt = &top.nilpotent;
    checks.push("commutes-with-nilpotent", n.mul(nt) == nt.mul(n), "N Ntilde != Ntilde N");
    let k = &top.conjugation;
    checks.push("real", k.mul(&n.conj()) == n.mul(k), "K conj(N) != N K");
    let img = l.window_image();
    for (i, g) in l.generators.iter().enumerate() {
        if !l.contains_in(&img, &apply_flat(n, g).mul_z()) {
            return Err(TerpError::NotPreserved(format!("z N v{} is not in L", i + 1)));
        }
    }
    let wf = weight_filtration(n, 0)?;
    let (_, whi) = wf.range();
    let mut pieces = Vec::new();
    for lev in 0..=whi.max(0) {
        let ker = n.pow(lev as usize + 1).kernel();
        let u = ker.intersect(&wf.get(lev))?;
        let u0 = wf.get(lev - 1).intersect(&ker)?;
        if u.dim() == u0.dim() {
            continue;
        }
        let piece = primitive_piece(l, n, lev, &u, &u0)?;
        let report = piece.validate();
        let rep = if report.ok() {
            classify(&piece).map_err(|e| e.to_string())
        } else {
            Err(format!("graded piece is not a valid lattice: {report}"))
        };
        pieces.push(PmtsPiece { level: lev, lattice: piece, report: rep });
    }
    Ok(PmtsReport { checks, pieces })
}

fn primitive_piece(l: &Lattice<GaussQ>, n: &Mat<GaussQ>, lev: i64, u: &Subspace<GaussQ>, u0: &Subspace<GaussQ>) -> Result<Lattice<GaussQ>> {
    let top = &l.top;
    let mu = top.mu;
    // piece basis per eigenvalue class, so every basis vector has a well defined exponent
    let mut reps: Vec<(Vec<GaussQ>, Order)> = Vec::new();
    for (_, idx) in top.classes() {
        let c = Subspace::coordinate(mu, &idx);
        let uc = u.intersect(&c)?;
        let u0c = u0.intersect(&c)?;
        for v in uc.complement_in(&u0c) {
            let j = idx[0];
            reps.push((v, top.exponents[j]));
        }
    }
    let r = reps.len();
    // coordinates of a vector of U in the basis (u0 basis, reps)
    let mut frame: Vec<Vec<GaussQ>> = u0.basis().to_vec();
    frame.extend(reps.iter().map(|(v, _)| v.clone()));
    let k0 = u0.dim();
    let t = frame.len();
    let coords = |v: &[GaussQ]| -> Result<Vec<GaussQ>> {
        // kernel of [frame | v] has a vector with last entry −1 exactly when v is in the span
        let mut cols = frame.clone();
        cols.push(v.to_vec());
        let ker = Mat::from_cols(cols, mu).kernel();
        let x = ker
            .basis()
            .iter()
            .find(|x| !x[t].is_zero())
            .ok_or_else(|| TerpError::Internal("vector outside the primitive part".into()))?;
        let scale = -x[t].inv();
        Ok(x[k0..t].iter().map(|y| y.clone() * scale.clone()).collect())
    };
    let g = GaussQ::int;
    let il = GaussQ::i_pow(lev);
    let nl = n.pow(lev as usize);
    let mut pairing = BTreeMap::new();
    for a in 0..r {
        for b in 0..r {
            let sa = vec_section(&reps[a].0, reps[a].1);
            let sb = vec_section(&reps[b].0, reps[b].1);
            let p = top.pair(&apply_flat(&nl, &sa), &sb);
            let terms: Vec<(i64, GaussQ)> = p.terms().map(|(e, c)| (e, c.clone())).collect();
            match terms.as_slice() {
                [] => {}
                [(e, c)] => {
                    pairing.insert((a, b), (c.clone() * il.clone(), *e));
                }
                _ => return Err(TerpError::Internal("graded pairing is not homogeneous".into())),
            }
        }
    }
    let mut nt = Mat::zeros(r, r);
    let mut kk = Mat::zeros(r, r);
    for b in 0..r {
        let img = top.nilpotent.mul_vec(&reps[b].0);
        for (a, x) in coords(&img)?.into_iter().enumerate() {
            nt.set(a, b, x);
        }
        let cv: Vec<GaussQ> = reps[b].0.iter().map(|x| x.conj()).collect();
        let img = top.conjugation.mul_vec(&cv);
        for (a, x) in coords(&img)?.into_iter().enumerate() {
            kk.set(a, b, x);
        }
    }
    // K' maps exponent classes λ to λ̄; the reference exponent of a conjugate piece vector
    // must satisfy α'' ≡ w − α' mod 1, which the class structure guarantees.
    let w2 = top.w - lev;
    let exponents: Vec<Order> = reps.iter().map(|(_, a)| *a).collect();
    let ptop = Arc::new(TopologicalData {
        mu: r,
        w: w2,
        exponents: exponents.clone(),
        nilpotent: nt,
        conjugation: kk,
        pairing,
        s_form: None,
    });
    let tv = ptop.validate();
    if !tv.ok() {
        return Err(TerpError::Internal(format!("graded topological data invalid: {tv}")));
    }
    // window: α_1 − lev, moved down to an exponent class of the piece
    let mut a1 = l.window.alpha1 - lev;
    while !exponents.iter().any(|e| is_integer(&(e - a1))) {
        let next = exponents
            .iter()
            .map(|e| {
                let d = class_rep(&(a1 - e));
                a1 - if d == Order::one() { Order::from_integer(0) } else { d }
            })
            .max()
            .unwrap();
        a1 = next;
    }
    let pwin = SpectralWindow::new(&ptop, a1)?;
    // image of L ∩ E_U modulo E_{U0}
    let img = l.window_image();
    let space = &img.space;
    let mut eu_vecs = Vec::new();
    let orders: std::collections::BTreeSet<Order> = space.slots.iter().map(|s| s.1).collect();
    for o in &orders {
        for uvec in u.basis() {
            let mut v = vec![g(0); space.dim()];
            let mut ok = false;
            for (j, x) in uvec.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                match space.index_of(j, *o) {
                    Some(i) => {
                        v[i] = x.clone();
                        ok = true;
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                eu_vecs.push(v);
            }
        }
    }
    let e_u = Subspace::span(space.dim(), eu_vecs);
    let part = img.g.intersect(&e_u)?;
    let mut gens: Vec<Section<GaussQ>> = Vec::new();
    for v in part.basis() {
        let sec = space.section(v);
        // regroup by order and project the H^∞ vector to piece coordinates
        let mut by_order: BTreeMap<Order, Vec<GaussQ>> = BTreeMap::new();
        for (&(j, o), c) in sec.terms() {
            by_order.entry(o).or_insert_with(|| vec![g(0); mu])[j] = c.clone();
        }
        let mut out = Section::zero();
        for (o, hv) in by_order {
            for (b, x) in coords(&hv)?.into_iter().enumerate() {
                if !x.is_zero() {
                    out.add_term(b, o, x);
                }
            }
        }
        if !out.is_zero() {
            gens.push(out);
        }
    }
    for (b, e) in exponents.iter().enumerate() {
        let k0 = (l.window.alpha_mu - e).floor().to_integer() + 1;
        let mut o = *e + k0;
        while o <= pwin.alpha_mu {
            gens.push(Section::es(b, o, g(1)));
            o += 1;
        }
    }
    let piece = Lattice::new(ptop, pwin, gens);
    let rep = piece.validate_spanning();
    if !rep.ok() {
        return Err(TerpError::Internal(format!("graded piece is not a lattice: {rep}")));
    }
    Ok(Lattice::new(piece.top.clone(), pwin, piece.canonical_generators()))
}

fn vec_section(v: &[GaussQ], o: Order) -> Section<GaussQ> {
    let mut s = Section::zero();
    for (j, x) in v.iter().enumerate() {
        s.add_term(j, o, x.clone());
    }
    s
}

/// One row of a signature scan.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub params: Vec<num_complex::Complex64>,
    pub result: std::result::Result<ScanResult, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub splitting: Vec<i64>,
    pub signature: Signature,
    pub pure: bool,
    pub polarized: bool,
    pub marginal: bool,
}

/// Approximate classification at each grid point, in grid order.
pub fn signature_scan(family: &ScanFamily, grid: &[Vec<num_complex::Complex64>]) -> Vec<ScanRow> {
    grid.iter()
        .map(|pt| {
            let vals: Vec<Approx> = pt.iter().map(|c| Approx(*c)).collect();
            let result = family
                .eval(&vals)
                .and_then(|l| classify(&l))
                .map(|r| ScanResult {
                    splitting: r.splitting.clone(),
                    signature: r.signature,
                    pure: r.is_pure(),
                    polarized: r.polarized,
                    marginal: r.marginal,
                })
                .map_err(|e| e.to_string());
            ScanRow { params: pt.clone(), result }
        })
        .collect()
}

/// Exact classification at a point of a scan family.
pub fn classify_at(family: &ScanFamily, vals: &[GaussQ]) -> Result<TwistorReport<GaussQ>> {
    classify(&family.eval(vals)?)
}
