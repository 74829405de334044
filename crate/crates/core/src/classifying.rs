//! The symplectic window W^ω, points of Λ_{a,b}, spectra, Hodge filtrations and stratum charts.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Result, TerpError};
use crate::linalg::{dot, hermitian_signature_info, weight_filtration, Mat, Signature, Subspace};
use crate::model::{class_rep, is_integer, order_string, Lattice, Order, Section, SlotSpace, SpectralWindow, TopologicalData, WindowImage};
use crate::poly::MPoly;
use crate::report::Report;
use crate::scalar::{GaussQ, Scalar};

/// W^ω = V^{α_1}/V^{>α_μ−1} with ω = [P^{(w−1)}], b = [z·], a = [z²∇_z].
#[derive(Clone, Debug)]
pub struct SymplecticModel<S> {
    pub top: Arc<TopologicalData>,
    pub window: SpectralWindow,
    pub space: SlotSpace,
    pub omega: Mat<S>,
    pub a: Mat<S>,
    pub b: Mat<S>,
    pub m: usize,
}

pub fn build_w_omega<S: Scalar>(top: Arc<TopologicalData>, window: SpectralWindow) -> Result<SymplecticModel<S>> {
    let space = SlotSpace::new(&top, window.alpha1, window.alpha_mu - 1);
    let d = space.dim();
    if d % 2 == 1 {
        return Err(TerpError::OddDimension(d));
    }
    let mut omega = Mat::zeros(d, d);
    for p in 0..d {
        for q in 0..d {
            let (i, o) = space.slots[p];
            let (j, o2) = space.slots[q];
            let val = top.pair(&Section::<S>::es(i, o, S::one()), &Section::es(j, o2, S::one())).coeff(top.w - 1);
            omega.set(p, q, val);
        }
    }
    if !omega.add(&omega.transpose()).is_zero_rel(omega.max_mag().max(1.0)) {
        return Err(TerpError::InvalidInput("omega is not antisymmetric".into()));
    }
    if omega.rank() != d {
        return Err(TerpError::InvalidInput("omega is degenerate".into()));
    }
    let b = space.operator(|s: &Section<S>| s.mul_z());
    let a = space.operator(|s: &Section<S>| top.z2_nabla(s));
    Ok(SymplecticModel { top, window, space, omega, a, b, m: d / 2 })
}

/// A point of the Grassmannian of m-planes in W^ω.
#[derive(Clone, Debug)]
pub struct GrassPoint<S> {
    pub model: Arc<SymplecticModel<S>>,
    pub subspace: Subspace<S>,
}

impl<S: Scalar> PartialEq for GrassPoint<S> {
    fn eq(&self, o: &Self) -> bool {
        self.subspace == o.subspace
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Membership {
    None,
    Lambda,
    LambdaB,
    LambdaAB,
}

impl<S: Scalar> SymplecticModel<S> {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_isotropic(&self, s: &Subspace<S>) -> bool {
        let scale = self.omega.max_mag().max(1.0);
        for u in s.basis() {
            let ou = self.omega.transpose().mul_vec(u);
            for v in s.basis() {
                if !dot(&ou, v).negligible(scale) {
                    return false;
                }
            }
        }
        true
    }

    pub fn membership(&self, s: &Subspace<S>) -> Result<Membership> {
        if s.dim() != self.m || s.ambient() != self.dim() {
            return Err(TerpError::DimensionMismatch(format!(
                "expected an {}-plane in dimension {}, got a {}-plane in dimension {}",
                self.m,
                self.dim(),
                s.dim(),
                s.ambient()
            )));
        }
        if !self.is_isotropic(s) {
            return Ok(Membership::None);
        }
        if !s.contains_all(&s.image(&self.b)?) {
            return Ok(Membership::Lambda);
        }
        if !s.contains_all(&s.image(&self.a)?) {
            return Ok(Membership::LambdaB);
        }
        Ok(Membership::LambdaAB)
    }
}

pub fn membership_lambda_ab<S: Scalar>(model: &SymplecticModel<S>, s: &Subspace<S>) -> Result<Membership> {
    model.membership(s)
}

pub fn point_of_lattice<S: Scalar>(model: &Arc<SymplecticModel<S>>, l: &Lattice<S>) -> Result<GrassPoint<S>> {
    let g = model.space.span_shifts(&l.generators);
    if g.dim() != model.m {
        return Err(TerpError::NotLagrangian(format!("image has dimension {} instead of {}", g.dim(), model.m)));
    }
    match model.membership(&g)? {
        Membership::None => Err(TerpError::NotLagrangian("omega does not vanish on the image".into())),
        Membership::Lambda => Err(TerpError::NotInvariant("image is not b-invariant".into())),
        Membership::LambdaB => Err(TerpError::NotInvariant("image is not a-invariant".into())),
        Membership::LambdaAB => Ok(GrassPoint { model: model.clone(), subspace: g }),
    }
}

/// Lift of a point to the window [α_1, α_μ]: π^{-1}(G) + the top slice.
pub fn window_image_of_point<S: Scalar>(g: &GrassPoint<S>) -> WindowImage<S> {
    let model = &g.model;
    let space = SlotSpace::new(&model.top, model.window.alpha1, model.window.alpha_mu);
    let mut vecs: Vec<Vec<S>> = g
        .subspace
        .basis()
        .iter()
        .map(|v| space.vector(&model.space.section(v)))
        .collect();
    for i in space.indices_where(|o| o > model.window.alpha_mu - 1) {
        let mut e = vec![S::zero(); space.dim()];
        e[i] = S::one();
        vecs.push(e);
    }
    let gx = Subspace::span(space.dim(), vecs);
    let shifted = gx.basis().iter().map(|v| space.vector(&space.section(v).mul_z())).collect();
    let bg = Subspace::span(space.dim(), shifted);
    WindowImage { space, g: gx, bg }
}

pub fn lattice_of_point<S: Scalar>(g: &GrassPoint<S>) -> Result<Lattice<S>> {
    let img = window_image_of_point(g);
    let gens: Vec<Section<S>> = img.quotient_basis().iter().map(|v| img.space.section(v)).collect();
    let l = Lattice::new(g.model.top.clone(), g.model.window, gens);
    let pm = l.pairing_mod_z(&l.generators);
    let rank = pm.rank();
    if rank != l.mu() || l.generators.len() != l.mu() {
        return Err(TerpError::DegeneratePairing { rank, dim: l.generators.len() });
    }
    Ok(l)
}

/// Spectral numbers and spectral pairs with multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpectralData {
    pub numbers: BTreeMap<Order, usize>,
    pub pairs: BTreeMap<(Order, i64), usize>,
}

impl SpectralData {
    /// Spectrum as a sorted list with repetitions.
    pub fn numbers_list(&self) -> Vec<Order> {
        self.numbers.iter().flat_map(|(a, &d)| std::iter::repeat_n(*a, d)).collect()
    }
    pub fn pairs_list(&self) -> Vec<(Order, i64)> {
        self.pairs.iter().flat_map(|(a, &d)| std::iter::repeat_n(*a, d)).collect()
    }
}

pub fn spectral_numbers<S: Scalar>(l: &Lattice<S>) -> Vec<Order> {
    let counts = l.window_image().spectrum_counts();
    counts.iter().flat_map(|(a, &d)| std::iter::repeat_n(*a, d)).collect()
}

/// Indices of the basis vectors whose exponent is congruent to `a`.
fn class_of(top: &TopologicalData, a: &Order) -> Vec<usize> {
    (0..top.mu).filter(|&j| is_integer(&(top.exponents[j] - a))).collect()
}

/// Gr^α_V of the images G and bG, as subspaces of ℂ^{class of α}.
fn graded_piece<S: Scalar>(img: &WindowImage<S>, alpha: Order) -> (Vec<usize>, Subspace<S>, Subspace<S>) {
    let idx: Vec<usize> = img.space.indices_where(|o| o == alpha);
    let rows_at = |s: &Subspace<S>| -> Subspace<S> {
        let vecs = s
            .basis()
            .iter()
            .zip(s.pivots())
            .filter(|(_, p)| img.space.slots[**p].1 == alpha)
            .map(|(v, _)| idx.iter().map(|&i| v[i].clone()).collect())
            .collect();
        Subspace::span(idx.len(), vecs)
    };
    let js = idx.iter().map(|&i| img.space.slots[i].0).collect();
    (js, rows_at(&img.g), rows_at(&img.bg))
}

pub fn spectral_pairs<S: Scalar>(l: &Lattice<S>) -> Result<SpectralData> {
    let img = l.window_image();
    let numbers = img.spectrum_counts();
    let top = &l.top;
    let w = top.w;
    let mut pairs = BTreeMap::new();
    for &alpha in numbers.keys() {
        let (js, gr, grz) = graded_piece(&img, alpha);
        let n: Mat<S> = top.nilpotent.submatrix(&js, &js).map(|x| S::from_gauss(x));
        let wf = weight_filtration(&n, 0)?;
        let (lo, hi) = wf.range();
        for k in lo..=hi + 1 {
            let wk = wf.get(k);
            let wk1 = wf.get(k - 1);
            let top_part = gr.intersect(&wk)?;
            let bottom = grz.intersect(&wk)?.sum(&gr.intersect(&wk1)?)?;
            let d = top_part.dim() - bottom.dim();
            if d > 0 {
                *pairs.entry((alpha, k + (w - 1))).or_default() += d;
            }
        }
    }
    Ok(SpectralData { numbers, pairs })
}

/// Decreasing filtration on one eigenvalue block of H^∞.
#[derive(Clone, Debug)]
pub struct HodgeBlock<S> {
    /// Exponent representative in (0,1].
    pub rep: Order,
    /// Basis indices spanning the block.
    pub indices: Vec<usize>,
    levels: BTreeMap<i64, Subspace<S>>,
}

impl<S: Scalar> HodgeBlock<S> {
    pub fn get(&self, p: i64) -> Subspace<S> {
        let (lo, hi) = (*self.levels.keys().next().unwrap(), *self.levels.keys().last().unwrap());
        if p < lo {
            Subspace::full(self.indices.len())
        } else if p > hi {
            Subspace::zero(self.indices.len())
        } else {
            self.levels[&p].clone()
        }
    }
    pub fn range(&self) -> (i64, i64) {
        (*self.levels.keys().next().unwrap(), *self.levels.keys().last().unwrap())
    }
}

#[derive(Clone, Debug)]
pub struct HodgeFiltration<S> {
    pub mu: usize,
    pub blocks: Vec<HodgeBlock<S>>,
}

impl<S: Scalar> HodgeFiltration<S> {
    /// F^p as a subspace of H^∞ = ℂ^μ.
    pub fn total(&self, p: i64) -> Subspace<S> {
        let mut vecs = Vec::new();
        for b in &self.blocks {
            for v in b.get(p).basis() {
                let mut e = vec![S::zero(); self.mu];
                for (x, &j) in v.iter().zip(&b.indices) {
                    e[j] = x.clone();
                }
                vecs.push(e);
            }
        }
        Subspace::span(self.mu, vecs)
    }
    /// Range of p where some block is neither everything nor zero, widened by one.
    pub fn range(&self) -> (i64, i64) {
        let lo = self.blocks.iter().map(|b| b.range().0).min().unwrap_or(0);
        let hi = self.blocks.iter().map(|b| b.range().1).max().unwrap_or(0);
        (lo, hi)
    }
    pub fn dims(&self) -> Vec<(i64, usize)> {
        let (lo, hi) = self.range();
        (lo..=hi).map(|p| (p, self.total(p).dim())).collect()
    }
}

pub fn hodge_filtration<S: Scalar>(l: &Lattice<S>) -> HodgeFiltration<S> {
    let img = l.window_image();
    let top = &l.top;
    let w = top.w;
    let mut blocks = Vec::new();
    for (rep, indices) in top.classes() {
        // β = rep + w − 1 − p runs over orders ≡ rep in [α_1, α_μ]
        let mut levels = BTreeMap::new();
        let plo = (rep + w - 1 - l.window.alpha_mu).ceil().to_integer();
        let phi = (rep + w - 1 - l.window.alpha1).floor().to_integer();
        for p in plo - 1..=phi + 1 {
            let beta = rep + w - 1 - p;
            let sub = if beta < l.window.alpha1 {
                Subspace::zero(indices.len())
            } else if beta > l.window.alpha_mu {
                Subspace::full(indices.len())
            } else {
                let (js, gr, _) = graded_piece(&img, beta);
                debug_assert_eq!(js, indices);
                gr
            };
            levels.insert(p, sub);
        }
        blocks.push(HodgeBlock { rep, indices, levels });
    }
    HodgeFiltration { mu: top.mu, blocks }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    /// Eigenvalue 1, weight w.
    One,
    /// Eigenvalues other than 1, weight w − 1.
    NotOne,
}

#[derive(Clone, Debug)]
pub struct PmhsReport {
    pub report: Report,
    pub weight: i64,
    /// Always set: the untwisted filtration F is checked in place of G⁻¹F.
    pub untwisted_caveat: bool,
    /// Hermitian forms used in the positivity checks: (k, p, signature).
    pub positivity: Vec<(i64, i64, Signature)>,
}

impl PmhsReport {
    pub fn ok(&self) -> bool {
        self.report.ok()
    }
}

/// Polarized mixed Hodge structure checks on one block, using N = iÑ (a positive multiple of −N).
pub fn pmhs_check<S: Scalar>(
    f: &HodgeFiltration<S>,
    s_form: &Mat<S>,
    conj: &Mat<S>,
    ntilde: &Mat<S>,
    w: i64,
    block: Block,
) -> Result<PmhsReport> {
    let mu = f.mu;
    for (name, m) in [("S", s_form), ("K", conj), ("N", ntilde)] {
        if (m.rows, m.cols) != (mu, mu) {
            return Err(TerpError::ShapeMismatch(format!("{name} is {}x{}, expected {mu}x{mu}", m.rows, m.cols)));
        }
    }
    let idx: Vec<usize> = f
        .blocks
        .iter()
        .filter(|b| (b.rep == Order::one()) == (block == Block::One))
        .flat_map(|b| b.indices.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let c = match block {
        Block::One => w,
        Block::NotOne => w - 1,
    };
    let d = idx.len();
    let mut rep = Report::new();
    let mut positivity = Vec::new();
    if d == 0 {
        rep.push("empty-block", true, "");
        return Ok(PmhsReport { report: rep, weight: c, untwisted_caveat: true, positivity });
    }
    let n = ntilde.submatrix(&idx, &idx).scale(&S::imag_unit());
    let k = conj.submatrix(&idx, &idx);
    let s = s_form.submatrix(&idx, &idx);
    let fp = |p: i64| f.total(p).project(&idx);
    let bar = |sub: &Subspace<S>| -> Subspace<S> {
        Subspace::span(d, sub.basis().iter().map(|v| k.mul_vec(&v.iter().map(|x| x.conj()).collect::<Vec<_>>())).collect())
    };
    let (plo, phi) = f.range();
    let wf = weight_filtration(&n, c)?;
    let (wlo, whi) = wf.range();

    // transversality and strictness
    let im_n = n.image();
    let mut transv = None;
    let mut strict = None;
    for p in plo - 1..=phi + 1 {
        let nf = fp(p).image(&n)?;
        if !fp(p - 1).contains_all(&nf) {
            transv.get_or_insert(p);
        }
        let rhs = im_n.intersect(&fp(p - 1))?;
        if nf != rhs {
            strict.get_or_insert(format!("N(F^{p}) has dim {}, Im N ∩ F^{} has dim {}", nf.dim(), p - 1, rhs.dim()));
        }
    }
    rep.push("griffiths-transversality", transv.is_none(), format!("N(F^{:?}) not in F^(p-1)", transv));
    rep.push("strictness", strict.is_none(), strict.unwrap_or_default());

    // opposedness on each graded piece
    let mut opp = None;
    for kk in wlo..=whi + 1 {
        let wk = wf.get(kk);
        let wk1 = wf.get(kk - 1);
        let gdim = wk.dim() - wk1.dim();
        if gdim == 0 {
            continue;
        }
        for p in plo - 1..=phi + 2 {
            let a = fp(p).intersect(&wk)?.sum(&wk1)?;
            let b = bar(&fp(kk - p + 1)).intersect(&wk)?.sum(&wk1)?;
            let da = a.dim() - wk1.dim();
            let db = b.dim() - wk1.dim();
            let total = a.sum(&b)?.dim() - wk1.dim();
            if da + db != gdim || total != gdim {
                opp.get_or_insert(format!("Gr^W_{kk}: dim F^{p} = {da}, dim conj F^{} = {db}, graded dim {gdim}", kk - p + 1));
            }
        }
    }
    rep.push("hodge-opposedness", opp.is_none(), opp.unwrap_or_default());

    // positivity on primitive (p,q) pieces
    let mut posf = None;
    for l in 0..=(whi - c).max(0) {
        let kk = c + l;
        let wk = wf.get(kk);
        let wk1 = wf.get(kk - 1);
        if wk.dim() == wk1.dim() {
            continue;
        }
        let nl = n.pow(l as usize);
        let prim = wf.get(kk - 2 * l - 2).preimage(&n.pow(l as usize + 1))?;
        for p in plo - 1..=phi + 2 {
            let q = kk - p;
            let a = fp(p).intersect(&wk)?.sum(&wk1)?;
            let b = bar(&fp(q)).intersect(&wk)?.sum(&wk1)?;
            let u = a.intersect(&b)?.intersect(&prim)?.intersect(&wk)?;
            let reps = u.complement_in(&wk1.intersect(&u)?);
            if reps.is_empty() {
                continue;
            }
            let ipq = S::i_pow(p - q);
            let r = reps.len();
            let mut h = Mat::zeros(r, r);
            for x in 0..r {
                for y in 0..r {
                    let vbar = k.mul_vec(&reps[y].iter().map(|t| t.conj()).collect::<Vec<_>>());
                    let val = dot(&s.transpose().mul_vec(&reps[x]), &nl.mul_vec(&vbar));
                    h.set(x, y, ipq.clone() * val);
                }
            }
            match hermitian_signature_info(&h) {
                Ok(info) => {
                    positivity.push((kk, p, info.sig));
                    if info.sig.p != r {
                        posf.get_or_insert(format!("Gr^W_{kk} (p,q)=({p},{q}): signature {:?}", info.sig));
                    }
                }
                Err(_) => {
                    posf.get_or_insert(format!("Gr^W_{kk} (p,q)=({p},{q}): form is not hermitian: {h}"));
                }
            }
        }
    }
    rep.push("polarization-positivity", posf.is_none(), posf.unwrap_or_default());
    Ok(PmhsReport { report: rep, weight: c, untwisted_caveat: true, positivity })
}

/// Candidate spectra: symmetric multisets in the window respecting eigenvalue multiplicities.
pub fn enumerate_admissible_spectra(top: &TopologicalData, window: &SpectralWindow) -> Vec<Vec<Order>> {
    let w = Order::from_integer(top.w);
    let classes = top.classes();
    let allowed = |rep: &Order| -> Vec<Order> {
        let kmin = (window.alpha1 - rep).ceil().to_integer();
        let kmax = (window.alpha_mu - rep).floor().to_integer();
        (kmin..=kmax).map(|k| rep + k).collect()
    };
    // per class options as lists of multisets
    let mut per_class: Vec<Vec<Vec<Order>>> = Vec::new();
    let mut done: BTreeSet<Order> = BTreeSet::new();
    for (rep, idx) in &classes {
        if done.contains(rep) {
            continue;
        }
        let mirror = class_rep(&(w - rep));
        done.insert(*rep);
        done.insert(mirror);
        let vals = allowed(rep);
        let m = idx.len();
        let sets = multisets(&vals, m);
        let opts: Vec<Vec<Order>> = if mirror == *rep {
            sets.into_iter()
                .filter(|s| {
                    let mut t: Vec<Order> = s.iter().map(|a| w - a).collect();
                    t.sort();
                    t == *s
                })
                .collect()
        } else {
            sets.into_iter()
                .map(|s| {
                    let mut t = s.clone();
                    t.extend(s.iter().map(|a| w - a));
                    t
                })
                .collect()
        };
        per_class.push(opts);
    }
    let mut out: BTreeSet<Vec<Order>> = BTreeSet::new();
    let mut acc = vec![Vec::new()];
    for opts in per_class {
        let mut next = Vec::new();
        for a in &acc {
            for o in &opts {
                let mut t: Vec<Order> = a.clone();
                t.extend(o.iter().copied());
                next.push(t);
            }
        }
        acc = next;
    }
    for mut s in acc {
        s.sort();
        out.insert(s);
    }
    out.into_iter().collect()
}

fn multisets(vals: &[Order], m: usize) -> Vec<Vec<Order>> {
    fn rec(vals: &[Order], start: usize, m: usize, cur: &mut Vec<Order>, out: &mut Vec<Vec<Order>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..vals.len() {
            cur.push(vals[i]);
            rec(vals, i, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(vals, 0, m, &mut Vec::new(), &mut out);
    out
}

/// Free coefficient c_{ij}^{(p)} of the chart v_i = s_i + Σ c z^{-p} s_j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnsatzVar {
    pub i: usize,
    pub j: usize,
    pub p: i64,
    pub name: String,
}

#[derive(Clone, Debug)]
pub struct AnsatzChart {
    pub vars: Vec<AnsatzVar>,
    /// Indices into `vars` set to zero on the stratum.
    pub stratum_zero: Vec<usize>,
    /// Generators with polynomial coefficients in the chart variables.
    pub generators: Vec<BTreeMap<(usize, Order), MPoly>>,
    pub pairing_constraints: Vec<(String, MPoly)>,
    pub pole_constraints: Vec<(String, MPoly)>,
}

impl AnsatzChart {
    pub fn var_names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }
    pub fn free_vars(&self) -> Vec<&AnsatzVar> {
        self.vars.iter().enumerate().filter(|(k, _)| !self.stratum_zero.contains(k)).map(|(_, v)| v).collect()
    }
    /// All residual constraints, normalized and deduplicated.
    pub fn constraints(&self) -> Vec<MPoly> {
        let mut out: Vec<MPoly> = Vec::new();
        for (_, p) in self.pairing_constraints.iter().chain(&self.pole_constraints) {
            let q = normalize(p);
            if !out.contains(&q) {
                out.push(q);
            }
        }
        out
    }
}

/// Scale so that the last term has coefficient 1.
pub fn normalize(p: &MPoly) -> MPoly {
    match p.terms().last() {
        Some((_, c)) => p.scale(&c.inv()),
        None => p.clone(),
    }
}

type ZPoly = BTreeMap<i64, MPoly>;

fn zp_add(a: &mut ZPoly, k: i64, c: MPoly) {
    let e = a.entry(k).or_insert_with(|| MPoly::zero(c.nvars()));
    *e = e.add(&c);
    if e.is_zero() {
        a.remove(&k);
    }
}

fn sym_pair(top: &TopologicalData, a: &BTreeMap<(usize, Order), MPoly>, b: &BTreeMap<(usize, Order), MPoly>) -> ZPoly {
    let mut out = ZPoly::new();
    for (&(i, o), c) in a {
        let k = (o - top.exponents[i]).to_integer();
        for (&(j, o2), d) in b {
            let Some((pc, e)) = top.pairing.get(&(i, j)) else { continue };
            let l = (o2 - top.exponents[j]).to_integer();
            let sign = if l.rem_euclid(2) == 0 { GaussQ::int(1) } else { GaussQ::int(-1) };
            zp_add(&mut out, k + l + e, c.mul(d).scale(&(sign * pc.clone())));
        }
    }
    out
}

fn sym_nabla(top: &TopologicalData, a: &BTreeMap<(usize, Order), MPoly>) -> BTreeMap<(usize, Order), MPoly> {
    let mut out: BTreeMap<(usize, Order), MPoly> = BTreeMap::new();
    let mut add = |key: (usize, Order), c: MPoly| {
        let e = out.entry(key).or_insert_with(|| MPoly::zero(c.nvars()));
        *e = e.add(&c);
    };
    for (&(j, o), c) in a {
        add((j, o + 1), c.scale(&GaussQ::from_ratio64(o)));
        for k in 0..top.mu {
            let nk = top.nilpotent.get(k, j);
            if !nk.is_zero() {
                add((k, o + 1), c.scale(nk));
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Chart of the stratum through a monomial reference lattice.
pub fn ansatz_family(reference: &Lattice<GaussQ>, spp: &SpectralData) -> Result<AnsatzChart> {
    let top = &reference.top;
    let mu = top.mu;
    let own = spectral_pairs(reference)?;
    if own != *spp {
        return Err(TerpError::SppMismatch(format!("reference has {:?}", own.pairs_list())));
    }
    let gens = reference.canonical_generators();
    // s_l = es(A_{π(l)}, β_l)
    let mut basis_of = Vec::new();
    let mut beta = Vec::new();
    for (l, g) in gens.iter().enumerate() {
        let terms: Vec<_> = g.terms().collect();
        if terms.len() != 1 {
            return Err(TerpError::InvalidInput(format!("reference generator {} is not elementary", l + 1)));
        }
        let (&(j, o), c) = terms[0];
        if *c != GaussQ::int(1) {
            return Err(TerpError::InvalidInput("reference generators must have coefficient 1".into()));
        }
        basis_of.push(j);
        beta.push(o);
    }
    let mut slot_of = vec![usize::MAX; mu];
    for (l, &j) in basis_of.iter().enumerate() {
        if slot_of[j] != usize::MAX {
            return Err(TerpError::InvalidInput("reference uses a basis vector twice".into()));
        }
        slot_of[j] = l;
    }
    // weight index of each reference generator
    let lvl: Vec<i64> = (0..mu)
        .map(|l| {
            let j = basis_of[l];
            let js = class_of(top, &top.exponents[j]);
            let n: Mat<GaussQ> = top.nilpotent.submatrix(&js, &js);
            let wf = weight_filtration(&n, 0).expect("validated nilpotent");
            let pos = js.iter().position(|&x| x == j).unwrap();
            let mut e = vec![GaussQ::int(0); js.len()];
            e[pos] = GaussQ::int(1);
            let (lo, hi) = wf.range();
            (lo..=hi + 1).find(|&k| wf.get(k).contains(&e)).unwrap()
        })
        .collect();
    let a1 = reference.window.alpha1;
    let mut vars = Vec::new();
    let mut zero = Vec::new();
    for i in 0..mu {
        for j in 0..mu {
            let mut p = 1;
            while beta[j] - p >= a1 {
                let o = beta[j] - p;
                if o < beta[i] || (o == beta[i] && lvl[j] > lvl[i]) {
                    zero.push(vars.len());
                }
                vars.push(AnsatzVar { i, j, p, name: format!("c{}_{}_{}", i + 1, j + 1, p) });
                p += 1;
            }
        }
    }
    let nv = vars.len();
    let zero_vals: Vec<(usize, GaussQ)> = zero.iter().map(|&k| (k, GaussQ::int(0))).collect();
    let mut generators: Vec<BTreeMap<(usize, Order), MPoly>> = Vec::new();
    for i in 0..mu {
        let mut g = BTreeMap::new();
        g.insert((basis_of[i], beta[i]), MPoly::constant(nv, GaussQ::int(1)));
        for (k, v) in vars.iter().enumerate() {
            if v.i == i && !zero.contains(&k) {
                g.insert((basis_of[v.j], beta[v.j] - v.p), MPoly::var(nv, k));
            }
        }
        generators.push(g);
    }
    let w = top.w;
    let mut pairing_constraints = Vec::new();
    for i in 0..mu {
        for j in i..mu {
            let p = sym_pair(top, &generators[i], &generators[j]);
            for (&k, c) in &p {
                let c = c.specialize(&zero_vals);
                if k < w && !c.is_zero() {
                    pairing_constraints.push((format!("P(v{},v{}) z^{k}", i + 1, j + 1), c));
                }
            }
        }
    }
    // pole condition: write z²∇v_i = g_i(z)·s, reduce by v = (I + C) s
    let to_zrow = |sec: &BTreeMap<(usize, Order), MPoly>| -> Vec<ZPoly> {
        let mut row = vec![ZPoly::new(); mu];
        for (&(j, o), c) in sec {
            let l = slot_of[j];
            zp_add(&mut row[l], (o - beta[l]).to_integer(), c.clone());
        }
        row
    };
    let vmat: Vec<Vec<ZPoly>> = generators.iter().map(to_zrow).collect();
    // C = V − I
    let mut cmat = vmat.clone();
    for (l, row) in cmat.iter_mut().enumerate() {
        zp_add(&mut row[l], 0, MPoly::constant(nv, GaussQ::int(-1)));
    }
    let rowmul = |row: &[ZPoly], m: &[Vec<ZPoly>]| -> Vec<ZPoly> {
        let mut out = vec![ZPoly::new(); mu];
        for (k, a) in row.iter().enumerate() {
            for (e1, c1) in a {
                for (col, b) in m[k].iter().enumerate() {
                    for (e2, c2) in b {
                        zp_add(&mut out[col], e1 + e2, c1.mul(c2));
                    }
                }
            }
        }
        out
    };
    let mut pole_constraints = Vec::new();
    for i in 0..mu {
        let u = to_zrow(&sym_nabla(top, &generators[i]));
        let dmax = u.iter().filter_map(|z| z.keys().last().copied()).max().unwrap_or(0).max(0);
        // f = u (I + C)^{-1} = u Σ (−C)^m, nonnegative part only
        let mut f = vec![ZPoly::new(); mu];
        let mut term = u.clone();
        for _ in 0..=dmax + 1 {
            for (l, z) in term.iter().enumerate() {
                for (&e, c) in z {
                    zp_add(&mut f[l], e, c.clone());
                }
            }
            term = rowmul(&term, &cmat).into_iter().map(|z| z.into_iter().map(|(e, c)| (e, c.neg())).collect()).collect();
        }
        let fplus: Vec<ZPoly> = f.into_iter().map(|z| z.into_iter().filter(|(e, _)| *e >= 0).collect()).collect();
        let prod = rowmul(&fplus, &vmat);
        for l in 0..mu {
            let mut r = u[l].clone();
            for (&e, c) in &prod[l] {
                zp_add(&mut r, e, c.neg());
            }
            for (e, c) in r {
                let c = c.specialize(&zero_vals);
                if !c.is_zero() {
                    pole_constraints.push((format!("z^2 nabla v{} component s{} z^{e}", i + 1, l + 1), c));
                }
            }
        }
    }
    let _ = order_string;
    Ok(AnsatzChart { vars, stratum_zero: zero, generators, pairing_constraints, pole_constraints })
}

/// Cross-check d(α) = dim Gr_F^{⌊w−α⌋} H^∞_λ.
pub fn hodge_spectrum<S: Scalar>(l: &Lattice<S>) -> Vec<Order> {
    let f = hodge_filtration(l);
    let w = l.top.w;
    let mut out = Vec::new();
    for b in &f.blocks {
        let (lo, hi) = b.range();
        for p in lo..=hi {
            let d = b.get(p).dim() - b.get(p + 1).dim();
            // α with ⌊w − α⌋ = p and α ≡ rep: α = rep + w − 1 − p
            let alpha = b.rep + w - 1 - p;
            for _ in 0..d {
                out.push(alpha);
            }
        }
    }
    out.sort();
    out
}

pub fn zero_order() -> Order {
    Order::zero()
}
