//! Topological data, elementary sections, the operators z, z²∇_z, τ, the pairing P, and lattices.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Result, TerpError};
use crate::laurent::Laurent;
use crate::linalg::{Mat, Subspace};
use crate::report::Report;
use crate::scalar::{GaussQ, Scalar};

pub type Order = Rational64;

pub fn is_integer(q: &Order) -> bool {
    q.is_integer()
}

/// Representative in (0,1] of the class of `a` modulo ℤ.
pub fn class_rep(a: &Order) -> Order {
    let f = a - a.floor();
    if f.is_zero() {
        Order::one()
    } else {
        f
    }
}

/// Monodromy eigen-data, nilpotent part, real structure and the flat pairing on reference sections.
#[derive(Clone, Debug, PartialEq)]
pub struct TopologicalData {
    pub mu: usize,
    pub w: i64,
    /// α'_j, one per basis vector.
    pub exponents: Vec<Order>,
    /// Ñ, the matrix entering the z²∇_z rule directly.
    pub nilpotent: Mat<GaussQ>,
    /// K: the conjugate of A_j is Σ_k K_kj A_k.
    pub conjugation: Mat<GaussQ>,
    /// (i, j) -> (c, e) with P(s_i, s_j) = c z^e on reference sections s_j = es(A_j, α'_j).
    pub pairing: BTreeMap<(usize, usize), (GaussQ, i64)>,
    /// Optional polarizing form on H^∞, used only by the mixed Hodge checks.
    pub s_form: Option<Mat<GaussQ>>,
}

impl TopologicalData {
    /// Eigenvalue classes as (representative in (0,1], member indices).
    pub fn classes(&self) -> Vec<(Order, Vec<usize>)> {
        let mut m: BTreeMap<Order, Vec<usize>> = BTreeMap::new();
        for (j, a) in self.exponents.iter().enumerate() {
            m.entry(class_rep(a)).or_default().push(j);
        }
        m.into_iter().collect()
    }

    pub fn same_class(&self, i: usize, j: usize) -> bool {
        is_integer(&(self.exponents[i] - self.exponents[j]))
    }

    pub fn pairing_coeff(&self, i: usize, j: usize) -> Option<&(GaussQ, i64)> {
        self.pairing.get(&(i, j))
    }

    /// Reference section s_j.
    pub fn reference<S: Scalar>(&self, j: usize) -> Section<S> {
        Section::es(j, self.exponents[j], S::one())
    }

    /// Whether an order is admissible for basis vector j.
    pub fn order_ok(&self, j: usize, o: &Order) -> bool {
        j < self.mu && is_integer(&(o - self.exponents[j]))
    }

    pub fn validate(&self) -> Report {
        let mut r = Report::new();
        let mu = self.mu;
        let dims_ok = self.exponents.len() == mu
            && (self.nilpotent.rows, self.nilpotent.cols) == (mu, mu)
            && (self.conjugation.rows, self.conjugation.cols) == (mu, mu)
            && self.pairing.keys().all(|&(i, j)| i < mu && j < mu)
            && self.s_form.as_ref().is_none_or(|s| (s.rows, s.cols) == (mu, mu));
        r.push("dimensions", dims_ok, "matrix or exponent list does not match mu");
        if !dims_ok {
            return r;
        }
        let n = &self.nilpotent;
        r.push("nilpotent", n.is_nilpotent(), "N^mu != 0");
        let mut bad = None;
        for k in 0..mu {
            for j in 0..mu {
                if !n.get(k, j).is_zero() && !self.same_class(k, j) {
                    bad.get_or_insert((k, j));
                }
            }
        }
        r.push(
            "nilpotent-respects-eigenspaces",
            bad.is_none(),
            format!("N[{:?}] links different eigenvalues", bad.map(|(a, b)| (a + 1, b + 1))),
        );
        let k = &self.conjugation;
        let kk = k.mul(&k.conj());
        r.push("conjugation-involution", kk == Mat::identity(mu), format!("K*conj(K) = {kk}"));
        let mut bad = None;
        for a in 0..mu {
            for b in 0..mu {
                if !k.get(a, b).is_zero() && !is_integer(&(self.exponents[a] + self.exponents[b])) {
                    bad.get_or_insert((a + 1, b + 1));
                }
            }
        }
        r.push(
            "conjugation-respects-eigenspaces",
            bad.is_none(),
            format!("K{bad:?} pairs eigenvalues that are not conjugate"),
        );
        let lhs = k.mul(&n.conj());
        let rhs = n.mul(k).scale(&GaussQ::int(-1));
        r.push("nilpotent-real", lhs == rhs, format!("K conj(N) = {lhs}, -N K = {rhs}"));

        let mut bad_e = None;
        let mut bad_sym = None;
        let mut cmat = Mat::<GaussQ>::zeros(mu, mu);
        for (&(i, j), (c, e)) in &self.pairing {
            if c.is_zero() {
                continue;
            }
            cmat.set(i, j, c.clone());
            if Order::from_integer(*e) != self.exponents[i] + self.exponents[j] {
                bad_e.get_or_insert((i + 1, j + 1));
            }
            let other = self.pairing.get(&(j, i));
            let sign = if (self.w + e).rem_euclid(2) == 0 { GaussQ::int(1) } else { GaussQ::int(-1) };
            let ok = matches!(other, Some((d, f)) if f == e && *d == sign * c.clone());
            if !ok {
                bad_sym.get_or_insert((i + 1, j + 1));
            }
        }
        r.push(
            "pairing-exponents",
            bad_e.is_none(),
            format!("entry {bad_e:?}: exponent differs from alpha'_i + alpha'_j"),
        );
        r.push(
            "pairing-symmetry",
            bad_sym.is_none(),
            format!("entry {bad_sym:?} violates P(a,b)(z) = (-1)^w P(b,a)(-z)"),
        );
        let rank = cmat.rank();
        r.push("pairing-invertible", rank == mu, format!("coefficient matrix has rank {rank} < {mu}"));

        let mut bad_flat = None;
        let mut bad_real = None;
        for i in 0..mu {
            for j in 0..mu {
                let si: Section<GaussQ> = self.reference(i);
                let sj: Section<GaussQ> = self.reference(j);
                let p = self.pair(&si, &sj);
                let lhs = p.derivative().shift(2);
                let rhs = self.pair(&self.z2_nabla(&si), &sj).sub(&self.pair(&si, &self.z2_nabla(&sj)));
                if lhs != rhs {
                    bad_flat.get_or_insert((i + 1, j + 1));
                }
                let pt = self.pair(&self.tau(&si), &self.tau(&sj));
                let expect = Laurent::from_terms(p.terms().map(|(e, c)| (2 * self.w - e, c.conj())));
                if pt != expect {
                    bad_real.get_or_insert((i + 1, j + 1));
                }
            }
        }
        r.push(
            "pairing-flat",
            bad_flat.is_none(),
            format!("z^2 d/dz P != P(z^2 nabla a, b) - P(a, z^2 nabla b) at {bad_flat:?}"),
        );
        r.push("pairing-real", bad_real.is_none(), format!("P(tau a, tau b) is not the conjugate reflection at {bad_real:?}"));
        if let Some(s) = &self.s_form {
            r.push("s-form-nondegenerate", s.rank() == mu, "S is degenerate");
        }
        r
    }

    /// z²∇_z es(A_j,o) = o·es(A_j,o+1) + Σ_k Ñ_kj es(A_k,o+1).
    pub fn z2_nabla<S: Scalar>(&self, s: &Section<S>) -> Section<S> {
        let mut out = Section::zero();
        for (&(j, o), c) in s.terms() {
            let o1 = o + 1;
            out.add_term(j, o1, c.clone() * S::from_ratio(o));
            for k in 0..self.mu {
                let nk = self.nilpotent.get(k, j);
                if !nk.is_zero() {
                    out.add_term(k, o1, c.clone() * S::from_gauss(nk));
                }
            }
        }
        out
    }

    /// τ(c·es(A_j,o)) = c̄·Σ_k K_kj es(A_k, w−o).
    pub fn tau<S: Scalar>(&self, s: &Section<S>) -> Section<S> {
        let mut out = Section::zero();
        let w = Order::from_integer(self.w);
        for (&(j, o), c) in s.terms() {
            for k in 0..self.mu {
                let kk = self.conjugation.get(k, j);
                if !kk.is_zero() {
                    out.add_term(k, w - o, c.conj() * S::from_gauss(kk));
                }
            }
        }
        out
    }

    /// Bilinear pairing, second argument at −z.
    pub fn pair<S: Scalar>(&self, a: &Section<S>, b: &Section<S>) -> Laurent<S> {
        let mut out = Laurent::zero();
        for (&(i, o), c) in a.terms() {
            let k = (o - self.exponents[i]).to_integer();
            for (&(j, o2), d) in b.terms() {
                let Some((pc, e)) = self.pairing.get(&(i, j)) else {
                    continue;
                };
                let l = (o2 - self.exponents[j]).to_integer();
                let sign = if l.rem_euclid(2) == 0 { S::one() } else { -S::one() };
                out.add_term(k + l + e, c.clone() * d.clone() * sign * S::from_gauss(pc));
            }
        }
        out
    }
}

/// Spectral window [α_1, α_μ] with α_μ = w − α_1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectralWindow {
    pub alpha1: Order,
    pub alpha_mu: Order,
    pub n: i64,
}

impl SpectralWindow {
    pub fn new(top: &TopologicalData, alpha1: Order) -> Result<Self> {
        let w = Order::from_integer(top.w);
        if alpha1 * 2 > w {
            return Err(TerpError::InvalidInput(format!("alpha1 = {alpha1} exceeds w/2")));
        }
        if !top.exponents.iter().any(|a| is_integer(&(a - alpha1))) {
            return Err(TerpError::InvalidInput(format!(
                "exp(-2 pi i alpha1) for alpha1 = {alpha1} is not a monodromy eigenvalue"
            )));
        }
        let alpha_mu = w - alpha1;
        Ok(SpectralWindow { alpha1, alpha_mu, n: (alpha_mu - alpha1).floor().to_integer() })
    }
}

/// Finite sum Σ c·es(A_j, o), keyed by (j, o), zero-based j.
#[derive(Clone, Debug, PartialEq)]
pub struct Section<S> {
    terms: BTreeMap<(usize, Order), S>,
}

impl<S: Scalar> Default for Section<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> Section<S> {
    pub fn zero() -> Self {
        Section { terms: BTreeMap::new() }
    }
    pub fn es(j: usize, o: Order, c: S) -> Self {
        let mut s = Self::zero();
        s.add_term(j, o, c);
        s
    }
    pub fn from_terms(it: impl IntoIterator<Item = (usize, Order, S)>) -> Self {
        let mut s = Self::zero();
        for (j, o, c) in it {
            s.add_term(j, o, c);
        }
        s
    }
    pub fn add_term(&mut self, j: usize, o: Order, c: S) {
        if c.is_exact_zero() {
            return;
        }
        let v = match self.terms.remove(&(j, o)) {
            Some(old) => old + c,
            None => c,
        };
        if !v.is_exact_zero() {
            self.terms.insert((j, o), v);
        }
    }
    pub fn terms(&self) -> impl Iterator<Item = (&(usize, Order), &S)> {
        self.terms.iter()
    }
    pub fn coeff(&self, j: usize, o: Order) -> S {
        self.terms.get(&(j, o)).cloned().unwrap_or_else(S::zero)
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn min_order(&self) -> Option<Order> {
        self.terms.keys().map(|k| k.1).min()
    }
    pub fn max_order(&self) -> Option<Order> {
        self.terms.keys().map(|k| k.1).max()
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (&(j, ord), c) in &o.terms {
            r.add_term(j, ord, c.clone());
        }
        r
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-S::one()))
    }
    pub fn scale(&self, c: &S) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(j, o), x)| (j, o, x.clone() * c.clone())))
    }
    /// Multiply by z^k.
    pub fn shift(&self, k: i64) -> Self {
        Section { terms: self.terms.iter().map(|(&(j, o), c)| ((j, o + k), c.clone())).collect() }
    }
    pub fn mul_z(&self) -> Self {
        self.shift(1)
    }
    /// Keep only terms with order in [lo, hi].
    pub fn truncate(&self, lo: Order, hi: Order) -> Self {
        Section {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.1 >= lo && k.1 <= hi)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Section<T> {
        Section::from_terms(self.terms.iter().map(|(&(j, o), c)| (j, o, f(c))))
    }
    /// Equality up to the approximate tolerance (exact equality for exact scalars).
    pub fn approx_eq(&self, o: &Self) -> bool {
        let d = self.sub(o);
        let scale = self.terms.values().chain(o.terms.values()).map(|c| c.magnitude()).fold(1.0, f64::max);
        d.terms.values().all(|c| c.negligible(scale))
    }
}

fn fmt_order(o: &Order) -> String {
    if o.is_integer() {
        o.numer().to_string()
    } else {
        format!("{}/{}", o.numer(), o.denom())
    }
}

impl<S: Scalar> fmt::Display for Section<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&(j, o), c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*es(A{}, {})", j + 1, fmt_order(&o))?;
        }
        Ok(())
    }
}

pub fn order_string(o: &Order) -> String {
    fmt_order(o)
}

/// Coordinates for elementary sections of order in [lo, hi], sorted by (order, basis index).
#[derive(Clone, Debug, PartialEq)]
pub struct SlotSpace {
    pub lo: Order,
    pub hi: Order,
    pub slots: Vec<(usize, Order)>,
    index: BTreeMap<(usize, Order), usize>,
}

impl SlotSpace {
    pub fn new(top: &TopologicalData, lo: Order, hi: Order) -> Self {
        let mut slots = Vec::new();
        for (j, a) in top.exponents.iter().enumerate() {
            let kmin = (lo - a).ceil().to_integer();
            let kmax = (hi - a).floor().to_integer();
            for k in kmin..=kmax {
                slots.push((j, a + k));
            }
        }
        slots.sort_by(|x, y| (x.1, x.0).cmp(&(y.1, y.0)));
        let index = slots.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        SlotSpace { lo, hi, slots, index }
    }
    pub fn dim(&self) -> usize {
        self.slots.len()
    }
    pub fn index_of(&self, j: usize, o: Order) -> Option<usize> {
        self.index.get(&(j, o)).copied()
    }
    /// Coordinates of the truncation of `s` to [lo, hi].
    pub fn vector<S: Scalar>(&self, s: &Section<S>) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim()];
        for (&(j, o), c) in s.terms() {
            if let Some(i) = self.index_of(j, o) {
                v[i] = c.clone();
            }
        }
        v
    }
    pub fn section<S: Scalar>(&self, v: &[S]) -> Section<S> {
        Section::from_terms(
            v.iter().enumerate().filter(|(_, c)| !c.is_exact_zero()).map(|(i, c)| (self.slots[i].0, self.slots[i].1, c.clone())),
        )
    }
    /// Indices of slots whose order satisfies `pred`.
    pub fn indices_where(&self, pred: impl Fn(Order) -> bool) -> Vec<usize> {
        (0..self.dim()).filter(|&i| pred(self.slots[i].1)).collect()
    }
    /// Span of the truncations of z^k g for all k ≥ 0.
    pub fn span_shifts<S: Scalar>(&self, gens: &[Section<S>]) -> Subspace<S> {
        let mut vecs = Vec::new();
        for g in gens {
            let Some(m) = g.min_order() else { continue };
            let kmax = (self.hi - m).floor().to_integer();
            for k in 0..=kmax.max(-1) {
                vecs.push(self.vector(&g.shift(k)));
            }
        }
        Subspace::span(self.dim(), vecs)
    }
    /// Matrix of a linear operator on sections, truncated to the slot range.
    pub fn operator<S: Scalar>(&self, f: impl Fn(&Section<S>) -> Section<S>) -> Mat<S> {
        let cols = self
            .slots
            .iter()
            .map(|&(j, o)| self.vector(&f(&Section::es(j, o, S::one()))))
            .collect();
        Mat::from_cols(cols, self.dim())
    }
}

/// A regular singular TERP-structure given by generating sections.
#[derive(Clone, Debug)]
pub struct Lattice<S> {
    pub top: Arc<TopologicalData>,
    pub window: SpectralWindow,
    pub generators: Vec<Section<S>>,
}

/// Image of L in V^{α_1}/V^{>α_μ} together with the image of zL.
#[derive(Clone, Debug)]
pub struct WindowImage<S> {
    pub space: SlotSpace,
    pub g: Subspace<S>,
    pub bg: Subspace<S>,
}

impl<S: Scalar> WindowImage<S> {
    /// Echelon rows of G whose pivots are not pivots of bG: a basis of L/zL.
    pub fn quotient_basis(&self) -> Vec<Vec<S>> {
        let bp: Vec<usize> = self.bg.pivots().to_vec();
        self.g
            .basis()
            .iter()
            .zip(self.g.pivots())
            .filter(|(_, p)| !bp.contains(p))
            .map(|(v, _)| v.clone())
            .collect()
    }
    /// d(α) = pivots of G at order α minus pivots of bG at order α.
    pub fn spectrum_counts(&self) -> BTreeMap<Order, usize> {
        let mut m: BTreeMap<Order, usize> = BTreeMap::new();
        for p in self.g.pivots() {
            *m.entry(self.space.slots[*p].1).or_default() += 1;
        }
        for p in self.bg.pivots() {
            let e = m.get_mut(&self.space.slots[*p].1).expect("bG pivots are G pivots");
            *e -= 1;
        }
        m.retain(|_, v| *v > 0);
        m
    }
}

impl<S: Scalar> Lattice<S> {
    pub fn new(top: Arc<TopologicalData>, window: SpectralWindow, generators: Vec<Section<S>>) -> Self {
        Lattice { top, window, generators }
    }

    pub fn mu(&self) -> usize {
        self.top.mu
    }

    /// Slot space of V^{α_1}/V^{>hi}.
    pub fn slots_upto(&self, hi: Order) -> SlotSpace {
        SlotSpace::new(&self.top, self.window.alpha1, hi)
    }

    pub fn window_image(&self) -> WindowImage<S> {
        let space = self.slots_upto(self.window.alpha_mu);
        let g = space.span_shifts(&self.generators);
        let shifted: Vec<Vec<S>> = g.basis().iter().map(|v| space.vector(&space.section(v).mul_z())).collect();
        let bg = Subspace::span(space.dim(), shifted);
        WindowImage { space, g, bg }
    }

    /// Membership of a section in L, assuming L is valid.
    pub fn contains(&self, s: &Section<S>) -> bool {
        self.contains_in(&self.window_image(), s)
    }

    pub fn contains_in(&self, img: &WindowImage<S>, s: &Section<S>) -> bool {
        if s.min_order().is_some_and(|m| m < self.window.alpha1) {
            return false;
        }
        img.g.contains(&img.space.vector(s))
    }

    /// Canonical generators: lifts of a basis of L/zL taken from the echelon form.
    pub fn canonical_generators(&self) -> Vec<Section<S>> {
        let img = self.window_image();
        img.quotient_basis().iter().map(|v| img.space.section(v)).collect()
    }

    /// Matrix of [z^{-w} P] on the canonical basis of L/zL.
    pub fn pairing_mod_z(&self, basis: &[Section<S>]) -> Mat<S> {
        let w = self.top.w;
        let n = basis.len();
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.top.pair(&basis[i], &basis[j]).coeff(w));
            }
        }
        m
    }

    pub fn validate(&self) -> Report {
        let mut r = Report::new();
        let top = &self.top;
        let mu = top.mu;
        r.push(
            "rank",
            self.generators.len() == mu,
            format!("{} generators for rank {mu}", self.generators.len()),
        );
        let mut bad = None;
        let mut low = None;
        for (i, g) in self.generators.iter().enumerate() {
            for (&(j, o), _) in g.terms() {
                if !top.order_ok(j, &o) {
                    bad.get_or_insert(format!("generator {} term (A{}, {})", i + 1, j + 1, fmt_order(&o)));
                }
                if o < self.window.alpha1 {
                    low.get_or_insert(format!("generator {} has order {} < alpha1", i + 1, fmt_order(&o)));
                }
            }
        }
        r.push("orders-congruent", bad.is_none(), bad.clone().unwrap_or_default());
        r.push("window-lower-bound", low.is_none(), low.clone().unwrap_or_default());
        if bad.is_some() || low.is_some() {
            return r;
        }
        let img = self.window_image();
        let slice = img.space.indices_where(|o| o > self.window.alpha_mu - 1);
        let mut missing = None;
        for &i in &slice {
            let mut e = vec![S::zero(); img.space.dim()];
            e[i] = S::one();
            if !img.g.contains(&e) {
                let (j, o) = img.space.slots[i];
                missing.get_or_insert(format!("es(A{}, {}) not in the span", j + 1, fmt_order(&o)));
            }
        }
        r.push("contains-upper-slice", missing.is_none(), missing.unwrap_or_default());
        let qdim = img.g.dim() - img.bg.dim();
        r.push("quotient-rank", qdim == mu, format!("dim L/zL = {qdim}, expected {mu}"));
        let w = top.w;
        let mut pole = None;
        for i in 0..self.generators.len() {
            for j in 0..self.generators.len() {
                let p = top.pair(&self.generators[i], &self.generators[j]);
                if let Some(v) = p.cleaned().valuation() {
                    if v < w {
                        pole.get_or_insert(format!("P(v{}, v{}) has a z^{v} term", i + 1, j + 1));
                    }
                }
            }
        }
        r.push("pairing-pole-order", pole.is_none(), pole.unwrap_or_default());
        let basis: Vec<Section<S>> = img.quotient_basis().iter().map(|v| img.space.section(v)).collect();
        let pm = self.pairing_mod_z(&basis);
        let rank = pm.rank();
        r.push(
            "pairing-nondegenerate",
            rank == mu && basis.len() == mu,
            format!("pairing rank {rank} mod z (of {mu})"),
        );
        let mut conn = None;
        for (i, g) in self.generators.iter().enumerate() {
            let d = top.z2_nabla(g);
            if !self.contains_in(&img, &d) {
                conn.get_or_insert(format!("z^2 nabla v{} is not in L", i + 1));
            }
        }
        r.push("pole-order-2", conn.is_none(), conn.unwrap_or_default());
        r
    }

    /// Replace the generators by the canonical ones after validation.
    pub fn canonicalize(&self) -> Result<Lattice<S>> {
        let rep = self.validate_spanning();
        if !rep.ok() {
            let w: Vec<String> = rep.failures().map(|c| format!("{}: {}", c.name, c.witness)).collect();
            return Err(TerpError::InvalidLattice(w.join("; ")));
        }
        Ok(Lattice::new(self.top.clone(), self.window, self.canonical_generators()))
    }

    /// Validation without the generator count, so redundant generating sets are accepted.
    pub fn validate_spanning(&self) -> Report {
        let mut rep = self.validate();
        rep.checks.retain(|c| c.name != "rank");
        if rep.ok() {
            let canon = Lattice::new(self.top.clone(), self.window, self.canonical_generators());
            let again = canon.validate();
            rep.checks.retain(|c| c.name != "pairing-pole-order");
            rep.push(
                "pairing-pole-order",
                again.get("pairing-pole-order").is_some_and(|c| c.passed),
                again.get("pairing-pole-order").map(|c| c.witness.clone()).unwrap_or_default(),
            );
        }
        rep
    }

    /// Equality of the lattices as ℂ[z]-modules (both assumed valid, same window).
    pub fn same_lattice(&self, o: &Lattice<S>) -> bool {
        self.window == o.window && self.window_image().g == o.window_image().g
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Lattice<T> {
        Lattice {
            top: self.top.clone(),
            window: self.window,
            generators: self.generators.iter().map(|g| g.map(&f)).collect(),
        }
    }
}

/// Helper for exact rationals in tests and corpora.
pub fn q(p: i64, d: i64) -> Order {
    Order::new(p, d)
}

/// Integer part as i64 of a rational known to be integral.
pub fn to_int(o: &Order) -> i64 {
    debug_assert!(o.is_integer());
    o.numer().div_floor(o.denom())
}
