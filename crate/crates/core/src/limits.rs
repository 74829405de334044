//! Parameter families of lattices, flat limits in the Grassmannian, and limit TERP-structures.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::classifying::{build_w_omega, lattice_of_point, window_image_of_point, GrassPoint, Membership, SymplecticModel};
use crate::error::{Result, TerpError};
use crate::laurent::Laurent;
use crate::linalg::{Mat, Subspace};
use crate::model::{Lattice, Order, Section, SpectralWindow, TopologicalData};
use crate::poly::MPoly;
use crate::report::Report;
use crate::scalar::{GaussQ, Scalar};

/// Generator coefficients keyed by (basis index, order).
pub type PolySection = BTreeMap<(usize, Order), MPoly>;
pub type LaurentSection = BTreeMap<(usize, Order), Laurent<GaussQ>>;

/// Multi-parameter family with polynomial coefficients.
#[derive(Clone, Debug)]
pub struct ScanFamily {
    pub top: Arc<TopologicalData>,
    pub window: SpectralWindow,
    pub params: Vec<String>,
    pub generators: Vec<PolySection>,
}

impl ScanFamily {
    pub fn param_index(&self, name: &str) -> Result<usize> {
        self.params
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| TerpError::InvalidInput(format!("unknown parameter {name}")))
    }

    pub fn eval<S: Scalar>(&self, vals: &[S]) -> Result<Lattice<S>> {
        if vals.len() != self.params.len() {
            return Err(TerpError::DimensionMismatch(format!(
                "{} values for {} parameters",
                vals.len(),
                self.params.len()
            )));
        }
        let gens = self
            .generators
            .iter()
            .map(|g| {
                let mut s = Section::zero();
                for (&(j, o), c) in g {
                    s.add_term(j, o, c.eval(vals));
                }
                s
            })
            .collect();
        Ok(Lattice::new(self.top.clone(), self.window, gens))
    }

    /// Replace a parameter by a polynomial in the parameters.
    pub fn substitute(&self, name: &str, expr: &MPoly) -> Result<ScanFamily> {
        let i = self.param_index(name)?;
        let mut out = self.clone();
        for g in &mut out.generators {
            for c in g.values_mut() {
                *c = c.substitute(i, expr)?;
            }
        }
        Ok(out)
    }

    /// One-parameter family in `param`, other parameters frozen.
    pub fn restrict(&self, param: &str, fixed: &[(&str, GaussQ)], direction: Direction) -> Result<ParamFamily> {
        let i = self.param_index(param)?;
        let mut vals = Vec::new();
        for (n, v) in fixed {
            vals.push((self.param_index(n)?, v.clone()));
        }
        let mut gens = Vec::new();
        for g in &self.generators {
            let mut out = LaurentSection::new();
            for (&k, c) in g {
                let c = c.specialize(&vals);
                let l = c.to_laurent(i).ok_or_else(|| {
                    TerpError::InvalidInput(format!("coefficient still depends on a parameter other than {param}"))
                })?;
                if !l.is_zero() {
                    out.insert(k, l);
                }
            }
            gens.push(out);
        }
        Ok(ParamFamily { top: self.top.clone(), window: self.window, generators: gens, direction })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Zero,
    Infinity,
}

/// One-parameter family over a punctured disc around r = 0 or r = ∞.
#[derive(Clone, Debug)]
pub struct ParamFamily {
    pub top: Arc<TopologicalData>,
    pub window: SpectralWindow,
    pub generators: Vec<LaurentSection>,
    pub direction: Direction,
}

fn eval_section<S: Scalar>(g: &LaurentSection, r: &S) -> Section<S> {
    let mut s = Section::zero();
    for (&(j, o), c) in g {
        s.add_term(j, o, c.map(|x| S::from_gauss(x)).eval(r));
    }
    s
}

impl ParamFamily {
    pub fn at<S: Scalar>(&self, r: &S) -> Lattice<S> {
        Lattice::new(self.top.clone(), self.window, self.generators.iter().map(|g| eval_section(g, r)).collect())
    }

    /// Coefficients in the local parameter s at the limit point (s = r or s = 1/r).
    pub fn local(&self) -> Vec<LaurentSection> {
        match self.direction {
            Direction::Zero => self.generators.clone(),
            Direction::Infinity => self
                .generators
                .iter()
                .map(|g| g.iter().map(|(k, l)| (*k, Laurent::from_terms(l.terms().map(|(e, c)| (-e, c.clone()))))).collect())
                .collect(),
        }
    }

    /// Largest absolute exponent of the parameter.
    pub fn degree_bound(&self) -> i64 {
        self.generators
            .iter()
            .flat_map(|g| g.values())
            .flat_map(|l| [l.valuation().unwrap_or(0).abs(), l.degree().unwrap_or(0).abs()])
            .max()
            .unwrap_or(0)
    }

    /// Same family written in its local parameter, with limit at 0.
    fn localized(&self) -> ParamFamily {
        ParamFamily { top: self.top.clone(), window: self.window, generators: self.local(), direction: Direction::Zero }
    }
}

/// The flat limit together with how far it gets into Λ_{a,b}.
#[derive(Clone, Debug)]
pub struct LimitPoint {
    pub point: GrassPoint<GaussQ>,
    pub membership: Membership,
}

type LRow = Vec<Laurent<GaussQ>>;

fn row_valuation(r: &LRow) -> Option<i64> {
    r.iter().filter_map(|l| l.valuation()).min()
}

fn eval_rows(rows: &[LRow], s: &GaussQ) -> Vec<Vec<GaussQ>> {
    rows.iter().map(|r| r.iter().map(|l| l.eval(s)).collect()).collect()
}

/// Rows of the W^ω images of the z-shifts of the generators, in the local parameter.
fn w_omega_rows(model: &SymplecticModel<GaussQ>, gens: &[LaurentSection]) -> Vec<LRow> {
    let space = &model.space;
    let hi = model.window.alpha_mu - 1;
    let mut rows = Vec::new();
    for g in gens {
        let Some(lo) = g.keys().map(|k| k.1).min() else { continue };
        let mut k = 0i64;
        while lo + k <= hi {
            let mut row = vec![Laurent::zero(); space.dim()];
            for (&(j, o), c) in g {
                if let Some(i) = space.index_of(j, o + k) {
                    row[i] = row[i].add(c);
                }
            }
            if row.iter().any(|l| !l.is_zero()) {
                rows.push(row);
            }
            k += 1;
        }
    }
    rows
}

const SAMPLES: [(i64, i64); 6] = [(3, 1), (-5, 2), (7, 3), (11, 1), (-13, 5), (17, 7)];

/// Flat limit of the family in Gr(m, W^ω) by valuation echelon saturation.
pub fn grassmann_limit(f: &ParamFamily) -> Result<LimitPoint> {
    let model = Arc::new(build_w_omega::<GaussQ>(f.top.clone(), f.window)?);
    let m = model.m;
    let d = model.dim();
    let all = w_omega_rows(&model, &f.local());
    // pick a sample where the rows have full generic rank
    let mut best: Option<(GaussQ, usize)> = None;
    for (p, q) in SAMPLES {
        let s = GaussQ::frac(p, q);
        let rk = Mat::from_rows_n(eval_rows(&all, &s), d).rank();
        if best.as_ref().is_none_or(|b| rk > b.1) {
            best = Some((s, rk));
        }
    }
    let (s0, rk) = best.unwrap();
    if rk != m {
        return Err(TerpError::LimitNotInWindow(format!("generic rank {rk}, expected {m}")));
    }
    let mut rows: Vec<LRow> = Vec::new();
    let mut cur = 0;
    for r in all {
        let mut trial = rows.clone();
        trial.push(r.clone());
        let rk = Mat::from_rows_n(eval_rows(&trial, &s0), d).rank();
        if rk > cur {
            rows = trial;
            cur = rk;
        }
        if cur == m {
            break;
        }
    }
    let bound = 4 * (f.degree_bound() + 2) * (m as i64 + 1) * (d as i64 + 1) + 16;
    for _ in 0..bound {
        for r in rows.iter_mut() {
            let v = row_valuation(r).expect("independent rows are nonzero");
            if v != 0 {
                *r = r.iter().map(|l| l.shift(-v)).collect();
            }
        }
        let lead: Vec<Vec<GaussQ>> = rows.iter().map(|r| r.iter().map(|l| l.coeff(0)).collect()).collect();
        let lm = Mat::from_rows_n(lead.clone(), d);
        if lm.rank() == m {
            let sub = Subspace::span(d, lead);
            let membership = model.membership(&sub)?;
            if membership == Membership::None {
                return Err(TerpError::NotLagrangian("flat limit is not isotropic".into()));
            }
            return Ok(LimitPoint { point: GrassPoint { model: model.clone(), subspace: sub }, membership });
        }
        let ker = lm.transpose().kernel();
        let c = &ker.basis()[0];
        let i = (0..m).rev().find(|&i| !c[i].is_zero()).unwrap();
        let mut comb = vec![Laurent::zero(); d];
        for (k, r) in rows.iter().enumerate() {
            if c[k].is_zero() {
                continue;
            }
            for (x, l) in comb.iter_mut().zip(r) {
                *x = x.add(&l.scale(&c[k]));
            }
        }
        rows[i] = comb;
    }
    Err(TerpError::Internal("saturation did not terminate".into()))
}

#[derive(Clone, Debug)]
pub enum LimitOutcome {
    Lattice(Lattice<GaussQ>),
    Degenerate { diagnosis: String, report: Option<Report> },
}

impl LimitOutcome {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, LimitOutcome::Degenerate { .. })
    }
}

/// Limit TERP-structure of a family, or a diagnosis of why the limit is not one.
pub fn limit_terp(f: &ParamFamily) -> Result<LimitOutcome> {
    let lp = grassmann_limit(f)?;
    let local = f.local();
    let holomorphic = local.iter().all(|g| g.values().all(|l| l.valuation().is_none_or(|v| v >= 0)));
    if holomorphic {
        // value of the given generating sheaf at the limit point
        let gens: Vec<Section<GaussQ>> = local
            .iter()
            .map(|g| {
                let mut s = Section::zero();
                for (&(j, o), l) in g {
                    s.add_term(j, o, l.coeff(0));
                }
                s
            })
            .filter(|s| !s.is_zero())
            .collect();
        let l0 = Lattice::new(f.top.clone(), f.window, gens);
        let lifted = window_image_of_point(&lp.point).g;
        if l0.window_image().g != lifted {
            let rep = l0.validate_spanning();
            let diagnosis = match rep.failures().next() {
                Some(c) => format!("{}: {}", c.name, c.witness),
                None => "value at the limit differs from the flat limit".into(),
            };
            return Ok(LimitOutcome::Degenerate { diagnosis, report: Some(rep) });
        }
    }
    match lp.membership {
        Membership::LambdaAB => {}
        Membership::LambdaB => {
            return Ok(LimitOutcome::Degenerate { diagnosis: "limit point is not a-invariant".into(), report: None })
        }
        _ => return Ok(LimitOutcome::Degenerate { diagnosis: "limit point is not b-invariant".into(), report: None }),
    }
    let l = match lattice_of_point(&lp.point) {
        Ok(l) => l,
        Err(TerpError::DegeneratePairing { rank, dim }) => {
            return Ok(LimitOutcome::Degenerate {
                diagnosis: format!("pairing-nondegenerate: pairing rank {rank} mod z (of {dim})"),
                report: None,
            })
        }
        Err(e) => return Err(e),
    };
    let rep = l.validate();
    if !rep.ok() {
        let c = rep.failures().next().unwrap();
        let diagnosis = format!("{}: {}", c.name, c.witness);
        return Ok(LimitOutcome::Degenerate { diagnosis, report: Some(rep) });
    }
    Ok(LimitOutcome::Lattice(l))
}

/// Checks z·∂_r v ∈ L for every generator at each sample value.
pub fn variation_check(f: &ParamFamily, samples: &[GaussQ]) -> Report {
    let mut rep = Report::new();
    for r in samples {
        let l = f.at(r);
        let img = l.window_image();
        let mut bad = None;
        for (i, g) in f.generators.iter().enumerate() {
            let dg: LaurentSection = g.iter().map(|(k, c)| (*k, c.derivative())).collect();
            let v = eval_section(&dg, r).mul_z();
            if !l.contains_in(&img, &v) {
                bad.get_or_insert(format!("z d/dr v{} is not in L", i + 1));
            }
        }
        rep.push(&format!("horizontal at r={r}"), bad.is_none(), bad.unwrap_or_default());
    }
    rep
}

/// Reparameterize by s ↦ s·u(s) in the local parameter; generators are rescaled by powers of u to stay polynomial.
pub fn reparameterize(f: &ParamFamily, u: &Laurent<GaussQ>) -> Result<ParamFamily> {
    if u.valuation().is_none_or(|v| v != 0) {
        return Err(TerpError::UnitVanishes(format!("u = {u} is not a unit at the limit point")));
    }
    let loc = f.localized();
    let mut u_pows: Vec<Laurent<GaussQ>> = vec![Laurent::constant(GaussQ::int(1))];
    let mut gens = Vec::new();
    for g in &loc.generators {
        let kmax = g.values().filter_map(|l| l.valuation()).map(|v| -v).max().unwrap_or(0).max(0);
        let mut out = LaurentSection::new();
        for (&key, c) in g {
            // Σ c_e s^e ↦ Σ c_e s^e u^{e+K}
            let mut acc = Laurent::zero();
            for (e, x) in c.terms() {
                let p = (e + kmax) as usize;
                while u_pows.len() <= p {
                    let next = u_pows.last().unwrap().mul(u);
                    u_pows.push(next);
                }
                acc = acc.add(&u_pows[p].shift(e).scale(x));
            }
            if !acc.is_zero() {
                out.insert(key, acc);
            }
        }
        gens.push(out);
    }
    Ok(ParamFamily { top: f.top.clone(), window: f.window, generators: gens, direction: Direction::Zero })
}

pub fn limit_reparam_invariance(f: &ParamFamily, u: &Laurent<GaussQ>) -> Result<bool> {
    let g = reparameterize(f, u)?;
    let a = grassmann_limit(&f.localized())?;
    let b = grassmann_limit(&g)?;
    Ok(a.point == b.point)
}
