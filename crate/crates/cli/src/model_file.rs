//! JSON model files: topological data, a spectral window, parameterized generators and named families.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use terp_core::limits::{Direction, ParamFamily, PolySection, ScanFamily};
use terp_core::poly::parse_expr;
use terp_core::scalar::parse_rational;
use terp_core::{GaussQ, Mat, MPoly, SpectralWindow, TopologicalData};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
    pub topological_data: TopFile,
    pub window: WindowFile,
    /// Names that may appear in generator coefficients.
    #[serde(default)]
    pub parameters: Vec<String>,
    pub lattice: LatticeFile,
    #[serde(default)]
    pub families: Vec<FamilyFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopFile {
    pub mu: usize,
    pub w: i64,
    pub exponents: Vec<String>,
    pub nilpotent: Vec<Vec<String>>,
    pub conjugation: Vec<Vec<String>>,
    pub pairing: Vec<PairingEntry>,
    #[serde(rename = "S", default)]
    pub s: Option<Vec<Vec<String>>>,
}

/// P(s_i, s_j) = coeff · z^exponent on reference sections, 1-based indices.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingEntry {
    pub i: usize,
    pub j: usize,
    pub coeff: String,
    pub exponent: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowFile {
    pub alpha1: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub generators: Vec<Vec<TermFile>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub basis: usize,
    pub order: String,
    pub coeff: String,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum DirectionFile {
    Zero,
    Infinity,
}

/// A one-parameter family: `parameter` runs to 0 or ∞, the other parameters are
/// replaced by expressions in it (constants allowed).
#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub name: String,
    pub parameter: String,
    pub direction: DirectionFile,
    #[serde(default)]
    pub substitute: BTreeMap<String, String>,
}

/// A parsed and checked model.
#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    pub family: ScanFamily,
    pub families: Vec<FamilyFile>,
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn gauss(s: &str) -> Result<GaussQ, CliError> {
    s.parse::<GaussQ>().map_err(|e| input(format!("bad number {s:?}: {e}")))
}

fn matrix(rows: &[Vec<String>], mu: usize, what: &str) -> Result<Mat<GaussQ>, CliError> {
    if rows.len() != mu || rows.iter().any(|r| r.len() != mu) {
        return Err(input(format!("{what} must be a {mu}x{mu} matrix")));
    }
    let rows = rows.iter().map(|r| r.iter().map(|s| gauss(s)).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
    Ok(Mat::from_rows(rows))
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<ModelFile, CliError> {
        serde_json::from_str(text).map_err(|e| input(format!("model file: {e}")))
    }

    pub fn into_model(self) -> Result<Model, CliError> {
        let t = &self.topological_data;
        let mu = t.mu;
        if mu == 0 {
            return Err(input("mu must be positive"));
        }
        if t.exponents.len() != mu {
            return Err(input(format!("expected {mu} exponents, got {}", t.exponents.len())));
        }
        let exponents = t
            .exponents
            .iter()
            .map(|s| parse_rational(s).map_err(|e| input(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let mut pairing = BTreeMap::new();
        for e in &t.pairing {
            if e.i == 0 || e.j == 0 || e.i > mu || e.j > mu {
                return Err(input(format!("pairing index ({}, {}) out of range 1..={mu}", e.i, e.j)));
            }
            if pairing.insert((e.i - 1, e.j - 1), (gauss(&e.coeff)?, e.exponent)).is_some() {
                return Err(input(format!("duplicate pairing entry ({}, {})", e.i, e.j)));
            }
        }
        let top = Arc::new(TopologicalData {
            mu,
            w: t.w,
            exponents,
            nilpotent: matrix(&t.nilpotent, mu, "nilpotent")?,
            conjugation: matrix(&t.conjugation, mu, "conjugation")?,
            pairing,
            s_form: t.s.as_ref().map(|s| matrix(s, mu, "S")).transpose()?,
        });
        let alpha1 = parse_rational(&self.window.alpha1).map_err(|e| input(e.to_string()))?;
        let window = SpectralWindow::new(&top, alpha1).map_err(|e| input(e.to_string()))?;

        let mut seen = Vec::new();
        for p in &self.parameters {
            if p == "i" || p == "z" || p.is_empty() || !p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(input(format!("invalid parameter name {p:?}")));
            }
            if seen.contains(p) {
                return Err(input(format!("duplicate parameter {p:?}")));
            }
            seen.push(p.clone());
        }
        let names: Vec<&str> = self.parameters.iter().map(|s| s.as_str()).collect();
        if self.lattice.generators.is_empty() {
            return Err(input("lattice has no generators"));
        }
        let mut generators = Vec::new();
        for (k, g) in self.lattice.generators.iter().enumerate() {
            if g.is_empty() {
                return Err(input(format!("generator {} has no terms", k + 1)));
            }
            let mut s = PolySection::new();
            for term in g {
                if term.basis == 0 || term.basis > mu {
                    return Err(input(format!("basis index {} out of range 1..={mu}", term.basis)));
                }
                let j = term.basis - 1;
                let o = parse_rational(&term.order).map_err(|e| input(e.to_string()))?;
                if !top.order_ok(j, &o) {
                    return Err(input(format!(
                        "order {} is not congruent to the exponent of A{} mod 1",
                        term.order, term.basis
                    )));
                }
                let c = parse_expr(&term.coeff, &names).map_err(|e| input(e.to_string()))?;
                let e = s.entry((j, o)).or_insert_with(|| MPoly::zero(names.len()));
                *e = e.add(&c);
            }
            s.retain(|_, c| !c.is_zero());
            generators.push(s);
        }
        let family = ScanFamily { top, window, params: self.parameters.clone(), generators };

        let mut fnames = Vec::new();
        for f in &self.families {
            if fnames.contains(&f.name) {
                return Err(input(format!("duplicate family {:?}", f.name)));
            }
            fnames.push(f.name.clone());
            if !self.parameters.contains(&f.parameter) {
                return Err(input(format!("family {:?}: unknown parameter {:?}", f.name, f.parameter)));
            }
            for (k, expr) in &f.substitute {
                if !self.parameters.contains(k) || *k == f.parameter {
                    return Err(input(format!("family {:?}: cannot substitute {k:?}", f.name)));
                }
                let p = parse_expr(expr, &names).map_err(|e| input(e.to_string()))?;
                if (0..names.len()).any(|i| names[i] != f.parameter && p.involves(i)) {
                    return Err(input(format!(
                        "family {:?}: {k} = {expr} may only involve {}",
                        f.name, f.parameter
                    )));
                }
            }
        }
        Ok(Model {
            name: self.name.unwrap_or_else(|| "model".into()),
            family,
            families: self.families,
        })
    }
}

impl Model {
    pub fn load(path: &Path) -> Result<Model, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
        ModelFile::parse(&text)?.into_model()
    }

    pub fn from_json(text: &str) -> Result<Model, CliError> {
        ModelFile::parse(text)?.into_model()
    }

    pub fn params(&self) -> &[String] {
        &self.family.params
    }

    /// Values for all parameters, in declaration order.
    pub fn point_values<T: Clone>(&self, point: &[(String, T)]) -> Result<Vec<T>, CliError> {
        for (k, _) in point {
            if !self.params().contains(k) {
                return Err(input(format!("unknown parameter {k:?}")));
            }
        }
        self.params()
            .iter()
            .map(|p| {
                point
                    .iter()
                    .rev()
                    .find(|(k, _)| k == p)
                    .map(|(_, v)| v.clone())
                    .ok_or_else(|| input(format!("parameter {p} needs a value (--point {p}=...)")))
            })
            .collect()
    }

    /// The named one-parameter family; parameters not substituted by the file are taken from `point`.
    pub fn param_family(&self, name: &str, point: &[(String, GaussQ)]) -> Result<ParamFamily, CliError> {
        let f = self
            .families
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| {
                let known: Vec<&str> = self.families.iter().map(|f| f.name.as_str()).collect();
                input(format!("no family {name:?} (known: {})", known.join(", ")))
            })?;
        let names: Vec<&str> = self.params().iter().map(|s| s.as_str()).collect();
        let mut fam = self.family.clone();
        for (k, expr) in &f.substitute {
            let p = parse_expr(expr, &names).map_err(|e| input(e.to_string()))?;
            fam = fam.substitute(k, &p).map_err(|e| input(e.to_string()))?;
        }
        let mut fixed = Vec::new();
        for p in self.params() {
            if *p == f.parameter || f.substitute.contains_key(p) {
                continue;
            }
            let v = point
                .iter()
                .rev()
                .find(|(k, _)| k == p)
                .ok_or_else(|| input(format!("family {name}: parameter {p} needs a value (--point {p}=...)")))?;
            fixed.push((p.as_str(), v.1.clone()));
        }
        let dir = match f.direction {
            DirectionFile::Zero => Direction::Zero,
            DirectionFile::Infinity => Direction::Infinity,
        };
        fam.restrict(&f.parameter, &fixed, dir).map_err(|e| input(e.to_string()))
    }
}
