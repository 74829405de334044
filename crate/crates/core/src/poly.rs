//! Multivariate Laurent polynomials over Gaussian rationals, plus an expression parser.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;

use crate::error::{Result, TerpError};
use crate::laurent::Laurent;
use crate::scalar::{GaussQ, Scalar};

/// Laurent polynomial in `nvars` variables; exponent vectors may be negative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i32>, GaussQ>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }
    pub fn constant(nvars: usize, c: GaussQ) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, GaussQ::int(1));
        p
    }
    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn add_term(&mut self, e: Vec<i32>, c: GaussQ) {
        assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&e) {
            Some(old) => old + c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(e, v);
        }
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &GaussQ)> {
        self.terms.iter()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn constant_value(&self) -> Option<GaussQ> {
        match self.terms.len() {
            0 => Some(GaussQ::int(0)),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }
    pub fn neg(&self) -> Self {
        self.scale(&GaussQ::int(-1))
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn scale(&self, c: &GaussQ) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, x) in &self.terms {
            r.add_term(e.clone(), x.clone() * c.clone());
        }
        r
    }
    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let e = a.iter().zip(b).map(|(p, q)| p + q).collect();
                r.add_term(e, x.clone() * y.clone());
            }
        }
        r
    }
    /// Integer power; negative powers only for monomials.
    pub fn pow(&self, k: i64) -> Result<Self> {
        if k >= 0 {
            let mut r = Self::constant(self.nvars, GaussQ::int(1));
            for _ in 0..k {
                r = r.mul(self);
            }
            return Ok(r);
        }
        if self.terms.len() != 1 {
            return Err(TerpError::Parse("negative power of a non-monomial".into()));
        }
        let (e, c) = self.terms.iter().next().unwrap();
        let mut r = Self::zero(self.nvars);
        let kk = (-k) as i32;
        r.add_term(e.iter().map(|x| -x * kk).collect(), c.inv().pow_i(-k));
        Ok(r)
    }
    pub fn conj(&self) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            r.add_term(e.clone(), c.conjugate());
        }
        r
    }
    /// Whether variable `i` occurs.
    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] != 0)
    }
    pub fn eval<S: Scalar>(&self, x: &[S]) -> S {
        assert_eq!(x.len(), self.nvars);
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut t = S::from_gauss(c);
            for (xi, &k) in x.iter().zip(e) {
                if k != 0 {
                    t = t * xi.pow_i(k as i64);
                }
            }
            acc = acc + t;
        }
        acc
    }
    /// Replace variable `i` by `q`. Negative powers of `i` need `q` to be a monomial.
    pub fn substitute(&self, i: usize, q: &MPoly) -> Result<Self> {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            rest[i] = 0;
            let mut t = MPoly::zero(self.nvars);
            t.add_term(rest, c.clone());
            r = r.add(&t.mul(&q.pow(e[i] as i64)?));
        }
        Ok(r)
    }
    /// Set variables to constants, keeping the variable count.
    pub fn specialize(&self, vals: &[(usize, GaussQ)]) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            let mut c = c.clone();
            for (i, v) in vals {
                c = c * v.pow_i(e[*i] as i64);
                e[*i] = 0;
            }
            r.add_term(e, c);
        }
        r
    }
    pub fn derivative(&self, i: usize) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[i] -= 1;
            r.add_term(f, c.clone() * GaussQ::int(e[i] as i64));
        }
        r
    }
    /// View as a univariate Laurent polynomial in variable `i`, if no other variable occurs.
    pub fn to_laurent(&self, i: usize) -> Option<Laurent<GaussQ>> {
        let mut l = Laurent::zero();
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(j, &k)| j != i && k != 0) {
                return None;
            }
            l.add_term(e[i] as i64, c.clone());
        }
        Some(l)
    }
    pub fn from_laurent(nvars: usize, i: usize, l: &Laurent<GaussQ>) -> Self {
        let mut r = Self::zero(nvars);
        for (k, c) in l.terms() {
            let mut e = vec![0; nvars];
            e[i] = k as i32;
            r.add_term(e, c.clone());
        }
        r
    }
    /// Embed into a ring with more variables; variable j goes to `map[j]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Self {
        let mut r = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut f = vec![0; nvars];
            for (j, &k) in e.iter().enumerate() {
                f[map[j]] += k;
            }
            r.add_term(f, c.clone());
        }
        r
    }
    pub fn display(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (n, (e, c)) in self.terms.iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != 0)
                .map(|(j, &k)| if k == 1 { names[j].clone() } else { format!("{}^{}", names[j], k) })
                .collect();
            let cs = c.to_string();
            let (neg, body) = match cs.strip_prefix('-') {
                Some(b) if c.is_real() || c.re.is_zero() => (true, b.to_string()),
                _ => (false, cs.clone()),
            };
            let paren = !c.is_real() && !c.re.is_zero();
            let coef = if paren { format!("({body})") } else { body };
            if n == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if mono.is_empty() {
                s.push_str(&coef);
            } else {
                if coef != "1" {
                    let _ = write!(s, "{coef}*");
                }
                s.push_str(&mono.join("*"));
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(u64),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            if i < cs.len() && cs[i] == '.' {
                return Err(TerpError::Parse(format!("floating literal in {s:?}; use p/q")));
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().map_err(|_| TerpError::Parse(format!("number too large: {t}")))?));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(TerpError::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    names: &'a [&'a str],
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn err(&self, msg: &str) -> TerpError {
        TerpError::Parse(format!("{msg} in {:?}", self.src))
    }
    fn expr(&mut self) -> Result<MPoly> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { acc.add(&t) } else { acc.sub(&t) };
        }
        Ok(acc)
    }
    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().cloned() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let d = self.unary()?;
                    acc = acc.mul(&d.pow(-1).map_err(|_| self.err("division by a non-monomial"))?);
                }
                // implicit product such as 2i or 3r
                Some(Tok::Ident(_)) | Some(Tok::Op('(')) => acc = acc.mul(&self.power()?),
                _ => return Ok(acc),
            }
        }
    }
    fn unary(&mut self) -> Result<MPoly> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }
    fn power(&mut self) -> Result<MPoly> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let mut sign = 1i64;
            let mut paren = false;
            if let Some(Tok::Op('(')) = self.peek() {
                paren = true;
                self.pos += 1;
            }
            if let Some(Tok::Op('-')) = self.peek() {
                sign = -1;
                self.pos += 1;
            }
            let k = match self.peek() {
                Some(Tok::Num(k)) => *k as i64,
                _ => return Err(self.err("expected integer exponent")),
            };
            self.pos += 1;
            if paren {
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
            }
            return base.pow(sign * k).map_err(|e| self.err(&e.to_string()));
        }
        Ok(base)
    }
    fn atom(&mut self) -> Result<MPoly> {
        let n = self.names.len();
        let t = self.peek().cloned().ok_or_else(|| self.err("unexpected end"))?;
        self.pos += 1;
        match t {
            Tok::Num(k) => Ok(MPoly::constant(n, GaussQ::int(k as i64))),
            Tok::Ident(id) => {
                if let Some(j) = self.names.iter().position(|x| *x == id) {
                    Ok(MPoly::var(n, j))
                } else if id == "i" {
                    Ok(MPoly::constant(n, GaussQ::i()))
                } else {
                    Err(self.err(&format!("unknown symbol {id:?}")))
                }
            }
            Tok::Op('(') => {
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Tok::Op(c) => Err(self.err(&format!("unexpected {c:?}"))),
        }
    }
}

/// Parse an expression in the given variables. `i` is the imaginary unit unless declared as a name.
pub fn parse_expr(s: &str, names: &[&str]) -> Result<MPoly> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(TerpError::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, names, src: s };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_eval() {
        let p = parse_expr("r^2/2 + t - 3*i*r^-1", &["r", "t"]).unwrap();
        let v: GaussQ = p.eval(&[GaussQ::int(2), GaussQ::int(1)]);
        assert_eq!(v, GaussQ::cplx((3, 1), (-3, 2)));
        assert_eq!(parse_expr("2i", &[]).unwrap().constant_value(), Some(GaussQ::cplx((0, 1), (2, 1))));
        assert!(parse_expr("0.5", &[]).is_err());
        assert!(parse_expr("x", &["r"]).is_err());
        assert!(parse_expr("1/(1+r)", &["r"]).is_err());
    }

    #[test]
    fn substitute_monomial() {
        // y = w x^2
        let p = parse_expr("y*x^-1 + 1", &["x", "y", "w"]).unwrap();
        let q = parse_expr("w*x^2", &["x", "y", "w"]).unwrap();
        let s = p.substitute(1, &q).unwrap();
        assert_eq!(s, parse_expr("w*x + 1", &["x", "y", "w"]).unwrap());
    }

    #[test]
    fn display_roundtrip() {
        let names = vec!["r".to_string(), "t".to_string()];
        let p = parse_expr("-r^2/2 + (1+i)*t - 3", &["r", "t"]).unwrap();
        let s = p.display(&names);
        assert_eq!(parse_expr(&s, &["r", "t"]).unwrap(), p, "{s}");
    }
}
