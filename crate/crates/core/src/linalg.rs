//! Dense matrices, echelon forms, subspaces, weight filtrations and hermitian signatures.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Result, TerpError};
use crate::scalar::Scalar;

/// Row-major dense matrix acting on column vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows_n(rows, cols)
    }
    pub fn from_rows_n(rows: Vec<Vec<S>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r);
        }
        Mat { rows: n, cols, data }
    }
    pub fn from_cols(cols: Vec<Vec<S>>, nrows: usize) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, c) in cols.into_iter().enumerate() {
            for (i, x) in c.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }
    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, x: S) {
        self.data[i * self.cols + j] = x;
    }
    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }
    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn row_vecs(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn mul(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, o.rows);
        let mut m: Mat<S> = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_exact_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = m.get(i, j).clone() + a.clone() * o.get(k, j).clone();
                    m.set(i, j, v);
                }
            }
        }
        m
    }
    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], v))
            .collect()
    }
    pub fn transpose(&self) -> Mat<S> {
        let mut m = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }
    pub fn conj(&self) -> Mat<S> {
        self.map(|x| x.conj())
    }
    pub fn adjoint(&self) -> Mat<S> {
        self.transpose().conj()
    }
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
    pub fn add(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }
    pub fn sub(&self, o: &Mat<S>) -> Mat<S> {
        self.add(&o.scale(&-S::one()))
    }
    pub fn scale(&self, c: &S) -> Mat<S> {
        self.map(|x| x.clone() * c.clone())
    }
    pub fn pow(&self, k: usize) -> Mat<S> {
        let mut m = Mat::identity(self.rows);
        for _ in 0..k {
            m = m.mul(self);
        }
        m
    }
    pub fn max_mag(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }
    /// All entries negligible relative to `scale`.
    pub fn is_zero_rel(&self, scale: f64) -> bool {
        self.data.iter().all(|x| x.negligible(scale))
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_exact_zero())
    }
    pub fn approx_eq(&self, o: &Mat<S>) -> bool {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return false;
        }
        let scale = self.max_mag().max(o.max_mag()).max(1.0);
        self.sub(o).is_zero_rel(scale)
    }
    pub fn rank(&self) -> usize {
        echelon(&self.row_vecs(), self.cols).pivots.len()
    }
    /// Null space as a subspace of the column space.
    pub fn kernel(&self) -> Subspace<S> {
        kernel_of_rows(&self.row_vecs(), self.cols)
    }
    /// Column space.
    pub fn image(&self) -> Subspace<S> {
        Subspace::span(self.rows, (0..self.cols).map(|j| self.col(j)).collect())
    }
    pub fn is_nilpotent(&self) -> bool {
        let n = self.rows;
        let scale = self.max_mag().max(1.0).powi(n as i32);
        self.pow(n).is_zero_rel(scale)
    }
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Mat<S> {
        let mut m = Mat::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }
    /// Inverse, or `None` when singular.
    pub fn inverse(&self) -> Option<Mat<S>> {
        let n = self.rows;
        let aug: Vec<Vec<S>> = (0..n)
            .map(|i| {
                let mut r = self.row(i);
                r.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
                r
            })
            .collect();
        let e = echelon(&aug, 2 * n);
        if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Mat::from_rows_n(e.rows.iter().map(|r| r[n..].to_vec()).collect(), n))
    }
}

impl<S: Scalar> fmt::Display for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_exact_zero() || y.is_exact_zero() {
            continue;
        }
        acc = acc + x.clone() * y.clone();
    }
    acc
}

pub fn max_mag_vecs<S: Scalar>(vs: &[Vec<S>]) -> f64 {
    vs.iter().flatten().map(|x| x.magnitude()).fold(0.0, f64::max)
}

/// Reduced row echelon form with leftmost pivots.
#[derive(Clone, Debug)]
pub struct Echelon<S> {
    pub rows: Vec<Vec<S>>,
    pub pivots: Vec<usize>,
    /// Smallest accepted pivot relative to the input scale (1.0 when nothing was close).
    pub min_pivot: f64,
}

pub fn echelon<S: Scalar>(vecs: &[Vec<S>], ncols: usize) -> Echelon<S> {
    let mut m: Vec<Vec<S>> = vecs.to_vec();
    // exact scalars ignore the scale, so skip the float conversions
    let scale = if S::EXACT {
        if m.iter().flatten().all(|x| x.is_exact_zero()) { 0.0 } else { 1.0 }
    } else {
        max_mag_vecs(&m)
    };
    let mut pivots = Vec::new();
    let mut min_pivot = f64::INFINITY;
    if scale == 0.0 {
        return Echelon { rows: vec![], pivots, min_pivot: 1.0 };
    }
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let mut best: Option<usize> = None;
        for k in r..m.len() {
            if m[k][c].negligible(scale) {
                continue;
            }
            match best {
                None => best = Some(k),
                Some(b) if !S::EXACT && m[k][c].magnitude() > m[b][c].magnitude() => best = Some(k),
                _ => {}
            }
            if S::EXACT {
                break;
            }
        }
        let Some(b) = best else {
            continue;
        };
        m.swap(r, b);
        let piv = m[r][c].clone();
        if !S::EXACT {
            min_pivot = min_pivot.min(piv.magnitude() / scale);
        }
        for k in r + 1..m.len() {
            if m[k][c].is_exact_zero() {
                continue;
            }
            let f = m[k][c].clone() / piv.clone();
            for j in c..ncols {
                if m[r][j].is_exact_zero() {
                    continue;
                }
                let v = m[k][j].clone() - f.clone() * m[r][j].clone();
                m[k][j] = v;
            }
            m[k][c] = S::zero();
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    // normalize and back-substitute
    for (i, &c) in pivots.iter().enumerate() {
        let inv = S::one() / m[i][c].clone();
        for j in 0..ncols {
            if !m[i][j].is_exact_zero() {
                m[i][j] = m[i][j].clone() * inv.clone();
            }
        }
        m[i][c] = S::one();
    }
    for i in (0..pivots.len()).rev() {
        let c = pivots[i];
        for k in 0..i {
            if m[k][c].is_exact_zero() {
                continue;
            }
            let f = m[k][c].clone();
            for j in c..ncols {
                if m[i][j].is_exact_zero() {
                    continue;
                }
                let v = m[k][j].clone() - f.clone() * m[i][j].clone();
                m[k][j] = v;
            }
            m[k][c] = S::zero();
        }
    }
    if !S::EXACT {
        // flush noise in pivot columns so canonical rows compare cleanly
        for (i, &c) in pivots.iter().enumerate() {
            for (k, row) in m.iter_mut().enumerate() {
                if k != i {
                    row[c] = S::zero();
                }
            }
        }
    }
    Echelon { rows: m, pivots, min_pivot: if min_pivot.is_finite() { min_pivot } else { 1.0 } }
}

fn kernel_of_rows<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> Subspace<S> {
    let e = echelon(rows, ncols);
    let mut basis = Vec::new();
    let mut is_piv = vec![false; ncols];
    for &p in &e.pivots {
        is_piv[p] = true;
    }
    for f in (0..ncols).filter(|&c| !is_piv[c]) {
        let mut v = vec![S::zero(); ncols];
        v[f] = S::one();
        for (i, &p) in e.pivots.iter().enumerate() {
            v[p] = -e.rows[i][f].clone();
        }
        basis.push(v);
    }
    Subspace::span(ncols, basis)
}

/// A linear subspace of S^ambient kept in canonical reduced echelon form.
#[derive(Clone, Debug)]
pub struct Subspace<S> {
    ambient: usize,
    basis: Vec<Vec<S>>,
    pivots: Vec<usize>,
}

impl<S: Scalar> PartialEq for Subspace<S> {
    fn eq(&self, o: &Self) -> bool {
        if self.ambient != o.ambient || self.dim() != o.dim() {
            return false;
        }
        if S::EXACT {
            self.basis == o.basis
        } else {
            o.contains_all(self)
        }
    }
}

impl<S: Scalar> Subspace<S> {
    pub fn span(ambient: usize, vecs: Vec<Vec<S>>) -> Self {
        for v in &vecs {
            assert_eq!(v.len(), ambient, "vector length differs from ambient dimension");
        }
        let e = echelon(&vecs, ambient);
        Subspace { ambient, basis: e.rows, pivots: e.pivots }
    }
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: vec![], pivots: vec![] }
    }
    pub fn full(ambient: usize) -> Self {
        Self::coordinate(ambient, &(0..ambient).collect::<Vec<_>>())
    }
    /// Span of the listed standard basis vectors.
    pub fn coordinate(ambient: usize, idx: &[usize]) -> Self {
        let vecs = idx
            .iter()
            .map(|&i| {
                let mut v = vec![S::zero(); ambient];
                v[i] = S::one();
                v
            })
            .collect();
        Self::span(ambient, vecs)
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[Vec<S>] {
        &self.basis
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    fn check(&self, o: &Self) -> Result<()> {
        if self.ambient != o.ambient {
            return Err(TerpError::DimensionMismatch(format!(
                "ambient {} vs {}",
                self.ambient, o.ambient
            )));
        }
        Ok(())
    }
    /// Remainder of `v` after reducing by the echelon basis.
    pub fn reduce(&self, v: &[S]) -> Vec<S> {
        let mut r = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let c = r[p].clone();
            if c.is_exact_zero() {
                continue;
            }
            for j in 0..self.ambient {
                if !row[j].is_exact_zero() {
                    r[j] = r[j].clone() - c.clone() * row[j].clone();
                }
            }
        }
        r
    }
    pub fn contains(&self, v: &[S]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let scale = v.iter().map(|x| x.magnitude()).fold(1.0, f64::max);
        self.reduce(v).iter().all(|x| x.negligible(scale))
    }
    pub fn contains_all(&self, o: &Self) -> bool {
        o.basis.iter().all(|v| self.contains(v))
    }
    /// Coefficients of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[S]) -> Option<Vec<S>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }
    pub fn sum(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut v = self.basis.clone();
        v.extend(o.basis.iter().cloned());
        Ok(Self::span(self.ambient, v))
    }
    /// Vectors y with x·y = 0 for every x in the subspace (bilinear, no conjugation).
    pub fn annihilator(&self) -> Self {
        kernel_of_rows(&self.basis, self.ambient)
    }
    pub fn intersect(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.annihilator().sum(&o.annihilator())?.annihilator())
    }
    /// M(self) for M with `M.cols == ambient`.
    pub fn image(&self, m: &Mat<S>) -> Result<Self> {
        if m.cols != self.ambient {
            return Err(TerpError::DimensionMismatch(format!(
                "matrix has {} columns, subspace ambient {}",
                m.cols, self.ambient
            )));
        }
        Ok(Self::span(m.rows, self.basis.iter().map(|v| m.mul_vec(v)).collect()))
    }
    /// {v : M v ∈ self}.
    pub fn preimage(&self, m: &Mat<S>) -> Result<Self> {
        if m.rows != self.ambient {
            return Err(TerpError::DimensionMismatch(format!(
                "matrix has {} rows, subspace ambient {}",
                m.rows, self.ambient
            )));
        }
        let ann = self.annihilator();
        let rows: Vec<Vec<S>> = ann
            .basis
            .iter()
            .map(|y| (0..m.cols).map(|j| dot(y, &m.col(j))).collect())
            .collect();
        Ok(kernel_of_rows(&rows, m.cols))
    }
    /// Image under a coordinate projection onto `idx`.
    pub fn project(&self, idx: &[usize]) -> Self {
        Self::span(
            idx.len(),
            self.basis.iter().map(|v| idx.iter().map(|&i| v[i].clone()).collect()).collect(),
        )
    }
    /// Complement basis: vectors of `self` independent modulo `sub`, chosen from the echelon rows.
    pub fn complement_in(&self, sub: &Self) -> Vec<Vec<S>> {
        let mut acc = sub.clone();
        let mut out = Vec::new();
        for v in &self.basis {
            if !acc.contains(v) {
                out.push(v.clone());
                acc = acc.sum(&Self::span(self.ambient, vec![v.clone()])).expect("same ambient");
            }
        }
        out
    }
}

/// Increasing filtration W_l indexed by integers, centered at `center`.
#[derive(Clone, Debug)]
pub struct WeightFiltration<S> {
    pub center: i64,
    ambient: usize,
    levels: BTreeMap<i64, Subspace<S>>,
}

impl<S: Scalar> WeightFiltration<S> {
    pub fn get(&self, l: i64) -> Subspace<S> {
        let (lo, hi) = (*self.levels.keys().next().unwrap(), *self.levels.keys().last().unwrap());
        if l < lo {
            Subspace::zero(self.ambient)
        } else if l > hi {
            Subspace::full(self.ambient)
        } else {
            self.levels[&l].clone()
        }
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    /// Range of levels outside of which the filtration is 0 or everything.
    pub fn range(&self) -> (i64, i64) {
        (*self.levels.keys().next().unwrap(), *self.levels.keys().last().unwrap())
    }
    pub fn gr_dim(&self, l: i64) -> usize {
        self.get(l).dim() - self.get(l - 1).dim()
    }
}

/// Monodromy weight filtration of a nilpotent N centered at `center`.
pub fn weight_filtration<S: Scalar>(n: &Mat<S>, center: i64) -> Result<WeightFiltration<S>> {
    if !n.is_square() {
        return Err(TerpError::ShapeMismatch("weight filtration needs a square matrix".into()));
    }
    if !n.is_nilpotent() {
        return Err(TerpError::NotNilpotent);
    }
    let d = n.rows;
    // N^k vanishes from k = nil on, so ker is everything and im is zero past it
    let mut powers = vec![Mat::identity(d)];
    while powers.len() <= d + 1 && !powers.last().unwrap().is_zero_rel(n.max_mag().max(1.0).powi(powers.len() as i32)) {
        let next = powers.last().unwrap().mul(n);
        powers.push(next);
    }
    let nil = powers.len() - 1;
    let ker: Vec<Subspace<S>> = powers.iter().map(|p| p.kernel()).collect();
    let im: Vec<Subspace<S>> = powers.iter().map(|p| p.image()).collect();
    // ker N^a ∩ im N^j, memoized
    let mut pieces: BTreeMap<(usize, usize), Subspace<S>> = BTreeMap::new();
    let kmax = d as i64;
    let mut levels = BTreeMap::new();
    for l in -kmax - 1..=kmax {
        let mut w = Subspace::zero(d);
        for j in 0.max(-l)..nil as i64 {
            let a = (l + j + 1).max(0) as usize;
            let j = j as usize;
            let piece = if a >= nil {
                im[j].clone()
            } else if a == 0 {
                continue;
            } else {
                match pieces.get(&(a, j)) {
                    Some(p) => p.clone(),
                    None => {
                        let p = ker[a].intersect(&im[j])?;
                        pieces.insert((a, j), p.clone());
                        p
                    }
                }
            };
            w = w.sum(&piece)?;
        }
        levels.insert(l + center, w);
    }
    Ok(WeightFiltration { center, ambient: d, levels })
}

/// Inertia of a hermitian form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
    pub corank: usize,
}

#[derive(Clone, Debug)]
pub struct SignatureInfo {
    pub sig: Signature,
    /// Smallest accepted pivot relative to the largest entry.
    pub min_pivot: f64,
    /// Sign of each pivot in elimination order.
    pub pivot_signs: Vec<i32>,
}

pub fn hermitian_signature<S: Scalar>(h: &Mat<S>) -> Result<Signature> {
    Ok(hermitian_signature_info(h)?.sig)
}

/// Congruence diagonalization with symmetric pivoting.
pub fn hermitian_signature_info<S: Scalar>(h: &Mat<S>) -> Result<SignatureInfo> {
    hermitian_signature_info_at(h, 0.0)
}

/// Like [`hermitian_signature_info`], but entries are judged against at least `reference`.
/// Without it a matrix of pure rounding noise would look nondegenerate.
pub fn hermitian_signature_info_at<S: Scalar>(h: &Mat<S>, reference: f64) -> Result<SignatureInfo> {
    if !h.is_square() {
        return Err(TerpError::ShapeMismatch("signature of a non-square matrix".into()));
    }
    let scale = h.max_mag().max(reference);
    if !h.sub(&h.adjoint()).is_zero_rel(scale.max(f64::MIN_POSITIVE)) {
        return Err(TerpError::NotHermitian);
    }
    let mut a = h.clone();
    let mut alive: Vec<usize> = (0..h.rows).collect();
    let (mut p, mut q) = (0, 0);
    let mut min_pivot = f64::INFINITY;
    let mut signs = Vec::new();
    let neg = |x: &S| x.negligible(scale);
    while !alive.is_empty() {
        // best diagonal pivot
        let mut piv: Option<usize> = None;
        for &i in &alive {
            let d = a.get(i, i);
            if d.real_sign(scale) == 0 {
                continue;
            }
            match piv {
                None => piv = Some(i),
                Some(b) if !S::EXACT && d.magnitude() > a.get(b, b).magnitude() => piv = Some(i),
                _ => {}
            }
            if S::EXACT {
                break;
            }
        }
        if piv.is_none() {
            // make a diagonal entry nonzero using an off-diagonal one
            let mut off: Option<(usize, usize)> = None;
            for &i in &alive {
                for &j in &alive {
                    if i != j && !neg(a.get(i, j)) {
                        let better = match off {
                            None => true,
                            Some((x, y)) => !S::EXACT && a.get(i, j).magnitude() > a.get(x, y).magnitude(),
                        };
                        if better {
                            off = Some((i, j));
                        }
                    }
                }
            }
            let Some((i, j)) = off else {
                break;
            };
            // e_i <- e_i + c e_j with c = conj(a_ij)
            let c = a.get(i, j).conj();
            let n = a.rows;
            for r in 0..n {
                let v = a.get(r, i).clone() + c.clone() * a.get(r, j).clone();
                a.set(r, i, v);
            }
            for col in 0..n {
                let v = a.get(i, col).clone() + c.conj() * a.get(j, col).clone();
                a.set(i, col, v);
            }
            piv = Some(i);
        }
        let k = piv.unwrap();
        let d = a.get(k, k).clone();
        let s = d.real_sign(scale);
        min_pivot = min_pivot.min(d.magnitude() / scale.max(f64::MIN_POSITIVE));
        if s > 0 {
            p += 1;
        } else {
            q += 1;
        }
        signs.push(s);
        alive.retain(|&x| x != k);
        for &i in &alive {
            for &j in &alive {
                let v = a.get(i, j).clone() - a.get(i, k).clone() * a.get(k, j).clone() / d.clone();
                a.set(i, j, v);
            }
        }
    }
    let corank = h.rows - p - q;
    Ok(SignatureInfo {
        sig: Signature { p, q, corank },
        min_pivot: if min_pivot.is_finite() { min_pivot } else { 1.0 },
        pivot_signs: signs,
    })
}
