//! Scalar fields: exact Gaussian rationals and tolerance-guarded complex doubles.

use std::cell::Cell;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::TerpError;

/// Default relative tolerance for approximate rank decisions.
pub const DEFAULT_EPS: f64 = 1e-9;

thread_local! {
    static EPS: Cell<f64> = const { Cell::new(DEFAULT_EPS) };
}

/// Tolerance currently in force on this thread.
pub fn current_eps() -> f64 {
    EPS.with(|e| e.get())
}

/// Run `f` with the approximate tolerance set to `eps`, restoring the old value afterwards.
pub fn with_eps<R>(eps: f64, f: impl FnOnce() -> R) -> R {
    let old = EPS.with(|e| e.replace(eps));
    struct Restore(f64);
    impl Drop for Restore {
        fn drop(&mut self) {
            EPS.with(|e| e.set(self.0));
        }
    }
    let _guard = Restore(old);
    f()
}

/// Field operations shared by the exact and approximate modes.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn imag_unit() -> Self;
    fn from_gauss(q: &GaussQ) -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(q: Rational64) -> Self {
        Self::from_gauss(&GaussQ::from_ratio64(q))
    }
    fn conj(&self) -> Self;
    fn magnitude(&self) -> f64;
    /// Zero test. Exact scalars ignore `scale`; approximate ones compare against `eps * scale`.
    fn negligible(&self, scale: f64) -> bool;
    /// Sign of the real part, with the same tolerance rule as [`Scalar::negligible`].
    fn real_sign(&self, scale: f64) -> i32;
    fn is_exact_zero(&self) -> bool;
    fn pow_i(&self, k: i64) -> Self {
        let mut acc = Self::one();
        let base = if k < 0 { Self::one() / self.clone() } else { self.clone() };
        for _ in 0..k.unsigned_abs() {
            acc = acc * base.clone();
        }
        acc
    }
    /// Powers of i by exponent mod 4.
    fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::imag_unit(),
            2 => -Self::one(),
            _ => -Self::imag_unit(),
        }
    }
    fn to_complex(&self) -> Complex64;
}

/// Gaussian rational `re + im*i` with arbitrary precision parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GaussQ {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussQ {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussQ { re, im }
    }
    pub fn real(re: BigRational) -> Self {
        GaussQ { re, im: BigRational::zero() }
    }
    pub fn int(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }
    pub fn frac(p: i64, q: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }
    pub fn cplx(re: (i64, i64), im: (i64, i64)) -> Self {
        GaussQ {
            re: BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
            im: BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
        }
    }
    pub fn i() -> Self {
        GaussQ { re: BigRational::zero(), im: BigRational::one() }
    }
    pub fn from_ratio64(q: Rational64) -> Self {
        Self::real(BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom())))
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
    pub fn conjugate(&self) -> Self {
        GaussQ { re: self.re.clone(), im: -self.im.clone() }
    }
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }
    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        GaussQ { re: &self.re / &n, im: -(&self.im / &n) }
    }
}

impl fmt::Display for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |im: &BigRational| -> String {
            if im.is_one() {
                "i".to_string()
            } else {
                format!("{}*i", im)
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => {
                if self.im.is_negative() {
                    write!(f, "-{}", im_part(&-self.im.clone()))
                } else {
                    write!(f, "{}", im_part(&self.im))
                }
            }
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}-{}", self.re, im_part(&-self.im.clone()))
                } else {
                    write!(f, "{}+{}", self.re, im_part(&self.im))
                }
            }
        }
    }
}

impl FromStr for GaussQ {
    type Err = TerpError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let p = crate::poly::parse_expr(s, &[])?;
        p.constant_value()
            .ok_or_else(|| TerpError::Parse(format!("not a constant: {s}")))
    }
}

// Zero shortcuts: most entries are real or zero, and every BigRational op pays for a gcd.
fn radd(a: BigRational, b: BigRational) -> BigRational {
    if b.is_zero() {
        a
    } else if a.is_zero() {
        b
    } else {
        a + b
    }
}
fn rmul(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_zero() || b.is_zero() {
        BigRational::zero()
    } else if a.is_one() {
        b.clone()
    } else if b.is_one() {
        a.clone()
    } else {
        a * b
    }
}

impl Add for GaussQ {
    type Output = GaussQ;
    fn add(self, o: GaussQ) -> GaussQ {
        GaussQ { re: radd(self.re, o.re), im: radd(self.im, o.im) }
    }
}
impl Sub for GaussQ {
    type Output = GaussQ;
    fn sub(self, o: GaussQ) -> GaussQ {
        GaussQ { re: radd(self.re, -o.re), im: radd(self.im, -o.im) }
    }
}
impl Mul for GaussQ {
    type Output = GaussQ;
    fn mul(self, o: GaussQ) -> GaussQ {
        GaussQ {
            re: radd(rmul(&self.re, &o.re), -rmul(&self.im, &o.im)),
            im: radd(rmul(&self.re, &o.im), rmul(&self.im, &o.re)),
        }
    }
}
impl Div for GaussQ {
    type Output = GaussQ;
    fn div(self, o: GaussQ) -> GaussQ {
        assert!(!o.is_zero(), "division by zero");
        self * o.inv()
    }
}
impl Neg for GaussQ {
    type Output = GaussQ;
    fn neg(self) -> GaussQ {
        GaussQ { re: -self.re, im: -self.im }
    }
}

impl Scalar for GaussQ {
    const EXACT: bool = true;
    fn zero() -> Self {
        GaussQ::default()
    }
    fn one() -> Self {
        GaussQ::int(1)
    }
    fn imag_unit() -> Self {
        GaussQ::i()
    }
    fn from_gauss(q: &GaussQ) -> Self {
        q.clone()
    }
    fn from_i64(n: i64) -> Self {
        GaussQ::int(n)
    }
    fn conj(&self) -> Self {
        self.conjugate()
    }
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
    fn real_sign(&self, _scale: f64) -> i32 {
        if self.re.is_positive() {
            1
        } else if self.re.is_negative() {
            -1
        } else {
            0
        }
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn to_complex(&self) -> Complex64 {
        self.to_c64()
    }
}

/// Complex double whose zero tests use the thread's relative tolerance.
#[derive(Clone, Copy, PartialEq, Debug, Default)]
pub struct Approx(pub Complex64);

impl Approx {
    pub fn new(re: f64, im: f64) -> Self {
        Approx(Complex64::new(re, im))
    }
}

impl fmt::Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.im == 0.0 {
            write!(f, "{}", self.0.re)
        } else {
            write!(f, "{}{:+}*i", self.0.re, self.0.im)
        }
    }
}

impl Add for Approx {
    type Output = Approx;
    fn add(self, o: Approx) -> Approx {
        Approx(self.0 + o.0)
    }
}
impl Sub for Approx {
    type Output = Approx;
    fn sub(self, o: Approx) -> Approx {
        Approx(self.0 - o.0)
    }
}
impl Mul for Approx {
    type Output = Approx;
    fn mul(self, o: Approx) -> Approx {
        Approx(self.0 * o.0)
    }
}
impl Div for Approx {
    type Output = Approx;
    fn div(self, o: Approx) -> Approx {
        Approx(self.0 / o.0)
    }
}
impl Neg for Approx {
    type Output = Approx;
    fn neg(self) -> Approx {
        Approx(-self.0)
    }
}

impl Scalar for Approx {
    const EXACT: bool = false;
    fn zero() -> Self {
        Approx(Complex64::new(0.0, 0.0))
    }
    fn one() -> Self {
        Approx(Complex64::new(1.0, 0.0))
    }
    fn imag_unit() -> Self {
        Approx(Complex64::new(0.0, 1.0))
    }
    fn from_gauss(q: &GaussQ) -> Self {
        Approx(q.to_c64())
    }
    fn from_i64(n: i64) -> Self {
        Approx(Complex64::new(n as f64, 0.0))
    }
    fn conj(&self) -> Self {
        Approx(self.0.conj())
    }
    fn magnitude(&self) -> f64 {
        self.0.norm()
    }
    fn negligible(&self, scale: f64) -> bool {
        self.0.norm() <= current_eps() * scale
    }
    fn real_sign(&self, scale: f64) -> i32 {
        if self.0.re.abs() <= current_eps() * scale {
            0
        } else if self.0.re > 0.0 {
            1
        } else {
            -1
        }
    }
    fn is_exact_zero(&self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }
    fn to_complex(&self) -> Complex64 {
        self.0
    }
}

/// Parse a rational written as `p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational64, TerpError> {
    let s = s.trim();
    let bad = || TerpError::Parse(format!("bad rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
        None => Ok(Rational64::from_integer(s.parse().map_err(|_| bad())?)),
    }
}
