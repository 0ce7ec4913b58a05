//! Complex scalar arithmetic in two modes: exact (arbitrary-precision
//! rationals for real and imaginary part) and approximate (binary64).
//!
//! Every coefficient flowing through the engine is a [`Scalar`]. Exact
//! arithmetic is closed under `+ - * /` with canonically reduced fractions;
//! mixing an exact value with an approximate one demotes the result to
//! approximate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::Error;

/// Default absolute tolerance for approximate comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Exact complex rational: `re + im * i` with arbitrary-precision parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        ExactComplex { re, im }
    }

    pub fn zero() -> Self {
        ExactComplex::new(BigRational::zero(), BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        ExactComplex::new(self.re.clone(), -self.im.clone())
    }

    /// |z|^2 as an exact rational.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sq();
        Some(ExactComplex::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Complex scalar in exact or approximate mode.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(ExactComplex),
    Approx { re: f64, im: f64 },
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(ExactComplex::zero())
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn i() -> Self {
        Scalar::Exact(ExactComplex::new(BigRational::zero(), BigRational::one()))
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(ExactComplex::new(
            BigRational::from_integer(BigInt::from(n)),
            BigRational::zero(),
        ))
    }

    /// Exact rational `p/q`. Panics on `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Scalar::Exact(ExactComplex::new(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            BigRational::zero(),
        ))
    }

    /// Exact complex `p/q + r/s i`.
    pub fn complex_ratio(p: i64, q: i64, r: i64, s: i64) -> Self {
        assert!(q != 0 && s != 0, "zero denominator");
        Scalar::Exact(ExactComplex::new(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            BigRational::new(BigInt::from(r), BigInt::from(s)),
        ))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::Exact(ExactComplex::new(r, BigRational::zero()))
    }

    pub fn from_exact(z: ExactComplex) -> Self {
        Scalar::Exact(z)
    }

    pub fn approx(re: f64, im: f64) -> Self {
        Scalar::Approx { re, im }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.is_zero(),
            Scalar::Approx { re, im } => *re == 0.0 && *im == 0.0,
        }
    }

    /// Absolute-tolerance zero test (exact values are tested exactly).
    pub fn is_zero_tol(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(z) => z.is_zero(),
            Scalar::Approx { re, im } => re.abs() <= tol && im.abs() <= tol,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(z) => Scalar::Exact(z.conj()),
            Scalar::Approx { re, im } => Scalar::Approx { re: *re, im: -im },
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        match self {
            Scalar::Exact(z) => z.to_f64(),
            Scalar::Approx { re, im } => (*re, *im),
        }
    }

    pub fn to_approx(&self) -> Self {
        let (re, im) = self.to_f64();
        Scalar::Approx { re, im }
    }

    pub fn abs(&self) -> f64 {
        let (re, im) = self.to_f64();
        re.hypot(im)
    }

    /// i^k for any integer k.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Scalar::from_int(1),
            1 => Scalar::i(),
            2 => Scalar::from_int(-1),
            _ => -Scalar::i(),
        }
    }

    pub fn inv(&self) -> Result<Self, Error> {
        match self {
            Scalar::Exact(z) => z
                .inv()
                .map(Scalar::Exact)
                .ok_or(Error::DivisionByZero),
            Scalar::Approx { re, im } => {
                let n = re * re + im * im;
                if n == 0.0 {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Scalar::Approx { re: re / n, im: -im / n })
                }
            }
        }
    }

    /// Integer power (negative exponents via inversion).
    pub fn powi(&self, k: i64) -> Result<Self, Error> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = Scalar::one();
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Real part as a (real) scalar.
    pub fn re_part(&self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::from_rational(z.re.clone()),
            Scalar::Approx { re, .. } => Scalar::approx(*re, 0.0),
        }
    }

    /// Imaginary part as a (real) scalar.
    pub fn im_part(&self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::from_rational(z.im.clone()),
            Scalar::Approx { im, .. } => Scalar::approx(*im, 0.0),
        }
    }

    /// True when the imaginary part vanishes (exactly, or within `tol`).
    pub fn is_real(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(z) => z.im.is_zero(),
            Scalar::Approx { im, .. } => im.abs() <= tol,
        }
    }

    /// Exact real part as a rational; `None` in approximate mode or when the
    /// imaginary part is nonzero.
    pub fn as_real_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Exact(z) if z.im.is_zero() => Some(z.re.clone()),
            _ => None,
        }
    }

    /// Sign of a real scalar: -1, 0, +1. Errors when the value is not real.
    pub fn real_sign(&self, tol: f64) -> Result<i32, Error> {
        if !self.is_real(tol) {
            return Err(Error::NotReal);
        }
        Ok(match self {
            Scalar::Exact(z) => {
                if z.re.is_zero() {
                    0
                } else if z.re.is_positive() {
                    1
                } else {
                    -1
                }
            }
            Scalar::Approx { re, .. } => {
                if re.abs() <= tol {
                    0
                } else if *re > 0.0 {
                    1
                } else {
                    -1
                }
            }
        })
    }

    /// Square root of a nonnegative real scalar. Exact mode succeeds only for
    /// perfect rational squares; approximate mode always succeeds.
    pub fn sqrt_real(&self) -> Result<Self, Error> {
        match self {
            Scalar::Exact(z) => {
                if !z.im.is_zero() || z.re.is_negative() {
                    return Err(Error::NotReal);
                }
                let num = exact_int_sqrt(z.re.numer())?;
                let den = exact_int_sqrt(z.re.denom())?;
                Ok(Scalar::Exact(ExactComplex::new(
                    BigRational::new(num, den),
                    BigRational::zero(),
                )))
            }
            Scalar::Approx { re, im } => {
                if im.abs() > DEFAULT_TOL || *re < -DEFAULT_TOL {
                    return Err(Error::NotReal);
                }
                Ok(Scalar::Approx { re: re.max(0.0).sqrt(), im: 0.0 })
            }
        }
    }

    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        let (ar, ai) = self.to_f64();
        let (br, bi) = other.to_f64();
        (ar - br).abs() <= tol && (ai - bi).abs() <= tol
    }
}

fn exact_int_sqrt(n: &BigInt) -> Result<BigInt, Error> {
    let r = n.sqrt();
    if &(&r * &r) == n {
        Ok(r)
    } else {
        Err(Error::IrrationalSqrt(n.to_string()))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $exact:expr, $approx:expr) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, other: &Scalar) -> Scalar {
                match (self, other) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact($exact(a, b)),
                    _ => {
                        let (ar, ai) = self.to_f64();
                        let (br, bi) = other.to_f64();
                        let (re, im) = $approx(ar, ai, br, bi);
                        Scalar::Approx { re, im }
                    }
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, other: Scalar) -> Scalar {
                $trait::$method(&self, &other)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, other: &Scalar) -> Scalar {
                $trait::$method(&self, other)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, other: Scalar) -> Scalar {
                $trait::$method(self, &other)
            }
        }
    };
}

binop!(
    Add,
    add,
    |a: &ExactComplex, b: &ExactComplex| ExactComplex::new(&a.re + &b.re, &a.im + &b.im),
    |ar: f64, ai: f64, br: f64, bi: f64| (ar + br, ai + bi)
);

binop!(
    Sub,
    sub,
    |a: &ExactComplex, b: &ExactComplex| ExactComplex::new(&a.re - &b.re, &a.im - &b.im),
    |ar: f64, ai: f64, br: f64, bi: f64| (ar - br, ai - bi)
);

binop!(
    Mul,
    mul,
    |a: &ExactComplex, b: &ExactComplex| ExactComplex::new(
        &a.re * &b.re - &a.im * &b.im,
        &a.re * &b.im + &a.im * &b.re
    ),
    |ar: f64, ai: f64, br: f64, bi: f64| (ar * br - ai * bi, ar * bi + ai * br)
);

impl Div for &Scalar {
    type Output = Scalar;
    #[allow(clippy::suspicious_arithmetic_impl)] // divide = multiply by the inverse
    fn div(self, other: &Scalar) -> Scalar {
        let inv = other.inv().expect("division by zero scalar");
        self * &inv
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, other: Scalar) -> Scalar {
        &self / &other
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::Exact(ExactComplex::new(-z.re.clone(), -z.im.clone())),
            Scalar::Approx { re, im } => Scalar::Approx { re: -re, im: -im },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let (ar, ai) = self.to_f64();
                let (br, bi) = other.to_f64();
                ar == br && ai == bi
            }
        }
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    /// Exact values render as reduced fractions: `"p/q"`, complex as
    /// `"a/b+c/d i"`. Approximate values use 17 significant digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(z) => {
                if z.im.is_zero() {
                    write!(f, "{}", fmt_rational(&z.re))
                } else if z.re.is_zero() {
                    write!(f, "{} i", fmt_rational(&z.im))
                } else if z.im.is_negative() {
                    write!(f, "{}-{} i", fmt_rational(&z.re), fmt_rational(&-z.im.clone()))
                } else {
                    write!(f, "{}+{} i", fmt_rational(&z.re), fmt_rational(&z.im))
                }
            }
            Scalar::Approx { re, im } => {
                if *im == 0.0 {
                    write!(f, "{:.16e}", re)
                } else if *im < 0.0 {
                    write!(f, "{:.16e}-{:.16e} i", re, -im)
                } else {
                    write!(f, "{:.16e}+{:.16e} i", re, im)
                }
            }
        }
    }
}

/// A rational literal, or a decimal/scientific literal (parsed via binary64
/// and carried as `Err(value)` so the caller can demote to approximate mode).
fn parse_real_part(text: &str) -> Result<Result<BigRational, f64>, Error> {
    let t = text.trim();
    let bad = || Error::ScalarParse(text.to_string());
    if let Some((p, q)) = t.split_once('/') {
        let num = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(Ok(BigRational::new(num, den)))
    } else if let Ok(num) = BigInt::from_str(t) {
        Ok(Ok(BigRational::from_integer(num)))
    } else if t.contains('.') || t.contains('e') || t.contains('E') {
        t.parse::<f64>().map(Err).map_err(|_| bad())
    } else {
        Err(bad())
    }
}


impl FromStr for Scalar {
    type Err = Error;

    /// Parses `"p/q"`, `"a/b+c/d i"`, `"a/b-c/d i"`, `"c/d i"`, with optional
    /// whitespace before the trailing `i`. Decimal or scientific literals
    /// parse into approximate scalars.
    fn from_str(s: &str) -> Result<Self, Error> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::ScalarParse(s.to_string());
        if t.is_empty() {
            return Err(bad());
        }
        let combine = |re: Result<BigRational, f64>, im: Result<BigRational, f64>| -> Scalar {
            match (re, im) {
                (Ok(re), Ok(im)) => Scalar::Exact(ExactComplex::new(re, im)),
                (re, im) => {
                    let to = |v: Result<BigRational, f64>| match v {
                        Ok(r) => rational_to_f64(&r),
                        Err(f) => f,
                    };
                    Scalar::Approx { re: to(re), im: to(im) }
                }
            }
        };
        if let Some(body) = t.strip_suffix('i') {
            // split the imaginary tail from an optional real head at the last
            // +/- that is neither leading nor an exponent sign
            let chars: Vec<char> = body.chars().collect();
            let mut split_at = None;
            for idx in 1..chars.len() {
                let ch = chars[idx];
                if (ch == '+' || ch == '-') && !matches!(chars[idx - 1], 'e' | 'E') {
                    split_at = Some(idx);
                }
            }
            let (re_part, im_part) = match split_at {
                Some(idx) => (&body[..idx], &body[idx..]),
                None => ("0", body),
            };
            let re = parse_real_part(re_part)?;
            let im_text = im_part.trim_start_matches('+');
            let im = if im_text.is_empty() {
                Ok(BigRational::one())
            } else if im_text == "-" {
                Ok(-BigRational::one())
            } else {
                parse_real_part(im_text)?
            };
            Ok(combine(re, im))
        } else {
            Ok(combine(parse_real_part(&t)?, Ok(BigRational::zero())))
        }
    }
}
