//! Scalar fields and arithmetic modes.
//!
//! Three concrete scalar types are supported:
//!
//! | type          | field   | mode          |
//! |---------------|---------|---------------|
//! | [`Rational`]  | real    | exact         |
//! | `f64`         | real    | float         |
//! | [`Complex64`] | complex | float         |
//!
//! All equality decisions (norm equality, "is this coordinate zero", "are these
//! two unit scalars the same") go through the [`Magnitude`] and [`Scalar`]
//! methods, which are exact for rationals and tolerance-based for floats.

use std::f64::consts::{PI, TAU};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg;

pub use num_complex::Complex64;

/// Exact rational scalar.
pub type Rational = BigRational;

pub const DEFAULT_NORM_TOL: f64 = 1e-9;
pub const DEFAULT_PHASE_TOL: f64 = 1e-9;
/// Relative singular-value cutoff used by float rank computations.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[serde(rename = "exact")]
    ExactRational,
    Float,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::ExactRational => "exact",
            Mode::Float => "float",
        }
    }
}

impl std::str::FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            other => Err(Error::Parse(format!("unknown field {other:?}"))),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-rational" => Ok(Mode::ExactRational),
            "float" => Ok(Mode::Float),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

/// Field, arithmetic mode and comparison tolerances.
///
/// `norm_tol` is a relative tolerance for norm equality and `phase_tol` an
/// angular tolerance (radians) for unit-scalar equality. Both are ignored in
/// exact mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarConfig {
    pub field: Field,
    pub mode: Mode,
    pub norm_tol: f64,
    pub phase_tol: f64,
}

impl ScalarConfig {
    pub fn new(field: Field, mode: Mode, norm_tol: f64, phase_tol: f64) -> Result<Self> {
        let cfg = ScalarConfig { field, mode, norm_tol, phase_tol };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn exact() -> Self {
        ScalarConfig {
            field: Field::Real,
            mode: Mode::ExactRational,
            norm_tol: 0.0,
            phase_tol: 0.0,
        }
    }

    pub fn real_float() -> Self {
        ScalarConfig {
            field: Field::Real,
            mode: Mode::Float,
            norm_tol: DEFAULT_NORM_TOL,
            phase_tol: DEFAULT_PHASE_TOL,
        }
    }

    pub fn complex_float() -> Self {
        ScalarConfig {
            field: Field::Complex,
            mode: Mode::Float,
            norm_tol: DEFAULT_NORM_TOL,
            phase_tol: DEFAULT_PHASE_TOL,
        }
    }

    /// Default configuration for a field/mode pair.
    pub fn default_for(field: Field, mode: Mode) -> Result<Self> {
        match (field, mode) {
            (Field::Real, Mode::ExactRational) => Ok(Self::exact()),
            (Field::Real, Mode::Float) => Ok(Self::real_float()),
            (Field::Complex, Mode::Float) => Ok(Self::complex_float()),
            (Field::Complex, Mode::ExactRational) => Err(Error::InvalidConfig(
                "exact rational mode requires the real field".into(),
            )),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            Mode::ExactRational => {
                if self.field != Field::Real {
                    return Err(Error::InvalidConfig(
                        "exact rational mode requires the real field".into(),
                    ));
                }
            }
            Mode::Float => {
                if !(self.norm_tol > 0.0 && self.norm_tol.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "norm_tol must be positive in float mode, got {}",
                        self.norm_tol
                    )));
                }
                if !(self.phase_tol > 0.0 && self.phase_tol.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "phase_tol must be positive in float mode, got {}",
                        self.phase_tol
                    )));
                }
            }
        }
        Ok(())
    }

    /// Errors unless `self` is a valid configuration for scalar type `S`.
    pub fn check_for<S: Scalar>(&self) -> Result<()> {
        self.validate()?;
        if self.field != S::FIELD || self.mode != S::MODE {
            return Err(Error::ConfigMismatch(format!(
                "configuration {}/{} does not match scalar type {}/{}",
                self.field.as_str(),
                self.mode.as_str(),
                S::FIELD.as_str(),
                S::MODE.as_str()
            )));
        }
        Ok(())
    }
}

/// Nonnegative magnitudes (moduli and norms).
pub trait Magnitude:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn zero_mag() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_zero_mag(&self) -> bool;
    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
    /// `self == other`, relative to the larger of the two in float mode.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;
    /// `self` attains `max` (`self >= (1 - tol) max` in float mode).
    fn attains(&self, max: &Self, tol: f64) -> bool;
    /// `self` is indistinguishable from zero relative to `scale`.
    fn negligible(&self, scale: &Self, tol: f64) -> bool;
    fn mag_json(&self) -> Value;
}

impl Magnitude for f64 {
    fn zero_mag() -> Self {
        0.0
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero_mag(&self) -> bool {
        *self == 0.0
    }
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol * self.abs().max(other.abs())
    }
    fn attains(&self, max: &Self, tol: f64) -> bool {
        *self >= (1.0 - tol) * max
    }
    fn negligible(&self, scale: &Self, tol: f64) -> bool {
        self.abs() <= tol * scale.abs()
    }
    fn mag_json(&self) -> Value {
        float_json(*self)
    }
}

impl Magnitude for Rational {
    fn zero_mag() -> Self {
        Zero::zero()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(num.into(), den.into())
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero_mag(&self) -> bool {
        Zero::is_zero(self)
    }
    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
    fn attains(&self, max: &Self, _tol: f64) -> bool {
        self >= max
    }
    fn negligible(&self, _scale: &Self, _tol: f64) -> bool {
        Zero::is_zero(self)
    }
    fn mag_json(&self) -> Value {
        rational_json(self)
    }
}

/// A scalar field element in one of the supported arithmetic modes.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    type Mag: Magnitude;

    const FIELD: Field;
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_mag(m: &Self::Mag) -> Self;
    /// Nearest representable value; exact for rationals (binary expansion).
    fn from_f64(v: f64) -> Self;
    fn from_complex(z: Complex64) -> Result<Self>;
    fn to_complex(&self) -> Complex64;

    fn modulus(&self) -> Self::Mag;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn scale(&self, m: &Self::Mag) -> Self;
    /// Unit scalar `u` with `self = u |self|`; `None` for zero.
    fn phase(&self) -> Option<Self>;

    /// Equality of unit scalars (angular tolerance in float mode).
    fn same_unit(&self, other: &Self, cfg: &ScalarConfig) -> bool;
    fn is_unimodular(&self, cfg: &ScalarConfig) -> bool;

    /// Angle of a unit scalar in `[0, 2pi)`.
    fn unit_angle(&self) -> f64 {
        let a = self.to_complex().arg();
        if a < 0.0 {
            a + TAU
        } else {
            a
        }
    }

    /// A random matrix entry. Entries are bounded by 2 in modulus.
    fn random_entry<R: Rng + ?Sized>(rng: &mut R) -> Self;
    fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Self;
    /// A random magnitude in `(0, 1]`.
    fn random_positive<R: Rng + ?Sized>(rng: &mut R) -> Self::Mag;

    /// `sum_k a_k b_k`.
    fn dot(a: &[Self], b: &[Self]) -> Self {
        a.iter()
            .zip(b)
            .filter(|(x, y)| !x.is_zero() && !y.is_zero())
            .fold(Self::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
    }

    /// Rank of a row-major `rows x cols` matrix.
    fn matrix_rank(data: &[Self], rows: usize, cols: usize, rank_tol: f64) -> usize;

    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;

    /// Human-readable phase label used in witness reports.
    fn phase_json(&self) -> Value {
        self.to_json()
    }
}

fn float_json(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(v.to_string()))
}

fn rational_json(r: &Rational) -> Value {
    if r.is_integer() {
        if let Some(v) = r.numer().to_i64() {
            return Value::from(v);
        }
        return Value::String(r.numer().to_string());
    }
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}

/// Parses `"p/q"`, `"p"` or a plain decimal like `"-0.25"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if s.contains(['e', 'E']) {
        let v: f64 = s.parse().map_err(|_| bad())?;
        return Rational::from_float(v).ok_or_else(bad);
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let frac_r = Rational::new(frac_num, den);
        let int_r = Rational::from_integer(int_part);
        return Ok(if neg { int_r - frac_r } else { int_r + frac_r });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

fn json_real_f64(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("not a finite number: {n}"))),
        Value::String(s) => {
            let v = Magnitude::to_f64(&parse_rational(s)?);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse(format!("out of range: {s:?}")))
            }
        }
        other => Err(Error::Parse(format!("expected a real scalar, got {other}"))),
    }
}

impl Scalar for Rational {
    type Mag = Rational;
    const FIELD: Field = Field::Real;
    const MODE: Mode = Mode::ExactRational;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(v.into())
    }
    fn from_mag(m: &Self::Mag) -> Self {
        m.clone()
    }
    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).unwrap_or_else(Zero::zero)
    }
    fn from_complex(z: Complex64) -> Result<Self> {
        if z.im != 0.0 {
            return Err(Error::ConfigMismatch(
                "complex value in the real field".into(),
            ));
        }
        Rational::from_float(z.re).ok_or_else(|| Error::Parse(format!("non-finite {}", z.re)))
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(Magnitude::to_f64(self), 0.0)
    }
    fn modulus(&self) -> Self::Mag {
        self.abs()
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn scale(&self, m: &Self::Mag) -> Self {
        self * m
    }
    fn phase(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.signum())
        }
    }
    fn same_unit(&self, other: &Self, _cfg: &ScalarConfig) -> bool {
        self == other
    }
    fn is_unimodular(&self, _cfg: &ScalarConfig) -> bool {
        self.abs().is_one()
    }
    fn random_entry<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let num: i64 = rng.gen_range(-8..=8);
        let den: i64 = rng.gen_range(1..=4);
        Rational::new(num.into(), den.into())
    }
    fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.gen::<bool>() {
            One::one()
        } else {
            -<Rational as One>::one()
        }
    }
    fn random_positive<R: Rng + ?Sized>(rng: &mut R) -> Self::Mag {
        let den: i64 = rng.gen_range(1..=6);
        let num: i64 = rng.gen_range(1..=den);
        Rational::new(num.into(), den.into())
    }
    fn matrix_rank(data: &[Self], rows: usize, cols: usize, _rank_tol: f64) -> usize {
        linalg::rational_rank(data, rows, cols)
    }
    fn dot(a: &[Self], b: &[Self]) -> Self {
        // One common denominator, reduced once at the end.
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (x, y) in a.iter().zip(b) {
            if Zero::is_zero(x) || Zero::is_zero(y) {
                continue;
            }
            let tn = x.numer() * y.numer();
            let td = x.denom() * y.denom();
            if td == den {
                num += tn;
            } else {
                num = num * &td + tn * &den;
                den *= td;
            }
        }
        Rational::new(num, den)
    }
    fn to_json(&self) -> Value {
        rational_json(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Rational::from_integer(i.into()))
                } else {
                    // Decimal text as written in the file, not its binary value.
                    parse_rational(&n.to_string())
                }
            }
            Value::String(s) => parse_rational(s),
            other => Err(Error::Parse(format!(
                "expected an exact real scalar (integer or \"p/q\"), got {other}"
            ))),
        }
    }
    fn phase_json(&self) -> Value {
        real_phase_label(Signed::is_negative(self))
    }
}

fn real_phase_label(negative: bool) -> Value {
    Value::String(if negative { "-1" } else { "+1" }.to_string())
}

impl Scalar for f64 {
    type Mag = f64;
    const FIELD: Field = Field::Real;
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_mag(m: &Self::Mag) -> Self {
        *m
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_complex(z: Complex64) -> Result<Self> {
        if z.im != 0.0 {
            return Err(Error::ConfigMismatch(
                "complex value in the real field".into(),
            ));
        }
        Ok(z.re)
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn modulus(&self) -> Self::Mag {
        self.abs()
    }
    fn conj(&self) -> Self {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn scale(&self, m: &Self::Mag) -> Self {
        self * m
    }
    fn phase(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(self.signum())
        }
    }
    fn same_unit(&self, other: &Self, cfg: &ScalarConfig) -> bool {
        angle_distance(self.to_complex(), other.to_complex()) <= cfg.phase_tol
    }
    fn is_unimodular(&self, cfg: &ScalarConfig) -> bool {
        (self.abs() - 1.0).abs() <= cfg.norm_tol
    }
    fn random_entry<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.gen_range(-2.0..2.0)
    }
    fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.gen::<bool>() {
            1.0
        } else {
            -1.0
        }
    }
    fn random_positive<R: Rng + ?Sized>(rng: &mut R) -> Self::Mag {
        1.0 - rng.gen::<f64>()
    }
    fn matrix_rank(data: &[Self], rows: usize, cols: usize, rank_tol: f64) -> usize {
        if rows == 0 || cols == 0 {
            return 0;
        }
        let m = DMatrix::from_row_slice(rows, cols, data);
        linalg::rank_from_singular_values(m.singular_values().as_slice(), rank_tol)
    }
    fn to_json(&self) -> Value {
        float_json(*self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        json_real_f64(v)
    }
    fn phase_json(&self) -> Value {
        real_phase_label(*self < 0.0)
    }
}

impl Scalar for Complex64 {
    type Mag = f64;
    const FIELD: Field = Field::Complex;
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_mag(m: &Self::Mag) -> Self {
        Complex64::new(*m, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn from_complex(z: Complex64) -> Result<Self> {
        Ok(z)
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn modulus(&self) -> Self::Mag {
        self.norm()
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn scale(&self, m: &Self::Mag) -> Self {
        self * m
    }
    fn phase(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            Some(Complex64::from_polar(1.0, self.arg()))
        }
    }
    fn same_unit(&self, other: &Self, cfg: &ScalarConfig) -> bool {
        angle_distance(*self, *other) <= cfg.phase_tol
    }
    fn is_unimodular(&self, cfg: &ScalarConfig) -> bool {
        (self.norm() - 1.0).abs() <= cfg.norm_tol
    }
    fn random_entry<R: Rng + ?Sized>(rng: &mut R) -> Self {
        // Uniform in the disc of radius 1.5.
        let r = 1.5 * rng.gen::<f64>().sqrt();
        Complex64::from_polar(r, rng.gen_range(-PI..PI))
    }
    fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Complex64::from_polar(1.0, rng.gen_range(-PI..PI))
    }
    fn random_positive<R: Rng + ?Sized>(rng: &mut R) -> Self::Mag {
        1.0 - rng.gen::<f64>()
    }
    fn matrix_rank(data: &[Self], rows: usize, cols: usize, rank_tol: f64) -> usize {
        if rows == 0 || cols == 0 {
            return 0;
        }
        let m = DMatrix::from_row_slice(rows, cols, data);
        linalg::rank_from_singular_values(m.singular_values().as_slice(), rank_tol)
    }
    fn to_json(&self) -> Value {
        Value::Array(vec![float_json(self.re), float_json(self.im)])
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Array(parts) if parts.len() == 2 => Ok(Complex64::new(
                json_real_f64(&parts[0])?,
                json_real_f64(&parts[1])?,
            )),
            Value::Number(_) | Value::String(_) => Ok(Complex64::new(json_real_f64(v)?, 0.0)),
            other => Err(Error::Parse(format!(
                "expected a complex scalar [re, im], got {other}"
            ))),
        }
    }
}

/// Angular distance between the arguments of two nonzero complex numbers, in `[0, pi]`.
pub fn angle_distance(a: Complex64, b: Complex64) -> f64 {
    let d = (a.arg() - b.arg()).rem_euclid(TAU);
    d.min(TAU - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_complex_config_rejected() {
        assert!(ScalarConfig::new(Field::Complex, Mode::ExactRational, 0.0, 0.0).is_err());
        assert!(ScalarConfig::default_for(Field::Complex, Mode::ExactRational).is_err());
    }

    #[test]
    fn float_config_needs_positive_tolerances() {
        assert!(ScalarConfig::new(Field::Real, Mode::Float, 0.0, 1e-9).is_err());
        assert!(ScalarConfig::new(Field::Real, Mode::Float, 1e-9, -1.0).is_err());
        assert!(ScalarConfig::new(Field::Real, Mode::Float, 1e-9, 1e-9).is_ok());
        // Tolerances are unused in exact mode.
        assert!(ScalarConfig::new(Field::Real, Mode::ExactRational, 0.0, 0.0).is_ok());
    }

    #[test]
    fn check_for_matches_scalar_type() {
        assert!(ScalarConfig::exact().check_for::<Rational>().is_ok());
        assert!(ScalarConfig::exact().check_for::<f64>().is_err());
        assert!(ScalarConfig::complex_float().check_for::<Complex64>().is_ok());
        assert!(ScalarConfig::real_float().check_for::<Complex64>().is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/6").unwrap(), Rational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("-7").unwrap(), Rational::from_integer((-7).into()));
        assert_eq!(parse_rational("-0.25").unwrap(), Rational::new((-1).into(), 4.into()));
        assert_eq!(parse_rational("0.1").unwrap(), Rational::new(1.into(), 10.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn rational_json_round_trip() {
        let r = Rational::new((-3).into(), 4.into());
        assert_eq!(Scalar::to_json(&r), Value::String("-3/4".into()));
        assert_eq!(Rational::from_json(&Scalar::to_json(&r)).unwrap(), r);
        assert_eq!(Scalar::to_json(&Rational::from_i64(5)), Value::from(5));
        let decimal: Value = serde_json::from_str("0.1").unwrap();
        assert_eq!(
            Rational::from_json(&decimal).unwrap(),
            Rational::new(1.into(), 10.into())
        );
    }

    #[test]
    fn complex_modulus_and_phase() {
        let z = Complex64::new(3.0, 4.0);
        assert_eq!(z.modulus(), 5.0);
        let u = z.phase().unwrap();
        assert!((u - Complex64::new(0.6, 0.8)).norm() < 1e-15);
        assert!(Scalar::phase(&Complex64::new(0.0, 0.0)).is_none());
    }

    #[test]
    fn unit_angle_range() {
        assert_eq!(Scalar::unit_angle(&1.0f64), 0.0);
        assert!((Scalar::unit_angle(&-1.0f64) - PI).abs() < 1e-15);
        let minus_i = Complex64::new(0.0, -1.0);
        assert!((minus_i.unit_angle() - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn angle_distance_wraps() {
        let a = Complex64::from_polar(1.0, PI - 1e-12);
        let b = Complex64::from_polar(1.0, -PI + 1e-12);
        assert!(angle_distance(a, b) < 1e-11);
    }
}
