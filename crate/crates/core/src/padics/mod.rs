//! Fixed-precision p-adic arithmetic.
//!
//! A [`PadicNumber`] is stored as `p^v * u` with the unit mantissa known
//! modulo `p^prec`. Every operation carries the minimum justified precision,
//! so equality checks are statements "exact modulo `p^floor`" for an explicit
//! floor. Primes are odd and `p^prec` is kept within `u64`, with `u128`
//! intermediates.

mod binomial;
mod embed;
mod tate;

pub use binomial::{binom_exp_at, binom_exp_series, delta_star};
pub use embed::{Embedding, EmbeddingMode};
pub use tate::{strassman_bound, StrassmanBound, TateSeries};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;


#[derive(Debug, Error)]
pub enum PadicError {
    #[error("primes differ: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("prime {0} not supported: need an odd prime")]
    BadPrime(u64),
    #[error("precision {prec} too large for prime {p} (p^prec must fit in 63 bits)")]
    PrecisionTooLarge { p: u64, prec: u32 },
    #[error("division by zero (or by a value indistinguishable from zero)")]
    DivisionByZero,
    #[error("value is not a 1-unit: {0}")]
    NotOneUnit(String),
    #[error("denominator of {0} is divisible by p")]
    DenominatorDivisibleByP(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("degree cutoff {d} too small for precision {n} at prime {p}: need d*(p-2) >= n*(p-1)")]
    InsufficientDegree { d: u32, n: u32, p: u64 },
    #[error("tate series mismatch: {0}")]
    TateMismatch(String),
    #[error("evaluation point has valuation {got}, need at least {need}")]
    OutsideRadius { got: i64, need: i64 },
    #[error("{0}")]
    Embedding(String),
    #[error(transparent)]
    Exponent(#[from] crate::exponents::ExponentError),
    #[error("monoid: {0}")]
    Monoid(String),
}

pub type Result<T> = std::result::Result<T, PadicError>;

fn check_prime(p: u64) -> Result<()> {
    if p < 3 || p % 2 == 0 {
        return Err(PadicError::BadPrime(p));
    }
    // A cheap primality check is enough for the small primes used here.
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return Err(PadicError::BadPrime(p));
        }
        d += 2;
    }
    Ok(())
}

/// `p^k` as u64; caller guarantees it fits.
fn pow_u64(p: u64, k: u32) -> u64 {
    let mut acc = 1u64;
    for _ in 0..k {
        acc = acc.checked_mul(p).expect("p^k overflow");
    }
    acc
}

fn fits_u63(p: u64, k: u32) -> bool {
    let mut acc: u128 = 1;
    for _ in 0..k {
        acc *= p as u128;
        if acc > (1u128 << 63) {
            return false;
        }
    }
    true
}

fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn mod_inv(a: u64, m: u64) -> Option<u64> {
    // extended Euclid
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    let mut inv = old_s % m as i128;
    if inv < 0 {
        inv += m as i128;
    }
    Some(inv as u64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    /// Exactly zero.
    Zero,
    /// Indistinguishable from zero modulo `p^abs`.
    ZeroAt { abs: i64 },
    /// `p^val * mantissa`, mantissa a unit known modulo `p^prec`.
    Unit { val: i64, mantissa: u64, prec: u32 },
}

/// A p-adic number at finite precision.
#[derive(Clone, PartialEq, Eq)]
pub struct PadicNumber {
    prime: u64,
    repr: Repr,
}

impl std::fmt::Debug for PadicNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.repr {
            Repr::Zero => write!(f, "0 (p={})", self.prime),
            Repr::ZeroAt { abs } => write!(f, "O({}^{})", self.prime, abs),
            Repr::Unit { val, mantissa, prec } => write!(
                f,
                "{}^{} * {} (mod {}^{})",
                self.prime, val, mantissa, self.prime, prec
            ),
        }
    }
}

impl PadicNumber {
    /// Largest relative precision with `p^prec` within 63 bits.
    pub fn max_precision(p: u64) -> u32 {
        let mut acc: u128 = 1;
        let mut k = 0u32;
        loop {
            acc *= p as u128;
            if acc > (1u128 << 63) {
                return k;
            }
            k += 1;
        }
    }

    /// The exact power `p^k` at the maximal representable precision.
    pub fn p_power(p: u64, k: i64) -> Self {
        PadicNumber {
            prime: p,
            repr: Repr::Unit {
                val: k,
                mantissa: 1,
                prec: PadicNumber::max_precision(p),
            },
        }
    }

    pub fn zero(p: u64) -> Self {
        PadicNumber {
            prime: p,
            repr: Repr::Zero,
        }
    }

    /// Zero to absolute precision `abs` (the value lies in `p^abs Z_p`).
    pub fn zero_at(p: u64, abs: i64) -> Self {
        PadicNumber {
            prime: p,
            repr: Repr::ZeroAt { abs },
        }
    }

    pub fn one(p: u64, prec: u32) -> Result<Self> {
        PadicNumber::from_unit_parts(p, 0, 1, prec)
    }

    /// Build `p^val * mantissa mod p^prec`; mantissa need not be reduced but
    /// must be a unit after reduction of its p-part.
    pub fn from_unit_parts(p: u64, val: i64, mantissa: u64, prec: u32) -> Result<Self> {
        check_prime(p)?;
        if !fits_u63(p, prec) {
            return Err(PadicError::PrecisionTooLarge { p, prec });
        }
        if mantissa == 0 {
            return Ok(PadicNumber::zero_at(p, val + prec as i64));
        }
        let mut m = mantissa;
        let mut v = val;
        while m % p == 0 {
            m /= p;
            v += 1;
        }
        let shift = (v - val) as u32;
        let prec = prec.saturating_sub(shift);
        if prec == 0 {
            return Ok(PadicNumber::zero_at(p, val + shift as i64));
        }
        let pn = pow_u64(p, prec);
        Ok(PadicNumber {
            prime: p,
            repr: Repr::Unit {
                val: v,
                mantissa: m % pn,
                prec,
            },
        })
    }

    /// Reduce a big integer to a p-adic number at relative precision `prec`.
    pub fn from_bigint(p: u64, n: &BigInt, prec: u32) -> Result<Self> {
        check_prime(p)?;
        if !fits_u63(p, prec) {
            return Err(PadicError::PrecisionTooLarge { p, prec });
        }
        if n.is_zero() {
            return Ok(PadicNumber::zero(p));
        }
        let pb = BigInt::from(p);
        let mut v = 0i64;
        let mut m = n.abs();
        loop {
            let (q, r) = num_integer::Integer::div_rem(&m, &pb);
            if r.is_zero() {
                v += 1;
                m = q;
            } else {
                break;
            }
        }
        let pn = BigInt::from(pow_u64(p, prec));
        let mut red = m % &pn;
        if n.is_negative() {
            red = (&pn - red) % &pn;
        }
        let mantissa = red.to_u64().expect("reduced mantissa fits u64");
        PadicNumber::from_unit_parts(p, v, mantissa, prec)
    }

    /// Reduce an exact rational; the denominator's p-part moves into the
    /// valuation.
    pub fn from_rational(p: u64, r: &BigRational, prec: u32) -> Result<Self> {
        if r.is_zero() {
            return Ok(PadicNumber::zero(p));
        }
        let num = PadicNumber::from_bigint(p, r.numer(), prec)?;
        let den = PadicNumber::from_bigint(p, r.denom(), prec)?;
        num.mul(&den.inv()?)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Valuation when the value is certifiably nonzero.
    pub fn valuation(&self) -> Option<i64> {
        match self.repr {
            Repr::Unit { val, .. } => Some(val),
            _ => None,
        }
    }

    /// Lower bound for the valuation (None means +infinity: exact zero).
    pub fn valuation_lower_bound(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero => None,
            Repr::ZeroAt { abs } => Some(abs),
            Repr::Unit { val, .. } => Some(val),
        }
    }

    /// Absolute precision: the value is known modulo `p^abs`. None = exact.
    pub fn abs_precision(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero => None,
            Repr::ZeroAt { abs } => Some(abs),
            Repr::Unit { val, prec, .. } => Some(val + prec as i64),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// Indistinguishable from zero at its own precision.
    pub fn is_zero_at_precision(&self) -> bool {
        !matches!(self.repr, Repr::Unit { .. })
    }

    /// Provably zero modulo `p^floor`.
    pub fn is_zero_mod(&self, floor: i64) -> bool {
        match self.repr {
            Repr::Zero => true,
            Repr::ZeroAt { abs } => abs >= floor,
            Repr::Unit { val, .. } => val >= floor,
        }
    }

    /// Certifiably nonzero modulo `p^floor`.
    pub fn is_nonzero_mod(&self, floor: i64) -> bool {
        match self.repr {
            Repr::Unit { val, .. } => val < floor,
            _ => false,
        }
    }

    fn check_same_prime(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(PadicError::PrimeMismatch(self.prime, other.prime));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_prime(other)?;
        let p = self.prime;
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) => Ok(other.clone()),
            (_, Repr::Zero) => Ok(self.clone()),
            (Repr::ZeroAt { abs }, Repr::ZeroAt { abs: b }) => {
                Ok(PadicNumber::zero_at(p, *abs.min(b)))
            }
            (Repr::ZeroAt { abs }, Repr::Unit { val, mantissa, prec })
            | (Repr::Unit { val, mantissa, prec }, Repr::ZeroAt { abs }) => {
                // value = p^val*m + O(p^abs)
                if *val >= *abs {
                    return Ok(PadicNumber::zero_at(p, *abs));
                }
                let new_prec = ((*abs - *val) as u32).min(*prec);
                PadicNumber::from_unit_parts(p, *val, *mantissa, new_prec)
            }
            (
                Repr::Unit { val: v1, mantissa: m1, prec: n1 },
                Repr::Unit { val: v2, mantissa: m2, prec: n2 },
            ) => {
                let abs = (v1 + *n1 as i64).min(v2 + *n2 as i64);
                let v = (*v1).min(*v2);
                let span = (abs - v) as u32;
                if span == 0 {
                    return Ok(PadicNumber::zero_at(p, abs));
                }
                let pn = pow_u64(p, span);
                let a = mod_mul(*m1 % pn, pow_u64(p, (*v1 - v) as u32) % pn, pn);
                let b = mod_mul(*m2 % pn, pow_u64(p, (*v2 - v) as u32) % pn, pn);
                let s = (a + b) % pn;
                if s == 0 {
                    return Ok(PadicNumber::zero_at(p, abs));
                }
                PadicNumber::from_unit_parts(p, v, s, span)
            }
        }
    }

    pub fn neg(&self) -> Self {
        let p = self.prime;
        match &self.repr {
            Repr::Unit { val, mantissa, prec } => {
                let pn = pow_u64(p, *prec);
                PadicNumber {
                    prime: p,
                    repr: Repr::Unit {
                        val: *val,
                        mantissa: (pn - *mantissa % pn) % pn,
                        prec: *prec,
                    },
                }
            }
            _ => self.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_prime(other)?;
        let p = self.prime;
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => Ok(PadicNumber::zero(p)),
            (Repr::ZeroAt { abs }, Repr::ZeroAt { abs: b }) => {
                Ok(PadicNumber::zero_at(p, abs + b))
            }
            (Repr::ZeroAt { abs }, Repr::Unit { val, .. })
            | (Repr::Unit { val, .. }, Repr::ZeroAt { abs }) => {
                Ok(PadicNumber::zero_at(p, abs + val))
            }
            (
                Repr::Unit { val: v1, mantissa: m1, prec: n1 },
                Repr::Unit { val: v2, mantissa: m2, prec: n2 },
            ) => {
                let prec = (*n1).min(*n2);
                let pn = pow_u64(p, prec);
                let m = mod_mul(*m1 % pn, *m2 % pn, pn);
                PadicNumber::from_unit_parts(p, v1 + v2, m, prec)
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.repr {
            Repr::Unit { val, mantissa, prec } => {
                let pn = pow_u64(self.prime, *prec);
                let inv = mod_inv(*mantissa % pn, pn).ok_or(PadicError::DivisionByZero)?;
                PadicNumber::from_unit_parts(self.prime, -val, inv, *prec)
            }
            _ => Err(PadicError::DivisionByZero),
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// Integer power (negative exponents via the inverse).
    pub fn pow(&self, k: i64) -> Result<Self> {
        if k == 0 {
            let prec = match &self.repr {
                Repr::Unit { prec, .. } => *prec,
                _ => 1,
            };
            return PadicNumber::one(self.prime, prec);
        }
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc: Option<PadicNumber> = None;
        for _ in 0..k.unsigned_abs() {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => a.mul(&base)?,
            });
        }
        Ok(acc.unwrap())
    }

    /// True when the difference is indistinguishable from zero at the shared
    /// precision floor.
    pub fn agrees_with(&self, other: &Self) -> bool {
        match self.sub(other) {
            Ok(d) => d.is_zero_at_precision(),
            Err(_) => false,
        }
    }

    /// Is this a 1-unit (congruent to 1 mod p)?
    pub fn is_one_unit(&self) -> bool {
        match &self.repr {
            Repr::Unit { val, mantissa, .. } => *val == 0 && mantissa % self.prime == 1,
            _ => false,
        }
    }

    /// Mantissa digits in base p, least significant first.
    pub fn mantissa_digits(&self) -> Vec<u8> {
        match &self.repr {
            Repr::Unit { mantissa, prec, .. } => {
                let mut m = *mantissa;
                (0..*prec)
                    .map(|_| {
                        let d = (m % self.prime) as u8;
                        m /= self.prime;
                        d
                    })
                    .collect()
            }
            _ => Vec::new(),
        }
    }
}

// ---------------------------------------------------------------------------
// Documents
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct PadicDoc {
    pub valuation: Option<i64>,
    /// Base-p digits of the unit mantissa, least significant first.
    pub mantissa: String,
    pub precision: i64,
}

impl PadicNumber {
    pub fn to_doc(&self) -> PadicDoc {
        match &self.repr {
            Repr::Zero => PadicDoc {
                valuation: None,
                mantissa: String::new(),
                precision: i64::MAX,
            },
            Repr::ZeroAt { abs } => PadicDoc {
                valuation: None,
                mantissa: String::new(),
                precision: *abs,
            },
            Repr::Unit { val, prec, .. } => PadicDoc {
                valuation: Some(*val),
                mantissa: self
                    .mantissa_digits()
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                precision: val + *prec as i64,
            },
        }
    }
}
