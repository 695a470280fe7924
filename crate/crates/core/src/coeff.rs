//! The universal coefficient scalar: one enum over every base ring the
//! family machinery uses, with a ring-context companion carrying the data
//! needed to produce zeros and ones.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exponents::{Exponent, ExponentBasis, ExponentError, FamilySeries, NovikovSeries};
use crate::padics::{PadicError, PadicNumber, TateSeries};

#[derive(Debug, Error)]
pub enum CoefError {
    #[error("mixed coefficient rings: {0} vs {1}")]
    Mixed(&'static str, &'static str),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

pub type Result<T> = std::result::Result<T, CoefError>;

/// A scalar in one of the supported coefficient rings.
#[derive(Debug, Clone, PartialEq)]
pub enum Coef {
    /// Exact rational.
    Rat(BigRational),
    /// Truncated Novikov series (point ring over K or Lambda).
    Nov(NovikovSeries),
    /// One-parameter family ring in z.
    Fam(FamilySeries),
    /// Truncated Tate series in one or two variables.
    Tate(TateSeries),
    /// p-adic point.
    Padic(PadicNumber),
}

impl Coef {
    pub fn tag(&self) -> &'static str {
        match self {
            Coef::Rat(_) => "rational",
            Coef::Nov(_) => "novikov",
            Coef::Fam(_) => "novikov-family",
            Coef::Tate(_) => "tate",
            Coef::Padic(_) => "padic",
        }
    }

    pub fn add(&self, other: &Coef) -> Result<Coef> {
        match (self, other) {
            (Coef::Rat(a), Coef::Rat(b)) => Ok(Coef::Rat(a + b)),
            (Coef::Nov(a), Coef::Nov(b)) => Ok(Coef::Nov(a.add(b)?)),
            (Coef::Fam(a), Coef::Fam(b)) => Ok(Coef::Fam(a.add(b)?)),
            (Coef::Tate(a), Coef::Tate(b)) => Ok(Coef::Tate(a.add(b)?)),
            (Coef::Padic(a), Coef::Padic(b)) => Ok(Coef::Padic(a.add(b)?)),
            (a, b) => Err(CoefError::Mixed(a.tag(), b.tag())),
        }
    }

    pub fn mul(&self, other: &Coef) -> Result<Coef> {
        match (self, other) {
            (Coef::Rat(a), Coef::Rat(b)) => Ok(Coef::Rat(a * b)),
            (Coef::Nov(a), Coef::Nov(b)) => Ok(Coef::Nov(a.mul(b)?)),
            (Coef::Fam(a), Coef::Fam(b)) => Ok(Coef::Fam(a.mul(b)?)),
            (Coef::Tate(a), Coef::Tate(b)) => Ok(Coef::Tate(a.mul(b)?)),
            (Coef::Padic(a), Coef::Padic(b)) => Ok(Coef::Padic(a.mul(b)?)),
            (a, b) => Err(CoefError::Mixed(a.tag(), b.tag())),
        }
    }

    pub fn neg(&self) -> Coef {
        match self {
            Coef::Rat(a) => Coef::Rat(-a),
            Coef::Nov(a) => Coef::Nov(a.neg()),
            Coef::Fam(a) => Coef::Fam(a.neg()),
            Coef::Tate(a) => Coef::Tate(a.neg()),
            Coef::Padic(a) => Coef::Padic(a.neg()),
        }
    }

    pub fn sub(&self, other: &Coef) -> Result<Coef> {
        self.add(&other.neg())
    }

    /// Scale by an exact rational.
    pub fn scale_rat(&self, c: &BigRational) -> Result<Coef> {
        match self {
            Coef::Rat(a) => Ok(Coef::Rat(a * c)),
            Coef::Nov(a) => Ok(Coef::Nov(a.scale(c))),
            Coef::Fam(a) => {
                let s = NovikovSeries::monomial(
                    c.clone(),
                    Exponent::zero(a.basis()),
                    a.cutoff().clone(),
                    true,
                )?;
                Ok(Coef::Fam(a.mul(&FamilySeries::constant(s, a.window().clone()))?))
            }
            Coef::Tate(a) => {
                let s = PadicNumber::from_rational(
                    a.prime(),
                    c,
                    PadicNumber::max_precision(a.prime()).min(48),
                )?;
                Ok(Coef::Tate(a.scale(&s)?))
            }
            Coef::Padic(a) => {
                let s = PadicNumber::from_rational(
                    a.prime(),
                    c,
                    PadicNumber::max_precision(a.prime()).min(48),
                )?;
                Ok(Coef::Padic(a.mul(&s)?))
            }
        }
    }

    /// Zero in the quotient by the ring's truncation ideal (at the value's
    /// own precision floor).
    pub fn is_truncation_zero(&self) -> bool {
        match self {
            Coef::Rat(a) => a.is_zero(),
            Coef::Nov(a) => a.is_zero(),
            Coef::Fam(a) => a.is_zero(),
            Coef::Tate(a) => a.is_zero_at_precision(),
            Coef::Padic(a) => a.is_zero_at_precision(),
        }
    }
}

/// Ring context: everything needed to mint zeros/ones and to describe the
/// truncation of a coefficient ring.
#[derive(Debug, Clone)]
pub enum RingCtx {
    Rat,
    Nov {
        basis: Arc<ExponentBasis>,
        cutoff: Exponent,
        polynomial: bool,
    },
    Fam {
        basis: Arc<ExponentBasis>,
        cutoff: Exponent,
        window: (BigRational, BigRational),
    },
    Tate {
        prime: u64,
        vars: u8,
        degree: u32,
        radius: u32,
    },
    Padic {
        prime: u64,
        precision: u32,
    },
}

impl RingCtx {
    pub fn tag(&self) -> &'static str {
        match self {
            RingCtx::Rat => "rational",
            RingCtx::Nov { .. } => "novikov",
            RingCtx::Fam { .. } => "novikov-family",
            RingCtx::Tate { .. } => "tate",
            RingCtx::Padic { .. } => "padic",
        }
    }

    pub fn zero(&self) -> Coef {
        match self {
            RingCtx::Rat => Coef::Rat(BigRational::zero()),
            RingCtx::Nov {
                basis,
                cutoff,
                polynomial,
            } => Coef::Nov(NovikovSeries::zero(basis, cutoff.clone(), *polynomial)),
            RingCtx::Fam {
                basis,
                cutoff,
                window,
            } => Coef::Fam(FamilySeries::zero(basis, window.clone(), cutoff.clone())),
            RingCtx::Tate {
                prime,
                vars,
                degree,
                radius,
            } => {
                let mut t = TateSeries::zero(*prime, *vars, *degree);
                t.set_radius(*radius);
                Coef::Tate(t)
            }
            RingCtx::Padic { prime, .. } => Coef::Padic(PadicNumber::zero(*prime)),
        }
    }

    pub fn one(&self) -> Result<Coef> {
        Ok(match self {
            RingCtx::Rat => Coef::Rat(BigRational::one()),
            RingCtx::Nov {
                basis,
                cutoff,
                polynomial,
            } => Coef::Nov(NovikovSeries::one(basis, cutoff.clone(), *polynomial)),
            RingCtx::Fam {
                basis,
                cutoff,
                window,
            } => Coef::Fam(FamilySeries::constant(
                NovikovSeries::one(basis, cutoff.clone(), true),
                window.clone(),
            )),
            RingCtx::Tate {
                prime,
                vars,
                degree,
                radius,
            } => {
                let one = PadicNumber::one(*prime, PadicNumber::max_precision(*prime).min(48))?;
                let mut t = TateSeries::constant(one, *vars, *degree);
                t.set_radius(*radius);
                Coef::Tate(t)
            }
            RingCtx::Padic { prime, precision } => {
                Coef::Padic(PadicNumber::one(*prime, *precision)?)
            }
        })
    }
}
