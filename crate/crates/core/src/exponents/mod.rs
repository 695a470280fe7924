//! The finitely generated real exponent group and its certified order.
//!
//! Real exponents are represented formally as rational vectors over a
//! declared basis of named symbols. Each symbol carries a certified interval
//! (exact rational midpoint plus nonnegative rational radius). Ordering two
//! formally distinct exponents uses interval arithmetic with automatic
//! precision escalation: radii are halved a bounded number of times, and if
//! the intervals still overlap the comparison aborts with a precision error
//! rather than guessing.

mod family;
mod novikov;

pub use family::FamilySeries;
pub use novikov::NovikovSeries;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_rational, parse_rational};

/// Number of radius halvings attempted before a comparison gives up.
const MAX_HALVINGS: u32 = 64;

#[derive(Debug, Error)]
pub enum ExponentError {
    #[error("exponent bases differ")]
    BasisMismatch,
    #[error("series cutoffs differ")]
    CutoffMismatch,
    #[error("interval comparison unresolved after precision escalation: {0}")]
    PrecisionOverlap(String),
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("evaluation point {point} outside window [{lo}, {hi}]")]
    OutsideWindow {
        point: String,
        lo: String,
        hi: String,
    },
    #[error("{0}")]
    NotCertified(String),
    #[error("document error: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, ExponentError>;

/// Role of a basis symbol: disc energy or flux period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Energy,
    Flux,
}

/// A named basis element with a certified real interval value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub role: Role,
    /// Exact rational midpoint of the certified interval.
    pub midpoint: BigRational,
    /// Nonnegative radius; zero means the value is exactly the midpoint.
    pub radius: BigRational,
}

/// Ordered list of basis symbols spanning the exponent group.
#[derive(Debug, PartialEq, Eq)]
pub struct ExponentBasis {
    symbols: Vec<Symbol>,
    independence_declared: bool,
}

impl ExponentBasis {
    pub fn new(symbols: Vec<Symbol>, independence_declared: bool) -> Result<Arc<Self>> {
        let mut names = std::collections::BTreeSet::new();
        for s in &symbols {
            if !names.insert(s.name.clone()) {
                return Err(ExponentError::InvalidBasis(format!(
                    "duplicate symbol name {:?}",
                    s.name
                )));
            }
            if s.radius.is_negative() {
                return Err(ExponentError::InvalidBasis(format!(
                    "negative radius on {:?}",
                    s.name
                )));
            }
            if s.role == Role::Energy && !s.midpoint.is_positive() {
                return Err(ExponentError::InvalidBasis(format!(
                    "energy symbol {:?} must have strictly positive midpoint",
                    s.name
                )));
            }
        }
        Ok(Arc::new(ExponentBasis {
            symbols,
            independence_declared,
        }))
    }

    pub fn rank(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn independence_declared(&self) -> bool {
        self.independence_declared
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    /// Indices of symbols with the given role.
    pub fn indices_with_role(&self, role: Role) -> Vec<usize> {
        self.symbols
            .iter()
            .enumerate()
            .filter(|(_, s)| s.role == role)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Check that two [`Arc<ExponentBasis>`] refer to the same basis.
pub fn same_basis(a: &Arc<ExponentBasis>, b: &Arc<ExponentBasis>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A formal exponent: a rational coordinate vector over a basis.
#[derive(Clone)]
pub struct Exponent {
    basis: Arc<ExponentBasis>,
    coords: Vec<BigRational>,
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .zip(self.basis.symbols())
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, s)| format!("{}*{}", format_rational(c), s.name))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        same_basis(&self.basis, &other.basis) && self.coords == other.coords
    }
}
impl Eq for Exponent {}

impl Exponent {
    pub fn new(basis: &Arc<ExponentBasis>, coords: Vec<BigRational>) -> Result<Self> {
        if coords.len() != basis.rank() {
            return Err(ExponentError::InvalidBasis(format!(
                "coordinate vector of length {} over basis of rank {}",
                coords.len(),
                basis.rank()
            )));
        }
        Ok(Exponent {
            basis: Arc::clone(basis),
            coords,
        })
    }

    pub fn zero(basis: &Arc<ExponentBasis>) -> Self {
        Exponent {
            basis: Arc::clone(basis),
            coords: vec![BigRational::zero(); basis.rank()],
        }
    }

    /// Exponent with a single coordinate 1 at `index`.
    pub fn unit(basis: &Arc<ExponentBasis>, index: usize) -> Self {
        let mut coords = vec![BigRational::zero(); basis.rank()];
        coords[index] = BigRational::from_integer(1.into());
        Exponent {
            basis: Arc::clone(basis),
            coords,
        }
    }

    pub fn basis(&self) -> &Arc<ExponentBasis> {
        &self.basis
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Exponent) -> Result<Exponent> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(ExponentError::BasisMismatch);
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Exponent {
            basis: Arc::clone(&self.basis),
            coords,
        })
    }

    pub fn sub(&self, other: &Exponent) -> Result<Exponent> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(ExponentError::BasisMismatch);
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Exponent {
            basis: Arc::clone(&self.basis),
            coords,
        })
    }

    pub fn scale(&self, factor: &BigRational) -> Exponent {
        Exponent {
            basis: Arc::clone(&self.basis),
            coords: self.coords.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn neg(&self) -> Exponent {
        Exponent {
            basis: Arc::clone(&self.basis),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    /// Exact rational midpoint of the real-value interval.
    pub fn value_midpoint(&self) -> BigRational {
        self.coords
            .iter()
            .zip(self.basis.symbols())
            .map(|(c, s)| c * &s.midpoint)
            .sum()
    }

    /// Radius of the real-value interval at declared precision.
    pub fn value_radius(&self) -> BigRational {
        self.coords
            .iter()
            .zip(self.basis.symbols())
            .map(|(c, s)| c.abs() * &s.radius)
            .sum()
    }

    /// Lower bound of the certified interval.
    pub fn value_lower(&self) -> BigRational {
        self.value_midpoint() - self.value_radius()
    }

    /// Upper bound of the certified interval.
    pub fn value_upper(&self) -> BigRational {
        self.value_midpoint() + self.value_radius()
    }

    /// Compare real values. Equal coordinate vectors compare equal;
    /// otherwise the certified intervals must separate after escalation.
    pub fn cmp_real(&self, other: &Exponent) -> Result<Ordering> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(ExponentError::BasisMismatch);
        }
        if self.coords == other.coords {
            return Ok(Ordering::Equal);
        }
        let mid = self.value_midpoint() - other.value_midpoint();
        let rad = self.value_radius() + other.value_radius();
        separation_sign(&mid, &rad).map(|s| match s {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => unreachable!(),
        })
    }

    /// Certify the real value strictly positive.
    pub fn is_positive_certified(&self) -> Result<bool> {
        if self.is_zero() {
            return Ok(false);
        }
        let mid = self.value_midpoint();
        let rad = self.value_radius();
        separation_sign(&mid, &rad).map(|s| s > 0)
    }

    /// Compare the real value against an exact rational.
    pub fn cmp_rational(&self, q: &BigRational) -> Result<Ordering> {
        let mid = self.value_midpoint() - q;
        let rad = self.value_radius();
        if mid.is_zero() && rad.is_zero() {
            return Ok(Ordering::Equal);
        }
        separation_sign(&mid, &rad).map(|s| match s {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => unreachable!(),
        })
    }
}

/// Decide the sign of a value known to lie in `mid ± rad`, escalating
/// precision by halving `rad` up to [`MAX_HALVINGS`] times.
fn separation_sign(mid: &BigRational, rad: &BigRational) -> Result<i8> {
    if mid.is_zero() {
        return Err(ExponentError::PrecisionOverlap(format!(
            "midpoints coincide exactly (radius {})",
            format_rational(rad),
        )));
    }
    if rad.is_zero() {
        return Ok(if mid.is_positive() { 1 } else { -1 });
    }
    // |mid| > rad / 2^k for some k <= MAX_HALVINGS?
    let mut shifted = mid.abs();
    for _ in 0..=MAX_HALVINGS {
        if shifted > *rad {
            return Ok(if mid.is_positive() { 1 } else { -1 });
        }
        shifted = shifted * BigRational::from_integer(2.into());
    }
    Err(ExponentError::PrecisionOverlap(format!(
        "|{}| <= {} / 2^{}",
        format_rational(mid),
        format_rational(rad),
        MAX_HALVINGS
    )))
}

// ---------------------------------------------------------------------------
// Document (de)serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SymbolDoc {
    name: String,
    role: Role,
    midpoint: String,
    radius: String,
}

#[derive(Serialize, Deserialize)]
pub struct BasisDoc {
    symbols: Vec<SymbolDoc>,
    independence_declared: bool,
}

impl ExponentBasis {
    pub fn to_doc(&self) -> BasisDoc {
        BasisDoc {
            symbols: self
                .symbols
                .iter()
                .map(|s| SymbolDoc {
                    name: s.name.clone(),
                    role: s.role,
                    midpoint: format_rational(&s.midpoint),
                    radius: format_rational(&s.radius),
                })
                .collect(),
            independence_declared: self.independence_declared,
        }
    }

    pub fn from_doc(doc: &BasisDoc) -> Result<Arc<Self>> {
        let symbols = doc
            .symbols
            .iter()
            .map(|s| {
                Ok(Symbol {
                    name: s.name.clone(),
                    role: s.role,
                    midpoint: parse_rational(&s.midpoint).map_err(ExponentError::Document)?,
                    radius: parse_rational(&s.radius).map_err(ExponentError::Document)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ExponentBasis::new(symbols, doc.independence_declared)
    }
}

impl Exponent {
    pub fn coords_doc(&self) -> Vec<String> {
        self.coords.iter().map(format_rational).collect()
    }

    pub fn from_coords_doc(basis: &Arc<ExponentBasis>, coords: &[String]) -> Result<Self> {
        let coords = coords
            .iter()
            .map(|c| parse_rational(c).map_err(ExponentError::Document))
            .collect::<Result<Vec<_>>>()?;
        Exponent::new(basis, coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_i};

    pub(crate) fn test_basis() -> Arc<ExponentBasis> {
        // u = 1 exactly, s ~ sqrt(2), t ~ sqrt(3) as certified intervals.
        ExponentBasis::new(
            vec![
                Symbol {
                    name: "u".into(),
                    role: Role::Energy,
                    midpoint: rat_i(1),
                    radius: rat_i(0),
                },
                Symbol {
                    name: "s".into(),
                    role: Role::Energy,
                    midpoint: rat(665_857, 470_832), // sqrt(2) convergent
                    radius: rat(1, 100_000_000_000),
                },
                Symbol {
                    name: "t".into(),
                    role: Role::Flux,
                    midpoint: rat(716_035, 413_403), // sqrt(3) convergent
                    radius: rat(1, 100_000_000_000),
                },
            ],
            true,
        )
        .unwrap()
    }

    #[test]
    fn comparison_is_decidable_and_total() {
        let b = test_basis();
        let one = Exponent::new(&b, vec![rat_i(1), rat_i(0), rat_i(0)]).unwrap();
        let s = Exponent::new(&b, vec![rat_i(0), rat_i(1), rat_i(0)]).unwrap();
        let t = Exponent::new(&b, vec![rat_i(0), rat_i(0), rat_i(1)]).unwrap();
        assert_eq!(one.cmp_real(&s).unwrap(), Ordering::Less);
        assert_eq!(t.cmp_real(&s).unwrap(), Ordering::Greater);
        assert_eq!(s.cmp_real(&s).unwrap(), Ordering::Equal);
        // 2*s vs s + 1: sqrt(2) > 1.
        let two_s = s.scale(&rat_i(2));
        let s_plus_one = s.add(&one).unwrap();
        assert_eq!(two_s.cmp_real(&s_plus_one).unwrap(), Ordering::Greater);
    }

    #[test]
    fn formally_distinct_equal_values_abort() {
        // Basis with a declared dependence: v = 2u exactly.
        let b = ExponentBasis::new(
            vec![
                Symbol {
                    name: "u".into(),
                    role: Role::Energy,
                    midpoint: rat_i(1),
                    radius: rat_i(0),
                },
                Symbol {
                    name: "v".into(),
                    role: Role::Energy,
                    midpoint: rat_i(2),
                    radius: rat_i(0),
                },
            ],
            false,
        )
        .unwrap();
        let two_u = Exponent::new(&b, vec![rat_i(2), rat_i(0)]).unwrap();
        let v = Exponent::new(&b, vec![rat_i(0), rat_i(1)]).unwrap();
        assert!(matches!(
            two_u.cmp_real(&v),
            Err(ExponentError::PrecisionOverlap(_))
        ));
    }

    #[test]
    fn positivity_certification() {
        let b = test_basis();
        // 3*sqrt(2) - 1 > 0
        let x = Exponent::new(&b, vec![rat_i(-1), rat_i(3), rat_i(0)]).unwrap();
        assert!(x.is_positive_certified().unwrap());
        let y = x.neg();
        assert!(!y.is_positive_certified().unwrap());
    }

    #[test]
    fn invalid_bases_rejected() {
        assert!(ExponentBasis::new(
            vec![
                Symbol {
                    name: "a".into(),
                    role: Role::Energy,
                    midpoint: rat_i(1),
                    radius: rat_i(0),
                },
                Symbol {
                    name: "a".into(),
                    role: Role::Flux,
                    midpoint: rat_i(1),
                    radius: rat_i(0),
                },
            ],
            true,
        )
        .is_err());
        assert!(ExponentBasis::new(
            vec![Symbol {
                name: "e".into(),
                role: Role::Energy,
                midpoint: rat_i(0),
                radius: rat_i(0),
            }],
            true,
        )
        .is_err());
    }

    #[test]
    fn basis_doc_round_trip() {
        let b = test_basis();
        let json = serde_json::to_string(&b.to_doc()).unwrap();
        let doc: BasisDoc = serde_json::from_str(&json).unwrap();
        let b2 = ExponentBasis::from_doc(&doc).unwrap();
        assert!(same_basis(&b, &b2));
    }
}
