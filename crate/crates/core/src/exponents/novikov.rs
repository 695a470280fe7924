//! Truncated Novikov series over the formal exponent group.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{same_basis, Exponent, ExponentBasis, ExponentError, Result};
use crate::rational::{format_rational, parse_rational};

/// A finite sum of rational multiples of `T^g`, `g` an [`Exponent`], reduced
/// modulo the ideal of terms with exponent at least the cutoff `E_max`
/// (unless flagged polynomial, in which case the sum is exact).
///
/// Terms are sorted with strictly increasing real exponent value and carry
/// no zero coefficients; the zero series is the empty term list.
#[derive(Clone, PartialEq, Eq)]
pub struct NovikovSeries {
    basis: Arc<ExponentBasis>,
    terms: Vec<(BigRational, Exponent)>,
    cutoff: Exponent,
    polynomial: bool,
}

impl fmt::Debug for NovikovSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, e)| format!("{}*T^({:?})", format_rational(c), e))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl NovikovSeries {
    /// Normalizing constructor: merges equal exponent vectors, drops zero
    /// coefficients, sorts by real exponent value, and truncates at the
    /// cutoff unless `polynomial`.
    pub fn new(
        basis: &Arc<ExponentBasis>,
        terms: Vec<(BigRational, Exponent)>,
        cutoff: Exponent,
        polynomial: bool,
    ) -> Result<Self> {
        for (_, e) in &terms {
            if !same_basis(e.basis(), basis) {
                return Err(ExponentError::BasisMismatch);
            }
        }
        if !same_basis(cutoff.basis(), basis) {
            return Err(ExponentError::BasisMismatch);
        }
        let mut merged: Vec<(BigRational, Exponent)> = Vec::with_capacity(terms.len());
        for (c, e) in terms {
            if c.is_zero() {
                continue;
            }
            match merged.iter_mut().find(|(_, f)| *f == e) {
                Some((acc, _)) => *acc += c,
                None => merged.push((c, e)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        // Sort by real value; comparison failures propagate.
        let mut sort_err = None;
        merged.sort_by(|(_, a), (_, b)| match a.cmp_real(b) {
            Ok(o) => o,
            Err(e) => {
                sort_err.get_or_insert(e);
                std::cmp::Ordering::Equal
            }
        });
        if let Some(e) = sort_err {
            return Err(e);
        }
        let mut out = NovikovSeries {
            basis: Arc::clone(basis),
            terms: merged,
            cutoff,
            polynomial,
        };
        if !polynomial {
            out.truncate_in_place()?;
        }
        Ok(out)
    }

    fn truncate_in_place(&mut self) -> Result<()> {
        let cutoff = self.cutoff.clone();
        let mut kept = Vec::with_capacity(self.terms.len());
        for (c, e) in std::mem::take(&mut self.terms) {
            if e.cmp_real(&cutoff)? == std::cmp::Ordering::Less {
                kept.push((c, e));
            }
        }
        self.terms = kept;
        Ok(())
    }

    pub fn zero(basis: &Arc<ExponentBasis>, cutoff: Exponent, polynomial: bool) -> Self {
        NovikovSeries {
            basis: Arc::clone(basis),
            terms: Vec::new(),
            cutoff,
            polynomial,
        }
    }

    pub fn one(basis: &Arc<ExponentBasis>, cutoff: Exponent, polynomial: bool) -> Self {
        NovikovSeries {
            basis: Arc::clone(basis),
            terms: vec![(BigRational::one(), Exponent::zero(basis))],
            cutoff,
            polynomial,
        }
    }

    /// The monomial `c * T^e`.
    pub fn monomial(
        c: BigRational,
        e: Exponent,
        cutoff: Exponent,
        polynomial: bool,
    ) -> Result<Self> {
        let basis = Arc::clone(e.basis());
        NovikovSeries::new(&basis, vec![(c, e)], cutoff, polynomial)
    }

    pub fn basis(&self) -> &Arc<ExponentBasis> {
        &self.basis
    }

    pub fn terms(&self) -> &[(BigRational, Exponent)] {
        &self.terms
    }

    pub fn cutoff(&self) -> &Exponent {
        &self.cutoff
    }

    pub fn is_polynomial(&self) -> bool {
        self.polynomial
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(ExponentError::BasisMismatch);
        }
        if self.cutoff != other.cutoff {
            return Err(ExponentError::CutoffMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        NovikovSeries::new(
            &self.basis,
            terms,
            self.cutoff.clone(),
            self.polynomial && other.polynomial,
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        NovikovSeries {
            basis: Arc::clone(&self.basis),
            terms: self.terms.iter().map(|(c, e)| (-c, e.clone())).collect(),
            cutoff: self.cutoff.clone(),
            polynomial: self.polynomial,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return NovikovSeries::zero(&self.basis, self.cutoff.clone(), self.polynomial);
        }
        NovikovSeries {
            basis: Arc::clone(&self.basis),
            terms: self.terms.iter().map(|(a, e)| (a * c, e.clone())).collect(),
            cutoff: self.cutoff.clone(),
            polynomial: self.polynomial,
        }
    }

    /// Multiply every term by `c * T^e`.
    pub fn mul_monomial(&self, c: &BigRational, e: &Exponent) -> Result<Self> {
        if c.is_zero() {
            return Ok(NovikovSeries::zero(
                &self.basis,
                self.cutoff.clone(),
                self.polynomial,
            ));
        }
        let terms = self
            .terms
            .iter()
            .map(|(a, f)| Ok((a * c, f.add(e)?)))
            .collect::<Result<Vec<_>>>()?;
        NovikovSeries::new(&self.basis, terms, self.cutoff.clone(), self.polynomial)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, e) in &self.terms {
            for (b, f) in &other.terms {
                terms.push((a * b, e.add(f)?));
            }
        }
        // The polynomial flag survives only if the exact product stays below
        // the cutoff; the constructor re-truncates otherwise.
        let exact = NovikovSeries::new(
            &self.basis,
            terms,
            self.cutoff.clone(),
            self.polynomial && other.polynomial,
        )?;
        if exact.polynomial {
            let over = exact
                .terms
                .iter()
                .map(|(_, e)| e.cmp_real(&exact.cutoff))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .any(|o| o != std::cmp::Ordering::Less);
            if over {
                return NovikovSeries::new(&self.basis, exact.terms, self.cutoff.clone(), false);
            }
        }
        Ok(exact)
    }

    /// T-adic valuation: exponent of the leading term, `None` for zero
    /// (representing +infinity).
    pub fn valuation(&self) -> Option<&Exponent> {
        self.terms.first().map(|(_, e)| e)
    }

    /// Leading coefficient, `None` for zero.
    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.terms.first().map(|(c, _)| c)
    }

    /// Multiplicative inverse, computed as a geometric series and exact on
    /// all terms with exponent value below `bound_value` above the leading
    /// exponent's negative. Requires a nonzero series.
    pub fn inverse_mod(&self, bound: &Exponent) -> Result<Self> {
        let (lead_c, lead_e) = match self.terms.first() {
            Some((c, e)) => (c.clone(), e.clone()),
            None => {
                return Err(ExponentError::NotCertified(
                    "inverse of the zero series".into(),
                ))
            }
        };
        // self = lead * (1 + n), val(n) > 0.
        let lead_inv_c = BigRational::one() / &lead_c;
        let lead_inv_e = lead_e.neg();
        let mut tail_terms = Vec::new();
        for (c, e) in self.terms.iter().skip(1) {
            tail_terms.push((c / &lead_c, e.sub(&lead_e)?));
        }
        let cutoff_for_inv = bound.clone();
        let n = NovikovSeries::new(&self.basis, tail_terms, cutoff_for_inv.clone(), false)?;
        // 1 + (-n) + n^2 - ... until the power vanishes modulo the bound.
        let one = NovikovSeries::one(&self.basis, cutoff_for_inv.clone(), false);
        let mut acc = one.clone();
        let mut pow = one;
        let minus_n = n.neg();
        loop {
            pow = pow.mul(&minus_n)?;
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow)?;
        }
        let inv = acc.mul_monomial(&lead_inv_c, &lead_inv_e)?;
        // Restore the caller's cutoff.
        NovikovSeries::new(&self.basis, inv.terms, self.cutoff.clone(), false)
    }

    /// Change the cutoff (re-truncating as needed).
    pub fn with_cutoff(&self, cutoff: Exponent, polynomial: bool) -> Result<Self> {
        NovikovSeries::new(&self.basis, self.terms.clone(), cutoff, polynomial)
    }
}

// ---------------------------------------------------------------------------
// Documents
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct NovikovSeriesDoc {
    /// Arrays of `[coefficient-string, coordinate-array]`.
    pub terms: Vec<(String, Vec<String>)>,
    pub cutoff: Vec<String>,
    pub polynomial: bool,
}

impl NovikovSeries {
    pub fn to_doc(&self) -> NovikovSeriesDoc {
        NovikovSeriesDoc {
            terms: self
                .terms
                .iter()
                .map(|(c, e)| (format_rational(c), e.coords_doc()))
                .collect(),
            cutoff: self.cutoff.coords_doc(),
            polynomial: self.polynomial,
        }
    }

    pub fn from_doc(basis: &Arc<ExponentBasis>, doc: &NovikovSeriesDoc) -> Result<Self> {
        let cutoff = Exponent::from_coords_doc(basis, &doc.cutoff)?;
        let terms = doc
            .terms
            .iter()
            .map(|(c, coords)| {
                Ok((
                    parse_rational(c).map_err(ExponentError::Document)?,
                    Exponent::from_coords_doc(basis, coords)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        NovikovSeries::new(basis, terms, cutoff, doc.polynomial)
    }
}
