//! The one-parameter family coefficient ring in `z` over Novikov series.
//!
//! A [`FamilySeries`] is a finite sum of monomials `a_r * z^r` with Novikov
//! coefficients `a_r` and exponents `r` drawn from the same formal exponent
//! group, together with a window `(b, c)`, `b < 0 < c`. Evaluation at a
//! rational `a` in the window substitutes `z^r -> T^{a r}`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{
    same_basis, Exponent, ExponentBasis, ExponentError, NovikovSeries, Result,
};
use crate::rational::{format_rational, parse_rational};

#[derive(Clone, PartialEq, Eq)]
pub struct FamilySeries {
    basis: Arc<ExponentBasis>,
    /// Monomials `(a_r, r)` with distinct exponent vectors `r`.
    terms: Vec<(NovikovSeries, Exponent)>,
    window: (BigRational, BigRational),
    cutoff: Exponent,
    /// True when a tail below the cutoff has been discarded; evaluation and
    /// nonvanishing certificates then account for the missing tail.
    truncated: bool,
}

impl fmt::Debug for FamilySeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(a, r)| format!("({:?})*z^({:?})", a, r))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl FamilySeries {
    pub fn new(
        basis: &Arc<ExponentBasis>,
        terms: Vec<(NovikovSeries, Exponent)>,
        window: (BigRational, BigRational),
        cutoff: Exponent,
        truncated: bool,
    ) -> Result<Self> {
        if !(window.0.is_negative() && window.1.is_positive()) {
            return Err(ExponentError::InvalidBasis(format!(
                "window ({}, {}) must satisfy b < 0 < c",
                format_rational(&window.0),
                format_rational(&window.1)
            )));
        }
        let mut merged: Vec<(NovikovSeries, Exponent)> = Vec::new();
        for (a, r) in terms {
            if !same_basis(a.basis(), basis) || !same_basis(r.basis(), basis) {
                return Err(ExponentError::BasisMismatch);
            }
            if a.is_zero() {
                continue;
            }
            match merged.iter_mut().find(|(_, s)| *s == r) {
                Some((acc, _)) => *acc = acc.add(&a)?,
                None => merged.push((a, r)),
            }
        }
        merged.retain(|(a, _)| !a.is_zero());
        let mut sort_err = None;
        merged.sort_by(|(_, a), (_, b)| match a.cmp_real(b) {
            Ok(o) => o,
            Err(e) => {
                sort_err.get_or_insert(e);
                Ordering::Equal
            }
        });
        if let Some(e) = sort_err {
            return Err(e);
        }
        Ok(FamilySeries {
            basis: Arc::clone(basis),
            terms: merged,
            window,
            cutoff,
            truncated,
        })
    }

    pub fn zero(
        basis: &Arc<ExponentBasis>,
        window: (BigRational, BigRational),
        cutoff: Exponent,
    ) -> Self {
        FamilySeries {
            basis: Arc::clone(basis),
            terms: Vec::new(),
            window,
            cutoff,
            truncated: false,
        }
    }

    /// Constant family equal to a Novikov series.
    pub fn constant(a: NovikovSeries, window: (BigRational, BigRational)) -> Self {
        let basis = Arc::clone(a.basis());
        let cutoff = a.cutoff().clone();
        let truncated = !a.is_polynomial();
        let terms = if a.is_zero() {
            Vec::new()
        } else {
            vec![(a, Exponent::zero(&basis))]
        };
        FamilySeries {
            basis,
            terms,
            window,
            cutoff,
            truncated,
        }
    }

    /// The monomial `a * z^r`.
    pub fn monomial(
        a: NovikovSeries,
        r: Exponent,
        window: (BigRational, BigRational),
    ) -> Result<Self> {
        let basis = Arc::clone(a.basis());
        let cutoff = a.cutoff().clone();
        let truncated = !a.is_polynomial();
        FamilySeries::new(&basis, vec![(a, r)], window, cutoff, truncated)
    }

    pub fn basis(&self) -> &Arc<ExponentBasis> {
        &self.basis
    }

    pub fn terms(&self) -> &[(NovikovSeries, Exponent)] {
        &self.terms
    }

    pub fn window(&self) -> &(BigRational, BigRational) {
        &self.window
    }

    pub fn cutoff(&self) -> &Exponent {
        &self.cutoff
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
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
        let window = (
            self.window.0.clone().max(other.window.0.clone()),
            self.window.1.clone().min(other.window.1.clone()),
        );
        FamilySeries::new(
            &self.basis,
            terms,
            window,
            self.cutoff.clone(),
            self.truncated || other.truncated,
        )
    }

    pub fn neg(&self) -> Self {
        FamilySeries {
            basis: Arc::clone(&self.basis),
            terms: self.terms.iter().map(|(a, r)| (a.neg(), r.clone())).collect(),
            window: self.window.clone(),
            cutoff: self.cutoff.clone(),
            truncated: self.truncated,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, r) in &self.terms {
            for (b, s) in &other.terms {
                terms.push((a.mul(b)?, r.add(s)?));
            }
        }
        let window = (
            self.window.0.clone().max(other.window.0.clone()),
            self.window.1.clone().min(other.window.1.clone()),
        );
        FamilySeries::new(
            &self.basis,
            terms,
            window,
            self.cutoff.clone(),
            self.truncated || other.truncated,
        )
    }

    /// Ring-homomorphic evaluation at `z = T^a` for rational `a` in the
    /// window.
    pub fn ev_at(&self, a: &BigRational) -> Result<NovikovSeries> {
        if *a < self.window.0 || *a > self.window.1 {
            return Err(ExponentError::OutsideWindow {
                point: format_rational(a),
                lo: format_rational(&self.window.0),
                hi: format_rational(&self.window.1),
            });
        }
        let mut acc = NovikovSeries::zero(&self.basis, self.cutoff.clone(), !self.truncated);
        for (coeff, r) in &self.terms {
            let shift = r.scale(a);
            let one = num_traits::One::one();
            acc = acc.add(&coeff.mul_monomial(&one, &shift)?)?;
        }
        Ok(acc)
    }

    /// Certify a `delta > 0` such that `ev_at(self, t)` is nonzero for every
    /// rational `|t| < delta` inside the window.
    ///
    /// Requires `ev_at(self, 0) != 0`. The certificate works with the finite
    /// family of affine exponent functions `e_i(t) = val(alpha_i) + t *
    /// val(r_i)`, one per retained monomial `c_i T^{alpha_i} z^{r_i}`: below
    /// the first crossing time all exponent values are pairwise distinct, so
    /// no cancellation can occur and the evaluation stays nonzero.
    pub fn window_nonvanishing(&self) -> Result<BigRational> {
        let at_zero = self.ev_at(&BigRational::zero())?;
        if at_zero.is_zero() {
            return Err(ExponentError::NotCertified(
                "series vanishes at z = 1 (precondition violated)".into(),
            ));
        }
        // Flatten into lines: (alpha exponent, r exponent) pairs.
        let mut lines: Vec<(&Exponent, &Exponent)> = Vec::new();
        for (coeff, r) in &self.terms {
            for (_, alpha) in coeff.terms() {
                lines.push((alpha, r));
            }
        }
        let mut delta = self.window.1.clone().min(-self.window.0.clone());
        for i in 0..lines.len() {
            for j in (i + 1)..lines.len() {
                let (ai, ri) = lines[i];
                let (aj, rj) = lines[j];
                let slope_cmp = ri.cmp_real(rj)?;
                if slope_cmp == Ordering::Equal {
                    if ri != rj || ai.cmp_real(aj)? == Ordering::Equal {
                        // Formally distinct data with identical real lines
                        // cannot be separated at any t.
                        if ai.cmp_real(aj)? == Ordering::Equal {
                            return Err(ExponentError::PrecisionOverlap(
                                "two retained monomials define the same exponent line".into(),
                            ));
                        }
                    }
                    continue; // parallel lines never cross
                }
                match ai.cmp_real(aj)? {
                    Ordering::Equal => continue, // crossing exactly at t = 0
                    _ => {
                        // |t_cross| >= |d_alpha|_lower / |d_slope|_upper
                        let da = ai.sub(aj)?;
                        let dr = ri.sub(rj)?;
                        let da_low = abs_lower(&da);
                        let dr_up = abs_upper(&dr);
                        if !da_low.is_positive() {
                            return Err(ExponentError::NotCertified(
                                "truncation too coarse to certify a crossing gap".into(),
                            ));
                        }
                        let bound = da_low / dr_up;
                        if bound < delta {
                            delta = bound;
                        }
                    }
                }
            }
        }
        // When a discarded tail exists, the surviving leading exponent must
        // stay strictly below the cutoff on the certified interval.
        if self.truncated {
            if let Some((lead_alpha, lead_r)) = min_line(&lines)? {
                let slope_up = abs_upper(&lead_r.clone());
                if slope_up.is_positive() {
                    let head = self.cutoff.value_lower() - lead_alpha.value_upper();
                    if !head.is_positive() {
                        return Err(ExponentError::NotCertified(
                            "leading exponent not separated from the cutoff".into(),
                        ));
                    }
                    let bound = head / slope_up;
                    if bound < delta {
                        delta = bound;
                    }
                }
            }
        }
        if !delta.is_positive() {
            return Err(ExponentError::NotCertified(
                "no positive window could be certified".into(),
            ));
        }
        Ok(delta)
    }
}

fn abs_lower(e: &Exponent) -> BigRational {
    let lo = e.value_lower();
    let hi = e.value_upper();
    if lo.is_positive() {
        lo
    } else if hi.is_negative() {
        -hi
    } else {
        BigRational::zero()
    }
}

fn abs_upper(e: &Exponent) -> BigRational {
    e.value_lower().abs().max(e.value_upper().abs())
}

/// Line with the minimal alpha-value at t = 0 (ties broken by slope value).
fn min_line<'a>(lines: &[(&'a Exponent, &'a Exponent)]) -> Result<Option<(&'a Exponent, &'a Exponent)>> {
    let mut best: Option<(&Exponent, &Exponent)> = None;
    for (a, r) in lines {
        best = match best {
            None => Some((a, r)),
            Some((ba, br)) => match a.cmp_real(ba)? {
                Ordering::Less => Some((a, r)),
                Ordering::Equal => {
                    if r.cmp_real(br)? == Ordering::Less {
                        Some((a, r))
                    } else {
                        Some((ba, br))
                    }
                }
                Ordering::Greater => Some((ba, br)),
            },
        };
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Documents
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct FamilySeriesDoc {
    pub terms: Vec<(super::novikov::NovikovSeriesDoc, Vec<String>)>,
    pub window: (String, String),
    pub cutoff: Vec<String>,
    pub truncated: bool,
}

impl FamilySeries {
    pub fn to_doc(&self) -> FamilySeriesDoc {
        FamilySeriesDoc {
            terms: self
                .terms
                .iter()
                .map(|(a, r)| (a.to_doc(), r.coords_doc()))
                .collect(),
            window: (
                format_rational(&self.window.0),
                format_rational(&self.window.1),
            ),
            cutoff: self.cutoff.coords_doc(),
            truncated: self.truncated,
        }
    }

    pub fn from_doc(basis: &Arc<ExponentBasis>, doc: &FamilySeriesDoc) -> Result<Self> {
        let window = (
            parse_rational(&doc.window.0).map_err(ExponentError::Document)?,
            parse_rational(&doc.window.1).map_err(ExponentError::Document)?,
        );
        let cutoff = Exponent::from_coords_doc(basis, &doc.cutoff)?;
        let terms = doc
            .terms
            .iter()
            .map(|(a, r)| {
                Ok((
                    NovikovSeries::from_doc(basis, a)?,
                    Exponent::from_coords_doc(basis, r)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        FamilySeries::new(basis, terms, window, cutoff, doc.truncated)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{Role, Symbol};
    use crate::rational::{rat, rat_i};
    use rand::{Rng, SeedableRng};

    fn basis1() -> Arc<ExponentBasis> {
        ExponentBasis::new(
            vec![Symbol {
                name: "a".into(),
                role: Role::Energy,
                midpoint: rat_i(1),
                radius: rat_i(0),
            }],
            true,
        )
        .unwrap()
    }

    fn exp1(b: &Arc<ExponentBasis>, q: BigRational) -> Exponent {
        Exponent::new(b, vec![q]).unwrap()
    }

    fn window() -> (BigRational, BigRational) {
        (rat_i(-1), rat_i(1))
    }

    fn zpow(b: &Arc<ExponentBasis>, r: BigRational, cut: i64) -> FamilySeries {
        let one = NovikovSeries::one(b, exp1(b, rat_i(cut)), true);
        FamilySeries::monomial(one, exp1(b, r), window()).unwrap()
    }

    #[test]
    fn ev_at_z_equals_one_point() {
        let b = basis1();
        // z^c - z^c' evaluated at a = 0 is 1 - 1 = 0.
        let f = zpow(&b, rat_i(1), 10).sub(&zpow(&b, rat_i(2), 10)).unwrap();
        assert!(f.ev_at(&rat_i(0)).unwrap().is_zero());
    }

    #[test]
    fn ev_at_monomial_substitution() {
        let b = basis1();
        let f = zpow(&b, rat_i(1), 10).sub(&zpow(&b, rat_i(2), 10)).unwrap();
        let v = f.ev_at(&rat(1, 2)).unwrap();
        // T^{1/2} - T^{1}, valuation 1/2
        assert_eq!(v.terms().len(), 2);
        assert_eq!(v.valuation().unwrap(), &exp1(&b, rat(1, 2)));
        // T * z^{-1} at a = 1/2 -> T^{1/2}
        let tz = FamilySeries::monomial(
            NovikovSeries::monomial(rat_i(1), exp1(&b, rat_i(1)), exp1(&b, rat_i(10)), true)
                .unwrap(),
            exp1(&b, rat_i(-1)),
            window(),
        )
        .unwrap();
        let v2 = tz.ev_at(&rat(1, 2)).unwrap();
        assert_eq!(v2.terms().len(), 1);
        assert_eq!(v2.valuation().unwrap(), &exp1(&b, rat(1, 2)));
    }

    #[test]
    fn ev_outside_window_errors() {
        let b = basis1();
        let f = zpow(&b, rat_i(1), 10);
        assert!(matches!(
            f.ev_at(&rat_i(2)),
            Err(ExponentError::OutsideWindow { .. })
        ));
    }

    #[test]
    fn window_nonvanishing_constant() {
        let b = basis1();
        let one = FamilySeries::constant(NovikovSeries::one(&b, exp1(&b, rat_i(10)), true), window());
        assert_eq!(one.window_nonvanishing().unwrap(), rat_i(1));
    }

    #[test]
    fn window_nonvanishing_crossing_at_one() {
        // f = 1 + T z^{-1}: nonzero for |t| < 1 since 1 + T^{1-t} != 0.
        let b = basis1();
        let cut = exp1(&b, rat_i(10));
        let one = FamilySeries::constant(NovikovSeries::one(&b, cut.clone(), true), window());
        let tz = FamilySeries::monomial(
            NovikovSeries::monomial(rat_i(1), exp1(&b, rat_i(1)), cut.clone(), true).unwrap(),
            exp1(&b, rat_i(-1)),
            window(),
        )
        .unwrap();
        let f = one.add(&tz).unwrap();
        let delta = f.window_nonvanishing().unwrap();
        assert_eq!(delta, rat_i(1));
        // Grid sampling oracle at 100 points strictly inside (-delta, delta).
        for k in 1..=50 {
            for sign in [-1i64, 1] {
                let t = rat(sign * k, 51);
                assert!(!f.ev_at(&t).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn window_nonvanishing_precondition() {
        let b = basis1();
        let f = zpow(&b, rat_i(1), 10).sub(&zpow(&b, rat_i(2), 10)).unwrap();
        assert!(matches!(
            f.window_nonvanishing(),
            Err(ExponentError::NotCertified(_))
        ));
    }

    #[test]
    fn ev_at_is_ring_homomorphism_on_seeds() {
        let b = basis1();
        let cut = exp1(&b, rat_i(6));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut random_family = |rng: &mut rand_chacha::ChaCha8Rng| {
            let n = rng.gen_range(1..4usize);
            let terms: Vec<_> = (0..n)
                .map(|_| {
                    let coeff = NovikovSeries::monomial(
                        rat(rng.gen_range(-4..5), 1),
                        exp1(&b, rat(rng.gen_range(0..6), 2)),
                        cut.clone(),
                        true,
                    )
                    .unwrap();
                    (coeff, exp1(&b, rat(rng.gen_range(-3..4), 1)))
                })
                .collect();
            FamilySeries::new(&b, terms, window(), cut.clone(), false).unwrap()
        };
        for _ in 0..100 {
            let f = random_family(&mut rng);
            let g = random_family(&mut rng);
            let a = rat(rng.gen_range(-4..5), 5);
            let lhs = f.mul(&g).unwrap().ev_at(&a).unwrap();
            let rhs = f.ev_at(&a).unwrap().mul(&g.ev_at(&a).unwrap()).unwrap();
            assert!(lhs.sub(&rhs).unwrap().is_zero());
        }
    }
}
