//! Truncated Tate algebras in one and two variables.
//!
//! A [`TateSeries`] stores coefficients for all multi-degrees of total degree
//! at most `degree`. The `radius` tag means the series is written in the
//! unit-disc coordinate of `p^radius Z_p`: evaluation points `t` must satisfy
//! `val(t) >= radius` and are rescaled internally.

use std::collections::BTreeMap;

use super::{PadicError, PadicNumber, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct TateSeries {
    prime: u64,
    vars: u8,
    degree: u32,
    radius: u32,
    /// Coefficients by multi-degree `(i, j)`; `j = 0` throughout for one
    /// variable. Absent entries are exact zeros.
    coeffs: BTreeMap<(u32, u32), PadicNumber>,
    /// Valuation lower bound for everything discarded beyond the degree
    /// cutoff; `None` when nothing was discarded (exact polynomial).
    tail_floor: Option<i64>,
}

impl std::fmt::Debug for TateSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "TateSeries(p={}, vars={}, deg<={}, radius={}, {} coeffs)",
            self.prime,
            self.vars,
            self.degree,
            self.radius,
            self.coeffs.len()
        )
    }
}

impl TateSeries {
    pub fn zero(prime: u64, vars: u8, degree: u32) -> Self {
        assert!(vars == 1 || vars == 2);
        TateSeries {
            prime,
            vars,
            degree,
            radius: 0,
            coeffs: BTreeMap::new(),
            tail_floor: None,
        }
    }

    pub fn constant(c: PadicNumber, vars: u8, degree: u32) -> Self {
        let mut s = TateSeries::zero(c.prime(), vars, degree);
        if !c.is_exact_zero() {
            s.coeffs.insert((0, 0), c);
        }
        s
    }

    pub fn from_coeffs(
        prime: u64,
        vars: u8,
        degree: u32,
        coeffs: Vec<((u32, u32), PadicNumber)>,
    ) -> Result<Self> {
        let mut s = TateSeries::zero(prime, vars, degree);
        for ((i, j), c) in coeffs {
            if c.prime() != prime {
                return Err(PadicError::PrimeMismatch(prime, c.prime()));
            }
            if vars == 1 && j != 0 {
                return Err(PadicError::TateMismatch(
                    "second index nonzero in a one-variable series".into(),
                ));
            }
            if i + j > degree {
                return Err(PadicError::TateMismatch(format!(
                    "coefficient degree {} exceeds cutoff {}",
                    i + j,
                    degree
                )));
            }
            if !c.is_exact_zero() {
                s.coeffs.insert((i, j), c);
            }
        }
        Ok(s)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }
    pub fn vars(&self) -> u8 {
        self.vars
    }
    pub fn degree(&self) -> u32 {
        self.degree
    }
    pub fn radius(&self) -> u32 {
        self.radius
    }
    pub fn tail_floor(&self) -> Option<i64> {
        self.tail_floor
    }

    pub(crate) fn set_tail_floor(&mut self, floor: Option<i64>) {
        self.tail_floor = floor;
    }

    pub(crate) fn set_radius(&mut self, radius: u32) {
        self.radius = radius;
    }

    pub fn coeff(&self, i: u32, j: u32) -> PadicNumber {
        self.coeffs
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| PadicNumber::zero(self.prime))
    }

    pub fn coeffs(&self) -> &BTreeMap<(u32, u32), PadicNumber> {
        &self.coeffs
    }

    pub fn is_zero_at_precision(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero_at_precision())
    }

    /// Minimal guaranteed absolute precision over all coefficients
    /// (None = every coefficient exact).
    pub fn precision_floor(&self) -> Option<i64> {
        let coeff_floor = self
            .coeffs
            .values()
            .filter_map(|c| c.abs_precision())
            .min();
        match (coeff_floor, self.tail_floor) {
            (None, t) => t,
            (Some(c), None) => Some(c),
            (Some(c), Some(t)) => Some(c.min(t)),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(PadicError::PrimeMismatch(self.prime, other.prime));
        }
        if self.vars != other.vars || self.degree != other.degree || self.radius != other.radius {
            return Err(PadicError::TateMismatch(format!(
                "vars/degree/radius ({},{},{}) vs ({},{},{})",
                self.vars, self.degree, self.radius, other.vars, other.degree, other.radius
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            let cur = out
                .coeffs
                .remove(k)
                .unwrap_or_else(|| PadicNumber::zero(self.prime));
            let s = cur.add(c)?;
            if !s.is_exact_zero() {
                out.coeffs.insert(*k, s);
            }
        }
        out.tail_floor = min_opt(self.tail_floor, other.tail_floor);
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &PadicNumber) -> Result<Self> {
        let mut out = TateSeries::zero(self.prime, self.vars, self.degree);
        out.radius = self.radius;
        for (k, a) in &self.coeffs {
            let s = a.mul(c)?;
            if !s.is_exact_zero() {
                out.coeffs.insert(*k, s);
            }
        }
        out.tail_floor = match (self.tail_floor, c.valuation_lower_bound()) {
            (None, _) => None,
            (Some(t), Some(v)) => Some(t + v),
            (Some(t), None) => Some(t), // scaling by exact zero clears everything anyway
        };
        Ok(out)
    }

    /// Product, truncated at the degree cutoff; the dropped part's valuation
    /// bound is folded into the tail floor.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = TateSeries::zero(self.prime, self.vars, self.degree);
        out.radius = self.radius;
        let mut dropped: Option<i64> = None;
        for ((i1, j1), a) in &self.coeffs {
            for ((i2, j2), b) in &other.coeffs {
                let (i, j) = (i1 + i2, j1 + j2);
                if i + j > self.degree {
                    let vb = match (a.valuation_lower_bound(), b.valuation_lower_bound()) {
                        (Some(x), Some(y)) => Some(x + y),
                        _ => None,
                    };
                    dropped = min_opt(dropped, vb);
                    continue;
                }
                let prod = a.mul(b)?;
                let cur = out
                    .coeffs
                    .remove(&(i, j))
                    .unwrap_or_else(|| PadicNumber::zero(self.prime));
                let s = cur.add(&prod)?;
                if !s.is_exact_zero() {
                    out.coeffs.insert((i, j), s);
                }
            }
        }
        // Tail bookkeeping: existing tails multiplied by the other factor's
        // minimal valuation, plus the newly dropped products.
        let self_min = self.min_valuation_bound();
        let other_min = other.min_valuation_bound();
        let t1 = self.tail_floor.map(|t| t + other_min);
        let t2 = other.tail_floor.map(|t| t + self_min);
        out.tail_floor = min_opt(min_opt(t1, t2), dropped);
        Ok(out)
    }

    fn min_valuation_bound(&self) -> i64 {
        self.coeffs
            .values()
            .filter_map(|c| c.valuation_lower_bound())
            .min()
            .unwrap_or(0)
    }

    /// Evaluate at a point of the current unit disc (`val(point) >= 0`).
    pub fn eval_unit(&self, point: &PadicNumber) -> Result<PadicNumber> {
        if self.vars != 1 {
            return Err(PadicError::TateMismatch(
                "eval_unit requires a one-variable series".into(),
            ));
        }
        let v = point.valuation_lower_bound();
        if let Some(v) = v {
            if v < 0 {
                return Err(PadicError::OutsideRadius { got: v, need: 0 });
            }
        }
        let mut acc = PadicNumber::zero(self.prime);
        // Horner from the top degree.
        for d in (0..=self.degree).rev() {
            acc = acc.mul(point)?;
            acc = acc.add(&self.coeff(d, 0))?;
        }
        // Tail contribution.
        if let Some(t) = self.tail_floor {
            acc = acc.add(&PadicNumber::zero_at(self.prime, t))?;
        }
        Ok(acc)
    }

    /// Evaluate a two-variable series at a unit-disc point pair.
    pub fn eval_unit2(&self, p1: &PadicNumber, p2: &PadicNumber) -> Result<PadicNumber> {
        if self.vars != 2 {
            return Err(PadicError::TateMismatch(
                "eval_unit2 requires a two-variable series".into(),
            ));
        }
        for pt in [p1, p2] {
            if let Some(v) = pt.valuation_lower_bound() {
                if v < 0 {
                    return Err(PadicError::OutsideRadius { got: v, need: 0 });
                }
            }
        }
        let mut acc = PadicNumber::zero(self.prime);
        for ((i, j), c) in &self.coeffs {
            let term = c.mul(&p1.pow(*i as i64)?)?.mul(&p2.pow(*j as i64)?)?;
            acc = acc.add(&term)?;
        }
        if let Some(t) = self.tail_floor {
            acc = acc.add(&PadicNumber::zero_at(self.prime, t))?;
        }
        Ok(acc)
    }

    /// Evaluate at `t0` with `val(t0) >= radius`, rescaling into the disc.
    pub fn eval_at(&self, t0: &PadicNumber) -> Result<PadicNumber> {
        let need = self.radius as i64;
        let got = t0.valuation_lower_bound();
        if let Some(got) = got {
            if got < need {
                return Err(PadicError::OutsideRadius { got, need });
            }
        }
        let scale = PadicNumber::p_power(self.prime, -need);
        let s0 = t0.mul(&scale)?;
        match self.vars {
            1 => self.eval_unit(&s0),
            _ => self.eval_unit2(&s0, &s0),
        }
    }

    /// Codiagonal substitution `t1, t2 -> t` on a two-variable series.
    pub fn codiagonal(&self) -> Result<TateSeries> {
        if self.vars != 2 {
            return Err(PadicError::TateMismatch(
                "codiagonal requires a two-variable series".into(),
            ));
        }
        let mut out = TateSeries::zero(self.prime, 1, self.degree);
        out.radius = self.radius;
        out.tail_floor = self.tail_floor;
        for ((i, j), c) in &self.coeffs {
            let k = i + j;
            let cur = out
                .coeffs
                .remove(&(k, 0))
                .unwrap_or_else(|| PadicNumber::zero(self.prime));
            let s = cur.add(c)?;
            if !s.is_exact_zero() {
                out.coeffs.insert((k, 0), s);
            }
        }
        Ok(out)
    }

    /// Inject a one-variable series as a function of `t1` (var = 1) or `t2`
    /// (var = 2) in the two-variable algebra.
    pub fn inject(&self, var: u8) -> Result<TateSeries> {
        if self.vars != 1 {
            return Err(PadicError::TateMismatch(
                "inject requires a one-variable series".into(),
            ));
        }
        let mut out = TateSeries::zero(self.prime, 2, self.degree);
        out.radius = self.radius;
        out.tail_floor = self.tail_floor;
        for ((i, _), c) in &self.coeffs {
            let k = match var {
                1 => (*i, 0),
                2 => (0, *i),
                _ => {
                    return Err(PadicError::TateMismatch(format!(
                        "variable index {var} out of range"
                    )))
                }
            };
            out.coeffs.insert(k, c.clone());
        }
        Ok(out)
    }

    /// Restrict to the smaller disc `p^{radius + extra} Z_p` by rescaling
    /// coefficients `c_I -> c_I p^{extra * |I|}`.
    pub fn restrict_radius(&self, extra: u32) -> Result<TateSeries> {
        if extra == 0 {
            return Ok(self.clone());
        }
        let mut out = TateSeries::zero(self.prime, self.vars, self.degree);
        out.radius = self.radius + extra;
        out.tail_floor = self
            .tail_floor
            .map(|t| t + (extra as i64) * (self.degree as i64 + 1));
        for ((i, j), c) in &self.coeffs {
            let shift =
                PadicNumber::p_power(self.prime, (extra as i64) * ((i + j) as i64));
            let s = c.mul(&shift)?;
            if !s.is_exact_zero() {
                out.coeffs.insert((*i, *j), s);
            }
        }
        Ok(out)
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) => x,
        (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

/// Bound for the number of zeros of a one-variable series on `Z_p`: the
/// largest coefficient index attaining the maximal p-adic absolute value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrassmanBound {
    Finite(u32),
    /// Truncation cannot certify a bound (the maximum is attained at the
    /// degree cutoff boundary, or the tail could compete).
    Unbounded,
}

pub fn strassman_bound(f: &TateSeries) -> Result<StrassmanBound> {
    if f.vars() != 1 {
        return Err(PadicError::TateMismatch(
            "strassman_bound requires a one-variable series".into(),
        ));
    }
    let mut min_val: Option<i64> = None;
    for c in f.coeffs().values() {
        if let Some(v) = c.valuation() {
            min_val = Some(min_val.map_or(v, |m: i64| m.min(v)));
        }
    }
    let min_val = min_val.ok_or_else(|| {
        PadicError::PrecisionExhausted("series indistinguishable from zero".into())
    })?;
    // Largest index attaining the minimum.
    let mut last = 0u32;
    for ((i, _), c) in f.coeffs() {
        if c.valuation() == Some(min_val) {
            last = (*i).max(last);
        }
    }
    // Indices above `last` must be certifiably larger in valuation.
    for ((i, _), c) in f.coeffs() {
        if *i > last {
            match c.valuation_lower_bound() {
                Some(v) if v > min_val => {}
                _ => return Ok(StrassmanBound::Unbounded),
            }
        }
    }
    if last == f.degree() {
        return Ok(StrassmanBound::Unbounded);
    }
    if let Some(t) = f.tail_floor() {
        if t <= min_val {
            return Ok(StrassmanBound::Unbounded);
        }
    }
    Ok(StrassmanBound::Finite(last))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(p: u64, n: u32) -> PadicNumber {
        PadicNumber::one(p, n).unwrap()
    }

    #[test]
    fn constant_eval() {
        let c = PadicNumber::from_unit_parts(5, 0, 7, 6).unwrap();
        let s = TateSeries::constant(c.clone(), 1, 4);
        let t0 = PadicNumber::from_unit_parts(5, 1, 2, 6).unwrap();
        assert!(s.eval_unit(&t0).unwrap().agrees_with(&c));
    }

    #[test]
    fn mul_and_eval_commute_on_seeds() {
        use rand::{Rng, SeedableRng};
        let p = 7u64;
        let n = 8u32;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let coeffs: Vec<_> = (0..=4u32)
                    .map(|i| {
                        (
                            (i, 0),
                            PadicNumber::from_unit_parts(p, 0, rng.gen_range(0..2401), n).unwrap(),
                        )
                    })
                    .collect();
                TateSeries::from_coeffs(p, 1, 8, coeffs).unwrap()
            };
            let f = mk(&mut rng);
            let g = mk(&mut rng);
            let t0 = PadicNumber::from_unit_parts(p, 1, 1 + rng.gen_range(0..6), n).unwrap();
            let lhs = f.mul(&g).unwrap().eval_unit(&t0).unwrap();
            let rhs = f.eval_unit(&t0).unwrap().mul(&g.eval_unit(&t0).unwrap()).unwrap();
            assert!(lhs.agrees_with(&rhs));
        }
    }

    #[test]
    fn strassman_linear() {
        // F = 1 + t: one zero (t = -1).
        let p = 5;
        let s = TateSeries::from_coeffs(
            p,
            1,
            6,
            vec![((0, 0), one(p, 6)), ((1, 0), one(p, 6))],
        )
        .unwrap();
        assert_eq!(strassman_bound(&s).unwrap(), StrassmanBound::Finite(1));
    }

    #[test]
    fn strassman_planted_roots() {
        // F = t(t-1) * 3 : zeros {0, 1}, bound 2.
        let p = 5;
        let three = PadicNumber::from_unit_parts(p, 0, 3, 6).unwrap();
        let s = TateSeries::from_coeffs(
            p,
            1,
            6,
            vec![
                ((1, 0), three.neg()),
                ((2, 0), three.clone()),
            ],
        )
        .unwrap();
        assert_eq!(strassman_bound(&s).unwrap(), StrassmanBound::Finite(2));
    }

    #[test]
    fn strassman_boundary_unbounded() {
        let p = 5;
        let s = TateSeries::from_coeffs(p, 1, 3, vec![((3, 0), one(p, 6))]).unwrap();
        assert_eq!(strassman_bound(&s).unwrap(), StrassmanBound::Unbounded);
    }

    #[test]
    fn radius_restriction_rescales() {
        let p = 5;
        let s = TateSeries::from_coeffs(
            p,
            1,
            3,
            vec![((0, 0), one(p, 8)), ((1, 0), one(p, 8))],
        )
        .unwrap();
        let r = s.restrict_radius(2).unwrap();
        assert_eq!(r.radius(), 2);
        assert_eq!(r.coeff(1, 0).valuation(), Some(2));
        // Evaluating the restricted series at t0 = p^2 equals evaluating the
        // original at the same point.
        let t0 = PadicNumber::from_unit_parts(p, 2, 1, 8).unwrap();
        assert!(r.eval_at(&t0).unwrap().agrees_with(&s.eval_at(&t0).unwrap()));
    }

    #[test]
    fn codiagonal_reindexes() {
        let p = 5;
        let mut coeffs = Vec::new();
        for i in 0..=2u32 {
            for j in 0..=(2 - i) {
                coeffs.push(((i, j), one(p, 6)));
            }
        }
        let s = TateSeries::from_coeffs(p, 2, 2, coeffs).unwrap();
        let d = s.codiagonal().unwrap();
        // coefficient of t^1 = c_{10} + c_{01} = 2
        let two = PadicNumber::from_unit_parts(p, 0, 2, 6).unwrap();
        assert!(d.coeff(1, 0).agrees_with(&two));
        let three = PadicNumber::from_unit_parts(p, 0, 3, 6).unwrap();
        assert!(d.coeff(2, 0).agrees_with(&three));
    }
}
