//! The p-adic binomial exponential `v^t = sum C(t, i) (v - 1)^i`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{PadicError, PadicNumber, Result, TateSeries};
use crate::rational::{format_rational, padic_val_rational};

fn require_one_unit(v: &PadicNumber) -> Result<()> {
    if !v.is_one_unit() {
        return Err(PadicError::NotOneUnit(format!("{v:?}")));
    }
    Ok(())
}

/// Canonical `f`-th power of a 1-unit, for `f` rational with denominator
/// coprime to p. Consistent with evaluating [`binom_exp_series`] at `t = f`.
pub fn binom_exp_at(v: &PadicNumber, f: &BigRational) -> Result<PadicNumber> {
    require_one_unit(v)?;
    let p = v.prime();
    if let Some(val) = padic_val_rational(f, p) {
        if val < 0 {
            return Err(PadicError::DenominatorDivisibleByP(format_rational(f)));
        }
    }
    if f.is_zero() {
        return PadicNumber::one(p, v.abs_precision().unwrap_or(1).max(1) as u32);
    }
    let nu = v.sub(&PadicNumber::one(p, v.abs_precision().unwrap() as u32)?)?;
    let target = v.abs_precision().unwrap();
    let mut acc = PadicNumber::one(p, target as u32)?;
    if nu.is_zero_at_precision() {
        // v = 1 at precision; 1^f = 1.
        return Ok(acc);
    }
    let w = nu.valuation().unwrap(); // >= 1
    let mut nu_pow = PadicNumber::one(p, target as u32)?;
    let mut binom = BigRational::one();
    let mut i: i64 = 0;
    loop {
        i += 1;
        if w * i >= target {
            break;
        }
        // C(f, i) = C(f, i-1) * (f - i + 1) / i
        binom = binom * (f - BigRational::from_integer(BigInt::from(i - 1)))
            / BigRational::from_integer(BigInt::from(i));
        nu_pow = nu_pow.mul(&nu)?;
        let coef = PadicNumber::from_rational(p, &binom, target as u32)?;
        acc = acc.add(&coef.mul(&nu_pow)?)?;
    }
    // Terms beyond the loop have valuation >= target.
    acc.add(&PadicNumber::zero_at(p, target))
}

/// Signed Stirling numbers of the first kind `s(i, k)` for `i <= max`,
/// defined by `t(t-1)...(t-i+1) = sum_k s(i, k) t^k`.
fn stirling_first(max: usize) -> Vec<Vec<BigInt>> {
    let mut table = vec![vec![BigInt::zero(); max + 1]; max + 1];
    table[0][0] = BigInt::one();
    for i in 1..=max {
        for k in 0..=i {
            // s(i, k) = s(i-1, k-1) - (i-1) * s(i-1, k)
            let mut v = if k > 0 {
                table[i - 1][k - 1].clone()
            } else {
                BigInt::zero()
            };
            v -= BigInt::from(i - 1) * &table[i - 1][k];
            table[i][k] = v;
        }
    }
    table
}

/// Degree-`d` truncation of `v^t` in the Tate algebra, for a 1-unit `v`.
///
/// The precision ledger: with `v` known modulo `p^n`, reaching target
/// precision `n` requires `d (p-2) >= n (p-1)` (the `i!` denominators cost at
/// most `(i-1)/(p-1)` digits and the dropped tail starts at valuation
/// `(d+1) - d/(p-1)`). The constructor enforces this bound.
pub fn binom_exp_series(v: &PadicNumber, degree: u32) -> Result<TateSeries> {
    require_one_unit(v)?;
    let p = v.prime();
    let n = v.abs_precision().unwrap();
    if (degree as i64) * (p as i64 - 2) < n * (p as i64 - 1) {
        return Err(PadicError::InsufficientDegree {
            d: degree,
            n: n as u32,
            p,
        });
    }
    let target = n;
    let one = PadicNumber::one(p, target as u32)?;
    let nu = v.sub(&one)?;
    let mut out = TateSeries::constant(one, 1, degree);
    if nu.is_zero_at_precision() {
        out.set_tail_floor(Some(target));
        return Ok(out);
    }
    let w = nu.valuation().unwrap();
    // Stop the i-sum once nu^i / i! is provably zero at the target:
    // val >= i*w - (i-1)/(p-1) >= target.
    let mut i_max = degree as usize;
    for i in 1..=degree as i64 {
        let lower = i * w - (i - 1) / (p as i64 - 1);
        if lower >= target {
            i_max = i as usize;
            break;
        }
    }
    let stirl = stirling_first(i_max);
    // factorials
    let mut fact = vec![BigInt::one(); i_max + 1];
    for i in 1..=i_max {
        fact[i] = &fact[i - 1] * BigInt::from(i);
    }
    let mut coeffs: Vec<((u32, u32), PadicNumber)> = Vec::new();
    let mut nu_pows = Vec::with_capacity(i_max + 1);
    nu_pows.push(PadicNumber::one(p, target as u32)?);
    for _ in 1..=i_max {
        let last = nu_pows.last().unwrap().clone();
        nu_pows.push(last.mul(&nu)?);
    }
    for s in 1..=(degree as usize).min(i_max) {
        let mut acc = PadicNumber::zero(p);
        for i in s..=i_max {
            // (s1(i, s) / i!) * nu^i
            let c = BigRational::new(stirl[i][s].clone(), fact[i].clone());
            if c.is_zero() {
                continue;
            }
            let coef = PadicNumber::from_rational(p, &c, target as u32)?;
            acc = acc.add(&coef.mul(&nu_pows[i])?)?;
        }
        // Contributions from i > i_max all have valuation >= target.
        acc = acc.add(&PadicNumber::zero_at(p, target))?;
        coeffs.push(((s as u32, 0), acc));
    }
    let constant = PadicNumber::one(p, target as u32)?;
    coeffs.push(((0, 0), constant));
    let mut series = TateSeries::from_coeffs(p, 1, degree, coeffs)?;
    // Dropped tail: coefficients of t^s for s > degree have valuation at
    // least (degree+1) - degree/(p-1) when i_max exceeded degree... use the
    // conservative bound against the target.
    let tail = ((degree as i64 + 1) * (p as i64 - 2)) / (p as i64 - 1) + 1;
    series.set_tail_floor(Some(tail.min(target)));
    Ok(series)
}

/// Two-variable expansion of `F(t1 + t2)` from a one-variable series, built
/// from the exact binomial expansion of each monomial `(t1 + t2)^k`.
pub fn delta_star(f: &TateSeries) -> Result<TateSeries> {
    if f.vars() != 1 {
        return Err(PadicError::TateMismatch(
            "delta_star requires a one-variable series".into(),
        ));
    }
    let p = f.prime();
    let d = f.degree();
    let mut coeffs: std::collections::BTreeMap<(u32, u32), PadicNumber> =
        std::collections::BTreeMap::new();
    for ((k, _), c) in f.coeffs() {
        // (t1 + t2)^k = sum_i C(k, i) t1^i t2^{k-i}
        let mut binom = BigInt::one();
        for i in 0..=*k {
            if i > 0 {
                binom = binom * BigInt::from(k - i + 1) / BigInt::from(i);
            }
            let coef = PadicNumber::from_bigint(p, &binom, PadicNumber::max_precision(p).min(40))?.mul(c)?;
            let key = (i, k - i);
            let cur = coeffs.remove(&key).unwrap_or_else(|| PadicNumber::zero(p));
            coeffs.insert(key, cur.add(&coef)?);
        }
    }
    let mut out = TateSeries::from_coeffs(p, 2, d, coeffs.into_iter().collect())?;
    out.set_tail_floor(f.tail_floor());
    out.set_radius(f.radius());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_i};

    fn unit(p: u64, m: u64, n: u32) -> PadicNumber {
        PadicNumber::from_unit_parts(p, 0, m, n).unwrap()
    }

    #[test]
    fn one_to_the_t_is_one() {
        let p = 5;
        let v = PadicNumber::one(p, 8).unwrap();
        let s = binom_exp_series(&v, 16).unwrap();
        assert!(s.coeff(0, 0).agrees_with(&PadicNumber::one(p, 8).unwrap()));
        for i in 1..=16 {
            assert!(s.coeff(i, 0).is_zero_at_precision());
        }
        assert!(binom_exp_at(&v, &rat(1, 3)).unwrap().agrees_with(&v));
    }

    #[test]
    fn integer_points_are_integer_powers() {
        let p = 5;
        let v = unit(p, 6, 8);
        let s = binom_exp_series(&v, 16).unwrap();
        for n in 1..=10i64 {
            let t0 = PadicNumber::from_bigint(p, &BigInt::from(n), 8).unwrap();
            let via_series = s.eval_unit(&t0).unwrap();
            let direct = v.pow(n).unwrap();
            assert!(
                via_series.agrees_with(&direct),
                "n={n}: {via_series:?} vs {direct:?}"
            );
        }
    }

    #[test]
    fn eval_at_zero_is_counit() {
        let p = 7;
        let v = unit(p, 8, 8);
        let s = binom_exp_series(&v, 16).unwrap();
        let at0 = s.eval_unit(&PadicNumber::zero(p)).unwrap();
        assert!(at0.agrees_with(&PadicNumber::one(p, 8).unwrap()));
    }

    #[test]
    fn square_of_half_power() {
        // p=5, N=8, v=6: (v^{1/2})^2 = v.
        let p = 5;
        let v = unit(p, 6, 8);
        let half = binom_exp_at(&v, &rat(1, 2)).unwrap();
        assert!(half.mul(&half).unwrap().agrees_with(&v));
        // Also through the series at t = 1/2.
        let s = binom_exp_series(&v, 16).unwrap();
        let t0 = PadicNumber::from_rational(p, &rat(1, 2), 8).unwrap();
        let via_series = s.eval_unit(&t0).unwrap();
        assert!(via_series.mul(&via_series).unwrap().agrees_with(&v));
    }

    #[test]
    fn cube_root() {
        let p = 5;
        let v = unit(p, 11, 8);
        let third = binom_exp_at(&v, &rat(1, 3)).unwrap();
        assert!(third.pow(3).unwrap().agrees_with(&v));
    }

    #[test]
    fn zeroth_power_empty_product() {
        let p = 5;
        let v = unit(p, 6, 8);
        assert!(binom_exp_at(&v, &rat_i(0))
            .unwrap()
            .agrees_with(&PadicNumber::one(p, 8).unwrap()));
    }

    #[test]
    fn rejects_non_units_and_bad_denominators() {
        let p = 5;
        let not_unit = unit(p, 7, 8); // 7 = 2 mod 5
        assert!(matches!(
            binom_exp_at(&not_unit, &rat(1, 2)),
            Err(PadicError::NotOneUnit(_))
        ));
        let v = unit(p, 6, 8);
        assert!(matches!(
            binom_exp_at(&v, &rat(1, 5)),
            Err(PadicError::DenominatorDivisibleByP(_))
        ));
        assert!(matches!(
            binom_exp_series(&v, 2),
            Err(PadicError::InsufficientDegree { .. })
        ));
    }

    #[test]
    fn strassman_profile_of_exp_minus_one() {
        // F = (1+p)^t - 1 has a unique zero t = 0: coefficient of t has
        // valuation 1, all higher coefficients strictly larger (valuation
        // oracle: val c_i >= i - (i-1)/(p-1) > 1 for i >= 2).
        let p = 5;
        let v = unit(p, 6, 8);
        let s = binom_exp_series(&v, 16).unwrap();
        let f = s
            .sub(&TateSeries::constant(PadicNumber::one(p, 8).unwrap(), 1, 16))
            .unwrap();
        assert_eq!(f.coeff(1, 0).valuation(), Some(1));
        for i in 2..=16u32 {
            if let Some(v) = f.coeff(i, 0).valuation() {
                assert!(v > 1, "coefficient {i} has valuation {v}");
            }
        }
        assert_eq!(
            super::super::strassman_bound(&f).unwrap(),
            super::super::StrassmanBound::Finite(1)
        );
    }

    #[test]
    fn exponential_laws_two_variables() {
        // v^{t1+t2} = v^{t1} v^{t2} and (v v')^t = v^t v'^t, exactly at the
        // guaranteed precision floor.
        let p = 5;
        let v = unit(p, 6, 8);
        let vp = unit(p, 16, 8);
        let d = 16;
        let s = binom_exp_series(&v, d).unwrap();
        // Delta^*(v^t): coefficient reindexing via the exact Vandermonde
        // identity is realized by substituting into two variables.
        let lhs = delta_star(&s).unwrap();
        let rhs = s.inject(1).unwrap().mul(&s.inject(2).unwrap()).unwrap();
        let diff = lhs.sub(&rhs).unwrap();
        let floor = diff.precision_floor().unwrap();
        assert!(floor >= 1, "no precision left");
        for c in diff.coeffs().values() {
            assert!(c.is_zero_mod(floor));
        }
        // (v v')^t = v^t v'^t
        let sv = binom_exp_series(&v.mul(&vp).unwrap(), d).unwrap();
        let prod = s.mul(&binom_exp_series(&vp, d).unwrap()).unwrap();
        let diff2 = sv.sub(&prod).unwrap();
        let floor2 = diff2.precision_floor().unwrap();
        assert!(floor2 >= 1);
        for c in diff2.coeffs().values() {
            assert!(c.is_zero_mod(floor2));
        }
    }
}
