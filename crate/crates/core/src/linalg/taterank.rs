//! Generic rank over the truncated Tate algebra and the exceptional-point
//! report combining per-sample ranks with a Strassman cap.

use num_rational::BigRational;
use serde::Serialize;

use super::{FreeComplex, LinalgError, Matrix, Result};
use crate::coeff::{Coef, RingCtx};
use crate::padics::{strassman_bound, PadicNumber, StrassmanBound, TateSeries};
use crate::rational::format_rational;

/// Extract a Tate matrix from a generic coefficient matrix.
fn tate_matrix(m: &Matrix) -> Result<Vec<Vec<TateSeries>>> {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|c| match c {
                    Coef::Tate(t) => Ok(t.clone()),
                    other => Err(LinalgError::UnsupportedRing(other.tag())),
                })
                .collect()
        })
        .collect()
}

fn is_certifiably_nonzero(t: &TateSeries) -> bool {
    t.coeffs().values().any(|c| c.valuation().is_some())
}

/// True when every coefficient is either a certified unit or an exact zero
/// and no tail has been dropped: Bareiss elimination stays exact.
fn is_exact_polynomial(t: &TateSeries) -> bool {
    t.tail_floor().is_none()
        && t.coeffs()
            .values()
            .all(|c| c.is_exact_zero() || c.valuation().is_some())
}

fn lift_degree(t: &TateSeries, degree: u32) -> Result<TateSeries> {
    let mut out = TateSeries::from_coeffs(
        t.prime(),
        t.vars(),
        degree,
        t.coeffs().iter().map(|(k, v)| (*k, v.clone())).collect(),
    )?;
    out.set_radius(t.radius());
    out.set_tail_floor(t.tail_floor());
    Ok(out)
}

/// Leading index (highest degree with a non-exact-zero coefficient) of a
/// one-variable series.
fn poly_degree(t: &TateSeries) -> Option<u32> {
    t.coeffs()
        .iter()
        .filter(|(_, c)| !c.is_exact_zero())
        .map(|((i, _), _)| *i)
        .max()
}

/// Exact polynomial division `num / den` in `Q_p[t]` (one variable),
/// long division from the top. The divisor's leading coefficient must be
/// certified nonzero; exactness is guaranteed by the Bareiss identity.
fn poly_div_exact(num: &TateSeries, den: &TateSeries) -> Result<TateSeries> {
    let p = num.prime();
    let dd = poly_degree(den).ok_or_else(|| {
        LinalgError::PrecisionExhausted("division by a zero polynomial".into())
    })?;
    let lead = den.coeff(dd, 0);
    let lead_inv = lead.inv().map_err(|_| {
        LinalgError::PrecisionExhausted("divisor leading coefficient not invertible".into())
    })?;
    let mut rem: Vec<PadicNumber> = (0..=num.degree())
        .map(|i| num.coeff(i, 0))
        .collect();
    let nd = poly_degree(num).unwrap_or(0);
    if nd < dd {
        // The quotient is zero only if num is exactly zero; Bareiss
        // guarantees exact divisibility, so num must be zero here.
        return Ok(TateSeries::zero(p, 1, num.degree()));
    }
    let qd = nd - dd;
    let mut quot = vec![PadicNumber::zero(p); (qd + 1) as usize];
    for k in (0..=qd).rev() {
        let c = rem[(k + dd) as usize].mul(&lead_inv)?;
        quot[k as usize] = c.clone();
        if c.is_exact_zero() {
            continue;
        }
        for j in 0..=dd {
            let sub = c.mul(&den.coeff(j, 0))?;
            rem[(k + j) as usize] = rem[(k + j) as usize].sub(&sub)?;
        }
    }
    TateSeries::from_coeffs(
        p,
        1,
        num.degree(),
        quot.into_iter()
            .enumerate()
            .map(|(i, c)| ((i as u32, 0), c))
            .collect(),
    )
    .map_err(Into::into)
}

/// Fraction-free Bareiss determinant of an exact-polynomial matrix over
/// `Q_p[t]`, computed at a lifted internal degree so products never truncate.
fn bareiss_det(m: &[Vec<TateSeries>]) -> Result<TateSeries> {
    let n = m.len();
    if n == 0 {
        return Err(LinalgError::Shape("empty determinant".into()));
    }
    let p = m[0][0].prime();
    let max_deg = m
        .iter()
        .flatten()
        .filter_map(poly_degree)
        .max()
        .unwrap_or(0);
    let work_degree = (2 * n as u32) * max_deg.max(1) + 1;
    let mut a: Vec<Vec<TateSeries>> = m
        .iter()
        .map(|row| row.iter().map(|t| lift_degree(t, work_degree)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let one = TateSeries::constant(
        PadicNumber::one(p, PadicNumber::max_precision(p).min(48))?,
        1,
        work_degree,
    );
    let mut prev = one;
    let mut sign_flip = false;
    for k in 0..n - 1 {
        // Pivot: a row with certifiably nonzero leading entry.
        if !is_certifiably_nonzero(&a[k][k]) {
            let Some(sw) = ((k + 1)..n).find(|&r| is_certifiably_nonzero(&a[r][k])) else {
                // Exact zero column below: determinant is exactly zero, or
                // indistinguishable from zero at precision.
                if a[k..].iter().all(|row| row[k].coeffs().values().all(|c| c.is_exact_zero())) {
                    return Ok(TateSeries::zero(p, 1, work_degree));
                }
                return Err(LinalgError::NoCertifiableMinor);
            };
            a.swap(k, sw);
            sign_flip = !sign_flip;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let t1 = a[k][k].mul(&a[i][j])?;
                let t2 = a[i][k].mul(&a[k][j])?;
                let num = t1.sub(&t2)?;
                a[i][j] = poly_div_exact(&num, &prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    let mut det = a[n - 1][n - 1].clone();
    if sign_flip {
        det = det.neg();
    }
    Ok(det)
}

/// Leibniz determinant (for small or tail-carrying matrices).
fn leibniz_det(m: &[Vec<TateSeries>]) -> Result<TateSeries> {
    let n = m.len();
    let p = m[0][0].prime();
    let degree = m[0][0].degree();
    let mut acc = TateSeries::zero(p, m[0][0].vars(), degree);
    let mut perm: Vec<usize> = (0..n).collect();
    // Heap's algorithm with explicit sign tracking.
    fn go(
        k: usize,
        perm: &mut Vec<usize>,
        sign: &mut i32,
        m: &[Vec<TateSeries>],
        acc: &mut TateSeries,
    ) -> Result<()> {
        let n = perm.len();
        if k == n {
            let mut prod: Option<TateSeries> = None;
            for (i, &j) in perm.iter().enumerate() {
                prod = Some(match prod {
                    None => m[i][j].clone(),
                    Some(p) => p.mul(&m[i][j])?,
                });
            }
            let mut term = prod.unwrap();
            if *sign < 0 {
                term = term.neg();
            }
            *acc = acc.add(&term)?;
            return Ok(());
        }
        for i in k..n {
            perm.swap(k, i);
            let mut s = *sign * if i == k { 1 } else { -1 };
            std::mem::swap(sign, &mut s);
            go(k + 1, perm, sign, m, acc)?;
            std::mem::swap(sign, &mut s);
            perm.swap(k, i);
        }
        Ok(())
    }
    let mut sign = 1;
    go(0, &mut perm, &mut sign, m, &mut acc)?;
    Ok(acc)
}

fn det_tate(m: &[Vec<TateSeries>]) -> Result<TateSeries> {
    if m.iter().flatten().all(is_exact_polynomial) && m.len() > 3 {
        bareiss_det(m)
    } else {
        leibniz_det(m)
    }
}

/// Generic rank of a Tate matrix over the fraction field, together with a
/// certifying minor: the determinant of a square submatrix of that size with
/// certifiably nonzero determinant.
fn generic_rank_matrix(m: &[Vec<TateSeries>]) -> Result<(usize, Option<TateSeries>)> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    if rows == 0 || cols == 0 {
        return Ok((0, None));
    }
    let max_k = rows.min(cols);
    let mut saw_uncertifiable = false;
    for k in (1..=max_k).rev() {
        for rsel in subsets(rows, k) {
            for csel in subsets(cols, k) {
                let sub: Vec<Vec<TateSeries>> = rsel
                    .iter()
                    .map(|&r| csel.iter().map(|&c| m[r][c].clone()).collect())
                    .collect();
                match det_tate(&sub) {
                    Ok(d) => {
                        if is_certifiably_nonzero(&d) {
                            return Ok((k, Some(d)));
                        }
                        if !d.coeffs().values().all(|c| c.is_exact_zero()) {
                            saw_uncertifiable = true;
                        }
                    }
                    Err(LinalgError::NoCertifiableMinor) => saw_uncertifiable = true,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    if saw_uncertifiable {
        return Err(LinalgError::NoCertifiableMinor);
    }
    Ok((0, None))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Result of the generic-rank analysis of a free complex over `Q_p<t>`.
#[derive(Debug, Clone)]
pub struct TateGenericRank {
    /// Generic cohomology ranks (even, odd) over the fraction field.
    pub cohomology: (usize, usize),
    /// Ranks of the two differentials.
    pub d_ranks: (usize, usize),
    /// Product of the certifying minors, normalized so the minimal-valuation
    /// coefficient is a unit.
    pub critical_minor: TateSeries,
}

/// Generic rank of a one-variable Tate complex via fraction-free elimination
/// on the polynomial truncations.
pub fn generic_rank_tate(c: &FreeComplex) -> Result<TateGenericRank> {
    let RingCtx::Tate { prime, vars: 1, degree, .. } = &c.ring else {
        return Err(LinalgError::UnsupportedRing(c.ring.tag()));
    };
    let me = tate_matrix(&c.d_even)?;
    let mo = tate_matrix(&c.d_odd)?;
    let (re, minor_e) = if me.is_empty() || me[0].is_empty() {
        (0, None)
    } else {
        generic_rank_matrix(&me)?
    };
    let (ro, minor_o) = if mo.is_empty() || mo[0].is_empty() {
        (0, None)
    } else {
        generic_rank_matrix(&mo)?
    };
    let one = TateSeries::constant(
        PadicNumber::one(*prime, PadicNumber::max_precision(*prime).min(48))?,
        1,
        *degree,
    );
    let mut minor = one.clone();
    for m in [minor_e, minor_o].into_iter().flatten() {
        let m = lift_degree(&m, minor.degree().max(m.degree()))?;
        let lifted = lift_degree(&minor, m.degree())?;
        minor = lifted.mul(&m)?;
    }
    // Normalize: scale so the minimal-valuation coefficient becomes a unit.
    let min_val = minor
        .coeffs()
        .values()
        .filter_map(|c| c.valuation())
        .min();
    if let Some(v) = min_val {
        let scale = PadicNumber::p_power(*prime, -v);
        minor = minor.scale(&scale)?;
    }
    Ok(TateGenericRank {
        cohomology: (
            c.even.len() - re - ro,
            c.odd.len() - re - ro,
        ),
        d_ranks: (re, ro),
        critical_minor: minor,
    })
}

/// Per-sample rank report with the Strassman cap on exceptional points.
#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    /// Generic cohomology ranks (even, odd).
    pub generic: (usize, usize),
    /// Strassman bound on the number of exceptional points in `Z_p`
    /// (None = unbounded / not certifiable).
    pub strassman_cap: Option<u32>,
    /// Sampled points (as rational strings) with cohomology ranks.
    pub samples: Vec<(String, (usize, usize))>,
    /// Samples whose rank exceeds the generic prediction.
    pub exceptional: Vec<String>,
}

impl RankReport {
    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "generic ranks: even {} odd {}\n",
            self.generic.0, self.generic.1
        ));
        out.push_str(&match self.strassman_cap {
            Some(b) => format!("strassman cap: {b}\n"),
            None => "strassman cap: unbounded\n".into(),
        });
        out.push_str("  point      even  odd  exceptional\n");
        for (pt, (he, ho)) in &self.samples {
            let exc = if self.exceptional.contains(pt) { "*" } else { "" };
            out.push_str(&format!("  {pt:<9}  {he:<4}  {ho:<3}  {exc}\n"));
        }
        out
    }
}

/// Evaluate a Tate complex at the given rational points and compare per-point
/// cohomology ranks with the generic prediction.
pub fn exceptional_report(c: &FreeComplex, samples: &[BigRational]) -> Result<RankReport> {
    let RingCtx::Tate { prime, vars: 1, .. } = &c.ring else {
        return Err(LinalgError::UnsupportedRing(c.ring.tag()));
    };
    let generic = generic_rank_tate(c)?;
    let cap = match strassman_bound(&generic.critical_minor)? {
        StrassmanBound::Finite(b) => Some(b),
        StrassmanBound::Unbounded => None,
    };
    let prec = PadicNumber::max_precision(*prime).min(48);
    let mut out_samples = Vec::new();
    let mut exceptional = Vec::new();
    for s in samples {
        let point = PadicNumber::from_rational(*prime, s, prec)?;
        let ring = RingCtx::Padic {
            prime: *prime,
            precision: prec,
        };
        let fiber = c.map_coefficients(ring, |coef| match coef {
            Coef::Tate(t) => Ok(Coef::Padic(t.eval_at(&point)?)),
            other => Err(crate::coeff::CoefError::Mixed("tate", other.tag()).into()),
        })?;
        let ranks = fiber.cohomology_rank()?;
        let label = format_rational(s);
        if ranks.0 > generic.cohomology.0 || ranks.1 > generic.cohomology.1 {
            exceptional.push(label.clone());
        }
        out_samples.push((label, ranks));
    }
    Ok(RankReport {
        generic: generic.cohomology,
        strassman_cap: cap,
        samples: out_samples,
        exceptional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_i;

    fn tc(p: u64, coeffs: Vec<(u32, i64)>, degree: u32) -> TateSeries {
        let prec = PadicNumber::max_precision(p).min(24);
        TateSeries::from_coeffs(
            p,
            1,
            degree,
            coeffs
                .into_iter()
                .map(|(i, c)| {
                    (
                        (i, 0),
                        PadicNumber::from_bigint(p, &num_bigint::BigInt::from(c), prec).unwrap(),
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    fn complex_1x1(p: u64, d: TateSeries) -> FreeComplex {
        let degree = d.degree();
        FreeComplex::new(
            RingCtx::Tate {
                prime: p,
                vars: 1,
                degree,
                radius: 0,
            },
            vec!["x".into()],
            vec!["y".into()],
            vec![vec![Coef::Tate(d)]],
            vec![vec![Coef::Tate(TateSeries::zero(p, 1, degree))]],
        )
        .unwrap()
    }

    #[test]
    fn one_by_one_t() {
        // d = (t): generic rank 1, minor ~ t.
        let p = 5;
        let c = complex_1x1(p, tc(p, vec![(1, 1)], 6));
        let g = generic_rank_tate(&c).unwrap();
        assert_eq!(g.d_ranks, (1, 0));
        assert_eq!(g.cohomology, (0, 0));
        assert_eq!(
            strassman_bound(&g.critical_minor).unwrap(),
            StrassmanBound::Finite(1)
        );
    }

    #[test]
    fn block_diagonal_ranks_add() {
        let p = 5;
        let degree = 6;
        let d1 = tc(p, vec![(1, 1)], degree);
        let d2 = tc(p, vec![(0, -1), (1, 1)], degree); // t - 1
        let zero = TateSeries::zero(p, 1, degree);
        let c = FreeComplex::new(
            RingCtx::Tate {
                prime: p,
                vars: 1,
                degree,
                radius: 0,
            },
            vec!["x1".into(), "x2".into()],
            vec!["y1".into(), "y2".into()],
            vec![
                vec![Coef::Tate(d1), Coef::Tate(zero.clone())],
                vec![Coef::Tate(zero.clone()), Coef::Tate(d2)],
            ],
            vec![
                vec![Coef::Tate(zero.clone()), Coef::Tate(zero.clone())],
                vec![Coef::Tate(zero.clone()), Coef::Tate(zero)],
            ],
        )
        .unwrap();
        let g = generic_rank_tate(&c).unwrap();
        assert_eq!(g.d_ranks.0, 2);
        // minor ~ t(t-1): two zeros.
        assert_eq!(
            strassman_bound(&g.critical_minor).unwrap(),
            StrassmanBound::Finite(2)
        );
        let report =
            exceptional_report(&c, &(-3..=3).map(rat_i).collect::<Vec<_>>()).unwrap();
        assert_eq!(report.exceptional, vec!["0".to_string(), "1".to_string()]);
        assert!(report.exceptional.len() as u32 <= report.strassman_cap.unwrap());
    }

    #[test]
    fn constant_complex_no_exceptions() {
        let p = 5;
        let c = complex_1x1(p, tc(p, vec![(0, 2)], 6));
        let report = exceptional_report(&c, &(-5..=5).map(rat_i).collect::<Vec<_>>()).unwrap();
        assert_eq!(report.generic, (0, 0));
        assert!(report.exceptional.is_empty());
        assert_eq!(report.strassman_cap, Some(0));
    }

    #[test]
    fn bareiss_matches_leibniz_on_exact_polys() {
        use rand::{Rng, SeedableRng};
        let p = 7;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let n = 4;
            let m: Vec<Vec<TateSeries>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            tc(
                                p,
                                (0..=2)
                                    .map(|i| (i, rng.gen_range(-4..5)))
                                    .collect(),
                                24,
                            )
                        })
                        .collect()
                })
                .collect();
            let d1 = bareiss_det(&m).unwrap();
            let d2 = leibniz_det(&m).unwrap();
            // Compare coefficients on the shared range.
            for i in 0..=8u32 {
                let a = d1.coeff(i, 0);
                let b = d2.coeff(i, 0);
                assert!(a.agrees_with(&b), "deg {i}: {a:?} vs {b:?}");
            }
        }
    }
}
