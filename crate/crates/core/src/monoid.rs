//! Constructive monoid algorithms over formal reals.
//!
//! A [`FormalReal`] is an [`Exponent`]: a rational vector over a declared
//! transcendence basis of positive reals. [`extend_to_free`] extends a
//! finitely generated submonoid of the nonnegative reals, inside its rational
//! span, to one generated by positive rationally independent elements,
//! following an induction on generators: split the dependent generator into
//! positive and negative parts, choose a rational partition of unity keeping
//! all strict inequalities, and rescale by the numerator/denominator products.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exponents::{Exponent, ExponentError};

/// Formal positive real: a rational vector over the transcendence basis.
pub type FormalReal = Exponent;

#[derive(Debug, Error)]
pub enum MonoidError {
    #[error("generator is not strictly positive: {0:?}")]
    NonPositive(FormalReal),
    #[error("unresolvable sign at available precision: {0}")]
    SignUnresolved(String),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error("generator lists over different bases")]
    BasisMismatch,
    #[error("no rational partition of unity found up to denominator {0}")]
    PartitionSearchExhausted(u64),
}

pub type Result<T> = std::result::Result<T, MonoidError>;

/// A nonnegative integer combination expressing a target over generators.
/// Replaying the combination reproduces the target exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipCertificate {
    pub coefficients: Vec<BigInt>,
}

impl MembershipCertificate {
    /// Recompute the combination and compare with the target formally.
    pub fn verify(&self, gens: &[FormalReal], target: &FormalReal) -> Result<bool> {
        if gens.len() != self.coefficients.len() {
            return Ok(false);
        }
        let basis = target.basis();
        let mut acc = Exponent::zero(basis);
        for (c, g) in self.coefficients.iter().zip(gens) {
            acc = acc.add(&g.scale(&BigRational::from_integer(c.clone())))?;
        }
        Ok(acc == *target)
    }
}

/// Exact rational solve: write `x` in the span of independent `gens`.
/// Returns the coefficient vector when `x` lies in the span.
fn solve_in_span(gens: &[FormalReal], x: &FormalReal) -> Option<Vec<BigRational>> {
    // Solve G^T c = x over the basis coordinates by Gaussian elimination.
    let dim = x.coords().len();
    let n = gens.len();
    let mut m: Vec<Vec<BigRational>> = (0..dim)
        .map(|row| {
            let mut r: Vec<BigRational> = gens.iter().map(|g| g.coords()[row].clone()).collect();
            r.push(x.coords()[row].clone());
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0usize;
    for col in 0..n {
        let Some(pr) = (row..dim).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let pv = m[row][col].clone();
        for c in col..=n {
            m[row][c] = &m[row][c] / &pv;
        }
        for r in 0..dim {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    m[r][c] = &m[r][c] - &f * &m[row][c];
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == dim {
            break;
        }
    }
    // Consistency: rows without pivots must have zero RHS.
    for r in row..dim {
        if !m[r][n].is_zero() {
            return None;
        }
    }
    let mut coeffs = vec![BigRational::zero(); n];
    for (r, &col) in pivot_cols.iter().enumerate() {
        coeffs[col] = m[r][n].clone();
    }
    Some(coeffs)
}

/// Rank over Q of the generators' coordinate vectors.
pub fn rational_rank(gens: &[FormalReal]) -> usize {
    let vecs: Vec<Vec<BigRational>> = gens.iter().map(|g| g.coords().to_vec()).collect();
    if vecs.is_empty() {
        return 0;
    }
    let dim = vecs[0].len();
    rank_of(&vecs, dim)
}

fn certify_positive(x: &FormalReal) -> Result<()> {
    match x.is_positive_certified() {
        Ok(true) => Ok(()),
        Ok(false) => Err(MonoidError::NonPositive(x.clone())),
        Err(ExponentError::PrecisionOverlap(s)) => Err(MonoidError::SignUnresolved(s)),
        Err(e) => Err(e.into()),
    }
}

/// Extend the monoid generated by strictly positive formal reals to one
/// generated by positive, rationally independent elements of the same
/// rational span. Every input is representable as a nonnegative integer
/// combination of the output (see [`membership`]).
pub fn extend_to_free(inputs: &[FormalReal]) -> Result<Vec<FormalReal>> {
    for x in inputs {
        certify_positive(x)?;
    }
    let mut gens: Vec<FormalReal> = Vec::new();
    for x in inputs {
        if gens.is_empty() {
            gens.push(x.clone());
            continue;
        }
        let Some(coeffs) = solve_in_span(&gens, x) else {
            gens.push(x.clone());
            continue;
        };
        // Partition into positive part (indices h with a_h > 0) and the rest.
        let pos: Vec<usize> = (0..gens.len()).filter(|&i| coeffs[i].is_positive()).collect();
        let neg: Vec<usize> = (0..gens.len()).filter(|&i| !coeffs[i].is_positive()).collect();
        if pos.is_empty() {
            // x > 0 written with no positive coefficients is impossible.
            return Err(MonoidError::SignUnresolved(
                "dependent generator with no positive part".into(),
            ));
        }
        // eta = sum over the negative part of b_g * y_g, with b_g = -a_g >= 0.
        let basis = x.basis();
        let mut eta = Exponent::zero(basis);
        let mut bs = Vec::new();
        for &g in &neg {
            let b = -coeffs[g].clone();
            eta = eta.add(&gens[g].scale(&b))?;
            bs.push(b);
        }
        let tau1: BigInt = pos.iter().map(|&h| coeffs[h].numer().clone()).product();
        let new_gens: Vec<FormalReal>;
        if eta.is_zero() {
            // x = sum a_h y_h with a_h > 0: rescale the positive part only.
            let mut out = Vec::new();
            for &h in &pos {
                let z = gens[h]
                    .scale(&coeffs[h])
                    .scale(&BigRational::new(BigInt::one(), tau1.clone()));
                certify_positive(&z)?;
                out.push(z);
            }
            for &g in &neg {
                out.push(gens[g].clone());
            }
            new_gens = out;
        } else {
            // Choose rational lambda_h >= 0 summing to 1 with
            // a_h y_h - lambda_h eta > 0, by a deterministic denominator scan
            // apportioning proportionally to the interval midpoints of
            // iota_h = a_h y_h / eta.
            let lambdas = choose_partition(&gens, &coeffs, &pos, &eta)?;
            let tau2: BigInt = lambdas
                .iter()
                .map(|l| l.denom().clone())
                .chain(bs.iter().map(|b| b.denom().clone()))
                .product();
            let mut out = Vec::new();
            for (k, &h) in pos.iter().enumerate() {
                let z = gens[h]
                    .scale(&coeffs[h])
                    .sub(&eta.scale(&lambdas[k]))?
                    .scale(&BigRational::new(BigInt::one(), tau1.clone()));
                certify_positive(&z)?;
                out.push(z);
            }
            let scale = BigRational::new(BigInt::one(), &tau1 * &tau2);
            for &g in &neg {
                out.push(gens[g].scale(&scale));
            }
            new_gens = out;
        }
        debug_assert_eq!(new_gens.len(), gens.len());
        gens = new_gens;
    }
    Ok(gens)
}

/// Deterministic scan for the rational partition of unity in the induction
/// step: scan denominators d = 1, 2, ... and apportion d proportionally to
/// the midpoint ratios, accepting the first choice that certifies all strict
/// inequalities. Reproducible across runs by construction.
fn choose_partition(
    gens: &[FormalReal],
    coeffs: &[BigRational],
    pos: &[usize],
    eta: &Exponent,
) -> Result<Vec<BigRational>> {
    let eta_mid = eta.value_midpoint();
    if !eta_mid.is_positive() {
        return Err(MonoidError::SignUnresolved(
            "eta midpoint not positive".into(),
        ));
    }
    let iotas: Vec<BigRational> = pos
        .iter()
        .map(|&h| gens[h].value_midpoint() * &coeffs[h] / &eta_mid)
        .collect();
    let total: BigRational = iotas.iter().cloned().sum();
    const MAX_DENOM: u64 = 4096;
    let mut d: u64 = 1;
    while d <= MAX_DENOM {
        // Apportion d units proportional to iota_h / total, remainders fixed
        // up deterministically from the front.
        let dq = BigRational::from_integer(BigInt::from(d));
        let mut units: Vec<BigInt> = iotas
            .iter()
            .map(|i| (i / &total * &dq).floor().numer().clone())
            .collect();
        let mut assigned: BigInt = units.iter().cloned().sum();
        let n_units = units.len();
        let mut idx = 0usize;
        while assigned < BigInt::from(d) {
            units[idx % n_units] += 1;
            assigned += BigInt::one();
            idx += 1;
        }
        let lambdas: Vec<BigRational> = units
            .iter()
            .map(|u| BigRational::new(u.clone(), BigInt::from(d)))
            .collect();
        let ok = pos.iter().enumerate().all(|(k, &h)| {
            if lambdas[k].is_negative() {
                return false;
            }
            let z = gens[h]
                .scale(&coeffs[h])
                .sub(&eta.scale(&lambdas[k]))
                .expect("same basis");
            matches!(z.is_positive_certified(), Ok(true))
        });
        if ok {
            return Ok(lambdas);
        }
        d += 1;
    }
    Err(MonoidError::PartitionSearchExhausted(MAX_DENOM))
}

/// Membership of `x` in the monoid generated by `gens`.
///
/// For rationally independent generators the certificate is unique when it
/// exists and is found by an exact linear solve followed by nonnegativity
/// and integrality checks. Dependent generator lists fall back to a bounded
/// enumeration up to `bound` per coefficient.
pub fn membership(
    gens: &[FormalReal],
    x: &FormalReal,
    bound: u64,
) -> Result<Option<MembershipCertificate>> {
    if rational_rank(gens) == gens.len() {
        let Some(coeffs) = solve_in_span(gens, x) else {
            return Ok(None);
        };
        let mut ints = Vec::with_capacity(coeffs.len());
        for c in &coeffs {
            if !c.is_integer() || c.is_negative() {
                return Ok(None);
            }
            ints.push(c.numer().clone());
        }
        return Ok(Some(MembershipCertificate { coefficients: ints }));
    }
    // Bounded enumeration for dependent generators.
    let n = gens.len();
    let mut counters = vec![0u64; n];
    loop {
        let mut acc = Exponent::zero(x.basis());
        for (i, &c) in counters.iter().enumerate() {
            acc = acc.add(&gens[i].scale(&BigRational::from_integer(BigInt::from(c))))?;
        }
        if acc == *x {
            return Ok(Some(MembershipCertificate {
                coefficients: counters.iter().map(|&c| BigInt::from(c)).collect(),
            }));
        }
        // odometer
        let mut i = 0;
        loop {
            if i == n {
                return Ok(None);
            }
            counters[i] += 1;
            if counters[i] > bound {
                counters[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
}

/// Outcome of the flux-genericity test.
#[derive(Debug, Clone)]
pub enum Genericity {
    Pass,
    /// A nonzero vector in the intersection of the flux and energy spans
    /// modulo the declared relations, in basis coordinates.
    Fail { witness: Vec<BigRational> },
}

impl Genericity {
    pub fn passed(&self) -> bool {
        matches!(self, Genericity::Pass)
    }
}

/// Test whether the rational span of the flux sublattice meets the rational
/// span of the energy sublattice only at zero, modulo declared relations.
///
/// `flux`, `energy` and `relations` are coordinate vectors over a common
/// basis of dimension `dim`; `relations` lists declared rational dependencies
/// among the basis values (empty when all symbols are independent
/// transcendentals).
pub fn genericity_test(
    flux: &[Vec<BigRational>],
    energy: &[Vec<BigRational>],
    relations: &[Vec<BigRational>],
    dim: usize,
) -> Genericity {
    if flux.is_empty() || energy.is_empty() {
        return Genericity::Pass;
    }
    // Solve f = e + r with f in span(flux), e in span(energy), r in
    // span(relations): nullspace of the stacked matrix [F | -E | -R].
    let cols = flux.len() + energy.len() + relations.len();
    let mut m: Vec<Vec<BigRational>> = (0..dim)
        .map(|row| {
            let mut r = Vec::with_capacity(cols);
            for f in flux {
                r.push(f[row].clone());
            }
            for e in energy {
                r.push(-e[row].clone());
            }
            for rel in relations {
                r.push(-rel[row].clone());
            }
            r
        })
        .collect();
    let mut pivots: Vec<Option<usize>> = vec![None; cols];
    let mut row = 0usize;
    for col in 0..cols {
        let Some(pr) = (row..dim).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let pv = m[row][col].clone();
        for c in 0..cols {
            m[row][c] = &m[row][c] / &pv;
        }
        for r in 0..dim {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..cols {
                    m[r][c] = &m[r][c] - &f * &m[row][c];
                }
            }
        }
        pivots[col] = Some(row);
        row += 1;
        if row == dim {
            break;
        }
    }
    for free_col in 0..cols {
        if pivots[free_col].is_some() {
            continue;
        }
        // Nullspace vector: free column = 1, pivot columns from the rows.
        let mut v = vec![BigRational::zero(); cols];
        v[free_col] = BigRational::one();
        for (col, piv) in pivots.iter().enumerate() {
            if let Some(r) = piv {
                v[col] = -m[*r][free_col].clone();
            }
        }
        // Flux part of the witness in basis coordinates.
        let mut w = vec![BigRational::zero(); dim];
        let mut has_flux = false;
        for (i, f) in flux.iter().enumerate() {
            if !v[i].is_zero() {
                has_flux = true;
                for row in 0..dim {
                    w[row] = &w[row] + &v[i] * &f[row];
                }
            }
        }
        if !has_flux || w.iter().all(|c| c.is_zero()) {
            continue;
        }
        // Witnesses whose flux part lies in the declared relation span are
        // zero in the quotient.
        if !relations.is_empty() {
            let rel_rank = rank_of(relations, dim);
            let mut stacked: Vec<Vec<BigRational>> = relations.to_vec();
            stacked.push(w.clone());
            if rank_of(&stacked, dim) == rel_rank {
                continue;
            }
        }
        return Genericity::Fail { witness: w };
    }
    Genericity::Pass
}

fn rank_of(vecs: &[Vec<BigRational>], dim: usize) -> usize {
    let mut m: Vec<Vec<BigRational>> = vecs.to_vec();
    let mut rank = 0usize;
    for col in 0..dim {
        let Some(pr) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pr);
        let pv = m[rank][col].clone();
        for c in 0..dim {
            m[rank][c] = &m[rank][c] / &pv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..dim {
                    m[r][c] = &m[r][c] - &f * &m[rank][c];
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{ExponentBasis, Role, Symbol};
    use crate::rational::{rat, rat_i};
    use std::sync::Arc;

    fn basis3() -> Arc<ExponentBasis> {
        ExponentBasis::new(
            vec![
                Symbol {
                    name: "one".into(),
                    role: Role::Energy,
                    midpoint: rat_i(1),
                    radius: rat_i(0),
                },
                Symbol {
                    name: "sqrt2".into(),
                    role: Role::Energy,
                    midpoint: rat(665_857, 470_832),
                    radius: rat(1, 100_000_000_000),
                },
                Symbol {
                    name: "sqrt3".into(),
                    role: Role::Energy,
                    midpoint: rat(716_035, 413_403),
                    radius: rat(1, 100_000_000_000),
                },
            ],
            true,
        )
        .unwrap()
    }

    fn fr(b: &Arc<ExponentBasis>, c: [i64; 3], d: i64) -> FormalReal {
        Exponent::new(b, vec![rat(c[0], d), rat(c[1], d), rat(c[2], d)]).unwrap()
    }

    #[test]
    fn single_generator_unchanged() {
        let b = basis3();
        let two = fr(&b, [2, 0, 0], 1);
        let out = extend_to_free(&[two.clone()]).unwrap();
        assert_eq!(out, vec![two]);
    }

    #[test]
    fn three_and_two_collapse_to_one() {
        // {3, 2} -> {1} with certificates 3 = 3*1, 2 = 2*1.
        let b = basis3();
        let three = fr(&b, [3, 0, 0], 1);
        let two = fr(&b, [2, 0, 0], 1);
        let out = extend_to_free(&[three.clone(), two.clone()]).unwrap();
        assert_eq!(out, vec![fr(&b, [1, 0, 0], 1)]);
        let c3 = membership(&out, &three, 10).unwrap().unwrap();
        assert_eq!(c3.coefficients, vec![BigInt::from(3)]);
        assert!(c3.verify(&out, &three).unwrap());
        let c2 = membership(&out, &two, 10).unwrap().unwrap();
        assert_eq!(c2.coefficients, vec![BigInt::from(2)]);
    }

    #[test]
    fn proof_walkthrough_with_sqrt2() {
        // {1, sqrt2, 3 sqrt2 - 1} -> {(3 sqrt2 - 1)/3, 1/3}, certificates
        // 1 = 3*(1/3), sqrt2 = first + second, 3 sqrt2 - 1 = 3*first.
        let b = basis3();
        let one = fr(&b, [1, 0, 0], 1);
        let s2 = fr(&b, [0, 1, 0], 1);
        let dep = fr(&b, [-1, 3, 0], 1);
        let out = extend_to_free(&[one.clone(), s2.clone(), dep.clone()]).unwrap();
        let expected_first = fr(&b, [-1, 3, 0], 3);
        let expected_second = fr(&b, [1, 0, 0], 3);
        assert_eq!(out, vec![expected_first, expected_second]);
        let c_one = membership(&out, &one, 10).unwrap().unwrap();
        assert_eq!(c_one.coefficients, vec![BigInt::from(0), BigInt::from(3)]);
        let c_s2 = membership(&out, &s2, 10).unwrap().unwrap();
        assert_eq!(c_s2.coefficients, vec![BigInt::from(1), BigInt::from(1)]);
        let c_dep = membership(&out, &dep, 10).unwrap().unwrap();
        assert_eq!(c_dep.coefficients, vec![BigInt::from(3), BigInt::from(0)]);
        for (cert, target) in [(&c_one, &one), (&c_s2, &s2), (&c_dep, &dep)] {
            assert!(cert.verify(&out, target).unwrap());
        }
    }

    #[test]
    fn membership_parity_not_found() {
        let b = basis3();
        let two = fr(&b, [2, 0, 0], 1);
        let three = fr(&b, [3, 0, 0], 1);
        assert!(membership(&[two], &three, 50).unwrap().is_none());
    }

    #[test]
    fn nonpositive_inputs_rejected() {
        let b = basis3();
        let neg = fr(&b, [-1, 0, 0], 1);
        assert!(matches!(
            extend_to_free(&[neg]),
            Err(MonoidError::NonPositive(_))
        ));
        let zero = fr(&b, [0, 0, 0], 1);
        assert!(extend_to_free(&[zero]).is_err());
    }

    #[test]
    fn seeded_inputs_extend_and_verify() {
        use rand::{Rng, SeedableRng};
        let b = basis3();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for round in 0..100 {
            let n = rng.gen_range(1..=5usize);
            let mut inputs = Vec::new();
            while inputs.len() < n {
                let c = [
                    rng.gen_range(-3..6i64),
                    rng.gen_range(-3..6i64),
                    rng.gen_range(-3..6i64),
                ];
                let d = rng.gen_range(1..4i64);
                let x = fr(&b, c, d);
                if matches!(x.is_positive_certified(), Ok(true)) {
                    inputs.push(x);
                }
            }
            let out = extend_to_free(&inputs)
                .unwrap_or_else(|e| panic!("round {round}: extension failed: {e}"));
            assert!(out.len() <= inputs.len());
            assert_eq!(rational_rank(&out), out.len(), "round {round}");
            for x in &out {
                assert!(matches!(x.is_positive_certified(), Ok(true)));
            }
            for x in &inputs {
                let cert = membership(&out, x, 64)
                    .unwrap()
                    .unwrap_or_else(|| panic!("round {round}: {x:?} not contained"));
                assert!(cert.verify(&out, x).unwrap());
            }
        }
    }

    #[test]
    fn genericity_disjoint_passes() {
        let flux = vec![vec![rat_i(0), rat_i(0), rat_i(1)]];
        let energy = vec![
            vec![rat_i(1), rat_i(0), rat_i(0)],
            vec![rat_i(0), rat_i(1), rat_i(0)],
        ];
        assert!(genericity_test(&flux, &energy, &[], 3).passed());
    }

    #[test]
    fn genericity_planted_relation_fails() {
        // flux alpha_1 declared equal to E_1 - E_2: witness alpha_1.
        let flux = vec![vec![rat_i(0), rat_i(0), rat_i(1)]];
        let energy = vec![
            vec![rat_i(1), rat_i(0), rat_i(0)],
            vec![rat_i(0), rat_i(1), rat_i(0)],
        ];
        // relation: alpha_1 - (E_1 - E_2) = 0
        let relations = vec![vec![rat_i(-1), rat_i(1), rat_i(1)]];
        match genericity_test(&flux, &energy, &relations, 3) {
            Genericity::Fail { witness } => {
                assert!(!witness.iter().all(|c| c.is_zero()));
            }
            Genericity::Pass => panic!("expected failure"),
        }
    }

    #[test]
    fn genericity_rational_rotation_fails() {
        // Rational rotation flux lies in the span of the area symbol.
        let flux = vec![vec![rat(1, 3)]];
        let energy = vec![vec![rat_i(1)]];
        match genericity_test(&flux, &energy, &[], 1) {
            Genericity::Fail { witness } => assert!(!witness[0].is_zero()),
            Genericity::Pass => panic!("expected failure"),
        }
    }
}
