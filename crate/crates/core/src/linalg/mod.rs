//! Exact rank and cohomology analysis of free finite complexes.

mod novwindow;
mod ranks;
mod taterank;

pub use novwindow::{rank_window_novikov, NovikovWindowReport};
pub use ranks::{rank_nov, rank_padic, rank_rat};
pub use taterank::{exceptional_report, generic_rank_tate, RankReport, TateGenericRank};

use thiserror::Error;

use crate::coeff::{Coef, CoefError, RingCtx};

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix shapes inconsistent with gradings: {0}")]
    Shape(String),
    #[error("d^2 != 0 modulo the truncation ideal at entry ({0}, {1})")]
    NotAComplex(usize, usize),
    #[error("precision exhausted: rank not certifiable ({0})")]
    PrecisionExhausted(String),
    #[error("unsupported ring for this operation: {0}")]
    UnsupportedRing(&'static str),
    #[error("all candidate minors indistinguishable from zero at precision")]
    NoCertifiableMinor,
    #[error(transparent)]
    Coef(#[from] CoefError),
    #[error(transparent)]
    Exponent(#[from] crate::exponents::ExponentError),
    #[error(transparent)]
    Padic(#[from] crate::padics::PadicError),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

pub type Matrix = Vec<Vec<Coef>>;

/// A Z/2-graded free complex with differential matrices over a tagged ring.
///
/// `d_even` maps the even part to the odd part (entry `[r][c]` is the
/// coefficient of odd generator `r` in the image of even generator `c`),
/// `d_odd` the other way.
#[derive(Debug, Clone)]
pub struct FreeComplex {
    pub ring: RingCtx,
    pub even: Vec<String>,
    pub odd: Vec<String>,
    pub d_even: Matrix,
    pub d_odd: Matrix,
}

impl FreeComplex {
    pub fn new(
        ring: RingCtx,
        even: Vec<String>,
        odd: Vec<String>,
        d_even: Matrix,
        d_odd: Matrix,
    ) -> Result<Self> {
        if d_even.len() != odd.len() || d_even.iter().any(|r| r.len() != even.len()) {
            return Err(LinalgError::Shape(format!(
                "d_even must be {}x{}",
                odd.len(),
                even.len()
            )));
        }
        if d_odd.len() != even.len() || d_odd.iter().any(|r| r.len() != odd.len()) {
            return Err(LinalgError::Shape(format!(
                "d_odd must be {}x{}",
                even.len(),
                odd.len()
            )));
        }
        Ok(FreeComplex {
            ring,
            even,
            odd,
            d_even,
            d_odd,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.even.len(), self.odd.len())
    }

    /// Verify `d^2 = 0` exactly modulo the truncation ideal.
    pub fn check_d_squared(&self) -> Result<()> {
        for (m1, m2) in [(&self.d_even, &self.d_odd), (&self.d_odd, &self.d_even)] {
            // m1 after m2: (m1 * m2)[i][j]
            for i in 0..m1.len() {
                for j in 0..m2.first().map_or(0, |r| r.len()) {
                    let mut acc = self.ring.zero();
                    for k in 0..m2.len() {
                        acc = acc.add(&m1[i][k].mul(&m2[k][j])?)?;
                    }
                    if !acc.is_truncation_zero() {
                        return Err(LinalgError::NotAComplex(i, j));
                    }
                }
            }
        }
        Ok(())
    }

    /// Cohomology ranks `(even, odd)` for point rings (rational, Novikov,
    /// p-adic). Family rings must be specialized first.
    pub fn cohomology_rank(&self) -> Result<(usize, usize)> {
        let (re, ro) = self.differential_ranks()?;
        Ok((
            self.even.len() - re - ro,
            self.odd.len() - re - ro,
        ))
    }

    /// Ranks of the two differential matrices `(rank d_even, rank d_odd)`.
    pub fn differential_ranks(&self) -> Result<(usize, usize)> {
        Ok((
            matrix_rank(&self.ring, &self.d_even)?,
            matrix_rank(&self.ring, &self.d_odd)?,
        ))
    }

    /// Alternating sum `dim_even - dim_odd`; equal to the alternating sum of
    /// cohomology ranks at every fiber.
    pub fn euler_characteristic(&self) -> i64 {
        self.even.len() as i64 - self.odd.len() as i64
    }

    /// Apply a coefficient map (specialization) entrywise.
    pub fn map_coefficients<F>(&self, ring: RingCtx, mut f: F) -> Result<FreeComplex>
    where
        F: FnMut(&Coef) -> Result<Coef>,
    {
        let map = |m: &Matrix, f: &mut F| -> Result<Matrix> {
            m.iter()
                .map(|row| row.iter().map(|c| f(c)).collect())
                .collect()
        };
        let d_even = map(&self.d_even, &mut f)?;
        let d_odd = map(&self.d_odd, &mut f)?;
        FreeComplex::new(ring, self.even.clone(), self.odd.clone(), d_even, d_odd)
    }
}

/// Rank of a matrix over a point ring, dispatching on the coefficient tag.
pub fn matrix_rank(ring: &RingCtx, m: &Matrix) -> Result<usize> {
    if m.is_empty() || m.iter().all(|r| r.is_empty()) {
        return Ok(0);
    }
    match ring {
        RingCtx::Rat => {
            let mm: Vec<Vec<_>> = m
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|c| match c {
                            Coef::Rat(x) => Ok(x.clone()),
                            other => Err(LinalgError::UnsupportedRing(other.tag())),
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(rank_rat(&mm))
        }
        RingCtx::Nov { .. } => {
            let mm: Vec<Vec<_>> = m
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|c| match c {
                            Coef::Nov(x) => Ok(x.clone()),
                            other => Err(LinalgError::UnsupportedRing(other.tag())),
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(rank_nov(&mm)?.0)
        }
        RingCtx::Padic { .. } => {
            let mm: Vec<Vec<_>> = m
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|c| match c {
                            Coef::Padic(x) => Ok(x.clone()),
                            other => Err(LinalgError::UnsupportedRing(other.tag())),
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            rank_padic(&mm)
        }
        RingCtx::Fam { .. } => Err(LinalgError::UnsupportedRing("novikov-family")),
        RingCtx::Tate { .. } => Err(LinalgError::UnsupportedRing("tate")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_i;
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};

    fn rc(n: i64) -> Coef {
        Coef::Rat(rat_i(n))
    }

    #[test]
    fn zero_differential_gives_module_ranks() {
        let c = FreeComplex::new(
            RingCtx::Rat,
            vec!["e1".into(), "e2".into()],
            vec!["o1".into()],
            vec![vec![rc(0), rc(0)]],
            vec![vec![rc(0)], vec![rc(0)]],
        )
        .unwrap();
        c.check_d_squared().unwrap();
        assert_eq!(c.cohomology_rank().unwrap(), (2, 1));
    }

    #[test]
    fn one_by_one_nonzero_kills_both() {
        let c = FreeComplex::new(
            RingCtx::Rat,
            vec!["e".into()],
            vec!["o".into()],
            vec![vec![rc(3)]],
            vec![vec![rc(0)]],
        )
        .unwrap();
        assert_eq!(c.cohomology_rank().unwrap(), (0, 0));
    }

    /// Independent dense row-reduction oracle over Q.
    fn oracle_rank(m: &[Vec<BigRational>]) -> usize {
        let mut m: Vec<Vec<BigRational>> = m.to_vec();
        let rows = m.len();
        if rows == 0 {
            return 0;
        }
        let cols = m[0].len();
        let mut rank = 0;
        for c in 0..cols {
            let piv = (rank..rows).find(|&r| !num_traits::Zero::is_zero(&m[r][c]));
            let Some(piv) = piv else { continue };
            m.swap(rank, piv);
            let inv = m[rank][c].clone();
            for cc in 0..cols {
                m[rank][cc] = &m[rank][cc] / &inv;
            }
            for r in 0..rows {
                if r != rank && !num_traits::Zero::is_zero(&m[r][c]) {
                    let f = m[r][c].clone();
                    for cc in 0..cols {
                        m[r][cc] = &m[r][cc] - &f * &m[rank][cc];
                    }
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    #[test]
    fn seeded_rational_complexes_match_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            // d_even: 4x4 random; d_odd = 0 so that d^2 = 0.
            let m: Vec<Vec<BigRational>> = (0..4)
                .map(|_| (0..4).map(|_| rat_i(rng.gen_range(-3..4))).collect())
                .collect();
            let rank = oracle_rank(&m);
            let c = FreeComplex::new(
                RingCtx::Rat,
                (0..4).map(|i| format!("e{i}")).collect(),
                (0..4).map(|i| format!("o{i}")).collect(),
                m.iter()
                    .map(|r| r.iter().map(|x| Coef::Rat(x.clone())).collect())
                    .collect(),
                vec![vec![rc(0); 4]; 4],
            )
            .unwrap();
            let (he, ho) = c.cohomology_rank().unwrap();
            assert_eq!(he, 4 - rank);
            assert_eq!(ho, 4 - rank);
        }
    }
}
