//! Rank computations over the point rings.

use num_rational::BigRational;
use num_traits::Zero;

use super::{LinalgError, Result};
use crate::exponents::NovikovSeries;
use crate::padics::PadicNumber;

/// Exact rank over Q.
pub fn rank_rat(m: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = m.to_vec();
    let rows = m.len();
    if rows == 0 || m[0].is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0usize;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let pv = m[rank][c].clone();
        for cc in 0..cols {
            m[rank][cc] = &m[rank][cc] / &pv;
        }
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
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

/// Rank of a matrix of truncated Novikov series, pivoting on minimal
/// T-valuation. Series are canonical modulo the cutoff, so a rank claim is a
/// statement about the quotient ring. Also returns the pivot positions
/// (row, col) chosen, which certify a nonsingular square submatrix.
pub fn rank_nov(m: &[Vec<NovikovSeries>]) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut m: Vec<Vec<NovikovSeries>> = m.to_vec();
    let rows = m.len();
    if rows == 0 || m[0].is_empty() {
        return Ok((0, Vec::new()));
    }
    let cols = m[0].len();
    let mut used_rows = vec![false; rows];
    let mut used_cols = vec![false; cols];
    let mut pivots = Vec::new();
    loop {
        // Minimal-valuation entry among unused rows/columns.
        let mut best: Option<(usize, usize)> = None;
        for r in 0..rows {
            if used_rows[r] {
                continue;
            }
            for c in 0..cols {
                if used_cols[c] || m[r][c].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some((r, c)),
                    Some((br, bc)) => {
                        let cur = m[r][c].valuation().unwrap();
                        let old = m[br][bc].valuation().unwrap();
                        if cur.cmp_real(old)? == std::cmp::Ordering::Less {
                            Some((r, c))
                        } else {
                            Some((br, bc))
                        }
                    }
                };
            }
        }
        let Some((pr, pc)) = best else {
            break;
        };
        let pivot = m[pr][pc].clone();
        let pivot_inv = pivot.inverse_mod(pivot.cutoff())?;
        for r in 0..rows {
            if r == pr || used_rows[r] || m[r][pc].is_zero() {
                continue;
            }
            let factor = m[r][pc].mul(&pivot_inv)?;
            for c in 0..cols {
                if used_cols[c] {
                    continue;
                }
                let delta = factor.mul(&m[pr][c])?;
                m[r][c] = m[r][c].sub(&delta)?;
            }
        }
        used_rows[pr] = true;
        used_cols[pc] = true;
        pivots.push((pr, pc));
    }
    Ok((pivots.len(), pivots))
}

/// Rank of a p-adic matrix, pivoting on minimal valuation and tracking the
/// guaranteed precision floor. A rank claim is emitted only when every
/// rejected entry is provably zero at the floor.
pub fn rank_padic(m: &[Vec<PadicNumber>]) -> Result<usize> {
    // The floor: minimal absolute precision over all entries (entries that
    // are exact impose no cap).
    let floor = m
        .iter()
        .flatten()
        .filter_map(|e| e.abs_precision())
        .min()
        .unwrap_or(i64::MAX);
    rank_padic_mod(m, floor)
}

/// Rank modulo `p^floor` with explicit floor.
pub fn rank_padic_mod(m: &[Vec<PadicNumber>], floor: i64) -> Result<usize> {
    let mut m: Vec<Vec<PadicNumber>> = m.to_vec();
    let rows = m.len();
    if rows == 0 || m[0].is_empty() {
        return Ok(0);
    }
    let cols = m[0].len();
    let mut used_rows = vec![false; rows];
    let mut used_cols = vec![false; cols];
    let mut rank = 0usize;
    loop {
        let mut best: Option<(usize, usize, i64)> = None;
        for r in 0..rows {
            if used_rows[r] {
                continue;
            }
            for c in 0..cols {
                if used_cols[c] {
                    continue;
                }
                if let Some(v) = m[r][c].valuation() {
                    if v < floor && best.map_or(true, |(_, _, bv)| v < bv) {
                        best = Some((r, c, v));
                    }
                }
            }
        }
        let Some((pr, pc, _)) = best else {
            break;
        };
        let pivot_inv = m[pr][pc].inv()?;
        for r in 0..rows {
            if r == pr || used_rows[r] {
                continue;
            }
            if m[r][pc].is_zero_mod(floor) {
                continue;
            }
            let factor = m[r][pc].mul(&pivot_inv)?;
            for c in 0..cols {
                if used_cols[c] {
                    continue;
                }
                let delta = factor.mul(&m[pr][c])?;
                m[r][c] = m[r][c].sub(&delta)?;
            }
        }
        used_rows[pr] = true;
        used_cols[pc] = true;
        rank += 1;
    }
    // Certify: every remaining entry must be provably zero at the floor.
    for r in 0..rows {
        if used_rows[r] {
            continue;
        }
        for c in 0..cols {
            if used_cols[c] {
                continue;
            }
            if !m[r][c].is_zero_mod(floor) {
                return Err(LinalgError::PrecisionExhausted(format!(
                    "entry ({r}, {c}) is neither a usable pivot nor provably zero mod p^{floor}"
                )));
            }
        }
    }
    Ok(rank)
}
