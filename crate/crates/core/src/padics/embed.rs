//! Embeddings of the formal Novikov world into `Q_p`.
//!
//! Basis symbols are assigned seeded pseudo-random p-adic images:
//!
//! * monotone mode: every symbol `g_i -> 1 + p mu_i`, a 1-unit, so arbitrary
//!   rational exponents with p-free denominators embed via the binomial
//!   exponential;
//! * generic mode: energy symbols `E_i -> p mu_i` (valuation exactly 1, so
//!   series with growing energy converge p-adically) and flux symbols
//!   `alpha_j -> 1 + p mu_j'`.
//!
//! Algebraic independence of the images is not certifiable at finite
//! precision; the images are seeded pseudo-random units, and an accidental
//! relation surfaces as a zero divisor downstream rather than silently.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    binom_exp_at, binom_exp_series, pow_u64, PadicError, PadicNumber, Result, TateSeries,
};
use crate::exponents::{Exponent, ExponentBasis, NovikovSeries, Role};
use crate::monoid::genericity_test;
use crate::rational::format_rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingMode {
    Monotone,
    Generic,
}

/// Deterministic assignment of p-adic images to basis symbols.
#[derive(Debug, Clone)]
pub struct Embedding {
    basis: Arc<ExponentBasis>,
    mode: EmbeddingMode,
    prime: u64,
    precision: u32,
    seed: u64,
    images: Vec<PadicNumber>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    pub mode: EmbeddingMode,
    pub p: u64,
    pub precision: u32,
    pub seed: u64,
}

impl Embedding {
    /// Build the embedding. Generic mode requires the basis to be
    /// role-partitioned with declared independence (so the genericity test
    /// over the declared relations passes); explicit relations can be
    /// supplied with [`Embedding::build_with_relations`].
    pub fn build(
        basis: &Arc<ExponentBasis>,
        mode: EmbeddingMode,
        p: u64,
        precision: u32,
        seed: u64,
    ) -> Result<Self> {
        Embedding::build_with_relations(basis, mode, p, precision, seed, &[])
    }

    pub fn build_with_relations(
        basis: &Arc<ExponentBasis>,
        mode: EmbeddingMode,
        p: u64,
        precision: u32,
        seed: u64,
        relations: &[Vec<BigRational>],
    ) -> Result<Self> {
        super::check_prime(p)?;
        if !super::fits_u63(p, precision) {
            return Err(PadicError::PrecisionTooLarge { p, prec: precision });
        }
        if mode == EmbeddingMode::Generic {
            if !basis.independence_declared() && relations.is_empty() {
                return Err(PadicError::Embedding(
                    "generic mode requires declared independence or explicit relations".into(),
                ));
            }
            let flux: Vec<Vec<BigRational>> = basis
                .indices_with_role(Role::Flux)
                .into_iter()
                .map(|i| Exponent::unit(basis, i).coords().to_vec())
                .collect();
            let energy: Vec<Vec<BigRational>> = basis
                .indices_with_role(Role::Energy)
                .into_iter()
                .map(|i| Exponent::unit(basis, i).coords().to_vec())
                .collect();
            let verdict = genericity_test(&flux, &energy, relations, basis.rank());
            if !verdict.passed() {
                return Err(PadicError::Embedding(
                    "genericity test failed for the declared basis".into(),
                ));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p << 16) ^ ((precision as u64) << 40));
        let pn = pow_u64(p, precision);
        let mut images = Vec::with_capacity(basis.rank());
        for s in basis.symbols() {
            let image = match (mode, s.role) {
                (EmbeddingMode::Monotone, _) | (EmbeddingMode::Generic, Role::Flux) => {
                    // 1 + p*mu with mu in Z_p: a 1-unit.
                    let mu = rng.gen_range(0..pn / p);
                    PadicNumber::from_unit_parts(p, 0, 1 + p * mu, precision)?
                }
                (EmbeddingMode::Generic, Role::Energy) => {
                    // p*mu with mu a unit: valuation exactly 1.
                    let mut mu = rng.gen_range(0..pn);
                    if mu % p == 0 {
                        mu += 1;
                    }
                    PadicNumber::from_unit_parts(p, 1, mu, precision)?
                }
            };
            images.push(image);
        }
        Ok(Embedding {
            basis: Arc::clone(basis),
            mode,
            prime: p,
            precision,
            seed,
            images,
        })
    }

    pub fn basis(&self) -> &Arc<ExponentBasis> {
        &self.basis
    }
    pub fn mode(&self) -> EmbeddingMode {
        self.mode
    }
    pub fn prime(&self) -> u64 {
        self.prime
    }
    pub fn precision(&self) -> u32 {
        self.precision
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn images(&self) -> &[PadicNumber] {
        &self.images
    }

    pub fn spec(&self) -> EmbeddingSpec {
        EmbeddingSpec {
            mode: self.mode,
            p: self.prime,
            precision: self.precision,
            seed: self.seed,
        }
    }

    /// Image of `T^g` for a single formal exponent.
    pub fn embed_exponent(&self, g: &Exponent) -> Result<PadicNumber> {
        let mut acc = PadicNumber::one(self.prime, self.precision)?;
        for (i, c) in g.coords().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sym = &self.basis.symbols()[i];
            let factor = match (self.mode, sym.role) {
                (EmbeddingMode::Generic, Role::Energy) => {
                    if !c.is_integer() || c.is_negative() {
                        return Err(PadicError::Embedding(format!(
                            "energy coordinate {} of symbol {:?} must be a nonnegative integer \
                             in generic mode",
                            format_rational(c),
                            sym.name
                        )));
                    }
                    let k: i64 = c.numer().try_into().map_err(|_| {
                        PadicError::Embedding("energy coordinate too large".into())
                    })?;
                    self.images[i].pow(k)?
                }
                _ => binom_exp_at(&self.images[i], c)?,
            };
            acc = acc.mul(&factor)?;
        }
        Ok(acc)
    }

    /// Term-by-term image of a Novikov series.
    ///
    /// Monotone mode requires an exact (polynomial) series: a dropped tail
    /// would map to units and destroy all precision. In generic mode the
    /// dropped tail has image valuation at least the cutoff's weight, which
    /// caps the reported precision.
    pub fn embed_novikov(&self, a: &NovikovSeries) -> Result<PadicNumber> {
        let mut acc = PadicNumber::zero(self.prime);
        for (c, e) in a.terms() {
            let coeff = PadicNumber::from_rational(self.prime, c, self.precision)?;
            acc = acc.add(&coeff.mul(&self.embed_exponent(e)?)?)?;
        }
        if !a.is_polynomial() {
            match self.mode {
                EmbeddingMode::Monotone => {
                    return Err(PadicError::Embedding(
                        "truncated series cannot be embedded in monotone mode".into(),
                    ));
                }
                EmbeddingMode::Generic => {
                    acc = acc.add(&PadicNumber::zero_at(
                        self.prime,
                        self.tail_valuation_bound(a.cutoff())?,
                    ))?;
                }
            }
        }
        Ok(acc)
    }

    /// Valuation lower bound for the image of any term at or beyond the
    /// cutoff: each unit of energy weight contributes at least one power of
    /// p in generic mode.
    fn tail_valuation_bound(&self, cutoff: &Exponent) -> Result<i64> {
        let mut max_energy = BigRational::zero();
        for s in self.basis.symbols() {
            if s.role == Role::Energy {
                let up = &s.midpoint + &s.radius;
                if up > max_energy {
                    max_energy = up;
                }
            }
        }
        if !max_energy.is_positive() {
            return Ok(0);
        }
        let ratio = cutoff.value_lower() / max_energy;
        Ok(ratio.ceil().numer().try_into().unwrap_or(0))
    }

    /// The weight factor `(T_mu^g)^t` as a truncated Tate series in the
    /// requested variable (1 or 2) of the two-variable algebra, or a plain
    /// one-variable series when `vars == 1`.
    pub fn embed_family_weight(
        &self,
        g: &Exponent,
        vars: u8,
        var: u8,
        degree: u32,
    ) -> Result<TateSeries> {
        if self.mode == EmbeddingMode::Generic {
            for (i, c) in g.coords().iter().enumerate() {
                if !c.is_zero() && self.basis.symbols()[i].role == Role::Energy {
                    return Err(PadicError::Embedding(format!(
                        "flux weight exponent has energy-role coordinate at {:?}",
                        self.basis.symbols()[i].name
                    )));
                }
            }
        }
        let w = self.embed_exponent(g)?;
        if !w.is_one_unit() {
            return Err(PadicError::NotOneUnit(format!(
                "weight base {w:?} is not a 1-unit"
            )));
        }
        let series = binom_exp_series(&w, degree)?;
        match vars {
            1 => Ok(series),
            2 => series.inject(var),
            _ => Err(PadicError::TateMismatch("vars must be 1 or 2".into())),
        }
    }
}
