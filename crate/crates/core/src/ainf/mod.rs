//! Finite flux-decorated A-infinity categories.
//!
//! Objects, finite Z/2-graded hom bases, and structure-constant terms
//! decorated with disc energies and boundary-flux data. The A-infinity
//! relations are checked exactly modulo `T^{E_max}` with the sign convention
//!
//! ```text
//! sum_{n,k} (-1)^{||x_1|| + ... + ||x_n||}
//!     mu(x_m, ..., x_{n+k+1}, mu(x_{n+k}, ..., x_{n+1}), x_n, ..., x_1) = 0
//! ```
//!
//! where inputs are stored in composition order `[x_1, ..., x_m]` (first
//! applied first) and `||x|| = |x| + 1` is the reduced degree.

pub mod gen;
mod schema;

pub use schema::CategoryDoc;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::exponents::{Exponent, ExponentBasis, ExponentError, NovikovSeries};

#[derive(Debug, Error)]
pub enum AinfError {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error(
        "A-infinity relation failure on chain [{chain}] at output {output}: \
         residue {residue}"
    )]
    RelationFailure {
        chain: String,
        output: String,
        residue: String,
    },
    #[error("grading violation on term [{0}]: degree of output does not match 2 - arity")]
    Grading(String),
    #[error("strict unitality violation: {0}")]
    Unitality(String),
    #[error("nonpositive energy on non-unit term [{0}]")]
    NonpositiveEnergy(String),
    #[error("zero-energy term of arity {0} > 1 not marked as unit data")]
    ZeroEnergyHigherArity(usize),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
}

pub type Result<T> = std::result::Result<T, AinfError>;

/// Index into the object list.
pub type ObjIdx = usize;
/// Global generator id.
pub type GenId = usize;

#[derive(Debug, Clone)]
pub struct GenInfo {
    pub name: String,
    pub from: ObjIdx,
    pub to: ObjIdx,
    /// Z/2 degree.
    pub degree: u8,
    /// Strict unit of its object (requires `from == to`, degree 0).
    pub is_unit: bool,
}

/// One structure-constant term: a decorated disc.
#[derive(Debug, Clone)]
pub struct MuTerm {
    /// Inputs in composition order (first applied first).
    pub inputs: Vec<GenId>,
    pub output: GenId,
    /// Explicitly stored sign/coefficient.
    pub coeff: BigRational,
    /// Disc energy; nonnegative real value, zero only for unit/Morse data.
    pub energy: Exponent,
    /// Flux class (in `Z^b`) of the interior path from each input to the
    /// output. `None` means no flux data was supplied for this term.
    pub input_fluxes: Option<Vec<Vec<i64>>>,
    /// Marks Morse-type (pearl-model) arity-1 data, which may carry zero
    /// energy.
    pub morse: bool,
}

/// Validation report for the A-infinity relations.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub relations_checked: usize,
    pub failures: Vec<(String, String, String)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Minimal positive energy over non-unit, non-Morse terms.
#[derive(Debug, Clone)]
pub enum EnergyGap {
    /// Only unit/Morse terms present: any cutoff is admissible.
    Infinite,
    Finite(Exponent),
}

impl EnergyGap {
    /// Bar-length bound: words with more non-unit letters than this have
    /// total contraction energy at least `e_max`.
    pub fn bar_length_bound(&self, e_max: &Exponent) -> Result<usize> {
        match self {
            EnergyGap::Infinite => Ok(1),
            EnergyGap::Finite(delta) => {
                let ratio = e_max.value_upper() / delta.value_lower();
                let mut l = ratio.ceil().numer().clone();
                if l.is_negative() {
                    l = num_bigint::BigInt::one();
                }
                Ok(<num_bigint::BigInt as TryInto<usize>>::try_into(l).unwrap_or(1).max(1))
            }
        }
    }
}

#[derive(Debug)]
pub struct AinfCategory {
    basis: Arc<ExponentBasis>,
    objects: Vec<String>,
    gens: Vec<GenInfo>,
    homs: BTreeMap<(ObjIdx, ObjIdx), Vec<GenId>>,
    units: Vec<Option<GenId>>,
    mu: Vec<MuTerm>,
    /// Lookup: input sequence -> indices into `mu`.
    mu_index: BTreeMap<Vec<GenId>, Vec<usize>>,
    flux_rank: usize,
    /// The flux form alpha as an exponent-valued linear map on `Z^b`.
    flux_form: Vec<Exponent>,
    e_max: Exponent,
    arity_cap: usize,
}

impl AinfCategory {
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        basis: Arc<ExponentBasis>,
        objects: Vec<String>,
        gens: Vec<GenInfo>,
        mu: Vec<MuTerm>,
        flux_rank: usize,
        flux_form: Vec<Exponent>,
        e_max: Exponent,
        arity_cap: usize,
    ) -> Result<Self> {
        if flux_form.len() != flux_rank {
            return Err(AinfError::Schema(format!(
                "flux form has {} rows for flux rank {}",
                flux_form.len(),
                flux_rank
            )));
        }
        let mut homs: BTreeMap<(ObjIdx, ObjIdx), Vec<GenId>> = BTreeMap::new();
        let mut units = vec![None; objects.len()];
        for (id, g) in gens.iter().enumerate() {
            if g.from >= objects.len() || g.to >= objects.len() {
                return Err(AinfError::Schema(format!(
                    "generator {} references an unknown object",
                    g.name
                )));
            }
            if g.is_unit {
                if g.from != g.to || g.degree != 0 {
                    return Err(AinfError::Schema(format!(
                        "unit {} must be a degree-0 endomorphism",
                        g.name
                    )));
                }
                if units[g.from].is_some() {
                    return Err(AinfError::Schema(format!(
                        "object {} has two units",
                        objects[g.from]
                    )));
                }
                units[g.from] = Some(id);
            }
            homs.entry((g.from, g.to)).or_default().push(id);
        }
        let mut mu_index: BTreeMap<Vec<GenId>, Vec<usize>> = BTreeMap::new();
        for (i, t) in mu.iter().enumerate() {
            if t.inputs.is_empty() {
                return Err(AinfError::Schema("term with no inputs (curvature)".into()));
            }
            if let Some(f) = &t.input_fluxes {
                if f.len() != t.inputs.len() || f.iter().any(|v| v.len() != flux_rank) {
                    return Err(AinfError::Schema(format!(
                        "term {i}: flux data shape mismatch"
                    )));
                }
            }
            // Composability.
            for w in t.inputs.windows(2) {
                if gens[w[0]].to != gens[w[1]].from {
                    return Err(AinfError::Schema(format!(
                        "term {i}: inputs not composable"
                    )));
                }
            }
            let out = &gens[t.output];
            if out.from != gens[t.inputs[0]].from || out.to != gens[*t.inputs.last().unwrap()].to {
                return Err(AinfError::Schema(format!(
                    "term {i}: output endpoints do not match the input chain"
                )));
            }
            mu_index.entry(t.inputs.clone()).or_default().push(i);
        }
        Ok(AinfCategory {
            basis,
            objects,
            gens,
            homs,
            units,
            mu,
            mu_index,
            flux_rank,
            flux_form,
            e_max,
            arity_cap,
        })
    }

    pub fn basis(&self) -> &Arc<ExponentBasis> {
        &self.basis
    }
    pub fn objects(&self) -> &[String] {
        &self.objects
    }
    pub fn gens(&self) -> &[GenInfo] {
        &self.gens
    }
    pub fn mu_terms(&self) -> &[MuTerm] {
        &self.mu
    }
    pub fn flux_rank(&self) -> usize {
        self.flux_rank
    }
    pub fn e_max(&self) -> &Exponent {
        &self.e_max
    }
    pub fn arity_cap(&self) -> usize {
        self.arity_cap
    }
    pub fn unit_of(&self, o: ObjIdx) -> Option<GenId> {
        self.units[o]
    }

    pub fn object_index(&self, name: &str) -> Option<ObjIdx> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn hom(&self, from: ObjIdx, to: ObjIdx) -> &[GenId] {
        self.homs
            .get(&(from, to))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// Generators of `hom(from, to)` that are not units.
    pub fn hom_non_unit(&self, from: ObjIdx, to: ObjIdx) -> Vec<GenId> {
        self.hom(from, to)
            .iter()
            .copied()
            .filter(|&g| !self.gens[g].is_unit)
            .collect()
    }

    pub fn terms_on(&self, inputs: &[GenId]) -> &[usize] {
        self.mu_index
            .get(inputs)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// The flux form applied to an integer flux vector.
    pub fn flux_value(&self, c: &[i64]) -> Result<Exponent> {
        let mut acc = Exponent::zero(&self.basis);
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0 {
                acc = acc.add(
                    &self.flux_form[i].scale(&BigRational::from_integer(ci.into())),
                )?;
            }
        }
        Ok(acc)
    }

    pub fn gen_label(&self, g: GenId) -> String {
        let info = &self.gens[g];
        format!(
            "{}:{}:{}",
            self.objects[info.from], self.objects[info.to], info.name
        )
    }

    fn chain_label(&self, chain: &[GenId]) -> String {
        chain
            .iter()
            .map(|&g| self.gen_label(g))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Degree check per term: `|output| = sum |inputs| + (2 - arity) mod 2`.
    pub fn check_grading(&self) -> Result<()> {
        for t in &self.mu {
            let k = t.inputs.len() as u32;
            let sum: u32 = t.inputs.iter().map(|&g| self.gens[g].degree as u32).sum();
            let expected = (sum + 2 * k + 2 - k) % 2; // sum + (2 - k) mod 2
            if self.gens[t.output].degree as u32 % 2 != expected {
                return Err(AinfError::Grading(format!(
                    "{} -> {}",
                    self.chain_label(&t.inputs),
                    self.gen_label(t.output)
                )));
            }
        }
        Ok(())
    }

    /// Strict unitality: `mu^2(x, e) = x`, `mu^2(e, x) = (-1)^{|x|} x`, no
    /// other term involves a unit input, and units are closed.
    pub fn check_unitality(&self) -> Result<()> {
        for t in &self.mu {
            let unit_positions: Vec<usize> = t
                .inputs
                .iter()
                .enumerate()
                .filter(|(_, &g)| self.gens[g].is_unit)
                .map(|(i, _)| i)
                .collect();
            if unit_positions.is_empty() {
                continue;
            }
            let label = || {
                format!(
                    "{} -> {}",
                    self.chain_label(&t.inputs),
                    self.gen_label(t.output)
                )
            };
            if t.inputs.len() == 1 {
                return Err(AinfError::Unitality(format!(
                    "unit is not closed: {}",
                    label()
                )));
            }
            if t.inputs.len() > 2 {
                return Err(AinfError::Unitality(format!(
                    "higher product with unit input: {}",
                    label()
                )));
            }
            if !t.energy.is_zero() {
                return Err(AinfError::Unitality(format!(
                    "unit product with nonzero energy: {}",
                    label()
                )));
            }
            let (e_pos, other) = if unit_positions.contains(&0) {
                (0usize, t.inputs[1])
            } else {
                (1usize, t.inputs[0])
            };
            if t.inputs[0] == t.inputs[1] {
                // mu^2(e, e) = e
                if t.output != t.inputs[0] || t.coeff != BigRational::one() {
                    return Err(AinfError::Unitality(label()));
                }
                continue;
            }
            if t.output != other {
                return Err(AinfError::Unitality(label()));
            }
            let expected = if e_pos == 0 {
                // inputs [e, x]: mu^2(x, e) = x
                BigRational::one()
            } else {
                // inputs [x, e]: mu^2(e, x) = (-1)^{|x|} x
                if self.gens[other].degree % 2 == 0 {
                    BigRational::one()
                } else {
                    -BigRational::one()
                }
            };
            if t.coeff != expected {
                return Err(AinfError::Unitality(label()));
            }
        }
        Ok(())
    }

    /// All composable generator chains of the given length.
    fn chains(&self, len: usize) -> Vec<Vec<GenId>> {
        let mut out: Vec<Vec<GenId>> = (0..self.gens.len()).map(|g| vec![g]).collect();
        for _ in 1..len {
            let mut next = Vec::new();
            for c in &out {
                let last = *c.last().unwrap();
                let to = self.gens[last].to;
                for (&(f, _t), gens) in self.homs.range((to, 0)..=(to, usize::MAX)) {
                    debug_assert_eq!(f, to);
                    for &g in gens {
                        let mut c2 = c.clone();
                        c2.push(g);
                        next.push(c2);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Sum of reduced degrees of `chain[..n]`.
    fn maltese(&self, chain: &[GenId], n: usize) -> u32 {
        chain[..n]
            .iter()
            .map(|&g| (self.gens[g].degree as u32 + 1) % 2)
            .sum::<u32>()
            % 2
    }

    /// Evaluate the A-infinity relation on one chain; returns the residue as
    /// a map output-generator -> truncated Novikov series.
    fn relation_residue(&self, chain: &[GenId]) -> Result<BTreeMap<GenId, NovikovSeries>> {
        let m = chain.len();
        let mut acc: BTreeMap<GenId, NovikovSeries> = BTreeMap::new();
        for n in 0..m {
            for k in 1..=(m - n) {
                let inner = &chain[n..n + k];
                let sign_n = self.maltese(chain, n);
                for &t1_idx in self.terms_on(inner) {
                    let t1 = &self.mu[t1_idx];
                    // Outer input list with the inner output spliced in.
                    let mut outer: Vec<GenId> = Vec::with_capacity(m - k + 1);
                    outer.extend_from_slice(&chain[..n]);
                    outer.push(t1.output);
                    outer.extend_from_slice(&chain[n + k..]);
                    for &t2_idx in self.terms_on(&outer) {
                        let t2 = &self.mu[t2_idx];
                        let mut c = &t1.coeff * &t2.coeff;
                        if sign_n == 1 {
                            c = -c;
                        }
                        let e = t1.energy.add(&t2.energy)?;
                        let series = NovikovSeries::monomial(c, e, self.e_max.clone(), false)?;
                        let entry = acc.entry(t2.output).or_insert_with(|| {
                            NovikovSeries::zero(&self.basis, self.e_max.clone(), false)
                        });
                        *entry = entry.add(&series)?;
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Check every A-infinity relation up to the arity cap, exactly modulo
    /// `T^{E_max}`.
    pub fn validate_ainf(&self) -> Result<ValidationReport> {
        self.check_grading()?;
        self.check_unitality()?;
        let mut checked = 0usize;
        let mut failures = Vec::new();
        for len in 1..=self.arity_cap {
            for chain in self.chains(len) {
                checked += 1;
                let residue = self.relation_residue(&chain)?;
                for (out, series) in residue {
                    if !series.is_zero() {
                        failures.push((
                            self.chain_label(&chain),
                            self.gen_label(out),
                            format!("{series:?}"),
                        ));
                    }
                }
            }
        }
        Ok(ValidationReport {
            relations_checked: checked,
            failures,
        })
    }

    /// Minimal energy over non-unit, non-Morse terms; errors on a term whose
    /// energy cannot be certified positive. Arity-1 Morse terms may carry
    /// zero energy; higher-arity terms may not.
    pub fn check_energy_positivity(&self) -> Result<EnergyGap> {
        let mut min: Option<Exponent> = None;
        for t in &self.mu {
            let unit_involved = t.inputs.iter().any(|&g| self.gens[g].is_unit);
            if unit_involved {
                continue;
            }
            if t.morse && t.inputs.len() == 1 {
                continue;
            }
            if t.energy.is_zero() || !t.energy.is_positive_certified()? {
                if t.inputs.len() > 1 {
                    return Err(AinfError::ZeroEnergyHigherArity(t.inputs.len()));
                }
                return Err(AinfError::NonpositiveEnergy(format!(
                    "{} -> {}",
                    self.chain_label(&t.inputs),
                    self.gen_label(t.output)
                )));
            }
            min = Some(match min {
                None => t.energy.clone(),
                Some(cur) => {
                    if t.energy.cmp_real(&cur)? == std::cmp::Ordering::Less {
                        t.energy.clone()
                    } else {
                        cur
                    }
                }
            });
        }
        Ok(match min {
            None => EnergyGap::Infinite,
            Some(e) => EnergyGap::Finite(e),
        })
    }

    /// Full validation entry point used by document loading.
    pub fn validate(&self) -> Result<()> {
        let report = self.validate_ainf()?;
        if let Some((chain, output, residue)) = report.failures.into_iter().next() {
            return Err(AinfError::RelationFailure {
                chain,
                output,
                residue,
            });
        }
        self.check_energy_positivity()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::gen::{seeded_category, SeededParams};
    use super::*;
    use crate::rational::rat_i;

    #[test]
    fn empty_category_is_valid() {
        let basis = crate::exponents::ExponentBasis::new(
            vec![crate::exponents::Symbol {
                name: "E".into(),
                role: crate::exponents::Role::Energy,
                midpoint: rat_i(1),
                radius: rat_i(0),
            }],
            true,
        )
        .unwrap();
        let e_max = Exponent::new(&basis, vec![rat_i(10)]).unwrap();
        let cat = AinfCategory::assemble(basis, vec![], vec![], vec![], 0, vec![], e_max, 4)
            .unwrap();
        assert!(cat.validate_ainf().unwrap().passed());
        assert!(matches!(
            cat.check_energy_positivity().unwrap(),
            EnergyGap::Infinite
        ));
    }

    #[test]
    fn seeded_categories_validate() {
        for seed in 0..20 {
            let cat = seeded_category(&SeededParams::small(seed)).unwrap();
            let report = cat.validate_ainf().unwrap();
            assert!(
                report.passed(),
                "seed {seed}: failures {:?}",
                report.failures
            );
            cat.check_energy_positivity().unwrap();
        }
    }

    #[test]
    fn planted_mu1_square_failure_detected() {
        // Plant d(x) = y, d(y) = x (not a complex over trivial decorations).
        let basis = crate::exponents::ExponentBasis::new(
            vec![crate::exponents::Symbol {
                name: "E".into(),
                role: crate::exponents::Role::Energy,
                midpoint: rat_i(1),
                radius: rat_i(0),
            }],
            true,
        )
        .unwrap();
        let e_max = Exponent::new(&basis, vec![rat_i(10)]).unwrap();
        let one_half = Exponent::new(&basis, vec![crate::rational::rat(1, 2)]).unwrap();
        let gens = vec![
            GenInfo {
                name: "x".into(),
                from: 0,
                to: 1,
                degree: 0,
                is_unit: false,
            },
            GenInfo {
                name: "y".into(),
                from: 0,
                to: 1,
                degree: 1,
                is_unit: false,
            },
        ];
        let mu = vec![
            MuTerm {
                inputs: vec![0],
                output: 1,
                coeff: rat_i(1).into(),
                energy: one_half.clone(),
                input_fluxes: None,
                morse: false,
            },
            MuTerm {
                inputs: vec![1],
                output: 0,
                coeff: rat_i(1).into(),
                energy: one_half,
                input_fluxes: None,
                morse: false,
            },
        ];
        let cat = AinfCategory::assemble(
            basis,
            vec!["A".into(), "B".into()],
            gens,
            mu,
            0,
            vec![],
            e_max,
            4,
        )
        .unwrap();
        let report = cat.validate_ainf().unwrap();
        assert!(!report.passed());
        // The failing relation names the generator.
        assert!(report.failures.iter().any(|(c, _, _)| c.contains(":x")));
    }

    #[test]
    fn seeded_sign_flip_detected() {
        for seed in [3u64, 7, 11] {
            let mut cat = seeded_category(&SeededParams::small(seed)).unwrap();
            // Flip the sign of one unit-product term; unitality check fires.
            let idx = cat
                .mu
                .iter()
                .position(|t| t.inputs.len() == 2 && t.inputs[0] != t.inputs[1])
                .unwrap();
            cat.mu[idx].coeff = -cat.mu[idx].coeff.clone();
            assert!(cat.validate_ainf().is_err() || !cat.validate_ainf().unwrap().passed());
        }
    }
}
