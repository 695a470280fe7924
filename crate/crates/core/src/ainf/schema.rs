//! Category document schema (JSON syntax) and round-trippable loading.

use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{AinfCategory, AinfError, GenInfo, MuTerm, Result};
use crate::exponents::{BasisDoc, Exponent, ExponentBasis};
use crate::rational::{format_rational, parse_rational};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenRefDoc {
    pub from: String,
    pub to: String,
    pub name: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub name: String,
    pub degree: u8,
    #[serde(default)]
    pub unit: bool,
    /// Optional base-path rescaling `x -> T^{g(x)} x`, applied at load time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_rescale: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomDoc {
    pub source: String,
    pub target: String,
    pub generators: Vec<GeneratorDoc>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FluxesDoc {
    /// Arity-1 shorthand: flux of the single input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dh: Option<Vec<i64>>,
    /// Arity-2 shorthand: flux of the first input (composition order).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<Vec<i64>>,
    /// Arity-2 shorthand: flux of the second input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<Vec<i64>>,
    /// General form: one vector per input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_input: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MuDoc {
    pub arity: usize,
    pub inputs: Vec<GenRefDoc>,
    pub output: GenRefDoc,
    pub coefficient: String,
    pub energy_coords: Vec<String>,
    #[serde(default)]
    pub fluxes: FluxesDoc,
    #[serde(default)]
    pub morse: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CutoffsDoc {
    pub e_max: Vec<String>,
    pub arity: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CategoryDoc {
    pub objects: Vec<String>,
    pub basis: BasisDoc,
    pub flux_rank: usize,
    /// Rows of the flux form: exponent coordinates per `Z^b` basis vector.
    pub flux_form: Vec<Vec<String>>,
    pub homs: Vec<HomDoc>,
    pub mu: Vec<MuDoc>,
    pub cutoffs: CutoffsDoc,
}

impl FluxesDoc {
    fn resolve(&self, arity: usize, flux_rank: usize) -> Result<Option<Vec<Vec<i64>>>> {
        if let Some(per) = &self.per_input {
            return Ok(Some(per.clone()));
        }
        match arity {
            1 => Ok(self.dh.clone().map(|v| vec![v])),
            2 => match (&self.d1, &self.d2) {
                (Some(a), Some(b)) => Ok(Some(vec![a.clone(), b.clone()])),
                (None, None) => Ok(None),
                _ => Err(AinfError::Schema(
                    "arity-2 term must carry both d1 and d2 or neither".into(),
                )),
            },
            _ => {
                if self.dh.is_some() || self.d1.is_some() || self.d2.is_some() {
                    Err(AinfError::Schema(format!(
                        "arity-{arity} term must use per_input flux data"
                    )))
                } else {
                    Ok(None)
                }
            }
        }
        .map(|opt| {
            opt.filter(|v: &Vec<Vec<i64>>| !(flux_rank == 0 && v.iter().all(|x| x.is_empty())))
        })
    }

    fn emit(fluxes: &Option<Vec<Vec<i64>>>) -> FluxesDoc {
        let mut doc = FluxesDoc::default();
        match fluxes {
            None => {}
            Some(v) if v.len() == 1 => doc.dh = Some(v[0].clone()),
            Some(v) if v.len() == 2 => {
                doc.d1 = Some(v[0].clone());
                doc.d2 = Some(v[1].clone());
            }
            Some(v) => doc.per_input = Some(v.clone()),
        }
        doc
    }
}

/// Load a category document: resolve references, apply base-path rescalings,
/// and run the full validation (A-infinity relations, grading, unitality,
/// energy positivity). Rejects on any failure.
pub fn load_category(doc: &CategoryDoc) -> Result<AinfCategory> {
    let basis = ExponentBasis::from_doc(&doc.basis)?;
    let objects = doc.objects.clone();
    let obj_idx = |name: &str| -> Result<usize> {
        objects
            .iter()
            .position(|o| o == name)
            .ok_or_else(|| AinfError::Schema(format!("unknown object {name:?}")))
    };
    let mut gens: Vec<GenInfo> = Vec::new();
    let mut rescales: Vec<Exponent> = Vec::new();
    for hom in &doc.homs {
        let from = obj_idx(&hom.source)?;
        let to = obj_idx(&hom.target)?;
        for g in &hom.generators {
            let rescale = match &g.path_rescale {
                Some(coords) => Exponent::from_coords_doc(&basis, coords)?,
                None => Exponent::zero(&basis),
            };
            gens.push(GenInfo {
                name: g.name.clone(),
                from,
                to,
                degree: g.degree % 2,
                is_unit: g.unit,
            });
            rescales.push(rescale);
        }
    }
    let gen_idx = |r: &GenRefDoc| -> Result<usize> {
        let from = obj_idx(&r.from)?;
        let to = obj_idx(&r.to)?;
        gens.iter()
            .position(|g| g.from == from && g.to == to && g.name == r.name)
            .ok_or_else(|| {
                AinfError::Schema(format!("unknown generator {}:{}:{}", r.from, r.to, r.name))
            })
    };
    let mut mu = Vec::new();
    for m in &doc.mu {
        if m.inputs.len() != m.arity {
            return Err(AinfError::Schema(format!(
                "term declares arity {} but has {} inputs",
                m.arity,
                m.inputs.len()
            )));
        }
        let inputs = m.inputs.iter().map(&gen_idx).collect::<Result<Vec<_>>>()?;
        let output = gen_idx(&m.output)?;
        let coeff = parse_rational(&m.coefficient).map_err(AinfError::Schema)?;
        let mut energy = Exponent::from_coords_doc(&basis, &m.energy_coords)?;
        // Base-path normalization: rescaling x -> T^{g(x)} x multiplies the
        // term by T^{sum g(inputs) - g(output)}.
        for &i in &inputs {
            energy = energy.add(&rescales[i])?;
        }
        energy = energy.sub(&rescales[output])?;
        mu.push(MuTerm {
            inputs,
            output,
            coeff,
            energy,
            input_fluxes: m.fluxes.resolve(m.arity, doc.flux_rank)?,
            morse: m.morse,
        });
    }
    let flux_form = doc
        .flux_form
        .iter()
        .map(|coords| Exponent::from_coords_doc(&basis, coords))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let e_max = Exponent::from_coords_doc(&basis, &doc.cutoffs.e_max)?;
    let cat = AinfCategory::assemble(
        basis,
        objects,
        gens,
        mu,
        doc.flux_rank,
        flux_form,
        e_max,
        doc.cutoffs.arity,
    )?;
    cat.validate()?;
    Ok(cat)
}

impl AinfCategory {
    /// Emit the document form (round-trippable through [`load_category`]).
    pub fn to_doc(&self) -> CategoryDoc {
        let gen_ref = |g: usize| -> GenRefDoc {
            let info = &self.gens()[g];
            GenRefDoc {
                from: self.objects()[info.from].clone(),
                to: self.objects()[info.to].clone(),
                name: info.name.clone(),
            }
        };
        let mut homs: Vec<HomDoc> = Vec::new();
        for (&(f, t), gens) in &self.homs {
            homs.push(HomDoc {
                source: self.objects()[f].clone(),
                target: self.objects()[t].clone(),
                generators: gens
                    .iter()
                    .map(|&g| GeneratorDoc {
                        name: self.gens()[g].name.clone(),
                        degree: self.gens()[g].degree,
                        unit: self.gens()[g].is_unit,
                        path_rescale: None,
                    })
                    .collect(),
            });
        }
        CategoryDoc {
            objects: self.objects().to_vec(),
            basis: self.basis().to_doc(),
            flux_rank: self.flux_rank(),
            flux_form: self
                .flux_form
                .iter()
                .map(|e| e.coords_doc())
                .collect(),
            homs,
            mu: self
                .mu_terms()
                .iter()
                .map(|t| MuDoc {
                    arity: t.inputs.len(),
                    inputs: t.inputs.iter().map(|&g| gen_ref(g)).collect(),
                    output: gen_ref(t.output),
                    coefficient: format_rational(&t.coeff),
                    energy_coords: t.energy.coords_doc(),
                    fluxes: FluxesDoc::emit(&t.input_fluxes),
                    morse: t.morse,
                })
                .collect(),
            cutoffs: CutoffsDoc {
                e_max: self.e_max().coords_doc(),
                arity: self.arity_cap(),
            },
        }
    }
}

// Silence the unused-import lint path for Zero used in flux resolution.
#[allow(unused)]
fn _z(x: &num_rational::BigRational) -> bool {
    x.is_zero()
}

#[cfg(test)]
mod tests {
    use super::super::gen::{seeded_category, SeededParams};
    use super::*;

    #[test]
    fn round_trip_identity_on_validated_categories() {
        for seed in [0u64, 5, 9] {
            let cat = seeded_category(&SeededParams::small(seed)).unwrap();
            let doc = cat.to_doc();
            let json = serde_json::to_string_pretty(&doc).unwrap();
            let doc2: CategoryDoc = serde_json::from_str(&json).unwrap();
            let cat2 = load_category(&doc2).unwrap();
            // Same objects, generators, and structure constants.
            assert_eq!(cat.objects(), cat2.objects());
            assert_eq!(cat.gens().len(), cat2.gens().len());
            assert_eq!(cat.mu_terms().len(), cat2.mu_terms().len());
            for (a, b) in cat.mu_terms().iter().zip(cat2.mu_terms()) {
                assert_eq!(a.inputs, b.inputs);
                assert_eq!(a.output, b.output);
                assert_eq!(a.coeff, b.coeff);
                assert_eq!(a.energy, b.energy);
                assert_eq!(a.input_fluxes, b.input_fluxes);
            }
        }
    }

    #[test]
    fn planted_failure_rejected_at_load() {
        let cat = seeded_category(&SeededParams::small(2)).unwrap();
        let mut doc = cat.to_doc();
        // Plant mu^1 o mu^1 != 0: give some differential target its own
        // differential back to the source.
        let d = doc
            .mu
            .iter()
            .find(|m| m.arity == 1)
            .expect("seeded category has a differential")
            .clone();
        doc.mu.push(MuDoc {
            arity: 1,
            inputs: vec![d.output.clone()],
            output: d.inputs[0].clone(),
            coefficient: "1".into(),
            energy_coords: d.energy_coords.clone(),
            fluxes: FluxesDoc::default(),
            morse: false,
        });
        let err = load_category(&doc).unwrap_err();
        match err {
            AinfError::RelationFailure { chain, .. } => {
                assert!(!chain.is_empty());
            }
            AinfError::Grading(_) => {}
            other => panic!("unexpected error {other:?}"),
        }
    }
}
