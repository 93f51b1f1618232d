//! Serialized fitted models.
//!
//! A model file records everything needed to re-evaluate a fit: the kernel
//! spec, the constraint geometry, and the solved coefficients. Difference
//! models additionally record their gauge. In the `"H_M"` gauge the model is
//! determined only up to a common additive value and evaluations are
//! meaningful through differences alone; the `"anchored"` gauge pins the
//! value at one point and makes absolute evaluations meaningful.
//!
//! Serialization is deterministic: field order is fixed and floats use the
//! shortest round-trip form, so equal models produce byte-identical files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::base::{OutVector, Point};
use crate::complexfmt::JsonComplex;
use crate::error::{Error, Result};
use crate::kernels::{build_kernel, KernelSpec};
use crate::relative::{anchor_offset, DifferenceFit, RelativeElement};
use crate::rkhs::{RkhsElement, ValueFit};

/// Gauge of a difference model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gauge {
    /// determined up to a common additive value
    #[serde(rename = "H_M")]
    HM,
    /// pinned to a recorded value at a recorded anchor point
    #[serde(rename = "anchored")]
    Anchored,
}

/// A constraint pair in a difference model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Anchor record of an anchored difference model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelAnchor {
    pub x: Vec<f64>,
    /// additive offset that realizes the anchored value
    pub offset: Vec<JsonComplex>,
}

/// On-disk form of a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelFile {
    /// interpolant through prescribed values
    Values {
        kernel_spec: KernelSpec,
        centers: Vec<Vec<f64>>,
        coefficients: Vec<Vec<JsonComplex>>,
        residual: f64,
    },
    /// least-squares fit through prescribed differences
    Differences {
        kernel_spec: KernelSpec,
        pairs: Vec<ModelPair>,
        coefficients: Vec<Vec<JsonComplex>>,
        residual: f64,
        gauge: Gauge,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        anchor: Option<ModelAnchor>,
    },
}

fn coeff_rows(coefficients: &[OutVector]) -> Vec<Vec<JsonComplex>> {
    coefficients
        .iter()
        .map(|c| c.entries().iter().map(|&z| JsonComplex(z)).collect())
        .collect()
}

fn coeff_vectors(rows: &[Vec<JsonComplex>], m: usize) -> Result<Vec<OutVector>> {
    rows.iter()
        .map(|row| {
            if row.len() != m {
                return Err(Error::Model(format!(
                    "coefficient row has {} entries, kernel output dimension is {m}",
                    row.len()
                )));
            }
            OutVector::new(row.iter().map(|z| z.0).collect())
        })
        .collect()
}

impl ModelFile {
    /// Captures a value fit.
    pub fn from_value_fit(fit: &ValueFit) -> Self {
        ModelFile::Values {
            kernel_spec: fit.element.kernel().spec().clone(),
            centers: fit
                .element
                .centers()
                .iter()
                .map(|p| p.coords().to_vec())
                .collect(),
            coefficients: coeff_rows(fit.element.coefficients()),
            residual: fit.residual,
        }
    }

    /// Captures a difference fit, anchored when an anchor is given.
    pub fn from_difference_fit(
        fit: &DifferenceFit,
        anchor: Option<(&Point, &OutVector)>,
    ) -> Result<Self> {
        let anchor = match anchor {
            Some((x, value)) => {
                let offset = anchor_offset(&fit.element, x, value)?;
                Some(ModelAnchor {
                    x: x.coords().to_vec(),
                    offset: offset.entries().iter().map(|&z| JsonComplex(z)).collect(),
                })
            }
            None => None,
        };
        Ok(ModelFile::Differences {
            kernel_spec: fit.element.kernel().spec().clone(),
            pairs: fit
                .element
                .sections()
                .iter()
                .map(|s| ModelPair {
                    x: s.x().coords().to_vec(),
                    y: s.y().coords().to_vec(),
                })
                .collect(),
            coefficients: coeff_rows(fit.element.coefficients()),
            residual: fit.residual,
            gauge: if anchor.is_some() {
                Gauge::Anchored
            } else {
                Gauge::HM
            },
            anchor,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Rebuilds the evaluable form, validating the kernel spec and all
    /// dimensions.
    pub fn instantiate(&self) -> Result<FittedModel> {
        match self {
            ModelFile::Values {
                kernel_spec,
                centers,
                coefficients,
                residual: _,
            } => {
                let kernel = build_kernel(kernel_spec)?;
                if centers.len() != coefficients.len() {
                    return Err(Error::Model(format!(
                        "{} centers but {} coefficient rows",
                        centers.len(),
                        coefficients.len()
                    )));
                }
                let centers = centers
                    .iter()
                    .map(|c| Point::new(c.clone()))
                    .collect::<Result<Vec<_>>>()?;
                let coeffs = coeff_vectors(coefficients, kernel_spec.m)?;
                Ok(FittedModel::Values(RkhsElement::new(
                    kernel, centers, coeffs,
                )?))
            }
            ModelFile::Differences {
                kernel_spec,
                pairs,
                coefficients,
                residual: _,
                gauge,
                anchor,
            } => {
                let kernel = build_kernel(kernel_spec)?;
                if pairs.len() != coefficients.len() {
                    return Err(Error::Model(format!(
                        "{} pairs but {} coefficient rows",
                        pairs.len(),
                        coefficients.len()
                    )));
                }
                let pairs = pairs
                    .iter()
                    .map(|p| Ok((Point::new(p.x.clone())?, Point::new(p.y.clone())?)))
                    .collect::<Result<Vec<_>>>()?;
                let coeffs = coeff_vectors(coefficients, kernel_spec.m)?;
                let element = RelativeElement::from_pairs(kernel, &pairs, coeffs)?;
                let offset = match (gauge, anchor) {
                    (Gauge::Anchored, Some(a)) => Some(OutVector::new(
                        a.offset.iter().map(|z| z.0).collect(),
                    )?),
                    (Gauge::Anchored, None) => {
                        return Err(Error::Model(
                            "anchored gauge requires an anchor record".into(),
                        ))
                    }
                    (Gauge::HM, Some(_)) => {
                        return Err(Error::Model(
                            "H_M gauge must not carry an anchor record".into(),
                        ))
                    }
                    (Gauge::HM, None) => None,
                };
                if let Some(o) = &offset {
                    o.check_dim(kernel_spec.m, "anchor offset")?;
                }
                Ok(FittedModel::Differences { element, offset })
            }
        }
    }
}

/// An evaluable fitted model.
#[derive(Debug, Clone)]
pub enum FittedModel {
    Values(RkhsElement),
    Differences {
        element: RelativeElement,
        /// present exactly in the anchored gauge
        offset: Option<OutVector>,
    },
}

impl FittedModel {
    /// Evaluates the model at `t`. For an unanchored difference model the
    /// result is one gauge representative; only differences of such
    /// evaluations are determined.
    pub fn evaluate(&self, t: &Point) -> Result<OutVector> {
        match self {
            FittedModel::Values(f) => f.evaluate(t),
            FittedModel::Differences { element, offset } => {
                let raw = element.evaluate(t)?;
                Ok(match offset {
                    Some(o) => raw.add(o),
                    None => raw,
                })
            }
        }
    }

    /// Output dimension of evaluations.
    pub fn output_dim(&self) -> usize {
        match self {
            FittedModel::Values(f) => f.kernel().spec().m,
            FittedModel::Differences { element, .. } => element.kernel().spec().m,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::BaseKernel;
    use crate::relative::{fit_differences, DifferenceConstraint};
    use crate::rkhs::{fit_values, ValueConstraint};

    fn p(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    fn gaussian_spec() -> KernelSpec {
        KernelSpec::scalar_times_identity(BaseKernel::Gaussian { gamma: 1.0 }, 1)
    }

    #[test]
    fn value_model_round_trips_and_evaluates() {
        let kernel = build_kernel(&gaussian_spec()).unwrap();
        let fit = fit_values(
            &kernel,
            &[
                ValueConstraint::new(p(&[0.0]), OutVector::from_reals(&[1.0]).unwrap()),
                ValueConstraint::new(p(&[1.0]), OutVector::from_reals(&[0.0]).unwrap()),
            ],
            0.0,
        )
        .unwrap();
        let file = ModelFile::from_value_fit(&fit);
        let round = ModelFile::from_json(&file.to_json().unwrap()).unwrap();
        assert_eq!(round, file);
        let model = round.instantiate().unwrap();
        let direct = fit.element.evaluate(&p(&[0.4])).unwrap();
        let loaded = model.evaluate(&p(&[0.4])).unwrap();
        assert!(direct.sub(&loaded).norm() < 1e-15);
    }

    #[test]
    fn difference_model_gauge_field() {
        let kernel = build_kernel(&gaussian_spec()).unwrap();
        let fit = fit_differences(
            &kernel,
            &[DifferenceConstraint::new(
                p(&[0.0]),
                p(&[1.0]),
                OutVector::from_reals(&[1.0]).unwrap(),
            )],
            0.0,
        )
        .unwrap();
        let free = ModelFile::from_difference_fit(&fit, None).unwrap();
        let text = free.to_json().unwrap();
        assert!(text.contains("\"gauge\": \"H_M\""));
        assert!(!text.contains("anchor"));

        let anchor_v = OutVector::from_reals(&[2.0]).unwrap();
        let anchored =
            ModelFile::from_difference_fit(&fit, Some((&p(&[0.0]), &anchor_v))).unwrap();
        let text = anchored.to_json().unwrap();
        assert!(text.contains("\"gauge\": \"anchored\""));
        assert!(text.contains("\"anchor\""));

        let model = ModelFile::from_json(&text).unwrap().instantiate().unwrap();
        let at_anchor = model.evaluate(&p(&[0.0])).unwrap();
        assert!((at_anchor.entries()[0].re - 2.0).abs() < 1e-12);
        let diff = model
            .evaluate(&p(&[1.0]))
            .unwrap()
            .sub(&model.evaluate(&p(&[0.0])).unwrap());
        assert!((diff.entries()[0].re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gauge_and_anchor_must_agree() {
        let bad = r#"{
            "model": "differences",
            "kernel_spec": { "variant": "scalar_times_identity",
                             "base": { "name": "gaussian", "gamma": 1.0 },
                             "m": 1 },
            "pairs": [ { "x": [0.0], "y": [1.0] } ],
            "coefficients": [[1.0]],
            "residual": 0.0,
            "gauge": "anchored"
        }"#;
        let file = ModelFile::from_json(bad).unwrap();
        assert!(file.instantiate().is_err());
    }

    #[test]
    fn serialization_is_deterministic() {
        let kernel = build_kernel(&gaussian_spec()).unwrap();
        let fit = fit_values(
            &kernel,
            &[ValueConstraint::new(
                p(&[0.0]),
                OutVector::from_reals(&[1.0]).unwrap(),
            )],
            0.0,
        )
        .unwrap();
        let a = ModelFile::from_value_fit(&fit).to_json().unwrap();
        let b = ModelFile::from_value_fit(&fit).to_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn corrupt_coefficient_width_is_rejected() {
        let bad = r#"{
            "model": "values",
            "kernel_spec": { "variant": "scalar_times_identity",
                             "base": { "name": "gaussian", "gamma": 1.0 },
                             "m": 2 },
            "centers": [[0.0]],
            "coefficients": [[1.0]],
            "residual": 0.0
        }"#;
        let file = ModelFile::from_json(bad).unwrap();
        assert!(file.instantiate().is_err());
    }
}
