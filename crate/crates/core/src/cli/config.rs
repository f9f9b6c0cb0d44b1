//! Job configuration: a single JSON document, validated against the datum
//! before anything is computed.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classes::SigmaEngine;
use crate::error::{Error, Result};
use crate::frobenius::FrobeniusTwist;
use crate::mazur;
use crate::rootdata::{BasedRootDatum, CartanType, LatticeChoice, LatticeVec};
use crate::weyl::{IwahoriWeylElement, IwahoriWeylGroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumSpec {
    /// `"A2"`, `"A1xA1"`, or a bare series letter together with `rank`.
    #[serde(rename = "type")]
    pub cartan_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default = "default_lattice")]
    pub lattice: LatticeChoice,
}

fn default_lattice() -> LatticeChoice {
    LatticeChoice::SimplyConnected
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauSpec {
    pub lambda: Vec<i64>,
    /// Reduced or unreduced word in the finite simple reflections, 1-based.
    #[serde(default)]
    pub w: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistSpec {
    /// Image of each finite node, 1-based; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<TauSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub datum: DatumSpec,
    #[serde(default)]
    pub twist: TwistSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<i64>>,
    /// Labels of `S~`: `1..=rank` finite nodes, `0, -1, ..` affine nodes.
    #[serde(default, rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_bound: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().to_string())
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn simple(cartan_type: &str, lattice: LatticeChoice) -> Self {
        JobConfig {
            datum: DatumSpec {
                cartan_type: cartan_type.to_string(),
                rank: None,
                lattice,
            },
            twist: TwistSpec::default(),
            mu: None,
            j: None,
            length_bound: None,
            format: None,
        }
    }
}

/// A validated configuration with its engine built.
#[derive(Debug, Clone)]
pub struct Job {
    pub config: JobConfig,
    pub engine: Arc<SigmaEngine>,
    pub mu: Option<LatticeVec>,
    pub j: Option<Vec<usize>>,
    pub length_bound: Option<usize>,
}

impl DatumSpec {
    pub fn build(&self) -> Result<BasedRootDatum> {
        let name = match self.rank {
            Some(r) => format!("{}{}", self.cartan_type, r),
            None => self.cartan_type.clone(),
        };
        let cartan_type: CartanType = name
            .parse()
            .map_err(|e: Error| Error::config("datum.type", e.to_string()))?;
        BasedRootDatum::new(cartan_type, self.lattice.clone()).map_err(|e| Error::config("datum.lattice", e.to_string()))
    }
}

impl TwistSpec {
    pub fn build(&self, group: Arc<IwahoriWeylGroup>) -> Result<FrobeniusTwist> {
        let rank = group.datum().rank();
        let sigma0 = match &self.sigma0 {
            None => (0..rank).collect(),
            Some(p) => {
                if p.iter().any(|&i| i == 0 || i > rank) {
                    return Err(Error::config("twist.sigma0", format!("nodes are numbered 1..={rank}")));
                }
                p.iter().map(|i| i - 1).collect()
            }
        };
        let tau = match &self.tau {
            None => group.identity(),
            Some(t) => {
                if t.lambda.len() != group.datum().dim() {
                    return Err(Error::config(
                        "twist.tau.lambda",
                        format!("expected {} coordinates", group.datum().dim()),
                    ));
                }
                if t.w.iter().any(|&i| i == 0 || i > rank) {
                    return Err(Error::config("twist.tau.w", format!("nodes are numbered 1..={rank}")));
                }
                let w0 = group.finite_weyl_group();
                let word: Vec<usize> = t.w.iter().map(|i| i - 1).collect();
                IwahoriWeylElement::new(LatticeVec::from_slice(&t.lambda), w0.from_word(&word))
            }
        };
        FrobeniusTwist::new(group, sigma0, tau).map_err(|e| {
            let path = if self.tau.is_some() && e.to_string().contains("tau") {
                "twist.tau"
            } else {
                "twist.sigma0"
            };
            Error::config(path, e.to_string())
        })
    }
}

impl Job {
    pub fn new(config: JobConfig) -> Result<Self> {
        let group = Arc::new(IwahoriWeylGroup::new(config.datum.build()?)?);
        Self::with_group(config, group)
    }

    /// Reuses an already built group for the same datum.
    pub fn with_group(config: JobConfig, group: Arc<IwahoriWeylGroup>) -> Result<Self> {
        let twist = Arc::new(config.twist.build(group.clone())?);
        let engine = Arc::new(SigmaEngine::new(twist));

        let mu = match &config.mu {
            None => None,
            Some(mu) => {
                let d = group.datum();
                if mu.len() != d.dim() {
                    return Err(Error::config("mu", format!("expected {} coordinates, got {}", d.dim(), mu.len())));
                }
                if !d.is_dominant_integral(mu) {
                    return Err(Error::config("mu", format!("{mu:?} is not dominant")));
                }
                Some(LatticeVec::from_slice(mu))
            }
        };

        let j = match &config.j {
            None => None,
            Some(labels) => {
                let mut j = Vec::new();
                for (k, &l) in labels.iter().enumerate() {
                    let s = group
                        .simple_reflections()
                        .from_label(l)
                        .ok_or_else(|| Error::config(format!("J[{k}]"), format!("no simple reflection labelled {l}")))?;
                    j.push(s);
                }
                j.sort_unstable();
                j.dedup();
                mazur::validate_j(&engine, &j).map_err(|e| Error::config("J", e.to_string()))?;
                Some(j)
            }
        };

        let length_bound = match config.length_bound {
            None => None,
            Some(l) if l < 0 => return Err(Error::config("length_bound", "must be nonnegative")),
            Some(l) => Some(l as usize),
        };

        Ok(Job {
            config,
            engine,
            mu,
            j,
            length_bound,
        })
    }

    pub fn group(&self) -> &IwahoriWeylGroup {
        self.engine.group()
    }

    pub fn require_mu(&self) -> Result<&LatticeVec> {
        self.mu.as_ref().ok_or_else(|| Error::config("mu", "this command needs mu"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let c = JobConfig::from_json(
            r#"{"datum": {"type": "A2", "lattice": "adjoint"},
                "twist": {"sigma0": [2, 1], "tau": {"lambda": [1, 0], "w": [1, 2]}},
                "mu": [1, 0], "J": [0], "length_bound": 3, "format": "csv"}"#,
        )
        .unwrap();
        assert_eq!(c.format, Some(Format::Csv));
        assert_eq!(c.datum.lattice, LatticeChoice::Adjoint);
    }

    #[test]
    fn errors_carry_the_field_path() {
        let e = JobConfig::from_json(r#"{"datum": {"type": "A2", "lattice": "adjoint"}, "mu": ["x"]}"#).unwrap_err();
        match e {
            Error::Config { path, .. } => assert_eq!(path, "mu[0]"),
            other => panic!("{other}"),
        }
        let e = JobConfig::from_json(r#"{"datum": {"type": "A2", "lattic": "adjoint"}}"#).unwrap_err();
        assert!(matches!(e, Error::Config { ref path, .. } if path == "datum.lattic"), "{e}");
    }

    #[test]
    fn intermediate_lattice_and_rank_field() {
        let c = JobConfig::from_json(
            r#"{"datum": {"type": "A", "rank": 1, "lattice": {"intermediate": [[1]]}}}"#,
        )
        .unwrap();
        let job = Job::new(c).unwrap();
        assert_eq!(job.group().omega().len(), 2);
    }

    #[test]
    fn semantic_validation() {
        let bad = |json: &str, field: &str| {
            let e = Job::new(JobConfig::from_json(json).unwrap()).unwrap_err();
            match e {
                Error::Config { path, .. } => assert_eq!(path, field, "{json}"),
                other => panic!("{other}"),
            }
        };
        bad(r#"{"datum": {"type": "Q2"}}"#, "datum.type");
        bad(r#"{"datum": {"type": "B2"}, "twist": {"sigma0": [2, 1]}}"#, "twist.sigma0");
        bad(r#"{"datum": {"type": "A1", "lattice": "adjoint"}, "twist": {"tau": {"lambda": [2]}}}"#, "twist.tau");
        bad(r#"{"datum": {"type": "A2"}, "mu": [1, -1]}"#, "mu");
        bad(r#"{"datum": {"type": "A2"}, "J": [0, 1, 2]}"#, "J");
        bad(r#"{"datum": {"type": "A2"}, "twist": {"sigma0": [2, 1]}, "J": [1]}"#, "J");
        bad(r#"{"datum": {"type": "A2"}, "J": [7]}"#, "J[0]");
        bad(r#"{"datum": {"type": "A2"}, "length_bound": -1}"#, "length_bound");
    }
}
