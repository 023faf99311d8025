//! On-disk distribution format.
//!
//! Files are single JSON documents with a `schema_version`, a `kind`
//! (`"dfpe"`, `"me"`, or `"me-mixed"`), the order/length, a
//! `representation` tag, and the dense coordinate vector as exact rational
//! strings (`"3/16"`, `"2"`, or decimal literals, parsed without
//! rounding). Coordinate order is the canonical one used everywhere in the
//! library: lexicographic multi-indices for dfpe, the Phi / L_n orders for
//! me. Rationals are never serialized as decimals.

use std::fs;
use std::io::{self, Read, Write};

use exchkit_core::dfpe::{CovarianceVector, DfpeDistribution, DfpeOrder, MomentVector};
use exchkit_core::markov::{GammaPoint, MeDistribution, MixedMomentInput};
use exchkit_core::rational::{parse_rational, Rational};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("invalid json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("value at index {index}: {message}")]
    Value { index: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

/// The raw serde shape; validation happens in [`DistributionFile::parse`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionFile {
    pub schema_version: u32,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<u32>,
    pub representation: String,
    pub values: Vec<String>,
    /// Group means; present only for the covariance representation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub means: Option<Vec<String>>,
    /// Start-state split for `me-mixed` inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q1: Option<String>,
    /// Probabilities of the all-ones-after-start-1 blocks for `me-mixed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1_blocks: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

/// A fully validated input, ready for the command layer.
#[derive(Debug, Clone)]
pub enum ParsedInput {
    DfpeWeights(DfpeDistribution),
    DfpeMoments(MomentVector),
    DfpeCovariances(CovarianceVector),
    MeWeights(MeDistribution),
    MeGamma(GammaPoint),
    MeMixed(MixedMomentInput),
}

fn parse_values(raw: &[String]) -> Result<Vec<Rational>, FormatError> {
    raw.iter()
        .enumerate()
        .map(|(index, s)| {
            parse_rational(s).map_err(|e| FormatError::Value {
                index,
                message: e.to_string(),
            })
        })
        .collect()
}

fn render_values(values: &[Rational]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}

impl DistributionFile {
    pub fn parse(&self) -> Result<ParsedInput, FormatError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let values = parse_values(&self.values)?;
        match self.kind.as_str() {
            "dfpe" => {
                let order = self
                    .order
                    .clone()
                    .ok_or_else(|| invalid("dfpe input needs an \"order\" field"))?;
                let order =
                    DfpeOrder::new(order).map_err(|e| invalid(e.to_string()))?;
                match self.representation.as_str() {
                    "weights" => Ok(ParsedInput::DfpeWeights(
                        DfpeDistribution::new(order, values)
                            .map_err(|e| invalid(e.to_string()))?,
                    )),
                    "moments" => Ok(ParsedInput::DfpeMoments(
                        MomentVector::new(order, values)
                            .map_err(|e| invalid(e.to_string()))?,
                    )),
                    "covariances" => {
                        let means = self
                            .means
                            .as_deref()
                            .ok_or_else(|| invalid("covariances need a \"means\" field"))?;
                        let means = parse_values(means)?;
                        Ok(ParsedInput::DfpeCovariances(
                            CovarianceVector::new(order, means, values)
                                .map_err(|e| invalid(e.to_string()))?,
                        ))
                    }
                    other => Err(invalid(format!(
                        "unknown dfpe representation {other:?}"
                    ))),
                }
            }
            "me" => {
                let n = self
                    .length
                    .ok_or_else(|| invalid("me input needs a \"length\" field"))?;
                if n < 1 {
                    return Err(invalid("length must be >= 1"));
                }
                match self.representation.as_str() {
                    "weights" => Ok(ParsedInput::MeWeights(
                        MeDistribution::new(n, values)
                            .map_err(|e| invalid(e.to_string()))?,
                    )),
                    "gamma" => Ok(ParsedInput::MeGamma(
                        GammaPoint::new(n, values).map_err(|e| invalid(e.to_string()))?,
                    )),
                    other => Err(invalid(format!("unknown me representation {other:?}"))),
                }
            }
            "me-mixed" => {
                let n = self
                    .length
                    .ok_or_else(|| invalid("me-mixed input needs a \"length\" field"))?;
                if self.representation != "gamma" {
                    return Err(invalid("me-mixed input carries the start-0 gamma block"));
                }
                let gamma0 =
                    GammaPoint::new(n, values).map_err(|e| invalid(e.to_string()))?;
                let q0 = self
                    .q0
                    .as_deref()
                    .ok_or_else(|| invalid("me-mixed input needs \"q0\""))?;
                let q1 = self
                    .q1
                    .as_deref()
                    .ok_or_else(|| invalid("me-mixed input needs \"q1\""))?;
                let p1_blocks = self
                    .p1_blocks
                    .as_deref()
                    .ok_or_else(|| invalid("me-mixed input needs \"p1_blocks\""))?;
                Ok(ParsedInput::MeMixed(MixedMomentInput {
                    q0: parse_rational(q0).map_err(|e| invalid(e.to_string()))?,
                    q1: parse_rational(q1).map_err(|e| invalid(e.to_string()))?,
                    gamma0,
                    p1_blocks: parse_values(p1_blocks)?,
                }))
            }
            other => Err(invalid(format!("unknown kind {other:?}"))),
        }
    }

    pub fn from_parsed(input: &ParsedInput) -> DistributionFile {
        let mut file = DistributionFile {
            schema_version: SCHEMA_VERSION,
            kind: String::new(),
            order: None,
            length: None,
            representation: String::new(),
            values: Vec::new(),
            means: None,
            q0: None,
            q1: None,
            p1_blocks: None,
            metadata: None,
        };
        match input {
            ParsedInput::DfpeWeights(d) => {
                file.kind = "dfpe".into();
                file.order = Some(d.order().groups().to_vec());
                file.representation = "weights".into();
                file.values = render_values(d.weights());
            }
            ParsedInput::DfpeMoments(m) => {
                file.kind = "dfpe".into();
                file.order = Some(m.order().groups().to_vec());
                file.representation = "moments".into();
                file.values = render_values(m.values());
            }
            ParsedInput::DfpeCovariances(c) => {
                file.kind = "dfpe".into();
                file.order = Some(c.order().groups().to_vec());
                file.representation = "covariances".into();
                file.values = render_values(c.entries());
                file.means = Some(render_values(c.means()));
            }
            ParsedInput::MeWeights(d) => {
                file.kind = "me".into();
                file.length = Some(d.len());
                file.representation = "weights".into();
                file.values = render_values(d.weights());
            }
            ParsedInput::MeGamma(g) => {
                file.kind = "me".into();
                file.length = Some(g.len());
                file.representation = "gamma".into();
                file.values = render_values(g.values());
            }
            ParsedInput::MeMixed(m) => {
                file.kind = "me-mixed".into();
                file.length = Some(m.gamma0.len());
                file.representation = "gamma".into();
                file.values = render_values(m.gamma0.values());
                file.q0 = Some(m.q0.to_string());
                file.q1 = Some(m.q1.to_string());
                file.p1_blocks = Some(render_values(&m.p1_blocks));
            }
        }
        file
    }
}

/// Reads a distribution file from a path, or stdin for `"-"`.
pub fn read_input(path: &str) -> Result<ParsedInput, FormatError> {
    let text = if path == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        fs::read_to_string(path)?
    };
    let file: DistributionFile = serde_json::from_str(&text)?;
    file.parse()
}

/// Writes a distribution to a path, or stdout for `"-"`.
pub fn write_output(path: &str, input: &ParsedInput) -> Result<(), FormatError> {
    let file = DistributionFile::from_parsed(input);
    let mut text = serde_json::to_string(&file)?;
    text.push('\n');
    if path == "-" {
        io::stdout().write_all(text.as_bytes())?;
    } else {
        fs::write(path, text)?;
    }
    Ok(())
}
