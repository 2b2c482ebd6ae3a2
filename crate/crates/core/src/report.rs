//! JSON documents for classifications, campaigns and the small queries.
//!
//! Every document starts with `"schema": 1` and a `"kind"` tag. Field order
//! is fixed by the struct definitions and maps are sorted, so equal inputs
//! give byte-identical output. Matrices are written as digit strings with
//! `"; "` between rows, vectors as space-separated digits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::campaign::{CampaignReport, Census, Mode, Theorem};
use crate::classify::{ClassificationResult, Label};
use crate::format::{digits_line, matrix_line};
use crate::group::{EquivalenceWitness, WitnessRecord};
use crate::space::MatSpace;
use crate::vecspace::VecSpace;

pub const SCHEMA_VERSION: u32 = 1;

pub fn space_lines(v: &MatSpace) -> Vec<String> {
    v.basis().iter().map(matrix_line).collect()
}

pub fn vector_lines(v: &VecSpace) -> Vec<String> {
    v.basis().iter().map(|b| digits_line(b)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelDocument {
    pub label: String,
    /// Carried subspace of an image- or kernel-confined label.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub basis: Option<Vec<String>>,
    /// Maps the space onto the model, for model labels.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<WitnessRecord>,
}

impl LabelDocument {
    pub fn new(label: &Label) -> Self {
        let (basis, witness) = match label {
            Label::ImageConfined(s) | Label::KernelConfined(s) => (Some(vector_lines(s)), None),
            Label::PrimitiveCol(w) | Label::PrimitiveRow(w) | Label::ExceptionalJ3(w) => (None, Some(w.to_record())),
            Label::BelowThreshold | Label::Counterexample => (None, None),
        };
        LabelDocument {
            label: label.kind().name().to_string(),
            basis,
            witness,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationDocument {
    pub schema: u32,
    pub kind: String,
    pub field: u8,
    pub shape: [usize; 2],
    pub rank_bound: usize,
    pub dim: usize,
    pub space: Vec<String>,
    pub labels: Vec<LabelDocument>,
    pub counterexample: bool,
}

impl ClassificationDocument {
    pub fn new(v: &MatSpace, res: &ClassificationResult) -> Self {
        ClassificationDocument {
            schema: SCHEMA_VERSION,
            kind: "classification".into(),
            field: res.order.get(),
            shape: [res.rows, res.cols],
            rank_bound: res.rank_bound,
            dim: res.dim,
            space: space_lines(v),
            labels: res.labels.iter().map(LabelDocument::new).collect(),
            counterexample: res.is_counterexample(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDocument {
    pub representative: Vec<String>,
    pub size: u64,
    pub labels: Vec<String>,
}

fn class_documents(c: &Census) -> Vec<ClassDocument> {
    c.classes
        .iter()
        .map(|k| ClassDocument {
            representative: space_lines(&k.representative),
            size: k.size,
            labels: k.labels.iter().map(|l| l.name().to_string()).collect(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignDocument {
    pub schema: u32,
    pub kind: String,
    pub theorem: Theorem,
    pub n: usize,
    pub p: usize,
    pub r: usize,
    pub field: u8,
    pub target_dim: usize,
    pub mode: Mode,
    pub passed: bool,
    pub visited: u64,
    pub survivors: u64,
    pub label_census: BTreeMap<String, u64>,
    pub counters: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classes: Option<Vec<ClassDocument>>,
    pub violation_count: u64,
    /// Each violation is the basis of the offending space.
    pub violations: Vec<Vec<String>>,
    pub deterministic: bool,
    pub elapsed_ms: u64,
}

impl CampaignDocument {
    pub fn new(rep: &CampaignReport) -> Self {
        let s = &rep.spec;
        CampaignDocument {
            schema: SCHEMA_VERSION,
            kind: "campaign".into(),
            theorem: s.theorem,
            n: s.n,
            p: s.p,
            r: s.r,
            field: s.order.get(),
            target_dim: s.target_dim,
            mode: s.mode,
            passed: rep.passed(),
            visited: rep.visited,
            survivors: rep.survivors,
            label_census: rep.label_census.iter().map(|(k, v)| (k.name().to_string(), *v)).collect(),
            counters: rep.counters.clone(),
            classes: rep.census.as_ref().map(class_documents),
            violation_count: rep.violation_count,
            violations: rep.violations.iter().map(space_lines).collect(),
            deterministic: rep.deterministic,
            elapsed_ms: rep.elapsed_ms,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusDocument {
    pub schema: u32,
    pub kind: String,
    pub n: usize,
    pub p: usize,
    pub field: u8,
    pub dim: usize,
    pub r: usize,
    pub survivors: u64,
    pub class_count: usize,
    pub overlapping_classes: usize,
    pub classes: Vec<ClassDocument>,
}

impl CensusDocument {
    pub fn new(n: usize, p: usize, field: u8, dim: usize, r: usize, c: &Census) -> Self {
        CensusDocument {
            schema: SCHEMA_VERSION,
            kind: "census".into(),
            n,
            p,
            field,
            dim,
            r,
            survivors: c.survivors,
            class_count: c.classes.len(),
            overlapping_classes: c.overlapping_classes(),
            classes: class_documents(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivDocument {
    pub schema: u32,
    pub kind: String,
    pub equivalent: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<WitnessRecord>,
}

impl EquivDocument {
    pub fn new(witness: Option<&EquivalenceWitness>) -> Self {
        EquivDocument {
            schema: SCHEMA_VERSION,
            kind: "equiv".into(),
            equivalent: witness.is_some(),
            witness: witness.map(EquivalenceWitness::to_record),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankDocument {
    pub schema: u32,
    pub kind: String,
    pub rank: usize,
    /// Members of each rank, starting at rank 0.
    pub distribution: Vec<u64>,
}

impl RankDocument {
    pub fn new(rank: usize, distribution: Vec<u64>) -> Self {
        RankDocument {
            schema: SCHEMA_VERSION,
            kind: "rank".into(),
            rank,
            distribution,
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}
