use serde::{Deserialize, Serialize};

use crate::dm::Answer;
use crate::models::{CostVector, Family};
use crate::problems::Solution;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub generation: usize,
    pub a: CostVector,
    pub b: CostVector,
    pub answer: Answer,
    /// MMR of the set when the query was chosen.
    pub mmr_before: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub population: Vec<CostVector>,
    /// Parameter points behind the population, when it has them.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub omegas: Vec<Vec<f64>>,
    pub queries: usize,
    pub mmr_before: f64,
    pub mmr_after: f64,
    pub best: Option<CostVector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub method: String,
    pub family: Family,
    pub generations: Vec<GenerationRecord>,
    pub queries: Vec<QueryRecord>,
    pub recommendation: Option<Solution>,
    pub total_queries: usize,
    pub wall_time_s: f64,
    /// A statement was rejected because it contradicted earlier answers.
    pub inconsistent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejected_query: Option<QueryRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Size of the candidate pool, for methods that elicit over a fixed set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_size: Option<usize>,
}

impl RunTrace {
    pub fn new(method: impl Into<String>, family: Family) -> Self {
        RunTrace {
            method: method.into(),
            family,
            generations: Vec::new(),
            queries: Vec::new(),
            recommendation: None,
            total_queries: 0,
            wall_time_s: 0.0,
            inconsistent: false,
            rejected_query: None,
            warnings: Vec::new(),
            pool_size: None,
        }
    }

    /// The recorded answers, in order.
    pub fn answers(&self) -> Vec<Answer> {
        self.queries.iter().map(|q| q.answer).collect()
    }

    /// Copy with the timing zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        RunTrace {
            wall_time_s: 0.0,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}
