//! Per-objective labels and value ranges shown next to each query.

use serde::{Deserialize, Serialize};

use riga_core::{CostVector, Instance, Orientation};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveContext {
    pub labels: Vec<String>,
    /// Smallest value objective `j` can take on this instance.
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub orientation: Orientation,
}

/// Sum of the `k` smallest and the `k` largest values.
fn extremes(mut values: Vec<i64>, k: usize) -> (f64, f64) {
    values.sort_unstable();
    let low: i64 = values.iter().take(k).sum();
    let high: i64 = values.iter().rev().take(k).sum();
    (low as f64, high as f64)
}

impl ObjectiveContext {
    pub fn of(instance: &Instance) -> Self {
        let n = instance.n();
        let (min, max): (Vec<f64>, Vec<f64>) = match instance {
            Instance::Knapsack(k) => (0..n)
                .map(|j| extremes(k.items.iter().map(|item| item[j]).collect(), k.capacity))
                .unzip(),
            Instance::Tsp(t) => t
                .layers
                .iter()
                .map(|layer| {
                    let edges = (0..layer.len())
                        .flat_map(|i| (i + 1..layer.len()).map(move |j| layer[i][j]))
                        .collect();
                    extremes(edges, layer.len())
                })
                .unzip(),
            Instance::Catalog(c) => (0..n)
                .map(|j| {
                    let column = c.alternatives.iter().map(|a| a.values()[j]);
                    (
                        column.clone().fold(f64::INFINITY, f64::min),
                        column.fold(f64::NEG_INFINITY, f64::max),
                    )
                })
                .unzip(),
        };
        ObjectiveContext {
            labels: (1..=n).map(|j| format!("f{j}")).collect(),
            min,
            max,
            orientation: instance.orientation(),
        }
    }

    /// Maps each objective onto [0, 1] by its range; flat objectives map to 0.
    pub fn normalize(&self, y: &CostVector) -> Vec<f64> {
        y.values()
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(v, (lo, hi))| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
            .collect()
    }
}
