use crate::error::Result;
use crate::models::PreferenceModel;
use crate::problems::{Instance, Solution};

/// Gap between `returned` and the exact optimum of `hidden`, as a
/// percentage of the optimal value.
pub fn error_pct(
    returned: &Solution,
    instance: &Instance,
    hidden: &PreferenceModel,
) -> Result<f64> {
    let opt = instance.solve_exact_small(hidden)?;
    Ok(gap_pct(
        hidden.aggregate(returned.cost.values()),
        hidden.aggregate(opt.cost.values()),
    ))
}

/// `100 · |value − optimum| / |optimum|`.
pub fn gap_pct(value: f64, optimum: f64) -> f64 {
    if optimum == 0.0 {
        return if value == 0.0 { 0.0 } else { f64::INFINITY };
    }
    100.0 * (value - optimum).abs() / optimum.abs()
}
