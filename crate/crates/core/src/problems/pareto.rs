use crate::models::{CostVector, Orientation};

/// Indices of the non-dominated points, in input order. Of several identical
/// points only the first is kept.
///
/// A point can only be dominated by one with a strictly better coordinate
/// sum, so points are scanned in order of that sum and compared against the
/// front built so far.
pub fn pareto_indices(points: &[CostVector], orientation: Orientation) -> Vec<usize> {
    let sign = orientation.sign();
    let score = |i: usize| sign * points[i].values().iter().sum::<f64>();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| score(a).total_cmp(&score(b)).then(a.cmp(&b)));

    let mut front: Vec<usize> = Vec::new();
    for i in order {
        let p = &points[i];
        let covered = front
            .iter()
            .any(|&f| points[f] == *p || points[f].dominates(p, orientation));
        if !covered {
            front.push(i);
        }
    }
    front.sort_unstable();
    front
}

pub fn pareto_filter(points: &[CostVector], orientation: Orientation) -> Vec<CostVector> {
    pareto_indices(points, orientation)
        .into_iter()
        .map(|i| points[i].clone())
        .collect()
}
