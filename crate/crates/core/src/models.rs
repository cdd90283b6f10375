//! Cost vectors and the three aggregation families (weighted sum, OWA and
//! 2-additive Choquet integral), together with the capacity / Möbius
//! correspondence used to validate Choquet models.
//!
//! Every aggregator here is linear in its parameters for a fixed cost
//! vector. [`featurize`] makes that explicit: `f_ω(y) = ω · φ(y)`, which is
//! what the regret engine relies on to turn preference statements into
//! linear constraints.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance used for normalization and feasibility checks.
pub const TOL: f64 = 1e-9;

/// Largest objective count accepted by the dense capacity table.
pub const MAX_DENSE_OBJECTIVES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("a cost vector needs at least two objectives, got {0}")]
    TooFewObjectives(usize),
    #[error("non-finite cost value at index {0}")]
    NonFinite(usize),
    #[error("parameters must sum to 1, got {0}")]
    NotNormalized(f64),
    #[error("weight {index} = {value} is outside [0, 1]")]
    WeightOutOfRange { index: usize, value: f64 },
    #[error("weights are not {monotone:?} at position {index}")]
    NotMonotone { monotone: Monotone, index: usize },
    #[error("capacity must satisfy v(∅) = 0 and v(N) = 1")]
    CapacityNotNormalized,
    #[error("capacity is not monotone: v({subset:?}) = {subset_value} > v({superset:?}) = {superset_value}")]
    CapacityNotMonotone {
        subset: Vec<usize>,
        superset: Vec<usize>,
        subset_value: f64,
        superset_value: f64,
    },
    #[error("capacity table has {got} entries, expected {expected}")]
    TableSize { expected: usize, got: usize },
    #[error("dense capacity tables support at most {MAX_DENSE_OBJECTIVES} objectives, got {0}")]
    TooManyObjectives(usize),
    #[error("Möbius masses violate 2-additive monotonicity for objective {0}")]
    MobiusNotMonotone(usize),
    #[error("{family} models cannot use {params} parameters")]
    FamilyMismatch {
        family: Family,
        params: &'static str,
    },
    #[error("unknown {what}: {value}")]
    Unknown { what: &'static str, value: String },
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// The evaluation of a feasible solution in objective space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CostVectorRepr", into = "CostVectorRepr")]
pub struct CostVector {
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CostVectorRepr {
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
}

impl TryFrom<CostVectorRepr> for CostVector {
    type Error = ModelError;

    fn try_from(repr: CostVectorRepr) -> Result<Self> {
        if let Some(n) = repr.n {
            if n != repr.values.len() {
                return Err(ModelError::DimensionMismatch {
                    expected: n,
                    got: repr.values.len(),
                });
            }
        }
        CostVector::new(repr.values)
    }
}

impl From<CostVector> for CostVectorRepr {
    fn from(cv: CostVector) -> Self {
        let n = Some(cv.values.len());
        CostVectorRepr {
            values: cv.values,
            n,
        }
    }
}

impl CostVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(ModelError::TooFewObjectives(values.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite(i));
        }
        Ok(CostVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Values in ascending order; ties keep their original index order.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    pub fn euclidean_distance(&self, other: &CostVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Pareto dominance: at least as good everywhere and strictly better
    /// somewhere, with "better" taken from `orientation`.
    pub fn dominates(&self, other: &CostVector, orientation: Orientation) -> bool {
        let mut strict = false;
        for (&a, &b) in self.values.iter().zip(&other.values) {
            match orientation.compare(a, b) {
                Ordering::Greater => return false,
                Ordering::Less => strict = true,
                Ordering::Equal => {}
            }
        }
        strict
    }

    /// Bitwise key, for hashing cost vectors as exact identities.
    pub fn key(&self) -> Vec<u64> {
        self.values.iter().map(|v| v.to_bits()).collect()
    }
}

impl TryFrom<Vec<f64>> for CostVector {
    type Error = ModelError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        CostVector::new(values)
    }
}

impl fmt::Display for CostVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Whether smaller or larger aggregated values are preferred.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Minimize,
    Maximize,
}

impl Orientation {
    /// +1 for minimization, -1 for maximization. Multiplying an aggregated
    /// value by the sign turns it into a loss to be minimized.
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Minimize => 1.0,
            Orientation::Maximize => -1.0,
        }
    }

    /// Weight ordering that favours balanced solutions under this sense.
    pub fn balanced_monotone(self) -> Monotone {
        match self {
            Orientation::Minimize => Monotone::NonDecreasing,
            Orientation::Maximize => Monotone::NonIncreasing,
        }
    }

    /// `Less` when `a` is strictly better than `b`.
    pub fn compare(self, a: f64, b: f64) -> Ordering {
        match self {
            Orientation::Minimize => a.total_cmp(&b),
            Orientation::Maximize => b.total_cmp(&a),
        }
    }

    /// True when `a` is at least as good as `b`.
    pub fn prefers(self, a: f64, b: f64) -> bool {
        self.compare(a, b) != Ordering::Greater
    }
}

impl FromStr for Orientation {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min" | "minimize" => Ok(Orientation::Minimize),
            "max" | "maximize" => Ok(Orientation::Maximize),
            _ => Err(ModelError::Unknown {
                what: "orientation",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Monotone {
    None,
    NonDecreasing,
    NonIncreasing,
}

/// Aggregation family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    WS,
    OWA,
    Choquet2,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::WS, Family::OWA, Family::Choquet2];

    /// Number of parameter coordinates for `n` objectives.
    pub fn param_dim(self, n: usize) -> usize {
        match self {
            Family::WS | Family::OWA => n,
            Family::Choquet2 => n + n * (n - 1) / 2,
        }
    }

    /// Ordering constraint on the weights under `orientation`.
    pub fn monotone(self, orientation: Orientation) -> Monotone {
        match self {
            Family::OWA => orientation.balanced_monotone(),
            Family::WS | Family::Choquet2 => Monotone::None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Family::WS => "WS",
            Family::OWA => "OWA",
            Family::Choquet2 => "Choquet2",
        })
    }
}

impl FromStr for Family {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ws" | "weighted-sum" | "weighted_sum" => Ok(Family::WS),
            "owa" => Ok(Family::OWA),
            "choquet2" | "choquet" => Ok(Family::Choquet2),
            _ => Err(ModelError::Unknown {
                what: "family",
                value: s.to_string(),
            }),
        }
    }
}

/// Normalized weighting vector, shared by weighted sums (`monotone = None`)
/// and OWA operators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OwaWeightsRepr")]
pub struct OwaWeights {
    w: Vec<f64>,
    monotone: Monotone,
}

#[derive(Deserialize)]
struct OwaWeightsRepr {
    w: Vec<f64>,
    monotone: Monotone,
}

impl TryFrom<OwaWeightsRepr> for OwaWeights {
    type Error = ModelError;

    fn try_from(r: OwaWeightsRepr) -> Result<Self> {
        OwaWeights::new(r.w, r.monotone)
    }
}

impl OwaWeights {
    pub fn new(w: Vec<f64>, monotone: Monotone) -> Result<Self> {
        check_simplex(&w)?;
        let ordered = |a: f64, b: f64| match monotone {
            Monotone::None => true,
            Monotone::NonDecreasing => a <= b + TOL,
            Monotone::NonIncreasing => a + TOL >= b,
        };
        if let Some(index) = w.windows(2).position(|p| !ordered(p[0], p[1])) {
            return Err(ModelError::NotMonotone { monotone, index });
        }
        Ok(OwaWeights { w, monotone })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn monotone(&self) -> Monotone {
        self.monotone
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

fn check_simplex(w: &[f64]) -> Result<()> {
    for (index, &value) in w.iter().enumerate() {
        if !value.is_finite() || !(-TOL..=1.0 + TOL).contains(&value) {
            return Err(ModelError::WeightOutOfRange { index, value });
        }
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > TOL {
        return Err(ModelError::NotNormalized(sum));
    }
    Ok(())
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(ModelError::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Weighted sum `Σ w_j y_j`.
pub fn eval_ws(w: &OwaWeights, y: &CostVector) -> Result<f64> {
    check_dim(w.len(), y.n())?;
    Ok(dot(w.weights(), y.values()))
}

/// OWA value `Σ w_j y_(j)` with `y_(1) ≤ … ≤ y_(n)`.
pub fn eval_owa(w: &OwaWeights, y: &CostVector) -> Result<f64> {
    check_dim(w.len(), y.n())?;
    Ok(dot(w.weights(), &y.sorted()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A normalized, monotone set function on the subsets of `{0, …, n-1}`,
/// stored densely and indexed by bitmask.
#[derive(Clone, Debug, PartialEq)]
pub struct Capacity {
    n: usize,
    v: Vec<f64>,
}

impl Capacity {
    pub fn new(n: usize, table: Vec<f64>) -> Result<Self> {
        if n > MAX_DENSE_OBJECTIVES {
            return Err(ModelError::TooManyObjectives(n));
        }
        check_dim(1 << n, table.len()).map_err(|_| ModelError::TableSize {
            expected: 1 << n,
            got: table.len(),
        })?;
        let full = (1usize << n) - 1;
        if table[0].abs() > TOL || (table[full] - 1.0).abs() > TOL {
            return Err(ModelError::CapacityNotNormalized);
        }
        for mask in 0..=full {
            for j in 0..n {
                let bit = 1 << j;
                if mask & bit == 0 && table[mask] > table[mask | bit] + TOL {
                    return Err(ModelError::CapacityNotMonotone {
                        subset: members(mask, n),
                        superset: members(mask | bit, n),
                        subset_value: table[mask],
                        superset_value: table[mask | bit],
                    });
                }
            }
        }
        Ok(Capacity { n, v: table })
    }

    /// Additive capacity `v(A) = Σ_{j∈A} w_j`.
    pub fn additive(weights: &[f64]) -> Result<Self> {
        let n = weights.len();
        if n > MAX_DENSE_OBJECTIVES {
            return Err(ModelError::TooManyObjectives(n));
        }
        let table = (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .filter(|j| mask & (1 << j) != 0)
                    .map(|j| weights[j])
                    .sum()
            })
            .collect();
        Capacity::new(n, table)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, mask: usize) -> f64 {
        self.v[mask]
    }

    pub fn table(&self) -> &[f64] {
        &self.v
    }

    /// `v(A ∪ B) + v(A ∩ B) ≤ v(A) + v(B)` for all A, B.
    pub fn is_submodular(&self) -> bool {
        let size = 1usize << self.n;
        (0..size).all(|a| {
            (0..size).all(|b| self.v[a | b] + self.v[a & b] <= self.v[a] + self.v[b] + TOL)
        })
    }
}

/// 1-based objective indices of a bitmask, for error messages.
fn members(mask: usize, n: usize) -> Vec<usize> {
    (0..n)
        .filter(|j| mask & (1 << j) != 0)
        .map(|j| j + 1)
        .collect()
}

/// Choquet integral with respect to a dense capacity.
pub fn eval_choquet_capacity(cap: &Capacity, y: &CostVector) -> Result<f64> {
    check_dim(cap.n(), y.n())?;
    let order = ascending_order(y.values());
    // X_(j) shrinks as j grows: start from the full set and drop indices.
    let mut remaining = (1usize << cap.n()) - 1;
    let mut previous = 0.0;
    let mut total = 0.0;
    for &idx in &order {
        let value = y.values()[idx];
        total += (value - previous) * cap.value(remaining);
        previous = value;
        remaining &= !(1 << idx);
    }
    Ok(total)
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    order
}

/// Full Möbius inverse of a set function, indexed by bitmask.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusMap {
    n: usize,
    m: Vec<f64>,
}

impl MobiusMap {
    pub fn new(n: usize, masses: Vec<f64>) -> Result<Self> {
        if n > MAX_DENSE_OBJECTIVES {
            return Err(ModelError::TooManyObjectives(n));
        }
        if masses.len() != 1 << n {
            return Err(ModelError::TableSize {
                expected: 1 << n,
                got: masses.len(),
            });
        }
        Ok(MobiusMap { n, m: masses })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mass(&self, mask: usize) -> f64 {
        self.m[mask]
    }

    pub fn masses(&self) -> &[f64] {
        &self.m
    }
}

pub fn mobius_from_capacity(cap: &Capacity) -> MobiusMap {
    let n = cap.n();
    let mut m = cap.table().to_vec();
    for j in 0..n {
        let bit = 1 << j;
        for mask in 0..m.len() {
            if mask & bit != 0 {
                m[mask] -= m[mask ^ bit];
            }
        }
    }
    MobiusMap { n, m }
}

/// Rebuilds `v(A) = Σ_{B⊆A} m(B)` and validates it as a capacity.
pub fn capacity_from_mobius(m: &MobiusMap) -> Result<Capacity> {
    let mut v = m.masses().to_vec();
    for j in 0..m.n() {
        let bit = 1 << j;
        for mask in 0..v.len() {
            if mask & bit != 0 {
                v[mask] += v[mask ^ bit];
            }
        }
    }
    Capacity::new(m.n(), v)
}

/// Möbius masses of a 2-additive capacity: one per objective, one per pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MobiusMasses2Repr")]
pub struct MobiusMasses2 {
    singles: Vec<f64>,
    pairs: Vec<f64>,
}

#[derive(Deserialize)]
struct MobiusMasses2Repr {
    singles: Vec<f64>,
    pairs: Vec<f64>,
}

impl TryFrom<MobiusMasses2Repr> for MobiusMasses2 {
    type Error = ModelError;

    fn try_from(r: MobiusMasses2Repr) -> Result<Self> {
        MobiusMasses2::new(r.singles, r.pairs)
    }
}

/// Position of pair `{i, j}` (`i < j`) in lexicographic pair order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl MobiusMasses2 {
    pub fn new(singles: Vec<f64>, pairs: Vec<f64>) -> Result<Self> {
        let n = singles.len();
        check_dim(n * n.saturating_sub(1) / 2, pairs.len())?;
        if singles.iter().chain(&pairs).any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite(0));
        }
        let sum: f64 = singles.iter().chain(&pairs).sum();
        if (sum - 1.0).abs() > TOL {
            return Err(ModelError::NotNormalized(sum));
        }
        // The binding subset A for objective j collects every negative
        // interaction involving j.
        for j in 0..n {
            let worst: f64 = (0..n)
                .filter(|&i| i != j)
                .map(|i| pairs[pair_index(n, i.min(j), i.max(j))].min(0.0))
                .sum();
            if singles[j] + worst < -TOL {
                return Err(ModelError::MobiusNotMonotone(j + 1));
            }
        }
        Ok(MobiusMasses2 { singles, pairs })
    }

    /// Builds masses from the flat coordinate order (singles, then pairs).
    pub fn from_coords(n: usize, coords: &[f64]) -> Result<Self> {
        check_dim(Family::Choquet2.param_dim(n), coords.len())?;
        MobiusMasses2::new(coords[..n].to_vec(), coords[n..].to_vec())
    }

    pub fn n(&self) -> usize {
        self.singles.len()
    }

    pub fn singles(&self) -> &[f64] {
        &self.singles
    }

    pub fn pairs(&self) -> &[f64] {
        &self.pairs
    }

    pub fn pair(&self, i: usize, j: usize) -> f64 {
        self.pairs[pair_index(self.n(), i.min(j), i.max(j))]
    }

    pub fn coords(&self) -> Vec<f64> {
        self.singles.iter().chain(&self.pairs).copied().collect()
    }

    pub fn to_mobius_map(&self) -> Result<MobiusMap> {
        let n = self.n();
        let mut m = vec![0.0; 1 << n];
        for j in 0..n {
            m[1 << j] = self.singles[j];
        }
        for i in 0..n {
            for j in i + 1..n {
                m[(1 << i) | (1 << j)] = self.pair(i, j);
            }
        }
        MobiusMap::new(n, m)
    }
}

/// `Σ_j m({j}) y_j + Σ_{i<j} m({i,j}) min(y_i, y_j)`.
pub fn eval_choquet_mobius(m: &MobiusMasses2, y: &CostVector) -> Result<f64> {
    check_dim(m.n(), y.n())?;
    Ok(dot(&m.coords(), &featurize(Family::Choquet2, y).0))
}

/// The feature map `φ` with `f_ω(y) = ω · φ(y)` for every family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn dot(&self, omega: &[f64]) -> f64 {
        dot(&self.0, omega)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

pub fn featurize(family: Family, y: &CostVector) -> FeatureVector {
    FeatureVector(features(family, y.values()))
}

pub(crate) fn features(family: Family, y: &[f64]) -> Vec<f64> {
    match family {
        Family::WS => y.to_vec(),
        Family::OWA => {
            let mut v = y.to_vec();
            v.sort_by(|a, b| a.total_cmp(b));
            v
        }
        Family::Choquet2 => {
            let n = y.len();
            let mut phi = Vec::with_capacity(Family::Choquet2.param_dim(n));
            phi.extend_from_slice(y);
            for i in 0..n {
                for j in i + 1..n {
                    phi.push(y[i].min(y[j]));
                }
            }
            phi
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelParams {
    Weights(OwaWeights),
    Mobius(MobiusMasses2),
}

/// A fully specified aggregation function `f_ω`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PreferenceModelRepr")]
pub struct PreferenceModel {
    family: Family,
    params: ModelParams,
    orientation: Orientation,
    #[serde(skip)]
    coords: Vec<f64>,
}

#[derive(Deserialize)]
struct PreferenceModelRepr {
    family: Family,
    params: ModelParams,
    orientation: Orientation,
}

impl TryFrom<PreferenceModelRepr> for PreferenceModel {
    type Error = ModelError;

    fn try_from(r: PreferenceModelRepr) -> Result<Self> {
        PreferenceModel::new(r.family, r.params, r.orientation)
    }
}

impl PreferenceModel {
    pub fn new(family: Family, params: ModelParams, orientation: Orientation) -> Result<Self> {
        let coords = match (&params, family) {
            (ModelParams::Weights(w), Family::WS | Family::OWA) => w.weights().to_vec(),
            (ModelParams::Mobius(m), Family::Choquet2) => m.coords(),
            (ModelParams::Weights(_), _) => {
                return Err(ModelError::FamilyMismatch {
                    family,
                    params: "weight",
                })
            }
            (ModelParams::Mobius(_), _) => {
                return Err(ModelError::FamilyMismatch {
                    family,
                    params: "Möbius",
                })
            }
        };
        Ok(PreferenceModel {
            family,
            params,
            orientation,
            coords,
        })
    }

    /// Builds a model from a parameter point in the family's coordinate
    /// order. OWA weights must follow the ordering `orientation` implies.
    pub fn from_coords(
        family: Family,
        n: usize,
        orientation: Orientation,
        coords: &[f64],
    ) -> Result<Self> {
        check_dim(family.param_dim(n), coords.len())?;
        let params = match family {
            Family::WS | Family::OWA => ModelParams::Weights(OwaWeights::new(
                coords.to_vec(),
                family.monotone(orientation),
            )?),
            Family::Choquet2 => ModelParams::Mobius(MobiusMasses2::from_coords(n, coords)?),
        };
        PreferenceModel::new(family, params, orientation)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn n(&self) -> usize {
        match &self.params {
            ModelParams::Weights(w) => w.len(),
            ModelParams::Mobius(m) => m.n(),
        }
    }

    pub fn evaluate(&self, y: &CostVector) -> Result<f64> {
        check_dim(self.n(), y.n())?;
        Ok(self.aggregate(y.values()))
    }

    /// Unchecked evaluation on a raw slice of length `n`.
    pub fn aggregate(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.n());
        match self.family {
            Family::WS => dot(&self.coords, y),
            Family::OWA => {
                let mut s = y.to_vec();
                s.sort_by(|a, b| a.total_cmp(b));
                dot(&self.coords, &s)
            }
            Family::Choquet2 => {
                let n = y.len();
                let mut total = dot(&self.coords[..n], y);
                let mut k = n;
                for i in 0..n {
                    for j in i + 1..n {
                        total += self.coords[k] * y[i].min(y[j]);
                        k += 1;
                    }
                }
                total
            }
        }
    }

    /// Aggregated value turned into a loss (smaller is better).
    pub fn loss(&self, y: &[f64]) -> f64 {
        self.orientation.sign() * self.aggregate(y)
    }

    /// True when `a` is at least as good as `b` under this model.
    pub fn prefers(&self, a: &[f64], b: &[f64]) -> bool {
        self.loss(a) <= self.loss(b)
    }
}

/// Uniform draw from the `(dim-1)`-simplex by normalized exponential
/// spacings. With a monotone ordering the coordinates are sorted, which is
/// uniform over the corresponding ordered sub-simplex.
pub fn sample_simplex<R: Rng + ?Sized>(dim: usize, rng: &mut R, monotone: Monotone) -> Vec<f64> {
    assert!(dim >= 2, "simplex dimension must be at least 2");
    let mut x: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = x.iter().sum();
    for v in &mut x {
        *v /= total;
    }
    match monotone {
        Monotone::None => {}
        Monotone::NonDecreasing => x.sort_by(|a, b| a.total_cmp(b)),
        Monotone::NonIncreasing => x.sort_by(|a, b| b.total_cmp(a)),
    }
    x
}
