use crate::error::{MilpError, Result};

/// Strictly ascending, positive cost levels.
#[derive(Debug, Clone, PartialEq)]
pub struct Thresholds {
    values: Vec<f64>,
}

impl Thresholds {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(MilpError::InvalidArgument(
                "at least one threshold is required".into(),
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(MilpError::InvalidArgument(
                "thresholds must be finite and positive".into(),
            ));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MilpError::InvalidArgument(
                "thresholds must be strictly ascending".into(),
            ));
        }
        Ok(Self { values })
    }

    /// All powers of two from 1 up to the first one at or above `upper`.
    pub fn powers_of_two_up_to(upper: f64) -> Result<Self> {
        if !(upper.is_finite() && upper > 0.0) {
            return Err(MilpError::InvalidArgument(format!(
                "invalid upper bound {upper}"
            )));
        }
        let mut values = vec![1.0];
        while *values.last().unwrap() < upper {
            values.push(values.last().unwrap() * 2.0);
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `θ_t - θ_{t-1}`, with the first weight equal to the first threshold.
    pub fn increments(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.values
            .iter()
            .map(|&v| {
                let d = v - prev;
                prev = v;
                d
            })
            .collect()
    }

    /// The same levels multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * factor).collect())
    }

    /// Drops levels below `floor`, keeping at least the largest one.
    pub fn at_least(&self, floor: f64) -> Self {
        let kept: Vec<f64> = self
            .values
            .iter()
            .copied()
            .filter(|&v| v >= floor)
            .collect();
        if kept.is_empty() {
            Self {
                values: vec![*self.values.last().unwrap()],
            }
        } else {
            Self { values: kept }
        }
    }
}

/// `count` consecutive powers of two ending at the first power strictly
/// above `reference_cost`.
pub fn derive_thresholds(reference_cost: f64, count: usize) -> Result<Thresholds> {
    if !(reference_cost.is_finite() && reference_cost > 0.0) {
        return Err(MilpError::InvalidArgument(format!(
            "reference cost must be positive, got {reference_cost}"
        )));
    }
    if count == 0 {
        return Err(MilpError::InvalidArgument(
            "threshold count must be at least 1".into(),
        ));
    }
    let mut k = reference_cost.log2().floor() as i32;
    while 2f64.powi(k) <= reference_cost {
        k += 1;
    }
    while k > i32::MIN + 1 && 2f64.powi(k - 1) > reference_cost {
        k -= 1;
    }
    Thresholds::new((0..count as i32).rev().map(|i| 2f64.powi(k - i)).collect())
}
