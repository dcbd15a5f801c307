use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum allowed deviation of a probability vector's sum from one.
pub const SUM_TOLERANCE: f64 = 1e-6;

/// Discrete distribution over jersey classes (null last).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbVector {
    values: Vec<f64>,
}

impl ProbVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("probability vector"));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Validation(format!("probability {v} outside [0, 1]")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::Validation(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(Self { values })
    }

    /// Normalises non-negative weights into a distribution.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Validation("weights must be finite and non-negative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::Validation("weights sum to zero".into()));
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn one_hot(len: usize, class: usize) -> Self {
        assert!(class < len, "class {class} out of range for {len} classes");
        let mut values = vec![0.0; len];
        values[class] = 1.0;
        Self { values }
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

    pub fn get(&self, class: usize) -> f64 {
        self.values[class]
    }

    /// Score of the last (null) class.
    pub fn null_prob(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn null_index(&self) -> usize {
        self.values.len() - 1
    }

    /// Index of the largest value; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        argmax_where(&self.values, |_| true).expect("non-empty")
    }

    /// Elementwise mean of equally sized vectors.
    pub fn mean<'a, I>(vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a ProbVector>,
    {
        let mut iter = vectors.into_iter();
        let first = iter.next().ok_or(Error::Empty("probability vectors to average"))?;
        let mut acc = first.values.clone();
        let mut count = 1usize;
        for v in iter {
            if v.len() != acc.len() {
                return Err(Error::Dimension {
                    expected: acc.len(),
                    actual: v.len(),
                });
            }
            for (a, x) in acc.iter_mut().zip(&v.values) {
                *a += x;
            }
            count += 1;
        }
        let n = count as f64;
        Ok(Self {
            values: acc.into_iter().map(|a| (a / n).clamp(0.0, 1.0)).collect(),
        })
    }
}

impl<'de> Deserialize<'de> for ProbVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(d)?;
        ProbVector::new(values).map_err(serde::de::Error::custom)
    }
}

/// Index of the largest value among indices accepted by `keep`, lowest index
/// on ties.
pub(crate) fn argmax_where(values: &[f64], keep: impl Fn(usize) -> bool) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if !keep(i) {
            continue;
        }
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}
