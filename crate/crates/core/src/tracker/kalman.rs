//! Constant-velocity Kalman filter over `[cx, cy, area, aspect, vcx, vcy, varea]`.

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::core::BoundingBox;

pub type StateVector = SVector<f64, 7>;
pub type StateCovariance = SMatrix<f64, 7, 7>;
type Measurement = SVector<f64, 4>;
type MeasurementMatrix = SMatrix<f64, 4, 7>;

/// Diagonal noise settings. Defaults follow the usual SORT values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KalmanNoise {
    pub process: [f64; 7],
    pub measurement: [f64; 4],
    pub initial_covariance: [f64; 7],
}

impl Default for KalmanNoise {
    fn default() -> Self {
        Self {
            process: [1.0, 1.0, 1.0, 1.0, 0.01, 0.01, 1e-4],
            measurement: [1.0, 1.0, 10.0, 10.0],
            initial_covariance: [10.0, 10.0, 10.0, 10.0, 1e4, 1e4, 1e4],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanTrackState {
    pub mean: StateVector,
    pub covariance: StateCovariance,
}

fn transition() -> StateCovariance {
    let mut f = StateCovariance::identity();
    f[(0, 4)] = 1.0;
    f[(1, 5)] = 1.0;
    f[(2, 6)] = 1.0;
    f
}

fn observation() -> MeasurementMatrix {
    let mut h = MeasurementMatrix::zeros();
    for i in 0..4 {
        h[(i, i)] = 1.0;
    }
    h
}

fn measure(b: &BoundingBox) -> Measurement {
    let (cx, cy) = b.center();
    Measurement::new(cx, cy, b.w * b.h, b.w / b.h)
}

impl KalmanTrackState {
    /// Starts a track at `bbox` with zero velocity.
    pub fn initiate(bbox: &BoundingBox, noise: &KalmanNoise) -> Self {
        let z = measure(bbox);
        let mut mean = StateVector::zeros();
        mean.fixed_rows_mut::<4>(0).copy_from(&z);
        Self {
            mean,
            covariance: StateCovariance::from_diagonal(&StateVector::from(noise.initial_covariance)),
        }
    }

    /// One frame of constant-velocity motion.
    pub fn predict(&self, noise: &KalmanNoise) -> Self {
        let mut mean = self.mean;
        if mean[2] + mean[6] <= 0.0 {
            mean[6] = 0.0;
        }
        let f = transition();
        let mut mean = f * mean;
        mean[2] = mean[2].max(1.0);
        let q = StateCovariance::from_diagonal(&StateVector::from(noise.process));
        let covariance = symmetrize(f * self.covariance * f.transpose() + q);
        Self { mean, covariance }
    }

    /// Corrects the state with an observed box.
    pub fn update(&self, bbox: &BoundingBox, noise: &KalmanNoise) -> Self {
        let h = observation();
        let r = SMatrix::<f64, 4, 4>::from_diagonal(&Measurement::from(noise.measurement));
        let innovation = measure(bbox) - h * self.mean;
        let s = h * self.covariance * h.transpose() + r;
        let Some(s_inv) = s.try_inverse() else {
            return *self;
        };
        let gain = self.covariance * h.transpose() * s_inv;
        let mean = self.mean + gain * innovation;
        let covariance = symmetrize((StateCovariance::identity() - gain * h) * self.covariance);
        Self { mean, covariance }
    }

    /// Box implied by the current mean.
    pub fn bbox(&self) -> BoundingBox {
        let area = self.mean[2].max(1.0);
        let aspect = self.mean[3].max(1e-6);
        let w = (area * aspect).sqrt();
        let h = area / w;
        BoundingBox {
            x: self.mean[0] - w / 2.0,
            y: self.mean[1] - h / 2.0,
            w,
            h,
        }
    }
}

fn symmetrize(m: StateCovariance) -> StateCovariance {
    (m + m.transpose()) * 0.5
}
