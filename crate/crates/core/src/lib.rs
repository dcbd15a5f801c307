//! Offline tracking and identification of hockey players from per-frame
//! detections.
//!
//! The crate is organised as a pipeline:
//!
//! * [`core`]: domain types (boxes, detections, tracks, probability and
//!   roster vectors) and the on-disk formats shared by every stage.
//! * [`tracker`]: a SORT-style associator (constant-velocity Kalman filter,
//!   IoU cost, Hungarian assignment).
//! * [`ident`]: tracklet team voting, sliding-window jersey-number inference
//!   with visibility filtering, and roster-masked identification.
//! * [`metrics`]: CLEAR MOT matching, MOTA, IDF1, identity switches and the
//!   pan identity-switch estimator.
//! * [`sim`]: a synthetic rink generator with ground truth and oracle scorers.
//! * [`cli`]: the `rinktrack` command line driver.
//!
//! Learned models are represented by the scorer traits in [`ident::scorer`],
//! so every stage can be driven by files or by the simulator.

pub mod cli;
pub mod core;
pub mod error;
pub mod ident;
pub mod metrics;
pub mod sim;
pub mod tracker;

pub use crate::error::{Error, Result};
