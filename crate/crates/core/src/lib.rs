#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod base;
pub mod bundle;
mod cache;
pub mod config;
pub mod direct_image;
pub mod error;
pub mod finsler;
pub mod numerics;
pub mod projective;
pub mod report;
pub mod scalar;
pub mod table;
pub mod verifier;

pub use config::ScenarioConfig;
pub use error::{Error, Result};
pub use verifier::{Status, Theorem};

pub type BasePoint64 = base::BasePoint<f64>;
pub type BaseHermitianForm64 = base::BaseHermitianForm<f64>;
pub type LineBundleMetric64 = base::LineBundleMetric<f64>;
pub type HermitianMetric64 = bundle::HermitianMetric<f64>;
pub type ProjectivizedPotential64 = projective::ProjectivizedPotential<f64>;
pub type FinslerMetric64 = finsler::FinslerMetric<f64>;
pub type DirectImage64 = direct_image::DirectImage<f64>;
pub type Scenario64 = verifier::Scenario<f64>;
pub type ComplexHessianStencil64 = numerics::ComplexHessianStencil<f64>;
