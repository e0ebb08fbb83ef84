//! Construction, relaxation and verification of planar geodesic nets.
//!
//! The numeric modules are generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the aliases below fix the scalar to `f64`, which is what [`io`] uses.

pub mod angles;
pub mod builder;
pub mod geom;
pub mod io;
pub mod net;
pub mod relax;
pub mod scalar;
pub mod verify;

pub type Point = geom::Point<f64>;
pub type UnitVector = geom::UnitVector<f64>;
pub type EmbeddedNet = net::EmbeddedNet<f64>;
pub type ImbalanceReport = net::ImbalanceReport<f64>;
pub type AngleSolution = angles::AngleSolution<f64>;
pub type ConstructionParams = builder::ConstructionParams<f64>;
pub type ConstructionResult = builder::ConstructionResult<f64>;
pub type RelaxConfig = relax::RelaxConfig<f64>;
pub type RelaxOutcome = relax::RelaxOutcome<f64>;
