//! Code craft for planar bivariate-bicycle codes.
//!
//! Builds planar BB codes from template stabilizers, deforms them into codes
//! that measure chosen logical Pauli operators (stretch, Z cut, X cut),
//! optimizes the storage of the surviving logicals by painting, chooses
//! logical bases suited to two-block measurements, and computes exact or
//! randomized code distances.

pub mod basis;
pub mod bb;
pub mod craft;
pub mod css;
pub mod distance;
pub mod error;
pub mod gf2;
pub mod paint;
pub mod pipeline;
pub mod schedule;
pub mod svg;

pub use bb::{build_planar_bb, Edge, Geometry, Layout, Offset, PlanarBBSpec, Point, Rect, Side, Site, TemplateSpec};
pub use css::{CssCode, LogicalBasis};
pub use distance::{css_distance, dressed_distance, min_weight, DistanceReport, SearchConfig};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector, RowEchelon};
pub use basis::{optimize_basis, BasisReport};
pub use craft::{measure_joint, measure_single, DeformedCode, Measurement, Orientation, Pauli};
pub use paint::{constrained_kernel_basis, measurement_distance, paint, PaintConfig, Storage, StorageSet};
pub use schedule::{plan, verify, LogicalId, Network, PlanRequest, Schedule};
pub use svg::render_svg;
pub use pipeline::{paint_measurement, PaintReport, Session, Shape, Target};
