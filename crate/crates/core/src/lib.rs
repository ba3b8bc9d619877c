//! Fixed points and best proximity points of 2-cyclic, possibly multivalued,
//! contractive maps between two closed sets of Euclidean space.
//!
//! The crate is organized bottom-up:
//!
//! * [`metric`]: point, point-to-set, set-to-set and Hausdorff distances on
//!   finite point clouds;
//! * [`params`]: the contraction constants, their admissible regions, the
//!   derived rate constants and the bound `M`;
//! * [`mapping`]: instances and the cyclic map `T`;
//! * [`certifier`]: checks of the contractive condition over pair samples;
//! * [`iterator`]: orbit generation, geometric bound ledgers and limit detection;
//! * [`gallery`]: instance families with known answers;
//! * [`io`]: trace and outcome file formats.

pub mod certifier;
pub mod error;
pub mod gallery;
pub mod io;
pub mod iterator;
pub mod mapping;
pub mod metric;
pub mod params;

pub use error::{Error, Result};
pub use mapping::{image, validate_cyclic, Instance, Side, SidedPoint};
pub use metric::{Point, PointSet};
pub use params::{ContractionParams, DerivedConstants, RegionLabel};
