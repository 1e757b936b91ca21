//! Choosing the fewest disks that isolate a set of points in the plane.
//!
//! A set of disks separates two points when every path between them meets a
//! disk, or equivalently when the points lie in different faces of the
//! complement of the union (a covered point is separated from everything).
//! This crate implements:
//!
//! * exact geometric ground truth: the union-of-disks boundary, complement
//!   face identification, and a separation verifier ([`arrangement`]);
//! * a constant-factor two-point separator built from a shortest disk
//!   sequence, a cutting path, and a shortest cycle of disk pieces
//!   ([`two_point`]);
//! * a recursive greedy separator for many points ([`recsep`]) together with
//!   the covering/separating split ([`cover`]);
//! * an exact minimum-separator oracle by subset enumeration and an
//!   independent grid flood-fill verifier ([`oracle`]);
//! * instance files, random instance generation, and SVG rendering
//!   ([`instance`], [`svg`]).

pub mod arrangement;
pub mod cover;
pub mod error;
pub mod geom;
pub mod graph;
pub mod instance;
pub mod oracle;
pub mod recsep;
pub mod svg;
pub mod two_point;

pub use error::{Error, Result};
pub use geom::{Containment, Disk, Point, TolerancePolicy};
pub use instance::Instance;
