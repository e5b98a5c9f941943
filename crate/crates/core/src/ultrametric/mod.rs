//! Word spaces and finite spaces: balls, points, distances, clopen sets and
//! partitions.

mod ball;
mod clopen;
mod point;
mod space;

pub use ball::{Ball, BallRelation};
pub(crate) use clopen::check_disjoint;
pub use clopen::{ClopenSet, Partition};
pub use point::{LogDistance, Point};
pub use space::{Hierarchy, Space, MAX_BRANCHING};
