//! Finite subset spaces `X(n)` of normed spaces under the Hausdorff metric:
//! metric primitives, relation-based quasigeodesics, Lipschitz and Hölder
//! retractions, and an empirical verification harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebyshev;
pub mod error;
pub mod flow;
pub mod fset;
pub mod harness;
pub mod hull;
mod linalg;
pub mod norm;
pub mod path;
pub mod relation;
pub mod retract;
pub mod selector;
pub mod two_center;

pub use error::{Error, Result};
pub use flow::{holder_bound, holder_retraction, integrate_to_collision, FlowConfig, FlowResult};
pub use fset::{diam, hausdorff, min_sep, proximal_bijection, FSet};
pub use two_center::{dist_to_x2, TwoCenterWitness};
pub use relation::{proximal_relation, Decomposition, Relation};
pub use path::{geodesic_in_larger, path_from_relation, path_length, quasigeodesic, spaced_pair, QuasiPath};
pub use retract::{r2, r3, rn2, NormalizedCentral, PartitionOfUnity};
pub use selector::{selector_retraction, steiner_point, SelectorConfig};
pub use norm::{norm, norming_functional, radial, semi_inner, NormSpec, Point, Side};
