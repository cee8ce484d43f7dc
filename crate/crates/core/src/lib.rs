//! Rainbow-triangle-free families: detection, constructions, exhaustive
//! search and the structural certifier.

pub mod canon;
pub mod certifier;
pub mod constructions;
pub mod family;
pub mod mis;
pub mod rainbow;
pub mod rs;
pub mod search;
pub mod union_graph;

pub use family::{Edge, Member, MemberRef, Mode, Triangle, TriangleFamily, Vertex};
pub use rainbow::{find_rainbow, is_rainbow_free, RainbowCertificate};
pub use union_graph::UnionGraph;
