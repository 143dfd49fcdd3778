//! Bundled reference networks.

/// Zachary's karate club (34 members, 78 ties), weighted by the number of
/// contexts in which each pair interacted. Labels are the members' 1-based
/// numbers; the vertex declaration pins id `i` to label `i + 1`.
pub const KARATE: &str = include_str!("../fixtures/karate.edges");

/// A lone triangle.
pub const K3: &str = include_str!("../fixtures/k3.edges");
