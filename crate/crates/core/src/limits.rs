//! Resource limits shared by the enumerative algorithms.

use std::env;

/// Size limits for enumerations. Defaults may be overridden through the
/// `WILLS_MAX_GROUND` and `WILLS_MAX_POSET_NODES` environment variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest ground set for flat enumeration and rank tables.
    pub max_ground: usize,
    /// Largest intersection poset.
    pub max_poset_nodes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_ground: 20,
            max_poset_nodes: 50_000,
        }
    }
}

impl Limits {
    pub fn from_env() -> Self {
        let mut l = Limits::default();
        if let Some(v) = env::var("WILLS_MAX_GROUND")
            .ok()
            .and_then(|s| s.parse().ok())
        {
            l.max_ground = v;
        }
        if let Some(v) = env::var("WILLS_MAX_POSET_NODES")
            .ok()
            .and_then(|s| s.parse().ok())
        {
            l.max_poset_nodes = v;
        }
        l
    }
}
