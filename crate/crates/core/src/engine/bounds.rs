use serde::Serialize;

use crate::sema::Model;

/// Search limits for the bounded checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// Most points a trace may have.
    pub max_points: usize,
    /// Latest timestamp, in seconds.
    pub horizon: u64,
    /// Search nodes to visit before giving up.
    pub node_budget: u64,
}

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

impl Bounds {
    /// `2·|rules| + 2` points over `2·D + 1` seconds, where `D` is the
    /// longest window of any rule, concern or purpose.
    pub fn default_for(model: &Model) -> Bounds {
        Bounds {
            max_points: 2 * model.rules.len() + 2,
            horizon: 2 * model.max_deadline() + 1,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }

    /// Horizon for extensions of a situation.
    pub fn extension_horizon(&self, max_deadline: u64) -> u64 {
        self.horizon
            .saturating_add((max_deadline + 1).saturating_mul(self.max_points as u64))
    }
}
