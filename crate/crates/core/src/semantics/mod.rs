//! Traces and their meaning: triggering, obligations, satisfaction and
//! raising of concerns and purposes.

mod eval;
mod time;
mod trace;

pub use eval::{
    activation, demand_failed, demand_fulfilled, demands, eval_cond, fulfilled, obligations, occurs_in,
    prefix_feasible, raises, satisfies, satisfies_all, trigger_holds, triggers, violates, Activation, Demand,
    Obligation, Satisfaction, Violation, Window,
};
pub use time::{to_seconds, Duration, DurationError};
pub use trace::{format_point, EventSet, MeasureValue, Trace, TraceError, TracePoint};
