use thiserror::Error;

use crate::syntax::TimeUnit;

/// A positive span of time in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Duration(u64);

impl Duration {
    pub fn seconds(self) -> u64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DurationError {
    #[error("deadline amount must be at least 1")]
    NotPositive,
    #[error("{amount} {} does not fit in 64 bits of seconds", .unit.keyword())]
    Overflow { amount: u64, unit: TimeUnit },
}

pub fn to_seconds(amount: u64, unit: TimeUnit) -> Result<Duration, DurationError> {
    if amount == 0 {
        return Err(DurationError::NotPositive);
    }
    amount
        .checked_mul(unit.factor())
        .map(Duration)
        .ok_or(DurationError::Overflow { amount, unit })
}
