//! Small instances with known optima.

use crate::model::ExchangeInstance;
use crate::rational::int;

/// Two participants who each hold what the other wants. Optimum 2.
pub fn inst_swap() -> ExchangeInstance {
    ExchangeInstance::empty(["1", "2"], ["a", "b"])
        .with_supply("1", "a", int(1))
        .with_supply("2", "b", int(1))
        .with_demand("1", "b", int(1))
        .with_demand("2", "a", int(1))
}

/// One participant offers, the other wants, nothing flows back. Optimum 0.
pub fn inst_dead() -> ExchangeInstance {
    ExchangeInstance::empty(["1", "2"], ["a"])
        .with_supply("1", "a", int(1))
        .with_demand("2", "a", int(1))
}

/// A swap with unequal unit values `c(a) = 2`, `c(b) = 1`. Optimum 4.
pub fn weighted_swap() -> ExchangeInstance {
    ExchangeInstance::empty(["1", "2"], ["a", "b"])
        .with_cost("a", int(2))
        .with_cost("b", int(1))
        .with_supply("1", "a", int(1))
        .with_supply("2", "b", int(2))
        .with_demand("1", "b", int(2))
        .with_demand("2", "a", int(1))
}

/// No supply and no demand at all.
pub fn inst_zero() -> ExchangeInstance {
    ExchangeInstance::empty(["1", "2"], ["a"])
}
