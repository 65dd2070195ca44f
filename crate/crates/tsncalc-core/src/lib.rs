//! (build scaffold — full module docs restored as modules land)
pub mod curves;
pub use curves::{CappedRateLatency, ConcavePwl, ConvexPwl, RateLatency, TokenBucket};
