//! Lévy increment sampling and Monte Carlo checks of small-time limits.

mod checks;
mod sampler;

pub use checks::{
    compensation_check, positive_part_growth, sim_table, small_time_drift_check, stable_limit_check,
    stable_limit_exponent, CompensationReport, DriftReport, GrowthReport, SimRow, StableLimitReport,
};
pub use sampler::{chunked, mean_stderr, pairwise_sum, sample_terminal, substream, EpsPolicy, IncrementSampler, CHUNK};
