//! Benchmark problems: input law, performance, and the push-out and chart representations the
//! estimators need.

mod benchmarks;
mod model;
mod option;
mod queue;

pub use benchmarks::{model_log_inventory, model_max_threshold, model_push_out, model_san, san_bridge};
pub use model::{distribution_id, IndicatorForm, MapFn, Model, PerformanceFn, PushOut, SmoothFactor};
pub use option::{gbm_step, gbm_step_inverse, model_american_option, AmericanOption, AmericanOptionParams, Branch};
pub use queue::{model_gg1, GG1Params, GG1Queue, Interarrival, QueueDraw, QueueStatistic, ServiceLaw};
