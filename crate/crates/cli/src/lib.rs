//! Bundle format, verification pipeline and reports for the `dsc` tool.

pub mod bundle;
pub mod pipeline;
pub mod report;

pub use bundle::{parse_bundle, serialize_bundle, Bundle, ParseError};
pub use pipeline::{run_pipeline, ChannelSelection, Checks, PipelineOptions};
pub use report::{explain, summary, Report};
