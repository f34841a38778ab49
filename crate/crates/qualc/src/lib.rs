//! File formats, the antenna case study and the `qualc` command line on top
//! of [`qualc_core`].

pub mod antenna;
pub mod cli;
pub mod error;
pub mod external;
pub mod format;
pub mod report;

pub use error::{Error, Result};
pub use format::{parse_calculus_spec, parse_network, write_calculus_spec, write_network, ParseError};
pub use report::{ReportStatus, RunReport};
