//! File formats, process-term elaboration, and JSON reporting around
//! [`coweak_core`]. The binary in this crate exposes everything as the
//! `coweak` command; see the README for the format grammars.

pub mod formats;
pub mod process;
pub mod report;

pub use formats::{
    parse_partition, parse_pattern, parse_segala_system, parse_weighted_system, render_system,
    FormatError,
};
pub use process::{elaborate_process_file, ProcessError};
