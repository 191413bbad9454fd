//! File formats, the `CTC1` container, experiment drivers and reports for
//! the contourlet codec and watermarking toolkit in [`ctwm_core`].

pub mod container;
pub mod error;
pub mod experiments;
pub mod fsutil;
pub mod manifest;
pub mod pnm;
pub mod report;
