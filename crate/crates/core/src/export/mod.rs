//! Score documents, trajectory tables and plots.
//!
//! | artifact   | extension     | writer              |
//! |------------|---------------|---------------------|
//! | score      | `.score.json` | [`write_score_json`] |
//! | trajectory | `.traj.csv`   | [`write_traj_csv`]   |
//! | plot       | `.svg`        | [`render_plot`]      |

mod csv;
mod json;
mod svg;

use thiserror::Error;

pub use self::csv::{format_g6, write_traj_csv, CSV_HEADER};
pub use self::json::{read_score_json, write_score_json, SCORE_FORMAT, SCORE_VERSION};
pub use self::svg::{render_plot, PlotStyle};

#[derive(Debug, Error, PartialEq)]
pub enum ExportError {
    #[error("malformed score document: {0}")]
    Malformed(String),
    #[error("unsupported score format `{format}` version {version}")]
    Version { format: String, version: u32 },
    #[error("trajectories do not match the score window: {0}")]
    InconsistentWindow(String),
    #[error("invalid plot style: {0}")]
    Style(String),
}
