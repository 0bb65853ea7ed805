//! Gesture scores and articulatory control-parameter trajectories.
//!
//! A SAMPA utterance is parsed into syllables, turned into a five-tier
//! gesture score (by rule or from a syllabary), padded with neutral and
//! pulmonary gestures, and sampled into control-parameter trajectories by
//! pull-weighted blending of cosine-windowed gesture activations.

pub mod activation;
pub mod blend;
pub mod exec;
pub mod export;
pub mod inventory;
pub mod model;
pub mod parser;
pub mod score;

pub use activation::{activation, activation_derivative};
pub use blend::{
    blend_param, displacement, lateral_shape_at, sample_batch, sample_trajectories,
    sample_trajectories_with, BlendError, Fallback, NeutralConfig,
};
pub use exec::Execution;
pub use export::{
    read_score_json, render_plot, write_score_json, write_traj_csv, ExportError, PlotStyle,
};
pub use inventory::{
    derive_instance_params, load_inventory, Inventory, InventoryError, Manner, PullMode,
    GERMAN_INVENTORY,
};
pub use model::{
    coverage_gaps, validate_score, ControlParamId, GestureInstance, GestureScore, GestureSpec,
    LateralShape, Ms, TierId, TrajectorySet, Violation, Window,
};
pub use parser::{parse_utterance, ParseError, Syllable, Utterance};
pub use score::{
    add_pulmonary, build_score_lexicon, build_score_rule, compose_score, fill_neutral,
    load_syllabary, merge_adjacent, BuildError, Syllabary, SyllabaryError, TimingProfile,
    DEFAULT_GAP_THRESHOLD,
};
