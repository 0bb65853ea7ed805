//! Displacement, pull-weighted blending of overlapping gestures, and
//! sampling of control-parameter trajectories on a uniform grid.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::activation::activation;
use crate::exec::{self, Execution};
use crate::model::{
    sample_count, validate_score, ControlParamId, GestureInstance, GestureScore, LateralShape, Ms,
    TierId, TrajectorySet, Violation,
};

#[derive(Debug, Error, PartialEq)]
pub enum BlendError {
    #[error("gesture `{spec}` does not govern {param}")]
    ParameterNotGoverned { spec: String, param: ControlParamId },
    #[error("invalid score: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidScore(Vec<Violation>),
    #[error("sampling step must be positive and finite, got {0}")]
    NonPositiveDt(Ms),
}

/// What an ungoverned parameter falls back to.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Fallback {
    /// The speaker-neutral target of the parameter.
    #[default]
    Neutral,
    Zero,
}

/// Rest posture values and the guard for a vanishing blend denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct NeutralConfig {
    pub targets: BTreeMap<ControlParamId, f64>,
    pub epsilon: f64,
    pub fallback: Fallback,
}

impl Default for NeutralConfig {
    /// Schwa-like tract, open glottis, lowered velum, no closure, no
    /// subglottal pressure.
    fn default() -> Self {
        use ControlParamId::*;
        NeutralConfig {
            targets: [
                (Hei, -0.80),
                (Pos, 0.20),
                (Rou, 0.00),
                (CloLab, 0.0),
                (CloApi, 0.0),
                (CloDor, 0.0),
                (Vel, -0.5),
                (Opg, 0.01),
                (Pres, 0.0),
            ]
            .into(),
            epsilon: 1e-9,
            fallback: Fallback::Neutral,
        }
    }
}

impl NeutralConfig {
    pub fn value(&self, p: ControlParamId) -> f64 {
        match self.fallback {
            Fallback::Neutral => self.targets.get(&p).copied().unwrap_or(0.0),
            Fallback::Zero => 0.0,
        }
    }

    /// Checks that every parameter has a target and epsilon is in `(0, 1e-3]`.
    pub fn is_valid(&self) -> bool {
        ControlParamId::ALL
            .iter()
            .all(|p| self.targets.get(p).is_some_and(|v| p.in_range(*v)))
            && self.epsilon > 0.0
            && self.epsilon <= 1e-3
    }
}

/// Displacement `a_g(t) * T_{g,p}` of one gesture acting alone.
pub fn displacement(g: &GestureInstance, p: ControlParamId, t: Ms) -> Result<f64, BlendError> {
    let target = g
        .targets
        .get(&p)
        .ok_or_else(|| BlendError::ParameterNotGoverned {
            spec: g.spec_name.clone(),
            param: p,
        })?;
    Ok(activation(g, t) * target)
}

/// Normalized pull-weighted blend of every instance in `active` that
/// governs `p` and is active at `t`.
///
/// Falls back to the neutral value when the weighted activation sum is
/// below `neutral.epsilon`.
pub fn blend_param<'a, I>(active: I, p: ControlParamId, t: Ms, neutral: &NeutralConfig) -> f64
where
    I: IntoIterator<Item = &'a GestureInstance>,
{
    let mut num = 0.0;
    let mut den = 0.0;
    for g in active {
        let Some(&target) = g.targets.get(&p) else {
            continue;
        };
        if !g.is_active_at(t) {
            continue;
        }
        let w = g.pull * activation(g, t);
        num += w * target;
        den += w;
    }
    if den < neutral.epsilon {
        neutral.value(p)
    } else {
        num / den
    }
}

/// Manner annotation at `t`: the lateral shape of the non-neutral
/// consonantal instance with the largest weighted activation, or
/// [`LateralShape::Normal`] when none is active.
pub fn lateral_shape_at(score: &GestureScore, t: Ms) -> LateralShape {
    let mut best: Option<(f64, LateralShape)> = None;
    for g in score.tier(TierId::Consonantal) {
        if g.is_neutral || !g.is_active_at(t) {
            continue;
        }
        let w = g.pull * activation(g, t);
        if w > 0.0 && best.is_none_or(|(bw, _)| w > bw) {
            best = Some((w, g.lateral_shape));
        }
    }
    best.map(|(_, s)| s).unwrap_or_default()
}

/// Samples every control parameter of `score` at `t_i = begin + i * dt`.
pub fn sample_trajectories(
    score: &GestureScore,
    dt: Ms,
    neutral: &NeutralConfig,
) -> Result<TrajectorySet, BlendError> {
    sample_trajectories_with(score, dt, neutral, Execution::default())
}

/// [`sample_trajectories`] with an explicit execution strategy. Both
/// strategies produce identical output.
pub fn sample_trajectories_with(
    score: &GestureScore,
    dt: Ms,
    neutral: &NeutralConfig,
    execution: Execution,
) -> Result<TrajectorySet, BlendError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(BlendError::NonPositiveDt(dt));
    }
    let violations = validate_score(score);
    if !violations.is_empty() {
        return Err(BlendError::InvalidScore(violations));
    }

    let governing: Vec<(ControlParamId, Vec<&GestureInstance>)> = ControlParamId::ALL
        .iter()
        .map(|&p| (p, score.governing(p).collect()))
        .collect();
    let t0 = score.window.begin;
    let n = sample_count(score.window, dt);

    let rows = exec::map_indices(n, execution, |i| {
        let t = t0 + i as f64 * dt;
        let mut values = [0.0; 9];
        for (slot, (p, list)) in values.iter_mut().zip(&governing) {
            let active = list.iter().copied().filter(|g| g.is_active_at(t));
            *slot = blend_param(active, *p, t, neutral);
        }
        (values, lateral_shape_at(score, t))
    });

    let mut series: BTreeMap<ControlParamId, Vec<f64>> = ControlParamId::ALL
        .iter()
        .map(|&p| (p, Vec::with_capacity(n)))
        .collect();
    let mut lateral_series = Vec::with_capacity(n);
    for (values, lateral) in rows {
        for (p, v) in ControlParamId::ALL.iter().zip(values) {
            series.get_mut(p).expect("all parameters present").push(v);
        }
        lateral_series.push(lateral);
    }
    Ok(TrajectorySet {
        dt,
        t0,
        series,
        lateral_series,
    })
}

/// Samples several independent scores, one result per score.
pub fn sample_batch(
    scores: &[GestureScore],
    dt: Ms,
    neutral: &NeutralConfig,
    execution: Execution,
) -> Vec<Result<TrajectorySet, BlendError>> {
    exec::map_indices(scores.len(), execution, |i| {
        sample_trajectories_with(&scores[i], dt, neutral, Execution::Sequential)
    })
}
