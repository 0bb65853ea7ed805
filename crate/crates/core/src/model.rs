//! Shared domain types: control parameters, tiers, gesture specs and
//! instances, scores and sampled trajectories, plus score validation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Milliseconds, real-valued.
pub type Ms = f64;

/// Continuous, normalized articulatory control parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlParamId {
    /// Vocalic height.
    Hei,
    /// Vocalic position (fronting).
    Pos,
    /// Lip rounding; negative values are spreading.
    Rou,
    /// Labial closure.
    CloLab,
    /// Apical closure.
    CloApi,
    /// Dorsal closure.
    CloDor,
    /// Velopharyngeal closure; negative is velum lowering.
    Vel,
    /// Glottal opening; negative is tight closure.
    Opg,
    /// Subglottal pressure.
    Pres,
}

impl ControlParamId {
    pub const ALL: [ControlParamId; 9] = [
        ControlParamId::Hei,
        ControlParamId::Pos,
        ControlParamId::Rou,
        ControlParamId::CloLab,
        ControlParamId::CloApi,
        ControlParamId::CloDor,
        ControlParamId::Vel,
        ControlParamId::Opg,
        ControlParamId::Pres,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ControlParamId::Hei => "hei",
            ControlParamId::Pos => "pos",
            ControlParamId::Rou => "rou",
            ControlParamId::CloLab => "clo_lab",
            ControlParamId::CloApi => "clo_api",
            ControlParamId::CloDor => "clo_dor",
            ControlParamId::Vel => "vel",
            ControlParamId::Opg => "opg",
            ControlParamId::Pres => "pres",
        }
    }

    /// Closed admissible range `(min, max)`.
    pub fn range(self) -> (f64, f64) {
        match self {
            ControlParamId::Hei | ControlParamId::Pos | ControlParamId::Rou => (-1.0, 1.0),
            ControlParamId::CloLab | ControlParamId::CloApi | ControlParamId::CloDor => (0.0, 1.5),
            ControlParamId::Vel => (-1.0, 1.5),
            ControlParamId::Opg => (-1.0, 1.0),
            ControlParamId::Pres => (0.0, 1.0),
        }
    }

    pub fn in_range(self, value: f64) -> bool {
        let (lo, hi) = self.range();
        value.is_finite() && value >= lo && value <= hi
    }

    /// The tier whose gestures may target this parameter.
    pub fn tier(self) -> TierId {
        match self {
            ControlParamId::Hei | ControlParamId::Pos | ControlParamId::Rou => TierId::Vocalic,
            ControlParamId::CloLab | ControlParamId::CloApi | ControlParamId::CloDor => {
                TierId::Consonantal
            }
            ControlParamId::Vel => TierId::Velopharyngeal,
            ControlParamId::Opg => TierId::Glottal,
            ControlParamId::Pres => TierId::Pulmonary,
        }
    }
}

impl fmt::Display for ControlParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ControlParamId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ControlParamId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown control parameter `{s}`"))
    }
}

/// The five parallel channels of a gesture score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TierId {
    Vocalic,
    Consonantal,
    Velopharyngeal,
    Glottal,
    Pulmonary,
}

impl TierId {
    pub const ALL: [TierId; 5] = [
        TierId::Vocalic,
        TierId::Consonantal,
        TierId::Velopharyngeal,
        TierId::Glottal,
        TierId::Pulmonary,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TierId::Vocalic => "vocalic",
            TierId::Consonantal => "consonantal",
            TierId::Velopharyngeal => "velopharyngeal",
            TierId::Glottal => "glottal",
            TierId::Pulmonary => "pulmonary",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Parameters owned by this tier, in canonical order.
    pub fn params(self) -> &'static [ControlParamId] {
        use ControlParamId::*;
        match self {
            TierId::Vocalic => &[Hei, Pos, Rou],
            TierId::Consonantal => &[CloLab, CloApi, CloDor],
            TierId::Velopharyngeal => &[Vel],
            TierId::Glottal => &[Opg],
            TierId::Pulmonary => &[Pres],
        }
    }
}

impl fmt::Display for TierId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Manner annotation of the main articulator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LateralShape {
    #[default]
    Normal,
    /// Central groove, as in fricatives.
    Mid,
    /// Lowered lateral parts of the tongue.
    Lateral,
    ToTeeth,
}

impl LateralShape {
    pub fn as_str(self) -> &'static str {
        match self {
            LateralShape::Normal => "normal",
            LateralShape::Mid => "mid",
            LateralShape::Lateral => "lateral",
            LateralShape::ToTeeth => "to_teeth",
        }
    }
}

impl fmt::Display for LateralShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub type Targets = BTreeMap<ControlParamId, f64>;

/// Inventory entry describing one gesture type of a language.
#[derive(Debug, Clone, PartialEq)]
pub struct GestureSpec {
    pub name: String,
    pub tier: TierId,
    pub main_articulators: Vec<String>,
    pub lateral_shape: LateralShape,
    pub targets: Targets,
    pub mean_duration: Ms,
    pub rapidity: f64,
}

/// Why a gesture spec or instance is malformed.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetProblem {
    Empty,
    OutOfRange { param: ControlParamId, value: f64 },
    WrongTier { param: ControlParamId },
}

impl fmt::Display for TargetProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetProblem::Empty => f.write_str("no targets"),
            TargetProblem::OutOfRange { param, value } => {
                let (lo, hi) = param.range();
                write!(f, "{param} = {value} outside [{lo}, {hi}]")
            }
            TargetProblem::WrongTier { param } => {
                write!(f, "{param} belongs to the {} tier", param.tier())
            }
        }
    }
}

/// Checks the target rules shared by specs and instances.
pub fn check_targets(tier: TierId, targets: &Targets) -> Vec<TargetProblem> {
    if targets.is_empty() {
        return vec![TargetProblem::Empty];
    }
    let mut out = Vec::new();
    for (&param, &value) in targets {
        if param.tier() != tier {
            out.push(TargetProblem::WrongTier { param });
        } else if !param.in_range(value) {
            out.push(TargetProblem::OutOfRange { param, value });
        }
    }
    out
}

impl GestureSpec {
    pub fn target_problems(&self) -> Vec<TargetProblem> {
        check_targets(self.tier, &self.targets)
    }
}

/// A timed activation of one gesture inside a score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GestureInstance {
    #[serde(rename = "spec")]
    pub spec_name: String,
    #[serde(rename = "onset")]
    pub t_s: Ms,
    #[serde(rename = "offset")]
    pub t_e: Ms,
    pub tau_on: Ms,
    pub tau_off: Ms,
    pub targets: Targets,
    pub pull: f64,
    #[serde(rename = "neutral", default)]
    pub is_neutral: bool,
    #[serde(rename = "lateral", default)]
    pub lateral_shape: LateralShape,
}

impl GestureInstance {
    pub fn duration(&self) -> Ms {
        self.t_e - self.t_s
    }

    /// True when `t_s <= t < t_e`.
    pub fn is_active_at(&self, t: Ms) -> bool {
        self.t_s <= t && t < self.t_e
    }

    pub fn governs(&self, param: ControlParamId) -> bool {
        self.targets.contains_key(&param)
    }
}

/// Time window of a score, `[begin, end]` in ms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub begin: Ms,
    pub end: Ms,
}

impl Window {
    pub fn new(begin: Ms, end: Ms) -> Self {
        Window { begin, end }
    }

    pub fn length(&self) -> Ms {
        self.end - self.begin
    }
}

/// Tier-organized timing plan of all gestures of one utterance.
#[derive(Debug, Clone, PartialEq)]
pub struct GestureScore {
    pub label: String,
    pub window: Window,
    tiers: [Vec<GestureInstance>; 5],
}

impl GestureScore {
    pub fn new(label: impl Into<String>, window: Window) -> Self {
        GestureScore {
            label: label.into(),
            window,
            tiers: Default::default(),
        }
    }

    /// An empty score with a zero-length window.
    pub fn empty(label: impl Into<String>) -> Self {
        GestureScore::new(label, Window::new(0.0, 0.0))
    }

    pub fn tier(&self, tier: TierId) -> &[GestureInstance] {
        &self.tiers[tier.index()]
    }

    pub fn tier_mut(&mut self, tier: TierId) -> &mut Vec<GestureInstance> {
        &mut self.tiers[tier.index()]
    }

    pub fn tiers(&self) -> impl Iterator<Item = (TierId, &[GestureInstance])> {
        TierId::ALL.into_iter().map(move |t| (t, self.tier(t)))
    }

    /// Appends an instance to its tier, keeping the tier sorted by onset.
    pub fn insert(&mut self, tier: TierId, g: GestureInstance) {
        let list = self.tier_mut(tier);
        let at = list.partition_point(|x| x.t_s <= g.t_s);
        list.insert(at, g);
    }

    /// All instances, tier by tier.
    pub fn instances(&self) -> impl Iterator<Item = &GestureInstance> {
        self.tiers.iter().flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.tiers.iter().all(Vec::is_empty)
    }

    /// Every instance (neutral or not) that targets `param`, in tier order.
    pub fn governing(&self, param: ControlParamId) -> impl Iterator<Item = &GestureInstance> {
        self.tier(param.tier())
            .iter()
            .filter(move |g| g.governs(param))
    }
}

/// Sampled control-parameter trajectories on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySet {
    pub dt: Ms,
    pub t0: Ms,
    pub series: BTreeMap<ControlParamId, Vec<f64>>,
    pub lateral_series: Vec<LateralShape>,
}

impl TrajectorySet {
    pub fn len(&self) -> usize {
        self.lateral_series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lateral_series.is_empty()
    }

    pub fn time(&self, i: usize) -> Ms {
        self.t0 + i as f64 * self.dt
    }

    pub fn get(&self, p: ControlParamId) -> &[f64] {
        self.series.get(&p).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Number of samples `floor((end - begin)/dt) + 1`; a zero-length or
/// inverted window yields no samples.
pub fn sample_count(window: Window, dt: Ms) -> usize {
    let span = window.length();
    if span <= 0.0 || !span.is_finite() {
        return 0;
    }
    // absorb representation error such as 100.0 / 0.1
    ((span / dt) * (1.0 + 1e-12)).floor() as usize + 1
}

/// The invariant a [`Violation`] breaks.
#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    /// `t_s < t_e` does not hold, or a time is not finite.
    Ordering,
    /// Flanks are non-positive or do not fit in the interval.
    Flank,
    Target(TargetProblem),
    Pull,
    /// Non-neutral instances out of onset order.
    Unsorted,
    OutsideWindow,
    Window,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Ordering => f.write_str("onset must precede offset"),
            Rule::Flank => f.write_str("flanks must be positive and fit the interval"),
            Rule::Target(p) => write!(f, "target: {p}"),
            Rule::Pull => f.write_str("pull must be positive"),
            Rule::Unsorted => f.write_str("instances not sorted by onset"),
            Rule::OutsideWindow => f.write_str("instance outside score window"),
            Rule::Window => f.write_str("window end precedes begin"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub tier: Option<TierId>,
    pub index: Option<usize>,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.tier, self.index) {
            (Some(t), Some(i)) => write!(f, "{t}[{i}]: {}", self.rule),
            (Some(t), None) => write!(f, "{t}: {}", self.rule),
            _ => write!(f, "score: {}", self.rule),
        }
    }
}

const WINDOW_SLACK: Ms = 1e-9;

/// Lists every broken structural invariant of `score`, in tier and
/// instance order. An empty result means the score is well formed.
pub fn validate_score(score: &GestureScore) -> Vec<Violation> {
    let mut out = Vec::new();
    let w = score.window;
    if !(w.begin.is_finite() && w.end.is_finite()) || w.end < w.begin {
        out.push(Violation {
            tier: None,
            index: None,
            rule: Rule::Window,
        });
    }
    for (tier, list) in score.tiers() {
        let mut last_onset = f64::NEG_INFINITY;
        for (i, g) in list.iter().enumerate() {
            let mut push = |rule| {
                out.push(Violation {
                    tier: Some(tier),
                    index: Some(i),
                    rule,
                })
            };
            if !(g.t_s.is_finite() && g.t_e.is_finite()) || g.t_s >= g.t_e {
                push(Rule::Ordering);
            } else if !(g.tau_on > 0.0 && g.tau_off > 0.0)
                || g.tau_on + g.tau_off > g.duration() * (1.0 + 1e-12)
            {
                push(Rule::Flank);
            }
            for p in check_targets(tier, &g.targets) {
                push(Rule::Target(p));
            }
            if !(g.pull > 0.0 && g.pull.is_finite()) {
                push(Rule::Pull);
            }
            if !g.is_neutral {
                if g.t_s < last_onset {
                    push(Rule::Unsorted);
                }
                last_onset = g.t_s;
            }
            if g.t_s < w.begin - WINDOW_SLACK || g.t_e > w.end + WINDOW_SLACK {
                push(Rule::OutsideWindow);
            }
        }
    }
    out
}

/// Sub-intervals of the window where some tier has no instance with
/// `t_s <= t < t_e`. Used to check the post-fill coverage invariant.
pub fn coverage_gaps(score: &GestureScore) -> Vec<(TierId, Ms, Ms)> {
    let mut gaps = Vec::new();
    let w = score.window;
    for (tier, list) in score.tiers() {
        let mut spans: Vec<(Ms, Ms)> = list.iter().map(|g| (g.t_s, g.t_e)).collect();
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut cursor = w.begin;
        for (s, e) in spans {
            if s > cursor {
                gaps.push((tier, cursor, s.min(w.end)));
            }
            cursor = cursor.max(e);
            if cursor >= w.end {
                break;
            }
        }
        if cursor < w.end {
            gaps.push((tier, cursor, w.end));
        }
    }
    gaps.retain(|&(_, a, b)| b > a);
    gaps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(t_s: Ms, t_e: Ms, tau: Ms) -> GestureInstance {
        GestureInstance {
            spec_name: "labial closing".into(),
            t_s,
            t_e,
            tau_on: tau,
            tau_off: tau,
            targets: [(ControlParamId::CloLab, 1.07)].into(),
            pull: 30.0,
            is_neutral: false,
            lateral_shape: LateralShape::Normal,
        }
    }

    fn score_with(g: GestureInstance) -> GestureScore {
        let mut s = GestureScore::new("t", Window::new(0.0, 500.0));
        s.insert(TierId::Consonantal, g);
        s
    }

    #[test]
    fn degenerate_interval_is_one_ordering_violation() {
        let v = validate_score(&score_with(inst(100.0, 100.0, 10.0)));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::Ordering);
        assert_eq!(v[0].tier, Some(TierId::Consonantal));
        assert_eq!(v[0].index, Some(0));
    }

    #[test]
    fn oversized_flanks_are_one_flank_violation() {
        let v = validate_score(&score_with(inst(100.0, 150.0, 30.0)));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::Flank);
    }

    #[test]
    fn wrong_tier_target_and_range() {
        let mut g = inst(100.0, 200.0, 30.0);
        g.targets.insert(ControlParamId::Hei, 0.5);
        g.targets.insert(ControlParamId::CloLab, 2.0);
        let v = validate_score(&score_with(g));
        assert_eq!(v.len(), 2);
        assert!(matches!(
            v[0].rule,
            Rule::Target(TargetProblem::WrongTier {
                param: ControlParamId::Hei
            })
        ));
        assert!(matches!(
            v[1].rule,
            Rule::Target(TargetProblem::OutOfRange {
                param: ControlParamId::CloLab,
                ..
            })
        ));
    }

    #[test]
    fn unsorted_and_outside_window() {
        let mut s = GestureScore::new("t", Window::new(0.0, 300.0));
        s.tier_mut(TierId::Consonantal)
            .push(inst(200.0, 400.0, 30.0));
        s.tier_mut(TierId::Consonantal)
            .push(inst(100.0, 200.0, 30.0));
        let v = validate_score(&s);
        let rules: Vec<_> = v.iter().map(|v| (v.index, v.rule.clone())).collect();
        assert_eq!(
            rules,
            vec![(Some(0), Rule::OutsideWindow), (Some(1), Rule::Unsorted)]
        );
    }

    #[test]
    fn ranges_admit_table_values() {
        assert!(ControlParamId::CloLab.in_range(1.07));
        assert!(ControlParamId::Vel.in_range(-0.5));
        assert!(!ControlParamId::Pres.in_range(-0.1));
        assert!(!ControlParamId::Hei.in_range(f64::NAN));
    }

    #[test]
    fn sample_count_matches_floor_plus_one() {
        assert_eq!(sample_count(Window::new(0.0, 560.0), 5.0), 113);
        assert_eq!(sample_count(Window::new(0.0, 100.0), 5.0), 21);
        assert_eq!(sample_count(Window::new(0.0, 100.0), 0.1), 1001);
        assert_eq!(sample_count(Window::new(0.0, 7.0), 5.0), 2);
        assert_eq!(sample_count(Window::new(0.0, 0.0), 5.0), 0);
    }

    #[test]
    fn coverage_gaps_on_half_open_intervals() {
        let mut s = GestureScore::new("t", Window::new(0.0, 300.0));
        s.insert(TierId::Consonantal, inst(50.0, 150.0, 10.0));
        s.insert(TierId::Consonantal, inst(150.0, 250.0, 10.0));
        let gaps: Vec<_> = coverage_gaps(&s)
            .into_iter()
            .filter(|g| g.0 == TierId::Consonantal)
            .collect();
        assert_eq!(
            gaps,
            vec![
                (TierId::Consonantal, 0.0, 50.0),
                (TierId::Consonantal, 250.0, 300.0)
            ]
        );
    }
}
