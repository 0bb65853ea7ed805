//! Gesture-score construction.
//!
//! Two routes produce the linguistic gestures of an utterance: a rule
//! route that times every segment from [`TimingProfile`] constants, and a
//! syllabary route that replays stored syllable fragments and falls back
//! to rules for syllables it does not know. The result is then post
//! processed: same-type neighbours on the velopharyngeal and glottal
//! tiers are merged, a pulmonary gesture is added, and every remaining
//! gap is filled with neutral gestures.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inventory::{Inventory, InventoryError, Manner};
use crate::model::{GestureInstance, GestureScore, GestureSpec, Ms, TierId, Window};
use crate::parser::{Syllable, Utterance, MAX_CODA, MAX_NUCLEUS, MAX_ONSET, MAX_SYLLABLES};

/// Largest gap (ms) across which same-type neighbours still merge.
pub const DEFAULT_GAP_THRESHOLD: Ms = 20.0;

#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error(transparent)]
    Inventory(#[from] InventoryError),
    #[error("structure: {0}")]
    Structure(String),
}

/// Onset delay and offset advance of a secondary gesture relative to the
/// tract gesture of its segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagLead {
    pub lag: Ms,
    pub lead: Ms,
}

const fn ll(lag: Ms, lead: Ms) -> LagLead {
    LagLead { lag, lead }
}

/// Velopharyngeal timing by syllable position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VelumTiming {
    /// First consonant of an onset.
    pub onset_initial: LagLead,
    /// Later onset consonants.
    pub onset_inner: LagLead,
    pub nucleus: LagLead,
    pub coda: LagLead,
}

/// Glottal timing by manner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GlottalTiming {
    pub vowel: LagLead,
    pub plosive: LagLead,
    pub fricative: LagLead,
    pub nasal: LagLead,
    pub approximant: LagLead,
}

impl Default for VelumTiming {
    fn default() -> Self {
        VelumTiming {
            onset_initial: ll(0.0, 5.0),
            onset_inner: ll(15.0, 5.0),
            nucleus: ll(35.0, 20.0),
            coda: ll(10.0, 10.0),
        }
    }
}

impl Default for GlottalTiming {
    fn default() -> Self {
        GlottalTiming {
            vowel: ll(50.0, 0.0),
            plosive: ll(30.0, -10.0),
            fricative: ll(30.0, -5.0),
            nasal: ll(30.0, 15.0),
            approximant: ll(45.0, -10.0),
        }
    }
}

/// Constants of the rule route, in ms.
///
/// The defaults reproduce the published timing of "kam.flik" exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimingProfile {
    /// Onset of the first gesture after the window start.
    pub lead_in: Ms,
    /// Window end after the last gesture offset.
    pub lead_out: Ms,
    /// Onset-to-onset distance of a consonant after the preceding segment.
    pub consonant_stagger: Ms,
    /// A vowel starts this long before the preceding tract gesture ends.
    pub vowel_lead: Ms,
    /// Duration reduction of non-initial consonants in a cluster.
    pub cluster_shortening: Ms,
    /// Duration reduction of vowels in syllables with a coda.
    pub closed_syllable_shortening: Ms,
    /// Overlap of a syllable with the tract gestures of the previous one.
    pub syllable_overlap: Ms,
    pub velum: VelumTiming,
    pub glottis: GlottalTiming,
    /// A vowel after an onset plosive keeps the plosive's glottal gesture.
    pub aspiration: bool,
}

impl Default for TimingProfile {
    fn default() -> Self {
        TimingProfile {
            lead_in: 50.0,
            lead_out: 50.0,
            consonant_stagger: 60.0,
            vowel_lead: 60.0,
            cluster_shortening: 10.0,
            closed_syllable_shortening: 40.0,
            syllable_overlap: 0.0,
            velum: VelumTiming::default(),
            glottis: GlottalTiming::default(),
            aspiration: true,
        }
    }
}

impl TimingProfile {
    pub fn from_toml(doc: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(doc)
    }

    fn check(&self) -> Result<(), BuildError> {
        let mut values = vec![
            self.lead_in,
            self.lead_out,
            self.consonant_stagger,
            self.vowel_lead,
            self.cluster_shortening,
            self.closed_syllable_shortening,
            self.syllable_overlap,
        ];
        let v = &self.velum;
        let g = &self.glottis;
        for x in [
            v.onset_initial,
            v.onset_inner,
            v.nucleus,
            v.coda,
            g.vowel,
            g.plosive,
            g.fricative,
            g.nasal,
            g.approximant,
        ] {
            values.extend([x.lag, x.lead]);
        }
        if values.iter().any(|x| !x.is_finite()) || self.lead_in < 0.0 || self.lead_out < 0.0 {
            return Err(BuildError::Structure(
                "timing profile constants must be finite, lead-in/out non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Position {
    Onset { initial: bool },
    Nucleus,
    Coda { initial: bool },
}

/// Gestures of one syllable with absolute times.
#[derive(Debug, Clone)]
struct Fragment {
    gestures: Vec<(TierId, GestureInstance)>,
    /// End of the syllable's last tract gesture.
    tract_end: Ms,
}

struct Slot {
    t_s: Ms,
    t_e: Ms,
}

fn check_utterance(u: &Utterance) -> Result<(), BuildError> {
    let bad = |m: String| Err(BuildError::Structure(m));
    if u.syllables.is_empty() || u.syllables.len() > MAX_SYLLABLES {
        return bad(format!("{} syllables", u.syllables.len()));
    }
    for (i, s) in u.syllables.iter().enumerate() {
        if s.onset.len() > MAX_ONSET
            || s.nucleus.is_empty()
            || s.nucleus.len() > MAX_NUCLEUS
            || s.coda.len() > MAX_CODA
        {
            return bad(format!(
                "syllable {} `{}` violates structure limits",
                i + 1,
                s
            ));
        }
    }
    Ok(())
}

fn secondary(
    inv: &Inventory,
    tier: TierId,
    spec: &GestureSpec,
    slot: &Slot,
    timing: LagLead,
    symbol: &str,
) -> Result<(TierId, GestureInstance), BuildError> {
    let t_s = slot.t_s + timing.lag;
    let t_e = slot.t_e - timing.lead;
    if t_s >= t_e {
        return Err(BuildError::Structure(format!(
            "`{symbol}`: {tier} gesture collapses to [{t_s}, {t_e}]"
        )));
    }
    Ok((tier, inv.instantiate(spec, t_s, t_e)))
}

fn rule_syllable(
    syl: &Syllable,
    start: Ms,
    inv: &Inventory,
    profile: &TimingProfile,
) -> Result<Fragment, BuildError> {
    let positions = syl
        .onset
        .iter()
        .enumerate()
        .map(|(i, s)| (s, Position::Onset { initial: i == 0 }))
        .chain(syl.nucleus.iter().map(|s| (s, Position::Nucleus)))
        .chain(
            syl.coda
                .iter()
                .enumerate()
                .map(|(i, s)| (s, Position::Coda { initial: i == 0 })),
        );

    let closed = !syl.coda.is_empty();
    let mut gestures = Vec::new();
    let mut prev: Option<(Slot, Manner, String)> = None;
    let mut tract_end = start;

    for (symbol, position) in positions {
        let manner = inv.manner(symbol)?;
        let specs = inv.gestures_for_phoneme(symbol)?;
        let tract = specs[0];

        let t_s = match &prev {
            None => start,
            Some((p, _, _)) if manner.is_vowel() => p.t_e - profile.vowel_lead,
            Some((p, _, _)) => p.t_s + profile.consonant_stagger,
        };
        let mut duration = tract.mean_duration;
        match position {
            Position::Onset { initial: false } | Position::Coda { initial: false } => {
                duration -= profile.cluster_shortening
            }
            Position::Nucleus if closed => duration -= profile.closed_syllable_shortening,
            _ => {}
        }
        if duration <= 0.0 {
            return Err(BuildError::Structure(format!(
                "`{symbol}`: non-positive duration {duration}"
            )));
        }
        let slot = Slot {
            t_s,
            t_e: t_s + duration,
        };

        if manner == Manner::Glottal {
            gestures.push((TierId::Glottal, inv.instantiate(tract, slot.t_s, slot.t_e)));
        } else {
            gestures.push((tract.tier, inv.instantiate(tract, slot.t_s, slot.t_e)));

            let velum = match position {
                Position::Onset { initial: true } => profile.velum.onset_initial,
                Position::Onset { initial: false } => profile.velum.onset_inner,
                Position::Nucleus => profile.velum.nucleus,
                Position::Coda { .. } => profile.velum.coda,
            };
            gestures.push(secondary(
                inv,
                TierId::Velopharyngeal,
                specs[1],
                &slot,
                velum,
                symbol,
            )?);

            let glottis = match manner {
                Manner::Vowel => profile.glottis.vowel,
                Manner::Plosive => profile.glottis.plosive,
                Manner::Fricative => profile.glottis.fricative,
                Manner::Nasal => profile.glottis.nasal,
                Manner::Approximant | Manner::Glottal => profile.glottis.approximant,
            };
            let mut glottal_spec = specs[2];
            if profile.aspiration && manner.is_vowel() {
                if let Some((_, Manner::Plosive, prev_symbol)) = &prev {
                    glottal_spec = inv.gestures_for_phoneme(prev_symbol)?[2];
                }
            }
            gestures.push(secondary(
                inv,
                TierId::Glottal,
                glottal_spec,
                &slot,
                glottis,
                symbol,
            )?);
        }

        tract_end = tract_end.max(slot.t_e);
        prev = Some((slot, manner, symbol.clone()));
    }
    Ok(Fragment {
        gestures,
        tract_end,
    })
}

fn assemble(label: &str, fragments: Vec<Fragment>, profile: &TimingProfile) -> GestureScore {
    let last = fragments
        .iter()
        .flat_map(|f| f.gestures.iter().map(|(_, g)| g.t_e))
        .fold(0.0, f64::max);
    let mut score = GestureScore::new(label, Window::new(0.0, last + profile.lead_out));
    for (tier, g) in fragments.into_iter().flat_map(|f| f.gestures) {
        score.insert(tier, g);
    }
    score
}

fn next_start(prev: Option<&Fragment>, profile: &TimingProfile) -> Ms {
    prev.map_or(profile.lead_in, |f| f.tract_end - profile.syllable_overlap)
}

/// Rule route: times every segment of `u` from the profile constants.
/// Returns the raw linguistic score, before merging and neutral fill.
pub fn build_score_rule(
    u: &Utterance,
    inv: &Inventory,
    profile: &TimingProfile,
) -> Result<GestureScore, BuildError> {
    build_score_lexicon(u, &Syllabary::default(), inv, profile)
}

/// Syllabary route: stored syllables are replayed at their start time,
/// unknown syllables are built by rule.
pub fn build_score_lexicon(
    u: &Utterance,
    syl: &Syllabary,
    inv: &Inventory,
    profile: &TimingProfile,
) -> Result<GestureScore, BuildError> {
    profile.check()?;
    check_utterance(u)?;
    let mut fragments: Vec<Fragment> = Vec::with_capacity(u.syllables.len());
    for s in &u.syllables {
        let start = next_start(fragments.last(), profile);
        let fragment = match syl.get(&s.key()) {
            Some(stored) => stored.place(start, inv),
            None => rule_syllable(s, start, inv, profile)?,
        };
        fragments.push(fragment);
    }
    Ok(assemble(&u.to_string(), fragments, profile))
}

/// Merges consecutive same-type instances on the velopharyngeal and
/// glottal tiers whose gap is at most `gap_threshold` ms (overlaps count
/// as negative gaps). The merged instance spans both and keeps the outer
/// flanks.
pub fn merge_adjacent(score: &GestureScore, gap_threshold: Ms) -> GestureScore {
    let mut out = score.clone();
    for tier in [TierId::Velopharyngeal, TierId::Glottal] {
        let mut merged: Vec<GestureInstance> = Vec::with_capacity(score.tier(tier).len());
        for g in score.tier(tier) {
            if let Some(cur) = merged.last_mut() {
                if cur.spec_name == g.spec_name
                    && cur.is_neutral == g.is_neutral
                    && g.t_s - cur.t_e <= gap_threshold
                {
                    if g.t_e >= cur.t_e {
                        cur.t_e = g.t_e;
                        cur.tau_off = g.tau_off;
                    }
                    let span = cur.duration();
                    let flanks = cur.tau_on + cur.tau_off;
                    if flanks > span {
                        cur.tau_on *= span / flanks;
                        cur.tau_off *= span / flanks;
                    }
                    continue;
                }
            }
            merged.push(g.clone());
        }
        *out.tier_mut(tier) = merged;
    }
    out
}

/// Uncovered stretches of `[begin, end]` for one parameter. Instances
/// cover their open interval, so a point where one instance ends exactly
/// as the next begins counts as a zero-length gap.
fn parameter_gaps(spans: &mut [(Ms, Ms)], window: Window) -> Vec<(Ms, Ms)> {
    spans.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut gaps = Vec::new();
    let mut cursor = window.begin;
    for &(s, e) in spans.iter() {
        if cursor >= window.end {
            break;
        }
        if s > cursor {
            gaps.push((cursor, s.min(window.end)));
        } else if s == cursor && cursor > window.begin {
            gaps.push((cursor, cursor));
        }
        cursor = cursor.max(e);
    }
    if cursor < window.end {
        gaps.push((cursor, window.end));
    }
    gaps
}

/// Covers every gap of every tier parameter with a neutral instance of
/// the tier's rest gesture, extended by one flank width on both sides
/// (within the window) so it cross-fades with its neighbours.
pub fn fill_neutral(score: &GestureScore, inv: &Inventory) -> GestureScore {
    let mut out = score.clone();
    let window = score.window;
    if window.length() <= 0.0 {
        return out;
    }
    for tier in TierId::ALL {
        let spec = inv.neutral_spec(tier);
        let flank = inv.flank(spec);
        // identical gaps of several parameters share one instance
        let mut pending: Vec<((Ms, Ms), Vec<_>)> = Vec::new();
        for &param in tier.params() {
            let mut spans: Vec<(Ms, Ms)> = score
                .tier(tier)
                .iter()
                .filter(|g| g.governs(param))
                .map(|g| (g.t_s, g.t_e))
                .collect();
            for gap in parameter_gaps(&mut spans, window) {
                match pending.iter_mut().find(|(g, _)| *g == gap) {
                    Some((_, params)) => params.push(param),
                    None => pending.push((gap, vec![param])),
                }
            }
        }
        for ((gap_start, gap_end), params) in pending {
            let t_s = (gap_start - flank).max(window.begin);
            let t_e = (gap_end + flank).min(window.end);
            if t_e <= t_s {
                continue;
            }
            let targets = params.iter().map(|p| (*p, spec.targets[p])).collect();
            let mut g = inv.instantiate_with_targets(spec, t_s, t_e, targets);
            g.is_neutral = true;
            out.insert(tier, g);
        }
    }
    out
}

/// Replaces the pulmonary tier's speaking gesture with one spanning all
/// non-neutral gestures, widened by one flank on each side. Scores without
/// linguistic gestures get none.
pub fn add_pulmonary(score: &GestureScore, inv: &Inventory) -> GestureScore {
    let mut out = score.clone();
    out.tier_mut(TierId::Pulmonary).retain(|g| g.is_neutral);
    let speaking = score
        .tiers()
        .filter(|(t, _)| *t != TierId::Pulmonary)
        .flat_map(|(_, list)| list.iter().filter(|g| !g.is_neutral));
    let Some((first, last)) = speaking.fold(None, |acc: Option<(Ms, Ms)>, g| {
        Some(acc.map_or((g.t_s, g.t_e), |(a, b)| (a.min(g.t_s), b.max(g.t_e))))
    }) else {
        return out;
    };
    let spec = inv.speech_pulmonary();
    let flank = inv.flank(spec);
    let t_s = (first - flank).max(score.window.begin);
    let t_e = (last + flank).min(score.window.end);
    out.insert(TierId::Pulmonary, inv.instantiate(spec, t_s, t_e));
    out
}

/// The full pipeline: route, merge, pulmonary gesture, neutral fill.
pub fn compose_score(
    u: &Utterance,
    syllabary: Option<&Syllabary>,
    inv: &Inventory,
    profile: &TimingProfile,
    gap_threshold: Ms,
) -> Result<GestureScore, BuildError> {
    let raw = match syllabary {
        Some(s) => build_score_lexicon(u, s, inv, profile)?,
        None => build_score_rule(u, inv, profile)?,
    };
    let merged = merge_adjacent(&raw, gap_threshold);
    Ok(fill_neutral(&add_pulmonary(&merged, inv), inv))
}

// --- syllabary ---------------------------------------------------------------

pub const SYLLABARY_FORMAT: &str = "gesture-syllabary";
pub const SYLLABARY_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum SyllabaryError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported syllabary format `{format}` version {version}")]
    Version { format: String, version: u32 },
    #[error("syllable `{key}`: {message}")]
    Entry { key: String, message: String },
}

/// One stored gesture, times relative to the syllable start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoredGesture {
    pub tier: TierId,
    pub spec: String,
    pub onset: Ms,
    pub offset: Ms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoredSyllable {
    pub key: String,
    /// Relative end of the last tract gesture; where the next syllable is
    /// anchored. Derived from the vocalic and consonantal gestures when
    /// absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tract_end: Option<Ms>,
    pub gestures: Vec<StoredGesture>,
}

impl StoredSyllable {
    fn tract_end(&self) -> Ms {
        self.tract_end.unwrap_or_else(|| {
            let tract = self
                .gestures
                .iter()
                .filter(|g| matches!(g.tier, TierId::Vocalic | TierId::Consonantal));
            let end = tract.map(|g| g.offset).fold(f64::NEG_INFINITY, f64::max);
            if end.is_finite() {
                end
            } else {
                self.gestures.iter().map(|g| g.offset).fold(0.0, f64::max)
            }
        })
    }

    fn place(&self, start: Ms, inv: &Inventory) -> Fragment {
        let gestures = self
            .gestures
            .iter()
            .map(|g| {
                let spec = inv.spec(&g.spec).expect("checked at load");
                (
                    g.tier,
                    inv.instantiate(spec, start + g.onset, start + g.offset),
                )
            })
            .collect();
        Fragment {
            gestures,
            tract_end: start + self.tract_end(),
        }
    }
}

/// Stored gesture fragments of frequent syllables, keyed by the
/// concatenated SAMPA symbols.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Syllabary {
    entries: BTreeMap<String, StoredSyllable>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSyllabary {
    format: String,
    version: u32,
    #[serde(default)]
    syllable: Vec<StoredSyllable>,
}

impl Syllabary {
    pub fn get(&self, key: &str) -> Option<&StoredSyllable> {
        self.entries.get(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Adds or replaces an entry after checking it against `inv`.
    pub fn insert(&mut self, entry: StoredSyllable, inv: &Inventory) -> Result<(), SyllabaryError> {
        let fail = |message: String| SyllabaryError::Entry {
            key: entry.key.clone(),
            message,
        };
        for g in &entry.gestures {
            let spec = inv
                .spec(&g.spec)
                .ok_or_else(|| fail(format!("unknown gesture `{}`", g.spec)))?;
            if spec.tier != g.tier {
                return Err(fail(format!(
                    "`{}` is a {} gesture, stored on {}",
                    g.spec, spec.tier, g.tier
                )));
            }
            if !(g.onset.is_finite() && g.offset.is_finite() && g.onset < g.offset) {
                return Err(fail(format!(
                    "`{}`: onset {} must precede offset {}",
                    g.spec, g.onset, g.offset
                )));
            }
        }
        self.entries.insert(entry.key.clone(), entry);
        Ok(())
    }

    /// Records the rule-route fragments of every syllable of `u`.
    pub fn record_rule_route(
        &mut self,
        u: &Utterance,
        inv: &Inventory,
        profile: &TimingProfile,
    ) -> Result<(), BuildError> {
        check_utterance(u)?;
        let mut prev: Option<Fragment> = None;
        for s in &u.syllables {
            let start = next_start(prev.as_ref(), profile);
            let frag = rule_syllable(s, start, inv, profile)?;
            let entry = StoredSyllable {
                key: s.key(),
                tract_end: Some(frag.tract_end - start),
                gestures: frag
                    .gestures
                    .iter()
                    .map(|(tier, g)| StoredGesture {
                        tier: *tier,
                        spec: g.spec_name.clone(),
                        onset: g.t_s - start,
                        offset: g.t_e - start,
                    })
                    .collect(),
            };
            self.insert(entry, inv)
                .map_err(|e| BuildError::Structure(e.to_string()))?;
            prev = Some(frag);
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        let raw = RawSyllabary {
            format: SYLLABARY_FORMAT.into(),
            version: SYLLABARY_VERSION,
            syllable: self.entries.values().cloned().collect(),
        };
        toml::to_string(&raw).expect("syllabary serializes")
    }
}

pub fn load_syllabary(doc: &str, inv: &Inventory) -> Result<Syllabary, SyllabaryError> {
    let raw: RawSyllabary =
        toml::from_str(doc).map_err(|e| SyllabaryError::Parse(e.to_string()))?;
    if raw.format != SYLLABARY_FORMAT || raw.version != SYLLABARY_VERSION {
        return Err(SyllabaryError::Version {
            format: raw.format,
            version: raw.version,
        });
    }
    let mut syl = Syllabary::default();
    for entry in raw.syllable {
        syl.insert(entry, inv)?;
    }
    Ok(syl)
}
