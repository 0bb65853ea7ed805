//! Language-specific gesture inventory: gesture specs, the
//! phoneme-to-gesture map, and conversion of rapidity into flank widths
//! and pull weights.
//!
//! The document format is TOML; see `data/german.inv` for the schema.

use std::collections::{BTreeMap, HashMap};

use serde::Deserialize;
use thiserror::Error;

use crate::blend::NeutralConfig;
use crate::model::{
    ControlParamId, GestureInstance, GestureSpec, LateralShape, Ms, TargetProblem, Targets, TierId,
};

/// The shipped Standard German inventory document.
pub const GERMAN_INVENTORY: &str = include_str!("../data/german.inv");

pub const INVENTORY_FORMAT: &str = "gesture-inventory";
pub const INVENTORY_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum InventoryError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported inventory format `{format}` version {version}")]
    Version { format: String, version: u32 },
    #[error("duplicate gesture name `{0}`")]
    Duplicate(String),
    #[error("{context} references unknown gesture `{name}`")]
    UnknownSpec { context: String, name: String },
    #[error("gesture `{spec}`: {problem}")]
    Range {
        spec: String,
        problem: TargetProblem,
    },
    #[error("gesture `{spec}`: {message}")]
    InvalidSpec { spec: String, message: String },
    #[error("phoneme `{phoneme}`: {message}")]
    PhonemeShape { phoneme: String, message: String },
    #[error("neutral gesture for the {tier} tier: {message}")]
    Neutral { tier: TierId, message: String },
    #[error("unknown phoneme `{0}`")]
    UnknownPhoneme(String),
}

/// How rapidity maps to the blending weight.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PullMode {
    /// `pull = rapidity`: fast gestures dominate slow ones.
    #[default]
    Rapidity,
    /// `pull = 1 / rapidity`.
    Reciprocal,
}

/// Flank conversion constant and pull mapping for one tier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conversion {
    /// ms times rapidity; flank width is `kappa / rapidity`.
    pub kappa: f64,
    pub pull_mode: PullMode,
}

impl Default for Conversion {
    fn default() -> Self {
        Conversion {
            kappa: 1000.0,
            pull_mode: PullMode::Rapidity,
        }
    }
}

/// Flank widths and pull derived from a spec's rapidity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceParams {
    pub tau_on: Ms,
    pub tau_off: Ms,
    pub pull: f64,
}

/// `tau_on = tau_off = kappa / rapidity`, `pull = rapidity`.
pub fn derive_instance_params(spec: &GestureSpec, kappa: f64) -> InstanceParams {
    derive_instance_params_with(
        spec,
        Conversion {
            kappa,
            pull_mode: PullMode::Rapidity,
        },
    )
}

pub fn derive_instance_params_with(spec: &GestureSpec, conv: Conversion) -> InstanceParams {
    let tau = conv.kappa / spec.rapidity;
    let pull = match conv.pull_mode {
        PullMode::Rapidity => spec.rapidity,
        PullMode::Reciprocal => 1.0 / spec.rapidity,
    };
    InstanceParams {
        tau_on: tau,
        tau_off: tau,
        pull,
    }
}

/// Coarse articulatory class of a phoneme, read off its gestures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Manner {
    Vowel,
    Plosive,
    Fricative,
    Nasal,
    /// Laterals and other oral sonorants.
    Approximant,
    /// Sounds realized by a single glottal gesture.
    Glottal,
}

impl Manner {
    pub fn is_vowel(self) -> bool {
        self == Manner::Vowel
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inventory {
    pub language: String,
    specs: Vec<GestureSpec>,
    index: HashMap<String, usize>,
    phoneme_map: BTreeMap<String, Vec<String>>,
    conversion: Conversion,
    tier_conversion: BTreeMap<TierId, Conversion>,
    neutral: [String; 5],
    speech_pulmonary: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInventory {
    format: String,
    version: u32,
    #[serde(default)]
    language: String,
    #[serde(default = "default_kappa")]
    kappa: f64,
    #[serde(default)]
    pull_mode: PullMode,
    #[serde(default)]
    tier: BTreeMap<TierId, RawConversion>,
    neutral: BTreeMap<TierId, String>,
    speech: RawSpeech,
    gesture: Vec<RawSpec>,
    phonemes: BTreeMap<String, Vec<String>>,
}

fn default_kappa() -> f64 {
    1000.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConversion {
    kappa: Option<f64>,
    pull_mode: Option<PullMode>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpeech {
    pulmonary: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: String,
    tier: TierId,
    #[serde(default)]
    articulators: Vec<String>,
    #[serde(default)]
    lateral: LateralShape,
    targets: BTreeMap<ControlParamId, f64>,
    duration: f64,
    rapidity: f64,
    #[serde(default)]
    aliases: Vec<String>,
}

/// 1-based line and column of a byte offset.
fn line_col(doc: &str, offset: usize) -> (usize, usize) {
    let before = &doc[..offset.min(doc.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses and validates an inventory document.
pub fn load_inventory(document: &str) -> Result<Inventory, InventoryError> {
    let raw: RawInventory = toml::from_str(document).map_err(|e| {
        let (line, column) = e
            .span()
            .map_or((0, 0), |span| line_col(document, span.start));
        InventoryError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    if raw.format != INVENTORY_FORMAT || raw.version != INVENTORY_VERSION {
        return Err(InventoryError::Version {
            format: raw.format,
            version: raw.version,
        });
    }

    let mut specs = Vec::with_capacity(raw.gesture.len());
    let mut index = HashMap::new();
    for r in raw.gesture {
        let spec = GestureSpec {
            name: r.name,
            tier: r.tier,
            main_articulators: r.articulators,
            lateral_shape: r.lateral,
            targets: r.targets,
            mean_duration: r.duration,
            rapidity: r.rapidity,
        };
        if let Some(problem) = spec.target_problems().into_iter().next() {
            return Err(InventoryError::Range {
                spec: spec.name,
                problem,
            });
        }
        if !(spec.mean_duration > 0.0 && spec.mean_duration.is_finite()) {
            return Err(InventoryError::InvalidSpec {
                spec: spec.name,
                message: format!("duration must be positive, got {}", spec.mean_duration),
            });
        }
        if !(spec.rapidity > 0.0 && spec.rapidity.is_finite()) {
            return Err(InventoryError::InvalidSpec {
                spec: spec.name,
                message: format!("rapidity must be positive, got {}", spec.rapidity),
            });
        }
        let at = specs.len();
        for key in std::iter::once(&spec.name).chain(&r.aliases) {
            if index.insert(key.clone(), at).is_some() {
                return Err(InventoryError::Duplicate(key.clone()));
            }
        }
        specs.push(spec);
    }

    let lookup = |context: &str, name: &str| -> Result<&GestureSpec, InventoryError> {
        index
            .get(name)
            .map(|&i| &specs[i])
            .ok_or_else(|| InventoryError::UnknownSpec {
                context: context.to_string(),
                name: name.to_string(),
            })
    };

    for (phoneme, names) in &raw.phonemes {
        let context = format!("phoneme `{phoneme}`");
        let resolved = names
            .iter()
            .map(|n| lookup(&context, n))
            .collect::<Result<Vec<_>, _>>()?;
        let tiers: Vec<TierId> = resolved.iter().map(|s| s.tier).collect();
        let well_formed = match tiers.as_slice() {
            [TierId::Glottal] => true,
            [tract, TierId::Velopharyngeal, TierId::Glottal] => {
                matches!(tract, TierId::Vocalic | TierId::Consonantal)
            }
            _ => false,
        };
        if !well_formed {
            return Err(InventoryError::PhonemeShape {
                phoneme: phoneme.clone(),
                message: "expected [tract, velopharyngeal, glottal] or a single glottal gesture"
                    .into(),
            });
        }
    }

    let mut neutral: [String; 5] = Default::default();
    for tier in TierId::ALL {
        let name = raw.neutral.get(&tier).ok_or(InventoryError::Neutral {
            tier,
            message: "missing".into(),
        })?;
        let spec = lookup(&format!("neutral.{tier}"), name)?;
        if spec.tier != tier {
            return Err(InventoryError::Neutral {
                tier,
                message: format!("`{name}` lives on the {} tier", spec.tier),
            });
        }
        if spec.targets.len() != tier.params().len() {
            return Err(InventoryError::Neutral {
                tier,
                message: format!("`{name}` must target every {tier} parameter"),
            });
        }
        neutral[tier.index()] = spec.name.clone();
    }
    let speech = lookup("speech.pulmonary", &raw.speech.pulmonary)?;
    if speech.tier != TierId::Pulmonary {
        return Err(InventoryError::InvalidSpec {
            spec: speech.name.clone(),
            message: "speech.pulmonary must be a pulmonary gesture".into(),
        });
    }
    let speech_pulmonary = speech.name.clone();

    let conversion = Conversion {
        kappa: raw.kappa,
        pull_mode: raw.pull_mode,
    };
    if !(conversion.kappa > 0.0 && conversion.kappa.is_finite()) {
        return Err(InventoryError::InvalidSpec {
            spec: "<inventory>".into(),
            message: "kappa must be positive".into(),
        });
    }
    let tier_conversion = raw
        .tier
        .into_iter()
        .map(|(tier, c)| {
            let conv = Conversion {
                kappa: c.kappa.unwrap_or(conversion.kappa),
                pull_mode: c.pull_mode.unwrap_or(conversion.pull_mode),
            };
            if conv.kappa > 0.0 && conv.kappa.is_finite() {
                Ok((tier, conv))
            } else {
                Err(InventoryError::InvalidSpec {
                    spec: format!("<tier.{tier}>"),
                    message: "kappa must be positive".into(),
                })
            }
        })
        .collect::<Result<_, _>>()?;

    Ok(Inventory {
        language: raw.language,
        specs,
        index,
        phoneme_map: raw.phonemes,
        conversion,
        tier_conversion,
        neutral,
        speech_pulmonary,
    })
}

impl Inventory {
    /// The shipped Standard German inventory.
    pub fn german() -> Inventory {
        load_inventory(GERMAN_INVENTORY).expect("shipped inventory is valid")
    }

    /// Specs in document order.
    pub fn specs(&self) -> &[GestureSpec] {
        &self.specs
    }

    /// Looks up a spec by name or alias.
    pub fn spec(&self, name: &str) -> Option<&GestureSpec> {
        self.index.get(name).map(|&i| &self.specs[i])
    }

    pub fn phoneme_map(&self) -> &BTreeMap<String, Vec<String>> {
        &self.phoneme_map
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.phoneme_map.keys().map(String::as_str)
    }

    pub fn has_phoneme(&self, symbol: &str) -> bool {
        self.phoneme_map.contains_key(symbol)
    }

    /// Resolved gestures of a phoneme, ordered tract, velopharyngeal,
    /// glottal (or just the glottal gesture).
    pub fn gestures_for_phoneme(&self, phoneme: &str) -> Result<Vec<&GestureSpec>, InventoryError> {
        let names = self
            .phoneme_map
            .get(phoneme)
            .ok_or_else(|| InventoryError::UnknownPhoneme(phoneme.to_string()))?;
        Ok(names
            .iter()
            .map(|n| self.spec(n).expect("references checked at load"))
            .collect())
    }

    pub fn manner(&self, phoneme: &str) -> Result<Manner, InventoryError> {
        let g = self.gestures_for_phoneme(phoneme)?;
        Ok(match g.as_slice() {
            [_] => Manner::Glottal,
            [tract, velum, _] => {
                if tract.tier == TierId::Vocalic {
                    Manner::Vowel
                } else {
                    let vel = velum
                        .targets
                        .get(&ControlParamId::Vel)
                        .copied()
                        .unwrap_or(0.0);
                    let closure = tract.targets.values().copied().fold(0.0, f64::max);
                    if vel < 0.0 {
                        Manner::Nasal
                    } else if vel > 0.0 && closure > 1.0 {
                        Manner::Plosive
                    } else if vel > 0.0 {
                        Manner::Fricative
                    } else {
                        Manner::Approximant
                    }
                }
            }
            _ => unreachable!("phoneme shape checked at load"),
        })
    }

    pub fn is_vowel(&self, phoneme: &str) -> bool {
        matches!(self.manner(phoneme), Ok(Manner::Vowel))
    }

    pub fn conversion(&self, tier: TierId) -> Conversion {
        self.tier_conversion
            .get(&tier)
            .copied()
            .unwrap_or(self.conversion)
    }

    pub fn instance_params(&self, spec: &GestureSpec) -> InstanceParams {
        derive_instance_params_with(spec, self.conversion(spec.tier))
    }

    /// Flank width a spec's instances use before clamping.
    pub fn flank(&self, spec: &GestureSpec) -> Ms {
        self.instance_params(spec).tau_on
    }

    pub fn neutral_spec(&self, tier: TierId) -> &GestureSpec {
        self.spec(&self.neutral[tier.index()])
            .expect("neutral references checked at load")
    }

    pub fn speech_pulmonary(&self) -> &GestureSpec {
        self.spec(&self.speech_pulmonary)
            .expect("speech reference checked at load")
    }

    /// Rest values of every parameter, taken from the neutral gestures.
    pub fn neutral_config(&self) -> NeutralConfig {
        let mut config = NeutralConfig::default();
        for tier in TierId::ALL {
            config
                .targets
                .extend(self.neutral_spec(tier).targets.clone());
        }
        config
    }

    /// Instance of `spec` over `[t_s, t_e]`. Flanks are clamped to half
    /// the interval when they would not fit.
    pub fn instantiate(&self, spec: &GestureSpec, t_s: Ms, t_e: Ms) -> GestureInstance {
        self.instantiate_with_targets(spec, t_s, t_e, spec.targets.clone())
    }

    pub(crate) fn instantiate_with_targets(
        &self,
        spec: &GestureSpec,
        t_s: Ms,
        t_e: Ms,
        targets: Targets,
    ) -> GestureInstance {
        let p = self.instance_params(spec);
        let half = (t_e - t_s) / 2.0;
        GestureInstance {
            spec_name: spec.name.clone(),
            t_s,
            t_e,
            tau_on: p.tau_on.min(half),
            tau_off: p.tau_off.min(half),
            targets,
            pull: p.pull,
            is_neutral: false,
            lateral_shape: spec.lateral_shape,
        }
    }
}
