use serde::{Deserialize, Serialize};

use super::ExportError;
use crate::model::{GestureInstance, GestureScore, TierId, Window};

pub const SCORE_FORMAT: &str = "gesture-score";
pub const SCORE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Tiers {
    vocalic: Vec<GestureInstance>,
    consonantal: Vec<GestureInstance>,
    velopharyngeal: Vec<GestureInstance>,
    glottal: Vec<GestureInstance>,
    pulmonary: Vec<GestureInstance>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    format: String,
    version: u32,
    label: String,
    window: Window,
    tiers: Tiers,
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
}

/// Pretty-printed JSON with fixed field order.
pub fn write_score_json(score: &GestureScore) -> String {
    let tier = |t: TierId| score.tier(t).to_vec();
    let doc = Document {
        format: SCORE_FORMAT.into(),
        version: SCORE_VERSION,
        label: score.label.clone(),
        window: score.window,
        tiers: Tiers {
            vocalic: tier(TierId::Vocalic),
            consonantal: tier(TierId::Consonantal),
            velopharyngeal: tier(TierId::Velopharyngeal),
            glottal: tier(TierId::Glottal),
            pulmonary: tier(TierId::Pulmonary),
        },
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("score serializes");
    out.push('\n');
    out
}

/// Parses a score document. Instances keep their stored order.
pub fn read_score_json(document: &str) -> Result<GestureScore, ExportError> {
    let header: Header =
        serde_json::from_str(document).map_err(|e| ExportError::Malformed(e.to_string()))?;
    if header.format != SCORE_FORMAT || header.version != SCORE_VERSION {
        return Err(ExportError::Version {
            format: header.format,
            version: header.version,
        });
    }
    let doc: Document =
        serde_json::from_str(document).map_err(|e| ExportError::Malformed(e.to_string()))?;
    let mut score = GestureScore::new(doc.label, doc.window);
    let t = doc.tiers;
    *score.tier_mut(TierId::Vocalic) = t.vocalic;
    *score.tier_mut(TierId::Consonantal) = t.consonantal;
    *score.tier_mut(TierId::Velopharyngeal) = t.velopharyngeal;
    *score.tier_mut(TierId::Glottal) = t.glottal;
    *score.tier_mut(TierId::Pulmonary) = t.pulmonary;
    Ok(score)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ControlParamId;

    const MINIMAL: &str = r#"{
  "format": "gesture-score",
  "version": 1,
  "label": "p",
  "window": { "begin": 0, "end": 200 },
  "tiers": {
    "vocalic": [],
    "consonantal": [
      { "spec": "labial closing", "onset": 50, "offset": 150, "tau_on": 33.3,
        "tau_off": 33.3, "targets": { "clo_lab": 1.07 }, "pull": 30 }
    ],
    "velopharyngeal": [],
    "glottal": [],
    "pulmonary": []
  }
}"#;

    #[test]
    fn minimal_document() {
        let s = read_score_json(MINIMAL).unwrap();
        let g = &s.tier(TierId::Consonantal)[0];
        assert_eq!((g.t_s, g.t_e), (50.0, 150.0));
        assert_eq!(g.targets[&ControlParamId::CloLab], 1.07);
        assert!(!g.is_neutral);
        assert_eq!(read_score_json(&write_score_json(&s)).unwrap(), s);
    }

    #[test]
    fn missing_tier_is_malformed() {
        let doc = MINIMAL.replace("\"pulmonary\": []", "\"extra\": []");
        assert!(matches!(
            read_score_json(&doc),
            Err(ExportError::Malformed(_))
        ));
        let doc = MINIMAL.replace(",\n    \"pulmonary\": []", "");
        assert!(matches!(
            read_score_json(&doc),
            Err(ExportError::Malformed(_))
        ));
        assert!(matches!(
            read_score_json("{"),
            Err(ExportError::Malformed(_))
        ));
    }

    #[test]
    fn version_mismatch() {
        let doc = MINIMAL.replace("\"version\": 1", "\"version\": 2");
        assert_eq!(
            read_score_json(&doc),
            Err(ExportError::Version {
                format: "gesture-score".into(),
                version: 2
            })
        );
    }

    #[test]
    fn field_order_is_stable() {
        let s = read_score_json(MINIMAL).unwrap();
        let out = write_score_json(&s);
        let keys = [
            "\"format\"",
            "\"version\"",
            "\"label\"",
            "\"window\"",
            "\"tiers\"",
        ];
        let pos: Vec<usize> = keys.iter().map(|k| out.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(out.contains("\"neutral\": false"));
    }
}
