use std::fs;
use std::path::PathBuf;

use gesture_score::*;
use proptest::prelude::*;

fn inv() -> Inventory {
    Inventory::german()
}

fn split_symbols() -> (Vec<String>, Vec<String>) {
    let inv = inv();
    inv.symbols()
        .map(String::from)
        .partition(|s| inv.is_vowel(s))
}

fn arb_utterance() -> impl Strategy<Value = String> {
    let (vowels, consonants) = split_symbols();
    let syllable = (
        prop::collection::vec(prop::sample::select(consonants.clone()), 0..=2),
        prop::collection::vec(prop::sample::select(vowels), 1..=3),
        prop::collection::vec(prop::sample::select(consonants), 0..=2),
    )
        .prop_map(|(o, n, c)| o.concat() + &n.concat() + &c.concat());
    prop::collection::vec(syllable, 1..=3).prop_map(|s| s.join("."))
}

fn compose(text: &str) -> Result<GestureScore, String> {
    let inv = inv();
    let u = parse_utterance(text, &inv).map_err(|e| e.to_string())?;
    compose_score(
        &u,
        None,
        &inv,
        &TimingProfile::default(),
        DEFAULT_GAP_THRESHOLD,
    )
    .map_err(|e| e.to_string())
}

#[test]
fn fixtures_match_current_pipeline() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    for (file, text) in [
        ("kamflik", "kam.flik"),
        ("pai", "pa:i:"),
        ("Spilt", "Spi:lt"),
        ("klatS", "klatS"),
        ("faI6", "faI6"),
        ("aha", "?a.ha"),
        ("manala", "ma.na.la"),
    ] {
        let doc = fs::read_to_string(dir.join(format!("{file}.score.json"))).unwrap();
        assert_eq!(
            read_score_json(&doc).unwrap(),
            compose(text).unwrap(),
            "{file}"
        );
        assert_eq!(write_score_json(&compose(text).unwrap()), doc, "{file}");
    }
}

#[test]
fn kamflik_merges_glottal_and_velum_pairs() {
    let inv = inv();
    let u = parse_utterance("kam.flik", &inv).unwrap();
    let raw = build_score_rule(&u, &inv, &TimingProfile::default()).unwrap();
    let m = merge_adjacent(&raw, DEFAULT_GAP_THRESHOLD);
    let spans = |t: TierId| -> Vec<(String, Ms, Ms)> {
        m.tier(t)
            .iter()
            .map(|g| (g.spec_name.clone(), g.t_s, g.t_e))
            .collect()
    };
    let glottal = spans(TierId::Glottal);
    assert!(glottal.contains(&("glottal opening".into(), 80.0, 200.0)));
    assert!(glottal.contains(&("glottal closing".into(), 355.0, 450.0)));
    assert!(glottal.contains(&("glottal closing".into(), 180.0, 235.0)));
    assert_eq!(glottal.len(), 5);
    assert!(spans(TierId::Velopharyngeal).contains(&(
        "velopharyngeal closing".into(),
        325.0,
        430.0
    )));
    assert_eq!(m.tier(TierId::Consonantal), raw.tier(TierId::Consonantal));
}

#[test]
fn recorded_syllabary_reproduces_rule_route() {
    let inv = inv();
    let p = TimingProfile::default();
    for text in ["kam.flik", "?a.ha", "Spi:lt", "ma.na.la", "faI6"] {
        let u = parse_utterance(text, &inv).unwrap();
        let mut syl = Syllabary::default();
        syl.record_rule_route(&u, &inv, &p).unwrap();
        let syl = load_syllabary(&syl.to_toml(), &inv).unwrap();
        assert_eq!(
            build_score_lexicon(&u, &syl, &inv, &p).unwrap(),
            build_score_rule(&u, &inv, &p).unwrap(),
            "{text}"
        );
    }
}

#[test]
fn hybrid_route_uses_rules_for_unknown_syllables() {
    let inv = inv();
    let p = TimingProfile::default();
    let mut syl = Syllabary::default();
    syl.record_rule_route(&parse_utterance("kam", &inv).unwrap(), &inv, &p)
        .unwrap();
    let u = parse_utterance("kam.flik", &inv).unwrap();
    assert_eq!(
        build_score_lexicon(&u, &syl, &inv, &p).unwrap(),
        build_score_rule(&u, &inv, &p).unwrap()
    );
}

#[test]
fn sequential_and_parallel_sampling_agree() {
    let s = compose("kam.flik").unwrap();
    let n = inv().neutral_config();
    let a = sample_trajectories_with(&s, 0.5, &n, Execution::Sequential).unwrap();
    let b = sample_trajectories_with(&s, 0.5, &n, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    let batch = vec![s.clone(), compose("pa:i:").unwrap()];
    let seq = sample_batch(&batch, 5.0, &n, Execution::Sequential);
    let par = sample_batch(&batch, 5.0, &n, Execution::Parallel);
    assert_eq!(seq, par);
}

#[test]
fn unknown_phoneme_in_custom_inventory() {
    let mut u = parse_utterance("ka", &inv()).unwrap();
    u.syllables[0].onset = vec!["q".into()];
    assert!(matches!(
        build_score_rule(&u, &inv(), &TimingProfile::default()),
        Err(BuildError::Inventory(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composed_scores_are_valid_and_covered(text in arb_utterance()) {
        let s = compose(&text).unwrap();
        prop_assert!(validate_score(&s).is_empty(), "{:?}", validate_score(&s));
        prop_assert!(coverage_gaps(&s).is_empty());
        prop_assert_eq!(s.tier(TierId::Pulmonary).iter().filter(|g| !g.is_neutral).count(), 1);
    }

    #[test]
    fn raw_scores_are_valid(text in arb_utterance()) {
        let inv = inv();
        let u = parse_utterance(&text, &inv).unwrap();
        let raw = build_score_rule(&u, &inv, &TimingProfile::default()).unwrap();
        prop_assert!(validate_score(&raw).is_empty());
        prop_assert_eq!(raw.window.begin, 0.0);
        let last = raw.instances().map(|g| g.t_e).fold(0.0, f64::max);
        prop_assert_eq!(raw.window.end, last + 50.0);
    }

    #[test]
    fn post_processing_is_idempotent(text in arb_utterance()) {
        let inv = inv();
        let u = parse_utterance(&text, &inv).unwrap();
        let raw = build_score_rule(&u, &inv, &TimingProfile::default()).unwrap();
        let m = merge_adjacent(&raw, DEFAULT_GAP_THRESHOLD);
        prop_assert_eq!(&merge_adjacent(&m, DEFAULT_GAP_THRESHOLD), &m);
        let f = fill_neutral(&add_pulmonary(&m, &inv), &inv);
        prop_assert_eq!(&fill_neutral(&f, &inv), &f);
        prop_assert_eq!(&add_pulmonary(&f, &inv).tier(TierId::Pulmonary).len(), &f.tier(TierId::Pulmonary).len());
    }

    #[test]
    fn merging_never_adds_instances(text in arb_utterance(), gap in 0.0..100.0f64) {
        let inv = inv();
        let u = parse_utterance(&text, &inv).unwrap();
        let raw = build_score_rule(&u, &inv, &TimingProfile::default()).unwrap();
        let m = merge_adjacent(&raw, gap);
        for tier in TierId::ALL {
            prop_assert!(m.tier(tier).len() <= raw.tier(tier).len());
        }
        prop_assert!(validate_score(&m).is_empty());
    }

    #[test]
    fn json_round_trip(text in arb_utterance()) {
        let s = compose(&text).unwrap();
        prop_assert_eq!(read_score_json(&write_score_json(&s)).unwrap(), s);
    }

    #[test]
    fn trajectories_are_continuous(text in arb_utterance()) {
        let s = compose(&text).unwrap();
        let inv = inv();
        let ts = sample_trajectories(&s, 5.0, &inv.neutral_config()).unwrap();
        let min_flank = s
            .instances()
            .flat_map(|g| [g.tau_on, g.tau_off])
            .fold(f64::INFINITY, f64::min);
        for p in ControlParamId::ALL {
            let (lo, hi) = p.range();
            let bound = (hi - lo) * (5.0 / min_flank) * std::f64::consts::FRAC_PI_2;
            for w in ts.get(p).windows(2) {
                prop_assert!((w[1] - w[0]).abs() < bound, "{} jumps {} > {}", p, (w[1] - w[0]).abs(), bound);
            }
        }
    }

    #[test]
    fn csv_rows_match_samples(text in arb_utterance(), dt in 0.5..20.0f64) {
        let s = compose(&text).unwrap();
        let ts = sample_trajectories(&s, dt, &inv().neutral_config()).unwrap();
        let csv = write_traj_csv(&ts);
        prop_assert_eq!(csv.lines().count(), ts.len() + 1);
        let expected = ((s.window.end - s.window.begin) / dt * (1.0 + 1e-12)).floor() as usize + 1;
        prop_assert_eq!(ts.len(), expected);
    }
}
