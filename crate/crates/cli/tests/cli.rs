use std::fs;
use std::process::{Command, Output};

use gesture_score::*;
use tempfile::TempDir;

fn gscore(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gscore"))
        .args(args)
        .env_remove("GSCORE_INVENTORY")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn score_file(dir: &TempDir, text: &str) -> String {
    let out = path(dir, "s.score.json");
    let res = gscore(&["score", text, "--out", &out]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    out
}

#[test]
fn score_matches_library_pipeline() {
    let dir = TempDir::new().unwrap();
    let file = score_file(&dir, "kam.flik");
    let inv = Inventory::german();
    let u = parse_utterance("kam.flik", &inv).unwrap();
    let expected = compose_score(
        &u,
        None,
        &inv,
        &TimingProfile::default(),
        DEFAULT_GAP_THRESHOLD,
    )
    .unwrap();
    assert_eq!(
        fs::read_to_string(&file).unwrap(),
        write_score_json(&expected)
    );
    let stderr = String::from_utf8_lossy(&gscore(&["score", "kam.flik"]).stderr).into_owned();
    assert!(stderr.contains("valid"), "{stderr}");
}

#[test]
fn score_then_traj_equals_in_process() {
    let dir = TempDir::new().unwrap();
    let file = score_file(&dir, "kam.flik");
    let out = gscore(&["traj", &file]);
    assert_eq!(code(&out), 0);
    let inv = Inventory::german();
    let s = read_score_json(&fs::read_to_string(&file).unwrap()).unwrap();
    let ts = sample_trajectories(&s, 5.0, &inv.neutral_config()).unwrap();
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv, write_traj_csv(&ts));
    assert_eq!(csv.lines().count(), 114);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let file = score_file(&dir, "kam.flik");
    for args in [
        vec!["score", "kam.flik"],
        vec!["traj", &file, "--dt", "1"],
        vec!["plot", &file],
        vec!["plot", &file, "--style", "fig3"],
    ] {
        let a = gscore(&args);
        let b = gscore(&args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn fig3_plot_of_pai() {
    let dir = TempDir::new().unwrap();
    let file = score_file(&dir, "pa:i:");
    let svg = path(&dir, "p.svg");
    assert_eq!(
        code(&gscore(&["plot", &file, "--style", "fig3", "--out", &svg])),
        0
    );
    let doc = fs::read_to_string(&svg).unwrap();
    assert_eq!(doc.matches("class=\"activation\"").count(), 3);
    assert_eq!(doc.matches("class=\"trajectory\"").count(), 4);
    let full = String::from_utf8(gscore(&["plot", &file]).stdout).unwrap();
    assert_eq!(full.matches("data-tier=").count(), 5);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&gscore(&["score", "kstra"])), 4);
    assert_eq!(code(&gscore(&["score", "kaka"])), 4);
    assert_eq!(code(&gscore(&["score", "kqa"])), 2);
    assert_eq!(code(&gscore(&["traj", "/no/such/file.score.json"])), 2);
    assert_eq!(code(&gscore(&["plot", "/no/such/file.score.json"])), 2);

    let file = score_file(&dir, "kam.flik");
    assert_eq!(code(&gscore(&["traj", &file, "--dt", "0"])), 2);
    assert_eq!(code(&gscore(&["traj", &file, "--dt", "-5"])), 2);

    let bad = path(&dir, "bad.score.json");
    fs::write(&bad, "{\"format\": \"gesture-score\"}").unwrap();
    assert_eq!(code(&gscore(&["traj", &bad])), 5);
    let doc = fs::read_to_string(&file)
        .unwrap()
        .replacen("\"onset\": 50.0", "\"onset\": 900.0", 1);
    fs::write(&bad, doc).unwrap();
    assert_eq!(code(&gscore(&["traj", &bad])), 5);

    assert_eq!(code(&gscore(&["score", "ka", "--route", "lexicon"])), 2);
}

#[test]
fn empty_score_gives_header_only_csv() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "e.score.json");
    fs::write(&file, write_score_json(&GestureScore::empty("empty"))).unwrap();
    let out = gscore(&["traj", &file]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

#[test]
fn inventory_commands() {
    let out = gscore(&["inventory", "check"]);
    assert_eq!(code(&out), 0);
    let list = String::from_utf8(gscore(&["inventory", "list"]).stdout).unwrap();
    let specs = list
        .lines()
        .skip(1)
        .take_while(|l| !l.starts_with('#'))
        .count();
    assert!(specs >= 20, "{specs} specs");
    for name in [
        "vocalic a-shaping",
        "vocalic i-shaping",
        "vocalic u-shaping",
        "labial closing",
        "apical closing",
        "dorsal closing",
        "lateral apical closing",
        "velopharyngeal opening",
        "velopharyngeal closing",
        "velopharyngeal tight closing",
        "glottal opening",
        "glottal closing",
    ] {
        assert!(
            list.lines().any(|l| l.starts_with(&format!("{name}\t"))),
            "{name}"
        );
    }
}

#[test]
fn corrupted_inventory_exits_3() {
    let dir = TempDir::new().unwrap();
    let inv = path(&dir, "bad.inv");
    fs::write(
        &inv,
        GERMAN_INVENTORY.replacen("hei = -0.80", "hei = -3.00", 1),
    )
    .unwrap();
    assert_eq!(
        code(&gscore(&["--inventory", &inv, "inventory", "check"])),
        3
    );
    let via_env = Command::new(env!("CARGO_BIN_EXE_gscore"))
        .args(["score", "ka"])
        .env("GSCORE_INVENTORY", &inv)
        .output()
        .unwrap();
    assert_eq!(code(&via_env), 3);
    assert_eq!(
        code(&gscore(&[
            "--inventory",
            "/no/such.inv",
            "inventory",
            "check"
        ])),
        2
    );
}

#[test]
fn lexicon_route_with_recorded_syllabary() {
    let dir = TempDir::new().unwrap();
    let inv = Inventory::german();
    let p = TimingProfile::default();
    let u = parse_utterance("kam.flik", &inv).unwrap();
    let mut syl = Syllabary::default();
    syl.record_rule_route(&u, &inv, &p).unwrap();
    let file = path(&dir, "syl.toml");
    fs::write(&file, syl.to_toml()).unwrap();

    let lexicon = gscore(&[
        "score",
        "kam.flik",
        "--route",
        "lexicon",
        "--syllabary",
        &file,
    ]);
    assert_eq!(code(&lexicon), 0);
    assert_eq!(lexicon.stdout, gscore(&["score", "kam.flik"]).stdout);

    fs::write(&file, "format = \"gesture-syllabary\"\nversion = 7\n").unwrap();
    let bad = gscore(&["score", "ka", "--route", "lexicon", "--syllabary", &file]);
    assert_eq!(code(&bad), 3);
}
