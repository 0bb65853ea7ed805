//! `gscore`: build gesture scores, sample trajectories and plot them.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or parse error (and
//! missing input files), 3 inventory or syllabary error, 4 syllable
//! structure error, 5 invalid score file.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gesture_score::{
    compose_score, load_inventory, load_syllabary, parse_utterance, read_score_json, render_plot,
    sample_trajectories, validate_score, write_score_json, write_traj_csv, BlendError, BuildError,
    GestureScore, Inventory, InventoryError, PlotStyle, Syllabary, TimingProfile, TrajectorySet,
    DEFAULT_GAP_THRESHOLD,
};

#[derive(Parser)]
#[command(
    name = "gscore",
    version,
    about = "Gesture scores and articulatory trajectories"
)]
struct Cli {
    /// Gesture inventory (TOML); the built-in German inventory by default.
    #[arg(long, global = true, env = "GSCORE_INVENTORY")]
    inventory: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a gesture score from a SAMPA utterance such as `kam.flik`.
    Score {
        utterance: String,
        #[arg(long)]
        syllabary: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Route::Rule)]
        route: Route,
        /// Timing profile overrides (TOML).
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_GAP_THRESHOLD)]
        gap_threshold: f64,
        /// Output file; stdout when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Sample a score file into a trajectory table.
    Traj {
        score: PathBuf,
        #[arg(long, default_value_t = 5.0, value_parser = positive_ms)]
        dt: f64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Render a score file and its trajectories as SVG.
    Plot {
        score: PathBuf,
        #[arg(long, default_value_t = 5.0, value_parser = positive_ms)]
        dt: f64,
        #[arg(long, value_enum, default_value_t = Style::Full)]
        style: Style,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// List or check the gesture inventory.
    Inventory {
        #[arg(value_enum)]
        action: InventoryAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Rule,
    Lexicon,
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    /// All tiers with neutral gestures.
    Full,
    /// Vocalic and consonantal tiers only.
    Fig3,
}

#[derive(Clone, Copy, ValueEnum)]
enum InventoryAction {
    List,
    Check,
}

fn positive_ms(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be a positive number of ms, got {v}"))
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

type Outcome = Result<(), Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| fail(1, format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn inventory(path: Option<&Path>) -> Result<Inventory, Failure> {
    match path {
        None => Ok(Inventory::german()),
        Some(p) => {
            let doc = read_input(p)?;
            load_inventory(&doc).map_err(|e| fail(3, format!("{}: {e}", p.display())))
        }
    }
}

fn build_failure(e: BuildError) -> Failure {
    match e {
        BuildError::Inventory(e) => fail(3, e.to_string()),
        BuildError::Structure(m) => fail(4, m),
    }
}

fn load_score(path: &Path) -> Result<GestureScore, Failure> {
    let doc = read_input(path)?;
    read_score_json(&doc).map_err(|e| fail(5, format!("{}: {e}", path.display())))
}

fn sample(
    score: &GestureScore,
    dt: f64,
    inv: &Inventory,
    path: &Path,
) -> Result<TrajectorySet, Failure> {
    sample_trajectories(score, dt, &inv.neutral_config()).map_err(|e| match e {
        BlendError::NonPositiveDt(_) => fail(2, e.to_string()),
        BlendError::InvalidScore(v) => {
            let lines: Vec<String> = v.iter().map(|x| format!("  {x}")).collect();
            fail(
                5,
                format!("{}: invalid score\n{}", path.display(), lines.join("\n")),
            )
        }
        e => fail(5, format!("{}: {e}", path.display())),
    })
}

fn run(cli: Cli) -> Outcome {
    let inv_path = cli.inventory.as_deref();
    match cli.command {
        Command::Score {
            utterance,
            syllabary,
            route,
            profile,
            gap_threshold,
            out,
        } => {
            let inv = inventory(inv_path)?;
            let profile = match profile {
                None => TimingProfile::default(),
                Some(p) => TimingProfile::from_toml(&read_input(&p)?)
                    .map_err(|e| fail(2, format!("{}: {e}", p.display())))?,
            };
            let syl: Option<Syllabary> = match (route, syllabary) {
                (Route::Rule, _) => None,
                (Route::Lexicon, None) => return Err(fail(2, "--route lexicon needs --syllabary")),
                (Route::Lexicon, Some(p)) => Some(
                    load_syllabary(&read_input(&p)?, &inv)
                        .map_err(|e| fail(3, format!("{}: {e}", p.display())))?,
                ),
            };
            let u = parse_utterance(&utterance, &inv).map_err(|e| {
                fail(
                    if e.is_structural() { 4 } else { 2 },
                    format!("`{utterance}`: {e}"),
                )
            })?;
            let score = compose_score(&u, syl.as_ref(), &inv, &profile, gap_threshold)
                .map_err(build_failure)?;
            emit(out.as_deref(), &write_score_json(&score))?;
            let violations = validate_score(&score);
            eprintln!(
                "{}: {} syllables, {} gestures, window [{}, {}] ms, {}",
                score.label,
                u.syllables.len(),
                score.instances().count(),
                score.window.begin,
                score.window.end,
                if violations.is_empty() {
                    "valid".to_string()
                } else {
                    format!("{} violations", violations.len())
                }
            );
            Ok(())
        }
        Command::Traj { score, dt, out } => {
            let inv = inventory(inv_path)?;
            let s = load_score(&score)?;
            let ts = sample(&s, dt, &inv, &score)?;
            emit(out.as_deref(), &write_traj_csv(&ts))
        }
        Command::Plot {
            score,
            dt,
            style,
            out,
        } => {
            let inv = inventory(inv_path)?;
            let s = load_score(&score)?;
            let ts = sample(&s, dt, &inv, &score)?;
            let style = match style {
                Style::Full => PlotStyle::figure2(),
                Style::Fig3 => PlotStyle::figure3(),
            };
            let svg = render_plot(&s, &ts, &style).map_err(|e| fail(5, e.to_string()))?;
            emit(out.as_deref(), &svg)
        }
        Command::Inventory { action } => {
            let inv = inventory(inv_path)?;
            match action {
                InventoryAction::Check => {
                    let missing: Vec<String> = inv
                        .symbols()
                        .filter_map(|s| match inv.gestures_for_phoneme(s) {
                            Ok(_) => None,
                            Err(InventoryError::UnknownSpec { name, .. }) => Some(name),
                            Err(e) => Some(e.to_string()),
                        })
                        .collect();
                    if !missing.is_empty() {
                        return Err(fail(3, missing.join("\n")));
                    }
                    println!(
                        "ok: {} gestures, {} phonemes",
                        inv.specs().len(),
                        inv.phoneme_map().len()
                    );
                    Ok(())
                }
                InventoryAction::List => {
                    let mut text = String::from("# gestures\n");
                    for spec in inv.specs() {
                        let targets: Vec<String> = spec
                            .targets
                            .iter()
                            .map(|(p, v)| format!("{p}={v}"))
                            .collect();
                        text.push_str(&format!(
                            "{}\t{}\t{}\t{} ms\trapidity {}\n",
                            spec.name,
                            spec.tier,
                            targets.join(" "),
                            spec.mean_duration,
                            spec.rapidity
                        ));
                    }
                    text.push_str("# phonemes\n");
                    for (symbol, gestures) in inv.phoneme_map() {
                        text.push_str(&format!("{symbol}\t{}\n", gestures.join(", ")));
                    }
                    emit(None, &text)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("gscore: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
