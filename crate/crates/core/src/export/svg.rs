use std::collections::BTreeMap;
use std::fmt::Write;

use super::ExportError;
use crate::activation::activation;
use crate::model::{
    sample_count, ControlParamId, GestureInstance, GestureScore, Ms, TierId, TrajectorySet,
};

const LEFT: f64 = 110.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 44.0;
const PAD: f64 = 6.0;

/// Layout and content switches for [`render_plot`].
#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    /// Dashed activation curve per instance.
    pub show_activations: bool,
    /// Solid trajectory curve per parameter.
    pub show_trajectories: bool,
    pub show_neutral: bool,
    /// Alternating panel background.
    pub tier_banding: bool,
    pub width: f64,
    pub panel_height: f64,
    /// Panels, top to bottom.
    pub tiers: Vec<TierId>,
    /// Plot only parameters targeted by a shown instance.
    pub targeted_params_only: bool,
    pub colors: BTreeMap<ControlParamId, String>,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle::figure2()
    }
}

impl PlotStyle {
    /// All five tiers with neutral instances and every parameter.
    pub fn figure2() -> Self {
        use ControlParamId::*;
        let colors = [
            (Hei, "#1f77b4"),
            (Pos, "#ff7f0e"),
            (Rou, "#2ca02c"),
            (CloLab, "#d62728"),
            (CloApi, "#9467bd"),
            (CloDor, "#8c564b"),
            (Vel, "#e377c2"),
            (Opg, "#17becf"),
            (Pres, "#7f7f7f"),
        ];
        PlotStyle {
            show_activations: true,
            show_trajectories: true,
            show_neutral: true,
            tier_banding: true,
            width: 900.0,
            panel_height: 120.0,
            tiers: TierId::ALL.to_vec(),
            targeted_params_only: false,
            colors: colors.iter().map(|(p, c)| (*p, c.to_string())).collect(),
        }
    }

    /// Vocalic and consonantal tiers, linguistic gestures only.
    pub fn figure3() -> Self {
        PlotStyle {
            show_neutral: false,
            tiers: vec![TierId::Vocalic, TierId::Consonantal],
            targeted_params_only: true,
            panel_height: 160.0,
            ..PlotStyle::figure2()
        }
    }

    fn color(&self, p: ControlParamId) -> &str {
        self.colors.get(&p).map_or("#000000", String::as_str)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_step(span: Ms) -> Ms {
    [10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0]
        .into_iter()
        .find(|s| span / s <= 10.0)
        .unwrap_or(span / 10.0)
}

struct Panel {
    top: f64,
    height: f64,
    lo: f64,
    hi: f64,
}

impl Panel {
    fn y(&self, v: f64) -> f64 {
        let inner = self.height - 2.0 * PAD;
        self.top + PAD + inner * (self.hi - v) / (self.hi - self.lo)
    }

    fn y_unit(&self, a: f64) -> f64 {
        let inner = self.height - 2.0 * PAD;
        self.top + PAD + inner * (1.0 - a)
    }
}

fn path(out: &mut String, points: impl Iterator<Item = (f64, f64)>, attrs: &str) {
    let mut d = String::new();
    for (i, (x, y)) in points.enumerate() {
        let _ = write!(d, "{}{x:.2},{y:.2}", if i == 0 { "M" } else { " L" });
    }
    if !d.is_empty() {
        let _ = writeln!(out, "<path d=\"{d}\" fill=\"none\" {attrs}/>");
    }
}

/// Renders score activations and trajectories as a standalone SVG.
pub fn render_plot(
    score: &GestureScore,
    ts: &TrajectorySet,
    style: &PlotStyle,
) -> Result<String, ExportError> {
    if !(style.width > LEFT + RIGHT && style.panel_height > 2.0 * PAD)
        || !style.width.is_finite()
        || !style.panel_height.is_finite()
    {
        return Err(ExportError::Style(format!(
            "dimensions {}x{} too small",
            style.width, style.panel_height
        )));
    }
    let window = score.window;
    let expected = if ts.dt > 0.0 {
        sample_count(window, ts.dt)
    } else {
        0
    };
    if ts.len() != expected || (!ts.is_empty() && ts.t0 != window.begin) {
        return Err(ExportError::InconsistentWindow(format!(
            "{} samples from t0 = {} with dt = {}, window [{}, {}] needs {}",
            ts.len(),
            ts.t0,
            ts.dt,
            window.begin,
            window.end,
            expected
        )));
    }

    let height = TOP + BOTTOM + style.panel_height * style.tiers.len() as f64;
    let plot_w = style.width - LEFT - RIGHT;
    let span = window.length();
    let x = |t: Ms| {
        if span > 0.0 {
            LEFT + plot_w * (t - window.begin) / span
        } else {
            LEFT
        }
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{height}\" viewBox=\"0 0 {w} {height}\" font-family=\"sans-serif\" font-size=\"11\">",
        w = style.width
    );
    let _ = writeln!(out, "<title>{}</title>", escape(&score.label));
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{height}\" fill=\"#ffffff\"/>",
        style.width
    );

    for (k, &tier) in style.tiers.iter().enumerate() {
        let shown: Vec<&GestureInstance> = score
            .tier(tier)
            .iter()
            .filter(|g| style.show_neutral || !g.is_neutral)
            .collect();
        let params: Vec<ControlParamId> = tier
            .params()
            .iter()
            .copied()
            .filter(|p| !style.targeted_params_only || shown.iter().any(|g| g.governs(*p)))
            .collect();
        let (lo, hi) = params
            .iter()
            .map(|p| p.range())
            .fold((0.0_f64, 1.0_f64), |(a, b), (l, h)| (a.min(l), b.max(h)));
        let panel = Panel {
            top: TOP + k as f64 * style.panel_height,
            height: style.panel_height,
            lo,
            hi,
        };

        let _ = writeln!(out, "<g class=\"tier\" data-tier=\"{tier}\">");
        if style.tier_banding {
            let fill = if k % 2 == 0 { "#f4f4f4" } else { "#ffffff" };
            let _ = writeln!(
                out,
                "<rect class=\"band\" x=\"{LEFT}\" y=\"{:.2}\" width=\"{plot_w:.2}\" height=\"{:.2}\" fill=\"{fill}\"/>",
                panel.top, panel.height
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"8\" y=\"{:.2}\">{tier}</text>",
            panel.top + panel.height / 2.0
        );
        for v in [lo, hi] {
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{v}</text>",
                LEFT - 4.0,
                panel.y(v) + 4.0
            );
        }
        let _ = writeln!(
            out,
            "<line class=\"axis\" x1=\"{LEFT}\" y1=\"{:.2}\" x2=\"{LEFT}\" y2=\"{:.2}\" stroke=\"#000000\"/>",
            panel.top,
            panel.top + panel.height
        );

        if style.show_activations {
            for g in &shown {
                let color = g
                    .targets
                    .keys()
                    .next()
                    .map_or("#000000", |p| style.color(*p));
                let attrs = if g.is_neutral {
                    format!(
                        "class=\"activation neutral\" data-spec=\"{}\" stroke=\"#999999\" stroke-width=\"1\" stroke-dasharray=\"2 3\"",
                        escape(&g.spec_name)
                    )
                } else {
                    format!(
                        "class=\"activation\" data-spec=\"{}\" stroke=\"{color}\" stroke-width=\"1\" stroke-dasharray=\"6 4\"",
                        escape(&g.spec_name)
                    )
                };
                let support = (0..ts.len()).filter(|&i| {
                    let t = ts.time(i);
                    t >= g.t_s - ts.dt && t <= g.t_e + ts.dt
                });
                path(
                    &mut out,
                    support.map(|i| {
                        let t = ts.time(i);
                        (x(t), panel.y_unit(activation(g, t)))
                    }),
                    &attrs,
                );
            }
        }
        if style.show_trajectories {
            for &p in &params {
                let attrs = format!(
                    "class=\"trajectory\" data-param=\"{p}\" stroke=\"{}\" stroke-width=\"1.5\"",
                    style.color(p)
                );
                let values = ts.get(p);
                path(
                    &mut out,
                    values
                        .iter()
                        .enumerate()
                        .map(|(i, v)| (x(ts.time(i)), panel.y(*v))),
                    &attrs,
                );
            }
        }
        let _ = writeln!(out, "</g>");
    }

    let axis_y = TOP + style.panel_height * style.tiers.len() as f64;
    let _ = writeln!(out, "<g class=\"time-axis\">");
    let _ = writeln!(
        out,
        "<line class=\"axis\" x1=\"{LEFT}\" y1=\"{axis_y:.2}\" x2=\"{:.2}\" y2=\"{axis_y:.2}\" stroke=\"#000000\"/>",
        LEFT + plot_w
    );
    if span > 0.0 {
        let step = tick_step(span);
        let mut t = (window.begin / step).ceil() * step;
        while t <= window.end + 1e-9 {
            let _ = writeln!(
                out,
                "<line x1=\"{0:.2}\" y1=\"{axis_y:.2}\" x2=\"{0:.2}\" y2=\"{1:.2}\" stroke=\"#000000\"/><text x=\"{0:.2}\" y=\"{2:.2}\" text-anchor=\"middle\">{t}</text>",
                x(t),
                axis_y + 4.0,
                axis_y + 16.0
            );
            t += step;
        }
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">t (ms)</text>",
        LEFT + plot_w / 2.0,
        axis_y + 34.0
    );
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    Ok(out)
}
