//! Piecewise cosine activation window of a gesture instance.

use std::f64::consts::PI;

use crate::model::{GestureInstance, Ms};

/// Activation level `a_g(t)` in `[0, 1]`.
///
/// Zero before onset and from offset on, a raised-cosine rise over
/// `[t_s, t_s + tau_on)`, a plateau of one, and a raised-cosine fall over
/// `[t_e - tau_off, t_e)`.
///
/// The flanks use `(1 - cos(pi x)) / 2 = (1 + sin(pi (x - 1/2))) / 2`, which
/// keeps flank midpoints at exactly one half in floating point.
pub fn activation(g: &GestureInstance, t: Ms) -> f64 {
    let rise_end = g.t_s + g.tau_on;
    let fall_start = g.t_e - g.tau_off;
    if t < g.t_s {
        0.0
    } else if t < rise_end {
        0.5 * (1.0 + (PI * ((t - g.t_s) / g.tau_on - 0.5)).sin())
    } else if t < fall_start {
        1.0
    } else if t < g.t_e {
        0.5 * (1.0 - (PI * ((t - fall_start) / g.tau_off - 0.5)).sin())
    } else {
        0.0
    }
}

/// Analytic time derivative of [`activation`], per ms.
pub fn activation_derivative(g: &GestureInstance, t: Ms) -> f64 {
    let rise_end = g.t_s + g.tau_on;
    let fall_start = g.t_e - g.tau_off;
    if t < g.t_s {
        0.0
    } else if t < rise_end {
        PI / (2.0 * g.tau_on) * (PI * (t - g.t_s) / g.tau_on).sin()
    } else if t < fall_start {
        0.0
    } else if t < g.t_e {
        -PI / (2.0 * g.tau_off) * (PI * (t - fall_start) / g.tau_off).sin()
    } else {
        0.0
    }
}
