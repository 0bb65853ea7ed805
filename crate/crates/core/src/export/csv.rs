use std::fmt::Write;

use crate::model::{ControlParamId, TrajectorySet};

pub const CSV_HEADER: &str = "t_ms,hei,pos,rou,clo_lab,clo_api,clo_dor,vel,opg,pres,lateral";

/// `%g`-style formatting with six significant digits.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..6).contains(&exp) {
        return format!(
            "{}e{}{:02}",
            trim(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        );
    }
    let decimals = (5 - exp) as usize;
    trim(&format!("{x:.decimals$}")).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One header row plus one row per sample.
pub fn write_traj_csv(ts: &TrajectorySet) -> String {
    let mut out = String::with_capacity(CSV_HEADER.len() + ts.len() * 80);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for i in 0..ts.len() {
        out.push_str(&format_g6(ts.time(i)));
        for p in ControlParamId::ALL {
            let v = ts.get(p).get(i).copied().unwrap_or(f64::NAN);
            write!(out, ",{}", format_g6(v)).expect("write to string");
        }
        writeln!(out, ",{}", ts.lateral_series[i].as_str()).expect("write to string");
    }
    out
}
