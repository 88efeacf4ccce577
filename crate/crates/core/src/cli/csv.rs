use std::io::{self, Write};

use crate::dde_sim::Trajectory;

use super::SweepRow;

/// Scientific notation with 17 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(format_value).unwrap_or_default()
}

/// Columns: `t`, then per neuron `x_j_re, x_j_im, y_j_re, y_j_im, e_j_re,
/// e_j_im`, then `norm_e1, monitor_m, norm_e2, monitor_v, settled`. The E2
/// columns are empty before the second phase starts.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut w: W) -> io::Result<()> {
    let mut header = vec!["t".to_string()];
    for j in 0..traj.n {
        for series in ["x", "y", "e"] {
            header.push(format!("{series}_{j}_re"));
            header.push(format!("{series}_{j}_im"));
        }
    }
    header.extend(["norm_e1", "monitor_m", "norm_e2", "monitor_v", "settled"].map(String::from));
    writeln!(w, "{}", header.join(","))?;

    let mut row = Vec::with_capacity(header.len());
    for i in 0..traj.len() {
        row.clear();
        row.push(format_value(traj.times[i]));
        for j in 0..traj.n {
            for v in [traj.x[i][j], traj.y[i][j], traj.e[i][j]] {
                row.push(format_value(v.re));
                row.push(format_value(v.im));
            }
        }
        row.push(format_value(traj.norm_e1[i]));
        row.push(format_value(traj.monitor_m[i]));
        row.push(opt(traj.norm_e2[i]));
        row.push(opt(traj.monitor_v[i]));
        row.push(if traj.is_settled_at(i) { "1" } else { "0" }.to_string());
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> io::Result<()> {
    writeln!(
        w,
        "scale,admissible,settled,settling_time,chattering_amplitude,final_max_error,status"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            format_value(r.scale),
            r.admissible,
            r.settling_time.is_some(),
            opt(r.settling_time),
            opt(r.chattering_amplitude),
            opt(r.final_max_error),
            r.status
        )?;
    }
    w.flush()
}
