//! CSV export of trajectories.

use std::io::Write;

use super::trajectory::Trajectory;
use super::DynamicsError;
use crate::heisenmodel::{first_integrals_flat, SystemKind, SystemSpec};

pub fn state_labels(kind: SystemKind) -> Vec<&'static str> {
    match kind {
        SystemKind::OneBody => vec!["x", "y", "z", "px", "py", "pz"],
        SystemKind::TwoBody => {
            vec!["x1", "y1", "z1", "x2", "y2", "z2", "px1", "py1", "pz1", "px2", "py2", "pz2"]
        }
    }
}

/// Writes `t`, the state, `H`, `p_θ` (or `I₁..I₄`) and `J`, one row per
/// sample, flushing after every row.
pub fn write_trajectory_csv<W: Write>(spec: &SystemSpec, traj: &Trajectory, out: W) -> Result<(), DynamicsError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t"];
    header.extend(state_labels(traj.kind));
    header.push("H");
    match traj.kind {
        SystemKind::OneBody => header.push("p_theta"),
        SystemKind::TwoBody => header.extend(["I1", "I2", "I3", "I4"]),
    }
    header.push("J");
    w.write_record(&header)?;
    w.flush()?;
    for (t, y) in traj.times.iter().zip(&traj.states) {
        let fi = first_integrals_flat(spec, y)?;
        let mut row = vec![*t];
        row.extend(y);
        row.push(fi.h);
        row.extend(fi.p_theta);
        row.extend(fi.i.into_iter().flatten());
        row.push(fi.j);
        w.write_record(row.iter().map(|v| v.to_string()))?;
        w.flush()?;
    }
    Ok(())
}
