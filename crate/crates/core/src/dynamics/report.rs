use std::io::{self, Write};

use serde::Serialize;

use super::Trajectory;
use crate::classical::h_total;
use crate::error::{Error, Result};
use crate::format::sci17;
use crate::units::UnitSystem;

/// Largest deviations of the conserved quantities from their initial values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConservationReport {
    /// `max |H(t) − H(0)| / |H(0)|` (absolute when `H(0) = 0`).
    pub energy_drift: f64,
    pub momentum_drift: f64,
    pub angular_momentum_drift: f64,
}

pub fn conservation_report(traj: &Trajectory, u: &UnitSystem) -> Result<ConservationReport> {
    if traj.len() < 2 {
        return Err(Error::InvalidParameter("need at least two snapshots".into()));
    }
    let first = &traj.snapshots[0];
    let h0 = h_total(first, &traj.model, u)?;
    let p0 = first.total_momentum();
    let l0 = first.angular_momentum();
    let scale = if h0 == 0.0 { 1.0 } else { h0.abs() };
    let mut report = ConservationReport { energy_drift: 0.0, momentum_drift: 0.0, angular_momentum_drift: 0.0 };
    for snap in &traj.snapshots[1..] {
        let h = h_total(snap, &traj.model, u)?;
        report.energy_drift = report.energy_drift.max((h - h0).abs() / scale);
        report.momentum_drift = report.momentum_drift.max((snap.total_momentum() - p0).norm());
        report.angular_momentum_drift =
            report.angular_momentum_drift.max((snap.angular_momentum() - l0).norm());
    }
    Ok(report)
}

/// Per-time position divergence between two trajectories on one time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Divergence {
    pub times: Vec<f64>,
    /// Max over particles of `|r_a − r_b|`.
    pub distance: Vec<f64>,
    /// Running maximum of `distance`.
    pub envelope: Vec<f64>,
}

pub fn trajectory_divergence(a: &Trajectory, b: &Trajectory) -> Result<Divergence> {
    if a.times != b.times {
        return Err(Error::Alignment(format!(
            "{} vs {} samples or differing time stamps",
            a.len(),
            b.len()
        )));
    }
    if a.snapshots.first().map(|s| s.len()) != b.snapshots.first().map(|s| s.len()) {
        return Err(Error::Alignment("particle counts differ".into()));
    }
    let distance: Vec<f64> = a
        .snapshots
        .iter()
        .zip(&b.snapshots)
        .map(|(sa, sb)| {
            sa.particles()
                .iter()
                .zip(sb.particles())
                .map(|(pa, pb)| (pa.position - pb.position).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    let envelope = distance
        .iter()
        .scan(0.0f64, |m, &d| {
            *m = m.max(d);
            Some(*m)
        })
        .collect();
    Ok(Divergence { times: a.times.clone(), distance, envelope })
}

/// `t, r0x, r0y, r0z, p0x, p0y, p0z, r1x, ...`
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut out: W) -> io::Result<()> {
    let n = traj.snapshots.first().map_or(0, |s| s.len());
    let mut header = vec!["t".to_string()];
    for i in 0..n {
        for q in ["rx", "ry", "rz", "px", "py", "pz"] {
            header.push(format!("{}{i}{}", &q[..1], &q[1..]));
        }
    }
    writeln!(out, "{}", header.join(","))?;
    for (t, snap) in traj.times.iter().zip(&traj.snapshots) {
        let mut row = vec![sci17(*t)];
        row.extend(snap.to_state().into_iter().map(sci17));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_divergence_csv<W: Write>(div: &Divergence, mut out: W) -> io::Result<()> {
    writeln!(out, "t,divergence,envelope")?;
    for ((t, d), e) in div.times.iter().zip(&div.distance).zip(&div.envelope) {
        writeln!(out, "{},{},{}", sci17(*t), sci17(*d), sci17(*e))?;
    }
    Ok(())
}
