use std::io::Write;

use serde::Serialize;

use crate::controller::ControllerGains;
use crate::criteria::{ConvergenceCertificate, Criteria, Mode};
use crate::dde_sim::{simulate, MonitorParams, SimError, Trajectory};

use super::report::{compare_reference, CertificateSection, SuppliedConstants, VerifyReport};
use super::{CliError, ExitStatus, Scenario};

/// Monitor constants used when neither the scenario nor a certificate
/// supplies them.
pub const DEFAULT_EPSILON: f64 = 0.25;
pub const DEFAULT_RHO: f64 = 0.4;
pub const DEFAULT_BETA: f64 = 0.5;

fn scenario_beta(s: &Scenario) -> f64 {
    s.gains
        .as_ref()
        .map(|g| g.beta)
        .or(s.monitor.beta)
        .unwrap_or(DEFAULT_BETA)
}

fn build_report(
    s: &Scenario,
    mode: Mode,
    epsilon: Option<f64>,
    rho: Option<f64>,
) -> Result<VerifyReport, CliError> {
    let beta = scenario_beta(s);
    let crit = Criteria::new(&s.network, &s.weights, beta, mode)?;
    let report = crit.thresholds();
    let gains = s.gains.as_ref();
    let verdict = gains.map(|g| report.verify(g)).transpose()?;
    let admissible = verdict.as_ref().is_some_and(|v| v.admissible);
    let mut notes = Vec::new();

    let certificate = match gains {
        Some(g) if admissible => {
            let epsilon_sup = match crit.epsilon_sup(g) {
                Ok(v) => Some(v),
                Err(e) => {
                    notes.push(e.to_string());
                    None
                }
            };
            let rho_bounds = match crit.find_rho(g) {
                Ok(b) => Some(b),
                Err(e) => {
                    notes.push(e.to_string());
                    None
                }
            };
            let eps = epsilon.or(epsilon_sup.map(|v| v * crate::criteria::SAFETY_FACTOR));
            let rhos = rho
                .map(|r| (r, r))
                .or(rho_bounds.as_ref().map(|b| (b.rho_ast, b.rho_star)));
            match (eps, rhos) {
                (Some(eps), Some((ra, rs))) => Some(CertificateSection {
                    source: if epsilon.is_some() || rho.is_some() { "supplied" } else { "searched" }.into(),
                    epsilon_sup,
                    rho_bounds,
                    certificate: crit.certificate_with(eps, ra, rs),
                }),
                _ => None,
            }
        }
        _ => match (epsilon, rho) {
            (Some(eps), Some(r)) => Some(CertificateSection {
                source: "supplied".into(),
                epsilon_sup: None,
                rho_bounds: None,
                certificate: crit.certificate(eps, r),
            }),
            _ => None,
        },
    };

    let supplied = (epsilon.is_some() || rho.is_some()).then(|| {
        let (bar, tilde) = gains.map(|g| crit.rho_bounds(g)).unwrap_or_default();
        SuppliedConstants {
            epsilon,
            epsilon_lhs: epsilon.and_then(|e| gains.map(|g| crit.epsilon_lhs(&report, g, e))),
            epsilon_feasible: epsilon.and_then(|e| gains.map(|g| crit.epsilon_holds(g, e))),
            rho,
            rho_bar_bounds: bar,
            rho_tilde_bounds: tilde,
            rho_feasible: rho.and_then(|r| gains.map(|g| crit.rho_holds(g, r))),
        }
    });

    let reference = s
        .reference
        .as_ref()
        .map(|r| compare_reference(r, &report.neurons, certificate.as_ref().map(|c| &c.certificate)))
        .unwrap_or_default();

    Ok(VerifyReport {
        scenario: s.name.clone(),
        mode,
        beta,
        weights: s.weights.clone(),
        thresholds: report.neurons,
        verdict,
        admissible,
        certificate,
        supplied,
        reference,
        notes,
    })
}

/// Thresholds, margins, verdict and (when admissible) a certificate.
/// Exit status 0 when the gains are admissible, 1 otherwise.
pub fn run_verify(s: &Scenario, mode: Option<Mode>) -> Result<(VerifyReport, ExitStatus), CliError> {
    let report = build_report(s, mode.unwrap_or(s.mode), None, None)?;
    let status = if report.admissible { ExitStatus::Success } else { ExitStatus::Inadmissible };
    Ok((report, status))
}

/// Like [`run_verify`] but with user-supplied `epsilon` and/or `rho`; exit
/// status 0 only when the gains are admissible and every supplied constant
/// is feasible.
pub fn run_bounds(
    s: &Scenario,
    mode: Option<Mode>,
    epsilon: Option<f64>,
    rho: Option<f64>,
) -> Result<(VerifyReport, ExitStatus), CliError> {
    for (name, v) in [("epsilon", epsilon), ("rho", rho)] {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Usage(format!("--{name} must be > 0, got {v}")));
            }
        }
    }
    let report = build_report(s, mode.unwrap_or(s.mode), epsilon, rho)?;
    let feasible = report.supplied.as_ref().is_none_or(|c| {
        c.epsilon_feasible.unwrap_or(true) && c.rho_feasible.unwrap_or(true)
    });
    let status = if report.admissible && feasible { ExitStatus::Success } else { ExitStatus::Inadmissible };
    Ok((report, status))
}

fn admissible_certificate(s: &Scenario) -> Option<ConvergenceCertificate> {
    let g = s.gains.as_ref()?;
    let crit = Criteria::new(&s.network, &s.weights, g.beta, s.mode).ok()?;
    crit.certify(g).ok().map(|(c, _)| c)
}

/// Monitor constants: the scenario's `[monitor]` table, then the
/// certificate of admissible gains, then the defaults.
pub fn monitor_params(s: &Scenario) -> MonitorParams {
    let cert = if s.monitor.epsilon.is_none() || s.monitor.rho.is_none() {
        admissible_certificate(s)
    } else {
        None
    };
    MonitorParams {
        weights: s.weights.clone(),
        epsilon: s.monitor.epsilon.or(cert.as_ref().map(|c| c.epsilon)).unwrap_or(DEFAULT_EPSILON),
        rho: s.monitor.rho.or(cert.as_ref().map(|c| c.rho)).unwrap_or(DEFAULT_RHO),
        beta: s.monitor.beta.unwrap_or_else(|| scenario_beta(s)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulateSummary {
    pub samples: usize,
    pub settling_time: Option<f64>,
    pub chattering_amplitude: Option<f64>,
    pub phase_two_start: Option<f64>,
    pub final_max_error: f64,
    /// Certified bounds, when the gains are admissible.
    pub t1: Option<f64>,
    pub t2: Option<f64>,
}

impl SimulateSummary {
    pub fn describe(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
        let mut out = format!(
            "{} samples, settling time {}, chattering amplitude {}, final max|e| {:.3e}",
            self.samples,
            fmt(self.settling_time),
            self.chattering_amplitude.map_or("-".into(), |v| format!("{v:.3e}")),
            self.final_max_error
        );
        if let Some(t2) = self.t2 {
            let verdict = match self.settling_time {
                Some(ts) if ts <= t2 => "within",
                _ => "NOT within",
            };
            out.push_str(&format!("; {verdict} the certified bound T2 = {t2:.4}"));
        }
        out
    }
}

/// Simulates the scenario and writes the trajectory CSV to `out`.
pub fn run_simulate<W: Write>(s: &Scenario, out: W) -> Result<(Trajectory, SimulateSummary), CliError> {
    let monitors = monitor_params(s);
    let traj = simulate(&s.network, s.gains.as_ref(), &monitors, &s.sim)?;
    super::write_trajectory_csv(&traj, out)?;
    let cert = admissible_certificate(s);
    let summary = SimulateSummary {
        samples: traj.len(),
        settling_time: traj.settling_time,
        chattering_amplitude: traj.chattering_amplitude,
        phase_two_start: traj.phase_two_start,
        final_max_error: traj.len().checked_sub(1).map_or(0.0, |i| traj.max_error(i)),
        t1: cert.as_ref().map(|c| c.t1),
        t2: cert.as_ref().map(|c| c.t2),
    };
    Ok((traj, summary))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub scale: f64,
    pub admissible: bool,
    pub settling_time: Option<f64>,
    pub chattering_amplitude: Option<f64>,
    pub final_max_error: Option<f64>,
    /// `ok` or `diverged at t = ...`.
    pub status: String,
}

/// Scales `mu` and `rho` of the scenario's gains by each factor, with `eta`
/// pinned at its minimum, and simulates every point. Rows come back in the
/// order of `scales`.
pub fn run_sweep(s: &Scenario, scales: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    let base = s
        .gains
        .as_ref()
        .ok_or_else(|| CliError::Usage("sweep needs a [gains] table".into()))?;
    if let Some(bad) = scales.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
        return Err(CliError::Usage(format!("scales must be finite and >= 0, got {bad}")));
    }
    let crit = Criteria::new(&s.network, &s.weights, base.beta, s.mode)?;
    let report = crit.thresholds();
    let pinned = |scale: f64| -> ControllerGains {
        let mut g = base.scale_mu_rho(scale);
        g.eta_bar = report.neurons.iter().map(|t| t.eta_bar_min).collect();
        g.eta_tilde = report.neurons.iter().map(|t| t.eta_tilde_min).collect();
        g
    };
    let monitors = monitor_params(s);

    let point = |scale: f64| -> Result<SweepRow, CliError> {
        let gains = pinned(scale);
        let admissible = report.verify(&gains)?.admissible;
        Ok(match simulate(&s.network, Some(&gains), &monitors, &s.sim) {
            Ok(traj) => SweepRow {
                scale,
                admissible,
                settling_time: traj.settling_time,
                chattering_amplitude: traj.chattering_amplitude,
                final_max_error: traj.len().checked_sub(1).map(|i| traj.max_error(i)),
                status: "ok".into(),
            },
            Err(SimError::Divergence { t }) => SweepRow {
                scale,
                admissible,
                settling_time: None,
                chattering_amplitude: None,
                final_max_error: None,
                status: format!("diverged at t = {t}"),
            },
            Err(e) => return Err(e.into()),
        })
    };

    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(scales.len().max(1));
    let chunk = scales.len().div_ceil(workers).max(1);
    let results: Vec<Result<Vec<SweepRow>, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = scales
            .chunks(chunk)
            .map(|part| scope.spawn(|| part.iter().map(|&c| point(c)).collect::<Result<Vec<_>, _>>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut rows = Vec::with_capacity(scales.len());
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}
