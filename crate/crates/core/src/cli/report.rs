use serde::Serialize;

use crate::criteria::{ConvergenceCertificate, GainVerdict, Mode, NeuronThresholds, NormWeights, RhoBounds};

use super::ReferenceValues;

/// JSON document written by `verify` and `bounds`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub scenario: String,
    pub mode: Mode,
    pub beta: f64,
    pub weights: NormWeights,
    pub thresholds: Vec<NeuronThresholds>,
    /// `None` for an uncontrolled scenario.
    pub verdict: Option<GainVerdict>,
    pub admissible: bool,
    pub certificate: Option<CertificateSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub supplied: Option<SuppliedConstants>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reference: Vec<ReferenceRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateSection {
    /// `searched` or `supplied`.
    pub source: String,
    pub epsilon_sup: Option<f64>,
    pub rho_bounds: Option<RhoBounds>,
    #[serde(flatten)]
    pub certificate: ConvergenceCertificate,
}

/// Feasibility of user-supplied `epsilon` / `rho`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuppliedConstants {
    pub epsilon: Option<f64>,
    /// Largest left-hand side of the `epsilon` inequality over all neurons.
    pub epsilon_lhs: Option<f64>,
    pub epsilon_feasible: Option<bool>,
    pub rho: Option<f64>,
    pub rho_bar_bounds: Vec<f64>,
    pub rho_tilde_bounds: Vec<f64>,
    pub rho_feasible: Option<bool>,
}

/// One computed quantity next to its published value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferenceRow {
    pub quantity: String,
    pub computed: f64,
    pub published: f64,
    pub difference: f64,
    pub matches: bool,
}

pub(super) fn compare_reference(
    reference: &ReferenceValues,
    thresholds: &[NeuronThresholds],
    certificate: Option<&ConvergenceCertificate>,
) -> Vec<ReferenceRow> {
    let tol = reference.tolerance;
    let mut rows = Vec::new();
    let mut push = |quantity: String, computed: f64, published: f64| {
        let difference = computed - published;
        rows.push(ReferenceRow {
            quantity,
            computed,
            published,
            difference,
            matches: difference.abs() <= tol * published.abs().max(1.0),
        });
    };
    type Column<'a> = (&'a str, &'a Option<Vec<f64>>, fn(&NeuronThresholds) -> f64);
    let vectors: [Column; 6] = [
        ("mu_bar_min", &reference.mu_bar_min, |t| t.mu_bar_min),
        ("mu_tilde_min", &reference.mu_tilde_min, |t| t.mu_tilde_min),
        ("rho_bar_base", &reference.rho_bar_base, |t| t.rho_bar_base),
        ("rho_tilde_base", &reference.rho_tilde_base, |t| t.rho_tilde_base),
        ("eta_bar_min", &reference.eta_bar_min, |t| t.eta_bar_min),
        ("eta_tilde_min", &reference.eta_tilde_min, |t| t.eta_tilde_min),
    ];
    for (name, published, get) in vectors {
        if let Some(values) = published {
            for (j, (&p, t)) in values.iter().zip(thresholds).enumerate() {
                push(format!("{name}[{j}]"), get(t), p);
            }
        }
    }
    if let Some(cert) = certificate {
        if let Some(t1) = reference.t1 {
            push("t1".into(), cert.t1, t1);
        }
        if let Some(t2) = reference.t2 {
            push("t2".into(), cert.t2, t2);
        }
    }
    rows
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Short human-readable summary for the terminal.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{}: {} mode, beta = {}\n",
            self.scenario,
            match self.mode {
                Mode::Theorem1 => "theorem1",
                Mode::Lipschitz => "lipschitz",
            },
            self.beta
        );
        for (j, t) in self.thresholds.iter().enumerate() {
            out.push_str(&format!(
                "  neuron {j}: mu_bar > {:.6}, mu_tilde > {:.6}, eta_bar >= {:.6}, eta_tilde >= {:.6}\n",
                t.mu_bar_min, t.mu_tilde_min, t.eta_bar_min, t.eta_tilde_min
            ));
        }
        match &self.verdict {
            None => out.push_str("  no gains supplied\n"),
            Some(v) if v.admissible => out.push_str("  gains admissible\n"),
            Some(v) => out.push_str(&format!("  gains NOT admissible: {}\n", v.violations.join(", "))),
        }
        if let Some(c) = &self.certificate {
            out.push_str(&format!(
                "  epsilon = {:.6}, rho = {:.6}, M(E1(0)) = {:.6}, T1 = {:.6}, T2 = {:.6}\n",
                c.certificate.epsilon, c.certificate.rho, c.certificate.m_e1_0, c.certificate.t1, c.certificate.t2
            ));
        }
        if let Some(s) = &self.supplied {
            if let (Some(e), Some(ok)) = (s.epsilon, s.epsilon_feasible) {
                out.push_str(&format!("  epsilon = {e}: {}\n", if ok { "feasible" } else { "infeasible" }));
            }
            if let (Some(r), Some(ok)) = (s.rho, s.rho_feasible) {
                out.push_str(&format!("  rho = {r}: {}\n", if ok { "feasible" } else { "infeasible" }));
            }
        }
        for row in &self.reference {
            if !row.matches {
                out.push_str(&format!(
                    "  MISMATCH {}: computed {:.6}, published {:.6}\n",
                    row.quantity, row.computed, row.published
                ));
            }
        }
        for note in &self.notes {
            out.push_str(&format!("  note: {note}\n"));
        }
        out
    }
}
