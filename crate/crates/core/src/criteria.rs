//! Gain criteria for finite-time anti-synchronization and the resulting
//! convergence certificate.
//!
//! For each neuron `j` the real-part gains must satisfy
//!
//! ```text
//! mu_bar_j  > -d_j + D_j + O_j + B_j
//! rho_bar_j > ( -d_j + D'_j + O'_j - mu_bar_j )^+
//! eta_bar_j >= sum_k |b_jk|^T Γ̄_k (1, 1)^T + 2 |H_j^R|
//! ```
//!
//! where `D_j` collects the self-coupling through `f_j` (sign-aware in
//! [`Mode::Theorem1`]), `O_j` the other neurons' `f` couplings and `B_j` the
//! delayed `g` couplings, all weighted by `(xi, phi)`. The primed terms use the
//! weights raised to `1 / (1 - beta)`. The imaginary-part gains follow the same
//! pattern with the row-swapped bound matrices. [`Mode::Lipschitz`] drops the
//! sign information and treats the self-coupling like every other edge.
//!
//! Given admissible gains, the decay rate `epsilon` and the drift `rho`
//! determine the guaranteed times
//!
//! ```text
//! T1 = max_l ( ln(max w^l * M(E1(0))) / epsilon + tau ),   T2 = T1 + 1 / (min w * rho * (1 - beta))
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::ControllerGains;
use crate::model::NetworkSpec;
use crate::monitors::{max_component, xi_inf_norm};
use crate::split_complex::{pos_part, Mat2, SplitComplex};

/// Margin a strict inequality must clear to count as satisfied.
pub const STRICT_MARGIN: f64 = 1e-9;
/// Multiplier applied to searched suprema so the reported value sits strictly inside.
pub const SAFETY_FACTOR: f64 = 0.999;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriteriaError {
    #[error("exponent beta = {0} must lie in (0, 1)")]
    BetaOutOfRange(f64),
    #[error("weight {which}[{index}] = {value} must be > 0")]
    NonPositiveWeight {
        which: &'static str,
        index: usize,
        value: f64,
    },
    #[error("weight vectors have lengths {xi}/{phi}, network has {n} neurons")]
    WeightLength { xi: usize, phi: usize, n: usize },
    #[error("activation f[{0}] has a negative mixing coefficient; the sign-aware criteria need nonnegative partials (use lipschitz mode)")]
    NonMonotoneActivation(usize),
    #[error("gains do not match the threshold report: {0}")]
    GainMismatch(String),
    #[error("no epsilon > 1e-12 satisfies the decay inequalities")]
    EpsilonInfeasible,
    #[error("rho bound for {family}[{index}] is {bound}; it must be positive")]
    RhoInfeasible {
        family: &'static str,
        index: usize,
        bound: f64,
    },
}

/// Positive weights `(xi_1..xi_n, phi_1..phi_n)` of the `{xi, inf}` norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights", into = "RawWeights")]
pub struct NormWeights {
    xi: Vec<f64>,
    phi: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    xi: Vec<f64>,
    phi: Vec<f64>,
}

impl TryFrom<RawWeights> for NormWeights {
    type Error = CriteriaError;
    fn try_from(raw: RawWeights) -> Result<Self, Self::Error> {
        NormWeights::new(raw.xi, raw.phi)
    }
}

impl From<NormWeights> for RawWeights {
    fn from(w: NormWeights) -> Self {
        RawWeights { xi: w.xi, phi: w.phi }
    }
}

impl NormWeights {
    pub fn new(xi: Vec<f64>, phi: Vec<f64>) -> Result<Self, CriteriaError> {
        for (which, v) in [("xi", &xi), ("phi", &phi)] {
            if let Some((index, &value)) = v.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
                return Err(CriteriaError::NonPositiveWeight { which, index, value });
            }
        }
        if xi.len() != phi.len() {
            return Err(CriteriaError::WeightLength {
                xi: xi.len(),
                phi: phi.len(),
                n: xi.len(),
            });
        }
        Ok(NormWeights { xi, phi })
    }

    pub fn ones(n: usize) -> Self {
        NormWeights {
            xi: vec![1.0; n],
            phi: vec![1.0; n],
        }
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn n(&self) -> usize {
        self.xi.len()
    }

    pub fn scaled(&self, c: f64) -> Self {
        NormWeights {
            xi: self.xi.iter().map(|x| x * c).collect(),
            phi: self.phi.iter().map(|x| x * c).collect(),
        }
    }

    /// `min { min xi, min phi }`
    pub fn min_all(&self) -> f64 {
        self.xi.iter().chain(&self.phi).copied().fold(f64::INFINITY, f64::min)
    }

    fn pair(&self, k: usize) -> [f64; 2] {
        [self.xi[k], self.phi[k]]
    }

    fn pair_pow(&self, k: usize, p: f64) -> [f64; 2] {
        [self.xi[k].powf(p), self.phi[k].powf(p)]
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Sign-aware self-coupling terms; needs monotone `f`.
    #[default]
    Theorem1,
    /// Plain Lipschitz bounds on `f`.
    Lipschitz,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "theorem1" => Ok(Mode::Theorem1),
            "lipschitz" => Ok(Mode::Lipschitz),
            other => Err(format!("unknown mode `{other}` (expected theorem1 or lipschitz)")),
        }
    }
}

/// Right-hand sides of the gain inequalities for one neuron.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeuronThresholds {
    pub mu_bar_min: f64,
    pub mu_tilde_min: f64,
    /// `rho_bar` must exceed `(rho_bar_base - mu_bar)^+`.
    pub rho_bar_base: f64,
    pub rho_tilde_base: f64,
    pub eta_bar_min: f64,
    pub eta_tilde_min: f64,
    /// Non-delayed part of the decay inequality, without `-d_j`.
    pub coupling_bar: f64,
    pub coupling_tilde: f64,
    /// Delayed part, multiplied by `e^{eps tau}` in the decay inequality.
    pub delayed_bar: f64,
    pub delayed_tilde: f64,
}

impl NeuronThresholds {
    pub fn rho_bar_min(&self, mu_bar: f64) -> f64 {
        pos_part(self.rho_bar_base - mu_bar)
    }

    pub fn rho_tilde_min(&self, mu_tilde: f64) -> f64 {
        pos_part(self.rho_tilde_base - mu_tilde)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub mode: Mode,
    pub beta: f64,
    pub neurons: Vec<NeuronThresholds>,
}

/// Signed slack of every inequality for one neuron; positive is satisfied
/// for `mu`/`rho`, nonnegative for `eta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeuronMargins {
    pub mu_bar: f64,
    pub mu_tilde: f64,
    pub rho_bar: f64,
    pub rho_tilde: f64,
    pub eta_bar: f64,
    pub eta_tilde: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainVerdict {
    pub admissible: bool,
    pub margins: Vec<NeuronMargins>,
    /// Human-readable names of the violated inequalities, e.g. `eta_bar[1]`.
    pub violations: Vec<String>,
}

fn eta_ok(margin: f64, threshold: f64) -> bool {
    // printed as a non-strict inequality; allow rounding in the threshold sum
    margin >= -1e-12 * threshold.abs().max(1.0)
}

impl ThresholdReport {
    pub fn verify(&self, gains: &ControllerGains) -> Result<GainVerdict, CriteriaError> {
        let n = self.neurons.len();
        gains
            .validate(n)
            .map_err(|e| CriteriaError::GainMismatch(e.to_string()))?;
        if gains.beta != self.beta {
            return Err(CriteriaError::GainMismatch(format!(
                "gains use beta = {}, thresholds were computed for {}",
                gains.beta, self.beta
            )));
        }
        let mut violations = Vec::new();
        let margins = self
            .neurons
            .iter()
            .enumerate()
            .map(|(j, t)| {
                let m = NeuronMargins {
                    mu_bar: gains.mu_bar[j] - t.mu_bar_min,
                    mu_tilde: gains.mu_tilde[j] - t.mu_tilde_min,
                    rho_bar: gains.rho_bar[j] - t.rho_bar_min(gains.mu_bar[j]),
                    rho_tilde: gains.rho_tilde[j] - t.rho_tilde_min(gains.mu_tilde[j]),
                    eta_bar: gains.eta_bar[j] - t.eta_bar_min,
                    eta_tilde: gains.eta_tilde[j] - t.eta_tilde_min,
                };
                for (name, margin) in [
                    ("mu_bar", m.mu_bar),
                    ("mu_tilde", m.mu_tilde),
                    ("rho_bar", m.rho_bar),
                    ("rho_tilde", m.rho_tilde),
                ] {
                    if margin <= STRICT_MARGIN {
                        violations.push(format!("{name}[{j}]"));
                    }
                }
                if !eta_ok(m.eta_bar, t.eta_bar_min) {
                    violations.push(format!("eta_bar[{j}]"));
                }
                if !eta_ok(m.eta_tilde, t.eta_tilde_min) {
                    violations.push(format!("eta_tilde[{j}]"));
                }
                m
            })
            .collect();
        Ok(GainVerdict {
            admissible: violations.is_empty(),
            margins,
            violations,
        })
    }
}

/// Per-neuron upper bounds on `rho*` (real family) and `rho⋆` (imaginary).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoBounds {
    pub bar_bounds: Vec<f64>,
    pub tilde_bounds: Vec<f64>,
    /// `min_j bar_bounds`, the supremum for `rho*`.
    pub rho_ast_sup: f64,
    /// `min_j tilde_bounds`, the supremum for `rho⋆`.
    pub rho_star_sup: f64,
    pub rho_ast: f64,
    pub rho_star: f64,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCertificate {
    pub weights: NormWeights,
    pub beta: f64,
    pub epsilon: f64,
    pub rho_ast: f64,
    pub rho_star: f64,
    pub rho: f64,
    /// `M(E1(0))`
    pub m_e1_0: f64,
    pub t1_r: f64,
    pub t1_i: f64,
    pub t1: f64,
    pub t2: f64,
}

/// Criteria evaluation for one network under fixed weights, exponent and mode.
#[derive(Clone, Copy, Debug)]
pub struct Criteria<'a> {
    net: &'a NetworkSpec,
    weights: &'a NormWeights,
    beta: f64,
    mode: Mode,
}

/// `|a_jk|^T M w`
fn weighted(a: SplitComplex, m: &Mat2, w: [f64; 2]) -> f64 {
    m.bilinear(a.abs_pair(), w)
}

fn dot(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[0] + u[1] * v[1]
}

impl<'a> Criteria<'a> {
    pub fn new(net: &'a NetworkSpec, weights: &'a NormWeights, beta: f64, mode: Mode) -> Result<Self, CriteriaError> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(CriteriaError::BetaOutOfRange(beta));
        }
        if weights.xi.len() != net.n() || weights.phi.len() != net.n() {
            return Err(CriteriaError::WeightLength {
                xi: weights.xi.len(),
                phi: weights.phi.len(),
                n: net.n(),
            });
        }
        if mode == Mode::Theorem1 {
            if let Some(k) = net.f().iter().position(|f| !f.is_monotone()) {
                return Err(CriteriaError::NonMonotoneActivation(k));
            }
        }
        Ok(Criteria {
            net,
            weights,
            beta,
            mode,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn neuron(&self, j: usize) -> NeuronThresholds {
        let net = self.net;
        let w = self.weights;
        let n = net.n();
        let d = net.d()[j];
        let (xi, phi) = (w.xi[j], w.phi[j]);
        let q = 1.0 / (1.0 - self.beta); // weights exponent in the rho terms
        let lam = &net.f_bounds()[j].bar.0;
        let (l_rr, l_ri, l_ir, l_ii) = (lam[0][0], lam[0][1], lam[1][0], lam[1][1]);
        let ajj = net.a().get(j, j);

        // delayed couplings, same in both modes
        let mut delayed_bar = 0.0;
        let mut delayed_tilde = 0.0;
        let mut eta_bar = 2.0 * net.h()[j].re.abs();
        let mut eta_tilde = 2.0 * net.h()[j].im.abs();
        for k in 0..n {
            let b = net.b().get(j, k);
            let gb = &net.g_bounds()[k];
            delayed_bar += weighted(b, &gb.bar, w.pair(k));
            delayed_tilde += weighted(b, &gb.tilde, w.pair(k));
            eta_bar += weighted(b, &gb.bar, [1.0, 1.0]);
            eta_tilde += weighted(b, &gb.tilde, [1.0, 1.0]);
        }
        delayed_bar /= xi;
        delayed_tilde /= phi;

        let others = |include_self: bool, tilde: bool, pow: f64| -> f64 {
            (0..n)
                .filter(|&k| include_self || k != j)
                .map(|k| {
                    let fb = &net.f_bounds()[k];
                    let m = if tilde { &fb.tilde } else { &fb.bar };
                    weighted(net.a().get(j, k), m, w.pair_pow(k, pow))
                })
                .sum()
        };

        let (coupling_bar, coupling_tilde, rho_bar_base, rho_tilde_base) = match self.mode {
            Mode::Theorem1 => {
                let abs = ajj.abs_pair();
                let sign_bar = dot([pos_part(ajj.re), pos_part(-ajj.im)], [l_rr, l_ir]);
                let sign_tilde = dot([pos_part(ajj.im), pos_part(ajj.re)], [l_ri, l_ii]);
                let cross_bar = dot(abs, [l_ri, l_ii]);
                let cross_tilde = dot([abs[1], abs[0]], [l_rr, l_ir]);

                let coupling_bar = sign_bar + (phi / xi) * cross_bar + others(false, false, 1.0) / xi;
                let coupling_tilde = (xi / phi) * cross_tilde + sign_tilde + others(false, true, 1.0) / phi;
                let rho_bar_base = -d
                    + sign_bar
                    + (xi / phi).powf(-q) * cross_bar
                    + xi.powf(-q) * others(false, false, q);
                let rho_tilde_base = -d
                    + sign_tilde
                    + (phi / xi).powf(-q) * cross_tilde
                    + phi.powf(-q) * others(false, true, q);
                (coupling_bar, coupling_tilde, rho_bar_base, rho_tilde_base)
            }
            Mode::Lipschitz => (
                others(true, false, 1.0) / xi,
                others(true, true, 1.0) / phi,
                -d + xi.powf(-q) * others(true, false, q),
                -d + phi.powf(-q) * others(true, true, q),
            ),
        };

        NeuronThresholds {
            mu_bar_min: -d + coupling_bar + delayed_bar,
            mu_tilde_min: -d + coupling_tilde + delayed_tilde,
            rho_bar_base,
            rho_tilde_base,
            eta_bar_min: eta_bar,
            eta_tilde_min: eta_tilde,
            coupling_bar,
            coupling_tilde,
            delayed_bar,
            delayed_tilde,
        }
    }

    pub fn thresholds(&self) -> ThresholdReport {
        ThresholdReport {
            mode: self.mode,
            beta: self.beta,
            neurons: (0..self.net.n()).map(|j| self.neuron(j)).collect(),
        }
    }

    pub fn verify(&self, gains: &ControllerGains) -> Result<GainVerdict, CriteriaError> {
        self.thresholds().verify(gains)
    }

    /// Largest left-hand side of the decay inequalities at `epsilon`; the
    /// inequalities hold iff this is negative.
    pub fn epsilon_lhs(&self, report: &ThresholdReport, gains: &ControllerGains, epsilon: f64) -> f64 {
        let growth = (epsilon * self.net.tau()).exp();
        report
            .neurons
            .iter()
            .enumerate()
            .flat_map(|(j, t)| {
                let d = self.net.d()[j];
                [
                    epsilon - d - gains.mu_bar[j] + t.coupling_bar + growth * t.delayed_bar,
                    epsilon - d - gains.mu_tilde[j] + t.coupling_tilde + growth * t.delayed_tilde,
                ]
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn epsilon_holds(&self, gains: &ControllerGains, epsilon: f64) -> bool {
        epsilon > 0.0 && self.epsilon_lhs(&self.thresholds(), gains, epsilon) < 0.0
    }

    /// Supremum of feasible `epsilon`, bisected to relative precision 1e-10.
    pub fn epsilon_sup(&self, gains: &ControllerGains) -> Result<f64, CriteriaError> {
        let report = self.thresholds();
        let holds = |eps: f64| self.epsilon_lhs(&report, gains, eps) < 0.0;
        let mut lo = 1e-12;
        if !holds(lo) {
            return Err(CriteriaError::EpsilonInfeasible);
        }
        // the left-hand side grows at least linearly, so a bracket exists
        let mut hi = 1.0;
        while holds(hi) {
            lo = hi;
            hi *= 2.0;
        }
        while hi - lo > 1e-10 * hi {
            let mid = 0.5 * (lo + hi);
            if holds(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    pub fn find_epsilon(&self, gains: &ControllerGains) -> Result<f64, CriteriaError> {
        Ok(SAFETY_FACTOR * self.epsilon_sup(gains)?)
    }

    /// Per-neuron bounds `rho* < xi_j^-1 (rho_bar_j - (base - mu_bar_j)^+)`
    /// and the imaginary counterpart with `phi_j`.
    pub fn rho_bounds(&self, gains: &ControllerGains) -> (Vec<f64>, Vec<f64>) {
        let report = self.thresholds();
        report
            .neurons
            .iter()
            .enumerate()
            .map(|(j, t)| {
                (
                    (gains.rho_bar[j] - t.rho_bar_min(gains.mu_bar[j])) / self.weights.xi[j],
                    (gains.rho_tilde[j] - t.rho_tilde_min(gains.mu_tilde[j])) / self.weights.phi[j],
                )
            })
            .unzip()
    }

    pub fn find_rho(&self, gains: &ControllerGains) -> Result<RhoBounds, CriteriaError> {
        let (bar_bounds, tilde_bounds) = self.rho_bounds(gains);
        for (family, bounds) in [("rho_bar", &bar_bounds), ("rho_tilde", &tilde_bounds)] {
            if let Some((index, &bound)) = bounds.iter().enumerate().find(|(_, b)| **b <= 0.0) {
                return Err(CriteriaError::RhoInfeasible { family, index, bound });
            }
        }
        let rho_ast_sup = bar_bounds.iter().copied().fold(f64::INFINITY, f64::min);
        let rho_star_sup = tilde_bounds.iter().copied().fold(f64::INFINITY, f64::min);
        let rho_ast = SAFETY_FACTOR * rho_ast_sup;
        let rho_star = SAFETY_FACTOR * rho_star_sup;
        Ok(RhoBounds {
            bar_bounds,
            tilde_bounds,
            rho_ast_sup,
            rho_star_sup,
            rho_ast,
            rho_star,
            rho: rho_ast.min(rho_star),
        })
    }

    /// Whether a given `rho` sits strictly below both bound families.
    pub fn rho_holds(&self, gains: &ControllerGains, rho: f64) -> bool {
        let (bar, tilde) = self.rho_bounds(gains);
        rho > 0.0 && bar.iter().chain(&tilde).all(|&b| rho < b)
    }

    /// `M(E1(0))` over the constant initial history, closed form.
    pub fn initial_monitor(&self) -> f64 {
        xi_inf_norm(self.weights, &self.initial_error())
    }

    /// `M(E1(0))` by sampling `sup_{-tau <= s <= 0} e^{eps s} ‖E1(s)‖` at
    /// `samples` points of the (constant) history.
    pub fn initial_monitor_sampled(&self, epsilon: f64, samples: usize) -> f64 {
        let e = self.initial_error();
        let tau = self.net.tau();
        let norm = xi_inf_norm(self.weights, &e);
        (0..samples)
            .map(|i| {
                let s = if samples > 1 { -tau + tau * i as f64 / (samples - 1) as f64 } else { 0.0 };
                (epsilon * s).exp() * norm
            })
            .fold(0.0, f64::max)
    }

    pub fn initial_error(&self) -> Vec<SplitComplex> {
        self.net
            .phi_init()
            .iter()
            .zip(self.net.psi_init())
            .map(|(&x, &y)| x + y)
            .collect()
    }

    /// Guaranteed times for the chosen `epsilon` and `rho* / rho⋆`.
    pub fn certificate_with(&self, epsilon: f64, rho_ast: f64, rho_star: f64) -> ConvergenceCertificate {
        let w = self.weights;
        let tau = self.net.tau();
        let m0 = self.initial_monitor();
        let sampled = self.initial_monitor_sampled(epsilon, 1000);
        debug_assert!((m0 - sampled).abs() <= 1e-12 * m0.max(1.0), "M(E1(0)) {m0} vs sampled {sampled}");

        let (t1_r, t1_i) = if max_component(&self.initial_error()) <= 1.0 {
            (0.0, 0.0)
        } else {
            let max_xi = w.xi.iter().copied().fold(0.0, f64::max);
            let max_phi = w.phi.iter().copied().fold(0.0, f64::max);
            (
                (max_xi * m0).ln() / epsilon + tau,
                (max_phi * m0).ln() / epsilon + tau,
            )
        };
        let t1 = t1_r.max(t1_i);
        let rho = rho_ast.min(rho_star);
        let t2 = 1.0 / (w.min_all() * rho * (1.0 - self.beta)) + t1;
        ConvergenceCertificate {
            weights: w.clone(),
            beta: self.beta,
            epsilon,
            rho_ast,
            rho_star,
            rho,
            m_e1_0: m0,
            t1_r,
            t1_i,
            t1,
            t2,
        }
    }

    pub fn certificate(&self, epsilon: f64, rho: f64) -> ConvergenceCertificate {
        self.certificate_with(epsilon, rho, rho)
    }

    /// Searches `epsilon` and `rho` and builds the certificate. Gains must be
    /// admissible.
    pub fn certify(&self, gains: &ControllerGains) -> Result<(ConvergenceCertificate, RhoBounds), CriteriaError> {
        let verdict = self.verify(gains)?;
        if !verdict.admissible {
            return Err(CriteriaError::GainMismatch(format!(
                "gains are not admissible: {}",
                verdict.violations.join(", ")
            )));
        }
        let epsilon = self.find_epsilon(gains)?;
        let rho = self.find_rho(gains)?;
        Ok((self.certificate_with(epsilon, rho.rho_ast, rho.rho_star), rho))
    }
}

/// Coordinate search over `(xi, phi)` that maximizes the smallest `mu`
/// margin of `gains`. A convenience only: any weight vector that makes the
/// gains admissible is equally valid.
pub fn search_weights(
    net: &NetworkSpec,
    gains: &ControllerGains,
    mode: Mode,
    start: &NormWeights,
    rounds: usize,
) -> Result<NormWeights, CriteriaError> {
    let score = |w: &NormWeights| -> Result<f64, CriteriaError> {
        let report = Criteria::new(net, w, gains.beta, mode)?.thresholds();
        Ok(report
            .neurons
            .iter()
            .enumerate()
            .map(|(j, t)| (gains.mu_bar[j] - t.mu_bar_min).min(gains.mu_tilde[j] - t.mu_tilde_min))
            .fold(f64::INFINITY, f64::min))
    };
    let n = net.n();
    let mut best = start.clone();
    let mut best_score = score(&best)?;
    let mut step: f64 = 1.5;
    for _ in 0..rounds {
        let mut improved = false;
        for idx in 0..2 * n {
            for factor in [step, 1.0 / step] {
                let mut cand = best.clone();
                let slot = if idx < n { &mut cand.xi[idx] } else { &mut cand.phi[idx - n] };
                *slot *= factor;
                let s = score(&cand)?;
                if s > best_score {
                    best = cand;
                    best_score = s;
                    improved = true;
                }
            }
        }
        if !improved {
            step = step.sqrt();
            if step < 1.0 + 1e-6 {
                break;
            }
        }
    }
    Ok(best)
}
