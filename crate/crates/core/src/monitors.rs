//! Weighted infinity norms and the sliding-window monitors built on them.

use std::collections::VecDeque;

use crate::criteria::NormWeights;
use crate::split_complex::SplitComplex;

/// `‖E1‖ = max( max_j |e_j^R| / xi_j, max_j |e_j^I| / phi_j )`
pub fn xi_inf_norm(weights: &NormWeights, e: &[SplitComplex]) -> f64 {
    e.iter()
        .zip(weights.xi().iter().zip(weights.phi()))
        .map(|(ej, (&xi, &phi))| (ej.re.abs() / xi).max(ej.im.abs() / phi))
        .fold(0.0, f64::max)
}

/// `‖E2‖`, with components `|e|^(1-beta) / (1-beta)` under the same weights.
pub fn e2_norm(weights: &NormWeights, e: &[SplitComplex], beta: f64) -> f64 {
    let p = 1.0 - beta;
    e.iter()
        .zip(weights.xi().iter().zip(weights.phi()))
        .map(|(ej, (&xi, &phi))| {
            let r = ej.re.abs().powf(p) / (p * xi);
            let i = ej.im.abs().powf(p) / (p * phi);
            r.max(i)
        })
        .fold(0.0, f64::max)
}

/// Plain `max |e_j^l|` over every component.
pub fn max_component(e: &[SplitComplex]) -> f64 {
    e.iter().map(SplitComplex::max_abs_component).fold(0.0, f64::max)
}

/// Maximum over a sliding window of `(time, value)` samples pushed in time
/// order. Monotone deque; amortized O(1) per sample.
#[derive(Clone, Debug, Default)]
pub struct SlidingMax {
    window: VecDeque<(f64, f64)>,
}

impl SlidingMax {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, value: f64) {
        while let Some(&(_, back)) = self.window.back() {
            if back <= value {
                self.window.pop_back();
            } else {
                break;
            }
        }
        self.window.push_back((t, value));
    }

    /// Drops samples strictly older than `t_min`.
    pub fn expire(&mut self, t_min: f64) {
        while let Some(&(t, _)) = self.window.front() {
            if t < t_min {
                self.window.pop_front();
            } else {
                break;
            }
        }
    }

    pub fn max(&self) -> Option<f64> {
        self.window.front().map(|&(_, v)| v)
    }

    pub fn clear(&mut self) {
        self.window.clear();
    }
}

/// `M(E1(t)) = sup_{t - tau <= s <= t} e^{eps s} ‖E1(s)‖`, kept in log space
/// so long horizons do not overflow before the final exponential.
#[derive(Clone, Debug)]
pub struct ExpWeightedMonitor {
    epsilon: f64,
    tau: f64,
    window: SlidingMax,
}

impl ExpWeightedMonitor {
    pub fn new(epsilon: f64, tau: f64) -> Self {
        ExpWeightedMonitor {
            epsilon,
            tau,
            window: SlidingMax::new(),
        }
    }

    pub fn push(&mut self, t: f64, norm: f64) {
        let log_value = if norm > 0.0 { self.epsilon * t + norm.ln() } else { f64::NEG_INFINITY };
        self.window.push(t, log_value);
        self.window.expire(t - self.tau - 1e-12 * self.tau.max(1.0));
    }

    pub fn value(&self) -> f64 {
        self.window.max().map_or(0.0, f64::exp)
    }
}

/// `V(E2(t)) = sup_{t - tau <= s <= t} (‖E2(s)‖ + rho s)`.
#[derive(Clone, Debug)]
pub struct DriftMonitor {
    rho: f64,
    tau: f64,
    window: SlidingMax,
}

impl DriftMonitor {
    pub fn new(rho: f64, tau: f64) -> Self {
        DriftMonitor {
            rho,
            tau,
            window: SlidingMax::new(),
        }
    }

    pub fn push(&mut self, t: f64, e2_norm: f64) {
        self.window.push(t, e2_norm + self.rho * t);
        self.window.expire(t - self.tau - 1e-12 * self.tau.max(1.0));
    }

    pub fn value(&self) -> Option<f64> {
        self.window.max()
    }
}
