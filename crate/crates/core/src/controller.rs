//! Finite-time anti-synchronization control law.
//!
//! ```text
//! u_j^R = -sign(e_j^R) [ mu_bar_j |e_j^R| + rho_bar_j |e_j^R|^beta + eta_bar_j ]
//! u_j^I = -sign(e_j^I) [ mu_tilde_j |e_j^I| + rho_tilde_j |e_j^I|^beta + eta_tilde_j ]
//! ```
//!
//! `sign(0) = 0`, so the anti-synchronized manifold `e = 0` receives no input.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::split_complex::SplitComplex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GainsError {
    #[error("exponent beta = {0} must lie in (0, 1)")]
    BetaOutOfRange(f64),
    #[error("gain {name}[{index}] = {value} must be finite and >= 0")]
    NegativeGain {
        name: &'static str,
        index: usize,
        value: f64,
    },
    #[error("gain {name} has length {found}, expected {expected}")]
    Length {
        name: &'static str,
        expected: usize,
        found: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerGains {
    pub beta: f64,
    pub mu_bar: Vec<f64>,
    pub rho_bar: Vec<f64>,
    pub eta_bar: Vec<f64>,
    pub mu_tilde: Vec<f64>,
    pub rho_tilde: Vec<f64>,
    pub eta_tilde: Vec<f64>,
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn law(e: f64, mu: f64, rho: f64, eta: f64, beta: f64, dead_zone: f64) -> f64 {
    let mag = e.abs();
    if mag <= dead_zone {
        return 0.0;
    }
    -sign(e) * (mu * mag + rho * mag.powf(beta) + eta)
}

impl ControllerGains {
    pub fn n(&self) -> usize {
        self.mu_bar.len()
    }

    fn vectors(&self) -> [(&'static str, &Vec<f64>); 6] {
        [
            ("mu_bar", &self.mu_bar),
            ("rho_bar", &self.rho_bar),
            ("eta_bar", &self.eta_bar),
            ("mu_tilde", &self.mu_tilde),
            ("rho_tilde", &self.rho_tilde),
            ("eta_tilde", &self.eta_tilde),
        ]
    }

    fn vectors_mut(&mut self) -> [&mut Vec<f64>; 6] {
        [
            &mut self.mu_bar,
            &mut self.rho_bar,
            &mut self.eta_bar,
            &mut self.mu_tilde,
            &mut self.rho_tilde,
            &mut self.eta_tilde,
        ]
    }

    pub fn validate(&self, n: usize) -> Result<(), GainsError> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(GainsError::BetaOutOfRange(self.beta));
        }
        for (name, v) in self.vectors() {
            if v.len() != n {
                return Err(GainsError::Length {
                    name,
                    expected: n,
                    found: v.len(),
                });
            }
            if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x >= 0.0)) {
                return Err(GainsError::NegativeGain { name, index, value });
            }
        }
        Ok(())
    }

    /// All-zero gains with the given exponent.
    pub fn zeros(n: usize, beta: f64) -> Self {
        ControllerGains {
            beta,
            mu_bar: vec![0.0; n],
            rho_bar: vec![0.0; n],
            eta_bar: vec![0.0; n],
            mu_tilde: vec![0.0; n],
            rho_tilde: vec![0.0; n],
            eta_tilde: vec![0.0; n],
        }
    }

    /// Multiplies the `mu` and `rho` vectors by `factor`; `eta` is untouched.
    pub fn scale_mu_rho(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in [&mut out.mu_bar, &mut out.mu_tilde, &mut out.rho_bar, &mut out.rho_tilde] {
            v.iter_mut().for_each(|x| *x *= factor);
        }
        out
    }

    pub fn map_all(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        let mut out = self.clone();
        for v in out.vectors_mut() {
            v.iter_mut().for_each(|x| *x = f(*x));
        }
        out
    }

    /// Control input for the current error.
    pub fn control(&self, e: &[SplitComplex]) -> Vec<SplitComplex> {
        let mut out = vec![SplitComplex::ZERO; e.len()];
        self.control_into(e, 0.0, &mut out);
        out
    }

    /// Control with a dead zone: components with `|e| <= dead_zone` get no
    /// input. `dead_zone = 0` is the plain law.
    pub fn control_into(&self, e: &[SplitComplex], dead_zone: f64, out: &mut [SplitComplex]) {
        for (j, (ej, o)) in e.iter().zip(out.iter_mut()).enumerate() {
            *o = SplitComplex::new(
                law(ej.re, self.mu_bar[j], self.rho_bar[j], self.eta_bar[j], self.beta, dead_zone),
                law(ej.im, self.mu_tilde[j], self.rho_tilde[j], self.eta_tilde[j], self.beta, dead_zone),
            );
        }
    }
}
