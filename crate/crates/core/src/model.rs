//! Master/slave network description and the decomposed right-hand sides.
//!
//! Each neuron's complex state is carried as a [`SplitComplex`]. The master
//! evolves as
//!
//! ```text
//! x_j' = -d_j x_j + sum_k a_jk f_k(x_k) + sum_k b_jk g_k(x_k(t - tau_jk(t))) + H_j
//! ```
//!
//! with every product routed through [`product_split`]. The slave is the same
//! network plus a control input, and the anti-synchronization error is
//! `e = x + y`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::split_complex::{product_split, Mat2, SplitComplex, SplitMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("network must have at least one neuron")]
    Empty,
    #[error("self-feedback d[{index}] = {value} must be > 0")]
    NonPositiveDecay { index: usize, value: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("delay ({row}, {col}) invalid: {reason}")]
    InvalidDelay { row: usize, col: usize, reason: String },
    #[error("declared tau = {tau} is below the largest delay bound {required}")]
    TauTooSmall { tau: f64, required: f64 },
}

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActivationKind {
    /// `s(u) = (1 - e^-u) / (1 + e^-u)` on each part.
    SigmoidPair,
    /// `sat(u) = (|u + 1| - |u - 1|) / 2` on each part.
    SaturatingLinear,
}

/// Catalog activation `f(x) = h(p_R x^R + q_R x^I) + i h(p_I x^R + q_I x^I)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActivationSpec {
    pub kind: ActivationKind,
    /// `(p_R, q_R, p_I, q_I)`
    pub mix: [f64; 4],
}

/// Lipschitz bound matrices of one activation: the "bar" matrix and its row
/// swap, the "tilde" matrix. For an `f` activation these are `Λ̄`/`Λ̃`, for a
/// `g` activation `Γ̄`/`Γ̃`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivationBounds {
    pub bar: Mat2,
    pub tilde: Mat2,
}

impl ActivationBounds {
    pub fn from_bar(bar: Mat2) -> Self {
        ActivationBounds {
            bar,
            tilde: bar.row_swap(),
        }
    }
}

/// Finite-difference survey of the partial derivatives on a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeEstimate {
    /// Entry `(l1, l2)` is `max |d f^l1 / d x^l2|`.
    pub max_abs: Mat2,
    /// Entry `(l1, l2)` is `min d f^l1 / d x^l2` (signed).
    pub min_signed: Mat2,
}

impl DerivativeEstimate {
    pub fn bounds(&self) -> ActivationBounds {
        ActivationBounds::from_bar(self.max_abs)
    }
}

fn sigmoid(u: f64) -> f64 {
    // (1 - e^-u)/(1 + e^-u) == tanh(u/2), without the overflow for u << 0.
    (0.5 * u).tanh()
}

fn saturating(u: f64) -> f64 {
    0.5 * ((u + 1.0).abs() - (u - 1.0).abs())
}

impl ActivationSpec {
    pub fn sigmoid_pair(mix: [f64; 4]) -> Self {
        ActivationSpec {
            kind: ActivationKind::SigmoidPair,
            mix,
        }
    }

    pub fn saturating_linear(mix: [f64; 4]) -> Self {
        ActivationSpec {
            kind: ActivationKind::SaturatingLinear,
            mix,
        }
    }

    fn scalar(&self, u: f64) -> f64 {
        match self.kind {
            ActivationKind::SigmoidPair => sigmoid(u),
            ActivationKind::SaturatingLinear => saturating(u),
        }
    }

    /// Largest slope of the scalar profile.
    fn max_slope(&self) -> f64 {
        match self.kind {
            ActivationKind::SigmoidPair => 0.5,
            ActivationKind::SaturatingLinear => 1.0,
        }
    }

    pub fn eval(&self, x: SplitComplex) -> SplitComplex {
        let [p_r, q_r, p_i, q_i] = self.mix;
        let u_r = p_r * x.re + q_r * x.im;
        let u_i = p_i * x.re + q_i * x.im;
        SplitComplex::new(self.scalar(u_r), self.scalar(u_i))
    }

    /// Tight bounds on `|d f^l1 / d x^l2|`.
    pub fn analytic_bounds(&self) -> ActivationBounds {
        let s = self.max_slope();
        let [p_r, q_r, p_i, q_i] = self.mix.map(f64::abs);
        ActivationBounds::from_bar(Mat2::new(s * p_r, s * q_r, s * p_i, s * q_i))
    }

    /// True when every partial derivative is nonnegative everywhere, which
    /// is what the sign-exploiting criteria need from `f`.
    pub fn is_monotone(&self) -> bool {
        self.mix.iter().all(|&c| c >= 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.mix.iter().all(|c| c.is_finite())
    }

    /// Central differences over a uniform `grid_points × grid_points` grid on
    /// `[-w, w]²`.
    pub fn estimate_bounds(&self, grid_half_width: f64, grid_points: usize) -> DerivativeEstimate {
        assert!(grid_points >= 3, "grid needs at least 3 points per axis");
        let h = 1e-6_f64.max(grid_half_width * 1e-7);
        let step = 2.0 * grid_half_width / (grid_points - 1) as f64;
        let mut max_abs = Mat2::ZERO;
        let mut min_signed = Mat2([[f64::INFINITY; 2]; 2]);
        for a in 0..grid_points {
            let xr = -grid_half_width + a as f64 * step;
            for b in 0..grid_points {
                let xi = -grid_half_width + b as f64 * step;
                let dr = {
                    let p = self.eval(SplitComplex::new(xr + h, xi));
                    let m = self.eval(SplitComplex::new(xr - h, xi));
                    [(p.re - m.re) / (2.0 * h), (p.im - m.im) / (2.0 * h)]
                };
                let di = {
                    let p = self.eval(SplitComplex::new(xr, xi + h));
                    let m = self.eval(SplitComplex::new(xr, xi - h));
                    [(p.re - m.re) / (2.0 * h), (p.im - m.im) / (2.0 * h)]
                };
                // entry (l1, l2): l1 indexes the output part, l2 the argument part
                let partials = [[dr[0], di[0]], [dr[1], di[1]]];
                for (l1, row) in partials.iter().enumerate() {
                    for (l2, &v) in row.iter().enumerate() {
                        max_abs.0[l1][l2] = max_abs.0[l1][l2].max(v.abs());
                        min_signed.0[l1][l2] = min_signed.0[l1][l2].min(v);
                    }
                }
            }
        }
        DerivativeEstimate {
            max_abs,
            min_signed,
        }
    }
}

// ---------------------------------------------------------------------------
// Delays
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DelayKind {
    Constant { value: f64 },
    /// `(e^t - shift) / (1 + e^t)`
    LogisticShifted { shift: f64 },
    /// `1 / (1 + |cos(omega t)|)`
    ReciprocalAbsCos { omega: f64 },
    /// `1 / (1 + |sin(omega t)|)`
    ReciprocalAbsSin { omega: f64 },
}

impl DelayKind {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            DelayKind::Constant { value } => value,
            DelayKind::LogisticShifted { shift } => {
                1.0 / (1.0 + (-t).exp()) - shift / (1.0 + t.exp())
            }
            DelayKind::ReciprocalAbsCos { omega } => 1.0 / (1.0 + (omega * t).cos().abs()),
            DelayKind::ReciprocalAbsSin { omega } => 1.0 / (1.0 + (omega * t).sin().abs()),
        }
    }

    /// `(inf, sup)` of the delay over `t >= 0`.
    pub fn range(&self) -> (f64, f64) {
        match *self {
            DelayKind::Constant { value } => (value, value),
            DelayKind::LogisticShifted { shift } => {
                // monotone in t between the value at 0 and the limit 1
                let at_zero = 0.5 * (1.0 - shift);
                (at_zero.min(1.0), at_zero.max(1.0))
            }
            DelayKind::ReciprocalAbsCos { .. } | DelayKind::ReciprocalAbsSin { .. } => (0.5, 1.0),
        }
    }

    fn param(&self) -> f64 {
        match *self {
            DelayKind::Constant { value } => value,
            DelayKind::LogisticShifted { shift } => shift,
            DelayKind::ReciprocalAbsCos { omega } | DelayKind::ReciprocalAbsSin { omega } => omega,
        }
    }
}

/// A delay function together with its upper bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelaySpec {
    pub kind: DelayKind,
    pub bound: f64,
}

impl DelaySpec {
    pub fn new(kind: DelayKind) -> Result<Self, String> {
        if !kind.param().is_finite() {
            return Err("parameter must be finite".into());
        }
        let (lo, hi) = kind.range();
        if lo < 0.0 {
            return Err(format!("delay takes negative values (inf = {lo})"));
        }
        Ok(DelaySpec { kind, bound: hi })
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.kind.eval(t)
    }
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

/// Unvalidated pieces of a network; see [`NetworkSpec::new`].
#[derive(Clone, Debug)]
pub struct NetworkParts {
    pub d: Vec<f64>,
    pub a: Vec<Vec<SplitComplex>>,
    pub b: Vec<Vec<SplitComplex>>,
    pub h: Vec<SplitComplex>,
    pub f: Vec<ActivationSpec>,
    pub g: Vec<ActivationSpec>,
    pub delays: Vec<Vec<DelayKind>>,
    /// Declared common delay bound; defaults to the largest per-edge bound.
    pub tau: Option<f64>,
    pub phi_init: Vec<SplitComplex>,
    pub psi_init: Vec<SplitComplex>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSpec {
    n: usize,
    d: Vec<f64>,
    a: SplitMatrix,
    b: SplitMatrix,
    h: Vec<SplitComplex>,
    f: Vec<ActivationSpec>,
    g: Vec<ActivationSpec>,
    f_bounds: Vec<ActivationBounds>,
    g_bounds: Vec<ActivationBounds>,
    delays: Vec<DelaySpec>,
    tau: f64,
    phi_init: Vec<SplitComplex>,
    psi_init: Vec<SplitComplex>,
}

fn check_len(what: &str, expected: usize, found: usize) -> Result<(), ModelError> {
    if expected != found {
        return Err(ModelError::DimensionMismatch {
            what: what.to_string(),
            expected,
            found,
        });
    }
    Ok(())
}

fn check_finite<'a>(
    what: &str,
    values: impl IntoIterator<Item = &'a SplitComplex>,
) -> Result<(), ModelError> {
    if values.into_iter().all(SplitComplex::is_finite) {
        Ok(())
    } else {
        Err(ModelError::NonFinite(what.to_string()))
    }
}

fn square(what: &str, rows: &[Vec<SplitComplex>], n: usize) -> Result<SplitMatrix, ModelError> {
    check_len(what, n, rows.len())?;
    for row in rows {
        check_len(what, n, row.len())?;
    }
    check_finite(what, rows.iter().flatten())?;
    Ok(SplitMatrix::from_rows(rows).expect("shape checked"))
}

impl NetworkSpec {
    pub fn new(parts: NetworkParts) -> Result<Self, ModelError> {
        let n = parts.d.len();
        if n == 0 {
            return Err(ModelError::Empty);
        }
        for (index, &value) in parts.d.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::NonPositiveDecay { index, value });
            }
        }
        let a = square("a", &parts.a, n)?;
        let b = square("b", &parts.b, n)?;
        check_len("h", n, parts.h.len())?;
        check_finite("h", &parts.h)?;
        check_len("f", n, parts.f.len())?;
        check_len("g", n, parts.g.len())?;
        if !parts.f.iter().chain(&parts.g).all(ActivationSpec::is_finite) {
            return Err(ModelError::NonFinite("activation mix".into()));
        }
        check_len("phi_init", n, parts.phi_init.len())?;
        check_len("psi_init", n, parts.psi_init.len())?;
        check_finite("phi_init", &parts.phi_init)?;
        check_finite("psi_init", &parts.psi_init)?;

        check_len("delays", n, parts.delays.len())?;
        let mut delays = Vec::with_capacity(n * n);
        for (row, kinds) in parts.delays.iter().enumerate() {
            check_len("delays", n, kinds.len())?;
            for (col, kind) in kinds.iter().enumerate() {
                let spec = DelaySpec::new(*kind)
                    .map_err(|reason| ModelError::InvalidDelay { row, col, reason })?;
                delays.push(spec);
            }
        }
        let required = delays.iter().map(|d| d.bound).fold(0.0, f64::max);
        let tau = match parts.tau {
            Some(tau) if !(tau.is_finite() && tau >= required) => {
                return Err(ModelError::TauTooSmall { tau, required })
            }
            Some(tau) => tau,
            None => required,
        };

        let f_bounds = parts.f.iter().map(ActivationSpec::analytic_bounds).collect();
        let g_bounds = parts.g.iter().map(ActivationSpec::analytic_bounds).collect();
        Ok(NetworkSpec {
            n,
            d: parts.d,
            a,
            b,
            h: parts.h,
            f: parts.f,
            g: parts.g,
            f_bounds,
            g_bounds,
            delays,
            tau,
            phi_init: parts.phi_init,
            psi_init: parts.psi_init,
        })
    }

    /// Inverse of [`NetworkSpec::new`].
    pub fn to_parts(&self) -> NetworkParts {
        NetworkParts {
            d: self.d.clone(),
            a: self.a.to_rows(),
            b: self.b.to_rows(),
            h: self.h.clone(),
            f: self.f.clone(),
            g: self.g.clone(),
            delays: self
                .delays
                .chunks(self.n)
                .map(|r| r.iter().map(|d| d.kind).collect())
                .collect(),
            tau: Some(self.tau),
            phi_init: self.phi_init.clone(),
            psi_init: self.psi_init.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn d(&self) -> &[f64] {
        &self.d
    }
    pub fn a(&self) -> &SplitMatrix {
        &self.a
    }
    pub fn b(&self) -> &SplitMatrix {
        &self.b
    }
    pub fn h(&self) -> &[SplitComplex] {
        &self.h
    }
    pub fn f(&self) -> &[ActivationSpec] {
        &self.f
    }
    pub fn g(&self) -> &[ActivationSpec] {
        &self.g
    }
    /// `(Λ̄_k, Λ̃_k)` per neuron.
    pub fn f_bounds(&self) -> &[ActivationBounds] {
        &self.f_bounds
    }
    /// `(Γ̄_k, Γ̃_k)` per neuron.
    pub fn g_bounds(&self) -> &[ActivationBounds] {
        &self.g_bounds
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn phi_init(&self) -> &[SplitComplex] {
        &self.phi_init
    }
    pub fn psi_init(&self) -> &[SplitComplex] {
        &self.psi_init
    }

    pub fn delay(&self, j: usize, k: usize) -> &DelaySpec {
        &self.delays[j * self.n + k]
    }

    /// `tau_jk(t)` for every edge, row-major.
    pub fn delays_at(&self, t: f64, out: &mut [f64]) {
        for (o, d) in out.iter_mut().zip(&self.delays) {
            *o = d.eval(t);
        }
    }

    /// Same network with a different initial history pair.
    pub fn with_initial(&self, phi: Vec<SplitComplex>, psi: Vec<SplitComplex>) -> Result<Self, ModelError> {
        let mut parts = self.to_parts();
        parts.phi_init = phi;
        parts.psi_init = psi;
        NetworkSpec::new(parts)
    }

    /// Same network with `H` replaced.
    pub fn with_inputs(&self, h: Vec<SplitComplex>) -> Result<Self, ModelError> {
        let mut parts = self.to_parts();
        parts.h = h;
        NetworkSpec::new(parts)
    }

    /// Decomposed master derivative. `delayed[j * n + k]` must hold
    /// `x_k(t - tau_jk(t))`.
    pub fn master_rhs(&self, state: &[SplitComplex], delayed: &[SplitComplex]) -> Vec<SplitComplex> {
        let mut out = vec![SplitComplex::ZERO; self.n];
        self.master_rhs_into(state, delayed, &mut out);
        out
    }

    pub fn master_rhs_into(&self, state: &[SplitComplex], delayed: &[SplitComplex], out: &mut [SplitComplex]) {
        let n = self.n;
        debug_assert_eq!(state.len(), n);
        debug_assert_eq!(delayed.len(), n * n);
        let fx: Vec<SplitComplex> = self.f.iter().zip(state).map(|(f, &x)| f.eval(x)).collect();
        for j in 0..n {
            let mut acc = state[j].scale(-self.d[j]) + self.h[j];
            for k in 0..n {
                acc += product_split(self.a.get(j, k), fx[k]);
                acc += product_split(self.b.get(j, k), self.g[k].eval(delayed[j * n + k]));
            }
            out[j] = acc;
        }
    }

    /// Slave derivative: master right-hand side plus control.
    pub fn slave_rhs(&self, state: &[SplitComplex], delayed: &[SplitComplex], u: &[SplitComplex]) -> Vec<SplitComplex> {
        let mut out = self.master_rhs(state, delayed);
        for (o, &uj) in out.iter_mut().zip(u) {
            *o += uj;
        }
        out
    }

    /// Derivative of `e = x + y`, assembled term by term from both systems'
    /// activations (no call to [`NetworkSpec::master_rhs`]).
    pub fn error_rhs(
        &self,
        x: &[SplitComplex],
        y: &[SplitComplex],
        x_delayed: &[SplitComplex],
        y_delayed: &[SplitComplex],
        u: &[SplitComplex],
    ) -> Vec<SplitComplex> {
        let n = self.n;
        let f_sum: Vec<SplitComplex> = (0..n)
            .map(|k| self.f[k].eval(x[k]) + self.f[k].eval(y[k]))
            .collect();
        (0..n)
            .map(|j| {
                let e = x[j] + y[j];
                let mut acc = e.scale(-self.d[j]) + self.h[j].scale(2.0) + u[j];
                for k in 0..n {
                    acc += product_split(self.a.get(j, k), f_sum[k]);
                    let g_sum = self.g[k].eval(x_delayed[j * n + k]) + self.g[k].eval(y_delayed[j * n + k]);
                    acc += product_split(self.b.get(j, k), g_sum);
                }
                acc
            })
            .collect()
    }
}
