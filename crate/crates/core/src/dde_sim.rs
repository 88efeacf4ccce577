//! Fixed-step integration of the coupled master/slave pair with per-edge
//! time-varying delays.
//!
//! Both systems advance on one grid `t_k = k dt`. Every step is stored in a
//! [`HistoryBuffer`] covering at least `[t - tau - dt, t]`, and each delayed
//! argument `x_k(t - tau_jk(t))` is read back by linear interpolation. The
//! error `e = x + y` is derived from the two states, never integrated on its
//! own.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::ControllerGains;
use crate::criteria::NormWeights;
use crate::model::NetworkSpec;
use crate::monitors::{e2_norm, max_component, xi_inf_norm, DriftMonitor, ExpWeightedMonitor};
use crate::split_complex::SplitComplex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("state became non-finite at t = {t}")]
    Divergence { t: f64 },
    #[error("history lookup at s = {s} precedes the retained window starting at {start}")]
    OutOfWindow { s: f64, start: f64 },
    #[error("invalid simulation config: {0}")]
    Config(String),
}

/// Past states on a uniform grid. Sample `i` sits at `(first_index + i) * dt`.
#[derive(Clone, Debug)]
pub struct HistoryBuffer {
    dt: f64,
    first_index: i64,
    samples: VecDeque<Vec<SplitComplex>>,
    capacity: usize,
}

impl HistoryBuffer {
    /// Constant history on `[-tau - dt, 0]`.
    pub fn constant(initial: &[SplitComplex], dt: f64, tau: f64) -> Self {
        let back = (tau / dt).ceil() as usize + 1;
        let capacity = back + 2;
        HistoryBuffer {
            dt,
            first_index: -(back as i64),
            samples: std::iter::repeat_with(|| initial.to_vec()).take(back + 1).collect(),
            capacity,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn start_time(&self) -> f64 {
        self.first_index as f64 * self.dt
    }

    pub fn end_time(&self) -> f64 {
        self.last_index() as f64 * self.dt
    }

    fn last_index(&self) -> i64 {
        self.first_index + self.samples.len() as i64 - 1
    }

    pub fn latest(&self) -> &[SplitComplex] {
        self.samples.back().expect("history never empty")
    }

    /// Appends the state one step after the current end.
    pub fn push(&mut self, state: &[SplitComplex]) {
        let recycled = if self.samples.len() >= self.capacity {
            self.first_index += 1;
            self.samples.pop_front()
        } else {
            None
        };
        let mut slot = recycled.unwrap_or_default();
        slot.clear();
        slot.extend_from_slice(state);
        self.samples.push_back(slot);
    }

    /// Locates `s`: bracketing sample offset and interpolation weight.
    fn locate(&self, s: f64) -> Result<(usize, f64), SimError> {
        let pos = s / self.dt - self.first_index as f64;
        if pos < -1e-9 {
            return Err(SimError::OutOfWindow {
                s,
                start: self.start_time(),
            });
        }
        let last = self.samples.len() - 1;
        if pos >= last as f64 {
            // ahead of the newest sample: hold it
            return Ok((last, 0.0));
        }
        let i = pos.floor().max(0.0);
        let frac = pos - i;
        let i = i as usize;
        Ok(if frac < 1e-9 {
            (i, 0.0)
        } else if frac > 1.0 - 1e-9 {
            (i + 1, 0.0)
        } else {
            (i, frac)
        })
    }

    /// Component `k` of the state at time `s`.
    pub fn interpolate_component(&self, s: f64, k: usize) -> Result<SplitComplex, SimError> {
        let (i, w) = self.locate(s)?;
        let a = self.samples[i][k];
        if w == 0.0 {
            return Ok(a);
        }
        let b = self.samples[i + 1][k];
        Ok(a + (b - a).scale(w))
    }

    /// Full state at time `s`.
    pub fn interpolate(&self, s: f64) -> Result<Vec<SplitComplex>, SimError> {
        let n = self.latest().len();
        (0..n).map(|k| self.interpolate_component(s, k)).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[default]
    #[serde(rename = "euler")]
    Euler,
    /// Classical RK4 stages; delayed arguments come from the stored history
    /// and are held at the newest sample when they fall inside the step.
    #[serde(rename = "rk4", alias = "rk4-lagged")]
    Rk4Lagged,
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euler" => Ok(Scheme::Euler),
            "rk4" | "rk4-lagged" => Ok(Scheme::Rk4Lagged),
            other => Err(format!("unknown scheme `{other}` (expected euler or rk4)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub settle_tolerance: f64,
    pub record_stride: usize,
    /// Half-width of the control dead zone; 0 disables it.
    pub dead_zone: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 1e-4,
            t_end: 30.0,
            scheme: Scheme::Euler,
            settle_tolerance: 1e-2,
            record_stride: 100,
            dead_zone: 0.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, tau: f64) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::Config(m.to_string()));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt must be > 0");
        }
        if tau > 0.0 && self.dt > tau / 10.0 {
            return bad("dt must not exceed tau / 10");
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad("t_end must be >= 0");
        }
        if !(self.settle_tolerance.is_finite() && self.settle_tolerance > 0.0) {
            return bad("settle_tolerance must be > 0");
        }
        if self.record_stride == 0 {
            return bad("record_stride must be >= 1");
        }
        if !(self.dead_zone.is_finite() && self.dead_zone >= 0.0) {
            return bad("dead_zone must be >= 0");
        }
        Ok(())
    }

    fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Constants used by the trajectory monitors.
#[derive(Clone, Debug, PartialEq)]
pub struct MonitorParams {
    pub weights: NormWeights,
    pub epsilon: f64,
    pub rho: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub n: usize,
    pub times: Vec<f64>,
    pub x: Vec<Vec<SplitComplex>>,
    pub y: Vec<Vec<SplitComplex>>,
    pub e: Vec<Vec<SplitComplex>>,
    pub norm_e1: Vec<f64>,
    pub monitor_m: Vec<f64>,
    /// Present once every error component has entered `[-1, 1]`.
    pub norm_e2: Vec<Option<f64>>,
    pub monitor_v: Vec<Option<f64>>,
    pub settling_time: Option<f64>,
    /// Largest `|e_j^l|` after the settling time.
    pub chattering_amplitude: Option<f64>,
    /// First integration time at which every `|e_j^l| <= 1`.
    pub phase_two_start: Option<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_error(&self, i: usize) -> f64 {
        max_component(&self.e[i])
    }

    pub fn is_settled_at(&self, i: usize) -> bool {
        self.settling_time.is_some_and(|ts| self.times[i] >= ts)
    }
}

struct Stepper<'a> {
    net: &'a NetworkSpec,
    gains: Option<&'a ControllerGains>,
    dead_zone: f64,
    n: usize,
    tau_buf: Vec<f64>,
    xd: Vec<SplitComplex>,
    yd: Vec<SplitComplex>,
    e: Vec<SplitComplex>,
    u: Vec<SplitComplex>,
}

impl<'a> Stepper<'a> {
    /// Derivatives of master and slave at time `t` for stage states `x`, `y`.
    #[allow(clippy::too_many_arguments)]
    fn derivs(
        &mut self,
        t: f64,
        x: &[SplitComplex],
        y: &[SplitComplex],
        hx: &HistoryBuffer,
        hy: &HistoryBuffer,
        dx: &mut [SplitComplex],
        dy: &mut [SplitComplex],
    ) -> Result<(), SimError> {
        let n = self.n;
        self.net.delays_at(t, &mut self.tau_buf);
        for j in 0..n {
            for k in 0..n {
                let s = t - self.tau_buf[j * n + k];
                self.xd[j * n + k] = hx.interpolate_component(s, k)?;
                self.yd[j * n + k] = hy.interpolate_component(s, k)?;
            }
        }
        self.net.master_rhs_into(x, &self.xd, dx);
        self.net.master_rhs_into(y, &self.yd, dy);
        if let Some(gains) = self.gains {
            for (ej, (&xj, &yj)) in self.e.iter_mut().zip(x.iter().zip(y)) {
                *ej = xj + yj;
            }
            gains.control_into(&self.e, self.dead_zone, &mut self.u);
            for (d, &u) in dy.iter_mut().zip(&self.u) {
                *d += u;
            }
        }
        Ok(())
    }
}

fn axpy(out: &mut [SplitComplex], base: &[SplitComplex], h: f64, d: &[SplitComplex]) {
    for ((o, &b), &v) in out.iter_mut().zip(base).zip(d) {
        *o = b + v.scale(h);
    }
}

/// Runs master and slave from their constant histories. `gains = None` is
/// the uncontrolled pair.
pub fn simulate(
    net: &NetworkSpec,
    gains: Option<&ControllerGains>,
    monitors: &MonitorParams,
    cfg: &SimConfig,
) -> Result<Trajectory, SimError> {
    cfg.validate(net.tau())?;
    if let Some(g) = gains {
        g.validate(net.n()).map_err(|e| SimError::Config(e.to_string()))?;
    }
    let n = net.n();
    let dt = cfg.dt;
    let tau = net.tau();
    let steps = cfg.steps();

    let mut hx = HistoryBuffer::constant(net.phi_init(), dt, tau);
    let mut hy = HistoryBuffer::constant(net.psi_init(), dt, tau);
    let mut x = net.phi_init().to_vec();
    let mut y = net.psi_init().to_vec();

    let mut stepper = Stepper {
        net,
        gains,
        dead_zone: cfg.dead_zone,
        n,
        tau_buf: vec![0.0; n * n],
        xd: vec![SplitComplex::ZERO; n * n],
        yd: vec![SplitComplex::ZERO; n * n],
        e: vec![SplitComplex::ZERO; n],
        u: vec![SplitComplex::ZERO; n],
    };

    let mut m_monitor = ExpWeightedMonitor::new(monitors.epsilon, tau);
    let mut v_monitor = DriftMonitor::new(monitors.rho, tau);
    {
        // the history window before t = 0
        let e0: Vec<SplitComplex> = x.iter().zip(&y).map(|(&a, &b)| a + b).collect();
        let norm0 = xi_inf_norm(&monitors.weights, &e0);
        let back = (tau / dt).ceil() as i64;
        for i in -back..0 {
            m_monitor.push(i as f64 * dt, norm0);
        }
    }

    let mut traj = Trajectory {
        n,
        ..Trajectory::default()
    };
    let mut max_err = Vec::with_capacity(steps + 1);
    let mut phase_two = false;

    let mut dx = vec![SplitComplex::ZERO; n];
    let mut dy = vec![SplitComplex::ZERO; n];
    let mut stages = Rk4Scratch::new(n);

    for k in 0..=steps {
        let t = k as f64 * dt;
        let e: Vec<SplitComplex> = x.iter().zip(&y).map(|(&a, &b)| a + b).collect();
        let norm = xi_inf_norm(&monitors.weights, &e);
        let emax = max_component(&e);
        max_err.push(emax);
        m_monitor.push(t, norm);
        if !phase_two && emax <= 1.0 {
            phase_two = true;
            traj.phase_two_start = Some(t);
        }
        let e2 = phase_two.then(|| {
            let v = e2_norm(&monitors.weights, &e, monitors.beta);
            v_monitor.push(t, v);
            v
        });

        if k % cfg.record_stride == 0 || k == steps {
            traj.times.push(t);
            traj.x.push(x.clone());
            traj.y.push(y.clone());
            traj.e.push(e);
            traj.norm_e1.push(norm);
            traj.monitor_m.push(m_monitor.value());
            traj.norm_e2.push(e2);
            traj.monitor_v.push(if phase_two { v_monitor.value() } else { None });
        }
        if k == steps {
            break;
        }

        match cfg.scheme {
            Scheme::Euler => {
                stepper.derivs(t, &x, &y, &hx, &hy, &mut dx, &mut dy)?;
                for j in 0..n {
                    x[j] += dx[j].scale(dt);
                    y[j] += dy[j].scale(dt);
                }
            }
            Scheme::Rk4Lagged => stages.step(&mut stepper, t, dt, &mut x, &mut y, &hx, &hy)?,
        }
        if !x.iter().chain(&y).all(SplitComplex::is_finite) {
            return Err(SimError::Divergence { t: t + dt });
        }
        hx.push(&x);
        hy.push(&y);
    }

    // settled from the first recorded time after the last tolerance violation
    let tol = cfg.settle_tolerance;
    let settle_step = match max_err.iter().rposition(|&m| m >= tol) {
        Some(last) => last + 1,
        None => 0,
    };
    if settle_step <= steps {
        let first_record = traj
            .times
            .iter()
            .copied()
            .find(|&t| t >= settle_step as f64 * dt - 1e-9 * dt);
        if let Some(ts) = first_record {
            let from = ((ts / dt).round() as usize).min(steps);
            traj.settling_time = Some(ts);
            traj.chattering_amplitude = Some(max_err[from..].iter().copied().fold(0.0, f64::max));
        }
    }
    Ok(traj)
}

struct Rk4Scratch {
    k: [(Vec<SplitComplex>, Vec<SplitComplex>); 4],
    xs: Vec<SplitComplex>,
    ys: Vec<SplitComplex>,
}

impl Rk4Scratch {
    fn new(n: usize) -> Self {
        let z = || (vec![SplitComplex::ZERO; n], vec![SplitComplex::ZERO; n]);
        Rk4Scratch {
            k: [z(), z(), z(), z()],
            xs: vec![SplitComplex::ZERO; n],
            ys: vec![SplitComplex::ZERO; n],
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn step(
        &mut self,
        stepper: &mut Stepper<'_>,
        t: f64,
        dt: f64,
        x: &mut [SplitComplex],
        y: &mut [SplitComplex],
        hx: &HistoryBuffer,
        hy: &HistoryBuffer,
    ) -> Result<(), SimError> {
        const C: [f64; 4] = [0.0, 0.5, 0.5, 1.0];
        #[allow(clippy::needless_range_loop)]
        for s in 0..4 {
            if s == 0 {
                self.xs.copy_from_slice(x);
                self.ys.copy_from_slice(y);
            } else {
                let (kx, ky) = &self.k[s - 1];
                axpy(&mut self.xs, x, C[s] * dt, kx);
                axpy(&mut self.ys, y, C[s] * dt, ky);
            }
            let (kx, ky) = &mut self.k[s];
            stepper.derivs(t + C[s] * dt, &self.xs, &self.ys, hx, hy, kx, ky)?;
        }
        let w = dt / 6.0;
        for j in 0..x.len() {
            let [(a, pa), (b, pb), (c, pc), (d, pd)] = &self.k;
            x[j] += (a[j] + b[j].scale(2.0) + c[j].scale(2.0) + d[j]).scale(w);
            y[j] += (pa[j] + pb[j].scale(2.0) + pc[j].scale(2.0) + pd[j]).scale(w);
        }
        Ok(())
    }
}
