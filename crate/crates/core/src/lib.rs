//! Master/slave complex-valued neural networks with bounded asynchronous
//! time-varying delays, driven to anti-synchronization (`x + y -> 0`) in
//! finite time by a sign-based controller.
//!
//! - [`split_complex`]: complex arithmetic on `(re, im)` pairs.
//! - [`model`]: network description, activation and delay catalogs, right-hand sides.
//! - [`controller`]: the control law.
//! - [`criteria`]: gain thresholds, `epsilon`/`rho` search and certified settling times.
//! - [`dde_sim`]: fixed-step delayed integration with norm monitors.
//! - [`cli`]: scenario files, reports, trajectory CSV and the subcommands.

pub mod cli;
pub mod controller;
pub mod criteria;
pub mod dde_sim;
pub mod model;
pub mod monitors;
pub mod split_complex;

pub use controller::ControllerGains;
pub use criteria::{ConvergenceCertificate, Criteria, Mode, NormWeights, ThresholdReport};
pub use dde_sim::{simulate, MonitorParams, Scheme, SimConfig, Trajectory};
pub use model::{ActivationSpec, DelayKind, NetworkSpec};
pub use split_complex::SplitComplex;
