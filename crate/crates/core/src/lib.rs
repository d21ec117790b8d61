//! Relaxation of a qubit into reactive environments.
//!
//! The crate covers three layers:
//!
//! * [`circuit`]: input impedance and standing-wave dispersion of a
//!   Josephson-junction ladder, and resonance search on the impedance.
//! * [`bath`] and [`dynamics`]: discrete baths (transmission line, junction
//!   array, uniform and degenerate two-level ensembles) and two engines for
//!   the single-excitation amplitude equations.
//! * [`analytics`]: closed-form decay, revival and plateau laws together with
//!   fit and detection estimators for simulated series.
//!
//! [`config`] and [`runner`] drive all of it from a small INI-style file and
//! write CSV outputs with a checksummed manifest.
//!
//! Units: ħ = 1 and the qubit frequency Ω is the frequency unit, so times are
//! dimensionless Ωt.
//!
//! ```
//! use heatbath::analytics::decay_rate_line;
//! use heatbath::bath::{build_transmission_line_bath, TransmissionLineParams};
//! use heatbath::dynamics::{evolve, EngineConfig};
//! use heatbath::units::QubitSpec;
//!
//! let bath = build_transmission_line_bath(&TransmissionLineParams { delta_omega: 0.01, g: 0.001, n_modes: 300 }).unwrap();
//! let series = evolve(&QubitSpec::default(), &bath, &EngineConfig::new(20.0)).unwrap();
//! let gamma = decay_rate_line(0.001, 1.0, 0.01);
//! let p_end = series.samples.last().unwrap().p_e;
//! assert!((p_end - (-gamma * 20.0).exp()).abs() < 0.02);
//! ```

// `!(x > 0.0)` style guards are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod analytics;
pub mod bath;
pub mod circuit;
pub mod config;
pub mod dynamics;
pub mod io;
pub mod model;
pub mod runner;
pub mod units;

pub use model::{BathKind, BathSpec, Mode, TimeSeries};
pub use units::QubitSpec;
