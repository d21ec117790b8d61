//! Linearized Josephson-junction array / LC transmission line.
//!
//! Each junction is an inductor `L` shunted by its capacitance `C`; every
//! island has a capacitance `Cg` to ground. Seen from the drive port the
//! ladder reads junction, shunt, junction, shunt, … and the termination sits
//! after the last shunt. With `C = 0` the array is the plain LC_g line.
//!
//! The ladder is lossless, so its input impedance has genuine poles. The
//! recursion carries either an impedance or an admittance, always the one
//! with magnitude ≤ 1 in units of `sqrt(L/Cg)`, and never produces
//! infinities.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64 as C64;
use thiserror::Error;

/// |ω − ω_p|/ω_p below which the junction is reported as exactly at its pole.
pub const POLE_THRESHOLD: f64 = 8.0 * f64::EPSILON;

/// Relative bracket width at which mode bisection stops.
pub const MODE_TOLERANCE: f64 = 1e-9;

/// Default scan density: grid points per line mode spacing π/(N√(L·Cg)).
pub const POINTS_PER_SPACING: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("invalid circuit: {0}")]
    InvalidSpec(String),
    #[error("frequency must be positive and finite, got {0}")]
    InvalidFrequency(f64),
    #[error("mode index must be >= 1")]
    InvalidModeIndex,
    #[error("no closed-form dispersion for a load termination")]
    UnsupportedTermination,
    #[error("invalid scan range: {0}")]
    InvalidRange(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Open,
    Short,
    /// Arbitrary load impedance Z_L at the far end.
    Load(C64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitSpec {
    l: f64,
    c: f64,
    cg: f64,
    n: usize,
    termination: Termination,
}

impl CircuitSpec {
    pub fn new(l: f64, c: f64, cg: f64, n: usize, termination: Termination) -> Result<Self, CircuitError> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(CircuitError::InvalidSpec(format!("L must be positive, got {l}")));
        }
        if !(cg > 0.0 && cg.is_finite()) {
            return Err(CircuitError::InvalidSpec(format!("Cg must be positive, got {cg}")));
        }
        if !(c >= 0.0 && c.is_finite()) {
            return Err(CircuitError::InvalidSpec(format!("C must be non-negative, got {c}")));
        }
        if n == 0 {
            return Err(CircuitError::InvalidSpec("N must be at least 1".into()));
        }
        if let Termination::Load(z) = termination {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(CircuitError::InvalidSpec("load impedance must be finite".into()));
            }
        }
        Ok(Self { l, c, cg, n, termination })
    }

    pub fn l(&self) -> f64 {
        self.l
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn cg(&self) -> f64 {
        self.cg
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn with_termination(self, termination: Termination) -> Self {
        Self { termination, ..self }
    }

    /// ω_p = 1/√(LC); infinite for C = 0.
    pub fn plasma_frequency(&self) -> f64 {
        if self.c == 0.0 {
            f64::INFINITY
        } else {
            1.0 / (self.l * self.c).sqrt()
        }
    }

    /// Z_∞ = √(L/C); infinite for C = 0.
    pub fn characteristic_impedance(&self) -> f64 {
        if self.c == 0.0 {
            f64::INFINITY
        } else {
            (self.l / self.c).sqrt()
        }
    }

    /// 1/√(L·Cg), the natural frequency scale of the LC_g line.
    pub fn line_frequency(&self) -> f64 {
        1.0 / (self.l * self.cg).sqrt()
    }

    /// Bare mode spacing π/(N√(L·Cg)).
    pub fn mode_spacing(&self) -> f64 {
        PI / (self.n as f64 * (self.l * self.cg).sqrt())
    }

    /// Frequency used to normalize sweep output: ω_p when C > 0, else 1/√(L·Cg).
    pub fn natural_frequency(&self) -> f64 {
        if self.c > 0.0 {
            self.plasma_frequency()
        } else {
            self.line_frequency()
        }
    }

    fn reference_impedance(&self) -> f64 {
        (self.l / self.cg).sqrt()
    }
}

/// A one-port response, in whichever representation is finite.
///
/// `Admittance(0)` is a pole of the impedance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Immittance {
    Impedance(C64),
    Admittance(C64),
}

impl Immittance {
    pub fn is_pole(&self) -> bool {
        matches!(self, Immittance::Admittance(y) if *y == C64::new(0.0, 0.0))
    }

    /// Z, or `None` at a pole.
    pub fn impedance(&self) -> Option<C64> {
        match *self {
            Immittance::Impedance(z) => Some(z),
            _ if self.is_pole() => None,
            Immittance::Admittance(y) => Some(y.inv()),
        }
    }

    /// Y, or `None` at a zero of the impedance.
    pub fn admittance(&self) -> Option<C64> {
        match *self {
            Immittance::Admittance(y) => Some(y),
            Immittance::Impedance(z) if z == C64::new(0.0, 0.0) => None,
            Immittance::Impedance(z) => Some(z.inv()),
        }
    }

    /// |Z|, infinite at a pole.
    pub fn abs_impedance(&self) -> f64 {
        match *self {
            Immittance::Impedance(z) => z.norm(),
            Immittance::Admittance(y) => 1.0 / y.norm(),
        }
    }

    /// Whether Im Z > 0 (inductive). `None` at a pole, where the sign flips.
    fn inductive(&self) -> Option<bool> {
        match *self {
            Immittance::Impedance(z) => Some(z.im > 0.0),
            _ if self.is_pole() => None,
            Immittance::Admittance(y) => Some(y.im < 0.0),
        }
    }
}

/// Recursion state normalized by the reference impedance √(L/Cg).
#[derive(Debug, Clone, Copy)]
enum Normalized {
    Z(C64),
    Y(C64),
}

impl Normalized {
    fn balanced(self) -> Self {
        match self {
            Normalized::Z(z) if z.norm_sqr() > 1.0 => Normalized::Y(z.inv()),
            Normalized::Y(y) if y.norm_sqr() > 1.0 => Normalized::Z(y.inv()),
            other => other,
        }
    }

    /// Adds an admittance in parallel.
    fn parallel(self, y_add: C64) -> Self {
        let one = C64::new(1.0, 0.0);
        let next = match self {
            Normalized::Y(y) => Normalized::Y(y + y_add),
            Normalized::Z(z) => {
                let d = one + z * y_add;
                if d == C64::new(0.0, 0.0) {
                    Normalized::Y(C64::new(0.0, 0.0))
                } else {
                    Normalized::Z(z / d)
                }
            }
        };
        next.balanced()
    }

    /// Adds an element in series.
    fn series(self, element: Normalized) -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let next = match (self, element) {
            (Normalized::Z(z), Normalized::Z(ze)) => Normalized::Z(z + ze),
            (Normalized::Z(z), Normalized::Y(ye)) | (Normalized::Y(ye), Normalized::Z(z)) => {
                let d = one + z * ye;
                if d == zero {
                    Normalized::Z(zero)
                } else {
                    Normalized::Y(ye / d)
                }
            }
            (Normalized::Y(y), Normalized::Y(ye)) => {
                let s = y + ye;
                if s == zero {
                    Normalized::Z(zero)
                } else {
                    Normalized::Y(y * ye / s)
                }
            }
        };
        next.balanced()
    }

    fn is_finite(&self) -> bool {
        let v = match self {
            Normalized::Z(v) | Normalized::Y(v) => v,
        };
        v.re.is_finite() && v.im.is_finite()
    }
}

fn check_frequency(omega: f64) -> Result<(), CircuitError> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(CircuitError::InvalidFrequency(omega))
    }
}

/// Impedance of one linearized junction, Z_LC = −iZ_∞/(ω/ω_p − ω_p/ω).
///
/// Returned as the admittance Y_LC = i(ωC − 1/(ωL)), which is exactly zero at
/// the plasma pole. For `C = 0` the junction is the bare inductor and the
/// impedance iωL is returned directly.
pub fn junction_impedance(spec: &CircuitSpec, omega: f64) -> Result<Immittance, CircuitError> {
    check_frequency(omega)?;
    if spec.c == 0.0 {
        return Ok(Immittance::Impedance(C64::new(0.0, omega * spec.l)));
    }
    let wp = spec.plasma_frequency();
    if ((omega - wp) / wp).abs() < POLE_THRESHOLD {
        return Ok(Immittance::Admittance(C64::new(0.0, 0.0)));
    }
    Ok(Immittance::Admittance(C64::new(0.0, omega * spec.c - 1.0 / (omega * spec.l))))
}

/// Input impedance at the drive port, iterating cell by cell from the
/// termination.
pub fn input_impedance(spec: &CircuitSpec, omega: f64) -> Result<Immittance, CircuitError> {
    check_frequency(omega)?;
    let z0 = spec.reference_impedance();
    let junction = match junction_impedance(spec, omega)? {
        Immittance::Impedance(z) => Normalized::Z(z / z0),
        Immittance::Admittance(y) => Normalized::Y(y * z0),
    }
    .balanced();
    let shunt = C64::new(0.0, omega * spec.cg * z0);

    let mut state = match spec.termination {
        Termination::Open => Normalized::Y(C64::new(0.0, 0.0)),
        Termination::Short => Normalized::Z(C64::new(0.0, 0.0)),
        Termination::Load(zl) => Normalized::Z(zl / z0).balanced(),
    };
    for _ in 0..spec.n {
        state = state.parallel(shunt).series(junction);
    }

    if !state.is_finite() {
        return Ok(Immittance::Admittance(C64::new(0.0, 0.0)));
    }
    Ok(match state {
        Normalized::Z(z) => Immittance::Impedance(z * z0),
        Normalized::Y(y) => Immittance::Admittance(y / z0),
    })
}

/// Standing-wave mode frequency ω_n = ω_{n,0}/√(1 + (ω_{n,0}/ω_p)²) with
/// ω_{n,0} = nπ/(N√(L·Cg)) for an open end and (n − ½)π/(N√(L·Cg)) for a
/// shorted end.
pub fn dispersion(spec: &CircuitSpec, n: usize) -> Result<f64, CircuitError> {
    let bare = bare_frequency(spec, n)?;
    Ok(dress(spec, bare))
}

fn bare_frequency(spec: &CircuitSpec, n: usize) -> Result<f64, CircuitError> {
    if n == 0 {
        return Err(CircuitError::InvalidModeIndex);
    }
    let index = match spec.termination {
        Termination::Open => n as f64,
        Termination::Short => n as f64 - 0.5,
        Termination::Load(_) => return Err(CircuitError::UnsupportedTermination),
    };
    Ok(index * spec.mode_spacing())
}

fn dress(spec: &CircuitSpec, bare: f64) -> f64 {
    if spec.c == 0.0 {
        return bare;
    }
    let x = bare / spec.plasma_frequency();
    bare / (1.0 + x * x).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionRow {
    pub n: usize,
    pub omega_n0: f64,
    pub omega_n: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionTable {
    pub rows: Vec<DispersionRow>,
}

impl DispersionTable {
    pub fn new(spec: &CircuitSpec, n_max: usize) -> Result<Self, CircuitError> {
        let rows = (1..=n_max)
            .map(|n| {
                let omega_n0 = bare_frequency(spec, n)?;
                Ok(DispersionRow { n, omega_n0, omega_n: dress(spec, omega_n0) })
            })
            .collect::<Result<_, CircuitError>>()?;
        Ok(Self { rows })
    }

    /// Writes `n,omega_n0,omega_n`, frequencies divided by `unit`.
    pub fn write_csv<W: Write>(&self, out: W, unit: f64) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "omega_n0", "omega_n"])?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                crate::io::fmt_f64(r.omega_n0 / unit),
                crate::io::fmt_f64(r.omega_n / unit),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Log-spaced grid from `omega_min` to `omega_max` inclusive.
pub fn log_grid(omega_min: f64, omega_max: f64, points: usize) -> Vec<f64> {
    let ratio = (omega_max / omega_min).ln();
    (0..points)
        .map(|k| if k + 1 == points { omega_max } else { omega_min * (ratio * k as f64 / (points - 1) as f64).exp() })
        .collect()
}

/// Grid size giving [`POINTS_PER_SPACING`] points per line mode spacing at
/// the top of a log grid (the coarsest end).
pub fn default_grid_points(spec: &CircuitSpec, omega_min: f64, omega_max: f64) -> usize {
    let step = spec.mode_spacing() / POINTS_PER_SPACING;
    let growth = (1.0 + step / omega_max).ln();
    let n = ((omega_max / omega_min).ln() / growth).ceil() as usize + 1;
    n.max(3)
}

/// Resonances of the input impedance in `[omega_min, omega_max]`.
///
/// |Z| is maximal where the reactance jumps from +∞ to −∞. The scan brackets
/// every grid interval whose reactance goes from inductive to capacitive and
/// bisects it to relative width [`MODE_TOLERANCE`]. Every termination is
/// scanned for impedance poles; an interval holding more than one pole
/// yields one of them, so `grid_points` must resolve the spectrum.
pub fn find_modes(
    spec: &CircuitSpec,
    omega_min: f64,
    omega_max: f64,
    grid_points: usize,
) -> Result<Vec<f64>, CircuitError> {
    if !(omega_min > 0.0 && omega_min < omega_max && omega_max.is_finite()) {
        return Err(CircuitError::InvalidRange(format!(
            "need 0 < omega_min < omega_max, got [{omega_min}, {omega_max}]"
        )));
    }
    if grid_points < 3 {
        return Err(CircuitError::InvalidRange(format!("need at least 3 grid points, got {grid_points}")));
    }
    let grid = log_grid(omega_min, omega_max, grid_points);
    let mut modes = Vec::new();
    let mut prev: Option<(f64, bool)> = None;
    for &omega in &grid {
        match input_impedance(spec, omega)?.inductive() {
            None => {
                modes.push(omega);
                prev = None;
            }
            Some(inductive) => {
                if let Some((lo, true)) = prev {
                    if !inductive {
                        modes.push(bisect_pole(spec, lo, omega)?);
                    }
                }
                prev = Some((omega, inductive));
            }
        }
    }
    Ok(modes)
}

fn bisect_pole(spec: &CircuitSpec, mut lo: f64, mut hi: f64) -> Result<f64, CircuitError> {
    while hi - lo > MODE_TOLERANCE * hi {
        let mid = 0.5 * (lo + hi);
        match input_impedance(spec, mid)?.inductive() {
            None => return Ok(mid),
            Some(true) => lo = mid,
            Some(false) => hi = mid,
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpedancePoint {
    pub omega: f64,
    pub response: Immittance,
}

/// Linear sweep of the input impedance; `omega_min`/`omega_max` are absolute
/// frequencies.
pub fn impedance_sweep(
    spec: &CircuitSpec,
    omega_min: f64,
    omega_max: f64,
    points: usize,
) -> Result<Vec<ImpedancePoint>, CircuitError> {
    if !(omega_min > 0.0 && omega_min < omega_max && omega_max.is_finite()) {
        return Err(CircuitError::InvalidRange(format!(
            "need 0 < omega_min < omega_max, got [{omega_min}, {omega_max}]"
        )));
    }
    if points < 2 {
        return Err(CircuitError::InvalidRange("a sweep needs at least 2 points".into()));
    }
    let step = (omega_max - omega_min) / (points - 1) as f64;
    (0..points)
        .map(|k| {
            let omega = if k + 1 == points { omega_max } else { omega_min + step * k as f64 };
            Ok(ImpedancePoint { omega, response: input_impedance(spec, omega)? })
        })
        .collect()
}

/// Writes `omega,re_z,im_z,abs_z`, frequencies divided by `unit`. Poles are
/// written as `inf` magnitude with `nan` components.
pub fn write_impedance_csv<W: Write>(out: W, sweep: &[ImpedancePoint], unit: f64) -> csv::Result<()> {
    use crate::io::fmt_f64;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["omega", "re_z", "im_z", "abs_z"])?;
    for p in sweep {
        let (re, im) = p.response.impedance().map_or((f64::NAN, f64::NAN), |z| (z.re, z.im));
        w.write_record([fmt_f64(p.omega / unit), fmt_f64(re), fmt_f64(im), fmt_f64(p.response.abs_impedance())])?;
    }
    w.flush()?;
    Ok(())
}
