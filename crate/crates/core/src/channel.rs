//! Line-of-sight channel generation (Friis free space) and noise power.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::Error;
use crate::geometry::{distance_3d, ArrayLayout, TerminalPlacement};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Standard reference temperature for noise powers, Kelvin.
pub const REFERENCE_TEMPERATURE: f64 = 290.0;

/// How the per-entry amplitude is taken.
///
/// `Center` uses the distance from the array center to the terminal for the
/// whole column (the usual far-field convention: apertures of a few meters
/// against ranges of tens to hundreds of meters). `PerElement` uses the
/// exact element-to-terminal distance and exists to measure how little the
/// difference matters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeMode {
    Center,
    PerElement,
}

/// Complex M×K channel matrix, column-major (one column per terminal).
#[derive(Clone, Debug)]
pub struct ChannelMatrix {
    pub m: usize,
    pub k: usize,
    pub entries: Vec<Complex64>,
    pub carrier_wavelength: f64,
}

impl ChannelMatrix {
    pub fn column(&self, k: usize) -> &[Complex64] {
        &self.entries[k * self.m..(k + 1) * self.m]
    }

    pub fn entry(&self, m: usize, k: usize) -> Complex64 {
        self.entries[k * self.m + m]
    }

    /// New matrix keeping only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> ChannelMatrix {
        let mut entries = Vec::with_capacity(self.m * cols.len());
        for &c in cols {
            entries.extend_from_slice(self.column(c));
        }
        ChannelMatrix {
            m: self.m,
            k: cols.len(),
            entries,
            carrier_wavelength: self.carrier_wavelength,
        }
    }
}

/// Friis free-space power gain β = (λ/(4πd))² at 0 dBi on both ends.
pub fn path_gain(d: f64, lambda: f64) -> Result<f64, Error> {
    if d <= 0.0 {
        return Err(Error::Domain(format!("path distance must be positive, got {d}")));
    }
    Ok((lambda / (4.0 * PI * d)).powi(2))
}

/// Thermal noise power in watts: k_B·T·B·10^(NF/10).
pub fn noise_power(bandwidth: f64, noise_figure_db: f64, temperature: f64) -> f64 {
    BOLTZMANN * temperature * bandwidth * 10f64.powf(noise_figure_db / 10.0)
}

/// Noise budget of one receiver.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NoiseModel {
    pub bandwidth: f64,
    pub noise_figure_db: f64,
    pub temperature: f64,
    pub noise_power: f64,
}

impl NoiseModel {
    pub fn new(bandwidth: f64, noise_figure_db: f64, temperature: f64) -> NoiseModel {
        NoiseModel {
            bandwidth,
            noise_figure_db,
            temperature,
            noise_power: noise_power(bandwidth, noise_figure_db, temperature),
        }
    }
}

/// Deterministic LoS channel: amplitude from Friis, phase from the exact
/// element-to-terminal distance, g_mk = a·exp(−j·2π·d_mk/λ).
pub fn los_channel(
    array: &ArrayLayout,
    terminals: &TerminalPlacement,
    mode: AmplitudeMode,
) -> ChannelMatrix {
    let m = array.elements.len();
    let k = terminals.len();
    let lambda = array.carrier_wavelength;
    let mut entries = Vec::with_capacity(m * k);
    for pos in &terminals.positions {
        let d_center = distance_3d(array.center, *pos);
        let amp_center = lambda / (4.0 * PI * d_center);
        for el in &array.elements {
            let d = distance_3d(*el, *pos);
            let amp = match mode {
                AmplitudeMode::Center => amp_center,
                AmplitudeMode::PerElement => lambda / (4.0 * PI * d),
            };
            let phase = -2.0 * PI * d / lambda;
            let (s, c) = phase.sin_cos();
            entries.push(Complex64::new(amp * c, amp * s));
        }
    }
    debug_assert!(entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    ChannelMatrix { m, k, entries, carrier_wavelength: lambda }
}
