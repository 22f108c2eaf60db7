//! Scenario parameters: defaults, flat key=value parsing with unit
//! suffixes, validation.

use serde::Serialize;

use crate::channel::{AmplitudeMode, SPEED_OF_LIGHT};
use crate::error::Error;
use crate::geometry::ArrayShape;

/// Cell deployment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    Single,
    /// Hexagonal: one center cell, six neighbors at `intersite` distance.
    SevenCell,
}

/// Full parameter set for one scenario. Field names double as the keys of
/// the config-file format.
#[derive(Clone, Debug, Serialize)]
pub struct ScenarioConfig {
    /// Carrier frequency, Hz.
    pub carrier_frequency: f64,
    /// Base-station antennas.
    pub m: usize,
    /// Simultaneously multiplexed terminals per cell.
    pub k: usize,
    pub array_shape: ArrayShape,
    /// Cell radius, m.
    pub cell_radius: f64,
    /// Base-station (array) height, m.
    pub bs_height: f64,
    /// Terminal height, m.
    pub terminal_height: f64,
    /// Base-station radiated power pool, downlink, W.
    pub p_dl: f64,
    /// Per-terminal radiated power cap, uplink, W.
    pub p_ul_max: f64,
    /// Signal bandwidth, Hz.
    pub bandwidth: f64,
    /// Base-station receiver noise figure, dB (uplink noise floor).
    pub noise_figure_bs: f64,
    /// Terminal receiver noise figure, dB (downlink noise floor).
    pub noise_figure_terminal: f64,
    pub layout: Layout,
    /// Distance between neighboring base stations, m (seven-cell only).
    pub intersite: f64,
    pub n_trials: usize,
    pub seed: u64,
    pub amplitude_mode: AmplitudeMode,
    /// Upper bound on M during antenna search.
    pub search_m_max: usize,
}

impl Default for ScenarioConfig {
    /// The 1.9 GHz reference system: 128-antenna circular array, 18
    /// terminals, 250 m cell, 2 W downlink pool, 200 mW uplink cap, 50 MHz,
    /// 9 dB noise figures at both ends.
    fn default() -> ScenarioConfig {
        ScenarioConfig {
            carrier_frequency: 1.9e9,
            m: 128,
            k: 18,
            array_shape: ArrayShape::Circular,
            cell_radius: 250.0,
            bs_height: 30.0,
            terminal_height: 1.5,
            p_dl: 2.0,
            p_ul_max: 0.2,
            bandwidth: 50e6,
            noise_figure_bs: 9.0,
            noise_figure_terminal: 9.0,
            layout: Layout::Single,
            intersite: 500.0,
            n_trials: 2000,
            seed: 1,
            amplitude_mode: AmplitudeMode::Center,
            search_m_max: 32768,
        }
    }
}

impl ScenarioConfig {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.m < self.k {
            return Err(Error::Config(format!(
                "m = {} must be at least k = {} for zero-forcing",
                self.m, self.k
            )));
        }
        let positives = [
            ("carrier_frequency", self.carrier_frequency),
            ("cell_radius", self.cell_radius),
            ("bs_height", self.bs_height),
            ("terminal_height", self.terminal_height),
            ("p_dl", self.p_dl),
            ("p_ul_max", self.p_ul_max),
            ("bandwidth", self.bandwidth),
            ("intersite", self.intersite),
        ];
        for (name, v) in positives {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("noise_figure_bs", self.noise_figure_bs),
            ("noise_figure_terminal", self.noise_figure_terminal),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if self.n_trials == 0 {
            return Err(Error::Config("n_trials must be at least 1".into()));
        }
        if self.search_m_max < self.k {
            return Err(Error::Config(format!(
                "search_m_max = {} is below k = {}",
                self.search_m_max, self.k
            )));
        }
        Ok(())
    }
}

/// Parse a scalar with an optional SI suffix. Suffixes are case-sensitive;
/// the bare number is taken as the base unit.
pub fn parse_quantity(s: &str) -> Option<f64> {
    const SUFFIXES: [(&str, f64); 11] = [
        ("GHz", 1e9),
        ("MHz", 1e6),
        ("kHz", 1e3),
        ("Hz", 1.0),
        ("mW", 1e-3),
        ("kW", 1e3),
        ("W", 1.0),
        ("mm", 1e-3),
        ("km", 1e3),
        ("m", 1.0),
        ("dB", 1.0),
    ];
    let s = s.trim();
    for (suffix, mult) in SUFFIXES {
        if let Some(num) = s.strip_suffix(suffix) {
            return num.trim().parse::<f64>().ok().map(|v| v * mult);
        }
    }
    s.parse::<f64>().ok()
}

/// Parse a flat `key = value` document (one pair per line, `#` comments)
/// into a config, with every omitted key taking its default. Unknown keys
/// are rejected so typos cannot silently fall back to defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, Error> {
    let mut cfg = ScenarioConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {line_no}: expected `key = value`, got `{line}`"))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| {
            Error::Config(format!("line {line_no}: {key}: expected {what}, got `{value}`"))
        };

        let quantity = || parse_quantity(value).ok_or_else(|| bad("a number"));
        let count = || value.parse::<usize>().map_err(|_| bad("a nonnegative integer"));
        match key {
            "carrier_frequency" => cfg.carrier_frequency = quantity()?,
            "m" => cfg.m = count()?,
            "k" => cfg.k = count()?,
            "array_shape" => {
                cfg.array_shape = match value {
                    "circular" => ArrayShape::Circular,
                    "linear" => ArrayShape::Linear,
                    "rectangular" => ArrayShape::Rectangular,
                    _ => return Err(bad("circular, linear, or rectangular")),
                }
            }
            "cell_radius" => cfg.cell_radius = quantity()?,
            "bs_height" => cfg.bs_height = quantity()?,
            "terminal_height" => cfg.terminal_height = quantity()?,
            "p_dl" => cfg.p_dl = quantity()?,
            "p_ul_max" => cfg.p_ul_max = quantity()?,
            "bandwidth" => cfg.bandwidth = quantity()?,
            "noise_figure_bs" => cfg.noise_figure_bs = quantity()?,
            "noise_figure_terminal" => cfg.noise_figure_terminal = quantity()?,
            "layout" => {
                cfg.layout = match value {
                    "single" => Layout::Single,
                    "seven_cell" => Layout::SevenCell,
                    _ => return Err(bad("single or seven_cell")),
                }
            }
            "intersite" => cfg.intersite = quantity()?,
            "n_trials" => cfg.n_trials = count()?,
            "seed" => cfg.seed = value.parse::<u64>().map_err(|_| bad("a 64-bit integer"))?,
            "amplitude_mode" => {
                cfg.amplitude_mode = match value {
                    "center" => AmplitudeMode::Center,
                    "per_element" => AmplitudeMode::PerElement,
                    _ => return Err(bad("center or per_element")),
                }
            }
            "search_m_max" => cfg.search_m_max = count()?,
            _ => {
                return Err(Error::Config(format!("line {line_no}: unknown key `{key}`")));
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
