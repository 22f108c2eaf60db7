//! Shannon bandwidth/power tradeoffs: capacity over a widening band, the
//! radiated power needed to hold a rate, and the pilot-driven throughput
//! cap where SNR falls as 1/B² once channel estimates come from uplink
//! pilots of fixed energy.

use serde::Serialize;

use crate::error::Error;

/// One point of a link-budget sweep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LinkBudgetPoint {
    /// Hz.
    pub bandwidth: f64,
    /// W.
    pub received_power: f64,
    /// W/Hz.
    pub noise_density: f64,
    /// bit/s.
    pub capacity: f64,
}

impl LinkBudgetPoint {
    pub fn new(bandwidth: f64, received_power: f64, noise_density: f64) -> Result<LinkBudgetPoint, Error> {
        Ok(LinkBudgetPoint {
            bandwidth,
            received_power,
            noise_density,
            capacity: capacity(bandwidth, received_power, noise_density)?,
        })
    }
}

/// Noise density anchored to the reference link budget: 10 W over 20 MHz
/// sustains 60 Mbit/s, i.e. an SNR of 7. Keeps the power examples
/// self-contained without choosing a receiver temperature.
pub fn calibrated_noise_density() -> f64 {
    10.0 / (20e6 * 7.0)
}

fn check_positive(pairs: &[(&str, f64)]) -> Result<(), Error> {
    for (name, v) in pairs {
        if !(*v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(())
}

/// C = B·log₂(1 + P/(B·N₀)).
pub fn capacity(b: f64, p: f64, n0: f64) -> Result<f64, Error> {
    check_positive(&[("bandwidth", b), ("power", p), ("noise density", n0)])?;
    let snr = p / (b * n0);
    Ok(b * (1.0 + snr).log2())
}

/// Inverse of [`capacity`] in P: the power holding rate `r` over band `b`,
/// P = B·N₀·(2^(R/B) − 1).
pub fn power_for_rate(b: f64, r: f64, n0: f64) -> Result<f64, Error> {
    check_positive(&[("bandwidth", b), ("rate", r), ("noise density", n0)])?;
    Ok(b * (n0 * ((2.0f64).powf(r / b) - 1.0)))
}

/// Throughput when the post-beamforming SNR is pilot-limited:
/// B·log₂(1 + ρ₀·B₀²/B²), with ρ₀ the SNR at reference bandwidth B₀.
pub fn pilot_limited_throughput(b: f64, rho0: f64, b0: f64) -> Result<f64, Error> {
    check_positive(&[("bandwidth", b), ("reference SNR", rho0), ("reference bandwidth", b0)])?;
    let r = b0 / b;
    Ok(b * (1.0 + rho0 * r * r).log2())
}

/// Bandwidth maximizing [`pilot_limited_throughput`], by golden-section
/// search on log B. The optimum satisfies ln(1+u) = 2u/(1+u) for
/// u = ρ₀B₀²/B², a constant u* ≈ 3.92, so B* = B₀·√(ρ₀/u*); the bracket
/// around B₀·√ρ₀ always contains it.
pub fn optimal_pilot_bandwidth(rho0: f64, b0: f64) -> Result<f64, Error> {
    check_positive(&[("reference SNR", rho0), ("reference bandwidth", b0)])?;
    let center = (b0 * rho0.sqrt()).ln();
    let mut lo = center - 8.0;
    let mut hi = center + 8.0;
    let value = |x: f64| pilot_limited_throughput(x.exp(), rho0, b0).expect("positive by construction");
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = value(x1);
    let mut f2 = value(x2);
    while hi - lo > 1e-12 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = value(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = value(x1);
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}
