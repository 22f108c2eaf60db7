//! Monte-Carlo driver: repeated random placements, SINR CDFs, and the
//! search for the smallest antenna count meeting a percentile target.
//!
//! Determinism contract: trial t draws from ChaCha stream (seed, t), so the
//! sample set is a pure function of (config, n, seed) regardless of worker
//! count or scheduling. Redraws within a trial continue on the same stream.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{los_channel, noise_power, ChannelMatrix, REFERENCE_TEMPERATURE};
use crate::config::{Layout, ScenarioConfig};
use crate::error::Error;
use crate::geometry::{build_array, build_seven_cells, place_terminals, ArrayLayout, TerminalPlacement};
use crate::power_control::{
    maxmin_downlink_multicell, maxmin_downlink_single, maxmin_uplink_multicell,
    maxmin_uplink_single, CrossGains,
};
use crate::zf_core::{zf_diagnostics, zf_precoders_from};

/// Redraw budget for a single trial; exceeding it means the scenario
/// produces singular channels systematically, not by bad luck.
const MAX_REDRAWS_PER_TRIAL: usize = 64;
/// Minimum trial count for the confirmation pass of the antenna search.
const CONFIRM_TRIALS_MIN: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Link {
    Uplink,
    Downlink,
}

impl Link {
    pub fn name(self) -> &'static str {
        match self {
            Link::Uplink => "uplink",
            Link::Downlink => "downlink",
        }
    }
}

/// Sorted per-realization max-min SINRs for one link direction.
#[derive(Clone, Debug)]
pub struct CdfSummary {
    /// Ascending, in dB.
    pub sorted_samples_db: Vec<f64>,
    pub n_trials: usize,
    pub n_degenerate_redraws: usize,
}

impl CdfSummary {
    fn from_samples(mut samples_db: Vec<f64>, redraws: usize) -> CdfSummary {
        samples_db.sort_by(f64::total_cmp);
        CdfSummary {
            n_trials: samples_db.len(),
            sorted_samples_db: samples_db,
            n_degenerate_redraws: redraws,
        }
    }

    /// Quantile by linear interpolation between order statistics: the value
    /// at fractional rank q·(n−1) of the ascending samples.
    pub fn percentile(&self, q: f64) -> Result<f64, Error> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("percentile q must lie in (0, 1), got {q}")));
        }
        let n = self.sorted_samples_db.len();
        if n == 0 {
            return Err(Error::Domain("percentile of an empty sample set".into()));
        }
        let pos = q * (n - 1) as f64;
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        if i + 1 >= n {
            return Ok(self.sorted_samples_db[n - 1]);
        }
        Ok(self.sorted_samples_db[i] * (1.0 - frac) + self.sorted_samples_db[i + 1] * frac)
    }
}

/// Paired uplink/downlink CDFs from one batch of realizations.
#[derive(Clone, Debug)]
pub struct TrialsOutput {
    pub uplink: CdfSummary,
    pub downlink: CdfSummary,
}

/// Outcome of the minimal-antenna-count search.
#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub m_star: usize,
    pub target_sinr_db: f64,
    pub percentile: f64,
    /// Exponential bracket (below, at-or-above) that seeded the binary
    /// search; equal endpoints mean the floor M = K already met the target.
    pub bracket: (usize, usize),
    pub trials_per_eval: usize,
}

fn noise_floors(cfg: &ScenarioConfig) -> (f64, f64) {
    (
        noise_power(cfg.bandwidth, cfg.noise_figure_bs, REFERENCE_TEMPERATURE),
        noise_power(cfg.bandwidth, cfg.noise_figure_terminal, REFERENCE_TEMPERATURE),
    )
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn collect_output(
    rows: Vec<(f64, f64, usize)>,
    n: usize,
) -> Result<TrialsOutput, Error> {
    let redraws: usize = rows.iter().map(|r| r.2).sum();
    if redraws as f64 > 0.01 * n as f64 {
        return Err(Error::DegenerateAbort { redraws, n_trials: n });
    }
    let ul: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let dl: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(TrialsOutput {
        uplink: CdfSummary::from_samples(ul, redraws),
        downlink: CdfSummary::from_samples(dl, redraws),
    })
}

/// Single-cell batch: n independent placements, closed-form max-min on both
/// links per realization.
pub fn run_trials(cfg: &ScenarioConfig, n: usize, seed: u64) -> Result<TrialsOutput, Error> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::Config("trial count must be at least 1".into()));
    }
    let array = build_array(cfg.array_shape, cfg.m, cfg.carrier_frequency, [0.0, 0.0], cfg.bs_height)?;
    let (sigma2_ul, sigma2_dl) = noise_floors(cfg);
    let rows = (0..n)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let mut redraws = 0usize;
            loop {
                let placement = place_terminals(
                    &mut rng,
                    cfg.k,
                    0,
                    [0.0, 0.0],
                    cfg.cell_radius,
                    cfg.terminal_height,
                );
                let g = los_channel(&array, &placement, cfg.amplitude_mode);
                match zf_diagnostics(&g) {
                    Ok(diag) => {
                        let ul = maxmin_uplink_single(&diag, sigma2_ul, cfg.p_ul_max);
                        let dl = maxmin_downlink_single(&diag, sigma2_dl, cfg.p_dl);
                        return Ok((ul.sinr_db(), dl.sinr_db(), redraws));
                    }
                    Err(Error::SingularChannel { .. }) => {
                        redraws += 1;
                        if redraws > MAX_REDRAWS_PER_TRIAL {
                            return Err(Error::DegenerateAbort { redraws, n_trials: n });
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
        })
        .collect::<Result<Vec<_>, Error>>()?;
    collect_output(rows, n)
}

/// One seven-cell realization: placements for all cells from one stream,
/// per-cell ZF against the serving channel, cross-gain matrices against the
/// interfering cells, then the system-wide solvers. A singular serving Gram
/// anywhere surfaces as [`Error::SingularChannel`] so the caller can redraw
/// the whole realization.
fn seven_cell_realization(
    rng: &mut ChaCha8Rng,
    cfg: &ScenarioConfig,
    centers: &[[f64; 2]],
    arrays: &[ArrayLayout],
    sigma2_ul: f64,
    sigma2_dl: f64,
) -> Result<(f64, f64), Error> {
    let n_cells = arrays.len();
    let k = cfg.k;
    let total = n_cells * k;

    let parts: Vec<TerminalPlacement> = (0..n_cells)
        .map(|c| place_terminals(rng, k, c, centers[c], cfg.cell_radius, cfg.terminal_height))
        .collect();
    let all = TerminalPlacement::concat(&parts);

    // channels[b] is the M×(7K) matrix from base station b to every
    // terminal in the system.
    let channels: Vec<ChannelMatrix> = arrays
        .iter()
        .map(|a| los_channel(a, &all, cfg.amplitude_mode))
        .collect();

    let mut inv_gain = vec![0.0f64; total];
    let mut precoders = Vec::with_capacity(n_cells);
    for c in 0..n_cells {
        let own: Vec<usize> = (c * k..(c + 1) * k).collect();
        let g_c = channels[c].select_columns(&own);
        let diag = zf_diagnostics(&g_c)?;
        let prec = zf_precoders_from(&g_c, &diag)?;
        inv_gain[c * k..(c + 1) * k].copy_from_slice(&diag.inv_gram_diag);
        precoders.push(prec);
    }

    // Uplink cross gains: |v_tᴴ g_j|² with v_t the serving cell's combiner
    // for terminal t and g_j the channel of foreign terminal j into that
    // same cell. Downlink: |g_{t←cell(j)}ᴴ a_j|², the power cell(j)'s
    // precoder for its terminal j leaks onto terminal t.
    let mut c_ul = CrossGains::zeros(total);
    let mut d_dl = CrossGains::zeros(total);
    for t in 0..total {
        let cell_t = t / k;
        let v_t = precoders[cell_t].column(t % k);
        for j in 0..total {
            let cell_j = j / k;
            if cell_j == cell_t {
                continue;
            }
            let g_into_cell_t = channels[cell_t].column(j);
            let mut dot = Complex64::new(0.0, 0.0);
            for (v, g) in v_t.iter().zip(g_into_cell_t) {
                dot += v.conj() * g;
            }
            c_ul.set(t, j, dot.norm_sqr());

            let a_j = precoders[cell_j].column(j % k);
            let g_from_cell_j = channels[cell_j].column(t);
            let mut leak = Complex64::new(0.0, 0.0);
            for (g, a) in g_from_cell_j.iter().zip(a_j) {
                leak += g.conj() * a;
            }
            d_dl.set(t, j, leak.norm_sqr());
        }
    }

    let cells_idx: Vec<Vec<usize>> = (0..n_cells).map(|c| (c * k..(c + 1) * k).collect()).collect();
    let ul = maxmin_uplink_multicell(&inv_gain, &c_ul, sigma2_ul, cfg.p_ul_max)?;
    let dl = maxmin_downlink_multicell(&inv_gain, &d_dl, sigma2_dl, cfg.p_dl, &cells_idx)?;
    Ok((ul.sinr_db(), dl.sinr_db()))
}

/// Multi-cell batch. A single-cell layout delegates to [`run_trials`], so
/// the two entry points agree exactly on degenerate configs.
pub fn run_multicell(cfg: &ScenarioConfig, n: usize, seed: u64) -> Result<TrialsOutput, Error> {
    if cfg.layout == Layout::Single {
        return run_trials(cfg, n, seed);
    }
    cfg.validate()?;
    if n == 0 {
        return Err(Error::Config("trial count must be at least 1".into()));
    }
    let cells = build_seven_cells(cfg.cell_radius, cfg.intersite)?;
    let arrays = cells
        .centers
        .iter()
        .map(|&c| build_array(cfg.array_shape, cfg.m, cfg.carrier_frequency, c, cfg.bs_height))
        .collect::<Result<Vec<_>, Error>>()?;
    let (sigma2_ul, sigma2_dl) = noise_floors(cfg);
    let rows = (0..n)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let mut redraws = 0usize;
            loop {
                match seven_cell_realization(
                    &mut rng,
                    cfg,
                    &cells.centers,
                    &arrays,
                    sigma2_ul,
                    sigma2_dl,
                ) {
                    Ok((ul, dl)) => return Ok((ul, dl, redraws)),
                    Err(Error::SingularChannel { .. }) => {
                        redraws += 1;
                        if redraws > MAX_REDRAWS_PER_TRIAL {
                            return Err(Error::DegenerateAbort { redraws, n_trials: n });
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
        })
        .collect::<Result<Vec<_>, Error>>()?;
    collect_output(rows, n)
}

/// Smallest M whose q-quantile SINR meets `target_db`, by exponential
/// bracketing from the ZF floor M = K and binary search, all evaluations
/// sharing one seed (common random placements across M). A confirmation
/// pass at max(n, 2000) trials then walks M* by single steps until
/// quantile(M*) ≥ target > quantile(M* − 1) holds at the larger count.
pub fn find_min_antennas(
    cfg: &ScenarioConfig,
    link: Link,
    target_db: f64,
    q: f64,
    n: usize,
    seed: u64,
) -> Result<SearchResult, Error> {
    cfg.validate()?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("percentile q must lie in (0, 1), got {q}")));
    }
    if n == 0 {
        return Err(Error::Config("trials per evaluation must be at least 1".into()));
    }
    let mut cache: HashMap<(usize, usize), f64> = HashMap::new();
    let mut eval = |m: usize, trials: usize| -> Result<f64, Error> {
        if let Some(&v) = cache.get(&(m, trials)) {
            return Ok(v);
        }
        let mut scenario = cfg.clone();
        scenario.m = m;
        let out = run_multicell(&scenario, trials, seed)?;
        let cdf = match link {
            Link::Uplink => &out.uplink,
            Link::Downlink => &out.downlink,
        };
        let v = cdf.percentile(q)?;
        cache.insert((m, trials), v);
        Ok(v)
    };

    let m_min = cfg.k;
    let m_cap = cfg.search_m_max;
    let bracket;
    let mut m_star;
    if eval(m_min, n)? >= target_db {
        bracket = (m_min, m_min);
        m_star = m_min;
    } else {
        let mut below = m_min;
        loop {
            if below >= m_cap {
                return Err(Error::TargetUnattainable { target_db, m_max: m_cap });
            }
            let next = (below * 2).min(m_cap);
            if eval(next, n)? >= target_db {
                bracket = (below, next);
                break;
            }
            below = next;
        }
        let (mut lo, mut hi) = bracket;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if eval(mid, n)? >= target_db {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        m_star = hi;
    }

    let n_conf = n.max(CONFIRM_TRIALS_MIN);
    while eval(m_star, n_conf)? < target_db {
        m_star += 1;
        if m_star > m_cap {
            return Err(Error::TargetUnattainable { target_db, m_max: m_cap });
        }
    }
    while m_star > m_min && eval(m_star - 1, n_conf)? >= target_db {
        m_star -= 1;
    }
    Ok(SearchResult {
        m_star,
        target_sinr_db: target_db,
        percentile: q,
        bracket,
        trials_per_eval: n,
    })
}
