//! Max-min SINR power allocation.
//!
//! Single cell: with zero-forcing and perfect CSI there is no intra-cell
//! interference, so the max-min optimum has a closed form driven by the
//! inverse-Gram diagonal. Coupled cells: the largest common SINR target t is
//! found by bisection; each candidate t is tested with the monotone
//! standard-interference-function iteration, with a direct linear solve as
//! the decision procedure when the iteration has not converged within its
//! cap (near the optimum the iteration contracts arbitrarily slowly, and
//! truncating it would bias the reported SINR low).

use serde::Serialize;

use crate::error::Error;
use crate::zf_core::{kahan_sum, ZfDiagnostics};

/// Relative width at which the bisection bracket on t stops. Tight enough
/// that solver output can be compared against closed-form oracles at 1e-6.
pub const BISECT_REL_TOL: f64 = 1e-7;
/// Iteration cap for the monotone fixed point before deferring to the
/// direct solve.
const FIXED_POINT_MAX_ITERS: usize = 500;
/// Componentwise relative change at which the fixed point counts as
/// converged.
const FIXED_POINT_REL_TOL: f64 = 1e-12;
/// Power caps are enforced with this relative slack so that allocations
/// meeting a cap with equality survive rounding.
const CAP_REL_SLACK: f64 = 1e-9;

/// Which constraint is active at the optimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    /// A terminal transmits at its individual cap (uplink).
    TerminalCap(usize),
    /// A cell's downlink power pool is exhausted.
    CellPool(usize),
}

/// Per-terminal transmit powers and the common SINR they achieve.
#[derive(Clone, Debug)]
pub struct PowerAllocation {
    pub powers: Vec<f64>,
    /// Common max-min SINR, linear.
    pub sinr: f64,
    pub binding: Binding,
}

impl PowerAllocation {
    pub fn sinr_db(&self) -> f64 {
        10.0 * self.sinr.log10()
    }
}

/// Dense nonnegative cross-gain matrix, row-major; entry (k, j) is the
/// interference power coupling from transmitter j into link k. Same-cell
/// entries are zero (zero-forcing nulls them).
#[derive(Clone, Debug)]
pub struct CrossGains {
    pub n: usize,
    pub entries: Vec<f64>,
}

impl CrossGains {
    pub fn zeros(n: usize) -> CrossGains {
        CrossGains { n, entries: vec![0.0; n * n] }
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.entries[k * self.n..(k + 1) * self.n]
    }

    pub fn set(&mut self, k: usize, j: usize, v: f64) {
        self.entries[k * self.n + j] = v;
    }
}

enum Caps<'a> {
    PerTerminal(f64),
    PerCell { budget: f64, cells: &'a [Vec<usize>] },
}

impl Caps<'_> {
    fn violated(&self, p: &[f64]) -> bool {
        match self {
            Caps::PerTerminal(cap) => p.iter().any(|&x| x > cap * (1.0 + CAP_REL_SLACK)),
            Caps::PerCell { budget, cells } => cells.iter().any(|cell| {
                cell.iter().map(|&k| p[k]).sum::<f64>() > budget * (1.0 + CAP_REL_SLACK)
            }),
        }
    }

    fn binding(&self, p: &[f64]) -> Binding {
        match self {
            Caps::PerTerminal(_) => {
                let k = p
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(k, _)| k)
                    .unwrap_or(0);
                Binding::TerminalCap(k)
            }
            Caps::PerCell { cells, .. } => {
                let c = cells
                    .iter()
                    .map(|cell| cell.iter().map(|&k| p[k]).sum::<f64>())
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(c, _)| c)
                    .unwrap_or(0);
                Binding::CellPool(c)
            }
        }
    }
}

/// Single-cell uplink: SINR_k = p_k·gain_k/σ² with gain_k = 1/[(GᴴG)⁻¹]_kk,
/// so the optimum puts the weakest terminal at the cap and scales the rest
/// to meet it: SINR* = P_max/(σ²·max_k [(GᴴG)⁻¹]_kk).
pub fn maxmin_uplink_single(diag: &ZfDiagnostics, sigma2: f64, p_max: f64) -> PowerAllocation {
    let inv = &diag.inv_gram_diag;
    let (k_max, &inv_max) = inv
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least one terminal");
    let sinr = p_max / (sigma2 * inv_max);
    // p_k = SINR*·σ²·inv_k, computed as a fraction of the cap so the binding
    // terminal lands on P_max exactly.
    let powers = inv.iter().map(|&i| p_max * (i / inv_max)).collect();
    PowerAllocation { powers, sinr, binding: Binding::TerminalCap(k_max) }
}

/// Single-cell downlink: the full pool P_dl is shared so that every
/// terminal sees the same SINR: SINR* = P_dl/(σ²·Σ_k [(GᴴG)⁻¹]_kk).
pub fn maxmin_downlink_single(diag: &ZfDiagnostics, sigma2: f64, p_dl: f64) -> PowerAllocation {
    let inv = &diag.inv_gram_diag;
    let total = kahan_sum(inv.iter().copied());
    let sinr = p_dl / (sigma2 * total);
    let powers = inv.iter().map(|&i| p_dl * (i / total)).collect();
    PowerAllocation { powers, sinr, binding: Binding::CellPool(0) }
}

/// System-wide uplink max-min across coupled cells.
///
/// `inv_gain[k]` is [(GᴴG)⁻¹]_kk of terminal k in its serving cell (so the
/// effective gain is 1/inv_gain[k]); `cross` holds |v_kᴴ·g_j|² for foreign
/// terminals j. Every terminal obeys the individual cap `p_max`.
pub fn maxmin_uplink_multicell(
    inv_gain: &[f64],
    cross: &CrossGains,
    sigma2: f64,
    p_max: f64,
) -> Result<PowerAllocation, Error> {
    solve_maxmin(inv_gain, cross, sigma2, &Caps::PerTerminal(p_max))
}

/// System-wide downlink max-min across coupled cells.
///
/// `w_norm_sq[k]` is ‖w_k‖² of terminal k's serving-cell precoder; `cross`
/// holds |g_{k←cell(j)}ᴴ·a_j|²; `cells` lists terminal indices per cell and
/// each cell's powers must sum to at most `p_dl`.
pub fn maxmin_downlink_multicell(
    w_norm_sq: &[f64],
    cross: &CrossGains,
    sigma2: f64,
    p_dl: f64,
    cells: &[Vec<usize>],
) -> Result<PowerAllocation, Error> {
    solve_maxmin(w_norm_sq, cross, sigma2, &Caps::PerCell { budget: p_dl, cells })
}

/// Shared solver: maximize t subject to
///   p_k ≥ t·inv_gain_k·(σ² + Σ_j cross_kj·p_j)    (componentwise, minimal p)
/// and the power caps.
fn solve_maxmin(
    inv_gain: &[f64],
    cross: &CrossGains,
    sigma2: f64,
    caps: &Caps,
) -> Result<PowerAllocation, Error> {
    let n = inv_gain.len();
    assert_eq!(cross.n, n, "cross-gain matrix size must match terminal count");
    if sigma2 == 0.0 {
        return solve_zero_noise(inv_gain, cross, caps);
    }

    // Interference-free upper bound on t; with zero coupling it is attained.
    let t_hi0 = match caps {
        Caps::PerTerminal(p_max) => inv_gain
            .iter()
            .map(|&i| p_max / (sigma2 * i))
            .fold(f64::INFINITY, f64::min),
        Caps::PerCell { budget, cells } => cells
            .iter()
            .map(|cell| budget / (sigma2 * cell.iter().map(|&k| inv_gain[k]).sum::<f64>()))
            .fold(f64::INFINITY, f64::min),
    };

    if let Some(p) = minimal_power_vector(t_hi0, inv_gain, cross, sigma2, caps) {
        let binding = caps.binding(&p);
        return Ok(PowerAllocation { powers: p, sinr: t_hi0, binding });
    }

    let mut lo = 0.0f64;
    let mut hi = t_hi0;
    let mut p_lo: Option<Vec<f64>> = None;
    while hi - lo > BISECT_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        match minimal_power_vector(mid, inv_gain, cross, sigma2, caps) {
            Some(p) => {
                lo = mid;
                p_lo = Some(p);
            }
            None => hi = mid,
        }
    }
    debug_assert!(hi - lo <= BISECT_REL_TOL * hi);
    let p = p_lo.ok_or(Error::Domain(
        "max-min bisection found no feasible SINR target above zero".into(),
    ))?;
    let binding = caps.binding(&p);
    Ok(PowerAllocation { powers: p, sinr: lo, binding })
}

/// Minimal power vector meeting target t, or None if t is infeasible.
///
/// Runs the monotone fixed point p ← t·inv_gain∘(σ² + cross·p) from p = 0.
/// Iterates increase componentwise toward the minimal solution, so a cap
/// violation along the way proves infeasibility. If the loop neither
/// converges nor violates a cap within the iteration budget (the contraction
/// factor tends to 1 as t approaches the interference-limited optimum), the
/// minimal solution is taken from the equivalent linear system
/// (I − t·diag(inv_gain)·cross)·p = t·σ²·inv_gain, which has a nonnegative
/// solution exactly when t is below the spectral feasibility limit.
fn minimal_power_vector(
    t: f64,
    inv_gain: &[f64],
    cross: &CrossGains,
    sigma2: f64,
    caps: &Caps,
) -> Option<Vec<f64>> {
    let n = inv_gain.len();
    let mut p = vec![0.0f64; n];
    let mut next = vec![0.0f64; n];
    for _ in 0..FIXED_POINT_MAX_ITERS {
        for k in 0..n {
            let row = cross.row(k);
            let mut interference = 0.0;
            for j in 0..n {
                interference += row[j] * p[j];
            }
            next[k] = t * inv_gain[k] * (sigma2 + interference);
            debug_assert!(
                next[k] >= p[k] * (1.0 - 1e-12),
                "fixed-point iterate decreased: {} -> {}",
                p[k],
                next[k]
            );
        }
        if caps.violated(&next) {
            return None;
        }
        let converged = p
            .iter()
            .zip(next.iter())
            .all(|(&a, &b)| b - a <= FIXED_POINT_REL_TOL * b.max(f64::MIN_POSITIVE));
        std::mem::swap(&mut p, &mut next);
        if converged {
            return Some(p);
        }
    }

    // Slow-contraction regime: decide by direct solve.
    let mut a = vec![0.0f64; n * n];
    let mut b = vec![0.0f64; n];
    for k in 0..n {
        let row = cross.row(k);
        let arow = &mut a[k * n..(k + 1) * n];
        for j in 0..n {
            arow[j] = -t * inv_gain[k] * row[j];
        }
        arow[k] += 1.0;
        b[k] = t * sigma2 * inv_gain[k];
    }
    let sol = solve_linear(&mut a, &mut b, n)?;
    if sol.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return None;
    }
    // The iterates climb toward the minimal solution; the direct solution
    // must dominate the last iterate or t is past the spectral limit.
    if sol.iter().zip(p.iter()).any(|(&s, &q)| s < q * (1.0 - 1e-6)) {
        return None;
    }
    if caps.violated(&sol) {
        return None;
    }
    Some(sol)
}

/// Gaussian elimination with partial pivoting; returns None on a singular
/// system. `a` is row-major n×n and is consumed.
fn solve_linear(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-300 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            a[r * n + col] = 0.0;
            for j in col + 1..n {
                a[r * n + j] -= f * a[col * n + j];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i * n + j] * x[j];
        }
        x[i] = s / a[i * n + i];
    }
    Some(x)
}

/// Zero-noise limit: SINRs are scale invariant, so the optimum is purely
/// spectral: t* = 1/ρ(diag(inv_gain)·cross), with the Perron vector giving
/// the power profile, scaled until the first cap binds.
fn solve_zero_noise(
    inv_gain: &[f64],
    cross: &CrossGains,
    caps: &Caps,
) -> Result<PowerAllocation, Error> {
    let n = inv_gain.len();
    let row_sums: Vec<f64> = (0..n)
        .map(|k| inv_gain[k] * cross.row(k).iter().sum::<f64>())
        .collect();
    let max_row = row_sums.iter().fold(0.0f64, |m, &v| m.max(v));
    if max_row <= 0.0 {
        return Err(Error::UnboundedSinr);
    }
    // Power-iterate on B + sI rather than B: the iteration matrix has a
    // zero diagonal, so two cells coupling only each other make it
    // antidiagonal and the plain iteration cycles with period two. Any
    // positive shift restores primitivity without moving the Perron
    // vector; half the largest row sum keeps the shift on the same scale
    // as the spectral radius. Halving and the row-sum products are exact
    // under power-of-two amplitude scalings, preserving bitwise scale
    // invariance.
    let shift = 0.5 * max_row;
    let mut x = vec![1.0f64; n];
    let mut y = vec![0.0f64; n];
    let mut lambda = 0.0f64;
    let mut converged = false;
    for _ in 0..20_000 {
        for k in 0..n {
            let row = cross.row(k);
            let mut s = 0.0;
            for j in 0..n {
                s += row[j] * x[j];
            }
            y[k] = inv_gain[k] * s + shift * x[k];
        }
        let new_lambda = y.iter().fold(0.0f64, |m, &v| m.max(v));
        let mut residual = 0.0f64;
        for k in 0..n {
            residual = residual.max((y[k] - lambda * x[k]).abs());
        }
        for (xi, yi) in x.iter_mut().zip(y.iter()) {
            *xi = yi / new_lambda;
        }
        let done = (new_lambda - lambda).abs() <= 1e-14 * new_lambda && residual <= 1e-12 * new_lambda;
        lambda = new_lambda;
        if done {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Domain(
            "power iteration for the zero-noise max-min did not converge".into(),
        ));
    }
    let rho = lambda - shift;
    if rho <= 0.0 {
        return Err(Error::UnboundedSinr);
    }
    let scale = match caps {
        Caps::PerTerminal(p_max) => {
            let max_x = x.iter().fold(0.0f64, |m, &v| m.max(v));
            p_max / max_x
        }
        Caps::PerCell { budget, cells } => cells
            .iter()
            .map(|cell| budget / cell.iter().map(|&k| x[k]).sum::<f64>())
            .fold(f64::INFINITY, f64::min),
    };
    let powers: Vec<f64> = x.iter().map(|&v| v * scale).collect();
    let binding = caps.binding(&powers);
    Ok(PowerAllocation { powers, sinr: 1.0 / rho, binding })
}

/// SINRs implied by a power vector, for verification.
pub fn implied_sinrs(
    powers: &[f64],
    inv_gain: &[f64],
    cross: &CrossGains,
    sigma2: f64,
) -> Vec<f64> {
    let n = powers.len();
    (0..n)
        .map(|k| {
            let row = cross.row(k);
            let interference: f64 = (0..n).map(|j| row[j] * powers[j]).sum();
            powers[k] / (inv_gain[k] * (sigma2 + interference))
        })
        .collect()
}
