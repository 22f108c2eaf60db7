//! Zero-forcing quantities under perfect CSI: Gram matrix, inverse-Gram
//! diagonal, effective gains, and unit-norm precoding vectors.
//!
//! Everything is built on a Cholesky factorization of the K×K Gram matrix.
//! K stays small (tens) while M can reach tens of thousands, so the only
//! numerically long operation is the Gram accumulation over M, which uses
//! compensated (Kahan) summation.

use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::error::Error;

/// Relative pivot tolerance: a Cholesky pivot below `1e-12 · max diagonal`
/// marks the Gram matrix as numerically singular.
const PIVOT_REL_TOL: f64 = 1e-12;

/// Gram matrix and ZF gain diagnostics for one channel realization.
#[derive(Clone, Debug)]
pub struct ZfDiagnostics {
    /// K×K Hermitian Gram matrix GᴴG, column-major.
    pub gram: Vec<Complex64>,
    pub k: usize,
    /// [(GᴴG)⁻¹]_kk for every terminal; sets the effective ZF gains.
    pub inv_gram_diag: Vec<f64>,
    /// Ratio of extreme Gram eigenvalue estimates (power iteration).
    pub condition_estimate: f64,
}

/// Unit-norm ZF precoding (equivalently receive-combining) vectors plus the
/// norms of the raw pseudoinverse columns w_k = [G(GᴴG)⁻¹]_k.
#[derive(Clone, Debug)]
pub struct ZfPrecoders {
    pub m: usize,
    pub k: usize,
    /// M×K column-major; column k is a_k = w_k/‖w_k‖.
    pub vectors: Vec<Complex64>,
    pub w_norms: Vec<f64>,
}

impl ZfPrecoders {
    pub fn column(&self, k: usize) -> &[Complex64] {
        &self.vectors[k * self.m..(k + 1) * self.m]
    }
}

/// Compensated sum (Kahan-Babuska variant: the correction also survives
/// terms larger than the running sum).
pub(crate) fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// GᴴG with compensated accumulation over the M rows.
pub fn gram(g: &ChannelMatrix) -> Vec<Complex64> {
    let (m, k) = (g.m, g.k);
    let mut a = vec![Complex64::new(0.0, 0.0); k * k];
    for j in 0..k {
        let col_j = g.column(j);
        for i in 0..=j {
            let col_i = g.column(i);
            let (mut sr, mut cr, mut si, mut ci) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for p in 0..m {
                let x = col_i[p];
                let y = col_j[p];
                // conj(x)·y, compensated per component.
                let re = x.re * y.re + x.im * y.im;
                let im = x.re * y.im - x.im * y.re;
                let yr = re - cr;
                let tr = sr + yr;
                cr = (tr - sr) - yr;
                sr = tr;
                let yi = im - ci;
                let ti = si + yi;
                ci = (ti - si) - yi;
                si = ti;
            }
            let v = Complex64::new(sr, si);
            a[i + j * k] = v;
            if i != j {
                a[j + i * k] = v.conj();
            } else {
                // Hermitian diagonal: drop rounding residue in the imaginary part.
                a[i + j * k] = Complex64::new(sr, 0.0);
            }
        }
    }
    a
}

/// Lower-triangular Cholesky factor L with A = L·Lᴴ, column-major.
/// Fails with the offending pivot index when A is numerically singular.
pub fn cholesky(a: &[Complex64], k: usize) -> Result<Vec<Complex64>, Error> {
    let mut max_diag = 0.0f64;
    for j in 0..k {
        max_diag = max_diag.max(a[j + j * k].re);
    }
    let tol = PIVOT_REL_TOL * max_diag;
    let mut l = vec![Complex64::new(0.0, 0.0); k * k];
    for j in 0..k {
        let mut d = a[j + j * k].re;
        for p in 0..j {
            d -= l[j + p * k].norm_sqr();
        }
        if !(d > tol) {
            return Err(Error::SingularChannel { index: j });
        }
        let ljj = d.sqrt();
        l[j + j * k] = Complex64::new(ljj, 0.0);
        for i in j + 1..k {
            let mut s = a[i + j * k];
            for p in 0..j {
                s -= l[i + p * k] * l[j + p * k].conj();
            }
            l[i + j * k] = s / ljj;
        }
    }
    Ok(l)
}

/// Solve L·x = b in place (L lower triangular).
fn forward_solve(l: &[Complex64], k: usize, b: &mut [Complex64]) {
    for i in 0..k {
        let mut s = b[i];
        for p in 0..i {
            s -= l[i + p * k] * b[p];
        }
        b[i] = s / l[i + i * k];
    }
}

/// Solve Lᴴ·x = b in place.
fn backward_solve(l: &[Complex64], k: usize, b: &mut [Complex64]) {
    for i in (0..k).rev() {
        let mut s = b[i];
        for p in i + 1..k {
            s -= l[p + i * k].conj() * b[p];
        }
        b[i] = s / l[i + i * k];
    }
}

/// Diagonal of A⁻¹ from the Cholesky factor: [A⁻¹]_kk = ‖L⁻¹·e_k‖².
fn inverse_diagonal(l: &[Complex64], k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k);
    let mut x = vec![Complex64::new(0.0, 0.0); k];
    for j in 0..k {
        for v in x.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        x[j] = Complex64::new(1.0, 0.0);
        forward_solve(l, k, &mut x);
        out.push(x.iter().map(|z| z.norm_sqr()).sum());
    }
    out
}

/// Full A⁻¹ (column-major) from the Cholesky factor.
fn inverse_from_cholesky(l: &[Complex64], k: usize) -> Vec<Complex64> {
    let mut inv = vec![Complex64::new(0.0, 0.0); k * k];
    for j in 0..k {
        let col = &mut inv[j * k..(j + 1) * k];
        col[j] = Complex64::new(1.0, 0.0);
        forward_solve(l, k, col);
        backward_solve(l, k, col);
    }
    inv
}

/// Extreme-eigenvalue ratio estimate by plain and inverse power iteration.
fn condition_estimate(a: &[Complex64], l: &[Complex64], k: usize) -> f64 {
    if k == 1 {
        return 1.0;
    }
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut v = vec![Complex64::new(1.0 / (k as f64).sqrt(), 0.0); k];
    let mut lambda_max = 0.0;
    for _ in 0..40 {
        let mut w = vec![Complex64::new(0.0, 0.0); k];
        for j in 0..k {
            for i in 0..k {
                w[i] += a[i + j * k] * v[j];
            }
        }
        lambda_max = norm(&w);
        if lambda_max == 0.0 {
            return f64::INFINITY;
        }
        for (wi, vi) in w.iter().zip(v.iter_mut()) {
            *vi = wi / lambda_max;
        }
    }
    let mut u = vec![Complex64::new(1.0 / (k as f64).sqrt(), 0.0); k];
    let mut inv_lambda_min = 0.0;
    for _ in 0..40 {
        let mut w = u.clone();
        forward_solve(l, k, &mut w);
        backward_solve(l, k, &mut w);
        inv_lambda_min = norm(&w);
        for (wi, ui) in w.iter().zip(u.iter_mut()) {
            *ui = wi / inv_lambda_min;
        }
    }
    lambda_max * inv_lambda_min
}

/// Gram matrix, inverse-Gram diagonal, and a condition estimate for G.
///
/// Requires M ≥ K; a rank-deficient Gram surfaces as
/// [`Error::SingularChannel`], which the Monte-Carlo layer treats as a
/// redrawable degenerate placement.
pub fn zf_diagnostics(g: &ChannelMatrix) -> Result<ZfDiagnostics, Error> {
    if g.m < g.k {
        return Err(Error::Config(format!(
            "zero-forcing needs at least as many antennas as terminals (M = {}, K = {})",
            g.m, g.k
        )));
    }
    let a = gram(g);
    let l = cholesky(&a, g.k)?;
    let inv_gram_diag = inverse_diagonal(&l, g.k);
    let cond = condition_estimate(&a, &l, g.k);
    Ok(ZfDiagnostics { gram: a, k: g.k, inv_gram_diag, condition_estimate: cond })
}

/// Effective post-ZF power gain of terminal k: SINR_k = p_k·gain_k/σ².
pub fn zf_uplink_gain(diag: &ZfDiagnostics, k: usize) -> f64 {
    1.0 / diag.inv_gram_diag[k]
}

/// Unit-norm ZF precoders a_k = w_k/‖w_k‖ with W = G(GᴴG)⁻¹, plus ‖w_k‖.
///
/// The same unit vectors serve as receive combiners on the uplink; by
/// construction g_kᴴ·a_j = δ_kj/‖w_j‖ and ‖w_k‖² = [(GᴴG)⁻¹]_kk.
pub fn zf_precoders(g: &ChannelMatrix) -> Result<ZfPrecoders, Error> {
    let diag = zf_diagnostics(g)?;
    zf_precoders_from(g, &diag)
}

/// As [`zf_precoders`] but reusing already-computed diagnostics.
pub fn zf_precoders_from(g: &ChannelMatrix, diag: &ZfDiagnostics) -> Result<ZfPrecoders, Error> {
    let (m, k) = (g.m, g.k);
    let l = cholesky(&diag.gram, k)?;
    let inv = inverse_from_cholesky(&l, k);
    let mut vectors = vec![Complex64::new(0.0, 0.0); m * k];
    let mut w_norms = Vec::with_capacity(k);
    for j in 0..k {
        let w = &mut vectors[j * m..(j + 1) * m];
        for p in 0..k {
            let coef = inv[p + j * k];
            if coef == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (wi, gi) in w.iter_mut().zip(g.column(p)) {
                *wi += gi * coef;
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        debug_assert!(
            (norm * norm - diag.inv_gram_diag[j]).abs() <= 1e-6 * diag.inv_gram_diag[j],
            "pseudoinverse column norm drifted from the inverse-Gram diagonal"
        );
        for wi in w.iter_mut() {
            *wi /= norm;
        }
        w_norms.push(norm);
    }
    Ok(ZfPrecoders { m, k, vectors, w_norms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(m: usize, cols: Vec<Vec<Complex64>>) -> ChannelMatrix {
        let k = cols.len();
        let mut entries = Vec::with_capacity(m * k);
        for c in &cols {
            assert_eq!(c.len(), m);
            entries.extend_from_slice(c);
        }
        ChannelMatrix { m, k, entries, carrier_wavelength: 0.15 }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic pseudo-random complex matrix (splitmix-style hash).
    fn random_matrix(m: usize, k: usize, seed: u64) -> ChannelMatrix {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            state ^= state >> 30;
            state = state.wrapping_mul(0xbf58476d1ce4e5b9);
            state ^= state >> 27;
            state = state.wrapping_mul(0x94d049bb133111eb);
            state ^= state >> 31;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let cols = (0..k)
            .map(|_| (0..m).map(|_| c(next(), next())).collect())
            .collect();
        matrix(m, cols)
    }

    /// Naive Gauss-Jordan inverse used as an independent oracle.
    fn naive_inverse(a: &[Complex64], k: usize) -> Vec<Complex64> {
        let mut aug = vec![Complex64::new(0.0, 0.0); k * 2 * k];
        for j in 0..k {
            for i in 0..k {
                aug[i * 2 * k + j] = a[i + j * k];
            }
            aug[j * 2 * k + k + j] = c(1.0, 0.0);
        }
        for col in 0..k {
            let mut piv = col;
            for r in col + 1..k {
                if aug[r * 2 * k + col].norm() > aug[piv * 2 * k + col].norm() {
                    piv = r;
                }
            }
            for j in 0..2 * k {
                aug.swap(col * 2 * k + j, piv * 2 * k + j);
            }
            let d = aug[col * 2 * k + col];
            for j in 0..2 * k {
                aug[col * 2 * k + j] /= d;
            }
            for r in 0..k {
                if r == col {
                    continue;
                }
                let f = aug[r * 2 * k + col];
                for j in 0..2 * k {
                    let v = aug[col * 2 * k + j];
                    aug[r * 2 * k + j] -= f * v;
                }
            }
        }
        let mut inv = vec![Complex64::new(0.0, 0.0); k * k];
        for j in 0..k {
            for i in 0..k {
                inv[i + j * k] = aug[i * 2 * k + k + j];
            }
        }
        inv
    }

    #[test]
    fn compensated_sum_recovers_catastrophic_cancellation() {
        assert_eq!(kahan_sum([1e16, 1.0, -1e16]), 1.0);
        let naive: f64 = [1e16, 1.0, -1e16].iter().sum();
        assert_eq!(naive, 0.0); // what we are protecting against
    }

    #[test]
    fn orthogonal_columns_invert_to_reciprocal_norms() {
        // Columns c_k·e_k are orthogonal with norms² |c_k|².
        let m = 6;
        let mut cols = Vec::new();
        for (k0, scale) in [(0usize, 2.0), (2, 0.5), (5, 3.0)] {
            let mut col = vec![c(0.0, 0.0); m];
            col[k0] = c(scale, 0.0);
            cols.push(col);
        }
        let g = matrix(m, cols);
        let d = zf_diagnostics(&g).unwrap();
        for (k0, scale) in [(0usize, 2.0f64), (1, 0.5), (2, 3.0)] {
            assert!((d.inv_gram_diag[k0] - 1.0 / scale.powi(2)).abs() < 1e-14);
            assert!((zf_uplink_gain(&d, k0) - scale.powi(2)).abs() < 1e-12);
        }
        // Precoders collapse to the normalized columns themselves.
        let p = zf_precoders(&g).unwrap();
        assert!((p.column(0)[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((p.w_norms[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_terminal_reduces_to_inverse_norm() {
        let g = matrix(3, vec![vec![c(1.0, 1.0), c(0.0, 2.0), c(-1.0, 0.5)]]);
        let d = zf_diagnostics(&g).unwrap();
        let norm2: f64 = g.column(0).iter().map(|z| z.norm_sqr()).sum();
        assert!((d.inv_gram_diag[0] - 1.0 / norm2).abs() < 1e-15);
        assert_eq!(d.condition_estimate, 1.0);
    }

    #[test]
    fn inverse_diagonal_matches_naive_inversion() {
        for seed in 0..20 {
            let g = random_matrix(8, 3, seed);
            let d = zf_diagnostics(&g).unwrap();
            let inv = naive_inverse(&d.gram, 3);
            for k0 in 0..3 {
                let oracle = inv[k0 + k0 * 3].re;
                assert!(
                    (d.inv_gram_diag[k0] - oracle).abs() <= 1e-10 * oracle.abs(),
                    "seed {seed} k {k0}: {} vs {oracle}",
                    d.inv_gram_diag[k0]
                );
            }
        }
    }

    #[test]
    fn duplicated_column_is_reported_singular() {
        let col = vec![c(1.0, 0.3), c(0.2, -1.0), c(0.5, 0.5), c(-0.1, 0.9)];
        let g = matrix(4, vec![col.clone(), col]);
        match zf_diagnostics(&g) {
            Err(Error::SingularChannel { index }) => assert_eq!(index, 1),
            other => panic!("expected singular channel, got {other:?}"),
        }
    }

    #[test]
    fn more_terminals_than_antennas_is_a_config_error() {
        let g = random_matrix(3, 4, 1);
        assert!(matches!(zf_diagnostics(&g), Err(Error::Config(_))));
    }

    #[test]
    fn gain_never_exceeds_column_norm() {
        // Schur-complement bound: 1/[(GᴴG)⁻¹]_kk ≤ (GᴴG)_kk.
        for seed in 0..50 {
            let g = random_matrix(10, 4, seed);
            let d = zf_diagnostics(&g).unwrap();
            for k0 in 0..4 {
                let norm2 = d.gram[k0 + k0 * 4].re;
                assert!(zf_uplink_gain(&d, k0) <= norm2 * (1.0 + 1e-12));
                assert!(d.inv_gram_diag[k0] >= 1.0 / norm2 * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn precoders_zero_force_and_carry_the_inverse_norms() {
        for seed in 0..20 {
            let g = random_matrix(12, 4, seed);
            let d = zf_diagnostics(&g).unwrap();
            let p = zf_precoders(&g).unwrap();
            for j in 0..4 {
                assert!(
                    (p.w_norms[j].powi(2) - d.inv_gram_diag[j]).abs()
                        <= 1e-12 * d.inv_gram_diag[j]
                );
                let unit: f64 = p.column(j).iter().map(|z| z.norm_sqr()).sum();
                assert!((unit - 1.0).abs() < 1e-12);
                for k0 in 0..4 {
                    let dot: Complex64 = g
                        .column(k0)
                        .iter()
                        .zip(p.column(j))
                        .map(|(gi, ai)| gi.conj() * ai)
                        .sum();
                    let expect = if k0 == j { 1.0 / p.w_norms[j] } else { 0.0 };
                    assert!(
                        (dot - c(expect, 0.0)).norm() < 1e-10,
                        "seed {seed} ({k0},{j}): {dot}"
                    );
                }
            }
        }
    }

    #[test]
    fn cholesky_reconstructs_the_gram_matrix() {
        let g = random_matrix(9, 4, 7);
        let a = gram(&g);
        let l = cholesky(&a, 4).unwrap();
        for j in 0..4 {
            for i in 0..4 {
                let mut s = c(0.0, 0.0);
                for p in 0..4 {
                    s += l[i + p * 4] * l[j + p * 4].conj();
                }
                assert!((s - a[i + j * 4]).norm() < 1e-12 * a[j + j * 4].re.max(1e-30));
            }
        }
    }

    #[test]
    fn condition_estimate_tracks_known_spectra() {
        // Diagonal Gram: eigenvalues are the squared column norms.
        let m = 4;
        let mut cols = Vec::new();
        for (k0, scale) in [(0usize, 3.0), (1, 1.0)] {
            let mut col = vec![c(0.0, 0.0); m];
            col[k0] = c(scale, 0.0);
            cols.push(col);
        }
        let g = matrix(m, cols);
        let d = zf_diagnostics(&g).unwrap();
        assert!((d.condition_estimate - 9.0).abs() < 1e-6 * 9.0);
    }
}
