//! Channel matrices, their reduced SVD, and the two physical quantities every
//! other module is built on: received RF power and achievable rate.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Result, SwiptError};
use crate::linalg::{self, CMatrix};

/// Relative threshold below which singular values are treated as zero.
pub const SINGULAR_TRUNCATION: f64 = 1e-12;

/// A narrowband MIMO channel `H` (N_R × N_T) scaled by a path-loss amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    entries: CMatrix,
    theta: f64,
}

impl ChannelMatrix {
    pub fn new(entries: CMatrix, theta: f64) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(SwiptError::Dimension("channel must be at least 1x1".into()));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(SwiptError::InvalidInput(format!("theta must be positive, got {theta}")));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SwiptError::InvalidInput("channel entries must be finite".into()));
        }
        Ok(Self { entries, theta })
    }

    /// Wraps a real matrix given row by row, mostly for tests and examples.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n_r = rows.len();
        let n_t = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_t) {
            return Err(SwiptError::Dimension("ragged rows".into()));
        }
        let m = CMatrix::from_fn(n_r, n_t, |i, j| Complex64::new(rows[i][j], 0.0));
        Self::new(m, 1.0)
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn n_r(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_t(&self) -> usize {
        self.entries.ncols()
    }
}

/// Reduced SVD `H = U diag(λ) V^H` with strictly positive, descending `λ`.
#[derive(Debug, Clone)]
pub struct ChannelDecomposition {
    pub u: CMatrix,
    pub singvals: Vec<f64>,
    pub v: CMatrix,
    pub rank: usize,
}

impl ChannelDecomposition {
    /// A diagonal channel with the given singular values and identity bases.
    pub fn from_singular_values(singvals: &[f64]) -> Result<Self> {
        if singvals.is_empty() {
            return Err(SwiptError::Dimension("need at least one singular value".into()));
        }
        if singvals.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(SwiptError::InvalidInput("singular values must be positive".into()));
        }
        if singvals.windows(2).any(|w| w[0] < w[1]) {
            return Err(SwiptError::InvalidInput("singular values must be sorted descending".into()));
        }
        let r = singvals.len();
        Ok(Self {
            u: CMatrix::identity(r, r),
            singvals: singvals.to_vec(),
            v: CMatrix::identity(r, r),
            rank: r,
        })
    }

    /// Eigenchannel power gains `λ_k²`.
    pub fn gains(&self) -> Vec<f64> {
        self.singvals.iter().map(|s| s * s).collect()
    }

    pub fn lambda1_sq(&self) -> f64 {
        self.singvals[0] * self.singvals[0]
    }

    /// `U diag(λ) V^H`.
    pub fn reconstruct(&self) -> CMatrix {
        &self.u * linalg::real_diag(&self.singvals) * self.v.adjoint()
    }

    /// Transmit covariance `V diag(p) V^H` for an eigen-aligned allocation.
    pub fn covariance(&self, alloc: &PowerAllocation) -> Result<CMatrix> {
        self.check_len(alloc)?;
        Ok(&self.v * linalg::real_diag(&alloc.powers) * self.v.adjoint())
    }

    fn check_len(&self, alloc: &PowerAllocation) -> Result<()> {
        if alloc.powers.len() != self.rank {
            return Err(SwiptError::Dimension(format!(
                "allocation has {} entries, channel rank is {}",
                alloc.powers.len(),
                self.rank
            )));
        }
        Ok(())
    }
}

/// Transmit budget, noise power, rate requirement and search tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub p_t: f64,
    pub sigma2: f64,
    pub rate_req: f64,
    pub tol: f64,
}

impl SystemParams {
    pub fn new(p_t: f64, sigma2: f64, rate_req: f64, tol: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(p_t) || !ok(sigma2) || !ok(tol) {
            return Err(SwiptError::InvalidInput(format!(
                "p_t, sigma2 and tol must be positive and finite (got {p_t}, {sigma2}, {tol})"
            )));
        }
        if !(rate_req.is_finite() && rate_req >= 0.0) {
            return Err(SwiptError::InvalidInput(format!("rate_req must be >= 0, got {rate_req}")));
        }
        Ok(Self { p_t, sigma2, rate_req, tol })
    }

    pub fn with_rate(&self, rate_req: f64) -> Result<Self> {
        Self::new(self.p_t, self.sigma2, rate_req, self.tol)
    }
}

/// Powers (watts) on the eigenchannels, strongest first.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PowerAllocation {
    pub powers: Vec<f64>,
}

impl PowerAllocation {
    pub fn new(powers: Vec<f64>) -> Result<Self> {
        if let Some(p) = powers.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(SwiptError::Domain(format!("power entries must be >= 0, got {p}")));
        }
        Ok(Self { powers })
    }

    /// All power on the strongest eigenchannel.
    pub fn beamforming(p_t: f64, rank: usize) -> Self {
        let mut powers = vec![0.0; rank];
        powers[0] = p_t;
        Self { powers }
    }

    pub fn total(&self) -> f64 {
        self.powers.iter().sum()
    }

    pub fn active(&self) -> usize {
        self.powers.iter().filter(|p| **p > 0.0).count()
    }
}

/// Draws `theta · (g_re + i g_im)/√2` entries from a ChaCha8 stream seeded by `seed`.
pub fn generate_channel(n_r: usize, n_t: usize, theta: f64, seed: u64) -> Result<ChannelMatrix> {
    if n_r == 0 || n_t == 0 {
        return Err(SwiptError::Dimension(format!("n_r and n_t must be >= 1 (got {n_r}x{n_t})")));
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(SwiptError::InvalidInput(format!("theta must be positive, got {theta}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = theta / std::f64::consts::SQRT_2;
    let mut data = Vec::with_capacity(n_r * n_t);
    for _ in 0..n_r * n_t {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        data.push(Complex64::new(scale * re, scale * im));
    }
    ChannelMatrix::new(DMatrix::from_row_slice(n_r, n_t, &data), theta)
}

/// Reduced SVD of `h`, truncating singular values below `1e-12 · λ_max`.
pub fn decompose(h: &ChannelMatrix) -> Result<ChannelDecomposition> {
    let svd = h.entries.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^H");
    let s = &svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let s_max = order.first().map_or(0.0, |&i| s[i]);
    if !(s_max > 0.0) {
        return Err(SwiptError::DegenerateChannel);
    }
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| s[i] > SINGULAR_TRUNCATION * s_max)
        .collect();
    let rank = kept.len();
    let u_r = CMatrix::from_fn(u.nrows(), rank, |i, c| u[(i, kept[c])]);
    let v_r = CMatrix::from_fn(v_t.ncols(), rank, |i, c| v_t[(kept[c], i)].conj());
    Ok(ChannelDecomposition {
        u: u_r,
        singvals: kept.iter().map(|&i| s[i]).collect(),
        v: v_r,
        rank,
    })
}

/// `Σ p_k λ_k²`, the RF power reaching the receive antennas (noise excluded).
pub fn received_power(dec: &ChannelDecomposition, alloc: &PowerAllocation) -> Result<f64> {
    dec.check_len(alloc)?;
    PowerAllocation::new(alloc.powers.clone())?;
    Ok(alloc
        .powers
        .iter()
        .zip(&dec.singvals)
        .map(|(p, s)| p * s * s)
        .sum())
}

/// `Σ log2(1 + (1−ρ) p_k λ_k²/σ²)`.
pub fn achievable_rate(
    dec: &ChannelDecomposition,
    alloc: &PowerAllocation,
    rho: f64,
    sigma2: f64,
) -> Result<f64> {
    dec.check_len(alloc)?;
    if !(0.0..=1.0).contains(&rho) {
        return Err(SwiptError::Domain(format!("rho must lie in [0, 1], got {rho}")));
    }
    Ok(rate_from_gains(&dec.gains(), &alloc.powers, rho, sigma2))
}

pub(crate) fn rate_from_gains(gains: &[f64], powers: &[f64], rho: f64, sigma2: f64) -> f64 {
    let a = (1.0 - rho) / sigma2;
    gains
        .iter()
        .zip(powers)
        .map(|(g, p)| (a * p * g).ln_1p())
        .sum::<f64>()
        / std::f64::consts::LN_2
}

/// `tr(H S H^H)` for an arbitrary covariance `S`.
pub fn matrix_received_power(h: &CMatrix, s: &CMatrix) -> f64 {
    linalg::trace_re(&(h * s * h.adjoint()))
}

/// `log2 det(I + (1−ρ) σ⁻² H S H^H)` for an arbitrary covariance `S`.
pub fn matrix_rate(h: &CMatrix, s: &CMatrix, rho: f64, sigma2: f64) -> f64 {
    let m = h * s * h.adjoint() * Complex64::new((1.0 - rho) / sigma2, 0.0);
    linalg::log2_det_identity_plus(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_theta_is_rejected() {
        assert!(generate_channel(1, 1, 0.0, 1).is_err());
        assert!(matches!(generate_channel(0, 2, 0.1, 1), Err(SwiptError::Dimension(_))));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_channel(2, 2, 0.1, 7).unwrap();
        let b = generate_channel(2, 2, 0.1, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_channel(2, 2, 0.1, 8).unwrap());
    }

    #[test]
    fn entry_variance_matches_theta_squared() {
        // 4x4 x 6250 draws = 1e5 entries
        let mut acc = 0.0;
        let mut count = 0usize;
        for seed in 0..6250u64 {
            let h = generate_channel(4, 4, 0.05, 3 + seed * 7919).unwrap();
            for z in h.entries().iter() {
                acc += z.norm_sqr();
                count += 1;
            }
        }
        let var = acc / count as f64;
        assert!((var / 0.0025 - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn identity_decomposes_to_unit_singular_values() {
        let h = ChannelMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let d = decompose(&h).unwrap();
        assert_eq!(d.rank, 2);
        for s in &d.singvals {
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rank_deficient_channel_is_truncated() {
        let h = ChannelMatrix::from_real_rows(&[&[3.0, 0.0], &[0.0, 0.0]]).unwrap();
        let d = decompose(&h).unwrap();
        assert_eq!(d.rank, 1);
        assert!((d.singvals[0] - 3.0).abs() < 1e-14);
        assert_eq!((d.u.ncols(), d.v.ncols()), (1, 1));
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        let h = ChannelMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(decompose(&h).unwrap_err(), SwiptError::DegenerateChannel);
    }

    #[test]
    fn seed7_reconstruction() {
        let h = generate_channel(2, 2, 0.1, 7).unwrap();
        let d = decompose(&h).unwrap();
        assert!(max_abs_diff(&d.reconstruct(), h.entries()) < 1e-9);
    }

    #[test]
    fn received_power_examples() {
        let d = ChannelDecomposition::from_singular_values(&[1.0, 1.0]).unwrap();
        let p = PowerAllocation::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(received_power(&d, &p).unwrap(), 2.0);
        let d = ChannelDecomposition::from_singular_values(&[2.0, 1.0]).unwrap();
        let p = PowerAllocation::beamforming(10.0, 2);
        assert_eq!(received_power(&d, &p).unwrap(), 40.0);
        let bad = PowerAllocation { powers: vec![-1.0, 0.0] };
        assert!(matches!(received_power(&d, &bad), Err(SwiptError::Domain(_))));
    }

    #[test]
    fn rate_examples() {
        let d = ChannelDecomposition::from_singular_values(&[1.0]).unwrap();
        let sigma2 = 1e-3;
        let r = 7.25;
        let p = PowerAllocation::new(vec![sigma2 * (2f64.powf(r) - 1.0)]).unwrap();
        assert!((achievable_rate(&d, &p, 0.0, sigma2).unwrap() - r).abs() < 1e-12);
        assert_eq!(achievable_rate(&d, &p, 1.0, sigma2).unwrap(), 0.0);
    }

    #[test]
    fn seed7_scalar_forms_match_matrix_forms() {
        let h = generate_channel(2, 2, 0.1, 7).unwrap();
        let d = decompose(&h).unwrap();
        let p = PowerAllocation::new(vec![6.5, 3.5]).unwrap();
        let s = d.covariance(&p).unwrap();
        let pr = received_power(&d, &p).unwrap();
        assert!((pr - matrix_received_power(h.entries(), &s)).abs() <= 1e-10 * pr.max(1.0));
        let sigma2 = 1e-10;
        let r = achievable_rate(&d, &p, 0.3, sigma2).unwrap();
        assert!((r - matrix_rate(h.entries(), &s, 0.3, sigma2)).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn decomposition_invariants(seed in any::<u64>(), n_r in 1usize..5, n_t in 1usize..5) {
            let h = generate_channel(n_r, n_t, 0.1, seed).unwrap();
            let d = decompose(&h).unwrap();
            let eye = CMatrix::identity(d.rank, d.rank);
            prop_assert!(max_abs_diff(&(d.u.adjoint() * &d.u), &eye) < 1e-10);
            prop_assert!(max_abs_diff(&(d.v.adjoint() * &d.v), &eye) < 1e-10);
            prop_assert!(d.singvals.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(*d.singvals.last().unwrap() > 0.0);
            prop_assert!(max_abs_diff(&d.reconstruct(), h.entries()) < 1e-9);
        }

        #[test]
        fn rate_strictly_decreasing_in_rho(seed in any::<u64>(), a in 0.0f64..0.98, da in 1e-3f64..0.02) {
            let d = decompose(&generate_channel(3, 3, 0.1, seed).unwrap()).unwrap();
            let p = PowerAllocation::new(vec![1.0; d.rank]).unwrap();
            let r1 = achievable_rate(&d, &p, a, 1e-6).unwrap();
            let r2 = achievable_rate(&d, &p, a + da, 1e-6).unwrap();
            prop_assert!(r2 < r1);
        }

        #[test]
        fn received_power_is_linear(seed in any::<u64>(), scale in 0.1f64..10.0) {
            let d = decompose(&generate_channel(3, 2, 0.1, seed).unwrap()).unwrap();
            let p = PowerAllocation::new((0..d.rank).map(|k| 1.0 + k as f64).collect()).unwrap();
            let q = PowerAllocation::new(p.powers.iter().map(|x| x * scale).collect()).unwrap();
            let a = received_power(&d, &p).unwrap();
            let b = received_power(&d, &q).unwrap();
            prop_assert!((b - scale * a).abs() <= 1e-12 * b.abs());
        }
    }
}
