//! Energy beamforming versus spatial multiplexing: the split ratios of both
//! transmit modes, the rate threshold where the optimum switches between
//! them, and the closed-form beamforming KKT point.

use std::f64::consts::LN_2;

use crate::channel::ChannelDecomposition;
use crate::error::{Result, SwiptError};
use crate::numeric;

/// Power placed on the second eigenchannel when locating the switching rate.
pub const P_DELTA: f64 = 1e-3;

/// KKT point of the beamforming regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbKktPoint {
    pub rho_eb: f64,
    pub mu_eb: f64,
    pub nu_eb: f64,
    pub p1: f64,
}

/// `2^x − 1` without cancellation for small `x`.
pub(crate) fn exp2_m1(x: f64) -> f64 {
    (x * LN_2).exp_m1()
}

/// Largest split ratio at which beamforming on the strongest mode meets `rate_req`.
pub fn rho_eb(rate_req: f64, p_t: f64, lambda1: f64, sigma2: f64) -> f64 {
    let snr = p_t * lambda1 * lambda1 / sigma2;
    (1.0 - exp2_m1(rate_req) / snr).clamp(0.0, 1.0)
}

/// Split ratio at which two eigenchannels loaded with `p1`, `p2` deliver
/// exactly `rate_req`.
///
/// The textbook closed form is tried first and kept only when it lands in
/// `[0, 1]` with a rate residual below 1e-8; otherwise the ratio is found by
/// bisection on the two-channel rate, which is decreasing in the ratio.
pub fn rho_sm2(p1: f64, p2: f64, lambda1: f64, lambda2: f64, sigma2: f64, rate_req: f64) -> Result<f64> {
    if !(p1 > 0.0 && p2 > 0.0) {
        return Err(SwiptError::Domain("powers must be positive".into()));
    }
    if !(lambda1 >= lambda2 && lambda2 > 0.0) {
        return Err(SwiptError::Domain("need lambda1 >= lambda2 > 0".into()));
    }
    let a = p1 * lambda1 * lambda1 / sigma2;
    let b = p2 * lambda2 * lambda2 / sigma2;
    let rate = |rho: f64| ((1.0 - rho) * a).ln_1p() / LN_2 + ((1.0 - rho) * b).ln_1p() / LN_2;
    let max_rate = rate(0.0);
    if rate_req > max_rate {
        return Err(SwiptError::InfeasibleRate { rate_req, max_rate });
    }
    if rate_req <= 0.0 {
        return Ok(1.0);
    }

    let (x1, x2) = (p1 * lambda1 * lambda1, p2 * lambda2 * lambda2);
    let disc = (x1 - x2).powi(2) + 2f64.powf(rate_req + 2.0) * x1 * x2;
    let closed = 1.0 + 0.5 * sigma2 * (1.0 / x1 + 1.0 / x2 + disc.sqrt() / (x1 * x2));
    if (0.0..=1.0).contains(&closed) && (rate(closed) - rate_req).abs() <= 1e-8 {
        return Ok(closed);
    }

    let root = numeric::bisect(|rho| rate(rho) - rate_req, 0.0, 1.0, 0.0, 200)?;
    Ok(root.x_nonneg)
}

/// Rate above which multiplexing over two eigenchannels (loaded `p1`, `p2`)
/// harvests more than beamforming.
pub fn rate_threshold(p1: f64, p2: f64, lambda1: f64, lambda2: f64, sigma2: f64) -> f64 {
    let (g1, g2) = (lambda1 * lambda1, lambda2 * lambda2);
    let gap = g1 - g2;
    let load = g1 * p1 + g2 * p2;
    let root = (gap * load * load / (g1 * g2 * sigma2 * p1)).sqrt();
    (p2 * gap / sigma2 + root).ln_1p() / LN_2
}

/// Switching rate of a decomposed channel with the default `P_DELTA` loading.
/// Single-mode channels never leave beamforming, so the threshold is infinite.
pub fn rate_threshold_for(dec: &ChannelDecomposition, p_t: f64, sigma2: f64) -> f64 {
    if dec.rank < 2 {
        return f64::INFINITY;
    }
    let p2 = P_DELTA.min(0.5 * p_t);
    rate_threshold(p_t - p2, p2, dec.singvals[0], dec.singvals[1], sigma2)
}

/// Highest rate beamforming supports when no power is diverted to harvesting.
pub fn rate_threshold_ideal(lambda1: f64, p_t: f64, sigma2: f64) -> f64 {
    (p_t * lambda1 * lambda1 / sigma2).ln_1p() / LN_2
}

/// Beamforming split ratio with its rate and budget multipliers.
pub fn eb_kkt_point(rate_req: f64, p_t: f64, lambda1: f64, sigma2: f64) -> EbKktPoint {
    let g1 = lambda1 * lambda1;
    let rho = rho_eb(rate_req, p_t, lambda1, sigma2);
    let snr_id = (1.0 - rho) * p_t * g1 / sigma2;
    let mu = sigma2 * LN_2 * (1.0 + snr_id);
    let nu = mu * (1.0 - rho) * g1 / (LN_2 * (sigma2 + (1.0 - rho) * p_t * g1)) + g1 * rho;
    EbKktPoint { rho_eb: rho, mu_eb: mu, nu_eb: nu, p1: p_t }
}

/// Normalized stationarity residuals of a beamforming point: the covariance
/// gradient along the strongest eigendirection and the split-ratio gradient.
pub fn eb_kkt_residuals(pt: &EbKktPoint, lambda1: f64, sigma2: f64) -> (f64, f64) {
    let g1 = lambda1 * lambda1;
    let p_t = pt.p1;
    let sinr_den = 1.0 + (1.0 - pt.rho_eb) * p_t * g1 / sigma2;
    let grad_cov = pt.mu_eb * (1.0 - pt.rho_eb) * g1 / (sigma2 * LN_2 * sinr_den) + pt.rho_eb * g1;
    let r_cov = (grad_cov - pt.nu_eb) / (pt.nu_eb.abs() + 1.0);
    let rx = p_t * g1;
    let grad_rho = pt.mu_eb * rx / (sigma2 * LN_2 * sinr_den);
    let r_rho = (grad_rho - rx) / (rx.abs() + 1.0);
    (r_cov, r_rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{decompose, generate_channel};
    use proptest::prelude::*;

    fn seed7() -> ChannelDecomposition {
        decompose(&generate_channel(2, 2, 0.1, 7).unwrap()).unwrap()
    }

    #[test]
    fn rho_eb_boundaries() {
        assert_eq!(rho_eb(0.0, 10.0, 0.1, 1e-10), 1.0);
        let (p_t, l1, s2) = (10.0, 0.1, 1e-10);
        let r = (1.0f64 + p_t * l1 * l1 / s2).log2();
        assert!(rho_eb(r, p_t, l1, s2).abs() < 1e-9);
        assert_eq!(rho_eb(r + 1.0, p_t, l1, s2), 0.0);
    }

    #[test]
    fn rho_eb_matches_rate_equality() {
        let (p_t, l1, s2, r) = (10.0, 0.1, 1e-10, 20.0);
        let got = rho_eb(r, p_t, l1, s2);
        assert!((got - 0.998951).abs() < 5e-7);
        let rate = |rho: f64| ((1.0 - rho) * p_t * l1 * l1 / s2).ln_1p() / LN_2;
        let oracle = numeric::bisect(|rho| r - rate(rho), 0.0, 1.0, 0.0, 200).unwrap().x;
        assert!((got - oracle).abs() < 1e-12);
    }

    #[test]
    fn rho_sm2_boundaries_and_oracle() {
        let (l1, l2, s2) = (0.2, 0.1, 1e-10);
        let (p1, p2) = (9.999, 0.001);
        assert_eq!(rho_sm2(p1, p2, l1, l2, s2, 0.0).unwrap(), 1.0);
        let a = p1 * l1 * l1 / s2;
        let b = p2 * l2 * l2 / s2;
        let r0 = (a.ln_1p() + b.ln_1p()) / LN_2;
        assert!(rho_sm2(p1, p2, l1, l2, s2, r0).unwrap().abs() < 1e-12);
        assert!(matches!(
            rho_sm2(p1, p2, l1, l2, s2, r0 + 0.1),
            Err(SwiptError::InfeasibleRate { .. })
        ));

        let rho = rho_sm2(p1, p2, l1, l2, s2, 30.0).unwrap();
        // independent oracle: quadratic in t = 1 − ρ solved with the stable root
        let c = 2f64.powi(30);
        let t = 2.0 * (c - 1.0) / ((a + b) + ((a - b).powi(2) + 4.0 * a * b * c).sqrt());
        assert!((rho - (1.0 - t)).abs() < 1e-8);
        let rate = (((1.0 - rho) * a).ln_1p() + ((1.0 - rho) * b).ln_1p()) / LN_2;
        assert!((rate - 30.0).abs() < 1e-8);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(rate_threshold(9.999, 0.001, 0.3, 0.3, 1e-10), 0.0);
        assert!((rate_threshold_ideal(1.0, 1.0, 1.0) - 1.0).abs() < 1e-15);
        let s2 = 1e-10;
        let p_t = s2 * (2f64.powi(20) - 1.0);
        assert!((rate_threshold_ideal(1.0, p_t, s2) - 20.0).abs() < 1e-12);
        let v = rate_threshold_ideal(0.0093f64.sqrt(), 10.0, 1e-10);
        assert!((v - (1.0 + 9.3e8f64).log2()).abs() < 1e-12);
        assert!((v - 29.79).abs() < 0.01);
    }

    /// Received powers of both modes, each at the split ratio that meets the rate.
    fn eb_and_sm2_power(dec: &ChannelDecomposition, p_t: f64, s2: f64, r: f64) -> (f64, Option<f64>) {
        let (l1, l2) = (dec.singvals[0], dec.singvals[1]);
        let eb = rho_eb(r, p_t, l1, s2) * p_t * l1 * l1;
        let (p1, p2) = (p_t - P_DELTA, P_DELTA);
        let sm = rho_sm2(p1, p2, l1, l2, s2, r)
            .ok()
            .map(|rho| rho * (p1 * l1 * l1 + p2 * l2 * l2));
        (eb, sm)
    }

    #[test]
    fn seed7_threshold_is_the_power_crossing() {
        let d = seed7();
        let (p_t, s2) = (10.0, 1e-13);
        let r_th = rate_threshold_for(&d, p_t, s2);
        let mut crossing = None;
        let steps = 20_000;
        let r_hi = rate_threshold_ideal(d.singvals[0], p_t, s2);
        let mut prev_eb_wins = true;
        for i in 0..=steps {
            let r = r_hi * i as f64 / steps as f64;
            let (eb, sm) = eb_and_sm2_power(&d, p_t, s2, r);
            let eb_wins = sm.is_none_or(|sm| eb >= sm);
            if prev_eb_wins && !eb_wins {
                crossing = Some(r);
                break;
            }
            prev_eb_wins = eb_wins;
        }
        let crossing = crossing.expect("powers cross");
        assert!((crossing - r_th).abs() < 0.1, "crossing {crossing} vs threshold {r_th}");
    }

    #[test]
    fn eb_point_at_zero_rate() {
        let (p_t, l1, s2) = (10.0, 0.2, 1e-10);
        let pt = eb_kkt_point(0.0, p_t, l1, s2);
        assert_eq!(pt.rho_eb, 1.0);
        assert!((pt.mu_eb - s2 * LN_2).abs() <= 1e-15 * s2);
        assert!((pt.nu_eb - l1 * l1).abs() < 1e-15);
    }

    #[test]
    fn seed7_eb_residuals_at_half_threshold() {
        let d = seed7();
        let (p_t, s2) = (10.0, 1e-13);
        let r = rate_threshold_for(&d, p_t, s2) / 2.0;
        let pt = eb_kkt_point(r, p_t, d.singvals[0], s2);
        let (a, b) = eb_kkt_residuals(&pt, d.singvals[0], s2);
        assert!(a.abs() <= 1e-8 && b.abs() <= 1e-8, "{a} {b}");
    }

    proptest! {
        #[test]
        fn rho_eb_monotone(r in 0.0f64..40.0, dr in 0.0f64..5.0, p in 0.1f64..10.0, dp in 0.0f64..10.0) {
            let (l1, s2) = (0.1, 1e-10);
            prop_assert!(rho_eb(r + dr, p, l1, s2) <= rho_eb(r, p, l1, s2));
            prop_assert!(rho_eb(r, p + dp, l1, s2) >= rho_eb(r, p, l1, s2));
        }

        #[test]
        fn threshold_nonnegative_zero_only_for_equal_modes(l2 in 0.01f64..1.0, ratio in 1.0f64..5.0) {
            let l1 = l2 * ratio;
            let t = rate_threshold(9.999, 0.001, l1, l2, 1e-10);
            prop_assert!(t >= 0.0);
            if ratio > 1.0 + 1e-9 { prop_assert!(t > 0.0); }
        }

        #[test]
        fn eb_beats_sm2_below_threshold(seed in 0u64..500, frac in 0.0f64..1.0) {
            let d = decompose(&generate_channel(2, 2, 0.1, seed).unwrap()).unwrap();
            let (p_t, s2) = (10.0, 1e-13);
            let r_th = rate_threshold_for(&d, p_t, s2);
            let r_cap = rate_threshold_ideal(d.singvals[0], p_t, s2).min(r_th);
            let r = frac * r_cap;
            let (eb, sm) = eb_and_sm2_power(&d, p_t, s2, r);
            if let Some(sm) = sm {
                prop_assert!(eb >= sm * (1.0 - 1e-9), "R={r} eb={eb} sm={sm}");
            }
        }

        #[test]
        fn sm2_beats_eb_above_threshold(seed in 0u64..500, frac in 0.001f64..1.0) {
            let d = decompose(&generate_channel(2, 2, 0.1, seed).unwrap()).unwrap();
            let (p_t, s2) = (10.0, 1e-13);
            let r_th = rate_threshold_for(&d, p_t, s2);
            let a = (p_t - P_DELTA) * d.gains()[0] / s2;
            let b = P_DELTA * d.gains()[1] / s2;
            let r_top = (a.ln_1p() + b.ln_1p()) / LN_2;
            prop_assume!(r_th < r_top);
            let r = r_th + frac * (r_top - r_th);
            let (eb, sm) = eb_and_sm2_power(&d, p_t, s2, r);
            prop_assert!(eb <= sm.unwrap() * (1.0 + 1e-9), "R={r} eb={eb} sm={sm:?}");
        }
    }
}
