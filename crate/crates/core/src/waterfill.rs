//! Rate-maximizing waterfilling and the maximum achievable rate.

use crate::channel::{self, ChannelDecomposition, PowerAllocation, SystemParams};

/// Number of eigenchannels that receive positive power under waterfilling.
///
/// `singvals` must be positive and sorted descending.
pub fn waterfill_rank(singvals: &[f64], p_t: f64, sigma2: f64) -> usize {
    let inv: Vec<f64> = singvals.iter().map(|s| sigma2 / (s * s)).collect();
    let mut rank = 1;
    for k in 1..inv.len() {
        let deficit: f64 = inv[..k].iter().map(|i| inv[k] - i).sum();
        if p_t - deficit > 0.0 {
            rank = k + 1;
        } else {
            break;
        }
    }
    rank
}

/// Water level `W` such that `p_k = W − σ²/λ_k²` on the filled modes.
pub fn water_level(singvals: &[f64], p_t: f64, sigma2: f64) -> f64 {
    let r_w = waterfill_rank(singvals, p_t, sigma2);
    let inv_sum: f64 = singvals[..r_w].iter().map(|s| sigma2 / (s * s)).sum();
    (p_t + inv_sum) / r_w as f64
}

pub fn waterfill_allocation(singvals: &[f64], p_t: f64, sigma2: f64) -> PowerAllocation {
    let r_w = waterfill_rank(singvals, p_t, sigma2);
    let level = water_level(singvals, p_t, sigma2);
    let powers = singvals
        .iter()
        .enumerate()
        .map(|(k, s)| if k < r_w { (level - sigma2 / (s * s)).max(0.0) } else { 0.0 })
        .collect();
    PowerAllocation { powers }
}

/// Rate of the waterfilling allocation with no power split off for harvesting.
pub fn max_rate(dec: &ChannelDecomposition, params: &SystemParams) -> f64 {
    let wf = waterfill_allocation(&dec.singvals, params.p_t, params.sigma2);
    channel::rate_from_gains(&dec.gains(), &wf.powers, 0.0, params.sigma2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{decompose, generate_channel};
    use proptest::prelude::*;

    #[test]
    fn equal_modes_fill_both() {
        assert_eq!(waterfill_rank(&[1.0, 1.0], 1e-9, 1.0), 2);
        assert_eq!(waterfill_allocation(&[1.0, 1.0], 10.0, 1.0).powers, vec![5.0, 5.0]);
    }

    #[test]
    fn disparity_excludes_weak_mode() {
        let sigma2 = 1.0;
        // σ²/λ₂² − σ²/λ₁² = 1e4 − 0.01 > p_t
        assert_eq!(waterfill_rank(&[10.0, 0.01], 100.0, sigma2), 1);
        assert_eq!(waterfill_allocation(&[10.0, 0.01], 100.0, sigma2).powers, vec![100.0, 0.0]);
    }

    #[test]
    fn seed7_4x4_high_snr_fills_all() {
        let d = decompose(&generate_channel(4, 4, 0.1, 7).unwrap()).unwrap();
        assert_eq!(waterfill_rank(&d.singvals, 10.0, 1e-10), 4);
    }

    #[test]
    fn single_mode_rate_inversion() {
        let d = ChannelDecomposition::from_singular_values(&[1.0]).unwrap();
        let sigma2 = 1e-3;
        let p = SystemParams::new(sigma2 * 1023.0, sigma2, 0.0, 1e-4).unwrap();
        assert!((max_rate(&d, &p) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn seed7_matches_grid_argmax() {
        let d = decompose(&generate_channel(2, 2, 0.1, 7).unwrap()).unwrap();
        let (p_t, sigma2) = (10.0, 1e-7);
        let g = d.gains();
        let wf = waterfill_allocation(&d.singvals, p_t, sigma2);
        let wf_rate = channel::rate_from_gains(&g, &wf.powers, 0.0, sigma2);
        let n = 20_000;
        let best = (0..=n)
            .map(|i| {
                let p1 = p_t * i as f64 / n as f64;
                channel::rate_from_gains(&g, &[p1, p_t - p1], 0.0, sigma2)
            })
            .fold(f64::MIN, f64::max);
        assert!(wf_rate >= best - 1e-9);
        assert!((wf_rate - best).abs() <= 1e-3 * best);
    }

    proptest! {
        #[test]
        fn closure_and_common_level(seed in any::<u64>(), n in 1usize..6, sigma2_exp in -11.0f64..-3.0) {
            let d = decompose(&generate_channel(n, n, 0.1, seed).unwrap()).unwrap();
            let sigma2 = 10f64.powf(sigma2_exp);
            let p_t = 10.0;
            let wf = waterfill_allocation(&d.singvals, p_t, sigma2);
            prop_assert!((wf.total() - p_t).abs() <= 1e-9 * p_t);
            let r_w = waterfill_rank(&d.singvals, p_t, sigma2);
            prop_assert_eq!(wf.active(), r_w);
            let levels: Vec<f64> = (0..r_w).map(|k| wf.powers[k] + sigma2 / d.gains()[k]).collect();
            for l in &levels {
                prop_assert!((l - levels[0]).abs() <= 1e-9 * levels[0]);
            }
        }

        #[test]
        fn beats_equal_split(seed in any::<u64>(), n in 1usize..6, sigma2_exp in -11.0f64..-3.0) {
            let d = decompose(&generate_channel(n, n, 0.1, seed).unwrap()).unwrap();
            let sigma2 = 10f64.powf(sigma2_exp);
            let params = SystemParams::new(10.0, sigma2, 0.0, 1e-4).unwrap();
            let eq = vec![10.0 / d.rank as f64; d.rank];
            let eq_rate = channel::rate_from_gains(&d.gains(), &eq, 0.0, sigma2);
            prop_assert!(max_rate(&d, &params) >= eq_rate - 1e-9);
        }

        #[test]
        fn monotone_in_budget_and_noise(seed in any::<u64>(), f in 1.01f64..10.0) {
            let d = decompose(&generate_channel(3, 3, 0.1, seed).unwrap()).unwrap();
            let base = SystemParams::new(1.0, 1e-8, 0.0, 1e-4).unwrap();
            let more_power = SystemParams::new(f, 1e-8, 0.0, 1e-4).unwrap();
            let more_noise = SystemParams::new(1.0, f * 1e-8, 0.0, 1e-4).unwrap();
            prop_assert!(max_rate(&d, &more_power) >= max_rate(&d, &base));
            prop_assert!(max_rate(&d, &more_noise) <= max_rate(&d, &base));
        }
    }
}
