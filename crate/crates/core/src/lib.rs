//! Joint transmit precoding and receive power splitting for a point-to-point
//! MIMO link that carries information and energy at once.
//!
//! The receiver routes a fraction `ρ` of the RF power at every antenna to an
//! energy harvester and the rest to the information decoder. Given a transmit
//! budget and a minimum rate, [`solver::solve_op1`] finds the covariance and
//! split that maximize the power delivered to the harvester;
//! [`solver::solve_op2`] does the same for an idealized receiver that can
//! harvest and decode the same signal.
//!
//! ```
//! use swipt_core::channel::{decompose, generate_channel, SystemParams};
//! use swipt_core::solver::{solve_op1, Mode};
//!
//! let h = generate_channel(2, 2, 0.1, 7).unwrap();
//! let dec = decompose(&h).unwrap();
//! let params = SystemParams::new(10.0, 1e-13, 0.0, 1e-4).unwrap();
//! let sol = solve_op1(&dec, &params).unwrap();
//! assert_eq!(sol.mode, Mode::EnergyBeamforming);
//! assert!((sol.p_re - 10.0 * dec.lambda1_sq()).abs() < 1e-12);
//! ```

// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod channel;
pub mod error;
pub mod exp;
pub mod harvest;
pub mod highsnr;
pub mod kkt;
pub mod linalg;
pub mod numeric;
pub mod regimes;
pub mod solver;
pub mod waterfill;

pub use error::{Result, SwiptError};
