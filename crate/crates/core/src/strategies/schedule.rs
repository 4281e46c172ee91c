//! Default query budgets derived from the expected-query bounds.

use crate::channels::{mutual_information_uy, JointUYZ};
use crate::error::{Error, Result};

/// Absorbs rounding in products that should land on an integer.
const CEIL_SLACK: f64 = 1e-9;

fn ceil_clean(x: f64) -> usize {
    (x - CEIL_SLACK).ceil().max(1.0) as usize
}

fn check_interior(p: f64, m: usize) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param("p", format!("{p} must lie strictly inside (0,1)")));
    }
    if m < 2 {
        return Err(Error::param("num_users", "need at least 2 users"));
    }
    Ok(())
}

/// `ceil((1/(p(1-p)) + 1/log2(1/(1-p))) * log2 m)`.
pub fn gis_default_nprime(m: usize, p: f64) -> Result<usize> {
    check_interior(p, m)?;
    let rate = 1.0 / (p * (1.0 - p)) + 1.0 / (1.0 / (1.0 - p)).log2();
    Ok(ceil_clean(rate * (m as f64).log2()))
}

/// `ceil(log2 m / (2p(1-p)))`.
pub fn map_default_nprime(m: usize, p: f64) -> Result<usize> {
    check_interior(p, m)?;
    let lambda = 2.0 * p * (1.0 - p);
    Ok(ceil_clean((m as f64).log2() / lambda))
}

/// `ceil((2/λ) log2 m)` with λ = 2p(1-p): twice the default budget, enough
/// for the victim's signature to be unique with high probability.
pub fn map_uniqueness_nprime(m: usize, p: f64) -> Result<usize> {
    check_interior(p, m)?;
    let lambda = 2.0 * p * (1.0 - p);
    Ok(ceil_clean(2.0 / lambda * (m as f64).log2()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TssSchedule {
    pub n_prime: usize,
    pub epsilon: f64,
    pub rounds: usize,
}

const FIXED_POINT_CAP: usize = 100;

/// Block length, slack and round count for TSS.
///
/// The block length solves `n' = log2 m / (I(U;Y) + n'^(-1/3))` by iterating
/// from `log2 m / I(U;Y)` until the integer part stops changing; `n'` is that
/// integer part. Then `ε = n'^(-1/3)` and
/// `rounds = ceil(log2 m / log2(n' ε²))`. Requires `n' ε² > 1`.
pub fn tss_default_params(m: usize, joint: &JointUYZ) -> Result<TssSchedule> {
    if m < 2 {
        return Err(Error::param("num_users", "need at least 2 users"));
    }
    let info = mutual_information_uy(joint);
    if info <= 1e-12 {
        return Err(Error::param(
            "joint",
            "I(U;Y) = 0: queries carry no information, use the exhaustive strategy",
        ));
    }
    let log_m = (m as f64).log2();
    let mut x = log_m / info;
    for _ in 0..FIXED_POINT_CAP {
        let next = log_m / (info + x.powf(-1.0 / 3.0));
        let stable = next.floor() == x.floor();
        x = next;
        if stable {
            break;
        }
    }
    let n_prime = (x.floor() as usize).max(1);
    let epsilon = (n_prime as f64).powf(-1.0 / 3.0);
    let gain = n_prime as f64 * epsilon * epsilon;
    if gain <= 1.0 + 1e-9 {
        return Err(Error::param(
            "num_users",
            format!(
                "schedule gives n' = {n_prime} with n'·ε² = {gain:.3} <= 1; \
                 use more users or set epsilon explicitly"
            ),
        ));
    }
    let rounds = ceil_clean(log_m / gain.log2());
    Ok(TssSchedule {
        n_prime,
        epsilon,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{build_joint, BinaryChannel};

    fn noiseless(p: f64) -> JointUYZ {
        build_joint(p, BinaryChannel::noiseless(), BinaryChannel::noiseless()).unwrap()
    }

    #[test]
    fn gis_budget() {
        assert_eq!(gis_default_nprime(1 << 10, 0.5).unwrap(), 50);
        assert_eq!(gis_default_nprime(2, 0.5).unwrap(), 5);
        assert_eq!(gis_default_nprime(1 << 10, 0.1).unwrap(), 177);
        assert!(gis_default_nprime(1 << 10, 0.0).is_err());
        assert!(gis_default_nprime(1 << 10, 1.0).is_err());
    }

    #[test]
    fn map_budget() {
        assert_eq!(map_default_nprime(1 << 10, 0.5).unwrap(), 20);
        assert_eq!(map_default_nprime(1 << 20, 0.5).unwrap(), 40);
        assert_eq!(map_default_nprime(1 << 10, 0.1).unwrap(), 56);
        assert!(map_default_nprime(1 << 10, 1.0).is_err());
        assert_eq!(map_uniqueness_nprime(1 << 14, 0.5).unwrap(), 56);
    }

    #[test]
    fn tss_fixed_point_at_2_pow_20() {
        // Independent run of the iteration: 20 -> 14.615 -> 14.194, integer
        // part 14 twice in a row.
        let log_m = 20.0f64;
        let x1 = log_m / (1.0 + 20f64.powf(-1.0 / 3.0));
        let x2 = log_m / (1.0 + x1.powf(-1.0 / 3.0));
        assert_eq!((x1.floor(), x2.floor()), (14.0, 14.0));

        let s = tss_default_params(1 << 20, &noiseless(0.5)).unwrap();
        assert_eq!(s.n_prime, 14);
        assert!((s.epsilon - 14f64.powf(-1.0 / 3.0)).abs() < 1e-15);
        // ceil(20 / log2(14^(1/3))) = ceil(60 / log2 14) = ceil(15.76)
        assert_eq!(s.rounds, 16);
    }

    #[test]
    fn tss_schedule_errors() {
        let flat = build_joint(
            0.5,
            BinaryChannel::noiseless(),
            BinaryChannel::new(0.5, 0.5).unwrap(),
        )
        .unwrap();
        assert!(tss_default_params(1 << 20, &flat).is_err());
        // m = 4: iterates 2 -> 1.115 -> 1.018, n' = 1 and n'ε² = 1.
        assert!(tss_default_params(4, &noiseless(0.5)).is_err());
        assert!(tss_default_params(2, &noiseless(0.5)).is_err());
    }

    #[test]
    fn tss_schedule_desk_scale() {
        let cases = [(10, 6, 12), (12, 8, 12), (14, 9, 14)];
        for (log_m, n_prime, rounds) in cases {
            let s = tss_default_params(1 << log_m, &noiseless(0.5)).unwrap();
            assert_eq!((s.n_prime, s.rounds), (n_prime, rounds), "m = 2^{log_m}");
            assert!(s.n_prime as f64 * s.epsilon * s.epsilon > 1.0);
        }
    }
}
