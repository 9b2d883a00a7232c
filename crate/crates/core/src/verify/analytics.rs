use crate::error::{Error, Result};

/// Certified fidelity `1 − ε + 3Δ − 3 N_fail / (2k)`, unclamped.
pub fn soundness_floor(epsilon: f64, tolerance: f64, k: u64, n_fail: u64) -> f64 {
    1.0 - epsilon + 3.0 * tolerance - 3.0 * n_fail as f64 / (2.0 * k as f64)
}

/// Serfling tail for sampling `K` out of `N + K` without replacement:
/// `exp[−2ν² N K² / ((N + K)(K + 1))]`.
pub fn serfling_tail(nu: f64, n: u64, k: u64) -> Result<f64> {
    if !(0.0..1.0).contains(&nu) {
        return Err(Error::Domain(format!("nu must lie in [0, 1), got {nu}")));
    }
    if n == 0 || k == 0 {
        return Err(Error::Domain("population sizes must be positive".into()));
    }
    let (n, k) = (n as f64, k as f64);
    Ok((-2.0 * nu * nu * n * k * k / ((n + k) * (k + 1.0))).exp())
}

/// `q_X q_Z` with `ν = 2(ε − 3Δ)/5`: the X test samples `k` of `4k`
/// registers, the Z test `k` of the remaining `3k`.
pub fn joint_confidence(epsilon: f64, tolerance: f64, k: u64) -> Result<f64> {
    let nu = slack(epsilon, tolerance)?;
    let q_x = 1.0 - serfling_tail(nu, 3 * k, k)?;
    let q_z = 1.0 - serfling_tail(nu, 2 * k, k)?;
    Ok(q_x * q_z)
}

/// The looser `1 − 2 exp(−2ν²k/3)`, which `k = required_k(ε, δ, Δ)` pushes
/// to at least `1 − δ`.
pub fn joint_confidence_relaxed(epsilon: f64, tolerance: f64, k: u64) -> Result<f64> {
    let nu = slack(epsilon, tolerance)?;
    Ok(1.0 - 2.0 * (-2.0 * nu * nu * k as f64 / 3.0).exp())
}

fn slack(epsilon: f64, tolerance: f64) -> Result<f64> {
    let nu = 2.0 * (epsilon - 3.0 * tolerance) / 5.0;
    if !(nu > 0.0) {
        return Err(Error::Parameter(format!("epsilon − 3 Delta must be positive, got {}", epsilon - 3.0 * tolerance)));
    }
    Ok(nu)
}

#[cfg(test)]
mod tests {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::verify::required_k;

    #[test]
    fn floor_examples() {
        let k = 1000;
        assert!((soundness_floor(0.1, 0.02, k, 40) - 0.9).abs() < 1e-15);
        assert!((soundness_floor(0.1, 0.0, k, 0) - 0.9).abs() < 1e-15);
        assert!((soundness_floor(0.1, 0.02, k, 30) - 0.915).abs() < 1e-15);
        assert!(soundness_floor(0.1, 0.0, 10, 20) < 0.0);
    }

    #[test]
    fn tail_geometry() {
        assert_eq!(serfling_tail(0.0, 30, 10).unwrap(), 1.0);
        let (nu, k) = (0.05f64, 400u64);
        let kf = k as f64;
        let x = (-6.0 * nu * nu * kf.powi(3) / (4.0 * kf * (kf + 1.0))).exp();
        let z = (-4.0 * nu * nu * kf.powi(3) / (3.0 * kf * (kf + 1.0))).exp();
        assert!((serfling_tail(nu, 3 * k, k).unwrap() - x).abs() < 1e-15);
        assert!((serfling_tail(nu, 2 * k, k).unwrap() - z).abs() < 1e-15);
        assert!(serfling_tail(1.0, 3, 1).is_err());
    }

    #[test]
    fn confidence_chain() {
        let k = required_k(0.1, 1e-3, 0.0).unwrap();
        let q = joint_confidence(0.1, 0.0, k).unwrap();
        assert!(q >= 0.999, "{q}");
        assert!(joint_confidence_relaxed(0.1, 0.0, k).unwrap() >= 0.999);
        assert!(joint_confidence(0.1, 0.0, 2 * k).unwrap() > q);
        for k in [2, 10, 100] {
            for eps in [0.2, 0.5, 0.9] {
                let exact = joint_confidence(eps, 0.0, k).unwrap();
                assert!(exact >= joint_confidence_relaxed(eps, 0.0, k).unwrap());
            }
        }
    }

    #[test]
    fn serfling_holds_for_sampling_without_replacement() {
        // Population of N + K bits with a fixed number of ones; sample K
        // without replacement and check the deviation event against the tail.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (n, k, ones, nu) = (60usize, 20usize, 16usize, 0.1);
        let mut pop: Vec<u8> = (0..n + k).map(|i| u8::from(i < ones)).collect();
        let trials = 20_000;
        let mut hits = 0;
        for _ in 0..trials {
            pop.shuffle(&mut rng);
            let sampled: usize = pop[..k].iter().map(|&b| b as usize).sum();
            let rest: usize = pop[k..].iter().map(|&b| b as usize).sum();
            if rest as f64 >= n as f64 / k as f64 * sampled as f64 + n as f64 * nu {
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        let bound = serfling_tail(nu, n as u64, k as u64).unwrap();
        let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
        assert!(freq <= bound + 3.0 * sigma, "{freq} > {bound}");
    }
}
