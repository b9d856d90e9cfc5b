//! Privacy-parameter derivation, one-sided exponential and Laplace
//! samplers, random rounding, and seeded stream derivation.
//!
//! Exponential samples use inverse-CDF sampling (-ln(1-U) for U uniform in
//! [0,1)) so every sample consumes exactly one uniform; seeded runs are
//! bit-exact reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Privacy budget (epsilon, delta) and the derived admissible-noise
/// parameters alpha = eps/2 and beta = eps / (2 ln(2/delta)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyParams {
    pub epsilon: f64,
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
}

pub fn derive_params(epsilon: f64, delta: f64) -> Result<PrivacyParams> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in (0,1), got {delta}"
        )));
    }
    Ok(PrivacyParams {
        epsilon,
        delta,
        alpha: epsilon / 2.0,
        beta: epsilon / (2.0 * (2.0 / delta).ln()),
    })
}

/// Support side of a noise sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSample {
    pub value: f64,
    pub scale: f64,
    pub sign: Sign,
}

/// Exponential noise on [0, inf) with the given scale (density
/// (1/scale) e^{-z/scale}).
pub fn sample_exp_plus<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> NoiseSample {
    assert!(scale > 0.0, "scale must be positive");
    let u: f64 = rng.random();
    let value = -scale * (-u).ln_1p();
    NoiseSample {
        value,
        scale,
        sign: Sign::Positive,
    }
}

/// Mirrored exponential noise on (-inf, 0].
pub fn sample_exp_minus<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> NoiseSample {
    let s = sample_exp_plus(rng, scale);
    NoiseSample {
        value: -s.value,
        scale,
        sign: Sign::Negative,
    }
}

/// Two-sided Laplace noise with density (1/2 scale) e^{-|z|/scale}.
/// Consumes exactly one uniform.
pub fn sample_laplace<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> NoiseSample {
    assert!(scale > 0.0, "scale must be positive");
    let u: f64 = rng.random::<f64>() - 0.5;
    let value = -scale * u.signum() * (-2.0 * u.abs()).ln_1p();
    NoiseSample {
        value,
        scale,
        sign: Sign::TwoSided,
    }
}

/// Round z to floor(z)+1 with probability equal to its fractional part,
/// floor(z) otherwise. Preserves expectation for any real z.
pub fn random_round<R: Rng + ?Sized>(rng: &mut R, z: f64) -> i64 {
    assert!(z.is_finite(), "random_round needs a finite value");
    let a = z.floor();
    let b = z - a;
    let u: f64 = rng.random();
    if u < b {
        a as i64 + 1
    } else {
        a as i64
    }
}

fn splitmix_step(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a master seed with a list of stream ids into one 64-bit seed.
/// Distinct id lists give independent-looking streams; the derivation is a
/// pure function so every consumer can be replayed in isolation.
pub fn derive_stream_seed(master: u64, ids: &[u64]) -> u64 {
    let mut state = master ^ 0xA076_1D64_78BD_642F;
    let mut out = splitmix_step(&mut state);
    for &id in ids {
        state = out ^ id.wrapping_mul(0xE703_7ED1_A0B4_28DB);
        out = splitmix_step(&mut state);
    }
    out
}

/// Seeded generator for the stream identified by (master, ids).
pub fn stream_rng(master: u64, ids: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_stream_seed(master, ids))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn derive_params_is_exact_arithmetic() {
        let p = derive_params(2.0, 0.01).unwrap();
        assert_eq!(p.alpha, 2.0 / 2.0);
        assert_eq!(p.beta, 2.0 / (2.0 * (2.0 / 0.01_f64).ln()));
        assert!((p.alpha - 1.0).abs() < 1e-15);
        assert!((p.beta - 0.18873916581775485).abs() < 1e-12);

        let p = derive_params(8.0, 1.0 / 340.0).unwrap();
        assert_eq!(p.alpha, 4.0);
        assert!((p.beta - 0.6133000746512294).abs() < 1e-12);
    }

    #[test]
    fn derive_params_rejects_bad_input() {
        assert!(derive_params(0.0, 0.5).is_err());
        assert!(derive_params(-1.0, 0.5).is_err());
        assert!(derive_params(1.0, 0.0).is_err());
        assert!(derive_params(1.0, 1.0).is_err());
        assert!(derive_params(1.0, 1.5).is_err());
    }

    #[test]
    fn exp_plus_moments() {
        let mut rng = stream_rng(11, &[1]);
        let n = 200_000;
        let mut samples: Vec<f64> = (0..n)
            .map(|_| sample_exp_plus(&mut rng, 1.0).value)
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = samples[n / 2];
        assert!((median - LN2).abs() < 0.01, "median {median}");
        assert!(samples[0] >= 0.0);
    }

    #[test]
    fn exp_minus_is_nonpositive_mirror() {
        let mut rng = stream_rng(11, &[2]);
        for _ in 0..10_000 {
            let s = sample_exp_minus(&mut rng, 0.7);
            assert!(s.value <= 0.0);
            assert_eq!(s.sign, Sign::Negative);
        }
    }

    #[test]
    fn laplace_moments() {
        let mut rng = stream_rng(11, &[3]);
        let n = 200_000;
        let samples: Vec<f64> = (0..n)
            .map(|_| sample_laplace(&mut rng, 2.0).value)
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.03, "mean {mean}");
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!((var - 8.0).abs() < 0.3, "variance {var}");
    }

    #[test]
    fn random_round_whole_number_is_fixed() {
        let mut rng = stream_rng(11, &[4]);
        for _ in 0..1000 {
            assert_eq!(random_round(&mut rng, 2.0), 2);
            assert_eq!(random_round(&mut rng, -3.0), -3);
        }
    }

    #[test]
    fn random_round_stays_adjacent_and_unbiased() {
        let mut rng = stream_rng(11, &[5]);
        for &z in &[2.25_f64, -0.5, 7.999, 0.1, -12.75] {
            let n = 100_000;
            let mut sum = 0i64;
            for _ in 0..n {
                let r = random_round(&mut rng, z);
                assert!(r == z.floor() as i64 || r == z.floor() as i64 + 1);
                sum += r;
            }
            let mean = sum as f64 / n as f64;
            assert!((mean - z).abs() < 0.01, "z={z} mean={mean}");
        }
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: Vec<f64> = {
            let mut rng = stream_rng(42, &[1, 2, 3]);
            (0..16)
                .map(|_| sample_exp_plus(&mut rng, 1.0).value)
                .collect()
        };
        let b: Vec<f64> = {
            let mut rng = stream_rng(42, &[1, 2, 3]);
            (0..16)
                .map(|_| sample_exp_plus(&mut rng, 1.0).value)
                .collect()
        };
        assert_eq!(a, b);
        let c: Vec<f64> = {
            let mut rng = stream_rng(42, &[1, 2, 4]);
            (0..16)
                .map(|_| sample_exp_plus(&mut rng, 1.0).value)
                .collect()
        };
        assert_ne!(a, c);
    }
}
