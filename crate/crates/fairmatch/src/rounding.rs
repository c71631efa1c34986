//! Dependent rounding of fractional vectors and random permutations.
//!
//! [`dependent_round`] converts `x ∈ [0,1]^n` into a random bit vector
//! preserving marginals exactly (`Pr[X_i = 1] = x_i`), preserving the
//! degree on every draw (`ΣX ∈ {⌊Σx⌋, ⌈Σx⌉}`), and making the bits
//! negatively correlated. The simulation algorithms use it to pick probe
//! sets whose size respects patience budgets without giving up the
//! per-edge marginals prescribed by an LP solution.

use rand::seq::SliceRandom;
use rand::Rng;

/// Values within this distance of 0 or 1 are treated as already integral.
pub const INTEGRALITY_EPS: f64 = 1e-12;

/// Outcome of one dependent rounding draw.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundedVector {
    /// The rounded bits, `bits[i] = (X_i == 1)`.
    pub bits: Vec<bool>,
    /// The sum of the input vector (useful for degree assertions).
    pub input_sum: f64,
}

impl RoundedVector {
    /// Number of set bits.
    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }
}

fn is_fractional(v: f64) -> bool {
    v > INTEGRALITY_EPS && v < 1.0 - INTEGRALITY_EPS
}

/// Rounds `x` to a random bit vector with exact marginals, per-draw degree
/// preservation, and negative correlation.
///
/// While at least two coordinates are fractional, the two with the lowest
/// indices are rounded against each other: with the complementary
/// probabilities that keep both marginals exact, mass `min(1-x_i, x_j)`
/// moves from `j` to `i` or mass `min(x_i, 1-x_j)` moves from `i` to `j`.
/// Every step makes at least one coordinate integral and conserves
/// `x_i + x_j`, so the loop ends after at most `n - 1` steps; a single
/// leftover fractional coordinate is resolved by an independent Bernoulli
/// draw (the only case where the total can round either way).
///
/// # Panics
///
/// If any coordinate is not a finite number in `[0, 1]`.
pub fn dependent_round(x: &[f64], rng: &mut impl Rng) -> RoundedVector {
    for (i, &v) in x.iter().enumerate() {
        assert!(
            v.is_finite() && (0.0..=1.0).contains(&v),
            "dependent_round: coordinate {i} = {v} outside [0, 1]"
        );
    }
    let input_sum: f64 = x.iter().sum();
    let mut x = x.to_vec();
    loop {
        let mut frac = x.iter().enumerate().filter(|(_, v)| is_fractional(**v));
        let Some((i, _)) = frac.next() else { break };
        match frac.next() {
            Some((j, _)) => {
                let d1 = (1.0 - x[i]).min(x[j]);
                let d2 = x[i].min(1.0 - x[j]);
                debug_assert!(d1 > 0.0 && d2 > 0.0);
                let before = x[i] + x[j];
                if rng.gen::<f64>() < d2 / (d1 + d2) {
                    x[i] += d1;
                    x[j] -= d1;
                } else {
                    x[i] -= d2;
                    x[j] += d2;
                }
                debug_assert!((x[i] + x[j] - before).abs() <= 1e-9);
            }
            None => {
                let keep = rng.gen::<f64>() < x[i];
                x[i] = if keep { 1.0 } else { 0.0 };
            }
        }
    }
    RoundedVector {
        bits: x.iter().map(|v| *v > 0.5).collect(),
        input_sum,
    }
}

/// A uniformly random permutation of `0..n` (Fisher–Yates).
pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from;
    use proptest::prelude::*;

    #[test]
    fn integral_input_passes_through() {
        let mut rng = rng_from(7);
        let r = dependent_round(&[1.0, 0.0, 1.0], &mut rng);
        assert_eq!(r.bits, vec![true, false, true]);
        assert_eq!(r.input_sum, 2.0);
    }

    #[test]
    #[should_panic(expected = "outside [0, 1]")]
    fn rejects_out_of_domain_input() {
        let mut rng = rng_from(7);
        dependent_round(&[0.5, 1.2], &mut rng);
    }

    #[test]
    fn marginals_match_input_probabilities() {
        let x = [0.3, 0.7, 0.5, 0.1];
        let mut rng = rng_from(20_240_101);
        let n = 40_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let r = dependent_round(&x, &mut rng);
            for (c, b) in counts.iter_mut().zip(&r.bits) {
                *c += *b as usize;
            }
        }
        for (i, &c) in counts.iter().enumerate() {
            let p_hat = c as f64 / n as f64;
            let sigma = (x[i] * (1.0 - x[i]) / n as f64).sqrt();
            assert!(
                (p_hat - x[i]).abs() <= 4.0 * sigma,
                "coordinate {i}: {p_hat} vs {} (sigma {sigma})",
                x[i]
            );
        }
    }

    #[test]
    fn pairwise_bits_are_negatively_correlated() {
        let x = [0.5, 0.5];
        let mut rng = rng_from(99);
        let n = 20_000;
        let (mut s0, mut s1, mut s01) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let r = dependent_round(&x, &mut rng);
            let (b0, b1) = (r.bits[0] as u8 as f64, r.bits[1] as u8 as f64);
            s0 += b0;
            s1 += b1;
            s01 += b0 * b1;
        }
        let cov = s01 / n as f64 - (s0 / n as f64) * (s1 / n as f64);
        // Σx = 1 here, so exactly one bit is ever set: covariance ≈ -0.25.
        assert!(cov < -0.2, "covariance {cov} not negative");
    }

    #[test]
    fn uniform_half_vector_sets_exactly_one_bit() {
        let mut rng = rng_from(3);
        for _ in 0..500 {
            let r = dependent_round(&[0.5, 0.5], &mut rng);
            assert_eq!(r.ones(), 1);
        }
    }

    proptest! {
        #[test]
        fn degree_is_preserved_on_every_draw(
            xs in proptest::collection::vec(0.0f64..=1.0, 1..10),
            seed in any::<u64>(),
        ) {
            let mut rng = rng_from(seed);
            let sum: f64 = xs.iter().sum();
            let r = dependent_round(&xs, &mut rng);
            let ones = r.ones() as f64;
            prop_assert!(
                ones == sum.floor() || ones == sum.ceil() ||
                // Guard against sum landing within fp noise of an integer.
                (ones - sum).abs() <= 1e-6,
                "ones = {}, input sum = {}", ones, sum
            );
        }

        #[test]
        fn bits_at_integral_coordinates_are_deterministic(
            seed in any::<u64>(),
        ) {
            let mut rng = rng_from(seed);
            let r = dependent_round(&[1.0, 0.25, 0.0, 0.75], &mut rng);
            prop_assert!(r.bits[0]);
            prop_assert!(!r.bits[2]);
        }
    }

    #[test]
    fn permutations_are_valid_and_roughly_uniform() {
        let mut rng = rng_from(11);
        let n = 60_000;
        let mut freq = std::collections::HashMap::new();
        for _ in 0..n {
            let p = random_permutation(3, &mut rng);
            let mut sorted = p.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, vec![0, 1, 2]);
            *freq.entry(p).or_insert(0usize) += 1;
        }
        assert_eq!(freq.len(), 6);
        for (_, c) in freq {
            let p_hat = c as f64 / n as f64;
            assert!(
                (p_hat - 1.0 / 6.0).abs() < 0.01,
                "permutation frequency {p_hat} far from uniform"
            );
        }
    }
}
