use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

fn check_open_unit<S: Scalar>(name: &'static str, p: &S) -> Result<()> {
    if *p > S::zero() && *p <= S::one() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("{} is outside (0, 1]", p.to_f64_lossy()),
        })
    }
}

fn pow<S: Scalar>(x: &S, n: usize) -> S {
    (0..n).fold(S::one(), |acc, _| acc * x.clone())
}

/// Expected number of rounds until all `n` independent geometric(`p`)
/// segments have succeeded:
/// `sum_{j=1..n} (-1)^(j+1) C(n, j) / (1 - (1-p)^j)`.
pub fn expected_max_geometric_rounds<S: Scalar>(n: usize, p: S) -> Result<S> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n_segments",
            reason: "must be at least 1".into(),
        });
    }
    check_open_unit("p", &p)?;
    let fail = S::one() - p;
    let mut binom = S::one();
    let mut total = S::zero();
    for j in 1..=n {
        binom = binom * lit::<S>((n + 1 - j) as i64) / lit::<S>(j as i64);
        let term = binom.clone() / (S::one() - pow(&fail, j));
        total = if j % 2 == 1 {
            total + term
        } else {
            total - term
        };
    }
    Ok(total)
}

/// The tail sum `sum_{m>=0} 1 - (1 - (1-p)^m)^n`, stopped once a term drops
/// below `cutoff`.
pub fn tail_sum_max_geometric(n: usize, p: f64, cutoff: f64) -> Result<f64> {
    check_open_unit("p", &p)?;
    let fail = 1.0 - p;
    let mut total = 0.0;
    let mut fail_m = 1.0f64;
    loop {
        let term = 1.0 - (1.0 - fail_m).powi(n as i32);
        total += term;
        if term < cutoff {
            return Ok(total);
        }
        fail_m *= fail;
    }
}

/// Sample mean of `max(X_1..X_n)` over `trials` draws with a fixed seed.
pub fn monte_carlo_max_geometric(n: usize, p: f64, trials: usize, seed: u64) -> Result<f64> {
    check_open_unit("p", &p)?;
    let geo = Geometric::new(p).map_err(|e| Error::InvalidParameter {
        name: "p",
        reason: e.to_string(),
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0u64;
    for _ in 0..trials {
        // `Geometric` counts failures before the first success.
        let rounds = (0..n).map(|_| geo.sample(&mut rng) + 1).max().unwrap_or(0);
        sum += rounds;
    }
    Ok(sum as f64 / trials as f64)
}

/// Probability of at least two successes in `n` Bernoulli(`p`) attempts.
pub fn p_at_least_two<S: Scalar>(p: S, n: usize) -> Result<S> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n_attempts",
            reason: format!("{n} < 2"),
        });
    }
    if p < S::zero() || p > S::one() {
        return Err(Error::InvalidProbability {
            name: "p",
            value: p.to_f64_lossy(),
        });
    }
    let fail = S::one() - p.clone();
    let none = pow(&fail, n);
    let one = lit::<S>(n as i64) * p * pow(&fail, n - 1);
    Ok(S::one() - none - one)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn closed_values() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(expected_max_geometric_rounds(2, q(1, 2)).unwrap(), q(8, 3));
        assert_eq!(
            expected_max_geometric_rounds(1, q(1, 10)).unwrap(),
            q(10, 1)
        );
        assert_eq!(expected_max_geometric_rounds(5, q(1, 1)).unwrap(), q(1, 1));
        assert!(expected_max_geometric_rounds(2, 0.0).is_err());
        assert!(expected_max_geometric_rounds(0, 0.5).is_err());
    }

    #[test]
    fn at_least_two() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(p_at_least_two(q(1, 1), 7).unwrap(), q(1, 1));
        assert_eq!(p_at_least_two(q(1, 2), 2).unwrap(), q(1, 4));
        let v: f64 = p_at_least_two(0.1, 10).unwrap();
        assert!((v - 0.263_901_070_9).abs() < 1e-9);
        assert!(p_at_least_two(0.1, 1).is_err());
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let a = monte_carlo_max_geometric(2, 0.5, 1000, 7).unwrap();
        let b = monte_carlo_max_geometric(2, 0.5, 1000, 7).unwrap();
        assert_eq!(a, b);
    }
}
