use serde::Serialize;

use super::FamilyError;

/// Chain of point requests that walks Smartstart out to `p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lure {
    pub requests: Vec<(f64, f64, f64)>,
    /// Number of small steps before the final jump to `p`.
    pub n: usize,
    pub delta: f64,
    /// Smartstart stands at `p` at this time: `p + μ`.
    pub arrival_time: f64,
    /// Start of the schedule that carries the server to `p`: `μ + p/Θ`.
    pub last_start: f64,
}

/// Requests `(δ, δ; 0)`, `(iδ, iδ; δ/(Θ−1) + (i−1)δ)` for `i = 2..n` and `(p, p; μ + nδ)`,
/// where `n` is the smallest integer with `δ = p/(nΘ) < (Θ−1)μ`.
pub fn lure(p: f64, mu: f64, theta: f64, max_len: usize) -> Result<Lure, FamilyError> {
    let positive = |name: &'static str, v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(FamilyError::OutOfDomain { family: "lure", param: name, value: v, requirement: "> 0".into() })
        }
    };
    positive("p", p)?;
    positive("mu", mu)?;
    if !(theta.is_finite() && theta > 1.0) {
        return Err(FamilyError::OutOfDomain { family: "lure", param: "theta", value: theta, requirement: "> 1".into() });
    }
    let fits = |n: usize| p / (n as f64 * theta) < (theta - 1.0) * mu;
    let guess = (p / (theta * (theta - 1.0) * mu)).floor();
    if guess >= max_len as f64 {
        return Err(FamilyError::LureTooLong { needed: guess as usize + 1, limit: max_len });
    }
    let mut n = (guess as usize).max(1);
    while n > 1 && fits(n - 1) {
        n -= 1;
    }
    while !fits(n) {
        n += 1;
    }
    if n > max_len {
        return Err(FamilyError::LureTooLong { needed: n, limit: max_len });
    }
    let delta = p / (n as f64 * theta);
    let lead = delta / (theta - 1.0);
    let mut requests = Vec::with_capacity(n + 1);
    requests.push((delta, delta, 0.0));
    for i in 2..=n {
        let x = i as f64 * delta;
        requests.push((x, x, lead + (i - 1) as f64 * delta));
    }
    requests.push((p, p, mu + n as f64 * delta));
    Ok(Lure { requests, n, delta, arrival_time: p + mu, last_start: mu + p / theta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_parameters() {
        let l = lure(1.0, 0.1, 2.0, 1000).unwrap();
        assert_eq!(l.n, 6);
        assert!((l.delta - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(l.requests.len(), 7);
        assert!((l.arrival_time - 1.1).abs() < 1e-15);
        assert!((l.last_start - 0.6).abs() < 1e-15);
    }

    #[test]
    fn n_is_minimal() {
        for (theta, mu) in [(1.5, 0.01), (2.05, 0.003), (3.5, 0.2), (2.0, 0.1)] {
            let l = lure(1.0, mu, theta, 100_000).unwrap();
            assert!(l.delta < (theta - 1.0) * mu);
            if l.n > 1 {
                assert!(1.0 / ((l.n - 1) as f64 * theta) >= (theta - 1.0) * mu);
            }
        }
    }

    #[test]
    fn length_cap_and_domain() {
        assert!(matches!(lure(1.0, 1e-6, 2.0, 64), Err(FamilyError::LureTooLong { .. })));
        assert!(lure(0.0, 0.1, 2.0, 64).is_err());
        assert!(lure(1.0, 0.1, 1.0, 64).is_err());
    }
}
