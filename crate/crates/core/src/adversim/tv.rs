//! Distances between outcome distributions and sampling confidence radii.

use crate::netexec::Distribution;

/// Probability mass may deviate from 1 by this much before a distribution
/// counts as unnormalized.
pub const MASS_TOL: f64 = 1e-9;

/// Confidence level used for every reported radius.
pub const CONFIDENCE_DELTA: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TvError {
    #[error("distribution has total mass {0}, expected 1")]
    NotNormalized(f64),
}

fn check(d: &Distribution<impl Ord>) -> Result<(), TvError> {
    let t = d.total();
    if (t - 1.0).abs() > MASS_TOL {
        return Err(TvError::NotNormalized(t));
    }
    Ok(())
}

/// `(1/2) sum |p - q|` over the union of both supports; an outcome missing
/// from one side has probability 0 there.
pub fn tv_distance<K: Ord + Clone>(p: &Distribution<K>, q: &Distribution<K>) -> Result<f64, TvError> {
    check(p)?;
    check(q)?;
    let mut sum = 0.0;
    for (k, pk) in p.iter() {
        sum += (pk - q.prob(k)).abs();
    }
    for (k, qk) in q.iter() {
        if p.prob(k) == 0.0 {
            sum += qk;
        }
    }
    Ok((0.5 * sum).min(1.0))
}

/// Two-sided Hoeffding radius for a mean of `n` samples in `[0, 1]`:
/// `sqrt(ln(2/delta) / (2n))`.
pub fn hoeffding_radius(n: u64, delta: f64) -> f64 {
    assert!(n > 0, "radius of an empty sample");
    ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

/// Plug-in TV estimate between two empirical distributions of `n` samples
/// each, with the radius for the same confidence. The plug-in estimator has
/// bounded differences `1/n` per sample, so McDiarmid gives the Hoeffding
/// radius around its mean.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct TvEstimate {
    pub tv: f64,
    pub radius: f64,
}

pub fn empirical_tv<K: Ord + Clone>(a: &[K], b: &[K]) -> TvEstimate {
    assert!(!a.is_empty() && a.len() == b.len(), "sample sets must be non-empty and of equal size");
    let pa = Distribution::empirical(a.iter().cloned());
    let pb = Distribution::empirical(b.iter().cloned());
    TvEstimate {
        tv: tv_distance(&pa, &pb).expect("empirical distributions are normalized"),
        radius: hoeffding_radius(a.len() as u64, CONFIDENCE_DELTA),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(pairs: &[(u8, f64)]) -> Distribution<u8> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn formula_examples() {
        let p = dist(&[(0, 0.75), (1, 0.25)]);
        let u = dist(&[(0, 0.5), (1, 0.5)]);
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert!((tv_distance(&p, &u).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(tv_distance(&Distribution::point(0u8), &Distribution::point(1u8)).unwrap(), 1.0);
    }

    #[test]
    fn disjoint_supports_are_handled() {
        let p = dist(&[(0, 0.5), (1, 0.5)]);
        let q = dist(&[(1, 0.5), (2, 0.5)]);
        assert!((tv_distance(&p, &q).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_unnormalized() {
        let p = dist(&[(0, 0.5)]);
        assert!(matches!(tv_distance(&p, &p), Err(TvError::NotNormalized(_))));
    }

    #[test]
    fn hoeffding_value() {
        // sqrt(ln(200) / 2e5)
        let r = hoeffding_radius(100_000, 0.01);
        assert!((r - (200f64.ln() / 200_000.0).sqrt()).abs() < 1e-15);
        assert!((r - 0.005147).abs() < 1e-6);
    }

    #[test]
    fn empirical_identical_samples() {
        let a = vec![1, 2, 2, 3];
        let e = empirical_tv(&a, &a);
        assert_eq!(e.tv, 0.0);
        assert!(e.radius > 0.0);
    }

    proptest! {
        #[test]
        fn metric_axioms(w in proptest::collection::vec(0.01f64..1.0, 6)) {
            let norm = |v: &[f64]| { let t: f64 = v.iter().sum(); v.iter().map(|x| x / t).collect::<Vec<_>>() };
            let (a, b, c) = (norm(&w[0..2]), norm(&w[2..4]), norm(&w[4..6]));
            let d = |v: &[f64]| dist(&[(0, v[0]), (1, v[1])]);
            let (pa, pb, pc) = (d(&a), d(&b), d(&c));
            let ab = tv_distance(&pa, &pb).unwrap();
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert!((ab - tv_distance(&pb, &pa).unwrap()).abs() < 1e-15);
            prop_assert!(ab <= tv_distance(&pa, &pc).unwrap() + tv_distance(&pc, &pb).unwrap() + 1e-12);
        }
    }
}
