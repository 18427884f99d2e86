//! Stationarity interval from the correlation of successive power delay
//! profiles.

use serde::{Deserialize, Serialize};

use super::kernels::Binned;
use crate::error::{Error, Result};
use crate::units::compensated_sum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiReport {
    pub c_th: f64,
    /// Interval per anchor snapshot, metres.
    pub samples: Vec<f64>,
    pub mean: f64,
    pub ccdf: Vec<(f64, f64)>,
}

/// Correlation of two profiles aligned at their first bin:
/// `sum(a b) / max(sum(a^2), sum(b^2))`. Zero when either is empty.
pub fn pdp_correlation(a: &[f64], b: &[f64]) -> f64 {
    let aa = compensated_sum(a.iter().map(|v| v * v));
    let bb = compensated_sum(b.iter().map(|v| v * v));
    let denom = aa.max(bb);
    if !(denom > 0.0) {
        return 0.0;
    }
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y)) / denom
}

/// Stationarity interval at every anchor: `(K + 1) * step`, where `K` is the
/// largest lag such that every profile up to it correlates with the anchor at
/// `c_th` or above.
pub fn stationarity_interval(pdps: &[Binned], step: f64, c_th: f64) -> Result<SiReport> {
    if !(c_th > 0.0 && c_th < 1.0) {
        return Err(Error::invalid("c_th", format!("must be in (0, 1), got {c_th}")));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid("step", format!("must be positive, got {step}")));
    }
    if pdps.len() < 2 {
        return Err(Error::InsufficientData(
            "stationarity needs at least two snapshots".into(),
        ));
    }
    let profiles: Vec<Vec<f64>> = pdps.iter().map(Binned::aligned_normalized).collect();
    let samples: Vec<f64> = (0..profiles.len())
        .map(|i| {
            let k = (i + 1..profiles.len())
                .take_while(|&j| pdp_correlation(&profiles[i], &profiles[j]) >= c_th)
                .count();
            (k + 1) as f64 * step
        })
        .collect();
    let mean = compensated_sum(samples.iter().copied()) / samples.len() as f64;
    Ok(SiReport {
        c_th,
        ccdf: ccdf(&samples),
        mean,
        samples,
    })
}

/// Empirical CCDF points `(value, P(X >= value))` in increasing order of
/// value, closed by `(max, 0)`.
pub fn ccdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut out: Vec<(f64, f64)> = v.iter().enumerate().map(|(i, x)| (*x, (n - i as f64) / n)).collect();
    if let Some(last) = v.last() {
        out.push((*last, 0.0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn profile(pairs: &[(f64, f64)]) -> Binned {
        Binned::from_pairs(pairs.iter().copied(), 10.0).unwrap()
    }

    /// Direct transcription of the definition, one lag at a time.
    fn si_oracle(pdps: &[Binned], step: f64, c_th: f64) -> Vec<f64> {
        let p: Vec<Vec<f64>> = pdps.iter().map(Binned::aligned_normalized).collect();
        (0..p.len())
            .map(|i| {
                let mut best = 0;
                for k in 1..p.len() - i {
                    if (1..=k).all(|m| pdp_correlation(&p[i], &p[i + m]) >= c_th) {
                        best = k;
                    }
                }
                (best + 1) as f64 * step
            })
            .collect()
    }

    #[test]
    fn identical_profiles_span_the_window() {
        let pdps = vec![profile(&[(100.0, 1.0), (250.0, 0.3)]); 6];
        let r = stationarity_interval(&pdps, 1.0, 0.9).unwrap();
        assert_eq!(r.samples, vec![6.0, 5.0, 4.0, 3.0, 2.0, 1.0]);
        assert_eq!(r.mean, 3.5);
    }

    #[test]
    fn abrupt_change() {
        let a = profile(&[(100.0, 1.0)]);
        let b = profile(&[(100.0, 1.0), (150.0, 3.0)]);
        let mut pdps = vec![a.clone(); 7];
        pdps.extend(vec![b; 5]);
        let r = stationarity_interval(&pdps, 2.0, 0.8).unwrap();
        assert_eq!(r.samples[0], 14.0);
        assert_eq!(r.samples, si_oracle(&pdps, 2.0, 0.8));
    }

    #[test]
    fn correlation_properties() {
        let a = profile(&[(0.0, 1.0), (30.0, 0.5)]).aligned_normalized();
        let b = profile(&[(10.0, 1.0), (20.0, 0.5)]).aligned_normalized();
        assert!((pdp_correlation(&a, &a) - 1.0).abs() < 1e-12);
        assert_eq!(pdp_correlation(&a, &b), pdp_correlation(&b, &a));
        assert_eq!(pdp_correlation(&a, &[]), 0.0);
    }

    #[test]
    fn ccdf_shape() {
        let c = ccdf(&[3.0, 1.0, 2.0, 2.0]);
        assert_eq!(c.first().unwrap(), &(1.0, 1.0));
        assert_eq!(c.last().unwrap(), &(3.0, 0.0));
        assert!(c.windows(2).all(|w| w[1].1 <= w[0].1 && w[1].0 >= w[0].0));
    }

    #[test]
    fn rejects_bad_threshold() {
        let pdps = vec![profile(&[(0.0, 1.0)]); 3];
        assert!(stationarity_interval(&pdps, 1.0, 1.0).is_err());
        assert!(stationarity_interval(&pdps, 1.0, 0.0).is_err());
        assert!(stationarity_interval(&pdps[..1], 1.0, 0.5).is_err());
    }

    fn arb_profiles() -> impl Strategy<Value = Vec<Binned>> {
        prop::collection::vec(prop::collection::vec((0.0f64..200.0, 0.01f64..1.0), 1..5), 2..25)
            .prop_map(|v| v.iter().map(|p| profile(p)).collect())
    }

    proptest! {
        #[test]
        fn matches_oracle_and_threshold_order(pdps in arb_profiles()) {
            let lo = stationarity_interval(&pdps, 1.0, 0.8).unwrap();
            let hi = stationarity_interval(&pdps, 1.0, 0.9).unwrap();
            prop_assert_eq!(&lo.samples, &si_oracle(&pdps, 1.0, 0.8));
            for (a, b) in lo.samples.iter().zip(&hi.samples) {
                prop_assert!(a >= b);
                prop_assert!(*b >= 1.0);
            }
        }

        #[test]
        fn correlation_in_unit_interval(pdps in arb_profiles()) {
            let p: Vec<Vec<f64>> = pdps.iter().map(Binned::aligned_normalized).collect();
            for a in &p {
                for b in &p {
                    let c = pdp_correlation(a, b);
                    prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
                }
            }
        }

        #[test]
        fn scale_invariant(pdps in arb_profiles(), scale in 1e-6f64..1e6) {
            let scaled: Vec<Binned> = pdps
                .iter()
                .map(|b| Binned { powers: b.powers.iter().map(|p| p * scale).collect(), ..b.clone() })
                .collect();
            let a = stationarity_interval(&pdps, 1.0, 0.85).unwrap();
            let b = stationarity_interval(&scaled, 1.0, 0.85).unwrap();
            prop_assert_eq!(a.samples, b.samples);
        }
    }
}
