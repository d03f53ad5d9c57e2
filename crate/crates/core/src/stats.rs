//! Shared statistical helpers: normal tail probabilities (including the
//! log-domain form for extreme statistics) and Kolmogorov-Smirnov tests.

use statrs::function::erf::erfc;

/// One-sided standard normal tail 1 - Phi(z), accurate to better than 1e-12
/// relative for |z| <= 8.
pub fn normal_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// log10 of the one-sided tail; switches to the asymptotic expansion where
/// erfc underflows (z above ~37).
pub fn normal_tail_log10(z: f64) -> f64 {
    if z < 30.0 {
        normal_tail(z).log10()
    } else {
        // ln Q(z) = -z^2/2 - ln(z sqrt(2 pi)) + ln(1 - 1/z^2 + 3/z^4 - ...)
        let z2 = z * z;
        let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2);
        let ln_q = -0.5 * z2 - (z * (2.0 * std::f64::consts::PI).sqrt()).ln() + series.ln();
        ln_q / std::f64::consts::LN_10
    }
}

/// Kolmogorov distribution survival function Q_KS(lambda), the asymptotic
/// null distribution of the scaled KS statistic.
fn ks_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample KS p-value (asymptotic). Conservative for discrete data, which
/// only makes equal-distribution assertions stricter to fail.
pub fn ks_two_sample_p(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|x, y| x.total_cmp(y));
    xb.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let mut i = 0usize;
    let mut j = 0usize;
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    ks_q((ne + 0.12 + 0.11 / ne) * d)
}

/// One-sample KS p-value against N(mean, sd^2).
pub fn ks_normal_p(samples: &[f64], mean: f64, sd: f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|x, y| x.total_cmp(y));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let cdf = normal_cdf((x - mean) / sd);
        let hi = (i as f64 + 1.0) / n - cdf;
        let lo = cdf - i as f64 / n;
        d = d.max(hi.max(lo));
    }
    let ne = n.sqrt();
    ks_q((ne + 0.12 + 0.11 / ne) * d)
}

/// Mean and (population) standard deviation.
pub fn mean_sd(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;
    use crate::update::synthetic::standard_normal;

    #[test]
    fn tail_reference_values() {
        // Frozen high-precision references.
        assert_eq!(normal_tail(0.0), 0.5);
        assert!((normal_tail(1.0) - 0.15865525393145705).abs() < 1e-16);
        assert!((normal_tail(2.0) - 0.022750131948179207).abs() < 1e-17);
        assert!(
            (normal_tail(4.0) - 3.1671241833119921e-5).abs() / 3.1671241833119921e-5 < 1e-12
        );
        assert!(
            (normal_tail(8.0) - 6.2209605742717841e-16).abs() / 6.2209605742717841e-16 < 1e-12
        );
    }

    #[test]
    fn log_tail_continuous_at_switchover() {
        // The erfc branch and the asymptotic branch agree near z = 30.
        let a = normal_tail(29.99).log10();
        let b = normal_tail_log10(30.01);
        let slope = (b - a) / 0.02;
        let interp = a + slope; // sanity: smooth, monotone
        assert!(b < a && interp < a);
        // Direct agreement at z = 35, still within the erfc range.
        let exact = normal_tail(35.0).log10();
        let asym = {
            let z: f64 = 35.0;
            let z2 = z * z;
            let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2);
            (-0.5 * z2 - (z * (2.0 * std::f64::consts::PI).sqrt()).ln() + series.ln())
                / std::f64::consts::LN_10
        };
        assert!((exact - asym).abs() < 1e-6, "{exact} vs {asym}");
    }

    #[test]
    fn ks_accepts_matched_normals() {
        let mut rng = derive_rng(1, &[1]);
        let xs: Vec<f64> = (0..5_000).map(|_| standard_normal(&mut rng)).collect();
        assert!(ks_normal_p(&xs, 0.0, 1.0) > 0.01);
    }

    #[test]
    fn ks_rejects_shifted_normals() {
        let mut rng = derive_rng(2, &[2]);
        let xs: Vec<f64> = (0..5_000).map(|_| 0.5 + standard_normal(&mut rng)).collect();
        assert!(ks_normal_p(&xs, 0.0, 1.0) < 1e-6);
    }

    #[test]
    fn ks_two_sample_detects_difference() {
        let mut rng = derive_rng(3, &[3]);
        let a: Vec<f64> = (0..4_000).map(|_| standard_normal(&mut rng)).collect();
        let b: Vec<f64> = (0..4_000).map(|_| 1.5 * standard_normal(&mut rng)).collect();
        let c: Vec<f64> = (0..4_000).map(|_| standard_normal(&mut rng)).collect();
        assert!(ks_two_sample_p(&a, &b) < 1e-4);
        assert!(ks_two_sample_p(&a, &c) > 0.01);
    }
}
