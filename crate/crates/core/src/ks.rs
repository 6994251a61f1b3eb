//! One-sample Kolmogorov–Smirnov distance.

use crate::error::Result;

/// `sup_y |F_N(y) - F(y)|` for the empirical law of `samples`, which is
/// sorted in place. `cdf` must be non-decreasing.
pub fn ks_distance<F>(samples: &mut [f64], mut cdf: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < samples.len() {
        // ties jump the empirical CDF in one step
        let mut j = i;
        while j + 1 < samples.len() && samples[j + 1] == samples[i] {
            j += 1;
        }
        let f = cdf(samples[i])?;
        d = d.max((f - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    Ok(d)
}
