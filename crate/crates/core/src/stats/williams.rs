use crate::error::{degenerate, invalid, Result};

use super::dist::t_cdf;
use super::{select_tail, Alternative, Method, TestResult};

const PSD_TOLERANCE: f64 = 1e-12;

/// Williams test for the difference between two dependent correlations
/// `r13` and `r23` that share variable 3, where `r12` is the correlation
/// between variables 1 and 2 and `n` the number of observations.
///
/// `Greater` tests `rho13 > rho23`. The statistic follows a t distribution
/// with `n - 3` degrees of freedom under the null.
pub fn williams_test(r12: f64, r13: f64, r23: f64, n: usize, alternative: Alternative) -> Result<TestResult> {
    for (name, r) in [("r12", r12), ("r13", r13), ("r23", r23)] {
        if !(r > -1.0 && r < 1.0) {
            return invalid(format!("{name} must lie strictly inside (-1, 1), got {r}"));
        }
    }
    if n < 4 {
        return invalid(format!("Williams test needs n >= 4, got {n}"));
    }
    let k = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23;
    if k < -PSD_TOLERANCE {
        return invalid(format!("correlations ({r12}, {r13}, {r23}) are not jointly attainable"));
    }
    let k = k.max(0.0);
    let nf = n as f64;
    let denom = (2.0 * k * (nf - 1.0) / (nf - 3.0) + (r13 + r23).powi(2) / 4.0 * (1.0 - r12).powi(3)).sqrt();
    let num = (r13 - r23) * ((nf - 1.0) * (1.0 + r12)).sqrt();
    let t = if num == 0.0 {
        0.0
    } else if denom == 0.0 {
        return degenerate("Williams statistic has a zero denominator");
    } else {
        num / denom
    };
    let cdf = t_cdf(t, nf - 3.0)?;
    Ok(TestResult {
        statistic: t,
        p_value: select_tail(1.0 - cdf, cdf, alternative),
        method: Method::Exact,
        alternative,
        sizes: vec![n],
    })
}
