use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{invalid, Result};

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    Normal::standard().cdf(z)
}

/// CDF of Student's t distribution with `df` degrees of freedom.
pub fn t_cdf(t: f64, df: f64) -> Result<f64> {
    if df.is_nan() || df <= 0.0 || !df.is_finite() {
        return invalid(format!("degrees of freedom must be positive, got {df}"));
    }
    if t.is_nan() {
        return invalid("t statistic is NaN");
    }
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| crate::Error::InvalidArgument(e.to_string()))?;
    Ok(dist.cdf(t))
}
