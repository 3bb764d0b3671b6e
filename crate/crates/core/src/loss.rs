use crate::error::{Error, Result};

/// Poisson loss `x ln(x/xhat) - x + xhat` in nats.
///
/// Uses `0 ln 0 = 0`, so `poisson_loss(0, xhat) = xhat`, and returns
/// `f64::INFINITY` when `xhat = 0 < x`.
pub fn poisson_loss(x: f64, xhat: f64) -> Result<f64> {
    if !(x >= 0.0) || !(xhat >= 0.0) {
        return Err(Error::Domain(format!(
            "poisson loss needs nonnegative arguments, got ({x}, {xhat})"
        )));
    }
    Ok(poisson_loss_unchecked(x, xhat))
}

#[inline]
pub(crate) fn poisson_loss_unchecked(x: f64, xhat: f64) -> f64 {
    if x == 0.0 {
        xhat
    } else if xhat == 0.0 {
        f64::INFINITY
    } else {
        x * (x / xhat).ln() - x + xhat
    }
}
