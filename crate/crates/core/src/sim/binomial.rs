use rand_distr::{Binomial, Distribution};

use super::rng::RngStream;
use crate::error::{Error, Result};

/// Exact `Binomial(n, p)` draw.
///
/// Small `n * min(p, 1 - p)` uses sequential inversion, larger values use the
/// BTPE acceptance/rejection scheme; no normal approximation is involved.
pub fn sample_binomial(n: u64, p: f64, rng: &mut RngStream) -> Result<u64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadProbability(p));
    }
    if n == 0 || p == 0.0 {
        return Ok(0);
    }
    if p == 1.0 {
        return Ok(n);
    }
    let dist = Binomial::new(n, p).map_err(|_| Error::BadProbability(p))?;
    Ok(dist.sample(rng))
}
