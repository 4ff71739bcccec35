//! Deterministic maps of the density recursion and the limit functions
//! built from them.
//!
//! The scalar map is `f(r) = r + v1 r / (1 + r)` and the multitype map is
//! `F_i(x) = x_i (1 + v_i / (1 + x))` with `x = sum(x_i)`. Limit functions
//! `H` and `G_i` are returned as [`LimitEval`] values carrying an upper bound
//! on the distance to the exact limit, covering both truncation of the
//! limiting procedure and double-precision rounding along the way.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{powu, Rates};

const EPS: f64 = f64::EPSILON;

/// Forward iterates are refused once `|x| * b1^n` would exceed this.
pub const MAGNITUDE_LIMIT: f64 = 1e300;

/// Newton/bisection iteration budget for the inverse of `F`.
const PSI_MAX_ITER: u32 = 200;

/// Upper bound on iterations spent inside `H`.
const H_MAX_TERMS: u32 = 1_000_000;

/// A limit value with a certified error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitEval {
    pub value: f64,
    /// Upper bound on `|value - exact limit|`.
    pub truncation_bound: f64,
    pub terms_used: u32,
}

/// Root of `psi(t) = t - sum_i (1 + t) / (b_i + t) y_i` on `[0, sum(y)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiRoot {
    pub tau: f64,
    pub residual: f64,
    pub iterations: u32,
}

fn check_nonneg(x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeInput(x))
    }
}

fn check_nonneg_slice(x: &[f64]) -> Result<()> {
    x.iter().try_for_each(|&xi| check_nonneg(xi))
}

fn check_probability(v1: f64) -> Result<()> {
    if v1 > 0.0 && v1 <= 1.0 {
        Ok(())
    } else {
        Err(Error::BadProbability(v1))
    }
}

fn check_tolerance(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::BadTolerance(tol))
    }
}

fn check_forward_magnitude(size: f64, b1: f64, n: i32) -> Result<()> {
    if n > 0 {
        let projected = size * powu(b1, n as u32);
        if !(projected <= MAGNITUDE_LIMIT) {
            return Err(Error::OverflowRisk(format!(
                "{size:e} * {b1}^{n} exceeds {MAGNITUDE_LIMIT:e}"
            )));
        }
    }
    Ok(())
}

#[inline]
fn f_once(r: f64, v1: f64) -> f64 {
    r + v1 * r / (1.0 + r)
}

#[inline]
fn f_inverse_once(y: f64, v1: f64) -> f64 {
    // Positive root of r^2 + (b1 - y) r - y = 0, written so that neither
    // branch subtracts nearly equal quantities.
    let b1 = 1.0 + v1;
    let s = y - b1;
    let disc = (s * s + 4.0 * y).sqrt();
    if s >= 0.0 {
        0.5 * (s + disc)
    } else {
        2.0 * y / (disc - s)
    }
}

/// `n`-th iterate of `f`; negative `n` iterates the inverse.
pub fn f_apply(r: f64, n: i32, v1: f64) -> Result<f64> {
    check_nonneg(r)?;
    check_probability(v1)?;
    check_forward_magnitude(r, 1.0 + v1, n)?;
    let mut x = r;
    if n >= 0 {
        for _ in 0..n {
            x = f_once(x, v1);
        }
    } else {
        for _ in 0..n.unsigned_abs() {
            x = f_inverse_once(x, v1);
        }
    }
    Ok(x)
}

/// The unique `r >= 0` with `f(r) = y`.
pub fn f_inverse(y: f64, v1: f64) -> Result<f64> {
    check_nonneg(y)?;
    check_probability(v1)?;
    Ok(f_inverse_once(y, v1))
}

/// One application of the multitype map `F`.
pub fn multi_apply(x: &[f64], rates: &Rates) -> Result<Vec<f64>> {
    rates.check_dim(x.len())?;
    check_nonneg_slice(x)?;
    Ok(multi_apply_unchecked(x, rates))
}

fn multi_apply_unchecked(x: &[f64], rates: &Rates) -> Vec<f64> {
    let total: f64 = x.iter().sum();
    let denom = 1.0 + total;
    x.iter()
        .zip(rates.v())
        .map(|(&xi, &vi)| xi + vi * xi / denom)
        .collect()
}

/// Solves `psi(t) = 0` by Newton's method started at the right end of the
/// bracket `[0, sum(y)]`, bisecting whenever a step leaves the bracket.
pub fn psi_root(y: &[f64], rates: &Rates) -> Result<PsiRoot> {
    rates.check_dim(y.len())?;
    check_nonneg_slice(y)?;
    psi_root_unchecked(y, rates)
}

fn psi_root_unchecked(y: &[f64], rates: &Rates) -> Result<PsiRoot> {
    let total: f64 = y.iter().sum();
    if total == 0.0 {
        return Ok(PsiRoot {
            tau: 0.0,
            residual: 0.0,
            iterations: 0,
        });
    }
    let b = rates.b();
    let v = rates.v();
    let psi = |t: f64| {
        t - y
            .iter()
            .zip(b)
            .map(|(&yi, &bi)| (1.0 + t) / (bi + t) * yi)
            .sum::<f64>()
    };
    let dpsi = |t: f64| {
        1.0 - y
            .iter()
            .zip(b)
            .zip(v)
            .map(|((&yi, &bi), &vi)| vi * yi / ((bi + t) * (bi + t)))
            .sum::<f64>()
    };
    let tol = 1e-13 * (1.0 + total);
    let (mut lo, mut hi) = (0.0, total);
    let mut t = hi;
    for iterations in 0..PSI_MAX_ITER {
        let p = psi(t);
        if p.abs() <= tol {
            return Ok(PsiRoot {
                tau: t,
                residual: p,
                iterations,
            });
        }
        if p > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        if hi - lo <= EPS * hi {
            break;
        }
        let slope = dpsi(t);
        let newton = t - p / slope;
        t = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::SolverFailure(format!(
        "psi root not isolated within {PSI_MAX_ITER} iterations (bracket [{lo:e}, {hi:e}])"
    )))
}

/// Inverse of the multitype map `F`.
pub fn multi_inverse(y: &[f64], rates: &Rates) -> Result<Vec<f64>> {
    let root = psi_root(y, rates)?;
    Ok(inverse_from_root(y, rates, root.tau))
}

fn inverse_from_root(y: &[f64], rates: &Rates, tau: f64) -> Vec<f64> {
    y.iter()
        .zip(rates.b())
        .map(|(&yi, &bi)| (1.0 + tau) / (bi + tau) * yi)
        .collect()
}

/// `n`-fold composition of `F` (`n > 0`) or of its inverse (`n < 0`).
pub fn multi_iterate(x: &[f64], n: i32, rates: &Rates) -> Result<Vec<f64>> {
    rates.check_dim(x.len())?;
    check_nonneg_slice(x)?;
    check_forward_magnitude(x.iter().sum(), rates.b1(), n)?;
    let mut cur = x.to_vec();
    if n >= 0 {
        for _ in 0..n {
            cur = multi_apply_unchecked(&cur, rates);
        }
    } else {
        for _ in 0..n.unsigned_abs() {
            let root = psi_root_unchecked(&cur, rates)?;
            cur = inverse_from_root(&cur, rates, root.tau);
        }
    }
    Ok(cur)
}

/// Closed form of the iterates on the dominant subspace, where
/// `F^(n)(x) = f^(n)(x) / x * x` with `x = sum(x_i)`.
pub fn multi_iterate_gamma(x: &[f64], n: i32, rates: &Rates) -> Result<Vec<f64>> {
    rates.check_dim(x.len())?;
    check_nonneg_slice(x)?;
    if let Some(i) = x[rates.d0()..].iter().position(|&xi| xi != 0.0) {
        return Err(Error::NotInGamma(rates.d0() + i));
    }
    let total: f64 = x.iter().sum();
    if total == 0.0 {
        return Ok(vec![0.0; x.len()]);
    }
    let scale = f_apply(total, n, rates.v1())? / total;
    Ok(x.iter().map(|&xi| xi * scale).collect())
}

fn h_rounding_bound(r: f64, k: u32) -> f64 {
    5.0 * f64::from(k + 1) * EPS * r
}

/// `H(r) = lim f^(n)(r / b1^n)`, evaluated as `f^(k)(r / b1^k)`.
///
/// The sequence `f^(n)(r / b1^n)` decreases to `H(r)` and its tail after `k`
/// terms is at most `r^2 v1 b1^(-k-1) / (b1 - 1)`. `k` is the smallest count
/// for which that tail plus a rounding allowance of `5 (k+1) eps r` fits in
/// `tol`.
pub fn h_eval(r: f64, v1: f64, tol: f64) -> Result<LimitEval> {
    check_nonneg(r)?;
    check_probability(v1)?;
    check_tolerance(tol)?;
    if r == 0.0 {
        return Ok(LimitEval {
            value: 0.0,
            truncation_bound: 0.0,
            terms_used: 0,
        });
    }
    let b1 = 1.0 + v1;
    let mut k = 0u32;
    // b1^(k+1); the tail constant v1 / (b1 - 1) equals 1.
    let mut growth = b1;
    let bound = loop {
        let rounding = h_rounding_bound(r, k);
        if rounding >= tol || k >= H_MAX_TERMS {
            return Err(Error::BadTolerance(tol));
        }
        let total = r * r / growth + rounding;
        if total <= tol {
            break total;
        }
        k += 1;
        growth *= b1;
    };
    let mut x = r;
    for _ in 0..k {
        x /= b1;
    }
    for _ in 0..k {
        x = f_once(x, v1);
    }
    Ok(LimitEval {
        value: x,
        truncation_bound: bound,
        terms_used: k,
    })
}

/// `G_i(r) = prod_{m>=1} (1 + H(r / b1^m) / b_i) / (1 + H(r / b1^m))` for
/// every type.
///
/// The product is cut at the first `M` with `r b1^(-M) / (b1 - 1) <= tol/2`,
/// which bounds the log of the omitted factors. Each inner `H` is evaluated
/// with tolerance `tol / (4M)`; the log of every factor is 1-Lipschitz in
/// `H`, so their combined effect is at most `expm1(M * tol / (4M))`.
pub fn g_eval(r: f64, rates: &Rates, tol: f64) -> Result<Vec<LimitEval>> {
    check_nonneg(r)?;
    check_tolerance(tol)?;
    let d = rates.dim();
    if r == 0.0 {
        return Ok(vec![
            LimitEval {
                value: 1.0,
                truncation_bound: 0.0,
                terms_used: 0,
            };
            d
        ]);
    }
    let b1 = rates.b1();
    let v1 = rates.v1();
    let mut m_terms = 0u32;
    let mut tail = r / v1;
    while tail > 0.5 * tol {
        m_terms += 1;
        tail /= b1;
        if m_terms >= H_MAX_TERMS {
            return Err(Error::BadTolerance(tol));
        }
    }
    let inner_tol = tol / (4.0 * f64::from(m_terms.max(1)));
    let mut h_values = Vec::with_capacity(m_terms as usize);
    let mut h_err = 0.0f64;
    let mut arg = r;
    for _ in 0..m_terms {
        arg /= b1;
        let h = h_eval(arg, v1, inner_tol)?;
        h_err = h_err.max(h.truncation_bound);
        h_values.push(h.value);
    }
    let m = f64::from(m_terms);
    let rounding = 2.0 * EPS * (2.0 * m + r / v1 + 1.0);
    if rounding >= 0.25 * tol {
        return Err(Error::BadTolerance(tol));
    }
    let bound = tail + (m * h_err).exp_m1() + rounding;
    Ok(rates
        .b()
        .iter()
        .map(|&bi| {
            let value = h_values
                .iter()
                .map(|&h| (1.0 + h / bi) / (1.0 + h))
                .product();
            LimitEval {
                value,
                truncation_bound: bound,
                terms_used: m_terms,
            }
        })
        .collect())
}

/// Limits paired with the scaled populations in the two limit theorems.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremLimits {
    /// `W_0`, the total of the dominant components.
    pub w0: f64,
    /// `W_i G_i(W_0)` for every type.
    pub thm1: Vec<f64>,
    /// `f^(n)(H(W_0))`.
    pub thm2_total: f64,
    /// `(W_1/W_0, ..., W_d0/W_0, 0, ..., 0) f^(n)(H(W_0))`.
    pub thm2_vector: Vec<f64>,
    pub h: LimitEval,
    pub g: Vec<LimitEval>,
}

pub fn theorem_limits(w: &[f64], n: i32, rates: &Rates, tol: f64) -> Result<TheoremLimits> {
    rates.check_dim(w.len())?;
    check_nonneg_slice(w)?;
    let d0 = rates.d0();
    let w0: f64 = w[..d0].iter().sum();
    let g = g_eval(w0, rates, tol)?;
    let h = h_eval(w0, rates.v1(), tol)?;
    let thm1 = w.iter().zip(&g).map(|(&wi, gi)| wi * gi.value).collect();
    if w0 == 0.0 {
        return Ok(TheoremLimits {
            w0,
            thm1,
            thm2_total: 0.0,
            thm2_vector: vec![0.0; w.len()],
            h,
            g,
        });
    }
    let thm2_total = f_apply(h.value, n, rates.v1())?;
    let thm2_vector = w
        .iter()
        .enumerate()
        .map(|(i, &wi)| if i < d0 { wi / w0 * thm2_total } else { 0.0 })
        .collect();
    Ok(TheoremLimits {
        w0,
        thm1,
        thm2_total,
        thm2_vector,
        h,
        g,
    })
}

/// Distance of the scaled iterates `F^(n)(x / b1^n)` from their limits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRow {
    pub n: u32,
    /// `|F^(n)(x / b1^n) - H(x_0)/x_0 (x_1, .., x_d0, 0, .., 0)|_1`.
    pub dominant: f64,
    /// For each non-dominant type `i`,
    /// `|(b1/b_i)^n F_i^(n)(x / b1^n) - x_i G_i(x_0)|`.
    pub non_dominant: Vec<f64>,
}

/// Residuals of the scaling limits for each horizon in `n_list`, using the
/// scaling `b1^(-n)` for every component.
pub fn scaling_limit_residuals(
    x: &[f64],
    n_list: &[u32],
    rates: &Rates,
) -> Result<Vec<ResidualRow>> {
    rates.check_dim(x.len())?;
    check_nonneg_slice(x)?;
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "horizons must be strictly increasing".into(),
        ));
    }
    let d0 = rates.d0();
    let x0: f64 = x[..d0].iter().sum();
    // G cannot be certified much below 1e-11; residual (b) never gets close.
    let h = h_eval(x0, rates.v1(), 1e-12 * (1.0 + x0))?.value;
    let g = g_eval(x0, rates, 1e-10 * (1.0 + x0))?;
    let limit: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, &xi)| if i < d0 && x0 > 0.0 { xi * h / x0 } else { 0.0 })
        .collect();
    let b1 = rates.b1();
    n_list
        .iter()
        .map(|&n| {
            let scale = powu(b1, n);
            let start: Vec<f64> = x.iter().map(|&xi| xi / scale).collect();
            let it = multi_iterate(&start, n as i32, rates)?;
            let dominant = it.iter().zip(&limit).map(|(a, l)| (a - l).abs()).sum();
            let non_dominant = (d0..x.len())
                .map(|i| {
                    let ratio = scale / powu(rates.b()[i], n);
                    (it[i] * ratio - x[i] * g[i].value).abs()
                })
                .collect();
            Ok(ResidualRow {
                n,
                dominant,
                non_dominant,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rates(v: &[f64]) -> Rates {
        Rates::new(v.to_vec()).unwrap()
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_apply(1.0, 1, 0.9).unwrap(), 1.45);
        assert!((f_apply(1.45, -1, 0.9).unwrap() - 1.0).abs() < 1e-15);
        let once = 1.0 + 0.9 * 1.0 / 2.0;
        let twice = once + 0.9 * once / (1.0 + once);
        assert!((f_apply(1.0, 2, 0.9).unwrap() - twice).abs() < 1e-12);
        assert!((twice - 1.982_653_061_224_489_8).abs() < 1e-12);
        assert_eq!(f_apply(3.3, 0, 0.4).unwrap(), 3.3);
    }

    #[test]
    fn f_inverse_examples() {
        assert_eq!(f_inverse(0.0, 0.9).unwrap(), 0.0);
        assert!((f_inverse(1.45, 0.9).unwrap() - 1.0).abs() < 1e-15);
        let y = f_once(0.37, 0.5);
        assert!((f_inverse(y, 0.5).unwrap() - 0.37).abs() < 1e-12);
    }

    #[test]
    fn f_errors() {
        assert_eq!(f_apply(-1.0, 1, 0.9), Err(Error::NegativeInput(-1.0)));
        assert_eq!(f_inverse(-0.5, 0.9), Err(Error::NegativeInput(-0.5)));
        assert!(matches!(
            f_apply(f64::NAN, 1, 0.9),
            Err(Error::NegativeInput(_))
        ));
        assert!(matches!(
            f_apply(1e10, 2000, 0.9),
            Err(Error::OverflowRisk(_))
        ));
        assert!(f_apply(1e10, -2000, 0.9).is_ok());
        assert_eq!(f_apply(1.0, 1, 1.5), Err(Error::BadProbability(1.5)));
    }

    #[test]
    fn multi_apply_examples() {
        let r = rates(&[0.9, 0.2]);
        let out = multi_apply(&[1.0, 1.0], &r).unwrap();
        assert!((out[0] - 1.3).abs() < 1e-15);
        assert!((out[1] - (1.0 + 0.2 / 3.0)).abs() < 1e-15);
        assert_eq!(multi_apply(&[0.0, 0.0], &r).unwrap(), vec![0.0, 0.0]);

        let r3 = rates(&[0.9, 0.9, 0.2]);
        let out = multi_apply(&[0.5, 0.0, 0.0], &r3).unwrap();
        assert_eq!(out[1..], [0.0, 0.0]);
        assert!((out[0] - f_once(0.5, 0.9)).abs() < 1e-15);
    }

    #[test]
    fn multi_errors() {
        let r = rates(&[0.9, 0.2]);
        assert!(matches!(
            multi_apply(&[1.0], &r),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
        assert_eq!(
            multi_apply(&[1.0, -2.0], &r),
            Err(Error::NegativeInput(-2.0))
        );
        assert_eq!(
            multi_inverse(&[-1.0, 0.0], &r),
            Err(Error::NegativeInput(-1.0))
        );
        assert!(matches!(
            multi_iterate(&[1e200, 0.0], 2000, &r),
            Err(Error::OverflowRisk(_))
        ));
        assert_eq!(
            multi_iterate_gamma(&[1.0, 0.5], 3, &r),
            Err(Error::NotInGamma(1))
        );
    }

    #[test]
    fn multi_inverse_examples() {
        let r = rates(&[0.9, 0.2]);
        assert_eq!(multi_inverse(&[0.0, 0.0], &r).unwrap(), vec![0.0, 0.0]);

        let r1 = rates(&[0.9]);
        let root = psi_root(&[1.45], &r1).unwrap();
        assert!((root.tau - 1.0).abs() < 1e-12);
        assert!((multi_inverse(&[1.45], &r1).unwrap()[0] - 1.0).abs() < 1e-12);

        let y = multi_apply(&[1.0, 1.0], &r).unwrap();
        let x = multi_inverse(&y, &r).unwrap();
        assert!((x[0] - 1.0).abs() + (x[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn psi_root_lies_in_bracket() {
        let r = rates(&[0.9, 0.5, 0.1]);
        let y = [3.0, 0.2, 7.5];
        let root = psi_root(&y, &r).unwrap();
        let total: f64 = y.iter().sum();
        assert!(root.tau > 0.0 && root.tau < total);
        assert!(root.residual.abs() <= 1e-13 * (1.0 + total));
    }

    #[test]
    fn iterate_identity_and_zero_components() {
        let r = rates(&[0.9, 0.9, 0.4]);
        let x = [0.2, 0.0, 0.3];
        assert_eq!(multi_iterate(&x, 0, &r).unwrap(), x.to_vec());
        assert_eq!(multi_iterate(&x, 5, &r).unwrap()[1], 0.0);
        assert_eq!(multi_iterate(&x, -5, &r).unwrap()[1], 0.0);
    }

    #[test]
    fn gamma_iterate_matches_scalar_oracle() {
        let r = rates(&[0.9, 0.9, 0.2]);
        let x = [0.1, 0.1, 0.0];
        let direct = multi_iterate(&x, 7, &r).unwrap();
        let mut s = 0.2;
        for _ in 0..7 {
            s = s + 0.9 * s / (1.0 + s);
        }
        for (i, &xi) in x.iter().enumerate() {
            assert!((direct[i] - s / 0.2 * xi).abs() <= 1e-9);
        }
        let fast = multi_iterate_gamma(&x, 7, &r).unwrap();
        for (a, b) in direct.iter().zip(&fast) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn h_examples() {
        let h0 = h_eval(0.0, 0.9, 1e-10).unwrap();
        assert_eq!((h0.value, h0.terms_used), (0.0, 0));

        let h = h_eval(0.05, 0.9, 1e-10).unwrap();
        assert!(h.value >= 0.0475 && h.value <= 0.05);
        assert!(h.truncation_bound <= 1e-10);

        // 60-digit reference: f^(80)(0.5 / 1.9^80).
        let h = h_eval(0.5, 0.9, 1e-12).unwrap();
        assert!((h.value - 0.402_034_935_394_109_605_4).abs() <= 1e-10);
        assert!(h.truncation_bound <= 1e-12);

        for (r, reference) in [
            (2.0, 1.084_371_955_982_323_846),
            (5.0, 1.777_965_182_477_885_210),
            (10.0, 2.402_615_864_471_235_040),
            (50.0, 4.071_603_059_768_998_772),
        ] {
            let h = h_eval(r, 0.9, 1e-10).unwrap();
            assert!((h.value - reference).abs() <= h.truncation_bound, "r = {r}");
        }
    }

    #[test]
    fn h_errors() {
        assert_eq!(h_eval(-0.1, 0.9, 1e-8), Err(Error::NegativeInput(-0.1)));
        assert_eq!(h_eval(1.0, 0.9, 0.0), Err(Error::BadTolerance(0.0)));
        assert_eq!(h_eval(1.0, 0.9, -1.0), Err(Error::BadTolerance(-1.0)));
        assert_eq!(h_eval(1.0, 0.9, 1e-17), Err(Error::BadTolerance(1e-17)));
    }

    #[test]
    fn g_examples() {
        let r = rates(&[0.9, 0.2]);
        for g in g_eval(0.0, &r, 1e-8).unwrap() {
            assert_eq!(g.value, 1.0);
        }
        let g = g_eval(2.0, &r, 1e-9).unwrap();
        let h = h_eval(2.0, 0.9, 1e-10).unwrap();
        assert!((2.0 * g[0].value - h.value).abs() <= 1e-8);
        assert!(g.iter().all(|gi| gi.value > 0.0 && gi.value <= 1.0));
        assert!(g[1].value > g[0].value);
    }

    #[test]
    fn g_strictly_decreasing_on_grid() {
        let r = rates(&[0.9, 0.6, 0.2]);
        let tol = 1e-10;
        let grid: Vec<Vec<LimitEval>> = (0..=40)
            .map(|k| g_eval(0.25 * f64::from(k), &r, tol).unwrap())
            .collect();
        for w in grid.windows(2) {
            for i in 0..3 {
                let gap = w[0][i].value - w[1][i].value;
                assert!(gap > w[0][i].truncation_bound + w[1][i].truncation_bound);
            }
        }
    }

    #[test]
    fn theorem_limits_examples() {
        let r = rates(&[0.9, 0.2]);
        let t = theorem_limits(&[0.0, 0.0], 3, &r, 1e-8).unwrap();
        assert!(t.thm1.iter().chain(&t.thm2_vector).all(|&x| x == 0.0));
        assert_eq!(t.thm2_total, 0.0);

        let r5 = rates(&[0.9; 5]);
        let t = theorem_limits(&[1.0; 5], -3, &r5, 1e-10).unwrap();
        let mut oracle = h_eval(5.0, 0.9, 1e-12).unwrap().value;
        for _ in 0..3 {
            oracle = (oracle - 1.9 + (oracle * oracle + 0.2 * oracle + 3.61).sqrt()) / 2.0;
        }
        for &c in &t.thm2_vector {
            assert!((c - oracle / 5.0).abs() < 1e-9);
        }
        assert!((t.thm2_vector.iter().sum::<f64>() - oracle).abs() < 1e-9);

        let r2 = rates(&[0.8, 0.8]);
        let t = theorem_limits(&[0.7, 1.9], 0, &r2, 1e-9).unwrap();
        let bound = 2.6 * t.g[0].truncation_bound + t.h.truncation_bound;
        assert!((t.thm1.iter().sum::<f64>() - t.h.value).abs() <= bound);
        for (a, b) in t.thm1.iter().zip(&t.thm2_vector) {
            assert!((a - b).abs() <= bound);
        }
    }

    #[test]
    fn theorem_limits_without_dominant_mass() {
        let r = rates(&[0.9, 0.2]);
        let t = theorem_limits(&[0.0, 1.5], 2, &r, 1e-8).unwrap();
        assert_eq!(t.thm1, vec![0.0, 1.5]);
        assert_eq!(t.thm2_vector, vec![0.0, 0.0]);
    }

    #[test]
    fn residuals_examples() {
        let r = rates(&[0.9, 0.2]);
        let rows = scaling_limit_residuals(&[0.0, 0.0], &[5, 10], &r).unwrap();
        for row in rows {
            assert_eq!(row.dominant, 0.0);
            assert_eq!(row.non_dominant, vec![0.0]);
        }
        let rows = scaling_limit_residuals(&[1.0, 0.5], &[10, 20], &r).unwrap();
        assert!(rows[1].non_dominant[0] < rows[0].non_dominant[0]);
        assert!(rows[1].dominant < rows[0].dominant);

        let r3 = rates(&[0.9, 0.9, 0.3]);
        let rows = scaling_limit_residuals(&[0.4, 0.3, 0.0], &[5, 10, 15, 20], &r3).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].dominant < w[0].dominant);
        }
        assert!(scaling_limit_residuals(&[1.0, 0.5], &[10, 10], &r).is_err());
    }
}
