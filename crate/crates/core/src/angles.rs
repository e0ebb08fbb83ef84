//! The transcendental angle system fixing the construction.
//!
//! The pair `(α, β)` with `α ∈ (π, 13π/12)` and `β ∈ (0, π/2)` solves
//!
//! ```text
//! 1 + cos β + cos α + cos(13π/12) + cos(11π/6) = 0
//!     sin β + sin α + sin(13π/12) + sin(11π/6) = 0
//! ```
//!
//! which is the balance condition at a dodecagon vertex whose five edges
//! leave at polar angles `0, β, α, 13π/12, 11π/6`. Eliminating β gives the
//! scalar equation `h(α) = f(α) − g(α) = 0`, with
//! `f(α) = arccos(−1 − cos α − cos(13π/12) − cos(11π/6))` and
//! `g(α) = arcsin(−sin α − sin(13π/12) − sin(11π/6))`. `g` is only defined
//! up to `K = π − arcsin(−1 − sin(13π/12) − sin(11π/6))`, and `h` is strictly
//! decreasing on `[π, K]` with a sign change, so bisection on that bracket
//! finds the unique root.

use thiserror::Error;

use crate::scalar::{lit, Scalar};

/// Slack allowed on inverse-trig arguments outside `[-1, 1]`, widened to a
/// few ulps for narrower scalar types.
pub const DOMAIN_SLACK: f64 = 1e-12;
/// Bracket width after which Newton polishing takes over.
pub const BISECTION_HANDOFF: f64 = 1e-12;
pub const MAX_NEWTON_STEPS: usize = 5;
/// Smallest accepted root tolerance.
pub const MIN_ROOT_TOL: f64 = 1e-14;
/// Minimum `|tan α · tan β − 1|` accepted by [`side_long`].
pub const SINGULAR_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AngleError {
    #[error("inverse trig argument {argument} outside [-1, 1] at alpha = {alpha}")]
    DomainError { alpha: f64, argument: f64 },
    #[error("beta = {0} outside (0, pi/2)")]
    BetaOutOfRange(f64),
    #[error("h does not change sign on [pi, K]")]
    BracketFailure,
    #[error("tan(alpha) * tan(beta) = 1: side length formula is singular")]
    SingularDenominator,
    #[error("root tolerance {0:e} below the supported minimum")]
    ToleranceTooSmall(f64),
}

/// The fixed angles `13π/12` and `11π/6`, evaluated at runtime.
fn fixed_terms<T: Scalar>() -> (T, T) {
    let pi = T::PI();
    let a = pi * lit(13.0 / 12.0);
    let b = pi * lit(11.0 / 6.0);
    (a.cos() + b.cos(), a.sin() + b.sin())
}

/// Argument of the arccos in `f`.
fn cos_argument<T: Scalar>(alpha: T) -> T {
    let (c, _) = fixed_terms::<T>();
    -T::one() - alpha.cos() - c
}

/// Argument of the arcsin in `g`.
fn sin_argument<T: Scalar>(alpha: T) -> T {
    let (_, s) = fixed_terms::<T>();
    -alpha.sin() - s
}

fn clamp_unit<T: Scalar>(alpha: T, x: T) -> Result<T, AngleError> {
    let slack = lit::<T>(DOMAIN_SLACK).max(T::epsilon() * lit(8.0));
    if !(x.abs() <= T::one() + slack) {
        return Err(AngleError::DomainError {
            alpha: alpha.to_f64_lossy(),
            argument: x.to_f64_lossy(),
        });
    }
    Ok(x.max(-T::one()).min(T::one()))
}

/// Values of `f`, `g` and `h = f − g` at `alpha`.
pub fn f_g_h<T: Scalar>(alpha: T) -> Result<(T, T, T), AngleError> {
    let f = clamp_unit(alpha, cos_argument(alpha))?.acos();
    let g = clamp_unit(alpha, sin_argument(alpha))?.asin();
    Ok((f, g, f - g))
}

/// Analytic derivative of `h`, finite on the open interval `(π, K)`.
pub fn h_prime<T: Scalar>(alpha: T) -> T {
    let u = cos_argument(alpha);
    let v = sin_argument(alpha);
    // f' = -u'/sqrt(1-u²) with u' = sin α; g' = v'/sqrt(1-v²) with v' = -cos α.
    let df = -alpha.sin() / (T::one() - u * u).sqrt();
    let dg = -alpha.cos() / (T::one() - v * v).sqrt();
    df - dg
}

/// Upper end of the domain of `g` on `[π, 13π/12)`.
pub fn compute_k<T: Scalar>() -> T {
    let pi = T::PI();
    let s = (pi * lit(13.0 / 12.0)).sin() + (pi * lit(11.0 / 6.0)).sin();
    pi - (-T::one() - s).asin()
}

/// Solved angle pair with residuals of the two defining equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleSolution<T> {
    pub alpha: T,
    pub beta: T,
    pub k: T,
    pub residual_cos: T,
    pub residual_sin: T,
}

impl<T: Scalar> AngleSolution<T> {
    /// Builds a solution record for an arbitrary pair, evaluating residuals.
    pub fn from_pair(alpha: T, beta: T) -> Self {
        let (c, s) = residuals(alpha, beta);
        AngleSolution {
            alpha,
            beta,
            k: compute_k(),
            residual_cos: c,
            residual_sin: s,
        }
    }

    /// Whether the pair lies in the admissible ranges and residuals are below `tol`.
    pub fn is_valid(&self, tol: T) -> bool {
        let pi = T::PI();
        self.alpha > pi
            && self.alpha < pi * lit(13.0 / 12.0)
            && self.alpha < self.k
            && self.beta > T::zero()
            && self.beta < pi * lit(0.5)
            && self.residual_cos.abs() < tol
            && self.residual_sin.abs() < tol
    }
}

/// Residuals `(cos, sin)` of the two defining equations.
pub fn residuals<T: Scalar>(alpha: T, beta: T) -> (T, T) {
    let (c, s) = fixed_terms::<T>();
    (
        T::one() + beta.cos() + alpha.cos() + c,
        beta.sin() + alpha.sin() + s,
    )
}

/// Finds the unique root of `h` on `[π, K]`.
///
/// Bisects down to a bracket of width `max(tol_root, 1e-12)`, then polishes
/// with at most five Newton steps kept inside the bracket. If Newton leaves
/// the bracket, plain bisection continues down to `tol_root`.
pub fn solve_angles<T: Scalar>(tol_root: T) -> Result<AngleSolution<T>, AngleError> {
    if !(tol_root >= lit(MIN_ROOT_TOL)) {
        return Err(AngleError::ToleranceTooSmall(tol_root.to_f64_lossy()));
    }
    let k = compute_k::<T>();
    let mut lo = T::PI();
    let mut hi = k;
    let h_lo = f_g_h(lo)?.2;
    let h_hi = f_g_h(hi)?.2;
    if !(h_lo > T::zero() && h_hi < T::zero()) {
        return Err(AngleError::BracketFailure);
    }

    let half = lit::<T>(0.5);
    let handoff = tol_root.max(lit(BISECTION_HANDOFF));
    let bisect = |lo: &mut T, hi: &mut T, width: T| -> Result<(), AngleError> {
        while *hi - *lo > width {
            let mid = (*lo + *hi) * half;
            if mid <= *lo || mid >= *hi {
                break;
            }
            if f_g_h(mid)?.2 > T::zero() {
                *lo = mid;
            } else {
                *hi = mid;
            }
        }
        Ok(())
    };
    bisect(&mut lo, &mut hi, handoff)?;

    let mut alpha = (lo + hi) * half;
    let mut polished = true;
    for _ in 0..MAX_NEWTON_STEPS {
        let h = f_g_h(alpha)?.2;
        if h == T::zero() {
            break;
        }
        let next = alpha - h / h_prime(alpha);
        if !(next >= lo && next <= hi) {
            polished = false;
            break;
        }
        if next == alpha {
            break;
        }
        alpha = next;
    }
    if !polished {
        bisect(&mut lo, &mut hi, tol_root)?;
        alpha = (lo + hi) * half;
    }

    let beta = f_g_h(alpha)?.0;
    let (residual_cos, residual_sin) = residuals(alpha, beta);
    Ok(AngleSolution {
        alpha,
        beta,
        k,
        residual_cos,
        residual_sin,
    })
}

/// Length of the long dodecagon sides `a_i1 a_i2` for unit short sides:
/// `√6 (1 − tan α) / (tan α tan β − 1)`.
pub fn side_long<T: Scalar>(alpha: T, beta: T) -> Result<T, AngleError> {
    let ta = alpha.tan();
    let denom = ta * beta.tan() - T::one();
    if !(denom.abs() > lit(SINGULAR_GUARD)) {
        return Err(AngleError::SingularDenominator);
    }
    Ok(lit::<T>(6.0).sqrt() * (T::one() - ta) / denom)
}

/// Leg of the isosceles boundary triangle with base `side_long` and base
/// angles `beta`.
pub fn boundary_leg<T: Scalar>(side_long: T, beta: T) -> Result<T, AngleError> {
    if !(beta > T::zero() && beta < T::FRAC_PI_2()) {
        return Err(AngleError::BetaOutOfRange(beta.to_f64_lossy()));
    }
    Ok(side_long * lit(0.5) / beta.cos())
}
