//! Independence certificates: the multiplier cascade criterion, the contour
//! integral domination criterion, and a brute-force sign-tuple dependency
//! search used as an oracle for both.

use crate::error::{Error, Result};
use crate::model::NumericConfig;
use crate::scalar::{Real, C};
use num_complex::Complex;

/// Required log-scale margin for every strict inequality in a certificate.
const LOG_MARGIN_SAFETY: f64 = 1e-6;
/// Enumeration is capped at 3^20 tuples.
const MAX_BRUTE_FORCE: usize = 20;

/// Which criterion a certificate applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionMethod {
    Multiplier,
    Integral,
}

/// One checked inequality, in log scale.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateEntry<T: Real> {
    /// 1-based position in the sequence.
    pub index: usize,
    /// `ln` of the checked quantity.
    pub log_value: T,
    /// `ln` of the binding threshold it must stay on the right side of.
    pub log_threshold: T,
    /// Positive iff the strict inequality holds; the certified verdict
    /// additionally requires the configured safety margin.
    pub log_margin: T,
}

/// Outcome of an independence check. Certificates are data: a failed
/// inequality shows up as a non-positive margin, never as an error.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceCertificate<T: Real> {
    pub method: CriterionMethod,
    pub entries: Vec<CertificateEntry<T>>,
    pub certified: bool,
    pub caveats: Vec<String>,
}

impl<T: Real> IndependenceCertificate<T> {
    pub fn min_margin(&self) -> T {
        self.entries
            .iter()
            .map(|e| e.log_margin)
            .fold(T::infinity(), |a, b| a.min(b))
    }

    pub fn with_caveat(mut self, caveat: impl Into<String>) -> Self {
        self.caveats.push(caveat.into());
        self
    }
}

// ---------------------------------------------------------------------------
// multiplier criterion
// ---------------------------------------------------------------------------

/// Checks the multiplier cascade: every `|mu_j| < 1` and each `|mu_j|`
/// strictly below the product of all earlier moduli. All products are sums
/// of logs; the moduli underflow long before the logs do.
///
/// Callers must have certified the representatives simple and pairwise
/// disjoint; the caveat list records that this is assumed here.
pub fn certify_multipliers<T: Real>(mus: &[C<T>]) -> IndependenceCertificate<T> {
    let logs: Vec<T> = mus.iter().map(|m| m.norm().ln()).collect();
    certify_multiplier_logs(&logs)
}

/// Log-domain variant for families whose moduli are not representable.
pub fn certify_multiplier_logs<T: Real>(log_abs: &[T]) -> IndependenceCertificate<T> {
    let safety = T::of(LOG_MARGIN_SAFETY);
    let mut entries = Vec::with_capacity(log_abs.len());
    let mut certified = !log_abs.is_empty();
    let mut partial_sum = T::zero();

    for (k, &log_mu) in log_abs.iter().enumerate() {
        // threshold: below 1 for the first, below the running product after
        let log_threshold = if k == 0 {
            T::zero()
        } else {
            partial_sum.min(T::zero())
        };
        let finite = log_mu.is_finite(); // excludes |mu| = 0 and overflow
        let log_margin = if finite {
            log_threshold - log_mu
        } else {
            T::neg_infinity()
        };
        if !finite || log_margin < safety {
            certified = false;
        }
        entries.push(CertificateEntry {
            index: k + 1,
            log_value: log_mu,
            log_threshold,
            log_margin,
        });
        partial_sum = partial_sum + log_mu;
    }

    IndependenceCertificate {
        method: CriterionMethod::Multiplier,
        entries,
        certified,
        caveats: vec!["assumes representatives certified simple and pairwise disjoint".to_string()],
    }
}

// ---------------------------------------------------------------------------
// contour integrals
// ---------------------------------------------------------------------------

/// Contour integral of `x dy - y dx` along a closed sampled curve by
/// trapezoid quadrature, with a Richardson half-resolution error estimate.
///
/// Returns `(value, error_estimate)`.
pub fn cycle_integral<T: Real>(
    curve: &[(C<T>, C<T>)],
    cfg: &NumericConfig<T>,
) -> Result<(C<T>, T)> {
    if curve.len() < 4 {
        return Err(Error::invalid("closed curve needs at least four samples"));
    }
    let first = curve[0];
    let last = curve[curve.len() - 1];
    let gap = ((first.0 - last.0).norm_sqr() + (first.1 - last.1).norm_sqr()).sqrt();
    let scale = curve
        .iter()
        .map(|(x, y)| x.norm().max(y.norm()))
        .fold(T::zero(), |a, b| a.max(b));
    let tol = T::of(1e-9) * scale.max(T::one()) + T::of(16.0) * cfg.ode_abs_tol;
    if gap > tol {
        return Err(Error::NotClosed {
            gap: gap.as_f64(),
            tol: tol.as_f64(),
        });
    }

    let full = trapezoid_form(curve);
    let half: Vec<(C<T>, C<T>)> = curve
        .iter()
        .step_by(2)
        .chain(std::iter::once(&curve[curve.len() - 1]))
        .cloned()
        .collect();
    let coarse = trapezoid_form(&half);
    // trapezoid converges at second order; the half-step difference
    // overestimates the fine-grid error by about 3x
    let estimate = (full - coarse).norm() / T::of(3.0);
    Ok((full, estimate))
}

fn trapezoid_form<T: Real>(curve: &[(C<T>, C<T>)]) -> C<T> {
    let half = T::of(0.5);
    let mut acc = Complex::new(T::zero(), T::zero());
    for pair in curve.windows(2) {
        let (x0, y0) = pair[0];
        let (x1, y1) = pair[1];
        let xm = (x0 + x1) * half;
        let ym = (y0 + y1) * half;
        acc = acc + xm * (y1 - y0) - ym * (x1 - x0);
    }
    acc
}

/// Checks the integral domination criterion: `|I_1| > 0` and every `|I_j|`
/// strictly above the sum of all earlier magnitudes, with an absolute cushion
/// of ten times the quadrature error estimate folded into the threshold.
pub fn certify_integrals<T: Real>(values: &[(C<T>, T)]) -> IndependenceCertificate<T> {
    let safety = T::of(LOG_MARGIN_SAFETY);
    let mut entries = Vec::with_capacity(values.len());
    let mut certified = !values.is_empty();
    let mut running_sum = T::zero();

    for (k, (value, err)) in values.iter().enumerate() {
        let magnitude = value.norm();
        let cushion = T::of(10.0) * *err;
        let threshold = running_sum + cushion + T::min_positive_value();
        let log_value = magnitude.ln();
        let log_threshold = threshold.ln();
        let log_margin = log_value - log_threshold;
        if !log_margin.is_finite() || log_margin < safety {
            certified = false;
        }
        entries.push(CertificateEntry {
            index: k + 1,
            log_value,
            log_threshold,
            log_margin,
        });
        running_sum = running_sum + magnitude;
    }

    IndependenceCertificate {
        method: CriterionMethod::Integral,
        entries,
        certified,
        caveats: vec!["assumes representatives certified simple and pairwise disjoint".to_string()],
    }
}

// ---------------------------------------------------------------------------
// brute-force dependency oracle
// ---------------------------------------------------------------------------

/// What a sign tuple must annihilate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DependencyMode {
    /// `|sum_n alpha_n v_n| < tol`.
    Additive,
    /// `|sum_n alpha_n ln|v_n|| < tol` (a multiplicative relation between
    /// the moduli).
    Multiplicative,
}

/// Exhaustive search for a nonzero tuple in `{-1, 0, 1}^N` annihilating the
/// values. The first nonzero entry is normalized to `+1` (tuples come in
/// opposite-sign pairs). Returns `None` when no tuple exists.
pub fn brute_force_dependency<T: Real>(
    values: &[C<T>],
    mode: DependencyMode,
    tol: T,
) -> Result<Option<Vec<i8>>> {
    let n = values.len();
    if n == 0 {
        return Ok(None);
    }
    if n > MAX_BRUTE_FORCE {
        return Err(Error::TooLarge {
            n,
            max: MAX_BRUTE_FORCE,
        });
    }

    let reduced: Vec<C<T>> = match mode {
        DependencyMode::Additive => values.to_vec(),
        DependencyMode::Multiplicative => values
            .iter()
            .map(|v| Complex::new(v.norm().ln(), T::zero()))
            .collect(),
    };

    const DIGITS: [i8; 3] = [0, 1, -1];
    let total = 3u64.pow(n as u32);
    let mut tuple = vec![0i8; n];
    'search: for idx in 1..total {
        let mut m = idx;
        for slot in tuple.iter_mut() {
            *slot = DIGITS[(m % 3) as usize];
            m /= 3;
        }
        // normalize: skip tuples whose first nonzero entry is -1
        match tuple.iter().find(|&&a| a != 0) {
            Some(1) => {}
            _ => continue 'search,
        }

        let mut acc = Complex::new(T::zero(), T::zero());
        for (a, v) in tuple.iter().zip(reduced.iter()) {
            match a {
                1 => acc = acc + *v,
                -1 => acc = acc - *v,
                _ => {}
            }
        }
        if acc.norm() < tol {
            return Ok(Some(tuple));
        }
    }
    Ok(None)
}
