//! Exact geometry of the linearized local model: spirals, the admissible
//! exponential direction and entry-path normalization, the section-size
//! bound, and the analytic spiral-intersection test.

use crate::error::{Error, Result};
use crate::model::{is_exterior_unit, LeafwisePath, LocalLinearModel, NumericConfig, PathSample};
use crate::numeric::{cpowi, winding_number};
use crate::scalar::{two_pi_i, Real, C};
use crate::transport::GermMap;
use num_complex::Complex;

// ---------------------------------------------------------------------------
// spirals
// ---------------------------------------------------------------------------

/// Point of the model spiral through `w`: `t -> (e^{2 pi i t}, w e^{2 pi i lambda t})`.
pub fn spiral_point<T: Real>(w: C<T>, lambda: C<T>, t: T) -> (C<T>, C<T>) {
    let phase = two_pi_i::<T>() * Complex::new(t, T::zero());
    ((phase).exp(), w * (phase * lambda).exp())
}

/// The spiral through `start_w` winding `turns` times around the singular
/// point inside the unit bidisc; its endpoint fiber value is `nu^turns * start_w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpiralCurve<T: Real> {
    pub start_w: C<T>,
    pub turns: u32,
    pub lambda: C<T>,
    pub samples_per_turn: usize,
}

impl<T: Real> SpiralCurve<T> {
    pub fn new(start_w: C<T>, turns: u32, lambda: C<T>, samples_per_turn: usize) -> Result<Self> {
        if turns == 0 {
            return Err(Error::invalid("spiral needs at least one turn"));
        }
        if samples_per_turn < 8 {
            return Err(Error::invalid("spiral sampling density too low"));
        }
        Ok(SpiralCurve {
            start_w,
            turns,
            lambda,
            samples_per_turn,
        })
    }

    pub fn point(&self, t: T) -> (C<T>, C<T>) {
        spiral_point(self.start_w, self.lambda, t)
    }

    pub fn endpoint_w(&self) -> C<T> {
        let nu = crate::model::nu_from_lambda(self.lambda);
        cpowi(nu, self.turns as i64) * self.start_w
    }

    /// Uniform samples over `t in [0, turns]`, endpoints included.
    pub fn sample(&self) -> Vec<(T, C<T>, C<T>)> {
        let total = self.samples_per_turn * self.turns as usize;
        (0..=total)
            .map(|k| {
                let t = T::from_usize(k).unwrap() / T::from_usize(self.samples_per_turn).unwrap();
                let (z, w) = self.point(t);
                (t, z, w)
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// admissible exponential direction
// ---------------------------------------------------------------------------

/// Chooses the unit direction `kappa` with `Re kappa < 0` and
/// `Re(lambda kappa) < 0`, both margins maximized: the midpoint of the
/// admissible arc `(pi/2, 3pi/2 - arg lambda)` (suitably shifted).
pub fn choose_kappa<T: Real>(lambda: C<T>) -> Result<C<T>> {
    let no_direction = || Error::NoAdmissibleDirection {
        re: lambda.re.as_f64(),
        im: lambda.im.as_f64(),
    };
    if lambda.norm() <= T::min_positive_value() {
        return Err(no_direction());
    }
    let theta = lambda.arg();
    // |theta| = pi makes the two half-plane arcs exactly complementary
    if theta.abs() >= T::PI() - T::epsilon() * T::of(16.0) {
        return Err(no_direction());
    }
    let angle = T::PI() - theta * T::of(0.5);
    let kappa = Complex::new(T::zero(), angle).exp();
    debug_assert!(kappa.re < T::zero());
    debug_assert!((lambda * kappa).re < T::zero());
    Ok(kappa)
}

// ---------------------------------------------------------------------------
// entry-path normalization
// ---------------------------------------------------------------------------

/// Which boundary component the entry path hits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryCase {
    /// `|z| = 1`, `|w| < 1`: a rotation suffices.
    ZBoundary,
    /// `|w| = 1`: an exponential tail is appended and the bidisc shrunk.
    WBoundary,
}

/// Record of how an entry path was brought to normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryPathSpec<T: Real> {
    /// Original endpoint before normalization.
    pub endpoint: (C<T>, C<T>),
    pub case: EntryCase,
    /// Rotation applied to the z-coordinate.
    pub rotation: T,
    /// Exponential direction used in the `|w| = 1` case.
    pub kappa: Option<C<T>>,
    /// New z-radius (fraction of the old) after shrinking, `|e^kappa z~|`.
    pub shrink_factor: Option<T>,
}

const BOUNDARY_TOL: f64 = 1e-9;
const SEPARATRIX_TOL: f64 = 1e-9;

/// Normalizes an entry path so that it starts at `(1, 0)`, immediately leaves
/// the closed unit bidisc, stays outside it, and re-enters exactly at the
/// section point `(1, w0)` with `|w0| < 1`.
///
/// Case `|w~| = 1` first appends the exponential tail along the leaf and
/// shrinks the bidisc (rescaling z), reducing to the `|z~| = 1` case; the
/// final rotation pins the endpoint to the section `{z = 1}`.
pub fn normalize_entry_path<T: Real>(
    path: &LeafwisePath<T>,
    model: &LocalLinearModel<T>,
) -> Result<(LeafwisePath<T>, EntryPathSpec<T>, LocalLinearModel<T>)> {
    let tol = T::of(BOUNDARY_TOL);
    let start = path.start();
    if start.w.norm() > tol {
        return Err(Error::invalid(
            "entry path must start on the separatrix w = 0",
        ));
    }
    if (start.z.norm() - T::one()).abs() > tol {
        return Err(Error::invalid(
            "entry path must start on the bidisc boundary |z| = 1",
        ));
    }
    for s in path.interior() {
        if !is_exterior_unit(s.z, s.w) {
            return Err(Error::invalid(
                "entry path interior samples must lie outside the closed bidisc",
            ));
        }
    }

    let end = path.endpoint();
    let (z_tilde, w_tilde) = (end.z, end.w);
    let sep_tol = T::of(SEPARATRIX_TOL);
    if w_tilde.norm() < sep_tol || z_tilde.norm() < sep_tol {
        return Err(Error::OnSeparatrix {
            z: z_tilde.norm().as_f64(),
            w: w_tilde.norm().as_f64(),
        });
    }

    let on_z_boundary = (z_tilde.norm() - T::one()).abs() <= tol;
    let on_w_boundary = (w_tilde.norm() - T::one()).abs() <= tol;

    let mut points: Vec<(C<T>, C<T>)> = path.samples().iter().map(|s| (s.z, s.w)).collect();
    let lambda = model.lambda();
    let mut new_model = model.clone();

    let (case, kappa, shrink) = if on_w_boundary {
        // append the leafwise exponential tail; both moduli decrease along it
        let kappa = choose_kappa(lambda)?;
        let tail_samples = 64usize;
        for k in 1..=tail_samples {
            let tau = T::from_usize(k).unwrap() / T::from_usize(tail_samples).unwrap();
            let arg = kappa * Complex::new(tau, T::zero());
            points.push((z_tilde * arg.exp(), w_tilde * (arg * lambda).exp()));
        }
        let shrink = (z_tilde * kappa.exp()).norm();
        // shrink the bidisc in z and rescale all samples back to unit radius
        let scale = Complex::new(shrink, T::zero());
        for (z, _) in points.iter_mut() {
            *z = *z / scale;
        }
        // the old start is now outside the shrunken bidisc; walk in from the
        // new boundary point on the separatrix
        let first_z = points[0].0;
        let lead_samples = 16usize;
        let mut lead: Vec<(C<T>, C<T>)> = (0..lead_samples)
            .map(|k| {
                let s = T::from_usize(k).unwrap() / T::from_usize(lead_samples).unwrap();
                let r = T::one() + (first_z.norm() - T::one()) * s;
                let dir = first_z / Complex::new(first_z.norm(), T::zero());
                (
                    dir * Complex::new(r, T::zero()),
                    Complex::new(T::zero(), T::zero()),
                )
            })
            .collect();
        lead.extend(points);
        points = lead;
        new_model = new_model
            .clone()
            .with_radii(new_model.z_radius() * shrink, new_model.w_radius())?;
        (EntryCase::WBoundary, Some(kappa), Some(shrink))
    } else if on_z_boundary {
        if w_tilde.norm() >= T::one() - tol {
            return Err(Error::invalid(
                "entry endpoint must satisfy |w| < 1 on |z| = 1",
            ));
        }
        (EntryCase::ZBoundary, None, None)
    } else {
        return Err(Error::invalid(
            "entry path endpoint must lie on the bidisc boundary",
        ));
    };

    // rotate the z-coordinate so the endpoint lands on the section {z = 1}
    let final_z = points[points.len() - 1].0;
    let rotation = -final_z.arg();
    let rot = Complex::new(T::zero(), rotation).exp();
    for (z, _) in points.iter_mut() {
        *z = *z * rot;
    }

    // re-anchor the start at (1, 0): replace the rotated start with an arc
    // along the separatrix just outside the bidisc
    let start_z = points[0].0;
    let psi = start_z.arg();
    if psi.abs() > T::of(1e-12) {
        let bulge = T::of(1.05);
        let arc_samples = (psi.abs() / T::of(0.1))
            .ceil()
            .to_usize()
            .unwrap_or(1)
            .max(1);
        let mut lead: Vec<(C<T>, C<T>)> = Vec::with_capacity(arc_samples + 2);
        let zero_w = Complex::new(T::zero(), T::zero());
        lead.push((Complex::new(T::one(), T::zero()), zero_w));
        for k in 0..=arc_samples {
            let s = T::from_usize(k).unwrap() / T::from_usize(arc_samples).unwrap();
            let ang = psi * s;
            lead.push((
                Complex::new(T::zero(), ang).exp() * Complex::new(bulge, T::zero()),
                zero_w,
            ));
        }
        points.remove(0);
        lead.extend(points);
        points = lead;
    } else {
        points[0].0 = Complex::new(T::one(), T::zero());
    }

    let n = points.len();
    let samples: Vec<PathSample<T>> = points
        .into_iter()
        .enumerate()
        .map(|(k, (z, w))| PathSample {
            t: T::from_usize(k).unwrap() / T::from_usize(n - 1).unwrap(),
            z,
            w,
            exterior: is_exterior_unit(z, w),
        })
        .collect();
    let normalized = LeafwisePath::from_samples_unchecked(samples);

    // verify the two normal-form assertions
    let end = normalized.endpoint();
    if (end.z - Complex::new(T::one(), T::zero())).norm() > T::of(1e-10) {
        return Err(Error::invalid(
            "normalization failed to pin the endpoint to z = 1",
        ));
    }
    if end.w.norm() >= T::one() {
        return Err(Error::invalid("normalized endpoint must satisfy |w| < 1"));
    }
    for s in normalized.interior() {
        if !s.exterior {
            return Err(Error::invalid(
                "normalized path has an interior sample inside the closed bidisc",
            ));
        }
    }

    let spec = EntryPathSpec {
        endpoint: (z_tilde, w_tilde),
        case,
        rotation,
        kappa,
        shrink_factor: shrink,
    };
    Ok((normalized, spec, new_model))
}

// ---------------------------------------------------------------------------
// section-size bound
// ---------------------------------------------------------------------------

/// Outcome of the boundary-ratio estimate for the section bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionBound<T: Real> {
    pub passed: bool,
    /// `-log|nu| - log(max/min)`; positive with room to spare when certified.
    pub log_margin: T,
    pub max_modulus: T,
    pub min_modulus: T,
}

const SAFETY_FACTOR: f64 = 1.001;

/// Certifies `|nu| < |M(w)/M(w')| < 1/|nu|` on the closed disc of radius `r`
/// by boundary sampling: by the maximum principle applied to the germ and its
/// reciprocal, boundary extrema of `|M|` bound all interior ratios.
pub fn certify_section_bound<T: Real>(
    germ: &GermMap<T>,
    radius: T,
    nu: C<T>,
    samples: usize,
) -> Result<SectionBound<T>> {
    if !radius.is_finite() || radius <= T::zero() {
        return Err(Error::invalid("section radius must be positive"));
    }
    let samples = samples.max(16);
    let mut max_mod = T::zero();
    let mut min_mod = T::infinity();
    let mut boundary_values = Vec::with_capacity(samples);
    for k in 0..samples {
        let angle = T::TAU() * T::from_usize(k).unwrap() / T::from_usize(samples).unwrap();
        let w = Complex::new(T::zero(), angle).exp() * Complex::new(radius, T::zero());
        let v = germ.eval(w)?;
        boundary_values.push(v);
        max_mod = max_mod.max(v.norm());
        min_mod = min_mod.min(v.norm());
    }

    let vanish = Err(Error::GermVanishes {
        radius: radius.as_f64(),
    });
    if min_mod <= T::of(1e-14) * max_mod.max(T::min_positive_value()) {
        return vanish;
    }
    // a zero strictly inside shows up as nonzero winding of the boundary image
    match winding_number(&boundary_values, Complex::new(T::zero(), T::zero())) {
        Some(0) => {}
        _ => return vanish,
    }

    let ratio_log = max_mod.ln() - min_mod.ln();
    let bound_log = -nu.norm().ln();
    let log_margin = bound_log - ratio_log;
    let passed = ratio_log + T::of(SAFETY_FACTOR).ln() < bound_log;
    Ok(SectionBound {
        passed,
        log_margin,
        max_modulus: max_mod,
        min_modulus: min_mod,
    })
}

/// Numeric univalence certificate on the disc of radius `r`: derivative
/// nonvanishing on a boundary grid plus degree-one boundary image around the
/// centre value. This is evidence, not a proof; certificates record it as
/// "numeric univalence".
pub fn certify_univalence<T: Real>(germ: &GermMap<T>, radius: T, samples: usize) -> Result<bool> {
    let samples = samples.max(16);
    let centre = germ.eval(Complex::new(T::zero(), T::zero()))?;
    let mut boundary = Vec::with_capacity(samples);
    let mut min_deriv = T::infinity();
    let mut max_val = T::zero();
    for k in 0..samples {
        let angle = T::TAU() * T::from_usize(k).unwrap() / T::from_usize(samples).unwrap();
        let w = Complex::new(T::zero(), angle).exp() * Complex::new(radius, T::zero());
        let (v, d) = germ.eval_with_deriv(w)?;
        boundary.push(v);
        min_deriv = min_deriv.min(d.norm());
        max_val = max_val.max((v - centre).norm());
    }
    if min_deriv <= T::of(1e-12) * (max_val / radius).max(T::min_positive_value()) {
        return Ok(false);
    }
    Ok(winding_number(&boundary, centre) == Some(1))
}

/// Shrinks the section disc through the halving sequence until the ratio
/// bound is certified and the germ is univalence-certified. Terminates
/// because the boundary ratio tends to 1 as the radius shrinks.
pub fn shrink_section<T: Real>(
    germ: &GermMap<T>,
    initial_radius: T,
    nu: C<T>,
    cfg: &NumericConfig<T>,
) -> Result<T> {
    let anchor_value = germ.eval(Complex::new(T::zero(), T::zero()))?;
    if anchor_value.norm() <= T::min_positive_value() {
        return Err(Error::GermVanishes {
            radius: initial_radius.as_f64(),
        });
    }
    let mut radius = initial_radius;
    for _ in 0..cfg.max_iterations.min(200) {
        let bound = certify_section_bound(germ, radius, nu, cfg.boundary_samples);
        match bound {
            Ok(b) if b.passed => {
                if certify_univalence(germ, radius, cfg.boundary_samples)? {
                    return Ok(radius);
                }
            }
            Ok(_) | Err(Error::GermVanishes { .. }) => {}
            Err(e) => return Err(e),
        }
        radius = radius * T::of(0.5);
    }
    Err(Error::NoConvergence {
        context: "section shrinking",
        iterations: cfg.max_iterations.min(200),
    })
}

// ---------------------------------------------------------------------------
// spiral intersection
// ---------------------------------------------------------------------------

/// Verdict of the analytic two-spiral test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpiralRelation {
    /// Identical spiral data.
    SameSpiral,
    /// The spirals share a point, with integer parameter shift `k`.
    IntersectAt(i64),
    Disjoint,
}

/// Analytic intersection test for the spirals through `w_n` (over `[0, n]`)
/// and `w_m` (over `[0, m]`): they share a point iff `w_m / w_n = nu^k` for
/// an integer `k` with overlapping parameter windows after the shift.
///
/// The integer candidate comes from the modulus equation
/// `ln|w_m / w_n| = k ln|nu|`, then the full complex condition is verified.
pub fn spirals_intersect<T: Real>(
    n: u32,
    w_n: C<T>,
    m: u32,
    w_m: C<T>,
    lambda: C<T>,
    tol: T,
) -> SpiralRelation {
    let nu = crate::model::nu_from_lambda(lambda);
    let ratio = w_m / w_n;
    let log_abs_nu = nu.norm().ln();
    let k_real = ratio.norm().ln() / log_abs_nu;
    if !k_real.is_finite() {
        return SpiralRelation::Disjoint;
    }
    let k_round = k_real.round();
    if (k_real - k_round).abs() > tol {
        return SpiralRelation::Disjoint;
    }
    let k = match k_round.to_i64() {
        Some(k) => k,
        None => return SpiralRelation::Disjoint,
    };
    // verify phases, not just moduli
    let residual = (ratio * cpowi(nu, -k) - Complex::new(T::one(), T::zero())).norm();
    if residual > tol {
        return SpiralRelation::Disjoint;
    }
    // windows [0, n] and [0, m] overlap after the shift t = s + k
    if k > n as i64 || -k > m as i64 {
        return SpiralRelation::Disjoint;
    }
    if k == 0 && n == m {
        SpiralRelation::SameSpiral
    } else {
        SpiralRelation::IntersectAt(k)
    }
}
