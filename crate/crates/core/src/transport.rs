//! Leafwise transport: lifting base paths to leaves by adaptive integration
//! of the slope equation, with the variational equation carried alongside so
//! holonomy germs come with first derivatives.

use crate::error::{Error, Result};
use crate::model::{is_exterior_unit, CrossSection};
use crate::model::{
    LeafwisePath, LocalLinearModel, NumericConfig, PathSample, PolynomialVectorField,
};
use crate::numeric::cpowi;
use crate::scalar::{two_pi_i, Real, C};
use num_complex::Complex;

// ---------------------------------------------------------------------------
// direction fields
// ---------------------------------------------------------------------------

/// A planar complex direction field `(dz, dw) ~ (P, Q)` with first partials,
/// enough to integrate the slope equation and its variational companion.
pub trait SlopeField<T: Real> {
    fn components(&self, z: C<T>, w: C<T>) -> (C<T>, C<T>);
    /// `(P_z, P_w, Q_z, Q_w)`.
    fn partials(&self, z: C<T>, w: C<T>) -> (C<T>, C<T>, C<T>, C<T>);
    /// Magnitude scale at a point, for singularity-proximity thresholds.
    fn local_scale(&self, z: C<T>, w: C<T>) -> T;
}

impl<T: Real> SlopeField<T> for PolynomialVectorField<T> {
    fn components(&self, z: C<T>, w: C<T>) -> (C<T>, C<T>) {
        self.eval(z, w)
    }

    fn partials(&self, z: C<T>, w: C<T>) -> (C<T>, C<T>, C<T>, C<T>) {
        PolynomialVectorField::partials(self, z, w)
    }

    fn local_scale(&self, z: C<T>, w: C<T>) -> T {
        PolynomialVectorField::local_scale(self, z, w)
    }
}

impl<T: Real> SlopeField<T> for LocalLinearModel<T> {
    // z dw = lambda w dz, i.e. (P, Q) = (z, lambda w)
    fn components(&self, z: C<T>, w: C<T>) -> (C<T>, C<T>) {
        (z, self.lambda() * w)
    }

    fn partials(&self, _z: C<T>, _w: C<T>) -> (C<T>, C<T>, C<T>, C<T>) {
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        (one, zero, zero, self.lambda())
    }

    fn local_scale(&self, z: C<T>, w: C<T>) -> T {
        z.norm() + self.lambda().norm() * w.norm() + T::one()
    }
}

/// Owned foliation description a lifted germ can carry around.
#[derive(Debug, Clone, PartialEq)]
pub enum Foliation<T: Real> {
    Polynomial(PolynomialVectorField<T>),
    LinearModel(LocalLinearModel<T>),
}

impl<T: Real> SlopeField<T> for Foliation<T> {
    fn components(&self, z: C<T>, w: C<T>) -> (C<T>, C<T>) {
        match self {
            Foliation::Polynomial(f) => f.components(z, w),
            Foliation::LinearModel(m) => m.components(z, w),
        }
    }

    fn partials(&self, z: C<T>, w: C<T>) -> (C<T>, C<T>, C<T>, C<T>) {
        match self {
            Foliation::Polynomial(f) => SlopeField::partials(f, z, w),
            Foliation::LinearModel(m) => SlopeField::partials(m, z, w),
        }
    }

    fn local_scale(&self, z: C<T>, w: C<T>) -> T {
        match self {
            Foliation::Polynomial(f) => SlopeField::local_scale(f, z, w),
            Foliation::LinearModel(m) => SlopeField::local_scale(m, z, w),
        }
    }
}

// ---------------------------------------------------------------------------
// base paths
// ---------------------------------------------------------------------------

/// Which coordinate the base path lives in. The fiber coordinate is the other
/// one; lifts parametrized by whichever coordinate moves non-degenerately
/// avoid the stiffness of near-vertical leaf segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseCoord {
    Z,
    W,
}

/// Parametrized curve in the base coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum BasePath<T: Real> {
    /// `t -> anchor * exp(2 pi i * turns * t)`; negative turns reverse.
    Circle { turns: i32 },
    /// Piecewise-linear interpolation of `(t, value)` control points with
    /// strictly increasing `t` spanning `[0, 1]`.
    Polyline { points: Vec<(T, C<T>)> },
}

impl<T: Real> BasePath<T> {
    pub fn circle(turns: i32) -> Self {
        BasePath::Circle { turns }
    }

    pub fn polyline(points: Vec<(T, C<T>)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("polyline needs at least two control points"));
        }
        for pair in points.windows(2) {
            if pair[1].0.partial_cmp(&pair[0].0) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::invalid(
                    "polyline parameters must be strictly increasing",
                ));
            }
        }
        if points[0].0 != T::zero() || points[points.len() - 1].0 != T::one() {
            return Err(Error::invalid("polyline parameters must span [0, 1]"));
        }
        Ok(BasePath::Polyline { points })
    }

    pub fn point(&self, t: T) -> C<T> {
        match self {
            BasePath::Circle { turns } => {
                let k = T::from_i32(*turns).unwrap();
                (two_pi_i::<T>() * Complex::new(k * t, T::zero())).exp()
            }
            BasePath::Polyline { points } => {
                let idx = self.segment_index(t);
                let (t0, p0) = points[idx];
                let (t1, p1) = points[idx + 1];
                let s = (t - t0) / (t1 - t0);
                p0 + (p1 - p0) * Complex::new(s, T::zero())
            }
        }
    }

    fn velocity_in_segment(&self, idx: usize, t: T) -> C<T> {
        match self {
            BasePath::Circle { turns } => {
                let k = T::from_i32(*turns).unwrap();
                let pos = (two_pi_i::<T>() * Complex::new(k * t, T::zero())).exp();
                two_pi_i::<T>() * Complex::new(k, T::zero()) * pos
            }
            BasePath::Polyline { points } => {
                let (t0, p0) = points[idx];
                let (t1, p1) = points[idx + 1];
                (p1 - p0) / Complex::new(t1 - t0, T::zero())
            }
        }
    }

    fn segment_index(&self, t: T) -> usize {
        match self {
            BasePath::Circle { .. } => 0,
            BasePath::Polyline { points } => {
                let mut idx = 0;
                while idx + 2 < points.len() && points[idx + 1].0 <= t {
                    idx += 1;
                }
                idx
            }
        }
    }

    /// Smoothness breakpoints the integrator must land on exactly.
    fn breakpoints(&self) -> Vec<T> {
        match self {
            BasePath::Circle { .. } => vec![T::zero(), T::one()],
            BasePath::Polyline { points } => points.iter().map(|(t, _)| *t).collect(),
        }
    }

    /// The same geometric path traversed backwards.
    pub fn reversed(&self) -> Self {
        match self {
            BasePath::Circle { turns } => BasePath::Circle { turns: -turns },
            BasePath::Polyline { points } => {
                let mut rev: Vec<(T, C<T>)> = points
                    .iter()
                    .rev()
                    .map(|(t, p)| (T::one() - *t, *p))
                    .collect();
                // guard against -0.0 artifacts
                rev[0].0 = T::zero();
                let last = rev.len() - 1;
                rev[last].0 = T::one();
                BasePath::Polyline { points: rev }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// lifting
// ---------------------------------------------------------------------------

/// Result of a leaf lift: the transported fiber value, the holonomy
/// derivative from the variational equation, the recorded trace, and the
/// propagated local-error estimate.
#[derive(Debug, Clone)]
pub struct LiftResult<T: Real> {
    pub endpoint: C<T>,
    pub derivative: C<T>,
    pub trace: LeafwisePath<T>,
    pub estimated_error: T,
}

/// Dormand-Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct LiftState<T: Real> {
    fiber: C<T>,
    variation: C<T>,
}

/// Lifts `start` along `base_path` through the leaves of `field`, returning
/// the analytic continuation of the fiber coordinate together with the
/// holonomy derivative (variational equation integrated jointly).
///
/// Local error is controlled per unit of path parameter by an embedded
/// Dormand-Prince 5(4) pair with step rejection; the reported estimate is
/// the sum of accepted local errors propagated to the endpoint through the
/// variational factor.
pub fn lift_path<T: Real, F: SlopeField<T>>(
    field: &F,
    base: BaseCoord,
    base_path: &BasePath<T>,
    start: C<T>,
    cfg: &NumericConfig<T>,
) -> Result<LiftResult<T>> {
    cfg.validate()?;
    let mut state = LiftState {
        fiber: start,
        variation: Complex::new(T::one(), T::zero()),
    };
    let mut trace: Vec<PathSample<T>> = Vec::new();
    let mut err_accum = T::zero();
    let mut steps_used = 0usize;

    let record = |trace: &mut Vec<PathSample<T>>, t: T, base_val: C<T>, st: &LiftState<T>| {
        let (z, w) = assemble_point(base, base_val, st.fiber);
        trace.push(PathSample {
            t,
            z,
            w,
            exterior: is_exterior_unit(z, w),
        });
    };

    record(&mut trace, T::zero(), base_path.point(T::zero()), &state);

    let breakpoints = base_path.breakpoints();
    for seg in breakpoints.windows(2) {
        let (seg_start, seg_end) = (seg[0], seg[1]);
        let seg_idx = base_path.segment_index((seg_start + seg_end) * T::of(0.5));
        let mut t = seg_start;
        let mut h = cfg.initial_step.min(seg_end - seg_start);

        while t < seg_end {
            if steps_used >= cfg.max_iterations {
                return Err(Error::NoConvergence {
                    context: "leaf lift",
                    iterations: steps_used,
                });
            }
            steps_used += 1;
            h = h.min(seg_end - t).min(cfg.max_step);

            let mut k = [[Complex::new(T::zero(), T::zero()); 2]; 7];
            let mut step_err: Option<(LiftState<T>, T)> = None;
            // Dormand-Prince stages on the (fiber, variation) pair
            let mut stage_fail = None;
            for (i, row) in DP_A.iter().enumerate() {
                let mut fiber = state.fiber;
                let mut var = state.variation;
                for (j, &aij) in row.iter().enumerate().take(i) {
                    let a = T::of(aij);
                    fiber = fiber + k[j][0] * Complex::new(a * h, T::zero());
                    var = var + k[j][1] * Complex::new(a * h, T::zero());
                }
                let ts = t + T::of(DP_C[i]) * h;
                match slope_rhs(field, base, base_path, seg_idx, ts, fiber, var) {
                    Ok(rhs) => k[i] = rhs,
                    Err(e) => {
                        stage_fail = Some(e);
                        break;
                    }
                }
            }

            if stage_fail.is_none() {
                let mut fiber = state.fiber;
                let mut var = state.variation;
                let mut err_f = Complex::new(T::zero(), T::zero());
                let mut err_v = Complex::new(T::zero(), T::zero());
                let mut kmax_f = T::zero();
                let mut kmax_v = T::zero();
                for i in 0..7 {
                    let b = Complex::new(T::of(DP_B5[i]) * h, T::zero());
                    let e = Complex::new(T::of(DP_ERR[i]) * h, T::zero());
                    fiber = fiber + k[i][0] * b;
                    var = var + k[i][1] * b;
                    err_f = err_f + k[i][0] * e;
                    err_v = err_v + k[i][1] * e;
                    kmax_f = kmax_f.max(k[i][0].norm());
                    kmax_v = kmax_v.max(k[i][1].norm());
                }
                let scale_f =
                    cfg.ode_abs_tol + cfg.ode_rel_tol * state.fiber.norm().max(fiber.norm());
                let scale_v =
                    cfg.ode_abs_tol + cfg.ode_rel_tol * state.variation.norm().max(var.norm());
                // error-per-unit-step control keeps the accumulated estimate
                // within the configured tolerances; the roundoff floors stop
                // the controller from chasing estimator noise when the slope
                // magnitude (or its variation across the step, which sets the
                // time-quantization transfer) dwarfs the state, as happens on
                // near-pole passages
                let budget = T::of(0.5) * h;
                let noise = T::epsilon() * T::of(64.0);
                let spread_f = (k[6][0] - k[0][0]).norm();
                let spread_v = (k[6][1] - k[0][1]).norm();
                let t_mag = t.abs().max(T::one());
                let allow_f = (scale_f * budget)
                    .max(noise * h * kmax_f)
                    .max(noise * t_mag * spread_f);
                let allow_v = (scale_v * budget)
                    .max(noise * h * kmax_v)
                    .max(noise * t_mag * spread_v);
                let ratio = (err_f.norm() / allow_f).max(err_v.norm() / allow_v);
                if ratio <= T::one() {
                    step_err = Some((
                        LiftState {
                            fiber,
                            variation: var,
                        },
                        err_f.norm(),
                    ));
                }
                let safety = T::of(0.9) * ratio.max(T::of(1e-10)).powf(T::of(-0.25));
                let factor = safety.max(T::of(0.2)).min(T::of(5.0));
                if let Some((new_state, raw_err)) = step_err {
                    t = t + h;
                    // propagate the local error to the endpoint through the
                    // variational factor
                    err_accum = err_accum
                        + raw_err / new_state.variation.norm().max(T::min_positive_value());
                    state = new_state;
                    record(&mut trace, t, base_path.point(t), &state);
                    h = (h * factor).min(cfg.max_step);
                } else {
                    h = h * factor.min(T::of(0.5));
                    if h < T::epsilon() * T::of(64.0) {
                        // step collapse is how an approach to the singular
                        // locus manifests before the hard threshold trips
                        let base_val = base_path.point(t);
                        let (z, w) = assemble_point(base, base_val, state.fiber);
                        let (p, q) = field.components(z, w);
                        let den = match base {
                            BaseCoord::Z => p,
                            BaseCoord::W => q,
                        };
                        if den.norm() < T::of(1e-6) * field.local_scale(z, w) {
                            return Err(Error::SingularEncounter {
                                t: t.as_f64(),
                                denom: den.norm().as_f64(),
                            });
                        }
                        return Err(Error::NoConvergence {
                            context: "leaf lift step collapse",
                            iterations: steps_used,
                        });
                    }
                }
            } else if let Some(err) = stage_fail {
                // a stage hit the singular locus; try a smaller step before
                // giving up so grazing passes are resolved, not aborted
                h = h * T::of(0.25);
                if h < T::epsilon() * T::of(64.0) {
                    return Err(err);
                }
            }
        }
    }

    let estimated_error = err_accum * state.variation.norm();
    Ok(LiftResult {
        endpoint: state.fiber,
        derivative: state.variation,
        trace: LeafwisePath::from_samples_unchecked(trace),
        estimated_error,
    })
}

fn assemble_point<T: Real>(base: BaseCoord, base_val: C<T>, fiber: C<T>) -> (C<T>, C<T>) {
    match base {
        BaseCoord::Z => (base_val, fiber),
        BaseCoord::W => (fiber, base_val),
    }
}

/// Right-hand side of the lift: fiber slope and variational slope, scaled by
/// the base velocity. Errors out near the singular locus of the slope.
fn slope_rhs<T: Real, F: SlopeField<T>>(
    field: &F,
    base: BaseCoord,
    path: &BasePath<T>,
    seg_idx: usize,
    t: T,
    fiber: C<T>,
    variation: C<T>,
) -> Result<[C<T>; 2]> {
    let base_val = path.point(t);
    let vel = path.velocity_in_segment(seg_idx, t);
    let (z, w) = assemble_point(base, base_val, fiber);
    let (p, q) = field.components(z, w);
    let (pz, pw, qz, qw) = field.partials(z, w);

    let (num, den, dnum_df, dden_df) = match base {
        // dw/dz = Q/P, differentiated in w
        BaseCoord::Z => (q, p, qw, pw),
        // dz/dw = P/Q, differentiated in z
        BaseCoord::W => (p, q, pz, qz),
    };

    let scale = field.local_scale(z, w);
    if den.norm() < T::of(1e-12) * scale {
        return Err(Error::SingularEncounter {
            t: t.as_f64(),
            denom: den.norm().as_f64(),
        });
    }

    let ratio = num / den;
    let dratio = (dnum_df * den - num * dden_df) / (den * den);
    Ok([ratio * vel, dratio * vel * variation])
}

// ---------------------------------------------------------------------------
// germ maps
// ---------------------------------------------------------------------------

/// Data for a holonomy germ realized by numerical lifting.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedGerm<T: Real> {
    pub foliation: Foliation<T>,
    pub base: BaseCoord,
    pub path: BasePath<T>,
    pub section: CrossSection<T>,
    pub cfg: NumericConfig<T>,
}

/// One-dimensional holomorphic map germ on a cross-section, evaluable with
/// derivative. Closed forms compose symbolically; lifted germs evaluate by
/// integrating the slope equation, caching nothing.
///
/// All germs are anchored at the section origin `w = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum GermMap<T: Real> {
    /// `w -> nu w`.
    ExactLinear {
        nu: C<T>,
        domain_radius: T,
    },
    /// `w -> a + b w`.
    Affine {
        a: C<T>,
        b: C<T>,
        domain_radius: T,
    },
    /// `w -> (a + b w) / (c + d w)`.
    Moebius {
        a: C<T>,
        b: C<T>,
        c: C<T>,
        d: C<T>,
        domain_radius: T,
    },
    Lifted(Box<LiftedGerm<T>>),
    /// Right-to-left composition: the last entry applies first.
    Composite {
        maps: Vec<GermMap<T>>,
        domain_radius: T,
    },
}

impl<T: Real> GermMap<T> {
    pub fn exact_linear(nu: C<T>) -> Self {
        GermMap::ExactLinear {
            nu,
            domain_radius: T::infinity(),
        }
    }

    pub fn identity() -> Self {
        Self::exact_linear(Complex::new(T::one(), T::zero()))
    }

    pub fn affine(a: C<T>, b: C<T>) -> Self {
        GermMap::Affine {
            a,
            b,
            domain_radius: T::infinity(),
        }
    }

    pub fn moebius(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> Result<Self> {
        if c.norm() <= T::min_positive_value() {
            return Err(Error::invalid("moebius germ must be finite at the anchor"));
        }
        let domain_radius = if d.norm() <= T::min_positive_value() {
            T::infinity()
        } else {
            (c / d).norm()
        };
        Ok(GermMap::Moebius {
            a,
            b,
            c,
            d,
            domain_radius,
        })
    }

    pub fn domain_radius(&self) -> T {
        match self {
            GermMap::ExactLinear { domain_radius, .. }
            | GermMap::Affine { domain_radius, .. }
            | GermMap::Moebius { domain_radius, .. }
            | GermMap::Composite { domain_radius, .. } => *domain_radius,
            GermMap::Lifted(l) => l.section.disc_radius,
        }
    }

    pub fn with_domain_radius(mut self, radius: T) -> Self {
        match &mut self {
            GermMap::ExactLinear { domain_radius, .. }
            | GermMap::Affine { domain_radius, .. }
            | GermMap::Moebius { domain_radius, .. }
            | GermMap::Composite { domain_radius, .. } => *domain_radius = radius,
            GermMap::Lifted(l) => l.section.disc_radius = radius,
        }
        self
    }

    pub fn eval(&self, w: C<T>) -> Result<C<T>> {
        self.eval_with_deriv(w).map(|(v, _)| v)
    }

    pub fn eval_with_deriv(&self, w: C<T>) -> Result<(C<T>, C<T>)> {
        let radius = self.domain_radius();
        if w.norm() > radius * (T::one() + T::of(1e-9)) {
            return Err(Error::DomainError {
                value: w.norm().as_f64(),
                radius: radius.as_f64(),
            });
        }
        match self {
            GermMap::ExactLinear { nu, .. } => Ok((*nu * w, *nu)),
            GermMap::Affine { a, b, .. } => Ok((*a + *b * w, *b)),
            GermMap::Moebius { a, b, c, d, .. } => {
                let den = *c + *d * w;
                let val = (*a + *b * w) / den;
                let deriv = (*b * *c - *a * *d) / (den * den);
                Ok((val, deriv))
            }
            GermMap::Lifted(l) => {
                let lift = lift_path(&l.foliation, l.base, &l.path, w, &l.cfg)?;
                Ok((lift.endpoint, lift.derivative))
            }
            GermMap::Composite { maps, .. } => {
                let mut value = w;
                let mut deriv = Complex::new(T::one(), T::zero());
                for map in maps.iter().rev() {
                    let (v, d) = map.eval_with_deriv(value)?;
                    value = v;
                    deriv = deriv * d;
                }
                Ok((value, deriv))
            }
        }
    }

    fn is_identity(&self) -> bool {
        matches!(self, GermMap::ExactLinear { nu, .. }
            if (*nu - Complex::new(T::one(), T::zero())).norm() <= T::min_positive_value())
    }

    /// As a Moebius coefficient matrix `[[b, a], [d, c]]` when closed-form.
    fn moebius_matrix(&self) -> Option<[[C<T>; 2]; 2]> {
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        match self {
            GermMap::ExactLinear { nu, .. } => Some([[*nu, zero], [zero, one]]),
            GermMap::Affine { a, b, .. } => Some([[*b, *a], [zero, one]]),
            GermMap::Moebius { a, b, c, d, .. } => Some([[*b, *a], [*d, *c]]),
            _ => None,
        }
    }
}

/// Composition `g . f` (apply `f` first). Closed-form kinds compose
/// symbolically; anything involving a lifted germ becomes a flattened
/// composite. Errors when `f(0)` leaves the domain of `g`.
pub fn compose<T: Real>(g: &GermMap<T>, f: &GermMap<T>) -> Result<GermMap<T>> {
    let anchor_image = f.eval(Complex::new(T::zero(), T::zero()))?;
    if anchor_image.norm() > g.domain_radius() * (T::one() + T::of(1e-9)) {
        return Err(Error::DomainError {
            value: anchor_image.norm().as_f64(),
            radius: g.domain_radius().as_f64(),
        });
    }

    if f.is_identity() {
        return Ok(g.clone());
    }
    if g.is_identity() {
        return Ok(f.clone());
    }

    if let (Some(mg), Some(mf)) = (g.moebius_matrix(), f.moebius_matrix()) {
        let m = [
            [
                mg[0][0] * mf[0][0] + mg[0][1] * mf[1][0],
                mg[0][0] * mf[0][1] + mg[0][1] * mf[1][1],
            ],
            [
                mg[1][0] * mf[0][0] + mg[1][1] * mf[1][0],
                mg[1][0] * mf[0][1] + mg[1][1] * mf[1][1],
            ],
        ];
        let radius = f.domain_radius();
        let germ = simplify_moebius(m)?;
        let combined = radius.min(germ.domain_radius());
        return Ok(if radius.is_finite() {
            germ.with_domain_radius(combined)
        } else {
            germ
        });
    }

    // flatten nested composites, rightmost applied first
    let mut maps = Vec::new();
    match g {
        GermMap::Composite { maps: gm, .. } => maps.extend(gm.iter().cloned()),
        other => maps.push(other.clone()),
    }
    match f {
        GermMap::Composite { maps: fm, .. } => maps.extend(fm.iter().cloned()),
        other => maps.push(other.clone()),
    }
    let domain_radius = f.domain_radius();
    Ok(GermMap::Composite {
        maps,
        domain_radius,
    })
}

fn simplify_moebius<T: Real>(m: [[C<T>; 2]; 2]) -> Result<GermMap<T>> {
    let (b, a, d, c) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    if d.norm() <= T::min_positive_value() {
        // affine: (a + b w) / c
        let a0 = a / c;
        let b0 = b / c;
        if a0.norm() <= T::min_positive_value() {
            return Ok(GermMap::exact_linear(b0));
        }
        return Ok(GermMap::affine(a0, b0));
    }
    GermMap::moebius(a, b, c, d)
}

/// Builds the (pure) holonomy germ along `base_path` over the given section,
/// verifying the lift from the section anchor succeeds.
pub fn holonomy_germ<T: Real>(
    foliation: Foliation<T>,
    base: BaseCoord,
    base_path: BasePath<T>,
    section: CrossSection<T>,
    cfg: NumericConfig<T>,
) -> Result<GermMap<T>> {
    lift_path(&foliation, base, &base_path, section.anchor_w, &cfg)?;
    Ok(GermMap::Lifted(Box::new(LiftedGerm {
        foliation,
        base,
        path: base_path,
        section,
        cfg,
    })))
}

/// `nu^n` as an exact-linear germ, stable for large `n`.
pub fn linear_power<T: Real>(nu: C<T>, n: i64) -> GermMap<T> {
    GermMap::exact_linear(cpowi(nu, n))
}

/// First-order leafwise-ness defect of a sampled path: the worst normalized
/// transversality `|dz Q - dw P| / (|d| |field|)` between consecutive
/// samples. Zero for chords along the direction field.
pub fn leafwise_residual<T: Real, F: SlopeField<T>>(field: &F, path: &LeafwisePath<T>) -> T {
    let mut worst = T::zero();
    for pair in path.samples().windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let dz = b.z - a.z;
        let dw = b.w - a.w;
        let mid_z = (a.z + b.z) * Complex::new(T::of(0.5), T::zero());
        let mid_w = (a.w + b.w) * Complex::new(T::of(0.5), T::zero());
        let (p, q) = field.components(mid_z, mid_w);
        let step = (dz.norm_sqr() + dw.norm_sqr()).sqrt();
        let speed = (p.norm_sqr() + q.norm_sqr()).sqrt();
        if step <= T::min_positive_value() || speed <= T::min_positive_value() {
            continue;
        }
        let defect = (dz * q - dw * p).norm() / (step * speed);
        worst = worst.max(defect);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::nu_from_lambda;
    use crate::scalar::cplx;

    fn model_i() -> LocalLinearModel<f64> {
        LocalLinearModel::new_normalized(cplx(0.0, 1.0)).unwrap()
    }

    #[test]
    fn lift_linear_model_circle_matches_nu() {
        let model = model_i();
        let cfg = NumericConfig::default();
        let lift = lift_path(
            &model,
            BaseCoord::Z,
            &BasePath::circle(1),
            cplx(0.1, 0.0),
            &cfg,
        )
        .unwrap();
        let nu = nu_from_lambda(cplx::<f64>(0.0, 1.0));
        assert!((lift.endpoint - nu * cplx(0.1, 0.0)).norm() < 1e-10);
        assert!((lift.derivative - nu).norm() < 1e-10);
        assert!(lift.estimated_error <= cfg.ode_rel_tol * lift.endpoint.norm() + cfg.ode_abs_tol);
    }

    #[test]
    fn lift_constant_path_is_identity() {
        let model = model_i();
        let path = BasePath::polyline(vec![(0.0, cplx(1.0, 0.0)), (1.0, cplx(1.0, 0.0))]).unwrap();
        let lift = lift_path(
            &model,
            BaseCoord::Z,
            &path,
            cplx(0.3, 0.1),
            &NumericConfig::default(),
        )
        .unwrap();
        assert!((lift.endpoint - cplx(0.3, 0.1)).norm() < 1e-12);
        assert!((lift.derivative - cplx(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn lift_separatrix_stays_zero() {
        let model = model_i();
        let lift = lift_path(
            &model,
            BaseCoord::Z,
            &BasePath::circle(1),
            cplx(0.0, 0.0),
            &NumericConfig::default(),
        )
        .unwrap();
        assert_eq!(lift.endpoint.norm(), 0.0);
    }

    #[test]
    fn lift_through_singularity_fails() {
        let model = model_i();
        // straight base segment through z = 0
        let path = BasePath::polyline(vec![(0.0, cplx(1.0, 0.0)), (1.0, cplx(-1.0, 0.0))]).unwrap();
        let err = lift_path(
            &model,
            BaseCoord::Z,
            &path,
            cplx(0.1, 0.0),
            &NumericConfig::default(),
        );
        assert!(matches!(err, Err(Error::SingularEncounter { .. })));
    }

    #[test]
    fn lift_double_circle_squares_the_multiplier() {
        let model = model_i();
        let cfg = NumericConfig::default();
        let nu = model.nu();
        let start = cplx(0.2, -0.05);
        let lift = lift_path(&model, BaseCoord::Z, &BasePath::circle(2), start, &cfg).unwrap();
        assert!((lift.endpoint - nu * nu * start).norm() < 1e-10);
        let rev = lift_path(&model, BaseCoord::Z, &BasePath::circle(-1), start, &cfg).unwrap();
        assert!((rev.endpoint - start / nu).norm() < 1e-6);
    }

    #[test]
    fn lift_round_trip_returns_start() {
        let model = model_i();
        let cfg = NumericConfig::default();
        let start = cplx(0.2, 0.1);
        let fwd = lift_path(&model, BaseCoord::Z, &BasePath::circle(1), start, &cfg).unwrap();
        let back = lift_path(
            &model,
            BaseCoord::Z,
            &BasePath::circle(1).reversed(),
            fwd.endpoint,
            &cfg,
        )
        .unwrap();
        assert!(
            (back.endpoint - start).norm()
                < 10.0 * (cfg.ode_rel_tol * start.norm() + cfg.ode_abs_tol)
        );
    }

    #[test]
    fn polynomial_field_matches_linear_model() {
        // dz = z, dw = lambda w as a polynomial field; both routes must agree
        let lambda = cplx::<f64>(0.3, 0.8);
        let field = PolynomialVectorField::<f64>::from_coeffs(
            &[(1, 0, 1.0, 0.0)],
            &[(0, 1, lambda.re, lambda.im)],
        )
        .unwrap();
        let cfg = NumericConfig::default();
        let lift = lift_path(
            &field,
            BaseCoord::Z,
            &BasePath::circle(1),
            cplx(0.25, 0.0),
            &cfg,
        )
        .unwrap();
        let nu = nu_from_lambda(lambda);
        assert!((lift.endpoint - nu * cplx::<f64>(0.25, 0.0)).norm() < 1e-9);
        assert!((lift.derivative - nu).norm() < 1e-9);
    }

    #[test]
    fn germ_composition_rules() {
        let nu = cplx::<f64>(0.3, 0.4);
        let lin = GermMap::exact_linear(nu);
        let double = compose(&lin, &lin).unwrap();
        match double {
            GermMap::ExactLinear { nu: n2, .. } => assert!((n2 - nu * nu).norm() < 1e-15),
            other => panic!("expected exact-linear, got {other:?}"),
        }

        let aff = GermMap::affine(cplx(0.5, 0.0), cplx(0.2, 0.0));
        let scaled = compose(&lin, &aff).unwrap();
        match scaled {
            GermMap::Affine { a, b, .. } => {
                assert!((a - nu * cplx(0.5, 0.0)).norm() < 1e-15);
                assert!((b - nu * cplx(0.2, 0.0)).norm() < 1e-15);
            }
            other => panic!("expected affine, got {other:?}"),
        }

        let id = GermMap::identity();
        let same = compose(&aff, &id).unwrap();
        assert_eq!(same, aff);
    }

    #[test]
    fn composite_with_lifted_germ_evaluates_by_chain_rule() {
        let model = model_i();
        let nu = model.nu();
        let section = CrossSection::standard(0.5).unwrap();
        let germ = holonomy_germ(
            Foliation::LinearModel(model),
            BaseCoord::Z,
            BasePath::circle(1),
            section,
            NumericConfig::default(),
        )
        .unwrap();
        let boosted = compose(&GermMap::exact_linear(cplx(2.0, 0.0)), &germ).unwrap();
        let (v, d) = boosted.eval_with_deriv(cplx(0.2, 0.0)).unwrap();
        assert!((v - cplx::<f64>(2.0, 0.0) * nu * cplx(0.2, 0.0)).norm() < 1e-9);
        assert!((d - cplx::<f64>(2.0, 0.0) * nu).norm() < 1e-9);
    }

    #[test]
    fn moebius_composition_agrees_pointwise() {
        let g = GermMap::moebius(
            cplx::<f64>(0.1, 0.2),
            cplx(0.7, -0.1),
            cplx(1.0, 0.0),
            cplx(0.3, 0.1),
        )
        .unwrap();
        let f = GermMap::moebius(
            cplx::<f64>(-0.2, 0.05),
            cplx(0.5, 0.3),
            cplx(1.0, 0.0),
            cplx(-0.2, 0.4),
        )
        .unwrap();
        let gf = compose(&g, &f).unwrap();
        assert!(matches!(gf, GermMap::Moebius { .. }));
        for w in [cplx(0.0, 0.0), cplx(0.2, -0.1), cplx(-0.15, 0.25)] {
            let direct = g.eval(f.eval(w).unwrap()).unwrap();
            let (composed, deriv) = gf.eval_with_deriv(w).unwrap();
            assert!((direct - composed).norm() < 1e-14);
            let (_, dg) = g.eval_with_deriv(f.eval(w).unwrap()).unwrap();
            let (_, df) = f.eval_with_deriv(w).unwrap();
            assert!((deriv - dg * df).norm() < 1e-14);
        }
    }

    #[test]
    fn domain_violation_reported() {
        let small = GermMap::affine(cplx::<f64>(5.0, 0.0), cplx(1.0, 0.0));
        let tight = GermMap::affine(cplx::<f64>(0.0, 0.0), cplx(1.0, 0.0)).with_domain_radius(1.0);
        assert!(matches!(
            compose(&tight, &small),
            Err(Error::DomainError { .. })
        ));
    }
}
