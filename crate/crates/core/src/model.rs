//! Foundational data types: polynomial vector fields on C^2, linearization
//! charts at complex hyperbolic points, cross-sections, leafwise paths, and
//! the numeric configuration shared by the whole pipeline.

use crate::error::{Error, Result};
use crate::numeric::{eig2x2, solve2x2, solve2x2_damped};
use crate::scalar::{two_pi_i, Real, C};
use num_complex::Complex;

/// Scale-invariant tolerance for "the eigenvalue ratio is not real".
const RATIO_IM_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// numeric configuration
// ---------------------------------------------------------------------------

/// Tolerances and budgets used throughout the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericConfig<T: Real> {
    pub ode_rel_tol: T,
    pub ode_abs_tol: T,
    pub fixed_point_tol: T,
    pub max_iterations: usize,
    pub boundary_samples: usize,
    pub quadrature_points: usize,
    /// Initial integration step (fraction of path parameter).
    pub initial_step: T,
    /// Hard cap on the integration step.
    pub max_step: T,
}

impl<T: Real> Default for NumericConfig<T> {
    fn default() -> Self {
        NumericConfig {
            ode_rel_tol: T::of(1e-11),
            ode_abs_tol: T::of(1e-13),
            fixed_point_tol: T::of(1e-12),
            max_iterations: 200_000,
            boundary_samples: 256,
            quadrature_points: 512,
            initial_step: T::of(1e-3),
            max_step: T::of(5e-2),
        }
    }
}

impl<T: Real> NumericConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            (self.ode_rel_tol, "ode_rel_tol"),
            (self.ode_abs_tol, "ode_abs_tol"),
            (self.fixed_point_tol, "fixed_point_tol"),
            (self.initial_step, "initial_step"),
            (self.max_step, "max_step"),
        ];
        for (v, name) in pos {
            if !v.is_finite() || v <= T::zero() {
                return Err(Error::invalid(format!("{name} must be strictly positive")));
            }
        }
        for (v, name) in [
            (self.max_iterations, "max_iterations"),
            (self.boundary_samples, "boundary_samples"),
            (self.quadrature_points, "quadrature_points"),
        ] {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// eigenvalue-ratio operations
// ---------------------------------------------------------------------------

/// Flips the ratio to the upper half plane when needed.
///
/// Returns the normalized ratio and whether conjugation was applied; the flag
/// must then be applied to all downstream coordinates consistently.
pub fn normalize_orientation<T: Real>(lambda: C<T>) -> Result<(C<T>, bool)> {
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::invalid("ratio must have finite components"));
    }
    if lambda.im.abs() <= T::of(RATIO_IM_TOL) * lambda.norm() {
        return Err(Error::NotComplexHyperbolic {
            re: lambda.re.as_f64(),
            im: lambda.im.as_f64(),
        });
    }
    if lambda.im > T::zero() {
        Ok((lambda, false))
    } else {
        Ok((lambda.conj(), true))
    }
}

/// Local holonomy multiplier `nu = exp(2 pi i lambda)` of the loop around the
/// singular point inside its separatrix.
pub fn nu_from_lambda<T: Real>(lambda: C<T>) -> C<T> {
    (lambda * two_pi_i::<T>()).exp()
}

/// Tests complex hyperbolicity of a 2x2 Jacobian: both eigenvalues nonzero
/// and their ratio not real. The returned ratio is normalized to the upper
/// half plane; callers needing a specific eigenvalue in the denominator
/// (e.g. at infinity) work from the eigenvalues directly.
pub fn is_complex_hyperbolic<T: Real>(jacobian: &[[C<T>; 2]; 2]) -> Option<C<T>> {
    let (e1, e2) = eig2x2(jacobian);
    let scale = e1.norm().max(e2.norm());
    if scale <= T::min_positive_value() {
        return None;
    }
    let floor = T::of(1e-12) * scale;
    if e1.norm() <= floor || e2.norm() <= floor {
        return None;
    }
    let ratio = e2 / e1;
    if ratio.im.abs() <= T::of(RATIO_IM_TOL) * ratio.norm() {
        return None;
    }
    Some(if ratio.im > T::zero() {
        ratio
    } else {
        ratio.inv()
    })
}

// ---------------------------------------------------------------------------
// polynomial vector fields
// ---------------------------------------------------------------------------

/// One monomial `coeff * z^i w^j` of a field component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial<T: Real> {
    pub z_pow: u32,
    pub w_pow: u32,
    pub coeff: C<T>,
}

impl<T: Real> Monomial<T> {
    pub fn new(z_pow: u32, w_pow: u32, coeff: C<T>) -> Self {
        Monomial {
            z_pow,
            w_pow,
            coeff,
        }
    }

    fn total_degree(&self) -> u32 {
        self.z_pow + self.w_pow
    }
}

/// Polynomial vector field `(dz/dt, dw/dt) = (P(z, w), Q(z, w))` defining a
/// singular foliation of C^2 by its integral curves.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialVectorField<T: Real> {
    p: Vec<Monomial<T>>,
    q: Vec<Monomial<T>>,
    degree: u32,
}

impl<T: Real> PolynomialVectorField<T> {
    /// Builds a field from the monomials of both components. Duplicate
    /// exponent pairs are merged; exact-zero terms dropped.
    pub fn new(p: Vec<Monomial<T>>, q: Vec<Monomial<T>>) -> Result<Self> {
        let p = Self::normalize_component(p)?;
        let q = Self::normalize_component(q)?;
        if p.is_empty() && q.is_empty() {
            return Err(Error::invalid("vector field must have a nonzero monomial"));
        }
        let degree = p
            .iter()
            .chain(q.iter())
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0);
        Ok(PolynomialVectorField { p, q, degree })
    }

    /// Convenience constructor from `(z_pow, w_pow, re, im)` tuples.
    pub fn from_coeffs(p: &[(u32, u32, f64, f64)], q: &[(u32, u32, f64, f64)]) -> Result<Self> {
        let build = |terms: &[(u32, u32, f64, f64)]| {
            terms
                .iter()
                .map(|&(i, j, re, im)| Monomial::new(i, j, Complex::new(T::of(re), T::of(im))))
                .collect()
        };
        Self::new(build(p), build(q))
    }

    fn normalize_component(terms: Vec<Monomial<T>>) -> Result<Vec<Monomial<T>>> {
        let mut out: Vec<Monomial<T>> = Vec::new();
        for m in terms {
            if !m.coeff.re.is_finite() || !m.coeff.im.is_finite() {
                return Err(Error::invalid("monomial coefficient must be finite"));
            }
            match out
                .iter_mut()
                .find(|o| o.z_pow == m.z_pow && o.w_pow == m.w_pow)
            {
                Some(o) => o.coeff = o.coeff + m.coeff,
                None => out.push(m),
            }
        }
        out.retain(|m| m.coeff.norm() > T::zero());
        out.sort_by_key(|m| (m.total_degree(), m.z_pow));
        Ok(out)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn p_monomials(&self) -> &[Monomial<T>] {
        &self.p
    }

    pub fn q_monomials(&self) -> &[Monomial<T>] {
        &self.q
    }

    pub fn eval(&self, z: C<T>, w: C<T>) -> (C<T>, C<T>) {
        (eval_component(&self.p, z, w), eval_component(&self.q, z, w))
    }

    /// All four first partials `(P_z, P_w, Q_z, Q_w)`.
    pub fn partials(&self, z: C<T>, w: C<T>) -> (C<T>, C<T>, C<T>, C<T>) {
        let (pz, pw) = diff_component(&self.p, z, w);
        let (qz, qw) = diff_component(&self.q, z, w);
        (pz, pw, qz, qw)
    }

    pub fn jacobian(&self, z: C<T>, w: C<T>) -> [[C<T>; 2]; 2] {
        let (pz, pw, qz, qw) = self.partials(z, w);
        [[pz, pw], [qz, qw]]
    }

    /// Largest coefficient magnitude, for residual scaling.
    pub fn coeff_scale(&self) -> T {
        self.p
            .iter()
            .chain(self.q.iter())
            .map(|m| m.coeff.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Magnitude bound `sum |c| |z|^i |w|^j` of a component at a point, for
    /// scale-aware residual tests.
    pub fn local_scale(&self, z: C<T>, w: C<T>) -> T {
        let zn = z.norm().max(T::one());
        let wn = w.norm().max(T::one());
        self.p
            .iter()
            .chain(self.q.iter())
            .map(|m| m.coeff.norm() * zn.powi(m.z_pow as i32) * wn.powi(m.w_pow as i32))
            .fold(T::zero(), |a, b| a + b)
    }

    /// Homogenized component `v^deg * comp(1/v, u/v)` (or with the roles of
    /// the variables swapped), evaluated without forming `1/v`:
    /// each monomial contributes `c u^a v^{deg - i - j}`.
    pub(crate) fn homogenized_at(
        &self,
        u: C<T>,
        v: C<T>,
        component_q: bool,
        swapped: bool,
    ) -> C<T> {
        let terms = if component_q { &self.q } else { &self.p };
        let mut acc = Complex::new(T::zero(), T::zero());
        for m in terms {
            let u_pow = if swapped { m.z_pow } else { m.w_pow };
            let v_pow = self.degree - m.total_degree();
            acc = acc + m.coeff * u.powi(u_pow as i32) * v.powi(v_pow as i32);
        }
        acc
    }

    /// Coefficients (ascending in `u`) of the top-degree part at `(1, u)`.
    pub(crate) fn top_coeffs(&self, component_q: bool) -> Vec<C<T>> {
        let terms = if component_q { &self.q } else { &self.p };
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); self.degree as usize + 1];
        for m in terms {
            if m.total_degree() == self.degree {
                coeffs[m.w_pow as usize] = coeffs[m.w_pow as usize] + m.coeff;
            }
        }
        coeffs
    }
}

fn eval_component<T: Real>(terms: &[Monomial<T>], z: C<T>, w: C<T>) -> C<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for m in terms {
        acc = acc + m.coeff * z.powi(m.z_pow as i32) * w.powi(m.w_pow as i32);
    }
    acc
}

fn diff_component<T: Real>(terms: &[Monomial<T>], z: C<T>, w: C<T>) -> (C<T>, C<T>) {
    let mut dz = Complex::new(T::zero(), T::zero());
    let mut dw = Complex::new(T::zero(), T::zero());
    for m in terms {
        if m.z_pow > 0 {
            let k = Complex::new(T::from_u32(m.z_pow).unwrap(), T::zero());
            dz = dz + m.coeff * k * z.powi(m.z_pow as i32 - 1) * w.powi(m.w_pow as i32);
        }
        if m.w_pow > 0 {
            let k = Complex::new(T::from_u32(m.w_pow).unwrap(), T::zero());
            dw = dw + m.coeff * k * z.powi(m.z_pow as i32) * w.powi(m.w_pow as i32 - 1);
        }
    }
    (dz, dw)
}

// ---------------------------------------------------------------------------
// singular points
// ---------------------------------------------------------------------------

/// Region and grid resolution for the singular-point search.
#[derive(Debug, Clone, Copy)]
pub struct SearchBox<T: Real> {
    /// Half-width of the box in each of the four real coordinates.
    pub half_width: T,
    /// Newton starts per real axis (grid of `starts^4` points).
    pub starts_per_axis: usize,
}

impl<T: Real> SearchBox<T> {
    pub fn centered(half_width: T) -> Self {
        SearchBox {
            half_width,
            starts_per_axis: 4,
        }
    }
}

impl<T: Real> Default for SearchBox<T> {
    fn default() -> Self {
        SearchBox::centered(T::of(5.0))
    }
}

/// A located common zero of both field components.
#[derive(Debug, Clone)]
pub struct SingularPoint<T: Real> {
    pub point: (C<T>, C<T>),
    pub jacobian: [[C<T>; 2]; 2],
    pub eigenvalues: (C<T>, C<T>),
    /// Normalized eigenvalue ratio when the point is complex hyperbolic.
    pub lambda: Option<C<T>>,
    pub complex_hyperbolic: bool,
    pub residual: T,
}

/// Finds all isolated common zeros of the field components inside the box by
/// damped Newton iteration from a coarse grid of starts, deduplicated.
///
/// A non-isolated zero locus (common polynomial factor) is reported as
/// `DegenerateField`.
pub fn singular_points<T: Real>(
    field: &PolynomialVectorField<T>,
    search: &SearchBox<T>,
) -> Result<Vec<SingularPoint<T>>> {
    let grid = search.starts_per_axis.max(2);
    let hw = search.half_width;
    let mut found: Vec<(C<T>, C<T>)> = Vec::new();

    let coords: Vec<T> = (0..grid)
        .map(|k| {
            let frac = T::from_usize(k).unwrap() / T::from_usize(grid - 1).unwrap();
            -hw + (hw + hw) * frac
        })
        .collect();

    for &zr in &coords {
        for &zi in &coords {
            for &wr in &coords {
                for &wi in &coords {
                    let start = (Complex::new(zr, zi), Complex::new(wr, wi));
                    if let Some(root) = newton_zero(field, start, hw) {
                        let sep = T::of(1e-8) * (T::one() + hw);
                        let dup = found
                            .iter()
                            .any(|(z, w)| (*z - root.0).norm() < sep && (*w - root.1).norm() < sep);
                        if !dup {
                            found.push(root);
                        }
                    }
                }
            }
        }
    }

    // A curve of zeros shows up as far more deduplicated roots than Bezout
    // allows for the component degrees.
    let deg_p = field
        .p
        .iter()
        .map(Monomial::total_degree)
        .max()
        .unwrap_or(0);
    let deg_q = field
        .q
        .iter()
        .map(Monomial::total_degree)
        .max()
        .unwrap_or(0);
    let bezout = (deg_p.max(1) * deg_q.max(1)) as usize;
    if found.len() > bezout {
        let (z, w) = found[0];
        return Err(Error::DegenerateField(z.norm().as_f64(), w.norm().as_f64()));
    }

    let mut out = Vec::with_capacity(found.len());
    for (z, w) in found {
        let jac = field.jacobian(z, w);
        // Singular Jacobian: probe along the kernel direction; persistent
        // vanishing of the field means the zero is not isolated.
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let jac_scale = jac
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(T::zero(), |a, b| a.max(b));
        if det.norm() <= T::of(1e-10) * jac_scale * jac_scale + T::min_positive_value() {
            let null = null_direction(&jac);
            let rho = T::of(1e-3) * (T::one() + z.norm().max(w.norm()));
            let probe = (z + null.0 * rho, w + null.1 * rho);
            let (pp, qp) = field.eval(probe.0, probe.1);
            let scale = field.local_scale(probe.0, probe.1);
            if pp.norm() + qp.norm() <= T::of(1e-8) * scale {
                return Err(Error::DegenerateField(z.norm().as_f64(), w.norm().as_f64()));
            }
        }

        let (pv, qv) = field.eval(z, w);
        let residual = pv.norm() + qv.norm();
        let lambda = is_complex_hyperbolic(&jac);
        out.push(SingularPoint {
            point: (z, w),
            jacobian: jac,
            eigenvalues: eig2x2(&jac),
            complex_hyperbolic: lambda.is_some(),
            lambda,
            residual,
        });
    }

    out.sort_by(|a, b| {
        let ka = (a.point.0.re, a.point.0.im, a.point.1.re, a.point.1.im);
        let kb = (b.point.0.re, b.point.0.im, b.point.1.re, b.point.1.im);
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

fn newton_zero<T: Real>(
    field: &PolynomialVectorField<T>,
    start: (C<T>, C<T>),
    box_half_width: T,
) -> Option<(C<T>, C<T>)> {
    let (mut z, mut w) = start;
    let escape = box_half_width * T::of(4.0) + T::one();
    let mut residual_scale = field.local_scale(z, w);

    for _ in 0..80 {
        let (p, q) = field.eval(z, w);
        residual_scale = field.local_scale(z, w);
        let res = p.norm() + q.norm();
        if res <= T::of(1e-13) * residual_scale {
            break;
        }
        let jac = field.jacobian(z, w);
        let rhs = [-p, -q];
        let step = match solve2x2(&jac, &rhs) {
            Some(s) => s,
            None => solve2x2_damped(&jac, &rhs, T::of(1e-10) * residual_scale),
        };
        // damped update: halve until the residual does not grow
        let mut factor = T::one();
        let mut accepted = false;
        for _ in 0..30 {
            let zn = z + step[0] * factor;
            let wn = w + step[1] * factor;
            let (pn, qn) = field.eval(zn, wn);
            if pn.norm() + qn.norm() < res {
                z = zn;
                w = wn;
                accepted = true;
                break;
            }
            factor = factor * T::of(0.5);
        }
        if !accepted {
            return None;
        }
        if z.norm() > escape || w.norm() > escape {
            return None;
        }
    }

    let (p, q) = field.eval(z, w);
    let ok = p.norm() + q.norm() <= T::of(1e-12) * residual_scale.max(T::min_positive_value());
    let inside = z.re.abs() <= box_half_width
        && z.im.abs() <= box_half_width
        && w.re.abs() <= box_half_width
        && w.im.abs() <= box_half_width;
    (ok && inside).then_some((z, w))
}

fn null_direction<T: Real>(jac: &[[C<T>; 2]; 2]) -> (C<T>, C<T>) {
    // kernel of a (near-)singular 2x2 matrix from its largest row
    let row = if jac[0][0].norm() + jac[0][1].norm() >= jac[1][0].norm() + jac[1][1].norm() {
        jac[0]
    } else {
        jac[1]
    };
    let (a, b) = (row[0], row[1]);
    if a.norm().max(b.norm()) <= T::min_positive_value() {
        return (
            Complex::new(T::one(), T::zero()),
            Complex::new(T::zero(), T::zero()),
        );
    }
    let v = (-b, a);
    let n = (v.0.norm_sqr() + v.1.norm_sqr()).sqrt();
    (v.0 / n, v.1 / n)
}

// ---------------------------------------------------------------------------
// linearization chart
// ---------------------------------------------------------------------------

/// Linearization chart at a complex hyperbolic point: the foliation is
/// `z dw = lambda w dz` on the bidisc, with `Im lambda > 0` after orientation
/// normalization, so the loop multiplier satisfies `|nu| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalLinearModel<T: Real> {
    lambda: C<T>,
    nu: C<T>,
    z_radius: T,
    w_radius: T,
}

impl<T: Real> LocalLinearModel<T> {
    /// Builds the model from an eigenvalue ratio, applying orientation
    /// normalization. The returned flag records whether conjugation was
    /// applied (it must then be applied to all coordinates downstream).
    pub fn from_ratio(lambda: C<T>) -> Result<(Self, bool)> {
        let (lam, conjugated) = normalize_orientation(lambda)?;
        Ok((
            LocalLinearModel {
                lambda: lam,
                nu: nu_from_lambda(lam),
                z_radius: T::one(),
                w_radius: T::one(),
            },
            conjugated,
        ))
    }

    /// As `from_ratio` but requires the ratio already oriented (`Im > 0`).
    pub fn new_normalized(lambda: C<T>) -> Result<Self> {
        let (model, conjugated) = Self::from_ratio(lambda)?;
        if conjugated {
            return Err(Error::invalid("ratio must satisfy Im(lambda) > 0"));
        }
        Ok(model)
    }

    /// Records user-facing bidisc radii (internally everything is rescaled
    /// to the unit bidisc).
    pub fn with_radii(mut self, z_radius: T, w_radius: T) -> Result<Self> {
        if z_radius <= T::zero() || w_radius <= T::zero() {
            return Err(Error::invalid("bidisc radii must be positive"));
        }
        self.z_radius = z_radius;
        self.w_radius = w_radius;
        Ok(self)
    }

    pub fn lambda(&self) -> C<T> {
        self.lambda
    }

    pub fn nu(&self) -> C<T> {
        self.nu
    }

    pub fn z_radius(&self) -> T {
        self.z_radius
    }

    pub fn w_radius(&self) -> T {
        self.w_radius
    }

    /// Checks the defining relations to the given tolerance.
    pub fn validate(&self, tol: T) -> Result<()> {
        if self.lambda.im <= T::zero() {
            return Err(Error::invalid("model requires Im(lambda) > 0"));
        }
        if (self.nu - nu_from_lambda(self.lambda)).norm() > tol {
            return Err(Error::invalid("nu does not match exp(2 pi i lambda)"));
        }
        if self.nu.norm() >= T::one() {
            return Err(Error::invalid("|nu| must be < 1"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// cross-sections
// ---------------------------------------------------------------------------

/// Transversal disc `D` inside the section `T = {z = anchor_z}`, centred at
/// the anchor on the separatrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossSection<T: Real> {
    pub anchor_z: C<T>,
    pub anchor_w: C<T>,
    pub disc_radius: T,
}

impl<T: Real> CrossSection<T> {
    /// Canonical section `{z = 1}` anchored at the separatrix point `(1, 0)`.
    pub fn standard(disc_radius: T) -> Result<Self> {
        if disc_radius <= T::zero() {
            return Err(Error::invalid("disc radius must be positive"));
        }
        Ok(CrossSection {
            anchor_z: Complex::new(T::one(), T::zero()),
            anchor_w: Complex::new(T::zero(), T::zero()),
            disc_radius,
        })
    }

    pub fn validate_for(&self, model: &LocalLinearModel<T>) -> Result<()> {
        if self.disc_radius > model.w_radius() {
            return Err(Error::invalid(
                "section disc radius exceeds the bidisc w-radius",
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// leafwise paths
// ---------------------------------------------------------------------------

/// One recorded point of a leafwise path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample<T: Real> {
    pub t: T,
    pub z: C<T>,
    pub w: C<T>,
    /// Whether the sample lies outside the closed unit bidisc of the chart.
    pub exterior: bool,
}

/// Sampled path inside a leaf, parametrized over `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafwisePath<T: Real> {
    samples: Vec<PathSample<T>>,
}

impl<T: Real> LeafwisePath<T> {
    /// Builds a path from `(t, z, w)` triples; parameters must be strictly
    /// increasing and are rescaled affinely onto `[0, 1]`.
    pub fn from_points(points: Vec<(T, C<T>, C<T>)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("path needs at least two samples"));
        }
        for pair in points.windows(2) {
            if pair[1].0.partial_cmp(&pair[0].0) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::invalid(
                    "path parameters must be strictly increasing",
                ));
            }
        }
        let t0 = points[0].0;
        let span = points[points.len() - 1].0 - t0;
        let samples = points
            .into_iter()
            .map(|(t, z, w)| {
                let tn = (t - t0) / span;
                PathSample {
                    t: tn,
                    z,
                    w,
                    exterior: is_exterior_unit(z, w),
                }
            })
            .collect();
        Ok(LeafwisePath { samples })
    }

    pub(crate) fn from_samples_unchecked(samples: Vec<PathSample<T>>) -> Self {
        LeafwisePath { samples }
    }

    pub fn samples(&self) -> &[PathSample<T>] {
        &self.samples
    }

    pub fn start(&self) -> &PathSample<T> {
        &self.samples[0]
    }

    pub fn endpoint(&self) -> &PathSample<T> {
        &self.samples[self.samples.len() - 1]
    }

    /// All samples strictly between the endpoints.
    pub fn interior(&self) -> &[PathSample<T>] {
        &self.samples[1..self.samples.len() - 1]
    }
}

/// Strictly outside the closed unit bidisc (with a tiny guard so boundary
/// points are not misflagged by roundoff).
pub(crate) fn is_exterior_unit<T: Real>(z: C<T>, w: C<T>) -> bool {
    let guard = T::one() + T::epsilon() * T::of(16.0);
    z.norm() > guard || w.norm() > guard
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn orientation_normalization_cases() {
        let (lam, flip) = normalize_orientation(cplx::<f64>(1.0, 2.0)).unwrap();
        assert_eq!(lam, cplx(1.0, 2.0));
        assert!(!flip);

        let (lam, flip) = normalize_orientation(cplx::<f64>(1.0, -2.0)).unwrap();
        assert_eq!(lam, cplx(1.0, 2.0));
        assert!(flip);

        assert!(matches!(
            normalize_orientation(cplx::<f64>(3.0, 0.0)),
            Err(Error::NotComplexHyperbolic { .. })
        ));
    }

    #[test]
    fn orientation_normalization_is_a_projection() {
        let (once, _) = normalize_orientation(cplx::<f64>(-0.3, -1.7)).unwrap();
        let (twice, flip2) = normalize_orientation(once).unwrap();
        assert_eq!(once, twice);
        assert!(!flip2);
    }

    #[test]
    fn nu_values() {
        assert!((nu_from_lambda(cplx::<f64>(1.0, 0.0)) - cplx(1.0, 0.0)).norm() < 1e-12);
        assert!((nu_from_lambda(cplx::<f64>(0.5, 0.0)) - cplx(-1.0, 0.0)).norm() < 1e-12);
        let nu_i = nu_from_lambda(cplx::<f64>(0.0, 1.0));
        assert!((nu_i.re - (-2.0 * std::f64::consts::PI).exp()).abs() < 1e-15);
        assert!(nu_i.im.abs() < 1e-18);
    }

    #[test]
    fn hyperbolicity_on_diagonal_matrices() {
        let diag = |a: num_complex::Complex<f64>, b| [[a, cplx(0.0, 0.0)], [cplx(0.0, 0.0), b]];
        let lam = is_complex_hyperbolic(&diag(cplx(1.0, 0.0), cplx(0.0, 1.0))).unwrap();
        assert!((lam - cplx(0.0, 1.0)).norm() < 1e-12);
        assert!(is_complex_hyperbolic(&diag(cplx(1.0, 0.0), cplx(2.0, 0.0))).is_none());
        let nilp = [
            [cplx::<f64>(0.0, 0.0), cplx(1.0, 0.0)],
            [cplx(0.0, 0.0), cplx(0.0, 0.0)],
        ];
        assert!(is_complex_hyperbolic(&nilp).is_none());
    }

    #[test]
    fn singular_points_linear_field() {
        // dz/dt = z, dw/dt = 2w
        let f = PolynomialVectorField::<f64>::from_coeffs(&[(1, 0, 1.0, 0.0)], &[(0, 1, 2.0, 0.0)])
            .unwrap();
        let pts = singular_points(&f, &SearchBox::centered(2.0)).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].point.0.norm() < 1e-10 && pts[0].point.1.norm() < 1e-10);
        assert!((pts[0].jacobian[0][0] - cplx(1.0, 0.0)).norm() < 1e-10);
        assert!((pts[0].jacobian[1][1] - cplx(2.0, 0.0)).norm() < 1e-10);
        assert!(!pts[0].complex_hyperbolic);
        assert!(pts[0].residual < 1e-10);
    }

    #[test]
    fn singular_points_two_roots() {
        // dz/dt = z^2 - 1, dw/dt = w
        let f = PolynomialVectorField::<f64>::from_coeffs(
            &[(2, 0, 1.0, 0.0), (0, 0, -1.0, 0.0)],
            &[(0, 1, 1.0, 0.0)],
        )
        .unwrap();
        let pts = singular_points(&f, &SearchBox::centered(2.0)).unwrap();
        assert_eq!(pts.len(), 2);
        let mut re: Vec<f64> = pts.iter().map(|p| p.point.0.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + 1.0).abs() < 1e-10 && (re[1] - 1.0).abs() < 1e-10);
        for p in &pts {
            assert!(p.residual < 1e-10);
        }
    }

    #[test]
    fn singular_points_common_factor_is_degenerate() {
        // dz/dt = z, dw/dt = z: the zero locus is the line z = 0
        let f = PolynomialVectorField::<f64>::from_coeffs(&[(1, 0, 1.0, 0.0)], &[(1, 0, 1.0, 0.0)])
            .unwrap();
        assert!(matches!(
            singular_points(&f, &SearchBox::centered(2.0)),
            Err(Error::DegenerateField(..))
        ));
    }

    #[test]
    fn model_from_ratio_flips_orientation() {
        let (m, flipped) = LocalLinearModel::from_ratio(cplx::<f64>(0.5, -1.0)).unwrap();
        assert!(flipped);
        assert!(m.lambda().im > 0.0);
        assert!(m.nu().norm() < 1.0);
        m.validate(1e-12).unwrap();
    }

    #[test]
    fn leafwise_path_reparametrizes() {
        let path = LeafwisePath::from_points(vec![
            (2.0, cplx::<f64>(1.0, 0.0), cplx(0.0, 0.0)),
            (3.0, cplx(1.5, 0.0), cplx(0.0, 0.0)),
            (6.0, cplx(1.0, 0.0), cplx(0.5, 0.0)),
        ])
        .unwrap();
        assert_eq!(path.start().t, 0.0);
        assert_eq!(path.endpoint().t, 1.0);
        assert!(path.interior()[0].exterior);
        assert!(!path.endpoint().exterior);
    }
}
