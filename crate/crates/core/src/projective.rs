//! Extension of a polynomial field to the projective plane: singular points
//! on the line at infinity with their characteristic numbers, tangency counts
//! with affine lines, and the broken-connection checker.

use crate::error::{Error, Result};
use crate::model::{NumericConfig, PolynomialVectorField};
use crate::numeric::{cluster_roots, poly_roots};
use crate::scalar::{Real, C};
use crate::transport::GermMap;
use num_complex::Complex;

// ---------------------------------------------------------------------------
// singularities at infinity
// ---------------------------------------------------------------------------

/// A singular point of the extended foliation on the line at infinity.
///
/// The characteristic number is the transversal eigenvalue over the
/// eigenvalue along the infinity line (the latter in the denominator); it is
/// reported only when that denominator eigenvalue is nonzero.
#[derive(Debug, Clone)]
pub struct InfinitySingularity<T: Real> {
    /// Projective direction `[d0 : d1]`, normalized to unit magnitude with
    /// the larger component rotated positive real.
    pub direction: [C<T>; 2],
    /// Jacobian of the induced field in the infinity chart covering the point.
    pub jacobian: [[C<T>; 2]; 2],
    /// Eigenvalue along the infinity line.
    pub line_eigenvalue: C<T>,
    /// Eigenvalue transversal to the infinity line.
    pub transversal_eigenvalue: C<T>,
    /// Transversal over line eigenvalue.
    pub lambda_j: Option<C<T>>,
    pub multiplicity: u32,
    pub hyperbolic: bool,
}

/// Direction polynomial `h(u) = Q_top(1, u) - u P_top(1, u)` whose projective
/// roots are the singular directions on the infinity line; a degree-n field
/// carries n + 1 of them with multiplicity. Vanishing identically means the
/// infinity line is not invariant (dicritical case).
fn direction_polynomial<T: Real>(field: &PolynomialVectorField<T>) -> Vec<C<T>> {
    let p_top = field.top_coeffs(false);
    let q_top = field.top_coeffs(true);
    let deg = field.degree() as usize;
    // h has degree at most deg + 1 in u
    let mut h = vec![Complex::new(T::zero(), T::zero()); deg + 2];
    for (j, c) in q_top.iter().enumerate() {
        h[j] = h[j] + *c;
    }
    for (j, c) in p_top.iter().enumerate() {
        h[j + 1] = h[j + 1] - *c;
    }
    h
}

fn trim_trailing<T: Real>(mut coeffs: Vec<C<T>>, tol: T) -> Vec<C<T>> {
    while coeffs.len() > 1 && coeffs.last().map(|c| c.norm() <= tol).unwrap_or(false) {
        coeffs.pop();
    }
    coeffs
}

/// Chart field at infinity in coordinates `(u, v) = (w/z, 1/z)` (after the
/// common time rescale): `(du, dv) = (Q~ - u P~, -v P~)` where
/// `P~(u, v) = v^deg P(1/v, u/v)`. The swapped chart exchanges the roles of
/// the two components.
fn chart_field<T: Real>(
    field: &PolynomialVectorField<T>,
    u: C<T>,
    v: C<T>,
    swapped: bool,
) -> (C<T>, C<T>) {
    let (first, second) = if swapped {
        (
            field.homogenized_at(u, v, false, true),
            field.homogenized_at(u, v, true, true),
        )
    } else {
        (
            field.homogenized_at(u, v, true, false),
            field.homogenized_at(u, v, false, false),
        )
    };
    // first = the component transversal-driving the u equation, second = the
    // one multiplying v
    (first - u * second, -v * second)
}

/// Jacobian of the chart field at `(u, 0)`: lower-triangular there, with the
/// diagonal carrying the infinity-line and transversal eigenvalues.
fn infinity_chart_jacobian<T: Real>(
    field: &PolynomialVectorField<T>,
    u: C<T>,
    swapped: bool,
) -> [[C<T>; 2]; 2] {
    let h = T::of(1e-6) * (T::one() + u.norm());
    let hc = Complex::new(h, T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    let du_at = |x: C<T>, y: C<T>| chart_field(field, x, y, swapped).0;
    let dh_du = (du_at(u + hc, zero) - du_at(u - hc, zero)) / (hc + hc);
    let dh_dv = (du_at(u, hc) - du_at(u, -hc)) / (hc + hc);
    let second_at_u = field.homogenized_at(u, zero, swapped, swapped);
    [[dh_du, dh_dv], [zero, -second_at_u]]
}

/// Characteristic number of the singular direction `[d0 : d1]` computed in
/// the requested chart (standard needs `d0 != 0`, swapped `d1 != 0`); the
/// ratio is chart-independent wherever both apply.
pub fn characteristic_number<T: Real>(
    field: &PolynomialVectorField<T>,
    direction: [C<T>; 2],
    swapped: bool,
) -> Option<C<T>> {
    let (num, den) = if swapped {
        (direction[0], direction[1])
    } else {
        (direction[1], direction[0])
    };
    if den.norm() <= T::min_positive_value() {
        return None;
    }
    let u = num / den;
    let jac = infinity_chart_jacobian(field, u, swapped);
    let line_eig = jac[0][0];
    let trans_eig = jac[1][1];
    if line_eig.norm() <= T::of(1e-10) * trans_eig.norm().max(T::one()) {
        return None;
    }
    Some(trans_eig / line_eig)
}

/// Locates the singular points of the extended foliation on the line at
/// infinity, with chart Jacobians, characteristic numbers, multiplicities,
/// and hyperbolicity flags. Errors with `NotInvariantLine` in the dicritical
/// case.
pub fn infinity_singularities<T: Real>(
    field: &PolynomialVectorField<T>,
) -> Result<Vec<InfinitySingularity<T>>> {
    let h = direction_polynomial(field);
    let coeff_scale = h.iter().map(|c| c.norm()).fold(T::zero(), |a, b| a.max(b));
    let zero_tol = T::of(1e-12) * coeff_scale.max(field.coeff_scale());
    let h = trim_trailing(h, zero_tol);
    if h.len() == 1 && h[0].norm() <= zero_tol {
        return Err(Error::NotInvariantLine);
    }

    let total = field.degree() + 1;
    let finite_deg = h.len() as u32 - 1;
    let roots = poly_roots(&h);
    let cluster_tol = T::of(1e-6)
        * (T::one()
            + roots
                .iter()
                .map(|r| r.norm())
                .fold(T::zero(), |a, b| a.max(b)));
    let clustered = cluster_roots(&roots, cluster_tol);

    let mut out = Vec::new();
    for (u, multiplicity) in clustered {
        let jac = infinity_chart_jacobian(field, u, false);
        let line_eig = jac[0][0];
        let trans_eig = jac[1][1];
        let lambda_j = if line_eig.norm() > zero_tol.max(T::of(1e-10) * trans_eig.norm()) {
            Some(trans_eig / line_eig)
        } else {
            None
        };
        let hyperbolic = match lambda_j {
            Some(l) => {
                trans_eig.norm() > T::min_positive_value() && l.im.abs() > T::of(1e-9) * l.norm()
            }
            None => false,
        };
        out.push(InfinitySingularity {
            direction: normalize_direction(Complex::new(T::one(), T::zero()), u),
            jacobian: jac,
            line_eigenvalue: line_eig,
            transversal_eigenvalue: trans_eig,
            lambda_j,
            multiplicity,
            hyperbolic,
        });
    }

    // multiplicity at the direction [0 : 1] equals the degree drop of h
    if finite_deg < total {
        let u0 = Complex::new(T::zero(), T::zero());
        let jac = infinity_chart_jacobian(field, u0, true);
        let line_eig = jac[0][0];
        let trans_eig = jac[1][1];
        let lambda_j = if line_eig.norm() > zero_tol.max(T::of(1e-10) * trans_eig.norm()) {
            Some(trans_eig / line_eig)
        } else {
            None
        };
        let hyperbolic = match lambda_j {
            Some(l) => {
                trans_eig.norm() > T::min_positive_value() && l.im.abs() > T::of(1e-9) * l.norm()
            }
            None => false,
        };
        out.push(InfinitySingularity {
            direction: normalize_direction(
                Complex::new(T::zero(), T::zero()),
                Complex::new(T::one(), T::zero()),
            ),
            jacobian: jac,
            line_eigenvalue: line_eig,
            transversal_eigenvalue: trans_eig,
            lambda_j,
            multiplicity: total - finite_deg,
            hyperbolic,
        });
    }

    out.sort_by(|a, b| {
        let ka = (
            a.direction[0].re,
            a.direction[0].im,
            a.direction[1].re,
            a.direction[1].im,
        );
        let kb = (
            b.direction[0].re,
            b.direction[0].im,
            b.direction[1].re,
            b.direction[1].im,
        );
        kb.partial_cmp(&ka).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

fn normalize_direction<T: Real>(d0: C<T>, d1: C<T>) -> [C<T>; 2] {
    let norm = (d0.norm_sqr() + d1.norm_sqr()).sqrt();
    let mut a = d0 / norm;
    let mut b = d1 / norm;
    // rotate so the dominant component is positive real
    let pivot = if a.norm() >= b.norm() { a } else { b };
    let phase = pivot / Complex::new(pivot.norm(), T::zero());
    a = a / phase;
    b = b / phase;
    [a, b]
}

// ---------------------------------------------------------------------------
// tangencies with lines
// ---------------------------------------------------------------------------

/// Affine line `w = a z + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineLine<T: Real> {
    pub slope: C<T>,
    pub offset: C<T>,
}

/// Tangency data of a field with an affine line.
#[derive(Debug, Clone)]
pub struct TangencyCount<T: Real> {
    /// Number of affine tangencies counted with multiplicity (the degree of
    /// the tangency polynomial along the line).
    pub affine_count: u32,
    /// Tangency points `(z, w)` on the line.
    pub points: Vec<(C<T>, C<T>)>,
    /// Class degree implied by the generic-line count (affine count + 1);
    /// valid for lines without a tangency at infinity.
    pub implied_class_degree: u32,
}

/// Counts tangencies of the foliation with the line `w = a z + b`: roots with
/// multiplicity of `Q(z, az + b) - a P(z, az + b)`. An identically vanishing
/// tangency polynomial means the line is invariant.
pub fn count_tangencies<T: Real>(
    field: &PolynomialVectorField<T>,
    line: &AffineLine<T>,
) -> Result<TangencyCount<T>> {
    let deg = field.degree() as usize;
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); deg + 1];

    // restrict each monomial c z^i (az + b)^j and expand via binomials
    let mut add_component = |terms: &[crate::model::Monomial<T>], sign: C<T>| {
        for m in terms {
            // (az + b)^j expanded
            let mut poly = vec![Complex::new(T::one(), T::zero())];
            for _ in 0..m.w_pow {
                let mut next = vec![Complex::new(T::zero(), T::zero()); poly.len() + 1];
                for (k, c) in poly.iter().enumerate() {
                    next[k] = next[k] + *c * line.offset;
                    next[k + 1] = next[k + 1] + *c * line.slope;
                }
                poly = next;
            }
            for (k, c) in poly.iter().enumerate() {
                let idx = k + m.z_pow as usize;
                coeffs[idx] = coeffs[idx] + sign * m.coeff * *c;
            }
        }
    };
    let one = Complex::new(T::one(), T::zero());
    add_component(field.q_monomials(), one);
    add_component(field.p_monomials(), -line.slope);

    let scale = coeffs
        .iter()
        .map(|c| c.norm())
        .fold(T::zero(), |a, b| a.max(b));
    let tol = T::of(1e-12) * scale.max(field.coeff_scale()).max(T::min_positive_value());
    let coeffs = trim_trailing(coeffs, tol);
    if coeffs.len() == 1 && coeffs[0].norm() <= tol {
        return Err(Error::InvariantLine);
    }

    let affine_count = coeffs.len() as u32 - 1;
    let mut points: Vec<(C<T>, C<T>)> = poly_roots(&coeffs)
        .into_iter()
        .map(|z| (z, line.slope * z + line.offset))
        .collect();
    points.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    Ok(TangencyCount {
        affine_count,
        points,
        implied_class_degree: affine_count + 1,
    })
}

// ---------------------------------------------------------------------------
// broken-connection checker
// ---------------------------------------------------------------------------

/// Verdict of the separatrix-connection test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectionVerdict {
    /// The two contracting holonomies fix distinct points: the connection is
    /// broken and the construction hypotheses hold.
    AssumptionsSatisfied,
    /// The fixed points coincide within tolerance.
    Unbroken,
    /// The separation falls inside the numerical uncertainty band.
    Inconclusive,
}

/// Fixed points of the two holonomies on the shared transversal, their
/// separation, and the displacement of one fixed point under the other map.
#[derive(Debug, Clone)]
pub struct ConnectionCheckResult<T: Real> {
    pub o_p: C<T>,
    pub o_q: C<T>,
    pub separation: T,
    pub displacement: T,
    pub verdict: ConnectionVerdict,
}

/// Computes the fixed points `O_P` and `O_Q` of the two contracting germs on
/// their shared domain and tests whether they are distinct: then the second
/// map displaces the first fixed point off itself, which is the hypothesis
/// the construction needs.
pub fn broken_connection_check<T: Real>(
    germ_alpha: &GermMap<T>,
    germ_beta: &GermMap<T>,
    cfg: &NumericConfig<T>,
) -> Result<ConnectionCheckResult<T>> {
    let radius_candidate = germ_alpha.domain_radius().min(germ_beta.domain_radius());
    let radius = if radius_candidate.is_finite() {
        radius_candidate
    } else {
        T::one()
    };
    let (o_p, res_p, _) = crate::forge::find_fixed_point(germ_alpha, radius, cfg)?;
    let (o_q, res_q, _) = crate::forge::find_fixed_point(germ_beta, radius, cfg)?;

    let separation = (o_p - o_q).norm();
    let displacement = (germ_beta.eval(o_p)? - o_p).norm();

    let floor = (T::of(10.0) * (res_p + res_q)).max(T::of(100.0) * cfg.fixed_point_tol);
    let verdict = if separation <= floor {
        ConnectionVerdict::Unbroken
    } else if separation > T::of(10.0) * floor {
        ConnectionVerdict::AssumptionsSatisfied
    } else {
        ConnectionVerdict::Inconclusive
    };

    Ok(ConnectionCheckResult {
        o_p,
        o_q,
        separation,
        displacement,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn infinity_points_of_diagonal_linear_field() {
        // dz = z, dw = lambda w with lambda = 2: points [1:0] and [0:1]
        let field =
            PolynomialVectorField::<f64>::from_coeffs(&[(1, 0, 1.0, 0.0)], &[(0, 1, 2.0, 0.0)])
                .unwrap();
        let pts = infinity_singularities(&field).unwrap();
        assert_eq!(pts.len(), 2);
        let total: u32 = pts.iter().map(|p| p.multiplicity).sum();
        assert_eq!(total, 2);

        // at [1:0] the chart field is ((lambda - 1) u, -v): lambda_j = -1/(lambda - 1)
        let at_10 = pts
            .iter()
            .find(|p| p.direction[0].norm() > 0.9)
            .expect("direction [1:0] present");
        let lam_j = at_10.lambda_j.unwrap();
        assert!((lam_j - cplx(-1.0, 0.0)).norm() < 1e-8);
        assert!((at_10.line_eigenvalue - cplx(1.0, 0.0)).norm() < 1e-8);
        assert!((at_10.transversal_eigenvalue - cplx(-1.0, 0.0)).norm() < 1e-8);
        assert!(!at_10.hyperbolic);

        // at [0:1]: lambda_j = lambda / (lambda - 1) = 2
        let at_01 = pts
            .iter()
            .find(|p| p.direction[1].norm() > 0.9)
            .expect("direction [0:1] present");
        let lam_j = at_01.lambda_j.unwrap();
        assert!((lam_j - cplx(2.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn dicritical_field_rejected() {
        // dz = z, dw = w: the radial field leaves no invariant infinity line
        let field =
            PolynomialVectorField::<f64>::from_coeffs(&[(1, 0, 1.0, 0.0)], &[(0, 1, 1.0, 0.0)])
                .unwrap();
        assert!(matches!(
            infinity_singularities(&field),
            Err(Error::NotInvariantLine)
        ));
    }

    #[test]
    fn tangency_count_linear_field() {
        // dz = z, dw = 2w against the line w = z + 1: single tangency at (-2, -1)
        let field =
            PolynomialVectorField::<f64>::from_coeffs(&[(1, 0, 1.0, 0.0)], &[(0, 1, 2.0, 0.0)])
                .unwrap();
        let line = AffineLine {
            slope: cplx(1.0, 0.0),
            offset: cplx(1.0, 0.0),
        };
        let t = count_tangencies(&field, &line).unwrap();
        assert_eq!(t.affine_count, 1);
        assert_eq!(t.implied_class_degree, 2);
        assert!((t.points[0].0 - cplx(-2.0, 0.0)).norm() < 1e-10);
        assert!((t.points[0].1 - cplx(-1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn invariant_line_rejected() {
        // dw = w (2 + z): the line w = 0 is invariant
        let field = PolynomialVectorField::<f64>::from_coeffs(
            &[(1, 0, 1.0, 0.0)],
            &[(0, 1, 2.0, 0.0), (1, 1, 1.0, 0.0)],
        )
        .unwrap();
        let line = AffineLine {
            slope: cplx(0.0, 0.0),
            offset: cplx(0.0, 0.0),
        };
        assert!(matches!(
            count_tangencies(&field, &line),
            Err(Error::InvariantLine)
        ));
    }

    #[test]
    fn broken_connection_affine_pair() {
        let cfg = NumericConfig::default();
        let alpha = GermMap::affine(cplx::<f64>(0.0, 0.0), cplx(0.5, 0.0));
        let beta = GermMap::affine(cplx::<f64>(0.1, 0.0), cplx(0.5, 0.0));
        let r = broken_connection_check(&alpha, &beta, &cfg).unwrap();
        assert_eq!(r.verdict, ConnectionVerdict::AssumptionsSatisfied);
        assert!(r.o_p.norm() < 1e-12);
        assert!((r.o_q - cplx(0.2, 0.0)).norm() < 1e-12);
        assert!((r.displacement - 0.1).abs() < 1e-12);
    }

    #[test]
    fn unbroken_connection_detected() {
        let cfg = NumericConfig::default();
        let g = GermMap::affine(cplx::<f64>(0.0, 0.0), cplx(0.5, 0.0));
        let r = broken_connection_check(&g, &g, &cfg).unwrap();
        assert_eq!(r.verdict, ConnectionVerdict::Unbroken);
    }

    #[test]
    fn expanding_germ_rejected() {
        let cfg = NumericConfig::default();
        let contracting = GermMap::affine(cplx::<f64>(0.0, 0.0), cplx(0.5, 0.0));
        let expanding = GermMap::affine(cplx::<f64>(0.0, 0.0), cplx(2.0, 0.0));
        assert!(matches!(
            broken_connection_check(&contracting, &expanding, &cfg),
            Err(Error::ContractionViolated(_))
        ));
    }
}
