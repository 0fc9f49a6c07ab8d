//! The construction pipeline: return maps `nu^n . M` on the section disc,
//! their fixed points by contraction, multipliers, closed representatives
//! (entry-path lift plus spiral), subsequence selection, and the pairwise
//! disjointness certificate.

use crate::chart::{
    certify_section_bound, certify_univalence, spirals_intersect, SpiralCurve, SpiralRelation,
};
use crate::error::{Error, Result};
use crate::model::{LocalLinearModel, NumericConfig};
use crate::numeric::cpowi;
use crate::scalar::{Real, C};
use crate::transport::{compose, lift_path, linear_power, BaseCoord, BasePath, Foliation, GermMap};
use num_complex::Complex;

/// Closed or open sampled curve in chart coordinates.
pub type SampledCurve<T> = Vec<(C<T>, C<T>)>;

/// Sup-norm contraction target for the return maps.
const CONTRACTION_TARGET: f64 = 0.5;
/// Required relative margin for mapping the disc strictly into itself.
const INTO_MARGIN: f64 = 0.05;

// ---------------------------------------------------------------------------
// return maps and fixed points
// ---------------------------------------------------------------------------

/// The return map `M_n = nu^n . M` (the n-fold local loop composed with the
/// entry holonomy), composed symbolically where possible.
pub fn build_mn<T: Real>(nu: C<T>, entry_germ: &GermMap<T>, n: u32) -> Result<GermMap<T>> {
    if n == 0 {
        return Err(Error::invalid("return map index must be at least 1"));
    }
    compose(&linear_power(nu, n as i64), entry_germ)
}

/// Boundary estimates of a germ on the disc of radius `r`: sup of the value
/// and of the derivative magnitude (both attained on the boundary by the
/// maximum principle).
fn boundary_sup<T: Real>(germ: &GermMap<T>, radius: T, samples: usize) -> Result<(T, T)> {
    let samples = samples.max(16);
    let mut sup_val = T::zero();
    let mut sup_deriv = T::zero();
    for k in 0..samples {
        let angle = T::TAU() * T::from_usize(k).unwrap() / T::from_usize(samples).unwrap();
        let w = Complex::new(T::zero(), angle).exp() * Complex::new(radius, T::zero());
        let (v, d) = germ.eval_with_deriv(w)?;
        sup_val = sup_val.max(v.norm());
        sup_deriv = sup_deriv.max(d.norm());
    }
    Ok((sup_val, sup_deriv))
}

/// The least `n` such that `M_n` contracts on the disc of radius `r` with
/// constant at most 1/2 and maps the disc strictly into itself; both
/// conditions are monotone in `n` since `|nu| < 1`.
pub fn min_contracting_index<T: Real>(
    nu: C<T>,
    entry_germ: &GermMap<T>,
    radius: T,
    cfg: &NumericConfig<T>,
) -> Result<u32> {
    let (sup_val, sup_deriv) = boundary_sup(entry_germ, radius, cfg.boundary_samples)?;
    if !sup_val.is_finite() || !sup_deriv.is_finite() {
        return Err(Error::invalid("germ boundary estimates are not finite"));
    }
    let nu_abs = nu.norm();
    if nu_abs >= T::one() {
        return Err(Error::ContractionViolated("|nu| must be < 1"));
    }
    let mut scale = nu_abs;
    for n in 1..=(cfg.max_iterations as u32) {
        let contracts = scale * sup_deriv <= T::of(CONTRACTION_TARGET);
        let maps_into = scale * sup_val <= radius * T::of(1.0 - INTO_MARGIN);
        if contracts && maps_into {
            return Ok(n);
        }
        scale = scale * nu_abs;
    }
    Err(Error::NoConvergence {
        context: "contraction index",
        iterations: cfg.max_iterations,
    })
}

/// Fixed-point solve on the disc of radius `r`: Picard iteration to a coarse
/// residual, then Newton on `w -> M(w) - w` polished one step past the
/// requested tolerance. Starts from the disc centre.
pub fn find_fixed_point<T: Real>(
    germ: &GermMap<T>,
    radius: T,
    cfg: &NumericConfig<T>,
) -> Result<(C<T>, T, usize)> {
    find_fixed_point_from(germ, Complex::new(T::zero(), T::zero()), radius, cfg)
}

/// As `find_fixed_point` but seeded at an arbitrary point of the disc; the
/// contraction makes the result independent of the seed.
pub fn find_fixed_point_from<T: Real>(
    germ: &GermMap<T>,
    start: C<T>,
    radius: T,
    cfg: &NumericConfig<T>,
) -> Result<(C<T>, T, usize)> {
    // the contraction precondition is enforced, not assumed
    let (_, sup_deriv) = boundary_sup(germ, radius, cfg.boundary_samples.min(64))?;
    if sup_deriv >= T::one() {
        return Err(Error::ContractionViolated(
            "derivative reaches 1 on the disc",
        ));
    }

    let inside = radius * (T::one() + T::of(1e-9));
    if start.norm() > inside {
        return Err(Error::ContractionViolated("seed outside the disc"));
    }
    let mut w = start;
    let mut iterations = 0usize;
    let coarse = T::of(1e-4);

    // Picard phase
    loop {
        if iterations >= cfg.max_iterations {
            return Err(Error::NoConvergence {
                context: "fixed point (Picard)",
                iterations,
            });
        }
        iterations += 1;
        let next = germ.eval(w)?;
        if next.norm() > inside {
            return Err(Error::ContractionViolated("Picard iterate left the disc"));
        }
        let residual = (next - w).norm();
        w = next;
        if residual < coarse {
            break;
        }
    }

    // Newton phase with one extra polish step
    let mut polish_left = 1;
    loop {
        if iterations >= cfg.max_iterations {
            return Err(Error::NoConvergence {
                context: "fixed point (Newton)",
                iterations,
            });
        }
        iterations += 1;
        let (value, deriv) = germ.eval_with_deriv(w)?;
        let residual = (value - w).norm();
        let denom = deriv - Complex::new(T::one(), T::zero());
        if denom.norm() <= T::min_positive_value() {
            return Err(Error::ContractionViolated("Newton step degenerate"));
        }
        if residual <= cfg.fixed_point_tol {
            if polish_left == 0 {
                if deriv.norm() >= T::one() {
                    return Err(Error::ContractionViolated("fixed point is not attracting"));
                }
                return Ok((w, residual, iterations));
            }
            polish_left -= 1;
        }
        w = w - (value - w) / denom;
        if w.norm() > inside {
            return Err(Error::ContractionViolated("Newton iterate left the disc"));
        }
    }
}

/// Cycle multiplier `nu^n * M'(p_n)` of the return map at its fixed point.
pub fn multiplier<T: Real>(nu: C<T>, n: u32, entry_germ: &GermMap<T>, p_n: C<T>) -> Result<C<T>> {
    let (_, deriv) = entry_germ.eval_with_deriv(p_n)?;
    Ok(cpowi(nu, n as i64) * deriv)
}

/// Stable log-modulus of the multiplier, `n ln|nu| + ln|M'(p_n)|`; products
/// of moduli are always carried as sums of logs downstream.
pub fn log_multiplier_abs<T: Real>(
    nu: C<T>,
    n: u32,
    entry_germ: &GermMap<T>,
    p_n: C<T>,
) -> Result<T> {
    let (_, deriv) = entry_germ.eval_with_deriv(p_n)?;
    Ok(T::from_u32(n).unwrap() * nu.norm().ln() + deriv.norm().ln())
}

// ---------------------------------------------------------------------------
// representatives
// ---------------------------------------------------------------------------

/// How the entry-path lifts through section points are realized.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaLift<T: Real> {
    /// Canonical stand-in for closed-form germs: a circular excursion of the
    /// base coordinate outside the bidisc with the fiber moving along the
    /// chord from `w` to `M(w)`. The base circle `z(t) = 1 + rho (1 - e^{2 pi i t})`
    /// is injective on `(0, 1)`, so the curve is simple by construction.
    Synthetic { loop_radius: T, samples: usize },
    /// Genuine leaf lift of a base path through each section point.
    Traced {
        foliation: Foliation<T>,
        base: BaseCoord,
        path: BasePath<T>,
    },
}

impl<T: Real> BetaLift<T> {
    pub fn synthetic() -> Self {
        BetaLift::Synthetic {
            loop_radius: T::of(0.25),
            samples: 256,
        }
    }

    /// Samples the lift through `(1, w)`, ending at `(1, M(w))`.
    pub fn realize(
        &self,
        w: C<T>,
        entry_germ: &GermMap<T>,
        cfg: &NumericConfig<T>,
    ) -> Result<SampledCurve<T>> {
        match self {
            BetaLift::Synthetic {
                loop_radius,
                samples,
            } => {
                let target = entry_germ.eval(w)?;
                let n = (*samples).max(16);
                let one = Complex::new(T::one(), T::zero());
                let rho = Complex::new(*loop_radius, T::zero());
                Ok((0..=n)
                    .map(|k| {
                        let t = T::from_usize(k).unwrap() / T::from_usize(n).unwrap();
                        let phase =
                            (crate::scalar::two_pi_i::<T>() * Complex::new(t, T::zero())).exp();
                        let z = one + rho * (one - phase);
                        let fiber = w + (target - w) * Complex::new(t, T::zero());
                        (z, fiber)
                    })
                    .collect())
            }
            BetaLift::Traced {
                foliation,
                base,
                path,
            } => {
                let lift = lift_path(foliation, *base, path, w, cfg)?;
                Ok(lift.trace.samples().iter().map(|s| (s.z, s.w)).collect())
            }
        }
    }
}

/// A certified cycle: index, fixed point, multiplier, and the closed sampled
/// representative (entry lift followed by the n-turn spiral).
#[derive(Debug, Clone)]
pub struct LimitCycle<T: Real> {
    pub index: u32,
    pub fixed_point: C<T>,
    pub multiplier: C<T>,
    /// `ln |multiplier|` computed in log scale (safe for large indices).
    pub log_multiplier_abs: T,
    pub residual: T,
    /// Closed curve in chart coordinates; first and last samples coincide
    /// within tolerance. The entry lift comes first, the spiral second.
    pub representative: SampledCurve<T>,
    /// Sample count of the entry-lift part of the representative.
    pub beta_len: usize,
}

/// Builds the closed representative through a certified fixed point: the
/// entry lift from `(1, p_n)` to `(1, M(p_n))` followed by the spiral winding
/// `n` times back to `(1, nu^n M(p_n)) = (1, p_n)`.
pub fn assemble_representative<T: Real>(
    model: &LocalLinearModel<T>,
    beta: &BetaLift<T>,
    entry_germ: &GermMap<T>,
    p_n: C<T>,
    n: u32,
    cfg: &NumericConfig<T>,
) -> Result<(SampledCurve<T>, usize)> {
    let beta_part = beta.realize(p_n, entry_germ, cfg)?;
    let beta_len = beta_part.len();
    let spiral_start = beta_part[beta_part.len() - 1].1;
    let spiral = SpiralCurve::new(
        spiral_start,
        n,
        model.lambda(),
        cfg.quadrature_points.max(64),
    )?;

    let mut curve = beta_part;
    for (_, z, w) in spiral.sample().into_iter().skip(1) {
        curve.push((z, w));
    }

    let first = curve[0];
    let last = curve[curve.len() - 1];
    let defect = ((first.0 - last.0).norm_sqr() + (first.1 - last.1).norm_sqr()).sqrt();
    let tol = cfg.fixed_point_tol + cfg.ode_rel_tol * p_n.norm() + cfg.ode_abs_tol;
    if defect > tol * T::of(16.0) {
        return Err(Error::AssemblyError {
            defect: defect.as_f64(),
            tol: (tol * T::of(16.0)).as_f64(),
        });
    }
    // close exactly on the stored fixed point
    let len = curve.len();
    curve[len - 1] = first;
    Ok((curve, beta_len))
}

// ---------------------------------------------------------------------------
// families
// ---------------------------------------------------------------------------

/// Options for building a finite family prefix.
#[derive(Debug, Clone)]
pub struct FamilyOptions<T: Real> {
    /// Number of consecutive cycles to construct.
    pub count: usize,
    /// Initial section radius fed to the shrinking search.
    pub initial_radius: T,
    /// Lower bound on the first index (the contraction threshold still applies).
    pub start_index: u32,
}

impl<T: Real> Default for FamilyOptions<T> {
    fn default() -> Self {
        FamilyOptions {
            count: 10,
            initial_radius: T::of(0.5),
            start_index: 1,
        }
    }
}

/// A finite prefix of the countable cycle family over one section.
#[derive(Debug, Clone)]
pub struct CycleFamily<T: Real> {
    pub model: LocalLinearModel<T>,
    pub entry_germ: GermMap<T>,
    pub beta: BetaLift<T>,
    pub section_radius: T,
    pub cycles: Vec<LimitCycle<T>>,
    /// Chart-to-ambient scale factors `(s_z, s_w)` recorded so downstream
    /// integrals can map representatives back to ambient coordinates.
    pub chart_scale: (T, T),
}

/// Runs the construction end to end: shrink the section until the ratio
/// bound and univalence certify, find the first contracting index, then
/// build `count` consecutive cycles.
pub fn build_family<T: Real>(
    model: &LocalLinearModel<T>,
    entry_germ: GermMap<T>,
    beta: BetaLift<T>,
    options: &FamilyOptions<T>,
    cfg: &NumericConfig<T>,
) -> Result<CycleFamily<T>> {
    if options.count == 0 {
        return Err(Error::invalid("cycle count must be at least 1"));
    }
    model.validate(T::of(1e-9))?;
    let nu = model.nu();
    let radius = crate::chart::shrink_section(&entry_germ, options.initial_radius, nu, cfg)?;
    let n0 = min_contracting_index(nu, &entry_germ, radius, cfg)?.max(options.start_index);

    let mut cycles = Vec::with_capacity(options.count);
    for k in 0..options.count {
        let n = n0 + k as u32;
        let return_map = build_mn(nu, &entry_germ, n)?;
        let (p, residual, _) = find_fixed_point(&return_map, radius, cfg)?;
        let mu = multiplier(nu, n, &entry_germ, p)?;
        let log_mu = log_multiplier_abs(nu, n, &entry_germ, p)?;
        let (representative, beta_len) =
            assemble_representative(model, &beta, &entry_germ, p, n, cfg)?;
        cycles.push(LimitCycle {
            index: n,
            fixed_point: p,
            multiplier: mu,
            log_multiplier_abs: log_mu,
            residual,
            representative,
            beta_len,
        });
    }

    Ok(CycleFamily {
        model: model.clone(),
        entry_germ,
        beta,
        section_radius: radius,
        cycles,
        chart_scale: (T::one(), T::one()),
    })
}

// ---------------------------------------------------------------------------
// subsequence selection
// ---------------------------------------------------------------------------

/// Guard band on the greedy selection, in log scale: candidates are admitted
/// only strictly past it, so the downstream certificate inequalities always
/// clear their safety margin instead of landing knife-edge (log-multipliers
/// that are exact multiples of `log|nu|` otherwise produce zero margins).
const SELECTION_GUARD: f64 = 2e-6;

/// Greedy scan fulfilling the multiplier cascade: the first index with
/// `0 < |mu| < 1`, then every index whose modulus drops strictly below the
/// running product of all selected moduli (sums of logs throughout).
pub fn select_subsequence<T: Real>(mus: &[C<T>]) -> Vec<usize> {
    let logs: Vec<T> = mus.iter().map(|m| m.norm().ln()).collect();
    select_subsequence_logs(&logs)
}

/// Log-scale variant for families too deep for representable moduli.
pub fn select_subsequence_logs<T: Real>(log_abs: &[T]) -> Vec<usize> {
    let guard = T::of(SELECTION_GUARD);
    let mut selected = Vec::new();
    let mut log_product = T::zero();
    for (idx, &l) in log_abs.iter().enumerate() {
        if !l.is_finite() {
            continue; // zero modulus never qualifies
        }
        if selected.is_empty() {
            if l < -guard {
                selected.push(idx);
                log_product = l;
            }
        } else if l < log_product - guard {
            selected.push(idx);
            log_product = log_product + l;
        }
    }
    selected
}

// ---------------------------------------------------------------------------
// disjointness certificate
// ---------------------------------------------------------------------------

/// One named check of the disjointness certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Certificate that the family's representatives are simple and pairwise
/// disjoint: the section ratio bound, numeric univalence, distinct fixed
/// points, the analytic spiral test over all pairs, and sample-level
/// separation of the entry lifts. A failing clause is reported as data.
#[derive(Debug, Clone, PartialEq)]
pub struct DisjointnessCertificate<T: Real> {
    pub clauses: Vec<Clause>,
    pub verdict: bool,
    pub section_log_margin: T,
}

/// Fraction of the fixed-point separation that nearby entry lifts must keep
/// between each other (lifts through nearby section points converge
/// pointwise, so separation is measured relative to `|p_n - p_m|`).
const LIFT_SEPARATION_FRACTION: f64 = 1e-2;
/// Relative threshold for "the fixed points are distinct".
const DISTINCTNESS_REL_TOL: f64 = 1e-6;

pub fn certify_disjoint_family<T: Real>(
    family: &CycleFamily<T>,
    cfg: &NumericConfig<T>,
) -> Result<DisjointnessCertificate<T>> {
    let mut clauses = Vec::new();
    let nu = family.model.nu();
    let lambda = family.model.lambda();

    // (a) the section ratio bound with margin
    let bound = certify_section_bound(
        &family.entry_germ,
        family.section_radius,
        nu,
        cfg.boundary_samples,
    );
    let (bound_ok, margin) = match &bound {
        Ok(b) => (b.passed, b.log_margin),
        Err(_) => (false, T::neg_infinity()),
    };
    clauses.push(Clause {
        name: "section-ratio-bound",
        passed: bound_ok,
        detail: format!("log margin {:.3e}", margin.as_f64()),
    });

    // (b) numeric univalence of the entry germ on the section disc
    let univalent = certify_univalence(
        &family.entry_germ,
        family.section_radius,
        cfg.boundary_samples,
    )
    .unwrap_or(false);
    clauses.push(Clause {
        name: "numeric-univalence",
        passed: univalent,
        detail: "derivative nonvanishing and boundary image of degree one".to_string(),
    });

    // (c) fixed points pairwise distinct
    let mut distinct = true;
    let mut min_rel = T::infinity();
    for i in 0..family.cycles.len() {
        for j in (i + 1)..family.cycles.len() {
            let (pi, pj) = (family.cycles[i].fixed_point, family.cycles[j].fixed_point);
            let scale = pi.norm().max(pj.norm()).max(T::min_positive_value());
            let rel = (pi - pj).norm() / scale;
            min_rel = min_rel.min(rel);
            if rel <= T::of(DISTINCTNESS_REL_TOL) {
                distinct = false;
            }
        }
    }
    clauses.push(Clause {
        name: "fixed-points-distinct",
        passed: distinct,
        detail: format!("min relative separation {:.3e}", min_rel.as_f64()),
    });

    // (d) analytic spiral disjointness over all pairs. The ratio bound (a)
    // rules out intersections at nonzero integer shift; a zero-shift
    // coincidence means the spiral start values agree to working precision,
    // which univalence (b) plus distinct fixed points (c) excludes for the
    // true values, so it is discharged by those clauses rather than measured
    // again at a scale floating point cannot resolve.
    let mut spirals_ok = true;
    let mut zero_shift_discharges = 0usize;
    let mut spiral_detail = String::new();
    'pairs: for i in 0..family.cycles.len() {
        for j in (i + 1)..family.cycles.len() {
            let a = &family.cycles[i];
            let b = &family.cycles[j];
            let wa = family.entry_germ.eval(a.fixed_point)?;
            let wb = family.entry_germ.eval(b.fixed_point)?;
            match spirals_intersect(a.index, wa, b.index, wb, lambda, T::of(1e-6)) {
                SpiralRelation::Disjoint => {}
                SpiralRelation::IntersectAt(0) => zero_shift_discharges += 1,
                rel => {
                    spirals_ok = false;
                    spiral_detail = format!("pair ({}, {}): {:?}", a.index, b.index, rel);
                    break 'pairs;
                }
            }
        }
    }
    let spirals_passed = spirals_ok && (zero_shift_discharges == 0 || (univalent && distinct));
    if spirals_ok {
        spiral_detail = if zero_shift_discharges == 0 {
            "all pairs disjoint".to_string()
        } else {
            format!(
                "no nonzero-shift intersections; {zero_shift_discharges} zero-shift coincidences discharged by univalence and distinctness"
            )
        };
    }
    clauses.push(Clause {
        name: "spirals-disjoint",
        passed: spirals_passed,
        detail: spiral_detail,
    });

    // (e) entry lifts: interior samples exterior to the bidisc, and pairwise
    // separation. Separation is measured at the sample level only for pairs
    // whose fixed-point gap is representable against the ambient coordinate
    // magnitudes; tighter pairs collapse below one ulp and are discharged by
    // injectivity of the fiber transport (for chord lifts the interpolated
    // fiber map, checked below on a grid; for leaf lifts, uniqueness of
    // solutions through distinct section points).
    let mut lifts_ok = true;
    let mut lift_detail = String::from("lifts exterior and pairwise separated");
    let mut lift_discharges = 0usize;
    for cycle in &family.cycles {
        let beta_part = &cycle.representative[..cycle.beta_len];
        for &(z, w) in &beta_part[1..beta_part.len() - 1] {
            if !crate::model::is_exterior_unit(z, w) {
                lifts_ok = false;
                lift_detail = format!(
                    "lift {} has an interior sample inside the bidisc",
                    cycle.index
                );
            }
        }
    }
    if lifts_ok {
        let ambient_scale = family
            .cycles
            .iter()
            .flat_map(|c| c.representative[..c.beta_len].iter())
            .map(|&(z, w)| z.norm().max(w.norm()))
            .fold(T::one(), |a, b| a.max(b));
        let representable = ambient_scale * T::epsilon() * T::of(256.0);
        // the fiber separation of two lifts shrinks along the path by the
        // transport derivative, so the demanded floor scales with it
        let anchor_deriv = family
            .entry_germ
            .eval_with_deriv(Complex::new(T::zero(), T::zero()))
            .map(|(_, d)| d.norm())
            .unwrap_or(T::one());
        let contraction = anchor_deriv.min(T::one()).max(T::of(1e-16));
        'lift_pairs: for i in 0..family.cycles.len() {
            for j in (i + 1)..family.cycles.len() {
                let a = &family.cycles[i];
                let b = &family.cycles[j];
                let gap = (a.fixed_point - b.fixed_point).norm();
                if gap <= representable {
                    lift_discharges += 1;
                    continue;
                }
                let threshold = T::of(LIFT_SEPARATION_FRACTION) * gap * contraction;
                let mut min_dist = T::infinity();
                for &(za, wa) in &a.representative[..a.beta_len] {
                    for &(zb, wb) in &b.representative[..b.beta_len] {
                        let d = ((za - zb).norm_sqr() + (wa - wb).norm_sqr()).sqrt();
                        min_dist = min_dist.min(d);
                    }
                }
                if min_dist <= threshold {
                    lifts_ok = false;
                    lift_detail = format!(
                        "lifts ({}, {}) approach within {:.3e} of each other (threshold {:.3e})",
                        a.index,
                        b.index,
                        min_dist.as_f64(),
                        threshold.as_f64()
                    );
                    break 'lift_pairs;
                }
            }
        }
    }
    if lifts_ok && lift_discharges > 0 {
        // the discharge needs fiber-transport injectivity: for chord lifts
        // check |(1 - t) + t M'(w)| away from zero over a (t, w) grid
        let injective = match &family.beta {
            BetaLift::Synthetic { .. } => {
                let mut min_mod = T::infinity();
                let t_grid = 64usize;
                let w_grid = cfg.boundary_samples.clamp(16, 128);
                'grid: for ti in 0..=t_grid {
                    let t = T::from_usize(ti).unwrap() / T::from_usize(t_grid).unwrap();
                    for wi in 0..w_grid {
                        let angle =
                            T::TAU() * T::from_usize(wi).unwrap() / T::from_usize(w_grid).unwrap();
                        let w = Complex::new(T::zero(), angle).exp()
                            * Complex::new(family.section_radius, T::zero());
                        let deriv = match family.entry_germ.eval_with_deriv(w) {
                            Ok((_, d)) => d,
                            Err(_) => {
                                min_mod = T::zero();
                                break 'grid;
                            }
                        };
                        let one_minus_t = Complex::new(T::one() - t, T::zero());
                        let m = (one_minus_t + deriv * Complex::new(t, T::zero())).norm();
                        min_mod = min_mod.min(m);
                    }
                }
                min_mod > T::of(1e-6)
            }
            // leafwise transport through distinct section points stays on
            // distinct leaves; no extra numeric check applies
            BetaLift::Traced { .. } => true,
        };
        if injective {
            lift_detail = format!(
                "lifts exterior; {lift_discharges} sub-ulp pairs discharged by fiber-transport injectivity, the rest separated"
            );
        } else {
            lifts_ok = false;
            lift_detail = "fiber-transport injectivity check failed for sub-ulp pairs".to_string();
        }
    }
    clauses.push(Clause {
        name: "lifts-separated",
        passed: lifts_ok,
        detail: lift_detail,
    });

    let verdict = clauses.iter().all(|c| c.passed);
    Ok(DisjointnessCertificate {
        clauses,
        verdict,
        section_log_margin: margin,
    })
}
