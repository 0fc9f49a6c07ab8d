//! Small shared numeric routines: complex integer powers, 2x2 solves and
//! eigenvalues, winding numbers, and univariate complex root finding.

use crate::scalar::{Real, C};
use num_complex::Complex;

/// Integer power by binary exponentiation (stable for large exponents).
pub fn cpowi<T: Real>(z: C<T>, n: i64) -> C<T> {
    if n == 0 {
        return Complex::new(T::one(), T::zero());
    }
    let mut base = if n < 0 { z.inv() } else { z };
    let mut e = n.unsigned_abs();
    let mut acc = Complex::new(T::one(), T::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// Solves the 2x2 complex system `m x = rhs`; `None` when the matrix is
/// numerically singular relative to its magnitude.
pub fn solve2x2<T: Real>(m: &[[C<T>; 2]; 2], rhs: &[C<T>; 2]) -> Option<[C<T>; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m[0][0].norm() * m[1][1].norm() + m[0][1].norm() * m[1][0].norm();
    if det.norm() <= T::of(1e-14) * (scale + T::min_positive_value()) {
        return None;
    }
    let x0 = (rhs[0] * m[1][1] - rhs[1] * m[0][1]) / det;
    let x1 = (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det;
    Some([x0, x1])
}

/// Damped least-squares step `(m^H m + eps I) x = m^H rhs`, used when the
/// plain solve is singular.
pub fn solve2x2_damped<T: Real>(m: &[[C<T>; 2]; 2], rhs: &[C<T>; 2], eps: T) -> [C<T>; 2] {
    let e = Complex::new(eps, T::zero());
    // m^H m
    let a = m[0][0].conj() * m[0][0] + m[1][0].conj() * m[1][0] + e;
    let b = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
    let c = m[0][1].conj() * m[0][0] + m[1][1].conj() * m[1][0];
    let d = m[0][1].conj() * m[0][1] + m[1][1].conj() * m[1][1] + e;
    let r0 = m[0][0].conj() * rhs[0] + m[1][0].conj() * rhs[1];
    let r1 = m[0][1].conj() * rhs[0] + m[1][1].conj() * rhs[1];
    let det = a * d - b * c;
    [(r0 * d - r1 * b) / det, (a * r1 - c * r0) / det]
}

/// Eigenvalues of a 2x2 complex matrix via the characteristic polynomial.
pub fn eig2x2<T: Real>(m: &[[C<T>; 2]; 2]) -> (C<T>, C<T>) {
    let half = T::of(0.5);
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr - det * T::of(4.0)).sqrt();
    ((tr + disc) * half, (tr - disc) * half)
}

/// Winding number of a sampled closed curve around `center`, from summed
/// phase increments. `None` when a sample (or a degenerate segment) makes the
/// phase ill-defined.
pub fn winding_number<T: Real>(points: &[C<T>], center: C<T>) -> Option<i64> {
    if points.len() < 3 {
        return None;
    }
    let mut total = T::zero();
    let mut prev = points[0] - center;
    if prev.norm() <= T::min_positive_value() {
        return None;
    }
    for p in points.iter().skip(1) {
        let cur = *p - center;
        if cur.norm() <= T::min_positive_value() {
            return None;
        }
        total = total + (cur / prev).arg();
        prev = cur;
    }
    // close up
    let cur = points[0] - center;
    total = total + (cur / prev).arg();
    let turns = total / T::TAU();
    let rounded = turns.round();
    if (turns - rounded).abs() > T::of(0.25) {
        return None;
    }
    rounded.to_i64()
}

/// All roots of a univariate complex polynomial (ascending coefficients) by
/// Durand-Kerner iteration. Trailing zero coefficients must be trimmed by the
/// caller; the leading coefficient must be nonzero.
pub fn poly_roots<T: Real>(coeffs: &[C<T>]) -> Vec<C<T>> {
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let monic: Vec<C<T>> = coeffs.iter().map(|c| *c / lead).collect();
    if deg == 1 {
        return vec![-monic[0]];
    }

    // Cauchy bound for the root moduli.
    let bound = T::one()
        + monic[..deg]
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), |a, b| a.max(b));
    let seed = Complex::new(T::of(0.4), T::of(0.9));
    let mut roots: Vec<C<T>> = (0..deg)
        .map(|k| cpowi(seed, k as i64 + 1) * bound / seed.norm())
        .collect();

    let eval = |z: C<T>| -> C<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for c in monic.iter().rev() {
            acc = acc * z + *c;
        }
        acc
    };

    for _ in 0..600 {
        let mut max_step = T::zero();
        for i in 0..deg {
            let zi = roots[i];
            let mut denom = Complex::new(T::one(), T::zero());
            for (j, zj) in roots.iter().enumerate() {
                if j != i {
                    denom = denom * (zi - *zj);
                }
            }
            if denom.norm() <= T::min_positive_value() {
                // coincident iterates: nudge apart
                roots[i] = zi + Complex::new(T::of(1e-8) * bound, T::of(1e-8) * bound);
                max_step = T::one();
                continue;
            }
            let step = eval(zi) / denom;
            roots[i] = zi - step;
            max_step = max_step.max(step.norm());
        }
        if max_step < T::of(1e-14) * bound.max(T::one()) {
            break;
        }
    }
    roots
}

/// Clusters numerically coincident roots; returns representatives with
/// multiplicities.
pub fn cluster_roots<T: Real>(roots: &[C<T>], tol: T) -> Vec<(C<T>, u32)> {
    let mut clusters: Vec<(C<T>, u32)> = Vec::new();
    for &r in roots {
        match clusters.iter_mut().find(|(c, _)| (*c - r).norm() < tol) {
            Some((c, count)) => {
                // running mean keeps the representative centred
                let n = T::from_u32(*count).unwrap();
                *c = (*c * n + r) / (n + T::one());
                *count += 1;
            }
            None => clusters.push((r, 1)),
        }
    }
    clusters
}
