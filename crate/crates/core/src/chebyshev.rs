//! Chebyshev centers: minimizers of `c -> max_i |c - x_i|` over `R^d`.
//!
//! The line and the `l_inf` norm are separable and solved in closed form.
//! Small Euclidean instances are solved exactly by enumerating candidate
//! support sets of at most `d + 1` points. Everything else goes through a
//! central-cut ellipsoid method on the convex, nonsmooth objective; its
//! stopping rule `sqrt(g' P g) <= tol` bounds the optimality gap.

use crate::linalg::solve;
use crate::norm::{NormSpec, Point};

/// Absolute gap tolerance of the iterative solver, relative to the point
/// spread.
pub const OBJECTIVE_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 10_000;
const MAX_RESTARTS: usize = 16;

/// Largest Euclidean instance solved by support enumeration.
const ENUMERATION_MAX_DIM: usize = 3;
const ENUMERATION_MAX_POINTS: usize = 24;

/// Chebyshev center and radius of a nonempty list of points.
pub fn cheb_center(points: &[Point], spec: &NormSpec) -> (Point, f64) {
    assert!(!points.is_empty(), "Chebyshev center of an empty set");
    if points.len() == 1 {
        return (points[0].clone(), 0.0);
    }
    let centroid = Point::mean(points).expect("nonempty");
    let shifted: Vec<Point> = points.iter().map(|p| p.sub(&centroid)).collect();
    let (c, _) = if spec.dim() == 1 || spec.is_inf() {
        separable(&shifted)
    } else if spec.p() == 1.0 && spec.dim() == 2 {
        l1_planar(&shifted)
    } else if spec.p() == 2.0 && spec.dim() <= ENUMERATION_MAX_DIM && points.len() <= ENUMERATION_MAX_POINTS {
        minidisk(&shifted)
    } else {
        ellipsoid(&shifted, spec)
    };
    let center = c.add(&centroid);
    let radius = objective(&center, points, spec);
    (center, radius)
}

pub(crate) fn objective(c: &[f64], points: &[Point], spec: &NormSpec) -> f64 {
    points.iter().map(|p| spec.dist(c, p)).fold(0.0, f64::max)
}

/// Coordinatewise midrange. Exact on the line and for `l_inf`, where the
/// objective is the largest coordinate half-range.
fn separable(points: &[Point]) -> (Point, f64) {
    let d = points[0].dim();
    let mut center = vec![0.0; d];
    let mut radius: f64 = 0.0;
    for (k, c) in center.iter_mut().enumerate() {
        let (lo, hi) = points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[k]), hi.max(p[k])));
        *c = 0.5 * (lo + hi);
        radius = radius.max(0.5 * (hi - lo));
    }
    (Point::from_raw(center), radius)
}

/// In the plane `|a| + |b| = max(|a + b|, |a - b|)`, so the `l_1` problem is
/// the `l_inf` problem in rotated coordinates.
fn l1_planar(points: &[Point]) -> (Point, f64) {
    let rotated: Vec<Point> = points.iter().map(|p| Point::from_raw(vec![p[0] + p[1], p[0] - p[1]])).collect();
    let (c, r) = separable(&rotated);
    (Point::from_raw(vec![0.5 * (c[0] + c[1]), 0.5 * (c[0] - c[1])]), r)
}

/// Exact Euclidean minimum enclosing ball. The optimal ball is the
/// circumball of its support set (at most `d + 1` points) within the
/// support's affine hull, so the best covering circumcenter over all small
/// subsets is optimal.
pub fn minidisk(points: &[Point]) -> (Point, f64) {
    let spec = NormSpec::euclidean(points[0].dim());
    let d = points[0].dim();
    let m = points.len();
    let mut best_center = points[0].clone();
    let mut best = objective(&best_center, points, &spec);
    let mut subset = Vec::with_capacity(d + 1);
    fn recurse(
        start: usize,
        max_len: usize,
        m: usize,
        subset: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if !subset.is_empty() {
            visit(subset);
        }
        if subset.len() == max_len {
            return;
        }
        for i in start..m {
            subset.push(i);
            recurse(i + 1, max_len, m, subset, visit);
            subset.pop();
        }
    }
    let mut visit = |s: &[usize]| {
        if s.len() < 2 {
            return;
        }
        if let Some(c) = circumcenter(s.iter().map(|&i| &points[i])) {
            let r = objective(&c, points, &spec);
            if r < best {
                best = r;
                best_center = c;
            }
        }
    };
    recurse(0, (d + 1).min(m), m, &mut subset, &mut visit);
    (best_center, best)
}

/// Center of the smallest sphere through the given points inside their
/// affine hull; `None` when the points are affinely dependent.
fn circumcenter<'a, I: Iterator<Item = &'a Point>>(mut pts: I) -> Option<Point> {
    let p0 = pts.next()?;
    let dirs: Vec<Point> = pts.map(|p| p.sub(p0)).collect();
    let k = dirs.len();
    // 2 <v_i, v_j> lambda_j = |v_i|^2
    let mut a = vec![0.0; k * k];
    let mut b = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            a[i * k + j] = 2.0 * dirs[i].dot(&dirs[j]);
        }
        b[i] = dirs[i].dot(&dirs[i]);
    }
    let lambda = solve(&mut a, &mut b, k)?;
    let mut c = p0.coords().to_vec();
    for (l, v) in lambda.iter().zip(&dirs) {
        for (ci, vi) in c.iter_mut().zip(v.iter()) {
            *ci += l * vi;
        }
    }
    if c.iter().any(|x| !x.is_finite()) {
        return None;
    }
    Some(Point::from_raw(c))
}

/// A subgradient of `c -> max_i |c - x_i|` and the objective value.
fn subgradient(c: &[f64], points: &[Point], spec: &NormSpec) -> (Vec<f64>, f64) {
    let (far, value) = points
        .iter()
        .map(|p| (p, spec.dist(c, p)))
        .fold((&points[0], f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    let u: Vec<f64> = c.iter().zip(far.iter()).map(|(a, b)| a - b).collect();
    if value == 0.0 {
        return (vec![0.0; c.len()], 0.0);
    }
    let p = spec.p();
    let g = if p == 2.0 {
        u.iter().map(|x| x / value).collect()
    } else if p == 1.0 {
        u.iter().map(|x| if *x == 0.0 { 0.0 } else { x.signum() }).collect()
    } else if p.is_infinite() {
        let k = u
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(k, _)| k)
            .unwrap_or(0);
        let mut g = vec![0.0; c.len()];
        g[k] = u[k].signum();
        g
    } else {
        u.iter().map(|x| x.signum() * (x.abs() / value).powf(p - 1.0)).collect()
    };
    (g, value)
}

/// Central-cut ellipsoid method started from a Euclidean ball around the
/// origin that contains every minimizer.
fn ellipsoid(points: &[Point], spec: &NormSpec) -> (Point, f64) {
    let d = spec.dim();
    let df = d as f64;
    let mut x = vec![0.0; d];
    let f0 = objective(&x, points, spec);
    let spread = points.iter().map(|p| p.dot(p).sqrt()).fold(0.0, f64::max);
    // |c*|_2 <= |c* - x_1|_2 + |x_1|_2 and |.|_2 <= sqrt(d) |.|_p
    let r0 = 1.01 * (df.sqrt() * f0 + spread) + 1e-12;
    let mut shape = vec![0.0; d * d];
    for i in 0..d {
        shape[i * d + i] = r0 * r0;
    }
    let tol = OBJECTIVE_TOL * spread.max(f64::MIN_POSITIVE);
    let mut best_x = x.clone();
    let mut best_f = f0;
    let mut restarts = 0;
    for _ in 0..MAX_ITERATIONS {
        let (g, fx) = subgradient(&x, points, spec);
        if fx < best_f {
            best_f = fx;
            best_x = x.clone();
        }
        let pg: Vec<f64> = (0..d).map(|i| (0..d).map(|j| shape[i * d + j] * g[j]).sum()).collect();
        let gpg: f64 = g.iter().zip(&pg).map(|(a, b)| a * b).sum();
        if gpg.sqrt() <= tol && g.iter().any(|v| *v != 0.0) {
            break;
        }
        if !(gpg > 0.0) || !gpg.is_finite() {
            // The shape matrix lost definiteness, which happens when the
            // minimizers form a flat face. Restart from the best point.
            let spread_now = (0..d).map(|i| shape[i * d + i].abs()).fold(0.0, f64::max).sqrt();
            if g.iter().all(|v| *v == 0.0) || restarts >= MAX_RESTARTS {
                break;
            }
            restarts += 1;
            let r = (4.0 * spread_now).max(1e3 * tol);
            x = best_x.clone();
            shape.iter_mut().for_each(|v| *v = 0.0);
            for i in 0..d {
                shape[i * d + i] = r * r;
            }
            continue;
        }
        let s = gpg.sqrt();
        let step: Vec<f64> = pg.iter().map(|v| v / s).collect();
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi -= si / (df + 1.0);
        }
        let c1 = df * df / (df * df - 1.0);
        let c2 = 2.0 / (df + 1.0);
        for i in 0..d {
            for j in 0..d {
                shape[i * d + j] = c1 * (shape[i * d + j] - c2 * step[i] * step[j]);
            }
        }
        // keep the shape matrix symmetric against drift
        for i in 0..d {
            for j in i + 1..d {
                let m = 0.5 * (shape[i * d + j] + shape[j * d + i]);
                shape[i * d + j] = m;
                shape[j * d + i] = m;
            }
        }
    }
    let fx = objective(&x, points, spec);
    if fx < best_f {
        best_f = fx;
        best_x = x;
    }
    (Point::from_raw(best_x), best_f)
}
