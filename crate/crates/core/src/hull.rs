//! Euclidean nearest points of convex hulls of finite point sets (Wolfe's
//! minimum-norm-point algorithm).

use crate::linalg::solve;
use crate::norm::Point;

const MAX_MAJOR: usize = 1000;

/// Nearest point of `conv(points)` to the origin with its convex weights.
pub fn min_norm_point(points: &[Point]) -> (Point, Vec<f64>) {
    assert!(!points.is_empty(), "convex hull of an empty set");
    let m = points.len();
    let scale = points.iter().map(|p| p.dot(p)).fold(0.0, f64::max);
    let eps = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let start = (0..m).min_by(|&i, &j| points[i].dot(&points[i]).total_cmp(&points[j].dot(&points[j]))).unwrap();
    let mut support = vec![start];
    let mut weights = vec![1.0];
    let combine = |s: &[usize], w: &[f64]| {
        let mut acc = Point::zeros(points[0].dim());
        for (&i, &wi) in s.iter().zip(w) {
            acc = acc.add(&points[i].scale(wi));
        }
        acc
    };
    let mut x = points[start].clone();
    for _ in 0..MAX_MAJOR {
        // support points satisfy x.p = x.x up to rounding, so only the rest can enter
        let Some(j) = (0..m)
            .filter(|i| !support.contains(i))
            .min_by(|&i, &k| x.dot(&points[i]).total_cmp(&x.dot(&points[k])))
        else {
            break;
        };
        if x.dot(&x) - x.dot(&points[j]) <= eps {
            break;
        }
        support.push(j);
        weights.push(0.0);
        let mut stalled = false;
        loop {
            let alpha = match affine_min_norm(points, &support) {
                Some(a) => a,
                None => {
                    support.pop();
                    weights.pop();
                    stalled = true;
                    break;
                }
            };
            if alpha.iter().all(|&a| a > 1e-15) {
                weights = alpha;
                break;
            }
            let theta = weights
                .iter()
                .zip(&alpha)
                .filter(|(_, &a)| a <= 1e-15)
                .map(|(&w, &a)| if w - a > 0.0 { w / (w - a) } else { 0.0 })
                .fold(1.0, f64::min);
            for (w, a) in weights.iter_mut().zip(&alpha) {
                *w += theta * (a - *w);
            }
            let keep: Vec<bool> = weights.iter().map(|&w| w > 1e-15).collect();
            let mut k = 0;
            support.retain(|_| {
                k += 1;
                keep[k - 1]
            });
            let mut k = 0;
            weights.retain(|_| {
                k += 1;
                keep[k - 1]
            });
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
        }
        x = combine(&support, &weights);
        if stalled {
            break;
        }
    }
    let mut full = vec![0.0; m];
    for (&i, &w) in support.iter().zip(&weights) {
        full[i] += w;
    }
    (x, full)
}

/// Affine weights of the minimum-norm point of the affine hull of `s`,
/// solved in coordinates relative to the first support point. `None` when
/// the support is affinely dependent.
fn affine_min_norm(points: &[Point], s: &[usize]) -> Option<Vec<f64>> {
    let base = &points[s[0]];
    let diffs: Vec<Point> = s[1..].iter().map(|&i| points[i].sub(base)).collect();
    let k = diffs.len();
    if k == 0 {
        return Some(vec![1.0]);
    }
    let mut a = vec![0.0; k * k];
    let mut b = vec![0.0; k];
    for r in 0..k {
        for c in 0..k {
            a[r * k + c] = diffs[r].dot(&diffs[c]);
        }
        b[r] = -diffs[r].dot(base);
    }
    let lambda = solve(&mut a, &mut b, k)?;
    let mut alpha = Vec::with_capacity(k + 1);
    alpha.push(1.0 - lambda.iter().sum::<f64>());
    alpha.extend(lambda);
    Some(alpha)
}

/// Euclidean projection of `q` onto `conv(points)`.
pub fn project_to_hull(q: &Point, points: &[Point]) -> Point {
    let shifted: Vec<Point> = points.iter().map(|p| p.sub(q)).collect();
    let (x, _) = min_norm_point(&shifted);
    x.add(q)
}

/// Euclidean distance from `q` to `conv(points)`.
pub fn hull_distance(q: &Point, points: &[Point]) -> f64 {
    let shifted: Vec<Point> = points.iter().map(|p| p.sub(q)).collect();
    let (x, _) = min_norm_point(&shifted);
    x.dot(&x).sqrt()
}
