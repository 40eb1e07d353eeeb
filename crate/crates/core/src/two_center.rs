//! Distance from a finite set to `X(2)` by exhaustive 2-partition search.
//!
//! An optimal pair of centers `{a, b}` induces a nearest-center partition,
//! and for a fixed partition the per-cluster Chebyshev centers are optimal,
//! so enumerating the `2^(|x|-1)` partitions is exact.

use serde::Serialize;

use crate::chebyshev::cheb_center;
use crate::fset::FSet;
use crate::norm::Point;

/// Largest set size accepted by the enumeration.
pub const MAX_POINTS: usize = 20;

/// Relative slack below which a later partition does not replace the
/// current best one; keeps the earliest partition among numerical ties.
const TIE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct TwoCenterWitness {
    /// One center per cluster; a single entry when one cluster is optimal.
    pub centers: Vec<Point>,
    pub radius: f64,
    /// Cluster index (0 or 1) of every point of `x`, in `x`'s order.
    pub assignment: Vec<u8>,
}

impl TwoCenterWitness {
    pub fn cluster(&self, x: &FSet, k: u8) -> Vec<usize> {
        (0..x.len()).filter(|&i| self.assignment[i] == k).collect()
    }
}

/// Computes `inf_{z in X(2)} d_H(x, z)` with its optimal centers.
///
/// # Panics
/// If `|x|` exceeds [`MAX_POINTS`].
pub fn dist_to_x2(x: &FSet) -> TwoCenterWitness {
    let m = x.len();
    assert!(m <= MAX_POINTS, "dist_to_x2 supports at most {MAX_POINTS} points, got {m}");
    if m <= 2 {
        return TwoCenterWitness {
            centers: x.points().to_vec(),
            radius: 0.0,
            assignment: (0..m as u8).collect(),
        };
    }
    let spec = x.spec();
    let pts = x.points();
    let full: u32 = (1u32 << m) - 1;
    let mut cache: std::collections::HashMap<u32, (Point, f64)> = std::collections::HashMap::new();
    let mut solve = |mask: u32| -> (Point, f64) {
        cache
            .entry(mask)
            .or_insert_with(|| {
                let sub: Vec<Point> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| pts[i].clone()).collect();
                cheb_center(&sub, spec)
            })
            .clone()
    };
    let (c_all, r_all) = solve(full);
    let mut best_radius = r_all;
    let mut best_mask = full;
    let mut best_centers = vec![c_all];
    // masks always contain point 0 in cluster A; `full` is the one-cluster
    // case. Descending order keeps the leading points together on ties.
    for rest in (0..(1u32 << (m - 1)) - 1).rev() {
        let a = (rest << 1) | 1;
        let b = full & !a;
        let (ca, ra) = solve(a);
        if ra >= best_radius * (1.0 + TIE_SLACK) {
            continue;
        }
        let (cb, rb) = solve(b);
        let r = ra.max(rb);
        if r < best_radius * (1.0 - TIE_SLACK) {
            best_radius = r;
            best_mask = a;
            best_centers = vec![ca, cb];
        }
    }
    let assignment = (0..m).map(|i| if best_mask >> i & 1 == 1 { 0 } else { 1 }).collect();
    TwoCenterWitness { centers: best_centers, radius: best_radius, assignment }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fset::hausdorff;
    use crate::norm::NormSpec;
    use proptest::prelude::*;

    #[test]
    fn small_sets_are_their_own_centers() {
        let x = FSet::on_line(&[3.0, -1.0], 4).unwrap();
        let w = dist_to_x2(&x);
        assert_eq!(w.radius, 0.0);
        assert_eq!(w.centers, x.points().to_vec());
    }

    #[test]
    fn three_points_on_a_line() {
        let x = FSet::on_line(&[-1.0, 0.0, 1.0], 3).unwrap();
        let w = dist_to_x2(&x);
        assert_eq!(w.radius, 0.5);
        assert_eq!(w.centers[0][0], -0.5);
        assert_eq!(w.centers[1][0], 1.0);
        assert_eq!(w.assignment, vec![0, 0, 1]);
    }

    #[test]
    fn two_tight_clusters() {
        let x = FSet::on_line(&[0.0, 0.05, 0.95, 1.0], 4).unwrap();
        let w = dist_to_x2(&x);
        assert!((w.radius - 0.025).abs() < 1e-15);
        assert!((w.centers[0][0] - 0.025).abs() < 1e-15);
        assert!((w.centers[1][0] - 0.975).abs() < 1e-15);
    }

    #[test]
    fn equally_spaced_quadruple() {
        let x = FSet::on_line(&[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], 4).unwrap();
        assert!((dist_to_x2(&x).radius - 1.0 / 6.0).abs() < 1e-15);
    }

    /// On the line, optimal clusters are contiguous intervals.
    fn line_oracle(v: &mut [f64]) -> f64 {
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let mut best = 0.5 * (v[n - 1] - v[0]);
        for k in 1..n {
            best = best.min((0.5 * (v[k - 1] - v[0])).max(0.5 * (v[n - 1] - v[k])));
        }
        best
    }

    proptest! {
        #[test]
        fn matches_interval_oracle_on_the_line(v in prop::collection::vec(-5.0f64..5.0, 1..9)) {
            let x = FSet::on_line(&v, 9).unwrap();
            let mut pts: Vec<f64> = x.points().iter().map(|p| p[0]).collect();
            prop_assert!((dist_to_x2(&x).radius - line_oracle(&mut pts)).abs() < 1e-12);
        }

        #[test]
        fn witness_is_no_worse_than_random_z(
            rows in prop::collection::vec(prop::array::uniform2(-1.0f64..1.0), 3..7),
            zs in prop::collection::vec(prop::array::uniform4(-1.0f64..1.0), 50),
            p in prop::sample::select(vec![1.0, 2.0, 3.0, f64::INFINITY]),
        ) {
            let spec = NormSpec::new(p, 2).unwrap();
            let x = FSet::from_coords(&rows, 8, spec).unwrap();
            let w = dist_to_x2(&x);
            let z_centers = FSet::from_coords(&w.centers.iter().map(|c| c.coords().to_vec()).collect::<Vec<_>>(), 8, spec).unwrap();
            prop_assert!((hausdorff(&x, &z_centers).unwrap() - w.radius).abs() < 1e-9);
            for z in &zs {
                let z = FSet::from_coords(&[[z[0], z[1]], [z[2], z[3]]], 8, spec).unwrap();
                prop_assert!(w.radius <= hausdorff(&x, &z).unwrap() + 1e-9);
            }
        }
    }
}
