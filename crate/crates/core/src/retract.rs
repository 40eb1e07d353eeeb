//! Retractions `X(2) -> X`, `X(3) -> X(2)` and `X(n) -> X(2)`, built from
//! cores on normalized central sets and extended homogeneously.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fset::{diam, FSet};
use crate::norm::{NormSpec, Point};
use crate::selector::{steiner_of_points, SelectorConfig};
use crate::two_center::{dist_to_x2, MAX_POINTS};

pub const DEFAULT_TAU: f64 = 7.0;

/// Tolerance on `diam = 1` for normalized inputs.
const NORMALIZED_TOL: f64 = 1e-12;

/// `x = t * base + v` with `0 ∈ base` and `diam(base) = 1`, or the
/// degenerate `t = 0` decomposition of a singleton.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedCentral {
    base: FSet,
    t: f64,
    v: Point,
    source: FSet,
}

impl NormalizedCentral {
    /// Normalizes around the lexicographically smallest point.
    pub fn new(x: &FSet) -> Self {
        Self::build(x, x.first().clone())
    }

    /// Normalizes around a chosen point of `x`.
    pub fn with_base_point(x: &FSet, v: &Point) -> Result<Self> {
        if !x.contains(v) {
            return Err(Error::Argument("base point must belong to the set".into()));
        }
        Ok(Self::build(x, v.clone()))
    }

    fn build(x: &FSet, v: Point) -> Self {
        let t = diam(x);
        let base = if t == 0.0 {
            x.translate(&v.scale(-1.0))
        } else {
            x.map_points(|p| Point::from_raw(p.iter().zip(v.iter()).map(|(a, b)| (a - b) / t).collect()))
        };
        Self { base, t, v, source: x.clone() }
    }

    pub fn base(&self) -> &FSet {
        &self.base
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn v(&self) -> &Point {
        &self.v
    }

    pub fn source(&self) -> &FSet {
        &self.source
    }

    pub fn is_degenerate(&self) -> bool {
        self.t == 0.0
    }

    /// `t * r + v`.
    pub fn lift(&self, r: &FSet) -> FSet {
        r.affine(self.t, &self.v)
    }
}

/// Two-piece linear partition of unity switching over `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionOfUnity {
    lo: f64,
    hi: f64,
}

impl PartitionOfUnity {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Argument(format!("need 0 < lo < hi, got lo = {lo}, hi = {hi}")));
        }
        Ok(Self { lo, hi })
    }

    /// Breakpoints `1/5, 1/4` used on three-point sets.
    pub fn three_point() -> Self {
        Self { lo: 0.2, hi: 0.25 }
    }

    /// Breakpoints `1/(3 tau), 1/(2 tau)` used on 2-thin sets.
    pub fn two_thin(tau: f64) -> Result<Self> {
        check_tau(tau)?;
        Self::new(1.0 / (3.0 * tau), 1.0 / (2.0 * tau))
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// `(phi1, phi2)` with `phi1` falling from 1 to 0 across `[lo, hi]`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let phi1 = if t <= self.lo {
            1.0
        } else if t >= self.hi {
            0.0
        } else {
            ((self.hi - t) / (self.hi - self.lo)).clamp(0.0, 1.0)
        };
        (phi1, 1.0 - phi1)
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 6.0) || !tau.is_finite() {
        return Err(Error::Argument(format!("tau must exceed 6, got {tau}")));
    }
    Ok(())
}

pub fn avg(x: &FSet) -> Point {
    Point::mean(x.points()).expect("FSet is nonempty")
}

/// `{phi1 a + phi2 b : a ∈ r1, b ∈ r2}`, skipping a side whose weight is 0.
fn blend(phi1: f64, r1: Option<&[Point]>, phi2: f64, r2: Option<&[Point]>, spec: NormSpec, ambient_n: usize) -> FSet {
    let pts = match (r1, r2) {
        (Some(a), _) if phi2 == 0.0 => a.to_vec(),
        (_, Some(b)) if phi1 == 0.0 => b.to_vec(),
        (Some(a), Some(b)) => a
            .iter()
            .flat_map(|p| b.iter().map(move |q| p.scale(phi1).add(&q.scale(phi2))))
            .collect(),
        _ => unreachable!("a side with positive weight is always evaluated"),
    };
    FSet::from_points_unchecked(pts, ambient_n, spec)
}

/// Labels a normalized multiset of three points as `(x1, x2, x3)` with
/// `d(x1,x2) <= d(x2,x3) <= d(x1,x3) = 1`.
pub fn thin_label(points: &[Point], spec: &NormSpec) -> Result<[Point; 3]> {
    if points.len() != 3 {
        return Err(Error::Argument(format!("thin_label needs 3 points, got {}", points.len())));
    }
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.lex_cmp(b));
    let d = |i: usize, j: usize| spec.dist(&p[i], &p[j]);
    let longest = d(0, 1).max(d(0, 2)).max(d(1, 2));
    if (longest - 1.0).abs() > NORMALIZED_TOL {
        return Err(Error::Argument(format!("thin_label needs diameter 1, got {longest}")));
    }
    let (i, j, k) = [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
        .into_iter()
        .fold(None, |best: Option<(usize, usize, usize)>, c| match best {
            Some(b) if d(b.0, b.1) <= d(c.0, c.1) => Some(b),
            _ => Some(c),
        })
        .unwrap();
    let (a, b) = if d(j, k) < d(i, k) { (i, j) } else { (j, i) };
    let (a, b) = if d(a, k) == d(b, k) { (i.min(j), i.max(j)) } else { (a, b) };
    Ok([p[a].clone(), p[b].clone(), p[k].clone()])
}

/// A set of at most three points as a multiset of exactly three, repeating
/// the smallest point when needed.
fn as_triple(x: &FSet) -> Vec<Point> {
    let mut p = x.points().to_vec();
    while p.len() < 3 {
        p.insert(0, p[0].clone());
    }
    p
}

/// `{(x1 + x2)/2, x3}` on a normalized central set of at most three points.
pub fn merge_closest_pair(x0: &NormalizedCentral) -> Result<FSet> {
    let base = x0.base();
    let [a, b, c] = thin_label(&as_triple(base), base.spec())?;
    let m = Point::from_raw(a.iter().zip(b.iter()).map(|(u, v)| 0.5 * (u + v)).collect());
    Ok(FSet::from_points_unchecked(vec![m, c], 2, *base.spec()))
}

/// Minimum separation of a set viewed in `X(3)`.
fn separation3(x: &FSet) -> f64 {
    if x.len() < 3 {
        return 0.0;
    }
    let p = x.points();
    let s = x.spec();
    s.dist(&p[0], &p[1]).min(s.dist(&p[0], &p[2])).min(s.dist(&p[1], &p[2]))
}

/// Interpolation core on normalized central sets of at most three points.
pub fn interp3(x0: &NormalizedCentral) -> Result<FSet> {
    let base = x0.base();
    if base.len() > 3 {
        return Err(Error::Argument(format!("interp3 takes at most 3 points, got {}", base.len())));
    }
    if x0.is_degenerate() {
        return base.with_ambient(2);
    }
    let (phi1, phi2) = PartitionOfUnity::three_point().eval(separation3(base));
    let r1 = if phi1 > 0.0 { Some(merge_closest_pair(x0)?) } else { None };
    let r2 = if phi2 > 0.0 { Some([avg(base)]) } else { None };
    Ok(blend(phi1, r1.as_ref().map(|f| f.points()), phi2, r2.as_ref().map(|a| &a[..]), *base.spec(), 2))
}

/// `r(x) = t R(x0) + v`; sets of diameter 0 are returned unchanged.
pub fn homogeneous_extend<F>(x: &FSet, core: F) -> Result<FSet>
where
    F: Fn(&NormalizedCentral) -> Result<FSet>,
{
    homogeneous_extend_at(x, x.first(), core)
}

/// [`homogeneous_extend`] normalized around a chosen `v ∈ x`.
pub fn homogeneous_extend_at<F>(x: &FSet, v: &Point, core: F) -> Result<FSet>
where
    F: Fn(&NormalizedCentral) -> Result<FSet>,
{
    let nc = NormalizedCentral::with_base_point(x, v)?;
    if nc.is_degenerate() {
        return Ok(x.clone());
    }
    Ok(nc.lift(&core(&nc)?))
}

/// `X(2) -> X`: the average of at most two points.
pub fn r2(x: &FSet) -> Result<FSet> {
    if x.len() > 2 {
        return Err(Error::Argument(format!("r2 takes at most 2 points, got {}", x.len())));
    }
    Ok(FSet::from_points_unchecked(vec![avg(x)], 1, *x.spec()))
}

/// `X(3) -> X(2)`.
pub fn r3(x: &FSet) -> Result<FSet> {
    if x.len() > 3 {
        return Err(Error::Argument(format!("r3 takes at most 3 points, got {}", x.len())));
    }
    homogeneous_extend(x, interp3)?.with_ambient(2)
}

/// Splits a normalized 2-thin set into its two clusters, the first one
/// holding the lexicographically smallest point.
pub fn cluster_decompose(x0: &NormalizedCentral, tau: f64) -> Result<(FSet, FSet)> {
    check_tau(tau)?;
    let base = x0.base();
    check_size(base)?;
    let w = dist_to_x2(base);
    if !(w.radius < 1.0 / tau) || w.centers.len() != 2 {
        return Err(Error::Precondition(format!(
            "set is not 2-thin: distance to X(2) is {} but must be below 1/tau = {}",
            w.radius,
            1.0 / tau
        )));
    }
    let spec = base.spec();
    let r = 1.0 / tau;
    let near = |c: &Point| -> Vec<Point> { base.points().iter().filter(|p| spec.dist(p, c) < r).cloned().collect() };
    let (mut a, mut b) = (near(&w.centers[0]), near(&w.centers[1]));
    if a.is_empty() || b.is_empty() || a.len() + b.len() != base.len() {
        return Err(Error::Precondition("cluster balls do not split the set".into()));
    }
    if b.iter().any(|p| p == base.first()) {
        std::mem::swap(&mut a, &mut b);
    }
    let n = base.ambient_n();
    Ok((FSet::new(a, n, *spec)?, FSet::new(b, n, *spec)?))
}

fn check_size(x: &FSet) -> Result<()> {
    if x.len() > MAX_POINTS {
        return Err(Error::Argument(format!("at most {MAX_POINTS} points are supported, got {}", x.len())));
    }
    Ok(())
}

/// Interpolation core on normalized central sets of any size.
pub fn interp_n(x0: &NormalizedCentral, tau: f64, cfg: &SelectorConfig) -> Result<FSet> {
    let base = x0.base();
    check_size(base)?;
    let pou = PartitionOfUnity::two_thin(tau)?;
    if x0.is_degenerate() {
        return base.with_ambient(2);
    }
    let (phi1, phi2) = pou.eval(dist_to_x2(base).radius);
    let r1 = if phi1 > 0.0 {
        let (a, b) = cluster_decompose(x0, tau)?;
        Some([steiner_of_points(a.points(), cfg), steiner_of_points(b.points(), cfg)])
    } else {
        None
    };
    let r2 = if phi2 > 0.0 { Some([steiner_of_points(base.points(), cfg)]) } else { None };
    Ok(blend(phi1, r1.as_ref().map(|a| &a[..]), phi2, r2.as_ref().map(|a| &a[..]), *base.spec(), 2))
}

/// `X(n) -> X(2)`.
pub fn rn2(x: &FSet, tau: f64, cfg: &SelectorConfig) -> Result<FSet> {
    check_tau(tau)?;
    check_size(x)?;
    homogeneous_extend(x, |nc| interp_n(nc, tau, cfg))?.with_ambient(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fset::hausdorff;
    use crate::fset::min_sep;
    use proptest::prelude::*;

    fn line(v: &[f64], n: usize) -> FSet {
        FSet::on_line(v, n).unwrap()
    }

    fn values(x: &FSet) -> Vec<f64> {
        x.points().iter().map(|p| p[0]).collect()
    }

    #[test]
    fn avg_and_r2() {
        assert_eq!(avg(&line(&[1.0, 3.0], 2))[0], 2.0);
        let x = FSet::from_coords(&[[0.0, 0.0], [2.0, 0.0], [0.0, 4.0]], 3, NormSpec::euclidean(2)).unwrap();
        let a = avg(&x);
        assert!((a[0] - 2.0 / 3.0).abs() < 1e-15 && (a[1] - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(values(&r2(&line(&[0.0, 1.0], 2)).unwrap()), vec![0.5]);
        assert_eq!(values(&r2(&line(&[4.0], 2)).unwrap()), vec![4.0]);
        assert!(r2(&line(&[0.0, 1.0, 2.0], 3)).is_err());
        let (x, y) = (line(&[0.0], 2), line(&[-1.0, 1.0], 2));
        assert_eq!(hausdorff(&r2(&x).unwrap(), &r2(&y).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn partition_of_unity_values() {
        let p = PartitionOfUnity::three_point();
        assert_eq!(p.eval(0.1), (1.0, 0.0));
        assert_eq!(p.eval(0.25), (0.0, 1.0));
        let (a, b) = p.eval(0.22);
        assert!((a - 0.6).abs() < 1e-12 && (b - 0.4).abs() < 1e-12);
        assert_eq!(a + b, 1.0);
        assert!(PartitionOfUnity::new(0.3, 0.2).is_err());
        assert!(PartitionOfUnity::two_thin(6.0).is_err());
        let q = PartitionOfUnity::two_thin(7.0).unwrap();
        assert_eq!((q.lo(), q.hi()), (1.0 / 21.0, 1.0 / 14.0));
    }

    #[test]
    fn thin_label_examples() {
        let s = NormSpec::euclidean(1);
        let p = |v: f64| Point::new(vec![v]).unwrap();
        let l = thin_label(&[p(1.0), p(0.0), p(0.2)], &s).unwrap();
        assert_eq!([l[0][0], l[1][0], l[2][0]], [0.0, 0.2, 1.0]);
        let l = thin_label(&[p(0.0), p(0.0), p(1.0)], &s).unwrap();
        assert_eq!([l[0][0], l[1][0], l[2][0]], [0.0, 0.0, 1.0]);
        let l = thin_label(&[p(0.5), p(1.0), p(0.0)], &s).unwrap();
        assert_eq!([l[0][0], l[1][0], l[2][0]], [0.0, 0.5, 1.0]);
        assert!(thin_label(&[p(0.0), p(0.5), p(2.0)], &s).is_err());
    }

    #[test]
    fn interp3_examples() {
        let nc = NormalizedCentral::new(&line(&[0.0, 0.5, 1.0], 3));
        assert_eq!(values(&interp3(&nc).unwrap()), vec![0.5]);
        let nc = NormalizedCentral::new(&line(&[0.0, 0.22, 1.0], 3));
        let r = values(&interp3(&nc).unwrap());
        let avg = 1.22 / 3.0;
        let want = [0.6 * 0.11 + 0.4 * avg, 0.6 + 0.4 * avg];
        assert!((r[0] - want[0]).abs() < 1e-12 && (r[1] - want[1]).abs() < 1e-12, "{r:?}");
        assert!((r[0] - 0.228_666_666_666_666_7).abs() < 1e-12);
        let nc = NormalizedCentral::new(&line(&[0.0, 1.0], 3));
        assert_eq!(values(&interp3(&nc).unwrap()), vec![0.0, 1.0]);
    }

    #[test]
    fn r3_examples() {
        assert_eq!(values(&r3(&line(&[0.0, 1.0, 2.0], 3)).unwrap()), vec![1.0]);
        let r = values(&r3(&line(&[0.0, 0.22, 1.0], 3)).unwrap());
        assert!((r[1] - 0.762_666_666_666_666_7).abs() < 1e-12);
        assert_eq!(values(&r3(&line(&[7.0], 3)).unwrap()), vec![7.0]);
        assert!(r3(&line(&[0.0, 1.0, 2.0, 3.0], 4)).is_err());
        let x = line(&[-3.0, 5.5], 3);
        let r = r3(&x).unwrap();
        assert!(hausdorff(&r, &x).unwrap() < 1e-12);
    }

    #[test]
    fn cluster_decompose_examples() {
        let nc = NormalizedCentral::new(&line(&[0.0, 0.05, 0.95, 1.0], 4));
        let (a, b) = cluster_decompose(&nc, 7.0).unwrap();
        assert_eq!(values(&a), vec![0.0, 0.05]);
        assert_eq!(values(&b), vec![0.95, 1.0]);
        let nc = NormalizedCentral::new(&line(&[0.0, 1.0], 4));
        let (a, b) = cluster_decompose(&nc, 7.0).unwrap();
        assert_eq!((values(&a), values(&b)), (vec![0.0], vec![1.0]));
        let nc = NormalizedCentral::new(&line(&[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], 4));
        assert!(matches!(cluster_decompose(&nc, 7.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn interp_n_and_rn2_examples() {
        let cfg = SelectorConfig::default();
        let nc = NormalizedCentral::new(&line(&[0.0, 0.05, 0.95, 1.0], 4));
        let r = values(&interp_n(&nc, 7.0, &cfg).unwrap());
        assert!((r[0] - 0.025).abs() < 1e-12 && (r[1] - 0.975).abs() < 1e-12);
        let nc = NormalizedCentral::new(&line(&[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], 4));
        let r = values(&interp_n(&nc, 7.0, &cfg).unwrap());
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() < 1e-12);
        let nc = NormalizedCentral::new(&line(&[0.0, 1.0], 4));
        assert_eq!(values(&interp_n(&nc, 7.0, &cfg).unwrap()), vec![0.0, 1.0]);

        let r = values(&rn2(&line(&[0.0, 0.05, 0.95, 1.0], 4), 7.0, &cfg).unwrap());
        assert!((r[0] - 0.025).abs() < 1e-12 && (r[1] - 0.975).abs() < 1e-12);
        assert!(rn2(&line(&[0.0, 1.0], 4), 6.0, &cfg).is_err());
    }

    #[test]
    fn normalized_central_invariants() {
        let x = FSet::from_coords(&[[3.0, 1.0], [-1.0, 4.0], [0.5, 0.5]], 3, NormSpec::new(3.0, 2).unwrap()).unwrap();
        let nc = NormalizedCentral::new(&x);
        assert!((diam(nc.base()) - 1.0).abs() < 1e-12);
        assert!(nc.base().contains(&Point::zeros(2)));
        assert!(hausdorff(&nc.lift(nc.base()), &x).unwrap() < 1e-12);
        let s = NormalizedCentral::new(&line(&[2.0], 3));
        assert!(s.is_degenerate());
        assert!(NormalizedCentral::with_base_point(&x, &Point::zeros(2)).is_err());
    }

    fn arb_set(max: usize, dim: usize) -> impl Strategy<Value = FSet> {
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), 1..=max)
            .prop_map(move |rows| FSet::from_coords(&rows, max, NormSpec::euclidean(dim)).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn r3_is_affine_and_a_retraction(x in arb_set(3, 2), t in 0.1f64..10.0, w in prop::array::uniform2(-5.0f64..5.0)) {
            let wp = Point::new(w.to_vec()).unwrap();
            let r = r3(&x).unwrap();
            prop_assert!(r.len() <= 2);
            let moved = r3(&x.affine(t, &wp)).unwrap();
            prop_assert!(hausdorff(&moved, &r.affine(t, &wp)).unwrap() < 1e-9 * t.max(1.0));
            for v in x.points() {
                let alt = homogeneous_extend_at(&x, v, interp3).unwrap();
                prop_assert!(hausdorff(&alt.with_ambient(2).unwrap(), &r).unwrap() < 1e-9);
            }
        }

        #[test]
        fn r3_identity_on_x2(x in arb_set(2, 3)) {
            let x = x.with_ambient(3).unwrap();
            prop_assert!(hausdorff(&r3(&x).unwrap(), &x).unwrap() < 1e-12);
        }

        #[test]
        fn merged_pair_stays_close(x in arb_set(3, 2)) {
            prop_assume!(x.len() == 3);
            let nc = NormalizedCentral::new(&x);
            let delta = min_sep(nc.base());
            prop_assume!(delta <= 1.0 / 3.0);
            let f = merge_closest_pair(&nc).unwrap();
            prop_assert!(hausdorff(&f, nc.base()).unwrap() <= delta / 2.0 + 1e-12);
        }

        #[test]
        fn rn2_is_affine_and_a_retraction(x in arb_set(6, 2), t in 0.1f64..10.0, w in prop::array::uniform2(-5.0f64..5.0)) {
            let cfg = SelectorConfig::default();
            let wp = Point::new(w.to_vec()).unwrap();
            let r = rn2(&x, DEFAULT_TAU, &cfg).unwrap();
            prop_assert!(r.len() <= 2);
            let moved = rn2(&x.affine(t, &wp), DEFAULT_TAU, &cfg).unwrap();
            prop_assert!(hausdorff(&moved, &r.affine(t, &wp)).unwrap() < 1e-9 * t.max(1.0));
            let two = x.subset(&(0..x.len().min(2)).collect::<Vec<_>>()).unwrap();
            prop_assert!(hausdorff(&rn2(&two, DEFAULT_TAU, &cfg).unwrap(), &two).unwrap() < 1e-9);
            for v in x.points() {
                let alt = homogeneous_extend_at(&x, v, |nc| interp_n(nc, DEFAULT_TAU, &cfg)).unwrap();
                prop_assert!(hausdorff(&alt.with_ambient(2).unwrap(), &r).unwrap() < 1e-9);
            }
        }
    }
}
