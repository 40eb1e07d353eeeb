//! Elements of the finite subset space `X(n)` and the Hausdorff metric on
//! them.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::norm::{Exponent, NormSpec, Point};

/// A nonempty finite subset of `R^d` with at most `ambient_n` points.
///
/// Points are deduplicated by exact coordinate equality and stored in
/// lexicographic order, so two `FSet`s holding the same set compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct FSet {
    points: Vec<Point>,
    ambient_n: usize,
    spec: NormSpec,
}

impl FSet {
    pub fn new(points: Vec<Point>, ambient_n: usize, spec: NormSpec) -> Result<Self> {
        if ambient_n == 0 {
            return Err(Error::Argument("ambient cardinality must be positive".into()));
        }
        if points.is_empty() {
            return Err(Error::Argument("a finite subset must be nonempty".into()));
        }
        for p in &points {
            spec.check_dim(p)?;
        }
        let points = canonical(points);
        if points.len() > ambient_n {
            return Err(Error::Capacity { size: points.len(), capacity: ambient_n });
        }
        Ok(Self { points, ambient_n, spec })
    }

    /// Builds a set from raw coordinate rows.
    pub fn from_coords<R: AsRef<[f64]>>(rows: &[R], ambient_n: usize, spec: NormSpec) -> Result<Self> {
        let points = rows
            .iter()
            .map(|r| Point::new(r.as_ref().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, ambient_n, spec)
    }

    /// A subset of the real line (`d = 1`; every `p`-norm is `|.|`).
    pub fn on_line(values: &[f64], ambient_n: usize) -> Result<Self> {
        let points = values.iter().map(|&v| Point::new(vec![v])).collect::<Result<Vec<_>>>()?;
        Self::new(points, ambient_n, NormSpec::euclidean(1))
    }

    /// A singleton of `X(n)`.
    pub fn singleton(p: Point, ambient_n: usize, spec: NormSpec) -> Result<Self> {
        Self::new(vec![p], ambient_n, spec)
    }

    pub(crate) fn from_points_unchecked(points: Vec<Point>, ambient_n: usize, spec: NormSpec) -> Self {
        let points = canonical(points);
        debug_assert!(!points.is_empty() && points.len() <= ambient_n);
        Self { points, ambient_n, spec }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ambient_n(&self) -> usize {
        self.ambient_n
    }

    pub fn spec(&self) -> &NormSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// The same set viewed in a different ambient space `X(n)`.
    pub fn with_ambient(&self, ambient_n: usize) -> Result<Self> {
        if ambient_n == 0 || self.len() > ambient_n {
            return Err(Error::Capacity { size: self.len(), capacity: ambient_n });
        }
        Ok(Self { points: self.points.clone(), ambient_n, spec: self.spec })
    }

    /// True when both hold the same points, regardless of ambient space.
    pub fn same_points(&self, other: &FSet) -> bool {
        self.points == other.points
    }

    /// Index of a point, by exact equality.
    pub fn position(&self, p: &Point) -> Option<usize> {
        self.points.binary_search_by(|q| q.lex_cmp(p)).ok()
    }

    /// The lexicographically smallest element.
    pub fn first(&self) -> &Point {
        &self.points[0]
    }

    pub fn map_points<F: FnMut(&Point) -> Point>(&self, f: F) -> FSet {
        Self::from_points_unchecked(self.points.iter().map(f).collect(), self.ambient_n, self.spec)
    }

    pub fn translate(&self, v: &Point) -> FSet {
        self.map_points(|p| p.add(v))
    }

    pub fn scale(&self, t: f64) -> FSet {
        self.map_points(|p| p.scale(t))
    }

    /// `t x + v`.
    pub fn affine(&self, t: f64, v: &Point) -> FSet {
        self.map_points(|p| p.scale(t).add(v))
    }

    /// The set of the listed points as a subset of the same ambient space.
    pub fn subset(&self, indices: &[usize]) -> Result<FSet> {
        let pts: Vec<Point> = indices.iter().map(|&i| self.points[i].clone()).collect();
        FSet::new(pts, self.ambient_n, self.spec)
    }

    pub fn union(&self, other: &FSet) -> Result<FSet> {
        same_spec(self, other)?;
        let pts: Vec<Point> = self.points.iter().chain(&other.points).cloned().collect();
        let n = pts.len().max(self.ambient_n);
        FSet::new(pts, n, self.spec)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.position(p).is_some()
    }
}

fn canonical(mut points: Vec<Point>) -> Vec<Point> {
    points.sort_by(|a, b| a.lex_cmp(b));
    points.dedup();
    points
}

pub(crate) fn same_spec(x: &FSet, y: &FSet) -> Result<()> {
    if x.spec != y.spec {
        return Err(Error::SpecMismatch(format!("{} vs {}", x.spec, y.spec)));
    }
    Ok(())
}

/// Directed distance `sup_{a in a_pts} inf_{b in b_pts} |a - b|`.
pub(crate) fn directed(spec: &NormSpec, a_pts: &[Point], b_pts: &[Point]) -> f64 {
    a_pts
        .iter()
        .map(|a| b_pts.iter().map(|b| spec.dist(a, b)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

pub(crate) fn hausdorff_points(spec: &NormSpec, a: &[Point], b: &[Point]) -> f64 {
    directed(spec, a, b).max(directed(spec, b, a))
}

/// Hausdorff distance.
pub fn hausdorff(x: &FSet, y: &FSet) -> Result<f64> {
    same_spec(x, y)?;
    Ok(hausdorff_points(&x.spec, &x.points, &y.points))
}

pub(crate) fn diam_points(spec: &NormSpec, pts: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            d = d.max(spec.dist(a, b));
        }
    }
    d
}

pub fn diam(x: &FSet) -> f64 {
    diam_points(&x.spec, &x.points)
}

/// Minimum separation: the least pairwise distance, which is zero whenever
/// the set has fewer than `ambient_n` points.
pub fn min_sep(x: &FSet) -> f64 {
    if x.len() < x.ambient_n {
        return 0.0;
    }
    let mut d = f64::INFINITY;
    for (i, a) in x.points.iter().enumerate() {
        for b in &x.points[i + 1..] {
            d = d.min(x.spec.dist(a, b));
        }
    }
    if d.is_infinite() {
        // X(1): a singleton at full cardinality has no pairs
        0.0
    } else {
        d
    }
}

/// The unique bijection `sigma` with `|x_i - y_sigma(i)| <= d_H(x, y)`, when
/// one of the sets is separated by more than twice their Hausdorff distance.
/// Returned as `(i, sigma(i))` pairs in order of `i`.
pub fn proximal_bijection(x: &FSet, y: &FSet) -> Result<Option<Vec<(usize, usize)>>> {
    same_spec(x, y)?;
    if x.len() != y.len() || x.len() != x.ambient_n {
        return Err(Error::Argument(format!(
            "proximal bijection needs |x| = |y| = n, got |x| = {}, |y| = {}, n = {}",
            x.len(),
            y.len(),
            x.ambient_n
        )));
    }
    let rho = hausdorff_points(&x.spec, &x.points, &y.points);
    let spec = x.spec;
    let assign = |from: &[Point], to: &[Point]| -> Option<Vec<usize>> {
        let mut sigma = Vec::with_capacity(from.len());
        let mut used = vec![false; to.len()];
        for a in from {
            let mut hits = to.iter().enumerate().filter(|(_, b)| spec.dist(a, b) <= rho);
            let (j, _) = hits.next()?;
            if hits.next().is_some() || used[j] {
                return None;
            }
            used[j] = true;
            sigma.push(j);
        }
        Some(sigma)
    };
    if min_sep(x) > 2.0 * rho {
        // each closed rho-ball around a point of y holds exactly one point of x
        if let Some(inv) = assign(&y.points, &x.points) {
            let mut pairs: Vec<(usize, usize)> = inv.into_iter().enumerate().map(|(j, i)| (i, j)).collect();
            pairs.sort_unstable();
            return Ok(Some(pairs));
        }
    }
    if min_sep(y) > 2.0 * rho {
        if let Some(sigma) = assign(&x.points, &y.points) {
            return Ok(Some(sigma.into_iter().enumerate().collect()));
        }
    }
    Ok(None)
}

#[derive(Serialize, Deserialize)]
struct FSetJson {
    n: usize,
    p: Exponent,
    points: Vec<Point>,
}

impl Serialize for FSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FSetJson { n: self.ambient_n, p: Exponent(self.spec.p()), points: self.points.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FSetJson::deserialize(d)?;
        let dim = raw.points.first().map(|p| p.dim()).ok_or_else(|| serde::de::Error::custom("empty point list"))?;
        let spec = NormSpec::new(raw.p.0, dim).map_err(serde::de::Error::custom)?;
        FSet::new(raw.points, raw.n, spec).map_err(serde::de::Error::custom)
    }
}
