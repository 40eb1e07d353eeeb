//! Piecewise-linear paths in `X(n)` driven by relations, the two-leg
//! quasigeodesic through a midpoint set, and spaced-pair generators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fset::{hausdorff, same_spec, FSet};
use crate::norm::{NormSpec, Point};
use crate::relation::{proximal_relation, Relation};

/// One linear piece: every pair `(i, j)` of the relation moves `start[i]`
/// to `end[j]` along a segment while the global time runs over `[t0, t1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub t0: f64,
    pub t1: f64,
    pub pairs: Vec<(usize, usize)>,
    pub start: FSet,
    pub end: FSet,
}

impl Leg {
    fn eval_local(&self, s: f64, ambient_n: usize) -> FSet {
        let pts = self
            .pairs
            .iter()
            .map(|&(i, j)| self.start.points()[i].lerp(&self.end.points()[j], s))
            .collect();
        FSet::from_points_unchecked(pts, ambient_n, *self.start.spec())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiPath {
    legs: Vec<Leg>,
    #[serde(skip)]
    ambient_n: usize,
}

impl QuasiPath {
    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn ambient_n(&self) -> usize {
        self.ambient_n
    }

    pub fn start(&self) -> &FSet {
        &self.legs[0].start
    }

    pub fn end(&self) -> &FSet {
        &self.legs[self.legs.len() - 1].end
    }

    /// Evaluates the path at `t ∈ [0, 1]`.
    pub fn eval(&self, t: f64) -> Result<FSet> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Argument(format!("path parameter {t} outside [0, 1]")));
        }
        let leg = self.legs.iter().find(|l| t <= l.t1).unwrap_or(&self.legs[self.legs.len() - 1]);
        let s = if t == leg.t1 { 1.0 } else if t == leg.t0 { 0.0 } else { (t - leg.t0) / (leg.t1 - leg.t0) };
        Ok(leg.eval_local(s, self.ambient_n))
    }

    fn validate(legs: Vec<Leg>) -> Result<Self> {
        let first = legs.first().ok_or_else(|| Error::Argument("a path needs at least one leg".into()))?;
        let ambient_n = first.start.ambient_n();
        let mut t = 0.0;
        for (k, leg) in legs.iter().enumerate() {
            if leg.t0 != t || leg.t1 <= leg.t0 {
                return Err(Error::Argument(format!("leg {k} does not continue the time tiling at {t}")));
            }
            t = leg.t1;
            same_spec(&leg.start, &leg.end)?;
            if leg.start.ambient_n() != ambient_n || leg.end.ambient_n() != ambient_n {
                return Err(Error::Argument("legs live in different ambient spaces".into()));
            }
            let rel = Relation::new(leg.start.len(), leg.end.len(), leg.pairs.iter().copied())?;
            if !rel.is_complete() {
                return Err(Error::Argument(format!("leg {k} relation is not complete")));
            }
            if rel.len() > ambient_n {
                return Err(Error::Capacity { size: rel.len(), capacity: ambient_n });
            }
            if k > 0 && !legs[k - 1].end.same_points(&leg.start) {
                return Err(Error::Argument(format!("legs {} and {k} do not meet", k - 1)));
            }
        }
        if t != 1.0 {
            return Err(Error::Argument("legs do not end at t = 1".into()));
        }
        Ok(Self { legs, ambient_n })
    }
}

impl<'de> Deserialize<'de> for QuasiPath {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            legs: Vec<Leg>,
        }
        let raw = Raw::deserialize(d)?;
        QuasiPath::validate(raw.legs).map_err(serde::de::Error::custom)
    }
}

fn single_leg(x: &FSet, y: &FSet, rel: &Relation, ambient_n: usize) -> Result<QuasiPath> {
    same_spec(x, y)?;
    if rel.nx() != x.len() || rel.ny() != y.len() {
        return Err(Error::Argument("relation sizes do not match the endpoint sets".into()));
    }
    if !rel.is_complete() {
        return Err(Error::Argument("path relation must be complete".into()));
    }
    if rel.len() > ambient_n {
        return Err(Error::Capacity { size: rel.len(), capacity: ambient_n });
    }
    let leg = Leg {
        t0: 0.0,
        t1: 1.0,
        pairs: rel.pairs().iter().copied().collect(),
        start: x.with_ambient(ambient_n)?,
        end: y.with_ambient(ambient_n)?,
    };
    Ok(QuasiPath { legs: vec![leg], ambient_n })
}

/// Path tracking the segments `a -> b` for every `(a, b)` in `rel`.
pub fn path_from_relation(x: &FSet, y: &FSet, rel: &Relation) -> Result<QuasiPath> {
    single_leg(x, y, rel, x.ambient_n().max(y.ambient_n()))
}

fn constant_path(x: &FSet) -> QuasiPath {
    let leg = Leg {
        t0: 0.0,
        t1: 1.0,
        pairs: (0..x.len()).map(|i| (i, i)).collect(),
        start: x.clone(),
        end: x.clone(),
    };
    QuasiPath { legs: vec![leg], ambient_n: x.ambient_n() }
}

fn index_in(z: &FSet, p: &Point) -> usize {
    z.position(p).expect("midpoint set contains every selected point")
}

/// The midpoint set `z = x'' ∪ y'` of the reduced proximal relation, with
/// the relations `x -> z` and `z -> y`.
pub fn midpoint_set(x: &FSet, y: &FSet) -> Result<(FSet, Relation, Relation)> {
    same_spec(x, y)?;
    if x.ambient_n() != y.ambient_n() {
        return Err(Error::Argument(format!(
            "endpoints live in X({}) and X({})",
            x.ambient_n(),
            y.ambient_n()
        )));
    }
    let d = proximal_relation(x, y)?.reduce()?.decompose()?;
    let mut pts: Vec<Point> = d.x_double_prime.iter().map(|&i| x.points()[i].clone()).collect();
    pts.extend(d.y_prime.iter().map(|&j| y.points()[j].clone()));
    let z = FSet::new(pts, x.ambient_n(), *x.spec())?;
    let xp = x.points();
    let yp = y.points();
    let r1 = d
        .f
        .iter()
        .map(|(&a, &b)| (a, index_in(&z, &yp[b])))
        .chain(d.x_double_prime.iter().map(|&c| (c, index_in(&z, &xp[c]))));
    let r1 = Relation::new(x.len(), z.len(), r1)?;
    let r2 = d
        .y_prime
        .iter()
        .map(|&c| (index_in(&z, &yp[c]), c))
        .chain(d.g.iter().map(|(&b, &a)| (index_in(&z, &xp[a]), b)));
    let r2 = Relation::new(z.len(), y.len(), r2)?;
    Ok((z, r1, r2))
}

/// A 2-quasigeodesic from `x` to `y` inside their common `X(n)`, passing
/// through the midpoint set at `t = 1/2`.
pub fn quasigeodesic(x: &FSet, y: &FSet) -> Result<QuasiPath> {
    if x.same_points(y) {
        same_spec(x, y)?;
        return Ok(constant_path(x));
    }
    let (z, r1, r2) = midpoint_set(x, y)?;
    let n = x.ambient_n();
    if z.same_points(x) {
        let r2 = Relation::new(x.len(), y.len(), r2.pairs().iter().map(|&(c, b)| (index_in(x, &z.points()[c]), b)))?;
        return single_leg(x, y, &r2, n);
    }
    if z.same_points(y) {
        let r1 = Relation::new(x.len(), y.len(), r1.pairs().iter().map(|&(a, c)| (a, index_in(y, &z.points()[c]))))?;
        return single_leg(x, y, &r1, n);
    }
    let first = Leg { t0: 0.0, t1: 0.5, pairs: r1.pairs().iter().copied().collect(), start: x.clone(), end: z.clone() };
    let second = Leg { t0: 0.5, t1: 1.0, pairs: r2.pairs().iter().copied().collect(), start: z, end: y.clone() };
    Ok(QuasiPath { legs: vec![first, second], ambient_n: n })
}

/// The geodesic along the reduced proximal relation, living in `X(N)` with
/// `N = max(|x|, |y|, |x| + |y| - 2)`.
pub fn geodesic_in_larger(x: &FSet, y: &FSet) -> Result<QuasiPath> {
    same_spec(x, y)?;
    let big = x.len().max(y.len()).max(x.len() + y.len() - 2);
    let xs = x.with_ambient(big)?;
    let ys = y.with_ambient(big)?;
    if xs.same_points(&ys) {
        return Ok(constant_path(&xs));
    }
    let rel = proximal_relation(&xs, &ys)?.reduce()?;
    single_leg(&xs, &ys, &rel, big)
}

/// Sum of `d_H` between consecutive evaluations at `k / intervals`.
pub fn path_length(path: &QuasiPath, intervals: usize) -> Result<f64> {
    if intervals < 2 {
        return Err(Error::Argument("path_length needs at least 2 grid intervals".into()));
    }
    let mut prev = path.eval(0.0)?;
    let mut total = 0.0;
    for k in 1..=intervals {
        let t = if k == intervals { 1.0 } else { k as f64 / intervals as f64 };
        let cur = path.eval(t)?;
        total += hausdorff(&prev, &cur)?;
        prev = cur;
    }
    Ok(total)
}

fn spaced_values(n: usize, m: f64) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0, m - 1.0];
    x.extend((3..=n).map(|i| (i as f64 - 2.0) * m + 1.0));
    let mut y = vec![-1.0, 1.0, m];
    y.extend((4..=n).map(|i| (i as f64 - 2.0) * m + 2.0));
    (x, y)
}

fn check_spaced_args(n: usize, m: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::Argument(format!("spaced pairs need n >= 3, got {n}")));
    }
    if !(m > 3.0) || !m.is_finite() {
        return Err(Error::Argument(format!("spaced pairs need m > 3, got {m}")));
    }
    Ok(())
}

/// A pair in `X(n)` at Hausdorff distance 1 whose every midpoint candidate
/// stays at distance at least 1 from one endpoint, placed on the line
/// spanned by a unit `direction`.
pub fn spaced_pair(n: usize, m: f64, direction: &Point, spec: NormSpec) -> Result<(FSet, FSet)> {
    check_spaced_args(n, m)?;
    spec.check_dim(direction)?;
    let len = spec.norm_of(direction);
    if (len - 1.0).abs() > 1e-12 {
        return Err(Error::Argument(format!("direction has norm {len}, expected 1")));
    }
    let (xv, yv) = spaced_values(n, m);
    let place = |v: &[f64]| FSet::new(v.iter().map(|&s| direction.scale(s)).collect(), n, spec);
    Ok((place(&xv)?, place(&yv)?))
}

/// A group of endpoint values on the spaced line together with the number
/// of points any `z` closer than 1 to both endpoints must put within
/// distance 1 of the group.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub values: Vec<f64>,
    pub quota: usize,
}

/// The windows of `spaced_pair(n, m, ..)`; their quotas sum to `n + 1`.
pub fn spaced_windows(n: usize, m: f64) -> Result<Vec<Window>> {
    check_spaced_args(n, m)?;
    let mut w = vec![
        Window { values: vec![-1.0, 0.0, 1.0], quota: 2 },
        Window { values: vec![m - 1.0, m, m + 1.0], quota: 2 },
    ];
    for k in 3..n {
        let base = (k as f64 - 1.0) * m;
        w.push(Window { values: vec![base + 1.0, base + 2.0], quota: 1 });
    }
    Ok(w)
}

/// Number of points of `z` within distance `< radius` of each window
/// (values placed along `direction`).
pub fn window_counts(z: &FSet, windows: &[Window], direction: &Point, radius: f64) -> Vec<usize> {
    let spec = z.spec();
    windows
        .iter()
        .map(|w| {
            z.points()
                .iter()
                .filter(|p| w.values.iter().any(|&v| spec.dist(p, &direction.scale(v)) < radius))
                .count()
        })
        .collect()
}
