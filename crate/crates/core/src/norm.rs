//! Vectors of `R^d` under `p`-norms, norming functionals and the semi-inner
//! products `<x, y>_-` / `<x, y>_+`.
//!
//! For `1 < p < inf` the norm is smooth away from the origin, every nonzero
//! `y` has exactly one norming functional and both semi-inner products agree.
//! For `p = 1` and `p = inf` the duality set of `y` is a face of a cube; the
//! semi-inner products are then the infimum and supremum of a linear function
//! over that face, which we evaluate on its extreme points.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Deref, Index};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The exponent and dimension of the ambient space `(R^d, |.|_p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec {
    p: f64,
    dim: usize,
}

impl NormSpec {
    pub fn new(p: f64, dim: usize) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Argument(format!("norm exponent must be >= 1, got {p}")));
        }
        if dim == 0 {
            return Err(Error::Argument("dimension must be positive".into()));
        }
        Ok(Self { p, dim })
    }

    /// Euclidean space of the given dimension.
    pub fn euclidean(dim: usize) -> Self {
        Self { p: 2.0, dim: dim.max(1) }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_inf(&self) -> bool {
        self.p.is_infinite()
    }

    /// True when the norm is smooth and strictly convex (`1 < p < inf`).
    pub fn is_smooth(&self) -> bool {
        self.p > 1.0 && self.p.is_finite()
    }

    /// Conjugate exponent `q` with `1/p + 1/q = 1`.
    pub fn dual_exponent(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else if self.p.is_infinite() {
            1.0
        } else {
            self.p / (self.p - 1.0)
        }
    }

    pub fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        Ok(())
    }

    /// The norm of `v`, without a dimension check.
    pub fn norm_of(&self, v: &[f64]) -> f64 {
        p_norm(v, self.p)
    }

    /// Norm of the dual space, `|f|_q`.
    pub fn dual_norm_of(&self, f: &[f64]) -> f64 {
        p_norm(f, self.dual_exponent())
    }

    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        let p = self.p;
        if p == 2.0 {
            // hypot-style scaling is unnecessary at the magnitudes we handle
            return a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        }
        if p == 1.0 {
            return a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
        }
        if p.is_infinite() {
            return a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        }
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        p_norm(&diff, p)
    }
}

fn p_norm(v: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        return v.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    if p == 1.0 {
        return v.iter().map(|x| x.abs()).sum();
    }
    let m = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if p.is_infinite() || m == 0.0 {
        return m;
    }
    // scale by the largest coordinate so |v_i / m|^p never overflows
    let s: f64 = v.iter().map(|x| (x.abs() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_infinite() {
            write!(f, "l_inf^{}", self.dim)
        } else {
            write!(f, "l_{}^{}", self.p, self.dim)
        }
    }
}

/// JSON representation of a norm exponent: a number, or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(Exponent(p)),
            Raw::Str(s) => match s.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" => Ok(Exponent(f64::INFINITY)),
                other => other
                    .parse::<f64>()
                    .map(Exponent)
                    .map_err(|_| serde::de::Error::custom(format!("bad norm exponent `{s}`"))),
            },
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" => Ok(Exponent(f64::INFINITY)),
            other => other
                .parse::<f64>()
                .map(Exponent)
                .map_err(|_| Error::Argument(format!("bad norm exponent `{s}`"))),
        }
    }
}

/// A point of `R^d`. Coordinates are always finite.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Argument("a point needs at least one coordinate".into()));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite coordinate {c}")));
        }
        // fold -0.0 into +0.0 so exact equality and ordering agree
        Ok(Self(coords.into_iter().map(|c| c + 0.0).collect()))
    }

    /// Constructor for values produced by arithmetic on valid points.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Self(coords.into_iter().map(|c| c + 0.0).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// Unit vector along coordinate `axis`.
    pub fn basis(dim: usize, axis: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn add(&self, other: &Point) -> Point {
        Point::from_raw(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point::from_raw(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, t: f64) -> Point {
        Point::from_raw(self.0.iter().map(|a| t * a).collect())
    }

    /// `(1 - s) a + s b`; returns `a` at `s = 0` and `b` at `s = 1` exactly.
    pub fn lerp(&self, other: &Point, s: f64) -> Point {
        if s == 0.0 {
            return self.clone();
        }
        if s == 1.0 {
            return other.clone();
        }
        Point::from_raw(self.0.iter().zip(&other.0).map(|(a, b)| (1.0 - s) * a + s * b).collect())
    }

    /// Euclidean inner product of coordinates.
    pub fn dot(&self, other: &Point) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Lexicographic order on coordinates.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.0.len().cmp(&other.0.len())
    }

    pub fn mean<'a, I: IntoIterator<Item = &'a Point>>(points: I) -> Option<Point> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut acc = first.0.clone();
        let mut count = 1usize;
        for p in it {
            for (a, b) in acc.iter_mut().zip(&p.0) {
                *a += b;
            }
            count += 1;
        }
        let inv = count as f64;
        Some(Point::from_raw(acc.into_iter().map(|a| a / inv).collect()))
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        Point::new(coords).map_err(serde::de::Error::custom)
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<f64> for Point {
    /// A point of the real line.
    fn from(x: f64) -> Self {
        Point::from_raw(vec![x])
    }
}

/// A linear functional on `R^d`, acting by the standard pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Functional(Vec<f64>);

impl Functional {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite functional coefficient".into()));
        }
        Ok(Self(coeffs))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn apply(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// Which one-sided semi-inner product to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

pub fn norm(v: &Point, spec: &NormSpec) -> Result<f64> {
    spec.check_dim(v)?;
    Ok(spec.norm_of(v))
}

/// The norming functional `z*` of `y` scaled so that `|z*| = |y|` and
/// `z*(y) = |y|^2`. Only defined where it is unique, `1 < p < inf`.
pub fn norming_functional(y: &Point, spec: &NormSpec) -> Result<Functional> {
    spec.check_dim(y)?;
    if !spec.is_smooth() {
        return Err(Error::NonUniqueFunctional(spec.p()));
    }
    if y.is_zero() {
        return Err(Error::Domain("the zero vector has no unique norming functional".into()));
    }
    Ok(Functional(smooth_functional(y, spec)))
}

fn smooth_functional(y: &[f64], spec: &NormSpec) -> Vec<f64> {
    let p = spec.p();
    let ny = spec.norm_of(y);
    // f_i = sign(y_i) |y_i|^(p-1) |y|^(2-p), written with |y_i|/|y| <= 1
    y.iter()
        .map(|&yi| {
            if yi == 0.0 {
                0.0
            } else {
                yi.signum() * ny * (yi.abs() / ny).powf(p - 1.0)
            }
        })
        .collect()
}

/// Semi-inner product `<x, y>_-` or `<x, y>_+`: the infimum (supremum) of
/// `<x, z*>` over the norming functionals `z*` of `y`.
pub fn semi_inner(x: &Point, y: &Point, side: Side, spec: &NormSpec) -> Result<f64> {
    spec.check_dim(x)?;
    spec.check_dim(y)?;
    if y.is_zero() {
        return Err(Error::Domain("semi-inner product against the zero vector".into()));
    }
    Ok(semi_inner_unchecked(x, y, side, spec))
}

pub(crate) fn semi_inner_unchecked(x: &[f64], y: &[f64], side: Side, spec: &NormSpec) -> f64 {
    let ny = spec.norm_of(y);
    if spec.is_smooth() {
        let f = smooth_functional(y, spec);
        return f.iter().zip(x).map(|(a, b)| a * b).sum();
    }
    if spec.p() == 1.0 {
        // extreme functionals: |y| sign(y_i) on the support, +-|y| elsewhere
        let mut fixed = 0.0;
        let mut free = 0.0;
        for (&xi, &yi) in x.iter().zip(y) {
            if yi == 0.0 {
                free += xi.abs();
            } else {
                fixed += yi.signum() * xi;
            }
        }
        return match side {
            Side::Minus => ny * (fixed - free),
            Side::Plus => ny * (fixed + free),
        };
    }
    // p = inf: the duality set is |y| conv{ sign(y_i) e_i : |y_i| = |y| }
    let vals = y
        .iter()
        .zip(x)
        .filter(|(yi, _)| yi.abs() == ny)
        .map(|(yi, xi)| yi.signum() * xi);
    let extreme = match side {
        Side::Minus => vals.fold(f64::INFINITY, f64::min),
        Side::Plus => vals.fold(f64::NEG_INFINITY, f64::max),
    };
    ny * extreme
}

/// Radial projection `x / |x|`.
pub fn radial(x: &Point, spec: &NormSpec) -> Result<Point> {
    spec.check_dim(x)?;
    if x.is_zero() {
        return Err(Error::Domain("radial projection of the zero vector".into()));
    }
    let n = spec.norm_of(x);
    Ok(Point::from_raw(x.iter().map(|c| c / n).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn spec(p: f64, d: usize) -> NormSpec {
        NormSpec::new(p, d).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(&pt(&[3.0, 4.0]), &spec(2.0, 2)).unwrap(), 5.0);
        assert_eq!(norm(&pt(&[1.0, -1.0]), &spec(1.0, 2)).unwrap(), 2.0);
        assert_eq!(norm(&pt(&[1.0, -2.0]), &spec(f64::INFINITY, 2)).unwrap(), 2.0);
        assert_eq!(norm(&pt(&[0.0, 0.0]), &spec(3.0, 2)).unwrap(), 0.0);
    }

    #[test]
    fn norm_rejects_wrong_dimension() {
        let err = norm(&pt(&[1.0, 2.0, 3.0]), &spec(2.0, 2)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, got: 3 }));
    }

    #[test]
    fn large_p_does_not_overflow() {
        let s = spec(400.0, 2);
        let n = s.norm_of(&[1e10, 1e10]);
        assert!((n - 1e10 * 2f64.powf(1.0 / 400.0)).abs() < 1e-3);
    }

    #[test]
    fn spec_validation() {
        assert!(NormSpec::new(0.5, 2).is_err());
        assert!(NormSpec::new(f64::NAN, 2).is_err());
        assert!(NormSpec::new(2.0, 0).is_err());
        assert!(NormSpec::new(f64::INFINITY, 3).is_ok());
    }

    #[test]
    fn point_rejects_non_finite() {
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
        assert!(Point::new(vec![]).is_err());
    }

    #[test]
    fn norming_functional_examples() {
        let f = norming_functional(&pt(&[3.0, 4.0]), &spec(2.0, 2)).unwrap();
        assert!((f.coeffs()[0] - 3.0).abs() < 1e-14 && (f.coeffs()[1] - 4.0).abs() < 1e-14);

        let s4 = spec(4.0, 2);
        let f = norming_functional(&pt(&[1.0, 0.0]), &s4).unwrap();
        assert_eq!(f.coeffs(), &[1.0, 0.0]);
        assert!((f.apply(&[1.0, 0.0]) - 1.0).abs() < 1e-12);
    }

    /// Maximizes <y, u> over the planar dual sphere |u|_q = |y|_p by a dense
    /// angular scan followed by local refinement; the maximizer is the
    /// norming functional.
    fn dual_sphere_oracle(y: &[f64], spec: &NormSpec) -> Vec<f64> {
        let q = spec.dual_exponent();
        let target = spec.norm_of(y);
        let on_sphere = |theta: f64| {
            let u = [theta.cos(), theta.sin()];
            let n = p_norm(&u, q);
            [target * u[0] / n, target * u[1] / n]
        };
        let value = |theta: f64| {
            let u = on_sphere(theta);
            u[0] * y[0] + u[1] * y[1]
        };
        let mut best = 0.0;
        let steps = 100_000;
        for k in 0..steps {
            let th = std::f64::consts::TAU * k as f64 / steps as f64;
            if value(th) > value(best) {
                best = th;
            }
        }
        let mut width = std::f64::consts::TAU / steps as f64;
        for _ in 0..200 {
            for cand in [best - width, best + width] {
                if value(cand) > value(best) {
                    best = cand;
                }
            }
            width *= 0.7;
        }
        on_sphere(best).to_vec()
    }

    #[test]
    fn norming_functional_matches_dual_sphere_scan() {
        for (p, y) in [(4.0, [1.0, 1.0]), (4.0, [1.0, -2.5]), (1.5, [0.3, 2.0])] {
            let s = spec(p, 2);
            let y = pt(&y);
            let f = norming_functional(&y, &s).unwrap();
            let oracle = dual_sphere_oracle(&y, &s);
            for (a, b) in f.coeffs().iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-6, "p={p}: {a} vs {b}");
            }
            let ny = s.norm_of(&y);
            assert!((s.dual_norm_of(f.coeffs()) - ny).abs() <= 1e-12 * ny);
            assert!((f.apply(&y) - ny * ny).abs() <= 1e-12 * ny * ny);
        }
    }

    #[test]
    fn norming_functional_errors() {
        assert!(matches!(
            norming_functional(&pt(&[0.0, 0.0]), &spec(3.0, 2)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            norming_functional(&pt(&[1.0, 0.0]), &spec(1.0, 2)),
            Err(Error::NonUniqueFunctional(_))
        ));
        assert!(matches!(
            norming_functional(&pt(&[1.0, 0.0]), &spec(f64::INFINITY, 2)),
            Err(Error::NonUniqueFunctional(_))
        ));
    }

    fn quotient(x: &[f64], y: &[f64], h: f64, s: &NormSpec) -> f64 {
        let shifted: Vec<f64> = y.iter().zip(x).map(|(a, b)| a + h * b).collect();
        s.norm_of(y) * (s.norm_of(&shifted) - s.norm_of(y)) / h
    }

    #[test]
    fn semi_inner_examples() {
        for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            let s = spec(p, 2);
            let y = pt(&[2.0, 0.0]);
            for side in [Side::Minus, Side::Plus] {
                assert!((semi_inner(&y, &y, side, &s).unwrap() - 4.0).abs() < 1e-12);
            }
        }
        let s1 = spec(1.0, 2);
        let (x, y) = (pt(&[0.0, 1.0]), pt(&[1.0, 0.0]));
        let minus = semi_inner(&x, &y, Side::Minus, &s1).unwrap();
        let plus = semi_inner(&x, &y, Side::Plus, &s1).unwrap();
        assert_eq!((minus, plus), (-1.0, 1.0));
        assert!((quotient(&x, &y, -1e-7, &s1) - minus).abs() < 1e-6);
        assert!((quotient(&x, &y, 1e-7, &s1) - plus).abs() < 1e-6);

        let s2 = spec(2.0, 2);
        let (x, y) = (pt(&[1.0, 2.0]), pt(&[3.0, 4.0]));
        for side in [Side::Minus, Side::Plus] {
            assert!((semi_inner(&x, &y, side, &s2).unwrap() - 11.0).abs() < 1e-12);
        }
    }

    #[test]
    fn semi_inner_inf_norm_ties() {
        let s = spec(f64::INFINITY, 2);
        let (x, y) = (pt(&[1.0, -3.0]), pt(&[2.0, 2.0]));
        assert_eq!(semi_inner(&x, &y, Side::Minus, &s).unwrap(), -6.0);
        assert_eq!(semi_inner(&x, &y, Side::Plus, &s).unwrap(), 2.0);
        assert!((quotient(&x, &y, -1e-7, &s) + 6.0).abs() < 1e-5);
        assert!((quotient(&x, &y, 1e-7, &s) - 2.0).abs() < 1e-5);
    }

    #[test]
    fn semi_inner_rejects_zero() {
        let s = spec(2.0, 2);
        assert!(matches!(
            semi_inner(&pt(&[1.0, 1.0]), &pt(&[0.0, 0.0]), Side::Plus, &s),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn radial_examples() {
        let s2 = spec(2.0, 2);
        assert_eq!(radial(&pt(&[0.0, 5.0]), &s2).unwrap().coords(), &[0.0, 1.0]);
        let r = radial(&pt(&[3.0, 4.0]), &s2).unwrap();
        assert!((r[0] - 0.6).abs() < 1e-15 && (r[1] - 0.8).abs() < 1e-15);
        let si = spec(f64::INFINITY, 2);
        assert_eq!(radial(&pt(&[1.0, 1.0]), &si).unwrap().coords(), &[1.0, 1.0]);
        assert!(radial(&pt(&[0.0, 0.0]), &s2).is_err());
    }

    #[test]
    fn exponent_json() {
        let e: Exponent = serde_json::from_str("\"inf\"").unwrap();
        assert!(e.0.is_infinite());
        let e: Exponent = serde_json::from_str("1.5").unwrap();
        assert_eq!(e.0, 1.5);
        assert_eq!(serde_json::to_string(&Exponent(f64::INFINITY)).unwrap(), "\"inf\"");
        assert!(serde_json::from_str::<Exponent>("\"banana\"").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn exponent() -> impl Strategy<Value = f64> {
            prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(4.0), Just(f64::INFINITY)]
        }

        fn vec3() -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(-2.0f64..2.0, 3)
        }

        proptest! {
            #[test]
            fn one_sided_derivatives(p in exponent(), x in vec3(), y in vec3()) {
                let s = spec(p, 3);
                prop_assume!(s.norm_of(&y) > 1e-3);
                prop_assume!(y.iter().all(|c| c.abs() > 1e-4));
                let (xp, yp) = (pt(&x), pt(&y));
                let minus = semi_inner(&xp, &yp, Side::Minus, &s).unwrap();
                let plus = semi_inner(&xp, &yp, Side::Plus, &s).unwrap();
                prop_assert!(minus <= plus + 1e-12);
                if s.is_smooth() {
                    prop_assert!((minus - plus).abs() < 1e-12);
                }
                prop_assert!((quotient(&x, &y, -1e-7, &s) - minus).abs() < 1e-5);
                prop_assert!((quotient(&x, &y, 1e-7, &s) - plus).abs() < 1e-5);
                let bound = s.norm_of(&x) * s.norm_of(&y) + 1e-12;
                prop_assert!(minus.abs() <= bound && plus.abs() <= bound);
            }

            #[test]
            fn radial_semi_monotone(p in exponent(), x in vec3(), y in vec3()) {
                let s = spec(p, 3);
                prop_assume!(s.norm_of(&x) > 1e-6 && s.norm_of(&y) > 1e-6);
                let (xp, yp) = (pt(&x), pt(&y));
                prop_assume!(xp != yp);
                let (rx, ry) = (radial(&xp, &s).unwrap(), radial(&yp, &s).unwrap());
                let d = xp.sub(&yp);
                let v = semi_inner(&rx.sub(&ry), &d, Side::Minus, &s).unwrap();
                prop_assert!(v >= -1e-9);
                let lhs = s.dist(&rx, &ry);
                let rhs = 2.0 * s.dist(&xp, &yp) / s.norm_of(&x).max(s.norm_of(&y));
                prop_assert!(lhs <= rhs + 1e-12);
                prop_assert!((s.norm_of(&rx) - 1.0).abs() < 1e-14);
            }
        }
    }
}
