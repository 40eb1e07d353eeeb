//! Steiner-point selector `X(n) -> X`: an affine, Hausdorff-Lipschitz
//! choice of a point in the convex hull of a finite set.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fset::FSet;
use crate::hull::project_to_hull;
use crate::norm::{NormSpec, Point};

pub const MIN_SPHERE_SAMPLES: usize = 1000;

/// Quadrature settings. Directions come in antipodal pairs, so an odd
/// sample count is rounded up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectorConfig {
    pub sphere_samples: usize,
    pub seed: u64,
}

impl SelectorConfig {
    pub fn new(sphere_samples: usize, seed: u64) -> Result<Self> {
        let cfg = Self { sphere_samples, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sphere_samples < MIN_SPHERE_SAMPLES {
            return Err(Error::Argument(format!(
                "sphere_samples must be at least {MIN_SPHERE_SAMPLES}, got {}",
                self.sphere_samples
            )));
        }
        Ok(())
    }
}

impl Default for SelectorConfig {
    fn default() -> Self {
        Self { sphere_samples: 2048, seed: 0 }
    }
}

type DirectionKey = (usize, usize, u64);

fn cache() -> &'static Mutex<HashMap<DirectionKey, Arc<Vec<Point>>>> {
    static CACHE: OnceLock<Mutex<HashMap<DirectionKey, Arc<Vec<Point>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The shared antithetic direction set for a dimension and config: the
/// first half are low-discrepancy unit vectors, the second half their
/// exact negations.
pub fn directions(dim: usize, cfg: &SelectorConfig) -> Arc<Vec<Point>> {
    let key = (dim, cfg.sphere_samples, cfg.seed);
    if let Some(d) = cache().lock().unwrap().get(&key) {
        return d.clone();
    }
    let half = cfg.sphere_samples.div_ceil(2);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut dirs: Vec<Point> = match dim {
        1 => vec![Point::from_raw(vec![1.0])],
        2 => {
            let offset: f64 = rng.gen();
            (0..half)
                .map(|k| {
                    let a = PI * (k as f64 + offset) / half as f64;
                    Point::from_raw(vec![a.cos(), a.sin()])
                })
                .collect()
        }
        3 => fibonacci_hemisphere(half, &mut rng),
        _ => halton_sphere(dim, half, &mut rng),
    };
    let negated: Vec<Point> = dirs.iter().map(|u| u.scale(-1.0)).collect();
    dirs.extend(negated);
    let dirs = Arc::new(dirs);
    cache().lock().unwrap().insert(key, dirs.clone());
    dirs
}

/// Fibonacci lattice over the full sphere, rotated by a seed-derived
/// angle; antipodal completion happens in the caller.
fn fibonacci_hemisphere(count: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let golden = PI * (3.0 - 5f64.sqrt());
    let spin: f64 = rng.gen::<f64>() * 2.0 * PI;
    (0..count)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let a = golden * k as f64 + spin;
            Point::from_raw(vec![r * a.cos(), r * a.sin(), z])
        })
        .collect()
}

const PRIMES: [u32; 24] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    out
}

/// Randomly shifted Halton points pushed to the sphere through Box-Muller.
fn halton_sphere(dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let pairs = dim.div_ceil(2);
    assert!(2 * pairs <= PRIMES.len(), "dimension {dim} exceeds the supported Halton bases");
    let shift: Vec<f64> = (0..2 * pairs).map(|_| rng.gen()).collect();
    let mut out = Vec::with_capacity(count);
    let mut i = 1u64;
    while out.len() < count {
        let mut g = Vec::with_capacity(2 * pairs);
        for k in 0..pairs {
            let u1 = (radical_inverse(i, PRIMES[2 * k]) + shift[2 * k]).fract();
            let u2 = (radical_inverse(i, PRIMES[2 * k + 1]) + shift[2 * k + 1]).fract();
            let r = (-2.0 * (1.0 - u1).ln()).sqrt();
            g.push(r * (2.0 * PI * u2).cos());
            g.push(r * (2.0 * PI * u2).sin());
        }
        g.truncate(dim);
        i += 1;
        let len = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len > 1e-12 {
            out.push(Point::from_raw(g.into_iter().map(|v| v / len).collect()));
        }
    }
    out
}

/// Steiner point of `conv(points)` by quadrature of `d * E[h(u) u]`.
pub fn steiner_of_points(points: &[Point], cfg: &SelectorConfig) -> Point {
    assert!(!points.is_empty(), "Steiner point of an empty set");
    if points.len() == 1 {
        return points[0].clone();
    }
    let d = points[0].dim();
    let c = Point::mean(points).expect("nonempty");
    let shifted: Vec<Point> = points.iter().map(|p| p.sub(&c)).collect();
    let dirs = directions(d, cfg);
    let half = dirs.len() / 2;
    let support = |u: &Point| shifted.iter().map(|p| p.dot(u)).fold(f64::NEG_INFINITY, f64::max);
    let mut acc = vec![0.0; d];
    for k in 0..half {
        let u = &dirs[k];
        let w = support(u) - support(&dirs[k + half]);
        for (a, ui) in acc.iter_mut().zip(u.iter()) {
            *a += w * ui;
        }
    }
    let factor = d as f64 / dirs.len() as f64;
    let s = Point::from_raw(acc.into_iter().map(|v| v * factor).collect());
    let candidate = s.add(&c);
    let scale = shifted.iter().map(|p| p.dot(p)).fold(0.0, f64::max).sqrt();
    let projected = project_to_hull(&candidate, points);
    let gap = projected.sub(&candidate);
    if gap.dot(&gap).sqrt() > 1e-12 * scale.max(1.0) {
        projected
    } else {
        candidate
    }
}

pub fn steiner_point(x: &FSet, cfg: &SelectorConfig) -> Point {
    steiner_of_points(x.points(), cfg)
}

/// `x -> {s(x)}` as a map into `X(1)`.
pub fn selector_retraction(x: &FSet, cfg: &SelectorConfig) -> FSet {
    FSet::from_points_unchecked(vec![steiner_point(x, cfg)], 1, *x.spec())
}

/// Support-function lower estimate of `d_H(conv x, conv y)` in the ambient
/// norm: `sup |h_x(f) - h_y(f)|` over directions scaled to the dual unit
/// sphere.
pub fn hull_hausdorff(x: &FSet, y: &FSet, cfg: &SelectorConfig) -> Result<f64> {
    crate::fset::same_spec(x, y)?;
    let spec: &NormSpec = x.spec();
    let dirs = directions(spec.dim(), cfg);
    let h = |s: &FSet, u: &[f64]| {
        s.points().iter().map(|p| p.iter().zip(u).map(|(a, b)| a * b).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max)
    };
    let mut best: f64 = 0.0;
    for u in dirs.iter() {
        let dn = spec.dual_norm_of(u);
        let f: Vec<f64> = u.iter().map(|v| v / dn).collect();
        best = best.max((h(x, &f) - h(y, &f)).abs());
    }
    Ok(best)
}
