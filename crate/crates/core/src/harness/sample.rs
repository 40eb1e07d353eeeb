//! Deterministic stratified samplers. Every sample draws from its own
//! generator seeded by `(seed, index, stream)`, so results do not depend on
//! evaluation order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::fset::{diam, hausdorff, min_sep, FSet};
use crate::norm::{NormSpec, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stratum {
    /// Uniform points in the box.
    Generic,
    /// Two clusters whose spread sits in the switching strip of the
    /// partition of unity used by the retraction of that cardinality.
    NearX2,
    /// Minimum separation at most a third of the diameter (a singleton
    /// when `n = 2`).
    Thin,
    /// Two tight, well separated clusters.
    Clustered,
}

impl Stratum {
    pub const ALL: [Stratum; 4] = [Stratum::Generic, Stratum::NearX2, Stratum::Thin, Stratum::Clustered];

    pub fn name(&self) -> &'static str {
        match self {
            Stratum::Generic => "generic",
            Stratum::NearX2 => "near_x2",
            Stratum::Thin => "thin",
            Stratum::Clustered => "clustered",
        }
    }
}

impl std::str::FromStr for Stratum {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        Stratum::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| crate::error::Error::Argument(format!("unknown stratum `{s}`")))
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for sample `index` of logical stream `stream`.
pub fn sample_rng(seed: u64, index: u64, stream: u64) -> ChaCha8Rng {
    let s = splitmix(splitmix(seed ^ splitmix(stream)).wrapping_add(index));
    ChaCha8Rng::seed_from_u64(s)
}

fn uniform_point(rng: &mut ChaCha8Rng, dim: usize, half: f64) -> Point {
    Point::from_raw((0..dim).map(|_| rng.gen_range(-half..=half)).collect())
}

/// A vector of norm exactly `len` (up to roundoff) in a random direction.
fn vector_of_norm(rng: &mut ChaCha8Rng, spec: &NormSpec, len: f64) -> Point {
    loop {
        let v = uniform_point(rng, spec.dim(), 1.0);
        let nv = spec.norm_of(&v);
        if nv > 1e-6 {
            return v.scale(len / nv);
        }
    }
}

/// A point within norm `radius` of the origin.
fn point_in_ball(rng: &mut ChaCha8Rng, spec: &NormSpec, radius: f64) -> Point {
    let r = radius * rng.gen::<f64>();
    vector_of_norm(rng, spec, r)
}

fn build(points: Vec<Point>, cfg: &RunConfig) -> Option<FSet> {
    FSet::new(points, cfg.n, cfg.spec()).ok()
}

fn generic(rng: &mut ChaCha8Rng, cfg: &RunConfig) -> Vec<Point> {
    (0..cfg.n).map(|_| uniform_point(rng, cfg.dim, cfg.scale)).collect()
}

/// Two clusters at distance `gap` with cluster radius `radius`; the first
/// cluster gets an antipodal pair so its radius is attained.
fn two_clusters(rng: &mut ChaCha8Rng, cfg: &RunConfig, gap: f64, radius: f64) -> Vec<Point> {
    let spec = cfg.spec();
    let a = uniform_point(rng, cfg.dim, 0.5 * cfg.scale);
    let b = a.add(&vector_of_norm(rng, &spec, gap));
    let n = cfg.n;
    if n == 1 {
        return vec![a];
    }
    let k_a = if n >= 3 { rng.gen_range(2..n) } else { 1 };
    let mut pts = Vec::with_capacity(n);
    if k_a >= 2 {
        let w = vector_of_norm(rng, &spec, radius);
        pts.push(a.add(&w));
        pts.push(a.sub(&w));
        for _ in 2..k_a {
            pts.push(a.add(&point_in_ball(rng, &spec, 0.5 * radius)));
        }
    } else {
        pts.push(a.add(&point_in_ball(rng, &spec, radius)));
    }
    for _ in k_a..n {
        pts.push(b.add(&point_in_ball(rng, &spec, radius)));
    }
    pts
}

/// Bounds on `radius / diameter` that the near-boundary stratum targets.
pub fn near_boundary_band(n: usize, tau: f64) -> (f64, f64) {
    if n <= 3 {
        // half of the three-point switching band for the separation
        (0.1, 0.125)
    } else {
        (1.0 / (3.0 * tau), 1.0 / (2.0 * tau))
    }
}

fn attempt(rng: &mut ChaCha8Rng, cfg: &RunConfig, stratum: Stratum) -> Option<FSet> {
    let spec = cfg.spec();
    match stratum {
        Stratum::Generic => build(generic(rng, cfg), cfg),
        Stratum::Clustered => {
            let gap = cfg.scale * rng.gen_range(0.5..1.0);
            let radius = cfg.scale / (cfg.tau * cfg.tau) * rng.gen_range(0.05..1.0);
            let x = build(two_clusters(rng, cfg, gap, radius), cfg)?;
            (crate::two_center::dist_to_x2(&x).radius < diam(&x) / cfg.tau).then_some(x)
        }
        Stratum::NearX2 => {
            let (lo, hi) = near_boundary_band(cfg.n, cfg.tau);
            let ratio = rng.gen_range(0.8 * lo..1.2 * hi);
            let gap = cfg.scale * rng.gen_range(0.5..1.0);
            // diam is about gap + 2 * radius
            let radius = ratio * gap / (1.0 - 2.0 * ratio);
            build(two_clusters(rng, cfg, gap, radius), cfg)
        }
        Stratum::Thin => {
            let mut pts = generic(rng, cfg);
            if pts.len() == 2 {
                // two distinct points are never thin
                pts[1] = pts[0].clone();
            } else if pts.len() > 2 {
                let x = build(pts.clone(), cfg)?;
                let d = diam(&x);
                let len = d * rng.gen_range(0.0..0.34);
                pts[1] = pts[0].add(&vector_of_norm(rng, &spec, len));
            }
            let x = build(pts, cfg)?;
            (min_sep(&x) <= diam(&x) / 3.0 + 1e-12).then_some(x)
        }
    }
}

const MAX_ATTEMPTS: usize = 1000;

/// Sample `index` of a stratum; deterministic per `(cfg.seed, index)`.
pub fn sample_fset(cfg: &RunConfig, stratum: Stratum, index: u64) -> FSet {
    let mut rng = sample_rng(cfg.seed, index, stratum as u64 + 1);
    for _ in 0..MAX_ATTEMPTS {
        if let Some(x) = attempt(&mut rng, cfg, stratum) {
            return x;
        }
    }
    panic!("sampler for stratum {} failed {MAX_ATTEMPTS} times", stratum.name())
}

/// Stratum of pair `index` under the 40/30/20/10 mix.
pub fn pair_stratum(rng: &mut ChaCha8Rng) -> Stratum {
    let u: f64 = rng.gen();
    if u < 0.4 {
        Stratum::Generic
    } else if u < 0.7 {
        Stratum::Clustered
    } else if u < 0.9 {
        Stratum::Thin
    } else {
        Stratum::NearX2
    }
}

/// A perturbation of `x` in which every point moves by at most `amp`.
pub fn perturb(rng: &mut ChaCha8Rng, x: &FSet, amp: f64) -> FSet {
    let spec = *x.spec();
    let pts = x.points().iter().map(|p| p.add(&point_in_ball(rng, &spec, amp))).collect();
    FSet::new(pts, x.ambient_n(), spec).expect("perturbation keeps the cardinality bound")
}

/// Pair `index`: both sets from the same stratum; half the pairs are
/// independent, the other half small perturbations with amplitude
/// log-uniform in `[1e-6, 1e-1] * scale`.
pub fn sample_pair(cfg: &RunConfig, index: u64) -> (FSet, FSet, Stratum) {
    let mut rng = sample_rng(cfg.seed, index, 0);
    let stratum = pair_stratum(&mut rng);
    let x = sample_fset(cfg, stratum, 2 * index);
    let y = if rng.gen::<bool>() {
        sample_fset(cfg, stratum, 2 * index + 1)
    } else {
        let amp = cfg.scale * 10f64.powf(rng.gen_range(-6.0..-1.0));
        perturb(&mut rng, &x, amp)
    };
    (x, y, stratum)
}

/// Pair `index` with `d_H` forced into `[lo, hi]` by resampling; `y`
/// perturbs `x` with log-uniform amplitude in the same range.
pub fn sample_pair_in_range(cfg: &RunConfig, index: u64, lo: f64, hi: f64) -> (FSet, FSet, Stratum) {
    let mut rng = sample_rng(cfg.seed, index, 7);
    for attempt_no in 0..MAX_ATTEMPTS as u64 {
        let stratum = pair_stratum(&mut rng);
        let x = sample_fset(cfg, stratum, index * MAX_ATTEMPTS as u64 + attempt_no);
        let amp = 10f64.powf(rng.gen_range(lo.log10()..=hi.log10()));
        let y = perturb(&mut rng, &x, amp);
        let d = hausdorff(&x, &y).expect("same spec");
        if (lo..=hi).contains(&d) {
            return (x, y, stratum);
        }
    }
    panic!("could not draw a pair with Hausdorff distance in [{lo}, {hi}]")
}
