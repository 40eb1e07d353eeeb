//! Invariant suites. Each suite runs one property over sampled instances
//! and reduces it to a worst-case statistic.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::estimate::estimate_lipschitz;
use super::maps::MapId;
use super::report::{CheckRecord, Report};
use super::sample::{perturb, sample_fset, sample_pair, sample_rng, Stratum};
use super::{estimate_holder, RunConfig};
use crate::error::{Error, Result};
use crate::flow::{collision_time_bounds, flow_state_at, integrate_to_collision, FlowConfig};
use crate::fset::{diam, hausdorff, min_sep, proximal_bijection, FSet};
use crate::hull::hull_distance;
use crate::norm::{radial, semi_inner, Exponent, NormSpec, Point, Side};
use crate::path::{
    geodesic_in_larger, path_from_relation, path_length, quasigeodesic, spaced_pair, spaced_windows, window_counts,
    QuasiPath,
};
use crate::relation::{proximal_relation, Relation};
use crate::retract::{
    avg, homogeneous_extend_at, interp3, interp_n, merge_closest_pair, r2, r3, rn2, NormalizedCentral,
    PartitionOfUnity,
};
use crate::selector::{hull_hausdorff, selector_retraction, steiner_point};
use crate::two_center::dist_to_x2;

type Instance = Option<(f64, Value)>;

/// Runs `f` on `samples` independent instances and keeps the worst one.
/// NaN statistics are treated as the worst possible value.
fn worst<F>(cfg: &RunConfig, stream: u64, samples: usize, f: F) -> Result<(f64, Option<Value>, usize)>
where
    F: Fn(&mut ChaCha8Rng, u64) -> Result<Instance> + Sync,
{
    let results = (0..samples as u64)
        .into_par_iter()
        .map(|k| f(&mut sample_rng(cfg.seed, k, 1000 + stream), k))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(f64, Value)> = None;
    let mut used = 0;
    for (stat, w) in results.into_iter().flatten() {
        used += 1;
        let worse = match &best {
            None => true,
            Some((b, _)) => stat.is_nan() && !b.is_nan() || stat > *b,
        };
        if worse {
            best = Some((stat, w));
        }
    }
    Ok(match best {
        Some((s, w)) => (s, Some(w), used),
        None => (f64::NEG_INFINITY.max(0.0), None, 0),
    })
}

fn check<F>(cfg: &RunConfig, name: &str, anchor: &str, samples: usize, default_tol: Option<f64>, f: F) -> Result<CheckRecord>
where
    F: Fn(&mut ChaCha8Rng, u64) -> Result<Instance> + Sync,
{
    let stream = name.bytes().fold(0u64, |h, b| h.wrapping_mul(131).wrapping_add(b as u64));
    let (stat, witness, used) = worst(cfg, stream, samples, f)?;
    let threshold = default_tol.map(|t| cfg.tolerance(name, t));
    Ok(CheckRecord::new(name, anchor, used, stat, threshold, witness))
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize, half: f64) -> Point {
    Point::from_raw((0..dim).map(|_| rng.gen_range(-half..=half)).collect())
}

fn nonzero_point(rng: &mut ChaCha8Rng, dim: usize, half: f64) -> Point {
    loop {
        let p = random_point(rng, dim, half);
        if !p.is_zero() {
            return p;
        }
    }
}

fn with_n(cfg: &RunConfig, n: usize) -> RunConfig {
    RunConfig { n, ..cfg.clone() }
}

fn grid(path: &QuasiPath, k: usize) -> Result<Vec<FSet>> {
    (0..=k).map(|i| path.eval(if i == k { 1.0 } else { i as f64 / k as f64 })).collect()
}

/// `max_{t < t'} d_H(g(t), g(t')) - slope * |t - t'|` over a grid.
fn modulus_excess(g: &[FSet], slope: f64) -> Result<f64> {
    let k = g.len() - 1;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..=k {
        for j in i + 1..=k {
            let dt = (j - i) as f64 / k as f64;
            worst = worst.max(hausdorff(&g[i], &g[j])? - slope * dt);
        }
    }
    Ok(worst)
}

fn geodesic_defect(g: &[FSet], dh: f64) -> Result<f64> {
    let k = g.len() - 1;
    let mut worst: f64 = 0.0;
    for i in 0..=k {
        for j in i + 1..=k {
            let dt = (j - i) as f64 / k as f64;
            worst = worst.max((hausdorff(&g[i], &g[j])? - dh * dt).abs());
        }
    }
    Ok(worst)
}

const P_GRID: [f64; 5] = [1.0, 1.5, 2.0, 4.0, f64::INFINITY];

// ---------------------------------------------------------------- normed core

fn semi_inner_derivative(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let r = check(cfg, "semi-inner-derivative", "semi-inner products are one-sided derivatives of the norm", cfg.samples, Some(1e-5), |rng, k| {
        let p = P_GRID[k as usize % P_GRID.len()];
        let spec = NormSpec::new(p, cfg.dim)?;
        let x = random_point(rng, cfg.dim, cfg.scale);
        let y = nonzero_point(rng, cfg.dim, cfg.scale);
        let ny = spec.norm_of(&y);
        let h = 1e-7;
        let q = |s: f64| ny * (spec.norm_of(&y.add(&x.scale(s))) - ny) / s;
        let plus = semi_inner(&x, &y, Side::Plus, &spec)?;
        let minus = semi_inner(&x, &y, Side::Minus, &spec)?;
        let err = (plus - q(h)).abs().max((minus - q(-h)).abs());
        Ok(Some((err, json!({"p": Exponent(p), "x": x, "y": y}))))
    })?;
    Ok(vec![r])
}

fn semi_inner_order(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let r = check(cfg, "semi-inner-order", "lower semi-inner product never exceeds the upper one; both obey Cauchy-Schwarz", cfg.samples, Some(1e-12), |rng, k| {
        let p = P_GRID[k as usize % P_GRID.len()];
        let spec = NormSpec::new(p, cfg.dim)?;
        let x = random_point(rng, cfg.dim, cfg.scale);
        let y = nonzero_point(rng, cfg.dim, cfg.scale);
        let plus = semi_inner(&x, &y, Side::Plus, &spec)?;
        let minus = semi_inner(&x, &y, Side::Minus, &spec)?;
        let cs = spec.norm_of(&x) * spec.norm_of(&y);
        let mut v = (minus - plus).max(plus.abs() - cs).max(minus.abs() - cs);
        if spec.is_smooth() {
            v = v.max((plus - minus).abs() - 1e-12 * cs.max(1.0));
        }
        Ok(Some((v, json!({"p": Exponent(p), "x": x, "y": y}))))
    })?;
    Ok(vec![r])
}

fn radial_monotonicity(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let r = check(cfg, "radial-monotonicity", "radial projection is semi-monotone", cfg.samples, Some(1e-9), |rng, k| {
        let p = P_GRID[k as usize % P_GRID.len()];
        let spec = NormSpec::new(p, cfg.dim)?;
        let x = nonzero_point(rng, cfg.dim, cfg.scale);
        let y = nonzero_point(rng, cfg.dim, cfg.scale);
        if x == y {
            return Ok(None);
        }
        let d = radial(&x, &spec)?.sub(&radial(&y, &spec)?);
        let v = -semi_inner(&d, &x.sub(&y), Side::Minus, &spec)?;
        Ok(Some((v, json!({"p": Exponent(p), "x": x, "y": y}))))
    })?;
    Ok(vec![r])
}

fn dunkl_williams(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let r = check(cfg, "dunkl-williams", "radial projection moves at most 2|x-y|/max(|x|,|y|)", cfg.samples, Some(1e-12), |rng, k| {
        let p = P_GRID[k as usize % P_GRID.len()];
        let spec = NormSpec::new(p, cfg.dim)?;
        let x = nonzero_point(rng, cfg.dim, cfg.scale);
        let y = nonzero_point(rng, cfg.dim, cfg.scale);
        let lhs = spec.norm_of(&radial(&x, &spec)?.sub(&radial(&y, &spec)?));
        let rhs = 2.0 * spec.norm_of(&x.sub(&y)) / spec.norm_of(&x).max(spec.norm_of(&y));
        Ok(Some((lhs - rhs, json!({"p": Exponent(p), "x": x, "y": y}))))
    })?;
    Ok(vec![r])
}

// ---------------------------------------------------------------- fset metric

fn metric_axioms(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let r = check(cfg, "metric-axioms", "Hausdorff distance is a symmetric metric", cfg.samples, Some(1e-12), |_, k| {
        let x = sample_fset(cfg, Stratum::Generic, 3 * k);
        let y = sample_fset(cfg, Stratum::Thin, 3 * k + 1);
        let z = sample_fset(cfg, Stratum::Clustered, 3 * k + 2);
        let xy = hausdorff(&x, &y)?;
        let sym = (xy - hausdorff(&y, &x)?).abs() * 1e12;
        let tri = xy - hausdorff(&x, &z)? - hausdorff(&z, &y)?;
        let zero = hausdorff(&x, &x)?;
        Ok(Some((sym.max(tri).max(zero), json!([x, y, z]))))
    })?;
    Ok(vec![r])
}

fn two_lipschitz(cfg: &RunConfig, name: &str, anchor: &str, f: fn(&FSet) -> f64) -> Result<CheckRecord> {
    check(cfg, name, anchor, cfg.samples, Some(1e-12), |_, k| {
        let (x, y, _) = sample_pair(cfg, k);
        let v = (f(&x) - f(&y)).abs() - 2.0 * hausdorff(&x, &y)?;
        Ok(Some((v, json!([x, y]))))
    })
}

fn delta_2lip(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    Ok(vec![two_lipschitz(cfg, "delta-2lip", "minimum separation is 2-Lipschitz", min_sep)?])
}

fn diam_2lip(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    Ok(vec![two_lipschitz(cfg, "diam-2lip", "diameter is 2-Lipschitz", diam)?])
}

fn x2_witness(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let spec = cfg.spec();
    let samples = cfg.samples;
    let r = check(cfg, "x2-witness", "distance to X(2) is attained by the two-center witness", samples, Some(1e-9), |rng, k| {
        let x = sample_fset(cfg, Stratum::ALL[k as usize % 4], k);
        let w = dist_to_x2(&x);
        let mut v = f64::NEG_INFINITY;
        for (i, p) in x.points().iter().enumerate() {
            let c = &w.centers[w.assignment[i] as usize % w.centers.len()];
            v = v.max(spec.dist(p, c) - w.radius);
        }
        for _ in 0..1000 {
            let z = FSet::new(vec![random_point(rng, cfg.dim, cfg.scale), random_point(rng, cfg.dim, cfg.scale)], 2, spec)?;
            v = v.max(w.radius - hausdorff(&x, &z)?);
        }
        Ok(Some((v, json!({"x": x, "radius": w.radius}))))
    })?;
    Ok(vec![r])
}

fn proximal_bijection_check(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let n = cfg.n.max(2);
    let c = with_n(cfg, n);
    let r = check(&c, "proximal-bijection", "well separated close sets admit a unique proximal bijection", cfg.samples, Some(1e-12), |rng, k| {
        let x = sample_fset(&c, Stratum::Generic, k);
        if x.len() < n {
            return Ok(None);
        }
        let delta = min_sep(&x);
        let amp = 0.49 * delta * rng.gen::<f64>();
        let y = perturb(rng, &x, amp);
        if y.len() < n || delta <= 2.0 * hausdorff(&x, &y)? {
            return Ok(None);
        }
        let dh = hausdorff(&x, &y)?;
        let v = match proximal_bijection(&x, &y)? {
            None => f64::INFINITY,
            Some(pairs) => {
                let mut seen = vec![false; n];
                let mut v = f64::NEG_INFINITY;
                for &(i, j) in &pairs {
                    if seen[j] {
                        v = f64::INFINITY;
                    }
                    seen[j] = true;
                    v = v.max(x.spec().dist(&x.points()[i], &y.points()[j]) - dh);
                }
                if pairs.len() != n { f64::INFINITY } else { v }
            }
        };
        Ok(Some((v, json!([x, y]))))
    })?;
    Ok(vec![r])
}

// ---------------------------------------------------------------- relations

/// A random complete relation with at most `max_pairs` pairs on sizes ≤ 5.
pub fn random_relation(rng: &mut ChaCha8Rng, max_pairs: usize) -> Relation {
    let nx = rng.gen_range(1..=5);
    let ny = rng.gen_range(1..=5);
    let mut pairs = std::collections::BTreeSet::new();
    for i in 0..nx {
        pairs.insert((i, rng.gen_range(0..ny)));
    }
    for j in 0..ny {
        pairs.insert((rng.gen_range(0..nx), j));
    }
    let extra = rng.gen_range(0..=nx * ny);
    for _ in 0..extra {
        if pairs.len() >= max_pairs {
            break;
        }
        pairs.insert((rng.gen_range(0..nx), rng.gen_range(0..ny)));
    }
    Relation::new(nx, ny, pairs).expect("indices in range")
}

/// All reduced complete subrelations of `r` by subset enumeration, and the
/// smallest size of a complete subrelation.
pub fn brute_force_reduced(r: &Relation) -> (Vec<Relation>, usize) {
    let pairs: Vec<(usize, usize)> = r.pairs().iter().copied().collect();
    let m = pairs.len();
    assert!(m <= 20, "subset enumeration over {m} pairs");
    let full_x = (1u32 << r.nx()) - 1;
    let full_y = (1u32 << r.ny()) - 1;
    let mut cover_x = vec![0u32; 1 << m];
    let mut cover_y = vec![0u32; 1 << m];
    let mut reduced = Vec::new();
    let mut smallest = usize::MAX;
    for mask in 1usize..1 << m {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        cover_x[mask] = cover_x[rest] | 1 << pairs[low].0;
        cover_y[mask] = cover_y[rest] | 1 << pairs[low].1;
        if cover_x[mask] != full_x || cover_y[mask] != full_y {
            continue;
        }
        smallest = smallest.min(mask.count_ones() as usize);
        let mut cx = [0u8; 5];
        let mut cy = [0u8; 5];
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                cx[i] += 1;
                cy[j] += 1;
            }
        }
        let ok = pairs.iter().enumerate().all(|(b, &(i, j))| mask >> b & 1 == 0 || cx[i] == 1 || cy[j] == 1);
        if ok {
            let sel = pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p);
            reduced.push(Relation::new(r.nx(), r.ny(), sel).expect("subset of a valid relation"));
        }
    }
    (reduced, smallest)
}

fn relation_suites(cfg: &RunConfig, which: &str) -> Result<Vec<CheckRecord>> {
    let anchor = match which {
        "reduce-idempotent" => "reduction is idempotent and yields a reduced complete subrelation",
        "reduce-size" => "reduced relations have at most max(|x|, |y|, |x|+|y|-2) pairs",
        _ => "decomposition into two surjections reassembles the relation",
    };
    let r = check(cfg, which, anchor, cfg.samples, Some(0.0), |rng, _| {
        let rel = random_relation(rng, 12);
        let red = rel.reduce()?;
        let bad = match which {
            "reduce-idempotent" => {
                let (all, _) = brute_force_reduced(&rel);
                let essential = red.pairs().iter().all(|&p| {
                    let (l, r) = red.orders(p).expect("member");
                    l == 1 || r == 1
                });
                !(red.reduce()? == red && red.is_complete() && essential && red.pairs().is_subset(rel.pairs()) && all.contains(&red))
            }
            "reduce-size" => {
                let (_, smallest) = brute_force_reduced(&rel);
                let bound = rel.nx().max(rel.ny()).max(rel.nx() + rel.ny() - 2);
                red.len() > bound || red.len() < smallest
            }
            _ => {
                let d = red.decompose()?;
                let onto_f: std::collections::BTreeSet<usize> = d.f.values().copied().collect();
                let onto_g: std::collections::BTreeSet<usize> = d.g.values().copied().collect();
                d.reassemble() != red
                    || onto_f.into_iter().collect::<Vec<_>>() != d.y_prime
                    || onto_g.into_iter().collect::<Vec<_>>() != d.x_double_prime
                    || d.x_prime.len() + d.x_double_prime.len() != rel.nx()
                    || d.y_prime.len() + d.y_double_prime.len() != rel.ny()
            }
        };
        Ok(Some((if bad { 1.0 } else { 0.0 }, json!({"relation": rel, "reduced": red}))))
    })?;
    Ok(vec![r])
}

// ---------------------------------------------------------------- paths

fn quasigeodesic_modulus(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let r = check(cfg, "quasigeodesic-modulus", "X(n) is 2-quasiconvex", cfg.samples, Some(1e-9), |_, k| {
        let c = with_n(cfg, 3 + k as usize % 4);
        let (x, y, _) = sample_pair(&c, k);
        let dh = hausdorff(&x, &y)?;
        let path = quasigeodesic(&x, &y)?;
        let g = grid(&path, 100)?;
        let mut v = modulus_excess(&g, 2.0 * dh)?;
        if g.iter().any(|s| s.len() > c.n) {
            v = f64::INFINITY;
        }
        Ok(Some((v, json!([x, y]))))
    })?;
    Ok(vec![r])
}

fn relation_leg_modulus(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let r = check(cfg, "relation-leg-modulus", "relation paths are lambda-quasigeodesics with lambda the longest pair ratio", cfg.samples, Some(1e-9), |rng, k| {
        let (x, y, _) = sample_pair(cfg, k);
        let dh = hausdorff(&x, &y)?;
        if dh == 0.0 {
            return Ok(None);
        }
        let mut pairs: Vec<(usize, usize)> = proximal_relation(&x, &y)?.pairs().iter().copied().collect();
        for _ in 0..rng.gen_range(0..3) {
            pairs.push((rng.gen_range(0..x.len()), rng.gen_range(0..y.len())));
        }
        let rel = Relation::new(x.len(), y.len(), pairs)?;
        let big = rel.len();
        let (xs, ys) = (x.with_ambient(big.max(x.len()))?, y.with_ambient(big.max(y.len()))?);
        let lambda = rel
            .pairs()
            .iter()
            .map(|&(i, j)| x.spec().dist(&x.points()[i], &y.points()[j]) / dh)
            .fold(0.0, f64::max);
        let g = grid(&path_from_relation(&xs, &ys, &rel)?, 50)?;
        Ok(Some((modulus_excess(&g, lambda * dh)?, json!({"x": x, "y": y, "pairs": rel.pairs()}))))
    })?;
    Ok(vec![r])
}

fn x2_geodesic(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let c = with_n(cfg, 2);
    let a = check(&c, "x2-geodesic", "X(2) is a geodesic space", cfg.samples, Some(1e-9), |_, k| {
        let (x, y, _) = sample_pair(&c, k);
        let g = grid(&quasigeodesic(&x, &y)?, 50)?;
        Ok(Some((geodesic_defect(&g, hausdorff(&x, &y)?)?, json!([x, y]))))
    })?;
    let b = check(cfg, "larger-geodesic", "reduced proximal relations give geodesics in X(max(|x|,|y|,|x|+|y|-2))", cfg.samples, Some(1e-9), |_, k| {
        let (x, y, _) = sample_pair(cfg, k);
        let path = geodesic_in_larger(&x, &y)?;
        let g = grid(&path, 50)?;
        let mut v = geodesic_defect(&g, hausdorff(&x, &y)?)?;
        if g.iter().any(|s| s.len() > path.ambient_n()) {
            v = f64::INFINITY;
        }
        Ok(Some((v, json!([x, y]))))
    })?;
    Ok(vec![a, b])
}

fn path_length_check(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let samples = cfg.samples;
    let lengths = |k: u64| -> Result<(f64, f64, f64, Value)> {
        let (x, y, _) = sample_pair(cfg, k);
        let path = quasigeodesic(&x, &y)?;
        Ok((path_length(&path, 512)?, path_length(&path, 1024)?, hausdorff(&x, &y)?, json!([x, y])))
    };
    let anchor = "length of a path as the supremum of grid sums";
    let refine = check(cfg, "path-length-refinement", anchor, samples, Some(1e-12), |_, k| {
        let (l1, l2, _, w) = lengths(k)?;
        Ok(Some((l1 - l2, w)))
    })?;
    let bound = check(cfg, "path-length-bound", anchor, samples, Some(1e-9), |_, k| {
        let (_, l2, dh, w) = lengths(k)?;
        Ok(Some((l2 - 2.0 * dh, w)))
    })?;
    // grid sums converge only at rate O(1/grid) where tracks pass close to
    // each other, so the 512 -> 1024 change is recorded, not asserted
    let convergence = check(cfg, "path-length-convergence", anchor, samples, None, |_, k| {
        let (l1, l2, _, w) = lengths(k)?;
        Ok(Some((l2 - l1, w)))
    })?;
    Ok(vec![refine, bound, convergence])
}

fn spaced_line(n: usize, dim: usize, spec: NormSpec) -> Result<(FSet, FSet, Point)> {
    let e = Point::basis(dim, 0);
    let (x, y) = spaced_pair(n, 4.0, &e, spec)?;
    Ok((x, y, e))
}

fn spaced_property(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let spec = cfg.spec();
    let mut out = Vec::new();
    for n in 3..=8 {
        let (x, y, e) = spaced_line(n, cfg.dim, spec)?;
        let values: Vec<f64> = x.points().iter().chain(y.points()).map(|p| p[0]).collect();
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
        let name = format!("spaced-property-n{n}");
        let c = with_n(cfg, n);
        out.push(check(&c, &name, "spaced pairs have no midpoint closer than their distance", cfg.samples, Some(1e-12), |rng, _| {
            let k = rng.gen_range(1..=n);
            let pts: Vec<Point> = (0..k)
                .map(|_| {
                    let along = if rng.gen::<bool>() {
                        rng.gen_range(lo..=hi)
                    } else {
                        values.choose(rng).copied().unwrap_or(0.0) + rng.gen_range(-1.2..1.2)
                    };
                    let mut coords = e.scale(along).into_coords();
                    for c in coords.iter_mut().skip(1) {
                        *c = rng.gen_range(-0.5..0.5) * rng.gen::<f64>().powi(4);
                    }
                    Point::from_raw(coords)
                })
                .collect();
            let z = FSet::new(pts, n, spec)?;
            let r = hausdorff(&x, &z)?.max(hausdorff(&z, &y)?);
            Ok(Some((1.0 - r, json!(z))))
        })?);
    }
    Ok(out)
}

fn spaced_sharpness(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let spec = cfg.spec();
    let c = with_n(cfg, 8);
    let r = check(&c, "spaced-sharpness", "2 is the smallest quasiconvexity constant of X(n), n >= 3", 6, Some(1e-6), |_, k| {
        let n = 3 + k as usize;
        let (x, y, e) = spaced_line(n, cfg.dim, spec)?;
        let dh = hausdorff(&x, &y)?;
        let mid = quasigeodesic(&x, &y)?.eval(0.5)?;
        let far = hausdorff(&x, &mid)?.max(hausdorff(&mid, &y)?);
        let lambda = 2.0 * far / dh;
        let mut v = 2.0 - lambda;
        if far < 1.0 {
            let windows = spaced_windows(n, 4.0)?;
            let counts = window_counts(&mid, &windows, &e, 1.0);
            if counts.iter().zip(&windows).any(|(c, w)| *c < w.quota) {
                v = f64::INFINITY;
            }
        }
        Ok(Some((v, json!({"n": n, "midpoint": mid, "lambda": lambda}))))
    })?;
    Ok(vec![r])
}

// ---------------------------------------------------------------- selector

fn selector_equivariance(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let r = check(cfg, "selector-equivariance", "the Steiner selector is affine", cfg.samples, Some(1e-9), |rng, k| {
        let x = sample_fset(cfg, Stratum::ALL[k as usize % 4], k);
        let s = steiner_point(&x, &cfg.selector);
        let t = 10f64.powf(rng.gen_range(-2.0..2.0));
        let v = random_point(rng, cfg.dim, 10.0 * cfg.scale);
        let moved = steiner_point(&x.affine(t, &v), &cfg.selector);
        let want = s.scale(t).add(&v);
        let e = x.spec().dist(&moved, &want) / (t * cfg.scale).max(1.0);
        let tr = steiner_point(&x.translate(&v), &cfg.selector);
        let e2 = x.spec().dist(&tr, &s.add(&v)) / cfg.scale.max(1.0);
        Ok(Some((e.max(e2), json!({"x": x, "t": t, "v": v}))))
    })?;
    Ok(vec![r])
}

fn selector_membership(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let r = check(cfg, "selector-membership", "the selector picks a point of the convex hull", cfg.samples, Some(1e-9), |_, k| {
        let x = sample_fset(cfg, Stratum::ALL[k as usize % 4], k);
        let s = steiner_point(&x, &cfg.selector);
        Ok(Some((hull_distance(&s, x.points()), json!(x))))
    })?;
    Ok(vec![r])
}

fn hull_contraction(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let r = check(cfg, "hull-contraction", "convex hulls are no farther apart than the sets", cfg.samples, Some(1e-9), |_, k| {
        let (x, y, _) = sample_pair(cfg, k);
        Ok(Some((hull_hausdorff(&x, &y, &cfg.selector)? - hausdorff(&x, &y)?, json!([x, y]))))
    })?;
    Ok(vec![r])
}

/// Relative change of the running maximum when the sample count doubles.
fn stability(map: MapId, cfg: &RunConfig, name: &str, anchor: &str) -> Result<Vec<CheckRecord>> {
    let doubled = RunConfig { samples: 2 * cfg.samples, ..cfg.clone() };
    let e = estimate_lipschitz(map, &doubled)?;
    let half = e.running_max(cfg.samples);
    let change = if e.max_ratio > 0.0 { (e.max_ratio - half) / e.max_ratio } else { 0.0 };
    let witness = e.witness.as_ref().map(|(x, y)| json!([x, y]));
    Ok(vec![
        CheckRecord::new(&format!("{name}-max"), anchor, e.pairs, e.max_ratio, None, witness.clone()),
        CheckRecord::new(&format!("{name}-stability"), anchor, e.pairs, change, Some(cfg.tolerance(&format!("{name}-stability"), 0.05)), witness),
    ])
}

fn selector_lipschitz(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    stability(MapId::Selector, cfg, "selector-lipschitz", "the Steiner selector is Lipschitz in the Hausdorff metric")
}

// ---------------------------------------------------------------- retract

fn retraction_identity(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let spec = cfg.spec();
    let mut out = Vec::new();
    let cases: [(&str, usize, usize, f64); 4] = [("r2", 1, 2, 1e-12), ("r3", 2, 3, 1e-12), ("rn2", 2, cfg.n.max(3), 1e-9), ("selector", 1, cfg.n, 1e-12)];
    for (map, size, ambient, tol) in cases {
        let name = format!("retraction-identity-{map}");
        out.push(check(cfg, &name, "retractions fix their target subspace", cfg.samples, Some(tol), |rng, _| {
            let k = rng.gen_range(1..=size);
            let pts: Vec<Point> = (0..k).map(|_| random_point(rng, cfg.dim, cfg.scale)).collect();
            let x = FSet::new(pts, ambient, spec)?;
            let r = match map {
                "r2" => r2(&x)?,
                "r3" => r3(&x)?,
                "rn2" => rn2(&x, cfg.tau, &cfg.selector)?,
                _ => selector_retraction(&x, &cfg.selector),
            };
            Ok(Some((hausdorff(&r, &x)?, json!(x))))
        })?);
    }
    Ok(out)
}

fn lipschitz_check(cfg: &RunConfig, map: MapId, n: usize, name: &str, anchor: &str) -> Result<Vec<CheckRecord>> {
    let c = with_n(cfg, n);
    let e = estimate_lipschitz(map, &c)?;
    let bound = map.lipschitz_bound().map(|b| if map == MapId::R2 { b + 1e-9 } else { b });
    let witness = e.witness.as_ref().map(|(x, y)| json!([x, y]));
    Ok(vec![CheckRecord::new(name, anchor, e.pairs, e.max_ratio, bound.map(|b| c.tolerance(name, b)), witness)])
}

fn r2_lipschitz(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    lipschitz_check(cfg, MapId::R2, 2, "r2-lipschitz", "averaging is a 1-Lipschitz retraction X(2) -> X")
}

fn r3_lipschitz(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    lipschitz_check(cfg, MapId::R3, 3, "r3-lipschitz", "X(3) -> X(2) retraction with Lipschitz constant 731")
}

/// Normalized central triple whose third point sits at a distance ratio
/// drawn from `[lo, hi]` relative to the first pair; callers filter on the
/// resulting separation.
fn strip_triple(rng: &mut ChaCha8Rng, cfg: &RunConfig, lo: f64, hi: f64) -> Result<FSet> {
    let spec = cfg.spec();
    loop {
        let a = random_point(rng, cfg.dim, 1.0);
        let b = random_point(rng, cfg.dim, 1.0);
        let dir = b.sub(&a);
        let len = spec.norm_of(&dir);
        if len < 1e-3 {
            continue;
        }
        let target = rng.gen_range(lo..=hi);
        let c = a.add(&random_point(rng, cfg.dim, 1.0).scale(target * len / spec.norm_of(&random_point(rng, cfg.dim, 1.0)).max(1e-3)));
        let x = FSet::new(vec![a, b, c], 3, spec)?;
        if x.len() == 3 {
            return Ok(NormalizedCentral::new(&x).base().clone());
        }
    }
}

fn r3_strips(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let c3 = with_n(cfg, 3);
    let strips: [(&str, f64, f64, f64); 3] = [
        ("r3-strip-thin", 0.0, 0.2, 3.0),
        ("r3-strip-middle", 1.0 / 6.0, 1.0 / 3.0, 44.0),
        ("r3-strip-thick", 0.25, 1.0, 9.0),
    ];
    let mut out = Vec::new();
    for (name, lo, hi, bound) in strips {
        out.push(check(&c3, name, "interpolation map of X(3) is Lipschitz on each switching strip", cfg.samples, Some(bound + 1e-6), |rng, _| {
            let x0 = strip_triple(rng, &c3, lo, hi)?;
            let dx = min_sep(&x0);
            if !(lo..=hi).contains(&dx) {
                return Ok(None);
            }
            let y = if rng.gen::<bool>() {
                let amp = 10f64.powf(rng.gen_range(-6.0..-1.0));
                perturb(rng, &x0, amp)
            } else {
                strip_triple(rng, &c3, lo, hi)?
            };
            let y0 = NormalizedCentral::new(&y).base().clone();
            let dy = min_sep(&y0);
            if y0.len() < 3 || !(lo..=hi).contains(&dy) {
                return Ok(None);
            }
            let d_in = hausdorff(&x0, &y0)?;
            if d_in < 1e-12 {
                return Ok(None);
            }
            let fx = interp3(&NormalizedCentral::new(&x0))?;
            let fy = interp3(&NormalizedCentral::new(&y0))?;
            Ok(Some((hausdorff(&fx, &fy)? / d_in, json!([x0, y0]))))
        })?);
    }
    Ok(out)
}

fn interp3_pieces(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let c3 = with_n(cfg, 3);
    let pou = PartitionOfUnity::three_point();
    let r = check(&c3, "interp3-pieces", "interpolation of X(3) agrees with the pair merge below 1/5 and with the average above 1/4", cfg.samples, Some(1e-12), |rng, _| {
        let x0 = strip_triple(rng, &c3, 0.0, 0.5)?;
        let nc = NormalizedCentral::new(&x0);
        let d = min_sep(&x0);
        let got = interp3(&nc)?;
        let v = if d <= pou.lo() {
            hausdorff(&got, &merge_closest_pair(&nc)?)?
        } else if d >= pou.hi() {
            let a = avg(&x0);
            hausdorff(&got, &FSet::new(vec![a], 3, *x0.spec())?)?
        } else {
            return Ok(None);
        };
        Ok(Some((v, json!(x0))))
    })?;
    Ok(vec![r])
}

fn thin_proximity(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let c3 = with_n(cfg, 3);
    let r = check(&c3, "thin-proximity", "merging the closest pair moves a thin set by at most half its separation", cfg.samples, Some(1e-12), |rng, _| {
        let x0 = strip_triple(rng, &c3, 0.0, 1.0 / 3.0)?;
        let d = min_sep(&x0);
        if d > 1.0 / 3.0 {
            return Ok(None);
        }
        let f = merge_closest_pair(&NormalizedCentral::new(&x0))?;
        Ok(Some((hausdorff(&f, &x0)? - d / 2.0, json!(x0))))
    })?;
    Ok(vec![r])
}

fn base_point_invariance(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let c3 = with_n(cfg, 3);
    let a = check(&c3, "base-point-invariance-r3", "homogeneous extension does not depend on the base point", cfg.samples, Some(1e-9), |rng, k| {
        let x = sample_fset(&c3, Stratum::ALL[k as usize % 4], k);
        let v = x.points().choose(rng).expect("nonempty").clone();
        let ref_out = homogeneous_extend_at(&x, x.first(), interp3)?;
        let alt = homogeneous_extend_at(&x, &v, interp3)?;
        Ok(Some((hausdorff(&ref_out, &alt)? / diam(&x).max(1e-300), json!(x))))
    })?;
    let n = cfg.n.max(3);
    let cn = with_n(cfg, n);
    let b = check(&cn, "base-point-invariance-rn2", "homogeneous extension does not depend on the base point", cfg.samples, Some(1e-9), |rng, k| {
        let x = sample_fset(&cn, Stratum::ALL[k as usize % 4], k);
        let v = x.points().choose(rng).expect("nonempty").clone();
        let core = |nc: &NormalizedCentral| interp_n(nc, cn.tau, &cn.selector);
        let ref_out = homogeneous_extend_at(&x, x.first(), core)?;
        let alt = homogeneous_extend_at(&x, &v, core)?;
        Ok(Some((hausdorff(&ref_out, &alt)? / diam(&x).max(1e-300), json!(x))))
    })?;
    Ok(vec![a, b])
}

fn rn2_equivariance(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let n = cfg.n.max(3);
    let cn = with_n(cfg, n);
    let r = check(&cn, "rn2-equivariance", "the X(n) -> X(2) retraction is affine", cfg.samples, Some(1e-9), |rng, k| {
        let x = sample_fset(&cn, Stratum::ALL[k as usize % 4], k);
        let t = 10f64.powf(rng.gen_range(-2.0..2.0));
        let w = random_point(rng, cn.dim, 10.0 * cn.scale);
        let lhs = rn2(&x.affine(t, &w), cn.tau, &cn.selector)?;
        let rhs = rn2(&x, cn.tau, &cn.selector)?.affine(t, &w);
        Ok(Some((hausdorff(&lhs, &rhs)? / (t * cn.scale).max(1.0), json!({"x": x, "t": t, "w": w}))))
    })?;
    Ok(vec![r])
}

fn rn2_lipschitz(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let n = cfg.n.max(4);
    stability(MapId::Rn2, &with_n(cfg, n), "rn2-lipschitz", "X(n) -> X(2) retraction is Lipschitz")
}

// ---------------------------------------------------------------- flow

fn flow_instances(cfg: &RunConfig, k: u64) -> Option<FSet> {
    let n = cfg.n.max(2);
    let c = with_n(cfg, n);
    let x = sample_fset(&c, Stratum::ALL[k as usize % 4], k);
    (x.len() == n && min_sep(&x) > 1e-6 * cfg.scale).then_some(x)
}

fn flow_suite(cfg: &RunConfig, which: &str) -> Result<Vec<CheckRecord>> {
    let spec = cfg.spec();
    let asserted = spec.is_smooth();
    let tol_time = 1e-6f64.max(10.0 * cfg.flow.eps_coll);
    let (anchor, tol): (&str, Option<f64>) = match which {
        "flow-speed" => ("each point moves with speed at most n-1", Some(1e-9)),
        "collision-sandwich" => ("collision time lies between delta/(2(n-1)) and delta/2", Some(tol_time)),
        "time-translation" => ("collision time shifts with the starting time", Some(1e-5)),
        "closest-pair-decay" => ("the closest pair approaches at rate at least 2", asserted.then_some(1e-6)),
        "flow-proximity" => ("the flow retraction moves a set by at most (n-1) delta/2", Some(1e-6)),
        _ => ("paired trajectories separate at rate at most 2(n-1)", asserted.then_some(1e-6)),
    };
    let samples = cfg.samples;
    let r = check(cfg, which, anchor, samples, tol, |_, k| {
        let Some(x) = flow_instances(cfg, k) else { return Ok(None) };
        let n = x.ambient_n();
        let nf = n as f64;
        let v = match which {
            "flow-speed" | "closest-pair-decay" => {
                let fc = FlowConfig { trace: true, ..cfg.flow };
                let res = integrate_to_collision(&x, &fc)?;
                if which == "flow-speed" {
                    res.trace
                        .windows(2)
                        .flat_map(|w| {
                            let h = w[1].t - w[0].t;
                            w[0].points.iter().zip(&w[1].points).map(move |(a, b)| (a, b, h))
                        })
                        .map(|(a, b, h)| (spec.dist(a, b) - (nf - 1.0) * h) / (1.0 + h))
                        .fold(f64::NEG_INFINITY, f64::max)
                } else {
                    let pts = x.points();
                    let mut best = (0, 1, f64::INFINITY);
                    for i in 0..n {
                        for j in i + 1..n {
                            let d = spec.dist(&pts[i], &pts[j]);
                            if d < best.2 {
                                best = (i, j, d);
                            }
                        }
                    }
                    res.trace
                        .iter()
                        .map(|row| spec.dist(&row.points[best.0], &row.points[best.1]) - (best.2 - 2.0 * row.t))
                        .fold(f64::NEG_INFINITY, f64::max)
                }
            }
            "collision-sandwich" => {
                let (lo, hi) = collision_time_bounds(&x)?;
                let t = integrate_to_collision(&x, &cfg.flow)?.collision_time;
                (lo - t).max(t - hi)
            }
            "time-translation" => {
                let t = integrate_to_collision(&x, &cfg.flow)?.collision_time;
                let tau = t / 2.0;
                let (_, mid) = flow_state_at(&x, tau, &cfg.flow)?;
                let mid = FSet::new(mid, n, spec)?;
                (t - tau - integrate_to_collision(&mid, &cfg.flow)?.collision_time).abs()
            }
            "flow-proximity" => {
                let r = integrate_to_collision(&x, &cfg.flow)?.retract;
                hausdorff(&r, &x)? - (nf - 1.0) * min_sep(&x) / 2.0
            }
            _ => {
                let Some(y) = flow_instances(cfg, k + 1_000_000) else { return Ok(None) };
                let end = integrate_to_collision(&x, &cfg.flow)?
                    .collision_time
                    .min(integrate_to_collision(&y, &cfg.flow)?.collision_time);
                let g = |a: &[Point], b: &[Point]| a.iter().zip(b).map(|(p, q)| spec.dist(p, q)).sum::<f64>();
                let g0 = g(x.points(), y.points());
                let mut worst = f64::NEG_INFINITY;
                for s in 1..=8 {
                    let t = end * s as f64 / 8.0;
                    let (_, u) = flow_state_at(&x, t, &cfg.flow)?;
                    let (_, w) = flow_state_at(&y, t, &cfg.flow)?;
                    worst = worst.max(g(&u, &w) - g0 - 2.0 * (nf - 1.0) * t);
                }
                worst
            }
        };
        Ok(Some((v, json!(x))))
    })?;
    Ok(vec![r])
}

fn holder_estimate(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let n = cfg.n.max(2);
    let c = with_n(cfg, n);
    let e = estimate_holder(MapId::Holder, &c)?;
    let witness = e.witness.as_ref().map(|(x, y)| json!([x, y]));
    let tol = c.spec().is_smooth().then(|| c.tolerance("holder-estimate", 1.05));
    let mut out = vec![CheckRecord::new("holder-estimate", "the flow retraction is Hölder with exponent 1/(2n-1)", e.pairs, e.max_ratio, tol, witness)];
    if c.p.0 == 2.0 {
        let ratio = e.rows.iter().map(|r| r.d_h_out / r.d_h_in).fold(0.0, f64::max);
        out.push(CheckRecord::new("hilbert-flow-ratio", "in Hilbert space the flow retraction has bounded Lipschitz ratio", e.pairs, ratio, None, None));
    }
    Ok(out)
}

// ---------------------------------------------------------------- registry

type SuiteFn = fn(&RunConfig) -> Result<Vec<CheckRecord>>;

struct Suite {
    name: &'static str,
    module: &'static str,
    run: SuiteFn,
}

const SUITES: &[Suite] = &[
    Suite { name: "semi-inner-derivative", module: "normed-core", run: semi_inner_derivative },
    Suite { name: "semi-inner-order", module: "normed-core", run: semi_inner_order },
    Suite { name: "radial-monotonicity", module: "normed-core", run: radial_monotonicity },
    Suite { name: "dunkl-williams", module: "normed-core", run: dunkl_williams },
    Suite { name: "metric-axioms", module: "fset-metric", run: metric_axioms },
    Suite { name: "delta-2lip", module: "fset-metric", run: delta_2lip },
    Suite { name: "diam-2lip", module: "fset-metric", run: diam_2lip },
    Suite { name: "x2-witness", module: "fset-metric", run: x2_witness },
    Suite { name: "proximal-bijection", module: "fset-metric", run: proximal_bijection_check },
    Suite { name: "reduce-idempotent", module: "relations", run: |c| relation_suites(c, "reduce-idempotent") },
    Suite { name: "reduce-size", module: "relations", run: |c| relation_suites(c, "reduce-size") },
    Suite { name: "decompose-roundtrip", module: "relations", run: |c| relation_suites(c, "decompose-roundtrip") },
    Suite { name: "quasigeodesic-modulus", module: "paths", run: quasigeodesic_modulus },
    Suite { name: "relation-leg-modulus", module: "paths", run: relation_leg_modulus },
    Suite { name: "x2-geodesic", module: "paths", run: x2_geodesic },
    Suite { name: "path-length", module: "paths", run: path_length_check },
    Suite { name: "spaced-property", module: "paths", run: spaced_property },
    Suite { name: "spaced-sharpness", module: "paths", run: spaced_sharpness },
    Suite { name: "selector-equivariance", module: "selector", run: selector_equivariance },
    Suite { name: "selector-membership", module: "selector", run: selector_membership },
    Suite { name: "selector-lipschitz", module: "selector", run: selector_lipschitz },
    Suite { name: "hull-contraction", module: "selector", run: hull_contraction },
    Suite { name: "retraction-identity", module: "retract", run: retraction_identity },
    Suite { name: "r2-lipschitz", module: "retract", run: r2_lipschitz },
    Suite { name: "r3-lipschitz", module: "retract", run: r3_lipschitz },
    Suite { name: "r3-strips", module: "retract", run: r3_strips },
    Suite { name: "interp3-pieces", module: "retract", run: interp3_pieces },
    Suite { name: "thin-proximity", module: "retract", run: thin_proximity },
    Suite { name: "base-point-invariance", module: "retract", run: base_point_invariance },
    Suite { name: "rn2-equivariance", module: "retract", run: rn2_equivariance },
    Suite { name: "rn2-lipschitz", module: "retract", run: rn2_lipschitz },
    Suite { name: "flow-speed", module: "flow", run: |c| flow_suite(c, "flow-speed") },
    Suite { name: "collision-sandwich", module: "flow", run: |c| flow_suite(c, "collision-sandwich") },
    Suite { name: "time-translation", module: "flow", run: |c| flow_suite(c, "time-translation") },
    Suite { name: "closest-pair-decay", module: "flow", run: |c| flow_suite(c, "closest-pair-decay") },
    Suite { name: "flow-proximity", module: "flow", run: |c| flow_suite(c, "flow-proximity") },
    Suite { name: "two-flow-contraction", module: "flow", run: |c| flow_suite(c, "two-flow-contraction") },
    Suite { name: "holder-estimate", module: "flow", run: holder_estimate },
];

const MODULES: [&str; 7] = ["normed-core", "fset-metric", "relations", "paths", "selector", "retract", "flow"];

/// Every accepted suite identifier: single invariants, module groups and `all`.
pub fn suite_names() -> Vec<&'static str> {
    let mut v: Vec<&str> = SUITES.iter().map(|s| s.name).collect();
    v.extend(MODULES);
    v.push("all");
    v
}

/// Runs a suite or group and assembles its report.
pub fn verify(suite: &str, cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let selected: Vec<&Suite> = if suite == "all" {
        SUITES.iter().collect()
    } else if MODULES.contains(&suite) {
        SUITES.iter().filter(|s| s.module == suite).collect()
    } else {
        SUITES.iter().filter(|s| s.name == suite).collect()
    };
    if selected.is_empty() {
        return Err(Error::UnknownSuite(suite.to_string()));
    }
    let start = Instant::now();
    let mut checks = Vec::new();
    for s in selected {
        checks.extend((s.run)(cfg)?);
    }
    let mut anchors: Vec<String> = checks.iter().map(|c| c.anchor.clone()).collect();
    anchors.dedup();
    let runtime_ms = if cfg.timing { start.elapsed().as_millis() as u64 } else { 0 };
    Ok(Report { suite: suite.to_string(), anchors, config: cfg.clone(), checks, runtime_ms })
}
