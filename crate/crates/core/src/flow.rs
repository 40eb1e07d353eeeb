//! The collision flow `du_i/dt = -J_i(u)`, `J_i = sum_{j != i} (u_i - u_j) / |u_i - u_j|`,
//! integrated up to the first collision, and the Hölder retraction
//! `X(n) -> X(n-1)` it induces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, FlowDiagnostics, Result};
use crate::fset::{diam_points, hausdorff, same_spec, FSet};
use crate::norm::{NormSpec, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    /// The flow stops once the minimum pairwise distance drops to this.
    pub eps_coll: f64,
    /// Step cap factor `theta` in `h <= theta * delta / (4 (n - 1))`.
    pub step_safety: f64,
    pub max_steps: usize,
    /// Terminal points closer than `merge_factor * eps_coll` are merged.
    pub merge_factor: f64,
    /// Record every accepted step.
    pub trace: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { eps_coll: 1e-8, step_safety: 0.1, max_steps: 1_000_000, merge_factor: 4.0, trace: false }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_coll > 0.0 && self.eps_coll.is_finite()) {
            return Err(Error::Argument(format!("eps_coll must be positive, got {}", self.eps_coll)));
        }
        if !(self.step_safety > 0.0 && self.step_safety < 1.0) {
            return Err(Error::Argument(format!("step_safety must lie in (0, 1), got {}", self.step_safety)));
        }
        if !(self.merge_factor >= 1.0 && self.merge_factor.is_finite()) {
            return Err(Error::Argument(format!("merge_factor must be at least 1, got {}", self.merge_factor)));
        }
        if self.max_steps == 0 {
            return Err(Error::Argument("max_steps must be positive".into()));
        }
        Ok(())
    }
}

/// One accepted integration step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: f64,
    pub min_separation: f64,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowResult {
    /// Time at which the minimum separation first dropped to `eps_coll`.
    pub collision_time: f64,
    /// The labeled configuration at that time, in the input order.
    pub terminal: Vec<Point>,
    /// The terminal configuration with colliding clusters merged, in `X(n-1)`.
    pub retract: FSet,
    pub steps: usize,
    pub rejected_steps: usize,
    pub trace: Vec<TraceRow>,
}

fn check_flow_input(x: &FSet) -> Result<usize> {
    let n = x.ambient_n();
    if n < 2 {
        return Err(Error::Domain(format!("the collision flow needs n >= 2, got {n}")));
    }
    if x.len() < n {
        return Err(Error::Domain(format!(
            "collision time is undefined for {} points in X({n}); the retraction is the identity there",
            x.len()
        )));
    }
    Ok(n)
}

/// `(J_1, ..., J_n)` for pairwise distinct points.
pub fn flow_field(u: &[Point], spec: &NormSpec) -> Result<Vec<Point>> {
    let n = u.len();
    let d = spec.dim();
    let mut out = vec![vec![0.0; d]; n];
    for i in 0..n {
        spec.check_dim(&u[i])?;
        for j in i + 1..n {
            let diff: Vec<f64> = u[i].iter().zip(u[j].iter()).map(|(a, b)| a - b).collect();
            let len = spec.norm_of(&diff);
            if len == 0.0 {
                return Err(Error::Domain(format!("points {i} and {j} coincide")));
            }
            for k in 0..d {
                let e = diff[k] / len;
                out[i][k] += e;
                out[j][k] -= e;
            }
        }
    }
    Ok(out.into_iter().map(Point::from_raw).collect())
}

/// `(delta / (2 (n - 1)), delta / 2)` for a set of full cardinality.
pub fn collision_time_bounds(x: &FSet) -> Result<(f64, f64)> {
    let n = check_flow_input(x)?;
    let delta = crate::fset::min_sep(x);
    Ok((delta / (2.0 * (n as f64 - 1.0)), delta / 2.0))
}

fn min_pairwise(u: &[Vec<f64>], spec: &NormSpec) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            best = best.min(spec.dist(&u[i], &u[j]));
        }
    }
    best
}

fn rhs(u: &[Vec<f64>], spec: &NormSpec, out: &mut [Vec<f64>]) {
    for o in out.iter_mut() {
        o.iter_mut().for_each(|v| *v = 0.0);
    }
    let d = spec.dim();
    let mut diff = vec![0.0; d];
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            for k in 0..d {
                diff[k] = u[i][k] - u[j][k];
            }
            let len = spec.norm_of(&diff);
            for k in 0..d {
                let e = diff[k] / len;
                out[i][k] -= e;
                out[j][k] += e;
            }
        }
    }
}

// Dormand-Prince 5(4) tableau; the field is autonomous so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const RTOL: f64 = 1e-11;
const ATOL_REL: f64 = 1e-12;

struct Run {
    t: f64,
    u: Vec<Vec<f64>>,
    steps: usize,
    rejected: usize,
    trace: Vec<TraceRow>,
}

/// Integrates from `u0` until the separation reaches `eps_coll` or the time
/// reaches `stop_at`, whichever comes first.
fn integrate(u0: Vec<Vec<f64>>, spec: &NormSpec, cfg: &FlowConfig, stop_at: f64) -> Result<Run> {
    cfg.validate()?;
    let n = u0.len();
    let d = spec.dim();
    let scale = diam_points(spec, &u0.iter().cloned().map(Point::from_raw).collect::<Vec<_>>()).max(f64::MIN_POSITIVE);
    let atol = ATOL_REL * scale;
    let mut u = u0;
    let mut t = 0.0;
    let mut steps = 0;
    let mut rejected = 0;
    let mut trace = Vec::new();
    let mut k: Vec<Vec<Vec<f64>>> = vec![vec![vec![0.0; d]; n]; 7];
    let mut stage = vec![vec![0.0; d]; n];
    let mut h_try = f64::INFINITY;
    let record = |t: f64, delta: f64, u: &[Vec<f64>], trace: &mut Vec<TraceRow>| {
        trace.push(TraceRow { t, min_separation: delta, points: u.iter().cloned().map(Point::from_raw).collect() })
    };
    let mut delta = min_pairwise(&u, spec);
    if cfg.trace {
        record(t, delta, &u, &mut trace);
    }
    rhs(&u, spec, &mut k[0]);
    while delta > cfg.eps_coll && t < stop_at {
        if steps + rejected >= cfg.max_steps {
            return Err(Error::NonConvergence(FlowDiagnostics { steps: steps + rejected, time: t, min_separation: delta }));
        }
        let cap = cfg.step_safety * delta / (4.0 * (n as f64 - 1.0));
        let mut h = h_try.min(cap);
        let mut landing = false;
        if t + h >= stop_at {
            h = stop_at - t;
            landing = true;
        }
        for s in 1..7 {
            for i in 0..n {
                for c in 0..d {
                    let mut acc = u[i][c];
                    for (r, a) in A[s].iter().enumerate().take(s) {
                        acc += h * a * k[r][i][c];
                    }
                    stage[i][c] = acc;
                }
            }
            rhs(&stage, spec, &mut k[s]);
        }
        // stage now holds the 5th-order solution (FSAL row)
        let mut err: f64 = 0.0;
        for i in 0..n {
            for c in 0..d {
                let e: f64 = h * (0..7).map(|s| (B5[s] - B4[s]) * k[s][i][c]).sum::<f64>();
                let sc = atol + RTOL * u[i][c].abs().max(stage[i][c].abs());
                err = err.max((e / sc).abs());
            }
        }
        if err <= 1.0 || h <= 1e-3 * cap {
            t = if landing { stop_at } else { t + h };
            std::mem::swap(&mut u, &mut stage);
            k.swap(0, 6);
            steps += 1;
            delta = min_pairwise(&u, spec);
            if cfg.trace {
                record(t, delta, &u, &mut trace);
            }
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h_try = h * grow;
        } else {
            rejected += 1;
            h_try = h * (0.9 * err.powf(-0.2)).max(0.2);
        }
    }
    Ok(Run { t, u, steps, rejected, trace })
}

/// Single-linkage clusters at distance `< radius`, each replaced by its mean.
fn merge_clusters(u: &[Vec<f64>], spec: &NormSpec, radius: f64) -> Vec<Point> {
    let n = u.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if spec.dist(&u[i], &u[j]) <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Point>> = Default::default();
    for (i, ui) in u.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(Point::from_raw(ui.clone()));
    }
    groups.values().map(|g| Point::mean(g).expect("nonempty cluster")).collect()
}

/// Runs the flow from a set of full cardinality to its first collision.
pub fn integrate_to_collision(x: &FSet, cfg: &FlowConfig) -> Result<FlowResult> {
    let n = check_flow_input(x)?;
    let spec = *x.spec();
    let u0: Vec<Vec<f64>> = x.points().iter().map(|p| p.coords().to_vec()).collect();
    let run = integrate(u0, &spec, cfg, f64::INFINITY)?;
    let merged = merge_clusters(&run.u, &spec, cfg.merge_factor * cfg.eps_coll);
    let retract = FSet::new(merged, n - 1, spec)?;
    Ok(FlowResult {
        collision_time: run.t,
        terminal: run.u.into_iter().map(Point::from_raw).collect(),
        retract,
        steps: run.steps,
        rejected_steps: run.rejected,
        trace: run.trace,
    })
}

/// The labeled configuration `u(t)` (or the terminal one if the flow
/// collides first) together with the time actually reached.
pub fn flow_state_at(x: &FSet, t: f64, cfg: &FlowConfig) -> Result<(f64, Vec<Point>)> {
    check_flow_input(x)?;
    if !(t >= 0.0) {
        return Err(Error::Argument(format!("flow time must be nonnegative, got {t}")));
    }
    let u0: Vec<Vec<f64>> = x.points().iter().map(|p| p.coords().to_vec()).collect();
    let run = integrate(u0, x.spec(), cfg, t)?;
    Ok((run.t, run.u.into_iter().map(Point::from_raw).collect()))
}

/// `X(n) -> X(n-1)`: the identity on `X(n-1)`, otherwise the merged
/// configuration at the first collision.
pub fn holder_retraction(x: &FSet, cfg: &FlowConfig) -> Result<FSet> {
    let n = x.ambient_n();
    if n < 2 {
        return Err(Error::Domain(format!("the collision flow needs n >= 2, got {n}")));
    }
    if x.len() < n {
        return x.with_ambient(n - 1);
    }
    Ok(integrate_to_collision(x, cfg)?.retract)
}

/// `(2n - 1) diam(x ∪ y)^(1 - 1/(2n-1))`.
pub fn holder_constant(x: &FSet, y: &FSet) -> Result<f64> {
    same_spec(x, y)?;
    let n = x.ambient_n().max(y.ambient_n());
    let k = 2.0 * n as f64 - 1.0;
    let mut all = x.points().to_vec();
    all.extend(y.points().iter().cloned());
    let d = diam_points(x.spec(), &all);
    Ok(k * d.powf(1.0 - 1.0 / k))
}

/// `n (2n - 1) diam(x ∪ y)^(1 - 1/(2n-1)) d_H(x, y)^(1/(2n-1))`.
pub fn holder_bound(x: &FSet, y: &FSet) -> Result<f64> {
    let n = x.ambient_n().max(y.ambient_n());
    let k = 2.0 * n as f64 - 1.0;
    let dh = hausdorff(x, y)?;
    if dh == 0.0 {
        return Ok(0.0);
    }
    Ok(n as f64 * holder_constant(x, y)? * dh.powf(1.0 / k))
}
