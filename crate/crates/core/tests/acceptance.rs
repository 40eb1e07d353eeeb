//! Acceptance run: every criterion at full scale, one verdict line each.
//! Sub-check details are printed indented under the verdict.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use subsetspace::flow::{integrate_to_collision, FlowConfig};
use subsetspace::harness::{estimate_holder, estimate_lipschitz, verify, CheckRecord, MapId, RunConfig};
use subsetspace::norm::{Exponent, Point};
use subsetspace::selector::{steiner_point, SelectorConfig};
use subsetspace::{FSet, NormSpec};

struct Line {
    what: String,
    value: f64,
    threshold: Option<f64>,
    pass: bool,
}

impl Line {
    fn new(what: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { what: what.into(), value, threshold: Some(threshold), pass: value <= threshold }
    }

    fn from_check(prefix: &str, c: &CheckRecord) -> Self {
        Self {
            what: format!("{prefix}{} ({} samples)", c.name, c.samples),
            value: c.max_ratio,
            threshold: c.threshold,
            pass: c.pass && c.samples > 0,
        }
    }
}

type Criterion = (&'static str, fn() -> Vec<Line>);

fn cfg(dim: usize, n: usize, p: f64, samples: usize) -> RunConfig {
    RunConfig { dim, n, p: Exponent(p), samples, ..RunConfig::default() }
}

fn checks(suite: &str, cfg: &RunConfig, prefix: &str) -> Vec<Line> {
    verify(suite, cfg).unwrap().checks.iter().map(|c| Line::from_check(prefix, c)).collect()
}

fn only(suite: &str, check: &str, cfg: &RunConfig, prefix: &str) -> Line {
    let report = verify(suite, cfg).unwrap();
    let c = report.checks.iter().find(|c| c.name == check).unwrap();
    Line::from_check(prefix, c)
}

fn seconds(what: &str, elapsed: Duration, limit: f64) -> Line {
    Line::new(format!("{what} runtime [s]"), elapsed.as_secs_f64(), limit)
}

fn r2_lipschitz() -> Vec<Line> {
    let start = Instant::now();
    let mut out = Vec::new();
    for p in [1.0, 2.0, f64::INFINITY] {
        let e = estimate_lipschitz(MapId::R2, &cfg(3, 2, p, 100_000)).unwrap();
        out.push(Line::new(format!("p={p}: max ratio over {} pairs", e.pairs), e.max_ratio, 1.0 + 1e-9));
    }
    out.push(seconds("total", start.elapsed(), 30.0));
    out
}

fn r3_bound() -> Vec<Line> {
    let c = cfg(2, 3, 2.0, 10_000);
    let mut out = checks("r3-lipschitz", &c, "");
    out.push(only("retraction-identity", "retraction-identity-r3", &c, ""));
    out.extend(checks("r3-strips", &c, ""));
    out
}

fn rn2_retraction() -> Vec<Line> {
    let mut out = Vec::new();
    for n in [4, 5, 6] {
        let c = cfg(2, n, 2.0, 10_000);
        let prefix = format!("n={n}: ");
        out.push(only("retraction-identity", "retraction-identity-rn2", &c, &prefix));
        out.extend(checks("rn2-equivariance", &c, &prefix));
        out.extend(checks("rn2-lipschitz", &c, &prefix));
    }
    out
}

fn flow_closed_forms() -> Vec<Line> {
    let flow = FlowConfig::default();
    let spec = NormSpec::euclidean(1);
    let mut out = Vec::new();
    for (pts, want) in [(vec![0.0, 1.0], 0.5), (vec![-1.0, 0.0, 1.0], 0.0)] {
        let x = FSet::on_line(&pts, pts.len()).unwrap();
        let r = integrate_to_collision(&x, &flow).unwrap();
        out.push(Line::new(format!("{pts:?}: |T - 0.5|"), (r.collision_time - 0.5).abs(), 1e-6));
        let target = FSet::new(vec![Point::new(vec![want]).unwrap()], pts.len() - 1, spec).unwrap();
        out.push(Line::new(format!("{pts:?}: d_H(retract, {{{want}}})"), subsetspace::hausdorff(&r.retract, &target).unwrap(), 1e-6));
    }
    for n in [3, 4, 5] {
        let c = cfg(2, n, 2.0, 1000);
        let prefix = format!("n={n}: ");
        out.extend(checks("collision-sandwich", &c, &prefix));
        out.extend(checks("time-translation", &c, &prefix));
    }
    out
}

fn holder() -> Vec<Line> {
    let start = Instant::now();
    let mut out = Vec::new();
    for n in [3, 4, 5] {
        for p in [2.0, 4.0] {
            let c = cfg(2, n, p, 1000);
            let e = estimate_holder(MapId::Holder, &c).unwrap();
            out.push(Line::new(format!("n={n} p={p}: max d_H(r(x),r(y)) / bound over {} pairs", e.pairs), e.max_ratio, 1.05));
            out.extend(checks("flow-proximity", &c, &format!("n={n} p={p}: ")));
        }
    }
    out.push(seconds("total", start.elapsed(), 600.0));
    out
}

fn quasiconvexity() -> Vec<Line> {
    let c = cfg(2, 3, 2.0, 1000);
    let mut out = checks("quasigeodesic-modulus", &c, "n=3..6: ");
    out.push(only("x2-geodesic", "x2-geodesic", &c, ""));
    out.extend(checks("spaced-sharpness", &c, ""));
    out.extend(checks("spaced-property", &cfg(2, 3, 2.0, 10_000), ""));
    out
}

fn metric_lemmas() -> Vec<Line> {
    let mut out = Vec::new();
    for n in [3, 5] {
        let c = cfg(2, n, 2.0, 100_000);
        out.extend(checks("delta-2lip", &c, &format!("n={n}: ")));
        out.extend(checks("diam-2lip", &c, &format!("n={n}: ")));
    }
    out.extend(checks("proximal-bijection", &cfg(2, 4, 2.0, 10_000), ""));
    out
}

fn normed_core() -> Vec<Line> {
    let c = cfg(3, 3, 2.0, 10_000);
    let mut out = checks("semi-inner-derivative", &c, "");
    out.extend(checks("radial-monotonicity", &c, ""));
    out.extend(checks("dunkl-williams", &c, ""));
    out
}

fn selector() -> Vec<Line> {
    let spec = NormSpec::euclidean(2);
    let tri = FSet::from_coords(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], 3, spec).unwrap();
    let s = steiner_point(&tri, &SelectorConfig::new(1_000_000, 0).unwrap());
    let err = (s[0] - 0.375).abs().max((s[1] - 0.375).abs());
    let mut out = vec![Line::new("right triangle: |s - (3/8, 3/8)|_inf at 10^6 directions", err, 2e-3)];
    for n in [3, 6] {
        let c = cfg(2, n, 2.0, 1000);
        out.extend(checks("selector-membership", &c, &format!("n={n}: ")));
        out.extend(checks("hull-contraction", &c, &format!("n={n}: ")));
    }
    out
}

fn relations() -> Vec<Line> {
    let c = cfg(2, 3, 2.0, 10_000);
    let mut out = checks("reduce-idempotent", &c, "");
    out.extend(checks("decompose-roundtrip", &c, ""));
    out
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("r2 is 1-Lipschitz", r2_lipschitz),
        ("r3 Lipschitz bound and strip constants", r3_bound),
        ("rn2 identity, equivariance and stable Lipschitz estimate", rn2_retraction),
        ("collision flow closed forms, time sandwich, time translation", flow_closed_forms),
        ("Hölder estimate of the flow retraction", holder),
        ("quasiconvexity and sharpness of the constant 2", quasiconvexity),
        ("metric lemmas for separation, diameter, proximal bijections", metric_lemmas),
        ("semi-inner products, radial projection", normed_core),
        ("Steiner selector", selector),
        ("relation reduction and decomposition", relations),
    ];
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = format!("criterion {}", k + 1);
        if filter.as_deref().is_some_and(|f| !id.ends_with(f) && !name.contains(f)) {
            continue;
        }
        let start = Instant::now();
        let lines = run();
        let pass = lines.iter().all(|l| l.pass);
        failed += usize::from(!pass);
        println!("[{}] {id}: {name} ({:.1} s)", if pass { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
        for l in &lines {
            let bound = l.threshold.map_or("recorded".to_string(), |t| format!("<= {t:e}"));
            println!("    {} {}: {:e} ({bound})", if l.pass { "ok  " } else { "FAIL" }, l.what, l.value);
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
