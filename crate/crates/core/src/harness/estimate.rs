//! Empirical Lipschitz and Hölder ratios over sampled pairs.

use rayon::prelude::*;
use serde::Serialize;

use super::maps::MapId;
use super::sample::{sample_pair, sample_pair_in_range, Stratum};
use super::RunConfig;
use crate::error::{Error, Result};
use crate::flow::holder_bound;
use crate::fset::{hausdorff, FSet};

/// Pairs closer than this are skipped.
pub const MIN_PAIR_DISTANCE: f64 = 1e-12;

/// One evaluated pair; `ratio` is `d_H_out / d_H_in` for Lipschitz runs and
/// `d_H_out / bound` for Hölder runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub pair_id: u64,
    #[serde(rename = "d_H_in")]
    pub d_h_in: f64,
    #[serde(rename = "d_H_out")]
    pub d_h_out: f64,
    pub ratio: f64,
    pub bound: Option<f64>,
    pub stratum: Stratum,
}

#[derive(Debug, Clone, Serialize)]
pub struct Estimate {
    pub map: MapId,
    pub max_ratio: f64,
    pub witness: Option<(FSet, FSet)>,
    pub pairs: usize,
    pub skipped: usize,
    #[serde(skip)]
    pub rows: Vec<RatioRow>,
}

impl Estimate {
    /// Running maximum of the ratio over the first `k` sampled pairs.
    pub fn running_max(&self, k: usize) -> f64 {
        self.rows.iter().filter(|r| (r.pair_id as usize) < k).map(|r| r.ratio).fold(0.0, f64::max)
    }

    /// CSV with columns `pair_id, d_H_in, d_H_out, ratio, bound, stratum`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["pair_id", "d_H_in", "d_H_out", "ratio", "bound", "stratum"])?;
        for r in &self.rows {
            out.write_record([
                r.pair_id.to_string(),
                r.d_h_in.to_string(),
                r.d_h_out.to_string(),
                r.ratio.to_string(),
                r.bound.map(|b| b.to_string()).unwrap_or_default(),
                r.stratum.name().to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

struct Sampled {
    row: Option<RatioRow>,
    x: FSet,
    y: FSet,
}

/// Deterministic reduction: largest ratio, earliest pair on ties.
fn reduce(map: MapId, items: Vec<Sampled>) -> Estimate {
    let mut best: Option<(f64, usize)> = None;
    let mut rows = Vec::with_capacity(items.len());
    let mut skipped = 0;
    for (k, it) in items.iter().enumerate() {
        match &it.row {
            Some(r) => {
                if best.is_none_or(|(b, _)| r.ratio > b) {
                    best = Some((r.ratio, k));
                }
                rows.push(r.clone());
            }
            None => skipped += 1,
        }
    }
    let witness = best.map(|(_, k)| (items[k].x.clone(), items[k].y.clone()));
    Estimate { map, max_ratio: best.map_or(0.0, |b| b.0), witness, pairs: rows.len(), skipped, rows }
}

/// `max d_H(F x, F y) / d_H(x, y)` over `cfg.samples` stratified pairs.
pub fn estimate_lipschitz(map: MapId, cfg: &RunConfig) -> Result<Estimate> {
    cfg.validate()?;
    let items = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|k| -> Result<Sampled> {
            let (x, y, stratum) = sample_pair(cfg, k);
            let d_in = hausdorff(&x, &y)?;
            if d_in < MIN_PAIR_DISTANCE {
                return Ok(Sampled { row: None, x, y });
            }
            let d_out = hausdorff(&map.apply(&x, cfg)?, &map.apply(&y, cfg)?)?;
            let row = RatioRow {
                pair_id: k,
                d_h_in: d_in,
                d_h_out: d_out,
                ratio: d_out / d_in,
                bound: map.lipschitz_bound(),
                stratum,
            };
            Ok(Sampled { row: Some(row), x, y })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reduce(map, items))
}

/// `max d_H(r x, r y) / holder_bound(x, y)` for the flow retraction over
/// pairs with `d_H` in `[1e-3, 1] * scale`.
pub fn estimate_holder(map: MapId, cfg: &RunConfig) -> Result<Estimate> {
    if map != MapId::Holder {
        return Err(Error::Argument(format!("Hölder estimates are defined for `holder`, not `{map}`")));
    }
    cfg.validate()?;
    let items = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|k| -> Result<Sampled> {
            let (x, y, stratum) = sample_pair_in_range(cfg, k, 1e-3 * cfg.scale, cfg.scale);
            let d_in = hausdorff(&x, &y)?;
            let bound = holder_bound(&x, &y)?;
            if d_in < MIN_PAIR_DISTANCE || bound == 0.0 {
                return Ok(Sampled { row: None, x, y });
            }
            let d_out = hausdorff(&map.apply(&x, cfg)?, &map.apply(&y, cfg)?)?;
            let row = RatioRow { pair_id: k, d_h_in: d_in, d_h_out: d_out, ratio: d_out / bound, bound: Some(bound), stratum };
            Ok(Sampled { row: Some(row), x, y })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reduce(map, items))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::Exponent;

    #[test]
    fn identity_and_dilation() {
        let cfg = RunConfig { samples: 300, n: 4, ..RunConfig::default() };
        assert_eq!(estimate_lipschitz(MapId::Identity, &cfg).unwrap().max_ratio, 1.0);
        let e = estimate_lipschitz(MapId::Dilate2, &cfg).unwrap();
        assert!((e.max_ratio - 2.0).abs() < 1e-12);
    }

    #[test]
    fn r2_is_nonexpanding() {
        for p in [1.0, 2.0, f64::INFINITY] {
            let cfg = RunConfig { samples: 2000, n: 2, dim: 3, p: Exponent(p), ..RunConfig::default() };
            assert!(estimate_lipschitz(MapId::R2, &cfg).unwrap().max_ratio <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn thread_count_does_not_matter() {
        let cfg = RunConfig { samples: 200, n: 3, ..RunConfig::default() };
        let a = estimate_lipschitz(MapId::R3, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| estimate_lipschitz(MapId::R3, &cfg).unwrap());
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.max_ratio, b.max_ratio);
    }

    #[test]
    fn holder_closed_form_pairs() {
        // {0, a} and {0, b} in X(2) collapse to their midpoints
        let cfg = RunConfig::default();
        let x = FSet::on_line(&[0.0, 0.6], 2).unwrap();
        let y = FSet::on_line(&[0.0, 0.2], 2).unwrap();
        let rx = MapId::Holder.apply(&x, &cfg).unwrap();
        let ry = MapId::Holder.apply(&y, &cfg).unwrap();
        let out = hausdorff(&rx, &ry).unwrap();
        assert!((out - 0.2).abs() < 1e-7);
        let bound = holder_bound(&x, &y).unwrap();
        assert!((bound - 6.0 * 0.6f64.powf(2.0 / 3.0) * 0.4f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!(out / bound <= 1.0);
        assert!(estimate_holder(MapId::R2, &cfg).is_err());
    }

    #[test]
    fn csv_has_expected_columns() {
        let cfg = RunConfig { samples: 5, n: 2, ..RunConfig::default() };
        let e = estimate_lipschitz(MapId::R2, &cfg).unwrap();
        let mut buf = Vec::new();
        e.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("pair_id,d_H_in,d_H_out,ratio,bound,stratum\n"));
        assert_eq!(text.lines().count(), 1 + e.pairs);
    }
}
