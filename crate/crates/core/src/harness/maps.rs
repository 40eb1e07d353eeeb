//! Maps under test, addressed by name.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::error::{Error, Result};
use crate::flow::holder_retraction;
use crate::fset::FSet;
use crate::norm::Point;
use crate::retract::{r2, r3, rn2};
use crate::selector::selector_retraction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapId {
    Identity,
    Dilate2,
    R2,
    R3,
    Rn2,
    Selector,
    Holder,
}

impl MapId {
    pub const ALL: [MapId; 7] = [
        MapId::Identity,
        MapId::Dilate2,
        MapId::R2,
        MapId::R3,
        MapId::Rn2,
        MapId::Selector,
        MapId::Holder,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MapId::Identity => "identity",
            MapId::Dilate2 => "dilate2",
            MapId::R2 => "r2",
            MapId::R3 => "r3",
            MapId::Rn2 => "rn2",
            MapId::Selector => "selector",
            MapId::Holder => "holder",
        }
    }

    /// The Lipschitz constant the map is known to satisfy, when there is one.
    pub fn lipschitz_bound(&self) -> Option<f64> {
        match self {
            MapId::Identity => Some(1.0),
            MapId::Dilate2 => Some(2.0),
            MapId::R2 => Some(1.0),
            MapId::R3 => Some(731.0),
            MapId::Rn2 | MapId::Selector | MapId::Holder => None,
        }
    }

    pub fn apply(&self, x: &FSet, cfg: &RunConfig) -> Result<FSet> {
        match self {
            MapId::Identity => Ok(x.clone()),
            MapId::Dilate2 => Ok(x.affine(2.0, &Point::zeros(x.dim()))),
            MapId::R2 => r2(x),
            MapId::R3 => r3(x),
            MapId::Rn2 => rn2(x, cfg.tau, &cfg.selector),
            MapId::Selector => Ok(selector_retraction(x, &cfg.selector)),
            MapId::Holder => holder_retraction(x, &cfg.flow),
        }
    }
}

impl fmt::Display for MapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MapId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MapId::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMap(s.to_string()))
    }
}
