//! Named parameter presets. `desk` keeps every branch reachable on small inputs;
//! `paper` uses the constants from the analysis.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::csp::{Csp2Instance, CspConfig, CspProfile};
use crate::dkc_gp::LpConfig;
use crate::error::Error;
use crate::gp_mbcs::CutProfile;
use crate::inflate::InflationConfig;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Desk,
    Paper,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Desk => "desk",
            Profile::Paper => "paper",
        }
    }

    pub fn inflation(self) -> InflationConfig {
        match self {
            Profile::Desk => InflationConfig::desk(),
            Profile::Paper => InflationConfig::paper(),
        }
    }

    pub fn cut(self) -> CutProfile {
        match self {
            Profile::Desk => CutProfile::desk(),
            Profile::Paper => CutProfile::paper(),
        }
    }

    /// The LP pipelines take the same knobs under both presets.
    pub fn lp(self) -> LpConfig {
        LpConfig::default()
    }

    pub fn csp(self, inst: &Csp2Instance, alpha: f64) -> CspConfig {
        CspConfig::new(
            match self {
                Profile::Desk => CspProfile::Desk,
                Profile::Paper => CspProfile::Paper,
            },
            inst,
            alpha,
        )
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(Error::InvalidParameter(format!("unknown profile `{other}`"))),
        }
    }
}
