//! The `--oracle` grammar: `exact`, `greedy`, or `lp:<bdks>` for the problems that
//! have an LP route.

use std::fmt;
use std::str::FromStr;

use densekit::dkc_gp::{LpDkc, LpGp};
use densekit::dks::{ExactBdks, ExactDks, GreedyBdks, GreedyDks};
use densekit::gp_mbcs::{ExactMbcs, GreedyMbcs, MbcsViaGp};
use densekit::oracle::{BdksOracle, DkcOracle, DksOracle, GpOracle, MbcsOracle};
use densekit::solvers::{ExactDkc, ExactGp, GreedyDkc, GreedyGp};
use densekit::Profile;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Base {
    Exact,
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleSpec {
    Base(Base),
    /// LP pipeline driven by the given BDkS oracle.
    Lp(Base),
}

impl FromStr for OracleSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let base = |t: &str| match t {
            "exact" | "exact-bdks" => Some(Base::Exact),
            "greedy" | "greedy-bdks" => Some(Base::Greedy),
            _ => None,
        };
        match s.strip_prefix("lp:") {
            Some(sub) => base(sub).map(OracleSpec::Lp).ok_or_else(|| format!("unknown lp sub-oracle `{sub}`")),
            None => match s {
                "exact" => Ok(OracleSpec::Base(Base::Exact)),
                "greedy" => Ok(OracleSpec::Base(Base::Greedy)),
                _ => Err(format!("unknown oracle `{s}` (expected exact, greedy or lp:<sub>)")),
            },
        }
    }
}

impl fmt::Display for OracleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |b: &Base| match b {
            Base::Exact => "exact",
            Base::Greedy => "greedy",
        };
        match self {
            OracleSpec::Base(b) => f.write_str(name(b)),
            OracleSpec::Lp(b) => write!(f, "lp:{}-bdks", name(b)),
        }
    }
}

fn no_lp(problem: &str) -> CliError {
    CliError::Usage(format!("{problem} has no lp route; use exact or greedy"))
}

pub fn bdks_base(b: Base) -> Box<dyn BdksOracle> {
    match b {
        Base::Exact => Box::new(ExactBdks::default()),
        Base::Greedy => Box::new(GreedyBdks),
    }
}

pub fn dks(spec: OracleSpec) -> Result<Box<dyn DksOracle>, CliError> {
    match spec {
        OracleSpec::Base(Base::Exact) => Ok(Box::new(ExactDks::default())),
        OracleSpec::Base(Base::Greedy) => Ok(Box::new(GreedyDks)),
        OracleSpec::Lp(_) => Err(no_lp("dks")),
    }
}

pub fn bdks(spec: OracleSpec) -> Result<Box<dyn BdksOracle>, CliError> {
    match spec {
        OracleSpec::Base(b) => Ok(bdks_base(b)),
        OracleSpec::Lp(_) => Err(no_lp("bdks")),
    }
}

pub fn dkc(spec: OracleSpec, profile: Profile, seed: u64) -> Box<dyn DkcOracle> {
    match spec {
        OracleSpec::Base(Base::Exact) => Box::new(ExactDkc::default()),
        OracleSpec::Base(Base::Greedy) => Box::new(GreedyDkc),
        OracleSpec::Lp(b) => Box::new(LpDkc { bdks: bdks_base(b), cfg: profile.lp(), seed }),
    }
}

pub fn gp(spec: OracleSpec, profile: Profile, seed: u64) -> Box<dyn GpOracle> {
    match spec {
        OracleSpec::Base(Base::Exact) => Box::new(ExactGp::default()),
        OracleSpec::Base(Base::Greedy) => Box::new(GreedyGp),
        OracleSpec::Lp(b) => Box::new(LpGp { bdks: bdks_base(b), cfg: profile.lp(), seed }),
    }
}

pub fn mbcs(spec: OracleSpec, profile: Profile, seed: u64) -> Box<dyn MbcsOracle> {
    match spec {
        OracleSpec::Base(Base::Exact) => Box::new(ExactMbcs::default()),
        OracleSpec::Base(Base::Greedy) => Box::new(GreedyMbcs),
        OracleSpec::Lp(_) => Box::new(MbcsViaGp { gp: gp(spec, profile, seed), profile: profile.cut() }),
    }
}
