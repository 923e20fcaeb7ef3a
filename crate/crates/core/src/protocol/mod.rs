//! Entanglement-transfer protocols on chains of delocalized particle pairs.
//!
//! Three schemes are supported: fermions with shared intermediate nodes (no
//! Bell measurement needed), bosons with shared intermediate nodes (one Bell
//! measurement per node), and either statistics with separated intermediate
//! nodes (standard swapping on node pairs).

pub mod bell;
pub mod closed_form;
pub mod network;
pub mod runners;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;

pub use bell::{bell_measure, bell_state, fidelity, identify_bell, BellBranch, BellLabel, BellTarget};
pub use closed_form::{closed_form_probability, closed_form_with_gram, network_for};
pub use network::{chain_gram, NetworkSpec, Topology};
pub use runners::{
    direct_probability, measure_cascade, run_bosonic_cascade, run_cascade, run_fermionic_transfer,
    run_separated_swap, BranchOutcome, CascadeReport, MeasurementMode, TransferReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Separated,
    FermionicShared,
    BosonicShared,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [
        ProtocolKind::Separated,
        ProtocolKind::FermionicShared,
        ProtocolKind::BosonicShared,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::Separated => "separated",
            ProtocolKind::FermionicShared => "fermionic_shared",
            ProtocolKind::BosonicShared => "bosonic_shared",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProtocolKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parse(s.to_string()))
    }
}
