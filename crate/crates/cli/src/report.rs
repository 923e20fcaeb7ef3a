use indinet::protocol::runners::{probability_f64, run_cascade, run_fermionic_transfer_spec};
use indinet::protocol::{BellLabel, BranchOutcome, MeasurementMode, NetworkSpec, ProtocolKind};
use indinet::Scalar;
use serde::Serialize;

use crate::Failure;

#[derive(Serialize)]
pub struct RunReport {
    pub kind: ProtocolKind,
    pub pairs: usize,
    pub n: usize,
    pub statistics: &'static str,
    pub mode: &'static str,
    /// Exact success probability as "p/q".
    pub probability: String,
    pub probability_float: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_psi_minus: Option<String>,
    pub branches: Vec<BranchRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Serialize)]
pub struct BranchRow {
    pub outcomes: Vec<Outcome>,
    pub probability: String,
    pub probability_float: f64,
    pub final_ab_label: Option<BellLabel>,
}

#[derive(Serialize)]
pub struct Outcome {
    pub target: String,
    pub label: BellLabel,
}

pub fn exact_string(p: &Scalar) -> Result<String, Failure> {
    p.to_rational_string()
        .ok_or_else(|| Failure::Usage(format!("probability {p} is not rational")))
}

fn branch_row(b: &BranchOutcome) -> Result<BranchRow, Failure> {
    Ok(BranchRow {
        outcomes: b
            .outcome_sequence
            .iter()
            .map(|(t, l)| Outcome {
                target: t.to_string(),
                label: *l,
            })
            .collect(),
        probability: exact_string(&b.branch_probability)?,
        probability_float: probability_f64(&b.branch_probability),
        final_ab_label: b.final_ab_label,
    })
}

pub fn run(kind: ProtocolKind, spec: &NetworkSpec, mode: MeasurementMode) -> Result<RunReport, Failure> {
    let fidelity = match kind {
        ProtocolKind::FermionicShared => Some(run_fermionic_transfer_spec(spec)?.fidelity),
        _ => None,
    };
    let cascade = run_cascade(spec, mode)?;
    let p = &cascade.success_probability;
    Ok(RunReport {
        kind,
        pairs: spec.pairs(),
        n: spec.particle_number(),
        statistics: spec.statistics().name(),
        mode: match mode {
            MeasurementMode::Enumerate => "enumerate",
            MeasurementMode::Sample { .. } => "sample",
        },
        probability: exact_string(p)?,
        probability_float: probability_f64(p),
        fidelity_psi_minus: fidelity.as_ref().map(exact_string).transpose()?,
        branches: cascade.branches.iter().map(branch_row).collect::<Result<_, _>>()?,
        elapsed_ms: None,
    })
}
