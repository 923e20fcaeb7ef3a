//! End-to-end protocol executors.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::scalar::Scalar;
use crate::slocc::{slocc_project, ProjectionResult};
use crate::state::{LocalMode, ManyBodyState, NormalizedState, ProductKet, Spin, Statistics};

use super::bell::{bell_measure, bell_state, fidelity, identify_bell, BellLabel, BellTarget};
use super::network::{NetworkSpec, Topology};

/// How intermediate Bell measurements are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasurementMode {
    /// Follow every outcome and return the full tree.
    Enumerate,
    /// Draw one outcome per level from a seeded generator.
    Sample { seed: u64 },
}

/// One root-to-leaf path of a cascaded Bell measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchOutcome {
    pub outcome_sequence: Vec<(BellTarget, BellLabel)>,
    /// Product of conditional outcome probabilities along the path.
    pub branch_probability: Scalar,
    pub final_ab_label: Option<BellLabel>,
    pub final_ab_state: NormalizedState,
}

/// Measures `targets` in order, branching on every outcome (or sampling one).
pub fn measure_cascade(
    state: &NormalizedState,
    targets: &[BellTarget],
    mode: MeasurementMode,
) -> Result<Vec<BranchOutcome>, Error> {
    let mut rng = match mode {
        MeasurementMode::Sample { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        MeasurementMode::Enumerate => None,
    };
    let mut out = Vec::new();
    descend(
        state,
        targets,
        Vec::new(),
        Scalar::one(),
        rng.as_mut(),
        &mut out,
    )?;
    Ok(out)
}

fn descend(
    state: &NormalizedState,
    targets: &[BellTarget],
    path: Vec<(BellTarget, BellLabel)>,
    probability: Scalar,
    mut rng: Option<&mut ChaCha8Rng>,
    out: &mut Vec<BranchOutcome>,
) -> Result<(), Error> {
    let Some((target, rest)) = targets.split_first() else {
        let label = if state.particle_number() == 2 {
            identify_bell(state)?
        } else {
            None
        };
        out.push(BranchOutcome {
            outcome_sequence: path,
            branch_probability: probability,
            final_ab_label: label,
            final_ab_state: state.clone(),
        });
        return Ok(());
    };
    let branches = bell_measure(state, target)?;
    let chosen: Vec<_> = match rng.as_deref_mut() {
        None => branches,
        Some(rng) => vec![sample_branch(branches, rng)?],
    };
    for b in chosen {
        let mut next = path.clone();
        next.push((b.target.clone(), b.label));
        descend(
            &b.residual,
            rest,
            next,
            &probability * &b.probability,
            rng.as_deref_mut(),
            out,
        )?;
    }
    Ok(())
}

/// Picks a branch by comparing a uniform 64-bit draw, read as an exact
/// dyadic rational in [0, 1), against cumulative outcome probabilities.
fn sample_branch<T: HasProbability>(branches: Vec<T>, rng: &mut ChaCha8Rng) -> Result<T, Error> {
    let draw = BigRational::new(
        BigInt::from(rng.next_u64()),
        BigInt::one() << 64usize,
    );
    let mut cumulative = BigRational::from_integer(0.into());
    let count = branches.len();
    for (i, b) in branches.into_iter().enumerate() {
        let p = b.probability();
        match p.to_rational() {
            Some(r) => cumulative += r,
            None => {
                // irrational probabilities never arise from Bell projections of
                // these networks; approximate if they do
                let approx = BigRational::from_float(p.to_f64()).ok_or(Error::DivisionByZero)?;
                cumulative += approx;
            }
        }
        if draw < cumulative || i + 1 == count {
            return Ok(b);
        }
    }
    Err(Error::ZeroNorm)
}

trait HasProbability {
    fn probability(&self) -> &Scalar;
}

impl HasProbability for super::bell::BellBranch {
    fn probability(&self) -> &Scalar {
        &self.probability
    }
}

/// Result of the fermionic shared-node transfer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferReport {
    pub probability: Scalar,
    pub post_state: NormalizedState,
    /// Fidelity of the post-selected state with ⊗ᵢ|Mᵢ↑,Mᵢ↓⟩ ∧ Ψ⁻_AB.
    pub structure_fidelity: Scalar,
    pub ab_state: NormalizedState,
    /// Fidelity of the A–B state with Ψ⁻.
    pub fidelity: Scalar,
}

/// Fermionic chain with `pairs` pairs: prepare, count one particle at A and B
/// (hence two at every Mᵢ), read off the A–B state.
pub fn run_fermionic_transfer(pairs: usize) -> Result<TransferReport, Error> {
    let spec = NetworkSpec::new(pairs, Topology::SharedChain, Statistics::Fermion)?;
    run_fermionic_transfer_spec(&spec)
}

pub fn run_fermionic_transfer_spec(spec: &NetworkSpec) -> Result<TransferReport, Error> {
    if spec.statistics() != Statistics::Fermion || spec.topology() != Topology::SharedChain {
        return Err(Error::InvalidNetwork(
            "fermionic transfer needs a fermionic shared chain".into(),
        ));
    }
    let prepared = spec.prepare_state()?;
    let ProjectionResult {
        probability,
        post_state,
    } = slocc_project(&prepared, &spec.post_selection())?;
    let post_state = post_state.ok_or(Error::ZeroNorm)?;

    let expected = expected_fermionic_post_state(spec)?;
    let structure_fidelity = post_state.fidelity(&expected)?;

    // Two fermions at one node have a single joint state, so each
    // intermediate measurement has one outcome.
    let leaves = measure_cascade(
        &post_state,
        &spec.intermediate_targets(),
        MeasurementMode::Enumerate,
    )?;
    let [leaf] = <[BranchOutcome; 1]>::try_from(leaves).map_err(|_| Error::NotABellState)?;
    let fidelity = fidelity(&leaf.final_ab_state, BellLabel::PsiMinus)?;
    Ok(TransferReport {
        probability,
        post_state,
        structure_fidelity,
        ab_state: leaf.final_ab_state,
        fidelity,
    })
}

/// |M₁↑,M₁↓, …, M_k↑,M_k↓⟩ ∧ Ψ⁻_AB.
pub fn expected_fermionic_post_state(spec: &NetworkSpec) -> Result<NormalizedState, Error> {
    let stats = spec.statistics();
    let (a, b) = spec.end_nodes();
    let mut modes: Vec<LocalMode> = Vec::new();
    for t in spec.intermediate_targets() {
        if let BellTarget::SameNode(m) = t {
            modes.push(m.with(Spin::Up));
            modes.push(m.with(Spin::Down));
        }
    }
    let centre = ManyBodyState::from_ket(ProductKet::localized(stats, modes));
    let ab = bell_state(BellLabel::PsiMinus, &BellTarget::Pair(a, b), stats)?;
    centre.wedge(&ab)?.normalize()
}

/// Result of a post-selection followed by a cascade of Bell measurements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CascadeReport {
    /// Post-selection probability; every Bell outcome leaves a Bell pair, so
    /// this is also the protocol success probability.
    pub success_probability: Scalar,
    pub post_state: NormalizedState,
    pub branches: Vec<BranchOutcome>,
}

/// Bosonic shared chain: prepare, count two particles per Mᵢ, then
/// Bell-measure M₁, …, M_k in order.
pub fn run_bosonic_cascade(pairs: usize, mode: MeasurementMode) -> Result<CascadeReport, Error> {
    let spec = NetworkSpec::new(pairs, Topology::SharedChain, Statistics::Boson)?;
    run_cascade(&spec, mode)
}

/// Separated nodes: prepare, count one particle per node, then Bell-measure
/// the inner pairs (C₁D₁ first).
pub fn run_separated_swap(
    pairs: usize,
    statistics: Statistics,
    mode: MeasurementMode,
) -> Result<CascadeReport, Error> {
    let spec = NetworkSpec::new(pairs, Topology::Separated, statistics)?;
    run_cascade(&spec, mode)
}

/// Generic executor: post-select on the spec's counting pattern and measure
/// its intermediate targets.
pub fn run_cascade(spec: &NetworkSpec, mode: MeasurementMode) -> Result<CascadeReport, Error> {
    run_cascade_with_targets(spec, &spec.intermediate_targets(), mode)
}

/// Like [`run_cascade`] with an explicit measurement order.
pub fn run_cascade_with_targets(
    spec: &NetworkSpec,
    targets: &[BellTarget],
    mode: MeasurementMode,
) -> Result<CascadeReport, Error> {
    let prepared = spec.prepare_state()?;
    let projection = slocc_project(&prepared, &spec.post_selection())?;
    let post_state = projection.post_state.ok_or(Error::ZeroNorm)?;
    let branches = measure_cascade(&post_state, targets, mode)?;
    Ok(CascadeReport {
        success_probability: projection.probability,
        post_state,
        branches,
    })
}

impl CascadeReport {
    /// Sum of leaf probabilities (1 for a fully enumerated tree).
    pub fn total_branch_probability(&self) -> Scalar {
        self.branches.iter().map(|b| &b.branch_probability).sum()
    }

    pub fn all_leaves_are_bell_states(&self) -> bool {
        self.branches.iter().all(|b| b.final_ab_label.is_some())
    }
}

/// Probability that the prepared state passes the post-selection, from a full
/// state projection.
pub fn direct_probability(spec: &NetworkSpec) -> Result<Scalar, Error> {
    let prepared = spec.prepare_state()?;
    Ok(slocc_project(&prepared, &spec.post_selection())?.probability)
}

/// Float view of a probability for reports.
pub fn probability_f64(p: &Scalar) -> f64 {
    p.to_rational()
        .and_then(|r| r.to_f64())
        .unwrap_or_else(|| p.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    #[test]
    fn fermionic_four_particles() {
        let r = run_fermionic_transfer(2).unwrap();
        assert_eq!(r.probability, q(2, 9));
        assert_eq!(r.structure_fidelity, Scalar::one());
        assert_eq!(r.fidelity, Scalar::one());
    }

    #[test]
    fn fermionic_six_particles() {
        let r = run_fermionic_transfer(3).unwrap();
        assert_eq!(r.probability, q(1, 8));
        assert_eq!(r.fidelity, Scalar::one());
    }

    #[test]
    fn fermionic_same_spin_pairs_vanish() {
        let spec = NetworkSpec::with_spins(
            2,
            Topology::SharedChain,
            Statistics::Fermion,
            vec![Spin::Down; 4],
        )
        .unwrap();
        assert!(matches!(run_fermionic_transfer_spec(&spec), Err(Error::ZeroNorm)));
    }

    #[test]
    fn bosons_need_a_fermionic_runner_check() {
        let spec = NetworkSpec::new(2, Topology::SharedChain, Statistics::Boson).unwrap();
        assert!(run_fermionic_transfer_spec(&spec).is_err());
    }

    #[test]
    fn bosonic_four_particles() {
        let r = run_bosonic_cascade(2, MeasurementMode::Enumerate).unwrap();
        assert_eq!(r.success_probability, q(6, 25));
        assert_eq!(r.branches.len(), 3);
        for b in &r.branches {
            assert_eq!(b.branch_probability, q(1, 3));
        }
        let pairs: Vec<_> = r
            .branches
            .iter()
            .map(|b| (b.outcome_sequence[0].1, b.final_ab_label.unwrap()))
            .collect();
        assert_eq!(
            pairs,
            [
                (BellLabel::SameNodePsi, BellLabel::PsiPlus),
                (BellLabel::SameNodePhiPlus, BellLabel::PhiPlus),
                (BellLabel::SameNodePhiMinus, BellLabel::PhiMinus),
            ]
        );
    }

    #[test]
    fn separated_four_particles() {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let r = run_separated_swap(2, stats, MeasurementMode::Enumerate).unwrap();
            assert_eq!(r.success_probability, q(1, 4));
            assert_eq!(r.branches.len(), 4);
            assert_eq!(r.total_branch_probability(), Scalar::one());
            assert!(r.all_leaves_are_bell_states());
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = run_bosonic_cascade(3, MeasurementMode::Sample { seed: 7 }).unwrap();
        let b = run_bosonic_cascade(3, MeasurementMode::Sample { seed: 7 }).unwrap();
        assert_eq!(a.branches, b.branches);
        assert_eq!(a.branches.len(), 1);
        assert_eq!(a.branches[0].outcome_sequence.len(), 2);
        // over many seeds every first-level outcome shows up
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..40 {
            let r = run_bosonic_cascade(2, MeasurementMode::Sample { seed }).unwrap();
            seen.insert(r.branches[0].outcome_sequence[0].1);
        }
        assert_eq!(seen.len(), 3);
    }
}
