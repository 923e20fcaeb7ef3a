//! Bell bases and projective Bell measurements on two-particle subsystems.
//!
//! For two distinct sites I, J (I before J in node order):
//!
//! ```text
//! Ψ±_IJ = (|I↓,J↑⟩ ± |I↑,J↓⟩)/√2      Φ±_IJ = (|I↓,J↓⟩ ± |I↑,J↑⟩)/√2
//! ```
//!
//! A node M holding two bosons uses `Ψ_M = |M↑,M↓⟩` and
//! `Φ±_M = (|M↓,M↓⟩ ± |M↑,M↑⟩)/2`; the 1/2 compensates the norm 2 of a doubly
//! occupied mode. Two fermions at one node only admit `Ψ_M`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::scalar::Scalar;
use crate::state::{
    LocalMode, ManyBodyState, NodeLabel, NormalizedState, ProductKet, Spin, Statistics,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BellLabel {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
    SameNodePsi,
    SameNodePhiPlus,
    SameNodePhiMinus,
}

impl BellLabel {
    pub const DISTINCT: [BellLabel; 4] = [
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
    ];

    pub fn is_same_node(self) -> bool {
        matches!(
            self,
            BellLabel::SameNodePsi | BellLabel::SameNodePhiPlus | BellLabel::SameNodePhiMinus
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BellLabel::PsiPlus => "Psi+",
            BellLabel::PsiMinus => "Psi-",
            BellLabel::PhiPlus => "Phi+",
            BellLabel::PhiMinus => "Phi-",
            BellLabel::SameNodePsi => "Psi_M",
            BellLabel::SameNodePhiPlus => "Phi+_M",
            BellLabel::SameNodePhiMinus => "Phi-_M",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for BellLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// The two-particle subsystem a Bell measurement acts on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BellTarget {
    SameNode(NodeLabel),
    /// Two distinct nodes, stored in node order.
    Pair(NodeLabel, NodeLabel),
}

impl BellTarget {
    pub fn pair(a: NodeLabel, b: NodeLabel) -> Self {
        if a <= b {
            BellTarget::Pair(a, b)
        } else {
            BellTarget::Pair(b, a)
        }
    }

    fn contains(&self, node: &NodeLabel) -> bool {
        match self {
            BellTarget::SameNode(m) => m == node,
            BellTarget::Pair(i, j) => i == node || j == node,
        }
    }

    /// Labels of the Bell basis on this target.
    pub fn labels(&self, statistics: Statistics) -> Vec<BellLabel> {
        match (self, statistics) {
            (BellTarget::Pair(..), _) => BellLabel::DISTINCT.to_vec(),
            (BellTarget::SameNode(_), Statistics::Fermion) => vec![BellLabel::SameNodePsi],
            (BellTarget::SameNode(_), Statistics::Boson) => vec![
                BellLabel::SameNodePsi,
                BellLabel::SameNodePhiPlus,
                BellLabel::SameNodePhiMinus,
            ],
        }
    }
}

impl fmt::Display for BellTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BellTarget::SameNode(m) => write!(f, "{m}"),
            BellTarget::Pair(i, j) => write!(f, "{i}{j}"),
        }
    }
}

impl Serialize for BellTarget {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The normalized two-particle Bell state `label` on `target`.
pub fn bell_state(
    label: BellLabel,
    target: &BellTarget,
    statistics: Statistics,
) -> Result<ManyBodyState, Error> {
    use Spin::{Down, Up};
    let ket = |i: &NodeLabel, si: Spin, j: &NodeLabel, sj: Spin| {
        ProductKet::localized(statistics, [i.with(si), j.with(sj)])
    };
    let h = Scalar::inv_sqrt2();
    let half = Scalar::from_ratio(1, 2);
    let neg = |x: &Scalar| -x;
    let terms = match (target, label) {
        (BellTarget::Pair(i, j), BellLabel::PsiPlus) => {
            vec![(ket(i, Down, j, Up), h.clone()), (ket(i, Up, j, Down), h)]
        }
        (BellTarget::Pair(i, j), BellLabel::PsiMinus) => {
            vec![(ket(i, Down, j, Up), h.clone()), (ket(i, Up, j, Down), neg(&h))]
        }
        (BellTarget::Pair(i, j), BellLabel::PhiPlus) => {
            vec![(ket(i, Down, j, Down), h.clone()), (ket(i, Up, j, Up), h)]
        }
        (BellTarget::Pair(i, j), BellLabel::PhiMinus) => {
            vec![(ket(i, Down, j, Down), h.clone()), (ket(i, Up, j, Up), neg(&h))]
        }
        (BellTarget::SameNode(m), BellLabel::SameNodePsi) => {
            vec![(ket(m, Up, m, Down), Scalar::one())]
        }
        (BellTarget::SameNode(m), BellLabel::SameNodePhiPlus)
            if statistics == Statistics::Boson =>
        {
            vec![(ket(m, Down, m, Down), half.clone()), (ket(m, Up, m, Up), half)]
        }
        (BellTarget::SameNode(m), BellLabel::SameNodePhiMinus)
            if statistics == Statistics::Boson =>
        {
            vec![(ket(m, Down, m, Down), half.clone()), (ket(m, Up, m, Up), neg(&half))]
        }
        _ => {
            return Err(Error::InvalidNetwork(format!(
                "no {label} Bell state on {target} for {}s",
                statistics.name()
            )))
        }
    };
    ManyBodyState::from_terms(statistics, 2, terms)
}

/// One outcome of a Bell measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellBranch {
    pub target: BellTarget,
    pub label: BellLabel,
    /// Conditional probability given the measured state.
    pub probability: Scalar,
    /// Normalized state of the remaining n − 2 particles.
    pub residual: NormalizedState,
}

/// Projects the target subsystem onto its Bell basis. Every term of the
/// (localized) state must place exactly two particles on the target, one per
/// node for a node pair. Outcomes with zero probability are omitted.
pub fn bell_measure(state: &NormalizedState, target: &BellTarget) -> Result<Vec<BellBranch>, Error> {
    let statistics = state.statistics();
    let n = state.particle_number();
    if n < 2 {
        return Err(Error::TargetOccupancy {
            target: target.to_string(),
            expected: "2".into(),
            found: n.to_string(),
        });
    }
    let terms = state.state().expand_localized().localized_terms()?;

    // Split each term into (target pair) ∧ (rest), tracking the fermionic sign
    // of moving the target particles to the front.
    let mut by_target: BTreeMap<Vec<LocalMode>, Vec<(Vec<LocalMode>, Scalar)>> = BTreeMap::new();
    for (modes, c) in terms {
        let mut picked = Vec::with_capacity(2);
        let mut rest = Vec::with_capacity(n - 2);
        let mut crossings = 0usize;
        for m in modes {
            if target.contains(&m.node) {
                crossings += rest.len();
                picked.push(m);
            } else {
                rest.push(m);
            }
        }
        check_occupancy(target, &picked)?;
        let c = if statistics == Statistics::Fermion && crossings % 2 == 1 {
            -c
        } else {
            c
        };
        by_target.entry(picked).or_default().push((rest, c));
    }

    let mut branches = Vec::new();
    for label in target.labels(statistics) {
        let bell = bell_state(label, target, statistics)?;
        let mut residual: BTreeMap<Vec<LocalMode>, Scalar> = BTreeMap::new();
        for (picked, rests) in &by_target {
            let amp = bell.inner_product(&ManyBodyState::from_ket(ProductKet::localized(
                statistics,
                picked.iter().cloned(),
            )))?;
            if amp.is_zero() {
                continue;
            }
            for (rest, c) in rests {
                *residual.entry(rest.clone()).or_default() += c * &amp;
            }
        }
        let residual = ManyBodyState::from_localized(statistics, n - 2, residual)?;
        let weight = residual.norm_squared()?;
        if weight.is_zero() {
            continue;
        }
        branches.push(BellBranch {
            target: target.clone(),
            label,
            probability: weight.checked_div(state.norm_squared())?,
            residual: NormalizedState::from_parts(residual, weight)?,
        });
    }
    Ok(branches)
}

fn check_occupancy(target: &BellTarget, picked: &[LocalMode]) -> Result<(), Error> {
    let ok = match target {
        BellTarget::SameNode(_) => picked.len() == 2,
        BellTarget::Pair(i, j) => {
            picked.len() == 2 && &picked[0].node == i && &picked[1].node == j
        }
    };
    if ok {
        return Ok(());
    }
    let expected = match target {
        BellTarget::SameNode(_) => "2".to_string(),
        BellTarget::Pair(i, j) => format!("one at {i} and one at {j}"),
    };
    Err(Error::TargetOccupancy {
        target: target.to_string(),
        expected,
        found: picked.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","),
    })
}

/// Distinct nodes occupied by a localized two-particle state.
fn occupied_nodes(state: &NormalizedState) -> Result<Vec<NodeLabel>, Error> {
    let terms = state.state().expand_localized().localized_terms()?;
    let mut nodes: Vec<NodeLabel> = terms
        .keys()
        .flat_map(|modes| modes.iter().map(|m| m.node.clone()))
        .collect();
    nodes.sort();
    nodes.dedup();
    Ok(nodes)
}

/// |⟨Bell(label)|ab_state⟩|² for a normalized two-particle state. The Bell
/// state is placed on the nodes the state occupies.
pub fn fidelity(ab_state: &NormalizedState, label: BellLabel) -> Result<Scalar, Error> {
    if ab_state.particle_number() != 2 {
        return Err(Error::LengthMismatch {
            left: 2,
            right: ab_state.particle_number(),
        });
    }
    let nodes = occupied_nodes(ab_state)?;
    let target = match (nodes.as_slice(), label.is_same_node()) {
        ([m], true) => BellTarget::SameNode(m.clone()),
        ([i, j], false) => BellTarget::Pair(i.clone(), j.clone()),
        _ => return Ok(Scalar::zero()),
    };
    fidelity_on(ab_state, label, &target)
}

/// Fidelity with the Bell state `label` on an explicit target.
pub fn fidelity_on(
    state: &NormalizedState,
    label: BellLabel,
    target: &BellTarget,
) -> Result<Scalar, Error> {
    let bell = bell_state(label, target, state.statistics())?;
    let amp = bell.inner_product(state.state())?;
    amp.abs_square().checked_div(state.norm_squared())
}

/// The unique distinct-site Bell label with fidelity one, if any.
pub fn identify_bell(ab_state: &NormalizedState) -> Result<Option<BellLabel>, Error> {
    let mut found = None;
    for label in BellLabel::DISTINCT {
        if fidelity(ab_state, label)?.is_one() {
            if found.is_some() {
                return Ok(None);
            }
            found = Some(label);
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Network;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    fn ab() -> (NodeLabel, NodeLabel) {
        let net = Network::new(&["A", "B"]).unwrap();
        (net.node("A").unwrap(), net.node("B").unwrap())
    }

    #[test]
    fn bell_bases_are_orthonormal() {
        let (a, b) = ab();
        let targets = [BellTarget::pair(b.clone(), a.clone()), BellTarget::SameNode(a)];
        for stats in [Statistics::Boson, Statistics::Fermion] {
            for target in &targets {
                let labels = target.labels(stats);
                for &x in &labels {
                    for &y in &labels {
                        let g = bell_state(x, target, stats)
                            .unwrap()
                            .inner_product(&bell_state(y, target, stats).unwrap())
                            .unwrap();
                        assert_eq!(g, if x == y { Scalar::one() } else { Scalar::zero() });
                    }
                }
            }
        }
    }

    #[test]
    fn fermions_have_no_same_node_phi() {
        let (a, _) = ab();
        assert!(bell_state(BellLabel::SameNodePhiPlus, &BellTarget::SameNode(a), Statistics::Fermion).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let (a, b) = ab();
        let target = BellTarget::Pair(a.clone(), b.clone());
        let psi_plus = bell_state(BellLabel::PsiPlus, &target, Statistics::Fermion)
            .unwrap()
            .normalize()
            .unwrap();
        assert_eq!(fidelity(&psi_plus, BellLabel::PsiMinus).unwrap(), Scalar::zero());
        assert_eq!(fidelity(&psi_plus, BellLabel::PsiPlus).unwrap(), Scalar::one());
        assert_eq!(identify_bell(&psi_plus).unwrap(), Some(BellLabel::PsiPlus));

        let product = ManyBodyState::from_ket(ProductKet::localized(
            Statistics::Fermion,
            [a.with(Spin::Down), b.with(Spin::Up)],
        ))
        .normalize()
        .unwrap();
        assert_eq!(fidelity(&product, BellLabel::PsiMinus).unwrap(), q(1, 2));
        assert_eq!(identify_bell(&product).unwrap(), None);
    }

    #[test]
    fn fidelity_rejects_wrong_particle_number() {
        let (a, _) = ab();
        let one = ManyBodyState::from_ket(ProductKet::localized(Statistics::Boson, [a.with(Spin::Up)]))
            .normalize()
            .unwrap();
        assert!(fidelity(&one, BellLabel::PsiPlus).is_err());
    }

    #[test]
    fn occupancy_is_checked() {
        let net = Network::new(&["A", "M", "B"]).unwrap();
        let m = net.node("M").unwrap();
        let s = ManyBodyState::from_ket(ProductKet::localized(
            Statistics::Boson,
            [net.node("A").unwrap().with(Spin::Up), m.with(Spin::Up), net.node("B").unwrap().with(Spin::Up)],
        ))
        .normalize()
        .unwrap();
        assert!(matches!(
            bell_measure(&s, &BellTarget::SameNode(m)),
            Err(Error::TargetOccupancy { .. })
        ));
    }
}
