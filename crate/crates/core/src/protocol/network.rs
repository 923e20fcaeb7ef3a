//! Network layouts and state preparation.

use crate::error::Error;
use crate::matrix::ScalarMatrix;
use crate::scalar::Scalar;
use crate::slocc::CountConfiguration;
use crate::state::{
    overlap_matrix, ManyBodyState, Network, NodeLabel, NormalizedState, ProductKet,
    SingleParticleState, Spin, Statistics,
};

use super::bell::BellTarget;

/// How delocalized modes are laid out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Neighbouring modes share an intermediate node: A, M₁, …, M_{N−1}, B.
    SharedChain,
    /// Every mode has its own two nodes: A, C₁, D₁, …, C_{N−1}, D_{N−1}, B.
    Separated,
}

/// `pairs` particle pairs, pair j prepared in delocalized mode α_j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkSpec {
    pairs: usize,
    topology: Topology,
    statistics: Statistics,
    spins: Vec<Spin>,
    network: Network,
}

impl NetworkSpec {
    /// Standard preparation: each pair carries opposite pseudospins (↓, ↑).
    pub fn new(pairs: usize, topology: Topology, statistics: Statistics) -> Result<Self, Error> {
        let spins = (0..pairs).flat_map(|_| [Spin::Down, Spin::Up]).collect();
        Self::with_spins(pairs, topology, statistics, spins)
    }

    /// Arbitrary per-particle spins, listed pair by pair. Preparations whose
    /// pairs are not opposite are accepted but reported by
    /// [`is_conforming`](Self::is_conforming).
    pub fn with_spins(
        pairs: usize,
        topology: Topology,
        statistics: Statistics,
        spins: Vec<Spin>,
    ) -> Result<Self, Error> {
        if pairs < 2 {
            return Err(Error::InvalidNetwork(format!(
                "at least two pairs are required, got {pairs}"
            )));
        }
        if spins.len() != 2 * pairs {
            return Err(Error::InvalidNetwork(format!(
                "expected {} spins, got {}",
                2 * pairs,
                spins.len()
            )));
        }
        let network = Network::new(&node_names(pairs, topology))?;
        Ok(NetworkSpec {
            pairs,
            topology,
            statistics,
            spins,
            network,
        })
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn particle_number(&self) -> usize {
        2 * self.pairs
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn is_conforming(&self) -> bool {
        self.spins.chunks(2).all(|p| p[0] != p[1])
    }

    pub fn end_nodes(&self) -> (NodeLabel, NodeLabel) {
        let nodes = self.network.nodes();
        (nodes[0].clone(), nodes[nodes.len() - 1].clone())
    }

    /// The two nodes spanned by mode α_j (0-based).
    pub fn mode_nodes(&self, pair: usize) -> [NodeLabel; 2] {
        let nodes = self.network.nodes();
        match self.topology {
            Topology::SharedChain => [nodes[pair].clone(), nodes[pair + 1].clone()],
            Topology::Separated => [nodes[2 * pair].clone(), nodes[2 * pair + 1].clone()],
        }
    }

    /// Intermediate measurement targets in cascade order.
    pub fn intermediate_targets(&self) -> Vec<BellTarget> {
        let nodes = self.network.nodes();
        match self.topology {
            Topology::SharedChain => nodes[1..nodes.len() - 1]
                .iter()
                .cloned()
                .map(BellTarget::SameNode)
                .collect(),
            Topology::Separated => (1..self.pairs)
                .map(|i| BellTarget::Pair(nodes[2 * i - 1].clone(), nodes[2 * i].clone()))
                .collect(),
        }
    }

    /// Post-selection pattern: one particle at each end, two per shared node,
    /// one per separated node.
    pub fn post_selection(&self) -> CountConfiguration {
        let nodes = self.network.nodes();
        let last = nodes.len() - 1;
        CountConfiguration::new(nodes.iter().enumerate().map(|(i, n)| {
            let c = match self.topology {
                Topology::SharedChain if i != 0 && i != last => 2,
                _ => 1,
            };
            (n.clone(), c)
        }))
    }

    /// Prepared single-particle states α₁σ₁, α₁σ₂, …, α_Nσ_{2N}.
    pub fn single_particle_states(&self) -> Result<Vec<SingleParticleState>, Error> {
        (0..self.pairs)
            .flat_map(|j| [(j, self.spins[2 * j]), (j, self.spins[2 * j + 1])])
            .map(|(j, spin)| SingleParticleState::delocalized(&self.mode_nodes(j), spin))
            .collect()
    }

    /// One-particle overlap matrix of the prepared states.
    pub fn gram_matrix(&self) -> Result<ScalarMatrix, Error> {
        let sp = self.single_particle_states()?;
        overlap_matrix(&sp, &sp)
    }

    /// The unnormalized product ket |α₁↓, α₁↑, …, α_N↓, α_N↑⟩.
    pub fn product_ket(&self) -> Result<ProductKet, Error> {
        Ok(ProductKet::new(self.statistics, self.single_particle_states()?))
    }

    /// Normalized prepared state. Its squared norm is det or perm of the Gram
    /// matrix; Pauli-forbidden content cancels inside the fermionic algebra.
    pub fn prepare_state(&self) -> Result<NormalizedState, Error> {
        let ket = self.product_ket()?;
        let norm_squared = ket.norm_squared()?;
        NormalizedState::from_parts(ManyBodyState::from_ket(ket), norm_squared)
    }
}

fn node_names(pairs: usize, topology: Topology) -> Vec<String> {
    let mut names = vec!["A".to_string()];
    match topology {
        Topology::SharedChain if pairs == 2 => names.push("M".into()),
        Topology::SharedChain => names.extend((1..pairs).map(|i| format!("M{i}"))),
        Topology::Separated if pairs == 2 => names.extend(["C".into(), "D".into()]),
        Topology::Separated => {
            for i in 1..pairs {
                names.push(format!("C{i}"));
                names.push(format!("D{i}"));
            }
        }
    }
    names.push("B".into());
    names
}

/// Gram matrix 𝓜⁽ⁿ⁾ of a chain whose neighbouring modes overlap by `overlap`,
/// in the basis (α₁↓, α₁↑, α₂↓, …).
pub fn chain_gram(particles: usize, overlap: &Scalar) -> ScalarMatrix {
    ScalarMatrix::from_fn(particles, |i, j| {
        let (mi, mj) = (i / 2, j / 2);
        if i % 2 != j % 2 {
            Scalar::zero()
        } else if mi == mj {
            Scalar::one()
        } else if mi.abs_diff(mj) == 1 {
            overlap.clone()
        } else {
            Scalar::zero()
        }
    })
}
