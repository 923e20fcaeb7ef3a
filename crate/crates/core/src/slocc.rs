//! Post-selection by local particle counting.
//!
//! A [`CountConfiguration`] fixes how many particles each node holds. The
//! count-consistent subspace is spanned by localized kets with those
//! occupations, and the projector onto it is diagonal in the canonical
//! localized expansion: projection keeps exactly the terms whose per-node
//! occupation matches.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::scalar::Scalar;
use crate::state::{
    localized_norm_squared, LocalMode, ManyBodyState, NodeLabel, NormalizedState, ProductKet,
    Spin, Statistics,
};

/// Number of particles counted at each node. Nodes not listed hold zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CountConfiguration {
    counts: BTreeMap<NodeLabel, usize>,
}

impl CountConfiguration {
    pub fn new(counts: impl IntoIterator<Item = (NodeLabel, usize)>) -> Self {
        let mut map = BTreeMap::new();
        for (node, c) in counts {
            if c > 0 {
                *map.entry(node).or_insert(0) += c;
            }
        }
        CountConfiguration { counts: map }
    }

    pub fn count(&self, node: &NodeLabel) -> usize {
        self.counts.get(node).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn counts(&self) -> &BTreeMap<NodeLabel, usize> {
        &self.counts
    }

    /// Occupation pattern of a localized ket.
    pub fn of_modes(modes: &[LocalMode]) -> Self {
        Self::new(modes.iter().map(|m| (m.node.clone(), 1)))
    }

    pub fn matches(&self, modes: &[LocalMode]) -> bool {
        let mut seen: BTreeMap<&NodeLabel, usize> = BTreeMap::new();
        for m in modes {
            *seen.entry(&m.node).or_insert(0) += 1;
        }
        seen.len() == self.counts.len()
            && seen
                .iter()
                .all(|(node, c)| self.counts.get(*node) == Some(c))
    }

    /// Every configuration placing `n` particles on `nodes`.
    pub fn all(nodes: &[NodeLabel], n: usize) -> Vec<CountConfiguration> {
        fn rec(
            nodes: &[NodeLabel],
            left: usize,
            acc: &mut Vec<(NodeLabel, usize)>,
            out: &mut Vec<CountConfiguration>,
        ) {
            match nodes.split_first() {
                None => {
                    if left == 0 {
                        out.push(CountConfiguration::new(acc.iter().cloned()));
                    }
                }
                Some((first, rest)) => {
                    for c in 0..=left {
                        acc.push((first.clone(), c));
                        rec(rest, left - c, acc, out);
                        acc.pop();
                    }
                }
            }
        }
        let mut out = Vec::new();
        rec(nodes, n, &mut Vec::new(), &mut out);
        out
    }
}

/// A basis ket of a count subspace; the orthonormal vector is
/// `ket / √normalizer_squared`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisKet {
    pub ket: ProductKet,
    pub normalizer_squared: Scalar,
}

/// Orthonormal basis of the subspace with the given occupations: at each node
/// every spin multiset of the right size (no repeated spin for fermions).
/// Bosonic double occupancy `|M τ, M τ⟩` carries normalizer² = 2.
pub fn enumerate_basis(
    config: &CountConfiguration,
    statistics: Statistics,
    particle_number: usize,
) -> Result<Vec<BasisKet>, Error> {
    if config.total() != particle_number {
        return Err(Error::CountMismatch {
            expected: particle_number,
            found: config.total(),
        });
    }
    let mut partial: Vec<Vec<LocalMode>> = vec![Vec::new()];
    for (node, &count) in config.counts() {
        let choices = spin_multisets(count, statistics);
        let mut next = Vec::with_capacity(partial.len() * choices.len());
        for prefix in &partial {
            for spins in &choices {
                let mut modes = prefix.clone();
                modes.extend(spins.iter().map(|&s| node.with(s)));
                next.push(modes);
            }
        }
        partial = next;
    }
    Ok(partial
        .into_iter()
        .map(|modes| BasisKet {
            normalizer_squared: localized_norm_squared(&modes, statistics),
            ket: ProductKet::localized(statistics, modes),
        })
        .collect())
}

fn spin_multisets(count: usize, statistics: Statistics) -> Vec<Vec<Spin>> {
    match statistics {
        Statistics::Fermion => match count {
            0 => vec![vec![]],
            1 => vec![vec![Spin::Down], vec![Spin::Up]],
            2 => vec![vec![Spin::Down, Spin::Up]],
            _ => vec![],
        },
        // k downs followed by (count − k) ups
        Statistics::Boson => (0..=count)
            .rev()
            .map(|downs| {
                let mut v = vec![Spin::Down; downs];
                v.extend(std::iter::repeat_n(Spin::Up, count - downs));
                v
            })
            .collect(),
    }
}

/// Outcome of a counting post-selection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionResult {
    /// ⟨Ψ|Π|Ψ⟩ for the normalized input.
    pub probability: Scalar,
    /// Π|Ψ⟩ renormalized; `None` when the probability vanishes.
    pub post_state: Option<NormalizedState>,
}

/// Projects `state` onto the count subspace of `config`.
pub fn slocc_project(
    state: &NormalizedState,
    config: &CountConfiguration,
) -> Result<ProjectionResult, Error> {
    if config.total() != state.particle_number() {
        return Err(Error::CountMismatch {
            expected: state.particle_number(),
            found: config.total(),
        });
    }
    let statistics = state.statistics();
    let expanded = state.state().expand_localized();
    let kept = expanded
        .localized_terms()?
        .into_iter()
        .filter(|(modes, _)| config.matches(modes));
    let projected = ManyBodyState::from_localized(statistics, state.particle_number(), kept)?;
    let weight = projected.norm_squared()?;
    if weight.is_zero() {
        return Ok(ProjectionResult {
            probability: Scalar::zero(),
            post_state: None,
        });
    }
    let probability = weight.checked_div(state.norm_squared())?;
    let post = NormalizedState::from_parts(projected, weight)?.with_phase_convention();
    Ok(ProjectionResult {
        probability,
        post_state: Some(post),
    })
}

/// Probability of `config` computed as Σ_b |⟨b|Ψ⟩|² over an orthonormal
/// basis, with each overlap evaluated through the general n-particle
/// amplitude. Independent of the diagonal filter used by [`slocc_project`].
pub fn probability_via_basis(
    state: &NormalizedState,
    config: &CountConfiguration,
) -> Result<Scalar, Error> {
    let basis = enumerate_basis(config, state.statistics(), state.particle_number())?;
    let mut total = Scalar::zero();
    for b in basis {
        let bra = ManyBodyState::from_ket(b.ket);
        let amp = bra.inner_product_general(state.state())?;
        total += amp.abs_square().checked_div(&b.normalizer_squared)?;
    }
    total.checked_div(state.norm_squared())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{Network, SingleParticleState};

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    fn shared(stats: Statistics) -> (Network, NormalizedState) {
        let net = Network::new(&["A", "M", "B"]).unwrap();
        let a = net.node("A").unwrap();
        let m = net.node("M").unwrap();
        let b = net.node("B").unwrap();
        let alpha = [a, m.clone()];
        let beta = [m, b];
        let ket = ProductKet::new(
            stats,
            vec![
                SingleParticleState::delocalized(&alpha, Spin::Down).unwrap(),
                SingleParticleState::delocalized(&alpha, Spin::Up).unwrap(),
                SingleParticleState::delocalized(&beta, Spin::Down).unwrap(),
                SingleParticleState::delocalized(&beta, Spin::Up).unwrap(),
            ],
        );
        let state = ManyBodyState::from_ket(ket).normalize().unwrap();
        (net, state)
    }

    fn amb(net: &Network) -> CountConfiguration {
        CountConfiguration::new([
            (net.node("A").unwrap(), 1),
            (net.node("M").unwrap(), 2),
            (net.node("B").unwrap(), 1),
        ])
    }

    #[test]
    fn fermionic_basis_has_four_kets() {
        let net = Network::new(&["A", "M", "B"]).unwrap();
        let basis = enumerate_basis(&amb(&net), Statistics::Fermion, 4).unwrap();
        assert_eq!(basis.len(), 4);
        for b in &basis {
            assert_eq!(b.normalizer_squared, Scalar::one());
            let modes = b.ket.localized_modes().unwrap();
            assert_eq!(modes[1], net.node("M").unwrap().with(Spin::Down));
            assert_eq!(modes[2], net.node("M").unwrap().with(Spin::Up));
        }
    }

    #[test]
    fn bosonic_basis_is_orthonormal() {
        let net = Network::new(&["A", "M", "B"]).unwrap();
        let basis = enumerate_basis(&amb(&net), Statistics::Boson, 4).unwrap();
        // 2 (A) × 3 spin multisets at M × 2 (B)
        assert_eq!(basis.len(), 12);
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                let g = x.ket.inner_product(&y.ket).unwrap();
                if i == j {
                    assert_eq!(g, x.normalizer_squared);
                } else {
                    assert!(g.is_zero());
                }
            }
        }
        let doubles = basis.iter().filter(|b| b.normalizer_squared == q(2, 1)).count();
        assert_eq!(doubles, 8);
    }

    #[test]
    fn pauli_empty_subspace() {
        let net = Network::new(&["M", "B"]).unwrap();
        let config = CountConfiguration::new([(net.node("M").unwrap(), 3), (net.node("B").unwrap(), 1)]);
        assert!(enumerate_basis(&config, Statistics::Fermion, 4).unwrap().is_empty());
        assert!(matches!(
            enumerate_basis(&config, Statistics::Fermion, 5),
            Err(Error::CountMismatch { .. })
        ));
    }

    #[test]
    fn shared_node_probabilities() {
        let (net, f) = shared(Statistics::Fermion);
        let r = slocc_project(&f, &amb(&net)).unwrap();
        assert_eq!(r.probability, q(2, 9));
        assert_eq!(probability_via_basis(&f, &amb(&net)).unwrap(), q(2, 9));

        let (net, b) = shared(Statistics::Boson);
        let r = slocc_project(&b, &amb(&net)).unwrap();
        assert_eq!(r.probability, q(6, 25));
        assert_eq!(probability_via_basis(&b, &amb(&net)).unwrap(), q(6, 25));
        let post = r.post_state.unwrap();
        assert_eq!(post.state().len(), 4);
        // four terms, each with coefficient 1/√6
        for (ket, c) in post.state().terms() {
            assert!(c.is_positive());
            assert_eq!(post.weight(ket).unwrap(), q(1, 6));
        }
    }

    #[test]
    fn zero_probability_is_not_an_error() {
        let (net, f) = shared(Statistics::Fermion);
        let config = CountConfiguration::new([(net.node("M").unwrap(), 4)]);
        let r = slocc_project(&f, &config).unwrap();
        assert!(r.probability.is_zero());
        assert!(r.post_state.is_none());
    }

    #[test]
    fn wrong_total_is_an_error() {
        let (net, f) = shared(Statistics::Fermion);
        let config = CountConfiguration::new([(net.node("M").unwrap(), 3)]);
        assert!(matches!(slocc_project(&f, &config), Err(Error::CountMismatch { .. })));
    }

    #[test]
    fn completeness_and_idempotence() {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let (net, s) = shared(stats);
            let mut total = Scalar::zero();
            for config in CountConfiguration::all(net.nodes(), 4) {
                let r = slocc_project(&s, &config).unwrap();
                assert_eq!(r.probability, probability_via_basis(&s, &config).unwrap());
                if let Some(post) = &r.post_state {
                    let again = slocc_project(post, &config).unwrap();
                    assert_eq!(again.probability, Scalar::one());
                    assert_eq!(again.post_state.as_ref().unwrap().fidelity(post).unwrap(), Scalar::one());
                }
                total += r.probability;
            }
            assert_eq!(total, Scalar::one());
        }
    }
}
