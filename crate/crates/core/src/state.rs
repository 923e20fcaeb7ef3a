//! Many-particle states of indistinguishable particles without particle labels.
//!
//! A [`ProductKet`] `|φ₁, …, φₙ⟩` is an ordered list of single-particle states,
//! but the order carries no physical label: two kets differing by a
//! permutation describe the same state up to the sign η^P. Overlaps follow
//!
//! ```text
//! ⟨φ′₁…φ′ₙ|φ₁…φₙ⟩ = Σ_P η^P ⟨φ′₁|φ_{P₁}⟩ ⋯ ⟨φ′ₙ|φ_{Pₙ}⟩
//! ```
//!
//! i.e. the permanent (bosons) or determinant (fermions) of the overlap
//! matrix. A [`ManyBodyState`] is a finite linear combination of product kets.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matrix::{ScalarMatrix, DEFAULT_PERMANENT_BOUND};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// η = +1 for bosons, −1 for fermions.
    pub fn eta(self) -> i8 {
        match self {
            Statistics::Boson => 1,
            Statistics::Fermion => -1,
        }
    }

    pub fn eta_scalar(self) -> Scalar {
        Scalar::from_integer(self.eta().into())
    }

    pub fn name(self) -> &'static str {
        match self {
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
        }
    }
}

/// Two-level pseudospin, ordered ↓ < ↑.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Down, Spin::Up];

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Down => Spin::Up,
            Spin::Up => Spin::Down,
        }
    }

    pub fn arrow(self) -> char {
        match self {
            Spin::Down => '↓',
            Spin::Up => '↑',
        }
    }
}

/// A site of a network. Nodes are ordered by their position in the network's
/// node list.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeLabel {
    rank: u32,
    name: Arc<str>,
}

impl NodeLabel {
    pub fn new(rank: u32, name: &str) -> Self {
        NodeLabel {
            rank,
            name: name.into(),
        }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with(&self, spin: Spin) -> LocalMode {
        LocalMode {
            node: self.clone(),
            spin,
        }
    }
}

impl fmt::Debug for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Ordered list of network sites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    nodes: Vec<NodeLabel>,
}

impl Network {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, Error> {
        let mut nodes = Vec::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            let name = name.as_ref();
            if nodes.iter().any(|n: &NodeLabel| n.name() == name) {
                return Err(Error::InvalidNetwork(format!("duplicate node {name}")));
            }
            nodes.push(NodeLabel::new(i as u32, name));
        }
        Ok(Network { nodes })
    }

    pub fn nodes(&self) -> &[NodeLabel] {
        &self.nodes
    }

    pub fn node(&self, name: &str) -> Result<NodeLabel, Error> {
        self.nodes
            .iter()
            .find(|n| n.name() == name)
            .cloned()
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// A localized single-particle basis state `|I σ⟩`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalMode {
    pub node: NodeLabel,
    pub spin: Spin,
}

impl fmt::Debug for LocalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.node, self.spin.arrow())
    }
}

impl fmt::Display for LocalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.node, self.spin.arrow())
    }
}

/// Linear combination of localized modes. Zero amplitudes are never stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SingleParticleState {
    amplitudes: BTreeMap<LocalMode, Scalar>,
}

impl SingleParticleState {
    pub fn new(amplitudes: impl IntoIterator<Item = (LocalMode, Scalar)>) -> Result<Self, Error> {
        let mut map: BTreeMap<LocalMode, Scalar> = BTreeMap::new();
        for (mode, amp) in amplitudes {
            *map.entry(mode).or_default() += amp;
        }
        map.retain(|_, a| !a.is_zero());
        if map.is_empty() {
            return Err(Error::EmptySingleParticleState);
        }
        Ok(SingleParticleState { amplitudes: map })
    }

    pub fn localized(mode: LocalMode) -> Self {
        SingleParticleState {
            amplitudes: BTreeMap::from([(mode, Scalar::one())]),
        }
    }

    /// Equal-amplitude spatial superposition over `nodes` with fixed spin.
    pub fn delocalized(nodes: &[NodeLabel], spin: Spin) -> Result<Self, Error> {
        let weight = Scalar::from_ratio(1, nodes.len().max(1) as i64)
            .sqrt()
            .ok_or_else(|| {
                Error::InvalidNetwork(format!("1/√{} is not representable", nodes.len()))
            })?;
        Self::new(nodes.iter().map(|n| (n.with(spin), weight.clone())))
    }

    pub fn amplitudes(&self) -> &BTreeMap<LocalMode, Scalar> {
        &self.amplitudes
    }

    pub fn amplitude(&self, mode: &LocalMode) -> Scalar {
        self.amplitudes.get(mode).cloned().unwrap_or_default()
    }

    /// `⟨self|other⟩`; amplitudes are real so no conjugation is needed.
    pub fn overlap(&self, other: &SingleParticleState) -> Scalar {
        let (small, large) = if self.amplitudes.len() <= other.amplitudes.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .amplitudes
            .iter()
            .filter_map(|(m, a)| large.amplitudes.get(m).map(|b| a * b))
            .sum()
    }

    /// The mode, if this is exactly `|I σ⟩` with unit amplitude.
    pub fn as_localized(&self) -> Option<&LocalMode> {
        match self.amplitudes.iter().next() {
            Some((mode, amp)) if self.amplitudes.len() == 1 && amp.is_one() => Some(mode),
            _ => None,
        }
    }
}

impl fmt::Debug for SingleParticleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(m) = self.as_localized() {
            return write!(f, "{m}");
        }
        write!(f, "(")?;
        for (i, (m, a)) in self.amplitudes.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{a}·{m}")?;
        }
        write!(f, ")")
    }
}

impl From<LocalMode> for SingleParticleState {
    fn from(mode: LocalMode) -> Self {
        SingleParticleState::localized(mode)
    }
}

/// `|φ₁, …, φₙ⟩` for particles obeying `statistics`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductKet {
    statistics: Statistics,
    particles: Vec<SingleParticleState>,
}

impl ProductKet {
    pub fn new(statistics: Statistics, particles: Vec<SingleParticleState>) -> Self {
        ProductKet {
            statistics,
            particles,
        }
    }

    pub fn localized(statistics: Statistics, modes: impl IntoIterator<Item = LocalMode>) -> Self {
        ProductKet::new(
            statistics,
            modes.into_iter().map(SingleParticleState::localized).collect(),
        )
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn particles(&self) -> &[SingleParticleState] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    /// Modes of a fully localized ket, in stored order.
    pub fn localized_modes(&self) -> Option<Vec<LocalMode>> {
        self.particles
            .iter()
            .map(|p| p.as_localized().cloned())
            .collect()
    }

    /// Concatenation `|self⟩ ∧ |other⟩`.
    pub fn wedge(&self, other: &ProductKet) -> Result<ProductKet, Error> {
        check_statistics(self.statistics, other.statistics)?;
        let mut particles = self.particles.clone();
        particles.extend(other.particles.iter().cloned());
        Ok(ProductKet::new(self.statistics, particles))
    }

    /// n-particle amplitude `⟨self|ket⟩`: permanent or determinant of the
    /// one-particle overlap matrix.
    pub fn inner_product(&self, ket: &ProductKet) -> Result<Scalar, Error> {
        check_statistics(self.statistics, ket.statistics)?;
        let m = overlap_matrix(&self.particles, &ket.particles)?;
        match self.statistics {
            Statistics::Boson => m.permanent_bounded(DEFAULT_PERMANENT_BOUND),
            Statistics::Fermion => Ok(m.determinant()),
        }
    }

    pub fn norm_squared(&self) -> Result<Scalar, Error> {
        self.inner_product(self)
    }
}

impl fmt::Debug for ProductKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, p) in self.particles.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p:?}")?;
        }
        write!(f, "⟩")
    }
}

fn check_statistics(left: Statistics, right: Statistics) -> Result<(), Error> {
    if left != right {
        return Err(Error::StatisticsMismatch { left, right });
    }
    Ok(())
}

/// Matrix of one-particle overlaps `⟨braᵢ|ketⱼ⟩`.
pub fn overlap_matrix(
    bras: &[SingleParticleState],
    kets: &[SingleParticleState],
) -> Result<ScalarMatrix, Error> {
    if bras.len() != kets.len() {
        return Err(Error::LengthMismatch {
            left: bras.len(),
            right: kets.len(),
        });
    }
    Ok(ScalarMatrix::from_fn(bras.len(), |i, j| bras[i].overlap(&kets[j])))
}

/// Sorts `modes` into canonical order (node rank, then spin) and returns the
/// sign picked up by the reordering: the permutation parity for fermions,
/// always +1 for bosons. Returns `None` for a fermionic ket that places two
/// particles in one mode.
pub fn canonicalize_modes(modes: &mut [LocalMode], statistics: Statistics) -> Option<i8> {
    let mut odd = false;
    for i in 1..modes.len() {
        let mut j = i;
        while j > 0 && modes[j - 1] > modes[j] {
            modes.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if statistics == Statistics::Fermion {
        if modes.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        return Some(if odd { -1 } else { 1 });
    }
    Some(1)
}

/// ⟨K|K⟩ for a canonically ordered localized ket: the product of occupation
/// factorials for bosons, 1 for fermions.
pub fn localized_norm_squared(modes: &[LocalMode], statistics: Statistics) -> Scalar {
    if statistics == Statistics::Fermion {
        return Scalar::one();
    }
    let mut total = BigInt::from(1);
    let mut run = 1u64;
    for i in 1..=modes.len() {
        if i < modes.len() && modes[i] == modes[i - 1] {
            run += 1;
            total *= BigInt::from(run);
        } else {
            run = 1;
        }
    }
    Scalar::from_rational(BigRational::from_integer(total))
}

/// Linear combination Σ cₖ |Kₖ⟩ of product kets sharing statistics and
/// particle number.
#[derive(Clone, PartialEq, Eq)]
pub struct ManyBodyState {
    statistics: Statistics,
    particle_number: usize,
    terms: BTreeMap<ProductKet, Scalar>,
}

impl ManyBodyState {
    pub fn new(statistics: Statistics, particle_number: usize) -> Self {
        ManyBodyState {
            statistics,
            particle_number,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_ket(ket: ProductKet) -> Self {
        let mut s = ManyBodyState::new(ket.statistics, ket.len());
        s.terms.insert(ket, Scalar::one());
        s
    }

    pub fn from_terms(
        statistics: Statistics,
        particle_number: usize,
        terms: impl IntoIterator<Item = (ProductKet, Scalar)>,
    ) -> Result<Self, Error> {
        let mut s = ManyBodyState::new(statistics, particle_number);
        for (ket, c) in terms {
            s.add_term(ket, c)?;
        }
        Ok(s)
    }

    /// Builds a state from localized mode lists, canonicalizing each one.
    pub fn from_localized(
        statistics: Statistics,
        particle_number: usize,
        terms: impl IntoIterator<Item = (Vec<LocalMode>, Scalar)>,
    ) -> Result<Self, Error> {
        let mut acc: BTreeMap<Vec<LocalMode>, Scalar> = BTreeMap::new();
        for (mut modes, c) in terms {
            if modes.len() != particle_number {
                return Err(Error::LengthMismatch {
                    left: particle_number,
                    right: modes.len(),
                });
            }
            if let Some(sign) = canonicalize_modes(&mut modes, statistics) {
                let entry = acc.entry(modes).or_default();
                if sign < 0 {
                    *entry -= c;
                } else {
                    *entry += c;
                }
            }
        }
        Ok(Self::from_canonical_map(statistics, particle_number, acc))
    }

    fn from_canonical_map(
        statistics: Statistics,
        particle_number: usize,
        acc: BTreeMap<Vec<LocalMode>, Scalar>,
    ) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(modes, c)| (ProductKet::localized(statistics, modes), c))
            .collect();
        ManyBodyState {
            statistics,
            particle_number,
            terms,
        }
    }

    pub fn add_term(&mut self, ket: ProductKet, coefficient: Scalar) -> Result<(), Error> {
        check_statistics(self.statistics, ket.statistics)?;
        if ket.len() != self.particle_number {
            return Err(Error::LengthMismatch {
                left: self.particle_number,
                right: ket.len(),
            });
        }
        let entry = self.terms.entry(ket).or_default();
        *entry += coefficient;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
        Ok(())
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn particle_number(&self) -> usize {
        self.particle_number
    }

    pub fn terms(&self) -> &BTreeMap<ProductKet, Scalar> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, ket: &ProductKet) -> Scalar {
        self.terms.get(ket).cloned().unwrap_or_default()
    }

    pub fn scaled(&self, factor: &Scalar) -> ManyBodyState {
        let mut out = ManyBodyState::new(self.statistics, self.particle_number);
        if factor.is_zero() {
            return out;
        }
        out.terms = self
            .terms
            .iter()
            .map(|(k, c)| (k.clone(), c * factor))
            .collect();
        out
    }

    pub fn plus(&self, other: &ManyBodyState) -> Result<ManyBodyState, Error> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn minus(&self, other: &ManyBodyState) -> Result<ManyBodyState, Error> {
        self.plus(&other.scaled(&Scalar::from_integer(-1)))
    }

    /// `|self⟩ ∧ |other⟩`, extended bilinearly.
    pub fn wedge(&self, other: &ManyBodyState) -> Result<ManyBodyState, Error> {
        check_statistics(self.statistics, other.statistics)?;
        let mut out = ManyBodyState::new(
            self.statistics,
            self.particle_number + other.particle_number,
        );
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_term(ka.wedge(kb)?, ca * cb)?;
            }
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &ManyBodyState) -> Result<(), Error> {
        check_statistics(self.statistics, other.statistics)?;
        if self.particle_number != other.particle_number {
            return Err(Error::LengthMismatch {
                left: self.particle_number,
                right: other.particle_number,
            });
        }
        Ok(())
    }

    pub fn is_localized(&self) -> bool {
        self.terms.keys().all(|k| k.localized_modes().is_some())
    }

    /// Terms of a localized state as canonical mode lists. Terms that are not
    /// in canonical order are reordered with their sign absorbed.
    pub fn localized_terms(&self) -> Result<BTreeMap<Vec<LocalMode>, Scalar>, Error> {
        let mut acc: BTreeMap<Vec<LocalMode>, Scalar> = BTreeMap::new();
        for (ket, c) in &self.terms {
            let mut modes = ket.localized_modes().ok_or(Error::NotLocalized)?;
            if let Some(sign) = canonicalize_modes(&mut modes, self.statistics) {
                let entry = acc.entry(modes).or_default();
                if sign < 0 {
                    *entry -= c;
                } else {
                    *entry += c;
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(acc)
    }

    /// Bilinear extension of the n-particle amplitude over all term pairs,
    /// evaluating every pair through its overlap matrix.
    pub fn inner_product_general(&self, other: &ManyBodyState) -> Result<Scalar, Error> {
        self.check_compatible(other)?;
        let mut total = Scalar::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let amp = ka.inner_product(kb)?;
                if !amp.is_zero() {
                    total += ca * cb * amp;
                }
            }
        }
        Ok(total)
    }

    /// `⟨self|other⟩`. When both states are localized, distinct canonical kets
    /// are orthogonal and the sum collapses to matching keys.
    pub fn inner_product(&self, other: &ManyBodyState) -> Result<Scalar, Error> {
        self.check_compatible(other)?;
        if !(self.is_localized() && other.is_localized()) {
            return self.inner_product_general(other);
        }
        let a = self.localized_terms()?;
        let b = other.localized_terms()?;
        let (small, large) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
        Ok(small
            .iter()
            .filter_map(|(modes, ca)| {
                large
                    .get(modes)
                    .map(|cb| ca * cb * localized_norm_squared(modes, self.statistics))
            })
            .sum())
    }

    pub fn norm_squared(&self) -> Result<Scalar, Error> {
        self.inner_product(self)
    }

    /// Divides by the norm when √(norm²) lies in ℚ(√2); otherwise rescales so
    /// the first term has unit magnitude and carries the exact norm² alongside.
    pub fn normalize(&self) -> Result<NormalizedState, Error> {
        let norm_squared = self.norm_squared()?;
        NormalizedState::from_parts(self.clone(), norm_squared)
    }

    /// Multilinear expansion onto localized kets in canonical order, with
    /// fermionic reordering signs absorbed and Pauli-null terms dropped.
    pub fn expand_localized(&self) -> ManyBodyState {
        let mut acc: BTreeMap<Vec<LocalMode>, Scalar> = BTreeMap::new();
        let mut modes: Vec<LocalMode> = Vec::with_capacity(self.particle_number);
        for (ket, c) in &self.terms {
            expand_into(ket.particles(), c.clone(), &mut modes, self.statistics, &mut acc);
        }
        Self::from_canonical_map(self.statistics, self.particle_number, acc)
    }
}

fn expand_into(
    rest: &[SingleParticleState],
    coefficient: Scalar,
    prefix: &mut Vec<LocalMode>,
    statistics: Statistics,
    acc: &mut BTreeMap<Vec<LocalMode>, Scalar>,
) {
    let Some((first, tail)) = rest.split_first() else {
        let mut modes = prefix.clone();
        if let Some(sign) = canonicalize_modes(&mut modes, statistics) {
            let entry = acc.entry(modes).or_default();
            if sign < 0 {
                *entry -= coefficient;
            } else {
                *entry += coefficient;
            }
        }
        return;
    };
    for (mode, amp) in first.amplitudes() {
        // a fermion placed in an already-occupied mode kills the whole branch
        if statistics == Statistics::Fermion && prefix.contains(mode) {
            continue;
        }
        prefix.push(mode.clone());
        expand_into(tail, &coefficient * amp, prefix, statistics, acc);
        prefix.pop();
    }
}

impl fmt::Debug for ManyBodyState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}){k:?}")?;
        }
        Ok(())
    }
}

/// A state together with its exact squared norm: the physical state is
/// `state / √norm_squared`. When the root lies in ℚ(√2) the state is divided
/// through and `norm_squared` is 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NormalizedState {
    state: ManyBodyState,
    norm_squared: Scalar,
}

impl NormalizedState {
    pub fn from_parts(state: ManyBodyState, norm_squared: Scalar) -> Result<Self, Error> {
        if norm_squared.is_zero() || state.is_empty() {
            return Err(Error::ZeroNorm);
        }
        if let Some(norm) = norm_squared.sqrt() {
            let inv = norm.inverse()?;
            return Ok(NormalizedState {
                state: state.scaled(&inv),
                norm_squared: Scalar::one(),
            });
        }
        let lead = state
            .terms()
            .values()
            .next()
            .expect("nonempty")
            .abs();
        let inv = lead.inverse()?;
        let rescaled_norm = norm_squared.checked_div(&(&lead * &lead))?;
        Ok(NormalizedState {
            state: state.scaled(&inv),
            norm_squared: rescaled_norm,
        })
    }

    pub fn state(&self) -> &ManyBodyState {
        &self.state
    }

    pub fn into_state(self) -> ManyBodyState {
        self.state
    }

    pub fn norm_squared(&self) -> &Scalar {
        &self.norm_squared
    }

    /// True when `state` itself has unit norm.
    pub fn is_exact(&self) -> bool {
        self.norm_squared.is_one()
    }

    pub fn statistics(&self) -> Statistics {
        self.state.statistics()
    }

    pub fn particle_number(&self) -> usize {
        self.state.particle_number()
    }

    /// Physical squared coefficient `c²/norm²` of a stored term.
    pub fn weight(&self, ket: &ProductKet) -> Result<Scalar, Error> {
        self.state.coefficient(ket).abs_square().checked_div(&self.norm_squared)
    }

    /// `⟨self|other⟩` between the physical (unit-norm) states, squared.
    pub fn fidelity(&self, other: &NormalizedState) -> Result<Scalar, Error> {
        let amp = self.state.inner_product(&other.state)?;
        amp.abs_square()
            .checked_div(&(&self.norm_squared * &other.norm_squared))
    }

    /// Flips the global sign so the canonically first term is non-negative.
    pub fn with_phase_convention(mut self) -> Self {
        if let Some(c) = self.state.terms().values().next() {
            if c.is_negative() {
                self.state = self.state.scaled(&Scalar::from_integer(-1));
            }
        }
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = state_json(&self.state);
        v["norm_squared"] = serde_json::to_value(&self.norm_squared).expect("scalar serializes");
        v
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum ParticleRepr {
    Localized(String),
    Superposition(BTreeMap<String, Scalar>),
}

#[derive(Serialize)]
struct TermRepr {
    ket: Vec<ParticleRepr>,
    coefficient: Scalar,
}

#[derive(Serialize)]
struct StateRepr {
    statistics: Statistics,
    particle_number: usize,
    terms: Vec<TermRepr>,
}

fn state_json(state: &ManyBodyState) -> serde_json::Value {
    let repr = StateRepr {
        statistics: state.statistics,
        particle_number: state.particle_number,
        terms: state
            .terms
            .iter()
            .map(|(ket, c)| TermRepr {
                ket: ket
                    .particles()
                    .iter()
                    .map(|p| match p.as_localized() {
                        Some(m) => ParticleRepr::Localized(m.to_string()),
                        None => ParticleRepr::Superposition(
                            p.amplitudes()
                                .iter()
                                .map(|(m, a)| (m.to_string(), a.clone()))
                                .collect(),
                        ),
                    })
                    .collect(),
                coefficient: c.clone(),
            })
            .collect(),
    };
    serde_json::to_value(repr).expect("state serializes")
}

impl ManyBodyState {
    /// Canonical JSON: terms in sorted order, scalars as rational pairs.
    pub fn to_json(&self) -> serde_json::Value {
        state_json(self)
    }

    pub fn to_canonical_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("json")
    }
}
