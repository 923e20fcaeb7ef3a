//! Closed-form success probabilities as functions of the particle number n.
//!
//! ```text
//! separated:         P(n)   = 1 / 2^{n/2}
//! fermionic shared:  P_f(n) = 1 / (2^{n−1} det 𝓜⁽ⁿ⁾)
//! bosonic shared:    P_b(n) = 3^{n/2−1} / (2^{n−1} perm 𝓜⁽ⁿ⁾)
//! ```
//!
//! 𝓜⁽ⁿ⁾ is the Gram matrix of the prepared single-particle states.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;

use crate::error::Error;
use crate::matrix::{ScalarMatrix, DEFAULT_PERMANENT_BOUND};
use crate::scalar::Scalar;
use crate::state::Statistics;

use super::network::{chain_gram, NetworkSpec, Topology};
use super::ProtocolKind;

/// Evaluates the closed form with the physical chain overlap ⟨αᵢ|αᵢ₊₁⟩ = 1/2.
pub fn closed_form_probability(kind: ProtocolKind, n: usize) -> Result<Scalar, Error> {
    let gram = chain_gram(n, &Scalar::from_ratio(1, 2));
    closed_form_with_gram(kind, n, &gram, DEFAULT_PERMANENT_BOUND)
}

/// Closed form using a caller-supplied Gram matrix for the shared kinds.
pub fn closed_form_with_gram(
    kind: ProtocolKind,
    n: usize,
    gram: &ScalarMatrix,
    permanent_bound: usize,
) -> Result<Scalar, Error> {
    check_particle_number(n)?;
    let half_n = (n / 2) as u32;
    let pow2 = |e: u32| Scalar::from_rational(BigRational::from_integer(BigInt::from(2).pow(e)));
    match kind {
        ProtocolKind::Separated => pow2(half_n).inverse(),
        ProtocolKind::FermionicShared => {
            let det = gram.determinant();
            (pow2(n as u32 - 1) * det).inverse()
        }
        ProtocolKind::BosonicShared => {
            let perm = gram.permanent_bounded(permanent_bound)?;
            let numer = Scalar::from_rational(BigRational::from_integer(BigInt::from(3).pow(half_n - 1)));
            numer.checked_div(&(pow2(n as u32 - 1) * perm))
        }
    }
}

pub fn check_particle_number(n: usize) -> Result<(), Error> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::InvalidParticleNumber(n));
    }
    Ok(())
}

/// Network matching `kind` with n/2 pairs. Separated networks use `statistics`.
pub fn network_for(kind: ProtocolKind, n: usize, statistics: Statistics) -> Result<NetworkSpec, Error> {
    check_particle_number(n)?;
    let pairs = n / 2;
    match kind {
        ProtocolKind::Separated => NetworkSpec::new(pairs, Topology::Separated, statistics),
        ProtocolKind::FermionicShared => {
            NetworkSpec::new(pairs, Topology::SharedChain, Statistics::Fermion)
        }
        ProtocolKind::BosonicShared => NetworkSpec::new(pairs, Topology::SharedChain, Statistics::Boson),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    #[test]
    fn anchors_at_four() {
        assert_eq!(closed_form_probability(ProtocolKind::Separated, 4).unwrap(), q(1, 4));
        assert_eq!(closed_form_probability(ProtocolKind::FermionicShared, 4).unwrap(), q(2, 9));
        assert_eq!(closed_form_probability(ProtocolKind::BosonicShared, 4).unwrap(), q(6, 25));
    }

    #[test]
    fn six_particles() {
        assert_eq!(closed_form_probability(ProtocolKind::FermionicShared, 6).unwrap(), q(1, 8));
        assert_eq!(closed_form_probability(ProtocolKind::BosonicShared, 6).unwrap(), q(1, 8));
        assert_eq!(closed_form_probability(ProtocolKind::Separated, 6).unwrap(), q(1, 8));
    }

    #[test]
    fn odd_or_small_n_rejected() {
        assert!(matches!(
            closed_form_probability(ProtocolKind::Separated, 5),
            Err(Error::InvalidParticleNumber(5))
        ));
        assert!(closed_form_probability(ProtocolKind::FermionicShared, 2).is_err());
    }
}
