//! Brute-force reference evaluations.
//!
//! These walk all n! permutations directly and share no code with the Bareiss
//! and Ryser kernels in [`crate::matrix`]. They back the `verify` command and
//! the cross-check tests.

use crate::matrix::ScalarMatrix;
use crate::scalar::Scalar;

/// Σ_P η^P Πᵢ m[i][P(i)], with `eta = -1` for the determinant and `+1` for
/// the permanent.
pub fn permutation_sum(m: &ScalarMatrix, eta: i8) -> Scalar {
    let n = m.dim();
    let mut total = Scalar::zero();
    for_each_permutation(n, |perm, odd| {
        let mut prod = Scalar::one();
        for (i, &j) in perm.iter().enumerate() {
            let e = m.get(i, j);
            if e.is_zero() {
                return;
            }
            prod = &prod * e;
        }
        if eta < 0 && odd {
            total -= prod;
        } else {
            total += prod;
        }
    });
    total
}

pub fn naive_determinant(m: &ScalarMatrix) -> Scalar {
    permutation_sum(m, -1)
}

pub fn naive_permanent(m: &ScalarMatrix) -> Scalar {
    permutation_sum(m, 1)
}

/// Heap's algorithm; each visit receives the permutation and whether it is odd.
pub fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize], bool)) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut odd = false;
    visit(&perm, odd);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            odd = !odd;
            visit(&perm, odd);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visits_every_permutation_once_with_parity() {
        let mut seen = std::collections::BTreeSet::new();
        let mut even = 0;
        for_each_permutation(4, |p, odd| {
            assert!(seen.insert(p.to_vec()));
            // parity by inversion count
            let inv = (0..4)
                .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            assert_eq!(inv % 2 == 1, odd);
            if !odd {
                even += 1;
            }
        });
        assert_eq!(seen.len(), 24);
        assert_eq!(even, 12);
    }
}
