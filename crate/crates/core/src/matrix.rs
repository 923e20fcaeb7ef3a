//! Square matrices over ℚ(√2) with exact determinant and permanent.
//!
//! The determinant uses fraction-free (Bareiss) elimination. The permanent uses
//! Ryser's inclusion–exclusion formula walked in Gray-code order, so each step
//! adds or removes a single column from the running row sums. Before the Ryser
//! sweep the matrix is cleared of denominators so the inner loop runs on
//! elements of ℤ[√2] without rational normalization.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::scalar::Scalar;

/// Largest permanent evaluated unless the caller raises the bound.
pub const DEFAULT_PERMANENT_BOUND: usize = 20;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ScalarMatrix {
    dim: usize,
    entries: Vec<Scalar>,
}

impl ScalarMatrix {
    pub fn zeros(dim: usize) -> Self {
        ScalarMatrix {
            dim,
            entries: vec![Scalar::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, Error> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(ScalarMatrix { dim, entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        ScalarMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &Scalar {
        &self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Scalar) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Scalar] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Scalar]> {
        self.entries.chunks(self.dim.max(1)).take(self.dim)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for col in 0..self.dim {
            self.entries.swap(a * self.dim + col, b * self.dim + col);
        }
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &ScalarMatrix) -> ScalarMatrix {
        let n = self.dim;
        ScalarMatrix::from_fn(n + other.dim, |i, j| match (i < n, j < n) {
            (true, true) => self.get(i, j).clone(),
            (false, false) => other.get(i - n, j - n).clone(),
            _ => Scalar::zero(),
        })
    }

    /// Exact determinant by Bareiss elimination with row pivoting.
    pub fn determinant(&self) -> Scalar {
        let n = self.dim;
        if n == 0 {
            return Scalar::one();
        }
        let mut m = self.clone();
        let mut negate = false;
        let mut prev = Scalar::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&r| !m.get(r, k).is_zero()) {
                    Some(r) => {
                        m.swap_rows(k, r);
                        negate = !negate;
                    }
                    None => return Scalar::zero(),
                }
            }
            let pivot = m.get(k, k).clone();
            let prev_inv = prev.inverse().expect("Bareiss pivots are nonzero");
            for i in k + 1..n {
                let lead = m.get(i, k).clone();
                for j in k + 1..n {
                    let v = (&pivot * m.get(i, j) - &lead * m.get(k, j)) * &prev_inv;
                    m.set(i, j, v);
                }
                m.set(i, k, Scalar::zero());
            }
            prev = pivot;
        }
        let det = m.get(n - 1, n - 1).clone();
        if negate {
            -det
        } else {
            det
        }
    }

    /// Exact permanent, refusing matrices larger than `bound`.
    pub fn permanent_bounded(&self, bound: usize) -> Result<Scalar, Error> {
        if self.dim > bound {
            return Err(Error::PermanentTooLarge {
                dim: self.dim,
                bound,
            });
        }
        Ok(self.permanent_unchecked())
    }

    /// Exact permanent with [`DEFAULT_PERMANENT_BOUND`].
    pub fn permanent(&self) -> Result<Scalar, Error> {
        self.permanent_bounded(DEFAULT_PERMANENT_BOUND)
    }

    fn permanent_unchecked(&self) -> Scalar {
        let n = self.dim;
        if n == 0 {
            return Scalar::one();
        }
        let (int_matrix, denom) = self.clear_denominators();
        let raw = ryser(n, &int_matrix);
        let scale = BigRational::new(BigInt::one(), num_traits::pow(denom, n));
        Scalar::new(BigRational::from_integer(raw.a), BigRational::from_integer(raw.b)).scale(&scale)
    }

    /// Rescales every entry by the lcm `D` of all denominators, returning entries
    /// in ℤ[√2] together with `D`.
    fn clear_denominators(&self) -> (Vec<ZRoot2>, BigInt) {
        let denom = self.entries.iter().fold(BigInt::one(), |acc, x| {
            acc.lcm(x.rational_part().denom()).lcm(x.sqrt2_part().denom())
        });
        let ints = self
            .entries
            .iter()
            .map(|x| ZRoot2 {
                a: (x.rational_part() * &denom).to_integer(),
                b: (x.sqrt2_part() * &denom).to_integer(),
            })
            .collect();
        (ints, denom)
    }
}

/// `a + b√2` with integer parts.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
struct ZRoot2 {
    a: BigInt,
    b: BigInt,
}

impl Add<&ZRoot2> for &ZRoot2 {
    type Output = ZRoot2;
    fn add(self, rhs: &ZRoot2) -> ZRoot2 {
        ZRoot2 {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl Sub<&ZRoot2> for &ZRoot2 {
    type Output = ZRoot2;
    fn sub(self, rhs: &ZRoot2) -> ZRoot2 {
        ZRoot2 {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl Mul<&ZRoot2> for &ZRoot2 {
    type Output = ZRoot2;
    fn mul(self, rhs: &ZRoot2) -> ZRoot2 {
        ZRoot2 {
            a: &self.a * &rhs.a + ((&self.b * &rhs.b) << 1),
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

/// perm(A) = (−1)ⁿ Σ_{S⊆[n]} (−1)^{|S|} Πᵢ Σ_{j∈S} aᵢⱼ, visiting subsets in
/// Gray-code order.
fn ryser(n: usize, a: &[ZRoot2]) -> ZRoot2 {
    let mut row_sums = vec![ZRoot2::default(); n];
    let mut total = ZRoot2::default();
    for k in 1u64..(1u64 << n) {
        let col = k.trailing_zeros() as usize;
        let gray = k ^ (k >> 1);
        let added = gray & (1 << col) != 0;
        for (i, sum) in row_sums.iter_mut().enumerate() {
            let entry = &a[i * n + col];
            *sum = if added { &*sum + entry } else { &*sum - entry };
        }
        let mut prod = ZRoot2 {
            a: BigInt::one(),
            b: BigInt::zero(),
        };
        for sum in &row_sums {
            if sum.a.is_zero() && sum.b.is_zero() {
                prod = ZRoot2::default();
                break;
            }
            prod = &prod * sum;
        }
        if (gray.count_ones() as usize + n).is_multiple_of(2) {
            total = &total + &prod;
        } else {
            total = &total - &prod;
        }
    }
    total
}

impl fmt::Debug for ScalarMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    fn half_gram() -> ScalarMatrix {
        ScalarMatrix::from_rows(vec![vec![q(1, 1), q(1, 2)], vec![q(1, 2), q(1, 1)]]).unwrap()
    }

    #[test]
    fn two_by_two_determinant() {
        assert_eq!(half_gram().determinant(), q(3, 4));
    }

    #[test]
    fn all_ones_permanent() {
        let m = ScalarMatrix::from_fn(2, |_, _| Scalar::one());
        assert_eq!(m.permanent().unwrap(), q(2, 1));
        let m3 = ScalarMatrix::from_fn(3, |_, _| Scalar::one());
        assert_eq!(m3.permanent().unwrap(), q(6, 1));
        assert_eq!(m3.determinant(), Scalar::zero());
    }

    #[test]
    fn identity_and_empty() {
        assert_eq!(ScalarMatrix::identity(5).determinant(), Scalar::one());
        assert_eq!(ScalarMatrix::identity(5).permanent().unwrap(), Scalar::one());
        assert_eq!(ScalarMatrix::zeros(0).determinant(), Scalar::one());
        assert_eq!(ScalarMatrix::zeros(0).permanent().unwrap(), Scalar::one());
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let m = ScalarMatrix::from_rows(vec![
            vec![q(0, 1), q(1, 1), q(2, 1)],
            vec![q(1, 1), q(0, 1), q(3, 1)],
            vec![q(4, 1), q(-3, 1), q(8, 1)],
        ])
        .unwrap();
        assert_eq!(m.determinant(), oracle::naive_determinant(&m));
        assert_eq!(m.determinant(), q(-2, 1));
    }

    #[test]
    fn non_square_rejected() {
        let err = ScalarMatrix::from_rows(vec![vec![q(1, 1), q(1, 1)], vec![q(1, 1)]]).unwrap_err();
        assert!(matches!(err, Error::NotSquare { .. }));
    }

    #[test]
    fn permanent_bound_guard() {
        let m = ScalarMatrix::identity(5);
        assert_eq!(
            m.permanent_bounded(4),
            Err(Error::PermanentTooLarge { dim: 5, bound: 4 })
        );
        assert!(ScalarMatrix::identity(21).permanent().is_err());
    }

    #[test]
    fn irrational_entries() {
        let r = Scalar::inv_sqrt2();
        let m = ScalarMatrix::from_rows(vec![
            vec![r.clone(), q(1, 2), Scalar::one()],
            vec![q(0, 1), r.clone(), q(1, 3)],
            vec![Scalar::sqrt2(), q(-1, 2), r.clone()],
        ])
        .unwrap();
        assert_eq!(m.determinant(), oracle::naive_determinant(&m));
        assert_eq!(m.permanent().unwrap(), oracle::naive_permanent(&m));
    }

    fn entry() -> impl Strategy<Value = Scalar> {
        prop_oneof![
            Just(Scalar::zero()),
            Just(Scalar::from_ratio(1, 2)),
            Just(Scalar::one()),
            Just(Scalar::inv_sqrt2()),
        ]
    }

    fn square(max: usize) -> impl Strategy<Value = ScalarMatrix> {
        (2..=max).prop_flat_map(|k| {
            proptest::collection::vec(entry(), k * k).prop_map(move |v| {
                ScalarMatrix::from_fn(k, |i, j| v[i * k + j].clone())
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_permutation_sums(m in square(7)) {
            prop_assert_eq!(m.determinant(), oracle::naive_determinant(&m));
            prop_assert_eq!(m.permanent().unwrap(), oracle::naive_permanent(&m));
        }

        #[test]
        fn block_diagonal_squares(g in square(4)) {
            let gg = g.direct_sum(&g);
            let d = g.determinant();
            let p = g.permanent().unwrap();
            prop_assert_eq!(gg.determinant(), &d * &d);
            prop_assert_eq!(gg.permanent().unwrap(), &p * &p);
        }
    }
}
