//! Finite abelian groups presented by cyclic factors, automorphisms given by
//! integer matrices, and the pairing of the two that models a component
//! group with its Frobenius action.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Orders above this are refused: every kernel/image/quotient here is found
/// by element enumeration, which must stay desk-scale.
pub const MAX_GROUP_ORDER: u64 = 1_000_000;

/// ⊕ᵢ ℤ/dᵢ with dᵢ ≥ 2 (trivial factors are dropped on construction).
/// Elements are coordinate tuples, one residue per factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        let mut kept = Vec::with_capacity(factors.len());
        let mut order: u128 = 1;
        for d in factors {
            if d == 0 {
                return Err(Error::InvalidGroupFactor(d));
            }
            if d == 1 {
                continue;
            }
            order *= d as u128;
            if order > MAX_GROUP_ORDER as u128 {
                return Err(Error::GroupTooLarge(order));
            }
            kept.push(d);
        }
        Ok(FiniteAbelianGroup { factors: kept })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup {
            factors: Vec::new(),
        }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// All elements, in mixed-radix order.
    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.order()).map(move |i| self.decode(i))
    }

    /// Invariant-factor form: an ascending chain d₁ | d₂ | … | d_k with the
    /// same group, unique up to equality. Two groups are isomorphic iff
    /// their canonical factor lists are equal.
    pub fn canonical_factors(&self) -> Vec<u64> {
        canonical_from_orders(&self.factors)
    }

    pub(crate) fn decode(&self, mut index: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.factors.len());
        for &d in &self.factors {
            out.push(index % d);
            index /= d;
        }
        out
    }

    pub(crate) fn encode(&self, elem: &[u64]) -> u64 {
        debug_assert_eq!(elem.len(), self.factors.len());
        let mut index = 0u64;
        for (&x, &d) in elem.iter().zip(&self.factors).rev() {
            debug_assert!(x < d);
            index = index * d + x;
        }
        index
    }
}

/// Multiset-canonical invariant factors for a list of cyclic orders.
pub(crate) fn canonical_from_orders(orders: &[u64]) -> Vec<u64> {
    use std::collections::BTreeMap;
    // exponent lists per prime, each kept descending
    let mut per_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &d in orders {
        let mut m = d;
        let mut q = 2u64;
        while q * q <= m {
            if m % q == 0 {
                let mut e = 0;
                while m % q == 0 {
                    m /= q;
                    e += 1;
                }
                per_prime.entry(q).or_default().push(e);
            }
            q += if q == 2 { 1 } else { 2 };
        }
        if m > 1 {
            per_prime.entry(m).or_default().push(1);
        }
    }
    let mut slots = 0;
    for exps in per_prime.values_mut() {
        exps.sort_unstable_by(|a, b| b.cmp(a));
        slots = slots.max(exps.len());
    }
    let mut chain = Vec::new();
    for k in 0..slots {
        let mut d = 1u64;
        for (&q, exps) in &per_prime {
            if let Some(&e) = exps.get(k) {
                d *= q.pow(e);
            }
        }
        chain.push(d);
    }
    chain.reverse(); // ascending divisor chain
    chain
}

/// An automorphism of a [`FiniteAbelianGroup`], stored as a matrix whose
/// column j lists the coordinates of the image of the j-th generator; entry
/// (i, j) is kept reduced modulo the i-th factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAutomorphism {
    moduli: Vec<u64>,
    matrix: Vec<Vec<u64>>, // matrix[i][j], row-major
}

impl GroupAutomorphism {
    /// Validates that the matrix is a well-defined endomorphism (column j
    /// annihilates the order of generator j) and bijective.
    pub fn new(group: &FiniteAbelianGroup, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let moduli = group.factors().to_vec();
        let k = moduli.len();
        if matrix.len() != k || matrix.iter().any(|row| row.len() != k) {
            return Err(Error::MatrixShape);
        }
        let mut reduced = vec![vec![0u64; k]; k];
        for i in 0..k {
            for j in 0..k {
                let d = moduli[i] as i64;
                reduced[i][j] = matrix[i][j].rem_euclid(d) as u64;
            }
        }
        // well-defined: d_j · (column j) must vanish coordinate-wise
        for j in 0..k {
            for i in 0..k {
                let prod = (reduced[i][j] as u128) * (moduli[j] as u128);
                if !prod.is_multiple_of(moduli[i] as u128) {
                    return Err(Error::NotAutomorphism);
                }
            }
        }
        let auto = GroupAutomorphism {
            moduli,
            matrix: reduced,
        };
        // bijective: the image must exhaust the group
        let mut seen = HashSet::with_capacity(group.order() as usize);
        for x in group.elements() {
            seen.insert(group.encode(&auto.apply(&x)));
        }
        if seen.len() as u64 != group.order() {
            return Err(Error::NotAutomorphism);
        }
        Ok(auto)
    }

    pub fn identity(group: &FiniteAbelianGroup) -> Self {
        let k = group.rank();
        let mut matrix = vec![vec![0u64; k]; k];
        for (i, row) in matrix.iter_mut().enumerate() {
            row[i] = 1 % group.factors()[i];
        }
        GroupAutomorphism {
            moduli: group.factors().to_vec(),
            matrix,
        }
    }

    pub(crate) fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// Row-major matrix with entries reduced modulo the row's factor.
    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        debug_assert_eq!(x.len(), self.moduli.len());
        self.matrix
            .iter()
            .zip(&self.moduli)
            .map(|(row, &d)| {
                let sum: u128 = row
                    .iter()
                    .zip(x)
                    .map(|(&m, &xi)| (m as u128) * (xi as u128))
                    .sum();
                (sum % d as u128) as u64
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, &m)| {
                if i == j {
                    m == 1 % self.moduli[i]
                } else {
                    m == 0
                }
            })
        })
    }

    /// Multiplicative order (the powers cycle because the map is bijective).
    pub fn order(&self) -> u64 {
        let mut pow = self.clone();
        let mut k = 1u64;
        while !pow.is_identity() {
            pow = pow.compose(self);
            k += 1;
            debug_assert!(k <= MAX_GROUP_ORDER * MAX_GROUP_ORDER);
        }
        k
    }

    /// The map "apply `other`, then `self`" (matrix product self·other).
    pub(crate) fn compose(&self, other: &GroupAutomorphism) -> Self {
        debug_assert_eq!(self.moduli, other.moduli);
        let k = self.moduli.len();
        let matrix: Vec<Vec<u64>> = self
            .matrix
            .iter()
            .zip(&self.moduli)
            .map(|(row, &d)| {
                (0..k)
                    .map(|j| {
                        let sum: u128 = row
                            .iter()
                            .zip(&other.matrix)
                            .map(|(&a, other_row)| a as u128 * other_row[j] as u128)
                            .sum();
                        (sum % d as u128) as u64
                    })
                    .collect()
            })
            .collect();
        GroupAutomorphism {
            moduli: self.moduli.clone(),
            matrix,
        }
    }
}

/// A component group Φ together with its Frobenius action: the special
/// fiber's arithmetic in one small package.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentGroupModel {
    group: FiniteAbelianGroup,
    frobenius: GroupAutomorphism,
}

impl ComponentGroupModel {
    pub fn new(group: FiniteAbelianGroup, frobenius: GroupAutomorphism) -> Result<Self> {
        if frobenius.moduli() != group.factors() {
            return Err(Error::GroupMismatch);
        }
        Ok(ComponentGroupModel { group, frobenius })
    }

    pub fn trivial() -> Self {
        let group = FiniteAbelianGroup::trivial();
        let frobenius = GroupAutomorphism::identity(&group);
        ComponentGroupModel { group, frobenius }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn frobenius(&self) -> &GroupAutomorphism {
        &self.frobenius
    }
}
