//! Finite Abelian groups presented as products of cyclic groups
//! `Z_{N1} x ... x Z_{Nk}`.
//!
//! Elements are residue tuples. Every group also has a canonical
//! enumeration (lexicographic in the residues, first factor most
//! significant) and most of the crate works with positions in that
//! enumeration rather than with tuples directly.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::{gcd, lcm};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A product of cyclic groups, given by the factor orders.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct GroupSpec {
    orders: Vec<u64>,
    cardinality: usize,
}

/// An element of a [`GroupSpec`], stored with reduced residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    residues: Vec<u64>,
}

impl GroupSpec {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        let mut cardinality: usize = 1;
        for &n in &orders {
            if n == 0 {
                return Err(Error::InvalidGroup("cyclic factor of order 0".into()));
            }
            let n = usize::try_from(n)
                .map_err(|_| Error::InvalidGroup(format!("factor order {n} too large")))?;
            cardinality = cardinality
                .checked_mul(n)
                .ok_or_else(|| Error::InvalidGroup("group cardinality overflows".into()))?;
        }
        Ok(Self { orders, cardinality })
    }

    /// The cyclic group `Z_n`.
    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(vec![n])
    }

    /// The trivial group with no factors.
    pub fn trivial() -> Self {
        Self { orders: Vec::new(), cardinality: 1 }
    }

    /// Direct product; residues of `self` come first.
    pub fn product(&self, other: &GroupSpec) -> Result<Self> {
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        Self::new(orders)
    }

    pub fn product_of<'a>(groups: impl IntoIterator<Item = &'a GroupSpec>) -> Result<Self> {
        let orders = groups.into_iter().flat_map(|g| g.orders.iter().copied()).collect();
        Self::new(orders)
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    /// Exponent of the group: the lcm of the factor orders.
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |acc, &n| lcm(acc, n))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { residues: vec![0; self.orders.len()] }
    }

    /// Builds an element, reducing every residue modulo its factor order.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        self.check_len(residues.len())?;
        let residues = residues
            .iter()
            .zip(&self.orders)
            .map(|(&r, &n)| r.rem_euclid(n as i64) as u64)
            .collect();
        Ok(GroupElement { residues })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.orders.len() {
            return Err(Error::DimensionMismatch { expected: self.orders.len(), found: len });
        }
        Ok(())
    }

    fn check(&self, a: &GroupElement) -> Result<()> {
        self.check_len(a.residues.len())?;
        if a.residues.iter().zip(&self.orders).any(|(&r, &n)| r >= n) {
            return Err(Error::InvalidElement(format!("{a} is not reduced for {self}")));
        }
        Ok(())
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        let residues = a
            .residues
            .iter()
            .zip(&b.residues)
            .zip(&self.orders)
            .map(|((&x, &y), &n)| (x + y) % n)
            .collect();
        Ok(GroupElement { residues })
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        let residues = a
            .residues
            .iter()
            .zip(&self.orders)
            .map(|(&x, &n)| (n - x) % n)
            .collect();
        Ok(GroupElement { residues })
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        let nb = self.neg(b)?;
        self.add(a, &nb)
    }

    /// `<xhat, x> = sum_i xhat_i x_i / N_i (mod 1)` as an exact fraction in `[0, 1)`.
    pub fn pairing(&self, xhat: &GroupElement, x: &GroupElement) -> Result<Ratio<u64>> {
        self.check(xhat)?;
        self.check(x)?;
        Ok(self.pairing_unchecked(&xhat.residues, &x.residues))
    }

    fn pairing_unchecked(&self, xhat: &[u64], x: &[u64]) -> Ratio<u64> {
        let den = self.exponent();
        let mut num = 0u64;
        for ((&a, &b), &n) in xhat.iter().zip(x).zip(&self.orders) {
            // a*b < n^2, and den/n * (a*b mod n) < den
            num = (num + (a * b % n) * (den / n)) % den;
        }
        Ratio::new(num, den)
    }

    /// Least `k > 0` with `k * a = 0`.
    pub fn element_order(&self, a: &GroupElement) -> Result<u64> {
        self.check(a)?;
        Ok(a.residues
            .iter()
            .zip(&self.orders)
            .map(|(&r, &n)| n / gcd(r, n))
            .fold(1, lcm))
    }

    /// All elements, in canonical (lexicographic) order.
    pub fn enumerate(&self) -> Vec<GroupElement> {
        (0..self.cardinality).map(|i| self.element_at(i)).collect()
    }

    /// Position of `a` in the canonical enumeration.
    pub fn index_of(&self, a: &GroupElement) -> Result<usize> {
        self.check(a)?;
        Ok(self.index_of_residues(&a.residues))
    }

    fn index_of_residues(&self, residues: &[u64]) -> usize {
        residues
            .iter()
            .zip(&self.orders)
            .fold(0usize, |acc, (&r, &n)| acc * n as usize + r as usize)
    }

    /// Element at position `index` of the canonical enumeration.
    ///
    /// Panics when `index >= cardinality`.
    pub fn element_at(&self, index: usize) -> GroupElement {
        assert!(index < self.cardinality, "index {index} out of range for {self}");
        let mut residues = vec![0u64; self.orders.len()];
        let mut rest = index;
        for (slot, &n) in residues.iter_mut().zip(&self.orders).rev() {
            *slot = (rest % n as usize) as u64;
            rest /= n as usize;
        }
        GroupElement { residues }
    }

    /// Smallest subgroup containing `seed`.
    pub fn subgroup_closure<'a>(
        &self,
        seed: impl IntoIterator<Item = &'a GroupElement>,
    ) -> Result<BTreeSet<GroupElement>> {
        let mut idx = Vec::new();
        for g in seed {
            idx.push(self.index_of(g)?);
        }
        let table = IndexedGroup::new(self.clone());
        Ok(table
            .closure_of(idx)
            .into_iter()
            .map(|i| self.element_at(i))
            .collect())
    }
}

impl TryFrom<Vec<u64>> for GroupSpec {
    type Error = Error;

    fn try_from(orders: Vec<u64>) -> Result<Self> {
        Self::new(orders)
    }
}

impl From<GroupSpec> for Vec<u64> {
    fn from(g: GroupSpec) -> Self {
        g.orders
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return write!(f, "Z_1");
        }
        let parts: Vec<String> = self.orders.iter().map(|n| format!("Z_{n}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl GroupElement {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.residues.as_slice() {
            [r] => write!(f, "{r}"),
            rs => {
                let parts: Vec<String> = rs.iter().map(u64::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

/// A group with precomputed addition, negation and pairing tables over the
/// canonical indices. Hot loops (synthesis, spectra, closure) go through this.
#[derive(Debug, Clone)]
pub struct IndexedGroup {
    spec: GroupSpec,
    add: Vec<usize>,
    neg: Vec<usize>,
}

impl IndexedGroup {
    pub fn new(spec: GroupSpec) -> Self {
        let n = spec.cardinality();
        let elems = spec.enumerate();
        let mut add = vec![0usize; n * n];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                let sum: Vec<u64> = a
                    .residues
                    .iter()
                    .zip(&b.residues)
                    .zip(&spec.orders)
                    .map(|((&x, &y), &m)| (x + y) % m)
                    .collect();
                add[i * n + j] = spec.index_of_residues(&sum);
            }
        }
        let neg = (0..n)
            .map(|i| (0..n).find(|&j| add[i * n + j] == 0).expect("inverse exists"))
            .collect();
        Self { spec, add, neg }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.spec.cardinality()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.len() + b]
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a]
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// `k * a` for a non-negative integer `k`.
    pub fn scale(&self, k: u64, a: usize) -> usize {
        let e = self.spec.element_at(a);
        let residues: Vec<u64> = e
            .residues
            .iter()
            .zip(&self.spec.orders)
            .map(|(&r, &n)| (r as u128 * k as u128 % n as u128) as u64)
            .collect();
        self.spec.index_of_residues(&residues)
    }

    pub fn element_order(&self, a: usize) -> u64 {
        self.spec
            .element_order(&self.spec.element_at(a))
            .expect("index is a valid element")
    }

    /// Pairing of two indexed elements as a fraction of a turn.
    pub fn pairing(&self, xhat: usize, x: usize) -> Ratio<u64> {
        let a = self.spec.element_at(xhat);
        let b = self.spec.element_at(x);
        self.spec.pairing_unchecked(&a.residues, &b.residues)
    }

    /// Subgroup generated by `seed`, as sorted indices.
    pub fn closure_of(&self, seed: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut member = vec![false; self.len()];
        member[0] = true;
        let mut frontier = vec![0usize];
        let generators: Vec<usize> = seed.into_iter().collect();
        while let Some(h) = frontier.pop() {
            for &g in &generators {
                let s = self.add(h, g);
                if !member[s] {
                    member[s] = true;
                    frontier.push(s);
                }
            }
        }
        (0..self.len()).filter(|&i| member[i]).collect()
    }

    /// Whether the index set is a subgroup. In a finite group, a nonempty
    /// subset closed under addition is a subgroup.
    pub fn is_subgroup(&self, set: &[bool]) -> bool {
        if !set[0] {
            return false;
        }
        let members: Vec<usize> = (0..self.len()).filter(|&i| set[i]).collect();
        members
            .iter()
            .all(|&a| members.iter().all(|&b| set[self.add(a, b)]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(orders: &[u64]) -> GroupSpec {
        GroupSpec::new(orders.to_vec()).unwrap()
    }

    fn e(group: &GroupSpec, rs: &[i64]) -> GroupElement {
        group.element(rs).unwrap()
    }

    #[test]
    fn add_examples() {
        let z4 = g(&[4]);
        assert_eq!(z4.add(&e(&z4, &[3]), &e(&z4, &[2])).unwrap(), e(&z4, &[1]));
        let z2z3 = g(&[2, 3]);
        assert_eq!(
            z2z3.add(&e(&z2z3, &[1, 2]), &e(&z2z3, &[1, 2])).unwrap(),
            e(&z2z3, &[0, 1])
        );
        for a in z2z3.enumerate() {
            assert_eq!(z2z3.add(&a, &z2z3.zero()).unwrap(), a);
        }
    }

    #[test]
    fn neg_examples() {
        let z4 = g(&[4]);
        assert_eq!(z4.neg(&e(&z4, &[1])).unwrap(), e(&z4, &[3]));
        let z2z3 = g(&[2, 3]);
        assert_eq!(z2z3.neg(&e(&z2z3, &[1, 1])).unwrap(), e(&z2z3, &[1, 2]));
        assert_eq!(z2z3.neg(&z2z3.zero()).unwrap(), z2z3.zero());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let z2z3 = g(&[2, 3]);
        let z4 = g(&[4]);
        let err = z2z3.add(&z2z3.zero(), &z4.zero()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 1 }));
        assert!(z2z3.neg(&z4.zero()).is_err());
        assert!(z2z3.pairing(&z2z3.zero(), &z4.zero()).is_err());
    }

    #[test]
    fn pairing_examples() {
        let z2 = g(&[2]);
        assert_eq!(z2.pairing(&e(&z2, &[1]), &e(&z2, &[1])).unwrap(), Ratio::new(1, 2));
        let z2z2 = g(&[2, 2]);
        assert_eq!(
            z2z2.pairing(&e(&z2z2, &[1, 1]), &e(&z2z2, &[1, 0])).unwrap(),
            Ratio::new(1, 2)
        );
        let z3 = g(&[3]);
        assert_eq!(z3.pairing(&e(&z3, &[2]), &e(&z3, &[2])).unwrap(), Ratio::new(1, 3));
    }

    #[test]
    fn enumerate_examples() {
        let z2 = g(&[2]);
        assert_eq!(z2.enumerate(), vec![e(&z2, &[0]), e(&z2, &[1])]);
        let z2z2 = g(&[2, 2]);
        let want: Vec<_> = [[0, 0], [0, 1], [1, 0], [1, 1]].iter().map(|r| e(&z2z2, r)).collect();
        assert_eq!(z2z2.enumerate(), want);
        let z1 = g(&[1]);
        assert_eq!(z1.enumerate(), vec![z1.zero()]);
        assert_eq!(GroupSpec::trivial().enumerate().len(), 1);
    }

    #[test]
    fn element_order_examples() {
        let z6 = g(&[6]);
        assert_eq!(z6.element_order(&e(&z6, &[2])).unwrap(), 3);
        assert_eq!(z6.element_order(&z6.zero()).unwrap(), 1);
        let z2z3 = g(&[2, 3]);
        assert_eq!(z2z3.element_order(&e(&z2z3, &[1, 1])).unwrap(), 6);
    }

    #[test]
    fn subgroup_closure_examples() {
        let z6 = g(&[6]);
        let got = z6.subgroup_closure(&[e(&z6, &[2])]).unwrap();
        let want: BTreeSet<_> = [0, 2, 4].iter().map(|&r| e(&z6, &[r])).collect();
        assert_eq!(got, want);

        let z4 = g(&[4]);
        let got = z4.subgroup_closure(&[]).unwrap();
        assert_eq!(got, BTreeSet::from([z4.zero()]));

        let z2z2 = g(&[2, 2]);
        let got = z2z2.subgroup_closure(&[e(&z2z2, &[1, 0]), e(&z2z2, &[0, 1])]).unwrap();
        assert_eq!(got.len(), 4);
    }

    #[test]
    fn rejects_zero_order_and_overflow() {
        assert!(GroupSpec::new(vec![0]).is_err());
        assert!(GroupSpec::new(vec![u64::MAX, u64::MAX]).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(g(&[2, 3]).to_string(), "Z_2xZ_3");
        assert_eq!(g(&[4]).to_string(), "Z_4");
        assert_eq!(e(&g(&[2, 3]), &[1, 2]).to_string(), "(1,2)");
    }

    const SMALL_GROUPS: &[&[u64]] = &[
        &[1],
        &[2],
        &[3],
        &[4],
        &[6],
        &[2, 2],
        &[2, 3],
        &[2, 4],
        &[3, 3],
        &[2, 2, 2],
        &[4, 4],
        &[2, 2, 4],
        &[8, 8],
    ];

    #[test]
    fn group_axioms_hold_exhaustively() {
        for orders in SMALL_GROUPS {
            let grp = g(orders);
            assert!(grp.cardinality() <= 64);
            let elems = grp.enumerate();
            for a in &elems {
                assert_eq!(grp.add(a, &grp.neg(a).unwrap()).unwrap(), grp.zero());
                for b in &elems {
                    let ab = grp.add(a, b).unwrap();
                    assert_eq!(ab, grp.add(b, a).unwrap());
                    for c in elems.iter().step_by(3) {
                        assert_eq!(
                            grp.add(&ab, c).unwrap(),
                            grp.add(a, &grp.add(b, c).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn pairing_is_biadditive() {
        for orders in SMALL_GROUPS.iter().filter(|o| o.iter().product::<u64>() <= 16) {
            let grp = g(orders);
            let elems = grp.enumerate();
            for xh in &elems {
                for a in &elems {
                    for b in &elems {
                        let lhs = grp.pairing(xh, &grp.add(a, b).unwrap()).unwrap();
                        let rhs = grp.pairing(xh, a).unwrap() + grp.pairing(xh, b).unwrap();
                        let rhs = rhs - Ratio::from_integer(rhs.to_integer());
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn element_order_divides_cardinality() {
        for orders in SMALL_GROUPS {
            let grp = g(orders);
            for a in grp.enumerate() {
                let k = grp.element_order(&a).unwrap();
                assert_eq!(grp.cardinality() as u64 % k, 0);
                let idx = IndexedGroup::new(grp.clone());
                assert_eq!(idx.scale(k, grp.index_of(&a).unwrap()), 0);
            }
        }
    }

    #[test]
    fn closure_is_idempotent() {
        for orders in SMALL_GROUPS {
            let grp = g(orders);
            let elems = grp.enumerate();
            for seed in elems.chunks(3) {
                let once = grp.subgroup_closure(seed).unwrap();
                let twice = grp.subgroup_closure(&once).unwrap();
                assert_eq!(once, twice);
                let idx = IndexedGroup::new(grp.clone());
                let mut mask = vec![false; grp.cardinality()];
                for x in &once {
                    mask[grp.index_of(x).unwrap()] = true;
                }
                assert!(idx.is_subgroup(&mask));
            }
        }
    }

    #[test]
    fn index_round_trip() {
        let grp = g(&[2, 3, 4]);
        for (i, a) in grp.enumerate().iter().enumerate() {
            assert_eq!(grp.index_of(a).unwrap(), i);
        }
    }
}
